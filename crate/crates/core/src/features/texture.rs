//! Texture matrices (GLCM, GLRLM, GLSZM, GLDM, NGTDM) and their feature
//! sets: 24 + 16 + 16 + 14 + 5 = 75 values per image.
//!
//! Conventions, fixed so every feature is a total function:
//! - GLCM: distance-1 pairs over the 13 unique 3D directions, both voxels in
//!   the mask, symmetric accumulation, one matrix summed over directions and
//!   normalized once. If the mask admits no neighbouring pair the matrix
//!   falls back to the diagonal level marginals (each voxel paired with
//!   itself), keeping the sum at 1.
//! - GLRLM: runs per direction, counts summed over the 13 directions.
//! - GLSZM: 26-connected constant-level zones.
//! - GLDM: per-voxel count of 26-neighbours in-mask with identical level
//!   (alpha = 0); feature formulas use dependence size = count + 1 so the
//!   centre voxel is included.
//! - NGTDM: per-level counts and summed absolute differences to the mean of
//!   the masked 26-neighbourhood; isolated voxels contribute zero.
//! - Entropy-like terms use 0*log(0) = 0; degenerate single-level inputs
//!   give Correlation = Imc1 = Imc2 = MCC = 1 and DifferenceVariance = 0;
//!   NGTDM ratios with zero denominators return 0.

use crate::linalg::{jacobi_eigh, xlog2, Mat};

use super::discretize::DiscretizedVoi;

pub const GLCM_NAMES: [&str; 24] = [
    "Autocorrelation",
    "ClusterProminence",
    "ClusterShade",
    "ClusterTendency",
    "Contrast",
    "Correlation",
    "DifferenceAverage",
    "DifferenceEntropy",
    "DifferenceVariance",
    "Id",
    "Idm",
    "Idmn",
    "Idn",
    "Imc1",
    "Imc2",
    "InverseVariance",
    "JointAverage",
    "JointEnergy",
    "JointEntropy",
    "MCC",
    "MaximumProbability",
    "SumAverage",
    "SumEntropy",
    "SumSquares",
];

pub const GLDM_NAMES: [&str; 14] = [
    "DependenceEntropy",
    "DependenceNonUniformity",
    "DependenceNonUniformityNormalized",
    "DependenceVariance",
    "GrayLevelNonUniformity",
    "GrayLevelVariance",
    "HighGrayLevelEmphasis",
    "LargeDependenceEmphasis",
    "LargeDependenceHighGrayLevelEmphasis",
    "LargeDependenceLowGrayLevelEmphasis",
    "LowGrayLevelEmphasis",
    "SmallDependenceEmphasis",
    "SmallDependenceHighGrayLevelEmphasis",
    "SmallDependenceLowGrayLevelEmphasis",
];

pub const GLRLM_NAMES: [&str; 16] = [
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "GrayLevelVariance",
    "HighGrayLevelRunEmphasis",
    "LongRunEmphasis",
    "LongRunHighGrayLevelEmphasis",
    "LongRunLowGrayLevelEmphasis",
    "LowGrayLevelRunEmphasis",
    "RunEntropy",
    "RunLengthNonUniformity",
    "RunLengthNonUniformityNormalized",
    "RunPercentage",
    "RunVariance",
    "ShortRunEmphasis",
    "ShortRunHighGrayLevelEmphasis",
    "ShortRunLowGrayLevelEmphasis",
];

pub const GLSZM_NAMES: [&str; 16] = [
    "GrayLevelNonUniformity",
    "GrayLevelNonUniformityNormalized",
    "GrayLevelVariance",
    "HighGrayLevelZoneEmphasis",
    "LargeAreaEmphasis",
    "LargeAreaHighGrayLevelEmphasis",
    "LargeAreaLowGrayLevelEmphasis",
    "LowGrayLevelZoneEmphasis",
    "SizeZoneNonUniformity",
    "SizeZoneNonUniformityNormalized",
    "SmallAreaEmphasis",
    "SmallAreaHighGrayLevelEmphasis",
    "SmallAreaLowGrayLevelEmphasis",
    "ZoneEntropy",
    "ZonePercentage",
    "ZoneVariance",
];

pub const NGTDM_NAMES: [&str; 5] = [
    "Busyness",
    "Coarseness",
    "Complexity",
    "Contrast",
    "Strength",
];

/// The 13 unique distance-1 directions of the 3D 26-neighbourhood.
pub const DIRECTIONS_13: [(i64, i64, i64); 13] = [
    (1, 0, 0),
    (-1, 1, 0),
    (0, 1, 0),
    (1, 1, 0),
    (-1, -1, 1),
    (0, -1, 1),
    (1, -1, 1),
    (-1, 0, 1),
    (0, 0, 1),
    (1, 0, 1),
    (-1, 1, 1),
    (0, 1, 1),
    (1, 1, 1),
];

fn offsets_26() -> Vec<(i64, i64, i64)> {
    let mut out = Vec::with_capacity(26);
    for dz in -1i64..=1 {
        for dy in -1i64..=1 {
            for dx in -1i64..=1 {
                if (dx, dy, dz) != (0, 0, 0) {
                    out.push((dx, dy, dz));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct TextureMatrices {
    /// ng x ng, normalized to sum 1, symmetric.
    pub glcm: Mat,
    /// ng x max_run_length raw run counts (all 13 directions summed).
    pub glrlm: Mat,
    /// ng x max_zone_size raw zone counts.
    pub glszm: Mat,
    /// ng x (max_dependence + 1) raw counts; column j = j dependent neighbours.
    pub gldm: Mat,
    /// Per-level voxel counts, probabilities and summed absolute differences.
    pub ngtdm_n: Vec<f64>,
    pub ngtdm_p: Vec<f64>,
    pub ngtdm_s: Vec<f64>,
}

pub fn build_texture_matrices(d: &DiscretizedVoi) -> TextureMatrices {
    let (nx, ny, nz) = d.dims;
    let ng = d.ng;
    let in_grid = |x: i64, y: i64, z: i64| {
        x >= 0 && y >= 0 && z >= 0 && x < nx as i64 && y < ny as i64 && z < nz as i64
    };
    let level_at =
        |x: i64, y: i64, z: i64| d.grid[x as usize + nx * (y as usize + ny * z as usize)];

    // ---- GLCM -------------------------------------------------------------
    let mut glcm = Mat::zeros(ng, ng);
    let mut pair_total = 0.0;
    for (&(x, y, z), &li) in d.coords.iter().zip(&d.levels) {
        for (dx, dy, dz) in DIRECTIONS_13 {
            let (qx, qy, qz) = (x as i64 + dx, y as i64 + dy, z as i64 + dz);
            if in_grid(qx, qy, qz) {
                let lj = level_at(qx, qy, qz);
                if lj > 0 {
                    let (a, b) = ((li - 1) as usize, (lj - 1) as usize);
                    glcm.set(a, b, glcm.get(a, b) + 1.0);
                    glcm.set(b, a, glcm.get(b, a) + 1.0);
                    pair_total += 2.0;
                }
            }
        }
    }
    if pair_total > 0.0 {
        for r in 0..ng {
            for c in 0..ng {
                glcm.set(r, c, glcm.get(r, c) / pair_total);
            }
        }
    } else {
        // no neighbouring pairs: diagonal marginal fallback
        let counts = d.level_counts();
        let n = d.n_voxels() as f64;
        for (i, c) in counts.iter().enumerate() {
            glcm.set(i, i, c / n);
        }
    }

    // ---- GLRLM ------------------------------------------------------------
    let mut run_events: Vec<(usize, usize)> = Vec::new();
    for (dx, dy, dz) in DIRECTIONS_13 {
        for z in 0..nz as i64 {
            for y in 0..ny as i64 {
                for x in 0..nx as i64 {
                    // line starts where the predecessor falls off the grid
                    if in_grid(x - dx, y - dy, z - dz) {
                        continue;
                    }
                    let (mut cx, mut cy, mut cz) = (x, y, z);
                    let mut current: u32 = 0;
                    let mut len = 0usize;
                    while in_grid(cx, cy, cz) {
                        let l = level_at(cx, cy, cz);
                        if l != 0 && l == current {
                            len += 1;
                        } else {
                            if current != 0 {
                                run_events.push(((current - 1) as usize, len));
                            }
                            current = l;
                            len = usize::from(l != 0);
                        }
                        cx += dx;
                        cy += dy;
                        cz += dz;
                    }
                    if current != 0 {
                        run_events.push(((current - 1) as usize, len));
                    }
                }
            }
        }
    }
    let max_run = run_events.iter().map(|&(_, l)| l).max().unwrap_or(1);
    let mut glrlm = Mat::zeros(ng, max_run);
    for (level, len) in run_events {
        glrlm.set(level, len - 1, glrlm.get(level, len - 1) + 1.0);
    }

    // ---- GLSZM ------------------------------------------------------------
    let neigh = offsets_26();
    let mut visited = vec![false; nx * ny * nz];
    let mut zone_events: Vec<(usize, usize)> = Vec::new();
    let mut stack: Vec<(i64, i64, i64)> = Vec::new();
    for &(x, y, z) in &d.coords {
        let idx = x + nx * (y + ny * z);
        if visited[idx] {
            continue;
        }
        let level = d.grid[idx];
        visited[idx] = true;
        stack.push((x as i64, y as i64, z as i64));
        let mut size = 0usize;
        while let Some((cx, cy, cz)) = stack.pop() {
            size += 1;
            for &(dx, dy, dz) in &neigh {
                let (qx, qy, qz) = (cx + dx, cy + dy, cz + dz);
                if in_grid(qx, qy, qz) {
                    let qidx = qx as usize + nx * (qy as usize + ny * qz as usize);
                    if !visited[qidx] && d.grid[qidx] == level {
                        visited[qidx] = true;
                        stack.push((qx, qy, qz));
                    }
                }
            }
        }
        zone_events.push(((level - 1) as usize, size));
    }
    let max_zone = zone_events.iter().map(|&(_, s)| s).max().unwrap_or(1);
    let mut glszm = Mat::zeros(ng, max_zone);
    for (level, size) in zone_events {
        glszm.set(level, size - 1, glszm.get(level, size - 1) + 1.0);
    }

    // ---- GLDM and NGTDM (both scan the 26-neighbourhood) -------------------
    let mut dep_events: Vec<(usize, usize)> = Vec::new();
    let mut ngtdm_n = vec![0.0; ng];
    let mut ngtdm_s = vec![0.0; ng];
    for (&(x, y, z), &li) in d.coords.iter().zip(&d.levels) {
        let mut dep = 0usize;
        let mut nbr_sum = 0.0;
        let mut nbr_count = 0usize;
        for &(dx, dy, dz) in &neigh {
            let (qx, qy, qz) = (x as i64 + dx, y as i64 + dy, z as i64 + dz);
            if in_grid(qx, qy, qz) {
                let lj = level_at(qx, qy, qz);
                if lj > 0 {
                    if lj == li {
                        dep += 1;
                    }
                    nbr_sum += lj as f64;
                    nbr_count += 1;
                }
            }
        }
        dep_events.push(((li - 1) as usize, dep));
        ngtdm_n[(li - 1) as usize] += 1.0;
        if nbr_count > 0 {
            ngtdm_s[(li - 1) as usize] += (li as f64 - nbr_sum / nbr_count as f64).abs();
        }
    }
    let max_dep = dep_events.iter().map(|&(_, j)| j).max().unwrap_or(0);
    let mut gldm = Mat::zeros(ng, max_dep + 1);
    for (level, dep) in dep_events {
        gldm.set(level, dep, gldm.get(level, dep) + 1.0);
    }
    let n = d.n_voxels() as f64;
    let ngtdm_p: Vec<f64> = ngtdm_n.iter().map(|c| c / n).collect();

    TextureMatrices {
        glcm,
        glrlm,
        glszm,
        gldm,
        ngtdm_n,
        ngtdm_p,
        ngtdm_s,
    }
}

/// All 75 texture features, grouped per family; order matches the
/// corresponding `*_NAMES` arrays.
pub struct TextureFeatures {
    pub glcm: [f64; 24],
    pub gldm: [f64; 14],
    pub glrlm: [f64; 16],
    pub glszm: [f64; 16],
    pub ngtdm: [f64; 5],
}

pub fn texture_features(m: &TextureMatrices, d: &DiscretizedVoi) -> TextureFeatures {
    TextureFeatures {
        glcm: glcm_features(&m.glcm),
        gldm: gldm_features(&m.gldm),
        glrlm: glrlm_features(&m.glrlm),
        glszm: glszm_features(&m.glszm, d.n_voxels() as f64),
        ngtdm: ngtdm_features(&m.ngtdm_n, &m.ngtdm_p, &m.ngtdm_s, d.n_voxels() as f64),
    }
}

pub fn glcm_features(p: &Mat) -> [f64; 24] {
    let ng = p.rows();
    let px: Vec<f64> = (0..ng)
        .map(|i| (0..ng).map(|j| p.get(i, j)).sum())
        .collect();
    let occupied: Vec<usize> = (0..ng).filter(|&i| px[i] > 0.0).collect();
    let n_occ = occupied.len();
    let mu: f64 = px.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v).sum();
    let sigma2: f64 = px
        .iter()
        .enumerate()
        .map(|(i, v)| ((i + 1) as f64 - mu).powi(2) * v)
        .sum();

    let mut p_sum = vec![0.0; 2 * ng + 1]; // indexed by i+j (level values)
    let mut p_diff = vec![0.0; ng]; // indexed by |i-j|
    let mut autocorrelation = 0.0;
    let mut contrast = 0.0;
    let mut joint_energy = 0.0;
    let mut joint_entropy = 0.0;
    let mut max_prob = 0.0f64;
    let mut cluster2 = 0.0;
    let mut cluster3 = 0.0;
    let mut cluster4 = 0.0;
    let mut hxy1 = 0.0;
    for i in 0..ng {
        for j in 0..ng {
            let v = p.get(i, j);
            if v == 0.0 {
                continue;
            }
            let fi = (i + 1) as f64;
            let fj = (j + 1) as f64;
            p_sum[i + j + 2] += v;
            p_diff[i.abs_diff(j)] += v;
            autocorrelation += fi * fj * v;
            contrast += (fi - fj) * (fi - fj) * v;
            joint_energy += v * v;
            joint_entropy -= xlog2(v);
            max_prob = max_prob.max(v);
            let c = fi + fj - 2.0 * mu;
            cluster2 += c * c * v;
            cluster3 += c * c * c * v;
            cluster4 += c * c * c * c * v;
            let marg = px[i] * px[j];
            if marg > 0.0 {
                hxy1 -= v * marg.log2();
            }
        }
    }
    let hx: f64 = -px.iter().map(|&v| xlog2(v)).sum::<f64>();
    let mut hxy2 = 0.0;
    for &i in &occupied {
        for &j in &occupied {
            hxy2 -= xlog2(px[i] * px[j]);
        }
    }

    let diff_avg: f64 = p_diff.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let diff_entropy: f64 = -p_diff.iter().map(|&v| xlog2(v)).sum::<f64>();
    let diff_var: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64 - diff_avg).powi(2) * v)
        .sum();
    let id: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| v / (1.0 + k as f64))
        .sum();
    let idm: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| v / (1.0 + (k * k) as f64))
        .sum();
    let idmn: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| v / (1.0 + (k * k) as f64 / (ng * ng) as f64))
        .sum();
    let idn: f64 = p_diff
        .iter()
        .enumerate()
        .map(|(k, v)| v / (1.0 + k as f64 / ng as f64))
        .sum();
    let inverse_variance: f64 = p_diff
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| v / (k * k) as f64)
        .sum();
    let sum_avg: f64 = p_sum.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let sum_entropy: f64 = -p_sum.iter().map(|&v| xlog2(v)).sum::<f64>();

    let degenerate = n_occ <= 1;
    let correlation = if degenerate {
        1.0
    } else {
        (autocorrelation - mu * mu) / sigma2
    };
    // HX = HY for a symmetric matrix, so max(HX, HY) = HX, positive here
    let imc1 = if degenerate {
        1.0
    } else {
        (joint_entropy - hxy1) / hx
    };
    let imc2 = if degenerate {
        1.0
    } else {
        (1.0 - (-2.0 * (hxy2 - joint_entropy)).exp())
            .max(0.0)
            .sqrt()
    };
    let mcc = if degenerate {
        1.0
    } else {
        let m = occupied.len();
        let mut q = Mat::zeros(m, m);
        for a in 0..m {
            for b in 0..m {
                let (ia, ib) = (occupied[a], occupied[b]);
                let mut acc = 0.0;
                for &k in &occupied {
                    acc += p.get(ia, k) * p.get(ib, k) / ((px[ia] * px[ib]).sqrt() * px[k]);
                }
                q.set(a, b, acc);
            }
        }
        let (eig, _) = jacobi_eigh(&q).expect("finite symmetric matrix");
        eig[1].clamp(0.0, 1.0).sqrt()
    };

    [
        autocorrelation,
        cluster4,
        cluster3,
        cluster2,
        contrast,
        correlation,
        diff_avg,
        diff_entropy,
        if degenerate { 0.0 } else { diff_var },
        id,
        idm,
        idmn,
        idn,
        imc1,
        imc2,
        inverse_variance,
        mu,
        joint_energy,
        joint_entropy,
        mcc,
        max_prob,
        sum_avg,
        sum_entropy,
        sigma2,
    ]
}

/// Shared body for the run/zone style matrices: counts indexed by
/// (level - 1, size - 1).
struct RunStats {
    total: f64,
    sum_size_weighted: f64,
    small: f64,
    large: f64,
    gln: f64,
    sn: f64,
    low: f64,
    high: f64,
    small_low: f64,
    small_high: f64,
    large_low: f64,
    large_high: f64,
    level_var: f64,
    size_var: f64,
    entropy: f64,
}

fn run_stats(counts: &Mat) -> RunStats {
    let (ng, ns) = (counts.rows(), counts.cols());
    let total: f64 = counts.data().iter().sum();
    let mut level_marginal = vec![0.0; ng];
    let mut size_marginal = vec![0.0; ns];
    let mut sum_size_weighted = 0.0;
    for i in 0..ng {
        for s in 0..ns {
            let v = counts.get(i, s);
            level_marginal[i] += v;
            size_marginal[s] += v;
            sum_size_weighted += v * (s + 1) as f64;
        }
    }
    let mut small = 0.0;
    let mut large = 0.0;
    let mut low = 0.0;
    let mut high = 0.0;
    let mut small_low = 0.0;
    let mut small_high = 0.0;
    let mut large_low = 0.0;
    let mut large_high = 0.0;
    let mut entropy = 0.0;
    let mut mu_level = 0.0;
    let mut mu_size = 0.0;
    for i in 0..ng {
        let fi2 = ((i + 1) * (i + 1)) as f64;
        for s in 0..ns {
            let v = counts.get(i, s);
            if v == 0.0 {
                continue;
            }
            let pr = v / total;
            let fs2 = ((s + 1) * (s + 1)) as f64;
            small += pr / fs2;
            large += pr * fs2;
            low += pr / fi2;
            high += pr * fi2;
            small_low += pr / (fi2 * fs2);
            small_high += pr * fi2 / fs2;
            large_low += pr * fs2 / fi2;
            large_high += pr * fi2 * fs2;
            entropy -= xlog2(pr);
            mu_level += pr * (i + 1) as f64;
            mu_size += pr * (s + 1) as f64;
        }
    }
    let mut level_var = 0.0;
    let mut size_var = 0.0;
    for i in 0..ng {
        for s in 0..ns {
            let v = counts.get(i, s);
            if v == 0.0 {
                continue;
            }
            let pr = v / total;
            level_var += pr * ((i + 1) as f64 - mu_level).powi(2);
            size_var += pr * ((s + 1) as f64 - mu_size).powi(2);
        }
    }
    let gln = level_marginal.iter().map(|v| v * v).sum::<f64>() / total;
    let sn = size_marginal.iter().map(|v| v * v).sum::<f64>() / total;
    RunStats {
        total,
        sum_size_weighted,
        small,
        large,
        gln,
        sn,
        low,
        high,
        small_low,
        small_high,
        large_low,
        large_high,
        level_var,
        size_var,
        entropy,
    }
}

pub fn glrlm_features(counts: &Mat) -> [f64; 16] {
    let s = run_stats(counts);
    [
        s.gln,
        s.gln / s.total,
        s.level_var,
        s.high,
        s.large,
        s.large_high,
        s.large_low,
        s.low,
        s.entropy,
        s.sn,
        s.sn / s.total,
        s.total / s.sum_size_weighted,
        s.size_var,
        s.small,
        s.small_high,
        s.small_low,
    ]
}

pub fn glszm_features(counts: &Mat, n_voxels: f64) -> [f64; 16] {
    let s = run_stats(counts);
    [
        s.gln,
        s.gln / s.total,
        s.level_var,
        s.high,
        s.large,
        s.large_high,
        s.large_low,
        s.low,
        s.sn,
        s.sn / s.total,
        s.small,
        s.small_high,
        s.small_low,
        s.entropy,
        s.total / n_voxels,
        s.size_var,
    ]
}

pub fn gldm_features(counts: &Mat) -> [f64; 14] {
    // column j means j dependent neighbours; dependence size is j + 1,
    // which is exactly what run_stats computes from the column index
    let s = run_stats(counts);
    [
        s.entropy,
        s.sn,
        s.sn / s.total,
        s.size_var,
        s.gln,
        s.level_var,
        s.high,
        s.large,
        s.large_high,
        s.large_low,
        s.low,
        s.small,
        s.small_high,
        s.small_low,
    ]
}

pub fn ngtdm_features(n: &[f64], p: &[f64], s: &[f64], n_voxels: f64) -> [f64; 5] {
    let occupied: Vec<usize> = (0..n.len()).filter(|&i| n[i] > 0.0).collect();
    let ngp = occupied.len() as f64;
    let sum_ps: f64 = occupied.iter().map(|&i| p[i] * s[i]).sum();
    let sum_s: f64 = occupied.iter().map(|&i| s[i]).sum();

    let coarseness = if sum_ps > 0.0 { 1.0 / sum_ps } else { 0.0 };

    let contrast = if ngp > 1.0 {
        let mut pairs = 0.0;
        for &i in &occupied {
            for &j in &occupied {
                let d = (i as f64) - (j as f64);
                pairs += p[i] * p[j] * d * d;
            }
        }
        pairs / (ngp * (ngp - 1.0)) * (sum_s / n_voxels)
    } else {
        0.0
    };

    let mut busy_denom = 0.0;
    let mut complexity = 0.0;
    let mut strength_num = 0.0;
    for &i in &occupied {
        let fi = (i + 1) as f64;
        for &j in &occupied {
            let fj = (j + 1) as f64;
            busy_denom += (fi * p[i] - fj * p[j]).abs();
            complexity += (fi - fj).abs() * (p[i] * s[i] + p[j] * s[j]) / (p[i] + p[j]);
            strength_num += (p[i] + p[j]) * (fi - fj) * (fi - fj);
        }
    }
    let busyness = if busy_denom > 0.0 {
        sum_ps / busy_denom
    } else {
        0.0
    };
    let complexity = complexity / n_voxels;
    let strength = if sum_s > 0.0 {
        strength_num / sum_s
    } else {
        0.0
    };

    [busyness, coarseness, complexity, contrast, strength]
}
