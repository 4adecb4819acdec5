//! Independent oracles for the acceptance suite. Everything here is written
//! from the definitions, sharing no code with the library implementation:
//! texture features re-derived by brute-force pair/run/zone enumeration, a
//! plain textbook Jacobi eigensolver, and pair-counting AUC.

use std::collections::BTreeMap;

/// A tiny VOI for the oracle: raw values plus mask on a small grid.
#[derive(Clone, Debug)]
pub struct OracleVoi {
    pub dims: (usize, usize, usize),
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

fn xlog2(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

impl OracleVoi {
    fn at(&self, x: i64, y: i64, z: i64) -> Option<usize> {
        let (nx, ny, nz) = self.dims;
        if x < 0 || y < 0 || z < 0 || x >= nx as i64 || y >= ny as i64 || z >= nz as i64 {
            None
        } else {
            Some(x as usize + nx * (y as usize + ny * z as usize))
        }
    }

    fn masked_coords(&self) -> Vec<(i64, i64, i64)> {
        let (nx, ny, nz) = self.dims;
        let mut out = Vec::new();
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    if self.mask[x + nx * (y + ny * z)] {
                        out.push((x as i64, y as i64, z as i64));
                    }
                }
            }
        }
        out
    }
}

/// Gray levels by the min-anchored floor rule; `levels[i]` parallels the
/// masked coordinate list.
fn discretize_oracle(voi: &OracleVoi, bin_width: f64) -> (Vec<(i64, i64, i64)>, Vec<usize>, usize) {
    let coords = voi.masked_coords();
    let min = coords
        .iter()
        .map(|&(x, y, z)| voi.values[voi.at(x, y, z).unwrap()])
        .fold(f64::INFINITY, f64::min);
    let levels: Vec<usize> = coords
        .iter()
        .map(|&(x, y, z)| {
            let v = voi.values[voi.at(x, y, z).unwrap()];
            ((v - min) / bin_width).floor() as usize + 1
        })
        .collect();
    let ng = levels.iter().copied().max().unwrap_or(1);
    (coords, levels, ng)
}

fn all_offsets_26() -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for dz in -1..=1i64 {
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if (dx, dy, dz) != (0, 0, 0) {
                    out.push((dx, dy, dz));
                }
            }
        }
    }
    out
}

/// The 13 unique directions, derived by discarding an offset whenever its
/// negation was already taken.
fn unique_directions_13() -> Vec<(i64, i64, i64)> {
    let mut kept: Vec<(i64, i64, i64)> = Vec::new();
    for d in all_offsets_26() {
        if !kept.contains(&(-d.0, -d.1, -d.2)) {
            kept.push(d);
        }
    }
    assert_eq!(kept.len(), 13);
    kept
}

/// All 75 texture features, keyed `<family>/<FeatureName>`.
pub fn texture_features_oracle(voi: &OracleVoi, bin_width: f64) -> BTreeMap<String, f64> {
    let (coords, levels, ng) = discretize_oracle(voi, bin_width);
    let n_masked = coords.len();
    let level_of = |c: (i64, i64, i64)| -> Option<usize> {
        coords.iter().position(|&p| p == c).map(|i| levels[i])
    };
    let mut features = BTreeMap::new();

    // ---------------- GLCM ----------------
    // every ordered pair of masked voxels one 26-offset apart
    let mut glcm = vec![vec![0.0f64; ng]; ng];
    let mut pair_count = 0.0;
    for (a, &ca) in coords.iter().enumerate() {
        for d in all_offsets_26() {
            let q = (ca.0 + d.0, ca.1 + d.1, ca.2 + d.2);
            if let Some(b) = coords.iter().position(|&p| p == q) {
                glcm[levels[a] - 1][levels[b] - 1] += 1.0;
                pair_count += 1.0;
            }
        }
    }
    if pair_count > 0.0 {
        for row in glcm.iter_mut() {
            for v in row.iter_mut() {
                *v /= pair_count;
            }
        }
    } else {
        // isolated voxels pair with themselves
        for (_, &l) in coords.iter().zip(&levels) {
            glcm[l - 1][l - 1] += 1.0 / n_masked as f64;
        }
    }
    glcm_features_oracle(&glcm, ng, &mut features);

    // ---------------- GLRLM ----------------
    // a voxel starts a run if its predecessor is not a masked same-level voxel
    let mut glrlm: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for dir in unique_directions_13() {
        for (a, &ca) in coords.iter().enumerate() {
            let prev = (ca.0 - dir.0, ca.1 - dir.1, ca.2 - dir.2);
            let starts = match level_of(prev) {
                Some(l) => l != levels[a],
                None => true,
            };
            if !starts {
                continue;
            }
            let mut len = 1usize;
            let mut cur = (ca.0 + dir.0, ca.1 + dir.1, ca.2 + dir.2);
            while level_of(cur) == Some(levels[a]) {
                len += 1;
                cur = (cur.0 + dir.0, cur.1 + dir.1, cur.2 + dir.2);
            }
            *glrlm.entry((levels[a], len)).or_default() += 1.0;
        }
    }
    run_zone_features_oracle(&glrlm, ng, n_masked, "glrlm", &mut features);

    // ---------------- GLSZM ----------------
    // union-find over masked voxels with equal levels and 26-adjacency
    let mut parent: Vec<usize> = (0..n_masked).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for a in 0..n_masked {
        for b in 0..n_masked {
            if a == b || levels[a] != levels[b] {
                continue;
            }
            let (pa, pb) = (coords[a], coords[b]);
            let cheb = (pa.0 - pb.0)
                .abs()
                .max((pa.1 - pb.1).abs())
                .max((pa.2 - pb.2).abs());
            if cheb == 1 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }
    let mut zone_sizes: BTreeMap<usize, usize> = BTreeMap::new();
    for a in 0..n_masked {
        let r = find(&mut parent, a);
        *zone_sizes.entry(r).or_default() += 1;
    }
    let mut glszm: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (&root, &size) in &zone_sizes {
        *glszm.entry((levels[root], size)).or_default() += 1.0;
    }
    run_zone_features_oracle(&glszm, ng, n_masked, "glszm", &mut features);

    // ---------------- GLDM ----------------
    let mut gldm: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (a, &ca) in coords.iter().enumerate() {
        let mut dep = 0usize;
        for d in all_offsets_26() {
            let q = (ca.0 + d.0, ca.1 + d.1, ca.2 + d.2);
            if level_of(q) == Some(levels[a]) {
                dep += 1;
            }
        }
        // dependence size includes the centre voxel
        *gldm.entry((levels[a], dep + 1)).or_default() += 1.0;
    }
    run_zone_features_oracle_gldm(&gldm, ng, &mut features);

    // ---------------- NGTDM ----------------
    let mut n_i = vec![0.0f64; ng];
    let mut s_i = vec![0.0f64; ng];
    for (a, &ca) in coords.iter().enumerate() {
        n_i[levels[a] - 1] += 1.0;
        let mut sum = 0.0;
        let mut cnt = 0usize;
        for d in all_offsets_26() {
            let q = (ca.0 + d.0, ca.1 + d.1, ca.2 + d.2);
            if let Some(l) = level_of(q) {
                sum += l as f64;
                cnt += 1;
            }
        }
        if cnt > 0 {
            s_i[levels[a] - 1] += (levels[a] as f64 - sum / cnt as f64).abs();
        }
    }
    ngtdm_features_oracle(&n_i, &s_i, n_masked as f64, &mut features);

    features
}

fn glcm_features_oracle(p: &[Vec<f64>], ng: usize, out: &mut BTreeMap<String, f64>) {
    let mut push = |name: &str, v: f64| {
        out.insert(format!("glcm/{name}"), v);
    };
    let px: Vec<f64> = (0..ng).map(|i| p[i].iter().sum()).collect();
    let occ: Vec<usize> = (0..ng).filter(|&i| px[i] > 0.0).collect();
    let mu: f64 = (0..ng).map(|i| (i + 1) as f64 * px[i]).sum();
    let var: f64 = (0..ng).map(|i| ((i + 1) as f64 - mu).powi(2) * px[i]).sum();

    let mut autoc = 0.0;
    let mut contrast = 0.0;
    let mut energy = 0.0;
    let mut entropy = 0.0;
    let mut maxp = 0.0f64;
    let mut shade = 0.0;
    let mut prom = 0.0;
    let mut tend = 0.0;
    let mut hxy1 = 0.0;
    let mut psum = vec![0.0; 2 * ng + 1];
    let mut pdiff = vec![0.0; ng];
    for i in 0..ng {
        for j in 0..ng {
            let v = p[i][j];
            if v <= 0.0 {
                continue;
            }
            let (fi, fj) = ((i + 1) as f64, (j + 1) as f64);
            autoc += fi * fj * v;
            contrast += (fi - fj).powi(2) * v;
            energy += v * v;
            entropy -= xlog2(v);
            maxp = maxp.max(v);
            tend += (fi + fj - 2.0 * mu).powi(2) * v;
            shade += (fi + fj - 2.0 * mu).powi(3) * v;
            prom += (fi + fj - 2.0 * mu).powi(4) * v;
            hxy1 -= v * (px[i] * px[j]).log2();
            psum[i + j + 2] += v;
            pdiff[i.abs_diff(j)] += v;
        }
    }
    let hx: f64 = -(0..ng).map(|i| xlog2(px[i])).sum::<f64>();
    let mut hxy2 = 0.0;
    for &i in &occ {
        for &j in &occ {
            hxy2 -= xlog2(px[i] * px[j]);
        }
    }
    let da: f64 = pdiff.iter().enumerate().map(|(k, v)| k as f64 * v).sum();
    let de: f64 = -pdiff.iter().map(|&v| xlog2(v)).sum::<f64>();
    let dv: f64 = pdiff
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64 - da).powi(2) * v)
        .sum();
    let single = occ.len() <= 1;

    push("Autocorrelation", autoc);
    push("ClusterProminence", prom);
    push("ClusterShade", shade);
    push("ClusterTendency", tend);
    push("Contrast", contrast);
    push(
        "Correlation",
        if single { 1.0 } else { (autoc - mu * mu) / var },
    );
    push("DifferenceAverage", da);
    push("DifferenceEntropy", de);
    push("DifferenceVariance", if single { 0.0 } else { dv });
    push(
        "Id",
        pdiff
            .iter()
            .enumerate()
            .map(|(k, v)| v / (1.0 + k as f64))
            .sum(),
    );
    push(
        "Idm",
        pdiff
            .iter()
            .enumerate()
            .map(|(k, v)| v / (1.0 + (k as f64).powi(2)))
            .sum(),
    );
    push(
        "Idmn",
        pdiff
            .iter()
            .enumerate()
            .map(|(k, v)| v / (1.0 + (k as f64).powi(2) / (ng as f64).powi(2)))
            .sum(),
    );
    push(
        "Idn",
        pdiff
            .iter()
            .enumerate()
            .map(|(k, v)| v / (1.0 + k as f64 / ng as f64))
            .sum(),
    );
    push("Imc1", if single { 1.0 } else { (entropy - hxy1) / hx });
    push(
        "Imc2",
        if single {
            1.0
        } else {
            (1.0 - (-2.0 * (hxy2 - entropy)).exp()).max(0.0).sqrt()
        },
    );
    push(
        "InverseVariance",
        pdiff
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| v / (k as f64).powi(2))
            .sum(),
    );
    push("JointAverage", mu);
    push("JointEnergy", energy);
    push("JointEntropy", entropy);
    push(
        "MCC",
        if single {
            1.0
        } else {
            mcc_oracle(p, &px, &occ)
        },
    );
    push("MaximumProbability", maxp);
    push(
        "SumAverage",
        psum.iter().enumerate().map(|(k, v)| k as f64 * v).sum(),
    );
    push("SumEntropy", -psum.iter().map(|&v| xlog2(v)).sum::<f64>());
    push("SumSquares", var);
}

fn mcc_oracle(p: &[Vec<f64>], px: &[f64], occ: &[usize]) -> f64 {
    let m = occ.len();
    let mut q = vec![vec![0.0f64; m]; m];
    for (a, &i) in occ.iter().enumerate() {
        for (b, &j) in occ.iter().enumerate() {
            let mut acc = 0.0;
            for &k in occ {
                acc += p[i][k] * p[j][k] / ((px[i] * px[j]).sqrt() * px[k]);
            }
            q[a][b] = acc;
        }
    }
    let eig = jacobi_oracle_values(&q);
    let mut sorted = eig;
    sorted.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sorted[1].clamp(0.0, 1.0).sqrt()
}

/// Shared run/zone feature arithmetic for GLRLM and GLSZM, written over
/// sparse (level, size) count maps.
fn run_zone_features_oracle(
    counts: &BTreeMap<(usize, usize), f64>,
    _ng: usize,
    n_masked: usize,
    family: &str,
    out: &mut BTreeMap<String, f64>,
) {
    let total: f64 = counts.values().sum();
    let weighted: f64 = counts.iter().map(|(&(_, s), &v)| s as f64 * v).sum();
    let mut by_level: BTreeMap<usize, f64> = BTreeMap::new();
    let mut by_size: BTreeMap<usize, f64> = BTreeMap::new();
    for (&(l, s), &v) in counts {
        *by_level.entry(l).or_default() += v;
        *by_size.entry(s).or_default() += v;
    }
    let mut sre = 0.0;
    let mut lre = 0.0;
    let mut lgl = 0.0;
    let mut hgl = 0.0;
    let mut srlgl = 0.0;
    let mut srhgl = 0.0;
    let mut lrlgl = 0.0;
    let mut lrhgl = 0.0;
    let mut entropy = 0.0;
    let mut mu_l = 0.0;
    let mut mu_s = 0.0;
    for (&(l, s), &v) in counts {
        let pr = v / total;
        let l2 = (l * l) as f64;
        let s2 = (s * s) as f64;
        sre += pr / s2;
        lre += pr * s2;
        lgl += pr / l2;
        hgl += pr * l2;
        srlgl += pr / (l2 * s2);
        srhgl += pr * l2 / s2;
        lrlgl += pr * s2 / l2;
        lrhgl += pr * l2 * s2;
        entropy -= xlog2(pr);
        mu_l += pr * l as f64;
        mu_s += pr * s as f64;
    }
    let mut var_l = 0.0;
    let mut var_s = 0.0;
    for (&(l, s), &v) in counts {
        let pr = v / total;
        var_l += pr * (l as f64 - mu_l).powi(2);
        var_s += pr * (s as f64 - mu_s).powi(2);
    }
    let gln: f64 = by_level.values().map(|v| v * v).sum::<f64>() / total;
    let sn: f64 = by_size.values().map(|v| v * v).sum::<f64>() / total;

    let mut push = |name: &str, v: f64| {
        out.insert(format!("{family}/{name}"), v);
    };
    if family == "glrlm" {
        push("GrayLevelNonUniformity", gln);
        push("GrayLevelNonUniformityNormalized", gln / total);
        push("GrayLevelVariance", var_l);
        push("HighGrayLevelRunEmphasis", hgl);
        push("LongRunEmphasis", lre);
        push("LongRunHighGrayLevelEmphasis", lrhgl);
        push("LongRunLowGrayLevelEmphasis", lrlgl);
        push("LowGrayLevelRunEmphasis", lgl);
        push("RunEntropy", entropy);
        push("RunLengthNonUniformity", sn);
        push("RunLengthNonUniformityNormalized", sn / total);
        push("RunPercentage", total / weighted);
        push("RunVariance", var_s);
        push("ShortRunEmphasis", sre);
        push("ShortRunHighGrayLevelEmphasis", srhgl);
        push("ShortRunLowGrayLevelEmphasis", srlgl);
    } else {
        push("GrayLevelNonUniformity", gln);
        push("GrayLevelNonUniformityNormalized", gln / total);
        push("GrayLevelVariance", var_l);
        push("HighGrayLevelZoneEmphasis", hgl);
        push("LargeAreaEmphasis", lre);
        push("LargeAreaHighGrayLevelEmphasis", lrhgl);
        push("LargeAreaLowGrayLevelEmphasis", lrlgl);
        push("LowGrayLevelZoneEmphasis", lgl);
        push("SizeZoneNonUniformity", sn);
        push("SizeZoneNonUniformityNormalized", sn / total);
        push("SmallAreaEmphasis", sre);
        push("SmallAreaHighGrayLevelEmphasis", srhgl);
        push("SmallAreaLowGrayLevelEmphasis", srlgl);
        push("ZoneEntropy", entropy);
        push("ZonePercentage", total / n_masked as f64);
        push("ZoneVariance", var_s);
    }
}

fn run_zone_features_oracle_gldm(
    counts: &BTreeMap<(usize, usize), f64>,
    _ng: usize,
    out: &mut BTreeMap<String, f64>,
) {
    let total: f64 = counts.values().sum();
    let mut by_level: BTreeMap<usize, f64> = BTreeMap::new();
    let mut by_size: BTreeMap<usize, f64> = BTreeMap::new();
    for (&(l, s), &v) in counts {
        *by_level.entry(l).or_default() += v;
        *by_size.entry(s).or_default() += v;
    }
    let mut sde = 0.0;
    let mut lde = 0.0;
    let mut lgl = 0.0;
    let mut hgl = 0.0;
    let mut sdlgl = 0.0;
    let mut sdhgl = 0.0;
    let mut ldlgl = 0.0;
    let mut ldhgl = 0.0;
    let mut entropy = 0.0;
    let mut mu_l = 0.0;
    let mut mu_s = 0.0;
    for (&(l, s), &v) in counts {
        let pr = v / total;
        let l2 = (l * l) as f64;
        let s2 = (s * s) as f64;
        sde += pr / s2;
        lde += pr * s2;
        lgl += pr / l2;
        hgl += pr * l2;
        sdlgl += pr / (l2 * s2);
        sdhgl += pr * l2 / s2;
        ldlgl += pr * s2 / l2;
        ldhgl += pr * l2 * s2;
        entropy -= xlog2(pr);
        mu_l += pr * l as f64;
        mu_s += pr * s as f64;
    }
    let mut var_l = 0.0;
    let mut var_s = 0.0;
    for (&(l, s), &v) in counts {
        let pr = v / total;
        var_l += pr * (l as f64 - mu_l).powi(2);
        var_s += pr * (s as f64 - mu_s).powi(2);
    }
    let mut push = |name: &str, v: f64| {
        out.insert(format!("gldm/{name}"), v);
    };
    push("DependenceEntropy", entropy);
    push(
        "DependenceNonUniformity",
        by_size.values().map(|v| v * v).sum::<f64>() / total,
    );
    push(
        "DependenceNonUniformityNormalized",
        by_size.values().map(|v| v * v).sum::<f64>() / (total * total),
    );
    push("DependenceVariance", var_s);
    push(
        "GrayLevelNonUniformity",
        by_level.values().map(|v| v * v).sum::<f64>() / total,
    );
    push("GrayLevelVariance", var_l);
    push("HighGrayLevelEmphasis", hgl);
    push("LargeDependenceEmphasis", lde);
    push("LargeDependenceHighGrayLevelEmphasis", ldhgl);
    push("LargeDependenceLowGrayLevelEmphasis", ldlgl);
    push("LowGrayLevelEmphasis", lgl);
    push("SmallDependenceEmphasis", sde);
    push("SmallDependenceHighGrayLevelEmphasis", sdhgl);
    push("SmallDependenceLowGrayLevelEmphasis", sdlgl);
}

fn ngtdm_features_oracle(n_i: &[f64], s_i: &[f64], n_masked: f64, out: &mut BTreeMap<String, f64>) {
    let ng = n_i.len();
    let p_i: Vec<f64> = n_i.iter().map(|v| v / n_masked).collect();
    let occ: Vec<usize> = (0..ng).filter(|&i| n_i[i] > 0.0).collect();
    let sum_ps: f64 = occ.iter().map(|&i| p_i[i] * s_i[i]).sum();
    let sum_s: f64 = occ.iter().map(|&i| s_i[i]).sum();
    let ngp = occ.len() as f64;

    let mut busy_den = 0.0;
    let mut complexity = 0.0;
    let mut strength = 0.0;
    let mut contrast_pairs = 0.0;
    for &i in &occ {
        for &j in &occ {
            let (fi, fj) = ((i + 1) as f64, (j + 1) as f64);
            busy_den += (fi * p_i[i] - fj * p_i[j]).abs();
            complexity += (fi - fj).abs() * (p_i[i] * s_i[i] + p_i[j] * s_i[j]) / (p_i[i] + p_i[j]);
            strength += (p_i[i] + p_i[j]) * (fi - fj).powi(2);
            contrast_pairs += p_i[i] * p_i[j] * (fi - fj).powi(2);
        }
    }
    let mut push = |name: &str, v: f64| {
        out.insert(format!("ngtdm/{name}"), v);
    };
    push(
        "Busyness",
        if busy_den > 0.0 {
            sum_ps / busy_den
        } else {
            0.0
        },
    );
    push("Coarseness", if sum_ps > 0.0 { 1.0 / sum_ps } else { 0.0 });
    push("Complexity", complexity / n_masked);
    push(
        "Contrast",
        if ngp > 1.0 {
            contrast_pairs / (ngp * (ngp - 1.0)) * (sum_s / n_masked)
        } else {
            0.0
        },
    );
    push("Strength", if sum_s > 0.0 { strength / sum_s } else { 0.0 });
}

/// Eigenvalues of a small symmetric matrix by plain unthresholded cyclic
/// Jacobi; no sorting, no eigenvectors.
pub fn jacobi_oracle_values(a: &[Vec<f64>]) -> Vec<f64> {
    let (vals, _) = jacobi_oracle(a);
    vals
}

/// Textbook cyclic Jacobi returning (eigenvalues, eigenvector columns),
/// both sorted by descending eigenvalue.
pub fn jacobi_oracle(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let scale: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    for _ in 0..300 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q] * m[p][q];
            }
        }
        if (2.0 * off).sqrt() <= 1e-14 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q] == 0.0 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for i in 0..n {
                    let (mip, miq) = (m[i][p], m[i][q]);
                    m[i][p] = c * mip - s * miq;
                    m[i][q] = s * mip + c * miq;
                }
                for j in 0..n {
                    let (mpj, mqj) = (m[p][j], m[q][j]);
                    m[p][j] = c * mpj - s * mqj;
                    m[q][j] = s * mpj + c * mqj;
                }
                for i in 0..n {
                    let (vip, viq) = (v[i][p], v[i][q]);
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j][j].partial_cmp(&m[i][i]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let vecs: Vec<Vec<f64>> = order
        .iter()
        .map(|&col| (0..n).map(|r| v[r][col]).collect())
        .collect();
    (vals, vecs)
}

/// Mann-Whitney statistic with half credit for ties.
pub fn auc_pair_counting(scores: &[f64], labels: &[u8]) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            den += 1.0;
            num += if si > sj {
                1.0
            } else if si == sj {
                0.5
            } else {
                0.0
            };
        }
    }
    num / den
}
