//! 3D shape descriptors computed from the mask geometry alone.
//!
//! Surface area sums exposed voxel faces (no mesh is built) and MeshVolume
//! is reported equal to VoxelVolume; diameters are maximum centre-to-centre
//! distances among surface voxels.

use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigh, Mat};
use crate::volume::MaskVolume;

pub const SHAPE_NAMES: [&str; 14] = [
    "VoxelVolume",
    "SurfaceArea",
    "SurfaceVolumeRatio",
    "Sphericity",
    "Maximum3DDiameter",
    "Maximum2DDiameterSlice",
    "Maximum2DDiameterColumn",
    "Maximum2DDiameterRow",
    "MajorAxisLength",
    "MinorAxisLength",
    "LeastAxisLength",
    "Elongation",
    "Flatness",
    "MeshVolume",
];

const FACE_OFFSETS: [(i64, i64, i64); 6] = [
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
];

pub fn shape_features(mask: &MaskVolume, spacing: (f64, f64, f64)) -> Result<[f64; 14]> {
    let coords = mask.foreground_coords();
    if coords.is_empty() {
        return Err(Error::EmptyMask);
    }
    let (nx, ny, nz) = mask.dims();
    let (sx, sy, sz) = spacing;
    let n = coords.len() as f64;
    let voxel_volume = n * sx * sy * sz;

    // exposed faces and the surface voxel subset
    let mut surface_area = 0.0;
    let mut surface: Vec<(f64, f64, f64)> = Vec::new();
    for &(x, y, z) in &coords {
        let mut exposed = false;
        for (dx, dy, dz) in FACE_OFFSETS {
            let (qx, qy, qz) = (x as i64 + dx, y as i64 + dy, z as i64 + dz);
            let outside = qx < 0
                || qy < 0
                || qz < 0
                || qx >= nx as i64
                || qy >= ny as i64
                || qz >= nz as i64
                || !mask.is_fg(qx as usize, qy as usize, qz as usize);
            if outside {
                exposed = true;
                surface_area += match (dx, dy, dz) {
                    (_, 0, 0) => sy * sz,
                    (0, _, 0) => sx * sz,
                    _ => sx * sy,
                };
            }
        }
        if exposed {
            surface.push((x as f64 * sx, y as f64 * sy, z as f64 * sz));
        }
    }

    let sphericity =
        (36.0 * std::f64::consts::PI * voxel_volume * voxel_volume).powf(1.0 / 3.0) / surface_area;

    // diameters: brute-force pairwise over surface voxels, overall and within
    // each fixed-axis slice family
    let dist2 = |a: (f64, f64, f64), b: (f64, f64, f64)| {
        let (dx, dy, dz) = (a.0 - b.0, a.1 - b.1, a.2 - b.2);
        dx * dx + dy * dy + dz * dz
    };
    let mut d3 = 0.0f64;
    let mut d_slice = 0.0f64; // same z
    let mut d_column = 0.0f64; // same y
    let mut d_row = 0.0f64; // same x
    for (a_idx, &pa) in surface.iter().enumerate() {
        for &pb in &surface[a_idx + 1..] {
            let d2 = dist2(pa, pb);
            if d2 > d3 {
                d3 = d2;
            }
            if pa.2 == pb.2 && d2 > d_slice {
                d_slice = d2;
            }
            if pa.1 == pb.1 && d2 > d_column {
                d_column = d2;
            }
            if pa.0 == pb.0 && d2 > d_row {
                d_row = d2;
            }
        }
    }

    // principal axis lengths from the covariance of physical voxel centres
    let mut mean = (0.0, 0.0, 0.0);
    for &(x, y, z) in &coords {
        mean.0 += x as f64 * sx;
        mean.1 += y as f64 * sy;
        mean.2 += z as f64 * sz;
    }
    mean = (mean.0 / n, mean.1 / n, mean.2 / n);
    let mut cov = Mat::zeros(3, 3);
    for &(x, y, z) in &coords {
        let d = [
            x as f64 * sx - mean.0,
            y as f64 * sy - mean.1,
            z as f64 * sz - mean.2,
        ];
        for a in 0..3 {
            for b in 0..3 {
                cov.set(a, b, cov.get(a, b) + d[a] * d[b]);
            }
        }
    }
    for a in 0..3 {
        for b in 0..3 {
            cov.set(a, b, cov.get(a, b) / n);
        }
    }
    let (eig, _) = jacobi_eigh(&cov)?;
    let l1 = eig[0].max(0.0);
    let l2 = eig[1].max(0.0);
    let l3 = eig[2].max(0.0);
    let (elongation, flatness) = if l1 > 0.0 {
        ((l2 / l1).sqrt(), (l3 / l1).sqrt())
    } else {
        (1.0, 1.0) // point-like region: treated as isotropic
    };

    Ok([
        voxel_volume,
        surface_area,
        surface_area / voxel_volume,
        sphericity,
        d3.sqrt(),
        d_slice.sqrt(),
        d_column.sqrt(),
        d_row.sqrt(),
        4.0 * l1.sqrt(),
        4.0 * l2.sqrt(),
        4.0 * l3.sqrt(),
        elongation,
        flatness,
        voxel_volume,
    ])
}
