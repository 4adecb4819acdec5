//! Fixed-bin-width gray-level discretization of the masked voxels.

use crate::error::{Error, Result};
use crate::volume::{MaskVolume, Volume3D};

/// Masked voxels mapped to integer gray levels `1..=ng` with
/// `level(x) = floor((x - min) / bin_width) + 1`, min taken over the mask.
#[derive(Clone, Debug)]
pub struct DiscretizedVoi {
    pub dims: (usize, usize, usize),
    /// Masked voxel coordinates in scan order (x fastest).
    pub coords: Vec<(usize, usize, usize)>,
    /// Raw intensities, parallel to `coords`.
    pub values: Vec<f64>,
    /// Gray levels, parallel to `coords`.
    pub levels: Vec<u32>,
    /// Full grid of levels; 0 marks background.
    pub grid: Vec<u32>,
    pub ng: usize,
    pub bin_width: f64,
}

impl DiscretizedVoi {
    pub fn n_voxels(&self) -> usize {
        self.coords.len()
    }

    /// Voxel count per level, indexed `level - 1`.
    pub fn level_counts(&self) -> Vec<f64> {
        let mut counts = vec![0.0; self.ng];
        for &l in &self.levels {
            counts[(l - 1) as usize] += 1.0;
        }
        counts
    }
}

pub fn discretize(volume: &Volume3D, mask: &MaskVolume, bin_width: f64) -> Result<DiscretizedVoi> {
    if volume.dims() != mask.dims() {
        return Err(Error::DimsMismatch {
            expected: volume.dims(),
            got: mask.dims(),
        });
    }
    if !(bin_width > 0.0) {
        return Err(Error::InvalidParam {
            name: "bin_width",
            msg: format!("must be > 0, got {bin_width}"),
        });
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let (nx, ny, nz) = volume.dims();
    let mut min = f64::INFINITY;
    for (v, &f) in volume.voxels().iter().zip(mask.voxels()) {
        if f == 1 && *v < min {
            min = *v;
        }
    }
    let mut coords = Vec::new();
    let mut values = Vec::new();
    let mut levels = Vec::new();
    let mut grid = vec![0u32; nx * ny * nz];
    let mut ng = 1u32;
    let mut i = 0;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                if mask.voxels()[i] == 1 {
                    let v = volume.voxels()[i];
                    let level = ((v - min) / bin_width).floor() as u32 + 1;
                    ng = ng.max(level);
                    grid[i] = level;
                    coords.push((x, y, z));
                    values.push(v);
                    levels.push(level);
                }
                i += 1;
            }
        }
    }
    Ok(DiscretizedVoi {
        dims: volume.dims(),
        coords,
        values,
        levels,
        grid,
        ng: ng as usize,
        bin_width,
    })
}
