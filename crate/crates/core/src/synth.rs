//! Deterministic phantom and tabular dataset generators so the whole
//! pipeline can be exercised without clinical data. All randomness flows
//! from the in-crate SplitMix64 generator.

use crate::error::{Error, Result};
use crate::features::FeatureType;
use crate::linalg::Mat;
use crate::rng::SplitMix64;
use crate::table::{ColumnDesc, FeatureTable};
use crate::volume::{MaskVolume, Volume3D};

/// Ellipsoid phantom: white noise box-smoothed with a class-specific radius
/// plus a constant offset, masked by the ellipsoid.
#[derive(Clone, Debug)]
pub struct PhantomSpec {
    pub seed: u64,
    pub class_label: u8,
    pub dims: (usize, usize, usize),
    pub spacing: (f64, f64, f64),
    /// Ellipsoid semi-axes in millimetres.
    pub semi_axes_mm: (f64, f64, f64),
    /// Box-smoothing radius in voxels (0 = raw white noise).
    pub smooth_radius: usize,
    /// Constant intensity offset in HU.
    pub offset_hu: f64,
    /// Standard deviation of the white noise in HU.
    pub noise_sigma: f64,
}

/// Separable box-mean with clamped windows; per-axis normalization by the
/// actual window length makes the three passes an exact cube mean.
fn box_smooth_axis(
    src: &[f64],
    dims: (usize, usize, usize),
    axis: usize,
    radius: usize,
) -> Vec<f64> {
    let (nx, ny, nz) = dims;
    let extent = [nx, ny, nz][axis];
    let stride = [1, nx, nx * ny][axis];
    let mut out = vec![0.0; src.len()];
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let i = x + nx * (y + ny * z);
                let pos = [x, y, z][axis];
                let lo = pos.saturating_sub(radius);
                let hi = (pos + radius).min(extent - 1);
                let base = i - pos * stride;
                let mut acc = 0.0;
                for t in lo..=hi {
                    acc += src[base + t * stride];
                }
                out[i] = acc / (hi - lo + 1) as f64;
            }
        }
    }
    out
}

pub fn gen_phantom(spec: &PhantomSpec) -> Result<(Volume3D, MaskVolume)> {
    let (nx, ny, nz) = spec.dims;
    let (sx, sy, sz) = spec.spacing;
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(Error::InvalidParam {
            name: "dims",
            msg: "dims must be positive".into(),
        });
    }
    if !(spec.noise_sigma >= 0.0) {
        return Err(Error::InvalidParam {
            name: "noise_sigma",
            msg: "must be >= 0".into(),
        });
    }
    let center = (
        (nx as f64 - 1.0) / 2.0 * sx,
        (ny as f64 - 1.0) / 2.0 * sy,
        (nz as f64 - 1.0) / 2.0 * sz,
    );
    let (ax, ay, az) = spec.semi_axes_mm;
    if !(ax > 0.0 && ay > 0.0 && az > 0.0) {
        return Err(Error::InvalidParam {
            name: "semi_axes",
            msg: "must be positive".into(),
        });
    }
    let span = (
        (nx as f64 - 1.0) * sx,
        (ny as f64 - 1.0) * sy,
        (nz as f64 - 1.0) * sz,
    );
    if center.0 - ax < 0.0
        || center.0 + ax > span.0
        || center.1 - ay < 0.0
        || center.1 + ay > span.1
        || center.2 - az < 0.0
        || center.2 + az > span.2
    {
        return Err(Error::InvalidParam {
            name: "semi_axes",
            msg: "ellipsoid exceeds the grid".into(),
        });
    }

    let n = nx * ny * nz;
    let mut rng = SplitMix64::new(spec.seed);
    let mut noise: Vec<f64> = (0..n)
        .map(|_| rng.next_gaussian() * spec.noise_sigma)
        .collect();
    if spec.smooth_radius > 0 {
        for axis in 0..3 {
            noise = box_smooth_axis(&noise, spec.dims, axis, spec.smooth_radius);
        }
    }
    for v in noise.iter_mut() {
        *v += spec.offset_hu;
    }
    let volume = Volume3D::new(spec.dims, spec.spacing, noise)?;

    let mut bits = vec![0u8; n];
    let mut i = 0;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let d = ((x as f64 * sx - center.0) / ax).powi(2)
                    + ((y as f64 * sy - center.1) / ay).powi(2)
                    + ((z as f64 * sz - center.2) / az).powi(2);
                if d <= 1.0 {
                    bits[i] = 1;
                }
                i += 1;
            }
        }
    }
    let mask = MaskVolume::new(spec.dims, bits)?;
    Ok((volume, mask))
}

/// Tabular dataset: standard-normal noise with the first `n_informative`
/// columns shifted by `effect_size` in the positive class.
#[derive(Clone, Debug)]
pub struct TabularSpec {
    pub seed: u64,
    pub n_features: usize,
    pub n_informative: usize,
    pub effect_size: f64,
    pub n_negative: usize,
    pub n_positive: usize,
    /// When set, informative columns carry this tag and noise columns cycle
    /// over the remaining types; otherwise all columns cycle over all types.
    pub informative_type: Option<FeatureType>,
}

pub fn gen_tabular(spec: &TabularSpec) -> Result<FeatureTable> {
    if spec.n_informative > spec.n_features {
        return Err(Error::InvalidParam {
            name: "n_informative",
            msg: "cannot exceed n_features".into(),
        });
    }
    if spec.n_negative < 2 || spec.n_positive < 2 {
        return Err(Error::InvalidParam {
            name: "class_counts",
            msg: "need at least two cases per class".into(),
        });
    }
    let n = spec.n_negative + spec.n_positive;
    let noise_types: Vec<FeatureType> = match spec.informative_type {
        Some(t) => FeatureType::ALL
            .iter()
            .copied()
            .filter(|&x| x != t)
            .collect(),
        None => FeatureType::ALL.to_vec(),
    };
    let columns: Vec<ColumnDesc> = (0..spec.n_features)
        .map(|j| {
            let ftype = if j < spec.n_informative {
                spec.informative_type
                    .unwrap_or(FeatureType::ALL[j % FeatureType::ALL.len()])
            } else {
                noise_types[j % noise_types.len()]
            };
            ColumnDesc {
                name: format!("original_{}_f{j:04}", ftype.tag()),
                image_type: crate::filters::ImageType::Original,
                feature_type: ftype,
            }
        })
        .collect();

    let mut rng = SplitMix64::new(spec.seed);
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut ids = Vec::with_capacity(n);
    for i in 0..n {
        let label = u8::from(i >= spec.n_negative);
        let row: Vec<f64> = (0..spec.n_features)
            .map(|j| {
                let mut v = rng.next_gaussian();
                if j < spec.n_informative && label == 1 {
                    v += spec.effect_size;
                }
                v
            })
            .collect();
        rows.push(row);
        labels.push(Some(label));
        ids.push(format!("case_{i:04}"));
    }
    FeatureTable::new(ids, labels, columns, Mat::from_rows(rows))
}
