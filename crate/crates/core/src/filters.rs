//! Derived image types: range-rescaled scalar transforms, gradient
//! magnitude, a simplified LBP3D operator, and a single-level undecimated
//! Haar wavelet with periodic boundaries (eight sub-bands).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{MaskVolume, Volume3D};

/// Tag for every image a feature can be computed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ImageType {
    Original,
    Exponential,
    Gradient,
    Lbp3dM1,
    Lbp3dM2,
    Lbp3dK,
    Logarithm,
    Square,
    SquareRoot,
    WaveletLll,
    WaveletLlh,
    WaveletLhl,
    WaveletLhh,
    WaveletHll,
    WaveletHlh,
    WaveletHhl,
    WaveletHhh,
}

impl ImageType {
    /// All image types in canonical output order (original first).
    pub const ALL: [ImageType; 17] = [
        ImageType::Original,
        ImageType::Exponential,
        ImageType::Gradient,
        ImageType::Lbp3dM1,
        ImageType::Lbp3dM2,
        ImageType::Lbp3dK,
        ImageType::Logarithm,
        ImageType::Square,
        ImageType::SquareRoot,
        ImageType::WaveletLll,
        ImageType::WaveletLlh,
        ImageType::WaveletLhl,
        ImageType::WaveletLhh,
        ImageType::WaveletHll,
        ImageType::WaveletHlh,
        ImageType::WaveletHhl,
        ImageType::WaveletHhh,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ImageType::Original => "original",
            ImageType::Exponential => "exponential",
            ImageType::Gradient => "gradient",
            ImageType::Lbp3dM1 => "lbp3d-m1",
            ImageType::Lbp3dM2 => "lbp3d-m2",
            ImageType::Lbp3dK => "lbp3d-k",
            ImageType::Logarithm => "logarithm",
            ImageType::Square => "square",
            ImageType::SquareRoot => "squareroot",
            ImageType::WaveletLll => "wavelet-LLL",
            ImageType::WaveletLlh => "wavelet-LLH",
            ImageType::WaveletLhl => "wavelet-LHL",
            ImageType::WaveletLhh => "wavelet-LHH",
            ImageType::WaveletHll => "wavelet-HLL",
            ImageType::WaveletHlh => "wavelet-HLH",
            ImageType::WaveletHhl => "wavelet-HHL",
            ImageType::WaveletHhh => "wavelet-HHH",
        }
    }

    pub fn parse(tag: &str) -> Result<ImageType> {
        ImageType::ALL
            .iter()
            .copied()
            .find(|t| t.tag() == tag)
            .ok_or_else(|| Error::UnknownTag {
                tag: tag.to_string(),
            })
    }
}

/// A filtered copy of a source volume; dims and spacing always match.
#[derive(Clone, Debug)]
pub struct DerivedImage {
    pub image_type: ImageType,
    pub volume: Volume3D,
}

/// The four range-rescaled scalar filters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarFilter {
    Exponential,
    Logarithm,
    Square,
    SquareRoot,
}

impl ScalarFilter {
    fn image_type(self) -> ImageType {
        match self {
            ScalarFilter::Exponential => ImageType::Exponential,
            ScalarFilter::Logarithm => ImageType::Logarithm,
            ScalarFilter::Square => ImageType::Square,
            ScalarFilter::SquareRoot => ImageType::SquareRoot,
        }
    }
}

/// Voxelwise scalar transform rescaled by the masked absolute maximum `M`:
/// square `x^2/M`, square root `sign(x)*sqrt(|x|*M)`, logarithm
/// `sign(x)*M*ln(1+|x|)/ln(1+M)`, exponential `exp(x*ln(M)/M)`. Degenerate
/// maxima (`M = 0`, and `M = 1` for exponential/logarithm) pass the input
/// through unchanged.
pub fn intensity_transform(
    volume: &Volume3D,
    mask: &MaskVolume,
    kind: ScalarFilter,
) -> Result<DerivedImage> {
    if volume.dims() != mask.dims() {
        return Err(Error::DimsMismatch {
            expected: volume.dims(),
            got: mask.dims(),
        });
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    let m = volume
        .voxels()
        .iter()
        .zip(mask.voxels())
        .filter(|(_, &f)| f == 1)
        .map(|(v, _)| v.abs())
        .fold(0.0f64, f64::max);

    let identity = m == 0.0
        || (m == 1.0 && matches!(kind, ScalarFilter::Exponential | ScalarFilter::Logarithm));
    let voxels: Vec<f64> = if identity {
        volume.voxels().to_vec()
    } else {
        match kind {
            ScalarFilter::Square => volume.voxels().iter().map(|&x| x * x / m).collect(),
            ScalarFilter::SquareRoot => volume
                .voxels()
                .iter()
                .map(|&x| x.signum() * (x.abs() * m).sqrt())
                .collect(),
            ScalarFilter::Logarithm => {
                let denom = (1.0 + m).ln();
                volume
                    .voxels()
                    .iter()
                    .map(|&x| x.signum() * m * (1.0 + x.abs()).ln() / denom)
                    .collect()
            }
            ScalarFilter::Exponential => {
                let c = m.ln() / m;
                volume.voxels().iter().map(|&x| (x * c).exp()).collect()
            }
        }
    };
    Ok(DerivedImage {
        image_type: kind.image_type(),
        volume: Volume3D::new(volume.dims(), volume.spacing(), voxels)?,
    })
}

/// Euclidean norm of the spatial gradient: central differences in the
/// interior, one-sided at the boundaries, each component divided by the axis
/// spacing. Axes of extent 1 contribute zero.
pub fn gradient_magnitude(volume: &Volume3D) -> DerivedImage {
    let (nx, ny, nz) = volume.dims();
    let (sx, sy, sz) = volume.spacing();
    let mut out = vec![0.0; nx * ny * nz];
    let diff = |lo: f64, hi: f64, step: f64| (hi - lo) / step;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let gx = if nx > 1 {
                    if x == 0 {
                        diff(volume.at(0, y, z), volume.at(1, y, z), sx)
                    } else if x == nx - 1 {
                        diff(volume.at(nx - 2, y, z), volume.at(nx - 1, y, z), sx)
                    } else {
                        diff(volume.at(x - 1, y, z), volume.at(x + 1, y, z), 2.0 * sx)
                    }
                } else {
                    0.0
                };
                let gy = if ny > 1 {
                    if y == 0 {
                        diff(volume.at(x, 0, z), volume.at(x, 1, z), sy)
                    } else if y == ny - 1 {
                        diff(volume.at(x, ny - 2, z), volume.at(x, ny - 1, z), sy)
                    } else {
                        diff(volume.at(x, y - 1, z), volume.at(x, y + 1, z), 2.0 * sy)
                    }
                } else {
                    0.0
                };
                let gz = if nz > 1 {
                    if z == 0 {
                        diff(volume.at(x, y, 0), volume.at(x, y, 1), sz)
                    } else if z == nz - 1 {
                        diff(volume.at(x, y, nz - 2), volume.at(x, y, nz - 1), sz)
                    } else {
                        diff(volume.at(x, y, z - 1), volume.at(x, y, z + 1), 2.0 * sz)
                    }
                } else {
                    0.0
                };
                out[volume.index(x, y, z)] = (gx * gx + gy * gy + gz * gz).sqrt();
            }
        }
    }
    DerivedImage {
        image_type: ImageType::Gradient,
        volume: Volume3D::new(volume.dims(), volume.spacing(), out)
            .expect("gradient preserves invariants"),
    }
}

/// One separable Haar stage along `axis` with periodic wrap: low taps
/// (1,1)/sqrt(2), high taps (1,-1)/sqrt(2), applied to the pair (i, i+1).
fn haar_pass(src: &[f64], dims: (usize, usize, usize), axis: usize, high: bool) -> Vec<f64> {
    let (nx, ny, nz) = dims;
    let strides = [1usize, nx, nx * ny];
    let extent = [nx, ny, nz][axis];
    let stride = strides[axis];
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = vec![0.0; src.len()];
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let i = x + nx * (y + ny * z);
                let pos = [x, y, z][axis];
                let j = if pos + 1 == extent {
                    i + stride - extent * stride // wrap to the line start
                } else {
                    i + stride
                };
                out[i] = if high {
                    (src[i] - src[j]) * inv_sqrt2
                } else {
                    (src[i] + src[j]) * inv_sqrt2
                };
            }
        }
    }
    out
}

/// Single-level undecimated Haar decomposition. Sub-band letters name the
/// filter per axis in (x, y, z) order; output order LLL..HHH with the z
/// letter varying fastest.
pub fn wavelet_decompose(volume: &Volume3D) -> Vec<DerivedImage> {
    let dims = volume.dims();
    let bands = [
        ImageType::WaveletLll,
        ImageType::WaveletLlh,
        ImageType::WaveletLhl,
        ImageType::WaveletLhh,
        ImageType::WaveletHll,
        ImageType::WaveletHlh,
        ImageType::WaveletHhl,
        ImageType::WaveletHhh,
    ];
    let lx = haar_pass(volume.voxels(), dims, 0, false);
    let hx = haar_pass(volume.voxels(), dims, 0, true);
    let mut out = Vec::with_capacity(8);
    for (xi, xdata) in [(0usize, &lx), (1, &hx)] {
        let ly = haar_pass(xdata, dims, 1, false);
        let hy = haar_pass(xdata, dims, 1, true);
        for (yi, ydata) in [(0usize, &ly), (1, &hy)] {
            for (zi, high_z) in [(0usize, false), (1, true)] {
                let data = haar_pass(ydata, dims, 2, high_z);
                let band = bands[xi * 4 + yi * 2 + zi];
                out.push(DerivedImage {
                    image_type: band,
                    volume: Volume3D::new(dims, volume.spacing(), data)
                        .expect("wavelet preserves invariants"),
                });
            }
        }
    }
    out
}

fn chebyshev_shell(radius: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for dz in -radius..=radius {
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                if dx.abs().max(dy.abs()).max(dz.abs()) == radius {
                    out.push((dx, dy, dz));
                }
            }
        }
    }
    out
}

/// Simplified rotation-invariant LBP3D. `m1` counts radius-1 Chebyshev-shell
/// neighbours (edge-clamped) whose value is `>=` the centre, `m2` the same
/// over the radius-2 shell (98 offsets), and `k` is the excess kurtosis of
/// the closed radius-1 neighbourhood (27 values), 0 when its variance is 0.
pub fn lbp3d(volume: &Volume3D) -> Vec<DerivedImage> {
    let (nx, ny, nz) = volume.dims();
    let shell1 = chebyshev_shell(1);
    let shell2 = chebyshev_shell(2);
    debug_assert_eq!(shell1.len(), 26);
    debug_assert_eq!(shell2.len(), 98);

    let clamp = |v: i64, n: usize| v.clamp(0, n as i64 - 1) as usize;
    let n_vox = nx * ny * nz;
    let mut m1 = vec![0.0; n_vox];
    let mut m2 = vec![0.0; n_vox];
    let mut k = vec![0.0; n_vox];
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let i = volume.index(x, y, z);
                let center = volume.voxels()[i];
                let mut count1 = 0usize;
                for &(dx, dy, dz) in &shell1 {
                    let q = volume.at(
                        clamp(x as i64 + dx, nx),
                        clamp(y as i64 + dy, ny),
                        clamp(z as i64 + dz, nz),
                    );
                    if q >= center {
                        count1 += 1;
                    }
                }
                let mut count2 = 0usize;
                for &(dx, dy, dz) in &shell2 {
                    let q = volume.at(
                        clamp(x as i64 + dx, nx),
                        clamp(y as i64 + dy, ny),
                        clamp(z as i64 + dz, nz),
                    );
                    if q >= center {
                        count2 += 1;
                    }
                }
                // closed neighbourhood kurtosis
                let mut vals = [0.0f64; 27];
                let mut idx = 0;
                for dz in -1i64..=1 {
                    for dy in -1i64..=1 {
                        for dx in -1i64..=1 {
                            vals[idx] = volume.at(
                                clamp(x as i64 + dx, nx),
                                clamp(y as i64 + dy, ny),
                                clamp(z as i64 + dz, nz),
                            );
                            idx += 1;
                        }
                    }
                }
                let mu = vals.iter().sum::<f64>() / 27.0;
                let m2c = vals.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / 27.0;
                let m4c = vals.iter().map(|v| (v - mu).powi(4)).sum::<f64>() / 27.0;
                m1[i] = count1 as f64;
                m2[i] = count2 as f64;
                k[i] = if m2c > 0.0 {
                    m4c / (m2c * m2c) - 3.0
                } else {
                    0.0
                };
            }
        }
    }
    let mk = |tag, data| DerivedImage {
        image_type: tag,
        volume: Volume3D::new(volume.dims(), volume.spacing(), data)
            .expect("lbp preserves invariants"),
    };
    vec![
        mk(ImageType::Lbp3dM1, m1),
        mk(ImageType::Lbp3dM2, m2),
        mk(ImageType::Lbp3dK, k),
    ]
}

/// All 16 derived images in canonical order (everything except `original`).
pub fn derive_all(volume: &Volume3D, mask: &MaskVolume) -> Result<Vec<DerivedImage>> {
    let mut out = Vec::with_capacity(16);
    out.push(intensity_transform(
        volume,
        mask,
        ScalarFilter::Exponential,
    )?);
    out.push(gradient_magnitude(volume));
    out.extend(lbp3d(volume));
    out.push(intensity_transform(volume, mask, ScalarFilter::Logarithm)?);
    out.push(intensity_transform(volume, mask, ScalarFilter::Square)?);
    out.push(intensity_transform(volume, mask, ScalarFilter::SquareRoot)?);
    out.extend(wavelet_decompose(volume));
    debug_assert_eq!(out.len(), 16);
    Ok(out)
}
