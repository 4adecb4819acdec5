//! 3D volumes and binary masks, plus the paired header/raw on-disk format.
//!
//! A volume on disk is two files: `<name>.hdr`, a plain-text header with one
//! `key: value` line per field (`dims`, `spacing`, `dtype`, `byteorder`,
//! order-free), and `<name>.raw`, the little-endian row-major payload with x
//! varying fastest. Voxels are held internally as `f64` regardless of the
//! stored scalar type.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// A 3D scalar grid with physical voxel spacing in millimetres.
#[derive(Clone, Debug, PartialEq)]
pub struct Volume3D {
    dims: (usize, usize, usize),
    spacing: (f64, f64, f64),
    voxels: Vec<f64>,
}

impl Volume3D {
    pub fn new(
        dims: (usize, usize, usize),
        spacing: (f64, f64, f64),
        voxels: Vec<f64>,
    ) -> Result<Self> {
        let (nx, ny, nz) = dims;
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidParam {
                name: "dims",
                msg: format!("all dims must be positive, got {dims:?}"),
            });
        }
        if !(spacing.0 > 0.0 && spacing.1 > 0.0 && spacing.2 > 0.0) {
            return Err(Error::InvalidParam {
                name: "spacing",
                msg: format!("all spacings must be > 0, got {spacing:?}"),
            });
        }
        if voxels.len() != nx * ny * nz {
            return Err(Error::ShapeMismatch {
                expected: nx * ny * nz,
                got: voxels.len(),
            });
        }
        if let Some(index) = voxels.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteVoxel { index });
        }
        Ok(Volume3D {
            dims,
            spacing,
            voxels,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn spacing(&self) -> (f64, f64, f64) {
        self.spacing
    }

    pub fn voxels(&self) -> &[f64] {
        &self.voxels
    }

    /// Physical volume of one voxel in mm^3.
    pub fn voxel_volume(&self) -> f64 {
        self.spacing.0 * self.spacing.1 * self.spacing.2
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims.0 * (y + self.dims.1 * z)
    }

    #[inline]
    pub fn at(&self, x: usize, y: usize, z: usize) -> f64 {
        self.voxels[self.index(x, y, z)]
    }
}

/// Binary region-of-interest aligned to a [`Volume3D`].
#[derive(Clone, Debug, PartialEq)]
pub struct MaskVolume {
    dims: (usize, usize, usize),
    voxels: Vec<u8>,
}

impl MaskVolume {
    pub fn new(dims: (usize, usize, usize), voxels: Vec<u8>) -> Result<Self> {
        let (nx, ny, nz) = dims;
        if voxels.len() != nx * ny * nz {
            return Err(Error::ShapeMismatch {
                expected: nx * ny * nz,
                got: voxels.len(),
            });
        }
        if let Some(&bad) = voxels.iter().find(|&&v| v > 1) {
            return Err(Error::MaskValue { value: bad as f64 });
        }
        Ok(MaskVolume { dims, voxels })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn voxels(&self) -> &[u8] {
        &self.voxels
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims.0 * (y + self.dims.1 * z)
    }

    #[inline]
    pub fn is_fg(&self, x: usize, y: usize, z: usize) -> bool {
        self.voxels[self.index(x, y, z)] == 1
    }

    pub fn foreground_count(&self) -> usize {
        self.voxels.iter().filter(|&&v| v == 1).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.voxels.contains(&1)
    }

    /// Foreground voxel coordinates in scan order (x fastest).
    pub fn foreground_coords(&self) -> Vec<(usize, usize, usize)> {
        let (nx, ny, nz) = self.dims;
        let mut out = Vec::new();
        let mut i = 0;
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    if self.voxels[i] == 1 {
                        out.push((x, y, z));
                    }
                    i += 1;
                }
            }
        }
        out
    }
}

/// Scalar types the on-disk format supports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dtype {
    F32,
    I16,
    U8,
}

impl Dtype {
    fn parse(s: &str) -> Option<Dtype> {
        match s {
            "f32" => Some(Dtype::F32),
            "i16" => Some(Dtype::I16),
            "u8" => Some(Dtype::U8),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Dtype::F32 => "f32",
            Dtype::I16 => "i16",
            Dtype::U8 => "u8",
        }
    }

    fn width(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::I16 => 2,
            Dtype::U8 => 1,
        }
    }
}

struct Header {
    dims: (usize, usize, usize),
    spacing: (f64, f64, f64),
    dtype: Dtype,
}

fn header_err(path: &Path, msg: impl Into<String>) -> Error {
    Error::Header {
        path: path.to_path_buf(),
        msg: msg.into(),
    }
}

fn parse_header(path: &Path, text: &str) -> Result<Header> {
    let mut dims = None;
    let mut spacing = None;
    let mut dtype = None;
    let mut byteorder = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, rest) = line
            .split_once(':')
            .ok_or_else(|| header_err(path, format!("missing `:` in line `{line}`")))?;
        let fields: Vec<&str> = rest.split_whitespace().collect();
        match key.trim() {
            "dims" => {
                if fields.len() != 3 {
                    return Err(header_err(path, "dims needs three values"));
                }
                let v: Vec<usize> = fields
                    .iter()
                    .map(|f| f.parse())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| header_err(path, "dims must be positive integers"))?;
                dims = Some((v[0], v[1], v[2]));
            }
            "spacing" => {
                if fields.len() != 3 {
                    return Err(header_err(path, "spacing needs three values"));
                }
                let v: Vec<f64> = fields
                    .iter()
                    .map(|f| f.parse())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| header_err(path, "spacing must be numeric"))?;
                spacing = Some((v[0], v[1], v[2]));
            }
            "dtype" => {
                let d = fields.first().and_then(|f| Dtype::parse(f));
                dtype = Some(d.ok_or_else(|| header_err(path, "dtype must be f32|i16|u8"))?);
            }
            "byteorder" => {
                if fields != ["little"] {
                    return Err(header_err(path, "byteorder must be `little`"));
                }
                byteorder = Some(());
            }
            other => return Err(header_err(path, format!("unknown key `{other}`"))),
        }
    }
    let dims = dims.ok_or_else(|| header_err(path, "missing dims"))?;
    let spacing = spacing.ok_or_else(|| header_err(path, "missing spacing"))?;
    let dtype = dtype.ok_or_else(|| header_err(path, "missing dtype"))?;
    byteorder.ok_or_else(|| header_err(path, "missing byteorder"))?;
    Ok(Header {
        dims,
        spacing,
        dtype,
    })
}

fn raw_path(header_path: &Path) -> PathBuf {
    header_path.with_extension("raw")
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_payload(header_path: &Path) -> Result<(Header, Vec<f64>)> {
    let text = fs::read_to_string(header_path).map_err(io_err(header_path))?;
    let header = parse_header(header_path, &text)?;
    let (nx, ny, nz) = header.dims;
    if nx == 0 || ny == 0 || nz == 0 {
        return Err(header_err(header_path, "dims must be positive"));
    }
    let raw = raw_path(header_path);
    let bytes = fs::read(&raw).map_err(io_err(&raw))?;
    let n = nx * ny * nz;
    let expected = (n * header.dtype.width()) as u64;
    if bytes.len() as u64 != expected {
        return Err(Error::PayloadLength {
            path: raw,
            expected,
            got: bytes.len() as u64,
        });
    }
    let voxels: Vec<f64> = match header.dtype {
        Dtype::F32 => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect(),
        Dtype::I16 => bytes
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as f64)
            .collect(),
        Dtype::U8 => bytes.iter().map(|&b| b as f64).collect(),
    };
    Ok((header, voxels))
}

/// Load a volume from its `.hdr` path (the `.raw` payload sits alongside).
pub fn load_volume(header_path: &Path) -> Result<Volume3D> {
    let (header, voxels) = load_payload(header_path)?;
    Volume3D::new(header.dims, header.spacing, voxels)
}

/// Load a binary mask and validate it against its reference volume.
pub fn load_mask(header_path: &Path, reference: &Volume3D) -> Result<MaskVolume> {
    let (header, voxels) = load_payload(header_path)?;
    if header.dims != reference.dims() {
        return Err(Error::DimsMismatch {
            expected: reference.dims(),
            got: header.dims,
        });
    }
    let mut bits = Vec::with_capacity(voxels.len());
    for v in voxels {
        if v == 0.0 {
            bits.push(0);
        } else if v == 1.0 {
            bits.push(1);
        } else {
            return Err(Error::MaskValue { value: v });
        }
    }
    MaskVolume::new(header.dims, bits)
}

fn write_header(
    path: &Path,
    dims: (usize, usize, usize),
    spacing: (f64, f64, f64),
    dtype: Dtype,
) -> Result<()> {
    let text = format!(
        "dims: {} {} {}\nspacing: {} {} {}\ndtype: {}\nbyteorder: little\n",
        dims.0,
        dims.1,
        dims.2,
        spacing.0,
        spacing.1,
        spacing.2,
        dtype.name()
    );
    fs::write(path, text).map_err(io_err(path))
}

/// Write a volume as a header/raw pair. `f64` voxels are narrowed to the
/// requested scalar type; `i16`/`u8` require exactly representable values.
pub fn save_volume(header_path: &Path, volume: &Volume3D, dtype: Dtype) -> Result<()> {
    let raw = raw_path(header_path);
    let mut bytes = Vec::with_capacity(volume.voxels().len() * dtype.width());
    match dtype {
        Dtype::F32 => {
            for &v in volume.voxels() {
                bytes.extend_from_slice(&(v as f32).to_le_bytes());
            }
        }
        Dtype::I16 => {
            for &v in volume.voxels() {
                let r = v.round();
                if r < i16::MIN as f64 || r > i16::MAX as f64 {
                    return Err(Error::InvalidParam {
                        name: "dtype",
                        msg: format!("value {v} does not fit i16"),
                    });
                }
                bytes.extend_from_slice(&(r as i16).to_le_bytes());
            }
        }
        Dtype::U8 => {
            for &v in volume.voxels() {
                let r = v.round();
                if !(0.0..=255.0).contains(&r) {
                    return Err(Error::InvalidParam {
                        name: "dtype",
                        msg: format!("value {v} does not fit u8"),
                    });
                }
                bytes.push(r as u8);
            }
        }
    }
    write_header(header_path, volume.dims(), volume.spacing(), dtype)?;
    fs::write(&raw, bytes).map_err(io_err(&raw))
}

/// Write a mask as a `u8` header/raw pair using the paired volume's spacing.
pub fn save_mask(header_path: &Path, mask: &MaskVolume, spacing: (f64, f64, f64)) -> Result<()> {
    write_header(header_path, mask.dims(), spacing, Dtype::U8)?;
    let raw = raw_path(header_path);
    fs::write(&raw, mask.voxels()).map_err(io_err(&raw))
}

/// Axis-aligned inclusive index box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundingBox {
    pub min: (usize, usize, usize),
    pub max: (usize, usize, usize),
}

impl BoundingBox {
    pub fn extents(&self) -> (usize, usize, usize) {
        (
            self.max.0 - self.min.0 + 1,
            self.max.1 - self.min.1 + 1,
            self.max.2 - self.min.2 + 1,
        )
    }

    pub fn contains(&self, p: (usize, usize, usize)) -> bool {
        p.0 >= self.min.0
            && p.0 <= self.max.0
            && p.1 >= self.min.1
            && p.1 <= self.max.1
            && p.2 >= self.min.2
            && p.2 <= self.max.2
    }
}

/// Tightest box containing all foreground, expanded by `margin` voxels and
/// clamped to the grid.
pub fn bounding_box(mask: &MaskVolume, margin: usize) -> Result<BoundingBox> {
    let (nx, ny, nz) = mask.dims();
    let mut min = (usize::MAX, usize::MAX, usize::MAX);
    let mut max = (0usize, 0usize, 0usize);
    let mut any = false;
    let mut i = 0;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                if mask.voxels()[i] == 1 {
                    any = true;
                    min = (min.0.min(x), min.1.min(y), min.2.min(z));
                    max = (max.0.max(x), max.1.max(y), max.2.max(z));
                }
                i += 1;
            }
        }
    }
    if !any {
        return Err(Error::EmptyMask);
    }
    Ok(BoundingBox {
        min: (
            min.0.saturating_sub(margin),
            min.1.saturating_sub(margin),
            min.2.saturating_sub(margin),
        ),
        max: (
            (max.0 + margin).min(nx - 1),
            (max.1 + margin).min(ny - 1),
            (max.2 + margin).min(nz - 1),
        ),
    })
}

pub fn crop_volume(volume: &Volume3D, bb: &BoundingBox) -> Volume3D {
    let (ex, ey, ez) = bb.extents();
    let mut voxels = Vec::with_capacity(ex * ey * ez);
    for z in bb.min.2..=bb.max.2 {
        for y in bb.min.1..=bb.max.1 {
            for x in bb.min.0..=bb.max.0 {
                voxels.push(volume.at(x, y, z));
            }
        }
    }
    Volume3D::new((ex, ey, ez), volume.spacing(), voxels).expect("crop preserves invariants")
}

pub fn crop_mask(mask: &MaskVolume, bb: &BoundingBox) -> MaskVolume {
    let (ex, ey, ez) = bb.extents();
    let mut voxels = Vec::with_capacity(ex * ey * ez);
    for z in bb.min.2..=bb.max.2 {
        for y in bb.min.1..=bb.max.1 {
            for x in bb.min.0..=bb.max.0 {
                voxels.push(mask.voxels()[mask.index(x, y, z)]);
            }
        }
    }
    MaskVolume::new((ex, ey, ez), voxels).expect("crop preserves invariants")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn tmpdir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("voimark-vol-{tag}-{}", std::process::id()));
        fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn single_voxel_identity() {
        let d = tmpdir("single");
        let p = d.join("one.hdr");
        fs::write(
            &p,
            "dims: 1 1 1\nspacing: 1 1 1\ndtype: f32\nbyteorder: little\n",
        )
        .unwrap();
        fs::write(d.join("one.raw"), 5.0f32.to_le_bytes()).unwrap();
        let v = load_volume(&p).unwrap();
        assert_eq!(v.dims(), (1, 1, 1));
        assert_eq!(v.voxels(), &[5.0]);
    }

    #[test]
    fn round_trip_is_bit_exact_for_f32_data() {
        let d = tmpdir("roundtrip");
        let mut rng = SplitMix64::new(9);
        let voxels: Vec<f64> = (0..24)
            .map(|_| (rng.next_f64() as f32 * 100.0) as f64)
            .collect();
        let v = Volume3D::new((4, 3, 2), (0.5, 1.0, 1.25), voxels).unwrap();
        let p = d.join("rt.hdr");
        save_volume(&p, &v, Dtype::F32).unwrap();
        let back = load_volume(&p).unwrap();
        assert_eq!(back.spacing(), v.spacing());
        assert_eq!(back.voxels(), v.voxels());
    }

    #[test]
    fn payload_length_mismatch_is_rejected() {
        let d = tmpdir("paylen");
        let p = d.join("bad.hdr");
        fs::write(
            &p,
            "dims: 2 2 2\nspacing: 1 1 1\ndtype: u8\nbyteorder: little\n",
        )
        .unwrap();
        fs::write(d.join("bad.raw"), [1u8; 7]).unwrap();
        match load_volume(&p) {
            Err(Error::PayloadLength { expected, got, .. }) => {
                assert_eq!(expected, 8);
                assert_eq!(got, 7);
            }
            other => panic!("expected payload error, got {other:?}"),
        }
    }

    #[test]
    fn missing_file_is_io_error() {
        let d = tmpdir("missing");
        assert!(matches!(
            load_volume(&d.join("nope.hdr")),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn mask_checks_dims_and_domain() {
        let d = tmpdir("mask");
        let vol = Volume3D::new((2, 2, 2), (1.0, 1.0, 1.0), vec![0.0; 8]).unwrap();
        let p = d.join("m.hdr");
        fs::write(
            &p,
            "dims: 2 2 2\nspacing: 1 1 1\ndtype: u8\nbyteorder: little\n",
        )
        .unwrap();
        fs::write(d.join("m.raw"), [1u8; 8]).unwrap();
        let m = load_mask(&p, &vol).unwrap();
        assert_eq!(m.foreground_count(), 8);

        let big = Volume3D::new((3, 3, 3), (1.0, 1.0, 1.0), vec![0.0; 27]).unwrap();
        assert!(matches!(
            load_mask(&p, &big),
            Err(Error::DimsMismatch { .. })
        ));

        fs::write(d.join("m.raw"), [2u8; 8]).unwrap();
        assert!(matches!(load_mask(&p, &vol), Err(Error::MaskValue { .. })));
    }

    #[test]
    fn bounding_box_single_voxel_and_margin() {
        let mut vox = vec![0u8; 125];
        vox[1 + 5 * (2 + 5 * 3)] = 1; // (1,2,3) in a 5^3 grid
        let m = MaskVolume::new((5, 5, 5), vox).unwrap();
        let bb0 = bounding_box(&m, 0).unwrap();
        assert_eq!(bb0.min, (1, 2, 3));
        assert_eq!(bb0.max, (1, 2, 3));
        let bb1 = bounding_box(&m, 1).unwrap();
        assert_eq!(bb1.min, (0, 1, 2));
        assert_eq!(bb1.max, (2, 3, 4));
    }

    #[test]
    fn bounding_box_two_corners_spans_grid() {
        let mut vox = vec![0u8; 64];
        vox[0] = 1;
        vox[63] = 1;
        let m = MaskVolume::new((4, 4, 4), vox).unwrap();
        // oracle: enumerate foreground coordinates
        let coords = m.foreground_coords();
        let minx = coords.iter().map(|c| c.0).min().unwrap();
        let maxx = coords.iter().map(|c| c.0).max().unwrap();
        let bb = bounding_box(&m, 0).unwrap();
        assert_eq!(bb.min.0, minx);
        assert_eq!(bb.max.0, maxx);
        assert_eq!(bb.min, (0, 0, 0));
        assert_eq!(bb.max, (3, 3, 3));
    }

    #[test]
    fn bounding_box_tight_on_random_masks() {
        let mut rng = SplitMix64::new(77);
        for _ in 0..50 {
            let nx = 1 + rng.next_below(8) as usize;
            let ny = 1 + rng.next_below(8) as usize;
            let nz = 1 + rng.next_below(8) as usize;
            let vox: Vec<u8> = (0..nx * ny * nz)
                .map(|_| (rng.next_f64() < 0.2) as u8)
                .collect();
            let m = match MaskVolume::new((nx, ny, nz), vox) {
                Ok(m) if !m.is_empty() => m,
                _ => continue,
            };
            let bb = bounding_box(&m, 0).unwrap();
            let coords = m.foreground_coords();
            for &c in &coords {
                assert!(bb.contains(c));
            }
            // tightness: every face of the box touches some foreground voxel
            assert!(coords.iter().any(|c| c.0 == bb.min.0));
            assert!(coords.iter().any(|c| c.0 == bb.max.0));
            assert!(coords.iter().any(|c| c.1 == bb.min.1));
            assert!(coords.iter().any(|c| c.1 == bb.max.1));
            assert!(coords.iter().any(|c| c.2 == bb.min.2));
            assert!(coords.iter().any(|c| c.2 == bb.max.2));
        }
    }

    #[test]
    fn empty_mask_has_no_box() {
        let m = MaskVolume::new((2, 2, 2), vec![0; 8]).unwrap();
        assert!(matches!(bounding_box(&m, 0), Err(Error::EmptyMask)));
    }

    proptest::proptest! {
        #[test]
        fn bounding_box_is_tight_and_complete(
            nx in 1usize..7,
            ny in 1usize..7,
            nz in 1usize..7,
            margin in 0usize..3,
            seed in 0u64..u64::MAX,
        ) {
            let mut rng = SplitMix64::new(seed);
            let mut vox: Vec<u8> = (0..nx * ny * nz)
                .map(|_| (rng.next_f64() < 0.3) as u8)
                .collect();
            let pin = rng.next_below((nx * ny * nz) as u64) as usize;
            vox[pin] = 1;
            let m = MaskVolume::new((nx, ny, nz), vox).unwrap();
            let bb = bounding_box(&m, margin).unwrap();
            let coords = m.foreground_coords();
            for &c in &coords {
                proptest::prop_assert!(bb.contains(c));
            }
            if margin == 0 {
                proptest::prop_assert!(coords.iter().any(|c| c.0 == bb.min.0));
                proptest::prop_assert!(coords.iter().any(|c| c.0 == bb.max.0));
                proptest::prop_assert!(coords.iter().any(|c| c.1 == bb.min.1));
                proptest::prop_assert!(coords.iter().any(|c| c.1 == bb.max.1));
                proptest::prop_assert!(coords.iter().any(|c| c.2 == bb.min.2));
                proptest::prop_assert!(coords.iter().any(|c| c.2 == bb.max.2));
            }
        }
    }

    #[test]
    fn crop_extracts_the_box() {
        let voxels: Vec<f64> = (0..27).map(|i| i as f64).collect();
        let v = Volume3D::new((3, 3, 3), (1.0, 1.0, 1.0), voxels).unwrap();
        let bb = BoundingBox {
            min: (1, 1, 1),
            max: (2, 2, 2),
        };
        let c = crop_volume(&v, &bb);
        assert_eq!(c.dims(), (2, 2, 2));
        assert_eq!(c.at(0, 0, 0), v.at(1, 1, 1));
        assert_eq!(c.at(1, 1, 1), v.at(2, 2, 2));
    }
}
