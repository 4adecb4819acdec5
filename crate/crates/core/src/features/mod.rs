//! Per-case radiomic feature extraction: 14 shape features from the mask
//! plus, for the original image and each of the 16 derived images, 18
//! first-order and 75 texture features — 1595 raw values in a canonical
//! order (image type major, feature type minor, fixed name order).

pub mod discretize;
pub mod first_order;
pub mod shape;
pub mod texture;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::{derive_all, ImageType};
use crate::volume::{bounding_box, crop_mask, crop_volume, MaskVolume, Volume3D};

pub use discretize::{discretize, DiscretizedVoi};
pub use first_order::{first_order_features, FIRST_ORDER_NAMES};
pub use shape::{shape_features, SHAPE_NAMES};
pub use texture::{
    build_texture_matrices, texture_features, TextureFeatures, TextureMatrices, GLCM_NAMES,
    GLDM_NAMES, GLRLM_NAMES, GLSZM_NAMES, NGTDM_NAMES,
};

/// Raw feature vector length: 14 shape + 17 images x 93.
pub const RAW_FEATURE_COUNT: usize = 1595;

/// Filters only need local context; feature extraction crops to the VOI
/// bounding box expanded by this margin.
pub const VOI_MARGIN: usize = 3;

/// Feature family tags.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureType {
    Shape,
    FirstOrder,
    Glcm,
    Gldm,
    Glrlm,
    Glszm,
    Ngtdm,
}

impl FeatureType {
    pub const ALL: [FeatureType; 7] = [
        FeatureType::Shape,
        FeatureType::FirstOrder,
        FeatureType::Glcm,
        FeatureType::Gldm,
        FeatureType::Glrlm,
        FeatureType::Glszm,
        FeatureType::Ngtdm,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            FeatureType::Shape => "shape",
            FeatureType::FirstOrder => "firstorder",
            FeatureType::Glcm => "glcm",
            FeatureType::Gldm => "gldm",
            FeatureType::Glrlm => "glrlm",
            FeatureType::Glszm => "glszm",
            FeatureType::Ngtdm => "ngtdm",
        }
    }

    pub fn parse(tag: &str) -> Result<FeatureType> {
        FeatureType::ALL
            .iter()
            .copied()
            .find(|t| t.tag() == tag)
            .ok_or_else(|| Error::UnknownTag {
                tag: tag.to_string(),
            })
    }
}

/// One named feature value.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeatureEntry {
    pub name: String,
    pub image_type: ImageType,
    pub feature_type: FeatureType,
    pub value: f64,
}

/// All features of one case, in canonical order.
#[derive(Clone, Debug)]
pub struct FeatureVector {
    pub case_id: String,
    pub entries: Vec<FeatureEntry>,
}

impl FeatureVector {
    /// Raw value count per image type, in canonical image order.
    pub fn counts_by_image_type(&self) -> Vec<(ImageType, usize)> {
        ImageType::ALL
            .iter()
            .map(|&t| (t, self.entries.iter().filter(|e| e.image_type == t).count()))
            .collect()
    }
}

pub fn feature_name(image: ImageType, family: FeatureType, base: &str) -> String {
    format!("{}_{}_{}", image.tag(), family.tag(), base)
}

fn per_image_block(
    image: ImageType,
    volume: &Volume3D,
    mask: &MaskVolume,
    bin_width: f64,
) -> Result<Vec<FeatureEntry>> {
    let d = discretize(volume, mask, bin_width)?;
    let fo = first_order_features(&d, volume.voxel_volume());
    let tex = texture_features(&build_texture_matrices(&d), &d);
    let mut out = Vec::with_capacity(93);
    let push =
        |out: &mut Vec<FeatureEntry>, family: FeatureType, names: &[&str], values: &[f64]| {
            for (name, &value) in names.iter().zip(values) {
                out.push(FeatureEntry {
                    name: feature_name(image, family, name),
                    image_type: image,
                    feature_type: family,
                    value,
                });
            }
        };
    push(&mut out, FeatureType::FirstOrder, &FIRST_ORDER_NAMES, &fo);
    push(&mut out, FeatureType::Glcm, &GLCM_NAMES, &tex.glcm);
    push(&mut out, FeatureType::Gldm, &GLDM_NAMES, &tex.gldm);
    push(&mut out, FeatureType::Glrlm, &GLRLM_NAMES, &tex.glrlm);
    push(&mut out, FeatureType::Glszm, &GLSZM_NAMES, &tex.glszm);
    push(&mut out, FeatureType::Ngtdm, &NGTDM_NAMES, &tex.ngtdm);
    Ok(out)
}

/// Extract the full raw feature vector for one case.
pub fn extract_case(
    case_id: &str,
    volume: &Volume3D,
    mask: &MaskVolume,
    bin_width: f64,
) -> Result<FeatureVector> {
    if volume.dims() != mask.dims() {
        return Err(Error::DimsMismatch {
            expected: volume.dims(),
            got: mask.dims(),
        });
    }
    if mask.is_empty() {
        return Err(Error::EmptyMask);
    }
    if !(bin_width > 0.0) {
        return Err(Error::InvalidParam {
            name: "bin_width",
            msg: format!("must be > 0, got {bin_width}"),
        });
    }
    let bb = bounding_box(mask, VOI_MARGIN)?;
    let v = crop_volume(volume, &bb);
    let m = crop_mask(mask, &bb);

    let shape = shape_features(&m, v.spacing())?;
    let derived = derive_all(&v, &m)?;

    // original first, then the 16 derived images, each computed independently
    let mut jobs: Vec<(ImageType, &Volume3D)> = vec![(ImageType::Original, &v)];
    jobs.extend(derived.iter().map(|d| (d.image_type, &d.volume)));
    let blocks: Vec<Result<Vec<FeatureEntry>>> = jobs
        .par_iter()
        .map(|(tag, vol)| per_image_block(*tag, vol, &m, bin_width))
        .collect();

    let mut by_type: Vec<(ImageType, Vec<FeatureEntry>)> = Vec::with_capacity(17);
    for (job, block) in jobs.iter().zip(blocks) {
        by_type.push((job.0, block?));
    }
    by_type.sort_by_key(|(tag, _)| ImageType::ALL.iter().position(|t| t == tag).unwrap());

    let mut entries = Vec::with_capacity(RAW_FEATURE_COUNT);
    for (tag, block) in by_type {
        if tag == ImageType::Original {
            for (name, &value) in SHAPE_NAMES.iter().zip(&shape) {
                entries.push(FeatureEntry {
                    name: feature_name(ImageType::Original, FeatureType::Shape, name),
                    image_type: ImageType::Original,
                    feature_type: FeatureType::Shape,
                    value,
                });
            }
        }
        entries.extend(block);
    }
    debug_assert_eq!(entries.len(), RAW_FEATURE_COUNT);
    Ok(FeatureVector {
        case_id: case_id.to_string(),
        entries,
    })
}
