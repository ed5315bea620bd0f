//! KITTI depth-completion directory conventions.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Environment variable naming the default dataset root.
pub const DATA_ROOT_ENV: &str = "PSEUDO_DEPTH_DATA_ROOT";

/// Normalizes a file stem so that the sparse, ground-truth and image files of
/// one frame share a key.
///
/// `..._sync_velodyne_raw_0000000005_image_02` and
/// `..._sync_groundtruth_depth_0000000005_image_02` both map to
/// `..._sync_0000000005_image_02`.
pub fn frame_key(stem: &str) -> String {
    for token in ["_velodyne_raw_", "_groundtruth_depth_", "_sync_image_"] {
        if let Some(pos) = stem.find(token) {
            let keep = if token == "_sync_image_" { "_sync_" } else { "_" };
            return format!("{}{}{}", &stem[..pos], keep, &stem[pos + token.len()..]);
        }
    }
    stem.to_string()
}

/// PNG files of a directory keyed by [`frame_key`], sorted.
pub fn list_pngs(dir: &Path) -> Result<BTreeMap<String, PathBuf>> {
    list_with_extension(dir, "png")
}

pub fn list_with_extension(dir: &Path, ext: &str) -> Result<BTreeMap<String, PathBuf>> {
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == ext) {
            if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
                out.insert(frame_key(stem), path);
            }
        }
    }
    Ok(out)
}

/// Locations of the sparse input, ground truth and RGB images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetLayout {
    pub sparse_dir: PathBuf,
    pub gt_dir: Option<PathBuf>,
    pub image_dir: Option<PathBuf>,
}

impl DatasetLayout {
    /// Recognizes `val_selection_cropped`-style roots (`velodyne_raw/`,
    /// `groundtruth_depth/`, `image/`) and per-drive roots
    /// (`proj_depth/{velodyne_raw,groundtruth}/image_02`, `image_02/data`).
    pub fn from_root(root: &Path) -> Result<Self> {
        let opt = |p: PathBuf| p.is_dir().then_some(p);
        let flat = root.join("velodyne_raw");
        if flat.is_dir() {
            return Ok(Self {
                sparse_dir: flat,
                gt_dir: opt(root.join("groundtruth_depth")),
                image_dir: opt(root.join("image")),
            });
        }
        let drive = root.join("proj_depth/velodyne_raw/image_02");
        if drive.is_dir() {
            return Ok(Self {
                sparse_dir: drive,
                gt_dir: opt(root.join("proj_depth/groundtruth/image_02")),
                image_dir: opt(root.join("image_02/data")),
            });
        }
        Err(Error::Config(format!(
            "{} does not look like a KITTI depth-completion root",
            root.display()
        )))
    }

    pub fn frames(&self) -> Result<Vec<Frame>> {
        let gt = match &self.gt_dir {
            Some(d) => list_pngs(d)?,
            None => BTreeMap::new(),
        };
        Ok(list_pngs(&self.sparse_dir)?
            .into_iter()
            .map(|(key, sparse)| Frame {
                gt: gt.get(&key).cloned(),
                key,
                sparse,
            })
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    pub key: String,
    pub sparse: PathBuf,
    pub gt: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_align_across_roles() {
        let a = frame_key("2011_09_26_drive_0002_sync_velodyne_raw_0000000005_image_02");
        let b = frame_key("2011_09_26_drive_0002_sync_groundtruth_depth_0000000005_image_02");
        let c = frame_key("2011_09_26_drive_0002_sync_image_0000000005_image_02");
        assert_eq!(a, "2011_09_26_drive_0002_sync_0000000005_image_02");
        assert_eq!(a, b);
        assert_eq!(a, c);
        assert_eq!(frame_key("0000000005"), "0000000005");
    }
}
