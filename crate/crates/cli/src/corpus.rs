//! Filesystem corpus loading: one subdirectory per identity, netpbm
//! images inside looked at in sorted filename order so runs are
//! reproducible.

use std::fs;
use std::path::Path;

use facekit::imgio::{decode_netpbm, to_grayscale, GrayImage};

pub fn load_gray_image(path: &Path) -> Result<GrayImage, String> {
    let bytes = fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let raster = decode_netpbm(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(to_grayscale(&raster))
}

fn sorted_entries(dir: &Path) -> Result<Vec<std::path::PathBuf>, String> {
    let mut entries: Vec<_> = fs::read_dir(dir)
        .map_err(|e| format!("{}: {e}", dir.display()))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .collect();
    entries.sort();
    Ok(entries)
}

/// Loads every image in a flat directory.
pub fn load_window_dir(dir: &Path) -> Result<Vec<GrayImage>, String> {
    let mut images = Vec::new();
    for path in sorted_entries(dir)? {
        if path.is_file() {
            images.push(load_gray_image(&path)?);
        }
    }
    if images.is_empty() {
        return Err(format!("{}: no images found", dir.display()));
    }
    Ok(images)
}

/// Loads a labeled corpus: each subdirectory is an identity, its files
/// are that identity's images.
pub fn load_labeled_corpus(dir: &Path) -> Result<Vec<(String, GrayImage)>, String> {
    let mut corpus = Vec::new();
    for entry in sorted_entries(dir)? {
        if !entry.is_dir() {
            continue;
        }
        let label = entry
            .file_name()
            .and_then(|n| n.to_str())
            .ok_or_else(|| format!("{}: non-UTF-8 identity directory", entry.display()))?
            .to_string();
        for path in sorted_entries(&entry)? {
            if path.is_file() {
                corpus.push((label.clone(), load_gray_image(&path)?));
            }
        }
    }
    if corpus.is_empty() {
        return Err(format!("{}: no identity subdirectories with images", dir.display()));
    }
    Ok(corpus)
}
