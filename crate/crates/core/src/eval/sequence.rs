use std::fs;
use std::path::{Path, PathBuf};

use log::warn;

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

pub const GROUND_TRUTH_FILE: &str = "groundtruth_rect.txt";
const ATTRIBUTES_FILE: &str = "attributes.txt";
const IMAGE_EXTENSIONS: &[&str] = &["jpg", "jpeg", "png", "bmp"];

#[derive(Clone, Debug, PartialEq)]
pub struct Sequence {
    pub name: String,
    pub frames: Vec<PathBuf>,
    /// One entry per frame; `None` marks an annotation gap.
    pub ground_truth: Vec<Option<BoundingBox<f64>>>,
    pub attributes: Vec<String>,
}

impl Sequence {
    /// The first annotated box, which initializes the tracker.
    pub fn init_box(&self) -> Result<BoundingBox<f64>> {
        self.ground_truth.first().copied().flatten().ok_or(Error::Empty("initial ground-truth box"))
    }
}

/// Parses `x,y,w,h` lines separated by commas, tabs or spaces. Blank lines
/// are skipped. Boxes with a non-positive or non-finite size are gaps.
pub fn parse_ground_truth(text: &str, path: &Path) -> Result<Vec<Option<BoundingBox<f64>>>> {
    let mut boxes = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let err = || Error::GroundTruthParse { path: path.to_path_buf(), line: i + 1, content: line.to_string() };
        let values = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|_| err()))
            .collect::<Result<Vec<f64>>>()?;
        let [x, y, w, h] = values[..] else {
            return Err(err());
        };
        boxes.push(BoundingBox::checked(x, y, w, h).ok());
    }
    Ok(boxes)
}

fn frame_number(path: &Path) -> Option<u64> {
    path.file_stem()?.to_str()?.parse().ok()
}

fn is_image(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| IMAGE_EXTENSIONS.contains(&e.to_ascii_lowercase().as_str()))
}

/// Reads one sequence directory. Frames are ordered by the number in their
/// file name; when frame and annotation counts differ both are truncated to
/// the shorter one.
pub fn load_sequence(dir: &Path) -> Result<Sequence> {
    if !dir.is_dir() {
        return Err(Error::Missing { what: "sequence directory", path: dir.to_path_buf() });
    }
    let img_dir = dir.join("img");
    if !img_dir.is_dir() {
        return Err(Error::Missing { what: "img directory", path: img_dir });
    }
    let gt_path = dir.join(GROUND_TRUTH_FILE);
    if !gt_path.is_file() {
        return Err(Error::Missing { what: "ground-truth file", path: gt_path });
    }

    let mut frames: Vec<(u64, PathBuf)> = Vec::new();
    for entry in fs::read_dir(&img_dir).map_err(|e| Error::io(&img_dir, e))? {
        let path = entry.map_err(|e| Error::io(&img_dir, e))?.path();
        if !is_image(&path) {
            continue;
        }
        match frame_number(&path) {
            Some(n) => frames.push((n, path)),
            None => warn!("skipping non-numbered frame {}", path.display()),
        }
    }
    frames.sort();
    let mut frames: Vec<PathBuf> = frames.into_iter().map(|(_, p)| p).collect();
    if frames.is_empty() {
        return Err(Error::Missing { what: "frames", path: img_dir });
    }

    let text = fs::read_to_string(&gt_path).map_err(|e| Error::io(&gt_path, e))?;
    let mut ground_truth = parse_ground_truth(&text, &gt_path)?;
    if ground_truth.first().copied().flatten().is_none() {
        return Err(Error::GroundTruthParse {
            path: gt_path,
            line: 1,
            content: "first box must be valid".into(),
        });
    }
    if frames.len() != ground_truth.len() {
        warn!(
            "{}: {} frames but {} ground-truth boxes; using the first {}",
            dir.display(),
            frames.len(),
            ground_truth.len(),
            frames.len().min(ground_truth.len())
        );
        let n = frames.len().min(ground_truth.len());
        frames.truncate(n);
        ground_truth.truncate(n);
    }

    let attr_path = dir.join(ATTRIBUTES_FILE);
    let attributes = if attr_path.is_file() {
        fs::read_to_string(&attr_path)
            .map_err(|e| Error::io(&attr_path, e))?
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    } else {
        Vec::new()
    };

    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());
    Ok(Sequence { name, frames, ground_truth, attributes })
}

/// Sub-directories of `root` holding a ground-truth file, sorted by name.
pub fn discover_sequences(root: &Path) -> Result<Vec<PathBuf>> {
    if !root.is_dir() {
        return Err(Error::Missing { what: "dataset directory", path: root.to_path_buf() });
    }
    let mut dirs = Vec::new();
    for entry in fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let path = entry.map_err(|e| Error::io(root, e))?.path();
        if path.is_dir() && path.join(GROUND_TRUTH_FILE).is_file() {
            dirs.push(path);
        }
    }
    dirs.sort();
    if dirs.is_empty() {
        return Err(Error::Missing { what: "sequences", path: root.to_path_buf() });
    }
    Ok(dirs)
}
