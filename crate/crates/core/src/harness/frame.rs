use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::geometry::parse_ply;
use crate::{Error, Result, Vec3};

/// One time step's batch of measured surface points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub k: usize,
    pub points: Vec<Vec3>,
}

impl Frame {
    pub fn new(k: usize, points: Vec<Vec3>) -> Self {
        Self { k, points }
    }
}

pub fn frame_file_name(k: usize) -> String {
    format!("frame_{k:06}.txt")
}

/// Writes `x y z` lines with round-trip exact formatting.
pub fn write_frame_file(frame: &Frame, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::with_capacity(frame.points.len() * 64);
    for p in &frame.points {
        let _ = writeln!(out, "{} {} {}", p.x, p.y, p.z);
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads a `.txt` point list (`x y z` per line, `#` comments) or an ASCII PLY
/// whose vertices are the points.
pub fn read_frame_file(path: impl AsRef<Path>, k: usize) -> Result<Frame> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let is_ply = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("ply"));
    let points = if is_ply {
        parse_ply(&text, path)?.vertices().to_vec()
    } else {
        let mut points = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    message: format!("expected three numbers, got {line:?}"),
                })?;
            if vals.len() != 3 {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: n + 1,
                    message: format!("expected three numbers, got {}", vals.len()),
                });
            }
            points.push(Vec3::new(vals[0], vals[1], vals[2]));
        }
        points
    };
    Ok(Frame::new(k, points))
}

/// All `.txt` and `.ply` frame files of a directory in file-name order.
///
/// Frame indices come from `frame_NNNNNN` names when present, otherwise from
/// the 1-based position in the listing.
pub fn read_frames_dir(dir: impl AsRef<Path>) -> Result<Vec<Frame>> {
    let dir = dir.as_ref();
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.is_file()
                && p.extension()
                    .and_then(|e| e.to_str())
                    .is_some_and(|e| e.eq_ignore_ascii_case("txt") || e.eq_ignore_ascii_case("ply"))
        })
        .collect();
    if files.is_empty() {
        return Err(Error::Config(format!("no frame files in {}", dir.display())));
    }
    files.sort();
    files
        .iter()
        .enumerate()
        .map(|(i, path)| {
            let k = path
                .file_stem()
                .and_then(|s| s.to_str())
                .and_then(|s| s.strip_prefix("frame_"))
                .and_then(|s| s.parse().ok())
                .unwrap_or(i + 1);
            read_frame_file(path, k)
        })
        .collect()
}
