use std::fs;
use std::path::{Path, PathBuf};

use nm_post::Segmentation;
use nm_tensor::{Dims, Resolution, Volume};
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;

/// JSON sidecar describing a raw little-endian payload in a sibling file.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VolumeHeader {
    pub dims: [usize; 3],
    pub channels: usize,
    /// "f64" for intensities/affinities, "u64" for labelings.
    pub dtype: String,
    pub axis_order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<ResolutionHeader>,
    /// Payload file name, resolved relative to the header's directory.
    pub payload: String,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ResolutionHeader {
    pub axial_nm: f64,
    pub transverse_nm: f64,
}

/// Normalize a user-facing path to (header path, payload path).
pub fn volume_paths(path: &Path) -> (PathBuf, PathBuf) {
    let header = if path.extension().map(|e| e == "json").unwrap_or(false) {
        path.to_path_buf()
    } else {
        path.with_extension("json")
    };
    let payload = header.with_extension("raw");
    (header, payload)
}

fn payload_name(payload: &Path) -> String {
    payload
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "volume.raw".to_string())
}

fn write_pair(path: &Path, header: &VolumeHeader, bytes: &[u8]) -> Result<(), PipelineError> {
    let (header_path, payload_path) = volume_paths(path);
    let text = serde_json::to_string_pretty(header)
        .map_err(|e| PipelineError::Io { detail: e.to_string() })?;
    fs::write(&header_path, text).map_err(|e| PipelineError::from_io(e, &header_path))?;
    fs::write(&payload_path, bytes).map_err(|e| PipelineError::from_io(e, &payload_path))?;
    Ok(())
}

fn read_pair(path: &Path) -> Result<(VolumeHeader, Vec<u8>, PathBuf), PipelineError> {
    let (header_path, _) = volume_paths(path);
    let text =
        fs::read_to_string(&header_path).map_err(|e| PipelineError::from_io(e, &header_path))?;
    let header: VolumeHeader =
        serde_json::from_str(&text).map_err(|e| PipelineError::MalformedHeader {
            path: header_path.clone(),
            detail: e.to_string(),
        })?;
    if header.axis_order != "zyx" {
        return Err(PipelineError::MalformedHeader {
            path: header_path,
            detail: format!("unsupported axis order {:?}", header.axis_order),
        });
    }
    let payload_path = header_path
        .parent()
        .unwrap_or(Path::new("."))
        .join(&header.payload);
    let bytes = fs::read(&payload_path).map_err(|e| PipelineError::from_io(e, &payload_path))?;
    let dims = Dims::new(header.dims[0], header.dims[1], header.dims[2]);
    let elem = match header.dtype.as_str() {
        "f64" | "u64" => 8,
        other => {
            return Err(PipelineError::MalformedHeader {
                path: header_path,
                detail: format!("unknown dtype {:?}", other),
            })
        }
    };
    let expected = dims.n() * header.channels * elem;
    if bytes.len() != expected {
        return Err(PipelineError::MalformedHeader {
            path: header_path,
            detail: format!(
                "payload holds {} bytes, header implies {}",
                bytes.len(),
                expected
            ),
        });
    }
    Ok((header, bytes, header_path))
}

pub fn write_f64_volume(path: &Path, v: &Volume) -> Result<(), PipelineError> {
    let (_, payload_path) = volume_paths(path);
    let header = VolumeHeader {
        dims: [v.dims.depth, v.dims.height, v.dims.width],
        channels: v.channels,
        dtype: "f64".to_string(),
        axis_order: "zyx".to_string(),
        resolution: v.resolution.map(|r| ResolutionHeader {
            axial_nm: r.axial_nm,
            transverse_nm: r.transverse_nm,
        }),
        payload: payload_name(&payload_path),
    };
    let mut bytes = Vec::with_capacity(v.data.len() * 8);
    for x in &v.data {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    write_pair(path, &header, &bytes)
}

pub fn read_f64_volume(path: &Path) -> Result<Volume, PipelineError> {
    let (header, bytes, header_path) = read_pair(path)?;
    if header.dtype != "f64" {
        return Err(PipelineError::MalformedHeader {
            path: header_path,
            detail: format!("expected dtype f64, found {:?}", header.dtype),
        });
    }
    let data: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let dims = Dims::new(header.dims[0], header.dims[1], header.dims[2]);
    let mut v = Volume::new(header.channels, dims, data)?;
    v.resolution = header.resolution.map(|r| Resolution {
        axial_nm: r.axial_nm,
        transverse_nm: r.transverse_nm,
    });
    Ok(v)
}

pub fn write_label_volume(path: &Path, seg: &Segmentation) -> Result<(), PipelineError> {
    let (_, payload_path) = volume_paths(path);
    let header = VolumeHeader {
        dims: [seg.dims.depth, seg.dims.height, seg.dims.width],
        channels: 1,
        dtype: "u64".to_string(),
        axis_order: "zyx".to_string(),
        resolution: None,
        payload: payload_name(&payload_path),
    };
    let mut bytes = Vec::with_capacity(seg.labels.len() * 8);
    for x in &seg.labels {
        bytes.extend_from_slice(&x.to_le_bytes());
    }
    write_pair(path, &header, &bytes)
}

pub fn read_label_volume(path: &Path) -> Result<Segmentation, PipelineError> {
    let (header, bytes, header_path) = read_pair(path)?;
    if header.dtype != "u64" {
        return Err(PipelineError::MalformedHeader {
            path: header_path.clone(),
            detail: format!("expected dtype u64, found {:?}", header.dtype),
        });
    }
    if header.channels != 1 {
        return Err(PipelineError::MalformedHeader {
            path: header_path,
            detail: format!("labelings are single-channel, found {}", header.channels),
        });
    }
    let labels: Vec<u64> = bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let dims = Dims::new(header.dims[0], header.dims[1], header.dims[2]);
    Ok(Segmentation::new(dims, labels)?)
}
