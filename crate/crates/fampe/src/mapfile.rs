//! FAMA attribution-map files: little-endian binary, magic `FAMA` |
//! version u32 = 1 | C, H, W u32 | payload f64 each | aggregation-rule byte
//! (0 = signed channel sum, 1 = absolute sum). A plain-text export writes one
//! `c h w value` line per entry, and heatmaps are 8-bit grayscale PGM with the
//! aggregated map min-max normalized to `[0, 255]` (constant maps render as 0).

use std::path::Path;

use fampe_core::attribution::{AttributionMap, ChannelAggregation};
use fampe_core::Tensor;

use crate::error::{CliError, CliResult};
use crate::fsutil;
use crate::image::RawImage;

const MAGIC: &[u8; 4] = b"FAMA";
const VERSION: u32 = 1;

fn aggregation_byte(rule: ChannelAggregation) -> u8 {
    match rule {
        ChannelAggregation::Sum => 0,
        ChannelAggregation::AbsSum => 1,
    }
}

pub fn encode_map(map: &AttributionMap) -> CliResult<Vec<u8>> {
    let shape = map.values.shape();
    if shape.len() != 3 {
        return Err(CliError::format(format!("attribution maps are C x H x W, got {shape:?}")));
    }
    let mut out = Vec::with_capacity(20 + 8 * map.values.len() + 1);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    for &d in shape {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for &v in map.values.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.push(aggregation_byte(map.channel_aggregation));
    Ok(out)
}

pub fn decode_map(bytes: &[u8]) -> CliResult<AttributionMap> {
    let fail = |msg: String| Err(CliError::format(msg));
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return fail("bad map-file magic, expected \"FAMA\"".into());
    }
    if bytes.len() < 21 {
        return fail(format!("truncated map file: {} bytes", bytes.len()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return fail(format!("unsupported map-file version {version}"));
    }
    let dims: Vec<usize> = (0..3)
        .map(|k| u32::from_le_bytes(bytes[8 + 4 * k..12 + 4 * k].try_into().unwrap()) as usize)
        .collect();
    let len: usize = dims.iter().product();
    let expected = 20 + 8 * len + 1;
    if bytes.len() != expected {
        return fail(format!(
            "map file is {} bytes, expected {expected} for shape {dims:?}",
            bytes.len()
        ));
    }
    let data = bytes[20..20 + 8 * len]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let channel_aggregation = match bytes[expected - 1] {
        0 => ChannelAggregation::Sum,
        1 => ChannelAggregation::AbsSum,
        other => return fail(format!("unknown aggregation-rule byte {other}")),
    };
    Ok(AttributionMap { values: Tensor::from_vec(&dims, data)?, channel_aggregation })
}

pub fn save_map(path: &Path, map: &AttributionMap) -> CliResult<()> {
    fsutil::write_atomic(path, &encode_map(map)?)
}

pub fn load_map(path: &Path) -> CliResult<AttributionMap> {
    decode_map(&fsutil::read_file(path)?)
        .map_err(|e| CliError::format(format!("{}: {}", path.display(), e.message)))
}

/// One `c h w value` line per entry, row-major.
pub fn map_text(map: &AttributionMap) -> String {
    let shape = map.values.shape();
    let (h, w) = (shape[1], shape[2]);
    let mut out = String::new();
    for (idx, v) in map.values.data().iter().enumerate() {
        let c = idx / (h * w);
        let rest = idx % (h * w);
        out.push_str(&format!("{c} {} {} {v}\n", rest / w, rest % w));
    }
    out
}

/// Channel-aggregated map min-max normalized to `[0, 255]`; constant maps
/// (including all-zero) render as all-0.
pub fn heatmap_image(map: &AttributionMap) -> RawImage {
    let shape = map.values.shape();
    let (h, w) = (shape[1], shape[2]);
    let importance = map.pixel_importance();
    let min = importance.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = importance.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pixels = if max > min {
        importance
            .iter()
            .map(|&v| ((v - min) / (max - min) * 255.0).round() as u8)
            .collect()
    } else {
        vec![0u8; h * w]
    };
    RawImage::new(1, h, w, pixels).expect("heatmap dimensions come from a valid map")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> AttributionMap {
        AttributionMap {
            values: Tensor::from_vec(&[2, 2, 2], vec![0.5, -1.0, 2.0, 0.0, 1.5, 2.5, -0.5, 4.0])
                .unwrap(),
            channel_aggregation: ChannelAggregation::AbsSum,
        }
    }

    #[test]
    fn binary_roundtrip_is_exact() {
        let map = sample();
        let back = decode_map(&encode_map(&map).unwrap()).unwrap();
        assert_eq!(back, map);
    }

    #[test]
    fn layout_ends_with_aggregation_byte() {
        let bytes = encode_map(&sample()).unwrap();
        assert_eq!(&bytes[..4], b"FAMA");
        assert_eq!(bytes.len(), 20 + 8 * 8 + 1);
        assert_eq!(*bytes.last().unwrap(), 1);
    }

    #[test]
    fn text_export_lists_every_entry_in_row_major_order() {
        let map = AttributionMap {
            values: Tensor::from_vec(&[1, 2, 2], vec![0.0, 1.5, -2.0, 3.0]).unwrap(),
            channel_aggregation: ChannelAggregation::Sum,
        };
        assert_eq!(map_text(&map), "0 0 0 0\n0 0 1 1.5\n0 1 0 -2\n0 1 1 3\n");
    }

    #[test]
    fn heatmap_normalizes_min_to_zero_and_max_to_255() {
        let map = AttributionMap {
            values: Tensor::from_vec(&[1, 2, 2], vec![-1.0, 0.0, 1.0, 3.0]).unwrap(),
            channel_aggregation: ChannelAggregation::Sum,
        };
        let img = heatmap_image(&map);
        assert_eq!(img.pixels, vec![0, 64, 128, 255]);
    }

    #[test]
    fn constant_map_renders_black() {
        let map = AttributionMap {
            values: Tensor::from_vec(&[1, 1, 3], vec![7.0, 7.0, 7.0]).unwrap(),
            channel_aggregation: ChannelAggregation::Sum,
        };
        assert_eq!(heatmap_image(&map).pixels, vec![0, 0, 0]);
    }

    #[test]
    fn size_mismatch_names_both_counts() {
        let mut bytes = encode_map(&sample()).unwrap();
        bytes.truncate(bytes.len() - 9);
        let err = decode_map(&bytes).unwrap_err();
        assert!(err.message.contains("expected 85"), "{}", err.message);
    }
}
