//! Named-color palette and dominant color extraction.

use thiserror::Error;

use super::ply::ColoredPoint;

/// Fixed palette in tie-break order.
pub const PALETTE: [(&str, [u8; 3]); 12] = [
    ("red", [255, 0, 0]),
    ("orange", [255, 140, 0]),
    ("yellow", [255, 255, 0]),
    ("green", [0, 160, 0]),
    ("cyan", [0, 255, 255]),
    ("blue", [0, 0, 255]),
    ("purple", [128, 0, 128]),
    ("pink", [255, 150, 200]),
    ("brown", [139, 69, 19]),
    ("black", [0, 0, 0]),
    ("gray", [128, 128, 128]),
    ("white", [255, 255, 255]),
];

pub const MAX_COLORS: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum ColorError {
    #[error("cannot extract colors from an empty point list")]
    NoPoints,
}

pub fn is_palette_color(name: &str) -> bool {
    PALETTE.iter().any(|(n, _)| *n == name)
}

pub fn palette_index(name: &str) -> Option<usize> {
    PALETTE.iter().position(|(n, _)| *n == name)
}

/// Index of the nearest palette entry in RGB; equal distances resolve to the
/// earlier entry.
pub fn quantize(rgb: [u8; 3]) -> usize {
    let dist = |p: [u8; 3]| -> i32 {
        (0..3)
            .map(|i| {
                let d = rgb[i] as i32 - p[i] as i32;
                d * d
            })
            .sum()
    };
    let mut best = 0;
    for (i, (_, p)) in PALETTE.iter().enumerate().skip(1) {
        if dist(*p) < dist(PALETTE[best].1) {
            best = i;
        }
    }
    best
}

/// Up to three palette names ordered by descending point count, ties broken
/// by palette order.
pub fn dominant_colors(points: &[ColoredPoint]) -> Result<Vec<String>, ColorError> {
    if points.is_empty() {
        return Err(ColorError::NoPoints);
    }
    let mut counts = [0usize; PALETTE.len()];
    for p in points {
        counts[quantize(p.color)] += 1;
    }
    let mut order: Vec<usize> = (0..PALETTE.len()).filter(|&i| counts[i] > 0).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .take(MAX_COLORS)
        .map(|i| PALETTE[i].0.to_string())
        .collect())
}
