//! Preimage mesh of the fundamental domain.
//!
//! At depth `n` the unit square `[0,1]²` (lattice coordinates) is cut by the
//! `A⁻ⁿ`-images of the lattice translates of its boundary. Each cell is the
//! clip of a parallelogram `A⁻ⁿ(Q + γ)` to the unit square. Diameters are
//! Euclidean, measured in the group's geometric embedding. This is a
//! floating-point rendering path.

use std::fmt::Write as _;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::affine::FloatAffine;
use crate::error::QuotientError;
use crate::exec::{self, Strategy};
use crate::lattice::Geometry;
use crate::quotient::QuotientMapDatum;

pub const MAX_MESH_DEPTH: u32 = 12;

const UNIT_SQUARE: [[f64; 2]; 4] = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthStat {
    pub depth: u32,
    pub max_diam: f64,
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mesh {
    pub geometry: Geometry,
    pub depth: u32,
    /// Cells at the final depth, as polygons in geometric coordinates.
    pub cells: Vec<Vec<[f64; 2]>>,
    /// One entry per depth `0..=depth`.
    pub stats: Vec<DepthStat>,
}

/// Rounds to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn clip_to_unit_square(poly: &[[f64; 2]]) -> Vec<[f64; 2]> {
    clip_to_box(poly, [0.0, 1.0], [0.0, 1.0])
}

fn clip_to_box(poly: &[[f64; 2]], xs: [f64; 2], ys: [f64; 2]) -> Vec<[f64; 2]> {
    // Sutherland–Hodgman, one half-plane per side
    let planes: [(usize, f64, bool); 4] = [(0, xs[0], true), (0, xs[1], false), (1, ys[0], true), (1, ys[1], false)];
    let mut out = poly.to_vec();
    for (axis, bound, keep_above) in planes {
        if out.is_empty() {
            break;
        }
        let inside = |p: &[f64; 2]| if keep_above { p[axis] >= bound } else { p[axis] <= bound };
        let input = std::mem::take(&mut out);
        for i in 0..input.len() {
            let cur = input[i];
            let prev = input[(i + input.len() - 1) % input.len()];
            let (ci, pi) = (inside(&cur), inside(&prev));
            if ci != pi {
                let t = (bound - prev[axis]) / (cur[axis] - prev[axis]);
                let mut hit = [prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])];
                hit[axis] = bound;
                out.push(hit);
            }
            if ci {
                out.push(cur);
            }
        }
    }
    out
}

fn area(poly: &[[f64; 2]]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let (p, q) = (poly[i], poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

fn diameter(geometry: Geometry, poly: &[[f64; 2]]) -> f64 {
    let mut best = 0.0f64;
    for (i, p) in poly.iter().enumerate() {
        for q in &poly[i + 1..] {
            best = best.max(geometry.distance(*p, *q));
        }
    }
    best
}

struct DepthLayer {
    inverse: FloatAffine,
    /// `Aⁿ([0,1]²)`
    image: Vec<[f64; 2]>,
    y_range: (i64, i64),
    cell_area: f64,
}

impl DepthLayer {
    fn new(datum: &QuotientMapDatum, depth: u32) -> Result<Self, QuotientError> {
        let map = if depth == 0 {
            None
        } else {
            Some(datum.map().iterate(depth)?)
        };
        let inverse = match &map {
            Some(m) => m.inverse_f64(),
            None => FloatAffine {
                linear: [[1.0, 0.0], [0.0, 1.0]],
                translation: [0.0, 0.0],
            },
        };
        // translates Q + γ meeting Aⁿ([0,1]²)
        let forward = match &map {
            Some(m) => {
                let t = m.to_transform();
                FloatAffine {
                    linear: t.linear.to_f64(),
                    translation: t.translation.to_f64(),
                }
            }
            None => inverse,
        };
        let corners: Vec<[f64; 2]> = UNIT_SQUARE.iter().map(|&c| forward.apply(c)).collect();
        let lo = |axis: usize| corners.iter().map(|c| c[axis]).fold(f64::INFINITY, f64::min);
        let hi = |axis: usize| corners.iter().map(|c| c[axis]).fold(f64::NEG_INFINITY, f64::max);
        let y_range = (lo(1).floor() as i64 - 1, hi(1).ceil() as i64);
        let det = datum
            .degree()
            .to_f64()
            .expect("degree fits in f64")
            .abs();
        Ok(DepthLayer {
            inverse,
            image: corners,
            y_range,
            cell_area: det.powi(-(depth as i32)),
        })
    }

    fn cell(&self, gx: i64, gy: i64) -> Option<Vec<[f64; 2]>> {
        let (gx, gy) = (gx as f64, gy as f64);
        let poly: Vec<[f64; 2]> = UNIT_SQUARE
            .iter()
            .map(|c| self.inverse.apply([c[0] + gx, c[1] + gy]))
            .collect();
        let clipped = clip_to_unit_square(&poly);
        if clipped.len() >= 3 && area(&clipped) > 1e-9 * self.cell_area {
            Some(clipped)
        } else {
            None
        }
    }

    fn rows(&self) -> usize {
        (self.y_range.1 - self.y_range.0 + 1) as usize
    }

    fn row_cells(&self, row: usize) -> Vec<Vec<[f64; 2]>> {
        let gy = self.y_range.0 + row as i64;
        // Q + γ meets the image only if γ_x lies within a unit of the
        // image's extent over the band [γ_y, γ_y + 1]
        let band = clip_to_box(&self.image, [f64::NEG_INFINITY, f64::INFINITY], [gy as f64, gy as f64 + 1.0]);
        if band.is_empty() {
            return Vec::new();
        }
        let xmin = band.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let xmax = band.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
        (xmin.floor() as i64 - 1..=xmax.ceil() as i64)
            .filter_map(|gx| self.cell(gx, gy))
            .collect()
    }
}

fn layer_stat(
    geometry: Geometry,
    layer: &DepthLayer,
    depth: u32,
    strategy: Strategy,
) -> DepthStat {
    let per_row: Vec<(f64, usize)> = exec::map_range(strategy, layer.rows(), |row| {
        let cells = layer.row_cells(row);
        let max = cells
            .iter()
            .map(|c| diameter(geometry, c))
            .fold(0.0f64, f64::max);
        (max, cells.len())
    });
    DepthStat {
        depth,
        max_diam: per_row.iter().map(|r| r.0).fold(0.0f64, f64::max),
        cells: per_row.iter().map(|r| r.1).sum(),
    }
}

/// Maximum cell diameters for depths `0..=depth`, without keeping cells.
pub fn mesh_stats(
    datum: &QuotientMapDatum,
    depth: u32,
    strategy: Strategy,
) -> Result<Vec<DepthStat>, QuotientError> {
    if depth > MAX_MESH_DEPTH {
        return Err(QuotientError::DepthTooLarge(depth, MAX_MESH_DEPTH));
    }
    let geometry = datum.group().geometry();
    (0..=depth)
        .map(|d| Ok(layer_stat(geometry, &DepthLayer::new(datum, d)?, d, strategy)))
        .collect()
}

/// Cells at `depth` plus statistics for every depth up to it.
pub fn preimage_mesh(
    datum: &QuotientMapDatum,
    depth: u32,
    strategy: Strategy,
) -> Result<Mesh, QuotientError> {
    let stats = mesh_stats(datum, depth, strategy)?;
    let geometry = datum.group().geometry();
    let layer = DepthLayer::new(datum, depth)?;
    let cells = exec::map_range(strategy, layer.rows(), |row| layer.row_cells(row))
        .into_iter()
        .flatten()
        .map(|cell| cell.into_iter().map(|p| geometry.embed(p)).collect())
        .collect();
    Ok(Mesh {
        geometry,
        depth,
        cells,
        stats,
    })
}

impl Mesh {
    pub fn max_diam(&self) -> f64 {
        self.stats.last().map(|s| s.max_diam).unwrap_or(0.0)
    }

    /// Stroke-only SVG, one `<path>` per cell, `viewBox` fitted to the
    /// embedded fundamental domain.
    pub fn to_svg(&self) -> String {
        let corners: Vec<[f64; 2]> = UNIT_SQUARE.iter().map(|&c| self.geometry.embed(c)).collect();
        let xmax = corners.iter().map(|c| c[0]).fold(0.0f64, f64::max);
        let ymax = corners.iter().map(|c| c[1]).fold(0.0f64, f64::max);
        let fmt = |v: f64| format!("{}", round_sig12(v));
        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {} {}">"#,
            fmt(xmax),
            fmt(ymax)
        );
        let _ = writeln!(
            svg,
            r#"<g fill="none" stroke="black" stroke-width="0.002" stroke-linejoin="round">"#
        );
        for cell in &self.cells {
            let mut d = String::new();
            for (i, p) in cell.iter().enumerate() {
                let _ = write!(
                    d,
                    "{}{} {} ",
                    if i == 0 { "M" } else { "L" },
                    fmt(p[0]),
                    fmt(ymax - p[1])
                );
            }
            d.push('Z');
            let _ = writeln!(svg, r#"<path d="{d}"/>"#);
        }
        svg.push_str("</g>\n</svg>\n");
        svg
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crystal::GroupKind;
    use crate::lattice::RationalVector2;

    fn datum(kind: GroupKind, l: [[i64; 2]; 2]) -> QuotientMapDatum {
        QuotientMapDatum::from_parts(kind, l, RationalVector2::zero()).unwrap()
    }

    #[test]
    fn depth_zero_is_the_domain() {
        let d = datum(GroupKind::P2, [[2, 0], [0, 2]]);
        let m = preimage_mesh(&d, 0, Strategy::Sequential).unwrap();
        assert_eq!(m.cells.len(), 1);
        assert!((m.max_diam() - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(m.to_svg().matches("<path").count(), 1);
        let h = datum(GroupKind::P6, [[2, 0], [0, 2]]);
        let m = preimage_mesh(&h, 0, Strategy::Sequential).unwrap();
        // long diagonal of the 60° rhombus
        assert!((m.max_diam() - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn halving() {
        let d = datum(GroupKind::P2, [[2, 0], [0, 2]]);
        let stats = mesh_stats(&d, 5, Strategy::Parallel).unwrap();
        for s in &stats {
            assert_eq!(s.cells, 4usize.pow(s.depth));
            let expected = 2f64.sqrt() / 2f64.powi(s.depth as i32);
            assert!((s.max_diam - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn rotation_scaling_decay() {
        let d = datum(GroupKind::P4, [[1, 1], [-1, 1]]);
        let stats = mesh_stats(&d, 8, Strategy::Parallel).unwrap();
        // cells are similar copies shrunk by 1/√2 per step; clipping only ever removes
        for s in &stats[1..] {
            assert!(s.max_diam <= 2f64.sqrt() * 2f64.powf(-(s.depth as f64) / 2.0) + 1e-9);
        }
        assert!(stats[8].max_diam < stats[0].max_diam / 8.0);
    }

    #[test]
    fn stretched_direction_persists() {
        let d = datum(GroupKind::P2, [[3, 0], [0, 1]]);
        let stats = mesh_stats(&d, 6, Strategy::Parallel).unwrap();
        assert!(stats.iter().all(|s| s.max_diam >= 1.0));
    }

    #[test]
    fn depth_limit() {
        let d = datum(GroupKind::P2, [[2, 0], [0, 2]]);
        assert!(matches!(
            mesh_stats(&d, 13, Strategy::Sequential),
            Err(QuotientError::DepthTooLarge(13, 12))
        ));
    }

    #[test]
    fn strategies_agree() {
        let d = QuotientMapDatum::from_parts(
            GroupKind::P4,
            [[1, 1], [-1, 1]],
            RationalVector2::from_fracs(1, 2, 1, 2),
        )
        .unwrap();
        let a = preimage_mesh(&d, 4, Strategy::Sequential).unwrap();
        let b = preimage_mesh(&d, 4, Strategy::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn clipping() {
        let poly = [[-0.5, -0.5], [0.5, -0.5], [0.5, 0.5], [-0.5, 0.5]];
        let c = clip_to_unit_square(&poly);
        assert!((area(&c) - 0.25).abs() < 1e-12);
        let outside = [[2.0, 2.0], [3.0, 2.0], [3.0, 3.0]];
        assert!(clip_to_unit_square(&outside).is_empty());
    }

    #[test]
    fn sig12() {
        assert_eq!(round_sig12(0.1), 0.1);
        assert_eq!(round_sig12(std::f64::consts::PI).to_string(), "3.14159265359");
    }
}
