//! Raster ground truth: scanline fill, exact distance transform, disk-fit
//! checks and morphological opening.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::Loop;
use crate::geometry::{chain_parts, winding_from_parts, MonotonePart, Point2, Prim};
use crate::rolling::Side;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("cell size {cell} exceeds r/20 = {max}")]
    ResolutionTooCoarse { cell: f64, max: f64 },
    #[error("writing image: {0}")]
    Io(#[from] std::io::Error),
}

/// Placement of a raster: cell `(i, j)` has its centre at
/// `origin + ((i + 0.5) * cell, (j + 0.5) * cell)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: Point2,
    pub cell: f64,
    pub width: usize,
    pub height: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridMask {
    pub spec: GridSpec,
    pub bits: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClearanceField {
    pub spec: GridSpec,
    /// Distance from each cell centre to the nearest boundary cell centre.
    pub values: Vec<f64>,
}

/// A boundary sample whose offset disk does not fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleFailure {
    pub t: f64,
    pub clearance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleVerdict {
    pub holds: bool,
    pub failures: Vec<OracleFailure>,
    pub min_clearance: f64,
    pub cell: f64,
}

const FAR: f64 = 1e30;

impl GridSpec {
    /// Grid over the box `[lo, hi]` padded by `pad` on every side.
    pub fn covering(lo: Point2, hi: Point2, cell: f64, pad: f64) -> Self {
        let origin = Point2::new(lo.x - pad, lo.y - pad);
        let width = ((hi.x - lo.x + 2.0 * pad) / cell).ceil() as usize;
        let height = ((hi.y - lo.y + 2.0 * pad) / cell).ceil() as usize;
        Self {
            origin,
            cell,
            width,
            height,
        }
    }

    /// Grid over the loop padded by `2r` plus a few cells.
    pub fn for_loop(l: &Loop, cell: f64) -> Result<Self, OracleError> {
        let max = l.r() / 20.0;
        if !(cell > 0.0 && cell <= max * (1.0 + 1e-12)) {
            return Err(OracleError::ResolutionTooCoarse { cell, max });
        }
        let (lo, hi) = l.bbox();
        Ok(Self::covering(lo, hi, cell, 2.0 * l.r() + 4.0 * cell))
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.width + i
    }

    pub fn center(&self, i: usize, j: usize) -> Point2 {
        Point2::new(
            self.origin.x + (i as f64 + 0.5) * self.cell,
            self.origin.y + (j as f64 + 0.5) * self.cell,
        )
    }

    /// Cell containing `p`, if inside the grid.
    pub fn cell_of(&self, p: Point2) -> Option<(usize, usize)> {
        let fi = ((p.x - self.origin.x) / self.cell).floor();
        let fj = ((p.y - self.origin.y) / self.cell).floor();
        if fi < 0.0 || fj < 0.0 || fi >= self.width as f64 || fj >= self.height as f64 {
            return None;
        }
        Some((fi as usize, fj as usize))
    }

    pub fn empty_mask(&self) -> GridMask {
        GridMask {
            spec: *self,
            bits: vec![false; self.len()],
        }
    }

    /// Cells whose centre has non-zero winding number with respect to the
    /// closed chain.
    pub fn rasterize(&self, chain: &[Prim]) -> GridMask {
        self.fill_parts(&chain_parts(chain))
    }

    fn fill_parts(&self, parts: &[MonotonePart]) -> GridMask {
        let mut mask = self.empty_mask();
        let mut xs: Vec<(f64, i32)> = Vec::new();
        for j in 0..self.height {
            let y = self.origin.y + (j as f64 + 0.5) * self.cell;
            xs.clear();
            for part in parts {
                if let Some(x) = part.crossing(y) {
                    xs.push((x, part.direction()));
                }
            }
            xs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut wind = 0;
            for k in 0..xs.len() {
                wind -= xs[k].1;
                if wind == 0 || k + 1 == xs.len() {
                    continue;
                }
                let (x0, x1) = (xs[k].0, xs[k + 1].0);
                let i0 = ((x0 - self.origin.x) / self.cell - 0.5).ceil().max(0.0) as usize;
                let i1 = ((x1 - self.origin.x) / self.cell - 0.5).floor();
                if i1 < 0.0 {
                    continue;
                }
                let i1 = (i1 as usize).min(self.width - 1);
                for i in i0..=i1 {
                    mask.bits[self.index(i, j)] = true;
                }
            }
        }
        mask
    }

    /// Cells whose centre lies within half a cell diagonal of the chain.
    pub fn boundary(&self, chain: &[Prim]) -> GridMask {
        let mut mask = self.empty_mask();
        let half_diag = self.cell * std::f64::consts::FRAC_1_SQRT_2;
        let w = 2i64;
        for p in chain {
            let len = p.length();
            let steps = (len / (0.5 * self.cell)).ceil().max(1.0) as usize;
            for k in 0..=steps {
                let q = p.point_at(len * k as f64 / steps as f64);
                let ci = ((q.x - self.origin.x) / self.cell).floor() as i64;
                let cj = ((q.y - self.origin.y) / self.cell).floor() as i64;
                for dj in -w..=w {
                    for di in -w..=w {
                        let (i, j) = (ci + di, cj + dj);
                        if i < 0 || j < 0 || i >= self.width as i64 || j >= self.height as i64 {
                            continue;
                        }
                        let idx = self.index(i as usize, j as usize);
                        if mask.bits[idx] {
                            continue;
                        }
                        if p.nearest(self.center(i as usize, j as usize)).1 <= half_diag {
                            mask.bits[idx] = true;
                        }
                    }
                }
            }
        }
        mask
    }

    /// Exact Euclidean distance from every cell centre to the nearest seed cell.
    pub fn distance_to(&self, seeds: &GridMask) -> ClearanceField {
        let (w, h) = (self.width, self.height);
        let mut g: Vec<f64> = seeds.bits.iter().map(|&b| if b { 0.0 } else { FAR }).collect();
        let n = w.max(h);
        let mut f = vec![0.0; n];
        let mut d = vec![0.0; n];
        let mut v = vec![0usize; n];
        let mut z = vec![0.0; n + 1];
        for i in 0..w {
            for j in 0..h {
                f[j] = g[j * w + i];
            }
            edt_1d(&f[..h], &mut d[..h], &mut v, &mut z);
            for j in 0..h {
                g[j * w + i] = d[j];
            }
        }
        for j in 0..h {
            let row = &mut g[j * w..(j + 1) * w];
            f[..w].copy_from_slice(row);
            edt_1d(&f[..w], &mut d[..w], &mut v, &mut z);
            row.copy_from_slice(&d[..w]);
        }
        let cell = self.cell;
        ClearanceField {
            spec: *self,
            values: g
                .into_iter()
                .map(|x| if x >= FAR { f64::INFINITY } else { x.sqrt() * cell })
                .collect(),
        }
    }
}

/// One-dimensional squared distance transform of a sampled function
/// (lower envelope of parabolas).
fn edt_1d(f: &[f64], d: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    let mut k = 0usize;
    v[0] = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        let fq = f[q] + (q * q) as f64;
        let mut s;
        loop {
            let p = v[k];
            s = (fq - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k] && k > 0 {
                k -= 1;
            } else {
                break;
            }
        }
        if s <= z[k] {
            v[k] = q;
            z[k + 1] = f64::INFINITY;
        } else {
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
        }
    }
    let mut k = 0usize;
    for (q, out) in d.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        *out = (dq * dq + f[v[k]]).min(FAR);
    }
}

impl GridMask {
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[self.spec.index(i, j)]
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.spec.cell * self.spec.cell
    }

    pub fn at(&self, p: Point2) -> bool {
        self.spec.cell_of(p).is_some_and(|(i, j)| self.get(i, j))
    }

    pub fn complement(&self) -> GridMask {
        GridMask {
            spec: self.spec,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn and(&self, other: &GridMask) -> GridMask {
        self.zip(other, |a, b| a && b)
    }

    pub fn or(&self, other: &GridMask) -> GridMask {
        self.zip(other, |a, b| a || b)
    }

    pub fn and_not(&self, other: &GridMask) -> GridMask {
        self.zip(other, |a, b| a && !b)
    }

    fn zip(&self, other: &GridMask, f: impl Fn(bool, bool) -> bool) -> GridMask {
        assert_eq!(self.spec, other.spec, "masks on different grids");
        GridMask {
            spec: self.spec,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// 4-connected components, ordered by their first cell.
    pub fn components(&self) -> Vec<GridMask> {
        let (w, h) = (self.spec.width, self.spec.height);
        let mut label = vec![usize::MAX; self.bits.len()];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for start in 0..self.bits.len() {
            if !self.bits[start] || label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut comp = self.spec.empty_mask();
            label[start] = id;
            stack.push(start);
            while let Some(c) = stack.pop() {
                comp.bits[c] = true;
                let (i, j) = (c % w, c / w);
                let mut visit = |n: usize| {
                    if self.bits[n] && label[n] == usize::MAX {
                        label[n] = id;
                        stack.push(n);
                    }
                };
                if i > 0 {
                    visit(c - 1);
                }
                if i + 1 < w {
                    visit(c + 1);
                }
                if j > 0 {
                    visit(c - w);
                }
                if j + 1 < h {
                    visit(c + w);
                }
            }
            out.push(comp);
        }
        out
    }

    /// Binary portable graymap, inside cells white, top row first.
    pub fn write_pgm(&self, path: &Path) -> Result<(), OracleError> {
        let pixels: Vec<u8> = self
            .rows_top_down()
            .map(|idx| if self.bits[idx] { 255 } else { 0 })
            .collect();
        write_pgm(path, self.spec.width, self.spec.height, &pixels)
    }

    fn rows_top_down(&self) -> impl Iterator<Item = usize> + '_ {
        let (w, h) = (self.spec.width, self.spec.height);
        (0..h).rev().flat_map(move |j| (0..w).map(move |i| j * w + i))
    }
}

impl ClearanceField {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.index(i, j)]
    }

    pub fn at(&self, p: Point2) -> f64 {
        self.spec.cell_of(p).map_or(0.0, |(i, j)| self.get(i, j))
    }

    /// Largest finite value among the masked cells.
    pub fn max_over(&self, mask: &GridMask) -> f64 {
        self.values
            .iter()
            .zip(&mask.bits)
            .filter(|(v, &b)| b && v.is_finite())
            .map(|(v, _)| *v)
            .fold(0.0, f64::max)
    }

    /// Cells of `mask` with clearance at least `threshold`.
    pub fn at_least(&self, mask: &GridMask, threshold: f64) -> GridMask {
        GridMask {
            spec: self.spec,
            bits: self
                .values
                .iter()
                .zip(&mask.bits)
                .map(|(&v, &b)| b && v >= threshold)
                .collect(),
        }
    }

    /// Cells with clearance at most `threshold`.
    pub fn at_most(&self, threshold: f64) -> GridMask {
        GridMask {
            spec: self.spec,
            bits: self.values.iter().map(|&v| v <= threshold).collect(),
        }
    }

    /// Graymap scaled so the largest finite value is white.
    pub fn write_pgm(&self, path: &Path) -> Result<(), OracleError> {
        let max = self
            .values
            .iter()
            .filter(|v| v.is_finite())
            .fold(0.0f64, |a, &b| a.max(b))
            .max(1e-300);
        let (w, h) = (self.spec.width, self.spec.height);
        let pixels: Vec<u8> = (0..h)
            .rev()
            .flat_map(|j| (0..w).map(move |i| j * w + i))
            .map(|idx| {
                let v = self.values[idx];
                if v.is_finite() {
                    (v / max * 255.0).round() as u8
                } else {
                    255
                }
            })
            .collect();
        write_pgm(path, w, h, &pixels)
    }
}

fn write_pgm(path: &Path, w: usize, h: usize, pixels: &[u8]) -> Result<(), OracleError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write!(f, "P5\n{w} {h}\n255\n")?;
    f.write_all(pixels)?;
    Ok(())
}

/// Inside cells of the loop (non-zero winding at the cell centre).
pub fn rasterize(l: &Loop, cell: f64) -> Result<GridMask, OracleError> {
    let spec = GridSpec::for_loop(l, cell)?;
    Ok(spec.fill_parts(l.monotone_parts()))
}

/// Clearance field of the loop's boundary cells.
pub fn distance_transform(l: &Loop, spec: &GridSpec) -> ClearanceField {
    spec.distance_to(&spec.boundary(l.prims()))
}

/// Cells of the side's open region on the loop's grid.
pub fn side_mask(l: &Loop, spec: &GridSpec, side: Side) -> GridMask {
    let inside = spec.fill_parts(l.monotone_parts());
    match side {
        Side::Internal => inside,
        Side::External => inside.complement(),
    }
}

/// Raster disk-fit check: every boundary sample's offset point must lie on
/// the side with clearance at least `r - 2 * cell`.
pub fn oracle_rolling(l: &Loop, side: Side, cell: f64) -> Result<OracleVerdict, OracleError> {
    let spec = GridSpec::for_loop(l, cell)?;
    let field = distance_transform(l, &spec);
    let r = l.r();
    let threshold = r - 2.0 * cell;
    let n = (l.length() / cell).ceil() as usize;
    let mut failures = Vec::new();
    let mut min_clearance = f64::INFINITY;
    let sign = match side {
        Side::Internal => 1.0,
        Side::External => -1.0,
    };
    for k in 0..n {
        let t = l.length() * k as f64 / n as f64;
        let fr = l.frame_at(t);
        let p = fr.point + fr.normal * (sign * r);
        let inside = winding_from_parts(l.monotone_parts(), p) != 0;
        let on_side = inside == (side == Side::Internal);
        let clearance = if on_side { field.at(p) } else { 0.0 };
        min_clearance = min_clearance.min(clearance);
        if clearance < threshold {
            failures.push(OracleFailure { t, clearance });
        }
    }
    Ok(OracleVerdict {
        holds: failures.is_empty(),
        failures,
        min_clearance,
        cell,
    })
}

/// Opening of a side region by a radius-`r` disk, computed from a clearance
/// field restricted to `region`.
pub fn opening(field: &ClearanceField, region: &GridMask, r: f64) -> GridMask {
    let cell = field.spec.cell;
    let centers = field.at_least(region, r - 2.0 * cell);
    let reach = field.spec.distance_to(&centers);
    reach.at_most(r).and(region)
}

/// Connected components of the opening of the side region.
pub fn opening_components(l: &Loop, side: Side, cell: f64) -> Result<Vec<GridMask>, OracleError> {
    let spec = GridSpec::for_loop(l, cell)?;
    let region = side_mask(l, &spec, side);
    let field = distance_transform(l, &spec);
    Ok(opening(&field, &region, l.r()).components())
}
