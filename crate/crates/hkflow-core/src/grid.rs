//! Uniform Cartesian grids and cut-cell node classification.
//!
//! The grid covers the domain bounding box padded by two cells so every node
//! with `d < 0` has a full stencil in bounds. Nodes are classified as
//! interior, boundary-band (inside but adjacent to an exterior node) or
//! exterior; band nodes carry the linear-interpolated cut fraction to the
//! zero crossing of `d` along each axis, which is where Dirichlet data lives.

use crate::domain::{DomainSpec, MAX_DIM};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("resolution {0} below the minimum of 16")]
    ResolutionTooSmall(u32),
    #[error("grid would be degenerate along axis {0}")]
    DegenerateExtent(usize),
    #[error("domain contains no grid nodes at this resolution")]
    EmptyDomain,
}

/// Cut fractions below this are clamped; keeps ghost extrapolation bounded.
pub const THETA_MIN: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum NodeClass {
    Interior,
    BoundaryBand,
    Exterior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CartesianGrid {
    dim: usize,
    counts: [usize; MAX_DIM],
    spacing: f64,
    origin: [f64; MAX_DIM],
    strides: [usize; MAX_DIM],
    len: usize,
}

impl CartesianGrid {
    pub fn new(dim: usize, counts: &[usize], spacing: f64, origin: &[f64]) -> Self {
        assert!((2..=MAX_DIM).contains(&dim));
        assert!(spacing > 0.0);
        let mut c = [1usize; MAX_DIM];
        let mut o = [0f64; MAX_DIM];
        c[..dim].copy_from_slice(&counts[..dim]);
        o[..dim].copy_from_slice(&origin[..dim]);
        for a in 0..dim {
            assert!(c[a] >= 3, "counts must be at least 3 per axis");
        }
        let mut strides = [0usize; MAX_DIM];
        let mut len = 1usize;
        for a in 0..dim {
            strides[a] = len;
            len *= c[a];
        }
        Self {
            dim,
            counts: c,
            spacing,
            origin: o,
            strides,
            len,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn counts(&self) -> &[usize] {
        &self.counts[..self.dim]
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    #[inline]
    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    #[inline]
    pub fn index(&self, multi: &[usize]) -> usize {
        let mut idx = 0;
        for a in 0..self.dim {
            debug_assert!(multi[a] < self.counts[a]);
            idx += multi[a] * self.strides[a];
        }
        idx
    }

    #[inline]
    pub fn multi(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut m = [0usize; MAX_DIM];
        for a in 0..self.dim {
            m[a] = idx % self.counts[a];
            idx /= self.counts[a];
        }
        m
    }

    #[inline]
    pub fn position(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi(idx);
        let mut p = [0f64; MAX_DIM];
        for a in 0..self.dim {
            p[a] = self.origin[a] + m[a] as f64 * self.spacing;
        }
        p
    }

    /// Neighbor index along `axis`; `dir` is 0 for minus, 1 for plus.
    /// Returns `None` at the grid edge.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, dir: usize) -> Option<usize> {
        let m = self.multi(idx);
        if dir == 0 {
            if m[axis] == 0 {
                return None;
            }
            Some(idx - self.strides[axis])
        } else {
            if m[axis] + 1 >= self.counts[axis] {
                return None;
            }
            Some(idx + self.strides[axis])
        }
    }
}

/// Per-node classification plus cut-distance data for band nodes.
#[derive(Debug, Clone)]
pub struct DomainMask {
    class: Vec<NodeClass>,
    /// Index into `cuts`, `u32::MAX` when the node has no cut edge.
    cut_idx: Vec<u32>,
    /// Cut fraction θ ∈ (0, 1] per (axis, dir); 1.0 where the neighbor is inside.
    cuts: Vec<[f64; 2 * MAX_DIM]>,
    /// Grid indices of all non-exterior nodes, ascending.
    inside: Vec<u32>,
    interior_count: usize,
}

impl DomainMask {
    #[inline]
    pub fn class(&self, idx: usize) -> NodeClass {
        self.class[idx]
    }

    #[inline]
    pub fn classes(&self) -> &[NodeClass] {
        &self.class
    }

    #[inline]
    pub fn is_inside(&self, idx: usize) -> bool {
        self.class[idx] != NodeClass::Exterior
    }

    /// All non-exterior node indices in grid order.
    #[inline]
    pub fn inside_nodes(&self) -> &[u32] {
        &self.inside
    }

    pub fn interior_count(&self) -> usize {
        self.interior_count
    }

    /// Cut fraction toward the (axis, dir) neighbor; 1.0 when that neighbor
    /// is inside. Only meaningful for non-exterior `idx`.
    #[inline]
    pub fn cut(&self, idx: usize, axis: usize, dir: usize) -> f64 {
        let c = self.cut_idx[idx];
        if c == u32::MAX {
            1.0
        } else {
            self.cuts[c as usize][axis * 2 + dir]
        }
    }

    /// Fraction of the dual cell around a node lying inside Ω, used as the
    /// cut-cell weight of the midpoint rule.
    pub fn volume_weight(&self, idx: usize, dim: usize) -> f64 {
        let c = self.cut_idx[idx];
        if c == u32::MAX {
            return 1.0;
        }
        let cuts = &self.cuts[c as usize];
        let mut w = 1.0;
        for a in 0..dim {
            w *= cuts[a * 2].min(0.5) + cuts[a * 2 + 1].min(0.5);
        }
        w
    }
}

/// Build the padded grid and classify nodes for `spec` at `resolution`
/// nodes per unit length (`h = 1/resolution`).
pub fn build_grid(spec: &DomainSpec, resolution: u32) -> Result<(CartesianGrid, DomainMask), GridError> {
    if resolution < 16 {
        return Err(GridError::ResolutionTooSmall(resolution));
    }
    let h = 1.0 / f64::from(resolution);
    let dim = spec.dim();
    let (lo, hi) = spec.bbox();
    let mut counts = [1usize; MAX_DIM];
    let mut origin = [0f64; MAX_DIM];
    for a in 0..dim {
        let span = hi[a] - lo[a];
        if !(span > 0.0) {
            return Err(GridError::DegenerateExtent(a));
        }
        origin[a] = lo[a] - 2.0 * h;
        counts[a] = (span / h + 1e-9).ceil() as usize + 4 + 1;
    }
    let grid = CartesianGrid::new(dim, &counts[..dim], h, &origin[..dim]);
    let mask = classify(&grid, |x| spec.signed_distance(x))?;
    Ok((grid, mask))
}

/// Classify every node of `grid` against a signed distance closure.
/// Exposed separately so synthetic grids (e.g. slab extensions) can reuse it.
pub fn classify<F: Fn(&[f64]) -> f64>(
    grid: &CartesianGrid,
    sdf: F,
) -> Result<DomainMask, GridError> {
    let dim = grid.dim();
    let n = grid.len();
    let mut d = vec![0f64; n];
    for idx in 0..n {
        let p = grid.position(idx);
        d[idx] = sdf(&p[..dim]);
    }
    let mut class = vec![NodeClass::Exterior; n];
    let mut cut_idx = vec![u32::MAX; n];
    let mut cuts: Vec<[f64; 2 * MAX_DIM]> = Vec::new();
    let mut inside = Vec::new();
    let mut interior_count = 0usize;
    for idx in 0..n {
        if d[idx] >= 0.0 {
            continue;
        }
        let mut band = false;
        let mut cut = [1.0f64; 2 * MAX_DIM];
        for a in 0..dim {
            for dir in 0..2 {
                match grid.neighbor(idx, a, dir) {
                    Some(nb) if d[nb] >= 0.0 => {
                        band = true;
                        let theta = d[idx] / (d[idx] - d[nb]);
                        cut[a * 2 + dir] = theta.clamp(THETA_MIN, 1.0);
                    }
                    Some(_) => {}
                    None => {
                        // Padding guarantees inside nodes never touch the hull.
                        debug_assert!(false, "inside node on the grid hull");
                        band = true;
                        cut[a * 2 + dir] = THETA_MIN;
                    }
                }
            }
        }
        if band {
            class[idx] = NodeClass::BoundaryBand;
            cut_idx[idx] = cuts.len() as u32;
            cuts.push(cut);
        } else {
            class[idx] = NodeClass::Interior;
            interior_count += 1;
        }
        inside.push(idx as u32);
    }
    if inside.is_empty() {
        return Err(GridError::EmptyDomain);
    }
    Ok(DomainMask {
        class,
        cut_idx,
        cuts,
        inside,
        interior_count,
    })
}
