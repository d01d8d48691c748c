//! Grid scalar fields with cut-cell aware difference operators.
//!
//! Exterior nodes hold a NaN sentinel; operators route every neighbor access
//! through the mask so the sentinel is never read. Near the boundary band the
//! gradient falls back to the nonuniform three-point formula anchored at the
//! Dirichlet cut value.

use crate::domain::MAX_DIM;
use crate::grid::{CartesianGrid, DomainMask, NodeClass};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FieldError {
    #[error("operation requested at exterior node {0}")]
    ExteriorNode(usize),
}

#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<CartesianGrid>,
    mask: Arc<DomainMask>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Arc<CartesianGrid>, mask: Arc<DomainMask>) -> Self {
        let mut values = vec![f64::NAN; grid.len()];
        for &idx in mask.inside_nodes() {
            values[idx as usize] = 0.0;
        }
        Self { grid, mask, values }
    }

    /// Sample an expression at node positions; exterior nodes keep the sentinel.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(
        grid: Arc<CartesianGrid>,
        mask: Arc<DomainMask>,
        f: F,
    ) -> Self {
        let mut values = vec![f64::NAN; grid.len()];
        let dim = grid.dim();
        for &idx in mask.inside_nodes() {
            let p = grid.position(idx as usize);
            values[idx as usize] = f(&p[..dim]);
        }
        Self { grid, mask, values }
    }

    pub fn from_values(
        grid: Arc<CartesianGrid>,
        mask: Arc<DomainMask>,
        values: Vec<f64>,
    ) -> Self {
        assert_eq!(values.len(), grid.len());
        Self { grid, mask, values }
    }

    #[inline]
    pub fn grid(&self) -> &Arc<CartesianGrid> {
        &self.grid
    }

    #[inline]
    pub fn mask(&self) -> &Arc<DomainMask> {
        &self.mask
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn value(&self, idx: usize) -> f64 {
        debug_assert!(self.mask.is_inside(idx), "sentinel read at node {idx}");
        self.values[idx]
    }

    /// Value at a neighbor for stencil purposes: the true value when the
    /// neighbor is inside, otherwise the ghost extrapolation through the
    /// Dirichlet zero at the cut point.
    #[inline]
    pub fn neighbor_value(&self, idx: usize, axis: usize, dir: usize) -> f64 {
        let stride = self.grid.stride(axis);
        let nb = if dir == 0 { idx - stride } else { idx + stride };
        if self.mask.class(nb) != NodeClass::Exterior {
            self.values[nb]
        } else {
            let theta = self.mask.cut(idx, axis, dir);
            self.values[idx] * (theta - 1.0) / theta
        }
    }

    pub fn max_inside(&self) -> f64 {
        self.mask
            .inside_nodes()
            .iter()
            .map(|&i| self.values[i as usize])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_inside(&self) -> f64 {
        self.mask
            .inside_nodes()
            .iter()
            .map(|&i| self.values[i as usize])
            .fold(f64::INFINITY, f64::min)
    }

    /// Sup-norm of the difference over shared (identical) masks.
    pub fn sup_diff(&self, other: &ScalarField) -> f64 {
        assert_eq!(self.grid.len(), other.grid.len());
        self.mask
            .inside_nodes()
            .iter()
            .map(|&i| (self.values[i as usize] - other.values[i as usize]).abs())
            .fold(0.0, f64::max)
    }

    pub fn sup_norm(&self) -> f64 {
        self.mask
            .inside_nodes()
            .iter()
            .map(|&i| self.values[i as usize].abs())
            .fold(0.0, f64::max)
    }

    /// Gradient by central differences; at band nodes the nonuniform
    /// three-point formula anchored at the cut value 0 is used instead.
    pub fn fd_gradient(&self, idx: usize) -> Result<[f64; MAX_DIM], FieldError> {
        if !self.mask.is_inside(idx) {
            return Err(FieldError::ExteriorNode(idx));
        }
        let dim = self.grid.dim();
        let h = self.grid.spacing();
        let uc = self.values[idx];
        let mut g = [0f64; MAX_DIM];
        for axis in 0..dim {
            let stride = self.grid.stride(axis);
            let minus_in = self.mask.class(idx - stride) != NodeClass::Exterior;
            let plus_in = self.mask.class(idx + stride) != NodeClass::Exterior;
            g[axis] = if minus_in && plus_in {
                (self.values[idx + stride] - self.values[idx - stride]) / (2.0 * h)
            } else {
                let (a, um) = if minus_in {
                    (h, self.values[idx - stride])
                } else {
                    (self.mask.cut(idx, axis, 0) * h, 0.0)
                };
                let (b, up) = if plus_in {
                    (h, self.values[idx + stride])
                } else {
                    (self.mask.cut(idx, axis, 1) * h, 0.0)
                };
                (a * a * up - b * b * um + (b * b - a * a) * uc) / (a * b * (a + b))
            };
        }
        Ok(g)
    }

    /// Midpoint rule over inside nodes with cut-cell weights on the band.
    pub fn integrate_interior(&self) -> f64 {
        let dim = self.grid.dim();
        let cell = self.grid.spacing().powi(dim as i32);
        let mut sum = 0.0;
        for &idx in self.mask.inside_nodes() {
            let idx = idx as usize;
            sum += self.values[idx] * self.mask.volume_weight(idx, dim);
        }
        sum * cell
    }

    /// Integral of |∇u| over the domain, the left side of the coarea identity.
    pub fn integrate_gradient_norm(&self) -> f64 {
        let dim = self.grid.dim();
        let cell = self.grid.spacing().powi(dim as i32);
        let mut sum = 0.0;
        for &idx in self.mask.inside_nodes() {
            let idx = idx as usize;
            let g = self.fd_gradient(idx).expect("inside node");
            let mag = g[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
            sum += mag * self.mask.volume_weight(idx, dim);
        }
        sum * cell
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::DomainSpec;
    use crate::grid::build_grid;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn ball_field<F: Fn(&[f64]) -> f64>(res: u32, f: F) -> ScalarField {
        let spec = DomainSpec::ball(&[0.0, 0.0], 1.0).unwrap();
        let (grid, mask) = build_grid(&spec, res).unwrap();
        ScalarField::from_fn(Arc::new(grid), Arc::new(mask), f)
    }

    #[test]
    fn gradient_exact_on_affine() {
        let u = ball_field(32, |p| 3.0 * p[0] + 2.0 * p[1]);
        for &idx in u.mask().inside_nodes() {
            let idx = idx as usize;
            if u.mask().class(idx) != NodeClass::Interior {
                continue;
            }
            let g = u.fd_gradient(idx).unwrap();
            assert!((g[0] - 3.0).abs() < 1e-12 && (g[1] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_symmetry_and_quadratic() {
        let u = ball_field(64, |p| p[0] * p[0]);
        let grid = u.grid().clone();
        // Center node: derivative of x^2 at x=0 vanishes by symmetry.
        let c = grid.index(&[66, 66]);
        let g = u.fd_gradient(c).unwrap();
        assert!(g[0].abs() < 1e-13);

        // r^2/2 has exact central differences (quadratic), error ≤ 1e-3 at (0.5, 0).
        let u = ball_field(64, |p| 0.5 * (p[0] * p[0] + p[1] * p[1]));
        let target = grid.index(&[98, 66]);
        let p = grid.position(target);
        assert!((p[0] - 0.5).abs() < 1e-12 && p[1].abs() < 1e-12);
        let g = u.fd_gradient(target).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-3 && g[1].abs() < 1e-3);
    }

    #[test]
    fn gradient_rejected_outside() {
        let u = ball_field(32, |_| 1.0);
        let corner = 0usize;
        assert_eq!(u.fd_gradient(corner), Err(FieldError::ExteriorNode(0)));
    }

    #[test]
    fn integrate_constant_matches_area() {
        let u = ball_field(128, |_| 1.0);
        let area = u.integrate_interior();
        assert!((area - PI).abs() < 0.01 * PI, "area {area}");

        let spec = DomainSpec::ellipsoid(&[0.0, 0.0], &[1.0, 0.5]).unwrap();
        let (grid, mask) = build_grid(&spec, 128).unwrap();
        let u = ScalarField::from_fn(Arc::new(grid), Arc::new(mask), |_| 1.0);
        let area = u.integrate_interior();
        assert!((area - PI / 2.0).abs() < 0.01 * PI / 2.0, "area {area}");
    }

    #[test]
    fn integrate_zero_is_zero() {
        let u = ball_field(32, |_| 0.0);
        assert_eq!(u.integrate_interior(), 0.0);
    }

    #[test]
    fn gradient_error_halves_with_h() {
        // Observed convergence of order ≥ 1 for u = r²/2 on the unit ball.
        let mut errs = Vec::new();
        for res in [32u32, 64, 128] {
            let u = ball_field(res, |p| 0.5 * (p[0] * p[0] + p[1] * p[1]));
            let mut worst = 0f64;
            for &idx in u.mask().inside_nodes() {
                let idx = idx as usize;
                let p = u.grid().position(idx);
                let g = u.fd_gradient(idx).unwrap();
                let err = ((g[0] - p[0]).powi(2) + (g[1] - p[1]).powi(2)).sqrt();
                worst = worst.max(err);
            }
            errs.push(worst);
        }
        assert!(errs[1] <= errs[0] / 1.9 && errs[2] <= errs[1] / 1.9, "errors {errs:?}");
    }

    proptest! {
        #[test]
        fn integration_is_monotone(lo in -1.0f64..1.0, gap in 0.0f64..1.0) {
            let u = ball_field(16, |_| lo);
            let v = ball_field(16, |_| lo + gap);
            prop_assert!(u.integrate_interior() <= v.integrate_interior() + 1e-12);
        }

        #[test]
        fn gradient_affine_random(a in -5.0f64..5.0, b in -5.0f64..5.0) {
            let u = ball_field(16, |p| a * p[0] + b * p[1]);
            for &idx in u.mask().inside_nodes() {
                let idx = idx as usize;
                if u.mask().class(idx) != NodeClass::Interior { continue; }
                let g = u.fd_gradient(idx).unwrap();
                prop_assert!((g[0] - a).abs() < 1e-10 && (g[1] - b).abs() < 1e-10);
            }
        }
    }
}
