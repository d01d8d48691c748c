//! Domain descriptions via signed distance functions.
//!
//! Every shape exposes a signed distance `d(x)` that is negative inside,
//! positive outside and (at least numerically) 1-Lipschitz. The boundary
//! mean-curvature check samples `H` on `{d = 0}` because the monotonicity
//! theory assumes a mean-convex initial boundary; shapes that fail are still
//! usable but carry a mark that downstream reports propagate.

use thiserror::Error;

pub const MAX_DIM: usize = 4;

#[derive(Debug, Error, PartialEq)]
pub enum DomainError {
    #[error("shape parameter must be positive, got {0}")]
    NonPositiveParameter(f64),
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not strictly convex near vertex {0}")]
    NotConvex(usize),
    #[error("dumbbell lobe centers coincide")]
    CoincidentCenters,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// Round ball, any supported dimension.
    Ball { center: Vec<f64>, radius: f64 },
    /// Axis-aligned ellipse (2D) or ellipsoid (3D).
    Ellipsoid { center: Vec<f64>, semi_axes: Vec<f64> },
    /// Two balls joined by a smooth-min neck (3D test shape for nonconvexity).
    Dumbbell {
        centers: [Vec<f64>; 2],
        radii: [f64; 2],
    },
    /// Convex polygon, 2D only, counter-clockwise vertex list.
    ConvexPolygon { vertices: Vec<[f64; 2]> },
}

/// Analytic domain Ω with signed distance access.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    shape: Shape,
    dim: usize,
    /// Smooth-min sharpness for the dumbbell; unused for other shapes.
    lse_beta: f64,
}

impl DomainSpec {
    pub fn ball(center: &[f64], radius: f64) -> Result<Self, DomainError> {
        if !(radius > 0.0) {
            return Err(DomainError::NonPositiveParameter(radius));
        }
        Ok(Self {
            dim: center.len(),
            shape: Shape::Ball {
                center: center.to_vec(),
                radius,
            },
            lse_beta: 0.0,
        })
    }

    pub fn ellipsoid(center: &[f64], semi_axes: &[f64]) -> Result<Self, DomainError> {
        for &a in semi_axes {
            if !(a > 0.0) {
                return Err(DomainError::NonPositiveParameter(a));
            }
        }
        assert_eq!(center.len(), semi_axes.len());
        Ok(Self {
            dim: center.len(),
            shape: Shape::Ellipsoid {
                center: center.to_vec(),
                semi_axes: semi_axes.to_vec(),
            },
            lse_beta: 0.0,
        })
    }

    /// Two lobes blended by a log-sum-exp smooth minimum of the ball
    /// distances; sharpness 32 / diameter keeps the neck curvature resolvable.
    pub fn dumbbell(c1: &[f64], r1: f64, c2: &[f64], r2: f64) -> Result<Self, DomainError> {
        if !(r1 > 0.0) {
            return Err(DomainError::NonPositiveParameter(r1));
        }
        if !(r2 > 0.0) {
            return Err(DomainError::NonPositiveParameter(r2));
        }
        assert_eq!(c1.len(), c2.len());
        let sep: f64 = c1
            .iter()
            .zip(c2)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if sep == 0.0 {
            return Err(DomainError::CoincidentCenters);
        }
        let diameter = sep + r1 + r2;
        Ok(Self {
            dim: c1.len(),
            shape: Shape::Dumbbell {
                centers: [c1.to_vec(), c2.to_vec()],
                radii: [r1, r2],
            },
            lse_beta: 32.0 / diameter,
        })
    }

    pub fn convex_polygon(vertices: &[[f64; 2]]) -> Result<Self, DomainError> {
        if vertices.len() < 3 {
            return Err(DomainError::TooFewVertices(vertices.len()));
        }
        // Normalize to counter-clockwise, then demand strict left turns.
        let mut verts = vertices.to_vec();
        let area2: f64 = verts
            .iter()
            .zip(verts.iter().cycle().skip(1))
            .map(|(a, b)| a[0] * b[1] - b[0] * a[1])
            .sum();
        if area2 < 0.0 {
            verts.reverse();
        }
        let m = verts.len();
        for i in 0..m {
            let a = verts[i];
            let b = verts[(i + 1) % m];
            let c = verts[(i + 2) % m];
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cross <= 0.0 {
                return Err(DomainError::NotConvex((i + 1) % m));
            }
        }
        Ok(Self {
            dim: 2,
            shape: Shape::ConvexPolygon { vertices: verts },
            lse_beta: 0.0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Signed distance, negative inside Ω.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        match &self.shape {
            Shape::Ball { center, radius } => dist(x, center) - radius,
            Shape::Ellipsoid { center, semi_axes } => {
                // Scaled-radius form: not an exact SDF but smooth, correct
                // sign, and gradient magnitude within [b/a, a/b] of 1; the
                // Lipschitz sampling check bounds the effective constant.
                // Rescale by the max-axis to keep |∇d| ≤ ~1 outside.
                let mut q = 0.0;
                for i in 0..self.dim {
                    let t = (x[i] - center[i]) / semi_axes[i];
                    q += t * t;
                }
                let q = q.sqrt();
                let a_min = semi_axes.iter().cloned().fold(f64::INFINITY, f64::min);
                (q - 1.0) * a_min
            }
            Shape::Dumbbell { centers, radii } => {
                let d1 = dist(x, &centers[0]) - radii[0];
                let d2 = dist(x, &centers[1]) - radii[1];
                let beta = self.lse_beta;
                // Smooth minimum; ≤ min(d1, d2), inflating the union slightly.
                let m = d1.min(d2);
                m - (1.0 / beta) * ((-(d1 - m) * beta).exp() + (-(d2 - m) * beta).exp()).ln()
            }
            Shape::ConvexPolygon { vertices } => {
                let m = vertices.len();
                let mut dist_min = f64::INFINITY;
                let mut inside_max = f64::NEG_INFINITY;
                for i in 0..m {
                    let a = vertices[i];
                    let b = vertices[(i + 1) % m];
                    dist_min = dist_min.min(dist_to_segment(x, &a, &b));
                    // Outward normal of CCW edge (a, b) is (dy, -dx).
                    let ex = b[0] - a[0];
                    let ey = b[1] - a[1];
                    let len = (ex * ex + ey * ey).sqrt();
                    let s = ((x[0] - a[0]) * ey - (x[1] - a[1]) * ex) / len;
                    inside_max = inside_max.max(s);
                }
                if inside_max <= 0.0 {
                    -dist_min
                } else {
                    dist_min
                }
            }
        }
    }

    /// Axis-aligned bounding box of Ω as (lo, hi).
    pub fn bbox(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.shape {
            Shape::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Shape::Ellipsoid { center, semi_axes } => (
                center.iter().zip(semi_axes).map(|(c, a)| c - a).collect(),
                center.iter().zip(semi_axes).map(|(c, a)| c + a).collect(),
            ),
            Shape::Dumbbell { centers, radii } => {
                // The smooth-min inflates the union by at most ln(2)/beta.
                let pad = (2.0f64).ln() / self.lse_beta;
                let mut lo = vec![f64::INFINITY; self.dim];
                let mut hi = vec![f64::NEG_INFINITY; self.dim];
                for (c, r) in centers.iter().zip(radii) {
                    for i in 0..self.dim {
                        lo[i] = lo[i].min(c[i] - r - pad);
                        hi[i] = hi[i].max(c[i] + r + pad);
                    }
                }
                (lo, hi)
            }
            Shape::ConvexPolygon { vertices } => {
                let mut lo = vec![f64::INFINITY; 2];
                let mut hi = vec![f64::NEG_INFINITY; 2];
                for v in vertices {
                    for i in 0..2 {
                        lo[i] = lo[i].min(v[i]);
                        hi[i] = hi[i].max(v[i]);
                    }
                }
                (lo, hi)
            }
        }
    }

    /// Sampled check that the boundary has strictly positive mean curvature.
    ///
    /// Projects quasi-random points onto `{d = 0}` and evaluates
    /// `H = div(∇d/|∇d|)` by nested central differences. Returns the minimum
    /// sampled `H` and the pass flag (`H > 1e-6` everywhere). Flat polygon
    /// edges give `H ≈ 0` and fail, matching the theory's hypotheses.
    pub fn boundary_mean_curvature_check(&self, samples: usize) -> MeanConvexity {
        let (lo, hi) = self.bbox();
        let scale: f64 = lo
            .iter()
            .zip(&hi)
            .map(|(l, h)| h - l)
            .fold(0.0f64, f64::max);
        let delta = 1e-4 * scale;
        let mut min_h = f64::INFINITY;
        let mut count = 0usize;
        // Low-discrepancy lattice points over the bbox; deterministic.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut attempts = 0usize;
        while count < samples && attempts < samples * 20 {
            attempts += 1;
            let mut x = [0.0f64; MAX_DIM];
            for i in 0..self.dim {
                x[i] = lo[i] + (hi[i] - lo[i]) * next();
            }
            // Project to the boundary along the distance gradient.
            let mut ok = false;
            for _ in 0..8 {
                let d = self.signed_distance(&x[..self.dim]);
                if d.abs() < 1e-9 * scale {
                    ok = true;
                    break;
                }
                let g = self.fd_distance_gradient(&x, delta);
                let g2: f64 = g[..self.dim].iter().map(|v| v * v).sum();
                if g2 < 1e-12 {
                    break;
                }
                for i in 0..self.dim {
                    x[i] -= d * g[i] / g2;
                }
            }
            if !ok {
                continue;
            }
            count += 1;
            min_h = min_h.min(self.fd_mean_curvature(&x, delta));
        }
        MeanConvexity {
            samples: count,
            min_h,
            mean_convex: count > 0 && min_h > 1e-6,
        }
    }

    fn fd_distance_gradient(&self, x: &[f64; MAX_DIM], delta: f64) -> [f64; MAX_DIM] {
        let mut g = [0.0f64; MAX_DIM];
        let mut xp = *x;
        for i in 0..self.dim {
            xp[i] = x[i] + delta;
            let dp = self.signed_distance(&xp[..self.dim]);
            xp[i] = x[i] - delta;
            let dm = self.signed_distance(&xp[..self.dim]);
            xp[i] = x[i];
            g[i] = (dp - dm) / (2.0 * delta);
        }
        g
    }

    /// `div(∇d/|∇d|)` at `x` by nested central differences.
    fn fd_mean_curvature(&self, x: &[f64; MAX_DIM], delta: f64) -> f64 {
        let mut h = 0.0;
        let mut xp = *x;
        for i in 0..self.dim {
            xp[i] = x[i] + delta;
            let gp = self.fd_distance_gradient(&xp, delta);
            let np = normalize(&gp, self.dim);
            xp[i] = x[i] - delta;
            let gm = self.fd_distance_gradient(&xp, delta);
            let nm = normalize(&gm, self.dim);
            xp[i] = x[i];
            h += (np[i] - nm[i]) / (2.0 * delta);
        }
        h
    }

    /// Sampled 1-Lipschitz verification of the signed distance.
    pub fn max_lipschitz_ratio(&self, pairs: usize) -> f64 {
        let (lo, hi) = self.bbox();
        let pad: f64 = lo.iter().zip(&hi).map(|(l, h)| h - l).fold(0.0, f64::max) * 0.25;
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut worst: f64 = 0.0;
        for _ in 0..pairs {
            let mut a = vec![0.0; self.dim];
            let mut b = vec![0.0; self.dim];
            for i in 0..self.dim {
                a[i] = lo[i] - pad + (hi[i] - lo[i] + 2.0 * pad) * next();
                b[i] = lo[i] - pad + (hi[i] - lo[i] + 2.0 * pad) * next();
            }
            let sep = dist(&a, &b);
            if sep < 1e-12 {
                continue;
            }
            let da = self.signed_distance(&a);
            let db = self.signed_distance(&b);
            worst = worst.max((da - db).abs() / sep);
        }
        worst
    }
}

/// Result of the sampled boundary mean-curvature check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanConvexity {
    pub samples: usize,
    pub min_h: f64,
    pub mean_convex: bool,
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn normalize(g: &[f64; MAX_DIM], dim: usize) -> [f64; MAX_DIM] {
    let norm: f64 = g[..dim].iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut n = [0.0; MAX_DIM];
    for i in 0..dim {
        n[i] = g[i] / norm;
    }
    n
}

fn dist_to_segment(x: &[f64], a: &[f64; 2], b: &[f64; 2]) -> f64 {
    let abx = b[0] - a[0];
    let aby = b[1] - a[1];
    let apx = x[0] - a[0];
    let apy = x[1] - a[1];
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 {
        ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let dx = apx - t * abx;
    let dy = apy - t * aby;
    (dx * dx + dy * dy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_signed_distance_and_bbox() {
        let b = DomainSpec::ball(&[0.0, 0.0], 1.0).unwrap();
        assert_eq!(b.signed_distance(&[0.0, 0.0]), -1.0);
        assert!((b.signed_distance(&[2.0, 0.0]) - 1.0).abs() < 1e-15);
        let (lo, hi) = b.bbox();
        assert_eq!(lo, vec![-1.0, -1.0]);
        assert_eq!(hi, vec![1.0, 1.0]);
    }

    #[test]
    fn degenerate_shapes_rejected() {
        assert!(DomainSpec::ball(&[0.0, 0.0], 0.0).is_err());
        assert!(DomainSpec::ellipsoid(&[0.0, 0.0], &[1.0, 0.0]).is_err());
        assert!(DomainSpec::convex_polygon(&[[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn polygon_sign_convention() {
        let square = DomainSpec::convex_polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
            .unwrap();
        assert!(square.signed_distance(&[0.5, 0.5]) < 0.0);
        assert!((square.signed_distance(&[0.5, 0.5]) + 0.5).abs() < 1e-12);
        assert!(square.signed_distance(&[2.0, 0.5]) > 0.9);
        // Clockwise input is normalized, not rejected.
        let cw = DomainSpec::convex_polygon(&[[0.0, 1.0], [1.0, 1.0], [1.0, 0.0], [0.0, 0.0]])
            .unwrap();
        assert!(cw.signed_distance(&[0.5, 0.5]) < 0.0);
        // A reflex vertex is rejected.
        assert!(DomainSpec::convex_polygon(&[
            [0.0, 0.0],
            [2.0, 0.0],
            [1.0, 0.5],
            [2.0, 2.0],
            [0.0, 2.0]
        ])
        .is_err());
    }

    #[test]
    fn lipschitz_sampled() {
        for spec in [
            DomainSpec::ball(&[0.2, -0.1], 0.8).unwrap(),
            DomainSpec::ellipsoid(&[0.0, 0.0], &[1.0, 0.5]).unwrap(),
            DomainSpec::dumbbell(&[-0.6, 0.0, 0.0], 0.55, &[0.6, 0.0, 0.0], 0.55).unwrap(),
            DomainSpec::convex_polygon(&[[0.0, 0.0], [1.0, 0.0], [1.2, 0.9], [0.3, 1.4]]).unwrap(),
        ] {
            let ratio = spec.max_lipschitz_ratio(4000);
            assert!(ratio <= 1.0 + 1e-6, "ratio {ratio} for {:?}", spec.shape());
        }
    }

    #[test]
    fn mean_convexity_flags() {
        let ball = DomainSpec::ball(&[0.0, 0.0], 1.0).unwrap();
        let chk = ball.boundary_mean_curvature_check(500);
        assert!(chk.mean_convex, "{chk:?}");
        assert!((chk.min_h - 1.0).abs() < 1e-2, "circle curvature ~1, got {}", chk.min_h);

        let ell = DomainSpec::ellipsoid(&[0.0, 0.0], &[1.0, 0.5]).unwrap();
        assert!(ell.boundary_mean_curvature_check(500).mean_convex);

        // Flat polygon edges have zero curvature: marked, not rejected.
        let square = DomainSpec::convex_polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
            .unwrap();
        assert!(!square.boundary_mean_curvature_check(500).mean_convex);
    }

    #[test]
    fn dumbbell_neck_stays_mean_convex_in_3d() {
        // Overlapping lobes with a gentle neck: the sampled check must pass so
        // nonconvex 3D runs satisfy the mean-convex hypothesis.
        let db = DomainSpec::dumbbell(&[-0.5, 0.0, 0.0], 0.7, &[0.5, 0.0, 0.0], 0.7).unwrap();
        let chk = db.boundary_mean_curvature_check(2000);
        assert!(chk.mean_convex, "{chk:?}");
        // It is genuinely nonconvex: midpoint of the two far poles lies outside
        // the segment hull test would fail; check concavity via distance along x.
        let d_mid = db.signed_distance(&[0.0, 0.69, 0.0]);
        let d_lobe = db.signed_distance(&[0.5, 0.69, 0.0]);
        assert!(d_mid > d_lobe, "neck should be thinner than lobes");
    }
}
