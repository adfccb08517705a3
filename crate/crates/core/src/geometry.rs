//! The set of attainable n-th order invariants.
//!
//! For every `n >= 3` and every dimension `d >= 2` the attainable set is the
//! convex region bounded by the polar curve
//! `r_n(theta) = cos^n(pi/n) / cos^n((theta - pi)/n)`, `theta in [0, 2 pi]`.
//! The boundary is traced by single-parameter qubit tuples with invariant
//! `(t + (1-t) omega_n)^n`, and it is the image of the regular n-gon with
//! vertices at the n-th roots of unity under `w -> w^n`.
//!
//! For `n = 4` the two-parameter envelope family is naturally written in
//! `theta/2`, so it double-covers the plane over `theta in [0, 4 pi]`. The public
//! API always takes `theta in [0, 2 pi]` and lifts internally.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::circulant::root_of_unity;
use crate::error::{Error, Result};
use crate::invariants::bargmann;
use crate::linalg::{StateTuple, UnitVector};

const TWO_PI: f64 = 2.0 * PI;
const BRANCH_TOL: f64 = 1e-12;
const OBG_AGREEMENT: f64 = 1e-10;
const TAU_AGREEMENT: f64 = 1e-10;
const BISECTION_STEPS: usize = 80;
const SCAN_CELLS: usize = 256;

fn check_order(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::InvalidOrder(n));
    }
    Ok(())
}

/// Reduces an angle into `[0, 2 pi]`, keeping `2 pi` itself.
fn reduce_angle(theta: f64) -> f64 {
    if (0.0..=TWO_PI).contains(&theta) {
        theta
    } else {
        theta.rem_euclid(TWO_PI)
    }
}

/// `arg z` in `[0, 2 pi)`; angles within `BRANCH_TOL` below `2 pi` snap to 0.
pub fn principal_angle(z: Complex64) -> f64 {
    let a = z.arg().rem_euclid(TWO_PI);
    if TWO_PI - a <= BRANCH_TOL {
        0.0
    } else {
        a
    }
}

/// Query point for membership tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionQuery {
    pub n: usize,
    pub z: Complex64,
}

impl RegionQuery {
    pub fn new(n: usize, z: Complex64) -> Result<Self> {
        check_order(n)?;
        Ok(Self { n, z })
    }
}

/// One point of the boundary curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundarySample {
    pub theta: f64,
    pub r: f64,
    /// Parameter of the extremal qubit tuple attaining this point.
    pub t: f64,
}

impl BoundarySample {
    pub fn point(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// `r_n(theta) = cos^n(pi/n) sec^n((theta - pi)/n)`.
pub fn boundary_radius(n: usize, theta: f64) -> Result<f64> {
    check_order(n)?;
    let nf = n as f64;
    let theta = reduce_angle(theta);
    Ok(((PI / nf).cos() / ((theta - PI) / nf).cos()).powi(n as i32))
}

/// Boundary sampled at `theta_k = 2 pi k / points`, `k = 0..points`.
pub fn boundary_curve(n: usize, points: usize) -> Result<Vec<BoundarySample>> {
    check_order(n)?;
    if points == 0 {
        return Err(Error::InvalidParameter("points must be at least 1".into()));
    }
    (0..points)
        .map(|k| {
            let theta = TWO_PI * k as f64 / points as f64;
            Ok(BoundarySample {
                theta,
                r: boundary_radius(n, theta)?,
                t: theta_to_t(n, theta)?,
            })
        })
        .collect()
}

/// Whether `z` lies in the attainable region (within `tol` radially).
pub fn region_contains(query: &RegionQuery, tol: f64) -> Result<bool> {
    check_order(query.n)?;
    let modulus = query.z.norm();
    if modulus == 0.0 {
        return Ok(true);
    }
    let r = boundary_radius(query.n, principal_angle(query.z))?;
    Ok(modulus <= r + tol)
}

/// Extent of the region along the axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionBounds {
    /// `-cos^n(pi/n)`, the leftmost real point.
    pub min_real: f64,
    /// `cos^n(pi/n) sec^(n-1)(pi/(2(n-1)))`, the largest imaginary part.
    pub tau: f64,
    /// Angle where `r_n(theta) sin(theta)` peaks on `[0, pi]`.
    pub tau_angle: f64,
}

/// Closed-form bounds, with `tau` cross-checked against `r_n(theta) sin(theta)`
/// at its stationary point `theta = (n-2)/(n-1) * pi/2`.
pub fn region_bounds(n: usize) -> Result<RegionBounds> {
    check_order(n)?;
    let nf = n as f64;
    let c = (PI / nf).cos().powi(n as i32);
    let tau = c / (PI / (2.0 * (nf - 1.0))).cos().powi(n as i32 - 1);
    let tau_angle = (nf - 2.0) / (nf - 1.0) * PI / 2.0;
    let peak = boundary_radius(n, tau_angle)? * tau_angle.sin();
    if (peak - tau).abs() > TAU_AGREEMENT {
        return Err(Error::CrossCheck(format!(
            "tau closed form {tau} vs boundary peak {peak}"
        )));
    }
    Ok(RegionBounds {
        min_real: -c,
        tau,
        tau_angle,
    })
}

/// Qubit tuple `|psi_{k+1}> = sin(g)|0> + omega_n^k cos(g)|1>` with `sin^2(g) = t`.
pub fn obg_tuple(n: usize, t: f64) -> Result<StateTuple> {
    check_order(n)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidParameter(format!("t = {t} outside [0, 1]")));
    }
    let s = t.sqrt();
    let c = (1.0 - t).sqrt();
    let vectors = (0..n)
        .map(|k| UnitVector::normalized(vec![Complex64::new(s, 0.0), root_of_unity(n, k as i64) * c]))
        .collect::<Result<Vec<_>>>()?;
    StateTuple::from_pure(vectors)
}

/// `(t + (1-t) omega_n)^n`, verified against the invariant of [`obg_tuple`].
pub fn obg_invariant(n: usize, t: f64) -> Result<Complex64> {
    let tuple = obg_tuple(n, t)?;
    let closed = (Complex64::new(t, 0.0) + root_of_unity(n, 1) * (1.0 - t)).powu(n as u32);
    let dense = bargmann(&tuple)?.value;
    let gap = (closed - dense).norm();
    if gap > OBG_AGREEMENT {
        return Err(Error::CrossCheck(format!(
            "closed form and tuple invariant differ by {gap:e}"
        )));
    }
    Ok(closed)
}

/// `f_n(theta) = (1 - cot(pi/n) tan((theta - pi)/n)) / 2`, the extremal-tuple
/// parameter reaching boundary angle `theta`. Decreasing from 1 at 0 to 0 at `2 pi`.
pub fn theta_to_t(n: usize, theta: f64) -> Result<f64> {
    check_order(n)?;
    let nf = n as f64;
    let theta = reduce_angle(theta);
    let t = 0.5 * (1.0 - ((theta - PI) / nf).tan() / (PI / nf).tan());
    Ok(t.clamp(0.0, 1.0))
}

/// Whether `w` lies in the regular n-gon with vertices at the n-th roots of unity.
pub fn ngon_contains(n: usize, w: Complex64, tol: f64) -> Result<bool> {
    check_order(n)?;
    let nf = n as f64;
    let apothem = (PI / nf).cos();
    let u = Complex64::from_polar(1.0, PI / nf);
    Ok((0..n).all(|k| {
        let normal = root_of_unity(n, k as i64) * u;
        (normal.conj() * w).re <= apothem + tol
    }))
}

/// Value and t-derivative of the envelope family at `(r, theta, t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeResidual {
    pub f: f64,
    pub df_dt: f64,
}

/// Lifted angle used by the `n = 4` family: `theta` or `theta + 2 pi`,
/// whichever makes `cos(theta/2) >= 0`.
fn lift_half_angle(theta: f64) -> f64 {
    if (theta / 2.0).cos() < 0.0 {
        theta + TWO_PI
    } else {
        theta
    }
}

/// Envelope families whose envelope is the region boundary:
///
/// * `n = 3`: `F = r (1 - t cos theta) - t (1 - t^2) / 2`
/// * `n = 4`: `F = r (1 - t cos(theta/2))^2 - (1 - t^2)^2 / 4`
pub fn envelope_residual(n: usize, theta: f64, r: f64, t: f64) -> Result<EnvelopeResidual> {
    let theta = reduce_angle(theta);
    match n {
        3 => {
            let c = theta.cos();
            Ok(EnvelopeResidual {
                f: r * (1.0 - t * c) - t * (1.0 - t * t) / 2.0,
                df_dt: 0.5 * (3.0 * t * t - 2.0 * r * c - 1.0),
            })
        }
        4 => {
            let c = (lift_half_angle(theta) / 2.0).cos();
            let a = 1.0 - t * c;
            Ok(EnvelopeResidual {
                f: r * a * a - (1.0 - t * t).powi(2) / 4.0,
                df_dt: -2.0 * r * c * a + t * (1.0 - t * t),
            })
        }
        _ => Err(Error::UnsupportedOrder(n)),
    }
}

/// Envelope parameter located for a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeSolution {
    pub t: f64,
    pub residual: EnvelopeResidual,
}

/// Finds `t* in [0, 1]` with `dF/dt = 0` and the smallest `|F|`.
///
/// Sign changes of `dF/dt` are bracketed on a uniform scan and each bracket is
/// refined by 80 bisection steps; endpoint zeros count as roots.
pub fn locate_envelope_t(n: usize, theta: f64, r: f64) -> Result<EnvelopeSolution> {
    let eval = |t: f64| envelope_residual(n, theta, r, t);
    let mut candidates = Vec::new();
    let mut prev_t = 0.0;
    let mut prev = eval(0.0)?;
    if prev.df_dt == 0.0 {
        candidates.push(0.0);
    }
    for k in 1..=SCAN_CELLS {
        let t = k as f64 / SCAN_CELLS as f64;
        let cur = eval(t)?;
        if cur.df_dt == 0.0 {
            candidates.push(t);
        } else if prev.df_dt != 0.0 && prev.df_dt.signum() != cur.df_dt.signum() {
            let (mut lo, mut hi) = (prev_t, t);
            let lo_sign = prev.df_dt.signum();
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if eval(mid)?.df_dt.signum() == lo_sign {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            candidates.push(0.5 * (lo + hi));
        }
        prev_t = t;
        prev = cur;
    }
    // no stationary point: fall back to the endpoint with the smaller |F|
    if candidates.is_empty() {
        candidates.extend([0.0, 1.0]);
    }
    candidates
        .into_iter()
        .map(|t| eval(t).map(|residual| EnvelopeSolution { t, residual }))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .min_by(|a, b| a.residual.f.abs().total_cmp(&b.residual.f.abs()))
        .ok_or_else(|| Error::InvalidInput("no envelope candidate".into()))
}

/// The eliminated `n = 3` boundary relation
/// `8 cos^3(theta) r^3 + (12 cos^2(theta) - 27) r^2 + 6 cos(theta) r + 1`.
pub fn cubic_residual(theta: f64, r: f64) -> f64 {
    let c = theta.cos();
    8.0 * c.powi(3) * r.powi(3) + (12.0 * c * c - 27.0) * r * r + 6.0 * c * r + 1.0
}
