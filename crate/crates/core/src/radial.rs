//! Rotationally symmetric translators.
//!
//! With `u = u(r)` the translator equation becomes
//! `u'' / (1 + u'²) + u' / r = 1 + μ √(1 + u'²)`, where `μ = 0` is the plain
//! translator and `μ > 0` prescribes a constant weighted mean curvature.
//! The bowl starts at the removable singularity `r = 0`; winglike profiles
//! start at an inner radius with a horizontal tangent.

use crate::error::{Error, Result};
use serde::Serialize;

/// Quadrature points used by [`picard_bowl`].
pub const PICARD_POINTS: usize = 2048;

const BLOW_UP: f64 = 1e8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileKind {
    Bowl,
    Winglike { r0: f64 },
    MuRadial { mu: f64 },
}

/// Samples of `u(r)` and `u'(r)` on increasing radii.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialProfile {
    pub kind: ProfileKind,
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

impl RadialProfile {
    fn locate(&self, r: f64) -> Option<usize> {
        let n = self.r.len();
        if n < 2 || !(r >= self.r[0] && r <= self.r[n - 1]) {
            return None;
        }
        Some(match self.r.binary_search_by(|v| v.total_cmp(&r)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        })
    }

    /// Cubic Hermite interpolant of `u`; `None` outside the sampled range.
    pub fn eval(&self, r: f64) -> Option<f64> {
        let i = self.locate(r)?;
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let (t2, t3) = (t * t, t * t * t);
        Some(
            (2.0 * t3 - 3.0 * t2 + 1.0) * self.u[i]
                + (t3 - 2.0 * t2 + t) * h * self.du[i]
                + (-2.0 * t3 + 3.0 * t2) * self.u[i + 1]
                + (t3 - t2) * h * self.du[i + 1],
        )
    }

    /// Derivative of the Hermite interpolant.
    pub fn eval_du(&self, r: f64) -> Option<f64> {
        let i = self.locate(r)?;
        let (r0, r1) = (self.r[i], self.r[i + 1]);
        let h = r1 - r0;
        let t = (r - r0) / h;
        let t2 = t * t;
        Some(
            ((6.0 * t2 - 6.0 * t) * self.u[i] + (-6.0 * t2 + 6.0 * t) * self.u[i + 1]) / h
                + (3.0 * t2 - 4.0 * t + 1.0) * self.du[i]
                + (3.0 * t2 - 2.0 * t) * self.du[i + 1],
        )
    }

    pub fn end_radius(&self) -> f64 {
        *self.r.last().unwrap()
    }

    pub fn end_value(&self) -> f64 {
        *self.u.last().unwrap()
    }
}

/// Result of the fixed-point construction of the bowl near the origin.
#[derive(Clone, Debug)]
pub struct PicardSolution {
    pub profile: RadialProfile,
    /// C¹ sup-distance between consecutive iterates.
    pub distances: Vec<f64>,
    /// `sup |T u - u|` at the returned iterate.
    pub fixed_point_residual: f64,
}

fn cumulative_trapezoid(h: f64, f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in f.windows(2) {
        acc += 0.5 * h * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// One application of the operator `T` to the slope samples `v = u'`.
///
/// Returns the new `(u, u')` on the uniform grid `r`.
pub fn apply_bowl_operator(r: &[f64], v: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = r[1] - r[0];
    let inner: Vec<f64> = r.iter().zip(v).map(|(t, vi)| t / (1.0 + vi * vi).sqrt()).collect();
    let j = cumulative_trapezoid(h, &inner);
    let mut dv = Vec::with_capacity(r.len());
    for (i, (&s, &js)) in r.iter().zip(&j).enumerate() {
        let y = if i == 0 { 0.0 } else { js / s };
        if y.abs() >= 1.0 {
            return Err(Error::InverseDomain { radius: s, value: y });
        }
        dv.push(y / (1.0 - y * y).sqrt());
    }
    let u = cumulative_trapezoid(h, &dv);
    Ok((u, dv))
}

/// Bowl profile on `[0, delta]` as the fixed point of `T`, starting from `u = 0`.
pub fn picard_bowl(delta: f64, iterations: usize) -> Result<PicardSolution> {
    if !(delta > 0.0) || delta * delta / 4.0 + delta / 2.0 >= 1.0 {
        return Err(Error::BadParameter(format!("delta = {delta} violates the contraction bound")));
    }
    if iterations == 0 {
        return Err(Error::BadParameter("at least one iteration is required".into()));
    }
    let n = PICARD_POINTS;
    let h = delta / (n - 1) as f64;
    let r: Vec<f64> = (0..n).map(|i| i as f64 * h).collect();
    let mut u = vec![0.0; n];
    let mut v = vec![0.0; n];
    let mut distances = Vec::with_capacity(iterations);
    for it in 0..iterations {
        let (un, vn) = apply_bowl_operator(&r, &v)?;
        let d = c1_distance(&u, &v, &un, &vn);
        if let Some(&prev) = distances.last() {
            if d > prev && prev > 1e-14 {
                return Err(Error::NotContracting { iteration: it, previous: prev, current: d });
            }
        }
        distances.push(d);
        u = un;
        v = vn;
    }
    let (tu, _) = apply_bowl_operator(&r, &v)?;
    let fixed_point_residual = tu.iter().zip(&u).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    Ok(PicardSolution { profile: RadialProfile { kind: ProfileKind::Bowl, r, u, du: v }, distances, fixed_point_residual })
}

fn c1_distance(u: &[f64], v: &[f64], un: &[f64], vn: &[f64]) -> f64 {
    let du = u.iter().zip(un).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    let dv = v.iter().zip(vn).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    du + dv
}

/// `u''(0)` from a least-squares quadratic through the first `points` samples.
pub fn second_derivative_at_origin(p: &RadialProfile, points: usize) -> f64 {
    let k = points.min(p.r.len()).max(3);
    let scale = p.r[k - 1];
    let mut m = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for i in 0..k {
        let t = p.r[i] / scale;
        let phi = [1.0, t, t * t];
        for a in 0..3 {
            b[a] += phi[a] * p.u[i];
            for c in 0..3 {
                m[a][c] += phi[a] * phi[c];
            }
        }
    }
    let x = solve3(m, b);
    2.0 * x[2] / (scale * scale)
}

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for c in 0..3 {
        let piv = (c..3).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        b.swap(c, piv);
        for r in c + 1..3 {
            let f = m[r][c] / m[c][c];
            for k in c..3 {
                m[r][k] -= f * m[c][k];
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = [0.0; 3];
    for r in (0..3).rev() {
        let s: f64 = (r + 1..3).map(|k| m[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / m[r][r];
    }
    x
}

/// Taylor coefficients `(a, c4, c6)` of `u = a r² + c4 r⁴ + c6 r⁶` at the origin.
pub fn series_coefficients(mu: f64) -> (f64, f64, f64) {
    let s = 1.0 + mu;
    (s / 4.0, s * s * (1.0 + 2.0 * mu) / 128.0, s * s * s * (1.0 + 8.0 * mu + 9.0 * mu * mu) / 4608.0)
}

/// `u''` from the radial equation.
pub fn radial_rhs(r: f64, du: f64, mu: f64) -> f64 {
    let w = 1.0 + du * du;
    w * (1.0 + mu * w.sqrt() - du / r)
}

/// Integrates the radial equation from `(r0, u0, du0)` to `r_end` with RK4.
///
/// Requires `r0 > 0`. The samples start at `r0`.
pub fn integrate_radial(r0: f64, u0: f64, du0: f64, mu: f64, r_end: f64, step: f64) -> Result<RadialProfile> {
    if !(r0 > 0.0) || !(r_end > r0) || !(step > 0.0) {
        return Err(Error::BadParameter(format!("need 0 < r0 < r_end and step > 0 (r0={r0}, r_end={r_end})")));
    }
    let mut p = RadialProfile { kind: ProfileKind::Winglike { r0 }, r: vec![r0], u: vec![u0], du: vec![du0] };
    rk4_extend(&mut p, mu, r_end, step)?;
    Ok(p)
}

fn rk4_extend(p: &mut RadialProfile, mu: f64, r_end: f64, step: f64) -> Result<()> {
    let f = |r: f64, v: f64| radial_rhs(r, v, mu);
    let (start, mut u, mut v) = (p.end_radius(), p.end_value(), *p.du.last().unwrap());
    let mut r = start;
    let n = ((r_end - start) / step - 1e-9).ceil().max(0.0) as usize;
    for i in 0..n {
        // Radii come from the index so that the spacing does not drift.
        let next = if i + 1 == n { r_end } else { start + (i + 1) as f64 * step };
        let h = next - r;
        let k1v = f(r, v);
        let k1u = v;
        let k2v = f(r + h / 2.0, v + h / 2.0 * k1v);
        let k2u = v + h / 2.0 * k1v;
        let k3v = f(r + h / 2.0, v + h / 2.0 * k2v);
        let k3u = v + h / 2.0 * k2v;
        let k4v = f(r + h, v + h * k3v);
        let k4u = v + h * k3v;
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        r = next;
        if !v.is_finite() || v.abs() > BLOW_UP {
            return Err(Error::BlowUp { radius: r });
        }
        p.r.push(r);
        p.u.push(u);
        p.du.push(v);
    }
    Ok(())
}

fn from_origin(mu: f64, r_end: f64, step: f64, kind: ProfileKind) -> Result<RadialProfile> {
    if !(r_end > 0.0) {
        return Err(Error::BadParameter(format!("R must be positive, got {r_end}")));
    }
    if !(step > 0.0) || step > r_end / 100.0 {
        return Err(Error::StepTooLarge { step, limit: r_end / 100.0 });
    }
    let (a, c4, c6) = series_coefficients(mu);
    let mut p = RadialProfile { kind, r: Vec::new(), u: Vec::new(), du: Vec::new() };
    for i in 0..=10 {
        let r = i as f64 * step;
        let r2 = r * r;
        p.r.push(r);
        p.u.push(r2 * (a + r2 * (c4 + r2 * c6)));
        p.du.push(r * (2.0 * a + r2 * (4.0 * c4 + 6.0 * c6 * r2)));
    }
    rk4_extend(&mut p, mu, r_end, step)?;
    Ok(p)
}

/// The bowl `u(0) = u'(0) = 0` on `[0, R]`: series start on `[0, 10 step]`, then RK4.
pub fn bowl_profile(r_end: f64, step: f64) -> Result<RadialProfile> {
    from_origin(0.0, r_end, step, ProfileKind::Bowl)
}

/// Winglike profile with `u(r0) = u'(r0) = 0`, integrated outward to `R`.
pub fn winglike_profile(r0: f64, r_end: f64, step: f64) -> Result<RadialProfile> {
    if !(r0 > 0.0 && r0 < r_end) {
        return Err(Error::BadParameter(format!("need 0 < r0 < R, got r0={r0}, R={r_end}")));
    }
    integrate_radial(r0, 0.0, 0.0, 0.0, r_end, step)
}

/// Radial solution of the weighted equation with constant `mu`.
pub fn mu_radial_profile(mu: f64, r_end: f64, step: f64) -> Result<RadialProfile> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::BadParameter(format!("mu must be non-negative, got {mu}")));
    }
    if mu > 0.0 && mu <= 0.5 && r_end >= 1.0 / mu {
        return Err(Error::BadParameter(format!("R = {r_end} must be below 1/mu = {}", 1.0 / mu)));
    }
    from_origin(mu, r_end, step, ProfileKind::MuRadial { mu })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picard_fixes_origin() {
        let s = picard_bowl(0.2, 30).unwrap();
        assert_eq!(s.profile.u[0], 0.0);
        assert_eq!(s.profile.du[0], 0.0);
        assert!(s.fixed_point_residual < 1e-12);
    }

    #[test]
    fn picard_rejects_large_delta() {
        assert!(picard_bowl(1.3, 5).is_err());
        assert!(picard_bowl(0.2, 0).is_err());
    }

    #[test]
    fn step_guard() {
        assert!(matches!(bowl_profile(1.0, 0.02), Err(Error::StepTooLarge { .. })));
    }

    #[test]
    fn winglike_start() {
        let p = winglike_profile(1.0, 3.0, 1e-3).unwrap();
        assert_eq!(p.du[0], 0.0);
        assert_eq!(p.kind, ProfileKind::Winglike { r0: 1.0 });
    }

    #[test]
    fn mu_guard() {
        assert!(matches!(mu_radial_profile(0.5, 2.0, 1e-3), Err(Error::BadParameter(_))));
        assert!(mu_radial_profile(-0.1, 1.0, 1e-3).is_err());
    }

    #[test]
    fn hermite_reproduces_samples() {
        let p = bowl_profile(1.0, 1e-2).unwrap();
        for i in [0, 5, 50, 100] {
            assert!((p.eval(p.r[i]).unwrap() - p.u[i]).abs() < 1e-15);
        }
        assert!(p.eval(1.5).is_none());
    }
}
