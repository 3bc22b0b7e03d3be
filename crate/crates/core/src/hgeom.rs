//! Hyperboloid-model geometry of `H^n` in polar coordinates.
//!
//! A point is `(cosh r, sinh r · ω)` with `ω ∈ S^{n-1}`. All experiment
//! configurations are axial: centers sit on a fixed axis and evaluation
//! points are described by `(r, θ)` with `θ` the angle to that axis, which
//! reduces volume integrals to two dimensions.
//!
//! Angular integrals use `θ = 2 arctan(e^y)`, so `cos θ = -tanh y`,
//! `sin θ = sech y` and `dθ = sin θ dy`. The substitution resolves
//! Poisson-kernel peaks of width `e^{-s}` at `θ = 0` (they sit near
//! `y = -s`) without special breakpoints.

use crate::error::{Error, Result};
use crate::logval::LogVal;
use crate::quad::{Adaptive, QuadValue};
use crate::rootsys::ln_sinh;
use crate::special::{gamma_real, sphere_area};
use std::f64::consts::PI;

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct HPoint {
    pub n: usize,
    pub r: f64,
    pub omega: Vec<f64>,
}

impl HPoint {
    pub fn new(n: usize, r: f64, omega: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Config(format!("H^n needs n >= 2, got {n}")));
        }
        if omega.len() != n {
            return Err(Error::DimensionMismatch {
                left: omega.len(),
                right: n,
            });
        }
        if !(r >= 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("radius must be finite and >= 0, got {r}")));
        }
        let len = omega.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (len - 1.0).abs() > UNIT_TOL {
            return Err(Error::Domain(format!("|omega| = {len} is not 1")));
        }
        Ok(HPoint { n, r, omega })
    }

    pub fn origin(n: usize) -> Self {
        let mut omega = vec![0.0; n];
        omega[0] = 1.0;
        HPoint { n, r: 0.0, omega }
    }

    /// Point at distance `r` whose direction makes angle `theta` with the
    /// axis `e_1`, inside the `(e_1, e_2)` plane.
    pub fn axial(n: usize, r: f64, theta: f64) -> Result<Self> {
        let mut omega = vec![0.0; n];
        omega[0] = theta.cos();
        omega[1] = theta.sin();
        HPoint::new(n, r, omega)
    }

    /// Angle between `ω` and the axis `e_1`.
    pub fn axis_angle(&self) -> f64 {
        self.omega[0].clamp(-1.0, 1.0).acos()
    }

    /// Embedding coordinates `(x_0, …, x_n)`.
    pub fn embed(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.n + 1);
        x.push(self.r.cosh());
        x.extend(self.omega.iter().map(|w| self.r.sinh() * w));
        x
    }
}

/// `cos` of an angle together with `1 - cos` and `1 + cos`, carried
/// separately so neither loses digits near `0` or `π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosAngle {
    pub cos: f64,
    pub one_minus: f64,
    pub one_plus: f64,
}

impl CosAngle {
    pub fn from_cos(c: f64) -> Self {
        let c = c.clamp(-1.0, 1.0);
        CosAngle {
            cos: c,
            one_minus: 1.0 - c,
            one_plus: 1.0 + c,
        }
    }

    pub fn from_theta(theta: f64) -> Self {
        let h = 0.5 * theta;
        CosAngle {
            cos: theta.cos(),
            one_minus: 2.0 * h.sin().powi(2),
            one_plus: 2.0 * h.cos().powi(2),
        }
    }

    /// Angle for the substitution variable `y` (`θ = 2 arctan e^y`).
    pub fn from_y(y: f64) -> Self {
        // 1 - cos θ = 2 / (1 + e^{-2y}), 1 + cos θ = 2 / (1 + e^{2y})
        CosAngle {
            cos: -y.tanh(),
            one_minus: 2.0 / (1.0 + (-2.0 * y).exp()),
            one_plus: 2.0 / (1.0 + (2.0 * y).exp()),
        }
    }

    /// Between two unit vectors, using `1 - cos = |a - b|²/2`.
    pub fn between(a: &[f64], b: &[f64]) -> Self {
        let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        let sum: f64 = a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum();
        CosAngle {
            cos: (1.0 - 0.5 * diff).clamp(-1.0, 1.0),
            one_minus: 0.5 * diff,
            one_plus: 0.5 * sum,
        }
    }
}

/// `ln(cosh s - sinh s · cos)`, stable for large `s` and for `cos → ±1`.
pub fn ln_poisson_base(s: f64, ang: CosAngle) -> f64 {
    // cosh s - c sinh s = ((1-c) e^s + (1+c) e^{-s}) / 2
    let a = (0.5 * ang.one_minus).ln() + s;
    let b = (0.5 * ang.one_plus).ln() - s;
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Geodesic distance given both radii and the angle between directions.
pub fn distance_polar(r: f64, s: f64, ang: CosAngle) -> f64 {
    // cosh d - 1 = 2 sinh²((r-s)/2) + sinh r sinh s (1 - cos)
    if r + s > 30.0 {
        let half = 0.5 * (r - s).abs();
        let t1 = if half > 0.0 {
            std::f64::consts::LN_2 + 2.0 * ln_sinh(half)
        } else {
            f64::NEG_INFINITY
        };
        let t2 = if r > 0.0 && s > 0.0 && ang.one_minus > 0.0 {
            ln_sinh(r) + ln_sinh(s) + ang.one_minus.ln()
        } else {
            f64::NEG_INFINITY
        };
        let (hi, lo) = if t1 > t2 { (t1, t2) } else { (t2, t1) };
        if hi == f64::NEG_INFINITY {
            return 0.0;
        }
        let ln_x = hi + (lo - hi).exp().ln_1p();
        if ln_x > 10.0 {
            // d = ln x + ln(1 + 1/x + sqrt(1 + 2/x))
            let inv = (-ln_x).exp();
            return ln_x + (1.0 + inv + (1.0 + 2.0 * inv).sqrt()).ln();
        }
        let x = ln_x.exp();
        return (x + (x * (x + 2.0)).sqrt()).ln_1p();
    }
    let x = 2.0 * (0.5 * (r - s)).sinh().powi(2) + r.sinh() * s.sinh() * ang.one_minus;
    (x + (x * (x + 2.0)).sqrt()).ln_1p()
}

/// `arccosh` of the textbook expression; reference branch only.
pub fn distance_direct(r: f64, s: f64, cos: f64) -> f64 {
    (r.cosh() * s.cosh() - r.sinh() * s.sinh() * cos).max(1.0).acosh()
}

/// Distance via the Minkowski form of the embedding; reference only.
pub fn distance_embedding(a: &HPoint, b: &HPoint) -> f64 {
    let x = a.embed();
    let y = b.embed();
    let mut q = x[0] * y[0];
    for i in 1..x.len() {
        q -= x[i] * y[i];
    }
    q.max(1.0).acosh()
}

pub fn distance(a: &HPoint, b: &HPoint) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    if a.r == 0.0 {
        return Ok(b.r);
    }
    if b.r == 0.0 {
        return Ok(a.r);
    }
    Ok(distance_polar(a.r, b.r, CosAngle::between(&a.omega, &b.omega)))
}

/// `(cosh s - sinh s · cos)^{-q}` in log form.
pub fn poisson_power(s: f64, cosang: f64, q: f64) -> LogVal {
    poisson_power_angle(s, CosAngle::from_cos(cosang), q)
}

pub fn poisson_power_angle(s: f64, ang: CosAngle, q: f64) -> LogVal {
    if s == 0.0 {
        return LogVal::ONE;
    }
    LogVal::from_log(-q * ln_poisson_base(s, ang))
}

/// `(d(Ω, center) - r) - ln(cosh s - sinh s ω·ω')` for `Ω = (r, ω)`,
/// computed without cancellation:
/// with `a = e^{-r} cosh d` and `B = cosh s - c sinh s`,
/// `e^{d-r} = B + e^{-2r} [(cosh s + c sinh s) - 1/(a + √(a² - e^{-2r}))]`.
pub fn busemann_defect(r: f64, omega: &[f64], center: &HPoint) -> Result<f64> {
    if omega.len() != center.n {
        return Err(Error::DimensionMismatch {
            left: omega.len(),
            right: center.n,
        });
    }
    let s = center.r;
    if s == 0.0 {
        return Ok(0.0);
    }
    let ang = CosAngle::between(omega, &center.omega);
    let ln_b = ln_poisson_base(s, ang);
    let b = ln_b.exp();
    let e2r = (-2.0 * r).exp();
    // cosh s + c sinh s = ((1+c) e^s + (1-c) e^{-s}) / 2
    let plus = 0.5 * (ang.one_plus * s.exp() + ang.one_minus * (-s).exp());
    let a = 0.5 * b + 0.5 * e2r * plus;
    let root = (a * a - e2r).max(0.0).sqrt();
    let k = plus - 1.0 / (a + root);
    Ok((e2r * k / b).ln_1p())
}

/// `Γ(n/2) / (√π Γ((n-1)/2))`, the normalization of the sphere average
/// written as an integral over `θ` with weight `sin^{n-2} θ`.
pub fn sphere_norm(n: usize) -> f64 {
    let n = n as f64;
    gamma_real(n / 2.0).unwrap() / (PI.sqrt() * gamma_real((n - 1.0) / 2.0).unwrap())
}

/// Default `y` window for the angular substitution.
pub const Y_WINDOW: f64 = 40.0;

/// Normalized spherical average over `S^{n-1}` of a function of the angle
/// to a fixed direction, integrated over `y ∈ [y_lo, y_hi]`.
pub fn sphere_reduce_with<V: QuadValue>(
    n: usize,
    y_lo: f64,
    y_hi: f64,
    tol: f64,
    mut f: impl FnMut(CosAngle) -> Result<V>,
) -> Result<V> {
    if n < 2 {
        return Err(Error::Config(format!("sphere average needs n >= 2, got {n}")));
    }
    let w = (n - 1) as f64;
    let panels = (((y_hi - y_lo) / 4.0).ceil() as usize).max(4);
    let out = Adaptive::with_tol(tol)
        .splits(panels)
        .max_panels(20000)
        .try_integrate(&[y_lo, y_hi], |y| {
            Ok(f(CosAngle::from_y(y))?.scaled((w * ln_sech(y)).exp()))
        })?;
    Ok(out.value.scaled(sphere_norm(n)))
}

/// Normalized spherical average `∫ f(ω·θ) dσ(ω)` with `f ≡ 1 ↦ 1`.
pub fn sphere_reduce(n: usize, f: impl Fn(f64) -> f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Config(format!("sphere average needs n >= 2, got {n}")));
    }
    let w = (n - 1) as f64;
    let out = Adaptive::with_tol(1e-12)
        .abs_tol(1e-15)
        .splits(20)
        .integrate(&[-Y_WINDOW, Y_WINDOW], |y| {
            f(-y.tanh()) * (w * ln_sech(y)).exp()
        })?;
    Ok(out.value * sphere_norm(n))
}

fn ln_sech(y: f64) -> f64 {
    -(y.abs() + (-2.0 * y.abs()).exp().ln_1p() - std::f64::consts::LN_2)
}

/// `∫_{H^n} f dvol` for an integrand given in axial coordinates `(r, θ)`:
/// `|S^{n-2}| ∫ dr sinh^{n-1} r ∫ dθ sin^{n-2} θ f(r, θ)`, computed in log
/// domain. `r_breaks` delimits the radial domain and should include any
/// points where the integrand has kinks.
pub fn volume_integral(
    n: usize,
    r_breaks: &[f64],
    tol: f64,
    mut f: impl FnMut(f64, CosAngle) -> Result<LogVal>,
) -> Result<LogVal> {
    let area = LogVal::from_f64(sphere_area(n - 1));
    let out = Adaptive::with_tol(tol)
        .splits(2)
        .max_panels(20000)
        .try_integrate(r_breaks, |r| {
            if r <= 0.0 {
                return Ok(LogVal::ZERO);
            }
            let avg = sphere_reduce_with(n, -Y_WINDOW, Y_WINDOW, tol * 0.1, |a| f(r, a))?;
            Ok(avg * LogVal::from_log((n - 1) as f64 * ln_sinh(r)))
        })?;
    Ok(out.value * area)
}

/// Radial special case: `|S^{n-1}| ∫ f(r) sinh^{n-1} r dr`.
pub fn radial_volume_integral(
    n: usize,
    r_breaks: &[f64],
    tol: f64,
    mut f: impl FnMut(f64) -> Result<LogVal>,
) -> Result<LogVal> {
    let area = LogVal::from_f64(sphere_area(n - 1));
    let out = Adaptive::with_tol(tol)
        .splits(2)
        .max_panels(20000)
        .try_integrate(r_breaks, |r| {
            if r <= 0.0 {
                return Ok(LogVal::ZERO);
            }
            Ok(f(r)? * LogVal::from_log((n - 1) as f64 * ln_sinh(r)))
        })?;
    Ok(out.value * area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        let o = HPoint::origin(3);
        let a = HPoint::axial(3, 1.0, 0.0).unwrap();
        assert_eq!(distance(&a, &o).unwrap(), 1.0);
        let b = HPoint::axial(3, 1.0, PI).unwrap();
        assert!((distance(&a, &b).unwrap() - 2.0).abs() < 1e-14);
        let c = HPoint::axial(3, 1.0, PI / 2.0).unwrap();
        let d = distance(&a, &c).unwrap();
        let expected = (1f64.cosh().powi(2)).acosh();
        assert!((d - expected).abs() < 1e-14);
        assert!((d - 1.513_374).abs() < 1e-6);
        assert!((distance_embedding(&a, &c) - d).abs() < 1e-12);
        assert!(distance(&a, &HPoint::origin(4)).is_err());
    }

    #[test]
    fn distance_symmetry_and_triangle() {
        let pts: Vec<HPoint> = (0..6)
            .map(|k| HPoint::axial(3, 0.7 * k as f64, 0.5 * k as f64).unwrap())
            .collect();
        for a in &pts {
            assert_eq!(distance(a, a).unwrap(), 0.0);
            for b in &pts {
                assert_eq!(distance(a, b).unwrap(), distance(b, a).unwrap());
                for c in &pts {
                    let lhs = distance(a, c).unwrap();
                    let rhs = distance(a, b).unwrap() + distance(b, c).unwrap();
                    assert!(lhs <= rhs + 1e-12);
                }
            }
        }
    }

    #[test]
    fn log_branch_matches_direct_on_crossover() {
        for k in 0..=20 {
            let total = 25.0 + 0.5 * k as f64;
            for (frac, th) in [(0.5, 0.3), (0.3, 1.2), (0.8, 2.9), (0.6, 0.01)] {
                let r = total * frac;
                let s = total - r;
                let ang = CosAngle::from_theta(th);
                let a = distance_polar(r, s, ang);
                let b = distance_direct(r, s, th.cos());
                assert!((a - b).abs() < 1e-10 * a.max(1.0), "r={r} s={s} th={th}: {a} {b}");
            }
        }
    }

    #[test]
    fn poisson_power_examples() {
        assert_eq!(poisson_power(0.0, 0.3, 2.0).to_f64(), 1.0);
        let v = poisson_power(3.0, 1.0, 1.5).ln_abs();
        assert!((v - 4.5).abs() < 1e-13);
        let v = poisson_power(2.0, 0.0, 2.0).to_f64();
        assert!((v - 2f64.cosh().powi(-2)).abs() < 1e-15);
        assert!((v - 0.070_65).abs() < 1e-5);
    }

    #[test]
    fn busemann_examples() {
        let o = HPoint::origin(3);
        assert_eq!(busemann_defect(20.0, &[1.0, 0.0, 0.0], &o).unwrap(), 0.0);
        let c = HPoint::axial(3, 1.0, 0.0).unwrap();
        let omega = [-1.0, 0.0, 0.0];
        assert!(busemann_defect(30.0, &omega, &c).unwrap().abs() < 1e-10);
        // ω·ω' = 1/2
        let omega = [0.5, 0.75f64.sqrt(), 0.0];
        let d20 = busemann_defect(20.0, &omega, &c).unwrap();
        let d40 = busemann_defect(40.0, &omega, &c).unwrap();
        assert!(d20 != 0.0);
        assert!(d40.abs() <= 0.5 * d20.abs());
        // exponential decay, rate e^{-2r}
        let ratio = d40 / d20;
        assert!((ratio.ln() + 40.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn busemann_matches_direct_at_moderate_r() {
        let c = HPoint::axial(3, 1.5, 0.4).unwrap();
        for r in [2.0, 5.0, 8.0] {
            let omega = [0.2f64.cos(), 0.2f64.sin(), 0.0];
            let p = HPoint::new(3, r, omega.to_vec()).unwrap();
            let direct = distance(&p, &c).unwrap() - r
                - ln_poisson_base(1.5, CosAngle::between(&omega, &c.omega));
            let v = busemann_defect(r, &omega, &c).unwrap();
            assert!((v - direct).abs() < 1e-12, "r={r}: {v} {direct}");
        }
    }

    #[test]
    fn sphere_reduce_examples() {
        for n in [2, 3, 4, 6] {
            assert!((sphere_reduce(n, |_| 1.0).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(sphere_reduce(3, |c| c).unwrap().abs() < 1e-12);
        // n = 3: average of c² is 1/3
        assert!((sphere_reduce(3, |c| c * c).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_kernel_averages_to_one() {
        for n in [2, 3, 4] {
            for k in 0..=10 {
                let s = 2.0 * k as f64;
                let v: f64 = sphere_reduce_with(n, -Y_WINDOW - s, Y_WINDOW, 1e-12, |a| {
                    Ok(poisson_power_angle(s, a, (n - 1) as f64).to_f64())
                })
                .unwrap();
                assert!((v - 1.0).abs() < 1e-8, "n={n} s={s}: {v}");
            }
        }
    }

    #[test]
    fn ball_volume_h2() {
        let v = volume_integral(2, &[0.0, 1.0], 1e-10, |_, _| Ok(LogVal::ONE)).unwrap();
        let exact = 2.0 * PI * (1f64.cosh() - 1.0);
        assert!((v.to_f64() - exact).abs() < 1e-8);
        assert!((exact - 3.412_276).abs() < 1e-6);
        let z = volume_integral(3, &[0.0, 2.0], 1e-10, |_, _| Ok(LogVal::ZERO)).unwrap();
        assert!(z.is_zero());
        let v3 = radial_volume_integral(3, &[0.0, 1.0], 1e-12, |_| Ok(LogVal::ONE)).unwrap();
        // 4π ∫ sinh² = 2π (sinh 2 / 2 - 1)
        let exact3 = 2.0 * PI * (2f64.sinh() / 2.0 - 1.0);
        assert!((v3.to_f64() - exact3).abs() < 1e-10);
    }

    #[test]
    fn bad_points_rejected() {
        assert!(HPoint::new(3, 1.0, vec![1.0, 1.0, 0.0]).is_err());
        assert!(HPoint::new(3, -1.0, vec![1.0, 0.0, 0.0]).is_err());
        assert!(HPoint::new(1, 1.0, vec![1.0]).is_err());
    }
}
