//! Heat kernels `h_t(r)` on `H^n` (closed form for `n = 3`, spectral
//! quadrature for every `n`, large-time asymptotics), their `L^p` norms,
//! concentration on the critical regions, and kernel quotients.

use crate::error::{Error, Result};
use crate::hgeom::{distance, ln_poisson_base, CosAngle, HPoint};
use crate::logval::LogVal;
use crate::plancherel::ln_c_alpha;
use crate::quad::Adaptive;
use crate::rootsys::ln_sinh;
use crate::schedule::RegionSchedule;
use crate::special::{ln_gamma_real, sphere_area};
use crate::spherical::{
    cutoff_for_gaussian, inversion_constant, NESTED_TOL, ln_density, ln_hc_function, phi0, phi_lambda, rho,
};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Below this radius the spectral route integrates on the real axis;
/// above it the contour is shifted to `Im λ = r/2t`.
const CONTOUR_SWITCH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ExactH3,
    Spectral,
    Asymptotic,
}

impl Route {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_h3" => Ok(Route::ExactH3),
            "spectral" => Ok(Route::Spectral),
            "asymptotic" => Ok(Route::Asymptotic),
            other => Err(Error::Config(format!("unknown route '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Route::ExactH3 => "exact_h3",
            Route::Spectral => "spectral",
            Route::Asymptotic => "asymptotic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeatEvaluation {
    pub t: f64,
    pub r: f64,
    pub route: Route,
    pub value: LogVal,
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    Ok(())
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
    }
    Ok(())
}

/// `(4πt)^{-3/2} (r / sinh r) e^{-t - r²/4t}`.
pub fn h_exact_h3(t: f64, r: f64) -> Result<LogVal> {
    check_time(t)?;
    check_radius(r)?;
    let ln_ratio = if r < 1e-4 {
        -r * r / 6.0
    } else {
        r.ln() - ln_sinh(r)
    };
    Ok(LogVal::from_log(
        -1.5 * (4.0 * PI * t).ln() + ln_ratio - t - r * r / (4.0 * t),
    ))
}

/// Spectral route: `κ_n ∫_0^∞ |c(λ)|^{-2} φ_λ(r) e^{-t(λ²+ρ²)} dλ`.
///
/// For `r >= 0.5` the integral is rewritten as
/// `κ_n ∫_R c(-λ)^{-1} Φ_λ(r) e^{-t(λ²+ρ²)} dλ` and moved to the line
/// `Im λ = r/2t`, where the oscillation of `Φ_λ` cancels against the
/// Gaussian and the integrand has the size of the result.
pub fn h_spectral(n: usize, t: f64, r: f64) -> Result<LogVal> {
    check_time(t)?;
    check_radius(r)?;
    if n < 2 {
        return Err(Error::Config(format!("H^n needs n >= 2, got {n}")));
    }
    let rho = rho(n);
    let kappa = inversion_constant(n);
    let lmax = cutoff_for_gaussian(t);
    let ground = LogVal::from_log(-t * rho * rho + kappa.ln());
    if r < CONTOUR_SWITCH {
        let tol = if n == 3 { 1e-12 } else { NESTED_TOL };
        let out = Adaptive::with_tol(tol)
            .l1_tol(1e-13)
            .splits(16)
            .max_panels(20000)
            .try_integrate(&[0.0, lmax], |l| {
                if l == 0.0 {
                    return Ok(0.0);
                }
                let phi = phi_lambda(n, Complex64::new(l, 0.0), r)?;
                Ok(phi.mantissa.re * (ln_density(n, l)? + phi.ln_scale - t * l * l).exp())
            })?;
        return Ok(LogVal::from_f64(out.value) * ground);
    }
    let eta = r / (2.0 * t);
    let ln_2cosh = r + (-2.0 * r).exp().ln_1p();
    let ln_scale = (-eta - rho) * ln_2cosh + t * eta * eta;
    let out = Adaptive::with_tol(1e-11)
        .l1_tol(1e-13)
        .splits(16)
        .max_panels(20000)
        .try_integrate(&[0.0, lmax], |xi| {
            let lam = Complex64::new(xi, eta);
            let v = -ln_c_alpha(-lam, (n - 1) as u32, 0, rho)? + ln_hc_function(n, lam, r)?
                - t * lam * lam
                - ln_scale;
            Ok(v.exp().re)
        })?;
    if !(out.value > 0.0) {
        return Err(Error::NonConvergence(format!(
            "spectral kernel not positive at t={t}, r={r}"
        )));
    }
    Ok(LogVal::from_f64(2.0 * out.value) * LogVal::from_log(ln_scale) * ground)
}

/// `γ(s) = Γ(s+1/2) Γ(s/2+(n-1)/4) / (Γ(s+1) Γ(s/2+1/4))`.
pub fn gamma_prefactor(n: usize, s: f64) -> f64 {
    let nf = n as f64;
    (ln_gamma_real(s + 0.5).unwrap() + ln_gamma_real(s / 2.0 + (nf - 1.0) / 4.0).unwrap()
        - ln_gamma_real(s + 1.0).unwrap()
        - ln_gamma_real(s / 2.0 + 0.25).unwrap())
    .exp()
}

/// `γ(r/2t) t^{-3/2} r e^{-(n-1)²t/4 - (n-1)r/2 - r²/4t}`.
pub fn h_asymptotic(n: usize, t: f64, r: f64) -> Result<LogVal> {
    check_time(t)?;
    check_radius(r)?;
    let nf = n as f64;
    let g = gamma_prefactor(n, r / (2.0 * t));
    Ok(LogVal::from_f64(g * r)
        * LogVal::from_log(
            -1.5 * t.ln() - (nf - 1.0).powi(2) * t / 4.0 - (nf - 1.0) * r / 2.0 - r * r / (4.0 * t),
        ))
}

pub fn evaluate(route: Route, n: usize, t: f64, r: f64) -> Result<HeatEvaluation> {
    let value = match route {
        Route::ExactH3 => {
            if n != 3 {
                return Err(Error::Config(format!("exact route needs n = 3, got {n}")));
            }
            h_exact_h3(t, r)?
        }
        Route::Spectral => h_spectral(n, t, r)?,
        Route::Asymptotic => h_asymptotic(n, t, r)?,
    };
    Ok(HeatEvaluation { t, r, route, value })
}

/// Best available kernel: exact for `n = 3`, spectral otherwise.
pub fn heat_kernel(n: usize, t: f64, r: f64) -> Result<LogVal> {
    if n == 3 {
        h_exact_h3(t, r)
    } else {
        h_spectral(n, t, r)
    }
}

/// Radius where `h_t^p sinh^{n-1}` peaks, `(2/p - 1)(n-1)t` clamped at 0.
fn lp_peak(n: usize, t: f64, p: f64) -> f64 {
    ((2.0 / p - 1.0) * (n as f64 - 1.0) * t).max(0.0)
}

/// Quadrature breakpoints covering `[a, b]` with panels sized to the
/// Gaussian width of `h_t^p`.
fn lp_breaks(n: usize, t: f64, p: f64, a: f64, b: f64) -> Vec<f64> {
    let peak = lp_peak(n, t, p);
    let w = (2.0 * t / p).sqrt().min(2.0 * t.sqrt() + 1.0);
    let mut pts = vec![a, b];
    for j in -16..=16 {
        let x = peak + j as f64 * w;
        if x > a && x < b {
            pts.push(x);
        }
    }
    for x in [0.5, 1.0, 2.0, 4.0] {
        if x > a && x < b {
            pts.push(x);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Radius past which `h_t^p sinh^{n-1}` is negligible.
fn lp_upper(n: usize, t: f64, p: f64) -> f64 {
    lp_peak(n, t, p) + 16.0 * (2.0 * t / p).sqrt() + 20.0
}

/// `∫_{a <= d(Ω,O) <= b} h_t^p dvol`, log domain.
pub fn lp_integral_log(n: usize, t: f64, p: f64, a: f64, b: f64) -> Result<LogVal> {
    let b = b.min(lp_upper(n, t, p));
    if !(b > a) {
        return Ok(LogVal::ZERO);
    }
    let breaks = lp_breaks(n, t, p, a, b);
    // panels already match the Gaussian width, so no initial split
    let out = Adaptive::with_tol(1e-9)
        .splits(1)
        .max_panels(20000)
        .try_integrate(&breaks, |r| {
            if r <= 0.0 {
                return Ok(LogVal::ZERO);
            }
            Ok(heat_kernel(n, t, r)?.powf_abs(p)
                * LogVal::from_log((n - 1) as f64 * ln_sinh(r)))
        })?;
    Ok(out.value * LogVal::from_f64(sphere_area(n - 1)))
}

/// `‖h_t‖_p`; `p = ∞` gives `h_t(0)`.
pub fn lp_norm_log(n: usize, t: f64, p: f64) -> Result<LogVal> {
    check_time(t)?;
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p must be >= 1, got {p}")));
    }
    if p.is_infinite() {
        return heat_kernel(n, t, 0.0);
    }
    Ok(lp_integral_log(n, t, p, 0.0, f64::INFINITY)?.powf_abs(1.0 / p))
}

/// Radial extent `[lo, hi]` of the critical region for `p` at time `t`.
pub fn critical_region(n: usize, p: f64, t: f64, sched: &RegionSchedule) -> (f64, f64) {
    if p < 2.0 {
        let c = (2.0 / p - 1.0) * (n as f64 - 1.0) * t;
        let w = sched.r(t);
        ((c - w).max(0.0), c + w)
    } else if p == 2.0 {
        let e = sched.eps(t);
        (e * t.sqrt(), t.sqrt() / e)
    } else {
        (0.0, sched.big_r(t))
    }
}

/// Normalized `L^p` mass of `h_t` outside the critical region; for
/// `p = ∞` the sup-norm version `sup_{outside} h_t / h_t(0)`.
pub fn concentration_defect(n: usize, t: f64, p: f64, sched: &RegionSchedule) -> Result<f64> {
    check_time(t)?;
    let (lo, hi) = critical_region(n, p, t, sched);
    if p.is_infinite() {
        // h_t is radially decreasing, so the outside sup sits at hi
        let v = heat_kernel(n, t, hi)? / heat_kernel(n, t, 0.0)?;
        return Ok(v.to_f64().min(1.0));
    }
    let total = lp_integral_log(n, t, p, 0.0, f64::INFINITY)?;
    let inner = lp_integral_log(n, t, p, 0.0, lo)?;
    let outer = lp_integral_log(n, t, p, hi, f64::INFINITY)?;
    Ok((inner.add(outer) / total).powf_abs(1.0 / p).to_f64().clamp(0.0, 1.0))
}

/// Deterministic sample of points in the critical region: 17 axial angles
/// in `[0, π]` times 5 radii spanning `[lo, hi]`.
pub fn region_samples(n: usize, p: f64, t: f64, sched: &RegionSchedule) -> Result<Vec<HPoint>> {
    let (lo, hi) = critical_region(n, p, t, sched);
    if !(hi > lo) {
        return Err(Error::Domain(format!("critical region empty at t={t}")));
    }
    let mut out = Vec::with_capacity(85);
    for i in 0..5 {
        let r = lo + (hi - lo) * i as f64 / 4.0;
        for j in 0..17 {
            out.push(HPoint::axial(n, r, PI * j as f64 / 16.0)?);
        }
    }
    Ok(out)
}

fn kernel_quotient(n: usize, t: f64, x: &HPoint, center: &HPoint) -> Result<f64> {
    let d = distance(x, center)?;
    Ok((heat_kernel(n, t, d)? / heat_kernel(n, t, x.r)?).to_f64())
}

/// `max |h_t(d(Ω,c))/h_t(d(Ω,O)) - (cosh s - sinh s ω·ω')^{-(n-1)/p}|`
/// over the sampled critical region, `p < 2`.
pub fn quotient_defect_low(
    n: usize,
    p: f64,
    t: f64,
    center: &HPoint,
    sched: &RegionSchedule,
) -> Result<f64> {
    if !(p >= 1.0 && p < 2.0) {
        return Err(Error::Domain(format!("low-regime quotient needs 1 <= p < 2, got {p}")));
    }
    let mut worst: f64 = 0.0;
    for x in region_samples(n, p, t, sched)? {
        let q = kernel_quotient(n, t, &x, center)?;
        let ang = CosAngle::between(&x.omega, &center.omega);
        let target = if center.r == 0.0 {
            1.0
        } else {
            (-(n as f64 - 1.0) / p * ln_poisson_base(center.r, ang)).exp()
        };
        worst = worst.max((q - target).abs());
    }
    Ok(worst)
}

/// `max |h_t(d(Ω,c))/h_t(d(Ω,O)) - φ_0(d(Ω,c))/φ_0(d(Ω,O))|` over the
/// sampled critical region, `p >= 2`.
pub fn quotient_defect_high(
    n: usize,
    p: f64,
    t: f64,
    center: &HPoint,
    sched: &RegionSchedule,
) -> Result<f64> {
    if !(p >= 2.0) {
        return Err(Error::Domain(format!("high-regime quotient needs p >= 2, got {p}")));
    }
    let mut worst: f64 = 0.0;
    for x in region_samples(n, p, t, sched)? {
        let q = kernel_quotient(n, t, &x, center)?;
        let d = distance(&x, center)?;
        let target = (phi0(n, d)? / phi0(n, x.r)?).to_f64();
        worst = worst.max((q - target).abs());
    }
    Ok(worst)
}
