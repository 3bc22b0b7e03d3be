//! Spherical functions `φ_λ` on `H^n` and the radial spherical transform.
//!
//! `φ_λ(r) = c_n ∫_0^π (cosh r - sinh r cos θ)^{-iλ-ρ} sin^{n-2}θ dθ` with
//! `c_n = Γ(n/2)/(√π Γ((n-1)/2))` and `ρ = (n-1)/2`. Values carry an
//! explicit `e^{(|Im λ| - ρ) r}` scale so large radii do not underflow.

use crate::error::{Error, Result};
use crate::heatkernel::h_exact_h3;
use crate::hgeom::{ln_poisson_base, sphere_reduce_with, CosAngle, Y_WINDOW};
use crate::logval::LogVal;
use crate::plancherel::ln_c_alpha;
use crate::quad::Adaptive;
use crate::rootsys::ln_sinh;
use crate::special::{gamma_real, sphere_area};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

pub fn rho(n: usize) -> f64 {
    (n as f64 - 1.0) / 2.0
}

/// Complex number `mantissa · e^{ln_scale}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub ln_scale: f64,
}

impl Scaled {
    pub fn value(&self) -> Complex64 {
        self.mantissa * self.ln_scale.exp()
    }

    pub fn re_log(&self) -> LogVal {
        LogVal::from_f64(self.mantissa.re) * LogVal::from_log(self.ln_scale)
    }
}

const PHI_TOL: f64 = 1e-12;
/// Tolerance for quadratures whose integrand is itself a quadrature.
pub const NESTED_TOL: f64 = 1e-10;

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Config(format!("H^n needs n >= 2, got {n}")));
    }
    Ok(())
}

/// `φ_λ(r)` by quadrature of the defining integral. `sign = +1` uses the
/// exponent `-iλ-ρ`, `sign = -1` the exponent `iλ-ρ` (which is `φ_{-λ}`).
pub fn phi_lambda_integral(n: usize, lam: Complex64, r: f64, sign: f64) -> Result<Scaled> {
    check_n(n)?;
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
    }
    let rho = rho(n);
    let ln_scale = (lam.im.abs() - rho) * r;
    if r == 0.0 {
        return Ok(Scaled {
            mantissa: Complex64::new(1.0, 0.0),
            ln_scale: 0.0,
        });
    }
    let expo = Complex64::new(0.0, -sign) * lam - rho;
    let m = sphere_reduce_with(n, -r - Y_WINDOW, Y_WINDOW, PHI_TOL, |a: CosAngle| {
        let lb = ln_poisson_base(r, a);
        Ok((expo * lb - ln_scale).exp())
    })?;
    Ok(Scaled {
        mantissa: m,
        ln_scale,
    })
}

/// `sin(λr)/(λ sinh r)`, the `n = 3` closed form, scaled like
/// [`phi_lambda_integral`].
pub fn phi_lambda_h3(lam: Complex64, r: f64) -> Scaled {
    let ln_scale = (lam.im.abs() - 1.0) * r;
    if r == 0.0 {
        return Scaled {
            mantissa: Complex64::new(1.0, 0.0),
            ln_scale: 0.0,
        };
    }
    // 1/sinh r = 2e^{-r}/(1 - e^{-2r}); the e^{-r} is in ln_scale
    let inv_sinh = 2.0 / -(-2.0 * r).exp_m1();
    let z = lam * r;
    let sin_ratio = if z.norm() < 1e-3 {
        // sin(z)/λ = r (1 - z²/6 + z⁴/120)
        let z2 = z * z;
        (1.0 - z2 / 6.0 + z2 * z2 / 120.0) * r * (-lam.im.abs() * r).exp()
    } else {
        // sin z · e^{-|Im z|} = (e^{iz} - e^{-iz}) e^{-|Im z|} / 2i
        let b = z.im.abs();
        let iz = Complex64::new(0.0, 1.0) * z;
        let e1 = (iz - b).exp();
        let e2 = (-iz - b).exp();
        (e1 - e2) / Complex64::new(0.0, 2.0) / lam
    };
    Scaled {
        mantissa: sin_ratio * inv_sinh,
        ln_scale,
    }
}

/// `φ_λ(r)`; uses the closed form for `n = 3`.
pub fn phi_lambda(n: usize, lam: Complex64, r: f64) -> Result<Scaled> {
    if n == 3 {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
        }
        return Ok(phi_lambda_h3(lam, r));
    }
    if r >= 0.0 && r <= SERIES_RADIUS {
        return phi_lambda_series(n, lam, r);
    }
    phi_lambda_integral(n, lam, r, 1.0)
}

/// Radius below which `φ_λ` is summed as a power series in `-sinh² r`.
const SERIES_RADIUS: f64 = 0.58;

/// `φ_λ(r) = ₂F₁((ρ+iλ)/2, (ρ-iλ)/2; n/2; -sinh² r)`, for small `r`.
pub fn phi_lambda_series(n: usize, lam: Complex64, r: f64) -> Result<Scaled> {
    check_n(n)?;
    let half_rho = Complex64::new(rho(n) / 2.0, 0.0);
    let il = Complex64::new(0.0, 0.5) * lam;
    let z = -r.sinh().powi(2);
    let f = hyp2f1_series(half_rho + il, half_rho - il, Complex64::new(n as f64 / 2.0, 0.0), z)?;
    Ok(Scaled {
        mantissa: f,
        ln_scale: 0.0,
    })
}

/// Ground spherical function `φ_0(r)`.
pub fn phi0(n: usize, r: f64) -> Result<LogVal> {
    Ok(phi_lambda(n, Complex64::new(0.0, 0.0), r)?.re_log())
}

/// `ln |c(λ)|^{-2}` for rank one, real `λ`. Minus infinity at `λ = 0`.
pub fn ln_density(n: usize, lam: f64) -> Result<f64> {
    if lam == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let rho = rho(n);
    let lc = ln_c_alpha(Complex64::new(lam, 0.0), (n - 1) as u32, 0, rho)?;
    Ok(-2.0 * lc.re)
}

/// Radial function with an integration layout.
#[derive(Clone)]
pub struct RadialProfile {
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Support radius; `f64::INFINITY` for everywhere-positive profiles.
    pub support_radius: f64,
    /// Panel breakpoints for quadrature, starting at `0`. The last entry is
    /// the truncation radius when the support is unbounded.
    pub breaks: Vec<f64>,
}

impl std::fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialProfile")
            .field("support_radius", &self.support_radius)
            .field("breaks", &self.breaks)
            .finish()
    }
}

impl RadialProfile {
    pub fn new(
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_radius: f64,
        breaks: Vec<f64>,
    ) -> Result<Self> {
        if breaks.len() < 2 || breaks[0] != 0.0 || breaks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("profile breaks must start at 0 and increase".into()));
        }
        if !(support_radius > 0.0) {
            return Err(Error::Config("support radius must be positive".into()));
        }
        Ok(RadialProfile {
            eval: Arc::new(eval),
            support_radius,
            breaks,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        if r > self.support_radius {
            0.0
        } else {
            (self.eval)(r)
        }
    }

    pub fn zero() -> Self {
        RadialProfile::new(|_| 0.0, 1.0, vec![0.0, 1.0]).unwrap()
    }

    /// `A (1 - (r/a)²)^k` on `r < a`, with `A` chosen for unit total mass.
    pub fn bump(n: usize, a: f64, k: i32) -> Result<Self> {
        check_n(n)?;
        if !(a > 0.0) || k < 1 {
            return Err(Error::Config("bump needs a > 0 and k >= 1".into()));
        }
        let shape = move |r: f64| (1.0 - (r / a).powi(2)).max(0.0).powi(k);
        let mass = Adaptive::with_tol(1e-14)
            .integrate(&[0.0, a], |r| shape(r) * r.sinh().powi(n as i32 - 1))?
            .value
            * sphere_area(n - 1);
        let amp = 1.0 / mass;
        RadialProfile::new(move |r| amp * shape(r), a, vec![0.0, 0.5 * a, a])
    }
}

/// `|S^{n-1}| ∫ f(r) φ_λ(r) sinh^{n-1} r dr`.
pub fn spherical_transform(n: usize, f: &RadialProfile, lam: Complex64) -> Result<Complex64> {
    check_n(n)?;
    let out = Adaptive::with_tol(if n == 3 { 1e-12 } else { NESTED_TOL })
        .abs_tol(1e-300)
        .splits(4)
        .try_integrate(&f.breaks, |r| {
            let v = f.eval(r);
            if v == 0.0 || r == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let phi = phi_lambda(n, lam, r)?;
            let w = (phi.ln_scale + (n - 1) as f64 * ln_sinh(r)).exp();
            Ok(phi.mantissa * (v * w))
        })?;
    Ok(out.value * sphere_area(n - 1))
}

/// `(2π)^{-n} |S^{n-1}| (Γ(n-1)/Γ((n-1)/2))²`, the inversion constant in
/// closed form. [`inversion_constant`] returns the calibrated value.
pub fn inversion_constant_closed(n: usize) -> f64 {
    let nf = n as f64;
    let g = gamma_real(nf - 1.0).unwrap() / gamma_real((nf - 1.0) / 2.0).unwrap();
    (2.0 * PI).powf(-nf) * sphere_area(n - 1) * g * g
}

static CALIBRATED_H3: OnceLock<f64> = OnceLock::new();

/// Inversion constant calibrated once against the exact `H^3` heat kernel
/// at `(t, r) = (1, 1)` and carried to other `n` by the closed-form ratio.
pub fn inversion_constant(n: usize) -> f64 {
    let k3 = *CALIBRATED_H3.get_or_init(|| {
        let t = 1.0;
        let r = 1.0;
        let lmax = cutoff_for_gaussian(t);
        let raw = Adaptive::with_tol(1e-14)
            .splits(8)
            .integrate(&[0.0, lmax], |l| {
                l * l * phi_lambda_h3(Complex64::new(l, 0.0), r).value().re * (-t * (l * l + 1.0)).exp()
            })
            .expect("calibration quadrature")
            .value;
        h_exact_h3(t, r).unwrap().to_f64() / raw
    });
    k3 * inversion_constant_closed(n) / inversion_constant_closed(3)
}

/// `λ` past which `e^{-tλ²}` is below `1e-18` of its peak.
pub fn cutoff_for_gaussian(t: f64) -> f64 {
    (41.5 / t).sqrt() + 1.0
}

/// `κ_n ∫_0^{λ_max} |c(λ)|^{-2} φ_λ(r) F(λ) dλ` for an even, decaying `F`.
pub fn inverse_transform_radial(
    n: usize,
    f_hat: impl Fn(f64) -> Result<f64>,
    r: f64,
    lambda_max: f64,
) -> Result<f64> {
    check_n(n)?;
    let panels = ((lambda_max * (r + 1.0)) / 4.0).ceil().max(4.0) as usize;
    let out = Adaptive::with_tol(NESTED_TOL)
        .l1_tol(1e-12)
        .splits(panels)
        .max_panels(40000)
        .try_integrate(&[0.0, lambda_max], |l| {
            if l == 0.0 {
                return Ok(0.0);
            }
            let fh = f_hat(l)?;
            if fh == 0.0 {
                return Ok(0.0);
            }
            let phi = phi_lambda(n, Complex64::new(l, 0.0), r)?;
            Ok(fh * phi.mantissa.re * (ln_density(n, l)? + phi.ln_scale).exp())
        })?;
    Ok(out.value * inversion_constant(n))
}

/// `ln Φ_λ(r)` for the Harish-Chandra series function
/// `Φ_λ(r) = (2 cosh r)^{iλ-ρ} ₂F₁((ρ-iλ)/2, (ρ+1-iλ)/2; 1-iλ; sech² r)`,
/// which behaves like `e^{(iλ-ρ)r}` at infinity and satisfies
/// `φ_λ = c(λ) Φ_λ + c(-λ) Φ_{-λ}`. Needs `r > 0` and `1-iλ` off the
/// non-positive integers.
pub fn ln_hc_function(n: usize, lam: Complex64, r: f64) -> Result<Complex64> {
    check_n(n)?;
    if !(r > 0.0) {
        return Err(Error::Domain(format!("series needs r > 0, got {r}")));
    }
    let rho = rho(n);
    let il = Complex64::new(0.0, 1.0) * lam;
    let a = (rho - il) / 2.0;
    let b = (rho + 1.0 - il) / 2.0;
    let c = 1.0 - il;
    // sech² r computed as 4 e^{-2r} / (1 + e^{-2r})²
    let e = (-2.0 * r).exp();
    let z = 4.0 * e / ((1.0 + e) * (1.0 + e));
    let f = hyp2f1_series(a, b, c, z)?;
    let ln_2cosh = r + e.ln_1p();
    Ok((il - rho) * ln_2cosh + f.ln())
}

/// Gauss series `₂F₁(a, b; c; z)` for `-1 < z < 1`.
pub fn hyp2f1_series(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    if !(z > -1.0 && z < 1.0) {
        return Err(Error::Domain(format!("series argument {z} outside (-1, 1)")));
    }
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..20000 {
        let kf = k as f64;
        let den = (c + kf) * (kf + 1.0);
        if den.norm() == 0.0 {
            return Err(Error::Pole { re: c.re, im: c.im });
        }
        term = term * (a + kf) * (b + kf) / den * z;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() && kf > (a * b).norm().sqrt() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence(format!("2F1 series at z = {z}")))
}
