//! Harish-Chandra c-function (Gindikin–Karpelevič product), Plancherel
//! density and the regularized b-function `b(λ) = π(iλ) c(λ)`.
//!
//! The z-independent Gamma prefactors of each `c_α` are kept, so
//! `|c(λ)|^{-2}` is the literal density; overall spectral constants are
//! fixed elsewhere by calibration.

use crate::error::{Error, Result};
use crate::logval::LogVal;
use crate::rootsys::{dot, RootDatum};
use crate::special::ln_gamma;
use num_complex::Complex64;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `ln` of the z-independent prefactor
/// `Γ(a + m/2)/Γ(a) · Γ(a/2 + m/4 + m2/2)/Γ(a/2 + m/4)`
/// with `a = ⟨α,ρ⟩/⟨α,α⟩`.
fn ln_prefactor(m_a: u32, m_2a: u32, a: f64) -> Result<f64> {
    let m = f64::from(m_a);
    let m2 = f64::from(m_2a);
    let v = ln_gamma(re(a + m / 2.0))? - ln_gamma(re(a))? + ln_gamma(re(a / 2.0 + m / 4.0 + m2 / 2.0))?
        - ln_gamma(re(a / 2.0 + m / 4.0))?;
    Ok(v.re)
}

/// `ln c_α(z)` for a root with multiplicities `(m_α, m_{2α})` and
/// `rho_coeff = ⟨α,ρ⟩/⟨α,α⟩`.
pub fn ln_c_alpha(z: Complex64, m_a: u32, m_2a: u32, rho_coeff: f64) -> Result<Complex64> {
    let m = f64::from(m_a);
    let m2 = f64::from(m_2a);
    let iz = I * z;
    let v = ln_gamma(iz)? - ln_gamma(iz + m / 2.0)? + ln_gamma(iz / 2.0 + m / 4.0)?
        - ln_gamma(iz / 2.0 + m / 4.0 + m2 / 2.0)?;
    Ok(v + ln_prefactor(m_a, m_2a, rho_coeff)?)
}

/// `c_α(z)` itself.
pub fn c_alpha(z: Complex64, m_a: u32, m_2a: u32, rho_coeff: f64) -> Result<Complex64> {
    ln_c_alpha(z, m_a, m_2a, rho_coeff).map(|v| v.exp())
}

fn rho_coeff(datum: &RootDatum, alpha: &[f64]) -> f64 {
    dot(alpha, &datum.rho) / dot(alpha, alpha)
}

/// `ln |c(λ)|^{-2}` for real `λ`; the zero element when `λ` is on a wall.
pub fn plancherel_density_log(datum: &RootDatum, lam: &[f64]) -> Result<LogVal> {
    if lam.len() != datum.rank {
        return Err(Error::DimensionMismatch {
            left: lam.len(),
            right: datum.rank,
        });
    }
    let mut acc = 0.0;
    for root in &datum.roots {
        let aa = dot(&root.vector, &root.vector);
        let z = dot(&root.vector, lam) / aa;
        if z == 0.0 {
            return Ok(LogVal::ZERO);
        }
        let lc = ln_c_alpha(re(z), root.m_alpha, root.m_2alpha, rho_coeff(datum, &root.vector))?;
        acc -= 2.0 * lc.re;
    }
    Ok(LogVal::from_log(acc))
}

/// Rank-one shortcut: `ln |c(λ)|^{-2}` at scalar `λ`.
pub fn plancherel_density_rank1(datum: &RootDatum, lam: f64) -> Result<LogVal> {
    plancherel_density_log(datum, &[lam])
}

/// `ln` of the per-root factor of `b(-λ)^{-1}`, as a function of
/// `z = ⟨α,λ⟩/⟨α,α⟩`. The pole of `Γ(iz)` cancels against `⟨α,λ⟩`:
/// `⟨α,λ⟩ Γ(iz) = -i ⟨α,α⟩ Γ(iz + 1)`.
fn ln_b_inv_factor(
    z: Complex64,
    aa: f64,
    m_a: u32,
    m_2a: u32,
    rho_coeff: f64,
) -> Result<Complex64> {
    let m = f64::from(m_a);
    let m2 = f64::from(m_2a);
    // factor of b(μ) at w = ⟨α,μ⟩/⟨α,α⟩ with μ = -λ
    let w = -z;
    let iw = I * w;
    let ln_b = (-I * aa).ln() + ln_gamma(iw + 1.0)? - ln_gamma(iw + m / 2.0)?
        + ln_gamma(iw / 2.0 + m / 4.0)?
        - ln_gamma(iw / 2.0 + m / 4.0 + m2 / 2.0)?
        + ln_prefactor(m_a, m_2a, rho_coeff)?;
    Ok(-ln_b)
}

/// `b(-λ)^{-1}` as `(unit phase, ln |·|)`, for `λ ∈ a + i ā⁺`.
pub fn b_inverse_log(datum: &RootDatum, lam: &[Complex64]) -> Result<(Complex64, f64)> {
    if lam.len() != datum.rank {
        return Err(Error::DimensionMismatch {
            left: lam.len(),
            right: datum.rank,
        });
    }
    let imag: Vec<f64> = lam.iter().map(|z| z.im).collect();
    for &i in &datum.simple {
        if dot(&datum.roots[i].vector, &imag) < -1e-12 {
            return Err(Error::Domain(format!(
                "Im λ = {imag:?} lies outside the closed chamber"
            )));
        }
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for root in &datum.roots {
        let aa = dot(&root.vector, &root.vector);
        let pair: Complex64 = root
            .vector
            .iter()
            .zip(lam)
            .map(|(a, l)| *l * *a)
            .sum();
        acc += ln_b_inv_factor(
            pair / aa,
            aa,
            root.m_alpha,
            root.m_2alpha,
            rho_coeff(datum, &root.vector),
        )?;
    }
    Ok((Complex64::from_polar(1.0, acc.im), acc.re))
}

/// `b(-λ)^{-1}` as a complex number.
pub fn b_inverse(datum: &RootDatum, lam: &[Complex64]) -> Result<Complex64> {
    let (phase, ln_mag) = b_inverse_log(datum, lam)?;
    Ok(phase * ln_mag.exp())
}

/// Rank-one defect of the b-ratio: the maximum over
/// `w ∈ [x_plus - y_dist, x_plus + y_dist]` of
/// `|b(-i w/2t)^{-1} / b(-i x_plus/2t)^{-1} - 1|`.
pub fn b_ratio_defect(datum: &RootDatum, x_plus: f64, y_dist: f64, t: f64) -> Result<f64> {
    if datum.rank != 1 {
        return Err(Error::Domain("b_ratio_defect is rank one only".into()));
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    let at = |w: f64| b_inverse(datum, &[Complex64::new(0.0, w / (2.0 * t))]);
    let base = at(x_plus)?;
    const SAMPLES: usize = 33;
    let mut worst: f64 = 0.0;
    for k in 0..SAMPLES {
        let w = x_plus - y_dist + 2.0 * y_dist * k as f64 / (SAMPLES - 1) as f64;
        let w = w.max(0.0);
        worst = worst.max((at(w)? / base - 1.0).norm());
    }
    Ok(worst)
}
