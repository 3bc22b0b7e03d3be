//! Complex Gamma function.
//!
//! Lanczos approximation with g = 607/128 and 15 coefficients (Godfrey),
//! plus the reflection formula on the left half plane. Values are produced
//! as logarithms first so Gamma quotients with large imaginary parts do not
//! overflow before they are divided.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    0.339_946_499_848_118_9e-4,
    0.465_236_289_270_485_76e-4,
    -0.983_744_753_048_795_6e-4,
    0.158_088_703_224_912_5e-3,
    -0.210_264_441_724_104_9e-3,
    0.217_439_618_115_212_64e-3,
    -0.164_318_106_536_763_9e-3,
    0.844_182_239_838_527_4e-4,
    -0.261_908_384_015_814_1e-4,
    0.368_991_826_595_316_2e-5,
];

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln Γ(z)` on some branch; `exp` of the result is `Γ(z)`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("ln_gamma of non-finite {z}")));
    }
    if is_pole(z) {
        return Err(Error::Pole { re: z.re, im: z.im });
    }
    if z.im < 0.0 {
        return ln_gamma(z.conj()).map(|v| v.conj());
    }
    if z.re < 0.5 {
        // Γ(z)Γ(1-z) = π / sin(πz)
        let w = z * PI;
        let ln_sin = if w.im > 2.0 {
            // sin w = (i/2) e^{-iw} (1 - e^{2iw}), |e^{2iw}| < 1 for Im w > 0
            let i = Complex64::new(0.0, 1.0);
            -i * w + Complex64::new(0.5, 0.0).ln() + i.ln() + (-(i * w * 2.0).exp() + 1.0).ln()
        } else {
            w.sin().ln()
        };
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin - ln_gamma(Complex64::new(1.0, 0.0) - z)?);
    }
    let zm = z - 1.0;
    let mut acc = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += *c / (zm + k as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    Ok(Complex64::new(LN_SQRT_2PI, 0.0) + (zm + 0.5) * t.ln() - t + acc.ln())
}

pub fn gamma(z: Complex64) -> Result<Complex64> {
    ln_gamma(z).map(|v| v.exp())
}

/// Real `ln |Γ(x)|`.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    ln_gamma(Complex64::new(x, 0.0)).map(|v| v.re)
}

pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|v| v.re)
}

/// Area of the unit sphere `S^k` in `R^{k+1}`: `2 π^{(k+1)/2} / Γ((k+1)/2)`.
pub fn sphere_area(k: usize) -> f64 {
    let h = (k as f64 + 1.0) / 2.0;
    2.0 * PI.powf(h) / gamma_real(h).expect("positive argument")
}
