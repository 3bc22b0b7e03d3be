//! Acceptance suite: fourteen numerical checks of the long-time theory,
//! each at a fixed tolerance. Used by `heatflow selftest` and by the
//! `acceptance` integration test.

use crate::error::Result;
use crate::evolve::{counterexample_gap, normalized_error, Tolerances};
use crate::heatkernel::{
    concentration_defect, h_asymptotic, h_exact_h3, h_spectral, lp_norm_log, quotient_defect_high,
    quotient_defect_low,
};
use crate::hgeom::{poisson_power_angle, sphere_reduce_with, HPoint, Y_WINDOW};
use crate::massfn::{mass_high, mass_high_direct, mass_low, mass_low_direct, InitialDatum, MassChoice};
use crate::plancherel::{b_ratio_defect, plancherel_density_rank1};
use crate::rootsys::{build_root_system, Family};
use crate::schedule::RegionSchedule;
use crate::spherical::{inverse_transform_radial, phi_lambda, rho, spherical_transform, RadialProfile};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} [{}] {}: {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.detail
        )
    }
}

pub const TITLES: [&str; 14] = [
    "heat-kernel route agreement",
    "mass conservation",
    "spherical closed form",
    "Poisson-power normalization",
    "L^p norm exponents",
    "concentration",
    "kernel-quotient asymptotics",
    "main convergence",
    "counterexample",
    "radial reductions",
    "p=2 two-mass criticality",
    "family_s masses",
    "b-ratio",
    "Plancherel rank-one reduction",
];

fn finish(id: u32, r: Result<(bool, String)>) -> CriterionResult {
    let (pass, detail) = match r {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        title: TITLES[id as usize - 1],
        pass,
        detail,
    }
}

pub fn run(id: u32) -> CriterionResult {
    let r = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(),
        6 => c6(),
        7 => c7(),
        8 => c8(),
        9 => c9(),
        10 => c10(),
        11 => c11(),
        12 => c12(),
        13 => c13(),
        14 => c14(),
        _ => return CriterionResult {
            id,
            title: "unknown",
            pass: false,
            detail: format!("no criterion {id}"),
        },
    };
    finish(id, r)
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=14).map(run).collect()
}

fn center3() -> HPoint {
    HPoint::axial(3, 2.0, 0.0).expect("valid point")
}

fn e3(x: f64) -> String {
    format!("{x:.3e}")
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

fn c1() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for t in [0.5, 5.0, 50.0] {
        for r in [0.1, 1.0, 10.0, 3.0 * t] {
            let d = h_spectral(3, t, r)?.ln_abs() - h_exact_h3(t, r)?.ln_abs();
            worst = worst.max(d.exp_m1().abs());
        }
    }
    Ok((worst <= 1e-8, format!("max |ratio-1| = {}", e3(worst))))
}

fn c2() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        for t in [1.0, 10.0, 50.0] {
            worst = worst.max((lp_norm_log(n, t, 1.0)?.to_f64() - 1.0).abs());
        }
    }
    Ok((worst <= 1e-6, format!("max |‖h_t‖_1 - 1| = {}", e3(worst))))
}

fn c3() -> Result<(bool, String)> {
    let mut closed: f64 = 0.0;
    for lam in [0.5, 1.0, 3.0] {
        for r in [0.5, 2.0, 10.0] {
            let v = phi_lambda(3, Complex64::new(lam, 0.0), r)?.value().re;
            closed = closed.max((v - (lam * r).sin() / (lam * r.sinh())).abs());
        }
    }
    let mut unit: f64 = 0.0;
    for n in [2, 3, 4] {
        for r in [0.5, 5.0, 20.0] {
            let v = phi_lambda(n, Complex64::new(0.0, rho(n)), r)?.value().re;
            unit = unit.max((v - 1.0).abs());
        }
    }
    Ok((
        closed < 1e-8 && unit <= 1e-8,
        format!("closed form {}, phi_(i rho) - 1 {}", e3(closed), e3(unit)),
    ))
}

fn c4() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for n in [2, 3, 4] {
        for s in [0.5, 2.0, 8.0] {
            let v: f64 = sphere_reduce_with(n, -Y_WINDOW - s, Y_WINDOW, 1e-12, |a| {
                Ok(poisson_power_angle(s, a, (n - 1) as f64).to_f64())
            })?;
            worst = worst.max((v - 1.0).abs());
        }
    }
    Ok((worst <= 1e-8, format!("max |average - 1| = {}", e3(worst))))
}

/// Least-squares slope of `y` against `x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn c5() -> Result<(bool, String)> {
    let ts: [f64; 4] = [50.0, 100.0, 200.0, 400.0];
    let p: f64 = 1.5;
    let pp = p / (p - 1.0);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut inf = Vec::new();
    for t in ts {
        xs.push(t.ln());
        ys.push(lp_norm_log(3, t, p)?.ln_abs() + 4.0 / (p * pp) * t);
        inf.push(lp_norm_log(3, t, f64::INFINITY)?.ln_abs() + t + 1.5 * t.ln());
    }
    let k = slope(&xs, &ys);
    let target = -1.0 / 6.0;
    let slope_ok = ((k - target) / target).abs() <= 0.15;
    let exact = -1.5 * (4.0 * PI).ln();
    let spread = inf.iter().map(|v| ((v - exact) / exact).abs()).fold(0.0, f64::max);
    let inf_ok = spread <= 0.01;
    Ok((
        slope_ok && inf_ok,
        format!("p=1.5 slope {k:.5} (target -1/6); p=inf max rel dev {}", e3(spread)),
    ))
}

fn c6() -> Result<(bool, String)> {
    let s = RegionSchedule::default();
    let d1 = concentration_defect(3, 100.0, 1.0, &s)?;
    let dinf = concentration_defect(3, 100.0, f64::INFINITY, &s)?;
    let mut mono = true;
    let mut parts = Vec::new();
    for p in [1.0, 2.0, f64::INFINITY] {
        let a = concentration_defect(3, 10.0, p, &s)?;
        let b = concentration_defect(3, 100.0, p, &s)?;
        mono &= b < a;
        parts.push(format!("p={p}: {}->{}", e3(a), e3(b)));
    }
    Ok((
        d1 < 0.05 && dinf < 1e-6 && mono,
        format!("t=100 p=1 {}, p=inf {}; {}", e3(d1), e3(dinf), parts.join(", ")),
    ))
}

fn c7() -> Result<(bool, String)> {
    let s = RegionSchedule::default();
    let c = center3();
    let l100 = quotient_defect_low(3, 1.0, 100.0, &c, &s)?;
    let l400 = quotient_defect_low(3, 1.0, 400.0, &c, &s)?;
    let low_ok = l400 / l100 <= 0.85 && l400 < 0.1;
    let mut high_ok = true;
    let mut parts = Vec::new();
    for p in [2.0, f64::INFINITY] {
        let a = quotient_defect_high(3, p, 100.0, &c, &s)?;
        let b = quotient_defect_high(3, p, 400.0, &c, &s)?;
        high_ok &= b < a && b / a <= 0.9;
        parts.push(format!("high p={p}: {}->{} ratio {:.3}", e3(a), e3(b), b / a));
    }
    Ok((
        low_ok && high_ok,
        format!(
            "low p=1: {}->{} ratio {:.3}; {}",
            e3(l100),
            e3(l400),
            l400 / l100,
            parts.join("; ")
        ),
    ))
}

const TIMES: [f64; 3] = [10.0, 40.0, 160.0];

/// `E_p` over the three standard times, with the decrease test.
fn series(u0: &InitialDatum, p: f64, m: MassChoice) -> Result<(bool, String)> {
    let s = RegionSchedule::default();
    let tol = Tolerances::default();
    let mut e = Vec::new();
    for t in TIMES {
        e.push(normalized_error(u0, p, t, m, &s, &tol)?.e);
    }
    let ok = strictly_decreasing(&e) && e[2] < 0.5 * e[0];
    let vals: Vec<String> = e.iter().map(|x| e3(*x)).collect();
    Ok((ok, format!("p={p} {}: {}", m.name(), vals.join(" "))))
}

fn combine(parts: Vec<Result<(bool, String)>>) -> Result<(bool, String)> {
    let mut ok = true;
    let mut text = Vec::new();
    for p in parts {
        let (a, b) = p?;
        ok &= a;
        text.push(b);
    }
    Ok((ok, text.join("; ")))
}

fn c8() -> Result<(bool, String)> {
    let heat = InitialDatum::displaced_heat(3, 1.0, 2.0)?;
    let bump = InitialDatum::displaced_bump(3, 0.5, 1.0)?;
    let mut parts = Vec::new();
    for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
        parts.push(series(&heat, p, MassChoice::default_for(p)));
    }
    for p in [1.0, f64::INFINITY] {
        parts.push(series(&bump, p, MassChoice::default_for(p)).map(|(a, b)| (a, format!("bump {b}"))));
    }
    combine(parts)
}

fn c9() -> Result<(bool, String)> {
    let u = InitialDatum::displaced_heat(3, 1.0, 2.0)?;
    let s = RegionSchedule::default();
    let tol = Tolerances::default();
    let (c10, _) = counterexample_gap(&u, 10.0, &s, &tol)?;
    let (c160, m160) = counterexample_gap(&u, 160.0, &s, &tol)?;
    let ratio = c160.e / m160.e;
    Ok((
        ratio > 5.0 && c160.e > 0.3 * c10.e,
        format!(
            "E_const(10) {}, E_const(160) {}, E_mass(160) {}, ratio {:.3}",
            e3(c10.e),
            e3(c160.e),
            e3(m160.e),
            ratio
        ),
    ))
}

/// Nine unit directions in `R^3`: the six axes and three diagonals.
fn directions() -> Vec<Vec<f64>> {
    let s = 1.0 / 3f64.sqrt();
    vec![
        vec![1.0, 0.0, 0.0],
        vec![-1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, -1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, -1.0],
        vec![s, s, s],
        vec![-s, s, -s],
        vec![s, -s, -s],
    ]
}

/// Mass functions of a radial bump, both from the production formulas and
/// from the literal Poisson-power and `φ_0` integrals.
fn c10() -> Result<(bool, String)> {
    let u = InitialDatum::radial_bump(3, 1.0)?;
    let bump = RadialProfile::bump(3, 1.0, 8)?;
    let mut spread: f64 = 0.0;
    let mut low_err: f64 = 0.0;
    for p in [1.0, 1.5, 2.0] {
        let target = spherical_transform(3, &bump, Complex64::new(0.0, (2.0 / p - 1.0) * rho(3)))?.re;
        for w in directions() {
            let fast = mass_low(&u, p, &w)?;
            let direct = mass_low_direct(&u, p, &w, 1e-11)?;
            spread = spread.max((fast - target).abs().max((direct - target).abs()) / target.abs());
            low_err = low_err.max((direct - target).abs() / target.abs());
        }
    }
    let h0 = spherical_transform(3, &bump, Complex64::new(0.0, 0.0))?.re;
    let mut high_err: f64 = 0.0;
    for (r, th) in [(0.0, 0.0), (3.0, 1.0), (40.0, 2.5)] {
        let x = HPoint::axial(3, r, th)?;
        let fast = mass_high(&u, 2.0, &x)?;
        let direct = mass_high_direct(&u, &x, 1e-11)?;
        high_err = high_err.max((fast - h0).abs().max((direct - h0).abs()) / h0);
    }
    // spread over directions is bounded by twice the distance to the target
    Ok((
        2.0 * spread <= 1e-8 && low_err <= 1e-6 && high_err <= 1e-6,
        format!(
            "direction spread <= {}, low (direct integral) vs transform {}, high vs transform {}",
            e3(2.0 * spread),
            e3(low_err),
            e3(high_err)
        ),
    ))
}

fn c11() -> Result<(bool, String)> {
    let u = InitialDatum::displaced_heat(3, 1.0, 2.0)?;
    combine(vec![series(&u, 2.0, MassChoice::High), series(&u, 2.0, MassChoice::Alt2)])
}

fn c12() -> Result<(bool, String)> {
    let u = InitialDatum::radial_bump(3, 1.0)?;
    let s = RegionSchedule::default();
    let tol = Tolerances::default();
    let m = MassChoice::FamilyS { s_exp: 2.0 };
    let mut e = Vec::new();
    for t in TIMES {
        e.push(normalized_error(&u, 1.0, t, m, &s, &tol)?.e);
    }
    let vals: Vec<String> = e.iter().map(|x| e3(*x)).collect();
    Ok((strictly_decreasing(&e), format!("E_1 {}", vals.join(" "))))
}

fn c13() -> Result<(bool, String)> {
    let defects = |n: usize| -> Result<Vec<f64>> {
        let d = build_root_system(Family::Rank1 { n })?;
        [100.0, 200.0, 400.0]
            .iter()
            .map(|&t| b_ratio_defect(&d, t, 2.0, t))
            .collect()
    };
    let d3 = defects(3)?;
    let ratio = d3[2] / d3[0];
    let ok = strictly_decreasing(&d3) && (0.15..=0.4).contains(&ratio);
    // n = 3 has a constant b-function; n = 4 shows the generic decay
    let d4 = defects(4)?;
    Ok((
        ok,
        format!(
            "n=3 defects {} {} {} ratio {}; n=4 defects {} {} {} ratio {:.4}",
            e3(d3[0]),
            e3(d3[1]),
            e3(d3[2]),
            if ratio.is_nan() { "undefined".to_string() } else { format!("{ratio:.4}") },
            e3(d4[0]),
            e3(d4[1]),
            e3(d4[2]),
            d4[2] / d4[0]
        ),
    ))
}

fn c14() -> Result<(bool, String)> {
    let d = build_root_system(Family::Rank1 { n: 3 })?;
    let k: Vec<f64> = [0.5, 1.0, 2.0, 4.0]
        .iter()
        .map(|&l| Ok(plancherel_density_rank1(&d, l)?.to_f64() / (l * l)))
        .collect::<Result<_>>()?;
    let spread = k.iter().map(|x| (x / k[0] - 1.0).abs()).fold(0.0, f64::max);
    let bump = RadialProfile::bump(3, 1.0, 8)?;
    let sup = bump.eval(0.0);
    let f_hat = |l: f64| Ok(spherical_transform(3, &bump, Complex64::new(l, 0.0))?.re);
    let mut trip: f64 = 0.0;
    for r in [0.0, 0.3, 0.7] {
        let v = inverse_transform_radial(3, f_hat, r, 120.0)?;
        trip = trip.max((v - bump.eval(r)).abs() / sup);
    }
    Ok((
        spread <= 1e-8 && trip <= 1e-6,
        format!("density/λ² spread {}, bump round trip {}", e3(spread), e3(trip)),
    ))
}

/// `h_asymptotic / h_exact_h3` along the ray `r = 2t`, where the
/// prefactor is evaluated at `r/2t = 1`. Reported, not asserted.
pub fn gamma_ray_ratios() -> Result<Vec<(f64, f64)>> {
    [10.0, 40.0, 160.0, 640.0]
        .iter()
        .map(|&t| {
            let r = 2.0 * t;
            let q = h_asymptotic(3, t, r)? / h_exact_h3(t, r)?;
            Ok((t, q.to_f64()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_line() {
        let x = [0.0, 1.0, 2.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.25 * v).collect();
        assert!((slope(&x, &y) + 0.25).abs() < 1e-14);
    }

    #[test]
    fn unknown_criterion_fails() {
        assert!(!run(99).pass);
    }

    #[test]
    fn lines_are_labelled() {
        let r = run(14);
        assert!(r.line().starts_with("criterion 14 ["));
    }
}
