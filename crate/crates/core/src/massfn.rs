//! Initial data on `H^n` and their mass functions.
//!
//! Every datum is a weighted sum of components that are radial about a
//! center on the axis `±e_1`. For such a component with profile `f`
//! centered at `c`, the mean-value property of Laplace eigenfunctions
//! reduces the defining integrals to closed expressions:
//!
//! - `∫ f(d(y,c)) P(y,ω)^{-(n-1)/p} dy = Hf(i(2/p-1)ρ) · P(c,ω)^{-(n-1)/p}`,
//! - `∫ f(d(y,c)) φ_0(d(x,y)) dy = Hf(0) · φ_0(d(x,c))`,
//!
//! where `P(y,ω) = cosh s - sinh s ω·ω'` for `y = (s, ω')` and `Hf` is the
//! spherical transform. The `*_direct` functions evaluate the same integrals
//! by brute-force quadrature and serve as cross-checks.

use crate::error::{Error, Result};
use crate::heatkernel::heat_kernel;
use crate::hgeom::{distance_polar, ln_poisson_base, sphere_norm, volume_integral, CosAngle, HPoint};
use crate::quad::Adaptive;
use std::f64::consts::PI;
use crate::logval::LogVal;
use crate::spherical::{phi0, phi_lambda, rho, spherical_transform, RadialProfile};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Profile shape `(1 - (r/a)²)^k`, normalized to unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpShape {
    pub radius: f64,
    pub order: i32,
}

impl Default for BumpShape {
    fn default() -> Self {
        BumpShape {
            radius: 1.0,
            order: 8,
        }
    }
}

#[derive(Debug, Clone)]
pub enum ComponentKind {
    /// Bump centered at the origin.
    RadialBump { shape: BumpShape },
    /// Bump centered at an axial point.
    DisplacedBump { shape: BumpShape, center: HPoint },
    /// `h_s(d(·, center))`, a heat kernel translated to `center`.
    DisplacedHeat { s: f64, center: HPoint },
}

#[derive(Debug, Clone)]
pub struct Component {
    pub kind: ComponentKind,
    pub weight: f64,
    profile: Option<RadialProfile>,
}

impl Component {
    pub fn center(&self, n: usize) -> HPoint {
        match &self.kind {
            ComponentKind::RadialBump { .. } => HPoint::origin(n),
            ComponentKind::DisplacedBump { center, .. } | ComponentKind::DisplacedHeat { center, .. } => {
                center.clone()
            }
        }
    }

    /// Value as a function of the distance to the component's center.
    pub fn profile_at(&self, n: usize, d: f64) -> Result<LogVal> {
        match &self.kind {
            ComponentKind::DisplacedHeat { s, .. } => heat_kernel(n, *s, d),
            _ => Ok(LogVal::from_f64(self.profile.as_ref().unwrap().eval(d))),
        }
    }

    /// Radius beyond which the profile is zero or negligible (`< 1e-18`
    /// of its peak, even after multiplication by `e^{(n-1) d}`).
    pub fn reach(&self, n: usize) -> f64 {
        match &self.kind {
            ComponentKind::RadialBump { shape } | ComponentKind::DisplacedBump { shape, .. } => {
                shape.radius
            }
            ComponentKind::DisplacedHeat { s, .. } => {
                let m = (n - 1) as f64;
                2.0 * s * 1.5 * m + (4.0 * s * 41.5).sqrt() + 2.0
            }
        }
    }

    /// Spherical transform of the profile, `Hf(λ)`.
    pub fn transform(&self, n: usize, lam: Complex64) -> Result<Complex64> {
        match &self.kind {
            ComponentKind::DisplacedHeat { s, .. } => {
                let r = rho(n);
                Ok((-*s * (lam * lam + r * r)).exp())
            }
            _ => spherical_transform(n, self.profile.as_ref().unwrap(), lam),
        }
    }
}

#[derive(Debug, Clone)]
pub struct InitialDatum {
    pub n: usize,
    pub components: Vec<Component>,
}

fn check_axial(center: &HPoint) -> Result<()> {
    if center.r == 0.0 {
        return Ok(());
    }
    let off: f64 = center.omega[1..].iter().map(|x| x * x).sum();
    if off > 1e-24 {
        return Err(Error::Config("component centers must lie on the axis ±e_1".into()));
    }
    Ok(())
}

impl InitialDatum {
    pub fn new(n: usize) -> Self {
        InitialDatum {
            n,
            components: Vec::new(),
        }
    }

    pub fn push(&mut self, kind: ComponentKind, weight: f64) -> Result<()> {
        let n = self.n;
        let profile = match &kind {
            ComponentKind::RadialBump { shape } => Some(RadialProfile::bump(n, shape.radius, shape.order)?),
            ComponentKind::DisplacedBump { shape, center } => {
                if center.n != n {
                    return Err(Error::DimensionMismatch {
                        left: center.n,
                        right: n,
                    });
                }
                check_axial(center)?;
                Some(RadialProfile::bump(n, shape.radius, shape.order)?)
            }
            ComponentKind::DisplacedHeat { s, center } => {
                if !(*s > 0.0) {
                    return Err(Error::Config(format!("heat component needs s > 0, got {s}")));
                }
                if center.n != n {
                    return Err(Error::DimensionMismatch {
                        left: center.n,
                        right: n,
                    });
                }
                check_axial(center)?;
                None
            }
        };
        if !weight.is_finite() {
            return Err(Error::Config("component weight must be finite".into()));
        }
        self.components.push(Component {
            kind,
            weight,
            profile,
        });
        Ok(())
    }

    pub fn with(mut self, kind: ComponentKind, weight: f64) -> Result<Self> {
        self.push(kind, weight)?;
        Ok(self)
    }

    /// Unit-mass bump of radius `a` at the origin.
    pub fn radial_bump(n: usize, a: f64) -> Result<Self> {
        InitialDatum::new(n).with(
            ComponentKind::RadialBump {
                shape: BumpShape {
                    radius: a,
                    ..Default::default()
                },
            },
            1.0,
        )
    }

    /// Unit-mass bump of radius `a` at distance `dist` along `+e_1`.
    pub fn displaced_bump(n: usize, a: f64, dist: f64) -> Result<Self> {
        InitialDatum::new(n).with(
            ComponentKind::DisplacedBump {
                shape: BumpShape {
                    radius: a,
                    ..Default::default()
                },
                center: HPoint::axial(n, dist, 0.0)?,
            },
            1.0,
        )
    }

    /// `h_s(d(·, c))` with `c` at distance `dist` along `+e_1`.
    pub fn displaced_heat(n: usize, s: f64, dist: f64) -> Result<Self> {
        InitialDatum::new(n).with(
            ComponentKind::DisplacedHeat {
                s,
                center: HPoint::axial(n, dist, 0.0)?,
            },
            1.0,
        )
    }

    pub fn is_radial(&self) -> bool {
        self.components.iter().all(|c| c.center(self.n).r == 0.0)
    }

    /// Total mass `∫ u_0`.
    pub fn total_mass(&self) -> f64 {
        // every profile has unit mass
        self.components.iter().map(|c| c.weight).sum()
    }

    /// Radial breakpoints covering the support, for quadrature.
    pub fn radial_breaks(&self) -> Vec<f64> {
        let mut pts = vec![0.0];
        for c in &self.components {
            let s = c.center(self.n).r;
            let reach = c.reach(self.n);
            pts.push((s - reach).max(0.0));
            pts.push(s);
            pts.push(s + reach);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        pts
    }

    /// `u_0` at the point at radius `r` whose direction makes angle `ang`
    /// with `+e_1`.
    pub fn value_at(&self, r: f64, ang: CosAngle) -> Result<LogVal> {
        let mut acc = LogVal::ZERO;
        for c in &self.components {
            let center = c.center(self.n);
            let d = distance_polar(r, center.r, relative_angle(&center, ang));
            acc = acc.add(c.profile_at(self.n, d)?.scale(c.weight));
        }
        Ok(acc)
    }
}

/// Angle between a direction (given by its angle to `+e_1`) and the
/// direction of an axial center.
pub fn relative_angle(center: &HPoint, ang: CosAngle) -> CosAngle {
    if center.omega[0] < 0.0 {
        CosAngle {
            cos: -ang.cos,
            one_minus: ang.one_plus,
            one_plus: ang.one_minus,
        }
    } else {
        ang
    }
}

/// Exponent in the admissibility weight: `(n-1)/p` for `p <= 2`,
/// `(n-1)/2` for `p >= 2`.
pub fn weight_exponent(n: usize, p: f64) -> f64 {
    (n as f64 - 1.0) / p.min(2.0)
}

/// `∫ |u_0| e^{q d(·,O)} dvol` with `q` from [`weight_exponent`].
pub fn weight_norm(u0: &InitialDatum, p: f64) -> Result<f64> {
    if u0.components.is_empty() {
        return Ok(0.0);
    }
    let q = weight_exponent(u0.n, p);
    let v = volume_integral(u0.n, &u0.radial_breaks(), 1e-9, |r, a| {
        Ok(u0.value_at(r, a)?.abs() * LogVal::from_log(q * r))
    })?;
    let w = v.to_f64();
    if !w.is_finite() {
        return Err(Error::Divergence("weighted L1 norm is not finite".into()));
    }
    Ok(w)
}

/// `M_p(u_0)(ω)` for `1 <= p <= 2`, via the mean-value reduction.
pub fn mass_low(u0: &InitialDatum, p: f64, omega: &[f64]) -> Result<f64> {
    LowMass::new(u0, p)?.eval(omega)
}

/// Precomputed transforms for repeated evaluation of `M_p(ω)`.
#[derive(Debug, Clone)]
pub struct LowMass {
    pub p: f64,
    /// `(weight · Hf(i(2/p-1)ρ), center)` per component.
    terms: Vec<(f64, HPoint)>,
    exponent: f64,
}

impl LowMass {
    pub fn new(u0: &InitialDatum, p: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::Domain(format!("low-regime mass needs 1 <= p <= 2, got {p}")));
        }
        weight_norm(u0, p)?;
        let n = u0.n;
        let lam = Complex64::new(0.0, (2.0 / p - 1.0) * rho(n));
        let mut terms = Vec::new();
        for c in &u0.components {
            terms.push((c.weight * c.transform(n, lam)?.re, c.center(n)));
        }
        Ok(LowMass {
            p,
            terms,
            exponent: (n as f64 - 1.0) / p,
        })
    }

    pub fn eval(&self, omega: &[f64]) -> Result<f64> {
        let mut acc = 0.0;
        for (w, c) in &self.terms {
            if c.r == 0.0 {
                acc += w;
                continue;
            }
            if omega.len() != c.n {
                return Err(Error::DimensionMismatch {
                    left: omega.len(),
                    right: c.n,
                });
            }
            let ang = CosAngle::between(omega, &c.omega);
            acc += w * (-self.exponent * ln_poisson_base(c.r, ang)).exp();
        }
        Ok(acc)
    }

    /// Same, for a direction given by its angle to `+e_1`.
    pub fn eval_angle(&self, ang: CosAngle) -> f64 {
        self.terms
            .iter()
            .map(|(w, c)| {
                if c.r == 0.0 {
                    *w
                } else {
                    w * (-self.exponent * ln_poisson_base(c.r, relative_angle(c, ang))).exp()
                }
            })
            .sum()
    }
}

/// `M_p(u_0)(x)` for `p >= 2`, via the mean-value reduction.
pub fn mass_high(u0: &InitialDatum, p: f64, x: &HPoint) -> Result<f64> {
    HighMass::new(u0, p)?.eval(x)
}

#[derive(Debug, Clone)]
pub struct HighMass {
    pub p: f64,
    n: usize,
    /// `(weight · Hf(0), center)` per component.
    terms: Vec<(f64, HPoint)>,
}

impl HighMass {
    pub fn new(u0: &InitialDatum, p: f64) -> Result<Self> {
        if !(p >= 2.0) {
            return Err(Error::Domain(format!("high-regime mass needs p >= 2, got {p}")));
        }
        weight_norm(u0, p)?;
        let n = u0.n;
        let mut terms = Vec::new();
        for c in &u0.components {
            terms.push((c.weight * c.transform(n, Complex64::new(0.0, 0.0))?.re, c.center(n)));
        }
        Ok(HighMass { p, n, terms })
    }

    pub fn eval(&self, x: &HPoint) -> Result<f64> {
        let ang = CosAngle::from_cos(x.omega[0]);
        let ang = CosAngle {
            one_minus: 0.5 * ((x.omega[0] - 1.0).powi(2) + x.omega[1..].iter().map(|v| v * v).sum::<f64>()),
            one_plus: 0.5 * ((x.omega[0] + 1.0).powi(2) + x.omega[1..].iter().map(|v| v * v).sum::<f64>()),
            ..ang
        };
        self.eval_polar(x.r, ang, |d| phi0(self.n, d))
    }

    /// Evaluation at radius `r` and angle `ang` to `+e_1`, with a caller
    /// supplied `φ_0` (for tabulated versions).
    pub fn eval_polar(
        &self,
        r: f64,
        ang: CosAngle,
        mut ground: impl FnMut(f64) -> Result<LogVal>,
    ) -> Result<f64> {
        let base = ground(r)?;
        let mut acc = 0.0;
        for (w, c) in &self.terms {
            if c.r == 0.0 {
                acc += w;
                continue;
            }
            let d = distance_polar(r, c.r, relative_angle(c, ang));
            acc += w * (ground(d)? / base).to_f64();
        }
        Ok(acc)
    }
}

/// `M̃_2(u_0)(ω)`: the Poisson-power mass with exponent `(n-1)/2`.
pub fn mass_alt2(u0: &InitialDatum, omega: &[f64]) -> Result<f64> {
    mass_low(u0, 2.0, omega)
}

/// `∫ u_0(y) K(y) dy` by direct quadrature, where the kernel `K` is given
/// as a function of `(d(y,O), angle between y and pole)`.
pub fn pair_direct(
    u0: &InitialDatum,
    pole: &[f64],
    tol: f64,
    mut kernel: impl FnMut(f64, CosAngle) -> Result<LogVal>,
) -> Result<f64> {
    let n = u0.n;
    let cos_b = pole[0].clamp(-1.0, 1.0);
    let sin_b = (1.0 - cos_b * cos_b).max(0.0).sqrt();
    let aligned = u0.is_radial() || sin_b < 1e-14;
    let flip = cos_b < 0.0;
    let v = volume_integral(n, &u0.radial_breaks(), tol, |r, a| {
        let k = kernel(r, a)?;
        if k.is_zero() {
            return Ok(k);
        }
        let u = if aligned {
            let a1 = if flip {
                CosAngle {
                    cos: -a.cos,
                    one_minus: a.one_plus,
                    one_plus: a.one_minus,
                }
            } else {
                a
            };
            u0.value_at(r, a1)?
        } else {
            // average over the azimuth around the pole
            let st = (a.one_minus * a.one_plus).sqrt();
            let at = |eta: f64| CosAngle::from_cos(a.cos * cos_b + st * sin_b * eta);
            if n == 2 {
                u0.value_at(r, at(1.0))?.add(u0.value_at(r, at(-1.0))?).scale(0.5)
            } else {
                // normalized average over S^{n-2}: weight sin^{n-3} φ on [0, π]
                let w = (n - 3) as i32;
                let out = Adaptive::with_tol(tol * 0.1).splits(2).try_integrate(&[0.0, PI], |phi| {
                    Ok(u0.value_at(r, at(phi.cos()))?.scale(phi.sin().powi(w)))
                })?;
                out.value.scale(sphere_norm(n - 1))
            }
        };
        Ok(u * k)
    })?;
    Ok(v.to_f64())
}

/// [`mass_low`] by direct quadrature of the Poisson-power integral.
pub fn mass_low_direct(u0: &InitialDatum, p: f64, omega: &[f64], tol: f64) -> Result<f64> {
    let q = (u0.n as f64 - 1.0) / p;
    pair_direct(u0, omega, tol, |s, a| {
        Ok(LogVal::from_log(-q * ln_poisson_base(s, a)))
    })
}

/// [`mass_high`] by direct quadrature of `(u_0 * φ_0)(x)/φ_0(x)`.
pub fn mass_high_direct(u0: &InitialDatum, x: &HPoint, tol: f64) -> Result<f64> {
    let n = u0.n;
    let base = phi0(n, x.r)?;
    pair_direct(u0, &x.omega, tol, |s, a| {
        Ok(phi0(n, distance_polar(x.r, s, a))? / base)
    })
}

fn family_check(u0: &InitialDatum, p: f64, s_exp: f64) -> Result<()> {
    if !u0.is_radial() {
        return Err(Error::Domain("family mass needs radial data".into()));
    }
    if !(1.0..=2.0).contains(&p) || !(s_exp > 0.0) {
        return Err(Error::Domain(format!("family mass needs 1 <= p <= 2 and s > 0 (p={p}, s={s_exp})")));
    }
    Ok(())
}

/// `M_p + ∫ u_0(y) φ_{i(2/p-1)ρ}(y) / (1 + d(x,y)^s) dy` for radial `u_0`.
pub fn mass_family_s(u0: &InitialDatum, p: f64, s_exp: f64, x: &HPoint) -> Result<f64> {
    family_check(u0, p, s_exp)?;
    let n = u0.n;
    let lam = Complex64::new(0.0, (2.0 / p - 1.0) * rho(n));
    let m = mass_low(u0, p, &x.omega)?;
    let extra = pair_direct(u0, &x.omega, 1e-10, |s, a| {
        let d = distance_polar(x.r, s, a);
        Ok(phi_lambda(n, lam, s)?.re_log().scale(1.0 / (1.0 + d.powf(s_exp))))
    })?;
    Ok(m + extra)
}

/// The same quantity as one integral, `∫ u_0 φ (2 + d^s)/(1 + d^s)`.
pub fn mass_family_s_direct(u0: &InitialDatum, p: f64, s_exp: f64, x: &HPoint) -> Result<f64> {
    family_check(u0, p, s_exp)?;
    let n = u0.n;
    let lam = Complex64::new(0.0, (2.0 / p - 1.0) * rho(n));
    pair_direct(u0, &x.omega, 1e-10, |s, a| {
        let d = distance_polar(x.r, s, a);
        let ds = d.powf(s_exp);
        Ok(phi_lambda(n, lam, s)?.re_log().scale((2.0 + ds) / (1.0 + ds)))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum MassChoice {
    Low,
    High,
    Alt2,
    FamilyS { s_exp: f64 },
    Constant { value: f64 },
}

impl MassChoice {
    /// Low for `p < 2`, high for `p >= 2`.
    pub fn default_for(p: f64) -> Self {
        if p < 2.0 {
            MassChoice::Low
        } else {
            MassChoice::High
        }
    }

    pub fn name(&self) -> String {
        match self {
            MassChoice::Low => "low".into(),
            MassChoice::High => "high".into(),
            MassChoice::Alt2 => "alt2".into(),
            MassChoice::FamilyS { s_exp } => format!("family_s:{s_exp}"),
            MassChoice::Constant { value } => format!("constant:{value}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axis(n: usize, sign: f64) -> Vec<f64> {
        let mut v = vec![0.0; n];
        v[0] = sign;
        v
    }

    #[test]
    fn weight_norm_examples() {
        let u = InitialDatum::radial_bump(3, 1.0).unwrap();
        let w = weight_norm(&u, 1.0).unwrap();
        assert!(w >= 1.0 && w <= 2f64.exp(), "{w}");
        assert_eq!(weight_norm(&InitialDatum::new(3), 1.0).unwrap(), 0.0);
    }

    #[test]
    fn weight_norm_heat_two_frames() {
        // ∫ h_1(d(·,c)) e^{2 d(·,O)}: origin frame vs frame centered at c
        let n = 3;
        let u = InitialDatum::displaced_heat(n, 1.0, 2.0).unwrap();
        let a = weight_norm(&u, 1.0).unwrap();
        let b = volume_integral(n, &[0.0, 2.0, 5.0, 10.0, 16.0], 1e-10, |rr, ang| {
            let d = distance_polar(2.0, rr, ang);
            Ok(heat_kernel(n, 1.0, rr)? * LogVal::from_log(2.0 * d))
        })
        .unwrap()
        .to_f64();
        assert!((a / b - 1.0).abs() < 1e-7, "{a} {b}");
    }

    #[test]
    fn radial_reduction_low() {
        for n in [2, 3] {
            let u = InitialDatum::radial_bump(n, 1.0).unwrap();
            for p in [1.0, 1.5, 2.0] {
                let lam = Complex64::new(0.0, (2.0 / p - 1.0) * rho(n));
                let h = u.components[0].transform(n, lam).unwrap().re;
                for k in 0..3 {
                    let th = PI * k as f64 / 2.0;
                    let mut om = vec![0.0; n];
                    om[0] = th.cos();
                    om[1] = th.sin();
                    let d = mass_low_direct(&u, p, &om, 1e-10).unwrap();
                    assert!((d - h).abs() < 1e-8 * h, "n={n} p={p}: {d} {h}");
                }
                if p == 1.0 {
                    assert!((h - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn point_like_bump_has_unit_mass_function() {
        let u = InitialDatum::radial_bump(3, 1e-3).unwrap();
        for p in [1.0, 1.5, 2.0] {
            let m = mass_low(&u, p, &axis(3, 1.0)).unwrap();
            assert!((m - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn displaced_heat_direct_vs_reduced() {
        let n = 3;
        let u = InitialDatum::displaced_heat(n, 1.0, 2.0).unwrap();
        let plus = mass_low(&u, 1.0, &axis(n, 1.0)).unwrap();
        let minus = mass_low(&u, 1.0, &axis(n, -1.0)).unwrap();
        assert!((plus - minus).abs() > 1.0);
        for (om, v) in [(axis(n, 1.0), plus), (axis(n, -1.0), minus)] {
            let d1 = mass_low_direct(&u, 1.0, &om, 1e-8).unwrap();
            let d2 = mass_low_direct(&u, 1.0, &om, 1e-10).unwrap();
            assert!((d1 - d2).abs() < 1e-6 * d2);
            assert!((d2 - v).abs() < 1e-7 * v, "{d2} {v}");
        }
        // an off-axis direction exercises the azimuthal average
        let om = vec![0.6, 0.8, 0.0];
        let d = mass_low_direct(&u, 1.5, &om, 1e-8).unwrap();
        let v = mass_low(&u, 1.5, &om).unwrap();
        assert!((d - v).abs() < 1e-6 * v, "{d} {v}");
    }

    #[test]
    fn high_mass_examples() {
        let n = 3;
        let u = InitialDatum::radial_bump(n, 1.0).unwrap();
        let h0 = u.components[0].transform(n, Complex64::new(0.0, 0.0)).unwrap().re;
        for r in [0.0, 3.0] {
            let x = HPoint::axial(n, r, 0.4).unwrap();
            assert!((mass_high(&u, 2.0, &x).unwrap() - h0).abs() < 1e-12);
            let d = mass_high_direct(&u, &x, 1e-10).unwrap();
            assert!((d - h0).abs() < 1e-8, "{d} {h0}");
        }
        let ub = InitialDatum::displaced_bump(n, 0.5, 2.0).unwrap();
        let x = HPoint::axial(n, 30.0, 0.0).unwrap();
        let v = mass_high(&ub, 3.0, &x).unwrap();
        let band = (n as f64 - 1.0).exp();
        assert!(v > 1.0 / band && v < band, "{v}");
        let d = mass_high_direct(&ub, &x, 1e-10).unwrap();
        assert!((d - v).abs() < 1e-7 * v, "{d} {v}");
        assert!(v <= weight_norm(&ub, 3.0).unwrap());
    }

    #[test]
    fn alt2_matches_low_at_two() {
        let u = InitialDatum::displaced_bump(3, 0.5, 1.0).unwrap();
        let om = axis(3, -1.0);
        assert_eq!(mass_alt2(&u, &om).unwrap(), mass_low(&u, 2.0, &om).unwrap());
        let r = InitialDatum::radial_bump(3, 1.0).unwrap();
        let h0 = r.components[0].transform(3, Complex64::new(0.0, 0.0)).unwrap().re;
        assert!((mass_alt2(&r, &om).unwrap() - h0).abs() < 1e-12);
    }

    #[test]
    fn family_s_examples() {
        let n = 3;
        let u = InitialDatum::radial_bump(n, 1.0).unwrap();
        let m = mass_low(&u, 1.0, &axis(n, 1.0)).unwrap();
        let far = HPoint::axial(n, 100.0, 0.0).unwrap();
        let v = mass_family_s(&u, 1.0, 2.0, &far).unwrap();
        assert!((v - m).abs() < 1e-3);
        let o = HPoint::origin(n);
        let a = mass_family_s(&u, 1.0, 1.0, &o).unwrap();
        let b = mass_family_s_direct(&u, 1.0, 1.0, &o).unwrap();
        assert!((a - b).abs() < 1e-8 * b, "{a} {b}");
        assert!(mass_family_s(&InitialDatum::displaced_bump(n, 0.5, 1.0).unwrap(), 1.0, 2.0, &o).is_err());
    }

    #[test]
    fn mass_bounded_by_weight_norm() {
        let n = 3;
        let u = InitialDatum::displaced_heat(n, 1.0, 2.0).unwrap();
        for p in [1.0, 1.5, 2.0] {
            let w = weight_norm(&u, p).unwrap();
            let lm = LowMass::new(&u, p).unwrap();
            for k in 0..=8 {
                let th = PI * k as f64 / 8.0;
                let v = lm.eval_angle(CosAngle::from_theta(th));
                assert!(v.abs() <= w, "p={p} θ={th}: {v} {w}");
            }
        }
    }

    #[test]
    fn masses_are_linear() {
        let n = 3;
        let a = InitialDatum::displaced_heat(n, 1.0, 2.0).unwrap();
        let b = InitialDatum::displaced_bump(n, 0.5, 1.0).unwrap();
        let both = InitialDatum::new(n)
            .with(a.components[0].kind.clone(), 0.3)
            .unwrap()
            .with(b.components[0].kind.clone(), -1.7)
            .unwrap();
        let om = vec![0.6, 0.8, 0.0];
        let l = mass_low(&both, 1.5, &om).unwrap();
        let e = 0.3 * mass_low(&a, 1.5, &om).unwrap() - 1.7 * mass_low(&b, 1.5, &om).unwrap();
        assert!((l - e).abs() < 1e-12 * e.abs().max(1.0));
        let x = HPoint::axial(n, 5.0, 1.0).unwrap();
        let h = mass_high(&both, 2.0, &x).unwrap();
        let e = 0.3 * mass_high(&a, 2.0, &x).unwrap() - 1.7 * mass_high(&b, 2.0, &x).unwrap();
        assert!((h - e).abs() < 1e-12 * e.abs().max(1.0));
    }

    #[test]
    fn off_axis_centers_rejected() {
        let c = HPoint::axial(3, 1.0, 0.5).unwrap();
        let r = InitialDatum::new(3).with(ComponentKind::DisplacedHeat { s: 1.0, center: c }, 1.0);
        assert!(r.is_err());
        let c = HPoint::axial(3, 1.0, 0.0).unwrap();
        assert!(InitialDatum::new(3)
            .with(ComponentKind::DisplacedHeat { s: 0.0, center: c }, 1.0)
            .is_err());
    }
}
