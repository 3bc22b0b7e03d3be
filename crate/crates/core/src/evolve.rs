//! Heat evolution of initial data and the normalized error
//! `E_p(t) = ‖u(t) - M h_t‖_p / ‖h_t‖_p`.

use crate::error::{Error, Result};
use crate::heatkernel::{critical_region, h_exact_h3, h_spectral, lp_norm_log};
use crate::hgeom::{distance_polar, volume_integral, CosAngle};
use crate::logval::LogVal;
use crate::quad::GaussLegendre;
use crate::rootsys::ln_sinh;
use crate::special::sphere_area;
use crate::massfn::{
    mass_family_s, relative_angle, weight_norm, ComponentKind, HighMass, InitialDatum, LowMass,
    MassChoice,
};
use crate::schedule::RegionSchedule;
use crate::spherical::{phi0, rho};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// `ln f` on a uniform grid with 4-point Lagrange interpolation.
#[derive(Debug, Clone)]
pub struct LogTable {
    step: f64,
    values: Vec<f64>,
}

impl LogTable {
    /// Tabulate `ln f` on `[0, r_max]`; evaluation runs in parallel.
    pub fn build(
        r_max: f64,
        step: f64,
        f: impl Fn(f64) -> Result<LogVal> + Sync,
    ) -> Result<Self> {
        let count = (r_max / step).ceil() as usize + 4;
        let values: Result<Vec<f64>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let v = f(i as f64 * step)?;
                if v.sign() <= 0 {
                    return Err(Error::Domain("tabulated function must be positive".into()));
                }
                Ok(v.ln_abs())
            })
            .collect();
        Ok(LogTable {
            step,
            values: values?,
        })
    }

    pub fn r_max(&self) -> f64 {
        (self.values.len() - 4) as f64 * self.step
    }

    pub fn ln_eval(&self, r: f64) -> Result<f64> {
        let x = r / self.step;
        let len = self.values.len();
        if !(x >= 0.0) || x > (len - 2) as f64 {
            return Err(Error::Domain(format!("table lookup at {r} outside [0, {}]", self.r_max())));
        }
        let i = (x.floor() as usize).clamp(1, len - 3) - 1;
        let u = x - (i + 1) as f64;
        let v = &self.values[i..i + 4];
        // nodes at -1, 0, 1, 2
        let l0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let l1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let l2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let l3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        Ok(l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3])
    }

    pub fn eval(&self, r: f64) -> Result<LogVal> {
        Ok(LogVal::from_log(self.ln_eval(r)?))
    }
}

/// Heat kernel at a fixed time: closed form for `n = 3`, a table of the
/// spectral route otherwise. Tables extend below `r = 0` by evenness.
#[derive(Debug, Clone)]
pub enum Kernel {
    Exact { t: f64 },
    Table { t: f64, table: LogTable },
}

impl Kernel {
    pub fn new(n: usize, t: f64, r_max: f64) -> Result<Self> {
        if n == 3 {
            return Ok(Kernel::Exact { t });
        }
        let step = 0.02 * t.sqrt().max(1.0);
        Ok(Kernel::Table {
            t,
            table: LogTable::build(r_max, step, |r| h_spectral(n, t, r))?,
        })
    }

    pub fn time(&self) -> f64 {
        match self {
            Kernel::Exact { t } | Kernel::Table { t, .. } => *t,
        }
    }

    pub fn eval(&self, r: f64) -> Result<LogVal> {
        match self {
            Kernel::Exact { t } => h_exact_h3(*t, r),
            Kernel::Table { table, .. } => table.eval(r),
        }
    }
}

/// Ground spherical function, tabulated for `n != 3`.
#[derive(Debug, Clone)]
pub enum Ground {
    Exact,
    Table(LogTable),
}

impl Ground {
    pub fn new(n: usize, r_max: f64) -> Result<Self> {
        if n == 3 {
            return Ok(Ground::Exact);
        }
        Ok(Ground::Table(LogTable::build(r_max, 0.02, |r| phi0(n, r))?))
    }

    pub fn eval(&self, r: f64) -> Result<LogVal> {
        match self {
            Ground::Exact => phi0(3, r),
            Ground::Table(t) => t.eval(r),
        }
    }
}

/// `u(t, ·)` for a datum, as a function of `(r, angle to +e_1)`.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub n: usize,
    pub t: f64,
    /// One entry per component: weight, center, and the radial profile of
    /// the evolved component around its center.
    parts: Vec<(f64, crate::hgeom::HPoint, Kernel)>,
}

/// `U_t(ρ) = ∫ f(d(y,O)) h_t(d(y,x)) dy` for `x` at distance `ρ`, as an
/// iterated integral over the bump radius and the polar angle on `[0, π]`.
/// Fixed composite Gauss-Legendre; panels shrink with `√t` so the kernel
/// is resolved across the bump.
pub fn bump_flow(u0: &InitialDatum, index: usize, rho_dist: f64, h: &Kernel) -> Result<LogVal> {
    let n = u0.n;
    let comp = &u0.components[index];
    let reach = comp.reach(n);
    let panels = (2.0 * reach / h.time().sqrt()).ceil().max(2.0) as usize;
    let gl = GaussLegendre::cached(BUMP_ORDER);
    let mut failure = None;
    let mut outer = |s: f64| -> LogVal {
        let f = match comp.profile_at(n, s) {
            Ok(f) if !f.is_zero() => f,
            Ok(_) => return LogVal::ZERO,
            Err(e) => {
                failure = Some(e);
                return LogVal::ZERO;
            }
        };
        let inner = gl.composite(0.0, PI, panels, &mut |th| {
            let w = if n == 2 { 1.0 } else { th.sin().powi(n as i32 - 2) };
            match h.eval(distance_polar(rho_dist, s, CosAngle::from_theta(th))) {
                Ok(v) => v.scale(w),
                Err(e) => {
                    failure = Some(e);
                    LogVal::ZERO
                }
            }
        });
        f * inner * LogVal::from_log((n - 1) as f64 * ln_sinh(s))
    };
    let v = gl.composite(0.0, reach, panels, &mut outer);
    match failure {
        Some(e) => Err(e),
        None => Ok(v * LogVal::from_f64(sphere_area(n - 2))),
    }
}

const BUMP_ORDER: usize = 24;

impl Evolution {
    /// Prepare `u(t)` for points up to distance `r_max` from the origin.
    pub fn new(u0: &InitialDatum, t: f64, r_max: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("time must be positive, got {t}")));
        }
        let n = u0.n;
        let mut parts = Vec::new();
        for (i, c) in u0.components.iter().enumerate() {
            let center = c.center(n);
            let span = r_max + center.r + c.reach(n) + 1.0;
            let kernel = match &c.kind {
                ComponentKind::DisplacedHeat { s, .. } => Kernel::new(n, t + s, span)?,
                _ => {
                    let h = Kernel::new(n, t, span + c.reach(n))?;
                    let step = 0.02 * t.sqrt().max(1.0);
                    let table = LogTable::build(span, step, |rr| bump_flow(u0, i, rr, &h))?;
                    Kernel::Table { t, table }
                }
            };
            parts.push((c.weight, center, kernel));
        }
        Ok(Evolution { n, t, parts })
    }

    pub fn eval(&self, r: f64, ang: CosAngle) -> Result<LogVal> {
        let mut acc = LogVal::ZERO;
        for (w, c, k) in &self.parts {
            let d = distance_polar(r, c.r, relative_angle(c, ang));
            acc = acc.add(k.eval(d)?.scale(*w));
        }
        Ok(acc)
    }
}

/// `u(t, x)` for a single point, without tables where avoidable.
pub fn solve(u0: &InitialDatum, t: f64, r: f64, ang: CosAngle) -> Result<LogVal> {
    let n = u0.n;
    let mut acc = LogVal::ZERO;
    for (i, c) in u0.components.iter().enumerate() {
        let center = c.center(n);
        let d = distance_polar(r, center.r, relative_angle(&center, ang));
        let v = match &c.kind {
            ComponentKind::DisplacedHeat { s, .. } => {
                if n == 3 {
                    h_exact_h3(t + s, d)?
                } else {
                    h_spectral(n, t + s, d)?
                }
            }
            _ => {
                let h = Kernel::new(n, t, d + c.reach(n) + 1.0)?;
                bump_flow(u0, i, d, &h)?
            }
        };
        acc = acc.add(v.scale(c.weight));
    }
    Ok(acc)
}

/// Mass function prepared for evaluation at `(r, angle to +e_1)`.
#[derive(Debug, Clone)]
pub enum PreparedMass {
    Low(LowMass),
    High(HighMass, Ground),
    /// Radial-only masses tabulated in `r`.
    Radial(LogTableSigned),
    Constant(f64),
}

/// Signed values of a function of `r`, tabulated uniformly in
/// `x = ln(1 + r)` with 4-point interpolation. Suits functions that settle
/// to a limit as `r` grows.
#[derive(Debug, Clone)]
pub struct LogTableSigned {
    step: f64,
    values: Vec<f64>,
}

impl LogTableSigned {
    pub fn build(r_max: f64, step: f64, f: impl Fn(f64) -> Result<f64> + Sync) -> Result<Self> {
        let count = (r_max.ln_1p() / step).ceil() as usize + 4;
        let values: Result<Vec<f64>> = (0..count)
            .into_par_iter()
            .map(|i| f((i as f64 * step).exp_m1()))
            .collect();
        Ok(LogTableSigned {
            step,
            values: values?,
        })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let x = r.max(0.0).ln_1p() / self.step;
        let len = self.values.len();
        let i = (x.floor() as usize).clamp(1, len - 3) - 1;
        let u = x - (i + 1) as f64;
        let v = &self.values[i..i + 4];
        let l0 = -u * (u - 1.0) * (u - 2.0) / 6.0;
        let l1 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        let l2 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        let l3 = (u + 1.0) * u * (u - 1.0) / 6.0;
        l0 * v[0] + l1 * v[1] + l2 * v[2] + l3 * v[3]
    }
}

impl PreparedMass {
    pub fn new(u0: &InitialDatum, p: f64, choice: MassChoice, r_max: f64) -> Result<Self> {
        let n = u0.n;
        Ok(match choice {
            MassChoice::Low => PreparedMass::Low(LowMass::new(u0, p)?),
            MassChoice::Alt2 => PreparedMass::Low(LowMass::new(u0, 2.0)?),
            MassChoice::High => {
                PreparedMass::High(HighMass::new(u0, p)?, Ground::new(n, r_max + 2.0 * max_center(u0) + 2.0)?)
            }
            MassChoice::FamilyS { s_exp } => {
                weight_norm(u0, p)?;
                PreparedMass::Radial(LogTableSigned::build(r_max, 0.025, |r| {
                    let x = crate::hgeom::HPoint::axial(n, r, 0.0)?;
                    mass_family_s(u0, p, s_exp, &x)
                })?)
            }
            MassChoice::Constant { value } => PreparedMass::Constant(value),
        })
    }

    pub fn eval(&self, r: f64, ang: CosAngle) -> Result<f64> {
        match self {
            PreparedMass::Low(m) => Ok(m.eval_angle(ang)),
            PreparedMass::High(m, g) => m.eval_polar(r, ang, |d| g.eval(d)),
            PreparedMass::Radial(t) => Ok(t.eval(r)),
            PreparedMass::Constant(v) => Ok(*v),
        }
    }
}

fn max_center(u0: &InitialDatum) -> f64 {
    u0.components
        .iter()
        .map(|c| c.center(u0.n).r + c.reach(u0.n))
        .fold(0.0, f64::max)
}

/// Pieces of one `E_p(t)` evaluation.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ErrorBreakdown {
    pub p: f64,
    pub t: f64,
    /// `E_p(t)`.
    pub e: f64,
    /// `∫_{region} |u - M h_t|^p / ‖h_t‖_p^p` (zero for `p = ∞`).
    pub region_pow: f64,
    /// Same over the complement of the region.
    pub tail_pow: f64,
    /// Radii bounding the critical region.
    pub region_lo: f64,
    pub region_hi: f64,
    /// Points whose difference lost more than 12 digits to cancellation.
    pub cancellation_points: usize,
}

/// Numerical settings for `E_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub rel_tol: f64,
    /// Grid size per axis for the `p = ∞` search.
    pub sup_grid: usize,
    pub sup_levels: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel_tol: 1e-6,
            sup_grid: 48,
            sup_levels: 3,
        }
    }
}

/// `E_p(t)` for one mass choice.
pub fn normalized_error(
    u0: &InitialDatum,
    p: f64,
    t: f64,
    choice: MassChoice,
    sched: &RegionSchedule,
    tol: &Tolerances,
) -> Result<ErrorBreakdown> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p must be >= 1, got {p}")));
    }
    let n = u0.n;
    let (lo, hi) = critical_region(n, p, t, sched);
    let spread = max_center(u0);
    let r_top = if p.is_infinite() {
        hi + 8.0 * t.sqrt() + 2.0 * spread
    } else {
        ((2.0 / p - 1.0) * (n as f64 - 1.0) * t).max(0.0) + 16.0 * (2.0 * t / p).sqrt() + 20.0 + spread
    };
    let evo = Evolution::new(u0, t, r_top)?;
    let kernel = Kernel::new(n, t, r_top)?;
    let mass = PreparedMass::new(u0, p, choice, r_top + 1.0)?;
    let mut cancel = 0usize;
    let diff = |r: f64, a: CosAngle, cancel: &mut usize| -> Result<LogVal> {
        let h = kernel.eval(r)?;
        let u = evo.eval(r, a)?;
        let m = mass.eval(r, a)?;
        let (d, flagged) = u.add_checked(-(h.scale(m)));
        if flagged {
            *cancel += 1;
        }
        Ok(d.abs())
    };
    if p.is_infinite() {
        let h0 = kernel.eval(0.0)?;
        let sup = sup_search(r_top, tol, |r, a| diff(r, a, &mut cancel))?;
        return Ok(ErrorBreakdown {
            p,
            t,
            e: (sup / h0).to_f64(),
            region_pow: 0.0,
            tail_pow: 0.0,
            region_lo: lo,
            region_hi: hi,
            cancellation_points: cancel,
        });
    }
    let norm_p = lp_norm_log(n, t, p)?.powf_abs(p);
    let mut pieces = [LogVal::ZERO; 2];
    let peak = ((2.0 / p - 1.0) * (n as f64 - 1.0) * t).max(0.0);
    let w = (2.0 * t / p).sqrt();
    let mut breaks = vec![0.0, lo, hi, r_top];
    for j in -16..=16 {
        breaks.push(peak + j as f64 * w);
    }
    for c in &u0.components {
        let s = c.center(n).r;
        breaks.push(s);
        breaks.push(s + c.reach(n));
    }
    breaks.retain(|x| (0.0..=r_top).contains(x));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        let inside = a >= lo - 1e-12 && b <= hi + 1e-12;
        let v = volume_integral(n, &[a, b], tol.rel_tol, |r, ang| {
            Ok(diff(r, ang, &mut cancel)?.powf_abs(p))
        })?;
        let k = if inside { 0 } else { 1 };
        pieces[k] = pieces[k].add(v);
    }
    let region = (pieces[0] / norm_p).to_f64();
    let tail = (pieces[1] / norm_p).to_f64();
    Ok(ErrorBreakdown {
        p,
        t,
        e: (region + tail).powf(1.0 / p),
        region_pow: region,
        tail_pow: tail,
        region_lo: lo,
        region_hi: hi,
        cancellation_points: cancel,
    })
}

/// Maximum of `f` over `[0, r_top] × [0, π]` on a grid, refined around the
/// running maximum by a factor 4 per level.
fn sup_search(
    r_top: f64,
    tol: &Tolerances,
    mut f: impl FnMut(f64, CosAngle) -> Result<LogVal>,
) -> Result<LogVal> {
    let g = tol.sup_grid.max(4);
    let mut r_lo = 0.0;
    let mut r_hi = r_top;
    let mut th_lo = 0.0;
    let mut th_hi = PI;
    let mut best = LogVal::ZERO;
    let mut best_at = (0.0, 0.0);
    for _ in 0..=tol.sup_levels {
        for i in 0..=g {
            let r = r_lo + (r_hi - r_lo) * i as f64 / g as f64;
            for j in 0..=g {
                let th = th_lo + (th_hi - th_lo) * j as f64 / g as f64;
                let v = f(r, CosAngle::from_theta(th))?;
                if v.cmp_value(&best).is_gt() {
                    best = v;
                    best_at = (r, th);
                }
            }
        }
        let dr = (r_hi - r_lo) / g as f64;
        let dth = (th_hi - th_lo) / g as f64;
        // new box: ±2 cells around the maximum, i.e. 4/g of the old width
        r_lo = (best_at.0 - 2.0 * dr).max(0.0);
        r_hi = (best_at.0 + 2.0 * dr).min(r_top);
        th_lo = (best_at.1 - 2.0 * dth).max(0.0);
        th_hi = (best_at.1 + 2.0 * dth).min(PI);
    }
    Ok(best)
}

/// `(E_const, E_mass)` at `p = 1`: the scalar total mass against the
/// direction-dependent mass function.
pub fn counterexample_gap(
    u0: &InitialDatum,
    t: f64,
    sched: &RegionSchedule,
    tol: &Tolerances,
) -> Result<(ErrorBreakdown, ErrorBreakdown)> {
    let c = normalized_error(
        u0,
        1.0,
        t,
        MassChoice::Constant {
            value: u0.total_mass(),
        },
        sched,
        tol,
    )?;
    let m = normalized_error(u0, 1.0, t, MassChoice::Low, sched, tol)?;
    Ok((c, m))
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub datum: InitialDatum,
    pub p_list: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub schedule: RegionSchedule,
    /// Mass choices evaluated for every `p`; empty means the default
    /// (low for `p < 2`, high for `p >= 2`).
    pub masses: Vec<MassChoice>,
    pub tolerances: Tolerances,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Config("t-grid must be strictly increasing".into()));
        }
        if self.t_grid.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::Config("times must be positive".into()));
        }
        for p in &self.p_list {
            if !(*p >= 1.0) {
                return Err(Error::Config(format!("p must be >= 1, got {p}")));
            }
            weight_norm(&self.datum, *p)?;
        }
        self.schedule.validate()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportCell {
    pub p: f64,
    pub t: f64,
    pub mass: String,
    pub result: Option<ErrorBreakdown>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub n: usize,
    pub cells: Vec<ReportCell>,
}

/// Full `(p, mass, t)` table; cells run in parallel and are reported in
/// input order. Per-cell failures are recorded, not propagated.
pub fn convergence_experiment(spec: &ExperimentSpec) -> Result<ConvergenceReport> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for &p in &spec.p_list {
        let masses = if spec.masses.is_empty() {
            vec![MassChoice::default_for(p)]
        } else {
            spec.masses.clone()
        };
        for m in masses {
            for &t in &spec.t_grid {
                jobs.push((p, m, t));
            }
        }
    }
    let cells = jobs
        .par_iter()
        .map(|&(p, m, t)| {
            let r = normalized_error(&spec.datum, p, t, m, &spec.schedule, &spec.tolerances);
            let (result, error) = match r {
                Ok(b) => (Some(b), None),
                Err(e) => (None, Some(format!("{}: {e}", e.kind()))),
            };
            ReportCell {
                p,
                t,
                mass: m.name(),
                result,
                error,
            }
        })
        .collect();
    Ok(ConvergenceReport { n: spec.datum.n, cells })
}

/// Spectral route for a radial datum: transform, multiply by
/// `e^{-t(λ²+ρ²)}`, invert. Reference only.
pub fn solve_spectral_radial(u0: &InitialDatum, t: f64, r: f64) -> Result<f64> {
    if !u0.is_radial() {
        return Err(Error::Domain("spectral solve needs radial data".into()));
    }
    let n = u0.n;
    let rr = rho(n);
    let lmax = crate::spherical::cutoff_for_gaussian(t);
    crate::spherical::inverse_transform_radial(
        n,
        |l| {
            let lam = num_complex::Complex64::new(l, 0.0);
            let mut acc = 0.0;
            for c in &u0.components {
                acc += c.weight * c.transform(n, lam)?.re;
            }
            Ok(acc * (-t * (l * l + rr * rr)).exp())
        },
        r,
        lmax,
    )
}

/// `∫ u(t) dvol`, which equals the total mass for every `t`.
pub fn evolved_mass(u0: &InitialDatum, t: f64) -> Result<f64> {
    let r_top = 16.0 * (2.0 * t).sqrt() + 2.0 * (u0.n as f64 - 1.0) * t + 20.0 + max_center(u0);
    let evo = Evolution::new(u0, t, r_top)?;
    let peak = (u0.n as f64 - 1.0) * t;
    let mut breaks = vec![0.0, r_top];
    for j in -12..=12 {
        let x = peak + j as f64 * (2.0 * t).sqrt();
        if x > 0.0 && x < r_top {
            breaks.push(x);
        }
    }
    breaks.sort_by(f64::total_cmp);
    let v = volume_integral(u0.n, &breaks, 1e-9, |r, a| evo.eval(r, a))?;
    Ok(v.to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_interpolates() {
        let t = LogTable::build(10.0, 0.05, |r| Ok(LogVal::from_log(-r * r / 8.0 + r.cos()))).unwrap();
        for k in 0..97 {
            let r = 0.1037 * k as f64;
            let v = t.ln_eval(r).unwrap();
            assert!((v - (-r * r / 8.0 + r.cos())).abs() < 1e-6, "{r}");
        }
        assert!(t.ln_eval(-1.0).is_err());
    }

    #[test]
    fn displaced_heat_solve_is_exact_translate() {
        let u = InitialDatum::displaced_heat(3, 1.0, 2.0).unwrap();
        for (r, th) in [(0.0, 0.0), (3.0, 1.0), (40.0, 2.5)] {
            let a = CosAngle::from_theta(th);
            let v = solve(&u, 5.0, r, a).unwrap();
            let d = distance_polar(r, 2.0, a);
            let e = h_exact_h3(6.0, d).unwrap();
            assert_eq!(v.ln_abs(), e.ln_abs());
        }
    }

    #[test]
    fn bump_flow_matches_h3_line_reduction() {
        // on H^3, sinh(r) u solves the 1-D equation v_t = v'' - v
        let u = InitialDatum::radial_bump(3, 1.0).unwrap();
        let c = u.components[0].clone();
        for t in [0.5, 5.0] {
            let h = Kernel::new(3, t, 60.0).unwrap();
            for rho_d in [0.2, 1.5, 9.0, 8.0 * t] {
                let line = crate::quad::Adaptive::with_tol(1e-13)
                    .integrate(&[-1.0, 0.0, 1.0], |s| {
                        let g = (-(rho_d - s) * (rho_d - s) / (4.0 * t)).exp() / (4.0 * PI * t).sqrt();
                        g * s.sinh() * c.profile_at(3, s.abs()).unwrap().to_f64()
                    })
                    .unwrap()
                    .value;
                let want = (-t as f64).exp() * line / rho_d.sinh();
                let got = bump_flow(&u, 0, rho_d, &h).unwrap().to_f64();
                assert!((got / want - 1.0).abs() < 1e-9, "t={t} r={rho_d}: {got} {want}");
            }
        }
    }

    #[test]
    fn family_table_matches_direct() {
        let u = InitialDatum::radial_bump(3, 1.0).unwrap();
        let m = PreparedMass::new(&u, 1.0, MassChoice::FamilyS { s_exp: 2.0 }, 30.0).unwrap();
        let a = CosAngle::from_theta(1.0);
        for r in [0.0, 0.37, 2.9, 17.3, 28.0] {
            let x = crate::hgeom::HPoint::axial(3, r, 0.0).unwrap();
            let want = mass_family_s(&u, 1.0, 2.0, &x).unwrap();
            let got = m.eval(r, a).unwrap();
            assert!((got - want).abs() < 1e-6 * want.abs(), "r={r}: {got} {want}");
        }
    }

    #[test]
    fn bump_solve_matches_spectral() {
        let u = InitialDatum::radial_bump(3, 1.0).unwrap();
        let a = solve(&u, 5.0, 12.0, CosAngle::from_theta(0.3)).unwrap().to_f64();
        let b = solve_spectral_radial(&u, 5.0, 12.0).unwrap();
        assert!((a / b - 1.0).abs() < 1e-6, "{a} {b}");
    }

    #[test]
    fn evolution_table_matches_direct_solve() {
        let u = InitialDatum::displaced_bump(3, 0.5, 1.0).unwrap();
        let evo = Evolution::new(&u, 10.0, 40.0).unwrap();
        for (r, th) in [(0.3, 0.2), (7.7, 1.9), (25.1, 3.0)] {
            let a = CosAngle::from_theta(th);
            let x = evo.eval(r, a).unwrap();
            let y = solve(&u, 10.0, r, a).unwrap();
            assert!(((x.ln_abs() - y.ln_abs()).abs()) < 1e-7, "r={r}: {x} {y}");
        }
    }

    #[test]
    fn linearity_of_solve() {
        let a = InitialDatum::displaced_heat(3, 1.0, 2.0).unwrap();
        let b = InitialDatum::radial_bump(3, 1.0).unwrap();
        let both = InitialDatum::new(3)
            .with(a.components[0].kind.clone(), 1.0)
            .unwrap()
            .with(b.components[0].kind.clone(), 1.0)
            .unwrap();
        let ang = CosAngle::from_theta(0.7);
        let s = solve(&both, 4.0, 6.0, ang).unwrap().to_f64();
        let e = solve(&a, 4.0, 6.0, ang).unwrap().to_f64() + solve(&b, 4.0, 6.0, ang).unwrap().to_f64();
        assert!((s - e).abs() < 1e-14 * e);
    }

    #[test]
    fn mass_is_conserved_by_flow() {
        let u = InitialDatum::displaced_heat(3, 1.0, 2.0).unwrap();
        let m = evolved_mass(&u, 10.0).unwrap();
        assert!((m - 1.0).abs() < 1e-6, "{m}");
    }

    #[test]
    fn zero_mass_error_is_one_for_p1() {
        // M = 0 gives E_1 = ‖u(t)‖_1/‖h_t‖_1 = 1 for nonnegative unit-mass data
        let u = InitialDatum::radial_bump(3, 1.0).unwrap();
        let s = RegionSchedule::default();
        let e = normalized_error(&u, 1.0, 10.0, MassChoice::Constant { value: 0.0 }, &s, &Tolerances::default())
            .unwrap();
        assert!((e.e - 1.0).abs() < 1e-5, "{}", e.e);
    }

    #[test]
    fn empty_t_grid_gives_empty_report() {
        let spec = ExperimentSpec {
            datum: InitialDatum::radial_bump(3, 1.0).unwrap(),
            p_list: vec![1.0],
            t_grid: vec![],
            schedule: RegionSchedule::default(),
            masses: vec![],
            tolerances: Tolerances::default(),
        };
        assert!(convergence_experiment(&spec).unwrap().cells.is_empty());
    }
}
