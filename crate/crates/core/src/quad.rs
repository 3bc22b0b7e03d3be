//! Composite Gauss–Legendre quadrature with global adaptive bisection.
//!
//! The integrator is generic over the value type so the same code path
//! serves plain reals, complex integrands and log-domain ([`LogVal`]) sums.
//! Each panel carries its rule applied to the whole panel and to both
//! halves; the difference is the error estimate and the halves are the
//! accepted value. Panels whose error exceeds their share of the target are
//! bisected until the summed estimate drops below `rel_tol * |total|`.
//! The final sum runs left to right, so results do not depend on the order
//! in which panels were refined.

use crate::error::{Error, Result};
use crate::logval::LogVal;
use num_complex::Complex64;
use std::sync::OnceLock;

pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn plus(self, other: Self) -> Self;
    fn minus(self, other: Self) -> Self;
    fn scaled(self, w: f64) -> Self;
    /// `ln |self|`, `-inf` for zero.
    fn ln_norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn minus(self, other: Self) -> Self {
        self - other
    }
    fn scaled(self, w: f64) -> Self {
        self * w
    }
    fn ln_norm(self) -> f64 {
        self.abs().ln()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn plus(self, other: Self) -> Self {
        self + other
    }
    fn minus(self, other: Self) -> Self {
        self - other
    }
    fn scaled(self, w: f64) -> Self {
        self * w
    }
    fn ln_norm(self) -> f64 {
        self.norm().ln()
    }
}

impl QuadValue for LogVal {
    fn zero() -> Self {
        LogVal::ZERO
    }
    fn plus(self, other: Self) -> Self {
        self.add(other)
    }
    fn minus(self, other: Self) -> Self {
        self.sub(other)
    }
    fn scaled(self, w: f64) -> Self {
        self.scale(w)
    }
    fn ln_norm(self) -> f64 {
        self.ln_abs()
    }
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

const MAX_CACHED_ORDER: usize = 128;

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order > 0, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x =
                (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_and_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared rule for `order <= 128`, built on first use.
    pub fn cached(order: usize) -> &'static GaussLegendre {
        const INIT: OnceLock<GaussLegendre> = OnceLock::new();
        static RULES: [OnceLock<GaussLegendre>; MAX_CACHED_ORDER + 1] =
            [INIT; MAX_CACHED_ORDER + 1];
        assert!(
            (1..=MAX_CACHED_ORDER).contains(&order),
            "cached Gauss-Legendre order out of range"
        );
        RULES[order].get_or_init(|| GaussLegendre::new(order))
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Apply the rule on `[a, b]`.
    pub fn apply<V: QuadValue>(&self, a: f64, b: f64, f: &mut impl FnMut(f64) -> V) -> V {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = V::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc.plus(f(mid + half * x).scaled(w * half));
        }
        acc
    }

    /// Fixed composite rule with `panels` equal panels.
    pub fn composite<V: QuadValue>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        f: &mut impl FnMut(f64) -> V,
    ) -> V {
        let h = (b - a) / panels as f64;
        let mut acc = V::zero();
        for k in 0..panels {
            let lo = a + h * k as f64;
            acc = acc.plus(self.apply(lo, lo + h, f));
        }
        acc
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Adaptive integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Adaptive {
    pub order: usize,
    pub rel_tol: f64,
    /// Absolute floor on the error estimate, as a natural log.
    pub ln_abs_tol: f64,
    /// Error floor relative to `Σ |panel value|`, which bounds what an
    /// oscillatory integrand with rounding-level noise can deliver.
    pub l1_tol: f64,
    pub max_panels: usize,
    /// Equal subdivisions applied to each interval between breakpoints
    /// before any adaptivity.
    pub initial_splits: usize,
}

impl Default for Adaptive {
    fn default() -> Self {
        Adaptive {
            order: 15,
            rel_tol: 1e-10,
            ln_abs_tol: f64::NEG_INFINITY,
            l1_tol: 1e-15,
            max_panels: 4000,
            initial_splits: 1,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome<V> {
    pub value: V,
    /// `ln` of the summed panel error estimates.
    pub ln_err: f64,
    pub panels: usize,
}

struct Panel<V> {
    a: f64,
    b: f64,
    left: V,
    right: V,
    ln_err: f64,
    ln_l1: f64,
}

fn ln_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

impl Adaptive {
    pub fn with_tol(rel_tol: f64) -> Self {
        Adaptive {
            rel_tol,
            ..Default::default()
        }
    }

    pub fn splits(mut self, n: usize) -> Self {
        self.initial_splits = n.max(1);
        self
    }

    pub fn order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }

    /// Absolute error floor, for integrals that may vanish.
    pub fn abs_tol(mut self, tol: f64) -> Self {
        self.ln_abs_tol = tol.ln();
        self
    }

    pub fn l1_tol(mut self, tol: f64) -> Self {
        self.l1_tol = tol;
        self
    }

    pub fn max_panels(mut self, n: usize) -> Self {
        self.max_panels = n;
        self
    }

    /// Integrate an infallible integrand over `[breaks[0], breaks.last()]`.
    pub fn integrate<V: QuadValue>(
        &self,
        breaks: &[f64],
        mut f: impl FnMut(f64) -> V,
    ) -> Result<QuadOutcome<V>> {
        self.try_integrate(breaks, |x| Ok(f(x)))
    }

    /// Integrate a fallible integrand; the first error aborts.
    pub fn try_integrate<V: QuadValue>(
        &self,
        breaks: &[f64],
        mut f: impl FnMut(f64) -> Result<V>,
    ) -> Result<QuadOutcome<V>> {
        if breaks.len() < 2 {
            return Err(Error::Domain("quadrature needs at least two breakpoints".into()));
        }
        if !(1..=MAX_CACHED_ORDER).contains(&self.order) {
            return Err(Error::Config(format!(
                "adaptive order must lie in 1..={MAX_CACHED_ORDER}"
            )));
        }
        let rule = GaussLegendre::cached(self.order);
        let failure: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
        let mut eval = |x: f64| -> V {
            if failure.borrow().is_some() {
                return V::zero();
            }
            match f(x) {
                Ok(v) => v,
                Err(e) => {
                    *failure.borrow_mut() = Some(e);
                    V::zero()
                }
            }
        };

        let make_panel = |a: f64, b: f64, whole: V, eval: &mut dyn FnMut(f64) -> V| {
            let m = 0.5 * (a + b);
            let mut g = |x: f64| eval(x);
            let left = rule.apply(a, m, &mut g);
            let right = rule.apply(m, b, &mut g);
            let ln_err = left.plus(right).minus(whole).ln_norm();
            let ln_l1 = ln_add(left.ln_norm(), right.ln_norm());
            Panel {
                a,
                b,
                left,
                right,
                ln_err,
                ln_l1,
            }
        };

        let mut panels: Vec<Panel<V>> = Vec::new();
        for w in breaks.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if !(hi > lo) {
                if hi == lo {
                    continue;
                }
                return Err(Error::Domain(format!(
                    "quadrature breakpoints not increasing: {lo} > {hi}"
                )));
            }
            let k = self.initial_splits.max(1);
            let h = (hi - lo) / k as f64;
            for j in 0..k {
                let a = lo + h * j as f64;
                let b = if j + 1 == k { hi } else { a + h };
                let whole = rule.apply(a, b, &mut |x| eval(x));
                panels.push(make_panel(a, b, whole, &mut eval));
            }
        }
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        if panels.is_empty() {
            return Ok(QuadOutcome {
                value: V::zero(),
                ln_err: f64::NEG_INFINITY,
                panels: 0,
            });
        }

        loop {
            let total = panels
                .iter()
                .fold(V::zero(), |acc, p| acc.plus(p.left).plus(p.right));
            let ln_err = panels
                .iter()
                .fold(f64::NEG_INFINITY, |acc, p| ln_add(acc, p.ln_err));
            let ln_l1 = panels
                .iter()
                .fold(f64::NEG_INFINITY, |acc, p| ln_add(acc, p.ln_l1));
            let ln_target = (self.rel_tol.ln() + total.ln_norm())
                .max(self.ln_abs_tol)
                .max(self.l1_tol.ln() + ln_l1);
            if ln_err <= ln_target || ln_err == f64::NEG_INFINITY {
                panels.sort_by(|x, y| x.a.total_cmp(&y.a));
                let value = panels
                    .iter()
                    .fold(V::zero(), |acc, p| acc.plus(p.left).plus(p.right));
                return Ok(QuadOutcome {
                    value,
                    ln_err,
                    panels: panels.len(),
                });
            }
            if ln_err.is_nan() || total.ln_norm().is_nan() {
                return Err(Error::NonConvergence(
                    "integrand produced NaN".to_string(),
                ));
            }
            if panels.len() >= self.max_panels {
                return Err(Error::NonConvergence(format!(
                    "{} panels, error estimate exp({:.3}) vs target exp({:.3})",
                    panels.len(),
                    ln_err,
                    ln_target
                )));
            }
            let share = ln_target - (panels.len() as f64).ln();
            let worst = panels
                .iter()
                .map(|p| p.ln_err)
                .fold(f64::NEG_INFINITY, f64::max);
            let mut next = Vec::with_capacity(panels.len() * 2);
            for p in panels.drain(..) {
                let needs_split = p.ln_err > share || p.ln_err == worst;
                if needs_split && p.b - p.a > 1e-13 * (p.a.abs() + p.b.abs()).max(1e-300) {
                    let m = 0.5 * (p.a + p.b);
                    next.push(make_panel(p.a, m, p.left, &mut eval));
                    next.push(make_panel(m, p.b, p.right, &mut eval));
                } else {
                    next.push(p);
                }
            }
            if let Some(e) = failure.borrow_mut().take() {
                return Err(e);
            }
            panels = next;
        }
    }
}
