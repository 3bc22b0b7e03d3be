//! Time schedules `r(t)`, `ε(t)`, `R(t)` that shape the critical regions.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Power-law schedules:
/// `r(t) = r_coef t^{r_exp}`, `ε(t) = eps_coef t^{-eps_exp}`,
/// `R(t) = big_r_coef √t / ln t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionSchedule {
    pub r_coef: f64,
    pub r_exp: f64,
    pub eps_coef: f64,
    pub eps_exp: f64,
    pub big_r_coef: f64,
}

impl Default for RegionSchedule {
    fn default() -> Self {
        RegionSchedule {
            r_coef: 1.0,
            r_exp: 0.75,
            eps_coef: 1.0,
            eps_exp: 0.25,
            big_r_coef: 1.0,
        }
    }
}

/// Times at which the asymptotic side conditions are checked.
pub const CHECK_TIMES: (f64, f64) = (10.0, 1e4);

impl RegionSchedule {
    /// Half-width of the `p < 2` annulus.
    pub fn r(&self, t: f64) -> f64 {
        self.r_coef * t.powf(self.r_exp)
    }

    /// Angular aperture of the `p < 2` box, tied to `r(t)/t`.
    pub fn theta(&self, t: f64) -> f64 {
        self.r(t) / t
    }

    pub fn eps(&self, t: f64) -> f64 {
        self.eps_coef * t.powf(-self.eps_exp)
    }

    /// Radius of the `p > 2` ball. Only meaningful for `t > 1`.
    pub fn big_r(&self, t: f64) -> f64 {
        self.big_r_coef * t.sqrt() / t.ln()
    }

    /// Kernel-quotient error scale for `p >= 2`.
    pub fn delta(&self, p: f64, t: f64) -> f64 {
        if p == 2.0 {
            1.0 / (self.eps(t) * t.sqrt())
        } else {
            self.big_r(t) / t.sqrt()
        }
    }

    /// Numerical check of the side conditions between the two check times:
    /// `r/t` and `r/√t` must move toward `0` and `∞`, likewise `ε`, `ε√t`,
    /// `R/ln t` and `R/√t`.
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = CHECK_TIMES;
        let positive = [self.r_coef, self.eps_coef, self.big_r_coef]
            .iter()
            .all(|c| c.is_finite() && *c > 0.0);
        if !positive {
            return Err(Error::Config("schedule coefficients must be positive".into()));
        }
        let checks = [
            ("r(t)/t -> 0", self.r(hi) / hi < self.r(lo) / lo),
            ("r(t)/sqrt(t) -> inf", self.r(hi) / hi.sqrt() > self.r(lo) / lo.sqrt()),
            ("eps(t) -> 0", self.eps(hi) < self.eps(lo)),
            (
                "eps(t) sqrt(t) -> inf",
                self.eps(hi) * hi.sqrt() > self.eps(lo) * lo.sqrt(),
            ),
            (
                "R(t)/log t -> inf",
                self.big_r(hi) / hi.ln() > self.big_r(lo) / lo.ln(),
            ),
            (
                "R(t)/sqrt(t) -> 0",
                self.big_r(hi) / hi.sqrt() < self.big_r(lo) / lo.sqrt(),
            ),
        ];
        for (name, ok) in checks {
            if !ok {
                return Err(Error::Config(format!("schedule violates {name}")));
            }
        }
        Ok(())
    }
}
