//! Sign + log-magnitude scalars.
//!
//! Heat kernels at desk-scale times carry factors like `e^{-t - r^2/4t}` that
//! leave the range of `f64` long before the quantities we actually want
//! (ratios, normalized norms) become ill-conditioned. Everything that can
//! underflow is carried as a [`LogVal`] and only converted back at the end.

use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Div, Mul, Neg};

/// Digits of relative cancellation beyond which a subtraction is flagged.
pub const CANCELLATION_DIGITS: f64 = 12.0;

/// `sign * exp(log_abs)`. Zero is `sign = 0, log_abs = -inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogVal {
    sign: i8,
    log_abs: f64,
}

impl LogVal {
    pub const ZERO: LogVal = LogVal {
        sign: 0,
        log_abs: f64::NEG_INFINITY,
    };
    pub const ONE: LogVal = LogVal {
        sign: 1,
        log_abs: 0.0,
    };

    /// Positive value `exp(log_abs)`.
    pub fn from_log(log_abs: f64) -> Self {
        if log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogVal { sign: 1, log_abs }
        }
    }

    pub fn from_sign_log(sign: i8, log_abs: f64) -> Self {
        if sign == 0 || log_abs == f64::NEG_INFINITY {
            Self::ZERO
        } else {
            LogVal {
                sign: sign.signum(),
                log_abs,
            }
        }
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            LogVal {
                sign: if x > 0.0 { 1 } else { -1 },
                log_abs: x.abs().ln(),
            }
        }
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `ln |x|`, `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        self.log_abs
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        LogVal {
            sign: self.sign.abs(),
            log_abs: self.log_abs,
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            f64::from(self.sign) * self.log_abs.exp()
        }
    }

    /// Real power of `|x|`; the sign is dropped (callers use it on magnitudes).
    pub fn powf_abs(self, p: f64) -> Self {
        if self.sign == 0 {
            if p > 0.0 {
                Self::ZERO
            } else {
                Self::ONE
            }
        } else {
            LogVal {
                sign: 1,
                log_abs: p * self.log_abs,
            }
        }
    }

    pub fn scale(self, w: f64) -> Self {
        self * LogVal::from_f64(w)
    }

    pub fn add(self, other: Self) -> Self {
        self.add_checked(other).0
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(-other)
    }

    /// Sum with a flag raised when the two terms cancel to more than
    /// [`CANCELLATION_DIGITS`] digits.
    pub fn add_checked(self, other: Self) -> (Self, bool) {
        if self.sign == 0 {
            return (other, false);
        }
        if other.sign == 0 {
            return (self, false);
        }
        let (hi, lo) = if self.log_abs >= other.log_abs {
            (self, other)
        } else {
            (other, self)
        };
        let d = lo.log_abs - hi.log_abs; // <= 0
        if hi.sign == lo.sign {
            (
                LogVal {
                    sign: hi.sign,
                    log_abs: hi.log_abs + d.exp().ln_1p(),
                },
                false,
            )
        } else {
            let rest = -(d.exp_m1()); // 1 - e^d in [0, 1]
            if rest <= 0.0 {
                return (Self::ZERO, true);
            }
            let log_abs = hi.log_abs + rest.ln();
            let lost = (hi.log_abs - log_abs) / std::f64::consts::LN_10;
            (
                LogVal {
                    sign: hi.sign,
                    log_abs,
                },
                lost > CANCELLATION_DIGITS,
            )
        }
    }

    /// Stable sum of many terms with sign tracking.
    pub fn sum<I: IntoIterator<Item = LogVal>>(terms: I) -> Self {
        let terms: Vec<LogVal> = terms.into_iter().filter(|v| !v.is_zero()).collect();
        let max = terms
            .iter()
            .map(|v| v.log_abs)
            .fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        if max == f64::INFINITY {
            return LogVal::from_log(f64::INFINITY);
        }
        let acc: f64 = terms
            .iter()
            .map(|v| f64::from(v.sign) * (v.log_abs - max).exp())
            .sum();
        LogVal::from_f64(acc) * LogVal::from_log(max)
    }

    /// Order by signed value.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        match self.sign.cmp(&other.sign) {
            Ordering::Equal => match self.sign {
                0 => Ordering::Equal,
                1 => self.log_abs.total_cmp(&other.log_abs),
                _ => other.log_abs.total_cmp(&self.log_abs),
            },
            o => o,
        }
    }
}

impl Default for LogVal {
    fn default() -> Self {
        Self::ZERO
    }
}

impl Mul for LogVal {
    type Output = LogVal;
    fn mul(self, rhs: LogVal) -> LogVal {
        if self.sign == 0 || rhs.sign == 0 {
            return LogVal::ZERO;
        }
        LogVal {
            sign: self.sign * rhs.sign,
            log_abs: self.log_abs + rhs.log_abs,
        }
    }
}

impl Div for LogVal {
    type Output = LogVal;
    fn div(self, rhs: LogVal) -> LogVal {
        if self.sign == 0 {
            return LogVal::ZERO;
        }
        if rhs.sign == 0 {
            return LogVal {
                sign: self.sign,
                log_abs: f64::INFINITY,
            };
        }
        LogVal {
            sign: self.sign * rhs.sign,
            log_abs: self.log_abs - rhs.log_abs,
        }
    }
}

impl Neg for LogVal {
    type Output = LogVal;
    fn neg(self) -> LogVal {
        LogVal {
            sign: -self.sign,
            log_abs: self.log_abs,
        }
    }
}

impl fmt::Display for LogVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}exp({:.17e})", if s < 0 { "-" } else { "" }, self.log_abs),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_behaves() {
        assert!(LogVal::ZERO.is_zero());
        assert_eq!(LogVal::from_f64(0.0), LogVal::ZERO);
        assert_eq!((LogVal::ZERO * LogVal::from_f64(3.0)).to_f64(), 0.0);
        assert_eq!(LogVal::ZERO.add(LogVal::from_f64(2.5)).to_f64(), 2.5);
    }

    #[test]
    fn tiny_values_survive() {
        let a = LogVal::from_log(-5000.0);
        let b = LogVal::from_log(-5000.0 + 2f64.ln());
        let s = a.add(b);
        assert!((s.ln_abs() - (-5000.0 + 3f64.ln())).abs() < 1e-12);
        assert!(((b / a).to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn cancellation_is_flagged() {
        let a = LogVal::from_f64(1.0);
        let b = LogVal::from_f64(-(1.0 - 1e-14));
        let (_, flagged) = a.add_checked(b);
        assert!(flagged);
        let (_, flagged) = a.add_checked(LogVal::from_f64(-0.5));
        assert!(!flagged);
        let (z, flagged) = a.add_checked(-a);
        assert!(z.is_zero() && flagged);
    }

    #[test]
    fn sum_mixed_signs() {
        let xs = [3.0, -1.25, 0.0, 7.5, -2.0];
        let s = LogVal::sum(xs.iter().map(|&x| LogVal::from_f64(x)));
        assert!((s.to_f64() - 7.25).abs() < 1e-13);
    }

    proptest! {
        #[test]
        fn add_matches_f64(x in -1e3f64..1e3, y in -1e3f64..1e3) {
            let s = LogVal::from_f64(x).add(LogVal::from_f64(y)).to_f64();
            prop_assert!((s - (x + y)).abs() <= 1e-10 * (x.abs() + y.abs() + 1.0));
        }

        #[test]
        fn mul_div_match_f64(x in -1e3f64..1e3, y in 0.1f64..1e3) {
            let a = LogVal::from_f64(x);
            let b = LogVal::from_f64(y);
            prop_assert!(((a * b).to_f64() - x * y).abs() <= 1e-12 * (x * y).abs().max(1e-300));
            prop_assert!(((a / b).to_f64() - x / y).abs() <= 1e-12 * (x / y).abs().max(1e-300));
        }
    }
}
