//! Root data and chamber geometry.
//!
//! Roots are stored as covectors on `R^ℓ` with the standard Euclidean
//! pairing. Only reduced positive roots are stored; each carries the pair
//! `(m_α, m_{2α})`, and `2α` belongs to `Σ⁺` exactly when `m_{2α} > 0`.
//! The rank-one family is normalized so that the reduced root is the unit
//! covector `H ↦ H`, which makes `⟨ρ, H⟩ = (n-1)/2 · H` for `H^n`.

use crate::error::{Error, Result};
use crate::logval::LogVal;
use crate::schedule::RegionSchedule;
use serde::{Deserialize, Serialize};

/// Tolerance used for chamber membership and the `ρ` identity.
pub const CHAMBER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Rank1 { n: usize },
    A2,
    B2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub vector: Vec<f64>,
    pub m_alpha: u32,
    pub m_2alpha: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootDatum {
    pub family: Family,
    pub rank: usize,
    /// Reduced positive roots `Σ_r⁺` with multiplicities.
    pub roots: Vec<Root>,
    /// Indices into `roots` of the simple roots.
    pub simple: Vec<usize>,
    pub rho: Vec<f64>,
    /// Half sum of the reduced positive roots.
    pub rho0: Vec<f64>,
    pub n: usize,
    pub nu: usize,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn build_root_system(family: Family) -> Result<RootDatum> {
    let s3 = 3f64.sqrt();
    let (rank, roots, simple): (usize, Vec<Root>, Vec<usize>) = match family {
        Family::Rank1 { n } => {
            if n < 2 {
                return Err(Error::Config(format!("rank1 needs n >= 2, got {n}")));
            }
            (
                1,
                vec![Root {
                    vector: vec![1.0],
                    m_alpha: (n - 1) as u32,
                    m_2alpha: 0,
                }],
                vec![0],
            )
        }
        Family::A2 => {
            let r = |v: [f64; 2]| Root {
                vector: v.to_vec(),
                m_alpha: 1,
                m_2alpha: 0,
            };
            (
                2,
                vec![r([1.0, 0.0]), r([-0.5, s3 / 2.0]), r([0.5, s3 / 2.0])],
                vec![0, 1],
            )
        }
        Family::B2 => {
            let r = |v: [f64; 2]| Root {
                vector: v.to_vec(),
                m_alpha: 1,
                m_2alpha: 0,
            };
            (
                2,
                vec![
                    r([1.0, -1.0]),
                    r([0.0, 1.0]),
                    r([1.0, 1.0]),
                    r([1.0, 0.0]),
                ],
                vec![0, 1],
            )
        }
    };
    let mut rho = vec![0.0; rank];
    let mut rho0 = vec![0.0; rank];
    let mut n = rank;
    for root in &roots {
        let weight = f64::from(root.m_alpha) + 2.0 * f64::from(root.m_2alpha);
        for i in 0..rank {
            rho[i] += 0.5 * weight * root.vector[i];
            rho0[i] += 0.5 * root.vector[i];
        }
        n += (root.m_alpha + root.m_2alpha) as usize;
    }
    let nu = rank + 2 * roots.len();
    let datum = RootDatum {
        family,
        rank,
        roots,
        simple,
        rho,
        rho0,
        n,
        nu,
    };
    datum.check_invariants()?;
    Ok(datum)
}

impl RootDatum {
    pub fn check_invariants(&self) -> Result<()> {
        for root in &self.roots {
            if root.vector.len() != self.rank {
                return Err(Error::DimensionMismatch {
                    left: root.vector.len(),
                    right: self.rank,
                });
            }
            if dot(&root.vector, &self.rho) <= 0.0 {
                return Err(Error::Config("rho is not strictly dominant".into()));
            }
        }
        Ok(())
    }

    /// All positive roots `Σ⁺` (including `2α` when `m_{2α} > 0`) with their
    /// multiplicity.
    pub fn positive_roots(&self) -> Vec<(Vec<f64>, u32)> {
        let mut out = Vec::new();
        for r in &self.roots {
            out.push((r.vector.clone(), r.m_alpha));
            if r.m_2alpha > 0 {
                out.push((r.vector.iter().map(|x| 2.0 * x).collect(), r.m_2alpha));
            }
        }
        out
    }

    pub fn rho_norm(&self) -> f64 {
        norm(&self.rho)
    }

    pub fn rho_sq(&self) -> f64 {
        dot(&self.rho, &self.rho)
    }

    /// Fundamental coweights: the extreme rays of the closed chamber.
    pub fn coweights(&self) -> Vec<Vec<f64>> {
        let l = self.rank;
        let mat: Vec<Vec<f64>> = self
            .simple
            .iter()
            .map(|&i| self.roots[i].vector.clone())
            .collect();
        (0..l)
            .map(|j| {
                let mut rhs = vec![0.0; l];
                rhs[j] = 1.0;
                solve_linear(&mat, &rhs)
            })
            .collect()
    }

    /// Reflection through the wall of simple root `index`.
    pub fn simple_reflection(&self, index: usize, h: &[f64]) -> Vec<f64> {
        let a = &self.roots[self.simple[index]].vector;
        let c = 2.0 * dot(a, h) / dot(a, a);
        h.iter().zip(a).map(|(x, y)| x - c * y).collect()
    }
}

fn solve_linear(mat: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut a: Vec<Vec<f64>> = mat
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(*b);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for row in 0..n {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..=n {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    (0..n).map(|i| a[i][n] / a[i][i]).collect()
}

/// A vector of the closed positive chamber with cached derived quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ChamberVector {
    pub h: Vec<f64>,
    pub mu: f64,
    pub pi: f64,
    pub rho_pairing: f64,
    /// Angle between `H` and `ρ` (zero for `H = 0`).
    pub angle: f64,
}

impl ChamberVector {
    pub fn new(datum: &RootDatum, h: Vec<f64>) -> Result<Self> {
        if h.len() != datum.rank {
            return Err(Error::DimensionMismatch {
                left: h.len(),
                right: datum.rank,
            });
        }
        for &i in &datum.simple {
            if dot(&datum.roots[i].vector, &h) < -CHAMBER_TOL {
                return Err(Error::Domain(format!("{h:?} is outside the closed chamber")));
            }
        }
        let rho_pairing = dot(&datum.rho, &h);
        let hn = norm(&h);
        let angle = if hn == 0.0 {
            0.0
        } else {
            (rho_pairing / (hn * datum.rho_norm())).clamp(-1.0, 1.0).acos()
        };
        Ok(ChamberVector {
            mu: mu_raw(datum, &h),
            pi: pi_poly(datum, &h),
            rho_pairing,
            angle,
            h,
        })
    }

    pub fn norm(&self) -> f64 {
        norm(&self.h)
    }
}

fn mu_raw(datum: &RootDatum, h: &[f64]) -> f64 {
    datum
        .positive_roots()
        .iter()
        .map(|(a, _)| dot(a, h))
        .fold(f64::INFINITY, f64::min)
        .max(0.0)
}

/// `μ(H) = min_{α∈Σ⁺} ⟨α, H⟩`.
pub fn mu(datum: &RootDatum, h: &ChamberVector) -> f64 {
    mu_raw(datum, &h.h)
}

/// `π(H) = ∏_{α∈Σ_r⁺} ⟨α, H⟩`.
pub fn pi_poly(datum: &RootDatum, h: &[f64]) -> f64 {
    datum.roots.iter().map(|r| dot(&r.vector, h)).product()
}

/// `ρ_min`, the minimum of `⟨ρ, ·⟩` on unit vectors of the closed chamber,
/// attained on an extreme ray.
pub fn rho_min(datum: &RootDatum) -> f64 {
    datum
        .coweights()
        .iter()
        .map(|w| dot(&datum.rho, w) / norm(w))
        .fold(f64::INFINITY, f64::min)
}

/// `ln δ(H) = Σ m_α ln sinh⟨α, H⟩` over `Σ⁺`; zero element on walls.
pub fn density_delta_log(datum: &RootDatum, h: &ChamberVector) -> LogVal {
    let mut acc = 0.0;
    for (a, m) in datum.positive_roots() {
        if m == 0 {
            continue;
        }
        let x = dot(&a, &h.h);
        if x <= 0.0 {
            return LogVal::ZERO;
        }
        acc += f64::from(m) * ln_sinh(x);
    }
    LogVal::from_log(acc)
}

/// `ln sinh x` for `x > 0`, stable for large `x`.
pub fn ln_sinh(x: f64) -> f64 {
    if x > 20.0 {
        x - std::f64::consts::LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// Membership of `H` in the critical region `B_p(t)`.
pub fn box_membership(
    datum: &RootDatum,
    p: f64,
    t: f64,
    sched: &RegionSchedule,
    h: &ChamberVector,
) -> Result<bool> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("p must lie in [1, inf], got {p}")));
    }
    let hn = h.norm();
    let slack = 1e-12 * (1.0 + hn);
    if p < 2.0 {
        let center = 2.0 * (2.0 / p - 1.0) * datum.rho_norm() * t;
        Ok((hn - center).abs() <= sched.r(t) + slack && h.angle <= sched.theta(t) + 1e-12)
    } else if p == 2.0 {
        let e = sched.eps(t);
        let st = t.sqrt();
        Ok(hn >= e * st - slack && hn <= st / e + slack && h.mu >= e * st - slack)
    } else {
        Ok(hn <= sched.big_r(t) + slack)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> RootDatum {
        build_root_system(Family::A2).unwrap()
    }

    #[test]
    fn rank1_dimensions() {
        let d = build_root_system(Family::Rank1 { n: 3 }).unwrap();
        assert_eq!((d.rank, d.n, d.nu), (1, 3, 3));
        assert!((d.rho[0] - 1.0).abs() < 1e-15);
        let d = build_root_system(Family::Rank1 { n: 2 }).unwrap();
        assert!((d.rho[0] - 0.5).abs() < 1e-15);
        assert_eq!(d.nu, 3);
        assert!(matches!(
            build_root_system(Family::Rank1 { n: 1 }),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn a2_and_b2_dimensions() {
        let d = a2();
        assert_eq!((d.n, d.nu), (5, 8));
        let b = build_root_system(Family::B2).unwrap();
        assert_eq!((b.n, b.nu), (6, 10));
    }

    #[test]
    fn rho_is_half_sum() {
        for fam in [Family::A2, Family::B2, Family::Rank1 { n: 4 }] {
            let d = build_root_system(fam).unwrap();
            let mut half = vec![0.0; d.rank];
            for (a, m) in d.positive_roots() {
                for i in 0..d.rank {
                    half[i] += 0.5 * f64::from(m) * a[i];
                }
            }
            for i in 0..d.rank {
                assert!((half[i] - d.rho[i]).abs() < 1e-12);
            }
            for (a, _) in d.positive_roots() {
                assert!(dot(&a, &d.rho) > 0.0);
            }
        }
    }

    #[test]
    fn mu_examples() {
        let d = build_root_system(Family::Rank1 { n: 3 }).unwrap();
        let h = ChamberVector::new(&d, vec![5.0]).unwrap();
        assert_eq!(mu(&d, &h), 5.0);
        let d = a2();
        // wall of the first simple root
        let wall = ChamberVector::new(&d, vec![0.0, 1.0]).unwrap();
        assert!(mu(&d, &wall).abs() < 1e-15);
        let at_rho = ChamberVector::new(&d, d.rho.clone()).unwrap();
        let brute = d
            .roots
            .iter()
            .map(|r| dot(&r.vector, &d.rho))
            .fold(f64::INFINITY, f64::min);
        assert!((mu(&d, &at_rho) - brute).abs() < 1e-15);
        assert!((brute - 0.5).abs() < 1e-15);
    }

    #[test]
    fn pi_examples() {
        let d = build_root_system(Family::Rank1 { n: 3 }).unwrap();
        assert_eq!(pi_poly(&d, &[2.0]), 2.0);
        assert_eq!(pi_poly(&d, &[0.0]), 0.0);
        let d = a2();
        // ⟨α_i, ρ⟩ = 1/2, 1/2, 1
        assert!((pi_poly(&d, &d.rho) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn pi_antisymmetric_under_simple_reflections() {
        let d = a2();
        for h in [vec![0.3, 1.7], vec![2.0, 0.1], vec![-1.0, 0.4]] {
            for i in 0..2 {
                let w = d.simple_reflection(i, &h);
                assert!((pi_poly(&d, &w) + pi_poly(&d, &h)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rho_min_values() {
        let d = build_root_system(Family::Rank1 { n: 5 }).unwrap();
        assert!((rho_min(&d) - d.rho_norm()).abs() < 1e-15);
        // A2 coweights (1, 1/√3) and its mirror image: ⟨ρ,ϖ⟩/|ϖ| = √3/2
        let d = a2();
        assert!((rho_min(&d) - 3f64.sqrt() / 2.0).abs() < 1e-14);
        // B2 coweights (1,0) and (1,1): min(3/2, √2)
        let b = build_root_system(Family::B2).unwrap();
        assert!((rho_min(&b) - 2f64.sqrt()).abs() < 1e-14);
        assert!(rho_min(&b) <= b.rho_norm());
    }

    #[test]
    fn rho_min_beats_sampled_directions() {
        for fam in [Family::A2, Family::B2] {
            let d = build_root_system(fam).unwrap();
            let m = rho_min(&d);
            for k in 0..=2000 {
                let th = std::f64::consts::PI * k as f64 / 2000.0;
                let h = vec![th.cos(), th.sin()];
                if d.simple.iter().all(|&i| dot(&d.roots[i].vector, &h) >= 0.0) {
                    assert!(dot(&d.rho, &h) >= m - 1e-12);
                }
            }
        }
    }

    #[test]
    fn delta_examples() {
        let d = build_root_system(Family::Rank1 { n: 3 }).unwrap();
        let h = ChamberVector::new(&d, vec![1.3]).unwrap();
        assert!((density_delta_log(&d, &h).ln_abs() - 2.0 * 1.3f64.sinh().ln()).abs() < 1e-14);
        let d = a2();
        let wall = ChamberVector::new(&d, vec![0.0, 2.0]).unwrap();
        assert!(density_delta_log(&d, &wall).is_zero());
        let h = ChamberVector::new(&d, d.rho.clone()).unwrap();
        let direct: f64 = d.roots.iter().map(|r| dot(&r.vector, &d.rho).sinh()).product();
        assert!((density_delta_log(&d, &h).to_f64() - direct).abs() < 1e-14);
    }

    #[test]
    fn delta_two_sided_bound() {
        // sinh x ∈ [e^x/4, e^x/2] for x >= 1 gives |ln δ - 2⟨ρ,H⟩| <= Σ m ln 4
        for fam in [Family::A2, Family::B2, Family::Rank1 { n: 4 }] {
            let d = build_root_system(fam).unwrap();
            let c: f64 = d
                .positive_roots()
                .iter()
                .map(|(_, m)| f64::from(*m) * 4f64.ln())
                .sum();
            for s in [3.0, 7.5, 40.0] {
                let h: Vec<f64> = d.rho.iter().map(|x| x * s).collect();
                let cv = ChamberVector::new(&d, h).unwrap();
                if cv.mu < 1.0 {
                    continue;
                }
                let v = density_delta_log(&d, &cv).ln_abs();
                assert!((v - 2.0 * cv.rho_pairing).abs() <= c);
            }
        }
    }

    #[test]
    fn box_membership_examples() {
        let sched = RegionSchedule::default();
        let d = build_root_system(Family::Rank1 { n: 3 }).unwrap();
        let t = 50.0;
        let center = ChamberVector::new(&d, vec![2.0 * t]).unwrap();
        assert!(box_membership(&d, 1.0, t, &sched, &center).unwrap());
        let far = ChamberVector::new(&d, vec![2.0 * sched.big_r(t)]).unwrap();
        assert!(!box_membership(&d, f64::INFINITY, t, &sched, &far).unwrap());
        let p = 1.5;
        let edge = 2.0 * (2.0 / p - 1.0) * t + sched.r(t);
        let on_edge = ChamberVector::new(&d, vec![edge]).unwrap();
        assert!(box_membership(&d, p, t, &sched, &on_edge).unwrap());
        let outside = ChamberVector::new(&d, vec![edge + 1e-6]).unwrap();
        assert!(!box_membership(&d, p, t, &sched, &outside).unwrap());
        assert!(box_membership(&d, 1.0, 0.0, &sched, &center).is_err());
        let a = a2();
        let h = ChamberVector::new(&a, a.rho.iter().map(|x| 2.0 * t * x).collect()).unwrap();
        assert!(box_membership(&a, 1.0, t, &sched, &h).unwrap());
    }

    #[test]
    fn box_monotone_in_r() {
        let d = build_root_system(Family::Rank1 { n: 3 }).unwrap();
        let small = RegionSchedule::default();
        let big = RegionSchedule {
            r_coef: 2.0,
            ..small
        };
        for k in 0..400 {
            let h = ChamberVector::new(&d, vec![k as f64]).unwrap();
            for p in [1.0, 1.3, 1.8] {
                if box_membership(&d, p, 100.0, &small, &h).unwrap() {
                    assert!(box_membership(&d, p, 100.0, &big, &h).unwrap());
                }
            }
        }
    }

    #[test]
    fn json_roundtrip() {
        let d = a2();
        let s = serde_json::to_string(&d).unwrap();
        let back: RootDatum = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
    }
}
