//! Key-value experiment files.
//!
//! ```text
//! # comment
//! n = 3
//! family = rank1
//! component = heat s=1 dist=2
//! component = bump radius=0.5 order=8 dist=1 weight=2
//! p = 1, 1.5, 2, 3, inf
//! t = 10, 40, 160
//! mass = default            # or: low, high, alt2, family_s:2, constant:1
//! schedule.r_coef = 1
//! tol.rel = 1e-6
//! out = report.csv
//! ```
//!
//! `component` may repeat; every other key may appear once. Unknown keys
//! are rejected.

use crate::error::{Error, Result};
use crate::evolve::{ExperimentSpec, Tolerances};
use crate::hgeom::HPoint;
use crate::massfn::{BumpShape, ComponentKind, InitialDatum, MassChoice};
use crate::schedule::RegionSchedule;
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub spec: ExperimentSpec,
    pub out: Option<String>,
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Config(format!("line {line}: {msg}"))
}

pub fn parse_f64(s: &str) -> Result<f64> {
    let s = s.trim();
    match s {
        "inf" | "infinity" | "Inf" => Ok(f64::INFINITY),
        _ => s
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("not a number: {s:?}"))),
    }
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_f64).collect()
}

pub fn parse_mass(s: &str) -> Result<Option<MassChoice>> {
    let s = s.trim();
    let (head, arg) = match s.split_once(':') {
        Some((h, a)) => (h, Some(parse_f64(a)?)),
        None => (s, None),
    };
    Ok(Some(match (head, arg) {
        ("default", None) => return Ok(None),
        ("low", None) => MassChoice::Low,
        ("high", None) => MassChoice::High,
        ("alt2", None) => MassChoice::Alt2,
        ("family_s", Some(s_exp)) => MassChoice::FamilyS { s_exp },
        ("constant", Some(value)) => MassChoice::Constant { value },
        _ => return Err(Error::Config(format!("unknown mass choice {s:?}"))),
    }))
}

struct ComponentLine {
    kind: String,
    fields: Vec<(String, f64)>,
}

fn parse_component(v: &str, line: usize) -> Result<ComponentLine> {
    let mut words = v.split_whitespace();
    let kind = words.next().ok_or_else(|| bad(line, "empty component"))?.to_string();
    let mut fields = Vec::new();
    for w in words {
        let (k, x) = w
            .split_once('=')
            .ok_or_else(|| bad(line, format!("expected key=value, got {w:?}")))?;
        fields.push((k.to_string(), parse_f64(x).map_err(|e| bad(line, e))?));
    }
    Ok(ComponentLine { kind, fields })
}

fn build_component(n: usize, c: &ComponentLine, line: usize) -> Result<(ComponentKind, f64)> {
    let allowed: &[&str] = match c.kind.as_str() {
        "heat" => &["s", "dist", "weight"],
        "bump" => &["radius", "order", "dist", "weight"],
        k => return Err(bad(line, format!("unknown component kind {k:?}"))),
    };
    let mut seen = BTreeSet::new();
    for (k, _) in &c.fields {
        if !allowed.contains(&k.as_str()) {
            return Err(bad(line, format!("unknown field {k:?} for {}", c.kind)));
        }
        if !seen.insert(k.as_str()) {
            return Err(bad(line, format!("repeated field {k:?}")));
        }
    }
    let get = |k: &str, d: f64| c.fields.iter().find(|(f, _)| f == k).map_or(d, |(_, v)| *v);
    let dist = get("dist", 0.0);
    let weight = get("weight", 1.0);
    let center = HPoint::axial(n, dist, 0.0).map_err(|e| bad(line, e))?;
    let kind = if c.kind == "heat" {
        ComponentKind::DisplacedHeat {
            s: get("s", 1.0),
            center,
        }
    } else {
        let order = get("order", 8.0);
        if order.fract() != 0.0 || order < 1.0 {
            return Err(bad(line, "bump order must be a positive integer"));
        }
        let shape = BumpShape {
            radius: get("radius", 1.0),
            order: order as i32,
        };
        if dist == 0.0 {
            ComponentKind::RadialBump { shape }
        } else {
            ComponentKind::DisplacedBump { shape, center }
        }
    };
    Ok((kind, weight))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut n = None;
        let mut comps = Vec::new();
        let mut p_list = None;
        let mut t_grid = None;
        let mut masses = Vec::new();
        let mut sched = RegionSchedule::default();
        let mut tol = Tolerances::default();
        let mut out = None;
        let mut seen = BTreeSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| bad(line, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            if key != "component" && !seen.insert(key.to_string()) {
                return Err(bad(line, format!("duplicate key {key:?}")));
            }
            let num = || parse_f64(value).map_err(|e| bad(line, e));
            match key {
                "n" => {
                    let v = value
                        .parse::<usize>()
                        .map_err(|_| bad(line, "n must be an integer"))?;
                    if v < 2 {
                        return Err(bad(line, "n must be at least 2"));
                    }
                    n = Some(v);
                }
                "family" => {
                    if value != "rank1" {
                        return Err(bad(line, format!("experiments need family rank1, got {value:?}")));
                    }
                }
                "component" => comps.push((line, parse_component(value, line)?)),
                "p" => p_list = Some(parse_list(value).map_err(|e| bad(line, e))?),
                "t" => t_grid = Some(parse_list(value).map_err(|e| bad(line, e))?),
                "mass" => {
                    for m in value.split(',') {
                        match parse_mass(m).map_err(|e| bad(line, e))? {
                            Some(m) => masses.push(m),
                            None if value.trim() == "default" => {}
                            None => return Err(bad(line, "`default` cannot be combined")),
                        }
                    }
                }
                "schedule.r_coef" => sched.r_coef = num()?,
                "schedule.r_exp" => sched.r_exp = num()?,
                "schedule.eps_coef" => sched.eps_coef = num()?,
                "schedule.eps_exp" => sched.eps_exp = num()?,
                "schedule.big_r_coef" => sched.big_r_coef = num()?,
                "tol.rel" => tol.rel_tol = num()?,
                "tol.sup_grid" => tol.sup_grid = num()? as usize,
                "tol.sup_levels" => tol.sup_levels = num()? as usize,
                "out" => out = Some(value.to_string()),
                _ => return Err(bad(line, format!("unknown key {key:?}"))),
            }
        }
        let n = n.ok_or_else(|| Error::Config("missing key `n`".into()))?;
        if comps.is_empty() {
            return Err(Error::Config("at least one `component` is required".into()));
        }
        let mut datum = InitialDatum::new(n);
        for (line, c) in &comps {
            let (kind, w) = build_component(n, c, *line)?;
            datum.push(kind, w).map_err(|e| bad(*line, e))?;
        }
        if !(tol.rel_tol > 0.0 && tol.rel_tol < 1.0) {
            return Err(Error::Config("tol.rel must lie in (0, 1)".into()));
        }
        let spec = ExperimentSpec {
            datum,
            p_list: p_list.ok_or_else(|| Error::Config("missing key `p`".into()))?,
            t_grid: t_grid.ok_or_else(|| Error::Config("missing key `t`".into()))?,
            schedule: sched,
            masses,
            tolerances: tol,
        };
        spec.validate()?;
        Ok(ExperimentConfig { spec, out })
    }
}

/// Configuration of the main convergence run used by `converge` when no
/// file is given.
pub const DEFAULT_CONFIG: &str = "\
n = 3
family = rank1
component = heat s=1 dist=2
p = 1, 1.5, 2, 3, inf
t = 10, 40, 160
mass = default
";

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_parses() {
        let c = ExperimentConfig::parse(DEFAULT_CONFIG).unwrap();
        assert_eq!(c.spec.datum.n, 3);
        assert_eq!(c.spec.p_list.len(), 5);
        assert!(c.spec.p_list[4].is_infinite());
        assert!(c.spec.masses.is_empty());
    }

    #[test]
    fn components_and_masses() {
        let c = ExperimentConfig::parse(
            "n=4\ncomponent = bump radius=0.5 dist=1 weight=2\ncomponent = bump\n\
             p = 1\nt = 1, 2\nmass = low, family_s:2, constant:1.5 # trailing\nout = x.csv\n",
        )
        .unwrap();
        assert_eq!(c.spec.datum.components.len(), 2);
        assert!(matches!(c.spec.datum.components[1].kind, ComponentKind::RadialBump { .. }));
        assert_eq!(c.spec.masses[2], MassChoice::Constant { value: 1.5 });
        assert_eq!(c.out.as_deref(), Some("x.csv"));
    }

    #[test]
    fn rejects_bad_input() {
        let base = "n=3\ncomponent = heat\np = 1\nt = 1\n";
        assert!(ExperimentConfig::parse(base).is_ok());
        for extra in [
            "colour = blue\n",
            "n = 4\n",
            "component = heat q=1\n",
            "component = cube\n",
            "mass = medium\n",
            "mass = default, low\n",
            "tol.rel = 2\n",
            "family = a2\n",
            "nonsense\n",
        ] {
            let text = format!("{base}{extra}");
            let e = ExperimentConfig::parse(&text).unwrap_err();
            assert!(matches!(e, Error::Config(_)), "{extra}: {e}");
        }
        assert!(ExperimentConfig::parse("n=3\ncomponent = heat\np = 1\nt = 2, 1\n").is_err());
        assert!(ExperimentConfig::parse("n=3\ncomponent = heat\np = 0.5\nt = 1\n").is_err());
    }
}
