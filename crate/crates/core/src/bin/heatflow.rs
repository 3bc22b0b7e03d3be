use clap::{Args, Parser, Subcommand};
use heatflow::acceptance;
use heatflow::config::{parse_f64, ExperimentConfig, DEFAULT_CONFIG};
use heatflow::evolve::convergence_experiment;
use heatflow::heatkernel::{concentration_defect, critical_region, evaluate, lp_norm_log, Route};
use heatflow::hgeom::HPoint;
use heatflow::massfn::{mass_alt2, mass_high, mass_low, MassChoice};
use heatflow::output::{Cell, Table};
use heatflow::plancherel::plancherel_density_rank1;
use heatflow::rootsys::{build_root_system, Family};
use heatflow::schedule::RegionSchedule;
use heatflow::spherical::{phi0, phi_lambda};
use heatflow::Error;
use num_complex::Complex64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Heat flow on real hyperbolic space: kernels, norms, masses and
/// long-time convergence experiments.
#[derive(Parser)]
#[command(name = "heatflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Dimension of H^n.
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Times, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_num)]
    t: Vec<f64>,
    /// Radii, comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_num)]
    r: Vec<f64>,
    /// Exponents, comma separated; `inf` allowed.
    #[arg(long, value_delimiter = ',', value_parser = parse_num)]
    p: Vec<f64>,
    /// Heat-kernel route: exact, spectral or asymptotic.
    #[arg(long)]
    route: Option<String>,
    /// Experiment file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; `.json` selects JSON, anything else CSV. Default: CSV on stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Heat kernel values h_t(r).
    Kernel(Common),
    /// Spherical functions φ_λ(r) for real λ, and φ_0.
    Phi {
        #[command(flatten)]
        common: Common,
        /// Spectral parameters, comma separated.
        #[arg(long, value_delimiter = ',', value_parser = parse_num, default_value = "0")]
        lambda: Vec<f64>,
    },
    /// L^p norms of h_t.
    Norms(Common),
    /// Mass functions of the configured datum on a grid of points.
    Mass(Common),
    /// Concentration of h_t in its critical region.
    Concentrate(Common),
    /// Convergence report E_p(t) for an experiment file.
    Converge(Common),
    /// Plancherel density |c(λ)|^{-2} for rank one.
    Plancherel {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', value_parser = parse_num, default_value = "0.5,1,2,4")]
        lambda: Vec<f64>,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Only these criteria, comma separated.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn parse_num(s: &str) -> Result<f64, String> {
    parse_f64(s).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(m) => Failure::Usage(m),
            other => Failure::Numeric(other),
        }
    }
}

type Run<T> = Result<T, Failure>;

fn need(v: &[f64], flag: &str) -> Run<()> {
    if v.is_empty() {
        return Err(Failure::Usage(format!("--{flag} is required")));
    }
    Ok(())
}

fn emit(table: &Table, out: &Option<PathBuf>) -> Run<()> {
    let json = out
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e == "json"));
    let text = if json { table.to_json() } else { table.to_csv() };
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn load_config(c: &Common) -> Run<ExperimentConfig> {
    let text = match &c.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?,
        None => DEFAULT_CONFIG.to_string(),
    };
    Ok(ExperimentConfig::parse(&text)?)
}

fn kernel(c: &Common) -> Run<()> {
    need(&c.t, "t")?;
    need(&c.r, "r")?;
    let route = match &c.route {
        Some(s) => Route::parse(s)?,
        None if c.n == 3 => Route::ExactH3,
        None => Route::Spectral,
    };
    let mut table = Table::new(&["n", "t", "r", "route", "value", "ln_value"]);
    for &t in &c.t {
        for &r in &c.r {
            let e = evaluate(route, c.n, t, r)?;
            table.push(vec![
                c.n.into(),
                t.into(),
                r.into(),
                route.name().into(),
                e.value.to_f64().into(),
                e.value.ln_abs().into(),
            ]);
        }
    }
    emit(&table, &c.out)
}

fn phi(c: &Common, lambdas: &[f64]) -> Run<()> {
    need(&c.r, "r")?;
    let mut table = Table::new(&["n", "lambda", "r", "re", "im", "ln_scale", "phi0"]);
    for &l in lambdas {
        for &r in &c.r {
            let v = phi_lambda(c.n, Complex64::new(l, 0.0), r)?;
            table.push(vec![
                c.n.into(),
                l.into(),
                r.into(),
                v.mantissa.re.into(),
                v.mantissa.im.into(),
                v.ln_scale.into(),
                phi0(c.n, r)?.to_f64().into(),
            ]);
        }
    }
    emit(&table, &c.out)
}

fn norms(c: &Common) -> Run<()> {
    need(&c.t, "t")?;
    need(&c.p, "p")?;
    let mut table = Table::new(&["n", "p", "t", "norm", "ln_norm"]);
    for &p in &c.p {
        for &t in &c.t {
            let v = lp_norm_log(c.n, t, p)?;
            table.push(vec![c.n.into(), p.into(), t.into(), v.to_f64().into(), v.ln_abs().into()]);
        }
    }
    emit(&table, &c.out)
}

fn mass(c: &Common) -> Run<()> {
    let cfg = load_config(c)?;
    let u0 = &cfg.spec.datum;
    let n = u0.n;
    let radii = if c.r.is_empty() { vec![0.0, 1.0, 5.0, 20.0] } else { c.r.clone() };
    let mut table = Table::new(&["p", "mass", "r", "theta", "value"]);
    for &p in &cfg.spec.p_list {
        let choices = if cfg.spec.masses.is_empty() {
            vec![MassChoice::default_for(p)]
        } else {
            cfg.spec.masses.clone()
        };
        for m in choices {
            for &r in &radii {
                for j in 0..=8 {
                    let theta = std::f64::consts::PI * j as f64 / 8.0;
                    let x = HPoint::axial(n, r, theta)?;
                    let v = match m {
                        MassChoice::Low => mass_low(u0, p, &x.omega)?,
                        MassChoice::Alt2 => mass_alt2(u0, &x.omega)?,
                        MassChoice::High => mass_high(u0, p, &x)?,
                        MassChoice::FamilyS { s_exp } => {
                            heatflow::massfn::mass_family_s(u0, p, s_exp, &x)?
                        }
                        MassChoice::Constant { value } => value,
                    };
                    table.push(vec![p.into(), m.name().into(), r.into(), theta.into(), v.into()]);
                }
            }
        }
    }
    emit(&table, &c.out)
}

fn concentrate(c: &Common) -> Run<()> {
    need(&c.t, "t")?;
    need(&c.p, "p")?;
    let s = RegionSchedule::default();
    let mut table = Table::new(&["n", "p", "t", "region_lo", "region_hi", "defect"]);
    for &p in &c.p {
        for &t in &c.t {
            let (lo, hi) = critical_region(c.n, p, t, &s);
            let d = concentration_defect(c.n, t, p, &s)?;
            table.push(vec![c.n.into(), p.into(), t.into(), lo.into(), hi.into(), d.into()]);
        }
    }
    emit(&table, &c.out)
}

fn series_path(out: &Path, p: f64, mass: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    let tag = mass.replace(':', "_");
    let p = if p.is_infinite() { "inf".to_string() } else { format!("{p}") };
    out.with_file_name(format!("{stem}_series_p{p}_{tag}.csv"))
}

fn converge(c: &Common) -> Run<()> {
    let cfg = load_config(c)?;
    let report = convergence_experiment(&cfg.spec)?;
    let mut table = Table::new(&[
        "n",
        "p",
        "t",
        "mass",
        "E",
        "region_pow",
        "tail_pow",
        "region_lo",
        "region_hi",
        "cancellation_points",
        "error",
    ]);
    for cell in &report.cells {
        let mut row: Vec<Cell> = vec![report.n.into(), cell.p.into(), cell.t.into(), cell.mass.clone().into()];
        match &cell.result {
            Some(b) => row.extend([
                b.e.into(),
                b.region_pow.into(),
                b.tail_pow.into(),
                b.region_lo.into(),
                b.region_hi.into(),
                b.cancellation_points.into(),
                "".into(),
            ]),
            None => {
                row.extend((0..5).map(|_| Cell::Num(f64::NAN)));
                row.push(0usize.into());
                row.push(cell.error.clone().unwrap_or_default().into());
            }
        }
        table.push(row);
    }
    let out = c.out.clone().or(cfg.out.map(PathBuf::from));
    if let Some(path) = &out {
        let mut keys: Vec<(f64, String)> = Vec::new();
        for cell in &report.cells {
            if !keys.iter().any(|(p, m)| *p == cell.p && *m == cell.mass) {
                keys.push((cell.p, cell.mass.clone()));
            }
        }
        for (p, m) in keys {
            let mut s = Table::new(&["t", "E"]);
            for cell in report.cells.iter().filter(|x| x.p == p && x.mass == m) {
                let e = cell.result.map_or(f64::NAN, |b| b.e);
                s.push(vec![cell.t.into(), e.into()]);
            }
            let sp = series_path(path, p, &m);
            std::fs::write(&sp, s.to_csv())
                .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", sp.display())))?;
        }
    }
    emit(&table, &out)?;
    if let Some(cell) = report.cells.iter().find(|c| c.error.is_some()) {
        return Err(Failure::Numeric(Error::NonConvergence(format!(
            "cell p={} t={} {}: {}",
            cell.p,
            cell.t,
            cell.mass,
            cell.error.as_deref().unwrap_or("")
        ))));
    }
    Ok(())
}

fn plancherel(c: &Common, lambdas: &[f64]) -> Run<()> {
    let d = build_root_system(Family::Rank1 { n: c.n })?;
    let mut table = Table::new(&["n", "lambda", "density", "ln_density"]);
    for &l in lambdas {
        let v = plancherel_density_rank1(&d, l)?;
        table.push(vec![c.n.into(), l.into(), v.to_f64().into(), v.ln_abs().into()]);
    }
    emit(&table, &c.out)
}

fn selftest(only: &[u32]) -> Run<bool> {
    let ids: Vec<u32> = if only.is_empty() { (1..=14).collect() } else { only.to_vec() };
    let mut ok = true;
    for id in ids {
        let r = acceptance::run(id);
        println!("{}", r.line());
        ok &= r.pass;
    }
    if only.is_empty() {
        for (t, q) in acceptance::gamma_ray_ratios()? {
            println!("supplement: h_asymptotic/h_exact_h3 at t={t}, r=2t: {q:.6}");
        }
    }
    Ok(ok)
}

fn set_threads() -> Run<()> {
    if let Ok(v) = std::env::var("HEATFLOW_THREADS") {
        let k: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|k| *k > 0)
            .ok_or_else(|| Failure::Usage(format!("HEATFLOW_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Run<bool> {
    set_threads()?;
    match &cli.command {
        Command::Kernel(c) => kernel(c)?,
        Command::Phi { common, lambda } => phi(common, lambda)?,
        Command::Norms(c) => norms(c)?,
        Command::Mass(c) => mass(c)?,
        Command::Concentrate(c) => concentrate(c)?,
        Command::Converge(c) => converge(c)?,
        Command::Plancherel { common, lambda } => plancherel(common, lambda)?,
        Command::Selftest { only } => return selftest(only),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(e)) => {
            let record = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
            eprintln!("{record}");
            ExitCode::from(3)
        }
    }
}
