use clap::{Parser, Subcommand};
use relheat::ab::{self, DiagRoute};
use relheat::bounds;
use relheat::config::RunConfig;
use relheat::field::FieldProfile;
use relheat::quad::{self, QuadratureSpec, SubordinationInput};
use relheat::sample::{self, KernelSample, Method};
use relheat::solver::{SolverConfig, SolverModel};
use relheat::specfun::{self, BesselOrder, HypergeometricArgs};
use relheat::suites::{run_suite, Suite};
use serde::Serialize;
use std::io::{BufRead, Write};
use std::path::PathBuf;

/// Heat kernels of two-dimensional relativistic magnetic Hamiltonians:
/// exact Aharonov-Bohm partial waves and a radial spectral solver with
/// subordination.
#[derive(Parser)]
#[command(name = "relheat", version)]
struct Cli {
    /// Worker threads (default: all logical CPUs)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate kernels on the configured time grid and point pairs, CSV out
    Compute {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured CSV output path
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named invariant suite (specfun|quad|ab|radial|bounds|all)
    Verify {
        #[arg(long)]
        suite: String,
        /// Write the JSON report here as well as to stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit log-log power laws to a computed CSV, grouped by (x, y)
    Fit {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact Aharonov-Bohm kernel evaluations
    Ab {
        #[command(subcommand)]
        verb: AbCmd,
    },
    /// Quadrature sanity checks on analytic integrals
    Quad {
        #[command(subcommand)]
        verb: QuadCmd,
    },
    /// Special-function evaluation: one `fn args...` call per stdin line
    #[command(hide = true)]
    Specfun {
        #[command(subcommand)]
        verb: SpecfunCmd,
    },
}

#[derive(Subcommand)]
enum AbCmd {
    /// Diagonal mode kernel p_m(r, r, t) at order nu
    Diag {
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        t: f64,
        /// euler | hypergeometric
        #[arg(long, default_value = "euler")]
        route: String,
    },
    /// Full kernel at (x, y, t)
    Kernel {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        /// Point as `x1,x2`
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long, default_value_t = 16)]
        modes: i64,
    },
    /// Weighted sup of the kernel modulus over a radius grid
    WeightedSup {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        eps: f64,
        /// Comma-separated radii
        #[arg(long, default_value = "0,0.5,1,2,4")]
        radii: String,
        #[arg(long, default_value_t = 12)]
        modes: i64,
    },
}

#[derive(Subcommand)]
enum QuadCmd {
    /// Analytic integrals plus the subordination closed form
    Selftest,
}

#[derive(Subcommand)]
enum SpecfunCmd {
    Eval,
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("warning: thread pool already initialized");
        }
    }
    std::process::exit(match cli.cmd {
        Cmd::Compute { config, out } => cmd_compute(&config, out.as_deref()),
        Cmd::Verify { suite, out } => cmd_verify(&suite, out.as_deref()),
        Cmd::Fit { csv, out } => cmd_fit(&csv, out.as_deref()),
        Cmd::Ab { verb } => cmd_ab(verb),
        Cmd::Quad { verb } => match verb {
            QuadCmd::Selftest => cmd_quad_selftest(),
        },
        Cmd::Specfun { verb } => match verb {
            SpecfunCmd::Eval => cmd_specfun_eval(),
        },
    });
}

fn cmd_compute(config: &std::path::Path, out_override: Option<&std::path::Path>) -> i32 {
    let cfg = match RunConfig::parse_file(config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let rows = match compute_rows(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let dest = out_override.map(PathBuf::from).or_else(|| cfg.outputs.csv.clone());
    match dest {
        Some(path) => {
            let mut file = match std::fs::File::create(&path) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return 1;
                }
            };
            if let Err(e) = sample::write_csv(&mut file, &rows) {
                eprintln!("error: {e}");
                return 1;
            }
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => {
            let stdout = std::io::stdout();
            if sample::write_csv(&mut stdout.lock(), &rows).is_err() {
                return 1;
            }
        }
    }
    0
}

/// Route selection: AB and massless zero fields go through the exact
/// partial-wave formulas; everything else through the radial solver plus
/// subordination.
fn compute_rows(cfg: &RunConfig) -> Result<Vec<KernelSample>, String> {
    let times = cfg.times();
    let mode_cutoff = cfg.solver.map(|s| s.mode_cutoff).unwrap_or(16);
    match (&cfg.profile, cfg.mass) {
        (FieldProfile::AharonovBohm { alpha }, _) => ab_rows(*alpha, cfg, &times, mode_cutoff),
        (FieldProfile::Zero, m) if m == 0.0 => ab_rows(0.0, cfg, &times, mode_cutoff),
        _ => solver_rows(cfg, &times),
    }
}

fn ab_rows(alpha: f64, cfg: &RunConfig, times: &[f64], mode_cutoff: i64) -> Result<Vec<KernelSample>, String> {
    let mut rows = Vec::new();
    for &(x, y) in &cfg.eval_points {
        for &t in times {
            let k = ab::ab_full_kernel(alpha, t, x, y, mode_cutoff).map_err(|e| e.to_string())?;
            let rx = (x[0] * x[0] + x[1] * x[1]).sqrt();
            let ry = (y[0] * y[0] + y[1] * y[1]).sqrt();
            let method = if rx == ry { Method::AbClosed } else { Method::AbQuadrature };
            rows.push(KernelSample { t, x, y, re: k.value.re, im: k.value.im, err: k.error, method });
        }
    }
    Ok(rows)
}

fn solver_rows(cfg: &RunConfig, times: &[f64]) -> Result<Vec<KernelSample>, String> {
    let t_max = times.iter().cloned().fold(0.0f64, f64::max);
    let scfg = match cfg.solver {
        Some(s) => s,
        None => {
            // truncation default: wall beyond the diffusion range and the
            // evaluation points, spacing capped to keep the solve small
            let max_r = cfg
                .eval_points
                .iter()
                .flat_map(|(x, y)| [(x[0] * x[0] + x[1] * x[1]).sqrt(), (y[0] * y[0] + y[1] * y[1]).sqrt()])
                .fold(0.0f64, f64::max);
            let support = cfg.profile.support_radius();
            let r_max = (8.0 * t_max.sqrt()).max(4.0 * support).max(4.0 * max_r).max(4.0);
            let n = ((r_max / 0.025).ceil() as usize).clamp(200, 2400);
            let derived = SolverConfig { r_max, n, mode_cutoff: 16 };
            eprintln!(
                "note: no [solver] section; using r_max = {:.2}, n = {}, mode_cutoff = {}",
                derived.r_max, derived.n, derived.mode_cutoff
            );
            derived
        }
    };
    let model = SolverModel::new(cfg.profile.clone(), &scfg).map_err(|e| e.to_string())?;
    let mut rows = Vec::new();
    for &(x, y) in &cfg.eval_points {
        for &t in times {
            let k = model.relativistic_kernel(t, x, y, cfg.mass, &cfg.quad).map_err(|e| e.to_string())?;
            if k.tail_estimate > 10.0 * cfg.quad.abs_tol.max(cfg.quad.rel_tol * k.value.norm()) {
                eprintln!(
                    "warning: mode cutoff {} may be insufficient at t = {t} (tail estimate {:.2e})",
                    scfg.mode_cutoff, k.tail_estimate
                );
            }
            rows.push(KernelSample {
                t,
                x,
                y,
                re: k.value.re,
                im: k.value.im,
                err: k.error,
                method: Method::SolverSubordination,
            });
        }
    }
    Ok(rows)
}

fn cmd_verify(suite: &str, out: Option<&std::path::Path>) -> i32 {
    let which = match Suite::parse(suite) {
        Some(s) => s,
        None => {
            eprintln!("error: unknown suite `{suite}`; valid: {}", Suite::names().join("|"));
            return 2;
        }
    };
    let report = run_suite(which);
    for c in &report.checks {
        eprintln!(
            "{} {:<60} measured {:>12.4e}  threshold {:>9.1e}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.threshold
        );
    }
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    println!("{json}");
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    if report.pass {
        0
    } else {
        1
    }
}

#[derive(Serialize)]
struct GroupFit {
    x: [f64; 2],
    y: [f64; 2],
    points: usize,
    slope: f64,
    intercept: f64,
    residual: f64,
}

fn cmd_fit(csv: &std::path::Path, out: Option<&std::path::Path>) -> i32 {
    let file = match std::fs::File::open(csv) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: cannot open {}: {e}", csv.display());
            return 2;
        }
    };
    let samples = match sample::read_csv(std::io::BufReader::new(file)) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    // group by (x, y), preserving first-seen order
    let mut keys: Vec<([u64; 4], [f64; 2], [f64; 2])> = Vec::new();
    let mut groups: Vec<Vec<&KernelSample>> = Vec::new();
    for s in &samples {
        let key = [s.x[0].to_bits(), s.x[1].to_bits(), s.y[0].to_bits(), s.y[1].to_bits()];
        match keys.iter().position(|(k, _, _)| *k == key) {
            Some(i) => groups[i].push(s),
            None => {
                keys.push((key, s.x, s.y));
                groups.push(vec![s]);
            }
        }
    }
    let mut fits = Vec::new();
    for ((_, x, y), members) in keys.iter().zip(groups.iter()) {
        let mut pairs: Vec<(f64, f64)> = members.iter().map(|s| (s.t, s.modulus())).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let times: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let vals: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        match bounds::fit_exponent(&times, &vals) {
            Ok(f) => fits.push(GroupFit {
                x: *x,
                y: *y,
                points: times.len(),
                slope: f.slope,
                intercept: f.intercept,
                residual: f.residual,
            }),
            Err(e) => {
                eprintln!("error: group x = {x:?}, y = {y:?}: {e}");
                return 2;
            }
        }
    }
    let json = serde_json::to_string_pretty(&fits).expect("fits serialize");
    println!("{json}");
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, &json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return 1;
        }
    }
    0
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `x1,x2`, got `{s}`"));
    }
    let a = parts[0].trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = parts[1].trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok([a, b])
}

fn cmd_ab(verb: AbCmd) -> i32 {
    let result = (|| -> Result<(), String> {
        match verb {
            AbCmd::Diag { nu, r, t, route } => {
                let route = match route.as_str() {
                    "euler" => DiagRoute::EulerIntegral,
                    "hypergeometric" | "hyp" => DiagRoute::Hypergeometric,
                    other => return Err(format!("unknown route `{other}`")),
                };
                let v = ab::pm_diag(nu, r, t, route).map_err(|e| e.to_string())?;
                println!("{v}");
            }
            AbCmd::Kernel { alpha, t, x, y, modes } => {
                let k = ab::ab_full_kernel(alpha, t, parse_point(&x)?, parse_point(&y)?, modes)
                    .map_err(|e| e.to_string())?;
                println!("re {}", k.value.re);
                println!("im {}", k.value.im);
                println!("err {}", k.error);
                println!("tail {}", k.tail_estimate);
            }
            AbCmd::WeightedSup { alpha, t, eps, radii, modes } => {
                let rs: Result<Vec<f64>, _> = radii.split(',').map(|r| r.trim().parse::<f64>()).collect();
                let rs = rs.map_err(|e| e.to_string())?;
                let v = ab::weighted_sup(alpha, t, eps, &rs, modes).map_err(|e| e.to_string())?;
                println!("{v}");
            }
        }
        Ok(())
    })();
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn report_line(name: &str, value: f64, exact: f64, tol: f64) -> bool {
    let rel = ((value - exact) / exact).abs();
    let pass = rel <= tol;
    println!("{} {:<42} value {:+.12e}  rel err {:.2e}", if pass { "PASS" } else { "FAIL" }, name, value, rel);
    pass
}

fn cmd_quad_selftest() -> i32 {
    let spec = QuadratureSpec::default();
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let mut ok = true;
    let report = report_line;

    match quad::integrate_semi_infinite(&|s: f64| s.powf(-2.5) * (-1.0 / (4.0 * s)).exp(), &spec) {
        Ok(r) => ok &= report("int s^-5/2 e^{-1/(4s)} ds = 4 sqrt(pi)", r.value, 4.0 * sqrt_pi, 1e-10),
        Err(e) => {
            println!("FAIL subordination moment: {e}");
            ok = false;
        }
    }
    match quad::integrate_semi_infinite(&|p: f64| p * (-p).exp(), &spec) {
        Ok(r) => ok &= report("int p e^-p dp = 1", r.value, 1.0, 1e-10),
        Err(e) => {
            println!("FAIL gamma(2): {e}");
            ok = false;
        }
    }
    match quad::integrate_semi_infinite(&|s: f64| (-s * s).exp(), &spec) {
        Ok(r) => ok &= report("int e^{-s^2} ds = sqrt(pi)/2", r.value, 0.5 * sqrt_pi, 1e-10),
        Err(e) => {
            println!("FAIL gaussian: {e}");
            ok = false;
        }
    }
    let base = quad::free_gaussian(1.0);
    match quad::subordinate_massless(&SubordinationInput { base_kernel: &base, t: 1.0, mass: 0.0 }, &spec) {
        Ok(r) => ok &= report("subordinated free gaussian, t=1 d=1", r.value, quad::free_relativistic(1.0, 1.0), 1e-8),
        Err(e) => {
            println!("FAIL subordination: {e}");
            ok = false;
        }
    }
    if ok {
        0
    } else {
        1
    }
}

/// One call per stdin line: `gamma x`, `lngamma x`, `beta p q`,
/// `bessel_j nu x`, `bessel_i nu x`, `gauss_2f1 a b c w`.
fn cmd_specfun_eval() -> i32 {
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in stdin.lock().lines() {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: {e}");
                return 1;
            }
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        let args: Result<Vec<f64>, _> = tokens[1..].iter().map(|s| s.parse::<f64>()).collect();
        let args = match args {
            Ok(a) => a,
            Err(e) => {
                eprintln!("error: bad number in `{line}`: {e}");
                return 2;
            }
        };
        let value: Result<f64, String> = match (tokens[0], args.len()) {
            ("gamma", 1) => specfun::gamma_fn(args[0]).map_err(|e| e.to_string()),
            ("lngamma", 1) => specfun::ln_gamma(args[0]).map_err(|e| e.to_string()),
            ("beta", 2) => specfun::beta_fn(args[0], args[1]).map_err(|e| e.to_string()),
            ("bessel_j", 2) => BesselOrder::new(args[0])
                .and_then(|o| specfun::bessel_j(o, args[1]))
                .map_err(|e| e.to_string()),
            ("bessel_i", 2) => specfun::bessel_i(args[0], args[1], false).map_err(|e| e.to_string()),
            ("gauss_2f1", 4) => specfun::gauss_2f1(&HypergeometricArgs::new(args[0], args[1], args[2], args[3]))
                .map_err(|e| e.to_string()),
            (name, n) => Err(format!("unknown call `{name}` with {n} arguments")),
        };
        match value {
            Ok(v) => {
                if writeln!(out, "{v}").is_err() {
                    return 1;
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        }
    }
    0
}
