mod parse;
mod plot;
mod verify;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use l2lab::exponents::{constant_checks, headline_exponent};
use l2lab::forms::registry::set_cache_dir;
use l2lab::forms::{FormDescriptor, Registry};
use l2lab::lfunc::{
    additive_twist_lambda, afe_l, afe_lambda, delta_value, direct_series, g_value, gamma_factor, h_value, l_jet,
    root_number, EvalResult, Method, SeriesKind, DEFAULT_SERIES_CUTOFF, SIGMA_MAX,
};
use l2lab::zeros::{
    count_nfs, count_ng, density_report, density_scans, rotated_z, scan_cached, scan_zeros, theta_observed,
    DEFAULT_SCAN_STEP,
};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "l2lab", version, about = "Numerical laboratory for degree-2 L-functions")]
struct Cli {
    /// Registry file (TOML); defaults to the built-in forms.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,
    /// Cache directory for coefficient tables and zero lists.
    #[arg(long, global = true, env = "L2LAB_CACHE")]
    cache: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
    /// Tolerance override NAME=VAL, VAL in [1e-14, 1e-3].
    #[arg(long = "tol", global = true, value_parser = parse::tolerance)]
    tol: Vec<(String, f64)>,
    /// Emit SVG plots where available.
    #[arg(long, global = true)]
    plot: bool,
    /// Directory for report files.
    #[arg(long, global = true, default_value = "l2lab-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Object {
    L,
    Lambda,
    D,
    Delta,
    H,
    G,
    AdditiveTwist,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one object at one point.
    Eval {
        #[arg(long)]
        form: String,
        #[arg(long, value_enum, ignore_case = true)]
        object: Object,
        /// Complex point, e.g. 2+0.5i.
        #[arg(long, allow_hyphen_values = true, value_parser = parse::complex)]
        s: Complex64,
        /// α for H, as num/den.
        #[arg(long, allow_hyphen_values = true)]
        alpha: Option<String>,
        /// Prime for G.
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
        #[arg(long)]
        q: Option<u64>,
    },
    /// Run an identity suite; JSON lines on stdout.
    Verify {
        #[arg(long, value_enum)]
        suite: verify::Suite,
    },
    /// Scan, certify and count zeros.
    Zeros {
        #[arg(long)]
        form: String,
        #[arg(long = "T")]
        t: f64,
        #[arg(long)]
        scan: bool,
        #[arg(long)]
        count: Option<f64>,
        #[arg(long)]
        simple: bool,
        #[arg(long, default_value_t = DEFAULT_SCAN_STEP)]
        step: f64,
    },
    /// Zero counts over the prime-indexed twist family.
    Density {
        #[arg(long)]
        form: String,
        #[arg(long = "X")]
        x: u64,
        #[arg(long = "T")]
        t: f64,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        beta: Vec<f64>,
    },
    /// Exact exponent constants.
    Exponents {
        /// Also print the guaranteed exponent at this θ (num/den).
        #[arg(long)]
        theta: Option<String>,
    },
    /// Markdown summary of zeros and constants for registry forms.
    Report {
        #[arg(long, value_delimiter = ',', default_value = "delta,ec11")]
        forms: Vec<String>,
        #[arg(long = "T", default_value_t = 20.0)]
        t: f64,
    },
}

/// Precondition failures exit with 2, check failures with 1.
enum Failure {
    Usage(anyhow::Error),
    Check(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(e)
    }
}

impl From<l2lab::Error> for Failure {
    fn from(e: l2lab::Error) -> Self {
        Failure::Usage(e.into())
    }
}

struct Ctx {
    registry: Registry,
    tol: Vec<(String, f64)>,
    plot: bool,
    out: PathBuf,
}

impl Ctx {
    fn form(&self, name: &str) -> Result<FormDescriptor> {
        Ok(self.registry.get(name)?)
    }

    fn write(&self, name: &str, body: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        let p = self.out.join(name);
        std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("check failed: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> std::result::Result<(), Failure> {
    if cli.workers == 0 {
        return Err(anyhow!("--workers must be at least 1").into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(cli.workers).build_global().map_err(|e| anyhow!(e))?;
    for (k, _) in &cli.tol {
        if !verify::Tolerances::known(k) {
            return Err(anyhow!("unknown tolerance name '{k}'").into());
        }
    }
    set_cache_dir(cli.cache.clone());
    let registry = match &cli.registry {
        Some(p) => Registry::from_file(p)?,
        None => Registry::builtin(),
    };
    let ctx = Ctx { registry, tol: cli.tol, plot: cli.plot, out: cli.out };
    match cli.command {
        Command::Eval { form, object, s, alpha, p, a, q } => eval(&ctx, &form, object, s, alpha, p, a, q),
        Command::Verify { suite } => verify_cmd(&ctx, suite),
        Command::Zeros { form, t, scan, count, simple, step } => zeros_cmd(&ctx, &form, t, scan, count, simple, step),
        Command::Density { form, x, t, beta } => density_cmd(&ctx, &form, x, t, beta),
        Command::Exponents { theta } => exponents_cmd(theta),
        Command::Report { forms, t } => report_cmd(&ctx, &forms, t),
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.16e}{:+.16e}i", z.re, z.im)
}

#[allow(clippy::too_many_arguments)]
fn eval(
    ctx: &Ctx,
    name: &str,
    object: Object,
    s: Complex64,
    alpha: Option<String>,
    p: Option<u64>,
    a: Option<i64>,
    q: Option<u64>,
) -> std::result::Result<(), Failure> {
    let f = ctx.form(name)?;
    let beyond = s.re > SIGMA_MAX;
    let completed = |r: EvalResult| -> Result<EvalResult> {
        let g = gamma_factor(&f, s)?;
        Ok(EvalResult::new(g * r.value, g.norm() * r.error, r.method))
    };
    let r = match object {
        Object::L if beyond => direct_series(&f, s, SeriesKind::L, DEFAULT_SERIES_CUTOFF)?,
        Object::L => afe_l(&f, s)?,
        Object::Lambda if beyond => completed(direct_series(&f, s, SeriesKind::L, DEFAULT_SERIES_CUTOFF)?)?,
        Object::Lambda => afe_lambda(&f, s)?,
        Object::D if beyond => direct_series(&f, s, SeriesKind::D, DEFAULT_SERIES_CUTOFF)?,
        Object::D => {
            let [l0, l1, l2] = l_jet(&f, s)?;
            let v = l2.value - l1.value * l1.value / l0.value;
            let ratio = (l1.value / l0.value).norm();
            let e = l2.error + 2.0 * ratio * l1.error + ratio * ratio * l0.error;
            EvalResult::new(v, e, Method::Contour)
        }
        Object::Delta if beyond => completed(direct_series(&f, s, SeriesKind::D, DEFAULT_SERIES_CUTOFF)?)?,
        Object::Delta => delta_value(&f, s)?,
        Object::H => {
            let alpha = alpha.ok_or_else(|| anyhow!("--alpha is required for H"))?;
            h_value(&f, parse::rational(&alpha)?, s)?
        }
        Object::G => g_value(&f, p.ok_or_else(|| anyhow!("--p is required for G"))?, s)?,
        Object::AdditiveTwist => {
            let (a, q) = match (a, q, alpha) {
                (Some(a), Some(q), _) => (a, q),
                (_, _, Some(al)) => {
                    let r = parse::rational(&al)?;
                    (*r.numer(), *r.denom() as u64)
                }
                _ => return Err(anyhow!("additive-twist needs --a and --q, or --alpha").into()),
            };
            additive_twist_lambda(&f, s, a, q)?
        }
    };
    println!("form: {name}");
    println!("s: {}", fmt_c(s));
    println!("value: {}", fmt_c(r.value));
    println!("error: {:.3e}", r.error);
    println!("method: {}", r.method);
    Ok(())
}

fn verify_cmd(ctx: &Ctx, suite: verify::Suite) -> std::result::Result<(), Failure> {
    let tol = verify::Tolerances::new(&ctx.tol);
    let checks = verify::run(suite, &tol, &|n| ctx.form(n))?;
    let mut body = String::new();
    for c in &checks {
        println!("{}", c.json());
        body.push_str(&c.json());
        body.push('\n');
    }
    ctx.write(&format!("verify-{}.jsonl", suite.to_possible_value().unwrap().get_name()), &body)?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}

fn zeros_cmd(
    ctx: &Ctx,
    name: &str,
    t: f64,
    scan: bool,
    count: Option<f64>,
    simple: bool,
    step: f64,
) -> std::result::Result<(), Failure> {
    let f = ctx.form(name)?;
    let rep = if step == DEFAULT_SCAN_STEP { scan_cached(&f, t)? } else { scan_zeros(&f, t, step)? };
    println!("form: {name}");
    println!("height: {t}");
    println!("audit_height: {}", rep.audit_height);
    println!("argument_total: {}", rep.argument_total);
    println!("zeros_found: {}", rep.zero_count());
    println!("complete: {}", rep.complete);
    if scan {
        println!("# beta gamma multiplicity |Lambda'|*r/scale |Res+Lambda'|/|Lambda'| detection");
        for z in &rep.zeros {
            println!(
                "{:.12} {:.12} {} {} {} {}",
                z.rho.re,
                z.rho.im,
                z.multiplicity,
                z.normalized_derivative().map_or("-".into(), |v| format!("{v:.3e}")),
                z.residue_mismatch().map_or("-".into(), |v| format!("{v:.3e}")),
                z.detection
            );
        }
    }
    if let Some(beta) = count {
        println!("N({beta}, {t}) = {}", count_ng(&rep, beta, t).value);
    }
    if simple {
        println!("Ns({t}) = {}", count_nfs(&rep, t).value);
    }
    println!("theta_observed: {}", theta_observed(&rep).value);
    if ctx.plot {
        let lo = if f.is_self_dual() { 0.0 } else { -t };
        let n = 600;
        let samples: Vec<(f64, f64)> = (0..=n)
            .map(|j| {
                let x = lo + (t - lo) * j as f64 / n as f64;
                rotated_z(&f, x).map(|h| (x, h.value))
            })
            .collect::<l2lab::Result<_>>()?;
        let on_line: Vec<f64> = rep.zeros.iter().filter(|z| (z.rho.re - 0.5).abs() < 1e-9).map(|z| z.rho.im).collect();
        let p = ctx.write(&format!("zeros_{name}_T{t}.svg"), &plot::z_plot(&format!("rotated Z for {name}"), &samples, &on_line))?;
        println!("plot: {}", p.display());
    }
    if !rep.complete {
        return Err(Failure::Check(format!("scan incomplete: residual count {}", rep.residual_count)));
    }
    Ok(())
}

fn density_cmd(ctx: &Ctx, name: &str, x: u64, t: f64, mut betas: Vec<f64>) -> std::result::Result<(), Failure> {
    if betas.is_empty() {
        return Err(anyhow!("--beta is required").into());
    }
    let f = ctx.form(name)?;
    let scans = density_scans(&f, x, t)?;
    betas.sort_by(f64::total_cmp);
    let mut last = u64::MAX;
    let mut ok = true;
    for beta in betas {
        let rep = density_report(&f, x, t, beta, &scans);
        let csv = rep.to_csv();
        print!("{csv}");
        ctx.write(&format!("density_{name}_X{x}_T{t}_beta{beta}.csv"), &csv)?;
        println!(
            "summary: beta={beta} aggregate={} reference=({:.6}, {:.6}) complete={}",
            rep.aggregate, rep.reference.0, rep.reference.1, rep.complete
        );
        for r in rep.rows.iter().filter(|r| r.count > 0) {
            for z in &r.certificates {
                println!("certificate: p={} rho={} multiplicity={} radius={}", r.p, fmt_c(z.rho), z.multiplicity, z.radius);
            }
        }
        ok &= rep.complete && rep.aggregate <= last;
        last = rep.aggregate;
    }
    if !ok {
        return Err(Failure::Check("incomplete sub-scan or non-monotone aggregate".into()));
    }
    Ok(())
}

fn exponents_cmd(theta: Option<String>) -> std::result::Result<(), Failure> {
    let checks = constant_checks()?;
    for c in &checks {
        println!("{} = {} (expected {}) {}", c.name, c.value, c.expected, if c.passes() { "PASS" } else { "FAIL" });
    }
    if let Some(th) = theta {
        let th = parse::rational(&th)?;
        println!("headline_exponent({th}) = {}", headline_exponent(th)?);
    }
    if checks.iter().any(|c| !c.passes()) {
        return Err(Failure::Check("constant mismatch".into()));
    }
    Ok(())
}

fn report_cmd(ctx: &Ctx, forms: &[String], t: f64) -> std::result::Result<(), Failure> {
    if !(t > 0.0) {
        return Err(anyhow!("height must be positive").into());
    }
    let mut md = String::from("# l2lab report\n\n## Zeros\n\n");
    md.push_str("| form | root number | T | zeros | complete | N^s(T) | theta observed | first zero |\n");
    md.push_str("|---|---|---|---|---|---|---|---|\n");
    let mut complete = true;
    for name in forms {
        let f = ctx.form(name)?;
        let eps = root_number(&f)?;
        let rep = scan_cached(&f, t)?;
        let first = rep.zeros.iter().filter(|z| z.rho.im > 0.0).map(|z| z.rho.im).fold(f64::INFINITY, f64::min);
        let _ = writeln!(
            md,
            "| {name} | {} | {t} | {} | {} | {} | {} | {} |",
            fmt_c(eps),
            rep.zero_count(),
            rep.complete,
            count_nfs(&rep, t).value,
            theta_observed(&rep).value,
            if first.is_finite() { format!("{first:.10}") } else { "-".into() }
        );
        complete &= rep.complete;
    }
    md.push_str("\n## Constants\n\n| name | value | expected |\n|---|---|---|\n");
    for c in constant_checks()? {
        let _ = writeln!(md, "| {} | {} | {} |", c.name, c.value, c.expected);
    }
    let p = ctx.write("report.md", &md)?;
    print!("{md}");
    println!("\nwritten: {}", p.display());
    if !complete {
        return Err(Failure::Check("a zero scan was incomplete".into()));
    }
    Ok(())
}
