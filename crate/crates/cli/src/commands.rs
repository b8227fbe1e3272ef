use std::fs;
use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args};
use ergo_core::decompose::{decompose as split, max_noise_level, noise_inverse, noise_matrix, sdpi_verify};
use ergo_core::influence::{escape_csv, escape_probability_bound, escape_probability_estimate, EscapeRow};
use ergo_core::ips::{
    check_ips_local_stationary, check_ips_stationary_bernoulli, exact_ips_curve, exact_window_marginals, simulate_ips,
    TorusModel,
};
use ergo_core::measures::pattern_string;
use ergo_core::pca::{
    check_pca_stationary, check_piatetski_shapiro, curve_csv, default_beta1, evolve_pca_exact, mixing_time_bound,
    theorem_constants, CurveRow, InitialMeasure, StationarityReport,
};
use ergo_core::rules::{biased_xor, copy_flip, copy_plain, xor_noise};
use ergo_core::{
    Caps, Error, Exact, LocalRule, Marginal, Neighbourhood, NumericMode, Result, Scalar, Site, SiteSet, TorusSpec,
    Window,
};

use crate::{Mode, RuleArgs, RuleKind};

fn read_rule<T: Scalar>(path: &Path) -> Result<LocalRule<T>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read rule file {}: {e}", path.display())))?;
    LocalRule::from_json(&text)
}

fn load<T: Scalar>(args: &RuleArgs) -> Result<(LocalRule<T>, Marginal<T>)> {
    let rule = read_rule::<T>(&args.rule)?;
    let q = Marginal::parse(&args.q, rule.sigma())?;
    if !q.is_strictly_positive() {
        return Err(Error::InvalidArgument("q must be strictly positive".into()));
    }
    Ok((rule, q))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn parse_scalar<T: Scalar>(text: &str, what: &str) -> Result<T> {
    T::parse_literal(text).ok_or_else(|| Error::Parse(format!("bad {what} {text:?}")))
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    text.split(',').map(|s| parse_scalar::<f64>(s.trim(), what)).collect()
}

pub fn make_rule(kind: RuleKind, eps: &str, mode: Mode, out: Option<&Path>) -> Result<u8> {
    let eps: Exact = parse_scalar(eps, "eps")?;
    let rule = match kind {
        RuleKind::XorNoise => xor_noise(eps)?,
        RuleKind::BiasedXor => biased_xor(eps)?,
        RuleKind::CopyFlip => copy_flip(eps)?,
        RuleKind::CopyPlain => copy_plain(eps)?,
    };
    let mode = match mode {
        Mode::Rational => NumericMode::Rational,
        Mode::Float => NumericMode::Float,
    };
    emit(&(rule.to_json(mode) + "\n"), out)?;
    Ok(0)
}

pub fn decompose(args: &RuleArgs, kappa: Option<&str>, mode: Mode) -> Result<u8> {
    match mode {
        Mode::Rational => decompose_in::<Exact>(args, kappa),
        Mode::Float => decompose_in::<f64>(args, kappa),
    }
}

fn print_matrix<T: Scalar>(name: &str, m: &ergo_core::Matrix<T>) {
    println!("{name}:");
    print!("{m}");
}

fn decompose_in<T: Scalar>(args: &RuleArgs, kappa: Option<&str>) -> Result<u8> {
    let (phi, q) = load::<T>(args)?;
    let max = max_noise_level(&phi, &q)?;
    println!("max kappa: {}", max.to_literal());
    if max.is_zero() {
        return Err(Error::NotStrictlyPositive);
    }
    let kappa = match kappa {
        Some(k) => parse_scalar::<T>(k, "kappa")?,
        None => max,
    };
    if kappa == T::one() {
        println!("kappa = 1: the rule is pure q-resampling (no psi component)");
        print_matrix("theta", &noise_matrix(&kappa, &q)?);
        return Ok(0);
    }
    let dec = split(&phi, &q, &kappa)?;
    println!("kappa: {}", dec.kappa.to_literal());
    println!("psi:");
    let rho = phi.neighbourhood().size();
    for i in 0..dec.psi.row_count() {
        let row: Vec<String> = dec.psi.row(i).iter().map(|x| x.to_literal()).collect();
        println!("  {} -> [{}]", pattern_string(i, rho, phi.sigma()), row.join(", "));
    }
    print_matrix("theta", &dec.theta);
    print_matrix("theta_inverse", &noise_inverse(&kappa, &q)?);
    Ok(0)
}

pub fn check_stationary(args: &RuleArgs, max_diameter: usize, ips: bool, local: bool, mode: Mode) -> Result<u8> {
    match mode {
        Mode::Rational => check_in::<Exact>(args, max_diameter, ips, local),
        Mode::Float => check_in::<f64>(args, max_diameter, ips, local),
    }
}

fn check_in<T: Scalar>(args: &RuleArgs, max_diameter: usize, ips: bool, local: bool) -> Result<u8> {
    let (phi, q) = load::<T>(args)?;
    let cap = Caps::from_env().window;
    let pca_fast = phi.dimension() == 1 && phi.neighbourhood().offsets() == [Site::from(0), Site::from(1)];
    let (label, report): (&str, StationarityReport<T>) = match (ips, local) {
        (true, true) => ("IPS local stationarity (every single-site update)", check_ips_local_stationary(&phi, &q)?),
        (true, false) => ("IPS generator on box cylinders", check_ips_stationary_bernoulli(&phi, &q, max_diameter, cap)?),
        (false, _) if pca_fast => ("PCA, words up to length |alphabet|+1", check_piatetski_shapiro(&phi, &q)?),
        (false, _) => ("PCA on box cylinders", check_pca_stationary(&phi, &q, max_diameter, cap)?),
    };
    println!("check: {label}");
    println!("cylinders checked: {}", report.cylinders_checked);
    println!("max deviation: {}", report.max_deviation.to_literal());
    if report.stationary {
        println!("verdict: stationary");
        Ok(0)
    } else {
        println!("verdict: not stationary");
        if let Some(w) = &report.witness {
            println!("witness: {w}");
        }
        Ok(3)
    }
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("engine").required(true).args(["exact_pca", "exact_ips", "simulate"])))]
pub struct EvolveArgs {
    #[command(flatten)]
    rule: RuleArgs,
    /// `zeros`, `ones`, `uniform`, `product:<weights>` or `periodic:<digits>`.
    #[arg(long, default_value = "zeros")]
    init: String,
    /// Window side: sites `0..n` (a box of side n in higher dimension).
    #[arg(long, default_value_t = 4)]
    window: usize,
    /// Use every torus site as the window (IPS engines).
    #[arg(long)]
    whole_torus: bool,
    /// Synchronous steps for --exact-pca.
    #[arg(long, default_value_t = 10)]
    steps: usize,
    /// Comma-separated checkpoint times for the IPS engines.
    #[arg(long, default_value = "0.5,1,2,4")]
    times: String,
    #[arg(long)]
    exact_pca: bool,
    #[arg(long)]
    exact_ips: bool,
    #[arg(long)]
    simulate: bool,
    /// Torus side for the IPS engines.
    #[arg(long, default_value_t = 8)]
    ring: usize,
    #[arg(long, default_value_t = 10_000)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Decay exponent for the envelope column (default: half the admissible range).
    #[arg(long)]
    beta1: Option<f64>,
    /// Poisson-tail tolerance for uniformization.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Arithmetic for --exact-pca (the IPS engines always use floats).
    #[arg(long, value_enum, default_value = "float")]
    mode: Mode,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_init<T: Scalar>(text: &str, sigma: usize, dim: usize) -> Result<InitialMeasure<T>> {
    let text = text.trim();
    match text {
        "zeros" => return Ok(InitialMeasure::constant(0, dim)),
        "ones" => return Ok(InitialMeasure::constant(1, dim)),
        "uniform" => return Ok(InitialMeasure::Product(Marginal::uniform(sigma))),
        _ => {}
    }
    if let Some(w) = text.strip_prefix("product:") {
        return Ok(InitialMeasure::Product(Marginal::parse(w, sigma)?));
    }
    if let Some(d) = text.strip_prefix("periodic:") {
        if dim != 1 {
            return Err(Error::Parse("periodic initial states are one-dimensional".into()));
        }
        let pattern = d
            .chars()
            .map(|c| c.to_digit(10).filter(|&v| (v as usize) < sigma).map(|v| v as u8))
            .collect::<Option<Vec<_>>>()
            .filter(|p| !p.is_empty())
            .ok_or_else(|| Error::Parse(format!("bad periodic pattern {d:?}")))?;
        return Ok(InitialMeasure::Periodic { sides: vec![pattern.len()], pattern });
    }
    Err(Error::Parse(format!("unknown initial measure {text:?}")))
}

fn box_window(dim: usize, side: usize) -> Window {
    Window::from_set(&SiteSet::boxed(&vec![0; dim], &vec![side; dim]))
}

pub fn evolve(args: &EvolveArgs) -> Result<u8> {
    if args.exact_pca {
        return match args.mode {
            Mode::Rational => evolve_pca_in::<Exact>(args),
            Mode::Float => evolve_pca_in::<f64>(args),
        };
    }
    let (phi, q) = load::<f64>(&args.rule)?;
    let caps = Caps::from_env();
    let dim = phi.dimension();
    let init = parse_init::<f64>(&args.init, phi.sigma(), dim)?;
    let model = TorusModel::new(phi, TorusSpec::new(vec![args.ring; dim])?, caps.torus)?;
    let times = parse_list(&args.times, "time")?;
    let window: Vec<Site> = if args.whole_torus {
        (0..model.sites()).map(|k| model.torus().site_at(k)).collect()
    } else {
        box_window(dim, args.window).sites().to_vec()
    };
    let text = if args.exact_ips {
        let rows: Vec<CurveRow> = exact_ips_curve(&model, &init, &q, &window, &times, args.tol)?
            .into_iter()
            .map(|p| CurveRow { t: p.t, d: p.d, tv: p.tv, iterated_bound: p.bound, envelope: None })
            .collect();
        curve_csv(&rows)
    } else {
        let report = simulate_ips(&model, &init, &times, args.replicas, args.seed, &window)?;
        let exact = if model.state_count() <= 1 << 16 {
            Some(exact_window_marginals(&model, &init, &times, &window, args.tol)?)
        } else {
            None
        };
        report.to_csv(exact.as_deref())
    };
    emit(&text, args.out.as_deref())?;
    Ok(0)
}

fn evolve_pca_in<T: Scalar>(args: &EvolveArgs) -> Result<u8> {
    let (phi, q) = load::<T>(&args.rule)?;
    let dim = phi.dimension();
    let init = parse_init::<T>(&args.init, phi.sigma(), dim)?;
    let j = box_window(dim, args.window);
    let mut traj = evolve_pca_exact(&phi, &init, &j, args.steps, Some(&q), Caps::from_env().window)?;
    if let Some(kappa) = traj.kappa.filter(|&k| k > 0.0) {
        let beta1 = args.beta1.unwrap_or_else(|| default_beta1(kappa));
        traj = traj.with_envelope(&theorem_constants(&phi, &q, beta1)?, args.window);
    }
    emit(&traj.to_csv(), args.out.as_deref())?;
    Ok(0)
}

#[derive(Args, Debug)]
pub struct InfluenceArgs {
    /// Neighbourhood size; uses the centred 1D neighbourhood of that size.
    #[arg(long, default_value_t = 3)]
    rho: usize,
    /// Explicit 1D offsets such as `-1,0,1` (overrides --rho).
    #[arg(long, allow_hyphen_values = true)]
    offsets: Option<String>,
    /// Size of the initial interval A.
    #[arg(long, default_value_t = 1)]
    a: usize,
    /// Comma-separated escape speeds.
    #[arg(long, default_value = "16")]
    ell: String,
    /// Comma-separated times.
    #[arg(long, default_value = "2")]
    t: String,
    #[arg(long, default_value_t = 10_000)]
    replicas: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn influence(args: &InfluenceArgs) -> Result<u8> {
    let nbhd = match &args.offsets {
        Some(text) => Neighbourhood::line(
            &text
                .split(',')
                .map(|s| s.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad offset {s:?}"))))
                .collect::<Result<Vec<_>>>()?,
        )?,
        None => {
            if args.rho == 0 {
                return Err(Error::InvalidArgument("rho must be at least 1".into()));
            }
            let lo = -(((args.rho - 1) / 2) as i64);
            Neighbourhood::line(&(lo..lo + args.rho as i64).collect::<Vec<_>>())?
        }
    };
    if args.a == 0 {
        return Err(Error::InvalidArgument("A must be non-empty".into()));
    }
    let a = SiteSet::interval(0, args.a as i64 - 1);
    let mut rows = Vec::new();
    let mut violated = false;
    for &t in &parse_list(&args.t, "time")? {
        for &ell in &parse_list(&args.ell, "ell")? {
            let bound = escape_probability_bound(args.a, nbhd.size(), ell, t)?;
            let estimate = escape_probability_estimate(&nbhd, &a, t, ell, args.replicas, args.seed)?;
            violated |= estimate.p_hat > bound + 3.0 * estimate.std_err;
            rows.push(EscapeRow { t, ell, bound, estimate });
        }
    }
    emit(&escape_csv(&rows), args.out.as_deref())?;
    Ok(if violated { 3 } else { 0 })
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("updating").required(true).args(["sync", "async_"])))]
pub struct SdpiArgs {
    /// Use theta = (1-kappa) I + kappa Q with this kappa.
    #[arg(long)]
    theta_from_noise: f64,
    #[arg(long, default_value = "uniform")]
    q: String,
    /// Alphabet size when --q is `uniform`.
    #[arg(long, default_value_t = 2)]
    sigma: usize,
    /// Number of coordinates.
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[arg(long)]
    sync: bool,
    #[arg(long = "async")]
    async_: bool,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write per-trial rows here.
    #[arg(long)]
    csv: Option<PathBuf>,
}

pub fn sdpi(args: &SdpiArgs) -> Result<u8> {
    let sigma = if args.q.trim().eq_ignore_ascii_case("uniform") { args.sigma } else { args.q.split(',').count() };
    let q = Marginal::<f64>::parse(&args.q, sigma)?;
    let theta = noise_matrix(&args.theta_from_noise, &q)?;
    let report = sdpi_verify(&theta, &q, args.n, args.sync, args.trials, args.seed)?;
    if let Some(p) = &args.csv {
        fs::write(p, report.to_csv())?;
    }
    println!("inputs: {} ({} point masses)", report.rows.len(), report.rows.len() - args.trials);
    println!("kappa: {}", report.kappa);
    println!("bound: {}", report.bound);
    println!("max ratio: {}", report.max_ratio);
    println!("verdict: {}", if report.pass { "pass" } else { "fail" });
    Ok(if report.pass { 0 } else { 3 })
}

#[derive(Args, Debug)]
pub struct MixingArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Derive alpha and beta from a rule instead.
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    rule: Option<PathBuf>,
    #[arg(long, default_value = "uniform")]
    q: String,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    eps: f64,
}

pub fn mixing_bound(args: &MixingArgs) -> Result<u8> {
    if !(args.eps > 0.0 && args.eps < 1.0) && !(args.eps == 1.0) || args.n == 0 {
        return Err(Error::InvalidArgument("need eps in (0,1] and n >= 1".into()));
    }
    let (alpha, beta, d) = match &args.rule {
        Some(path) => {
            let (phi, q) = load::<f64>(&RuleArgs { rule: path.clone(), q: args.q.clone() })?;
            let kappa = max_noise_level(&phi, &q)?;
            if kappa <= 0.0 {
                return Err(Error::NotStrictlyPositive);
            }
            let c = theorem_constants(&phi, &q, args.beta1.unwrap_or_else(|| default_beta1(kappa)))?;
            println!("alpha: {}", c.alpha);
            println!("beta: {}", c.beta);
            (c.alpha, c.beta, c.dim)
        }
        None => match (args.alpha, args.beta) {
            (Some(a), Some(b)) if a > 0.0 && b > 0.0 => (a, b, args.d),
            _ => return Err(Error::InvalidArgument("give positive --alpha and --beta, or --rule".into())),
        },
    };
    println!("{:.6}", mixing_time_bound(alpha, beta, d, args.n, args.eps));
    Ok(0)
}
