//! Discrete-time (synchronous) dynamics on finite windows: the window
//! kernel, exact marginal evolution, Bernoulli stationarity checks, and the
//! entropy-decay bounds with their mixing-time corollary.

use std::fmt;
use std::fmt::Write as _;

use rand::Rng;

use crate::decompose::max_noise_level;
use crate::error::{invalid, Error, Result};
use crate::lattice::{iterated_neighbourhood, neighbourhood_of, Site, SiteSet};
use crate::matrix::Matrix;
use crate::measures::{
    bernoulli_marginal, capped_state_count, decode, entropy_upper_bound, pinsker_bound, relative_entropy,
    total_variation, PatternDistribution, Projection, Window,
};
use crate::rules::{LocalRule, Marginal, Symbol};
use crate::scalar::Scalar;

/// Initial law of the process on the whole lattice.
#[derive(Clone, Debug)]
pub enum InitialMeasure<T> {
    /// i.i.d. with the given marginal.
    Product(Marginal<T>),
    /// A deterministic configuration repeating `pattern` over boxes of `sides`.
    Periodic { sides: Vec<usize>, pattern: Vec<Symbol> },
    /// `dist` on its window, independent `outside` marginals elsewhere.
    Explicit { dist: PatternDistribution<T>, outside: Marginal<T> },
}

impl<T: Scalar> InitialMeasure<T> {
    /// Point mass on the constant configuration.
    pub fn constant(symbol: Symbol, dim: usize) -> Self {
        InitialMeasure::Periodic { sides: vec![1; dim], pattern: vec![symbol] }
    }

    fn periodic_symbol(sides: &[usize], pattern: &[Symbol], s: &Site) -> Symbol {
        let idx = s.0.iter().zip(sides).fold(0usize, |acc, (&c, &n)| acc * n + c.rem_euclid(n as i64) as usize);
        pattern[idx]
    }

    fn validate(&self, sigma: usize) -> Result<()> {
        match self {
            InitialMeasure::Product(q) if q.sigma() != sigma => Err(invalid("initial marginal has wrong alphabet")),
            InitialMeasure::Periodic { sides, pattern } => {
                if sides.contains(&0) || sides.iter().product::<usize>() != pattern.len() {
                    return Err(invalid("periodic pattern does not fill its box"));
                }
                if pattern.iter().any(|&s| s as usize >= sigma) {
                    return Err(invalid("periodic pattern symbol out of range"));
                }
                Ok(())
            }
            InitialMeasure::Explicit { dist, outside } if dist.sigma() != sigma || outside.sigma() != sigma => {
                Err(invalid("initial distribution has wrong alphabet"))
            }
            _ => Ok(()),
        }
    }

    /// Exact marginal on `window`.
    pub fn marginal_on(&self, window: &Window, sigma: usize) -> Result<PatternDistribution<T>> {
        self.validate(sigma)?;
        match self {
            InitialMeasure::Product(q) => Ok(bernoulli_marginal(q, window)),
            InitialMeasure::Periodic { sides, pattern } => {
                if sides.len() != window.dim() {
                    return Err(Error::DimensionMismatch { expected: window.dim(), found: sides.len() });
                }
                let word: Vec<Symbol> =
                    window.sites().iter().map(|s| Self::periodic_symbol(sides, pattern, s)).collect();
                PatternDistribution::point_mass(window.clone(), sigma, &word)
            }
            InitialMeasure::Explicit { dist, outside } => {
                let inside = Window::from_set(&SiteSet::from_sites(
                    window.dim(),
                    window.sites().iter().filter(|s| dist.window().position(s).is_some()).cloned(),
                )?);
                let inner = dist.marginalize(&inside)?;
                let inner_proj = Projection::new(&inside.positions_in(window)?, window.len(), sigma);
                let outer_pos: Vec<usize> =
                    (0..window.len()).filter(|&i| inside.position(&window.sites()[i]).is_none()).collect();
                let len = sigma.pow(window.len() as u32);
                let weights = (0..len)
                    .map(|i| {
                        let word = decode(i, window.len(), sigma);
                        outer_pos
                            .iter()
                            .fold(inner.weights()[inner_proj.apply(i)].clone(), |acc, &p| {
                                acc * outside.weight(word[p]).clone()
                            })
                    })
                    .collect();
                Ok(PatternDistribution::from_raw(window.clone(), sigma, weights))
            }
        }
    }

    /// Draws symbols for `sites` (e.g. the representatives of a torus).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, sites: &[Site], sigma: usize) -> Result<Vec<Symbol>> {
        self.validate(sigma)?;
        let draw = |rng: &mut R, weights: &[T]| -> usize {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (i, w) in weights.iter().enumerate() {
                acc += w.to_f64_lossy();
                if u < acc {
                    return i;
                }
            }
            weights.iter().rposition(|w| !w.is_zero()).unwrap_or(0)
        };
        match self {
            InitialMeasure::Product(q) => Ok(sites.iter().map(|_| draw(rng, q.weights()) as Symbol).collect()),
            InitialMeasure::Periodic { sides, pattern } => {
                Ok(sites.iter().map(|s| Self::periodic_symbol(sides, pattern, s)).collect())
            }
            InitialMeasure::Explicit { dist, outside } => {
                let inner = decode(draw(rng, dist.weights()), dist.window().len(), sigma);
                Ok(sites
                    .iter()
                    .map(|s| match dist.window().position(s) {
                        Some(p) => inner[p],
                        None => draw(rng, outside.weights()) as Symbol,
                    })
                    .collect())
            }
        }
    }
}

/// `N(J)` as a window.
pub fn source_window<T: Scalar>(phi: &LocalRule<T>, j: &Window) -> Result<Window> {
    Ok(Window::from_set(&neighbourhood_of(&j.to_set(), phi.neighbourhood())?))
}

/// The dense kernel from `Sigma^{N(J)}` to `Sigma^J`.
#[derive(Clone, Debug)]
pub struct WindowKernel<T: Scalar> {
    pub source: Window,
    pub target: Window,
    pub matrix: Matrix<T>,
}

pub fn pca_window_kernel<T: Scalar>(phi: &LocalRule<T>, j: &Window, cap: usize) -> Result<WindowKernel<T>> {
    let sigma = phi.sigma();
    let source = source_window(phi, j)?;
    capped_state_count(sigma, source.len() + j.len(), cap)?;
    let rows = sigma.pow(source.len() as u32);
    let cols = sigma.pow(j.len() as u32);
    let projections: Vec<Projection> = j
        .sites()
        .iter()
        .map(|k| {
            let pos: Vec<usize> =
                phi.neighbourhood().around(k).iter().map(|s| source.position(s).expect("N(k) inside N(J)")).collect();
            Projection::new(&pos, source.len(), sigma)
        })
        .collect();
    let mut m = Matrix::zeros(rows, cols);
    for u in 0..rows {
        let row_idx: Vec<usize> = projections.iter().map(|p| p.apply(u)).collect();
        for w in 0..cols {
            let word = decode(w, j.len(), sigma);
            let v = row_idx
                .iter()
                .zip(&word)
                .fold(T::one(), |acc, (&r, &b)| acc * phi.prob(r, b).clone());
            m.set(u, w, v);
        }
    }
    Ok(WindowKernel { source, target: j.clone(), matrix: m })
}

#[derive(Clone, Copy, PartialEq)]
enum Var {
    Source(usize),
    Target,
}

/// `(p Phi)_J` where `p` lives on a window containing `N(J)`.
///
/// Targets are attached one at a time and each source site is summed out as
/// soon as no later target reads it, so the intermediate tensors stay small
/// for interval-like windows.
pub fn pushforward<T: Scalar>(
    phi: &LocalRule<T>,
    p: &PatternDistribution<T>,
    j: &Window,
    cap: usize,
) -> Result<PatternDistribution<T>> {
    let sigma = phi.sigma();
    if p.sigma() != sigma {
        return Err(invalid("distribution and rule disagree on alphabet size"));
    }
    let source = source_window(phi, j)?;
    let start = p.marginalize(&source)?;
    let reads: Vec<Vec<usize>> = j
        .sites()
        .iter()
        .map(|k| phi.neighbourhood().around(k).iter().map(|s| source.position(s).expect("inside N(J)")).collect())
        .collect();
    let mut last_use = vec![0usize; source.len()];
    for (t, r) in reads.iter().enumerate() {
        for &s in r {
            last_use[s] = t;
        }
    }

    let mut vars: Vec<Var> = (0..source.len()).map(Var::Source).collect();
    let mut tensor = start.into_weights();
    for (t, r) in reads.iter().enumerate() {
        capped_state_count(sigma, vars.len() + 1, cap)?;
        let pos: Vec<usize> =
            r.iter().map(|&s| vars.iter().position(|v| *v == Var::Source(s)).expect("live source")).collect();
        let proj = Projection::new(&pos, vars.len(), sigma);
        let mut next = vec![T::zero(); tensor.len() * sigma];
        for (i, w) in tensor.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let row = phi.row(proj.apply(i));
            for (b, x) in row.iter().enumerate() {
                next[i * sigma + b] = w.clone() * x.clone();
            }
        }
        vars.push(Var::Target);
        tensor = next;

        let keep: Vec<usize> =
            (0..vars.len()).filter(|&i| !matches!(vars[i], Var::Source(s) if last_use[s] == t)).collect();
        if keep.len() < vars.len() {
            let proj = Projection::new(&keep, vars.len(), sigma);
            let mut reduced = vec![T::zero(); sigma.pow(keep.len() as u32)];
            for (i, w) in tensor.iter().enumerate() {
                if !w.is_zero() {
                    let k = proj.apply(i);
                    reduced[k] = reduced[k].clone() + w.clone();
                }
            }
            vars = keep.iter().map(|&i| vars[i]).collect();
            tensor = reduced;
        }
    }
    debug_assert!(vars.iter().all(|v| *v == Var::Target));
    Ok(PatternDistribution::from_raw(j.clone(), sigma, tensor))
}

/// A cylinder `[w]`: a pattern on a window.
#[derive(Clone, Debug, PartialEq)]
pub struct Cylinder {
    pub window: Window,
    pub pattern: Vec<Symbol>,
}

impl fmt::Display for Cylinder {
    /// 1D cylinders print over their span with `·` for free sites, e.g. `(0,·,1)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.window.dim() == 1 && !self.window.is_empty() {
            let lo = self.window.sites()[0].0[0];
            let hi = self.window.sites()[self.window.len() - 1].0[0];
            let cells: Vec<String> = (lo..=hi)
                .map(|x| match self.window.position(&Site::from(x)) {
                    Some(p) => self.pattern[p].to_string(),
                    None => "·".to_string(),
                })
                .collect();
            write!(f, "({}) at {lo}", cells.join(","))
        } else {
            let cells: Vec<String> =
                self.window.sites().iter().zip(&self.pattern).map(|(s, a)| format!("{:?}={a}", s.0)).collect();
            write!(f, "{{{}}}", cells.join(", "))
        }
    }
}

/// Result of an exhaustive cylinder check.
#[derive(Clone, Debug)]
pub struct StationarityReport<T> {
    pub max_deviation: T,
    pub witness: Option<Cylinder>,
    pub cylinders_checked: usize,
    pub stationary: bool,
}

impl<T: Scalar> StationarityReport<T> {
    pub(crate) fn new() -> Self {
        StationarityReport { max_deviation: T::zero(), witness: None, cylinders_checked: 0, stationary: true }
    }

    /// Folds in `computed - expected` for every pattern of `window`.
    pub(crate) fn absorb(&mut self, window: &Window, sigma: usize, computed: &[T], expected: &[T]) {
        for (i, (a, b)) in computed.iter().zip(expected).enumerate() {
            let dev = (a.clone() - b.clone()).abs();
            if dev > self.max_deviation {
                self.max_deviation = dev;
                self.witness = Some(Cylinder { window: window.clone(), pattern: decode(i, window.len(), sigma) });
            }
            self.cylinders_checked += 1;
        }
        self.stationary = self.max_deviation.is_negligible();
        if self.stationary {
            self.witness = None;
        }
    }
}

/// Every side vector in `[1, max_side]^dim`.
pub(crate) fn box_shapes(dim: usize, max_side: usize) -> Vec<Vec<usize>> {
    let mut shapes = vec![vec![]];
    for _ in 0..dim {
        shapes = shapes
            .into_iter()
            .flat_map(|s: Vec<usize>| {
                (1..=max_side).map(move |n| {
                    let mut v = s.clone();
                    v.push(n);
                    v
                })
            })
            .collect();
    }
    shapes
}

fn require_q<T: Scalar>(phi: &LocalRule<T>, q: &Marginal<T>) -> Result<()> {
    if q.sigma() != phi.sigma() {
        return Err(invalid("q and rule disagree on alphabet size"));
    }
    if !q.is_strictly_positive() {
        return Err(invalid("q must be strictly positive"));
    }
    Ok(())
}

/// `max |(lambda_q Phi)([w]) - lambda_q([w])|` over box windows of diameter `<= max_diameter`.
pub fn check_pca_stationary<T: Scalar>(
    phi: &LocalRule<T>,
    q: &Marginal<T>,
    max_diameter: usize,
    cap: usize,
) -> Result<StationarityReport<T>> {
    require_q(phi, q)?;
    let mut report = StationarityReport::new();
    let dim = phi.dimension();
    for sides in box_shapes(dim, max_diameter) {
        let j = Window::from_set(&SiteSet::boxed(&vec![0; dim], &sides));
        let lambda_nj = bernoulli_marginal(q, &source_window(phi, &j)?);
        let pushed = pushforward(phi, &lambda_nj, &j, cap)?;
        report.absorb(&j, phi.sigma(), pushed.weights(), bernoulli_marginal(q, &j).weights());
    }
    Ok(report)
}

/// The finite criterion for 1D rules on `N = (0, 1)`: the identity on every
/// word of length `1..=sigma+1` implies stationarity of `lambda_q`.
pub fn check_piatetski_shapiro<T: Scalar>(phi: &LocalRule<T>, q: &Marginal<T>) -> Result<StationarityReport<T>> {
    require_q(phi, q)?;
    if phi.dimension() != 1 || phi.neighbourhood().offsets() != [Site::from(0), Site::from(1)] {
        return Err(Error::UnsupportedShape("criterion needs a 1D rule on N = (0, 1)".into()));
    }
    let mut report = StationarityReport::new();
    for len in 1..=phi.sigma() + 1 {
        let j = Window::interval(0, len as i64 - 1);
        let lambda_nj = bernoulli_marginal(q, &source_window(phi, &j)?);
        let pushed = pushforward(phi, &lambda_nj, &j, usize::MAX)?;
        report.absorb(&j, phi.sigma(), pushed.weights(), bernoulli_marginal(q, &j).weights());
    }
    Ok(report)
}

/// One row of a decay curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveRow {
    pub t: f64,
    pub d: f64,
    pub tv: f64,
    pub iterated_bound: Option<f64>,
    pub envelope: Option<f64>,
}

fn fmt_num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_nan() => "nan".into(),
        Some(v) if v.is_infinite() => if v > 0.0 { "inf" } else { "-inf" }.into(),
        Some(v) => v.to_string(),
        None => "nan".into(),
    }
}

/// CSV with columns `t,D_J_nats,TV,iterated_bound,envelope_alpha1_exp,pinsker_of_D`.
pub fn curve_csv(rows: &[CurveRow]) -> String {
    let mut out = String::from("t,D_J_nats,TV,iterated_bound,envelope_alpha1_exp,pinsker_of_D\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t,
            fmt_num(Some(r.d)),
            fmt_num(Some(r.tv)),
            fmt_num(r.iterated_bound),
            fmt_num(r.envelope),
            fmt_num(Some(pinsker_bound(r.d))),
        );
    }
    out
}

#[derive(Clone, Debug)]
pub struct TrajectoryRecord<T> {
    pub t: usize,
    pub dist: PatternDistribution<T>,
    /// `D_J(mu Phi^t || lambda)`.
    pub d_j: Option<f64>,
    pub tv: Option<f64>,
    /// `D_{N(J)}(mu Phi^t || lambda)`; absent at the last step.
    pub d_nj: Option<f64>,
    pub iterated_bound: Option<f64>,
    pub envelope: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct ConvergenceTrajectory<T> {
    pub window: Window,
    pub kappa: Option<f64>,
    pub records: Vec<TrajectoryRecord<T>>,
}

impl<T: Scalar> ConvergenceTrajectory<T> {
    /// Fills the envelope `alpha1 e^{-beta1 t} n^d` for a box of side `n`.
    pub fn with_envelope(mut self, c: &ErgodicityConstants, n: usize) -> Self {
        for r in &mut self.records {
            r.envelope = Some(c.entropy_envelope(r.t as f64, n));
        }
        self
    }

    pub fn tv_series(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.tv.unwrap_or(f64::NAN)).collect()
    }

    pub fn curve(&self) -> Vec<CurveRow> {
        self.records
            .iter()
            .map(|r| CurveRow {
                t: r.t as f64,
                d: r.d_j.unwrap_or(f64::NAN),
                tv: r.tv.unwrap_or(f64::NAN),
                iterated_bound: r.iterated_bound,
                envelope: r.envelope,
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        curve_csv(&self.curve())
    }
}

/// `D_{N^t(J)}(mu || lambda)`, or the cap `|N^t(J)| ln(1/q_min)` when infinite.
fn capped_initial_entropy<T: Scalar>(initial: &PatternDistribution<T>, q: &Marginal<T>) -> Result<f64> {
    let d = relative_entropy(initial, &bernoulli_marginal(q, initial.window()))?;
    if d.is_finite() {
        Ok(d)
    } else {
        entropy_upper_bound(initial.window().len(), q)
    }
}

/// `N^t(J)` for `t = 0..=steps`.
fn window_tower<T: Scalar>(phi: &LocalRule<T>, j: &Window, steps: usize) -> Result<Vec<Window>> {
    (0..=steps)
        .map(|t| Ok(Window::from_set(&iterated_neighbourhood(&j.to_set(), phi.neighbourhood(), t)?)))
        .collect()
}

/// Exact law of `X^t_J` for `t = 0..=steps`. Distances and bounds are filled
/// when a reference `q` is given (the bound only when `kappa > 0`).
pub fn evolve_pca_exact<T: Scalar>(
    phi: &LocalRule<T>,
    mu0: &InitialMeasure<T>,
    j: &Window,
    steps: usize,
    reference: Option<&Marginal<T>>,
    cap: usize,
) -> Result<ConvergenceTrajectory<T>> {
    let sigma = phi.sigma();
    let tower = window_tower(phi, j, steps)?;
    capped_state_count(sigma, tower[steps].len(), cap)?;
    let initial = mu0.marginal_on(&tower[steps], sigma)?;

    let kappa = match reference {
        Some(q) => Some(max_noise_level(phi, q)?.to_f64_lossy()),
        None => None,
    };
    let mut records = Vec::with_capacity(steps + 1);
    let mut cur = initial.clone();
    for t in 0..=steps {
        let dist = cur.marginalize(j)?;
        let (mut d_j, mut tv, mut d_nj, mut bound) = (None, None, None, None);
        if let Some(q) = reference {
            let lambda_j = bernoulli_marginal(q, j);
            d_j = Some(relative_entropy(&dist, &lambda_j)?);
            tv = Some(total_variation(&dist, &lambda_j)?);
            if t < steps {
                let nj = cur.marginalize(&tower[1])?;
                d_nj = Some(relative_entropy(&nj, &bernoulli_marginal(q, &tower[1]))?);
            }
            if let Some(k) = kappa.filter(|&k| k > 0.0) {
                let d0 = capped_initial_entropy(&initial.marginalize(&tower[t])?, q)?;
                bound = Some(if t == 0 { d_j.expect("set above") } else { (1.0 - k).powi(t as i32) * d0 });
            }
        }
        records.push(TrajectoryRecord { t, dist, d_j, tv, d_nj, iterated_bound: bound, envelope: None });
        if t < steps {
            cur = pushforward(phi, &cur, &tower[steps - t - 1], cap)?;
        }
    }
    Ok(ConvergenceTrajectory { window: j.clone(), kappa, records })
}

/// `b(t) = (1-kappa)^t D_{N^t(J)}(mu0 || lambda)` for `t = 0..=steps`,
/// with the entropy cap substituted when the initial entropy is infinite.
pub fn iterated_decay_bound<T: Scalar>(
    phi: &LocalRule<T>,
    q: &Marginal<T>,
    mu0: &InitialMeasure<T>,
    j: &Window,
    steps: usize,
    cap: usize,
) -> Result<Vec<f64>> {
    let kappa = max_noise_level(phi, q)?.to_f64_lossy();
    if kappa <= 0.0 {
        return Err(Error::NotStrictlyPositive);
    }
    let tower = window_tower(phi, j, steps)?;
    tower
        .iter()
        .enumerate()
        .map(|(t, w)| {
            capped_state_count(phi.sigma(), w.len(), cap)?;
            let marginal = mu0.marginal_on(w, phi.sigma())?;
            let d = if t == 0 {
                relative_entropy(&marginal, &bernoulli_marginal(q, w))?
            } else {
                capped_initial_entropy(&marginal, q)?
            };
            Ok(if t == 0 { d } else { (1.0 - kappa).powi(t as i32) * d })
        })
        .collect()
}

/// Explicit `(alpha, beta)` for the exponential decay bound of a positive-rate PCA.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicityConstants {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub radius: u64,
    pub dim: usize,
    pub q_min: f64,
    pub beta1: f64,
    pub alpha1: f64,
}

impl ErgodicityConstants {
    /// `alpha1 e^{-beta1 t} n^d`, dominating the iterated entropy bound on a box of side `n`.
    pub fn entropy_envelope(&self, t: f64, n: usize) -> f64 {
        self.alpha1 * (-self.beta1 * t).exp() * (n as f64).powi(self.dim as i32)
    }

    /// `alpha e^{-beta t} n^{d/2}`, the total-variation bound.
    pub fn tv_envelope(&self, t: f64, n: usize) -> f64 {
        self.alpha * (-self.beta * t).exp() * (n as f64).powf(self.dim as f64 / 2.0)
    }
}

/// Half of the admissible range `(0, -ln(1 - kappa))`; `1` when `kappa = 1`.
pub fn default_beta1(kappa: f64) -> f64 {
    if kappa >= 1.0 {
        1.0
    } else {
        -(1.0 - kappa).ln() / 2.0
    }
}

/// `sup_{t >= 0} (1-kappa)^t e^{beta1 t} (1 + 2rt)^d`.
fn envelope_sup(kappa: f64, beta1: f64, r: f64, d: f64) -> f64 {
    if kappa >= 1.0 {
        return 1.0;
    }
    let c = -(1.0 - kappa).ln() - beta1;
    let log_g = |t: f64| -c * t + d * (1.0 + 2.0 * r * t).ln();
    // log g is concave; its derivative -c + 2rd/(1+2rt) vanishes at t*
    let t_star = if r > 0.0 { ((2.0 * r * d / c - 1.0) / (2.0 * r)).max(0.0) } else { 0.0 };
    log_g(t_star).exp()
}

pub fn theorem_constants<T: Scalar>(phi: &LocalRule<T>, q: &Marginal<T>, beta1: f64) -> Result<ErgodicityConstants> {
    require_q(phi, q)?;
    let kappa = max_noise_level(phi, q)?.to_f64_lossy();
    if kappa <= 0.0 {
        return Err(Error::NotStrictlyPositive);
    }
    let limit = -(1.0 - kappa).ln();
    if !(beta1 > 0.0 && beta1 < limit) {
        return Err(invalid(format!("beta1 = {beta1} outside (0, {limit})")));
    }
    let q_min = q.q_min().to_f64_lossy();
    let radius = phi.neighbourhood().radius();
    let dim = phi.dimension();
    let alpha1 = (1.0 / q_min).ln() * envelope_sup(kappa, beta1, radius as f64, dim as f64);
    Ok(ErgodicityConstants {
        alpha: (alpha1 / 2.0).sqrt(),
        beta: beta1 / 2.0,
        kappa,
        radius,
        dim,
        q_min,
        beta1,
        alpha1,
    })
}

/// `(d / 2 beta) ln n + (ln alpha - ln eps) / beta`.
pub fn mixing_time_bound(alpha: f64, beta: f64, d: usize, n: usize, eps: f64) -> f64 {
    d as f64 / (2.0 * beta) * (n as f64).ln() + (alpha.ln() - eps.ln()) / beta
}

/// First index `t` with `tv[s] < eps` for every recorded `s >= t`.
pub fn settling_index(tv: &[f64], eps: f64) -> Option<usize> {
    let mut first = None;
    for (t, &x) in tv.iter().enumerate().rev() {
        if x < eps {
            first = Some(t);
        } else {
            break;
        }
    }
    first
}

/// Empirical mixing time along one trajectory. This evaluates a single
/// initial measure, so it is a lower-bound witness for the true mixing time.
pub fn empirical_mixing_time<T: Scalar>(traj: &ConvergenceTrajectory<T>, eps: f64) -> Option<usize> {
    settling_index(&traj.tv_series(), eps).map(|i| traj.records[i].t)
}
