//! Continuous-time dynamics: single-site updates against Bernoulli
//! measures, the generator on cylinders, exact evolution on a finite torus
//! by uniformization, entropy-derivative identities, and Monte Carlo with
//! a single rate-`n` event stream.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::lattice::{Neighbourhood, Site, SiteSet, TorusSpec};
use crate::matrix::Matrix;
use crate::measures::{
    bernoulli_marginal, capped_state_count, kl, pattern_string, tv, PatternDistribution, Projection, Window,
};
use crate::pca::{box_shapes, InitialMeasure, StationarityReport};
use crate::rules::{LocalRule, Marginal, Symbol};
use crate::scalar::Scalar;

fn require_q<T: Scalar>(phi: &LocalRule<T>, q: &Marginal<T>) -> Result<()> {
    if q.sigma() != phi.sigma() {
        return Err(invalid("q and rule disagree on alphabet size"));
    }
    if !q.is_strictly_positive() {
        return Err(invalid("q must be strictly positive"));
    }
    Ok(())
}

/// `{k} u N(k)` as a window.
fn update_window<T: Scalar>(phi: &LocalRule<T>, k: &Site) -> Result<Window> {
    let mut set = SiteSet::from_sites(k.dim(), phi.neighbourhood().around(k))?;
    set.insert(k.clone())?;
    Ok(Window::from_set(&set))
}

/// `p hat-Phi_k`: resample site `k` from `phi` given the current `N(k)`.
/// The window of `p` must contain `{k} u N(k)`.
pub fn apply_site_update<T: Scalar>(
    phi: &LocalRule<T>,
    p: &PatternDistribution<T>,
    k: &Site,
) -> Result<PatternDistribution<T>> {
    let sigma = phi.sigma();
    let w = p.window();
    let kpos = w.position(k).ok_or_else(|| Error::WindowMismatch("updated site outside window".into()))?;
    let reads = Window::from_set(&SiteSet::from_sites(k.dim(), phi.neighbourhood().around(k))?);
    reads.positions_in(w)?;
    let pos: Vec<usize> = phi.neighbourhood().around(k).iter().map(|s| w.position(s).expect("checked")).collect();
    let proj = Projection::new(&pos, w.len(), sigma);
    let stride = sigma.pow((w.len() - 1 - kpos) as u32);
    let mut out = vec![T::zero(); p.weights().len()];
    for (i, x) in p.weights().iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let base = i - ((i / stride) % sigma) * stride;
        for (b, f) in phi.row(proj.apply(i)).iter().enumerate() {
            if !f.is_zero() {
                out[base + b * stride] = out[base + b * stride].clone() + x.clone() * f.clone();
            }
        }
    }
    Ok(PatternDistribution::from_raw(w.clone(), sigma, out))
}

/// Law of `(X_{N(k) \ k}, Y_k)` for `X ~ lambda_q`, on the window `{k} u N(k)`.
pub fn single_site_pushforward<T: Scalar>(
    phi: &LocalRule<T>,
    q: &Marginal<T>,
    k: &Site,
) -> Result<PatternDistribution<T>> {
    require_q(phi, q)?;
    let w = update_window(phi, k)?;
    apply_site_update(phi, &bernoulli_marginal(q, &w), k)
}

/// Compares `lambda_q hat-Phi_0` with `lambda_q` on every cylinder of `{0} u N(0)`.
pub fn check_ips_local_stationary<T: Scalar>(phi: &LocalRule<T>, q: &Marginal<T>) -> Result<StationarityReport<T>> {
    let origin = Site::origin(phi.dimension());
    let pushed = single_site_pushforward(phi, q, &origin)?;
    let mut report = StationarityReport::new();
    report.absorb(pushed.window(), phi.sigma(), pushed.weights(), bernoulli_marginal(q, pushed.window()).weights());
    Ok(report)
}

/// `(lambda_q L)([w])` for every pattern `w` on `j`, as
/// `sum_{k in J} ((lambda hat-Phi_k)([w]) - lambda([w]))`.
pub fn generator_on_window<T: Scalar>(phi: &LocalRule<T>, q: &Marginal<T>, j: &Window) -> Result<Vec<T>> {
    require_q(phi, q)?;
    let lambda_j = bernoulli_marginal(q, j);
    let mut acc = vec![T::zero(); lambda_j.weights().len()];
    for k in j.sites() {
        let mut set = j.to_set();
        for s in phi.neighbourhood().around(k) {
            set.insert(s)?;
        }
        let big = Window::from_set(&set);
        let moved = apply_site_update(phi, &bernoulli_marginal(q, &big), k)?.marginalize(j)?;
        for ((a, m), l) in acc.iter_mut().zip(moved.weights()).zip(lambda_j.weights()) {
            *a = a.clone() + m.clone() - l.clone();
        }
    }
    Ok(acc)
}

/// `(lambda_q L)([w])` for a single cylinder.
pub fn generator_on_cylinder<T: Scalar>(
    phi: &LocalRule<T>,
    q: &Marginal<T>,
    j: &Window,
    w: &[Symbol],
) -> Result<T> {
    if w.len() != j.len() || w.iter().any(|&s| s as usize >= phi.sigma()) {
        return Err(invalid("pattern does not fit the window"));
    }
    let values = generator_on_window(phi, q, j)?;
    Ok(values[crate::measures::encode(w, phi.sigma())].clone())
}

/// `max |(lambda_q L)([w])|` over box windows of diameter `<= max_diameter`.
pub fn check_ips_stationary_bernoulli<T: Scalar>(
    phi: &LocalRule<T>,
    q: &Marginal<T>,
    max_diameter: usize,
    cap: usize,
) -> Result<StationarityReport<T>> {
    require_q(phi, q)?;
    let dim = phi.dimension();
    let mut report = StationarityReport::new();
    for sides in box_shapes(dim, max_diameter) {
        let j = Window::from_set(&SiteSet::boxed(&vec![0; dim], &sides));
        let reach = j.to_set().union(&crate::lattice::neighbourhood_of(&j.to_set(), phi.neighbourhood())?)?;
        capped_state_count(phi.sigma(), reach.len(), cap)?;
        let values = generator_on_window(phi, q, &j)?;
        let zeros = vec![T::zero(); values.len()];
        report.absorb(&j, phi.sigma(), &values, &zeros);
    }
    Ok(report)
}

/// A rule running on a finite torus.
#[derive(Clone, Debug)]
pub struct TorusModel<T> {
    rule: LocalRule<T>,
    torus: TorusSpec,
    states: usize,
    /// Torus indices of `N(k)` in neighbourhood order, per site `k`.
    reads: Vec<Vec<usize>>,
}

impl<T: Scalar> TorusModel<T> {
    pub fn new(rule: LocalRule<T>, torus: TorusSpec, cap: usize) -> Result<Self> {
        if rule.dimension() != torus.dim() {
            return Err(Error::DimensionMismatch { expected: torus.dim(), found: rule.dimension() });
        }
        let min_side = *torus.sides().iter().min().expect("non-empty");
        if rule.neighbourhood().radius() as usize >= min_side {
            return Err(invalid(format!(
                "neighbourhood radius {} must be below the smallest torus side {min_side}",
                rule.neighbourhood().radius()
            )));
        }
        let states = capped_state_count(rule.sigma(), torus.site_count(), cap)?;
        let reads = (0..torus.site_count())
            .map(|k| rule.neighbourhood().around(&torus.site_at(k)).iter().map(|s| torus.index_of(s)).collect())
            .collect();
        Ok(TorusModel { rule, torus, states, reads })
    }

    pub fn rule(&self) -> &LocalRule<T> {
        &self.rule
    }

    pub fn torus(&self) -> &TorusSpec {
        &self.torus
    }

    pub fn sites(&self) -> usize {
        self.torus.site_count()
    }

    pub fn state_count(&self) -> usize {
        self.states
    }

    fn stride(&self, k: usize) -> usize {
        self.rule.sigma().pow((self.sites() - 1 - k) as u32)
    }

    fn symbol(&self, x: usize, k: usize) -> usize {
        (x / self.stride(k)) % self.rule.sigma()
    }

    fn row_of(&self, x: usize, k: usize) -> usize {
        self.reads[k].iter().fold(0, |acc, &s| acc * self.rule.sigma() + self.symbol(x, s))
    }

    /// Whole-torus window, in state-index order.
    pub fn window(&self) -> Window {
        Window::from_set(&self.torus.sites())
    }

    /// Torus indices of the (wrapped) sites of `j`.
    pub fn indices_of(&self, j: &[Site]) -> Vec<usize> {
        j.iter().map(|s| self.torus.index_of(s)).collect()
    }

    /// `mu hat-Phi_k` on torus states.
    pub fn site_update(&self, mu: &[T], k: usize) -> Vec<T> {
        let sigma = self.rule.sigma();
        let stride = self.stride(k);
        let mut out = vec![T::zero(); mu.len()];
        for (x, m) in mu.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let base = x - self.symbol(x, k) * stride;
            for (b, f) in self.rule.row(self.row_of(x, k)).iter().enumerate().take(sigma) {
                if !f.is_zero() {
                    out[base + b * stride] = out[base + b * stride].clone() + m.clone() * f.clone();
                }
            }
        }
        out
    }

    /// `mu hat-Phi_J = (1/|J|) sum_{k in J} mu hat-Phi_k`.
    pub fn async_update(&self, mu: &[T], sites: &[usize]) -> Vec<T> {
        let mut acc = vec![T::zero(); mu.len()];
        for &k in sites {
            for (a, v) in acc.iter_mut().zip(self.site_update(mu, k)) {
                *a = a.clone() + v;
            }
        }
        let n = T::from_usize_lossless(sites.len().max(1));
        acc.into_iter().map(|x| x / n.clone()).collect()
    }

    /// Marginal of a torus-state vector on the sites `j`, in the given order.
    pub fn marginal(&self, mu: &[T], j: &[usize]) -> Vec<T> {
        let proj = Projection::new(j, self.sites(), self.rule.sigma());
        let mut out = vec![T::zero(); self.rule.sigma().pow(j.len() as u32)];
        for (x, m) in mu.iter().enumerate() {
            if !m.is_zero() {
                let i = proj.apply(x);
                out[i] = out[i].clone() + m.clone();
            }
        }
        out
    }

    /// Initial torus law (sites read at their representatives `0..side`).
    pub fn initial(&self, mu0: &InitialMeasure<T>) -> Result<Vec<T>> {
        Ok(mu0.marginal_on(&self.window(), self.rule.sigma())?.into_weights())
    }

    /// Product `q` over the torus.
    pub fn product(&self, q: &Marginal<T>) -> Vec<T> {
        bernoulli_marginal(q, &self.window()).into_weights()
    }
}

/// `L = sum_k (hat-Phi_k - I)` acting on torus states, with `Lambda = #sites`.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix<T> {
    model: TorusModel<T>,
}

pub fn torus_generator<T: Scalar>(model: &TorusModel<T>) -> GeneratorMatrix<T> {
    GeneratorMatrix { model: model.clone() }
}

impl<T: Scalar> GeneratorMatrix<T> {
    pub fn model(&self) -> &TorusModel<T> {
        &self.model
    }

    pub fn rate(&self) -> usize {
        self.model.sites()
    }

    /// `mu L`.
    pub fn left_apply(&self, mu: &[T]) -> Vec<T> {
        let n = T::from_usize_lossless(self.rate());
        let mut out: Vec<T> = mu.iter().map(|m| -(m.clone() * n.clone())).collect();
        for k in 0..self.rate() {
            for (o, v) in out.iter_mut().zip(self.model.site_update(mu, k)) {
                *o = o.clone() + v;
            }
        }
        out
    }

    /// `mu P` with `P = I + L / Lambda`.
    pub fn uniformized_apply(&self, mu: &[T]) -> Vec<T> {
        let all: Vec<usize> = (0..self.rate()).collect();
        self.model.async_update(mu, &all)
    }

    /// Dense `L`, for small tori.
    pub fn dense(&self) -> Matrix<T> {
        let s = self.model.state_count();
        let mut m = Matrix::zeros(s, s);
        for x in 0..s {
            let mut e = vec![T::zero(); s];
            e[x] = T::one();
            for (y, v) in self.left_apply(&e).into_iter().enumerate() {
                m.set(x, y, v);
            }
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct UniformizationReport {
    pub terms: usize,
    /// Poisson mass beyond the last term.
    pub truncated_mass: f64,
    /// Factor applied to restore unit mass.
    pub renormalization: f64,
}

/// `mu0 exp(tL) = sum_k Pois(Lambda t; k) mu0 P^k`, truncated once the
/// remaining Poisson mass is below `tol`, then renormalized.
pub fn uniformization_evolve(
    gen: &GeneratorMatrix<f64>,
    mu0: &[f64],
    t: f64,
    tol: f64,
) -> Result<(Vec<f64>, UniformizationReport)> {
    if t < 0.0 || tol <= 0.0 {
        return Err(invalid("need t >= 0 and tol > 0"));
    }
    if mu0.len() != gen.model.state_count() {
        return Err(Error::DimensionMismatch { expected: gen.model.state_count(), found: mu0.len() });
    }
    if t == 0.0 {
        return Ok((mu0.to_vec(), UniformizationReport { terms: 1, truncated_mass: 0.0, renormalization: 1.0 }));
    }
    let lt = gen.rate() as f64 * t;
    let hard_limit = (lt + 40.0 * lt.sqrt() + 200.0) as usize;
    let mut log_w = -lt;
    let mut mass = 0.0;
    let mut cur = mu0.to_vec();
    let mut out = vec![0.0; mu0.len()];
    let mut k = 0usize;
    loop {
        let w = log_w.exp();
        for (o, c) in out.iter_mut().zip(&cur) {
            *o += w * c;
        }
        mass += w;
        if (1.0 - mass <= tol && k as f64 >= lt) || k >= hard_limit {
            break;
        }
        k += 1;
        log_w += lt.ln() - (k as f64).ln();
        cur = gen.uniformized_apply(&cur);
    }
    let total: f64 = out.iter().sum();
    for o in &mut out {
        *o /= total;
    }
    Ok((out, UniformizationReport { terms: k + 1, truncated_mass: (1.0 - mass).max(0.0), renormalization: 1.0 / total }))
}

fn zero_marginal(index: usize, len: usize, sigma: usize) -> Error {
    Error::ZeroMarginal { pattern: pattern_string(index, len, sigma) }
}

/// `dD_J/dt = sum_w (mu L)([w]) ln(mu([w]) / lambda([w]))`.
pub fn entropy_derivative_exact(
    mu: &[f64],
    lambda: &[f64],
    gen: &GeneratorMatrix<f64>,
    j: &[usize],
) -> Result<f64> {
    let m = &gen.model;
    let sigma = m.rule().sigma();
    let mu_j = m.marginal(mu, j);
    let lambda_j = m.marginal(lambda, j);
    let nu_j = m.marginal(&gen.left_apply(mu), j);
    let mut total = 0.0;
    for (i, ((n, a), l)) in nu_j.iter().zip(&mu_j).zip(&lambda_j).enumerate() {
        if *a <= 0.0 {
            return Err(zero_marginal(i, j.len(), sigma));
        }
        total += n * (a / l).ln();
    }
    Ok(total)
}

/// The same derivative as `|J| (D_J(mu hat-Phi_J || lambda) - D_J(mu hat-Phi_J || mu) - D_J(mu || lambda))`.
pub fn entropy_derivative_async(mu: &[f64], lambda: &[f64], model: &TorusModel<f64>, j: &[usize]) -> Result<f64> {
    let moved = model.marginal(&model.async_update(mu, j), j);
    let mu_j = model.marginal(mu, j);
    let lambda_j = model.marginal(lambda, j);
    if let Some(i) = mu_j.iter().position(|&a| a <= 0.0) {
        return Err(zero_marginal(i, j.len(), model.rule().sigma()));
    }
    Ok(j.len() as f64 * (kl(&moved, &lambda_j) - kl(&moved, &mu_j) - kl(&mu_j, &lambda_j)))
}

/// `D0 e^{-kappa t} + ((1-kappa)/kappa) |N| ln(1/q_min) |boundary|`, where
/// `boundary` is the inner `N`-boundary of `J` and `D0 = D_J(mu || lambda)`
/// at time zero.
pub fn entropy_evolution_bound_ips(
    d0: f64,
    kappa: f64,
    nbhd: &Neighbourhood,
    q_min: f64,
    boundary: &SiteSet,
    t: f64,
) -> Result<f64> {
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(invalid(format!("kappa = {kappa} outside (0, 1]")));
    }
    if q_min.is_nan() || q_min <= 0.0 {
        return Err(invalid("q must be strictly positive"));
    }
    let boundary_term = if boundary.is_empty() || kappa == 1.0 {
        0.0
    } else {
        (1.0 - kappa) / kappa * nbhd.size() as f64 * (1.0 / q_min).ln() * boundary.len() as f64
    };
    Ok(d0 * (-kappa * t).exp() + boundary_term)
}

/// Pattern frequencies on a window at each checkpoint, over all replicas.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationReport {
    pub window: Vec<Site>,
    pub sigma: usize,
    pub checkpoints: Vec<f64>,
    pub replicas: usize,
    /// `counts[c][pattern]`.
    pub counts: Vec<Vec<u64>>,
}

impl SimulationReport {
    pub fn empirical(&self, c: usize) -> Vec<f64> {
        self.counts[c].iter().map(|&n| n as f64 / self.replicas as f64).collect()
    }

    /// Binomial standard errors of [`empirical`](Self::empirical).
    pub fn std_err(&self, c: usize) -> Vec<f64> {
        self.empirical(c).iter().map(|p| (p * (1.0 - p) / self.replicas as f64).sqrt()).collect()
    }

    /// CSV `checkpoint_t,pattern,empirical_prob,std_err,exact_prob_if_available`.
    pub fn to_csv(&self, exact: Option<&[Vec<f64>]>) -> String {
        let mut out = String::from("checkpoint_t,pattern,empirical_prob,std_err,exact_prob_if_available\n");
        for (c, t) in self.checkpoints.iter().enumerate() {
            let (p, se) = (self.empirical(c), self.std_err(c));
            for i in 0..p.len() {
                let ex = exact.map(|e| e[c][i].to_string()).unwrap_or_else(|| "nan".into());
                let pat = pattern_string(i, self.window.len(), self.sigma);
                let _ = writeln!(out, "{t},{pat},{},{},{ex}", p[i], se[i]);
            }
        }
        out
    }
}

/// Draws `b` with probability `row[b]`.
fn draw_symbol<R: Rng + ?Sized>(rng: &mut R, row: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (b, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return b;
        }
    }
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// One replica: the pattern index on `window` at each checkpoint.
fn run_replica(
    model: &TorusModel<f64>,
    init: &InitialMeasure<f64>,
    checkpoints: &[f64],
    window: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let n = model.sites();
    let sigma = model.rule().sigma();
    let reps: Vec<Site> = (0..n).map(|k| model.torus().site_at(k)).collect();
    let mut x: Vec<Symbol> = init.sample(rng, &reps, sigma)?;
    let read = |x: &[Symbol]| window.iter().fold(0usize, |acc, &k| acc * sigma + x[k] as usize);
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut time = 0.0;
    let mut next = 0;
    let last = *checkpoints.last().expect("non-empty");
    loop {
        let hold: f64 = rng.sample::<f64, _>(Exp1) / n as f64;
        time += hold;
        while next < checkpoints.len() && checkpoints[next] < time {
            out.push(read(&x));
            next += 1;
        }
        if time > last {
            break;
        }
        let k = rng.random_range(0..n);
        let row = model.reads[k].iter().fold(0usize, |acc, &s| acc * sigma + x[s] as usize);
        x[k] = draw_symbol(rng, model.rule().row(row)) as Symbol;
    }
    Ok(out)
}

/// Monte Carlo of the IPS on a torus. Replica `r` uses stream `r` of `seed`,
/// and draws in the order (holding time, site, symbol), so the result is
/// independent of scheduling.
pub fn simulate_ips(
    model: &TorusModel<f64>,
    init: &InitialMeasure<f64>,
    checkpoints: &[f64],
    replicas: usize,
    seed: u64,
    window: &[Site],
) -> Result<SimulationReport> {
    if replicas == 0 {
        return Err(invalid("need at least one replica"));
    }
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) || checkpoints[0] < 0.0 {
        return Err(invalid("checkpoints must be non-negative and strictly increasing"));
    }
    let sigma = model.rule().sigma();
    let idx = model.indices_of(window);
    let size = capped_state_count(sigma, window.len(), usize::MAX)?;
    let zero = || vec![vec![0u64; size]; checkpoints.len()];
    let counts = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            run_replica(model, init, checkpoints, &idx, &mut rng)
        })
        .try_fold(zero, |mut acc, obs| {
            for (c, p) in obs?.into_iter().enumerate() {
                acc[c][p] += 1;
            }
            Ok::<_, Error>(acc)
        })
        .try_reduce(zero, |mut a, b| {
            for (ra, rb) in a.iter_mut().zip(b) {
                for (x, y) in ra.iter_mut().zip(rb) {
                    *x += y;
                }
            }
            Ok(a)
        })?;
    Ok(SimulationReport { window: window.to_vec(), sigma, checkpoints: checkpoints.to_vec(), replicas, counts })
}

/// Exact window marginals at each checkpoint by uniformization.
pub fn exact_window_marginals(
    model: &TorusModel<f64>,
    init: &InitialMeasure<f64>,
    checkpoints: &[f64],
    window: &[Site],
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    let gen = torus_generator(model);
    let mu0 = model.initial(init)?;
    let idx = model.indices_of(window);
    checkpoints
        .iter()
        .map(|&t| Ok(model.marginal(&uniformization_evolve(&gen, &mu0, t, tol)?.0, &idx)))
        .collect()
}

/// One point of an exact IPS decay curve.
#[derive(Clone, Debug)]
pub struct IpsCurvePoint {
    pub t: f64,
    pub d: f64,
    pub tv: f64,
    pub bound: Option<f64>,
}

/// `D_J(mu_t || lambda)` and TV at each checkpoint, with the evolution bound
/// (when `kappa > 0`) started from `D_J` at time zero.
pub fn exact_ips_curve(
    model: &TorusModel<f64>,
    init: &InitialMeasure<f64>,
    q: &Marginal<f64>,
    window: &[Site],
    checkpoints: &[f64],
    tol: f64,
) -> Result<Vec<IpsCurvePoint>> {
    let gen = torus_generator(model);
    let mu0 = model.initial(init)?;
    let lambda = model.product(q);
    let idx = model.indices_of(window);
    let lambda_j = model.marginal(&lambda, &idx);
    let kappa = crate::decompose::max_noise_level(model.rule(), q)?;
    let d0 = kl(&model.marginal(&mu0, &idx), &lambda_j);
    let jset = SiteSet::from_sites(model.torus().dim(), window.iter().map(|s| model.torus().wrap(s)))?;
    let boundary = crate::lattice::inner_boundary_on_torus(&jset, model.rule().neighbourhood(), model.torus())?;
    checkpoints
        .iter()
        .map(|&t| {
            let mu = uniformization_evolve(&gen, &mu0, t, tol)?.0;
            let mj = model.marginal(&mu, &idx);
            let bound = if kappa > 0.0 {
                Some(entropy_evolution_bound_ips(d0, kappa, model.rule().neighbourhood(), q.q_min(), &boundary, t)?)
            } else {
                None
            };
            Ok(IpsCurvePoint { t, d: kl(&mj, &lambda_j), tv: tv(&mj, &lambda_j), bound })
        })
        .collect()
}

/// Patterns of `window` in index order, as strings (for reports).
pub fn window_patterns(len: usize, sigma: usize) -> Vec<String> {
    (0..sigma.pow(len as u32)).map(|i| pattern_string(i, len, sigma)).collect()
}
