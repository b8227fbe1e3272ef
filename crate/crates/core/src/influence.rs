//! The infection growth process `Pi^t(A)`: an infected site whose rate-1
//! clock rings infects its whole neighbourhood. `Pi^t(A)` has the law of the
//! backwards influence region of `A`, so escape probabilities bound how far
//! information travels in time `t`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::lattice::{influence_window, iterated_neighbourhood, Neighbourhood, Site, SiteSet};

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthState {
    pub infected: SiteSet,
    pub elapsed: f64,
    /// Clock rings that occurred in `[0, elapsed]`.
    pub events: usize,
}

fn check_growth_args(n: &Neighbourhood, a: &SiteSet, t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(invalid("t must be non-negative"));
    }
    if !n.contains_origin() {
        return Err(invalid("growth needs 0 in the neighbourhood"));
    }
    if a.dim() != n.dim() {
        return Err(crate::Error::DimensionMismatch { expected: n.dim(), found: a.dim() });
    }
    Ok(())
}

/// Jump chain: hold `Exp(|infected|)`, pick an infected site uniformly, infect `N(k)`.
pub fn grow_with<R: Rng + ?Sized>(n: &Neighbourhood, a: &SiteSet, t: f64, rng: &mut R) -> Result<GrowthState> {
    check_growth_args(n, a, t)?;
    let mut order: Vec<Site> = a.iter().cloned().collect();
    let mut seen: HashSet<Site> = order.iter().cloned().collect();
    let mut time = 0.0;
    let mut events = 0;
    if !order.is_empty() {
        loop {
            time += rng.sample::<f64, _>(Exp1) / order.len() as f64;
            if time > t {
                break;
            }
            events += 1;
            let k = order[rng.random_range(0..order.len())].clone();
            for s in n.around(&k) {
                if seen.insert(s.clone()) {
                    order.push(s);
                }
            }
        }
    }
    Ok(GrowthState { infected: SiteSet::from_sites(a.dim(), order)?, elapsed: t, events })
}

pub fn simulate_growth(n: &Neighbourhood, a: &SiteSet, t: f64, seed: u64) -> Result<GrowthState> {
    grow_with(n, a, t, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn site_stream(s: &Site) -> u64 {
    // splitmix64 over the coordinates
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &c in s.coords() {
        h ^= c as u64;
        h = h.wrapping_add(0x9E37_79B9_7F4A_7C15);
        h = (h ^ (h >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h = (h ^ (h >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h ^= h >> 31;
    }
    h
}

#[derive(PartialEq)]
struct Tick(f64, Site);

impl Eq for Tick {}

impl PartialOrd for Tick {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Tick {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

/// Growth driven by one Poisson clock per site, each derived from `seed`
/// and the site alone. Runs with the same seed share every clock, which
/// couples `Pi^t(A)` and `Pi^t(B)` monotonically.
pub fn simulate_growth_site_clocks(n: &Neighbourhood, a: &SiteSet, t: f64, seed: u64) -> Result<GrowthState> {
    check_growth_args(n, a, t)?;
    let mut infected: HashSet<Site> = HashSet::new();
    let mut queue = BinaryHeap::new();
    let mut events = 0;
    let infect = |s: Site, at: f64, infected: &mut HashSet<Site>, queue: &mut BinaryHeap<Tick>| {
        if !infected.insert(s.clone()) {
            return;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(site_stream(&s));
        let mut clock = 0.0;
        loop {
            clock += rng.sample::<f64, _>(Exp1);
            if clock > t {
                break;
            }
            if clock > at {
                queue.push(Tick(clock, s.clone()));
            }
        }
    };
    for s in a.iter() {
        infect(s.clone(), 0.0, &mut infected, &mut queue);
    }
    while let Some(Tick(at, k)) = queue.pop() {
        events += 1;
        for s in n.around(&k) {
            infect(s, at, &mut infected, &mut queue);
        }
    }
    Ok(GrowthState { infected: SiteSet::from_sites(a.dim(), infected)?, elapsed: t, events })
}

/// Fraction of replicas whose infected set leaves `window`, with its binomial standard error.
#[derive(Clone, Debug, PartialEq)]
pub struct EscapeEstimate {
    pub p_hat: f64,
    pub std_err: f64,
    pub escapes: u64,
    pub replicas: usize,
}

impl EscapeEstimate {
    fn new(escapes: u64, replicas: usize) -> Self {
        let p = escapes as f64 / replicas as f64;
        EscapeEstimate { p_hat: p, std_err: (p * (1.0 - p) / replicas as f64).sqrt(), escapes, replicas }
    }
}

/// Replica `r` uses stream `r` of `seed`; the count does not depend on scheduling.
pub fn escape_frequency(
    n: &Neighbourhood,
    a: &SiteSet,
    window: &SiteSet,
    t: f64,
    replicas: usize,
    seed: u64,
) -> Result<EscapeEstimate> {
    if replicas == 0 {
        return Err(invalid("need at least one replica"));
    }
    let escapes = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let g = grow_with(n, a, t, &mut rng)?;
            Ok::<u64, crate::Error>(u64::from(!g.infected.is_subset(window)))
        })
        .try_reduce(|| 0, |x, y| Ok(x + y))?;
    Ok(EscapeEstimate::new(escapes, replicas))
}

/// Estimates `P(Pi^t(A) not inside N^{floor(ell t)}(A))`.
pub fn escape_probability_estimate(
    n: &Neighbourhood,
    a: &SiteSet,
    t: f64,
    ell: f64,
    replicas: usize,
    seed: u64,
) -> Result<EscapeEstimate> {
    if ell.is_nan() || ell <= 0.0 {
        return Err(invalid("ell must be positive"));
    }
    check_growth_args(n, a, t)?;
    let horizon = (ell * t).floor() as usize;
    if replicas == 0 {
        return Err(invalid("need at least one replica"));
    }
    // each ring dilates by at most one N, so K rings stay inside N^K(A)
    let escapes = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let g = grow_with(n, a, t, &mut rng)?;
            if g.events <= horizon {
                return Ok(0);
            }
            let window = iterated_neighbourhood(a, n, horizon)?;
            Ok(u64::from(!g.infected.is_subset(&window)))
        })
        .try_reduce(|| 0, |x, y| Ok::<u64, crate::Error>(x + y))?;
    Ok(EscapeEstimate::new(escapes, replicas))
}

/// `|A| exp(-(ell ln(ell/rho) - ell + 1) t)`, unclamped.
pub fn escape_bound_raw(a: usize, rho: usize, ell: f64, t: f64) -> Result<f64> {
    if ell.is_nan() || ell <= 1.0 {
        return Err(invalid("ell must exceed 1"));
    }
    if rho == 0 || t < 0.0 {
        return Err(invalid("need rho >= 1 and t >= 0"));
    }
    Ok(a as f64 * (-(ell * (ell / rho as f64).ln() - ell + 1.0) * t).exp())
}

/// [`escape_bound_raw`] clamped to `[0, 1]`; `1` means the bound is vacuous.
pub fn escape_probability_bound(a: usize, rho: usize, ell: f64, t: f64) -> Result<f64> {
    Ok(escape_bound_raw(a, rho, ell, t)?.min(1.0))
}

/// `P(Pois(mu) >= a) <= exp(-a ln(a/mu) + a - mu)` for `a > mu > 0`.
pub fn chernoff_poisson(mu: f64, a: f64) -> Result<f64> {
    if !(mu > 0.0 && a > mu) {
        return Err(invalid(format!("need a > mu > 0, got mu = {mu}, a = {a}")));
    }
    Ok((-a * (a / mu).ln() + a - mu).exp())
}

/// `P(Pois(mu) >= a)` by direct summation of the upper tail.
pub fn poisson_tail(mu: f64, a: f64) -> f64 {
    let k0 = a.ceil().max(0.0) as u64;
    let mut log_p = -mu;
    for k in 1..=k0 {
        log_p += mu.ln() - (k as f64).ln();
    }
    let mut total = 0.0;
    let mut k = k0;
    loop {
        let term = log_p.exp();
        total += term;
        if (k as f64 > mu && term < total * 1e-17) || k > k0 + 100_000 {
            break;
        }
        k += 1;
        log_p += mu.ln() - (k as f64).ln();
    }
    total.min(1.0)
}

#[derive(Clone, Debug)]
pub struct SecondaryCheck {
    pub window_sites: usize,
    pub estimate: EscapeEstimate,
    pub pass: bool,
}

/// Empirical `P(Pi^t(A) not inside N_{eps,t}(A)) <= eps + 3 SE`.
pub fn secondary_claim_check(
    n: &Neighbourhood,
    a: &SiteSet,
    t: f64,
    eps: f64,
    replicas: usize,
    seed: u64,
) -> Result<SecondaryCheck> {
    let window = influence_window(a, n, eps, t)?;
    let estimate = escape_frequency(n, a, &window, t, replicas, seed)?;
    let pass = estimate.p_hat <= eps + 3.0 * estimate.std_err;
    Ok(SecondaryCheck { window_sites: window.len(), estimate, pass })
}

#[derive(Clone, Debug)]
pub struct EscapeRow {
    pub t: f64,
    pub ell: f64,
    pub bound: f64,
    pub estimate: EscapeEstimate,
}

/// CSV `t,ell,bound,p_hat,std_err,replicas`.
pub fn escape_csv(rows: &[EscapeRow]) -> String {
    let mut out = String::from("t,ell,bound,p_hat,std_err,replicas\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t, r.ell, r.bound, r.estimate.p_hat, r.estimate.std_err, r.estimate.replicas
        );
    }
    out
}
