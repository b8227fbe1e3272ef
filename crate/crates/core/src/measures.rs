//! Finite-window distributions and the entropy / distance functionals on them.
//!
//! All entropies are in nats. `+inf` is an ordinary value of
//! [`relative_entropy`], following `x ln(x/0) = inf` for `x > 0`.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::Exp1;

use crate::error::{invalid, Error, Result};
use crate::lattice::{Site, SiteSet};
use crate::rules::{Marginal, Symbol};
use crate::scalar::{convert, Scalar};

/// An ordered list of distinct sites, always in canonical order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Window {
    dim: usize,
    sites: Vec<Site>,
}

impl Window {
    pub fn from_set(set: &SiteSet) -> Self {
        Window { dim: set.dim(), sites: set.iter().cloned().collect() }
    }

    pub fn interval(lo: i64, hi: i64) -> Self {
        Window::from_set(&SiteSet::interval(lo, hi))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn position(&self, s: &Site) -> Option<usize> {
        self.sites.binary_search(s).ok()
    }

    pub fn to_set(&self) -> SiteSet {
        SiteSet::from_sites(self.dim, self.sites.iter().cloned()).expect("window dims are uniform")
    }

    pub fn is_subset_of(&self, other: &Window) -> bool {
        self.sites.iter().all(|s| other.position(s).is_some())
    }

    /// Positions of `self`'s sites inside `other`.
    pub fn positions_in(&self, other: &Window) -> Result<Vec<usize>> {
        self.sites
            .iter()
            .map(|s| {
                other
                    .position(s)
                    .ok_or_else(|| Error::WindowMismatch(format!("site {s:?} not in enclosing window")))
            })
            .collect()
    }

    /// Sites of `self` not in `other`, as a window.
    pub fn minus(&self, other: &Window) -> Window {
        Window {
            dim: self.dim,
            sites: self.sites.iter().filter(|s| other.position(s).is_none()).cloned().collect(),
        }
    }
}

/// `sigma^len`, or an error when it overflows.
pub fn state_count(sigma: usize, len: usize) -> Result<usize> {
    u32::try_from(len)
        .ok()
        .and_then(|l| sigma.checked_pow(l))
        .ok_or(Error::CapExceeded { required: u128::MAX, sites: len, cap: usize::MAX as u128 })
}

/// `sigma^len` if it fits under `cap`, otherwise a resource error.
pub fn capped_state_count(sigma: usize, len: usize, cap: usize) -> Result<usize> {
    let required = u32::try_from(len).ok().and_then(|l| (sigma as u128).checked_pow(l)).unwrap_or(u128::MAX);
    if required > cap as u128 {
        return Err(Error::CapExceeded { required, sites: len, cap: cap as u128 });
    }
    Ok(required as usize)
}

/// Base-sigma value of a word, first symbol most significant.
pub fn encode(word: &[Symbol], sigma: usize) -> usize {
    word.iter().fold(0usize, |acc, &s| acc * sigma + s as usize)
}

pub fn decode(mut index: usize, len: usize, sigma: usize) -> Vec<Symbol> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (index % sigma) as Symbol;
        index /= sigma;
    }
    out
}

/// Digit string of a pattern (dot-separated when sigma > 10).
pub fn pattern_string(index: usize, len: usize, sigma: usize) -> String {
    let word = decode(index, len, sigma);
    if sigma <= 10 {
        word.iter().map(|&s| char::from(b'0' + s)).collect()
    } else {
        word.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(".")
    }
}

fn parse_pattern(text: &str, sigma: usize) -> Result<Vec<Symbol>> {
    let parts: Vec<&str> = if sigma <= 10 {
        text.char_indices().map(|(i, c)| &text[i..i + c.len_utf8()]).collect()
    } else {
        text.split('.').collect()
    };
    parts
        .into_iter()
        .map(|p| {
            p.parse::<usize>()
                .ok()
                .filter(|&v| v < sigma)
                .map(|v| v as Symbol)
                .ok_or_else(|| Error::Parse(format!("bad pattern symbol {p:?}")))
        })
        .collect()
}

/// Extracts sub-pattern indices: `sub_index(idx)` for a fixed list of positions.
pub(crate) struct Projection {
    strides: Vec<usize>,
    sigma: usize,
}

impl Projection {
    pub(crate) fn new(positions: &[usize], outer_len: usize, sigma: usize) -> Self {
        let strides = positions.iter().map(|&p| sigma.pow((outer_len - 1 - p) as u32)).collect();
        Projection { strides, sigma }
    }

    #[inline]
    pub(crate) fn apply(&self, index: usize) -> usize {
        self.strides.iter().fold(0usize, |acc, &st| acc * self.sigma + (index / st) % self.sigma)
    }
}

/// An explicit probability vector over `Sigma^J`.
#[derive(Clone, PartialEq, Debug)]
pub struct PatternDistribution<T> {
    window: Window,
    sigma: usize,
    weights: Vec<T>,
}

impl<T: Scalar> PatternDistribution<T> {
    /// Validates non-negativity and unit mass.
    pub fn new(window: Window, sigma: usize, weights: Vec<T>) -> Result<Self> {
        if weights.len() != state_count(sigma, window.len())? {
            return Err(invalid(format!(
                "expected {} weights for {} sites, got {}",
                sigma.pow(window.len() as u32),
                window.len(),
                weights.len()
            )));
        }
        if let Some(i) = weights.iter().position(|w| *w < T::zero()) {
            return Err(invalid(format!("negative weight at pattern {i}")));
        }
        let total = weights.iter().fold(T::zero(), |a, w| a + w.clone());
        let slack = T::tolerance() * T::from_usize_lossless(weights.len().max(1));
        if (total.clone() - T::one()).abs() > slack {
            return Err(invalid(format!("weights sum to {total}, not 1")));
        }
        Ok(PatternDistribution { window, sigma, weights })
    }

    pub(crate) fn from_raw(window: Window, sigma: usize, weights: Vec<T>) -> Self {
        debug_assert_eq!(weights.len(), sigma.pow(window.len() as u32));
        PatternDistribution { window, sigma, weights }
    }

    pub fn point_mass(window: Window, sigma: usize, pattern: &[Symbol]) -> Result<Self> {
        if pattern.len() != window.len() || pattern.iter().any(|&s| s as usize >= sigma) {
            return Err(invalid("pattern does not fit window/alphabet"));
        }
        let mut weights = vec![T::zero(); state_count(sigma, window.len())?];
        weights[encode(pattern, sigma)] = T::one();
        Ok(PatternDistribution { window, sigma, weights })
    }

    /// Independent product with a marginal per site, in window order.
    pub fn product(window: Window, per_site: &[&Marginal<T>]) -> Result<Self> {
        if per_site.len() != window.len() {
            return Err(invalid("one marginal per site required"));
        }
        let sigma = per_site.first().map(|m| m.sigma()).unwrap_or(2);
        if per_site.iter().any(|m| m.sigma() != sigma) {
            return Err(invalid("marginals disagree on alphabet size"));
        }
        let mut weights = vec![T::one()];
        for m in per_site {
            let mut next = Vec::with_capacity(weights.len() * sigma);
            for w in &weights {
                for a in 0..sigma {
                    next.push(w.clone() * m.weight(a as Symbol).clone());
                }
            }
            weights = next;
        }
        Ok(PatternDistribution { window, sigma, weights })
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn into_weights(self) -> Vec<T> {
        self.weights
    }

    pub fn weight(&self, pattern: &[Symbol]) -> &T {
        &self.weights[encode(pattern, self.sigma)]
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, w| a + w.clone())
    }

    /// Sums out every site not in `sub`.
    pub fn marginalize(&self, sub: &Window) -> Result<Self> {
        if !sub.is_subset_of(&self.window) {
            return Err(Error::WindowMismatch("sub-window is not contained in the window".into()));
        }
        if sub == &self.window {
            return Ok(self.clone());
        }
        let positions = sub.positions_in(&self.window)?;
        let proj = Projection::new(&positions, self.window.len(), self.sigma);
        let mut out = vec![T::zero(); self.sigma.pow(sub.len() as u32)];
        for (i, w) in self.weights.iter().enumerate() {
            if !w.is_zero() {
                let j = proj.apply(i);
                out[j] = out[j].clone() + w.clone();
            }
        }
        Ok(PatternDistribution { window: sub.clone(), sigma: self.sigma, weights: out })
    }

    pub fn convert<U: Scalar>(&self) -> PatternDistribution<U> {
        PatternDistribution {
            window: self.window.clone(),
            sigma: self.sigma,
            weights: self.weights.iter().map(convert::<T, U>).collect(),
        }
    }

    pub fn to_f64(&self) -> PatternDistribution<f64> {
        PatternDistribution {
            window: self.window.clone(),
            sigma: self.sigma,
            weights: self.weights.iter().map(|w| w.to_f64_lossy()).collect(),
        }
    }

    /// CSV with header `pattern,weight`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("pattern,weight\n");
        for (i, w) in self.weights.iter().enumerate() {
            let _ = writeln!(out, "{},{}", pattern_string(i, self.window.len(), self.sigma), w.to_literal());
        }
        out
    }

    /// Parses the CSV written by [`to_csv`](Self::to_csv). Missing patterns have weight 0.
    pub fn from_csv(text: &str, window: Window, sigma: usize) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next().map(str::trim) {
            Some("pattern,weight") => {}
            other => return Err(Error::Parse(format!("unexpected header {other:?}"))),
        }
        let mut weights = vec![T::zero(); state_count(sigma, window.len())?];
        for line in lines {
            let (pat, w) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad row {line:?}")))?;
            let word = parse_pattern(pat.trim(), sigma)?;
            if word.len() != window.len() {
                return Err(Error::Parse(format!("pattern {pat:?} has wrong length")));
            }
            let w = T::parse_literal(w).ok_or_else(|| Error::Parse(format!("bad weight {w:?}")))?;
            weights[encode(&word, sigma)] = w;
        }
        PatternDistribution::new(window, sigma, weights)
    }
}

/// Product measure `lambda_q` restricted to `window`.
pub fn bernoulli_marginal<T: Scalar>(q: &Marginal<T>, window: &Window) -> PatternDistribution<T> {
    let per_site: Vec<&Marginal<T>> = vec![q; window.len()];
    PatternDistribution::product(window.clone(), &per_site).expect("uniform alphabet")
}

fn same_support<T, U>(p: &PatternDistribution<T>, r: &PatternDistribution<U>) -> Result<()> {
    if p.window != r.window || p.sigma != r.sigma {
        return Err(Error::WindowMismatch("distributions live on different windows".into()));
    }
    Ok(())
}

/// `sum p ln(p/r)` on raw vectors.
pub fn kl(p: &[f64], r: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(r) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            total += a * (a / b).ln();
        }
    }
    total
}

pub fn relative_entropy<T: Scalar>(p: &PatternDistribution<T>, r: &PatternDistribution<T>) -> Result<f64> {
    same_support(p, r)?;
    let pf: Vec<f64> = p.weights.iter().map(|w| w.to_f64_lossy()).collect();
    let rf: Vec<f64> = r.weights.iter().map(|w| w.to_f64_lossy()).collect();
    Ok(kl(&pf, &rf))
}

/// `D((A|B) || (A'|B'))` where `cond` is `B` and `A` is the rest of the window.
pub fn conditional_relative_entropy<T: Scalar>(
    p: &PatternDistribution<T>,
    r: &PatternDistribution<T>,
    cond: &Window,
) -> Result<f64> {
    same_support(p, r)?;
    let pb = p.marginalize(cond)?.to_f64();
    let rb = r.marginalize(cond)?.to_f64();
    let proj = Projection::new(&cond.positions_in(&p.window)?, p.window.len(), p.sigma);
    let mut total = 0.0;
    for (i, w) in p.weights.iter().enumerate() {
        let pw = w.to_f64_lossy();
        if pw <= 0.0 {
            continue;
        }
        let b = proj.apply(i);
        let rw = r.weights[i].to_f64_lossy();
        if rw <= 0.0 {
            return Ok(f64::INFINITY);
        }
        let p_cond = pw / pb.weights[b];
        let r_cond = rw / rb.weights[b];
        total += pw * (p_cond / r_cond).ln();
    }
    Ok(total)
}

/// Product of the marginals of `p` on `a` and on its complement.
fn split_product(p: &PatternDistribution<f64>, a: &Window) -> Result<PatternDistribution<f64>> {
    let b = p.window.minus(a);
    let pa = p.marginalize(a)?;
    let pb = p.marginalize(&b)?;
    let proj_a = Projection::new(&a.positions_in(&p.window)?, p.window.len(), p.sigma);
    let proj_b = Projection::new(&b.positions_in(&p.window)?, p.window.len(), p.sigma);
    let weights = (0..p.weights.len()).map(|i| pa.weights[proj_a.apply(i)] * pb.weights[proj_b.apply(i)]).collect();
    Ok(PatternDistribution::from_raw(p.window.clone(), p.sigma, weights))
}

/// `I(A : B) = D(p || p_A (x) p_B)` with `B` the complement of `a`.
pub fn mutual_information<T: Scalar>(p: &PatternDistribution<T>, a: &Window) -> Result<f64> {
    let pf = p.to_f64();
    let prod = split_product(&pf, a)?;
    Ok(kl(&pf.weights, &prod.weights).max(0.0))
}

/// `D((A|C) || A')` with `A' ~ r_a` on `a` and `C` the rest of the window.
pub fn conditional_divergence_to<T: Scalar>(
    p: &PatternDistribution<T>,
    a: &Window,
    r_a: &PatternDistribution<T>,
) -> Result<f64> {
    if r_a.window() != a {
        return Err(Error::WindowMismatch("reference must live on the conditioned block".into()));
    }
    let c = p.window.minus(a);
    let pf = p.to_f64();
    let pc = pf.marginalize(&c)?;
    let proj_a = Projection::new(&a.positions_in(&p.window)?, p.window.len(), p.sigma);
    let proj_c = Projection::new(&c.positions_in(&p.window)?, p.window.len(), p.sigma);
    let mut total = 0.0;
    for (i, &pw) in pf.weights.iter().enumerate() {
        if pw <= 0.0 {
            continue;
        }
        let ra = r_a.weights[proj_a.apply(i)].to_f64_lossy();
        if ra <= 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pw * (pw / pc.weights[proj_c.apply(i)] / ra).ln();
    }
    Ok(total)
}

pub fn total_variation<T: Scalar>(p: &PatternDistribution<T>, r: &PatternDistribution<T>) -> Result<f64> {
    same_support(p, r)?;
    Ok(tv(
        &p.weights.iter().map(|w| w.to_f64_lossy()).collect::<Vec<_>>(),
        &r.weights.iter().map(|w| w.to_f64_lossy()).collect::<Vec<_>>(),
    ))
}

pub fn tv(p: &[f64], r: &[f64]) -> f64 {
    0.5 * p.iter().zip(r).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Pinsker: `TV <= sqrt(D / 2)`.
pub fn pinsker_bound(d: f64) -> f64 {
    (d.max(0.0) / 2.0).sqrt()
}

/// `a ln(1/q_min)`, the cap on the entropy of `a` sites relative to `lambda_q`.
pub fn entropy_upper_bound<T: Scalar>(a: usize, q: &Marginal<T>) -> Result<f64> {
    let q_min = q.q_min().to_f64_lossy();
    if q_min <= 0.0 {
        return Err(invalid("q must be strictly positive"));
    }
    Ok(a as f64 * (1.0 / q_min).ln())
}

/// A flat-Dirichlet sample on `len` points.
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = v.iter().sum();
    for x in &mut v {
        *x /= total;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(n: i64) -> Window {
        Window::interval(0, n - 1)
    }

    fn dist(ws: &[f64]) -> PatternDistribution<f64> {
        let n = (ws.len() as f64).log2().round() as i64;
        PatternDistribution::new(w(n), 2, ws.to_vec()).unwrap()
    }

    #[test]
    fn bernoulli_examples() {
        let u = Marginal::<BigRational>::uniform(2);
        let b = bernoulli_marginal(&u, &w(3));
        assert!(b.weights().iter().all(|x| *x == BigRational::ratio(1, 8)));
        let q = Marginal::new(vec![0.9_f64, 0.1]).unwrap();
        assert_eq!(bernoulli_marginal(&q, &w(1)).weights(), &[0.9, 0.1]);
        assert!((bernoulli_marginal(&q, &w(2)).weight(&[1, 1]) - 0.01).abs() < 1e-15);
    }

    #[test]
    fn marginalize_examples() {
        let p = dist(&[0.25; 4]);
        assert_eq!(p.marginalize(&w(2)).unwrap(), p);
        assert_eq!(p.marginalize(&Window::interval(1, 1)).unwrap().weights(), &[0.5, 0.5]);
        let pm = PatternDistribution::<f64>::point_mass(w(2), 2, &[0, 1]).unwrap();
        assert_eq!(pm.marginalize(&Window::interval(1, 1)).unwrap().weights(), &[0.0, 1.0]);
        assert!(pm.marginalize(&Window::interval(5, 5)).is_err());
    }

    #[test]
    fn relative_entropy_examples() {
        let p = dist(&[0.9, 0.1]);
        assert_eq!(relative_entropy(&p, &p).unwrap(), 0.0);
        let d = relative_entropy(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
        assert!((d - std::f64::consts::LN_2).abs() < 1e-12);
        let d = relative_entropy(&p, &dist(&[0.5, 0.5])).unwrap();
        assert!((d - 0.368064).abs() < 1e-6);
        assert_eq!(relative_entropy(&dist(&[0.5, 0.5]), &dist(&[1.0, 0.0])).unwrap(), f64::INFINITY);
        assert!(relative_entropy(&p, &dist(&[0.25; 4])).is_err());
    }

    #[test]
    fn tv_and_pinsker_examples() {
        let p = dist(&[0.9, 0.1]);
        let u = dist(&[0.5, 0.5]);
        assert_eq!(total_variation(&p, &p).unwrap(), 0.0);
        assert_eq!(total_variation(&dist(&[1.0, 0.0]), &dist(&[0.0, 1.0])).unwrap(), 1.0);
        assert!((total_variation(&p, &u).unwrap() - 0.4).abs() < 1e-12);
        assert_eq!(pinsker_bound(0.0), 0.0);
        assert_eq!(pinsker_bound(2.0), 1.0);
        let d = relative_entropy(&p, &u).unwrap();
        assert!((pinsker_bound(d) - 0.429).abs() < 1e-3);
    }

    #[test]
    fn mutual_information_examples() {
        assert!(mutual_information(&dist(&[0.25; 4]), &w(1)).unwrap().abs() < 1e-15);
        let corr = dist(&[0.5, 0.0, 0.0, 0.5]);
        assert!((mutual_information(&corr, &w(1)).unwrap() - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn conditional_product_case() {
        // p, r products: conditional entropy of the first site given the second is D(p_A||r_A)
        let qa = Marginal::new(vec![0.7_f64, 0.3]).unwrap();
        let qb = Marginal::new(vec![0.2_f64, 0.8]).unwrap();
        let ra = Marginal::new(vec![0.4_f64, 0.6]).unwrap();
        let rb = Marginal::new(vec![0.5_f64, 0.5]).unwrap();
        let p = PatternDistribution::product(w(2), &[&qa, &qb]).unwrap();
        let r = PatternDistribution::product(w(2), &[&ra, &rb]).unwrap();
        let cond = Window::interval(1, 1);
        let got = conditional_relative_entropy(&p, &r, &cond).unwrap();
        let expect = kl(qa.weights(), ra.weights());
        assert!((got - expect).abs() < 1e-12);
    }

    #[test]
    fn entropy_upper_bound_examples() {
        let u = Marginal::<f64>::uniform(2);
        assert!((entropy_upper_bound(3, &u).unwrap() - 2.0794).abs() < 1e-4);
        assert_eq!(entropy_upper_bound(0, &u).unwrap(), 0.0);
        let q = Marginal::new(vec![0.9_f64, 0.1]).unwrap();
        assert!((entropy_upper_bound(1, &q).unwrap() - 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn csv_roundtrip() {
        let q = Marginal::<BigRational>::new(vec![BigRational::ratio(1, 3), BigRational::ratio(2, 3)]).unwrap();
        let p = bernoulli_marginal(&q, &w(2));
        let text = p.to_csv();
        assert!(text.starts_with("pattern,weight\n00,1/9\n"));
        let back = PatternDistribution::<BigRational>::from_csv(&text, w(2), 2).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(PatternDistribution::new(w(1), 2, vec![0.5, 0.6]).is_err());
        assert!(PatternDistribution::new(w(1), 2, vec![1.5, -0.5]).is_err());
        assert!(PatternDistribution::new(w(2), 2, vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn dirichlet_samples_are_distributions() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for len in 1..10 {
            let v = random_distribution(&mut rng, len);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(v.iter().all(|&x| x >= 0.0));
        }
    }
}
