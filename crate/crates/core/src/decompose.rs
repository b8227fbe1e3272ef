//! Noise decomposition `phi = kappa q + (1 - kappa) psi`, the memoryless
//! noise matrix `theta = (1 - kappa) I + kappa Q` and its inverse, product
//! kernels, and brute-force certification of the data-processing inequalities.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;
use crate::measures::{decode, kl, random_distribution, state_count, PatternDistribution, Window};
use crate::rules::{LocalRule, Marginal};
use crate::scalar::Scalar;

fn require_positive_q<T: Scalar>(q: &Marginal<T>) -> Result<()> {
    if !q.is_strictly_positive() {
        return Err(invalid("replacement distribution q must be strictly positive"));
    }
    Ok(())
}

/// `kappa = min_{w,b} phi(w,b) / q(b)`.
pub fn max_noise_level<T: Scalar>(phi: &LocalRule<T>, q: &Marginal<T>) -> Result<T> {
    require_positive_q(q)?;
    if q.sigma() != phi.sigma() {
        return Err(invalid("q and rule disagree on alphabet size"));
    }
    let mut kappa: Option<T> = None;
    for i in 0..phi.row_count() {
        for (b, x) in phi.row(i).iter().enumerate() {
            let ratio = x.clone() / q.weights()[b].clone();
            if kappa.as_ref().is_none_or(|k| ratio < *k) {
                kappa = Some(ratio);
            }
        }
    }
    let kappa = kappa.expect("non-empty table");
    // min_w phi(w,b)/q(b) <= 1 for some b since rows and q both sum to one
    Ok(if kappa > T::one() { T::one() } else { kappa })
}

/// Same minimum for a square single-site kernel.
pub fn kernel_noise_level<T: Scalar>(theta: &Matrix<T>, q: &Marginal<T>) -> Result<T> {
    require_positive_q(q)?;
    if theta.rows() != q.sigma() || theta.cols() != q.sigma() {
        return Err(invalid("theta and q disagree on alphabet size"));
    }
    let mut kappa = T::one();
    for a in 0..theta.rows() {
        for b in 0..theta.cols() {
            let ratio = theta.get(a, b).clone() / q.weights()[b].clone();
            if ratio < kappa {
                kappa = ratio;
            }
        }
    }
    Ok(kappa)
}

/// `theta(a,b) = (1 - kappa) 1[a = b] + kappa q(b)`.
pub fn noise_matrix<T: Scalar>(kappa: &T, q: &Marginal<T>) -> Result<Matrix<T>> {
    if *kappa < T::zero() || *kappa > T::one() {
        return Err(invalid(format!("kappa = {kappa} outside [0,1]")));
    }
    let keep = T::one() - kappa.clone();
    Ok(Matrix::from_fn(q.sigma(), q.sigma(), |a, b| {
        let base = kappa.clone() * q.weights()[b].clone();
        if a == b {
            base + keep.clone()
        } else {
            base
        }
    }))
}

/// `theta^{-1} = I / (1 - kappa) - kappa Q / (1 - kappa)`.
pub fn noise_inverse<T: Scalar>(kappa: &T, q: &Marginal<T>) -> Result<Matrix<T>> {
    if *kappa < T::zero() || *kappa >= T::one() {
        return Err(invalid(format!("noise matrix is singular or undefined for kappa = {kappa}")));
    }
    let scale = T::one() / (T::one() - kappa.clone());
    Ok(Matrix::from_fn(q.sigma(), q.sigma(), |a, b| {
        let off = -(kappa.clone() * q.weights()[b].clone() * scale.clone());
        if a == b {
            off + scale.clone()
        } else {
            off
        }
    }))
}

/// The pair `(psi, theta)` with `phi = psi` followed by memoryless noise.
#[derive(Clone, Debug)]
pub struct NoiseDecomposition<T: Scalar> {
    pub kappa: T,
    pub q: Marginal<T>,
    pub psi: LocalRule<T>,
    pub theta: Matrix<T>,
}

impl<T: Scalar> NoiseDecomposition<T> {
    /// Largest `|kappa q(b) + (1-kappa) psi(w,b) - phi(w,b)|` over the table.
    pub fn max_residual(&self, phi: &LocalRule<T>) -> T {
        let keep = T::one() - self.kappa.clone();
        let mut worst = T::zero();
        for i in 0..phi.row_count() {
            for b in 0..phi.sigma() {
                let rebuilt = self.kappa.clone() * self.q.weights()[b].clone()
                    + keep.clone() * self.psi.row(i)[b].clone();
                let diff = (rebuilt - phi.row(i)[b].clone()).abs();
                if diff > worst {
                    worst = diff;
                }
            }
        }
        worst
    }
}

pub fn decompose<T: Scalar>(phi: &LocalRule<T>, q: &Marginal<T>, kappa: &T) -> Result<NoiseDecomposition<T>> {
    let max = max_noise_level(phi, q)?;
    if *kappa <= T::zero() {
        return Err(invalid("kappa must be positive"));
    }
    if *kappa >= T::one() {
        return Err(invalid("kappa = 1: the rule is pure q-resampling and has no psi component"));
    }
    if *kappa > max.clone() + T::tolerance() {
        return Err(invalid(format!("kappa = {kappa} exceeds the maximal noise level {max}")));
    }
    let keep = T::one() - kappa.clone();
    let rows = phi
        .rows()
        .into_iter()
        .map(|row| {
            row.into_iter()
                .enumerate()
                .map(|(b, x)| {
                    let v = (x - kappa.clone() * q.weights()[b].clone()) / keep.clone();
                    // float round-off at the minimizing entry
                    if v < T::zero() && v.is_negligible() {
                        T::zero()
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let psi = LocalRule::new(phi.sigma(), phi.neighbourhood().clone(), rows)?;
    Ok(NoiseDecomposition { kappa: kappa.clone(), q: q.clone(), psi, theta: noise_matrix(kappa, q)? })
}

/// Applies `theta` to the coordinate at `pos` of a weight vector over `Sigma^n`.
fn apply_on_axis<T: Scalar>(weights: &[T], n: usize, sigma: usize, pos: usize, theta: &Matrix<T>) -> Vec<T> {
    let stride = sigma.pow((n - 1 - pos) as u32);
    let mut out = vec![T::zero(); weights.len()];
    for (i, w) in weights.iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        let a = (i / stride) % sigma;
        let base = i - a * stride;
        for b in 0..sigma {
            let t = theta.get(a, b);
            if !t.is_zero() {
                out[base + b * stride] = out[base + b * stride].clone() + w.clone() * t.clone();
            }
        }
    }
    out
}

/// `theta` applied independently to each of `n` coordinates (`theta_n`).
/// Works for any square matrix, including `theta^{-1}`.
pub fn apply_tensor<T: Scalar>(theta: &Matrix<T>, weights: &[T], n: usize) -> Vec<T> {
    let sigma = theta.rows();
    let mut cur = weights.to_vec();
    for pos in 0..n {
        cur = apply_on_axis(&cur, n, sigma, pos, theta);
    }
    cur
}

/// `theta_n` (synchronous) or `hat theta_n` (one uniformly chosen coordinate) applied to `p`.
pub fn product_kernel_apply<T: Scalar>(
    theta: &Matrix<T>,
    synchronous: bool,
    p: &PatternDistribution<T>,
) -> Result<PatternDistribution<T>> {
    let sigma = p.sigma();
    if theta.rows() != sigma || theta.cols() != sigma {
        return Err(invalid("theta size does not match the alphabet"));
    }
    let n = p.window().len();
    let weights = if synchronous {
        apply_tensor(theta, p.weights(), n)
    } else {
        let mut acc = vec![T::zero(); p.weights().len()];
        for pos in 0..n {
            for (a, v) in acc.iter_mut().zip(apply_on_axis(p.weights(), n, sigma, pos, theta)) {
                *a = a.clone() + v;
            }
        }
        let nn = T::from_usize_lossless(n.max(1));
        acc.into_iter().map(|x| x / nn.clone()).collect()
    };
    Ok(PatternDistribution::from_raw(p.window().clone(), sigma, weights))
}

/// One sampled (or point-mass) input of an SDPI check.
#[derive(Clone, Debug)]
pub struct SdpiRow {
    /// Trial index, or `pm:<pattern>` for point masses.
    pub trial: String,
    pub d_before: f64,
    pub d_after: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug)]
pub struct SdpiReport {
    pub rows: Vec<SdpiRow>,
    pub kappa: f64,
    pub bound: f64,
    pub max_ratio: f64,
    pub pass: bool,
}

impl SdpiReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("trial,D_before,D_after,ratio\n");
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{},{}", r.trial, r.d_before, r.d_after, r.ratio);
        }
        let _ = writeln!(
            out,
            "# summary: kappa={} bound={} max_ratio={} pass={}",
            self.kappa, self.bound, self.max_ratio, self.pass
        );
        out
    }
}

pub const SDPI_SLACK: f64 = 1e-9;

/// Checks `D(p theta_n || q^n) <= c D(p || q^n)` with `c = 1 - kappa`
/// (synchronous) or `1 - kappa/n` (asynchronous) on every point mass plus
/// `trials` flat-Dirichlet samples. Trial `i` draws from its own stream of
/// `seed`, so the report does not depend on thread count.
pub fn sdpi_verify(
    theta: &Matrix<f64>,
    q: &Marginal<f64>,
    n: usize,
    synchronous: bool,
    trials: usize,
    seed: u64,
) -> Result<SdpiReport> {
    if n == 0 {
        return Err(invalid("arity must be at least 1"));
    }
    let sigma = q.sigma();
    let moved = theta.left_apply(q.weights());
    if moved.iter().zip(q.weights()).any(|(a, b)| (a - b).abs() > 1e-12) {
        return Err(invalid("q is not stationary for theta"));
    }
    let kappa = kernel_noise_level(theta, q)?;
    let bound = if synchronous { 1.0 - kappa } else { 1.0 - kappa / n as f64 };
    let window = Window::interval(0, n as i64 - 1);
    let reference = crate::measures::bernoulli_marginal(q, &window);
    let size = state_count(sigma, n)?;

    let evaluate = |trial: String, weights: Vec<f64>| -> SdpiRow {
        let p = PatternDistribution::from_raw(window.clone(), sigma, weights);
        let after = product_kernel_apply(theta, synchronous, &p).expect("shapes checked");
        let d_before = kl(p.weights(), reference.weights());
        let d_after = kl(after.weights(), reference.weights());
        let ratio = if d_before > 0.0 { d_after / d_before } else { 0.0 };
        SdpiRow { trial, d_before, d_after, ratio }
    };

    let mut rows: Vec<SdpiRow> = (0..size)
        .into_par_iter()
        .map(|i| {
            let mut w = vec![0.0; size];
            w[i] = 1.0;
            let label: String = decode(i, n, sigma).iter().map(|s| s.to_string()).collect();
            evaluate(format!("pm:{label}"), w)
        })
        .collect();
    let sampled: Vec<SdpiRow> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            evaluate(t.to_string(), random_distribution(&mut rng, size))
        })
        .collect();
    rows.extend(sampled);
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(SdpiReport { rows, kappa, bound, max_ratio, pass: max_ratio <= bound + SDPI_SLACK })
}

/// `(D(p theta || r theta), D(p || r))` for a single-site kernel.
pub fn weak_dpi_pair(p: &[f64], r: &[f64], theta: &Matrix<f64>) -> Result<(f64, f64)> {
    if p.len() != theta.rows() || r.len() != theta.rows() {
        return Err(Error::WindowMismatch("distribution length differs from kernel size".into()));
    }
    Ok((kl(&theta.left_apply(p), &theta.left_apply(r)), kl(p, r)))
}
