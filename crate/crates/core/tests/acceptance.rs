//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::LN_2;
use std::process::ExitCode;
use std::time::Instant;

use ergo_core::decompose::{noise_inverse, noise_matrix, sdpi_verify, weak_dpi_pair};
use ergo_core::influence::{chernoff_poisson, escape_probability_bound, escape_probability_estimate};
use ergo_core::ips::{
    check_ips_local_stationary, entropy_derivative_async, entropy_derivative_exact, exact_window_marginals,
    generator_on_window, simulate_ips, torus_generator, uniformization_evolve, TorusModel,
};
use ergo_core::measures::{kl, random_distribution};
use ergo_core::pca::{
    check_pca_stationary, check_piatetski_shapiro, default_beta1, empirical_mixing_time, evolve_pca_exact,
    mixing_time_bound, theorem_constants, ConvergenceTrajectory, InitialMeasure,
};
use ergo_core::rules::{biased_xor, copy_flip, xor_noise};
use ergo_core::{Exact, Marginal, Matrix, Neighbourhood, Scalar, Site, SiteSet, TorusSpec, Window};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{DiscreteCDF, Poisson};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn r(n: i64, d: i64) -> Exact {
    Exact::ratio(n, d)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ring(n: usize) -> TorusModel<f64> {
    TorusModel::new(xor_noise(0.1).unwrap(), TorusSpec::ring(n).unwrap(), 1 << 20).unwrap()
}

fn exact_pca_stationarity() -> Outcome {
    let u = Marginal::<Exact>::uniform(2);
    let phi = xor_noise(r(1, 10)).map_err(err)?;
    let boxes = check_pca_stationary(&phi, &u, 4, 1 << 24).map_err(err)?;
    let ps = check_piatetski_shapiro(&phi, &u).map_err(err)?;
    ensure(boxes.max_deviation.is_zero() && boxes.stationary, || format!("box check deviation {}", boxes.max_deviation))?;
    ensure(ps.max_deviation.is_zero() && ps.stationary, || format!("word check deviation {}", ps.max_deviation))?;
    let eps = r(1, 5);
    let biased = check_pca_stationary(&biased_xor(eps.clone()).map_err(err)?, &u, 1, 1 << 24).map_err(err)?;
    let half = eps / r(2, 1);
    ensure(biased.max_deviation == half, || format!("biased deviation {} != {half}", biased.max_deviation))?;
    Ok(format!(
        "xor deviation 0 over {} boxes and {} words; biased eps=1/5 deviation {} at L=1",
        boxes.cylinders_checked, ps.cylinders_checked, biased.max_deviation
    ))
}

fn criterion2_trajectory() -> Result<ConvergenceTrajectory<f64>, String> {
    evolve_pca_exact(
        &xor_noise(0.1).map_err(err)?,
        &InitialMeasure::constant(0, 1),
        &Window::interval(0, 3),
        8,
        Some(&Marginal::uniform(2)),
        1 << 24,
    )
    .map_err(err)
}

fn one_step_contraction() -> Outcome {
    let traj = criterion2_trajectory()?;
    let mut worst_closed = f64::NEG_INFINITY;
    for t in 1..=8usize {
        let d = traj.records[t].d_j.ok_or("missing D_J")?;
        let prev = traj.records[t - 1].d_nj.ok_or("missing D_N(J)")?;
        let step = 0.8 * prev + 1e-9;
        let closed = 0.8f64.powi(t as i32) * (4 + t) as f64 * LN_2;
        ensure(d <= step, || format!("t={t}: D_J {d} > 0.8 D_N(J) {prev}"))?;
        ensure(d <= closed, || format!("t={t}: D_J {d} > {closed}"))?;
        worst_closed = worst_closed.max(d / closed);
    }
    Ok(format!("t=1..8, max D_J/(0.8^t (4+t) ln 2) = {worst_closed:.3e}"))
}

fn sdpi_suites() -> Outcome {
    let q = Marginal::<f64>::uniform(2);
    let theta = noise_matrix(&0.2, &q).map_err(err)?;
    let mut summary = Vec::new();
    for n in 1..=3 {
        for sync in [true, false] {
            let rep = sdpi_verify(&theta, &q, n, sync, 1000, 17).map_err(err)?;
            let bound = if sync { 0.8 } else { 1.0 - 0.2 / n as f64 };
            ensure((rep.bound - bound).abs() < 1e-12, || format!("n={n}: bound {} != {bound}", rep.bound))?;
            ensure(rep.max_ratio <= bound + 1e-9, || format!("n={n} sync={sync}: ratio {} > {bound}", rep.max_ratio))?;
            ensure(rep.rows.len() == 2usize.pow(n as u32) + 1000, || "missing point masses".into())?;
            summary.push(format!("{}{n}:{:.3}", if sync { "s" } else { "a" }, rep.max_ratio));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let sigma = rng.random_range(2..=4);
        let p = random_distribution(&mut rng, sigma);
        let rr = random_distribution(&mut rng, sigma);
        let rows: Vec<Vec<f64>> = (0..sigma).map(|_| random_distribution(&mut rng, sigma)).collect();
        let theta = Matrix::from_rows(rows).map_err(err)?;
        let (after, before) = weak_dpi_pair(&p, &rr, &theta).map_err(err)?;
        worst = worst.max(after - before);
        ensure(after <= before + 1e-9, || format!("weak DPI: {after} > {before}"))?;
    }
    Ok(format!("max ratios {}; weak DPI 1000 triples, max excess {worst:.2e}", summary.join(" ")))
}

fn theta_inverse_identity() -> Outcome {
    let qs = [Marginal::<Exact>::uniform(2), Marginal::new(vec![r(9, 10), r(1, 10)]).map_err(err)?];
    let mut count = 0;
    for kappa in [r(1, 4), r(1, 2), r(3, 4)] {
        for q in &qs {
            let prod = noise_matrix(&kappa, q).map_err(err)?.mul(&noise_inverse(&kappa, q).map_err(err)?).map_err(err)?;
            ensure(prod == Matrix::identity(2), || format!("kappa={kappa}: product is not I"))?;
            count += 1;
        }
    }
    Ok(format!("theta * theta^-1 = I exactly for {count} (kappa, q) pairs"))
}

fn ips_vs_local_stationarity() -> Outcome {
    let u = Marginal::<Exact>::uniform(2);
    let phi = copy_flip(r(1, 4)).map_err(err)?;
    // every cylinder of diameter <= 4 is a translate of one whose leftmost site is 0
    let mut windows = 0;
    for mask in 0u32..16 {
        let sites = std::iter::once(0).chain((1..=4).filter(|b| mask & (1 << (b - 1)) != 0)).map(Site::from);
        let j = Window::from_set(&SiteSet::from_sites(1, sites).map_err(err)?);
        let values = generator_on_window(&phi, &u, &j).map_err(err)?;
        if let Some(v) = values.iter().find(|v| !v.is_zero()) {
            return Err(format!("generator {v} on window of {} sites", j.len()));
        }
        windows += 1;
    }
    let local = check_ips_local_stationary(&phi, &u).map_err(err)?;
    ensure(local.max_deviation == r(1, 16), || format!("local deviation {}", local.max_deviation))?;
    let witness = local.witness.map(|w| w.to_string()).unwrap_or_default();
    Ok(format!("generator 0 on all {windows} window shapes; local deviation 1/16 at {witness}"))
}

fn entropy_derivative_identities() -> Outcome {
    let model = ring(6);
    let gen = torus_generator(&model);
    let lambda = model.product(&Marginal::uniform(2));
    let mu0 = model.initial(&InitialMeasure::constant(0, 1)).map_err(err)?;
    let whole: Vec<usize> = (0..6).collect();
    let (mut worst_rel, mut worst_alt) = (0.0f64, 0.0f64);
    for j in [whole.clone(), vec![0, 1, 2]] {
        let d_at = |s: f64| -> Result<f64, String> {
            let mu = uniformization_evolve(&gen, &mu0, s, 1e-15).map_err(err)?.0;
            Ok(kl(&model.marginal(&mu, &j), &model.marginal(&lambda, &j)))
        };
        for t in [0.5, 1.0, 2.0] {
            let h = 1e-4;
            let mu = uniformization_evolve(&gen, &mu0, t, 1e-15).map_err(err)?.0;
            let exact = entropy_derivative_exact(&mu, &lambda, &gen, &j).map_err(err)?;
            let fd = (d_at(t + h)? - d_at(t - h)?) / (2.0 * h);
            let rel = ((fd - exact) / exact).abs();
            let alt = (entropy_derivative_async(&mu, &lambda, &model, &j).map_err(err)? - exact).abs();
            ensure(rel <= 1e-6, || format!("|J|={} t={t}: fd {fd} vs {exact}", j.len()))?;
            ensure(alt <= 1e-9, || format!("|J|={} t={t}: async form off by {alt}", j.len()))?;
            worst_rel = worst_rel.max(rel);
            worst_alt = worst_alt.max(alt);
        }
    }
    Ok(format!("max FD relative error {worst_rel:.2e}, max async-form gap {worst_alt:.2e}"))
}

fn whole_torus_decay() -> Outcome {
    let model = ring(6);
    let gen = torus_generator(&model);
    let lambda = model.product(&Marginal::uniform(2));
    let mu0 = model.initial(&InitialMeasure::constant(0, 1)).map_err(err)?;
    let d_at = |t: f64| -> Result<f64, String> {
        Ok(kl(&uniformization_evolve(&gen, &mu0, t, 1e-14).map_err(err)?.0, &lambda))
    };
    let d0 = d_at(0.01)?;
    let mut cols = Vec::new();
    for t in [0.5, 1.0, 2.0, 4.0] {
        let d = d_at(t)?;
        let bound = d0 * (-0.2 * (t - 0.01)).exp() + 1e-9;
        ensure(d <= bound, || format!("t={t}: D {d} > {bound}"))?;
        cols.push(format!("t={t}: {:.3}", d / bound));
    }
    Ok(format!("D(0.01) = {d0:.4}; D/bound {}", cols.join(", ")))
}

fn influence_concentration() -> Outcome {
    let n = Neighbourhood::line(&[-1, 0, 1]).map_err(err)?;
    let a = SiteSet::interval(0, 0);
    let mut max_excess = f64::NEG_INFINITY;
    for t in [0.5, 1.0, 2.0] {
        for ell in [6.0, 12.0, 24.0] {
            let bound = escape_probability_bound(1, 3, ell, t).map_err(err)?;
            let est = escape_probability_estimate(&n, &a, t, ell, 10_000, 2024).map_err(err)?;
            let limit = bound + 3.0 * est.std_err;
            ensure(est.p_hat <= limit, || format!("t={t} ell={ell}: p_hat {} > {limit}", est.p_hat))?;
            max_excess = max_excess.max(est.p_hat - bound);
        }
    }
    let mut pairs = 0;
    for mu in [0.3, 1.0, 2.5, 7.0, 20.0] {
        for k in 1..=10 {
            let a = mu * (1.0 + 0.35 * k as f64);
            let oracle = Poisson::new(mu).map_err(err)?.sf(a.ceil() as u64 - 1);
            let c = chernoff_poisson(mu, a).map_err(err)?;
            ensure(c >= oracle * (1.0 - 1e-12), || format!("mu={mu} a={a}: {c} < {oracle}"))?;
            pairs += 1;
        }
    }
    Ok(format!("9 cells, max p_hat - bound {max_excess:.3e}; Chernoff dominates {pairs} Poisson tails"))
}

fn monte_carlo_vs_exact() -> Outcome {
    let model = ring(10);
    let init = InitialMeasure::constant(0, 1);
    let window: Vec<Site> = (0..4).map(Site::from).collect();
    let times = [1.0, 2.0, 4.0];
    let sim = simulate_ips(&model, &init, &times, 20_000, 31, &window).map_err(err)?;
    let exact = exact_window_marginals(&model, &init, &times, &window, 1e-13).map_err(err)?;
    let mut worst = 0.0f64;
    for (c, truth) in exact.iter().enumerate() {
        for ((p, se), x) in sim.empirical(c).iter().zip(sim.std_err(c)).zip(truth) {
            let z = if se > 0.0 { (p - x).abs() / se } else if (p - x).abs() < 1e-4 { 0.0 } else { f64::INFINITY };
            worst = worst.max(z);
        }
    }
    ensure(worst <= 3.0, || format!("max |p_hat - p| / SE = {worst:.2}"))?;
    let again = simulate_ips(&model, &init, &times, 20_000, 31, &window).map_err(err)?;
    ensure(again.to_csv(Some(&exact)) == sim.to_csv(Some(&exact)), || "rerun differs".into())?;
    Ok(format!("48 cells, max |p_hat - p| / SE = {worst:.2}; rerun byte-identical"))
}

fn mixing_bound() -> Outcome {
    let v = mixing_time_bound(2.0, 0.1, 1, 10, 0.01);
    ensure((v - 64.496).abs() <= 1e-3, || format!("mixing_time_bound = {v}"))?;
    let traj = criterion2_trajectory()?;
    let phi = xor_noise(0.1).map_err(err)?;
    let u = Marginal::uniform(2);
    let c = theorem_constants(&phi, &u, default_beta1(0.2)).map_err(err)?;
    let eps = 0.01;
    let predicted = mixing_time_bound(c.alpha, c.beta, c.dim, 4, eps);
    let empirical = empirical_mixing_time(&traj, eps).ok_or("trajectory never settles below eps")?;
    ensure(empirical as f64 <= predicted, || format!("empirical {empirical} > predicted {predicted}"))?;
    Ok(format!(
        "bound(2,0.1,1,10,0.01) = {v:.4}; eps={eps}: empirical {empirical} <= predicted {predicted:.2} (alpha {:.3}, beta {:.4})",
        c.alpha, c.beta
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("exact PCA stationarity", exact_pca_stationarity),
        ("one-step entropy contraction", one_step_contraction),
        ("SDPI suites", sdpi_suites),
        ("theta-inverse identity", theta_inverse_identity),
        ("IPS vs local stationarity", ips_vs_local_stationarity),
        ("entropy-derivative identities", entropy_derivative_identities),
        ("whole-torus exponential decay", whole_torus_decay),
        ("influence concentration", influence_concentration),
        ("Monte Carlo vs exact", monte_carlo_vs_exact),
        ("mixing-bound formula", mixing_bound),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
