//! End-to-end acceptance criteria. Each test prints one PASS/FAIL line.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::*;
use gapdiff::levy::sample_density;
use gapdiff::montecarlo::{poisson_chi_square, simulate_excursions};
use gapdiff::spectral::spectrum_report;
use gapdiff::*;

fn report(id: u32, name: &str, ok: bool, detail: String) {
    // straight to the stderr handle: the harness does not capture it, so the
    // verdict shows up in a plain `cargo test` run
    let verdict = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr().lock(),
        "{verdict} criterion {id} ({name}): {detail}"
    );
    assert!(ok, "criterion {id} ({name}) failed: {detail}");
}

fn ensemble() -> Vec<ChainSpec> {
    let mut rng = rng(20_240_601);
    (0..200).map(|_| random_chain(&mut rng, 12)).collect()
}

/// Uniform y-grid on which completely monotone densities are checked.
fn cm_grid() -> Vec<f64> {
    uniform_grid(0.01, 0.01, 200)
}

fn check_cm(rep: &LevyRepresentation, grid: &[f64]) -> bool {
    monotonicity_profile(&sample_density(rep, grid), 4)
        .map(|r| r.passed())
        .unwrap_or(false)
}

#[test]
fn criterion_1_oracle_equivalence() {
    let chains = ensemble();
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for chain in &chains {
        let jf = jfraction_from_chain(chain);
        for &z in &Z_POINTS {
            let cf = approximant_eval(&jf, z).unwrap();
            let oracle = first_passage_transform(chain, z).unwrap();
            worst = worst.max(rel(cf, oracle));
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        "oracle equivalence",
        worst <= 1e-10 && elapsed < Duration::from_secs(1),
        format!("max rel err {worst:.2e} (tol 1e-10), {elapsed:.2?} (limit 1s)"),
    );
}

#[test]
fn criterion_2_partial_fractions() {
    let mut worst_identity = 0.0_f64;
    let mut worst_mass = 0.0_f64;
    let mut atoms_ok = true;
    for chain in &ensemble() {
        let jf = jfraction_from_chain(chain);
        let sm = spectrum(&jf).unwrap();
        for &z in &Z_POINTS {
            worst_identity = worst_identity.max(rel(
                stieltjes_eval(&sm, z),
                approximant_eval(&jf, z).unwrap(),
            ));
        }
        let xs: Vec<f64> = sm.locations().collect();
        atoms_ok &= xs.iter().all(|&x| x > 0.0)
            && xs.windows(2).all(|w| w[0] < w[1])
            && sm.weights().all(|w| w > 0.0)
            && sm.len() == chain.top();
        worst_mass = worst_mass.max((sm.density_mass() - 1.0).abs());
    }
    report(
        2,
        "partial-fraction identity",
        worst_identity <= 1e-10 && worst_mass <= 1e-10 && atoms_ok,
        format!(
            "max rel err {worst_identity:.2e}, max |Σλ/x - 1| {worst_mass:.2e} (tol 1e-10), atoms positive/distinct: {atoms_ok}"
        ),
    );
}

#[test]
fn criterion_3_three_state_exact() {
    let chain = three_state();
    let sm = spectrum(&jfraction_from_chain(&chain)).unwrap();
    let h = std::f64::consts::SQRT_2 / 2.0;
    let expected = [(1.0 - h, 0.25), (1.0 + h, 0.25)];
    let atom_err = sm
        .atoms()
        .iter()
        .zip(expected)
        .map(|(&(x, w), (ex, ew))| (x - ex).abs().max((w - ew).abs()))
        .fold(0.0, f64::max);
    let rep = LevyRepresentation::from_chain(&chain, Convention::ChainUnits).unwrap();
    let knight_err = (knight_functional(&rep) - 5.0 / 7.0).abs();
    report(
        3,
        "exact three-state case",
        sm.len() == 2 && atom_err <= 1e-12 && knight_err <= 1e-12,
        format!("atom err {atom_err:.2e}, knight err {knight_err:.2e} (tol 1e-12)"),
    );
}

#[test]
fn criterion_4_round_trip() {
    let mut rng = rng(7);
    let measures: Vec<SpectralMeasure> = (0..100).map(|_| random_measure(&mut rng, 5)).collect();
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for sm in &measures {
        let back = spectrum(&jacobi_from_atoms(sm).unwrap()).unwrap();
        assert_eq!(back.len(), sm.len());
        for (&(x, w), &(bx, bw)) in back.atoms().iter().zip(sm.atoms()) {
            worst = worst.max(rel(x, bx)).max(rel(w, bw));
        }
    }
    let elapsed = start.elapsed();
    report(
        4,
        "spectral round trip",
        worst <= 1e-8 && elapsed < Duration::from_secs(1),
        format!("max rel err {worst:.2e} (tol 1e-8), {elapsed:.2?} (limit 1s)"),
    );
}

#[test]
fn criterion_5_compound_poisson() {
    let start = Instant::now();
    let summary = simulate_excursions(&two_state(), 1.0, 10_000, 5).unwrap();
    let counts: Vec<usize> = summary
        .excursion_count_by_local_time
        .iter()
        .map(|c| c.count)
        .collect();
    let chi = poisson_chi_square(&counts, 1.0).unwrap();
    let d = &summary.excursion_durations;
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    // durations are Exp(2): standard deviation 0.5
    let sigma = 0.5 / (d.len() as f64).sqrt();
    let elapsed = start.elapsed();
    report(
        5,
        "compound Poisson excursions",
        chi.p_value > 0.01 && (mean - 0.5).abs() <= 3.0 * sigma && elapsed < Duration::from_secs(10),
        format!(
            "chi2 {:.3} on {} dof, p = {:.3} (> 0.01); duration mean {mean:.5} vs 0.5 ± {:.5}; {elapsed:.2?} (limit 10s)",
            chi.statistic,
            chi.dof,
            chi.p_value,
            3.0 * sigma
        ),
    );
}

#[test]
fn criterion_6_levy_khintchine() {
    let start = Instant::now();
    let t = 1.0;
    let mut lines = Vec::new();
    let mut ok = true;
    for (name, chain) in [("2-state", two_state()), ("3-state", three_state())] {
        for (i, &z) in [0.5, 1.0, 2.0].iter().enumerate() {
            let est = empirical_laplace(&chain, z, t, 100_000, 1000 + i as u64).unwrap();
            let a0 = chain.rate(0);
            let exact = (-t * (z + a0 * (1.0 - first_passage_transform(&chain, z).unwrap()))).exp();
            let sigmas = (est.estimate - exact).abs() / est.std_error;
            ok &= sigmas <= 3.0;
            lines.push(format!("{name} z={z}: {sigmas:.2}σ"));
        }
    }
    let elapsed = start.elapsed();
    report(
        6,
        "Levy-Khintchine via Monte Carlo",
        ok && elapsed < Duration::from_secs(60),
        format!("{} (tol 3σ); {elapsed:.2?} (limit 60s)", lines.join(", ")),
    );
}

fn brownian_experiment() -> refinement::ConvergenceReport {
    let plan = RefinementPlan::new(
        SpeedMeasureSpec::uniform(1.0, 200).unwrap(),
        vec![25, 50, 100, 200],
        None,
    )
    .unwrap();
    convergence_experiment(&plan, &log_grid(1.0, 100.0, 40), &log_grid(0.01, 0.5, 40)).unwrap()
}

#[test]
fn criterion_7_brownian_refinement() {
    let start = Instant::now();
    let report7 = brownian_experiment();
    let elapsed = start.elapsed();
    let last = report7.last();
    let gaps_decreasing = report7.gaps.windows(2).all(|w| w[1] < w[0]);
    let knights: Vec<f64> = report7.levels.iter().map(|l| l.knight).collect();
    let kmax = knights.iter().cloned().fold(f64::MIN, f64::max);
    let kmin = knights.iter().cloned().fold(f64::MAX, f64::min);
    // bounded: all finite and within a factor 1.5 of each other
    let knight_bounded = knights.iter().all(|k| k.is_finite() && *k > 0.0) && kmax / kmin <= 1.5;
    let ok = (last.psi_slope - 0.5).abs() <= 0.05
        && (last.density_slope + 1.5).abs() <= 0.1
        && gaps_decreasing
        && knight_bounded
        && elapsed < Duration::from_secs(60);
    report(
        7,
        "refinement to reflected Brownian motion",
        ok,
        format!(
            "psi slope {:.4} (0.5 ± 0.05), n slope {:.4} (-1.5 ± 0.1), gaps {:?} decreasing: {gaps_decreasing}, knight {:?} max/min {:.3} (≤ 1.5); {elapsed:.2?} (limit 60s)",
            last.psi_slope,
            last.density_slope,
            report7.gaps.iter().map(|g| format!("{g:.2e}")).collect::<Vec<_>>(),
            knights.iter().map(|k| format!("{k:.4}")).collect::<Vec<_>>(),
            kmax / kmin,
        ),
    );
}

#[test]
fn criterion_8_complete_monotonicity() {
    let grid = cm_grid();
    let mut reps = Vec::new();
    for chain in ensemble().iter().chain([two_state(), three_state()].iter()) {
        for conv in [Convention::ChainUnits, Convention::SpeedUnits] {
            reps.push(LevyRepresentation::from_chain(chain, conv).unwrap());
        }
    }
    let mut rng = rng(7);
    for _ in 0..100 {
        let sm = random_measure(&mut rng, 5);
        let jf = jacobi_from_atoms(&sm).unwrap();
        let measure = spectrum_report(&jf).unwrap().measure;
        reps.push(LevyRepresentation::new(1.0, 1.0, measure, Convention::ChainUnits).unwrap());
    }
    for level in brownian_experiment().levels {
        reps.push(level.representation);
    }
    let failures = reps.iter().filter(|r| !check_cm(r, &grid)).count();
    report(
        8,
        "complete monotonicity",
        failures == 0,
        format!(
            "{} densities checked to order 4 on y = 0.01..2.00, {failures} failures",
            reps.len()
        ),
    );
}
