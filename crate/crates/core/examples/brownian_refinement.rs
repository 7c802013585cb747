//! Uniform speed measure on [0, 1]: grids of increasing size approach
//! reflected Brownian motion, whose exponent grows like z^{1/2} and whose
//! Lévy density blows up like y^{-3/2} near 0.

use gapdiff::{convergence_experiment, RefinementPlan, SpeedMeasureSpec};

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn main() -> gapdiff::Result<()> {
    let plan = RefinementPlan::new(
        SpeedMeasureSpec::uniform(1.0, 200)?,
        vec![25, 50, 100, 200],
        None,
    )?;
    let report =
        convergence_experiment(&plan, &log_grid(1.0, 100.0, 40), &log_grid(0.01, 0.5, 40))?;
    println!(
        "{:>5} {:>10} {:>10} {:>10} {:>10}",
        "N", "psi slope", "n slope", "drift", "knight"
    );
    for level in &report.levels {
        println!(
            "{:>5} {:>10.4} {:>10.4} {:>10.5} {:>10.5}",
            level.size,
            level.psi_slope,
            level.density_slope,
            level.representation.drift,
            level.knight
        );
    }
    println!("tail gaps between consecutive sizes: {:?}", report.gaps);
    println!(
        "{}",
        serde_json::to_string_pretty(&report.summary()).unwrap()
    );
    Ok(())
}
