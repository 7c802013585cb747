//! Two states: excursions from 0 form a compound Poisson process in local
//! time. Counts are Poisson(a_0 t) and lengths Exp(a_1).

use gapdiff::montecarlo::{
    ks_distance, mean_and_std_error, poisson_chi_square, simulate_excursions,
};
use gapdiff::ChainSpec;

fn main() -> gapdiff::Result<()> {
    let chain = ChainSpec::new(vec![0.0, 1.0], vec![1.0, 2.0], vec![1.0, 0.0])?;
    let summary = simulate_excursions(&chain, 1.0, 10_000, 42)?;
    let counts: Vec<usize> = summary
        .excursion_count_by_local_time
        .iter()
        .map(|c| c.count)
        .collect();
    let chi = poisson_chi_square(&counts, 1.0)?;
    println!(
        "count chi-square: {:.3} on {} dof, p = {:.3}",
        chi.statistic, chi.dof, chi.p_value
    );
    for (k, observed, expected) in &chi.bins {
        println!("  k = {k}: observed {observed}, expected {expected:.1}");
    }
    let d = &summary.excursion_durations;
    let est = mean_and_std_error(d);
    println!(
        "mean duration {:.5} ± {:.5} (exact 0.5)",
        est.estimate, est.std_error
    );
    println!(
        "KS distance to Exp(2): {:.4}",
        ks_distance(d, |x| 1.0 - (-2.0 * x).exp())
    );
    Ok(())
}
