//! Poles and weights of the excursion-length density, with the
//! diagnostics gathered along the way.

use gapdiff::spectral::spectrum_report;
use gapdiff::{approximant_eval, jfraction_from_chain, step_function, stieltjes_eval, ChainSpec};

fn main() -> gapdiff::Result<()> {
    // a stiff chain: rates spanning two decades, strongly biased steps
    let chain = ChainSpec::with_interior_probs(
        vec![1.0, 0.1, 8.0, 0.3, 5.0, 0.2],
        &[0.06, 0.9, 0.1, 0.93],
    )?;
    let jf = jfraction_from_chain(&chain);
    let report = spectrum_report(&jf)?;
    let sm = &report.measure;

    println!("{:>24} {:>24} {:>12}", "x_k", "lambda_k", "residue err");
    for ((&(x, w), r), bound) in sm
        .atoms()
        .iter()
        .zip(&report.residue_weights)
        .zip(&report.residue_error_bounds)
    {
        println!(
            "{x:>24.16e} {w:>24.16e} {:>12.1e}  (bound {bound:.1e})",
            (r - w).abs() / w
        );
    }
    println!("sum lambda/x - 1 = {:.2e}", sm.density_mass() - 1.0);
    println!("mean excursion length = {:.12}", sm.density_moment(1));
    println!("min relative pole gap = {:.3e}", report.min_relative_gap);
    println!("weights consistent: {}", report.weights_consistent());

    for z in [0.5, 2.0] {
        println!(
            "z = {z}: partial fractions {:.16}, continued fraction {:.16}",
            stieltjes_eval(sm, z),
            approximant_eval(&jf, z)?
        );
    }
    println!("Phi(1) = {:.6}", step_function(sm, 1.0));
    Ok(())
}
