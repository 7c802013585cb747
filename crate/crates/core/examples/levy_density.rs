//! Lévy density, exponent and Knight functional of a chain's inverse local
//! time, in both local-time conventions.

use gapdiff::levy::sample_density;
use gapdiff::{
    knight_functional, laplace_exponent, levy_density, monotonicity_profile, tail_mass, ChainSpec,
    Convention, LevyRepresentation,
};

fn main() -> gapdiff::Result<()> {
    // a_0 = 2 on unit spacing gives 2 m_0 = 1/2, so the conventions differ
    let chain = ChainSpec::with_interior_probs(vec![2.0, 1.0, 1.0], &[0.5])?;
    for convention in [Convention::ChainUnits, Convention::SpeedUnits] {
        let rep = LevyRepresentation::from_chain(&chain, convention)?;
        println!(
            "[{convention}] drift b = {}, rate r0 = {}",
            rep.drift, rep.excursion_rate
        );
        println!("  knight functional = {:.15}", knight_functional(&rep));
        for y in [0.01, 0.1, 1.0, 10.0] {
            println!(
                "  n({y}) = {:.10e}   tail({y}) = {:.10e}",
                levy_density(&rep, y),
                tail_mass(&rep, y)
            );
        }
        for z in [0.1, 1.0, 10.0] {
            println!("  psi({z}) = {:.12}", laplace_exponent(&rep, z));
        }
        let grid: Vec<f64> = (1..=100).map(|i| 0.05 * i as f64).collect();
        let profile = monotonicity_profile(&sample_density(&rep, &grid), 4)?;
        println!("  completely monotone to order 4: {}", profile.passed());
    }
    println!(
        "{}",
        serde_json::to_string(&LevyRepresentation::from_chain(
            &chain,
            Convention::ChainUnits
        )?)
        .unwrap()
    );
    Ok(())
}
