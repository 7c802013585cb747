//! Chains from speed measures: discrete atoms, and densities discretized
//! on a grid.

use gapdiff::chain::speed_measure_from_json;
use gapdiff::{chain_from_speed_measure, first_passage_transform};

fn main() -> gapdiff::Result<()> {
    let atoms =
        speed_measure_from_json(r#"{"atoms": [[0, 0.5], [1, 1.0], [3, 0.25]], "endpoint": 3}"#)?;
    let chain = chain_from_speed_measure(&atoms, &[0.0, 1.0, 3.0])?;
    println!(
        "atoms -> rates {:?}, right probs {:?}",
        chain.rates(),
        chain.right_probs()
    );

    let linear = speed_measure_from_json(
        r#"{"density": "linear", "coefficients": [1.0, 2.0], "endpoint": 1, "grid_n": 4}"#,
    )?;
    let grid: Vec<f64> = (0..=4).map(|i| i as f64 / 4.0).collect();
    let chain = chain_from_speed_measure(&linear, &grid)?;
    println!("density 1 + 2x -> masses {:?}", chain.speed_masses());
    println!("  rates {:?}", chain.rates());
    println!("  T(1) = {:.12}", first_passage_transform(&chain, 1.0)?);

    let inextensible =
        speed_measure_from_json(r#"{"atoms": [[0, 1.0]], "endpoint": 2, "inextensible": true}"#)?;
    println!(
        "inextensible endpoint atom kept symbolic: {:?}; building a chain fails: {}",
        inextensible.implied_endpoint_atom(),
        chain_from_speed_measure(&inextensible, &[0.0, 2.0]).unwrap_err()
    );
    Ok(())
}
