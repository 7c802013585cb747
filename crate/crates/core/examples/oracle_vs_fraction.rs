//! The excursion-length transform two ways: the continued fraction built
//! from the chain's rates, and a direct tridiagonal solve.

use gapdiff::{
    approximant_eval, first_passage_transform, jfraction_from_chain, polynomial_pair, ChainSpec,
};

fn main() -> gapdiff::Result<()> {
    let chain = ChainSpec::with_interior_probs(vec![1.0, 2.0, 0.5, 3.0, 1.5], &[0.3, 0.6, 0.45])?;
    let jf = jfraction_from_chain(&chain);
    println!("k = {:?}", jf.numerators());
    println!("l = {:?}", jf.denominators());

    let pair = polynomial_pair(&jf);
    println!("K_N coefficients (ascending) = {:?}", pair.numerator);
    println!("L_N coefficients (ascending) = {:?}", pair.denominator);

    println!(
        "{:>6} {:>22} {:>22} {:>10}",
        "z", "fraction", "resolvent", "rel err"
    );
    for z in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0] {
        let cf = approximant_eval(&jf, z)?;
        let oracle = first_passage_transform(&chain, z)?;
        println!(
            "{z:>6} {cf:>22.16} {oracle:>22.16} {:>10.1e}",
            (cf - oracle).abs() / oracle
        );
    }
    Ok(())
}
