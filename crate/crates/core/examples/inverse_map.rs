//! From atoms back to a continued fraction, and forward again.

use gapdiff::{jacobi_from_atoms, spectrum, SpectralMeasure};

fn main() -> gapdiff::Result<()> {
    let sm = SpectralMeasure::new(vec![
        (0.2, 0.1),
        (0.9, 0.4),
        (2.5, 1.0),
        (6.0, 0.3),
        (11.0, 2.0),
    ])?;
    let jf = jacobi_from_atoms(&sm)?;
    println!("k = {:?}", jf.numerators());
    println!("l = {:?}", jf.denominators());
    let back = spectrum(&jf)?;
    for (&(x, w), &(bx, bw)) in sm.atoms().iter().zip(back.atoms()) {
        println!("x {x:>5} -> {bx:.15}   lambda {w:>4} -> {bw:.15}");
    }
    Ok(())
}
