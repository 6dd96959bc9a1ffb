//! The algebraic ε-spectrum computed two independent ways: roots of the
//! critical polynomial from the three-term recurrence, and eigenvalues of
//! the sl(2,ℝ) operator matrix.
//!
//! ```text
//! cargo run --example spectrum_dual_derivation
//! ```

use qes_pdm::algebra::{
    build_spectral_table, epsilon_roots, matrix_eigenvalues, sl2_operator_matrix, AlgebraParams,
};

fn main() -> anyhow::Result<()> {
    for (ell, b, q, two_j) in [
        (0.0, 0.0, 1.0, 1u32),
        (0.0, 0.0, 1.0, 2),
        (0.5, -1.0, 2.0, 4),
        (1.5, 2.0, 0.7, 6),
    ] {
        let params = AlgebraParams::new(ell, b, q, two_j)?;
        let table = build_spectral_table(&params)?;
        let roots = epsilon_roots(&table)?.roots;
        let eig = matrix_eigenvalues(&sl2_operator_matrix(&params))?;

        println!("ell = {ell}, b = {b}, q = {q}, 2j = {two_j}");
        println!("  critical polynomial P_(2j+1), ascending coefficients:");
        println!("    {:?}", table.critical());
        println!("  {:>24}  {:>24}  {:>10}", "recurrence root", "sl(2) eigenvalue", "delta");
        for (r, e) in roots.iter().zip(eig.iter()) {
            println!("  {r:>24.16}  {e:>24.16}  {:>10.2e}", (r - e).abs());
        }
        println!();
    }
    Ok(())
}
