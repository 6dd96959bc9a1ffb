//! Assemble the algebraic bound states ψ(x) for a j = 1 sextic family,
//! count their nodes, and check normalizability on the grid.
//!
//! ```text
//! cargo run --example wavefunctions_and_nodes
//! ```

use qes_pdm::algebra::{build_spectral_table, epsilon_roots, AlgebraParams};
use qes_pdm::mapping::{
    assemble_psi, check_normalizable, radial_u_offset, FamilySpec, Grid, MappingSample,
};
use qes_pdm::massprofile::MassProfile;
use std::collections::BTreeMap;

fn main() -> anyhow::Result<()> {
    let params = AlgebraParams::new(0.0, 0.0, 1.0, 2)?;
    let grid = Grid::new(1e-3, 4.0, 1201)?;
    let profile = MassProfile::builtin("constant", BTreeMap::new(), (0.0, 5.0))?;
    let offset = radial_u_offset(&profile, grid.x_min);
    let map = MappingSample::build(&params, FamilySpec::Sextic, &profile, &grid, offset)?;

    let spectrum = epsilon_roots(&build_spectral_table(&params)?)?;
    println!(
        "{:>6} {:>16} {:>8} {:>14} {:>14}",
        "state", "epsilon", "nodes", "tail ratio", "norm"
    );
    for (i, &eps) in spectrum.roots.iter().enumerate() {
        let psi = assemble_psi(&params, eps, &profile, &map)?;
        let rep = check_normalizable(&psi.normalized, &grid);
        println!(
            "{:>6} {:>16.10} {:>8} {:>14.3e} {:>14.6e}  {}",
            i,
            eps,
            psi.node_count,
            rep.tail_ratio,
            psi.norm,
            if rep.normalizable { "normalizable" } else { "NOT normalizable" }
        );
    }

    println!("\nground-state samples (x, psi_normalized):");
    let psi = assemble_psi(&params, spectrum.roots[0], &profile, &map)?;
    for i in (0..grid.n).step_by(150) {
        println!("  {:>8.4}  {:>14.8e}", map.x[i], psi.normalized[i]);
    }
    Ok(())
}
