//! Build the radial sextic-oscillator family for a position-dependent mass:
//! potential curve, algebraic energies, and the shape of the mass-ordering
//! contribution.
//!
//! ```text
//! cargo run --example sextic_family
//! ```

use qes_pdm::algebra::{build_spectral_table, epsilon_roots, AlgebraParams};
use qes_pdm::mapping::{radial_u_offset, FamilySpec, Grid, MappingSample};
use qes_pdm::massprofile::MassProfile;
use qes_pdm::potentials::{e_sextic, v_sextic, MassOrdering};
use std::collections::BTreeMap;

fn main() -> anyhow::Result<()> {
    let params = AlgebraParams::new(0.0, 0.0, 1.0, 2)?; // j = 1
    let ordering = MassOrdering::new(0.0, -1.0)?;
    let grid = Grid::new(1e-3, 3.0, 601)?;
    let profile = MassProfile::builtin("rational2", BTreeMap::new(), (0.0, 4.0))?;

    let offset = radial_u_offset(&profile, grid.x_min);
    let map = MappingSample::build(&params, FamilySpec::Sextic, &profile, &grid, offset)?;
    let curve = v_sextic(&params, &ordering, &profile, &map)?;

    println!("mass profile: m(x) = {}", profile.text);
    println!("energies from the three roots of the critical polynomial:");
    let spectrum = epsilon_roots(&build_spectral_table(&params)?)?;
    for (i, &eps) in spectrum.roots.iter().enumerate() {
        println!("  state {i}: eps = {eps:+.12}, E = {:+.12}", e_sextic(&params, eps));
    }

    println!("\n{:>8} {:>14} {:>14} {:>14}", "x", "u(x)", "r(x)", "V(x)");
    for i in (0..grid.n).step_by(75) {
        println!(
            "{:>8.4} {:>14.8} {:>14.8} {:>14.8}",
            map.x[i], map.u[i], map.r[i], curve.v[i]
        );
    }
    if !curve.excluded.is_empty() {
        println!("excluded (singular) indices: {:?}", curve.excluded);
    }
    Ok(())
}
