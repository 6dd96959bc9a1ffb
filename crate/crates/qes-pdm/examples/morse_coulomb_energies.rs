//! The Morse-like and Coulomb-like families: closed-form energies and
//! state-dependent potentials (each algebraic ε labels its own potential in
//! these two families, unlike the sextic case).
//!
//! ```text
//! cargo run --example morse_coulomb_energies
//! ```

use qes_pdm::algebra::{build_spectral_table, epsilon_roots, AlgebraParams};
use qes_pdm::mapping::{FamilySpec, Grid, MappingSample};
use qes_pdm::massprofile::MassProfile;
use qes_pdm::potentials::{e_coulomb, e_morse, v_morse, MassOrdering};
use std::collections::BTreeMap;

fn main() -> anyhow::Result<()> {
    println!("closed-form energies:");
    for ell in [0.0, 1.0, 2.0] {
        let p = AlgebraParams::new(ell, 0.0, 1.0, 1)?;
        println!("  morse  ell = {ell}: E = {}", e_morse(&p));
    }
    for (ell, b, q) in [(0.0, 3.0, 1.0), (0.0, 0.0, 1.0), (1.0, 0.5, 2.0)] {
        let p = AlgebraParams::new(ell, b, q, 1)?;
        println!("  coulomb ell = {ell}, b = {b}, q = {q}: E = {}", e_coulomb(&p));
    }

    // one Morse-like potential per algebraic state
    let params = AlgebraParams::new(0.0, 1.0, 0.5, 2)?;
    let ordering = MassOrdering::new(0.0, -1.0)?;
    let grid = Grid::new(0.0, 5.0, 201)?;
    let profile = MassProfile::builtin("constant", BTreeMap::new(), (-1.0, 6.0))?;
    let map = MappingSample::build(&params, FamilySpec::Morse, &profile, &grid, 0.0)?;
    let spectrum = epsilon_roots(&build_spectral_table(&params)?)?;

    println!("\nmorse family, one potential per state (E = {}):", e_morse(&params));
    print!("{:>8}", "x");
    for (i, _) in spectrum.roots.iter().enumerate() {
        print!(" {:>14}", format!("V_state{i}(x)"));
    }
    println!();
    let curves: Vec<_> = spectrum
        .roots
        .iter()
        .map(|&eps| v_morse(&params, &ordering, &profile, &map, eps).unwrap())
        .collect();
    for i in (0..grid.n).step_by(25) {
        print!("{:>8.3}", map.x[i]);
        for c in &curves {
            print!(" {:>14.8}", c.v[i]);
        }
        println!();
    }
    Ok(())
}
