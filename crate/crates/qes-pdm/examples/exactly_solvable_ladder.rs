//! The q = 0 reduction: the algebraic sector degenerates to an infinite
//! exactly-solvable ladder ε_n = n·b. With a constant mass and the sextic
//! mapping this is the radial harmonic oscillator, E_n = b(2n + ℓ + 3/2);
//! a varying mass deforms the potential while keeping the spectrum.
//!
//! ```text
//! cargo run --example exactly_solvable_ladder
//! ```

use qes_pdm::cli::{run_verify, Command, PartialConfig, ResolvedConfig};

fn main() -> anyhow::Result<()> {
    for mass in ["constant", "((2 + x^2)/(1 + x^2))^2"] {
        let flags = PartialConfig {
            q: Some(0.0),
            b: Some(1.0),
            ell: Some(0.0),
            mass: Some(mass.to_string()),
            num_states: Some(4),
            ..Default::default()
        };
        let cfg = ResolvedConfig::resolve(flags, None, Command::Verify)?;
        let report = run_verify(&cfg)?;
        println!("mass = {mass}");
        println!(
            "{:>4} {:>10} {:>14} {:>7} {:>14} {:>12}",
            "n", "eps=n*b", "E = b(2n+3/2)", "nodes", "oracle E", "|dE|"
        );
        for s in &report.states {
            let (oracle_e, de) = s
                .matched
                .as_ref()
                .map(|m| (format!("{:.8}", m.oracle_energy), format!("{:.2e}", m.delta_e)))
                .unwrap_or(("—".into(), "unmatched".into()));
            println!(
                "{:>4} {:>10.4} {:>14.8} {:>7} {:>14} {:>12}",
                s.index, s.epsilon, s.energy_algebraic, s.node_count, oracle_e, de
            );
        }
        println!("verification {}\n", if report.pass { "PASSED" } else { "FAILED" });
    }
    Ok(())
}
