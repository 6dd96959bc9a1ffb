//! The mass-profile expression language: parsing, exact symbolic
//! derivatives, the positivity guard, and error reporting with byte offsets.
//!
//! ```text
//! cargo run --example mass_expressions
//! ```

use qes_pdm::massprofile::{differentiate, parse_mass, MassProfile};
use std::collections::BTreeMap;

fn main() {
    let mut params = BTreeMap::new();
    params.insert("a".to_string(), 2.0);

    let text = "((a + x^2)/(1 + x^2))^2";
    let expr = parse_mass(text, &params).unwrap();
    let d1 = differentiate(&expr);
    let d2 = differentiate(&d1);
    println!("m(x)   = {expr}");
    println!("m'(x)  = {d1}");
    println!("m''(x) = {d2}");

    println!("\n{:>6} {:>14} {:>14} {:>14} {:>12}", "x", "m", "m'", "m''", "fd check");
    for k in 0..6 {
        let x = 0.4 * k as f64;
        let h = 1e-5;
        let fd = (expr.eval(x + h, &params) - expr.eval(x - h, &params)) / (2.0 * h);
        let sym = d1.eval(x, &params);
        println!(
            "{x:>6.2} {:>14.8} {sym:>14.8} {:>14.8} {:>12.2e}",
            expr.eval(x, &params),
            d2.eval(x, &params),
            (sym - fd).abs()
        );
    }

    // profiles validate positivity on construction
    println!("\nconstruction guards:");
    match MassProfile::new("x^2 - 1", BTreeMap::new(), (-2.0, 2.0)) {
        Err(err) => println!("  m = x^2 - 1 on (-2, 2): {err}"),
        Ok(_) => unreachable!(),
    }
    match parse_mass("1 + unknown_name", &params) {
        Err(err) => println!("  `1 + unknown_name`: {err}"),
        Ok(_) => unreachable!(),
    }
    match parse_mass("1 + ", &params) {
        Err(err) => println!("  `1 + `: {err}"),
        Ok(_) => unreachable!(),
    }
}
