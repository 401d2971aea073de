//! Print every registered tableau with its symplecticity residual,
//! stability-function value and split-weight corrections.
//!
//! Run with: cargo run --example tableau_catalogue

use vprk::tableaux::{check_symplecticity, registry, split_coefficients};

fn main() {
    println!(
        "{:<20} {:>2} {:>9} {:>12} {:>6}  d-vector",
        "name", "s", "R(inf)", "sympl.res", "split"
    );
    for t in registry() {
        let res = check_symplecticity(&t);
        let has_corrections = t.b_split.iter().any(|sc| sc.correction != 0.0);
        println!(
            "{:<20} {:>2} {:>9} {:>12.3e} {:>6}  {}",
            t.name(),
            t.stages(),
            t.r_infinity,
            res,
            if has_corrections { "yes" } else { "-" },
            t.d
                .as_ref()
                .map(|d| format!("{d:?}"))
                .unwrap_or_else(|| "-".to_string()),
        );
    }

    // splitting a coefficient given to 36 digits
    let sc = split_coefficients("0.277777777777777777777777777777777778").unwrap();
    println!(
        "\nsplit 5/18: machine {:.17e}, correction {:.3e}",
        sc.value, sc.correction
    );
}
