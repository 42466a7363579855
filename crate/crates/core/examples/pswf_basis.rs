//! PSWF eigenvalue decay and truncation order for a few bandwidths.
//!
//! ```text
//! cargo run --release --example pswf_basis -- 29
//! ```

use gridless_doa::pswf::{compute_basis, DEFAULT_EPSILON};
use std::f64::consts::PI;

fn main() -> gridless_doa::Result<()> {
    let cs: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let cs = if cs.is_empty() { vec![1.0, 10.0, 29.0] } else { cs };
    for c in cs {
        let basis = compute_basis(c, DEFAULT_EPSILON)?;
        println!("c = {c}: d = {}, 2c/pi = {:.2}, cond(Phi) = {:.2e}", basis.d(), 2.0 * c / PI, basis.phi_condition());
        for (l, lam) in basis.all_eigenvalues().iter().enumerate().step_by(2) {
            println!("  l = {l:>3}  |lambda| = {:.3e}", lam.norm());
        }
    }
    Ok(())
}
