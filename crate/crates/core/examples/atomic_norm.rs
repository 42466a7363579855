//! Atomic norm of a single wideband atom, computed through the SDP.

use gridless_doa::anm::atomic_norm_upper_check;
use gridless_doa::conic::SolverConfig;
use gridless_doa::geometry::{build_virtual_grid, ArrayGeometry};
use gridless_doa::pswf::compute_basis;
use num_complex::Complex64;
use std::f64::consts::PI;

fn main() -> gridless_doa::Result<()> {
    let geometry = ArrayGeometry::new(vec![0.0, 0.6, 1.7, 2.5, 3.9])?;
    let grid = build_virtual_grid(&geometry, &[0.9, 1.0, 1.1], None)?;
    let basis = compute_basis(PI * grid.max_position(), 1e-4)?;
    let s = 1.0 / 3f64.sqrt();
    let c = [Complex64::new(s, 0.0), Complex64::new(0.0, s), Complex64::new(-s, 0.0)];
    let cfg = SolverConfig::default().with_tolerance(1e-7);
    for beta in [0.5, 1.0, 2.0] {
        let norm = atomic_norm_upper_check(0.18, beta, &c, &grid, &basis, &cfg)?;
        println!("beta = {beta}: ||beta a c^T||_A = {norm:.6}");
    }
    Ok(())
}
