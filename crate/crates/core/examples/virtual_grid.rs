//! Virtual array built from the sensor positions scaled by every bin.

use gridless_doa::geometry::{build_virtual_grid, ArrayGeometry};
use gridless_doa::signal::{select_bins, WidebandParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gridless_doa::Result<()> {
    let params = WidebandParams::underwater(10);
    let alphas: Vec<f64> = select_bins(&params)?.iter().map(|&f| params.alpha(f)).collect();

    let random = ArrayGeometry::random(8, params.random_aperture(8), &mut ChaCha8Rng::seed_from_u64(7))?;
    let grid = build_virtual_grid(&random, &alphas, None)?;
    println!("random array {:.3?}", random.positions());
    println!("  {} virtual positions, max {:.3}", grid.len(), grid.max_position());

    // a uniform array shares virtual positions between bins
    let ula = ArrayGeometry::uniform(8, 0.5 * params.center_wavelength())?;
    let grid = build_virtual_grid(&ula, &alphas, None)?;
    println!("uniform array: {} virtual positions out of {}", grid.len(), 8 * alphas.len());
    Ok(())
}
