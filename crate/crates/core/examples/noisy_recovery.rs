//! Three sources at a chosen SNR, with the noise bound set from the noise level.
//!
//! ```text
//! cargo run --release --example noisy_recovery -- 10
//! ```

use gridless_doa::conic::SolverConfig;
use gridless_doa::geometry::ArrayGeometry;
use gridless_doa::recovery::{srw_doa, SrwConfig};
use gridless_doa::signal::{apply_noise, synthesize, SourceScene, WidebandParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gridless_doa::Result<()> {
    let snr_db: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let params = WidebandParams::underwater(10);
    let geometry = ArrayGeometry::random(8, params.random_aperture(8), &mut ChaCha8Rng::seed_from_u64(3))?;
    let scene = SourceScene::new(vec![-5.0, 15.0, 40.0])?;
    let clean = synthesize(&geometry, &scene, &params, 4)?;
    // the returned level is the expected Frobenius norm of the added noise
    let (noisy, sigma) = apply_noise(&clean, snr_db, 5);

    let cfg = SrwConfig { solver: SolverConfig::default().with_tolerance(1e-5), ..SrwConfig::default() };
    let r = srw_doa(&geometry, &noisy, scene.len(), sigma, &cfg)?;
    println!("SNR {snr_db} dB, noise bound {sigma:.3}");
    println!("{:?} in {} iterations, {:.1} s", r.solution.status, r.solution.iterations, r.solution.solve_seconds);
    println!("estimated DOAs {:.3?} deg (truth {:?})", r.estimate.thetas_deg, scene.thetas_deg());
    if r.warnings() {
        println!("warning: rank ratio {:.2e}, aliased {}", r.extraction.rank_ratio, r.aliased);
    }
    Ok(())
}
