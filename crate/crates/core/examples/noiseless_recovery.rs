//! Two wideband sources on a random 8-sensor array, recovered without noise.

use gridless_doa::conic::SolverConfig;
use gridless_doa::geometry::ArrayGeometry;
use gridless_doa::recovery::{srw_doa, SrwConfig};
use gridless_doa::signal::{synthesize, SourceScene, WidebandParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gridless_doa::Result<()> {
    let params = WidebandParams::underwater(4);
    let geometry = ArrayGeometry::random(8, params.random_aperture(8), &mut ChaCha8Rng::seed_from_u64(1))?;
    let scene = SourceScene::new(vec![-5.0, 40.0])?;
    let snapshot = synthesize(&geometry, &scene, &params, 1)?;

    let cfg = SrwConfig { solver: SolverConfig::default().with_tolerance(1e-6), ..SrwConfig::default() };
    let r = srw_doa(&geometry, &snapshot, 2, 0.0, &cfg)?;
    println!("virtual grid {} positions, PSWF order d = {}", r.m_tilde, r.d);
    println!(
        "{:?} in {} iterations, {:.2} s",
        r.solution.status, r.solution.iterations, r.solution.solve_seconds
    );
    println!("estimated DOAs {:.5?} deg (truth {:?})", r.estimate.thetas_deg, scene.thetas_deg());
    println!("powers {:.4?}", r.estimate.powers);
    let top: Vec<String> = r.extraction.eigenvalues.iter().take(4).map(|e| format!("{e:.3e}")).collect();
    println!("Toeplitz eigenvalues {}", top.join(", "));
    Ok(())
}
