//! ISSM and RSS on the time record of a three-source scene.

use gridless_doa::baselines::{issm_music, issm_spectrum, rss_estimate, SegmentConfig};
use gridless_doa::geometry::ArrayGeometry;
use gridless_doa::signal::{noise_std, synthesize_spectrum, SourceScene, WidebandParams};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> gridless_doa::Result<()> {
    let params = WidebandParams::underwater(10);
    let geometry = ArrayGeometry::random(8, params.random_aperture(8), &mut ChaCha8Rng::seed_from_u64(2))?;
    let truth = vec![-5.0, 15.0, 40.0];
    let spectrum = synthesize_spectrum(&geometry, &SourceScene::new(truth.clone())?, &params, 3)?;
    let sigma_n = noise_std(&spectrum.snapshot().x, 10.0);
    let record = spectrum.with_noise(sigma_n, 4).time_record();
    let cfg = SegmentConfig::default();

    let issm = issm_music(&record, &geometry, &params, 3, &cfg)?;
    println!("ISSM {:.2?}", issm.thetas_deg);
    let init: Vec<f64> = truth.iter().zip([1.5, -1.0, 2.0]).map(|(t, e)| t + e).collect();
    let rss = rss_estimate(&record, &geometry, &params, 3, &init, &cfg)?;
    println!("RSS  {:.2?} (initialized at {init:?})", rss.thetas_deg);

    let spec = issm_spectrum(&record, &geometry, &params, 3, &cfg)?;
    for (angle, value) in spec.peaks(5) {
        println!("  peak {angle:7.2} deg  {value:.3e}");
    }
    Ok(())
}
