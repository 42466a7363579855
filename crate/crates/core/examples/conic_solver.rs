//! The bundled conic solver on a small SDP: min tr X s.t. X ⪰ I.

use gridless_doa::conic::{pack_psd, psd_index, psd_packed_len, solve, unpack_psd, Cone, ConicProgram, SolverConfig, SparseMatrix};
use nalgebra::DMatrix;

fn main() -> gridless_doa::Result<()> {
    let n = 4;
    let len = psd_packed_len(n);
    let mut c = vec![0.0; len];
    for i in 0..n {
        c[psd_index(n, i, i)] = 1.0;
    }
    // s = X - I must lie in the PSD cone
    let triplets: Vec<_> = (0..len).map(|k| (k, k, -1.0)).collect();
    let a = SparseMatrix::from_triplets(len, len, &triplets)?;
    let b: Vec<f64> = pack_psd(&DMatrix::identity(n, n)).into_iter().map(|v| -v).collect();
    let program = ConicProgram::new(c, a, b, vec![Cone::Psd(n)])?;

    let sol = solve(&program, &SolverConfig::default().with_tolerance(1e-8))?;
    println!("status {:?} after {} iterations", sol.status, sol.iterations);
    println!("objective {:.8} (expected {n})", sol.primal_objective);
    println!("X =\n{:.6}", unpack_psd(&sol.x, n));
    println!("residuals {:?}", sol.verify(&program));
    Ok(())
}
