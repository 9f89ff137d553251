// SPDX-License-Identifier: MIT OR Apache-2.0

//! The distance route and the kernel route give the same numbers.

use wgcpd::kernel::{
    center_gram, centered_gram_from_distances, distance_induced_kernel, estimate_eigenvalues,
    mean_embedding_gap_sq, Truncation,
};
use wgcpd::sim::generate;
use wgcpd::{build_distance_matrix, moments, Generator, ScanProfile, ScenarioSpec, WindowBounds};

fn main() -> wgcpd::Result<()> {
    let spec = ScenarioSpec::new("demo", Generator::gauss_null(3), 40, vec![]);
    let d = build_distance_matrix(&spec.metric, &generate(&spec, 9)?)?;
    let n = d.n();
    let profile = ScanProfile::build(&d, WindowBounds::explicit(n, 2, n - 2)?);
    let cg = centered_gram_from_distances(&d);

    let worst = profile
        .splits()
        .map(|t| (profile.t1_tilde(t) - mean_embedding_gap_sq(&cg, t)).abs())
        .fold(0.0, f64::max);
    println!("max |T1~ - mean embedding gap| = {worst:.2e}");

    let other = center_gram(&distance_induced_kernel(&d, n - 1));
    println!("anchor independence: {:.2e}", (other.matrix() - cg.matrix()).amax());

    let diag = cg.diagonal();
    let mean = diag.iter().sum::<f64>() / n as f64;
    let var = diag.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
    println!("s_hat^2 {:.6} vs Var(diag) {var:.6}", moments(&d).s_hat.powi(2));

    let spec = estimate_eigenvalues(&d, Truncation::default())?;
    println!("kept {} eigenvalues, trace fraction {:.3}", spec.kept, spec.trace_fraction);
    Ok(())
}
