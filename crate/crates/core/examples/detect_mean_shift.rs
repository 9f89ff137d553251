// SPDX-License-Identifier: MIT OR Apache-2.0

//! Single change point in the mean of 20-dimensional Gaussian vectors.

use wgcpd::sim::generate;
use wgcpd::{build_distance_matrix, detect, EngineConfig, Generator, PValueMethod, ScanWindow, ScenarioSpec, Statistic};

fn main() -> wgcpd::Result<()> {
    let spec = ScenarioSpec::new("demo", Generator::gauss_mean_shift(20, 0.5), 120, vec![50]);
    let seq = generate(&spec, 7)?;
    let d = build_distance_matrix(&spec.metric, &seq)?;
    let bounds = ScanWindow::default().bounds(d.n())?;

    let engine = EngineConfig::new(PValueMethod::Asymptotic).with_seed(1);
    for which in [Statistic::S1, Statistic::S1Tilde] {
        let det = detect(&d, which, bounds, &engine)?;
        println!(
            "{which}: value {:.4}, tau_hat {}, p {:.4}",
            det.stat.value,
            det.tau_hat(),
            det.p_value.value
        );
    }
    Ok(())
}
