// SPDX-License-Identifier: MIT OR Apache-2.0

//! Phase shift in noisy curves, compared under the L2 distance.

use wgcpd::sim::generate;
use wgcpd::{build_distance_matrix, detect, EngineConfig, Generator, ScanWindow, ScenarioSpec, Statistic};

fn main() -> wgcpd::Result<()> {
    let g = Generator::functional_phase(50, 0.5, 0.5);
    let metric = g.natural_metric();
    let spec = ScenarioSpec::new("demo", g, 100, vec![50]);
    let d = build_distance_matrix(&metric, &generate(&spec, 4)?)?;
    let bounds = ScanWindow::default().bounds(d.n())?;
    for which in [Statistic::S1, Statistic::S3] {
        let det = detect(&d, which, bounds, &EngineConfig::default().with_seed(4))?;
        println!("{which}: tau_hat {}, p {:.4}", det.tau_hat(), det.p_value.value);
    }
    Ok(())
}
