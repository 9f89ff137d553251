// SPDX-License-Identifier: MIT OR Apache-2.0

//! The three p-value engines on the same data.

use wgcpd::sim::generate;
use wgcpd::{build_distance_matrix, detect, EngineConfig, Generator, PValueMethod, ScanWindow, ScenarioSpec, Statistic};

fn main() -> wgcpd::Result<()> {
    let spec = ScenarioSpec::new("demo", Generator::gauss_both(5, 0.3, 1.3), 100, vec![40]);
    let d = build_distance_matrix(&spec.metric, &generate(&spec, 11)?)?;
    let bounds = ScanWindow::default().bounds(d.n())?;

    let runs = [
        (Statistic::S1, PValueMethod::Asymptotic),
        (Statistic::S1, PValueMethod::Permutation),
        (Statistic::S2Tilde, PValueMethod::Corrected),
        (Statistic::S2Tilde, PValueMethod::Permutation),
        (Statistic::S3, PValueMethod::Asymptotic),
        (Statistic::S3, PValueMethod::Permutation),
    ];
    for (which, method) in runs {
        let det = detect(&d, which, bounds, &EngineConfig::new(method).with_seed(42))?;
        let se = det.p_value.mc_stderr.map(|s| format!(" (se {s:.4})")).unwrap_or_default();
        println!("{which} {method}: p {:.4}{se}", det.p_value.value);
    }
    Ok(())
}
