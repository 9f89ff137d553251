// SPDX-License-Identifier: MIT OR Apache-2.0

//! Binary segmentation with two mean changes, then pruning the same tree at
//! a stricter level.

use wgcpd::sim::generate;
use wgcpd::{
    binary_segment, build_distance_matrix, changepoints_to_partition, rand_index, Generator, ScenarioSpec,
    SegmentationConfig,
};

fn main() -> wgcpd::Result<()> {
    let g = Generator::Gaussian {
        dim: 10,
        mu: vec![0.0, 0.8, 0.0],
        sigma: vec![1.0; 3],
    };
    let truth = vec![60, 130];
    let spec = ScenarioSpec::new("demo", g, 200, truth.clone());
    let d = build_distance_matrix(&spec.metric, &generate(&spec, 5)?)?;

    let tree = binary_segment(&d, &SegmentationConfig::default())?;
    for node in tree.nodes() {
        println!("({}, {}) k={:?} p={:.4} accepted={}", node.l, node.r, node.k, node.p, node.accepted);
    }
    let strict = tree.prune(0.001);
    let u = changepoints_to_partition(&tree.change_points, d.n())?;
    let v = changepoints_to_partition(&truth, d.n())?;
    println!("change points {:?}, at 0.001: {:?}", tree.change_points, strict.change_points);
    println!("Rand index vs truth {:.3}", rand_index(&u, &v)?);
    Ok(())
}
