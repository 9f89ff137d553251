// SPDX-License-Identifier: MIT OR Apache-2.0

//! Null rejection rates of the calibration preset at a reduced replicate count.
//! Pass a replicate count as the first argument (default 50).

use wgcpd::sim::{preset, report_to_csv_string};
use wgcpd::run_experiment;

fn main() -> wgcpd::Result<()> {
    let reps = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let specs = preset("table1", Some(reps), 2024)?;
    let report = run_experiment(&specs, true)?;
    print!("{}", report_to_csv_string(&report));
    Ok(())
}
