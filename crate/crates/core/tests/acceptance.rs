//! Runs every acceptance check at its stated tolerance, one PASS/FAIL line each.

use std::time::Instant;

use conslaw_core::verification;

fn main() {
    let start = Instant::now();
    let mut reports = vec![
        verification::existence_order(),
        verification::coperiodic_spectrum(),
        verification::small_sigma_curvatures(),
        verification::mgl_convergence(),
        verification::stability_band(),
        verification::cubic_machinery(),
        verification::symmetry_properties(),
    ];
    for r in &reports {
        println!("{}", r.line());
    }
    let runs = verification::evolution_runs();
    for r in [
        verification::dynamic_confirmation(&runs),
        verification::conservation(&runs),
    ] {
        println!("{}", r.line());
        reports.push(r);
    }
    let failed: Vec<u32> = reports.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        reports.len() - failed.len(),
        reports.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
