//! Integrals over the phase circle with very large count exponents, done in
//! log space with automatic grid doubling.

use qbayes::numerics::{adaptive_log_integrate, periodic_integrate, PeriodicGrid};

fn main() -> qbayes::Result<()> {
    let grid = PeriodicGrid::new(256)?;
    let est = periodic_integrate(&|phi: f64| (1.0 + phi.cos()) / std::f64::consts::TAU, grid)?;
    println!("∫(1+cos φ)/2π = {:.15} (doubling error {:.1e})", est.value, est.doubling_error);

    for m in [10.0, 1e3, 1e5] {
        let log_f = |phi: f64| m * (0.5 * (1.0 + phi.cos())).ln();
        let r = adaptive_log_integrate(&log_f, PeriodicGrid::default())?;
        println!(
            "ln ∫((1+cos φ)/2)^{m:e} = {:.12} on {} nodes (relative change {:.1e})",
            r.log_value,
            r.grid.node_count(),
            r.relative_change
        );
    }
    Ok(())
}
