//! Solves the journal bearing problem over a few grid sizes and eccentricities and prints
//! one summary line per run.
//!
//! ```text
//! cargo run --release -p gpcg --example bearing_sweep -- 100 200
//! ```

use gpcg::bearing::generate;
use gpcg::{solve, BearingSpec, PreconditionerKind, SolverConfig};

fn main() -> gpcg::Result<()> {
    let sizes: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let sizes = if sizes.is_empty() { vec![50, 100] } else { sizes };
    println!("{:>5} {:>4} {:>14} {:>6} {:>5} {:>7} {:>6} {:>10} {:>8}", "grid", "eps", "precond", "outer", "gp", "cg", "free", "pg_norm", "time_s");
    for &m in &sizes {
        for eps in [0.1, 0.9] {
            let qp = generate(&BearingSpec::new(m, m, eps))?;
            for precond in ["jacobi", "bjacobi-ilu0", "bjacobi-ilu2"] {
                let cfg = SolverConfig { precond: precond.parse::<PreconditionerKind>()?, ..SolverConfig::default() };
                let out = solve(&qp, qp.lower(), &cfg)?;
                let s = &out.stats;
                println!(
                    "{:>5} {:>4} {:>14} {:>6} {:>5} {:>7} {:>6.3} {:>10.3e} {:>8.2} {:?}",
                    m, eps, precond, s.outer_iters, s.gp_iters_total, s.cg_iters_total,
                    s.free_fraction_final, s.final_pg_norm, s.wall_time_seconds, out.status
                );
            }
        }
    }
    Ok(())
}
