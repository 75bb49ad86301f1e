//! The full pipeline by hand: drift, diffusion, spectrum, steady-state
//! covariance and its quality checks.
//!
//! `cargo run --example lyapunov_covariance`

use ptcmm::config::paper_params;
use ptcmm::dynamics::{default_tolerance, diffusion_matrix, quadrature_drift, stability, DriftParams};
use ptcmm::measures::solve_lyapunov_with_tolerance;
use ptcmm::model::ParamKey;
use ptcmm::steady_state::working_point;

fn main() -> ptcmm::Result<()> {
    let p = paper_params().with(ParamKey::KappaA, -0.02 * paper_params().omega_b())?;
    let wb = p.omega_b();
    let dp = DriftParams::new(&p, &working_point(&p)?);
    let a = quadrature_drift(&dp);
    let d = diffusion_matrix(&dp, &p.occupations()?);
    println!("drift / wb:{:.4}", a.matrix() / wb);

    let report = stability(&a, default_tolerance(wb))?;
    println!("max Lyapunov exponent: {:.4e} wb", report.max_lyapunov / wb);

    let cm = solve_lyapunov_with_tolerance(&a, &d, default_tolerance(wb))?;
    println!("covariance:{:.4}", cm.v);
    println!("relative residual {:.2e}, physicality margin {:.4}", cm.residual, cm.physicality_margin);
    Ok(())
}
