//! Gaussian steering in both directions for every mode pair at one
//! working point, showing where it is one-way.
//!
//! `cargo run --example one_way_steering`

use ptcmm::config::paper_params;
use ptcmm::dynamics::{default_tolerance, diffusion_matrix, quadrature_drift, DriftParams};
use ptcmm::measures::{pair_measures, solve_lyapunov_with_tolerance, ModePair};
use ptcmm::model::ParamKey;
use ptcmm::steady_state::working_point;

fn main() -> ptcmm::Result<()> {
    let base = paper_params();
    let wb = base.omega_b();
    for (label, ka) in [("gain cavity", 0.02 * wb), ("lossy cavity", -0.02 * wb)] {
        for g in [0.1, 0.2] {
            let p = base.with(ParamKey::KappaA, ka)?.with(ParamKey::GEff, g * wb)?;
            let dp = DriftParams::new(&p, &working_point(&p)?);
            let d = diffusion_matrix(&dp, &p.occupations()?);
            let cm = solve_lyapunov_with_tolerance(&quadrature_drift(&dp), &d, default_tolerance(wb))?;
            println!("{label}, G = {g} wb");
            for pair in [ModePair::AM, ModePair::BM, ModePair::AB] {
                let m = pair_measures(&cm, pair)?;
                let (f, s) = (pair.first().symbol(), pair.second().symbol());
                let kind = match (m.s_12 > 0.0, m.s_21 > 0.0) {
                    (true, true) => "two-way",
                    (true, false) | (false, true) => "one-way",
                    _ => "none",
                };
                println!(
                    "  {f}{s}: E_N = {:.5}  S({f}->{s}) = {:.5}  S({s}->{f}) = {:.5}  [{kind}]",
                    m.e_n, m.s_12, m.s_21
                );
            }
        }
    }
    Ok(())
}
