//! Working point from a physical drive instead of a fixed `G`: microwave
//! field amplitude, Rabi frequency, magnon amplitude and the resulting
//! effective magnomechanical coupling. Strong drives push the magnon
//! detuning shift into the bistable regime, where the self-consistent
//! iteration reports non-convergence instead of picking a branch.
//!
//! `cargo run --example steady_state`

use ptcmm::config::{paper_params, DEFAULT_SPHERE_DIAMETER};
use ptcmm::model::{rabi_frequency, ParamKey, YIG_SPIN_DENSITY};
use ptcmm::steady_state::{self_consistent_working_point, working_point};

fn main() -> ptcmm::Result<()> {
    let base = paper_params();
    let wb = base.omega_b();
    for b0 in [1e-8, 1e-7, 1e-6, 1e-5] {
        let eps = rabi_frequency(b0, DEFAULT_SPHERE_DIAMETER, YIG_SPIN_DENSITY)?;
        let mut builder = base.to_builder();
        builder.unset(ParamKey::GEff);
        builder.set(ParamKey::EpsilonD, eps);
        let p = builder.build()?;
        let wp = working_point(&p)?;
        let sc = match self_consistent_working_point(&p) {
            Ok(sc) => format!("{:.4} wb after {} iterations", sc.coupling / wb, sc.iterations),
            Err(e) => e.to_string(),
        };
        println!(
            "B0 = {b0:.0e} T: eps = {eps:.3e} rad/s, |m_s| = {:.3e}, G = {:.4} wb (self-consistent: {sc})",
            wp.m_s.map_or(0.0, |m| m.norm()),
            wp.coupling / wb,
        );
    }
    Ok(())
}
