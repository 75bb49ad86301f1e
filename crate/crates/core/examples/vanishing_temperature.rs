//! Temperature at which photon-magnon entanglement disappears.
//!
//! `cargo run --release --example vanishing_temperature`

use ptcmm::config::paper_params;
use ptcmm::measures::ModePair;
use ptcmm::model::ParamKey;
use ptcmm::sweep::vanishing_temperature;

fn main() -> ptcmm::Result<()> {
    let base = paper_params();
    let wb = base.omega_b();
    for (label, ka) in [("gain cavity", 0.02 * wb), ("lossy cavity", -0.02 * wb)] {
        let p = base.with(ParamKey::KappaA, ka)?;
        match vanishing_temperature(&p, ModePair::AM, 0.0, 0.5) {
            Ok(t) => println!("{label}: E_N(am) vanishes at {:.1} mK", t * 1e3),
            Err(e) => println!("{label}: {e}"),
        }
    }
    Ok(())
}
