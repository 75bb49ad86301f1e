//! PT phase of the photon-magnon pair across the exceptional point.
//!
//! `cargo run --example classify`

use ptcmm::model::{pt_classify, two_mode_eigenfrequencies};

fn main() {
    let wb = std::f64::consts::TAU * 10e6;
    let (ka, km) = (0.02 * wb, 0.1 * wb);
    println!("{:>8}  {:>16}  {:>22}  {:>22}", "g/wb", "phase", "omega+ / wb", "omega- / wb");
    for g in [0.0, 0.03, 0.05, 0.06, 0.07, 0.2, 1.0] {
        let phase = pt_classify(g * wb, ka, km);
        let (plus, minus) = two_mode_eigenfrequencies(-wb, ka, km, g * wb);
        println!(
            "{g:>8.3}  {:>16}  {:>10.4} {:+.4}i  {:>10.4} {:+.4}i",
            phase.regime.to_string(),
            plus.re / wb,
            plus.im / wb,
            minus.re / wb,
            minus.im / wb
        );
    }
}
