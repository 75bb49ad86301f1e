//! Stable area of the (g_ma, G) plane with a gain cavity versus a lossy one,
//! drawn as ASCII.
//!
//! `cargo run --release --example stability_map`

use ptcmm::model::ParamKey;
use ptcmm::sweep::{figure_preset, stability_map, Axis, SweepParam};

fn main() -> ptcmm::Result<()> {
    for name in ["fig2a", "fig2b"] {
        let mut spec = figure_preset(name)?;
        spec.override_axis(Axis::new(SweepParam::Key(ParamKey::GMa), 0.0, 1.2, 49))?;
        spec.override_axis(Axis::new(SweepParam::Key(ParamKey::GEff), 0.0, 0.6, 16))?;
        let map = stability_map(&spec, 0)?;
        println!("{name}: stable fraction {:.3} ({})", map.stable_fraction[0], spec.name);
        let (rows, cols) = (map.result.spec.axes[0].count, map.result.spec.axes[1].count);
        // G upward, g_ma to the right
        for c in (0..cols).rev() {
            let line: String = (0..rows)
                .map(|r| if map.result.point(r * cols + c, 0).stable == Some(true) { '#' } else { '.' })
                .collect();
            println!("  {line}");
        }
    }
    Ok(())
}
