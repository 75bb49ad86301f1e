//! Bipartite logarithmic negativities against the effective coupling `G`
//! for a gain and a lossy cavity.
//!
//! `cargo run --release --example entanglement_vs_coupling`

use ptcmm::measures::ModePair;
use ptcmm::sweep::{figure_preset, run_sweep, Output};

fn main() -> ptcmm::Result<()> {
    let mut spec = figure_preset("fig3a")?;
    spec.outputs = [ModePair::AM, ModePair::BM, ModePair::AB].map(Output::LogNegativity).to_vec();
    let r = run_sweep(&spec, 0)?;
    for (s, series) in r.series.iter().enumerate() {
        println!("{}", series.label);
        println!("  {:>6}  {:>9}  {:>9}  {:>9}", "G/wb", "E_N(am)", "E_N(bm)", "E_N(ab)");
        for (row, coords) in r.grid.iter().enumerate().step_by(10) {
            let p = r.point(row, s);
            let cells: Vec<String> = match &p.steady {
                Some(m) => m.pairs.iter().map(|pm| format!("{:>9.5}", pm.e_n)).collect(),
                None => vec![format!("{:>9}", "unstable"); 3],
            };
            println!("  {:>6.2}  {}", coords[0], cells.join("  "));
        }
    }
    Ok(())
}
