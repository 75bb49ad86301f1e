use std::fmt;
use std::str::FromStr;

use super::{Axis, Output, Series, SweepParam, SweepSpec};
use crate::config::paper_params;
use crate::error::{Error, Result};
use crate::measures::{Mode, ModePair};
use crate::model::{ParamKey, SystemParams};

/// The figure panels that can be regenerated as tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Figure {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig2d,
    Fig3a,
    Fig3b,
    Fig3c,
    Fig3d,
    Fig4a,
    Fig4b,
    Fig4c,
    Fig4d,
    Fig5,
    Fig6a,
    Fig6b,
}

impl Figure {
    pub const ALL: [Figure; 15] = [
        Figure::Fig2a,
        Figure::Fig2b,
        Figure::Fig2c,
        Figure::Fig2d,
        Figure::Fig3a,
        Figure::Fig3b,
        Figure::Fig3c,
        Figure::Fig3d,
        Figure::Fig4a,
        Figure::Fig4b,
        Figure::Fig4c,
        Figure::Fig4d,
        Figure::Fig5,
        Figure::Fig6a,
        Figure::Fig6b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig2a => "fig2a",
            Figure::Fig2b => "fig2b",
            Figure::Fig2c => "fig2c",
            Figure::Fig2d => "fig2d",
            Figure::Fig3a => "fig3a",
            Figure::Fig3b => "fig3b",
            Figure::Fig3c => "fig3c",
            Figure::Fig3d => "fig3d",
            Figure::Fig4a => "fig4a",
            Figure::Fig4b => "fig4b",
            Figure::Fig4c => "fig4c",
            Figure::Fig4d => "fig4d",
            Figure::Fig5 => "fig5",
            Figure::Fig6a => "fig6a",
            Figure::Fig6b => "fig6b",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

/// Gain-to-loss ratio of the active cavity in every figure.
pub const GAIN_RATIO: f64 = 0.2;
/// Fixed coupling of the temperature and `g_ma/G` panels, in units of ω_b.
pub const FIGURE_G: f64 = 0.4;
/// Fixed coupling of the `kappa_a/kappa_m` entanglement panel, in units of ω_b.
pub const KAPPA_PANEL_G: f64 = 0.2;

const G: SweepParam = SweepParam::Key(ParamKey::GEff);
const GMA: SweepParam = SweepParam::Key(ParamKey::GMa);
const T: SweepParam = SweepParam::Key(ParamKey::Temperature);
const RATIO: SweepParam = SweepParam::KappaAOverKappaM;

fn gain_loss_series() -> Vec<Series> {
    vec![
        Series::new("kappa_a=+0.2kappa_m", vec![(RATIO, GAIN_RATIO)]),
        Series::new("kappa_a=-0.2kappa_m", vec![(RATIO, -GAIN_RATIO)]),
    ]
}

fn steer(from: Mode, to: Mode) -> Output {
    Output::Steering { from, to }
}

/// Preset on the bundled parameter set.
pub fn figure_preset(name: &str) -> Result<SweepSpec> {
    figure_preset_on(name.parse()?, &paper_params())
}

/// Preset on a caller-supplied base point. The panel's own values (coupling
/// ratios, `g_ma`, fixed `G`) override the base; axes can be replaced later
/// with [`SweepSpec::override_axis`].
pub fn figure_preset_on(fig: Figure, base: &SystemParams) -> Result<SweepSpec> {
    use Figure::*;
    use Mode::{Magnon, Phonon, Photon};

    let mut spec = SweepSpec {
        name: fig.name().into(),
        base: *base,
        fixed: Vec::new(),
        series: Vec::new(),
        axes: Vec::new(),
        outputs: Vec::new(),
    };
    let g_axis = Axis::new(G, 0.0, 0.5, 101);
    let t_axis = Axis::new(T, 0.0, 250.0, 251);
    let stability_grid = vec![Axis::new(GMA, 0.0, 1.2, 101), Axis::new(G, 0.0, 0.6, 101)];
    let detuning_grid =
        vec![Axis::new(SweepParam::Delta, -2.0, 0.0, 101), Axis::new(SweepParam::GOverGma, 0.0, 0.5, 101)];
    let pair = |f| match f {
        Fig3a | Fig4a => ModePair::AM,
        Fig3b | Fig4b => ModePair::BM,
        _ => ModePair::AB,
    };

    match fig {
        Fig2a | Fig2b => {
            let ratio = if fig == Fig2a { -GAIN_RATIO } else { GAIN_RATIO };
            spec.fixed = vec![(RATIO, ratio)];
            spec.axes = stability_grid;
            spec.outputs = vec![Output::Stable, Output::MaxLyapunov];
        }
        Fig2c => {
            spec.fixed = vec![(GMA, 0.5)];
            spec.axes = vec![Axis::new(RATIO, 0.0, 1.0, 101), Axis::new(G, 0.0, 0.6, 101)];
            spec.outputs = vec![Output::Stable, Output::MaxLyapunov];
        }
        Fig2d => {
            spec.fixed = vec![(G, FIGURE_G), (RATIO, GAIN_RATIO)];
            spec.axes = vec![Axis::new(SweepParam::GmaOverG, 0.5, 5.0, 101)];
            spec.outputs = vec![Output::MaxLyapunov, Output::Stable];
        }
        Fig3a | Fig3b | Fig3c => {
            spec.fixed = vec![(GMA, 1.0)];
            spec.series = gain_loss_series();
            spec.axes = vec![g_axis];
            spec.outputs = vec![Output::LogNegativity(pair(fig))];
        }
        Fig3d => {
            spec.fixed = vec![(GMA, 1.0), (G, KAPPA_PANEL_G)];
            spec.axes = vec![Axis::new(RATIO, 0.0, 0.95, 96)];
            spec.outputs = vec![Output::LogNegativity(ModePair::AM)];
        }
        Fig4a | Fig4b | Fig4c => {
            spec.fixed = vec![(GMA, 1.0), (RATIO, GAIN_RATIO)];
            spec.axes = detuning_grid;
            spec.outputs = vec![Output::LogNegativity(pair(fig))];
        }
        Fig4d => {
            spec.fixed = vec![(GMA, 1.0)];
            spec.axes = vec![Axis::new(SweepParam::GOverGma, 0.0, 0.5, 101), Axis::new(RATIO, 0.0, 0.95, 96)];
            spec.outputs = vec![Output::LogNegativity(ModePair::AM)];
        }
        Fig5 => {
            spec.fixed = vec![(GMA, 1.0)];
            spec.series = gain_loss_series();
            spec.axes = vec![g_axis];
            spec.outputs = vec![
                steer(Magnon, Phonon),
                steer(Photon, Phonon),
                steer(Phonon, Magnon),
                steer(Phonon, Photon),
            ];
        }
        Fig6a => {
            spec.fixed = vec![(GMA, 1.0), (G, FIGURE_G), (RATIO, GAIN_RATIO)];
            spec.axes = vec![t_axis];
            spec.outputs = vec![
                Output::LogNegativity(ModePair::AM),
                Output::LogNegativity(ModePair::BM),
                Output::LogNegativity(ModePair::AB),
                steer(Magnon, Phonon),
                steer(Photon, Phonon),
            ];
        }
        Fig6b => {
            spec.fixed = vec![(GMA, 1.0), (G, FIGURE_G)];
            spec.series = gain_loss_series();
            spec.axes = vec![t_axis];
            spec.outputs = vec![Output::LogNegativity(ModePair::AM)];
        }
    }
    spec.validate()?;
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_is_valid() {
        for fig in Figure::ALL {
            let spec = figure_preset(fig.name()).unwrap();
            assert_eq!(spec.name, fig.name());
            assert!(!spec.outputs.is_empty());
        }
        assert_eq!(figure_preset("fig7").unwrap_err(), Error::UnknownPreset("fig7".into()));
    }

    #[test]
    fn fig2d_shape() {
        let spec = figure_preset("fig2d").unwrap();
        assert_eq!(spec.axes, vec![Axis::new(SweepParam::GmaOverG, 0.5, 5.0, 101)]);
        assert!(spec.fixed.contains(&(G, 0.4)));
        assert!(spec.fixed.contains(&(RATIO, 0.2)));
        assert_eq!(spec.outputs[0], Output::MaxLyapunov);
    }

    #[test]
    fn fig6b_shape() {
        let spec = figure_preset("fig6b").unwrap();
        assert_eq!(spec.axes, vec![Axis::new(T, 0.0, 250.0, 251)]);
        assert_eq!(spec.outputs, vec![Output::LogNegativity(ModePair::AM)]);
        let ratios: Vec<_> = spec.series.iter().map(|s| s.overrides[0]).collect();
        assert_eq!(ratios, vec![(RATIO, 0.2), (RATIO, -0.2)]);
    }

    #[test]
    fn fig5_shape() {
        let spec = figure_preset("fig5").unwrap();
        assert_eq!(spec.axes[0].param, G);
        assert_eq!(spec.series.len(), 2);
        assert!(spec.fixed.contains(&(GMA, 1.0)));
        assert!(spec.outputs.contains(&steer(Mode::Magnon, Mode::Phonon)));
        assert!(spec.outputs.contains(&steer(Mode::Photon, Mode::Phonon)));
    }

    #[test]
    fn panel_values_reach_the_points() {
        let spec = figure_preset("fig2c").unwrap();
        let p = spec.point_params(&Series::new("", vec![]), &[0.5, 0.3]).unwrap();
        let wb = p.omega_b();
        assert_eq!(p.g_ma(), 0.5 * wb);
        assert_eq!(p.kappa_a(), 0.5 * 0.1 * wb);
        assert_eq!(p.get(ParamKey::GEff), Some(0.3 * wb));
    }
}
