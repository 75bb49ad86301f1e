//! Classical working point: steady magnon amplitude, mechanical displacement
//! and the drive-enhanced magnomechanical coupling `G = g_mb |m_s|`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Coupling, MagnonDetuning, SystemParams};

/// Relative threshold below which the amplitude denominator counts as zero.
const DENOMINATOR_EPS: f64 = 1e-12;
/// Relative change in `|m_s|` that ends the fixed-point iteration.
pub const FIXED_POINT_TOL: f64 = 1e-10;
pub const FIXED_POINT_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorkingPoint {
    /// Steady magnon amplitude; absent when `G` was given directly.
    pub m_s: Option<Complex<f64>>,
    /// Steady mechanical displacement `-g_mb |m_s|² / ω_b`; absent with `m_s`.
    pub x_s: Option<f64>,
    /// Effective magnon detuning actually used, rad/s.
    pub delta_m_eff: f64,
    /// Effective magnomechanical coupling, rad/s.
    #[serde(rename = "G")]
    pub coupling: f64,
    pub converged: bool,
    /// Fixed-point iterations; zero outside self-consistent mode.
    pub iterations: usize,
}

/// Steady magnon amplitude
/// `m_s = ε(iΔ_a - κ_a) / [g² + (iΔ_a - κ_a)(iΔ̃_m + κ_m)]`.
///
/// `epsilon_d` may carry a phase; only its modulus affects `|m_s|`.
pub fn magnon_amplitude(
    epsilon_d: Complex<f64>,
    delta_a: f64,
    kappa_a: f64,
    g_ma: f64,
    delta_m_eff: f64,
    kappa_m: f64,
) -> Result<Complex<f64>> {
    let cavity = Complex::new(-kappa_a, delta_a);
    let magnon = Complex::new(kappa_m, delta_m_eff);
    let den = cavity * magnon + g_ma * g_ma;
    let scale = [g_ma, delta_a, kappa_a, delta_m_eff, kappa_m].iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if den.norm() <= DENOMINATOR_EPS * scale * scale || den.norm() == 0.0 {
        return Err(Error::DegenerateDenominator { magnitude: den.norm() });
    }
    Ok(epsilon_d * cavity / den)
}

/// [`magnon_amplitude`] with the drive and rates taken from `params`.
///
/// Fails with `InvalidParams` when the coupling is fixed directly, since no
/// drive amplitude is known then.
pub fn steady_magnon_amplitude(params: &SystemParams, delta_m_eff: f64) -> Result<Complex<f64>> {
    let epsilon_d = drive(params)?;
    magnon_amplitude(
        Complex::new(epsilon_d, 0.0),
        params.delta_a(),
        params.kappa_a(),
        params.g_ma(),
        delta_m_eff,
        params.kappa_m(),
    )
}

fn drive(params: &SystemParams) -> Result<f64> {
    match params.coupling() {
        Coupling::FromDrive { epsilon_d } => Ok(epsilon_d),
        Coupling::Fixed(_) => Err(Error::InvalidParams(
            "steady amplitude needs `epsilon_d`; the coupling is fixed directly".into(),
        )),
    }
}

fn displacement(params: &SystemParams, m_s: Complex<f64>) -> f64 {
    -params.g_mb() * m_s.norm_sqr() / params.omega_b()
}

/// Solves `m_s ↦ x_s = -g_mb|m_s|²/ω_b ↦ Δ̃_m = Δ_m + g_mb x_s ↦ m_s` by
/// Picard iteration starting from the bare detuning.
pub fn self_consistent_working_point(params: &SystemParams) -> Result<WorkingPoint> {
    drive(params)?;
    let delta_m = params.delta_m();
    let mut m_s = steady_magnon_amplitude(params, delta_m)?;
    for iteration in 1..=FIXED_POINT_MAX_ITER {
        let delta_eff = delta_m + params.g_mb() * displacement(params, m_s);
        let next = steady_magnon_amplitude(params, delta_eff)?;
        let (old, new) = (m_s.norm(), next.norm());
        if (new - old).abs() <= FIXED_POINT_TOL * new {
            return Ok(WorkingPoint {
                m_s: Some(next),
                x_s: Some(displacement(params, next)),
                delta_m_eff: delta_eff,
                coupling: params.g_mb() * new,
                converged: true,
                iterations: iteration,
            });
        }
        m_s = next;
    }
    Err(Error::NonConvergence { iterations: FIXED_POINT_MAX_ITER })
}

/// Working point for any parameter mode.
///
/// With `G` and `Δ̃_m` both fixed (the figure presets) nothing is solved.
pub fn working_point(params: &SystemParams) -> Result<WorkingPoint> {
    match (params.coupling(), params.delta_m_eff()) {
        (Coupling::Fixed(g), MagnonDetuning::Fixed(delta)) => Ok(WorkingPoint {
            m_s: None,
            x_s: None,
            delta_m_eff: delta,
            coupling: g,
            converged: true,
            iterations: 0,
        }),
        (Coupling::FromDrive { .. }, MagnonDetuning::Fixed(delta)) => {
            let m_s = steady_magnon_amplitude(params, delta)?;
            Ok(WorkingPoint {
                m_s: Some(m_s),
                x_s: Some(displacement(params, m_s)),
                delta_m_eff: delta,
                coupling: params.g_mb() * m_s.norm(),
                converged: true,
                iterations: 0,
            })
        }
        (Coupling::FromDrive { .. }, MagnonDetuning::SelfConsistent) => self_consistent_working_point(params),
        (Coupling::Fixed(_), MagnonDetuning::SelfConsistent) => {
            Err(Error::InvalidParams("self-consistent detuning requires a drive-derived coupling".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix2, Vector2};
    use proptest::prelude::*;

    fn figure(epsilon_d: f64) -> SystemParams {
        SystemParams::builder()
            .omega_a(1.0e4)
            .omega_m(1.0e4)
            .omega_b(1.0)
            .delta_a(-1.0)
            .delta_m_eff(-1.0)
            .kappa_a(0.02)
            .kappa_m(0.1)
            .gamma_b(1e-6)
            .g_ma(1.0)
            .g_mb(1e-8)
            .epsilon_d(epsilon_d)
            .temperature(0.0)
            .build()
            .unwrap()
    }

    /// Zero time derivatives of the mean-field equations, solved as a 2x2
    /// complex linear system in (a_s, m_s).
    fn linear_oracle(p: &SystemParams, delta_m_eff: f64, eps: f64) -> Complex<f64> {
        let i = Complex::i();
        let m = Matrix2::new(
            -i * p.delta_a() + p.kappa_a(),
            -i * p.g_ma(),
            -i * p.g_ma(),
            -i * delta_m_eff - p.kappa_m(),
        );
        let rhs = Vector2::new(Complex::new(0.0, 0.0), Complex::new(-eps, 0.0));
        m.lu().solve(&rhs).unwrap()[1]
    }

    #[test]
    fn decoupled_cavity_limit() {
        let m = magnon_amplitude(Complex::new(3.0, 0.0), -1.0, 0.02, 0.0, -0.7, 0.1).unwrap();
        let expect = Complex::new(3.0, 0.0) / Complex::new(0.1, -0.7);
        assert!((m - expect).norm() <= 1e-14 * expect.norm());
    }

    #[test]
    fn no_drive_gives_zero() {
        let m = magnon_amplitude(Complex::new(0.0, 0.0), -1.0, 0.02, 1.0, -1.0, 0.1).unwrap();
        assert_eq!(m, Complex::new(0.0, 0.0));
    }

    #[test]
    fn matches_linear_solve_at_figure_point() {
        let p = figure(1e3);
        let m = steady_magnon_amplitude(&p, -1.0).unwrap();
        let oracle = linear_oracle(&p, -1.0, 1e3);
        assert!((m - oracle).norm() <= 1e-10 * oracle.norm(), "{m} vs {oracle}");
    }

    #[test]
    fn degenerate_denominator_detected() {
        // g² + (iΔ_a - κ_a)(iΔ̃ + κ_m) = 0 with Δ_a = Δ̃ = 0, κ_a = κ_m = g.
        let err = magnon_amplitude(Complex::new(1.0, 0.0), 0.0, 0.5, 0.5, 0.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::DegenerateDenominator { .. }));
    }

    #[test]
    fn fixed_mode_has_no_amplitude() {
        let mut b = figure(1.0).to_builder();
        b.unset(crate::model::ParamKey::EpsilonD);
        let p = b.g_eff(0.2).build().unwrap();
        let wp = working_point(&p).unwrap();
        assert_eq!(wp.m_s, None);
        assert_eq!(wp.coupling, 0.2);
        assert_eq!(wp.delta_m_eff, -1.0);
        assert!(steady_magnon_amplitude(&p, -1.0).is_err());
    }

    #[test]
    fn uncoupled_mechanics_converges_immediately() {
        let p = figure(50.0).to_builder().g_mb(0.0).self_consistent_detuning().build().unwrap();
        let wp = self_consistent_working_point(&p).unwrap();
        assert_eq!(wp.x_s, Some(0.0));
        assert_eq!(wp.delta_m_eff, p.delta_m());
        assert_eq!(wp.iterations, 1);
        assert!(wp.converged);
        let direct = steady_magnon_amplitude(&p, p.delta_m()).unwrap();
        assert_eq!(wp.m_s, Some(direct));
        assert_eq!(wp.coupling, 0.0);
    }

    #[test]
    fn undriven_working_point_is_trivial() {
        let p = figure(0.0).to_builder().self_consistent_detuning().build().unwrap();
        let wp = self_consistent_working_point(&p).unwrap();
        assert_eq!(wp.m_s.unwrap().norm(), 0.0);
        assert_eq!(wp.x_s.unwrap(), 0.0);
    }

    /// Brute-force root of `n = |m_s(Δ_m - g² n / ω_b)|²` by bisection on n.
    fn root_oracle(p: &SystemParams) -> f64 {
        let f = |n: f64| {
            let delta = p.delta_m() - p.g_mb() * p.g_mb() * n / p.omega_b();
            steady_magnon_amplitude(p, delta).unwrap().norm_sqr() - n
        };
        let (mut lo, mut hi) = (0.0, 1.0);
        while f(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn weak_coupling_self_consistency_matches_root_finder() {
        // ω_a = ω_m so that Δ_m = Δ_a = -ω_b.
        let p = SystemParams::builder()
            .omega_a(1.0e4)
            .omega_m(1.0e4)
            .omega_b(1.0)
            .delta_a(-1.0)
            .kappa_a(-0.02)
            .kappa_m(0.1)
            .gamma_b(1e-6)
            .g_ma(0.3)
            .g_mb(1e-4)
            .epsilon_d(20.0)
            .temperature(0.0)
            .self_consistent_detuning()
            .build()
            .unwrap();
        let wp = self_consistent_working_point(&p).unwrap();
        let n = root_oracle(&p);
        let m = wp.m_s.unwrap();
        assert!((m.norm_sqr() - n).abs() <= 1e-8 * n, "{} vs {n}", m.norm_sqr());
        // first order agreement with the unshifted amplitude
        let bare = steady_magnon_amplitude(&p, p.delta_m()).unwrap();
        let shift = p.g_mb() * wp.x_s.unwrap();
        assert!(shift.abs() < 1e-2 * p.delta_m().abs());
        assert!((bare.norm() - m.norm()).abs() < 1e-2 * m.norm());
        // converged invariants
        let x_expect = -p.g_mb() * m.norm_sqr() / p.omega_b();
        assert!((wp.x_s.unwrap() - x_expect).abs() <= 1e-9 * x_expect.abs());
        assert_eq!(steady_magnon_amplitude(&p, wp.delta_m_eff).unwrap(), m);
        assert!((wp.coupling - p.g_mb() * m.norm()).abs() <= 1e-12 * wp.coupling);
    }

    proptest! {
        #[test]
        fn modulus_is_phase_independent(phase in 0.0f64..std::f64::consts::TAU, eps in 0.1f64..1e4) {
            let rotated = Complex::from_polar(eps, phase);
            let a = magnon_amplitude(Complex::new(eps, 0.0), -1.0, 0.02, 1.0, -1.0, 0.1).unwrap();
            let b = magnon_amplitude(rotated, -1.0, 0.02, 1.0, -1.0, 0.1).unwrap();
            prop_assert!((a.norm() - b.norm()).abs() <= 1e-13 * a.norm());
        }

        #[test]
        fn amplitude_solves_mean_field_equations(
            da in -2.0f64..2.0, dm in -2.0f64..2.0, ka in -0.2f64..0.2, km in 0.01f64..0.3,
            g in 0.0f64..1.5, eps in 0.1f64..100.0,
        ) {
            let m = match magnon_amplitude(Complex::new(eps, 0.0), da, ka, g, dm, km) {
                Ok(m) => m,
                Err(_) => return Ok(()),
            };
            let i = Complex::i();
            prop_assume!(Complex::new(ka, -da).norm() > 1e-6);
            let a = i * g * m / (-i * da + ka);
            let cavity_res = (-i * da + ka) * a - i * g * m;
            let magnon_res = (-i * dm - km) * m - i * g * a + eps;
            let scale = eps + (g + da.abs() + dm.abs() + ka.abs() + km) * (m.norm() + a.norm());
            prop_assert!(cavity_res.norm() <= 1e-10 * scale);
            prop_assert!(magnon_res.norm() <= 1e-10 * scale);
        }
    }
}
