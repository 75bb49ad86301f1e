//! Physical parameter record, unit conventions, thermal occupations, the
//! drive Rabi frequency and PT-phase classification of the photon-magnon pair.
//!
//! Every rate, detuning and frequency stored here is an angular frequency in
//! rad/s. Cyclic inputs (Hz) go through [`angular_from_cyclic`].

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};

/// Planck constant, J s (exact SI value).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J s.
pub const HBAR: f64 = PLANCK / TAU;
/// Boltzmann constant, J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Electron gyromagnetic ratio, rad s^-1 T^-1 (2π x 28 GHz/T).
pub const GYROMAGNETIC_RATIO: f64 = TAU * 28.0e9;
/// Spin density of YIG, m^-3.
pub const YIG_SPIN_DENSITY: f64 = 4.22e27;
/// Relative half-width of the exceptional-point band in [`pt_classify`].
pub const EP_TOLERANCE: f64 = 1e-9;

/// Converts a cyclic frequency in Hz to rad/s.
#[inline]
pub fn angular_from_cyclic(hz: f64) -> f64 {
    TAU * hz
}

/// Converts rad/s to a cyclic frequency in Hz.
#[inline]
pub fn cyclic_from_angular(rad_s: f64) -> f64 {
    rad_s / TAU
}

/// Bose-Einstein mean occupation `1 / (exp(ħω/k_B T) - 1)`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !omega.is_finite() || !temperature.is_finite() {
        return Err(Error::InvalidParams(format!(
            "thermal_occupation needs finite inputs (omega = {omega}, T = {temperature})"
        )));
    }
    if omega <= 0.0 {
        return Err(Error::InvalidParams(format!("thermal_occupation needs omega > 0, got {omega}")));
    }
    if temperature < 0.0 {
        return Err(Error::InvalidParams(format!("thermal_occupation needs T >= 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (BOLTZMANN * temperature);
    // exp_m1 overflows to +inf for large x, giving exactly 0.
    Ok(1.0 / x.exp_m1())
}

/// Rabi frequency of a YIG sphere of diameter `sphere_diameter` (m) and spin
/// density `spin_density` (m^-3) driven by a field of amplitude `b0` (T).
///
/// `ε_d = (√5/4) γ_g √N_t B₀` with `N_t = ρ (π/6) d³`.
pub fn rabi_frequency(b0: f64, sphere_diameter: f64, spin_density: f64) -> Result<f64> {
    let finite = b0.is_finite() && sphere_diameter.is_finite() && spin_density.is_finite();
    if !finite || b0 < 0.0 || sphere_diameter <= 0.0 || spin_density <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "rabi_frequency needs b0 >= 0, diameter > 0, density > 0 (got {b0}, {sphere_diameter}, {spin_density})"
        )));
    }
    let volume = std::f64::consts::PI / 6.0 * sphere_diameter.powi(3);
    let spins = spin_density * volume;
    Ok(5f64.sqrt() / 4.0 * GYROMAGNETIC_RATIO * spins.sqrt() * b0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PtRegime {
    Unbroken,
    ExceptionalPoint,
    Broken,
}

impl fmt::Display for PtRegime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PtRegime::Unbroken => "Unbroken",
            PtRegime::ExceptionalPoint => "ExceptionalPoint",
            PtRegime::Broken => "Broken",
        };
        f.write_str(s)
    }
}

/// PT phase of the photon-magnon pair together with its signed margin
/// `2 g_ma - (κ_a + κ_m)` in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PtPhase {
    pub regime: PtRegime,
    pub margin: f64,
}

/// Classifies the photon-magnon subsystem with the default EP tolerance.
pub fn pt_classify(g_ma: f64, kappa_a: f64, kappa_m: f64) -> PtPhase {
    pt_classify_with_tolerance(g_ma, kappa_a, kappa_m, EP_TOLERANCE)
}

pub fn pt_classify_with_tolerance(g_ma: f64, kappa_a: f64, kappa_m: f64, rel_tol: f64) -> PtPhase {
    let total = kappa_a + kappa_m;
    let margin = 2.0 * g_ma - total;
    let regime = if margin.abs() <= rel_tol * total.abs() {
        PtRegime::ExceptionalPoint
    } else if margin > 0.0 {
        PtRegime::Unbroken
    } else {
        PtRegime::Broken
    };
    PtPhase { regime, margin }
}

/// Eigenfrequencies `ω± = -Δ - i(κ_m - κ_a)/2 ± √(g² - (κ_a + κ_m)²/4)` of the
/// two-mode gain/loss Hamiltonian at common detuning `delta`.
///
/// The square root is the principal complex root.
pub fn two_mode_eigenfrequencies(
    delta: f64,
    kappa_a: f64,
    kappa_m: f64,
    g_ma: f64,
) -> (Complex<f64>, Complex<f64>) {
    let centre = Complex::new(-delta, -(kappa_m - kappa_a) / 2.0);
    let half_width = (kappa_a + kappa_m) / 2.0;
    let root = Complex::new(g_ma * g_ma - half_width * half_width, 0.0).sqrt();
    (centre + root, centre - root)
}

/// How the effective magnon detuning `Δ̃_m` is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum MagnonDetuning {
    /// Set directly (figure presets do this).
    Fixed(f64),
    /// Solved together with the mechanical displacement from the drive.
    SelfConsistent,
}

/// How the effective magnomechanical coupling `G` is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Coupling {
    Fixed(f64),
    /// `G = g_mb |m_s|` with `m_s` from the drive of Rabi frequency `epsilon_d`.
    FromDrive {
        epsilon_d: f64,
    },
}

/// Names of the parameter fields, as used by config files, `--set` and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParamKey {
    OmegaA,
    OmegaM,
    OmegaB,
    DeltaA,
    DeltaMEff,
    KappaA,
    KappaM,
    GammaB,
    GMa,
    GMb,
    GEff,
    EpsilonD,
    Temperature,
}

impl ParamKey {
    pub const ALL: [ParamKey; 13] = [
        ParamKey::OmegaA,
        ParamKey::OmegaM,
        ParamKey::OmegaB,
        ParamKey::DeltaA,
        ParamKey::DeltaMEff,
        ParamKey::KappaA,
        ParamKey::KappaM,
        ParamKey::GammaB,
        ParamKey::GMa,
        ParamKey::GMb,
        ParamKey::GEff,
        ParamKey::EpsilonD,
        ParamKey::Temperature,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ParamKey::OmegaA => "omega_a",
            ParamKey::OmegaM => "omega_m",
            ParamKey::OmegaB => "omega_b",
            ParamKey::DeltaA => "delta_a",
            ParamKey::DeltaMEff => "delta_m_eff",
            ParamKey::KappaA => "kappa_a",
            ParamKey::KappaM => "kappa_m",
            ParamKey::GammaB => "gamma_b",
            ParamKey::GMa => "g_ma",
            ParamKey::GMb => "g_mb",
            ParamKey::GEff => "G_eff",
            ParamKey::EpsilonD => "epsilon_d",
            ParamKey::Temperature => "temperature",
        }
    }

    pub fn from_name(name: &str) -> Option<ParamKey> {
        ParamKey::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Temperature is in kelvin; everything else is rad/s.
    pub fn is_temperature(self) -> bool {
        self == ParamKey::Temperature
    }
}

impl fmt::Display for ParamKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Validated, immutable physical parameters. Build with [`ParamsBuilder`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemParams {
    omega_a: f64,
    omega_m: f64,
    omega_b: f64,
    delta_a: f64,
    delta_m_eff: MagnonDetuning,
    kappa_a: f64,
    kappa_m: f64,
    gamma_b: f64,
    g_ma: f64,
    g_mb: f64,
    coupling: Coupling,
    temperature: f64,
}

/// Mean thermal occupations of the photon, magnon and phonon baths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Occupations {
    pub photon: f64,
    pub magnon: f64,
    pub phonon: f64,
}

impl SystemParams {
    pub fn builder() -> ParamsBuilder {
        ParamsBuilder::default()
    }

    pub fn to_builder(&self) -> ParamsBuilder {
        let (g_eff, epsilon_d) = match self.coupling {
            Coupling::Fixed(g) => (Some(g), None),
            Coupling::FromDrive { epsilon_d } => (None, Some(epsilon_d)),
        };
        ParamsBuilder {
            omega_a: Some(self.omega_a),
            omega_m: Some(self.omega_m),
            omega_b: Some(self.omega_b),
            delta_a: Some(self.delta_a),
            delta_m_eff: Some(self.delta_m_eff),
            kappa_a: Some(self.kappa_a),
            kappa_m: Some(self.kappa_m),
            gamma_b: Some(self.gamma_b),
            g_ma: Some(self.g_ma),
            g_mb: Some(self.g_mb),
            g_eff,
            epsilon_d,
            temperature: Some(self.temperature),
        }
    }

    pub fn omega_a(&self) -> f64 {
        self.omega_a
    }
    pub fn omega_m(&self) -> f64 {
        self.omega_m
    }
    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }
    pub fn delta_a(&self) -> f64 {
        self.delta_a
    }
    pub fn delta_m_eff(&self) -> MagnonDetuning {
        self.delta_m_eff
    }
    pub fn kappa_a(&self) -> f64 {
        self.kappa_a
    }
    pub fn kappa_m(&self) -> f64 {
        self.kappa_m
    }
    pub fn gamma_b(&self) -> f64 {
        self.gamma_b
    }
    pub fn g_ma(&self) -> f64 {
        self.g_ma
    }
    pub fn g_mb(&self) -> f64 {
        self.g_mb
    }
    pub fn coupling(&self) -> Coupling {
        self.coupling
    }
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// Bare magnon-drive detuning `Δ_m = ω_m - ω_d`, with `ω_d = ω_a - Δ_a`.
    pub fn delta_m(&self) -> f64 {
        self.omega_m - (self.omega_a - self.delta_a)
    }

    pub fn pt_phase(&self) -> PtPhase {
        pt_classify(self.g_ma, self.kappa_a, self.kappa_m)
    }

    pub fn occupations(&self) -> Result<Occupations> {
        Ok(Occupations {
            photon: thermal_occupation(self.omega_a, self.temperature)?,
            magnon: thermal_occupation(self.omega_m, self.temperature)?,
            phonon: thermal_occupation(self.omega_b, self.temperature)?,
        })
    }

    /// Numeric value of a field in SI units, or `None` for fields that are
    /// not set to a number (self-consistent detuning, derived coupling).
    pub fn get(&self, key: ParamKey) -> Option<f64> {
        Some(match key {
            ParamKey::OmegaA => self.omega_a,
            ParamKey::OmegaM => self.omega_m,
            ParamKey::OmegaB => self.omega_b,
            ParamKey::DeltaA => self.delta_a,
            ParamKey::DeltaMEff => match self.delta_m_eff {
                MagnonDetuning::Fixed(d) => d,
                MagnonDetuning::SelfConsistent => return None,
            },
            ParamKey::KappaA => self.kappa_a,
            ParamKey::KappaM => self.kappa_m,
            ParamKey::GammaB => self.gamma_b,
            ParamKey::GMa => self.g_ma,
            ParamKey::GMb => self.g_mb,
            ParamKey::GEff => match self.coupling {
                Coupling::Fixed(g) => g,
                Coupling::FromDrive { .. } => return None,
            },
            ParamKey::EpsilonD => match self.coupling {
                Coupling::FromDrive { epsilon_d } => epsilon_d,
                Coupling::Fixed(_) => return None,
            },
            ParamKey::Temperature => self.temperature,
        })
    }

    /// Copy with one numeric field replaced, re-validated.
    pub fn with(&self, key: ParamKey, value: f64) -> Result<SystemParams> {
        let mut b = self.to_builder();
        b.set(key, value);
        b.build()
    }
}

/// Collects parameter values and validates them into a [`SystemParams`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamsBuilder {
    omega_a: Option<f64>,
    omega_m: Option<f64>,
    omega_b: Option<f64>,
    delta_a: Option<f64>,
    delta_m_eff: Option<MagnonDetuning>,
    kappa_a: Option<f64>,
    kappa_m: Option<f64>,
    gamma_b: Option<f64>,
    g_ma: Option<f64>,
    g_mb: Option<f64>,
    g_eff: Option<f64>,
    epsilon_d: Option<f64>,
    temperature: Option<f64>,
}

macro_rules! setter {
    ($name:ident) => {
        pub fn $name(mut self, value: f64) -> Self {
            self.$name = Some(value);
            self
        }
    };
}

impl ParamsBuilder {
    setter!(omega_a);
    setter!(omega_m);
    setter!(omega_b);
    setter!(delta_a);
    setter!(kappa_a);
    setter!(kappa_m);
    setter!(gamma_b);
    setter!(g_ma);
    setter!(g_mb);
    setter!(g_eff);
    setter!(epsilon_d);
    setter!(temperature);

    pub fn delta_m_eff(mut self, value: f64) -> Self {
        self.delta_m_eff = Some(MagnonDetuning::Fixed(value));
        self
    }

    pub fn self_consistent_detuning(mut self) -> Self {
        self.delta_m_eff = Some(MagnonDetuning::SelfConsistent);
        self
    }

    /// Drops a fixed `G_eff` so that the coupling is derived from `epsilon_d`.
    pub fn derive_coupling_from_drive(mut self) -> Self {
        self.g_eff = None;
        self
    }

    /// Sets a numeric field in SI units (rad/s, or K for temperature).
    pub fn set(&mut self, key: ParamKey, value: f64) {
        let slot = match key {
            ParamKey::OmegaA => &mut self.omega_a,
            ParamKey::OmegaM => &mut self.omega_m,
            ParamKey::OmegaB => &mut self.omega_b,
            ParamKey::DeltaA => &mut self.delta_a,
            ParamKey::DeltaMEff => {
                self.delta_m_eff = Some(MagnonDetuning::Fixed(value));
                return;
            }
            ParamKey::KappaA => &mut self.kappa_a,
            ParamKey::KappaM => &mut self.kappa_m,
            ParamKey::GammaB => &mut self.gamma_b,
            ParamKey::GMa => &mut self.g_ma,
            ParamKey::GMb => &mut self.g_mb,
            ParamKey::GEff => &mut self.g_eff,
            ParamKey::EpsilonD => &mut self.epsilon_d,
            ParamKey::Temperature => &mut self.temperature,
        };
        *slot = Some(value);
    }

    /// Sets a rate field from a cyclic frequency in Hz.
    pub fn set_cyclic(&mut self, key: ParamKey, hz: f64) {
        self.set(key, angular_from_cyclic(hz));
    }

    /// Clears a field; used by config overrides such as `G_eff = derive-from-drive`.
    pub fn unset(&mut self, key: ParamKey) {
        match key {
            ParamKey::OmegaA => self.omega_a = None,
            ParamKey::OmegaM => self.omega_m = None,
            ParamKey::OmegaB => self.omega_b = None,
            ParamKey::DeltaA => self.delta_a = None,
            ParamKey::DeltaMEff => self.delta_m_eff = None,
            ParamKey::KappaA => self.kappa_a = None,
            ParamKey::KappaM => self.kappa_m = None,
            ParamKey::GammaB => self.gamma_b = None,
            ParamKey::GMa => self.g_ma = None,
            ParamKey::GMb => self.g_mb = None,
            ParamKey::GEff => self.g_eff = None,
            ParamKey::EpsilonD => self.epsilon_d = None,
            ParamKey::Temperature => self.temperature = None,
        }
    }

    pub fn set_detuning(&mut self, detuning: MagnonDetuning) {
        self.delta_m_eff = Some(detuning);
    }

    pub fn build(&self) -> Result<SystemParams> {
        fn need(v: Option<f64>, key: ParamKey) -> Result<f64> {
            let v = v.ok_or_else(|| Error::InvalidParams(format!("missing `{key}`")))?;
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("`{key}` must be finite, got {v}")));
            }
            Ok(v)
        }
        fn positive(v: f64, key: ParamKey) -> Result<f64> {
            if v > 0.0 {
                Ok(v)
            } else {
                Err(Error::InvalidParams(format!("`{key}` must be > 0, got {v}")))
            }
        }
        fn non_negative(v: f64, key: ParamKey) -> Result<f64> {
            if v >= 0.0 {
                Ok(v)
            } else {
                Err(Error::InvalidParams(format!("`{key}` must be >= 0, got {v}")))
            }
        }

        let omega_a = positive(need(self.omega_a, ParamKey::OmegaA)?, ParamKey::OmegaA)?;
        let omega_m = positive(need(self.omega_m, ParamKey::OmegaM)?, ParamKey::OmegaM)?;
        let omega_b = positive(need(self.omega_b, ParamKey::OmegaB)?, ParamKey::OmegaB)?;
        let delta_a = need(self.delta_a, ParamKey::DeltaA)?;
        let delta_m_eff = match self.delta_m_eff {
            None => return Err(Error::InvalidParams("missing `delta_m_eff`".into())),
            Some(MagnonDetuning::Fixed(d)) => MagnonDetuning::Fixed(need(Some(d), ParamKey::DeltaMEff)?),
            Some(MagnonDetuning::SelfConsistent) => MagnonDetuning::SelfConsistent,
        };
        let kappa_a = need(self.kappa_a, ParamKey::KappaA)?;
        let kappa_m = positive(need(self.kappa_m, ParamKey::KappaM)?, ParamKey::KappaM)?;
        let gamma_b = positive(need(self.gamma_b, ParamKey::GammaB)?, ParamKey::GammaB)?;
        let g_ma = non_negative(need(self.g_ma, ParamKey::GMa)?, ParamKey::GMa)?;
        let g_mb = non_negative(need(self.g_mb.or(Some(0.0)), ParamKey::GMb)?, ParamKey::GMb)?;
        let temperature =
            non_negative(need(self.temperature, ParamKey::Temperature)?, ParamKey::Temperature)?;

        let coupling = match (self.g_eff, self.epsilon_d) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidParams(
                    "conflicting coupling: give either `G_eff` or `epsilon_d`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(Error::InvalidParams("missing coupling: give `G_eff` or `epsilon_d`".into()))
            }
            (Some(g), None) => Coupling::Fixed(non_negative(need(Some(g), ParamKey::GEff)?, ParamKey::GEff)?),
            (None, Some(e)) => Coupling::FromDrive {
                epsilon_d: non_negative(need(Some(e), ParamKey::EpsilonD)?, ParamKey::EpsilonD)?,
            },
        };
        if delta_m_eff == MagnonDetuning::SelfConsistent && matches!(coupling, Coupling::Fixed(_)) {
            return Err(Error::InvalidParams(
                "a self-consistent `delta_m_eff` needs the coupling derived from `epsilon_d`".into(),
            ));
        }

        Ok(SystemParams {
            omega_a,
            omega_m,
            omega_b,
            delta_a,
            delta_m_eff,
            kappa_a,
            kappa_m,
            gamma_b,
            g_ma,
            g_mb,
            coupling,
            temperature,
        })
    }
}
