//! Flat `key = value` parameter files and `--set key=value` overrides.
//!
//! ```text
//! # comments start with '#'
//! omega_b     = 10 mhz         # cyclic units are multiplied by 2π
//! g_ma        = 1.0 omega_b    # ratios of the mechanical frequency
//! kappa_a     = -0.02 omega_b  # negative: lossy cavity
//! temperature = 20 mk
//! G_eff       = 0.4 omega_b
//! ```
//!
//! Rate keys accept `hz`, `khz`, `mhz`, `ghz`, `rad_s` and `omega_b`;
//! `temperature` accepts `mk` and `k`; `drive_b0` accepts `t`. A bare number is
//! taken in SI units (rad/s, K, T, m, m⁻³). Two markers are recognised:
//! `delta_m_eff = self-consistent` and `G_eff = derive-from-drive`.
//!
//! Files and override lists are applied as layers, later layers winning. A
//! single layer may not fix the coupling twice (`G_eff` together with
//! `epsilon_d` or `drive_b0`); across layers the newest coupling replaces the
//! older one.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{rabi_frequency, ParamKey, ParamsBuilder, SystemParams, YIG_SPIN_DENSITY};

/// The bundled parameter set used when no `--config` is given.
pub const PAPER_CONF: &str = include_str!("../params/paper.conf");

/// Sphere diameter assumed when `drive_b0` is given without `sphere_diameter`.
pub const DEFAULT_SPHERE_DIAMETER: f64 = 250e-6;

/// Every key a parameter file may contain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConfigKey {
    Param(ParamKey),
    /// Drive field amplitude in tesla; derives `epsilon_d`.
    DriveB0,
    SphereDiameter,
    SpinDensity,
}

impl ConfigKey {
    const EXTRA: [(&'static str, ConfigKey); 3] = [
        ("drive_b0", ConfigKey::DriveB0),
        ("sphere_diameter", ConfigKey::SphereDiameter),
        ("spin_density", ConfigKey::SpinDensity),
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConfigKey::Param(k) => k.name(),
            ConfigKey::DriveB0 => "drive_b0",
            ConfigKey::SphereDiameter => "sphere_diameter",
            ConfigKey::SpinDensity => "spin_density",
        }
    }

    pub fn from_name(name: &str) -> Option<ConfigKey> {
        ParamKey::from_name(name)
            .map(ConfigKey::Param)
            .or_else(|| Self::EXTRA.iter().find(|(n, _)| *n == name).map(|&(_, k)| k))
    }

    /// Comma-separated list of every valid key, for error messages.
    pub fn valid_list() -> String {
        ParamKey::ALL
            .iter()
            .map(|k| k.name())
            .chain(Self::EXTRA.iter().map(|(n, _)| *n))
            .collect::<Vec<_>>()
            .join(", ")
    }

    fn parse(name: &str) -> Result<ConfigKey> {
        Self::from_name(name)
            .ok_or_else(|| Error::UnknownKey { key: name.to_string(), valid: Self::valid_list() })
    }

    fn kind(self) -> UnitKind {
        match self {
            ConfigKey::Param(k) if k.is_temperature() => UnitKind::Temperature,
            ConfigKey::Param(ParamKey::OmegaB) => UnitKind::AbsoluteRate,
            ConfigKey::Param(_) => UnitKind::Rate,
            ConfigKey::DriveB0 => UnitKind::Field,
            ConfigKey::SphereDiameter | ConfigKey::SpinDensity => UnitKind::Plain,
        }
    }

    fn fixes_coupling(self, value: &Value) -> Option<CouplingSource> {
        match (self, value) {
            (ConfigKey::Param(ParamKey::GEff), Value::Number(_)) => Some(CouplingSource::Direct),
            (ConfigKey::Param(ParamKey::EpsilonD), _) | (ConfigKey::DriveB0, _) => {
                Some(CouplingSource::Drive)
            }
            _ => None,
        }
    }
}

impl fmt::Display for ConfigKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum UnitKind {
    Rate,
    /// A rate that cannot be given relative to `omega_b` (`omega_b` itself).
    AbsoluteRate,
    Temperature,
    Field,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CouplingSource {
    Direct,
    Drive,
}

/// A number with its unit resolved, except for `omega_b` ratios, which wait
/// until the final mechanical frequency is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    Si(f64),
    OmegaB(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Number(Quantity),
    SelfConsistent,
    DeriveFromDrive,
}

const SUFFIXES: [(&str, Suffix); 9] = [
    ("omega_b", Suffix::OmegaB),
    ("rad_s", Suffix::Scale(1.0)),
    ("ghz", Suffix::Cyclic(1e9)),
    ("mhz", Suffix::Cyclic(1e6)),
    ("khz", Suffix::Cyclic(1e3)),
    ("hz", Suffix::Cyclic(1.0)),
    ("mk", Suffix::Scale(1e-3)),
    ("k", Suffix::Scale(1.0)),
    ("t", Suffix::Scale(1.0)),
];

#[derive(Debug, Clone, Copy)]
enum Suffix {
    OmegaB,
    Cyclic(f64),
    Scale(f64),
}

fn allowed(kind: UnitKind, unit: &str) -> bool {
    match kind {
        UnitKind::Rate => matches!(unit, "omega_b" | "rad_s" | "ghz" | "mhz" | "khz" | "hz"),
        UnitKind::AbsoluteRate => matches!(unit, "rad_s" | "ghz" | "mhz" | "khz" | "hz"),
        UnitKind::Temperature => matches!(unit, "mk" | "k"),
        UnitKind::Field => unit == "t",
        UnitKind::Plain => false,
    }
}

fn parse_number(text: &str) -> Option<f64> {
    text.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Parses the right-hand side of `key = value`.
pub fn parse_value(key: ConfigKey, text: &str) -> std::result::Result<Value, String> {
    let text = text.trim();
    match (key, text) {
        (ConfigKey::Param(ParamKey::DeltaMEff), "self-consistent") => return Ok(Value::SelfConsistent),
        (ConfigKey::Param(ParamKey::GEff), "derive-from-drive") => return Ok(Value::DeriveFromDrive),
        _ => {}
    }
    if let Some(v) = parse_number(text) {
        return Ok(Value::Number(Quantity::Si(v)));
    }
    let lower = text.to_ascii_lowercase();
    for (unit, suffix) in SUFFIXES {
        let Some(head) = lower.strip_suffix(unit) else { continue };
        let Some(v) = parse_number(head) else { continue };
        if !allowed(key.kind(), unit) {
            return Err(format!("unit `{unit}` does not apply to `{key}`"));
        }
        let q = match suffix {
            Suffix::OmegaB => Quantity::OmegaB(v),
            Suffix::Cyclic(scale) => Quantity::Si(v * scale * TAU),
            Suffix::Scale(scale) => Quantity::Si(v * scale),
        };
        return Ok(Value::Number(q));
    }
    Err(format!("cannot parse `{text}` as a value for `{key}`"))
}

/// One source of settings: a file or the list of `--set` overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Layer {
    entries: BTreeMap<ConfigKey, Value>,
}

impl Layer {
    /// Parses a whole parameter file.
    pub fn parse(text: &str) -> Result<Layer> {
        let mut layer = Layer::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let location = format!("line {}", i + 1);
            layer.insert_assignment(line, &location)?;
        }
        Ok(layer)
    }

    pub fn from_file(path: &Path) -> std::io::Result<Result<Layer>> {
        let text = std::fs::read_to_string(path)?;
        Ok(Layer::parse(&text))
    }

    /// Builds a layer from `key=value` strings as given to `--set`.
    pub fn from_overrides<S: AsRef<str>>(items: &[S]) -> Result<Layer> {
        let mut layer = Layer::default();
        for item in items {
            let item = item.as_ref();
            layer.insert_assignment(item, &format!("--set {item}"))?;
        }
        Ok(layer)
    }

    fn insert_assignment(&mut self, assignment: &str, location: &str) -> Result<()> {
        let err = |message: String| Error::Config { location: location.to_string(), message };
        let (key, value) = assignment.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
        let key = ConfigKey::parse(key.trim())?;
        let value = parse_value(key, value).map_err(err)?;
        if self.entries.contains_key(&key) {
            return Err(err(format!("`{key}` given more than once")));
        }
        if let Some(source) = key.fixes_coupling(&value) {
            let clash = self
                .entries
                .iter()
                .find(|(k, v)| k.fixes_coupling(v).is_some_and(|s| s != source || **k != key));
            if let Some((other, _)) = clash {
                return Err(err(format!(
                    "conflicting coupling: `{key}` and `{other}` both fix G; give only one"
                )));
            }
        }
        self.entries.insert(key, value);
        Ok(())
    }

    pub fn insert(&mut self, key: ConfigKey, value: Value) {
        self.entries.insert(key, value);
    }

    pub fn get(&self, key: ConfigKey) -> Option<Value> {
        self.entries.get(&key).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Layers merged in order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    merged: Layer,
}

impl Config {
    /// The bundled parameter set.
    pub fn paper() -> Config {
        let layer = Layer::parse(PAPER_CONF).expect("bundled parameter file parses");
        Config::default().with_layer(layer)
    }

    /// Applies `layer` on top, clearing any coupling it supersedes.
    pub fn with_layer(mut self, layer: Layer) -> Config {
        let incoming = layer.entries.iter().find_map(|(k, v)| k.fixes_coupling(v));
        let derive = layer.get(gkey(ParamKey::GEff)) == Some(Value::DeriveFromDrive);
        if incoming.is_some() || derive {
            self.merged.entries.retain(|k, v| k.fixes_coupling(v).is_none());
        }
        self.merged.entries.extend(layer.entries);
        self
    }

    pub fn layer(&self) -> &Layer {
        &self.merged
    }

    /// Resolves units and validates everything into [`SystemParams`].
    pub fn to_params(&self) -> Result<SystemParams> {
        let entries = &self.merged.entries;
        let omega_b = match entries.get(&gkey(ParamKey::OmegaB)) {
            Some(Value::Number(Quantity::Si(v))) => Some(*v),
            _ => None,
        };
        let resolve = |key: ConfigKey, q: Quantity| -> Result<f64> {
            match q {
                Quantity::Si(v) => Ok(v),
                Quantity::OmegaB(r) => omega_b.map(|w| r * w).ok_or_else(|| {
                    Error::InvalidParams(format!("`{key}` is given in omega_b but omega_b is missing"))
                }),
            }
        };

        let mut b = ParamsBuilder::default();
        let mut drive = None;
        let mut diameter = DEFAULT_SPHERE_DIAMETER;
        let mut density = YIG_SPIN_DENSITY;
        for (&key, &value) in entries {
            match (key, value) {
                (ConfigKey::Param(k), Value::Number(q)) => b.set(k, resolve(key, q)?),
                (ConfigKey::Param(_), Value::SelfConsistent) => {
                    b = b.self_consistent_detuning();
                }
                (ConfigKey::Param(_), Value::DeriveFromDrive) => {
                    b = b.derive_coupling_from_drive();
                }
                (ConfigKey::DriveB0, Value::Number(q)) => drive = Some(resolve(key, q)?),
                (ConfigKey::SphereDiameter, Value::Number(q)) => diameter = resolve(key, q)?,
                (ConfigKey::SpinDensity, Value::Number(q)) => density = resolve(key, q)?,
                _ => unreachable!("markers only parse for their own keys"),
            }
        }
        if let Some(b0) = drive {
            b.set(ParamKey::EpsilonD, rabi_frequency(b0, diameter, density)?);
        }
        b.build()
    }
}

fn gkey(k: ParamKey) -> ConfigKey {
    ConfigKey::Param(k)
}

/// The bundled parameters.
pub fn paper_params() -> SystemParams {
    Config::paper().to_params().expect("bundled parameters are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Coupling, MagnonDetuning};

    fn rate(key: ParamKey, text: &str) -> Value {
        parse_value(gkey(key), text).unwrap()
    }

    #[test]
    fn unit_suffixes() {
        let si = |v| Value::Number(Quantity::Si(v));
        assert_eq!(rate(ParamKey::OmegaB, "10 mhz"), si(10e6 * TAU));
        assert_eq!(rate(ParamKey::OmegaA, "10.1GHz"), si(10.1e9 * TAU));
        assert_eq!(rate(ParamKey::GammaB, "10 hz"), si(10.0 * TAU));
        assert_eq!(rate(ParamKey::KappaM, "3 khz"), si(3e3 * TAU));
        assert_eq!(rate(ParamKey::KappaM, "5 rad_s"), si(5.0));
        assert_eq!(rate(ParamKey::KappaM, "1e6"), si(1e6));
        assert_eq!(rate(ParamKey::GMa, "0.06omega_b"), Value::Number(Quantity::OmegaB(0.06)));
        assert_eq!(rate(ParamKey::DeltaA, "-1 omega_b"), Value::Number(Quantity::OmegaB(-1.0)));
        assert_eq!(rate(ParamKey::Temperature, "20 mk"), si(20e-3));
        assert_eq!(rate(ParamKey::Temperature, "0.15 K"), si(0.15));
        assert_eq!(parse_value(ConfigKey::DriveB0, "6.88e-5 t").unwrap(), si(6.88e-5));
    }

    #[test]
    fn mismatched_units_rejected() {
        assert!(parse_value(gkey(ParamKey::Temperature), "3 mhz").is_err());
        assert!(parse_value(gkey(ParamKey::KappaM), "3 mk").is_err());
        assert!(parse_value(gkey(ParamKey::OmegaB), "1 omega_b").is_err());
        assert!(parse_value(ConfigKey::SphereDiameter, "1 t").is_err());
        assert!(parse_value(gkey(ParamKey::KappaM), "fast").is_err());
        assert!(parse_value(gkey(ParamKey::KappaM), "inf").is_err());
        assert!(parse_value(gkey(ParamKey::KappaM), "self-consistent").is_err());
    }

    #[test]
    fn paper_file_values() {
        let p = paper_params();
        let wb = TAU * 10e6;
        assert_eq!(p.omega_b(), wb);
        assert_eq!(p.kappa_m(), 0.1 * wb);
        assert_eq!(p.kappa_a(), 0.02 * wb);
        assert_eq!(p.g_ma(), wb);
        assert_eq!(p.delta_m_eff(), MagnonDetuning::Fixed(-wb));
        assert_eq!(p.coupling(), Coupling::Fixed(0.4 * wb));
        assert_eq!(p.temperature(), 0.02);
        assert_eq!(p.gamma_b(), TAU * 10.0);
    }

    #[test]
    fn unknown_key_lists_every_valid_key() {
        let err = Layer::parse("omega_x = 1").unwrap_err();
        let Error::UnknownKey { key, valid } = err else { panic!("{err:?}") };
        assert_eq!(key, "omega_x");
        for k in ParamKey::ALL {
            assert!(valid.contains(k.name()));
        }
        assert!(valid.contains("drive_b0"));
    }

    #[test]
    fn conflicting_coupling_in_one_layer() {
        let err = Layer::parse("G_eff = 0.2 omega_b\nepsilon_d = 1e15").unwrap_err();
        assert_eq!(err.code(), "config");
        assert!(Layer::from_overrides(&["drive_b0=1e-5 t", "G_eff=1e6"]).is_err());
        assert!(Layer::from_overrides(&["drive_b0=1e-5 t", "epsilon_d=1e6"]).is_err());
        // the marker does not fix a value
        assert!(Layer::from_overrides(&["G_eff=derive-from-drive", "epsilon_d=1e6"]).is_ok());
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = Layer::parse("# header\n\nkappa_m = 0.1 parsecs\n").unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        assert!(Layer::parse("kappa_m 0.1").is_err());
        assert!(Layer::parse("kappa_m = 1\nkappa_m = 2").is_err());
    }

    #[test]
    fn overrides_win_and_ratios_follow_final_omega_b() {
        let over = Layer::from_overrides(&["omega_b=20 mhz", "temperature=0.1"]).unwrap();
        let p = Config::paper().with_layer(over).to_params().unwrap();
        let wb = TAU * 20e6;
        assert_eq!(p.omega_b(), wb);
        assert_eq!(p.g_ma(), wb);
        assert_eq!(p.temperature(), 0.1);
    }

    #[test]
    fn newer_coupling_replaces_older() {
        let over = Layer::from_overrides(&["epsilon_d=1e15"]).unwrap();
        let p = Config::paper().with_layer(over).to_params().unwrap();
        assert_eq!(p.coupling(), Coupling::FromDrive { epsilon_d: 1e15 });

        let over = Layer::from_overrides(&["drive_b0=6.88e-5 t"]).unwrap();
        let p = Config::paper().with_layer(over).to_params().unwrap();
        let expect = rabi_frequency(6.88e-5, DEFAULT_SPHERE_DIAMETER, YIG_SPIN_DENSITY).unwrap();
        assert_eq!(p.coupling(), Coupling::FromDrive { epsilon_d: expect });
    }

    #[test]
    fn self_consistent_drive_from_overrides() {
        let over = Layer::from_overrides(&["delta_m_eff=self-consistent", "drive_b0=6.88e-5 t"]).unwrap();
        let p = Config::paper().with_layer(over).to_params().unwrap();
        assert_eq!(p.delta_m_eff(), MagnonDetuning::SelfConsistent);
        assert!(matches!(p.coupling(), Coupling::FromDrive { .. }));
    }

    #[test]
    fn derive_marker_without_drive_is_incomplete() {
        let over = Layer::from_overrides(&["G_eff=derive-from-drive"]).unwrap();
        let err = Config::paper().with_layer(over).to_params().unwrap_err();
        assert_eq!(err.code(), "invalid_params");
    }
}
