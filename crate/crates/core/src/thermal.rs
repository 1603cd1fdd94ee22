//! Subsystems, temperatures and Gibbs states.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, split_inverse_log, Real, Scalar, DEFAULT_PRECISION};

/// One subsystem's energy ladder, sorted ascending. Degenerate levels are allowed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LevelSystem {
    pub label: String,
    levels: Vec<Scalar>,
}

impl LevelSystem {
    pub fn new(label: impl Into<String>, levels: Vec<Scalar>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::TooFewLevels(levels.len()));
        }
        if levels.windows(2).any(|w| w[0].raw_cmp(&w[1]).is_gt()) {
            return Err(Error::UnsortedLevels);
        }
        Ok(LevelSystem { label: label.into(), levels })
    }

    /// Two-level system with levels `0` and `gap`.
    pub fn qubit(gap: Scalar) -> Result<Self> {
        if !gap.is_positive() {
            return Err(Error::NonPositiveGap);
        }
        LevelSystem::new("qubit", vec![Scalar::zero(), gap])
    }

    /// `n` equidistant levels `0, gap, 2 gap, ...`.
    pub fn equidistant(n: usize, gap: Scalar) -> Result<Self> {
        if !gap.is_positive() {
            return Err(Error::NonPositiveGap);
        }
        let levels = (0..n).map(|j| &gap * &Scalar::int(j as i64)).collect();
        LevelSystem::new(format!("ladder{n}"), levels)
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[Scalar] {
        &self.levels
    }

    pub fn energy(&self, j: usize) -> &Scalar {
        &self.levels[j]
    }

    pub fn ground_energy(&self) -> &Scalar {
        &self.levels[0]
    }

    /// Number of levels tied with the ground energy.
    pub fn ground_degeneracy(&self) -> usize {
        self.levels.iter().take_while(|e| e.tol_eq(&self.levels[0])).count()
    }

    pub fn is_ground(&self, j: usize) -> bool {
        j < self.ground_degeneracy()
    }

    pub fn is_exact(&self) -> bool {
        self.levels.iter().all(Scalar::is_exact)
    }
}

/// Temperature in energy units (Boltzmann's constant is dropped).
///
/// `LogScale { unit, base }` is the temperature `unit / ln(base)`: an energy
/// of `k * unit` above the ground level then has Boltzmann factor `base^-k`,
/// which keeps states such as `T = E / ln 2` exactly rational.
#[derive(Clone, Debug)]
pub enum Temperature {
    Zero,
    Infinite,
    Finite(Scalar),
    LogScale { unit: BigRational, base: BigRational },
}

impl Temperature {
    pub fn finite(t: Scalar) -> Result<Self> {
        if !t.is_positive() {
            return Err(Error::NonPositiveTemperature);
        }
        Ok(Temperature::Finite(t))
    }

    pub fn log_scale(unit: BigRational, base: BigRational) -> Result<Self> {
        if !unit.is_positive() || base <= BigRational::one() {
            return Err(Error::NonPositiveTemperature);
        }
        Ok(Temperature::LogScale { unit, base })
    }

    /// `unit / ln(base)` for integer arguments.
    pub fn inverse_ln(unit: i64, base: i64) -> Result<Self> {
        Temperature::log_scale(BigRational::from_integer(unit.into()), BigRational::from_integer(base.into()))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Temperature::Finite(_) | Temperature::LogScale { .. })
    }

    /// The temperature as a scalar, `None` for `0` and `infinity`.
    pub fn value(&self) -> Option<Scalar> {
        match self {
            Temperature::Zero | Temperature::Infinite => None,
            Temperature::Finite(t) => Some(t.clone()),
            Temperature::LogScale { unit, base } => {
                let u = Real::from_rational(unit, DEFAULT_PRECISION);
                let b = Real::from_rational(base, DEFAULT_PRECISION).ln();
                Some(Scalar::Real(u.div(&b)))
            }
        }
    }

    /// `E / T` for a finite temperature.
    pub fn reduced_energy(&self, e: &Scalar) -> Option<Scalar> {
        match self {
            Temperature::Zero | Temperature::Infinite => None,
            Temperature::Finite(t) => Some(e / t),
            Temperature::LogScale { unit, base } => {
                if e.is_zero() {
                    return Some(Scalar::zero());
                }
                let p = e.precision().unwrap_or(DEFAULT_PRECISION);
                let ln_b = Real::from_rational(base, p).ln();
                Some(Scalar::Real(e.to_real(p).mul(&ln_b).div(&Real::from_rational(unit, p))))
            }
        }
    }

    /// Boltzmann factor `exp(-de / T)` for an energy `de` above the ground.
    fn boltzmann(&self, de: &Scalar) -> Scalar {
        if de.is_zero() {
            return Scalar::one();
        }
        match self {
            Temperature::LogScale { unit, base } => {
                if let Some(q) = de.as_exact() {
                    let k = q / unit;
                    if k.is_integer() {
                        if let Some(k) = k.to_integer().to_i32() {
                            return Scalar::Exact(num_traits::pow::Pow::pow(base, -k));
                        }
                    }
                }
                (-self.reduced_energy(de).expect("finite")).exp()
            }
            Temperature::Finite(t) => (-(de / t)).exp(),
            Temperature::Zero | Temperature::Infinite => unreachable!("handled by caller"),
        }
    }

    /// Parses `zero`, `infinite`, `c/lnK`, or any finite scalar literal.
    pub fn parse(s: &str, precision: usize) -> Result<Self> {
        let t = s.trim();
        match t {
            "zero" | "0" => return Ok(Temperature::Zero),
            "infinite" | "inf" | "infinity" => return Ok(Temperature::Infinite),
            _ => {}
        }
        if let Some((c, k)) = split_inverse_log(t) {
            return Temperature::log_scale(c, k);
        }
        Temperature::finite(Scalar::parse(t, precision)?)
    }

    /// Ratio `self / other` of two finite temperatures, exact when possible.
    pub fn ratio(&self, other: &Temperature) -> Option<Scalar> {
        match (self, other) {
            (Temperature::LogScale { unit: u1, base: b1 }, Temperature::LogScale { unit: u2, base: b2 }) if b1 == b2 => {
                Some(Scalar::Exact(u1 / u2))
            }
            (Temperature::LogScale { unit: u1, base: b1 }, Temperature::LogScale { unit: u2, base: b2 }) => {
                // (u1 / ln b1) / (u2 / ln b2); exact when b1, b2 are powers of a common integer.
                if let Some(r) = log_ratio(b2, b1) {
                    return Some(Scalar::Exact(u1 / u2 * r));
                }
                Some(self.value()? / other.value()?)
            }
            _ => Some(self.value()? / other.value()?),
        }
    }
}

/// Exact `ln a / ln b` when both are integer powers of one integer.
fn log_ratio(a: &BigRational, b: &BigRational) -> Option<BigRational> {
    if !a.is_integer() || !b.is_integer() {
        return None;
    }
    let (a, b) = (a.to_integer(), b.to_integer());
    let bound = a.clone().min(b.clone()).min(BigInt::from(1 << 16));
    let mut root = BigInt::from(2);
    while root <= bound {
        if let (Some(ea), Some(eb)) = (int_log(&a, &root), int_log(&b, &root)) {
            return Some(BigRational::new(ea.into(), eb.into()));
        }
        root += 1;
    }
    None
}

fn int_log(x: &BigInt, base: &BigInt) -> Option<u32> {
    let mut v = x.clone();
    let mut e = 0;
    while v > BigInt::one() {
        if (&v % base) != BigInt::zero() {
            return None;
        }
        v /= base;
        e += 1;
    }
    (e > 0).then_some(e)
}

impl fmt::Display for Temperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Temperature::Zero => write!(f, "zero"),
            Temperature::Infinite => write!(f, "infinite"),
            Temperature::Finite(t) => write!(f, "{t}"),
            Temperature::LogScale { unit, base } => {
                write!(f, "{}/ln{}", Scalar::Exact(unit.clone()), Scalar::Exact(base.clone()))
            }
        }
    }
}

impl Serialize for Temperature {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            Temperature::Zero => s.serialize_str("zero"),
            Temperature::Infinite => s.serialize_str("infinite"),
            t => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("finite", &t.to_string())?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Temperature {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Tag(String),
            Finite { finite: String, precision_bits: Option<usize> },
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Tag(s) if s == "zero" || s == "infinite" => Temperature::parse(&s, DEFAULT_PRECISION),
            Raw::Tag(s) => Err(Error::Schema(format!("unknown temperature tag `{s}`"))),
            Raw::Finite { finite, precision_bits } => {
                Temperature::parse(&finite, precision_bits.unwrap_or(DEFAULT_PRECISION))
            }
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

/// A level system paired with a temperature.
#[derive(Clone, Debug)]
pub struct ThermalState {
    system: LevelSystem,
    temperature: Temperature,
    probabilities: Vec<Scalar>,
    log_weights: Option<Vec<Scalar>>,
}

/// Materialized Gibbs distribution of one subsystem.
#[derive(Clone, Debug)]
pub struct Probabilities {
    pub values: Vec<Scalar>,
    /// `E_j / T` per level; `None` at `T = 0` and `T = infinity`.
    pub log_weights: Option<Vec<Scalar>>,
}

impl ThermalState {
    pub fn new(system: LevelSystem, temperature: Temperature) -> Self {
        let n = system.dim();
        let (probabilities, log_weights) = match &temperature {
            Temperature::Infinite => (vec![Scalar::ratio(1, n as i64); n], None),
            Temperature::Zero => {
                let g = system.ground_degeneracy();
                let p = (0..n).map(|j| if j < g { Scalar::ratio(1, g as i64) } else { Scalar::zero() }).collect();
                (p, None)
            }
            t => {
                let e0 = system.ground_energy().clone();
                let w: Vec<Scalar> = system.levels().iter().map(|e| t.boltzmann(&(e - &e0))).collect();
                let z: Scalar = w.iter().cloned().sum();
                let p = w.iter().map(|x| x / &z).collect();
                let q = system.levels().iter().map(|e| t.reduced_energy(e).expect("finite")).collect();
                (p, Some(q))
            }
        };
        ThermalState { system, temperature, probabilities, log_weights }
    }

    pub fn system(&self) -> &LevelSystem {
        &self.system
    }

    pub fn temperature(&self) -> &Temperature {
        &self.temperature
    }

    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    pub fn probability(&self, j: usize) -> &Scalar {
        &self.probabilities[j]
    }

    pub fn probabilities(&self) -> &[Scalar] {
        &self.probabilities
    }

    pub fn log_weight(&self, j: usize) -> Option<&Scalar> {
        self.log_weights.as_ref().map(|q| &q[j])
    }

    pub fn has_exact_probabilities(&self) -> bool {
        self.probabilities.iter().all(Scalar::is_exact)
    }

    /// Whether level `j` carries zero probability (a `T = 0` excited level).
    pub fn is_unpopulated(&self, j: usize) -> bool {
        matches!(self.temperature, Temperature::Zero) && !self.system.is_ground(j)
    }
}

/// The Gibbs distribution `exp(-E_j/T) / Z` of one subsystem.
pub fn gibbs_probabilities(state: &ThermalState) -> Probabilities {
    Probabilities { values: state.probabilities.clone(), log_weights: state.log_weights.clone() }
}

/// Parses a level list given as scalar literals.
pub fn parse_levels(levels: &[String], precision: usize) -> Result<Vec<Scalar>> {
    levels.iter().map(|s| Scalar::parse(s, precision)).collect()
}

/// Parses an exact rational, for schema fields that must be exact.
pub fn parse_exact(s: &str) -> Result<BigRational> {
    parse_rational(s).ok_or_else(|| Error::ScalarParse(s.to_string()))
}
