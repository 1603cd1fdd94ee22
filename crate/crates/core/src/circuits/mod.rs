//! Reversible NOT/CNOT/Toffoli circuits acting on bit strings.
//!
//! Wire `0` is the leftmost bit of a word, i.e. the most significant bit of
//! its basis index, matching [`Ensemble`] indexing with part 0 first.

mod affine;
mod search;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use affine::{affine_closure_check, majority_truth_table, toffoli_weight_invariance_check, xor_triple_violation, AffineCheck};
pub use search::{search_min_circuit, GateSet, LengthStats, SearchOptions, SearchResult};

use crate::engine::energy_gain;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalar::Scalar;

/// A gate on 0-based wires.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gate {
    Not(usize),
    Cnot { control: usize, target: usize },
    Toffoli { c1: usize, c2: usize, target: usize },
}

impl Gate {
    pub fn target(&self) -> usize {
        match *self {
            Gate::Not(t) | Gate::Cnot { target: t, .. } | Gate::Toffoli { target: t, .. } => t,
        }
    }

    pub fn controls(&self) -> Vec<usize> {
        match *self {
            Gate::Not(_) => vec![],
            Gate::Cnot { control, .. } => vec![control],
            Gate::Toffoli { c1, c2, .. } => vec![c1, c2],
        }
    }

    pub fn wires(&self) -> Vec<usize> {
        let mut w = self.controls();
        w.push(self.target());
        w
    }

    pub fn validate(&self, width: usize) -> Result<()> {
        let w = self.wires();
        if w.iter().any(|&x| x >= width) {
            return Err(Error::MalformedGate(format!("{self} exceeds width {width}")));
        }
        if (0..w.len()).any(|i| w[i + 1..].contains(&w[i])) {
            return Err(Error::MalformedGate(format!("{self} repeats a wire")));
        }
        Ok(())
    }

    /// Applies the gate to a `width`-bit word.
    #[inline]
    pub fn apply(&self, x: usize, width: usize) -> usize {
        let bit = |w: usize| 1usize << (width - 1 - w);
        match *self {
            Gate::Not(t) => x ^ bit(t),
            Gate::Cnot { control, target } => {
                if x & bit(control) != 0 {
                    x ^ bit(target)
                } else {
                    x
                }
            }
            Gate::Toffoli { c1, c2, target } => {
                let m = bit(c1) | bit(c2);
                if x & m == m {
                    x ^ bit(target)
                } else {
                    x
                }
            }
        }
    }

    /// Two gates commute when neither target is a control of the other.
    pub fn commutes_with(&self, o: &Gate) -> bool {
        !o.controls().contains(&self.target()) && !self.controls().contains(&o.target())
    }

    pub fn is_toffoli(&self) -> bool {
        matches!(self, Gate::Toffoli { .. })
    }
}

impl fmt::Display for Gate {
    /// Text form with 1-based wires.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Not(t) => write!(f, "NOT {}", t + 1),
            Gate::Cnot { control, target } => write!(f, "CNOT {} {}", control + 1, target + 1),
            Gate::Toffoli { c1, c2, target } => write!(f, "TOFFOLI {} {} {}", c1 + 1, c2 + 1, target + 1),
        }
    }
}

impl FromStr for Gate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Gate> {
        let mut it = s.split_whitespace();
        let name = it.next().ok_or_else(|| Error::MalformedGate("empty gate".into()))?;
        let wires: Vec<usize> = it
            .map(|w| match w.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(Error::MalformedGate(format!("bad wire `{w}`"))),
            })
            .collect::<Result<_>>()?;
        let g = match (name.to_ascii_uppercase().as_str(), wires.as_slice()) {
            ("NOT", &[t]) => Gate::Not(t),
            ("CNOT", &[c, t]) => Gate::Cnot { control: c, target: t },
            ("TOFFOLI", &[a, b, t]) => Gate::Toffoli { c1: a, c2: b, target: t },
            _ => return Err(Error::MalformedGate(s.trim().to_string())),
        };
        Ok(g)
    }
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A gate sequence on `width` wires; the first `hot` wires are the hot part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub width: usize,
    #[serde(default)]
    pub hot: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(width: usize, hot: usize, gates: Vec<Gate>) -> Result<Self> {
        if width == 0 || width > 24 {
            return Err(Error::Precondition(format!("circuit width {width} outside 1..=24")));
        }
        if hot > width {
            return Err(Error::Precondition(format!("hot wire count {hot} exceeds width {width}")));
        }
        for g in &gates {
            g.validate(width)?;
        }
        Ok(Circuit { width, hot, gates })
    }

    /// Parses one gate per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, width: usize, hot: usize) -> Result<Self> {
        let mut gates = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let g: Gate = line.parse().map_err(|e: Error| Error::CircuitParse { line: i + 1, message: e.to_string() })?;
            g.validate(width).map_err(|e| Error::CircuitParse { line: i + 1, message: e.to_string() })?;
            gates.push(g);
        }
        Circuit::new(width, hot, gates)
    }

    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    /// This circuit followed by `other`.
    pub fn concat(&self, other: &Circuit) -> Circuit {
        let mut gates = self.gates.clone();
        gates.extend_from_slice(&other.gates);
        Circuit { width: self.width, hot: self.hot, gates }
    }

    pub fn reversed(&self) -> Circuit {
        Circuit { width: self.width, hot: self.hot, gates: self.gates.iter().rev().copied().collect() }
    }

    pub fn apply(&self, x: usize) -> usize {
        self.gates.iter().fold(x, |acc, g| g.apply(acc, self.width))
    }
}

/// The permutation of `{0,1}^width` induced by the gates applied left to right.
pub fn simulate(c: &Circuit) -> Permutation {
    let map = (0..1usize << c.width).map(|x| c.apply(x)).collect();
    Permutation::from_images(map).expect("reversible gates compose to a bijection")
}

/// Energy gain of the circuit's permutation on a qubit ensemble of matching width.
pub fn circuit_gain(c: &Circuit, ens: &Ensemble) -> Result<Scalar> {
    if ens.dims().len() != c.width || ens.dims().iter().any(|&d| d != 2) {
        return Err(Error::DimensionMismatch { expected: c.width, actual: ens.dims().len() });
    }
    energy_gain(ens, simulate(c).images())
}

/// Every gate of the given kinds on `width` wires, in canonical order: NOT,
/// then CNOT, then Toffoli; each by target, then controls ascending.
pub fn all_gates(width: usize, set: GateSet) -> Vec<Gate> {
    let mut out = Vec::new();
    if set == GateSet::All {
        out.extend((0..width).map(Gate::Not));
        for target in 0..width {
            for control in (0..width).filter(|&c| c != target) {
                out.push(Gate::Cnot { control, target });
            }
        }
    }
    for target in 0..width {
        for c1 in 0..width {
            for c2 in c1 + 1..width {
                if c1 != target && c2 != target {
                    out.push(Gate::Toffoli { c1, c2, target });
                }
            }
        }
    }
    out
}

/// The circuits printed with the engines on three- and four-wire registers.
pub mod examples {
    use super::*;

    fn gates(text: &str) -> Vec<Gate> {
        text.split(';').map(|g| g.parse().expect("literal gate")).collect()
    }

    /// Three wires (2 hot, 1 cold): exchanges `110` and `001`.
    pub fn fig2() -> Circuit {
        Circuit::new(3, 2, gates("CNOT 3 2;CNOT 3 1;TOFFOLI 1 2 3;CNOT 3 1;CNOT 3 2")).expect("valid")
    }

    /// Three hot wires and one cold wire, Toffoli gates only.
    pub fn fig4_left() -> Circuit {
        Circuit::new(4, 3, gates("TOFFOLI 1 2 4;TOFFOLI 2 4 1;TOFFOLI 3 4 2")).expect("valid")
    }

    /// Three hot wires and one cold wire, for a warm cold bath.
    pub fn fig4_right() -> Circuit {
        Circuit::new(4, 3, gates("TOFFOLI 1 2 4;TOFFOLI 1 4 2;TOFFOLI 3 4 1;TOFFOLI 1 2 4")).expect("valid")
    }
}
