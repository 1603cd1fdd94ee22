//! Composite systems: ordered products of thermal subsystems.
//!
//! Basis states are mixed-radix multi-indices with the first part most
//! significant, so ascending basis index is ascending lexicographic order.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::thermal::{LevelSystem, Temperature, ThermalState};

/// Log-weight `Q(s) = sum_i E_{s_i} / T_i` of a composite basis state.
#[derive(Clone, Debug, PartialEq)]
pub enum LogWeight {
    Finite(Scalar),
    /// Some `T = 0` part is excited above its ground manifold.
    ZeroProbability,
}

#[derive(Clone, Debug)]
pub struct Ensemble {
    parts: Vec<ThermalState>,
    dims: Vec<usize>,
    energies: Vec<Scalar>,
    probabilities: Vec<Scalar>,
}

impl Ensemble {
    pub fn new(parts: Vec<ThermalState>) -> Self {
        let dims: Vec<usize> = parts.iter().map(ThermalState::dim).collect();
        let total: usize = dims.iter().product();
        let mut energies = Vec::with_capacity(total);
        let mut probabilities = Vec::with_capacity(total);
        let mut idx = vec![0usize; dims.len()];
        for _ in 0..total {
            let mut e = Scalar::zero();
            let mut p = Scalar::one();
            for (part, &j) in parts.iter().zip(&idx) {
                e = e + part.system().energy(j);
                p = p * part.probability(j);
            }
            energies.push(e);
            probabilities.push(p);
            advance(&mut idx, &dims);
        }
        Ensemble { parts, dims, energies, probabilities }
    }

    /// `n_hot` qubits at `hot` followed by `n_cold` qubits at `cold`, all with gap `gap`.
    pub fn equal_gap_qubits(n_hot: usize, hot: Temperature, n_cold: usize, cold: Temperature, gap: Scalar) -> Result<Self> {
        let q = LevelSystem::qubit(gap)?;
        let mut parts = Vec::with_capacity(n_hot + n_cold);
        for i in 0..n_hot {
            let mut s = q.clone();
            s.label = format!("hot{i}");
            parts.push(ThermalState::new(s, hot.clone()));
        }
        for i in 0..n_cold {
            let mut s = q.clone();
            s.label = format!("cold{i}");
            parts.push(ThermalState::new(s, cold.clone()));
        }
        Ok(Ensemble::new(parts))
    }

    pub fn parts(&self) -> &[ThermalState] {
        &self.parts
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total dimension (product of part dimensions).
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn index(&self, s: &[usize]) -> Result<usize> {
        if s.len() != self.dims.len() || s.iter().zip(&self.dims).any(|(a, d)| a >= d) {
            return Err(Error::IndexOutOfRange { index: s.to_vec(), dims: self.dims.clone() });
        }
        Ok(s.iter().zip(&self.dims).fold(0, |acc, (a, d)| acc * d + a))
    }

    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = i % d;
            i /= d;
        }
        out
    }

    #[inline]
    pub fn energy_at(&self, i: usize) -> &Scalar {
        &self.energies[i]
    }

    #[inline]
    pub fn probability_at(&self, i: usize) -> &Scalar {
        &self.probabilities[i]
    }

    pub fn energies(&self) -> &[Scalar] {
        &self.energies
    }

    pub fn probabilities(&self) -> &[Scalar] {
        &self.probabilities
    }

    pub fn has_exact_probabilities(&self) -> bool {
        self.parts.iter().all(ThermalState::has_exact_probabilities)
    }

    pub fn has_exact_energies(&self) -> bool {
        self.parts.iter().all(|p| p.system().is_exact())
    }

    /// Whether `i` has zero probability because some `T = 0` part is excited.
    pub fn is_unpopulated(&self, i: usize) -> bool {
        let s = self.multi_index(i);
        self.parts.iter().zip(&s).any(|(p, &j)| p.is_unpopulated(j))
    }

    pub fn log_weight_at(&self, i: usize) -> LogWeight {
        let s = self.multi_index(i);
        let mut q = Scalar::zero();
        for (part, &j) in self.parts.iter().zip(&s) {
            match part.temperature() {
                Temperature::Zero if !part.system().is_ground(j) => return LogWeight::ZeroProbability,
                Temperature::Zero | Temperature::Infinite => {}
                _ => q = q + part.log_weight(j).expect("finite temperature part"),
            }
        }
        LogWeight::Finite(q)
    }

    /// Copy of this ensemble with every exact quantity rendered as a real.
    pub fn into_real_mode(&self, precision: usize) -> Result<Ensemble> {
        let parts = self
            .parts
            .iter()
            .map(|p| {
                let levels = p.system().levels().iter().cloned().map(|e| e.into_real_mode(precision)).collect();
                let sys = LevelSystem::new(p.system().label.clone(), levels)?;
                let t = match p.temperature() {
                    Temperature::Zero => Temperature::Zero,
                    Temperature::Infinite => Temperature::Infinite,
                    t => Temperature::Finite(t.value().expect("finite").into_real_mode(precision)),
                };
                Ok(ThermalState::new(sys, t))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Ensemble::new(parts))
    }
}

fn advance(idx: &mut [usize], dims: &[usize]) {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < dims[k] {
            return;
        }
        idx[k] = 0;
    }
}

/// Energy of the composite basis state `s`.
pub fn ensemble_energy(ens: &Ensemble, s: &[usize]) -> Result<Scalar> {
    Ok(ens.energy_at(ens.index(s)?).clone())
}

/// Log-weight of `s`, or [`LogWeight::ZeroProbability`].
pub fn ensemble_logweight(ens: &Ensemble, s: &[usize]) -> Result<LogWeight> {
    Ok(ens.log_weight_at(ens.index(s)?))
}

/// All basis states with nonzero probability, in ascending order.
pub fn enumerate_support(ens: &Ensemble) -> Vec<Vec<usize>> {
    (0..ens.dim()).filter(|&i| !ens.is_unpopulated(i)).map(|i| ens.multi_index(i)).collect()
}
