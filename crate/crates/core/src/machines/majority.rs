//! MAJORITY as the output bit of an optimal engine or refrigerator.
//!
//! Words are indexed with qubit 0 most significant, so the rightmost qubit
//! is bit 0 of the index. Because `sum_{w <= n} C(2n + 1, w) = 2^{2n}`, the
//! words of weight at most `n` fill exactly the suffix-0 half of `2n + 1` bits.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::engine::{optimal_engine, rank_orders};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::machines::oscillator::binomial;
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::thermal::Temperature;

#[derive(Clone, Debug, Serialize)]
pub struct MajorityReport {
    pub n: usize,
    pub qubits: usize,
    pub permutation: Permutation,
    /// `sum_{w <= n} C(2n + 1, w) == 2^{2n}`.
    pub counting_identity: bool,
    /// The engine sends every `|b, 0>` to a word of weight at most `n`.
    pub maps_onto_low_weight: bool,
    /// Output bit per input word: last bit of `U^-1 |b>` for the engine,
    /// last bit of `U |b>` for the refrigerator.
    pub output_bits: Vec<bool>,
    pub matches_majority: bool,
    /// Excited probability of the last qubit after the map.
    pub excited_probability: Option<Scalar>,
}

fn majority(b: usize, n: usize) -> bool {
    b.count_ones() as usize > n
}

fn counting_identity(n: usize) -> bool {
    (0..=n).map(|w| binomial(2 * n + 1, w)).sum::<u128>() == 1u128 << (2 * n)
}

fn check_width(n: usize) -> Result<usize> {
    if n > 7 {
        return Err(Error::Precondition(format!("n = {n} exceeds the 15-qubit limit")));
    }
    Ok(2 * n + 1)
}

/// `2n` qubits at `hot` and one cold qubit at `T = 0`, all of unit gap.
pub fn majority_engine(n: usize, hot: Temperature) -> Result<MajorityReport> {
    let qubits = check_width(n)?;
    let ens = Ensemble::equal_gap_qubits(2 * n, hot, 1, Temperature::Zero, Scalar::one())?;
    let permutation = optimal_engine(&ens).permutation;
    let inverse = permutation.inverse();
    let maps_onto_low_weight =
        (0..1usize << (2 * n)).all(|b| permutation.image(b << 1).count_ones() as usize <= n);
    let output_bits: Vec<bool> = (0..1usize << qubits).map(|b| inverse.image(b) & 1 == 1).collect();
    let matches_majority = output_bits.iter().enumerate().all(|(b, &o)| o == majority(b, n));
    Ok(MajorityReport {
        n,
        qubits,
        permutation,
        counting_identity: counting_identity(n),
        maps_onto_low_weight,
        output_bits,
        matches_majority,
        excited_probability: None,
    })
}

/// Permutation minimizing the last qubit's excited probability on `2n + 1`
/// unit-gap qubits at common temperature `t`.
pub fn refrigerator(n: usize, t: Temperature) -> Result<MajorityReport> {
    let qubits = check_width(n)?;
    if !t.is_finite() {
        return Err(Error::Precondition("refrigerator needs a finite temperature".into()));
    }
    let ens = Ensemble::equal_gap_qubits(qubits, t, 0, Temperature::Zero, Scalar::one())?;
    let (orders, _) = rank_orders(&ens);
    let dim = ens.dim();
    let targets = (0..dim).step_by(2).chain((1..dim).step_by(2));
    let mut images = vec![0; dim];
    for (&s, target) in orders.l_order.iter().zip(targets) {
        images[s] = target;
    }
    let permutation = Permutation::from_images(images)?;
    let output_bits: Vec<bool> = (0..dim).map(|b| permutation.image(b) & 1 == 1).collect();
    let matches_majority = output_bits.iter().enumerate().all(|(b, &o)| o == majority(b, n));
    let excited = (0..dim).filter(|&b| output_bits[b]).map(|b| ens.probability_at(b).clone()).sum();
    Ok(MajorityReport {
        n,
        qubits,
        permutation,
        counting_identity: counting_identity(n),
        maps_onto_low_weight: true,
        output_bits,
        matches_majority,
        excited_probability: Some(excited),
    })
}

/// `P(Bin(2n + 1, p) > n)` exactly.
pub fn majority_tail(n: usize, p: &BigRational) -> BigRational {
    let m = 2 * n + 1;
    let q = BigRational::one() - p;
    let mut acc = BigRational::zero();
    for w in n + 1..=m {
        let c = BigRational::from_integer(binomial(m, w).into());
        acc += c * num_traits::pow(p.clone(), w) * num_traits::pow(q.clone(), m - w);
    }
    acc
}

/// `log_k(2n + 1)`: gates of fan-in `k` need at least this depth for MAJORITY.
pub fn depth_lower_bound(n: usize, k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::Precondition("fan-in must be at least 2".into()));
    }
    Ok(((2 * n + 1) as f64).ln() / (k as f64).ln())
}
