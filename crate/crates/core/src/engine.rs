//! Optimal engines: pair the i-th most probable state with the i-th
//! lowest-energy state.

use std::cmp::Ordering;

use serde::Serialize;
use serde_json::{json, Value};

use crate::ensemble::{Ensemble, LogWeight};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalar::Scalar;

/// Which of the two orders a degenerate block was found in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Energy,
    Probability,
}

/// A maximal run of states that compare equal in one order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TieBlock {
    pub order: OrderKind,
    /// Members in ascending index order, which is the tie-break.
    pub members: Vec<usize>,
    /// Equal only up to the real-mode tolerance.
    pub within_tolerance: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankOrders {
    /// Indices by ascending energy.
    pub k_order: Vec<usize>,
    /// Indices by descending probability; zero-probability states last.
    pub l_order: Vec<usize>,
    /// Number of zero-probability states at the tail of `l_order`.
    pub unpopulated: usize,
}

#[derive(Clone, Debug)]
pub struct EngineReport {
    pub permutation: Permutation,
    pub orders: RankOrders,
    pub energy_before: Scalar,
    pub energy_after: Scalar,
    pub gain: Scalar,
    pub tie_flags: Vec<TieBlock>,
}

/// Sort keys for the probability order: smaller key means more probable,
/// `None` means zero probability.
pub fn probability_keys(ens: &Ensemble) -> Vec<Option<Scalar>> {
    if ens.has_exact_probabilities() {
        return ens.probabilities().iter().map(|p| (!p.is_zero()).then(|| -p)).collect();
    }
    (0..ens.dim())
        .map(|i| match ens.log_weight_at(i) {
            LogWeight::Finite(q) => Some(q),
            LogWeight::ZeroProbability => None,
        })
        .collect()
}

/// Sorts `0..keys.len()` ascending by key with `None` last, then reorders
/// each block of tied keys by index.
fn rank(keys: &[Option<Scalar>], kind: OrderKind, ties: &mut Vec<TieBlock>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&a, &b| match (&keys[a], &keys[b]) {
        (Some(x), Some(y)) => x.raw_cmp(y).then(a.cmp(&b)),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => a.cmp(&b),
    });
    let mut start = 0;
    while start < order.len() {
        if keys[order[start]].is_none() {
            break;
        }
        let mut end = start + 1;
        let mut tolerance = false;
        while end < order.len() {
            let Some(next) = &keys[order[end]] else { break };
            // Blocks are chained through adjacent members.
            let prev = keys[order[end - 1]].as_ref().expect("populated");
            let c = prev.compare(next);
            if c.ordering != Ordering::Equal {
                break;
            }
            tolerance |= c.within_tolerance;
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_unstable();
            ties.push(TieBlock { order: kind, members: order[start..end].to_vec(), within_tolerance: tolerance });
        }
        start = end;
    }
    order
}

/// Energy-ascending and probability-descending orders with the index tie-break.
pub fn rank_orders(ens: &Ensemble) -> (RankOrders, Vec<TieBlock>) {
    let mut ties = Vec::new();
    let energy_keys: Vec<Option<Scalar>> = ens.energies().iter().cloned().map(Some).collect();
    let k_order = rank(&energy_keys, OrderKind::Energy, &mut ties);
    let pk = probability_keys(ens);
    let unpopulated = pk.iter().filter(|k| k.is_none()).count();
    let l_order = rank(&pk, OrderKind::Probability, &mut ties);
    (RankOrders { k_order, l_order, unpopulated }, ties)
}

/// The gain-maximizing permutation engine.
pub fn optimal_engine(ens: &Ensemble) -> EngineReport {
    let (orders, tie_flags) = rank_orders(ens);
    let mut map = vec![0; ens.dim()];
    for (&src, &dst) in orders.l_order.iter().zip(&orders.k_order) {
        map[src] = dst;
    }
    let permutation = Permutation::from_images(map).expect("rank orders are permutations");
    let (energy_before, energy_after) = energies_before_after(ens, &permutation);
    let gain = &energy_before - &energy_after;
    EngineReport { permutation, orders, energy_before, energy_after, gain, tie_flags }
}

fn energies_before_after(ens: &Ensemble, pi: &Permutation) -> (Scalar, Scalar) {
    let mut before = Scalar::zero();
    let mut after = Scalar::zero();
    for s in 0..ens.dim() {
        let p = ens.probability_at(s);
        if p.is_zero() {
            continue;
        }
        before = before + p * ens.energy_at(s);
        after = after + p * ens.energy_at(pi.image(s));
    }
    (before, after)
}

/// `sum_s p(s) E(s) - sum_s p(s) E(pi(s))`; positive means energy is extracted.
pub fn energy_gain(ens: &Ensemble, images: &[usize]) -> Result<Scalar> {
    if images.len() != ens.dim() {
        return Err(Error::DimensionMismatch { expected: ens.dim(), actual: images.len() });
    }
    let pi = Permutation::from_images(images.to_vec())?;
    let (before, after) = energies_before_after(ens, &pi);
    Ok(before - after)
}

impl EngineReport {
    /// Per-state rows: index, multi-index, energy, log-weight, probability, image.
    pub fn state_table(&self, ens: &Ensemble) -> Vec<Value> {
        (0..ens.dim())
            .map(|i| {
                let q = match ens.log_weight_at(i) {
                    LogWeight::Finite(q) => Value::String(q.to_string()),
                    LogWeight::ZeroProbability => Value::String("zero-probability".into()),
                };
                json!({
                    "index": i,
                    "state": ens.multi_index(i),
                    "energy": ens.energy_at(i).to_string(),
                    "q": q,
                    "probability": ens.probability_at(i).to_string(),
                    "image": self.permutation.image(i),
                })
            })
            .collect()
    }

    pub fn to_json(&self, ens: &Ensemble) -> Value {
        json!({
            "permutation": self.permutation.images(),
            "energy_before": self.energy_before.to_string(),
            "energy_after": self.energy_after.to_string(),
            "gain": self.gain.to_string(),
            "exact": self.gain.is_exact(),
            "tie_flags": self.tie_flags,
            "states": self.state_table(ens),
        })
    }
}
