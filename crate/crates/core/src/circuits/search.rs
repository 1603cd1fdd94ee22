//! Breadth-first search for the shortest gate sequence with positive gain.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{all_gates, Circuit, Gate};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GateSet {
    #[default]
    Toffoli,
    All,
}

pub type ProgressFn = Arc<dyn Fn(usize, usize) + Send + Sync>;

#[derive(Clone)]
pub struct SearchOptions {
    pub gate_set: GateSet,
    pub max_gates: usize,
    /// Upper bound on stored distinct permutations; exceeding it yields a partial result.
    pub max_states: Option<usize>,
    pub cancel: Option<Arc<AtomicBool>>,
    /// Called with `(completed length, distinct permutations at that length)`.
    pub progress: Option<ProgressFn>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { gate_set: GateSet::Toffoli, max_gates: 5, max_states: None, cancel: None, progress: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LengthStats {
    pub length: usize,
    /// Permutations whose shortest circuit has exactly this length. Not
    /// deduplicated at the final length.
    pub new_permutations: u64,
    pub best_gain: Scalar,
    /// Lexicographically least circuit of this length attaining `best_gain`.
    pub witness: Circuit,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    /// Least length with strictly positive gain, if any up to `max_gates`.
    pub min_gates: Option<usize>,
    pub best_gain: Option<Scalar>,
    pub witness: Option<Circuit>,
    pub per_length: Vec<LengthStats>,
    pub examined: u64,
    pub pruned_canonical: u64,
    pub memo_hits: u64,
    pub partial: bool,
}

struct Node {
    perm: Box<[u8]>,
    parent: u32,
    gate: u8,
    /// Last gates of the canonical shortest words reaching `perm`.
    mask: u128,
}

/// Common-denominator integer numerators of exact values.
fn scaled(values: &[Scalar]) -> Result<Vec<i128>> {
    let exact: Vec<&BigRational> = values
        .iter()
        .map(|v| v.as_exact().ok_or_else(|| Error::Precondition("circuit search needs exact probabilities and energies".into())))
        .collect::<Result<_>>()?;
    let lcm = exact.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    exact
        .iter()
        .map(|q| (q.numer() * (&lcm / q.denom())).to_i128().ok_or_else(|| Error::Precondition("values too large to scale".into())))
        .collect()
}

struct GainEval {
    p: Vec<i128>,
    e: Vec<i128>,
    before: i128,
    scale: BigRational,
}

impl GainEval {
    fn new(ens: &Ensemble) -> Result<Self> {
        let p = scaled(ens.probabilities())?;
        let e = scaled(ens.energies())?;
        let pmax = p.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        let emax = e.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0);
        if pmax.checked_mul(emax).and_then(|v| v.checked_mul(4 * p.len() as u128)).is_none_or(|v| v > i128::MAX as u128) {
            return Err(Error::Precondition("scaled gain would overflow".into()));
        }
        let before = p.iter().zip(&e).map(|(a, b)| a * b).sum();
        let pd = ens.probabilities().iter().fold(BigInt::one(), |acc, q| acc.lcm(q.as_exact().expect("exact").denom()));
        let ed = ens.energies().iter().fold(BigInt::one(), |acc, q| acc.lcm(q.as_exact().expect("exact").denom()));
        Ok(GainEval { p, e, before, scale: BigRational::new(BigInt::one(), pd * ed) })
    }

    #[inline]
    fn gain(&self, perm: &[u8]) -> i128 {
        let after: i128 = perm.iter().enumerate().map(|(s, &t)| self.p[s] * self.e[t as usize]).sum();
        self.before - after
    }

    fn to_scalar(&self, g: i128) -> Scalar {
        Scalar::Exact(BigRational::from_integer(BigInt::from(g)) * &self.scale)
    }
}

fn apply_gate(perm: &[u8], g: &Gate, width: usize) -> Box<[u8]> {
    perm.iter().map(|&x| g.apply(x as usize, width) as u8).collect()
}

fn word(layers: &[Vec<Node>], depth: usize, mut idx: u32, gates: &[Gate]) -> Vec<Gate> {
    let mut out = Vec::with_capacity(depth);
    for d in (1..=depth).rev() {
        let n = &layers[d][idx as usize];
        out.push(gates[n.gate as usize]);
        idx = n.parent;
    }
    out.reverse();
    out
}

/// Exhaustive search over circuits of up to `max_gates` gates acting on the
/// qubits of `ens`, reporting the shortest length with positive gain.
///
/// Distinct permutations are memoized with the set of last gates over their
/// canonical shortest words; a gate is appended only when it neither repeats
/// nor precedes, in gate order, a commuting last gate. Results do not depend
/// on thread count.
pub fn search_min_circuit(ens: &Ensemble, opts: &SearchOptions) -> Result<SearchResult> {
    let width = ens.dims().len();
    if ens.dims().iter().any(|&d| d != 2) {
        return Err(Error::Precondition("circuit search needs a qubit ensemble".into()));
    }
    if width > 8 {
        return Err(Error::Precondition(format!("width {width} exceeds the search limit of 8")));
    }
    let gates = all_gates(width, opts.gate_set);
    if gates.len() > 128 {
        return Err(Error::Precondition(format!("{} gates exceed the search limit of 128", gates.len())));
    }
    let eval = GainEval::new(ens)?;
    let t0 = ens.parts()[0].temperature().to_string();
    let hot = ens.parts().iter().take_while(|p| p.temperature().to_string() == t0).count();
    let hot = if hot == width { 0 } else { hot };
    let blockers: Vec<u128> = (0..gates.len())
        .map(|h| {
            (0..gates.len())
                .filter(|&g| g == h || (h < g && gates[g].commutes_with(&gates[h])))
                .fold(0u128, |m, g| m | (1 << g))
        })
        .collect();
    let allowed = |mask: u128, h: usize| mask == 0 || mask & !blockers[h] != 0;
    let cancelled = || opts.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed));

    let identity: Box<[u8]> = (0..1usize << width).map(|x| x as u8).collect();
    let mut seen: HashMap<Box<[u8]>, (u8, u32)> = HashMap::new();
    seen.insert(identity.clone(), (0, 0));
    let mut layers: Vec<Vec<Node>> = vec![vec![Node { perm: identity, parent: 0, gate: 0, mask: 0 }]];
    let mut res = SearchResult {
        min_gates: None,
        best_gain: None,
        witness: None,
        per_length: Vec::new(),
        examined: 0,
        pruned_canonical: 0,
        memo_hits: 0,
        partial: false,
    };

    for depth in 1..=opts.max_gates {
        if cancelled() {
            res.partial = true;
            break;
        }
        let frontier = &layers[depth - 1];
        let last = depth == opts.max_gates;
        // Per parent: (gain, gate) of the best new child, candidates, and counters.
        type Expansion = (Option<(i128, u8)>, Vec<(Box<[u8]>, u8)>, u64, u64, u64);
        let expansions: Vec<Expansion> = frontier
            .par_iter()
            .map(|node| {
                let mut best: Option<(i128, u8)> = None;
                let mut cands = Vec::new();
                let (mut examined, mut pruned, mut hits) = (0u64, 0u64, 0u64);
                for (h, g) in gates.iter().enumerate() {
                    if !allowed(node.mask, h) {
                        pruned += 1;
                        continue;
                    }
                    let p = apply_gate(&node.perm, g, width);
                    examined += 1;
                    if seen.get(&p).is_some_and(|&(d, _)| (d as usize) < depth) {
                        hits += 1;
                        continue;
                    }
                    let gain = eval.gain(&p);
                    if best.is_none_or(|(b, _)| gain > b) {
                        best = Some((gain, h as u8));
                    }
                    if !last {
                        cands.push((p, h as u8));
                    }
                }
                (best, cands, examined, pruned, hits)
            })
            .collect();

        let mut layer_best: Option<(i128, u32, u8)> = None;
        let mut next: Vec<Node> = Vec::new();
        let mut new_count = 0u64;
        for (parent, (best, cands, examined, pruned, hits)) in expansions.into_iter().enumerate() {
            res.examined += examined;
            res.pruned_canonical += pruned;
            res.memo_hits += hits;
            if let Some((g, h)) = best {
                if layer_best.is_none_or(|(b, _, _)| g > b) {
                    layer_best = Some((g, parent as u32, h));
                }
            }
            if last {
                new_count += examined - hits;
                continue;
            }
            for (p, h) in cands {
                match seen.get(&p) {
                    Some(&(d, idx)) if d as usize == depth => {
                        next[idx as usize].mask |= 1 << h;
                    }
                    Some(_) => unreachable!("earlier layers filtered during expansion"),
                    None => {
                        seen.insert(p.clone(), (depth as u8, next.len() as u32));
                        next.push(Node { perm: p, parent: parent as u32, gate: h, mask: 1 << h });
                    }
                }
            }
        }
        if !last {
            new_count = next.len() as u64;
            layers.push(next);
        }
        let Some((g, parent, h)) = layer_best else {
            // Nothing new at this length; longer circuits add nothing either.
            if !last {
                layers.pop();
            }
            break;
        };
        let mut w = word(&layers, depth - 1, parent, &gates);
        w.push(gates[h as usize]);
        let witness = Circuit { width, hot, gates: w };
        let gain = eval.to_scalar(g);
        if g > 0 && res.min_gates.is_none() {
            res.min_gates = Some(depth);
            res.best_gain = Some(gain.clone());
            res.witness = Some(witness.clone());
        }
        res.per_length.push(LengthStats { length: depth, new_permutations: new_count, best_gain: gain, witness });
        if let Some(cb) = &opts.progress {
            cb(depth, new_count as usize);
        }
        if opts.max_states.is_some_and(|m| seen.len() > m) && !last {
            res.partial = true;
            break;
        }
    }
    Ok(res)
}
