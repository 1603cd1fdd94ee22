//! Existence questions: when can a given pair of systems drive an engine?

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_PRECISION};
use crate::thermal::Temperature;

/// True iff `T_A / E_A > T_B / E_B`: the `10 <-> 01` swap extracts energy.
pub fn swap_engine_feasible(e_a: &Scalar, t_a: &Temperature, e_b: &Scalar, t_b: &Temperature) -> Result<bool> {
    if !e_a.is_positive() || !e_b.is_positive() {
        return Err(Error::NonPositiveGap);
    }
    Ok(match (t_a, t_b) {
        (Temperature::Zero, _) | (_, Temperature::Infinite) => false,
        (_, Temperature::Zero) | (Temperature::Infinite, _) => true,
        _ => {
            let ratio = t_a.ratio(t_b).expect("finite temperatures");
            ratio.gt(&(e_a / e_b))
        }
    })
}

/// Least `T_A / T_B` above which `n_a` hot and `n_b` cold equal-gap qubits
/// admit an engine: `(m + 1) / m` with `m = min(n_a - 1, n_b)`. `None` when
/// `m = 0`, where no ratio suffices.
pub fn gap_threshold(n_a: usize, n_b: usize) -> Result<Option<BigRational>> {
    if n_a == 0 || n_b == 0 {
        return Err(Error::Precondition("gap_threshold needs n_A >= 1 and n_B >= 1".into()));
    }
    let m = (n_a - 1).min(n_b);
    Ok((m > 0).then(|| BigRational::new(BigInt::from(m + 1), BigInt::from(m))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapWitness {
    /// Hot Hamming weight of the more probable, higher-energy state.
    pub hot_weight: usize,
    /// Cold Hamming weight of the state it is exchanged with.
    pub cold_weight: usize,
}

/// Whether some `a` in `1..=n_a`, `b` in `1..=n_b` has `a > b` and
/// `T_A / T_B > a / b`. The witness minimizes `a / b`, then `a`.
pub fn gap_engine_exists(n_a: usize, n_b: usize, ratio: &Scalar) -> Option<GapWitness> {
    let mut best: Option<(BigRational, usize, usize)> = None;
    for a in 1..=n_a {
        for b in 1..=n_b.min(a.saturating_sub(1)) {
            let q = BigRational::new(BigInt::from(a), BigInt::from(b));
            if !ratio.gt(&Scalar::Exact(q.clone())) {
                continue;
            }
            let better = match &best {
                None => true,
                Some((bq, ba, _)) => q < *bq || (q == *bq && a < *ba),
            };
            if better {
                best = Some((q, a, b));
            }
        }
    }
    best.map(|(_, a, b)| GapWitness { hot_weight: a, cold_weight: b })
}

/// Outcome of [`is_equilibrium`].
#[derive(Clone, Debug)]
pub enum Equilibrium {
    Thermal(Temperature),
    NotEquilibrium,
}

fn validate(p: &[Scalar], energies: &[Scalar]) -> Result<()> {
    if p.len() != energies.len() {
        return Err(Error::DimensionMismatch { expected: energies.len(), actual: p.len() });
    }
    if p.is_empty() {
        return Err(Error::InvalidDistribution("empty".into()));
    }
    if p.iter().any(Scalar::is_negative) {
        return Err(Error::InvalidDistribution("negative entry".into()));
    }
    let total: Scalar = p.iter().cloned().sum();
    if !total.tol_eq(&Scalar::one()) {
        return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
    }
    Ok(())
}

fn min_energy(energies: &[Scalar]) -> &Scalar {
    energies.iter().min_by(|a, b| a.raw_cmp(b)).expect("nonempty")
}

/// The temperature `T` with `p_j` proportional to `exp(-E_j / T)`, if any.
///
/// Exact inputs are decided exactly; the returned temperature is then a
/// [`Temperature::LogScale`]. Real inputs are decided up to tolerance.
pub fn is_equilibrium(p: &[Scalar], energies: &[Scalar]) -> Result<Equilibrium> {
    validate(p, energies)?;
    let n = p.len();
    let e0 = min_energy(energies);
    let ground: Vec<bool> = energies.iter().map(|e| e.tol_eq(e0)).collect();
    if p.iter().all(|x| x.tol_eq(&p[0])) {
        return Ok(Equilibrium::Thermal(Temperature::Infinite));
    }
    let g = ground.iter().filter(|&&b| b).count();
    let ground_uniform = (0..n).all(|j| if ground[j] { p[j].tol_eq(&Scalar::ratio(1, g as i64)) } else { p[j].is_zero() });
    if ground_uniform {
        return Ok(Equilibrium::Thermal(Temperature::Zero));
    }
    if p.iter().any(Scalar::is_zero) {
        return Ok(Equilibrium::NotEquilibrium);
    }
    let g0 = ground.iter().position(|&b| b).expect("minimum exists");
    let Some(r) = ground.iter().position(|&b| !b) else {
        // All levels degenerate and p is not uniform.
        return Ok(Equilibrium::NotEquilibrium);
    };
    let exact = p.iter().chain(energies).all(Scalar::is_exact);
    if exact {
        let q = |s: &Scalar| s.as_exact().expect("exact").clone();
        let unit = q(&energies[r]) - q(e0);
        let base = q(&p[g0]) / q(&p[r]);
        if base <= BigRational::one() {
            return Ok(Equilibrium::NotEquilibrium);
        }
        for j in 0..n {
            // Need p0 / pj = base^x with x = (E_j - E_0) / unit = num / den.
            let x = (q(&energies[j]) - q(e0)) / &unit;
            let lhs = q(&p[g0]) / q(&p[j]);
            let (Some(num), Some(den)) = (x.numer().to_u32(), x.denom().to_u32()) else {
                return Err(Error::Precondition("energy ratios too large for exact check".into()));
            };
            let ok = Pow::pow(&lhs, den) == Pow::pow(&base, num);
            if !ok {
                return Ok(Equilibrium::NotEquilibrium);
            }
        }
        return Ok(Equilibrium::Thermal(Temperature::log_scale(unit, base)?));
    }
    let prec = p.iter().chain(energies).filter_map(Scalar::precision).min().unwrap_or(DEFAULT_PRECISION);
    let ln = |s: &Scalar| s.to_real(prec).ln();
    let t = energies[r].to_real(prec).sub(&e0.to_real(prec)).div(&ln(&p[g0]).sub(&ln(&p[r])));
    if !Scalar::Real(t.clone()).is_positive() {
        return Ok(Equilibrium::NotEquilibrium);
    }
    for j in 0..n {
        let predicted = energies[j].to_real(prec).sub(&e0.to_real(prec)).div(&t);
        let actual = ln(&p[g0]).sub(&ln(&p[j]));
        if !Scalar::Real(predicted).tol_eq(&Scalar::Real(actual)) {
            return Ok(Equilibrium::NotEquilibrium);
        }
    }
    Ok(Equilibrium::Thermal(Temperature::Finite(Scalar::Real(t))))
}

/// Per-level multiplicities of a basis state of `n` identical copies.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct OccupationVector {
    pub counts: Vec<u32>,
}

impl OccupationVector {
    pub fn n(&self) -> u32 {
        self.counts.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CopiesResult {
    /// `first` has more energy and more probability than `second`.
    Found { n: u32, first: OccupationVector, second: OccupationVector },
    NoneUpTo(u32),
}

pub const DEFAULT_COPIES_N_MAX: u32 = 12;

/// All compositions of `n` into `d` nonnegative parts, in lexicographic order.
pub fn compositions(n: u32, d: usize) -> Vec<Vec<u32>> {
    fn rec(rest: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if slots == 1 {
            cur.push(rest);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for k in 0..=rest {
            cur.push(k);
            rec(rest - k, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(n, d, &mut Vec::with_capacity(d), &mut out);
    }
    out
}

/// Probability weight of an occupation: the exact product in rational mode,
/// otherwise the log-probability with `None` for zero.
#[derive(Clone, Debug)]
enum Weight {
    Exact(Scalar),
    Log(Option<Scalar>),
}

impl Weight {
    fn gt(&self, o: &Weight) -> bool {
        match (self, o) {
            (Weight::Exact(a), Weight::Exact(b)) => a.gt(b),
            (Weight::Log(Some(a)), Weight::Log(Some(b))) => a.gt(b),
            (Weight::Log(Some(_)), Weight::Log(None)) => true,
            _ => false,
        }
    }
}

/// Smallest `n <= n_max` for which `rho^{(x) n}` has a pair of basis states
/// where the more energetic one is also the more probable one.
///
/// The first state of the witness is the lexicographically least one that
/// admits a partner; the partner is the lexicographically least among those.
pub fn copies_witness(p: &[Scalar], energies: &[Scalar], n_max: u32) -> Result<CopiesResult> {
    validate(p, energies)?;
    let e0 = min_energy(energies);
    let all_ground = p.iter().zip(energies).all(|(x, e)| x.is_zero() || e.tol_eq(e0));
    if all_ground {
        return Err(Error::AllGround);
    }
    // Gibbs states are passive for every n.
    if matches!(is_equilibrium(p, energies)?, Equilibrium::Thermal(_)) {
        return Ok(CopiesResult::NoneUpTo(n_max));
    }
    let exact = p.iter().all(Scalar::is_exact);
    let prec = p.iter().filter_map(Scalar::precision).min().unwrap_or(DEFAULT_PRECISION);
    let logs: Vec<Option<Scalar>> = p.iter().map(|x| (!x.is_zero()).then(|| x.clone().into_real_mode(prec).ln())).collect();
    let d = p.len();
    for n in 1..=n_max {
        let comps = compositions(n, d);
        let energy: Vec<Scalar> = comps
            .iter()
            .map(|l| l.iter().zip(energies).map(|(&c, e)| e * &Scalar::int(c as i64)).sum())
            .collect();
        let weight: Vec<Weight> = comps
            .iter()
            .map(|l| {
                if exact {
                    Weight::Exact(l.iter().zip(p).map(|(&c, x)| x.powi(c as i32)).fold(Scalar::one(), |a, b| a * b))
                } else {
                    let mut acc = Some(Scalar::zero());
                    for (&c, lg) in l.iter().zip(&logs) {
                        if c == 0 {
                            continue;
                        }
                        acc = match (acc, lg) {
                            (Some(a), Some(lg)) => Some(a + lg * &Scalar::int(c as i64)),
                            _ => None,
                        };
                    }
                    Weight::Log(acc)
                }
            })
            .collect();
        // Energy-ascending order with, for each position, the least-weight
        // state among strictly lower energies.
        let mut by_energy: Vec<usize> = (0..comps.len()).collect();
        by_energy.sort_by(|&a, &b| energy[a].raw_cmp(&energy[b]).then(a.cmp(&b)));
        let mut rank = vec![0usize; comps.len()];
        for (r, &i) in by_energy.iter().enumerate() {
            rank[i] = r;
        }
        let mut min_below: Vec<Option<usize>> = vec![None; comps.len()];
        let mut running: Option<usize> = None;
        let mut block_start = 0;
        for r in 0..by_energy.len() {
            if r > 0 && !energy[by_energy[r]].tol_eq(&energy[by_energy[r - 1]]) {
                for &j in &by_energy[block_start..r] {
                    if running.is_none_or(|m| weight[m].gt(&weight[j])) {
                        running = Some(j);
                    }
                }
                block_start = r;
            }
            min_below[r] = running;
        }
        for (i, l) in comps.iter().enumerate() {
            let Some(m) = min_below[rank[i]] else { continue };
            if !weight[i].gt(&weight[m]) {
                continue;
            }
            let partner = (0..comps.len())
                .find(|&j| energy[i].gt(&energy[j]) && weight[i].gt(&weight[j]))
                .expect("least-weight partner exists");
            return Ok(CopiesResult::Found {
                n,
                first: OccupationVector { counts: l.clone() },
                second: OccupationVector { counts: comps[partner].clone() },
            });
        }
    }
    Ok(CopiesResult::NoneUpTo(n_max))
}
