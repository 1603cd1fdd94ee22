//! KNAPSACK decided by one optimal engine.
//!
//! A hot qubit of gap `E_A` at `T_A` meets `n` cold qubits of gaps `E_j` at
//! `T_B`. With `theta = E_A T_B / T_A`, the states `|0, c>` with
//! `(c|E) < theta` are exactly the ones more probable than `|1, 0...0>`, so
//! the engine sends `|1, 0...0>` to the lowest-energy state outside that
//! set. Its cold word lies in `(theta, E_A)` iff any word does.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::engine::{optimal_engine, OrderKind};
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::scalar::{rational_text, rational_text_vec, Scalar};
use crate::thermal::{LevelSystem, Temperature, ThermalState};

pub const MAX_ITEMS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnapsackInstance {
    #[serde(with = "rational_text")]
    pub e_a: BigRational,
    #[serde(with = "rational_text_vec")]
    pub gaps: Vec<BigRational>,
    #[serde(with = "rational_text")]
    pub t_a: BigRational,
    #[serde(with = "rational_text")]
    pub t_b: BigRational,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KnapsackReport {
    #[serde(with = "rational_text")]
    pub threshold: BigRational,
    /// Cold word of the image of `|1, 0...0>`.
    pub image_word: Vec<bool>,
    #[serde(with = "rational_text")]
    pub image_sum: BigRational,
    /// `image_word` when it satisfies `E_A > (b|E) > theta`.
    pub witness: Option<Vec<bool>>,
    /// First word in index order found by exhaustive search.
    pub oracle_witness: Option<Vec<bool>>,
    pub agrees: bool,
    /// Energy tie blocks resolved by index order.
    pub energy_ties: usize,
}

fn word(bits: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| (bits >> (n - 1 - j)) & 1 == 1).collect()
}

fn weight(b: &[bool], gaps: &[BigRational]) -> BigRational {
    b.iter().zip(gaps).filter(|(x, _)| **x).map(|(_, e)| e.clone()).sum()
}

impl KnapsackInstance {
    pub fn new(e_a: BigRational, gaps: Vec<BigRational>, t_a: BigRational, t_b: BigRational) -> Result<Self> {
        let zero = BigRational::zero();
        if e_a <= zero || gaps.iter().any(|g| g <= &zero) {
            return Err(Error::NonPositiveGap);
        }
        if t_a <= zero || t_b <= zero {
            return Err(Error::NonPositiveTemperature);
        }
        if t_a <= t_b {
            return Err(Error::Precondition("T_A must exceed T_B".into()));
        }
        if gaps.len() > MAX_ITEMS {
            return Err(Error::Precondition(format!("at most {MAX_ITEMS} items")));
        }
        let inst = KnapsackInstance { e_a, gaps, t_a, t_b };
        let theta = inst.threshold();
        if let Some(b) = inst.words().find(|b| weight(b, &inst.gaps) == theta) {
            return Err(Error::Degenerate(format!("word {} sums to the threshold {theta}", bits_text(&b))));
        }
        Ok(inst)
    }

    pub fn threshold(&self) -> BigRational {
        &self.e_a * &self.t_b / &self.t_a
    }

    fn words(&self) -> impl Iterator<Item = Vec<bool>> + '_ {
        let n = self.gaps.len();
        (0..1usize << n).map(move |x| word(x, n))
    }

    fn in_window(&self, b: &[bool]) -> bool {
        let s = weight(b, &self.gaps);
        s < self.e_a && s > self.threshold()
    }

    /// Exhaustive subset-sum search for `E_A > (b|E) > theta`.
    pub fn oracle(&self) -> Option<Vec<bool>> {
        self.words().find(|b| self.in_window(b))
    }

    pub fn ensemble(&self) -> Result<Ensemble> {
        let hot = LevelSystem::new("hot", vec![Scalar::zero(), Scalar::Exact(self.e_a.clone())])?;
        let t_a = Temperature::finite(Scalar::Exact(self.t_a.clone()))?;
        let t_b = Temperature::finite(Scalar::Exact(self.t_b.clone()))?;
        let mut parts = vec![ThermalState::new(hot, t_a)];
        for (j, g) in self.gaps.iter().enumerate() {
            let mut q = LevelSystem::qubit(Scalar::Exact(g.clone()))?;
            q.label = format!("item{j}");
            parts.push(ThermalState::new(q, t_b.clone()));
        }
        Ok(Ensemble::new(parts))
    }
}

pub fn bits_text(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

pub fn knapsack_solve(inst: &KnapsackInstance) -> Result<KnapsackReport> {
    let n = inst.gaps.len();
    let ens = inst.ensemble()?;
    let report = optimal_engine(&ens);
    let image = report.permutation.image(1 << n);
    let image_word = word(image & ((1 << n) - 1), n);
    let image_sum = weight(&image_word, &inst.gaps);
    let witness = (image >> n == 0 && inst.in_window(&image_word)).then(|| image_word.clone());
    let oracle_witness = inst.oracle();
    let energy_ties = report.tie_flags.iter().filter(|t| t.order == OrderKind::Energy).count();
    Ok(KnapsackReport {
        threshold: inst.threshold(),
        agrees: witness.is_some() == oracle_witness.is_some(),
        image_word,
        image_sum,
        witness,
        oracle_witness,
        energy_ties,
    })
}
