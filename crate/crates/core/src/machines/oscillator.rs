//! Truncated harmonic oscillators as root and power calculators.
//!
//! Roots use one hot mode and `k - 1` modes at `T = 0`; the optimal engine
//! sends `|n, 0, ..., 0>` into the shell of total quanta `N` with
//! `C(N + k - 1, k) < n + 1 <= C(N + k, k)`, so `N ~ (k! n)^(1/k)`.
//!
//! Powers use `k - 1` hot modes of gap `c` and one cold mode of gap 1 with
//! `T_A = c T_B`, so probability depends only on the total quanta `N`, and
//! the engine sends the input to `|0, ..., 0, m>` with
//! `C(N + k - 1, k) <= m <= C(N + k, k)`, so `m ~ N^k / k!`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::engine::optimal_engine;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::thermal::{LevelSystem, Temperature, ThermalState};

/// Default bound on the Gibbs mass lost to truncation.
pub const TAIL_EPSILON: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct TruncatedOscillator {
    /// Energy per quantum.
    pub frequency: Scalar,
    /// Highest kept quantum number.
    pub cutoff: usize,
    pub temperature: Temperature,
}

impl TruncatedOscillator {
    pub fn new(frequency: Scalar, cutoff: usize, temperature: Temperature) -> Result<Self> {
        if cutoff < 1 {
            return Err(Error::Precondition("oscillator cutoff must be at least 1".into()));
        }
        if !frequency.is_positive() {
            return Err(Error::NonPositiveGap);
        }
        Ok(TruncatedOscillator { frequency, cutoff, temperature })
    }

    pub fn thermal_state(&self, label: &str) -> Result<ThermalState> {
        let mut sys = LevelSystem::equidistant(self.cutoff + 1, self.frequency.clone())?;
        sys.label = label.to_string();
        Ok(ThermalState::new(sys, self.temperature.clone()))
    }

    /// Gibbs mass of the untruncated oscillator above the cutoff.
    pub fn tail_mass(&self) -> f64 {
        match &self.temperature {
            Temperature::Zero => 0.0,
            Temperature::Infinite => 1.0,
            t => {
                let x = t.reduced_energy(&self.frequency).expect("finite").to_f64();
                (-(self.cutoff as f64 + 1.0) * x).exp()
            }
        }
    }
}

/// `C(n, k)` as `u128`; saturates on overflow.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// The shell `N` with `C(N + k - 1, k) < n + 1 <= C(N + k, k)`: the total
/// quanta of the `n`-th lowest-energy state of `k` equal-gap modes.
pub fn root_shell(n: usize, k: usize) -> usize {
    let mut shell = 0;
    while binomial(shell + k, k) < n as u128 + 1 {
        shell += 1;
    }
    shell
}

/// Smallest power-of-two base with `base^-(cutoff + 1) <= TAIL_EPSILON`.
fn tail_base(cutoff: usize) -> i64 {
    let bits = (1.0 / TAIL_EPSILON).log2().ceil() as usize;
    let e = bits.div_ceil(cutoff + 1).clamp(1, 62);
    1i64 << e
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OscillatorImage {
    pub input: Vec<usize>,
    pub image: Vec<usize>,
    /// Total image quanta for roots; quanta in the last mode for powers.
    pub estimate: usize,
    /// Inclusive range the estimate must lie in.
    pub band: (u128, u128),
}

#[derive(Clone, Debug, Serialize)]
pub struct OscillatorRun {
    pub modes: usize,
    pub cutoffs: Vec<usize>,
    pub tail_mass: f64,
    pub images: Vec<OscillatorImage>,
}

fn run_engine(ens: &Ensemble, probes: &[Vec<usize>]) -> Result<Vec<Vec<usize>>> {
    let r = optimal_engine(ens);
    probes
        .iter()
        .map(|s| Ok(ens.multi_index(r.permutation.image(ens.index(s)?))))
        .collect()
}

/// Root calculator on `k` modes applied to every input `|n, 0, ..., 0>`
/// with `n <= cutoff`.
pub fn root_engine_all(k: usize, cutoff: usize) -> Result<OscillatorRun> {
    root_engine_with(k, cutoff, None)
}

fn root_engine_with(k: usize, cutoff: usize, base: Option<i64>) -> Result<OscillatorRun> {
    if k < 2 {
        return Err(Error::Precondition("root engine needs at least 2 modes".into()));
    }
    let base = base.unwrap_or_else(|| tail_base(cutoff));
    let cold_cut = root_shell(cutoff, k) + 1;
    let hot = TruncatedOscillator::new(Scalar::one(), cutoff, Temperature::inverse_ln(1, base)?)?;
    let mut parts = vec![hot.thermal_state("hot")?];
    for i in 1..k {
        parts.push(TruncatedOscillator::new(Scalar::one(), cold_cut, Temperature::Zero)?.thermal_state(&format!("cold{i}"))?);
    }
    let ens = Ensemble::new(parts);
    let probes: Vec<Vec<usize>> = (0..=cutoff)
        .map(|n| {
            let mut s = vec![0; k];
            s[0] = n;
            s
        })
        .collect();
    let images = run_engine(&ens, &probes)?;
    let images = probes
        .into_iter()
        .zip(images)
        .map(|(input, image)| {
            let n = input[0];
            let estimate = image.iter().sum();
            let shell = root_shell(n, k);
            OscillatorImage { input, image, estimate, band: (shell as u128, shell as u128) }
        })
        .collect();
    let mut cutoffs = vec![cutoff];
    cutoffs.extend(std::iter::repeat_n(cold_cut, k - 1));
    Ok(OscillatorRun { modes: k, cutoffs, tail_mass: hot.tail_mass(), images })
}

/// `k`-th root calculator for one input.
pub fn root_engine(k: usize, n: usize, cutoff: usize) -> Result<OscillatorImage> {
    if n > cutoff {
        return Err(Error::Precondition(format!("input {n} exceeds cutoff {cutoff}")));
    }
    Ok(root_engine_all(k, cutoff)?.images.swap_remove(n))
}

/// Square-root calculator on two modes; returns the image total `k`.
pub fn sqrt_engine(n: usize, cutoff: usize) -> Result<OscillatorImage> {
    root_engine(2, n, cutoff)
}

/// Whether doubling every cutoff leaves all root images unchanged.
pub fn root_engine_stable(k: usize, cutoff: usize) -> Result<bool> {
    let base = tail_base(cutoff);
    let a = root_engine_with(k, cutoff, Some(base))?;
    let b = root_engine_with(k, 2 * cutoff, Some(base))?;
    Ok(a.images.iter().zip(&b.images).all(|(x, y)| x == y))
}

fn power_ensemble(k: usize, c: &BigRational, max_total: usize, scale: usize, base: i64) -> Result<(Ensemble, f64, Vec<usize>)> {
    let hot_cut = scale * (max_total + 1);
    let cold_cut = scale * binomial(max_total + 1 + k, k).to_usize().ok_or_else(|| Error::Precondition("too many quanta".into()))?;
    let b = BigRational::from_integer(BigInt::from(base));
    let t_hot = Temperature::log_scale(c.clone(), b.clone())?;
    let t_cold = Temperature::log_scale(BigRational::from_integer(1.into()), b)?;
    let mut parts = Vec::with_capacity(k);
    let mut tail: f64 = 0.0;
    for i in 0..k - 1 {
        let osc = TruncatedOscillator::new(Scalar::Exact(c.clone()), hot_cut, t_hot.clone())?;
        tail = tail.max(osc.tail_mass());
        parts.push(osc.thermal_state(&format!("hot{i}"))?);
    }
    let cold = TruncatedOscillator::new(Scalar::one(), cold_cut, t_cold)?;
    tail = tail.max(cold.tail_mass());
    parts.push(cold.thermal_state("cold")?);
    let mut cutoffs = vec![hot_cut; k - 1];
    cutoffs.push(cold_cut);
    Ok((Ensemble::new(parts), tail, cutoffs))
}

fn power_probes(k: usize, max_total: usize) -> Vec<Vec<usize>> {
    fn rec(slots: usize, rest: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 0 {
            out.push(cur.clone());
            return;
        }
        for v in 0..=rest {
            cur.push(v);
            rec(slots - 1, rest - v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, max_total, &mut Vec::new(), &mut out);
    out
}

fn power_engine_with(k: usize, c: &BigRational, max_total: usize, scale: usize) -> Result<OscillatorRun> {
    if k < 2 {
        return Err(Error::Precondition("power engine needs at least 2 modes".into()));
    }
    let need = binomial(max_total + k, k);
    if BigRational::from_integer(BigInt::from(need)) >= *c {
        return Err(Error::Precondition(format!("C(N + k, k) = {need} must stay below c = {c} for total quanta N = {max_total}")));
    }
    let base = tail_base(max_total + 1);
    let (ens, tail_mass, cutoffs) = power_ensemble(k, c, max_total, scale, base)?;
    let probes = power_probes(k, max_total);
    let images = run_engine(&ens, &probes)?;
    let images = probes
        .into_iter()
        .zip(images)
        .map(|(input, image)| {
            let total: usize = input.iter().sum();
            let estimate = *image.last().expect("modes");
            let band = (binomial(total + k - 1, k), binomial(total + k, k));
            OscillatorImage { input, image, estimate, band }
        })
        .collect();
    Ok(OscillatorRun { modes: k, cutoffs, tail_mass, images })
}

/// `k`-mode power calculator for every input with at most `max_total` quanta.
pub fn power_engine_all(k: usize, c: &BigRational, max_total: usize) -> Result<OscillatorRun> {
    power_engine_with(k, c, max_total, 1)
}

/// Square calculator: input `|n, m>`, image `|0, m~>` with `m~ ~ (n + m)^2 / 2`.
pub fn square_engine(n: usize, m: usize, c: &BigRational) -> Result<OscillatorImage> {
    let run = power_engine_all(2, c, n + m)?;
    run.images.into_iter().find(|im| im.input == [n, m]).ok_or_else(|| Error::Internal("probe missing".into()))
}

/// Whether doubling every cutoff leaves all power images unchanged.
pub fn power_engine_stable(k: usize, c: &BigRational, max_total: usize) -> Result<bool> {
    let a = power_engine_with(k, c, max_total, 1)?;
    let b = power_engine_with(k, c, max_total, 2)?;
    Ok(a.images == b.images)
}
