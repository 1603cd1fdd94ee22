//! Generators and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use heatcomp_core::{Ensemble, LevelSystem, Scalar, Temperature, ThermalState};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::Rng;

/// Random product of 1 to 3 parts with at most `max_states` basis states.
/// Levels are small integers, so `LogScale` temperatures with unit 1 keep
/// every probability rational.
pub fn random_rational_ensemble<R: Rng>(rng: &mut R, max_states: usize) -> Ensemble {
    let mut parts = Vec::new();
    let mut dim = 1;
    loop {
        let room = max_states / dim;
        if room < 2 || (!parts.is_empty() && rng.random_bool(0.35)) || parts.len() == 3 {
            break;
        }
        let d = rng.random_range(2..=room.min(4));
        let mut levels: Vec<i64> = (0..d).map(|_| rng.random_range(0..6)).collect();
        levels.sort();
        let sys = LevelSystem::new(format!("p{}", parts.len()), levels.into_iter().map(Scalar::int).collect()).unwrap();
        let t = match rng.random_range(0..6) {
            0 => Temperature::Zero,
            1 => Temperature::Infinite,
            _ => Temperature::inverse_ln(1, [2, 3, 4, 5, 7][rng.random_range(0..5)]).unwrap(),
        };
        parts.push(ThermalState::new(sys, t));
        dim *= d;
    }
    Ensemble::new(parts)
}

fn exact(s: &Scalar) -> &BigRational {
    s.as_exact().expect("rational ensemble")
}

/// Probabilities and energies over one common denominator each.
pub fn scaled_ensemble(ens: &Ensemble) -> (Vec<i128>, Vec<i128>, BigRational) {
    fn scale(v: Vec<&BigRational>) -> (Vec<i128>, BigInt) {
        let lcm = v.iter().fold(BigInt::one(), |a, r| a.lcm(r.denom()));
        let ints = v
            .iter()
            .map(|r| (r.numer() * (&lcm / r.denom())).to_i128().expect("fits i128"))
            .collect();
        (ints, lcm)
    }
    let (p, dp) = scale(ens.probabilities().iter().map(exact).collect());
    let (e, de) = scale(ens.energies().iter().map(exact).collect());
    (p, e, BigRational::new(BigInt::one(), dp * de))
}

/// Maximum of `sum_i p_i (E_i - E_pi(i))` over all permutations, by Heap's
/// algorithm with incremental updates.
pub fn brute_force_max_gain(ens: &Ensemble) -> BigRational {
    let (p, e, unit) = scaled_ensemble(ens);
    let n = p.len();
    // `img[i]` is the image of state `i`; the objective is `sum p_i E_img[i]`, minimized.
    let mut img: Vec<usize> = (0..n).collect();
    let mut cost: i128 = (0..n).map(|i| p[i] * e[i]).sum();
    let base = cost;
    let mut best = cost;
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            let j = if i % 2 == 0 { 0 } else { c[i] };
            cost -= p[j] * e[img[j]] + p[i] * e[img[i]];
            img.swap(j, i);
            cost += p[j] * e[img[j]] + p[i] * e[img[i]];
            best = best.min(cost);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    BigRational::from_integer(BigInt::from(base - best)) * unit
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}
