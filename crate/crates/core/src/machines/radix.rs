//! Base conversion between two-digit registers.
//!
//! A hot register holds two `N_A`-level digits with gaps `N_A E_A` (high)
//! and `E_A` (low), so its energy is `E_A` times the encoded value. A cold
//! register at `T = 0` holds two `N_B`-level digits the same way. When all
//! `N_B^2` cold configurations lie below `E_A`, the optimal engine copies
//! the value's probability rank into the cold register's energy rank.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

use crate::engine::optimal_engine;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::thermal::{LevelSystem, Temperature, ThermalState};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RadixConversion {
    pub value: usize,
    /// `(n, m)` with `value = n N_A + m`.
    pub input: (usize, usize),
    /// `(n~, m~)` with `value = n~ N_B + m~`.
    pub output: (usize, usize),
}

fn digit(label: &str, levels: usize, unit: &BigRational, t: Temperature) -> Result<ThermalState> {
    let sys = LevelSystem::new(
        label,
        (0..levels).map(|j| Scalar::Exact(unit * BigRational::from_integer(BigInt::from(j)))).collect(),
    )?;
    Ok(ThermalState::new(sys, t))
}

/// Converts `value` from base `n_a` to base `n_b` with the hot register at
/// `T_A = E_A / ln 2`.
pub fn radix_convert(value: usize, n_a: usize, n_b: usize, e_a: &BigRational, e_b: &BigRational) -> Result<RadixConversion> {
    let t_a = Temperature::log_scale(e_a.clone(), BigRational::from_integer(2.into()))?;
    radix_convert_at(value, n_a, n_b, e_a, e_b, t_a)
}

pub fn radix_convert_at(
    value: usize,
    n_a: usize,
    n_b: usize,
    e_a: &BigRational,
    e_b: &BigRational,
    t_a: Temperature,
) -> Result<RadixConversion> {
    if n_a < 2 || n_b < 2 {
        return Err(Error::Precondition("digits need at least 2 levels".into()));
    }
    if !t_a.is_finite() {
        return Err(Error::Precondition("hot register needs a finite temperature".into()));
    }
    let zero = BigRational::from_integer(0.into());
    if e_a <= &zero || e_b <= &zero {
        return Err(Error::NonPositiveGap);
    }
    if value >= n_b * n_b - 1 || value >= n_a * n_a {
        return Err(Error::Precondition(format!("value {value} out of range for bases {n_a} and {n_b}")));
    }
    let top = BigRational::from_integer(BigInt::from(n_b * n_b - 1)) * e_b;
    if &top >= e_a {
        return Err(Error::Precondition(format!("(N_B^2 - 1) E_B = {top} must be below E_A = {e_a}")));
    }
    let big = |n: usize, e: &BigRational| e * BigRational::from_integer(BigInt::from(n));
    let ens = Ensemble::new(vec![
        digit("a_high", n_a, &big(n_a, e_a), t_a.clone())?,
        digit("a_low", n_a, e_a, t_a)?,
        digit("b_high", n_b, &big(n_b, e_b), Temperature::Zero)?,
        digit("b_low", n_b, e_b, Temperature::Zero)?,
    ]);
    let input = (value / n_a, value % n_a);
    let src = ens.index(&[input.0, input.1, 0, 0])?;
    let image = ens.multi_index(optimal_engine(&ens).permutation.image(src));
    if image[0] != 0 || image[1] != 0 {
        return Err(Error::Internal(format!("image {image:?} leaves the hot register excited")));
    }
    Ok(RadixConversion { value, input, output: (image[2], image[3]) })
}

/// Converts to base `n_b` and back with gaps chosen to satisfy both directions.
pub fn radix_round_trip(value: usize, n_a: usize, n_b: usize) -> Result<usize> {
    let int = |v: usize| BigRational::from_integer(BigInt::from(v));
    let fwd = radix_convert(value, n_a, n_b, &int(n_b * n_b), &int(1))?;
    let mid = fwd.output.0 * n_b + fwd.output.1;
    let back = radix_convert(mid, n_b, n_a, &int(n_a * n_a), &int(1))?;
    Ok(back.output.0 * n_a + back.output.1)
}
