//! Energy-conserving lift of a permutation engine onto system plus target.
//!
//! The target is a cyclic lattice of sites `-L..=L` with `H_t |x> = x |x>`.
//! The lift sends `(j, x)` to `(pi(j), x - delta(j))` with
//! `delta(j) = E(pi(j)) - E(j)`, so the target absorbs whatever the system
//! releases. Restricting to a target state `psi` gives the channel
//! `G(|j><k|) = a(delta(k) - delta(j)) |pi(j)><pi(k)|`, where
//! `a(d) = <psi|S^d psi>` and `(S^d psi)(x) = psi(x - d)`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::perm::Permutation;

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddedEngine {
    pub permutation: Permutation,
    /// System energies in multiples of `energy_unit`.
    pub energies: Vec<i64>,
    #[serde(with = "crate::scalar::rational_text")]
    pub energy_unit: BigRational,
    /// `E(pi(j)) - E(j)` in the same unit. Public so callers can build
    /// deliberately inconsistent embeddings for negative controls.
    pub deltas: Vec<i64>,
    pub half_width: i64,
}

/// Integer energies after rescaling by the LCM of denominators, and the unit.
fn integer_energies(ens: &Ensemble) -> Result<(Vec<i64>, BigRational)> {
    let exact: Vec<&BigRational> = ens
        .energies()
        .iter()
        .map(|e| e.as_exact().ok_or_else(|| Error::Precondition("embedding needs rational energies".into())))
        .collect::<Result<_>>()?;
    let lcm = exact.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
    let ints = exact
        .iter()
        .map(|e| {
            (*e * BigRational::from_integer(lcm.clone()))
                .to_integer()
                .to_i64()
                .ok_or_else(|| Error::Precondition("rescaled energy exceeds i64".into()))
        })
        .collect::<Result<_>>()?;
    Ok((ints, BigRational::new(BigInt::one(), lcm)))
}

fn deltas(ens: &Ensemble, permutation: &Permutation) -> Result<(Vec<i64>, BigRational, Vec<i64>)> {
    if permutation.len() != ens.dim() {
        return Err(Error::DimensionMismatch { expected: ens.dim(), actual: permutation.len() });
    }
    let (energies, unit) = integer_energies(ens)?;
    let deltas = (0..ens.dim()).map(|j| energies[permutation.image(j)] - energies[j]).collect();
    Ok((energies, unit, deltas))
}

fn max_abs(v: &[i64]) -> i64 {
    v.iter().map(|d| d.abs()).max().unwrap_or(0)
}

pub fn build_embedding(ens: &Ensemble, permutation: &Permutation, half_width: usize) -> Result<EmbeddedEngine> {
    let (energies, energy_unit, deltas) = deltas(ens, permutation)?;
    if max_abs(&deltas) >= half_width as i64 {
        return Err(Error::Precondition(format!("half-width {half_width} must exceed max |delta| = {}", max_abs(&deltas))));
    }
    Ok(EmbeddedEngine { permutation: permutation.clone(), energies, energy_unit, deltas, half_width: half_width as i64 })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConservationReport {
    pub conserved: bool,
    pub checked: usize,
    pub seam_states: usize,
    /// First non-seam `(j, x)` whose total energy changes.
    pub witness: Option<(usize, i64)>,
}

impl EmbeddedEngine {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn lattice_size(&self) -> usize {
        (2 * self.half_width + 1) as usize
    }

    pub fn max_delta(&self) -> i64 {
        max_abs(&self.deltas)
    }

    fn wrap(&self, x: i64) -> i64 {
        let n = 2 * self.half_width + 1;
        (x + self.half_width).rem_euclid(n) - self.half_width
    }

    /// Image of `(j, x)` under the lift.
    pub fn apply(&self, j: usize, x: i64) -> (usize, i64) {
        (self.permutation.image(j), self.wrap(x - self.deltas[j]))
    }

    /// Whether `(j, x)` crosses the cyclic seam.
    pub fn is_seam(&self, j: usize, x: i64) -> bool {
        (x - self.deltas[j]).abs() > self.half_width
    }

    /// The lift as a permutation of `(j, x)` with index `j * (2L + 1) + x + L`.
    pub fn lift(&self) -> Result<Permutation> {
        let n = self.lattice_size();
        let images = (0..self.dim() * n)
            .map(|i| {
                let (j, x) = (i / n, (i % n) as i64 - self.half_width);
                let (pj, px) = self.apply(j, x);
                pj * n + (px + self.half_width) as usize
            })
            .collect();
        Permutation::from_images(images)
    }

    pub fn check_energy_conservation(&self) -> ConservationReport {
        let mut r = ConservationReport { conserved: true, checked: 0, seam_states: 0, witness: None };
        for j in 0..self.dim() {
            for x in -self.half_width..=self.half_width {
                if self.is_seam(j, x) {
                    r.seam_states += 1;
                    continue;
                }
                r.checked += 1;
                let (pj, px) = self.apply(j, x);
                if self.energies[j] + x != self.energies[pj] + px && r.witness.is_none() {
                    r.conserved = false;
                    r.witness = Some((j, x));
                }
            }
        }
        r
    }

    fn check_support(&self, psi: &TargetWavefunction) -> Result<()> {
        if psi.half_width != self.half_width {
            return Err(Error::DimensionMismatch { expected: self.lattice_size(), actual: psi.amplitudes.len() });
        }
        let (lo, hi) = psi.support().ok_or_else(|| Error::Precondition("target state is zero".into()))?;
        let m = self.max_delta();
        if lo < -self.half_width + m || hi > self.half_width - m {
            return Err(Error::Precondition(format!("support [{lo}, {hi}] lies within {m} sites of the seam")));
        }
        Ok(())
    }

    /// Channel computed by moving `psi` through the lattice.
    pub fn restricted_channel(&self, psi: &TargetWavefunction) -> Result<RestrictedChannel> {
        self.check_support(psi)?;
        let shifted: Vec<Vec<Complex64>> = (0..self.dim())
            .map(|j| {
                let mut v = vec![Complex64::new(0.0, 0.0); self.lattice_size()];
                for (i, a) in psi.amplitudes.iter().enumerate() {
                    let (_, y) = self.apply(j, i as i64 - self.half_width);
                    v[(y + self.half_width) as usize] = *a;
                }
                v
            })
            .collect();
        let d = self.dim();
        let coeff = (0..d * d)
            .map(|i| {
                let (j, k) = (i / d, i % d);
                shifted[k].iter().zip(&shifted[j]).map(|(a, b)| a.conj() * b).sum()
            })
            .collect();
        Ok(RestrictedChannel { permutation: self.permutation.clone(), coeff })
    }

    /// Channel from the autocorrelation of `psi`.
    pub fn restricted_channel_closed_form(&self, psi: &TargetWavefunction) -> Result<RestrictedChannel> {
        self.check_support(psi)?;
        let d = self.dim();
        let coeff = (0..d * d).map(|i| psi.autocorrelation(self.deltas[i % d] - self.deltas[i / d])).collect();
        Ok(RestrictedChannel { permutation: self.permutation.clone(), coeff })
    }

    pub fn embedding_fidelity(&self, psi: &TargetWavefunction) -> Result<f64> {
        Ok(self.restricted_channel(psi)?.distance_to_unitary())
    }

    /// `delta(k) - delta(j)` for every pair, row-major in `(j, k)`.
    pub fn delta_differences(&self) -> Vec<i64> {
        let d = self.dim();
        (0..d * d).map(|i| self.deltas[i % d] - self.deltas[i / d]).collect()
    }
}

/// Distance for a uniform window of width `w`: `sqrt(sum d^2) / w`.
pub fn uniform_distance_closed_form(emb: &EmbeddedEngine, w: usize) -> f64 {
    let s: f64 = emb.delta_differences().iter().map(|&d| (d * d) as f64).sum();
    s.sqrt() / w as f64
}

/// `C` in `distance <= C max|delta(j) - delta(k)| / W`: the square root of
/// the number of pairs with differing deltas.
pub fn uniform_distance_constant(emb: &EmbeddedEngine) -> f64 {
    (emb.delta_differences().iter().filter(|&&d| d != 0).count() as f64).sqrt()
}

#[derive(Clone, Debug, Serialize)]
pub struct TargetWavefunction {
    pub half_width: i64,
    /// Amplitude of site `x` at index `x + L`.
    pub amplitudes: Vec<Complex64>,
}

impl TargetWavefunction {
    pub fn single_site(half_width: usize, site: i64) -> Result<Self> {
        Self::uniform(half_width, site, 1)
    }

    /// Equal amplitudes on `width` consecutive sites starting at `center - width / 2`.
    pub fn uniform(half_width: usize, center: i64, width: usize) -> Result<Self> {
        let l = half_width as i64;
        let lo = center - (width as i64) / 2;
        let hi = lo + width as i64 - 1;
        if width == 0 || lo < -l || hi > l {
            return Err(Error::Precondition(format!("window [{lo}, {hi}] does not fit the lattice")));
        }
        let a = Complex64::new(1.0 / (width as f64).sqrt(), 0.0);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 2 * half_width + 1];
        for x in lo..=hi {
            amplitudes[(x + l) as usize] = a;
        }
        Ok(TargetWavefunction { half_width: l, amplitudes })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn support(&self) -> Option<(i64, i64)> {
        let nz = |a: &&Complex64| a.norm_sqr() > 0.0;
        let lo = self.amplitudes.iter().position(|a| nz(&a))?;
        let hi = self.amplitudes.iter().rposition(|a| nz(&a))?;
        Some((lo as i64 - self.half_width, hi as i64 - self.half_width))
    }

    /// `a(d) = sum_x conj(psi(x)) psi(x - d)` without wraparound.
    pub fn autocorrelation(&self, d: i64) -> Complex64 {
        let n = self.amplitudes.len() as i64;
        (0..n)
            .filter(|&i| (0..n).contains(&(i - d)))
            .map(|i| self.amplitudes[i as usize].conj() * self.amplitudes[(i - d) as usize])
            .sum()
    }
}

/// `G(|j><k|) = coeff[j * dim + k] |pi(j)><pi(k)|`.
#[derive(Clone, Debug, Serialize)]
pub struct RestrictedChannel {
    pub permutation: Permutation,
    pub coeff: Vec<Complex64>,
}

impl RestrictedChannel {
    pub fn dim(&self) -> usize {
        self.permutation.len()
    }

    /// Applies the channel to a row-major density matrix.
    pub fn apply(&self, rho: &[Complex64]) -> Vec<Complex64> {
        let d = self.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); d * d];
        for j in 0..d {
            for k in 0..d {
                let (pj, pk) = (self.permutation.image(j), self.permutation.image(k));
                out[pj * d + pk] = self.coeff[j * d + k] * rho[j * d + k];
            }
        }
        out
    }

    /// Frobenius distance to the superoperator of `rho -> U rho U^dagger`.
    pub fn distance_to_unitary(&self) -> f64 {
        self.coeff.iter().map(|c| (Complex64::new(1.0, 0.0) - c).norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FidelityPoint {
    pub width: usize,
    pub distance: f64,
    pub closed_form: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EmbeddingReport {
    pub deltas: Vec<i64>,
    #[serde(with = "crate::scalar::rational_text")]
    pub energy_unit: BigRational,
    pub conservation: ConservationReport,
    pub constant: f64,
    pub series: Vec<FidelityPoint>,
}

/// Distance of the uniform-window channel for each width, on a lattice just
/// large enough to keep every window off the seam.
pub fn fidelity_series(ens: &Ensemble, permutation: &Permutation, widths: &[usize]) -> Result<EmbeddingReport> {
    let (_, energy_unit, deltas) = deltas(ens, permutation)?;
    let m = max_abs(&deltas) as usize;
    let base = build_embedding(ens, permutation, 2 * m + 1)?;
    let mut series = Vec::new();
    for &w in widths {
        let emb = build_embedding(ens, permutation, w / 2 + 2 * m + 1)?;
        let psi = TargetWavefunction::uniform(emb.half_width as usize, 0, w)?;
        let max_d = max_abs(&emb.delta_differences()) as f64;
        series.push(FidelityPoint {
            width: w,
            distance: emb.embedding_fidelity(&psi)?,
            closed_form: uniform_distance_closed_form(&emb, w),
            bound: uniform_distance_constant(&emb) * max_d / w as f64,
        });
    }
    Ok(EmbeddingReport {
        conservation: base.check_energy_conservation(),
        constant: uniform_distance_constant(&base),
        deltas,
        energy_unit,
        series,
    })
}
