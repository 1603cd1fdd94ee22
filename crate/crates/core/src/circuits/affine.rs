//! Structural limits of gate families: NOT/CNOT circuits are affine over
//! GF(2), and Toffoli circuits fix every word of weight at most 1.

use serde::Serialize;

use super::{Circuit, Gate};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AffineCheck {
    /// `V(x) = A x + c`; `matrix[i][j]` is the coefficient of input bit `j`
    /// in output bit `i`, with bits indexed by wire.
    Affine { matrix: Vec<Vec<u8>>, offset: Vec<u8> },
    NotAffine { gate: Gate },
}

fn bits(x: usize, width: usize) -> Vec<u8> {
    (0..width).map(|w| ((x >> (width - 1 - w)) & 1) as u8).collect()
}

/// First triple `x < y < z` (by index) with `f(x ^ y ^ z) != f(x) ^ f(y) ^ f(z)`.
pub fn xor_triple_violation(table: &[usize]) -> Option<(usize, usize, usize)> {
    let n = table.len();
    for x in 0..n {
        for y in x + 1..n {
            for z in y + 1..n {
                if table[x ^ y ^ z] != table[x] ^ table[y] ^ table[z] {
                    return Some((x, y, z));
                }
            }
        }
    }
    None
}

/// A NOT/CNOT circuit's affine form, verified on every xor triple.
pub fn affine_closure_check(c: &Circuit) -> AffineCheck {
    if let Some(g) = c.gates.iter().find(|g| g.is_toffoli()) {
        return AffineCheck::NotAffine { gate: *g };
    }
    let w = c.width;
    let offset_word = c.apply(0);
    let mut matrix = vec![vec![0u8; w]; w];
    for j in 0..w {
        let col = c.apply(1 << (w - 1 - j)) ^ offset_word;
        for (i, row) in matrix.iter_mut().enumerate() {
            row[j] = ((col >> (w - 1 - i)) & 1) as u8;
        }
    }
    let table: Vec<usize> = (0..1usize << w).map(|x| c.apply(x)).collect();
    assert!(xor_triple_violation(&table).is_none(), "NOT/CNOT circuits are affine");
    AffineCheck::Affine { matrix, offset: bits(offset_word, w) }
}

/// `MAJORITY` on `width` bits as a one-output truth table.
pub fn majority_truth_table(width: usize) -> Vec<usize> {
    (0..1usize << width).map(|x| usize::from(2 * x.count_ones() as usize > width)).collect()
}

/// Some word of weight at most 1 the circuit moves, or `None` if all are fixed.
pub fn toffoli_weight_invariance_check(c: &Circuit) -> Result<Option<usize>> {
    if let Some(g) = c.gates.iter().find(|g| !g.is_toffoli()) {
        return Err(Error::Precondition(format!("non-Toffoli gate {g} present")));
    }
    let mut low = std::iter::once(0).chain((0..c.width).map(|w| 1usize << w));
    Ok(low.find(|&x| c.apply(x) != x))
}
