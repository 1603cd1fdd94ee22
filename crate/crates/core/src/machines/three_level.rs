//! Two three-level systems as a universal gate set.
//!
//! System A has levels `0, e, 2e` at `T_A = e / q`; system B has levels
//! `0, 1, 2` at `T_B = 1`, so state `nm` has energy `e n + m` and
//! log-weight `q n + m`. Logical 0 is level 1 and logical 1 is level 2.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::engine::optimal_engine;
use crate::ensemble::Ensemble;
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::scalar::Scalar;
use crate::thermal::{LevelSystem, Temperature, ThermalState};

/// The printed map `00 01 02 10 11 12 20 21 22 -> 00 10 01 20 11 02 21 12 22` as indices `3n + m`.
pub const CANONICAL_MAP: [usize; 9] = [0, 3, 1, 6, 4, 2, 7, 5, 8];

#[derive(Clone, Debug, Serialize)]
pub struct ThreeLevelPair {
    pub e: Scalar,
    pub q: Scalar,
    pub permutation: Permutation,
}

/// Optimal engine on the 9-state pair.
pub fn three_level_engine(e: &Scalar, q: &Scalar) -> Result<ThreeLevelPair> {
    for (name, v) in [("e", e), ("q", q)] {
        if !v.is_positive() {
            return Err(Error::Precondition(format!("{name} must be positive")));
        }
        for bad in [Scalar::ratio(1, 2), Scalar::one(), Scalar::int(2)] {
            if v.tol_eq(&bad) {
                return Err(Error::Degenerate(format!("{name} = {bad} makes an order non-total")));
            }
        }
    }
    let a = LevelSystem::new("A", vec![Scalar::zero(), e.clone(), e * &Scalar::int(2)])?;
    let b = LevelSystem::equidistant(3, Scalar::one())?;
    let ens = Ensemble::new(vec![
        ThermalState::new(a, Temperature::finite(e / q)?),
        ThermalState::new(b, Temperature::finite(Scalar::one())?),
    ]);
    let permutation = optimal_engine(&ens).permutation;
    Ok(ThreeLevelPair { e: e.clone(), q: q.clone(), permutation })
}

impl ThreeLevelPair {
    pub fn is_canonical(&self) -> bool {
        self.permutation.images() == CANONICAL_MAP
    }

    /// Table rows `"nm -> n'm'"` in index order.
    pub fn table(&self) -> Vec<String> {
        (0..9).map(|s| format!("{} -> {}", label(s), label(self.permutation.image(s)))).collect()
    }
}

fn label(s: usize) -> String {
    format!("{}{}", s / 3, s % 3)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell(pub usize);

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Register machine over A and B cells driven by the canonical engine.
#[derive(Clone, Debug)]
pub struct GadgetMachine {
    perm: Permutation,
    cells: Vec<(Kind, Option<usize>)>,
    /// Number of engine applications so far.
    pub steps: usize,
}

/// Level encoding of a bit.
pub fn encode(bit: bool) -> usize {
    if bit {
        2
    } else {
        1
    }
}

impl GadgetMachine {
    pub fn new(pair: &ThreeLevelPair) -> Result<Self> {
        if !pair.is_canonical() {
            return Err(Error::Precondition("gadgets need the canonical permutation".into()));
        }
        Ok(GadgetMachine { perm: pair.permutation.clone(), cells: Vec::new(), steps: 0 })
    }

    pub fn alloc(&mut self, kind: Kind) -> Cell {
        self.cells.push((kind, None));
        Cell(self.cells.len() - 1)
    }

    pub fn fresh(&mut self, kind: Kind, level: usize) -> Cell {
        let c = self.alloc(kind);
        self.cells[c.0].1 = Some(level);
        c
    }

    pub fn input(&mut self, bit: bool) -> Cell {
        self.fresh(Kind::B, encode(bit))
    }

    pub fn level(&self, c: Cell) -> Result<usize> {
        self.cells.get(c.0).and_then(|x| x.1).ok_or(Error::Uninitialized(c.0))
    }

    /// Logical value of a cell; levels outside `{1, 2}` are an error.
    pub fn read(&self, c: Cell) -> Result<bool> {
        match self.level(c)? {
            1 => Ok(false),
            2 => Ok(true),
            l => Err(Error::Precondition(format!("cell {c} holds non-logical level {l}"))),
        }
    }

    fn expect(&self, c: Cell, kind: Kind) -> Result<()> {
        match self.cells.get(c.0) {
            Some((k, _)) if *k == kind => Ok(()),
            Some((k, _)) => Err(Error::Precondition(format!("cell {c} is {k:?}, expected {kind:?}"))),
            None => Err(Error::Uninitialized(c.0)),
        }
    }

    /// Applies `U^times` to the pair `(a, b)`.
    pub fn apply(&mut self, a: Cell, b: Cell, times: usize) -> Result<()> {
        self.expect(a, Kind::A)?;
        self.expect(b, Kind::B)?;
        let mut s = 3 * self.level(a)? + self.level(b)?;
        for _ in 0..times {
            s = self.perm.image(s);
        }
        self.cells[a.0].1 = Some(s / 3);
        self.cells[b.0].1 = Some(s % 3);
        self.steps += times;
        Ok(())
    }

    /// `b <- a OR b`.
    pub fn or(&mut self, a: Cell, b: Cell) -> Result<()> {
        self.apply(a, b, 1)
    }

    /// Copies an A cell into a fresh B cell.
    pub fn wire_ab(&mut self, a: Cell) -> Result<Cell> {
        let b = self.fresh(Kind::B, 1);
        self.apply(a, b, 1)?;
        Ok(b)
    }

    /// Copies a B cell into a fresh A cell, leaving `b` intact.
    pub fn fanout(&mut self, b: Cell) -> Result<Cell> {
        let a = self.fresh(Kind::A, 1);
        self.apply(a, b, 4)?;
        let decode = self.fresh(Kind::A, 1);
        self.apply(decode, b, 4)?;
        Ok(a)
    }

    pub fn wire_ba(&mut self, b: Cell) -> Result<Cell> {
        self.fanout(b)
    }

    /// `b <- NOT b`.
    pub fn not(&mut self, b: Cell) -> Result<()> {
        let a = self.fresh(Kind::A, 1);
        self.apply(a, b, 4)?;
        let flip = self.fresh(Kind::A, 2);
        self.apply(flip, b, 1)
    }

    pub fn copy_b(&mut self, b: Cell) -> Result<Cell> {
        let a = self.fanout(b)?;
        self.wire_ab(a)
    }

    /// Fresh B cell holding `NOT (b1 OR b2)`; both inputs are preserved.
    pub fn nor(&mut self, b1: Cell, b2: Cell) -> Result<Cell> {
        let out = self.copy_b(b2)?;
        let a = self.fanout(b1)?;
        self.or(a, out)?;
        self.not(out)?;
        Ok(out)
    }
}

/// Two-input boolean expression built from NOR.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NorExpr {
    X,
    Y,
    Nor(Box<NorExpr>, Box<NorExpr>),
}

impl NorExpr {
    /// Truth table bit `2x + y`.
    pub fn table(&self) -> u8 {
        match self {
            NorExpr::X => 0b1100,
            NorExpr::Y => 0b1010,
            NorExpr::Nor(a, b) => !(a.table() | b.table()) & 0xF,
        }
    }

    pub fn compile(&self, m: &mut GadgetMachine, x: Cell, y: Cell) -> Result<Cell> {
        match self {
            NorExpr::X => Ok(x),
            NorExpr::Y => Ok(y),
            NorExpr::Nor(a, b) => {
                let ca = a.compile(m, x, y)?;
                let cb = b.compile(m, x, y)?;
                m.nor(ca, cb)
            }
        }
    }
}

/// A NOR expression for every reachable two-input function.
pub fn nor_closure() -> BTreeMap<u8, NorExpr> {
    let mut found = BTreeMap::new();
    found.insert(NorExpr::X.table(), NorExpr::X);
    found.insert(NorExpr::Y.table(), NorExpr::Y);
    let mut queue: VecDeque<u8> = found.keys().copied().collect();
    while let Some(t) = queue.pop_front() {
        let known: Vec<NorExpr> = found.values().cloned().collect();
        for eu in known {
            let e = NorExpr::Nor(Box::new(found[&t].clone()), Box::new(eu));
            let tt = e.table();
            if let std::collections::btree_map::Entry::Vacant(slot) = found.entry(tt) {
                slot.insert(e);
                queue.push_back(tt);
            }
        }
    }
    found
}

#[derive(Clone, Debug, Serialize)]
pub struct GadgetReport {
    /// B output of OR for inputs `(x, y)` in `00, 01, 10, 11`.
    pub or: [bool; 4],
    pub not: [bool; 2],
    pub fanout: [(bool, bool); 2],
    pub wire_ab: [bool; 2],
    pub nor: [bool; 4],
    /// Distinct two-input functions realized by compiled NOR circuits.
    pub reachable_functions: usize,
}

fn run<T>(pair: &ThreeLevelPair, f: impl FnOnce(&mut GadgetMachine) -> Result<T>) -> Result<T> {
    let mut m = GadgetMachine::new(pair)?;
    f(&mut m)
}

/// Simulates every gadget on every input and compiles the NOR closure.
pub fn three_level_gates(pair: &ThreeLevelPair) -> Result<GadgetReport> {
    let bits2 = [(false, false), (false, true), (true, false), (true, true)];
    let mut or = [false; 4];
    let mut nor = [false; 4];
    for (i, &(x, y)) in bits2.iter().enumerate() {
        or[i] = run(pair, |m| {
            let a = m.fresh(Kind::A, encode(x));
            let b = m.input(y);
            m.or(a, b)?;
            m.read(b)
        })?;
        nor[i] = run(pair, |m| {
            let (bx, by) = (m.input(x), m.input(y));
            let out = m.nor(bx, by)?;
            m.read(out)
        })?;
    }
    let mut not = [false; 2];
    let mut fanout = [(false, false); 2];
    let mut wire_ab = [false; 2];
    for (i, x) in [false, true].into_iter().enumerate() {
        not[i] = run(pair, |m| {
            let b = m.input(x);
            m.not(b)?;
            m.read(b)
        })?;
        fanout[i] = run(pair, |m| {
            let b = m.input(x);
            let a = m.fanout(b)?;
            Ok((m.read(a)?, m.read(b)?))
        })?;
        wire_ab[i] = run(pair, |m| {
            let a = m.fresh(Kind::A, encode(x));
            let b = m.wire_ab(a)?;
            m.read(b)
        })?;
    }
    let closure = nor_closure();
    for (table, expr) in &closure {
        for &(x, y) in &bits2 {
            let got = run(pair, |m| {
                let (bx, by) = (m.input(x), m.input(y));
                let out = expr.compile(m, bx, by)?;
                m.read(out)
            })?;
            let want = (table >> (2 * x as u8 + y as u8)) & 1 == 1;
            if got != want {
                return Err(Error::Internal(format!("compiled {expr:?} gave {got} on ({x}, {y})")));
            }
        }
    }
    Ok(GadgetReport { or, not, fanout, wire_ab, nor, reachable_functions: closure.len() })
}
