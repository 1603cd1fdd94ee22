//! The optimal engine of two harmonic oscillators as a flow on the lattice.
//!
//! With `E_B = 1` and `T_B = 1`, state `(n, m)` has energy `e n + m` and
//! log-weight `q n + m`. The engine sends the `r`-th most probable point to
//! the `r`-th lowest-energy point; ties break toward the smaller `(n, m)`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, DEFAULT_PRECISION};

pub type Point = (usize, usize);

#[derive(Clone, Debug, Serialize)]
pub struct PointRanks {
    pub point: Point,
    /// Position in the descending-probability order.
    pub l_rank: usize,
    /// Position in the ascending-energy order.
    pub k_rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlowField {
    pub e: Scalar,
    pub q: Scalar,
    /// Points `(n, m)` with `n < window.0` and `m < window.1`.
    pub window: Point,
    /// `s -> pi(s)` for every window point whose image is also in the window,
    /// fixed points included.
    pub arrows: Vec<(Point, Point)>,
    /// Arrows that are not fixed points.
    pub moving: usize,
    /// Ranks of every window point, row-major in `(n, m)`.
    pub ranks: Vec<PointRanks>,
}

/// `e = sqrt 2`, `q = sqrt 3`.
pub fn default_parameters() -> (Scalar, Scalar) {
    let two = Scalar::int(2).into_real_mode(DEFAULT_PRECISION);
    let three = Scalar::int(3).into_real_mode(DEFAULT_PRECISION);
    (two.sqrt(), three.sqrt())
}

fn key(slope: &Scalar, (n, m): Point) -> Scalar {
    slope * &Scalar::int(n as i64) + Scalar::int(m as i64)
}

/// All points with `slope * n + m <= bound`.
fn points_below(slope: &Scalar, bound: &Scalar) -> Vec<(Scalar, Point)> {
    let mut out = Vec::new();
    let mut n = 0;
    loop {
        let base = key(slope, (n, 0));
        if base.gt(bound) {
            break;
        }
        let mut m = 0;
        loop {
            let k = &base + &Scalar::int(m as i64);
            if k.gt(bound) {
                break;
            }
            out.push((k, (n, m)));
            m += 1;
        }
        n += 1;
    }
    out
}

/// Sorts by key then point; in real mode any pair of keys that cannot be
/// separated is an error.
fn sort_points(mut pts: Vec<(Scalar, Point)>) -> Result<Vec<(Scalar, Point)>> {
    pts.sort_by(|a, b| a.0.raw_cmp(&b.0).then(a.1.cmp(&b.1)));
    for w in pts.windows(2) {
        let c = w[0].0.compare(&w[1].0);
        if c.ordering == Ordering::Equal && !(w[0].0.is_exact() && w[1].0.is_exact()) {
            return Err(Error::Tie(format!("{:?}", w[0].1), format!("{:?}", w[1].1)));
        }
    }
    Ok(pts)
}

/// Flow field of the optimal engine restricted to `window`.
pub fn term_order_flow(e: &Scalar, q: &Scalar, window: Point) -> Result<FlowField> {
    if !e.is_positive() || !q.is_positive() {
        return Err(Error::Precondition("e and q must be positive".into()));
    }
    let (w_n, w_m) = window;
    if w_n == 0 || w_m == 0 {
        return Ok(FlowField { e: e.clone(), q: q.clone(), window, arrows: Vec::new(), moving: 0, ranks: Vec::new() });
    }
    let in_window = |(n, m): Point| n < w_n && m < w_m;
    let corner = (w_n - 1, w_m - 1);

    // Every point more probable than a window point has a smaller log-weight
    // than the window corner.
    let l_sorted = sort_points(points_below(q, &key(q, corner)))?;
    let l_rank = |p: Point| l_sorted.iter().position(|x| x.1 == p).expect("enumerated");
    let max_l = (0..w_n).flat_map(|n| (0..w_m).map(move |m| (n, m))).map(l_rank).max().unwrap_or(0);

    let mut bound = key(e, corner);
    let mut k_sorted = points_below(e, &bound);
    while k_sorted.len() <= max_l {
        bound = &bound + &bound;
        k_sorted = points_below(e, &bound);
    }
    let k_sorted = sort_points(k_sorted)?;

    let mut ranks = Vec::new();
    let mut arrows = Vec::new();
    for n in 0..w_n {
        for m in 0..w_m {
            let p = (n, m);
            let l = l_rank(p);
            let k = k_sorted.iter().position(|x| x.1 == p).expect("enumerated");
            ranks.push(PointRanks { point: p, l_rank: l, k_rank: k });
            let image = k_sorted[l].1;
            if in_window(image) {
                arrows.push((p, image));
            }
        }
    }
    let moving = arrows.iter().filter(|(a, b)| a != b).count();
    Ok(FlowField { e: e.clone(), q: q.clone(), window, arrows, moving, ranks })
}

impl FlowField {
    /// Graphviz rendering with pinned node positions; fixed points are bare
    /// nodes. Byte-stable.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph flow {\n  node [shape=point];\n");
        for n in 0..self.window.0 {
            for m in 0..self.window.1 {
                let _ = writeln!(s, "  \"{n},{m}\" [pos=\"{n},{m}!\"];");
            }
        }
        for ((a, b), (c, d)) in self.arrows.iter().filter(|(x, y)| x != y) {
            let _ = writeln!(s, "  \"{a},{b}\" -> \"{c},{d}\";");
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }

    pub fn image(&self, p: Point) -> Option<Point> {
        self.arrows.iter().find(|a| a.0 == p).map(|a| a.1)
    }
}
