//! Weak characteristic curves: clamped level sets of the potential `Q`.
//!
//! ```text
//! γ(t) = max{α, min{β, inf{x : Q(t,x) > h̄}, x̄ + ‖b‖∞·|t − t̄|}},   h̄ = Q(t̄, x̄)
//! ```

use crate::error::{Error, Result};
use crate::field::FieldPair;
use crate::potential::{Potential, Side};

/// A sampled weak characteristic through `(t̄, x̄)`.
#[derive(Clone, Debug)]
pub struct CharCurve {
    pub base_level: usize,
    pub t_bar: f64,
    pub x_bar: f64,
    pub h_bar: f64,
    /// One position per time level.
    pub positions: Vec<f64>,
    /// Entry time `t_*` (0 when the curve reaches the initial line).
    pub t_star: f64,
    /// Exit time `t^*` (T when the curve reaches the final line).
    pub t_upper: f64,
    /// Boundary hit going backward from `t̄`.
    pub collided_at: Option<Side>,
    /// Boundary hit going forward from `t̄`.
    pub exited_at: Option<Side>,
}

/// `(t_star, t_upper, side)`; the side is the backward collision if there is
/// one, else the forward exit.
pub fn exit_times(c: &CharCurve) -> (f64, f64, Option<Side>) {
    (c.t_star, c.t_upper, c.collided_at.or(c.exited_at))
}

/// Result of following a curve backward down to a stop level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backward {
    /// Stayed inside down to the stop level, where it sits at `foot`.
    Reached { foot: f64 },
    /// Hit the boundary at the interpolated time `t_star`; `level` is the
    /// time level just below the hit.
    Collided { t_star: f64, side: Side, level: usize },
}

/// Curve evaluation on a fixed potential.
#[derive(Clone, Copy)]
pub struct Tracer<'a> {
    pub q: &'a Potential,
    pub b_sup: f64,
}

impl<'a> Tracer<'a> {
    pub fn new(q: &'a Potential, b_sup: f64) -> Self {
        Self { q, b_sup }
    }

    fn row(&self, i: usize) -> &'a [f64] {
        let nx = self.q.grid.nx();
        &self.q.values.as_slice().expect("standard layout")[i * nx..(i + 1) * nx]
    }

    /// `inf{x : Q(t_i,x) > h}` with linear interpolation between nodes;
    /// `+∞` when the row never exceeds `h`.
    pub fn crossing(&self, i: usize, h: f64) -> f64 {
        let g = &self.q.grid;
        let row = self.row(i);
        let thr = h + level_tol(h);
        let j = row.partition_point(|&v| v <= thr);
        if j == row.len() {
            return f64::INFINITY;
        }
        if j == 0 {
            return g.x_min();
        }
        let (a, b) = (row[j - 1], row[j]);
        let w = ((h - a) / (b - a)).clamp(0.0, 1.0);
        g.x(j - 1) + w * g.dx()
    }

    /// Curve position at level `i` for base `(t_{base}, x̄)` at level `h`.
    pub fn position(&self, i: usize, base: usize, x_bar: f64, h: f64) -> f64 {
        let g = &self.q.grid;
        let clamp = x_bar + self.b_sup * (g.t(i) - g.t(base)).abs();
        self.crossing(i, h).min(clamp).min(g.x_max()).max(g.x_min())
    }

    fn at_boundary(&self, x: f64) -> Option<Side> {
        let g = &self.q.grid;
        let eps = 1e-12 * g.length();
        if x <= g.x_min() + eps {
            Some(Side::Left)
        } else if x >= g.x_max() - eps {
            Some(Side::Right)
        } else {
            None
        }
    }

    /// Interpolated hit time between levels `lo` (on the boundary) and
    /// `lo + 1` (inside), from the boundary values of `Q`.
    fn hit_time(&self, lo: usize, side: Side, h: f64) -> f64 {
        let g = &self.q.grid;
        let j = match side {
            Side::Left => 0,
            Side::Right => g.nx() - 1,
        };
        let (a, b) = (self.q.values[[lo, j]], self.q.values[[lo + 1, j]]);
        let w = if (b - a).abs() > 0.0 { ((h - a) / (b - a)).clamp(0.0, 1.0) } else { 0.0 };
        g.t(lo) + w * g.dt()
    }

    /// Interpolated exit time between levels `hi − 1` (inside) and `hi` (on
    /// the boundary).
    fn exit_time(&self, hi: usize, side: Side, h: f64) -> f64 {
        let g = &self.q.grid;
        let j = match side {
            Side::Left => 0,
            Side::Right => g.nx() - 1,
        };
        let (a, b) = (self.q.values[[hi - 1, j]], self.q.values[[hi, j]]);
        let w = if (b - a).abs() > 0.0 { ((h - a) / (b - a)).clamp(0.0, 1.0) } else { 1.0 };
        g.t(hi - 1) + w * g.dt()
    }

    /// Boundary value of `Q` at level `i` lies strictly beyond `h`, so the
    /// curve cannot continue below `t_i` along that edge.
    fn beyond(&self, i: usize, side: Side, h: f64) -> bool {
        let g = &self.q.grid;
        match side {
            Side::Left => self.q.values[[i, 0]] > h + level_tol(h),
            Side::Right => self.q.values[[i, g.nx() - 1]] < h - level_tol(h),
        }
    }

    /// Follows the curve from level `base` down to level `stop`. A curve
    /// sitting on an edge where the level still holds (no flux through it)
    /// keeps going; it collides once the edge value passes `h`.
    pub fn backward(&self, base: usize, x_bar: f64, h: f64, stop: usize) -> Backward {
        let mut p = x_bar;
        for i in (stop..base).rev() {
            p = self.position(i, base, x_bar, h);
            if let Some(side) = self.at_boundary(p) {
                if self.beyond(i, side, h) {
                    return Backward::Collided { t_star: self.hit_time(i, side, h), side, level: i };
                }
            }
        }
        Backward::Reached { foot: p }
    }
}

/// Comparison tolerance against a level `h`: `10⁻¹⁰·(1 + |h|)`.
pub fn level_tol(h: f64) -> f64 {
    1e-10 * (1.0 + h.abs())
}

/// Builds the full curve through the interior node `(i_bar, j_bar)`.
pub fn level_curve(p: &Potential, f: &FieldPair, i_bar: usize, j_bar: usize) -> Result<CharCurve> {
    let g = &p.grid;
    if i_bar >= g.nt() || j_bar >= g.nx() {
        return Err(Error::Domain(format!("node ({i_bar}, {j_bar}) outside the grid")));
    }
    if i_bar == 0 || i_bar == g.nt() - 1 || j_bar == 0 || j_bar == g.nx() - 1 {
        return Err(Error::BoundaryBase);
    }
    Ok(curve_through(p, f.b_sup, i_bar, g.x(j_bar)))
}

/// Curve through `(t_{i_bar}, x_bar)` for any `x_bar` inside `[α,β]`.
pub fn curve_through(p: &Potential, b_sup: f64, i_bar: usize, x_bar: f64) -> CharCurve {
    let g = &p.grid;
    let tr = Tracer::new(p, b_sup);
    let h = p.value_at(i_bar, x_bar);
    let positions: Vec<f64> = (0..g.nt()).map(|i| tr.position(i, i_bar, x_bar, h)).collect();

    let (t_star, collided_at) = match tr.backward(i_bar, x_bar, h, 0) {
        Backward::Reached { .. } => (0.0, None),
        Backward::Collided { t_star, side, .. } => (t_star, Some(side)),
    };
    let mut t_upper = g.t_max();
    let mut exited_at = None;
    for i in i_bar + 1..g.nt() {
        if let Some(side) = tr.at_boundary(positions[i]) {
            t_upper = tr.exit_time(i, side, h);
            exited_at = Some(side);
            break;
        }
    }
    CharCurve {
        base_level: i_bar,
        t_bar: g.t(i_bar),
        x_bar,
        h_bar: h,
        positions,
        t_star,
        t_upper,
        collided_at,
        exited_at,
    }
}

/// Time-level ranges `[i0, i1]` on which `t − t_{i0} ≤ (β−α)/(2‖b‖∞)`.
pub fn slabs(p: &Potential, b_sup: f64) -> Vec<(usize, usize)> {
    let g = &p.grid;
    let last = g.nt() - 1;
    let per = if b_sup > 0.0 {
        let t_bar = g.length() / (2.0 * b_sup);
        ((t_bar / g.dt() + 1e-9).floor() as usize).max(1)
    } else {
        last
    };
    let mut out = Vec::new();
    let mut i0 = 0;
    while i0 < last {
        let i1 = (i0 + per).min(last);
        out.push((i0, i1));
        i0 = i1;
    }
    out
}

/// Start level of the slab owning level `i` (`i0 < i ≤ i1`; level 0 owns
/// itself).
pub fn slab_start(slabs: &[(usize, usize)], i: usize) -> usize {
    slabs.iter().find(|&&(a, b)| a < i && i <= b).map_or(0, |s| s.0)
}

/// `x_α(t̄)` and `x_β(t̄)`: the extent of the base points at level `i_bar`
/// whose curves reach the start of their time slab, found by bisection
/// over interior nodes.
pub fn division_points(p: &Potential, f: &FieldPair, i_bar: usize) -> Result<(f64, f64)> {
    let g = &p.grid;
    if i_bar == 0 || i_bar >= g.nt() {
        return Err(Error::Domain(format!("level {i_bar} is not a positive time level")));
    }
    let stop = slab_start(&slabs(p, f.b_sup), i_bar);
    division_points_from(p, f.b_sup, i_bar, stop)
}

pub(crate) fn division_points_from(p: &Potential, b_sup: f64, i_bar: usize, stop: usize) -> Result<(f64, f64)> {
    let g = &p.grid;
    let tr = Tracer::new(p, b_sup);
    let outcome = |j: usize| tr.backward(i_bar, g.x(j), p.values[[i_bar, j]], stop);
    let hits = |j: usize, s: Side| matches!(outcome(j), Backward::Collided { side, .. } if side == s);
    let (lo, hi) = (1, g.nx() - 2);
    if lo > hi {
        return Ok((g.x_min(), g.x_max()));
    }
    // first interior node not hitting α
    let first = bisect(lo, hi + 1, |j| !hits(j, Side::Left));
    // last interior node not hitting β
    let last = bisect(lo, hi + 1, |j| hits(j, Side::Right)).checked_sub(1);
    let (first, last) = match last {
        Some(l) if first <= l && first <= hi => (first, l),
        _ => return Err(Error::EmptyDivision(g.t(i_bar))),
    };
    if hits(first, Side::Right) {
        return Err(Error::EmptyDivision(g.t(i_bar)));
    }
    let x_alpha = if first == lo { g.x_min() } else { g.x(first) };
    let x_beta = if last == hi { g.x_max() } else { g.x(last) };
    Ok((x_alpha, x_beta))
}

/// Smallest `k` in `[lo, hi)` with `pred(k)`, for a predicate that is false
/// then true; `hi` if never true.
fn bisect(mut lo: usize, mut hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{builtin, oscillating_a, sample_default, sample_scenario, Scenario};
    use crate::potential::build_potential;
    use crate::profile::BoundaryData;

    fn drift(c: f64, alpha: f64, beta: f64, n: usize) -> (FieldPair, Potential) {
        let data = BoundaryData::constant(0.0, 1.0, alpha, beta);
        let s = Scenario::analytic("drift", 1.0, alpha, beta, |_, _| 1.0, move |_, _| c, data);
        let f = sample_scenario(&s, &s.grid(n, n).unwrap(), 1e-9).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        (f, p)
    }

    #[test]
    fn straight_lines_for_constant_drift() {
        let (f, p) = drift(1.0, -4.0, 4.0, 65);
        let c = level_curve(&p, &f, 32, 30).unwrap();
        for (i, x) in c.positions.iter().enumerate() {
            let exact = (f.grid.x(30) + f.grid.t(i) - 0.5).clamp(-4.0, 4.0);
            assert!((x - exact).abs() < 1e-9, "{i}: {x} vs {exact}");
        }
        assert_eq!(exit_times(&c), (0.0, 1.0, None));
    }

    #[test]
    fn forward_exit_on_the_right() {
        let (f, p) = drift(1.0, 0.0, 1.0, 201);
        let c = level_curve(&p, &f, 180, 190).unwrap();
        assert_eq!(c.exited_at, Some(Side::Right));
        assert!((c.t_upper - 0.95).abs() < 1e-9, "{}", c.t_upper);
        assert_eq!(c.collided_at, None);
        assert_eq!(exit_times(&c).2, Some(Side::Right));
    }

    #[test]
    fn boundary_base_rejected() {
        let (f, p) = drift(1.0, 0.0, 1.0, 9);
        assert!(matches!(level_curve(&p, &f, 4, 0), Err(Error::BoundaryBase)));
        assert!(matches!(level_curve(&p, &f, 0, 4), Err(Error::BoundaryBase)));
    }

    #[test]
    fn oscillating_curve_follows_the_flow() {
        let f = sample_default(&builtin("oscillating-sign").unwrap(), 257, 257).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        let g = f.grid;
        let i_bar = 128;
        // base on the node nearest X(t̄,0); the curve is then X(·, x̄ − X(t̄,0))
        let j = g.nearest_x(oscillating_a(g.t(i_bar)));
        let shift = g.x(j) - oscillating_a(g.t(i_bar));
        let c = level_curve(&p, &f, i_bar, j).unwrap();
        let slack = 2.0 * g.dx() + f.b_sup * g.dt();
        for (i, x) in c.positions.iter().enumerate().take(225) {
            assert!((x - oscillating_a(g.t(i)) - shift).abs() <= slack, "{i}");
        }
        assert_eq!(c.t_star, 0.0);
    }

    #[test]
    fn vacuum_plateau_uses_clamp() {
        let s = builtin("vacuum-patch").unwrap();
        let f = sample_default(&s, 129, 129).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        let g = f.grid;
        let (i_bar, j_bar) = (64, g.nearest_x(0.9));
        let c = level_curve(&p, &f, i_bar, j_bar).unwrap();
        for (i, x) in c.positions.iter().enumerate() {
            let expect = (g.x(j_bar) + f.b_sup * (g.t(i) - g.t(i_bar)).abs()).min(1.25);
            assert!((x - expect).abs() < 1e-9, "{i}: {x} vs {expect}");
            assert!((p.value_at(i, *x) - c.h_bar).abs() < 1e-12);
        }
    }

    #[test]
    fn slab_split() {
        let (f, p) = drift(3.0, 0.0, 2.0, 129);
        let s = slabs(&p, f.b_sup);
        let per = (2.0 / 6.0 / f.grid.dt()).floor() as usize;
        assert_eq!(s, vec![(0, per), (per, 2 * per), (2 * per, 3 * per), (3 * per, 128)]);
        assert_eq!(slab_start(&s, per), 0);
        assert_eq!(slab_start(&s, per + 1), per);
        let f = sample_default(&builtin("oscillating-sign").unwrap(), 129, 129).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        assert_eq!(slabs(&p, f.b_sup), vec![(0, 128)]);
    }

    #[test]
    fn division_points_examples() {
        let (f, p) = drift(0.0, 0.0, 1.0, 33);
        assert_eq!(division_points(&p, &f, 16).unwrap(), (0.0, 1.0));
        let (f, p) = drift(1.0, 0.0, 2.0, 129);
        let (xa, xb) = division_points(&p, &f, 64).unwrap();
        assert!((xa - 0.5).abs() <= f.grid.dx() + 1e-12, "{xa}");
        assert_eq!(xb, 2.0);
    }
}
