//! The constructive solution: `θ` along weak characteristics and the
//! potential `Q̃` from the three-case formula, plus the checks that compare
//! them with boundary data, traces and each other.

use ndarray::Array2;

use crate::characteristics::{slab_start, slabs, Backward, Tracer};
use crate::envelope::{default_tol, lower_increasing_envelope, upper_decreasing_envelope};
use crate::error::{Error, Result};
use crate::field::{total_variation, FieldPair};
use crate::grid::SpaceTimeGrid;
use crate::par;
use crate::potential::{build_potential, normal_trace, Potential, Side};
use crate::profile::BoundaryData;

#[derive(Clone, Debug)]
pub struct Solution {
    pub grid: SpaceTimeGrid,
    pub theta: Array2<f64>,
    pub rho_theta: Array2<f64>,
    pub q_tilde: Potential,
    pub linf_bound: f64,
    /// Time-level ranges `[i0, i1]` solved one after the other.
    pub slabs: Vec<(usize, usize)>,
}

/// Envelope data of one boundary column over `[t_{i0}, t̄]`.
#[derive(Clone, Debug)]
pub struct BoundaryBookkeeping {
    pub side: Side,
    pub start_level: usize,
    /// `min E` as a time.
    pub t_min: f64,
    pub y_bar: f64,
    /// Contact set over levels `start_level..=t̄`.
    pub contact_mask: Vec<bool>,
    envelope: Vec<f64>,
    /// `Σ data(mid)·Δenvelope` up to each level.
    cumulative: Vec<f64>,
    /// `Q̃(t_{i0}, ȳ)`.
    base_value: f64,
}

struct Ctx<'a> {
    f: &'a FieldPair,
    q: &'a Potential,
    data: &'a BoundaryData,
    tracer: Tracer<'a>,
    slabs: Vec<(usize, usize)>,
}

impl<'a> Ctx<'a> {
    fn new(q: &'a Potential, f: &'a FieldPair, data: &'a BoundaryData) -> Result<Self> {
        if q.grid != f.grid {
            return Err(Error::Shape("potential and field grids differ".into()));
        }
        Ok(Self { f, q, data, tracer: Tracer::new(q, f.b_sup), slabs: slabs(q, f.b_sup) })
    }

    fn grid(&self) -> &SpaceTimeGrid {
        &self.q.grid
    }

    /// `θ` at `(t_i, x)` by following the curve back to the initial line,
    /// slab by slab.
    fn theta_at(&self, i: usize, x: f64) -> f64 {
        if i == 0 {
            return self.data.theta0.eval(x);
        }
        let i0 = slab_start(&self.slabs, i);
        let h = self.q.value_at(i, x);
        match self.tracer.backward(i, x, h, i0) {
            Backward::Reached { foot } => self.theta_at(i0, foot),
            Backward::Collided { t_star, side: Side::Left, .. } => self.data.theta_bar.eval(t_star),
            Backward::Collided { t_star, side: Side::Right, .. } => self.data.theta_under.eval(t_star),
        }
    }

    fn book(&self, i_bar: usize, side: Side, start_row: &[f64]) -> BoundaryBookkeeping {
        let g = self.grid();
        let i0 = slab_start(&self.slabs, i_bar);
        let (j, inward) = match side {
            Side::Left => (0, g.dx()),
            Side::Right => (g.nx() - 1, -g.dx()),
        };
        let f: Vec<f64> = (i0..=i_bar).map(|i| self.q.values[[i, j]]).collect();
        let tol = default_tol(&f);
        let env = match side {
            Side::Left => upper_decreasing_envelope(&f, tol),
            Side::Right => lower_increasing_envelope(&f, tol),
        }
        .expect("non-empty column");
        let k_min = env.first_contact();
        let edge = g.x(j);
        let y_bar = if k_min == 0 {
            edge
        } else {
            let base = i0 + k_min;
            let x = edge + inward;
            match self.tracer.backward(base, x, self.q.value_at(base, x), i0) {
                Backward::Reached { foot } => foot,
                Backward::Collided { .. } => edge,
            }
        };
        let profile = match side {
            Side::Left => &self.data.theta_bar,
            Side::Right => &self.data.theta_under,
        };
        let mut cumulative = vec![0.0; f.len()];
        for m in 0..f.len() - 1 {
            let mid = g.t(i0 + m) + 0.5 * g.dt();
            cumulative[m + 1] = cumulative[m] + profile.eval(mid) * (env.values[m + 1] - env.values[m]);
        }
        BoundaryBookkeeping {
            side,
            start_level: i0,
            t_min: g.t(i0 + k_min),
            y_bar,
            contact_mask: env.contact,
            envelope: env.values,
            cumulative,
            base_value: interp_row(g, start_row, y_bar),
        }
    }

    /// `∫ data dEnvelope` from the slab start up to `t_star`.
    fn boundary_integral(&self, book: &BoundaryBookkeeping, t_star: f64) -> f64 {
        let g = self.grid();
        let n = book.envelope.len();
        let s = ((t_star - g.t(book.start_level)) / g.dt()).clamp(0.0, (n - 1) as f64);
        let k = s.floor() as usize;
        if k + 1 >= n {
            return book.cumulative[n - 1];
        }
        let w = s - k as f64;
        let profile = match book.side {
            Side::Left => &self.data.theta_bar,
            Side::Right => &self.data.theta_under,
        };
        let mid = g.t(book.start_level + k) + 0.5 * g.dt();
        book.cumulative[k] + w * profile.eval(mid) * (book.envelope[k + 1] - book.envelope[k])
    }

    /// `(θ, Q̃)` on row `i` (`i > 0`), given `Q̃` on the slab's start row.
    fn row(&self, i: usize, start_row: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let g = self.grid();
        let i0 = slab_start(&self.slabs, i);
        let left = self.book(i, Side::Left, start_row);
        let right = self.book(i, Side::Right, start_row);
        let mut theta = Vec::with_capacity(g.nx());
        let mut qt = Vec::with_capacity(g.nx());
        for j in 0..g.nx() {
            let x = g.x(j);
            let h = self.q.values[[i, j]];
            let (th, v) = match self.tracer.backward(i, x, h, i0) {
                Backward::Reached { foot } => (self.theta_at(i0, foot), interp_row(g, start_row, foot)),
                Backward::Collided { t_star, side: Side::Left, .. } => {
                    (self.data.theta_bar.eval(t_star), left.base_value + self.boundary_integral(&left, t_star))
                }
                Backward::Collided { t_star, side: Side::Right, .. } => {
                    (self.data.theta_under.eval(t_star), right.base_value + self.boundary_integral(&right, t_star))
                }
            };
            theta.push(th);
            qt.push(v);
        }
        (theta, qt)
    }

    /// `Q̃` on the initial line: `∫_α^x ρ(0,·)θ₀` by the trapezoid rule.
    fn initial_row(&self) -> (Vec<f64>, Vec<f64>) {
        let g = self.grid();
        let theta: Vec<f64> = (0..g.nx()).map(|j| self.data.theta0.eval(g.x(j))).collect();
        let mut qt = vec![0.0; g.nx()];
        for j in 1..g.nx() {
            qt[j] = qt[j - 1] + 0.5 * g.dx() * (self.f.rho[[0, j - 1]] * theta[j - 1] + self.f.rho[[0, j]] * theta[j]);
        }
        (theta, qt)
    }
}

fn interp_row(g: &SpaceTimeGrid, row: &[f64], x: f64) -> f64 {
    let (j, w) = g.locate_x(x);
    row[j] * (1.0 - w) + row[j + 1] * w
}

/// Solves on every node: `θ` by the characteristic formula, `Q̃` by the
/// three-case formula, slab by slab.
pub fn solve(q: &Potential, f: &FieldPair, data: &BoundaryData, g: &SpaceTimeGrid) -> Result<Solution> {
    if *g != q.grid {
        return Err(Error::Shape("solve: grid differs from potential grid".into()));
    }
    let ctx = Ctx::new(q, f, data)?;
    let (nt, nx) = (g.nt(), g.nx());
    let mut theta = Array2::<f64>::zeros((nt, nx));
    let mut qt = Array2::<f64>::zeros((nt, nx));
    let (th0, q0) = ctx.initial_row();
    theta.row_mut(0).assign(&ndarray::ArrayView1::from(&th0));
    qt.row_mut(0).assign(&ndarray::ArrayView1::from(&q0));

    for &(i0, i1) in &ctx.slabs {
        let start_row = qt.row(i0).to_vec();
        let rows = par::map_range(i1 - i0, |k| ctx.row(i0 + 1 + k, &start_row));
        for (k, (th, v)) in rows.into_iter().enumerate() {
            theta.row_mut(i0 + 1 + k).assign(&ndarray::ArrayView1::from(&th));
            qt.row_mut(i0 + 1 + k).assign(&ndarray::ArrayView1::from(&v));
        }
    }

    let rho_theta = &f.rho * &theta;
    let lip_x = rho_theta.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let lip_t = (&rho_theta * &f.b).iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(Solution {
        grid: *g,
        theta,
        rho_theta,
        q_tilde: Potential {
            grid: *g,
            values: qt,
            lip_x,
            lip_t,
            monotone_x: false,
            discrepancy: 0.0,
            path_tol: 0.0,
            monotone_repair: 0.0,
        },
        linf_bound: data.linf(),
        slabs: ctx.slabs.clone(),
    })
}

/// `θ` at `(t_i, x_j)` for the listed nodes only, without a full solve.
pub fn solve_nodes(q: &Potential, f: &FieldPair, data: &BoundaryData, nodes: &[(usize, usize)]) -> Result<Vec<f64>> {
    let ctx = Ctx::new(q, f, data)?;
    let g = *ctx.grid();
    Ok(par::map_range(nodes.len(), |k| {
        let (i, j) = nodes[k];
        ctx.theta_at(i, g.x(j))
    }))
}

/// `Q̃(t_{i_bar}, x̄)` on its own; the slab start rows it depends on are
/// solved first.
pub fn tilde_q_value(q: &Potential, f: &FieldPair, data: &BoundaryData, i_bar: usize, x_bar: f64) -> Result<f64> {
    let g = q.grid;
    if i_bar >= g.nt() || !(g.x_min()..=g.x_max()).contains(&x_bar) {
        return Err(Error::Domain(format!("base ({i_bar}, {x_bar}) outside the grid")));
    }
    let ctx = Ctx::new(q, f, data)?;
    let (_, mut start_row) = ctx.initial_row();
    if i_bar == 0 {
        return Ok(interp_row(&g, &start_row, x_bar));
    }
    let i0 = slab_start(&ctx.slabs, i_bar);
    for &(a, b) in &ctx.slabs {
        if b > i0 {
            break;
        }
        start_row = ctx.row(b, &start_row).1;
        let _ = a;
    }
    let h = q.value_at(i_bar, x_bar);
    Ok(match ctx.tracer.backward(i_bar, x_bar, h, i0) {
        Backward::Reached { foot } => interp_row(&g, &start_row, foot),
        Backward::Collided { t_star, side, .. } => {
            let book = ctx.book(i_bar, side, &start_row);
            book.base_value + ctx.boundary_integral(&book, t_star)
        }
    })
}

/// Envelope bookkeeping of one side at level `i_bar`.
pub fn boundary_bookkeeping(
    q: &Potential,
    f: &FieldPair,
    data: &BoundaryData,
    i_bar: usize,
    side: Side,
) -> Result<BoundaryBookkeeping> {
    let ctx = Ctx::new(q, f, data)?;
    let (_, row) = ctx.initial_row();
    Ok(ctx.book(i_bar.min(q.grid.nt() - 1), side, &row))
}

/// `Q_θ` from the solved `θ`.
pub fn theta_potential(sol: &Solution, f: &FieldPair) -> Result<Potential> {
    build_potential(f, Some(&sol.theta), &sol.grid)
}

/// `max |Q̃ − Q_θ|` over all nodes.
pub fn potential_consistency(sol: &Solution, p_theta: &Potential) -> f64 {
    sol.q_tilde.max_abs_diff(p_theta)
}

/// Interior traces at column `j`: `Tr[bρ](·,x)` and `Tr[bρθ](·,x)` per time
/// interval (`−∂tQ` and `−∂tQ_θ`).
pub fn interior_traces(q: &Potential, p_theta: &Potential, j: usize) -> (Vec<f64>, Vec<f64>) {
    let neg = |v: Vec<f64>| v.into_iter().map(|d| -d).collect::<Vec<_>>();
    (neg(q.column_time_derivative(j)), neg(p_theta.column_time_derivative(j)))
}

/// `θ̃_x`: ratio of the time derivatives of `Q_θ` and `Q` at column `j`
/// where `|∂tQ|` exceeds the trace floor; the last emitted value (or the
/// first admissible one, at the start) elsewhere.
pub fn theta_time_trace(sol: &Solution, q: &Potential, p_theta: &Potential, j: usize) -> Result<Vec<f64>> {
    let g = &sol.grid;
    if j == 0 || j >= g.nx() {
        return Err(Error::Domain(format!("column {j} is not interior or the right end")));
    }
    let dq = q.column_time_derivative(j);
    let dqt = p_theta.column_time_derivative(j);
    let floor = q.trace_floor();
    let raw: Vec<Option<f64>> = dq.iter().zip(&dqt).map(|(a, b)| (a.abs() > floor).then(|| b / a)).collect();
    let mut held = raw.iter().flatten().next().copied().unwrap_or(sol.theta[[0, j]]);
    Ok(raw
        .into_iter()
        .map(|r| {
            if let Some(v) = r {
                held = v;
            }
            held
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BcReport {
    pub side: Side,
    /// `∫ |Tr[bρθ] − Tr[bρ]·data| dt` over the inflow set.
    pub mismatch: f64,
    /// Measure of the inflow set.
    pub active_measure: f64,
}

/// Boundary condition on the inflow set `{Tr[bρ] < −floor}` of one side.
pub fn check_boundary_condition(
    sol: &Solution,
    q: &Potential,
    p_theta: &Potential,
    data: &BoundaryData,
    side: Side,
) -> BcReport {
    let g = &sol.grid;
    let tr = normal_trace(q, side);
    let trt = normal_trace(p_theta, side);
    let floor = q.trace_floor();
    let profile = match side {
        Side::Left => &data.theta_bar,
        Side::Right => &data.theta_under,
    };
    let (mut mismatch, mut active) = (0.0, 0.0);
    for (i, (a, b)) in tr.iter().zip(&trt).enumerate() {
        if *a < -floor {
            let mid = g.t(i) + 0.5 * g.dt();
            mismatch += g.dt() * (b - a * profile.eval(mid)).abs();
            active += g.dt();
        }
    }
    BcReport { side, mismatch, active_measure: active }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenormReport {
    pub side: Side,
    /// L¹ mismatch on `{|Tr[bρ]| > floor}`.
    pub mismatch: f64,
    /// Largest excess of `|Tr[bρq(θ)]|` over its bound on the other
    /// intervals (0 when the bound holds).
    pub inactive_excess: f64,
    pub active_measure: f64,
}

/// Compares `Tr[bρq(θ)]` with `Tr[bρ]·q(Tr[bρθ]/Tr[bρ])`.
pub fn renormalized_trace_check(
    sol: &Solution,
    q: &Potential,
    f: &FieldPair,
    qf: impl Fn(f64) -> f64,
    side: Side,
) -> Result<RenormReport> {
    let g = &sol.grid;
    let p_theta = build_potential(f, Some(&sol.theta), g)?;
    let q_theta = sol.theta.mapv(&qf);
    let p_q = build_potential(f, Some(&q_theta), g)?;
    let q_sup = q_theta.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let tr = normal_trace(q, side);
    let trt = normal_trace(&p_theta, side);
    let trq = normal_trace(&p_q, side);
    let j = match side {
        Side::Left => 0,
        Side::Right => g.nx() - 1,
    };
    let flux = f.flux();
    let floor = q.trace_floor();
    let (mut mismatch, mut excess, mut active) = (0.0, 0.0_f64, 0.0);
    for i in 0..tr.len() {
        if tr[i].abs() > floor {
            mismatch += g.dt() * (trq[i] - tr[i] * qf(trt[i] / tr[i])).abs();
            active += g.dt();
        } else {
            let tol = 0.5 * q_sup * (flux[[i + 1, j]] - flux[[i, j]]).abs() + 1e-12;
            excess = excess.max(trq[i].abs() - q_sup * tr[i].abs() - tol);
        }
    }
    Ok(RenormReport { side, mismatch, inactive_excess: excess.max(0.0), active_measure: active })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub min_gap: f64,
    pub pass: bool,
}

/// `min ρ(θ_a − θ_b)`; passes iff `≥ −10⁻⁸·linf_bound`.
pub fn comparison_check(a: &Solution, b: &Solution, f: &FieldPair) -> Result<ComparisonReport> {
    if a.grid != b.grid || a.grid != f.grid {
        return Err(Error::Shape("comparison of solutions on different grids".into()));
    }
    let min_gap =
        ndarray::Zip::from(&a.theta).and(&b.theta).and(&f.rho).fold(f64::INFINITY, |m, x, y, r| m.min(r * (x - y)));
    let linf = a.linf_bound.max(b.linf_bound);
    Ok(ComparisonReport { min_gap, pass: min_gap >= -1e-8 * linf })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BvReport {
    /// Largest spatial variation over time levels.
    pub max_variation: f64,
    pub worst_level: usize,
    pub bound: f64,
    pub pass: bool,
}

/// Spatial variation of `θ(t,·)` on `{ρ > 0}` against the five-term bound.
pub fn bv_in_space_check(sol: &Solution, f: &FieldPair, data: &BoundaryData) -> BvReport {
    let g = &sol.grid;
    let tv = par::map_range(g.nt(), |i| {
        let row: Vec<f64> = (0..g.nx()).filter(|&j| f.rho[[i, j]] > 0.0).map(|j| sol.theta[[i, j]]).collect();
        if row.is_empty() {
            0.0
        } else {
            total_variation(&row).expect("non-empty")
        }
    });
    let (worst_level, max_variation) =
        tv.iter().copied().enumerate().fold((0, 0.0), |(k, m), (i, v)| if v > m { (i, v) } else { (k, m) });
    let bound = data.bv_space_bound();
    BvReport { max_variation, worst_level, bound, pass: max_variation <= bound + 1e-6 * (1.0 + bound) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{builtin, oscillating_a, sample_default, sample_scenario, Scenario};
    use crate::profile::Profile;

    fn drift(c: f64, data: BoundaryData, n: usize) -> (FieldPair, Potential) {
        let (t, a, b) = (data.t_max(), data.alpha(), data.beta());
        let s = Scenario::analytic("drift", t, a, b, |_, _| 1.0, move |_, _| c, data);
        let f = sample_scenario(&s, &s.grid(n, n).unwrap(), 1e-9).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        (f, p)
    }

    #[test]
    fn stationary_transport_keeps_initial_datum() {
        let data = BoundaryData::new(
            Profile::func(|x| x.sin()),
            Profile::Constant(5.0),
            Profile::Constant(-5.0),
            1.0,
            0.0,
            2.0,
        );
        let (f, p) = drift(0.0, data.clone(), 33);
        let sol = solve(&p, &f, &data, &f.grid).unwrap();
        for ((i, j), v) in sol.theta.indexed_iter() {
            assert!((v - f.grid.x(j).sin()).abs() < 1e-12, "({i},{j})");
            let exact = 1.0 - f.grid.x(j).cos();
            assert!((sol.q_tilde.values[[i, j]] - exact).abs() < 1e-3);
        }
    }

    #[test]
    fn unit_data_reproduce_q() {
        let data = BoundaryData::constant(1.0, 1.0, 0.0, 2.0);
        let (f, p) = drift(1.3, data.clone(), 65);
        let sol = solve(&p, &f, &data, &f.grid).unwrap();
        assert!(sol.theta.iter().all(|&v| v == 1.0));
        assert!(sol.q_tilde.max_abs_diff(&p) < 1e-12, "{}", sol.q_tilde.max_abs_diff(&p));
    }

    #[test]
    fn translated_step() {
        let data = BoundaryData::new(
            Profile::parse("0, 0.5, 1").unwrap(),
            Profile::Constant(0.0),
            Profile::Constant(0.0),
            1.0,
            0.0,
            2.0,
        );
        let (f, p) = drift(1.0, data.clone(), 129);
        let g = f.grid;
        let sol = solve(&p, &f, &data, &g).unwrap();
        let mut err = 0.0;
        for ((i, j), v) in sol.theta.indexed_iter() {
            let exact = if g.x(j) > 0.5 + g.t(i) { 1.0 } else { 0.0 };
            err += (v - exact).abs() * g.dx() * g.dt();
        }
        assert!(err <= 4.0 * g.dx() * 2.0, "{err}");
    }

    #[test]
    fn case_two_value_against_closed_form() {
        let data =
            BoundaryData::new(Profile::Constant(0.0), Profile::func(|t| t), Profile::Constant(0.0), 1.0, 0.0, 2.0);
        let (f, p) = drift(1.0, data.clone(), 257);
        let g = f.grid;
        let (i_bar, j_bar) = (200, 40);
        let t_star = g.t(i_bar) - g.x(j_bar);
        // Q̃ = ∫_0^{t_*} Tr[ρb](τ,α⁺)·τ dτ with Tr[ρb](·,α⁺) = −c
        let exact = -0.5 * t_star * t_star;
        let v = tilde_q_value(&p, &f, &data, i_bar, g.x(j_bar)).unwrap();
        assert!((v - exact).abs() < 4.0 * g.dt() * g.dt(), "{v} vs {exact}");
    }

    #[test]
    fn oscillating_solution_is_a_moving_step() {
        let s = builtin("oscillating-sign").unwrap();
        let f = sample_default(&s, 257, 257).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        let g = f.grid;
        let sol = solve(&p, &f, &s.boundary, &g).unwrap();
        let mut err = 0.0;
        for ((i, j), v) in sol.theta.indexed_iter() {
            let exact = if g.x(j) < oscillating_a(g.t(i)) { -1.0 } else { 1.0 };
            err += (v - exact).abs() * g.dx() * g.dt();
        }
        assert!(err < 4.0 * g.dx(), "{err}");
        assert!(sol.theta.iter().all(|v| v.abs() <= 1.0));
    }

    #[test]
    fn node_subset_matches_full_solve() {
        let s = builtin("positive-b").unwrap();
        let f = sample_default(&s, 65, 65).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        let sol = solve(&p, &f, &s.boundary, &f.grid).unwrap();
        let nodes = [(0, 3), (10, 0), (64, 64), (33, 17), (50, 40)];
        let v = solve_nodes(&p, &f, &s.boundary, &nodes).unwrap();
        for (k, &(i, j)) in nodes.iter().enumerate() {
            assert_eq!(v[k], sol.theta[[i, j]]);
        }
        let q = tilde_q_value(&p, &f, &s.boundary, 50, f.grid.x(40)).unwrap();
        assert_eq!(q, sol.q_tilde.values[[50, 40]]);
    }

    #[test]
    fn slabs_compose() {
        // fast drift: four slabs; the solution is still a translation
        let data = BoundaryData::new(
            Profile::parse("0, 0.5, 1").unwrap(),
            Profile::parse("2, 0.3, -1").unwrap(),
            Profile::Constant(0.0),
            1.0,
            0.0,
            2.0,
        );
        let (f, p) = drift(3.0, data.clone(), 129);
        let g = f.grid;
        let sol = solve(&p, &f, &data, &g).unwrap();
        assert_eq!(sol.slabs.len(), 4);
        let mut err = 0.0;
        for ((i, j), v) in sol.theta.indexed_iter() {
            let (t, x) = (g.t(i), g.x(j));
            let exact = if x >= 3.0 * t { data.theta0.eval(x - 3.0 * t) } else { data.theta_bar.eval(t - x / 3.0) };
            err += (v - exact).abs() * g.dx() * g.dt();
        }
        // three fronts with jumps 1, 2 and 3, each smeared by about a cell
        assert!(err < 16.0 * g.dx(), "{err}");
        let pt = theta_potential(&sol, &f).unwrap();
        let c = potential_consistency(&sol, &pt) / (g.dx() + g.dt());
        assert!(c < 8.0, "{c}");
    }

    #[test]
    fn bv_examples() {
        let data = BoundaryData::constant(0.7, 1.0, 0.0, 2.0);
        let (f, p) = drift(1.0, data.clone(), 33);
        let sol = solve(&p, &f, &data, &f.grid).unwrap();
        let r = bv_in_space_check(&sol, &f, &data);
        assert_eq!((r.max_variation, r.bound, r.pass), (0.0, 0.0, true));

        let data = BoundaryData::new(
            Profile::parse("-1, 0.5, 1").unwrap(),
            Profile::Constant(-1.0),
            Profile::Constant(1.0),
            1.0,
            0.0,
            2.0,
        );
        let (f, p) = drift(1.0, data.clone(), 65);
        let sol = solve(&p, &f, &data, &f.grid).unwrap();
        let r = bv_in_space_check(&sol, &f, &data);
        assert_eq!((r.max_variation, r.bound, r.pass), (2.0, 2.0, true));
    }

    #[test]
    fn identity_renormalization_is_exact() {
        let s = builtin("constant-drift").unwrap();
        let f = sample_default(&s, 65, 65).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        let sol = solve(&p, &f, &s.boundary, &f.grid).unwrap();
        for side in [Side::Left, Side::Right] {
            let r = renormalized_trace_check(&sol, &p, &f, |s| s, side).unwrap();
            assert!(r.mismatch <= 1e-12, "{r:?}");
            assert_eq!(r.inactive_excess, 0.0);
        }
    }

    #[test]
    fn comparison_examples() {
        let s = builtin("constant-drift").unwrap();
        let f = sample_default(&s, 65, 65).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        let a = solve(&p, &f, &s.boundary, &f.grid).unwrap();
        assert_eq!(comparison_check(&a, &a, &f).unwrap().min_gap, 0.0);
        let shifted = s.boundary.map(|v| v + 1.0);
        let b = solve(&p, &f, &shifted, &f.grid).unwrap();
        let r = comparison_check(&b, &a, &f).unwrap();
        assert!(r.pass && (r.min_gap - 1.0).abs() < 1e-12);
    }
}
