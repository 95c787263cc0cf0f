//! Reference solutions from the smoothing route: fields extended past the
//! domain, mollified with one-sided kernels, data padded and smoothed, and a
//! classical transport solve along RK4 characteristics.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::{bilinear, FieldPair};
use crate::grid::SpaceTimeGrid;
use crate::par;
use crate::potential::{normal_trace, Potential, Side};
use crate::profile::{BoundaryData, Profile};

/// Fine lattice cells per solver cell for the mollified fields.
pub const REFINE: usize = 4;
/// Samples of smoothed data profiles.
const DATA_SAMPLES: usize = 4097;
/// Quadrature points per kernel width when smoothing data.
const DATA_QUAD: usize = 64;

/// Antiderivative of the bump `30 z²(1−z)²` on `[0,1]`.
fn kernel_cdf(z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    z * z * z * (10.0 - 15.0 * z + 6.0 * z * z)
}

/// Cell masses of the bump split into `m` equal pieces; they sum to one.
fn cell_weights(m: usize) -> Vec<f64> {
    (0..m).map(|k| kernel_cdf((k + 1) as f64 / m as f64) - kernel_cdf(k as f64 / m as f64)).collect()
}

/// Node weights `v_0..=v_m` for a one-sided lattice convolution of width
/// `m` cells (each cell mass shared by its two end nodes).
fn node_weights(m: usize) -> Vec<f64> {
    let w = cell_weights(m);
    let mut v = vec![0.0; m + 1];
    for (k, wk) in w.iter().enumerate() {
        v[k] += 0.5 * wk;
        v[k + 1] += 0.5 * wk;
    }
    v
}

/// The smooth cutoff: 1 up to `α + δ`, 0 from `β − δ`, `δ = (β−α)/10`.
pub fn cutoff(alpha: f64, beta: f64, x: f64) -> f64 {
    let delta = (beta - alpha) / 10.0;
    let s = (x - alpha - delta) / (beta - alpha - 2.0 * delta);
    let e = |s: f64| if s <= 0.0 { 0.0 } else { (-1.0 / s).exp() };
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        1.0 - e(s) / (e(s) + e(1.0 - s))
    }
}

/// `(A, B)`: `(ρ, bρ)` inside, `(1, boundary flux)` beside the domain,
/// `(ρ(T,·), 0)` after `T`.
#[derive(Clone, Debug)]
pub struct ExtendedFields {
    field: FieldPair,
    flux: Array2<f64>,
    /// `−Tr[bρ](·,α⁺)` as nodal values.
    left: Vec<f64>,
    /// `Tr[bρ](·,β⁻)` as nodal values.
    right: Vec<f64>,
    pub flux_sup: f64,
}

impl ExtendedFields {
    pub fn grid(&self) -> &SpaceTimeGrid {
        &self.field.grid
    }

    /// Piecewise-linear boundary flux through the nodes `t_i`. Its mean
    /// over each interval is that interval's trace (the boundary column of
    /// the potential is the trapezoidal integral of the flux), so it is the
    /// same trace, joined continuously to the inside.
    fn trace_at(&self, tr: &[f64], t: f64) -> f64 {
        let (i, w) = self.grid().locate_t(t);
        tr[i] * (1.0 - w) + tr[i + 1] * w
    }

    pub fn a(&self, t: f64, x: f64) -> f64 {
        let g = self.grid();
        if x < g.x_min() || x > g.x_max() {
            1.0
        } else {
            bilinear(g, &self.field.rho, t.min(g.t_max()), x)
        }
    }

    pub fn b(&self, t: f64, x: f64) -> f64 {
        let g = self.grid();
        if t > g.t_max() {
            0.0
        } else if x < g.x_min() {
            self.trace_at(&self.left, t)
        } else if x > g.x_max() {
            self.trace_at(&self.right, t)
        } else {
            bilinear(g, &self.flux, t, x)
        }
    }
}

/// Nodal values whose consecutive means are the interval traces `tr`,
/// starting from `first`.
fn nodal_trace(tr: &[f64], first: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(tr.len() + 1);
    out.push(first);
    for m in tr {
        let prev = *out.last().expect("non-empty");
        out.push(2.0 * m - prev);
    }
    out
}

pub fn extend_fields(f: &FieldPair, p: &Potential, g: &SpaceTimeGrid) -> Result<ExtendedFields> {
    if f.grid != *g || p.grid != *g {
        return Err(Error::Shape("extend_fields: grids differ".into()));
    }
    let flux = f.flux();
    let left = nodal_trace(&normal_trace(p, Side::Left).into_iter().map(|v| -v).collect::<Vec<_>>(), flux[[0, 0]]);
    let right = nodal_trace(&normal_trace(p, Side::Right), flux[[0, g.nx() - 1]]);
    let flux_sup = flux.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(ExtendedFields { field: f.clone(), flux, left, right, flux_sup })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DataVariant {
    Bv,
    Vanishing,
}

#[derive(Clone, Debug)]
pub struct MollifiedProblem {
    pub n: usize,
    /// Fine lattice on which `ρ_n` and `b_n` are tabulated.
    pub grid: SpaceTimeGrid,
    pub rho_n: Array2<f64>,
    pub b_n: Array2<f64>,
    pub bn_sup: f64,
    pub data_n: BoundaryData,
    pub positive: bool,
}

impl MollifiedProblem {
    pub fn rho_at(&self, t: f64, x: f64) -> f64 {
        bilinear(&self.grid, &self.rho_n, t, x)
    }
    pub fn b_at(&self, t: f64, x: f64) -> f64 {
        bilinear(&self.grid, &self.b_n, t, x)
    }

    /// `‖∂tρ_n + ∂x(b_nρ_n)‖_{L¹}` by box differences on the cells of `g`.
    pub fn h_norm(&self, g: &SpaceTimeGrid) -> f64 {
        let rows = par::map_range(g.nt(), |i| {
            (0..g.nx())
                .map(|j| {
                    let (t, x) = (g.t(i), g.x(j));
                    let r = self.rho_at(t, x);
                    (r, r * self.b_at(t, x))
                })
                .collect::<Vec<_>>()
        });
        let (ht, hx) = (g.dt(), g.dx());
        let cells = par::map_range(g.nt() - 1, |i| {
            let (lo, hi) = (&rows[i], &rows[i + 1]);
            let mut s = 0.0;
            for j in 0..g.nx() - 1 {
                let dt = (hi[j].0 + hi[j + 1].0 - lo[j].0 - lo[j + 1].0) / (2.0 * ht);
                let dx = (lo[j + 1].1 + hi[j + 1].1 - lo[j].1 - hi[j].1) / (2.0 * hx);
                s += (dt + dx).abs();
            }
            s * ht * hx
        });
        cells.iter().sum()
    }
}

/// Width in fine cells of a kernel of physical width `1/n`, at least 4.
fn width(n: usize, h: f64) -> usize {
    ((1.0 / (n as f64 * h)).round() as usize).max(4)
}

/// Mollifies `(A, B)` on the solver grid refined `REFINE` times. The time
/// kernel looks forward; the space kernel looks left (`γ_n`) or right
/// (`η_n`), blended by the cutoff unless `positive` selects `γ_n` alone
/// with `1/n` added to the flux as well.
pub fn mollify(ext: &ExtendedFields, data: &BoundaryData, n: usize, positive: bool) -> Result<MollifiedProblem> {
    if n == 0 {
        return Err(Error::Data("mollifier index must be ≥ 1".into()));
    }
    let g = ext.grid().refined(REFINE);
    let (mt, mx) = (width(n, g.dt()), width(n, g.dx()));
    let (nt, nx) = (g.nt(), g.nx());
    let nxp = nx + 2 * mx;
    let xp = |jj: usize| g.x_min() + (jj as f64 - mx as f64) * g.dx();
    let tp = |ii: usize| g.t_min() + ii as f64 * g.dt();
    let vt = node_weights(mt);
    let vx = node_weights(mx);

    // samples on the padded lattice, then the forward time convolution
    // restricted to the domain rows
    let sample = |field: &(dyn Fn(f64, f64) -> f64 + Sync)| -> Vec<Vec<f64>> {
        par::map_range(nt + mt, |ii| (0..nxp).map(|jj| field(tp(ii), xp(jj))).collect())
    };
    let time_conv = |padded: &[Vec<f64>]| -> Vec<Vec<f64>> {
        par::map_range(nt, |i| {
            let mut row = vec![0.0; nxp];
            for (k, w) in vt.iter().enumerate() {
                for (r, v) in row.iter_mut().zip(&padded[i + k]) {
                    *r += w * v;
                }
            }
            row
        })
    };
    let ta = time_conv(&sample(&|t, x| ext.a(t, x)));
    let tb = time_conv(&sample(&|t, x| ext.b(t, x)));
    let zeta: Vec<f64> = (0..nx).map(|j| cutoff(g.x_min(), g.x_max(), g.x(j))).collect();
    let inv_n = 1.0 / n as f64;

    let conv_row = |row: &[f64], j: usize, right: bool| -> f64 {
        let c = j + mx;
        vx.iter().enumerate().map(|(k, w)| w * if right { row[c + k] } else { row[c - k] }).sum()
    };
    let rows = par::map_range(nt, |i| {
        let mut rho = vec![0.0; nx];
        let mut b = vec![0.0; nx];
        for j in 0..nx {
            let (r, q) = if positive {
                (conv_row(&ta[i], j, false) + inv_n, conv_row(&tb[i], j, false) + inv_n)
            } else {
                let z = zeta[j];
                let r = z * conv_row(&ta[i], j, false) + (1.0 - z) * conv_row(&ta[i], j, true) + inv_n;
                let q = z * conv_row(&tb[i], j, false) + (1.0 - z) * conv_row(&tb[i], j, true);
                (r, q)
            };
            rho[j] = r;
            b[j] = q / r;
        }
        (rho, b)
    });
    let mut rho_n = Array2::zeros((nt, nx));
    let mut b_n = Array2::zeros((nt, nx));
    for (i, (r, b)) in rows.into_iter().enumerate() {
        for j in 0..nx {
            rho_n[[i, j]] = r[j];
            b_n[[i, j]] = b[j];
        }
    }
    let bn_sup = b_n.iter().fold(0.0_f64, |m: f64, v: &f64| m.max(v.abs()));
    Ok(MollifiedProblem { n, grid: g, rho_n, b_n, bn_sup, data_n: smooth_data(data, n, DataVariant::Bv), positive })
}

/// One-sided forward smoothing of `p` at scale `1/n`, tabulated on `[lo, hi]`.
fn smooth_profile(p: impl Fn(f64) -> f64 + Sync, n: usize, lo: f64, hi: f64) -> Profile {
    let w = cell_weights(DATA_QUAD);
    let h = 1.0 / (n * DATA_QUAD) as f64;
    let step = (hi - lo) / (DATA_SAMPLES - 1) as f64;
    let samples = par::map_range(DATA_SAMPLES, |k| {
        let s = lo + k as f64 * step;
        w.iter().enumerate().map(|(q, wq)| wq * p(s + (q as f64 + 0.5) * h)).sum()
    });
    Profile::Table { lo, hi, samples }
}

/// Padded and smoothed data. `Bv` pads with the adjacent one-sided limits
/// of `θ₀` near `t = 0` and holds the last value after `T`; `Vanishing`
/// pads with zeros and also cuts `θ₀` within `2/n` of the endpoints.
pub fn smooth_data(data: &BoundaryData, n: usize, variant: DataVariant) -> BoundaryData {
    let (t_max, a, b) = (data.t_max(), data.alpha(), data.beta());
    let lead = 2.0 / n as f64;
    let pad_time = |p: &Profile, start: f64| {
        let p = p.clone();
        let end = match variant {
            DataVariant::Bv => p.limit_left(0.0, t_max),
            DataVariant::Vanishing => 0.0,
        };
        move |t: f64| {
            if t < lead {
                start
            } else if t < t_max {
                p.eval(t)
            } else {
                end
            }
        }
    };
    let (bar_start, under_start) = match variant {
        DataVariant::Bv => (data.theta0_at_alpha_plus, data.theta0_at_beta_minus),
        DataVariant::Vanishing => (0.0, 0.0),
    };
    let theta_bar = smooth_profile(pad_time(&data.theta_bar, bar_start), n, 0.0, t_max);
    let theta_under = smooth_profile(pad_time(&data.theta_under, under_start), n, 0.0, t_max);
    let p0 = data.theta0.clone();
    let (l, r) = (data.theta0_at_alpha_plus, data.theta0_at_beta_minus);
    let theta0 = match variant {
        DataVariant::Bv => smooth_profile(
            move |x| {
                if x < a {
                    l
                } else if x > b {
                    r
                } else {
                    p0.eval(x)
                }
            },
            n,
            a,
            b,
        ),
        DataVariant::Vanishing => {
            smooth_profile(move |x| if x < a + lead || x > b - lead { 0.0 } else { p0.eval(x) }, n, a, b)
        }
    };
    BoundaryData::new(theta0, theta_bar, theta_under, t_max, a, b)
}

/// Flat row-major copy of a node table with a branch-light bilinear lookup,
/// clamped to the lattice.
struct Lattice {
    v: Vec<f64>,
    nx: usize,
    t0: f64,
    x0: f64,
    inv_dt: f64,
    inv_dx: f64,
    it_max: f64,
    jx_max: f64,
}

impl Lattice {
    fn new(g: &SpaceTimeGrid, v: &Array2<f64>) -> Self {
        Self {
            v: v.iter().copied().collect(),
            nx: g.nx(),
            t0: g.t_min(),
            x0: g.x_min(),
            inv_dt: 1.0 / g.dt(),
            inv_dx: 1.0 / g.dx(),
            it_max: (g.nt() - 2) as f64,
            jx_max: (g.nx() - 2) as f64,
        }
    }

    #[inline]
    fn eval(&self, t: f64, x: f64) -> f64 {
        let s = ((t - self.t0) * self.inv_dt).max(0.0);
        let r = ((x - self.x0) * self.inv_dx).max(0.0);
        // non-negative, so truncation is floor
        let i = ((s as usize) as f64).min(self.it_max);
        let j = ((r as usize) as f64).min(self.jx_max);
        let (ft, fx) = ((s - i).min(1.0), (r - j).min(1.0));
        let k = i as usize * self.nx + j as usize;
        let (a, b) = (self.v[k], self.v[k + 1]);
        let (c, d) = (self.v[k + self.nx], self.v[k + self.nx + 1]);
        let lo = a + (b - a) * fx;
        let hi = c + (d - c) * fx;
        lo + (hi - lo) * ft
    }
}

/// `θ_n` on the nodes of `g`: each backward characteristic of `b_n` is
/// integrated with RK4 at step `dt/4` until it reaches `t = 0` or leaves
/// through a side; crossings are located by linear interpolation.
pub fn solve_smooth(mp: &MollifiedProblem, g: &SpaceTimeGrid) -> Result<Array2<f64>> {
    let h = g.dt() / 4.0;
    if !(h > f64::EPSILON * g.t_max().max(1.0)) {
        return Err(Error::StepUnderflow);
    }
    let (a, b) = (g.x_min(), g.x_max());
    let table = Lattice::new(&mp.grid, &mp.b_n);
    let vel = |t: f64, x: f64| table.eval(t, x);
    let data = &mp.data_n;
    let node = |i: usize, j: usize| -> f64 {
        let (mut t, mut x) = (g.t(i), g.x(j));
        let steps = 4 * i;
        for _ in 0..steps {
            let k1 = vel(t, x);
            let k2 = vel(t - 0.5 * h, x - 0.5 * h * k1);
            let k3 = vel(t - 0.5 * h, x - 0.5 * h * k2);
            let k4 = vel(t - h, x - h * k3);
            let xn = x - h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            let tn = (t - h).max(0.0);
            if xn < a || (x <= a && xn <= a && k1 > 0.0) {
                let w = if x > a { (x - a) / (x - xn) } else { 0.0 };
                return data.theta_bar.eval(t - w * (t - tn));
            }
            if xn > b || (x >= b && xn >= b && k1 < 0.0) {
                let w = if x < b { (b - x) / (xn - x) } else { 0.0 };
                return data.theta_under.eval(t - w * (t - tn));
            }
            t = tn;
            x = xn;
        }
        data.theta0.eval(x)
    };
    let rows = par::map_range(g.nt(), |i| (0..g.nx()).map(|j| node(i, j)).collect::<Vec<_>>());
    let mut out = Array2::zeros((g.nt(), g.nx()));
    for (i, r) in rows.into_iter().enumerate() {
        for (j, v) in r.into_iter().enumerate() {
            out[[i, j]] = v;
        }
    }
    Ok(out)
}

/// `‖ρθ − ρ_nθ_n‖_{L¹}` and `‖ρθ‖_{L¹}` on the nodes of `f.grid`.
pub fn l1_distance(f: &FieldPair, theta: &Array2<f64>, mp: &MollifiedProblem, theta_n: &Array2<f64>) -> (f64, f64) {
    let g = &f.grid;
    let cell = g.dt() * g.dx();
    let mut dist = 0.0;
    let mut norm = 0.0;
    for ((i, j), th) in theta.indexed_iter() {
        let r = f.rho[[i, j]] * th;
        let rn = mp.rho_at(g.t(i), g.x(j)) * theta_n[[i, j]];
        dist += (r - rn).abs() * cell;
        norm += r.abs() * cell;
    }
    (dist, norm)
}

/// `∫ |b_nρ_n(·,α) + Tr[bρ](·,α⁺)| dt` over the solver time intervals.
pub fn left_flux_gap(mp: &MollifiedProblem, p: &Potential) -> f64 {
    let g = &p.grid;
    normal_trace(p, Side::Left)
        .iter()
        .enumerate()
        .map(|(i, tr)| {
            let t = g.t(i) + 0.5 * g.dt();
            let flux = mp.rho_at(t, g.x_min()) * mp.b_at(t, g.x_min());
            (flux + tr).abs() * g.dt()
        })
        .sum()
}

/// `‖∂tρ + ∂x(bρ)‖_{L¹}` of the sampled pair by box differences: the
/// resolution floor below which `‖h_n‖` cannot be told apart from zero.
pub fn field_box_residual(f: &FieldPair) -> f64 {
    let g = &f.grid;
    let flux = f.flux();
    let (r, q) = (&f.rho, &flux);
    let (ht, hx) = (g.dt(), g.dx());
    let cells = par::map_range(g.nt() - 1, |i| {
        let mut s = 0.0;
        for j in 0..g.nx() - 1 {
            let dt = (r[[i + 1, j]] + r[[i + 1, j + 1]] - r[[i, j]] - r[[i, j + 1]]) / (2.0 * ht);
            let dx = (q[[i, j + 1]] + q[[i + 1, j + 1]] - q[[i, j]] - q[[i + 1, j]]) / (2.0 * hx);
            s += (dt + dx).abs();
        }
        s * ht * hx
    });
    cells.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{builtin, sample_default};
    use crate::potential::build_potential;

    fn setup(label: &str, n: usize) -> (FieldPair, Potential, ExtendedFields) {
        let f = sample_default(&builtin(label).unwrap(), n, n).unwrap();
        let p = build_potential(&f, None, &f.grid).unwrap();
        let ext = extend_fields(&f, &p, &f.grid).unwrap();
        (f, p, ext)
    }

    #[test]
    fn kernel_weights_have_unit_mass() {
        for m in [1, 4, 7, 64] {
            assert!((cell_weights(m).iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let v = node_weights(m);
            assert_eq!(v.len(), m + 1);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!(v.iter().all(|&w| w >= 0.0));
        }
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.0, 1.0, 0.0), 1.0);
        assert_eq!(cutoff(0.0, 1.0, 0.1), 1.0);
        assert_eq!(cutoff(0.0, 1.0, 0.9), 0.0);
        assert!((cutoff(-1.0, 1.0, 0.0) - 0.5).abs() < 1e-15);
        let xs: Vec<f64> = (0..=200).map(|k| k as f64 / 200.0).collect();
        assert!(xs.windows(2).all(|w| cutoff(0.0, 1.0, w[1]) <= cutoff(0.0, 1.0, w[0])));
    }

    #[test]
    fn constant_data_survive_smoothing() {
        let data = BoundaryData::constant(0.7, 1.0, -1.0, 2.0);
        let s = smooth_data(&data, 8, DataVariant::Bv);
        for k in 0..=50 {
            let t = k as f64 / 50.0;
            assert!((s.theta_bar.eval(t) - 0.7).abs() < 1e-12);
            assert!((s.theta_under.eval(t) - 0.7).abs() < 1e-12);
            assert!((s.theta0.eval(-1.0 + 3.0 * t) - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn vanishing_variant_is_zero_near_corners() {
        let data = BoundaryData::constant(1.0, 1.0, 0.0, 1.0);
        let n = 8;
        let s = smooth_data(&data, n, DataVariant::Vanishing);
        let lead = 2.0 / n as f64;
        assert!(s.theta_bar.eval(0.0).abs() < 1e-12);
        assert!(s.theta_under.eval(0.5 * lead).abs() < 1e-12);
        assert!(s.theta0.eval(0.0).abs() < 1e-12 && s.theta0.eval(1.0).abs() < 1e-12);
        assert!((s.theta_bar.eval(0.5) - 1.0).abs() < 1e-12);
        assert!((s.theta0.eval(0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extension_outside_domain() {
        let (f, _, ext) = setup("positive-b", 33);
        let g = f.grid;
        assert_eq!(ext.a(0.3, g.x_min() - 1.0), 1.0);
        assert_eq!(ext.b(g.t_max() + 0.1, 0.5 * (g.x_min() + g.x_max())), 0.0);
        assert_eq!(ext.a(g.t_max() + 0.1, g.x(5)), f.rho[[g.nt() - 1, 5]]);
        assert_eq!(ext.b(g.t(3), g.x(7)), f.rho[[3, 7]] * f.b[[3, 7]]);
        // interval means of the exterior flux are the boundary traces
        let tr = normal_trace(&build_potential(&f, None, &g).unwrap(), Side::Left);
        for (i, m) in tr.iter().enumerate() {
            let mean = 0.5 * (ext.b(g.t(i), g.x_min() - 0.1) + ext.b(g.t(i + 1), g.x_min() - 0.1));
            assert!((mean + m).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_drift_stays_constant() {
        let (_, _, ext) = setup("constant-drift", 33);
        let data = BoundaryData::constant(1.0, 1.0, 0.0, 2.0);
        for n in [4, 16] {
            let mp = mollify(&ext, &data, n, true).unwrap();
            let g = mp.grid;
            // the forward time kernel sees B = 0 past T
            let reach = 1.0 / n as f64 + 4.0 * g.dt();
            for ((i, _), &b) in mp.b_n.indexed_iter().filter(|((i, _), _)| g.t(*i) + reach < g.t_max()) {
                assert!((b - 1.0).abs() < 1e-12, "t = {}: {b}", g.t(i));
            }
            assert!(mp.rho_n.iter().all(|&r| (r - 1.0 - 1.0 / n as f64).abs() < 1e-12));
        }
    }

    #[test]
    fn velocity_bound() {
        for label in ["positive-b", "oscillating-sign", "vacuum-patch"] {
            let (f, _, ext) = setup(label, 33);
            let positive = f.b.iter().all(|&v| v >= 0.0);
            for n in [4, 8] {
                let mp = mollify(&ext, &BoundaryData::constant(1.0, 1.0, 0.0, 1.0), n, positive).unwrap();
                let bound = (ext.flux_sup + 1.0 / n as f64) * n as f64;
                assert!(mp.bn_sup <= bound, "{label} n={n}: {} > {bound}", mp.bn_sup);
                assert!(mp.rho_n.iter().all(|&r| r >= 1.0 / n as f64 - 1e-15));
            }
        }
    }

    #[test]
    fn smooth_solution_within_data_range() {
        let s = builtin("positive-b").unwrap();
        let (f, _, ext) = setup("positive-b", 33);
        let (lo, hi) = s.boundary.range();
        let mp = mollify(&ext, &s.boundary, 8, true).unwrap();
        let th = solve_smooth(&mp, &f.grid).unwrap();
        assert!(th.iter().all(|&v| v >= lo - 1e-9 && v <= hi + 1e-9), "range [{lo}, {hi}]");
    }

    #[test]
    fn unit_data_give_unit_solution() {
        let (f, _, ext) = setup("oscillating-sign", 33);
        let data = BoundaryData::constant(1.0, f.grid.t_max(), f.grid.x_min(), f.grid.x_max());
        let mp = mollify(&ext, &data, 8, false).unwrap();
        let th = solve_smooth(&mp, &f.grid).unwrap();
        assert!(th.iter().all(|&v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn left_flux_gap_shrinks() {
        let (f, p, ext) = setup("positive-b", 65);
        let data = BoundaryData::constant(1.0, f.grid.t_max(), f.grid.x_min(), f.grid.x_max());
        let gaps: Vec<f64> =
            [4, 8, 16].iter().map(|&n| left_flux_gap(&mollify(&ext, &data, n, true).unwrap(), &p)).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    }

    #[test]
    fn zero_index_rejected() {
        let (_, _, ext) = setup("constant-drift", 17);
        assert!(mollify(&ext, &BoundaryData::constant(1.0, 1.0, 0.0, 2.0), 0, true).is_err());
    }
}
