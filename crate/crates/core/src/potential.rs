//! Lipschitz potentials `Q` (`∂xQ = ρ`, `∂tQ = −bρ`) and `Q_θ` (weights
//! `ρθ`, `−bρθ`), and their boundary time-derivatives as discrete normal
//! traces.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::FieldPair;
use crate::grid::SpaceTimeGrid;
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub struct Potential {
    pub grid: SpaceTimeGrid,
    pub values: Array2<f64>,
    /// `max |ρθ|`.
    pub lip_x: f64,
    /// `max |bρθ|`.
    pub lip_t: f64,
    pub monotone_x: bool,
    /// Largest node difference between the two integration orders.
    pub discrepancy: f64,
    pub path_tol: f64,
    /// Largest amount by which rows were raised to restore monotonicity.
    pub monotone_repair: f64,
}

impl Potential {
    /// Row `i` value at position `x`, linearly interpolated.
    pub fn value_at(&self, i: usize, x: f64) -> f64 {
        let (j, w) = self.grid.locate_x(x);
        self.values[[i, j]] * (1.0 - w) + self.values[[i, j + 1]] * w
    }

    /// `‖values‖` difference on all nodes.
    pub fn max_abs_diff(&self, other: &Potential) -> f64 {
        self.values.iter().zip(other.values.iter()).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Floor below which a trace counts as zero: `10⁻⁸·lip_t`.
    pub fn trace_floor(&self) -> f64 {
        1e-8 * self.lip_t
    }

    /// Forward difference quotients in time along column `j`.
    pub fn column_time_derivative(&self, j: usize) -> Vec<f64> {
        let dt = self.grid.dt();
        (0..self.grid.nt() - 1).map(|i| (self.values[[i + 1, j]] - self.values[[i, j]]) / dt).collect()
    }
}

/// Integrates `ρθ` along `t = 0` and then `−bρθ` up every column with the
/// trapezoidal rule. The reverse order is used as a cross-check; for the
/// unweighted potential a discrepancy above
/// `20·residual·T·(β−α)/min(dt,dx) + 10⁻¹⁰` is an error.
pub fn build_potential(f: &FieldPair, weight: Option<&Array2<f64>>, g: &SpaceTimeGrid) -> Result<Potential> {
    if *g != f.grid {
        return Err(Error::Shape("potential grid differs from field grid".into()));
    }
    let (nt, nx) = (g.nt(), g.nx());
    let (dt, dx) = (g.dt(), g.dx());
    let mut a = f.rho.clone();
    if let Some(w) = weight {
        if w.shape() != [nt, nx] {
            return Err(Error::Shape("weight shape differs from grid".into()));
        }
        if w.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("weight must be finite".into()));
        }
        a *= w;
    }
    let flux = &a * &f.b;

    let mut values = Array2::<f64>::zeros((nt, nx));
    for j in 1..nx {
        values[[0, j]] = values[[0, j - 1]] + 0.5 * dx * (a[[0, j - 1]] + a[[0, j]]);
    }
    for i in 1..nt {
        for j in 0..nx {
            values[[i, j]] = values[[i - 1, j]] - 0.5 * dt * (flux[[i - 1, j]] + flux[[i, j]]);
        }
    }

    // reverse order: along x = α in t (identical to column 0), then rows in x
    let row_gap = par::map_range(nt, |i| {
        let mut q = values[[i, 0]];
        let mut worst = 0.0_f64;
        for j in 1..nx {
            q += 0.5 * dx * (a[[i, j - 1]] + a[[i, j]]);
            worst = worst.max((q - values[[i, j]]).abs());
        }
        worst
    });
    let discrepancy = row_gap.into_iter().fold(0.0, f64::max);
    let path_tol = 20.0 * f.residual * g.t_max() * g.length() / dt.min(dx) + 1e-10;
    if weight.is_none() && discrepancy > path_tol {
        return Err(Error::PathInconsistent { discrepancy, allowed: path_tol });
    }

    let mut monotone_repair = 0.0_f64;
    if weight.is_none() {
        for i in 0..nt {
            for j in 1..nx {
                let floor = values[[i, j - 1]];
                if values[[i, j]] < floor {
                    monotone_repair = monotone_repair.max(floor - values[[i, j]]);
                    values[[i, j]] = floor;
                }
            }
        }
    }

    let lip_x = a.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let lip_t = flux.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    Ok(Potential {
        grid: *g,
        values,
        lip_x,
        lip_t,
        monotone_x: weight.is_none(),
        discrepancy,
        path_tol,
        monotone_repair,
    })
}

/// Forward difference quotients along `x = α` (left: `Tr[ρbθ](·,α⁺)`) or
/// `x = β` (right: `−Tr[ρbθ](·,β⁻)`), one per time interval.
pub fn boundary_time_derivative(p: &Potential, side: Side) -> Vec<f64> {
    let j = match side {
        Side::Left => 0,
        Side::Right => p.grid.nx() - 1,
    };
    p.column_time_derivative(j)
}

/// Outward-normal boundary traces `Tr[·](·,α⁺)` and `Tr[·](·,β⁻)` per time
/// interval, with the sign of the right side flipped back.
pub fn normal_trace(p: &Potential, side: Side) -> Vec<f64> {
    let d = boundary_time_derivative(p, side);
    match side {
        Side::Left => d,
        Side::Right => d.into_iter().map(|v| -v).collect(),
    }
}
