use crate::error::{Error, Result};

/// Uniform node-centred grid on `[0,T] × [α,β]`. Node `(i,j)` sits at
/// `(i·dt, α + j·dx)`, always recomputed from the indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceTimeGrid {
    t_max: f64,
    x_min: f64,
    x_max: f64,
    nt: usize,
    nx: usize,
}

impl SpaceTimeGrid {
    pub fn new(t_max: f64, alpha: f64, beta: f64, nt: usize, nx: usize) -> Result<Self> {
        if !(t_max > 0.0) || !t_max.is_finite() {
            return Err(Error::Grid("non-positive time extent".into()));
        }
        if !(beta > alpha) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Grid("non-positive space extent".into()));
        }
        if nt < 2 {
            return Err(Error::Grid("nt must be ≥ 2".into()));
        }
        if nx < 2 {
            return Err(Error::Grid("nx must be ≥ 2".into()));
        }
        Ok(Self { t_max, x_min: alpha, x_max: beta, nt, nx })
    }

    pub fn t_min(&self) -> f64 {
        0.0
    }
    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn x_min(&self) -> f64 {
        self.x_min
    }
    pub fn x_max(&self) -> f64 {
        self.x_max
    }
    pub fn nt(&self) -> usize {
        self.nt
    }
    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn dt(&self) -> f64 {
        self.t_max / (self.nt - 1) as f64
    }
    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn t(&self, i: usize) -> f64 {
        i as f64 * self.dt()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    pub fn contains(&self, t: f64, x: f64) -> bool {
        (0.0..=self.t_max).contains(&t) && (self.x_min..=self.x_max).contains(&x)
    }

    /// Cell index and fractional offset of `x`, clamped to the grid.
    pub fn locate_x(&self, x: f64) -> (usize, f64) {
        locate(x - self.x_min, self.dx(), self.nx)
    }

    /// Cell index and fractional offset of `t`, clamped to the grid.
    pub fn locate_t(&self, t: f64) -> (usize, f64) {
        locate(t, self.dt(), self.nt)
    }

    /// Index of the node nearest to `x`.
    pub fn nearest_x(&self, x: f64) -> usize {
        let (j, f) = self.locate_x(x);
        if f > 0.5 {
            j + 1
        } else {
            j
        }
    }

    /// Index of the time level nearest to `t`.
    pub fn nearest_t(&self, t: f64) -> usize {
        let (i, f) = self.locate_t(t);
        if f > 0.5 {
            i + 1
        } else {
            i
        }
    }

    /// Grid with the same extent and counts `(n−1)·k + 1`.
    pub fn refined(&self, k: usize) -> Self {
        Self { nt: (self.nt - 1) * k + 1, nx: (self.nx - 1) * k + 1, ..*self }
    }
}

fn locate(offset: f64, h: f64, n: usize) -> (usize, f64) {
    let s = (offset / h).clamp(0.0, (n - 1) as f64);
    let k = (s.floor() as usize).min(n - 2);
    (k, s - k as f64)
}

pub fn build_grid(t_max: f64, alpha: f64, beta: f64, nt: usize, nx: usize) -> Result<SpaceTimeGrid> {
    SpaceTimeGrid::new(t_max, alpha, beta, nt, nx)
}
