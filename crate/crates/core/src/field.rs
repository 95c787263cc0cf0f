//! Scenarios, sampled `(ρ, b)` pairs and the discrete continuity residual.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::SpaceTimeGrid;
use crate::profile::{BoundaryData, Profile};

pub type FieldFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Density and velocity sampled on a grid, with the continuity residual
/// measured at construction.
#[derive(Clone, Debug)]
pub struct FieldPair {
    pub grid: SpaceTimeGrid,
    pub rho: Array2<f64>,
    pub b: Array2<f64>,
    pub b_sup: f64,
    pub residual: f64,
    pub tol: f64,
}

impl FieldPair {
    /// Validates `ρ ≥ 0`, the shapes and the residual bound.
    pub fn new(grid: SpaceTimeGrid, rho: Array2<f64>, b: Array2<f64>, tol: f64) -> Result<Self> {
        let shape = [grid.nt(), grid.nx()];
        if rho.shape() != shape || b.shape() != shape {
            return Err(Error::Shape(format!(
                "fields {:?} / {:?} on a {}×{} grid",
                rho.shape(),
                b.shape(),
                grid.nt(),
                grid.nx()
            )));
        }
        if let Some(((i, j), &v)) = rho.indexed_iter().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeDensity { i, j, value: v });
        }
        if b.iter().any(|v| !v.is_finite()) || rho.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("fields must be finite".into()));
        }
        let b_sup = b.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let residual = continuity_residual(&rho, &b, &grid)?;
        if !(residual <= tol) {
            return Err(Error::NotNearlyIncompressible { residual, tol });
        }
        Ok(Self { grid, rho, b, b_sup, residual, tol })
    }

    /// `bρ` node-wise.
    pub fn flux(&self) -> Array2<f64> {
        &self.b * &self.rho
    }

    /// Default residual tolerance `10·(dx² + dt²)·(1 + b_sup)` for a grid.
    pub fn default_tol(grid: &SpaceTimeGrid, b_sup: f64) -> f64 {
        10.0 * (grid.dx().powi(2) + grid.dt().powi(2)) * (1.0 + b_sup)
    }
}

/// `max |Dₜρ + Dₓ(bρ)| · min(dt, dx)` over interior nodes, central
/// differences in both directions.
pub fn continuity_residual(rho: &Array2<f64>, b: &Array2<f64>, g: &SpaceTimeGrid) -> Result<f64> {
    let shape = [g.nt(), g.nx()];
    if rho.shape() != shape || b.shape() != shape {
        return Err(Error::Shape("continuity_residual: field shape differs from grid".into()));
    }
    let (dt, dx) = (g.dt(), g.dx());
    let mut worst = 0.0_f64;
    for i in 1..g.nt().saturating_sub(1) {
        for j in 1..g.nx().saturating_sub(1) {
            let dtr = (rho[[i + 1, j]] - rho[[i - 1, j]]) / (2.0 * dt);
            let dxf = (b[[i, j + 1]] * rho[[i, j + 1]] - b[[i, j - 1]] * rho[[i, j - 1]]) / (2.0 * dx);
            worst = worst.max((dtr + dxf).abs());
        }
    }
    Ok(worst * dt.min(dx))
}

/// `Σ |v_{k+1} − v_k|`.
pub fn total_variation(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    Ok(samples.windows(2).map(|w| (w[1] - w[0]).abs()).sum())
}

#[derive(Clone)]
pub enum ScenarioKind {
    Analytic {
        rho: FieldFn,
        b: FieldFn,
    },
    /// Node tables on their own grid; bilinear interpolation elsewhere.
    Tabulated {
        grid: SpaceTimeGrid,
        rho: Array2<f64>,
        b: Array2<f64>,
    },
}

#[derive(Clone)]
pub struct Scenario {
    pub label: String,
    pub t_max: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kind: ScenarioKind,
    pub boundary: BoundaryData,
}

impl fmt::Debug for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ScenarioKind::Analytic { .. } => "analytic",
            ScenarioKind::Tabulated { .. } => "tabulated",
        };
        write!(f, "Scenario({}, {kind}, T={}, [{}, {}])", self.label, self.t_max, self.alpha, self.beta)
    }
}

impl Scenario {
    pub fn analytic(
        label: &str,
        t_max: f64,
        alpha: f64,
        beta: f64,
        rho: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        b: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        boundary: BoundaryData,
    ) -> Self {
        Self {
            label: label.to_string(),
            t_max,
            alpha,
            beta,
            kind: ScenarioKind::Analytic { rho: Arc::new(rho), b: Arc::new(b) },
            boundary,
        }
    }

    pub fn tabulated(
        label: &str,
        grid: SpaceTimeGrid,
        rho: Array2<f64>,
        b: Array2<f64>,
        boundary: BoundaryData,
    ) -> Result<Self> {
        let shape = [grid.nt(), grid.nx()];
        if rho.shape() != shape || b.shape() != shape {
            return Err(Error::Shape("tabulated scenario: table shape differs from grid".into()));
        }
        if let Some(((i, j), &v)) = rho.indexed_iter().find(|(_, v)| !(**v >= 0.0)) {
            return Err(Error::NegativeDensity { i, j, value: v });
        }
        Ok(Self {
            label: label.to_string(),
            t_max: grid.t_max(),
            alpha: grid.x_min(),
            beta: grid.x_max(),
            kind: ScenarioKind::Tabulated { grid, rho, b },
            boundary,
        })
    }

    /// Same fields, different data.
    pub fn with_boundary(&self, boundary: BoundaryData) -> Self {
        Self { boundary, ..self.clone() }
    }

    pub fn grid(&self, nt: usize, nx: usize) -> Result<SpaceTimeGrid> {
        SpaceTimeGrid::new(self.t_max, self.alpha, self.beta, nt, nx)
    }

    /// The table grid of a tabulated scenario.
    pub fn native_grid(&self) -> Option<SpaceTimeGrid> {
        match &self.kind {
            ScenarioKind::Tabulated { grid, .. } => Some(*grid),
            ScenarioKind::Analytic { .. } => None,
        }
    }

    pub fn rho_at(&self, t: f64, x: f64) -> f64 {
        match &self.kind {
            ScenarioKind::Analytic { rho, .. } => rho(t, x),
            ScenarioKind::Tabulated { grid, rho, .. } => bilinear(grid, rho, t, x),
        }
    }

    pub fn b_at(&self, t: f64, x: f64) -> f64 {
        match &self.kind {
            ScenarioKind::Analytic { b, .. } => b(t, x),
            ScenarioKind::Tabulated { grid, b, .. } => bilinear(grid, b, t, x),
        }
    }
}

/// Bilinear interpolation of a node table, clamped to the grid.
pub fn bilinear(g: &SpaceTimeGrid, v: &Array2<f64>, t: f64, x: f64) -> f64 {
    let (i, ft) = g.locate_t(t);
    let (j, fx) = g.locate_x(x);
    let a = v[[i, j]] * (1.0 - fx) + v[[i, j + 1]] * fx;
    let c = v[[i + 1, j]] * (1.0 - fx) + v[[i + 1, j + 1]] * fx;
    a * (1.0 - ft) + c * ft
}

/// Samples `s` at the nodes of `g` and validates the pair against `tol`.
pub fn sample_scenario(s: &Scenario, g: &SpaceTimeGrid, tol: f64) -> Result<FieldPair> {
    if !(tol > 0.0) {
        return Err(Error::Data("tolerance must be positive".into()));
    }
    let (rho, b) = match &s.kind {
        ScenarioKind::Tabulated { grid, rho, b } if grid == g => (rho.clone(), b.clone()),
        _ => {
            let rho = Array2::from_shape_fn((g.nt(), g.nx()), |(i, j)| s.rho_at(g.t(i), g.x(j)));
            let b = Array2::from_shape_fn((g.nt(), g.nx()), |(i, j)| s.b_at(g.t(i), g.x(j)));
            (rho, b)
        }
    };
    FieldPair::new(*g, rho, b, tol)
}

/// Samples with the default tolerance `10·(dx²+dt²)·(1+b_sup)`.
pub fn sample_default(s: &Scenario, nt: usize, nx: usize) -> Result<FieldPair> {
    let g = s.grid(nt, nx)?;
    let b_sup = (0..g.nt())
        .flat_map(|i| (0..g.nx()).map(move |j| (i, j)))
        .fold(0.0_f64, |m, (i, j)| m.max(s.b_at(g.t(i), g.x(j)).abs()));
    sample_scenario(s, &g, FieldPair::default_tol(&g, b_sup))
}

/// `a(t) = (1−t)² sin(π/(1−t))`, the displacement of the oscillating field.
pub fn oscillating_a(t: f64) -> f64 {
    if t >= 1.0 {
        return 0.0;
    }
    let s = 1.0 - t;
    s * s * (PI / s).sin()
}

/// `a′(t) = −2(1−t) sin(π/(1−t)) + π cos(π/(1−t))`, set to 0 at t ≥ 1.
pub fn oscillating_b(t: f64) -> f64 {
    if t >= 1.0 {
        return 0.0;
    }
    let s = 1.0 - t;
    -2.0 * s * (PI / s).sin() + PI * (PI / s).cos()
}

const LABELS: [&str; 4] = ["constant-drift", "vacuum-patch", "oscillating-sign", "positive-b"];

pub fn builtin_labels() -> &'static [&'static str] {
    &LABELS
}

pub fn builtin_scenarios() -> Vec<Scenario> {
    LABELS.iter().map(|l| builtin(l).expect("registered label")).collect()
}

pub fn builtin(label: &str) -> Option<Scenario> {
    let steps = |b: &[f64], v: &[f64]| Profile::steps(b.to_vec(), v.to_vec()).expect("valid steps");
    match label {
        "constant-drift" => {
            let (t_max, alpha, beta) = (1.0, 0.0, 2.0);
            let data = BoundaryData::new(
                steps(&[1.0], &[0.0, 1.0]),
                steps(&[0.5], &[1.0, 0.0]),
                Profile::Constant(0.0),
                t_max,
                alpha,
                beta,
            );
            Some(Scenario::analytic(label, t_max, alpha, beta, |_, _| 1.0, |_, _| 1.0, data))
        }
        "vacuum-patch" => {
            let (t_max, alpha, beta) = (1.0, 0.0, 2.0);
            let in_patch = |x: f64| (0.75..=1.25).contains(&x);
            let data = BoundaryData::new(
                steps(&[1.0], &[-1.0, 1.0]),
                Profile::Constant(1.0),
                Profile::Constant(-1.0),
                t_max,
                alpha,
                beta,
            );
            Some(Scenario::analytic(
                label,
                t_max,
                alpha,
                beta,
                move |_, x| if in_patch(x) { 0.0 } else { 1.0 },
                move |t, x| if in_patch(x) { 0.8 * (2.0 * PI * t + 3.0 * x).sin() } else { 0.0 },
                data,
            ))
        }
        "oscillating-sign" => {
            let (t_max, alpha, beta) = (1.0, -4.0, 4.0);
            let data = BoundaryData::new(
                steps(&[0.0], &[-1.0, 1.0]),
                Profile::Constant(-1.0),
                Profile::Constant(1.0),
                t_max,
                alpha,
                beta,
            );
            Some(Scenario::analytic(label, t_max, alpha, beta, |_, _| 1.0, |t, _| oscillating_b(t), data))
        }
        "positive-b" => {
            // Q(t,x) = F(x − ct) − G(t): ρ = F′(x − ct), bρ = cF′ + G′.
            let (t_max, alpha, beta) = (1.0, 0.0, 4.0);
            let c = 0.5;
            let f1 = |y: f64| 1.0 + 0.3 * (2.0 * y).cos();
            let g1 = |t: f64| 0.3 + 0.2 * (3.0 * t).sin();
            let data = BoundaryData::new(
                steps(&[1.0, 2.0], &[1.0, 2.0, 0.5]),
                steps(&[0.5], &[0.0, 1.5]),
                Profile::Constant(0.5),
                t_max,
                alpha,
                beta,
            );
            Some(Scenario::analytic(
                label,
                t_max,
                alpha,
                beta,
                move |t, x| f1(x - c * t),
                move |t, x| c + g1(t) / f1(x - c * t),
                data,
            ))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(nt: usize, nx: usize) -> SpaceTimeGrid {
        SpaceTimeGrid::new(1.0, 0.0, 2.0 * PI, nt, nx).unwrap()
    }

    #[test]
    fn constant_fields_have_zero_residual() {
        let g = grid(9, 9);
        let rho = Array2::from_elem((9, 9), 1.0);
        assert_eq!(continuity_residual(&rho, &Array2::zeros((9, 9)), &g).unwrap(), 0.0);
        assert_eq!(continuity_residual(&rho, &Array2::from_elem((9, 9), 3.0), &g).unwrap(), 0.0);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let g = grid(9, 9);
        let rho = Array2::from_elem((9, 8), 1.0);
        assert!(continuity_residual(&rho, &rho, &g).is_err());
    }

    #[test]
    fn travelling_wave_residual_is_second_order() {
        let mut prev = None;
        for n in [65, 129, 257] {
            let g = grid(n, n);
            let rho = Array2::from_shape_fn((n, n), |(i, j)| 1.0 + 0.5 * (g.x(j) - g.t(i)).sin());
            let b = Array2::from_elem((n, n), 1.0);
            let r = continuity_residual(&rho, &b, &g).unwrap() / g.dx().min(g.dt());
            let c = r / g.dx().powi(2);
            assert!(c < 0.2, "constant {c}");
            if let Some(p) = prev {
                let ratio = p / r;
                assert!(ratio > 3.5 && ratio < 4.5, "ratio {ratio}");
            }
            prev = Some(r);
        }
    }

    #[test]
    fn oscillating_field_is_exactly_incompressible() {
        let s = builtin("oscillating-sign").unwrap();
        let f = sample_default(&s, 129, 129).unwrap();
        assert_eq!(f.residual, 0.0);
        let expected = oscillating_b(0.5);
        assert_eq!(s.b_at(0.5, 1.234), expected);
        let h = 1e-6;
        let fd = (oscillating_a(0.5 + h) - oscillating_a(0.5 - h)) / (2.0 * h);
        assert!((fd - expected).abs() < 1e-6);
    }

    #[test]
    fn builtins_sample_at_default_tolerance() {
        for s in builtin_scenarios() {
            for n in [65, 129] {
                let f = sample_default(&s, n, n).unwrap_or_else(|e| panic!("{}: {e}", s.label));
                assert!(f.rho.iter().all(|&r| r >= 0.0));
            }
        }
        let f = sample_default(&builtin("constant-drift").unwrap(), 65, 65).unwrap();
        assert_eq!(f.b_sup, 1.0);
        let v = sample_default(&builtin("vacuum-patch").unwrap(), 65, 65).unwrap();
        assert_eq!(v.residual, 0.0);
    }

    #[test]
    fn negative_density_rejected() {
        let g = grid(5, 5);
        let mut rho = Array2::from_elem((5, 5), 1.0);
        rho[[2, 3]] = -0.5;
        let e = FieldPair::new(g, rho, Array2::zeros((5, 5)), 1.0).unwrap_err();
        assert!(e.to_string().contains("negative density"));
    }

    #[test]
    fn residual_above_tolerance_rejected() {
        let g = grid(17, 17);
        let rho = Array2::from_shape_fn((17, 17), |(i, _)| 1.0 + g.t(i));
        let e = FieldPair::new(g, rho, Array2::zeros((17, 17)), 1e-6).unwrap_err();
        assert!(matches!(e, Error::NotNearlyIncompressible { residual, .. } if residual > 1e-6));
    }

    #[test]
    fn total_variation_examples() {
        assert_eq!(total_variation(&[1.0, 1.0, 1.0]).unwrap(), 0.0);
        assert_eq!(total_variation(&[-1.0, 1.0, -1.0, 1.0]).unwrap(), 6.0);
        assert!(total_variation(&[]).is_err());
    }

    #[test]
    fn total_variation_of_sign_chirp() {
        let n = 4096;
        // both endpoints sit on zeros of the sine, where the sampled sign is
        // rounding noise, so they are dropped
        let samples: Vec<f64> = (1..n - 1)
            .map(|k| {
                let t = 0.95 * k as f64 / (n - 1) as f64;
                (PI / (1.0 - t)).sin().signum()
            })
            .collect();
        // zeros of sin(π/(1−t)) in (0, 0.95]: 1/(1−t) = k for k = 2..20
        let zeros = (2..).take_while(|&k| 1.0 - 1.0 / k as f64 <= 0.95).count();
        assert_eq!(zeros, 19);
        // crossings strictly inside: k = 2..19
        assert_eq!(total_variation(&samples).unwrap(), 2.0 * 18.0);
    }
}
