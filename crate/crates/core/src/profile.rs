//! One-dimensional data profiles (θ₀ in space, θ̄ and θ̲ in time).

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Number of samples used to estimate norms of closure-backed profiles.
const FUNC_SAMPLES: usize = 8193;

#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    /// Piecewise constant: `values[k]` on `[breaks[k-1], breaks[k])`,
    /// right-continuous at the breaks. `values.len() == breaks.len() + 1`.
    Steps {
        breaks: Vec<f64>,
        values: Vec<f64>,
    },
    /// Uniform samples on `[lo, hi]`, linearly interpolated.
    Table {
        lo: f64,
        hi: f64,
        samples: Vec<f64>,
    },
    Func(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "Constant({c})"),
            Profile::Steps { breaks, values } => {
                f.debug_struct("Steps").field("breaks", breaks).field("values", values).finish()
            }
            Profile::Table { lo, hi, samples } => write!(f, "Table[{lo}, {hi}; {}]", samples.len()),
            Profile::Func(_) => write!(f, "Func"),
        }
    }
}

impl Profile {
    pub fn steps(breaks: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breaks.len() + 1 {
            return Err(Error::Data("steps need one more value than breaks".into()));
        }
        if breaks.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Data("step breaks must be increasing".into()));
        }
        if values.iter().chain(&breaks).any(|v| !v.is_finite()) {
            return Err(Error::Data("step profile must be finite".into()));
        }
        Ok(Profile::Steps { breaks, values })
    }

    pub fn table(lo: f64, hi: f64, samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 || !(hi > lo) {
            return Err(Error::Data("table needs ≥ 2 samples on a non-empty interval".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("table profile must be finite".into()));
        }
        Ok(Profile::Table { lo, hi, samples })
    }

    pub fn func(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Func(Arc::new(f))
    }

    /// Parses `"c"` (constant) or `"v0, b1, v1, b2, v2, …"` (values
    /// alternating with increasing breakpoints).
    pub fn parse(text: &str) -> Result<Self> {
        let nums = text
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Data(format!("profile '{text}': {e}")))?;
        if nums.len() % 2 == 0 {
            return Err(Error::Data(format!("profile '{text}': expected an odd number of entries")));
        }
        if nums.len() == 1 {
            return Ok(Profile::Constant(nums[0]));
        }
        let values = nums.iter().step_by(2).copied().collect();
        let breaks = nums.iter().skip(1).step_by(2).copied().collect();
        Profile::steps(breaks, values)
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Steps { breaks, values } => values[breaks.partition_point(|&b| b <= s)],
            Profile::Table { lo, hi, samples } => {
                let n = samples.len();
                let u = ((s - lo) / (hi - lo) * (n - 1) as f64).clamp(0.0, (n - 1) as f64);
                let k = (u.floor() as usize).min(n - 2);
                let w = u - k as f64;
                samples[k] * (1.0 - w) + samples[k + 1] * w
            }
            Profile::Func(f) => f(s),
        }
    }

    /// Limit from the right at `lo`.
    pub fn limit_right(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Steps { .. } => self.eval(lo),
            Profile::Table { samples, .. } => samples[0],
            Profile::Func(f) => f(lo + 1e-12 * (hi - lo)),
        }
    }

    /// Limit from the left at `hi`.
    pub fn limit_left(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Steps { breaks, values } => values[breaks.partition_point(|&b| b < hi)],
            Profile::Table { samples, .. } => samples[samples.len() - 1],
            Profile::Func(f) => f(hi - 1e-12 * (hi - lo)),
        }
    }

    /// Supremum of `|profile|` on `]lo, hi[`.
    pub fn sup_norm(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Profile::Constant(c) => c.abs(),
            Profile::Steps { breaks, values } => {
                let first = breaks.partition_point(|&b| b <= lo);
                let last = breaks.partition_point(|&b| b < hi);
                values[first..=last].iter().fold(0.0, |m, v| m.max(v.abs()))
            }
            Profile::Table { samples, .. } => samples.iter().fold(0.0, |m, v| m.max(v.abs())),
            Profile::Func(_) => self.sampled(lo, hi).iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    /// Total variation on `]lo, hi[`.
    pub fn total_variation(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Profile::Constant(_) => 0.0,
            Profile::Steps { breaks, values } => {
                let first = breaks.partition_point(|&b| b <= lo);
                let last = breaks.partition_point(|&b| b < hi);
                values[first..=last].windows(2).map(|w| (w[1] - w[0]).abs()).sum()
            }
            Profile::Table { samples, .. } => samples.windows(2).map(|w| (w[1] - w[0]).abs()).sum(),
            Profile::Func(_) => self.sampled(lo, hi).windows(2).map(|w| (w[1] - w[0]).abs()).sum(),
        }
    }

    /// Inclusive range `(min, max)` of the profile on `]lo, hi[`.
    pub fn range(&self, lo: f64, hi: f64) -> (f64, f64) {
        let fold = |it: &mut dyn Iterator<Item = f64>| {
            it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
        };
        match self {
            Profile::Constant(c) => (*c, *c),
            Profile::Steps { breaks, values } => {
                let first = breaks.partition_point(|&b| b <= lo);
                let last = breaks.partition_point(|&b| b < hi);
                fold(&mut values[first..=last].iter().copied())
            }
            Profile::Table { samples, .. } => fold(&mut samples.iter().copied()),
            Profile::Func(_) => fold(&mut self.sampled(lo, hi).into_iter()),
        }
    }

    fn sampled(&self, lo: f64, hi: f64) -> Vec<f64> {
        let h = (hi - lo) / (FUNC_SAMPLES - 1) as f64;
        let eps = 1e-12 * (hi - lo);
        (0..FUNC_SAMPLES).map(|k| self.eval((lo + k as f64 * h).clamp(lo + eps, hi - eps))).collect()
    }
}

/// Initial datum θ₀ on `[α,β]` and boundary data θ̄ (at α) and θ̲ (at β)
/// on `[0,T]`, with their one-sided limits.
#[derive(Clone, Debug)]
pub struct BoundaryData {
    pub theta0: Profile,
    pub theta_bar: Profile,
    pub theta_under: Profile,
    pub theta0_at_alpha_plus: f64,
    pub theta0_at_beta_minus: f64,
    pub theta_bar_at_0_plus: f64,
    pub theta_under_at_0_plus: f64,
    t_max: f64,
    alpha: f64,
    beta: f64,
}

impl BoundaryData {
    pub fn new(theta0: Profile, theta_bar: Profile, theta_under: Profile, t_max: f64, alpha: f64, beta: f64) -> Self {
        Self {
            theta0_at_alpha_plus: theta0.limit_right(alpha, beta),
            theta0_at_beta_minus: theta0.limit_left(alpha, beta),
            theta_bar_at_0_plus: theta_bar.limit_right(0.0, t_max),
            theta_under_at_0_plus: theta_under.limit_right(0.0, t_max),
            theta0,
            theta_bar,
            theta_under,
            t_max,
            alpha,
            beta,
        }
    }

    /// All three data identically equal to `c`.
    pub fn constant(c: f64, t_max: f64, alpha: f64, beta: f64) -> Self {
        Self::new(Profile::Constant(c), Profile::Constant(c), Profile::Constant(c), t_max, alpha, beta)
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `max{‖θ̄‖∞, ‖θ₀‖∞, ‖θ̲‖∞}`.
    pub fn linf(&self) -> f64 {
        self.theta0
            .sup_norm(self.alpha, self.beta)
            .max(self.theta_bar.sup_norm(0.0, self.t_max))
            .max(self.theta_under.sup_norm(0.0, self.t_max))
    }

    /// Smallest interval `[κ, K]` containing all data values.
    pub fn range(&self) -> (f64, f64) {
        let a = self.theta0.range(self.alpha, self.beta);
        let b = self.theta_bar.range(0.0, self.t_max);
        let c = self.theta_under.range(0.0, self.t_max);
        (a.0.min(b.0).min(c.0), a.1.max(b.1).max(c.1))
    }

    pub fn tv_theta0(&self) -> f64 {
        self.theta0.total_variation(self.alpha, self.beta)
    }
    pub fn tv_theta_bar(&self) -> f64 {
        self.theta_bar.total_variation(0.0, self.t_max)
    }
    pub fn tv_theta_under(&self) -> f64 {
        self.theta_under.total_variation(0.0, self.t_max)
    }

    /// The five-term bound on the spatial variation of the solution.
    pub fn bv_space_bound(&self) -> f64 {
        self.tv_theta_bar()
            + (self.theta_bar_at_0_plus - self.theta0_at_alpha_plus).abs()
            + self.tv_theta0()
            + (self.theta0_at_beta_minus - self.theta_under_at_0_plus).abs()
            + self.tv_theta_under()
    }

    /// Same data with every profile mapped through `f` pointwise, returned as
    /// closures.
    pub fn map(&self, f: impl Fn(f64) -> f64 + Send + Sync + Clone + 'static) -> Self {
        let wrap = |p: &Profile| {
            let p = p.clone();
            let f = f.clone();
            Profile::func(move |s| f(p.eval(s)))
        };
        Self::new(wrap(&self.theta0), wrap(&self.theta_bar), wrap(&self.theta_under), self.t_max, self.alpha, self.beta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_are_right_continuous() {
        let p = Profile::parse("-1, 0.0, 1").unwrap();
        assert_eq!(p.eval(-0.5), -1.0);
        assert_eq!(p.eval(0.0), 1.0);
        assert_eq!(p.limit_left(-4.0, 0.0), -1.0);
        assert_eq!(p.limit_right(0.0, 4.0), 1.0);
        assert_eq!(p.total_variation(-4.0, 4.0), 2.0);
        assert_eq!(p.total_variation(0.5, 4.0), 0.0);
        assert_eq!(p.sup_norm(-4.0, 4.0), 1.0);
    }

    #[test]
    fn parse_rejects_even_count() {
        assert!(Profile::parse("1, 2").is_err());
        assert!(Profile::parse("x").is_err());
        assert!(matches!(Profile::parse(" 2.5 ").unwrap(), Profile::Constant(c) if c == 2.5));
    }

    #[test]
    fn table_limits_are_end_samples() {
        let p = Profile::table(0.0, 1.0, vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(p.limit_right(0.0, 1.0), 3.0);
        assert_eq!(p.limit_left(0.0, 1.0), 2.0);
        assert_eq!(p.eval(0.25), 2.0);
        assert_eq!(p.total_variation(0.0, 1.0), 3.0);
    }

    #[test]
    fn five_term_bound() {
        let d = BoundaryData::new(
            Profile::parse("-1, 0.0, 1").unwrap(),
            Profile::Constant(-1.0),
            Profile::Constant(1.0),
            1.0,
            -4.0,
            4.0,
        );
        assert_eq!(d.bv_space_bound(), 2.0);
        assert_eq!(d.linf(), 1.0);
        assert_eq!(d.range(), (-1.0, 1.0));
    }
}
