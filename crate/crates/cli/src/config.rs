//! Run configuration: an optional TOML file, overridden by flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

pub const DEFAULT_N: usize = 257;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Run,
    Verify,
    Compare,
    Traces,
}

/// Keys accepted in a config file. All optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub scenario: Option<OneOrMany>,
    pub nt: Option<usize>,
    pub nx: Option<usize>,
    pub mollifier_n: Option<OneOrMany<usize>>,
    pub out: Option<PathBuf>,
    pub only: Option<String>,
    pub jobs: Option<usize>,
    pub force: Option<bool>,
    pub x: Option<f64>,
    /// Data for tabulated scenarios, in profile syntax (`"c"` or
    /// `"v0, b1, v1, …"`).
    pub theta0: Option<String>,
    pub theta_bar: Option<String>,
    pub theta_under: Option<String>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T = String> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Flag values as parsed; `None` where the flag was not given.
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub scenario: Option<String>,
    pub nt: Option<usize>,
    pub nx: Option<usize>,
    pub mollifier_n: Option<String>,
    pub out: Option<PathBuf>,
    pub only: Option<String>,
    pub jobs: Option<usize>,
    pub force: bool,
    pub x: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Tolerances {
    /// Final relative L¹ distance allowed by `compare`.
    pub relative_l1: f64,
    /// The same for `oscillating-sign`.
    pub relative_l1_oscillating: f64,
}

impl Tolerances {
    fn from_map(map: &BTreeMap<String, f64>) -> Result<Self> {
        let mut t = Tolerances { relative_l1: 0.05, relative_l1_oscillating: 0.10 };
        for (k, v) in map {
            match k.as_str() {
                "relative_l1" => t.relative_l1 = *v,
                "relative_l1_oscillating" => t.relative_l1_oscillating = *v,
                _ => bail!("unknown tolerance key `tolerances.{k}`"),
            }
            if v.is_nan() || *v <= 0.0 {
                bail!("tolerance `tolerances.{k}` must be positive");
            }
        }
        Ok(t)
    }

    pub fn relative_for(&self, label: &str) -> f64 {
        if label == "oscillating-sign" {
            self.relative_l1_oscillating
        } else {
            self.relative_l1
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub scenarios: Vec<String>,
    /// `None` keeps the default (257, or a tabulated scenario's own grid).
    pub nt: Option<usize>,
    pub nx: Option<usize>,
    pub mollifier_n: Vec<usize>,
    pub out_dir: PathBuf,
    pub only: String,
    pub jobs: Option<usize>,
    pub force: bool,
    pub x: Option<f64>,
    /// Data overrides, in profile syntax.
    pub theta0: Option<String>,
    pub theta_bar: Option<String>,
    pub theta_under: Option<String>,
    pub tolerances: Tolerances,
}

/// Parses `--mollifier-n`: a comma list, or one `N` standing for
/// `N/4, N/2, N`.
pub fn parse_mollifier(text: &str) -> Result<Vec<usize>> {
    let values: Vec<usize> = text
        .split(',')
        .map(|s| s.trim().parse::<usize>().with_context(|| format!("bad mollifier index {s:?}")))
        .collect::<Result<_>>()?;
    let values = if let [n] = values[..] {
        if n >= 4 && n % 4 == 0 {
            vec![n / 4, n / 2, n]
        } else {
            vec![n]
        }
    } else {
        values
    };
    if values.contains(&0) {
        bail!("mollifier index must be ≥ 1");
    }
    Ok(values)
}

pub fn read_file(path: &Path) -> Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
    toml::from_str(&text).map_err(|e| anyhow::anyhow!("config {}: {e}", path.display()))
}

fn check_count(name: &str, v: Option<usize>) -> Result<()> {
    if let Some(n) = v {
        if n < 2 {
            bail!("{name} must be ≥ 2");
        }
    }
    Ok(())
}

/// Merges file and flags (flags win) and validates the result.
pub fn resolve(command: Command, file: FileConfig, flags: Flags) -> Result<RunConfig> {
    if flags.only.is_some() && command != Command::Verify {
        bail!("--only applies to `verify` only");
    }
    if flags.x.is_some() && command != Command::Traces {
        bail!("--x applies to `traces` only");
    }
    if flags.mollifier_n.is_some() && command != Command::Compare {
        bail!("--mollifier-n applies to `compare` only");
    }
    let scenarios = match flags.scenario {
        Some(s) => s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect(),
        None => file.scenario.map(OneOrMany::into_vec).unwrap_or_default(),
    };
    let nt = flags.nt.or(file.nt);
    let nx = flags.nx.or(file.nx);
    check_count("nt", nt)?;
    check_count("nx", nx)?;
    let mollifier_n = match (flags.mollifier_n, file.mollifier_n) {
        (Some(s), _) => parse_mollifier(&s)?,
        (None, Some(OneOrMany::One(n))) => parse_mollifier(&n.to_string())?,
        (None, Some(OneOrMany::Many(v))) => {
            parse_mollifier(&v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(","))?
        }
        (None, None) => Vec::new(),
    };
    if command == Command::Compare && mollifier_n.is_empty() {
        bail!("`compare` needs --mollifier-n");
    }
    if command != Command::Verify && scenarios.is_empty() {
        bail!("no scenario given (--scenario); builtins: {}", transport1d::builtin_labels().join(", "));
    }
    let jobs = flags.jobs.or(file.jobs);
    if jobs == Some(0) {
        bail!("--jobs must be ≥ 1");
    }
    Ok(RunConfig {
        command,
        scenarios,
        nt,
        nx,
        mollifier_n,
        out_dir: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from("out")),
        only: flags.only.or(file.only).unwrap_or_else(|| "*".to_string()),
        jobs,
        force: flags.force || file.force.unwrap_or(false),
        x: flags.x.or(file.x),
        theta0: file.theta0,
        theta_bar: file.theta_bar,
        theta_under: file.theta_under,
        tolerances: Tolerances::from_map(&file.tolerances)?,
    })
}
