//! The four subcommands. Each returns `Ok(false)` for a failed
//! verification and `Err` for anything that stopped the run.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use transport1d::criteria::{solve_scenario, Run, Suite};
use transport1d::io::{read_scenario, write_interior_traces, write_nodes, write_solution, write_traces};
use transport1d::oracle::{extend_fields, l1_distance, mollify, solve_smooth};
use transport1d::solver::{
    bv_in_space_check, check_boundary_condition, interior_traces, potential_consistency, theta_time_trace,
};
use transport1d::{builtin, builtin_labels, BoundaryData, Error, Profile, Scenario, Side};

use crate::config::{Command, RunConfig, DEFAULT_N};

/// 2 for usage, configuration and input errors, 3 for numerical
/// construction failures.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
        Some(
            Error::Grid(_)
            | Error::Csv(_)
            | Error::Data(_)
            | Error::Io(_)
            | Error::NegativeDensity { .. }
            | Error::Shape(_),
        ) => 2,
        Some(_) => 3,
        None => 2,
    }
}

pub fn execute(cfg: &RunConfig) -> Result<bool> {
    if let Some(n) = cfg.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("cannot size the thread pool")?;
    }
    let scenarios = cfg.scenarios.iter().map(|s| load_scenario(s, cfg)).collect::<Result<Vec<_>>>()?;
    match cfg.command {
        Command::Run => run(cfg, &scenarios),
        Command::Verify => verify(cfg, &scenarios),
        Command::Compare => compare(cfg, &scenarios),
        Command::Traces => traces(cfg, &scenarios),
    }
}

fn profile(text: &Option<String>, key: &str, fallback: &Profile) -> Result<Profile> {
    match text {
        Some(t) => Profile::parse(t).with_context(|| format!("config key `{key}`")),
        None => Ok(fallback.clone()),
    }
}

fn with_overrides(cfg: &RunConfig, s: Scenario) -> Result<Scenario> {
    if cfg.theta0.is_none() && cfg.theta_bar.is_none() && cfg.theta_under.is_none() {
        return Ok(s);
    }
    let d = &s.boundary;
    let data = BoundaryData::new(
        profile(&cfg.theta0, "theta0", &d.theta0)?,
        profile(&cfg.theta_bar, "theta_bar", &d.theta_bar)?,
        profile(&cfg.theta_under, "theta_under", &d.theta_under)?,
        s.t_max,
        s.alpha,
        s.beta,
    );
    Ok(s.with_boundary(data))
}

/// A builtin label, or a path to a field CSV (labelled by its file stem).
fn load_scenario(name: &str, cfg: &RunConfig) -> Result<Scenario> {
    if let Some(s) = builtin(name) {
        return with_overrides(cfg, s);
    }
    let path = Path::new(name);
    if !path.is_file() {
        bail!("unknown scenario '{name}'; builtins: {}", builtin_labels().join(", "));
    }
    let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or("tabulated").to_string();
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let s = read_scenario(file, &label, |g| BoundaryData::constant(1.0, g.t_max(), g.x_min(), g.x_max()))
        .with_context(|| format!("scenario {}", path.display()))?;
    with_overrides(cfg, s)
}

fn resolution(cfg: &RunConfig, s: &Scenario) -> (usize, usize) {
    let native = s.native_grid().map(|g| (g.nt(), g.nx())).unwrap_or((DEFAULT_N, DEFAULT_N));
    (cfg.nt.unwrap_or(native.0), cfg.nx.unwrap_or(native.1))
}

fn solve_for(cfg: &RunConfig, s: &Scenario) -> Result<Run> {
    let (nt, nx) = resolution(cfg, s);
    solve_scenario(s, nt, nx).with_context(|| format!("scenario {}", s.label))
}

/// Refuses to touch existing files unless `--force`; checked before any
/// computation.
fn claim(cfg: &RunConfig, paths: &[PathBuf]) -> Result<()> {
    if !cfg.force {
        if let Some(p) = paths.iter().find(|p| p.exists()) {
            bail!("{} exists; pass --force to overwrite", p.display());
        }
    }
    Ok(())
}

/// Writes through a temporary file in the same directory, then renames.
fn write_atomic(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let name = path.file_name().and_then(|n| n.to_str()).ok_or_else(|| anyhow!("bad output path"))?;
    let tmp = dir.join(format!(".{name}.tmp"));
    let result = (|| -> Result<()> {
        let mut w = BufWriter::new(File::create(&tmp)?);
        body(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result.with_context(|| format!("cannot write {}", path.display()))
}

#[derive(Serialize)]
struct Summary {
    scenario: String,
    nt: usize,
    nx: usize,
    linf_bound: f64,
    max_bv_space: f64,
    bc_mismatch_left: f64,
    bc_mismatch_right: f64,
    potential_consistency: f64,
    /// `potential_consistency / (dx + dt)`.
    consistency_constant: f64,
}

fn run(cfg: &RunConfig, scenarios: &[Scenario]) -> Result<bool> {
    let files = ["solution.csv", "traces.csv", "summary.json"];
    let dirs: Vec<PathBuf> = scenarios.iter().map(|s| cfg.out_dir.join(&s.label)).collect();
    claim(cfg, &dirs.iter().flat_map(|d| files.map(|f| d.join(f))).collect::<Vec<_>>())?;
    for (s, dir) in scenarios.iter().zip(&dirs) {
        let r = solve_for(cfg, s)?;
        let g = r.field.grid;
        let pc = potential_consistency(&r.solution, &r.q_theta);
        let bc = |side| check_boundary_condition(&r.solution, &r.q, &r.q_theta, &s.boundary, side).mismatch;
        let summary = Summary {
            scenario: s.label.clone(),
            nt: g.nt(),
            nx: g.nx(),
            linf_bound: r.solution.linf_bound,
            max_bv_space: bv_in_space_check(&r.solution, &r.field, &s.boundary).max_variation,
            bc_mismatch_left: bc(Side::Left),
            bc_mismatch_right: bc(Side::Right),
            potential_consistency: pc,
            consistency_constant: pc / (g.dx() + g.dt()),
        };
        write_atomic(&dir.join("solution.csv"), |w| Ok(write_solution(w, &r.field, &r.solution.theta, None)?))?;
        write_atomic(&dir.join("traces.csv"), |w| Ok(write_traces(w, &r.q, &r.q_theta)?))?;
        write_atomic(&dir.join("summary.json"), |w| {
            serde_json::to_writer_pretty(&mut *w, &summary)?;
            writeln!(w)?;
            Ok(())
        })?;
        println!(
            "{}: potential_consistency {:.3e} = C·(dx+dt) with C = {:.4}; output in {}",
            s.label,
            pc,
            summary.consistency_constant,
            dir.display()
        );
    }
    Ok(true)
}

fn verify(cfg: &RunConfig, scenarios: &[Scenario]) -> Result<bool> {
    for s in scenarios {
        println!("scenario {}: loaded", s.label);
    }
    let resolution = match (cfg.nt, cfg.nx) {
        (None, None) => None,
        (nt, nx) => Some((nt.or(nx).unwrap_or(DEFAULT_N), nx.or(nt).unwrap_or(DEFAULT_N))),
    };
    let suite = Suite::new(resolution);
    let reports = suite.run_matching(&cfg.only);
    if reports.is_empty() {
        bail!("no criterion matches '{}'", cfg.only);
    }
    for r in &reports {
        println!("{}", r.line());
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    println!("{passed}/{} criteria passed", reports.len());
    Ok(passed == reports.len())
}

fn compare(cfg: &RunConfig, scenarios: &[Scenario]) -> Result<bool> {
    let paths: Vec<PathBuf> = scenarios.iter().map(|s| cfg.out_dir.join(&s.label).join("compare.csv")).collect();
    claim(cfg, &paths)?;
    let mut all = true;
    for (s, path) in scenarios.iter().zip(&paths) {
        let r = solve_for(cfg, s)?;
        let f = &r.field;
        let ext = extend_fields(f, &r.q, &f.grid)?;
        let positive = f.b.iter().all(|&v| v >= 0.0);
        let mut dists = Vec::new();
        let mut rel = f64::NAN;
        let mut thetas = Vec::new();
        for &n in &cfg.mollifier_n {
            let mp = mollify(&ext, &s.boundary, n, positive)?;
            let theta_n = solve_smooth(&mp, &f.grid)?;
            let (d, norm) = l1_distance(f, &r.solution.theta, &mp, &theta_n);
            rel = d / norm;
            println!("{} n={n}: L¹ distance {d:.6e}, relative {rel:.6}", s.label);
            dists.push(d);
            thetas.push(theta_n);
        }
        let limit = cfg.tolerances.relative_for(&s.label);
        let monotone = dists.windows(2).all(|w| w[1] <= w[0]);
        let ok = monotone && rel <= limit;
        println!(
            "{} {}: distances {}, final relative {rel:.4} (limit {limit})",
            if ok { "PASS" } else { "FAIL" },
            s.label,
            if monotone { "non-increasing" } else { "increasing" }
        );
        all &= ok;

        let names: Vec<String> = cfg.mollifier_n.iter().map(|n| format!("theta_n{n}")).collect();
        let mut header = vec!["t", "x", "rho", "b", "theta"];
        header.extend(names.iter().map(String::as_str));
        let mut cols = vec![&f.rho, &f.b, &r.solution.theta];
        cols.extend(thetas.iter());
        write_atomic(path, |w| Ok(write_nodes(w, &f.grid, &header, &cols)?))?;
    }
    Ok(all)
}

fn traces(cfg: &RunConfig, scenarios: &[Scenario]) -> Result<bool> {
    let x = cfg.x.ok_or_else(|| anyhow!("`traces` needs --x"))?;
    let paths: Vec<PathBuf> =
        scenarios.iter().map(|s| cfg.out_dir.join(&s.label).join(format!("traces_x{x}.csv"))).collect();
    for s in scenarios {
        if !(x > s.alpha && x <= s.beta) {
            bail!("--x {x} is outside ]{}, {}] for {}", s.alpha, s.beta, s.label);
        }
    }
    claim(cfg, &paths)?;
    for (s, path) in scenarios.iter().zip(&paths) {
        let r = solve_for(cfg, s)?;
        let g = r.field.grid;
        let j = g.nearest_x(x).max(1);
        let (tr, trt) = interior_traces(&r.q, &r.q_theta, j);
        let tilde = theta_time_trace(&r.solution, &r.q, &r.q_theta, j)?;
        write_atomic(path, |w| Ok(write_interior_traces(w, &g, [&tr, &trt, &tilde])?))?;
        println!("{}: traces at x = {} in {}", s.label, g.x(j), path.display());
    }
    Ok(true)
}
