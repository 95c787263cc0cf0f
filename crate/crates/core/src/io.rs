//! CSV export of fields, potentials, curves, solutions and traces, and the
//! reader behind tabulated scenarios. Floats are written with 17
//! significant digits so a write/read cycle is lossless.

use std::io::{Read, Write};

use ndarray::Array2;

use crate::characteristics::CharCurve;
use crate::error::{Error, Result};
use crate::field::{FieldPair, Scenario};
use crate::grid::SpaceTimeGrid;
use crate::potential::{normal_trace, Potential, Side};
use crate::profile::BoundaryData;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Csv(e.to_string())
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Node table `t,x,<cols…>` in row-major order; `header` names every
/// column including `t` and `x`.
pub fn write_nodes<W: Write>(w: W, g: &SpaceTimeGrid, header: &[&str], cols: &[&Array2<f64>]) -> Result<()> {
    if header.len() != cols.len() + 2 {
        return Err(Error::Shape("header and column count differ".into()));
    }
    if cols.iter().any(|c| c.shape() != [g.nt(), g.nx()]) {
        return Err(Error::Shape("column table differs from grid".into()));
    }
    let mut out = writer(w);
    out.write_record(header).map_err(csv_err)?;
    let mut rec = Vec::with_capacity(header.len());
    for i in 0..g.nt() {
        for j in 0..g.nx() {
            rec.clear();
            rec.push(num(g.t(i)));
            rec.push(num(g.x(j)));
            rec.extend(cols.iter().map(|c| num(c[[i, j]])));
            out.write_record(&rec).map_err(csv_err)?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `t,x,rho,b`, row-major in `t` then `x`.
pub fn write_field<W: Write>(w: W, f: &FieldPair) -> Result<()> {
    write_nodes(w, &f.grid, &["t", "x", "rho", "b"], &[&f.rho, &f.b])
}

/// `t,x,Q`.
pub fn write_potential<W: Write>(w: W, p: &Potential) -> Result<()> {
    write_nodes(w, &p.grid, &["t", "x", "Q"], &[&p.values])
}

/// `t,x`, one row per time level.
pub fn write_curve<W: Write>(w: W, c: &CharCurve, g: &SpaceTimeGrid) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "x"]).map_err(csv_err)?;
    for (i, x) in c.positions.iter().enumerate() {
        out.write_record([num(g.t(i)), num(*x)]).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// `t,x,rho,b,theta,rho_theta`; oracle solutions carry a leading
/// `# oracle_n=<n>` comment line.
pub fn write_solution<W: Write>(mut w: W, f: &FieldPair, theta: &Array2<f64>, oracle_n: Option<usize>) -> Result<()> {
    if theta.shape() != f.rho.shape() {
        return Err(Error::Shape("solution and field tables differ".into()));
    }
    if let Some(n) = oracle_n {
        writeln!(w, "# oracle_n={n}")?;
    }
    let rho_theta = &f.rho * theta;
    write_nodes(w, &f.grid, &["t", "x", "rho", "b", "theta", "rho_theta"], &[&f.rho, &f.b, theta, &rho_theta])
}

/// Boundary traces per time interval, stamped with the interval midpoint:
/// `t,tr_brho_left,tr_brhotheta_left,tr_brho_right,tr_brhotheta_right`.
pub fn write_traces<W: Write>(w: W, q: &Potential, p_theta: &Potential) -> Result<()> {
    let g = &q.grid;
    let cols = [
        normal_trace(q, Side::Left),
        normal_trace(p_theta, Side::Left),
        normal_trace(q, Side::Right),
        normal_trace(p_theta, Side::Right),
    ];
    let mut out = writer(w);
    out.write_record(["t", "tr_brho_left", "tr_brhotheta_left", "tr_brho_right", "tr_brhotheta_right"])
        .map_err(csv_err)?;
    for i in 0..g.nt() - 1 {
        let mut rec = vec![num(g.t(i) + 0.5 * g.dt())];
        rec.extend(cols.iter().map(|c| num(c[i])));
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Interior trace at one abscissa: `t,tr_brho,tr_brhotheta,theta_tilde`.
pub fn write_interior_traces<W: Write>(w: W, g: &SpaceTimeGrid, cols: [&[f64]; 3]) -> Result<()> {
    let mut out = writer(w);
    out.write_record(["t", "tr_brho", "tr_brhotheta", "theta_tilde"]).map_err(csv_err)?;
    for i in 0..g.nt() - 1 {
        let mut rec = vec![num(g.t(i) + 0.5 * g.dt())];
        rec.extend(cols.iter().map(|c| num(c[i])));
        out.write_record(&rec).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Node tables read back from a CSV with at least `t,x,rho,b` columns.
#[derive(Clone, Debug)]
pub struct FieldTable {
    pub grid: SpaceTimeGrid,
    pub rho: Array2<f64>,
    pub b: Array2<f64>,
}

/// Distinct values of a row-major coordinate, in order of appearance.
fn axis(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::new();
    for v in values {
        if out.last() != Some(&v) && !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

fn check_uniform(name: &str, axis: &[f64]) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::Csv(format!("column {name}: fewer than two distinct values")));
    }
    let h = (axis[axis.len() - 1] - axis[0]) / (axis.len() - 1) as f64;
    for (k, v) in axis.iter().enumerate() {
        if (v - (axis[0] + k as f64 * h)).abs() > 1e-9 * (1.0 + h.abs() * axis.len() as f64) {
            return Err(Error::Csv(format!("column {name}: non-uniform spacing at value {v}")));
        }
    }
    Ok(())
}

/// Reads a field CSV (`#` lines are comments; extra columns are ignored).
/// The node set must be a complete uniform lattice in row-major order.
pub fn read_field<R: Read>(r: R) -> Result<FieldTable> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
    let headers = rd.headers().map_err(csv_err)?.clone();
    let col =
        |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| Error::Csv(format!("missing column {name}")));
    let idx = [col("t")?, col("x")?, col("rho")?, col("b")?];
    let mut rows: Vec<[f64; 4]> = Vec::new();
    for (line, rec) in rd.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let mut v = [0.0; 4];
        for (k, &c) in idx.iter().enumerate() {
            let field = rec.get(c).ok_or_else(|| Error::Csv(format!("row {}: too few fields", line + 2)))?;
            v[k] = field.parse().map_err(|_| {
                Error::Csv(format!("row {}: cannot parse {field:?} in column {}", line + 2, &headers[c]))
            })?;
        }
        rows.push(v);
    }
    let ts = axis(rows.iter().map(|r| r[0]));
    let xs = axis(rows.iter().map(|r| r[1]));
    check_uniform("t", &ts)?;
    check_uniform("x", &xs)?;
    let (nt, nx) = (ts.len(), xs.len());
    if rows.len() != nt * nx {
        return Err(Error::Csv(format!("{} rows for a {nt}×{nx} lattice", rows.len())));
    }
    let mut rho = Array2::zeros((nt, nx));
    let mut b = Array2::zeros((nt, nx));
    for (k, r) in rows.iter().enumerate() {
        let (i, j) = (k / nx, k % nx);
        if r[0] != ts[i] || r[1] != xs[j] {
            return Err(Error::Csv(format!("row {}: nodes not in row-major order", k + 2)));
        }
        rho[[i, j]] = r[2];
        b[[i, j]] = r[3];
    }
    if ts[0] != 0.0 {
        return Err(Error::Csv("time axis must start at t = 0".into()));
    }
    let grid = SpaceTimeGrid::new(ts[nt - 1], xs[0], xs[nx - 1], nt, nx)?;
    Ok(FieldTable { grid, rho, b })
}

/// Tabulated scenario from a field CSV; rejects negative densities.
pub fn read_scenario<R: Read>(
    r: R,
    label: &str,
    boundary: impl FnOnce(&SpaceTimeGrid) -> BoundaryData,
) -> Result<Scenario> {
    let t = read_field(r)?;
    let data = boundary(&t.grid);
    Scenario::tabulated(label, t.grid, t.rho, t.b, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{builtin, sample_default};

    #[test]
    fn field_round_trip_is_lossless() {
        let s = builtin("positive-b").unwrap();
        let f = sample_default(&s, 17, 33).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,x,rho,b\n"));
        assert!(!text.contains('\r'));
        let t = read_field(buf.as_slice()).unwrap();
        assert_eq!(t.grid, f.grid);
        assert_eq!(t.rho, f.rho);
        assert_eq!(t.b, f.b);
    }

    #[test]
    fn solution_csv_reads_as_field() {
        let s = builtin("constant-drift").unwrap();
        let f = sample_default(&s, 9, 9).unwrap();
        let theta = f.rho.mapv(|v| 2.0 * v);
        let mut buf = Vec::new();
        write_solution(&mut buf, &f, &theta, Some(16)).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("# oracle_n=16\nt,x,rho,b,theta,rho_theta\n"));
        let t = read_field(buf.as_slice()).unwrap();
        assert_eq!(t.rho, f.rho);
    }

    #[test]
    fn negative_density_rejected_on_ingestion() {
        let csv = "t,x,rho,b\n0,0,1,0\n0,1,-0.5,0\n1,0,1,0\n1,1,1,0\n";
        let err =
            read_scenario(csv.as_bytes(), "bad", |g| BoundaryData::constant(0.0, g.t_max(), g.x_min(), g.x_max()))
                .unwrap_err();
        assert!(err.to_string().contains("negative density"), "{err}");
    }

    #[test]
    fn malformed_tables_rejected() {
        assert!(read_field("t,x,rho\n0,0,1\n".as_bytes()).is_err());
        assert!(read_field("t,x,rho,b\n0,0,1,0\n0,1,1,0\n1,0,1,0\n".as_bytes()).is_err());
        assert!(read_field("t,x,rho,b\n0,0,1,0\n0,1,x,0\n1,0,1,0\n1,1,1,0\n".as_bytes()).is_err());
    }
}
