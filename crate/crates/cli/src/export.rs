//! Long-format CSV tables, τ-major row order.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use slowlight_core::domain::{background_field, ControlSchedule};
use slowlight_core::grid::{Axis, GridSolution};

use crate::error::{CliError, Result};
use crate::track::{Observable, TrackSample};

pub const FIELD_COLUMNS: [&str; 9] = [
    "tau[us]",
    "zeta[1e-13s]",
    "re_omega_a[MHz]",
    "im_omega_a[MHz]",
    "re_omega_b[MHz]",
    "im_omega_b[MHz]",
    "rho11",
    "rho22",
    "rho33",
];

pub const POPULATION_COLUMNS: [&str; 5] = ["tau[us]", "zeta[1e-13s]", "rho11", "rho22", "rho33"];

/// 13 significant digits; parsing and re-formatting reproduces the text.
pub fn format_number(x: f64) -> String {
    format!("{x:.12e}")
}

fn write_rows<W: Write, I>(out: W, header: &[&str], rows: I) -> Result<()>
where
    I: Iterator<Item = Vec<f64>>,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format_number(*v)))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn grid_rows<'a>(
    sol: &'a GridSolution,
    f: impl Fn(usize, usize) -> Vec<f64> + 'a,
) -> impl Iterator<Item = Vec<f64>> + 'a {
    let (nt, nz) = sol.dims();
    (0..nt).flat_map(move |k| (0..nz).map(move |j| (k, j))).map(move |(k, j)| f(k, j))
}

pub fn write_fields<W: Write>(sol: &GridSolution, out: W) -> Result<()> {
    let rows = grid_rows(sol, |k, j| {
        let f = sol.field(k, j);
        let p = sol.rho(k, j).populations();
        vec![
            sol.tau.values[k],
            sol.zeta.values[j],
            f.omega_a.re,
            f.omega_a.im,
            f.omega_b.re,
            f.omega_b.im,
            p[0],
            p[1],
            p[2],
        ]
    });
    write_rows(out, &FIELD_COLUMNS, rows)
}

pub fn write_populations<W: Write>(sol: &GridSolution, out: W) -> Result<()> {
    let rows = grid_rows(sol, |k, j| {
        let p = sol.rho(k, j).populations();
        vec![sol.tau.values[k], sol.zeta.values[j], p[0], p[1], p[2]]
    });
    write_rows(out, &POPULATION_COLUMNS, rows)
}

pub fn write_track<W: Write>(track: &[TrackSample], observable: Observable, out: W) -> Result<()> {
    let header = ["tau[us]", "zeta_peak[1e-13s]", observable.column_name()];
    write_rows(out, &header, track.iter().map(|s| vec![s.tau, s.zeta_peak, s.value]))
}

/// Control field Ω(τ) at the medium entrance.
pub fn write_background<W: Write>(schedule: &ControlSchedule, tau: &Axis, out: W) -> Result<()> {
    let header = ["tau[us]", "omega[MHz]"];
    write_rows(out, &header, tau.values.iter().map(|&t| vec![t, background_field(t, schedule)]))
}

/// Creates `path` and hands a buffered writer to `write`.
pub fn export_to<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&mut BufWriter<File>) -> Result<()>,
{
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut buf = BufWriter::new(file);
    write(&mut buf)?;
    buf.flush().map_err(|e| CliError::io(path, e))
}

/// Header and numeric rows of an exported table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn read_table<R: Read>(input: R) -> Result<Table> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.iter().map(str::to_string).collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (idx, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|v| {
                v.parse::<f64>().map_err(|_| CliError::Table { row: idx + 1, msg: format!("'{v}' is not a number") })
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != header.len() {
            return Err(CliError::Table {
                row: idx + 1,
                msg: format!("{} columns, header has {}", row.len(), header.len()),
            });
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use slowlight_core::analytic::ExactSolution;
    use slowlight_core::domain::Scenario;
    use slowlight_core::grid::{grid_evaluate, GridSpec};

    fn small_grid() -> GridSolution {
        let e = ExactSolution::new(&Scenario::default().validate().unwrap()).unwrap();
        let spec =
            GridSpec { tau_min: -0.5, tau_max: 0.5, tau_step: 1.0, zeta_min: 0.0, zeta_max: 0.3, zeta_step: 0.3 };
        grid_evaluate(&e, &spec, 100).unwrap()
    }

    #[test]
    fn two_by_two_grid_has_four_rows() {
        let mut buf = Vec::new();
        write_fields(&small_grid(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert!(text.starts_with("tau[us],zeta[1e-13s],re_omega_a[MHz]"));
        let t = read_table(text.as_bytes()).unwrap();
        assert_eq!((t.rows[1][0], t.rows[1][1]), (-0.5, 0.3));
        assert_eq!((t.rows[2][0], t.rows[2][1]), (0.5, 0.0));
    }

    #[test]
    fn round_trip_is_textually_identical() {
        let mut buf = Vec::new();
        write_fields(&small_grid(), &mut buf).unwrap();
        let t = read_table(buf.as_slice()).unwrap();
        let header: Vec<&str> = t.header.iter().map(String::as_str).collect();
        let mut again = Vec::new();
        write_rows(&mut again, &header, t.rows.into_iter()).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn populations_sum_to_one() {
        let mut buf = Vec::new();
        write_populations(&small_grid(), &mut buf).unwrap();
        let t = read_table(buf.as_slice()).unwrap();
        assert_eq!(t.header.len(), 5);
        for row in &t.rows {
            assert!((row[2] + row[3] + row[4] - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn malformed_rows_are_reported() {
        let err = read_table("a,b\n1,x\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CliError::Table { row: 1, .. }));
    }
}
