//! gnuplot scripts for the exported tables.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Control field Ω(τ).
    Fig1,
    /// |Ω_a|² over (τ, ζ).
    Fig2,
    /// ρ₂₂ over (τ, ζ).
    Fig3,
}

impl Figure {
    pub const ALL: [Figure; 3] = [Figure::Fig1, Figure::Fig2, Figure::Fig3];

    /// Exported table the figure reads.
    pub fn data_file(self) -> &'static str {
        match self {
            Figure::Fig1 => "background.csv",
            Figure::Fig2 | Figure::Fig3 => "fields.csv",
        }
    }
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            other => Err(CliError::UnknownFigure(other.to_string())),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        })
    }
}

/// Script text plotting `data` (a path as it should appear in the script).
pub fn plot_script(figure: Figure, data: &str) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator comma\n");
    s.push_str("set datafile columnheaders\n");
    s.push_str("set terminal pngcairo size 900,600 enhanced\n");
    s.push_str(&format!("set output '{figure}.png'\n"));
    s.push_str("set xlabel 'τ (μs)'\n");
    match figure {
        Figure::Fig1 => {
            s.push_str("set ylabel 'Ω(τ) (MHz)'\n");
            s.push_str("set yrange [-0.2:*]\n");
            s.push_str(&format!("plot '{data}' using 1:2 with lines linewidth 2 notitle\n"));
        }
        Figure::Fig2 | Figure::Fig3 => {
            let (title, expr) = match figure {
                Figure::Fig2 => ("|Ω_a|^2 (MHz^2)", "($3**2 + $4**2)"),
                _ => ("ρ_{22}", "8"),
            };
            s.push_str("set ylabel 'ζ (10^{-13} s)'\n");
            s.push_str(&format!("set cblabel '{title}'\n"));
            s.push_str("set palette rgbformulae 33,13,10\n");
            s.push_str("set autoscale fix\n");
            s.push_str(&format!("plot '{data}' using 1:2:{expr} with image notitle\n"));
        }
    }
    s
}

/// Writes the script for `figure` to `path`. `data` must exist; the script
/// refers to it by file name, so both are expected in the same directory.
pub fn emit_plot_script(data: &Path, figure: Figure, path: &Path) -> Result<()> {
    if !data.exists() {
        return Err(CliError::io(data, std::io::Error::new(std::io::ErrorKind::NotFound, "exported table not found")));
    }
    let name = data.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    std::fs::write(path, plot_script(figure, &name)).map_err(|e| CliError::io(path, e))
}
