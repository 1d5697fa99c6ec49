//! Parameter sweeps over `(nu, branch, N)` and their flat-file output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::FuzzyContext;
use crate::chern::{chern_number, ChargeReport};
use crate::error::{Error, Result};
use crate::projector::projector_spectral;
use crate::spin::{Branch, TwoJ};

/// Exact CSV header of sweep output.
pub const CSV_HEADER: [&str; 8] = ["two_N", "two_nu", "branch", "inv_N", "q", "c1", "k_limit", "max_residual"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub two_nu_list: Vec<u32>,
    pub branches: Vec<Branch>,
    pub two_n_max: u32,
    pub output_path: PathBuf,
    pub format: Format,
    /// Step `two_N` by one (half-integer N allowed) instead of two.
    pub half_integer: bool,
    /// Rows whose largest residual reaches this are withheld and reported.
    pub tol: f64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.two_nu_list.is_empty() || self.branches.is_empty() {
            return Err(Error::Domain("sweep needs at least one nu and one branch".into()));
        }
        let max_nu = *self.two_nu_list.iter().max().expect("nonempty");
        if self.two_n_max < max_nu + 1 {
            return Err(Error::Domain(format!(
                "two_N_max = {} must be at least max(two_nu) + 1 = {}",
                self.two_n_max,
                max_nu + 1
            )));
        }
        Ok(())
    }

    /// Sweep points sorted by `(two_nu, branch, two_N)`.
    pub fn points(&self) -> Vec<(TwoJ, Branch, TwoJ)> {
        let mut nus = self.two_nu_list.clone();
        nus.sort_unstable();
        nus.dedup();
        let mut branches = self.branches.clone();
        branches.sort();
        branches.dedup();
        let (start, step) = if self.half_integer { (1, 1) } else { (2, 2) };

        let mut out = Vec::new();
        for &two_nu in &nus {
            for &branch in &branches {
                for two_n in (start..=self.two_n_max).step_by(step) {
                    if branch == Branch::Minus && two_n <= two_nu {
                        continue;
                    }
                    out.push((TwoJ(two_nu), branch, TwoJ(two_n)));
                }
            }
        }
        out
    }
}

/// One row of sweep output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChargeRecord {
    #[serde(rename = "two_N")]
    pub two_n: u32,
    pub two_nu: u32,
    pub branch: Branch,
    #[serde(rename = "inv_N")]
    pub inv_n: f64,
    pub q: f64,
    pub c1: f64,
    pub k_limit: i64,
    pub max_residual: f64,
}

impl From<&ChargeReport> for ChargeRecord {
    fn from(r: &ChargeReport) -> Self {
        ChargeRecord {
            two_n: r.two_n.value(),
            two_nu: r.two_nu.value(),
            branch: r.branch,
            inv_n: 2.0 / f64::from(r.two_n.value()),
            q: r.q,
            c1: r.c1,
            k_limit: r.k_limit,
            max_residual: r.max_residual(),
        }
    }
}

/// Spectral projector plus full report at one point.
pub fn charge_report(two_n: TwoJ, two_nu: TwoJ, branch: Branch) -> Result<ChargeReport> {
    let ctx = FuzzyContext::new(two_n)?;
    let p = projector_spectral(two_n, two_nu, branch)?;
    chern_number(&ctx, &p)
}

/// Evaluates every point of the sweep in parallel; output order follows
/// [`SweepConfig::points`].
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<ChargeReport>> {
    config.validate()?;
    config
        .points()
        .into_par_iter()
        .map(|(two_nu, branch, two_n)| charge_report(two_n, two_nu, branch))
        .collect()
}

/// 17 significant digits, fixed scientific layout.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(records: &[ChargeRecord], out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.two_n.to_string(),
            r.two_nu.to_string(),
            r.branch.to_string(),
            format_float(r.inv_n),
            format_float(r.q),
            format_float(r.c1),
            r.k_limit.to_string(),
            format_float(r.max_residual),
        ])?;
    }
    w.flush()
}

pub fn write_json<W: Write>(records: &[ChargeRecord], mut out: W) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, records)?;
    writeln!(out)
}

pub fn write_records(records: &[ChargeRecord], path: &Path, format: Format) -> std::io::Result<()> {
    let file = BufWriter::new(File::create(path)?);
    match format {
        Format::Csv => write_csv(records, file),
        Format::Json => write_json(records, file),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(nus: Vec<u32>, branches: Vec<Branch>, max: u32) -> SweepConfig {
        SweepConfig {
            two_nu_list: nus,
            branches,
            two_n_max: max,
            output_path: PathBuf::from("unused.csv"),
            format: Format::Csv,
            half_integer: false,
            tol: 1e-9,
        }
    }

    #[test]
    fn integer_mode_counts() {
        let cfg = config(vec![1], vec![Branch::Plus], 4);
        let pts = cfg.points();
        assert_eq!(pts.len(), 2);
        assert_eq!(pts[0].2, TwoJ(2));
        assert_eq!(pts[1].2, TwoJ(4));
    }

    #[test]
    fn minus_skips_small_n_and_order_is_sorted() {
        let mut cfg = config(vec![4, 3], vec![Branch::Minus, Branch::Plus], 6);
        cfg.half_integer = true;
        let pts = cfg.points();
        assert!(pts.windows(2).all(|w| (w[0].0, w[0].1, w[0].2) < (w[1].0, w[1].1, w[1].2)));
        assert!(pts.iter().all(|(nu, b, n)| *b == Branch::Plus || n > nu));
        assert_eq!(pts.iter().filter(|(nu, b, _)| nu.value() == 4 && *b == Branch::Minus).count(), 2);
    }

    #[test]
    fn validation() {
        assert!(config(vec![], vec![Branch::Plus], 4).validate().is_err());
        assert!(config(vec![4], vec![Branch::Plus], 4).validate().is_err());
        assert!(config(vec![4], vec![], 8).validate().is_err());
        assert!(config(vec![4], vec![Branch::Plus], 5).validate().is_ok());
    }

    #[test]
    fn csv_layout() {
        let rec = ChargeRecord {
            two_n: 2,
            two_nu: 1,
            branch: Branch::Minus,
            inv_n: 1.0,
            q: -0.5,
            c1: 0.5,
            k_limit: 1,
            max_residual: 0.0,
        };
        let mut buf = Vec::new();
        write_csv(&[rec], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "two_N,two_nu,branch,inv_N,q,c1,k_limit,max_residual");
        assert_eq!(
            lines.next().unwrap(),
            "2,1,minus,1.0000000000000000e0,-5.0000000000000000e-1,5.0000000000000000e-1,1,0.0000000000000000e0"
        );
    }
}
