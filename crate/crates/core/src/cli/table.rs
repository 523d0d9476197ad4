//! Rendering result tables as CSV, Markdown, or JSON.

use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::simulation::McReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Md,
    Json,
}

/// A header row and string cells.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table {
            headers: headers.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let csv_err = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(&self.headers).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Pipe table; with `pretty`, columns are padded to equal width.
    pub fn write_markdown<W: Write + ?Sized>(&self, out: &mut W, pretty: bool) -> Result<()> {
        let escape = |c: &str| c.replace('|', "\\|");
        let widths: Vec<usize> = (0..self.headers.len())
            .map(|j| {
                if !pretty {
                    return 3;
                }
                std::iter::once(&self.headers[j])
                    .chain(self.rows.iter().map(|r| &r[j]))
                    .map(|c| escape(c).chars().count())
                    .max()
                    .unwrap_or(0)
                    .max(3)
            })
            .collect();
        let line = |cells: &[String]| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| {
                    let c = escape(c);
                    if pretty {
                        format!("{c:<w$}")
                    } else {
                        c
                    }
                })
                .collect();
            format!("| {} |", padded.join(" | "))
        };
        writeln!(out, "{}", line(&self.headers))?;
        let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
        writeln!(out, "| {} |", rule.join(" | "))?;
        for r in &self.rows {
            writeln!(out, "{}", line(r))?;
        }
        Ok(())
    }
}

pub fn write_json<T: Serialize + ?Sized, W: Write + ?Sized>(value: &T, out: &mut W, pretty: bool) -> Result<()> {
    let text = if pretty {
        serde_json::to_string_pretty(value)
    } else {
        serde_json::to_string(value)
    }
    .map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{text}")?;
    Ok(())
}

pub const REPORT_HEADERS: [&str; 9] = [
    "Scenario",
    "Procedure",
    "FDR (SE)",
    "K0α/K",
    "FNR (SE)",
    "K1β/K",
    "EN (SE)",
    "Savings",
    "Notes",
];

/// One SBH row per report, followed by an FBH row when a baseline was configured.
pub fn report_table(reports: &[McReport]) -> Table {
    let mut table = Table::new(REPORT_HEADERS);
    for r in reports {
        let mut notes = r.flags.clone();
        if r.cap_hits > 0 {
            notes.push(format!("{} replications hit the sample-size cap", r.cap_hits));
        }
        table.push(vec![
            r.label.clone(),
            "SBH".into(),
            format!("{:.4} ({:.4})", r.fdr_hat, r.fdr_se),
            format!("{:.4}", r.bound_fdr),
            format!("{:.4} ({:.4})", r.fnr_hat, r.fnr_se),
            format!("{:.4}", r.bound_fnr),
            format!("{:.1} ({:.1})", r.en_hat, r.en_se),
            String::new(),
            notes.join("; "),
        ]);
        if let Some(f) = &r.fbh {
            table.push(vec![
                r.label.clone(),
                "FBH".into(),
                format!("{:.4} ({:.4})", f.fdr_hat, f.fdr_se),
                format!("{:.4}", r.bound_fdr),
                format!("{:.4} ({:.4})", f.fnr_hat, f.fnr_se),
                String::new(),
                f.total_n.to_string(),
                r.savings_vs_fbh
                    .map_or_else(String::new, |s| format!("{s:.2}%")),
                String::new(),
            ]);
        }
    }
    table
}
