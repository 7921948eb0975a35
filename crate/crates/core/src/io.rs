//! CSV output. Numbers are written with 12 significant digits in scientific
//! notation, which re-parses to the same `f64` that was written.

use std::io::{self, BufRead, Write};

use crate::dynamics::TimeSeries;

pub const SERIES_HEADER: [&str; 6] = ["t", "rho11", "rho22", "re_rho12", "im_rho12", "eta"];
pub const STD_ERR_HEADER: [&str; 2] = ["se_rho11", "se_rho22"];

pub fn format_number(x: f64) -> String {
    format!("{x:.11e}")
}

/// Writes a header line and rows of numbers.
pub fn write_table<W: Write, R: AsRef<[f64]>>(
    mut w: W,
    header: &[&str],
    rows: impl IntoIterator<Item = R>,
) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    let mut line = String::new();
    for row in rows {
        line.clear();
        for (i, x) in row.as_ref().iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            line.push_str(&format_number(*x));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// `t,rho11,rho22,re_rho12,im_rho12,eta[,se_rho11,se_rho22]`.
pub fn write_series_csv<W: Write>(w: W, series: &TimeSeries) -> io::Result<()> {
    let mut header: Vec<&str> = SERIES_HEADER.to_vec();
    if series.std_err.is_some() {
        header.extend(STD_ERR_HEADER);
    }
    let times = series.times();
    let rows = (0..series.len()).map(|k| {
        let s = &series.states[k];
        let mut row = vec![times[k], s.rho11, s.rho22, s.rho12.re, s.rho12.im, series.eta[k]];
        if let Some(se) = &series.std_err {
            row.extend(se[k]);
        }
        row
    });
    write_table(w, &header, rows)
}

/// Parsed CSV: header names and numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_table<R: BufRead>(r: R) -> io::Result<Table> {
    let bad = |msg: String| io::Error::new(io::ErrorKind::InvalidData, msg);
    let mut lines = r.lines();
    let header: Vec<String> = match lines.next() {
        Some(line) => line?.split(',').map(str::to_owned).collect(),
        None => return Err(bad("empty table".into())),
    };
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| f.parse::<f64>().map_err(|e| bad(format!("row {}: {e}", i + 1))))
            .collect::<io::Result<Vec<f64>>>()?;
        if row.len() != header.len() {
            return Err(bad(format!("row {} has {} fields, header has {}", i + 1, row.len(), header.len())));
        }
        rows.push(row);
    }
    Ok(Table { header, rows })
}
