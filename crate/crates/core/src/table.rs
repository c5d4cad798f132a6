//! CSV and JSON tables. Floats are written with 12 significant digits and
//! never depend on the process locale.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flux::{GapLabeler, RationalFlux};
use crate::spectrum::gaps_with;
use crate::thermo::{HClass, HScanRecord, ThermoSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapRow {
    pub p: i64,
    pub q: i64,
    pub j: i64,
    pub mu_lo: f64,
    pub mu_hi: f64,
    pub k: i64,
    pub n: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Open-gap rows for each flux, sorted by `(q, p, j)`; duplicate fluxes are dropped.
pub fn gap_rows(
    fluxes: &[RationalFlux],
    min_width: f64,
    labeler: &dyn GapLabeler,
) -> Result<Vec<GapRow>> {
    let mut fluxes = fluxes.to_vec();
    fluxes.sort_by_key(|f| (f.q(), f.p()));
    fluxes.dedup();
    let mut rows = Vec::new();
    for f in fluxes {
        let bs = gaps_with::<f64>(f, min_width, labeler)?;
        rows.extend(bs.open_gaps().map(|g| {
            let l = g.label.unwrap();
            GapRow {
                p: f.p(),
                q: f.q(),
                j: g.j,
                mu_lo: g.lo,
                mu_hi: g.hi,
                k: l.k,
                n: l.n,
            }
        }));
    }
    Ok(rows)
}

pub fn emit_gaps(rows: &[GapRow], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["p", "q", "j", "mu_lo", "mu_hi", "k", "n"])
                .map_err(csv_error)?;
            for r in rows {
                w.write_record([
                    r.p.to_string(),
                    r.q.to_string(),
                    r.j.to_string(),
                    fmt_sig(r.mu_lo),
                    fmt_sig(r.mu_hi),
                    r.k.to_string(),
                    r.n.to_string(),
                ])
                .map_err(csv_error)?;
            }
            w.flush().map_err(io_error)
        }
        Format::Json => write_json(rows, out),
    }
}

#[derive(Serialize)]
struct ThermoRow {
    mu: f64,
    p: i64,
    q: i64,
    pressure: f64,
    density: f64,
    magnetization: Option<f64>,
    sigma_hall: Option<f64>,
    k: Option<i64>,
}

impl From<&ThermoSample<f64>> for ThermoRow {
    fn from(s: &ThermoSample<f64>) -> Self {
        ThermoRow {
            mu: s.mu,
            p: s.flux.p(),
            q: s.flux.q(),
            pressure: s.pressure,
            density: s.density,
            magnetization: s.magnetization,
            sigma_hall: s.sigma_hall(),
            k: s.hall_k,
        }
    }
}

/// Columns `mu,p,q,pressure,density,magnetization,sigma_hall,k`; absent
/// values are empty fields (CSV) or `null` (JSON).
pub fn emit_thermo(
    samples: &[ThermoSample<f64>],
    format: Format,
    out: &mut dyn Write,
) -> Result<()> {
    let rows: Vec<ThermoRow> = samples.iter().map(ThermoRow::from).collect();
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "mu",
                "p",
                "q",
                "pressure",
                "density",
                "magnetization",
                "sigma_hall",
                "k",
            ])
            .map_err(csv_error)?;
            for r in &rows {
                w.write_record([
                    fmt_sig(r.mu),
                    r.p.to_string(),
                    r.q.to_string(),
                    fmt_sig(r.pressure),
                    fmt_sig(r.density),
                    r.magnetization.map(fmt_sig).unwrap_or_default(),
                    r.sigma_hall.map(fmt_sig).unwrap_or_default(),
                    r.k.map(|k| k.to_string()).unwrap_or_default(),
                ])
                .map_err(csv_error)?;
            }
            w.flush().map_err(io_error)
        }
        Format::Json => write_json(&rows, out),
    }
}

/// Columns `b,p,q,magnetization,h,tracked,interval`; `interval` classifies
/// `[b_i, b_{i+1}]` and is empty on the last row.
pub fn emit_h_scan(record: &HScanRecord, out: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["b", "p", "q", "magnetization", "h", "tracked", "interval"])
        .map_err(csv_error)?;
    for i in 0..record.b.len() {
        let class = match record.intervals.get(i) {
            Some(HClass::Invertible) => "invertible",
            Some(HClass::CoexistenceCandidate) => "coexistence-candidate",
            None => "",
        };
        w.write_record([
            fmt_sig(record.b[i]),
            record.flux[i].p().to_string(),
            record.flux[i].q().to_string(),
            fmt_sig(record.magnetization[i]),
            fmt_sig(record.h[i]),
            record.tracked[i].to_string(),
            class.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush().map_err(io_error)
}

fn write_json<S: Serialize + ?Sized>(value: &S, out: &mut dyn Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| io_error(e.into()))?;
    out.write_all(b"\n").map_err(io_error)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io {
        path: String::new(),
        message: e.to_string(),
    }
}

fn io_error(e: std::io::Error) -> Error {
    Error::Io {
        path: String::new(),
        message: e.to_string(),
    }
}

/// `%.12g`: 12 significant digits, trailing zeros dropped, exponent form
/// outside `[1e-5, 1e12)`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').unwrap();
    let exp: i32 = exp.parse().unwrap();
    if !(-5..12).contains(&exp) {
        return format!(
            "{}e{}{:02}",
            trim(mantissa),
            if exp < 0 { '-' } else { '+' },
            exp.abs()
        );
    }
    trim(&format!("{:.*}", (11 - exp) as usize, x)).to_string()
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flux::{reduce, Diophantine};

    fn f(p: i64, q: i64) -> RationalFlux {
        reduce(p, q).unwrap()
    }

    #[test]
    fn sig_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(1.0), "1");
        assert_eq!(fmt_sig(-1.0), "-1");
        assert_eq!(fmt_sig(0.1), "0.1");
        assert_eq!(fmt_sig(2f64.sqrt()), "1.41421356237");
        assert_eq!(fmt_sig(-0.366025403784439), "-0.366025403784");
        assert_eq!(fmt_sig(123456.789), "123456.789");
        assert_eq!(fmt_sig(1e-7), "1e-07");
        assert_eq!(fmt_sig(1.5e13), "1.5e+13");
        assert_eq!(fmt_sig(0.99999999999999), "1");
        assert_eq!(fmt_sig(1e-5), "0.00001");
    }

    #[test]
    fn gap_tables() {
        let rows = gap_rows(&[f(2, 5), f(1, 2), f(1, 3)], 1e-9, &Diophantine).unwrap();
        let pairs: Vec<_> = rows.iter().map(|r| (r.p, r.q, r.k, r.n)).collect();
        assert_eq!(
            pairs,
            vec![
                (1, 3, 1, 0),
                (1, 3, -1, 1),
                (2, 5, -2, 1),
                (2, 5, 1, 0),
                (2, 5, -1, 1),
                (2, 5, 2, 0),
            ]
        );
        assert!(rows.iter().all(|r| r.mu_lo < r.mu_hi));

        let mut buf = Vec::new();
        emit_gaps(&rows[..1], Format::Csv, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "p,q,j,mu_lo,mu_hi,k,n\n1,3,1,-1,-0.366025403784,1,0\n"
        );

        let mut buf = Vec::new();
        emit_gaps(&rows, Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 6);
        assert_eq!(v[2]["k"], -2);

        let mut buf = Vec::new();
        let none = gap_rows(&[f(1, 2)], 1e-9, &Diophantine).unwrap();
        emit_gaps(&none, Format::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "p,q,j,mu_lo,mu_hi,k,n\n");
    }

    #[test]
    fn thermo_table() {
        let samples = crate::thermo::thermo_samples(f(1, 3), &[-3.0, 0.0, 0.7], 8, 8, 16).unwrap();
        let mut buf = Vec::new();
        emit_thermo(&samples, Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "mu,p,q,pressure,density,magnetization,sigma_hall,k"
        );
        assert_eq!(lines[1], "-3,1,3,0,0,0,0,0");
        assert!(lines[2].ends_with(",,,"));
        assert!(lines[3].ends_with(",-1"));
    }
}
