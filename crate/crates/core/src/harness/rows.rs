//! Flat CSV records shared with the plotting tools.
//!
//! Sweep files start with `n_subarrays,n_paths,h_m,pt_dbm,beta2_rad,
//! capacity_bps_hz,normalized_capacity`, followed by `sigma_k`, `p_k` and
//! `snr_db_k` for `k = 1..=K` and a final `n_streams`. `K` is the largest
//! baseband dimension in the file; shorter rows leave the surplus fields
//! empty, as does `beta2_rad` for single-beam systems. Reals are written with
//! 17 significant digits so they parse back bit-exactly.

use std::io::{Read, Write};

use crate::error::{ConfigError, Error, Result};

const FIXED_COLUMNS: [&str; 7] = [
    "n_subarrays",
    "n_paths",
    "h_m",
    "pt_dbm",
    "beta2_rad",
    "capacity_bps_hz",
    "normalized_capacity",
];

pub const PATTERN_COLUMNS: [&str; 4] = ["theta_deg", "codeword_n", "beta_x_rad", "normalized_gain"];

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n_subarrays: usize,
    pub n_paths: usize,
    pub h_m: f64,
    pub pt_dbm: f64,
    pub beta2_rad: Option<f64>,
    pub capacity_bps_hz: f64,
    pub normalized_capacity: f64,
    pub sigma: Vec<f64>,
    /// Waterfilling allocations in watts.
    pub power: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub n_streams: usize,
}

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_real(field: &str, column: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| ConfigError::new(column, format!("not a number: `{field}`")).into())
}

fn parse_count(field: &str, column: &str) -> Result<usize> {
    field
        .trim()
        .parse()
        .map_err(|_| ConfigError::new(column, format!("not a count: `{field}`")).into())
}

pub fn sweep_header(k: usize) -> Vec<String> {
    let mut h: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    for prefix in ["sigma", "p", "snr_db"] {
        h.extend((1..=k).map(|i| format!("{prefix}_{i}")));
    }
    h.push("n_streams".into());
    h
}

fn padded(values: &[f64], k: usize) -> impl Iterator<Item = String> + '_ {
    (0..k).map(move |i| values.get(i).map(|v| format_real(*v)).unwrap_or_default())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let k = rows.iter().map(|r| r.sigma.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(sweep_header(k))?;
    for r in rows {
        let mut rec = vec![
            r.n_subarrays.to_string(),
            r.n_paths.to_string(),
            format_real(r.h_m),
            format_real(r.pt_dbm),
            r.beta2_rad.map(format_real).unwrap_or_default(),
            format_real(r.capacity_bps_hz),
            format_real(r.normalized_capacity),
        ];
        rec.extend(padded(&r.sigma, k));
        rec.extend(padded(&r.power, k));
        rec.extend(padded(&r.snr_db, k));
        rec.push(r.n_streams.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(input: R) -> Result<Vec<SweepRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.len() < FIXED_COLUMNS.len() + 1 || !(header.len() - FIXED_COLUMNS.len() - 1).is_multiple_of(3) {
        return Err(ConfigError::new("header", format!("unexpected column count {}", header.len())).into());
    }
    let k = (header.len() - FIXED_COLUMNS.len() - 1) / 3;
    if header != sweep_header(k) {
        let bad = header
            .iter()
            .zip(sweep_header(k))
            .find(|(a, b)| *a != b)
            .map(|(a, _)| a.clone())
            .unwrap_or_default();
        return Err(ConfigError::new("header", format!("unexpected column `{bad}`")).into());
    }

    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let col = |i: usize| rec.get(i).unwrap_or("");
        let optional_list = |offset: usize| -> Result<Vec<f64>> {
            (0..k)
                .map(|i| col(offset + i))
                .take_while(|f| !f.is_empty())
                .map(|f| parse_real(f, &header[offset]))
                .collect()
        };
        let base = FIXED_COLUMNS.len();
        rows.push(SweepRow {
            n_subarrays: parse_count(col(0), "n_subarrays")?,
            n_paths: parse_count(col(1), "n_paths")?,
            h_m: parse_real(col(2), "h_m")?,
            pt_dbm: parse_real(col(3), "pt_dbm")?,
            beta2_rad: match col(4) {
                "" => None,
                f => Some(parse_real(f, "beta2_rad")?),
            },
            capacity_bps_hz: parse_real(col(5), "capacity_bps_hz")?,
            normalized_capacity: parse_real(col(6), "normalized_capacity")?,
            sigma: optional_list(base)?,
            power: optional_list(base + k)?,
            snr_db: optional_list(base + 2 * k)?,
            n_streams: parse_count(col(base + 3 * k), "n_streams")?,
        });
    }
    Ok(rows)
}

/// One sample of a codebook beam's elevation pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternRow {
    pub theta_deg: f64,
    pub codeword_n: i32,
    pub beta_x_rad: f64,
    /// `|g| / M²`
    pub normalized_gain: f64,
}

pub fn write_pattern_csv<W: Write>(rows: &[PatternRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(PATTERN_COLUMNS)?;
    for r in rows {
        w.write_record([
            format_real(r.theta_deg),
            r.codeword_n.to_string(),
            format_real(r.beta_x_rad),
            format_real(r.normalized_gain),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_pattern_csv<R: Read>(input: R) -> Result<Vec<PatternRow>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != PATTERN_COLUMNS {
        return Err(Error::Config(ConfigError::new(
            "header",
            format!("expected {}", PATTERN_COLUMNS.join(",")),
        )));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(PatternRow {
            theta_deg: parse_real(&rec[0], "theta_deg")?,
            codeword_n: rec[1]
                .trim()
                .parse()
                .map_err(|_| ConfigError::new("codeword_n", format!("not an integer: `{}`", &rec[1])))?,
            beta_x_rad: parse_real(&rec[2], "beta_x_rad")?,
            normalized_gain: parse_real(&rec[3], "normalized_gain")?,
        });
    }
    Ok(rows)
}
