//! Output records: a fixed 16-column schema shared by the CSV and JSON
//! writers.
//!
//! Columns are never reordered. Doubles are printed in their shortest
//! round-trip form, CSV uses `.` decimals, `,` separators, and LF line
//! endings, and reruns with identical configuration reproduce every byte.

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::io::{self, Write};

/// Column names, in emission order.
pub const COLUMNS: [&str; 16] = [
    "config_hash",
    "seed",
    "beta",
    "alpha",
    "battery_desc",
    "w_weak_raw",
    "w_weak_rescaled",
    "w_weak_clamped",
    "w_strong_raw",
    "w_strong_rescaled",
    "gap",
    "eof_sR",
    "e_sigma",
    "f_sigma",
    "converged_weak",
    "converged_strong",
];

/// One result row.
#[derive(Debug, Clone)]
pub struct Record {
    /// Physics content hash of the effective configuration, printed as 16
    /// hex digits.
    pub config_hash: u64,
    /// Effective measurement-search seed.
    pub seed: u64,
    /// Inverse temperature: a number, or `inf`.
    pub beta: String,
    /// Coupling amplitude `re±imi`; empty for random-block extensions.
    pub alpha: String,
    /// Battery descriptor (`pure:…`, `mixed:…`, or `random:…`).
    pub battery_desc: String,
    /// Bath-only optimum, raw scale.
    pub w_weak_raw: f64,
    /// Bath-only optimum minus the thermal free energy.
    pub w_weak_rescaled: f64,
    /// max(rescaled, 0).
    pub w_weak_clamped: f64,
    /// Bath-and-reference optimum, raw scale.
    pub w_strong_raw: f64,
    /// Strong optimum minus the thermal free energy.
    pub w_strong_rescaled: f64,
    /// Strong minus weak raw optima.
    pub gap: f64,
    /// Entanglement of formation of the system–reference marginal; present
    /// only when that marginal is two qubits.
    pub eof_s_r: Option<f64>,
    /// Average energy of the channel output.
    pub e_sigma: f64,
    /// Raw free energy of the channel output.
    pub f_sigma: f64,
    /// Weak search converged within its restart budget.
    pub converged_weak: bool,
    /// Strong search converged within its restart budget.
    pub converged_strong: bool,
}

impl Record {
    fn csv_line(&self) -> String {
        let mut fields: Vec<String> = Vec::with_capacity(COLUMNS.len());
        fields.push(format!("{:016x}", self.config_hash));
        fields.push(format!("{}", self.seed));
        fields.push(self.beta.clone());
        fields.push(self.alpha.clone());
        fields.push(self.battery_desc.clone());
        for value in [
            self.w_weak_raw,
            self.w_weak_rescaled,
            self.w_weak_clamped,
            self.w_strong_raw,
            self.w_strong_rescaled,
            self.gap,
        ] {
            fields.push(format!("{value}"));
        }
        fields.push(self.eof_s_r.map_or_else(String::new, |v| format!("{v}")));
        fields.push(format!("{}", self.e_sigma));
        fields.push(format!("{}", self.f_sigma));
        fields.push(format!("{}", self.converged_weak));
        fields.push(format!("{}", self.converged_strong));
        fields.join(",")
    }
}

impl Serialize for Record {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Record", COLUMNS.len())?;
        s.serialize_field("config_hash", &format!("{:016x}", self.config_hash))?;
        s.serialize_field("seed", &self.seed)?;
        if self.beta == "inf" {
            s.serialize_field("beta", "inf")?;
        } else {
            let value: f64 = self.beta.parse().map_err(serde::ser::Error::custom)?;
            s.serialize_field("beta", &value)?;
        }
        s.serialize_field("alpha", &self.alpha)?;
        s.serialize_field("battery_desc", &self.battery_desc)?;
        s.serialize_field("w_weak_raw", &self.w_weak_raw)?;
        s.serialize_field("w_weak_rescaled", &self.w_weak_rescaled)?;
        s.serialize_field("w_weak_clamped", &self.w_weak_clamped)?;
        s.serialize_field("w_strong_raw", &self.w_strong_raw)?;
        s.serialize_field("w_strong_rescaled", &self.w_strong_rescaled)?;
        s.serialize_field("gap", &self.gap)?;
        s.serialize_field("eof_sR", &self.eof_s_r)?;
        s.serialize_field("e_sigma", &self.e_sigma)?;
        s.serialize_field("f_sigma", &self.f_sigma)?;
        s.serialize_field("converged_weak", &self.converged_weak)?;
        s.serialize_field("converged_strong", &self.converged_strong)?;
        s.end()
    }
}

/// Writes a header row plus one line per record.
pub fn write_csv<W: Write + ?Sized>(out: &mut W, records: &[Record]) -> io::Result<()> {
    writeln!(out, "{}", COLUMNS.join(","))?;
    for r in records {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// Writes a pretty-printed JSON array of flat objects.
pub fn write_json<W: Write + ?Sized>(out: &mut W, records: &[Record]) -> io::Result<()> {
    let mut ser = serde_json::Serializer::pretty(&mut *out);
    let mut seq = ser.serialize_seq(Some(records.len())).map_err(io_err)?;
    for r in records {
        seq.serialize_element(r).map_err(io_err)?;
    }
    seq.end().map_err(io_err)?;
    writeln!(out)
}

fn io_err(e: serde_json::Error) -> io::Error {
    io::Error::other(e)
}
