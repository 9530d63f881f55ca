//! Output encodings. JSON numbers carry 17 significant digits so every
//! `f64` survives a parse/print round trip unchanged.

use std::io;

use banach_core::Estimate;
use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, Serializer};

pub const CSV_HEADER: [&str; 9] = ["kappa", "tau", "eps", "value", "error_bound", "wx1", "wy1", "wx2", "wy2"];

/// Compact JSON with `f64` written as `{:.16e}`.
struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        CompactFormatter.write_f32(writer, value)
    }
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    value.serialize(&mut Serializer::with_formatter(&mut buf, Sig17))?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// One sweep/compute row in the fixed CSV layout.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRow {
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
    pub eps: Option<f64>,
    pub value: f64,
    pub error_bound: f64,
    /// First two coordinates of each witness vector.
    pub witness: [f64; 4],
}

impl CsvRow {
    pub fn new(kappa: Option<f64>, tau: Option<f64>, eps: Option<f64>, e: &Estimate) -> Self {
        let (x, y) = &e.witness;
        Self { kappa, tau, eps, value: e.value, error_bound: e.error_bound, witness: [x[0], x[1], y[0], y[1]] }
    }

    fn cells(&self) -> Vec<String> {
        let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
        let mut cells = vec![opt(self.kappa), opt(self.tau), opt(self.eps), fmt_f64(self.value), fmt_f64(self.error_bound)];
        cells.extend(self.witness.iter().map(|&w| fmt_f64(w)));
        cells
    }

    fn parse(record: &csv::StringRecord) -> Result<Self, String> {
        let num = |i: usize| -> Result<f64, String> {
            let cell = record.get(i).ok_or_else(|| format!("missing column {}", CSV_HEADER[i]))?;
            cell.parse::<f64>().map_err(|_| format!("bad number `{cell}` in column {}", CSV_HEADER[i]))
        };
        let opt = |i: usize| -> Result<Option<f64>, String> {
            if record.get(i).is_some_and(str::is_empty) {
                Ok(None)
            } else {
                num(i).map(Some)
            }
        };
        Ok(Self {
            kappa: opt(0)?,
            tau: opt(1)?,
            eps: opt(2)?,
            value: num(3)?,
            error_bound: num(4)?,
            witness: [num(5)?, num(6)?, num(7)?, num(8)?],
        })
    }
}

pub fn write_csv(rows: &[CsvRow]) -> csv::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.cells())?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("cells are ASCII"))
}

pub fn read_csv(text: &str) -> Result<Vec<CsvRow>, String> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(CSV_HEADER) {
        return Err(format!("unexpected header {header:?}"));
    }
    r.records().map(|rec| CsvRow::parse(&rec.map_err(|e| e.to_string())?)).collect()
}
