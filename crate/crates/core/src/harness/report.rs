use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use super::experiment::ResultRecord;
use crate::error::{Error, Result};

/// Formats like C's `%g`: 6 significant digits, trailing zeros dropped,
/// scientific notation for exponents below -4 or above 5.
pub fn format_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "NaN".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn row(r: &ResultRecord) -> [String; 20] {
    [
        r.dataset.clone(),
        r.objective.clone(),
        r.algo.clone(),
        r.k.to_string(),
        r.c.to_string(),
        format_g(r.eps),
        format_g(r.b),
        r.trials.map(|t| t.to_string()).unwrap_or_default(),
        r.order.clone(),
        r.lazy.to_string(),
        r.rep.to_string(),
        r.seed.to_string(),
        r.n.to_string(),
        format_g(r.value),
        format_g(r.value_norm),
        r.queries.to_string(),
        format_g(r.queries_norm),
        r.peak_memory.to_string(),
        r.passes.to_string(),
        format_g(r.wall_ms),
    ]
}

pub fn write_records<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ResultRecord::COLUMNS)?;
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_csv(records: &[ResultRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_records(records, BufWriter::new(file))
}

pub fn read_records<R: Read>(input: R) -> Result<Vec<ResultRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != ResultRecord::COLUMNS {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    Ok(r.deserialize().collect::<std::result::Result<Vec<ResultRecord>, _>>()?)
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_records(file)
}
