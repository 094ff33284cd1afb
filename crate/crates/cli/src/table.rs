//! Correlation tables as CSV.

use std::path::Path;

use anyhow::{bail, Context, Result};
use povmw::Correlation;

use crate::fraction::exact_string;

const PARTY_COLUMNS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// One row per outcome tuple: indices, probability (17 significant digits)
/// and the recognized exact fraction, if any.
pub fn correlation_csv(corr: &Correlation) -> Result<String> {
    let n = corr.n_parties();
    if n > PARTY_COLUMNS.len() {
        bail!(
            "at most {} parties supported in CSV output",
            PARTY_COLUMNS.len()
        );
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<&str> = PARTY_COLUMNS[..n].to_vec();
    header.extend(["probability", "exact"]);
    w.write_record(&header)?;
    for (idx, &p) in corr.indices().iter().zip(corr.probs()) {
        let mut rec: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
        rec.push(format!("{p:.16e}"));
        rec.push(exact_string(p));
        w.write_record(&rec)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn write_correlation_csv(path: &Path, corr: &Correlation) -> Result<()> {
    std::fs::write(path, correlation_csv(corr)?)
        .with_context(|| format!("writing {}", path.display()))
}

/// Parses the output of [`correlation_csv`]. The outcome count of each party
/// is one more than its largest index.
pub fn parse_correlation_csv(text: &str) -> Result<Correlation> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let headers = r.headers()?.clone();
    let prob_col = headers
        .iter()
        .position(|h| h == "probability")
        .context("missing probability column")?;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let idx = (0..prob_col)
            .map(|i| rec[i].parse::<usize>().context("bad outcome index"))
            .collect::<Result<Vec<_>>>()?;
        let p: f64 = rec[prob_col].parse().context("bad probability")?;
        rows.push((idx, p));
    }
    let outcomes: Vec<usize> = (0..prob_col)
        .map(|i| rows.iter().map(|(idx, _)| idx[i] + 1).max().unwrap_or(0))
        .collect();
    let mut probs = vec![f64::NAN; outcomes.iter().product()];
    for (idx, p) in rows {
        let flat = idx
            .iter()
            .zip(&outcomes)
            .fold(0, |acc, (&i, &k)| acc * k + i);
        probs[flat] = p;
    }
    if probs.iter().any(|p| p.is_nan()) {
        bail!("CSV does not list every outcome tuple");
    }
    Ok(Correlation::new(outcomes, probs)?)
}

pub fn read_correlation_csv(path: &Path) -> Result<Correlation> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_correlation_csv(&text)
}

/// Rows separated by ';', entries by ',' or whitespace; bipartite only.
pub fn parse_inline_table(s: &str) -> Result<Correlation> {
    let rows = s
        .split(';')
        .map(|row| {
            row.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(parse_number)
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Correlation::from_rows(&rows)?)
}

/// Decimal or "n/d".
fn parse_number(t: &str) -> Result<f64> {
    match t.split_once('/') {
        Some((n, d)) => Ok(n.trim().parse::<f64>()? / d.trim().parse::<f64>()?),
        None => Ok(t.parse::<f64>()?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let c = Correlation::from_fn(vec![2, 3], |i| {
            [0.1, 0.2, 0.05, 0.3, 0.25, 0.1][i[0] * 3 + i[1]]
        })
        .unwrap();
        let back = parse_correlation_csv(&correlation_csv(&c).unwrap()).unwrap();
        assert_eq!(back.outcomes(), c.outcomes());
        assert!(back.max_abs_diff(&c) <= 1e-15);
    }

    #[test]
    fn inline() {
        let c = parse_inline_table("0 1/6 1/6; 1/6 0 1/6; 1/6,1/6,0").unwrap();
        assert!((c.get(&[0, 1]) - 1.0 / 6.0).abs() < 1e-16);
        assert!(parse_inline_table("1 2; 3").is_err());
    }
}
