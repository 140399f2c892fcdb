//! JSON and CSV formats.
//!
//! Channel: `{"m": 2, "n": 2, "rows": [[0.5, "0.5"], ...]}`; entries may be
//! numbers or decimal strings. Decomposition: `{"m", "n", "atoms": [{"image":
//! [1, 2], "weight": 0.5}, ...]}` with one-based output labels.

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use crate::channel::{validate_channel, Channel, DetChannel};
use crate::decomposition::Decomposition;
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct ChannelFile {
    m: Option<usize>,
    n: Option<usize>,
    rows: Vec<Vec<Value>>,
}

fn entry(v: &Value, row: usize) -> Result<f64> {
    match v {
        Value::Number(x) => x
            .as_f64()
            .ok_or_else(|| Error::InvalidInput(format!("row {row}: number out of range"))),
        Value::String(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidInput(format!("row {row}: cannot parse {s:?} as a number"))),
        other => Err(Error::InvalidInput(format!("row {row}: unexpected entry {other}"))),
    }
}

pub fn parse_channel(text: &str) -> Result<Channel> {
    let file: ChannelFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("channel JSON: {e}")))?;
    let rows = file
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().map(|v| entry(v, i + 1)).collect::<Result<Vec<f64>>>())
        .collect::<Result<Vec<_>>>()?;
    if file.m.is_some_and(|m| m != rows.len()) {
        return Err(Error::WrongShape(format!("m = {} but {} rows given", file.m.unwrap_or(0), rows.len())));
    }
    if let Some(n) = file.n {
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::WrongShape(format!("row {} has {} entries, n = {n}", i + 1, r.len())));
        }
    }
    validate_channel(&rows)
}

pub fn channel_to_json(w: &Channel) -> Value {
    serde_json::json!({ "m": w.m(), "n": w.n(), "rows": w.to_rows() })
}

#[derive(Serialize, Deserialize)]
struct AtomRecord {
    image: Vec<usize>,
    weight: f64,
}

impl Serialize for Decomposition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let atoms: Vec<AtomRecord> = self
            .atoms()
            .into_iter()
            .map(|(d, weight)| AtomRecord { image: d.image().iter().map(|y| y + 1).collect(), weight })
            .collect();
        let mut st = s.serialize_struct("Decomposition", 3)?;
        st.serialize_field("m", &self.m())?;
        st.serialize_field("n", &self.n())?;
        st.serialize_field("atoms", &atoms)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct DecompositionFile {
    m: usize,
    n: usize,
    atoms: Vec<AtomRecord>,
}

pub fn parse_decomposition(text: &str) -> Result<Decomposition> {
    let file: DecompositionFile =
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("decomposition JSON: {e}")))?;
    let mut atoms = Vec::with_capacity(file.atoms.len());
    for a in &file.atoms {
        if a.image.len() != file.m || a.image.iter().any(|&y| y == 0 || y > file.n) {
            return Err(Error::WrongShape(format!("atom image {:?} does not fit m={}, n={}", a.image, file.m, file.n)));
        }
        let d = DetChannel::new(file.n, a.image.iter().map(|y| y - 1).collect())?;
        atoms.push((d, a.weight));
    }
    Decomposition::from_atoms(file.m, file.n, &atoms)
}

/// Formats with 10 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..10).contains(&exp) {
        let decimals = (9 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        trim_zeros(&s)
    } else {
        let s = format!("{x:.9e}");
        let (mant, e) = s.split_once('e').expect("exponent present");
        format!("{}e{e}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Renders a header and rows as CSV.
pub fn to_csv(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|&x| format_sig(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn channel_round_trip_with_strings() {
        let w = parse_channel(r#"{"m":2,"n":2,"rows":[["0.25","0.75"],[0.5,0.5]]}"#).unwrap();
        assert_eq!(w.row(0), &[0.25, 0.75]);
        let again = parse_channel(&channel_to_json(&w).to_string()).unwrap();
        assert_eq!(again, w);
    }

    #[test]
    fn channel_errors() {
        let e = parse_channel(r#"{"rows":[[0.6,0.5],[0.5,0.5]]}"#).unwrap_err();
        assert!(matches!(e, Error::NotStochastic { row: 1, .. }));
        assert!(parse_channel(r#"{"m":3,"rows":[[1,0],[0,1]]}"#).is_err());
        assert!(parse_channel("not json").is_err());
    }

    #[test]
    fn decomposition_round_trip() {
        let text = r#"{"m":2,"n":2,"atoms":[{"image":[1,2],"weight":0.5},{"image":[2,1],"weight":0.5}]}"#;
        let l = parse_decomposition(text).unwrap();
        assert_eq!(l.reconstruct(), Channel::uniform(2, 2));
        let json = serde_json::to_string(&l).unwrap();
        assert_eq!(parse_decomposition(&json).unwrap(), l);
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(0.18872187554086717), "0.1887218755");
        assert_eq!(format_sig(1.0), "1");
        assert_eq!(format_sig(0.25), "0.25");
        assert_eq!(format_sig(123.456789012345), "123.456789");
        assert_eq!(format_sig(0.0), "0");
    }
}
