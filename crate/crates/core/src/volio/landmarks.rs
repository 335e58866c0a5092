//! Landmark CSV files: header `name,x,y,z` or `x,y,z`, coordinates in
//! continuous voxel units.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub name: String,
    pub p: [f64; 3],
}

/// Ordered landmarks with unique names.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LandmarkSet {
    landmarks: Vec<Landmark>,
}

impl LandmarkSet {
    pub fn new(landmarks: Vec<Landmark>) -> Result<Self> {
        let mut seen = HashSet::new();
        for (i, lm) in landmarks.iter().enumerate() {
            if lm.p.iter().any(|c| !c.is_finite()) {
                return Err(Error::NonFiniteCoordinate(i));
            }
            if !seen.insert(lm.name.as_str()) {
                return Err(Error::DuplicateName(lm.name.clone()));
            }
        }
        Ok(LandmarkSet { landmarks })
    }

    pub fn len(&self) -> usize {
        self.landmarks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.landmarks.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Landmark> {
        self.landmarks.iter()
    }

    pub fn as_slice(&self) -> &[Landmark] {
        &self.landmarks
    }

    /// Fails unless both sets carry the same names in the same order.
    pub fn check_paired(&self, other: &LandmarkSet) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::UnpairedLandmarks(format!(
                "{} fixed vs {} moving landmarks",
                self.len(),
                other.len()
            )));
        }
        for (a, b) in self.iter().zip(other.iter()) {
            if a.name != b.name {
                return Err(Error::UnpairedLandmarks(format!(
                    "name order differs: {:?} vs {:?}",
                    a.name, b.name
                )));
            }
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a LandmarkSet {
    type Item = &'a Landmark;
    type IntoIter = std::slice::Iter<'a, Landmark>;

    fn into_iter(self) -> Self::IntoIter {
        self.landmarks.iter()
    }
}

pub fn parse_landmarks(input: impl Read) -> Result<LandmarkSet> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut records = rdr.records();

    let malformed = |line: usize, reason: String| Error::MalformedRow { line, reason };
    let header = match records.next() {
        Some(r) => r.map_err(|e| malformed(1, e.to_string()))?,
        None => return Ok(LandmarkSet::default()),
    };
    let cols: Vec<String> = header.iter().map(|c| c.to_ascii_lowercase()).collect();
    let named = match cols.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["name", "x", "y", "z"] => true,
        ["x", "y", "z"] => false,
        _ => {
            return Err(malformed(
                1,
                format!("expected header name,x,y,z or x,y,z, got {:?}", header),
            ))
        }
    };
    let width = if named { 4 } else { 3 };

    let mut landmarks = Vec::new();
    let mut seen = HashSet::new();
    for (row, rec) in records.enumerate() {
        let rec = rec.map_err(|e| malformed(row + 2, e.to_string()))?;
        let line = rec.position().map_or(row + 2, |p| p.line() as usize);
        if rec.len() == 1 && rec[0].is_empty() {
            continue;
        }
        if rec.len() != width {
            return Err(malformed(
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let name = if named {
            rec[0].to_string()
        } else {
            landmarks.len().to_string()
        };
        let mut p = [0.0; 3];
        for a in 0..3 {
            let field = &rec[width - 3 + a];
            p[a] = field
                .parse::<f64>()
                .map_err(|_| malformed(line, format!("not a number: {field:?}")))?;
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate(line));
        }
        if !seen.insert(name.clone()) {
            return Err(Error::DuplicateName(name));
        }
        landmarks.push(Landmark { name, p });
    }
    Ok(LandmarkSet { landmarks })
}

pub fn read_landmarks(path: impl AsRef<Path>) -> Result<LandmarkSet> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_landmarks(std::io::BufReader::new(file))
}

pub fn write_landmarks(set: &LandmarkSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |e: std::io::Error| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "name,x,y,z").map_err(io)?;
    for lm in set {
        writeln!(w, "{},{},{},{}", lm.name, lm.p[0], lm.p[1], lm.p[2]).map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<LandmarkSet> {
        parse_landmarks(s.as_bytes())
    }

    #[test]
    fn named_row() {
        let set = parse("name,x,y,z\nA,10,10,10").unwrap();
        assert_eq!(set.as_slice(), &[Landmark { name: "A".into(), p: [10.0; 3] }]);
    }

    #[test]
    fn unnamed_rows_are_numbered() {
        let set = parse("x,y,z\n1.5,2.25,3.0").unwrap();
        assert_eq!(set.as_slice()[0].name, "0");
        assert_eq!(set.as_slice()[0].p, [1.5, 2.25, 3.0]);
    }

    #[test]
    fn crlf_and_blank_trailing_line() {
        let set = parse("name,x,y,z\r\nA,1,2,3\r\nB,4,5,6\r\n").unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.as_slice()[1].p, [4.0, 5.0, 6.0]);
    }

    #[test]
    fn short_row_is_malformed() {
        assert!(matches!(
            parse("name,x,y,z\nA,1,2"),
            Err(Error::MalformedRow { line: 2, .. })
        ));
    }

    #[test]
    fn duplicate_and_nonfinite() {
        assert!(matches!(
            parse("name,x,y,z\nA,1,2,3\nA,4,5,6"),
            Err(Error::DuplicateName(n)) if n == "A"
        ));
        assert!(matches!(
            parse("name,x,y,z\nA,1,inf,3"),
            Err(Error::NonFiniteCoordinate(2))
        ));
    }

    #[test]
    fn pairing_checks_names() {
        let a = parse("name,x,y,z\nA,1,2,3\nB,1,2,3").unwrap();
        let b = parse("name,x,y,z\nB,1,2,3\nA,1,2,3").unwrap();
        assert!(a.check_paired(&a).is_ok());
        assert!(matches!(a.check_paired(&b), Err(Error::UnpairedLandmarks(_))));
    }
}
