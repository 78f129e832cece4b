//! Text forms for divisor classes and derived-category objects, used by the
//! command line.
//!
//! A class is a signed sum of `H`, `E<i>` and the shorthand `*E` for
//! `E1+...+E10`, e.g. `-19H+6*E` or `7H-2*E-2E1`; repeated terms add. A JSON
//! array `[h, e1, ..., e10]` is accepted too. Objects are `line:<class>`,
//! `sky:<label>` or `curve:n=<n>`.

use crate::hom::ObjectSpec;
use crate::picard::{DivisorClass, NUM_POINTS};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty class expression")]
    Empty,
    #[error("unexpected character {0:?} at byte {1}")]
    Unexpected(char, usize),
    #[error("exceptional index {0} out of range 1..=10")]
    BadIndex(u64),
    #[error("JSON class must be an array [h, e1, ..., e10] of 11 integers")]
    BadJson,
    #[error("unknown object kind {0:?}; expected line:, sky: or curve:n=")]
    BadObject(String),
    #[error("curve parameter must be an integer n >= 3, got {0:?}")]
    BadCurve(String),
}

/// Parse `dH ± m*E ± mE<i> ...` or a JSON `[h, e1, ..., e10]` array.
pub fn parse_class(input: &str) -> Result<DivisorClass, ParseError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    if s.starts_with('[') {
        let v: Vec<i64> = serde_json::from_str(s).map_err(|_| ParseError::BadJson)?;
        if v.len() != NUM_POINTS + 1 {
            return Err(ParseError::BadJson);
        }
        let mut e = [0i64; NUM_POINTS];
        e.copy_from_slice(&v[1..]);
        return Ok(DivisorClass::new(v[0], e));
    }

    let bytes: Vec<(usize, char)> = s.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut pos = 0;
    let mut class = DivisorClass::ZERO;
    let mut first = true;

    let read_number = |pos: &mut usize| -> Option<u64> {
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].1.is_ascii_digit() {
            *pos += 1;
        }
        if *pos == start {
            None
        } else {
            bytes[start..*pos].iter().map(|&(_, c)| c).collect::<String>().parse().ok()
        }
    };

    while pos < bytes.len() {
        let sign = match bytes[pos].1 {
            '+' => {
                pos += 1;
                1
            }
            '-' => {
                pos += 1;
                -1
            }
            _ if first => 1,
            c => return Err(ParseError::Unexpected(c, bytes[pos].0)),
        };
        first = false;
        let coeff = read_number(&mut pos).unwrap_or(1) as i64;
        let (idx, c) = match bytes.get(pos) {
            Some(&(i, c)) => (i, c),
            None => return Err(ParseError::Unexpected(' ', s.len())),
        };
        pos += 1;
        let term = match c {
            'H' => DivisorClass::hyperplane(),
            '*' => match bytes.get(pos) {
                Some(&(_, 'E')) => {
                    pos += 1;
                    DivisorClass::new(0, [1; NUM_POINTS])
                }
                _ => return Err(ParseError::Unexpected('*', idx)),
            },
            'E' => {
                let i = read_number(&mut pos).ok_or(ParseError::Unexpected('E', idx))?;
                if !(1..=NUM_POINTS as u64).contains(&i) {
                    return Err(ParseError::BadIndex(i));
                }
                DivisorClass::exceptional(i as usize)
            }
            c => return Err(ParseError::Unexpected(c, idx)),
        };
        class = class.add(&term.scale(sign * coeff));
    }
    Ok(class)
}

/// Parse an object: `line:<class>`, `sky:<label>` or `curve:n=<n>`.
pub fn parse_object(input: &str) -> Result<ObjectSpec, ParseError> {
    let s = input.trim();
    if let Some(rest) = s.strip_prefix("line:") {
        return Ok(ObjectSpec::line(parse_class(rest)?));
    }
    if let Some(rest) = s.strip_prefix("sky:") {
        return Ok(ObjectSpec::sky(rest.trim()));
    }
    if let Some(rest) = s.strip_prefix("curve:") {
        let rest = rest.trim();
        let n: i64 = rest
            .strip_prefix("n=")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| ParseError::BadCurve(rest.to_string()))?;
        if n < 3 {
            return Err(ParseError::BadCurve(rest.to_string()));
        }
        return Ok(ObjectSpec::curve(n));
    }
    Err(ParseError::BadObject(s.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::picard::DivisorClass as D;

    #[test]
    fn named_classes_round_trip() {
        for class in [
            D::hyperplane(),
            D::canonical(),
            D::f_class(),
            D::d_class(3),
            D::exceptional(7),
            D::homogeneous(57, 19),
            D::from_deg_mults(7, [2, 2, 2, 2, 2, 2, 2, 2, 2, 4]),
            D::ZERO,
        ] {
            let text = class.to_string();
            assert_eq!(parse_class(&text).unwrap(), class, "{text}");
        }
    }

    #[test]
    fn shorthand_and_mixed_terms() {
        assert_eq!(parse_class("57H-19*E").unwrap(), D::homogeneous(57, 19));
        assert_eq!(parse_class("-19H + 6*E").unwrap(), D::f_class());
        // repeated terms add: 7H - 2*E - 2E1 has m1 = 4
        let c = parse_class("7H-2*E-2E1").unwrap();
        assert_eq!(c.degree(), 7);
        assert_eq!(c.mults()[0], 4);
        assert_eq!(c.mults()[5], 2);
        assert_eq!(parse_class("E4").unwrap(), D::exceptional(4));
        let line = parse_class("H-E1-E2-E3-E4").unwrap();
        assert_eq!(line.mults(), [1, 1, 1, 1, 0, 0, 0, 0, 0, 0]);
    }

    #[test]
    fn json_form() {
        let c = parse_class("[ -3, 1,1,1,1,1,1,1,1,1,1 ]").unwrap();
        assert_eq!(c, D::canonical());
        assert_eq!(parse_class("[1,2]"), Err(ParseError::BadJson));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_class(""), Err(ParseError::Empty));
        assert_eq!(parse_class("3E11"), Err(ParseError::BadIndex(11)));
        assert!(matches!(parse_class("2X"), Err(ParseError::Unexpected('X', _))));
        assert!(matches!(parse_class("3H 4H"), Err(ParseError::Unexpected('4', _))));
    }

    #[test]
    fn objects() {
        assert_eq!(parse_object("line:-3H+1*E").unwrap(), ObjectSpec::line(D::canonical()));
        assert_eq!(parse_object("sky:p").unwrap(), ObjectSpec::sky("p"));
        assert_eq!(parse_object("curve:n=5").unwrap(), ObjectSpec::curve(5));
        assert!(matches!(parse_object("curve:n=2"), Err(ParseError::BadCurve(_))));
        assert!(matches!(parse_object("blob:x"), Err(ParseError::BadObject(_))));
    }
}
