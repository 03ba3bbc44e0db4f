//! Line-oriented text format for rational Fock vectors.
//!
//! ```text
//! # comment
//! 2; (1,1,0)^1 (2,-1,1)^1; 3/4
//! 0; ; -1/1
//! ```
//!
//! Each line is `degree; (coord,freq,dualflag)^mult ...; numerator/denominator`.
//! Serialization writes terms in the canonical graded order with reduced
//! fractions, so equal vectors give identical bytes.

use std::fmt::Write as _;

use super::mode::{ModeIndex, MultiIndex};
use super::vector::FockVector;
use super::FockError;
use crate::scalar::{format_rational, parse_rational, Rational};

pub const HEADER: &str = "# fock-vector v1";

pub fn serialize_fock(f: &FockVector<Rational>) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for (mu, c) in f.iter() {
        let _ = write!(out, "{}; ", mu.degree());
        let factors: Vec<String> = mu.entries().iter().map(|(m, k)| format!("{m}^{k}")).collect();
        out.push_str(&factors.join(" "));
        let _ = writeln!(out, "; {}", format_rational(c));
    }
    out
}

pub fn deserialize_fock(text: &str) -> Result<FockVector<Rational>, FockError> {
    let mut out = FockVector::zero();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let (mu, coeff) = parse_line(content).map_err(|(column, message)| FockError::Parse {
            line: line_no,
            column: column + 1,
            message,
        })?;
        out.add_term(mu, coeff);
    }
    Ok(out)
}

type LineError = (usize, String);

fn parse_line(line: &str) -> Result<(MultiIndex, Rational), LineError> {
    let mut fields = Vec::with_capacity(3);
    let mut start = 0;
    for (i, ch) in line.char_indices() {
        if ch == ';' {
            fields.push((start, &line[start..i]));
            start = i + 1;
        }
    }
    fields.push((start, &line[start..]));
    if fields.len() != 3 {
        return Err((0, format!("expected 3 ';'-separated fields, found {}", fields.len())));
    }
    let (deg_off, deg_text) = fields[0];
    let degree: u32 = deg_text
        .trim()
        .parse()
        .map_err(|e| (deg_off, format!("bad degree {:?}: {e}", deg_text.trim())))?;

    let (fac_off, fac_text) = fields[1];
    let mut pairs = Vec::new();
    let mut cursor = 0;
    for token in fac_text.split_whitespace() {
        let rel = fac_text[cursor..].find(token).map_or(cursor, |p| cursor + p);
        cursor = rel + token.len();
        pairs.push(parse_factor(token).map_err(|msg| (fac_off + rel, msg))?);
    }
    let mu = MultiIndex::from_pairs(pairs);
    if mu.degree() != degree {
        return Err((deg_off, format!("declared degree {degree} but factors have degree {}", mu.degree())));
    }

    let (coef_off, coef_text) = fields[2];
    let coeff = parse_rational(coef_text).map_err(|msg| (coef_off, msg))?;
    Ok((mu, coeff))
}

fn parse_factor(token: &str) -> Result<(ModeIndex, u32), String> {
    let (mode, mult) = token
        .split_once('^')
        .ok_or_else(|| format!("factor {token:?} lacks '^multiplicity'"))?;
    let inner = mode
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| format!("mode {mode:?} is not parenthesized"))?;
    let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("mode {mode:?} needs (coord,freq,dualflag)"));
    }
    let coord: u16 = parts[0].parse().map_err(|e| format!("bad coord {:?}: {e}", parts[0]))?;
    if coord == 0 {
        return Err("coordinates are 1-based".into());
    }
    let freq: i32 = parts[1].parse().map_err(|e| format!("bad freq {:?}: {e}", parts[1]))?;
    let dual = match parts[2] {
        "0" => false,
        "1" => true,
        other => return Err(format!("dual flag must be 0 or 1, got {other:?}")),
    };
    let mult: u32 = mult.parse().map_err(|e| format!("bad multiplicity {mult:?}: {e}"))?;
    if mult == 0 {
        return Err("multiplicity must be positive".into());
    }
    Ok((ModeIndex { coord, freq, dual }, mult))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn empty_stream_is_zero() {
        assert!(deserialize_fock("").unwrap().is_zero());
        assert!(deserialize_fock("# only a comment\n\n").unwrap().is_zero());
    }

    #[test]
    fn known_bytes() {
        let f = FockVector::from_terms([
            (MultiIndex::from_modes([ModeIndex::primal(1, 1), ModeIndex::dual(2, -1)]), ratio(6, 8)),
            (MultiIndex::vacuum(), ratio(-1, 1)),
        ]);
        let text = serialize_fock(&f);
        assert_eq!(text, "# fock-vector v1\n0; ; -1/1\n2; (1,1,0)^1 (2,-1,1)^1; 3/4\n");
        assert_eq!(deserialize_fock(&text).unwrap(), f);
    }

    #[test]
    fn reports_line_and_column() {
        let err = deserialize_fock("0; ; 1/1\n1; (1,1,2)^1; 1/2\n").unwrap_err();
        match err {
            FockError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 4);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(deserialize_fock("1; (1,1,0)^2; 1/1").is_err(), "degree mismatch");
        assert!(deserialize_fock("1; (1,1,0)^1").is_err(), "missing field");
        assert!(deserialize_fock("1; (1,1,0)^1; 1/0").is_err(), "zero denominator");
    }

    #[test]
    fn repeated_terms_merge() {
        let f = deserialize_fock("1; (1,0,0)^1; 1/2\n1; (1,0,0)^1; 1/2 # again\n").unwrap();
        assert_eq!(f, FockVector::mode(ModeIndex::primal(1, 0), ratio(1, 1)));
    }
}
