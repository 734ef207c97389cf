//! Line-oriented codebook and assignment files.
//!
//! ```text
//! KFCG <dim> <size>
//! <c_1> <c_2> ... <c_dim>
//! ...
//! ```
//!
//! Components are written as shortest round-trip decimal `f64`. Assignments
//! are one cluster index per line, in training order.

use crate::scalar::Scalar;

use super::{Codebook, VqError};

pub fn write_codebook<T: Scalar>(cb: &Codebook<T>) -> String {
    let mut out = format!("KFCG {} {}\n", cb.dim(), cb.size());
    for cv in cb.codevectors() {
        let line: Vec<String> = cv
            .iter()
            .map(|v| format!("{:?}", v.to_f64().unwrap_or(f64::NAN)))
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_assignment(assignment: &[usize]) -> String {
    let mut out = String::with_capacity(assignment.len() * 4);
    for a in assignment {
        out.push_str(&a.to_string());
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, reason: impl Into<String>) -> VqError {
    VqError::Parse {
        line,
        reason: reason.into(),
    }
}

/// Parses codevectors written by [`write_codebook`].
pub fn parse_codebook<T: Scalar>(text: &str) -> Result<(usize, Vec<Vec<T>>), VqError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (dim, size) = match fields.as_slice() {
        ["KFCG", d, s] => (
            d.parse::<usize>().map_err(|_| parse_err(1, "bad dimension"))?,
            s.parse::<usize>().map_err(|_| parse_err(1, "bad size"))?,
        ),
        _ => return Err(parse_err(1, "expected \"KFCG <dim> <size>\"")),
    };
    let mut codevectors = Vec::with_capacity(size);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if line.trim().is_empty() {
            continue;
        }
        let cv = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .ok()
                    .and_then(T::from_f64)
                    .ok_or_else(|| parse_err(lineno, format!("bad component {tok:?}")))
            })
            .collect::<Result<Vec<T>, _>>()?;
        if cv.len() != dim {
            return Err(parse_err(lineno, format!("{} components, expected {dim}", cv.len())));
        }
        codevectors.push(cv);
    }
    if codevectors.len() != size {
        return Err(parse_err(
            0,
            format!("header announces {size} codevectors, found {}", codevectors.len()),
        ));
    }
    Ok((dim, codevectors))
}

pub fn parse_assignment(text: &str) -> Result<Vec<usize>, VqError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| parse_err(i + 1, format!("bad index {l:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vq::{kfcg_codebook, TrainingSet};
    use proptest::prelude::*;

    #[test]
    fn header_and_lines() {
        let cb = Codebook::from_parts(2, vec![vec![1.5, 0.0], vec![10.0, 1.0 / 3.0]], vec![0, 1, 1])
            .unwrap();
        let text = write_codebook(&cb);
        assert_eq!(text, "KFCG 2 2\n1.5 0.0\n10.0 0.3333333333333333\n");
        assert_eq!(write_assignment(cb.assignment()), "0\n1\n1\n");
    }

    #[test]
    fn rejects_bad_text() {
        assert!(parse_codebook::<f64>("").is_err());
        assert!(parse_codebook::<f64>("LBG 2 1\n1 2\n").is_err());
        assert!(parse_codebook::<f64>("KFCG 2 1\n1\n").is_err());
        assert!(parse_codebook::<f64>("KFCG 2 2\n1 2\n").is_err());
        assert!(parse_assignment("0\nx\n").is_err());
    }

    proptest! {
        #[test]
        fn round_trip(points in proptest::collection::vec(proptest::collection::vec(-1e6f64..1e6, 3), 1..40),
                      target in 1usize..16) {
            let ts = TrainingSet::from_vectors(3, points).unwrap();
            let cb = kfcg_codebook(&ts, target).unwrap();
            let (dim, cvs) = parse_codebook::<f64>(&write_codebook(&cb)).unwrap();
            prop_assert_eq!(dim, 3);
            prop_assert_eq!(cvs.as_slice(), cb.codevectors());
            prop_assert_eq!(parse_assignment(&write_assignment(cb.assignment())).unwrap(), cb.assignment().to_vec());
        }
    }
}
