//! Plain-text complex and cochain files.
//!
//! Complex file:
//!
//! ```text
//! dim 2
//! # comment
//! 0 1 2 0.25
//! 0 1 3 0.75
//! ```
//!
//! The weight column is optional but must be present on every facet line or
//! on none. Cochain files start with `dim k` followed by lines of `k+1`
//! ascending vertex ids and a value; faces that are not listed are zero.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::cochain::Cochain;
use crate::complex::{Face, PureComplex};
use crate::error::{HdxError, Result};
use crate::scalar::Scalar;

fn parse_err(line: usize, message: impl Into<String>) -> HdxError {
    HdxError::Parse {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from one.
fn significant_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<isize> {
    let (no, line) = lines.next().ok_or_else(|| parse_err(1, "missing `dim` header"))?;
    let mut tokens = line.split_whitespace();
    if tokens.next() != Some("dim") {
        return Err(parse_err(no, "expected `dim <d>` header"));
    }
    let d = tokens
        .next()
        .ok_or_else(|| parse_err(no, "missing dimension after `dim`"))?
        .parse::<isize>()
        .map_err(|e| parse_err(no, format!("bad dimension: {e}")))?;
    if tokens.next().is_some() {
        return Err(parse_err(no, "trailing tokens after dimension"));
    }
    Ok(d)
}

fn parse_vertex(no: usize, token: &str) -> Result<usize> {
    token
        .parse::<usize>()
        .map_err(|e| parse_err(no, format!("bad vertex `{token}`: {e}")))
}

fn parse_real(no: usize, token: &str) -> Result<f64> {
    let v = token
        .parse::<f64>()
        .map_err(|e| parse_err(no, format!("bad number `{token}`: {e}")))?;
    if !v.is_finite() {
        return Err(parse_err(no, format!("non-finite number `{token}`")));
    }
    Ok(v)
}

pub fn parse_complex<T: Scalar>(text: &str) -> Result<PureComplex<T>> {
    let mut lines = significant_lines(text);
    let d = parse_header(&mut lines)?;
    if d < 0 {
        return Err(parse_err(1, "dimension must be non-negative"));
    }
    let size = (d + 1) as usize;
    let mut facets = Vec::new();
    let mut weights = Vec::new();
    let mut weighted: Option<bool> = None;
    let mut seen = HashSet::new();
    for (no, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let has_weight = match tokens.len() {
            n if n == size => false,
            n if n == size + 1 => true,
            n => {
                return Err(parse_err(
                    no,
                    format!("expected {size} vertices and an optional weight, found {n} tokens"),
                ))
            }
        };
        match weighted {
            None => weighted = Some(has_weight),
            Some(w) if w != has_weight => {
                return Err(parse_err(no, "weights must be given on all facet lines or none"))
            }
            _ => {}
        }
        let verts = tokens[..size]
            .iter()
            .map(|t| parse_vertex(no, t))
            .collect::<Result<Vec<_>>>()?;
        let face = Face::new(verts).map_err(|e| parse_err(no, e.to_string()))?;
        if !seen.insert(face.clone()) {
            return Err(parse_err(no, format!("duplicate facet {face}")));
        }
        if has_weight {
            let w = parse_real(no, tokens[size])?;
            if w <= 0.0 {
                return Err(parse_err(no, format!("weight {w} is not positive")));
            }
            weights.push(T::lit(w));
        }
        facets.push(face);
    }
    if facets.is_empty() {
        return Err(HdxError::EmptyFacets);
    }
    let ws = (weighted == Some(true)).then_some(weights.as_slice());
    PureComplex::build(&facets, ws)
}

/// Writes the facets in canonical order; weights are omitted when uniform.
pub fn write_complex<T: Scalar>(x: &PureComplex<T>) -> String {
    let d = x.top_dim();
    let facets = x.faces(d).expect("top dimension exists");
    let weights = x.weights(d).expect("top dimension exists");
    let uniform = weights.windows(2).all(|w| w[0] == w[1]);
    let mut out = format!("dim {d}\n");
    for (f, w) in facets.iter().zip(weights) {
        let verts: Vec<String> = f.vertices().iter().map(|v| v.to_string()).collect();
        out.push_str(&verts.join(" "));
        if !uniform {
            let _ = write!(out, " {}", w.as_f64());
        }
        out.push('\n');
    }
    out
}

pub fn parse_cochain<T: Scalar>(x: &PureComplex<T>, text: &str) -> Result<Cochain<T>> {
    let mut lines = significant_lines(text);
    let k = parse_header(&mut lines)?;
    let n = x
        .num_faces(k)
        .map_err(|_| parse_err(1, format!("complex has no faces of dimension {k}")))?;
    let size = (k + 1) as usize;
    let mut values = vec![T::zero(); n];
    let mut seen = HashSet::new();
    for (no, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != size + 1 {
            return Err(parse_err(
                no,
                format!(
                    "expected {size} vertices and a value, found {} tokens",
                    tokens.len()
                ),
            ));
        }
        let verts = tokens[..size]
            .iter()
            .map(|t| parse_vertex(no, t))
            .collect::<Result<Vec<_>>>()?;
        if verts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(parse_err(no, "vertices must be strictly ascending"));
        }
        let face = Face::new(verts).map_err(|e| parse_err(no, e.to_string()))?;
        let pos = x
            .index_of(&face)
            .ok_or_else(|| parse_err(no, format!("face {face} is not in the complex")))?;
        if !seen.insert(pos) {
            return Err(parse_err(no, format!("face {face} listed twice")));
        }
        values[pos] = T::lit(parse_real(no, tokens[size])?);
    }
    Cochain::from_vec(x, k, values)
}

/// Writes every face of the cochain's dimension in canonical order.
pub fn write_cochain<T: Scalar>(x: &PureComplex<T>, f: &Cochain<T>) -> Result<String> {
    let faces = x.faces(f.dim())?;
    let mut out = format!("dim {}\n", f.dim());
    for (face, v) in faces.iter().zip(f.values().iter()) {
        for u in face.vertices() {
            let _ = write!(out, "{u} ");
        }
        let _ = writeln!(out, "{}", v.as_f64());
    }
    Ok(out)
}
