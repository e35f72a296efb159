//! Element expressions and polynomial literals.
//!
//! Elements of a ring are written relative to its descriptor:
//!
//! * modular rings: integer literals (`3`, `-1`),
//! * quotients: polynomials in the quotient variable (`1+t`, `2*u^2`),
//! * matrix rings: row-major literals (`[[1,2],[0,1]]`),
//! * products: pairs (`(1,0)`),
//! * subrings: the ambient ring's grammar,
//! * any ring: `#k` for the raw index `k`, or an exact display name.
//!
//! Skew polynomial literals are coefficient lists low-to-high, e.g.
//! `[t, 0, t]` for `t + t*x^2`. The full grammar lives in `docs/formats.md`.

use thiserror::Error;

use crate::descriptor::RingDescriptor;
use crate::ring::{Elem, FiniteRing};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("element index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("expression `{0}` does not denote an element of this ring")]
    NotAnElement(String),
    #[error("the variable `{0}` is not defined for this ring")]
    UnknownVariable(String),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        self.skip_ws();
        let c = self.src.get(self.pos).copied();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        match self.bump() {
            Some(got) if got == c => Ok(()),
            got => Err(ExprError::Parse {
                pos: self.pos,
                msg: format!(
                    "expected `{}`, found {}",
                    c as char,
                    got.map(|g| format!("`{}`", g as char))
                        .unwrap_or_else(|| "end of input".into())
                ),
            }),
        }
    }

    fn integer(&mut self) -> Result<i64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ExprError::Parse {
                pos: self.pos,
                msg: "expected an integer".into(),
            });
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| ExprError::Parse {
                pos: start,
                msg: "integer literal too large".into(),
            })
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_alphabetic() || self.src[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if start == self.pos {
            None
        } else {
            Some(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }
}

/// Parses an element expression in the ring's grammar.
pub fn parse_elem(ring: &FiniteRing, src: &str) -> Result<Elem, ExprError> {
    // exact display names always work, whatever the grammar
    let trimmed = src.trim();
    if let Some(idx) = ring.names().iter().position(|n| n == trimmed) {
        return Ok(Elem(idx as u32));
    }
    let mut lx = Lexer::new(src);
    let e = parse_sum(ring, &mut lx)?;
    if !lx.at_end() {
        return Err(ExprError::Parse {
            pos: lx.pos,
            msg: "trailing input after expression".into(),
        });
    }
    Ok(e)
}

/// Parses a skew polynomial literal: `[c0, c1, ...]`, coefficients low-to-high.
pub fn parse_poly_literal(ring: &FiniteRing, src: &str) -> Result<Vec<Elem>, ExprError> {
    let mut lx = Lexer::new(src);
    lx.expect(b'[')?;
    let mut coeffs = Vec::new();
    if lx.peek() == Some(b']') {
        lx.bump();
    } else {
        loop {
            coeffs.push(parse_sum(ring, &mut lx)?);
            match lx.bump() {
                Some(b',') => continue,
                Some(b']') => break,
                _ => {
                    return Err(ExprError::Parse {
                        pos: lx.pos,
                        msg: "expected `,` or `]` in coefficient list".into(),
                    })
                }
            }
        }
    }
    if !lx.at_end() {
        return Err(ExprError::Parse {
            pos: lx.pos,
            msg: "trailing input after coefficient list".into(),
        });
    }
    Ok(coeffs)
}

/// Renders a coefficient list back to literal form, `[c0,c1,...]`.
pub fn poly_literal(ring: &FiniteRing, coeffs: &[Elem]) -> String {
    let parts: Vec<&str> = coeffs.iter().map(|&c| ring.name(c)).collect();
    format!("[{}]", parts.join(","))
}

fn parse_sum(ring: &FiniteRing, lx: &mut Lexer) -> Result<Elem, ExprError> {
    let mut acc = if lx.peek() == Some(b'-') {
        lx.bump();
        ring.neg(parse_term(ring, lx)?)
    } else {
        parse_term(ring, lx)?
    };
    loop {
        match lx.peek() {
            Some(b'+') => {
                lx.bump();
                let t = parse_term(ring, lx)?;
                acc = ring.add(acc, t);
            }
            Some(b'-') => {
                lx.bump();
                let t = parse_term(ring, lx)?;
                acc = ring.sub(acc, t);
            }
            _ => return Ok(acc),
        }
    }
}

fn parse_term(ring: &FiniteRing, lx: &mut Lexer) -> Result<Elem, ExprError> {
    let mut acc = parse_factor(ring, lx)?;
    while lx.peek() == Some(b'*') {
        lx.bump();
        let f = parse_factor(ring, lx)?;
        acc = ring.mul(acc, f);
    }
    Ok(acc)
}

fn parse_factor(ring: &FiniteRing, lx: &mut Lexer) -> Result<Elem, ExprError> {
    let base = parse_atom(ring, lx)?;
    if lx.peek() == Some(b'^') {
        lx.bump();
        let k = lx.integer()?;
        if k < 0 {
            return Err(ExprError::Parse {
                pos: lx.pos,
                msg: "negative exponents are not supported".into(),
            });
        }
        let mut acc = ring.one();
        for _ in 0..k {
            acc = ring.mul(acc, base);
        }
        return Ok(acc);
    }
    Ok(base)
}

fn parse_atom(ring: &FiniteRing, lx: &mut Lexer) -> Result<Elem, ExprError> {
    match lx.peek() {
        Some(b'#') => {
            lx.bump();
            let k = lx.integer()? as usize;
            if k >= ring.order() {
                return Err(ExprError::IndexOutOfRange(k));
            }
            Ok(Elem(k as u32))
        }
        Some(b'[') => parse_matrix(ring, lx),
        Some(b'(') => {
            lx.bump();
            // either a parenthesized expression or a product-ring pair
            if let RingDescriptor::Product { .. } = ring.descriptor() {
                parse_pair(ring, lx)
            } else {
                let e = parse_sum(ring, lx)?;
                lx.expect(b')')?;
                Ok(e)
            }
        }
        Some(c) if c.is_ascii_digit() => {
            let k = lx.integer()?;
            Ok(ring.int_elem(k))
        }
        _ => {
            if let Some(name) = lx.ident() {
                resolve_variable(ring, &name)
            } else {
                Err(ExprError::Parse {
                    pos: lx.pos,
                    msg: "expected an element expression".into(),
                })
            }
        }
    }
}

fn parse_pair(ring: &FiniteRing, lx: &mut Lexer) -> Result<Elem, ExprError> {
    let (first, second) = match ring.descriptor() {
        RingDescriptor::Product { first, second } => (first.clone(), second.clone()),
        _ => unreachable!("parse_pair is only called for product rings"),
    };
    let ra = crate::descriptor::construct_ring(&first)
        .map_err(|e| ExprError::NotAnElement(e.to_string()))?;
    let rb = crate::descriptor::construct_ring(&second)
        .map_err(|e| ExprError::NotAnElement(e.to_string()))?;
    let a = parse_sum(&ra, lx)?;
    lx.expect(b',')?;
    let b = parse_sum(&rb, lx)?;
    lx.expect(b')')?;
    Ok(Elem((a.index() * rb.order() + b.index()) as u32))
}

fn parse_matrix(ring: &FiniteRing, lx: &mut Lexer) -> Result<Elem, ExprError> {
    // resolve against the descriptor; subrings delegate to the ambient ring
    match ring.descriptor().clone() {
        RingDescriptor::UpperTriangular2x2 { base } => {
            let b = crate::descriptor::construct_ring(&base)
                .map_err(|e| ExprError::NotAnElement(e.to_string()))?;
            let m = read_matrix_entries(&b, lx)?;
            if !b.is_zero(m[2]) {
                return Err(ExprError::NotAnElement(
                    "lower-left entry must be 0 in a triangular ring".into(),
                ));
            }
            let n = b.order();
            Ok(Elem(
                ((m[0].index() * n + m[1].index()) * n + m[3].index()) as u32,
            ))
        }
        RingDescriptor::FullMatrix { base, k: 2 } => {
            let b = crate::descriptor::construct_ring(&base)
                .map_err(|e| ExprError::NotAnElement(e.to_string()))?;
            let m = read_matrix_entries(&b, lx)?;
            let n = b.order();
            Ok(Elem(
                (((m[0].index() * n + m[1].index()) * n + m[2].index()) * n + m[3].index()) as u32,
            ))
        }
        RingDescriptor::Subring { base, .. } => {
            let ambient = crate::descriptor::construct_ring(&base)
                .map_err(|e| ExprError::NotAnElement(e.to_string()))?;
            let amb = parse_matrix(&ambient, lx)?;
            let name = ambient.name(amb).to_string();
            ring.names()
                .iter()
                .position(|n| *n == name)
                .map(|i| Elem(i as u32))
                .ok_or(ExprError::NotAnElement(name))
        }
        _ => Err(ExprError::Parse {
            pos: lx.pos,
            msg: "matrix literals are only valid in matrix rings".into(),
        }),
    }
}

fn read_matrix_entries(base: &FiniteRing, lx: &mut Lexer) -> Result<[Elem; 4], ExprError> {
    lx.expect(b'[')?;
    lx.expect(b'[')?;
    let a = parse_sum(base, lx)?;
    lx.expect(b',')?;
    let b = parse_sum(base, lx)?;
    lx.expect(b']')?;
    lx.expect(b',')?;
    lx.expect(b'[')?;
    let c = parse_sum(base, lx)?;
    lx.expect(b',')?;
    let d = parse_sum(base, lx)?;
    lx.expect(b']')?;
    lx.expect(b']')?;
    Ok([a, b, c, d])
}

fn resolve_variable(ring: &FiniteRing, name: &str) -> Result<Elem, ExprError> {
    match ring.descriptor() {
        RingDescriptor::Quotient { var, base, .. } => {
            if name == var {
                let b = crate::descriptor::construct_ring(base)
                    .map_err(|e| ExprError::NotAnElement(e.to_string()))?;
                // coefficient vector (0, 1, 0, ...) encodes as |B|
                Ok(Elem(b.order() as u32))
            } else {
                Err(ExprError::UnknownVariable(name.to_string()))
            }
        }
        RingDescriptor::Subring { base, .. } => {
            let ambient = crate::descriptor::construct_ring(base)
                .map_err(|e| ExprError::NotAnElement(e.to_string()))?;
            let amb = resolve_variable(&ambient, name)?;
            let display = ambient.name(amb).to_string();
            ring.names()
                .iter()
                .position(|n| *n == display)
                .map(|i| Elem(i as u32))
                .ok_or(ExprError::NotAnElement(display))
        }
        _ => Err(ExprError::UnknownVariable(name.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::{construct_ring, RingDescriptor};

    #[test]
    fn modular_literals() {
        let r = construct_ring(&RingDescriptor::modular(6)).unwrap();
        assert_eq!(parse_elem(&r, "3").unwrap().index(), 3);
        assert_eq!(parse_elem(&r, "-1").unwrap().index(), 5);
        assert_eq!(parse_elem(&r, "2+2*2").unwrap().index(), 0);
        assert_eq!(parse_elem(&r, "#4").unwrap().index(), 4);
    }

    #[test]
    fn quotient_variables_and_powers() {
        let desc = RingDescriptor::quotient(RingDescriptor::modular(3), &["1", "0", "1"], "u");
        let r = construct_ring(&desc).unwrap();
        let u = parse_elem(&r, "u").unwrap();
        assert_eq!(r.name(u), "u");
        // u^2 = -1 = 2
        assert_eq!(parse_elem(&r, "u^2").unwrap(), r.int_elem(2));
        assert_eq!(parse_elem(&r, "1+2*u").unwrap(), {
            let two_u = r.mul(r.int_elem(2), u);
            r.add(r.one(), two_u)
        });
    }

    #[test]
    fn matrix_literals_round_trip_names() {
        let desc = RingDescriptor::upper_triangular_2x2(RingDescriptor::modular(5));
        let r = construct_ring(&desc).unwrap();
        for e in r.elems().take(30) {
            let back = parse_elem(&r, r.name(e)).unwrap();
            assert_eq!(back, e);
        }
        assert!(parse_elem(&r, "[[1,0],[1,1]]").is_err());
    }

    #[test]
    fn poly_literals() {
        let desc = RingDescriptor::quotient(RingDescriptor::modular(2), &["0", "0", "1"], "t");
        let r = construct_ring(&desc).unwrap();
        let coeffs = parse_poly_literal(&r, "[t, 0, t]").unwrap();
        assert_eq!(coeffs.len(), 3);
        assert_eq!(r.name(coeffs[0]), "t");
        assert_eq!(r.name(coeffs[1]), "0");
        assert_eq!(poly_literal(&r, &coeffs), "[t,0,t]");
    }

    #[test]
    fn parse_error_carries_position() {
        let r = construct_ring(&RingDescriptor::modular(4)).unwrap();
        let err = parse_elem(&r, "1+").unwrap_err();
        assert!(matches!(err, ExprError::Parse { .. }));
    }
}
