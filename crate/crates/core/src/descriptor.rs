//! Structured ring descriptors and their compilation to table form.
//!
//! A descriptor is a declarative, JSON-compatible recipe. Compiling the same
//! descriptor always yields the same index assignment, so descriptors can be
//! shipped as data files and reports stay reproducible.

use serde::{Deserialize, Serialize};

use crate::expr;
use crate::ring::{Elem, FiniteRing, RingError, RingRef};

/// Construction limits. The order cap keeps accidental huge tables out.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RingLimits {
    pub max_order: usize,
}

impl Default for RingLimits {
    fn default() -> Self {
        RingLimits { max_order: 4096 }
    }
}

/// Declarative recipe for a finite ring.
///
/// Quotient polynomial coefficients and subring generators are element
/// expressions in the base ring's grammar (see `docs/formats.md`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RingDescriptor {
    /// Integers modulo `n`.
    Modular { n: u32 },
    /// `B[var]/(f)` for a monic `f` over a commutative base `B`; elements are
    /// coefficient vectors of degree < deg f, listed low-to-high.
    Quotient {
        base: Box<RingDescriptor>,
        poly: Vec<String>,
        #[serde(default = "default_var")]
        var: String,
    },
    /// 2x2 upper triangular matrices `[[a,b],[0,c]]` over a base ring.
    UpperTriangular2x2 { base: Box<RingDescriptor> },
    /// Full `k x k` matrices over a base ring, `k <= 2`.
    FullMatrix { base: Box<RingDescriptor>, k: u32 },
    /// Direct product of two rings; elements are pairs.
    Product {
        first: Box<RingDescriptor>,
        second: Box<RingDescriptor>,
    },
    /// Unital subring of an ambient ring generated by the listed elements
    /// (closure under addition, negation and multiplication).
    Subring {
        base: Box<RingDescriptor>,
        gens: Vec<String>,
    },
    /// Raw tables, verified against all ring axioms on construction.
    Table {
        order: u32,
        add: Vec<u32>,
        mul: Vec<u32>,
        zero: u32,
        one: u32,
        names: Option<Vec<String>>,
    },
}

fn default_var() -> String {
    "t".to_string()
}

impl RingDescriptor {
    pub fn modular(n: u32) -> Self {
        RingDescriptor::Modular { n }
    }

    pub fn quotient(base: RingDescriptor, poly: &[&str], var: &str) -> Self {
        RingDescriptor::Quotient {
            base: Box::new(base),
            poly: poly.iter().map(|s| s.to_string()).collect(),
            var: var.to_string(),
        }
    }

    pub fn upper_triangular_2x2(base: RingDescriptor) -> Self {
        RingDescriptor::UpperTriangular2x2 {
            base: Box::new(base),
        }
    }

    pub fn product(first: RingDescriptor, second: RingDescriptor) -> Self {
        RingDescriptor::Product {
            first: Box::new(first),
            second: Box::new(second),
        }
    }

    pub fn subring(base: RingDescriptor, gens: &[&str]) -> Self {
        RingDescriptor::Subring {
            base: Box::new(base),
            gens: gens.iter().map(|s| s.to_string()).collect(),
        }
    }
}

/// Compiles a descriptor with the default order cap.
pub fn construct_ring(desc: &RingDescriptor) -> Result<RingRef, RingError> {
    construct_ring_with_limits(desc, RingLimits::default())
}

/// Compiles a descriptor to a verified table ring.
pub fn construct_ring_with_limits(
    desc: &RingDescriptor,
    limits: RingLimits,
) -> Result<RingRef, RingError> {
    let order = descriptor_order(desc, limits.max_order)?;
    if order > limits.max_order {
        return Err(RingError::OrderLimitExceeded {
            order,
            limit: limits.max_order,
        });
    }
    match desc {
        RingDescriptor::Modular { n } => build_modular(*n),
        RingDescriptor::Quotient { base, poly, var } => {
            let b = construct_ring_with_limits(base, limits)?;
            build_quotient(desc.clone(), &b, poly, var)
        }
        RingDescriptor::UpperTriangular2x2 { base } => {
            let b = construct_ring_with_limits(base, limits)?;
            build_matrix(desc.clone(), &b, MatrixShape::UpperTriangular)
        }
        RingDescriptor::FullMatrix { base, k } => match k {
            1 => {
                let b = construct_ring_with_limits(base, limits)?;
                // re-tag so the descriptor round-trips
                FiniteRing::from_tables(
                    desc.clone(),
                    table_of(&b, true),
                    table_of(&b, false),
                    b.zero().0,
                    b.one().0,
                    b.names().to_vec(),
                )
            }
            2 => {
                let b = construct_ring_with_limits(base, limits)?;
                build_matrix(desc.clone(), &b, MatrixShape::Full)
            }
            other => Err(RingError::MatrixSizeUnsupported(*other)),
        },
        RingDescriptor::Product { first, second } => {
            let a = construct_ring_with_limits(first, limits)?;
            let b = construct_ring_with_limits(second, limits)?;
            build_product(desc.clone(), &a, &b)
        }
        RingDescriptor::Subring { base, gens } => {
            let ambient = construct_ring_with_limits(base, limits)?;
            build_subring(desc.clone(), &ambient, gens)
        }
        RingDescriptor::Table {
            order,
            add,
            mul,
            zero,
            one,
            names,
        } => {
            let names = names.clone().unwrap_or_else(|| {
                (0..*order).map(|i| format!("e{i}")).collect::<Vec<_>>()
            });
            FiniteRing::from_tables(desc.clone(), add.clone(), mul.clone(), *zero, *one, names)
        }
    }
}

/// Order of the compiled ring, without building tables. Guards the cap before
/// any allocation happens.
fn descriptor_order(desc: &RingDescriptor, cap: usize) -> Result<usize, RingError> {
    // overflow means "way past any cap"; the caller compares against the cap
    let overflow = |o: Option<usize>| -> Result<usize, RingError> {
        o.ok_or(RingError::OrderLimitExceeded {
            order: usize::MAX,
            limit: cap,
        })
    };
    Ok(match desc {
        RingDescriptor::Modular { n } => {
            if *n == 0 {
                return Err(RingError::EmptyRing);
            }
            *n as usize
        }
        RingDescriptor::Quotient { base, poly, .. } => {
            let b = descriptor_order(base, cap)?;
            if poly.len() < 2 {
                return Err(RingError::NonMonicQuotient);
            }
            let d = poly.len() - 1;
            overflow(b.checked_pow(d as u32))?
        }
        RingDescriptor::UpperTriangular2x2 { base } => {
            let b = descriptor_order(base, cap)?;
            overflow(b.checked_pow(3))?
        }
        RingDescriptor::FullMatrix { base, k } => {
            let b = descriptor_order(base, cap)?;
            match k {
                1 => b,
                2 => overflow(b.checked_pow(4))?,
                other => return Err(RingError::MatrixSizeUnsupported(*other)),
            }
        }
        RingDescriptor::Product { first, second } => {
            let a = descriptor_order(first, cap)?;
            let b = descriptor_order(second, cap)?;
            overflow(a.checked_mul(b))?
        }
        // subrings can only shrink the ambient
        RingDescriptor::Subring { base, .. } => descriptor_order(base, cap)?,
        RingDescriptor::Table { order, .. } => *order as usize,
    })
}

fn table_of(r: &FiniteRing, additive: bool) -> Vec<u32> {
    let n = r.order();
    let mut t = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            let v = if additive {
                r.add(Elem(a as u32), Elem(b as u32))
            } else {
                r.mul(Elem(a as u32), Elem(b as u32))
            };
            t[a * n + b] = v.0;
        }
    }
    t
}

fn build_modular(n: u32) -> Result<RingRef, RingError> {
    if n == 0 {
        return Err(RingError::EmptyRing);
    }
    let n = n as usize;
    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for a in 0..n {
        for b in 0..n {
            add[a * n + b] = ((a + b) % n) as u32;
            mul[a * n + b] = ((a * b) % n) as u32;
        }
    }
    let names = (0..n).map(|i| i.to_string()).collect();
    FiniteRing::from_tables(
        RingDescriptor::Modular { n: n as u32 },
        add,
        mul,
        0,
        (1 % n) as u32,
        names,
    )
}

fn build_quotient(
    desc: RingDescriptor,
    base: &RingRef,
    poly: &[String],
    var: &str,
) -> Result<RingRef, RingError> {
    if !base.is_commutative() {
        return Err(RingError::QuotientBaseNotCommutative);
    }
    if poly.len() < 2 {
        return Err(RingError::NonMonicQuotient);
    }
    let coeffs: Vec<Elem> = poly
        .iter()
        .map(|s| expr::parse_elem(base, s).map_err(|e| RingError::Expr(e.to_string())))
        .collect::<Result<_, _>>()?;
    let d = coeffs.len() - 1;
    if coeffs[d] != base.one() {
        return Err(RingError::NonMonicQuotient);
    }
    let b = base.order();
    let n = b.pow(d as u32);

    // element <-> coefficient vector, little-endian mixed radix
    let decode = |mut i: usize| -> Vec<Elem> {
        let mut v = Vec::with_capacity(d);
        for _ in 0..d {
            v.push(Elem((i % b) as u32));
            i /= b;
        }
        v
    };
    let encode = |v: &[Elem]| -> usize {
        let mut i = 0usize;
        for k in (0..d).rev() {
            i = i * b + v[k].index();
        }
        i
    };

    // reduce a degree <= 2d-2 coefficient vector modulo the monic poly
    let reduce = |conv: &mut Vec<Elem>| {
        for k in (d..conv.len()).rev() {
            let c = conv[k];
            if base.is_zero(c) {
                continue;
            }
            conv[k] = base.zero();
            // t^k = t^(k-d) * t^d = -t^(k-d) * (f - t^d)
            for i in 0..d {
                let sub = base.mul(c, coeffs[i]);
                conv[k - d + i] = base.sub(conv[k - d + i], sub);
            }
        }
        conv.truncate(d);
    };

    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for i in 0..n {
        let vi = decode(i);
        for j in 0..n {
            let vj = decode(j);
            let sum: Vec<Elem> = (0..d).map(|k| base.add(vi[k], vj[k])).collect();
            add[i * n + j] = encode(&sum) as u32;
            let mut conv = vec![base.zero(); 2 * d - 1];
            for (ki, &a) in vi.iter().enumerate() {
                if base.is_zero(a) {
                    continue;
                }
                for (kj, &c) in vj.iter().enumerate() {
                    let p = base.mul(a, c);
                    conv[ki + kj] = base.add(conv[ki + kj], p);
                }
            }
            reduce(&mut conv);
            mul[i * n + j] = encode(&conv) as u32;
        }
    }

    let names = (0..n)
        .map(|i| quotient_name(base, &decode(i), var))
        .collect();
    let one_vec = {
        let mut v = vec![base.zero(); d];
        v[0] = base.one();
        encode(&v)
    };
    FiniteRing::from_tables(desc, add, mul, 0, one_vec as u32, names)
}

fn quotient_name(base: &FiniteRing, coeffs: &[Elem], var: &str) -> String {
    let mut parts = Vec::new();
    for (k, &c) in coeffs.iter().enumerate() {
        if base.is_zero(c) {
            continue;
        }
        let cname = base.name(c);
        let part = match k {
            0 => cname.to_string(),
            1 if c == base.one() => var.to_string(),
            1 => format!("{cname}*{var}"),
            _ if c == base.one() => format!("{var}^{k}"),
            _ => format!("{cname}*{var}^{k}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

enum MatrixShape {
    UpperTriangular,
    Full,
}

fn build_matrix(
    desc: RingDescriptor,
    base: &RingRef,
    shape: MatrixShape,
) -> Result<RingRef, RingError> {
    let b = base.order();
    match shape {
        MatrixShape::UpperTriangular => {
            // element = (a, b, c) for [[a,b],[0,c]]; index = (a*b + b)*b + c big-endian
            let n = b * b * b;
            let decode = |i: usize| -> (Elem, Elem, Elem) {
                let c = i % b;
                let bb = (i / b) % b;
                let a = i / (b * b);
                (Elem(a as u32), Elem(bb as u32), Elem(c as u32))
            };
            let encode =
                |a: Elem, x: Elem, c: Elem| (a.index() * b + x.index()) * b + c.index();
            let mut add = vec![0u32; n * n];
            let mut mul = vec![0u32; n * n];
            for i in 0..n {
                let (a1, b1, c1) = decode(i);
                for j in 0..n {
                    let (a2, b2, c2) = decode(j);
                    add[i * n + j] = encode(
                        base.add(a1, a2),
                        base.add(b1, b2),
                        base.add(c1, c2),
                    ) as u32;
                    // [[a1,b1],[0,c1]] * [[a2,b2],[0,c2]] = [[a1a2, a1b2 + b1c2],[0, c1c2]]
                    mul[i * n + j] = encode(
                        base.mul(a1, a2),
                        base.add(base.mul(a1, b2), base.mul(b1, c2)),
                        base.mul(c1, c2),
                    ) as u32;
                }
            }
            let names = (0..n)
                .map(|i| {
                    let (a, x, c) = decode(i);
                    format!(
                        "[[{},{}],[0,{}]]",
                        base.name(a),
                        base.name(x),
                        base.name(c)
                    )
                })
                .collect();
            let one = encode(base.one(), base.zero(), base.one());
            FiniteRing::from_tables(desc, add, mul, 0, one as u32, names)
        }
        MatrixShape::Full => {
            let n = b * b * b * b;
            let decode = |i: usize| -> [Elem; 4] {
                let d = i % b;
                let c = (i / b) % b;
                let bb = (i / (b * b)) % b;
                let a = i / (b * b * b);
                [Elem(a as u32), Elem(bb as u32), Elem(c as u32), Elem(d as u32)]
            };
            let encode = |m: [Elem; 4]| {
                ((m[0].index() * b + m[1].index()) * b + m[2].index()) * b + m[3].index()
            };
            let mut add = vec![0u32; n * n];
            let mut mul = vec![0u32; n * n];
            for i in 0..n {
                let x = decode(i);
                for j in 0..n {
                    let y = decode(j);
                    add[i * n + j] = encode([
                        base.add(x[0], y[0]),
                        base.add(x[1], y[1]),
                        base.add(x[2], y[2]),
                        base.add(x[3], y[3]),
                    ]) as u32;
                    mul[i * n + j] = encode([
                        base.add(base.mul(x[0], y[0]), base.mul(x[1], y[2])),
                        base.add(base.mul(x[0], y[1]), base.mul(x[1], y[3])),
                        base.add(base.mul(x[2], y[0]), base.mul(x[3], y[2])),
                        base.add(base.mul(x[2], y[1]), base.mul(x[3], y[3])),
                    ]) as u32;
                }
            }
            let names = (0..n)
                .map(|i| {
                    let m = decode(i);
                    format!(
                        "[[{},{}],[{},{}]]",
                        base.name(m[0]),
                        base.name(m[1]),
                        base.name(m[2]),
                        base.name(m[3])
                    )
                })
                .collect();
            let one = encode([base.one(), base.zero(), base.zero(), base.one()]);
            FiniteRing::from_tables(desc, add, mul, 0, one as u32, names)
        }
    }
}

fn build_product(desc: RingDescriptor, a: &RingRef, b: &RingRef) -> Result<RingRef, RingError> {
    let na = a.order();
    let nb = b.order();
    let n = na * nb;
    let encode = |x: Elem, y: Elem| x.index() * nb + y.index();
    let decode = |i: usize| (Elem((i / nb) as u32), Elem((i % nb) as u32));
    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for i in 0..n {
        let (x1, y1) = decode(i);
        for j in 0..n {
            let (x2, y2) = decode(j);
            add[i * n + j] = encode(a.add(x1, x2), b.add(y1, y2)) as u32;
            mul[i * n + j] = encode(a.mul(x1, x2), b.mul(y1, y2)) as u32;
        }
    }
    let names = (0..n)
        .map(|i| {
            let (x, y) = decode(i);
            format!("({},{})", a.name(x), b.name(y))
        })
        .collect();
    let one = encode(a.one(), b.one());
    FiniteRing::from_tables(desc, add, mul, 0, one as u32, names)
}

fn build_subring(
    desc: RingDescriptor,
    ambient: &RingRef,
    gens: &[String],
) -> Result<RingRef, RingError> {
    let mut gen_elems = vec![ambient.zero(), ambient.one()];
    for g in gens {
        let e = expr::parse_elem(ambient, g)
            .map_err(|_| RingError::BadSubringGenerator(g.clone()))?;
        gen_elems.push(e);
    }
    // close under addition, negation and multiplication
    let mut member = vec![false; ambient.order()];
    for &g in &gen_elems {
        member[g.index()] = true;
    }
    loop {
        let current: Vec<Elem> = (0..ambient.order())
            .filter(|&i| member[i])
            .map(|i| Elem(i as u32))
            .collect();
        let mut changed = false;
        for &x in &current {
            let nx = ambient.neg(x);
            if !member[nx.index()] {
                member[nx.index()] = true;
                changed = true;
            }
            for &y in &current {
                for z in [ambient.add(x, y), ambient.mul(x, y)] {
                    if !member[z.index()] {
                        member[z.index()] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let elems: Vec<Elem> = (0..ambient.order())
        .filter(|&i| member[i])
        .map(|i| Elem(i as u32))
        .collect();
    let n = elems.len();
    let local_of = |e: Elem| elems.binary_search(&e).expect("closure is closed");
    let mut add = vec![0u32; n * n];
    let mut mul = vec![0u32; n * n];
    for (i, &x) in elems.iter().enumerate() {
        for (j, &y) in elems.iter().enumerate() {
            add[i * n + j] = local_of(ambient.add(x, y)) as u32;
            mul[i * n + j] = local_of(ambient.mul(x, y)) as u32;
        }
    }
    let names = elems.iter().map(|&e| ambient.name(e).to_string()).collect();
    let zero = local_of(ambient.zero());
    let one = local_of(ambient.one());
    FiniteRing::from_tables(desc, add, mul, zero as u32, one as u32, names)
}

/// Rules for building sigma and delta maps from a ring's structure instead of
/// spelling out a full image vector. The loader expands the rule to an image
/// vector and validates it like any other map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum MapRule {
    /// The identity map (valid sigma for any ring).
    Identity,
    /// The zero map (valid delta for any sigma).
    Zero,
    /// Quotient rings: evaluate at 0, i.e. keep only the constant term.
    EvaluateAtZero,
    /// Quotient rings: substitute `var -> -var` (negates odd coefficients).
    Conjugate,
    /// Quotient rings: formal derivative, a delta rule for sigma = identity.
    FormalDerivative,
    /// Triangular 2x2 (or a subring of one): negate the corner entry.
    NegateCorner,
    /// Triangular 2x2 (or a subring of one): scale the corner entry by a
    /// fixed base-ring element.
    ScaleCorner { factor: String },
    /// Triangular 2x2 (or a subring of one): `[[a,b],[0,c]] -> [[0,k*b],[0,0]]`,
    /// a delta rule.
    CornerDerivation { factor: String },
    /// delta = id - sigma; a derivation for every endomorphism sigma.
    IdMinusSigma,
    /// Explicit image vector given as element expressions, one per element
    /// in index order.
    Image { image: Vec<String> },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quotient_z2_t2_matches_known_table() {
        let desc = RingDescriptor::quotient(RingDescriptor::modular(2), &["0", "0", "1"], "t");
        let r = construct_ring(&desc).unwrap();
        assert_eq!(r.order(), 4);
        assert_eq!(r.names(), &["0", "1", "t", "1+t"]);
        let t = crate::expr::parse_elem(&r, "t").unwrap();
        assert_eq!(r.mul(t, t), r.zero());
    }

    #[test]
    fn non_monic_quotient_rejected() {
        let desc = RingDescriptor::quotient(RingDescriptor::modular(4), &["0", "0", "2"], "t");
        assert!(matches!(
            construct_ring(&desc),
            Err(RingError::NonMonicQuotient)
        ));
    }

    #[test]
    fn upper_triangular_over_z5_has_order_125() {
        let desc = RingDescriptor::upper_triangular_2x2(RingDescriptor::modular(5));
        let r = construct_ring(&desc).unwrap();
        assert_eq!(r.order(), 125);
        assert_eq!(r.name(r.one()), "[[1,0],[0,1]]");
    }

    #[test]
    fn order_cap_enforced_before_building() {
        let desc = RingDescriptor::upper_triangular_2x2(RingDescriptor::modular(17));
        assert!(matches!(
            construct_ring(&desc),
            Err(RingError::OrderLimitExceeded { .. })
        ));
    }

    #[test]
    fn construction_is_deterministic() {
        let desc = RingDescriptor::subring(
            RingDescriptor::upper_triangular_2x2(RingDescriptor::modular(4)),
            &["[[0,1],[0,0]]"],
        );
        let r1 = construct_ring(&desc).unwrap();
        let r2 = construct_ring(&desc).unwrap();
        assert_eq!(r1.names(), r2.names());
        assert_eq!(r1.order(), 16);
        for a in r1.elems() {
            for b in r1.elems() {
                assert_eq!(r1.mul(a, b), r2.mul(a, b));
                assert_eq!(r1.add(a, b), r2.add(a, b));
            }
        }
    }

    #[test]
    fn descriptor_json_round_trip() {
        let desc = RingDescriptor::quotient(RingDescriptor::modular(3), &["1", "0", "1"], "u");
        let s = serde_json::to_string(&desc).unwrap();
        let back: RingDescriptor = serde_json::from_str(&s).unwrap();
        assert_eq!(desc, back);
    }

    #[test]
    fn product_ring_componentwise() {
        let desc = RingDescriptor::product(RingDescriptor::modular(2), RingDescriptor::modular(3));
        let r = construct_ring(&desc).unwrap();
        assert_eq!(r.order(), 6);
        assert_eq!(r.name(r.one()), "(1,1)");
    }
}
