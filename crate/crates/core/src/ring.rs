//! Canonical table form of a finite ring and exact element arithmetic.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, OnceLock};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::descriptor::RingDescriptor;

/// Shared handle to an immutable ring.
pub type RingRef = Arc<FiniteRing>;

/// Index of an element in its ring's tables.
///
/// Elements are plain indices; the structured types (subsets, morphisms,
/// polynomials) carry the ring they belong to and refuse to mix rings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Elem(pub u32);

impl Elem {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Exhaustive axiom scans are O(n^3); above this order a seeded random scan
/// of `SAMPLED_TRIPLES` triples is used instead.
pub const EXHAUSTIVE_AXIOM_LIMIT: usize = 512;
const SAMPLED_TRIPLES: usize = 1_000_000;
const AXIOM_SCAN_SEED: u64 = 0x0f2e_11ab_5eed_0001;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("ring order {order} exceeds the configured limit {limit}")]
    OrderLimitExceeded { order: usize, limit: usize },
    #[error("ring order must be positive")]
    EmptyRing,
    #[error("table has wrong shape: expected {expected} entries, got {got}")]
    BadTableShape { expected: usize, got: usize },
    #[error("table entry out of range at ({a},{b})")]
    EntryOutOfRange { a: usize, b: usize },
    #[error("{law} fails at witness ({a},{b},{c})")]
    AxiomViolation {
        law: &'static str,
        a: usize,
        b: usize,
        c: usize,
    },
    #[error("quotient polynomial must be monic of degree >= 1")]
    NonMonicQuotient,
    #[error("quotient base ring must be commutative")]
    QuotientBaseNotCommutative,
    #[error("full matrix rings are supported only for k <= 2, got {0}")]
    MatrixSizeUnsupported(u32),
    #[error("subring generator {0} is not an element of the ambient ring")]
    BadSubringGenerator(String),
    #[error("element expression error: {0}")]
    Expr(String),
}

/// A finite associative ring with unity, in canonical table form.
///
/// Tables are flat row-major `n*n` vectors of element indices. Construction
/// always verifies the ring axioms: exhaustively for order <= 512, by a
/// fixed-seed random scan of one million triples above that.
pub struct FiniteRing {
    id: u64,
    order: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    zero: Elem,
    one: Elem,
    names: Vec<String>,
    descriptor: RingDescriptor,
    idempotents: OnceLock<Vec<IdempotentClass>>,
}

static NEXT_RING_ID: AtomicU64 = AtomicU64::new(1);

impl std::fmt::Debug for FiniteRing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FiniteRing")
            .field("order", &self.order)
            .field("descriptor", &self.descriptor)
            .finish()
    }
}

impl FiniteRing {
    /// Builds a ring from raw tables and verifies every axiom.
    pub fn from_tables(
        descriptor: RingDescriptor,
        add: Vec<u32>,
        mul: Vec<u32>,
        zero: u32,
        one: u32,
        names: Vec<String>,
    ) -> Result<RingRef, RingError> {
        let n = names.len();
        if n == 0 {
            return Err(RingError::EmptyRing);
        }
        if add.len() != n * n {
            return Err(RingError::BadTableShape {
                expected: n * n,
                got: add.len(),
            });
        }
        if mul.len() != n * n {
            return Err(RingError::BadTableShape {
                expected: n * n,
                got: mul.len(),
            });
        }
        for (pos, &v) in add.iter().chain(mul.iter()).enumerate() {
            if v as usize >= n {
                return Err(RingError::EntryOutOfRange {
                    a: (pos % (n * n)) / n,
                    b: pos % n,
                });
            }
        }
        if zero as usize >= n || one as usize >= n {
            return Err(RingError::EntryOutOfRange { a: 0, b: 0 });
        }

        let mut ring = FiniteRing {
            id: NEXT_RING_ID.fetch_add(1, Ordering::Relaxed),
            order: n as u32,
            add,
            mul,
            neg: vec![0; n],
            zero: Elem(zero),
            one: Elem(one),
            names,
            descriptor,
            idempotents: OnceLock::new(),
        };
        ring.verify_axioms()?;
        // additive inverses exist once the group axioms hold
        for a in 0..n {
            let mut found = false;
            for b in 0..n {
                if ring.add[a * n + b] == zero {
                    ring.neg[a] = b as u32;
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(RingError::AxiomViolation {
                    law: "additive inverse",
                    a,
                    b: 0,
                    c: 0,
                });
            }
        }
        Ok(Arc::new(ring))
    }

    fn verify_axioms(&self) -> Result<(), RingError> {
        let n = self.order as usize;
        let zero = self.zero.0 as usize;
        let one = self.one.0 as usize;
        // identity laws are always exhaustive (O(n))
        for a in 0..n {
            if self.add[a * n + zero] as usize != a || self.add[zero * n + a] as usize != a {
                return Err(RingError::AxiomViolation {
                    law: "additive identity",
                    a,
                    b: zero,
                    c: 0,
                });
            }
            if self.mul[a * n + one] as usize != a || self.mul[one * n + a] as usize != a {
                return Err(RingError::AxiomViolation {
                    law: "multiplicative identity",
                    a,
                    b: one,
                    c: 0,
                });
            }
        }
        // commutativity of addition: O(n^2), always exhaustive
        for a in 0..n {
            for b in 0..n {
                if self.add[a * n + b] != self.add[b * n + a] {
                    return Err(RingError::AxiomViolation {
                        law: "additive commutativity",
                        a,
                        b,
                        c: 0,
                    });
                }
            }
        }
        let check_triple = |a: usize, b: usize, c: usize| -> Result<(), RingError> {
            let add = |x: usize, y: usize| self.add[x * n + y] as usize;
            let mul = |x: usize, y: usize| self.mul[x * n + y] as usize;
            if add(add(a, b), c) != add(a, add(b, c)) {
                return Err(RingError::AxiomViolation {
                    law: "additive associativity",
                    a,
                    b,
                    c,
                });
            }
            if mul(mul(a, b), c) != mul(a, mul(b, c)) {
                return Err(RingError::AxiomViolation {
                    law: "multiplicative associativity",
                    a,
                    b,
                    c,
                });
            }
            if mul(a, add(b, c)) != add(mul(a, b), mul(a, c)) {
                return Err(RingError::AxiomViolation {
                    law: "left distributivity",
                    a,
                    b,
                    c,
                });
            }
            if mul(add(a, b), c) != add(mul(a, c), mul(b, c)) {
                return Err(RingError::AxiomViolation {
                    law: "right distributivity",
                    a,
                    b,
                    c,
                });
            }
            Ok(())
        };
        if n <= EXHAUSTIVE_AXIOM_LIMIT {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        check_triple(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(AXIOM_SCAN_SEED);
            for _ in 0..SAMPLED_TRIPLES {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                let c = rng.random_range(0..n);
                check_triple(a, b, c)?;
            }
        }
        Ok(())
    }

    /// Stable identity of this ring instance; used to reject cross-ring mixing.
    pub fn ring_id(&self) -> u64 {
        self.id
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn zero(&self) -> Elem {
        self.zero
    }

    pub fn one(&self) -> Elem {
        self.one
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.descriptor
    }

    pub fn elem(&self, index: usize) -> Elem {
        assert!(index < self.order as usize, "element index out of range");
        Elem(index as u32)
    }

    pub fn elems(&self) -> impl Iterator<Item = Elem> {
        (0..self.order).map(Elem)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.add[a.index() * self.order as usize + b.index()])
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.mul[a.index() * self.order as usize + b.index()])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg[a.index()])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn is_zero(&self, a: Elem) -> bool {
        a == self.zero
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// `k * 1` for an integer `k` (negative allowed).
    pub fn int_elem(&self, k: i64) -> Elem {
        // additive order of 1 bounds the loop
        let mut ord = 1u64;
        let mut acc = self.one;
        while acc != self.zero {
            acc = self.add(acc, self.one);
            ord += 1;
        }
        let r = k.rem_euclid(ord as i64) as u64;
        let mut out = self.zero;
        for _ in 0..r {
            out = self.add(out, self.one);
        }
        out
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.order as usize;
        for a in 0..n {
            for b in 0..n {
                if self.mul[a * n + b] != self.mul[b * n + a] {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_idempotent(&self, e: Elem) -> bool {
        self.mul(e, e) == e
    }

    /// All idempotents with their semicentrality classification, in index order.
    pub fn idempotent_classes(&self) -> &[IdempotentClass] {
        self.idempotents.get_or_init(|| {
            let mut out = Vec::new();
            for e in self.elems() {
                if !self.is_idempotent(e) {
                    continue;
                }
                let mut left = true;
                let mut right = true;
                let mut central = true;
                for x in self.elems() {
                    let xe = self.mul(x, e);
                    let ex = self.mul(e, x);
                    let exe = self.mul(ex, e);
                    if exe != xe {
                        left = false;
                    }
                    if exe != ex {
                        right = false;
                    }
                    if ex != xe {
                        central = false;
                    }
                }
                out.push(IdempotentClass {
                    element: e,
                    is_central: central,
                    is_left_semicentral: left,
                    is_right_semicentral: right,
                });
            }
            out
        })
    }

    /// Idempotents that are left semicentral (`exe = xe` for all `x`).
    pub fn left_semicentral_idempotents(&self) -> Vec<Elem> {
        self.idempotent_classes()
            .iter()
            .filter(|c| c.is_left_semicentral)
            .map(|c| c.element)
            .collect()
    }

    /// Central idempotents.
    pub fn central_idempotents(&self) -> Vec<Elem> {
        self.idempotent_classes()
            .iter()
            .filter(|c| c.is_central)
            .map(|c| c.element)
            .collect()
    }
}

/// An idempotent together with its semicentrality flags.
///
/// `is_central` holds exactly when both one-sided flags do.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdempotentClass {
    pub element: Elem,
    pub is_central: bool,
    pub is_left_semicentral: bool,
    pub is_right_semicentral: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::{construct_ring, RingDescriptor};

    #[test]
    fn modular_four_has_two_times_two_zero() {
        let r = construct_ring(&RingDescriptor::modular(4)).unwrap();
        let two = r.int_elem(2);
        assert_eq!(r.mul(two, two), r.zero());
    }

    #[test]
    fn raw_table_axiom_violation_is_witnessed() {
        // order-2 "ring" with a broken multiplication table
        let desc = RingDescriptor::Table {
            order: 2,
            add: vec![0, 1, 1, 0],
            mul: vec![0, 0, 0, 0], // 1*1 = 0 breaks the unit law
            zero: 0,
            one: 1,
            names: None,
        };
        let err = construct_ring(&desc).unwrap_err();
        match err {
            RingError::AxiomViolation { law, .. } => {
                assert_eq!(law, "multiplicative identity")
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn idempotents_of_modular_six() {
        let r = construct_ring(&RingDescriptor::modular(6)).unwrap();
        let idx: Vec<usize> = r
            .idempotent_classes()
            .iter()
            .map(|c| c.element.index())
            .collect();
        assert_eq!(idx, vec![0, 1, 3, 4]);
        assert!(r.idempotent_classes().iter().all(|c| c.is_central));
    }

    #[test]
    fn central_iff_left_and_right_semicentral() {
        for desc in [
            RingDescriptor::modular(6),
            RingDescriptor::upper_triangular_2x2(RingDescriptor::modular(3)),
        ] {
            let r = construct_ring(&desc).unwrap();
            for c in r.idempotent_classes() {
                assert_eq!(
                    c.is_central,
                    c.is_left_semicentral && c.is_right_semicentral
                );
                assert!(r.is_idempotent(c.element));
            }
        }
    }
}
