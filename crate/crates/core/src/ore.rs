//! Exact arithmetic in `S = R[x; sigma, delta]` with left coefficients.
//!
//! Multiplication follows `x a = sigma(a) x + delta(a)`. Monomial products
//! expand through the `f_i^j` operators:
//! `(a x^i)(b x^j) = sum_k a f_k^i(b) x^(k+j)`.
//! A one-rewrite-at-a-time multiplier is kept alongside as an independent
//! route for cross-checks.

use std::sync::Arc;

use thiserror::Error;

use crate::maps::{FTable, OreContext};
use crate::ring::Elem;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OreError {
    #[error("polynomials belong to different contexts")]
    ContextMismatch,
    #[error("search needs {required} candidates, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
}

/// A skew polynomial, normalized: no trailing zero coefficients, position `k`
/// is the coefficient of `x^k`. The zero polynomial has an empty coefficient
/// vector and degree `None`.
#[derive(Clone)]
pub struct OrePoly {
    ctx: Arc<OreContext>,
    coeffs: Vec<u32>,
}

impl std::fmt::Debug for OrePoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.literal())
    }
}

impl PartialEq for OrePoly {
    fn eq(&self, other: &Self) -> bool {
        self.ctx.ctx_id() == other.ctx.ctx_id() && self.coeffs == other.coeffs
    }
}
impl Eq for OrePoly {}

impl OrePoly {
    pub fn new(ctx: &Arc<OreContext>, mut coeffs: Vec<u32>) -> Self {
        let zero = ctx.ring().zero().0;
        while coeffs.last() == Some(&zero) {
            coeffs.pop();
        }
        OrePoly {
            ctx: Arc::clone(ctx),
            coeffs,
        }
    }

    pub fn from_elems(ctx: &Arc<OreContext>, coeffs: &[Elem]) -> Self {
        Self::new(ctx, coeffs.iter().map(|e| e.0).collect())
    }

    pub fn zero(ctx: &Arc<OreContext>) -> Self {
        OrePoly {
            ctx: Arc::clone(ctx),
            coeffs: Vec::new(),
        }
    }

    pub fn one(ctx: &Arc<OreContext>) -> Self {
        Self::constant(ctx, ctx.ring().one())
    }

    pub fn constant(ctx: &Arc<OreContext>, c: Elem) -> Self {
        Self::new(ctx, vec![c.0])
    }

    /// `c * x^k`.
    pub fn monomial(ctx: &Arc<OreContext>, c: Elem, k: usize) -> Self {
        let mut coeffs = vec![ctx.ring().zero().0; k + 1];
        coeffs[k] = c.0;
        Self::new(ctx, coeffs)
    }

    pub fn ctx(&self) -> &Arc<OreContext> {
        &self.ctx
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: usize) -> Elem {
        self.coeffs
            .get(k)
            .map(|&c| Elem(c))
            .unwrap_or_else(|| self.ctx.ring().zero())
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn leading_coeff(&self) -> Option<Elem> {
        self.coeffs.last().map(|&c| Elem(c))
    }

    /// Coefficient-list literal, low-to-high: `[0,t]` is `t*x`.
    pub fn literal(&self) -> String {
        let ring = self.ctx.ring();
        if self.coeffs.is_empty() {
            return "[0]".to_string();
        }
        let parts: Vec<&str> = self
            .coeffs
            .iter()
            .map(|&c| ring.name(Elem(c)))
            .collect();
        format!("[{}]", parts.join(","))
    }

    fn check_ctx(&self, other: &OrePoly) -> Result<(), OreError> {
        if self.ctx.ctx_id() != other.ctx.ctx_id() {
            return Err(OreError::ContextMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &OrePoly) -> Result<OrePoly, OreError> {
        self.check_ctx(other)?;
        let ring = self.ctx.ring();
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            out.push(ring.add(self.coeff(k), other.coeff(k)).0);
        }
        Ok(OrePoly::new(&self.ctx, out))
    }

    pub fn neg(&self) -> OrePoly {
        let ring = self.ctx.ring();
        let out = self.coeffs.iter().map(|&c| ring.neg(Elem(c)).0).collect();
        OrePoly::new(&self.ctx, out)
    }

    pub fn sub(&self, other: &OrePoly) -> Result<OrePoly, OreError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &OrePoly) -> Result<OrePoly, OreError> {
        self.check_ctx(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(OrePoly::zero(&self.ctx));
        }
        let ft = self.ctx.f_table(self.coeffs.len() - 1);
        Ok(OrePoly::new(
            &self.ctx,
            mul_with_table(&self.ctx, &ft, &self.coeffs, &other.coeffs),
        ))
    }

    /// Left multiplication by a ring constant (coefficientwise).
    pub fn scale_left(&self, c: Elem) -> OrePoly {
        let ring = self.ctx.ring();
        let out = self
            .coeffs
            .iter()
            .map(|&k| ring.mul(c, Elem(k)).0)
            .collect();
        OrePoly::new(&self.ctx, out)
    }
}

/// Core multiplication on raw coefficient vectors. Hot loops fetch the
/// f-table once and call this directly.
pub(crate) fn mul_with_table(
    ctx: &OreContext,
    ft: &FTable,
    a: &[u32],
    b: &[u32],
) -> Vec<u32> {
    let ring = ctx.ring();
    let zero = ring.zero().0;
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == zero {
            continue;
        }
        let ai = Elem(ai);
        for (j, &bj) in b.iter().enumerate() {
            if bj == zero {
                continue;
            }
            for k in 0..=i {
                let f = ft.apply(k, i, Elem(bj));
                let term = ring.mul(ai, f);
                if term.0 != zero {
                    let pos = k + j;
                    out[pos] = ring.add(Elem(out[pos]), term).0;
                }
            }
        }
    }
    out
}

/// `x^n * r` via the f-operator expansion `sum_i f_i^n(r) x^i`.
pub fn monomial_shift(ctx: &Arc<OreContext>, n: usize, r: Elem) -> OrePoly {
    let ft = ctx.f_table(n);
    let coeffs: Vec<u32> = (0..=n).map(|i| ft.apply(i, n, r).0).collect();
    OrePoly::new(ctx, coeffs)
}

/// One rewrite step: `x * p`, using only `x a = sigma(a) x + delta(a)`.
///
/// Independent of the f-operator route; claim checks compare the two.
pub fn x_times_naive(p: &OrePoly) -> OrePoly {
    let ctx = p.ctx();
    let ring = ctx.ring();
    let zero = ring.zero().0;
    let mut out = vec![zero; p.coeffs().len() + 1];
    for (k, &c) in p.coeffs().iter().enumerate() {
        if c == zero {
            continue;
        }
        let c = Elem(c);
        let s = ctx.sigma().apply(c);
        let d = ctx.delta().apply(c);
        out[k + 1] = ring.add(Elem(out[k + 1]), s).0;
        out[k] = ring.add(Elem(out[k]), d).0;
    }
    OrePoly::new(ctx, out)
}

/// Naive product: expands `a_i x^i * q` by applying the single-step rewrite
/// `i` times, then left-scaling by `a_i`. Quadratic and slow; used as the
/// independent oracle for `mul`.
pub fn mul_naive(p: &OrePoly, q: &OrePoly) -> Result<OrePoly, OreError> {
    if p.ctx().ctx_id() != q.ctx().ctx_id() {
        return Err(OreError::ContextMismatch);
    }
    let ctx = p.ctx();
    let mut acc = OrePoly::zero(ctx);
    for (i, &ai) in p.coeffs().iter().enumerate() {
        if ai == ctx.ring().zero().0 {
            continue;
        }
        let mut shifted = q.clone();
        for _ in 0..i {
            shifted = x_times_naive(&shifted);
        }
        acc = acc.add(&shifted.scale_left(Elem(ai)))?;
    }
    Ok(acc)
}

/// Exhaustively enumerates coefficient vectors of degree <= `max_degree` and
/// returns every idempotent, in enumeration order (constant coefficient
/// varies fastest).
pub fn idempotent_search(
    ctx: &Arc<OreContext>,
    max_degree: usize,
    budget: u128,
) -> Result<Vec<OrePoly>, OreError> {
    let n = ctx.ring().order() as u128;
    let required = n
        .checked_pow(max_degree as u32 + 1)
        .unwrap_or(u128::MAX);
    if required > budget {
        return Err(OreError::BudgetExceeded { required, budget });
    }
    let ft = ctx.f_table(max_degree);
    let ring = ctx.ring();
    let zero = ring.zero().0;
    let mut out = Vec::new();
    let mut coeffs = vec![0u32; max_degree + 1];
    let total = required as u64;
    for counter in 0..total {
        let mut c = counter;
        for slot in coeffs.iter_mut() {
            *slot = (c % n as u64) as u32;
            c /= n as u64;
        }
        // strip trailing zeros without reallocating
        let mut len = coeffs.len();
        while len > 0 && coeffs[len - 1] == zero {
            len -= 1;
        }
        let cand = &coeffs[..len];
        let square = mul_with_table(ctx, &ft, cand, cand);
        let mut sq_len = square.len();
        while sq_len > 0 && square[sq_len - 1] == zero {
            sq_len -= 1;
        }
        if sq_len == len && square[..sq_len] == *cand {
            out.push(OrePoly::new(ctx, cand.to_vec()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::{construct_ring, MapRule, RingDescriptor};
    use crate::expr::{parse_elem, parse_poly_literal};
    use crate::maps::context_from_rules;
    use crate::ring::RingRef;

    fn ex_3_5_ctx() -> Arc<OreContext> {
        let r: RingRef = construct_ring(&RingDescriptor::quotient(
            RingDescriptor::modular(2),
            &["0", "0", "1"],
            "t",
        ))
        .unwrap();
        context_from_rules(&r, &MapRule::Identity, &MapRule::FormalDerivative, false).unwrap()
    }

    fn poly(ctx: &Arc<OreContext>, lit: &str) -> OrePoly {
        let coeffs = parse_poly_literal(ctx.ring(), lit).unwrap();
        OrePoly::from_elems(ctx, &coeffs)
    }

    #[test]
    fn monomial_shift_degree_one_is_the_rewrite_rule() {
        let ctx = ex_3_5_ctx();
        let ring = ctx.ring();
        for r in ring.elems() {
            let p = monomial_shift(&ctx, 1, r);
            assert_eq!(p.coeff(1), ctx.sigma().apply(r));
            assert_eq!(p.coeff(0), ctx.delta().apply(r));
            assert_eq!(monomial_shift(&ctx, 0, r), OrePoly::constant(&ctx, r));
        }
    }

    #[test]
    fn x_squared_times_t_in_characteristic_two() {
        let ctx = ex_3_5_ctx();
        let t = parse_elem(ctx.ring(), "t").unwrap();
        // x^2 t = t x^2 + 2x = t x^2
        assert_eq!(monomial_shift(&ctx, 2, t), poly(&ctx, "[0,0,t]"));
    }

    #[test]
    fn matrix_unit_products() {
        let ctx = ex_3_5_ctx();
        let e11 = poly(&ctx, "[0,t]");
        let e12 = poly(&ctx, "[t]");
        let e21 = poly(&ctx, "[0,1,t]");
        let e22 = poly(&ctx, "[1,t]");
        assert_eq!(e12.mul(&e21).unwrap(), e11);
        assert_eq!(e21.mul(&e12).unwrap(), e22);
        assert_eq!(e11.mul(&e11).unwrap(), e11);
        assert_eq!(e11.add(&e22).unwrap(), OrePoly::one(&ctx));
    }

    #[test]
    fn unit_laws_and_group_laws() {
        let ctx = ex_3_5_ctx();
        let p = poly(&ctx, "[t,1,t]");
        let one = OrePoly::one(&ctx);
        assert_eq!(p.mul(&one).unwrap(), p);
        assert_eq!(one.mul(&p).unwrap(), p);
        assert_eq!(p.add(&OrePoly::zero(&ctx)).unwrap(), p);
        assert!(p.add(&p.neg()).unwrap().is_zero());
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let ctx = ex_3_5_ctx();
        assert_eq!(OrePoly::zero(&ctx).degree(), None);
        assert_eq!(poly(&ctx, "[0]").degree(), None);
        assert_eq!(poly(&ctx, "[1,0]").degree(), Some(0));
    }

    #[test]
    fn context_mismatch_is_rejected() {
        let c1 = ex_3_5_ctx();
        let c2 = ex_3_5_ctx();
        let p = OrePoly::one(&c1);
        let q = OrePoly::one(&c2);
        assert!(matches!(p.mul(&q), Err(OreError::ContextMismatch)));
    }

    #[test]
    fn idempotent_search_finds_t_x() {
        let ctx = ex_3_5_ctx();
        let found = idempotent_search(&ctx, 1, 1 << 20).unwrap();
        let tx = poly(&ctx, "[0,t]");
        assert!(found.contains(&tx), "t*x is idempotent");
        assert!(found.iter().any(|p| p.degree().map_or(false, |d| d > 0)));
    }

    #[test]
    fn degree_zero_search_recovers_ring_idempotents() {
        let ctx = ex_3_5_ctx();
        let found = idempotent_search(&ctx, 0, 1 << 20).unwrap();
        let ring_idems: Vec<OrePoly> = ctx
            .ring()
            .idempotent_classes()
            .iter()
            .map(|c| OrePoly::constant(&ctx, c.element))
            .collect();
        assert_eq!(found, ring_idems);
    }

    #[test]
    fn rigid_context_has_only_constant_idempotents() {
        let r = construct_ring(&RingDescriptor::quotient(
            RingDescriptor::modular(3),
            &["1", "0", "1"],
            "u",
        ))
        .unwrap();
        let ctx = context_from_rules(&r, &MapRule::Conjugate, &MapRule::IdMinusSigma, true)
            .unwrap();
        let found = idempotent_search(&ctx, 2, 1 << 20).unwrap();
        let lits: Vec<String> = found.iter().map(|p| p.literal()).collect();
        assert_eq!(lits, vec!["[0]", "[1]"]);
    }

    #[test]
    fn budget_exceeded_reports_required_count() {
        let ctx = ex_3_5_ctx();
        let err = idempotent_search(&ctx, 10, 100).unwrap_err();
        match err {
            OreError::BudgetExceeded { required, budget } => {
                assert_eq!(required, 4u128.pow(11));
                assert_eq!(budget, 100);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn mul_agrees_with_naive_oracle_on_seeded_pairs() {
        use rand::Rng;
        use rand::SeedableRng;
        let ctx = ex_3_5_ctx();
        let n = ctx.ring().order() as u32;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let dp = rng.random_range(0..=3usize);
            let dq = rng.random_range(0..=3usize);
            let p = OrePoly::new(
                &ctx,
                (0..=dp).map(|_| rng.random_range(0..n)).collect(),
            );
            let q = OrePoly::new(
                &ctx,
                (0..=dq).map(|_| rng.random_range(0..n)).collect(),
            );
            assert_eq!(p.mul(&q).unwrap(), mul_naive(&p, &q).unwrap());
        }
    }

    #[test]
    fn monomial_shift_matches_repeated_x_multiplication() {
        let ctx = ex_3_5_ctx();
        for r in ctx.ring().elems() {
            let mut acc = OrePoly::constant(&ctx, r);
            for n in 0..=6usize {
                assert_eq!(monomial_shift(&ctx, n, r), acc, "n = {n}");
                acc = x_times_naive(&acc);
            }
        }
    }
}
