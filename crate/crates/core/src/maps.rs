//! Validated endomorphisms, sigma-derivations, and the word operators
//! `f_i^j` used to expand `x^n r` in an Ore extension.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::descriptor::{construct_ring, MapRule, RingDescriptor};
use crate::expr;
use crate::ring::{Elem, RingRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MapError {
    #[error("image vector has length {got}, ring has order {expected}")]
    BadLength { expected: usize, got: usize },
    #[error("additivity fails at ({a},{b}): image(a+b) != image(a)+image(b)")]
    AdditivityViolation { a: usize, b: usize },
    #[error("multiplicativity fails at ({a},{b}): image(ab) != image(a)image(b)")]
    MultiplicativityViolation { a: usize, b: usize },
    #[error("image of 1 is not 1")]
    NotUnital,
    #[error("map is not a bijection (automorphism required)")]
    NotBijective,
    #[error("Leibniz rule fails at ({a},{b}): d(ab) != sigma(a)d(b) + d(a)b")]
    LeibnizViolation { a: usize, b: usize },
    #[error("sigma and delta belong to different maps or rings")]
    ContextMismatch,
    #[error("rule {0} does not apply to this ring")]
    RuleNotApplicable(String),
    #[error("rule expansion failed: {0}")]
    RuleExpansion(String),
    #[error("f-operator index out of range: need 0 <= i <= j")]
    IndexOutOfRange,
}

/// A verified ring endomorphism stored as a full image vector.
#[derive(Debug, Clone)]
pub struct RingMorphism {
    ring: RingRef,
    image: Vec<u32>,
    is_automorphism: bool,
    inverse: Option<Vec<u32>>,
}

impl RingMorphism {
    pub fn identity(ring: &RingRef) -> Arc<RingMorphism> {
        let image: Vec<u32> = (0..ring.order() as u32).collect();
        Arc::new(RingMorphism {
            ring: Arc::clone(ring),
            image: image.clone(),
            is_automorphism: true,
            inverse: Some(image),
        })
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        Elem(self.image[a.index()])
    }

    /// `sigma^n(a)`; `n` may be negative for automorphisms.
    pub fn apply_pow(&self, n: i64, a: Elem) -> Result<Elem, MapError> {
        let mut out = a;
        if n >= 0 {
            for _ in 0..n {
                out = self.apply(out);
            }
        } else {
            let inv = self.inverse.as_ref().ok_or(MapError::NotBijective)?;
            for _ in 0..(-n) {
                out = Elem(inv[out.index()]);
            }
        }
        Ok(out)
    }

    pub fn is_automorphism(&self) -> bool {
        self.is_automorphism
    }

    pub fn image_vec(&self) -> &[u32] {
        &self.image
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }
}

/// Validates an image vector as a unital ring endomorphism. Additivity,
/// multiplicativity and unitality are checked over all pairs; the inverse is
/// computed whenever the map is a bijection.
pub fn validate_morphism(
    ring: &RingRef,
    image: Vec<u32>,
    require_automorphism: bool,
) -> Result<RingMorphism, MapError> {
    let n = ring.order();
    if image.len() != n {
        return Err(MapError::BadLength {
            expected: n,
            got: image.len(),
        });
    }
    for a in 0..n {
        for b in 0..n {
            let ea = Elem(a as u32);
            let eb = Elem(b as u32);
            let img = |e: Elem| Elem(image[e.index()]);
            if img(ring.add(ea, eb)) != ring.add(img(ea), img(eb)) {
                return Err(MapError::AdditivityViolation { a, b });
            }
            if img(ring.mul(ea, eb)) != ring.mul(img(ea), img(eb)) {
                return Err(MapError::MultiplicativityViolation { a, b });
            }
        }
    }
    if image[ring.one().index()] != ring.one().0 {
        return Err(MapError::NotUnital);
    }
    let mut seen = vec![false; n];
    let mut bijective = true;
    for &v in &image {
        if seen[v as usize] {
            bijective = false;
            break;
        }
        seen[v as usize] = true;
    }
    if require_automorphism && !bijective {
        return Err(MapError::NotBijective);
    }
    let inverse = bijective.then(|| {
        let mut inv = vec![0u32; n];
        for (a, &v) in image.iter().enumerate() {
            inv[v as usize] = a as u32;
        }
        inv
    });
    Ok(RingMorphism {
        ring: Arc::clone(ring),
        image,
        is_automorphism: bijective,
        inverse,
    })
}

/// A verified sigma-derivation: additive, with
/// `d(ab) = sigma(a) d(b) + d(a) b` for all `a, b`.
#[derive(Debug, Clone)]
pub struct SigmaDerivation {
    ring: RingRef,
    sigma: Arc<RingMorphism>,
    image: Vec<u32>,
}

impl SigmaDerivation {
    pub fn zero(ring: &RingRef, sigma: &Arc<RingMorphism>) -> Arc<SigmaDerivation> {
        Arc::new(SigmaDerivation {
            ring: Arc::clone(ring),
            sigma: Arc::clone(sigma),
            image: vec![ring.zero().0; ring.order()],
        })
    }

    #[inline]
    pub fn apply(&self, a: Elem) -> Elem {
        Elem(self.image[a.index()])
    }

    pub fn sigma(&self) -> &Arc<RingMorphism> {
        &self.sigma
    }

    pub fn is_zero_map(&self) -> bool {
        self.image.iter().all(|&v| v == self.ring.zero().0)
    }

    pub fn image_vec(&self) -> &[u32] {
        &self.image
    }
}

/// Validates an image vector as a sigma-derivation for the given sigma.
pub fn validate_derivation(
    ring: &RingRef,
    sigma: &Arc<RingMorphism>,
    image: Vec<u32>,
) -> Result<SigmaDerivation, MapError> {
    if sigma.ring().ring_id() != ring.ring_id() {
        return Err(MapError::ContextMismatch);
    }
    let n = ring.order();
    if image.len() != n {
        return Err(MapError::BadLength {
            expected: n,
            got: image.len(),
        });
    }
    let d = |e: Elem| Elem(image[e.index()]);
    for a in 0..n {
        for b in 0..n {
            let ea = Elem(a as u32);
            let eb = Elem(b as u32);
            if d(ring.add(ea, eb)) != ring.add(d(ea), d(eb)) {
                return Err(MapError::AdditivityViolation { a, b });
            }
            let lhs = d(ring.mul(ea, eb));
            let rhs = ring.add(ring.mul(sigma.apply(ea), d(eb)), ring.mul(d(ea), eb));
            if lhs != rhs {
                return Err(MapError::LeibnizViolation { a, b });
            }
        }
    }
    debug_assert_eq!(image[ring.one().index()], ring.zero().0, "d(1) = 0 follows");
    Ok(SigmaDerivation {
        ring: Arc::clone(ring),
        sigma: Arc::clone(sigma),
        image,
    })
}

/// Triangle of `f_i^j` image vectors for `0 <= i <= j <= jmax`.
///
/// `f_i^j` is the sum of all words in sigma and delta with `i` sigmas and
/// `j - i` deltas; it satisfies `f_i^j = sigma . f_{i-1}^{j-1} + delta . f_i^{j-1}`
/// and appears in the expansion `x^n r = sum_i f_i^n(r) x^i`.
pub struct FTable {
    rows: Vec<Vec<Vec<u32>>>,
}

impl FTable {
    pub fn jmax(&self) -> usize {
        self.rows.len() - 1
    }

    #[inline]
    pub fn apply(&self, i: usize, j: usize, a: Elem) -> Elem {
        Elem(self.rows[j][i][a.index()])
    }

    pub fn image(&self, i: usize, j: usize) -> &[u32] {
        &self.rows[j][i]
    }
}

static NEXT_CTX_ID: AtomicU64 = AtomicU64::new(1);

/// An Ore extension context `R[x; sigma, delta]`: the ring together with a
/// validated sigma and delta. The `f_i^j` triangle is cached and grows on
/// demand; contexts are safe to share across threads.
pub struct OreContext {
    id: u64,
    ring: RingRef,
    sigma: Arc<RingMorphism>,
    delta: Arc<SigmaDerivation>,
    f_cache: Mutex<Arc<FTable>>,
}

impl std::fmt::Debug for OreContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OreContext")
            .field("ring", &self.ring)
            .field("sigma_identity", &self.sigma.is_identity())
            .field("delta_zero", &self.delta.is_zero_map())
            .finish()
    }
}

impl OreContext {
    pub fn new(
        ring: &RingRef,
        sigma: Arc<RingMorphism>,
        delta: Arc<SigmaDerivation>,
    ) -> Result<Arc<OreContext>, MapError> {
        if sigma.ring().ring_id() != ring.ring_id() {
            return Err(MapError::ContextMismatch);
        }
        if delta.sigma.image_vec() != sigma.image_vec() {
            return Err(MapError::ContextMismatch);
        }
        let identity_row = vec![(0..ring.order() as u32).collect::<Vec<u32>>()];
        let ctx = OreContext {
            id: NEXT_CTX_ID.fetch_add(1, Ordering::Relaxed),
            ring: Arc::clone(ring),
            sigma,
            delta,
            f_cache: Mutex::new(Arc::new(FTable {
                rows: vec![identity_row],
            })),
        };
        Ok(Arc::new(ctx))
    }

    pub fn ctx_id(&self) -> u64 {
        self.id
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn sigma(&self) -> &Arc<RingMorphism> {
        &self.sigma
    }

    pub fn delta(&self) -> &Arc<SigmaDerivation> {
        &self.delta
    }

    /// Returns the `f_i^j` triangle extended to at least `jmax`.
    ///
    /// Rows up to 4 are cross-checked against the explicit word-sum expansion
    /// the first time they are built.
    pub fn f_table(&self, jmax: usize) -> Arc<FTable> {
        let mut guard = self.f_cache.lock().expect("f-table lock");
        if guard.jmax() >= jmax {
            return Arc::clone(&guard);
        }
        let n = self.ring.order();
        let mut rows = guard.rows.clone();
        for j in rows.len()..=jmax {
            let mut row = Vec::with_capacity(j + 1);
            for i in 0..=j {
                let mut img = vec![self.ring.zero().0; n];
                for a in 0..n {
                    // sigma . f_{i-1}^{j-1}
                    let mut acc = if i >= 1 {
                        self.sigma.apply(Elem(rows[j - 1][i - 1][a]))
                    } else {
                        self.ring.zero()
                    };
                    // + delta . f_i^{j-1}
                    if i <= j - 1 {
                        let d = self.delta.apply(Elem(rows[j - 1][i][a]));
                        acc = self.ring.add(acc, d);
                    }
                    img[a] = acc.0;
                }
                if j <= 4 {
                    let oracle = word_sum_operator(self, i, j).expect("indices in range");
                    assert_eq!(
                        img, oracle,
                        "f_{i}^{j} recursion disagrees with the word-sum expansion"
                    );
                }
                row.push(img);
            }
            rows.push(row);
        }
        *guard = Arc::new(FTable { rows });
        Arc::clone(&guard)
    }

    /// `f_i^j(a)` for one element.
    pub fn f_apply(&self, i: usize, j: usize, a: Elem) -> Result<Elem, MapError> {
        if i > j {
            return Err(MapError::IndexOutOfRange);
        }
        Ok(self.f_table(j).apply(i, j, a))
    }
}

/// Explicit word-sum form of `f_i^j`: the sum over all words with `i` sigmas
/// and `j - i` deltas, leftmost letter applied last. Exponential in `j`; kept
/// as an independent oracle for the recursion.
pub fn word_sum_operator(ctx: &OreContext, i: usize, j: usize) -> Result<Vec<u32>, MapError> {
    if i > j {
        return Err(MapError::IndexOutOfRange);
    }
    let ring = ctx.ring();
    let n = ring.order();
    let mut out = vec![ring.zero().0; n];
    // words as bitmasks: bit k set = letter k (from the left) is sigma
    for mask in 0u32..(1 << j) {
        if mask.count_ones() as usize != i {
            continue;
        }
        for a in 0..n {
            let mut v = Elem(a as u32);
            // apply right-to-left so bit 0 is the outermost letter
            for k in (0..j).rev() {
                v = if mask & (1 << k) != 0 {
                    ctx.sigma().apply(v)
                } else {
                    ctx.delta().apply(v)
                };
            }
            out[a] = ring.add(Elem(out[a]), v).0;
        }
    }
    Ok(out)
}

/// Expands a map rule to an image vector for the given ring.
pub fn resolve_rule(
    ring: &RingRef,
    rule: &MapRule,
    sigma: Option<&Arc<RingMorphism>>,
) -> Result<Vec<u32>, MapError> {
    let n = ring.order();
    match rule {
        MapRule::Identity => Ok((0..n as u32).collect()),
        MapRule::Zero => Ok(vec![ring.zero().0; n]),
        MapRule::IdMinusSigma => {
            let s = sigma.ok_or_else(|| {
                MapError::RuleExpansion("id_minus_sigma needs a sigma".to_string())
            })?;
            Ok(ring
                .elems()
                .map(|a| ring.sub(a, s.apply(a)).0)
                .collect())
        }
        MapRule::Image { image } => image
            .iter()
            .map(|s| {
                expr::parse_elem(ring, s)
                    .map(|e| e.0)
                    .map_err(|e| MapError::RuleExpansion(e.to_string()))
            })
            .collect(),
        MapRule::EvaluateAtZero | MapRule::Conjugate | MapRule::FormalDerivative => {
            quotient_rule(ring, rule)
        }
        MapRule::NegateCorner | MapRule::ScaleCorner { .. } | MapRule::CornerDerivation { .. } => {
            matrix_rule(ring, rule)
        }
    }
}

fn quotient_rule(ring: &RingRef, rule: &MapRule) -> Result<Vec<u32>, MapError> {
    let (base_desc, d) = match ring.descriptor() {
        RingDescriptor::Quotient { base, poly, .. } => (base.as_ref().clone(), poly.len() - 1),
        _ => return Err(MapError::RuleNotApplicable(format!("{rule:?}"))),
    };
    let base = construct_ring(&base_desc).map_err(|e| MapError::RuleExpansion(e.to_string()))?;
    let b = base.order();
    let decode = |mut i: usize| -> Vec<Elem> {
        let mut v = Vec::with_capacity(d);
        for _ in 0..d {
            v.push(Elem((i % b) as u32));
            i /= b;
        }
        v
    };
    let encode = |v: &[Elem]| -> u32 {
        let mut i = 0usize;
        for k in (0..d).rev() {
            i = i * b + v[k].index();
        }
        i as u32
    };
    Ok((0..ring.order())
        .map(|i| {
            let c = decode(i);
            let mut out = vec![base.zero(); d];
            match rule {
                MapRule::EvaluateAtZero => out[0] = c[0],
                MapRule::Conjugate => {
                    for (k, item) in out.iter_mut().enumerate() {
                        *item = if k % 2 == 0 { c[k] } else { base.neg(c[k]) };
                    }
                }
                MapRule::FormalDerivative => {
                    for k in 1..d {
                        // k * c_k t^(k-1)
                        let mut term = base.zero();
                        for _ in 0..k {
                            term = base.add(term, c[k]);
                        }
                        out[k - 1] = term;
                    }
                }
                _ => unreachable!(),
            }
            encode(&out)
        })
        .collect())
}

fn matrix_rule(ring: &RingRef, rule: &MapRule) -> Result<Vec<u32>, MapError> {
    match ring.descriptor().clone() {
        RingDescriptor::UpperTriangular2x2 { base } => {
            let b = construct_ring(&base).map_err(|e| MapError::RuleExpansion(e.to_string()))?;
            let bn = b.order();
            let factor = match rule {
                MapRule::ScaleCorner { factor } | MapRule::CornerDerivation { factor } => Some(
                    expr::parse_elem(&b, factor)
                        .map_err(|e| MapError::RuleExpansion(e.to_string()))?,
                ),
                _ => None,
            };
            Ok((0..ring.order())
                .map(|i| {
                    let c = i % bn;
                    let x = (i / bn) % bn;
                    let a = i / (bn * bn);
                    let (na, nx, nc) = match rule {
                        MapRule::NegateCorner => (a, b.neg(Elem(x as u32)).index(), c),
                        MapRule::ScaleCorner { .. } => (
                            a,
                            b.mul(factor.unwrap(), Elem(x as u32)).index(),
                            c,
                        ),
                        MapRule::CornerDerivation { .. } => (
                            b.zero().index(),
                            b.mul(factor.unwrap(), Elem(x as u32)).index(),
                            b.zero().index(),
                        ),
                        _ => unreachable!(),
                    };
                    (((na * bn) + nx) * bn + nc) as u32
                })
                .collect())
        }
        RingDescriptor::Subring { base, .. } => {
            // expand in the ambient ring and restrict
            let ambient =
                construct_ring(&base).map_err(|e| MapError::RuleExpansion(e.to_string()))?;
            let amb_image = matrix_rule(&ambient, rule)?;
            let local_names = ring.names();
            let mut out = Vec::with_capacity(ring.order());
            for name in local_names {
                let amb_idx = ambient
                    .names()
                    .iter()
                    .position(|n| n == name)
                    .ok_or_else(|| {
                        MapError::RuleExpansion("subring element missing in ambient".to_string())
                    })?;
                let target = amb_image[amb_idx] as usize;
                let target_name = ambient.name(Elem(target as u32));
                let local = local_names
                    .iter()
                    .position(|n| n == target_name)
                    .ok_or_else(|| {
                        MapError::RuleExpansion(format!(
                            "rule image {target_name} leaves the subring"
                        ))
                    })?;
                out.push(local as u32);
            }
            Ok(out)
        }
        _ => Err(MapError::RuleNotApplicable(format!("{rule:?}"))),
    }
}

/// Builds a validated context from rules.
pub fn context_from_rules(
    ring: &RingRef,
    sigma_rule: &MapRule,
    delta_rule: &MapRule,
    require_automorphism: bool,
) -> Result<Arc<OreContext>, MapError> {
    let sigma_img = resolve_rule(ring, sigma_rule, None)?;
    let sigma = Arc::new(validate_morphism(ring, sigma_img, require_automorphism)?);
    let delta_img = resolve_rule(ring, delta_rule, Some(&sigma))?;
    let delta = Arc::new(validate_derivation(ring, &sigma, delta_img)?);
    OreContext::new(ring, sigma, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::{construct_ring, RingDescriptor};
    use crate::expr::parse_elem;

    fn z2_t3() -> RingRef {
        construct_ring(&RingDescriptor::quotient(
            RingDescriptor::modular(2),
            &["0", "0", "0", "1"],
            "t",
        ))
        .unwrap()
    }

    #[test]
    fn identity_is_an_automorphism() {
        let r = construct_ring(&RingDescriptor::modular(6)).unwrap();
        let m = validate_morphism(&r, (0..6).collect(), true).unwrap();
        assert!(m.is_automorphism());
    }

    #[test]
    fn evaluate_at_zero_is_endomorphism_not_automorphism() {
        let r = z2_t3();
        let img = resolve_rule(&r, &MapRule::EvaluateAtZero, None).unwrap();
        let m = validate_morphism(&r, img.clone(), false).unwrap();
        assert!(!m.is_automorphism());
        assert!(matches!(
            validate_morphism(&r, img, true),
            Err(MapError::NotBijective)
        ));
        // sigma(1+t) = 1
        let e = parse_elem(&r, "1+t").unwrap();
        assert_eq!(m.apply(e), r.one());
    }

    #[test]
    fn scale_corner_on_z9_subring_is_automorphism() {
        let desc = RingDescriptor::subring(
            RingDescriptor::upper_triangular_2x2(RingDescriptor::modular(9)),
            &["[[0,1],[0,0]]"],
        );
        let r = construct_ring(&desc).unwrap();
        assert_eq!(r.order(), 81);
        let img = resolve_rule(&r, &MapRule::ScaleCorner { factor: "5".into() }, None).unwrap();
        let m = validate_morphism(&r, img, true).unwrap();
        assert!(m.is_automorphism());
        let e = parse_elem(&r, "[[1,1],[0,1]]").unwrap();
        assert_eq!(r.name(m.apply(e)), "[[1,5],[0,1]]");
    }

    #[test]
    fn derivation_examples_validate() {
        // formal derivative on Z2[t]/(t^2), sigma = id
        let r = construct_ring(&RingDescriptor::quotient(
            RingDescriptor::modular(2),
            &["0", "0", "1"],
            "t",
        ))
        .unwrap();
        let sigma = RingMorphism::identity(&r);
        let img = resolve_rule(&r, &MapRule::FormalDerivative, Some(&sigma)).unwrap();
        let d = validate_derivation(&r, &sigma, img).unwrap();
        let t = parse_elem(&r, "t").unwrap();
        assert_eq!(d.apply(t), r.one());

        // corner derivation [0,2b;0,0] with sigma negating the corner
        let ut = construct_ring(&RingDescriptor::upper_triangular_2x2(
            RingDescriptor::modular(5),
        ))
        .unwrap();
        let s_img = resolve_rule(&ut, &MapRule::NegateCorner, None).unwrap();
        let s = Arc::new(validate_morphism(&ut, s_img, true).unwrap());
        let d_img = resolve_rule(
            &ut,
            &MapRule::CornerDerivation { factor: "2".into() },
            Some(&s),
        )
        .unwrap();
        let d = validate_derivation(&ut, &s, d_img).unwrap();
        let e = parse_elem(&ut, "[[1,1],[0,3]]").unwrap();
        assert_eq!(ut.name(d.apply(e)), "[[0,2],[0,0]]");
    }

    #[test]
    fn leibniz_violation_carries_witness() {
        let r = construct_ring(&RingDescriptor::modular(4)).unwrap();
        let sigma = RingMorphism::identity(&r);
        // "negate" is additive but no derivation on Z4
        let img: Vec<u32> = r.elems().map(|a| r.neg(a).0).collect();
        let err = validate_derivation(&r, &sigma, img).unwrap_err();
        assert!(matches!(err, MapError::LeibnizViolation { .. }));
    }

    #[test]
    fn f_operator_boundary_rows() {
        // Z2[t]/(t^2) with the formal derivative: f_n^n = sigma^n, f_0^n = delta^n
        let r = construct_ring(&RingDescriptor::quotient(
            RingDescriptor::modular(2),
            &["0", "0", "1"],
            "t",
        ))
        .unwrap();
        let ctx = context_from_rules(&r, &MapRule::Identity, &MapRule::FormalDerivative, false)
            .unwrap();
        let ft = ctx.f_table(4);
        for j in 0..=4usize {
            for a in r.elems() {
                let mut s = a;
                let mut d = a;
                for _ in 0..j {
                    s = ctx.sigma().apply(s);
                    d = ctx.delta().apply(d);
                }
                assert_eq!(ft.apply(j, j, a), s, "f_n^n = sigma^n");
                assert_eq!(ft.apply(0, j, a), d, "f_0^n = delta^n");
            }
        }
    }

    #[test]
    fn f_1_2_is_sigma_delta_plus_delta_sigma() {
        let r = construct_ring(&RingDescriptor::quotient(
            RingDescriptor::modular(3),
            &["1", "0", "1"],
            "u",
        ))
        .unwrap();
        let ctx =
            context_from_rules(&r, &MapRule::Conjugate, &MapRule::IdMinusSigma, true).unwrap();
        let ft = ctx.f_table(2);
        for a in r.elems() {
            let sd = ctx.sigma().apply(ctx.delta().apply(a));
            let ds = ctx.delta().apply(ctx.sigma().apply(a));
            assert_eq!(ft.apply(1, 2, a), r.add(sd, ds));
        }
    }

    #[test]
    fn f_operators_are_additive() {
        let r = z2_t3();
        let ctx =
            context_from_rules(&r, &MapRule::EvaluateAtZero, &MapRule::Zero, false).unwrap();
        let ft = ctx.f_table(4);
        for j in 0..=4usize {
            for i in 0..=j {
                for a in r.elems() {
                    for b in r.elems() {
                        let lhs = ft.apply(i, j, r.add(a, b));
                        let rhs = r.add(ft.apply(i, j, a), ft.apply(i, j, b));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }
}
