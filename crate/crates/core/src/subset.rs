//! Subsets of a ring: annihilators, one-sided ideals, closure algorithms.

use std::sync::Arc;

use crate::ring::{Elem, RingRef};

/// A subset of one ring, as a membership vector.
///
/// Ideal flags are only ever set after the corresponding closure property has
/// been verified against the tables.
#[derive(Clone)]
pub struct RingSubset {
    ring: RingRef,
    members: Vec<bool>,
    is_right_ideal: bool,
    is_left_ideal: bool,
}

impl std::fmt::Debug for RingSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}", self.member_names().join(", "))
    }
}

impl PartialEq for RingSubset {
    fn eq(&self, other: &Self) -> bool {
        self.ring.ring_id() == other.ring.ring_id() && self.members == other.members
    }
}
impl Eq for RingSubset {}

impl RingSubset {
    pub fn empty(ring: &RingRef) -> Self {
        RingSubset {
            ring: Arc::clone(ring),
            members: vec![false; ring.order()],
            is_right_ideal: false,
            is_left_ideal: false,
        }
    }

    pub fn from_elems(ring: &RingRef, elems: &[Elem]) -> Self {
        let mut s = Self::empty(ring);
        for &e in elems {
            s.members[e.index()] = true;
        }
        s.refresh_flags();
        s
    }

    pub fn whole_ring(ring: &RingRef) -> Self {
        let mut s = RingSubset {
            ring: Arc::clone(ring),
            members: vec![true; ring.order()],
            is_right_ideal: true,
            is_left_ideal: true,
        };
        s.refresh_flags();
        s
    }

    pub fn ring(&self) -> &RingRef {
        &self.ring
    }

    pub fn contains(&self, e: Elem) -> bool {
        self.members[e.index()]
    }

    pub fn card(&self) -> usize {
        self.members.iter().filter(|&&m| m).count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.iter().all(|&m| !m)
    }

    pub fn iter(&self) -> impl Iterator<Item = Elem> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| Elem(i as u32))
    }

    pub fn member_names(&self) -> Vec<String> {
        self.iter().map(|e| self.ring.name(e).to_string()).collect()
    }

    pub fn is_right_ideal(&self) -> bool {
        self.is_right_ideal
    }

    pub fn is_left_ideal(&self) -> bool {
        self.is_left_ideal
    }

    pub fn is_two_sided_ideal(&self) -> bool {
        self.is_right_ideal && self.is_left_ideal
    }

    /// Membership key for deterministic ordering and deduplication.
    pub fn key(&self) -> Vec<bool> {
        self.members.clone()
    }

    pub fn intersect(&self, other: &RingSubset) -> RingSubset {
        assert_eq!(
            self.ring.ring_id(),
            other.ring.ring_id(),
            "subsets of different rings"
        );
        let mut s = RingSubset {
            ring: Arc::clone(&self.ring),
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| a && b)
                .collect(),
            is_right_ideal: false,
            is_left_ideal: false,
        };
        s.refresh_flags();
        s
    }

    /// Re-verifies additive and multiplicative closure and records the result
    /// in the ideal flags.
    fn refresh_flags(&mut self) {
        let r = &self.ring;
        if !self.contains(r.zero()) {
            self.is_right_ideal = false;
            self.is_left_ideal = false;
            return;
        }
        let members: Vec<Elem> = self.iter().collect();
        let additive = members.iter().all(|&a| {
            self.contains(r.neg(a)) && members.iter().all(|&b| self.contains(r.add(a, b)))
        });
        if !additive {
            self.is_right_ideal = false;
            self.is_left_ideal = false;
            return;
        }
        self.is_right_ideal = members
            .iter()
            .all(|&a| r.elems().all(|x| self.contains(r.mul(a, x))));
        self.is_left_ideal = members
            .iter()
            .all(|&a| r.elems().all(|x| self.contains(r.mul(x, a))));
    }
}

/// `r_R(X) = { a | x a = 0 for all x in X }`. Always a right ideal; two-sided
/// whenever `X` is a right ideal. The flags reflect a direct verification.
pub fn right_annihilator(x: &RingSubset) -> RingSubset {
    let r = x.ring();
    let members: Vec<Elem> = r
        .elems()
        .filter(|&a| x.iter().all(|m| r.is_zero(r.mul(m, a))))
        .collect();
    RingSubset::from_elems(r, &members)
}

/// `l_R(X) = { a | a x = 0 for all x in X }`.
pub fn left_annihilator(x: &RingSubset) -> RingSubset {
    let r = x.ring();
    let members: Vec<Elem> = r
        .elems()
        .filter(|&a| x.iter().all(|m| r.is_zero(r.mul(a, m))))
        .collect();
    RingSubset::from_elems(r, &members)
}

/// Smallest right ideal containing the generators: fixed-point closure under
/// addition and right multiplication by every ring element.
pub fn right_ideal_closure(ring: &RingRef, gens: &[Elem]) -> RingSubset {
    let mut member = vec![false; ring.order()];
    member[ring.zero().index()] = true;
    for &g in gens {
        member[g.index()] = true;
    }
    closure_fixed_point(ring, &mut member, true, false);
    RingSubset::from_elems(
        ring,
        &member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| Elem(i as u32))
            .collect::<Vec<_>>(),
    )
}

/// Smallest two-sided ideal containing the generators.
pub fn two_sided_ideal_closure(ring: &RingRef, gens: &[Elem]) -> RingSubset {
    let mut member = vec![false; ring.order()];
    member[ring.zero().index()] = true;
    for &g in gens {
        member[g.index()] = true;
    }
    closure_fixed_point(ring, &mut member, true, true);
    RingSubset::from_elems(
        ring,
        &member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| Elem(i as u32))
            .collect::<Vec<_>>(),
    )
}

fn closure_fixed_point(ring: &RingRef, member: &mut [bool], right_mul: bool, left_mul: bool) {
    loop {
        let current: Vec<Elem> = member
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| Elem(i as u32))
            .collect();
        let mut changed = false;
        let insert = |e: Elem, member: &mut [bool]| {
            if !member[e.index()] {
                member[e.index()] = true;
                true
            } else {
                false
            }
        };
        for &a in &current {
            changed |= insert(ring.neg(a), member);
            for &b in &current {
                changed |= insert(ring.add(a, b), member);
            }
            for x in ring.elems() {
                if right_mul {
                    changed |= insert(ring.mul(a, x), member);
                }
                if left_mul {
                    changed |= insert(ring.mul(x, a), member);
                }
            }
        }
        if !changed {
            return;
        }
    }
}

/// `e R` as a subset.
pub fn principal_right_set(ring: &RingRef, e: Elem) -> RingSubset {
    let members: Vec<Elem> = ring.elems().map(|x| ring.mul(e, x)).collect();
    RingSubset::from_elems(ring, &members)
}

/// `R e` as a subset.
pub fn principal_left_set(ring: &RingRef, e: Elem) -> RingSubset {
    let members: Vec<Elem> = ring.elems().map(|x| ring.mul(x, e)).collect();
    RingSubset::from_elems(ring, &members)
}

/// Closes a family of subsets under pairwise intersection. The result is
/// deduplicated and sorted by descending cardinality, then by membership key,
/// so the output order is deterministic.
pub fn intersection_closure(family: &[RingSubset]) -> Vec<RingSubset> {
    let mut out: Vec<RingSubset> = Vec::new();
    for s in family {
        if !out.contains(s) {
            out.push(s.clone());
        }
    }
    let mut i = 0;
    while i < out.len() {
        for j in 0..i {
            let meet = out[i].intersect(&out[j]);
            if !out.contains(&meet) {
                out.push(meet);
            }
        }
        i += 1;
    }
    out.sort_by(|a, b| {
        b.card()
            .cmp(&a.card())
            .then_with(|| a.key().cmp(&b.key()))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptor::{construct_ring, RingDescriptor};
    use crate::expr::parse_elem;

    fn z2_t2() -> RingRef {
        construct_ring(&RingDescriptor::quotient(
            RingDescriptor::modular(2),
            &["0", "0", "1"],
            "t",
        ))
        .unwrap()
    }

    #[test]
    fn annihilator_of_t_in_z2_t2() {
        let r = z2_t2();
        let t = parse_elem(&r, "t").unwrap();
        let ann = right_annihilator(&RingSubset::from_elems(&r, &[t]));
        assert_eq!(ann.member_names(), vec!["0", "t"]);
        assert!(ann.is_right_ideal());
    }

    #[test]
    fn annihilator_trivial_cases() {
        let r = z2_t2();
        let zero_set = RingSubset::from_elems(&r, &[r.zero()]);
        assert_eq!(right_annihilator(&zero_set).card(), r.order());
        let one_set = RingSubset::from_elems(&r, &[r.one()]);
        let ann = right_annihilator(&one_set);
        assert_eq!(ann.member_names(), vec!["0"]);
    }

    #[test]
    fn right_ideal_closures() {
        let r = z2_t2();
        let t = parse_elem(&r, "t").unwrap();
        let i = right_ideal_closure(&r, &[t]);
        assert_eq!(i.member_names(), vec!["0", "t"]);
        assert!(i.is_right_ideal());

        let j = right_ideal_closure(&r, &[r.one()]);
        assert_eq!(j.card(), 4);

        let z6 = construct_ring(&RingDescriptor::modular(6)).unwrap();
        let three = z6.int_elem(3);
        let k = right_ideal_closure(&z6, &[three]);
        assert_eq!(k.member_names(), vec!["0", "3"]);
    }

    #[test]
    fn closure_is_idempotent() {
        let z6 = construct_ring(&RingDescriptor::modular(6)).unwrap();
        for a in z6.elems() {
            let once = right_ideal_closure(&z6, &[a]);
            let gens: Vec<Elem> = once.iter().collect();
            let twice = right_ideal_closure(&z6, &gens);
            assert_eq!(once, twice);
        }
    }

    #[test]
    fn annihilator_of_right_ideal_is_two_sided() {
        let desc = RingDescriptor::upper_triangular_2x2(RingDescriptor::modular(3));
        let r = construct_ring(&desc).unwrap();
        for a in r.elems() {
            let ideal = right_ideal_closure(&r, &[a]);
            let ann = right_annihilator(&ideal);
            assert!(ann.is_right_ideal());
            assert!(ann.is_left_ideal(), "r(aR) must be two-sided, a = {}", r.name(a));
        }
    }

    #[test]
    fn annihilator_is_intersection_of_pointwise_annihilators() {
        let desc = RingDescriptor::upper_triangular_2x2(RingDescriptor::modular(2));
        let r = construct_ring(&desc).unwrap();
        let elems: Vec<Elem> = vec![r.elem(1), r.elem(3), r.elem(5)];
        let whole = right_annihilator(&RingSubset::from_elems(&r, &elems));
        let mut meet = RingSubset::whole_ring(&r);
        for &e in &elems {
            meet = meet.intersect(&right_annihilator(&RingSubset::from_elems(&r, &[e])));
        }
        assert_eq!(whole, meet);
    }

    #[test]
    fn intersection_closure_examples() {
        let r = z2_t2();
        let whole = RingSubset::whole_ring(&r);
        let fam = intersection_closure(&[whole.clone()]);
        assert_eq!(fam.len(), 1);

        let t = parse_elem(&r, "t").unwrap();
        let small = right_ideal_closure(&r, &[t]);
        let fam2 = intersection_closure(&[small.clone(), whole.clone()]);
        assert_eq!(fam2.len(), 2);

        let z6 = construct_ring(&RingDescriptor::modular(6)).unwrap();
        let anns: Vec<RingSubset> = (0..4)
            .map(|i| right_annihilator(&right_ideal_closure(&z6, &[z6.elem(i)])))
            .collect();
        let closed = intersection_closure(&anns);
        assert!(closed.len() <= 4, "closure of 4 principal annihilators stays small");
    }
}
