//! Normal subgroups of space groups, completion and the enumeration of
//! complete normal subgroups through invariant subspaces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::groupcore::{AffineElement, Coset, SpaceGroup};
use crate::ratlin::{
    ints_to_rats, lattice_intersect_subspace, orth_complement, solve_integer_affine_rat,
    to_int_vec, vec_add, vec_sub, Int, IntLattice, IntMat, Rat, RatMat, Subspace,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubgroupError {
    #[error("element {0} is not in the group")]
    NotInGroup(String),
    #[error("enumeration of {k}-dimensional subspaces in dimension {n} is not supported")]
    UnsupportedDimension { k: usize, n: usize },
}

/// A normal subgroup `N`, stored as `N ∩ T` plus one representative per
/// element of its point group `Φ`.
#[derive(Clone)]
pub struct NormalSubgroup {
    parent: Arc<SpaceGroup>,
    lattice: IntLattice,
    cosets: Vec<Coset>,
}

impl PartialEq for NormalSubgroup {
    fn eq(&self, other: &Self) -> bool {
        self.lattice == other.lattice && self.cosets == other.cosets
    }
}

impl Eq for NormalSubgroup {}

impl fmt::Debug for NormalSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NormalSubgroup")
            .field("lattice", &self.lattice)
            .field(
                "cosets",
                &self.cosets.iter().map(Coset::rep).collect::<Vec<_>>(),
            )
            .finish()
    }
}

fn finish(
    parent: Arc<SpaceGroup>,
    lattice: IntLattice,
    reps: BTreeMap<IntMat, Vec<Rat>>,
) -> NormalSubgroup {
    let mut cosets: Vec<Coset> = reps
        .into_iter()
        .map(|(point, t)| Coset {
            offset: lattice.reduce(&t),
            point,
        })
        .collect();
    cosets.sort_by(|a, b| {
        (!a.point.is_identity(), &a.point).cmp(&(!b.point.is_identity(), &b.point))
    });
    NormalSubgroup {
        parent,
        lattice,
        cosets,
    }
}

impl NormalSubgroup {
    /// Normal closure of `gens` in `parent`.
    pub fn generated_by(
        parent: &Arc<SpaceGroup>,
        gens: &[AffineElement],
    ) -> Result<NormalSubgroup, SubgroupError> {
        let n = parent.dim();
        for g in gens {
            if !parent.contains(g) {
                return Err(SubgroupError::NotInGroup(g.to_string()));
            }
        }
        let conj: Vec<AffineElement> = parent.generators();
        let mut lat_gens: Vec<Vec<Int>> = Vec::new();
        let mut lattice = IntLattice::zero(n);
        let mut reps: BTreeMap<IntMat, Vec<Rat>> = BTreeMap::new();
        reps.insert(IntMat::identity(n), vec![Rat::zero(); n]);
        let mut pending: Vec<AffineElement> = gens.to_vec();
        while !pending.is_empty() {
            for x in pending.drain(..) {
                match reps.get(&x.point) {
                    Some(t) => {
                        let d =
                            to_int_vec(&vec_sub(&x.trans, t)).expect("same coset of the parent");
                        if !lattice.contains_int(&d) {
                            lat_gens.push(d);
                            lattice = IntLattice::from_generators(n, &lat_gens);
                        }
                    }
                    None => {
                        reps.insert(x.point.clone(), lattice.reduce(&x.trans));
                    }
                }
            }
            let elems: Vec<AffineElement> = reps
                .iter()
                .map(|(p, t)| AffineElement::new(p.clone(), t.clone()))
                .collect();
            let mut cand = Vec::new();
            for x in &elems {
                for y in &elems {
                    cand.push(x.mul(y));
                }
                for h in &conj {
                    cand.push(x.conjugate_by(h));
                }
            }
            for v in lattice.generators() {
                let t = AffineElement::translation(ints_to_rats(&v));
                for h in &conj {
                    cand.push(t.conjugate_by(h));
                }
            }
            for c in cand {
                let known = match reps.get(&c.point) {
                    Some(t) => lattice.contains(&vec_sub(&c.trans, t)),
                    None => false,
                };
                if !known {
                    pending.push(c);
                }
            }
        }
        Ok(finish(parent.clone(), lattice, reps))
    }

    pub fn parent(&self) -> &Arc<SpaceGroup> {
        &self.parent
    }

    /// `N ∩ T`
    pub fn trans_lattice(&self) -> &IntLattice {
        &self.lattice
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }

    /// The point group `Φ` of `N`.
    pub fn point_group(&self) -> Vec<IntMat> {
        self.cosets.iter().map(|c| c.point.clone()).collect()
    }

    pub fn span(&self) -> Subspace {
        self.lattice.span()
    }

    pub fn dim(&self) -> usize {
        self.lattice.rank()
    }

    pub fn contains(&self, x: &AffineElement) -> bool {
        self.cosets
            .iter()
            .find(|c| c.point == x.point)
            .is_some_and(|c| self.lattice.contains(&vec_sub(&x.trans, &c.offset)))
    }

    pub fn generators(&self) -> Vec<AffineElement> {
        let mut out: Vec<AffineElement> = self
            .lattice
            .generators()
            .iter()
            .map(|v| AffineElement::translation(ints_to_rats(v)))
            .collect();
        out.extend(self.cosets.iter().skip(1).map(Coset::rep));
        out
    }

    /// Checks closure under conjugation by the parent's generators.
    pub fn is_normal(&self) -> bool {
        let hs = self.parent.generators();
        self.generators()
            .iter()
            .all(|x| hs.iter().all(|h| self.contains(&x.conjugate_by(h))))
    }

    pub fn completion(&self) -> CompleteNormalSubgroup {
        complete_normal_from_subspace(&self.parent, &self.span())
            .expect("span of a normal subgroup is admissible")
    }

    pub fn is_complete(&self) -> bool {
        *self == *self.completion()
    }

    /// Element-wise description check: every element `a+A` has `a ∈ V` and
    /// `A` fixing `V^perp`.
    pub fn elements_respect_span(&self) -> bool {
        let v = self.span();
        let vp = orth_complement(&v, self.parent.gram());
        self.cosets.iter().all(|c| {
            v.contains(&c.offset) && vp.is_fixed_by(&c.point) && v.is_invariant_under(&c.point)
        })
    }
}

pub fn commensurable(a: &NormalSubgroup, b: &NormalSubgroup) -> bool {
    a.completion() == b.completion()
}

/// A complete normal subgroup, determined by its span.
#[derive(Clone, PartialEq, Eq)]
pub struct CompleteNormalSubgroup {
    inner: NormalSubgroup,
    span: Subspace,
}

impl Deref for CompleteNormalSubgroup {
    type Target = NormalSubgroup;

    fn deref(&self) -> &NormalSubgroup {
        &self.inner
    }
}

impl fmt::Debug for CompleteNormalSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CompleteNormalSubgroup")
            .field("span", &self.span)
            .field("lattice", &self.inner.lattice)
            .field(
                "cosets",
                &self.inner.cosets.iter().map(Coset::rep).collect::<Vec<_>>(),
            )
            .finish()
    }
}

impl CompleteNormalSubgroup {
    pub fn span(&self) -> Subspace {
        self.span.clone()
    }

    pub fn as_normal(&self) -> &NormalSubgroup {
        &self.inner
    }
}

/// `{b+B ∈ Γ : b ∈ V, V^perp ⊆ Fix(B)}`, when `V` is invariant and meets the
/// lattice in full rank.
pub fn complete_normal_from_subspace(
    g: &Arc<SpaceGroup>,
    v: &Subspace,
) -> Option<CompleteNormalSubgroup> {
    let n = g.dim();
    if v.ambient() != n || !g.cosets().iter().all(|c| v.is_invariant_under(&c.point)) {
        return None;
    }
    let lattice = lattice_intersect_subspace(&IntLattice::standard(n), v);
    if lattice.rank() != v.dim() {
        return None;
    }
    let vp = orth_complement(v, g.gram());
    let w = v.annihilator().to_rat();
    let mut reps = BTreeMap::new();
    for c in g.cosets() {
        if !vp.is_fixed_by(&c.point) {
            continue;
        }
        let rhs: Vec<Rat> = w.mul_vec(&c.offset).into_iter().map(|x| -x).collect();
        let sol = if w.rows() == 0 {
            Some(vec![Int::zero(); n])
        } else {
            solve_integer_affine_rat(&w, &rhs, &IntLattice::standard(n)).expect("dimensions agree")
        };
        if let Some(lambda) = sol {
            reps.insert(c.point.clone(), vec_add(&c.offset, &ints_to_rats(&lambda)));
        }
    }
    let inner = finish(g.clone(), lattice, reps);
    if !inner.is_normal() {
        return None;
    }
    Some(CompleteNormalSubgroup {
        inner,
        span: v.clone(),
    })
}

pub fn is_complete(n: &NormalSubgroup) -> bool {
    n.is_complete()
}

pub fn orthogonal_dual(k: &CompleteNormalSubgroup) -> Option<CompleteNormalSubgroup> {
    let g = k.parent();
    complete_normal_from_subspace(g, &orth_complement(&k.span(), g.gram()))
}

/// Common eigenspaces `E_χ = ∩ ker(P_i - χ_i I)` over the point-group
/// generators, for every sign pattern `χ`; zero spaces are dropped.
pub fn sign_eigenspaces(g: &SpaceGroup) -> Vec<Subspace> {
    let n = g.dim();
    let gens = g.point_generators();
    let mut out = Vec::new();
    for mask in 0u32..(1 << gens.len()) {
        let mut rows = Vec::new();
        for (b, &s) in gens.iter().enumerate() {
            let sign = if mask >> b & 1 == 1 { -1 } else { 1 };
            let m = g.cosets()[s]
                .point
                .sub(&IntMat::identity(n).scale(sign))
                .to_rat();
            for i in 0..n {
                rows.push(m.row(i));
            }
        }
        let e = if rows.is_empty() {
            Subspace::full(n)
        } else {
            Subspace::span(n, &RatMat::from_rows(&rows).kernel())
        };
        if e.dim() > 0 {
            out.push(e);
        }
    }
    out
}

/// Primitive coefficient vectors in `[-bound, bound]^d` with first nonzero entry positive.
fn coefficient_vectors(d: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let width = (2 * bound + 1) as usize;
    let total = width.pow(d as u32);
    for code in 0..total {
        let mut c = Vec::with_capacity(d);
        let mut x = code;
        for _ in 0..d {
            c.push((x % width) as i64 - bound);
            x /= width;
        }
        let Some(first) = c.iter().find(|v| **v != 0) else {
            continue;
        };
        if *first < 0 {
            continue;
        }
        let g = c.iter().fold(0i64, |acc, v| num_integer::gcd(acc, *v));
        if g == 1 {
            out.push(c);
        }
    }
    out
}

/// Invariant rational lines. Lines in an eigenspace of dimension at least two
/// come in an infinite family; those are sampled with lattice coordinates
/// bounded by `bound`.
pub fn invariant_lines(g: &SpaceGroup, bound: u32) -> Vec<Subspace> {
    let n = g.dim();
    let mut lines = BTreeSet::new();
    for e in sign_eigenspaces(g) {
        if e.dim() == 1 {
            lines.insert(e);
            continue;
        }
        let lat = lattice_intersect_subspace(&IntLattice::standard(n), &e);
        let basis = lat.basis();
        for c in coefficient_vectors(lat.rank(), bound.max(1) as i64) {
            let ci: Vec<Int> = c.iter().map(|&x| Int::from(x)).collect();
            let v = basis.mul_vec(&ci);
            lines.insert(Subspace::span_int(n, &[v]));
        }
    }
    lines.into_iter().collect()
}

/// Invariant subspaces of dimension `k` that meet the lattice in full rank.
pub fn invariant_subspaces(
    g: &SpaceGroup,
    k: usize,
    bound: u32,
) -> Result<Vec<Subspace>, SubgroupError> {
    let n = g.dim();
    let mut out: BTreeSet<Subspace> = BTreeSet::new();
    if k == 0 {
        out.insert(Subspace::zero(n));
    } else if k == n {
        out.insert(Subspace::full(n));
    } else if k == 1 {
        out.extend(invariant_lines(g, bound));
    } else if k + 1 == n {
        out.extend(
            invariant_lines(g, bound)
                .iter()
                .map(|l| orth_complement(l, g.gram())),
        );
    } else {
        return Err(SubgroupError::UnsupportedDimension { k, n });
    }
    Ok(out.into_iter().collect())
}

pub fn enumerate_complete_normal(
    g: &Arc<SpaceGroup>,
    dims: &[usize],
    bound: u32,
) -> Result<Vec<CompleteNormalSubgroup>, SubgroupError> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for &k in dims {
        for v in invariant_subspaces(g, k, bound)? {
            if seen.insert(v.clone()) {
                if let Some(c) = complete_normal_from_subspace(g, &v) {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

/// True when a complete normal subgroup of intermediate dimension exists.
pub fn is_reducible(g: &SpaceGroup) -> bool {
    g.dim() >= 2 && !sign_eigenspaces(g).is_empty()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcore::close_generators;
    use crate::ratlin::{int_vec, rat_vec, GramForm};
    use crate::symparse::parse_symop;

    fn group(dim: usize, ops: &[&str]) -> Arc<SpaceGroup> {
        let gens: Vec<_> = ops.iter().map(|s| parse_symop(s, dim).unwrap()).collect();
        Arc::new(
            close_generators(dim, &GramForm::identity(dim), &gens, "test")
                .unwrap()
                .group,
        )
    }

    fn t(v: &[i64]) -> AffineElement {
        AffineElement::translation(rat_vec(v))
    }

    fn line(v: &[i64]) -> Subspace {
        Subspace::span_int(v.len(), &[int_vec(v)])
    }

    #[test]
    fn spans() {
        let pm = group(2, &["x,-y"]);
        let n = NormalSubgroup::generated_by(&pm, &[t(&[1, 0])]).unwrap();
        assert_eq!(n.span(), line(&[1, 0]));
        let all = NormalSubgroup::generated_by(&pm, &[t(&[1, 0]), t(&[0, 1])]).unwrap();
        assert_eq!(all.span(), Subspace::full(2));
    }

    #[test]
    fn completions() {
        let pm = group(2, &["x,-y"]);
        let all_t = NormalSubgroup::generated_by(&pm, &[t(&[1, 0]), t(&[0, 1])]).unwrap();
        assert_eq!(all_t.completion().point_group().len(), 2);
        let sq = NormalSubgroup::generated_by(&pm, &[t(&[2, 0])]).unwrap();
        assert!(!sq.is_complete());
        let c = sq.completion();
        assert_eq!(
            c.trans_lattice(),
            &IntLattice::from_generators(2, &[int_vec(&[1, 0])])
        );
        assert_eq!(c.point_group().len(), 1);
        assert!(c.is_complete());
        assert_eq!(c.completion(), c);
    }

    #[test]
    fn normal_closure_of_glide_translation() {
        let pm = group(2, &["x,-y"]);
        let n = NormalSubgroup::generated_by(&pm, &[t(&[0, 1])]).unwrap();
        assert_eq!(n.dim(), 1);
        assert!(n.is_normal());
        let p2 = group(2, &["-x,-y"]);
        let n = NormalSubgroup::generated_by(&p2, &[t(&[1, 1])]).unwrap();
        assert_eq!(
            n.trans_lattice(),
            &IntLattice::from_generators(2, &[int_vec(&[1, 1])])
        );
    }

    #[test]
    fn commensurability() {
        let pm = group(2, &["x,-y"]);
        let a = NormalSubgroup::generated_by(&pm, &[t(&[1, 0])]).unwrap();
        let b = NormalSubgroup::generated_by(&pm, &[t(&[2, 0])]).unwrap();
        assert!(commensurable(&a, &b));
        let p1 = group(2, &[]);
        let a = NormalSubgroup::generated_by(&p1, &[t(&[1, 0])]).unwrap();
        let b = NormalSubgroup::generated_by(&p1, &[t(&[0, 1])]).unwrap();
        assert!(!commensurable(&a, &b));
        let pg = group(2, &["x+1/2,-y"]);
        let z = NormalSubgroup::generated_by(&pg, &[t(&[1, 0])]).unwrap();
        let tt = NormalSubgroup::generated_by(&pg, &[t(&[1, 0]), t(&[0, 1])]).unwrap();
        assert!(!commensurable(&z, &tt));
    }

    #[test]
    fn klein_bottle_fiber_is_complete() {
        let pg = group(2, &["x+1/2,-y"]);
        let n = NormalSubgroup::generated_by(&pg, &[t(&[0, 1])]).unwrap();
        assert!(n.is_complete());
        let whole = NormalSubgroup::generated_by(&pg, &pg.generators()).unwrap();
        assert!(whole.is_complete());
    }

    #[test]
    fn from_subspace() {
        let pm = group(2, &["x,-y"]);
        let n = complete_normal_from_subspace(&pm, &line(&[0, 1])).unwrap();
        assert_eq!(n.point_group().len(), 2);
        assert!(n.contains(&parse_symop("x,-y", 2).unwrap()));
        let p1 = group(2, &[]);
        let n = complete_normal_from_subspace(&p1, &line(&[1, 1])).unwrap();
        assert_eq!(
            n.trans_lattice(),
            &IntLattice::from_generators(2, &[int_vec(&[1, 1])])
        );
        let p4 = group(2, &["-y,x"]);
        assert!(complete_normal_from_subspace(&p4, &line(&[1, 0])).is_none());
    }

    #[test]
    fn enumerations() {
        let pm = group(2, &["x,-y"]);
        let lines = enumerate_complete_normal(&pm, &[1], 2).unwrap();
        let spans: Vec<Subspace> = lines.iter().map(|c| c.span()).collect();
        assert_eq!(spans, vec![line(&[0, 1]), line(&[1, 0])]);
        let it113 = group(3, &["-x+1/2,-y+1/2,z", "y+1/2,-x,-z", "-x,y+1/2,-z"]);
        let planes = enumerate_complete_normal(&it113, &[2], 2).unwrap();
        assert_eq!(planes.len(), 1);
        assert_eq!(
            planes[0].span(),
            Subspace::span_int(3, &[int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0])])
        );
        let cubic = group(3, &["z,x,y", "-x,-y,z", "-x,y,-z"]);
        assert!(enumerate_complete_normal(&cubic, &[1, 2], 2)
            .unwrap()
            .is_empty());
        assert!(!is_reducible(&cubic));
        assert!(is_reducible(&group(2, &[])));
        assert!(is_reducible(&it113));
    }

    #[test]
    fn duals() {
        let pm = group(2, &["x,-y"]);
        let k = complete_normal_from_subspace(&pm, &line(&[1, 0])).unwrap();
        let n = orthogonal_dual(&k).unwrap();
        assert_eq!(n.span(), line(&[0, 1]));
        assert_eq!(orthogonal_dual(&n).unwrap(), k);
        let it113 = group(3, &["-x+1/2,-y+1/2,z", "y+1/2,-x,-z", "-x,y+1/2,-z"]);
        let k = complete_normal_from_subspace(&it113, &line(&[0, 0, 1])).unwrap();
        let n = orthogonal_dual(&k).unwrap();
        assert_eq!(n.dim(), 2);
        assert_eq!(n.point_group().len(), 4);
        assert!(n.contains(&parse_symop("-x+1/2,-y+1/2,z", 3).unwrap()));
        let beta_gamma = parse_symop("y+1/2,-x,-z", 3)
            .unwrap()
            .mul(&parse_symop("-x,y+1/2,-z", 3).unwrap());
        assert!(n.contains(&beta_gamma));
        assert!(n.elements_respect_span());
    }

    #[test]
    fn non_member_rejected() {
        let pm = group(2, &["x,-y"]);
        assert!(NormalSubgroup::generated_by(
            &pm,
            &[t(&[1, 0]).mul(&AffineElement::translation(vec![
                Rat::new(Int::from(1), Int::from(2)),
                Rat::zero()
            ]))]
        )
        .is_err());
    }

    #[test]
    fn coefficient_vectors_are_primitive() {
        let v = coefficient_vectors(2, 2);
        assert!(v.contains(&vec![1, 0]) && v.contains(&vec![0, 1]) && v.contains(&vec![1, -2]));
        assert!(!v.contains(&vec![2, 2]) && !v.contains(&vec![-1, 0]));
    }
}
