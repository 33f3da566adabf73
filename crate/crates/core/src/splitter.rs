//! Splitting of `1 -> N -> Γ -> Γ/N -> 1`, decided by lifting a finite
//! presentation of `Γ/N` and solving the resulting integer affine system.

use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::fiberclass::{self, quotient_group, FiberError, QuotientGroup};
use crate::groupcore::{AffineElement, SpaceGroup};
use crate::normsub::{self, CompleteNormalSubgroup, NormalSubgroup};
use crate::ratlin::{
    ints_to_rats, orth_complement, solve_integer_affine, to_int_vec, vec_add, Int, IntLattice,
    IntMat, Rat,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SplitError {
    #[error("unsupported quotient dimension {0}")]
    UnsupportedDimension(usize),
    #[error("subgroup is not infinite dihedral")]
    NotDihedral,
    #[error("inconsistent structure: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Fiber(#[from] Box<FiberError>),
}

impl From<FiberError> for SplitError {
    fn from(e: FiberError) -> Self {
        SplitError::Fiber(Box::new(e))
    }
}

/// Sequence of `(generator, exponent)`.
pub type Word = Vec<(usize, i64)>;

fn free_reduce(w: Word) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for (g, e) in w {
        if e == 0 {
            continue;
        }
        match out.last_mut() {
            Some((h, f)) if *h == g => {
                *f += e;
                if *f == 0 {
                    out.pop();
                }
            }
            _ => out.push((g, e)),
        }
    }
    out
}

fn invert_word(w: &Word) -> Word {
    w.iter().rev().map(|&(g, e)| (g, -e)).collect()
}

/// Finite presentation of a space group: the lattice basis `t_i` followed by
/// point-group generators `s_j`.
#[derive(Clone, Debug)]
pub struct QuotientPresentation {
    pub generators: Vec<AffineElement>,
    pub relators: Vec<Word>,
    pub translation_generators: usize,
}

impl QuotientPresentation {
    pub fn evaluate(word: &Word, images: &[AffineElement]) -> AffineElement {
        let n = images.first().map_or(0, AffineElement::dim);
        let inverses: Vec<AffineElement> = images.iter().map(AffineElement::inverse).collect();
        let mut out = AffineElement::identity(n);
        for &(g, e) in word {
            let base = if e < 0 { &inverses[g] } else { &images[g] };
            for _ in 0..e.unsigned_abs() {
                out = out.mul(base);
            }
        }
        out
    }

    /// Every relator is the identity on the presentation's own generators.
    pub fn verify(&self) -> bool {
        self.relators
            .iter()
            .all(|r| Self::evaluate(r, &self.generators).is_identity())
    }
}

fn translation_word(v: &[Int]) -> Word {
    v.iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(i, x)| (i, i64::try_from(x).expect("small exponent")))
        .collect()
}

/// A complete presentation derived from the coset table: commutators of the
/// `t_i`, the conjugation action of each `s_j`, and one relation per coset
/// and point generator expressing the product of normal-form words.
pub fn present_group(q: &SpaceGroup) -> QuotientPresentation {
    let m = q.dim();
    let sgen = q.point_generators();
    let mut generators: Vec<AffineElement> = (0..m).map(|i| q.translation(i)).collect();
    generators.extend(sgen.iter().map(|&s| q.coset_rep(s)));
    let mut words: Vec<Option<Word>> = vec![None; q.order()];
    words[0] = Some(Vec::new());
    let mut queue = vec![0];
    let mut head = 0;
    while head < queue.len() {
        let p = queue[head];
        head += 1;
        for (j, &s) in sgen.iter().enumerate() {
            let ps = q.point_mul(p, s);
            if words[ps].is_none() {
                let mut w = words[p].clone().unwrap();
                w.push((m + j, 1));
                words[ps] = Some(w);
                queue.push(ps);
            }
        }
    }
    let words: Vec<Word> = words
        .into_iter()
        .map(|w| w.expect("generators reach every coset"))
        .collect();
    let values: Vec<AffineElement> = words
        .iter()
        .map(|w| QuotientPresentation::evaluate(w, &generators))
        .collect();
    let mut relators = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            relators.push(vec![(i, 1), (j, 1), (i, -1), (j, -1)]);
        }
    }
    for (j, &s) in sgen.iter().enumerate() {
        let p = &q.cosets()[s].point;
        for i in 0..m {
            let mut w = vec![(m + j, 1), (i, 1), (m + j, -1)];
            w.extend(invert_word(&translation_word(&p.col(i))));
            relators.push(free_reduce(w));
        }
    }
    for p in 0..q.order() {
        for (j, &s) in sgen.iter().enumerate() {
            let ps = q.point_mul(p, s);
            let prod = values[p].mul(&generators[m + j]).mul(&values[ps].inverse());
            let c = to_int_vec(&prod.trans).expect("pure lattice translation");
            let mut w = words[p].clone();
            w.push((m + j, 1));
            w.extend(invert_word(&words[ps]));
            w.extend(invert_word(&translation_word(&c)));
            let w = free_reduce(w);
            if !w.is_empty() {
                relators.push(w);
            }
        }
    }
    relators.sort();
    relators.dedup();
    let pres = QuotientPresentation {
        generators,
        relators,
        translation_generators: m,
    };
    debug_assert!(pres.verify());
    pres
}

pub fn present_quotient(q: &QuotientGroup) -> QuotientPresentation {
    present_group(&q.group)
}

/// Lifts of the presentation generators forming a complement of `N`.
#[derive(Clone, Debug)]
pub struct SplitWitness {
    pub lifts: Vec<AffineElement>,
}

/// `(point, c + sum_j M_j mu_j)`
#[derive(Clone)]
struct SymAffine {
    point: IntMat,
    c: Vec<Rat>,
    coeffs: Vec<IntMat>,
}

impl SymAffine {
    fn mul(&self, o: &SymAffine) -> SymAffine {
        SymAffine {
            point: self.point.mul(&o.point),
            c: vec_add(&self.c, &self.point.mul_rat_vec(&o.c)),
            coeffs: self
                .coeffs
                .iter()
                .zip(&o.coeffs)
                .map(|(a, b)| a.add(&self.point.mul(b)))
                .collect(),
        }
    }

    fn inverse(&self, inv_point: &IntMat) -> SymAffine {
        SymAffine {
            point: inv_point.clone(),
            c: inv_point
                .mul_rat_vec(&self.c)
                .into_iter()
                .map(|x| -x)
                .collect(),
            coeffs: self.coeffs.iter().map(|m| inv_point.mul(m).neg()).collect(),
        }
    }

    fn identity(n: usize, gens: usize, k: usize) -> SymAffine {
        SymAffine {
            point: IntMat::identity(n),
            c: vec![Rat::zero(); n],
            coeffs: vec![IntMat::zeros(n, k); gens],
        }
    }
}

/// Decide whether `Γ` splits over `N`.
pub fn find_complement(
    g: &Arc<SpaceGroup>,
    n: &CompleteNormalSubgroup,
) -> Result<Option<SplitWitness>, SplitError> {
    let q = quotient_group(g, n)?;
    find_complement_in(&q)
}

/// As [`find_complement`], reusing a computed quotient.
pub fn find_complement_in(q: &QuotientGroup) -> Result<Option<SplitWitness>, SplitError> {
    if q.group.dim() > 2 {
        return Err(SplitError::UnsupportedDimension(q.group.dim()));
    }
    let g = q.parent().clone();
    let n = q.kernel();
    let dim = g.dim();
    let pres = present_quotient(q);
    let ngen = pres.generators.len();
    let base: Vec<AffineElement> = pres
        .generators
        .iter()
        .map(|x| {
            q.preimage(x)
                .ok_or_else(|| SplitError::Inconsistent("generator without preimage".into()))
        })
        .collect::<Result<_, _>>()?;
    let base_idx: Vec<usize> = base
        .iter()
        .map(|b| g.coset_index(&b.point).expect("in Γ"))
        .collect();
    let phi: Vec<(usize, AffineElement)> = n
        .cosets()
        .iter()
        .map(|c| (g.coset_index(&c.point).expect("in Π"), c.rep()))
        .collect();
    let bn = n.trans_lattice().basis().clone();
    let k = bn.cols();

    let total = phi.len().pow(ngen as u32);
    let mut choice = vec![0usize; ngen];
    for code in 0..total {
        let mut x = code;
        for c in choice.iter_mut() {
            *c = x % phi.len();
            x /= phi.len();
        }
        // point parts first, through the multiplication table
        let pts: Vec<usize> = (0..ngen)
            .map(|i| g.point_mul(phi[choice[i]].0, base_idx[i]))
            .collect();
        let inv_pts: Vec<usize> = pts.iter().map(|&p| g.point_inverse(p)).collect();
        let trivial = pres.relators.iter().all(|r| {
            let mut acc = 0;
            for &(gi, e) in r {
                let step = if e < 0 { inv_pts[gi] } else { pts[gi] };
                for _ in 0..e.unsigned_abs() {
                    acc = g.point_mul(acc, step);
                }
            }
            acc == 0
        });
        if !trivial {
            continue;
        }
        let sym: Vec<SymAffine> = (0..ngen)
            .map(|i| {
                let (_, d) = &phi[choice[i]];
                let b = &base[i];
                let mut coeffs = vec![IntMat::zeros(dim, k); ngen];
                coeffs[i] = bn.clone();
                SymAffine {
                    point: d.point.mul(&b.point),
                    c: vec_add(&d.trans, &d.point.mul_rat_vec(&b.trans)),
                    coeffs,
                }
            })
            .collect();
        let sym_inv: Vec<SymAffine> = sym
            .iter()
            .zip(&inv_pts)
            .map(|(s, &p)| s.inverse(&g.cosets()[p].point))
            .collect();
        let mut rows: Vec<IntMat> = Vec::new();
        let mut rhs: Vec<Rat> = Vec::new();
        for r in &pres.relators {
            let mut acc = SymAffine::identity(dim, ngen, k);
            for &(gi, e) in r {
                let step = if e < 0 { &sym_inv[gi] } else { &sym[gi] };
                for _ in 0..e.unsigned_abs() {
                    acc = acc.mul(step);
                }
            }
            debug_assert!(acc.point.is_identity());
            rows.push(IntMat::hstack(&acc.coeffs));
            rhs.extend(acc.c.into_iter().map(|x| -x));
        }
        let unknowns = k * ngen;
        let sol = if rows.is_empty() {
            Some(vec![Int::zero(); unknowns])
        } else if unknowns == 0 {
            rhs.iter().all(Zero::is_zero).then(Vec::new)
        } else {
            let a = IntMat::vstack(&rows);
            solve_integer_affine(&a, &rhs, &IntLattice::standard(unknowns))
                .expect("consistent dimensions")
        };
        if let Some(mu) = sol {
            let lifts: Vec<AffineElement> = (0..ngen)
                .map(|i| {
                    let s = &sym[i];
                    let shift = bn.mul_vec(&mu[i * k..(i + 1) * k]);
                    AffineElement::new(s.point.clone(), vec_add(&s.c, &ints_to_rats(&shift)))
                })
                .collect();
            let w = SplitWitness { lifts };
            if !pres
                .relators
                .iter()
                .all(|r| QuotientPresentation::evaluate(r, &w.lifts).is_identity())
            {
                return Err(SplitError::Inconsistent(
                    "lifted relators do not vanish".into(),
                ));
            }
            return Ok(Some(w));
        }
    }
    Ok(None)
}

/// Post-hoc witness check: relators vanish, lifts project onto the
/// generators, and no nontrivial word of length at most `max_len` lands in `N`.
pub fn verify_witness(q: &QuotientGroup, w: &SplitWitness, max_len: usize) -> bool {
    let pres = present_quotient(q);
    if w.lifts.len() != pres.generators.len() {
        return false;
    }
    if !pres
        .relators
        .iter()
        .all(|r| QuotientPresentation::evaluate(r, &w.lifts).is_identity())
    {
        return false;
    }
    if !w
        .lifts
        .iter()
        .zip(&pres.generators)
        .all(|(l, x)| q.image(l) == *x)
    {
        return false;
    }
    let mut letters = w.lifts.clone();
    letters.extend(w.lifts.iter().map(AffineElement::inverse));
    let n = q.kernel();
    let mut frontier = vec![AffineElement::identity(q.parent().dim())];
    for _ in 0..max_len {
        let mut next = Vec::with_capacity(frontier.len() * letters.len());
        for x in &frontier {
            for l in &letters {
                let y = x.mul(l);
                if !y.is_identity() && n.contains(&y) {
                    return false;
                }
                next.push(y);
            }
        }
        next.sort_by(|a, b| (&a.point, &a.trans).cmp(&(&b.point, &b.trans)));
        next.dedup();
        frontier = next;
    }
    true
}

/// Fast path: extensions over a circle always split.
pub fn splits_trivially_over_circle(q: &QuotientGroup) -> bool {
    q.group.dim() == 1 && q.group.order() == 1
}

/// `Γ = K × N`: `KN = Γ` and the two subgroups commute.
pub fn is_direct_product(
    g: &SpaceGroup,
    k: &CompleteNormalSubgroup,
    n: &CompleteNormalSubgroup,
) -> bool {
    if fiberclass::index_kn(g, k, n) != Int::from(1) {
        return false;
    }
    let kg = k.generators();
    let ng = n.generators();
    kg.iter().all(|a| ng.iter().all(|b| a.mul(b) == b.mul(a)))
}

/// The two possible shapes of `Γ` over an infinite dihedral `N`.
#[derive(Clone, Debug)]
pub enum DihedralSplit {
    /// `Γ = N × Σ` with `Σ` the centralizer of `N`.
    DirectProduct { sigma: CompleteNormalSubgroup },
    /// The centralizer `Σ₀` has index two in some complement `Σ`.
    IndexTwo {
        sigma0: CompleteNormalSubgroup,
        witness: SplitWitness,
    },
}

/// Centralizer of an infinite dihedral complete normal subgroup.
pub fn dihedral_split_structure(
    g: &Arc<SpaceGroup>,
    n: &CompleteNormalSubgroup,
) -> Result<DihedralSplit, SplitError> {
    if n.dim() != 1 || n.point_group().len() != 2 {
        return Err(SplitError::NotDihedral);
    }
    let dim = g.dim();
    let v = n.trans_lattice().generators()[0].clone();
    let vr = ints_to_rats(&v);
    let r = n.cosets()[1].rep();
    let id = IntMat::identity(dim);
    let i_minus_d = id.sub(&r.point);
    let mut gens: Vec<AffineElement> = Vec::new();
    for c in g.cosets() {
        if c.point.mul_rat_vec(&vr) != vr || c.point.mul(&r.point) != r.point.mul(&c.point) {
            continue;
        }
        // (I - D)(t + λ) = (I - B) d
        let target = id.sub(&c.point).mul_rat_vec(&r.trans);
        let rhs: Vec<Rat> = target
            .iter()
            .zip(i_minus_d.mul_rat_vec(&c.offset))
            .map(|(a, b)| a - b)
            .collect();
        if let Some(l) =
            solve_integer_affine(&i_minus_d, &rhs, &IntLattice::standard(dim)).expect("square")
        {
            gens.push(AffineElement::new(
                c.point.clone(),
                vec_add(&c.offset, &ints_to_rats(&l)),
            ));
        }
    }
    let vp = orth_complement(&n.span(), g.gram());
    for b in crate::ratlin::lattice_intersect_subspace(&IntLattice::standard(dim), &vp).generators()
    {
        gens.push(AffineElement::translation(ints_to_rats(&b)));
    }
    let c = NormalSubgroup::generated_by(g, &gens)
        .map_err(|e| SplitError::Inconsistent(e.to_string()))?;
    let commutes = c
        .generators()
        .iter()
        .all(|x| n.generators().iter().all(|y| x.mul(y) == y.mul(x)));
    let sigma0 = normsub::complete_normal_from_subspace(g, &vp).ok_or_else(|| {
        SplitError::Inconsistent("orthogonal complement is not admissible".into())
    })?;
    if !commutes || *sigma0 != c {
        return Err(SplitError::Inconsistent(
            "centralizer is not the orthogonal complete subgroup".into(),
        ));
    }
    if fiberclass::index_kn(g, n, &sigma0) == Int::from(1) {
        return Ok(DihedralSplit::DirectProduct { sigma: sigma0 });
    }
    let qs = quotient_group(g, &sigma0)?;
    if fiberclass::classify(&qs.group)? != fiberclass::OrbifoldClass::Interval && g.dim() == 2 {
        return Err(SplitError::Inconsistent(
            "quotient by the centralizer is not dihedral".into(),
        ));
    }
    let witness = find_complement(g, n)?
        .ok_or_else(|| SplitError::Inconsistent("dihedral extension without complement".into()))?;
    Ok(DihedralSplit::IndexTwo { sigma0, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupcore::close_generators;
    use crate::ratlin::{int_vec, GramForm, Subspace};
    use crate::symparse::parse_symop;

    fn group(dim: usize, ops: &[&str]) -> Arc<SpaceGroup> {
        let gens: Vec<_> = ops.iter().map(|s| parse_symop(s, dim).unwrap()).collect();
        Arc::new(
            close_generators(dim, &GramForm::identity(dim), &gens, "test")
                .unwrap()
                .group,
        )
    }

    fn sub(g: &Arc<SpaceGroup>, v: &[i64]) -> CompleteNormalSubgroup {
        normsub::complete_normal_from_subspace(g, &Subspace::span_int(v.len(), &[int_vec(v)]))
            .unwrap()
    }

    #[test]
    fn presentations() {
        let c = group(1, &[]);
        let p = present_group(&c);
        assert_eq!(p.generators.len(), 1);
        assert!(p.relators.is_empty());
        let d = group(1, &["-x"]);
        let p = present_group(&d);
        assert_eq!(p.generators.len(), 2);
        assert!(p.relators.contains(&vec![(1, 2)]));
        assert!(p.verify());
        let p2 = group(2, &["-x,-y"]);
        let p = present_group(&p2);
        assert_eq!(p.generators.len(), 3);
        assert!(p.verify());
    }

    #[test]
    fn pm_splits_over_center() {
        let pm = group(2, &["x,-y"]);
        let n = sub(&pm, &[1, 0]);
        let w = find_complement(&pm, &n).unwrap().unwrap();
        let q = quotient_group(&pm, &n).unwrap();
        assert!(verify_witness(&q, &w, 4));
    }

    #[test]
    fn pg_does_not_split_over_center() {
        let pg = group(2, &["x+1/2,-y"]);
        assert!(find_complement(&pg, &sub(&pg, &[1, 0])).unwrap().is_none());
        let q = quotient_group(&pg, &sub(&pg, &[0, 1])).unwrap();
        assert!(splits_trivially_over_circle(&q));
        assert!(find_complement_in(&q).unwrap().is_some());
    }

    #[test]
    fn it113_plane_does_not_split() {
        let g = group(3, &["-x+1/2,-y+1/2,z", "y+1/2,-x,-z", "-x,y+1/2,-z"]);
        let n = normsub::complete_normal_from_subspace(
            &g,
            &Subspace::span_int(3, &[int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0])]),
        )
        .unwrap();
        assert!(find_complement(&g, &n).unwrap().is_none());
        let k = sub(&g, &[0, 0, 1]);
        let w = find_complement(&g, &k).unwrap().unwrap();
        assert!(verify_witness(&quotient_group(&g, &k).unwrap(), &w, 3));
    }

    #[test]
    fn direct_products() {
        let p1 = group(2, &[]);
        assert!(is_direct_product(
            &p1,
            &sub(&p1, &[1, 0]),
            &sub(&p1, &[0, 1])
        ));
        let pm = group(2, &["x,-y"]);
        assert!(is_direct_product(
            &pm,
            &sub(&pm, &[1, 0]),
            &sub(&pm, &[0, 1])
        ));
        let cm = group(2, &["y,x"]);
        assert!(!is_direct_product(
            &cm,
            &sub(&cm, &[1, 1]),
            &sub(&cm, &[1, -1])
        ));
    }

    #[test]
    fn dihedral_branches() {
        let pm = group(2, &["x,-y"]);
        match dihedral_split_structure(&pm, &sub(&pm, &[0, 1])).unwrap() {
            DihedralSplit::DirectProduct { sigma } => {
                assert_eq!(sigma.span(), sub(&pm, &[1, 0]).span())
            }
            other => panic!("{other:?}"),
        }
        let cm = group(2, &["y,x"]);
        match dihedral_split_structure(&cm, &sub(&cm, &[1, -1])).unwrap() {
            DihedralSplit::IndexTwo { sigma0, .. } => {
                assert_eq!(
                    sigma0.trans_lattice(),
                    &IntLattice::from_generators(2, &[int_vec(&[1, 1])])
                )
            }
            other => panic!("{other:?}"),
        }
        let cmm = group(2, &["-x,-y", "y,x"]);
        assert!(dihedral_split_structure(&cmm, &sub(&cmm, &[1, -1])).is_ok());
        assert!(matches!(
            dihedral_split_structure(&pm, &sub(&pm, &[1, 0])),
            Err(SplitError::NotDihedral)
        ));
    }
}
