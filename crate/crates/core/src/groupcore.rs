//! Space groups in lattice coordinates: affine elements, coset tables and the
//! intrinsic invariants (center, transfer, first Betti number).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fiberclass::{self, OrbifoldClass};
use crate::normsub::{self, CompleteNormalSubgroup};
use crate::ratlin::{
    frac_vec, ints_to_rats, is_integral, lattice_intersect_subspace, orth_complement,
    rational_lattice_basis, snf, to_int_vec, vec_add, vec_sub, GramForm, Int, IntLattice, IntMat,
    LinAlgError, Rat, RatMat, Subspace,
};
use crate::symparse::{format_symop, CatalogEntry, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("point group not finite (closure exceeded {0} cosets)")]
    PointGroupNotFinite(usize),
    #[error("Gram form not preserved by {0}")]
    GramNotPreserved(String),
    #[error("point part of {0} is not unimodular")]
    NotUnimodular(String),
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

/// `x -> point * x + trans`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineElement {
    pub point: IntMat,
    pub trans: Vec<Rat>,
}

impl AffineElement {
    pub fn new(point: IntMat, trans: Vec<Rat>) -> Self {
        assert_eq!(point.rows(), trans.len());
        AffineElement { point, trans }
    }

    pub fn identity(n: usize) -> Self {
        AffineElement {
            point: IntMat::identity(n),
            trans: vec![Rat::zero(); n],
        }
    }

    pub fn translation(v: Vec<Rat>) -> Self {
        AffineElement {
            point: IntMat::identity(v.len()),
            trans: v,
        }
    }

    pub fn dim(&self) -> usize {
        self.trans.len()
    }

    pub fn is_identity(&self) -> bool {
        self.point.is_identity() && self.trans.iter().all(Zero::is_zero)
    }

    pub fn is_translation(&self) -> bool {
        self.point.is_identity()
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn mul(&self, other: &AffineElement) -> AffineElement {
        AffineElement {
            point: self.point.mul(&other.point),
            trans: vec_add(&self.trans, &self.point.mul_rat_vec(&other.trans)),
        }
    }

    pub fn inverse(&self) -> AffineElement {
        let inv = self
            .point
            .inverse_unimodular()
            .expect("unimodular point part");
        let t = inv
            .mul_rat_vec(&self.trans)
            .into_iter()
            .map(|x| -x)
            .collect();
        AffineElement {
            point: inv,
            trans: t,
        }
    }

    /// `h * self * h^-1`
    pub fn conjugate_by(&self, h: &AffineElement) -> AffineElement {
        h.mul(self).mul(&h.inverse())
    }

    pub fn pow(&self, k: i64) -> AffineElement {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = AffineElement::identity(self.dim());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn act(&self, x: &[Rat]) -> Vec<Rat> {
        vec_add(&self.point.mul_rat_vec(x), &self.trans)
    }
}

/// `h g h^-1`
pub fn conjugate(g: &AffineElement, h: &AffineElement) -> AffineElement {
    g.conjugate_by(h)
}

impl fmt::Debug for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", format_symop(self))
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_symop(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coset {
    pub point: IntMat,
    /// Offset reduced into `[0,1)^n`.
    pub offset: Vec<Rat>,
}

impl Coset {
    pub fn rep(&self) -> AffineElement {
        AffineElement::new(self.point.clone(), self.offset.clone())
    }
}

/// `(P, t_P + lambda)`
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElementRef {
    pub coset: usize,
    pub shift: Vec<Int>,
}

#[derive(Clone, Serialize, Deserialize)]
pub struct SpaceGroup {
    dim: usize,
    gram: GramForm,
    cosets: Vec<Coset>,
    provenance: String,
    #[serde(skip)]
    lookup: HashMap<IntMat, usize>,
    #[serde(skip)]
    table: Vec<Vec<usize>>,
}

impl PartialEq for SpaceGroup {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.gram == other.gram && self.cosets == other.cosets
    }
}

impl fmt::Debug for SpaceGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceGroup")
            .field("dim", &self.dim)
            .field("provenance", &self.provenance)
            .field(
                "cosets",
                &self.cosets.iter().map(Coset::rep).collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// Result of closing a generating set: the group in a basis of its
/// translation lattice, and that basis in the original coordinates.
#[derive(Debug, Clone)]
pub struct Closure {
    pub group: SpaceGroup,
    pub basis: RatMat,
}

fn order_bound(dim: usize) -> usize {
    48 * dim.max(1)
}

fn check_generator(g: &AffineElement, gram: &GramForm) -> Result<(), GroupError> {
    let d = g.point.det();
    if !d.abs().is_one() {
        return Err(GroupError::NotUnimodular(format_symop(g)));
    }
    if !gram.preserved_by(&g.point) {
        return Err(GroupError::GramNotPreserved(format_symop(g)));
    }
    Ok(())
}

/// Close `gens` together with the translations of `Z^dim` into a space group.
/// Pure translations found along the way enlarge the lattice; the result is
/// rewritten in an HNF basis of the final translation lattice.
pub fn close_generators(
    dim: usize,
    gram: &GramForm,
    gens: &[AffineElement],
    provenance: &str,
) -> Result<Closure, GroupError> {
    if gram.dim() != dim {
        return Err(GroupError::Dimension(format!(
            "gram is {}-dimensional, group {dim}",
            gram.dim()
        )));
    }
    for g in gens {
        if g.dim() != dim || g.point.cols() != dim {
            return Err(GroupError::Dimension(format!(
                "generator {g:?} in dimension {dim}"
            )));
        }
        check_generator(g, gram)?;
    }
    let bound = order_bound(dim);
    let mut lattice_gens: Vec<Vec<Rat>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    for _ in 0..256 {
        let basis = rational_lattice_basis(dim, &lattice_gens).expect("contains Z^n");
        let inv = basis.inverse()?;
        let reduce = |t: &[Rat]| basis.mul_vec(&frac_vec(&inv.mul_vec(t)));
        let mut elems: Vec<(IntMat, Vec<Rat>)> =
            vec![(IntMat::identity(dim), vec![Rat::zero(); dim])];
        let mut index: HashMap<IntMat, usize> = HashMap::new();
        index.insert(IntMat::identity(dim), 0);
        let mut conflict = None;
        let mut i = 0;
        'outer: while i < elems.len() {
            for g in gens {
                let (p, t) = &elems[i];
                let point = p.mul(&g.point);
                let trans = reduce(&vec_add(t, &p.mul_rat_vec(&g.trans)));
                match index.get(&point) {
                    Some(&j) => {
                        if elems[j].1 != trans {
                            conflict = Some(vec_sub(&trans, &elems[j].1));
                            break 'outer;
                        }
                    }
                    None => {
                        if elems.len() >= bound {
                            return Err(GroupError::PointGroupNotFinite(bound));
                        }
                        index.insert(point.clone(), elems.len());
                        elems.push((point, trans));
                    }
                }
            }
            i += 1;
        }
        if let Some(v) = conflict {
            lattice_gens.push(v);
            continue;
        }
        let mut cosets = Vec::with_capacity(elems.len());
        for (p, t) in &elems {
            let p2 = inv.mul(&p.to_rat()).mul(&basis).to_int().ok_or_else(|| {
                GroupError::NotAGroup(
                    "translation lattice is not invariant under the point group".into(),
                )
            })?;
            cosets.push(Coset {
                point: p2,
                offset: frac_vec(&inv.mul_vec(t)),
            });
        }
        let gram2 = gram.transport(&basis)?;
        let group = SpaceGroup::from_cosets(dim, gram2, cosets, provenance)?;
        return Ok(Closure { group, basis });
    }
    Err(GroupError::NotAGroup(
        "translation lattice did not stabilise".into(),
    ))
}

/// Close the generators of a catalog entry.
pub fn build_group(entry: &CatalogEntry) -> Result<SpaceGroup, GroupError> {
    let gens = entry.elements()?;
    let c = close_generators(entry.id.dim, &entry.gram, &gens, &entry.id.to_string())?;
    Ok(c.group)
}

impl SpaceGroup {
    /// Validate a coset table. The identity coset is moved to the front and
    /// the rest sorted by point matrix.
    pub fn from_cosets(
        dim: usize,
        gram: GramForm,
        mut cosets: Vec<Coset>,
        provenance: &str,
    ) -> Result<SpaceGroup, GroupError> {
        if gram.dim() != dim {
            return Err(GroupError::Dimension("gram".into()));
        }
        cosets.sort_by(|a, b| {
            (!a.point.is_identity(), &a.point).cmp(&(!b.point.is_identity(), &b.point))
        });
        if cosets
            .first()
            .is_none_or(|c| !c.point.is_identity() || c.offset.iter().any(|x| !x.is_zero()))
        {
            return Err(GroupError::NotAGroup("identity coset missing".into()));
        }
        let mut lookup = HashMap::new();
        for (i, c) in cosets.iter().enumerate() {
            if c.point.rows() != dim || c.offset.len() != dim {
                return Err(GroupError::Dimension("coset".into()));
            }
            if c.offset.iter().any(|x| x.is_negative() || *x >= Rat::one()) {
                return Err(GroupError::NotAGroup("offset outside [0,1)".into()));
            }
            check_generator(&c.rep(), &gram)?;
            if lookup.insert(c.point.clone(), i).is_some() {
                return Err(GroupError::NotAGroup("repeated point matrix".into()));
            }
        }
        let h = cosets.len();
        let mut table = vec![vec![0; h]; h];
        for i in 0..h {
            for j in 0..h {
                let p = cosets[i].point.mul(&cosets[j].point);
                let k = *lookup
                    .get(&p)
                    .ok_or_else(|| GroupError::NotAGroup("point group not closed".into()))?;
                let t = vec_add(
                    &cosets[i].offset,
                    &cosets[i].point.mul_rat_vec(&cosets[j].offset),
                );
                if !is_integral(&vec_sub(&t, &cosets[k].offset)) {
                    return Err(GroupError::NotAGroup(
                        "offsets inconsistent with the point group".into(),
                    ));
                }
                table[i][j] = k;
            }
        }
        Ok(SpaceGroup {
            dim,
            gram,
            cosets,
            provenance: provenance.to_string(),
            lookup,
            table,
        })
    }

    fn rebuild_indices(&mut self) {
        if self.lookup.len() == self.cosets.len() {
            return;
        }
        let fresh = SpaceGroup::from_cosets(
            self.dim,
            self.gram.clone(),
            self.cosets.clone(),
            &self.provenance,
        )
        .expect("deserialized group is valid");
        *self = fresh;
    }

    /// Restore lookup tables after deserialization.
    pub fn revalidated(mut self) -> Self {
        self.rebuild_indices();
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> &GramForm {
        &self.gram
    }

    pub fn cosets(&self) -> &[Coset] {
        &self.cosets
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, p: &str) -> Self {
        self.provenance = p.to_string();
        self
    }

    /// Order of the point group.
    pub fn order(&self) -> usize {
        self.cosets.len()
    }

    pub fn point_group(&self) -> Vec<IntMat> {
        self.cosets.iter().map(|c| c.point.clone()).collect()
    }

    pub fn coset_index(&self, p: &IntMat) -> Option<usize> {
        self.lookup.get(p).copied()
    }

    /// Index of the product of two point-group elements.
    pub fn point_mul(&self, i: usize, j: usize) -> usize {
        self.table[i][j]
    }

    pub fn point_inverse(&self, i: usize) -> usize {
        (0..self.order())
            .find(|&j| self.table[i][j] == 0)
            .expect("finite group")
    }

    /// Integer cocycle `t_i + P_i t_j - t_{ij}`.
    pub fn cocycle(&self, i: usize, j: usize) -> Vec<Int> {
        let k = self.table[i][j];
        let t = vec_add(
            &self.cosets[i].offset,
            &self.cosets[i].point.mul_rat_vec(&self.cosets[j].offset),
        );
        to_int_vec(&vec_sub(&t, &self.cosets[k].offset)).expect("validated")
    }

    pub fn coset_rep(&self, i: usize) -> AffineElement {
        self.cosets[i].rep()
    }

    pub fn element(&self, r: &GroupElementRef) -> AffineElement {
        let c = &self.cosets[r.coset];
        AffineElement::new(c.point.clone(), vec_add(&c.offset, &ints_to_rats(&r.shift)))
    }

    pub fn locate(&self, x: &AffineElement) -> Option<GroupElementRef> {
        if x.dim() != self.dim {
            return None;
        }
        let i = self.coset_index(&x.point)?;
        let shift = to_int_vec(&vec_sub(&x.trans, &self.cosets[i].offset))?;
        Some(GroupElementRef { coset: i, shift })
    }

    pub fn contains(&self, x: &AffineElement) -> bool {
        self.locate(x).is_some()
    }

    pub fn translation(&self, i: usize) -> AffineElement {
        let mut v = vec![Rat::zero(); self.dim];
        v[i] = Rat::one();
        AffineElement::translation(v)
    }

    /// A small generating set of the point group, as coset indices.
    pub fn point_generators(&self) -> Vec<usize> {
        let h = self.order();
        let mut gens: Vec<usize> = Vec::new();
        let mut reached = self.generated(&gens);
        while reached.len() < h {
            let best = (1..h)
                .filter(|i| !reached.contains(i))
                .max_by_key(|&i| {
                    let mut trial = gens.clone();
                    trial.push(i);
                    (self.generated(&trial).len(), std::cmp::Reverse(i))
                })
                .expect("missing elements remain");
            gens.push(best);
            reached = self.generated(&gens);
        }
        gens
    }

    /// Point-group elements generated by the given cosets.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut out = vec![0];
        let mut i = 0;
        while i < out.len() {
            for &g in gens {
                let k = self.table[out[i]][g];
                if !seen[k] {
                    seen[k] = true;
                    out.push(k);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// Lattice translations followed by point-group generator representatives.
    pub fn generators(&self) -> Vec<AffineElement> {
        let mut out: Vec<AffineElement> = (0..self.dim).map(|i| self.translation(i)).collect();
        out.extend(
            self.point_generators()
                .into_iter()
                .map(|i| self.coset_rep(i)),
        );
        out
    }
}

/// `{a in Z^n : P a = a for all P}`
pub fn center(g: &SpaceGroup) -> IntLattice {
    lattice_intersect_subspace(&IntLattice::standard(g.dim()), &fixed_subspace(g))
}

/// `Fix(Pi)`
pub fn fixed_subspace(g: &SpaceGroup) -> Subspace {
    let n = g.dim();
    let mut rows = Vec::new();
    for c in g.cosets() {
        let d = c.point.sub(&IntMat::identity(n)).to_rat();
        for i in 0..n {
            rows.push(d.row(i));
        }
    }
    if rows.is_empty() {
        return Subspace::full(n);
    }
    Subspace::span(n, &RatMat::from_rows(&rows).kernel())
}

/// `sum_{A in Pi} A`
pub fn point_sum(g: &SpaceGroup) -> IntMat {
    g.cosets()
        .iter()
        .fold(IntMat::zeros(g.dim(), g.dim()), |acc, c| acc.add(&c.point))
}

/// `tr(b+B) = (sum A) b + I`
pub fn transfer(g: &SpaceGroup, x: &AffineElement) -> AffineElement {
    AffineElement::translation(point_sum(g).mul_rat_vec(&x.trans))
}

/// Kernel of the transfer: the complete normal subgroup over `Fix(Pi)^perp`.
pub fn transfer_kernel(g: &Arc<SpaceGroup>) -> CompleteNormalSubgroup {
    let fix = fixed_subspace(g);
    let s = point_sum(g).to_rat();
    let image = Subspace::span(g.dim(), &s.columns());
    assert_eq!(image, fix, "image of the point sum must be the fixed space");
    let v = orth_complement(&fix, g.gram());
    normsub::complete_normal_from_subspace(g, &v)
        .expect("orthogonal complement of Fix is admissible")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Abelianization {
    pub free_rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<Int>,
}

/// Abelianization from the presentation with generators `t_i` and one `g_P`
/// per coset.
pub fn abelianization(g: &SpaceGroup) -> Abelianization {
    let n = g.dim();
    let h = g.order();
    let cols = n + h;
    let gens = g.point_generators();
    let mut rows: Vec<Vec<Int>> = Vec::new();
    for &s in &gens {
        let p = &g.cosets()[s].point;
        for i in 0..n {
            let mut r = vec![Int::zero(); cols];
            r[i] += Int::one();
            for k in 0..n {
                r[k] -= p.get(k, i);
            }
            rows.push(r);
        }
    }
    // g_P g_s = t^c g_{Ps}
    for p in 0..h {
        for &s in &gens {
            let ps = g.point_mul(p, s);
            let c = g.cocycle(p, s);
            let mut r = vec![Int::zero(); cols];
            r[n + p] += Int::one();
            r[n + s] += Int::one();
            r[n + ps] -= Int::one();
            for k in 0..n {
                r[k] -= &c[k];
            }
            rows.push(r);
        }
    }
    let mut r0 = vec![Int::zero(); cols];
    r0[n] = Int::one();
    rows.push(r0);
    let m = IntMat::from_columns(rows.len(), &transpose_rows(&rows, cols));
    let (d, _, _) = snf(&m);
    let mut rank = 0;
    let mut torsion = Vec::new();
    for i in 0..d.rows().min(d.cols()) {
        let x = d.get(i, i).abs();
        if !x.is_zero() {
            rank += 1;
            if !x.is_one() {
                torsion.push(x);
            }
        }
    }
    Abelianization {
        free_rank: cols - rank,
        torsion,
    }
}

fn transpose_rows(rows: &[Vec<Int>], cols: usize) -> Vec<Vec<Int>> {
    (0..cols)
        .map(|j| rows.iter().map(|r| r[j].clone()).collect())
        .collect()
}

/// First Betti number, as the rank of the center.
pub fn betti1(g: &SpaceGroup) -> usize {
    let b = center(g).rank();
    debug_assert_eq!(b, abelianization(g).free_rank);
    b
}

/// The fibration over the `beta_1`-torus given by the transfer kernel.
#[derive(Debug, Clone)]
pub struct TorusBundle {
    pub kernel: CompleteNormalSubgroup,
    pub base_dim: usize,
    /// Class of `V/N`; `None` when the fiber is 3-dimensional.
    pub fiber: Option<OrbifoldClass>,
}

impl TorusBundle {
    /// Point, circle or 2-torus; `None` for a 3-torus base.
    pub fn base(&self) -> Option<OrbifoldClass> {
        match self.base_dim {
            0 => Some(OrbifoldClass::Point),
            1 => Some(OrbifoldClass::Circle),
            2 => Some(OrbifoldClass::Wallpaper(fiberclass::Wallpaper::P1)),
            _ => None,
        }
    }
}

pub fn torus_bundle_base(g: &Arc<SpaceGroup>) -> Result<TorusBundle, fiberclass::FiberError> {
    let kernel = transfer_kernel(g);
    let z = center(g);
    let gm = g.gram();
    for a in kernel.span().basis() {
        for b in z.generators() {
            assert!(
                gm.inner(a, &ints_to_rats(&b)).is_zero(),
                "transfer kernel must be orthogonal to the center"
            );
        }
    }
    let fiber = fiberclass::classify_on_span(&kernel)?;
    Ok(TorusBundle {
        kernel,
        base_dim: z.rank(),
        fiber,
    })
}
