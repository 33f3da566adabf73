//! Quotients `Γ/N`, classification of 1- and 2-dimensional flat orbifolds,
//! and the fibration records pairing a line with its orthogonal dual.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groupcore::{close_generators, AffineElement, GroupError, SpaceGroup};
use crate::normsub::{self, CompleteNormalSubgroup, SubgroupError};
use crate::ratlin::{
    ints_to_rats, lattice_intersect_subspace, orth_complement, rational_lattice_basis,
    solve_integer_affine, solve_integer_affine_rat, to_u64, vec_add, vec_sub, GramForm, Int,
    IntLattice, IntMat, LinAlgError, Rat, RatMat, Subspace,
};
use crate::splitter::{self, SplitError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiberError {
    #[error("quotient of dimension {0} is not supported here")]
    Dimension(usize),
    #[error("induced action is not effective: {0}")]
    NotEffective(String),
    #[error("subgroup has no orthogonal dual")]
    NoDual,
    #[error("could not classify: {0}")]
    Unclassifiable(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    Subgroup(#[from] SubgroupError),
    #[error(transparent)]
    Split(#[from] Box<SplitError>),
}

impl From<SplitError> for FiberError {
    fn from(e: SplitError) -> Self {
        FiberError::Split(Box::new(e))
    }
}

/// The 17 plane groups in IT order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Wallpaper {
    P1,
    P2,
    Pm,
    Pg,
    Cm,
    Pmm,
    Pmg,
    Pgg,
    Cmm,
    P4,
    P4m,
    P4g,
    P3,
    P3m1,
    P31m,
    P6,
    P6m,
}

const WALLPAPER: [(Wallpaper, &str, &str); 17] = [
    (Wallpaper::P1, "o", "p1"),
    (Wallpaper::P2, "2222", "p2"),
    (Wallpaper::Pm, "**", "pm"),
    (Wallpaper::Pg, "xx", "pg"),
    (Wallpaper::Cm, "*x", "cm"),
    (Wallpaper::Pmm, "*2222", "pmm"),
    (Wallpaper::Pmg, "22*", "pmg"),
    (Wallpaper::Pgg, "22x", "pgg"),
    (Wallpaper::Cmm, "2*22", "cmm"),
    (Wallpaper::P4, "442", "p4"),
    (Wallpaper::P4m, "*442", "p4m"),
    (Wallpaper::P4g, "4*2", "p4g"),
    (Wallpaper::P3, "333", "p3"),
    (Wallpaper::P3m1, "*333", "p3m1"),
    (Wallpaper::P31m, "3*3", "p31m"),
    (Wallpaper::P6, "632", "p6"),
    (Wallpaper::P6m, "*632", "p6m"),
];

impl Wallpaper {
    pub const ALL: [Wallpaper; 17] = [
        Wallpaper::P1,
        Wallpaper::P2,
        Wallpaper::Pm,
        Wallpaper::Pg,
        Wallpaper::Cm,
        Wallpaper::Pmm,
        Wallpaper::Pmg,
        Wallpaper::Pgg,
        Wallpaper::Cmm,
        Wallpaper::P4,
        Wallpaper::P4m,
        Wallpaper::P4g,
        Wallpaper::P3,
        Wallpaper::P3m1,
        Wallpaper::P31m,
        Wallpaper::P6,
        Wallpaper::P6m,
    ];

    pub fn it_number(self) -> u32 {
        self as u32 + 1
    }

    pub fn from_it_number(it: u32) -> Option<Wallpaper> {
        Self::ALL.get((it as usize).checked_sub(1)?).copied()
    }

    /// Conway symbol, with `x` for the cross.
    pub fn conway(self) -> &'static str {
        WALLPAPER[self as usize].1
    }

    pub fn short_name(self) -> &'static str {
        WALLPAPER[self as usize].2
    }

    /// Accepts `x` or `×` for crosses and `o`, `∘` or `○` for the torus.
    pub fn from_conway(s: &str) -> Option<Wallpaper> {
        let norm: String = s
            .trim()
            .chars()
            .map(|c| match c {
                '×' => 'x',
                '∘' | '○' => 'o',
                '∗' => '*',
                c => c,
            })
            .collect();
        WALLPAPER.iter().find(|w| w.1 == norm).map(|w| w.0)
    }
}

/// Flat orbifolds of dimension at most two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrbifoldClass {
    Point,
    Circle,
    Interval,
    Wallpaper(Wallpaper),
}

impl OrbifoldClass {
    pub fn symbol(&self) -> &'static str {
        match self {
            OrbifoldClass::Point => "pt",
            OrbifoldClass::Circle => "O",
            OrbifoldClass::Interval => "I",
            OrbifoldClass::Wallpaper(w) => w.conway(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            OrbifoldClass::Point => 0,
            OrbifoldClass::Circle | OrbifoldClass::Interval => 1,
            OrbifoldClass::Wallpaper(_) => 2,
        }
    }

    pub fn from_symbol(s: &str) -> Option<OrbifoldClass> {
        match s.trim() {
            "pt" => Some(OrbifoldClass::Point),
            "O" | "circle" => Some(OrbifoldClass::Circle),
            "I" | "interval" => Some(OrbifoldClass::Interval),
            other => Wallpaper::from_conway(other).map(OrbifoldClass::Wallpaper),
        }
    }
}

impl fmt::Display for OrbifoldClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for OrbifoldClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        OrbifoldClass::from_symbol(s).ok_or_else(|| format!("unknown orbifold symbol '{s}'"))
    }
}

impl Ord for OrbifoldClass {
    fn cmp(&self, other: &Self) -> Ordering {
        self.symbol().cmp(other.symbol())
    }
}

impl PartialOrd for OrbifoldClass {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for OrbifoldClass {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.symbol())
    }
}

impl<'de> Deserialize<'de> for OrbifoldClass {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `Γ/N` acting on `E^n/V`, in an integral basis of its translation lattice.
#[derive(Clone, Debug)]
pub struct QuotientGroup {
    pub group: Arc<SpaceGroup>,
    kernel: CompleteNormalSubgroup,
    /// `x -> quotient coordinates`; integral on `Z^n`.
    proj: RatMat,
    /// Quotient coordinates back to a section in `V^perp`.
    lift: RatMat,
    coset_map: Vec<usize>,
}

fn orth_basis(v: &Subspace, gram: &GramForm) -> RatMat {
    let vp = orth_complement(v, gram);
    RatMat::from_columns(v.ambient(), vp.basis())
}

pub fn quotient_group(
    g: &Arc<SpaceGroup>,
    n: &CompleteNormalSubgroup,
) -> Result<QuotientGroup, FiberError> {
    let v = n.span();
    let dim = g.dim();
    let m = dim - v.dim();
    if m == 0 {
        return Err(FiberError::Dimension(0));
    }
    let gm = g.gram().matrix();
    let w = orth_basis(&v, g.gram());
    let wgw = w.transpose().mul(gm).mul(&w);
    let a = wgw.inverse()?.mul(&w.transpose()).mul(gm);
    let m0 = rational_lattice_basis(m, &a.columns()).expect("projection of Z^n spans");
    let m0_inv = m0.inverse()?;
    let proj0 = m0_inv.mul(&a);
    let lift0 = w.mul(&m0);
    let gram0 = GramForm::new(m0.transpose().mul(&wgw).mul(&m0))?;
    let mut images = Vec::new();
    for c in g.cosets() {
        let p = proj0
            .mul(&c.point.to_rat())
            .mul(&lift0)
            .to_int()
            .ok_or_else(|| {
                FiberError::NotEffective("projected point part is not integral".into())
            })?;
        images.push(AffineElement::new(p, proj0.mul_vec(&c.offset)));
    }
    let closure = close_generators(m, &gram0, &images, "derived")?;
    let m1_inv = closure.basis.inverse()?;
    let proj = m1_inv.mul(&proj0);
    let lift = lift0.mul(&closure.basis);
    let group = Arc::new(closure.group);
    let mut coset_map = Vec::with_capacity(g.order());
    for c in g.cosets() {
        let p = proj
            .mul(&c.point.to_rat())
            .mul(&lift)
            .to_int()
            .expect("integral in the final basis");
        coset_map.push(
            group
                .coset_index(&p)
                .expect("image point lies in the quotient"),
        );
    }
    let q = QuotientGroup {
        group,
        kernel: n.clone(),
        proj,
        lift,
        coset_map,
    };
    q.check_effective()?;
    Ok(q)
}

impl QuotientGroup {
    pub fn kernel(&self) -> &CompleteNormalSubgroup {
        &self.kernel
    }

    pub fn parent(&self) -> &Arc<SpaceGroup> {
        self.kernel.parent()
    }

    pub fn proj(&self) -> &RatMat {
        &self.proj
    }

    pub fn lift(&self) -> &RatMat {
        &self.lift
    }

    /// Quotient coset of each parent coset.
    pub fn coset_map(&self) -> &[usize] {
        &self.coset_map
    }

    pub fn image(&self, x: &AffineElement) -> AffineElement {
        let p = self
            .proj
            .mul(&x.point.to_rat())
            .mul(&self.lift)
            .to_int()
            .expect("integral");
        AffineElement::new(p, self.proj.mul_vec(&x.trans))
    }

    /// Some element of `Γ` mapping to `y`, taken from the first parent coset that works.
    pub fn preimage(&self, y: &AffineElement) -> Option<AffineElement> {
        let g = self.parent();
        let target = self.group.coset_index(&y.point)?;
        let std = IntLattice::standard(g.dim());
        for (i, c) in g.cosets().iter().enumerate() {
            if self.coset_map[i] != target {
                continue;
            }
            let rhs = vec_sub(&y.trans, &self.proj.mul_vec(&c.offset));
            if let Some(l) =
                solve_integer_affine_rat(&self.proj, &rhs, &std).expect("dimensions agree")
            {
                return Some(AffineElement::new(
                    c.point.clone(),
                    vec_add(&c.offset, &ints_to_rats(&l)),
                ));
            }
        }
        None
    }

    /// Elements of `Γ` acting trivially on `E^n/V` lie in `N`.
    fn check_effective(&self) -> Result<(), FiberError> {
        let g = self.parent();
        let std = IntLattice::standard(g.dim());
        let phi = self.kernel.point_group();
        for (i, c) in g.cosets().iter().enumerate() {
            if self.coset_map[i] != 0 {
                continue;
            }
            let rhs: Vec<Rat> = self
                .proj
                .mul_vec(&c.offset)
                .into_iter()
                .map(|x| -x)
                .collect();
            let hit = solve_integer_affine_rat(&self.proj, &rhs, &std)?.is_some();
            if hit && !phi.contains(&c.point) {
                return Err(FiberError::NotEffective(format!(
                    "{} acts trivially but is not in N",
                    c.rep()
                )));
            }
        }
        Ok(())
    }

    /// `Ψ`: parent point-group elements acting trivially on the quotient's point group.
    pub fn psi(&self) -> Vec<usize> {
        (0..self.coset_map.len())
            .filter(|&i| self.coset_map[i] == 0)
            .collect()
    }

    /// `Φ` as parent coset indices.
    pub fn phi(&self) -> Vec<usize> {
        let g = self.parent();
        self.kernel
            .point_group()
            .iter()
            .map(|p| g.coset_index(p).expect("subgroup of Π"))
            .collect()
    }

    /// `Φ ⊴ Ψ ⊴ Π`, and `|Π/Ψ|` equals the quotient's point-group order.
    pub fn check_point_chain(&self) -> bool {
        let g = self.parent();
        let phi = self.phi();
        let psi = self.psi();
        let is_normal_subgroup = |h: &[usize], within: &[usize]| {
            h.iter().all(|a| within.contains(a))
                && h.iter()
                    .all(|&a| h.iter().all(|&b| h.contains(&g.point_mul(a, b))))
                && within.iter().all(|&x| {
                    let xi = g.point_inverse(x);
                    h.iter()
                        .all(|&a| h.contains(&g.point_mul(g.point_mul(x, a), xi)))
                })
        };
        let all: Vec<usize> = (0..g.order()).collect();
        is_normal_subgroup(&phi, &psi)
            && is_normal_subgroup(&psi, &all)
            && g.order() == psi.len() * self.group.order()
    }
}

/// Circle or interval.
pub fn classify_1d(g: &SpaceGroup) -> Result<OrbifoldClass, FiberError> {
    if g.dim() != 1 {
        return Err(FiberError::Dimension(g.dim()));
    }
    match g.order() {
        1 => Ok(OrbifoldClass::Circle),
        2 => Ok(OrbifoldClass::Interval),
        h => Err(FiberError::Unclassifiable(format!(
            "1-dimensional point group of order {h}"
        ))),
    }
}

fn centered(r: &IntMat) -> bool {
    let n = r.rows();
    let ipr = IntMat::identity(n).add(r);
    let image = IntLattice::from_matrix(&ipr);
    let fix = lattice_intersect_subspace(
        &IntLattice::standard(n),
        &Subspace::span(n, &ipr.to_rat().columns()),
    );
    image == fix
}

/// Some element of the coset `(R, t + Z^2)` is an involution.
fn has_true_reflection(r: &IntMat, t: &[Rat]) -> bool {
    let ipr = IntMat::identity(r.rows()).add(r);
    let rhs: Vec<Rat> = ipr.mul_rat_vec(t).into_iter().map(|x| -x).collect();
    solve_integer_affine(&ipr, &rhs, &IntLattice::standard(r.rows()))
        .expect("square system")
        .is_some()
}

/// Some rotation center of maximal order is fixed by no reflection.
fn has_cone_point(g: &SpaceGroup, rot: usize) -> Result<bool, FiberError> {
    let c = &g.cosets()[rot];
    let i_minus = IntMat::identity(2).sub(&c.point).to_rat().inverse()?;
    let refl: Vec<_> = g
        .cosets()
        .iter()
        .filter(|c| c.point.det() == -Int::one())
        .collect();
    for a in -2i64..=2 {
        for b in -2i64..=2 {
            let t = vec_add(&c.offset, &ints_to_rats(&[Int::from(a), Int::from(b)]));
            let x = i_minus.mul_vec(&t);
            let on_mirror = refl.iter().any(|r| {
                let d = vec_sub(&vec_sub(&x, &r.point.mul_rat_vec(&x)), &r.offset);
                d.iter().all(|v| v.is_integer())
            });
            if !on_mirror {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Plane-group type from basis-independent invariants.
pub fn classify_2d(g: &SpaceGroup) -> Result<OrbifoldClass, FiberError> {
    if g.dim() != 2 {
        return Err(FiberError::Dimension(g.dim()));
    }
    let mut max_rot = 1;
    let mut rot_idx = 0;
    let mut reflections = Vec::new();
    for (i, c) in g.cosets().iter().enumerate() {
        if c.point.det().is_one() {
            let o = c
                .point
                .order(12)
                .ok_or_else(|| FiberError::Unclassifiable("rotation of large order".into()))?;
            if o > max_rot {
                max_rot = o;
                rot_idx = i;
            }
        } else {
            reflections.push(i);
        }
    }
    use Wallpaper::*;
    let w = if reflections.is_empty() {
        match max_rot {
            1 => P1,
            2 => P2,
            3 => P3,
            4 => P4,
            6 => P6,
            r => return Err(FiberError::Unclassifiable(format!("rotation order {r}"))),
        }
    } else {
        let true_refl = reflections
            .iter()
            .filter(|&&i| has_true_reflection(&g.cosets()[i].point, &g.cosets()[i].offset))
            .count();
        let first = &g.cosets()[reflections[0]].point;
        match max_rot {
            1 => {
                if centered(first) {
                    Cm
                } else if true_refl > 0 {
                    Pm
                } else {
                    Pg
                }
            }
            2 => {
                if centered(first) {
                    Cmm
                } else {
                    match true_refl {
                        2 => Pmm,
                        1 => Pmg,
                        _ => Pgg,
                    }
                }
            }
            3 => {
                if has_cone_point(g, rot_idx)? {
                    P31m
                } else {
                    P3m1
                }
            }
            4 => {
                if has_cone_point(g, rot_idx)? {
                    P4g
                } else {
                    P4m
                }
            }
            6 => P6m,
            r => return Err(FiberError::Unclassifiable(format!("rotation order {r}"))),
        }
    };
    Ok(OrbifoldClass::Wallpaper(w))
}

/// `N` as a space group acting on its own span.
pub fn restrict_to_span(n: &CompleteNormalSubgroup) -> Result<SpaceGroup, FiberError> {
    let g = n.parent();
    let k = n.dim();
    let b = n.trans_lattice().basis().to_rat();
    let gm = g.gram().matrix();
    let btg = b.transpose().mul(gm);
    let gram_k = btg.mul(&b);
    let coords = gram_k.inverse()?.mul(&btg);
    let mut elems = Vec::new();
    for c in n.cosets() {
        let p = coords
            .mul(&c.point.to_rat())
            .mul(&b)
            .to_int()
            .ok_or_else(|| {
                FiberError::NotEffective("point part does not preserve the subgroup lattice".into())
            })?;
        elems.push(AffineElement::new(p, coords.mul_vec(&c.offset)));
    }
    let closure = close_generators(k, &GramForm::new(gram_k)?, &elems, "derived")?;
    Ok(closure.group)
}

/// Class of `V/N`; `None` for 3-dimensional `V`.
pub fn classify_on_span(n: &CompleteNormalSubgroup) -> Result<Option<OrbifoldClass>, FiberError> {
    match n.dim() {
        0 => Ok(Some(OrbifoldClass::Point)),
        1 => Ok(Some(classify_1d(&restrict_to_span(n)?)?)),
        2 => Ok(Some(classify_2d(&restrict_to_span(n)?)?)),
        _ => Ok(None),
    }
}

pub fn classify(g: &SpaceGroup) -> Result<OrbifoldClass, FiberError> {
    match g.dim() {
        1 => classify_1d(g),
        2 => classify_2d(g),
        d => Err(FiberError::Dimension(d)),
    }
}

/// `[Γ : KN]` for a dual pair.
pub fn index_kn(g: &SpaceGroup, k: &CompleteNormalSubgroup, n: &CompleteNormalSubgroup) -> Int {
    let phi_k: Vec<usize> = k
        .point_group()
        .iter()
        .map(|p| g.coset_index(p).expect("in Π"))
        .collect();
    let phi_n: Vec<usize> = n
        .point_group()
        .iter()
        .map(|p| g.coset_index(p).expect("in Π"))
        .collect();
    let mut prod: Vec<usize> = phi_k
        .iter()
        .flat_map(|&a| phi_n.iter().map(move |&b| (a, b)))
        .map(|(a, b)| g.point_mul(a, b))
        .collect();
    prod.sort_unstable();
    prod.dedup();
    let point_index = g.order() / prod.len();
    let lat = k.trans_lattice().sum(n.trans_lattice());
    let lat_index = lat.index().expect("dual spans are complementary");
    lat_index * Int::from(point_index)
}

/// One row: a line `K` and its dual `N`.
#[derive(Clone, Debug)]
pub struct FibrationRecord {
    pub group_id: String,
    pub k: CompleteNormalSubgroup,
    pub n: CompleteNormalSubgroup,
    /// Class of `V_K/K`.
    pub seifert_fiber: OrbifoldClass,
    /// Class of the base `Γ/K`.
    pub seifert_base: OrbifoldClass,
    pub seifert_split: bool,
    /// Class of `V_N/N`.
    pub cofiber: OrbifoldClass,
    /// Class of `Γ/N`.
    pub base: OrbifoldClass,
    pub coseifert_split: bool,
    pub index: u64,
}

/// Ordering and dedupe key of a record.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecordKey {
    pub cofiber: &'static str,
    pub base: &'static str,
    pub seifert_split: bool,
    pub coseifert_split: bool,
    pub index: u64,
    pub seifert_fiber: &'static str,
    pub seifert_base: &'static str,
}

/// Serializable form of a record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordSummary {
    pub group: String,
    pub seifert_fiber: OrbifoldClass,
    pub seifert_base: OrbifoldClass,
    pub seifert_split: bool,
    pub cofiber: OrbifoldClass,
    pub base: OrbifoldClass,
    pub coseifert_split: bool,
    pub index: u64,
    pub k_span: String,
    pub n_span: String,
}

impl FibrationRecord {
    pub fn key(&self) -> RecordKey {
        RecordKey {
            cofiber: self.cofiber.symbol(),
            base: self.base.symbol(),
            seifert_split: self.seifert_split,
            coseifert_split: self.coseifert_split,
            index: self.index,
            seifert_fiber: self.seifert_fiber.symbol(),
            seifert_base: self.seifert_base.symbol(),
        }
    }

    pub fn summary(&self) -> RecordSummary {
        RecordSummary {
            group: self.group_id.clone(),
            seifert_fiber: self.seifert_fiber,
            seifert_base: self.seifert_base,
            seifert_split: self.seifert_split,
            cofiber: self.cofiber,
            base: self.base,
            coseifert_split: self.coseifert_split,
            index: self.index,
            k_span: self.k.span().to_string(),
            n_span: self.n.span().to_string(),
        }
    }
}

fn class_of(n: &CompleteNormalSubgroup) -> Result<OrbifoldClass, FiberError> {
    classify_on_span(n)?.ok_or(FiberError::Dimension(n.dim()))
}

/// Build the record for a 1-dimensional complete normal subgroup.
pub fn fibration_record(
    g: &Arc<SpaceGroup>,
    k: &CompleteNormalSubgroup,
) -> Result<FibrationRecord, FiberError> {
    let n = normsub::orthogonal_dual(k).ok_or(FiberError::NoDual)?;
    let qk = quotient_group(g, k)?;
    let qn = quotient_group(g, &n)?;
    let index = to_u64(&index_kn(g, k, &n)).expect("small index");
    Ok(FibrationRecord {
        group_id: g.provenance().to_string(),
        seifert_fiber: class_of(k)?,
        seifert_base: classify(&qk.group)?,
        seifert_split: splitter::find_complement_in(&qk)?.is_some(),
        cofiber: class_of(&n)?,
        base: classify_1d(&qn.group)?,
        coseifert_split: splitter::find_complement_in(&qn)?.is_some(),
        index,
        k: k.clone(),
        n,
    })
}

/// Conjugation-invariant data of the pair `(Π, K)`: for every point
/// operation its determinant, trace and sign on the line `V_K`.
fn line_character(g: &SpaceGroup, k: &CompleteNormalSubgroup) -> Vec<(Int, Int, bool)> {
    let span = k.span();
    let v = &span.basis()[0];
    let mut out: Vec<(Int, Int, bool)> = g
        .cosets()
        .iter()
        .map(|c| {
            let p = &c.point;
            let trace = (0..p.rows()).map(|i| p.get(i, i).clone()).sum();
            (p.det(), trace, &p.mul_rat_vec(v) == v)
        })
        .collect();
    out.sort();
    out
}

/// Lines of an eigenspace of dimension at least two form an infinite family.
fn in_family(eigen: &[Subspace], k: &CompleteNormalSubgroup) -> bool {
    let span = k.span();
    eigen
        .iter()
        .any(|e| e.dim() >= 2 && e.contains_subspace(&span))
}

/// Grouping of records: family lines by the class of their dual `N` and the
/// character of `Π` on `V_K`, isolated lines by their full key.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum RowClass {
    Family(OrbifoldClass, OrbifoldClass, bool, Vec<(Int, Int, bool)>),
    Isolated(RecordKey),
}

/// All fibration classes of `g`, in key order. Each class is represented by
/// its record of smallest index.
pub fn fibration_rows(g: &Arc<SpaceGroup>, bound: u32) -> Result<Vec<FibrationRecord>, FiberError> {
    let eigen = normsub::sign_eigenspaces(g);
    let mut best: BTreeMap<RowClass, FibrationRecord> = BTreeMap::new();
    for k in normsub::enumerate_complete_normal(g, &[1], bound)? {
        let r = fibration_record(g, &k)?;
        let class = if in_family(&eigen, &k) {
            RowClass::Family(r.cofiber, r.base, r.coseifert_split, line_character(g, &k))
        } else {
            RowClass::Isolated(r.key())
        };
        match best.get(&class) {
            Some(b) if (b.index, b.key()) <= (r.index, r.key()) => {}
            _ => {
                best.insert(class, r);
            }
        }
    }
    let mut rows: Vec<FibrationRecord> = best.into_values().collect();
    rows.sort_by_key(|r| r.key());
    Ok(rows)
}
