//! Verification suites shared by the command line and the test targets.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::atlas::Atlas;
use crate::fiberclass::{
    fibration_record, fibration_rows, quotient_group, FiberError, OrbifoldClass,
};
use crate::groupcore::{
    abelianization, center, fixed_subspace, transfer_kernel, AffineElement, SpaceGroup,
};
use crate::normsub::{
    commensurable, enumerate_complete_normal, is_reducible, orthogonal_dual,
    CompleteNormalSubgroup, NormalSubgroup,
};
use crate::oracle::{self, PlaneFibration, RowColumns};
use crate::ratlin::{ints_to_rats, Int, IntLattice};
use crate::splitter::{find_complement_in, verify_witness};
use crate::symparse::GroupId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseReport {
    pub case: String,
    pub passed: bool,
    pub detail: String,
}

impl CaseReport {
    fn new(case: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CaseReport {
            case: case.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for CaseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.case
        )?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub cases: Vec<CaseReport>,
}

impl SuiteReport {
    pub fn new(suite: &str) -> Self {
        SuiteReport {
            suite: suite.to_string(),
            cases: Vec::new(),
        }
    }

    pub fn push(&mut self, c: CaseReport) {
        self.cases.push(c);
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cases {
            writeln!(f, "{c}")?;
        }
        let bad = self.failures().count();
        write!(
            f,
            "suite {}: {} cases, {} failed",
            self.suite,
            self.cases.len(),
            bad
        )
    }
}

fn multiset_diff<T: Ord + Clone + fmt::Debug>(got: &[T], want: &[T]) -> String {
    let mut extra = got.to_vec();
    let mut missing = Vec::new();
    for w in want {
        match extra.iter().position(|x| x == w) {
            Some(i) => {
                extra.remove(i);
            }
            None => missing.push(w.clone()),
        }
    }
    format!("missing {missing:?}, unexpected {extra:?}")
}

/// Compare the computed fibrations of plane group `it` with the reference list.
pub fn plane_case(atlas: &Atlas, it: u32) -> CaseReport {
    let name = format!("2/{it}");
    let want = oracle::plane_fibrations(it);
    let g = match atlas.group(GroupId::new(2, it)) {
        Some(g) => g,
        None => return CaseReport::new(name, false, "missing from atlas"),
    };
    let got = match fibration_rows(&g, 2) {
        Ok(rows) => {
            let mut v: Vec<PlaneFibration> = rows.iter().map(PlaneFibration::of).collect();
            v.sort();
            v
        }
        Err(e) => return CaseReport::new(name, false, e.to_string()),
    };
    if got == want {
        CaseReport::new(name, true, format!("{} fibrations", got.len()))
    } else {
        CaseReport::new(name, false, multiset_diff(&got, &want))
    }
}

pub fn suite_2d(atlas: &Atlas) -> SuiteReport {
    let mut r = SuiteReport::new("2d");
    for it in 1..=17 {
        r.push(plane_case(atlas, it));
    }
    r
}

/// Computed columns for space group `it`, sorted.
pub fn table1_columns(atlas: &Atlas, it: u32, bound: u32) -> Result<Vec<RowColumns>, FiberError> {
    let id = atlas
        .resolve(&format!("3/{it}"))
        .map_err(|_| FiberError::Unclassifiable(format!("no group 3/{it}")))?;
    let g = atlas.group(id).expect("resolved id");
    let mut v: Vec<RowColumns> = fibration_rows(&g, bound)?
        .iter()
        .map(RowColumns::of)
        .collect();
    v.sort();
    Ok(v)
}

/// IT numbers of the triclinic and monoclinic families.
pub fn low_symmetry(it: u32) -> bool {
    it <= 15
}

pub fn table1_case(atlas: &Atlas, it: u32, bound: u32) -> CaseReport {
    let name = format!("3/{it}");
    let want = oracle::table1_group(it);
    let got = match table1_columns(atlas, it, bound) {
        Ok(v) => v,
        Err(e) => return CaseReport::new(name, false, e.to_string()),
    };
    if got == want {
        CaseReport::new(name, true, format!("{} rows", got.len()))
    } else {
        let mut d = multiset_diff(&got, &want);
        if got.len() != want.len() {
            d = format!("{} rows, expected {}; {d}", got.len(), want.len());
        }
        CaseReport::new(name, false, d)
    }
}

/// Every space group: reducible ones against the reference table, the rest
/// must have no fibrations.
pub fn suite_table1_with<F>(atlas: &Atlas, bound: u32, map: F) -> SuiteReport
where
    F: Fn(&[u32], &(dyn Fn(u32) -> CaseReport + Sync)) -> Vec<CaseReport>,
{
    let its: Vec<u32> = atlas.ids(3).iter().map(|id| id.it).collect();
    let run = |it: u32| -> CaseReport { table1_case(atlas, it, bound) };
    let mut r = SuiteReport::new("table1");
    r.cases = map(&its, &run);
    r
}

pub fn suite_table1(atlas: &Atlas, bound: u32) -> SuiteReport {
    suite_table1_with(atlas, bound, |its, f| its.iter().map(|&it| f(it)).collect())
}

/// Brute-force rank of the translations in `[-2,2]^n` commuting with every
/// generator.
fn central_translation_rank(g: &SpaceGroup) -> usize {
    let n = g.dim();
    let gens = g.generators();
    let mut found: Vec<Vec<Int>> = Vec::new();
    let total = 5usize.pow(n as u32);
    for code in 0..total {
        let mut x = code;
        let v: Vec<Int> = (0..n)
            .map(|_| {
                let c = (x % 5) as i64 - 2;
                x /= 5;
                Int::from(c)
            })
            .collect();
        let t = AffineElement::translation(ints_to_rats(&v));
        if gens.iter().all(|h| t.mul(h) == h.mul(&t)) {
            found.push(v);
        }
    }
    IntLattice::from_generators(n, &found).rank()
}

fn random_element<R: Rng>(g: &SpaceGroup, rng: &mut R) -> AffineElement {
    let c = rng.gen_range(0..g.order());
    let v: Vec<Int> = (0..g.dim())
        .map(|_| Int::from(rng.gen_range(-2i64..=2)))
        .collect();
    AffineElement::translation(ints_to_rats(&v)).mul(&g.coset_rep(c))
}

/// Brute-force `KN = Γ`: every coset representative and lattice generator is
/// a product `k n` with small translation parts.
fn product_covers(g: &SpaceGroup, k: &CompleteNormalSubgroup, n: &CompleteNormalSubgroup) -> bool {
    let box_elems = |s: &CompleteNormalSubgroup| -> Vec<AffineElement> {
        let basis = s.trans_lattice().generators();
        let mut out = Vec::new();
        let r = 3i64;
        let width = (2 * r + 1) as usize;
        for c in s.cosets() {
            for code in 0..width.pow(basis.len() as u32) {
                let mut x = code;
                let mut t = c.rep();
                for b in &basis {
                    let m = (x % width) as i64 - r;
                    x /= width;
                    let v: Vec<Int> = b.iter().map(|y| y * m).collect();
                    t = AffineElement::translation(ints_to_rats(&v)).mul(&t);
                }
                out.push(t);
            }
        }
        out
    };
    let ks = box_elems(k);
    let ns = box_elems(n);
    let mut targets: Vec<AffineElement> = (0..g.order()).map(|c| g.coset_rep(c)).collect();
    targets.extend((0..g.dim()).map(|i| g.translation(i)));
    let products: HashSet<AffineElement> = ks
        .iter()
        .flat_map(|a| ns.iter().map(move |b| a.mul(b)))
        .collect();
    targets.iter().all(|t| products.contains(t))
}

fn commute(k: &CompleteNormalSubgroup, n: &CompleteNormalSubgroup) -> bool {
    let ng = n.generators();
    k.generators()
        .iter()
        .all(|a| ng.iter().all(|b| a.mul(b) == b.mul(a)))
}

fn case(report: &mut SuiteReport, name: &str, failures: Vec<String>, checked: usize) {
    let passed = failures.is_empty();
    let detail = if passed {
        format!("{checked} checked")
    } else {
        format!(
            "{} of {checked} failed: {}",
            failures.len(),
            failures.into_iter().take(5).collect::<Vec<_>>().join("; ")
        )
    };
    report.push(CaseReport::new(name, passed, detail));
}

/// Structural properties over the whole atlas and `samples` random
/// subgroups drawn with a fixed seed.
pub fn suite_props(atlas: &Atlas, seed: u64, samples: usize) -> SuiteReport {
    let mut r = SuiteReport::new("props");
    let ids = atlas.all_ids();
    let groups: Vec<(GroupId, Arc<SpaceGroup>)> = ids
        .iter()
        .map(|&id| (id, atlas.group(id).expect("listed id")))
        .collect();

    let mut bad = Vec::new();
    for (id, g) in &groups {
        let limits: &[usize] = if id.dim == 2 { &[8, 12] } else { &[48] };
        if limits.iter().all(|l| l % g.order() != 0) {
            bad.push(format!("{id}: point group order {}", g.order()));
        }
    }
    case(
        &mut r,
        "point group orders are crystallographic",
        bad,
        groups.len(),
    );

    let mut counts = BTreeMap::new();
    for (id, g) in &groups {
        *counts.entry((id.dim, is_reducible(g))).or_insert(0usize) += 1;
    }
    let census = |d, red| counts.get(&(d, red)).copied().unwrap_or(0);
    let want = [(2, true, 9), (2, false, 8), (3, true, 184), (3, false, 35)];
    let bad: Vec<String> = want
        .iter()
        .filter(|&&(d, red, c)| census(d, red) != c)
        .map(|&(d, red, c)| format!("dim {d} reducible={red}: {} (expected {c})", census(d, red)))
        .collect();
    case(&mut r, "reducibility census", bad, 4);

    let mut rng = StdRng::seed_from_u64(seed);
    let mut bad_idem = Vec::new();
    let mut bad_comm = Vec::new();
    for i in 0..samples {
        let (id, g) = &groups[rng.gen_range(0..groups.len())];
        let draw = |rng: &mut StdRng| {
            let count = rng.gen_range(1..=2);
            let gens: Vec<AffineElement> = (0..count).map(|_| random_element(g, rng)).collect();
            NormalSubgroup::generated_by(g, &gens).expect("elements of the group")
        };
        let a = draw(&mut rng);
        let b = draw(&mut rng);
        let ca = a.completion();
        let ok = ca.as_normal().completion() == ca
            && ca.is_complete()
            && ca.elements_respect_span()
            && a.generators().iter().all(|x| ca.contains(x))
            && ca.span() == a.span();
        if !ok {
            bad_idem.push(format!("sample {i} in {id}"));
        }
        if commensurable(&a, &b) != (a.span() == b.span()) {
            bad_comm.push(format!("sample {i} in {id}"));
        }
    }
    case(&mut r, "completion is idempotent", bad_idem, samples);
    case(&mut r, "commensurable iff equal span", bad_comm, samples);

    let mut bad_betti = Vec::new();
    let mut bad_perp = Vec::new();
    for (id, g) in &groups {
        let ab = abelianization(g).free_rank;
        let brute = central_translation_rank(g);
        let fix = fixed_subspace(g).dim();
        if ab != brute || brute != fix {
            bad_betti.push(format!(
                "{id}: abelianization {ab}, center {brute}, Fix {fix}"
            ));
        }
        let ker = transfer_kernel(g).span();
        let z = center(g).span();
        let gram = g.gram();
        if !ker
            .basis()
            .iter()
            .all(|u| z.basis().iter().all(|v| gram.inner(u, v).is_zero()))
        {
            bad_perp.push(id.to_string());
        }
    }
    case(&mut r, "betti number three ways", bad_betti, groups.len());
    case(
        &mut r,
        "transfer kernel orthogonal to center",
        bad_perp,
        groups.len(),
    );

    let mut bad_dual = Vec::new();
    let mut checked_dual = 0;
    let mut bad_circle = Vec::new();
    let mut bad_interval = Vec::new();
    let mut bad_index = Vec::new();
    let mut bad_chain = Vec::new();
    let mut records = 0;
    for (id, g) in &groups {
        let n = g.dim();
        let dims: Vec<usize> = if n == 2 { vec![1] } else { vec![1, 2] };
        let subs = match enumerate_complete_normal(g, &dims, 2) {
            Ok(s) => s,
            Err(e) => {
                bad_dual.push(format!("{id}: {e}"));
                continue;
            }
        };
        for s in &subs {
            checked_dual += 1;
            match orthogonal_dual(s) {
                Some(d) if d.dim() == n - s.dim() => {}
                _ => bad_dual.push(format!("{id}: {}", s.span())),
            }
        }
        for s in subs.iter().filter(|s| s.dim() == 1) {
            let rec = match fibration_record(g, s) {
                Ok(rec) => rec,
                Err(e) => {
                    bad_chain.push(format!("{id}: {e}"));
                    continue;
                }
            };
            records += 1;
            if rec.base == OrbifoldClass::Circle && !rec.coseifert_split {
                bad_circle.push(format!("{id}: {}", s.span()));
            }
            let (qk, qn) = match (quotient_group(g, &rec.k), quotient_group(g, &rec.n)) {
                (Ok(a), Ok(b)) => (a, b),
                _ => {
                    bad_chain.push(format!("{id}: quotient failed"));
                    continue;
                }
            };
            if rec.seifert_fiber == OrbifoldClass::Interval {
                let ok =
                    matches!(find_complement_in(&qk), Ok(Some(w)) if verify_witness(&qk, &w, 3));
                if !ok {
                    bad_interval.push(format!("{id}: {}", s.span()));
                }
            }
            let direct = commute(&rec.k, &rec.n) && product_covers(g, &rec.k, &rec.n);
            if (rec.index == 1) != direct {
                bad_index.push(format!("{id}: {} index {}", s.span(), rec.index));
            }
            if !qk.check_point_chain() || !qn.check_point_chain() {
                bad_chain.push(format!("{id}: {}", s.span()));
            }
        }
    }
    case(
        &mut r,
        "every complete normal subgroup has a dual",
        bad_dual,
        checked_dual,
    );
    case(&mut r, "circle base splits", bad_circle, records);
    case(
        &mut r,
        "interval fiber has a split witness",
        bad_interval,
        records,
    );
    case(&mut r, "index one iff direct product", bad_index, records);
    case(&mut r, "point group chain is normal", bad_chain, records);
    r
}
