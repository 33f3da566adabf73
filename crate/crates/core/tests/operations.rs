use std::sync::Arc;

use crystfib::atlas::{Atlas, AtlasError};
use crystfib::fiberclass::{
    classify_1d, classify_2d, fibration_rows, index_kn, quotient_group, OrbifoldClass, Wallpaper,
};
use crystfib::groupcore::{
    betti1, build_group, center, close_generators, conjugate, torus_bundle_base, transfer,
    transfer_kernel, AffineElement, SpaceGroup,
};
use crystfib::normsub::{
    commensurable, complete_normal_from_subspace, enumerate_complete_normal, is_reducible,
    orthogonal_dual, CompleteNormalSubgroup, NormalSubgroup,
};
use crystfib::ratlin::{
    hnf, int_vec, lattice_intersect_subspace, orth_complement, rat, rat_vec, snf,
    solve_integer_affine, GramForm, IntLattice, IntMat, RatMat, Subspace,
};
use crystfib::splitter::{
    dihedral_split_structure, find_complement, is_direct_product, present_quotient,
    splits_trivially_over_circle, DihedralSplit,
};
use crystfib::symparse::{parse_catalog, parse_symop, CatalogEntry};

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

fn sub(g: &Arc<SpaceGroup>, v: &[i64]) -> CompleteNormalSubgroup {
    complete_normal_from_subspace(g, &line(v)).unwrap()
}

fn xy_plane() -> Subspace {
    Subspace::span_int(3, &[int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0])])
}

fn it113() -> Arc<SpaceGroup> {
    group(3, &["-x+1/2,-y+1/2,z", "y+1/2,-x,-z", "-x,y+1/2,-z"])
}

fn wall(w: Wallpaper) -> OrbifoldClass {
    OrbifoldClass::Wallpaper(w)
}

#[test]
fn hermite_and_smith_examples() {
    let id = IntMat::identity(2);
    assert_eq!(hnf(&id), (id.clone(), id.clone()));
    let z = IntMat::zeros(2, 2);
    assert_eq!(hnf(&z).0, z);
    let m = IntMat::from_rows(&[vec![2, 1], vec![0, 1]]);
    let (h, _) = hnf(&m);
    let lm = IntLattice::from_matrix(&m);
    let lh = IntLattice::from_matrix(&h);
    assert!(h.columns().iter().all(|c| lm.contains_int(c)));
    assert!(m.columns().iter().all(|c| lh.contains_int(c)));

    assert_eq!(snf(&id).0, id);
    assert_eq!(
        snf(&IntMat::from_rows(&[vec![2, 0], vec![0, 3]])).0,
        IntMat::from_rows(&[vec![1, 0], vec![0, 6]])
    );
    assert_eq!(snf(&IntMat::zeros(1, 1)).0, IntMat::zeros(1, 1));
}

#[test]
fn complements_and_lattice_lines() {
    let id = GramForm::identity(2);
    assert_eq!(orth_complement(&line(&[1, 0]), &id), line(&[0, 1]));
    assert_eq!(orth_complement(&Subspace::zero(2), &id), Subspace::full(2));
    let hex = GramForm::new(RatMat::from_rows(&[rat_vec(&[2, -1]), rat_vec(&[-1, 2])])).unwrap();
    assert_eq!(orth_complement(&line(&[1, 0]), &hex), line(&[1, 2]));

    let z2 = IntLattice::standard(2);
    assert_eq!(
        lattice_intersect_subspace(&z2, &line(&[1, 0])),
        IntLattice::from_generators(2, &[int_vec(&[1, 0])])
    );
    assert_eq!(
        lattice_intersect_subspace(&z2, &line(&[2, 4])),
        IntLattice::from_generators(2, &[int_vec(&[1, 2])])
    );
}

#[test]
fn integer_affine_examples() {
    let z1 = IntLattice::standard(1);
    assert_eq!(
        solve_integer_affine(&IntMat::from_rows(&[vec![2]]), &rat_vec(&[1]), &z1).unwrap(),
        None
    );
    let b = rat_vec(&[3, -4]);
    assert_eq!(
        solve_integer_affine(&IntMat::identity(2), &b, &IntLattice::standard(2)).unwrap(),
        Some(int_vec(&[3, -4]))
    );
    // the square of (d+I)γ in IT 113 has second coordinate 1+2l
    let a = IntMat::from_rows(&[vec![0, 2]]);
    assert_eq!(
        solve_integer_affine(&a, &rat_vec(&[-1]), &IntLattice::standard(2)).unwrap(),
        None
    );
}

#[test]
fn symop_examples() {
    assert_eq!(parse_symop("x,y,z", 3).unwrap(), AffineElement::identity(3));
    let gamma = parse_symop("-x,y+1/2,-z", 3).unwrap();
    assert_eq!(
        gamma.point,
        IntMat::from_rows(&[vec![-1, 0, 0], vec![0, 1, 0], vec![0, 0, -1]])
    );
    assert_eq!(gamma.trans, vec![rat(0, 1), rat(1, 2), rat(0, 1)]);
    let c = parse_symop("y,x", 2).unwrap();
    assert_eq!(c.point, IntMat::from_rows(&[vec![0, 1], vec![1, 0]]));

    assert!(parse_catalog("").unwrap().is_empty());
    let p1 = parse_catalog("[group]\nid = 2/1\nname = p1\n").unwrap();
    assert_eq!(p1.len(), 1);
    assert!(p1[0].ops.is_empty());
    assert_eq!(parse_catalog(crystfib::atlas::ATLAS_3D).unwrap().len(), 230);
}

#[test]
fn build_examples() {
    let entries = parse_catalog("[group]\nid = 2/1\n\n[group]\nid = 2/3\nop = x,-y\n").unwrap();
    let sizes: Vec<usize> = entries
        .iter()
        .map(|e: &CatalogEntry| build_group(e).unwrap().order())
        .collect();
    assert_eq!(sizes, vec![1, 2]);
    assert_eq!(it113().order(), 8);
}

#[test]
fn element_examples() {
    let a = t(&[1, 2]);
    let b = parse_symop("x+1/2,-y", 2).unwrap();
    assert_eq!(
        conjugate(&a, &b),
        AffineElement::translation(b.point.mul_rat_vec(&a.trans))
    );
    let e = AffineElement::identity(3);
    assert_eq!(e.inverse(), e);
    let gamma = parse_symop("-x,y+1/2,-z", 3).unwrap();
    for k in -2..=2 {
        for l in -2..=2 {
            let x = t(&[k, l, 0]).mul(&gamma);
            assert_eq!(x.mul(&x), t(&[0, 1 + 2 * l, 0]));
        }
    }
}

#[test]
fn center_transfer_betti() {
    let (p1, p2, pm, pg, cm, pmm) = (
        group(2, &[]),
        group(2, &["-x,-y"]),
        group(2, &["x,-y"]),
        group(2, &["x+1/2,-y"]),
        group(2, &["y,x"]),
        group(2, &["-x,y", "x,-y"]),
    );
    assert_eq!(center(&p1).rank(), 2);
    assert_eq!(
        center(&pm),
        IntLattice::from_generators(2, &[int_vec(&[1, 0])])
    );
    assert_eq!(
        center(&cm),
        IntLattice::from_generators(2, &[int_vec(&[1, 1])])
    );

    let x = parse_symop("-x+1/3,-y", 2).unwrap().mul(&t(&[4, 7]));
    assert!(transfer(&p2, &p2.coset_rep(1).mul(&t(&[4, 7]))).is_identity());
    assert!(!p2.contains(&x) || transfer(&p2, &x).is_identity());
    assert_eq!(transfer(&p1, &t(&[1, 0])), t(&[1, 0]));
    let y = t(&[3, 5]).mul(&parse_symop("x,-y", 2).unwrap());
    assert_eq!(transfer(&pm, &y), t(&[6, 0]));

    assert_eq!(transfer_kernel(&p1).dim(), 0);
    let k = transfer_kernel(&pm);
    assert_eq!(k.span(), line(&[0, 1]));
    assert!(k.contains(&t(&[0, 1])) && k.contains(&parse_symop("x,-y", 2).unwrap()));
    assert_eq!(transfer_kernel(&p2).span(), Subspace::full(2));

    assert_eq!((betti1(&p1), betti1(&pg), betti1(&pmm)), (2, 1, 0));

    let tb = torus_bundle_base(&p1).unwrap();
    assert_eq!((tb.base(), tb.kernel.dim()), (Some(wall(Wallpaper::P1)), 0));
    let tb = torus_bundle_base(&pg).unwrap();
    assert_eq!(
        (tb.base(), tb.fiber),
        (Some(OrbifoldClass::Circle), Some(OrbifoldClass::Circle))
    );
    assert_eq!(tb.kernel.span(), line(&[0, 1]));
    let tb = torus_bundle_base(&pmm).unwrap();
    assert_eq!(
        (tb.base(), tb.fiber),
        (Some(OrbifoldClass::Point), Some(wall(Wallpaper::Pmm)))
    );
}

#[test]
fn spans_and_completions() {
    let pm = group(2, &["x,-y"]);
    let n1 = NormalSubgroup::generated_by(&pm, &[t(&[1, 0])]).unwrap();
    assert_eq!(n1.span(), line(&[1, 0]));
    let all = NormalSubgroup::generated_by(&pm, &[t(&[1, 0]), t(&[0, 1])]).unwrap();
    assert_eq!(all.span(), Subspace::full(2));
    assert_eq!(all.completion().cosets().len(), pm.order());

    let g = it113();
    let n = NormalSubgroup::generated_by(
        &g,
        &[
            t(&[1, 0, 0]),
            t(&[0, 1, 0]),
            parse_symop("-x+1/2,-y+1/2,z", 3).unwrap(),
            parse_symop("y+1/2,-x,-z", 3)
                .unwrap()
                .mul(&parse_symop("-x,y+1/2,-z", 3).unwrap()),
        ],
    )
    .unwrap();
    assert_eq!(n.span(), xy_plane());

    let sq = NormalSubgroup::generated_by(&pm, &[t(&[2, 0])]).unwrap();
    assert!(!sq.is_complete());
    assert_eq!(*sq.completion(), n1);
    assert!(n1.completion().as_normal().is_complete());
    assert!(commensurable(&n1, &sq));
    let p1 = group(2, &[]);
    let a = NormalSubgroup::generated_by(&p1, &[t(&[1, 0])]).unwrap();
    let b = NormalSubgroup::generated_by(&p1, &[t(&[0, 1])]).unwrap();
    assert!(!commensurable(&a, &b));
    let pg = group(2, &["x+1/2,-y"]);
    let z = NormalSubgroup::generated_by(&pg, &[t(&[1, 0])]).unwrap();
    let tr = NormalSubgroup::generated_by(&pg, &[t(&[1, 0]), t(&[0, 1])]).unwrap();
    assert!(!commensurable(&z, &tr));
    assert!(NormalSubgroup::generated_by(&pg, &[t(&[0, 1])])
        .unwrap()
        .is_complete());
    let whole = NormalSubgroup::generated_by(&pg, &pg.generators()).unwrap();
    assert!(whole.is_complete());
}

#[test]
fn complete_subgroups_from_subspaces() {
    let pm = group(2, &["x,-y"]);
    let n = sub(&pm, &[0, 1]);
    assert!(n.contains(&t(&[0, 1])) && n.contains(&parse_symop("x,-y", 2).unwrap()));
    assert_eq!(n.cosets().len(), 2);
    let p1 = group(2, &[]);
    assert_eq!(
        sub(&p1, &[1, 1]).trans_lattice(),
        &IntLattice::from_generators(2, &[int_vec(&[1, 1])])
    );
    let p4 = group(2, &["-y,x"]);
    assert!(complete_normal_from_subspace(&p4, &line(&[1, 0])).is_none());

    let spans: Vec<Subspace> = enumerate_complete_normal(&pm, &[1], 2)
        .unwrap()
        .iter()
        .map(|s| s.span())
        .collect();
    assert_eq!(spans.len(), 2);
    assert!(spans.contains(&line(&[1, 0])) && spans.contains(&line(&[0, 1])));
    let planes = enumerate_complete_normal(&it113(), &[2], 2).unwrap();
    assert_eq!(planes.len(), 1);
    assert_eq!(planes[0].span(), xy_plane());
    let cubic = group(3, &["z,x,y", "-x,-y,z", "-x,y,-z"]);
    assert!(enumerate_complete_normal(&cubic, &[1, 2], 2)
        .unwrap()
        .is_empty());

    assert_eq!(orthogonal_dual(&sub(&pm, &[1, 0])).unwrap(), n);
    let g = it113();
    let k = sub(&g, &[0, 0, 1]);
    assert_eq!(orthogonal_dual(&k).unwrap().span(), xy_plane());

    assert!(is_reducible(&p1));
    assert!(is_reducible(&it113()));
    assert!(!is_reducible(&cubic));
}

#[test]
fn quotients_and_classes() {
    let pg = group(2, &["x+1/2,-y"]);
    let q1 = quotient_group(&pg, &sub(&pg, &[1, 0])).unwrap();
    assert_eq!(
        (q1.group.order(), classify_1d(&q1.group).unwrap()),
        (2, OrbifoldClass::Interval)
    );
    let q2 = quotient_group(&pg, &sub(&pg, &[0, 1])).unwrap();
    assert_eq!(
        (q2.group.order(), classify_1d(&q2.group).unwrap()),
        (1, OrbifoldClass::Circle)
    );
    let p1 = group(2, &[]);
    assert_eq!(
        classify_1d(&quotient_group(&p1, &sub(&p1, &[1, 0])).unwrap().group).unwrap(),
        OrbifoldClass::Circle
    );
    let atlas = Atlas::load_default().unwrap();
    let g76 = atlas.get("3/76").unwrap();
    let n76 = complete_normal_from_subspace(&g76, &xy_plane()).unwrap();
    assert_eq!(
        classify_1d(&quotient_group(&g76, &n76).unwrap().group).unwrap(),
        OrbifoldClass::Circle
    );

    assert_eq!(classify_2d(&p1).unwrap(), wall(Wallpaper::P1));
    assert_eq!(
        classify_2d(&group(2, &["-x,-y", "y,x"])).unwrap(),
        wall(Wallpaper::Cmm)
    );
    let g = it113();
    let n = complete_normal_from_subspace(&g, &xy_plane()).unwrap();
    assert_eq!(
        crystfib::fiberclass::classify_on_span(&n).unwrap(),
        Some(wall(Wallpaper::Cmm))
    );
}

#[test]
fn indices_and_rows() {
    let p1 = group(2, &[]);
    assert_eq!(
        index_kn(&p1, &sub(&p1, &[1, 0]), &sub(&p1, &[0, 1])),
        1.into()
    );
    let atlas = Atlas::load_default().unwrap();
    for (id, index) in [("3/16", 2u64), ("3/70", 8)] {
        let rows = fibration_rows(&atlas.get(id).unwrap(), 2).unwrap();
        assert!(rows.iter().all(|r| r.index == index), "{id}");
    }
    let pm = group(2, &["x,-y"]);
    let rows = fibration_rows(&pm, 2).unwrap();
    let got: Vec<_> = rows
        .iter()
        .map(|r| (r.seifert_fiber, r.seifert_base, r.seifert_split, r.index))
        .collect();
    assert!(got.contains(&(OrbifoldClass::Circle, OrbifoldClass::Interval, true, 1)));
    assert!(got.contains(&(OrbifoldClass::Interval, OrbifoldClass::Circle, true, 1)));
    let rows = fibration_rows(&atlas.get("3/19").unwrap(), 2).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!(
        (
            r.seifert_split,
            r.cofiber,
            r.base,
            r.coseifert_split,
            r.index
        ),
        (
            false,
            wall(Wallpaper::P1),
            OrbifoldClass::Interval,
            false,
            4
        )
    );
    assert!(!is_direct_product(&atlas.get("3/19").unwrap(), &r.k, &r.n));
    assert!(fibration_rows(&atlas.get("3/221").unwrap(), 2)
        .unwrap()
        .is_empty());
}

#[test]
fn presentations() {
    let p1 = group(2, &[]);
    let circle = present_quotient(&quotient_group(&p1, &sub(&p1, &[1, 0])).unwrap());
    assert_eq!((circle.generators.len(), circle.relators.len()), (1, 0));
    let pm = group(2, &["x,-y"]);
    let dihedral = present_quotient(&quotient_group(&pm, &sub(&pm, &[1, 0])).unwrap());
    assert_eq!(dihedral.generators.len(), 2);
    assert!(dihedral.verify());
    let g16 = Atlas::load_default().unwrap().get("3/16").unwrap();
    let pmm = present_quotient(&quotient_group(&g16, &sub(&g16, &[0, 0, 1])).unwrap());
    assert_eq!(pmm.generators.len(), 4);
    assert!(pmm.verify());
}

#[test]
fn splitting_examples() {
    let pm = group(2, &["x,-y"]);
    assert!(find_complement(&pm, &sub(&pm, &[1, 0])).unwrap().is_some());
    let pg = group(2, &["x+1/2,-y"]);
    assert!(find_complement(&pg, &sub(&pg, &[1, 0])).unwrap().is_none());
    let g = it113();
    let n = complete_normal_from_subspace(&g, &xy_plane()).unwrap();
    assert!(find_complement(&g, &n).unwrap().is_none());

    let p1 = group(2, &[]);
    assert!(splits_trivially_over_circle(
        &quotient_group(&p1, &sub(&p1, &[1, 0])).unwrap()
    ));
    assert!(!splits_trivially_over_circle(
        &quotient_group(&pm, &sub(&pm, &[1, 0])).unwrap()
    ));
    assert!(splits_trivially_over_circle(
        &quotient_group(&pg, &sub(&pg, &[0, 1])).unwrap()
    ));

    assert!(is_direct_product(
        &p1,
        &sub(&p1, &[1, 0]),
        &sub(&p1, &[0, 1])
    ));
    assert!(is_direct_product(
        &pm,
        &sub(&pm, &[1, 0]),
        &sub(&pm, &[0, 1])
    ));

    match dihedral_split_structure(&pm, &sub(&pm, &[0, 1])).unwrap() {
        DihedralSplit::DirectProduct { sigma } => assert_eq!(sigma.span(), line(&[1, 0])),
        other => panic!("{other:?}"),
    }
    let cm = group(2, &["y,x"]);
    match dihedral_split_structure(&cm, &sub(&cm, &[1, -1])).unwrap() {
        DihedralSplit::IndexTwo { sigma0, .. } => assert_eq!(sigma0.span(), line(&[1, 1])),
        other => panic!("{other:?}"),
    }
    let cmm = group(2, &["-x,-y", "y,x"]);
    match dihedral_split_structure(&cmm, &sub(&cmm, &[1, -1])).unwrap() {
        DihedralSplit::IndexTwo { sigma0, witness } => {
            assert_eq!(sigma0.span(), line(&[1, 1]));
            assert!(!witness.lifts.is_empty());
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn atlas_examples() {
    let atlas = Atlas::load_default().unwrap();
    assert_eq!((atlas.ids(2).len(), atlas.ids(3).len()), (17, 219));
    let pg = atlas.get("2/4").unwrap();
    assert!(pg.contains(&parse_symop("x+1/2,-y", 2).unwrap()));
    assert_eq!(pg.order(), 2);
    let g113 = atlas.get("3/113").unwrap();
    for op in ["-x+1/2,-y+1/2,z", "y+1/2,-x,-z", "-x,y+1/2,-z"] {
        assert!(g113.contains(&parse_symop(op, 3).unwrap()));
    }
    assert!(!is_reducible(&atlas.get("3/230").unwrap()));
    assert!(matches!(
        atlas.get("9/1"),
        Err(AtlasError::UnknownId { .. })
    ));
}
