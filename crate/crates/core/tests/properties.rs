use nmsp_core::algebra::{LocExpr, VarCtx, Q};
use nmsp_core::enumerate::{enumerate, EnumSpec};
use nmsp_core::graphs::{canonical, deg, DecoratedGraph};
use nmsp_core::localization::{contribution, Insertion, LocConfig};
use nmsp_core::oracles::Oracles;
use proptest::prelude::*;
use std::sync::{Arc, OnceLock};

const NT: usize = 3;

fn ctx() -> Arc<VarCtx> {
    VarCtx::t_only(NT)
}

/// Sum of c * t^e terms over a product of linear denominators.
fn expr(terms: &[(i8, [u8; NT])], dens: &[(usize, usize)]) -> LocExpr {
    let c = ctx();
    let mut e = LocExpr::zero(&c);
    for (k, ex) in terms {
        let mut m = LocExpr::constant(&c, Q::from_integer((*k).into()));
        for (a, p) in ex.iter().enumerate() {
            m = m.mul(&LocExpr::t(&c, a + 1).pow(*p as u32));
        }
        e = e.add(&m);
    }
    for (a, b) in dens {
        // t_a, or t_a - t_b when the indices differ
        let w = if a == b { LocExpr::t(&c, a + 1) } else { LocExpr::t(&c, a + 1).sub(&LocExpr::t(&c, b + 1)) };
        e = e.div(&w).unwrap();
    }
    e
}

fn arb_expr() -> impl Strategy<Value = LocExpr> {
    (
        prop::collection::vec((-4i8..=4, prop::array::uniform3(0u8..3)), 0..4),
        prop::collection::vec((0..NT, 0..NT), 0..3),
    )
        .prop_map(|(t, d)| expr(&t, &d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in arb_expr(), b in arb_expr(), c in arb_expr()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.mul(&LocExpr::one(&ctx())), a.clone());
    }

    #[test]
    fn inverse_round_trips(a in arb_expr()) {
        prop_assume!(!a.is_zero());
        let one = a.mul(&a.inv().unwrap()).reduce();
        prop_assert_eq!(one, LocExpr::one(&ctx()));
    }

    #[test]
    fn reduce_keeps_the_value(a in arb_expr(), b in arb_expr()) {
        let s = a.add(&b);
        prop_assert_eq!(s.reduce(), s.clone());
        prop_assert_eq!(s.reduce().canonical_pair(), s.reduce().reduce().canonical_pair());
    }
}

/// Graphs from a few small specs, each tagged with its spec index.
fn sample_graphs() -> &'static [(usize, DecoratedGraph)] {
    static G: OnceLock<Vec<(usize, DecoratedGraph)>> = OnceLock::new();
    G.get_or_init(|| {
        let mut out = Vec::new();
        for (s, (g, n, d0, k, nh)) in [(0, 3, 1, 0, 1), (0, 3, 1, 0, 2), (0, 2, 1, 2, 2), (1, 1, 1, 0, 2)].into_iter().enumerate() {
            let spec = EnumSpec::rho(g, n, deg(d0, 1), deg(k, 5), nh);
            out.extend(enumerate(&spec).unwrap().into_iter().map(|e| (s, e.graph)));
        }
        assert!(out.len() > 20);
        out
    })
}

/// t-degree of the nonzero no-insertion contributions of each spec; all must agree.
fn spec_degrees() -> &'static [i64] {
    static D: OnceLock<Vec<i64>> = OnceLock::new();
    D.get_or_init(|| {
        let mut d: Vec<Option<i64>> = vec![None; 4];
        for (s, g) in sample_graphs() {
            let c = contribution(g, &[], &Oracles::default(), &LocConfig::default()).unwrap();
            if c.value.is_zero() {
                continue;
            }
            let k = c.value.homogeneous_degree().expect("inhomogeneous contribution");
            assert_eq!(*d[*s].get_or_insert(k), k, "spec {} mixes degrees", s);
            if c.vdim.is_integer() {
                assert_eq!(k, -c.vdim.to_integer());
            }
        }
        d.into_iter().map(|x| x.expect("spec with no nonzero graph")).collect()
    })
}

fn relabel(g: &DecoratedGraph, perm: &[usize], edge_perm: &[usize]) -> DecoratedGraph {
    let mut h = g.clone();
    for (v, x) in g.vertices.iter().enumerate() {
        h.vertices[perm[v]] = x.clone();
    }
    for (i, e) in g.edges.iter().enumerate() {
        let mut e = e.clone();
        e.ends = [perm[e.ends[0]], perm[e.ends[1]]];
        h.edges[edge_perm[i]] = e;
    }
    // leg order is part of the data; only their vertex labels move
    for (i, l) in g.legs.iter().enumerate() {
        h.legs[i].vertex = perm[l.vertex];
    }
    h
}

fn arb_perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn arb_relabelled() -> impl Strategy<Value = (usize, Vec<usize>, Vec<usize>)> {
    (0..sample_graphs().len()).prop_flat_map(|i| {
        let g = &sample_graphs()[i].1;
        (Just(i), arb_perm(g.vertices.len()), arb_perm(g.edges.len()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_form_ignores_labels((i, perm, eperm) in arb_relabelled()) {
        let g = &sample_graphs()[i].1;
        let h = relabel(g, &perm, &eperm);
        prop_assert!(h.validate().is_empty());
        let (cg, ch) = (canonical(g), canonical(&h));
        prop_assert_eq!(&cg.key, &ch.key);
        prop_assert_eq!(cg.aut, ch.aut);
        prop_assert_eq!(canonical(&ch.graph).key, ch.key);
    }

    #[test]
    fn contributions_are_homogeneous(i in 0..sample_graphs().len(), hs in prop::collection::vec(0u32..3, 3)) {
        let (s, g) = &sample_graphs()[i];
        let hs = &hs[..g.legs.len()];
        let ins: Vec<Insertion> = hs.iter().map(|j| Insertion::h_pow(*j)).collect();
        let c = contribution(g, &ins, &Oracles::default(), &LocConfig::default()).unwrap();
        if !c.value.is_zero() {
            let ins_deg: i64 = hs.iter().map(|j| *j as i64).sum();
            prop_assert_eq!(c.value.homogeneous_degree(), Some(spec_degrees()[*s] + ins_deg), "{}", c.canonical);
        }
        // relabelling leaves the value alone
        let perm: Vec<usize> = (0..g.vertices.len()).rev().collect();
        let eperm: Vec<usize> = (0..g.edges.len()).rev().collect();
        let h = relabel(g, &perm, &eperm);
        let ch = contribution(&h, &ins, &Oracles::default(), &LocConfig::default()).unwrap();
        prop_assert_eq!(ch.value, c.value);
    }
}
