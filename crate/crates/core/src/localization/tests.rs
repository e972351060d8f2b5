use super::*;
use crate::algebra::qi;
use crate::graphs::{deg, Edge, EdgeKind, Level, Monodromy, Vertex};

fn single(level: Level, hour: Option<u32>, n: usize, hours: u32) -> DecoratedGraph {
    let mut g = DecoratedGraph::new(hours);
    let v = g.add_vertex(Vertex::new(level, hour, 0));
    for _ in 0..n {
        g.add_leg(Monodromy::Rho, v);
    }
    g
}

fn hhh() -> Vec<Insertion> {
    vec![Insertion::h_pow(1); 3]
}

fn ctx1() -> Arc<VarCtx> {
    VarCtx::t_only(1)
}

#[test]
fn level_zero_point_is_minus_five_over_t() {
    let g = single(Level::Zero, None, 3, 1);
    let c = contribution(&g, &hhh(), &Oracles::default(), &LocConfig::default()).unwrap();
    let t = LocExpr::t(&ctx1(), 1);
    assert_eq!(c.value, t.inv().unwrap().scale(&qi(-5)));
}

#[test]
fn level_one_point_is_five_over_t() {
    let g = single(Level::One, Some(1), 3, 1);
    let c = contribution(&g, &hhh(), &Oracles::default(), &LocConfig::default()).unwrap();
    let t = LocExpr::t(&ctx1(), 1);
    assert_eq!(c.value, t.inv().unwrap().scale(&qi(5)));
    // opposite hour sign flips the sign
    let cfg = LocConfig { hour_sign: HourSign::Plus, ..Default::default() };
    let c = contribution(&g, &hhh(), &Oracles::default(), &cfg).unwrap();
    assert_eq!(c.value, t.inv().unwrap().scale(&qi(-5)));
}

#[test]
fn single_vertex_ranks() {
    let cfg = LocConfig::default();
    let (r, e) = expected_dim(&single(Level::Zero, None, 3, 1), &cfg).unwrap();
    assert_eq!((r, e), (1, deg(3, 1)));
    let (r, e) = expected_dim(&single(Level::One, Some(1), 3, 1), &cfg).unwrap();
    assert_eq!((r, e), (4, deg(0, 1)));
}

#[test]
fn e1inf_small_edge_factor() {
    // d_e = -1/5 between stable level-1 and level-inf vertices: 1/(5 t) after Pi
    let mut g = DecoratedGraph::new(1);
    let a = g.add_vertex(Vertex::new(Level::One, Some(1), 0));
    let b = g.add_vertex(Vertex::new(Level::Inf, Some(1), 0));
    g.add_leg(Monodromy::Rho, a);
    g.add_leg(Monodromy::Rho, a);
    g.add_leg(Monodromy::Zeta(1), b);
    g.add_leg(Monodromy::Zeta(1), b);
    g.add_leg(Monodromy::Zeta(4), b);
    g.add_edge(Edge::new(EdgeKind::E1Inf, vec![1], deg(0, 1), deg(1, 5), [a, b]));
    g.refresh_inf_degrees();
    assert!(g.is_valid(), "{:?}", g.validate());
    let (lay, ledger, _) = factor_ledger(&g, &[], &LocConfig::default()).unwrap();
    let t = LocExpr::t(&lay.ctx, 1);
    assert_eq!(ledger[0].factor, t.scale(&qi(5)).inv().unwrap());
}

#[test]
fn audit_matches() {
    let g = single(Level::Zero, None, 3, 2);
    let o = Oracles::default();
    let c = contribution(&g, &hhh(), &o, &LocConfig::default()).unwrap();
    assert!(audit(&g, &c, &hhh(), &o).unwrap());
}

