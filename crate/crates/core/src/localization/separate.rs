//! Separating a graph at a level-1 node of an E_1inf edge.

use super::{contribution, Insertion, LocConfig, LocError};
use crate::algebra::LocExpr;
use crate::graphs::{DecoratedGraph, EdgeKind, Level, Monodromy, UnstableClass, Vertex};
use crate::oracles::Oracles;

#[derive(Clone, Debug)]
pub struct Separated {
    pub graph: DecoratedGraph,
    pub insertions: Vec<Insertion>,
    /// new leg at the old vertex (carries the separation class) and at the new one
    pub leg_l: usize,
    pub leg_lp: usize,
    pub components: usize,
}

#[derive(Clone, Debug)]
pub struct SeparationReport {
    pub edge: usize,
    pub components: usize,
    /// (-1)^delta(Theta) times the framed contribution
    pub lhs: LocExpr,
    pub rhs: LocExpr,
    pub holds: bool,
}

/// True when the level-1 end of E_1inf edge `e` is a level-separating node.
pub fn is_separating(g: &DecoratedGraph, e: usize) -> bool {
    let Some(ed) = g.edges.get(e) else { return false };
    if ed.kind != EdgeKind::E1Inf {
        return false;
    }
    let v = ed.ends[0];
    if g.vertices[v].level != Level::One {
        return false;
    }
    if g.is_stable(v) {
        return true;
    }
    if g.unstable_class(v) != Some(UnstableClass::V02) {
        return false;
    }
    g.flags_at(v)
        .into_iter()
        .filter(|(f, _)| *f != e)
        .all(|(f, _)| matches!(g.edges[f].kind, EdgeKind::E11 | EdgeKind::E01))
}

pub fn separate_node(g: &DecoratedGraph, e: usize, ins: &[Insertion]) -> Result<Separated, LocError> {
    if !is_separating(g, e) {
        return Err(LocError::Precondition(format!("edge {} has no level-separating node", e)));
    }
    let ed = &g.edges[e];
    let (v, alpha) = (ed.ends[0], ed.hours[0]);
    let a = -(ed.d_e() * crate::graphs::Deg::from_integer(5));
    let mut h = g.clone();
    let vp = h.add_vertex(Vertex::new(Level::One, Some(alpha), 0));
    h.edges[e].ends[0] = vp;
    let mut ins2 = ins.to_vec();
    ins2.resize(g.legs.len(), Insertion::one());
    let leg_l = h.add_leg(Monodromy::Rho, v);
    let leg_lp = h.add_leg(Monodromy::Rho, vp);
    ins2.push(Insertion::Separation { alpha, a });
    ins2.push(Insertion::one());
    let components = h.components();
    h.disconnected = components > 1;
    Ok(Separated { graph: h, insertions: ins2, leg_l, leg_lp, components })
}

fn sign(x: i64) -> i64 {
    if x.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Compare both sides of the separation identity on framed contributions.
pub fn separation_check(
    g: &DecoratedGraph,
    e: usize,
    ins: &[Insertion],
    oracles: &Oracles,
    cfg: &LocConfig,
) -> Result<SeparationReport, LocError> {
    let s = separate_node(g, e, ins)?;
    let c0 = contribution(g, ins, oracles, cfg)?;
    let c1 = contribution(&s.graph, &s.insertions, oracles, cfg)?;
    let d0 = g.delta().to_integer();
    let d1 = s.graph.delta().to_integer() + s.components as i64 - 1;
    let lhs = c0.framed.scale(&crate::algebra::qi(sign(d0)));
    let rhs = c1.framed.scale(&crate::algebra::qi(sign(d1)));
    let holds = lhs == rhs;
    Ok(SeparationReport { edge: e, components: s.components, lhs, rhs, holds })
}
