//! Graph-level trimming transforms.

use super::{DecoratedGraph, EdgeKind, GraphError, Leg, Level, Monodromy};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum Trim {
    SpareLeg(usize),
    NeutralVertex(usize),
    MarkingTypeEdge(usize),
    LeafEndEdge(usize),
    String(usize),
}

fn fail(s: &str) -> GraphError {
    GraphError::Precondition(s.to_string())
}

impl DecoratedGraph {
    pub fn is_spare_leg(&self, l: usize) -> bool {
        let Some(leg) = self.legs.get(l) else { return false };
        let v = leg.vertex;
        leg.monodromy == Monodromy::Zeta(1) && 2 * self.vertices[v].genus as usize + self.valence(v) > 3
    }

    pub fn is_neutral_vertex(&self, v: usize) -> bool {
        if v >= self.vertices.len() || self.vertices[v].genus != 0 {
            return false;
        }
        let (es, ls) = (self.vertex_edges(v), self.vertex_legs(v));
        !es.is_empty()
            && !ls.is_empty()
            && es.len() + ls.len() == 3
            && ls.iter().any(|l| self.legs[*l].monodromy == Monodromy::Zeta(1))
    }

    /// (v_-, v_+) for an edge ending at a level-inf vertex whose flag there is a node.
    fn leaf_ends(&self, e: usize) -> Option<(usize, usize)> {
        let ed = self.edges.get(e)?;
        if !matches!(ed.kind, EdgeKind::EInfInf | EdgeKind::E1Inf) {
            return None;
        }
        for k in [0, 1] {
            let (m, p) = (ed.ends[k], ed.ends[1 - k]);
            if self.vertices[p].level != Level::Inf || m == p {
                continue;
            }
            let plus_is_node = self.is_stable(p) || self.vertex_edges(p).len() >= 2;
            if self.vertices[m].genus == 0 && self.vertex_edges(m).len() == 1 && plus_is_node {
                return Some((m, p));
            }
        }
        None
    }

    pub fn is_marking_type_edge(&self, e: usize) -> bool {
        self.leaf_ends(e).is_some_and(|(m, _)| self.vertex_legs(m).len() == 1)
    }

    pub fn is_leaf_end_edge(&self, e: usize) -> bool {
        self.leaf_ends(e).is_some_and(|(m, p)| {
            let k = if self.edges[e].ends[0] == p { 0 } else { 1 };
            self.vertex_legs(m).is_empty() && self.flag_monodromy(e, k) == Monodromy::Zeta(4)
        })
    }

    pub fn is_string(&self, e: usize) -> bool {
        self.strings().contains(&e)
    }

    pub fn count_feature(&self, t: &Trim) -> usize {
        match t {
            Trim::SpareLeg(_) => (0..self.legs.len()).filter(|l| self.is_spare_leg(*l)).count(),
            Trim::NeutralVertex(_) => (0..self.vertices.len()).filter(|v| self.is_neutral_vertex(*v)).count(),
            Trim::MarkingTypeEdge(_) => (0..self.edges.len()).filter(|e| self.is_marking_type_edge(*e)).count(),
            Trim::LeafEndEdge(_) => (0..self.edges.len()).filter(|e| self.is_leaf_end_edge(*e)).count(),
            Trim::String(_) => self.strings().len(),
        }
    }

    /// Every trim available on this graph.
    pub fn available_trims(&self) -> Vec<Trim> {
        let mut out = Vec::new();
        out.extend((0..self.legs.len()).filter(|l| self.is_spare_leg(*l)).map(Trim::SpareLeg));
        out.extend((0..self.vertices.len()).filter(|v| self.is_neutral_vertex(*v)).map(Trim::NeutralVertex));
        out.extend((0..self.edges.len()).filter(|e| self.is_marking_type_edge(*e)).map(Trim::MarkingTypeEdge));
        out.extend((0..self.edges.len()).filter(|e| self.is_leaf_end_edge(*e)).map(Trim::LeafEndEdge));
        out.extend(self.strings().into_iter().map(Trim::String));
        out
    }

    /// Drop vertices and edges by index, remapping the rest.
    fn remove(&self, vs: &[usize], es: &[usize], ls: &[usize]) -> DecoratedGraph {
        let mut map = vec![usize::MAX; self.vertices.len()];
        let mut g = DecoratedGraph::new(self.n_hours);
        g.disconnected = self.disconnected;
        for (i, v) in self.vertices.iter().enumerate() {
            if !vs.contains(&i) {
                map[i] = g.vertices.len();
                g.vertices.push(v.clone());
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if !es.contains(&i) {
                let mut e = e.clone();
                e.ends = [map[e.ends[0]], map[e.ends[1]]];
                g.edges.push(e);
            }
        }
        for (i, l) in self.legs.iter().enumerate() {
            if !ls.contains(&i) {
                g.legs.push(Leg { monodromy: l.monodromy, vertex: map[l.vertex] });
            }
        }
        g
    }
}

fn finish(mut g: DecoratedGraph) -> Result<DecoratedGraph, GraphError> {
    g.refresh_inf_degrees();
    let v = g.validate();
    if v.is_empty() {
        Ok(g)
    } else {
        Err(GraphError::Precondition(format!("result invalid: {}", v.join("; "))))
    }
}

pub fn trim(g: &DecoratedGraph, t: Trim) -> Result<DecoratedGraph, GraphError> {
    match t {
        Trim::SpareLeg(l) => {
            if !g.is_spare_leg(l) {
                return Err(fail("leg is not a spare zeta_5 leg on a vertex with 2g+n>3"));
            }
            finish(g.remove(&[], &[], &[l]))
        }
        Trim::NeutralVertex(v) => {
            if !g.is_neutral_vertex(v) {
                return Err(fail("vertex is not neutral"));
            }
            let es = g.vertex_edges(v);
            let ls = g.vertex_legs(v);
            if es.len() == 1 {
                // one edge, legs zeta_5 and zeta_5^b: the edge becomes a zeta_5^b leg on the far vertex
                let (a, b) = (g.legs[ls[0]].monodromy, g.legs[ls[1]].monodromy);
                let keep = if a == Monodromy::Zeta(1) { b } else { a };
                let far = g.edges[es[0]].other(v);
                let mut h = g.clone();
                h.legs.push(Leg { monodromy: keep, vertex: far });
                finish(h.remove(&[v], &es, &ls))
            } else {
                let z = ls.iter().copied().find(|l| g.legs[*l].monodromy == Monodromy::Zeta(1)).unwrap();
                finish(g.remove(&[], &[], &[z]))
            }
        }
        Trim::MarkingTypeEdge(e) => {
            if !g.is_marking_type_edge(e) {
                return Err(fail("edge is not of marking type"));
            }
            let (m, p) = g.leaf_ends(e).unwrap();
            let l = g.vertex_legs(m)[0];
            let mut h = g.clone();
            h.legs[l].vertex = p;
            finish(h.remove(&[m], &[e], &[]))
        }
        Trim::LeafEndEdge(e) => {
            if !g.is_leaf_end_edge(e) {
                return Err(fail("edge is not of leaf-end type"));
            }
            let (m, p) = g.leaf_ends(e).unwrap();
            let mut h = g.clone();
            h.legs.push(Leg { monodromy: Monodromy::Zeta(1), vertex: p });
            finish(h.remove(&[m], &[e], &[]))
        }
        Trim::String(e) => {
            if !g.is_string(e) {
                return Err(fail("edge is not a string"));
            }
            let (m, p) = (g.edges[e].ends[0], g.edges[e].ends[1]);
            let mut h = g.clone();
            h.legs.push(Leg { monodromy: Monodromy::Phi, vertex: p });
            let ls = g.vertex_legs(m);
            finish(h.remove(&[m], &[e], &ls))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    /// Stable genus-0 infinity vertex with the given extra legs, plus E_1inf leaves of the given -5 d_e.
    fn star(legs: &[Monodromy], leaves: &[i64]) -> DecoratedGraph {
        let mut g = DecoratedGraph::new(1);
        let c = g.add_vertex(Vertex::new(Level::Inf, Some(1), 0));
        for m in legs {
            g.add_leg(*m, c);
        }
        for &b in leaves {
            let v = g.add_vertex(Vertex::new(Level::One, Some(1), 0));
            g.add_edge(Edge::new(EdgeKind::E1Inf, vec![1], deg(0, 1), deg(b, 5), [v, c]));
        }
        g.refresh_inf_degrees();
        g
    }

    #[test]
    fn leaf_end_becomes_zeta_leg() {
        let g = star(&[Monodromy::Zeta(1), Monodromy::Zeta(1), Monodromy::Zeta(4)], &[1]);
        let bad = g.validate();
        assert!(bad.is_empty(), "{:?}", bad);
        assert!(g.is_leaf_end_edge(0));
        let before = g.count_feature(&Trim::LeafEndEdge(0));
        let h = trim(&g, Trim::LeafEndEdge(0)).unwrap();
        assert_eq!(h.legs.last().unwrap().monodromy, Monodromy::Zeta(1));
        assert_eq!(h.count_feature(&Trim::LeafEndEdge(0)), before - 1);
    }

    #[test]
    fn spare_leg_removed() {
        let g = star(&[Monodromy::Zeta(1), Monodromy::Zeta(1), Monodromy::Zeta(4)], &[1]);
        assert!(g.is_spare_leg(0));
        let h = trim(&g, Trim::SpareLeg(0)).unwrap();
        assert_eq!(h.legs.len(), 2);
        assert!(h.is_stable(0));
        assert!(trim(&h, Trim::LeafEndEdge(7)).is_err());
    }
}
