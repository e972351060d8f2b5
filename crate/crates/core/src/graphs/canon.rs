//! Canonical labeling by color refinement followed by a search over
//! orderings within the refined cells.

use super::{deg_string, DecoratedGraph, Deg, Edge, EdgeKind, Level, Monodromy};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Canonical {
    pub key: String,
    pub graph: DecoratedGraph,
    /// Vertex automorphisms times parallel-edge swaps.
    pub aut: u64,
}

fn level_code(l: Level) -> i64 {
    match l {
        Level::Zero => 0,
        Level::One => 1,
        Level::Inf => 2,
    }
}

fn kind_code(k: EdgeKind) -> i64 {
    match k {
        EdgeKind::E01 => 0,
        EdgeKind::E1Inf => 1,
        EdgeKind::E11 => 2,
        EdgeKind::EInfInf => 3,
        EdgeKind::E0Inf => 4,
        EdgeKind::E00 => 5,
    }
}

fn mono_code(m: Monodromy) -> i64 {
    match m {
        Monodromy::Zeta(k) => k as i64,
        Monodromy::Broad => 0,
        Monodromy::Rho => 6,
        Monodromy::Phi => 5,
    }
}

fn push_deg(out: &mut Vec<i64>, d: &Deg) {
    out.push(*d.numer());
    out.push(*d.denom());
}

fn vertex_code(g: &DecoratedGraph, v: usize) -> Vec<i64> {
    let x = &g.vertices[v];
    let mut c = vec![level_code(x.level), x.hour.map(|h| h as i64).unwrap_or(0), x.genus as i64];
    push_deg(&mut c, &x.d0);
    push_deg(&mut c, &x.dinf);
    let legs = g.vertex_legs(v);
    c.push(legs.len() as i64);
    c.extend(legs.iter().map(|l| *l as i64));
    c
}

/// Edge descriptor seen from end `k`, excluding endpoint identities.
fn edge_code_from(e: &Edge, k: usize) -> Vec<i64> {
    let o = 1 - k;
    let mut c = vec![kind_code(e.kind), k as i64, e.hour_at(k) as i64, e.hour_at(o) as i64];
    push_deg(&mut c, &e.d0);
    push_deg(&mut c, &e.dinf);
    match e.node_monodromy {
        Some(m) => {
            c.push(m[k] as i64);
            c.push(m[o] as i64)
        }
        None => {
            c.push(-1);
            c.push(-1)
        }
    }
    c
}

fn refine(g: &DecoratedGraph) -> Vec<usize> {
    let n = g.vertices.len();
    let mut sig: Vec<Vec<i64>> = (0..n).map(|v| vertex_code(g, v)).collect();
    let mut colors = rank(&sig);
    loop {
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut nb: Vec<Vec<i64>> = Vec::new();
            for (ei, k) in g.flags_at(v) {
                let e = &g.edges[ei];
                let mut c = edge_code_from(e, k);
                c.push(colors[e.ends[1 - k]] as i64);
                nb.push(c);
            }
            nb.sort();
            let mut s = vec![colors[v] as i64];
            for c in nb {
                s.push(c.len() as i64);
                s.extend(c);
            }
            next.push(s);
        }
        let new_colors = rank(&next);
        let before = colors.iter().collect::<std::collections::BTreeSet<_>>().len();
        let after = new_colors.iter().collect::<std::collections::BTreeSet<_>>().len();
        sig = next;
        colors = new_colors;
        if after == before {
            break;
        }
    }
    let _ = sig;
    colors
}

fn rank(sig: &[Vec<i64>]) -> Vec<usize> {
    let mut distinct: Vec<&Vec<i64>> = sig.iter().collect();
    distinct.sort();
    distinct.dedup();
    sig.iter().map(|s| distinct.binary_search(&s).unwrap()).collect()
}

/// Serialization of the graph under the vertex order `order` (position -> vertex).
fn serialize(g: &DecoratedGraph, order: &[usize], pos: &[usize]) -> (Vec<i64>, Vec<Vec<i64>>) {
    let mut key = vec![g.n_hours as i64, g.disconnected as i64, order.len() as i64];
    for &v in order {
        let c = vertex_code(g, v);
        key.push(c.len() as i64);
        key.extend(c);
    }
    let mut edges: Vec<Vec<i64>> = g
        .edges
        .iter()
        .map(|e| {
            let enc = |k: usize| {
                let mut c = vec![kind_code(e.kind), pos[e.ends[k]] as i64, pos[e.ends[1 - k]] as i64];
                c.extend(edge_code_from(e, k).into_iter().skip(2));
                c
            };
            match e.kind {
                EdgeKind::E11 | EdgeKind::EInfInf => enc(0).min(enc(1)),
                _ => enc(0),
            }
        })
        .collect();
    edges.sort();
    key.push(edges.len() as i64);
    for e in &edges {
        key.extend(e.iter().copied());
    }
    for l in &g.legs {
        key.push(mono_code(l.monodromy));
        key.push(pos[l.vertex] as i64);
    }
    (key, edges)
}

fn next_permutation(a: &mut [usize]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

fn search(g: &DecoratedGraph, cells: &mut [Vec<usize>], idx: usize, best: &mut Option<(Vec<i64>, Vec<usize>, u64)>) {
    if idx == cells.len() {
        let order: Vec<usize> = cells.iter().flatten().copied().collect();
        let mut pos = vec![0; order.len()];
        for (p, v) in order.iter().enumerate() {
            pos[*v] = p;
        }
        let (key, _) = serialize(g, &order, &pos);
        match best {
            Some((bk, bo, count)) => {
                if key < *bk {
                    *best = Some((key, order, 1));
                } else if key == *bk {
                    *count += 1;
                    let _ = bo;
                }
            }
            None => *best = Some((key, order, 1)),
        }
        return;
    }
    cells[idx].sort();
    loop {
        search(g, cells, idx + 1, best);
        if !next_permutation(&mut cells[idx]) {
            break;
        }
    }
    cells[idx].sort();
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn canonical(g: &DecoratedGraph) -> Canonical {
    let colors = refine(g);
    let ncolors = colors.iter().max().map(|m| m + 1).unwrap_or(0);
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); ncolors];
    for (v, c) in colors.iter().enumerate() {
        cells[*c].push(v);
    }
    let mut best = None;
    search(g, &mut cells, 0, &mut best);
    let (_, order, count) = best.unwrap_or((vec![], vec![], 1));
    let relabeled = canonical_relabel_with(g, &order);
    let pos: Vec<usize> = (0..order.len()).collect();
    let (_, edges) = serialize(&relabeled, &pos, &pos);
    let mut parallel: BTreeMap<&Vec<i64>, usize> = BTreeMap::new();
    for e in &edges {
        *parallel.entry(e).or_default() += 1;
    }
    let aut = count * parallel.values().map(|m| factorial(*m)).product::<u64>();
    Canonical { key: key_string(&relabeled), graph: relabeled, aut }
}

fn canonical_relabel_with(g: &DecoratedGraph, order: &[usize]) -> DecoratedGraph {
    let mut pos = vec![0; order.len()];
    for (p, v) in order.iter().enumerate() {
        pos[*v] = p;
    }
    let mut out = DecoratedGraph::new(g.n_hours);
    out.disconnected = g.disconnected;
    out.vertices = order.iter().map(|v| g.vertices[*v].clone()).collect();
    let mut edges: Vec<Edge> = g
        .edges
        .iter()
        .map(|e| {
            let mut e = e.clone();
            e.ends = [pos[e.ends[0]], pos[e.ends[1]]];
            if matches!(e.kind, EdgeKind::E11 | EdgeKind::EInfInf) && e.ends[0] > e.ends[1] {
                e.ends.swap(0, 1);
                e.hours.swap(0, 1);
                if let Some(m) = e.node_monodromy.as_mut() {
                    m.swap(0, 1);
                }
            }
            e
        })
        .collect();
    edges.sort_by_key(|e| (kind_code(e.kind), e.ends, e.hours.clone(), e.d0, e.dinf, e.node_monodromy));
    out.edges = edges;
    out.legs = g.legs.iter().map(|l| super::Leg { monodromy: l.monodromy, vertex: pos[l.vertex] }).collect();
    out
}

fn key_string(g: &DecoratedGraph) -> String {
    let lv = |l: Level| match l {
        Level::Zero => "0",
        Level::One => "1",
        Level::Inf => "inf",
    };
    let kd = |k: EdgeKind| match k {
        EdgeKind::E01 => "01",
        EdgeKind::E1Inf => "1inf",
        EdgeKind::E11 => "11",
        EdgeKind::EInfInf => "infinf",
        EdgeKind::E0Inf => "0inf",
        EdgeKind::E00 => "00",
    };
    let mo = |m: Monodromy| match m {
        Monodromy::Zeta(k) => format!("z{}", k),
        Monodromy::Broad => "1".into(),
        Monodromy::Rho => "rho".into(),
        Monodromy::Phi => "phi".into(),
    };
    let vs: Vec<String> = g
        .vertices
        .iter()
        .map(|v| {
            format!(
                "{}{}g{}({},{})",
                lv(v.level),
                v.hour.map(|h| format!("@{}", h)).unwrap_or_default(),
                v.genus,
                deg_string(&v.d0),
                deg_string(&v.dinf)
            )
        })
        .collect();
    let es: Vec<String> = g
        .edges
        .iter()
        .map(|e| {
            let hs: Vec<String> = e.hours.iter().map(|h| h.to_string()).collect();
            let nm = e.node_monodromy.map(|m| format!("[{}{}]", m[0], m[1])).unwrap_or_default();
            format!(
                "{}:{}-{}@{}({},{}){}",
                kd(e.kind),
                e.ends[0],
                e.ends[1],
                hs.join(","),
                deg_string(&e.d0),
                deg_string(&e.dinf),
                nm
            )
        })
        .collect();
    let ls: Vec<String> = g.legs.iter().map(|l| format!("{}>{}", mo(l.monodromy), l.vertex)).collect();
    format!(
        "N{}{}|V:{}|E:{}|L:{}",
        g.n_hours,
        if g.disconnected { "d" } else { "" },
        vs.join(";"),
        es.join(";"),
        ls.join(";")
    )
}

pub fn canonical_form(g: &DecoratedGraph) -> String {
    canonical(g).key
}

pub fn canonical_relabel(g: &DecoratedGraph) -> DecoratedGraph {
    canonical(g).graph
}

pub fn aut_order(g: &DecoratedGraph) -> u64 {
    canonical(g).aut
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    fn double_edge() -> DecoratedGraph {
        let mut g = DecoratedGraph::new(1);
        let a = g.add_vertex(Vertex::new(Level::Zero, None, 0));
        g.add_leg(Monodromy::Rho, a);
        let b = g.add_vertex(Vertex::new(Level::One, Some(1), 0));
        for _ in 0..2 {
            g.add_edge(Edge::new(EdgeKind::E01, vec![1], deg(1, 1), deg(0, 1), [a, b]));
        }
        g
    }

    #[test]
    fn parallel_edges_swap() {
        let g = double_edge();
        assert!(g.is_valid(), "{:?}", g.validate());
        assert_eq!(aut_order(&g), 2);
    }

    #[test]
    fn labeled_legs_break_symmetry() {
        let mut g = DecoratedGraph::new(1);
        let c = g.add_vertex(Vertex::new(Level::Zero, None, 1));
        for _ in 0..2 {
            let v = g.add_vertex(Vertex::new(Level::One, Some(1), 0));
            g.add_leg(Monodromy::Rho, v);
            g.add_edge(Edge::new(EdgeKind::E01, vec![1], deg(1, 1), deg(0, 1), [c, v]));
        }
        assert_eq!(aut_order(&g), 1);
        g.legs.clear();
        assert_eq!(aut_order(&g), 2);
    }

    #[test]
    fn relabel_invariance() {
        let g = double_edge();
        let mut h = DecoratedGraph::new(1);
        let b = h.add_vertex(Vertex::new(Level::One, Some(1), 0));
        let a = h.add_vertex(Vertex::new(Level::Zero, None, 0));
        h.add_leg(Monodromy::Rho, a);
        for _ in 0..2 {
            h.add_edge(Edge::new(EdgeKind::E01, vec![1], deg(1, 1), deg(0, 1), [a, b]));
        }
        assert_eq!(canonical_form(&g), canonical_form(&h));
        assert_eq!(canonical_relabel(&g), canonical_relabel(&h));
    }
}
