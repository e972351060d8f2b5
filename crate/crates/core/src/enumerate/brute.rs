//! Labeled search over every decoration, filtered afterwards. Test oracle.

use super::{accept, dedupe, EnumError, EnumSpec, EnumeratedGraph};
use crate::graphs::{canonical, DecoratedGraph, Deg, Edge, EdgeKind, Level, Vertex};
use std::collections::{BTreeMap, BTreeSet};

const LEVELS: [Level; 3] = [Level::Zero, Level::One, Level::Inf];

/// Every labeled multigraph on n vertices with e edges (as pair lists).
fn multigraphs(n: usize, e: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    fn go(pairs: &[(usize, usize)], from: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in from..pairs.len() {
            cur.push(pairs[i]);
            go(pairs, i, left - 1, cur, out);
            cur.pop();
        }
    }
    go(&pairs, 0, e, &mut Vec::new(), &mut out);
    out
}

fn product(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in sizes {
        let mut next = Vec::new();
        for p in &out {
            for x in 0..s {
                let mut q = p.clone();
                q.push(x);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

fn edge_between(g: &DecoratedGraph, a: usize, b: usize, d: Deg) -> Option<Edge> {
    let (la, lb) = (g.vertices[a].level, g.vertices[b].level);
    let (ha, hb) = (g.vertices[a].hour.unwrap_or(0), g.vertices[b].hour.unwrap_or(0));
    let z = Deg::from_integer(0);
    Some(match (la, lb) {
        (Level::Zero, Level::One) => Edge::new(EdgeKind::E01, vec![hb], d, z, [a, b]),
        (Level::One, Level::Zero) => Edge::new(EdgeKind::E01, vec![ha], d, z, [b, a]),
        (Level::One, Level::One) => Edge::new(EdgeKind::E11, vec![ha, hb], d, z, [a, b]),
        (Level::One, Level::Inf) => Edge::new(EdgeKind::E1Inf, vec![ha], z, d, [a, b]),
        (Level::Inf, Level::One) => Edge::new(EdgeKind::E1Inf, vec![hb], z, d, [b, a]),
        (Level::Zero, Level::Inf) => Edge::new(EdgeKind::E0Inf, vec![hb], d, d, [a, b]),
        (Level::Inf, Level::Zero) => Edge::new(EdgeKind::E0Inf, vec![ha], d, d, [b, a]),
        // E_00 is empty and E_inf,inf is not generated
        _ => return None,
    })
}

/// All valid labeled graphs with the spec's totals, flat or not, up to isomorphism.
pub fn brute_force_raw(spec: &EnumSpec, size_bound: usize) -> Result<Vec<DecoratedGraph>, EnumError> {
    spec.check()?;
    if size_bound > 6 {
        return Err(EnumError::Bound(size_bound));
    }
    let mut found: BTreeMap<String, DecoratedGraph> = BTreeMap::new();
    if !spec.d0.is_integer() {
        return Ok(vec![]);
    }
    let d0 = spec.d0.to_integer();
    let n_legs = spec.legs.len();
    let mut skeletons = BTreeSet::new();
    for nv in 1..=size_bound {
        for b1 in 0..=spec.g as usize {
            let ne = nv - 1 + b1;
            // per-edge degree candidates: integers up to d0, fifths up to a loose cap
            let cap5 = (spec.dinf * Deg::from_integer(5)).to_integer() + 2 * spec.g as i64 + 2 * ne as i64 + n_legs as i64;
            let mut cands: Vec<Deg> = (1..=cap5.max(5 * d0)).map(|k| Deg::new(k, 5)).collect();
            cands.dedup();
            for mg in multigraphs(nv, ne) {
                let mut seen = vec![false; nv];
                seen[0] = true;
                let mut changed = true;
                while changed {
                    changed = false;
                    for &(a, b) in &mg {
                        if seen[a] != seen[b] {
                            seen[a] = true;
                            seen[b] = true;
                            changed = true;
                        }
                    }
                }
                if seen.iter().any(|s| !s) {
                    continue;
                }
                for lv in product(&vec![3; nv]) {
                    let levels: Vec<Level> = lv.iter().map(|i| LEVELS[*i]).collect();
                    if mg.iter().any(|(a, b)| {
                        matches!((levels[*a], levels[*b]), (Level::Zero, Level::Zero) | (Level::Inf, Level::Inf))
                    }) {
                        continue;
                    }
                    // E01, E11 and E0inf edges each carry a positive integral d_0
                    let d0_edges = mg
                        .iter()
                        .filter(|(a, b)| !matches!((levels[*a], levels[*b]), (Level::One, Level::Inf) | (Level::Inf, Level::One)))
                        .count();
                    if d0_edges as i64 > d0 {
                        continue;
                    }
                    // isomorphic skeletons have isomorphic completions
                    if !skeletons.insert(skeleton_key(&levels, &mg, spec.n_hours)) {
                        continue;
                    }
                    let hours_sz: Vec<usize> =
                        levels.iter().map(|l| if *l == Level::Zero { 1 } else { spec.n_hours as usize }).collect();
                    for hs in product(&hours_sz) {
                        if !hours_ok(&levels, &hs, &mg) {
                            continue;
                        }
                        for gs in product(&vec![spec.g as usize + 1; nv]) {
                            if gs.iter().sum::<usize>() + b1 != spec.g as usize {
                                continue;
                            }
                            let dsz: Vec<usize> =
                                levels.iter().map(|l| if *l == Level::Zero { d0 as usize + 1 } else { 1 }).collect();
                            for vd in product(&dsz) {
                                if (vd.iter().sum::<usize>() + d0_edges) as i64 > d0 {
                                    continue;
                                }
                                let mut base = DecoratedGraph::new(spec.n_hours);
                                for v in 0..nv {
                                    let hour = if levels[v] == Level::Zero { None } else { Some(hs[v] as u32 + 1) };
                                    let mut x = Vertex::new(levels[v], hour, gs[v] as u32);
                                    x.d0 = Deg::from_integer(vd[v] as i64);
                                    base.add_vertex(x);
                                }
                                for legs in product(&vec![nv; n_legs]) {
                                    let mut g = base.clone();
                                    for (l, v) in legs.iter().enumerate() {
                                        g.add_leg(spec.legs[l], *v);
                                    }
                                    if shape_ok(&g, &mg) {
                                        edge_degrees(&g, &mg, &cands, spec, &mut found);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(found.into_values().collect())
}

/// Canonical key of the multigraph decorated by levels only.
fn skeleton_key(levels: &[Level], mg: &[(usize, usize)], n_hours: u32) -> String {
    let mut g = DecoratedGraph::new(n_hours);
    for l in levels {
        g.add_vertex(Vertex::new(*l, None, 0));
    }
    for &(a, b) in mg {
        if let Some(e) = edge_between(&g, a, b, Deg::from_integer(1)) {
            g.edges.push(e);
        }
    }
    canonical(&g).key
}

/// E11 ends have different hours, E1inf ends the same one.
fn hours_ok(levels: &[Level], hs: &[usize], mg: &[(usize, usize)]) -> bool {
    mg.iter().all(|&(a, b)| match (levels[a], levels[b]) {
        (Level::One, Level::One) => hs[a] != hs[b],
        (Level::One, Level::Inf) | (Level::Inf, Level::One) => hs[a] == hs[b],
        _ => true,
    })
}

/// Valences are fixed before degrees: unstable shapes can already be rejected.
fn shape_ok(g: &DecoratedGraph, mg: &[(usize, usize)]) -> bool {
    (0..g.vertices.len()).all(|v| {
        let x = &g.vertices[v];
        let ne = mg.iter().map(|(a, b)| (*a == v) as usize + (*b == v) as usize).sum::<usize>();
        let nl = g.vertex_legs(v).len();
        x.genus > 0 || x.d0 > Deg::from_integer(0) || ne + nl >= 3 || matches!((nl, ne), (0, 1) | (0, 2) | (1, 1))
    })
}

/// Sum of forced level-inf vertex degrees, known once valences are.
fn forced_inf(g: &DecoratedGraph, mg: &[(usize, usize)]) -> Deg {
    let mut s = Deg::from_integer(0);
    for v in 0..g.vertices.len() {
        let x = &g.vertices[v];
        if x.level != Level::Inf {
            continue;
        }
        let n = mg.iter().map(|(a, b)| (*a == v) as i64 + (*b == v) as i64).sum::<i64>() + g.vertex_legs(v).len() as i64;
        if !(x.genus == 0 && n < 3) {
            s -= Deg::new(2 * x.genus as i64 - 2 + n, 5);
        }
    }
    s
}

fn edge_degrees(g: &DecoratedGraph, mg: &[(usize, usize)], cands: &[Deg], spec: &EnumSpec, found: &mut BTreeMap<String, DecoratedGraph>) {
    fn go(
        g: &DecoratedGraph,
        mg: &[(usize, usize)],
        cands: &[Deg],
        spec: &EnumSpec,
        i: usize,
        d0_left: Deg,
        dinf_left: Deg,
        need: &[(Deg, Deg)],
        cur: &mut DecoratedGraph,
        found: &mut BTreeMap<String, DecoratedGraph>,
    ) {
        if d0_left < need[i].0 || dinf_left < need[i].1 {
            return;
        }
        if i == mg.len() {
            let mut h = cur.clone();
            h.refresh_inf_degrees();
            if h.is_valid() && h.total_genus() == spec.g as i64 && h.total_d0() == spec.d0 && h.total_dinf() == spec.dinf {
                let c = canonical(&h);
                found.entry(c.key).or_insert(c.graph);
            }
            return;
        }
        for d in cands {
            let Some(e) = edge_between(g, mg[i].0, mg[i].1, *d) else { return };
            if e.d0 > d0_left || e.dinf > dinf_left {
                continue;
            }
            // only E1inf edges take fractional degrees
            if e.kind != EdgeKind::E1Inf && !d.is_integer() {
                continue;
            }
            cur.edges.push(e.clone());
            go(g, mg, cands, spec, i + 1, d0_left - e.d0, dinf_left - e.dinf, need, cur, found);
            cur.edges.pop();
        }
    }
    let used: Deg = g.vertices.iter().map(|v| v.d0).fold(Deg::from_integer(0), |a, b| a + b);
    // least (d_0, d_inf) the edges from i on still need
    let one = Deg::from_integer(1);
    let mut need = vec![(Deg::from_integer(0), Deg::from_integer(0)); mg.len() + 1];
    for i in (0..mg.len()).rev() {
        let (a, b) = need[i + 1];
        need[i] = match edge_between(g, mg[i].0, mg[i].1, one).map(|e| e.kind) {
            Some(EdgeKind::E1Inf) => (a, b + Deg::new(1, 5)),
            Some(EdgeKind::E0Inf) => (a + one, b + one),
            _ => (a + one, b),
        };
    }
    let mut cur = g.clone();
    let dinf_edges = spec.dinf - forced_inf(g, mg);
    go(g, mg, cands, spec, 0, spec.d0 - used, dinf_edges, &need, &mut cur, found);
}

/// The brute-force counterpart of `enumerate`.
pub fn brute_force_oracle(spec: &EnumSpec, size_bound: usize) -> Result<Vec<EnumeratedGraph>, EnumError> {
    let raw = brute_force_raw(spec, size_bound)?;
    Ok(dedupe(raw.into_iter().filter_map(|g| accept(g, spec, true))))
}
