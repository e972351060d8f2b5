//! Flat decorated graphs with given numerical data.
//!
//! The structured generator walks sorted vertex multisets, wires edges
//! between admissible level pairs, places legs, prunes unstable vertices of
//! the wrong shape and finally distributes degrees. `brute_force_oracle`
//! searches labeled graphs with no structure and is only meant for tests.

mod brute;

pub use brute::{brute_force_oracle, brute_force_raw};

use crate::graphs::{canonical, DecoratedGraph, Deg, Edge, EdgeKind, Level, Monodromy, Regularity, Vertex};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EnumError {
    #[error("numerical data outside the stable range: {0}")]
    Unstable(String),
    #[error("bad spec: {0}")]
    BadSpec(String),
    #[error("size bound {0} exceeds the brute-force limit of 6 vertices")]
    Bound(usize),
}

fn default_max_vertices() -> usize {
    6
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumSpec {
    pub g: u32,
    /// ordered leg decorations
    pub legs: Vec<Monodromy>,
    #[serde(with = "deg_serde")]
    pub d0: Deg,
    #[serde(with = "deg_serde", default)]
    pub dinf: Deg,
    pub n_hours: u32,
    #[serde(default)]
    pub include_irregular: bool,
    #[serde(default)]
    pub include_pure_loops: bool,
    #[serde(default = "default_max_vertices")]
    pub max_vertices: usize,
}

pub(crate) mod deg_serde {
    use crate::graphs::{deg_string, parse_deg, Deg};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Deg, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&deg_string(d))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Deg, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            I(i64),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::I(i) => Ok(Deg::from_integer(i)),
            Raw::S(s) => parse_deg(&s).ok_or_else(|| serde::de::Error::custom(format!("bad degree {:?}", s))),
        }
    }
}

impl EnumSpec {
    /// g, n legs of type (1,rho), degrees (d0, dinf), N hours.
    pub fn rho(g: u32, n: usize, d0: Deg, dinf: Deg, n_hours: u32) -> Self {
        EnumSpec {
            g,
            legs: vec![Monodromy::Rho; n],
            d0,
            dinf,
            n_hours,
            include_irregular: false,
            include_pure_loops: false,
            max_vertices: default_max_vertices(),
        }
    }

    /// Vertex count every regular graph with this data respects: each E_1inf
    /// edge returns at least 1/5 of d_inf net, up to 2g_v/5 per level-inf
    /// vertex and 1/5 per leg that may sit at infinity.
    pub fn regular_vertex_bound(&self) -> usize {
        let five_dinf = (self.dinf * Deg::from_integer(5)).ceil().to_integer().max(0) as usize;
        let off_rho = self.legs.iter().filter(|m| **m != Monodromy::Rho).count();
        1 + self.d0.ceil().to_integer().max(0) as usize + five_dinf + 2 * self.g as usize + off_rho
    }

    /// The bound used by `enumerate`: `max_vertices` once irregular graphs or
    /// pure loops are requested, the regular bound otherwise.
    pub fn vertex_bound(&self) -> usize {
        if self.include_irregular || self.include_pure_loops {
            self.max_vertices
        } else {
            self.regular_vertex_bound()
        }
    }

    pub fn check(&self) -> Result<(), EnumError> {
        if self.n_hours == 0 {
            return Err(EnumError::BadSpec("N must be positive".into()));
        }
        for d in [&self.d0, &self.dinf] {
            if 5 % *d.denom() != 0 || *d < Deg::from_integer(0) {
                return Err(EnumError::BadSpec(format!("degree {} not in (1/5)Z>=0", d)));
            }
        }
        let n = self.legs.len() as i64;
        let positive = self.d0 > Deg::from_integer(0) || self.dinf > Deg::from_integer(0);
        if 2 * self.g as i64 - 2 + n <= 0 && !positive {
            return Err(EnumError::Unstable(format!("g={} n={} d=0", self.g, n)));
        }
        Ok(())
    }
}

/// One emitted graph in canonical labeling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedGraph {
    pub canonical: String,
    pub graph: DecoratedGraph,
    pub regularity: Regularity,
}

impl EnumeratedGraph {
    pub fn to_json(&self) -> Value {
        let mut v = self.graph.to_json();
        v["canonical"] = json!(self.canonical);
        v["regularity"] = json!(self.regularity);
        v
    }
}

pub(crate) fn leg_levels(m: Monodromy) -> &'static [Level] {
    match m {
        Monodromy::Rho => &[Level::Zero, Level::One],
        Monodromy::Phi => &[Level::One, Level::Inf],
        Monodromy::Zeta(_) => &[Level::Inf],
        Monodromy::Broad => &[],
    }
}

/// Shared final filter: validity, totals, flatness and the regularity flags.
pub(crate) fn accept(mut g: DecoratedGraph, spec: &EnumSpec, need_flat: bool) -> Option<EnumeratedGraph> {
    g.refresh_inf_degrees();
    if !g.is_valid() {
        return None;
    }
    if g.total_genus() != spec.g as i64 || g.total_d0() != spec.d0 || g.total_dinf() != spec.dinf {
        return None;
    }
    if g.legs.iter().map(|l| l.monodromy).ne(spec.legs.iter().copied()) {
        return None;
    }
    let regularity = if g.is_flat() {
        g.classify_regular().ok()?
    } else if need_flat {
        return None;
    } else {
        Regularity::Irregular("not flat".into())
    };
    let keep = match &regularity {
        Regularity::Regular => true,
        Regularity::Irregular(_) => spec.include_irregular,
        Regularity::PureLoop => spec.include_pure_loops,
    };
    if !keep {
        return None;
    }
    let c = canonical(&g);
    Some(EnumeratedGraph { canonical: c.key, graph: c.graph, regularity })
}

pub(crate) fn dedupe(it: impl IntoIterator<Item = EnumeratedGraph>) -> Vec<EnumeratedGraph> {
    let m: BTreeMap<String, EnumeratedGraph> = it.into_iter().map(|x| (x.canonical.clone(), x)).collect();
    m.into_values().collect()
}

/// Edge kind and orientation for a pair of levels, if the pair may carry an edge.
pub(crate) fn kind_for(a: Level, b: Level, irregular: bool) -> Option<(EdgeKind, bool)> {
    use Level::*;
    match (a, b) {
        (Zero, One) => Some((EdgeKind::E01, false)),
        (One, Zero) => Some((EdgeKind::E01, true)),
        (One, One) => Some((EdgeKind::E11, false)),
        (One, Inf) => Some((EdgeKind::E1Inf, false)),
        (Inf, One) => Some((EdgeKind::E1Inf, true)),
        (Zero, Inf) if irregular => Some((EdgeKind::E0Inf, false)),
        (Inf, Zero) if irregular => Some((EdgeKind::E0Inf, true)),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct VDec {
    level: Level,
    hour: u32,
    genus: u32,
    d0: i64,
}

impl VDec {
    fn vertex(&self) -> Vertex {
        let mut v = Vertex::new(self.level, if self.level == Level::Zero { None } else { Some(self.hour) }, self.genus);
        v.d0 = Deg::from_integer(self.d0);
        v
    }
}

/// All k-part compositions of `total` into positive integers.
pub(crate) fn compositions(total: i64, k: usize) -> Vec<Vec<i64>> {
    fn go(total: i64, k: usize, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if k == 0 {
            if total == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for x in 1..=(total - (k as i64 - 1)) {
            cur.push(x);
            go(total - x, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if total >= k as i64 {
        go(total, k, &mut Vec::new(), &mut out);
    } else if k == 0 && total == 0 {
        out.push(vec![]);
    }
    out
}

fn connected(n: usize, pairs: &[(usize, usize)]) -> bool {
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(x) = stack.pop() {
        for &(a, b) in pairs {
            for (p, q) in [(a, b), (b, a)] {
                if p == x && !seen[q] {
                    seen[q] = true;
                    stack.push(q);
                }
            }
        }
    }
    seen.iter().all(|s| *s)
}

struct Structured<'a> {
    spec: &'a EnumSpec,
    dmax: i64,
}

impl Structured<'_> {
    fn decorations(&self) -> Vec<VDec> {
        let s = self.spec;
        let mut out = Vec::new();
        for genus in 0..=s.g {
            for d0 in 0..=self.dmax {
                out.push(VDec { level: Level::Zero, hour: 0, genus, d0 });
            }
            for lv in [Level::One, Level::Inf] {
                for hour in 1..=s.n_hours {
                    out.push(VDec { level: lv, hour, genus, d0: 0 });
                }
            }
        }
        out.sort();
        out
    }

    /// Nondecreasing vertex lists with genus and degree budgets.
    fn multisets(&self) -> Vec<Vec<VDec>> {
        let decs = self.decorations();
        let mut out = Vec::new();
        fn go(decs: &[VDec], from: usize, left: usize, g: i64, d: i64, cur: &mut Vec<VDec>, out: &mut Vec<Vec<VDec>>) {
            if !cur.is_empty() {
                out.push(cur.clone());
            }
            if left == 0 {
                return;
            }
            for i in from..decs.len() {
                let x = decs[i];
                if x.genus as i64 > g || x.d0 > d {
                    continue;
                }
                cur.push(x);
                go(decs, i, left - 1, g - x.genus as i64, d - x.d0, cur, out);
                cur.pop();
            }
        }
        go(&decs, 0, self.spec.vertex_bound(), self.spec.g as i64, self.dmax, &mut Vec::new(), &mut out);
        out
    }

    fn from_multiset(&self, vs: &[VDec]) -> Vec<EnumeratedGraph> {
        let s = self.spec;
        let nv = vs.len();
        let gsum: i64 = vs.iter().map(|v| v.genus as i64).sum();
        let b1 = s.g as i64 - gsum;
        let ne = nv as i64 - 1 + b1;
        if ne < 0 {
            return vec![];
        }
        let d_left = self.dmax - vs.iter().map(|v| v.d0).sum::<i64>();
        let mut pairs = Vec::new();
        for i in 0..nv {
            for j in i + 1..nv {
                let (a, b) = (vs[i], vs[j]);
                let Some((kind, _)) = kind_for(a.level, b.level, s.include_irregular) else { continue };
                let ok = match kind {
                    EdgeKind::E11 => a.hour != b.hour,
                    EdgeKind::E1Inf => a.hour == b.hour,
                    _ => true,
                };
                if ok {
                    pairs.push((i, j, kind));
                }
            }
        }
        let mut out = Vec::new();
        let mut mult = vec![0usize; pairs.len()];
        self.wire(vs, &pairs, 0, ne as usize, d_left, &mut mult, &mut out);
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn wire(
        &self,
        vs: &[VDec],
        pairs: &[(usize, usize, EdgeKind)],
        idx: usize,
        left: usize,
        int_left: i64,
        mult: &mut Vec<usize>,
        out: &mut Vec<EnumeratedGraph>,
    ) {
        if idx == pairs.len() {
            if left == 0 {
                self.with_edges(vs, pairs, mult, out);
            }
            return;
        }
        let integral = pairs[idx].2 != EdgeKind::E1Inf;
        for m in 0..=left {
            if integral && m as i64 > int_left {
                break;
            }
            mult[idx] = m;
            let used = if integral { m as i64 } else { 0 };
            self.wire(vs, pairs, idx + 1, left - m, int_left - used, mult, out);
        }
        mult[idx] = 0;
    }

    fn with_edges(&self, vs: &[VDec], pairs: &[(usize, usize, EdgeKind)], mult: &[usize], out: &mut Vec<EnumeratedGraph>) {
        let mut edges = Vec::new();
        for (p, m) in pairs.iter().zip(mult) {
            for _ in 0..*m {
                edges.push(*p);
            }
        }
        let plain: Vec<(usize, usize)> = edges.iter().map(|(a, b, _)| (*a, *b)).collect();
        if !connected(vs.len(), &plain) {
            return;
        }
        let mut deg = vec![0usize; vs.len()];
        for (a, b) in &plain {
            deg[*a] += 1;
            deg[*b] += 1;
        }
        let mut at = vec![usize::MAX; self.spec.legs.len()];
        self.place_legs(vs, &edges, &deg, 0, &mut at, out);
    }

    fn place_legs(
        &self,
        vs: &[VDec],
        edges: &[(usize, usize, EdgeKind)],
        deg: &[usize],
        l: usize,
        at: &mut Vec<usize>,
        out: &mut Vec<EnumeratedGraph>,
    ) {
        if l == at.len() {
            let mut nl = vec![0usize; vs.len()];
            for v in at.iter() {
                nl[*v] += 1;
            }
            // unstable vertices must be of type V^{0,1}, V^{0,2} or V^{1,1}
            for (v, x) in vs.iter().enumerate() {
                let stable = x.genus > 0 || x.d0 > 0 || nl[v] + deg[v] >= 3;
                if !stable && !matches!((nl[v], deg[v]), (0, 1) | (0, 2) | (1, 1)) {
                    return;
                }
            }
            self.degrees(vs, edges, &nl, at, out);
            return;
        }
        for v in 0..vs.len() {
            if leg_levels(self.spec.legs[l]).contains(&vs[v].level) {
                at[l] = v;
                self.place_legs(vs, edges, deg, l + 1, at, out);
            }
        }
    }

    fn degrees(&self, vs: &[VDec], edges: &[(usize, usize, EdgeKind)], nl: &[usize], at: &[usize], out: &mut Vec<EnumeratedGraph>) {
        let s = self.spec;
        let int_edges: Vec<usize> = (0..edges.len()).filter(|i| edges[*i].2 != EdgeKind::E1Inf).collect();
        let inf_edges: Vec<usize> = (0..edges.len()).filter(|i| edges[*i].2 == EdgeKind::E1Inf).collect();
        let d_left = self.dmax - vs.iter().map(|v| v.d0).sum::<i64>();
        // forced level-inf degrees, in fifths
        let mut forced5 = 0i64;
        for (v, x) in vs.iter().enumerate() {
            if x.level == Level::Inf {
                let n = (nl[v] + edges.iter().filter(|(a, b, _)| *a == v || *b == v).count()) as i64;
                if !(x.genus == 0 && n < 3) {
                    forced5 -= 2 * x.genus as i64 - 2 + n;
                }
            }
        }
        let dinf5 = (s.dinf * Deg::from_integer(5)).to_integer();
        for ints in compositions(d_left, int_edges.len()) {
            let e0inf5: i64 = int_edges
                .iter()
                .zip(&ints)
                .filter(|(i, _)| edges[**i].2 == EdgeKind::E0Inf)
                .map(|(_, d)| 5 * d)
                .sum();
            let rest5 = dinf5 - forced5 - e0inf5;
            for fifths in compositions(rest5, inf_edges.len()) {
                let mut g = DecoratedGraph::new(s.n_hours);
                for x in vs {
                    g.add_vertex(x.vertex());
                }
                let mut dd: BTreeMap<usize, Deg> = BTreeMap::new();
                for (i, d) in int_edges.iter().zip(&ints) {
                    dd.insert(*i, Deg::from_integer(*d));
                }
                for (i, d) in inf_edges.iter().zip(&fifths) {
                    dd.insert(*i, Deg::new(*d, 5));
                }
                for (i, (a, b, kind)) in edges.iter().enumerate() {
                    let d = dd[&i];
                    let (va, vb) = (vs[*a], vs[*b]);
                    let (lo, hi, x, y) = match (kind, va.level) {
                        (EdgeKind::E01, Level::Zero) | (EdgeKind::E1Inf, Level::One) | (EdgeKind::E0Inf, Level::Zero) => (*a, *b, va, vb),
                        (EdgeKind::E11, _) => (*a, *b, va, vb),
                        _ => (*b, *a, vb, va),
                    };
                    let e = match kind {
                        EdgeKind::E01 => Edge::new(*kind, vec![y.hour], d, Deg::from_integer(0), [lo, hi]),
                        EdgeKind::E11 => Edge::new(*kind, vec![x.hour, y.hour], d, Deg::from_integer(0), [lo, hi]),
                        EdgeKind::E1Inf => Edge::new(*kind, vec![x.hour], Deg::from_integer(0), d, [lo, hi]),
                        _ => Edge::new(*kind, vec![y.hour], d, d, [lo, hi]),
                    };
                    g.add_edge(e);
                }
                for (l, v) in at.iter().enumerate() {
                    g.add_leg(s.legs[l], *v);
                }
                if let Some(x) = accept(g, s, true) {
                    out.push(x);
                }
            }
        }
    }
}

/// Flat graphs with the given data, regular unless the flags widen the set,
/// sorted by canonical form.
pub fn enumerate(spec: &EnumSpec) -> Result<Vec<EnumeratedGraph>, EnumError> {
    spec.check()?;
    if !spec.d0.is_integer() {
        return Ok(vec![]);
    }
    let st = Structured { spec, dmax: spec.d0.to_integer() };
    let ms = st.multisets();
    let found: Vec<EnumeratedGraph> = ms.par_iter().flat_map_iter(|m| st.from_multiset(m)).collect();
    Ok(dedupe(found))
}

#[cfg(test)]
mod tests;
