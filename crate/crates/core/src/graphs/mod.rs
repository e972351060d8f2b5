//! Decorated localization graphs: data model, validation, balanced nodes,
//! flattening, regularity, trimming and bookkeeping.

mod canon;
mod dot;
mod trim;

pub use canon::{aut_order, canonical, canonical_form, canonical_relabel, Canonical};
pub use dot::to_dot;
pub use trim::{trim, Trim};

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub type Deg = Rational64;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("graph is not flat")]
    NotFlat,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid graph: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(String),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Level {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "inf")]
    Inf,
}

/// The alphabet mu_5 (zeta_5^m, m in 1..4, plus the broad 1) and (1,rho), (1,phi).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum Monodromy {
    #[serde(rename = "zeta")]
    Zeta(u8),
    #[serde(rename = "broad")]
    Broad,
    #[serde(rename = "rho")]
    Rho,
    #[serde(rename = "phi")]
    Phi,
}

impl Monodromy {
    /// Entry used in gamma_v: m for zeta^m, 5 for (1,phi), 0 for broad.
    pub fn gamma_index(&self) -> u8 {
        match self {
            Monodromy::Zeta(m) => *m,
            Monodromy::Phi => 5,
            Monodromy::Broad | Monodromy::Rho => 0,
        }
    }

    pub fn is_narrow(&self) -> bool {
        matches!(self, Monodromy::Zeta(_))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum EdgeKind {
    #[serde(rename = "01")]
    E01,
    #[serde(rename = "1inf")]
    E1Inf,
    #[serde(rename = "11")]
    E11,
    #[serde(rename = "infinf")]
    EInfInf,
    #[serde(rename = "0inf")]
    E0Inf,
    #[serde(rename = "00")]
    E00,
}

mod deg_str {
    use super::Deg;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Deg, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::deg_string(d))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Deg, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_deg(&s).ok_or_else(|| serde::de::Error::custom(format!("bad degree {:?}", s)))
    }
}

pub fn deg_string(d: &Deg) -> String {
    if *d.denom() == 1 {
        d.numer().to_string()
    } else {
        format!("{}/{}", d.numer(), d.denom())
    }
}

pub fn parse_deg(s: &str) -> Option<Deg> {
    match s.split_once('/') {
        Some((a, b)) => {
            let b: i64 = b.trim().parse().ok()?;
            if b == 0 {
                return None;
            }
            Some(Deg::new(a.trim().parse().ok()?, b))
        }
        None => Some(Deg::from_integer(s.trim().parse().ok()?)),
    }
}

pub fn deg(n: i64, d: i64) -> Deg {
    Deg::new(n, d)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Vertex {
    pub level: Level,
    pub hour: Option<u32>,
    pub genus: u32,
    #[serde(with = "deg_str")]
    pub d0: Deg,
    #[serde(with = "deg_str")]
    pub dinf: Deg,
}

impl Vertex {
    pub fn new(level: Level, hour: Option<u32>, genus: u32) -> Self {
        Vertex { level, hour, genus, d0: Deg::zero(), dinf: Deg::zero() }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Edge {
    pub kind: EdgeKind,
    /// One hour for 01/1inf/0inf; (alpha, beta) for 11/infinf, matching `ends`.
    pub hours: Vec<u32>,
    #[serde(with = "deg_str")]
    pub d0: Deg,
    #[serde(with = "deg_str")]
    pub dinf: Deg,
    /// 01: (level 0, level 1); 1inf: (level 1, level inf); 0inf: (level 0, level inf).
    pub ends: [usize; 2],
    /// Edge-side monodromy index (0..4) at each end of an infinf edge.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub node_monodromy: Option<[u8; 2]>,
}

impl Edge {
    pub fn new(kind: EdgeKind, hours: Vec<u32>, d0: Deg, dinf: Deg, ends: [usize; 2]) -> Self {
        Edge { kind, hours, d0, dinf, ends, node_monodromy: None }
    }

    pub fn d_e(&self) -> Deg {
        self.d0 - self.dinf
    }

    /// r_e: 1 if d_e is integral, else 5.
    pub fn r_e(&self) -> i64 {
        if self.d_e().is_integer() {
            1
        } else {
            5
        }
    }

    /// b in [1,5] with d_e = a + b/5.
    pub fn flag_b(&self) -> u8 {
        let x = (self.d_e() * Deg::from_integer(5)).to_integer();
        let b = x.rem_euclid(5) as u8;
        if b == 0 {
            5
        } else {
            b
        }
    }

    pub fn other(&self, v: usize) -> usize {
        if self.ends[0] == v {
            self.ends[1]
        } else {
            self.ends[0]
        }
    }

    pub fn hour_at(&self, end: usize) -> u32 {
        if self.hours.len() == 2 {
            self.hours[end]
        } else {
            self.hours[0]
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Leg {
    pub monodromy: Monodromy,
    pub vertex: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DecoratedGraph {
    pub n_hours: u32,
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub legs: Vec<Leg>,
    /// Set on separation output whose pieces need not be connected.
    pub disconnected: bool,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    schema_version: u32,
    n_hours: u32,
    vertices: Vec<IdVertex>,
    edges: Vec<IdEdge>,
    legs: Vec<IdLeg>,
    #[serde(default)]
    disconnected: bool,
}

#[derive(Serialize, Deserialize)]
struct IdVertex {
    id: usize,
    #[serde(flatten)]
    v: Vertex,
}

#[derive(Serialize, Deserialize)]
struct IdEdge {
    id: usize,
    #[serde(flatten)]
    e: Edge,
}

#[derive(Serialize, Deserialize)]
struct IdLeg {
    id: usize,
    #[serde(flatten)]
    l: Leg,
}

/// Unstable vertex classes V^{a,b}: a legs, b edges.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum UnstableClass {
    V01,
    V02,
    V11,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Regularity {
    Regular,
    Irregular(String),
    PureLoop,
}

impl DecoratedGraph {
    pub fn new(n_hours: u32) -> Self {
        DecoratedGraph { n_hours, vertices: vec![], edges: vec![], legs: vec![], disconnected: false }
    }

    pub fn add_vertex(&mut self, v: Vertex) -> usize {
        self.vertices.push(v);
        self.vertices.len() - 1
    }

    pub fn add_edge(&mut self, e: Edge) -> usize {
        self.edges.push(e);
        self.edges.len() - 1
    }

    pub fn add_leg(&mut self, monodromy: Monodromy, vertex: usize) -> usize {
        self.legs.push(Leg { monodromy, vertex });
        self.legs.len() - 1
    }

    pub fn to_json(&self) -> serde_json::Value {
        let gj = GraphJson {
            schema_version: SCHEMA_VERSION,
            n_hours: self.n_hours,
            vertices: self.vertices.iter().enumerate().map(|(id, v)| IdVertex { id, v: v.clone() }).collect(),
            edges: self.edges.iter().enumerate().map(|(id, e)| IdEdge { id, e: e.clone() }).collect(),
            legs: self.legs.iter().enumerate().map(|(id, l)| IdLeg { id, l: l.clone() }).collect(),
            disconnected: self.disconnected,
        };
        serde_json::to_value(gj).expect("graph serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, GraphError> {
        let gj: GraphJson = serde_json::from_value(v.clone()).map_err(|e| GraphError::Json(e.to_string()))?;
        if gj.schema_version != SCHEMA_VERSION {
            return Err(GraphError::Json(format!("unsupported schema_version {}", gj.schema_version)));
        }
        let check = |ids: Vec<usize>, what: &str| -> Result<(), GraphError> {
            if ids.iter().enumerate().all(|(i, id)| i == *id) {
                Ok(())
            } else {
                Err(GraphError::Json(format!("{} ids must be 0..n in order", what)))
            }
        };
        check(gj.vertices.iter().map(|x| x.id).collect(), "vertex")?;
        check(gj.edges.iter().map(|x| x.id).collect(), "edge")?;
        check(gj.legs.iter().map(|x| x.id).collect(), "leg")?;
        Ok(DecoratedGraph {
            n_hours: gj.n_hours,
            vertices: gj.vertices.into_iter().map(|x| x.v).collect(),
            edges: gj.edges.into_iter().map(|x| x.e).collect(),
            legs: gj.legs.into_iter().map(|x| x.l).collect(),
            disconnected: gj.disconnected,
        })
    }

    pub fn vertex_legs(&self, v: usize) -> Vec<usize> {
        (0..self.legs.len()).filter(|&l| self.legs[l].vertex == v).collect()
    }

    /// Incident edges (an edge appears once per end at v).
    pub fn vertex_edges(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for end in e.ends {
                if end == v {
                    out.push(i);
                }
            }
        }
        out
    }

    /// Flags (edge, end index) at v.
    pub fn flags_at(&self, v: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            for (k, end) in e.ends.iter().enumerate() {
                if *end == v {
                    out.push((i, k));
                }
            }
        }
        out
    }

    pub fn valence(&self, v: usize) -> usize {
        self.vertex_legs(v).len() + self.vertex_edges(v).len()
    }

    pub fn is_stable(&self, v: usize) -> bool {
        let x = &self.vertices[v];
        x.genus > 0 || self.valence(v) >= 3 || x.d0 + x.dinf > Deg::zero()
    }

    pub fn unstable_class(&self, v: usize) -> Option<UnstableClass> {
        if self.is_stable(v) {
            return None;
        }
        match (self.vertex_legs(v).len(), self.vertex_edges(v).len()) {
            (0, 1) => Some(UnstableClass::V01),
            (0, 2) => Some(UnstableClass::V02),
            (1, 1) => Some(UnstableClass::V11),
            _ => None,
        }
    }

    /// d_inf of a level-inf vertex forced by L^5 = omega_log and L (x) N trivial.
    pub fn forced_inf_degree(&self, v: usize) -> Deg {
        let x = &self.vertices[v];
        let n = self.valence(v) as i64;
        if x.genus == 0 && n < 3 {
            return Deg::zero();
        }
        -Deg::new(2 * x.genus as i64 - 2 + n, 5)
    }

    /// Recompute the forced degrees of all level-inf vertices.
    pub fn refresh_inf_degrees(&mut self) {
        for v in 0..self.vertices.len() {
            if self.vertices[v].level == Level::Inf {
                self.vertices[v].d0 = Deg::zero();
                self.vertices[v].dinf = self.forced_inf_degree(v);
            }
        }
    }

    pub fn components(&self) -> usize {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in &self.edges {
            if e.ends[0] < n && e.ends[1] < n {
                let (a, b) = (find(&mut parent, e.ends[0]), find(&mut parent, e.ends[1]));
                parent[a] = b;
            }
        }
        (0..n).filter(|&x| find(&mut parent, x) == x).count()
    }

    pub fn betti(&self) -> i64 {
        self.edges.len() as i64 - self.vertices.len() as i64 + self.components() as i64
    }

    pub fn total_genus(&self) -> i64 {
        self.vertices.iter().map(|v| v.genus as i64).sum::<i64>() + self.betti()
    }

    pub fn total_d0(&self) -> Deg {
        self.vertices.iter().map(|v| v.d0).chain(self.edges.iter().map(|e| e.d0)).fold(Deg::zero(), |a, b| a + b)
    }

    pub fn total_dinf(&self) -> Deg {
        self.vertices.iter().map(|v| v.dinf).chain(self.edges.iter().map(|e| e.dinf)).fold(Deg::zero(), |a, b| a + b)
    }

    /// delta(Theta) = d_Theta + g_Theta + 1, with d_Theta the total d_0.
    pub fn delta(&self) -> Deg {
        self.total_d0() + Deg::from_integer(self.total_genus() + 1)
    }

    /// Virtual dimension of the moduli with the graph's global data.
    pub fn vdim(&self) -> Deg {
        let n = self.n_hours as i64;
        let l = self.legs.len() as i64;
        let mut phi = Deg::zero();
        for leg in &self.legs {
            match leg.monodromy {
                Monodromy::Phi => phi += Deg::from_integer(1),
                Monodromy::Zeta(m) => phi += Deg::new(m as i64, 5),
                _ => {}
            }
        }
        self.total_d0() * Deg::from_integer(n) + self.total_dinf() + Deg::from_integer(n * (1 - self.total_genus()) + l)
            - phi * Deg::from_integer(4)
    }

    /// Edge-side monodromy at the flag (e, end), per the flag definition.
    pub fn flag_monodromy(&self, e: usize, end: usize) -> Monodromy {
        let ed = &self.edges[e];
        match ed.kind {
            EdgeKind::E01 | EdgeKind::E11 | EdgeKind::E00 => Monodromy::Rho,
            EdgeKind::E1Inf => {
                if end == 0 {
                    Monodromy::Phi
                } else {
                    match ed.flag_b() {
                        5 => Monodromy::Phi,
                        b => Monodromy::Zeta(b),
                    }
                }
            }
            EdgeKind::E0Inf => {
                if end == 0 {
                    Monodromy::Rho
                } else {
                    Monodromy::Broad
                }
            }
            EdgeKind::EInfInf => match ed.node_monodromy.map(|m| m[end]) {
                Some(b) if (1..=4).contains(&b) => Monodromy::Zeta(b),
                _ => Monodromy::Broad,
            },
        }
    }

    /// Vertex-side monodromy of L at the node of flag (e, end) on a level-inf vertex.
    pub fn vertex_side_monodromy(&self, e: usize, end: usize) -> Monodromy {
        match self.flag_monodromy(e, end) {
            Monodromy::Zeta(b) => Monodromy::Zeta(5 - b),
            Monodromy::Phi if self.edges[e].kind == EdgeKind::E1Inf => Monodromy::Phi,
            _ => Monodromy::Broad,
        }
    }

    /// gamma_v: leg decorations and edge-side flag monodromies, as sorted indices.
    pub fn gamma_v(&self, v: usize) -> Vec<u8> {
        let mut g: Vec<u8> = self.vertex_legs(v).iter().map(|&l| self.legs[l].monodromy.gamma_index()).collect();
        for (e, end) in self.flags_at(v) {
            g.push(self.flag_monodromy(e, end).gamma_index());
        }
        g.sort();
        g
    }

    fn spin_integral(&self, v: usize) -> bool {
        let x = &self.vertices[v];
        let mut s = 2 * x.genus as i64 - 2 + self.valence(v) as i64;
        for l in self.vertex_legs(v) {
            if let Monodromy::Zeta(m) = self.legs[l].monodromy {
                s -= m as i64;
            }
        }
        for (e, end) in self.flags_at(v) {
            if let Monodromy::Zeta(m) = self.vertex_side_monodromy(e, end) {
                s -= m as i64;
            }
        }
        s.rem_euclid(5) == 0
    }

    /// All violated invariants; empty means valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let nv = self.vertices.len();
        let five = |d: &Deg| 5 % *d.denom() == 0;
        if nv == 0 {
            out.push("no vertices".to_string());
            return out;
        }
        for (i, l) in self.legs.iter().enumerate() {
            if l.vertex >= nv {
                out.push(format!("leg {} references missing vertex", i));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.ends.iter().any(|x| *x >= nv) {
                out.push(format!("edge {} references missing vertex", i));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (i, v) in self.vertices.iter().enumerate() {
            match (v.level, v.hour) {
                (Level::Zero, Some(_)) => out.push(format!("hour on level-0 vertex {}", i)),
                (Level::One | Level::Inf, None) => out.push(format!("hour missing on vertex {}", i)),
                (_, Some(a)) if a == 0 || a > self.n_hours => out.push(format!("hour out of range on vertex {}", i)),
                _ => {}
            }
            if !five(&v.d0) || !five(&v.dinf) {
                out.push(format!("degree denominator on vertex {}", i));
            }
            match v.level {
                Level::Zero => {
                    if !v.d0.is_integer() || v.d0.is_negative() || !v.dinf.is_zero() {
                        out.push(format!("level-0 vertex degree on vertex {}", i));
                    }
                }
                Level::One => {
                    if !v.d0.is_zero() || !v.dinf.is_zero() {
                        out.push(format!("level-1 vertex degree on vertex {}", i));
                    }
                }
                Level::Inf => {
                    if !v.d0.is_zero() || v.dinf != self.forced_inf_degree(i) {
                        out.push(format!("level-inf vertex degree on vertex {}", i));
                    }
                }
            }
            if !self.is_stable(i) && self.unstable_class(i).is_none() {
                out.push(format!("unstable vertex class on vertex {}", i));
            }
            if v.level == Level::Inf && self.is_stable(i) && !self.spin_integral(i) {
                out.push(format!("spin integrality at level-inf vertex {}", i));
            }
        }
        for (i, l) in self.legs.iter().enumerate() {
            let lv = self.vertices[l.vertex].level;
            match l.monodromy {
                Monodromy::Rho if lv == Level::Inf => out.push(format!("(1,rho) leg {} at level inf", i)),
                Monodromy::Zeta(m) if lv != Level::Inf || !(1..=4).contains(&m) => {
                    out.push(format!("narrow leg {} off level inf", i))
                }
                Monodromy::Phi if lv == Level::Zero => out.push(format!("(1,phi) leg {} at level 0", i)),
                Monodromy::Broad => out.push(format!("broad leg {}", i)),
                _ => {}
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            let (a, b) = (&self.vertices[e.ends[0]], &self.vertices[e.ends[1]]);
            if !five(&e.d0) || !five(&e.dinf) {
                out.push(format!("degree denominator on edge {}", i));
            }
            let one_hour = e.hours.len() == 1;
            let hour_ok = |v: &Vertex, h: u32| v.hour == Some(h);
            match e.kind {
                EdgeKind::E00 => out.push("E_00 nonempty".to_string()),
                EdgeKind::E01 => {
                    if a.level != Level::Zero || b.level != Level::One {
                        out.push(format!("E01 endpoints on edge {}", i));
                    } else if !one_hour || !hour_ok(b, e.hours[0]) {
                        out.push(format!("hour mismatch on edge {}", i));
                    }
                    if !e.dinf.is_zero() || !e.d0.is_integer() || e.d0 <= Deg::zero() {
                        out.push(format!("E01 degree on edge {}", i));
                    }
                }
                EdgeKind::E1Inf => {
                    if a.level != Level::One || b.level != Level::Inf {
                        out.push(format!("E1inf endpoints on edge {}", i));
                    } else if !one_hour || !hour_ok(a, e.hours[0]) || !hour_ok(b, e.hours[0]) {
                        out.push(format!("hour mismatch on edge {}", i));
                    }
                    if !e.d0.is_zero() {
                        out.push("L⊗N nontrivial on 1∞ edge".to_string());
                    }
                    if e.d_e() >= Deg::zero() {
                        out.push(format!("E1inf degree sign on edge {}", i));
                    }
                    // a bare endpoint is a scheme point, so L has no monodromy there
                    if b.level == Level::Inf
                        && self.unstable_class(e.ends[1]) == Some(UnstableClass::V01)
                        && !e.d_e().is_integer()
                    {
                        out.push(format!("fractional E1inf edge {} ends at a bare point", i));
                    }
                }
                EdgeKind::E11 => {
                    if a.level != Level::One || b.level != Level::One {
                        out.push(format!("E11 endpoints on edge {}", i));
                    } else if e.hours.len() != 2
                        || e.hours[0] == e.hours[1]
                        || !hour_ok(a, e.hours[0])
                        || !hour_ok(b, e.hours[1])
                    {
                        out.push(format!("hour mismatch on edge {}", i));
                    }
                    if !e.dinf.is_zero() || !e.d0.is_integer() || e.d0 <= Deg::zero() {
                        out.push(format!("E11 degree on edge {}", i));
                    }
                }
                EdgeKind::EInfInf => {
                    if a.level != Level::Inf || b.level != Level::Inf {
                        out.push(format!("Einfinf endpoints on edge {}", i));
                    } else if e.hours.len() != 2 || !hour_ok(a, e.hours[0]) || !hour_ok(b, e.hours[1]) {
                        out.push(format!("hour mismatch on edge {}", i));
                    }
                    if !e.d0.is_integer() || e.d0 <= Deg::zero() || e.dinf.is_negative() {
                        out.push(format!("Einfinf degree on edge {}", i));
                    }
                    if e.node_monodromy.is_none() {
                        out.push(format!("Einfinf node monodromy missing on edge {}", i));
                    }
                }
                EdgeKind::E0Inf => {
                    if a.level != Level::Zero || b.level != Level::Inf {
                        out.push(format!("E0inf endpoints on edge {}", i));
                    } else if !one_hour || !hour_ok(b, e.hours[0]) {
                        out.push(format!("hour mismatch on edge {}", i));
                    }
                    if e.d0 != e.dinf || !e.d0.is_integer() || e.d0 <= Deg::zero() {
                        out.push(format!("E0inf degree on edge {}", i));
                    }
                }
            }
        }
        if !self.disconnected && self.components() != 1 {
            out.push("disconnected".to_string());
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Unstable level-1 V^{0,2} vertices joining an E_1inf and an E_01 edge with d_e + d_e' = 0.
    pub fn balanced_nodes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for v in 0..self.vertices.len() {
            if self.vertices[v].level != Level::One || self.unstable_class(v) != Some(UnstableClass::V02) {
                continue;
            }
            let es = self.vertex_edges(v);
            let (e1, e2) = (&self.edges[es[0]], &self.edges[es[1]]);
            let kinds = (e1.kind, e2.kind);
            let mixed = matches!(kinds, (EdgeKind::E1Inf, EdgeKind::E01) | (EdgeKind::E01, EdgeKind::E1Inf));
            if mixed && (e1.d_e() + e2.d_e()).is_zero() {
                out.push(v);
            }
        }
        out
    }

    pub fn is_flat(&self) -> bool {
        self.balanced_nodes().is_empty()
    }

    /// Merge each balanced E_1inf/E_01 pair into one E_0inf edge.
    pub fn flatten(&self) -> DecoratedGraph {
        let balanced = self.balanced_nodes();
        if balanced.is_empty() {
            return self.clone();
        }
        let mut removed_edges = vec![false; self.edges.len()];
        let mut new_edges = Vec::new();
        for &v in &balanced {
            let es = self.vertex_edges(v);
            let (mut ei, mut ej) = (es[0], es[1]);
            if self.edges[ei].kind != EdgeKind::E1Inf {
                std::mem::swap(&mut ei, &mut ej);
            }
            let (e, e2) = (&self.edges[ei], &self.edges[ej]);
            removed_edges[ei] = true;
            removed_edges[ej] = true;
            new_edges.push(Edge::new(EdgeKind::E0Inf, vec![e.hours[0]], e2.d0, e.dinf, [e2.ends[0], e.ends[1]]));
        }
        let keep: Vec<usize> = (0..self.vertices.len()).filter(|v| !balanced.contains(v)).collect();
        let mut remap = BTreeMap::new();
        for (i, v) in keep.iter().enumerate() {
            remap.insert(*v, i);
        }
        let mut g = DecoratedGraph::new(self.n_hours);
        g.disconnected = self.disconnected;
        g.vertices = keep.iter().map(|v| self.vertices[*v].clone()).collect();
        for (i, e) in self.edges.iter().enumerate() {
            if !removed_edges[i] {
                let mut e = e.clone();
                e.ends = [remap[&e.ends[0]], remap[&e.ends[1]]];
                g.edges.push(e);
            }
        }
        for mut e in new_edges {
            e.ends = [remap[&e.ends[0]], remap[&e.ends[1]]];
            g.edges.push(e);
        }
        g.legs = self.legs.iter().map(|l| Leg { monodromy: l.monodromy, vertex: remap[&l.vertex] }).collect();
        g
    }

    pub fn is_pure_loop(&self) -> bool {
        self.legs.is_empty()
            && (0..self.vertices.len()).all(|v| !self.is_stable(v) && self.vertex_edges(v).len() == 2)
    }

    /// Regularity of a stable level-inf vertex from gamma_v and g_v.
    pub fn regular_inf_vertex(&self, v: usize) -> bool {
        if !self.is_stable(v) {
            let flags = self.flags_at(v);
            let on_1inf: Vec<_> = flags.iter().filter(|(e, _)| self.edges[*e].kind == EdgeKind::E1Inf).collect();
            if on_1inf.is_empty() {
                return true;
            }
            return on_1inf.iter().all(|(e, end)| matches!(self.flag_monodromy(*e, *end), Monodromy::Zeta(_)));
        }
        let gam = self.gamma_v(v);
        let count = |x: u8| gam.iter().filter(|&&y| y == x).count();
        if gam.iter().all(|x| *x == 1 || *x == 2) {
            return true;
        }
        if self.vertices[v].genus != 0 {
            return false;
        }
        let ones = count(1);
        let len = gam.len();
        (count(4) == 1 && ones >= 2 && ones + 1 == len)
            || (count(2) == 1 && count(3) == 1 && ones >= 1 && ones + 2 == len)
            || (count(0) == 2 && ones >= 1 && ones + 2 == len)
    }

    pub fn classify_regular(&self) -> Result<Regularity, GraphError> {
        if !self.is_flat() {
            return Err(GraphError::NotFlat);
        }
        if self.is_pure_loop() {
            return Ok(Regularity::PureLoop);
        }
        if self.edges.iter().any(|e| e.kind == EdgeKind::E0Inf) {
            return Ok(Regularity::Irregular("E_0∞ nonempty".into()));
        }
        for v in 0..self.vertices.len() {
            if self.vertices[v].level == Level::Inf && !self.regular_inf_vertex(v) {
                return Ok(Regularity::Irregular(format!("irregular level-∞ vertex {}", v)));
            }
        }
        Ok(Regularity::Regular)
    }

    /// E_0inf edges whose level-0 vertex is unstable with no other edge.
    pub fn strings(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| {
                let ed = &self.edges[e];
                ed.kind == EdgeKind::E0Inf && {
                    let v = ed.ends[0];
                    !self.is_stable(v) && self.vertex_edges(v).len() == 1
                }
            })
            .collect()
    }

    /// Hours present among vertices at levels 1 and inf.
    pub fn hour_of(&self, v: usize) -> u32 {
        self.vertices[v].hour.unwrap_or(0)
    }

    /// Per-edge stabilizer order |G_e| from the table.
    pub fn g_e_order(&self, e: usize, table: &EdgeStabilizers) -> i64 {
        let ed = &self.edges[e];
        let d = ed.d_e();
        let v = match ed.kind {
            EdgeKind::E01 => table.e01 * d,
            EdgeKind::E1Inf => table.e1inf * d,
            EdgeKind::E11 => table.e11 * d,
            EdgeKind::E0Inf => table.e0inf * ed.d0,
            EdgeKind::EInfInf | EdgeKind::E00 => Deg::from_integer(1),
        };
        v.to_integer().abs().max(1)
    }

    pub fn g_edges_order(&self, table: &EdgeStabilizers) -> i64 {
        (0..self.edges.len()).map(|e| self.g_e_order(e, table)).product()
    }
}

/// |G_e| = coefficient * d_e for each edge type (E_0inf uses d_0e).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeStabilizers {
    #[serde(with = "deg_str")]
    pub e01: Deg,
    #[serde(with = "deg_str")]
    pub e1inf: Deg,
    #[serde(with = "deg_str")]
    pub e11: Deg,
    #[serde(with = "deg_str")]
    pub e0inf: Deg,
}

impl Default for EdgeStabilizers {
    fn default() -> Self {
        EdgeStabilizers {
            e01: Deg::from_integer(1),
            e1inf: Deg::from_integer(-5),
            e11: Deg::from_integer(1),
            e0inf: Deg::from_integer(1),
        }
    }
}

pub fn g_e_order(g: &DecoratedGraph, table: &EdgeStabilizers) -> i64 {
    g.g_edges_order(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn single_vertex(level: Level, hour: Option<u32>, n: usize, hours: u32) -> DecoratedGraph {
        let mut g = DecoratedGraph::new(hours);
        let v = g.add_vertex(Vertex::new(level, hour, 0));
        for _ in 0..n {
            g.add_leg(Monodromy::Rho, v);
        }
        g
    }

    #[test]
    fn minimal_graph_is_valid() {
        let g = single_vertex(Level::Zero, None, 3, 1);
        assert!(g.validate().is_empty());
        assert_eq!(g.classify_regular().unwrap(), Regularity::Regular);
    }

    #[test]
    fn forbidden_edges() {
        let mut g = single_vertex(Level::Zero, None, 3, 1);
        let w = g.add_vertex(Vertex::new(Level::Zero, None, 0));
        g.add_edge(Edge::new(EdgeKind::E00, vec![], deg(1, 1), deg(0, 1), [0, w]));
        assert!(g.validate().contains(&"E_00 nonempty".to_string()));

        let mut g = DecoratedGraph::new(1);
        let a = g.add_vertex(Vertex::new(Level::One, Some(1), 0));
        g.add_leg(Monodromy::Rho, a);
        g.add_leg(Monodromy::Rho, a);
        let b = g.add_vertex(Vertex::new(Level::Inf, Some(1), 0));
        g.add_edge(Edge::new(EdgeKind::E1Inf, vec![1], deg(1, 1), deg(6, 5), [a, b]));
        assert!(g.validate().contains(&"L⊗N nontrivial on 1∞ edge".to_string()));
    }

    fn balanced_pair(d_inf: i64) -> DecoratedGraph {
        let mut g = DecoratedGraph::new(1);
        let a = g.add_vertex(Vertex::new(Level::Zero, None, 0));
        g.add_leg(Monodromy::Rho, a);
        g.add_leg(Monodromy::Rho, a);
        let v = g.add_vertex(Vertex::new(Level::One, Some(1), 0));
        let b = g.add_vertex(Vertex::new(Level::Inf, Some(1), 1));
        g.add_edge(Edge::new(EdgeKind::E01, vec![1], deg(1, 1), deg(0, 1), [a, v]));
        g.add_edge(Edge::new(EdgeKind::E1Inf, vec![1], deg(0, 1), deg(d_inf, 1), [v, b]));
        g.refresh_inf_degrees();
        g
    }

    #[test]
    fn balanced_and_flatten() {
        let g = balanced_pair(1);
        assert_eq!(g.balanced_nodes(), vec![1]);
        let f = g.flatten();
        assert_eq!(f.vertices.len(), 2);
        assert_eq!(f.edges.len(), 1);
        assert_eq!(f.edges[0].kind, EdgeKind::E0Inf);
        assert!(f.is_flat());
        assert_eq!(f.flatten(), f);
        assert_eq!(f.classify_regular().unwrap(), Regularity::Irregular("E_0∞ nonempty".into()));
        assert!(balanced_pair(2).balanced_nodes().is_empty());
    }

    #[test]
    fn exceptional_vertex() {
        // genus-0 infinity vertex with gamma = (1,1,1,4): three d_e = -4/5 edges and one d_e = -1/5
        let mut g = DecoratedGraph::new(1);
        let c = g.add_vertex(Vertex::new(Level::Inf, Some(1), 0));
        for d in [4, 4, 4, 1] {
            let v = g.add_vertex(Vertex::new(Level::One, Some(1), 0));
            g.add_leg(Monodromy::Rho, v);
            g.add_edge(Edge::new(EdgeKind::E1Inf, vec![1], deg(0, 1), deg(d, 5), [v, c]));
        }
        g.refresh_inf_degrees();
        assert_eq!(g.gamma_v(c), vec![1, 1, 1, 4]);
        assert_eq!(g.classify_regular().unwrap(), Regularity::Regular);
    }

    #[test]
    fn vdim_example() {
        let mut g = DecoratedGraph::new(2);
        let a = g.add_vertex(Vertex::new(Level::Zero, None, 0));
        let b = g.add_vertex(Vertex::new(Level::One, Some(1), 0));
        for _ in 0..3 {
            g.add_leg(Monodromy::Rho, b);
        }
        g.add_edge(Edge::new(EdgeKind::E01, vec![1], deg(1, 1), deg(0, 1), [a, b]));
        assert_eq!(g.vdim(), deg(7, 1));
        assert_eq!(g.g_e_order(0, &EdgeStabilizers::default()), 1);
    }
}
