//! Per-graph variable context: which nilpotent variables each vertex owns,
//! and how a monomial in them integrates.

use super::{Insertion, LocError};
use crate::algebra::{LocExpr, Mono, NilGroup, NilVar, VarCtx, Q};
use crate::graphs::{DecoratedGraph, Level, Monodromy};
use crate::oracles::{GwKey, OracleError, IntersectionKey, Oracles, SymbolKind, UnknownSymbol};
use num_traits::{One, Zero};
use std::collections::BTreeMap;
use std::sync::Arc;

/// A special point of a vertex: a flag (edge, end) or a leg.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Point {
    Flag(usize, usize),
    Leg(usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VKind {
    /// level 0 integrated over P^4 with the -5h class (unstable, or g = d = 0)
    P4,
    /// level-0 stable map vertex, an unknown symbol
    Gw,
    /// stable level-1 vertex, psi/lambda integrals
    Hodge,
    /// stable level-inf vertex, an unknown symbol
    Fjrw,
    /// unstable level-1 or level-inf vertex
    Bare,
}

#[derive(Clone, Debug)]
pub struct Slot {
    pub kind: VKind,
    pub points: Vec<Point>,
    pub h_shared: Option<usize>,
    pub h: BTreeMap<Point, usize>,
    pub psi: BTreeMap<Point, usize>,
    pub lambda: Option<usize>,
    pub sigma: Vec<usize>,
    /// dimension the integrand must match; negative means the vertex integral is 0
    pub dim: i64,
    /// vertex-side monodromy index per point (level inf only)
    pub marks: Vec<u8>,
}

#[derive(Clone, Debug)]
pub struct Layout {
    pub ctx: Arc<VarCtx>,
    pub slots: Vec<Slot>,
}

struct Alloc {
    nil: Vec<NilVar>,
    groups: Vec<NilGroup>,
}

impl Alloc {
    fn var(&mut self, name: String, trunc: u32) -> usize {
        self.nil.push(NilVar { name, trunc: trunc.max(1) });
        self.nil.len() - 1
    }
}

/// Vertex-side monodromy index at a level-inf point: m for zeta^m, 5 for (1,phi), 0 for broad.
fn inf_mark(g: &DecoratedGraph, p: Point) -> u8 {
    match p {
        Point::Leg(l) => g.legs[l].monodromy.gamma_index(),
        Point::Flag(e, k) => match g.vertex_side_monodromy(e, k) {
            Monodromy::Zeta(m) => m,
            Monodromy::Phi => 5,
            _ => 0,
        },
    }
}

impl Layout {
    pub fn new(g: &DecoratedGraph, ins: &[Insertion]) -> Result<Layout, LocError> {
        let mut a = Alloc { nil: vec![], groups: vec![] };
        let mut slots = Vec::new();
        for v in 0..g.vertices.len() {
            let x = &g.vertices[v];
            let mut points: Vec<Point> = g.flags_at(v).into_iter().map(|(e, k)| Point::Flag(e, k)).collect();
            points.extend(g.vertex_legs(v).into_iter().map(Point::Leg));
            let n = points.len() as i64;
            let stable = g.is_stable(v);
            let mut s = Slot {
                kind: VKind::Bare,
                points: points.clone(),
                h_shared: None,
                h: BTreeMap::new(),
                psi: BTreeMap::new(),
                lambda: None,
                sigma: vec![],
                dim: 0,
                marks: vec![],
            };
            let flags = points.iter().filter(|p| matches!(p, Point::Flag(..)));
            match x.level {
                Level::Zero if !stable || (x.genus == 0 && x.d0.is_zero()) => {
                    s.kind = VKind::P4;
                    let h = a.var(format!("h{}", v), 5);
                    s.h_shared = Some(h);
                    for p in &points {
                        s.h.insert(*p, h);
                    }
                    if stable {
                        s.dim = n - 3;
                        for p in flags {
                            let i = a.var(format!("psi{}_{}", v, s.psi.len()), s.dim as u32 + 1);
                            s.psi.insert(*p, i);
                        }
                        let vars: Vec<usize> = s.psi.values().copied().collect();
                        a.groups.push(NilGroup { vars, max_degree: s.dim as u32 });
                    }
                }
                Level::Zero => {
                    s.kind = VKind::Gw;
                    s.dim = n;
                    let mut vars = Vec::new();
                    for (k, p) in points.iter().enumerate() {
                        let i = a.var(format!("h{}_{}", v, k), 5);
                        s.h.insert(*p, i);
                        vars.push(i);
                        if matches!(p, Point::Flag(..)) {
                            let j = a.var(format!("psi{}_{}", v, k), n as u32 + 1);
                            s.psi.insert(*p, j);
                            vars.push(j);
                        }
                    }
                    for b in 1..=g.n_hours {
                        let i = a.var(format!("sig{}_{}", v, b), n as u32 + 1);
                        s.sigma.push(i);
                        vars.push(i);
                    }
                    a.groups.push(NilGroup { vars, max_degree: n as u32 });
                }
                Level::One | Level::Inf if !stable => {}
                Level::One | Level::Inf => {
                    if x.genus > 1 {
                        return Err(LocError::Oracle(OracleError::OutOfRange(format!(
                            "genus {} vertex at level {:?}",
                            x.genus, x.level
                        ))));
                    }
                    let is_inf = x.level == Level::Inf;
                    s.kind = if is_inf { VKind::Fjrw } else { VKind::Hodge };
                    if is_inf {
                        s.marks = points.iter().map(|p| inf_mark(g, *p)).collect();
                        s.dim = s.marks.iter().map(|m| 2 - *m as i64).sum();
                    } else {
                        s.dim = 3 * x.genus as i64 - 3 + n;
                    }
                    let tr = s.dim.max(0) as u32 + 1;
                    let mut vars = Vec::new();
                    for (k, p) in points.iter().enumerate() {
                        let wants = match p {
                            Point::Flag(..) => true,
                            Point::Leg(l) => matches!(ins.get(*l), Some(Insertion::Separation { .. })),
                        };
                        if wants {
                            let i = a.var(format!("psi{}_{}", v, k), tr);
                            s.psi.insert(*p, i);
                            vars.push(i);
                        }
                    }
                    if x.genus == 1 {
                        let i = a.var(format!("lam{}", v), 2);
                        s.lambda = Some(i);
                        vars.push(i);
                    }
                    if is_inf {
                        let i = a.var(format!("sig{}", v), tr);
                        s.sigma.push(i);
                        vars.push(i);
                    }
                    a.groups.push(NilGroup { vars, max_degree: s.dim.max(0) as u32 });
                }
            }
            slots.push(s);
        }
        let ctx = Arc::new(VarCtx { n_t: g.n_hours as usize, nil: a.nil, groups: a.groups });
        Ok(Layout { ctx, slots })
    }

    /// h_e at the level-0 end of an edge.
    pub fn h_at(&self, v: usize, p: Point) -> Option<LocExpr> {
        self.slots[v].h.get(&p).map(|i| LocExpr::nil(&self.ctx, *i))
    }

    pub fn psi_at(&self, v: usize, p: Point) -> Option<LocExpr> {
        self.slots[v].psi.get(&p).map(|i| LocExpr::nil(&self.ctx, *i))
    }

    pub fn lambda(&self, v: usize) -> Option<LocExpr> {
        self.slots[v].lambda.map(|i| LocExpr::nil(&self.ctx, i))
    }

    /// Integrate every vertex group; the result has no nilpotents.
    pub fn integrate(&self, g: &DecoratedGraph, p: &LocExpr, oracles: &Oracles) -> Result<LocExpr, LocError> {
        let out = VarCtx::t_only(g.n_hours as usize);
        let mut f = |m: &Mono| self.monomial_value(g, m, oracles);
        p.integrate_nil(&out, &mut f)
    }

    fn monomial_value(
        &self,
        g: &DecoratedGraph,
        m: &Mono,
        oracles: &Oracles,
    ) -> Result<Option<(Q, Option<UnknownSymbol>)>, LocError> {
        let mut c = Q::one();
        let mut sym: Option<UnknownSymbol> = None;
        for (v, s) in self.slots.iter().enumerate() {
            let psi_exps = |s: &Slot| -> Vec<u32> { s.points.iter().map(|p| s.psi.get(p).map_or(0, |i| m[*i])).collect() };
            match s.kind {
                VKind::Bare => {}
                VKind::P4 => {
                    if m[s.h_shared.unwrap()] != 3 {
                        return Ok(None);
                    }
                    c *= Q::from_integer((-5).into());
                    if g.is_stable(v) {
                        let x = oracles.intersection(&IntersectionKey::new(0, psi_exps(s), 0))?;
                        if x.is_zero() {
                            return Ok(None);
                        }
                        c *= x;
                    }
                }
                VKind::Hodge => {
                    let lam = s.lambda.map_or(0, |i| m[i]);
                    let x = oracles.intersection(&IntersectionKey::new(g.vertices[v].genus, psi_exps(s), lam))?;
                    if x.is_zero() {
                        return Ok(None);
                    }
                    c *= x;
                }
                VKind::Gw => {
                    let pe = psi_exps(s);
                    let he: Vec<u32> = s.points.iter().map(|p| m[s.h[p]]).collect();
                    let seg: Vec<u32> = s.sigma.iter().map(|i| m[*i]).collect();
                    let tot: i64 = pe.iter().chain(&he).chain(&seg).map(|x| *x as i64).sum();
                    if tot != s.dim {
                        return Ok(None);
                    }
                    let x = &g.vertices[v];
                    let key = GwKey::new(x.genus, x.d0.to_integer() as u32, pe.into_iter().zip(he).collect(), seg);
                    let a = UnknownSymbol::atom(SymbolKind::Gw, key.key_string());
                    sym = Some(match sym {
                        None => a,
                        Some(s0) => s0.mul(&a),
                    });
                }
                VKind::Fjrw => {
                    let pe = psi_exps(s);
                    let lam = s.lambda.map_or(0, |i| m[i]);
                    let sig = m[s.sigma[0]];
                    let tot = pe.iter().map(|x| *x as i64).sum::<i64>() + lam as i64 + sig as i64;
                    if s.dim < 0 || tot != s.dim {
                        return Ok(None);
                    }
                    let mut pts: Vec<(u8, u32)> = s.marks.iter().copied().zip(pe).collect();
                    pts.sort();
                    let ps: Vec<String> = pts.iter().map(|(a, b)| format!("{}.{}", a, b)).collect();
                    let key = format!(
                        "g={};n={};pts={};lambda={};segre={}",
                        g.vertices[v].genus,
                        pts.len(),
                        ps.join(","),
                        lam,
                        sig
                    );
                    let a = UnknownSymbol::atom(SymbolKind::Fjrw, key);
                    sym = Some(match sym {
                        None => a,
                        Some(s0) => s0.mul(&a),
                    });
                }
            }
        }
        Ok(Some((c, sym)))
    }
}
