//! The A-terms: flag weights, edge, flag and vertex factors, leg insertions.

use super::layout::{Layout, Point, VKind};
use super::{deg_q, HourSign, Insertion, LocConfig, LocError};
use crate::algebra::{AlgebraError, LocExpr, VarCtx, Q};
use crate::graphs::{DecoratedGraph, Deg, EdgeKind, Level, Monodromy, UnstableClass};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use std::sync::Arc;

fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub(crate) struct Builder<'a> {
    g: &'a DecoratedGraph,
    lay: &'a Layout,
    cfg: &'a LocConfig,
    ctx: Arc<VarCtx>,
}

impl<'a> Builder<'a> {
    pub fn new(g: &'a DecoratedGraph, lay: &'a Layout, cfg: &'a LocConfig) -> Self {
        Builder { g, lay, cfg, ctx: lay.ctx.clone() }
    }

    fn c(&self, x: Q) -> LocExpr {
        LocExpr::constant(&self.ctx, x)
    }

    fn t(&self, a: u32) -> LocExpr {
        LocExpr::t(&self.ctx, a as usize)
    }

    /// t_alpha^k times a rational, k may be negative.
    fn t_pow(&self, a: u32, k: i64, c: Q) -> Result<LocExpr, LocError> {
        let p = self.t(a).pow(k.unsigned_abs() as u32);
        if k >= 0 {
            Ok(p.scale(&c))
        } else {
            Ok(self.c(c).mul(&p.inv()?))
        }
    }

    fn pi(&self, a: u32) -> LocExpr {
        let mut p = LocExpr::one(&self.ctx);
        for b in 1..=self.g.n_hours {
            if b != a {
                p = p.mul(&self.t(b).sub(&self.t(a)));
            }
        }
        p
    }

    fn pi_inv(&self, a: u32) -> Result<LocExpr, LocError> {
        let mut p = LocExpr::one(&self.ctx);
        for b in 1..=self.g.n_hours {
            if b != a {
                p = p.mul(&self.t(b).sub(&self.t(a)).inv()?);
            }
        }
        Ok(p)
    }

    /// Inverse of (nil-free unit) + (nilpotent), as a finite geometric series.
    fn inv(&self, x: &LocExpr) -> Result<LocExpr, LocError> {
        let w = x.nil_coeff(&self.ctx.nil_zero());
        let n = w.sub(x);
        let winv = w.inv()?;
        if n.is_zero() {
            return Ok(winv);
        }
        let mut term = winv.clone();
        let mut acc = LocExpr::zero(&self.ctx);
        while !term.is_zero() {
            acc = acc.add(&term);
            term = term.mul(&n).mul(&winv);
        }
        Ok(acc)
    }

    /// Like `inv`, but a localization weight must survive t_alpha = -zeta^alpha t.
    fn inv_weight(&self, x: &LocExpr) -> Result<LocExpr, LocError> {
        let w = x.nil_coeff(&self.ctx.nil_zero());
        if w.is_zero() || w.specialize().map(|s| s.is_zero()).unwrap_or(true) {
            return Err(AlgebraError::VanishingWeight.into());
        }
        self.inv(x)
    }

    fn hour(&self, v: usize) -> u32 {
        self.g.hour_of(v)
    }

    /// h_e at the level-0 end of an E01 or E0inf edge.
    fn h_edge(&self, e: usize) -> LocExpr {
        let v = self.g.edges[e].ends[0];
        self.lay.h_at(v, Point::Flag(e, 0)).unwrap_or_else(|| LocExpr::zero(&self.ctx))
    }

    fn inf_bare(&self, v: usize) -> bool {
        self.g.vertices[v].level == Level::Inf && self.g.unstable_class(v) == Some(UnstableClass::V01)
    }

    /// w at the flag (e, end k).
    pub fn weight(&self, e: usize, k: usize) -> Result<LocExpr, LocError> {
        let ed = &self.g.edges[e];
        let a = ed.hour_at(k);
        let t = self.t(a);
        match ed.kind {
            EdgeKind::E01 => {
                let d = deg_q(&ed.d_e());
                let x = self.h_edge(e).add(&t).scale(&(Q::one() / d));
                Ok(if k == 0 { x } else { x.neg() })
            }
            EdgeKind::E1Inf => self.w_1inf(ed.d_e(), ed.r_e(), a, self.inf_bare(ed.ends[1]), k == 1),
            EdgeKind::E0Inf => {
                if k == 0 {
                    let d = deg_q(&ed.d0);
                    Ok(self.h_edge(e).add(&t).scale(&(Q::one() / d)))
                } else {
                    self.w_1inf(-ed.dinf, 1, a, self.inf_bare(ed.ends[1]), true)
                }
            }
            EdgeKind::E11 => {
                let d = deg_q(&ed.d_e());
                Ok(self.t(ed.hour_at(1 - k)).sub(&t).scale(&(Q::one() / d)))
            }
            EdgeKind::EInfInf | EdgeKind::E00 => Err(LocError::Unsupported(format!("flag weight on {:?} edge", ed.kind))),
        }
    }

    fn w_1inf(&self, d: Deg, r: i64, a: u32, bare: bool, inf_side: bool) -> Result<LocExpr, LocError> {
        let t = self.t(a);
        let dq = deg_q(&d);
        let x = if bare {
            let s = Q::from_integer(5.into()) / (qi(5) * &dq + Q::one());
            if inf_side {
                s
            } else {
                -s
            }
        } else if inf_side {
            Q::one() / (qi(r) * &dq)
        } else {
            -Q::one() / dq
        };
        Ok(t.scale(&x))
    }

    // ---- edges

    fn e01(&self, e: usize, a: u32, d: i64) -> Result<LocExpr, LocError> {
        let h = self.h_edge(e);
        let t = self.t(a);
        let u = h.add(&t).scale(&(Q::one() / qi(d))); // (h + t_a)/d
        let mut num = LocExpr::one(&self.ctx);
        for j in 1..5 * d {
            num = num.mul(&h.scale(&qi(-5)).add(&u.scale(&qi(j))));
        }
        let mut r = num;
        for j in 1..=d {
            let f = self.inv(&h.sub(&u.scale(&qi(j))))?;
            r = r.mul(&f.pow(5));
            r = r.mul(&self.inv(&u.scale(&qi(j)))?);
        }
        for b in 1..=self.g.n_hours {
            if b == a {
                continue;
            }
            let tb = self.t(b).sub(&t);
            for j in 0..=d {
                r = r.mul(&self.inv(&u.scale(&qi(j)).add(&tb))?);
            }
        }
        Ok(r)
    }

    /// The E_1inf display with d_e, d_inf,e and delta.
    fn e1inf(&self, a: u32, d: Deg, dinf: Deg, delta: i64) -> Result<LocExpr, LocError> {
        let dq = deg_q(&d);
        let big_d = dq.clone() - qi(delta) / qi(5);
        let mut c = Q::one();
        let mut k: i64 = 0;
        let top = (-d).ceil().to_integer() - 1;
        for j in 1..=top {
            let x = -Q::one() - qi(j) / &big_d;
            c *= x.pow(5);
            k += 5;
        }
        let n1 = (-(d * Deg::from_integer(5))).to_integer() + delta;
        for j in 1..=n1 {
            c /= -qi(j) / &big_d;
            k -= 1;
        }
        let m = dinf.floor().to_integer();
        let dd = -deg_q(&dinf) - qi(delta) / qi(5);
        for j in 1..=m {
            c /= qi(j) / &dd;
            k -= 1;
        }
        Ok(self.t_pow(a, k, c)?.mul(&self.pi_inv(a)?))
    }

    /// E11 edges are only defined away from (1,phi) markings at their ends.
    fn e11_check(&self, v: usize) -> Result<(), LocError> {
        if self.g.unstable_class(v) == Some(UnstableClass::V11)
            && self.g.legs[self.g.vertex_legs(v)[0]].monodromy == Monodromy::Phi
        {
            return Err(LocError::Unsupported("E11 edge meeting a (1,phi) marking".into()));
        }
        Ok(())
    }

    fn e11(&self, e: usize) -> Result<LocExpr, LocError> {
        let ed = &self.g.edges[e];
        let (al, be) = (ed.hours[0], ed.hours[1]);
        let d = ed.d_e().to_integer();
        self.e11_check(ed.ends[0])?;
        self.e11_check(ed.ends[1])?;
        let (ta, tb) = (self.t(al), self.t(be));
        let fact: BigInt = (1..=d).map(BigInt::from).product();
        let mut pre = Q::new(BigInt::from(d).pow(2 * d as u32), fact.clone() * fact);
        if d.is_odd() {
            pre = -pre;
        }
        let mut r = self.inv(&tb.sub(&ta))?.pow(2 * d as u32).scale(&pre);
        let diff = ta.sub(&tb).scale(&(Q::one() / qi(d)));
        // no endpoint shift: the V01 / V11 vertex terms already carry those factors
        for i in 1..=(5 * d - 1) {
            r = r.mul(&ta.scale(&qi(5)).sub(&diff.scale(&qi(i))));
        }
        for x in 0..=d {
            let y = d - x;
            let p = ta.scale(&(-qi(x) / qi(d))).sub(&tb.scale(&(qi(y) / qi(d))));
            r = r.mul(&self.inv(&p)?.pow(5));
            for gm in 1..=self.g.n_hours {
                if gm != al && gm != be {
                    r = r.mul(&self.inv(&self.t(gm).add(&p))?);
                }
            }
        }
        Ok(r)
    }

    fn edge_factor(&self, e: usize) -> Result<LocExpr, LocError> {
        let ed = &self.g.edges[e];
        match ed.kind {
            EdgeKind::E01 => self.e01(e, ed.hours[0], ed.d_e().to_integer()),
            EdgeKind::E1Inf => {
                let delta = if self.inf_bare(ed.ends[1]) { -1 } else { 0 };
                self.e1inf(ed.hours[0], ed.d_e(), ed.dinf, delta)
            }
            EdgeKind::E11 => self.e11(e),
            EdgeKind::E0Inf => {
                // irregular only: the merged E01 and E1inf pieces and their balanced node
                let a = ed.hours[0];
                let delta = if self.inf_bare(ed.ends[1]) { -1 } else { 0 };
                let p = self.e01(e, a, ed.d0.to_integer())?;
                let q = self.e1inf(a, -ed.dinf, ed.dinf, delta)?;
                let node = self.t_pow(a, 6, qi(-5))?.mul(&self.pi(a));
                Ok(p.mul(&q).mul(&node))
            }
            EdgeKind::EInfInf | EdgeKind::E00 => Err(LocError::Unsupported(format!("{:?} edge factor", ed.kind))),
        }
    }

    // ---- flags and vertices

    fn h_product(&self, h: &LocExpr) -> LocExpr {
        let mut p = LocExpr::one(&self.ctx);
        for b in 1..=self.g.n_hours {
            p = p.mul(&h.add(&self.t(b)));
        }
        p
    }

    fn flag_factor(&self, v: usize, e: usize, k: usize) -> Result<LocExpr, LocError> {
        let pt = Point::Flag(e, k);
        let a = self.hour(v);
        let top = match self.g.vertices[v].level {
            Level::Zero => self.h_product(&self.lay.h_at(v, pt).expect("level-0 h")),
            Level::One => self.t_pow(a, 6, qi(-5))?.mul(&self.pi(a)),
            Level::Inf => match self.g.vertex_side_monodromy(e, k) {
                Monodromy::Zeta(_) => self.pi(a),
                // scheme node: never met on regular graphs, kept for rank counting
                _ => self.t(a).neg().mul(&self.pi(a)),
            },
        };
        let w = self.weight(e, k)?;
        let psi = self.lay.psi_at(v, pt).unwrap_or_else(|| LocExpr::zero(&self.ctx));
        Ok(top.mul(&self.inv_weight(&w.sub(&psi))?))
    }

    fn only_flag(&self, v: usize) -> (usize, usize) {
        self.g.flags_at(v)[0]
    }

    fn pair_denominator(&self, v: usize) -> Result<LocExpr, LocError> {
        let f = self.g.flags_at(v);
        let s = self.weight(f[0].0, f[0].1)?.add(&self.weight(f[1].0, f[1].1)?);
        // may vanish under specialization (t_1 + t_2 at N = 2); poles must cancel in the graph sum
        if s.is_zero() {
            return Err(AlgebraError::VanishingWeight.into());
        }
        self.inv(&s)
    }

    fn vertex_factor(&self, v: usize) -> Result<LocExpr, LocError> {
        let g = self.g;
        let x = &g.vertices[v];
        let a = self.hour(v);
        let slot = &self.lay.slots[v];
        let one = LocExpr::one(&self.ctx);
        if let Some(cls) = g.unstable_class(v) {
            return match (x.level, cls) {
                (_, UnstableClass::V01) => {
                    let (e, k) = self.only_flag(v);
                    let w = self.weight(e, k)?;
                    Ok(if x.level == Level::One { w.mul(&self.t(a).scale(&qi(5))) } else { w })
                }
                (Level::One, UnstableClass::V11) => match g.legs[g.vertex_legs(v)[0]].monodromy {
                    Monodromy::Phi => self.t_pow(a, 5, -Q::one()),
                    _ => Ok(self.t(a).scale(&qi(5))),
                },
                (_, UnstableClass::V11) => Ok(one),
                (Level::Zero, UnstableClass::V02) => {
                    let h = LocExpr::nil(&self.ctx, slot.h_shared.expect("level-0 h"));
                    Ok(self.h_product(&h).mul(&self.pair_denominator(v)?))
                }
                (Level::One, UnstableClass::V02) => {
                    Ok(self.t_pow(a, 6, qi(-5))?.mul(&self.pi(a)).mul(&self.pair_denominator(v)?))
                }
                (Level::Inf, UnstableClass::V02) => {
                    let e = g.flags_at(v)[0].0;
                    let top = if g.edges[e].d_e().is_integer() { self.t(a).neg().mul(&self.pi(a)) } else { self.pi(a) };
                    Ok(top.mul(&self.pair_denominator(v)?))
                }
            };
        }
        match slot.kind {
            VKind::P4 => {
                let h = LocExpr::nil(&self.ctx, slot.h_shared.unwrap());
                let mut r = one;
                for b in 1..=g.n_hours {
                    r = r.mul(&self.inv(&h.add(&self.t(b)))?);
                }
                Ok(r)
            }
            VKind::Gw => {
                let rk = x.d0.to_integer() + 1 - x.genus as i64;
                let mut r = one;
                for b in 1..=g.n_hours {
                    let s = LocExpr::nil(&self.ctx, slot.sigma[b as usize - 1]);
                    let mut series = LocExpr::zero(&self.ctx);
                    let mut sk = LocExpr::one(&self.ctx);
                    for k in 0..=slot.dim {
                        if sk.is_zero() {
                            break;
                        }
                        series = series.add(&sk.mul(&self.t_pow(b, -(rk + k), Q::one())?));
                        sk = sk.mul(&s);
                    }
                    r = r.mul(&series);
                }
                Ok(r)
            }
            VKind::Hodge => {
                let ne = g.vertex_edges(v).len() as i64;
                let nphi = g.vertex_legs(v).iter().filter(|l| g.legs[**l].monodromy == Monodromy::Phi).count() as u32;
                let t = self.t(a);
                let mut r = self.t_pow(a, -5, -Q::one())?;
                if let Some(lam) = self.lay.lambda(v) {
                    // rank-one Hodge bundle: e(E^v (x) L_c) = c - lambda
                    r = r.mul(&t.neg().sub(&lam).pow(5));
                    for b in 1..=g.n_hours {
                        if b != a {
                            r = r.mul(&self.t(b).sub(&t).sub(&lam));
                        }
                    }
                    r = r.mul(&self.inv(&t.scale(&qi(5)).add(&lam))?);
                }
                r = r.mul(&self.t_pow(a, 4, -Q::one() / qi(5))?.pow(nphi));
                // 1/(5t)^(|E_v|-1), and |E_v| may be 0
                let c5 = if ne >= 1 { Q::new(BigInt::one(), BigInt::from(5).pow((ne - 1) as u32)) } else { qi(5) };
                r = r.mul(&self.t_pow(a, 1 - ne, c5)?);
                Ok(r.mul(&self.pi_inv(a)?))
            }
            VKind::Fjrw => {
                let n = slot.points.len() as i64;
                let gv = x.genus as i64;
                let mut num = -(2 * gv - 2 + n);
                for m in &slot.marks {
                    if *m != 0 {
                        num -= 5 - *m as i64;
                    }
                }
                if num.rem_euclid(5) != 0 {
                    return Err(LocError::Precondition(format!("non-integral chi(L^v) at vertex {}", v)));
                }
                let chi = num / 5 + 1 - gv;
                let mt = self.t(a).neg();
                let s = LocExpr::nil(&self.ctx, slot.sigma[0]);
                let mut series = LocExpr::zero(&self.ctx);
                let mut sk = LocExpr::one(&self.ctx);
                let mtinv = self.inv(&mt)?;
                let mut k = 0;
                while !sk.is_zero() && k <= slot.dim.max(0) {
                    series = series.add(&sk.mul(&mtinv.pow(k as u32)));
                    sk = sk.mul(&s);
                    k += 1;
                }
                let mut r = series;
                if chi >= 0 {
                    r = r.mul(&mtinv.pow(chi as u32));
                } else {
                    r = r.mul(&mt.pow((-chi) as u32));
                }
                if let Some(lam) = self.lay.lambda(v) {
                    for b in 1..=g.n_hours {
                        if b != a {
                            r = r.mul(&self.t(b).sub(&self.t(a)).sub(&lam));
                        }
                    }
                }
                Ok(r.mul(&self.pi_inv(a)?))
            }
            VKind::Bare => unreachable!("stable vertex without moduli"),
        }
    }

    /// Every factor of 1/e(N^vir), labelled.
    pub fn ledger(&self) -> Result<Vec<(String, LocExpr)>, LocError> {
        let g = self.g;
        let mut out = Vec::new();
        for (i, e) in g.edges.iter().enumerate() {
            out.push((format!("edge {} {:?} d_e={}", i, e.kind, e.d_e()), self.edge_factor(i)?));
        }
        for v in 0..g.vertices.len() {
            if g.is_stable(v) {
                for (e, k) in g.flags_at(v) {
                    out.push((format!("flag ({},{}) at vertex {}", e, k, v), self.flag_factor(v, e, k)?));
                }
            }
        }
        for v in 0..g.vertices.len() {
            let x = &g.vertices[v];
            let what = match g.unstable_class(v) {
                Some(c) => format!("{:?}", c),
                None => "stable".to_string(),
            };
            out.push((format!("vertex {} level {:?} {}", v, x.level, what), self.vertex_factor(v)?));
        }
        Ok(out)
    }

    /// ev_l^* of each leg insertion.
    pub fn insertions(&self, ins: &[Insertion]) -> Result<Vec<(String, LocExpr)>, LocError> {
        let mut out = Vec::new();
        for (l, x) in ins.iter().enumerate() {
            let v = self.g.legs[l].vertex;
            let level = self.g.vertices[v].level;
            let f = match x {
                Insertion::H(c) => {
                    let base = match level {
                        Level::Zero => self.lay.h_at(v, Point::Leg(l)).expect("level-0 h"),
                        Level::One => {
                            let s = if self.cfg.hour_sign == HourSign::Minus { -Q::one() } else { Q::one() };
                            self.t(self.hour(v)).scale(&s)
                        }
                        Level::Inf => {
                            if x.h_degree().unwrap_or(0) > 0 {
                                return Err(LocError::Unsupported(format!("H insertion at level-inf leg {}", l)));
                            }
                            LocExpr::zero(&self.ctx)
                        }
                    };
                    let mut r = LocExpr::zero(&self.ctx);
                    let mut p = LocExpr::one(&self.ctx);
                    for cj in c {
                        r = r.add(&p.scale(cj));
                        p = p.mul(&base);
                    }
                    r
                }
                Insertion::Separation { alpha, a } => {
                    if level != Level::One {
                        return Err(LocError::Precondition(format!("separation leg {} off level 1", l)));
                    }
                    let psi = match self.lay.psi_at(v, Point::Leg(l)) {
                        Some(p) => p,
                        None => {
                            let (e, k) = self.only_flag(v);
                            self.weight(e, k)?.neg()
                        }
                    };
                    let top = self.t_pow(*alpha, 4, Q::one() / qi(5))?.mul(&self.pi(*alpha));
                    let w = self.t(*alpha).scale(&(qi(5) / deg_q(a)));
                    top.mul(&self.inv_weight(&w.sub(&psi))?)
                }
            };
            out.push((format!("leg {} insertion", l), f));
        }
        Ok(out)
    }
}
