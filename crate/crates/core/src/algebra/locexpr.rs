//! Localization expressions: rational functions in t_1..t_N whose numerator
//! may also depend on nilpotent variables (h, psi, lambda, ...), plus a part
//! linear in unknown symbols.
//!
//! The denominator is an h-free product of normalized polynomial factors.
//! Products only merge factor lists; `reduce` cancels by trial division and
//! falls back to a full gcd when a factor is not linear.

use super::poly::{MPoly, Mono};
use super::{q_to_string, AlgebraError, CycloField, CycloRational, Specialized, UniSeries, Q};
use crate::oracles::UnknownSymbol;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilVar {
    pub name: String,
    /// x^trunc = 0
    pub trunc: u32,
}

/// Monomials whose total degree in `vars` exceeds `max_degree` vanish.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NilGroup {
    pub vars: Vec<usize>,
    pub max_degree: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarCtx {
    pub n_t: usize,
    pub nil: Vec<NilVar>,
    pub groups: Vec<NilGroup>,
}

impl VarCtx {
    /// t_1..t_N and a single h with h^5 = 0.
    pub fn standard(n: usize) -> Arc<VarCtx> {
        Self::with_h(n, 5)
    }

    pub fn with_h(n: usize, trunc: u32) -> Arc<VarCtx> {
        Arc::new(VarCtx { n_t: n, nil: vec![NilVar { name: "h".into(), trunc }], groups: vec![] })
    }

    pub fn t_only(n: usize) -> Arc<VarCtx> {
        Arc::new(VarCtx { n_t: n, nil: vec![], groups: vec![] })
    }

    pub fn t_names(&self) -> Vec<String> {
        (1..=self.n_t).map(|i| format!("t{}", i)).collect()
    }

    pub fn nil_zero(&self) -> Mono {
        vec![0; self.nil.len()]
    }

    fn survives(&self, m: &[u32]) -> bool {
        if m.iter().zip(&self.nil).any(|(e, v)| *e >= v.trunc) {
            return false;
        }
        self.groups.iter().all(|g| g.vars.iter().map(|&i| m[i]).sum::<u32>() <= g.max_degree)
    }
}

#[derive(Clone)]
pub struct LocExpr {
    ctx: Arc<VarCtx>,
    num: BTreeMap<Mono, MPoly>,
    den: BTreeMap<MPoly, u32>,
    unknowns: BTreeMap<UnknownSymbol, LocExpr>,
}

pub type Den = BTreeMap<MPoly, u32>;

impl LocExpr {
    pub fn zero(ctx: &Arc<VarCtx>) -> Self {
        LocExpr { ctx: ctx.clone(), num: BTreeMap::new(), den: BTreeMap::new(), unknowns: BTreeMap::new() }
    }

    pub fn constant(ctx: &Arc<VarCtx>, c: Q) -> Self {
        Self::from_t_poly(ctx, MPoly::constant(ctx.n_t, c))
    }

    pub fn one(ctx: &Arc<VarCtx>) -> Self {
        Self::constant(ctx, Q::one())
    }

    pub fn from_t_poly(ctx: &Arc<VarCtx>, p: MPoly) -> Self {
        assert_eq!(p.nvars(), ctx.n_t);
        let mut e = Self::zero(ctx);
        if !p.is_zero() {
            e.num.insert(ctx.nil_zero(), p);
        }
        e
    }

    /// t_alpha, alpha in 1..=N.
    pub fn t(ctx: &Arc<VarCtx>, alpha: usize) -> Self {
        Self::from_t_poly(ctx, MPoly::var(ctx.n_t, alpha - 1))
    }

    /// The nilpotent variable with index `i`.
    pub fn nil(ctx: &Arc<VarCtx>, i: usize) -> Self {
        let mut m = ctx.nil_zero();
        m[i] = 1;
        let mut e = Self::zero(ctx);
        if ctx.survives(&m) {
            e.num.insert(m, MPoly::one(ctx.n_t));
        }
        e
    }

    pub fn h(ctx: &Arc<VarCtx>) -> Self {
        Self::nil(ctx, 0)
    }

    /// Polynomial in t and the nilpotents, given over all variables (t first).
    pub fn from_full_poly(ctx: &Arc<VarCtx>, p: &MPoly) -> Self {
        let n_t = ctx.n_t;
        assert_eq!(p.nvars(), n_t + ctx.nil.len());
        let mut e = Self::zero(ctx);
        for (m, c) in p.terms() {
            let nm = m[n_t..].to_vec();
            if !ctx.survives(&nm) {
                continue;
            }
            let tm = m[..n_t].to_vec();
            e.add_num_term(nm, MPoly::monomial(tm, c.clone()));
        }
        e
    }

    /// num / den with den a polynomial in t only; reduced by gcd.
    pub fn from_polys(ctx: &Arc<VarCtx>, num: &MPoly, den: &MPoly) -> Result<Self, AlgebraError> {
        if den.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let e = Self::from_full_poly(ctx, num);
        let d = Self::from_t_poly(ctx, den.clone());
        Ok(e.mul(&d.inv()?))
    }

    pub fn unknown(ctx: &Arc<VarCtx>, s: UnknownSymbol, coeff: LocExpr) -> Self {
        let mut e = Self::zero(ctx);
        if !coeff.is_zero() {
            e.unknowns.insert(s, coeff);
        }
        e
    }

    pub fn ctx(&self) -> &Arc<VarCtx> {
        &self.ctx
    }

    pub fn num(&self) -> &BTreeMap<Mono, MPoly> {
        &self.num
    }

    pub fn den_factors(&self) -> &Den {
        &self.den
    }

    pub fn unknowns(&self) -> &BTreeMap<UnknownSymbol, LocExpr> {
        &self.unknowns
    }

    pub fn known_part(&self) -> LocExpr {
        LocExpr { unknowns: BTreeMap::new(), ..self.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_empty() && self.unknowns.is_empty()
    }

    pub fn is_nil_free(&self) -> bool {
        let z = self.ctx.nil_zero();
        self.num.keys().all(|m| *m == z) && self.unknowns.values().all(|u| u.is_nil_free())
    }

    fn add_num_term(&mut self, m: Mono, p: MPoly) {
        if p.is_zero() {
            return;
        }
        let e = self.num.entry(m.clone()).or_insert_with(|| MPoly::zero(p.nvars()));
        *e = e.add(&p);
        if e.is_zero() {
            self.num.remove(&m);
        }
    }

    fn den_poly(den: &Den, n_t: usize) -> MPoly {
        let mut d = MPoly::one(n_t);
        for (f, k) in den {
            d = d.mul(&f.pow(*k));
        }
        d
    }

    /// Expanded (normalized) denominator.
    pub fn den(&self) -> MPoly {
        Self::den_poly(&self.den, self.ctx.n_t)
    }

    fn scale_num(&self, p: &MPoly) -> BTreeMap<Mono, MPoly> {
        self.num.iter().map(|(m, c)| (m.clone(), c.mul(p))).collect()
    }

    fn with_den(&self, target: &Den) -> BTreeMap<Mono, MPoly> {
        let mut extra = MPoly::one(self.ctx.n_t);
        for (f, k) in target {
            let have = self.den.get(f).copied().unwrap_or(0);
            if *k > have {
                extra = extra.mul(&f.pow(k - have));
            }
        }
        self.scale_num(&extra)
    }

    pub fn add(&self, o: &LocExpr) -> LocExpr {
        assert!(Arc::ptr_eq(&self.ctx, &o.ctx) || *self.ctx == *o.ctx, "context mismatch");
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return LocExpr { ctx: self.ctx.clone(), ..o.clone() };
        }
        let mut den = self.den.clone();
        for (f, k) in &o.den {
            let e = den.entry(f.clone()).or_insert(0);
            *e = (*e).max(*k);
        }
        let mut num = self.with_den(&den);
        let other = o.with_den(&den);
        let mut r = LocExpr { ctx: self.ctx.clone(), num: BTreeMap::new(), den, unknowns: self.unknowns.clone() };
        for (m, p) in num.iter_mut() {
            r.add_num_term(m.clone(), std::mem::replace(p, MPoly::zero(0)));
        }
        for (m, p) in other {
            r.add_num_term(m, p);
        }
        if r.num.is_empty() {
            r.den.clear();
        }
        for (s, c) in &o.unknowns {
            let v = match r.unknowns.get(s) {
                Some(x) => x.add(c),
                None => c.clone(),
            };
            if v.is_zero() {
                r.unknowns.remove(s);
            } else {
                r.unknowns.insert(s.clone(), v);
            }
        }
        r
    }

    pub fn neg(&self) -> LocExpr {
        self.scale(&-Q::one())
    }

    pub fn sub(&self, o: &LocExpr) -> LocExpr {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &Q) -> LocExpr {
        if k.is_zero() {
            return Self::zero(&self.ctx);
        }
        LocExpr {
            ctx: self.ctx.clone(),
            num: self.num.iter().map(|(m, p)| (m.clone(), p.scale(k))).collect(),
            den: self.den.clone(),
            unknowns: self.unknowns.iter().map(|(s, c)| (s.clone(), c.scale(k))).collect(),
        }
    }

    fn mul_known(&self, o: &LocExpr) -> LocExpr {
        let mut r = Self::zero(&self.ctx);
        for (m1, p1) in &self.num {
            for (m2, p2) in &o.num {
                let m: Mono = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                if self.ctx.survives(&m) {
                    r.add_num_term(m, p1.mul(p2));
                }
            }
        }
        if !r.num.is_empty() {
            r.den = self.den.clone();
            for (f, k) in &o.den {
                *r.den.entry(f.clone()).or_insert(0) += k;
            }
        }
        r
    }

    pub fn mul(&self, o: &LocExpr) -> LocExpr {
        let mut r = self.known_part().mul_known(&o.known_part());
        let ak = self.known_part();
        let bk = o.known_part();
        for (s, c) in &self.unknowns {
            r = r.add(&Self::unknown(&self.ctx, s.clone(), c.mul_known(&bk)));
            for (s2, c2) in &o.unknowns {
                r = r.add(&Self::unknown(&self.ctx, s.mul(s2), c.mul_known(c2)));
            }
        }
        for (s, c) in &o.unknowns {
            r = r.add(&Self::unknown(&self.ctx, s.clone(), ak.mul_known(c)));
        }
        r
    }

    pub fn pow(&self, e: u32) -> LocExpr {
        let mut acc = Self::one(&self.ctx);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Divide by a nonzero polynomial in t.
    pub fn div_t_poly(&self, p: &MPoly) -> Result<LocExpr, AlgebraError> {
        if p.is_zero() {
            return Err(AlgebraError::DivisionByZero);
        }
        let (c, f) = p.normalized();
        let inv_c = Q::one() / c;
        let mut r = self.scale(&inv_c);
        if !f.is_constant() {
            r.push_den(&f);
        }
        Ok(r)
    }

    fn push_den(&mut self, f: &MPoly) {
        if !self.num.is_empty() {
            *self.den.entry(f.clone()).or_insert(0) += 1;
        }
        let keys: Vec<_> = self.unknowns.keys().cloned().collect();
        for k in keys {
            let mut c = self.unknowns.remove(&k).unwrap();
            c.push_den(f);
            self.unknowns.insert(k, c);
        }
    }

    /// Inverse of a nil-free, unknown-free, nonzero expression.
    pub fn inv(&self) -> Result<LocExpr, AlgebraError> {
        if !self.unknowns.is_empty() {
            return Err(AlgebraError::HasUnknowns);
        }
        if !self.is_nil_free() {
            return Err(AlgebraError::NotNilFree);
        }
        let p = match self.num.values().next() {
            Some(p) => p.clone(),
            None => return Err(AlgebraError::DivisionByZero),
        };
        let d = self.den();
        let r = Self::from_t_poly(&self.ctx, d).div_t_poly(&p)?;
        Ok(r.reduce())
    }

    pub fn div(&self, o: &LocExpr) -> Result<LocExpr, AlgebraError> {
        Ok(self.mul(&o.inv()?))
    }

    /// 1/(w - x) = sum_k x^k / w^(k+1), with x nilpotent and w nil-free.
    pub fn truncated_inverse(w: &LocExpr, x: &LocExpr) -> Result<LocExpr, AlgebraError> {
        if w.is_zero() {
            return Err(AlgebraError::VanishingWeight);
        }
        if !w.is_nil_free() || !w.unknowns.is_empty() {
            return Err(AlgebraError::NotNilFree);
        }
        let spec = w.specialize_known().map_err(|_| AlgebraError::VanishingWeight)?;
        if spec.is_empty() {
            return Err(AlgebraError::VanishingWeight);
        }
        let winv = w.inv()?;
        let z = x.ctx.nil_zero();
        if x.num.contains_key(&z) {
            return Err(AlgebraError::NotNilFree);
        }
        let mut term = winv.clone();
        let mut acc = Self::zero(&w.ctx);
        while !term.is_zero() {
            acc = acc.add(&term);
            term = term.mul(x).mul(&winv);
        }
        Ok(acc)
    }

    /// Cancel common factors; the result is in lowest terms.
    pub fn reduce(&self) -> LocExpr {
        let n_t = self.ctx.n_t;
        let mut num = self.num.clone();
        let mut den = Den::new();
        let mut nonlinear = false;
        for (f, k) in &self.den {
            let mut k = *k;
            while k > 0 {
                let divided: Option<BTreeMap<Mono, MPoly>> =
                    num.iter().map(|(m, p)| p.div_exact(f).map(|q| (m.clone(), q))).collect();
                match divided {
                    Some(d) => {
                        num = d;
                        k -= 1;
                    }
                    None => break,
                }
            }
            if k > 0 {
                if f.total_degree().unwrap_or(0) > 1 {
                    nonlinear = true;
                }
                den.insert(f.clone(), k);
            }
        }
        if nonlinear && !num.is_empty() {
            let d = Self::den_poly(&den, n_t);
            let mut g = d.clone();
            for p in num.values() {
                g = g.gcd(p);
                if g.is_constant() {
                    break;
                }
            }
            if !g.is_constant() {
                num = num.into_iter().map(|(m, p)| (m, p.div_exact(&g).unwrap())).collect();
                let rest = d.div_exact(&g).unwrap();
                let (c, f) = rest.normalized();
                num = num.into_iter().map(|(m, p)| (m, p.scale(&(Q::one() / &c)))).collect();
                den = Den::new();
                if !f.is_constant() {
                    den.insert(f, 1);
                }
            }
        }
        if num.is_empty() {
            den.clear();
        }
        let unknowns = self
            .unknowns
            .iter()
            .map(|(s, c)| (s.clone(), c.reduce()))
            .filter(|(_, c)| !c.is_zero())
            .collect();
        LocExpr { ctx: self.ctx.clone(), num, den, unknowns }
    }

    /// Canonical (numerator terms, expanded denominator) for the known part.
    pub fn canonical_pair(&self) -> (BTreeMap<Mono, MPoly>, MPoly) {
        let r = self.reduce();
        let d = r.den();
        let (c, dn) = d.normalized();
        let inv = Q::one() / c;
        (r.num.iter().map(|(m, p)| (m.clone(), p.scale(&inv))).collect(), dn)
    }

    /// Coefficient of a nilpotent monomial (known and unknown parts).
    pub fn nil_coeff(&self, m: &[u32]) -> LocExpr {
        let z = self.ctx.nil_zero();
        let mut r = Self::zero(&self.ctx);
        if let Some(p) = self.num.get(m) {
            r.num.insert(z.clone(), p.clone());
            r.den = self.den.clone();
        }
        for (s, c) in &self.unknowns {
            let cc = c.nil_coeff(m);
            if !cc.is_zero() {
                r.unknowns.insert(s.clone(), cc);
            }
        }
        r
    }

    /// All nilpotent monomials present in the known or unknown parts.
    pub fn nil_support(&self) -> Vec<Mono> {
        let mut s: std::collections::BTreeSet<Mono> = self.num.keys().cloned().collect();
        for c in self.unknowns.values() {
            s.extend(c.nil_support());
        }
        s.into_iter().collect()
    }

    /// Move into a context that has the same t-variables and a superset of
    /// nilpotents; `map[i]` is the new index of old nilpotent `i`.
    pub fn embed(&self, ctx: &Arc<VarCtx>, map: &[usize]) -> LocExpr {
        let mut r = Self::zero(ctx);
        for (m, p) in &self.num {
            let mut nm = ctx.nil_zero();
            for (i, e) in m.iter().enumerate() {
                nm[map[i]] += e;
            }
            if ctx.survives(&nm) {
                r.add_num_term(nm, p.clone());
            }
        }
        if !r.num.is_empty() {
            r.den = self.den.clone();
        }
        for (s, c) in &self.unknowns {
            let cc = c.embed(ctx, map);
            if !cc.is_zero() {
                r.unknowns.insert(s.clone(), cc);
            }
        }
        r
    }

    /// Replace unknown symbols by values; returns remaining expression.
    pub fn substitute(&self, f: &dyn Fn(&UnknownSymbol) -> Option<Q>) -> LocExpr {
        let mut r = self.known_part();
        for (s, c) in &self.unknowns {
            match f(s) {
                Some(v) => r = r.add(&c.scale(&v)),
                None => r = r.add(&Self::unknown(&self.ctx, s.clone(), c.clone())),
            }
        }
        r
    }

    fn field(&self) -> Arc<CycloField> {
        CycloField::new(self.ctx.n_t.max(1) as u32)
    }

    /// Specialize a t-polynomial: t_a -> -zeta_N^a t.
    pub fn specialize_poly(p: &MPoly, field: &Arc<CycloField>) -> UniSeries {
        let mut s = UniSeries::zero(field);
        for (m, c) in p.terms() {
            let deg: u32 = m.iter().sum();
            let zexp: i64 = m.iter().enumerate().map(|(i, e)| (i as i64 + 1) * *e as i64).sum();
            let sign = if deg % 2 == 0 { c.clone() } else { -c.clone() };
            let coeff = CycloRational::zeta_pow(field, zexp).scale(&sign);
            s.add_term(deg as i64, coeff);
        }
        s
    }

    fn specialize_known(&self) -> Result<BTreeMap<Mono, UniSeries>, AlgebraError> {
        let field = self.field();
        let r = self.reduce();
        let mut dval = UniSeries::one(&field);
        for (f, k) in &r.den {
            let fs = Self::specialize_poly(f, &field);
            if fs.is_zero() {
                return Err(AlgebraError::DivisionByZero);
            }
            if !fs.is_monomial() {
                return Err(AlgebraError::NonMonomialDenominator);
            }
            for _ in 0..*k {
                dval = dval.mul(&fs);
            }
        }
        let dinv = dval.monomial_inverse().ok_or(AlgebraError::DivisionByZero)?;
        let mut out = BTreeMap::new();
        for (m, p) in &r.num {
            let v = Self::specialize_poly(p, &field).mul(&dinv);
            if !v.is_zero() {
                out.insert(m.clone(), v);
            }
        }
        Ok(out)
    }

    /// Full specialization, keeping nilpotent monomials and unknowns.
    pub fn specialize_all(&self) -> Result<Specialized, AlgebraError> {
        let mut sp = Specialized { n: self.ctx.n_t as u32, known: self.specialize_known()?, unknowns: BTreeMap::new() };
        for (s, c) in &self.unknowns {
            let v = c.specialize_known()?;
            if !v.is_empty() {
                sp.unknowns.insert(s.clone(), v);
            }
        }
        Ok(sp)
    }

    /// Specialization of a nil-free, unknown-free expression.
    pub fn specialize(&self) -> Result<UniSeries, AlgebraError> {
        if !self.unknowns.is_empty() {
            return Err(AlgebraError::HasUnknowns);
        }
        if !self.is_nil_free() {
            return Err(AlgebraError::NotNilFree);
        }
        let mut v = self.specialize_known()?;
        Ok(v.remove(&self.ctx.nil_zero()).unwrap_or_else(|| UniSeries::zero(&self.field())))
    }

    /// Total homogeneous degree (t and nilpotents all of degree 1), if homogeneous.
    /// Unknown symbols have degree 0, so their coefficients must agree too.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let r = self.reduce();
        let dd = r.den().total_degree().unwrap_or(0) as i64;
        let mut d: Option<i64> = None;
        let mut agree = |e: i64| match d {
            Some(x) => x == e,
            None => {
                d = Some(e);
                true
            }
        };
        for (m, p) in &r.num {
            let nd: i64 = m.iter().map(|e| *e as i64).sum();
            let pd = p.homogeneous_degree_in(self.ctx.n_t)? as i64;
            if !agree(nd + pd - dd) {
                return None;
            }
        }
        for c in r.unknowns.values().filter(|c| !c.is_zero()) {
            if !agree(c.homogeneous_degree()?) {
                return None;
            }
        }
        d
    }

    /// Degree read off one numerator term, assuming homogeneity; no reduction.
    pub fn degree_hint(&self) -> Option<i64> {
        let (m, p) = match self.num.iter().next() {
            Some(x) => x,
            None => return self.unknowns.values().next().and_then(|c| c.degree_hint()),
        };
        let (tm, _) = p.leading()?;
        let nd: i64 = m.iter().chain(tm.iter()).map(|e| *e as i64).sum();
        let dd: i64 = self.den.iter().map(|(f, k)| f.total_degree().unwrap_or(0) as i64 * *k as i64).sum();
        Some(nd - dd)
    }

    /// Apply a linear functional on nilpotent monomials. `value(m)` returns
    /// a rational times an optional symbol, or None for zero. The result is
    /// nil-free and lives in `out` (same t-variables).
    pub fn integrate_nil<E>(
        &self,
        out: &Arc<VarCtx>,
        value: &mut dyn FnMut(&Mono) -> Result<Option<(Q, Option<UnknownSymbol>)>, E>,
    ) -> Result<LocExpr, E> {
        assert_eq!(out.n_t, self.ctx.n_t);
        let z = out.nil_zero();
        let mut known = LocExpr::zero(out);
        let mut syms: BTreeMap<UnknownSymbol, MPoly> = BTreeMap::new();
        for (m, p) in &self.num {
            let Some((c, s)) = value(m)? else { continue };
            match s {
                None => known.add_num_term(z.clone(), p.scale(&c)),
                Some(s) => {
                    let e = syms.entry(s).or_insert_with(|| MPoly::zero(out.n_t));
                    *e = e.add(&p.scale(&c));
                }
            }
        }
        if !known.num.is_empty() {
            known.den = self.den.clone();
        }
        let mut r = known;
        for (s, p) in syms {
            if p.is_zero() {
                continue;
            }
            let c = LocExpr { ctx: out.clone(), num: [(z.clone(), p)].into(), den: self.den.clone(), unknowns: BTreeMap::new() };
            r = r.add(&Self::unknown(out, s, c));
        }
        for (s, c) in &self.unknowns {
            let inner = c.integrate_nil(out, value)?;
            let lifted = Self::unknown(out, s.clone(), Self::one(out)).mul(&inner);
            r = r.add(&lifted);
        }
        Ok(r)
    }

    pub fn var_names(&self) -> Vec<String> {
        let mut v = self.ctx.t_names();
        v.extend(self.ctx.nil.iter().map(|n| n.name.clone()));
        v
    }

    fn full_num(&self, num: &BTreeMap<Mono, MPoly>) -> MPoly {
        let n_t = self.ctx.n_t;
        let nv = n_t + self.ctx.nil.len();
        let mut r = MPoly::zero(nv);
        for (m, p) in num {
            for (tm, c) in p.terms() {
                let mut full = tm.clone();
                full.extend(m.iter().copied());
                r.add_term(full, c.clone());
            }
        }
        r
    }

    /// Canonical JSON with exact integer strings.
    pub fn to_json(&self) -> Value {
        let (num, den) = self.canonical_pair();
        let poly_json = |p: &MPoly| -> Value {
            Value::Array(
                p.terms()
                    .iter()
                    .map(|(m, c)| json!({"exp": m, "coeff": q_to_string(c)}))
                    .collect(),
            )
        };
        let unknowns: serde_json::Map<String, Value> =
            self.unknowns.iter().map(|(s, c)| (s.to_string(), c.to_json())).collect();
        json!({
            "vars": self.var_names(),
            "num": poly_json(&self.full_num(&num)),
            "den": poly_json(&den.rename(self.ctx.n_t + self.ctx.nil.len(), |i| i)),
            "unknowns": unknowns,
        })
    }
}

impl PartialEq for LocExpr {
    fn eq(&self, o: &LocExpr) -> bool {
        if self.ctx.n_t != o.ctx.n_t || self.ctx.nil.len() != o.ctx.nil.len() {
            return false;
        }
        let d = self.sub(o).reduce();
        d.is_zero()
    }
}

impl fmt::Display for LocExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = self.var_names();
        let (num, den) = self.canonical_pair();
        let n = self.full_num(&num).fmt_with(&names);
        if den.is_constant() {
            write!(f, "{}", n)?;
        } else {
            write!(f, "({})/({})", n, den.fmt_with(&names[..self.ctx.n_t]))?;
        }
        for (s, c) in &self.unknowns {
            write!(f, " + [{}]*({})", s, c)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LocExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;

    #[test]
    fn inverse_of_shifted_t() {
        let ctx = VarCtx::standard(1);
        let t = LocExpr::t(&ctx, 1);
        let h = LocExpr::h(&ctx);
        let inv = LocExpr::truncated_inverse(&t, &h.neg()).unwrap();
        // (t + h) * inv = 1 mod h^5
        assert_eq!(t.add(&h).mul(&inv), LocExpr::one(&ctx));
        assert_eq!(inv.num().len(), 5);
    }

    #[test]
    fn reduce_cancels_linear_factor() {
        let ctx = VarCtx::t_only(2);
        let a = LocExpr::t(&ctx, 1).sub(&LocExpr::t(&ctx, 2));
        let r = a.mul(&a).div(&a).unwrap().reduce();
        assert!(r.den_factors().is_empty());
        assert_eq!(r, a);
        let s = a.scale(&qi(3)).div(&a.scale(&qi(-2))).unwrap();
        assert_eq!(s, LocExpr::constant(&ctx, crate::algebra::q(-3, 2)));
    }
}
