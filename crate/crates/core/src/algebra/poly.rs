//! Sparse multivariate polynomials over Q with exact division and a
//! recursive primitive-PRS gcd.
//!
//! Monomials are exponent vectors. Variable `i` is ordered below variable
//! `i + 1`; the leading monomial compares the highest variable first.

use super::{rational_content, Q};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;

pub type Mono = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Mono, Q>,
}

fn mono_cmp(a: &[u32], b: &[u32]) -> Ordering {
    for i in (0..a.len()).rev() {
        match a[i].cmp(&b[i]) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    Ordering::Equal
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut m = vec![0; nvars];
        m[i] = 1;
        Self::monomial(m, Q::one())
    }

    pub fn monomial(m: Mono, c: Q) -> Self {
        let mut p = Self::zero(m.len());
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Linear form sum_i c_i x_i + c0.
    pub fn linear(nvars: usize, coeffs: &[(usize, Q)], c0: Q) -> Self {
        let mut p = Self::constant(nvars, c0);
        for (i, c) in coeffs {
            p = p.add(&Self::var(nvars, *i).scale(c));
        }
        p
    }

    pub fn from_terms(nvars: usize, it: impl IntoIterator<Item = (Mono, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in it {
            assert_eq!(m.len(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Mono, Q> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|e| *e == 0))
    }

    pub fn constant_term(&self) -> Q {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Q::zero)
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.clone(), -c);
        }
        r
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, k: &Q) -> Self {
        if k.is_zero() {
            return Self::zero(self.nvars);
        }
        MPoly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(self.nvars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m: Mono = m1.iter().zip(m2).map(|(a, b)| a + b).collect();
                r.add_term(m, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.iter().sum()).max()
    }

    /// Homogeneous degree over the first `k` variables, if homogeneous there.
    pub fn homogeneous_degree_in(&self, k: usize) -> Option<u32> {
        let mut d = None;
        for m in self.terms.keys() {
            let e: u32 = m[..k].iter().sum();
            match d {
                None => d = Some(e),
                Some(x) if x != e => return None,
                _ => {}
            }
        }
        d
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|m| m[v]).max().unwrap_or(0)
    }

    pub fn leading(&self) -> Option<(&Mono, &Q)> {
        self.terms.iter().max_by(|a, b| mono_cmp(a.0, b.0))
    }

    /// Map each variable through `f` into a polynomial ring with `nvars` variables.
    pub fn rename(&self, nvars: usize, f: impl Fn(usize) -> usize) -> Self {
        let mut r = Self::zero(nvars);
        for (m, c) in &self.terms {
            let mut mm = vec![0; nvars];
            for (i, e) in m.iter().enumerate() {
                if *e > 0 {
                    mm[f(i)] += e;
                }
            }
            r.add_term(mm, c.clone());
        }
        r
    }

    /// Substitute polynomials for every variable.
    pub fn compose(&self, images: &[MPoly]) -> MPoly {
        assert_eq!(images.len(), self.nvars);
        let nv = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut cache: Vec<Vec<MPoly>> = images.iter().map(|p| vec![MPoly::one(nv), p.clone()]).collect();
        let mut r = MPoly::zero(nv);
        for (m, c) in &self.terms {
            let mut t = MPoly::constant(nv, c.clone());
            for (i, e) in m.iter().enumerate() {
                let e = *e as usize;
                while cache[i].len() <= e {
                    let next = cache[i].last().unwrap().mul(&images[i]);
                    cache[i].push(next);
                }
                if e > 0 {
                    t = t.mul(&cache[i][e]);
                }
            }
            r = r.add(&t);
        }
        r
    }

    /// Coefficients with respect to variable `v`, indexed by power.
    pub fn coeffs_in(&self, v: usize) -> Vec<MPoly> {
        let mut out = vec![MPoly::zero(self.nvars); self.degree_in(v) as usize + 1];
        for (m, c) in &self.terms {
            let k = m[v] as usize;
            let mut mm = m.clone();
            mm[v] = 0;
            out[k].add_term(mm, c.clone());
        }
        out
    }

    fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.terms.keys().any(|m| m[v] > 0))
    }

    /// Exact quotient when `d` divides `self`.
    pub fn div_exact(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let (lm, lc) = d.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut r = self.clone();
        let mut q = MPoly::zero(self.nvars);
        while let Some((m, c)) = r.leading().map(|(m, c)| (m.clone(), c.clone())) {
            if m.iter().zip(&lm).any(|(a, b)| a < b) {
                return None;
            }
            let tm: Mono = m.iter().zip(&lm).map(|(a, b)| a - b).collect();
            let tc = c / &lc;
            let t = MPoly::monomial(tm, tc);
            r = r.sub(&t.mul(d));
            q = q.add(&t);
        }
        Some(q)
    }

    /// Rational content with the sign of the leading coefficient.
    pub fn content(&self) -> Q {
        let c = rational_content(self.terms.values());
        match self.leading() {
            Some((_, lc)) if lc.is_negative() => -c,
            _ => c,
        }
    }

    /// Integer-primitive representative with positive leading coefficient.
    pub fn normalized(&self) -> (Q, MPoly) {
        if self.is_zero() {
            return (Q::one(), self.clone());
        }
        let c = self.content();
        (c.clone(), self.scale(&(Q::one() / c)))
    }

    fn content_in(&self, v: usize) -> MPoly {
        let mut g = MPoly::zero(self.nvars);
        for c in self.coeffs_in(v) {
            if c.is_zero() {
                continue;
            }
            g = if g.is_zero() { c.normalized().1 } else { g.gcd(&c) };
            if g.is_constant() {
                return MPoly::one(self.nvars);
            }
        }
        g
    }

    fn pseudo_rem(&self, b: &MPoly, v: usize) -> MPoly {
        let db = b.degree_in(v);
        let bc = b.coeffs_in(v);
        let lb = bc.last().unwrap().clone();
        let mut r = self.clone();
        while !r.is_zero() && r.degree_in(v) >= db {
            let dr = r.degree_in(v);
            let lr = r.coeffs_in(v).pop().unwrap();
            let mut shift = vec![0; self.nvars];
            shift[v] = dr - db;
            let xs = MPoly::monomial(shift, Q::one());
            r = r.mul(&lb).sub(&lr.mul(&xs).mul(b));
        }
        r
    }

    /// Greatest common divisor, normalized (integer-primitive, positive leading coefficient).
    pub fn gcd(&self, o: &MPoly) -> MPoly {
        if self.is_zero() {
            return o.normalized().1;
        }
        if o.is_zero() {
            return self.normalized().1;
        }
        let v = match (self.main_var(), o.main_var()) {
            (None, _) | (_, None) => return MPoly::one(self.nvars),
            (Some(a), Some(b)) => a.max(b),
        };
        if self.degree_in(v) == 0 {
            return self.gcd(&o.content_in(v));
        }
        if o.degree_in(v) == 0 {
            return o.gcd(&self.content_in(v));
        }
        let (ca, cb) = (self.content_in(v), o.content_in(v));
        let c = ca.gcd(&cb);
        let mut a = self.div_exact(&ca).unwrap();
        let mut b = o.div_exact(&cb).unwrap();
        if a.degree_in(v) < b.degree_in(v) {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b, v);
            a = b;
            b = if r.is_zero() {
                r
            } else {
                let cr = r.content_in(v);
                r.div_exact(&cr).unwrap().normalized().1
            };
        }
        let g = if a.degree_in(v) == 0 {
            MPoly::one(self.nvars)
        } else {
            let ca = a.content_in(v);
            a.div_exact(&ca).unwrap()
        };
        c.mul(&g).normalized().1
    }

    pub fn eval_q(&self, x: &[Q]) -> Q {
        let mut s = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, e) in m.iter().enumerate() {
                for _ in 0..*e {
                    t *= &x[i];
                }
            }
            s += t;
        }
        s
    }

    pub fn fmt_with(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut ms: Vec<_> = self.terms.iter().collect();
        ms.sort_by(|a, b| mono_cmp(b.0, a.0));
        let mut out = String::new();
        for (k, (m, c)) in ms.into_iter().enumerate() {
            let mut factors = Vec::new();
            for (i, e) in m.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[i].clone()),
                    _ => factors.push(format!("{}^{}", names[i], e)),
                }
            }
            let cs = super::q_to_string(&c.abs());
            let body = if factors.is_empty() {
                cs
            } else if c.abs().is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", cs, factors.join("*"))
            };
            if k == 0 {
                out.push_str(if c.is_negative() { "-" } else { "" });
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;

    fn x(i: usize) -> MPoly {
        MPoly::var(3, i)
    }

    #[test]
    fn gcd_of_products() {
        let a = x(0).add(&x(1)); // t1 + t2
        let b = x(0).sub(&x(2).scale(&qi(2)));
        let c = x(1).mul(&x(1)).add(&MPoly::one(3));
        let p = a.mul(&b).mul(&b);
        let q = a.mul(&c).mul(&b).scale(&qi(-6));
        let g = p.gcd(&q);
        assert_eq!(g, a.mul(&b).normalized().1);
    }

    #[test]
    fn exact_division() {
        let a = x(0).add(&x(1));
        let p = a.pow(3).mul(&x(2));
        assert_eq!(p.div_exact(&a).unwrap(), a.pow(2).mul(&x(2)));
        assert!(p.div_exact(&x(0)).is_none());
    }
}
