//! The cyclotomic field Q(zeta_N) in the power basis modulo Phi_N.

use super::{q_to_string, Q};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

pub fn euler_phi(n: u32) -> u32 {
    (1..=n).filter(|k| num_integer::gcd(*k, n) == 1).count() as u32
}

/// Integer coefficients of Phi_n, low degree first, from x^n - 1 = prod_{d | n} Phi_d.
pub fn cyclotomic_polynomial(n: u32) -> Vec<BigInt> {
    assert!(n >= 1);
    let mut p = vec![BigInt::zero(); n as usize + 1];
    p[0] = -BigInt::one();
    p[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            p = div_monic(&p, &cyclotomic_polynomial(d));
        }
    }
    p
}

// exact division by a monic integer polynomial
fn div_monic(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    let mut quo = vec![BigInt::zero(); a.len() - db];
    for i in (0..quo.len()).rev() {
        let c = r[i + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[i + j] -= &c * bj;
        }
        quo[i] = c;
    }
    debug_assert!(r.iter().all(|x| x.is_zero()));
    quo
}

#[derive(Debug)]
pub struct CycloField {
    n: u32,
    phi: Vec<BigInt>,
    zeta_pows: Vec<Vec<Q>>,
}

pub fn cyclotomic_field(n: u32) -> Arc<CycloField> {
    CycloField::new(n)
}

impl CycloField {
    pub fn new(n: u32) -> Arc<CycloField> {
        assert!(n >= 1, "cyclotomic order must be positive");
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        let mut f = CycloField { n, phi, zeta_pows: Vec::new() };
        let mut pows = Vec::with_capacity(n as usize);
        for k in 0..n as usize {
            let mut raw = vec![Q::zero(); k + 1];
            raw[k] = Q::one();
            pows.push(f.reduce(raw));
        }
        debug_assert!(pows.iter().all(|p| p.len() == deg));
        f.zeta_pows = pows;
        Arc::new(f)
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.phi.len() - 1
    }

    pub fn modulus(&self) -> &[BigInt] {
        &self.phi
    }

    fn reduce(&self, mut c: Vec<Q>) -> Vec<Q> {
        let d = self.degree();
        for i in (d..c.len()).rev() {
            let top = std::mem::replace(&mut c[i], Q::zero());
            if top.is_zero() {
                continue;
            }
            for j in 0..d {
                if !self.phi[j].is_zero() {
                    c[i - d + j] -= &top * Q::from_integer(self.phi[j].clone());
                }
            }
        }
        c.resize(d, Q::zero());
        c
    }
}

#[derive(Clone)]
pub struct CycloRational {
    field: Arc<CycloField>,
    coeffs: Vec<Q>,
}

impl fmt::Debug for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl PartialEq for CycloRational {
    fn eq(&self, o: &Self) -> bool {
        self.field.n == o.field.n && self.coeffs == o.coeffs
    }
}
impl Eq for CycloRational {}

impl fmt::Display for CycloRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let cs = q_to_string(c);
            parts.push(match i {
                0 => cs,
                1 => format!("({})*z{}", cs, self.field.n),
                _ => format!("({})*z{}^{}", cs, self.field.n, i),
            });
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CycloJson {
    pub n: u32,
    pub coeffs: Vec<String>,
}

impl CycloRational {
    pub fn zero(field: &Arc<CycloField>) -> Self {
        CycloRational { field: field.clone(), coeffs: vec![Q::zero(); field.degree()] }
    }

    pub fn from_q(field: &Arc<CycloField>, x: Q) -> Self {
        let mut z = Self::zero(field);
        z.coeffs[0] = x;
        z
    }

    pub fn one(field: &Arc<CycloField>) -> Self {
        Self::from_q(field, Q::one())
    }

    /// zeta_N^k for any integer k.
    pub fn zeta_pow(field: &Arc<CycloField>, k: i64) -> Self {
        let n = field.n as i64;
        let k = k.rem_euclid(n) as usize;
        CycloRational { field: field.clone(), coeffs: field.zeta_pows[k].clone() }
    }

    pub fn from_coeffs(field: &Arc<CycloField>, raw: Vec<Q>) -> Self {
        CycloRational { field: field.clone(), coeffs: field.reduce(raw) }
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    /// Rational value when the element lies in Q.
    pub fn as_rational(&self) -> Option<Q> {
        if self.coeffs[1..].iter().all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.field.n, o.field.n, "mixed cyclotomic orders");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        CycloRational { field: self.field.clone(), coeffs }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        CycloRational { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| -a).collect() }
    }

    pub fn scale(&self, k: &Q) -> Self {
        CycloRational { field: self.field.clone(), coeffs: self.coeffs.iter().map(|a| a * k).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let d = self.field.degree();
        let mut raw = vec![Q::zero(); 2 * d - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    raw[i + j] += a * b;
                }
            }
        }
        CycloRational { field: self.field.clone(), coeffs: self.field.reduce(raw) }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(&self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiplicative inverse via the extended Euclidean algorithm in Q[x].
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let m: Vec<Q> = self.field.phi.iter().map(|c| Q::from_integer(c.clone())).collect();
        let a = trim(self.coeffs.clone());
        // invariants: r0 = s0 * a (mod m), r1 = s1 * a (mod m)
        let (mut r0, mut r1) = (m, a);
        let (mut s0, mut s1) = (vec![], vec![Q::one()]);
        while !(r1.len() == 1) {
            let (quo, rem) = upoly_divrem(&r0, &r1);
            let s2 = upoly_sub(&s0, &upoly_mul(&quo, &s1));
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
            if r1.is_empty() {
                return None;
            }
        }
        let c = r1[0].clone();
        let inv: Vec<Q> = s1.iter().map(|x| x / &c).collect();
        Some(CycloRational::from_coeffs(&self.field, inv))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|i| self.mul(&i))
    }

    pub fn to_json(&self) -> CycloJson {
        CycloJson { n: self.field.n, coeffs: self.coeffs.iter().map(q_to_string).collect() }
    }
}

fn trim(mut v: Vec<Q>) -> Vec<Q> {
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    v
}

fn upoly_mul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut r = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            r[i + j] += x * y;
        }
    }
    trim(r)
}

fn upoly_sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    let mut r = vec![Q::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        r[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        r[i] -= y;
    }
    trim(r)
}

fn upoly_divrem(a: &[Q], b: &[Q]) -> (Vec<Q>, Vec<Q>) {
    let mut r = trim(a.to_vec());
    let b = trim(b.to_vec());
    let db = b.len() - 1;
    let lb = b[db].clone();
    if r.len() < b.len() {
        return (vec![], r);
    }
    let mut quo = vec![Q::zero(); r.len() - db];
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / &lb;
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        quo[k] = c;
        r = trim(r);
    }
    (trim(quo), r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::qi;

    #[test]
    fn small_cyclotomic_polynomials() {
        let v = |n| cyclotomic_polynomial(n).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        assert_eq!(v(1), "-1,1");
        assert_eq!(v(2), "1,1");
        assert_eq!(v(5), "1,1,1,1,1");
        assert_eq!(v(6), "1,-1,1");
    }

    #[test]
    fn zeta_order_relations() {
        for n in 1..=12u32 {
            let f = cyclotomic_field(n);
            assert_eq!(f.degree() as u32, euler_phi(n));
            let z = CycloRational::zeta_pow(&f, 1);
            assert!(z.pow(n).is_one());
            if n > 1 {
                assert!(!z.pow(n - 1).is_one() || n == 1);
            }
        }
        let f6 = cyclotomic_field(6);
        let z = CycloRational::zeta_pow(&f6, 1);
        assert_eq!(z.mul(&z), z.sub(&CycloRational::one(&f6)));
    }

    #[test]
    fn inverse_round_trip() {
        let f = cyclotomic_field(7);
        let a = CycloRational::from_coeffs(&f, vec![qi(2), qi(-1), qi(0), qi(3)]);
        let b = a.inv().unwrap();
        assert!(a.mul(&b).is_one());
    }
}
