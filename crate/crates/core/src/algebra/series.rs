//! Laurent polynomials in the single variable t with cyclotomic coefficients.

use super::{CycloField, CycloRational, Mono};
use crate::oracles::UnknownSymbol;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct UniSeries {
    n: u32,
    field: Arc<CycloField>,
    terms: BTreeMap<i64, CycloRational>,
}

impl PartialEq for UniSeries {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.terms == o.terms
    }
}
impl Eq for UniSeries {}

impl UniSeries {
    pub fn zero(field: &Arc<CycloField>) -> Self {
        UniSeries { n: field.order(), field: field.clone(), terms: BTreeMap::new() }
    }

    pub fn one(field: &Arc<CycloField>) -> Self {
        Self::monomial(field, 0, CycloRational::one(field))
    }

    pub fn monomial(field: &Arc<CycloField>, e: i64, c: CycloRational) -> Self {
        let mut s = Self::zero(field);
        s.add_term(e, c);
        s
    }

    pub fn field(&self) -> &Arc<CycloField> {
        &self.field
    }

    pub fn terms(&self) -> &BTreeMap<i64, CycloRational> {
        &self.terms
    }

    pub fn add_term(&mut self, e: i64, c: CycloRational) {
        if c.is_zero() {
            return;
        }
        let v = match self.terms.remove(&e) {
            Some(x) => x.add(&c),
            None => c,
        };
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(*e, c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        UniSeries { terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(), ..self.clone() }
    }

    pub fn scale(&self, k: &CycloRational) -> Self {
        let mut r = Self::zero(&self.field);
        for (e, c) in &self.terms {
            r.add_term(*e, c.mul(k));
        }
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut r = Self::zero(&self.field);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                r.add_term(e1 + e2, c1.mul(c2));
            }
        }
        r
    }

    pub fn monomial_inverse(&self) -> Option<Self> {
        if !self.is_monomial() {
            return None;
        }
        let (e, c) = self.terms.iter().next().unwrap();
        Some(Self::monomial(&self.field, -e, c.inv()?))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(|(e, c)| json!({"t": e, "coeff": c.to_json()})).collect())
    }
}

impl fmt::Display for UniSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("({})*t^{}", c, e)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for UniSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// (true, Some(e)) for c*t^e; (true, None) for zero, meaning degree -infinity.
pub fn is_t_monomial(u: &UniSeries) -> (bool, Option<i64>) {
    match u.terms.len() {
        0 => (true, None),
        1 => (true, u.terms.keys().next().copied()),
        _ => (false, None),
    }
}

/// Specialized expression: nilpotent monomial -> series, for the known part
/// and per unknown symbol.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Specialized {
    pub n: u32,
    pub known: BTreeMap<Mono, UniSeries>,
    pub unknowns: BTreeMap<UnknownSymbol, BTreeMap<Mono, UniSeries>>,
}

impl Specialized {
    pub fn is_zero(&self) -> bool {
        self.known.is_empty() && self.unknowns.is_empty()
    }
}
