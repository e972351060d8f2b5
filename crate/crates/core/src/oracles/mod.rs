//! Vertex-level invariants: psi/lambda integrals on moduli of pointed
//! curves (g <= 1), the P^4 ambient integral, unknown symbols and tables.

use crate::algebra::{parse_q, q_to_string, LocExpr, Q};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Mutex;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("out of oracle range; supply a table (key {0})")]
    OutOfRange(String),
    #[error("missing oracle entry {0}")]
    Missing(String),
    #[error("malformed oracle table at row {row}: {reason}")]
    BadRow { row: String, reason: String },
    #[error("malformed oracle table: {0}")]
    BadTable(String),
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub enum SymbolKind {
    Gw,
    Fjrw,
}

/// One oracle-backed vertex integral.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Atom {
    pub kind: SymbolKind,
    pub key: String,
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Gw => write!(f, "GW[{}]", self.key),
            SymbolKind::Fjrw => write!(f, "FJRW[{}]", self.key),
        }
    }
}

/// A product of atoms (sorted); the unit symbol has no atoms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct UnknownSymbol(Vec<Atom>);

impl UnknownSymbol {
    pub fn atom(kind: SymbolKind, key: impl Into<String>) -> Self {
        UnknownSymbol(vec![Atom { kind, key: key.into() }])
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.0
    }

    pub fn mul(&self, o: &UnknownSymbol) -> UnknownSymbol {
        let mut v = self.0.clone();
        v.extend(o.0.iter().cloned());
        v.sort();
        UnknownSymbol(v)
    }
}

impl fmt::Display for UnknownSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Key of a level-0 vertex integral
/// (-1)^(d+1-g) int_[Mbar_{g,n}(Q5,d)]^vir prod_i psi_i^a_i ev_i^*h^b_i prod_beta s_{k_beta}(R pi_* f^*O(1)).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GwKey {
    pub g: u32,
    pub degree: u32,
    /// (psi exponent, h exponent) per special point, sorted
    pub points: Vec<(u32, u32)>,
    /// Segre indices, one per hour, sorted
    pub segre: Vec<u32>,
}

impl GwKey {
    pub fn new(g: u32, degree: u32, mut points: Vec<(u32, u32)>, mut segre: Vec<u32>) -> Self {
        points.sort();
        segre.sort();
        GwKey { g, degree, points, segre }
    }

    pub fn key_string(&self) -> String {
        let pts: Vec<String> = self.points.iter().map(|(a, b)| format!("{}.{}", a, b)).collect();
        let seg: Vec<String> = self.segre.iter().map(|k| k.to_string()).collect();
        format!("g={};n={};d={};pts={};segre={}", self.g, self.points.len(), self.degree, pts.join(","), seg.join(","))
    }
}

/// Append-only record of the symbols a run has produced.
#[derive(Default, Debug)]
pub struct UnknownRegistry {
    seen: Mutex<BTreeSet<Atom>>,
}

impl UnknownRegistry {
    pub fn register(&self, kind: SymbolKind, key: &str) -> UnknownSymbol {
        let s = UnknownSymbol::atom(kind, key);
        self.seen.lock().unwrap().insert(s.0[0].clone());
        s
    }

    pub fn atoms(&self) -> Vec<Atom> {
        self.seen.lock().unwrap().iter().cloned().collect()
    }
}

pub fn register_unknown(reg: &UnknownRegistry, kind: SymbolKind, key: &str) -> UnknownSymbol {
    reg.register(kind, key)
}

/// Exact values for atoms (and for out-of-range intersection keys).
#[derive(Clone, Default, Debug, PartialEq, Eq)]
pub struct OracleTable {
    pub source: String,
    pub values: BTreeMap<String, Q>,
}

impl OracleTable {
    pub fn parse(source: &str, text: &str) -> Result<OracleTable, OracleError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| OracleError::BadTable(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| OracleError::BadTable("top level must be an object".into()))?;
        let mut values = BTreeMap::new();
        for (k, val) in obj {
            let s = val.as_str().ok_or_else(|| OracleError::BadRow {
                row: k.clone(),
                reason: "value must be a rational string".into(),
            })?;
            let q = parse_q(s).map_err(|_| OracleError::BadRow { row: k.clone(), reason: format!("not a rational: {:?}", s) })?;
            values.insert(k.clone(), q);
        }
        Ok(OracleTable { source: source.to_string(), values })
    }

    pub fn load(path: &std::path::Path) -> Result<OracleTable, OracleError> {
        let text = std::fs::read_to_string(path).map_err(|e| OracleError::BadTable(format!("{}: {}", path.display(), e)))?;
        Self::parse(&path.display().to_string(), &text)
    }
}

pub fn load_table(path: &std::path::Path) -> Result<OracleTable, OracleError> {
    OracleTable::load(path)
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IntersectionKey {
    pub g: u32,
    pub psi: Vec<u32>,
    pub lambda: u32,
}

impl IntersectionKey {
    pub fn new(g: u32, psi: Vec<u32>, lambda: u32) -> Self {
        IntersectionKey { g, psi, lambda }
    }

    pub fn key_string(&self) -> String {
        let mut p = self.psi.clone();
        p.sort();
        let ps: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        format!("Mbar[g={};n={};psi={};lambda={}]", self.g, self.psi.len(), ps.join(","), self.lambda)
    }

    fn dim_ok(&self) -> bool {
        let n = self.psi.len() as i64;
        let s: i64 = self.psi.iter().map(|x| *x as i64).sum::<i64>() + self.lambda as i64;
        s == 3 * self.g as i64 - 3 + n
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// int_{Mbar_{g,n}} prod psi_i^{a_i} lambda_1^{l}; g <= 1, else an error.
pub fn psi_lambda_integral(key: &IntersectionKey) -> Result<Q, OracleError> {
    if key.g >= 2 {
        return Err(OracleError::OutOfRange(key.key_string()));
    }
    if !key.dim_ok() || key.lambda > key.g {
        return Ok(Q::zero());
    }
    let n = key.psi.len() as u32;
    if key.g == 0 {
        if n < 3 {
            return Ok(Q::zero());
        }
        let den = key.psi.iter().fold(BigInt::one(), |a, x| a * factorial(*x));
        return Ok(Q::new(factorial(n - 3), den));
    }
    if n == 0 {
        return Ok(Q::zero());
    }
    Ok(genus_one(&key.psi, key.lambda))
}

// string and dilaton from <tau_1>_1 = <lambda_1>_1 = 1/24
fn genus_one(a: &[u32], lambda: u32) -> Q {
    let n = a.len();
    if n == 1 {
        return Q::new(BigInt::one(), BigInt::from(24));
    }
    if let Some(i) = a.iter().position(|x| *x == 0) {
        let rest: Vec<u32> = a.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect();
        let mut s = Q::zero();
        for j in 0..rest.len() {
            if rest[j] > 0 {
                let mut r = rest.clone();
                r[j] -= 1;
                s += genus_one(&r, lambda);
            }
        }
        return s;
    }
    // all exponents are 1
    let rest = &a[1..];
    Q::from_integer(BigInt::from(n as i64 - 1)) * genus_one(rest, lambda)
}

/// The oracle set consulted during assembly.
#[derive(Clone, Default, Debug)]
pub struct Oracles {
    pub tables: Vec<OracleTable>,
}

impl Oracles {
    pub fn with_tables(tables: Vec<OracleTable>) -> Self {
        Oracles { tables }
    }

    fn lookup(&self, key: &str) -> Option<(Q, String)> {
        for t in self.tables.iter().rev() {
            if let Some(v) = t.values.get(key) {
                return Some((v.clone(), t.source.clone()));
            }
        }
        None
    }

    pub fn intersection(&self, key: &IntersectionKey) -> Result<Q, OracleError> {
        match psi_lambda_integral(key) {
            Err(OracleError::OutOfRange(k)) => self.lookup(&k).map(|x| x.0).ok_or(OracleError::Missing(k)),
            r => r,
        }
    }

    pub fn atom_value(&self, a: &Atom) -> Option<(Q, String)> {
        self.lookup(&a.to_string())
    }

    /// Value of a product of atoms when every atom is tabulated.
    pub fn symbol_value(&self, s: &UnknownSymbol) -> Option<Q> {
        let mut v = Q::one();
        for a in s.atoms() {
            v *= self.atom_value(a)?.0;
        }
        Some(v)
    }

    /// Provenance string for each tabulated atom used in `syms`.
    pub fn provenance<'a>(&self, syms: impl Iterator<Item = &'a UnknownSymbol>) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for s in syms {
            for a in s.atoms() {
                if let Some((v, src)) = self.atom_value(a) {
                    out.insert(a.to_string(), format!("{} from {}", q_to_string(&v), src));
                }
            }
        }
        out
    }
}

/// Coefficient of h^4 for the nilpotent variable `h_index`; int_{P^4} h^4 = 1.
pub fn ambient_integrate_var(expr: &LocExpr, h_index: usize) -> LocExpr {
    let ctx = expr.ctx().clone();
    let mut out = LocExpr::zero(&ctx);
    for m in expr.nil_support() {
        if m[h_index] != 4 {
            continue;
        }
        let mut coeff_mono = m.clone();
        coeff_mono[h_index] = 0;
        let c = expr.nil_coeff(&m);
        // move the coefficient back onto the remaining nilpotent monomial
        let mut shifted = c;
        for (i, e) in coeff_mono.iter().enumerate() {
            for _ in 0..*e {
                shifted = shifted.mul(&LocExpr::nil(&ctx, i));
            }
        }
        out = out.add(&shifted);
    }
    out
}

/// int_{P^4}: coefficient of h^4 in an expression over the standard context.
pub fn ambient_integrate(expr: &LocExpr) -> LocExpr {
    ambient_integrate_var(expr, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{q, qi, VarCtx};

    #[test]
    fn base_values() {
        assert_eq!(psi_lambda_integral(&IntersectionKey::new(0, vec![0, 0, 0], 0)).unwrap(), qi(1));
        assert_eq!(psi_lambda_integral(&IntersectionKey::new(0, vec![1, 0, 0, 0], 0)).unwrap(), qi(1));
        assert_eq!(psi_lambda_integral(&IntersectionKey::new(1, vec![1], 0)).unwrap(), q(1, 24));
        assert_eq!(psi_lambda_integral(&IntersectionKey::new(1, vec![0], 1)).unwrap(), q(1, 24));
        assert_eq!(psi_lambda_integral(&IntersectionKey::new(1, vec![2, 0], 0)).unwrap(), q(1, 24));
        assert!(psi_lambda_integral(&IntersectionKey::new(2, vec![4], 0)).is_err());
        assert_eq!(psi_lambda_integral(&IntersectionKey::new(0, vec![1, 1, 0], 0)).unwrap(), qi(0));
    }

    #[test]
    fn ambient() {
        let ctx = VarCtx::standard(1);
        let h = LocExpr::h(&ctx);
        assert_eq!(ambient_integrate(&h.pow(4)), LocExpr::one(&ctx));
        assert_eq!(ambient_integrate(&h.scale(&qi(-5)).mul(&h.pow(3))), LocExpr::constant(&ctx, qi(-5)));
        assert!(ambient_integrate(&h.pow(2)).is_zero());
    }

    #[test]
    fn table_rows() {
        let t = OracleTable::parse("t", r#"{"GW[x]": "3/4", "FJRW[y]": "0"}"#).unwrap();
        assert_eq!(t.values["GW[x]"], q(3, 4));
        match OracleTable::parse("t", r#"{"GW[x]": "abc"}"#) {
            Err(OracleError::BadRow { row, .. }) => assert_eq!(row, "GW[x]"),
            other => panic!("{:?}", other),
        }
        let reg = UnknownRegistry::default();
        assert_eq!(reg.register(SymbolKind::Gw, "k"), reg.register(SymbolKind::Gw, "k"));
        assert_eq!(reg.atoms().len(), 1);
    }
}
