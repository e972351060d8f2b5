//! Correlator assembly: sum regular-graph contributions degree by degree,
//! specialize, and check the degree bound in q/t^N.

use crate::algebra::{is_t_monomial, parse_q, q_to_string, qi, AlgebraError, LocExpr, Q, UniSeries, VarCtx};
use crate::enumerate::{deg_serde, enumerate, EnumError, EnumSpec};
use crate::graphs::Deg;
use crate::localization::{contribution, Insertion, LocConfig, LocError};
use crate::oracles::{Oracles, UnknownSymbol};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CorrelatorError {
    #[error("bad spec: {0}")]
    BadSpec(String),
    #[error(transparent)]
    Enum(#[from] EnumError),
    #[error("graph {canonical}: {source}")]
    Graph { canonical: String, source: LocError },
    #[error("degree {d}: {source}")]
    Specialize { d: i64, source: AlgebraError },
}

/// A leg class: `2` means H^2, a list gives coefficients of 1, H, H^2, ...
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InsertionSpec {
    Power(u32),
    Coeffs(Vec<String>),
}

impl InsertionSpec {
    pub fn coeffs(&self) -> Result<Vec<Q>, CorrelatorError> {
        match self {
            InsertionSpec::Power(j) => match Insertion::h_pow(*j) {
                Insertion::H(c) => Ok(c),
                _ => unreachable!(),
            },
            InsertionSpec::Coeffs(v) => v
                .iter()
                .map(|s| parse_q(s).map_err(|e| CorrelatorError::BadSpec(format!("coefficient {:?}: {}", s, e))))
                .collect(),
        }
    }

    /// Degree of a homogeneous class; None for zero or mixed degree.
    fn degree(&self) -> Result<Option<u32>, CorrelatorError> {
        let c = self.coeffs()?;
        let nz: Vec<usize> = (0..c.len()).filter(|i| !c[*i].is_zero()).collect();
        Ok(if nz.len() == 1 { Some(nz[0] as u32) } else { None })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelatorSpec {
    #[serde(default = "one")]
    pub schema_version: u32,
    pub g: u32,
    pub n_hours: u32,
    /// one class per (1, rho) leg
    pub insertions: Vec<InsertionSpec>,
    #[serde(with = "deg_serde", default)]
    pub dinf: Deg,
    #[serde(default)]
    pub dmax: Option<i64>,
    #[serde(default)]
    pub config: LocConfig,
}

fn one() -> u32 {
    1
}

impl CorrelatorSpec {
    pub fn new(g: u32, n_hours: u32, powers: &[u32], dinf: Deg) -> Self {
        CorrelatorSpec {
            schema_version: SCHEMA_VERSION,
            g,
            n_hours,
            insertions: powers.iter().map(|p| InsertionSpec::Power(*p)).collect(),
            dinf,
            dmax: None,
            config: LocConfig::default(),
        }
    }

    pub fn n(&self) -> usize {
        self.insertions.len()
    }

    pub fn check(&self) -> Result<(), CorrelatorError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CorrelatorError::BadSpec(format!("schema_version {}", self.schema_version)));
        }
        if self.n_hours == 0 {
            return Err(CorrelatorError::BadSpec("N must be positive".into()));
        }
        for (i, s) in self.insertions.iter().enumerate() {
            let c = s.coeffs()?;
            if c.len() > 5 + self.n_hours as usize && c[5 + self.n_hours as usize..].iter().any(|x| !x.is_zero()) {
                return Err(CorrelatorError::BadSpec(format!("insertion {} has H-degree above 4+N", i)));
            }
            if s.degree()?.is_none() {
                return Err(CorrelatorError::BadSpec(format!("insertion {} is not a nonzero H-monomial", i)));
            }
        }
        if 5 % *self.dinf.denom() != 0 || self.dinf.is_negative() {
            return Err(CorrelatorError::BadSpec(format!("d_inf {} not in (1/5)Z>=0", self.dinf)));
        }
        Ok(())
    }

    fn degrees(&self) -> Vec<u32> {
        self.insertions.iter().map(|s| s.degree().ok().flatten().unwrap_or(0)).collect()
    }

    fn loc_insertions(&self) -> Result<Vec<Insertion>, CorrelatorError> {
        self.insertions.iter().map(|s| s.coeffs().map(Insertion::H)).collect()
    }

    /// g - 1 + epsilon.
    pub fn bound(&self) -> Q {
        qi(self.g as i64 - 1) + epsilon(self).0
    }

    /// Requested dMax, or max(g - 1 + eps, 0) rounded down, plus one.
    pub fn effective_dmax(&self) -> i64 {
        self.dmax.unwrap_or_else(|| {
            let b = self.bound();
            let b = if b.is_negative() { Q::zero() } else { b };
            b.floor().to_integer().try_into().unwrap_or(0i64) + 1
        })
    }
}

/// epsilon = (sum (deg tau_i - 1) - d_inf) / N, with an integrality flag.
pub fn epsilon(spec: &CorrelatorSpec) -> (Q, bool) {
    let s: i64 = spec.degrees().iter().map(|d| *d as i64 - 1).sum();
    let dinf = Q::new(BigInt::from(*spec.dinf.numer()), BigInt::from(*spec.dinf.denom()));
    let e = (qi(s) - dinf) / qi(spec.n_hours as i64);
    let int = e.is_integer();
    (e, int)
}

/// One q^d coefficient.
#[derive(Clone, Debug)]
pub struct Coefficient {
    pub d: i64,
    pub sign: i64,
    /// canonical forms of the contributing graphs, sorted
    pub graphs: Vec<String>,
    /// signed sum before specialization, tabulated symbols substituted
    pub raw: LocExpr,
    pub known: UniSeries,
    pub unknowns: BTreeMap<UnknownSymbol, UniSeries>,
    /// tabulated atoms used at this degree: value and source
    pub provenance: BTreeMap<String, String>,
}

#[derive(Clone, Debug)]
pub struct CorrelatorSeries {
    pub spec: CorrelatorSpec,
    pub epsilon: Q,
    pub coefficients: Vec<Coefficient>,
    pub provenance: BTreeMap<String, String>,
}

fn sign(x: i64) -> i64 {
    if x.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Signed, specialized coefficients for d = 0..=dMax.
pub fn assemble(spec: &CorrelatorSpec, oracles: &Oracles) -> Result<CorrelatorSeries, CorrelatorError> {
    spec.check()?;
    let ins = spec.loc_insertions()?;
    let degrees: Vec<i64> = (0..=spec.effective_dmax()).collect();
    let coefficients = degrees
        .par_iter()
        .map(|d| coefficient(spec, &ins, *d, oracles))
        .collect::<Result<Vec<_>, _>>()?;
    let mut provenance = BTreeMap::new();
    for c in &coefficients {
        provenance.extend(c.provenance.clone());
    }
    let (eps, _) = epsilon(spec);
    Ok(CorrelatorSeries { spec: spec.clone(), epsilon: eps, coefficients, provenance })
}

fn contributions(
    spec: &CorrelatorSpec,
    ins: &[Insertion],
    d: i64,
    oracles: &Oracles,
) -> Result<Vec<(String, LocExpr)>, CorrelatorError> {
    let es = EnumSpec::rho(spec.g, spec.n(), Deg::from_integer(d), spec.dinf, spec.n_hours);
    let graphs = match enumerate(&es) {
        Ok(g) => g,
        // no stable data at this degree: the moduli is empty
        Err(EnumError::Unstable(_)) => vec![],
        Err(e) => return Err(e.into()),
    };
    graphs
        .par_iter()
        .map(|eg| {
            contribution(&eg.graph, ins, oracles, &spec.config)
                .map(|c| (eg.canonical.clone(), c.value))
                .map_err(|source| CorrelatorError::Graph { canonical: eg.canonical.clone(), source })
        })
        .collect()
}

fn coefficient(spec: &CorrelatorSpec, ins: &[Insertion], d: i64, oracles: &Oracles) -> Result<Coefficient, CorrelatorError> {
    let parts = contributions(spec, ins, d, oracles)?;
    let ctx = VarCtx::t_only(spec.n_hours as usize);
    // canonical order, so the sum does not depend on scheduling
    let mut sum = LocExpr::zero(&ctx);
    for (_, v) in &parts {
        sum = sum.add(v);
    }
    let s = sign(d + 1 - spec.g as i64);
    let raw = sum.scale(&qi(s)).reduce();
    let provenance = oracles.provenance(raw.unknowns().keys());
    let raw = raw.substitute(&|u| oracles.symbol_value(u));
    let sp = raw.specialize_all().map_err(|source| CorrelatorError::Specialize { d, source })?;
    let zero = ctx.nil_zero();
    let field = crate::algebra::cyclotomic_field(spec.n_hours);
    let known = sp.known.get(&zero).cloned().unwrap_or_else(|| UniSeries::zero(&field));
    let unknowns = sp
        .unknowns
        .into_iter()
        .filter_map(|(u, m)| m.get(&zero).cloned().filter(|x| !x.is_zero()).map(|x| (u, x)))
        .collect();
    let graphs = parts.into_iter().map(|p| p.0).collect();
    Ok(Coefficient { d, sign: s, graphs, raw, known, unknowns, provenance })
}

/// Outcome for one degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeStatus {
    /// d within the bound: coefficient is c t^e with the predicted e (or 0)
    Monomial,
    /// d within the bound but the coefficient has the wrong shape
    BadShape,
    /// d beyond the bound (or eps not integral) and the coefficient is 0
    Vanishes,
    /// forced vanishing with unknowns present: a relation among them
    Relation,
    /// forced vanishing fails on an unknown-free coefficient
    VanishingFailed,
}

#[derive(Clone, Debug, Serialize)]
pub struct DegreeVerdict {
    pub d: i64,
    pub forced: bool,
    /// predicted t-exponent N (g - 1 + eps - d), when integral
    pub exponent: Option<i64>,
    pub status: DegreeStatus,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Relation {
    pub d: i64,
    /// known part: the relation reads constant + sum c_i U_i = 0
    pub constant: UniSeries,
    pub terms: Vec<(UnknownSymbol, UniSeries)>,
    /// every coefficient is a t-monomial and all share one degree
    pub well_formed: bool,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub epsilon_integral: bool,
    pub bound: Q,
    pub degrees: Vec<DegreeVerdict>,
    pub relations: Vec<Relation>,
    /// true when no forced vanishing failed and every shape check passed
    pub polynomial: bool,
    pub forced_vanishing_ok: bool,
}

fn monomial_with(u: &UniSeries, e: Option<i64>) -> bool {
    match is_t_monomial(u) {
        (true, None) => true,
        (true, Some(x)) => Some(x) == e,
        _ => false,
    }
}

pub fn check_polynomiality(series: &CorrelatorSeries, spec: &CorrelatorSpec) -> Verdict {
    let (_, int) = epsilon(spec);
    let bound = spec.bound();
    let nn = spec.n_hours as i64;
    let mut degrees = Vec::new();
    let mut relations = Vec::new();
    for c in &series.coefficients {
        let dq = qi(c.d);
        let forced = !int || dq > bound;
        let e = (qi(nn) * (bound.clone() - dq)).to_integer_opt();
        let (status, detail) = if forced {
            if c.unknowns.is_empty() {
                if c.known.is_zero() {
                    (DegreeStatus::Vanishes, String::new())
                } else {
                    (DegreeStatus::VanishingFailed, format!("unknown-free coefficient {}", c.known))
                }
            } else {
                // the known part is the constant term of the relation
                let terms: Vec<(UnknownSymbol, UniSeries)> =
                    c.unknowns.iter().map(|(u, s)| (u.clone(), s.clone())).collect();
                let mut all: Vec<&UniSeries> = terms.iter().map(|t| &t.1).collect();
                if !c.known.is_zero() {
                    all.push(&c.known);
                }
                let exps: Vec<(bool, Option<i64>)> = all.iter().map(|s| is_t_monomial(s)).collect();
                let well_formed = exps.iter().all(|(m, x)| *m && x.is_some()) && exps.windows(2).all(|w| w[0].1 == w[1].1);
                relations.push(Relation { d: c.d, constant: c.known.clone(), terms, well_formed });
                (DegreeStatus::Relation, format!("{} unknowns", c.unknowns.len()))
            }
        } else {
            let ok = monomial_with(&c.known, e) && c.unknowns.values().all(|s| monomial_with(s, e));
            if ok {
                (DegreeStatus::Monomial, String::new())
            } else {
                (DegreeStatus::BadShape, format!("expected c*t^{:?}, got {}", e, c.known))
            }
        };
        degrees.push(DegreeVerdict { d: c.d, forced, exponent: e, status, detail });
    }
    let forced_vanishing_ok = degrees.iter().all(|v| v.status != DegreeStatus::VanishingFailed);
    let polynomial = forced_vanishing_ok
        && degrees.iter().all(|v| v.status != DegreeStatus::BadShape)
        && relations.iter().all(|r| r.well_formed);
    Verdict { epsilon_integral: int, bound, degrees, relations, polynomial, forced_vanishing_ok }
}

trait ToIntOpt {
    fn to_integer_opt(&self) -> Option<i64>;
}

impl ToIntOpt for Q {
    fn to_integer_opt(&self) -> Option<i64> {
        if self.is_integer() {
            self.to_integer().try_into().ok()
        } else {
            None
        }
    }
}

fn series_json(u: &UniSeries) -> Value {
    u.to_json()
}

/// The report document; key order and content are deterministic.
pub fn report_json(series: &CorrelatorSeries, verdict: &Verdict) -> Value {
    let coeffs: Vec<Value> = series
        .coefficients
        .iter()
        .map(|c| {
            let unk: serde_json::Map<String, Value> =
                c.unknowns.iter().map(|(u, s)| (u.to_string(), series_json(s))).collect();
            json!({
                "d": c.d,
                "sign": c.sign,
                "graphs": c.graphs,
                "unspecialized": c.raw.to_string(),
                "known": series_json(&c.known),
                "known_text": c.known.to_string(),
                "unknowns": unk,
            })
        })
        .collect();
    let rels: Vec<Value> = verdict
        .relations
        .iter()
        .map(|r| {
            let mut text: Vec<String> = r.terms.iter().map(|(u, s)| format!("({})*{}", s, u)).collect();
            if !r.constant.is_zero() {
                text.insert(0, format!("({})", r.constant));
            }
            json!({
                "constant": series_json(&r.constant),
                "d": r.d,
                "relation": format!("{} = 0", text.join(" + ")),
                "terms": r.terms.iter().map(|(u, s)| json!({"symbol": u.to_string(), "coeff": series_json(s)})).collect::<Vec<_>>(),
                "well_formed": r.well_formed,
            })
        })
        .collect();
    let unresolved: std::collections::BTreeSet<String> = series
        .coefficients
        .iter()
        .flat_map(|c| c.unknowns.keys().flat_map(|u| u.atoms().iter().map(|a| a.to_string())))
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "spec": series.spec,
        "epsilon": q_to_string(&series.epsilon),
        "epsilon_integral": verdict.epsilon_integral,
        "bound": q_to_string(&verdict.bound),
        "dmax": series.spec.effective_dmax(),
        "coefficients": coeffs,
        "verdict": {
            "polynomial": verdict.polynomial,
            "forced_vanishing_ok": verdict.forced_vanishing_ok,
            "degrees": verdict.degrees,
        },
        "relations": rels,
        "provenance": series.provenance,
        "unresolved": unresolved,
    })
}

/// Plain-text summary of a report.
pub fn report_text(series: &CorrelatorSeries, verdict: &Verdict) -> String {
    let mut s = format!(
        "g={} n={} N={} d_inf={} eps={} bound={}\n",
        series.spec.g,
        series.spec.n(),
        series.spec.n_hours,
        series.spec.dinf,
        q_to_string(&series.epsilon),
        q_to_string(&verdict.bound)
    );
    for (c, v) in series.coefficients.iter().zip(&verdict.degrees) {
        s += &format!("q^{}: {} graphs, known = {}, {} unknowns, {:?}\n", c.d, c.graphs.len(), c.known, c.unknowns.len(), v.status);
    }
    for r in &verdict.relations {
        let mut text: Vec<String> = r.terms.iter().map(|(u, s)| format!("({})*{}", s, u)).collect();
        if !r.constant.is_zero() {
            text.insert(0, format!("({})", r.constant));
        }
        s += &format!("relation at q^{}: {} = 0\n", r.d, text.join(" + "));
    }
    s
}

#[cfg(test)]
mod tests;
