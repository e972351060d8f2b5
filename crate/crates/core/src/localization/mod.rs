//! Graph contributions: the A-term product of a decorated graph, vertex
//! integration against the oracles, and the separation of level-1 nodes.
//!
//! All factors live in one variable context per graph. Each vertex owns a
//! group of nilpotent variables (h, psi, lambda, Segre); the product of all
//! factors is integrated group by group in a single pass.

mod factors;
mod layout;
mod separate;

pub use layout::{Layout, Point, VKind};
pub use separate::{is_separating, separate_node, separation_check, SeparationReport, Separated};

use crate::algebra::{q_to_string, AlgebraError, LocExpr, Q, VarCtx};
use crate::graphs::{canonical, DecoratedGraph, Deg, EdgeStabilizers, GraphError, Regularity};
use crate::oracles::{OracleError, Oracles};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::sync::Arc;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LocError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Restriction of H to a level-1 point of hour alpha: `Minus` gives -t_alpha.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HourSign {
    #[default]
    Minus,
    Plus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocConfig {
    #[serde(default)]
    pub hour_sign: HourSign,
    #[serde(default)]
    pub stabilizers: EdgeStabilizers,
}

/// Class inserted at a leg.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insertion {
    /// sum_j c_j H^j
    H(Vec<Q>),
    /// 1^alpha / (5 t_alpha / a - psi), produced by node separation
    Separation { alpha: u32, a: Deg },
}

impl Insertion {
    pub fn h_pow(j: u32) -> Self {
        let mut c = vec![Q::zero(); j as usize + 1];
        c[j as usize] = Q::one();
        Insertion::H(c)
    }

    pub fn one() -> Self {
        Insertion::h_pow(0)
    }

    pub fn h_degree(&self) -> Option<u32> {
        match self {
            Insertion::H(c) => c.iter().rposition(|x| !x.is_zero()).map(|d| d as u32),
            Insertion::Separation { .. } => None,
        }
    }
}

pub(crate) fn deg_q(d: &Deg) -> Q {
    Q::new(BigInt::from(*d.numer()), BigInt::from(*d.denom()))
}

#[derive(Clone, Debug)]
pub struct LedgerEntry {
    pub source: String,
    pub factor: LocExpr,
    /// minus the homogeneous degree of the factor
    pub rank_delta: i64,
}

impl LedgerEntry {
    fn to_json(&self) -> Value {
        json!({"source": self.source, "factor": self.factor.to_string(), "rank_delta": self.rank_delta})
    }
}

/// Evaluated Cont_Theta.
#[derive(Clone, Debug)]
pub struct GraphContribution {
    pub canonical: String,
    pub aut: u64,
    pub g_e: i64,
    pub regularity: Regularity,
    pub ledger: Vec<LedgerEntry>,
    pub insertions: Vec<LedgerEntry>,
    /// integrated, divided by |G_E| but not by |Aut|
    pub framed: LocExpr,
    /// framed / |Aut|
    pub value: LocExpr,
    pub vdim: Deg,
    pub rank: i64,
}

impl GraphContribution {
    pub fn expected_dim(&self) -> Deg {
        self.vdim - Deg::from_integer(self.rank)
    }

    pub fn to_json(&self) -> Value {
        let spec = match self.value.specialize_all() {
            Ok(s) => {
                let known: Vec<Value> = s.known.values().map(|u| u.to_json()).collect();
                let unk: serde_json::Map<String, Value> = s
                    .unknowns
                    .iter()
                    .map(|(k, m)| (k.to_string(), Value::Array(m.values().map(|u| u.to_json()).collect())))
                    .collect();
                json!({"known": known, "unknowns": unk})
            }
            Err(e) => json!({"error": e.to_string()}),
        };
        let syms: Vec<String> = self.value.unknowns().keys().map(|s| s.to_string()).collect();
        json!({
            "canonical": self.canonical,
            "aut": self.aut,
            "g_e": self.g_e,
            "regularity": self.regularity,
            "ledger": self.ledger.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
            "insertions": self.insertions.iter().map(|l| l.to_json()).collect::<Vec<_>>(),
            "value": self.value.to_json(),
            "specialized": spec,
            "unknowns": syms,
            "vdim": q_to_string(&deg_q(&self.vdim)),
            "rank": self.rank,
            "expected_dim": q_to_string(&deg_q(&self.expected_dim())),
        })
    }
}

fn rank_of(f: &LocExpr) -> i64 {
    f.degree_hint().map(|d| -d).unwrap_or(0)
}

fn entry(source: String, factor: LocExpr) -> LedgerEntry {
    let rank_delta = rank_of(&factor);
    LedgerEntry { source, factor, rank_delta }
}

/// The factor ledger of 1/e(N^vir) and the leg insertions, without integration.
pub fn factor_ledger(
    g: &DecoratedGraph,
    ins: &[Insertion],
    cfg: &LocConfig,
) -> Result<(Layout, Vec<LedgerEntry>, Vec<LedgerEntry>), LocError> {
    let ins = pad_insertions(g, ins)?;
    let lay = Layout::new(g, &ins)?;
    let b = factors::Builder::new(g, &lay, cfg);
    let ledger = b.ledger()?.into_iter().map(|(s, f)| entry(s, f)).collect();
    let insl = b.insertions(&ins)?.into_iter().map(|(s, f)| entry(s, f)).collect();
    Ok((lay, ledger, insl))
}

fn pad_insertions(g: &DecoratedGraph, ins: &[Insertion]) -> Result<Vec<Insertion>, LocError> {
    if ins.len() > g.legs.len() {
        return Err(LocError::Precondition(format!("{} insertions for {} legs", ins.len(), g.legs.len())));
    }
    let mut v = ins.to_vec();
    v.resize(g.legs.len(), Insertion::one());
    Ok(v)
}

/// Rank of N^vir and expected dimension, for any flat graph.
pub fn expected_dim(g: &DecoratedGraph, cfg: &LocConfig) -> Result<(i64, Deg), LocError> {
    let (_, ledger, _) = factor_ledger(g, &[], cfg)?;
    let rank: i64 = ledger.iter().map(|l| l.rank_delta).sum();
    Ok((rank, g.vdim() - Deg::from_integer(rank)))
}

fn product(ctx: &Arc<VarCtx>, fs: &[&LedgerEntry]) -> LocExpr {
    let mut p = LocExpr::one(ctx);
    for f in fs {
        p = p.mul(&f.factor);
        if p.is_zero() {
            break;
        }
    }
    p
}

/// Cont_Theta with the given leg insertions (missing ones are 1).
pub fn contribution(
    g: &DecoratedGraph,
    ins: &[Insertion],
    oracles: &Oracles,
    cfg: &LocConfig,
) -> Result<GraphContribution, LocError> {
    let regularity = if g.disconnected { Regularity::Regular } else { g.classify_regular()? };
    if let Regularity::Irregular(r) = &regularity {
        return Err(LocError::Precondition(format!("irregular graph: {}", r)));
    }
    let (lay, ledger, insertions) = factor_ledger(g, ins, cfg)?;
    let all: Vec<&LedgerEntry> = ledger.iter().chain(insertions.iter()).collect();
    let p = product(&lay.ctx, &all);
    let integrated = lay.integrate(g, &p, oracles)?;
    finish(g, regularity, ledger, insertions, integrated, cfg)
}

fn finish(
    g: &DecoratedGraph,
    regularity: Regularity,
    ledger: Vec<LedgerEntry>,
    insertions: Vec<LedgerEntry>,
    integrated: LocExpr,
    cfg: &LocConfig,
) -> Result<GraphContribution, LocError> {
    let c = canonical(g);
    let g_e = g.g_edges_order(&cfg.stabilizers);
    let framed = integrated.scale(&(Q::one() / Q::from_integer(BigInt::from(g_e)))).reduce();
    let value = framed.scale(&(Q::one() / Q::from_integer(BigInt::from(c.aut))));
    let rank = ledger.iter().map(|l| l.rank_delta).sum();
    Ok(GraphContribution {
        canonical: c.key,
        aut: c.aut,
        g_e,
        regularity,
        ledger,
        insertions,
        framed,
        value,
        vdim: g.vdim(),
        rank,
    })
}

/// Recompute the value from the ledger in reverse order; true when it matches.
pub fn audit(g: &DecoratedGraph, c: &GraphContribution, ins: &[Insertion], oracles: &Oracles) -> Result<bool, LocError> {
    let ins = pad_insertions(g, ins)?;
    let lay = Layout::new(g, &ins)?;
    let all: Vec<&LedgerEntry> = c.ledger.iter().rev().chain(c.insertions.iter()).collect();
    let p = product(&lay.ctx, &all);
    let v = lay.integrate(g, &p, oracles)?;
    let norm = Q::one() / Q::from_integer(BigInt::from(c.g_e as i64 * c.aut as i64));
    Ok(v.scale(&norm) == c.value)
}

#[cfg(test)]
mod tests;
