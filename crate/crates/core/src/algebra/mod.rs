//! Exact arithmetic: rationals, cyclotomic fields, multivariate polynomials,
//! localization expressions and the t-specialization.

mod cyclo;
mod locexpr;
mod poly;
mod series;

pub use cyclo::{cyclotomic_field, cyclotomic_polynomial, euler_phi, CycloField, CycloRational};
pub use locexpr::{Den, LocExpr, NilGroup, NilVar, VarCtx};
pub use poly::{Mono, MPoly};
pub use series::{is_t_monomial, Specialized, UniSeries};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Q = BigRational;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("vanishing localization weight")]
    VanishingWeight,
    #[error("division by zero after specialization")]
    DivisionByZero,
    #[error("denominator does not specialize to a monomial")]
    NonMonomialDenominator,
    #[error("expression depends on nilpotent variables")]
    NotNilFree,
    #[error("expression carries unknown symbols")]
    HasUnknowns,
    #[error("mismatched variable contexts")]
    ContextMismatch,
    #[error("malformed rational {0:?}")]
    BadRational(String),
}

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Result<Q, AlgebraError> {
    let bad = || AlgebraError::BadRational(s.to_string());
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Q::new(n, d))
}

/// Sign-and-content normalization helper: the positive rational c such that
/// the coefficients divided by c are coprime integers.
pub(crate) fn rational_content<'a>(coeffs: impl Iterator<Item = &'a Q>) -> Q {
    use num_integer::Integer;
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in coeffs {
        num = num.gcd(c.numer());
        den = den.lcm(c.denom());
    }
    if num.is_zero() {
        return Q::one();
    }
    Q::new(num.abs(), den)
}
