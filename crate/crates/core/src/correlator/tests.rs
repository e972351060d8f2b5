use super::*;
use crate::graphs::deg;

fn run(g: u32, n: u32, p: &[u32]) -> (CorrelatorSeries, Verdict) {
    let spec = CorrelatorSpec::new(g, n, p, deg(0, 1));
    let s = assemble(&spec, &Oracles::default()).unwrap();
    let v = check_polynomiality(&s, &spec);
    (s, v)
}

#[test]
fn epsilon_examples() {
    let e = |n, p: &[u32]| epsilon(&CorrelatorSpec::new(0, n, p, deg(0, 1)));
    assert_eq!(e(3, &[1, 1, 1]), (qi(0), true));
    assert_eq!(e(2, &[2, 2, 1]), (qi(1), true));
    assert_eq!(e(2, &[2, 1, 1]), (crate::algebra::q(1, 2), false));
}

#[test]
fn default_dmax() {
    assert_eq!(CorrelatorSpec::new(0, 2, &[1, 1, 1], deg(0, 1)).effective_dmax(), 1);
    assert_eq!(CorrelatorSpec::new(0, 2, &[2, 2, 1], deg(0, 1)).effective_dmax(), 1);
    assert_eq!(CorrelatorSpec::new(0, 2, &[2, 2, 2, 2], deg(0, 1)).effective_dmax(), 2);
}

#[test]
fn hhh_cancels_at_degree_zero() {
    for n in 1..=2 {
        let (s, v) = run(0, n, &[1, 1, 1]);
        let c0 = &s.coefficients[0];
        assert_eq!(c0.graphs.len(), 1 + n as usize);
        assert!(c0.known.is_zero() && c0.unknowns.is_empty(), "N={}: {}", n, c0.known);
        assert!(v.forced_vanishing_ok);
    }
}

#[test]
fn half_integral_epsilon_vanishes() {
    let (s, v) = run(0, 2, &[2, 1, 1]);
    assert!(!v.epsilon_integral);
    assert!(s.coefficients[0].known.is_zero());
}

#[test]
fn mixed_degree_insertion_rejected() {
    let mut spec = CorrelatorSpec::new(0, 1, &[1, 1, 1], deg(0, 1));
    spec.insertions[0] = InsertionSpec::Coeffs(vec!["1".into(), "1".into()]);
    assert!(matches!(assemble(&spec, &Oracles::default()), Err(CorrelatorError::BadSpec(_))));
}

#[test]
fn degree_one_relation_is_the_line_count() {
    // GW_{0,1}(H,H,H) = 2875, whatever N is
    for n in 1..=2u32 {
        let (s, v) = run(0, n, &[1, 1, 1]);
        assert!(v.polynomial, "{}", report_text(&s, &v));
        let r = &v.relations[0];
        assert_eq!(r.terms.len(), 1);
        let e = -2 * n as i64;
        let c = r.terms[0].1.terms()[&e].as_rational().unwrap();
        let k = r.constant.terms()[&e].as_rational().unwrap();
        assert_eq!(-k / c, qi(2875));
    }
}

#[test]
fn h2h2h_degree_zero_is_a_constant() {
    let (s, v) = run(0, 2, &[2, 2, 1]);
    assert!(v.polynomial, "{}", report_text(&s, &v));
    let (m, e) = is_t_monomial(&s.coefficients[0].known);
    assert!(m && e == Some(0));
    assert_eq!(s.coefficients[0].known.terms()[&0].as_rational(), Some(qi(5)));
    assert!(s.coefficients[1].known.is_zero());
}

#[test]
fn table_substitution_clears_unknowns() {
    let spec = CorrelatorSpec::new(0, 1, &[1, 1, 1], deg(0, 1));
    let t = crate::oracles::OracleTable::parse(
        "lines",
        r#"{"GW[g=0;n=3;d=1;pts=0.1,0.1,0.1;segre=0]": "2875"}"#,
    )
    .unwrap();
    let s = assemble(&spec, &Oracles::with_tables(vec![t])).unwrap();
    let v = check_polynomiality(&s, &spec);
    assert!(s.coefficients[1].unknowns.is_empty());
    assert!(s.coefficients[1].known.is_zero());
    assert!(v.forced_vanishing_ok && v.relations.is_empty());
    assert_eq!(s.provenance.len(), 1);
}


