use super::*;
use crate::graphs::deg;

fn keys(v: &[EnumeratedGraph]) -> Vec<String> {
    v.iter().map(|x| x.canonical.clone()).collect()
}

#[test]
fn three_points_two_hours() {
    let s = EnumSpec::rho(0, 3, deg(0, 1), deg(0, 1), 2);
    let out = enumerate(&s).unwrap();
    assert_eq!(out.len(), 3);
    assert_eq!(keys(&out), keys(&brute_force_oracle(&s, 4).unwrap()));
}

#[test]
fn degree_one_has_e01_edge() {
    let s = EnumSpec::rho(0, 3, deg(1, 1), deg(0, 1), 1);
    let out = enumerate(&s).unwrap();
    assert!(out.iter().any(|x| x.graph.edges.len() == 1 && x.graph.edges[0].kind == EdgeKind::E01));
    assert_eq!(keys(&out), keys(&brute_force_oracle(&s, 4).unwrap()));
}

#[test]
fn unstable_data_rejected() {
    let s = EnumSpec::rho(0, 2, deg(0, 1), deg(0, 1), 1);
    assert!(enumerate(&s).is_err());
    assert!(brute_force_oracle(&s, 3).is_err());
}
