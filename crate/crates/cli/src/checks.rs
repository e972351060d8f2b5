//! Invariant suites, one per acceptance criterion.
//!
//! `Scale::Full` is the pinned acceptance grid; `Scale::Quick` shrinks the
//! sweeps so `nmsp check` finishes in seconds.

use nmsp_core::algebra::{LocExpr, UniSeries, VarCtx};
use nmsp_core::correlator::{assemble, check_polynomiality, report_json, CorrelatorSpec, DegreeStatus};
use nmsp_core::enumerate::{brute_force_oracle, brute_force_raw, enumerate, EnumSpec};
use nmsp_core::graphs::{canonical, deg, Deg, Regularity};
use nmsp_core::localization::{expected_dim, is_separating, separation_check, Insertion, LocConfig};
use nmsp_core::oracles::{psi_lambda_integral, IntersectionKey, Oracles};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::HashMap;
use std::time::Instant;

type Q = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scale {
    Quick,
    Full,
}

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub tolerance: &'static str,
    /// seconds
    pub target: f64,
    pub exact_ok: bool,
    pub elapsed: f64,
    pub detail: String,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.exact_ok && self.elapsed <= self.target
    }

    pub fn line(&self) -> String {
        let timing = if self.elapsed <= self.target { "" } else { " OVER TARGET" };
        format!(
            "criterion {:>2} {}: {} [{}; {:.2}s of {}s{}] {}",
            self.id,
            self.name,
            if self.pass() { "PASS" } else { "FAIL" },
            self.tolerance,
            self.elapsed,
            self.target,
            timing,
            self.detail
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "criterion": self.id,
            "name": self.name,
            "pass": self.pass(),
            "exact_ok": self.exact_ok,
            "tolerance": self.tolerance,
            "target_s": self.target,
            "elapsed_s": self.elapsed,
            "detail": self.detail,
        })
    }
}

fn timed(
    id: u32,
    name: &'static str,
    tolerance: &'static str,
    target: f64,
    f: impl FnOnce() -> (bool, String),
) -> Outcome {
    let t = Instant::now();
    let (exact_ok, detail) = f();
    Outcome { id, name, tolerance, target, exact_ok, elapsed: t.elapsed().as_secs_f64(), detail }
}

/// Run every suite in order, handing each outcome to `report` as it finishes.
pub fn run_all(scale: Scale, mut report: impl FnMut(&Outcome)) -> Vec<Outcome> {
    let suites: Vec<Box<dyn Fn() -> Outcome>> = vec![
        Box::new(forced_vanishing),
        Box::new(nonintegral_epsilon),
        Box::new(monomial_homogeneity),
        Box::new(move || separation(scale)),
        Box::new(substitution),
        Box::new(move || irregular_dimension(scale)),
        Box::new(move || enumeration_oracle(scale)),
        Box::new(move || flattening(scale)),
        Box::new(intersection_oracle),
        Box::new(determinism),
    ];
    suites
        .iter()
        .map(|f| {
            let o = f();
            report(&o);
            o
        })
        .collect()
}

fn hhh_spec(n: u32) -> CorrelatorSpec {
    let mut s = CorrelatorSpec::new(0, n, &[1, 1, 1], deg(0, 1));
    s.dmax = Some(0);
    s
}

pub fn forced_vanishing() -> Outcome {
    timed(1, "forced vanishing of (H,H,H) at d=0", "exact", 10.0, || {
        let mut notes = Vec::new();
        let mut ok = true;
        for n in 1..=2 {
            match assemble(&hhh_spec(n), &Oracles::default()) {
                Ok(s) => {
                    let c = &s.coefficients[0];
                    let zero = c.known.is_zero() && c.unknowns.is_empty();
                    ok &= zero && c.graphs.len() > n as usize;
                    notes.push(format!("N={}: {} graphs, q^0 = {}", n, c.graphs.len(), c.known));
                }
                Err(e) => {
                    ok = false;
                    notes.push(format!("N={}: {}", n, e));
                }
            }
        }
        (ok, notes.join("; "))
    })
}

pub fn nonintegral_epsilon() -> Outcome {
    // (g, N, powers, d_inf in fifths)
    const SPECS: [(u32, u32, &[u32], i64); 4] =
        [(0, 2, &[2, 1, 1], 0), (0, 3, &[2, 1, 1], 0), (0, 3, &[2, 2, 1], 0), (0, 2, &[2, 2, 2], 0)];
    timed(2, "non-integral epsilon gives the zero series", "exact", 10.0, || {
        let mut ok = true;
        let mut notes = Vec::new();
        for (g, n, p, k) in SPECS {
            let spec = CorrelatorSpec::new(g, n, p, deg(k, 5));
            let (e, int) = nmsp_core::correlator::epsilon(&spec);
            match assemble(&spec, &Oracles::default()) {
                Ok(s) => {
                    let zero = s.coefficients.iter().all(|c| c.known.is_zero() && c.unknowns.is_empty());
                    ok &= !int && zero;
                    notes.push(format!("N={} {:?} eps={} d<={}: {}", n, p, e, spec.effective_dmax(), if zero { "0" } else { "nonzero" }));
                }
                Err(err) => {
                    ok = false;
                    notes.push(format!("N={} {:?}: {}", n, p, err));
                }
            }
        }
        (ok, notes.join("; "))
    })
}

pub fn monomial_homogeneity() -> Outcome {
    timed(3, "q^0 of (H^2,H^2,H) at N=2 is a monomial", "exact", 30.0, || {
        let mut spec = CorrelatorSpec::new(0, 2, &[2, 2, 1], deg(0, 1));
        spec.dmax = Some(0);
        match assemble(&spec, &Oracles::default()) {
            Ok(s) => {
                let v = check_polynomiality(&s, &spec);
                let d0 = &v.degrees[0];
                let ok = d0.status == DegreeStatus::Monomial && !s.coefficients[0].known.is_zero();
                (ok, format!("q^0 = {}, predicted exponent {:?}", s.coefficients[0].known, d0.exponent))
            }
            Err(e) => (false, e.to_string()),
        }
    })
}

fn rho_specs(gmax: u32, nmax: &[usize], d0max: i64, dinf_fifths: &[i64], irregular: bool, mv: usize) -> Vec<EnumSpec> {
    let mut out = Vec::new();
    for g in 0..=gmax {
        for n in 1..=nmax[g as usize] {
            for nh in 1..=2u32 {
                for d0 in 0..=d0max {
                    for &k in dinf_fifths {
                        let mut s = EnumSpec::rho(g, n, deg(d0, 1), deg(k, 5), nh);
                        s.include_irregular = irregular;
                        if irregular {
                            s.max_vertices = mv;
                        }
                        if s.check().is_ok() {
                            out.push(s);
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn separation(scale: Scale) -> Outcome {
    let (nmax, fifths): (&[usize], &[i64]) = match scale {
        Scale::Full => (&[3, 2], &[0, 1, 2]),
        Scale::Quick => (&[2, 1], &[0, 1]),
    };
    timed(4, "separation-of-nodes identity", "exact", 300.0, move || {
        let cfg = LocConfig::default();
        let oracles = Oracles::default();
        let (mut checked, mut failed, mut errors) = (0, 0, 0);
        let mut first = String::new();
        for spec in rho_specs(1, nmax, 2, fifths, false, 6) {
            let Ok(gs) = enumerate(&spec) else { continue };
            let ins: Vec<Insertion> = (0..spec.legs.len()).map(|_| Insertion::h_pow(1)).collect();
            for eg in &gs {
                for e in 0..eg.graph.edges.len() {
                    if !is_separating(&eg.graph, e) {
                        continue;
                    }
                    checked += 1;
                    match separation_check(&eg.graph, e, &ins, &oracles, &cfg) {
                        Ok(r) if r.holds => {}
                        Ok(_) => {
                            failed += 1;
                            if first.is_empty() {
                                first = format!(", first failure {} edge {}", eg.canonical, e);
                            }
                        }
                        Err(err) => {
                            errors += 1;
                            if first.is_empty() {
                                first = format!(", first error {} edge {}: {}", eg.canonical, e, err);
                            }
                        }
                    }
                }
            }
        }
        let ok = checked > 0 && failed == 0 && errors == 0;
        (ok, format!("{} separating nodes, {} failures, {} errors{}", checked, failed, errors, first))
    })
}

pub fn substitution() -> Outcome {
    timed(5, "substitution identities for N <= 6", "exact", 1.0, || {
        let mut ok = true;
        let mut bad = Vec::new();
        for n in 1..=6usize {
            // prod_beta (x - t_beta) with x = h, kept to order N
            let ctx = VarCtx::with_h(n, n as u32 + 1);
            let h = LocExpr::h(&ctx);
            let mut p = LocExpr::one(&ctx);
            for b in 1..=n {
                p = p.mul(&h.sub(&LocExpr::t(&ctx, b)));
            }
            let sp = p.specialize_all().expect("polynomial");
            let field = sp.known.values().next().map(|u| u.field().clone()).expect("nonzero");
            let mut want: HashMap<Vec<u32>, UniSeries> = HashMap::new();
            want.insert(vec![n as u32], UniSeries::one(&field));
            // -(-t)^N
            let c = if n % 2 == 0 { -Q::one() } else { Q::one() };
            want.insert(vec![0], UniSeries::monomial(&field, n as i64, nmsp_core::algebra::CycloRational::from_q(&field, c)));
            let same = sp.known.len() == want.len() && sp.known.iter().all(|(m, u)| want.get(m) == Some(u));
            if !same {
                ok = false;
                bad.push(format!("prod at N={}", n));
            }
            let tctx = VarCtx::t_only(n);
            for a in 1..=n {
                let ta = LocExpr::t(&tctx, a);
                let mut lhs = ta.pow(6).scale(&Q::from_integer(BigInt::from(-5)));
                for b in 1..=n {
                    if b != a {
                        lhs = lhs.mul(&LocExpr::t(&tctx, b).sub(&ta));
                    }
                }
                let l = lhs.specialize().expect("polynomial");
                let r = ta
                    .pow(5)
                    .scale(&Q::from_integer(BigInt::from(5 * n as i64)))
                    .specialize()
                    .expect("polynomial")
                    .mul(&UniSeries::monomial(&l.field().clone(), n as i64, nmsp_core::algebra::CycloRational::one(l.field())));
                if l != r {
                    ok = false;
                    bad.push(format!("flag term at N={} alpha={}", n, a));
                }
            }
        }
        (ok, if bad.is_empty() { "all N <= 6, all alpha".to_string() } else { bad.join(", ") })
    })
}

pub fn irregular_dimension(scale: Scale) -> Outcome {
    let mv = match scale {
        Scale::Full => 5,
        Scale::Quick => 3,
    };
    timed(6, "expected_dim < 0 on irregular string-free graphs", "exact integer comparison", 120.0, move || {
        let cfg = LocConfig::default();
        let (mut total, mut nonneg, mut errors) = (0, 0, 0);
        let mut first = String::new();
        for spec in rho_specs(1, &[2, 2], 2, &[0, 1, 2], true, mv) {
            let Ok(gs) = enumerate(&spec) else { continue };
            for eg in gs.iter().filter(|x| matches!(x.regularity, Regularity::Irregular(_))) {
                if !eg.graph.strings().is_empty() || eg.graph.is_pure_loop() {
                    continue;
                }
                total += 1;
                match expected_dim(&eg.graph, &cfg) {
                    Ok((_, d)) if d < Deg::zero() => {}
                    Ok((_, d)) => {
                        nonneg += 1;
                        if first.is_empty() {
                            first = format!(", e.g. expdim {} for {}", d, eg.canonical);
                        }
                    }
                    Err(_) => errors += 1,
                }
            }
        }
        let ok = nonneg == 0 && errors == 0;
        (ok, format!("{} graphs (max {} vertices), {} with expdim >= 0, {} errors{}", total, mv, nonneg, errors, first))
    })
}

pub fn enumeration_oracle(scale: Scale) -> Outcome {
    // (n per genus, d_0 max, d_inf fifths, irregular vertex cap)
    let (nmax, d0max, fifths, irr_cap): (&[usize], i64, &[i64], usize) = match scale {
        Scale::Full => (&[3, 3], 2, &[0, 1, 2], 5),
        Scale::Quick => (&[2, 1], 1, &[0, 2], 3),
    };
    timed(7, "enumerate equals brute force", "exact set equality", 600.0, move || {
        let mut specs = rho_specs(1, nmax, d0max, fifths, false, 6);
        specs.extend(rho_specs(1, nmax, d0max, fifths, true, irr_cap));
        let (mut n, mut graphs) = (0, 0);
        let mut bad = Vec::new();
        for spec in &specs {
            let Ok(a) = enumerate(spec) else { continue };
            let bound = spec.vertex_bound().min(6);
            let b = match brute_force_oracle(spec, bound) {
                Ok(b) => b,
                Err(e) => {
                    bad.push(e.to_string());
                    continue;
                }
            };
            let ka: Vec<&String> = a.iter().filter(|x| x.graph.vertices.len() <= bound).map(|x| &x.canonical).collect();
            let kb: Vec<&String> = b.iter().map(|x| &x.canonical).collect();
            n += 1;
            graphs += kb.len();
            if ka != kb {
                bad.push(format!("g={} n={} N={} d=({},{})", spec.g, spec.legs.len(), spec.n_hours, spec.d0, spec.dinf));
            }
        }
        (bad.is_empty(), format!("{} specs, {} graphs{}", n, graphs, if bad.is_empty() { String::new() } else { format!(", mismatches: {}", bad.join("; ")) }))
    })
}

pub fn flattening(scale: Scale) -> Outcome {
    let bound = match scale {
        Scale::Full => 5,
        Scale::Quick => 3,
    };
    timed(8, "flatten is idempotent and removes balanced nodes", "exact", 120.0, move || {
        let (mut total, mut nonflat, mut bad) = (0, 0, 0);
        // balanced nodes need an integral d_inf
        for spec in rho_specs(1, &[2, 1], 2, &[0, 2, 5, 10], false, bound) {
            let Ok(raw) = brute_force_raw(&spec, bound) else { continue };
            for g in raw {
                total += 1;
                if !g.is_flat() {
                    nonflat += 1;
                }
                let f = g.flatten();
                let ff = f.flatten();
                let ok = f.balanced_nodes().is_empty()
                    && f.validate().is_empty()
                    && canonical(&ff).key == canonical(&f).key;
                if !ok {
                    bad += 1;
                }
            }
        }
        // a corpus without balanced nodes would make the check vacuous
        (bad == 0 && nonflat > 0, format!("{} raw graphs ({} vertices max), {} non-flat, {} violations", total, bound, nonflat, bad))
    })
}

pub fn intersection_oracle() -> Outcome {
    timed(9, "intersection oracle against DVV and string/dilaton", "exact", 1.0, || {
        let mut keys = Vec::new();
        for g in 0..=1u32 {
            for n in 1..=6usize {
                for lambda in 0..=g {
                    let dim = 3 * g as i64 - 3 + n as i64 - lambda as i64;
                    if dim >= 0 {
                        keys.extend(compositions(n, dim as u32).into_iter().map(|p| IntersectionKey::new(g, p, lambda)));
                    }
                }
            }
        }
        let val = |g: u32, p: Vec<u32>, l: u32| psi_lambda_integral(&IntersectionKey::new(g, p, l)).unwrap_or_else(|_| -Q::one());
        let mut memo = HashMap::new();
        let mut bad = Vec::new();
        for k in &keys {
            let v = val(k.g, k.psi.clone(), k.lambda);
            if v != reference(k.g, &k.psi, k.lambda, &mut memo) {
                bad.push(format!("ref {}", k.key_string()));
            }
            let n = k.psi.len();
            if n < 2 || (k.g == 0 && n < 4) {
                continue;
            }
            let (last, rest) = (k.psi[n - 1], &k.psi[..n - 1]);
            let rhs = match last {
                0 => (0..rest.len())
                    .filter(|j| rest[*j] > 0)
                    .map(|j| {
                        let mut r = rest.to_vec();
                        r[j] -= 1;
                        val(k.g, r, k.lambda)
                    })
                    .fold(Q::zero(), |a, b| a + b),
                1 => Q::from_integer(BigInt::from(2 * k.g as i64 + n as i64 - 3)) * val(k.g, rest.to_vec(), k.lambda),
                _ => continue,
            };
            if v != rhs {
                bad.push(format!("string/dilaton {}", k.key_string()));
            }
        }
        let q24 = Q::new(BigInt::one(), BigInt::from(24));
        let base = val(0, vec![0, 0, 0], 0) == Q::one() && val(1, vec![1], 0) == q24 && val(1, vec![0], 1) == q24;
        if !base {
            bad.push("base values".into());
        }
        (bad.is_empty(), format!("{} keys{}", keys.len(), if bad.is_empty() { String::new() } else { format!(", bad: {}", bad.join("; ")) }))
    })
}

/// The criterion-1 report, serialized, under a pool of `threads` workers.
pub fn hhh_report(threads: usize) -> Result<String, String> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| e.to_string())?;
    pool.install(|| {
        let mut out = String::new();
        for n in 1..=2 {
            let spec = hhh_spec(n);
            let s = assemble(&spec, &Oracles::default()).map_err(|e| e.to_string())?;
            let v = check_polynomiality(&s, &spec);
            out.push_str(&serde_json::to_string(&report_json(&s, &v)).map_err(|e| e.to_string())?);
            out.push('\n');
        }
        Ok(out)
    })
}

pub fn determinism() -> Outcome {
    timed(10, "byte-identical reports on 1, 4, 8 workers", "byte equality", 30.0, || {
        let runs: Vec<Result<String, String>> = [1, 4, 8].iter().map(|t| hhh_report(*t)).collect();
        match &runs[0] {
            Ok(first) => {
                let same = runs.iter().all(|r| r.as_ref() == Ok(first));
                (same, format!("{} bytes", first.len()))
            }
            Err(e) => (false, e.clone()),
        }
    })
}

pub fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(n - 1, total - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn dfact(n: i64) -> Q {
    let mut r = BigInt::one();
    let mut k = n;
    while k > 1 {
        r *= k;
        k -= 2;
    }
    Q::from_integer(r)
}

fn fact(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

type Memo = HashMap<(i64, Vec<i64>), Q>;

/// <tau_{d_1} ... tau_{d_n}>_g by the DVV recursion, independent of the
/// string/dilaton code in the oracle module.
pub fn dvv(g: i64, d: &[i64], memo: &mut Memo) -> Q {
    let mut key = d.to_vec();
    key.sort();
    if let Some(v) = memo.get(&(g, key.clone())) {
        return v.clone();
    }
    let v = dvv_raw(g, &key, memo);
    memo.insert((g, key), v.clone());
    v
}

fn dvv_raw(g: i64, d: &[i64], memo: &mut Memo) -> Q {
    if g < 0 || d.iter().any(|x| *x < 0) {
        return Q::zero();
    }
    let n = d.len() as i64;
    if d.iter().sum::<i64>() != 3 * g - 3 + n {
        return Q::zero();
    }
    if g == 0 && n == 3 {
        return Q::one();
    }
    if g == 1 && n == 1 {
        return Q::new(BigInt::one(), BigInt::from(24));
    }
    let Some(i) = d.iter().position(|x| *x >= 1) else { return Q::zero() };
    let k = d[i] - 1;
    let s: Vec<i64> = d.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, x)| *x).collect();
    let mut acc = Q::zero();
    for j in 0..s.len() {
        let mut r = s.clone();
        let dj = r.remove(j);
        r.push(k + dj);
        acc += dfact(2 * k + 2 * dj + 1) / dfact(2 * dj - 1) * dvv(g, &r, memo);
    }
    let half = Q::new(BigInt::one(), BigInt::from(2));
    for a in 0..k {
        let b = k - 1 - a;
        let w = dfact(2 * a + 1) * dfact(2 * b + 1) * half.clone();
        let mut r = s.clone();
        r.extend([a, b]);
        acc += w.clone() * dvv(g - 1, &r, memo);
        for mask in 0..(1u32 << s.len()) {
            let mut left = vec![a];
            let mut right = vec![b];
            for (j, x) in s.iter().enumerate() {
                if mask & (1 << j) != 0 {
                    left.push(*x);
                } else {
                    right.push(*x);
                }
            }
            for g1 in 0..=g {
                acc += w.clone() * dvv(g1, &left, memo) * dvv(g - g1, &right, memo);
            }
        }
    }
    acc / dfact(2 * k + 3)
}

/// int lambda_1 prod psi^a over Mbar_{1,n} = (n-1)! / (24 prod a_i!).
pub fn lambda1_genus_one(a: &[u32]) -> Q {
    let n = a.len() as u32;
    if n == 0 || a.iter().sum::<u32>() != n - 1 {
        return Q::zero();
    }
    let den = a.iter().fold(BigInt::one(), |x, k| x * fact(*k));
    Q::new(fact(n - 1), den * BigInt::from(24))
}

pub fn reference(g: u32, psi: &[u32], lambda: u32, memo: &mut Memo) -> Q {
    match (g, lambda) {
        (_, 0) => dvv(g as i64, &psi.iter().map(|x| *x as i64).collect::<Vec<_>>(), memo),
        (1, 1) => lambda1_genus_one(psi),
        _ => Q::zero(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dvv_known_values() {
        let mut m = Memo::new();
        assert_eq!(dvv(2, &[4], &mut m), Q::new(BigInt::one(), BigInt::from(1152)));
        assert_eq!(dvv(1, &[1, 1], &mut m), Q::new(BigInt::one(), BigInt::from(24)));
        assert_eq!(dvv(0, &[1, 0, 0, 0], &mut m), Q::one());
    }

    #[test]
    fn quick_scale_small_criteria() {
        for o in [substitution(), intersection_oracle()] {
            assert!(o.exact_ok, "{}", o.line());
        }
    }
}
