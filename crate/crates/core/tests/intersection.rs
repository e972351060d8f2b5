use num_rational::BigRational as Q;
use nmsp_core::oracles::{psi_lambda_integral, IntersectionKey};
use num_traits::{One, Zero};

fn compositions(n: usize, total: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    (0..=total)
        .flat_map(|f| compositions(n - 1, total - f).into_iter().map(move |mut r| {
            r.insert(0, f);
            r
        }))
        .collect()
}

fn keys() -> Vec<IntersectionKey> {
    let mut out = Vec::new();
    for g in 0..=1u32 {
        for n in 1..=6usize {
            for lambda in 0..=g {
                let dim = 3 * g as i64 - 3 + n as i64 - lambda as i64;
                if dim < 0 {
                    continue;
                }
                for psi in compositions(n, dim as u32) {
                    out.push(IntersectionKey::new(g, psi, lambda));
                }
            }
        }
    }
    out
}

fn val(g: u32, psi: Vec<u32>, lambda: u32) -> Q {
    psi_lambda_integral(&IntersectionKey::new(g, psi, lambda)).unwrap()
}

#[test]
fn string_and_dilaton() {
    for k in keys() {
        let n = k.psi.len();
        if n < 2 || (k.g == 0 && n < 4) {
            continue;
        }
        let v = psi_lambda_integral(&k).unwrap();
        let last = k.psi[n - 1];
        let rest = &k.psi[..n - 1];
        if last == 0 {
            let mut s = Q::zero();
            for j in 0..rest.len() {
                if rest[j] > 0 {
                    let mut r = rest.to_vec();
                    r[j] -= 1;
                    s += val(k.g, r, k.lambda);
                }
            }
            assert_eq!(v, s, "string {}", k.key_string());
        } else if last == 1 {
            let f = Q::from_integer((2 * k.g as i64 - 2 + n as i64 - 1).into());
            assert_eq!(v, f * val(k.g, rest.to_vec(), k.lambda), "dilaton {}", k.key_string());
        }
    }
}

#[test]
fn base_values() {
    let q24 = Q::new(1.into(), 24.into());
    assert_eq!(val(0, vec![0, 0, 0], 0), Q::one());
    assert_eq!(val(1, vec![1], 0), q24);
    assert_eq!(val(1, vec![0], 1), q24);
}
