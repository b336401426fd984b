#![allow(dead_code)]

use nepswalk::neps::{BasisSet, BasisVector, BitTuple, Factor, NepsSpec};

/// Every singleton and two-element basis set over `n ≤ 3` coordinates, for
/// every assignment of P2/P3 factors.
pub fn small_corpus() -> Vec<NepsSpec> {
    let mut out = Vec::new();
    for n in 1..=3usize {
        let vectors: Vec<BasisVector> = (1u16..(1 << n))
            .map(|bits| BasisVector::new(BitTuple::new(bits, n)).unwrap())
            .collect();
        let mut sets: Vec<Vec<BasisVector>> = vectors.iter().map(|&v| vec![v]).collect();
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                sets.push(vec![vectors[i], vectors[j]]);
            }
        }
        for mask in 0u32..(1 << n) {
            let factors: Vec<Factor> = (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Factor::P2
                    } else {
                        Factor::P3
                    }
                })
                .collect();
            for set in &sets {
                let omega = BasisSet::new(n, set.iter().copied()).unwrap();
                out.push(NepsSpec::new(factors.clone(), omega).unwrap());
            }
        }
    }
    out
}

/// The specs named in the documentation and acceptance checks.
pub fn named_specs() -> Vec<NepsSpec> {
    vec![
        NepsSpec::p3(&[[1]]).unwrap(),
        NepsSpec::p2(&[[1]]).unwrap(),
        NepsSpec::p3(&[[1, 0], [0, 1]]).unwrap(),
        NepsSpec::p3(&[[1, 1]]).unwrap(),
        NepsSpec::p3(&[[1, 0], [1, 1]]).unwrap(),
        NepsSpec::p3(&[[1, 0, 0], [0, 1, 1]]).unwrap(),
        NepsSpec::p3(&[[1, 1, 0], [1, 1, 1]]).unwrap(),
        NepsSpec::p3(&[[1, 1, 0], [0, 1, 1], [1, 0, 1]]).unwrap(),
        NepsSpec::p3(&[[1, 0, 0], [0, 1, 0], [1, 1, 1]]).unwrap(),
        NepsSpec::p3(&[[1, 1, 0, 0], [1, 1, 1, 1]]).unwrap(),
        NepsSpec::p3(&[[1, 0, 0, 0, 0], [0, 1, 1, 0, 0], [0, 0, 1, 1, 1]]).unwrap(),
        NepsSpec::p2(&[[1, 0], [0, 1]]).unwrap(),
        NepsSpec::from_rows(&[Factor::P2, Factor::P3], &[[1, 0], [0, 1]]).unwrap(),
        NepsSpec::from_rows(
            &[Factor::P3, Factor::P2, Factor::P2],
            &[[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        )
        .unwrap(),
    ]
}

/// `H_Ω` with `Ω` replaced by a single vector on the same factors.
pub fn singleton(spec: &NepsSpec, beta: &BasisVector) -> NepsSpec {
    spec.with_omega(BasisSet::new(spec.dim(), [*beta]).unwrap())
        .unwrap()
}

fn big(r: &nepswalk::exactnum::Rational) -> num_rational::BigRational {
    num_rational::BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

/// Exact sign of `x + y√2`.
fn sign(x: &num_rational::BigRational, y: &num_rational::BigRational) -> std::cmp::Ordering {
    use num_traits::Signed;
    use std::cmp::Ordering::*;
    let (sx, sy) = (x.signum(), y.signum());
    let zero = num_rational::BigRational::from_integer(0.into());
    let lhs = (x * x).cmp(&(y * y * num_rational::BigRational::from_integer(2.into())));
    match (sx.cmp(&zero), sy.cmp(&zero)) {
        (Equal, o) | (o, Equal) => o,
        (a, b) if a == b => a,
        (Greater, _) => lhs,
        _ => lhs.reverse(),
    }
}

/// Decides `|pθ − q − α| < δ` in exact rational arithmetic.
pub fn kronecker_holds(
    theta: &nepswalk::exactnum::QuadRat,
    alpha: &nepswalk::exactnum::QuadRat,
    delta: f64,
    p: i128,
    q: i128,
) -> bool {
    use num_rational::BigRational;
    let pb = BigRational::from_integer(p.into());
    let qb = BigRational::from_integer(q.into());
    let x = &pb * big(theta.a()) - qb - big(alpha.a());
    let y = pb * big(theta.b()) - big(alpha.b());
    let d = BigRational::from_float(delta).expect("finite δ");
    sign(&(&x - &d), &y) == std::cmp::Ordering::Less
        && sign(&(x + d), &y) == std::cmp::Ordering::Greater
}
