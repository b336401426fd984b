use super::kronecker::kronecker_solve;
use super::{
    check_periodicity, check_pst_sufficient, classify::classify_parts, Derivation, Evidence,
    TransferOptions, TransferReport, TransferWitness, WitnessKind,
};
use crate::error::{Error, Result};
use crate::exactnum::QuadRat;
use crate::neps::{BasisSet, BasisVector, BitTuple, Factor, NepsSpec, Vertex};
use crate::spectral::TensorEigenbasis;

/// A NEPS that is the Cartesian product of two NEPS on disjoint coordinate
/// blocks; `left_coords[i]` is where coordinate `i` of `left` sits.
#[derive(Clone, Debug)]
pub struct ProductSplit {
    pub left: NepsSpec,
    pub left_coords: Vec<usize>,
    pub right: NepsSpec,
    pub right_coords: Vec<usize>,
}

impl ProductSplit {
    /// Interprets `spec` as `left □ right` with `left` on the leading coordinates.
    pub fn leading(left: &NepsSpec, right: &NepsSpec) -> Result<(NepsSpec, ProductSplit)> {
        let product = left.cartesian_product(right)?;
        let m = left.dim();
        let split = ProductSplit {
            left: left.clone(),
            left_coords: (0..m).collect(),
            right: right.clone(),
            right_coords: (m..m + right.dim()).collect(),
        };
        Ok((product, split))
    }

    fn place(&self, left: &[u8], right: &[u8]) -> Vertex {
        let mut coords = vec![0u8; self.left_coords.len() + self.right_coords.len()];
        for (&c, &x) in self.left_coords.iter().zip(left) {
            coords[c] = x;
        }
        for (&c, &x) in self.right_coords.iter().zip(right) {
            coords[c] = x;
        }
        Vertex(coords)
    }
}

/// Splits a mixed P2/P3 factor list into its P3 block and P2 block when every
/// basis vector lives inside one block.
pub fn split_factors(spec: &NepsSpec) -> Option<ProductSplit> {
    let blocks: [Vec<usize>; 2] = [Factor::P3, Factor::P2].map(|f| {
        (0..spec.dim())
            .filter(|&i| spec.factors()[i] == f)
            .collect()
    });
    if blocks.iter().any(Vec::is_empty) {
        return None;
    }
    let restrict = |coords: &[usize]| -> Option<NepsSpec> {
        let vectors: Vec<BasisVector> = spec
            .omega()
            .iter()
            .filter(|beta| coords.iter().any(|&c| beta.get(c)))
            .map(|beta| {
                let bits: Vec<u8> = coords.iter().map(|&c| u8::from(beta.get(c))).collect();
                BasisVector::new(BitTuple::from_slice(&bits).expect("short tuple"))
                    .expect("nonzero on its block")
            })
            .collect();
        let omega = BasisSet::new(coords.len(), vectors).ok()?;
        let factors = coords.iter().map(|&c| spec.factors()[c]).collect();
        NepsSpec::new(factors, omega).ok()
    };
    let straddles = spec.omega().iter().any(|beta| {
        blocks
            .iter()
            .all(|block| block.iter().any(|&c| beta.get(c)))
    });
    if straddles {
        return None;
    }
    let [p3, p2] = blocks;
    let (left, right) = (restrict(&p3)?, restrict(&p2)?);
    let (left, left_coords, right, right_coords) = if p3[0] < p2[0] {
        (left, p3, right, p2)
    } else {
        (right, p2, left, p3)
    };
    Some(ProductSplit {
        left,
        left_coords,
        right,
        right_coords,
    })
}

/// PGST on `A □ B` from periodicity of `A` at `τ` and PST in `B` at `η`.
///
/// Needs `τ/η` irrational. With `m` and `n` such that `|mτ − (2n+1)η|` is
/// small, `H_A(mτ)` is a phase times the identity while `H_B(mτ)` is close to
/// `H_B(η)`, so `(u, v) → (u, w)` transfers with high fidelity for any `u`.
/// The returned vertices use `A`'s coordinates first; `u` is vertex 0 of `A`.
pub fn check_pgst_product(
    a: &NepsSpec,
    b: &NepsSpec,
    opts: &TransferOptions,
) -> Result<Option<TransferWitness>> {
    opts.validate()?;
    let Evidence::Periodic { time: tau, .. } = check_periodicity(a, opts)?.evidence else {
        return Ok(None);
    };
    let Some((_, pst)) = check_pst_sufficient(b)? else {
        return Ok(None);
    };
    let eta = pst.time.clone();
    let ratio = tau
        .ratio(&eta)
        .ok_or_else(|| Error::Internal("period or PST time lacks an exact form".into()))??;
    if ratio.is_rational() {
        return Err(Error::InvalidArgument(format!(
            "period {tau} and PST time {eta} are rationally dependent (ratio {ratio})"
        )));
    }
    let theta = ratio.checked_mul(&QuadRat::rational(1, 2))?;
    let alpha = QuadRat::rational(1, 2);
    let u = a.vertex(0);
    let kernel_a = TensorEigenbasis::new(a)?.kernel(0, 0)?;
    let kernel_b = TensorEigenbasis::new(b)?
        .kernel(b.vertex_index(&pst.source)?, b.vertex_index(&pst.target)?)?;

    for halvings in 0..=opts.halvings {
        let time_tolerance = opts.epsilon / 4.0 / f64::from(1u32 << halvings);
        let delta = time_tolerance / (2.0 * eta.value());
        let sol = kronecker_solve(&theta, &alpha, delta, opts.max_multiplier)?;
        if sol.p.abs() > opts.max_q {
            return Err(Error::SearchBound(format!(
                "witness multiplier {} exceeds the bound {}; raise --max-q or relax --epsilon",
                sol.p, opts.max_q
            )));
        }
        let time = tau.scaled(sol.p.abs())?;
        let amplitude = kernel_a.eval(time.value()) * kernel_b.eval(time.value());
        if amplitude.norm() < 1.0 - opts.epsilon {
            continue;
        }
        return Ok(Some(TransferWitness {
            kind: WitnessKind::Pgst,
            source: u.concat(&pst.source),
            target: u.concat(&pst.target),
            time,
            fidelity: amplitude.norm(),
            phase: amplitude,
            epsilon: Some(opts.epsilon),
            derivation: Some(Derivation {
                method: format!("product/{}", sol.method.as_str()),
                theta,
                alpha,
                delta,
                p: sol.p,
                q: sol.q,
                residual: sol.residual_digits,
            }),
        }));
    }
    Err(Error::SearchBound(format!(
        "product fidelity stayed below 1 − {} after {} halvings",
        opts.epsilon, opts.halvings
    )))
}

/// Product witnesses in both orientations, placed back into `split`'s layout.
pub(crate) fn product_witnesses(
    split: &ProductSplit,
    opts: &TransferOptions,
    notes: &mut Vec<String>,
) -> Result<(Vec<TransferWitness>, Option<String>)> {
    let mut found = Vec::new();
    let mut exhausted = None;
    let (m, n) = (split.left.dim(), split.right.dim());
    for flip in [false, true] {
        let (periodic, transfer) = if flip {
            (&split.right, &split.left)
        } else {
            (&split.left, &split.right)
        };
        match check_pgst_product(periodic, transfer, opts) {
            Ok(Some(mut w)) => {
                let map = |v: &Vertex| {
                    let c = v.coords();
                    if flip {
                        split.place(&c[n..], &c[..n])
                    } else {
                        split.place(&c[..m], &c[m..])
                    }
                };
                w.source = map(&w.source);
                w.target = map(&w.target);
                found.push(w);
            }
            Ok(None) => notes.push(format!(
                "product route with {periodic} periodic and {transfer} transferring: \
                 hypotheses not met"
            )),
            Err(Error::InvalidArgument(msg)) => notes.push(format!("product route skipped: {msg}")),
            Err(Error::SearchBound(msg)) => exhausted = Some(msg),
            Err(e) => return Err(e),
        }
    }
    if !found.is_empty() {
        notes.push(
            "product PGST derives from periodicity of one factor, PST in the other and an \
             irrational ratio of the two times"
                .into(),
        );
    }
    Ok((found, exhausted))
}

/// Full report for `A □ B`, including PGST witnesses from both orientations.
pub fn analyze_product(
    a: &NepsSpec,
    b: &NepsSpec,
    opts: &TransferOptions,
) -> Result<TransferReport> {
    let (product, split) = ProductSplit::leading(a, b)?;
    classify_parts(&product, Some(&split), opts, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge_path() -> (NepsSpec, NepsSpec) {
        (NepsSpec::p2(&[[1]]).unwrap(), NepsSpec::p3(&[[1]]).unwrap())
    }

    #[test]
    fn split_recovers_blocks() {
        let spec = NepsSpec::from_rows(
            &[Factor::P3, Factor::P2, Factor::P3],
            &[[1, 0, 1], [0, 1, 0]],
        )
        .unwrap();
        let split = split_factors(&spec).unwrap();
        assert_eq!(split.left_coords, vec![0, 2]);
        assert_eq!(split.right_coords, vec![1]);
        assert_eq!(split.left, NepsSpec::p3(&[[1, 1]]).unwrap());
        let straddling = NepsSpec::from_rows(&[Factor::P3, Factor::P2], &[[1, 1]]).unwrap();
        assert!(split_factors(&straddling).is_none());
    }

    #[test]
    fn edge_periodic_path_transfers() {
        let (edge, path) = edge_path();
        let w = check_pgst_product(&edge, &path, &TransferOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.source, Vertex(vec![0, 0]));
        assert_eq!(w.target, Vertex(vec![0, 2]));
        assert!(w.fidelity >= 0.999);
    }

    #[test]
    fn path_periodic_edge_transfers() {
        let (edge, path) = edge_path();
        let w = check_pgst_product(&path, &edge, &TransferOptions::default())
            .unwrap()
            .unwrap();
        assert_eq!(w.source, Vertex(vec![0, 0]));
        assert_eq!(w.target, Vertex(vec![0, 1]));
    }

    #[test]
    fn dependent_times_rejected() {
        let path = NepsSpec::p3(&[[1]]).unwrap();
        let err = check_pgst_product(&path, &path, &TransferOptions::default());
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }
}
