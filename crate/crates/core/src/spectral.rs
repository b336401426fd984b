//! Exact tensor eigenbasis of a NEPS.
//!
//! Each factor path has a small eigensystem with entries in `Z[√2]`. The
//! NEPS eigenvectors are Kronecker products of factor eigenvectors, one per
//! coordinate, selected by an [`EigenIndex`]; the eigenvalue of index `j` is
//!
//! ```text
//! Λ_j = Σ_{β∈Ω} Π_{i: βᵢ=1} λ_{i, jᵢ}
//! ```
//!
//! Eigenvectors stay unnormalized with integer squared norms. Floating point
//! only appears when evaluating `H(t) = exp(−itA)`.

use std::collections::BTreeMap;

use nepswalk_oracle::ComplexMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{Quad, QuadRat, Rational};
use crate::neps::{Factor, NepsSpec, Vertex};

/// One eigenpair of a factor path.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FactorEigenpair {
    pub eigenvalue: Quad,
    /// Entry per factor vertex.
    pub vector: &'static [Quad],
    pub norm_sq: i128,
}

const P2_PAIRS: [FactorEigenpair; 2] = [
    FactorEigenpair {
        eigenvalue: Quad::integer(-1),
        vector: &[Quad::integer(1), Quad::integer(-1)],
        norm_sq: 2,
    },
    FactorEigenpair {
        eigenvalue: Quad::integer(1),
        vector: &[Quad::integer(1), Quad::integer(1)],
        norm_sq: 2,
    },
];

const P3_PAIRS: [FactorEigenpair; 3] = [
    FactorEigenpair {
        eigenvalue: Quad::new(0, -1),
        vector: &[Quad::integer(1), Quad::new(0, -1), Quad::integer(1)],
        norm_sq: 4,
    },
    FactorEigenpair {
        eigenvalue: Quad::ZERO,
        vector: &[Quad::integer(1), Quad::ZERO, Quad::integer(-1)],
        norm_sq: 2,
    },
    FactorEigenpair {
        eigenvalue: Quad::new(0, 1),
        vector: &[Quad::integer(1), Quad::new(0, 1), Quad::integer(1)],
        norm_sq: 4,
    },
];

/// Eigenpairs ordered by eigenvalue; selector `s` of an [`EigenIndex`] picks
/// entry `s`. For `P3` the selectors 0, 1, 2 are the vectors
/// `(1,−√2,1)`, `(1,0,−1)`, `(1,√2,1)`.
pub fn factor_eigensystem(factor: Factor) -> &'static [FactorEigenpair] {
    match factor {
        Factor::P2 => &P2_PAIRS,
        Factor::P3 => &P3_PAIRS,
    }
}

/// Selects one factor eigenvector per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct EigenIndex(pub Vec<u8>);

impl EigenIndex {
    /// The same selector on every coordinate.
    pub fn uniform(n: usize, selector: u8) -> Self {
        EigenIndex(vec![selector; n])
    }

    fn check(&self, spec: &NepsSpec) -> Result<()> {
        if self.0.len() != spec.dim() {
            return Err(Error::InvalidArgument(format!(
                "eigen index has {} selectors, the graph has {} factors",
                self.0.len(),
                spec.dim()
            )));
        }
        for (i, (&s, f)) in self.0.iter().zip(spec.factors()).enumerate() {
            if usize::from(s) >= f.order() {
                return Err(Error::InvalidArgument(format!(
                    "selector {i} is {s} but factor {f} has {} eigenvectors",
                    f.order()
                )));
            }
        }
        Ok(())
    }
}

fn index_eigenvalue(spec: &NepsSpec, selectors: &[u8]) -> Result<Quad> {
    let lambdas: Vec<Quad> = spec
        .factors()
        .iter()
        .zip(selectors)
        .map(|(&f, &s)| factor_eigensystem(f)[usize::from(s)].eigenvalue)
        .collect();
    let mut total = Quad::ZERO;
    for beta in spec.omega() {
        let mut term = Quad::ONE;
        for (i, lambda) in lambdas.iter().enumerate() {
            if beta.get(i) {
                term = term.checked_mul(*lambda)?;
            }
        }
        total = total.checked_add(term)?;
    }
    Ok(total)
}

fn index_amplitude(spec: &NepsSpec, selectors: &[u8], u: &[u8]) -> Result<Quad> {
    let mut amp = Quad::ONE;
    for ((&f, &s), &x) in spec.factors().iter().zip(selectors).zip(u) {
        amp = amp.checked_mul(factor_eigensystem(f)[usize::from(s)].vector[usize::from(x)])?;
    }
    Ok(amp)
}

fn index_norm(spec: &NepsSpec, selectors: &[u8]) -> i128 {
    spec.factors()
        .iter()
        .zip(selectors)
        .map(|(&f, &s)| factor_eigensystem(f)[usize::from(s)].norm_sq)
        .product()
}

/// Exact eigenvalue `Λ_j`.
pub fn eigenvalue_of(spec: &NepsSpec, j: &EigenIndex) -> Result<Quad> {
    j.check(spec)?;
    index_eigenvalue(spec, &j.0)
}

/// Entry of the unnormalized eigenvector `x_j` at vertex `u`.
pub fn amplitude(spec: &NepsSpec, j: &EigenIndex, u: &Vertex) -> Result<Quad> {
    j.check(spec)?;
    spec.vertex_index(u)?;
    index_amplitude(spec, &j.0, u.coords())
}

/// `‖x_j‖²`.
pub fn norm_sq(spec: &NepsSpec, j: &EigenIndex) -> Result<i128> {
    j.check(spec)?;
    Ok(index_norm(spec, &j.0))
}

/// Eigenvalues in the support of a vertex, sorted exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportSet {
    pub vertex: Vertex,
    pub eigenvalues: Vec<Quad>,
}

impl SupportSet {
    pub fn contains(&self, lambda: &Quad) -> bool {
        self.eigenvalues.binary_search(lambda).is_ok()
    }
}

/// Precomputed eigenvalues, float eigenvalues and norms for every index.
///
/// Index positions use the same mixed-radix layout as vertices, so the
/// selector tuple of position `p` is `spec.vertex(p)` read as selectors.
#[derive(Clone, Debug)]
pub struct TensorEigenbasis {
    spec: NepsSpec,
    eigenvalues: Vec<Quad>,
    floats: Vec<f64>,
    inv_norms: Vec<f64>,
}

impl TensorEigenbasis {
    pub fn new(spec: &NepsSpec) -> Result<Self> {
        let count = spec.vertex_count();
        let mut eigenvalues = Vec::with_capacity(count);
        let mut inv_norms = Vec::with_capacity(count);
        for p in 0..count {
            let sel = spec.vertex(p).0;
            eigenvalues.push(index_eigenvalue(spec, &sel)?);
            inv_norms.push(1.0 / index_norm(spec, &sel) as f64);
        }
        let floats = eigenvalues.iter().map(|q| q.to_f64()).collect();
        Ok(TensorEigenbasis {
            spec: spec.clone(),
            eigenvalues,
            floats,
            inv_norms,
        })
    }

    pub fn spec(&self) -> &NepsSpec {
        &self.spec
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn index(&self, position: usize) -> EigenIndex {
        EigenIndex(self.spec.vertex(position).0)
    }

    pub fn eigenvalues(&self) -> &[Quad] {
        &self.eigenvalues
    }

    pub fn float_eigenvalues(&self) -> &[f64] {
        &self.floats
    }

    pub fn distinct_spectrum(&self) -> Vec<(Quad, usize)> {
        let mut groups: BTreeMap<Quad, usize> = BTreeMap::new();
        for &lambda in &self.eigenvalues {
            *groups.entry(lambda).or_default() += 1;
        }
        groups.into_iter().collect()
    }

    /// Support of a vertex given by index position.
    pub fn support_at(&self, u: usize) -> Result<SupportSet> {
        let vertex = self.spec.vertex(u);
        let mut found: Vec<Quad> = Vec::new();
        for p in 0..self.len() {
            let sel = self.spec.vertex(p).0;
            if !index_amplitude(&self.spec, &sel, vertex.coords())?.is_zero() {
                found.push(self.eigenvalues[p]);
            }
        }
        found.sort();
        found.dedup();
        Ok(SupportSet {
            vertex,
            eigenvalues: found,
        })
    }

    /// Per-coordinate float eigenvector matrices `X_i[vertex][selector]`.
    fn factor_matrices(&self) -> Vec<Vec<Vec<f64>>> {
        self.spec
            .factors()
            .iter()
            .map(|&f| {
                let pairs = factor_eigensystem(f);
                (0..f.order())
                    .map(|x| pairs.iter().map(|p| p.vector[x].to_f64()).collect())
                    .collect()
            })
            .collect()
    }

    fn float_amplitude(&self, mats: &[Vec<Vec<f64>>], position: usize, u: &[u8]) -> f64 {
        let sel = self.spec.vertex(position).0;
        sel.iter()
            .zip(u)
            .zip(mats)
            .map(|((&s, &x), m)| m[usize::from(x)][usize::from(s)])
            .product()
    }

    /// `⟨e_u, H(t) e_v⟩` by summing over every eigen index.
    pub fn transfer_amplitude(&self, u: usize, v: usize, t: f64) -> Complex64 {
        let mats = self.factor_matrices();
        let (uc, vc) = (self.spec.vertex(u).0, self.spec.vertex(v).0);
        let mut acc = Complex64::new(0.0, 0.0);
        for p in 0..self.len() {
            let w = self.float_amplitude(&mats, p, &uc)
                * self.float_amplitude(&mats, p, &vc)
                * self.inv_norms[p];
            if w != 0.0 {
                acc += Complex64::from_polar(w, -t * self.floats[p]);
            }
        }
        acc
    }

    /// Row `u` of `H(t)`, computed by one small matrix product per coordinate.
    pub fn transfer_row(&self, u: usize, t: f64) -> Vec<Complex64> {
        let mats = self.factor_matrices();
        let uc = self.spec.vertex(u).0;
        let mut data: Vec<Complex64> = (0..self.len())
            .map(|p| {
                let w = self.float_amplitude(&mats, p, &uc) * self.inv_norms[p];
                Complex64::from_polar(w, -t * self.floats[p])
            })
            .collect();
        let orders: Vec<usize> = self.spec.factors().iter().map(|f| f.order()).collect();
        let mut scratch = Vec::new();
        for (axis, mat) in mats.iter().enumerate() {
            let order = orders[axis];
            let stride: usize = orders[axis + 1..].iter().product();
            let block = stride * order;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    scratch.clear();
                    scratch.extend((0..order).map(|s| data[start + s * stride + offset]));
                    for (x, row) in mat.iter().enumerate() {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for (s, &m) in row.iter().enumerate() {
                            acc += scratch[s] * m;
                        }
                        data[start + x * stride + offset] = acc;
                    }
                }
            }
        }
        data
    }

    /// The full transition matrix `H(t)`.
    pub fn transition_matrix(&self, t: f64) -> ComplexMatrix {
        let n = self.len();
        let mut data = Vec::with_capacity(n * n);
        for u in 0..n {
            data.extend(self.transfer_row(u, t));
        }
        ComplexMatrix::from_row_major(n, data).expect("square by construction")
    }

    /// `H(t)_{uv}` collapsed onto distinct eigenvalues with exact weights.
    pub fn kernel(&self, u: usize, v: usize) -> Result<TransferKernel> {
        let (uc, vc) = (self.spec.vertex(u).0, self.spec.vertex(v).0);
        let mut groups: BTreeMap<Quad, QuadRat> = BTreeMap::new();
        for p in 0..self.len() {
            let sel = self.spec.vertex(p).0;
            let prod = index_amplitude(&self.spec, &sel, &uc)?
                .checked_mul(index_amplitude(&self.spec, &sel, &vc)?)?;
            if prod.is_zero() {
                continue;
            }
            let norm = Rational::from_integer(index_norm(&self.spec, &sel));
            let weight = QuadRat::new(
                Rational::from_integer(prod.a()) / norm,
                Rational::from_integer(prod.b()) / norm,
            );
            let slot = groups
                .entry(self.eigenvalues[p])
                .or_insert_with(QuadRat::zero);
            *slot = slot.checked_add(&weight)?;
        }
        let terms: Vec<(Quad, QuadRat)> =
            groups.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        let floats = terms
            .iter()
            .map(|(l, w)| (l.to_f64(), w.to_f64()))
            .collect();
        Ok(TransferKernel { terms, floats })
    }
}

/// `H(t)_{uv} = Σ_Λ w_Λ exp(−itΛ)` for one fixed vertex pair.
///
/// The weights `w_Λ = e_uᵀ E_Λ e_v` are exact; only the evaluation is in
/// floating point.
#[derive(Clone, Debug)]
pub struct TransferKernel {
    terms: Vec<(Quad, QuadRat)>,
    floats: Vec<(f64, f64)>,
}

impl TransferKernel {
    pub fn terms(&self) -> &[(Quad, QuadRat)] {
        &self.terms
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.floats
            .iter()
            .map(|&(lambda, w)| Complex64::from_polar(w, -t * lambda))
            .sum()
    }

    pub fn fidelity(&self, t: f64) -> f64 {
        self.eval(t).norm()
    }
}

/// Distinct eigenvalues with multiplicities, exactly grouped and sorted.
pub fn distinct_spectrum(spec: &NepsSpec) -> Result<Vec<(Quad, usize)>> {
    Ok(TensorEigenbasis::new(spec)?.distinct_spectrum())
}

/// Eigenvalue support of `e_u`.
pub fn support(spec: &NepsSpec, u: &Vertex) -> Result<SupportSet> {
    let index = spec.vertex_index(u)?;
    TensorEigenbasis::new(spec)?.support_at(index)
}

/// `⟨e_u, exp(−itA) e_v⟩`.
pub fn transfer_amplitude(spec: &NepsSpec, u: &Vertex, v: &Vertex, t: f64) -> Result<Complex64> {
    let (ui, vi) = (spec.vertex_index(u)?, spec.vertex_index(v)?);
    Ok(TensorEigenbasis::new(spec)?.transfer_amplitude(ui, vi, t))
}
