//! NEPS graphs of `P2` and `P3`: basis sets, vertices, connectivity and the
//! parity bookkeeping that drives the transfer theorems.
//!
//! Vertices are mixed-radix tuples. Coordinate `i` ranges over `{0, 1}` for a
//! `P2` factor and over `{0, 1, 2}` for a `P3` factor (the path `0 - 1 - 2`).
//! Coordinate 0 is the most significant digit of the vertex index, which
//! makes the index order agree with the Kronecker product `A₁ ⊗ ⋯ ⊗ Aₙ`.

use std::fmt;
use std::str::FromStr;

use nepswalk_oracle::DenseMatrix;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_FACTORS: usize = 16;
pub const DEFAULT_DENSE_LIMIT: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    P2,
    P3,
}

impl Factor {
    pub const fn order(self) -> usize {
        match self {
            Factor::P2 => 2,
            Factor::P3 => 3,
        }
    }

    /// Path adjacency between two vertex labels of this factor.
    pub fn adjacent(self, x: u8, y: u8) -> bool {
        x.abs_diff(y) == 1
    }
}

impl FromStr for Factor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "P2" => Ok(Factor::P2),
            "P3" => Ok(Factor::P3),
            other => Err(format!(
                "unknown factor {other:?} (expected \"P2\" or \"P3\")"
            )),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Factor::P2 => "P2",
            Factor::P3 => "P3",
        })
    }
}

/// A tuple in `Z₂ⁿ`, `n ≤ 16`. Bit `i` holds coordinate `i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BitTuple {
    bits: u16,
    len: u8,
}

impl BitTuple {
    pub fn new(bits: u16, len: usize) -> Self {
        assert!(len <= MAX_FACTORS, "tuple length {len} above {MAX_FACTORS}");
        let mask = if len == 16 {
            u16::MAX
        } else {
            (1u16 << len) - 1
        };
        assert_eq!(bits & !mask, 0, "bits set beyond tuple length");
        BitTuple {
            bits,
            len: len as u8,
        }
    }

    pub fn zero(len: usize) -> Self {
        BitTuple::new(0, len)
    }

    pub fn from_slice(entries: &[u8]) -> Option<Self> {
        if entries.len() > MAX_FACTORS || entries.iter().any(|&e| e > 1) {
            return None;
        }
        let bits = entries
            .iter()
            .enumerate()
            .fold(0u16, |acc, (i, &e)| acc | (u16::from(e) << i));
        Some(BitTuple::new(bits, entries.len()))
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bits(&self) -> u16 {
        self.bits
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len(), "coordinate {i} out of range");
        self.bits >> i & 1 == 1
    }

    pub fn weight(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn xor(&self, other: &BitTuple) -> BitTuple {
        assert_eq!(self.len, other.len, "length mismatch");
        BitTuple {
            bits: self.bits ^ other.bits,
            len: self.len,
        }
    }

    pub fn to_vec(&self) -> Vec<u8> {
        (0..self.len()).map(|i| u8::from(self.get(i))).collect()
    }
}

impl fmt::Display for BitTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.to_vec().iter().map(u8::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for BitTuple {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_vec().serialize(serializer)
    }
}

/// A nonzero element of `Z₂ⁿ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct BasisVector(BitTuple);

impl BasisVector {
    pub fn new(tuple: BitTuple) -> Option<Self> {
        (!tuple.is_zero()).then_some(BasisVector(tuple))
    }

    /// Builds from 0/1 entries; `None` for the zero tuple or non-binary entries.
    pub fn from_slice(entries: &[u8]) -> Option<Self> {
        BitTuple::from_slice(entries).and_then(BasisVector::new)
    }

    pub fn tuple(&self) -> BitTuple {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0.get(i)
    }
}

impl fmt::Display for BasisVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Hamming weight `s(β)`.
pub fn hamming_weight(beta: &BasisVector) -> u32 {
    beta.0.weight()
}

/// Nonempty, duplicate-free, order-preserving subset of `Z₂ⁿ \ {0}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct BasisSet {
    #[serde(skip)]
    n: usize,
    vectors: Vec<BasisVector>,
}

impl BasisSet {
    /// Duplicates are dropped, keeping the first occurrence.
    pub fn new(n: usize, vectors: impl IntoIterator<Item = BasisVector>) -> Result<Self> {
        if n == 0 || n > MAX_FACTORS {
            return Err(Error::spec(
                "omega",
                format!("tuple length must be between 1 and {MAX_FACTORS}, got {n}"),
            ));
        }
        let mut kept: Vec<BasisVector> = Vec::new();
        for (i, v) in vectors.into_iter().enumerate() {
            if v.len() != n {
                return Err(Error::spec(
                    format!("omega[{i}]"),
                    format!("length {} does not match dimension {n}", v.len()),
                ));
            }
            if !kept.contains(&v) {
                kept.push(v);
            }
        }
        if kept.is_empty() {
            return Err(Error::spec("omega", "basis set must be nonempty"));
        }
        Ok(BasisSet { n, vectors: kept })
    }

    /// Parses rows of 0/1 entries, naming the offending row on failure.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut vectors = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n {
                return Err(Error::spec(
                    format!("omega[{i}]"),
                    format!("length {} does not match dimension {n}", row.len()),
                ));
            }
            if let Some(j) = row.iter().position(|&e| e > 1) {
                return Err(Error::spec(
                    format!("omega[{i}][{j}]"),
                    "entries must be 0 or 1",
                ));
            }
            let v = BasisVector::from_slice(row).ok_or_else(|| {
                Error::spec(
                    format!("omega[{i}]"),
                    "the all-zero tuple is not allowed in a basis set (Ω ⊂ Z₂ⁿ \\ {0})",
                )
            })?;
            vectors.push(v);
        }
        BasisSet::new(n, vectors)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BasisVector> {
        self.vectors.iter()
    }

    pub fn vectors(&self) -> &[BasisVector] {
        &self.vectors
    }

    pub fn contains(&self, v: &BasisVector) -> bool {
        self.vectors.contains(v)
    }

    /// The members satisfying `keep`, or `None` when that leaves nothing.
    pub fn filtered(&self, keep: impl Fn(&BasisVector) -> bool) -> Option<BasisSet> {
        let vectors: Vec<BasisVector> = self.vectors.iter().copied().filter(keep).collect();
        (!vectors.is_empty()).then_some(BasisSet { n: self.n, vectors })
    }

    /// XOR of all members.
    pub fn sum(&self) -> BitTuple {
        self.vectors
            .iter()
            .fold(BitTuple::zero(self.n), |acc, v| acc.xor(&v.tuple()))
    }
}

impl fmt::Display for BasisSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vectors.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl<'a> IntoIterator for &'a BasisSet {
    type Item = &'a BasisVector;
    type IntoIter = std::slice::Iter<'a, BasisVector>;

    fn into_iter(self) -> Self::IntoIter {
        self.vectors.iter()
    }
}

/// Rank over GF(2) of the matrix whose rows are the members of `omega`.
pub fn gf2_rank(omega: &BasisSet) -> usize {
    // pivots[i] holds a reduced row whose lowest set bit is i
    let mut pivots = [0u16; MAX_FACTORS];
    let mut rank = 0;
    for v in omega {
        let mut row = v.tuple().bits();
        while row != 0 {
            let lead = row.trailing_zeros() as usize;
            if pivots[lead] == 0 {
                pivots[lead] = row;
                rank += 1;
                break;
            }
            row ^= pivots[lead];
        }
    }
    rank
}

/// A vertex of a NEPS: one label per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vertex(pub Vec<u8>);

impl Vertex {
    pub fn coords(&self) -> &[u8] {
        &self.0
    }

    pub fn concat(&self, other: &Vertex) -> Vertex {
        Vertex(self.0.iter().chain(&other.0).copied().collect())
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u8::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for Vertex {
    type Err = String;

    /// Comma-separated 0-based coordinates, e.g. `0,2`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<u8>()
                    .map_err(|_| format!("vertex coordinate {part:?} is not a small integer"))
            })
            .collect::<std::result::Result<Vec<u8>, String>>()
            .map(Vertex)
    }
}

/// `NEPS(G₁, …, Gₙ; Ω)` with each `Gᵢ ∈ {P2, P3}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NepsSpec {
    factors: Vec<Factor>,
    omega: BasisSet,
}

#[derive(Deserialize, Serialize)]
struct RawSpec {
    factors: Vec<String>,
    omega: Vec<Vec<i64>>,
}

impl NepsSpec {
    pub fn new(factors: Vec<Factor>, omega: BasisSet) -> Result<Self> {
        if factors.is_empty() || factors.len() > MAX_FACTORS {
            return Err(Error::spec(
                "factors",
                format!(
                    "between 1 and {MAX_FACTORS} factors required, got {}",
                    factors.len()
                ),
            ));
        }
        if omega.dim() != factors.len() {
            return Err(Error::spec(
                "omega",
                format!(
                    "tuples have length {} but there are {} factors",
                    omega.dim(),
                    factors.len()
                ),
            ));
        }
        Ok(NepsSpec { factors, omega })
    }

    /// Convenience constructor from 0/1 rows.
    pub fn from_rows<R: AsRef<[u8]>>(factors: &[Factor], rows: &[R]) -> Result<Self> {
        let omega = BasisSet::from_rows(rows)?;
        NepsSpec::new(factors.to_vec(), omega)
    }

    /// `n` copies of `P3` with basis `rows`.
    pub fn p3<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        NepsSpec::from_rows(&vec![Factor::P3; n], rows)
    }

    /// `n` copies of `P2` with basis `rows`.
    pub fn p2<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let n = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        NepsSpec::from_rows(&vec![Factor::P2; n], rows)
    }

    /// Parses `{"factors": ["P3","P3"], "omega": [[1,0],[1,1]]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSpec = serde_json::from_str(text)?;
        let factors = raw
            .factors
            .iter()
            .enumerate()
            .map(|(i, f)| {
                f.parse::<Factor>()
                    .map_err(|m| Error::spec(format!("factors[{i}]"), m))
            })
            .collect::<Result<Vec<_>>>()?;
        if raw.omega.is_empty() {
            return Err(Error::spec("omega", "basis set must be nonempty"));
        }
        let mut rows = Vec::with_capacity(raw.omega.len());
        for (i, row) in raw.omega.iter().enumerate() {
            if row.len() != factors.len() {
                return Err(Error::spec(
                    format!("omega[{i}]"),
                    format!(
                        "length {} does not match the {} factors",
                        row.len(),
                        factors.len()
                    ),
                ));
            }
            let mut bits = Vec::with_capacity(row.len());
            for (j, &e) in row.iter().enumerate() {
                match e {
                    0 | 1 => bits.push(e as u8),
                    _ => {
                        return Err(Error::spec(
                            format!("omega[{i}][{j}]"),
                            format!("entries must be 0 or 1, got {e}"),
                        ))
                    }
                }
            }
            rows.push(bits);
        }
        NepsSpec::new(factors, BasisSet::from_rows(&rows)?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("spec serializes")
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn omega(&self) -> &BasisSet {
        &self.omega
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn all(&self, factor: Factor) -> bool {
        self.factors.iter().all(|&f| f == factor)
    }

    /// Same factors, different basis set.
    pub fn with_omega(&self, omega: BasisSet) -> Result<NepsSpec> {
        NepsSpec::new(self.factors.clone(), omega)
    }

    pub fn vertex_count(&self) -> usize {
        self.factors.iter().map(|f| f.order()).product()
    }

    pub fn vertex_index(&self, v: &Vertex) -> Result<usize> {
        if v.0.len() != self.dim() {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} has {} coordinates, the graph has {}",
                v.0.len(),
                self.dim()
            )));
        }
        let mut index = 0;
        for (i, (&x, f)) in v.0.iter().zip(&self.factors).enumerate() {
            if usize::from(x) >= f.order() {
                return Err(Error::InvalidArgument(format!(
                    "vertex {v}: coordinate {i} is {x} but factor {f} has labels 0..{}",
                    f.order() - 1
                )));
            }
            index = index * f.order() + usize::from(x);
        }
        Ok(index)
    }

    pub fn vertex(&self, mut index: usize) -> Vertex {
        assert!(index < self.vertex_count(), "vertex index out of range");
        let mut coords = vec![0u8; self.dim()];
        for (slot, f) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = (index % f.order()) as u8;
            index /= f.order();
        }
        Vertex(coords)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.vertex_count()).map(|i| self.vertex(i))
    }

    /// The adjacency rule: some `β ∈ Ω` has `xᵢ = yᵢ` where `βᵢ = 0` and
    /// `xᵢ ~ yᵢ` in `Gᵢ` where `βᵢ = 1`.
    pub fn adjacent(&self, x: &Vertex, y: &Vertex) -> bool {
        self.omega.iter().any(|beta| {
            self.factors.iter().enumerate().all(|(i, f)| {
                let (xi, yi) = (x.0[i], y.0[i]);
                if beta.get(i) {
                    f.adjacent(xi, yi)
                } else {
                    xi == yi
                }
            })
        })
    }

    /// `G □ H` as a single NEPS on the concatenated factor list.
    pub fn cartesian_product(&self, other: &NepsSpec) -> Result<NepsSpec> {
        let (m, n) = (self.dim(), other.dim());
        let shift = |v: &BasisVector, offset: usize, total: usize| {
            BasisVector::new(BitTuple::new(
                ((u32::from(v.tuple().bits())) << offset) as u16,
                total,
            ))
            .expect("nonzero")
        };
        if m + n > MAX_FACTORS {
            return Err(Error::spec("factors", "product has more than 16 factors"));
        }
        let vectors = self
            .omega
            .iter()
            .map(|v| shift(v, 0, m + n))
            .chain(other.omega.iter().map(|v| shift(v, m, m + n)));
        let omega = BasisSet::new(m + n, vectors)?;
        let factors = self.factors.iter().chain(&other.factors).copied().collect();
        NepsSpec::new(factors, omega)
    }
}

impl Serialize for NepsSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        RawSpec {
            factors: self.factors.iter().map(Factor::to_string).collect(),
            omega: self
                .omega
                .iter()
                .map(|v| v.tuple().to_vec().into_iter().map(i64::from).collect())
                .collect(),
        }
        .serialize(serializer)
    }
}

impl fmt::Display for NepsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self.factors.iter().map(Factor::to_string).collect();
        let omega: Vec<String> = self.omega.iter().map(|v| v.to_string()).collect();
        write!(f, "NEPS({}; {{{}}})", factors.join(","), omega.join(","))
    }
}

/// Connectivity for bipartite connected factors: `r(Ω) = n`.
pub fn is_connected(spec: &NepsSpec) -> bool {
    gf2_rank(spec.omega()) == spec.dim()
}

/// Splits a basis set by the parity of hamming weights and records the
/// minimum-weight members of each class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParityProfile {
    pub omega_e: Option<BasisSet>,
    pub omega_o: Option<BasisSet>,
    /// Minimum even weight over `Ω_e`.
    pub k: Option<u32>,
    /// Minimum odd weight over `Ω_o`.
    pub l: Option<u32>,
    pub omega_e_star: Option<BasisSet>,
    pub omega_o_star: Option<BasisSet>,
    pub star_sum_e: Option<BitTuple>,
    pub star_sum_o: Option<BitTuple>,
}

impl ParityProfile {
    pub fn is_mixed(&self) -> bool {
        self.omega_e.is_some() && self.omega_o.is_some()
    }

    pub fn is_uniform(&self) -> bool {
        !self.is_mixed()
    }

    /// For a uniform profile: `(k, Ω*, Σ_{β∈Ω*} β)` of the single parity class.
    pub fn uniform_star(&self) -> Option<(u32, &BasisSet, BitTuple)> {
        if self.is_mixed() {
            return None;
        }
        match (self.k, self.l) {
            (Some(k), None) => Some((k, self.omega_e_star.as_ref()?, self.star_sum_e?)),
            (None, Some(l)) => Some((l, self.omega_o_star.as_ref()?, self.star_sum_o?)),
            _ => None,
        }
    }
}

pub fn parity_profile(omega: &BasisSet) -> ParityProfile {
    let omega_e = omega.filtered(|b| hamming_weight(b).is_multiple_of(2));
    let omega_o = omega.filtered(|b| !hamming_weight(b).is_multiple_of(2));
    let min_weight = |set: &Option<BasisSet>| {
        set.as_ref()
            .and_then(|s| s.iter().map(hamming_weight).min())
    };
    let k = min_weight(&omega_e);
    let l = min_weight(&omega_o);
    let star = |set: &Option<BasisSet>, w: Option<u32>| {
        set.as_ref()
            .zip(w)
            .and_then(|(s, w)| s.filtered(|b| hamming_weight(b) == w))
    };
    let omega_e_star = star(&omega_e, k);
    let omega_o_star = star(&omega_o, l);
    ParityProfile {
        star_sum_e: omega_e_star.as_ref().map(BasisSet::sum),
        star_sum_o: omega_o_star.as_ref().map(BasisSet::sum),
        omega_e,
        omega_o,
        k,
        l,
        omega_e_star,
        omega_o_star,
    }
}

/// Dense 0/1 adjacency matrix in vertex-index order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    dim: usize,
    entries: Vec<u8>,
}

impl AdjacencyMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> {
        self.entries.chunks(self.dim)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn edge_count(&self) -> usize {
        self.entries.iter().map(|&e| usize::from(e)).sum::<usize>() / 2
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let data = self.entries.iter().map(|&e| f64::from(e)).collect();
        DenseMatrix::from_row_major(self.dim, data).expect("dimension checked against dense limit")
    }
}

pub fn adjacency_matrix(spec: &NepsSpec) -> Result<AdjacencyMatrix> {
    adjacency_matrix_with_limit(spec, DEFAULT_DENSE_LIMIT)
}

/// Builds the adjacency matrix directly from the vertex adjacency rule.
pub fn adjacency_matrix_with_limit(spec: &NepsSpec, limit: usize) -> Result<AdjacencyMatrix> {
    let dim = spec.vertex_count();
    if dim > limit {
        return Err(Error::DenseLimit {
            vertices: dim,
            limit,
        });
    }
    let vertices: Vec<Vertex> = spec.vertices().collect();
    let mut entries = vec![0u8; dim * dim];
    for (i, x) in vertices.iter().enumerate() {
        for (j, y) in vertices.iter().enumerate().skip(i + 1) {
            if spec.adjacent(x, y) {
                entries[i * dim + j] = 1;
                entries[j * dim + i] = 1;
            }
        }
    }
    Ok(AdjacencyMatrix { dim, entries })
}
