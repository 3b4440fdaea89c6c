//! Bounded cochain complexes over `F_p` with order-`p` cyclic actions.
//!
//! Cohomological convention throughout: `d^n : C^n → C^{n+1}`, matrices act
//! on column vectors, composition `g ∘ f` is `mat(g) * mat(f)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::matrix::SpMat;
use crate::scalar::PrimeField;
use crate::{Error, Result};

/// A bounded complex of finite-dimensional `F_p`-vector spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complex {
    field: PrimeField,
    dims: BTreeMap<i64, usize>,
    d: BTreeMap<i64, SpMat>,
}

impl Complex {
    /// Validates shapes and `d² = 0`.
    pub fn new(
        field: PrimeField,
        dims: BTreeMap<i64, usize>,
        d: BTreeMap<i64, SpMat>,
    ) -> Result<Self> {
        let dims: BTreeMap<i64, usize> = dims.into_iter().filter(|&(_, v)| v > 0).collect();
        let c = Complex { field, dims, d };
        for (&n, mat) in &c.d {
            if mat.nrows() != c.dim(n + 1) || mat.ncols() != c.dim(n) {
                return Err(Error::BadComplex(format!(
                    "d^{n} has shape {}x{}, expected {}x{}",
                    mat.nrows(),
                    mat.ncols(),
                    c.dim(n + 1),
                    c.dim(n)
                )));
            }
        }
        for &n in c.dims.keys() {
            let dd = c.d_at(n + 1).mul(&c.d_at(n));
            if !dd.is_zero() {
                return Err(Error::BadComplex(format!("d² ≠ 0 out of degree {n}")));
            }
        }
        Ok(c)
    }

    /// A single `F_p`-line in one degree.
    pub fn point(field: PrimeField, degree: i64) -> Self {
        Complex::new(field, BTreeMap::from([(degree, 1)]), BTreeMap::new()).unwrap()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self, n: i64) -> usize {
        self.dims.get(&n).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &BTreeMap<i64, usize> {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }

    /// Support interval `[min, max]`, or `None` for the zero complex.
    pub fn support(&self) -> Option<(i64, i64)> {
        let min = *self.dims.keys().next()?;
        let max = *self.dims.keys().last()?;
        Some((min, max))
    }

    /// The differential out of degree `n`, materialized with correct shape.
    pub fn d_at(&self, n: i64) -> SpMat {
        self.d
            .get(&n)
            .cloned()
            .unwrap_or_else(|| SpMat::zero(self.field, self.dim(n + 1), self.dim(n)))
    }

    /// Cohomology dimension in degree `n`.
    pub fn cohomology_dim(&self, n: i64) -> usize {
        let d_out = self.d_at(n);
        let d_in = self.d_at(n - 1);
        d_out.kernel_dim() - d_in.rank()
    }

    pub fn direct_sum(&self, other: &Complex) -> Complex {
        assert_eq!(self.field, other.field);
        let mut dims = BTreeMap::new();
        let degrees: std::collections::BTreeSet<i64> = self
            .dims
            .keys()
            .chain(other.dims.keys())
            .copied()
            .collect();
        for &n in &degrees {
            dims.insert(n, self.dim(n) + other.dim(n));
        }
        let mut d = BTreeMap::new();
        for &n in &degrees {
            let (a, b) = (self.d_at(n), other.d_at(n));
            if a.is_zero() && b.is_zero() {
                continue;
            }
            let mut triplets = Vec::new();
            for r in 0..a.nrows() {
                for &(c, v) in a.row(r) {
                    triplets.push((r, c, v as i64));
                }
            }
            let (roff, coff) = (self.dim(n + 1), self.dim(n));
            for r in 0..b.nrows() {
                for &(c, v) in b.row(r) {
                    triplets.push((r + roff, c + coff, v as i64));
                }
            }
            d.insert(
                n,
                SpMat::from_triplets(
                    self.field,
                    self.dim(n + 1) + other.dim(n + 1),
                    self.dim(n) + other.dim(n),
                    triplets,
                ),
            );
        }
        Complex::new(self.field, dims, d).expect("direct sum of complexes is a complex")
    }
}

/// A complex with a degreewise automorphism `σ` of order `p` commuting with
/// the differential.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicComplex {
    complex: Complex,
    sigma: BTreeMap<i64, SpMat>,
}

impl CyclicComplex {
    /// Validates `σ^p = id` and `σ d = d σ` degreewise.
    pub fn new(complex: Complex, sigma: BTreeMap<i64, SpMat>) -> Result<Self> {
        let c = CyclicComplex { complex, sigma };
        let p = c.complex.field.modulus();
        for &n in c.complex.dims.keys() {
            let s = c.sigma_at(n);
            if s.nrows() != c.complex.dim(n) || s.ncols() != c.complex.dim(n) {
                return Err(Error::BadComplex(format!("σ^{n} has wrong shape")));
            }
            let mut acc = SpMat::identity(c.complex.field, c.complex.dim(n));
            for _ in 0..p {
                acc = s.mul(&acc);
            }
            if acc != SpMat::identity(c.complex.field, c.complex.dim(n)) {
                return Err(Error::BadComplex(format!("σ^{p} ≠ id in degree {n}")));
            }
            let lhs = c.sigma_at(n + 1).mul(&c.complex.d_at(n));
            let rhs = c.complex.d_at(n).mul(&s);
            if lhs != rhs {
                return Err(Error::BadComplex(format!("σd ≠ dσ out of degree {n}")));
            }
        }
        Ok(c)
    }

    /// The trivial action on a given complex.
    pub fn trivial(complex: Complex) -> Self {
        let sigma = complex
            .dims
            .keys()
            .map(|&n| (n, SpMat::identity(complex.field, complex.dim(n))))
            .collect();
        CyclicComplex { complex, sigma }
    }

    /// The regular representation `F_p[μ_p]` in degree 0: `σ` is the
    /// `p`-cycle permutation.
    pub fn regular_representation(field: PrimeField) -> Self {
        let p = field.modulus() as usize;
        let complex = Complex::new(field, BTreeMap::from([(0, p)]), BTreeMap::new()).unwrap();
        let sigma = SpMat::from_triplets(
            field,
            p,
            p,
            (0..p).map(|j| (((j + 1) % p), j, 1i64)),
        );
        CyclicComplex::new(complex, BTreeMap::from([(0, sigma)])).unwrap()
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn field(&self) -> PrimeField {
        self.complex.field
    }

    pub fn dim(&self, n: i64) -> usize {
        self.complex.dim(n)
    }

    pub fn d_at(&self, n: i64) -> SpMat {
        self.complex.d_at(n)
    }

    pub fn sigma_at(&self, n: i64) -> SpMat {
        self.sigma
            .get(&n)
            .cloned()
            .unwrap_or_else(|| SpMat::identity(self.complex.field, self.complex.dim(n)))
    }

    /// The norm `N = Σ_{j<p} σ^j` in degree `n`.
    pub fn norm_at(&self, n: i64) -> SpMat {
        let p = self.field().modulus();
        let s = self.sigma_at(n);
        let mut acc = SpMat::identity(self.field(), self.dim(n));
        let mut out = SpMat::zero(self.field(), self.dim(n), self.dim(n));
        for _ in 0..p {
            out = out.add(&acc);
            acc = s.mul(&acc);
        }
        out
    }

    /// `σ - 1` in degree `n`.
    pub fn tau_at(&self, n: i64) -> SpMat {
        self.sigma_at(n)
            .sub(&SpMat::identity(self.field(), self.dim(n)))
    }

    /// Is the degree-`n` part free over `F_p[μ_p]`? Tested as
    /// `dim ker(σ - 1) = dim / p` (all Jordan blocks of `σ - 1` have size
    /// `p`); degrees with `p ∤ dim` are never free.
    pub fn is_induced_in_degree(&self, n: i64) -> bool {
        let p = self.field().modulus() as usize;
        let dim = self.dim(n);
        if dim % p != 0 {
            return false;
        }
        self.tau_at(n).kernel_dim() == dim / p
    }

    /// Per-degree freeness flags over the whole support.
    pub fn is_induced(&self) -> BTreeMap<i64, bool> {
        self.complex
            .dims
            .keys()
            .map(|&n| (n, self.is_induced_in_degree(n)))
            .collect()
    }
}

/// A chain map between complexes (degreewise matrices commuting with `d`).
#[derive(Debug, Clone)]
pub struct ChainMap {
    pub source: Complex,
    pub target: Complex,
    pub mats: BTreeMap<i64, SpMat>,
}

impl ChainMap {
    pub fn new(source: Complex, target: Complex, mats: BTreeMap<i64, SpMat>) -> Result<Self> {
        let f = ChainMap {
            source,
            target,
            mats,
        };
        for (&n, m) in &f.mats {
            if m.nrows() != f.target.dim(n) || m.ncols() != f.source.dim(n) {
                return Err(Error::ShapeMismatch(format!(
                    "component at degree {n} has shape {}x{}, expected {}x{}",
                    m.nrows(),
                    m.ncols(),
                    f.target.dim(n),
                    f.source.dim(n)
                )));
            }
        }
        let degrees: Vec<i64> = f.source.dims.keys().copied().collect();
        for n in degrees {
            let lhs = f.target.d_at(n).mul(&f.at(n));
            let rhs = f.at(n + 1).mul(&f.source.d_at(n));
            if lhs != rhs {
                return Err(Error::NotChainMap(format!("fails to commute with d at degree {n}")));
            }
        }
        Ok(f)
    }

    pub fn identity(c: &Complex) -> Self {
        let mats = c
            .dims
            .keys()
            .map(|&n| (n, SpMat::identity(c.field, c.dim(n))))
            .collect();
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            mats,
        }
    }

    pub fn zero(source: &Complex, target: &Complex) -> Self {
        ChainMap {
            source: source.clone(),
            target: target.clone(),
            mats: BTreeMap::new(),
        }
    }

    pub fn at(&self, n: i64) -> SpMat {
        self.mats.get(&n).cloned().unwrap_or_else(|| {
            SpMat::zero(self.source.field, self.target.dim(n), self.source.dim(n))
        })
    }

    pub fn is_parallel_to(&self, other: &ChainMap) -> bool {
        self.source == other.source && self.target == other.target
    }

    pub fn add(&self, other: &ChainMap) -> ChainMap {
        assert!(self.is_parallel_to(other), "chain maps not parallel");
        let degrees: std::collections::BTreeSet<i64> = self
            .mats
            .keys()
            .chain(other.mats.keys())
            .copied()
            .collect();
        let mats = degrees
            .into_iter()
            .map(|n| (n, self.at(n).add(&other.at(n))))
            .collect();
        ChainMap {
            source: self.source.clone(),
            target: self.target.clone(),
            mats,
        }
    }

    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        assert_eq!(first.target, self.source, "composition shape mismatch");
        let degrees: std::collections::BTreeSet<i64> = self
            .mats
            .keys()
            .chain(first.mats.keys())
            .copied()
            .collect();
        let mats = degrees
            .into_iter()
            .map(|n| (n, self.at(n).mul(&first.at(n))))
            .collect();
        ChainMap {
            source: first.source.clone(),
            target: self.target.clone(),
            mats,
        }
    }

    /// Is this map `σ`-equivariant for the given cyclic structures?
    pub fn is_equivariant(&self, src: &CyclicComplex, tgt: &CyclicComplex) -> bool {
        assert_eq!(src.complex(), &self.source);
        assert_eq!(tgt.complex(), &self.target);
        self.source.dims.keys().all(|&n| {
            tgt.sigma_at(n).mul(&self.at(n)) == self.at(n).mul(&src.sigma_at(n))
        })
    }
}

// ---- JSON form ----

/// Wire form:
/// `{"p":3,"degrees":{"0":1,"1":1},"d":{"0":[[1]]},"sigma":{...}}`.
#[derive(Serialize, Deserialize)]
pub struct ComplexJson {
    pub p: u64,
    pub degrees: BTreeMap<String, usize>,
    #[serde(default)]
    pub d: BTreeMap<String, Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<BTreeMap<String, Vec<Vec<i64>>>>,
}

impl Complex {
    pub fn from_json(json: &ComplexJson) -> Result<Complex> {
        let field = PrimeField::new(json.p)?;
        let mut dims = BTreeMap::new();
        for (k, &v) in &json.degrees {
            let n: i64 = k
                .parse()
                .map_err(|_| Error::Json(format!("bad degree key {k:?}")))?;
            dims.insert(n, v);
        }
        let mut d = BTreeMap::new();
        for (k, rows) in &json.d {
            let n: i64 = k
                .parse()
                .map_err(|_| Error::Json(format!("bad degree key {k:?}")))?;
            d.insert(n, SpMat::from_dense(field, rows));
        }
        Complex::new(field, dims, d)
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            p: self.field.modulus(),
            degrees: self
                .dims
                .iter()
                .map(|(&n, &v)| (n.to_string(), v))
                .collect(),
            d: self
                .d
                .iter()
                .filter(|(_, m)| !m.is_zero())
                .map(|(&n, m)| {
                    (
                        n.to_string(),
                        m.to_dense()
                            .into_iter()
                            .map(|r| r.into_iter().map(|v| v as i64).collect())
                            .collect(),
                    )
                })
                .collect(),
            sigma: None,
        }
    }
}

impl CyclicComplex {
    pub fn from_json(json: &ComplexJson) -> Result<CyclicComplex> {
        let complex = Complex::from_json(json)?;
        let field = complex.field();
        let mut sigma = BTreeMap::new();
        if let Some(smap) = &json.sigma {
            for (k, rows) in smap {
                let n: i64 = k
                    .parse()
                    .map_err(|_| Error::Json(format!("bad degree key {k:?}")))?;
                sigma.insert(n, SpMat::from_dense(field, rows));
            }
            CyclicComplex::new(complex, sigma)
        } else {
            Ok(CyclicComplex::trivial(complex))
        }
    }

    pub fn to_json(&self) -> ComplexJson {
        let mut json = self.complex.to_json();
        json.sigma = Some(
            self.sigma
                .iter()
                .map(|(&n, m)| {
                    (
                        n.to_string(),
                        m.to_dense()
                            .into_iter()
                            .map(|r| r.into_iter().map(|v| v as i64).collect())
                            .collect(),
                    )
                })
                .collect(),
        );
        json
    }
}

/// A deterministic pseudo-random bounded complex for seeded property
/// checks: degrees `0..len`, each dimension in `[1, max_dim]`. Every
/// differential is drawn uniformly from the solution space of
/// `d_n ∘ d_{n-1} = 0`.
pub fn seeded_complex(
    field: PrimeField,
    rng: &mut impl rand::Rng,
    len: usize,
    max_dim: usize,
) -> Complex {
    let dims: Vec<usize> = (0..len).map(|_| 1 + rng.random_range(0..max_dim)).collect();
    seeded_complex_with_dims(field, rng, &dims)
}

/// As [`seeded_complex`] with the dimension vector pinned (degree `i` gets
/// `dims[i]`).
pub fn seeded_complex_with_dims(
    field: PrimeField,
    rng: &mut impl rand::Rng,
    dim_list: &[usize],
) -> Complex {
    let len = dim_list.len();
    let mut dims = BTreeMap::new();
    for (n, &v) in dim_list.iter().enumerate() {
        dims.insert(n as i64, v);
    }
    let mut d: BTreeMap<i64, SpMat> = BTreeMap::new();
    for n in 0..len.saturating_sub(1) {
        let n = n as i64;
        let (rows, cols) = (dims[&(n + 1)], dims[&n]);
        let prev = d
            .get(&(n - 1))
            .cloned()
            .unwrap_or_else(|| SpMat::zero(field, cols, 0));
        // linear constraint (M · prev)[i, j] = Σ_k M[i, k] prev[k, j] = 0 on
        // the entries of M (row-major vec)
        let mut constraints = Vec::new();
        for i in 0..rows {
            for j in 0..prev.ncols() {
                let eq = i * prev.ncols() + j;
                for k in 0..cols {
                    let v = prev.get(k, j);
                    if v != 0 {
                        constraints.push((eq, i * cols + k, v as i64));
                    }
                }
            }
        }
        let sys = SpMat::from_triplets(field, rows * prev.ncols(), rows * cols, constraints);
        let m = random_solution(&sys, rows, cols, rng);
        d.insert(n, m);
    }
    Complex::new(field, dims, d).expect("seeded complex is valid")
}

/// A deterministic pseudo-random chain map, drawn uniformly from the space
/// of solutions of `d_B f = f d_A`.
pub fn seeded_chain_map(
    source: &Complex,
    target: &Complex,
    rng: &mut impl rand::Rng,
) -> ChainMap {
    let field = source.field();
    // Unknowns: entries of every component f_n, stacked.
    let degrees: Vec<i64> = source
        .dims()
        .keys()
        .chain(target.dims().keys())
        .copied()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut offset = std::collections::BTreeMap::new();
    let mut total = 0usize;
    for &n in &degrees {
        offset.insert(n, total);
        total += target.dim(n) * source.dim(n);
    }
    let idx = |n: i64, r: usize, c: usize| offset[&n] + r * source.dim(n) + c;
    let mut triplets = Vec::new();
    let mut eq = 0usize;
    for &n in &degrees {
        // d_B(n) f_n - f_{n+1} d_A(n) = 0, entry (i, j)
        let db = target.d_at(n);
        let da = source.d_at(n);
        for i in 0..target.dim(n + 1) {
            for j in 0..source.dim(n) {
                for k in 0..target.dim(n) {
                    let v = db.get(i, k);
                    if v != 0 {
                        triplets.push((eq, idx(n, k, j), v as i64));
                    }
                }
                for l in 0..source.dim(n + 1) {
                    let v = da.get(l, j);
                    if v != 0 && degrees.contains(&(n + 1)) {
                        triplets.push((eq, idx(n + 1, i, l), -(v as i64)));
                    }
                }
                eq += 1;
            }
        }
    }
    let sys = SpMat::from_triplets(field, eq, total, triplets);
    let sol = random_kernel_vector(&sys, rng);
    let mut mats = BTreeMap::new();
    for &n in &degrees {
        let (rows, cols) = (target.dim(n), source.dim(n));
        if rows * cols == 0 {
            continue;
        }
        let mut t = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = sol[idx(n, r, c)];
                if v != 0 {
                    t.push((r, c, v as i64));
                }
            }
        }
        mats.insert(n, SpMat::from_triplets(field, rows, cols, t));
    }
    ChainMap::new(source.clone(), target.clone(), mats).expect("seeded map is a chain map")
}

/// A uniformly random element of `ker(sys)`.
fn random_kernel_vector(sys: &SpMat, rng: &mut impl rand::Rng) -> Vec<u64> {
    let field = sys.field();
    let basis = sys.kernel_basis();
    let mut sol = vec![0u64; sys.ncols()];
    for v in &basis {
        let c = rng.random_range(0..field.modulus());
        for (s, &x) in sol.iter_mut().zip(v) {
            *s = field.add(*s, field.mul(c, x));
        }
    }
    sol
}

fn random_solution(sys: &SpMat, rows: usize, cols: usize, rng: &mut impl rand::Rng) -> SpMat {
    let field = sys.field();
    let sol = random_kernel_vector(sys, rng);
    let mut triplets = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = sol[r * cols + c];
            if v != 0 {
                triplets.push((r, c, v as i64));
            }
        }
    }
    SpMat::from_triplets(field, rows, cols, triplets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    /// The two-term complex `F_3 →(1) F_3` in degrees 0, 1.
    pub(crate) fn interval(field: PrimeField) -> Complex {
        Complex::new(
            field,
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(0, SpMat::from_dense(field, &[vec![1]]))]),
        )
        .unwrap()
    }

    #[test]
    fn d_squared_checked() {
        let field = f3();
        let bad = Complex::new(
            field,
            BTreeMap::from([(0, 1), (1, 1), (2, 1)]),
            BTreeMap::from([
                (0, SpMat::from_dense(field, &[vec![1]])),
                (1, SpMat::from_dense(field, &[vec![1]])),
            ]),
        );
        assert!(bad.is_err());
    }

    #[test]
    fn cohomology_of_interval() {
        let c = interval(f3());
        assert_eq!(c.cohomology_dim(0), 0);
        assert_eq!(c.cohomology_dim(1), 0);
        let pt = Complex::point(f3(), 0);
        assert_eq!(pt.cohomology_dim(0), 1);
    }

    #[test]
    fn regular_representation_is_induced() {
        let m = CyclicComplex::regular_representation(f3());
        assert!(m.is_induced_in_degree(0));
        let trivial = CyclicComplex::trivial(Complex::point(f3(), 0));
        assert!(!trivial.is_induced_in_degree(0));
    }

    #[test]
    fn json_round_trip() {
        let c = interval(f3());
        let j = serde_json::to_string(&c.to_json()).unwrap();
        let back = Complex::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn chain_map_validation() {
        let c = interval(f3());
        let id = ChainMap::identity(&c);
        assert!(id.is_equivariant(
            &CyclicComplex::trivial(c.clone()),
            &CyclicComplex::trivial(c.clone())
        ));
        // a non-commuting degreewise map is rejected
        let bad = ChainMap::new(
            c.clone(),
            c.clone(),
            BTreeMap::from([(0, SpMat::from_dense(f3(), &[vec![1]]))]),
        );
        assert!(bad.is_err());
    }
}
