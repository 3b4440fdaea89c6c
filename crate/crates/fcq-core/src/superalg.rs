//! The Tate construction `A ↦ A^(1)` on finite-dimensional `Z`-graded super
//! algebras over `F_p`, and its Hopf-algebra upgrade.
//!
//! `A^(1) = ker(1-σ)/im(N)` inside `A^{⊗p}`, where `σ` rotates tensor
//! factors with the Koszul sign. The classes of the pure powers
//! `[a_i^{⊗p}]` form a basis, the grading dilates by `p`, and the induced
//! multiplication differs from the original by the sign
//! `(-1)^{ij·C(p,2)}` on elements of parities `i, j`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::matrix::{reduce_against_echelon, SpMat};
use crate::scalar::PrimeField;
use crate::{Error, Result};

/// A finite-dimensional associative unital algebra in super vector spaces,
/// given by basis, `Z`-degrees and structure constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperAlgebra {
    field: PrimeField,
    basis: Vec<String>,
    degrees: Vec<i64>,
    unit: Vec<u64>,
    /// `mul[i][j]` = coordinates of `e_i · e_j`
    mul: Vec<Vec<Vec<u64>>>,
    graded_commutative: bool,
}

fn parity_sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

impl SuperAlgebra {
    /// Validates associativity, the unit laws, and (when flagged)
    /// graded-commutativity.
    pub fn new(
        field: PrimeField,
        basis: Vec<String>,
        degrees: Vec<i64>,
        unit: Vec<u64>,
        mul: Vec<Vec<Vec<u64>>>,
        graded_commutative: bool,
    ) -> Result<Self> {
        let n = basis.len();
        if degrees.len() != n || unit.len() != n || mul.len() != n {
            return Err(Error::BadAlgebra("table sizes disagree".into()));
        }
        for row in &mul {
            if row.len() != n || row.iter().any(|v| v.len() != n) {
                return Err(Error::BadAlgebra("structure tensor is not n×n×n".into()));
            }
        }
        let alg = SuperAlgebra {
            field,
            basis,
            degrees,
            unit,
            mul,
            graded_commutative,
        };
        // unit laws
        for i in 0..n {
            let e_i = alg.basis_vector(i);
            if alg.multiply(&alg.unit, &e_i) != e_i || alg.multiply(&e_i, &alg.unit) != e_i {
                return Err(Error::BadAlgebra(format!(
                    "unit law fails on basis element {i}"
                )));
            }
        }
        // associativity on basis triples
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let lhs = alg.multiply(&alg.mul[i][j].clone(), &alg.basis_vector(k));
                    let rhs = alg.multiply(&alg.basis_vector(i), &alg.mul[j][k].clone());
                    if lhs != rhs {
                        return Err(Error::BadAlgebra(format!(
                            "associativity fails on ({i}, {j}, {k})"
                        )));
                    }
                }
            }
        }
        if alg.graded_commutative {
            for i in 0..n {
                for j in 0..n {
                    let sign = parity_sign(alg.degrees[i] * alg.degrees[j]);
                    let rhs = scale_vec(&field, &alg.mul[j][i], sign);
                    if alg.mul[i][j] != rhs {
                        return Err(Error::BadAlgebra(format!(
                            "graded commutativity fails on ({i}, {j})"
                        )));
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis_names(&self) -> &[String] {
        &self.basis
    }

    pub fn degrees(&self) -> &[i64] {
        &self.degrees
    }

    pub fn unit(&self) -> &[u64] {
        &self.unit
    }

    pub fn graded_commutative(&self) -> bool {
        self.graded_commutative
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim()];
        v[i] = 1;
        v
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> u64 {
        self.mul[i][j][k]
    }

    /// Bilinear extension of the structure constants.
    pub fn multiply(&self, x: &[u64], y: &[u64]) -> Vec<u64> {
        let f = &self.field;
        let mut out = vec![0u64; self.dim()];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                let c = f.mul(xi, yj);
                for (k, &m) in self.mul[i][j].iter().enumerate() {
                    if m != 0 {
                        out[k] = f.add(out[k], f.mul(c, m));
                    }
                }
            }
        }
        out
    }

    /// Graded dimensions.
    pub fn graded_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        for &d in &self.degrees {
            *out.entry(d).or_insert(0) += 1;
        }
        out
    }
}

fn scale_vec(f: &PrimeField, v: &[u64], sign: i64) -> Vec<u64> {
    let s = f.from_i64(sign);
    v.iter().map(|&x| f.mul(x, s)).collect()
}

/// `(-1)^{ij·C(p,2)}`: the multiplication sign of the Tate construction on
/// parities `i, j`.
pub fn sign_factor(i: i64, j: i64, p: u64) -> i64 {
    let binom2 = (p * (p - 1) / 2) as i64;
    parity_sign(i * j * binom2)
}

/// The tensor-cube bookkeeping behind a Frobenius twist, kept for
/// inspection by tests.
pub struct TwistComputation {
    /// `A^(1)` itself.
    pub twisted: SuperAlgebra,
    /// dimension of `ker(1-σ)` in `A^{⊗p}`
    pub kernel_dim: usize,
    /// rank of the norm `N` on `A^{⊗p}`
    pub norm_rank: usize,
}

/// The Tate construction `A^(1) = ker(1-σ)/im(N)` computed honestly inside
/// `A^{⊗p}`. Basis classes are `[e_i^{⊗p}]`; degrees multiply by `p`.
pub fn frobenius_twist_algebra(a: &SuperAlgebra) -> Result<TwistComputation> {
    let field = a.field();
    let p = field.modulus() as usize;
    let n = a.dim();
    let size = n.pow(p as u32);

    let word_of = |mut code: usize| -> Vec<usize> {
        let mut w = vec![0usize; p];
        for slot in (0..p).rev() {
            w[slot] = code % n;
            code /= n;
        }
        w
    };
    let code_of = |w: &[usize]| -> usize { w.iter().fold(0, |acc, &i| acc * n + i) };
    let word_degree = |w: &[usize]| -> i64 { w.iter().map(|&i| a.degrees()[i]).sum() };

    // σ: rotate right with the Koszul sign of the last factor
    let mut sigma_t = Vec::with_capacity(size);
    for code in 0..size {
        let w = word_of(code);
        let last = w[p - 1];
        let mut rot = Vec::with_capacity(p);
        rot.push(last);
        rot.extend_from_slice(&w[..p - 1]);
        let total = word_degree(&w);
        let sign = parity_sign(a.degrees()[last] * (total - a.degrees()[last]));
        sigma_t.push((code_of(&rot), code, sign as i64));
    }
    let sigma = SpMat::from_triplets(field, size, size, sigma_t);
    let tau = sigma.sub(&SpMat::identity(field, size));
    let mut norm = SpMat::zero(field, size, size);
    let mut acc = SpMat::identity(field, size);
    for _ in 0..p {
        norm = norm.add(&acc);
        acc = sigma.mul(&acc);
    }

    let kernel_dim = tau.kernel_dim();
    let norm_rank = norm.rank();
    if kernel_dim - norm_rank != n {
        return Err(Error::BadAlgebra(format!(
            "Tate cohomology has dimension {} ≠ dim A = {n}",
            kernel_dim - norm_rank
        )));
    }
    let echelon = norm.image_echelon();

    // the class of a kernel vector, read in the pure-power basis; the
    // echelon rows of im(N) are supported on mixed words only, so after
    // reduction the pure-word coordinates are the class coordinates
    let pure_code = |i: usize| -> usize { code_of(&vec![i; p]) };
    let classify = |v: &[u64]| -> Result<Vec<u64>> {
        let red = reduce_against_echelon(&field, v, &echelon);
        let mut out = vec![0u64; n];
        for i in 0..n {
            out[i] = red[pure_code(i)];
        }
        let mut check = red;
        for i in 0..n {
            check[pure_code(i)] = 0;
        }
        if check.iter().any(|&x| x != 0) {
            return Err(Error::BadAlgebra(
                "class representative is not spanned by pure powers".into(),
            ));
        }
        Ok(out)
    };

    // multiplication: [e_i^{⊗p}]·[e_j^{⊗p}] = (shuffle sign) · [m(e_i,e_j)^{⊗p}]
    // computed by the interleaving isomorphism and m^{⊗p}
    let mut mul = vec![vec![vec![0u64; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            // Koszul sign of interleaving (a…a, b…b) ↦ (ab, ab, …):
            // each of the C(p,2) crossings contributes |e_i||e_j|
            let crossings = (p * (p - 1) / 2) as i64;
            let sign = parity_sign(a.degrees()[i] * a.degrees()[j] * crossings);
            // expand m(e_i, e_j)^{⊗p}
            let prod = &a.mul[i][j];
            let mut vec_out = vec![0u64; size];
            let support: Vec<usize> = (0..n).filter(|&k| prod[k] != 0).collect();
            let mut stack: Vec<(Vec<usize>, u64)> = vec![(Vec::new(), 1)];
            for _ in 0..p {
                let mut next = Vec::new();
                for (w, c) in &stack {
                    for &k in &support {
                        let mut w2 = w.clone();
                        w2.push(k);
                        next.push((w2, field.mul(*c, prod[k])));
                    }
                }
                stack = next;
            }
            for (w, c) in stack {
                let idx = code_of(&w);
                vec_out[idx] = field.add(vec_out[idx], c);
            }
            let signed: Vec<u64> = scale_vec(&field, &vec_out, sign);
            mul[i][j] = classify(&signed)?;
        }
    }

    // unit: [1_A^{⊗p}]
    let unit = {
        let u = a.unit().to_vec();
        let mut vec_out = vec![0u64; size];
        let support: Vec<usize> = (0..n).filter(|&k| u[k] != 0).collect();
        let mut stack: Vec<(Vec<usize>, u64)> = vec![(Vec::new(), 1)];
        for _ in 0..p {
            let mut next = Vec::new();
            for (w, c) in &stack {
                for &k in &support {
                    let mut w2 = w.clone();
                    w2.push(k);
                    next.push((w2, field.mul(*c, u[k])));
                }
            }
            stack = next;
        }
        for (w, c) in stack {
            let idx = code_of(&w);
            vec_out[idx] = field.add(vec_out[idx], c);
        }
        classify(&vec_out)?
    };

    let twisted = SuperAlgebra::new(
        field,
        a.basis_names()
            .iter()
            .map(|s| format!("{s}^(1)"))
            .collect(),
        a.degrees().iter().map(|&d| d * p as i64).collect(),
        unit,
        mul,
        a.graded_commutative(),
    )?;

    Ok(TwistComputation {
        twisted,
        kernel_dim,
        norm_rank,
    })
}

/// Twist a linear map `f : A → B` (matrix columns = images of basis
/// vectors): `[a^{⊗p}] ↦ [f(a)^{⊗p}]`. For algebra maps this is again an
/// algebra map; on parallel maps it is additive.
pub fn twist_linear_map(a: &SuperAlgebra, b: &SuperAlgebra, f: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    let field = a.field();
    let p = field.modulus() as usize;
    let (n, m) = (a.dim(), b.dim());
    if f.len() != n || f.iter().any(|col| col.len() != m) {
        return Err(Error::ShapeMismatch("linear map has wrong shape".into()));
    }
    // compute the twist of B to get its reduction context
    let size = m.pow(p as u32);
    let code_of = |w: &[usize]| -> usize { w.iter().fold(0, |acc, &i| acc * m + i) };
    let mut sigma_t = Vec::with_capacity(size);
    {
        let word_of = |mut code: usize| -> Vec<usize> {
            let mut w = vec![0usize; p];
            for slot in (0..p).rev() {
                w[slot] = code % m;
                code /= m;
            }
            w
        };
        for code in 0..size {
            let w = word_of(code);
            let last = w[p - 1];
            let mut rot = Vec::with_capacity(p);
            rot.push(last);
            rot.extend_from_slice(&w[..p - 1]);
            let total: i64 = w.iter().map(|&i| b.degrees()[i]).sum();
            let sign = parity_sign(b.degrees()[last] * (total - b.degrees()[last]));
            sigma_t.push((code_of(&rot), code, sign as i64));
        }
    }
    let sigma = SpMat::from_triplets(field, size, size, sigma_t);
    let mut norm = SpMat::zero(field, size, size);
    let mut acc = SpMat::identity(field, size);
    for _ in 0..p {
        norm = norm.add(&acc);
        acc = sigma.mul(&acc);
    }
    let echelon = norm.image_echelon();
    let pure_code = |i: usize| -> usize {
        let w = vec![i; p];
        code_of(&w)
    };

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // f(e_i)^{⊗p} expanded in B^{⊗p}
        let img = &f[i];
        let support: Vec<usize> = (0..m).filter(|&k| img[k] != 0).collect();
        let mut vec_out = vec![0u64; size];
        let mut stack: Vec<(Vec<usize>, u64)> = vec![(Vec::new(), 1)];
        for _ in 0..p {
            let mut next = Vec::new();
            for (w, c) in &stack {
                for &k in &support {
                    let mut w2 = w.clone();
                    w2.push(k);
                    next.push((w2, field.mul(*c, img[k])));
                }
            }
            stack = next;
        }
        for (w, c) in stack {
            let idx = code_of(&w);
            vec_out[idx] = field.add(vec_out[idx], c);
        }
        let red = reduce_against_echelon(&field, &vec_out, &echelon);
        let mut col = vec![0u64; m];
        for k in 0..m {
            col[k] = red[pure_code(k)];
        }
        out.push(col);
    }
    Ok(out)
}

/// `p`-dilation of graded dimensions: degree `pn` of the output carries the
/// input dimension in degree `n`.
pub fn graded_twist_dims(dims: &BTreeMap<i64, usize>, p: u64) -> BTreeMap<i64, usize> {
    dims.iter()
        .filter(|&(_, &v)| v > 0)
        .map(|(&d, &v)| (d * p as i64, v))
        .collect()
}

// ---- Hopf algebras ----

/// A super Hopf algebra: algebra plus comultiplication, counit and antipode
/// tables.
#[derive(Debug, Clone)]
pub struct SuperHopf {
    pub algebra: SuperAlgebra,
    /// `comul[i][j][k]` = coefficient of `e_j ⊗ e_k` in `Δ(e_i)`
    pub comul: Vec<Vec<Vec<u64>>>,
    pub counit: Vec<u64>,
    /// `antipode[i]` = coordinates of `S(e_i)`
    pub antipode: Vec<Vec<u64>>,
}

impl SuperHopf {
    /// Validates coassociativity, the counit law and the antipode law.
    pub fn new(
        algebra: SuperAlgebra,
        comul: Vec<Vec<Vec<u64>>>,
        counit: Vec<u64>,
        antipode: Vec<Vec<u64>>,
    ) -> Result<Self> {
        let h = SuperHopf {
            algebra,
            comul,
            counit,
            antipode,
        };
        h.check_axioms()?;
        Ok(h)
    }

    fn check_axioms(&self) -> Result<()> {
        let f = self.algebra.field();
        let n = self.algebra.dim();
        if self.comul.len() != n || self.counit.len() != n || self.antipode.len() != n {
            return Err(Error::BadAlgebra("Hopf table sizes disagree".into()));
        }
        // coassociativity: Σ_j Δ_i^{jk} Δ_j^{lm} = Σ_k' Δ_i^{l k'} Δ_{k'}^{m k}
        for i in 0..n {
            for l in 0..n {
                for m_ in 0..n {
                    for k in 0..n {
                        let mut lhs = 0u64;
                        for j in 0..n {
                            lhs = f.add(lhs, f.mul(self.comul[i][j][k], self.comul[j][l][m_]));
                        }
                        let mut rhs = 0u64;
                        for j in 0..n {
                            rhs = f.add(rhs, f.mul(self.comul[i][l][j], self.comul[j][m_][k]));
                        }
                        if lhs != rhs {
                            return Err(Error::BadAlgebra(format!(
                                "coassociativity fails at ({i}; {l}, {m_}, {k})"
                            )));
                        }
                    }
                }
            }
        }
        // counit law: (ε ⊗ id)Δ = id = (id ⊗ ε)Δ
        for i in 0..n {
            let mut left = vec![0u64; n];
            let mut right = vec![0u64; n];
            for j in 0..n {
                for k in 0..n {
                    left[k] = f.add(left[k], f.mul(self.comul[i][j][k], self.counit[j]));
                    right[j] = f.add(right[j], f.mul(self.comul[i][j][k], self.counit[k]));
                }
            }
            let e_i = self.algebra.basis_vector(i);
            if left != e_i || right != e_i {
                return Err(Error::BadAlgebra(format!("counit law fails at {i}")));
            }
        }
        // antipode law: m(S ⊗ id)Δ = η ε = m(id ⊗ S)Δ
        for i in 0..n {
            let mut left = vec![0u64; n];
            let mut right = vec![0u64; n];
            for j in 0..n {
                for k in 0..n {
                    let c = self.comul[i][j][k];
                    if c == 0 {
                        continue;
                    }
                    let sj = &self.antipode[j];
                    let e_k = self.algebra.basis_vector(k);
                    let term = self.algebra.multiply(sj, &e_k);
                    for (t, &v) in term.iter().enumerate() {
                        left[t] = f.add(left[t], f.mul(c, v));
                    }
                    let e_j = self.algebra.basis_vector(j);
                    let sk = &self.antipode[k];
                    let term = self.algebra.multiply(&e_j, sk);
                    for (t, &v) in term.iter().enumerate() {
                        right[t] = f.add(right[t], f.mul(c, v));
                    }
                }
            }
            let expect = scale_vec(&f, self.algebra.unit(), self.counit[i] as i64);
            if left != expect || right != expect {
                return Err(Error::BadAlgebra(format!("antipode law fails at {i}")));
            }
        }
        Ok(())
    }
}

/// The Hopf twist: on the identification `A^(1) = k ⊗_F A`, multiplication
/// picks up `(-1)^{ij C(p,2)}`, comultiplication picks up the same sign
/// across the tensor factors of `Δ`, the counit becomes `ε(a)^p`, and the
/// antipode is unchanged. The output is validated against all Hopf axioms.
pub fn hopf_twist(h: &SuperHopf) -> Result<SuperHopf> {
    let field = h.algebra.field();
    let p = field.modulus();
    let n = h.algebra.dim();
    let twisted_alg = frobenius_twist_algebra(&h.algebra)?.twisted;

    let mut comul = vec![vec![vec![0u64; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let sign = sign_factor(h.algebra.degrees()[j], h.algebra.degrees()[k], p);
                let v = field.mul(h.comul[i][j][k], field.from_i64(sign));
                comul[i][j][k] = v;
            }
        }
    }
    let counit = h
        .counit
        .iter()
        .map(|&c| field.pow(c, p))
        .collect::<Vec<u64>>();
    let antipode = h.antipode.clone();
    SuperHopf::new(twisted_alg, comul, counit, antipode)
}

// ---- JSON form ----

/// Wire form: basis names, degrees, unit, and the dense structure tensor
/// `mul[i][j]` = coefficient vector of `e_i e_j`.
#[derive(Serialize, Deserialize)]
pub struct SuperAlgebraJson {
    pub p: u64,
    pub basis: Vec<String>,
    pub degrees: Vec<i64>,
    pub unit: Vec<u64>,
    pub mul: Vec<Vec<Vec<u64>>>,
    #[serde(default)]
    pub graded_commutative: bool,
}

impl SuperAlgebra {
    pub fn to_json(&self) -> SuperAlgebraJson {
        SuperAlgebraJson {
            p: self.field.modulus(),
            basis: self.basis.clone(),
            degrees: self.degrees.clone(),
            unit: self.unit.clone(),
            mul: self.mul.clone(),
            graded_commutative: self.graded_commutative,
        }
    }

    pub fn from_json(json: &SuperAlgebraJson) -> Result<SuperAlgebra> {
        let field = PrimeField::new(json.p)?;
        SuperAlgebra::new(
            field,
            json.basis.clone(),
            json.degrees.clone(),
            json.unit.clone(),
            json.mul.clone(),
            json.graded_commutative,
        )
    }
}

// ---- sample algebras for randomized checks ----

/// A random valid super algebra of dimension ≤ 3: a truncated polynomial or
/// exterior algebra with random generator degree, under a random basis
/// rescaling (which preserves associativity).
pub fn sample_superalgebra(field: PrimeField, rng: &mut impl rand::Rng) -> SuperAlgebra {
    let p = field.modulus();
    let kind = rng.random_range(0..3u8);
    let (basis, degrees, mut mul): (Vec<String>, Vec<i64>, Vec<Vec<Vec<u64>>>) = match kind {
        0 => {
            // F_p[t]/t^2, deg t even
            let d = 2 * rng.random_range(0..4i64);
            (
                vec!["1".into(), "t".into()],
                vec![0, d],
                vec![
                    vec![vec![1, 0], vec![0, 1]],
                    vec![vec![0, 1], vec![0, 0]],
                ],
            )
        }
        1 => {
            // Λ[ξ], deg ξ odd
            let d = 2 * rng.random_range(0..4i64) + 1;
            (
                vec!["1".into(), "xi".into()],
                vec![0, d],
                vec![
                    vec![vec![1, 0], vec![0, 1]],
                    vec![vec![0, 1], vec![0, 0]],
                ],
            )
        }
        _ => {
            // F_p[t]/t^3, deg t even
            let d = 2 * rng.random_range(1..4i64);
            (
                vec!["1".into(), "t".into(), "t2".into()],
                vec![0, d, 2 * d],
                vec![
                    vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
                    vec![vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, 0]],
                    vec![vec![0, 0, 1], vec![0, 0, 0], vec![0, 0, 0]],
                ],
            )
        }
    };
    // random unit rescaling e_i ↦ λ_i e_i (λ_0 = 1 keeps the unit vector):
    // c^k_{ij} ↦ c^k_{ij} λ_i λ_j / λ_k
    let n = basis.len();
    let mut lambda = vec![1u64; n];
    for l in lambda.iter_mut().skip(1) {
        *l = 1 + rng.random_range(0..p - 1);
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = mul[i][j][k];
                if v != 0 {
                    let scaled = field.mul(
                        field.mul(v, field.mul(lambda[i], lambda[j])),
                        field.inv(lambda[k]),
                    );
                    mul[i][j][k] = scaled;
                }
            }
        }
    }
    let mut unit = vec![0u64; n];
    unit[0] = 1;
    SuperAlgebra::new(field, basis, degrees, unit, mul, true).expect("sample algebra is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    fn f5() -> PrimeField {
        PrimeField::new(5).unwrap()
    }

    /// `F_p[ε]/ε²` with `deg ε = d`.
    fn dual_numbers(field: PrimeField, d: i64) -> SuperAlgebra {
        SuperAlgebra::new(
            field,
            vec!["1".into(), "eps".into()],
            vec![0, d],
            vec![1, 0],
            vec![
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![0, 1], vec![0, 0]],
            ],
            true,
        )
        .unwrap()
    }

    /// `Λ[ξ, η]` over `F_p`, degrees 0, 1, 1, 2.
    pub(crate) fn exterior_two(field: PrimeField) -> SuperAlgebra {
        let m = field.modulus();
        let neg1 = (m - 1) as u64;
        // basis 1, ξ, η, ξη
        SuperAlgebra::new(
            field,
            vec!["1".into(), "xi".into(), "eta".into(), "xieta".into()],
            vec![0, 1, 1, 2],
            vec![1, 0, 0, 0],
            vec![
                vec![
                    vec![1, 0, 0, 0],
                    vec![0, 1, 0, 0],
                    vec![0, 0, 1, 0],
                    vec![0, 0, 0, 1],
                ],
                vec![
                    vec![0, 1, 0, 0],
                    vec![0, 0, 0, 0],
                    vec![0, 0, 0, 1],
                    vec![0, 0, 0, 0],
                ],
                vec![
                    vec![0, 0, 1, 0],
                    vec![0, 0, 0, neg1],
                    vec![0, 0, 0, 0],
                    vec![0, 0, 0, 0],
                ],
                vec![
                    vec![0, 0, 0, 1],
                    vec![0, 0, 0, 0],
                    vec![0, 0, 0, 0],
                    vec![0, 0, 0, 0],
                ],
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn sign_factor_values() {
        assert_eq!(sign_factor(1, 1, 3), -1);
        assert_eq!(sign_factor(1, 1, 5), 1);
        assert_eq!(sign_factor(0, 1, 3), 1);
        assert_eq!(sign_factor(0, 0, 7), 1);
        assert_eq!(sign_factor(1, 1, 7), -1); // C(7,2) = 21 odd
    }

    #[test]
    fn twist_of_ground_field() {
        let a = SuperAlgebra::new(
            f3(),
            vec!["1".into()],
            vec![0],
            vec![1],
            vec![vec![vec![1]]],
            true,
        )
        .unwrap();
        let t = frobenius_twist_algebra(&a).unwrap();
        assert_eq!(t.twisted.dim(), 1);
        assert_eq!(t.twisted.degrees(), &[0]);
        assert_eq!(t.twisted.structure_constant(0, 0, 0), 1);
    }

    #[test]
    fn twist_of_dual_numbers_even() {
        // A = F_3[ε]/ε², deg ε = 2: twist has degrees {0, 6} and ε^(1)² = 0
        let a = dual_numbers(f3(), 2);
        let t = frobenius_twist_algebra(&a).unwrap();
        assert_eq!(t.twisted.degrees(), &[0, 6]);
        assert_eq!(t.twisted.multiply(&[0, 1], &[0, 1]), vec![0, 0]);
        assert_eq!(t.twisted.multiply(&[1, 0], &[0, 1]), vec![0, 1]);
        // the 8-dimensional cube: ker(1-σ) has dim 2 + (8-2)/3 = 4, rank N = 2
        assert_eq!(t.kernel_dim, 4);
        assert_eq!(t.norm_rank, 2);
    }

    #[test]
    fn twist_of_exterior_line() {
        // Λ[ξ], deg ξ = 1, p = 3: ξ^(1) in degree 3 squares to zero
        let a = dual_numbers(f3(), 1);
        let t = frobenius_twist_algebra(&a).unwrap();
        assert_eq!(t.twisted.degrees(), &[0, 3]);
        assert_eq!(t.twisted.multiply(&[0, 1], &[0, 1]), vec![0, 0]);
    }

    #[test]
    fn signchange_on_exterior_two() {
        // structure constants of A^(1) are sign_factor(i,j,p) times the
        // originals under [a^{⊗p}] ↦ a
        for field in [f3(), f5()] {
            let p = field.modulus();
            let a = exterior_two(field);
            let t = frobenius_twist_algebra(&a).unwrap().twisted;
            for i in 0..a.dim() {
                for j in 0..a.dim() {
                    for k in 0..a.dim() {
                        let sign = sign_factor(a.degrees()[i], a.degrees()[j], p);
                        let expect = field.mul(
                            a.structure_constant(i, j, k),
                            field.from_i64(sign),
                        );
                        assert_eq!(
                            t.structure_constant(i, j, k),
                            expect,
                            "p={p} ({i},{j},{k})"
                        );
                    }
                }
            }
            // ξ^(1)·η^(1) = -(ξη)^(1) exactly when p ≡ 3 mod 4
            let prod = t.multiply(&[0, 1, 0, 0], &[0, 0, 1, 0]);
            let expect = if p % 4 == 3 { field.neg(1) } else { 1 };
            assert_eq!(prod, vec![0, 0, 0, expect], "p={p}");
        }
    }

    #[test]
    fn twist_dims_dilate() {
        let dims = BTreeMap::from([(0i64, 2usize), (2, 1)]);
        assert_eq!(
            graded_twist_dims(&dims, 3),
            BTreeMap::from([(0, 2), (6, 1)])
        );
        assert_eq!(graded_twist_dims(&BTreeMap::new(), 3), BTreeMap::new());
        assert_eq!(
            graded_twist_dims(&BTreeMap::from([(1i64, 1usize)]), 3),
            BTreeMap::from([(3, 1)])
        );
        // matches the honest computation on sample algebras
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..4 {
            let a = sample_superalgebra(f3(), &mut rng);
            let t = frobenius_twist_algebra(&a).unwrap().twisted;
            assert_eq!(t.graded_dims(), graded_twist_dims(&a.graded_dims(), 3));
        }
    }

    #[test]
    fn twist_functorial_and_additive() {
        let field = f3();
        let a = dual_numbers(field, 2);
        // algebra endomorphisms of F_3[ε]/ε²: 1 ↦ 1, ε ↦ cε
        for c in 0..3u64 {
            let f = vec![vec![1, 0], vec![0, c]];
            let tf = twist_linear_map(&a, &a, &f).unwrap();
            // an algebra map again: check multiplicativity on ε^(1)
            let t = frobenius_twist_algebra(&a).unwrap().twisted;
            let img_eps = &tf[1];
            let lhs = t.multiply(img_eps, img_eps);
            assert_eq!(lhs, vec![0, 0]); // ε^(1)² = 0 ↦ 0
            // scalars transform by c ↦ c^p = c (prime field)
            assert_eq!(tf[1][1], field.pow(c, 3));
        }
        // additivity on parallel linear maps
        let f = vec![vec![1, 0], vec![0, 2]];
        let g = vec![vec![0, 0], vec![0, 1]];
        let sum: Vec<Vec<u64>> = f
            .iter()
            .zip(&g)
            .map(|(fc, gc)| fc.iter().zip(gc).map(|(&x, &y)| field.add(x, y)).collect())
            .collect();
        let lhs = twist_linear_map(&a, &a, &sum).unwrap();
        let tf = twist_linear_map(&a, &a, &f).unwrap();
        let tg = twist_linear_map(&a, &a, &g).unwrap();
        let rhs: Vec<Vec<u64>> = tf
            .iter()
            .zip(&tg)
            .map(|(fc, gc)| fc.iter().zip(gc).map(|(&x, &y)| field.add(x, y)).collect())
            .collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn hopf_group_algebra() {
        // H = F_3[g]/(g² - 1), group-like g
        let field = f3();
        let alg = SuperAlgebra::new(
            field,
            vec!["1".into(), "g".into()],
            vec![0, 0],
            vec![1, 0],
            vec![
                vec![vec![1, 0], vec![0, 1]],
                vec![vec![0, 1], vec![1, 0]],
            ],
            true,
        )
        .unwrap();
        // Δ(1) = 1⊗1, Δ(g) = g⊗g
        let mut comul = vec![vec![vec![0u64; 2]; 2]; 2];
        comul[0][0][0] = 1;
        comul[1][1][1] = 1;
        let counit = vec![1, 1];
        let antipode = vec![vec![1, 0], vec![0, 1]]; // S(g) = g⁻¹ = g
        let h = SuperHopf::new(alg, comul, counit, antipode).unwrap();
        let t = hopf_twist(&h).unwrap();
        // group-like stays group-like
        assert_eq!(t.comul[1][1][1], 1);
        assert_eq!(
            t.comul[1]
                .iter()
                .flatten()
                .map(|&v| v as u64)
                .sum::<u64>(),
            1
        );
        // ε(1^(1)) = 1, S(g^(1)) = g^(1)
        assert_eq!(t.counit[0], 1);
        assert_eq!(t.antipode[1], vec![0, 1]);

        // independent tensor-cube oracle for Δ^(1)(g^(1)): the interleaving
        // of (g⊗g)^{⊗3} is g^{⊗3} ⊗ g^{⊗3} with no sign (degree 0), whose
        // class is g^(1) ⊗ g^(1)
        let sign = sign_factor(0, 0, 3);
        assert_eq!(sign, 1);
    }

    #[test]
    fn samples_are_valid_and_commutative() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..10 {
            let a = sample_superalgebra(f5(), &mut rng);
            assert!(a.dim() <= 3);
            let t = frobenius_twist_algebra(&a).unwrap();
            assert_eq!(t.twisted.dim(), a.dim());
        }
    }
}
