//! The chain-level `p`-th power construction `St`.
//!
//! For a bounded complex `C` over `F_p`, `St(C)` is `C^{⊗p}` with the
//! Koszul-signed differential and the cyclic action in which the generator
//! `σ` moves the last tensor factor to the front:
//!
//! ```text
//! σ(a_1 ⊗ … ⊗ a_p) = (-1)^{|a_p|(n - |a_p|)} a_p ⊗ a_1 ⊗ … ⊗ a_{p-1}
//! ```
//!
//! (`n` the total degree). The sign is the Koszul twist that makes `σ`
//! commute with the differential; `σ^p = id` holds because `n(n-1)` is even.
//!
//! Tensor bases are indexed by words over the factor bases; the kernel
//! enumerates words once and materializes all matrices sparsely, since the
//! dimension grows as `(Σ dim)^p`.

use std::collections::{BTreeMap, HashMap};

use crate::complex::{ChainMap, Complex, CyclicComplex};
use crate::matrix::SpMat;
use crate::report::VerificationReport;
use crate::{Error, Result};

/// One tensor word: `p` factors, each a `(degree, basis index)` pair of the
/// base complex.
pub type Word = Vec<(i64, usize)>;

/// `St(C)` together with its word bookkeeping.
#[derive(Debug, Clone)]
pub struct SteenrodComplex {
    base: Complex,
    words: BTreeMap<i64, Vec<Word>>,
    pos: HashMap<Word, (i64, usize)>,
    cyclic: CyclicComplex,
}

fn parity_sign(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// The `p`-th power complex of `C` (`p` = characteristic of the base field)
/// with its cyclic structure.
pub fn steenrod_complex(c: &Complex) -> SteenrodComplex {
    let field = c.field();
    let p = field.modulus() as usize;

    // fixed factor order: (degree asc, index asc)
    let factors: Vec<(i64, usize)> = c
        .dims()
        .iter()
        .flat_map(|(&n, &dim)| (0..dim).map(move |i| (n, i)))
        .collect();

    // enumerate all words, grouped by total degree, in odometer order
    let mut words: BTreeMap<i64, Vec<Word>> = BTreeMap::new();
    let mut pos: HashMap<Word, (i64, usize)> = HashMap::new();
    let total = factors.len().pow(p as u32);
    for mut code in 0..total {
        let mut word: Word = Vec::with_capacity(p);
        for _ in 0..p {
            word.push(factors[code % factors.len()]);
            code /= factors.len();
        }
        word.reverse();
        let degree: i64 = word.iter().map(|&(d, _)| d).sum();
        let list = words.entry(degree).or_default();
        pos.insert(word.clone(), (degree, list.len()));
        list.push(word);
    }

    let dims: BTreeMap<i64, usize> = words.iter().map(|(&n, v)| (n, v.len())).collect();

    // differential: apply d in each slot with the Koszul sign
    // (-1)^{deg of factors to the left}
    let mut d_triplets: BTreeMap<i64, Vec<(usize, usize, i64)>> = BTreeMap::new();
    let mut d_cols: HashMap<i64, Vec<Vec<(usize, u64)>>> = HashMap::new();
    for (&n, _) in c.dims() {
        let m = c.d_at(n);
        let mt = m.transpose();
        d_cols.insert(n, (0..m.ncols()).map(|j| mt.row(j).to_vec()).collect());
    }
    for (&n, list) in &words {
        for (col, word) in list.iter().enumerate() {
            let mut left_deg = 0i64;
            for j in 0..p {
                let (dj, ij) = word[j];
                if let Some(cols) = d_cols.get(&dj) {
                    for &(row_idx, v) in &cols[ij] {
                        let mut new_word = word.clone();
                        new_word[j] = (dj + 1, row_idx);
                        let &(nd, npos) = pos.get(&new_word).expect("target word exists");
                        debug_assert_eq!(nd, n + 1);
                        let sign = parity_sign(left_deg);
                        d_triplets
                            .entry(n)
                            .or_default()
                            .push((npos, col, sign * v as i64));
                    }
                }
                left_deg += dj;
            }
        }
    }
    let d: BTreeMap<i64, SpMat> = d_triplets
        .into_iter()
        .map(|(n, t)| {
            (
                n,
                SpMat::from_triplets(
                    field,
                    dims.get(&(n + 1)).copied().unwrap_or(0),
                    dims[&n],
                    t,
                ),
            )
        })
        .collect();

    let complex = Complex::new(field, dims, d).expect("St(C) differential squares to zero");

    // cyclic structure: rotate right with the Koszul sign of the last factor
    let mut sigma = BTreeMap::new();
    for (&n, list) in &words {
        let mut triplets = Vec::new();
        for (col, word) in list.iter().enumerate() {
            let last = word[p - 1];
            let mut rotated: Word = Vec::with_capacity(p);
            rotated.push(last);
            rotated.extend_from_slice(&word[..p - 1]);
            let &(_, npos) = pos.get(&rotated).unwrap();
            let sign = parity_sign(last.0 * (n - last.0));
            triplets.push((npos, col, sign));
        }
        sigma.insert(n, SpMat::from_triplets(field, list.len(), list.len(), triplets));
    }

    let cyclic = CyclicComplex::new(complex, sigma).expect("St(C) cyclic structure is valid");
    SteenrodComplex {
        base: c.clone(),
        words,
        pos,
        cyclic,
    }
}

impl SteenrodComplex {
    pub fn base(&self) -> &Complex {
        &self.base
    }

    pub fn cyclic(&self) -> &CyclicComplex {
        &self.cyclic
    }

    pub fn complex(&self) -> &Complex {
        self.cyclic.complex()
    }

    pub fn power(&self) -> usize {
        self.base.field().modulus() as usize
    }

    pub fn words(&self, n: i64) -> &[Word] {
        self.words.get(&n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn word_position(&self, w: &Word) -> Option<(i64, usize)> {
        self.pos.get(w).copied()
    }
}

/// `f^{⊗p}` as a chain map `St(A) → St(B)`; equivariant for the two cyclic
/// structures, and scalars transform by `c ↦ c^p`.
pub fn steenrod_chainmap(
    f: &ChainMap,
    st_source: &SteenrodComplex,
    st_target: &SteenrodComplex,
) -> Result<ChainMap> {
    if f.source != *st_source.base() || f.target != *st_target.base() {
        return Err(Error::ShapeMismatch(
            "chain map does not connect the given power complexes".into(),
        ));
    }
    let mats = tensor_power_map(
        st_source,
        st_target,
        &|deg| f.at(deg),
        st_source.power(),
    );
    ChainMap::new(
        st_source.complex().clone(),
        st_target.complex().clone(),
        mats,
    )
}

/// Word-wise `m_1 ⊗ … ⊗ m_p` where slot `j` applies `slot_map(degree)`.
/// All slot maps are degree-0, so no Koszul signs appear.
fn tensor_power_map(
    st_source: &SteenrodComplex,
    st_target: &SteenrodComplex,
    slot_map: &dyn Fn(i64) -> SpMat,
    p: usize,
) -> BTreeMap<i64, SpMat> {
    tensor_mixed_map(st_source, st_target, &|_, deg| slot_map(deg), p)
}

/// Like [`tensor_power_map`] but the map may differ per slot (used for the
/// mixed words of the additivity defect).
fn tensor_mixed_map(
    st_source: &SteenrodComplex,
    st_target: &SteenrodComplex,
    slot_map: &dyn Fn(usize, i64) -> SpMat,
    p: usize,
) -> BTreeMap<i64, SpMat> {
    let field = st_source.base().field();
    let mut out = BTreeMap::new();
    for (&n, list) in &st_source.words {
        let rows = st_target.words(n).len();
        let mut triplets = Vec::new();
        // cache transposed slot matrices per (slot, degree)
        let mut cols_cache: HashMap<(usize, i64), Vec<Vec<(usize, u64)>>> = HashMap::new();
        for (col, word) in list.iter().enumerate() {
            // cartesian product over slots of the nonzero column entries
            let mut partial: Vec<(Word, u64)> = vec![(Vec::new(), 1u64)];
            for (j, &(dj, ij)) in word.iter().enumerate() {
                let cols = cols_cache.entry((j, dj)).or_insert_with(|| {
                    let m = slot_map(j, dj).transpose();
                    (0..m.nrows()).map(|r| m.row(r).to_vec()).collect()
                });
                let entries = &cols[ij];
                let mut next = Vec::with_capacity(partial.len() * entries.len());
                for (w, v) in &partial {
                    for &(r, x) in entries {
                        let mut w2 = w.clone();
                        w2.push((dj, r));
                        next.push((w2, field.mul(*v, x)));
                    }
                }
                partial = next;
                if partial.is_empty() {
                    break;
                }
            }
            for (w, v) in partial {
                debug_assert_eq!(w.len(), p);
                if let Some(&(nd, npos)) = st_target.pos.get(&w) {
                    debug_assert_eq!(nd, n);
                    triplets.push((npos, col, v as i64));
                }
            }
        }
        if rows > 0 || !list.is_empty() {
            out.insert(n, SpMat::from_triplets(field, rows, list.len(), triplets));
        }
    }
    out
}

/// Lexicographically least rotation representatives of the mixed words in
/// `{f, g}^{μ_p}` (neither constant word), encoded as bit patterns with
/// `false = f`, `true = g`. The cyclic group acts freely on these
/// (`p` prime), so there are `(2^p - 2)/p` of them.
pub fn mixed_orbit_representatives(p: usize) -> Vec<Vec<bool>> {
    let mut reps = Vec::new();
    for code in 1..((1usize << p) - 1) {
        let pattern: Vec<bool> = (0..p).map(|j| code >> (p - 1 - j) & 1 == 1).collect();
        let mut is_min = true;
        for shift in 1..p {
            let rotated: Vec<bool> = (0..p).map(|j| pattern[(j + shift) % p]).collect();
            if rotated < pattern {
                is_min = false;
                break;
            }
        }
        if is_min {
            reps.push(pattern);
        }
    }
    assert_eq!(reps.len(), ((1usize << p) - 2) / p);
    reps
}

/// The additivity defect of the power construction: a non-equivariant map
/// `h` (the sum over rotation-orbit representatives of the mixed words in
/// `{f, g}^{μ_p}`) whose average `Av(h) = Σ_j σ^j h σ^{-j}` equals
/// `St(f+g) - St(f) - St(g)`. Returns `h` and the report certifying the
/// matrix identity.
pub fn additivity_defect(
    f: &ChainMap,
    g: &ChainMap,
    st_source: &SteenrodComplex,
    st_target: &SteenrodComplex,
) -> Result<(BTreeMap<i64, SpMat>, VerificationReport)> {
    if !f.is_parallel_to(g) {
        return Err(Error::NotParallel(
            "additivity defect needs parallel chain maps".into(),
        ));
    }
    let p = st_source.power();
    let field = st_source.base().field();

    let st_f = steenrod_chainmap(f, st_source, st_target)?;
    let st_g = steenrod_chainmap(g, st_source, st_target)?;
    let st_sum = steenrod_chainmap(&f.add(g), st_source, st_target)?;

    // h = Σ over orbit representatives of the mixed tensor words
    let mut h: BTreeMap<i64, SpMat> = BTreeMap::new();
    for pattern in mixed_orbit_representatives(p) {
        let mats = tensor_mixed_map(
            st_source,
            st_target,
            &|j, deg| if pattern[j] { g.at(deg) } else { f.at(deg) },
            p,
        );
        for (n, m) in mats {
            match h.entry(n) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(m);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    let s = o.get().add(&m);
                    o.insert(s);
                }
            }
        }
    }

    // Av(h) = Σ_{j<p} σ_B^j ∘ h ∘ σ_A^{-j}
    let mut report = VerificationReport::new("additivity-defect");
    let degrees: Vec<i64> = st_source.words.keys().copied().collect();
    for &n in &degrees {
        let dim_src = st_source.words(n).len();
        let dim_tgt = st_target.words(n).len();
        let h_n = h
            .get(&n)
            .cloned()
            .unwrap_or_else(|| SpMat::zero(field, dim_tgt, dim_src));
        let mut av = SpMat::zero(field, dim_tgt, dim_src);
        let sig_a = st_source.cyclic.sigma_at(n);
        let sig_b = st_target.cyclic.sigma_at(n);
        let mut sa = SpMat::identity(field, dim_src); // σ_A^{-j} accumulates σ^{p-j}
        let mut sb = SpMat::identity(field, dim_tgt);
        for _ in 0..p {
            av = av.add(&sb.mul(&h_n).mul(&sa));
            sb = sig_b.mul(&sb);
            // σ^{-1} = σ^{p-1}
            let mut inv = SpMat::identity(field, dim_src);
            for _ in 0..(p - 1) {
                inv = sig_a.mul(&inv);
            }
            sa = inv.mul(&sa);
        }
        let defect = st_sum.at(n).sub(&st_f.at(n)).sub(&st_g.at(n));
        let ok = av == defect;
        report.record(
            format!("Av(h) = St(f+g) - St(f) - St(g) in degree {n}"),
            ok,
            Some(serde_json::json!({
                "degree": n,
                "Av(h)": av.to_json(),
                "defect": defect.to_json(),
            })),
        );
    }
    Ok((h, report))
}

/// The mapping cone of `f : A → B`: `C^n = A^{n+1} ⊕ B^n` with differential
/// `(a, b) ↦ (-d a, f a + d b)`, basis ordered A-part first.
pub struct Cone {
    pub complex: Complex,
    a_dims: BTreeMap<i64, usize>,
}

impl Cone {
    pub fn new(f: &ChainMap) -> Cone {
        let field = f.source.field();
        let a = &f.source;
        let b = &f.target;
        let degrees: std::collections::BTreeSet<i64> = a
            .dims()
            .keys()
            .map(|&n| n - 1)
            .chain(b.dims().keys().copied())
            .collect();
        let mut dims = BTreeMap::new();
        let mut a_dims = BTreeMap::new();
        for &n in &degrees {
            a_dims.insert(n, a.dim(n + 1));
            dims.insert(n, a.dim(n + 1) + b.dim(n));
        }
        let mut d = BTreeMap::new();
        for &n in &degrees {
            let rows = a.dim(n + 2) + b.dim(n + 1);
            let cols = a.dim(n + 1) + b.dim(n);
            let mut triplets: Vec<(usize, usize, i64)> = Vec::new();
            let da = a.d_at(n + 1);
            for r in 0..da.nrows() {
                for &(c, v) in da.row(r) {
                    triplets.push((r, c, -(v as i64)));
                }
            }
            let fm = f.at(n + 1);
            let roff = a.dim(n + 2);
            for r in 0..fm.nrows() {
                for &(c, v) in fm.row(r) {
                    triplets.push((r + roff, c, v as i64));
                }
            }
            let db = b.d_at(n);
            let coff = a.dim(n + 1);
            for r in 0..db.nrows() {
                for &(c, v) in db.row(r) {
                    triplets.push((r + roff, c + coff, v as i64));
                }
            }
            if rows > 0 && cols > 0 {
                d.insert(n, SpMat::from_triplets(field, rows, cols, triplets));
            }
        }
        let complex = Complex::new(field, dims, d).expect("cone differential squares to zero");
        Cone { complex, a_dims }
    }

    /// Is basis element `idx` of cone degree `n` an `A`-summand?
    pub fn is_a_factor(&self, n: i64, idx: usize) -> bool {
        idx < self.a_dims.get(&n).copied().unwrap_or(0)
    }
}

/// The `(p+1)`-step equivariant filtration of `St(cone(f))` by the number
/// of `A`-summands taken in the tensor words:
/// `St(B) = F_0 ⊆ F_1 ⊆ … ⊆ F_p = St(cone(f))`.
pub struct ConeFiltration {
    pub cone: Cone,
    pub st: SteenrodComplex,
}

pub fn cone_filtration(f: &ChainMap) -> ConeFiltration {
    let cone = Cone::new(f);
    let st = steenrod_complex(&cone.complex);
    ConeFiltration { cone, st }
}

impl ConeFiltration {
    pub fn power(&self) -> usize {
        self.st.power()
    }

    fn a_count(&self, word: &Word) -> usize {
        word.iter()
            .filter(|&&(deg, idx)| self.cone.is_a_factor(deg, idx))
            .count()
    }

    /// Word indices of `F_i` in each degree (at most `i` A-factors).
    pub fn level_indices(&self, i: usize) -> BTreeMap<i64, Vec<usize>> {
        self.st
            .words
            .iter()
            .map(|(&n, list)| {
                (
                    n,
                    (0..list.len())
                        .filter(|&k| self.a_count(&list[k]) <= i)
                        .collect(),
                )
            })
            .collect()
    }

    /// Word indices with exactly `i` A-factors in each degree.
    pub fn piece_indices(&self, i: usize) -> BTreeMap<i64, Vec<usize>> {
        self.st
            .words
            .iter()
            .map(|(&n, list)| {
                (
                    n,
                    (0..list.len())
                        .filter(|&k| self.a_count(&list[k]) == i)
                        .collect(),
                )
            })
            .collect()
    }

    /// Is `F_i` stable under both `d` and `σ`?
    pub fn level_is_stable(&self, i: usize) -> bool {
        let idx = self.level_indices(i);
        for (&n, cols) in &idx {
            let col_set: std::collections::HashSet<usize> = cols.iter().copied().collect();
            let allowed_next: std::collections::HashSet<usize> = idx
                .get(&(n + 1))
                .map(|v| v.iter().copied().collect())
                .unwrap_or_default();
            let d = self.st.complex().d_at(n).transpose();
            for &c in cols {
                if d.row(c).iter().any(|&(r, _)| !allowed_next.contains(&r)) {
                    return false;
                }
            }
            let s = self.st.cyclic().sigma_at(n).transpose();
            for &c in cols {
                if s.row(c).iter().any(|&(r, _)| !col_set.contains(&r)) {
                    return false;
                }
            }
        }
        true
    }

    /// The graded piece `F_i / F_{i-1}` as a cyclic complex (quotient
    /// differential = block of `d` on the exact-`i` words).
    pub fn graded_piece(&self, i: usize) -> CyclicComplex {
        let field = self.st.base().field();
        let idx = self.piece_indices(i);
        let dims: BTreeMap<i64, usize> = idx.iter().map(|(&n, v)| (n, v.len())).collect();
        let mut d = BTreeMap::new();
        let mut sigma = BTreeMap::new();
        for (&n, cols) in &idx {
            let rows_next: Vec<usize> = idx.get(&(n + 1)).cloned().unwrap_or_default();
            d.insert(n, self.st.complex().d_at(n).submatrix(&rows_next, cols));
            sigma.insert(n, self.st.cyclic().sigma_at(n).submatrix(cols, cols));
        }
        let complex = Complex::new(field, dims, d).expect("graded piece is a complex");
        CyclicComplex::new(complex, sigma).expect("graded piece cyclic structure")
    }
}

/// Check that two cyclic complexes agree under a degreewise bijection of
/// basis elements: `perm` maps (degree, index of lhs) to index of rhs.
pub fn cyclic_isomorphic_under(
    lhs: &CyclicComplex,
    rhs: &CyclicComplex,
    perm: &BTreeMap<i64, Vec<usize>>,
) -> bool {
    let field = lhs.field();
    for (&n, map) in perm {
        if lhs.dim(n) != map.len() || rhs.dim(n) != map.len() {
            return false;
        }
    }
    // P_n : lhs^n → rhs^n permutation matrices
    let pmat = |n: i64| -> SpMat {
        let map = perm.get(&n).cloned().unwrap_or_default();
        SpMat::from_triplets(
            field,
            map.len(),
            map.len(),
            map.iter().enumerate().map(|(i, &j)| (j, i, 1i64)),
        )
    };
    for (&n, _) in perm {
        let p_n = pmat(n);
        let p_next = pmat(n + 1);
        if p_next.mul(&lhs.d_at(n)) != rhs.d_at(n).mul(&p_n) {
            return false;
        }
        if p_n.mul(&lhs.sigma_at(n)) != rhs.sigma_at(n).mul(&p_n) {
            return false;
        }
    }
    true
}

/// `Σ^k C`: degrees shift down by `k`, differential picks up `(-1)^k`.
pub fn suspend(c: &Complex, k: u32) -> Complex {
    let field = c.field();
    let dims: BTreeMap<i64, usize> = c.dims().iter().map(|(&n, &v)| (n - k as i64, v)).collect();
    let sign = parity_sign(k as i64);
    let mut d = BTreeMap::new();
    for (&n, _) in c.dims() {
        let m = c.d_at(n);
        if !m.is_zero() {
            let m = if sign == 1 { m } else { m.neg() };
            d.insert(n - k as i64, m);
        }
    }
    Complex::new(field, dims, d).expect("suspension is a complex")
}
