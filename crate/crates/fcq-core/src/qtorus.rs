//! The quantum torus `Z[q, q⁻¹]⟨x^±, y^±⟩ / (yx = qxy)` and the
//! `K`-theoretic rank-1 algebras `KA_q(r)` inside it.
//!
//! Normal form keeps `x` before `y`: `y^b x^a = q^{ab} x^a y^b`. The
//! subalgebra `KA_q(r)` has `Z[y^±, q^±]`-basis
//!
//! ```text
//! …, x^-2, x^-1, 1, (∏_{i=0}^{r-1}(1 - y^r q^{-i}))x, (∏_{i=0}^{2r-1}(1 - y^r q^{-i}))x^2, …
//! ```
//!
//! At a primitive `n`-th root of unity (working mod `Φ_n(q)`) the algebra
//! acquires a large center: `x ↦ x^n`, `y ↦ y^n` and
//! `(1-y^r)^r x ↦ (∏_{i=0}^{nr-1}(1 - y^r q^{-i}))x^n` land in it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclotomic::CyclotomicRing;
use crate::poly::{Poly, PolyJson};
use crate::weyl::format_coeff_mono;
use crate::{Error, Result};

const QVAR: &[&str] = &["q"];

/// An element `Σ c_{a,b}(q) x^a y^b` with Laurent coefficients over `Z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QTorusElement {
    terms: BTreeMap<(i64, i64), Poly>,
}

impl QTorusElement {
    pub fn zero() -> Self {
        QTorusElement {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::term(0, 0, Poly::one(QVAR, None))
    }

    pub fn x_pow(a: i64) -> Self {
        Self::term(a, 0, Poly::one(QVAR, None))
    }

    pub fn y_pow(b: i64) -> Self {
        Self::term(0, b, Poly::one(QVAR, None))
    }

    pub fn q_pow(k: i64) -> Self {
        Self::term(0, 0, Poly::var_pow(QVAR, None, "q", k))
    }

    /// `c(q) · x^a y^b`.
    pub fn term(a: i64, b: i64, c: Poly) -> Self {
        assert_eq!(c.vars(), QVAR);
        assert_eq!(c.modulus(), None);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        QTorusElement { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: i64, b: i64) -> Poly {
        self.terms
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| Poly::zero(QVAR, None))
    }

    fn add_to(&mut self, key: (i64, i64), c: Poly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    pub fn add(&self, other: &QTorusElement) -> QTorusElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_to(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &QTorusElement) -> QTorusElement {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_to(*k, c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Poly) -> QTorusElement {
        let mut out = QTorusElement::zero();
        for (k, c0) in &self.terms {
            out.add_to(*k, c0.mul(c));
        }
        out
    }

    /// The substitution `y ↦ q^k y`: multiplies the `(a, b)` coefficient by
    /// `q^{kb}`. This is the commutation oracle: `x^n g = g|_{y ↦ q^{-n} y} x^n`.
    pub fn twist_y(&self, k: i64) -> QTorusElement {
        let mut out = QTorusElement::zero();
        for (&(a, b), c) in &self.terms {
            out.add_to((a, b), c.mul(&Poly::var_pow(QVAR, None, "q", k * b)));
        }
        out
    }

    /// Reduce every coefficient mod `Φ_n(q)`; zero iff the element vanishes
    /// at a primitive `n`-th root of unity.
    pub fn reduce_mod_phi(&self, ring: &CyclotomicRing) -> Result<QTorusElement> {
        let mut out = QTorusElement::zero();
        for (&k, c) in &self.terms {
            out.add_to(k, ring.reduce(c)?);
        }
        Ok(out)
    }

    pub fn is_zero_mod_phi(&self, ring: &CyclotomicRing) -> Result<bool> {
        Ok(self.reduce_mod_phi(ring)?.is_zero())
    }
}

/// Normal-form product via `y^b x^a = q^{ab} x^a y^b`.
pub fn qtorus_mul(u: &QTorusElement, v: &QTorusElement) -> QTorusElement {
    let mut out = QTorusElement::zero();
    for (&(a1, b1), c1) in &u.terms {
        for (&(a2, b2), c2) in &v.terms {
            let c = c1
                .mul(c2)
                .mul(&Poly::var_pow(QVAR, None, "q", b1 * a2));
            out.add_to((a1 + a2, b1 + b2), c);
        }
    }
    out
}

pub fn qtorus_commutator(u: &QTorusElement, v: &QTorusElement) -> QTorusElement {
    qtorus_mul(u, v).sub(&qtorus_mul(v, u))
}

/// The basis element `f_m` of `KA_q(r)`:
/// `(∏_{i=0}^{mr-1}(1 - y^r q^{-i})) x^m` for `m ≥ 1`, `x^m` for `m ≤ 0`.
pub fn k_basis(r: u32, m: i64) -> QTorusElement {
    let mut g = QTorusElement::one();
    if m >= 1 {
        for i in 0..(m * r as i64) {
            let factor = QTorusElement::one().sub(&QTorusElement::term(
                0,
                r as i64,
                Poly::var_pow(QVAR, None, "q", -i),
            ));
            g = qtorus_mul(&g, &factor);
        }
    }
    qtorus_mul(&g, &QTorusElement::x_pow(m))
}

/// Generator symbols of the commutative algebra `KA = KA_q|_{q=1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KGenerator {
    /// the class of `x^{-1}`
    XInv,
    /// the class of `(1 - y^r)^r x`, i.e. of the basis element `f_1`
    F1,
    /// the class of `y`
    Y,
}

impl KGenerator {
    pub fn element(self, r: u32) -> QTorusElement {
        match self {
            KGenerator::XInv => QTorusElement::x_pow(-1),
            KGenerator::F1 => k_basis(r, 1),
            KGenerator::Y => QTorusElement::y_pow(1),
        }
    }
}

/// The root-of-unity central map on generators:
///
/// ```text
/// x^{-1} ↦ x^{-n},   y ↦ y^n,   (1-y^r)^r x ↦ (∏_{i=0}^{nr-1}(1 - y^r q^{-i})) x^n
/// ```
///
/// whose images are central in `KA_ζ(r) = KA_q(r)/Φ_n(q)`.
pub fn k_central_map(r: u32, n: u32, generator: KGenerator) -> Result<QTorusElement> {
    if n == 0 {
        return Err(Error::NotPositive(0));
    }
    Ok(match generator {
        KGenerator::XInv => QTorusElement::x_pow(-(n as i64)),
        KGenerator::Y => QTorusElement::y_pow(n as i64),
        KGenerator::F1 => k_basis(r, n as i64),
    })
}

/// The `n`-th Adams operation `ψ^n` on the representation ring
/// `Z[y, y⁻¹]`: `Σ c_k y^k ↦ Σ c_k y^{nk}`.
pub fn adams(f: &Poly, n: u32) -> Result<Poly> {
    if n == 0 {
        return Err(Error::NotPositive(0));
    }
    if f.vars() != ["y".to_string()] {
        return Err(Error::VariableMismatch(
            f.vars().to_vec(),
            vec!["y".into()],
        ));
    }
    Ok(f.dilate_var("y", n as i64))
}

impl fmt::Display for QTorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), c) in self.terms.iter() {
            let mono = {
                let mut parts: Vec<String> = Vec::new();
                if a == 1 {
                    parts.push("x".into());
                } else if a != 0 {
                    parts.push(format!("x^{a}"));
                }
                if b == 1 {
                    parts.push("y".into());
                } else if b != 0 {
                    parts.push(format!("y^{b}"));
                }
                parts.join("*")
            };
            let (sign, body) = format_coeff_mono(&c.to_string(), &mono, c.num_terms());
            if first {
                if sign {
                    write!(f, "-")?;
                }
                write!(f, "{body}")?;
                first = false;
            } else if sign {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
        }
        Ok(())
    }
}

// ---- JSON form ----

#[derive(Serialize, Deserialize)]
pub struct QTorusJson {
    pub alg: String,
    pub coeff_ring: crate::weyl::CoeffRingJson,
    pub terms: Vec<QTorusTermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct QTorusTermJson {
    pub x: i64,
    pub y: i64,
    pub c: PolyJson,
}

impl QTorusElement {
    pub fn to_json(&self) -> QTorusJson {
        QTorusJson {
            alg: "qtorus".into(),
            coeff_ring: crate::weyl::CoeffRingJson {
                base: "Z".into(),
                p: None,
                vars: vec!["q".into()],
            },
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| QTorusTermJson {
                    x: a,
                    y: b,
                    c: c.to_json(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &QTorusJson) -> Result<QTorusElement> {
        if json.alg != "qtorus" {
            return Err(Error::Json(format!(
                "expected alg \"qtorus\", got {:?}",
                json.alg
            )));
        }
        let mut out = QTorusElement::zero();
        for t in &json.terms {
            let c = Poly::from_json(&t.c, None)?;
            if c.vars() != QVAR {
                return Err(Error::Json(format!(
                    "qtorus coefficient must be Laurent in q, got vars {:?}",
                    c.vars()
                )));
            }
            out.add_to((t.x, t.y), c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x() -> QTorusElement {
        QTorusElement::x_pow(1)
    }
    fn y() -> QTorusElement {
        QTorusElement::y_pow(1)
    }

    #[test]
    fn defining_relation() {
        // y·x = q·x·y
        let lhs = qtorus_mul(&y(), &x());
        let expect = QTorusElement::term(1, 1, Poly::var(QVAR, None, "q"));
        assert_eq!(lhs, expect);
        assert_eq!(lhs.to_string(), "q*x*y");
        // x·y is already normal
        let lhs = qtorus_mul(&x(), &y());
        assert_eq!(lhs, QTorusElement::term(1, 1, Poly::one(QVAR, None)));
    }

    #[test]
    fn square_of_f1() {
        // (1-y)x·(1-y)x = (1-y)(1-q⁻¹y)x², which is f_2 at r = 1
        let f1 = k_basis(1, 1);
        let prod = qtorus_mul(&f1, &f1);
        assert_eq!(prod, k_basis(1, 2));
        // and explicitly matches (1-y)(1-q⁻¹y)x²
        let one = QTorusElement::one();
        let t1 = one.sub(&y());
        let t2 = one.sub(&QTorusElement::term(0, 1, Poly::var_pow(QVAR, None, "q", -1)));
        let expect = qtorus_mul(&qtorus_mul(&t1, &t2), &QTorusElement::x_pow(2));
        assert_eq!(prod, expect);
    }

    #[test]
    fn k_basis_examples() {
        assert_eq!(k_basis(1, -1), QTorusElement::x_pow(-1));
        assert_eq!(k_basis(2, 0), QTorusElement::one());
        // r=2, m=1 → (1-y²)(1-y²q⁻¹)x
        let one = QTorusElement::one();
        let t1 = one.sub(&QTorusElement::y_pow(2));
        let t2 = one.sub(&QTorusElement::term(0, 2, Poly::var_pow(QVAR, None, "q", -1)));
        let expect = qtorus_mul(&qtorus_mul(&t1, &t2), &x());
        assert_eq!(k_basis(2, 1), expect);
    }

    #[test]
    fn chain_products() {
        // f_n f_m = f_{n+m} along each chain (same-sign indices)
        for r in 1..=2u32 {
            for n in 0..=3i64 {
                for m in 0..=3i64 {
                    assert_eq!(
                        qtorus_mul(&k_basis(r, n), &k_basis(r, m)),
                        k_basis(r, n + m),
                        "r={r} n={n} m={m}"
                    );
                    assert_eq!(
                        qtorus_mul(&k_basis(r, -n), &k_basis(r, -m)),
                        k_basis(r, -n - m),
                        "r={r} n={} m={}",
                        -n,
                        -m
                    );
                }
            }
        }
    }

    #[test]
    fn mixed_sign_collapse() {
        // f_1 f_{-1} = ∏_{i=0}^{r-1}(1 - y^r q^{-i}) · f_0  (not f_0 itself)
        for r in 1..=2u32 {
            let prod = qtorus_mul(&k_basis(r, 1), &k_basis(r, -1));
            let mut expect = QTorusElement::one();
            for i in 0..r as i64 {
                let factor = QTorusElement::one().sub(&QTorusElement::term(
                    0,
                    r as i64,
                    Poly::var_pow(QVAR, None, "q", -i),
                ));
                expect = qtorus_mul(&expect, &factor);
            }
            assert_eq!(prod, expect, "r={r}");
        }
    }

    #[test]
    fn commutation_oracle() {
        // x^n g(y) = g(q^{-n} y) x^n
        let g = QTorusElement::one()
            .sub(&QTorusElement::y_pow(2))
            .add(&QTorusElement::term(0, -1, Poly::var(QVAR, None, "q")));
        for n in [-2i64, 1, 3] {
            let lhs = qtorus_mul(&QTorusElement::x_pow(n), &g);
            let rhs = qtorus_mul(&g.twist_y(-n), &QTorusElement::x_pow(n));
            assert_eq!(lhs, rhs, "n={n}");
        }
    }

    #[test]
    fn central_map_and_cyclotomic_identity() {
        // n=1 is the identity on generators
        assert_eq!(
            k_central_map(1, 1, KGenerator::XInv).unwrap(),
            QTorusElement::x_pow(-1)
        );
        assert_eq!(k_central_map(1, 1, KGenerator::Y).unwrap(), y());
        assert_eq!(k_central_map(1, 1, KGenerator::F1).unwrap(), k_basis(1, 1));

        // (1-y)(1-y q⁻¹) ≡ 1-y² mod Φ_2, and ∏_{i<3}(1-y q⁻ⁱ) ≡ 1-y³ mod Φ_3
        for (n, r) in [(2u32, 1u32), (3, 1), (4, 1), (6, 2)] {
            let ring = CyclotomicRing::new(n).unwrap();
            let image = k_central_map(r, n, KGenerator::F1).unwrap();
            let dilated = {
                // (1 - y^{nr})^r x^n
                let mut acc = QTorusElement::one();
                let base = QTorusElement::one()
                    .sub(&QTorusElement::y_pow((n * r) as i64));
                for _ in 0..r {
                    acc = qtorus_mul(&acc, &base);
                }
                qtorus_mul(&acc, &QTorusElement::x_pow(n as i64))
            };
            assert!(image
                .sub(&dilated)
                .is_zero_mod_phi(&ring)
                .unwrap(), "n={n} r={r}");
        }
    }

    #[test]
    fn centrality_mod_phi() {
        for n in [2u32, 3, 4, 6] {
            let ring = CyclotomicRing::new(n).unwrap();
            for r in 1..=2u32 {
                let gens = [
                    KGenerator::XInv.element(r),
                    KGenerator::F1.element(r),
                    KGenerator::Y.element(r),
                    QTorusElement::q_pow(1),
                ];
                for sym in [KGenerator::XInv, KGenerator::F1, KGenerator::Y] {
                    let img = k_central_map(r, n, sym).unwrap();
                    for g in &gens {
                        let c = qtorus_commutator(&img, g);
                        assert!(
                            c.is_zero_mod_phi(&ring).unwrap(),
                            "[{sym:?} image, gen] ≠ 0 mod Φ_{n} (r={r})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn central_images_independent() {
        // images of distinct basis classes stay linearly independent: they
        // live in distinct x-degrees
        let n = 3u32;
        for r in 1..=2u32 {
            let mut degrees = std::collections::HashSet::new();
            for m in -2i64..=2 {
                let img = if m >= 1 {
                    k_basis(r, m * n as i64)
                } else {
                    QTorusElement::x_pow(m * n as i64)
                };
                let xdeg: Vec<i64> = img.terms().map(|(&(a, _), _)| a).collect();
                assert!(xdeg.iter().all(|&a| a == xdeg[0]));
                assert!(degrees.insert(xdeg[0]), "x-degree collision at m={m}");
            }
        }
    }

    #[test]
    fn adams_operations() {
        let f = Poly::var_pow(&["y"], None, "y", 1).add(&Poly::var_pow(&["y"], None, "y", -1));
        let a2 = adams(&f, 2).unwrap();
        let expect =
            Poly::var_pow(&["y"], None, "y", 2).add(&Poly::var_pow(&["y"], None, "y", -2));
        assert_eq!(a2, expect);
        assert_eq!(adams(&f, 1).unwrap(), f);
        // ψ^n ∘ ψ^m = ψ^{nm}
        for n in 1..=4u32 {
            for m in 1..=4u32 {
                assert_eq!(
                    adams(&adams(&f, m).unwrap(), n).unwrap(),
                    adams(&f, n * m).unwrap()
                );
            }
        }
        assert!(adams(&f, 0).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn associative(a in small_qt(), b in small_qt(), c in small_qt()) {
            prop_assert_eq!(
                qtorus_mul(&qtorus_mul(&a, &b), &c),
                qtorus_mul(&a, &qtorus_mul(&b, &c))
            );
        }

        #[test]
        fn adams_ring_hom(f in small_laurent(), g in small_laurent(), n in 1u32..5) {
            prop_assert_eq!(
                adams(&f.mul(&g), n).unwrap(),
                adams(&f, n).unwrap().mul(&adams(&g, n).unwrap())
            );
            prop_assert_eq!(
                adams(&f.add(&g), n).unwrap(),
                adams(&f, n).unwrap().add(&adams(&g, n).unwrap())
            );
        }
    }

    prop_compose! {
        fn small_qt()(terms in prop::collection::vec(((-2i64..3, -2i64..3), -2i64..3, -4i64..5), 0..4)) -> QTorusElement {
            let mut u = QTorusElement::zero();
            for ((a, b), qpow, c) in terms {
                u.add_to((a, b), Poly::var_pow(QVAR, None, "q", qpow).mul_scalar(c));
            }
            u
        }
    }

    prop_compose! {
        fn small_laurent()(terms in prop::collection::vec((-3i64..4, -4i64..5), 0..5)) -> Poly {
            let mut p = Poly::zero(&["y"], None);
            for (e, c) in terms {
                p = p.add(&Poly::monomial(&["y"], None, &[e], c));
            }
            p
        }
    }
}
