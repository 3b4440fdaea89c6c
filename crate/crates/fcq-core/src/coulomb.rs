//! The rank-1 quantum Coulomb branches `A_ħ(r)`.
//!
//! `A_ħ(r)` sits inside the Weyl algebra with `F_p[ħ, w]`-basis (`w = x∂`)
//!
//! ```text
//! …, x^-2, x^-1, 1, (∏_{i=1}^{r}(rw - iħ))x, (∏_{i=1}^{2r}(rw - iħ))x^2, …
//! ```
//!
//! and satisfies `e_n e_m = e_{n+m}` along each basis chain. Products are
//! computed by lifting to the integral Weyl algebra over `Z[ħ]`,
//! normal-ordering, re-expressing in the basis over `Z[ħ, w]`, and only then
//! reducing mod `p` — this keeps the degenerate `p | r` case (where the
//! mod-`p` Weyl embedding is not faithful) uniform.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::poly::{Poly, PolyJson};
use crate::scalar::PrimeField;
use crate::weyl::{self, WeylElement};
use crate::{Error, Result};

const WHVARS: &[&str] = &["w", "h"];

/// `∏_{i=1}^{nr}(rw - iħ)` over the requested ring (`1` for `n ≤ 0`).
pub fn basis_poly(r: u32, n: i64, modulus: Option<u64>) -> Poly {
    let w = Poly::var(WHVARS, modulus, "w");
    let h = Poly::var(WHVARS, modulus, "h");
    let mut g = Poly::one(WHVARS, modulus);
    if n >= 1 {
        for i in 1..=(n * r as i64) {
            g = g.mul(&w.mul_scalar(r as i64).sub(&h.mul_scalar(i)));
        }
    }
    g
}

/// The basis element `e_n` of `A_ħ(r)` as an integral Weyl element:
/// `(∏_{i=1}^{nr}(rw - iħ)) x^n` for `n ≥ 1`, `x^n` for `n ≤ 0`.
pub fn coulomb_basis(r: u32, n: i64) -> WeylElement {
    let g = basis_poly(r, n, None);
    weyl::weyl_mul(
        &weyl::from_wh_poly(&g, None),
        &WeylElement::x_pow(None, n),
    )
}

/// An element `Σ_n g_n(w, ħ) e_n` of `A_ħ(r)` with coefficients in
/// `F_p[w, ħ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoulombElement {
    r: u32,
    p: u64,
    terms: BTreeMap<i64, Poly>,
}

impl CoulombElement {
    pub fn zero(r: u32, p: u64) -> Self {
        CoulombElement {
            r,
            p,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(r: u32, p: u64) -> Self {
        Self::basis(r, p, 0)
    }

    /// `e_n`.
    pub fn basis(r: u32, p: u64, n: i64) -> Self {
        Self::from_coeff(r, p, n, Poly::one(WHVARS, Some(p)))
    }

    /// `g(w, ħ) · e_n`.
    pub fn from_coeff(r: u32, p: u64, n: i64, g: Poly) -> Self {
        assert_eq!(g.vars(), WHVARS);
        assert_eq!(g.modulus(), Some(p));
        let mut terms = BTreeMap::new();
        if !g.is_zero() {
            terms.insert(n, g);
        }
        CoulombElement { r, p, terms }
    }

    /// The distinguished commuting element `w = x∂`.
    pub fn w_element(r: u32, p: u64) -> Self {
        Self::from_coeff(r, p, 0, Poly::var(WHVARS, Some(p), "w"))
    }

    pub fn hbar(r: u32, p: u64) -> Self {
        Self::from_coeff(r, p, 0, Poly::var(WHVARS, Some(p), "h"))
    }

    pub fn params(&self) -> (u32, u64) {
        (self.r, self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&i64, &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, n: i64) -> Poly {
        self.terms
            .get(&n)
            .cloned()
            .unwrap_or_else(|| Poly::zero(WHVARS, Some(self.p)))
    }

    fn add_to(&mut self, n: i64, g: Poly) {
        if g.is_zero() {
            return;
        }
        match self.terms.entry(n) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(g);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().add(&g);
                if s.is_zero() {
                    o.remove();
                } else {
                    o.insert(s);
                }
            }
        }
    }

    fn assert_same(&self, other: &CoulombElement) {
        assert_eq!(
            (self.r, self.p),
            (other.r, other.p),
            "Coulomb parameters differ"
        );
    }

    pub fn add(&self, other: &CoulombElement) -> CoulombElement {
        self.assert_same(other);
        let mut out = self.clone();
        for (&n, g) in &other.terms {
            out.add_to(n, g.clone());
        }
        out
    }

    pub fn sub(&self, other: &CoulombElement) -> CoulombElement {
        self.assert_same(other);
        let mut out = self.clone();
        for (&n, g) in &other.terms {
            out.add_to(n, g.neg());
        }
        out
    }

    pub fn scale(&self, c: i64) -> CoulombElement {
        let mut out = CoulombElement::zero(self.r, self.p);
        for (&n, g) in &self.terms {
            out.add_to(n, g.mul_scalar(c));
        }
        out
    }

    /// Image in the mod-`p` Weyl algebra (faithful exactly when `p ∤ r`).
    pub fn to_weyl_mod_p(&self) -> WeylElement {
        self.lift_to_weyl().to_mod(self.p)
    }

    /// Integral Weyl lift, coefficients lifted to `[0, p) ⊂ Z`.
    pub fn lift_to_weyl(&self) -> WeylElement {
        let mut wx: BTreeMap<i64, Poly> = BTreeMap::new();
        for (&n, g) in &self.terms {
            let lifted = g.lift_to_int().mul(&basis_poly(self.r, n, None));
            let entry = wx.entry(n).or_insert_with(|| Poly::zero(WHVARS, None));
            *entry = entry.add(&lifted);
        }
        weyl::from_wx_form(&wx, None)
    }

    /// Kill `ħ`, landing in the commutative algebra `A(r) = A_ħ(r)/ħ`.
    pub fn set_hbar_zero(&self) -> CoulombElement {
        let zero = Poly::zero(WHVARS, Some(self.p));
        let mut out = CoulombElement::zero(self.r, self.p);
        for (&n, g) in &self.terms {
            out.add_to(n, g.subst("h", &zero));
        }
        out
    }

    pub fn pow(&self, k: u32) -> CoulombElement {
        let mut acc = CoulombElement::one(self.r, self.p);
        for _ in 0..k {
            acc = coulomb_mul(&acc, self);
        }
        acc
    }
}

/// Product in `A_ħ(r)`: lift to `Z[ħ]⟨x^±, ∂⟩`, normal-order, re-express in
/// the basis, reduce mod `p`. A failed basis re-expression means the inputs
/// were not in the algebra (impossible for well-formed elements), so it is
/// surfaced as a hard error.
pub fn coulomb_mul(u: &CoulombElement, v: &CoulombElement) -> CoulombElement {
    u.assert_same(v);
    try_coulomb_mul(u, v).expect("Coulomb product left the basis span")
}

fn try_coulomb_mul(u: &CoulombElement, v: &CoulombElement) -> Result<CoulombElement> {
    let (r, p) = (u.r, u.p);
    let prod = weyl::weyl_mul(&u.lift_to_weyl(), &v.lift_to_weyl());
    let wx = weyl::to_wx_form(&prod);
    let mut out = CoulombElement::zero(r, p);
    for (n, g) in wx {
        let coeff = if n >= 1 {
            let b = basis_poly(r, n, None);
            g.div_exact(&b).ok_or_else(|| Error::BasisDivision {
                n,
                detail: format!("{g} is not divisible by {b} over Z[w, h]"),
            })?
        } else {
            g
        };
        out.add_to(n, coeff.to_mod(p));
    }
    Ok(out)
}

pub fn coulomb_commutator(u: &CoulombElement, v: &CoulombElement) -> CoulombElement {
    coulomb_mul(u, v).sub(&coulomb_mul(v, u))
}

/// Generator symbols of the commutative algebra
/// `A(r) = F_p[ē_{-1}, ē_1, w] / (ē_1 ē_{-1} = (rw)^r)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoulombGenerator {
    /// the class of `x^{-1}`
    XInv,
    /// the class of `(r x y)^r x`, i.e. of the basis element `e_1`
    E1,
    /// the class of `x y`
    W,
}

impl CoulombGenerator {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "x-inv" | "xinv" | "e(-1)" => Ok(CoulombGenerator::XInv),
            "e1" | "e(1)" => Ok(CoulombGenerator::E1),
            "w" => Ok(CoulombGenerator::W),
            other => Err(Error::UnknownSymbol(other.to_string())),
        }
    }

    /// The generator itself, as an element of `A_ħ(r)`.
    pub fn element(self, r: u32, p: u64) -> CoulombElement {
        match self {
            CoulombGenerator::XInv => CoulombElement::basis(r, p, -1),
            CoulombGenerator::E1 => CoulombElement::basis(r, p, 1),
            CoulombGenerator::W => CoulombElement::w_element(r, p),
        }
    }
}

/// The Frobenius-constant structure `F_ħ : A(r) → Z(A_ħ(r))` on generators:
///
/// ```text
/// x^{-1} ↦ x^{-p},   e_1-class ↦ e_p,   w ↦ ∏_{i=0}^{p-1}(w - iħ)
/// ```
///
/// extended multiplicatively to monomials by [`coulomb_frobenius_monomial`].
pub fn coulomb_frobenius(r: u32, p: u64, generator: CoulombGenerator) -> Result<CoulombElement> {
    PrimeField::new(p)?;
    Ok(match generator {
        CoulombGenerator::XInv => CoulombElement::basis(r, p, -(p as i64)),
        CoulombGenerator::E1 => CoulombElement::basis(r, p, p as i64),
        CoulombGenerator::W => {
            let w = Poly::var(WHVARS, Some(p), "w");
            let h = Poly::var(WHVARS, Some(p), "h");
            let mut g = Poly::one(WHVARS, Some(p));
            for i in 0..p {
                g = g.mul(&w.sub(&h.mul_scalar(i as i64)));
            }
            CoulombElement::from_coeff(r, p, 0, g)
        }
    })
}

/// `F_ħ(ē_{-1}^a ē_1^b w^c)`, the multiplicative extension of the generator
/// images.
pub fn coulomb_frobenius_monomial(
    r: u32,
    p: u64,
    a: u32,
    b: u32,
    c: u32,
) -> Result<CoulombElement> {
    let fx = coulomb_frobenius(r, p, CoulombGenerator::XInv)?;
    let fe = coulomb_frobenius(r, p, CoulombGenerator::E1)?;
    let fw = coulomb_frobenius(r, p, CoulombGenerator::W)?;
    let mut acc = CoulombElement::one(r, p);
    for _ in 0..a {
        acc = coulomb_mul(&acc, &fx);
    }
    for _ in 0..b {
        acc = coulomb_mul(&acc, &fe);
    }
    for _ in 0..c {
        acc = coulomb_mul(&acc, &fw);
    }
    Ok(acc)
}

/// Decide membership of a mod-`p` Weyl element in `A_ħ(r)`: write it as
/// `Σ_n G_n(w, ħ) x^n` and require `∏_{i=1}^{nr}(rw - iħ) | G_n` for every
/// `n ≥ 1`. Only valid for `p ∤ r`, where the embedding is faithful.
pub fn coulomb_membership(u: &WeylElement, r: u32) -> Result<CoulombElement> {
    let p = u
        .modulus()
        .ok_or_else(|| Error::RingMismatch("Z".into(), "F_p".into()))?;
    if r as u64 % p == 0 {
        return Err(Error::Eval(format!(
            "membership test requires p to not divide r (got p = {p}, r = {r})"
        )));
    }
    let wx = weyl::to_wx_form(u);
    let mut out = CoulombElement::zero(r, p);
    for (n, g) in wx {
        let coeff = if n >= 1 {
            let b = basis_poly(r, n, Some(p));
            match g.div_exact(&b) {
                Some(q) => q,
                None => return Err(Error::NotInSubalgebra(n)),
            }
        } else {
            g
        };
        out.add_to(n, coeff);
    }
    Ok(out)
}

impl fmt::Display for CoulombElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&n, g) in self.terms.iter().rev() {
            let mono = format!("e({n})");
            let (sign, body) = weyl::format_coeff_mono(&g.to_string(), &mono, g.num_terms());
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
pub struct CoulombJson {
    pub alg: String,
    pub r: u32,
    pub p: u64,
    pub terms: Vec<CoulombTermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct CoulombTermJson {
    pub n: i64,
    pub c: PolyJson,
}

impl CoulombElement {
    pub fn to_json(&self) -> CoulombJson {
        CoulombJson {
            alg: "coulomb".into(),
            r: self.r,
            p: self.p,
            terms: self
                .terms
                .iter()
                .map(|(&n, g)| CoulombTermJson { n, c: g.to_json() })
                .collect(),
        }
    }
}
