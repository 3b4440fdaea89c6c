//! Normal-form arithmetic in the Weyl algebra `R[ħ]⟨x^±, ∂⟩ / ([∂, x] = ħ)`
//! with `R ∈ {Z, F_p}`.
//!
//! Elements are finite sums `Σ c_{a,b}(ħ) · x^a ∂^b` with `a ∈ Z`,
//! `b ≥ 0`; the normal form keeps every `x` left of every `∂`, and `ħ` is
//! central. The single rewrite needed is
//! `∂^b x^a = Σ_k C(b,k) (a)_k ħ^k x^{a-k} ∂^{b-k}`
//! with `(a)_k` the falling factorial, valid for all integers `a`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::poly::{Poly, PolyJson};
use crate::{Error, Result};

const HVAR: &[&str] = &["h"];
const WHVARS: &[&str] = &["w", "h"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeylElement {
    modulus: Option<u64>,
    terms: BTreeMap<(i64, u32), Poly>, // (x power, ∂ power) → coefficient in R[ħ]
}

impl WeylElement {
    pub fn zero(modulus: Option<u64>) -> Self {
        WeylElement {
            modulus,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(modulus: Option<u64>) -> Self {
        Self::term(modulus, 0, 0, Poly::one(HVAR, modulus))
    }

    pub fn x_pow(modulus: Option<u64>, a: i64) -> Self {
        Self::term(modulus, a, 0, Poly::one(HVAR, modulus))
    }

    pub fn d_pow(modulus: Option<u64>, b: u32) -> Self {
        Self::term(modulus, 0, b, Poly::one(HVAR, modulus))
    }

    pub fn hbar(modulus: Option<u64>) -> Self {
        Self::term(modulus, 0, 0, Poly::var(HVAR, modulus, "h"))
    }

    /// `coeff(ħ) · x^a ∂^b`.
    pub fn term(modulus: Option<u64>, a: i64, b: u32, coeff: Poly) -> Self {
        assert_eq!(coeff.vars(), HVAR);
        assert_eq!(coeff.modulus(), modulus);
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert((a, b), coeff);
        }
        WeylElement { modulus, terms }
    }

    pub fn modulus(&self) -> Option<u64> {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, u32), &Poly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, a: i64, b: u32) -> Poly {
        self.terms
            .get(&(a, b))
            .cloned()
            .unwrap_or_else(|| Poly::zero(HVAR, self.modulus))
    }

    fn add_to(&mut self, key: (i64, u32), c: Poly) {
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

    pub fn check_same_ring(&self, other: &WeylElement) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::RingMismatch(
                format!("{:?}", self.modulus),
                format!("{:?}", other.modulus),
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &WeylElement) -> WeylElement {
        assert_eq!(self.modulus, other.modulus, "coefficient rings differ");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_to(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &WeylElement) -> WeylElement {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> WeylElement {
        let mut out = WeylElement::zero(self.modulus);
        for (k, c) in &self.terms {
            out.add_to(*k, c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Poly) -> WeylElement {
        let mut out = WeylElement::zero(self.modulus);
        for (k, c0) in &self.terms {
            out.add_to(*k, c0.mul(c));
        }
        out
    }

    pub fn scale_int(&self, c: i64) -> WeylElement {
        self.scale(&Poly::constant(HVAR, self.modulus, c))
    }

    pub fn to_mod(&self, p: u64) -> WeylElement {
        let mut out = WeylElement::zero(Some(p));
        for (k, c) in &self.terms {
            out.add_to(*k, c.to_mod(p));
        }
        out
    }
}

/// Falling factorial `a (a-1) ⋯ (a-k+1)` over `Z`.
fn falling(a: i64, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k as i64 {
        acc *= BigInt::from(a - i);
    }
    acc
}

fn binomial(n: u32, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Normal-form product.
pub fn weyl_mul(u: &WeylElement, v: &WeylElement) -> WeylElement {
    assert_eq!(u.modulus, v.modulus, "coefficient rings differ");
    let modulus = u.modulus;
    let mut out = WeylElement::zero(modulus);
    for (&(a1, b1), c1) in &u.terms {
        for (&(a2, b2), c2) in &v.terms {
            // x^{a1} ∂^{b1} x^{a2} ∂^{b2}
            let c = c1.mul(c2);
            for k in 0..=b1 {
                let coeff = binomial(b1, k) * falling(a2, k);
                if coeff.is_zero() {
                    continue;
                }
                let hk = Poly::var_pow(HVAR, modulus, "h", k as i64).mul_scalar(coeff);
                out.add_to((a1 + a2 - k as i64, b1 + b2 - k), c.mul(&hk));
            }
        }
    }
    out
}

/// `[u, v] = uv - vu`.
pub fn weyl_commutator(u: &WeylElement, v: &WeylElement) -> WeylElement {
    weyl_mul(u, v).sub(&weyl_mul(v, u))
}

/// The Frobenius-constant image of the monomial `x^a y^b`: the central
/// element `x^{pa} ∂^{pb}` of the mod-`p` Weyl algebra.
pub fn frobenius_weyl(a: i64, b: u32, p: u64) -> Result<WeylElement> {
    crate::scalar::PrimeField::new(p)?;
    Ok(WeylElement::term(
        Some(p),
        a * p as i64,
        b * p as u32,
        Poly::one(HVAR, Some(p)),
    ))
}

/// Evaluate a polynomial in `(w, ħ)` at `w = x∂`, producing the normal-form
/// Weyl element. Powers mean `(x∂)^k`, not `x^k ∂^k`.
pub fn from_wh_poly(g: &Poly, modulus: Option<u64>) -> WeylElement {
    assert_eq!(g.vars(), WHVARS);
    assert_eq!(g.modulus(), modulus);
    let w = WeylElement::term(modulus, 1, 1, Poly::one(HVAR, modulus));
    let mut powers: Vec<WeylElement> = vec![WeylElement::one(modulus)];
    let mut out = WeylElement::zero(modulus);
    for (exp, c) in g.terms() {
        let (wk, hk) = (exp[0], exp[1]);
        assert!(wk >= 0 && hk >= 0, "w and ħ powers must be non-negative");
        while powers.len() <= wk as usize {
            let next = weyl_mul(powers.last().unwrap(), &w);
            powers.push(next);
        }
        let hpoly = Poly::var_pow(HVAR, modulus, "h", hk).mul_scalar(c.clone());
        out = out.add(&powers[wk as usize].scale(&hpoly));
    }
    out
}

/// Rewrite a normal-form element as `Σ_n G_n(w, ħ) x^n` with the
/// `w`-polynomial on the left, via
/// `x^a ∂^b = ∏_{j=a-b}^{a-1}(w - jħ) · x^{a-b}`
/// (from `x^b ∂^b = ∏_{i<b}(w - iħ)` and `x^n f(w) = f(w - nħ) x^n`).
pub fn to_wx_form(u: &WeylElement) -> BTreeMap<i64, Poly> {
    let modulus = u.modulus;
    let w = Poly::var(WHVARS, modulus, "w");
    let h = Poly::var(WHVARS, modulus, "h");
    let mut out: BTreeMap<i64, Poly> = BTreeMap::new();
    for (&(a, b), c) in &u.terms {
        let mut g = Poly::one(WHVARS, modulus);
        for j in (a - b as i64)..a {
            g = g.mul(&w.sub(&h.mul_scalar(j)));
        }
        // carry the ħ-only coefficient into (w, ħ)
        let c_wh = embed_h_poly(c, modulus);
        let contrib = g.mul(&c_wh);
        let n = a - b as i64;
        let entry = out.entry(n).or_insert_with(|| Poly::zero(WHVARS, modulus));
        *entry = entry.add(&contrib);
    }
    out.retain(|_, g| !g.is_zero());
    out
}

/// Inverse of [`to_wx_form`]: `Σ_n G_n(w, ħ) x^n` with the `w`-polynomial on
/// the left.
pub fn from_wx_form(map: &BTreeMap<i64, Poly>, modulus: Option<u64>) -> WeylElement {
    let mut out = WeylElement::zero(modulus);
    for (&n, g) in map {
        let gw = from_wh_poly(g, modulus);
        out = out.add(&weyl_mul(&gw, &WeylElement::x_pow(modulus, n)));
    }
    out
}

/// Embed an `ħ`-only polynomial into `(w, ħ)`.
pub fn embed_h_poly(c: &Poly, modulus: Option<u64>) -> Poly {
    assert_eq!(c.vars(), HVAR);
    let mut out = Poly::zero(WHVARS, modulus);
    for (exp, coeff) in c.terms() {
        out = out.add(&Poly::monomial(WHVARS, modulus, &[0, exp[0]], coeff.clone()));
    }
    out
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), c) in self.terms.iter().rev() {
            let mono = {
                let mut parts: Vec<String> = Vec::new();
                if a == 1 {
                    parts.push("x".into());
                } else if a != 0 {
                    parts.push(format!("x^{a}"));
                }
                if b == 1 {
                    parts.push("d".into());
                } else if b != 0 {
                    parts.push(format!("d^{b}"));
                }
                parts.join("*")
            };
            let cs = c.to_string();
            let (sign, body) = format_coeff_mono(&cs, &mono, c.num_terms());
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

/// Render `coeff * monomial`, pulling a single leading minus sign out of the
/// coefficient. Returns `(is_negative, rendered)`.
pub(crate) fn format_coeff_mono(coeff: &str, mono: &str, coeff_terms: usize) -> (bool, String) {
    let (neg, cabs) = match coeff.strip_prefix('-') {
        Some(rest) if coeff_terms == 1 => (true, rest.to_string()),
        _ => (false, coeff.to_string()),
    };
    let body = if mono.is_empty() {
        if coeff_terms > 1 {
            format!("({cabs})")
        } else {
            cabs
        }
    } else if cabs == "1" && coeff_terms == 1 {
        mono.to_string()
    } else if coeff_terms > 1 {
        format!("({cabs})*{mono}")
    } else {
        format!("{cabs}*{mono}")
    };
    (neg, body)
}

// ---- JSON form ----

/// Wire form:
/// `{"alg":"weyl","coeff_ring":{"base":"Z","vars":["hbar"]},"terms":[{"x":-1,"d":0,"c":{...}}]}`.
#[derive(Serialize, Deserialize)]
pub struct WeylJson {
    pub alg: String,
    pub coeff_ring: CoeffRingJson,
    pub terms: Vec<WeylTermJson>,
}

#[derive(Serialize, Deserialize)]
pub struct CoeffRingJson {
    pub base: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub vars: Vec<String>,
}

#[derive(Serialize, Deserialize)]
pub struct WeylTermJson {
    pub x: i64,
    pub d: u32,
    pub c: PolyJson,
}

impl WeylElement {
    pub fn to_json(&self) -> WeylJson {
        WeylJson {
            alg: "weyl".into(),
            coeff_ring: CoeffRingJson {
                base: if self.modulus.is_some() { "Fp" } else { "Z" }.into(),
                p: self.modulus,
                vars: vec!["hbar".into()],
            },
            terms: self
                .terms
                .iter()
                .map(|(&(a, b), c)| WeylTermJson {
                    x: a,
                    d: b,
                    c: rename_h(c).to_json(),
                })
                .collect(),
        }
    }

    pub fn from_json(json: &WeylJson) -> Result<WeylElement> {
        if json.alg != "weyl" {
            return Err(Error::Json(format!("expected alg \"weyl\", got {:?}", json.alg)));
        }
        let modulus = match json.coeff_ring.base.as_str() {
            "Z" => None,
            "Fp" => Some(
                json.coeff_ring
                    .p
                    .ok_or_else(|| Error::Json("Fp base requires p".into()))?,
            ),
            other => return Err(Error::Json(format!("unknown base {other:?}"))),
        };
        let mut out = WeylElement::zero(modulus);
        for t in &json.terms {
            let c = Poly::from_json(&t.c, modulus)?;
            let c = if c.vars() == ["hbar".to_string()] {
                c.rename_vars(HVAR)
            } else {
                c
            };
            if c.vars() != HVAR {
                return Err(Error::Json(format!(
                    "weyl coefficient must be univariate in hbar, got vars {:?}",
                    c.vars()
                )));
            }
            out.add_to((t.x, t.d), c);
        }
        Ok(out)
    }
}

fn rename_h(c: &Poly) -> Poly {
    c.rename_vars(&["hbar"])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn x(m: Option<u64>) -> WeylElement {
        WeylElement::x_pow(m, 1)
    }
    fn d(m: Option<u64>) -> WeylElement {
        WeylElement::d_pow(m, 1)
    }
    fn h(m: Option<u64>) -> WeylElement {
        WeylElement::hbar(m)
    }

    #[test]
    fn defining_relation() {
        // ∂x = x∂ + ħ
        let lhs = weyl_mul(&d(None), &x(None));
        let rhs = weyl_mul(&x(None), &d(None)).add(&h(None));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_string(), "x*d + h");
    }

    #[test]
    fn negative_powers() {
        // ∂·x⁻¹ = x⁻¹∂ − ħx⁻²
        let lhs = weyl_mul(&d(None), &WeylElement::x_pow(None, -1));
        let expect = weyl_mul(&WeylElement::x_pow(None, -1), &d(None)).sub(&WeylElement::term(
            None,
            -2,
            0,
            Poly::var(HVAR, None, "h"),
        ));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn weyl_identity_p3() {
        // x³∂³ = (x∂)(x∂−ħ)(x∂−2ħ) over Z[ħ], and mod 3 equals (x∂)³ − ħ²(x∂)
        let w = weyl_mul(&x(None), &d(None));
        let hh = h(None);
        let rhs = weyl_mul(
            &weyl_mul(&w, &w.sub(&hh)),
            &w.sub(&hh.scale_int(2)),
        );
        let lhs = WeylElement::term(None, 3, 3, Poly::one(HVAR, None));
        assert_eq!(lhs, rhs);

        let w3 = weyl_mul(&weyl_mul(&w, &w), &w);
        let as_form = w3.sub(&w.scale(&Poly::var_pow(HVAR, None, "h", 2)));
        assert_eq!(lhs.to_mod(3), as_form.to_mod(3));
    }

    #[test]
    fn commutators() {
        // [x∂, x] = ħx
        let w = weyl_mul(&x(None), &d(None));
        let c = weyl_commutator(&w, &x(None));
        assert_eq!(c, WeylElement::term(None, 1, 0, Poly::var(HVAR, None, "h")));

        // [x^p, ∂] = -pħx^{p-1} over Z[ħ], ≡ 0 mod p
        for p in [3i64, 5] {
            let xp = WeylElement::x_pow(None, p);
            let c = weyl_commutator(&xp, &d(None));
            let expect = WeylElement::term(
                None,
                p - 1,
                0,
                Poly::var(HVAR, None, "h").mul_scalar(-p),
            );
            assert_eq!(c, expect);
            assert!(c.to_mod(p as u64).is_zero());
        }

        // [ħ, anything] = 0
        let u = weyl_mul(&x(None), &d(None)).add(&WeylElement::x_pow(None, -2));
        assert!(weyl_commutator(&h(None), &u).is_zero());
    }

    #[test]
    fn frobenius_images_commute() {
        for p in [3u64, 5] {
            let fx = frobenius_weyl(1, 0, p).unwrap();
            let fy = frobenius_weyl(0, 1, p).unwrap();
            assert!(weyl_commutator(&fx, &fy).is_zero());
            // F(x)·F(y) = x^p ∂^p = ∏_{i=0}^{p-1}(x∂ - iħ) mod p
            let prod = weyl_mul(&fx, &fy);
            let w = weyl_mul(&x(Some(p)), &d(Some(p)));
            let mut ff = WeylElement::one(Some(p));
            for i in 0..p {
                ff = weyl_mul(&ff, &w.sub(&h(Some(p)).scale_int(i as i64)));
            }
            assert_eq!(prod, ff);
        }
    }

    #[test]
    fn wx_form_round_trip() {
        let u = weyl_mul(&WeylElement::x_pow(None, 2), &d(None))
            .add(&WeylElement::x_pow(None, -1))
            .add(&h(None).scale_int(4));
        let form = to_wx_form(&u);
        assert_eq!(from_wx_form(&form, None), u);
        // x²∂ = (w - ħ)·x in (w, ħ)-form (polynomial on the left)
        let e1 = weyl_mul(&WeylElement::x_pow(None, 2), &d(None));
        let form = to_wx_form(&e1);
        assert_eq!(form.len(), 1);
        let expect = Poly::var(WHVARS, None, "w").sub(&Poly::var(WHVARS, None, "h"));
        assert_eq!(form[&1], expect);
    }

    #[test]
    fn json_round_trip() {
        let u = weyl_mul(&d(None), &WeylElement::x_pow(None, -1));
        let s = serde_json::to_string(&u.to_json()).unwrap();
        assert!(s.contains("\"alg\":\"weyl\""));
        let back = WeylElement::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, u);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn associative(a in small_weyl(), b in small_weyl(), c in small_weyl()) {
            let lhs = weyl_mul(&weyl_mul(&a, &b), &c);
            let rhs = weyl_mul(&a, &weyl_mul(&b, &c));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn unital(a in small_weyl()) {
            let one = WeylElement::one(None);
            prop_assert_eq!(weyl_mul(&a, &one), a.clone());
            prop_assert_eq!(weyl_mul(&one, &a), a);
        }
    }

    prop_compose! {
        fn small_weyl()(terms in prop::collection::vec(((-2i64..3, 0u32..3), 0i64..2, -4i64..5), 0..4)) -> WeylElement {
            let mut u = WeylElement::zero(None);
            for ((a, b), hpow, c) in terms {
                let coeff = Poly::var_pow(HVAR, None, "h", hpow).mul_scalar(c);
                u = u.add(&WeylElement::term(None, a, b, coeff));
            }
            u
        }
    }
}
