//! Cyclotomic polynomials and the quotient rings `Z[q]/Φ_n(q)`.

use num_bigint::BigInt;
use num_traits::One;

use crate::poly::Poly;
use crate::report::VerificationReport;
use crate::{Error, Result};

/// All divisors of `n`, ascending.
fn divisors(n: u32) -> Vec<u32> {
    let mut divs = Vec::new();
    let mut i = 1;
    while i * i <= n {
        if n % i == 0 {
            divs.push(i);
            if i != n / i {
                divs.push(n / i);
            }
        }
        i += 1;
    }
    divs.sort_unstable();
    divs
}

/// `q^n - 1` as a univariate polynomial in `q` over `Z`.
pub fn q_pow_minus_one(n: u32) -> Poly {
    Poly::var_pow(&["q"], None, "q", n as i64).sub(&Poly::one(&["q"], None))
}

/// The `n`-th cyclotomic polynomial `Φ_n(q)`, monic with integer
/// coefficients, computed by recursive division:
/// `Φ_n = (q^n - 1) / ∏_{d|n, d<n} Φ_d`.
pub fn cyclotomic(n: u32) -> Result<Poly> {
    if n == 0 {
        return Err(Error::NotPositive(0));
    }
    if n == 1 {
        return Ok(q_pow_minus_one(1));
    }
    let mut acc = q_pow_minus_one(n);
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi = cyclotomic(d)?;
        let (quot, rem) = acc.div_rem_monic(&phi);
        debug_assert!(rem.is_zero(), "cyclotomic division left a remainder");
        acc = quot;
    }
    Ok(acc)
}

/// The quotient ring `Z[q]/Φ_n(q)`. Elements are represented by their
/// canonical representatives: polynomials in `q` of degree `< deg Φ_n`
/// with non-negative exponents.
#[derive(Debug, Clone)]
pub struct CyclotomicRing {
    n: u32,
    phi: Poly,
    q_inv: Poly,
}

impl CyclotomicRing {
    pub fn new(n: u32) -> Result<Self> {
        let phi = cyclotomic(n)?;
        // q is a unit mod Φ_n: Φ_n(0) = ±1 and
        // q * (Φ_n - Φ_n(0)) / q = -Φ_n(0) mod Φ_n.
        let c0 = phi.constant_term();
        let shifted = phi.sub(&Poly::constant(&["q"], None, c0.clone()));
        let per_q = shifted
            .div_exact(&Poly::var(&["q"], None, "q"))
            .expect("Φ_n - Φ_n(0) is divisible by q");
        let sign: BigInt = -c0; // ±1, equal to its own inverse
        debug_assert!(sign.clone().pow(2u32).is_one());
        let q_inv = per_q.mul_scalar(sign);
        Ok(CyclotomicRing { n, phi, q_inv })
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    pub fn phi(&self) -> &Poly {
        &self.phi
    }

    pub fn degree(&self) -> i64 {
        self.phi.degree_in("q").unwrap()
    }

    /// Canonical representative of a Laurent polynomial in `q`. Negative
    /// powers are cleared through the inverse of `q` mod `Φ_n`.
    pub fn reduce(&self, x: &Poly) -> Result<Poly> {
        if x.vars() != ["q".to_string()] {
            return Err(Error::VariableMismatch(
                x.vars().to_vec(),
                vec!["q".into()],
            ));
        }
        let min = x.min_degree_in("q").unwrap_or(0);
        let shifted = if min < 0 {
            // multiply by q^{-min} to clear denominators, reduce, then
            // multiply back by (q^{-1})^{-min}
            let cleared = x.mul(&Poly::var_pow(&["q"], None, "q", -min));
            let (_, rem) = cleared.div_rem_monic(&self.phi);
            let mut out = rem;
            for _ in 0..(-min) {
                out = out.mul(&self.q_inv);
                let (_, r) = out.div_rem_monic(&self.phi);
                out = r;
            }
            out
        } else {
            let (_, rem) = x.div_rem_monic(&self.phi);
            rem
        };
        Ok(shifted)
    }

    pub fn is_zero_mod(&self, x: &Poly) -> Result<bool> {
        Ok(self.reduce(x)?.is_zero())
    }
}

/// A modulus accepted by [`poly_reduce`].
#[derive(Debug, Clone)]
pub enum PolyModulus {
    /// Reduce coefficients mod an odd prime.
    Prime(u64),
    /// Reduce a univariate polynomial in `q` mod `Φ_n(q)`.
    Cyclotomic(u32),
    /// Reduce a univariate polynomial in `q` mod `q^n - 1`.
    QPowMinusOne(u32),
}

/// Canonical representative of `x` under the given modulus. Each branch is
/// a ring homomorphism onto its image.
pub fn poly_reduce(x: &Poly, modulus: &PolyModulus) -> Result<Poly> {
    match modulus {
        PolyModulus::Prime(p) => {
            crate::scalar::PrimeField::new(*p)?;
            Ok(x.to_mod(*p))
        }
        PolyModulus::Cyclotomic(n) => CyclotomicRing::new(*n)?.reduce(x),
        PolyModulus::QPowMinusOne(n) => {
            if *n == 0 {
                return Err(Error::NotPositive(0));
            }
            if x.vars() != ["q".to_string()] {
                return Err(Error::VariableMismatch(
                    x.vars().to_vec(),
                    vec!["q".into()],
                ));
            }
            // q^n = 1: fold every exponent mod n.
            let mut out = Poly::zero(&["q"], x.modulus());
            for (e, c) in x.terms() {
                let folded = e[0].rem_euclid(*n as i64);
                out = out.add(&Poly::monomial(&["q"], x.modulus(), &[folded], c.clone()));
            }
            Ok(out)
        }
    }
}

/// Verifies `∏_{i=0}^{p-1}(T - iħ) = T^p - ħ^{p-1}T` in `F_p[T, ħ]`,
/// the commutative shadow of the Weyl identity `x^p∂^p = ∏(x∂ - iħ)`.
pub fn falling_factorial_identity(p: u64) -> Result<VerificationReport> {
    crate::scalar::PrimeField::new(p)?;
    let vars: &[&str] = &["T", "h"];
    let t = Poly::var(vars, Some(p), "T");
    let h = Poly::var(vars, Some(p), "h");
    let mut lhs = Poly::one(vars, Some(p));
    for i in 0..p {
        lhs = lhs.mul(&t.sub(&h.mul_scalar(i)));
    }
    let rhs = t.pow(p).sub(&h.pow(p - 1).mul(&t));
    let mut report = VerificationReport::new(format!("falling-factorial p={p}"));
    report.record(
        format!("prod_(i<{p}) (T - i*h) = T^{p} - h^{}*T", p - 1),
        lhs == rhs,
        Some(serde_json::json!({
            "lhs": lhs.to_string(),
            "rhs": rhs.to_string(),
        })),
    );
    // specialization ħ = 0 collapses to the p-th power map
    let lhs0 = lhs.subst("h", &Poly::zero(vars, Some(p)));
    report.assert_true("specializes to T^p at h = 0", lhs0 == t.pow(p));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> Poly {
        Poly::var(&["q"], None, "q")
    }

    #[test]
    fn small_cyclotomics() {
        let one = Poly::one(&["q"], None);
        assert_eq!(cyclotomic(1).unwrap(), q().sub(&one));
        assert_eq!(cyclotomic(2).unwrap(), q().add(&one));
        assert_eq!(cyclotomic(4).unwrap(), q().pow(2).add(&one));
        assert_eq!(cyclotomic(6).unwrap(), q().pow(2).sub(&q()).add(&one));
        assert_eq!(cyclotomic(3).unwrap(), q().pow(2).add(&q()).add(&one));
        assert!(cyclotomic(0).is_err());
    }

    #[test]
    fn product_over_divisors() {
        for n in 1..=24u32 {
            let mut prod = Poly::one(&["q"], None);
            for d in divisors(n) {
                prod = prod.mul(&cyclotomic(d).unwrap());
            }
            assert_eq!(prod, q_pow_minus_one(n), "n = {n}");
        }
    }

    #[test]
    fn reduce_examples() {
        // q^3 mod Φ_4 = -q, i.e. canonical representative Φ_4 - ... : over Z
        // the representative of -q is -q itself.
        let ring = CyclotomicRing::new(4).unwrap();
        let r = ring.reduce(&q().pow(3)).unwrap();
        assert_eq!(r, q().neg());

        // (q-1)(q+1) mod q^2 - 1 = 0
        let prod = q().sub(&Poly::one(&["q"], None)).mul(&q().add(&Poly::one(&["q"], None)));
        let r = poly_reduce(&prod, &PolyModulus::QPowMinusOne(2)).unwrap();
        assert!(r.is_zero());

        // 3T mod 3 = 0
        let t = Poly::var(&["T"], None, "T").mul_scalar(3);
        assert!(poly_reduce(&t, &PolyModulus::Prime(3)).unwrap().is_zero());
    }

    #[test]
    fn q_inverse_is_inverse() {
        for n in [2u32, 3, 4, 6, 12] {
            let ring = CyclotomicRing::new(n).unwrap();
            let prod = q().mul(&ring.q_inv);
            assert!(ring
                .reduce(&prod.sub(&Poly::one(&["q"], None)))
                .unwrap()
                .is_zero());
            // and via the Laurent path
            let r = ring.reduce(&Poly::var_pow(&["q"], None, "q", -1)).unwrap();
            assert_eq!(r, ring.q_inv, "n = {n}");
        }
    }

    #[test]
    fn falling_factorial_small_primes() {
        for p in [3u64, 5, 7] {
            assert!(falling_factorial_identity(p).unwrap().pass());
        }
        // the p=3 expansion over Z: T(T-h)(T-2h) = T^3 - 3hT^2 + 2h^2T
        let vars: &[&str] = &["T", "h"];
        let t = Poly::var(vars, None, "T");
        let h = Poly::var(vars, None, "h");
        let lhs = t.mul(&t.sub(&h)).mul(&t.sub(&h.mul_scalar(2)));
        let expect = t
            .pow(3)
            .sub(&t.pow(2).mul(&h).mul_scalar(3))
            .add(&t.mul(&h.pow(2)).mul_scalar(2));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn reduction_hom_mod_phi() {
        let ring = CyclotomicRing::new(6).unwrap();
        let a = q().pow(4).add(&q().mul_scalar(2));
        let b = q().pow(5).sub(&Poly::one(&["q"], None));
        let lhs = ring.reduce(&a.mul(&b)).unwrap();
        let rhs = ring
            .reduce(&ring.reduce(&a).unwrap().mul(&ring.reduce(&b).unwrap()))
            .unwrap();
        assert_eq!(lhs, rhs);
    }
}
