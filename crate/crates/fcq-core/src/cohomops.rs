//! The total power operation `St_in` and the `ħ`-Artin-Schreier map on
//! polynomial cohomology rings, with extraction of the operations `P^s`.
//!
//! On a polynomial ring with degree-2 generators `b` (Bockstein zero),
//! `St_in` is the ring homomorphism determined by
//! `St_in(b) = b^p - ħ^{p-1} b + ħ^{p-2} β(b)`, landing in the ring
//! adjoined `(a, ħ)` with `deg a = 1`, `deg ħ = 2`, `a² = 0`. Setting
//! `(a, ħ) = 0` recovers the `p`-th power map. The operation `P^s` on a
//! class of degree `n = 2k` is the `ħ^{(p-1)(k-s)}`-coefficient of
//! `(-1)^{q n(n-1)/2} (q!)^{-n} St_in`, up to the sign `(-1)^s`
//! (`q = (p-1)/2`).

use num_bigint::BigInt;
use num_traits::Zero;

use crate::matrix::SpMat;
use crate::poly::Poly;
use crate::report::VerificationReport;
use crate::scalar::PrimeField;
use crate::{Error, Result};

/// A polynomial cohomology ring `F_p[b_1, …, b_m]` with even generators and
/// a (zero) Bockstein table, together with its `(a, ħ)`-extension.
#[derive(Debug, Clone)]
pub struct CohomRing {
    field: PrimeField,
    generators: Vec<String>,
    degrees: Vec<i64>,
}

impl CohomRing {
    /// All generator degrees must be even (the odd-degree theory is out of
    /// scope and rejected at validation).
    pub fn new(p: u64, generators: &[&str], degrees: &[i64]) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if generators.len() != degrees.len() {
            return Err(Error::ShapeMismatch(
                "generator and degree lists differ in length".into(),
            ));
        }
        if let Some(&d) = degrees.iter().find(|&&d| d % 2 != 0 || d <= 0) {
            return Err(Error::BadAlgebra(format!(
                "generator degree {d} is not a positive even integer"
            )));
        }
        if generators.iter().any(|g| *g == "a" || *g == "h") {
            return Err(Error::BadAlgebra(
                "generator names `a` and `h` are reserved".into(),
            ));
        }
        Ok(CohomRing {
            field,
            generators: generators.iter().map(|s| s.to_string()).collect(),
            degrees: degrees.to_vec(),
        })
    }

    /// Degree-2 generators named `b_1, …` (the default situation).
    pub fn polynomial(p: u64, generators: &[&str]) -> Result<Self> {
        let degrees = vec![2i64; generators.len()];
        Self::new(p, generators, &degrees)
    }

    pub fn p(&self) -> u64 {
        self.field.modulus()
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn generators(&self) -> Vec<&str> {
        self.generators.iter().map(|s| s.as_str()).collect()
    }

    fn gen_vars(&self) -> Vec<&str> {
        self.generators()
    }

    fn full_vars(&self) -> Vec<&str> {
        let mut v = self.gen_vars();
        v.push("a");
        v.push("h");
        v
    }

    /// A ring element: polynomial in the generators.
    pub fn element(&self, build: impl FnOnce(&[&str], Option<u64>) -> Poly) -> Poly {
        build(&self.gen_vars(), Some(self.p()))
    }

    pub fn gen(&self, name: &str) -> Poly {
        Poly::var(&self.gen_vars(), Some(self.p()), name)
    }

    /// Cohomological degree of a homogeneous element (`None` for 0), or an
    /// error if the element is not homogeneous.
    pub fn degree_of(&self, x: &Poly) -> Result<Option<i64>> {
        let mut degree: Option<i64> = None;
        for (exp, _) in x.terms() {
            let d: i64 = exp
                .iter()
                .zip(&self.degrees)
                .map(|(&e, &gd)| e * gd)
                .sum();
            match degree {
                None => degree = Some(d),
                Some(d0) if d0 != d => {
                    return Err(Error::Eval(format!(
                        "element is not homogeneous: degrees {d0} and {d}"
                    )))
                }
                _ => {}
            }
        }
        Ok(degree)
    }

    /// The total power operation: the ring homomorphism with
    /// `St_in(b) = b^p - ħ^{p-1} b + ħ^{p-2} β(b)` on each degree-2
    /// generator (`β = 0` throughout this scope — the Bockstein slot is
    /// carried but always zero). Requires every generator to have degree 2.
    pub fn st_in(&self, x: &Poly) -> Result<Poly> {
        if x.vars() != self.generators {
            return Err(Error::VariableMismatch(
                x.vars().to_vec(),
                self.generators.clone(),
            ));
        }
        if let Some(&d) = self.degrees.iter().find(|&&d| d != 2) {
            return Err(Error::BadAlgebra(format!(
                "St_in needs degree-2 generators, found degree {d}"
            )));
        }
        let p = self.p();
        let full = self.full_vars();
        let mut out = x.embed(&full);
        for g in &self.generators {
            let gen = Poly::var(&full, Some(p), g);
            let h = Poly::var(&full, Some(p), "h");
            let beta = Poly::zero(&full, Some(p)); // Bockstein of an even class
            let image = gen
                .pow(p)
                .sub(&h.pow(p - 1).mul(&gen))
                .add(&h.pow(p - 2).mul(&beta));
            out = out.subst(g, &image);
        }
        // enforce a² = 0 (vacuous while β = 0, kept for the extension ring)
        Ok(kill_a_squared(&out))
    }

    /// The Steenrod operation `P^s` on a homogeneous even-degree element,
    /// extracted from the corrected total power. Vanishes for `2s > deg`.
    pub fn steenrod_p(&self, s: u32, x: &Poly) -> Result<Poly> {
        let f = self.field;
        let p = self.p();
        let n = match self.degree_of(x)? {
            None => return Ok(Poly::zero(&self.gen_vars(), Some(p))),
            Some(n) => n,
        };
        if n % 2 != 0 {
            return Err(Error::Eval(format!("degree {n} is odd")));
        }
        let k = n / 2;
        if 2 * (s as i64) > n {
            return Ok(Poly::zero(&self.gen_vars(), Some(p)));
        }
        let st = self.st_in(x)?;
        // correction factor (-1)^{q n(n-1)/2} (q!)^{-n}, q = (p-1)/2
        let q = (p - 1) / 2;
        let sign_exp = (q as i64) * n * (n - 1) / 2;
        let mut c = f.pow(f.inv(f.factorial(q)), n as u64);
        if sign_exp % 2 != 0 {
            c = f.neg(c);
        }
        // the ħ^{(p-1)(k-s)}-coefficient (no a-part), with the sign (-1)^s
        let m = (p as i64 - 1) * (k - s as i64);
        let coeff = st.coeff_of_power("h", m).coeff_of_power("a", 0);
        let mut scalar = c;
        if s % 2 == 1 {
            scalar = f.neg(scalar);
        }
        // strip the a, h variables back off
        let reduced = coeff.mul_scalar(BigInt::from(scalar));
        project_to_gens(&reduced, &self.gen_vars(), Some(p))
    }
}

fn kill_a_squared(x: &Poly) -> Poly {
    let mut out = Poly::zero_like(x);
    let a_idx = x.var_index("a").expect("extension ring has a");
    for (exp, c) in x.terms() {
        if exp[a_idx] <= 1 {
            out = out.add(&Poly::monomial(
                &x.vars().iter().map(|s| s.as_str()).collect::<Vec<_>>(),
                x.modulus(),
                exp,
                c.clone(),
            ));
        }
    }
    out
}

fn project_to_gens(x: &Poly, gens: &[&str], modulus: Option<u64>) -> Result<Poly> {
    let mut out = Poly::zero(gens, modulus);
    let keep: Vec<usize> = gens
        .iter()
        .map(|g| x.var_index(g).expect("generator present"))
        .collect();
    for (exp, c) in x.terms() {
        for (i, e) in exp.iter().enumerate() {
            if !keep.contains(&i) && *e != 0 {
                return Err(Error::Eval(
                    "projection would drop a nonzero extension term".into(),
                ));
            }
        }
        let small: Vec<i64> = keep.iter().map(|&i| exp[i]).collect();
        out = out.add(&Poly::monomial(gens, modulus, &small, c.clone()));
    }
    Ok(out)
}

/// The `ħ`-Artin-Schreier ring map on `F_p[x_1, …, x_m]`: determined by
/// `x_i ↦ x_i^p - ħ^{p-1} x_i` on the chosen linear coordinates. At
/// `ħ = 0` it is the Frobenius; it agrees with `St_in` when all Bocksteins
/// vanish.
pub fn as_hbar(f: &Poly, p: u64) -> Result<Poly> {
    PrimeField::new(p)?;
    if f.modulus() != Some(p) {
        return Err(Error::RingMismatch(
            format!("{:?}", f.modulus()),
            format!("Some({p})"),
        ));
    }
    if f.vars().iter().any(|v| v == "h") {
        return Err(Error::BadAlgebra("variable name `h` is reserved".into()));
    }
    let owned: Vec<String> = f.vars().to_vec();
    let mut vars: Vec<&str> = owned.iter().map(|s| s.as_str()).collect();
    vars.push("h");
    let mut out = f.embed(&vars);
    let h = Poly::var(&vars, Some(p), "h");
    for g in &owned {
        let x = Poly::var(&vars, Some(p), g);
        out = out.subst(g, &x.pow(p).sub(&h.pow(p - 1).mul(&x)));
    }
    Ok(out)
}

/// Verify that `St_in(b)` vanishes at `b = tħ` for every `t ∈ F_p`, and
/// that `b^p - ħ^{p-1} b` is the unique degree-`2p` element of
/// `F_p[b, ħ]` with that property which reduces to `b^p` at `ħ = 0`.
pub fn hbar_multiple_vanishing(p: u64) -> Result<VerificationReport> {
    let field = PrimeField::new(p)?;
    let ring = CohomRing::polynomial(p, &["b"])?;
    let mut report = VerificationReport::new(format!("hbar-multiple-vanishing p={p}"));

    let st = ring.st_in(&ring.gen("b"))?;
    let full = ring.full_vars();
    for t in 0..p {
        let th = Poly::var(&full, Some(p), "h").mul_scalar(t as i64);
        let val = st.subst("b", &th);
        report.record(
            format!("St_in(b) vanishes at b = {t}·h"),
            val.is_zero(),
            Some(serde_json::json!({ "value": val.to_string() })),
        );
    }

    // uniqueness: f = Σ_i c_i b^i ħ^{p-i} with f(tħ) = 0 ∀t and c_p = 1 has
    // the unique solution c_p = 1, c_1 = -1, rest 0
    let unknowns = (p + 1) as usize;
    let mut triplets = Vec::new();
    let mut rhs = Vec::new();
    let mut eq = 0usize;
    for t in 0..p {
        // Σ_i c_i t^i = 0
        for i in 0..unknowns {
            let v = field.pow(t, i as u64);
            if v != 0 {
                triplets.push((eq, i, v as i64));
            }
        }
        rhs.push(0u64);
        eq += 1;
    }
    // leading coefficient pinned to 1
    triplets.push((eq, unknowns - 1, 1));
    rhs.push(1);
    eq += 1;
    let sys = SpMat::from_triplets(field, eq, unknowns, triplets);
    let sol = sys.solve(&rhs);
    let unique = sys.kernel_dim() == 0;
    let matches = sol.as_ref().is_some_and(|c| {
        c.iter().enumerate().all(|(i, &v)| match i {
            1 => v == field.neg(1),
            i if i == unknowns - 1 => v == 1,
            _ => v == 0,
        })
    });
    report.record(
        "b^p - h^{p-1} b is the unique solution of the vanishing system",
        unique && matches,
        Some(serde_json::json!({ "solution": sol, "kernel_dim": sys.kernel_dim() })),
    );
    Ok(report)
}

fn binomial_mod(field: &PrimeField, n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut num = 1u64;
    let mut den = 1u64;
    for i in 0..k {
        num = field.mul(num, (n - i) % field.modulus());
        den = field.mul(den, (i + 1) % field.modulus());
    }
    if den == 0 {
        // fall back: Lucas' theorem digit by digit
        let p = field.modulus();
        let (mut n, mut k) = (n, k);
        let mut acc = 1u64;
        while n > 0 || k > 0 {
            let (nd, kd) = (n % p, k % p);
            if kd > nd {
                return 0;
            }
            acc = field.mul(acc, binomial_mod(field, nd, kd));
            n /= p;
            k /= p;
        }
        acc
    } else {
        field.mul(num, field.inv(den))
    }
}

/// `C(n, k) mod p` via Lucas' theorem (exposed for the power-rule tests).
pub fn binomial_mod_p(p: u64, n: u64, k: u64) -> Result<u64> {
    let field = PrimeField::new(p)?;
    if k > n {
        return Ok(0);
    }
    let (mut n, mut k) = (n, k);
    let mut acc = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p, k % p);
        if kd > nd {
            return Ok(0);
        }
        acc = field.mul(acc, binomial_mod(&field, nd, kd));
        n /= p;
        k /= p;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn st_in_on_generator() {
        for p in [3u64, 5] {
            let ring = CohomRing::polynomial(p, &["b"]).unwrap();
            let st = ring.st_in(&ring.gen("b")).unwrap();
            let full = ring.full_vars();
            let b = Poly::var(&full, Some(p), "b");
            let h = Poly::var(&full, Some(p), "h");
            assert_eq!(st, b.pow(p).sub(&h.pow(p - 1).mul(&b)), "p={p}");
        }
    }

    #[test]
    fn st_in_is_ring_hom() {
        let p = 3u64;
        let ring = CohomRing::polynomial(p, &["x1", "x2"]).unwrap();
        let one = ring.element(|v, m| Poly::one(v, m));
        assert!(ring.st_in(&one).unwrap().is_one());
        // product of two generators maps to the product of the images
        let x1 = ring.gen("x1");
        let x2 = ring.gen("x2");
        let lhs = ring.st_in(&x1.mul(&x2)).unwrap();
        let rhs = ring.st_in(&x1).unwrap().mul(&ring.st_in(&x2).unwrap());
        assert_eq!(lhs, rhs);
        // and F_p-linearity via c ↦ c^p = c
        let lhs = ring.st_in(&x1.mul_scalar(2)).unwrap();
        assert_eq!(lhs, ring.st_in(&x1).unwrap().mul_scalar(2));
    }

    #[test]
    fn odd_generators_rejected() {
        assert!(CohomRing::new(3, &["s"], &[1]).is_err());
        assert!(CohomRing::new(3, &["b"], &[2]).is_ok());
        assert!(CohomRing::new(3, &["b"], &[4]).is_ok());
        // degree-4 generators exist, but St_in refuses them
        let ring = CohomRing::new(3, &["c"], &[4]).unwrap();
        assert!(ring.st_in(&ring.gen("c")).is_err());
    }

    #[test]
    fn p0_and_p1_on_generator() {
        for p in [3u64, 5, 7] {
            let ring = CohomRing::polynomial(p, &["b"]).unwrap();
            let b = ring.gen("b");
            assert_eq!(ring.steenrod_p(0, &b).unwrap(), b, "P⁰ p={p}");
            assert_eq!(ring.steenrod_p(1, &b).unwrap(), b.pow(p), "P¹ p={p}");
            assert!(ring.steenrod_p(2, &b).unwrap().is_zero(), "P² p={p}");
        }
    }

    #[test]
    fn power_rule() {
        // P^s(b^k) = C(k, s) b^{k + s(p-1)}
        for p in [3u64, 5] {
            let ring = CohomRing::polynomial(p, &["b"]).unwrap();
            let b = ring.gen("b");
            for k in 1..=10u64 {
                for s in 0..=k as u32 {
                    let got = ring.steenrod_p(s, &b.pow(k)).unwrap();
                    let c = binomial_mod_p(p, k, s as u64).unwrap();
                    let expect = b
                        .pow(k + s as u64 * (p - 1))
                        .mul_scalar(c as i64);
                    assert_eq!(got, expect, "p={p} k={k} s={s}");
                }
            }
        }
    }

    #[test]
    fn cartan_and_unstability() {
        for p in [3u64, 5] {
            let ring = CohomRing::polynomial(p, &["b"]).unwrap();
            let b = ring.gen("b");
            // degree ≤ 20 means exponent ≤ 10
            for i in 1..=5u64 {
                for j in 1..=5u64 {
                    let f = b.pow(i);
                    let g = b.pow(j);
                    let fg = f.mul(&g);
                    for s in 0..=(i + j) as u32 {
                        let lhs = ring.steenrod_p(s, &fg).unwrap();
                        let mut rhs = Poly::zero(&["b"], Some(p));
                        for s1 in 0..=s {
                            rhs = rhs.add(
                                &ring
                                    .steenrod_p(s1, &f)
                                    .unwrap()
                                    .mul(&ring.steenrod_p(s - s1, &g).unwrap()),
                            );
                        }
                        assert_eq!(lhs, rhs, "Cartan p={p} i={i} j={j} s={s}");
                    }
                }
            }
            // unstability: P^s = 0 above the degree, top P is the p-th power
            for k in 1..=10u64 {
                let f = b.pow(k);
                assert!(ring.steenrod_p(k as u32 + 1, &f).unwrap().is_zero());
                assert_eq!(ring.steenrod_p(k as u32, &f).unwrap(), f.pow(p));
            }
        }
    }

    #[test]
    fn as_hbar_basics() {
        let p = 3u64;
        let x = Poly::var(&["x"], Some(p), "x");
        let image = as_hbar(&x, p).unwrap();
        // at ħ = 0: x^p
        let at0 = image.subst("h", &Poly::zero(&["x", "h"], Some(p)));
        assert_eq!(at0, Poly::var(&["x", "h"], Some(p), "x").pow(p));
        // p=3, ħ=1, x=2: 2³ - 2 = 6 ≡ 0 (Fermat)
        let at_h1 = image.subst("h", &Poly::one(&["x", "h"], Some(p)));
        let val = at_h1.subst("x", &Poly::constant(&["x", "h"], Some(p), 2));
        assert!(val.is_zero());
    }

    #[test]
    fn as_hbar_symmetric() {
        // e₁ = x + y ↦ (x³ - ħ²x) + (y³ - ħ²y), symmetric under x ↔ y
        let p = 3u64;
        let vars: &[&str] = &["x", "y"];
        let e1 = Poly::var(vars, Some(p), "x").add(&Poly::var(vars, Some(p), "y"));
        let image = as_hbar(&e1, p).unwrap();
        let full: &[&str] = &["x", "y", "h"];
        let x = Poly::var(full, Some(p), "x");
        let y = Poly::var(full, Some(p), "y");
        let h = Poly::var(full, Some(p), "h");
        let expect = x
            .pow(3)
            .sub(&h.pow(2).mul(&x))
            .add(&y.pow(3))
            .sub(&h.pow(2).mul(&y));
        assert_eq!(image, expect);
        // swapping variables commutes with the map
        let swapped = e1.rename_vars(&["y", "x"]).embed(&["x", "y"]);
        let image2 = as_hbar(&swapped, p).unwrap();
        assert_eq!(image2, image);
    }

    #[test]
    fn vanishing_and_uniqueness() {
        for p in [3u64, 5] {
            let report = hbar_multiple_vanishing(p).unwrap();
            assert!(report.pass(), "p={p}: {report}");
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_mod_p(3, 3, 1).unwrap(), 0);
        assert_eq!(binomial_mod_p(3, 4, 2).unwrap(), 0);
        assert_eq!(binomial_mod_p(3, 4, 1).unwrap(), 1);
        assert_eq!(binomial_mod_p(5, 10, 5).unwrap(), binomial_mod_p(5, 2, 1).unwrap());
    }
}
