//! Two-periodic Tate hypercohomology of a bounded cyclic complex.
//!
//! The complete-resolution double complex has `K^{i,j} = M^j` for all
//! `i ∈ Z`, horizontal differential alternating `σ-1` (out of even `i`) and
//! `N` (out of odd `i`), and vertical differential `(-1)^i d`. For bounded
//! `M` every total degree sees each `j` exactly once, so
//! `Tot^n = ⊕_j M^j` and the total differential depends only on `n mod 2`:
//! `Ĥ^n` is 2-periodic on the nose. For a single module in degree 0 this
//! reduces to `Ĥ^0 = ker(σ-1)/im N` and `Ĥ^{-1} = ker N/im(σ-1)`.

use crate::complex::CyclicComplex;
use crate::matrix::SpMat;

/// The 2-periodic answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TateCohomology {
    pub even: usize,
    pub odd: usize,
}

impl TateCohomology {
    pub fn at(&self, n: i64) -> usize {
        if n.rem_euclid(2) == 0 {
            self.even
        } else {
            self.odd
        }
    }

    pub fn is_zero(&self) -> bool {
        self.even == 0 && self.odd == 0
    }
}

/// The total differential `Tot^n → Tot^{n+1}` (blocks indexed by the
/// internal degrees of `M`, ascending).
fn total_differential(m: &CyclicComplex, n: i64) -> SpMat {
    let field = m.field();
    let degrees: Vec<i64> = m.complex().dims().keys().copied().collect();
    let offset = |list: &[i64], j: i64| -> usize {
        list.iter()
            .take_while(|&&x| x < j)
            .map(|&x| m.dim(x))
            .sum()
    };
    let total: usize = degrees.iter().map(|&j| m.dim(j)).sum();
    let mut triplets: Vec<(usize, usize, i64)> = Vec::new();
    for &j in &degrees {
        let i = n - j; // horizontal position of this block in Tot^n
        let col0 = offset(&degrees, j);
        // horizontal component: K^{i,j} → K^{i+1,j}, block (j → j)
        let h = if i.rem_euclid(2) == 0 {
            m.tau_at(j)
        } else {
            m.norm_at(j)
        };
        let row0 = offset(&degrees, j);
        for r in 0..h.nrows() {
            for &(c, v) in h.row(r) {
                triplets.push((row0 + r, col0 + c, v as i64));
            }
        }
        // vertical component: K^{i,j} → K^{i,j+1}, block (j → j+1), sign (-1)^i
        if degrees.contains(&(j + 1)) {
            let d = m.d_at(j);
            let sign = if i.rem_euclid(2) == 0 { 1i64 } else { -1 };
            let row0 = offset(&degrees, j + 1);
            for r in 0..d.nrows() {
                for &(c, v) in d.row(r) {
                    triplets.push((row0 + r, col0 + c, sign * v as i64));
                }
            }
        }
    }
    SpMat::from_triplets(field, total, total, triplets)
}

/// Graded dimensions of `Ĥ^•(μ_p, M)`.
pub fn tate_hypercohomology(m: &CyclicComplex) -> TateCohomology {
    if m.complex().total_dim() == 0 {
        return TateCohomology { even: 0, odd: 0 };
    }
    let total = m.complex().total_dim();
    let dim_at = |n: i64| -> usize {
        let d_out = total_differential(m, n);
        let d_in = total_differential(m, n - 1);
        debug_assert!(d_out.mul(&d_in).is_zero(), "total differential squares");
        total - d_out.rank() - d_in.rank()
    };
    TateCohomology {
        even: dim_at(0),
        odd: dim_at(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{Complex, CyclicComplex};
    use crate::matrix::SpMat;
    use crate::scalar::PrimeField;
    use crate::steenrod::steenrod_complex;
    use std::collections::BTreeMap;

    fn f3() -> PrimeField {
        PrimeField::new(3).unwrap()
    }

    #[test]
    fn regular_module_vanishes() {
        for p in [3u64, 5] {
            let field = PrimeField::new(p).unwrap();
            let m = CyclicComplex::regular_representation(field);
            assert!(tate_hypercohomology(&m).is_zero(), "p={p}");
        }
    }

    #[test]
    fn trivial_module_is_periodic_line() {
        let m = CyclicComplex::trivial(Complex::point(f3(), 0));
        let t = tate_hypercohomology(&m);
        assert_eq!(t, TateCohomology { even: 1, odd: 1 });
        assert_eq!(t.at(-4), 1);
        assert_eq!(t.at(7), 1);
    }

    #[test]
    fn power_of_acyclic_vanishes() {
        // St(acyclic) has vanishing Tate hypercohomology
        let field = f3();
        let interval = Complex::new(
            field,
            BTreeMap::from([(0, 1), (1, 1)]),
            BTreeMap::from([(0, SpMat::from_dense(field, &[vec![1]]))]),
        )
        .unwrap();
        let st = steenrod_complex(&interval);
        assert!(tate_hypercohomology(st.cyclic()).is_zero());
    }

    #[test]
    fn degreewise_free_vanishes() {
        // a complex that is free in every degree has vanishing Ĥ
        let field = f3();
        let reg = CyclicComplex::regular_representation(field);
        let two = reg.complex().direct_sum(reg.complex());
        let sigma = BTreeMap::from([(0, {
            let s = reg.sigma_at(0);
            // block diagonal σ ⊕ σ
            let mut triplets = Vec::new();
            for r in 0..3 {
                for &(c, v) in s.row(r) {
                    triplets.push((r, c, v as i64));
                    triplets.push((r + 3, c + 3, v as i64));
                }
            }
            SpMat::from_triplets(field, 6, 6, triplets)
        })]);
        let m = CyclicComplex::new(two, sigma).unwrap();
        assert!(tate_hypercohomology(&m).is_zero());
    }
}
