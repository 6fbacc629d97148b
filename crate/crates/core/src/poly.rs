//! Univariate polynomials, characteristic polynomials and reduction of
//! `X^x` modulo a monic polynomial.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::ring::{CommutativeRing, Ring};

/// Coefficients in ascending degree; the leading coefficient is nonzero
/// unless the polynomial is zero (empty coefficient list).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Polynomial<R: Ring> {
    ring: R,
    coeffs: Vec<R::Elem>,
}

impl<R: Ring> Polynomial<R> {
    pub fn new(ring: R, mut coeffs: Vec<R::Elem>) -> Self {
        while coeffs.last().is_some_and(|c| ring.is_zero(c)) {
            coeffs.pop();
        }
        Polynomial { ring, coeffs }
    }

    pub fn zero(ring: R) -> Self {
        Polynomial {
            ring,
            coeffs: Vec::new(),
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn coeffs(&self) -> &[R::Elem] {
        &self.coeffs
    }

    /// Coefficient of `X^i`, zero beyond the degree.
    pub fn coeff(&self, i: usize) -> R::Elem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| self.ring.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| *c == self.ring.one())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n).map(|i| self.ring.add(&self.coeff(i), &other.coeff(i))).collect();
        Self::new(self.ring.clone(), c)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ring.clone());
        }
        let mut out = vec![self.ring.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let prod = self.ring.mul(a, b);
                self.ring.add_assign(&mut out[i + j], &prod);
            }
        }
        Self::new(self.ring.clone(), out)
    }

    /// Remainder modulo a monic polynomial of degree at least one.
    pub fn rem_monic(&self, modulus: &Self) -> Result<Self> {
        let k = check_modulus(modulus)?;
        let mut c = self.coeffs.clone();
        reduce_in_place(&self.ring, &mut c, &modulus.coeffs, k);
        Ok(Self::new(self.ring.clone(), c))
    }

    /// `sum_i c_i A^i` by Horner's rule.
    pub fn eval_matrix(&self, a: &Matrix<R>) -> Result<Matrix<R>> {
        let n = a.rows();
        let mut acc = Matrix::zeros(self.ring.clone(), n, n);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(a)?;
            for i in 0..n {
                let v = self.ring.add(acc.get(i, i), c);
                acc.set(i, i, v);
            }
        }
        Ok(acc)
    }
}

fn check_modulus<R: Ring>(modulus: &Polynomial<R>) -> Result<usize> {
    match modulus.degree() {
        None => Err(Error::InvalidInput("zero modulus polynomial".into())),
        Some(0) => Err(Error::InvalidInput("modulus polynomial must have degree >= 1".into())),
        Some(_) if !modulus.is_monic() => Err(Error::InvalidInput("modulus polynomial is not monic".into())),
        Some(k) => Ok(k),
    }
}

// Reduce `c` modulo the monic `m` of degree `k`, leaving at most `k` coefficients.
fn reduce_in_place<R: Ring>(ring: &R, c: &mut Vec<R::Elem>, m: &[R::Elem], k: usize) {
    while c.len() > k {
        let lead = c.pop().expect("nonempty");
        if ring.is_zero(&lead) {
            continue;
        }
        let shift = c.len() - k;
        // X^(shift+k) = -(m_0 + ... + m_{k-1} X^{k-1}) X^shift
        for (i, mi) in m[..k].iter().enumerate() {
            let prod = ring.mul(&lead, mi);
            c[shift + i] = ring.sub(&c[shift + i], &prod);
        }
    }
}

/// Characteristic polynomial `det(X I - A)` by Berkowitz's division-free
/// algorithm, so it is valid over every commutative ring (in particular over
/// `Z_p` with `p` no larger than the matrix size).
pub fn char_poly<R: CommutativeRing>(a: &Matrix<R>) -> Result<Polynomial<R>> {
    if !a.is_square() {
        return Err(Error::Shape(format!("char_poly of a {}x{} matrix", a.rows(), a.cols())));
    }
    let ring = a.ring().clone();
    let n = a.rows();
    // Coefficients in descending degree.
    let mut v = vec![ring.one()];
    for r in 0..n {
        let mut toeplitz = Vec::with_capacity(r + 2);
        toeplitz.push(ring.one());
        toeplitz.push(ring.neg(a.get(r, r)));
        let row = &a.row(r)[..r];
        let mut w: Vec<R::Elem> = (0..r).map(|i| a.get(i, r).clone()).collect();
        for step in 0..r {
            toeplitz.push(ring.neg(&ring.dot(row, &w)));
            if step + 1 < r {
                w = (0..r).map(|i| ring.dot(&a.row(i)[..r], &w)).collect();
            }
        }
        let next: Vec<R::Elem> = (0..r + 2)
            .map(|i| {
                let mut acc = ring.zero();
                for (j, vj) in v.iter().enumerate().take(i + 1) {
                    let prod = ring.mul(&toeplitz[i - j], vj);
                    ring.add_assign(&mut acc, &prod);
                }
                acc
            })
            .collect();
        v = next;
    }
    v.reverse();
    Ok(Polynomial::new(ring, v))
}

/// `X^x mod chi` for a monic `chi` of degree `k >= 1`, by square-and-multiply
/// in `R[X]/(chi)`. The result has degree below `k`.
pub fn poly_pow_mod<R: CommutativeRing>(chi: &Polynomial<R>, mut x: u64) -> Result<Polynomial<R>> {
    let k = check_modulus(chi)?;
    let ring = chi.ring().clone();
    let m = chi.coeffs();
    let mulmod = |a: &[R::Elem], b: &[R::Elem]| -> Vec<R::Elem> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![ring.zero(); a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if ring.is_zero(ai) {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                let prod = ring.mul(ai, bj);
                ring.add_assign(&mut out[i + j], &prod);
            }
        }
        reduce_in_place(&ring, &mut out, m, k);
        out
    };
    let mut base = vec![ring.zero(), ring.one()];
    reduce_in_place(&ring, &mut base, m, k);
    let mut acc = vec![ring.one()];
    while x > 0 {
        if x & 1 == 1 {
            acc = mulmod(&acc, &base);
        }
        x >>= 1;
        if x > 0 {
            base = mulmod(&base, &base);
        }
    }
    Ok(Polynomial::new(ring, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp(p: u64) -> PrimeField {
        PrimeField::with_prime(p).unwrap()
    }

    // det(XI - A) by the Leibniz formula, with entries in Z_p[X].
    fn leibniz_char_poly(a: &Matrix<PrimeField>) -> Polynomial<PrimeField> {
        let f = *a.ring();
        let n = a.rows();
        let entry = |i: usize, j: usize| {
            let c = f.neg(a.get(i, j));
            if i == j {
                Polynomial::new(f, vec![c, 1])
            } else {
                Polynomial::new(f, vec![c])
            }
        };
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = Polynomial::zero(f);
        // All n^n index maps, keeping the bijections.
        let mut idx = vec![0usize; n];
        loop {
            let mut seen = vec![false; n];
            if idx.iter().all(|&j| !std::mem::replace(&mut seen[j], true)) {
                perm.copy_from_slice(&idx);
                let inversions = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| perm[i] > perm[j])
                    .count();
                let mut term = Polynomial::new(f, vec![1]);
                for (i, &j) in perm.iter().enumerate() {
                    term = term.mul(&entry(i, j));
                }
                if inversions % 2 == 1 {
                    term = Polynomial::new(f, term.coeffs().iter().map(|c| f.neg(c)).collect());
                }
                total = total.add(&term);
            }
            let mut pos = 0;
            while pos < n {
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == n {
                break;
            }
        }
        total
    }

    #[test]
    fn identity_char_poly_is_binomial() {
        let f = fp(7);
        let chi = char_poly(&Matrix::identity(f, 4)).unwrap();
        // (X - 1)^4 = X^4 - 4X^3 + 6X^2 - 4X + 1
        assert_eq!(chi.coeffs(), &[1, 3, 6, 3, 1]);
    }

    #[test]
    fn two_by_two_formula() {
        let f = fp(101);
        let (a, b, c, d) = (3, 17, 40, 99);
        let m = Matrix::from_rows(f, vec![vec![a, b], vec![c, d]]).unwrap();
        let chi = char_poly(&m).unwrap();
        let det = f.sub(&f.mul(&a, &d), &f.mul(&b, &c));
        assert_eq!(chi.coeffs(), &[det, f.neg(&f.add(&a, &d)), 1]);
    }

    #[test]
    fn matches_leibniz_over_z5() {
        let f = fp(5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = Matrix::random(f, 3, 3, &mut rng);
            assert_eq!(char_poly(&a).unwrap(), leibniz_char_poly(&a));
        }
        let a = Matrix::random(f, 4, 4, &mut rng);
        assert_eq!(char_poly(&a).unwrap(), leibniz_char_poly(&a));
    }

    #[test]
    fn cayley_hamilton_small_primes() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &p in &[2, 3, 5] {
            for k in 1..=6 {
                let a = Matrix::random(fp(p), k, k, &mut rng);
                let chi = char_poly(&a).unwrap();
                assert_eq!(chi.degree(), Some(k));
                assert!(chi.is_monic());
                assert!(chi.eval_matrix(&a).unwrap().is_zero());
            }
        }
        assert!(char_poly(&Matrix::zeros(fp(5), 2, 3)).is_err());
    }

    #[test]
    fn pow_mod_examples() {
        let f = fp(5);
        let x2 = Polynomial::new(f, vec![0, 0, 1]);
        assert!(poly_pow_mod(&x2, 3).unwrap().is_zero());
        let lin = Polynomial::new(f, vec![f.neg(&2), 1]);
        assert_eq!(poly_pow_mod(&lin, 3).unwrap().coeffs(), &[3]);
    }

    #[test]
    fn pow_mod_rejects_bad_modulus() {
        let f = fp(5);
        assert!(poly_pow_mod(&Polynomial::zero(f), 3).is_err());
        assert!(poly_pow_mod(&Polynomial::new(f, vec![1, 2]), 3).is_err());
        assert!(poly_pow_mod(&Polynomial::new(f, vec![4]), 3).is_err());
    }

    #[test]
    fn pow_mod_matches_schoolbook_division() {
        let f = fp(7);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let chi = Polynomial::new(
                f,
                vec![rng.gen_range(0..7), rng.gen_range(0..7), rng.gen_range(0..7), 1],
            );
            // Long division of X^20 by chi, one leading term at a time.
            let mut rem = vec![0u64; 21];
            rem[20] = 1;
            for top in (3..=20).rev() {
                let lead = rem[top];
                for i in 0..=3 {
                    rem[top - 3 + i] = f.sub(&rem[top - 3 + i], &f.mul(&lead, &chi.coeff(i)));
                }
            }
            rem.truncate(3);
            assert_eq!(poly_pow_mod(&chi, 20).unwrap(), Polynomial::new(f, rem));
        }
    }

    #[test]
    fn matrix_power_through_char_poly() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for &p in &[2, 3, 7, 101] {
            let f = fp(p);
            let a = Matrix::random(f, 4, 4, &mut rng);
            let chi = char_poly(&a).unwrap();
            for _ in 0..5 {
                let x = rng.gen_range(0..1u64 << 16);
                let c = poly_pow_mod(&chi, x).unwrap();
                assert_eq!(c.eval_matrix(&a).unwrap(), a.pow(x).unwrap());
            }
        }
    }
}
