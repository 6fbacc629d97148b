//! Arithmetic in `Z_p` for a prime `p < 2^64`.
//!
//! Values are always kept as canonical representatives in `[0, p)`. Moduli
//! below `2^32` take a single-word fast path for products.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::ring::{CommutativeRing, Field, Ring};

const SMALL_LIMIT: u64 = 1 << 32;

/// A prime modulus, checked at construction.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PrimeModulus(u64);

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(PrimeModulus(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
fn mul_mod_u64(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod_u64(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, p);
        }
        base = mul_mod_u64(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin. The first twelve primes as witnesses are
/// sufficient for every `n < 3.3 * 10^24`, hence for all of `u64`.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &w in &WITNESSES {
        if n == w {
            return true;
        }
        if n.is_multiple_of(w) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The field `Z_p`; elements are bare `u64` residues.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PrimeField {
    modulus: PrimeModulus,
}

impl PrimeField {
    pub fn new(modulus: PrimeModulus) -> Self {
        PrimeField { modulus }
    }

    pub fn with_prime(p: u64) -> Result<Self> {
        Ok(Self::new(PrimeModulus::new(p)?))
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.modulus.0
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.p()
    }

    pub fn element(&self, v: u64) -> FieldElement {
        FieldElement {
            value: self.reduce(v),
            modulus: self.modulus,
        }
    }

    pub fn pow(&self, base: u64, exp: u64) -> u64 {
        pow_mod_u64(base, exp, self.p())
    }
}

impl Ring for PrimeField {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }

    #[inline]
    fn one(&self) -> u64 {
        1
    }

    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let p = self.p();
        let (s, carry) = a.overflowing_add(*b);
        if carry || s >= p {
            s.wrapping_sub(p)
        } else {
            s
        }
    }

    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            self.p() - (b - a)
        }
    }

    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p() - a
        }
    }

    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        let p = self.p();
        if p < SMALL_LIMIT {
            (a * b) % p
        } else {
            mul_mod_u64(*a, *b, p)
        }
    }

    fn from_u64(&self, v: u64) -> u64 {
        self.reduce(v)
    }

    fn contains(&self, a: &u64) -> bool {
        *a < self.p()
    }

    #[inline]
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }

    fn dot(&self, a: &[u64], b: &[u64]) -> u64 {
        debug_assert_eq!(a.len(), b.len());
        let p = self.p();
        if p < SMALL_LIMIT {
            // Each product is below 2^64, so 2^64 of them fit in the accumulator.
            let acc: u128 = a.iter().zip(b).map(|(x, y)| (x * y) as u128).sum();
            (acc % p as u128) as u64
        } else {
            let acc: u128 = a.iter().zip(b).map(|(x, y)| mul_mod_u64(*x, *y, p) as u128).sum();
            (acc % p as u128) as u64
        }
    }

    fn axpy(&self, y: &mut [u64], s: &u64, x: &[u64]) {
        debug_assert_eq!(x.len(), y.len());
        let p = self.p();
        let s = *s;
        if s == 0 {
            return;
        }
        if p < SMALL_LIMIT {
            // y + s*x < p + p^2 < 2^64 for p < 2^32.
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi = (*yi + s * xi) % p;
            }
        } else {
            for (yi, xi) in y.iter_mut().zip(x) {
                *yi = self.add(yi, &mul_mod_u64(s, *xi, p));
            }
        }
    }

    fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> u64 {
        rng.gen_range(0..self.p())
    }
}

impl CommutativeRing for PrimeField {}

impl Field for PrimeField {
    fn inv(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return None;
        }
        // Extended Euclid on signed 128-bit values.
        let p = self.p() as i128;
        let (mut r0, mut r1) = (p, *a as i128);
        let (mut t0, mut t1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (t0, t1) = (t1, t0 - q * t1);
        }
        debug_assert_eq!(r0, 1);
        Some(t0.rem_euclid(p) as u64)
    }
}

/// A single residue tagged with its modulus.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FieldElement {
    value: u64,
    modulus: PrimeModulus,
}

impl FieldElement {
    pub fn new(value: u64, modulus: PrimeModulus) -> Self {
        FieldElement {
            value: value % modulus.value(),
            modulus,
        }
    }

    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> PrimeModulus {
        self.modulus
    }

    fn field(self) -> PrimeField {
        PrimeField::new(self.modulus)
    }

    fn check(self, other: FieldElement) {
        assert_eq!(self.modulus, other.modulus, "field elements with different moduli");
    }

    pub fn inv(self) -> Result<FieldElement> {
        let value = self.field().inv(&self.value).ok_or(Error::DivisionByZero)?;
        Ok(FieldElement { value, ..self })
    }

    pub fn pow(self, exp: u64) -> FieldElement {
        FieldElement {
            value: self.field().pow(self.value, exp),
            ..self
        }
    }
}

impl Add for FieldElement {
    type Output = FieldElement;
    fn add(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement {
            value: self.field().add(&self.value, &rhs.value),
            ..self
        }
    }
}

impl Sub for FieldElement {
    type Output = FieldElement;
    fn sub(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement {
            value: self.field().sub(&self.value, &rhs.value),
            ..self
        }
    }
}

impl Mul for FieldElement {
    type Output = FieldElement;
    fn mul(self, rhs: FieldElement) -> FieldElement {
        self.check(rhs);
        FieldElement {
            value: self.field().mul(&self.value, &rhs.value),
            ..self
        }
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            value: self.field().neg(&self.value),
            ..self
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}
