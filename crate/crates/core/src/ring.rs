//! Context-carrying ring abstraction.
//!
//! Elements are plain data; the ring value carries the modulus (and, for
//! group rings, the multiplication table). All algorithms in this crate are
//! written against these traits so the same matrix code serves `Z_p` and
//! `Z_p[G]`.

use std::fmt::Debug;

use rand::Rng;

pub trait Ring: Clone + PartialEq + Debug {
    type Elem: Clone + PartialEq + Eq + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;

    /// Image of the integer `v` under the unique ring map `Z -> R`.
    fn from_u64(&self, v: u64) -> Self::Elem;

    /// True if `a` is a canonical element of this ring.
    fn contains(&self, a: &Self::Elem) -> bool;

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn add_assign(&self, a: &mut Self::Elem, b: &Self::Elem) {
        *a = self.add(a, b);
    }

    /// Sum of `a[i] * b[i]`.
    fn dot(&self, a: &[Self::Elem], b: &[Self::Elem]) -> Self::Elem {
        debug_assert_eq!(a.len(), b.len());
        let mut acc = self.zero();
        for (x, y) in a.iter().zip(b) {
            let prod = self.mul(x, y);
            self.add_assign(&mut acc, &prod);
        }
        acc
    }

    /// `y += s * x`, element-wise.
    fn axpy(&self, y: &mut [Self::Elem], s: &Self::Elem, x: &[Self::Elem]) {
        debug_assert_eq!(x.len(), y.len());
        for (yi, xi) in y.iter_mut().zip(x) {
            let prod = self.mul(s, xi);
            self.add_assign(yi, &prod);
        }
    }

    /// Uniformly random element.
    fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> Self::Elem;
}

/// Marker for rings whose multiplication commutes (Cayley-Hamilton applies).
pub trait CommutativeRing: Ring {}

pub trait Field: CommutativeRing {
    /// Multiplicative inverse, `None` for zero.
    fn inv(&self, a: &Self::Elem) -> Option<Self::Elem>;
}
