//! The group ring `Z_p[G]`, the left-regular representation `g -> T_g` and
//! the injective homomorphism `phi: Z_p[G] -> M_m(Z_p)`.

use std::fmt;
use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::group::FiniteGroupTable;
use crate::matrix::Matrix;
use crate::ring::Ring;

/// `Z_p[G]`. Elements are coefficient vectors indexed by the group's
/// element numbering.
#[derive(Clone)]
pub struct GroupRing {
    field: PrimeField,
    group: Arc<FiniteGroupTable>,
}

impl GroupRing {
    pub fn new(field: PrimeField, group: Arc<FiniteGroupTable>) -> Self {
        GroupRing { field, group }
    }

    /// `Z_p[1]`, isomorphic to `Z_p` itself.
    pub fn trivial(field: PrimeField) -> Self {
        let table = FiniteGroupTable::from_table(vec![vec![0]]).expect("trivial table");
        Self::new(field, Arc::new(table))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn group(&self) -> &Arc<FiniteGroupTable> {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn element(&self, coeffs: Vec<u64>) -> Result<GroupRingElement> {
        GroupRingElement::new(self.clone(), coeffs)
    }

    /// The basis element `1 * g_i`.
    pub fn basis(&self, i: usize) -> Vec<u64> {
        let mut c = vec![0; self.order()];
        c[i] = 1;
        c
    }
}

impl PartialEq for GroupRing {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && (Arc::ptr_eq(&self.group, &other.group) || self.group == other.group)
    }
}

impl fmt::Debug for GroupRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z_{}[G], |G| = {}", self.field.p(), self.order())
    }
}

impl Ring for GroupRing {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.order()]
    }

    fn one(&self) -> Vec<u64> {
        self.basis(0)
    }

    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.field.add(x, y)).collect()
    }

    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.field.sub(x, y)).collect()
    }

    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| self.field.neg(x)).collect()
    }

    /// Convolution over the group table: the coefficient of `g_k` is the sum
    /// of `a_i b_j` over all `g_i g_j = g_k`.
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let m = self.order();
        let mut out = vec![0u64; m];
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (&k, bj) in self.group.row(i).iter().zip(b) {
                let prod = self.field.mul(ai, bj);
                out[k as usize] = self.field.add(&out[k as usize], &prod);
            }
        }
        out
    }

    fn from_u64(&self, v: u64) -> Vec<u64> {
        let mut c = self.zero();
        c[0] = self.field.reduce(v);
        c
    }

    fn contains(&self, a: &Vec<u64>) -> bool {
        a.len() == self.order() && a.iter().all(|c| self.field.contains(c))
    }

    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&c| c == 0)
    }

    fn sample<G: Rng + ?Sized>(&self, rng: &mut G) -> Vec<u64> {
        (0..self.order()).map(|_| self.field.sample(rng)).collect()
    }
}

/// A formal sum `sum_g a_g g` tied to its ring.
#[derive(Clone, PartialEq, Debug)]
pub struct GroupRingElement {
    ring: GroupRing,
    coeffs: Vec<u64>,
}

impl GroupRingElement {
    pub fn new(ring: GroupRing, coeffs: Vec<u64>) -> Result<Self> {
        if !ring.contains(&coeffs) {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients below {}",
                ring.order(),
                ring.field.p()
            )));
        }
        Ok(GroupRingElement { ring, coeffs })
    }

    pub fn zero(ring: GroupRing) -> Self {
        GroupRingElement {
            coeffs: ring.zero(),
            ring,
        }
    }

    pub fn one(ring: GroupRing) -> Self {
        GroupRingElement {
            coeffs: ring.one(),
            ring,
        }
    }

    pub fn random<G: Rng + ?Sized>(ring: GroupRing, rng: &mut G) -> Self {
        GroupRingElement {
            coeffs: ring.sample(rng),
            ring,
        }
    }

    pub fn ring(&self) -> &GroupRing {
        &self.ring
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.ring == other.ring {
            Ok(())
        } else {
            Err(Error::Incompatible(format!("{:?} vs {:?}", self.ring, other.ring)))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(GroupRingElement {
            coeffs: self.ring.add(&self.coeffs, &other.coeffs),
            ring: self.ring.clone(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(GroupRingElement {
            coeffs: self.ring.sub(&self.coeffs, &other.coeffs),
            ring: self.ring.clone(),
        })
    }

    pub fn neg(&self) -> Self {
        GroupRingElement {
            coeffs: self.ring.neg(&self.coeffs),
            ring: self.ring.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(GroupRingElement {
            coeffs: self.ring.mul(&self.coeffs, &other.coeffs),
            ring: self.ring.clone(),
        })
    }
}

/// Left-regular representation: `perms[g][j]` is the index of `g * g_j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RegularRep {
    group: Arc<FiniteGroupTable>,
    perms: Vec<Vec<usize>>,
}

impl RegularRep {
    pub fn new(group: Arc<FiniteGroupTable>) -> Self {
        let perms = (0..group.order())
            .map(|g| group.row(g).iter().map(|&k| k as usize).collect())
            .collect();
        RegularRep { group, perms }
    }

    pub fn group(&self) -> &Arc<FiniteGroupTable> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.group.order()
    }

    pub fn perm(&self, g: usize) -> &[usize] {
        &self.perms[g]
    }

    /// `T_g` as a 0/1 matrix: `(T_g)_{k,j} = 1` iff `g g_j = g_k`.
    pub fn matrix(&self, g: usize, field: PrimeField) -> Matrix<PrimeField> {
        let m = self.degree();
        let mut t = Matrix::zeros(field, m, m);
        for (j, &k) in self.perms[g].iter().enumerate() {
            t.set(k, j, 1);
        }
        t
    }

    fn check_ring(&self, ring: &GroupRing) -> Result<()> {
        if Arc::ptr_eq(&self.group, &ring.group) || *self.group == *ring.group {
            Ok(())
        } else {
            Err(Error::Incompatible(
                "representation and element use different groups".into(),
            ))
        }
    }

    /// `phi(a) = sum_g a_g T_g` for raw coefficients.
    pub fn phi_coeffs(&self, coeffs: &[u64], field: PrimeField) -> Matrix<PrimeField> {
        let m = self.degree();
        let mut out = Matrix::zeros(field, m, m);
        for (g, &a) in coeffs.iter().enumerate() {
            for (j, &k) in self.perms[g].iter().enumerate() {
                out.set(k, j, a);
            }
        }
        out
    }

    pub fn phi(&self, a: &GroupRingElement) -> Result<Matrix<PrimeField>> {
        self.check_ring(&a.ring)?;
        Ok(self.phi_coeffs(&a.coeffs, a.ring.field))
    }

    /// Coefficients `a` with `phi(a) = mx`. Column 0 determines the
    /// candidate (`a_g` sits at row `index(g g_0) = g`); every other column is
    /// then checked against it.
    pub fn phi_inverse_coeffs(&self, mx: &Matrix<PrimeField>) -> Result<Vec<u64>> {
        let m = self.degree();
        if mx.rows() != m || mx.cols() != m {
            return Err(Error::Shape(format!(
                "expected {m}x{m}, got {}x{}",
                mx.rows(),
                mx.cols()
            )));
        }
        let coeffs: Vec<u64> = (0..m).map(|g| *mx.get(self.perms[g][0], 0)).collect();
        for (g, &a) in coeffs.iter().enumerate() {
            for (j, &k) in self.perms[g].iter().enumerate().skip(1) {
                if *mx.get(k, j) != a {
                    return Err(Error::NotInImage(format!(
                        "entry ({k}, {j}) disagrees with the coefficient read from column 0"
                    )));
                }
            }
        }
        Ok(coeffs)
    }

    pub fn phi_inverse(&self, mx: &Matrix<PrimeField>, ring: &GroupRing) -> Result<GroupRingElement> {
        self.check_ring(ring)?;
        if mx.ring() != &ring.field {
            return Err(Error::Incompatible("matrix modulus differs from the ring's".into()));
        }
        let coeffs = self.phi_inverse_coeffs(mx)?;
        GroupRingElement::new(ring.clone(), coeffs)
    }
}
