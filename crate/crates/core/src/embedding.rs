//! The block embedding `psi: M_n(R) -> M_{mn}(Z_p)` induced by an injective
//! ring homomorphism `R -> M_m(Z_p)`, plus the column-stacking map `vec` and
//! the linear operator `L` whose column `h k + g` is
//! `vec(psi(H1)^g psi(Y) psi(H2)^h)`.

use std::fmt::Debug;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::group_ring::{GroupRing, RegularRep};
use crate::matrix::{Matrix, Vector};
use crate::ring::Ring;

/// An injective unital ring homomorphism from `Source` into `m x m`
/// matrices over a prime field.
pub trait RingEmbedding: Clone + Debug {
    type Source: Ring;

    fn source(&self) -> &Self::Source;
    fn field(&self) -> PrimeField;
    /// The matrix size `m`.
    fn degree(&self) -> usize;
    fn embed(&self, a: &<Self::Source as Ring>::Elem) -> Matrix<PrimeField>;
    /// Preimage of an `m x m` block, or `NotInImage`.
    fn recover(&self, block: &Matrix<PrimeField>) -> Result<<Self::Source as Ring>::Elem>;
}

/// `phi` for a group ring, realised by the left-regular representation.
#[derive(Clone, Debug)]
pub struct GroupRingEmbedding {
    ring: GroupRing,
    rep: RegularRep,
}

impl GroupRingEmbedding {
    pub fn new(ring: GroupRing) -> Self {
        let rep = RegularRep::new(ring.group().clone());
        GroupRingEmbedding { ring, rep }
    }

    pub fn rep(&self) -> &RegularRep {
        &self.rep
    }
}

impl RingEmbedding for GroupRingEmbedding {
    type Source = GroupRing;

    fn source(&self) -> &GroupRing {
        &self.ring
    }

    fn field(&self) -> PrimeField {
        self.ring.field()
    }

    fn degree(&self) -> usize {
        self.ring.order()
    }

    fn embed(&self, a: &Vec<u64>) -> Matrix<PrimeField> {
        self.rep.phi_coeffs(a, self.ring.field())
    }

    fn recover(&self, block: &Matrix<PrimeField>) -> Result<Vec<u64>> {
        self.rep.phi_inverse_coeffs(block)
    }
}

/// Embedding data for `n x n` matrices: `k = m n`.
#[derive(Clone, Debug)]
pub struct EmbeddingContext<E: RingEmbedding = GroupRingEmbedding> {
    embedding: E,
    n: usize,
    m: usize,
    k: usize,
}

impl EmbeddingContext<GroupRingEmbedding> {
    pub fn for_group_ring(ring: GroupRing, n: usize) -> Self {
        Self::new(GroupRingEmbedding::new(ring), n)
    }
}

impl<E: RingEmbedding> EmbeddingContext<E> {
    pub fn new(embedding: E, n: usize) -> Self {
        let m = embedding.degree();
        EmbeddingContext {
            embedding,
            n,
            m,
            k: m * n,
        }
    }

    pub fn embedding(&self) -> &E {
        &self.embedding
    }

    pub fn ring(&self) -> &E::Source {
        self.embedding.source()
    }

    pub fn field(&self) -> PrimeField {
        self.embedding.field()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    fn check(&self, a: &Matrix<E::Source>) -> Result<()> {
        if a.ring() != self.ring() {
            return Err(Error::Incompatible(format!("{:?} vs {:?}", a.ring(), self.ring())));
        }
        if a.rows() != self.n || a.cols() != self.n {
            return Err(Error::Shape(format!(
                "expected {n}x{n}, got {}x{}",
                a.rows(),
                a.cols(),
                n = self.n
            )));
        }
        Ok(())
    }

    /// `(psi(A))_{i m + g, j m + h} = (phi(A_{i,j}))_{g,h}`.
    pub fn psi(&self, a: &Matrix<E::Source>) -> Result<Matrix<PrimeField>> {
        self.check(a)?;
        let (n, m) = (self.n, self.m);
        let mut out = Matrix::zeros(self.field(), self.k, self.k);
        for i in 0..n {
            for j in 0..n {
                let block = self.embedding.embed(a.get(i, j));
                out.set_block(i * m, j * m, &block);
            }
        }
        Ok(out)
    }

    /// Inverts `psi` block by block.
    pub fn psi_inverse(&self, mx: &Matrix<PrimeField>) -> Result<Matrix<E::Source>> {
        if mx.ring() != &self.field() {
            return Err(Error::Incompatible("matrix modulus differs from the context's".into()));
        }
        if mx.rows() != self.k || mx.cols() != self.k {
            return Err(Error::Shape(format!(
                "expected {k}x{k}, got {}x{}",
                mx.rows(),
                mx.cols(),
                k = self.k
            )));
        }
        let (n, m) = (self.n, self.m);
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let block = mx.block(i * m, j * m, m, m);
                let elem = self.embedding.recover(&block).map_err(|e| match e {
                    Error::NotInImage(why) => Error::NotInImage(format!("block ({i}, {j}): {why}")),
                    other => other,
                })?;
                entries.push(elem);
            }
        }
        Matrix::new(self.ring().clone(), n, n, entries)
    }

    /// Precomputes the powers needed for `L` with respect to `(H1, H2)`.
    pub fn l_operator(&self, h1: &Matrix<E::Source>, h2: &Matrix<E::Source>) -> Result<LOperator> {
        let p1 = self.psi(h1)?;
        let p2 = self.psi(h2)?;
        Ok(LOperator {
            k: self.k,
            field: self.field(),
            left: p1.powers(self.k)?,
            right: p2.powers(self.k)?,
        })
    }

    /// `L(psi(Y))` as a `k^2 x k^2` matrix.
    pub fn build_l(
        &self,
        y: &Matrix<E::Source>,
        h1: &Matrix<E::Source>,
        h2: &Matrix<E::Source>,
    ) -> Result<Matrix<PrimeField>> {
        self.l_operator(h1, h2)?.matrix(&self.psi(y)?)
    }
}

/// Column-stacking: `vec(A)_{j k + i} = A_{i,j}`.
pub fn vec(mx: &Matrix<PrimeField>) -> Result<Vector<PrimeField>> {
    if !mx.is_square() {
        return Err(Error::Shape(format!("vec of a {}x{} matrix", mx.rows(), mx.cols())));
    }
    let k = mx.rows();
    let data = (0..k * k).map(|idx| *mx.get(idx % k, idx / k)).collect();
    Ok(Vector::from_raw(*mx.ring(), data))
}

/// Inverse of [`vec`]; the length must be a perfect square.
pub fn unvec(v: &Vector<PrimeField>) -> Result<Matrix<PrimeField>> {
    let len = v.len();
    let k = (len as f64).sqrt().round() as usize;
    if k * k != len {
        return Err(Error::Shape(format!("vector length {len} is not a square")));
    }
    Ok(Matrix::from_fn(*v.ring(), k, k, |i, j| *v.get(j * k + i)))
}

/// `L` for fixed `(H1, H2)`: holds `psi(H1)^g` and `psi(H2)^h` for
/// `0 <= g, h < k`.
#[derive(Clone, Debug)]
pub struct LOperator {
    k: usize,
    field: PrimeField,
    left: Vec<Matrix<PrimeField>>,
    right: Vec<Matrix<PrimeField>>,
}

impl LOperator {
    pub fn k(&self) -> usize {
        self.k
    }

    fn check(&self, py: &Matrix<PrimeField>) -> Result<()> {
        if py.rows() != self.k || py.cols() != self.k {
            return Err(Error::Shape(format!("expected a {k}x{k} matrix", k = self.k)));
        }
        if py.ring() != &self.field {
            return Err(Error::Incompatible("matrix modulus differs from the operator's".into()));
        }
        Ok(())
    }

    /// The `k^2 x k^2` matrix of `L` at an already embedded `psi(Y)`.
    pub fn matrix(&self, py: &Matrix<PrimeField>) -> Result<Matrix<PrimeField>> {
        self.check(py)?;
        let k = self.k;
        let kk = k * k;
        let mut out = Matrix::zeros(self.field, kk, kk);
        let data = out.data_mut();
        for (g, left) in self.left.iter().enumerate() {
            let ly = left.mul(py)?;
            for (h, right) in self.right.iter().enumerate() {
                let z = ly.mul(right)?;
                let col = h * k + g;
                for i in 0..k {
                    for j in 0..k {
                        data[(j * k + i) * kk + col] = *z.get(i, j);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `unvec(L(psi(Y)) t) = sum_h (sum_g t_{h k + g} psi(H1)^g psi(Y)) psi(H2)^h`,
    /// without materialising `L`.
    pub fn apply(&self, py: &Matrix<PrimeField>, t: &Vector<PrimeField>) -> Result<Matrix<PrimeField>> {
        self.check(py)?;
        let k = self.k;
        if t.len() != k * k {
            return Err(Error::Shape(format!("expected a vector of length {}", k * k)));
        }
        let f = self.field;
        let ly: Vec<Matrix<PrimeField>> = self.left.iter().map(|l| l.mul(py)).collect::<Result<_>>()?;
        let mut acc = Matrix::zeros(f, k, k);
        for (h, right) in self.right.iter().enumerate() {
            let mut s = Matrix::zeros(f, k, k);
            for (g, lyg) in ly.iter().enumerate() {
                let coeff = *t.get(h * k + g);
                if coeff != 0 {
                    f.axpy(s.data_mut(), &coeff, lyg.data());
                }
            }
            acc = acc.add(&s.mul(right)?)?;
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn ctx(name: &str, p: u64, n: usize) -> EmbeddingContext {
        let g = GroupSpec::builtin(name).unwrap().build().unwrap();
        let ring = GroupRing::new(PrimeField::with_prime(p).unwrap(), Arc::new(g.table));
        EmbeddingContext::for_group_ring(ring, n)
    }

    #[test]
    fn vec_examples() {
        let f = PrimeField::with_prime(11).unwrap();
        let a = Matrix::from_rows(f, vec![vec![1, 2], vec![3, 4]]).unwrap();
        assert_eq!(vec(&a).unwrap().data(), &[1, 3, 2, 4]);
        assert!(vec(&Matrix::zeros(f, 3, 3)).unwrap().is_zero());
        assert_eq!(unvec(&vec(&a).unwrap()).unwrap(), a);
        assert!(vec(&Matrix::zeros(f, 2, 3)).is_err());
        assert!(unvec(&Vector::zeros(f, 5)).is_err());
    }

    #[test]
    fn psi_unit_and_trivial_group() {
        let c = ctx("s3", 7, 2);
        let id = Matrix::identity(c.ring().clone(), 2);
        assert_eq!(c.psi(&id).unwrap(), Matrix::identity(c.field(), 12));
        assert_eq!(c.psi_inverse(&Matrix::identity(c.field(), 12)).unwrap(), id);

        let t = ctx("trivial", 5, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = Matrix::random(t.ring().clone(), 3, 3, &mut rng);
        let pa = t.psi(&a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(*pa.get(i, j), a.get(i, j)[0]);
            }
        }
    }

    #[test]
    fn psi_is_a_ring_homomorphism() {
        let c = ctx("s3", 7, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let a = Matrix::random(c.ring().clone(), 2, 2, &mut rng);
            let b = Matrix::random(c.ring().clone(), 2, 2, &mut rng);
            let (pa, pb) = (c.psi(&a).unwrap(), c.psi(&b).unwrap());
            assert_eq!(c.psi(&a.mul(&b).unwrap()).unwrap(), pa.mul(&pb).unwrap());
            assert_eq!(c.psi(&a.add(&b).unwrap()).unwrap(), pa.add(&pb).unwrap());
            assert_eq!(c.psi_inverse(&pa).unwrap(), a);
        }
    }

    #[test]
    fn corrupted_block_is_rejected() {
        let c = ctx("s3", 7, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = Matrix::random(c.ring().clone(), 2, 2, &mut rng);
        let mut pa = c.psi(&a).unwrap();
        let v = *pa.get(7, 10);
        pa.set(7, 10, (v + 1) % 7);
        assert!(matches!(c.psi_inverse(&pa), Err(Error::NotInImage(_))));
    }

    #[test]
    fn l_examples() {
        let c = ctx("s3", 7, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let y = Matrix::random(c.ring().clone(), 1, 1, &mut rng);
        let id = Matrix::identity(c.ring().clone(), 1);
        let l = c.build_l(&y, &id, &id).unwrap();
        let vy = vec(&c.psi(&y).unwrap()).unwrap();
        for col in 0..36 {
            for row in 0..36 {
                assert_eq!(l.get(row, col), vy.get(row));
            }
        }
        let zero = Matrix::zeros(c.ring().clone(), 1, 1);
        let h = Matrix::random(c.ring().clone(), 1, 1, &mut rng);
        assert!(c.build_l(&zero, &h, &h).unwrap().is_zero());

        let t = ctx("trivial", 5, 1);
        let f = |v: u64| Matrix::new(t.ring().clone(), 1, 1, vec![vec![v]]).unwrap();
        assert_eq!(t.build_l(&f(1), &f(2), &f(3)).unwrap().data(), &[1]);
    }

    #[test]
    fn l_columns_and_linearity() {
        let c = ctx("s3", 5, 2);
        let k = c.k();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let r = c.ring().clone();
        let (y, y2, h1, h2) = (
            Matrix::random(r.clone(), 2, 2, &mut rng),
            Matrix::random(r.clone(), 2, 2, &mut rng),
            Matrix::random(r.clone(), 2, 2, &mut rng),
            Matrix::random(r.clone(), 2, 2, &mut rng),
        );
        let op = c.l_operator(&h1, &h2).unwrap();
        let l = op.matrix(&c.psi(&y).unwrap()).unwrap();
        for _ in 0..10 {
            let (g, h) = (rng.gen_range(0..k), rng.gen_range(0..k));
            let direct = h1
                .pow(g as u64)
                .unwrap()
                .mul(&y)
                .unwrap()
                .mul(&h2.pow(h as u64).unwrap())
                .unwrap();
            let expected = vec(&c.psi(&direct).unwrap()).unwrap();
            for row in 0..k * k {
                assert_eq!(l.get(row, h * k + g), expected.get(row));
            }
        }
        let l2 = c.build_l(&y2, &h1, &h2).unwrap();
        let lsum = c.build_l(&y.add(&y2).unwrap(), &h1, &h2).unwrap();
        assert_eq!(lsum, l.add(&l2).unwrap());

        let t = Vector::new(c.field(), (0..k * k).map(|_| rng.gen_range(0..5)).collect()).unwrap();
        let via_matrix = unvec(&l.mul_vector(&t).unwrap()).unwrap();
        assert_eq!(op.apply(&c.psi(&y).unwrap(), &t).unwrap(), via_matrix);
    }

    #[test]
    fn context_mismatch() {
        let c = ctx("s3", 7, 2);
        let other = ctx("s3", 5, 2);
        let a = Matrix::identity(other.ring().clone(), 2);
        assert!(matches!(c.psi(&a), Err(Error::Incompatible(_))));
        let wrong = Matrix::identity(c.ring().clone(), 3);
        assert!(matches!(c.psi(&wrong), Err(Error::Shape(_))));
    }
}
