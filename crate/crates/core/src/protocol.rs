//! MAKE: Diffie-Hellman-style key exchange in the semidirect product of the
//! additive group `M_n(R)` by the cyclic semigroup generated by `(H1, H2)`.
//!
//! The product rule is `(A, (H1^i, H2^i)) (A', (H1^j, H2^j)) =
//! (H1^j A H2^j + A', (H1^(i+j), H2^(i+j)))`, so the `e`-th power of
//! `(M, (H1, H2))` has first component `sum_{i<e} H1^i M H2^i`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{EmbeddingContext, RingEmbedding};
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::group::GroupSpec;
use crate::group_ring::GroupRing;
use crate::linalg::rank;
use crate::matrix::Matrix;
use crate::ring::Ring;

pub const DEFAULT_EXPONENT_BITS: u32 = 20;
pub const MAX_EXPONENT_BITS: u32 = 63;
/// Rejection-sampling budget for each singular public matrix.
pub const MAX_SINGULAR_ATTEMPTS: usize = 1 << 16;

/// Public data `(M, H1, H2)` over a ring `R`.
#[derive(Clone, PartialEq, Debug)]
pub struct PublicParams<R: Ring> {
    pub m: Matrix<R>,
    pub h1: Matrix<R>,
    pub h2: Matrix<R>,
}

impl<R: Ring> PublicParams<R> {
    pub fn new(m: Matrix<R>, h1: Matrix<R>, h2: Matrix<R>) -> Result<Self> {
        let n = m.rows();
        for (name, x) in [("M", &m), ("H1", &h1), ("H2", &h2)] {
            if x.rows() != n || x.cols() != n {
                return Err(Error::Shape(format!(
                    "{name} is {}x{}, expected {n}x{n}",
                    x.rows(),
                    x.cols()
                )));
            }
            if x.ring() != m.ring() {
                return Err(Error::Incompatible(format!("{name} is over a different ring")));
            }
        }
        Ok(PublicParams { m, h1, h2 })
    }

    pub fn n(&self) -> usize {
        self.m.rows()
    }

    pub fn ring(&self) -> &R {
        self.m.ring()
    }
}

/// A secret exponent, at least 2.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PrivateExponent(u64);

impl PrivateExponent {
    pub fn new(value: u64) -> Result<Self> {
        if value < 2 {
            return Err(Error::InvalidExponent(format!("{value} < 2")));
        }
        Ok(PrivateExponent(value))
    }

    /// Uniform in `[2, 2^bits)`.
    pub fn sample<G: Rng + ?Sized>(rng: &mut G, bits: u32) -> Result<Self> {
        if !(2..=MAX_EXPONENT_BITS).contains(&bits) {
            return Err(Error::InvalidExponent(format!(
                "bit bound {bits} outside 2..={MAX_EXPONENT_BITS}"
            )));
        }
        Ok(PrivateExponent(rng.gen_range(2..1u64 << bits)))
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

/// `(A_e, (H1^e, H2^e))` with `A_e = sum_{i<e} H1^i M H2^i`.
#[derive(Clone, PartialEq, Debug)]
pub struct SemidirectPair<R: Ring> {
    pub accumulated: Matrix<R>,
    pub power_index: u64,
    pub h1_power: Matrix<R>,
    pub h2_power: Matrix<R>,
}

impl<R: Ring> SemidirectPair<R> {
    /// The generator `(M, (H1, H2))`.
    pub fn generator(params: &PublicParams<R>) -> Self {
        SemidirectPair {
            accumulated: params.m.clone(),
            power_index: 1,
            h1_power: params.h1.clone(),
            h2_power: params.h2.clone(),
        }
    }

    /// The semidirect product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let twisted = other.h1_power.mul(&self.accumulated)?.mul(&other.h2_power)?;
        Ok(SemidirectPair {
            accumulated: twisted.add(&other.accumulated)?,
            power_index: self
                .power_index
                .checked_add(other.power_index)
                .ok_or_else(|| Error::InvalidExponent("power index overflow".into()))?,
            h1_power: self.h1_power.mul(&other.h1_power)?,
            h2_power: self.h2_power.mul(&other.h2_power)?,
        })
    }
}

/// `(M, (H1, H2))^e` with `O(log e)` semidirect products.
pub fn semidirect_pow<R: Ring>(params: &PublicParams<R>, e: u64) -> Result<SemidirectPair<R>> {
    if e == 0 {
        return Err(Error::InvalidExponent("exponent must be at least 1".into()));
    }
    let base = SemidirectPair::generator(params);
    let mut acc = base.clone();
    for bit in (0..63 - e.leading_zeros()).rev() {
        acc = acc.mul(&acc)?;
        if (e >> bit) & 1 == 1 {
            acc = acc.mul(&base)?;
        }
    }
    debug_assert_eq!(acc.power_index, e);
    Ok(acc)
}

/// `H1^x * received * H2^x + own_accumulated`.
pub fn derive_key<R: Ring>(
    received: &Matrix<R>,
    own_exponent: u64,
    own_accumulated: &Matrix<R>,
    h1: &Matrix<R>,
    h2: &Matrix<R>,
) -> Result<Matrix<R>> {
    h1.pow(own_exponent)?
        .mul(received)?
        .mul(&h2.pow(own_exponent)?)?
        .add(own_accumulated)
}

#[derive(Clone, PartialEq, Debug)]
pub struct Secrets<R: Ring> {
    pub x: u64,
    pub y: u64,
    pub key: Matrix<R>,
}

/// What crosses the wire (`A`, `B`) plus, in demo mode, the secrets.
#[derive(Clone, PartialEq, Debug)]
pub struct Transcript<R: Ring> {
    pub params: PublicParams<R>,
    pub a: Matrix<R>,
    pub b: Matrix<R>,
    pub secrets: Option<Secrets<R>>,
}

impl<R: Ring> Transcript<R> {
    pub fn without_secrets(mut self) -> Self {
        self.secrets = None;
        self
    }
}

/// Runs both parties. Fails with `Verification` if their keys differ.
pub fn run_exchange<R: Ring>(params: &PublicParams<R>, x: u64, y: u64) -> Result<Transcript<R>> {
    let alice = semidirect_pow(params, x)?;
    let bob = semidirect_pow(params, y)?;
    let (a, b) = (alice.accumulated, bob.accumulated);
    // Alice already holds (H1^x, H2^x) from her exponentiation.
    let key_a = alice.h1_power.mul(&b)?.mul(&alice.h2_power)?.add(&a)?;
    let key_b = bob.h1_power.mul(&a)?.mul(&bob.h2_power)?.add(&b)?;
    if key_a != key_b {
        return Err(Error::Verification("K_A != K_B".into()));
    }
    Ok(Transcript {
        params: params.clone(),
        a,
        b,
        secrets: Some(Secrets { x, y, key: key_a }),
    })
}

/// Samples `M` uniformly and `H1`, `H2` uniformly among matrices whose
/// embedded image is singular.
pub fn gen_params_in<E: RingEmbedding, G: Rng + ?Sized>(
    ctx: &EmbeddingContext<E>,
    rng: &mut G,
) -> Result<PublicParams<E::Source>> {
    let ring = ctx.ring().clone();
    let n = ctx.n();
    let m = Matrix::random(ring.clone(), n, n, rng);
    let mut singular = || -> Result<Matrix<E::Source>> {
        for _ in 0..MAX_SINGULAR_ATTEMPTS {
            let h = Matrix::random(ring.clone(), n, n, rng);
            if rank(&ctx.psi(&h)?) < ctx.k() {
                return Ok(h);
            }
        }
        Err(Error::Generation(format!(
            "no singular matrix after {MAX_SINGULAR_ATTEMPTS} draws"
        )))
    };
    let h1 = singular()?;
    let h2 = singular()?;
    PublicParams::new(m, h1, h2)
}

/// Seeded parameters over `Z_p[G]`; `group = None` selects the commutative
/// baseline `Z_p` (the trivial group).
pub fn gen_params(
    p: u64,
    group: Option<&GroupSpec>,
    n: usize,
    seed: u64,
) -> Result<(EmbeddingContext, PublicParams<GroupRing>)> {
    if n == 0 {
        return Err(Error::InvalidInput("matrix size must be positive".into()));
    }
    let field = PrimeField::with_prime(p)?;
    let ring = match group {
        Some(spec) => GroupRing::new(field, std::sync::Arc::new(spec.build()?.table)),
        None => GroupRing::trivial(field),
    };
    let ctx = EmbeddingContext::for_group_ring(ring, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = gen_params_in(&ctx, &mut rng)?;
    Ok((ctx, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_sum<R: Ring>(p: &PublicParams<R>, from: u64, to: u64) -> Matrix<R> {
        let mut acc = Matrix::zeros(p.ring().clone(), p.n(), p.n());
        for i in from..to {
            let term =
                p.h1.pow(i)
                    .unwrap()
                    .mul(&p.m)
                    .unwrap()
                    .mul(&p.h2.pow(i).unwrap())
                    .unwrap();
            acc = acc.add(&term).unwrap();
        }
        acc
    }

    fn s3_params(seed: u64) -> PublicParams<GroupRing> {
        gen_params(7, Some(&GroupSpec::builtin("s3").unwrap()), 2, seed)
            .unwrap()
            .1
    }

    #[test]
    fn small_powers() {
        let p = s3_params(1);
        assert_eq!(semidirect_pow(&p, 1).unwrap().accumulated, p.m);
        let two = p.h1.mul(&p.m).unwrap().mul(&p.h2).unwrap().add(&p.m).unwrap();
        assert_eq!(semidirect_pow(&p, 2).unwrap().accumulated, two);
        assert!(matches!(semidirect_pow(&p, 0), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn power_matches_naive_sum() {
        let p = s3_params(2);
        for e in 1..=64 {
            let pair = semidirect_pow(&p, e).unwrap();
            assert_eq!(pair.accumulated, naive_sum(&p, 0, e), "e = {e}");
            assert_eq!(pair.power_index, e);
            assert_eq!(pair.h1_power, p.h1.pow(e).unwrap());
        }
    }

    #[test]
    fn keys_agree_and_telescope() {
        let p = s3_params(3);
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..20 {
            let x = PrivateExponent::sample(&mut rng, 20).unwrap().value();
            let y = PrivateExponent::sample(&mut rng, 20).unwrap().value();
            let t = run_exchange(&p, x, y).unwrap();
            let k = &t.secrets.as_ref().unwrap().key;
            assert_eq!(derive_key(&t.b, x, &t.a, &p.h1, &p.h2).unwrap(), *k);
            assert_eq!(derive_key(&t.a, y, &t.b, &p.h1, &p.h2).unwrap(), *k);
            // H1 A H2 + M - A = H1^x M H2^x
            let lhs =
                p.h1.mul(&t.a)
                    .unwrap()
                    .mul(&p.h2)
                    .unwrap()
                    .add(&p.m)
                    .unwrap()
                    .sub(&t.a)
                    .unwrap();
            let rhs =
                p.h1.pow(x)
                    .unwrap()
                    .mul(&p.m)
                    .unwrap()
                    .mul(&p.h2.pow(x).unwrap())
                    .unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn smallest_and_symmetric_exchanges() {
        let p = s3_params(4);
        let t = run_exchange(&p, 1, 1).unwrap();
        let expected = p.h1.mul(&p.m).unwrap().mul(&p.h2).unwrap().add(&p.m).unwrap();
        assert_eq!(t.secrets.unwrap().key, expected);
        let t = run_exchange(&p, 9, 9).unwrap();
        assert_eq!(t.a, t.b);
    }

    #[test]
    fn commutative_key_is_the_split_sum() {
        let (_, p) = gen_params(101, None, 3, 5).unwrap();
        let (x, y) = (13, 29);
        let t = run_exchange(&p, x, y).unwrap();
        let expected = naive_sum(&p, x, x + y).add(&naive_sum(&p, 0, x)).unwrap();
        assert_eq!(t.secrets.unwrap().key, expected);
    }

    #[test]
    fn generation_is_seeded_and_singular() {
        let (ctx, a) = gen_params(5, None, 2, 99).unwrap();
        let (_, b) = gen_params(5, None, 2, 99).unwrap();
        assert_eq!(a, b);
        assert!(rank(&ctx.psi(&a.h1).unwrap()) < ctx.k());
        assert!(rank(&ctx.psi(&a.h2).unwrap()) < ctx.k());
        let (ctx, p) = gen_params(7, Some(&GroupSpec::builtin("s3").unwrap()), 2, 1).unwrap();
        assert!(rank(&ctx.psi(&p.h1).unwrap()) < 12);
        assert!(gen_params(4, None, 2, 0).is_err());
        assert!(gen_params(5, None, 0, 0).is_err());
    }

    #[test]
    fn exponent_sampling_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let x = PrivateExponent::sample(&mut rng, 2).unwrap().value();
            assert!((2..4).contains(&x));
        }
        assert!(PrivateExponent::sample(&mut rng, 64).is_err());
        assert!(PrivateExponent::new(1).is_err());
    }
}
