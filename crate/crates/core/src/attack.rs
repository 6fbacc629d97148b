//! Key recovery from public data `(M, H1, H2, A, B)`.
//!
//! 1. `H1 A H2 + M - A = H1^x M H2^x` (telescoping), computed in the embedded
//!    ring.
//! 2. Solve `L(psi(M)) t = vec(psi(H1^x M H2^x))` for any `t`.
//! 3. `psi(K) = psi(A) + unvec(L(psi(B)) t)`, then pull back through `psi`.
//!
//! Any solution `t` works because the difference to the Cayley-Hamilton
//! vector `s` lies in the kernel of `L(psi(M))`, which is contained in the
//! kernel of `L(psi(H1^l M H2^l))` for every `l`, hence of `L(psi(B))`.

use std::time::{Duration, Instant};

use crate::embedding::{vec, EmbeddingContext, RingEmbedding};
use crate::error::Result;
use crate::field::PrimeField;
use crate::linalg::solve_linear;
use crate::matrix::{Matrix, Vector};
use crate::protocol::{PublicParams, Transcript};
use crate::ring::Ring;

/// The eavesdropper's view: public parameters and the two exchanged values.
#[derive(Clone, PartialEq, Debug)]
pub struct AttackInput<R: Ring> {
    pub params: PublicParams<R>,
    pub a: Matrix<R>,
    pub b: Matrix<R>,
}

impl<R: Ring> AttackInput<R> {
    pub fn from_transcript(t: &Transcript<R>) -> Self {
        AttackInput {
            params: t.params.clone(),
            a: t.a.clone(),
            b: t.b.clone(),
        }
    }

    /// The same exchange seen from Bob's side; attacking it recovers `K_B`.
    pub fn swapped(&self) -> Self {
        AttackInput {
            params: self.params.clone(),
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

#[derive(Clone, Copy, Default, PartialEq, Debug)]
pub struct StageTimings {
    pub telescope: Duration,
    pub build_l: Duration,
    pub solve: Duration,
    pub recover: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.telescope + self.build_l + self.solve + self.recover
    }
}

#[derive(Clone, Debug)]
pub struct AttackResult<R: Ring> {
    pub recovered_key: Matrix<R>,
    pub solution: Vector<PrimeField>,
    /// Number of unknowns, `k^2`.
    pub system_size: usize,
    pub timings: StageTimings,
}

/// `psi(H1 A H2 + M - A)`, equal to `psi(H1^x M H2^x)`.
pub fn telescope<E: RingEmbedding>(
    input: &AttackInput<E::Source>,
    ctx: &EmbeddingContext<E>,
) -> Result<Matrix<PrimeField>> {
    let p = &input.params;
    let lhs = p.h1.mul(&input.a)?.mul(&p.h2)?.add(&p.m)?.sub(&input.a)?;
    ctx.psi(&lhs)
}

pub fn run_attack<E: RingEmbedding>(
    input: &AttackInput<E::Source>,
    ctx: &EmbeddingContext<E>,
) -> Result<AttackResult<E::Source>> {
    let mut timings = StageTimings::default();
    let p = &input.params;

    let clock = Instant::now();
    let rhs = vec(&telescope(input, ctx)?)?;
    timings.telescope = clock.elapsed();

    let clock = Instant::now();
    let op = ctx.l_operator(&p.h1, &p.h2)?;
    let l_m = op.matrix(&ctx.psi(&p.m)?)?;
    timings.build_l = clock.elapsed();

    let clock = Instant::now();
    let t = solve_linear(&l_m, &rhs)?;
    drop(l_m);
    timings.solve = clock.elapsed();

    let clock = Instant::now();
    let shifted_b = op.apply(&ctx.psi(&input.b)?, &t)?;
    let key_embedded = ctx.psi(&input.a)?.add(&shifted_b)?;
    let recovered_key = ctx.psi_inverse(&key_embedded)?;
    timings.recover = clock.elapsed();

    Ok(AttackResult {
        recovered_key,
        solution: t,
        system_size: ctx.k() * ctx.k(),
        timings,
    })
}

/// Checks that need the private exponent; used by tests and the self-test.
pub mod oracle {
    use super::*;
    use crate::poly::{char_poly, poly_pow_mod};

    /// The Cayley-Hamilton vector `s = vec(T)`, `T_{i,j} = p_i q_j`, where
    /// `p` and `q` are the coefficients of `X^x` modulo the characteristic
    /// polynomials of `psi(H1)` and `psi(H2)`.
    pub fn construct_s<E: RingEmbedding>(
        h1: &Matrix<E::Source>,
        h2: &Matrix<E::Source>,
        x: u64,
        ctx: &EmbeddingContext<E>,
    ) -> Result<Vector<PrimeField>> {
        let p = poly_pow_mod(&char_poly(&ctx.psi(h1)?)?, x)?;
        let q = poly_pow_mod(&char_poly(&ctx.psi(h2)?)?, x)?;
        let f = ctx.field();
        let k = ctx.k();
        let t = Matrix::from_fn(f, k, k, |i, j| f.mul(&p.coeff(i), &q.coeff(j)));
        vec(&t)
    }

    /// Whether `L(psi(H1^l Y H2^l)) u = 0`.
    pub fn check_kernel_preservation<E: RingEmbedding>(
        y: &Matrix<E::Source>,
        h1: &Matrix<E::Source>,
        h2: &Matrix<E::Source>,
        u: &Vector<PrimeField>,
        l: u64,
        ctx: &EmbeddingContext<E>,
    ) -> Result<bool> {
        let shifted = h1.pow(l)?.mul(y)?.mul(&h2.pow(l)?)?;
        Ok(ctx.build_l(&shifted, h1, h2)?.mul_vector(u)?.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::oracle::*;
    use super::*;
    use crate::group::GroupSpec;
    use crate::group_ring::GroupRing;
    use crate::linalg::kernel_basis;
    use crate::protocol::{gen_params, run_exchange, PrivateExponent};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn scalar(ring: &GroupRing, v: u64) -> Matrix<GroupRing> {
        Matrix::new(ring.clone(), 1, 1, vec![vec![v]]).unwrap()
    }

    #[test]
    fn k1_toy_by_hand() {
        // p = 5, H1 = [2], H2 = [3], M = [1], x = 3, y = 4.
        let ring = GroupRing::trivial(PrimeField::with_prime(5).unwrap());
        let ctx = EmbeddingContext::for_group_ring(ring.clone(), 1);
        let params = PublicParams::new(scalar(&ring, 1), scalar(&ring, 2), scalar(&ring, 3)).unwrap();
        let t = run_exchange(&params, 3, 4).unwrap();
        // A = 1 + 6 + 36 = 43 = 3, B = 1 + 6 + 36 + 216 = 259 = 4 (mod 5)
        assert_eq!(t.a.get(0, 0), &vec![3]);
        assert_eq!(t.b.get(0, 0), &vec![4]);
        let res = run_attack(&AttackInput::from_transcript(&t), &ctx).unwrap();
        // K = A + 6^3 B = 3 + 1 * 4 = 2 (mod 5)
        assert_eq!(res.recovered_key.get(0, 0), &vec![2]);
        assert_eq!(res.recovered_key, t.secrets.unwrap().key);
        assert_eq!(res.system_size, 1);
        assert_eq!(construct_s(&params.h1, &params.h2, 3, &ctx).unwrap().data(), &[1]);
    }

    #[test]
    fn telescope_examples() {
        let (ctx, p) = gen_params(7, Some(&GroupSpec::builtin("s3").unwrap()), 2, 10).unwrap();
        let t = run_exchange(&p, 1, 5).unwrap();
        let input = AttackInput::from_transcript(&t);
        let h1mh2 = p.h1.mul(&p.m).unwrap().mul(&p.h2).unwrap();
        assert_eq!(telescope(&input, &ctx).unwrap(), ctx.psi(&h1mh2).unwrap());

        let t = run_exchange(&p, 77, 5).unwrap();
        let direct =
            p.h1.pow(77)
                .unwrap()
                .mul(&p.m)
                .unwrap()
                .mul(&p.h2.pow(77).unwrap())
                .unwrap();
        assert_eq!(
            telescope(&AttackInput::from_transcript(&t), &ctx).unwrap(),
            ctx.psi(&direct).unwrap()
        );

        let zero = PublicParams::new(Matrix::zeros(ctx.ring().clone(), 2, 2), p.h1.clone(), p.h2.clone()).unwrap();
        let t = run_exchange(&zero, 12, 3).unwrap();
        assert!(t.a.is_zero());
        assert!(telescope(&AttackInput::from_transcript(&t), &ctx).unwrap().is_zero());
    }

    #[test]
    fn recovers_key_commutative_and_group_ring() {
        for (p, group, n) in [(101, None, 3), (7, Some("s3"), 2), (5, Some("c2"), 2)] {
            let spec = group.map(|g| GroupSpec::builtin(g).unwrap());
            for seed in 0..3 {
                let (ctx, params) = gen_params(p, spec.as_ref(), n, seed).unwrap();
                let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
                let x = PrivateExponent::sample(&mut rng, 20).unwrap().value();
                let y = PrivateExponent::sample(&mut rng, 20).unwrap().value();
                let t = run_exchange(&params, x, y).unwrap();
                let input = AttackInput::from_transcript(&t);
                let res = run_attack(&input, &ctx).unwrap();
                assert_eq!(res.recovered_key, t.secrets.as_ref().unwrap().key);
                let swapped = run_attack(&input.swapped(), &ctx).unwrap();
                assert_eq!(swapped.recovered_key, res.recovered_key);
            }
        }
    }

    #[test]
    fn s_vector_and_solution_transfer() {
        let (ctx, params) = gen_params(7, Some(&GroupSpec::builtin("s3").unwrap()), 2, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let x = 1234;
        let s = construct_s(&params.h1, &params.h2, x, &ctx).unwrap();
        for _ in 0..5 {
            let y = Matrix::random(ctx.ring().clone(), 2, 2, &mut rng);
            let lhs = ctx.build_l(&y, &params.h1, &params.h2).unwrap().mul_vector(&s).unwrap();
            let direct = params
                .h1
                .pow(x)
                .unwrap()
                .mul(&y)
                .unwrap()
                .mul(&params.h2.pow(x).unwrap())
                .unwrap();
            assert_eq!(lhs, vec(&ctx.psi(&direct).unwrap()).unwrap());
        }
        let t = run_exchange(&params, x, 999).unwrap();
        let res = run_attack(&AttackInput::from_transcript(&t), &ctx).unwrap();
        let l_b = ctx.build_l(&t.b, &params.h1, &params.h2).unwrap();
        assert_eq!(l_b.mul_vector(&res.solution).unwrap(), l_b.mul_vector(&s).unwrap());
    }

    #[test]
    fn kernel_is_preserved() {
        let (ctx, params) = gen_params(5, Some(&GroupSpec::builtin("c2").unwrap()), 2, 30).unwrap();
        let l_m = ctx.build_l(&params.m, &params.h1, &params.h2).unwrap();
        let basis = kernel_basis(&l_m);
        assert!(!basis.is_empty());
        let zero = Vector::zeros(ctx.field(), ctx.k() * ctx.k());
        assert!(check_kernel_preservation(&params.m, &params.h1, &params.h2, &zero, 3, &ctx).unwrap());
        for u in &basis {
            for l in 0..=5 {
                assert!(check_kernel_preservation(&params.m, &params.h1, &params.h2, u, l, &ctx).unwrap());
            }
        }
    }
}
