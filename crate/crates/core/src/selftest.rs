//! Property suites run by the `selftest` command and the acceptance tests.
//! Each suite compares an implementation route against an independent one
//! and counts disagreements.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attack::{oracle, run_attack, AttackInput};
use crate::embedding::{vec, EmbeddingContext};
use crate::error::Result;
use crate::field::PrimeField;
use crate::group::{FiniteGroupTable, GroupSpec};
use crate::group_ring::{GroupRing, GroupRingElement, RegularRep};
use crate::linalg::{kernel_basis, rank, solve_linear};
use crate::matrix::{Matrix, Vector};
use crate::poly::{char_poly, poly_pow_mod};
use crate::protocol::{gen_params, run_exchange, PrivateExponent, DEFAULT_EXPONENT_BITS};
use crate::ring::Ring;

#[derive(Clone, Copy, Debug, Default)]
pub struct SelftestOptions {
    /// Reduced trial counts; every suite still runs.
    pub quick: bool,
    /// Corrupts one expected value so the failure path can be exercised.
    pub inject_fault: bool,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub name: &'static str,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    name: &'static str,
    trials: usize,
    failures: usize,
    first_failure: Option<String>,
    start: Instant,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            name,
            trials: 0,
            failures: 0,
            first_failure: None,
            start: Instant::now(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }

    fn check_result(&mut self, r: Result<bool>, what: impl FnOnce() -> String) {
        match r {
            Ok(ok) => self.check(ok, what),
            Err(e) => {
                let msg = format!("{}: {e}", what());
                self.check(false, || msg)
            }
        }
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.name,
            trials: self.trials,
            failures: self.failures,
            first_failure: self.first_failure,
            elapsed: self.start.elapsed(),
        }
    }
}

fn field(p: u64) -> PrimeField {
    PrimeField::with_prime(p).expect("suite primes are prime")
}

fn group_ring(name: &str, p: u64) -> GroupRing {
    let g = GroupSpec::builtin(name)
        .expect("built-in")
        .build()
        .expect("built-in builds");
    GroupRing::new(field(p), Arc::new(g.table))
}

/// `chi_A(A) = 0` and `A^x = sum_g c_g A^g` with `c = X^x mod chi_A`.
pub fn cayley_hamilton(trials: usize, seed: u64) -> SuiteReport {
    let mut tally = Tally::new("cayley_hamilton");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = [2, 3, 5, 7, 101];
    for i in 0..trials {
        let f = field(primes[i % primes.len()]);
        let k = rng.gen_range(1..=6);
        let a = Matrix::random(f, k, k, &mut rng);
        let x = rng.gen_range(0..=1u64 << 16);
        let r = (|| {
            let chi = char_poly(&a)?;
            let vanishes = chi.degree() == Some(k) && chi.is_monic() && chi.eval_matrix(&a)?.is_zero();
            let reduced = poly_pow_mod(&chi, x)?.eval_matrix(&a)? == a.pow(x)?;
            Ok(vanishes && reduced)
        })();
        tally.check_result(r, || format!("p = {}, k = {k}, x = {x}", f.p()));
    }
    tally.finish()
}

/// Residual of `solve_linear` on consistent systems, and detection of
/// inconsistent ones.
pub fn linear_solve(trials: usize, seed: u64) -> SuiteReport {
    let mut tally = Tally::new("linear_solve");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = field(101);
    for i in 0..trials {
        let inner = 4 + i % 7;
        let a = Matrix::random(f, 10, inner, &mut rng)
            .mul(&Matrix::random(f, inner, 10, &mut rng))
            .expect("shapes");
        let t0 = Vector::new(f, (0..10).map(|_| rng.gen_range(0..101)).collect()).expect("canonical");
        let b = a.mul_vector(&t0).expect("shapes");
        let r = solve_linear(&a, &b).and_then(|t| Ok(a.mul_vector(&t)? == b));
        tally.check_result(r, || format!("consistent system {i}"));
        if rank(&a) < 10 {
            // A vector outside the column space: orthogonal complement test
            // via the kernel of A^T.
            let left = kernel_basis(&a.transpose());
            if let Some(w) = left.first() {
                // b' = b + e_j where w_j != 0 is inconsistent since w^T b' != 0
                let j = w.data().iter().position(|&v| v != 0).expect("nonzero kernel vector");
                let mut bad = b.data().to_vec();
                bad[j] = f.add(&bad[j], &1);
                let bad = Vector::new(f, bad).expect("canonical");
                tally.check(solve_linear(&a, &bad).is_err(), || {
                    format!("inconsistent system {i} solved")
                });
            }
        }
    }
    tally.finish()
}

/// Kernel vectors are annihilated, independent, and `cols - rank` in number.
pub fn kernels(trials: usize, seed: u64) -> SuiteReport {
    let mut tally = Tally::new("kernel_basis");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = field(7);
    for i in 0..trials {
        let inner = 1 + i % 6;
        let a = Matrix::random(f, 6, inner, &mut rng)
            .mul(&Matrix::random(f, inner, 6, &mut rng))
            .expect("shapes");
        let basis = kernel_basis(&a);
        let annihilated = basis
            .iter()
            .all(|u| a.mul_vector(u).map(|v| v.is_zero()).unwrap_or(false));
        let stacked = Matrix::from_fn(f, 6, basis.len(), |r, c| *basis[c].get(r));
        let ok = annihilated && basis.len() == 6 - rank(&a) && rank(&stacked) == basis.len();
        tally.check(ok, || format!("trial {i}"));
    }
    tally.finish()
}

fn table_is_valid(t: &FiniteGroupTable) -> bool {
    FiniteGroupTable::from_table(t.to_rows()).is_ok()
}

/// Table invariants of every built-in group and agreement with composition.
pub fn group_tables() -> SuiteReport {
    let mut tally = Tally::new("group_tables");
    for name in GroupSpec::BUILTINS {
        let g = GroupSpec::builtin(name).expect("built-in").build().expect("builds");
        tally.check(table_is_valid(&g.table), || format!("{name}: invalid table"));
        let m = g.table.order();
        let composed =
            (0..m).all(|i| (0..m).all(|j| g.elements[g.table.mul(i, j)] == g.elements[i].compose(&g.elements[j])));
        tally.check(composed, || format!("{name}: table disagrees with composition"));
    }
    tally.finish()
}

/// `T_g T_h = T_{gh}` (exhaustive for `m <= 12`, sampled above) and rank of
/// the stacked `vec(T_g)` equal to `m`.
pub fn regular_representation(seed: u64) -> SuiteReport {
    let mut tally = Tally::new("regular_representation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for name in GroupSpec::BUILTINS {
        let r = group_ring(name, 7);
        let rep = RegularRep::new(r.group().clone());
        let m = r.order();
        let ts: Vec<_> = (0..m).map(|g| rep.matrix(g, r.field())).collect();
        let pairs: Vec<(usize, usize)> = if m <= 12 {
            (0..m).flat_map(|g| (0..m).map(move |h| (g, h))).collect()
        } else {
            (0..400).map(|_| (rng.gen_range(0..m), rng.gen_range(0..m))).collect()
        };
        for (g, h) in pairs {
            let ok = ts[g].mul(&ts[h]).map(|p| p == ts[r.group().mul(g, h)]).unwrap_or(false);
            tally.check(ok, || format!("{name}: T_{g} T_{h} != T_(gh)"));
        }
        let stacked = Matrix::from_fn(r.field(), m * m, m, |row, g| *ts[g].get(row % m, row / m));
        tally.check(rank(&stacked) == m, || format!("{name}: T_g are dependent"));
    }
    tally.finish()
}

pub const HOMOMORPHISM_GROUPS: [&str; 4] = ["c2", "s3", "d4", "q8"];

/// `phi` preserves `+`, `*`, `1` and is inverted by `phi_inverse`.
pub fn phi_homomorphism(trials_per_group: usize, seed: u64) -> SuiteReport {
    let mut tally = Tally::new("phi_homomorphism");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for name in HOMOMORPHISM_GROUPS {
        let r = group_ring(name, 7);
        let rep = RegularRep::new(r.group().clone());
        let one = GroupRingElement::one(r.clone());
        tally.check_result(
            rep.phi(&one).map(|m| m == Matrix::identity(r.field(), r.order())),
            || format!("{name}: phi(1) != I"),
        );
        for i in 0..trials_per_group {
            let a = GroupRingElement::random(r.clone(), &mut rng);
            let b = GroupRingElement::random(r.clone(), &mut rng);
            let res = (|| {
                let (pa, pb) = (rep.phi(&a)?, rep.phi(&b)?);
                Ok(rep.phi(&a.add(&b)?)? == pa.add(&pb)?
                    && rep.phi(&a.mul(&b)?)? == pa.mul(&pb)?
                    && rep.phi_inverse(&pa, &r)? == a
                    && rep.phi(&rep.phi_inverse(&pb, &r)?)? == pb)
            })();
            tally.check_result(res, || format!("{name}: pair {i}"));
        }
    }
    tally.finish()
}

/// `psi` preserves `+`, `*`, `1` on `2 x 2` matrices and is injective
/// (round trip, and `psi(A - B) = 0` only when `A = B`).
pub fn psi_homomorphism(trials_per_group: usize, seed: u64) -> SuiteReport {
    let mut tally = Tally::new("psi_homomorphism");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2;
    for name in HOMOMORPHISM_GROUPS {
        let ctx = EmbeddingContext::for_group_ring(group_ring(name, 7), n);
        let r = ctx.ring().clone();
        tally.check_result(
            ctx.psi(&Matrix::identity(r.clone(), n))
                .map(|m| m == Matrix::identity(ctx.field(), ctx.k())),
            || format!("{name}: psi(I) != I"),
        );
        for i in 0..trials_per_group {
            let a = Matrix::random(r.clone(), n, n, &mut rng);
            let b = Matrix::random(r.clone(), n, n, &mut rng);
            let res = (|| {
                let (pa, pb) = (ctx.psi(&a)?, ctx.psi(&b)?);
                let diff_zero = ctx.psi(&a.sub(&b)?)?.is_zero();
                Ok(ctx.psi(&a.add(&b)?)? == pa.add(&pb)?
                    && ctx.psi(&a.mul(&b)?)? == pa.mul(&pb)?
                    && ctx.psi_inverse(&pa)? == a
                    && diff_zero == (a == b))
            })();
            tally.check_result(res, || format!("{name}: pair {i}"));
        }
    }
    tally.finish()
}

/// `(p, group, n)` configurations for the Cayley-Hamilton vector checks.
pub const S_VECTOR_CONFIGS: [(u64, Option<&str>, usize); 5] = [
    (101, None, 3),
    (5, Some("c2"), 2),
    (7, Some("s3"), 2),
    (3, Some("d4"), 1),
    (5, Some("q8"), 1),
];

/// `L(psi(Y)) s = vec(psi(H1^x Y H2^x))` for random `Y`.
pub fn s_vector(ys_per_config: usize, seed: u64) -> SuiteReport {
    let mut tally = Tally::new("s_vector");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (ci, (p, group, n)) in S_VECTOR_CONFIGS.into_iter().enumerate() {
        let spec = group.map(|g| GroupSpec::builtin(g).expect("built-in"));
        let (ctx, params) = match gen_params(p, spec.as_ref(), n, seed + ci as u64) {
            Ok(v) => v,
            Err(e) => {
                tally.check(false, || format!("config {ci}: {e}"));
                continue;
            }
        };
        let x = PrivateExponent::sample(&mut rng, DEFAULT_EXPONENT_BITS)
            .expect("valid bits")
            .value();
        let res = (|| {
            let s = oracle::construct_s(&params.h1, &params.h2, x, &ctx)?;
            let op = ctx.l_operator(&params.h1, &params.h2)?;
            let (h1x, h2x) = (params.h1.pow(x)?, params.h2.pow(x)?);
            let mut outcomes = Vec::with_capacity(ys_per_config);
            for _ in 0..ys_per_config {
                let y = Matrix::random(ctx.ring().clone(), n, n, &mut rng);
                let lhs = op.matrix(&ctx.psi(&y)?)?.mul_vector(&s)?;
                let rhs = vec(&ctx.psi(&h1x.mul(&y)?.mul(&h2x)?)?)?;
                outcomes.push(lhs == rhs);
            }
            Ok::<_, crate::Error>(outcomes)
        })();
        match res {
            Ok(outcomes) => {
                for (i, ok) in outcomes.into_iter().enumerate() {
                    tally.check(ok, || format!("config {ci}, Y #{i}, x = {x}"));
                }
            }
            Err(e) => tally.check(false, || format!("config {ci}: {e}")),
        }
    }
    tally.finish()
}

/// Kernel vectors of `L(psi(M))` stay in the kernel of
/// `L(psi(H1^l M H2^l))` for `l <= 5`.
pub fn kernel_preservation(vectors_per_config: usize, seed: u64) -> SuiteReport {
    let mut tally = Tally::new("kernel_preservation");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (ci, (p, group, n)) in S_VECTOR_CONFIGS.into_iter().enumerate() {
        let spec = group.map(|g| GroupSpec::builtin(g).expect("built-in"));
        let Ok((ctx, params)) = gen_params(p, spec.as_ref(), n, seed + ci as u64) else {
            tally.check(false, || format!("config {ci}: generation failed"));
            continue;
        };
        let res = (|| {
            let basis = kernel_basis(&ctx.build_l(&params.m, &params.h1, &params.h2)?);
            let f = ctx.field();
            let mut samples: Vec<Vector<PrimeField>> = basis.iter().take(vectors_per_config).cloned().collect();
            if !basis.is_empty() {
                // plus random combinations of the whole basis
                for _ in 0..vectors_per_config {
                    let mut u = vec![0u64; ctx.k() * ctx.k()];
                    for b in &basis {
                        f.axpy(&mut u, &f.sample(&mut rng), b.data());
                    }
                    samples.push(Vector::new(f, u)?);
                }
            }
            let mut outcomes = Vec::new();
            for u in &samples {
                for l in 0..=5 {
                    outcomes.push((
                        l,
                        oracle::check_kernel_preservation(&params.m, &params.h1, &params.h2, u, l, &ctx)?,
                    ));
                }
            }
            Ok::<_, crate::Error>(outcomes)
        })();
        match res {
            Ok(outcomes) => {
                for (l, ok) in outcomes {
                    tally.check(ok, || format!("config {ci}, l = {l}"));
                }
            }
            Err(e) => tally.check(false, || format!("config {ci}: {e}")),
        }
    }
    tally.finish()
}

/// `K_A = K_B` over `Z_7[S_3]` (n = 2) and `Z_101` (n = 3).
pub fn key_agreement(trials_per_config: usize, seed: u64, inject_fault: bool) -> SuiteReport {
    let mut tally = Tally::new("key_agreement");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s3 = GroupSpec::builtin("s3").expect("built-in");
    for (ci, (p, group, n)) in [(7, Some(&s3), 2), (101, None, 3)].into_iter().enumerate() {
        for i in 0..trials_per_config {
            let res = (|| {
                let (_, params) = gen_params(p, group, n, seed + (ci * trials_per_config + i) as u64)?;
                let x = PrivateExponent::sample(&mut rng, DEFAULT_EXPONENT_BITS)?.value();
                let y = PrivateExponent::sample(&mut rng, DEFAULT_EXPONENT_BITS)?.value();
                let t = run_exchange(&params, x, y)?;
                let k_b = crate::protocol::derive_key(&t.a, y, &t.b, &params.h1, &params.h2)?;
                let mut k_a = crate::protocol::derive_key(&t.b, x, &t.a, &params.h1, &params.h2)?;
                if inject_fault && ci == 0 && i == 0 {
                    k_a = k_a.add(&Matrix::identity(k_a.ring().clone(), n))?;
                }
                Ok(k_a == k_b)
            })();
            tally.check_result(res, || format!("config {ci}, trial {i}"));
        }
    }
    tally.finish()
}

/// Full attack recovers the honest key over `Z_101` (n = 3) and `Z_7[S_3]` (n = 2).
pub fn attack_recovery(trials_per_config: usize, seed: u64) -> SuiteReport {
    let mut tally = Tally::new("attack_recovery");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s3 = GroupSpec::builtin("s3").expect("built-in");
    for (ci, (p, group, n)) in [(101, None, 3), (7, Some(&s3), 2)].into_iter().enumerate() {
        for i in 0..trials_per_config {
            let res = (|| {
                let (ctx, params) = gen_params(p, group, n, seed + 1000 + (ci * trials_per_config + i) as u64)?;
                let x = PrivateExponent::sample(&mut rng, DEFAULT_EXPONENT_BITS)?.value();
                let y = PrivateExponent::sample(&mut rng, DEFAULT_EXPONENT_BITS)?.value();
                let t = run_exchange(&params, x, y)?;
                let key = t.secrets.as_ref().map(|s| s.key.clone());
                let got = run_attack(&AttackInput::from_transcript(&t.without_secrets()), &ctx)?;
                Ok(Some(got.recovered_key) == key)
            })();
            tally.check_result(res, || format!("config {ci}, trial {i}"));
        }
    }
    tally.finish()
}

pub fn run_all(opts: &SelftestOptions) -> Vec<SuiteReport> {
    let scale = |full: usize, quick: usize| if opts.quick { quick } else { full };
    let seed = opts.seed;
    vec![
        cayley_hamilton(scale(500, 50), seed),
        linear_solve(scale(100, 10), seed),
        kernels(scale(100, 10), seed),
        group_tables(),
        regular_representation(seed),
        phi_homomorphism(scale(200, 20), seed),
        psi_homomorphism(scale(200, 20), seed),
        s_vector(scale(50, 5), seed),
        kernel_preservation(scale(5, 2), seed),
        key_agreement(scale(100, 5), seed, opts.inject_fault),
        attack_recovery(scale(25, 2), seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_run_passes() {
        let reports = run_all(&SelftestOptions {
            quick: true,
            ..Default::default()
        });
        assert_eq!(reports.len(), 11);
        for r in &reports {
            assert!(r.passed(), "{}: {:?}", r.name, r.first_failure);
            assert!(r.trials > 0, "{}", r.name);
        }
    }

    #[test]
    fn injected_fault_is_reported() {
        let r = key_agreement(2, 0, true);
        assert_eq!(r.failures, 1);
        assert!(r.first_failure.is_some());
    }
}
