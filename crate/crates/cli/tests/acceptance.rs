//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::fs;
use std::process::Command;
use std::time::{Duration, Instant};

use make_core::selftest::{self, SuiteReport};
use make_core::{gen_params, run_attack, run_exchange, AttackInput, GroupSpec, PrivateExponent};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const BITS: u32 = make_core::protocol::DEFAULT_EXPONENT_BITS;

struct Outcome {
    passed: bool,
    detail: String,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let v = f();
    (v, start.elapsed())
}

fn exponents(rng: &mut ChaCha8Rng) -> (u64, u64) {
    let x = PrivateExponent::sample(rng, BITS).unwrap().value();
    let y = PrivateExponent::sample(rng, BITS).unwrap().value();
    (x, y)
}

fn key_agreement() -> Outcome {
    let s3 = GroupSpec::builtin("s3").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut agreed = 0;
    let mut elapsed = Duration::ZERO;
    for (p, group, n) in [(7, Some(&s3), 2), (101, None, 3)] {
        for seed in 0..100 {
            let (_, params) = gen_params(p, group, n, seed).unwrap();
            let (x, y) = exponents(&mut rng);
            let (ok, dt) = timed(|| {
                let t = run_exchange(&params, x, y).ok()?;
                let k_a = make_core::derive_key(&t.b, x, &t.a, &params.h1, &params.h2).ok()?;
                let k_b = make_core::derive_key(&t.a, y, &t.b, &params.h1, &params.h2).ok()?;
                Some(k_a == k_b)
            });
            elapsed += dt;
            agreed += usize::from(ok == Some(true));
        }
    }
    Outcome {
        passed: agreed == 200 && elapsed < Duration::from_secs(10),
        detail: format!(
            "K_A = K_B in {agreed}/200 exchanges, {:.3}s (limit 10s)",
            elapsed.as_secs_f64()
        ),
    }
}

/// `count` honest transcripts; only the attacks themselves are timed.
fn attacks(p: u64, group: Option<&str>, n: usize, count: u64, seed: u64) -> (usize, Duration, usize) {
    let spec = group.map(|g| GroupSpec::builtin(g).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut recovered = 0;
    let mut elapsed = Duration::ZERO;
    let mut size = 0;
    for i in 0..count {
        let (ctx, params) = gen_params(p, spec.as_ref(), n, seed * 1000 + i).unwrap();
        let (x, y) = exponents(&mut rng);
        let t = run_exchange(&params, x, y).unwrap();
        let key = t.secrets.clone().unwrap().key;
        let input = AttackInput::from_transcript(&t.without_secrets());
        let (r, dt) = timed(|| run_attack(&input, &ctx));
        elapsed += dt;
        if let Ok(r) = r {
            size = r.system_size;
            recovered += usize::from(r.recovered_key == key);
        }
    }
    (recovered, elapsed, size)
}

fn attack_criterion(p: u64, group: Option<&str>, n: usize, count: u64, limit: Duration, seed: u64) -> Outcome {
    let (recovered, elapsed, size) = attacks(p, group, n, count, seed);
    Outcome {
        passed: recovered == count as usize && elapsed <= limit,
        detail: format!(
            "{recovered}/{count} keys recovered, {size} unknowns, {:.3}s (limit {}s)",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ),
    }
}

fn suites(reports: &[SuiteReport], note: &str) -> Outcome {
    let passed = reports.iter().all(SuiteReport::passed);
    let parts: Vec<String> = reports
        .iter()
        .map(|r| {
            let mut s = format!("{} {}/{} ok", r.name, r.trials - r.failures, r.trials);
            if let Some(f) = &r.first_failure {
                s.push_str(&format!(" (first failure: {f})"));
            }
            s
        })
        .collect();
    Outcome {
        passed,
        detail: format!("{}{note}", parts.join("; ")),
    }
}

fn cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_make-attack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn negative_control() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("params.json");
    let t = dir.path().join("transcript.json");
    let (p, t) = (p.to_str().unwrap(), t.to_str().unwrap());
    assert!(
        cli(&["gen", "--prime", "7", "--group", "s3", "--dim", "2", "--seed", "9", "--out", p])
            .status
            .success()
    );
    assert!(cli(&["exchange", "--in", p, "--out", t, "--demo", "--seed", "9"])
        .status
        .success());
    let honest: Value = serde_json::from_str(&fs::read_to_string(t).unwrap()).unwrap();

    let mut positions: Vec<(usize, usize, usize)> = (0..2)
        .flat_map(|i| (0..2).flat_map(move |j| (0..6).map(move |c| (i, j, c))))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut flagged = 0;
    let mut inconsistent = 0;
    for round in 0..20 {
        let (i, j, c) = positions.swap_remove(rng.gen_range(0..positions.len()));
        let mut v = honest.clone();
        let old = v["B"][i][j][c].as_u64().unwrap();
        v["B"][i][j][c] = Value::from((old + rng.gen_range(1..7)) % 7);
        let mutated = dir.path().join(format!("mutated-{round}.json"));
        let report = dir.path().join(format!("report-{round}.json"));
        fs::write(&mutated, v.to_string()).unwrap();
        let out = cli(&[
            "attack",
            "--in",
            mutated.to_str().unwrap(),
            "--out",
            report.to_str().unwrap(),
        ]);
        let r: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
        if !out.status.success() && r["success"] == false {
            flagged += 1;
        }
        if r["consistent"] != true {
            inconsistent += 1;
        }
    }
    Outcome {
        passed: flagged == 20,
        detail: format!(
            "{flagged}/20 single-entry mutations of B reported as failures; {inconsistent}/20 also caught without the demo key"
        ),
    }
}

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("key agreement over Z_7[S_3] n=2 and Z_101 n=3", Box::new(key_agreement)),
        (
            "commutative attack, Z_101 n=3",
            Box::new(|| attack_criterion(101, None, 3, 25, Duration::from_secs(1), 2)),
        ),
        (
            "non-commutative attack, Z_7[S_3] n=2",
            Box::new(|| attack_criterion(7, Some("s3"), 2, 25, Duration::from_secs(30), 3)),
        ),
        (
            "attack over Z_7[A_5] n=1",
            Box::new(|| attack_criterion(7, Some("a5"), 1, 1, Duration::from_secs(600), 4)),
        ),
        (
            "psi homomorphism and injectivity, 200 cases per group",
            Box::new(|| {
                suites(
                    &[selftest::psi_homomorphism(200, 5), selftest::phi_homomorphism(200, 5)],
                    "",
                )
            }),
        ),
        (
            "s-vector identity and kernel preservation",
            Box::new(|| {
                suites(
                    &[selftest::s_vector(50, 6), selftest::kernel_preservation(5, 6)],
                    "; 50 Y in each of 5 configs, l <= 5",
                )
            }),
        ),
        (
            "Cayley-Hamilton and powers via X^x mod chi",
            Box::new(|| suites(&[selftest::cayley_hamilton(500, 7)], "; p in {2,3,5,7,101}, k <= 6")),
        ),
        (
            "left-regular representation",
            Box::new(|| {
                suites(
                    &[selftest::regular_representation(8)],
                    "; exhaustive for m <= 12, rank m for all built-ins",
                )
            }),
        ),
        ("negative control on B", Box::new(negative_control)),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let (outcome, dt) = timed(check);
        if !outcome.passed {
            failed += 1;
        }
        println!(
            "criterion {} {}: {} - {} [{:.2}s]",
            i + 1,
            if outcome.passed { "PASS" } else { "FAIL" },
            name,
            outcome.detail,
            dt.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
