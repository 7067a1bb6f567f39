//! Acceptance criteria AC-1 through AC-7. Prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use qinv_core::algebra::{
    diagonal_generators, is_hermitian_idempotent, shadow_element, shadow_functional,
    squared_norm_witness, subgroup_average, AlgebraElement,
};
use qinv_core::codes::{fixture_442_projector, purity_profile};
use qinv_core::invariant::{invariant, invariant_code, quadratic_enumerator, subset_tuple};
use qinv_core::qspace::{
    random_hermitian, random_local_unitary, random_projector, random_psd, random_vector,
};
use qinv_core::reductions::{
    antisymmetrizer, integer_matrix, reduce_fixpoint, single_step, CodeFacts, InvariantExpression,
    Lemma4Rules, StepKind,
};
use qinv_core::verify::{cubic_report, verify_442, VerifyConfig};
use qinv_core::{Operator, Perm, PermTuple, SystemShape};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    passed: bool,
    detail: String,
}

fn random_perm<R: Rng>(k: usize, rng: &mut R) -> Perm {
    let all = Perm::all(k);
    all[rng.random_range(0..all.len())].clone()
}

fn random_tuple<R: Rng>(n: usize, k: usize, rng: &mut R) -> PermTuple {
    PermTuple::new((0..n).map(|_| random_perm(k, rng)).collect()).unwrap()
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .map(|m| (1..=n).filter(|l| m & (1 << (l - 1)) != 0).collect())
        .collect()
}

fn ac1() -> Outcome {
    let a = antisymmetrizer(3, &[1, 2, 3]).unwrap();
    let exact = integer_matrix(&a, 2).unwrap();
    let nonzero = exact.iter().flatten().filter(|&&x| x != 0).count();
    let float = a
        .to_operator(SystemShape::new(1, 2).unwrap(), 1 << 10)
        .unwrap()
        .matrix()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    Outcome {
        passed: exact.len() == 8 && nonzero == 0 && float < 1e-12,
        detail: format!("8x8 integer matrix nonzero entries = {nonzero}, float max = {float:.1e}"),
    }
}

fn ac2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let alpha = 2 + (trial / 3) % 2;
        let shape = SystemShape::new(n, alpha).unwrap();
        let m = random_hermitian(shape, &mut rng);
        let q = random_hermitian(shape, &mut rng);
        for s in subsets(n) {
            let direct = quadratic_enumerator(&s, &m, &q).unwrap();
            let via = invariant(&subset_tuple(n, &s).unwrap(), &[m.clone(), q.clone()]).unwrap();
            worst = worst.max((direct - via).norm());
            cases += 1;
        }
    }
    Outcome {
        passed: worst < 1e-10,
        detail: format!("{cases} subset cases over 100 pairs, max deviation {worst:.1e}"),
    }
}

fn ac3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = fixture_442_projector();
    let mut worst: f64 = 0.0;
    for trial in 0..50u64 {
        let u = random_local_unitary(p.shape(), 3000 + trial);
        let q = p.conjugate_by(&u).unwrap();
        let k = 1 + (trial as usize) % 3;
        for _ in 0..3 {
            let t = random_tuple(4, k, &mut rng);
            let d = (invariant_code(&t, &q).unwrap() - invariant_code(&t, &p).unwrap()).norm();
            worst = worst.max(d);
        }
    }
    Outcome {
        passed: worst < 1e-9,
        detail: format!("50 unitaries x 3 tuples, max deviation {worst:.1e}"),
    }
}

fn ac4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut min_re = f64::INFINITY;
    let mut max_im: f64 = 0.0;
    let mut not_idempotent = 0;
    for trial in 0..200 {
        let n = 1 + trial % 3;
        let alpha = 2 + (trial / 3) % 2;
        let shape = SystemShape::new(n, alpha).unwrap();
        let lam = match trial % 3 {
            0 => AlgebraElement::unit(n, 1 + (trial / 9) % 3),
            1 => {
                let k = 2 + (trial / 9) % 2;
                let gens: Vec<PermTuple> = (0..1 + trial % 2)
                    .map(|_| random_tuple(n, k, &mut rng))
                    .collect();
                subgroup_average(n, k, &gens).unwrap()
            }
            _ => {
                let t: Vec<usize> = (1..=n).filter(|_| rng.random_bool(0.5)).collect();
                shadow_element(&t, n).unwrap()
            }
        };
        if !is_hermitian_idempotent(&lam, 1e-12) {
            not_idempotent += 1;
        }
        let ops: Vec<Operator> = (0..lam.degree())
            .map(|_| {
                let rank = rng.random_range(1..=shape.dim());
                random_psd(shape, rank, &mut rng)
            })
            .collect();
        let v = shadow_functional(&lam, &ops).unwrap();
        min_re = min_re.min(v.re);
        max_im = max_im.max(v.im.abs());
    }

    let mut witness_gap: f64 = 0.0;
    for trial in 0..20 {
        let n = 1 + trial % 2;
        let shape = SystemShape::new(n, 2).unwrap();
        let lam = if trial % 2 == 0 {
            subgroup_average(n, 3, &diagonal_generators(n, 3)).unwrap()
        } else {
            shadow_element(&[1], n).unwrap()
        };
        let vs: Vec<Vec<Complex64>> = (0..lam.degree())
            .map(|_| random_vector(shape.dim(), &mut rng))
            .collect();
        let ops: Vec<Operator> = vs.iter().map(|v| Operator::outer(2, v).unwrap()).collect();
        let f = shadow_functional(&lam, &ops).unwrap();
        let norm = squared_norm_witness(&lam, shape, &vs).unwrap();
        witness_gap = witness_gap.max((f - Complex64::new(norm, 0.0)).norm());
    }
    Outcome {
        passed: min_re >= -1e-9 && max_im < 1e-9 && witness_gap < 1e-9 && not_idempotent == 0,
        detail: format!(
            "200 trials: min Re = {min_re:.3e}, max |Im| = {max_im:.1e}, non-idempotent = {not_idempotent}; \
             squared-norm gap {witness_gap:.1e}"
        ),
    }
}

fn ac5() -> Outcome {
    let p = fixture_442_projector();
    let checks = verify_442(&p, &VerifyConfig::default()).unwrap();
    for c in &checks {
        println!(
            "    {} {} expected {} actual {:.12} [{}]",
            c.id,
            c.description,
            c.expected,
            c.actual,
            if c.passed { "ok" } else { "FAIL" }
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    Outcome {
        passed: failed == 0,
        detail: format!("{} checks, {failed} failed", checks.len()),
    }
}

/// Force `p(j) = c` by composing with a transposition.
fn redirect(p: &Perm, j: usize, c: usize) -> Perm {
    let k = p.degree();
    let from = p.apply(j);
    if from == c {
        return p.clone();
    }
    let mut images: Vec<usize> = (1..=k).collect();
    images.swap(from - 1, c - 1);
    Perm::from_images(&images).unwrap().compose(p).unwrap()
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let p = fixture_442_projector();
    let facts = purity_profile(&p, 3).unwrap().facts;
    let rules = Lemma4Rules::standard(4, 2).unwrap().unwrap();
    let kinds = [
        StepKind::Canonicalize,
        StepKind::Merge,
        StepKind::Splice,
        StepKind::Lemma4,
    ];
    let mut applied = [0usize; 4];
    let mut worst: f64 = 0.0;
    let mut attempts = 0;
    while applied.iter().sum::<usize>() < 500 && attempts < 100_000 {
        attempts += 1;
        let which = attempts % 4;
        let kind = kinds[which];
        let (n, k) = match kind {
            StepKind::Lemma4 => (4, 3 + rng.random_range(0..2)),
            StepKind::Splice => (4, 2 + rng.random_range(0..3)),
            _ => (1 + rng.random_range(0..4), 1 + rng.random_range(0..4)),
        };
        let mut t = random_tuple(n, k, &mut rng);
        match kind {
            StepKind::Merge if k >= 2 => {
                let j = rng.random_range(1..=k);
                let c = (j % k) + 1;
                let perms = t.perms().iter().map(|q| redirect(q, j, c)).collect();
                t = PermTuple::new(perms).unwrap();
            }
            StepKind::Splice => {
                let j = rng.random_range(1..=k);
                let perms = t
                    .perms()
                    .iter()
                    .map(|q| {
                        if rng.random_bool(0.5) {
                            redirect(q, j, j)
                        } else {
                            q.clone()
                        }
                    })
                    .collect();
                t = PermTuple::new(perms).unwrap();
            }
            StepKind::Lemma4 if k == 4 && rules.rank(&t) == 0 => {
                let l = rng.random_range(1..=4);
                t = t.with_letter(l, rules.order()[rng.random_range(0..6)].clone());
            }
            _ => {}
        }
        let Some(out) = single_step(kind, &t, &facts).unwrap() else {
            continue;
        };
        applied[which] += 1;
        // merge and canonicalization hold for every projector; the rest need P of alphabet 2 or purity facts
        let mut targets = vec![if n == 4 {
            p.clone()
        } else {
            p_for(n, &mut rng)
        }];
        if matches!(kind, StepKind::Merge | StepKind::Canonicalize) {
            let alpha = if n * k <= 12 {
                2 + rng.random_range(0..2)
            } else {
                2
            };
            let shape = SystemShape::new(n, alpha).unwrap();
            let rank = rng.random_range(1..=shape.dim());
            targets.push(random_projector(shape, rank, &mut rng));
        }
        for q in &targets {
            let before = invariant_code(&t, q).unwrap();
            let after: Complex64 = out
                .iter()
                .map(|(u, c)| c * invariant_code(u, q).unwrap())
                .sum();
            worst = worst.max((before - after).norm());
        }
    }

    let quintic = PermTuple::parse(
        "(1,2)(3,4,5);(1,2,3)(4,5);(1,2,4)(3,5);(1,2,5)(3,4)",
        Some(5),
    )
    .unwrap();
    let size3 = CodeFacts::with_sizes(2, 4.0, &[3]).unwrap();
    let reduced = reduce_fixpoint(&InvariantExpression::single(quintic.clone()), &size3).unwrap();
    let target = subset_tuple(4, &[1, 2]).unwrap().canonicalize();
    let shape_ok = reduced.len() == 1
        && reduced
            .terms()
            .all(|(t, c)| *t == target && (c - Complex64::new(0.25, 0.0)).norm() < 1e-15);
    let lhs = invariant_code(&quintic, &p).unwrap();
    let rhs = reduced.evaluate(&p).unwrap();
    let total: usize = applied.iter().sum();
    Outcome {
        passed: total >= 500 && worst < 1e-9 && shape_ok && (lhs - rhs).norm() < 1e-9,
        detail: format!(
            "{total} steps (canonicalize {}, merge {}, splice {}, antisymmetrizer {}), max deviation {worst:.1e}; \
             quintic -> {} ({:.6} vs {:.6})",
            applied[0],
            applied[1],
            applied[2],
            applied[3],
            reduced.to_text().trim(),
            lhs.re,
            rhs.re
        ),
    }
}

/// A projector on `n` qubits for canonicalization steps on fewer letters.
fn p_for<R: Rng>(n: usize, rng: &mut R) -> Operator {
    let shape = SystemShape::new(n, 2).unwrap();
    let rank = rng.random_range(1..=shape.dim());
    random_projector(shape, rank, rng)
}

fn ac7() -> Outcome {
    let p = fixture_442_projector();
    let facts = purity_profile(&p, 3).unwrap().facts;
    let report = cubic_report(&p, &facts).unwrap();
    let closed = report
        .rows
        .iter()
        .filter(|r| r.closed_form.is_some())
        .count();
    let agree = report.all_closed(1e-9);
    let consistent = (report.cyclic - report.rank).abs() < 1e-9;
    let flag = if (report.cyclic - report.two_power).abs() < 1e-9 {
        "matches 2^(m-2)".to_string()
    } else {
        format!(
            "2^(m-2) = {} is inconsistent with rank 4^(m-1) = {}",
            report.two_power, report.rank
        )
    };
    Outcome {
        passed: report.rows.len() == 16 && closed == 16 && agree && consistent,
        detail: format!(
            "{closed}/16 closed forms agree with direct evaluation; Tr(P^3) = {:.12}; {flag}",
            report.cyclic
        ),
    }
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("AC-1", ac1, Duration::from_secs(1)),
        ("AC-2", ac2, Duration::from_secs(30)),
        ("AC-3", ac3, Duration::from_secs(60)),
        ("AC-4", ac4, Duration::from_secs(120)),
        ("AC-5", ac5, Duration::from_secs(120)),
        ("AC-6", ac6, Duration::from_secs(120)),
        ("AC-7", ac7, Duration::from_secs(120)),
    ];
    let mut failures = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let passed = outcome.passed && elapsed < limit;
        if !passed {
            failures += 1;
        }
        println!(
            "{name} {} {} [{:.2}s, limit {}s]",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
