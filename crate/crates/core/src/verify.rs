//! Numerical checks of the quartic and cubic invariant identities for
//! `((4,4,2))` and `((2m, 4^{m-1}, 2))` codes.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::invariant::Evaluator;
use crate::perm::{Perm, PermTuple};
use crate::qspace::{partial_trace, random_local_unitary, Operator};
use crate::reductions::{quartic_generators, reduce_fixpoint, CodeFacts, InvariantExpression};

/// Outcome of one check: `passed` iff `|actual - expected| < tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: String,
    pub description: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(
        id: &str,
        description: impl Into<String>,
        expected: f64,
        actual: f64,
        tolerance: f64,
    ) -> Self {
        Check {
            id: id.to_string(),
            description: description.into(),
            expected,
            actual,
            tolerance,
            passed: (actual - expected).abs() < tolerance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub tolerance: f64,
    pub seed: u64,
    pub unitaries: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tolerance: 1e-9,
            seed: 442,
            unitaries: 10,
        }
    }
}

/// Build a four-letter tuple from generator indices (1, 2, 3) and powers.
fn quartic(letters: [(usize, u32); 4]) -> PermTuple {
    let gens = quartic_generators();
    let perms = letters
        .iter()
        .map(|&(g, power)| {
            let base = &gens[g - 1];
            (1..power).fold(base.clone(), |acc, _| acc.compose_unchecked(base))
        })
        .collect();
    PermTuple::new(perms).expect("four letters of degree 4")
}

fn plain(indices: [usize; 4]) -> PermTuple {
    quartic(indices.map(|g| (g, 1)))
}

/// Place `a` on the letters of `subset` (in order) and `b` on the rest.
fn spread(a: [usize; 4], subset: [usize; 2]) -> PermTuple {
    let rest: Vec<usize> = (1..=4).filter(|l| !subset.contains(l)).collect();
    let gens = quartic_generators();
    let mut perms = vec![Perm::identity(4); 4];
    perms[subset[0] - 1] = gens[a[0] - 1].clone();
    perms[subset[1] - 1] = gens[a[1] - 1].clone();
    perms[rest[0] - 1] = gens[a[2] - 1].clone();
    perms[rest[1] - 1] = gens[a[3] - 1].clone();
    PermTuple::new(perms).expect("four letters of degree 4")
}

/// `8 - 2A'_{2311} - 2A'_{1123} - A'_{1213} - A'_{1231} - A'_{2113} - A'_{2131}`
/// with the first two letters placed on `subset`.
pub fn kappa_combination(subset: [usize; 2]) -> Vec<(f64, PermTuple)> {
    let terms: [(f64, [usize; 4]); 6] = [
        (-2.0, [2, 3, 1, 1]),
        (-2.0, [1, 1, 2, 3]),
        (-1.0, [1, 2, 1, 3]),
        (-1.0, [1, 2, 3, 1]),
        (-1.0, [2, 1, 1, 3]),
        (-1.0, [2, 1, 3, 1]),
    ];
    terms.iter().map(|&(c, a)| (c, spread(a, subset))).collect()
}

/// Run the `((4,4,2))` identities on projector `p`.
pub fn verify_442(p: &Operator, config: &VerifyConfig) -> Result<Vec<Check>> {
    let shape = p.shape();
    if (shape.letters(), shape.alpha()) != (4, 2) {
        return Err(Error::ShapeMismatch(format!(
            "expected a 4-qubit projector, got {} letters of alphabet {}",
            shape.letters(),
            shape.alpha()
        )));
    }
    let tol = config.tolerance;
    let eval = Evaluator::default();
    let a = |t: &PermTuple| -> Result<f64> { Ok(eval.invariant_code(t, p)?.re) };
    let mut checks = Vec::new();

    checks.push(Check::new("5.1", "Tr(P)", 4.0, p.trace().re, tol));
    let half =
        Operator::identity(crate::qspace::SystemShape::new(3, 2)?).scale(Complex64::new(0.5, 0.0));
    for i in 1..=4 {
        let dev = partial_trace(p, &[i])?.max_abs_diff(&half)?;
        checks.push(Check::new(
            "5.1",
            format!("max |Tr_{i}(P) - I/2|"),
            0.0,
            dev,
            tol,
        ));
    }

    checks.push(Check::new(
        "5.2",
        "A'(p1^2, p3^2, p3^2, p3^2)",
        4.0,
        a(&quartic([(1, 2), (3, 2), (3, 2), (3, 2)]))?,
        tol,
    ));
    checks.push(Check::new(
        "5.3",
        "A'(p3, p3^2, p3^2, p3^2)",
        2.0,
        a(&quartic([(3, 1), (3, 2), (3, 2), (3, 2)]))?,
        tol,
    ));

    let chain1 = a(&quartic([(3, 1), (1, 1), (3, 2), (3, 2)]))?
        + a(&quartic([(3, 1), (2, 1), (3, 2), (3, 2)]))?;
    checks.push(Check::new(
        "5.4",
        "A'(p3,p1,p3^2,p3^2) + A'(p3,p2,p3^2,p3^2)",
        2.0,
        chain1,
        tol,
    ));
    let mut chain2 = 0.0;
    for (x, y) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        chain2 += a(&quartic([(3, 1), (x, 1), (y, 1), (3, 2)]))?;
    }
    checks.push(Check::new(
        "5.4",
        "sum over x,y in {p1,p2} of A'(p3,x,y,p3^2)",
        2.0,
        chain2,
        tol,
    ));
    let chain3 = a(&plain([3, 1, 1, 2]))? + a(&plain([3, 1, 2, 1]))? + a(&plain([3, 2, 1, 1]))?;
    checks.push(Check::new(
        "5.4",
        "A'(p3,p1,p1,p2) + A'(p3,p1,p2,p1) + A'(p3,p2,p1,p1)",
        3.0,
        chain3,
        tol,
    ));

    checks.push(Check::new(
        "5.5",
        "mean over letter orders of A'(p1,p1,p2,p3)",
        1.0,
        eval.symmetrize(&plain([1, 1, 2, 3]), p)?.re,
        tol,
    ));

    for s in crate::codes::combinations(4, 2) {
        let subset = [s[0], s[1]];
        let mut kappa = 8.0;
        for (c, t) in kappa_combination(subset) {
            kappa += c * a(&t)?;
        }
        checks.push(Check::new(
            "5.6",
            format!("kappa combination on {{{},{}}}", subset[0], subset[1]),
            0.0,
            kappa,
            tol,
        ));
    }

    let tuples: Vec<PermTuple> = (0..81)
        .map(|i| plain([i / 27 % 3 + 1, i / 9 % 3 + 1, i / 3 % 3 + 1, i % 3 + 1]))
        .collect();
    let base: Vec<Complex64> = tuples
        .iter()
        .map(|t| eval.invariant_code(t, p))
        .collect::<Result<_>>()?;
    let mut worst: f64 = 0.0;
    for r in 0..config.unitaries {
        let u = random_local_unitary(shape, config.seed.wrapping_add(r as u64));
        let q = p.conjugate_by(&u)?;
        for (t, b) in tuples.iter().zip(&base) {
            worst = worst.max((eval.invariant_code(t, &q)? - b).norm());
        }
    }
    checks.push(Check::new(
        "5.7",
        format!(
            "max change of the 81 generator tuples under {} local unitaries (seed {})",
            config.unitaries, config.seed
        ),
        0.0,
        worst,
        tol,
    ));
    Ok(checks)
}

/// Reduction of one derangement-only cubic tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicReduction {
    pub tuple: PermTuple,
    pub reduced: InvariantExpression,
    /// `Σ c K` when every reduced term is the degree-1 identity.
    pub closed_form: Option<f64>,
    pub direct: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CubicReport {
    pub rows: Vec<CubicReduction>,
    /// `A'` of the tuple with `(1,2,3)` on every letter, i.e. `Tr(P³)`.
    pub cyclic: f64,
    /// `Tr(P)`, which `Tr(P³)` must equal for a projector.
    pub rank: f64,
    /// `2^{m-2}` for `n = 2m` letters, a value inconsistent with rank `4^{m-1}`.
    pub two_power: f64,
}

impl CubicReport {
    pub fn all_closed(&self, tol: f64) -> bool {
        self.rows.iter().all(|r| {
            r.closed_form
                .is_some_and(|v| (v - r.direct.re).abs() < tol && r.direct.im.abs() < tol)
        })
    }
}

/// Reduce every derangement-only cubic tuple of a qubit MDS projector `p`
/// (on `n = 2m` letters) and compare with direct evaluation.
pub fn cubic_report(p: &Operator, facts: &CodeFacts) -> Result<CubicReport> {
    let n = p.shape().letters();
    let eval = Evaluator::default();
    let derangements = [Perm::parse("(1,2,3)", 3)?, Perm::parse("(1,3,2)", 3)?];
    let mut rows = Vec::new();
    for mask in 0..(1usize << n) {
        let perms = (0..n)
            .map(|l| derangements[(mask >> (n - 1 - l)) & 1].clone())
            .collect();
        let tuple = PermTuple::new(perms)?;
        let reduced = reduce_fixpoint(&InvariantExpression::single(tuple.clone()), facts)?;
        let closed_form = reduced
            .terms()
            .all(|(t, _)| t.degree() == 1 && t.is_identity())
            .then(|| reduced.terms().map(|(_, c)| c.re * facts.dimension()).sum());
        rows.push(CubicReduction {
            direct: eval.invariant_code(&tuple, p)?,
            tuple,
            reduced,
            closed_form,
        });
    }
    let cyclic = eval
        .invariant_code(&PermTuple::uniform(n, derangements[0].clone()), p)?
        .re;
    Ok(CubicReport {
        rows,
        cyclic,
        rank: p.trace().re,
        two_power: 2f64.powi(n as i32 / 2 - 2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{fixture_442_projector, purity_profile};

    #[test]
    fn fixture_passes() {
        let p = fixture_442_projector();
        let config = VerifyConfig {
            unitaries: 2,
            ..VerifyConfig::default()
        };
        let checks = verify_442(&p, &config).unwrap();
        assert_eq!(checks.len(), 5 + 2 + 3 + 1 + 6 + 1);
        for c in &checks {
            assert!(c.passed, "{c:?}");
        }
    }

    #[test]
    fn kappa_terms_for_first_pair() {
        let terms = kappa_combination([1, 2]);
        assert_eq!(terms[1].1, plain([1, 1, 2, 3]));
        let moved = kappa_combination([3, 4]);
        assert_eq!(moved[1].1, plain([2, 3, 1, 1]));
    }

    #[test]
    fn cubic_reductions_close() {
        let p = fixture_442_projector();
        let facts = purity_profile(&p, 3).unwrap().facts;
        let report = cubic_report(&p, &facts).unwrap();
        assert_eq!(report.rows.len(), 16);
        assert!(report.all_closed(1e-9), "{report:?}");
        assert!((report.cyclic - 4.0).abs() < 1e-9);
        assert_eq!(report.two_power, 1.0);
    }
}
