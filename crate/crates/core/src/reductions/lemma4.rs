//! Antisymmetrizer relations `Σ_{π ∈ S_A} sign(π) T(π) = 0` for `|A| > α`,
//! and elimination rules derived from them.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;

use crate::algebra::AlgebraElement;
use crate::codes::combinations;
use crate::error::{Error, Result};
use crate::perm::{Perm, PermTuple};

/// Signed sum over the permutations of `subset` (1-based), other points fixed.
pub fn antisymmetrizer(k: usize, subset: &[usize]) -> Result<AlgebraElement> {
    let inner = Perm::all(subset.len());
    let terms = inner.iter().map(|s| {
        let mut images: Vec<usize> = (1..=k).collect();
        for (i, &a) in subset.iter().enumerate() {
            images[a - 1] = subset[s.apply(i + 1) - 1];
        }
        let p = Perm::from_images(&images).expect("permutation of a subset");
        (
            PermTuple::new(vec![p]).expect("one letter"),
            Complex64::new(s.sign() as f64, 0.0),
        )
    });
    AlgebraElement::from_terms(1, k, terms)
}

/// Single-letter relations: `δ_g ∗ a_A` for every `(α+1)`-subset `A` and every
/// `g ∈ S_k`, deduplicated up to sign. Each one is checked to vanish as an
/// integer matrix on `(C^α)^{⊗k}` before it is returned.
pub fn lemma4_relations(k: usize, alpha: usize) -> Result<Vec<AlgebraElement>> {
    if k <= alpha {
        return Err(Error::NotApplicable(format!(
            "antisymmetrizer relations need k > alpha, got k = {k}, alpha = {alpha}"
        )));
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for subset in combinations(k, alpha + 1) {
        let a = antisymmetrizer(k, &subset)?;
        for g in Perm::all(k) {
            let g = PermTuple::new(vec![g]).expect("one letter");
            let r = AlgebraElement::delta(g).convolve(&a)?;
            let key = signed_key(&r);
            if seen.insert(key) {
                let m = integer_matrix(&r, alpha)?;
                if m.iter().any(|row| row.iter().any(|&x| x != 0)) {
                    return Err(Error::Structure(format!(
                        "relation on {subset:?} does not vanish"
                    )));
                }
                out.push(r);
            }
        }
    }
    Ok(out)
}

fn signed_key(r: &AlgebraElement) -> Vec<(Perm, i64)> {
    let mut key: Vec<(Perm, i64)> = r
        .terms()
        .map(|(t, c)| (t.letter(1).clone(), c.re.round() as i64))
        .collect();
    if key.first().is_some_and(|(_, c)| *c < 0) {
        key.iter_mut().for_each(|(_, c)| *c = -*c);
    }
    key
}

/// `Σ r(π) T(π)` on `(C^α)^{⊗k}` in exact integer arithmetic. Requires a
/// single-letter element with integer coefficients.
pub fn integer_matrix(r: &AlgebraElement, alpha: usize) -> Result<Vec<Vec<i64>>> {
    if r.letters() != 1 {
        return Err(Error::ShapeMismatch(
            "integer path needs a single-letter element".into(),
        ));
    }
    let k = r.degree();
    let dim = alpha
        .checked_pow(k as u32)
        .filter(|&d| d <= 1 << 12)
        .ok_or(Error::Budget {
            states: (alpha as u128).pow(k as u32),
            limit: 1 << 12,
        })?;
    let mut m = vec![vec![0i64; dim]; dim];
    for (t, c) in r.terms() {
        if c.im != 0.0 || c.re.fract() != 0.0 {
            return Err(Error::Structure(format!("non-integer coefficient {c}")));
        }
        let p = t.letter(1);
        for x in 0..dim {
            m[image(p, x, alpha, k)][x] += c.re as i64;
        }
    }
    Ok(m)
}

/// Basis index of `T(p) e_x`: digit at copy `c` moves to copy `p(c)`.
fn image(p: &Perm, x: usize, alpha: usize, k: usize) -> usize {
    let mut digits = vec![0; k];
    let mut rest = x;
    for c in (0..k).rev() {
        digits[c] = rest % alpha;
        rest /= alpha;
    }
    let mut moved = vec![0; k];
    for c in 0..k {
        moved[p.apply(c + 1) - 1] = digits[c];
    }
    moved.iter().fold(0, |acc, &d| acc * alpha + d)
}

/// Rewrite rules `g → Σ c_q q` on a single letter, none of whose right-hand
/// sides mention an eliminable permutation.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Rules {
    alpha: usize,
    degree: usize,
    order: Vec<Perm>,
    rules: BTreeMap<Perm, Vec<(Perm, i64)>>,
}

impl Lemma4Rules {
    /// Derive rules eliminating `order` (in that order of preference) from
    /// the relations for `(k, α)`. Rules may chain through earlier results.
    pub fn derive(k: usize, alpha: usize, order: Vec<Perm>) -> Result<Self> {
        let relations = lemma4_relations(k, alpha)?;
        let eliminable: BTreeSet<Perm> = order.iter().cloned().collect();
        let mut rules: BTreeMap<Perm, Vec<(Perm, i64)>> = BTreeMap::new();
        loop {
            let mut progress = false;
            for g in &order {
                if rules.contains_key(g) {
                    continue;
                }
                let found = relations.iter().find_map(|r| {
                    let rel: Vec<(Perm, i64)> = r
                        .terms()
                        .map(|(t, c)| (t.letter(1).clone(), c.re.round() as i64))
                        .collect();
                    let lead = rel.iter().find(|(p, _)| p == g)?.1;
                    let usable = rel
                        .iter()
                        .all(|(p, _)| p == g || !eliminable.contains(p) || rules.contains_key(p));
                    usable.then_some((rel, lead))
                });
                if let Some((rel, lead)) = found {
                    let mut rhs: BTreeMap<Perm, i64> = BTreeMap::new();
                    for (p, c) in rel.into_iter().filter(|(p, _)| p != g) {
                        // g = -Σ (c / lead) p, with lead = ±1
                        let coeff = -c * lead;
                        match rules.get(&p) {
                            Some(sub) => {
                                for (q, d) in sub {
                                    *rhs.entry(q.clone()).or_default() += coeff * d;
                                }
                            }
                            None => *rhs.entry(p).or_default() += coeff,
                        }
                    }
                    rhs.retain(|_, c| *c != 0);
                    rules.insert(g.clone(), rhs.into_iter().collect());
                    progress = true;
                }
            }
            if rules.len() == order.len() {
                break;
            }
            if !progress {
                let missing: Vec<String> = order
                    .iter()
                    .filter(|g| !rules.contains_key(g))
                    .map(|g| g.to_string())
                    .collect();
                return Err(Error::NotApplicable(format!(
                    "no relation eliminates {}",
                    missing.join(", ")
                )));
            }
        }
        let out = Lemma4Rules {
            alpha,
            degree: k,
            order,
            rules,
        };
        for g in &out.order {
            let m = integer_matrix(&out.rule_element(g).expect("rule exists"), alpha)?;
            if m.iter().any(|row| row.iter().any(|&x| x != 0)) {
                return Err(Error::Structure(format!("rule for {g} does not hold")));
            }
        }
        Ok(out)
    }

    /// The fixed elimination order for the supported `(k, α)` pairs:
    /// `(1,3,2)` at `k = 3, α = 2`, and the squares then cubes of
    /// `(1,2,3,4), (1,3,4,2), (1,4,2,3)` at `k = 4, α = 2`. Other pairs have no
    /// rules.
    pub fn standard(k: usize, alpha: usize) -> Result<Option<Self>> {
        let order = match (k, alpha) {
            (3, 2) => vec![Perm::parse("(1,3,2)", 3)?],
            (4, 2) => {
                let [p1, p2, p3] = quartic_generators();
                let sq = |p: &Perm| p.compose_unchecked(p);
                let cube = |p: &Perm| p.compose_unchecked(&sq(p));
                vec![sq(&p1), sq(&p2), sq(&p3), cube(&p1), cube(&p2), cube(&p3)]
            }
            _ => return Ok(None),
        };
        Lemma4Rules::derive(k, alpha, order).map(Some)
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> &[Perm] {
        &self.order
    }

    pub fn is_eliminable(&self, p: &Perm) -> bool {
        self.rules.contains_key(p)
    }

    pub fn rule(&self, g: &Perm) -> Option<&[(Perm, i64)]> {
        self.rules.get(g).map(Vec::as_slice)
    }

    /// `δ_g - Σ c_q δ_q`, which annihilates `T`.
    pub fn rule_element(&self, g: &Perm) -> Option<AlgebraElement> {
        let rhs = self.rules.get(g)?;
        let one = |p: &Perm| PermTuple::new(vec![p.clone()]).expect("one letter");
        let terms = std::iter::once((one(g), Complex64::new(1.0, 0.0))).chain(
            rhs.iter()
                .map(|(q, c)| (one(q), Complex64::new(-*c as f64, 0.0))),
        );
        AlgebraElement::from_terms(1, self.degree, terms).ok()
    }

    /// Number of letters carrying an eliminable permutation.
    pub fn count(&self, t: &PermTuple) -> usize {
        t.perms().iter().filter(|p| self.is_eliminable(p)).count()
    }

    /// Least [`count`](Self::count) over the conjugation orbit of `t`.
    pub fn rank(&self, t: &PermTuple) -> usize {
        t.conjugates().map(|c| self.count(&c)).min().unwrap_or(0)
    }

    /// One rewrite: take the first orbit member of least count and expand its
    /// first eliminable letter. `None` when the rank is already zero.
    pub fn step(&self, t: &PermTuple) -> Option<Vec<(PermTuple, Complex64)>> {
        if t.degree() != self.degree {
            return None;
        }
        let best = t.conjugates().min_by_key(|c| self.count(c))?;
        let letter = (1..=best.letters()).find(|&l| self.is_eliminable(best.letter(l)))?;
        let rhs = &self.rules[best.letter(letter)];
        Some(
            rhs.iter()
                .map(|(q, c)| {
                    (
                        best.with_letter(letter, q.clone()),
                        Complex64::new(*c as f64, 0.0),
                    )
                })
                .collect(),
        )
    }
}

/// `(1,2,3,4), (1,3,4,2), (1,4,2,3)`.
pub fn quartic_generators() -> [Perm; 3] {
    ["(1,2,3,4)", "(1,3,4,2)", "(1,4,2,3)"].map(|s| Perm::parse(s, 4).expect("valid cycle"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, k: usize) -> Perm {
        Perm::parse(s, k).unwrap()
    }

    #[test]
    fn cubic_antisymmetrizer_vanishes_for_qubits() {
        let a = antisymmetrizer(3, &[1, 2, 3]).unwrap();
        assert_eq!(a.support_len(), 6);
        let m = integer_matrix(&a, 2).unwrap();
        assert_eq!(m.len(), 8);
        assert!(m.iter().flatten().all(|&x| x == 0));
        let m3 = integer_matrix(&a, 3).unwrap();
        assert!(m3.iter().flatten().any(|&x| x != 0));
    }

    #[test]
    fn relation_counts() {
        assert!(matches!(
            lemma4_relations(2, 2),
            Err(Error::NotApplicable(_))
        ));
        assert_eq!(lemma4_relations(3, 2).unwrap().len(), 1);
        assert_eq!(lemma4_relations(4, 2).unwrap().len(), 4 * 24 / 6);
        assert_eq!(lemma4_relations(4, 3).unwrap().len(), 1);
    }

    #[test]
    fn fixed_point_relation() {
        // e + (123) + (132) = (12) + (13) + (23) on four copies
        let a = antisymmetrizer(4, &[1, 2, 3]).unwrap();
        let one = |s: &str| PermTuple::new(vec![p(s, 4)]).unwrap();
        let c = |t: &str| a.coefficient(&one(t)).re;
        for s in ["e", "(1,2,3)", "(1,3,2)"] {
            assert_eq!(c(s), 1.0);
        }
        for s in ["(1,2)", "(1,3)", "(2,3)"] {
            assert_eq!(c(s), -1.0);
        }
    }

    #[test]
    fn cubic_rule() {
        let rules = Lemma4Rules::standard(3, 2).unwrap().unwrap();
        let rule: BTreeMap<Perm, i64> = rules
            .rule(&p("(1,3,2)", 3))
            .unwrap()
            .iter()
            .cloned()
            .collect();
        let expect: BTreeMap<Perm, i64> = [
            ("e", -1),
            ("(1,2,3)", -1),
            ("(1,2)", 1),
            ("(1,3)", 1),
            ("(2,3)", 1),
        ]
        .into_iter()
        .map(|(s, c)| (p(s, 3), c))
        .collect();
        assert_eq!(rule, expect);
    }

    #[test]
    fn quartic_rules_have_unit_derangement_parts() {
        let rules = Lemma4Rules::standard(4, 2).unwrap().unwrap();
        let [p1, p2, p3] = quartic_generators();
        let derangement_part = |g: &Perm| -> BTreeMap<Perm, i64> {
            rules
                .rule(g)
                .unwrap()
                .iter()
                .filter(|(q, _)| q.is_derangement())
                .cloned()
                .collect()
        };
        let sq = |x: &Perm| x.compose_unchecked(x);
        let cube = |x: &Perm| x.compose_unchecked(&sq(x));
        let pair = |a: &Perm, b: &Perm| BTreeMap::from([(a.clone(), 1), (b.clone(), 1)]);
        assert_eq!(derangement_part(&sq(&p1)), pair(&p2, &p3));
        assert_eq!(derangement_part(&sq(&p2)), pair(&p1, &p3));
        assert_eq!(derangement_part(&sq(&p3)), pair(&p1, &p2));
        for g in [&p1, &p2, &p3] {
            assert_eq!(derangement_part(&cube(g)), BTreeMap::from([(g.clone(), 1)]));
        }
        assert_eq!(sq(&p1), p("(1,3)(2,4)", 4));
    }

    #[test]
    fn step_lowers_rank() {
        let rules = Lemma4Rules::standard(3, 2).unwrap().unwrap();
        let t = PermTuple::parse("(1,2,3);(1,2,3);(1,3,2)", Some(3)).unwrap();
        assert_eq!(rules.rank(&t), 1);
        let out = rules.step(&t).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|(u, _)| rules.rank(u) == 0));
        let uniform = PermTuple::parse("(1,3,2);(1,3,2)", Some(3)).unwrap();
        assert_eq!(rules.rank(&uniform), 0);
        assert!(rules.step(&uniform).is_none());
    }
}
