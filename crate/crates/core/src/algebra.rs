//! Sparse elements of the group algebra of `S_k^n`.
//!
//! An element is a finite map from tuples to complex coefficients. The
//! product is convolution under the componentwise group law, matching the
//! representation `π ↦ T(π)` used by the invariant evaluator, so that
//! `Σ λ(π) T(π)` is multiplicative in `λ`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::invariant::{perm_operator_index, quadratic_enumerator, Evaluator};
use crate::perm::{Perm, PermTuple};
use crate::qspace::{Operator, SystemShape};

/// Coefficients below this modulus are dropped by [`AlgebraElement::normalize`].
pub const PRUNE_TOL: f64 = 1e-14;
/// Hard cap on subgroup closure enumeration.
pub const MAX_SUBGROUP: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    letters: usize,
    degree: usize,
    terms: BTreeMap<PermTuple, Complex64>,
}

impl AlgebraElement {
    /// The zero element.
    pub fn zero(letters: usize, degree: usize) -> Self {
        AlgebraElement {
            letters,
            degree,
            terms: BTreeMap::new(),
        }
    }

    /// `δ_t`.
    pub fn delta(t: PermTuple) -> Self {
        let mut a = AlgebraElement::zero(t.letters(), t.degree());
        a.terms.insert(t, Complex64::new(1.0, 0.0));
        a
    }

    /// `δ_identity`, the unit.
    pub fn unit(letters: usize, degree: usize) -> Self {
        AlgebraElement::delta(PermTuple::identity(letters, degree))
    }

    pub fn from_terms(
        letters: usize,
        degree: usize,
        terms: impl IntoIterator<Item = (PermTuple, Complex64)>,
    ) -> Result<Self> {
        let mut a = AlgebraElement::zero(letters, degree);
        for (t, c) in terms {
            a.add_term(t, c)?;
        }
        a.normalize();
        Ok(a)
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coefficient(&self, t: &PermTuple) -> Complex64 {
        self.terms.get(t).copied().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PermTuple, &Complex64)> {
        self.terms.iter()
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, t: PermTuple, c: Complex64) -> Result<()> {
        if t.letters() != self.letters || t.degree() != self.degree {
            return Err(Error::ShapeMismatch(format!(
                "tuple with (n, k) = ({}, {}) in an element of shape ({}, {})",
                t.letters(),
                t.degree(),
                self.letters,
                self.degree
            )));
        }
        *self.terms.entry(t).or_default() += c;
        Ok(())
    }

    /// Drop coefficients with modulus below [`PRUNE_TOL`].
    pub fn normalize(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    pub fn scale(&self, factor: Complex64) -> AlgebraElement {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= factor);
        out.normalize();
        out
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (t, c) in &other.terms {
            *out.terms.entry(t.clone()).or_default() += c;
        }
        out.normalize();
        Ok(out)
    }

    pub fn sub(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `(a ∗ b)(π) = Σ_{π'} a(π π'⁻¹) b(π')`.
    pub fn convolve(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_shape(other)?;
        let mut out = AlgebraElement::zero(self.letters, self.degree);
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                *out.terms.entry(s.compose_unchecked(t)).or_default() += a * b;
            }
        }
        out.normalize();
        Ok(out)
    }

    /// `a*(π) = conj(a(π⁻¹))`.
    pub fn adjoint(&self) -> AlgebraElement {
        AlgebraElement {
            letters: self.letters,
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(t, c)| (t.inverse(), c.conj()))
                .collect(),
        }
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &AlgebraElement) -> Result<f64> {
        self.check_shape(other)?;
        let keys = self.terms.keys().chain(other.terms.keys());
        Ok(keys
            .map(|t| (self.coefficient(t) - other.coefficient(t)).norm())
            .fold(0.0, f64::max))
    }

    /// `Σ a(π) T(π)` as a dense operator on `k` copies of `shape`.
    pub fn to_operator(&self, shape: SystemShape, max_states: usize) -> Result<Operator> {
        let composite = SystemShape::new(shape.letters() * self.degree, shape.alpha())?;
        let mut m = DMatrix::zeros(composite.dim(), composite.dim());
        for (t, c) in &self.terms {
            let map = perm_operator_index(t, shape)?.to_vec(max_states)?;
            for (x, &y) in map.iter().enumerate() {
                m[(y, x)] += c;
            }
        }
        Operator::new(composite, m)
    }

    fn check_shape(&self, other: &AlgebraElement) -> Result<()> {
        if (self.letters, self.degree) != (other.letters, other.degree) {
            return Err(Error::ShapeMismatch(format!(
                "elements of shape ({}, {}) and ({}, {})",
                self.letters, self.degree, other.letters, other.degree
            )));
        }
        Ok(())
    }

    /// Text form: one `re im <tuple>` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, c) in &self.terms {
            let _ = writeln!(out, "{} {} {}", c.re, c.im, t);
        }
        out
    }

    /// Parse the text form. When `degree` is `None` it is the largest point
    /// mentioned in any line.
    pub fn parse(text: &str, degree: Option<usize>) -> Result<AlgebraElement> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.splitn(3, char::is_whitespace);
            let (re, im, tuple) = match (parts.next(), parts.next(), parts.next()) {
                (Some(re), Some(im), Some(tuple)) => (re, im, tuple.trim()),
                _ => return Err(Error::parse(i + 1, "expected `re im <tuple>`")),
            };
            let c =
                parse_coefficient(re, im).ok_or_else(|| Error::parse(i + 1, "bad coefficient"))?;
            rows.push((i + 1, c, tuple.to_string()));
        }
        let degree = match degree {
            Some(k) => k,
            None => rows
                .iter()
                .map(|(line, _, t)| {
                    PermTuple::parse(t, None)
                        .map(|t| t.degree())
                        .map_err(|e| Error::parse(*line, e.to_string()))
                })
                .try_fold(1, |acc, k| k.map(|k| acc.max(k)))?,
        };
        let mut terms = Vec::new();
        for (line, c, t) in rows {
            let t = PermTuple::parse(&t, Some(degree))
                .map_err(|e| Error::parse(line, e.to_string()))?;
            terms.push((t, c));
        }
        let letters = terms
            .first()
            .map(|(t, _)| t.letters())
            .ok_or_else(|| Error::parse(1, "no terms"))?;
        AlgebraElement::from_terms(letters, degree, terms)
    }
}

pub(crate) fn parse_coefficient(re: &str, im: &str) -> Option<Complex64> {
    Some(Complex64::new(re.parse().ok()?, im.parse().ok()?))
}

/// Whether `a ∗ a = a` and `a* = a`, each within `tol` entrywise.
pub fn is_hermitian_idempotent(a: &AlgebraElement, tol: f64) -> bool {
    let square = a.convolve(a).expect("same shape");
    square.max_abs_diff(a).expect("same shape") < tol
        && a.adjoint().max_abs_diff(a).expect("same shape") < tol
}

/// The shadow idempotent on `S_2^n`: coefficient `2^{-n} (-1)^{|S(π) ∩ T|}`,
/// where `S(π)` is the set of letters carrying the transposition.
pub fn shadow_element(subset: &[usize], letters: usize) -> Result<AlgebraElement> {
    for &l in subset {
        if l == 0 || l > letters {
            return Err(Error::LetterOutOfRange {
                letter: l,
                n: letters,
            });
        }
    }
    let scale = 0.5f64.powi(letters as i32);
    let terms = PermTuple::all(letters, 2).into_iter().map(|t| {
        let flips = subset
            .iter()
            .filter(|&&l| !t.letter(l).is_identity())
            .count();
        let sign = if flips % 2 == 0 { 1.0 } else { -1.0 };
        (t, Complex64::new(sign * scale, 0.0))
    });
    AlgebraElement::from_terms(letters, 2, terms)
}

/// Uniform average over the subgroup generated by `generators`.
pub fn subgroup_average(
    letters: usize,
    degree: usize,
    generators: &[PermTuple],
) -> Result<AlgebraElement> {
    let group = subgroup_closure(letters, degree, generators, MAX_SUBGROUP)?;
    let weight = Complex64::new(1.0 / group.len() as f64, 0.0);
    AlgebraElement::from_terms(letters, degree, group.into_iter().map(|t| (t, weight)))
}

/// Elements of the subgroup generated by `generators`, by breadth-first closure.
pub fn subgroup_closure(
    letters: usize,
    degree: usize,
    generators: &[PermTuple],
    limit: usize,
) -> Result<Vec<PermTuple>> {
    for g in generators {
        if g.letters() != letters || g.degree() != degree {
            return Err(Error::ShapeMismatch(format!(
                "generator {g} does not have shape ({letters}, {degree})"
            )));
        }
    }
    let identity = PermTuple::identity(letters, degree);
    let mut seen = std::collections::BTreeSet::from([identity.clone()]);
    let mut frontier = vec![identity];
    while let Some(x) = frontier.pop() {
        for g in generators {
            let y = g.compose_unchecked(&x);
            if seen.insert(y.clone()) {
                if seen.len() > limit {
                    return Err(Error::SubgroupTooLarge { limit });
                }
                frontier.push(y);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// Generators of the diagonal subgroup `{(s, ..., s) : s ∈ S_k}`.
pub fn diagonal_generators(letters: usize, degree: usize) -> Vec<PermTuple> {
    (1..degree)
        .map(|j| {
            let mut images: Vec<usize> = (1..=degree).collect();
            images.swap(j - 1, j);
            PermTuple::uniform(letters, Perm::from_images(&images).expect("transposition"))
        })
        .collect()
}

/// `Σ_π a(π) A'_π(M_1, ..., M_k)`.
pub fn shadow_functional(a: &AlgebraElement, ops: &[Operator]) -> Result<Complex64> {
    shadow_functional_with(&Evaluator::default(), a, ops)
}

pub fn shadow_functional_with(
    evaluator: &Evaluator,
    a: &AlgebraElement,
    ops: &[Operator],
) -> Result<Complex64> {
    if ops.len() != a.degree {
        return Err(Error::ShapeMismatch(format!(
            "degree-{} element needs {} operators, got {}",
            a.degree,
            a.degree,
            ops.len()
        )));
    }
    let terms: Vec<(&PermTuple, &Complex64)> = a.terms.iter().collect();
    terms
        .par_iter()
        .map(|(t, c)| evaluator.invariant(t, ops).map(|v| *c * v))
        .collect::<Result<Vec<_>>>()
        .map(|vals| vals.into_iter().sum())
}

/// `‖Σ_π a(π) T(π) (v_1 ⊗ ... ⊗ v_k)‖²`, which equals the shadow functional
/// on the rank-one operators `v_i v_i†` whenever `a` is a Hermitian idempotent.
pub fn squared_norm_witness(
    a: &AlgebraElement,
    shape: SystemShape,
    vectors: &[Vec<Complex64>],
) -> Result<f64> {
    if vectors.len() != a.degree {
        return Err(Error::ShapeMismatch(format!(
            "degree-{} element needs {} vectors, got {}",
            a.degree,
            a.degree,
            vectors.len()
        )));
    }
    let mut product = vec![Complex64::new(1.0, 0.0)];
    for v in vectors {
        if v.len() != shape.dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} on a space of dimension {}",
                v.len(),
                shape.dim()
            )));
        }
        product = product
            .iter()
            .flat_map(|a| v.iter().map(move |b| a * b))
            .collect();
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); product.len()];
    for (t, c) in &a.terms {
        let moved = perm_operator_index(t, shape)?.apply_to_vector(&product)?;
        for (x, z) in acc.iter_mut().zip(moved) {
            *x += c * z;
        }
    }
    Ok(acc.iter().map(|z| z.norm_sqr()).sum())
}

/// `Σ_S (-1)^{|S ∩ T|} Tr(Tr_{S^c}(M) Tr_{S^c}(N))` over all letter subsets.
pub fn shadow_enumerator(m: &Operator, n_op: &Operator, subset: &[usize]) -> Result<Complex64> {
    let n = m.shape().letters();
    for &l in subset {
        if l == 0 || l > n {
            return Err(Error::LetterOutOfRange { letter: l, n });
        }
    }
    let mut total = Complex64::new(0.0, 0.0);
    for mask in 0u64..(1 << n) {
        let s: Vec<usize> = (1..=n).filter(|l| mask & (1 << (l - 1)) != 0).collect();
        let overlap = s.iter().filter(|l| subset.contains(l)).count();
        let sign = if overlap % 2 == 0 { 1.0 } else { -1.0 };
        total += quadratic_enumerator(&s, m, n_op)? * sign;
    }
    Ok(total)
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn element(n: usize, k: usize) -> impl Strategy<Value = AlgebraElement> {
        let tuples = PermTuple::all(n, k);
        prop::collection::vec((0..tuples.len(), -1.0f64..1.0, -1.0f64..1.0), 1..6).prop_map(
            move |raw| {
                AlgebraElement::from_terms(
                    n,
                    k,
                    raw.into_iter()
                        .map(|(i, re, im)| (tuples[i].clone(), Complex64::new(re, im))),
                )
                .unwrap()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn convolution_is_associative_and_distributive(
            (a, b, c) in (element(2, 3), element(2, 3), element(2, 3))
        ) {
            let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
            let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
            prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-12);
            let dist = a.convolve(&b.add(&c).unwrap()).unwrap();
            let split = a.convolve(&b).unwrap().add(&a.convolve(&c).unwrap()).unwrap();
            prop_assert!(dist.max_abs_diff(&split).unwrap() < 1e-12);
        }

        #[test]
        fn adjoint_reverses_products((a, b) in (element(2, 3), element(2, 3))) {
            let lhs = a.convolve(&b).unwrap().adjoint();
            let rhs = b.adjoint().convolve(&a.adjoint()).unwrap();
            prop_assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
        }
    }
}
