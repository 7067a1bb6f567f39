//! Basic invariants `Tr(T(π) (M_1 ⊗ ... ⊗ M_k))`.
//!
//! The composite space `((C^α)^{⊗n})^{⊗k}` is indexed copy-major: digit
//! position `c*n + i` holds letter `i` of copy `c`, most significant first.
//! `T(π)` moves the digit at (copy `c`, letter `i`) to (copy `π_i(c)`,
//! letter `i`), so `T(a)T(b) = T(a∘b)`.
//!
//! [`Evaluator::invariant`] never builds `T(π)`; it sums one product of `k`
//! matrix entries per composite basis state. [`invariant_dense`] builds both
//! `T(π)` and the Kronecker product explicitly and is kept as a test oracle.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::perm::{Perm, PermTuple};
use crate::qspace::{partial_trace, tensor_all, Operator, SystemShape};

/// Default cap on `α^{nk}` for the summation path.
pub const DEFAULT_MAX_STATES: usize = 1 << 20;
/// Cap on `α^{nk}` for [`invariant_dense`]; it stores two dense matrices of
/// that dimension.
pub const ORACLE_MAX_STATES: usize = 1 << 10;

/// The basis permutation realizing `T(π)` on the composite space.
#[derive(Debug, Clone)]
pub struct CopyPermutation {
    shape: SystemShape,
    copies: usize,
    // digit position -> digit position
    targets: Vec<usize>,
}

impl CopyPermutation {
    /// Shape of the composite space, as `n*k` letters.
    pub fn composite_shape(&self) -> Result<SystemShape> {
        SystemShape::new(self.shape.letters() * self.copies, self.shape.alpha())
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Number of composite basis states, `α^{nk}`, without overflow.
    pub fn states(&self) -> u128 {
        (self.shape.alpha() as u128)
            .checked_pow(self.targets.len() as u32)
            .unwrap_or(u128::MAX)
    }

    /// Image of a composite basis index.
    pub fn apply(&self, x: usize) -> usize {
        let alpha = self.shape.alpha();
        let len = self.targets.len();
        let mut digits = vec![0usize; len];
        let mut rest = x;
        for p in (0..len).rev() {
            digits[p] = rest % alpha;
            rest /= alpha;
        }
        let mut moved = vec![0usize; len];
        for (p, &d) in digits.iter().enumerate() {
            moved[self.targets[p]] = d;
        }
        moved.iter().fold(0, |acc, &d| acc * alpha + d)
    }

    /// The full index map, if it fits within `max_states`.
    pub fn to_vec(&self, max_states: usize) -> Result<Vec<usize>> {
        let states = self.checked_states(max_states)?;
        Ok((0..states).map(|x| self.apply(x)).collect())
    }

    /// `T(π)` as a dense 0/1 operator.
    pub fn to_operator(&self, max_states: usize) -> Result<Operator> {
        let map = self.to_vec(max_states)?;
        let d = map.len();
        let mut m = DMatrix::zeros(d, d);
        for (x, &y) in map.iter().enumerate() {
            m[(y, x)] = Complex64::new(1.0, 0.0);
        }
        Operator::new(self.composite_shape()?, m)
    }

    /// `T(π) v` for a vector on the composite space.
    pub fn apply_to_vector(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let states = self.checked_states(usize::MAX)?;
        if v.len() != states {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} on a space of dimension {states}",
                v.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); states];
        for (x, &z) in v.iter().enumerate() {
            out[self.apply(x)] = z;
        }
        Ok(out)
    }

    fn checked_states(&self, max_states: usize) -> Result<usize> {
        let states = self.states();
        if states > max_states as u128 {
            return Err(Error::Budget {
                states,
                limit: max_states,
            });
        }
        Ok(states as usize)
    }
}

/// Build the basis permutation for `T(t)` on `k` copies of `shape`.
pub fn perm_operator_index(t: &PermTuple, shape: SystemShape) -> Result<CopyPermutation> {
    let n = shape.letters();
    if t.letters() != n {
        return Err(Error::ShapeMismatch(format!(
            "tuple has {} letters, system has {n}",
            t.letters()
        )));
    }
    let k = t.degree();
    let mut targets = vec![0; n * k];
    for c in 0..k {
        for (i, perm) in t.perms().iter().enumerate() {
            targets[c * n + i] = perm.apply0(c) * n + i;
        }
    }
    Ok(CopyPermutation {
        shape,
        copies: k,
        targets,
    })
}

/// Evaluation settings: a state budget and the number of summation chunks.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    max_states: usize,
    chunks: Option<usize>,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator {
            max_states: DEFAULT_MAX_STATES,
            chunks: None,
        }
    }
}

impl Evaluator {
    pub fn new(max_states: usize) -> Self {
        Evaluator {
            max_states,
            chunks: None,
        }
    }

    /// Sum the basis states in exactly `chunks` contiguous pieces.
    pub fn with_chunks(mut self, chunks: usize) -> Self {
        self.chunks = Some(chunks.max(1));
        self
    }

    pub fn max_states(&self) -> usize {
        self.max_states
    }

    /// `A'_t(M_1, ..., M_k)`.
    pub fn invariant(&self, t: &PermTuple, ops: &[Operator]) -> Result<Complex64> {
        let shape = check_operands(t, ops)?;
        let n = shape.letters();
        let k = t.degree();
        let alpha = shape.alpha();
        let states = composite_states(alpha, n * k);
        if states > self.max_states as u128 {
            return Err(Error::Budget {
                states,
                limit: self.max_states,
            });
        }
        let states = states as usize;

        let weights: Vec<usize> = (1..=n).map(|l| shape.weight(l)).collect();
        // each digit feeds the row of its own copy and the column of its image copy
        let digits: Vec<Digit> = (0..k)
            .flat_map(|c| {
                let weights = &weights;
                t.perms().iter().enumerate().map(move |(i, perm)| Digit {
                    row_copy: c,
                    col_copy: perm.apply0(c),
                    weight: weights[i],
                })
            })
            .collect();
        let dim = shape.dim();
        let entries: Vec<&[Complex64]> = ops.iter().map(|op| op.matrix().as_slice()).collect();
        let ctx = SumContext {
            digits: &digits,
            entries: &entries,
            alpha,
            dim,
            copies: k,
        };

        let chunks = self
            .chunks
            .unwrap_or_else(|| (rayon::current_num_threads() * 4).max(1))
            .min(states);
        let per = states.div_ceil(chunks);
        let total = (0..chunks)
            .into_par_iter()
            .map(|i| {
                let start = i * per;
                let end = ((i + 1) * per).min(states);
                if start >= end {
                    Complex64::new(0.0, 0.0)
                } else {
                    ctx.sum_range(start, end)
                }
            })
            .collect::<Vec<_>>()
            .into_iter()
            .sum();
        Ok(total)
    }

    /// `A'_t(Q) = Tr(T(t) P^{⊗k})`.
    pub fn invariant_code(&self, t: &PermTuple, p: &Operator) -> Result<Complex64> {
        let ops = vec![p.clone(); t.degree()];
        self.invariant(t, &ops)
    }

    /// Mean of [`Evaluator::invariant_code`] over all `n!` reorderings of the
    /// letters of `t`. Each distinct reordering is evaluated once and weighted
    /// by its multiplicity.
    pub fn symmetrize(&self, t: &PermTuple, p: &Operator) -> Result<Complex64> {
        let n = t.letters();
        let mut orbit: BTreeMap<PermTuple, usize> = BTreeMap::new();
        let orders = Perm::all(n);
        for order in &orders {
            *orbit
                .entry(t.permute_letters(&order.images())?)
                .or_default() += 1;
        }
        let mut total = Complex64::new(0.0, 0.0);
        for (tuple, count) in &orbit {
            total += self.invariant_code(tuple, p)? * *count as f64;
        }
        Ok(total / orders.len() as f64)
    }
}

#[derive(Debug, Clone, Copy)]
struct Digit {
    row_copy: usize,
    col_copy: usize,
    weight: usize,
}

struct SumContext<'a> {
    digits: &'a [Digit],
    entries: &'a [&'a [Complex64]],
    alpha: usize,
    dim: usize,
    copies: usize,
}

impl SumContext<'_> {
    fn sum_range(&self, start: usize, end: usize) -> Complex64 {
        let len = self.digits.len();
        let mut value = vec![0usize; len];
        let mut rows = vec![0usize; self.copies];
        let mut cols = vec![0usize; self.copies];
        let mut rest = start;
        for p in (0..len).rev() {
            let v = rest % self.alpha;
            rest /= self.alpha;
            value[p] = v;
            let d = self.digits[p];
            rows[d.row_copy] += v * d.weight;
            cols[d.col_copy] += v * d.weight;
        }

        let mut acc = Complex64::new(0.0, 0.0);
        for _ in start..end {
            let mut prod = Complex64::new(1.0, 0.0);
            for c in 0..self.copies {
                // column-major storage
                let z = self.entries[c][cols[c] * self.dim + rows[c]];
                if z.re == 0.0 && z.im == 0.0 {
                    prod = z;
                    break;
                }
                prod *= z;
            }
            acc += prod;

            // odometer step, least significant digit last
            let mut p = len;
            while p > 0 {
                p -= 1;
                let d = self.digits[p];
                if value[p] + 1 < self.alpha {
                    value[p] += 1;
                    rows[d.row_copy] += d.weight;
                    cols[d.col_copy] += d.weight;
                    break;
                }
                let back = (self.alpha - 1) * d.weight;
                value[p] = 0;
                rows[d.row_copy] -= back;
                cols[d.col_copy] -= back;
            }
        }
        acc
    }
}

fn composite_states(alpha: usize, digits: usize) -> u128 {
    (alpha as u128)
        .checked_pow(digits as u32)
        .unwrap_or(u128::MAX)
}

fn check_operands(t: &PermTuple, ops: &[Operator]) -> Result<SystemShape> {
    if ops.len() != t.degree() {
        return Err(Error::ShapeMismatch(format!(
            "degree-{} tuple needs {} operators, got {}",
            t.degree(),
            t.degree(),
            ops.len()
        )));
    }
    let shape = ops[0].shape();
    if let Some(bad) = ops.iter().find(|op| op.shape() != shape) {
        if bad.shape().alpha() != shape.alpha() {
            return Err(Error::AlphabetMismatch {
                left: shape.alpha(),
                right: bad.shape().alpha(),
            });
        }
        return Err(Error::ShapeMismatch(format!(
            "operators act on {:?} and {:?}",
            shape,
            bad.shape()
        )));
    }
    if shape.letters() != t.letters() {
        return Err(Error::ShapeMismatch(format!(
            "tuple has {} letters, operators act on {}",
            t.letters(),
            shape.letters()
        )));
    }
    Ok(shape)
}

/// [`Evaluator::invariant`] with default settings.
pub fn invariant(t: &PermTuple, ops: &[Operator]) -> Result<Complex64> {
    Evaluator::default().invariant(t, ops)
}

/// [`Evaluator::invariant_code`] with default settings.
pub fn invariant_code(t: &PermTuple, p: &Operator) -> Result<Complex64> {
    Evaluator::default().invariant_code(t, p)
}

/// [`Evaluator::symmetrize`] with default settings.
pub fn symmetrize(t: &PermTuple, p: &Operator) -> Result<Complex64> {
    Evaluator::default().symmetrize(t, p)
}

/// Oracle path: `Tr(T · K)` with `T(t)` and `K = M_1 ⊗ ... ⊗ M_k` both
/// materialized as dense matrices. Limited to [`ORACLE_MAX_STATES`].
pub fn invariant_dense(t: &PermTuple, ops: &[Operator]) -> Result<Complex64> {
    let shape = check_operands(t, ops)?;
    let sigma = perm_operator_index(t, shape)?;
    let tm = sigma.to_operator(ORACLE_MAX_STATES)?;
    let kron = tensor_all(ops)?;
    let (tm, kron) = (tm.matrix(), kron.matrix());
    let d = tm.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..d {
        for b in 0..d {
            acc += tm[(a, b)] * kron[(b, a)];
        }
    }
    Ok(acc)
}

/// The degree-2 tuple with a transposition on the letters of `subset` and the
/// identity elsewhere.
pub fn subset_tuple(n: usize, subset: &[usize]) -> Result<PermTuple> {
    let swap = Perm::from_images(&[2, 1])?;
    let mut perms = vec![Perm::identity(2); n];
    for &l in subset {
        if l == 0 || l > n {
            return Err(Error::LetterOutOfRange { letter: l, n });
        }
        perms[l - 1] = swap.clone();
    }
    PermTuple::new(perms)
}

/// `A'_S(M, N) = Tr(Tr_{S^c}(M) Tr_{S^c}(N))`, computed from partial traces.
pub fn quadratic_enumerator(subset: &[usize], m: &Operator, n_op: &Operator) -> Result<Complex64> {
    if m.shape() != n_op.shape() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            m.shape(),
            n_op.shape()
        )));
    }
    let n = m.shape().letters();
    let mut keep = vec![false; n + 1];
    for &l in subset {
        if l == 0 || l > n {
            return Err(Error::LetterOutOfRange { letter: l, n });
        }
        keep[l] = true;
    }
    let traced: Vec<usize> = (1..=n).filter(|&l| !keep[l]).collect();
    let rm = partial_trace(m, &traced)?;
    let rn = partial_trace(n_op, &traced)?;
    Ok((rm.matrix() * rn.matrix()).trace())
}
