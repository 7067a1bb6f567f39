//! Dense complex operators on multi-letter Hilbert spaces.
//!
//! An [`Operator`] acts on `(C^alpha)^{⊗n}`. Basis vectors are indexed in base
//! `alpha` with letter 1 as the most significant digit, which is also the
//! block order produced by the Kronecker product.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Entrywise tolerance for operator equality checks.
pub const DEFAULT_TOL: f64 = 1e-10;
/// Floor applied to the minimum eigenvalue in [`is_psd`].
pub const PSD_TOL: f64 = 1e-9;

/// Letter count and per-letter alphabet size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SystemShape {
    letters: usize,
    alpha: usize,
}

impl SystemShape {
    pub fn new(letters: usize, alpha: usize) -> Result<Self> {
        if letters == 0 {
            return Err(Error::InvalidShape(
                "letter count must be at least 1".into(),
            ));
        }
        if alpha < 2 {
            return Err(Error::InvalidShape(format!("alphabet size {alpha} < 2")));
        }
        let shape = SystemShape { letters, alpha };
        shape.checked_dim()?;
        Ok(shape)
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    /// `alpha^letters`. Construction guarantees this fits in `usize`.
    pub fn dim(&self) -> usize {
        self.alpha.pow(self.letters as u32)
    }

    fn checked_dim(&self) -> Result<usize> {
        u32::try_from(self.letters)
            .ok()
            .and_then(|n| self.alpha.checked_pow(n))
            .ok_or_else(|| {
                Error::InvalidShape(format!(
                    "dimension {}^{} overflows",
                    self.alpha, self.letters
                ))
            })
    }

    /// Place value of `letter` (1-based) in a basis index.
    pub(crate) fn weight(&self, letter: usize) -> usize {
        self.alpha.pow((self.letters - letter) as u32)
    }
}

/// A dense `alpha^n × alpha^n` complex matrix tagged with its system shape.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    shape: SystemShape,
    matrix: DMatrix<Complex64>,
}

impl Operator {
    pub fn new(shape: SystemShape, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = shape.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::ShapeMismatch(format!(
                "expected {d}x{d} matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Operator { shape, matrix })
    }

    /// Build from a square matrix, inferring the letter count from `alpha`.
    pub fn from_matrix(alpha: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{}, not square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let letters = letters_for_dim(matrix.nrows(), alpha)?;
        Operator::new(SystemShape::new(letters, alpha)?, matrix)
    }

    pub fn identity(shape: SystemShape) -> Self {
        let d = shape.dim();
        Operator {
            shape,
            matrix: DMatrix::identity(d, d),
        }
    }

    pub fn zeros(shape: SystemShape) -> Self {
        let d = shape.dim();
        Operator {
            shape,
            matrix: DMatrix::zeros(d, d),
        }
    }

    /// Diagonal operator from real entries.
    pub fn diagonal(alpha: usize, diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        let m = DMatrix::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::new(diag[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Operator::from_matrix(alpha, m)
    }

    /// Rank-one operator `v v†`.
    pub fn outer(alpha: usize, v: &[Complex64]) -> Result<Self> {
        let d = v.len();
        let m = DMatrix::from_fn(d, d, |r, c| v[r] * v[c].conj());
        Operator::from_matrix(alpha, m)
    }

    pub fn shape(&self) -> SystemShape {
        self.shape
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn adjoint(&self) -> Operator {
        Operator {
            shape: self.shape,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Operator {
        Operator {
            shape: self.shape,
            matrix: &self.matrix * factor,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(Operator {
            shape: self.shape,
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(Operator {
            shape: self.shape,
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(Operator {
            shape: self.shape,
            matrix: &self.matrix * &other.matrix,
        })
    }

    /// `U M U†`.
    pub fn conjugate_by(&self, unitary: &Operator) -> Result<Operator> {
        self.check_same_shape(unitary)?;
        Ok(Operator {
            shape: self.shape,
            matrix: &unitary.matrix * &self.matrix * unitary.matrix.adjoint(),
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Operator) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.dim();
        (0..d).all(|r| (r..d).all(|c| (self.entry(r, c) - self.entry(c, r).conj()).norm() <= tol))
    }

    fn check_same_shape(&self, other: &Operator) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }
}

fn letters_for_dim(dim: usize, alpha: usize) -> Result<usize> {
    if alpha < 2 {
        return Err(Error::InvalidShape(format!("alphabet size {alpha} < 2")));
    }
    let mut letters = 0;
    let mut d = 1usize;
    while d < dim {
        d = d.saturating_mul(alpha);
        letters += 1;
    }
    if d != dim || letters == 0 {
        return Err(Error::ShapeMismatch(format!(
            "dimension {dim} is not a positive power of {alpha}"
        )));
    }
    Ok(letters)
}

/// Kronecker product; the letters of `a` come first.
pub fn tensor_product(a: &Operator, b: &Operator) -> Result<Operator> {
    if a.shape.alpha != b.shape.alpha {
        return Err(Error::AlphabetMismatch {
            left: a.shape.alpha,
            right: b.shape.alpha,
        });
    }
    let shape = SystemShape {
        letters: a.shape.letters + b.shape.letters,
        alpha: a.shape.alpha,
    };
    shape.checked_dim()?;
    Ok(Operator {
        shape,
        matrix: a.matrix.kronecker(&b.matrix),
    })
}

/// Kronecker product of a non-empty list of operators.
pub fn tensor_all(ops: &[Operator]) -> Result<Operator> {
    let (first, rest) = ops
        .split_first()
        .ok_or_else(|| Error::ShapeMismatch("empty operator list".into()))?;
    rest.iter()
        .try_fold(first.clone(), |acc, op| tensor_product(&acc, op))
}

/// Trace out the 1-based `traced` letters, keeping the others in order.
///
/// Tracing every letter yields a 1×1 operator holding `Tr(M)`.
pub fn partial_trace(m: &Operator, traced: &[usize]) -> Result<Operator> {
    let shape = m.shape;
    let n = shape.letters;
    let mut is_traced = vec![false; n + 1];
    for &letter in traced {
        if letter == 0 || letter > n {
            return Err(Error::LetterOutOfRange { letter, n });
        }
        is_traced[letter] = true;
    }
    let kept: Vec<usize> = (1..=n).filter(|&l| !is_traced[l]).collect();
    let gone: Vec<usize> = (1..=n).filter(|&l| is_traced[l]).collect();

    let kept_offsets = subspace_offsets(&shape, &kept);
    let gone_offsets = subspace_offsets(&shape, &gone);

    let out_shape = SystemShape {
        letters: kept.len(),
        alpha: shape.alpha,
    };
    let dk = kept_offsets.len();
    let out = DMatrix::from_fn(dk, dk, |r, c| {
        let (ro, co) = (kept_offsets[r], kept_offsets[c]);
        gone_offsets
            .iter()
            .map(|&g| m.matrix[(ro + g, co + g)])
            .sum()
    });
    Ok(Operator {
        shape: out_shape,
        matrix: out,
    })
}

/// Full-space index offsets for each basis state of the sub-register `letters`,
/// enumerated with the first listed letter most significant.
fn subspace_offsets(shape: &SystemShape, letters: &[usize]) -> Vec<usize> {
    let mut offsets = vec![0usize];
    for &letter in letters {
        let w = shape.weight(letter);
        offsets = offsets
            .iter()
            .flat_map(|&o| (0..shape.alpha).map(move |v| o + v * w))
            .collect();
    }
    offsets
}

/// Hermitian within `tol` entrywise and minimum eigenvalue at least `-tol`.
pub fn is_psd(m: &Operator, tol: f64) -> bool {
    if !m.is_hermitian(tol) {
        return false;
    }
    let herm = (&m.matrix + m.matrix.adjoint()) * Complex64::new(0.5, 0.0);
    herm.symmetric_eigenvalues().iter().all(|&ev| ev >= -tol)
}

/// Haar-random unitary of the given dimension (Gram–Schmidt on a complex
/// Gaussian matrix with the phases of `R` fixed positive).
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<Complex64> {
    let mut cols: Vec<Vec<Complex64>> = (0..dim)
        .map(|_| (0..dim).map(|_| gaussian(rng)).collect())
        .collect();
    for j in 0..dim {
        for i in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let q = &done[i];
            let proj: Complex64 = q
                .iter()
                .zip(rest[0].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            for (x, qi) in rest[0].iter_mut().zip(q) {
                *x -= proj * qi;
            }
        }
        let norm = cols[j].iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    DMatrix::from_fn(dim, dim, |r, c| cols[c][r])
}

/// `U_1 ⊗ ... ⊗ U_n` with independent Haar-random single-letter unitaries.
pub fn random_local_unitary(shape: SystemShape, seed: u64) -> Operator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = shape.alpha;
    let mut matrix = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for _ in 0..shape.letters {
        matrix = matrix.kronecker(&random_unitary(a, &mut rng));
    }
    Operator { shape, matrix }
}

/// Random PSD operator `G G†` with `G` a `dim × rank` complex Gaussian matrix.
pub fn random_psd<R: Rng + ?Sized>(shape: SystemShape, rank: usize, rng: &mut R) -> Operator {
    let d = shape.dim();
    let g = DMatrix::from_fn(d, rank.max(1), |_, _| gaussian(rng));
    Operator {
        shape,
        matrix: &g * g.adjoint(),
    }
}

/// Random Hermitian operator with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(shape: SystemShape, rng: &mut R) -> Operator {
    let d = shape.dim();
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    Operator {
        shape,
        matrix: (&g + g.adjoint()) * Complex64::new(0.5, 0.0),
    }
}

/// Random orthogonal projector of the given rank.
pub fn random_projector<R: Rng + ?Sized>(shape: SystemShape, rank: usize, rng: &mut R) -> Operator {
    let d = shape.dim();
    let u = random_unitary(d, rng);
    let cols = u.columns(0, rank.min(d));
    Operator {
        shape,
        matrix: cols * cols.adjoint(),
    }
}

pub fn random_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    (0..dim).map(|_| gaussian(rng)).collect()
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Render an operator in the dense text format:
/// `dim D` followed by `D` rows of `a+bi` entries.
pub fn write_dense(m: &Operator) -> String {
    let d = m.dim();
    let mut out = format!("dim {d}\n");
    for r in 0..d {
        let row: Vec<String> = (0..d).map(|c| format_complex(m.entry(r, c))).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn format_complex(z: Complex64) -> String {
    let mut s = String::new();
    let re = if z.re == 0.0 { 0.0 } else { z.re };
    let im = if z.im == 0.0 { 0.0 } else { z.im };
    let _ = write!(s, "{re}");
    if im.is_sign_negative() {
        let _ = write!(s, "-{}i", -im);
    } else {
        let _ = write!(s, "+{im}i");
    }
    s
}

/// Parse a single `a+bi` / `a-bi` entry. A bare real is also accepted.
pub fn parse_complex(token: &str) -> Option<Complex64> {
    let t = token.trim();
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&i| {
        (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E')
    })?;
    let re = body[..split].parse::<f64>().ok()?;
    let im_str = &body[split..];
    let im = match im_str {
        "+" => 1.0,
        "-" => -1.0,
        _ => im_str.parse::<f64>().ok()?,
    };
    Some(Complex64::new(re, im))
}

/// Parse the dense text format.
pub fn parse_dense(text: &str, alpha: usize) -> Result<Operator> {
    parse_dense_lines(text.lines().enumerate().map(|(i, l)| (i + 1, l)), alpha)
}

pub(crate) fn parse_dense_lines<'a>(
    lines: impl Iterator<Item = (usize, &'a str)>,
    alpha: usize,
) -> Result<Operator> {
    let mut lines = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    });
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing `dim D` header"))?;
    let d: usize = header
        .trim()
        .strip_prefix("dim")
        .and_then(|rest| rest.trim().parse().ok())
        .ok_or_else(|| {
            Error::parse(
                hline,
                format!("expected `dim D`, found `{}`", header.trim()),
            )
        })?;
    let mut entries = Vec::with_capacity(d * d);
    let mut rows = 0;
    for (lineno, line) in lines {
        if rows == d {
            return Err(Error::parse(lineno, "more rows than declared"));
        }
        let before = entries.len();
        for tok in line.split_whitespace() {
            let z = parse_complex(tok)
                .ok_or_else(|| Error::parse(lineno, format!("bad complex entry `{tok}`")))?;
            entries.push(z);
        }
        if entries.len() - before != d {
            return Err(Error::parse(
                lineno,
                format!("expected {d} entries, found {}", entries.len() - before),
            ));
        }
        rows += 1;
    }
    if rows != d {
        return Err(Error::parse(
            hline,
            format!("expected {d} rows, found {rows}"),
        ));
    }
    Operator::from_matrix(alpha, DMatrix::from_row_slice(d, d, &entries))
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn kron_is_associative(seed in any::<u64>(), alpha in 2usize..4) {
            let s = SystemShape::new(1, alpha).unwrap();
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let (a, b, c) = (random_hermitian(s, &mut r), random_psd(s, 1, &mut r), random_hermitian(s, &mut r));
            let left = tensor_product(&tensor_product(&a, &b).unwrap(), &c).unwrap();
            let right = tensor_product(&a, &tensor_product(&b, &c).unwrap()).unwrap();
            prop_assert!(left.max_abs_diff(&right).unwrap() < 1e-12);
        }

        #[test]
        fn partial_traces_compose(seed in any::<u64>(), mask in 0u8..16, split in 0u8..16) {
            let shape = SystemShape::new(4, 2).unwrap();
            let m = random_hermitian(shape, &mut ChaCha8Rng::seed_from_u64(seed));
            let all: Vec<usize> = (1..=4).filter(|l| mask & (1 << (l - 1)) != 0).collect();
            let (first, second): (Vec<usize>, Vec<usize>) =
                all.iter().partition(|&&l| split & (1 << (l - 1)) != 0);
            let once = partial_trace(&m, &all).unwrap();
            let step = partial_trace(&m, &first).unwrap();
            // letters of `second` renumbered after removing `first`
            let renumbered: Vec<usize> = second
                .iter()
                .map(|&l| l - first.iter().filter(|&&f| f < l).count())
                .collect();
            let twice = partial_trace(&step, &renumbered).unwrap();
            prop_assert!(once.max_abs_diff(&twice).unwrap() < 1e-12);
            prop_assert!((once.trace() - m.trace()).norm() < 1e-12);
        }
    }
}
