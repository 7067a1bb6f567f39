//! Qubit stabilizer codes, their projectors and purity profiles.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::qspace::{parse_dense_lines, partial_trace, Operator, SystemShape, DEFAULT_TOL};
use crate::reductions::CodeFacts;

/// Single-qubit Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Pauli {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    fn matrix(self) -> DMatrix<Complex64> {
        let (o, l, i) = (
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
        );
        match self {
            Pauli::I => DMatrix::from_row_slice(2, 2, &[l, o, o, l]),
            Pauli::X => DMatrix::from_row_slice(2, 2, &[o, l, l, o]),
            Pauli::Y => DMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
            Pauli::Z => DMatrix::from_row_slice(2, 2, &[l, o, o, -l]),
        }
    }

    /// `self * other = i^phase * result`.
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        let phase = match (self, other) {
            (X, Y) | (Y, Z) | (Z, X) => 1,
            (Y, X) | (Z, Y) | (X, Z) => 3,
            _ => 0,
        };
        let (x1, z1) = self.bits();
        let (x2, z2) = other.bits();
        (phase, Pauli::from_bits(x1 ^ x2, z1 ^ z2))
    }
}

/// A Pauli string `i^phase · P_1 ⊗ ... ⊗ P_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: u8,
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn new(negative: bool, ops: Vec<Pauli>) -> Self {
        PauliString {
            phase: if negative { 2 } else { 0 },
            ops,
        }
    }

    pub fn identity(n: usize) -> Self {
        PauliString::new(false, vec![Pauli::I; n])
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    /// Phase as a power of `i`.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let clashes = self
            .ops
            .iter()
            .zip(&other.ops)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        clashes % 2 == 0
    }

    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut phase = self.phase + other.phase;
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(a, b)| {
                let (p, r) = a.mul(*b);
                phase += p;
                r
            })
            .collect();
        PauliString {
            phase: phase % 4,
            ops,
        }
    }

    pub fn matrix(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        for op in &self.ops {
            m = m.kronecker(&op.matrix());
        }
        m * Complex64::i().powu(self.phase as u32)
    }

    fn symplectic(&self) -> Vec<bool> {
        let (xs, zs): (Vec<bool>, Vec<bool>) = self.ops.iter().map(|p| p.bits()).unzip();
        xs.into_iter().chain(zs).collect()
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// `XXZI`, optionally prefixed by `+` or `-`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let ops = body
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                _ => Err(Error::Syntax(format!("bad Pauli letter `{c}` in `{s}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::Syntax("empty Pauli string".into()));
        }
        Ok(PauliString::new(negative, ops))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            0 => "",
            1 => "i",
            2 => "-",
            _ => "-i",
        };
        f.write_str(sign)?;
        for op in &self.ops {
            write!(f, "{op:?}")?;
        }
        Ok(())
    }
}

/// Rank of a set of bit vectors over GF(2).
fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col]) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r][col] {
                let pivot_row = rows[rank].clone();
                for (a, b) in rows[r].iter_mut().zip(pivot_row) {
                    *a ^= b;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// A qubit stabilizer code given by commuting Pauli generators.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerCode {
    letters: usize,
    generators: Vec<PauliString>,
}

impl StabilizerCode {
    pub fn new(letters: usize, generators: Vec<PauliString>) -> Result<Self> {
        if letters == 0 {
            return Err(Error::InvalidShape(
                "a code needs at least one letter".into(),
            ));
        }
        for g in &generators {
            if g.len() != letters {
                return Err(Error::Structure(format!(
                    "generator {g} has length {}, expected {letters}",
                    g.len()
                )));
            }
            if g.phase % 2 == 1 {
                return Err(Error::Structure(format!("generator {g} is not Hermitian")));
            }
        }
        for (i, a) in generators.iter().enumerate() {
            for b in &generators[i + 1..] {
                if !a.commutes_with(b) {
                    return Err(Error::Structure(format!(
                        "generators {a} and {b} anticommute"
                    )));
                }
            }
        }
        Ok(StabilizerCode {
            letters,
            generators,
        })
    }

    /// Parse comma-separated generators such as `XXXX,ZZZZ`.
    pub fn from_generators(text: &str) -> Result<Self> {
        let gens = text
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<PauliString>>>()?;
        let n = gens
            .first()
            .map(PauliString::len)
            .ok_or_else(|| Error::Structure("no generators given".into()))?;
        StabilizerCode::new(n, gens)
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// GF(2) rank of the generators.
    pub fn rank(&self) -> usize {
        gf2_rank(
            self.generators
                .iter()
                .map(PauliString::symplectic)
                .collect(),
        )
    }

    /// Code dimension `2^{n-r}`.
    pub fn dimension(&self) -> usize {
        1 << (self.letters - self.rank())
    }

    /// All `2^r` elements of the stabilizer group.
    pub fn group_elements(&self) -> Vec<PauliString> {
        let mut elems = vec![PauliString::identity(self.letters)];
        let mut rows: Vec<Vec<bool>> = Vec::new();
        for g in &self.generators {
            let mut trial = rows.clone();
            trial.push(g.symplectic());
            if gf2_rank(trial.clone()) == rows.len() {
                continue;
            }
            rows = trial;
            let extra: Vec<PauliString> = elems.iter().map(|e| e.mul(g)).collect();
            elems.extend(extra);
        }
        elems
    }

    /// `P = ∏_g (I + g)/2`.
    pub fn projector(&self) -> Result<Operator> {
        let shape = SystemShape::new(self.letters, 2)?;
        let d = shape.dim();
        let half = Complex64::new(0.5, 0.0);
        let mut p = DMatrix::<Complex64>::identity(d, d);
        for g in &self.generators {
            let factor = (DMatrix::identity(d, d) + g.matrix()) * half;
            p *= factor;
        }
        let p = Operator::new(shape, p)?;
        let expected = self.dimension() as f64;
        if (p.trace().re - expected).abs() > 1e-8 {
            return Err(Error::Structure(format!(
                "projector has trace {:.6}, expected {expected}; the generators imply -I",
                p.trace().re
            )));
        }
        Ok(p)
    }
}

/// `{XXXX, ZZZZ}`, the binary `((4,4,2))` code.
pub fn fixture_442() -> StabilizerCode {
    StabilizerCode::from_generators("XXXX,ZZZZ").expect("fixture generators are valid")
}

pub fn fixture_442_projector() -> Operator {
    fixture_442()
        .projector()
        .expect("fixture projector is valid")
}

/// Random commuting, independent generators: candidates are drawn uniformly
/// and kept when they commute with every kept generator and raise the rank.
pub fn random_commuting_generators<R: Rng + ?Sized>(
    letters: usize,
    count: usize,
    rng: &mut R,
) -> Vec<PauliString> {
    let count = count.min(letters);
    let mut kept: Vec<PauliString> = Vec::new();
    let mut attempts = 0;
    while kept.len() < count && attempts < 10_000 {
        attempts += 1;
        let ops: Vec<Pauli> = (0..letters)
            .map(|_| match rng.random_range(0..4) {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            })
            .collect();
        let cand = PauliString::new(rng.random_bool(0.5), ops);
        if cand.ops.iter().all(|&p| p == Pauli::I) || !kept.iter().all(|g| g.commutes_with(&cand)) {
            continue;
        }
        let mut rows: Vec<Vec<bool>> = kept.iter().map(PauliString::symplectic).collect();
        rows.push(cand.symplectic());
        if gf2_rank(rows) == kept.len() + 1 {
            kept.push(cand);
        }
    }
    kept
}

/// Proportionality test result for one kept-letter subset `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetPurity {
    pub letters: Vec<usize>,
    /// `c` with `Tr_{S^c}(P) = c I`, or `None` when not proportional.
    pub constant: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PurityProfile {
    pub subsets: Vec<SubsetPurity>,
    pub mds: bool,
    pub facts: CodeFacts,
}

/// Test `Tr_{S^c}(P) ∝ I` for every `S` with `|S| <= max_size`.
///
/// The MDS flag additionally requires every `S` with `|S| < n/2 + 1` to pass
/// with `c = K / α^{|S|}`; those sizes are checked even above `max_size`.
pub fn purity_profile(p: &Operator, max_size: usize) -> Result<PurityProfile> {
    let sq = p.mul(p)?;
    let err = sq.max_abs_diff(p)?;
    if err > 1e-8 {
        return Err(Error::NotProjector(err));
    }
    let n = p.shape().letters();
    let alpha = p.shape().alpha();
    let dimension = p.trace().re;
    let mut facts = CodeFacts::new(alpha, dimension)?;

    let mds_limit = (0..=n).take_while(|&s| 2 * s < n + 2).last().unwrap_or(0);
    let mut subsets = Vec::new();
    let mut mds = true;
    for size in 0..=max_size.max(mds_limit).min(n) {
        let mut all_pass = true;
        for subset in combinations(n, size) {
            let constant = proportional_constant(p, &subset)?;
            let expected = dimension / (alpha as f64).powi(size as i32);
            let pass = constant.is_some_and(|c| (c - expected).abs() < DEFAULT_TOL);
            if size <= mds_limit && size > 0 && !pass {
                mds = false;
            }
            all_pass &= constant.is_some();
            if size <= max_size {
                if let Some(c) = constant {
                    facts.insert_subset(&subset, c)?;
                }
                subsets.push(SubsetPurity {
                    letters: subset,
                    constant,
                });
            }
        }
        if all_pass && size <= max_size {
            facts.insert_size(size, dimension / (alpha as f64).powi(size as i32))?;
        }
    }
    Ok(PurityProfile {
        subsets,
        mds,
        facts,
    })
}

fn proportional_constant(p: &Operator, kept: &[usize]) -> Result<Option<f64>> {
    let n = p.shape().letters();
    let traced: Vec<usize> = (1..=n).filter(|l| !kept.contains(l)).collect();
    let reduced = partial_trace(p, &traced)?;
    let d = reduced.dim();
    let c = reduced.trace() / d as f64;
    let m = reduced.matrix();
    let ok = (0..d).all(|r| {
        (0..d).all(|col| {
            let target = if r == col {
                c
            } else {
                Complex64::new(0.0, 0.0)
            };
            (m[(r, col)] - target).norm() < DEFAULT_TOL
        })
    });
    Ok((ok && c.im.abs() < DEFAULT_TOL && c.re > 0.0).then_some(c.re))
}

/// 1-based `size`-subsets of `{1..n}` in lexicographic order.
pub fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        for x in start..=n {
            cur.push(x);
            rec(x + 1, n, size, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        rec(1, n, size, &mut Vec::new(), &mut out);
    }
    out
}

/// Contents of a `.qcode` file.
#[derive(Debug, Clone)]
pub enum CodeFile {
    Stabilizer(StabilizerCode),
    Matrix(Operator),
}

impl CodeFile {
    /// Parse either `n=<int> alpha=2` followed by `stab <pauli>` lines, or
    /// `matrix [alpha=<int>]` followed by the dense operator format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            });
        let (hline, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty code file"))?;
        let header = header.trim();
        if let Some(rest) = header.strip_prefix("matrix") {
            let alpha = match rest.trim() {
                "" => 2,
                field => field
                    .strip_prefix("alpha=")
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| {
                        Error::parse(
                            hline,
                            format!("expected `matrix [alpha=<int>]`, found `{header}`"),
                        )
                    })?,
            };
            return Ok(CodeFile::Matrix(parse_dense_lines(lines, alpha)?));
        }
        let mut n = None;
        let mut alpha = None;
        for field in header.split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| {
                Error::parse(hline, format!("expected key=value, found `{field}`"))
            })?;
            let value: usize = value
                .parse()
                .map_err(|_| Error::parse(hline, format!("bad integer in `{field}`")))?;
            match key {
                "n" => n = Some(value),
                "alpha" => alpha = Some(value),
                _ => return Err(Error::parse(hline, format!("unknown header field `{key}`"))),
            }
        }
        let n = n.ok_or_else(|| Error::parse(hline, "header is missing n=<int>"))?;
        if alpha.unwrap_or(2) != 2 {
            return Err(Error::parse(hline, "stabilizer codes must have alpha=2"));
        }
        let mut gens = Vec::new();
        for (lineno, line) in lines {
            let body = line.trim().strip_prefix("stab").ok_or_else(|| {
                Error::parse(
                    lineno,
                    format!("expected `stab <string>`, found `{}`", line.trim()),
                )
            })?;
            let g: PauliString = body
                .parse()
                .map_err(|e: Error| Error::parse(lineno, e.to_string()))?;
            if g.len() != n {
                return Err(Error::parse(
                    lineno,
                    format!("generator has length {}, expected {n}", g.len()),
                ));
            }
            gens.push(g);
        }
        Ok(CodeFile::Stabilizer(StabilizerCode::new(n, gens)?))
    }

    pub fn projector(&self) -> Result<Operator> {
        match self {
            CodeFile::Stabilizer(code) => code.projector(),
            CodeFile::Matrix(m) => Ok(m.clone()),
        }
    }
}
