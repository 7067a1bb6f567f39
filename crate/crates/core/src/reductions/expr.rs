//! Formal linear combinations of basic invariants.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::algebra::{parse_coefficient, PRUNE_TOL};
use crate::error::{Error, Result};
use crate::invariant::Evaluator;
use crate::perm::PermTuple;
use crate::qspace::Operator;

/// `Σ c_t A'_t` over tuples with a common letter count. Keys are stored in
/// canonical (conjugation-minimal) form, so conjugate tuples combine.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantExpression {
    letters: usize,
    terms: BTreeMap<PermTuple, Complex64>,
}

impl InvariantExpression {
    pub fn new(letters: usize) -> Self {
        InvariantExpression {
            letters,
            terms: BTreeMap::new(),
        }
    }

    /// The single term `1 · A'_t`.
    pub fn single(t: PermTuple) -> Self {
        let mut e = InvariantExpression::new(t.letters());
        e.terms.insert(t.canonicalize(), Complex64::new(1.0, 0.0));
        e
    }

    pub fn from_terms(
        letters: usize,
        terms: impl IntoIterator<Item = (PermTuple, Complex64)>,
    ) -> Result<Self> {
        let mut e = InvariantExpression::new(letters);
        for (t, c) in terms {
            e.add_term(t, c)?;
        }
        e.prune();
        Ok(e)
    }

    pub fn letters(&self) -> usize {
        self.letters
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PermTuple, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, t: &PermTuple) -> Complex64 {
        self.terms
            .get(&t.canonicalize())
            .copied()
            .unwrap_or_default()
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(PermTuple::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, t: PermTuple, c: Complex64) -> Result<()> {
        if t.letters() != self.letters {
            return Err(Error::ShapeMismatch(format!(
                "{}-letter tuple in a {}-letter expression",
                t.letters(),
                self.letters
            )));
        }
        *self.terms.entry(t.canonicalize()).or_default() += c;
        Ok(())
    }

    pub(crate) fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_TOL);
    }

    pub fn scale(&self, factor: Complex64) -> InvariantExpression {
        let mut out = self.clone();
        out.terms.values_mut().for_each(|c| *c *= factor);
        out.prune();
        out
    }

    /// `Σ c_t A'_t(P)`.
    pub fn evaluate(&self, p: &Operator) -> Result<Complex64> {
        self.evaluate_with(&Evaluator::default(), p)
    }

    pub fn evaluate_with(&self, evaluator: &Evaluator, p: &Operator) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (t, c) in &self.terms {
            total += c * evaluator.invariant_code(t, p)?;
        }
        Ok(total)
    }

    /// Text form: one `re im k <tuple>` line per term.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (t, c) in &self.terms {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                fmt_real(c.re),
                fmt_real(c.im),
                t.degree(),
                t
            );
        }
        out
    }

    pub fn parse(text: &str) -> Result<InvariantExpression> {
        let mut terms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.splitn(4, char::is_whitespace).collect();
            if fields.len() < 4 {
                return Err(Error::parse(i + 1, "expected `re im k <tuple>`"));
            }
            let c = parse_coefficient(fields[0], fields[1])
                .ok_or_else(|| Error::parse(i + 1, "bad coefficient"))?;
            let k: usize = fields[2]
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad degree `{}`", fields[2])))?;
            let t = PermTuple::parse(fields[3].trim(), Some(k))
                .map_err(|e| Error::parse(i + 1, e.to_string()))?;
            terms.push((i + 1, t, c));
        }
        let letters = terms
            .first()
            .map(|(_, t, _)| t.letters())
            .ok_or_else(|| Error::parse(1, "no terms"))?;
        let mut e = InvariantExpression::new(letters);
        for (line, t, c) in terms {
            e.add_term(t, c)
                .map_err(|err| Error::parse(line, err.to_string()))?;
        }
        e.prune();
        Ok(e)
    }
}

fn fmt_real(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::fixture_442_projector;

    #[test]
    fn conjugates_combine() {
        let a = PermTuple::parse("(1,2,3);(1,3,2)", Some(3)).unwrap();
        let b = a
            .conjugate(&crate::perm::Perm::parse("(1,2)", 3).unwrap())
            .unwrap();
        assert_ne!(a, b);
        let e =
            InvariantExpression::from_terms(2, [(a.clone(), 1.0.into()), (b, 2.0.into())]).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e.coefficient(&a), Complex64::new(3.0, 0.0));
    }

    #[test]
    fn text_round_trip_and_errors() {
        let text = "0.25 0 2 (1,2);(1,2);e;e\n-1 0.5 1 e;e;e;e\n";
        let e = InvariantExpression::parse(text).unwrap();
        assert_eq!(InvariantExpression::parse(&e.to_text()).unwrap(), e);
        assert!(matches!(
            InvariantExpression::parse("1 0 x (1,2)"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            InvariantExpression::parse("1 0 2 (1,2)\n1 0 2 e;e\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn evaluation_is_linear() {
        let p = fixture_442_projector();
        let e = InvariantExpression::parse("0.25 0 2 (1,2);(1,2);e;e\n2 0 1 e;e;e;e\n").unwrap();
        let v = e.evaluate(&p).unwrap();
        assert!((v - Complex64::new(0.25 * 4.0 + 8.0, 0.0)).norm() < 1e-9);
    }
}
