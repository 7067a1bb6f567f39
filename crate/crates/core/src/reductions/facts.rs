//! Purity facts about a code: letter subsets `S` with `Tr_{S^c}(P) = c I`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

const FACT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CodeFacts {
    alpha: usize,
    dimension: f64,
    by_size: BTreeMap<usize, f64>,
    by_subset: BTreeMap<Vec<usize>, f64>,
}

impl CodeFacts {
    /// Facts for a code of dimension `K` over alphabet `alpha`, initially
    /// knowing only the empty subset (`c = K`).
    pub fn new(alpha: usize, dimension: f64) -> Result<Self> {
        if alpha < 2 {
            return Err(Error::Facts(format!("alphabet size {alpha} is below 2")));
        }
        if !(dimension > 0.0 && dimension.is_finite()) {
            return Err(Error::Facts(format!(
                "code dimension {dimension} is not positive"
            )));
        }
        Ok(CodeFacts {
            alpha,
            dimension,
            by_size: BTreeMap::new(),
            by_subset: BTreeMap::new(),
        })
    }

    /// Facts recording every subset of the given sizes, with `c = K / α^{|S|}`.
    pub fn with_sizes(alpha: usize, dimension: f64, sizes: &[usize]) -> Result<Self> {
        let mut facts = CodeFacts::new(alpha, dimension)?;
        for &s in sizes {
            facts.insert_size(s, dimension / (alpha as f64).powi(s as i32))?;
        }
        Ok(facts)
    }

    pub fn alpha(&self) -> usize {
        self.alpha
    }

    pub fn dimension(&self) -> f64 {
        self.dimension
    }

    pub fn sizes(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.by_size.iter().map(|(&s, &c)| (s, c))
    }

    pub fn subsets(&self) -> impl Iterator<Item = (&[usize], f64)> + '_ {
        self.by_subset.iter().map(|(s, &c)| (s.as_slice(), c))
    }

    /// Record that every subset of size `size` has constant `c`.
    pub fn insert_size(&mut self, size: usize, c: f64) -> Result<()> {
        self.check(size, c)?;
        self.by_size.insert(size, c);
        Ok(())
    }

    /// Record the constant for one subset (1-based letters).
    pub fn insert_subset(&mut self, subset: &[usize], c: f64) -> Result<()> {
        let key = normalize(subset)?;
        self.check(key.len(), c)?;
        self.by_subset.insert(key, c);
        Ok(())
    }

    /// The constant `c` with `Tr_{S^c}(P) = c I`, if known. Per-subset entries
    /// take precedence over size entries; the empty subset is always `K`.
    pub fn constant_for(&self, subset: &[usize]) -> Option<f64> {
        let key = normalize(subset).ok()?;
        if key.is_empty() {
            return Some(self.dimension);
        }
        self.by_subset
            .get(&key)
            .or_else(|| self.by_size.get(&key.len()))
            .copied()
    }

    fn check(&self, size: usize, c: f64) -> Result<()> {
        let implied = c * (self.alpha as f64).powi(size as i32);
        if c.is_nan()
            || c <= 0.0
            || (implied - self.dimension).abs() > FACT_TOL * self.dimension.max(1.0)
        {
            return Err(Error::Facts(format!(
                "constant {c} for a {size}-letter subset implies K = {implied}, not {}",
                self.dimension
            )));
        }
        Ok(())
    }
}

fn normalize(subset: &[usize]) -> Result<Vec<usize>> {
    let mut key = subset.to_vec();
    key.sort_unstable();
    key.dedup();
    if key.first() == Some(&0) {
        return Err(Error::Facts("letters are 1-based".into()));
    }
    Ok(key)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency_is_enforced() {
        let mut f = CodeFacts::new(2, 4.0).unwrap();
        f.insert_size(3, 0.5).unwrap();
        assert!(matches!(f.insert_size(2, 0.5), Err(Error::Facts(_))));
        assert!(matches!(f.insert_subset(&[1], -2.0), Err(Error::Facts(_))));
        assert!(CodeFacts::new(1, 4.0).is_err());
        assert!(CodeFacts::new(2, 0.0).is_err());
    }

    #[test]
    fn lookup_precedence() {
        let mut f = CodeFacts::with_sizes(2, 4.0, &[3]).unwrap();
        assert_eq!(f.constant_for(&[]), Some(4.0));
        assert_eq!(f.constant_for(&[4, 2, 1]), Some(0.5));
        assert_eq!(f.constant_for(&[1, 2]), None);
        f.insert_subset(&[2, 1], 1.0).unwrap();
        assert_eq!(f.constant_for(&[1, 2]), Some(1.0));
        assert_eq!(f.constant_for(&[1, 3]), None);
    }
}
