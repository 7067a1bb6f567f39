//! Permutations in cycle notation and tuples of them.
//!
//! Points are 1-based in every public interface. Composition follows the
//! usual function convention: `a.compose(&b)` applies `b` first.

use std::fmt;

use crate::error::{Error, Result};

/// A permutation of `{1..k}` stored as its image array.
///
/// Ordering is lexicographic on the image array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    // 0-based images
    images: Vec<usize>,
}

impl Perm {
    pub fn identity(k: usize) -> Self {
        Perm {
            images: (0..k).collect(),
        }
    }

    /// Build from 1-based images, e.g. `[2, 3, 4, 1]` for `(1,2,3,4)`.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let k = images.len();
        let mut seen = vec![false; k];
        let mut out = Vec::with_capacity(k);
        for &p in images {
            if p == 0 || p > k {
                return Err(Error::PointOutOfRange { point: p, k });
            }
            if std::mem::replace(&mut seen[p - 1], true) {
                return Err(Error::MalformedCycle(format!(
                    "{images:?} is not a bijection"
                )));
            }
            out.push(p - 1);
        }
        Ok(Perm { images: out })
    }

    /// Build from 1-based cycles.
    pub fn from_cycles(k: usize, cycles: &[&[usize]]) -> Result<Self> {
        let mut images: Vec<usize> = (0..k).collect();
        let mut used = vec![false; k];
        for cycle in cycles {
            if cycle.is_empty() {
                return Err(Error::MalformedCycle("empty cycle".into()));
            }
            for &p in cycle.iter() {
                if p == 0 || p > k {
                    return Err(Error::PointOutOfRange { point: p, k });
                }
                if std::mem::replace(&mut used[p - 1], true) {
                    return Err(Error::MalformedCycle(format!("point {p} repeated")));
                }
            }
            for (i, &p) in cycle.iter().enumerate() {
                images[p - 1] = cycle[(i + 1) % cycle.len()] - 1;
            }
        }
        Ok(Perm { images })
    }

    /// Parse concatenated cycles such as `(1,2)(3,4)` or `(234)`.
    ///
    /// Points inside a cycle are separated by commas or whitespace; with
    /// neither present and `k <= 9`, each digit is a point. `e` or the empty
    /// string is the identity.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidShape(
                "permutation degree must be at least 1".into(),
            ));
        }
        let cycles = split_cycles(text, Some(k))?;
        let refs: Vec<&[usize]> = cycles.iter().map(Vec::as_slice).collect();
        Perm::from_cycles(k, &refs)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based point `j`.
    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.images[j - 1] + 1
    }

    #[inline]
    pub(crate) fn apply0(&self, j: usize) -> usize {
        self.images[j]
    }

    /// 1-based image array.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&p| p + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// `self ∘ other`: apply `other`, then `self`.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        check_degrees(self.degree(), other.degree())?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Perm) -> Perm {
        Perm {
            images: other.images.iter().map(|&j| self.images[j]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut images = vec![0; self.degree()];
        for (i, &p) in self.images.iter().enumerate() {
            images[p] = i;
        }
        Perm { images }
    }

    /// `s ∘ self ∘ s⁻¹`.
    pub fn conjugate(&self, s: &Perm) -> Result<Perm> {
        check_degrees(self.degree(), s.degree())?;
        Ok(self.conjugate_unchecked(s))
    }

    pub(crate) fn conjugate_unchecked(&self, s: &Perm) -> Perm {
        // (s a s⁻¹)(s(j)) = s(a(j))
        let mut images = vec![0; self.degree()];
        for j in 0..self.degree() {
            images[s.images[j]] = s.images[self.images[j]];
        }
        Perm { images }
    }

    pub fn is_derangement(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i != p)
    }

    pub fn fixes(&self, j: usize) -> bool {
        self.images[j - 1] == j - 1
    }

    /// `+1` for even permutations, `-1` for odd ones.
    pub fn sign(&self) -> i64 {
        let k = self.degree();
        let mut seen = vec![false; k];
        let mut parity = 0;
        for start in 0..k {
            if seen[start] {
                continue;
            }
            let mut j = start;
            let mut len = 0;
            while !seen[j] {
                seen[j] = true;
                j = self.images[j];
                len += 1;
            }
            parity += len - 1;
        }
        if parity % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Cycles of length at least two, each starting at its smallest point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let k = self.degree();
        let mut seen = vec![false; k];
        let mut out = Vec::new();
        for start in 0..k {
            if seen[start] || self.images[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                cycle.push(j + 1);
                j = self.images[j];
            }
            out.push(cycle);
        }
        out
    }

    /// Remove point `j` (1-based) from its cycle and renumber the points
    /// above it down by one. The predecessor of `j` inherits its image.
    pub fn splice_out(&self, j: usize) -> Perm {
        let j0 = j - 1;
        let renumber = |p: usize| if p > j0 { p - 1 } else { p };
        let images = (0..self.degree())
            .filter(|&x| x != j0)
            .map(|x| {
                let y = self.images[x];
                let y = if y == j0 { self.images[j0] } else { y };
                renumber(y)
            })
            .collect();
        Perm { images }
    }

    /// All permutations of degree `k` in lexicographic order.
    pub fn all(k: usize) -> Vec<Perm> {
        let mut cur: Vec<usize> = (0..k).collect();
        let mut out = vec![Perm {
            images: cur.clone(),
        }];
        while next_permutation(&mut cur) {
            out.push(Perm {
                images: cur.clone(),
            });
        }
        out
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let Some(i) = (0..v.len() - 1).rev().find(|&i| v[i] < v[i + 1]) else {
        return false;
    };
    let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

fn check_degrees(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::DegreeMismatch { left, right });
    }
    Ok(())
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return f.write_str("e");
        }
        for cycle in cycles {
            let pts: Vec<String> = cycle.iter().map(usize::to_string).collect();
            write!(f, "({})", pts.join(","))?;
        }
        Ok(())
    }
}

/// Split cycle notation into point lists without checking them against `k`.
/// `k` only decides whether juxtaposed digits are allowed.
fn split_cycles(text: &str, k: Option<usize>) -> Result<Vec<Vec<usize>>> {
    let text = text.trim();
    if text.is_empty() || text == "e" {
        return Ok(Vec::new());
    }
    let mut cycles = Vec::new();
    let mut rest = text;
    loop {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let Some(body_start) = rest.strip_prefix('(') else {
            return Err(Error::Syntax(format!("expected `(` in `{text}`")));
        };
        let close = body_start
            .find(')')
            .ok_or_else(|| Error::Syntax(format!("unbalanced parentheses in `{text}`")))?;
        let body = &body_start[..close];
        if body.contains('(') {
            return Err(Error::Syntax(format!("unbalanced parentheses in `{text}`")));
        }
        cycles.push(parse_cycle_body(body, k)?);
        rest = &body_start[close + 1..];
    }
    Ok(cycles)
}

fn parse_cycle_body(body: &str, k: Option<usize>) -> Result<Vec<usize>> {
    let body = body.trim();
    if body.is_empty() {
        return Err(Error::MalformedCycle("empty cycle".into()));
    }
    let parse_point = |tok: &str| {
        tok.trim()
            .parse::<usize>()
            .map_err(|_| Error::Syntax(format!("bad point `{}`", tok.trim())))
    };
    if body.contains(',') {
        body.split(',').map(parse_point).collect()
    } else if body.contains(char::is_whitespace) {
        body.split_whitespace().map(parse_point).collect()
    } else if body.len() == 1 || k.is_none_or(|k| k <= 9) {
        body.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .ok_or_else(|| Error::Syntax(format!("bad point `{c}`")))
            })
            .collect()
    } else {
        Err(Error::Syntax(format!(
            "cycle `({body})` needs separators when k > 9"
        )))
    }
}

/// A tuple of `n` permutations of common degree `k`, one per letter.
///
/// Ordering is lexicographic, letter 1 first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PermTuple {
    perms: Vec<Perm>,
}

impl PermTuple {
    pub fn new(perms: Vec<Perm>) -> Result<Self> {
        let first = perms
            .first()
            .ok_or_else(|| Error::InvalidShape("a tuple needs at least one letter".into()))?;
        let k = first.degree();
        if k == 0 {
            return Err(Error::InvalidShape(
                "permutation degree must be at least 1".into(),
            ));
        }
        for p in &perms {
            check_degrees(k, p.degree())?;
        }
        Ok(PermTuple { perms })
    }

    pub fn identity(n: usize, k: usize) -> Self {
        PermTuple {
            perms: vec![Perm::identity(k); n],
        }
    }

    /// The same permutation on every letter.
    pub fn uniform(n: usize, perm: Perm) -> Self {
        PermTuple {
            perms: vec![perm; n],
        }
    }

    /// Parse `;`-separated cycle strings. When `k` is `None` the degree is the
    /// largest point mentioned (at least 1).
    pub fn parse(text: &str, k: Option<usize>) -> Result<Self> {
        let parts: Vec<&str> = text.trim().split(';').collect();
        let k = match k {
            Some(k) => k,
            None => {
                let mut max = 1;
                for part in &parts {
                    for cycle in split_cycles(part, None)? {
                        max = cycle.iter().copied().fold(max, usize::max);
                    }
                }
                max
            }
        };
        let perms = parts
            .iter()
            .map(|p| Perm::parse(p, k))
            .collect::<Result<Vec<_>>>()?;
        PermTuple::new(perms)
    }

    pub fn letters(&self) -> usize {
        self.perms.len()
    }

    pub fn degree(&self) -> usize {
        self.perms[0].degree()
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    /// Permutation on the 1-based `letter`.
    pub fn letter(&self, letter: usize) -> &Perm {
        &self.perms[letter - 1]
    }

    pub fn is_identity(&self) -> bool {
        self.perms.iter().all(Perm::is_identity)
    }

    pub fn is_derangement_only(&self) -> bool {
        self.perms.iter().all(Perm::is_derangement)
    }

    /// Componentwise `self ∘ other`.
    pub fn compose(&self, other: &PermTuple) -> Result<PermTuple> {
        self.check_same_shape(other)?;
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &PermTuple) -> PermTuple {
        PermTuple {
            perms: self
                .perms
                .iter()
                .zip(&other.perms)
                .map(|(a, b)| a.compose_unchecked(b))
                .collect(),
        }
    }

    pub fn inverse(&self) -> PermTuple {
        PermTuple {
            perms: self.perms.iter().map(Perm::inverse).collect(),
        }
    }

    /// Conjugate every letter by the same `s`.
    pub fn conjugate(&self, s: &Perm) -> Result<PermTuple> {
        check_degrees(self.degree(), s.degree())?;
        Ok(self.conjugate_unchecked(s))
    }

    fn conjugate_unchecked(&self, s: &Perm) -> PermTuple {
        PermTuple {
            perms: self
                .perms
                .iter()
                .map(|p| p.conjugate_unchecked(s))
                .collect(),
        }
    }

    /// Least tuple in the simultaneous-conjugation orbit.
    pub fn canonicalize(&self) -> PermTuple {
        self.canonicalize_with_witness().0
    }

    /// Canonical form together with a conjugator `s` mapping `self` to it.
    pub fn canonicalize_with_witness(&self) -> (PermTuple, Perm) {
        let mut best = (self.clone(), Perm::identity(self.degree()));
        for s in Perm::all(self.degree()).into_iter().skip(1) {
            let c = self.conjugate_unchecked(&s);
            if c < best.0 {
                best = (c, s);
            }
        }
        best
    }

    /// Every member of the simultaneous-conjugation orbit, with repeats.
    pub fn conjugates(&self) -> impl Iterator<Item = PermTuple> + '_ {
        Perm::all(self.degree())
            .into_iter()
            .map(move |s| self.conjugate_unchecked(&s))
    }

    /// Reorder letters: letter `i` of the result is letter `order[i]` of `self`
    /// (both 1-based).
    pub fn permute_letters(&self, order: &[usize]) -> Result<PermTuple> {
        if order.len() != self.letters() {
            return Err(Error::ShapeMismatch(format!(
                "letter order of length {} for {} letters",
                order.len(),
                self.letters()
            )));
        }
        let perms = order
            .iter()
            .map(|&l| {
                if l == 0 || l > self.letters() {
                    Err(Error::LetterOutOfRange {
                        letter: l,
                        n: self.letters(),
                    })
                } else {
                    Ok(self.perms[l - 1].clone())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PermTuple { perms })
    }

    /// Replace the permutation on one letter.
    pub fn with_letter(&self, letter: usize, perm: Perm) -> PermTuple {
        let mut perms = self.perms.clone();
        perms[letter - 1] = perm;
        PermTuple { perms }
    }

    /// Splice copy `j` out of every letter, giving a degree `k-1` tuple.
    pub fn splice_out(&self, j: usize) -> PermTuple {
        PermTuple {
            perms: self.perms.iter().map(|p| p.splice_out(j)).collect(),
        }
    }

    /// Letters (1-based) whose permutation fixes copy `j`.
    pub fn letters_fixing(&self, j: usize) -> Vec<usize> {
        (1..=self.letters())
            .filter(|&l| self.perms[l - 1].fixes(j))
            .collect()
    }

    /// All tuples of `n` letters and degree `k`, letter 1 most significant.
    pub fn all(n: usize, k: usize) -> Vec<PermTuple> {
        let perms = Perm::all(k);
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<Perm>| {
                    perms.iter().map(move |p| {
                        let mut v = prefix.clone();
                        v.push(p.clone());
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(|perms| PermTuple { perms }).collect()
    }

    fn check_same_shape(&self, other: &PermTuple) -> Result<()> {
        if self.letters() != other.letters() {
            return Err(Error::ShapeMismatch(format!(
                "{} letters vs {}",
                self.letters(),
                other.letters()
            )));
        }
        check_degrees(self.degree(), other.degree())
    }
}

impl fmt::Display for PermTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.perms.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
