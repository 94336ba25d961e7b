//! Multi-component Gauss diagrams.
//!
//! A diagram is an ordered list of oriented circles. Each circle carries a
//! cyclic sequence of endpoint slots, and every crossing is a signed arrow
//! whose tail sits on the over-passing branch and whose head sits on the
//! under-passing branch. No planarity is required.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

/// Which branch of a crossing a slot records. The tail of an arrow is the
/// `Over` occurrence, the head is the `Under` occurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum End {
    Over,
    Under,
}

impl End {
    pub fn letter(self) -> char {
        match self {
            End::Over => 'O',
            End::Under => 'U',
        }
    }

    pub fn other(self) -> End {
        match self {
            End::Over => End::Under,
            End::Under => End::Over,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Slot {
    pub label: u32,
    pub end: End,
}

impl Slot {
    pub fn over(label: u32) -> Slot {
        Slot { label, end: End::Over }
    }

    pub fn under(label: u32) -> Slot {
        Slot { label, end: End::Under }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EndpointRef {
    pub component: usize,
    pub position: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Arrow {
    pub label: u32,
    pub sign: Sign,
    pub tail: EndpointRef,
    pub head: EndpointRef,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GaussError {
    #[error("syntax error in {token:?}: {reason}")]
    Syntax { token: String, reason: &'static str },
    #[error("label {0} must appear exactly twice")]
    LabelCount(u32),
    #[error("label {0} must appear once as O and once as U")]
    DuplicateEnd(u32),
    #[error("label {0} carries two different signs")]
    SignMismatch(u32),
    #[error("a diagram needs at least one component")]
    NoComponents,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussDiagram {
    components: Vec<Vec<Slot>>,
    signs: BTreeMap<u32, Sign>,
}

impl GaussDiagram {
    /// Builds a diagram and checks the slot pairing rules.
    pub fn new(components: Vec<Vec<Slot>>, signs: BTreeMap<u32, Sign>) -> Result<Self, GaussError> {
        let d = GaussDiagram { components, signs };
        d.validate()?;
        Ok(d)
    }

    pub(crate) fn from_parts(components: Vec<Vec<Slot>>, signs: BTreeMap<u32, Sign>) -> Self {
        let d = GaussDiagram { components, signs };
        debug_assert_eq!(d.validate(), Ok(()));
        d
    }

    /// The diagram with `n` empty circles.
    pub fn empty(n: usize) -> Self {
        GaussDiagram { components: vec![Vec::new(); n], signs: BTreeMap::new() }
    }

    pub fn validate(&self) -> Result<(), GaussError> {
        if self.components.is_empty() {
            return Err(GaussError::NoComponents);
        }
        let mut seen: BTreeMap<u32, (usize, usize)> = BTreeMap::new();
        for slot in self.components.iter().flatten() {
            let e = seen.entry(slot.label).or_default();
            match slot.end {
                End::Over => e.0 += 1,
                End::Under => e.1 += 1,
            }
        }
        for (&label, &(o, u)) in &seen {
            if o + u != 2 {
                return Err(GaussError::LabelCount(label));
            }
            if o != 1 {
                return Err(GaussError::DuplicateEnd(label));
            }
            if !self.signs.contains_key(&label) {
                return Err(GaussError::LabelCount(label));
            }
        }
        if let Some(&label) = self.signs.keys().find(|l| !seen.contains_key(l)) {
            return Err(GaussError::LabelCount(label));
        }
        Ok(())
    }

    pub fn components(&self) -> &[Vec<Slot>] {
        &self.components
    }

    pub fn num_components(&self) -> usize {
        self.components.len()
    }

    pub fn num_arrows(&self) -> usize {
        self.signs.len()
    }

    pub fn labels(&self) -> impl Iterator<Item = u32> + '_ {
        self.signs.keys().copied()
    }

    pub fn sign(&self, label: u32) -> Sign {
        self.signs[&label]
    }

    pub fn slot(&self, r: EndpointRef) -> Slot {
        self.components[r.component][r.position]
    }

    /// Tail and head of every arrow, keyed by label.
    pub fn endpoints(&self) -> BTreeMap<u32, (EndpointRef, EndpointRef)> {
        let mut tails = BTreeMap::new();
        let mut heads = BTreeMap::new();
        for (c, comp) in self.components.iter().enumerate() {
            for (p, s) in comp.iter().enumerate() {
                let r = EndpointRef { component: c, position: p };
                match s.end {
                    End::Over => tails.insert(s.label, r),
                    End::Under => heads.insert(s.label, r),
                };
            }
        }
        tails.into_iter().map(|(l, t)| (l, (t, heads[&l]))).collect()
    }

    pub fn arrows(&self) -> Vec<Arrow> {
        self.endpoints()
            .into_iter()
            .map(|(label, (tail, head))| Arrow { label, sign: self.signs[&label], tail, head })
            .collect()
    }

    /// Next slot along the orientation of its circle.
    pub fn succ(&self, r: EndpointRef) -> EndpointRef {
        let n = self.components[r.component].len();
        EndpointRef { component: r.component, position: (r.position + 1) % n }
    }

    pub fn pred(&self, r: EndpointRef) -> EndpointRef {
        let n = self.components[r.component].len();
        EndpointRef { component: r.component, position: (r.position + n - 1) % n }
    }

    /// Number of insertion gaps on a component; an empty circle has one.
    pub fn gap_count(&self, component: usize) -> usize {
        self.components[component].len().max(1)
    }

    pub fn next_label(&self) -> u32 {
        self.signs.keys().next_back().map_or(1, |l| l + 1)
    }

    /// Inserts blocks of slots at gaps. Gap `g` sits before position `g`.
    /// Blocks sharing a gap keep their relative order.
    pub(crate) fn with_insertions(&self, blocks: &[(usize, usize, Vec<Slot>)], new_signs: &[(u32, Sign)]) -> Self {
        let components = self
            .components
            .iter()
            .enumerate()
            .map(|(c, comp)| {
                let at = |g: usize| blocks.iter().filter(move |b| b.0 == c && b.1 == g).flat_map(|b| b.2.iter().copied());
                let mut out = Vec::with_capacity(comp.len() + 4);
                if comp.is_empty() {
                    out.extend(at(0));
                }
                for (p, s) in comp.iter().enumerate() {
                    out.extend(at(p));
                    out.push(*s);
                }
                out
            })
            .collect();
        let mut signs = self.signs.clone();
        signs.extend(new_signs.iter().copied());
        GaussDiagram::from_parts(components, signs)
    }

    pub(crate) fn without_labels(&self, labels: &[u32]) -> Self {
        let components = self
            .components
            .iter()
            .map(|comp| comp.iter().copied().filter(|s| !labels.contains(&s.label)).collect())
            .collect();
        let mut signs = self.signs.clone();
        signs.retain(|l, _| !labels.contains(l));
        GaussDiagram::from_parts(components, signs)
    }

    pub(crate) fn with_swaps(&self, pairs: &[(EndpointRef, EndpointRef)]) -> Self {
        let mut components = self.components.clone();
        for &(a, b) in pairs {
            let sa = components[a.component][a.position];
            let sb = components[b.component][b.position];
            components[a.component][a.position] = sb;
            components[b.component][b.position] = sa;
        }
        GaussDiagram::from_parts(components, self.signs.clone())
    }

    /// Representative of the class under rotation of each circle,
    /// permutation of circles and relabelling of arrows: the candidate with
    /// the lexicographically least code after relabelling in order of first
    /// occurrence.
    pub fn canonical_form(&self) -> GaussDiagram {
        let k = self.components.len();
        let mut best: Option<(String, GaussDiagram)> = None;
        for perm in (0..k).permutations(k) {
            let rotations = perm.iter().map(|&c| 0..self.components[c].len().max(1)).multi_cartesian_product();
            let rotations: Box<dyn Iterator<Item = Vec<usize>>> =
                if k == 0 { Box::new(std::iter::once(Vec::new())) } else { Box::new(rotations) };
            for rot in rotations {
                let cand = self.relabelled(&perm, &rot);
                let code = cand.to_string();
                if best.as_ref().is_none_or(|(b, _)| code < *b) {
                    best = Some((code, cand));
                }
            }
        }
        best.map(|(_, d)| d).unwrap_or_else(|| self.clone())
    }

    fn relabelled(&self, perm: &[usize], rot: &[usize]) -> GaussDiagram {
        let mut map: BTreeMap<u32, u32> = BTreeMap::new();
        let mut components = Vec::with_capacity(perm.len());
        for (&c, &r) in perm.iter().zip(rot) {
            let comp = &self.components[c];
            let n = comp.len();
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                let s = comp[(i + r) % n];
                let next = map.len() as u32 + 1;
                let label = *map.entry(s.label).or_insert(next);
                out.push(Slot { label, end: s.end });
            }
            components.push(out);
        }
        let signs = map.iter().map(|(old, new)| (*new, self.signs[old])).collect();
        GaussDiagram { components, signs }
    }

    pub fn is_isomorphic(&self, other: &GaussDiagram) -> bool {
        self.canonical_form() == other.canonical_form()
    }
}

/// Uniform random diagram from a seeded stream.
pub fn random_diagram(num_components: usize, num_arrows: usize, seed: u64) -> GaussDiagram {
    random_diagram_with(num_components, num_arrows, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_diagram_with<R: Rng>(num_components: usize, num_arrows: usize, rng: &mut R) -> GaussDiagram {
    assert!(num_components >= 1, "a diagram needs at least one component");
    let mut slots: Vec<Slot> = (1..=num_arrows as u32).flat_map(|l| [Slot::over(l), Slot::under(l)]).collect();
    slots.shuffle(rng);
    let mut components = vec![Vec::new(); num_components];
    for s in slots {
        components[rng.gen_range(0..num_components)].push(s);
    }
    let signs = (1..=num_arrows as u32).map(|l| (l, if rng.gen_bool(0.5) { Sign::Pos } else { Sign::Neg })).collect();
    GaussDiagram::from_parts(components, signs)
}

impl fmt::Display for GaussDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, comp) in self.components.iter().enumerate() {
            if i > 0 {
                f.write_str(" / ")?;
            }
            if comp.is_empty() {
                f.write_str("()")?;
            }
            for (j, s) in comp.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{}{}{}", s.end.letter(), s.label, self.signs[&s.label].symbol())?;
            }
        }
        Ok(())
    }
}

impl Serialize for GaussDiagram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Splits `"O12"` style text into its end letter and label.
pub(crate) fn parse_end_label(tok: &str, whole: &str) -> Result<(End, u32), GaussError> {
    let syntax = |reason| GaussError::Syntax { token: whole.to_string(), reason };
    let mut chars = tok.chars();
    let end = match chars.next() {
        Some('O') => End::Over,
        Some('U') => End::Under,
        _ => return Err(syntax("expected O or U")),
    };
    let digits = chars.as_str();
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax("expected a decimal label"));
    }
    if digits.starts_with('0') {
        return Err(syntax("labels are positive and have no leading zeros"));
    }
    let label = digits.parse().map_err(|_| syntax("label out of range"))?;
    Ok((end, label))
}

/// Splits a component list on `" / "`, mapping `()` to an empty token list.
pub(crate) fn split_components(text: &str) -> Result<Vec<Vec<&str>>, GaussError> {
    text.split(" / ")
        .map(|part| {
            if part == "()" {
                return Ok(Vec::new());
            }
            let toks: Vec<&str> = part.split(' ').collect();
            if toks.iter().any(|t| t.is_empty()) {
                return Err(GaussError::Syntax { token: part.to_string(), reason: "tokens are separated by single spaces" });
            }
            Ok(toks)
        })
        .collect()
}

pub fn parse_gauss_code(text: &str) -> Result<GaussDiagram, GaussError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(GaussError::Syntax { token: String::new(), reason: "empty input" });
    }
    let mut components = Vec::new();
    let mut signs: BTreeMap<u32, Sign> = BTreeMap::new();
    for toks in split_components(text)? {
        let mut comp = Vec::with_capacity(toks.len());
        for tok in toks {
            let sign = match tok.chars().last() {
                Some('+') => Sign::Pos,
                Some('-') => Sign::Neg,
                _ => return Err(GaussError::Syntax { token: tok.to_string(), reason: "expected a trailing + or -" }),
            };
            let (end, label) = parse_end_label(&tok[..tok.len() - 1], tok)?;
            if let Some(&prev) = signs.get(&label) {
                if prev != sign {
                    return Err(GaussError::SignMismatch(label));
                }
            }
            signs.insert(label, sign);
            comp.push(Slot { label, end });
        }
        components.push(comp);
    }
    GaussDiagram::new(components, signs)
}

impl FromStr for GaussDiagram {
    type Err = GaussError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_gauss_code(s)
    }
}
