//! Arrow patterns and the pairing `<A, D>`.
//!
//! Text format:
//!
//! ```text
//! pattern     := circles [" ; " constraints] [" ; " mode]
//! circles     := circle (" / " circle)*
//! circle      := "()" | slot (" " slot)*
//! slot        := ("O" | "U") label
//! constraints := label ":" ("+" | "-" | "?") (" " ...)*
//! mode        := "ordered" | "all-injective"
//! ```
//!
//! Labels missing from the constraint list are unconstrained. The default
//! mode is `ordered`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gauss::{parse_end_label, split_components, End, GaussDiagram, GaussError, Sign, Slot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SignConstraint {
    Pos,
    Neg,
    Any,
}

impl SignConstraint {
    pub fn admits(self, s: Sign) -> bool {
        match self {
            SignConstraint::Pos => s == Sign::Pos,
            SignConstraint::Neg => s == Sign::Neg,
            SignConstraint::Any => true,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            SignConstraint::Pos => '+',
            SignConstraint::Neg => '-',
            SignConstraint::Any => '?',
        }
    }
}

impl From<Sign> for SignConstraint {
    fn from(s: Sign) -> Self {
        match s {
            Sign::Pos => SignConstraint::Pos,
            Sign::Neg => SignConstraint::Neg,
        }
    }
}

/// How pattern circles are assigned to diagram components.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AssignmentMode {
    /// Pattern circle `i` goes to component `i`.
    Ordered,
    /// Every injective circle map is summed over.
    AllInjective,
}

impl AssignmentMode {
    pub fn name(self) -> &'static str {
        match self {
            AssignmentMode::Ordered => "ordered",
            AssignmentMode::AllInjective => "all-injective",
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error(transparent)]
    Gauss(#[from] GaussError),
    #[error("bad constraint {0:?}")]
    Constraint(String),
    #[error("constraint for unknown label {0}")]
    UnknownLabel(u32),
    #[error("label {0} constrained twice")]
    DuplicateConstraint(u32),
    #[error("unknown assignment mode {0:?}")]
    Mode(String),
    #[error("a pattern needs at least one circle")]
    NoCircles,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("pattern has {pattern} circles but the diagram has only {diagram} components")]
    TooManyCircles { pattern: usize, diagram: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArrowPattern {
    circles: Vec<Vec<Slot>>,
    constraints: BTreeMap<u32, SignConstraint>,
    mode: AssignmentMode,
}

impl ArrowPattern {
    pub fn new(
        circles: Vec<Vec<Slot>>,
        constraints: BTreeMap<u32, SignConstraint>,
        mode: AssignmentMode,
    ) -> Result<Self, PatternError> {
        if circles.is_empty() {
            return Err(PatternError::NoCircles);
        }
        let signs = constraints.keys().map(|&l| (l, Sign::Pos)).collect();
        let shape = GaussDiagram::new(circles.clone(), signs);
        if let Err(GaussError::LabelCount(l)) = shape {
            if circles.iter().flatten().all(|s| s.label != l) {
                return Err(PatternError::UnknownLabel(l));
            }
        }
        shape?;
        Ok(ArrowPattern { circles, constraints, mode })
    }

    pub fn circles(&self) -> &[Vec<Slot>] {
        &self.circles
    }

    pub fn constraint(&self, label: u32) -> SignConstraint {
        self.constraints[&label]
    }

    pub fn mode(&self) -> AssignmentMode {
        self.mode
    }

    pub fn with_mode(&self, mode: AssignmentMode) -> Self {
        ArrowPattern { mode, ..self.clone() }
    }

    pub fn num_arrows(&self) -> usize {
        self.constraints.len()
    }
}

impl fmt::Display for ArrowPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let circles = self
            .circles
            .iter()
            .map(|c| if c.is_empty() { "()".to_string() } else { c.iter().map(|s| format!("{}{}", s.end.letter(), s.label)).join(" ") })
            .join(" / ");
        f.write_str(&circles)?;
        if !self.constraints.is_empty() {
            let cons = self.constraints.iter().map(|(l, c)| format!("{l}:{}", c.symbol())).join(" ");
            write!(f, " ; {cons}")?;
        }
        if self.mode != AssignmentMode::Ordered {
            write!(f, " ; {}", self.mode.name())?;
        }
        Ok(())
    }
}

impl Serialize for ArrowPattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub fn parse_pattern(text: &str) -> Result<ArrowPattern, PatternError> {
    let mut sections = text.trim().split(" ; ");
    let head = sections.next().unwrap_or_default();
    let mut circles = Vec::new();
    let mut labels = BTreeMap::new();
    for toks in split_components(head)? {
        let mut circle = Vec::with_capacity(toks.len());
        for tok in toks {
            let (end, label) = parse_end_label(tok, tok)?;
            labels.insert(label, ());
            circle.push(Slot { label, end });
        }
        circles.push(circle);
    }
    let mut constraints: BTreeMap<u32, SignConstraint> = BTreeMap::new();
    let mut mode = AssignmentMode::Ordered;
    for section in sections {
        match section {
            "ordered" => mode = AssignmentMode::Ordered,
            "all-injective" => mode = AssignmentMode::AllInjective,
            s if s.contains(':') => {
                for item in s.split(' ') {
                    let (l, c) = item.split_once(':').ok_or_else(|| PatternError::Constraint(item.to_string()))?;
                    let label: u32 = l.parse().map_err(|_| PatternError::Constraint(item.to_string()))?;
                    let c = match c {
                        "+" => SignConstraint::Pos,
                        "-" => SignConstraint::Neg,
                        "?" => SignConstraint::Any,
                        _ => return Err(PatternError::Constraint(item.to_string())),
                    };
                    if !labels.contains_key(&label) {
                        return Err(PatternError::UnknownLabel(label));
                    }
                    if constraints.insert(label, c).is_some() {
                        return Err(PatternError::DuplicateConstraint(label));
                    }
                }
            }
            other => return Err(PatternError::Mode(other.to_string())),
        }
    }
    for &label in labels.keys() {
        constraints.entry(label).or_insert(SignConstraint::Any);
    }
    ArrowPattern::new(circles, constraints, mode)
}

impl FromStr for ArrowPattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pattern(s)
    }
}

/// One embedding of a pattern into a diagram.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Matching {
    /// `circle_map[i]` is the component receiving pattern circle `i`.
    pub circle_map: Vec<usize>,
    /// Pairs (pattern label, diagram label), sorted by pattern label.
    pub arrow_map: Vec<(u32, u32)>,
    pub weight: i64,
}

struct PatternArrow {
    label: u32,
    tail: (usize, usize),
    head: (usize, usize),
    constraint: SignConstraint,
}

#[derive(Clone, Copy)]
struct DiagramArrow {
    label: u32,
    sign: Sign,
    tail: (usize, usize),
    head: (usize, usize),
}

struct Matcher<'a> {
    parrows: Vec<PatternArrow>,
    // per pattern circle: pattern arrow index and end for each slot in order
    circle_slots: Vec<Vec<(usize, End)>>,
    darrows: &'a [DiagramArrow],
}

impl Matcher<'_> {
    fn run(&self, cmap: &[usize], visit: &mut dyn FnMut(&[usize], i64)) {
        let mut chosen = vec![usize::MAX; self.parrows.len()];
        let mut used = vec![false; self.darrows.len()];
        self.extend(0, cmap, &mut chosen, &mut used, 1, visit);
    }

    fn extend(
        &self,
        i: usize,
        cmap: &[usize],
        chosen: &mut [usize],
        used: &mut [bool],
        weight: i64,
        visit: &mut dyn FnMut(&[usize], i64),
    ) {
        if i == self.parrows.len() {
            visit(chosen, weight);
            return;
        }
        let pa = &self.parrows[i];
        for (j, da) in self.darrows.iter().enumerate() {
            if used[j]
                || da.tail.0 != cmap[pa.tail.0]
                || da.head.0 != cmap[pa.head.0]
                || !pa.constraint.admits(da.sign)
            {
                continue;
            }
            chosen[i] = j;
            if self.cyclic_ok(pa.tail.0, chosen) && (pa.head.0 == pa.tail.0 || self.cyclic_ok(pa.head.0, chosen)) {
                used[j] = true;
                self.extend(i + 1, cmap, chosen, used, weight * da.sign.value(), visit);
                used[j] = false;
            }
            chosen[i] = usize::MAX;
        }
    }

    /// Assigned slots of a circle, read in pattern order, must sit in
    /// cyclic order on their component: at most one descent around the loop.
    fn cyclic_ok(&self, circle: usize, chosen: &[usize]) -> bool {
        let mut first = None;
        let mut prev = None;
        let mut descents = 0;
        for &(a, end) in &self.circle_slots[circle] {
            if chosen[a] == usize::MAX {
                continue;
            }
            let da = &self.darrows[chosen[a]];
            let pos = if end == End::Over { da.tail.1 } else { da.head.1 };
            if let Some(p) = prev {
                if pos < p {
                    descents += 1;
                }
            } else {
                first = Some(pos);
            }
            prev = Some(pos);
        }
        if let (Some(f), Some(p)) = (first, prev) {
            if f < p {
                descents += 1;
            }
        }
        descents <= 1
    }
}

fn circle_maps(pattern_circles: usize, components: usize, mode: AssignmentMode) -> Result<Vec<Vec<usize>>, MatchError> {
    if pattern_circles > components {
        return match mode {
            AssignmentMode::Ordered => Err(MatchError::TooManyCircles { pattern: pattern_circles, diagram: components }),
            AssignmentMode::AllInjective => Ok(Vec::new()),
        };
    }
    Ok(match mode {
        AssignmentMode::Ordered => vec![(0..pattern_circles).collect()],
        AssignmentMode::AllInjective => (0..components).permutations(pattern_circles).collect(),
    })
}

/// Receives the circle map, the diagram arrows, the chosen arrow per
/// pattern arrow and the weight.
type MatchVisitor<'a> = dyn FnMut(&[usize], &[DiagramArrow], &[usize], i64) + 'a;

fn for_each_matching(
    a: &ArrowPattern,
    d: &GaussDiagram,
    visit: &mut MatchVisitor,
) -> Result<(), MatchError> {
    let maps = circle_maps(a.circles.len(), d.num_components(), a.mode)?;
    let mut where_: BTreeMap<(u32, End), (usize, usize)> = BTreeMap::new();
    let mut circle_slots = vec![Vec::new(); a.circles.len()];
    for (c, circle) in a.circles.iter().enumerate() {
        for (p, s) in circle.iter().enumerate() {
            where_.insert((s.label, s.end), (c, p));
        }
    }
    let parrows: Vec<PatternArrow> = a
        .constraints
        .iter()
        .map(|(&label, &constraint)| PatternArrow {
            label,
            tail: where_[&(label, End::Over)],
            head: where_[&(label, End::Under)],
            constraint,
        })
        .collect();
    for (c, circle) in a.circles.iter().enumerate() {
        for s in circle {
            let idx = parrows.iter().position(|pa| pa.label == s.label).unwrap();
            circle_slots[c].push((idx, s.end));
        }
    }
    let darrows: Vec<DiagramArrow> = d
        .arrows()
        .into_iter()
        .map(|ar| DiagramArrow {
            label: ar.label,
            sign: ar.sign,
            tail: (ar.tail.component, ar.tail.position),
            head: (ar.head.component, ar.head.position),
        })
        .collect();
    let matcher = Matcher { parrows, circle_slots, darrows: &darrows };
    for cmap in &maps {
        matcher.run(cmap, &mut |chosen, w| visit(cmap, &darrows, chosen, w));
    }
    Ok(())
}

/// Every embedding of `a` into `d`, each exactly once.
pub fn enumerate_matchings(a: &ArrowPattern, d: &GaussDiagram) -> Result<Vec<Matching>, MatchError> {
    let plabels: Vec<u32> = a.constraints.keys().copied().collect();
    let mut out = Vec::new();
    for_each_matching(a, d, &mut |cmap, darrows, chosen, weight| {
        out.push(Matching {
            circle_map: cmap.to_vec(),
            arrow_map: plabels.iter().zip(chosen).map(|(&p, &j)| (p, darrows[j].label)).collect(),
            weight,
        });
    })?;
    Ok(out)
}

/// `<a, d>`: the signed count of embeddings.
pub fn evaluate_bracket(a: &ArrowPattern, d: &GaussDiagram) -> Result<i64, MatchError> {
    let mut total = 0;
    for_each_matching(a, d, &mut |_, _, _, w| total += w)?;
    Ok(total)
}
