//! Oriented Reidemeister moves on Gauss diagrams.
//!
//! Variant conventions (Gauss-diagram form):
//!
//! * Ω1 kink data is (sign, which end comes first along the circle):
//!   a = (+, O first), b = (+, U first), c = (-, O first), d = (-, U first).
//! * Ω2 bigon data is (parallel strands?, sign of the first crossing met
//!   along the over strand); the two arrows have opposite signs:
//!   a = (parallel, +), b = (parallel, -), c = (antiparallel, +),
//!   d = (antiparallel, -).
//! * Ω3 triangles are arrows x: T→M, y: T→B, z: M→B between a top, middle
//!   and bottom strand. The variant is the sign triple (x, y, z):
//!   a = +-+, b = +++, c = +--, d = -++, e = ++-, f = -+-, g = ---, h = --+.
//!   The move swaps the adjacent pair on every strand, so each variant has
//!   two configurations: its left-hand side and the reversed one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gauss::{End, EndpointRef, GaussDiagram, Sign, Slot};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    O1,
    O2,
    O3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Direction {
    Increasing,
    Decreasing,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoveKind {
    family: Family,
    variant: char,
    direction: Option<Direction>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("unknown move kind {0:?}")]
    UnknownKind(String),
    #[error("site {site} does not satisfy the precondition of {kind}")]
    InvalidSite { kind: MoveKind, site: MoveSite },
    #[error("{0} has no decomposition")]
    NoDecomposition(MoveKind),
}

impl MoveKind {
    pub fn omega1(variant: char, direction: Direction) -> Self {
        assert!(('a'..='d').contains(&variant));
        MoveKind { family: Family::O1, variant, direction: Some(direction) }
    }

    pub fn omega2(variant: char, direction: Direction) -> Self {
        assert!(('a'..='d').contains(&variant));
        MoveKind { family: Family::O2, variant, direction: Some(direction) }
    }

    pub fn omega3(variant: char) -> Self {
        assert!(('a'..='h').contains(&variant));
        MoveKind { family: Family::O3, variant, direction: None }
    }

    pub fn family(self) -> Family {
        self.family
    }

    pub fn variant(self) -> char {
        self.variant
    }

    pub fn direction(self) -> Option<Direction> {
        self.direction
    }

    pub fn is_increasing(self) -> bool {
        self.direction == Some(Direction::Increasing)
    }

    /// Change in crossing number.
    pub fn delta(self) -> isize {
        let step = match self.family {
            Family::O1 => 1,
            Family::O2 => 2,
            Family::O3 => 0,
        };
        match self.direction {
            Some(Direction::Decreasing) => -step,
            _ => step,
        }
    }

    /// All 24 kinds: both directions of the eight Ω1/Ω2 variants and the
    /// eight Ω3 variants.
    pub fn all() -> Vec<MoveKind> {
        let mut out = Vec::with_capacity(24);
        for dir in [Direction::Increasing, Direction::Decreasing] {
            out.extend(('a'..='d').map(|v| MoveKind::omega1(v, dir)));
        }
        for dir in [Direction::Increasing, Direction::Decreasing] {
            out.extend(('a'..='d').map(|v| MoveKind::omega2(v, dir)));
        }
        out.extend(('a'..='h').map(MoveKind::omega3));
        out
    }

    /// Parses a comma-separated list; `O1*`, `O2*`, `O3*` and `*` expand to
    /// whole families.
    pub fn parse_list(text: &str) -> Result<Vec<MoveKind>, MoveError> {
        let mut out = Vec::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let family = match item {
                "*" => None,
                "O1*" => Some(Family::O1),
                "O2*" => Some(Family::O2),
                "O3*" => Some(Family::O3),
                _ => {
                    out.push(item.parse()?);
                    continue;
                }
            };
            out.extend(MoveKind::all().into_iter().filter(|k| family.is_none_or(|f| k.family == f)));
        }
        let mut seen = BTreeSet::new();
        out.retain(|k| seen.insert(*k));
        Ok(out)
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self.family {
            Family::O1 => 1,
            Family::O2 => 2,
            Family::O3 => 3,
        };
        write!(f, "O{n}{}", self.variant)?;
        match self.direction {
            Some(Direction::Increasing) => f.write_str("+"),
            Some(Direction::Decreasing) => f.write_str("-"),
            None => Ok(()),
        }
    }
}

impl FromStr for MoveKind {
    type Err = MoveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MoveError::UnknownKind(s.to_string());
        let rest = s.strip_prefix('O').ok_or_else(bad)?;
        let mut chars = rest.chars();
        let fam = chars.next().ok_or_else(bad)?;
        let variant = chars.next().ok_or_else(bad)?;
        let dir = match chars.as_str() {
            "" => None,
            "+" => Some(Direction::Increasing),
            "-" | "\u{2212}" => Some(Direction::Decreasing),
            _ => return Err(bad()),
        };
        match (fam, dir) {
            ('1', Some(d)) if ('a'..='d').contains(&variant) => Ok(MoveKind::omega1(variant, d)),
            ('2', Some(d)) if ('a'..='d').contains(&variant) => Ok(MoveKind::omega2(variant, d)),
            ('3', None) if ('a'..='h').contains(&variant) => Ok(MoveKind::omega3(variant)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for MoveKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// (sign, O end first) of an Ω1 variant.
pub fn omega1_data(variant: char) -> (Sign, bool) {
    match variant {
        'a' => (Sign::Pos, true),
        'b' => (Sign::Pos, false),
        'c' => (Sign::Neg, true),
        'd' => (Sign::Neg, false),
        _ => panic!("no Ω1 variant {variant}"),
    }
}

/// (parallel, first sign along the over strand) of an Ω2 variant.
pub fn omega2_data(variant: char) -> (bool, Sign) {
    match variant {
        'a' => (true, Sign::Pos),
        'b' => (true, Sign::Neg),
        'c' => (false, Sign::Pos),
        'd' => (false, Sign::Neg),
        _ => panic!("no Ω2 variant {variant}"),
    }
}

pub fn omega2_variant(parallel: bool, first: Sign) -> char {
    match (parallel, first) {
        (true, Sign::Pos) => 'a',
        (true, Sign::Neg) => 'b',
        (false, Sign::Pos) => 'c',
        (false, Sign::Neg) => 'd',
    }
}

const OMEGA3: [(char, [Sign; 3], [bool; 3]); 8] = {
    use Sign::{Neg as N, Pos as P};
    [
        ('a', [P, N, P], [true, false, true]),
        ('b', [P, P, P], [true, true, true]),
        ('c', [P, N, N], [false, false, true]),
        ('d', [N, P, P], [true, true, false]),
        ('e', [P, P, N], [true, false, false]),
        ('f', [N, P, N], [true, false, true]),
        ('g', [N, N, N], [false, false, false]),
        ('h', [N, N, P], [false, true, true]),
    ]
};

/// Sign triple (x, y, z) of an Ω3 variant.
pub fn omega3_signs(variant: char) -> [Sign; 3] {
    OMEGA3.iter().find(|e| e.0 == variant).unwrap_or_else(|| panic!("no Ω3 variant {variant}")).1
}

/// Strand orders of the left-hand side: whether x precedes y on T, x
/// precedes z on M, y precedes z on B.
pub fn omega3_lhs_orders(variant: char) -> [bool; 3] {
    OMEGA3.iter().find(|e| e.0 == variant).unwrap_or_else(|| panic!("no Ω3 variant {variant}")).2
}

pub fn omega3_variant(signs: [Sign; 3]) -> char {
    OMEGA3.iter().find(|e| e.1 == signs).map(|e| e.0).expect("every sign triple names a variant")
}

/// Whether (orders, signs) describes a triangle that occurs in some
/// diagram. Each sign triple admits exactly two mutually reversed orders.
pub fn omega3_type_valid(orders: [bool; 3], signs: [Sign; 3]) -> bool {
    let lhs = omega3_lhs_orders(omega3_variant(signs));
    orders == lhs || orders == lhs.map(|o| !o)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MoveSite {
    /// Increasing Ω1: a gap.
    Kink { component: usize, gap: usize },
    /// Increasing Ω2: a gap for the over strand and one for the under strand.
    /// `over_first` orders the two blocks when both gaps coincide.
    Bigon { over: (usize, usize), under: (usize, usize), over_first: bool },
    /// Decreasing Ω1: the arrow of the kink.
    Loop { label: u32 },
    /// Decreasing Ω2: `first` precedes `second` along the over strand.
    Pair { first: u32, second: u32 },
    /// Ω3: x: T→M, y: T→B, z: M→B.
    Triangle { x: u32, y: u32, z: u32 },
}

impl fmt::Display for MoveSite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MoveSite::Kink { component, gap } => write!(f, "gap {component}:{gap}"),
            MoveSite::Bigon { over, under, over_first } => {
                write!(f, "over {}:{} under {}:{}", over.0, over.1, under.0, under.1)?;
                if over == under {
                    f.write_str(if over_first { " over-first" } else { " under-first" })?;
                }
                Ok(())
            }
            MoveSite::Loop { label } => write!(f, "arrow {label}"),
            MoveSite::Pair { first, second } => write!(f, "arrows {first},{second}"),
            MoveSite::Triangle { x, y, z } => write!(f, "arrows {x},{y},{z}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Locality {
    SingleComponent,
    TwoComponent,
}

impl fmt::Display for Locality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Locality::SingleComponent => "single-component",
            Locality::TwoComponent => "two-component",
        })
    }
}

fn adjacent(d: &GaussDiagram, a: EndpointRef, b: EndpointRef) -> bool {
    d.succ(a) == b || d.succ(b) == a
}

/// Ω3 strands must be proper arcs: a circle holding nothing but the pair
/// has no well-defined order between the two.
fn strand_ok(d: &GaussDiagram, a: EndpointRef, b: EndpointRef) -> bool {
    a.component == b.component && d.components()[a.component].len() >= 3 && adjacent(d, a, b)
}

struct Triangle {
    ends: [(EndpointRef, EndpointRef); 3],
    signs: [Sign; 3],
    orders: [bool; 3],
}

type Ends = BTreeMap<u32, (EndpointRef, EndpointRef)>;

fn triangle(d: &GaussDiagram, x: u32, y: u32, z: u32) -> Option<Triangle> {
    triangle_in(d, &d.endpoints(), x, y, z)
}

fn triangle_in(d: &GaussDiagram, ep: &Ends, x: u32, y: u32, z: u32) -> Option<Triangle> {
    if x == y || y == z || x == z {
        return None;
    }
    let (&(xo, xu), &(yo, yu), &(zo, zu)) = (ep.get(&x)?, ep.get(&y)?, ep.get(&z)?);
    if !(strand_ok(d, xo, yo) && strand_ok(d, xu, zo) && strand_ok(d, yu, zu)) {
        return None;
    }
    Some(Triangle {
        ends: [(xo, yo), (xu, zo), (yu, zu)],
        signs: [d.sign(x), d.sign(y), d.sign(z)],
        orders: [d.succ(xo) == yo, d.succ(xu) == zo, d.succ(yu) == zu],
    })
}

fn pair_data(d: &GaussDiagram, first: u32, second: u32) -> Option<(bool, bool, Sign)> {
    let ep = d.endpoints();
    let (&(po, pu), &(qo, qu)) = (ep.get(&first)?, ep.get(&second)?);
    if first == second || d.succ(po) != qo || d.sign(first) == d.sign(second) {
        return None;
    }
    Some((d.succ(pu) == qu, d.succ(qu) == pu, d.sign(first)))
}

fn omega3_applies(d: &GaussDiagram, ep: &Ends, variant: char, x: u32, y: u32, z: u32) -> bool {
    triangle_in(d, ep, x, y, z)
        .is_some_and(|t| t.signs == omega3_signs(variant) && omega3_type_valid(t.orders, t.signs))
}

/// Checks the precondition of `kind` at `site`.
pub fn site_applies(d: &GaussDiagram, kind: MoveKind, site: MoveSite) -> bool {
    match (kind.family, kind.direction, site) {
        (Family::O1, Some(Direction::Increasing), MoveSite::Kink { component, gap }) => {
            component < d.num_components() && gap < d.gap_count(component)
        }
        (Family::O2, Some(Direction::Increasing), MoveSite::Bigon { over, under, over_first }) => {
            let ok = |(c, g): (usize, usize)| c < d.num_components() && g < d.gap_count(c);
            ok(over) && ok(under) && (over_first || over == under)
        }
        (Family::O1, Some(Direction::Decreasing), MoveSite::Loop { label }) => {
            let Some(&(t, h)) = d.endpoints().get(&label) else { return false };
            let (sign, o_first) = omega1_data(kind.variant);
            d.sign(label) == sign && t.component == h.component && if o_first { d.succ(t) == h } else { d.succ(h) == t }
        }
        (Family::O2, Some(Direction::Decreasing), MoveSite::Pair { first, second }) => {
            let (parallel, sign) = omega2_data(kind.variant);
            pair_data(d, first, second)
                .is_some_and(|(par, anti, s)| s == sign && if parallel { par } else { anti })
        }
        (Family::O3, None, MoveSite::Triangle { x, y, z }) => omega3_applies(d, &d.endpoints(), kind.variant, x, y, z),
        _ => false,
    }
}

/// All sites of `kind` in `d`, in a deterministic order.
pub fn enumerate_sites(d: &GaussDiagram, kind: MoveKind) -> Vec<MoveSite> {
    let mut out = Vec::new();
    let gaps: Vec<(usize, usize)> =
        (0..d.num_components()).flat_map(|c| (0..d.gap_count(c)).map(move |g| (c, g))).collect();
    match (kind.family, kind.direction) {
        (Family::O1, Some(Direction::Increasing)) => {
            out.extend(gaps.iter().map(|&(component, gap)| MoveSite::Kink { component, gap }));
        }
        (Family::O2, Some(Direction::Increasing)) => {
            for &over in &gaps {
                for &under in &gaps {
                    out.push(MoveSite::Bigon { over, under, over_first: true });
                    if over == under {
                        out.push(MoveSite::Bigon { over, under, over_first: false });
                    }
                }
            }
        }
        (Family::O1, Some(Direction::Decreasing)) => {
            out.extend(d.labels().map(|label| MoveSite::Loop { label }).filter(|&s| site_applies(d, kind, s)));
        }
        (Family::O2, Some(Direction::Decreasing)) => {
            for (first, (t, _)) in d.endpoints() {
                let next = d.slot(d.succ(t));
                if next.end == End::Over {
                    let site = MoveSite::Pair { first, second: next.label };
                    if site_applies(d, kind, site) {
                        out.push(site);
                    }
                }
            }
        }
        (Family::O3, None) => {
            let ep = d.endpoints();
            for (&x, &(xo, xu)) in &ep {
                let ys: BTreeSet<u32> = [d.succ(xo), d.pred(xo)]
                    .into_iter()
                    .map(|r| d.slot(r))
                    .filter(|s| s.end == End::Over)
                    .map(|s| s.label)
                    .collect();
                let zs: BTreeSet<u32> = [d.succ(xu), d.pred(xu)]
                    .into_iter()
                    .map(|r| d.slot(r))
                    .filter(|s| s.end == End::Over)
                    .map(|s| s.label)
                    .collect();
                for &y in &ys {
                    for &z in &zs {
                        if omega3_applies(d, &ep, kind.variant, x, y, z) {
                            out.push(MoveSite::Triangle { x, y, z });
                        }
                    }
                }
            }
        }
        _ => unreachable!("kinds are constructed with matching directions"),
    }
    out
}

pub fn apply_move(d: &GaussDiagram, kind: MoveKind, site: MoveSite) -> Result<GaussDiagram, MoveError> {
    if !site_applies(d, kind, site) {
        return Err(MoveError::InvalidSite { kind, site });
    }
    Ok(match site {
        MoveSite::Kink { component, gap } => {
            let (sign, o_first) = omega1_data(kind.variant);
            let l = d.next_label();
            let block = if o_first { vec![Slot::over(l), Slot::under(l)] } else { vec![Slot::under(l), Slot::over(l)] };
            d.with_insertions(&[(component, gap, block)], &[(l, sign)])
        }
        MoveSite::Bigon { over, under, over_first } => {
            let (parallel, first) = omega2_data(kind.variant);
            let p = d.next_label();
            let q = p + 1;
            let over_block = vec![Slot::over(p), Slot::over(q)];
            let under_block = if parallel { vec![Slot::under(p), Slot::under(q)] } else { vec![Slot::under(q), Slot::under(p)] };
            let mut blocks = vec![(over.0, over.1, over_block), (under.0, under.1, under_block)];
            if !over_first {
                blocks.reverse();
            }
            d.with_insertions(&blocks, &[(p, first), (q, first.flip())])
        }
        MoveSite::Loop { label } => d.without_labels(&[label]),
        MoveSite::Pair { first, second } => d.without_labels(&[first, second]),
        MoveSite::Triangle { x, y, z } => {
            let t = triangle(d, x, y, z).expect("checked above");
            d.with_swaps(&t.ends)
        }
    })
}

/// Components touched by a site of `d`.
pub fn site_components(d: &GaussDiagram, site: MoveSite) -> BTreeSet<usize> {
    let ends = |label: u32| d.endpoints()[&label];
    match site {
        MoveSite::Kink { component, .. } => [component].into(),
        MoveSite::Bigon { over, under, .. } => [over.0, under.0].into(),
        MoveSite::Loop { label } => [ends(label).0.component].into(),
        MoveSite::Pair { first, .. } => {
            let (t, h) = ends(first);
            [t.component, h.component].into()
        }
        MoveSite::Triangle { x, y, .. } => {
            let ep = d.endpoints();
            [ep[&x].0.component, ep[&x].1.component, ep[&y].1.component].into()
        }
    }
}

pub fn classify_locality(d: &GaussDiagram, site: MoveSite) -> Locality {
    if site_components(d, site).len() == 1 {
        Locality::SingleComponent
    } else {
        Locality::TwoComponent
    }
}

/// A site in `after = apply_move(before, kind, site)` whose application
/// undoes the move.
pub fn inverse_site(before: &GaussDiagram, kind: MoveKind, site: MoveSite) -> Option<(MoveKind, MoveSite)> {
    let flip = |dir| match dir {
        Direction::Increasing => Direction::Decreasing,
        Direction::Decreasing => Direction::Increasing,
    };
    let ep = before.endpoints();
    match site {
        MoveSite::Kink { .. } => {
            Some((MoveKind::omega1(kind.variant, Direction::Decreasing), MoveSite::Loop { label: before.next_label() }))
        }
        MoveSite::Bigon { .. } => {
            let p = before.next_label();
            Some((MoveKind::omega2(kind.variant, Direction::Decreasing), MoveSite::Pair { first: p, second: p + 1 }))
        }
        MoveSite::Loop { label } => {
            let (t, h) = ep[&label];
            let (_, o_first) = omega1_data(kind.variant);
            let first = if o_first { t } else { h };
            let gap = removed_gap(before, first, &[label]);
            Some((MoveKind::omega1(kind.variant, flip(Direction::Decreasing)), MoveSite::Kink { component: first.component, gap }))
        }
        MoveSite::Pair { first, second } => {
            let (po, pu) = ep[&first];
            let (_, qu) = ep[&second];
            let removed = [first, second];
            let under_start = if before.succ(pu) == qu { pu } else { qu };
            let over = (po.component, removed_gap(before, po, &removed));
            let under = (under_start.component, removed_gap(before, under_start, &removed));
            let over_first = over != under || before.succ(before.succ(po)) == under_start;
            Some((MoveKind::omega2(kind.variant, Direction::Increasing), MoveSite::Bigon { over, under, over_first }))
        }
        MoveSite::Triangle { .. } => Some((kind, site)),
    }
}

/// Gap index, after deleting `removed`, at which the block starting at
/// `start` used to sit.
fn removed_gap(d: &GaussDiagram, start: EndpointRef, removed: &[u32]) -> usize {
    let comp = &d.components()[start.component];
    let kept_before = comp[..start.position].iter().filter(|s| !removed.contains(&s.label)).count();
    let kept_total = comp.iter().filter(|s| !removed.contains(&s.label)).count();
    if kept_total == 0 {
        0
    } else {
        kept_before % kept_total
    }
}

/// One row of the decomposition table: increasing Ω2, Ω3, decreasing Ω2.
pub fn decompose_omega3(variant: char) -> Result<(MoveKind, MoveKind, MoveKind), MoveError> {
    let (inc, mid, dec) = match variant {
        'b' | 'c' => ('c', 'a', 'd'),
        'd' | 'e' => ('a', 'b', 'b'),
        'f' => ('d', 'a', 'c'),
        'g' => ('c', 'f', 'd'),
        'h' => ('a', 'g', 'b'),
        _ => return Err(MoveError::NoDecomposition(MoveKind::omega3(variant))),
    };
    Ok((
        MoveKind::omega2(inc, Direction::Increasing),
        MoveKind::omega3(mid),
        MoveKind::omega2(dec, Direction::Decreasing),
    ))
}

/// Recursively expands the middle move until only Ω3a remains.
pub fn expand_to_omega3a(variant: char) -> Vec<MoveKind> {
    match decompose_omega3(variant) {
        Err(_) => vec![MoveKind::omega3(variant)],
        Ok((inc, mid, dec)) => {
            let mut out = vec![inc];
            out.extend(expand_to_omega3a(mid.variant));
            out.push(dec);
            out
        }
    }
}

/// One executed step of a decomposition.
#[derive(Clone, Debug, Serialize)]
pub struct Step {
    pub kind: MoveKind,
    pub site: MoveSite,
    pub locality: Locality,
    pub result: GaussDiagram,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionTrace {
    pub forward: bool,
    pub steps: [Step; 3],
}

#[derive(Debug, Error, Clone, PartialEq, Eq, Serialize)]
pub enum DecompositionError {
    #[error("{0} is not a site of the variant")]
    NotASite(String),
    #[error("the middle move {mid} differs from {variant} in {flips} signs, not one")]
    NotOneFlip { variant: String, mid: String, flips: usize },
    #[error("step {step} is {found}, the table prescribes {expected}")]
    WrongKind { step: usize, expected: String, found: String },
    #[error("the sequence ends at {sequence}, the direct move at {direct}")]
    Mismatch { direct: String, sequence: String },
}

/// Realizes the table row of `variant` at `site` as three concrete moves.
///
/// The crossing C whose sign differs between `variant` and the middle move
/// is pushed through: a bigon P, Q is opened between C's strands just past
/// the other two triangle crossings A (on C's over strand) and B (on C's
/// under strand), with sign(P) = -sign(C). The triangle (A, B, P) is moved,
/// after which P and C form a removable bigon and Q sits where C would.
/// On the reversed configuration the table row is read backwards.
pub fn realize_decomposition(d: &GaussDiagram, variant: char, site: MoveSite) -> Result<DecompositionTrace, DecompositionError> {
    let kind = MoveKind::omega3(variant);
    let MoveSite::Triangle { x, y, z } = site else {
        return Err(DecompositionError::NotASite(site.to_string()));
    };
    if !site_applies(d, kind, site) {
        return Err(DecompositionError::NotASite(site.to_string()));
    }
    let (inc, mid, dec) = decompose_omega3(variant).map_err(|_| DecompositionError::NotASite(site.to_string()))?;
    let t = triangle(d, x, y, z).expect("site checked");
    let forward = t.orders == omega3_lhs_orders(variant);
    let (want_inc, want_dec) = if forward {
        (inc, dec)
    } else {
        (MoveKind::omega2(dec.variant, Direction::Increasing), MoveKind::omega2(inc.variant, Direction::Decreasing))
    };

    let mid_signs = omega3_signs(mid.variant);
    let flipped: Vec<usize> = (0..3).filter(|&i| t.signs[i] != mid_signs[i]).collect();
    if flipped.len() != 1 {
        return Err(DecompositionError::NotOneFlip { variant: kind.to_string(), mid: mid.to_string(), flips: flipped.len() });
    }
    let labels = [x, y, z];
    let [(xo, yo), (xu, zo), (yu, zu)] = t.ends;
    // C, then C's over and under endpoints, A's endpoint on C's over strand
    // and B's endpoint on C's under strand.
    let (c, c_over, c_under, a_on_x, b_on_z) = match flipped[0] {
        0 => (x, xo, xu, yo, zo),
        1 => (y, yo, yu, xo, zu),
        _ => (z, zo, zu, xu, yu),
    };

    // P goes on the far side of A along X and of B along Z.
    let after_a = d.succ(c_over) == a_on_x;
    let after_b = d.succ(c_under) == b_on_z;
    let gap_after = |r: EndpointRef| (r.position + 1) % d.components()[r.component].len();
    let over_gap = (a_on_x.component, if after_a { gap_after(a_on_x) } else { a_on_x.position });
    let under_gap = (b_on_z.component, if after_b { gap_after(b_on_z) } else { b_on_z.position });
    let over_first = over_gap != under_gap || after_a;
    let parallel = after_a == after_b;
    let sign_c = d.sign(c);
    let first_sign = if after_a { sign_c.flip() } else { sign_c };
    let inc_kind = MoveKind::omega2(omega2_variant(parallel, first_sign), Direction::Increasing);
    let inc_site = MoveSite::Bigon { over: over_gap, under: under_gap, over_first };
    let p_new = d.next_label();
    let big_p = if after_a { p_new } else { p_new + 1 };
    let d1 = apply_move(d, inc_kind, inc_site).expect("gaps are in range");

    let mid_labels = labels.map(|l| if l == c { big_p } else { l });
    let mid_site = MoveSite::Triangle { x: mid_labels[0], y: mid_labels[1], z: mid_labels[2] };
    if !site_applies(&d1, mid, mid_site) {
        return Err(DecompositionError::NotASite(format!("{mid} at {mid_site}")));
    }
    let d2 = apply_move(&d1, mid, mid_site).expect("checked");

    let ep2 = d2.endpoints();
    let (first, second) = if d2.succ(ep2[&big_p].0) == ep2[&c].0 { (big_p, c) } else { (c, big_p) };
    let dec_site = MoveSite::Pair { first, second };
    let dec_kind = ('a'..='d')
        .map(|v| MoveKind::omega2(v, Direction::Decreasing))
        .find(|&k| site_applies(&d2, k, dec_site))
        .ok_or_else(|| DecompositionError::NotASite(format!("bigon {dec_site}")))?;
    let d3 = apply_move(&d2, dec_kind, dec_site).expect("checked");

    if inc_kind != want_inc {
        return Err(DecompositionError::WrongKind { step: 1, expected: want_inc.to_string(), found: inc_kind.to_string() });
    }
    if dec_kind != want_dec {
        return Err(DecompositionError::WrongKind { step: 3, expected: want_dec.to_string(), found: dec_kind.to_string() });
    }
    let direct = apply_move(d, kind, site).expect("checked");
    if direct.canonical_form() != d3.canonical_form() {
        return Err(DecompositionError::Mismatch { direct: direct.to_string(), sequence: d3.to_string() });
    }
    Ok(DecompositionTrace {
        forward,
        steps: [
            Step { kind: inc_kind, site: inc_site, locality: classify_locality(d, inc_site), result: d1 },
            Step { kind: mid, site: mid_site, locality: classify_locality(&d2, mid_site), result: d2.clone() },
            Step { kind: dec_kind, site: dec_site, locality: classify_locality(&d2, dec_site), result: d3 },
        ],
    })
}
