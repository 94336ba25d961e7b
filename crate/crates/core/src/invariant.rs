//! The pattern `fonep`, the invariant λ(D) = <fonep, D>, the example
//! diagrams, and the configuration search that pins the pattern down.
//!
//! The default pattern has one positive self-arrow on circle 0 and two
//! unconstrained arrows running from circle 0 to circle 1, one leaving from
//! each arc cut out by the self-arrow:
//!
//! ```text
//! O1 O2 U1 O3 / U2 U3 ; 1:+ 2:? 3:?
//! ```

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::gauss::{parse_gauss_code, End, GaussDiagram, Sign, Slot};
use crate::moves::{apply_move, Direction, MoveKind, MoveSite};
use crate::pattern::{evaluate_bracket, ArrowPattern, AssignmentMode, MatchError, SignConstraint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SelfDirection {
    /// The tail of the self-arrow opens circle 0.
    Forward,
    Backward,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum InterDirection {
    /// Tail on circle 0, head on circle 1.
    Outgoing,
    Incoming,
}

/// Arcs of circle 0 cut by the self-arrow, in circle order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Arc {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct InterArrow {
    pub direction: InterDirection,
    pub arc: Arc,
    pub constraint: SignConstraint,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FonepConfig {
    pub self_direction: SelfDirection,
    pub self_sign: Sign,
    pub inter: Vec<InterArrow>,
    pub mode: AssignmentMode,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("the self-arrow has no endpoint between its endpoints")]
    IsolatedSelfArrow,
}

impl FonepConfig {
    pub fn fonep() -> Self {
        let out = |arc| InterArrow { direction: InterDirection::Outgoing, arc, constraint: SignConstraint::Any };
        FonepConfig {
            self_direction: SelfDirection::Forward,
            self_sign: Sign::Pos,
            inter: vec![out(Arc::First), out(Arc::Second)],
            mode: AssignmentMode::Ordered,
        }
    }

    pub fn fonem() -> Self {
        FonepConfig { self_sign: Sign::Neg, ..FonepConfig::fonep() }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.inter.iter().any(|a| a.arc == Arc::First) {
            Ok(())
        } else {
            Err(ConfigError::IsolatedSelfArrow)
        }
    }

    /// The pattern, without the isolation check.
    pub fn pattern(&self) -> ArrowPattern {
        let (first, second) = match self.self_direction {
            SelfDirection::Forward => (End::Over, End::Under),
            SelfDirection::Backward => (End::Under, End::Over),
        };
        let mut circle0 = vec![Slot { label: 1, end: first }];
        let mut circle1 = Vec::new();
        let mut constraints = BTreeMap::from([(1, SignConstraint::from(self.self_sign))]);
        for arc in [Arc::First, Arc::Second] {
            if arc == Arc::Second {
                circle0.push(Slot { label: 1, end: second });
            }
            for (i, a) in self.inter.iter().enumerate().filter(|(_, a)| a.arc == arc) {
                let label = i as u32 + 2;
                let end = match a.direction {
                    InterDirection::Outgoing => End::Over,
                    InterDirection::Incoming => End::Under,
                };
                circle0.push(Slot { label, end });
            }
        }
        for (i, a) in self.inter.iter().enumerate() {
            let label = i as u32 + 2;
            let end = match a.direction {
                InterDirection::Outgoing => End::Under,
                InterDirection::Incoming => End::Over,
            };
            circle1.push(Slot { label, end });
            constraints.insert(label, a.constraint);
        }
        ArrowPattern::new(vec![circle0, circle1], constraints, self.mode).expect("configs always give valid patterns")
    }

    /// Every configuration with at most `max_arrows` arrows in total.
    pub fn candidates(max_arrows: usize) -> Vec<FonepConfig> {
        let mut inter_choices = Vec::new();
        for direction in [InterDirection::Outgoing, InterDirection::Incoming] {
            for arc in [Arc::First, Arc::Second] {
                for constraint in [SignConstraint::Any, SignConstraint::Pos, SignConstraint::Neg] {
                    inter_choices.push(InterArrow { direction, arc, constraint });
                }
            }
        }
        let mut lists: Vec<Vec<InterArrow>> = vec![Vec::new()];
        let mut frontier = lists.clone();
        for _ in 1..max_arrows {
            frontier = frontier
                .iter()
                .flat_map(|l| inter_choices.iter().map(move |c| [l.clone(), vec![*c]].concat()))
                .collect();
            lists.extend(frontier.iter().cloned());
        }
        let mut out = Vec::new();
        for self_direction in [SelfDirection::Forward, SelfDirection::Backward] {
            for mode in [AssignmentMode::Ordered, AssignmentMode::AllInjective] {
                for inter in &lists {
                    out.push(FonepConfig { self_direction, self_sign: Sign::Pos, inter: inter.clone(), mode });
                }
            }
        }
        out
    }
}

impl fmt::Display for FonepConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pattern())
    }
}

pub fn fonep_pattern(cfg: &FonepConfig) -> Result<ArrowPattern, ConfigError> {
    cfg.validate()?;
    Ok(cfg.pattern())
}

/// λ(D) = <fonep, D>.
pub fn lambda(d: &GaussDiagram) -> Result<i64, MatchError> {
    evaluate_bracket(&FonepConfig::fonep().pattern(), d)
}

pub fn build_du() -> GaussDiagram {
    GaussDiagram::empty(2)
}

/// A diagram of the trivial 2-component link with a single bigon on
/// component 0, formed by arrows 5 and 6.
pub fn build_dl() -> GaussDiagram {
    parse_gauss_code("U1- O5- O6+ U2+ O3+ U6+ U5- O4- / O1- O2+ U3+ U4-").expect("valid literal")
}

/// The decreasing Ω2 removing the marked bigon of [`build_dl`].
pub fn dl_bigon() -> (MoveKind, MoveSite) {
    (MoveKind::omega2('d', Direction::Decreasing), MoveSite::Pair { first: 5, second: 6 })
}

/// Where the bigon chain grows: between arrow 5 and its neighbour along
/// both strands.
pub fn chain_site(d: &GaussDiagram) -> (MoveKind, MoveSite) {
    let (t, h) = d.endpoints()[&5];
    let kind = MoveKind::omega2('c', Direction::Increasing);
    (kind, MoveSite::Bigon { over: (0, t.position + 1), under: (0, h.position), over_first: true })
}

/// D_L with 2n - 1 successive bigons.
pub fn build_dln(n: usize) -> GaussDiagram {
    assert!(n >= 1, "the family starts at n = 1");
    let mut d = build_dl();
    for _ in 1..n {
        let (kind, site) = chain_site(&d);
        d = apply_move(&d, kind, site).expect("the chain site always applies");
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::{classify_locality, enumerate_sites, Locality};

    #[test]
    fn default_pattern_text() {
        assert_eq!(FonepConfig::fonep().pattern().to_string(), "O1 O2 U1 O3 / U2 U3 ; 1:+ 2:? 3:?");
        assert_eq!(FonepConfig::fonem().pattern().to_string(), "O1 O2 U1 O3 / U2 U3 ; 1:- 2:? 3:?");
    }

    #[test]
    fn isolated_self_arrow_is_rejected() {
        let mut cfg = FonepConfig::fonep();
        cfg.inter.iter_mut().for_each(|a| a.arc = Arc::Second);
        assert_eq!(fonep_pattern(&cfg), Err(ConfigError::IsolatedSelfArrow));
        assert!(fonep_pattern(&FonepConfig::fonep()).is_ok());
    }

    #[test]
    fn lemma_values() {
        assert_eq!(lambda(&build_du()), Ok(0));
        assert_eq!(lambda(&build_dl()), Ok(-1));
        assert_eq!(lambda(&build_dln(3)), Ok(-3));
        assert_eq!(build_du().to_string(), "() / ()");
    }

    #[test]
    fn bigon_is_single_component() {
        let d = build_dl();
        let (kind, site) = dl_bigon();
        assert!(enumerate_sites(&d, kind).contains(&site));
        assert_eq!(classify_locality(&d, site), Locality::SingleComponent);
        let e = apply_move(&d, kind, site).unwrap();
        assert_eq!(lambda(&e), Ok(0));
    }

    #[test]
    fn family_shape() {
        for n in 1..=5 {
            let d = build_dln(n);
            assert_eq!(d.num_arrows(), build_dl().num_arrows() + 2 * (n - 1));
            // the 2n self-crossings run consecutively along both strands
            let comp = &d.components()[0];
            let start = comp.iter().position(|s| *s == Slot::over(5)).unwrap();
            let run: Vec<u32> = comp[start..start + 2 * n].iter().map(|s| s.label).collect();
            assert!(comp[start..start + 2 * n].iter().all(|s| s.end == End::Over));
            let back = comp.iter().position(|s| *s == Slot::under(run[2 * n - 1])).unwrap();
            let mut rev: Vec<u32> = comp[back..back + 2 * n].iter().map(|s| s.label).collect();
            rev.reverse();
            assert_eq!(run, rev);
        }
    }
}
