//! Gauss diagrams of links, oriented Reidemeister moves, Gauss diagram
//! formulas, and a link diagram invariant that survives Ω1 and Ω3 but sees
//! Ω2.

pub mod gauss;
pub mod harness;
pub mod invariant;
pub mod moves;
pub mod par;
pub mod pattern;
pub mod render;
pub mod sampling;

pub use gauss::{parse_gauss_code, random_diagram, Arrow, End, EndpointRef, GaussDiagram, GaussError, Sign, Slot};
pub use invariant::{build_dl, build_dln, build_du, fonep_pattern, lambda, FonepConfig};
pub use moves::{apply_move, classify_locality, enumerate_sites, Direction, Locality, MoveKind, MoveSite};
pub use par::Exec;
pub use pattern::{enumerate_matchings, evaluate_bracket, parse_pattern, ArrowPattern, AssignmentMode, Matching, SignConstraint};
