//! Random move instances for the measurement harnesses.
//!
//! Decreasing moves and Ω3 rarely apply to a uniformly random diagram, so
//! their sites are planted first: a kink or bigon is added by the inverse
//! move, and a triangle of the requested variant is inserted with random
//! strand components and orientation. The instance then uses a site chosen
//! uniformly among all sites of the kind, planted or not.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gauss::{random_diagram_with, GaussDiagram, Slot};
use crate::moves::{
    apply_move, classify_locality, enumerate_sites, omega3_lhs_orders, omega3_signs, Direction, Family, Locality,
    MoveKind, MoveSite,
};

/// A move applied to a diagram, with λ-style values attached by callers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Instance {
    pub before: GaussDiagram,
    pub kind: MoveKind,
    pub site: MoveSite,
    pub locality: Locality,
    pub after: GaussDiagram,
}

/// Recorded counterexample: an instance plus the values on both sides.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    #[serde(flatten)]
    pub instance: Instance,
    pub value_before: i64,
    pub value_after: i64,
}

/// Deterministic generator for sample `index` of stream `stream`.
pub fn sample_rng(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream << 32 | index);
    rng
}

fn component_triple<R: Rng>(rng: &mut R, k: usize, locality: Option<Locality>) -> [usize; 3] {
    assert!(k >= 2 || locality != Some(Locality::TwoComponent), "two-component triangles need two components");
    loop {
        let t = [rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k)];
        let single = t[0] == t[1] && t[1] == t[2];
        match locality {
            Some(Locality::SingleComponent) if !single => continue,
            Some(Locality::TwoComponent) if single => continue,
            _ => return t,
        }
    }
}

/// Inserts a triangle of `variant` with random strand components and a
/// random one of its two orientations.
pub fn plant_triangle<R: Rng>(d: &GaussDiagram, variant: char, locality: Option<Locality>, rng: &mut R) -> GaussDiagram {
    let [tc, mc, bc] = component_triple(rng, d.num_components(), locality);
    let mut orders = omega3_lhs_orders(variant);
    if rng.gen_bool(0.5) {
        orders = orders.map(|o| !o);
    }
    let signs = omega3_signs(variant);
    let x = d.next_label();
    let (y, z) = (x + 1, x + 2);
    let pair = |first: Slot, second: Slot, keep: bool| if keep { vec![first, second] } else { vec![second, first] };
    let mut gap = |c: usize| rng.gen_range(0..d.gap_count(c));
    let blocks = [
        (tc, gap(tc), pair(Slot::over(x), Slot::over(y), orders[0])),
        (mc, gap(mc), pair(Slot::under(x), Slot::over(z), orders[1])),
        (bc, gap(bc), pair(Slot::under(y), Slot::under(z), orders[2])),
    ];
    d.with_insertions(&blocks, &[(x, signs[0]), (y, signs[1]), (z, signs[2])])
}

/// Draws a random instance of `kind`, optionally restricted to one
/// locality. Base diagrams have two components and at most `max_arrows`
/// arrows before planting.
pub fn sample_instance<R: Rng>(
    kind: MoveKind,
    locality: Option<Locality>,
    max_arrows: usize,
    rng: &mut R,
) -> Option<Instance> {
    if kind.family() == Family::O1 && locality == Some(Locality::TwoComponent) {
        return None;
    }
    for _ in 0..64 {
        let n = rng.gen_range(0..=max_arrows);
        let base = random_diagram_with(2, n, rng);
        let d = match (kind.family(), kind.direction()) {
            (_, Some(Direction::Increasing)) => base,
            (Family::O1, _) => {
                let inc = MoveKind::omega1(kind.variant(), Direction::Increasing);
                let site = *enumerate_sites(&base, inc).choose(rng)?;
                apply_move(&base, inc, site).ok()?
            }
            (Family::O2, _) => {
                let inc = MoveKind::omega2(kind.variant(), Direction::Increasing);
                let sites: Vec<MoveSite> = enumerate_sites(&base, inc)
                    .into_iter()
                    .filter(|&s| locality.is_none_or(|l| classify_locality(&base, s) == l))
                    .collect();
                let site = *sites.choose(rng)?;
                apply_move(&base, inc, site).ok()?
            }
            (Family::O3, _) => plant_triangle(&base, kind.variant(), locality, rng),
        };
        let sites: Vec<MoveSite> = enumerate_sites(&d, kind)
            .into_iter()
            .filter(|&s| locality.is_none_or(|l| classify_locality(&d, s) == l))
            .collect();
        if let Some(&site) = sites.choose(rng) {
            let after = apply_move(&d, kind, site).expect("enumerated sites apply");
            return Some(Instance { locality: classify_locality(&d, site), before: d, kind, site, after });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_and_locality_can_be_sampled() {
        for kind in MoveKind::all() {
            for loc in [Locality::SingleComponent, Locality::TwoComponent] {
                let mut rng = sample_rng(5, 0, 0);
                let inst = sample_instance(kind, Some(loc), 6, &mut rng);
                if kind.family() == Family::O1 && loc == Locality::TwoComponent {
                    assert!(inst.is_none());
                    continue;
                }
                let inst = inst.unwrap_or_else(|| panic!("no instance of {kind} {loc}"));
                assert_eq!(inst.locality, loc);
                assert_eq!(inst.after.num_arrows() as isize - inst.before.num_arrows() as isize, kind.delta());
            }
        }
    }

    #[test]
    fn sampling_is_deterministic() {
        let k = MoveKind::omega3('d');
        let a = sample_instance(k, None, 6, &mut sample_rng(3, 1, 7));
        let b = sample_instance(k, None, 6, &mut sample_rng(3, 1, 7));
        assert_eq!(a, b);
    }
}
