//! Brute-force bracket used as a reference for the matcher: tries every
//! injective assignment of diagram arrows to pattern arrows, with no
//! pruning, and checks each complete assignment from scratch.

#![allow(dead_code)]

use std::collections::BTreeMap;

use gdl_core::{random_diagram, ArrowPattern, AssignmentMode, End, GaussDiagram, Sign, SignConstraint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// (circle map, sorted (pattern label, diagram label) pairs, weight)
pub type Embedding = (Vec<usize>, Vec<(u32, u32)>, i64);

fn injective_maps(len: usize, range: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for prefix in injective_maps(len - 1, range) {
        for x in 0..range {
            if !prefix.contains(&x) {
                let mut m = prefix.clone();
                m.push(x);
                out.push(m);
            }
        }
    }
    out
}

/// Positions read in pattern order are a rotation of an increasing run.
fn cyclically_increasing(pos: &[usize]) -> bool {
    let Some(start) = (0..pos.len()).min_by_key(|&i| pos[i]) else {
        return true;
    };
    let rotated: Vec<usize> = pos[start..].iter().chain(&pos[..start]).copied().collect();
    rotated.windows(2).all(|w| w[0] < w[1])
}

fn admits(c: SignConstraint, s: Sign) -> bool {
    match c {
        SignConstraint::Any => true,
        SignConstraint::Pos => s == Sign::Pos,
        SignConstraint::Neg => s == Sign::Neg,
    }
}

/// Every embedding, or `None` when an ordered pattern has too many circles.
pub fn embeddings(p: &ArrowPattern, d: &GaussDiagram) -> Option<Vec<Embedding>> {
    let circles = p.circles();
    let k = d.num_components();
    let maps = match p.mode() {
        AssignmentMode::Ordered if circles.len() > k => return None,
        AssignmentMode::Ordered => vec![(0..circles.len()).collect()],
        AssignmentMode::AllInjective => injective_maps(circles.len(), k),
    };
    let mut labels: Vec<u32> = circles.iter().flatten().map(|s| s.label).collect();
    labels.sort();
    labels.dedup();
    let arrows = d.arrows();
    let mut out = Vec::new();
    for cmap in &maps {
        for choice in injective_maps(labels.len(), arrows.len()) {
            let image: BTreeMap<u32, usize> = labels.iter().copied().zip(choice.iter().copied()).collect();
            let mut ok = labels.iter().all(|l| admits(p.constraint(*l), arrows[image[l]].sign));
            for (c, circle) in circles.iter().enumerate() {
                let mut pos = Vec::new();
                for s in circle {
                    let a = &arrows[image[&s.label]];
                    let at = if s.end == End::Over { a.tail } else { a.head };
                    ok &= at.component == cmap[c];
                    pos.push(at.position);
                }
                ok &= cyclically_increasing(&pos);
            }
            if ok {
                let weight = choice.iter().map(|&j| arrows[j].sign.value()).product();
                let pairs = labels.iter().map(|l| (*l, arrows[image[l]].label)).collect();
                out.push((cmap.clone(), pairs, weight));
            }
        }
    }
    Some(out)
}

pub fn bracket(p: &ArrowPattern, d: &GaussDiagram) -> Option<i64> {
    embeddings(p, d).map(|e| e.iter().map(|m| m.2).sum())
}

/// Random pattern with up to `max_arrows` arrows on 1..=3 circles.
pub fn random_pattern<R: Rng>(rng: &mut R, max_arrows: usize) -> ArrowPattern {
    let shape = random_diagram(rng.gen_range(1..=3), rng.gen_range(0..=max_arrows), rng.gen());
    let constraints = shape
        .labels()
        .map(|l| {
            let c = [SignConstraint::Any, SignConstraint::Pos, SignConstraint::Neg][rng.gen_range(0..3)];
            (l, c)
        })
        .collect();
    let mode = if rng.gen_bool(0.5) { AssignmentMode::Ordered } else { AssignmentMode::AllInjective };
    ArrowPattern::new(shape.components().to_vec(), constraints, mode).expect("diagram shapes are valid patterns")
}

/// The `index`-th seeded (pattern, diagram) instance of the reference run.
pub fn instance(seed: u64, index: u64) -> (ArrowPattern, GaussDiagram) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(index));
    let p = random_pattern(&mut rng, 3);
    let d = random_diagram(rng.gen_range(1..=3), rng.gen_range(0..=6), rng.gen());
    (p, d)
}
