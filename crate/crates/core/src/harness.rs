//! Reproducible experiments: invariance walks, the difference table, the
//! decomposition check, the example family and the configuration search.
//!
//! Every experiment is a pure function of its options. Independent samples
//! run through [`crate::par::map_indexed`] and are merged by index, so the
//! parallel and sequential paths give identical reports.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gauss::{random_diagram, GaussDiagram};
use crate::invariant::{build_dl, build_dln, build_du, chain_site, FonepConfig};
use crate::moves::{
    apply_move, classify_locality, enumerate_sites, expand_to_omega3a, realize_decomposition, Direction, Family,
    Locality, MoveKind, MoveSite,
};
use crate::par::{map_indexed, Exec};
use crate::pattern::{evaluate_bracket, ArrowPattern};
use crate::sampling::{sample_instance, sample_rng, Instance, Witness};

fn value(p: &ArrowPattern, d: &GaussDiagram) -> i64 {
    evaluate_bracket(p, d).expect("harness diagrams have two components")
}

/// Moves on which the value is claimed not to change.
pub fn claimed_invariant(kind: MoveKind, locality: Locality) -> bool {
    kind.family() != Family::O2 || locality == Locality::TwoComponent
}

fn witness(p: &ArrowPattern, inst: &Instance) -> Witness {
    Witness { value_before: value(p, &inst.before), value_after: value(p, &inst.after), instance: inst.clone() }
}

/// Replays a witness through the move engine and the pattern.
pub fn replay(p: &ArrowPattern, w: &Witness) -> bool {
    let i = &w.instance;
    apply_move(&i.before, i.kind, i.site).is_ok_and(|after| {
        after == i.after && value(p, &i.before) == w.value_before && value(p, &after) == w.value_after
    })
}

#[derive(Clone, Debug)]
pub struct WalkOptions {
    pub kinds: Vec<MoveKind>,
    pub steps: usize,
    pub seed: u64,
    /// Only sites of this locality are eligible.
    pub locality: Option<Locality>,
    /// Increasing moves are skipped once they would exceed this size.
    /// Defaults to the start size plus 8.
    pub max_arrows: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkStep {
    pub kind: MoveKind,
    pub site: MoveSite,
    pub locality: Locality,
}

#[derive(Clone, Debug, Serialize)]
pub struct WalkReport {
    pub start: GaussDiagram,
    pub seed: u64,
    pub steps_taken: usize,
    pub ended_early: bool,
    pub moves: Vec<WalkStep>,
    pub trace: Vec<i64>,
    pub violation: Option<Witness>,
    pub end: GaussDiagram,
}

impl WalkReport {
    pub fn constant(&self) -> bool {
        self.trace.windows(2).all(|w| w[0] == w[1])
    }
}

/// Seeded random walk: each step picks uniformly among applicable
/// (kind, site) pairs and records the value. Stops at the first change
/// under a move claimed to preserve the value.
pub fn walk(start: &GaussDiagram, pattern: &ArrowPattern, opts: &WalkOptions) -> WalkReport {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cap = opts.max_arrows.unwrap_or(start.num_arrows() + 8);
    let mut d = start.clone();
    let mut trace = vec![value(pattern, &d)];
    let mut moves = Vec::new();
    let mut violation = None;
    let mut ended_early = false;
    for _ in 0..opts.steps {
        let mut options = Vec::new();
        for &k in &opts.kinds {
            if (d.num_arrows() as isize + k.delta()) as usize > cap {
                continue;
            }
            for s in enumerate_sites(&d, k) {
                let loc = classify_locality(&d, s);
                if opts.locality.is_none_or(|l| l == loc) {
                    options.push((k, s, loc));
                }
            }
        }
        let Some(&(kind, site, locality)) = options.choose(&mut rng) else {
            ended_early = true;
            break;
        };
        let next = apply_move(&d, kind, site).expect("enumerated sites apply");
        let v = value(pattern, &next);
        let prev = *trace.last().unwrap();
        trace.push(v);
        moves.push(WalkStep { kind, site, locality });
        if v != prev && claimed_invariant(kind, locality) {
            violation = Some(Witness {
                instance: Instance { before: d, kind, site, locality, after: next.clone() },
                value_before: prev,
                value_after: v,
            });
            d = next;
            break;
        }
        d = next;
    }
    WalkReport { start: start.clone(), seed: opts.seed, steps_taken: moves.len(), ended_early, moves, trace, violation, end: d }
}

/// Runs one walk per (start, seed) pair, in that order.
pub fn walk_many(starts: &[GaussDiagram], seeds: &[u64], pattern: &ArrowPattern, opts: &WalkOptions, exec: Exec) -> Vec<WalkReport> {
    map_indexed(exec, starts.len() * seeds.len(), |i| {
        let o = WalkOptions { seed: seeds[i % seeds.len()], ..opts.clone() };
        walk(&starts[i / seeds.len()], pattern, &o)
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub kind: MoveKind,
    pub locality: Option<Locality>,
    pub expect_zero: bool,
    pub samples: usize,
    pub differences: BTreeMap<i64, usize>,
    pub witness: Option<Witness>,
}

impl Row {
    pub fn all_zero(&self) -> bool {
        self.differences.keys().all(|&k| k == 0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DifferenceTable {
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<Row>,
    /// (n, difference) for the increasing Ω2 that grows D_L(n) into D_L(n+1).
    pub chain: Vec<(usize, i64)>,
    pub zeros_hold: bool,
    pub single_component_nonzero: bool,
    pub chain_holds: bool,
}

impl DifferenceTable {
    pub fn passed(&self) -> bool {
        self.zeros_hold && self.single_component_nonzero && self.chain_holds
    }
}

fn table_rows() -> Vec<(MoveKind, Option<Locality>)> {
    let mut rows = Vec::new();
    for dir in [Direction::Increasing, Direction::Decreasing] {
        rows.extend(('a'..='d').map(|v| (MoveKind::omega1(v, dir), Some(Locality::SingleComponent))));
    }
    for loc in [Locality::SingleComponent, Locality::TwoComponent] {
        rows.extend(('a'..='d').map(|v| (MoveKind::omega2(v, Direction::Increasing), Some(loc))));
    }
    for loc in [Locality::SingleComponent, Locality::TwoComponent] {
        rows.extend(('a'..='h').map(|v| (MoveKind::omega3(v), Some(loc))));
    }
    rows
}

/// Measures value differences per (kind, locality) over random instances.
pub fn table1(pattern: &ArrowPattern, samples: usize, seed: u64, exec: Exec) -> DifferenceTable {
    let specs = table_rows();
    let results = map_indexed(exec, specs.len() * samples, |i| {
        let (kind, loc) = specs[i / samples];
        let mut rng = sample_rng(seed, (i / samples) as u64, (i % samples) as u64);
        sample_instance(kind, loc, 6, &mut rng).map(|inst| witness(pattern, &inst))
    });
    let mut rows = Vec::new();
    for (r, &(kind, locality)) in specs.iter().enumerate() {
        let mut row = Row {
            kind,
            locality,
            expect_zero: claimed_invariant(kind, locality.unwrap_or(Locality::SingleComponent)),
            samples: 0,
            differences: BTreeMap::new(),
            witness: None,
        };
        for w in results[r * samples..(r + 1) * samples].iter().flatten() {
            row.samples += 1;
            let diff = w.value_after - w.value_before;
            *row.differences.entry(diff).or_default() += 1;
            if diff != 0 && row.witness.is_none() {
                row.witness = Some(w.clone());
            }
        }
        rows.push(row);
    }
    let chain: Vec<(usize, i64)> = (1..=8)
        .map(|n| {
            let d = build_dln(n);
            let (k, s) = chain_site(&d);
            (n, value(pattern, &apply_move(&d, k, s).expect("chain site")) - value(pattern, &d))
        })
        .collect();
    let zeros_hold = rows.iter().filter(|r| r.expect_zero).all(Row::all_zero);
    let single_component_nonzero = rows
        .iter()
        .any(|r| r.kind.family() == Family::O2 && r.locality == Some(Locality::SingleComponent) && !r.all_zero());
    let chain_holds = chain.iter().all(|&(_, d)| d == -1);
    DifferenceTable { samples, seed, rows, chain, zeros_hold, single_component_nonzero, chain_holds }
}

#[derive(Clone, Debug, Serialize)]
pub struct VariantCheck {
    pub variant: char,
    pub samples: usize,
    pub coherent: usize,
    pub forward: usize,
    pub backward: usize,
    pub locality_coherent: usize,
    pub table_k: usize,
    pub expected_k: usize,
    pub failure: Option<DecompositionFailure>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionFailure {
    pub diagram: GaussDiagram,
    pub site: MoveSite,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct DecompositionReport {
    pub samples: usize,
    pub seed: u64,
    pub variants: Vec<VariantCheck>,
    pub passed: bool,
}

/// Number of increasing Ω2 moves needed to reach Ω3a, by chaining the
/// decomposition table rows b..h.
pub const EXPECTED_K: [(char, usize); 7] = [('b', 1), ('c', 1), ('d', 2), ('e', 2), ('f', 1), ('g', 2), ('h', 3)];

fn expansion_k(variant: char) -> Option<usize> {
    let seq = expand_to_omega3a(variant);
    let inc = seq.iter().filter(|k| k.family() == Family::O2 && k.direction() == Some(Direction::Increasing)).count();
    let dec = seq.iter().filter(|k| k.family() == Family::O2 && k.direction() == Some(Direction::Decreasing)).count();
    let a = seq.iter().filter(|k| **k == MoveKind::omega3('a')).count();
    (a == 1 && inc == dec && inc + dec + 1 == seq.len()).then_some(inc)
}

/// Checks every decomposition row against direct Ω3 application.
pub fn check_decomposition(samples: usize, seed: u64, exec: Exec) -> DecompositionReport {
    let variants: Vec<char> = EXPECTED_K.iter().map(|e| e.0).collect();
    let results = map_indexed(exec, variants.len() * samples, |i| {
        let v = variants[i / samples];
        let mut rng = sample_rng(seed, 100 + (i / samples) as u64, (i % samples) as u64);
        let inst = sample_instance(MoveKind::omega3(v), None, 6, &mut rng)?;
        Some((realize_decomposition(&inst.before, v, inst.site), inst))
    });
    let mut out = Vec::new();
    for (j, &(variant, expected_k)) in EXPECTED_K.iter().enumerate() {
        let mut check = VariantCheck {
            variant,
            samples: 0,
            coherent: 0,
            forward: 0,
            backward: 0,
            locality_coherent: 0,
            table_k: expansion_k(variant).unwrap_or(usize::MAX),
            expected_k,
            failure: None,
        };
        for (res, inst) in results[j * samples..(j + 1) * samples].iter().flatten() {
            check.samples += 1;
            match res {
                Ok(trace) => {
                    check.coherent += 1;
                    if trace.forward {
                        check.forward += 1;
                    } else {
                        check.backward += 1;
                    }
                    if trace.steps[0].locality == trace.steps[2].locality {
                        check.locality_coherent += 1;
                    }
                }
                Err(e) if check.failure.is_none() => {
                    check.failure =
                        Some(DecompositionFailure { diagram: inst.before.clone(), site: inst.site, error: e.to_string() });
                }
                Err(_) => {}
            }
        }
        out.push(check);
    }
    let passed = out.iter().all(|c| {
        c.samples == samples && c.coherent == c.samples && c.locality_coherent == c.samples && c.table_k == c.expected_k
    });
    DecompositionReport { samples, seed, variants: out, passed }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub values: Vec<(usize, i64)>,
    pub passed: bool,
}

pub fn family(pattern: &ArrowPattern, max_n: usize) -> FamilyReport {
    let values: Vec<(usize, i64)> = (1..=max_n).map(|n| (n, value(pattern, &build_dln(n)))).collect();
    let passed = values.iter().all(|&(n, v)| v == -(n as i64));
    FamilyReport { values, passed }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub max_arrows: usize,
    pub trials: usize,
    pub seed: u64,
    /// Also require λ = 0, -1, -n on D_U, D_L, D_L(n ≤ 4).
    pub lemma_filter: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_arrows: 3, trials: 40, seed: 1, lemma_filter: true }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateReport {
    pub config: FonepConfig,
    pub pattern: String,
    pub omega1: bool,
    pub omega3: bool,
    pub omega2_two_component: bool,
    pub omega2_single_component_changes: bool,
    pub lemma: Option<bool>,
    /// First counterexample for the first failing invariance constraint.
    pub witness: Option<Witness>,
}

impl CandidateReport {
    pub fn passed(&self) -> bool {
        self.omega1 && self.omega3 && self.omega2_two_component && self.omega2_single_component_changes && self.lemma != Some(false)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub candidates: usize,
    pub pool: BTreeMap<String, usize>,
    /// Number of candidates meeting each constraint on its own.
    pub passing_each: BTreeMap<String, usize>,
    pub valid: Vec<FonepConfig>,
    pub default_included: bool,
    pub default_report: CandidateReport,
}

/// Tests every candidate configuration against the stated constraints,
/// empirically over a shared pool of random move instances.
pub fn search_valid_configs(opts: &SearchOptions, exec: Exec) -> SearchReport {
    let mut specs: Vec<(MoveKind, Option<Locality>)> = Vec::new();
    for k in MoveKind::all() {
        if k.family() == Family::O2 {
            specs.push((k, Some(Locality::SingleComponent)));
            specs.push((k, Some(Locality::TwoComponent)));
        } else {
            specs.push((k, None));
        }
    }
    let pool: Vec<Instance> = map_indexed(exec, specs.len() * opts.trials, |i| {
        let (kind, loc) = specs[i % specs.len()];
        let mut rng = sample_rng(opts.seed, 200 + (i % specs.len()) as u64, (i / specs.len()) as u64);
        sample_instance(kind, loc, 6, &mut rng)
    })
    .into_iter()
    .flatten()
    .collect();
    let select = |f: &dyn Fn(&Instance) -> bool| pool.iter().filter(|i| f(i)).cloned().collect::<Vec<_>>();
    let o1 = select(&|i| i.kind.family() == Family::O1);
    let o3 = select(&|i| i.kind.family() == Family::O3);
    let o2_two = select(&|i| i.kind.family() == Family::O2 && i.locality == Locality::TwoComponent);
    let o2_single = select(&|i| i.kind.family() == Family::O2 && i.locality == Locality::SingleComponent);
    let lemma_diagrams: Vec<(GaussDiagram, i64)> = [(build_du(), 0), (build_dl(), -1)]
        .into_iter()
        .chain((1..=4).map(|n| (build_dln(n), -(n as i64))))
        .collect();

    let candidates = FonepConfig::candidates(opts.max_arrows);
    let evaluate = |cfg: &FonepConfig| -> CandidateReport {
        let p = cfg.pattern();
        fn first_change<'a>(p: &ArrowPattern, set: &'a [Instance]) -> Option<&'a Instance> {
            set.iter().find(|i| value(p, &i.before) != value(p, &i.after))
        }
        let f1 = first_change(&p, &o1);
        let f3 = first_change(&p, &o3);
        let f2 = first_change(&p, &o2_two);
        let witness = f1.or(f2).or(f3).map(|i| witness(&p, i));
        CandidateReport {
            config: cfg.clone(),
            pattern: p.to_string(),
            omega1: f1.is_none(),
            omega3: f3.is_none(),
            omega2_two_component: f2.is_none(),
            omega2_single_component_changes: first_change(&p, &o2_single).is_some(),
            lemma: opts.lemma_filter.then(|| lemma_diagrams.iter().all(|(d, v)| value(&p, d) == *v)),
            witness,
        }
    };
    let reports = map_indexed(exec, candidates.len(), |i| evaluate(&candidates[i]));
    let mut passing_each = BTreeMap::new();
    let mut count = |name: &str, f: &dyn Fn(&CandidateReport) -> bool| {
        passing_each.insert(name.to_string(), reports.iter().filter(|r| f(r)).count());
    };
    count("omega1", &|r| r.omega1);
    count("omega3", &|r| r.omega3);
    count("omega2_two_component", &|r| r.omega2_two_component);
    count("omega2_single_component_changes", &|r| r.omega2_single_component_changes);
    count("lemma", &|r| r.lemma != Some(false));
    count("all_but_omega3", &|r| {
        r.omega1 && r.omega2_two_component && r.omega2_single_component_changes && r.lemma != Some(false)
    });
    let valid: Vec<FonepConfig> = reports.iter().filter(|r| r.passed()).map(|r| r.config.clone()).collect();
    let default = FonepConfig::fonep();
    let default_report = evaluate(&default);
    let pool_sizes = BTreeMap::from([
        ("omega1".to_string(), o1.len()),
        ("omega3".to_string(), o3.len()),
        ("omega2_two_component".to_string(), o2_two.len()),
        ("omega2_single_component".to_string(), o2_single.len()),
    ]);
    SearchReport {
        candidates: candidates.len(),
        pool: pool_sizes,
        passing_each,
        default_included: valid.contains(&default),
        valid,
        default_report,
    }
}

/// Random 2-component starting diagrams with up to `max_arrows` arrows.
pub fn random_starts(count: usize, max_arrows: usize, seed: u64) -> Vec<GaussDiagram> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_diagram(2, rng.gen_range(0..=max_arrows), rng.gen())).collect()
}
