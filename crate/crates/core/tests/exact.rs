use std::collections::BTreeSet;

use blockset::blocking::{is_affine_blocking, is_strong_blocking, PointSet};
use blockset::bounds::{lb_affine, strong_lower};
use blockset::exact::{build_instance, solve_min_cover, solve_with, verify_certificate, CutKind, SearchMode, SolveOptions};
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const OPTIMA: [(usize, usize); 3] = [(2, 4), (3, 9), (4, 14)];

/// Random covers: a shuffled order of lines, kept until every element is
/// met, then pruned of redundant lines in a random order.
fn random_covers(k: usize, count: usize, seed: u64) -> Vec<Vec<usize>> {
    let inst = build_instance(k).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..count {
        let mut order: Vec<usize> = (0..inst.sets.len()).collect();
        order.shuffle(&mut rng);
        let mut chosen = Vec::new();
        for &j in &order {
            chosen.push(j);
            if inst.is_cover(&chosen) {
                break;
            }
        }
        chosen.shuffle(&mut rng);
        let mut i = 0;
        while i < chosen.len() {
            let mut without = chosen.clone();
            without.remove(i);
            if inst.is_cover(&without) {
                chosen = without;
            } else {
                i += 1;
            }
        }
        chosen.sort_unstable();
        out.push(chosen);
    }
    out
}

#[test]
fn cuts_match_their_hyperplanes() {
    for k in 2..=4 {
        let inst = build_instance(k).unwrap();
        let f = inst.field().clone();
        for cut in &inst.cuts {
            let expected: Vec<usize> = (0..inst.sets.len())
                .filter(|&j| {
                    let on = f.dot(&cut.normal, &inst.sets[j]) == 0;
                    match cut.kind {
                        CutKind::Linear => on,
                        CutKind::Affine => !on,
                    }
                })
                .collect();
            assert_eq!(cut.sets, expected);
            let rhs = match cut.kind {
                CutKind::Linear => k - 1,
                CutKind::Affine => 2 * k - 1,
            };
            assert_eq!(cut.rhs, rhs);
        }
    }
}

#[test]
fn cuts_hold_on_random_covers() {
    for k in 2..=4 {
        let inst = build_instance(k).unwrap();
        for chosen in random_covers(k, 100, 17 + k as u64) {
            assert!(inst.is_cover(&chosen));
            for cut in &inst.cuts {
                assert!(cut.satisfied_by(&chosen), "k = {k}, cover {chosen:?}, cut {cut:?}");
            }
        }
    }
}

#[test]
fn covers_are_strong_blocking_sets() {
    let f = blockset::algebra::Field::new(3).unwrap();
    for k in 2..=4 {
        let inst = build_instance(k).unwrap();
        for chosen in random_covers(k, 10, 3) {
            let pts: Vec<Vec<u8>> = chosen.iter().map(|&j| inst.sets[j].clone()).collect();
            let set = PointSet::projective(&f, k, pts).unwrap();
            assert!(is_strong_blocking(&set, 1).unwrap().holds);
        }
    }
}

#[test]
fn optima_and_certificates() {
    for (k, opt) in OPTIMA {
        let inst = build_instance(k).unwrap();
        let cert = solve_min_cover(&inst, None, SearchMode::Bnb).unwrap();
        assert_eq!(cert.optimum, opt);
        assert_eq!(cert.chosen.len(), opt);
        assert!(cert.verified && cert.canonical);
        assert!(verify_certificate(&cert).unwrap());
        assert!(is_affine_blocking(&cert.affine_set(), 2).unwrap().holds);
        assert_eq!(cert.affine_set().len(), 2 * opt + 1);
        let sizes: Vec<usize> = cert.lower_bound_trace.iter().map(|s| s.size).collect();
        assert_eq!(sizes.last(), Some(&opt));
        assert!(cert.lower_bound_trace.iter().all(|s| s.feasible == (s.size == opt)));
    }
}

#[test]
fn no_smaller_cover_by_enumeration() {
    for (k, opt) in [(2, 4), (3, 9)] {
        let inst = build_instance(k).unwrap();
        let n = inst.sets.len();
        for mask in 0u32..(1 << n) {
            if (mask.count_ones() as usize) < opt {
                let chosen: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
                assert!(!inst.is_cover(&chosen), "k = {k}: {chosen:?}");
            }
        }
    }
}

#[test]
fn modes_agree() {
    for k in [2, 3] {
        let inst = build_instance(k).unwrap();
        let a = solve_min_cover(&inst, None, SearchMode::Exhaustive).unwrap();
        let b = solve_min_cover(&inst, None, SearchMode::Bnb).unwrap();
        assert_eq!(a.optimum, b.optimum);
        assert_eq!(a.chosen, b.chosen);
    }
}

#[test]
fn deterministic_replay() {
    let inst = build_instance(4).unwrap();
    let a = solve_min_cover(&inst, None, SearchMode::Bnb).unwrap();
    let b = solve_min_cover(&inst, None, SearchMode::Bnb).unwrap();
    assert_eq!(a.node_count, b.node_count);
    assert_eq!(a.chosen_indices, b.chosen_indices);
}

#[test]
fn parallel_matches_sequential() {
    let inst = build_instance(4).unwrap();
    let seq = solve_min_cover(&inst, None, SearchMode::Bnb).unwrap();
    let par = solve_with(&inst, &SolveOptions { threads: 4, ..SolveOptions::default() }).unwrap();
    assert_eq!(par.optimum, seq.optimum);
    assert_eq!(par.chosen, seq.chosen);
    assert!(par.verified);
}

#[test]
fn lower_bound_sanity() {
    for (k, opt) in OPTIMA {
        assert!(opt >= strong_lower(3, k));
        let lb = lb_affine(3, k, 2).to_usize().unwrap();
        assert!(opt >= (lb - 1).div_ceil(2));
        let cert = solve_min_cover(&build_instance(k).unwrap(), None, SearchMode::Bnb).unwrap();
        assert!(cert.root_lower_bound <= opt && opt <= cert.greedy_upper_bound);
    }
}

#[test]
fn optimal_sets_are_distinct_points() {
    let cert = solve_min_cover(&build_instance(4).unwrap(), None, SearchMode::Bnb).unwrap();
    let set: BTreeSet<&Vec<u8>> = cert.chosen.iter().collect();
    assert_eq!(set.len(), cert.optimum);
    assert!(cert.chosen.iter().all(|v| v.iter().find(|&&x| x != 0) == Some(&1)));
}

#[test]
fn time_limit_reports_bracket() {
    let inst = build_instance(5).unwrap();
    let opts = SolveOptions { time_limit: Some(std::time::Duration::from_millis(200)), ..SolveOptions::default() };
    match solve_with(&inst, &opts) {
        Err(blockset::Error::TimeLimitExceeded { lower, upper }) => {
            assert!(lower >= 16 && lower <= 19 && upper >= 19, "[{lower}, {upper}]");
        }
        other => panic!("expected a time-out, got {other:?}"),
    }
}
