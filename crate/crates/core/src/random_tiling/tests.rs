use std::collections::HashMap;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::TAU;

#[test]
fn bernoulli_values() {
    let closed = (TAU + 2.0) / (TAU + 1.0) * TAU.ln();
    assert!((bernoulli_entropy(1.0 / TAU) - closed).abs() < 1e-12);
    assert!((bernoulli_entropy(1.0 / TAU) - 0.665).abs() < 5e-4);
    assert!((bernoulli_entropy(0.5) - 2f64.ln()).abs() < 1e-15);
    assert_eq!(bernoulli_entropy(1.0), 0.0);
    assert_eq!(bernoulli_entropy(0.0), 0.0);
    for k in 0..=20 {
        let v = k as f64 / 20.0;
        assert!((bernoulli_entropy(v) - bernoulli_entropy(1.0 - v)).abs() < 1e-15);
        assert!(bernoulli_entropy(v) <= 2f64.ln());
    }
}

#[test]
fn ensemble_rejects_bad_frequency() {
    assert!(BinaryEnsemble::new(1.5, 10, 0).unwrap_err().is_validation());
    assert!(BinaryEnsemble::new(-0.1, 10, 0).is_err());
    assert_eq!(BinaryEnsemble::new(0.25, 10, 0).unwrap().nu_b(), 0.75);
}

#[test]
fn block_entropy_estimates() {
    let golden = sample_binary_chain(&BinaryEnsemble::new(1.0 / TAU, 1_000_000, 7).unwrap());
    let freq = golden.iter().filter(|&&c| c == b'a').count() as f64 / golden.len() as f64;
    assert!((freq - 1.0 / TAU).abs() < 3e-3);
    assert!((block_entropy(&golden, 8).unwrap() - 0.665).abs() < 0.01);

    let fair = sample_binary_chain(&BinaryEnsemble::new(0.5, 1_000_000, 8).unwrap());
    assert!((block_entropy(&fair, 8).unwrap() - 2f64.ln()).abs() < 0.01);

    let constant = sample_binary_chain(&BinaryEnsemble::new(1.0, 10_000, 9).unwrap());
    assert!(constant.iter().all(|&c| c == b'a'));
    assert_eq!(block_entropy(&constant, 8).unwrap(), 0.0);

    assert!(block_entropy(b"ab", 3).is_err());
    assert!(block_entropy(b"ab", 0).is_err());
}

#[test]
fn chain_is_reproducible() {
    let e = BinaryEnsemble::new(0.3, 1000, 42).unwrap();
    assert_eq!(sample_binary_chain(&e), sample_binary_chain(&e));
    let f = BinaryEnsemble { seed: 43, ..e };
    assert_ne!(sample_binary_chain(&e), sample_binary_chain(&f));
}

/// Validity-check every subset of edges: an oracle independent of the
/// parity-pruned search.
fn brute_force(l1: usize, l2: usize) -> u64 {
    let ne = 3 * l1 * l2;
    (0u32..1 << ne)
        .filter(|mask| DartRhombusConfig::new(l1, l2, (0..ne).map(|e| mask >> e & 1 == 1).collect()).is_ok())
        .count() as u64
}

#[test]
fn counts_match_brute_force() {
    for (l1, l2) in [(1, 1), (1, 2), (2, 1), (1, 3), (2, 2), (1, 5), (2, 3)] {
        let n = enumerate_configs(l1, l2, None).unwrap();
        assert_eq!(n, BigUint::from(brute_force(l1, l2)), "{l1}x{l2}");
    }
}

#[test]
fn count_fixtures() {
    assert_eq!(enumerate_configs(0, 3, None).unwrap(), BigUint::from(0u32));
    assert_eq!(enumerate_configs(2, 0, None).unwrap(), BigUint::from(0u32));
    assert_eq!(enumerate_configs(1, 1, None).unwrap(), BigUint::from(4u32));
}

#[test]
fn counts_follow_cycle_space_dimension() {
    // Tilings are the odd-degree edge sets of the honeycomb dual: a coset of
    // its cycle space, of dimension (edges − vertices + 1) = l1·l2 + 1.
    for (l1, l2) in [(1, 4), (2, 4), (3, 3), (3, 4), (4, 4), (4, 5)] {
        let n = enumerate_configs(l1, l2, None).unwrap();
        assert_eq!(n, BigUint::from(2u32).pow((l1 * l2 + 1) as u32), "{l1}x{l2}");
    }
}

#[test]
fn counts_are_swap_invariant() {
    for (a, b) in [(1, 2), (2, 3), (1, 6), (3, 4)] {
        assert_eq!(enumerate_configs(a, b, None).unwrap(), enumerate_configs(b, a, None).unwrap());
    }
}

#[test]
fn budget_is_enforced() {
    match enumerate_configs(5, 5, None) {
        Err(Error::BudgetExceeded(msg)) => assert!(msg.contains("2^26")),
        other => panic!("expected budget error, got {other:?}"),
    }
    assert!(count_by_orientation(7, 3).is_err());
    assert!(enumerate_all(4, 4).is_err());
}

#[test]
fn orientation_counts_partition_total() {
    let table = count_by_orientation(3, 3).unwrap();
    let total: BigUint = table.values().sum();
    assert_eq!(total, enumerate_configs(3, 3, None).unwrap());
    for (n, c) in &table {
        assert_eq!(&enumerate_configs(3, 3, Some(*n)).unwrap(), c);
    }
    // the three orientations are exchanged by the lattice rotation
    for (n, c) in &table {
        assert_eq!(table.get(&[n[1], n[2], n[0]]), Some(c));
    }
    assert_eq!(enumerate_configs(3, 3, Some([0, 0, 0])).unwrap(), BigUint::from(0u32));
}

#[test]
fn listed_configs_are_valid_and_distinct() {
    let all = enumerate_all(2, 3).unwrap();
    assert_eq!(all.len(), 128);
    assert!(all.iter().all(|c| c.is_valid()));
    let mut sorted = all.clone();
    sorted.dedup();
    assert_eq!(sorted.len(), all.len());
    for c in &all {
        let n = c.rhombus_counts();
        // every tile covers two of the 36 small triangles
        assert_eq!(n.iter().sum::<usize>() + c.dart_count(), 18);
    }
}

#[test]
fn invalid_assignments_are_rejected() {
    // no rhombi: every lattice triangle would need three darts' worth
    let empty = DartRhombusConfig::new(2, 2, vec![false; 12]).unwrap_err();
    assert!(empty.to_string().contains("covered 0 times"));
    // two rhombus halves in one triangle leave one small triangle alone
    let mut occ = vec![false; 12];
    occ[0] = true;
    occ[1] = true;
    assert!(DartRhombusConfig::new(2, 2, occ).is_err());
    assert!(DartRhombusConfig::new(2, 2, vec![true; 11]).is_err());
    assert!(DartRhombusConfig::seed(0, 2, SeedPattern::AllRhombi).is_err());
}

#[test]
fn seeds_and_exports() {
    let r = DartRhombusConfig::seed(3, 3, SeedPattern::AllRhombi).unwrap();
    assert_eq!(r.rhombus_counts(), [9, 9, 9]);
    assert_eq!(r.dart_count(), 0);
    let d = DartRhombusConfig::seed(3, 3, SeedPattern::Darts).unwrap();
    assert_eq!(d.rhombus_counts(), [0, 0, 9]);
    assert_eq!(d.dart_count(), 18);
    let rec = d.to_records();
    assert_eq!(rec.lines().count(), 1 + 27);
    assert!(rec.starts_with("label,orientation,i,j,half\n"));
    let svg = d.to_svg();
    assert_eq!(svg.matches("<polygon").count(), 27);
    let labels: std::collections::BTreeSet<u8> = d.tiles().iter().map(|t| t.kind.label()).collect();
    assert_eq!(labels.into_iter().collect::<Vec<_>>(), vec![2, 5, 8]);
}

#[test]
fn zero_steps_is_identity() {
    let s = DartRhombusConfig::seed(3, 4, SeedPattern::AllRhombi).unwrap();
    assert_eq!(mc_sample(&s, 0, MoveSet::LocalAndWinding, 1).unwrap(), s);
}

#[test]
fn samples_stay_valid() {
    let s = DartRhombusConfig::seed(6, 6, SeedPattern::Darts).unwrap();
    let mut chain = McChain::new(s, MoveSet::LocalAndWinding, ChaCha8Rng::seed_from_u64(3)).unwrap();
    for k in 0..20_000 {
        chain.step();
        if k % 500 == 0 {
            chain.state().validate().unwrap();
        }
    }
    assert_eq!(chain.rejected, 0);
    assert!(chain.accepted > 9000);
}

fn visits(l1: usize, l2: usize, moves: MoveSet, samples: usize, thin: usize) -> HashMap<DartRhombusConfig, usize> {
    let s = DartRhombusConfig::seed(l1, l2, SeedPattern::AllRhombi).unwrap();
    let mut chain = McChain::new(s, moves, ChaCha8Rng::seed_from_u64(11)).unwrap();
    let mut seen = HashMap::new();
    for _ in 0..samples {
        for _ in 0..thin {
            chain.step();
        }
        *seen.entry(chain.state().clone()).or_insert(0) += 1;
    }
    seen
}

#[test]
fn visit_distribution_is_uniform() {
    let all = enumerate_all(1, 2).unwrap();
    let samples = 40_000;
    let seen = visits(1, 2, MoveSet::LocalAndWinding, samples, 40);
    assert_eq!(seen.len(), all.len(), "every enumerated tiling is visited");
    let p = 1.0 / all.len() as f64;
    let mean = samples as f64 * p;
    let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
    for c in &all {
        let n = seen.get(c).copied().unwrap_or(0) as f64;
        assert!((n - mean).abs() < 3.0 * sigma, "{n} vs {mean} ± {sigma}");
    }
}

#[test]
fn chain_visits_every_tiling() {
    let all = enumerate_all(2, 2).unwrap();
    let seen = visits(2, 2, MoveSet::LocalAndWinding, 10_000, 20);
    assert_eq!(seen.len(), all.len());
    assert!(seen.keys().all(|c| all.contains(c)));
}

#[test]
fn local_moves_keep_the_winding_sector() {
    let total = enumerate_configs(2, 3, None).unwrap();
    let seen = visits(2, 3, MoveSet::Local, 20_000, 30);
    assert_eq!(BigUint::from(4 * seen.len()), total);
    let seen = visits(2, 3, MoveSet::LocalAndWinding, 20_000, 30);
    assert_eq!(BigUint::from(seen.len()), total);
}

#[test]
fn parallel_chains_are_reproducible() {
    let s = DartRhombusConfig::seed(4, 4, SeedPattern::AllRhombi).unwrap();
    let a = mc_chains(&s, 500, MoveSet::LocalAndWinding, 5, 4).unwrap();
    let b = mc_chains(&s, 500, MoveSet::LocalAndWinding, 5, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a[0], a[1]);
    assert!(a.iter().all(|c| c.is_valid()));
}

#[test]
fn ladder_per_tile_entropy() {
    let ladder = torus_ladder(ENUMERATION_BUDGET).unwrap();
    let last = ladder.last().unwrap();
    assert_eq!(last.triangles, 40);
    let target = 2f64.ln() / 3.0;
    // (l1·l2 + 1)·log 2 / (3·l1·l2): approaches the target from above
    for r in &ladder {
        let exact = (r.l1 * r.l2 + 1) as f64 * 2f64.ln() / r.tiles as f64;
        assert!((r.per_tile - exact).abs() < 1e-12);
        assert!(r.per_tile > target);
        assert!((r.per_small_triangle - r.per_tile / 2.0).abs() < 1e-15);
    }
    assert!((last.per_tile - target).abs() < 0.012);
}

#[test]
fn binary_scan() {
    let grid: Vec<f64> = (0..=50).map(|k| k as f64 / 50.0).collect();
    let scan = entropy_scan(&Family::Binary(grid), Some(0.1)).unwrap();
    assert_eq!(scan.max().params, vec![0.5]);
    assert!((scan.max().entropy - 2f64.ln()).abs() < 1e-15);
    assert!(scan.second_differences().iter().all(|&d| d < 0.0));
    assert!(scan.fit.as_ref().unwrap().r2 > 0.99);
    assert!(entropy_scan(&Family::Binary(vec![1.2]), None).is_err());
}

#[test]
fn dart_rhombus_scan() {
    let scan = entropy_scan(&Family::DartRhombus { l: 4 }, None).unwrap();
    let m = &scan.max().params;
    assert_eq!(m, &vec![8.0, 8.0, 8.0]);
    // rhombus numbers keep their parity under all moves, so the nearest
    // shells sit at distance 2 and 2√2; the fit needs both
    let fit = scan.fit.as_ref().unwrap();
    assert!((fit.radius - 8f64.sqrt()).abs() < 1e-12);
    assert_eq!(fit.residuals.len(), 19);
    assert!(fit.r2 > 0.95, "r2 = {}", fit.r2);
    // the stencil including the (±2,±2,±2) corners is visibly cubic on this torus
    let wide = entropy_scan(&Family::DartRhombus { l: 4 }, Some(12f64.sqrt())).unwrap();
    assert!(wide.fit.unwrap().r2 < 0.8);
    assert!(scan.to_records().lines().count() > scan.points.len());
}
