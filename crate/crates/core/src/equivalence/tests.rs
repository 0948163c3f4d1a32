use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::algebra::{CycloOrder, OrthogonalMap};
use crate::cut_project::{generate, ProjectionScheme, TorusParameter};
use crate::substitution::{GeometricInflation, Tile, TileFamily, TilingConfig, View};

fn fibonacci(gamma: f64, lo: f64, hi: f64) -> Pattern {
    let g = TorusParameter::Float(vec![gamma, 0.0]);
    generate(&ProjectionScheme::fibonacci(), &g, &Region::interval(lo, hi)).unwrap()
}

fn chain(gaps: impl Iterator<Item = f64>, len: f64) -> Pattern {
    let mut x = 0.0;
    let mut pts = vec![[0.0, 0.0]];
    for g in gaps {
        x += g;
        if x > len {
            break;
        }
        pts.push([x, 0.0]);
    }
    Pattern::from_positions(&pts, Region::interval(0.0, len)).unwrap()
}

#[test]
fn integer_chain_atlas() {
    let z = Pattern::integer_lattice(Region::interval(-50.0, 50.0)).unwrap();
    let a = extract_atlas(&z, 0.5, None).unwrap();
    assert_eq!(a.len(), 1);
    assert_eq!(a.patches.iter().next().unwrap().points.len(), 1);
    let b = extract_atlas(&z, 1.5, None).unwrap();
    assert_eq!(b.len(), 1);
    assert_eq!(b.patches.iter().next().unwrap().points.len(), 3);
    assert!(extract_atlas(&z, 60.0, None).is_err());
}

#[test]
fn fibonacci_atlas_counts_local_words() {
    let p = fibonacci(0.3, 0.0, 1e3);
    let r = crate::TAU + 0.1;
    let atlas = extract_atlas(&p, r, None).unwrap();
    // oracle: distinct (left gap, right gap) pairs at interior points
    let x: Vec<f64> = p.positions().iter().map(|q| q[0]).collect();
    let mut words = BTreeSet::new();
    for i in 1..x.len() - 1 {
        if x[i] >= r && x[i] <= 1e3 - r {
            let gap = |d: f64| if d > 1.3 { 'L' } else { 'S' };
            words.insert((gap(x[i] - x[i - 1]), gap(x[i + 1] - x[i])));
        }
    }
    assert_eq!(atlas.len(), words.len());
    assert_eq!(atlas.len(), 3);
}

#[test]
fn canonical_form_is_translation_invariant() {
    let p = fibonacci(0.1, 0.0, 500.0);
    let q = p.translate_exact(&[3, -7, 0, 0]);
    let a = extract_atlas(&p, 6.0, None).unwrap();
    let b = extract_atlas(&q, 6.0, None).unwrap();
    assert_eq!(a.patches, b.patches);
    assert!(li_equivalent(&p, &q, 6.0).unwrap());
    // re-canonicalizing a patch (as its own pattern) changes nothing
    let patch = a.patches.iter().next().unwrap();
    let pts: Vec<Point> = patch
        .points
        .iter()
        .map(|(k, l)| Point { pos: Frame::Golden.position(k), key: *k, label: *l, preimage: Vec::new() })
        .collect();
    let alone = Pattern::new(Frame::Golden, pts, Region::interval(-7.0, 7.0), "patch").unwrap();
    let anchor = alone.points().iter().position(|q| q.key == [0; 4]).unwrap();
    let again = RPatch::around(&alone, &grid(&alone, 6.0), anchor, 6.0);
    assert_eq!(&again, patch);
}

#[test]
fn regular_fibonacci_patterns_are_locally_isomorphic() {
    let a = fibonacci(0.123, 0.0, 1e4);
    let b = fibonacci(0.777, 0.0, 1e4);
    assert!(li_equivalent(&a, &b, 20.0).unwrap());
    assert!(li_equivalent(&b, &a, 20.0).unwrap());
    assert!(li_equivalent(&a, &a, 20.0).unwrap());
}

#[test]
fn periodic_chain_is_not_fibonacci() {
    let a = fibonacci(0.123, 0.0, 1e4);
    let periodic = chain([1.0, crate::TAU].into_iter().cycle(), 1e4);
    assert!(!li_equivalent(&a, &periodic, 5.0).unwrap());
}

#[test]
fn li_is_monotone_in_radius() {
    let a = fibonacci(0.2, 0.0, 3000.0);
    let mut w = crate::substitution::SymbolicSubstitution::fibonacci().fixed_point(b'a', 3000).unwrap();
    w.swap(1000, 1001);
    let b = crate::substitution::word_to_chain(&w).unwrap();
    let b = b.restrict(Region::interval(0.0, 3000.0));
    let verdicts: Vec<bool> = [0.5, 1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|&r| li_equivalent(&a, &b, r).unwrap()).collect();
    // once false, false for every larger radius
    let first_false = verdicts.iter().position(|v| !v).expect("distinguished at some radius");
    assert!(verdicts[first_false..].iter().all(|v| !v));
    assert!(verdicts[0]);
}

#[test]
fn octagonal_symmetry() {
    let s = ProjectionScheme::ammann_beenker();
    let g = TorusParameter::Float(vec![0.131, 0.278, 0.411, 0.052]);
    let p = generate(&s, &g, &Region::ball(40.0)).unwrap();
    assert!(generalized_symmetry(&p, &OrthogonalMap::rotation(1, 8), 3.0).unwrap());
}

#[test]
fn decagonal_symmetry() {
    let s = ProjectionScheme::penrose();
    let g = TorusParameter::Float(vec![0.13, 0.21, -0.07, 0.33, -0.6]);
    let p = generate(&s, &g, &Region::ball(40.0)).unwrap();
    assert!(generalized_symmetry(&p, &OrthogonalMap::rotation(1, 10), 3.0).unwrap());
    // the vertex set is exactly rotated in the ring
    let t = apply_orthogonal(&p, &OrthogonalMap::rotation(1, 10)).unwrap();
    assert!(t.frame().is_exact());
}

#[test]
fn square_lattice_symmetry() {
    let z = Pattern::integer_lattice(Region::square(20.0)).unwrap();
    assert!(generalized_symmetry(&z, &OrthogonalMap::rotation(1, 4), 3.0).unwrap());
    assert!(!generalized_symmetry(&z, &OrthogonalMap::rotation(1, 8), 3.0).unwrap());
    let rect: Vec<[f64; 2]> = (-20..=20).flat_map(|i| (-10..=10).map(move |j| [i as f64, 2.0 * j as f64])).collect();
    let rect = Pattern::from_positions(&rect, Region::square(19.5)).unwrap();
    assert!(!generalized_symmetry(&rect, &OrthogonalMap::rotation(1, 4), 3.0).unwrap());
    assert!(generalized_symmetry(&rect, &OrthogonalMap::rotation(1, 2), 3.0).unwrap());
}

#[test]
fn reflection_of_fibonacci_chain() {
    let p = fibonacci(0.4, -3000.0, 3000.0);
    let m = OrthogonalMap::new(vec![vec![-1.0]], 1e-9).unwrap();
    assert!(generalized_symmetry(&p, &m, 10.0).unwrap());
}

#[test]
fn identity_and_self_derivability() {
    let p = fibonacci(0.3, 0.0, 2000.0);
    let d = is_locally_derivable(&p, &p, 3.0, 2.0, None).unwrap();
    assert!(d.holds);
    assert!(d.pairs_checked > 100);
    let Structure::Points(q) = derive(DerivationRule::Identity, &Structure::Points(p.clone())).unwrap() else {
        unreachable!()
    };
    assert_eq!(q.points(), p.points());
}

#[test]
fn random_chain_is_not_derivable_from_fibonacci() {
    let a = fibonacci(0.3, 0.0, 5000.0);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let b = chain(std::iter::repeat_with(move || if rng.gen::<bool>() { 1.0 } else { crate::TAU }), 5000.0);
    let d = is_locally_derivable(&a, &b, 5.0, 3.0, None).unwrap();
    assert!(!d.holds);
    let (p, q) = d.violation.unwrap();
    assert_ne!(p, q);
}

fn supertile(depth: usize) -> (TilingConfig, Region) {
    let rule = GeometricInflation::PenroseRobinson;
    let cfg = rule.inflate(&rule.proto_tile(1, false), depth).unwrap();
    let ball = cfg.inscribed_ball().unwrap();
    (cfg, ball)
}

#[test]
fn penrose_vertices_and_robinson_triangles_are_mutually_derivable() {
    let (cfg, ball) = supertile(11);
    let vertices = cfg.to_pattern(View::Vertices, ball.clone()).unwrap();
    let triangles = cfg.to_pattern(View::Tiles, ball.clone()).unwrap();
    let r = 2.0;
    let rho = 0.5;
    let sample = ball.shrink(r + rho + 1.0).unwrap();
    let v2t = is_locally_derivable(&vertices, &triangles, r, rho, Some(&sample)).unwrap();
    assert!(v2t.holds, "violation at {:?}", v2t.violation);
    assert!(v2t.pairs_checked > 1000);
    let t2v = is_locally_derivable(&triangles, &vertices, r, rho, Some(&sample)).unwrap();
    assert!(t2v.holds);
}

#[test]
fn same_lattice_different_motif_is_mld() {
    let cells: Vec<[f64; 2]> = (-15..=15).flat_map(|i| (-15..=15).map(move |j| [i as f64, j as f64])).collect();
    let plain = Pattern::from_positions(&cells, Region::square(15.0)).unwrap();
    let motif: Vec<[f64; 2]> = cells.iter().flat_map(|c| [*c, [c[0] + 0.25, c[1] + 0.5]]).collect();
    let motif = Pattern::from_positions(&motif, Region::square(15.0)).unwrap();
    let r = 2f64.sqrt();
    assert!(is_locally_derivable(&plain, &motif, r, 1.0, None).unwrap().holds);
    assert!(is_locally_derivable(&motif, &plain, r, 1.0, None).unwrap().holds);
    // 2Z × Z against Z²: the finer lattice cannot tell even from odd columns
    let coarse: Vec<[f64; 2]> = cells.iter().filter(|c| (c[0] as i64).rem_euclid(2) == 0).copied().collect();
    let coarse = Pattern::from_positions(&coarse, Region::square(15.0)).unwrap();
    let fwd = is_locally_derivable(&plain, &coarse, r, 1.0, None).unwrap().holds;
    let bwd = is_locally_derivable(&coarse, &plain, 2.0 * r, 1.0, None).unwrap().holds;
    assert!(!(fwd && bwd));
    assert!(!fwd && bwd);
}

fn rhombs() -> TilingConfig {
    let rule = GeometricInflation::PenroseRobinson;
    rule.inflate(&rule.seed_wheel(), 5).unwrap().paired_rhombs().unwrap()
}

#[test]
fn rhombs_split_into_two_triangles() {
    let r = rhombs();
    let Structure::Tiling(t) = derive(DerivationRule::PenroseToRobinson, &Structure::Tiling(r.clone())).unwrap() else {
        unreachable!()
    };
    assert_eq!(t.family, TileFamily::Robinson);
    assert_eq!(t.len(), 2 * r.len());
    t.check_no_overlap().unwrap();
    assert_eq!(t.total_area2(), r.total_area2());
    let Structure::Tiling(back) = derive(DerivationRule::RobinsonToPenrose, &Structure::Tiling(t)).unwrap() else {
        unreachable!()
    };
    assert_eq!(back.sorted(), r.sorted());
    assert_eq!(DerivationRule::PenroseToRobinson.inverse(), Some(DerivationRule::RobinsonToPenrose));
}

#[test]
fn derivation_checks_input_and_consistency() {
    let r = rhombs();
    assert!(derive(DerivationRule::RobinsonToPenrose, &Structure::Tiling(r.clone())).unwrap_err().is_validation());
    // a mirror partner of the wrong kind on a shared base
    let t = Tile::triangle(0, r.tiles[0].a, r.tiles[0].b, r.tiles[0].c);
    let bad = Tile::triangle(1, t.far_apex(), t.b, t.c);
    let cfg = TilingConfig::new(TileFamily::Robinson, vec![t, bad]);
    let err = derive(DerivationRule::RobinsonToPenrose, &Structure::Tiling(cfg)).unwrap_err();
    assert!(matches!(err, Error::RuleInconsistency(_)));
}

#[test]
fn splitting_commutes_with_rotation() {
    let r = rhombs();
    let rot = Cyclo::unit_root(CycloOrder::Five, 1);
    let rotate = |cfg: &TilingConfig, rhomb: bool| {
        let tiles = cfg
            .tiles
            .iter()
            .map(|t| {
                let s = t.scale(rot);
                if rhomb {
                    Tile::rhomb(s.kind, s.a, s.b, s.c)
                } else {
                    s
                }
            })
            .collect();
        TilingConfig::new(cfg.family, tiles)
    };
    let split = |cfg: &TilingConfig| match derive(DerivationRule::PenroseToRobinson, &Structure::Tiling(cfg.clone())) {
        Ok(Structure::Tiling(t)) => t,
        _ => unreachable!(),
    };
    assert_eq!(split(&rotate(&r, true)).sorted(), rotate(&split(&r), false).sorted());
}

#[test]
fn ltm_of_square_lattice() {
    let z = Pattern::integer_lattice(Region::square(12.0)).unwrap();
    for r in [0.5, 1.5, 3.0] {
        let m = ltm_estimate(&z, r, None).unwrap();
        assert_eq!(m.rank, 2);
        assert_eq!(m.basis, vec![vec![1, 0], vec![0, 1]]);
    }
}

#[test]
fn ltm_of_fibonacci_chain() {
    let p = fibonacci(0.31, 0.0, 2e4);
    let mut prev: Option<Vec<Vec<i64>>> = None;
    for r in [1.0, 2.0, 5.0, 10.0] {
        let m = ltm_estimate(&p, r, None).unwrap();
        assert!(!m.degenerate);
        assert_eq!(m.rank, 2);
        // {1, τ} up to unimodular change: the HNF is the identity
        assert_eq!(m.basis, vec![vec![1, 0], vec![0, 1]]);
        if let Some(b) = prev {
            assert!(crate::algebra::is_submodule(&m.basis, &b));
        }
        prev = Some(m.basis);
    }
    // an LI-equivalent chain gives the same module
    let q = fibonacci(0.9, 0.0, 2e4);
    assert_eq!(ltm_estimate(&q, 10.0, None).unwrap().basis, prev.unwrap());
}

#[test]
fn ltm_of_sublattice_and_single_point() {
    let pts: Vec<[i64; 2]> = (-10..=10).flat_map(|i| (-10..=10).map(move |j| [2 * i, j])).collect();
    let p = Pattern::from_integer_points(&pts, Region::square(20.0)).unwrap();
    assert_eq!(ltm_estimate(&p, 2.5, None).unwrap().basis, vec![vec![2, 0], vec![0, 1]]);
    let one = Pattern::from_integer_points(&[[0, 0]], Region::square(5.0)).unwrap();
    let m = ltm_estimate(&one, 1.0, None).unwrap();
    assert!(m.degenerate);
    assert_eq!(m.rank, 0);
}

#[test]
fn atlas_records_export() {
    let z = Pattern::integer_lattice(Region::interval(-10.0, 10.0)).unwrap();
    let a = extract_atlas(&z, 1.5, None).unwrap();
    assert_eq!(a.to_records().trim(), "1.5;3;-1 0 0 0 0;0 0 0 0 0;1 0 0 0 0");
}
