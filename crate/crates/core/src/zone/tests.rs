use proptest::prelude::*;

use super::*;
use crate::automaton::{AtomicGuard, ClockId, Relation};

fn atom(x: u32, rel: Relation, c: u32) -> AtomicGuard {
    AtomicGuard::new(ClockId(x), rel, c)
}

fn zone_of(dim: usize, atoms: &[AtomicGuard], diag: &[(usize, usize, Weight)]) -> Option<Zone> {
    let mut g = DistanceGraph::unbounded(dim);
    for a in atoms {
        g.add_atom(*a);
    }
    for &(x, y, w) in diag {
        g.tighten(x, y, w);
    }
    g.canonicalize()
}

fn lu(dim: usize, l: &[(usize, i32)], u: &[(usize, i32)]) -> LuBounds {
    let mut b = LuBounds::new(dim);
    for &(x, c) in l {
        b.raise_lower(x, Bound::Finite(c));
    }
    for &(x, c) in u {
        b.raise_upper(x, Bound::Finite(c));
    }
    b
}

/// Brute-force semantic membership in a raw graph.
fn graph_contains(g: &DistanceGraph, v: &Valuation) -> bool {
    (1..g.dim()).all(|x| v.num(x) >= 0)
        && (0..g.dim()).all(|x| {
            (0..g.dim()).all(|y| {
                let w = g.get(x, y);
                match w.constant() {
                    None => true,
                    Some(c) => {
                        let d = v.num(y) - v.num(x);
                        let c = c as i64 * v.denom();
                        d < c || (d == c && !w.is_strict())
                    }
                }
            })
        })
}

/// Every half-integer valuation with values in `0..=hi`.
fn grid(dim: usize, hi: i64) -> Vec<Valuation> {
    let mut out = Vec::new();
    let mut cur = vec![0i64; dim - 1];
    loop {
        out.push(Valuation::halves(&cur));
        let mut i = 0;
        while i < cur.len() {
            cur[i] += 1;
            if cur[i] <= 2 * hi {
                break;
            }
            cur[i] = 0;
            i += 1;
        }
        if i == cur.len() {
            return out;
        }
    }
}

#[test]
fn worked_example_canonical_edge() {
    // y - x <= -1, y < 2, x > 4 with x = 1, y = 2
    let z = zone_of(3, &[atom(2, Relation::Lt, 2), atom(1, Relation::Gt, 4)], &[(1, 2, Weight::weak(-1))]).unwrap();
    assert_eq!(z.get(1, 2), Weight::strict(-2));
}

#[test]
fn contradiction_is_empty() {
    assert!(zone_of(2, &[atom(1, Relation::Le, 1), atom(1, Relation::Ge, 2)], &[]).is_none());
    let a = zone_of(2, &[atom(1, Relation::Le, 1)], &[]).unwrap().graph();
    let b = zone_of(2, &[atom(1, Relation::Ge, 2)], &[]).unwrap().graph();
    assert!(min_graph(&a, &b).unwrap().canonicalize().is_none());
}

#[test]
fn min_graph_examples() {
    let z = zone_of(3, &[atom(1, Relation::Le, 3), atom(2, Relation::Gt, 1)], &[]).unwrap();
    let top = DistanceGraph::unbounded(3);
    assert_eq!(min_graph(&z.graph(), &top).unwrap().canonicalize().unwrap(), z);
    let a = zone_of(2, &[atom(1, Relation::Le, 3)], &[]).unwrap();
    let b = zone_of(2, &[atom(1, Relation::Le, 5)], &[]).unwrap();
    assert_eq!(min_graph(&a.graph(), &b.graph()).unwrap(), a.graph());
    assert_eq!(min_graph(&a.graph(), &DistanceGraph::unbounded(3)), Err(crate::error::ZoneError::DimensionMismatch(2, 3)));
}

#[test]
fn initial_zone_and_first_post() {
    let z0 = Zone::initial(4);
    for x in 1..4 {
        assert_eq!(z0.get(0, x), Weight::INFINITY);
        assert_eq!(z0.get(x, 0), Weight::LE_ZERO);
        for y in 1..4 {
            assert_eq!(z0.get(x, y), Weight::LE_ZERO);
        }
    }
    let z1 = z0.post(&[atom(1, Relation::Ge, 5)], &[]).unwrap();
    for x in 1..4 {
        assert_eq!(z1.get(x, 0), Weight::weak(-5));
        assert_eq!(z1.get(0, x), Weight::INFINITY);
    }
    assert_eq!(z0.post(&[], &[]).unwrap(), z0);
}

#[test]
fn guard_disabled_from_large_zone() {
    let z = Zone::initial(4).post(&[atom(3, Relation::Ge, 100)], &[]).unwrap();
    assert!(z.post(&[atom(3, Relation::Le, 2)], &[]).is_none());
    assert!(z.clone().constrain_atom(atom(1, Relation::Le, 2)).is_none());
    assert_eq!(z.clone().constrain_atom(atom(1, Relation::Ge, 3)), Some(z));
}

#[test]
fn reset_examples() {
    // x = y >= 5, reset x
    let z = Zone::initial(3).post(&[atom(1, Relation::Ge, 5)], &[]).unwrap();
    let r = z.clone().reset(&[1]);
    assert_eq!(r.get(0, 1), Weight::LE_ZERO);
    assert_eq!(r.get(1, 0), Weight::LE_ZERO);
    assert_eq!(r.get(2, 0), Weight::weak(-5));
    assert_eq!(r.get(1, 2), Weight::INFINITY);
    assert_eq!(r.get(2, 1), Weight::weak(-5));
    assert_eq!(z.clone().reset(&[]), z);
    assert_eq!(z.reset(&[1, 2]), Zone::origin(3));
}

#[test]
fn elapse_examples() {
    let z = zone_of(3, &[atom(1, Relation::Eq, 1), atom(2, Relation::Eq, 0)], &[]).unwrap();
    let e = z.elapse();
    // x - y = 1, y >= 0
    assert_eq!(e.get(2, 1), Weight::weak(1));
    assert_eq!(e.get(1, 2), Weight::weak(-1));
    assert_eq!(e.get(2, 0), Weight::LE_ZERO);
    assert_eq!(e.get(0, 2), Weight::INFINITY);
    assert_eq!(e.clone().elapse(), e);
}

#[test]
fn subset_examples() {
    let below = zone_of(3, &[], &[(1, 2, Weight::LE_ZERO)]).unwrap(); // y <= x
    let above = zone_of(3, &[], &[(2, 1, Weight::LE_ZERO)]).unwrap(); // x <= y
    assert!(!below.is_subset_of(&above));
    assert!(!above.is_subset_of(&below));
    let eq5 = zone_of(2, &[atom(1, Relation::Eq, 5)], &[]).unwrap();
    let ge5 = zone_of(2, &[atom(1, Relation::Ge, 5)], &[]).unwrap();
    assert!(eq5.is_subset_of(&ge5));
    assert!(zone_subset(&ge5, &ge5).unwrap());
    assert!(zone_subset(&ge5, &Zone::initial(3)).is_err());
}

#[test]
fn alu_subset_indistinguishable_zones() {
    // x <= y and x >= y with L = U = 1: each sees a point the other cannot simulate
    let below = zone_of(3, &[], &[(1, 2, Weight::LE_ZERO)]).unwrap();
    let above = zone_of(3, &[], &[(2, 1, Weight::LE_ZERO)]).unwrap();
    let b = lu(3, &[(1, 1), (2, 1)], &[(1, 1), (2, 1)]);
    assert!(!below.is_alu_subset_of(&above, &b));
    assert!(!above.is_alu_subset_of(&below, &b));
    let none = LuBounds::new(3);
    assert!(below.is_alu_subset_of(&above, &none));
    assert!(below.is_alu_subset_of(&below, &b));
}

#[test]
fn alu_subset_needs_reference_clock_row() {
    // {x >= 0} is not simulated by {x >= 5} when L = U = 10: the valuation x = 0
    // has no simulating partner. The witnessing pair is (x, 0).
    let z = Zone::initial(2);
    let zp = Zone::initial(2).post(&[atom(1, Relation::Ge, 5)], &[]).unwrap();
    let b = lu(2, &[(1, 10)], &[(1, 10)]);
    assert!(!z.is_alu_subset_of(&zp, &b));
    assert!(!alu_member(&Valuation::integers(&[0]), &zp, &b).unwrap());
    // with L = 3 every x > 3 simulates, but x = 0 still does not
    let b = lu(2, &[(1, 3)], &[(1, 10)]);
    assert!(!z.is_alu_subset_of(&zp, &b));
    // with U = -inf and L = 3: v' > v is always fine, so x = 0 is simulated by 5
    let b = lu(2, &[(1, 3)], &[]);
    assert!(z.is_alu_subset_of(&zp, &b));
}

#[test]
fn alu_subset_needs_reference_clock_column() {
    // Z = {x <= 2} (not time-elapsed) versus Z' = {x <= 1}, U = 5:
    // x = 2 needs a partner with x' >= 2 only when L < 2.
    let z = zone_of(2, &[atom(1, Relation::Le, 2)], &[]).unwrap();
    let zp = zone_of(2, &[atom(1, Relation::Le, 1)], &[]).unwrap();
    let b = lu(2, &[(1, 5)], &[(1, 5)]);
    assert!(!z.is_alu_subset_of(&zp, &b));
    let b = lu(2, &[(1, 0)], &[(1, 5)]);
    assert!(z.is_alu_subset_of(&zp, &b));
}

#[test]
fn dotted_region_member() {
    // Z: 2 <= x <= 4, y <= 1; L = (x:2, y:1), U = (x:3, y:1).
    // (5, 1/2) lies above Z in the x direction and is simulated by (4, 1/2).
    let z = zone_of(3, &[atom(1, Relation::Ge, 2), atom(1, Relation::Le, 4), atom(2, Relation::Le, 1)], &[]).unwrap();
    let b = lu(3, &[(1, 2), (2, 1)], &[(1, 3), (2, 1)]);
    let v = Valuation::halves(&[10, 1]);
    assert!(!z.contains(&v));
    assert!(alu_member(&v, &z, &b).unwrap());
    assert!(z.alu_contains(&v, &b));
    // below the zone on x is not simulated: (1, 1/2) needs x' <= 1 or x' > L_x
    let w = Valuation::halves(&[2, 1]);
    assert!(!alu_member(&w, &z, &b).unwrap());
}

#[test]
fn membership_trivia() {
    let z = zone_of(3, &[atom(1, Relation::Ge, 2)], &[(1, 2, Weight::weak(1))]).unwrap();
    let none = LuBounds::new(3);
    for v in grid(3, 4) {
        assert!(alu_member(&v, &z, &none).unwrap());
        if z.contains(&v) {
            assert!(alu_member(&v, &z, &lu(3, &[(1, 3)], &[(2, 3)])).unwrap());
        }
    }
}

#[test]
fn sample_point_lies_inside() {
    let z = zone_of(3, &[atom(1, Relation::Gt, 1), atom(1, Relation::Lt, 2)], &[(1, 2, Weight::strict(0))]).unwrap();
    let v = z.sample_point();
    assert!(z.contains(&v));
}

fn weight_strategy(max: i32) -> impl Strategy<Value = Weight> + Clone {
    (any::<bool>(), -max..=max).prop_map(|(s, c)| if s { Weight::strict(c) } else { Weight::weak(c) })
}

fn raw_graph_of_dim(dim: usize, max: i32) -> impl Strategy<Value = DistanceGraph> + Clone {
    proptest::collection::vec((0..dim, 0..dim, weight_strategy(max)), 0..8).prop_map(move |edges| {
        let mut g = DistanceGraph::unbounded(dim);
        for (x, y, w) in edges {
            if x != y {
                g.tighten(x, y, w);
            }
        }
        g
    })
}

fn raw_graph(max_dim: usize, max: i32) -> impl Strategy<Value = DistanceGraph> {
    (2..=max_dim).prop_flat_map(move |dim| raw_graph_of_dim(dim, max))
}

fn zone_strategy(max_dim: usize, max: i32) -> impl Strategy<Value = Zone> {
    (raw_graph(max_dim, max), any::<bool>()).prop_filter_map("empty", |(g, elapse)| {
        let z = g.canonicalize()?;
        Some(if elapse { z.elapse() } else { z })
    })
}

fn lu_strategy(dim: usize, max: i32) -> impl Strategy<Value = LuBounds> {
    let b = prop_oneof![1 => Just(Bound::NegInf), 3 => (0..=max).prop_map(Bound::Finite)];
    (proptest::collection::vec(b.clone(), dim - 1), proptest::collection::vec(b, dim - 1)).prop_map(|(l, u)| {
        let mut lo = vec![Bound::NegInf];
        lo.extend(l);
        let mut up = vec![Bound::NegInf];
        up.extend(u);
        LuBounds::from_vecs(lo, up)
    })
}

fn pair_with_lu(max: i32) -> impl Strategy<Value = (Zone, Zone, LuBounds)> {
    (2..=4usize).prop_flat_map(move |dim| {
        let z = raw_graph_of_dim(dim, max);
        (z.clone(), z, lu_strategy(dim, max)).prop_filter_map("empty", |(a, b, lu)| {
            Some((a.canonicalize()?.elapse(), b.canonicalize()?.elapse(), lu))
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_is_idempotent(z in zone_strategy(4, 6)) {
        prop_assert_eq!(z.graph().canonicalize(), Some(z.clone()));
        for x in 0..z.dim() {
            prop_assert_eq!(z.get(x, x), Weight::LE_ZERO);
            for y in 0..z.dim() {
                for k in 0..z.dim() {
                    prop_assert!(z.get(x, y) <= z.get(x, k) + z.get(k, y));
                }
            }
        }
    }

    #[test]
    fn canonical_preserves_semantics(g in raw_graph(4, 4)) {
        let dim = g.dim();
        let z = g.clone().canonicalize();
        for v in grid(dim, 5) {
            let inside = graph_contains(&g, &v);
            match &z {
                Some(z) => prop_assert_eq!(z.contains(&v), inside),
                None => prop_assert!(!inside),
            }
        }
    }

    #[test]
    fn incremental_constrain_matches_closure(z in zone_strategy(5, 6), x in 0usize..5, y in 0usize..5, w in weight_strategy(6)) {
        prop_assume!(x < z.dim() && y < z.dim() && x != y);
        let mut g = z.graph();
        g.tighten(x, y, w);
        prop_assert_eq!(z.clone().constrain(x, y, w), g.canonicalize());
    }

    #[test]
    fn post_is_time_elapsed(z in zone_strategy(4, 6), c in 0u32..6, r in 1usize..4) {
        prop_assume!(r < z.dim());
        if let Some(p) = z.post(&[atom(1, Relation::Ge, c)], &[r]) {
            for x in 1..p.dim() {
                prop_assert_eq!(p.get(0, x), Weight::INFINITY);
            }
            prop_assert_eq!(p.graph().canonicalize(), Some(p.clone()));
        }
    }

    #[test]
    fn split_post_matches_joint_post(z in zone_strategy(4, 6), lo in 0u32..6, up in 0u32..6, a in 1u32..4, b in 1u32..4, r in 1usize..4) {
        let z = z.elapse();
        prop_assume!((a as usize) < z.dim() && (b as usize) < z.dim() && r < z.dim());
        let low = atom(a, Relation::Ge, lo);
        let high = atom(b, Relation::Le, up);
        let joint = z.post(&[low, high], &[r]);
        let split = z.post(&[low], &[]).and_then(|m| m.post(&[high], &[r]));
        prop_assert_eq!(joint, split);
    }

    #[test]
    fn membership_agrees_with_fast_test((z, _, lu) in pair_with_lu(5)) {
        for v in grid(z.dim(), 6) {
            prop_assert_eq!(alu_member(&v, &z, &lu).unwrap(), z.alu_contains(&v, &lu), "{}", v);
        }
    }

    #[test]
    fn subset_implies_alu_subset((z, zp, lu) in pair_with_lu(6)) {
        if z.is_subset_of(&zp) {
            prop_assert!(z.is_alu_subset_of(&zp, &lu));
        }
        prop_assert!(z.is_alu_subset_of(&z, &lu));
        prop_assert!(z.is_alu_subset_of(&zp, &LuBounds::new(z.dim())));
    }

    #[test]
    fn smaller_bounds_coarser_abstraction((z, zp, lu) in pair_with_lu(6), drop in 1usize..4) {
        prop_assume!(drop < z.dim());
        let mut smaller = LuBounds::new(z.dim());
        for x in 1..z.dim() {
            if x != drop {
                smaller.raise_lower(x, lu.lower(x));
                smaller.raise_upper(x, lu.upper(x));
            }
        }
        if z.is_alu_subset_of(&zp, &lu) {
            prop_assert!(z.is_alu_subset_of(&zp, &smaller));
        }
    }

    #[test]
    fn alu_subset_sound_on_grid((z, zp, lu) in pair_with_lu(4)) {
        if z.is_alu_subset_of(&zp, &lu) {
            for v in grid(z.dim(), 6) {
                if z.contains(&v) {
                    prop_assert!(zp.alu_contains(&v, &lu));
                }
            }
        }
    }

    #[test]
    fn sample_point_in_zone(z in zone_strategy(5, 6)) {
        prop_assert!(z.contains(&z.sample_point()));
    }
}
