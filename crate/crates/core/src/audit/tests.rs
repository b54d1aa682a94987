use super::*;
use crate::model::{generate, parse, random_ta, Family, FamilySpec, RandomParams};
use crate::reach::{run, Mode, NodeStatus, RunConfig, SearchOrder};
use crate::zone::Bound;

const A2: &str = "
clocks x y z w;
state q0 init; state q1; state q2; state q3; state q4 accepting;
trans q0 -> q1 [x >= 5];
trans q1 -> q2 [y >= 5];
trans q2 -> q3 [z >= 100];
trans q3 -> q4 [w <= 2];
";

fn lazy(ta: &TimedAutomaton) -> Run {
    run(ta, &RunConfig::new(Mode::LazyDisabled, SearchOrder::Bfs)).unwrap()
}

#[test]
fn clean_runs_pass() {
    let ta = generate(FamilySpec { family: Family::D, n: 2 });
    for mode in Mode::ALL {
        let r = run(&ta, &RunConfig::new(mode, SearchOrder::Dfs)).unwrap();
        let rep = audit_asg(&r);
        assert!(rep.is_clean(), "{mode}: {rep}");
        assert_eq!(rep.i2, I2Status::Pass);
        assert!(rep.i1_exact);
    }
}

#[test]
fn large_instances_skip_i2() {
    let ta = parse(A2).unwrap();
    let rep = audit_asg(&lazy(&ta));
    assert!(rep.is_clean(), "{rep}");
    assert_eq!(rep.i2, I2Status::SampledSkip);
}

#[test]
fn coverer_with_larger_bounds_breaks_i3() {
    let ta = generate(FamilySpec { family: Family::D, n: 2 });
    let mut r = lazy(&ta);
    let v = r.graph.tentative().next().expect("some covered node").id;
    let c = r.graph.node(v).covered_by().unwrap();
    r.graph.nodes[c].lu.raise_upper(1, Bound::Finite(0));
    let rep = audit_asg(&r);
    assert!(rep.count(Check::I3) >= 1, "{rep}");
}

#[test]
fn deleted_child_breaks_g2() {
    let ta = parse(A2).unwrap();
    let mut r = lazy(&ta);
    let q2 = r.graph.live().find(|n| n.state.0 == 2).unwrap().id;
    r.graph.nodes[q2].status = NodeStatus::Removed;
    let rep = audit_asg(&r);
    assert!(rep.count(Check::G2) >= 1, "{rep}");
}

#[test]
fn missing_disabling_bound_breaks_i1() {
    let ta = parse("clocks x; state a init; state b accepting; trans a -> a [x >= 3] {x}; trans a -> b [x < 0];").unwrap();
    let mut r = lazy(&ta);
    assert!(audit_asg(&r).is_clean());
    let root = r.graph.root;
    r.graph.nodes[root].lu = crate::zone::LuBounds::new(2);
    let rep = audit_asg(&r);
    assert!(rep.count(Check::I1) >= 1, "{rep}");
}

#[test]
fn bounds_above_static_break_dom() {
    let ta = parse(A2).unwrap();
    let mut r = lazy(&ta);
    r.graph.nodes[0].lu.raise_lower(2, Bound::Finite(500));
    assert!(audit_asg(&r).count(Check::Dom) >= 1);
}

#[test]
fn shrunken_i2_violation_is_detected() {
    // lowering the child's bound below what the edge needs breaks I2
    let ta = parse("clocks x y; state a init; state b; state c accepting; trans a -> b [x >= 2]; trans b -> c [y <= 1];").unwrap();
    let mut r = lazy(&ta);
    let rep = audit_asg(&r);
    assert!(rep.is_clean(), "{rep}");
    let root = r.graph.root;
    assert_eq!(r.graph.nodes[root].lu.lower(1), Bound::Finite(2));
    r.graph.nodes[root].lu = crate::zone::LuBounds::new(3);
    let rep = audit_asg(&r);
    assert!(rep.count(Check::I2) >= 1, "{rep}");
}

#[test]
fn random_runs_audit_clean() {
    let p = RandomParams::default();
    for seed in 0..40 {
        let ta = random_ta(seed, &p);
        let c = cross_check(&ta, true, None);
        assert!(c.is_clean(), "seed {seed}: {c:#?}");
    }
}
