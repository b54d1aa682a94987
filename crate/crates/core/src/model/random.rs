use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automaton::{AtomicGuard, AutomatonBuilder, ClockId, Relation, StateId, TimedAutomaton};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomParams {
    pub states: u32,
    pub clocks: u32,
    pub transitions: u32,
    pub max_const: u32,
    pub accept_prob: f64,
    /// Probability that a state gets a one-atom upper-bound invariant.
    pub invariant_prob: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { states: 5, clocks: 3, transitions: 8, max_const: 5, accept_prob: 0.15, invariant_prob: 0.2 }
    }
}

const RELATIONS: [Relation; 5] = [Relation::Lt, Relation::Le, Relation::Eq, Relation::Ge, Relation::Gt];

/// A random automaton, deterministic in `seed`. Guards have at most two
/// atoms; resets are random subsets; state 0 is initial.
pub fn random_ta(seed: u64, p: &RandomParams) -> TimedAutomaton {
    assert!(p.states >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = AutomatonBuilder::new();
    let clocks: Vec<ClockId> = (1..=p.clocks).map(|i| b.clock(format!("c{i}"))).collect();
    let states: Vec<StateId> = (0..p.states).map(|i| b.state(format!("q{i}"))).collect();
    b.initial(states[0]);
    for &q in &states {
        if rng.gen_bool(p.accept_prob) {
            b.accepting(q);
        }
        if !clocks.is_empty() && rng.gen_bool(p.invariant_prob) {
            let x = *clocks.choose(&mut rng).unwrap();
            let rel = if rng.gen_bool(0.5) { Relation::Le } else { Relation::Lt };
            b.invariant(q, vec![AtomicGuard::new(x, rel, rng.gen_range(1..=p.max_const.max(1)))]);
        }
    }
    for _ in 0..p.transitions {
        let src = *states.choose(&mut rng).unwrap();
        let tgt = *states.choose(&mut rng).unwrap();
        let mut atoms = Vec::new();
        if !clocks.is_empty() {
            for _ in 0..rng.gen_range(0..=2) {
                let x = *clocks.choose(&mut rng).unwrap();
                let rel = *RELATIONS.choose(&mut rng).unwrap();
                atoms.push(AtomicGuard::new(x, rel, rng.gen_range(0..=p.max_const)));
            }
        }
        let resets = clocks.iter().copied().filter(|_| rng.gen_bool(0.3)).collect();
        b.transition(src, atoms, resets, tgt);
    }
    b.build().expect("random automaton is well formed")
}
