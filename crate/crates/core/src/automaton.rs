//! Timed automata: clocks, guards, transitions and the static bound analysis.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::zone::{Bound, LuBounds, Strictness, Weight};

/// Clock index. Index 0 is reserved for the reference clock, so real clocks
/// are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClockId(pub u32);

impl ClockId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "==",
            Relation::Ge => ">=",
            Relation::Gt => ">",
        }
    }

    pub fn is_upper(self) -> bool {
        matches!(self, Relation::Lt | Relation::Le)
    }

    pub fn is_lower(self) -> bool {
        matches!(self, Relation::Gt | Relation::Ge)
    }
}

/// `x ~ c` with `c >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AtomicGuard {
    pub clock: ClockId,
    pub rel: Relation,
    pub constant: u32,
}

impl AtomicGuard {
    pub fn new(clock: ClockId, rel: Relation, constant: u32) -> Self {
        AtomicGuard { clock, rel, constant }
    }

    /// Splits an equality into its two bounds; other atoms come back unchanged.
    pub fn expand(self) -> impl Iterator<Item = AtomicGuard> {
        let (a, b) = match self.rel {
            Relation::Eq => (
                AtomicGuard { rel: Relation::Ge, ..self },
                Some(AtomicGuard { rel: Relation::Le, ..self }),
            ),
            _ => (self, None),
        };
        std::iter::once(a).chain(b)
    }

    /// Distance-graph edges `(from, to, weight)` encoding the atom.
    pub fn edges(self) -> impl Iterator<Item = (usize, usize, Weight)> {
        let x = self.clock.index();
        let c = self.constant as i32;
        let (up, low) = match self.rel {
            Relation::Lt => (Some(Weight::strict(c)), None),
            Relation::Le => (Some(Weight::weak(c)), None),
            Relation::Eq => (Some(Weight::weak(c)), Some(Weight::weak(-c))),
            Relation::Ge => (None, Some(Weight::weak(-c))),
            Relation::Gt => (None, Some(Weight::strict(-c))),
        };
        up.map(|w| (0, x, w))
            .into_iter()
            .chain(low.map(|w| (x, 0, w)))
    }

    /// Evaluates the atom at a clock value given as `num / denom`.
    pub fn holds(self, num: i64, denom: i64) -> bool {
        let c = self.constant as i64 * denom;
        match self.rel {
            Relation::Lt => num < c,
            Relation::Le => num <= c,
            Relation::Eq => num == c,
            Relation::Ge => num >= c,
            Relation::Gt => num > c,
        }
    }
}

/// Conjunction of atomic guards. The empty conjunction is `true`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Guard {
    pub atoms: Vec<AtomicGuard>,
}

/// Shape of a guard after equalities are expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuardKind {
    True,
    Lower,
    Upper,
    Mixed,
}

impl Guard {
    pub fn new(atoms: Vec<AtomicGuard>) -> Self {
        Guard { atoms }
    }

    pub fn is_true(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn expanded(&self) -> impl Iterator<Item = AtomicGuard> + '_ {
        self.atoms.iter().flat_map(|a| a.expand())
    }

    pub fn classify(&self) -> GuardKind {
        let (mut low, mut up) = (false, false);
        for a in self.expanded() {
            low |= a.rel.is_lower();
            up |= a.rel.is_upper();
        }
        match (low, up) {
            (false, false) => GuardKind::True,
            (true, false) => GuardKind::Lower,
            (false, true) => GuardKind::Upper,
            (true, true) => GuardKind::Mixed,
        }
    }

    pub fn max_constant(&self) -> u32 {
        self.atoms.iter().map(|a| a.constant).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub source: StateId,
    pub guard: Guard,
    pub resets: Vec<ClockId>,
    pub target: StateId,
}

/// A transition split into `g_lower`, then `g_upper` together with the reset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposed {
    /// Lower atoms (`x > c`, `x >= c`), sorted by increasing constant.
    pub lower: Vec<AtomicGuard>,
    /// Upper atoms (`x < c`, `x <= c`), sorted by increasing constant.
    pub upper: Vec<AtomicGuard>,
    /// Reset clock indices, sorted and deduplicated.
    pub resets: Vec<usize>,
}

pub fn decompose(t: &Transition) -> Decomposed {
    let mut lower: Vec<_> = t.guard.expanded().filter(|a| a.rel.is_lower()).collect();
    let mut upper: Vec<_> = t.guard.expanded().filter(|a| a.rel.is_upper()).collect();
    let key = |a: &AtomicGuard| (a.constant, a.clock, a.rel == Relation::Le || a.rel == Relation::Ge);
    lower.sort_by_key(key);
    upper.sort_by_key(key);
    lower.dedup();
    upper.dedup();
    let mut resets: Vec<usize> = t.resets.iter().map(|c| c.index()).collect();
    resets.sort_unstable();
    resets.dedup();
    Decomposed { lower, upper, resets }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedAutomaton {
    clock_names: Vec<String>,
    state_names: Vec<String>,
    initial: StateId,
    accepting: Vec<bool>,
    invariants: Vec<Guard>,
    transitions: Vec<Transition>,
    #[serde(skip)]
    outgoing: Vec<Vec<usize>>,
}

impl TimedAutomaton {
    /// Number of real clocks `k`; zones have dimension `k + 1`.
    pub fn clock_count(&self) -> usize {
        self.clock_names.len()
    }

    pub fn dim(&self) -> usize {
        self.clock_count() + 1
    }

    pub fn state_count(&self) -> usize {
        self.state_names.len()
    }

    pub fn clock_name(&self, c: ClockId) -> &str {
        &self.clock_names[c.index() - 1]
    }

    pub fn clock_names(&self) -> &[String] {
        &self.clock_names
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.state_names[q.index()]
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q.index()]
    }

    pub fn invariant(&self, q: StateId) -> &Guard {
        &self.invariants[q.index()]
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, i: usize) -> &Transition {
        &self.transitions[i]
    }

    /// Indices of the transitions leaving `q`, in declaration order.
    pub fn outgoing(&self, q: StateId) -> &[usize] {
        &self.outgoing[q.index()]
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.state_names.len() as u32).map(StateId)
    }

    pub fn has_invariants(&self) -> bool {
        self.invariants.iter().any(|g| !g.is_true())
    }

    /// Largest constant in any guard or invariant.
    pub fn max_constant(&self) -> u32 {
        self.transitions
            .iter()
            .map(|t| t.guard.max_constant())
            .chain(self.invariants.iter().map(|g| g.max_constant()))
            .max()
            .unwrap_or(0)
    }

    /// Rebuilds an automaton from its parts, re-running validation.
    pub fn from_parts(
        clock_names: Vec<String>,
        state_names: Vec<String>,
        initial: StateId,
        accepting: Vec<bool>,
        invariants: Vec<Guard>,
        transitions: Vec<Transition>,
    ) -> Result<Self, ModelError> {
        let mut ta = TimedAutomaton {
            clock_names,
            state_names,
            initial,
            accepting,
            invariants,
            transitions,
            outgoing: Vec::new(),
        };
        ta.validate()?;
        ta.index_outgoing();
        Ok(ta)
    }

    fn index_outgoing(&mut self) {
        self.outgoing = vec![Vec::new(); self.state_names.len()];
        for (i, t) in self.transitions.iter().enumerate() {
            self.outgoing[t.source.index()].push(i);
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        let n = self.state_names.len();
        let k = self.clock_names.len() as u32;
        if n == 0 {
            return Err(ModelError::NoStates);
        }
        if self.accepting.len() != n || self.invariants.len() != n {
            return Err(ModelError::Inconsistent("per-state tables do not match state count".into()));
        }
        if self.initial.index() >= n {
            return Err(ModelError::UnknownState(self.initial.0.to_string()));
        }
        let check_clock = |c: ClockId| {
            if c.0 == 0 || c.0 > k {
                Err(ModelError::UnknownClock(c.0.to_string()))
            } else {
                Ok(())
            }
        };
        for (q, inv) in self.invariants.iter().enumerate() {
            for a in &inv.atoms {
                check_clock(a.clock)?;
                if !a.rel.is_upper() {
                    return Err(ModelError::InvalidInvariant {
                        state: self.state_names[q].clone(),
                        atom: format!("{}{}{}", self.clock_names[a.clock.index() - 1], a.rel.symbol(), a.constant),
                    });
                }
            }
        }
        for t in &self.transitions {
            for q in [t.source, t.target] {
                if q.index() >= n {
                    return Err(ModelError::UnknownState(q.0.to_string()));
                }
            }
            for a in &t.guard.atoms {
                check_clock(a.clock)?;
            }
            for &r in &t.resets {
                check_clock(r)?;
            }
        }
        for a in self.transitions.iter().flat_map(|t| &t.guard.atoms) {
            if a.constant > crate::zone::MAX_CONSTANT as u32 / 4 {
                return Err(ModelError::ConstantTooLarge(a.constant));
            }
        }
        Ok(())
    }
}

/// Incremental construction of a [`TimedAutomaton`].
#[derive(Clone, Debug, Default)]
pub struct AutomatonBuilder {
    clocks: Vec<String>,
    states: Vec<String>,
    initial: Option<StateId>,
    accepting: Vec<bool>,
    invariants: Vec<Guard>,
    transitions: Vec<Transition>,
}

impl AutomatonBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clock(&mut self, name: impl Into<String>) -> ClockId {
        self.clocks.push(name.into());
        ClockId(self.clocks.len() as u32)
    }

    pub fn state(&mut self, name: impl Into<String>) -> StateId {
        self.states.push(name.into());
        self.accepting.push(false);
        self.invariants.push(Guard::default());
        StateId(self.states.len() as u32 - 1)
    }

    pub fn initial(&mut self, q: StateId) -> &mut Self {
        self.initial = Some(q);
        self
    }

    pub fn accepting(&mut self, q: StateId) -> &mut Self {
        self.accepting[q.index()] = true;
        self
    }

    pub fn invariant(&mut self, q: StateId, atoms: Vec<AtomicGuard>) -> &mut Self {
        self.invariants[q.index()] = Guard::new(atoms);
        self
    }

    pub fn transition(
        &mut self,
        source: StateId,
        atoms: Vec<AtomicGuard>,
        resets: Vec<ClockId>,
        target: StateId,
    ) -> &mut Self {
        self.transitions.push(Transition { source, guard: Guard::new(atoms), resets, target });
        self
    }

    pub fn clock_id(&self, name: &str) -> Option<ClockId> {
        self.clocks.iter().position(|c| c == name).map(|i| ClockId(i as u32 + 1))
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(|i| StateId(i as u32))
    }

    pub fn build(self) -> Result<TimedAutomaton, ModelError> {
        let initial = self.initial.ok_or(ModelError::NoInitialState)?;
        TimedAutomaton::from_parts(self.clocks, self.states, initial, self.accepting, self.invariants, self.transitions)
    }
}

/// Moves invariants onto transitions: each guard gains the source invariant
/// and the target invariant atoms on clocks that are not reset. The result
/// has no invariants and the same reachable states.
pub fn fold_invariants(ta: &TimedAutomaton) -> TimedAutomaton {
    if !ta.has_invariants() {
        return ta.clone();
    }
    let transitions = ta
        .transitions
        .iter()
        .map(|t| {
            let mut atoms = t.guard.atoms.clone();
            atoms.extend(ta.invariant(t.source).atoms.iter().copied());
            atoms.extend(
                ta.invariant(t.target)
                    .atoms
                    .iter()
                    .filter(|a| !t.resets.contains(&a.clock))
                    .copied(),
            );
            let mut seen = Vec::with_capacity(atoms.len());
            for a in atoms {
                if !seen.contains(&a) {
                    seen.push(a);
                }
            }
            Transition { guard: Guard::new(seen), ..t.clone() }
        })
        .collect();
    let mut folded = TimedAutomaton {
        invariants: vec![Guard::default(); ta.state_count()],
        transitions,
        ..ta.clone()
    };
    folded.index_outgoing();
    folded
}

/// Static LU bounds for every state: the least solution of
/// `L_x(q) >= c` for each lower atom `x > c`/`x >= c` on an edge leaving `q`,
/// and `L_x(q) >= L_x(q')` for each edge `q -> q'` not resetting `x`;
/// likewise for `U` with upper atoms.
pub fn static_bounds(ta: &TimedAutomaton) -> Vec<LuBounds> {
    let dim = ta.dim();
    let mut table = vec![LuBounds::new(dim); ta.state_count()];
    for t in &ta.transitions {
        let lu = &mut table[t.source.index()];
        for a in t.guard.expanded() {
            let c = Bound::Finite(a.constant as i32);
            if a.rel.is_lower() {
                lu.raise_lower(a.clock.index(), c);
            } else {
                lu.raise_upper(a.clock.index(), c);
            }
        }
    }
    loop {
        let mut changed = false;
        for t in &ta.transitions {
            if t.source == t.target {
                continue;
            }
            let succ = table[t.target.index()].clone();
            let lu = &mut table[t.source.index()];
            for x in 1..dim {
                if t.resets.iter().any(|r| r.index() == x) {
                    continue;
                }
                changed |= lu.raise_lower(x, succ.lower(x));
                changed |= lu.raise_upper(x, succ.upper(x));
            }
        }
        if !changed {
            return table;
        }
    }
}

impl fmt::Display for AtomicGuard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}{}{}", self.clock.0, self.rel.symbol(), self.constant)
    }
}

impl AtomicGuard {
    /// The atom's single distance-graph edge weight. Only meaningful for
    /// non-equality atoms.
    pub fn weight(self) -> Weight {
        let c = self.constant as i32;
        match self.rel {
            Relation::Lt => Weight::new(Strictness::Strict, c),
            Relation::Le | Relation::Eq => Weight::new(Strictness::Weak, c),
            Relation::Ge => Weight::new(Strictness::Weak, -c),
            Relation::Gt => Weight::new(Strictness::Strict, -c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(x: u32, rel: Relation, c: u32) -> AtomicGuard {
        AtomicGuard::new(ClockId(x), rel, c)
    }

    fn sample() -> TimedAutomaton {
        let mut b = AutomatonBuilder::new();
        let x = b.clock("x");
        let y = b.clock("y");
        let q0 = b.state("q0");
        let q1 = b.state("q1");
        let q2 = b.state("q2");
        b.initial(q0);
        b.invariant(q1, vec![atom(1, Relation::Le, 3)]);
        b.transition(q0, vec![atom(1, Relation::Ge, 5), atom(2, Relation::Lt, 2)], vec![y], q1);
        b.transition(q1, vec![atom(2, Relation::Eq, 1)], vec![x], q2);
        b.transition(q2, vec![], vec![], q0);
        let _ = x;
        b.build().unwrap()
    }

    #[test]
    fn expand_equality() {
        let parts: Vec<_> = atom(1, Relation::Eq, 4).expand().collect();
        assert_eq!(parts, vec![atom(1, Relation::Ge, 4), atom(1, Relation::Le, 4)]);
        let edges: Vec<_> = atom(1, Relation::Eq, 4).edges().collect();
        assert_eq!(edges, vec![(0, 1, Weight::weak(4)), (1, 0, Weight::weak(-4))]);
    }

    #[test]
    fn classification() {
        assert_eq!(Guard::default().classify(), GuardKind::True);
        assert_eq!(Guard::new(vec![atom(1, Relation::Gt, 1)]).classify(), GuardKind::Lower);
        assert_eq!(Guard::new(vec![atom(1, Relation::Lt, 1)]).classify(), GuardKind::Upper);
        assert_eq!(Guard::new(vec![atom(1, Relation::Eq, 1)]).classify(), GuardKind::Mixed);
    }

    #[test]
    fn decompose_sorts_and_splits() {
        let t = Transition {
            source: StateId(0),
            guard: Guard::new(vec![atom(2, Relation::Lt, 7), atom(1, Relation::Eq, 3), atom(2, Relation::Ge, 1)]),
            resets: vec![ClockId(2), ClockId(1), ClockId(2)],
            target: StateId(0),
        };
        let d = decompose(&t);
        assert_eq!(d.lower, vec![atom(2, Relation::Ge, 1), atom(1, Relation::Ge, 3)]);
        assert_eq!(d.upper, vec![atom(1, Relation::Le, 3), atom(2, Relation::Lt, 7)]);
        assert_eq!(d.resets, vec![1, 2]);
    }

    #[test]
    fn invariant_must_be_upper() {
        let mut b = AutomatonBuilder::new();
        let x = b.clock("x");
        let q = b.state("q");
        b.initial(q).invariant(q, vec![AtomicGuard::new(x, Relation::Ge, 1)]);
        assert!(matches!(b.build(), Err(ModelError::InvalidInvariant { .. })));
    }

    #[test]
    fn missing_initial_is_rejected() {
        let mut b = AutomatonBuilder::new();
        b.state("q");
        assert!(matches!(b.build(), Err(ModelError::NoInitialState)));
    }

    #[test]
    fn fold_moves_invariants() {
        let ta = sample();
        let folded = fold_invariants(&ta);
        assert!(!folded.has_invariants());
        // into q1 without resetting x: gains x<=3
        assert!(folded.transition(0).guard.atoms.contains(&atom(1, Relation::Le, 3)));
        // out of q1: gains the source invariant
        assert!(folded.transition(1).guard.atoms.contains(&atom(1, Relation::Le, 3)));
        assert!(folded.transition(2).guard.is_true());
        assert_eq!(fold_invariants(&folded), folded);
    }

    #[test]
    fn static_bounds_fixpoint() {
        let ta = fold_invariants(&sample());
        let sb = static_bounds(&ta);
        let (x, y) = (1, 2);
        // q0: x>=5, y<2, and x<=3 from q1's invariant; y is reset towards q1
        assert_eq!(sb[0].lower(x), Bound::Finite(5));
        assert_eq!(sb[0].upper(x), Bound::Finite(3));
        assert_eq!(sb[0].upper(y), Bound::Finite(2));
        assert_eq!(sb[0].lower(y), Bound::NegInf);
        // q1: y==1 and x<=3 locally; q2 passes on q0's bound on y
        assert_eq!(sb[1].lower(y), Bound::Finite(1));
        assert_eq!(sb[1].upper(y), Bound::Finite(2));
        assert_eq!(sb[1].upper(x), Bound::Finite(3));
        assert_eq!(sb[1].lower(x), Bound::NegInf);
        // q2 inherits everything from q0
        assert_eq!(sb[2], sb[0]);
    }
}
