//! Backward computation of LU bounds across one transition.
//!
//! A transition is split into a lower-guard stage followed by an
//! upper-guard-and-reset stage. For each stage, [`newbounds`] raises the
//! predecessor bounds just enough that the successor of the predecessor's
//! abstraction stays inside the successor's abstraction.

use crate::automaton::{AtomicGuard, Decomposed};
use crate::zone::{Bound, ClockSet, LuBounds, Weight, Zone};

/// Clocks whose `L` and `U` bounds changed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Changes {
    pub lower: ClockSet,
    pub upper: ClockSet,
}

impl Changes {
    pub fn new(dim: usize) -> Self {
        Changes { lower: ClockSet::with_capacity(dim), upper: ClockSet::with_capacity(dim) }
    }

    /// Every clock with a finite bound in `lu`.
    pub fn active(lu: &LuBounds) -> Self {
        let (lower, upper) = lu.active();
        Changes { lower, upper }
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_clear() && self.upper.is_clear()
    }

    pub fn union_with(&mut self, other: &Changes) {
        self.lower.union_with(&other.lower);
        self.upper.union_with(&other.upper);
    }
}

/// One stage of a decomposed transition.
#[derive(Clone, Copy, Debug)]
pub enum Stage<'a> {
    Copy,
    Lower(&'a [AtomicGuard]),
    Upper(&'a [AtomicGuard]),
    Reset(&'a [usize]),
    UpperReset(&'a [AtomicGuard], &'a [usize]),
}

impl<'a> Stage<'a> {
    pub fn lower_stage(d: &'a Decomposed) -> Stage<'a> {
        if d.lower.is_empty() {
            Stage::Copy
        } else {
            Stage::Lower(&d.lower)
        }
    }

    pub fn upper_stage(d: &'a Decomposed) -> Stage<'a> {
        match (d.upper.is_empty(), d.resets.is_empty()) {
            (true, true) => Stage::Copy,
            (false, true) => Stage::Upper(&d.upper),
            (true, false) => Stage::Reset(&d.resets),
            (false, false) => Stage::UpperReset(&d.upper, &d.resets),
        }
    }

    fn resets(&self) -> &'a [usize] {
        match *self {
            Stage::Reset(r) | Stage::UpperReset(_, r) => r,
            _ => &[],
        }
    }
}

/// Raises `target` for the stage `pre -> post`, given that the successor
/// bounds `succ` changed on `changed`. Returns the clocks whose bounds in
/// `target` grew.
pub fn newbounds(
    pre: &Zone,
    post: &Zone,
    stage: Stage<'_>,
    succ: &LuBounds,
    changed: &Changes,
    target: &mut LuBounds,
) -> Changes {
    let dim = pre.dim();
    let mut grown = Changes::new(dim);
    let resets = stage.resets();
    for x in changed.lower.ones() {
        if !resets.contains(&x) && target.raise_lower(x, succ.lower(x)) {
            grown.lower.insert(x);
        }
    }
    for x in changed.upper.ones() {
        if !resets.contains(&x) && target.raise_upper(x, succ.upper(x)) {
            grown.upper.insert(x);
        }
    }
    let mut take = |a: &AtomicGuard, target: &mut LuBounds| {
        let x = a.clock.index();
        let c = Bound::Finite(a.constant as i32);
        if a.rel.is_lower() {
            if target.raise_lower(x, c) {
                grown.lower.insert(x);
            }
        } else if target.raise_upper(x, c) {
            grown.upper.insert(x);
        }
    };
    match stage {
        Stage::Copy | Stage::Reset(_) => {}
        Stage::Lower(atoms) => {
            // x -> 0 edges that shrank, on clocks whose U' makes them visible
            let mut edges: Vec<usize> = changed
                .upper
                .ones()
                .filter(|&x| {
                    let Bound::Finite(u) = succ.upper(x) else { return false };
                    let zx0 = pre.get(x, 0);
                    zx0 >= Weight::weak(-u) && post.get(x, 0) < zx0
                })
                .collect();
            for a in atoms {
                if edges.is_empty() {
                    break;
                }
                let v = a.clock.index();
                let explains = |x: &usize| a.weight() + pre.get(*x, v) == post.get(*x, 0);
                if edges.iter().any(explains) {
                    take(a, target);
                    edges.retain(|x| !explains(x));
                }
            }
            debug_assert!(edges.is_empty(), "unexplained lower-bound edge");
        }
        Stage::Upper(atoms) => {
            let mut edges = Vec::new();
            let relevant = |x: usize, y: usize| {
                if x == y {
                    return false;
                }
                let (Bound::Finite(u), Bound::Finite(l)) = (succ.upper(x), succ.lower(y)) else { return false };
                let zx0 = pre.get(x, 0);
                let zp = post.get(x, y);
                zx0 >= Weight::weak(-u) && zp < pre.get(x, y) && zp + Weight::strict(-l) < zx0
            };
            for x in changed.upper.ones() {
                for y in 1..dim {
                    if relevant(x, y) {
                        edges.push((x, y));
                    }
                }
            }
            for y in changed.lower.ones() {
                for x in 1..dim {
                    if !changed.upper.contains(x) && relevant(x, y) {
                        edges.push((x, y));
                    }
                }
            }
            for a in atoms {
                if edges.is_empty() {
                    break;
                }
                let w = a.clock.index();
                let explains = |&(x, y): &(usize, usize)| a.weight() + pre.get(w, y) + pre.get(x, 0) == post.get(x, y);
                if edges.iter().any(explains) {
                    take(a, target);
                    edges.retain(|e| !explains(e));
                }
            }
            if !edges.is_empty() {
                debug_assert!(false, "unexplained diagonal edge");
                atoms.iter().for_each(|a| take(a, target));
            }
        }
        Stage::UpperReset(atoms, resets) => {
            let r = resets[0];
            let mut ys: Vec<usize> = changed
                .lower
                .ones()
                .filter(|y| !resets.contains(y))
                .filter(|&y| {
                    let Bound::Finite(l) = succ.lower(y) else { return false };
                    post.get(r, y) + Weight::strict(-l) < Weight::LE_ZERO
                })
                .collect();
            for a in atoms {
                if ys.is_empty() {
                    break;
                }
                let w = a.clock.index();
                let explains = |y: &usize| a.weight() + pre.get(w, *y) == post.get(r, *y);
                if ys.iter().any(explains) {
                    take(a, target);
                    ys.retain(|y| !explains(y));
                }
            }
            if !ys.is_empty() {
                debug_assert!(false, "unexplained reset edge");
                atoms.iter().for_each(|a| take(a, target));
            }
        }
    }
    grown
}

/// Zones around a transition: source `Z`, after the lower guard `Z'`, and
/// the successor `Z''`.
#[derive(Clone, Debug)]
pub struct StageZones {
    pub source: Zone,
    pub middle: Zone,
    pub target: Zone,
}

impl StageZones {
    /// `None` when the transition is disabled from `source`.
    pub fn compute(source: &Zone, d: &Decomposed) -> Option<StageZones> {
        let middle = source.clone().and_guard(&d.lower)?;
        let target = middle.post(&d.upper, &d.resets)?;
        Some(StageZones { source: source.clone(), middle, target })
    }
}

/// Bounds for the source of `d` induced by successor bounds `succ` that
/// changed on `changed`: the upper stage is processed first, then the lower
/// stage. The result is max-merged into `target`; returns the clocks that grew.
pub fn backward_lu(zones: &StageZones, d: &Decomposed, succ: &LuBounds, changed: &Changes, target: &mut LuBounds) -> Changes {
    let dim = succ.dim();
    let mut middle = LuBounds::new(dim);
    let mid_changed = newbounds(&zones.middle, &zones.target, Stage::upper_stage(d), succ, changed, &mut middle);
    if mid_changed.is_empty() {
        return Changes::new(dim);
    }
    newbounds(&zones.source, &zones.middle, Stage::lower_stage(d), &middle, &mid_changed, target)
}

/// Bounds that keep every disabled transition disabled from the abstraction
/// of `zone`. Also returns the chosen disabling atom per transition.
pub fn disabled_bounds<'a>(
    zone: &Zone,
    transitions: impl IntoIterator<Item = (usize, &'a Decomposed)>,
) -> (LuBounds, Vec<(usize, AtomicGuard)>) {
    let dim = zone.dim();
    let mut lu = LuBounds::new(dim);
    let mut chosen = Vec::new();
    for (t, d) in transitions {
        let Some(middle) = zone.clone().and_guard(&d.lower) else {
            debug_assert!(false, "lower guards cannot disable a time-elapsed zone");
            continue;
        };
        if middle.post(&d.upper, &[]).is_some() {
            continue;
        }
        let violated: Vec<&AtomicGuard> =
            d.upper.iter().filter(|a| middle.clone().constrain_atom(**a).is_none()).collect();
        let picks: Vec<AtomicGuard> = match violated.iter().min_by_key(|a| (a.constant, a.clock)) {
            Some(a) => vec![**a],
            None => d.upper.clone(),
        };
        for a in picks {
            let mut seed = LuBounds::new(dim);
            seed.raise_upper(a.clock.index(), Bound::Finite(a.constant as i32));
            let mut changed = Changes::new(dim);
            changed.upper.insert(a.clock.index());
            newbounds(zone, &middle, Stage::lower_stage(d), &seed, &changed, &mut lu);
            chosen.push((t, a));
        }
    }
    (lu, chosen)
}
