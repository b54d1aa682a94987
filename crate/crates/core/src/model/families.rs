use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::automaton::{AtomicGuard, AutomatonBuilder, ClockId, Relation, StateId, TimedAutomaton};

/// The three benchmark families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// C-step `k` guarded by `x_k == 1 && y_k == 1`.
    D,
    /// C-step `k` guarded by `x_k == 1 && y_k == 2`.
    DPrime,
    /// C-step `k` guarded by `0 < x_k <= 1 && 1 < y_k <= 2`.
    DDoublePrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub n: u32,
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family {
            Family::D => "D",
            Family::DPrime => "D'",
            Family::DDoublePrime => "D''",
        };
        write!(f, "{name}:{}", self.n)
    }
}

impl FromStr for FamilySpec {
    type Err = String;

    /// Accepts `D:7`, `D':5` / `Dprime:5`, `D'':7` / `Ddoubleprime:7`.
    fn from_str(s: &str) -> Result<Self, String> {
        let (name, n) = s.split_once(':').ok_or_else(|| format!("expected NAME:N, got `{s}`"))?;
        let family = match name.to_ascii_lowercase().as_str() {
            "d" => Family::D,
            "d'" | "dprime" => Family::DPrime,
            "d''" | "ddoubleprime" => Family::DDoublePrime,
            _ => return Err(format!("unknown family `{name}`")),
        };
        let n: u32 = n.parse().map_err(|_| format!("bad size `{n}`"))?;
        if n == 0 {
            return Err("family size must be at least 1".into());
        }
        Ok(FamilySpec { family, n })
    }
}

/// Name of the product state `(a_i, a_j, b_k)`.
pub fn family_state_name(i: u32, j: u32, k: u32) -> String {
    format!("a{i}_a{j}_b{k}")
}

/// Flat product of three components: A resets `x_1..x_n` in sequence, B
/// resets `y_1..y_n`, and C takes `n` guarded steps once A and B are done.
pub fn generate(spec: FamilySpec) -> TimedAutomaton {
    let n = spec.n;
    assert!(n >= 1, "family size must be at least 1");
    let mut b = AutomatonBuilder::new();
    let xs: Vec<ClockId> = (1..=n).map(|i| b.clock(format!("x{i}"))).collect();
    let ys: Vec<ClockId> = (1..=n).map(|i| b.clock(format!("y{i}"))).collect();
    let mut grid = vec![vec![StateId(0); n as usize + 1]; n as usize + 1];
    for (i, row) in grid.iter_mut().enumerate() {
        for (j, q) in row.iter_mut().enumerate() {
            *q = b.state(family_state_name(i as u32, j as u32, 0));
        }
    }
    let tail: Vec<StateId> = (1..=n).map(|k| b.state(family_state_name(n, n, k))).collect();
    b.initial(grid[0][0]);
    for i in 0..=n as usize {
        for j in 0..=n as usize {
            if i < n as usize {
                b.transition(grid[i][j], vec![], vec![xs[i]], grid[i + 1][j]);
            }
            if j < n as usize {
                b.transition(grid[i][j], vec![], vec![ys[j]], grid[i][j + 1]);
            }
        }
    }
    let mut from = grid[n as usize][n as usize];
    for k in 0..n as usize {
        let (x, y) = (xs[k], ys[k]);
        let guard = match spec.family {
            Family::D => vec![AtomicGuard::new(x, Relation::Eq, 1), AtomicGuard::new(y, Relation::Eq, 1)],
            Family::DPrime => vec![AtomicGuard::new(x, Relation::Eq, 1), AtomicGuard::new(y, Relation::Eq, 2)],
            Family::DDoublePrime => vec![
                AtomicGuard::new(x, Relation::Gt, 0),
                AtomicGuard::new(x, Relation::Le, 1),
                AtomicGuard::new(y, Relation::Gt, 1),
                AtomicGuard::new(y, Relation::Le, 2),
            ],
        };
        b.transition(from, guard, vec![], tail[k]);
        from = tail[k];
    }
    b.build().expect("generated family is well formed")
}
