use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Bound, LuBounds, Valuation, Weight};
use crate::automaton::AtomicGuard;
use crate::error::ZoneError;

/// A distance graph over clocks `0..dim`, stored row-major. Entry `(x, y)` is
/// the edge `x -> y` and encodes `y - x ~ c`. Not necessarily canonical.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DistanceGraph {
    dim: usize,
    m: Vec<Weight>,
}

impl DistanceGraph {
    /// The graph without constraints: every off-diagonal edge is infinite.
    pub fn unbounded(dim: usize) -> Self {
        assert!(dim >= 1);
        let mut m = vec![Weight::INFINITY; dim * dim];
        for x in 0..dim {
            m[x * dim + x] = Weight::LE_ZERO;
        }
        DistanceGraph { dim, m }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, x: usize, y: usize) -> Weight {
        self.m[x * self.dim + y]
    }

    pub fn set(&mut self, x: usize, y: usize, w: Weight) {
        self.m[x * self.dim + y] = w;
    }

    /// Lowers edge `x -> y` to `w` if that is tighter.
    pub fn tighten(&mut self, x: usize, y: usize, w: Weight) {
        let e = &mut self.m[x * self.dim + y];
        if w < *e {
            *e = w;
        }
    }

    pub fn add_atom(&mut self, a: AtomicGuard) {
        for (x, y, w) in a.edges() {
            self.tighten(x, y, w);
        }
    }

    /// Multiplies every finite constant by `k`.
    pub fn scaled(&self, k: i32) -> Result<DistanceGraph, ZoneError> {
        let m = self
            .m
            .iter()
            .map(|w| w.scale(k).ok_or(ZoneError::Overflow))
            .collect::<Result<_, _>>()?;
        Ok(DistanceGraph { dim: self.dim, m })
    }

    /// Shortest-path closure restricted to non-negative clock values.
    /// `None` when the graph has a negative cycle.
    pub fn canonicalize(mut self) -> Option<Zone> {
        let d = self.dim;
        for x in 1..d {
            self.tighten(x, 0, Weight::LE_ZERO);
        }
        for k in 0..d {
            for i in 0..d {
                let ik = self.m[i * d + k];
                if ik.is_infinite() {
                    continue;
                }
                for j in 0..d {
                    let s = ik + self.m[k * d + j];
                    if s < self.m[i * d + j] {
                        self.m[i * d + j] = s;
                    }
                }
            }
            if (0..d).any(|i| self.m[i * d + i] < Weight::LE_ZERO) {
                return None;
            }
        }
        Some(Zone { dim: d, m: self.m })
    }
}

/// Edgewise minimum of two graphs of the same dimension.
pub fn min_graph(a: &DistanceGraph, b: &DistanceGraph) -> Result<DistanceGraph, ZoneError> {
    if a.dim != b.dim {
        return Err(ZoneError::DimensionMismatch(a.dim, b.dim));
    }
    let m = a.m.iter().zip(&b.m).map(|(x, y)| *x.min(y)).collect();
    Ok(DistanceGraph { dim: a.dim, m })
}

/// A non-empty zone in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Zone {
    dim: usize,
    m: Vec<Weight>,
}

impl Zone {
    /// The single valuation where every clock is 0.
    pub fn origin(dim: usize) -> Self {
        Zone { dim, m: vec![Weight::LE_ZERO; dim * dim] }
    }

    /// `elapse(origin)`: all clocks equal and non-negative.
    pub fn initial(dim: usize) -> Self {
        Zone::origin(dim).elapse()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Weight {
        self.m[x * self.dim + y]
    }

    pub fn graph(&self) -> DistanceGraph {
        DistanceGraph { dim: self.dim, m: self.m.clone() }
    }

    /// Intersects with the single edge `x -> y` of weight `w`, keeping the
    /// result canonical in `O(dim^2)`.
    pub fn constrain(mut self, x: usize, y: usize, w: Weight) -> Option<Zone> {
        let d = self.dim;
        if w >= self.m[x * d + y] {
            return Some(self);
        }
        if w + self.m[y * d + x] < Weight::LE_ZERO {
            return None;
        }
        self.m[x * d + y] = w;
        let col_x: Vec<Weight> = (0..d).map(|i| self.m[i * d + x]).collect();
        let row_y: Vec<Weight> = self.m[y * d..(y + 1) * d].to_vec();
        for i in 0..d {
            if col_x[i].is_infinite() {
                continue;
            }
            let through = col_x[i] + w;
            for j in 0..d {
                if row_y[j].is_infinite() {
                    continue;
                }
                let s = through + row_y[j];
                let e = &mut self.m[i * d + j];
                if s < *e {
                    *e = s;
                }
            }
        }
        Some(self)
    }

    pub fn constrain_atom(self, a: AtomicGuard) -> Option<Zone> {
        a.edges().try_fold(self, |z, (x, y, w)| z.constrain(x, y, w))
    }

    pub fn and_guard<'a>(self, atoms: impl IntoIterator<Item = &'a AtomicGuard>) -> Option<Zone> {
        atoms.into_iter().try_fold(self, |z, a| z.constrain_atom(*a))
    }

    /// Sets every clock in `clocks` to 0.
    pub fn reset(mut self, clocks: &[usize]) -> Zone {
        let d = self.dim;
        for &r in clocks {
            for j in 0..d {
                self.m[r * d + j] = self.m[j];
                self.m[j * d + r] = self.m[j * d];
            }
            self.m[r * d + r] = Weight::LE_ZERO;
        }
        self
    }

    /// Removes the upper bounds on clocks.
    pub fn elapse(mut self) -> Zone {
        for x in 1..self.dim {
            self.m[x] = Weight::INFINITY;
        }
        self
    }

    /// `elapse(reset(Z /\ guard))`; `None` when the guard is unsatisfiable in `Z`.
    pub fn post<'a>(&self, guard: impl IntoIterator<Item = &'a AtomicGuard>, resets: &[usize]) -> Option<Zone> {
        Some(self.clone().and_guard(guard)?.reset(resets).elapse())
    }

    /// Plain inclusion. Both zones are canonical, so it is an entrywise test.
    ///
    /// # Panics
    /// On a dimension mismatch; see [`zone_subset`] for the checked form.
    pub fn is_subset_of(&self, other: &Zone) -> bool {
        assert_eq!(self.dim, other.dim, "zone dimension mismatch");
        self.m.iter().zip(&other.m).all(|(a, b)| a <= b)
    }

    /// `self ⊆ aLU(other)`, decided on the two canonical graphs in
    /// `O(dim^2)`. The reference clock uses `L_0 = U_0 = 0`.
    ///
    /// # Panics
    /// On a dimension mismatch; see [`alu_subset`] for the checked form.
    pub fn is_alu_subset_of(&self, other: &Zone, lu: &LuBounds) -> bool {
        assert_eq!(self.dim, other.dim, "zone dimension mismatch");
        assert_eq!(self.dim, lu.dim(), "bounds dimension mismatch");
        let d = self.dim;
        let bound0 = |b: Bound, x: usize| if x == 0 { Some(0) } else { b.finite() };
        for x in 0..d {
            let Some(u) = bound0(lu.upper(x), x) else { continue };
            let zx0 = self.get(x, 0);
            if zx0 < Weight::weak(-u) {
                continue;
            }
            for y in 0..d {
                if y == x {
                    continue;
                }
                let zp = other.get(x, y);
                if zp >= self.get(x, y) {
                    continue;
                }
                let Some(l) = bound0(lu.lower(y), y) else { continue };
                if zp + Weight::strict(-l) < zx0 {
                    return false;
                }
            }
        }
        true
    }

    pub fn contains(&self, v: &Valuation) -> bool {
        assert_eq!(v.dim(), self.dim);
        let den = v.denom();
        for x in 0..self.dim {
            for y in 0..self.dim {
                let w = self.get(x, y);
                let Some(c) = w.constant() else { continue };
                let diff = v.num(y) - v.num(x);
                let c = c as i64 * den;
                if diff > c || (diff == c && w.is_strict()) {
                    return false;
                }
            }
        }
        true
    }

    /// Membership of `v` in `aLU(self)` via the pairwise cycle criterion on
    /// the canonical graph, in `O(dim^2)`. Agrees with [`alu_member`].
    pub fn alu_contains(&self, v: &Valuation, lu: &LuBounds) -> bool {
        let d = self.dim;
        let den = v.denom();
        // hi[x]: weight of edge 0 -> x, as (value, strict)
        // lo[y]: weight magnitude of edge y -> 0
        let mut hi: Vec<Option<i64>> = vec![None; d];
        let mut lo: Vec<Option<(i64, bool)>> = vec![None; d];
        hi[0] = Some(0);
        lo[0] = Some((0, false));
        for x in 1..d {
            let n = v.num(x);
            if let Bound::Finite(u) = lu.upper(x) {
                if n <= u as i64 * den {
                    hi[x] = Some(n);
                }
            }
            if let Bound::Finite(l) = lu.lower(x) {
                let l = l as i64 * den;
                lo[x] = Some(if n <= l { (n, false) } else { (l, true) });
            }
        }
        for x in 0..d {
            let Some(h) = hi[x] else { continue };
            for y in 0..d {
                let Some((l, lstrict)) = lo[y] else { continue };
                let w = self.get(x, y);
                let Some(c) = w.constant() else { continue };
                let total = h + c as i64 * den - l;
                if total < 0 || (total == 0 && (lstrict || w.is_strict())) {
                    return false;
                }
            }
        }
        true
    }

    /// Multiplies every constant by `k`.
    pub fn scaled(&self, k: i32) -> Result<Zone, ZoneError> {
        let g = self.graph().scaled(k)?;
        Ok(Zone { dim: g.dim, m: g.m })
    }

    /// Some valuation in the zone, with denominator `2^(dim-1)`.
    pub fn sample_point(&self) -> Valuation {
        let mut z = self.clone();
        let mut denom: i64 = 1;
        let mut nums = vec![0i64; self.dim];
        for x in 1..self.dim {
            z = z.scaled(2).expect("constants fit after scaling");
            denom *= 2;
            let low = z.get(x, 0);
            let c = -low.constant().expect("lower bound is finite") as i64;
            let val = if low.is_strict() { c + 1 } else { c };
            let w = i32::try_from(val).expect("value fits");
            z = z
                .constrain(0, x, Weight::weak(w))
                .and_then(|z| z.constrain(x, 0, Weight::weak(-w)))
                .expect("chosen value lies inside the zone");
            nums[x] = val;
        }
        for x in 1..self.dim {
            nums[x] = z.get(0, x).constant().expect("fixed") as i64;
        }
        Valuation::new(denom, nums)
    }
}

/// `[z1] ⊆ [z2]`.
pub fn zone_subset(z1: &Zone, z2: &Zone) -> Result<bool, ZoneError> {
    if z1.dim != z2.dim {
        return Err(ZoneError::DimensionMismatch(z1.dim, z2.dim));
    }
    Ok(z1.is_subset_of(z2))
}

/// `[z] ⊆ aLU([z_prime])`.
pub fn alu_subset(z: &Zone, z_prime: &Zone, lu: &LuBounds) -> Result<bool, ZoneError> {
    if z.dim != z_prime.dim {
        return Err(ZoneError::DimensionMismatch(z.dim, z_prime.dim));
    }
    if z.dim != lu.dim() {
        return Err(ZoneError::DimensionMismatch(z.dim, lu.dim()));
    }
    Ok(z.is_alu_subset_of(z_prime, lu))
}

/// `v ∈ aLU([z])`: `v` is simulated by some `v' ∈ z`. Decided by adding the
/// simulation constraints to `z` and canonicalizing.
pub fn alu_member(v: &Valuation, z: &Zone, lu: &LuBounds) -> Result<bool, ZoneError> {
    if v.dim() != z.dim || lu.dim() != z.dim {
        return Err(ZoneError::DimensionMismatch(v.dim(), z.dim));
    }
    let den = i32::try_from(v.denom()).map_err(|_| ZoneError::Overflow)?;
    let mut g = z.graph().scaled(den)?;
    let fits = |n: i64| i32::try_from(n).map_err(|_| ZoneError::Overflow);
    for x in 1..z.dim {
        let n = fits(v.num(x))?;
        if let Bound::Finite(u) = lu.upper(x) {
            if v.num(x) <= u as i64 * den as i64 {
                g.tighten(0, x, Weight::weak(n));
            }
        }
        if let Bound::Finite(l) = lu.lower(x) {
            if v.num(x) <= l as i64 * den as i64 {
                g.tighten(x, 0, Weight::weak(-n));
            } else {
                g.tighten(x, 0, Weight::strict(-fits(l as i64 * den as i64)?));
            }
        }
    }
    Ok(g.canonicalize().is_some())
}

impl fmt::Debug for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Zone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_constraints(f, self.dim, |x, y| self.get(x, y))
    }
}

impl fmt::Debug for DistanceGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_constraints(f, self.dim, |x, y| self.get(x, y))
    }
}

fn write_constraints(f: &mut fmt::Formatter<'_>, dim: usize, get: impl Fn(usize, usize) -> Weight) -> fmt::Result {
    let name = |x: usize| if x == 0 { "0".to_string() } else { format!("x{x}") };
    let mut parts = Vec::new();
    for x in 0..dim {
        for y in 0..dim {
            let w = get(x, y);
            if x == y || w.is_infinite() {
                continue;
            }
            let op = if w.is_strict() { "<" } else { "<=" };
            let c = w.constant().unwrap();
            let lhs = match (x, y) {
                (0, _) => name(y),
                (_, 0) => format!("-{}", name(x)),
                _ => format!("{}-{}", name(y), name(x)),
            };
            parts.push(format!("{lhs}{op}{c}"));
        }
    }
    write!(f, "{{{}}}", parts.join(", "))
}
