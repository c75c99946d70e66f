//! Elements and subgroups of O(2).
//!
//! Every element is written `g = r_θ s` with `θ ∈ [0, 2π)` and `s ∈ {+1, −1}`.
//! Subgroups with reflections carry an axis `β`; the element `(θ, −1)` of such a
//! group acts on the plane as `ψ(θ) · ψ(2β) ξ(−1)`, i.e. the flip is taken over
//! the axis `β` before rotating.

use std::f64::consts::{PI, TAU};
use std::fmt;

use nalgebra::Matrix2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Angles closer than this to `2π` wrap to zero after reduction.
const WRAP_EPS: f64 = 1e-13;
/// Tolerance used when deciding membership of an angle in a finite rotation set.
const MEMBER_EPS: f64 = 1e-9;

/// `(cos a, sin a)`, exact at integer multiples of `π/2`.
///
/// Grid symmetries (quarter turns, axis flips) then produce matrices with
/// entries exactly in `{−1, 0, 1}`, which keeps the discrete transforms of
/// feature fields bit-exact.
pub fn cos_sin(a: f64) -> (f64, f64) {
    let q = a / (PI / 2.0);
    let r = q.round();
    if (q - r).abs() < 1e-12 {
        match (r as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        (a.cos(), a.sin())
    }
}

/// The rotation matrix `ψ(θ)`.
pub fn rot2(theta: f64) -> Matrix2<f64> {
    let (c, s) = cos_sin(theta);
    Matrix2::new(c, -s, s, c)
}

/// The reflection matrix `ξ(s) = diag(1, s)`.
pub fn flip2(s: i8) -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, 0.0, f64::from(s))
}

/// Reduces an angle into `[0, 2π)`.
pub fn canonical_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if TAU - r < WRAP_EPS {
        0.0
    } else {
        r
    }
}

/// An element `r_θ s` of O(2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    theta: f64,
    s: i8,
}

impl GroupElement {
    /// Builds `(θ, s)`; `θ` is reduced into `[0, 2π)` and any negative `s` is a reflection.
    pub fn new(theta: f64, s: i8) -> Self {
        Self {
            theta: canonical_angle(theta),
            s: if s < 0 { -1 } else { 1 },
        }
    }

    pub fn identity() -> Self {
        Self { theta: 0.0, s: 1 }
    }

    pub fn rotation(theta: f64) -> Self {
        Self::new(theta, 1)
    }

    pub fn reflection(theta: f64) -> Self {
        Self::new(theta, -1)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn s(&self) -> i8 {
        self.s
    }

    pub fn is_reflection(&self) -> bool {
        self.s < 0
    }

    pub fn is_identity(&self) -> bool {
        self.s > 0 && self.theta == 0.0
    }

    /// `(θ₁, s₁)·(θ₂, s₂) = (θ₁ + s₁θ₂, s₁s₂)`.
    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement::new(self.theta + f64::from(self.s) * other.theta, self.s * other.s)
    }

    pub fn inverse(&self) -> GroupElement {
        if self.is_reflection() {
            *self
        } else {
            GroupElement::new(-self.theta, 1)
        }
    }

    /// `ψ(θ)ξ(s)`, the action on the plane for the reflection axis `β = 0`.
    pub fn matrix(&self) -> Matrix2<f64> {
        rot2(self.theta) * flip2(self.s)
    }

    /// Acts on a point with reflection axis `β = 0`.
    pub fn act_on_point(&self, x: [f64; 2]) -> [f64; 2] {
        let y = self.matrix() * nalgebra::Vector2::new(x[0], x[1]);
        [y[0], y[1]]
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.6}, {:+})", self.theta, self.s)
    }
}

/// Subgroup family of O(2).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Trivial,
    Cyclic,
    Dihedral,
    SO2,
    O2,
    Flip,
}

/// A subgroup `G ≤ O(2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Group {
    /// The trivial group `{e}`.
    Trivial,
    /// Rotations by multiples of `2π/n`.
    Cyclic { n: u32 },
    /// `C_n` together with reflections over the axes `β + pπ/n`.
    Dihedral { n: u32, axis: f64 },
    SO2,
    O2,
    /// The two-element reflection group over the axis `β`.
    Flip { axis: f64 },
}

impl Group {
    /// `C_n`; `C_1` is the trivial group.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn cyclic(n: u32) -> Group {
        assert!(n > 0, "cyclic group order must be positive");
        if n == 1 {
            Group::Trivial
        } else {
            Group::Cyclic { n }
        }
    }

    /// `D_n` with its axis reduced modulo `2π/n`.
    ///
    /// # Panics
    /// If `n == 0`.
    pub fn dihedral(n: u32, axis: f64) -> Group {
        assert!(n > 0, "dihedral group order must be positive");
        let period = TAU / f64::from(n);
        Group::Dihedral {
            n,
            axis: reduce_axis(axis, period),
        }
    }

    /// The reflection group with its axis reduced modulo `π`.
    pub fn flip(axis: f64) -> Group {
        Group::Flip {
            axis: reduce_axis(axis, PI),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            Group::Trivial => Family::Trivial,
            Group::Cyclic { .. } => Family::Cyclic,
            Group::Dihedral { .. } => Family::Dihedral,
            Group::SO2 => Family::SO2,
            Group::O2 => Family::O2,
            Group::Flip { .. } => Family::Flip,
        }
    }

    /// Number of rotations for finite groups, `None` for SO(2) and O(2).
    pub fn rotation_order(&self) -> Option<u32> {
        match *self {
            Group::Trivial | Group::Flip { .. } => Some(1),
            Group::Cyclic { n } | Group::Dihedral { n, .. } => Some(n),
            Group::SO2 | Group::O2 => None,
        }
    }

    pub fn has_reflections(&self) -> bool {
        matches!(self, Group::Dihedral { .. } | Group::O2 | Group::Flip { .. })
    }

    /// Reflection axis `β` (zero for groups without an axis).
    pub fn axis(&self) -> f64 {
        match *self {
            Group::Dihedral { axis, .. } | Group::Flip { axis } => axis,
            _ => 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.rotation_order().is_some()
    }

    /// `|G|` for finite groups.
    pub fn order(&self) -> Option<usize> {
        self.rotation_order()
            .map(|n| n as usize * if self.has_reflections() { 2 } else { 1 })
    }

    /// Rotation index `p` with `θ = 2πp/N`, if the angle is one of the group's rotations.
    pub(crate) fn rotation_index(&self, theta: f64) -> Option<u32> {
        let n = self.rotation_order()?;
        let q = theta / TAU * f64::from(n);
        let p = q.round();
        if (q - p).abs() * TAU / f64::from(n) < MEMBER_EPS {
            Some((p as i64).rem_euclid(i64::from(n)) as u32)
        } else {
            None
        }
    }

    /// Membership predicate.
    pub fn contains(&self, g: &GroupElement) -> bool {
        if g.is_reflection() && !self.has_reflections() {
            return false;
        }
        match self {
            Group::SO2 | Group::O2 => true,
            _ => self.rotation_index(g.theta).is_some(),
        }
    }

    /// Snaps a member onto its exact representative `θ = 2πp/N` (identity on continuous groups).
    pub fn canonicalize(&self, g: &GroupElement) -> Result<GroupElement> {
        if !self.contains(g) {
            return Err(Error::NotInGroup {
                element: *g,
                group: *self,
            });
        }
        Ok(match self.rotation_order() {
            Some(n) => {
                let p = self.rotation_index(g.theta).unwrap_or(0);
                GroupElement::new(TAU * f64::from(p) / f64::from(n), g.s)
            }
            None => *g,
        })
    }

    /// Composition followed by snapping onto the group's exact angles.
    pub fn compose(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let c = a.compose(b);
        self.canonicalize(&c).unwrap_or(c)
    }

    /// Enumerates a finite group: rotations `p = 0..N` first, then the reflections.
    pub fn elements(&self) -> Result<Vec<GroupElement>> {
        let n = self.rotation_order().ok_or(Error::NotFinite(*self))?;
        let mut out = Vec::with_capacity(self.order().unwrap_or(0));
        let signs: &[i8] = if self.has_reflections() { &[1, -1] } else { &[1] };
        for &s in signs {
            for p in 0..n {
                out.push(GroupElement::new(TAU * f64::from(p) / f64::from(n), s));
            }
        }
        Ok(out)
    }

    /// Position of `g` in [`Group::elements`].
    pub fn element_index(&self, g: &GroupElement) -> Option<usize> {
        if !self.contains(g) {
            return None;
        }
        let n = self.rotation_order()?;
        let p = self.rotation_index(g.theta)? as usize;
        Some(p + if g.is_reflection() { n as usize } else { 0 })
    }

    /// A generating set of a finite group; continuous groups return `None`.
    pub fn generators(&self) -> Option<Vec<GroupElement>> {
        let n = self.rotation_order()?;
        let mut out = Vec::new();
        if n > 1 {
            out.push(GroupElement::rotation(TAU / f64::from(n)));
        }
        if self.has_reflections() {
            out.push(GroupElement::reflection(0.0));
        }
        Some(out)
    }

    /// Deterministic pseudo-random elements.
    ///
    /// Finite groups draw uniformly from their elements. SO(2) returns `n`
    /// equispaced rotations shifted by a seeded jitter of less than one step;
    /// O(2) does the same and alternates the reflection flag.
    pub fn sample_elements(&self, n: usize, seed: u64) -> Vec<GroupElement> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Ok(all) = self.elements() {
            return (0..n).map(|_| all[rng.random_range(0..all.len())]).collect();
        }
        let step = TAU / n.max(1) as f64;
        (0..n)
            .map(|i| {
                let jitter: f64 = rng.random();
                let s = if *self == Group::O2 && i % 2 == 1 { -1 } else { 1 };
                GroupElement::new(step * (i as f64 + jitter), s)
            })
            .collect()
    }

    /// Matrix by which `g` acts on the plane, with the reflection taken over the group's axis.
    pub fn point_matrix(&self, g: &GroupElement) -> Matrix2<f64> {
        if g.is_reflection() {
            rot2(g.theta + 2.0 * self.axis()) * flip2(-1)
        } else {
            rot2(g.theta)
        }
    }

    pub fn act_on_point(&self, g: &GroupElement, x: [f64; 2]) -> [f64; 2] {
        let y = self.point_matrix(g) * nalgebra::Vector2::new(x[0], x[1]);
        [y[0], y[1]]
    }

    /// Maps an element of `self` into the coordinates of the supergroup `sup`.
    ///
    /// The same planar transformation is labelled differently when the two
    /// groups use different axes, so reflections pick up an angle
    /// `2(β_self − β_sup)`.
    pub fn embed(&self, sup: &Group, h: &GroupElement) -> Result<GroupElement> {
        let shift = if h.is_reflection() {
            2.0 * (self.axis() - sup.axis())
        } else {
            0.0
        };
        sup.canonicalize(&GroupElement::new(h.theta + shift, h.s))
    }

    /// Inverse of [`Group::embed`]: expresses an element of `sup` in the coordinates of `self`.
    pub fn pull_back(&self, sup: &Group, g: &GroupElement) -> Result<GroupElement> {
        let shift = if g.is_reflection() {
            2.0 * (self.axis() - sup.axis())
        } else {
            0.0
        };
        self.canonicalize(&GroupElement::new(g.theta - shift, g.s))
    }

    /// Whether `self ≤ sup` as transformations of the plane.
    pub fn is_subgroup_of(&self, sup: &Group) -> bool {
        if self.has_reflections() && !sup.has_reflections() {
            return false;
        }
        match (self.is_finite(), sup.is_finite()) {
            (false, true) => false,
            (false, false) => !(self == &Group::O2 && sup == &Group::SO2),
            (true, false) => true,
            (true, true) => match self.elements() {
                Ok(els) => els.iter().all(|h| self.embed(sup, h).is_ok()),
                Err(_) => false,
            },
        }
    }

    /// Human-readable label, e.g. `C8`, `D4(β=0.3927)`.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

fn reduce_axis(axis: f64, period: f64) -> f64 {
    let r = axis.rem_euclid(period);
    if period - r < WRAP_EPS {
        0.0
    } else {
        r
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Group::Trivial => write!(f, "C1"),
            Group::Cyclic { n } => write!(f, "C{n}"),
            Group::Dihedral { n, axis: 0.0 } => write!(f, "D{n}"),
            Group::Dihedral { n, axis } => write!(f, "D{n}(β={axis})"),
            Group::SO2 => write!(f, "SO2"),
            Group::O2 => write!(f, "O2"),
            Group::Flip { axis: 0.0 } => write!(f, "Flip"),
            Group::Flip { axis } => write!(f, "Flip(β={axis})"),
        }
    }
}
