//! Closed-form angular solutions of the irrep kernel constraint
//! `κ(g.φ) = ψ_out(g) κ(φ) ψ_in(g)⁻¹`.
//!
//! Every solution is a circular harmonic of frequency `μ` with phase `γ`:
//!
//! | shape | element                           | rotation condition        | reflection phase |
//! |-------|-----------------------------------|---------------------------|------------------|
//! | 1×1   | `cos(μφ + γ)`, `μ ≥ 0`            | `μ ≡ m + n (mod N)`       | `γ = (i+j)·π/2`  |
//! | 2×1   | `[cos(μφ + γ); sin(μφ + γ)]`      | `μ ≡ m + n (mod N)`       | `γ = j·π/2`      |
//! | 1×2   | `[cos(μφ + γ), sin(μφ + γ)]`      | `μ ≡ m + n (mod N)`       | `γ = i·π/2`      |
//! | 2×2   | `ψ(μφ + γ) ξ(s)`                  | `μ ≡ m − s·n (mod N)`     | `γ = 0`          |
//!
//! Here `ψ_out = ψ_{i,m}` and `ψ_in = ψ_{j,n}`. For SO(2) and O(2) the
//! congruence becomes equality, groups without reflections admit both phases
//! `γ ∈ {0, π/2}`, and groups with reflections over the axis `β` evaluate at
//! `φ − β`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::Group;
use crate::linalg::Mat;
use crate::representation::IrrepId;

/// Phase offset of a harmonic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Zero,
    HalfPi,
}

impl Phase {
    pub fn value(self) -> f64 {
        match self {
            Phase::Zero => 0.0,
            Phase::HalfPi => FRAC_PI_2,
        }
    }

    fn from_parity(p: u8) -> Phase {
        if p.is_multiple_of(2) {
            Phase::Zero
        } else {
            Phase::HalfPi
        }
    }
}

/// One analytic angular solution for an irrep pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngularBasisElement {
    /// `(d_out, d_in)`.
    pub shape: (usize, usize),
    pub mu: i32,
    pub gamma: Phase,
    /// Reflection parameter of the 2×2 solutions; `+1` otherwise.
    pub s: i8,
    /// Reflection axis of the group.
    pub beta: f64,
}

impl AngularBasisElement {
    /// `κ(φ)` as a `d_out × d_in` matrix.
    pub fn eval(&self, phi: f64) -> Mat {
        let mut out = Mat::zeros(self.shape.0, self.shape.1);
        self.eval_into(phi, out.as_mut_slice());
        out
    }

    /// Writes `κ(φ)` in column-major order into `out`.
    pub fn eval_into(&self, phi: f64, out: &mut [f64]) {
        let a = f64::from(self.mu) * (phi - self.beta) + self.gamma.value();
        let (c, s) = (a.cos(), a.sin());
        match self.shape {
            (1, 1) => out[0] = c,
            (2, 1) | (1, 2) => {
                out[0] = c;
                out[1] = s;
            }
            _ => {
                let f = f64::from(self.s);
                out[0] = c;
                out[1] = s;
                out[2] = -s * f;
                out[3] = c * f;
            }
        }
    }

    /// `|μ|`.
    pub fn frequency(&self) -> u32 {
        self.mu.unsigned_abs()
    }
}

impl fmt::Display for AngularBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = match self.gamma {
            Phase::Zero => "0",
            Phase::HalfPi => "pi/2",
        };
        write!(f, "{}x{} mu={} gamma={} s={:+}", self.shape.0, self.shape.1, self.mu, g, self.s)
    }
}

/// Analytic angular basis for `ψ_out ← ψ_in`, all solutions with `|μ| ≤ max_freq`,
/// ordered by `(|μ|, μ, γ, s)`.
pub fn angular_basis(group: Group, psi_out: IrrepId, psi_in: IrrepId, max_freq: u32) -> Result<Vec<AngularBasisElement>> {
    for p in [psi_out, psi_in] {
        if p.group() != group {
            return Err(Error::GroupMismatch(group, p.group()));
        }
    }
    let reflections = group.has_reflections();
    let n = group.rotation_order();
    let (i, m) = (psi_out.flip(), i64::from(psi_out.frequency()));
    let (j, k) = (psi_in.flip(), i64::from(psi_in.frequency()));
    let shape = (psi_out.dim(), psi_in.dim());
    let beta = group.axis();
    let matches = |mu: i64, target: i64| match n {
        Some(n) => (mu - target).rem_euclid(i64::from(n)) == 0,
        None => mu == target,
    };
    let phases = |fixed: u8| -> Vec<Phase> {
        if reflections {
            vec![Phase::from_parity(fixed)]
        } else {
            vec![Phase::Zero, Phase::HalfPi]
        }
    };
    let b = i64::from(max_freq);
    let mut out = Vec::new();
    for mu in -b..=b {
        match shape {
            (1, 1) => {
                if mu < 0 || !matches(mu, m + k) {
                    continue;
                }
                for gamma in phases(i + j) {
                    if mu == 0 && gamma == Phase::HalfPi {
                        continue;
                    }
                    out.push(element(shape, mu, gamma, 1, beta));
                }
            }
            (2, 1) | (1, 2) => {
                if !matches(mu, m + k) {
                    continue;
                }
                let fixed = if shape.0 == 2 { j } else { i };
                for gamma in phases(fixed) {
                    out.push(element(shape, mu, gamma, 1, beta));
                }
            }
            _ => {
                for s in [1i8, -1] {
                    if !matches(mu, m - i64::from(s) * k) {
                        continue;
                    }
                    for gamma in phases(0) {
                        out.push(element(shape, mu, gamma, s, beta));
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| {
        (a.mu.abs(), a.mu, a.gamma, a.s).cmp(&(b.mu.abs(), b.mu, b.gamma, b.s))
    });
    Ok(out)
}

fn element(shape: (usize, usize), mu: i64, gamma: Phase, s: i8, beta: f64) -> AngularBasisElement {
    AngularBasisElement {
        shape,
        mu: mu as i32,
        gamma,
        s,
        beta,
    }
}
