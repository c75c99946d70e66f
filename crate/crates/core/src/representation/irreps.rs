//! Real irreducible representations of the subgroups of O(2).
//!
//! | group        | irreps                                                         |
//! |--------------|----------------------------------------------------------------|
//! | SO(2), C_N   | `ψ_k(r_θ) = ψ(kθ)` (`ψ_0 = 1`, `ψ_{N/2} = cos(Nθ/2)`)          |
//! | O(2), D_N    | `ψ_{0,0} = 1`, `ψ_{1,0} = s`, `ψ_{1,k}(r_θ s) = ψ(kθ)ξ(s)`      |
//! | D_N, N even  | additionally `ψ_{0,N/2} = cos(Nθ/2)`, `ψ_{1,N/2} = s·cos(Nθ/2)` |
//! | reflections  | `ψ_0 = 1`, `ψ_1 = s`                                           |

use std::f64::consts::TAU;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::{cos_sin, Group, GroupElement};
use crate::linalg::Mat;

/// Identifier of a real irrep: flip index `i` and frequency `k`.
///
/// For groups without reflections the flip index is always 0. For the
/// reflection group the frequency is always 0 and `i` selects `ψ_0` or `ψ_1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IrrepId {
    group: Group,
    flip: u8,
    frequency: u32,
}

impl IrrepId {
    pub fn new(group: Group, flip: u8, frequency: u32) -> Result<Self> {
        let bad = || Error::InvalidIrrep {
            group,
            flip,
            frequency,
        };
        if flip > 1 {
            return Err(bad());
        }
        // ψ_{0,k} of O(2) and D_N only exists at k = 0 and, for even N, at k = N/2
        let ok = match group {
            Group::Trivial => flip == 0 && frequency == 0,
            Group::Cyclic { n } => flip == 0 && 2 * frequency <= n,
            Group::SO2 => flip == 0,
            Group::Flip { .. } => frequency == 0,
            Group::O2 => flip == 1 || frequency == 0,
            Group::Dihedral { n, .. } => {
                2 * frequency <= n && (flip == 1 || frequency == 0 || 2 * frequency == n)
            }
        };
        if ok {
            Ok(Self {
                group,
                flip,
                frequency,
            })
        } else {
            Err(bad())
        }
    }

    /// The trivial irrep of `group`.
    pub fn trivial(group: Group) -> Self {
        Self {
            group,
            flip: 0,
            frequency: 0,
        }
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn flip(&self) -> u8 {
        self.flip
    }

    pub fn frequency(&self) -> u32 {
        self.frequency
    }

    pub fn dim(&self) -> usize {
        let k = self.frequency;
        let two = k >= 1
            && match self.group.rotation_order() {
                Some(n) => 2 * k < n,
                None => true,
            };
        if two {
            2
        } else {
            1
        }
    }

    /// Dimension of the commutant, `⟨χ, χ⟩`: 2 for the 2-dimensional irreps of
    /// rotation-only groups, 1 otherwise.
    pub fn endomorphism_dim(&self) -> usize {
        if self.dim() == 2 && !self.group.has_reflections() {
            2
        } else {
            1
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.flip == 0 && self.frequency == 0
    }

    /// `ψ(g)`; rejects elements outside the group.
    pub fn matrix(&self, g: &GroupElement) -> Result<Mat> {
        let g = self.group.canonicalize(g)?;
        Ok(self.eval(&g))
    }

    /// `ψ(g)` for an element already known to be a member.
    pub(crate) fn eval(&self, g: &GroupElement) -> Mat {
        let s = f64::from(g.s());
        match self.dim() {
            1 => {
                let sign = if self.flip == 1 { s } else { 1.0 };
                let rot = if self.frequency == 0 {
                    1.0
                } else {
                    // ψ_{N/2}: (−1)^p
                    let p = self.group.rotation_index(g.theta()).unwrap_or(0);
                    if p.is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    }
                };
                Mat::from_element(1, 1, sign * rot)
            }
            _ => {
                let angle = self.angle(g);
                let (c, sn) = cos_sin(angle);
                Mat::from_row_slice(2, 2, &[c, -sn * s, sn, c * s])
            }
        }
    }

    /// `kθ`, computed from the integer rotation index on finite groups.
    fn angle(&self, g: &GroupElement) -> f64 {
        let k = self.frequency;
        match self.group.rotation_order() {
            Some(n) => {
                let p = self.group.rotation_index(g.theta()).unwrap_or(0);
                let kp = (u64::from(k) * u64::from(p)) % u64::from(n);
                TAU * kp as f64 / f64::from(n)
            }
            None => f64::from(k) * g.theta(),
        }
    }

    pub fn character(&self, g: &GroupElement) -> f64 {
        self.eval(g).trace()
    }

    /// Short label such as `psi_1` or `psi_1_2`.
    pub fn label(&self) -> String {
        if self.group.has_reflections() {
            format!("psi_{}_{}", self.flip, self.frequency)
        } else {
            format!("psi_{}", self.frequency)
        }
    }
}

impl fmt::Display for IrrepId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.group.has_reflections() {
            write!(f, "ψ_({},{})", self.flip, self.frequency)
        } else {
            write!(f, "ψ_{}", self.frequency)
        }
    }
}

/// All irreps of `group`, sorted by `(flip, frequency)`.
///
/// Finite groups return their complete list; SO(2) and O(2) are truncated at
/// `max_frequency`.
pub fn irreps(group: Group, max_frequency: u32) -> Vec<IrrepId> {
    let mk = |flip, frequency| IrrepId {
        group,
        flip,
        frequency,
    };
    match group {
        Group::Trivial => vec![mk(0, 0)],
        Group::Cyclic { n } => (0..=n / 2).map(|k| mk(0, k)).collect(),
        Group::SO2 => (0..=max_frequency).map(|k| mk(0, k)).collect(),
        Group::Flip { .. } => vec![mk(0, 0), mk(1, 0)],
        Group::O2 => std::iter::once(mk(0, 0))
            .chain((0..=max_frequency).map(|k| mk(1, k)))
            .collect(),
        Group::Dihedral { n, .. } => {
            let mut v = vec![mk(0, 0)];
            if n % 2 == 0 {
                v.push(mk(0, n / 2));
            }
            v.push(mk(1, 0));
            for k in 1..=n / 2 {
                v.push(mk(1, k));
            }
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn examples() {
        let so2 = IrrepId::new(Group::SO2, 0, 1).unwrap();
        let m = so2.matrix(&GroupElement::rotation(PI / 2.0)).unwrap();
        assert_eq!(m, Mat::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]));

        let c4 = IrrepId::new(Group::cyclic(4), 0, 2).unwrap();
        assert_eq!(c4.dim(), 1);
        assert_eq!(c4.matrix(&GroupElement::rotation(PI / 2.0)).unwrap()[(0, 0)], -1.0);

        let sign = IrrepId::new(Group::O2, 1, 0).unwrap();
        for th in [0.0, 0.3, 2.0] {
            assert_eq!(sign.matrix(&GroupElement::reflection(th)).unwrap()[(0, 0)], -1.0);
        }
    }

    #[test]
    fn catalogue() {
        let c4: Vec<_> = irreps(Group::cyclic(4), 0).iter().map(|i| i.frequency()).collect();
        assert_eq!(c4, vec![0, 1, 2]);
        assert_eq!(irreps(Group::flip(0.0), 0).len(), 2);
        assert_eq!(irreps(Group::SO2, 2).len(), 3);
        assert_eq!(irreps(Group::dihedral(4, 0.0), 0).len(), 5);
        assert_eq!(irreps(Group::dihedral(5, 0.0), 0).len(), 4);
    }

    #[test]
    fn validation() {
        assert!(IrrepId::new(Group::O2, 0, 1).is_err());
        assert!(IrrepId::new(Group::cyclic(5), 0, 3).is_err());
        assert!(IrrepId::new(Group::dihedral(4, 0.0), 0, 2).is_ok());
        assert!(IrrepId::new(Group::dihedral(4, 0.0), 0, 1).is_err());
        assert!(IrrepId::new(Group::flip(0.0), 1, 1).is_err());
        assert!(IrrepId::new(Group::SO2, 0, 9).unwrap().dim() == 2);
    }

    #[test]
    fn rejects_foreign_elements() {
        let c4 = IrrepId::new(Group::cyclic(4), 0, 1).unwrap();
        assert!(c4.matrix(&GroupElement::rotation(0.1)).is_err());
        assert!(c4.matrix(&GroupElement::reflection(0.0)).is_err());
    }

    #[test]
    fn character_orthogonality() {
        for g in [
            Group::cyclic(5),
            Group::cyclic(6),
            Group::dihedral(6, 0.0),
            Group::dihedral(7, 0.3),
            Group::flip(0.2),
        ] {
            let els = g.elements().unwrap();
            let irr = irreps(g, 0);
            for a in &irr {
                for b in &irr {
                    let ip: f64 = els.iter().map(|e| a.character(e) * b.character(e)).sum::<f64>()
                        / els.len() as f64;
                    let expect = if a == b { a.endomorphism_dim() as f64 } else { 0.0 };
                    assert!((ip - expect).abs() < 1e-12, "{g} {a} {b} {ip}");
                }
            }
        }
    }
}
