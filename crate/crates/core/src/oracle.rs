//! Numeric reference solver for the kernel constraint.
//!
//! Each kernel entry is expanded in the truncated Fourier basis
//! `{1, cos μφ, sin μφ : 1 ≤ μ ≤ B}` and the constraint
//! `k(g.φ) = ρ_out(g) k(φ) ρ_in(g)ᵀ` is projected back onto the same harmonics
//! by equispaced quadrature. Rotations and reflections map harmonics of
//! frequency `μ` onto frequency `μ`, so the linear system splits into one block
//! per frequency; the null space of each block is read off an SVD. Nothing here
//! relies on irrep decompositions or the analytic tables.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};
use crate::linalg::{column_space, spectral_norm, Mat};
use crate::representation::Representation;

/// Singular value threshold of the null space, relative to `max(σ_max, 1)`.
pub const NULL_SPACE_TOL: f64 = 1e-10;

/// Anything that can be evaluated as a finite family of angular kernels
/// `φ ↦ k_i(φ) ∈ ℝ^{c_out × c_in}`.
pub trait AngularFunctions {
    fn c_out(&self) -> usize;
    fn c_in(&self) -> usize;
    fn len(&self) -> usize;
    fn eval(&self, i: usize, phi: f64) -> Mat;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl AngularFunctions for crate::basis::SymbolicBasis {
    fn c_out(&self) -> usize {
        crate::basis::SymbolicBasis::c_out(self)
    }
    fn c_in(&self) -> usize {
        crate::basis::SymbolicBasis::c_in(self)
    }
    fn len(&self) -> usize {
        crate::basis::SymbolicBasis::len(self)
    }
    fn eval(&self, i: usize, phi: f64) -> Mat {
        crate::basis::SymbolicBasis::eval(self, i, phi)
    }
}

/// Linear constraint system on the Fourier coefficients of a kernel.
///
/// Unknown `(a, b, h)` is the coefficient of harmonic `h` in entry `(a, b)`,
/// laid out as `(a · c_in + b) · (2B + 1) + h` with `h = 0` the constant,
/// `h = 2μ − 1` the cosine and `h = 2μ` the sine of frequency `μ`.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    group: Group,
    c_out: usize,
    c_in: usize,
    max_freq: u32,
    elements: Vec<GroupElement>,
    blocks: Vec<Mat>,
}

/// Angle of `g.φ` under the group's planar action.
fn act_on_angle(group: &Group, g: &GroupElement, phi: f64) -> f64 {
    let y = group.act_on_point(g, [phi.cos(), phi.sin()]);
    y[1].atan2(y[0])
}

/// Harmonics of frequency `mu`: `[1]` at zero, `[cos, sin]` otherwise.
fn harmonics(mu: u32, phi: f64) -> Vec<f64> {
    if mu == 0 {
        vec![1.0]
    } else {
        let a = f64::from(mu) * phi;
        vec![a.cos(), a.sin()]
    }
}

impl ConstraintSystem {
    pub fn new(rho_out: &Representation, rho_in: &Representation, max_freq: u32) -> Result<Self> {
        let group = rho_out.group();
        if rho_in.group() != group {
            return Err(Error::GroupMismatch(group, rho_in.group()));
        }
        let elements = constraint_elements(group, rho_out, rho_in, max_freq);
        let (c_out, c_in) = (rho_out.dim(), rho_in.dim());
        let p = 2 * max_freq as usize + 3;
        let nodes: Vec<f64> = (0..p).map(|i| TAU * i as f64 / p as f64).collect();
        let mats: Vec<(Mat, Mat)> = elements
            .iter()
            .map(|g| Ok((rho_out.matrix(g)?, rho_in.matrix(g)?.transpose())))
            .collect::<Result<_>>()?;

        let blocks = (0..=max_freq)
            .map(|mu| {
                let nh = if mu == 0 { 1 } else { 2 };
                let scale = if mu == 0 { 1.0 } else { 2.0 } / p as f64;
                let n = c_out * c_in * nh;
                let mut a = Mat::zeros(n * elements.len(), n);
                for (gi, g) in elements.iter().enumerate() {
                    // s[t', t] = projection of f_t(g.φ) onto f_t'
                    let mut s = Mat::zeros(nh, nh);
                    for &phi in &nodes {
                        let f = harmonics(mu, phi);
                        let fg = harmonics(mu, act_on_angle(&group, g, phi));
                        for tp in 0..nh {
                            for t in 0..nh {
                                s[(tp, t)] += scale * f[tp] * fg[t];
                            }
                        }
                    }
                    let (ro, ri_inv) = &mats[gi];
                    let base = gi * n;
                    for a2 in 0..c_out {
                        for b2 in 0..c_in {
                            for tp in 0..nh {
                                let row = base + (a2 * c_in + b2) * nh + tp;
                                for t in 0..nh {
                                    a[(row, (a2 * c_in + b2) * nh + t)] += s[(tp, t)];
                                }
                                for a1 in 0..c_out {
                                    let x = ro[(a2, a1)];
                                    if x == 0.0 {
                                        continue;
                                    }
                                    for b1 in 0..c_in {
                                        let y = ri_inv[(b1, b2)];
                                        if y != 0.0 {
                                            a[(row, (a1 * c_in + b1) * nh + tp)] -= x * y;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                a
            })
            .collect();
        Ok(Self {
            group,
            c_out,
            c_in,
            max_freq,
            elements,
            blocks,
        })
    }

    pub fn group(&self) -> Group {
        self.group
    }

    /// `c_out · c_in · (2B + 1)`.
    pub fn unknowns(&self) -> usize {
        self.c_out * self.c_in * (2 * self.max_freq as usize + 1)
    }

    /// Group elements whose constraints are stacked.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    /// Constraint block acting on the coefficients of frequency `mu`.
    pub fn block(&self, mu: u32) -> &Mat {
        &self.blocks[mu as usize]
    }

    /// The full system in the global unknown layout.
    pub fn matrix(&self) -> Mat {
        let rows: usize = self.blocks.iter().map(|b| b.nrows()).sum();
        let mut out = Mat::zeros(rows, self.unknowns());
        let mut r0 = 0;
        for (mu, blk) in self.blocks.iter().enumerate() {
            let cols = self.block_columns(mu as u32);
            for r in 0..blk.nrows() {
                for (j, &c) in cols.iter().enumerate() {
                    out[(r0 + r, c)] = blk[(r, j)];
                }
            }
            r0 += blk.nrows();
        }
        out
    }

    /// Global unknown indices of the columns of block `mu`.
    fn block_columns(&self, mu: u32) -> Vec<usize> {
        let per = 2 * self.max_freq as usize + 1;
        let hs: Vec<usize> = if mu == 0 {
            vec![0]
        } else {
            vec![2 * mu as usize - 1, 2 * mu as usize]
        };
        (0..self.c_out * self.c_in)
            .flat_map(|e| hs.iter().map(move |&h| e * per + h))
            .collect()
    }

    /// Orthonormal null space, ordered by frequency.
    pub fn solve(&self) -> NumericBasis {
        let reduced: Vec<(Mat, nalgebra::DVector<f64>)> = self
            .blocks
            .iter()
            .map(|b| {
                let r = if b.nrows() > 2 * b.ncols() {
                    b.clone().qr().r()
                } else {
                    b.clone()
                };
                let n = r.ncols();
                let padded = if r.nrows() < n {
                    let mut p = Mat::zeros(n, n);
                    p.view_mut((0, 0), (r.nrows(), n)).copy_from(&r);
                    p
                } else {
                    r
                };
                let svd = padded.svd(false, true);
                (svd.v_t.expect("requested V"), svd.singular_values)
            })
            .collect();
        // entries of the system are O(1), so an all-but-zero system (trivial
        // group) is measured against 1 instead of its own rounding noise
        let smax = reduced
            .iter()
            .flat_map(|(_, s)| s.iter().cloned())
            .fold(1.0, f64::max);
        let mut cols: Vec<nalgebra::DVector<f64>> = Vec::new();
        let mut freqs = Vec::new();
        for (mu, (vt, sv)) in reduced.iter().enumerate() {
            let gcols = self.block_columns(mu as u32);
            for (i, &s) in sv.iter().enumerate() {
                if s < NULL_SPACE_TOL * smax {
                    let mut v = nalgebra::DVector::zeros(self.unknowns());
                    for (j, &c) in gcols.iter().enumerate() {
                        v[c] = vt[(i, j)];
                    }
                    cols.push(v);
                    freqs.push(mu as u32);
                }
            }
        }
        let coefficients = if cols.is_empty() {
            Mat::zeros(self.unknowns(), 0)
        } else {
            Mat::from_columns(&cols)
        };
        NumericBasis {
            c_out: self.c_out,
            c_in: self.c_in,
            max_freq: self.max_freq,
            coefficients,
            frequencies: freqs,
        }
    }
}

/// Rows of the constraint system: every element of a finite group, or
/// `2D + 3` equispaced rotations with `D = max(B, k_out + k_in)` (plus one
/// reflection for O(2)), enough to pin down trigonometric polynomials of
/// degree `D` in the rotation angle.
fn constraint_elements(group: Group, rho_out: &Representation, rho_in: &Representation, max_freq: u32) -> Vec<GroupElement> {
    if let Ok(els) = group.elements() {
        return els;
    }
    let k = rho_out.bandlimit().unwrap_or(max_freq) + rho_in.bandlimit().unwrap_or(max_freq);
    let n = 2 * max_freq.max(k) as usize + 3;
    let mut els: Vec<GroupElement> = (0..n).map(|i| GroupElement::rotation(TAU * i as f64 / n as f64)).collect();
    if group.has_reflections() {
        els.push(GroupElement::reflection(0.0));
    }
    els
}

/// Null-space basis of the Fourier constraint system.
#[derive(Clone, Debug)]
pub struct NumericBasis {
    c_out: usize,
    c_in: usize,
    max_freq: u32,
    coefficients: Mat,
    frequencies: Vec<u32>,
}

impl NumericBasis {
    /// Orthonormal coefficient vectors as columns (`unknowns × d`).
    pub fn coefficients(&self) -> &Mat {
        &self.coefficients
    }

    /// Angular frequency of each solution.
    pub fn frequencies(&self) -> &[u32] {
        &self.frequencies
    }

    pub fn max_freq(&self) -> u32 {
        self.max_freq
    }
}

impl AngularFunctions for NumericBasis {
    fn c_out(&self) -> usize {
        self.c_out
    }
    fn c_in(&self) -> usize {
        self.c_in
    }
    fn len(&self) -> usize {
        self.coefficients.ncols()
    }
    fn eval(&self, i: usize, phi: f64) -> Mat {
        let per = 2 * self.max_freq as usize + 1;
        let mut f = vec![1.0; per];
        for mu in 1..=self.max_freq as usize {
            let a = mu as f64 * phi;
            f[2 * mu - 1] = a.cos();
            f[2 * mu] = a.sin();
        }
        let col = self.coefficients.column(i);
        Mat::from_fn(self.c_out, self.c_in, |a, b| {
            let e = (a * self.c_in + b) * per;
            (0..per).map(|h| col[e + h] * f[h]).sum()
        })
    }
}

/// Orthonormal null-space basis of the kernel constraint for `ρ_out ← ρ_in`
/// with angular frequencies up to `max_freq`.
pub fn numeric_basis(rho_out: &Representation, rho_in: &Representation, max_freq: u32) -> Result<NumericBasis> {
    Ok(ConstraintSystem::new(rho_out, rho_in, max_freq)?.solve())
}

/// Stacks `points` equispaced samples of every function into the columns of a
/// `(points · c_out · c_in) × len` matrix.
pub fn sample_on_circle<B: AngularFunctions + ?Sized>(basis: &B, points: usize) -> Mat {
    let per = basis.c_out() * basis.c_in();
    let mut out = Mat::zeros(points * per, basis.len());
    for p in 0..points {
        let phi = TAU * p as f64 / points as f64;
        for i in 0..basis.len() {
            let k = basis.eval(i, phi);
            for (j, v) in k.iter().enumerate() {
                out[(p * per + j, i)] = *v;
            }
        }
    }
    out
}

/// Largest principal-angle sine between the column spans of `a` and `b`.
///
/// Returns 1 if the spans have different dimensions and 0 if both are empty.
pub fn subspace_distance(a: &Mat, b: &Mat) -> f64 {
    let ua = column_space(a, 1e-10);
    let ub = column_space(b, 1e-10);
    if ua.ncols() != ub.ncols() {
        return 1.0;
    }
    if ua.ncols() == 0 {
        return 0.0;
    }
    let resid = &ub - &ua * (ua.transpose() * &ub);
    spectral_norm(&resid).clamp(0.0, 1.0)
}

/// `‖k(g.φ) − ρ_out(g) k(φ) ρ_in(g)ᵀ‖_F` for element `i` of a basis.
pub fn constraint_residual<B: AngularFunctions + ?Sized>(
    basis: &B,
    i: usize,
    rho_out: &Representation,
    rho_in: &Representation,
    g: &GroupElement,
    phi: f64,
) -> Result<f64> {
    let group = rho_out.group();
    let lhs = basis.eval(i, act_on_angle(&group, g, phi));
    let rhs = rho_out.matrix(g)? * basis.eval(i, phi) * rho_in.matrix(g)?.transpose();
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::{induced_so2_to_o2, IrrepId};

    fn irrep(g: Group, i: u8, k: u32) -> Representation {
        Representation::irrep(IrrepId::new(g, i, k).unwrap())
    }

    #[test]
    fn so2_vector_to_vector() {
        let v = irrep(Group::SO2, 0, 1);
        assert_eq!(numeric_basis(&v, &v, 3).unwrap().len(), 4);
    }

    #[test]
    fn o2_sign_to_trivial_is_empty() {
        let o2 = Group::O2;
        assert_eq!(numeric_basis(&irrep(o2, 0, 0), &irrep(o2, 1, 0), 3).unwrap().len(), 0);
    }

    #[test]
    fn trivial_group_is_unconstrained() {
        let t = Group::Trivial;
        let r = crate::representation::regular_representation(t).unwrap();
        let s = crate::representation::direct_sum(&[r.clone(), r.clone()]).unwrap();
        let sys = ConstraintSystem::new(&s, &r, 3).unwrap();
        assert_eq!(sys.unknowns(), 2 * 7);
        assert_eq!(sys.solve().len(), 2 * 7);
    }

    #[test]
    fn distance_examples() {
        let a = Mat::from_column_slice(2, 1, &[1.0, 0.0]);
        let b = Mat::from_column_slice(2, 1, &[0.0, 2.0]);
        assert_eq!(subspace_distance(&a, &a), 0.0);
        assert!((subspace_distance(&a, &b) - 1.0).abs() < 1e-15);
        assert_eq!(subspace_distance(&a, &Mat::identity(2, 2)), 1.0);
    }

    #[test]
    fn held_out_residual() {
        let r = induced_so2_to_o2(1);
        let nb = numeric_basis(&r, &r, 3).unwrap();
        assert!(!nb.is_empty());
        for g in Group::O2.sample_elements(9, 11) {
            for i in 0..nb.len() {
                assert!(constraint_residual(&nb, i, &r, &r, &g, 0.123).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn deterministic() {
        let g = Group::dihedral(3, 0.2);
        let r = crate::representation::regular_representation(g).unwrap();
        let a = numeric_basis(&r, &r, 3).unwrap();
        let b = numeric_basis(&r, &r, 3).unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
    }
}
