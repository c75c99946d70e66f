use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};
use crate::linalg::{block_diag, Mat};

use super::{irreps, IrrepId, Representation};

/// Isotypic decomposition `ρ(g) = Qᵀ [⊕ᵢ ψᵢ(g)] Q`.
#[derive(Clone, Debug)]
pub struct Decomposition {
    irreps: Vec<IrrepId>,
    offsets: Vec<usize>,
    q: Mat,
}

impl Decomposition {
    /// Irreps in block order, sorted by `(flip, frequency)` with repetitions.
    pub fn irreps(&self) -> &[IrrepId] {
        &self.irreps
    }

    /// Row offset of each irrep block inside `Q`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    /// The orthogonal change of basis `Q`.
    pub fn q(&self) -> &Mat {
        &self.q
    }

    /// Rows of `Q` belonging to block `i` (a `dᵢ × c` matrix).
    pub fn block_rows(&self, i: usize) -> Mat {
        let d = self.irreps[i].dim();
        self.q.rows(self.offsets[i], d).into_owned()
    }

    /// `⊕ᵢ ψᵢ(g)`.
    pub fn irrep_sum(&self, g: &GroupElement) -> Mat {
        block_diag(&self.irreps.iter().map(|p| p.eval(g)).collect::<Vec<_>>())
    }

    /// `Qᵀ [⊕ᵢ ψᵢ(g)] Q`.
    pub fn reconstruct(&self, g: &GroupElement) -> Mat {
        self.q.transpose() * self.irrep_sum(g) * &self.q
    }
}

/// Averaging nodes with equal weights: all elements of a finite group, or
/// `4B + 4` equispaced rotations (times both reflection flags for O(2)).
fn quadrature(group: Group, max_frequency: u32) -> Vec<GroupElement> {
    if let Ok(els) = group.elements() {
        return els;
    }
    let m = 4 * max_frequency as usize + 4;
    let signs: &[i8] = if group.has_reflections() { &[1, -1] } else { &[1] };
    signs
        .iter()
        .flat_map(|&s| (0..m).map(move |i| GroupElement::new(TAU * i as f64 / m as f64, s)))
        .collect()
}

/// Elements on which the reconstruction is verified.
fn check_elements(group: Group) -> Vec<GroupElement> {
    if let Ok(els) = group.elements() {
        return els;
    }
    let m = 64;
    let signs: &[i8] = if group.has_reflections() { &[1, -1] } else { &[1] };
    signs
        .iter()
        .flat_map(|&s| (0..m).map(move |i| GroupElement::new(TAU * (i as f64 + 0.37) / m as f64, s)))
        .collect()
}

const RECONSTRUCTION_TOL: f64 = 1e-8;

/// Decomposes `ρ` into irreps.
///
/// Multiplicities come from real character inner products
/// `mᵢ = ⟨χ_ρ, χᵢ⟩ / ⟨χᵢ, χᵢ⟩`. For each irrep type the intertwiners are
/// obtained by averaging `F(X) = avg_g ρ(g) X ψᵢ(g)ᵀ` over candidate matrices
/// `X = e_a e_1ᵀ`; the candidate with the largest residual against the blocks
/// accepted so far is taken next, normalized and appended. Each block is
/// sign-fixed so that the first nonzero entry of its first column is positive.
///
/// Fails when the dimensions do not add up (bandlimit too low, not a
/// homomorphism) or when the reconstruction residual exceeds `1e-8`.
pub fn decompose(rho: &Representation, max_frequency: u32) -> Result<Decomposition> {
    let fail = |reason: String| Error::Decomposition {
        name: rho.name().to_string(),
        reason,
    };
    let group = rho.group();
    let c = rho.dim();
    let nodes = quadrature(group, max_frequency);
    let w = 1.0 / nodes.len() as f64;
    let mats: Vec<Mat> = nodes.iter().map(|g| rho.eval(g)).collect();

    let mut blocks: Vec<(IrrepId, Mat)> = Vec::new();
    let mut basis = Mat::zeros(c, 0);
    for psi in irreps(group, max_frequency) {
        let psis: Vec<Mat> = nodes.iter().map(|g| psi.eval(g)).collect();
        let ip: f64 = mats
            .iter()
            .zip(&psis)
            .map(|(r, p)| r.trace() * p.trace())
            .sum::<f64>()
            * w;
        let m_real = ip / psi.endomorphism_dim() as f64;
        let m = m_real.round();
        if (m_real - m).abs() > 1e-6 || m < 0.0 {
            return Err(fail(format!("non-integer multiplicity {m_real} for {psi}")));
        }
        let m = m as usize;
        if m == 0 {
            continue;
        }
        let d = psi.dim();
        // F(e_a e_1ᵀ) = avg_g ρ(g)[:, a] ψ(g)[:, 0]ᵀ
        let candidates: Vec<Mat> = (0..c)
            .map(|a| {
                let mut f = Mat::zeros(c, d);
                for (r, p) in mats.iter().zip(&psis) {
                    f += r.column(a) * p.column(0).transpose();
                }
                f * w
            })
            .collect();
        for _ in 0..m {
            let mut best: Option<(f64, Mat)> = None;
            for f in &candidates {
                let b = f - &basis * (basis.transpose() * f);
                let lambda = b.norm_squared() / d as f64;
                if best.as_ref().is_none_or(|(l, _)| lambda > *l * (1.0 + 1e-9)) {
                    best = Some((lambda, b));
                }
            }
            let (lambda, mut b) = best.ok_or_else(|| fail("empty representation".into()))?;
            if lambda < 1e-10 {
                return Err(fail(format!("could not find {m} copies of {psi}")));
            }
            b /= lambda.sqrt();
            if let Some(&x) = b.column(0).iter().find(|x| x.abs() > 1e-12) {
                if x < 0.0 {
                    b = -b;
                }
            }
            let cols = basis.ncols();
            basis = basis.insert_columns(cols, d, 0.0);
            basis.view_mut((0, cols), (c, d)).copy_from(&b);
            blocks.push((psi, b));
        }
    }
    if basis.ncols() != c {
        return Err(fail(format!(
            "irreps up to frequency {max_frequency} span dimension {} of {c}",
            basis.ncols()
        )));
    }
    let mut offsets = Vec::with_capacity(blocks.len());
    let mut acc = 0;
    for (p, _) in &blocks {
        offsets.push(acc);
        acc += p.dim();
    }
    let dec = Decomposition {
        irreps: blocks.iter().map(|(p, _)| *p).collect(),
        offsets,
        q: basis.transpose(),
    };
    let residual = check_elements(group)
        .iter()
        .map(|g| (rho.eval(g) - dec.reconstruct(g)).norm())
        .fold(0.0, f64::max);
    if residual > RECONSTRUCTION_TOL {
        return Err(fail(format!("reconstruction residual {residual:.3e}")));
    }
    Ok(dec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthogonality_defect;
    use crate::representation::{induced_so2_to_o2, regular_representation};

    #[test]
    fn regular_c4() {
        let r = regular_representation(Group::cyclic(4)).unwrap();
        let d = r.decomposition().unwrap();
        let f: Vec<u32> = d.irreps().iter().map(|p| p.frequency()).collect();
        assert_eq!(f, vec![0, 1, 2]);
        assert!(orthogonality_defect(d.q()) < 1e-12);
    }

    #[test]
    fn irrep_is_fixed_point() {
        for g in [Group::SO2, Group::O2, Group::cyclic(5), Group::dihedral(6, 0.3)] {
            for p in irreps(g, 3) {
                let d = Representation::irrep(p).decomposition().unwrap().clone();
                assert_eq!(d.irreps(), &[p]);
                assert!((d.q() - Mat::identity(p.dim(), p.dim())).norm() < 1e-12, "{p}");
            }
        }
    }

    #[test]
    fn induced_so2_zero() {
        let d = induced_so2_to_o2(0).decomposition().unwrap().clone();
        let ids: Vec<(u8, u32)> = d.irreps().iter().map(|p| (p.flip(), p.frequency())).collect();
        assert_eq!(ids, vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn bandlimit_too_low_is_rejected() {
        let r = induced_so2_to_o2(3);
        assert!(decompose(&r, 2).is_err());
        assert!(decompose(&r, 3).is_ok());
    }
}
