//! Orthogonal representations of subgroups of O(2).
//!
//! A [`Representation`] is a cheap, cloneable handle around an evaluator
//! `g ↦ ρ(g)` plus a lazily computed irrep decomposition `ρ = Qᵀ[⊕ψᵢ]Q`.

mod constructors;
mod decompose;
mod irreps;

use std::fmt;
use std::sync::{Arc, OnceLock};

pub use constructors::{
    direct_sum, induced_representation, induced_so2_to_o2, quotient_representation,
    regular_representation, restrict, tensor_product,
};
pub use decompose::{decompose, Decomposition};
pub use irreps::{irreps, IrrepId};

use crate::error::{Error, Result};
use crate::group::{Group, GroupElement};
use crate::linalg::Mat;

type Evaluator = dyn Fn(&GroupElement) -> Mat + Send + Sync;

/// How a representation was built.
#[derive(Clone, Debug, PartialEq)]
pub enum RepKind {
    Irrep(IrrepId),
    Regular,
    Quotient { subgroup: Group },
    Induced { subgroup: Group },
    /// `Ind_{SO(2)}^{O(2)} ψ_k`.
    InducedSo2 { frequency: u32 },
    Restricted { from: Group },
    DirectSum,
    Tensor,
    Custom,
}

struct Inner {
    group: Group,
    dim: usize,
    name: String,
    kind: RepKind,
    bandlimit: Option<u32>,
    components: Vec<Representation>,
    eval: Box<Evaluator>,
    decomposition: OnceLock<Result<Decomposition>>,
}

/// An orthogonal representation `ρ: G → O(c)`.
#[derive(Clone)]
pub struct Representation(Arc<Inner>);

impl Representation {
    /// Builds a representation from an evaluator.
    ///
    /// `bandlimit` bounds the frequencies that occur in `ρ`; it is required for
    /// decomposing representations of SO(2) and O(2) and ignored otherwise.
    pub fn from_fn<F>(group: Group, dim: usize, name: impl Into<String>, bandlimit: Option<u32>, f: F) -> Self
    where
        F: Fn(&GroupElement) -> Mat + Send + Sync + 'static,
    {
        Self::build(group, dim, name.into(), RepKind::Custom, bandlimit, Vec::new(), Box::new(f))
    }

    pub(crate) fn build(
        group: Group,
        dim: usize,
        name: String,
        kind: RepKind,
        bandlimit: Option<u32>,
        components: Vec<Representation>,
        eval: Box<Evaluator>,
    ) -> Self {
        Self(Arc::new(Inner {
            group,
            dim,
            name,
            kind,
            bandlimit,
            components,
            eval,
            decomposition: OnceLock::new(),
        }))
    }

    /// The irrep `ψ` as a representation.
    pub fn irrep(id: IrrepId) -> Self {
        let bandlimit = Some(id.frequency());
        Self::build(
            id.group(),
            id.dim(),
            id.label(),
            RepKind::Irrep(id),
            bandlimit,
            Vec::new(),
            Box::new(move |g| id.eval(g)),
        )
    }

    /// The one-dimensional trivial representation.
    pub fn trivial(group: Group) -> Self {
        Self::irrep(IrrepId::trivial(group))
    }

    pub fn group(&self) -> Group {
        self.0.group
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn kind(&self) -> &RepKind {
        &self.0.kind
    }

    /// Largest frequency occurring in `ρ`, when known.
    pub fn bandlimit(&self) -> Option<u32> {
        self.0.bandlimit
    }

    /// Summands of a direct sum (empty for anything else).
    pub fn components(&self) -> &[Representation] {
        &self.0.components
    }

    /// Whether two handles point at the same representation object.
    pub fn ptr_eq(&self, other: &Representation) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub(crate) fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as *const () as usize
    }

    /// `ρ(g)`; rejects elements outside the group.
    pub fn matrix(&self, g: &GroupElement) -> Result<Mat> {
        let g = self.0.group.canonicalize(g)?;
        Ok((self.0.eval)(&g))
    }

    /// `ρ(g)` for a known member (snapped onto the group first).
    pub(crate) fn eval(&self, g: &GroupElement) -> Mat {
        let g = self.0.group.canonicalize(g).unwrap_or(*g);
        (self.0.eval)(&g)
    }

    /// `tr ρ(g)`.
    pub fn character(&self, g: &GroupElement) -> Result<f64> {
        Ok(self.matrix(g)?.trace())
    }

    /// The cached decomposition, computed on first access.
    ///
    /// Continuous groups use the representation's own bandlimit; a missing
    /// bandlimit is an error.
    pub fn decomposition(&self) -> Result<&Decomposition> {
        self.0
            .decomposition
            .get_or_init(|| {
                let b = match (self.0.group.is_finite(), self.0.bandlimit) {
                    (true, b) => b.unwrap_or(0),
                    (false, Some(b)) => b,
                    (false, None) => {
                        return Err(Error::Decomposition {
                            name: self.0.name.clone(),
                            reason: "no bandlimit known for a continuous-group representation".into(),
                        })
                    }
                };
                decompose(self, b)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// `P⁻¹ ρ P` for an orthogonal `P`.
    pub fn conjugated(&self, p: &Mat) -> Result<Representation> {
        if p.shape() != (self.dim(), self.dim()) {
            return Err(Error::Shape(format!(
                "change of basis is {:?}, representation has dimension {}",
                p.shape(),
                self.dim()
            )));
        }
        let inner = self.clone();
        let p = p.clone();
        let pt = p.transpose();
        Ok(Self::build(
            self.group(),
            self.dim(),
            format!("conj({})", self.name()),
            RepKind::Custom,
            self.bandlimit(),
            Vec::new(),
            Box::new(move |g| &pt * inner.eval(g) * &p),
        ))
    }

    /// Whether the generators act by 0/1 permutation matrices.
    ///
    /// Continuous groups have no finite generating set; a fixed deterministic
    /// sample of elements is inspected instead.
    pub fn is_permutation(&self) -> bool {
        let probe = self
            .group()
            .generators()
            .unwrap_or_else(|| self.group().sample_elements(16, 0));
        probe.iter().all(|g| is_permutation_matrix(&self.eval(g)))
    }
}

pub(crate) fn is_permutation_matrix(m: &Mat) -> bool {
    if !m.iter().all(|&x| x == 0.0 || x == 1.0) {
        return false;
    }
    (0..m.nrows()).all(|r| m.row(r).iter().filter(|&&x| x == 1.0).count() == 1)
        && (0..m.ncols()).all(|c| m.column(c).iter().filter(|&&x| x == 1.0).count() == 1)
}

impl fmt::Debug for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Representation")
            .field("group", &self.0.group)
            .field("dim", &self.0.dim)
            .field("name", &self.0.name)
            .finish()
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.0.name, self.0.group)
    }
}

/// `tr ρ(g)`.
pub fn character(rho: &Representation, g: &GroupElement) -> Result<f64> {
    rho.character(g)
}
