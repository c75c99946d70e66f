//! Steerable kernel bases for arbitrary representation pairs.
//!
//! [`full_basis`] assembles the continuous (symbolic) basis by embedding the
//! analytic irrep solutions into each block pair and undoing the changes of
//! basis; [`sample_basis`] then samples it on a pixel grid with Gaussian rings.

mod angular;
mod sampling;

use std::collections::HashMap;
use std::sync::Arc;

pub use angular::{angular_basis, AngularBasisElement, Phase};
pub use sampling::{expand_kernel, pixel_coordinate, sample_basis, BandlimitPolicy, BlockWeights, RadialProfile, SampledElement, SteerableBasis};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::representation::{IrrepId, RepKind, Representation};

/// One continuous basis element `k(φ) = Q_outᵀ κ̄(φ) Q_in`, restricted to a
/// block pair `(out field, in field)` of the full kernel.
#[derive(Clone, Debug)]
pub struct SymbolicElement {
    pub out_field: usize,
    pub in_field: usize,
    /// Channel offsets of the two fields in the full kernel.
    pub out_offset: usize,
    pub in_offset: usize,
    pub out_irrep: IrrepId,
    pub in_irrep: IrrepId,
    pub angular: AngularBasisElement,
    /// `Q_outᵀ` columns of the output irrep block (`c_out_field × d_out`).
    left: Arc<Mat>,
    /// `Q_in` rows of the input irrep block (`d_in × c_in_field`).
    right: Arc<Mat>,
}

impl SymbolicElement {
    /// Field-block value `(c_out_field × c_in_field)` at angle `φ`.
    pub fn block(&self, phi: f64) -> Mat {
        &*self.left * self.angular.eval(phi) * &*self.right
    }

    pub fn frequency(&self) -> u32 {
        self.angular.frequency()
    }

    pub fn block_shape(&self) -> (usize, usize) {
        (self.left.nrows(), self.right.ncols())
    }
}

/// Continuous steerable basis for a pair of (direct-sum) representations.
#[derive(Clone, Debug)]
pub struct SymbolicBasis {
    rho_out: Representation,
    rho_in: Representation,
    max_freq: u32,
    elements: Vec<SymbolicElement>,
}

impl SymbolicBasis {
    pub fn rho_out(&self) -> &Representation {
        &self.rho_out
    }

    pub fn rho_in(&self) -> &Representation {
        &self.rho_in
    }

    pub fn max_freq(&self) -> u32 {
        self.max_freq
    }

    pub fn elements(&self) -> &[SymbolicElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn c_out(&self) -> usize {
        self.rho_out.dim()
    }

    pub fn c_in(&self) -> usize {
        self.rho_in.dim()
    }

    /// Element `i` as a full `c_out × c_in` matrix at angle `φ`.
    pub fn eval(&self, i: usize, phi: f64) -> Mat {
        let e = &self.elements[i];
        let mut out = Mat::zeros(self.c_out(), self.c_in());
        let b = e.block(phi);
        out.view_mut((e.out_offset, e.in_offset), b.shape()).copy_from(&b);
        out
    }
}

/// Splits a representation into its field summands.
pub(crate) fn fields_of(rho: &Representation) -> Vec<Representation> {
    if rho.kind() == &RepKind::DirectSum {
        rho.components().to_vec()
    } else {
        vec![rho.clone()]
    }
}

type BlockCache = HashMap<(usize, usize), Arc<Vec<BlockElement>>>;

#[derive(Clone, Debug)]
struct BlockElement {
    out_irrep: IrrepId,
    in_irrep: IrrepId,
    angular: AngularBasisElement,
    left: Arc<Mat>,
    right: Arc<Mat>,
}

/// Basis of one field pair, ordered by output irrep block, input irrep block,
/// then angular element.
fn block_basis(out: &Representation, inp: &Representation, max_freq: u32) -> Result<Vec<BlockElement>> {
    let group = out.group();
    let dout = out.decomposition()?;
    let din = inp.decomposition()?;
    let lefts: Vec<Arc<Mat>> = (0..dout.irreps().len())
        .map(|i| Arc::new(dout.block_rows(i).transpose()))
        .collect();
    let rights: Vec<Arc<Mat>> = (0..din.irreps().len()).map(|j| Arc::new(din.block_rows(j))).collect();
    let mut out_elems = Vec::new();
    for (i, &po) in dout.irreps().iter().enumerate() {
        for (j, &pi) in din.irreps().iter().enumerate() {
            for angular in angular_basis(group, po, pi, max_freq)? {
                out_elems.push(BlockElement {
                    out_irrep: po,
                    in_irrep: pi,
                    angular,
                    left: lefts[i].clone(),
                    right: rights[j].clone(),
                });
            }
        }
    }
    Ok(out_elems)
}

/// Continuous steerable basis for `ρ_out ← ρ_in` with angular frequencies up to
/// `max_freq`.
///
/// Direct sums are treated field by field; identical representation pairs
/// (same underlying object) share one computed block basis.
pub fn full_basis(rho_out: &Representation, rho_in: &Representation, max_freq: u32) -> Result<SymbolicBasis> {
    if rho_out.group() != rho_in.group() {
        return Err(Error::GroupMismatch(rho_out.group(), rho_in.group()));
    }
    let outs = fields_of(rho_out);
    let ins = fields_of(rho_in);
    let mut cache = BlockCache::new();
    let mut elements = Vec::new();
    let mut oo = 0;
    for (fo, ro) in outs.iter().enumerate() {
        let mut io = 0;
        for (fi, ri) in ins.iter().enumerate() {
            let key = (ro.ptr_id(), ri.ptr_id());
            let blocks = match cache.get(&key) {
                Some(b) => b.clone(),
                None => {
                    let b = Arc::new(block_basis(ro, ri, max_freq)?);
                    cache.insert(key, b.clone());
                    b
                }
            };
            elements.extend(blocks.iter().map(|b| SymbolicElement {
                out_field: fo,
                in_field: fi,
                out_offset: oo,
                in_offset: io,
                out_irrep: b.out_irrep,
                in_irrep: b.in_irrep,
                angular: b.angular,
                left: b.left.clone(),
                right: b.right.clone(),
            }));
            io += ri.dim();
        }
        oo += ro.dim();
    }
    Ok(SymbolicBasis {
        rho_out: rho_out.clone(),
        rho_in: rho_in.clone(),
        max_freq,
        elements,
    })
}
