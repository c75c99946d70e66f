use std::sync::Arc;

use ndarray::{s, Array4, Array5, ArrayView4};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{SymbolicBasis, AngularBasisElement};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::linalg::{min_singular_value, Mat};
use crate::representation::{IrrepId, Representation};
use crate::scalar::Scalar;

/// A Gaussian ring `exp(−(r − R)² / (2σ²))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ring {
    pub radius: f64,
    pub sigma: f64,
}

/// Radial profile: a list of Gaussian rings with strictly increasing radii.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    rings: Vec<Ring>,
}

impl RadialProfile {
    pub fn new(rings: Vec<Ring>) -> Result<Self> {
        if rings.is_empty() {
            return Err(Error::InvalidArgument("radial profile needs at least one ring".into()));
        }
        for (i, r) in rings.iter().enumerate() {
            if !(r.radius >= 0.0 && r.sigma > 0.0 && r.radius.is_finite() && r.sigma.is_finite()) {
                return Err(Error::InvalidArgument(format!("invalid ring {r:?}")));
            }
            if i > 0 && r.radius <= rings[i - 1].radius {
                return Err(Error::InvalidArgument("ring radii must be strictly increasing".into()));
            }
        }
        Ok(Self { rings })
    }

    /// Rings at `R = 0, 1, …, ⌊S/2⌋` with `σ = 0.6`, and `σ = 0.4` on the outermost ring.
    pub fn default_for(size: usize) -> Self {
        let n = size / 2;
        let rings = (0..=n)
            .map(|r| Ring {
                radius: r as f64,
                sigma: if r == n { 0.4 } else { 0.6 },
            })
            .collect();
        Self { rings }
    }

    /// Default radii with one shared width.
    pub fn uniform(size: usize, sigma: f64) -> Result<Self> {
        Self::new((0..=size / 2).map(|r| Ring { radius: r as f64, sigma }).collect())
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    /// Weight of ring `i` at distance `r` from the origin.
    pub fn value(&self, i: usize, r: f64) -> f64 {
        let ring = self.rings[i];
        let d = r - ring.radius;
        (-(d * d) / (2.0 * ring.sigma * ring.sigma)).exp()
    }
}

/// Maximum angular frequency kept on each ring.
#[derive(Clone, Debug, PartialEq)]
pub enum BandlimitPolicy {
    /// Explicit cutoff per ring.
    PerRing(Vec<u32>),
    /// `⌊c · R⌋`.
    Factor(f64),
}

impl BandlimitPolicy {
    /// `[0, 2, 2]` for 5×5 kernels, `[0, 2, 3, 2]` for 7×7, `⌊2R⌋` otherwise.
    pub fn default_for(size: usize) -> Self {
        match size {
            5 => BandlimitPolicy::PerRing(vec![0, 2, 2]),
            7 => BandlimitPolicy::PerRing(vec![0, 2, 3, 2]),
            _ => BandlimitPolicy::Factor(2.0),
        }
    }

    /// Cutoff of ring `index` at radius `radius`; a ring at the origin always gets 0.
    pub fn cutoff(&self, index: usize, radius: f64) -> u32 {
        if radius == 0.0 {
            return 0;
        }
        match self {
            BandlimitPolicy::PerRing(v) => v.get(index).copied().unwrap_or(0),
            BandlimitPolicy::Factor(c) => (c * radius).floor().max(0.0) as u32,
        }
    }

    /// Largest cutoff over the rings of `profile`.
    pub fn max_cutoff(&self, profile: &RadialProfile) -> u32 {
        profile
            .rings()
            .iter()
            .enumerate()
            .map(|(i, r)| self.cutoff(i, r.radius))
            .max()
            .unwrap_or(0)
    }
}

/// Metadata of one sampled basis element.
#[derive(Clone, Debug)]
pub struct SampledElement {
    /// Index into the symbolic basis.
    pub symbolic: usize,
    pub ring: usize,
    pub radius: f64,
    pub out_field: usize,
    pub in_field: usize,
    pub out_irrep: IrrepId,
    pub in_irrep: IrrepId,
    pub angular: AngularBasisElement,
    /// L2 norm of the raw samples, divided out of the stored tensor.
    pub norm: f64,
}

impl SampledElement {
    pub fn frequency(&self) -> u32 {
        self.angular.frequency()
    }
}

/// A steerable basis sampled on an `S × S` grid; tensor shape `(d, c_out, c_in, S, S)`.
#[derive(Clone, Debug)]
pub struct SteerableBasis<T: Scalar> {
    symbolic: Arc<SymbolicBasis>,
    profile: RadialProfile,
    size: usize,
    elements: Vec<SampledElement>,
    tensor: Array5<T>,
}

/// Continuous coordinate of pixel `(row a, col b)` on an `S × S` grid, y pointing up.
pub fn pixel_coordinate(size: usize, a: usize, b: usize) -> [f64; 2] {
    let c = (size as f64 - 1.0) / 2.0;
    [b as f64 - c, c - a as f64]
}

/// Samples a symbolic basis on an `S × S` grid.
///
/// Elements are ordered by field pair, then ring, then symbolic element. Each
/// retained `(ring, element)` has `|μ|` within the ring's cutoff; the origin ring
/// keeps only angularly constant elements, and the origin pixel is nonzero only
/// for `μ = 0`. Every element is L2-normalized over the whole tensor; elements
/// that vanish on the grid are dropped.
pub fn sample_basis<T: Scalar>(
    basis: &SymbolicBasis,
    size: usize,
    profile: &RadialProfile,
    policy: &BandlimitPolicy,
) -> Result<SteerableBasis<T>> {
    if size.is_multiple_of(2) || size == 0 {
        return Err(Error::InvalidArgument(format!("kernel size must be odd, got {size}")));
    }
    let half = (size / 2) as f64;
    if profile.rings().iter().any(|r| r.radius > half) {
        return Err(Error::InvalidArgument(format!("ring radius exceeds ⌊S/2⌋ = {half}")));
    }
    if let BandlimitPolicy::PerRing(v) = policy {
        if v.len() != profile.rings().len() {
            return Err(Error::InvalidArgument(format!(
                "{} cutoffs for {} rings",
                v.len(),
                profile.rings().len()
            )));
        }
    }
    let (c_out, c_in) = (basis.c_out(), basis.c_in());
    let mut coords = Vec::with_capacity(size * size);
    for a in 0..size {
        for b in 0..size {
            let [x, y] = pixel_coordinate(size, a, b);
            coords.push((a, b, (x * x + y * y).sqrt(), y.atan2(x)));
        }
    }

    let syms = basis.elements();
    let mut groups: Vec<std::ops::Range<usize>> = Vec::new();
    let mut start = 0;
    for i in 1..=syms.len() {
        if i == syms.len() || (syms[i].out_field, syms[i].in_field) != (syms[start].out_field, syms[start].in_field) {
            groups.push(start..i);
            start = i;
        }
    }

    let mut meta = Vec::new();
    let mut data: Vec<f64> = Vec::new();
    let per = c_out * c_in * size * size;
    for range in groups {
        for (ri, ring) in profile.rings().iter().enumerate() {
            let cutoff = policy.cutoff(ri, ring.radius);
            for k in range.clone() {
                let e = &syms[k];
                if e.frequency() > cutoff {
                    continue;
                }
                let mut buf = Array4::<f64>::zeros((c_out, c_in, size, size));
                let (bo, bi) = e.block_shape();
                for &(a, b, r, phi) in &coords {
                    let w = profile.value(ri, r);
                    let blk = if r == 0.0 {
                        if e.frequency() != 0 {
                            continue;
                        }
                        e.block(0.0)
                    } else {
                        e.block(phi)
                    };
                    for o in 0..bo {
                        for i in 0..bi {
                            buf[[e.out_offset + o, e.in_offset + i, a, b]] = w * blk[(o, i)];
                        }
                    }
                }
                let norm = buf.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm <= 1e-12 {
                    continue;
                }
                data.extend(buf.iter().map(|v| v / norm));
                meta.push(SampledElement {
                    symbolic: k,
                    ring: ri,
                    radius: ring.radius,
                    out_field: e.out_field,
                    in_field: e.in_field,
                    out_irrep: e.out_irrep,
                    in_irrep: e.in_irrep,
                    angular: e.angular,
                    norm,
                });
            }
        }
    }
    let d = meta.len();
    debug_assert_eq!(data.len(), d * per);
    let tensor = Array5::from_shape_vec((d, c_out, c_in, size, size), data.into_iter().map(T::from_f64_lossy).collect())
        .map_err(|e| Error::Shape(e.to_string()))?;
    Ok(SteerableBasis {
        symbolic: Arc::new(basis.clone()),
        profile: profile.clone(),
        size,
        elements: meta,
        tensor,
    })
}

impl<T: Scalar> SteerableBasis<T> {
    pub fn group(&self) -> Group {
        self.symbolic.rho_in().group()
    }

    pub fn rho_in(&self) -> &Representation {
        self.symbolic.rho_in()
    }

    pub fn rho_out(&self) -> &Representation {
        self.symbolic.rho_out()
    }

    pub fn symbolic(&self) -> &SymbolicBasis {
        &self.symbolic
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Number of basis elements `d`.
    pub fn dim(&self) -> usize {
        self.elements.len()
    }

    pub fn c_out(&self) -> usize {
        self.symbolic.c_out()
    }

    pub fn c_in(&self) -> usize {
        self.symbolic.c_in()
    }

    pub fn elements(&self) -> &[SampledElement] {
        &self.elements
    }

    pub fn tensor(&self) -> &Array5<T> {
        &self.tensor
    }

    /// Sampled element `i`, shape `(c_out, c_in, S, S)`.
    pub fn element(&self, i: usize) -> ArrayView4<'_, T> {
        self.tensor.slice(s![i, .., .., .., ..])
    }

    pub fn frequencies(&self) -> Vec<u32> {
        self.elements.iter().map(SampledElement::frequency).collect()
    }

    pub fn rings(&self) -> Vec<usize> {
        self.elements.iter().map(|e| e.ring).collect()
    }

    /// Continuous form of element `i` at the point `x`, on the same scale as the
    /// sampled tensor.
    pub fn continuous(&self, i: usize, x: [f64; 2]) -> Mat {
        let e = &self.elements[i];
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let w = self.profile.value(e.ring, r) / e.norm;
        if r == 0.0 && e.frequency() != 0 {
            return Mat::zeros(self.c_out(), self.c_in());
        }
        self.symbolic.eval(e.symbolic, x[1].atan2(x[0])) * w
    }

    /// Smallest singular value of the `(c_out·c_in·S·S) × d` matrix of flattened elements.
    pub fn min_singular_value(&self) -> f64 {
        let d = self.dim();
        if d == 0 {
            return 0.0;
        }
        let per = self.tensor.len() / d;
        let flat: Vec<f64> = self.tensor.iter().map(|v| v.to_f64_lossy()).collect();
        // column-major fill: element i becomes column i
        min_singular_value(&Mat::from_vec(per, d, flat))
    }
}

/// Expansion coefficients, one per basis element.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockWeights<T: Scalar> {
    coefficients: Vec<T>,
}

impl<T: Scalar> BlockWeights<T> {
    pub fn new(coefficients: Vec<T>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite".into()));
        }
        Ok(Self { coefficients })
    }

    pub fn zeros(d: usize) -> Self {
        Self {
            coefficients: vec![T::zero(); d],
        }
    }

    /// The unit vector `e_i`.
    pub fn unit(d: usize, i: usize) -> Self {
        let mut w = Self::zeros(d);
        w.coefficients[i] = T::one();
        w
    }

    /// Standard normal weights from a seeded generator.
    pub fn random(d: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            coefficients: (0..d)
                .map(|_| T::from_f64_lossy(StandardNormal.sample(&mut rng)))
                .collect(),
        }
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            coefficients: self.coefficients.iter().map(|&c| c * a).collect(),
        }
    }
}

/// `Σᵢ wᵢ · elementᵢ`, shape `(c_out, c_in, S, S)`.
pub fn expand_kernel<T: Scalar>(basis: &SteerableBasis<T>, weights: &BlockWeights<T>) -> Result<Array4<T>> {
    if weights.len() != basis.dim() {
        return Err(Error::Shape(format!(
            "{} weights for a basis of dimension {}",
            weights.len(),
            basis.dim()
        )));
    }
    let mut out = Array4::<T>::zeros((basis.c_out(), basis.c_in(), basis.size, basis.size));
    for (i, &w) in weights.coefficients().iter().enumerate() {
        if w == T::zero() {
            continue;
        }
        out.zip_mut_with(&basis.element(i), |o, &e| *o += w * e);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::full_basis;

    #[test]
    fn default_constants() {
        assert_eq!(BandlimitPolicy::default_for(5), BandlimitPolicy::PerRing(vec![0, 2, 2]));
        assert_eq!(BandlimitPolicy::default_for(7), BandlimitPolicy::PerRing(vec![0, 2, 3, 2]));
        assert_eq!(BandlimitPolicy::default_for(9).cutoff(3, 3.0), 6);
        assert_eq!(BandlimitPolicy::Factor(3.0).cutoff(0, 0.0), 0);
        let p = RadialProfile::default_for(5);
        assert_eq!(p.rings().len(), 3);
        assert_eq!(p.rings()[2].sigma, 0.4);
        assert_eq!(p.rings()[1].sigma, 0.6);
        assert!((p.value(1, 1.0) - 1.0).abs() < 1e-15);
        assert!(p.value(1, 3.0) < p.value(1, 2.0));
    }

    #[test]
    fn rejects_bad_input() {
        let t = Representation::trivial(Group::SO2);
        let b = full_basis(&t, &t, 2).unwrap();
        let p = RadialProfile::default_for(5);
        assert!(sample_basis::<f64>(&b, 4, &p, &BandlimitPolicy::default_for(5)).is_err());
        assert!(sample_basis::<f64>(&b, 3, &p, &BandlimitPolicy::Factor(2.0)).is_err());
        assert!(sample_basis::<f64>(&b, 5, &p, &BandlimitPolicy::PerRing(vec![0, 1])).is_err());
        assert!(RadialProfile::new(vec![Ring { radius: 1.0, sigma: 0.5 }, Ring { radius: 1.0, sigma: 0.5 }]).is_err());
    }

    #[test]
    fn isotropic_is_rotation_symmetric() {
        let t = Representation::trivial(Group::SO2);
        let b = full_basis(&t, &t, 2).unwrap();
        for size in [3, 5, 7, 9] {
            let sb = sample_basis::<f64>(&b, size, &RadialProfile::default_for(size), &BandlimitPolicy::default_for(size)).unwrap();
            assert_eq!(sb.dim(), size / 2 + 1);
            for i in 0..sb.dim() {
                let e = sb.element(i);
                let img = e.slice(s![0, 0, .., ..]);
                for a in 0..size {
                    for c in 0..size {
                        // rotating by 90° maps (a, c) to (size-1-c, a)
                        assert_eq!(img[[a, c]].to_bits(), img[[size - 1 - c, a]].to_bits());
                    }
                }
                let n: f64 = e.iter().map(|v| v * v).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn expansion_is_linear() {
        let g = Group::cyclic(4);
        let r = crate::representation::regular_representation(g).unwrap();
        let b = full_basis(&r, &r, 2).unwrap();
        let sb = sample_basis::<f64>(&b, 5, &RadialProfile::default_for(5), &BandlimitPolicy::default_for(5)).unwrap();
        let d = sb.dim();
        assert!(expand_kernel(&sb, &BlockWeights::zeros(d)).unwrap().iter().all(|&v| v == 0.0));
        assert_eq!(expand_kernel(&sb, &BlockWeights::unit(d, 0)).unwrap(), sb.element(0));
        let w = BlockWeights::random(d, 1);
        let a = expand_kernel(&sb, &w).unwrap() * 2.0;
        let b2 = expand_kernel(&sb, &w.scaled(2.0)).unwrap();
        assert!((a - b2).iter().all(|v| v.abs() < 1e-14));
        assert!(expand_kernel(&sb, &BlockWeights::zeros(d + 1)).is_err());
        assert!(sb.min_singular_value() > 1e-8);
    }
}
