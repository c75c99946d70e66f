//! Equivariant nonlinearities and invariant maps acting per pixel.

use std::f64::consts::TAU;

use ndarray::{Array3, Axis};

use crate::error::{Error, Result};
use crate::field::{FeatureField, FieldType};
use crate::group::{Group, GroupElement};
use crate::representation::{IrrepId, RepKind, Representation};
use crate::scalar::Scalar;

fn sigmoid<T: Scalar>(x: T) -> T {
    T::one() / (T::one() + (-x).exp())
}

/// Elements used to inspect a representation: generators of a finite group, a
/// fixed sample of a continuous one.
fn probe_elements(group: Group) -> Vec<GroupElement> {
    group.generators().unwrap_or_else(|| group.sample_elements(16, 0))
}

/// One-dimensional and fixed by every inspected element.
fn is_scalar(rep: &Representation) -> bool {
    rep.dim() == 1
        && probe_elements(rep.group())
            .iter()
            .all(|g| rep.matrix(g).map(|m| m[(0, 0)] == 1.0).unwrap_or(false))
}

fn scalar_type(group: Group, n: usize) -> Result<FieldType> {
    FieldType::repeated(&Representation::trivial(group), n)
}

/// Rescales each field vector by `η(|v|)/|v|`, with `0` at `|v| = 0`.
fn norm_map<T: Scalar>(f: &FeatureField<T>, eta: impl Fn(usize, T) -> T) -> FeatureField<T> {
    let mut out = f.clone();
    let ft = f.field_type().clone();
    let data = out.data_mut();
    let (_, h, w) = data.dim();
    for i in 0..ft.len() {
        let r = ft.channels(i);
        for a in 0..h {
            for b in 0..w {
                let n = r.clone().fold(T::zero(), |acc, c| acc + data[[c, a, b]] * data[[c, a, b]]).sqrt();
                let scale = if n > T::zero() { eta(i, n) / n } else { T::zero() };
                for c in r.clone() {
                    data[[c, a, b]] *= scale;
                }
            }
        }
    }
    out
}

/// `v ↦ ReLU(|v| − bᵢ) · v/|v|` per field, one nonnegative bias per field.
pub fn norm_relu<T: Scalar>(f: &FeatureField<T>, biases: &[T]) -> Result<FeatureField<T>> {
    if biases.len() != f.field_type().len() {
        return Err(Error::Shape(format!(
            "{} biases for {} fields",
            biases.len(),
            f.field_type().len()
        )));
    }
    if biases.iter().any(|b| b.is_nan() || *b < T::zero()) {
        return Err(Error::InvalidArgument("norm-ReLU biases must be nonnegative".into()));
    }
    Ok(norm_map(f, |i, n| (n - biases[i]).max(T::zero())))
}

/// `v ↦ |v|²/(|v|² + 1) · v/|v|` per field.
pub fn squash<T: Scalar>(f: &FeatureField<T>) -> FeatureField<T> {
    norm_map(f, |_, n| n * n / (n * n + T::one()))
}

/// Scales field `i` by `sigmoid(gate_i)`; `gates` holds one scalar field per field of `f`.
pub fn gated<T: Scalar>(f: &FeatureField<T>, gates: &FeatureField<T>) -> Result<FeatureField<T>> {
    let ft = f.field_type();
    if gates.field_type().len() != ft.len() || gates.field_type().total_dim() != ft.len() {
        return Err(Error::Shape(format!(
            "{} gate channels for {} fields",
            gates.field_type().total_dim(),
            ft.len()
        )));
    }
    if !gates.field_type().representations().iter().all(is_scalar) {
        return Err(Error::Type("gates must be scalar fields".into()));
    }
    if gates.data().dim().1 != f.height() || gates.data().dim().2 != f.width() {
        return Err(Error::Shape("gate grid differs from the feature grid".into()));
    }
    let mut out = f.clone();
    let data = out.data_mut();
    for i in 0..ft.len() {
        let g = gates.data().index_axis(Axis(0), i);
        for c in ft.channels(i) {
            let mut ch = data.index_axis_mut(Axis(0), c);
            ch.zip_mut_with(&g, |v, &s| *v *= sigmoid(s));
        }
    }
    Ok(out)
}

/// Applies `func` entrywise; every field must transform by permutation matrices.
pub fn pointwise<T: Scalar>(f: &FeatureField<T>, func: impl Fn(T) -> T) -> Result<FeatureField<T>> {
    require_permutation(f.field_type())?;
    let mut out = f.clone();
    out.data_mut().mapv_inplace(func);
    Ok(out)
}

/// Entrywise `max(x, 0)` on permutation fields.
pub fn relu<T: Scalar>(f: &FeatureField<T>) -> Result<FeatureField<T>> {
    pointwise(f, |x| x.max(T::zero()))
}

fn require_permutation(ft: &FieldType) -> Result<()> {
    match ft.representations().iter().find(|r| !r.is_permutation()) {
        Some(r) => Err(Error::Type(format!("{r} does not act by permutations"))),
        None => Ok(()),
    }
}

/// Maps each regular `C_N` field to a `ψ₁` field `m · (cos θ, sin θ)` where `m`
/// is the maximal entry and `θ = 2π·argmax/N`; ties go to the lowest index.
///
/// Requires `N ≥ 3`, where `ψ₁` is two-dimensional.
pub fn vector_field_nonlin<T: Scalar>(f: &FeatureField<T>) -> Result<FeatureField<T>> {
    let ft = f.field_type();
    let group = ft.group();
    let n = match group {
        Group::Cyclic { n } if n >= 3 => n as usize,
        _ => return Err(Error::Type(format!("vector-field nonlinearity needs C_N with N ≥ 3, got {group}"))),
    };
    if ft.representations().iter().any(|r| r.kind() != &RepKind::Regular) {
        return Err(Error::Type("vector-field nonlinearity needs regular fields".into()));
    }
    let psi1 = Representation::irrep(IrrepId::new(group, 0, 1)?);
    let out_type = FieldType::repeated(&psi1, ft.len())?;
    let (h, w) = (f.height(), f.width());
    let mut data = Array3::<T>::zeros((2 * ft.len(), h, w));
    let src = f.data();
    for i in 0..ft.len() {
        let base = ft.offsets()[i];
        for a in 0..h {
            for b in 0..w {
                let mut best = 0;
                for p in 1..n {
                    if src[[base + p, a, b]] > src[[base + best, a, b]] {
                        best = p;
                    }
                }
                let m = src[[base + best, a, b]];
                let (c, s) = crate::group::cos_sin(TAU * best as f64 / n as f64);
                data[[2 * i, a, b]] = m * T::from_f64_lossy(c);
                data[[2 * i + 1, a, b]] = m * T::from_f64_lossy(s);
            }
        }
    }
    FeatureField::new(out_type, data)
}

/// Maximum over the channels of each permutation field.
pub fn group_pool<T: Scalar>(f: &FeatureField<T>) -> Result<FeatureField<T>> {
    let ft = f.field_type();
    require_permutation(ft)?;
    let (h, w) = (f.height(), f.width());
    let mut data = Array3::<T>::zeros((ft.len(), h, w));
    for i in 0..ft.len() {
        for a in 0..h {
            for b in 0..w {
                data[[i, a, b]] = ft
                    .channels(i)
                    .map(|c| f.data()[[c, a, b]])
                    .fold(T::neg_infinity(), T::max);
            }
        }
    }
    FeatureField::new(scalar_type(ft.group(), ft.len())?, data)
}

/// Keeps scalar fields and replaces every other field by its norm.
pub fn norm_invariant_map<T: Scalar>(f: &FeatureField<T>) -> Result<FeatureField<T>> {
    let ft = f.field_type();
    let (h, w) = (f.height(), f.width());
    let mut data = Array3::<T>::zeros((ft.len(), h, w));
    for (i, rep) in ft.representations().iter().enumerate() {
        let scalar = is_scalar(rep);
        for a in 0..h {
            for b in 0..w {
                data[[i, a, b]] = if scalar {
                    f.data()[[ft.offsets()[i], a, b]]
                } else {
                    ft.channels(i)
                        .fold(T::zero(), |acc, c| acc + f.data()[[c, a, b]] * f.data()[[c, a, b]])
                        .sqrt()
                };
            }
        }
    }
    FeatureField::new(scalar_type(ft.group(), ft.len())?, data)
}

fn induced_frequency(rep: &Representation) -> Option<u32> {
    match rep.kind() {
        RepKind::InducedSo2 { frequency } => Some(*frequency),
        _ => None,
    }
}

/// Norm-ReLU on the two `ψ_k` subfields of each `Ind_{SO(2)}^{O(2)} ψ_k` field
/// (`k > 0`), with one bias shared by both subfields.
pub fn ind_norm_relu<T: Scalar>(f: &FeatureField<T>, biases: &[T]) -> Result<FeatureField<T>> {
    let ft = f.field_type();
    if ft.representations().iter().any(|r| !matches!(induced_frequency(r), Some(k) if k > 0)) {
        return Err(Error::Type("ind_norm_relu needs induced O(2) fields with k > 0".into()));
    }
    if biases.len() != ft.len() {
        return Err(Error::Shape(format!("{} biases for {} fields", biases.len(), ft.len())));
    }
    if biases.iter().any(|b| b.is_nan() || *b < T::zero()) {
        return Err(Error::InvalidArgument("norm-ReLU biases must be nonnegative".into()));
    }
    let mut out = f.clone();
    let data = out.data_mut();
    let (_, h, w) = data.dim();
    for (&base, &bias) in ft.offsets().iter().zip(biases) {
        for sub in [base, base + 2] {
            for a in 0..h {
                for b in 0..w {
                    let (x, y) = (data[[sub, a, b]], data[[sub + 1, a, b]]);
                    let n = (x * x + y * y).sqrt();
                    let scale = if n > T::zero() { (n - bias).max(T::zero()) / n } else { T::zero() };
                    data[[sub, a, b]] = x * scale;
                    data[[sub + 1, a, b]] = y * scale;
                }
            }
        }
    }
    Ok(out)
}

/// Gates the two subfields of each induced O(2) field with the two channels of
/// a matching `Ind_{SO(2)}^{O(2)} ψ₀` gate field.
pub fn ind_gate<T: Scalar>(f: &FeatureField<T>, gates: &FeatureField<T>) -> Result<FeatureField<T>> {
    let ft = f.field_type();
    let gt = gates.field_type();
    if ft.representations().iter().any(|r| induced_frequency(r).is_none()) {
        return Err(Error::Type("ind_gate needs induced O(2) fields".into()));
    }
    if gt.len() != ft.len() || gt.representations().iter().any(|r| induced_frequency(r) != Some(0)) {
        return Err(Error::Shape("ind_gate needs one induced ψ₀ gate field per field".into()));
    }
    if gates.height() != f.height() || gates.width() != f.width() {
        return Err(Error::Shape("gate grid differs from the feature grid".into()));
    }
    let mut out = f.clone();
    let data = out.data_mut();
    for i in 0..ft.len() {
        let r = ft.channels(i);
        let half = r.len() / 2;
        for (k, c) in r.clone().enumerate() {
            let g = gates.data().index_axis(Axis(0), gt.offsets()[i] + k / half);
            let mut ch = data.index_axis_mut(Axis(0), c);
            ch.zip_mut_with(&g, |v, &s| *v *= sigmoid(s));
        }
    }
    Ok(out)
}

/// Entrywise absolute value of one-dimensional sign fields such as `ψ_{1,0}`;
/// the output is invariant.
pub fn absolute_invariant<T: Scalar>(f: &FeatureField<T>) -> Result<FeatureField<T>> {
    let ft = f.field_type();
    let sign_like = |r: &Representation| {
        r.dim() == 1
            && probe_elements(r.group())
                .iter()
                .all(|g| r.matrix(g).map(|m| m[(0, 0)].abs() == 1.0).unwrap_or(false))
    };
    if !ft.representations().iter().all(sign_like) {
        return Err(Error::Type("absolute_invariant needs one-dimensional sign fields".into()));
    }
    let data = f.data().mapv(|v| v.abs());
    FeatureField::new(scalar_type(ft.group(), ft.len())?, data)
}

/// Reinterprets a field type over a subgroup.
pub fn restrict_field_type(ft: &FieldType, subgroup: Group) -> Result<FieldType> {
    ft.restrict(subgroup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::representation::{induced_so2_to_o2, regular_representation};

    fn pixel(ft: FieldType, v: &[f64]) -> FeatureField<f64> {
        FeatureField::new(ft, Array3::from_shape_vec((v.len(), 1, 1), v.to_vec()).unwrap()).unwrap()
    }

    fn vector_type() -> FieldType {
        let g = Group::SO2;
        FieldType::new(g, vec![Representation::irrep(IrrepId::new(g, 0, 1).unwrap())]).unwrap()
    }

    #[test]
    fn norm_relu_examples() {
        let out = norm_relu(&pixel(vector_type(), &[3.0, 4.0]), &[2.0]).unwrap();
        assert!((out.data()[[0, 0, 0]] - 1.8).abs() < 1e-15 && (out.data()[[1, 0, 0]] - 2.4).abs() < 1e-15);
        let out = norm_relu(&pixel(vector_type(), &[0.3, 0.4]), &[0.5]).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
        let out = norm_relu(&pixel(vector_type(), &[0.3, -0.4]), &[0.0]).unwrap();
        assert!((out.data()[[1, 0, 0]] + 0.4).abs() < 1e-15);
        assert!(norm_relu(&pixel(vector_type(), &[1.0, 0.0]), &[-1.0]).is_err());
    }

    #[test]
    fn squash_examples() {
        let z = squash(&pixel(vector_type(), &[0.0, 0.0]));
        assert!(z.data().iter().all(|&v| v == 0.0));
        let h = squash(&pixel(vector_type(), &[1.0, 0.0]));
        assert!((h.data()[[0, 0, 0]] - 0.5).abs() < 1e-15);
        let t = squash(&pixel(vector_type(), &[0.0, 3.0]));
        assert!((t.data()[[1, 0, 0]] - 0.9).abs() < 1e-15);
    }

    #[test]
    fn gate_examples() {
        let gates = |v: f64| pixel(scalar_type(Group::SO2, 1).unwrap(), &[v]);
        let out = gated(&pixel(vector_type(), &[2.0, 0.0]), &gates(0.0)).unwrap();
        assert_eq!(out.data()[[0, 0, 0]], 1.0);
        let out = gated(&pixel(vector_type(), &[2.0, 0.0]), &gates(50.0)).unwrap();
        assert!((out.data()[[0, 0, 0]] - 2.0).abs() < 1e-15);
        assert!(gated(&pixel(vector_type(), &[2.0, 0.0]), &pixel(vector_type(), &[0.0, 0.0])).is_err());
    }

    #[test]
    fn vector_field_examples() {
        let g = Group::cyclic(4);
        let ft = FieldType::new(g, vec![regular_representation(g).unwrap()]).unwrap();
        let out = vector_field_nonlin(&pixel(ft.clone(), &[0.1, 0.9, 0.2, 0.3])).unwrap();
        assert_eq!(out.data().iter().copied().collect::<Vec<_>>(), vec![0.0, 0.9]);
        let out = vector_field_nonlin(&pixel(ft.clone(), &[1.0, 0.0, 0.0, 0.0])).unwrap();
        assert_eq!(out.data().iter().copied().collect::<Vec<_>>(), vec![1.0, 0.0]);
        let out = vector_field_nonlin(&pixel(ft, &[0.7; 4])).unwrap();
        assert_eq!(out.data().iter().copied().collect::<Vec<_>>(), vec![0.7, 0.0]);
        let c2 = Group::cyclic(2);
        let ft2 = FieldType::new(c2, vec![regular_representation(c2).unwrap()]).unwrap();
        assert!(vector_field_nonlin(&pixel(ft2, &[1.0, 0.0])).is_err());
    }

    #[test]
    fn pointwise_requires_permutations() {
        let g = Group::cyclic(4);
        let reg = FieldType::new(g, vec![regular_representation(g).unwrap()]).unwrap();
        assert!(relu(&pixel(reg, &[-1.0, 2.0, 0.0, 1.0])).is_ok());
        let psi = FieldType::new(g, vec![Representation::irrep(IrrepId::new(g, 0, 1).unwrap())]).unwrap();
        assert!(relu(&pixel(psi, &[-1.0, 2.0])).is_err());
        let conj = regular_representation(g)
            .unwrap()
            .decomposition()
            .unwrap()
            .q()
            .clone();
        let twisted = regular_representation(g).unwrap().conjugated(&conj).unwrap();
        let ft = FieldType::new(g, vec![twisted]).unwrap();
        assert!(group_pool(&pixel(ft, &[1.0, 2.0, 3.0, 4.0])).is_err());
    }

    #[test]
    fn induced_checks() {
        let ind1 = FieldType::new(Group::O2, vec![induced_so2_to_o2(1)]).unwrap();
        let ind0 = FieldType::new(Group::O2, vec![induced_so2_to_o2(0)]).unwrap();
        let f = pixel(ind1.clone(), &[3.0, 4.0, 0.0, 1.0]);
        let out = ind_norm_relu(&f, &[2.0]).unwrap();
        let v: Vec<f64> = out.data().iter().copied().collect();
        assert!((v[0] - 1.8).abs() < 1e-15 && (v[1] - 2.4).abs() < 1e-15 && v[3] == 0.0);
        assert!(ind_norm_relu(&pixel(ind0.clone(), &[1.0, 2.0]), &[0.0]).is_err());
        let out = ind_gate(&f, &pixel(ind0, &[0.0, 100.0])).unwrap();
        let v: Vec<f64> = out.data().iter().copied().collect();
        assert_eq!(v[0], 1.5);
        assert!((v[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn absolute_examples() {
        let o2 = Group::O2;
        let sign = FieldType::new(o2, vec![Representation::irrep(IrrepId::new(o2, 1, 0).unwrap())]).unwrap();
        let out = absolute_invariant(&pixel(sign, &[-2.5])).unwrap();
        assert_eq!(out.data()[[0, 0, 0]], 2.5);
        assert!(absolute_invariant(&pixel(vector_type(), &[1.0, 0.0])).is_err());
    }
}
