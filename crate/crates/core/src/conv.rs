//! Group action on feature fields, steerable convolution and the equivariance
//! harness.

use ndarray::{s, Array2, Array3, ArrayView4, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::basis::{expand_kernel, BlockWeights, SteerableBasis};
use crate::error::{Error, Result};
use crate::field::{FeatureField, FieldType};
use crate::group::GroupElement;
use crate::linalg::Mat;
use crate::scalar::Scalar;

/// Coordinates closer than this to an integer are read without interpolation.
const GRID_EPS: f64 = 1e-9;

/// `out(x) = ρ(g) · in(g⁻¹(x − t))`.
///
/// Channels are mixed field by field with `ρᵢ(g)`; the spatial part is an
/// exact index permutation whenever the source coordinates land on pixel
/// centers (quarter turns, axis flips, integer shifts) and bilinear
/// interpolation with a zero exterior otherwise. The identity with `t = 0`
/// returns the input unchanged.
pub fn transform_field<T: Scalar>(f: &FeatureField<T>, g: &GroupElement, t: [f64; 2]) -> Result<FeatureField<T>> {
    let ft = f.field_type();
    let group = ft.group();
    let g = group.canonicalize(g)?;
    if g.is_identity() && t == [0.0, 0.0] {
        return Ok(f.clone());
    }
    let (c, h, w) = f.data().dim();
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;
    let minv = group.point_matrix(&g).transpose();
    let mats: Vec<(usize, Vec<T>, usize)> = ft
        .representations()
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let m = r.matrix(&g)?;
            Ok((ft.offsets()[i], m.transpose().iter().map(|&v| T::from_f64_lossy(v)).collect(), r.dim()))
        })
        .collect::<Result<_>>()?;

    let src = f.data();
    let mut out = Array3::<T>::zeros((c, h, w));
    let mut v = vec![T::zero(); c];
    for a in 0..h {
        for b in 0..w {
            let x = b as f64 - cx - t[0];
            let y = cy - a as f64 - t[1];
            let px = minv[(0, 0)] * x + minv[(0, 1)] * y;
            let py = minv[(1, 0)] * x + minv[(1, 1)] * y;
            let col = px + cx;
            let row = cy - py;
            sample(src, row, col, &mut v);
            for (off, m, d) in &mats {
                for i in 0..*d {
                    let mut acc = T::zero();
                    for j in 0..*d {
                        let r = m[i * d + j];
                        if r != T::zero() {
                            acc += r * v[off + j];
                        }
                    }
                    out[[off + i, a, b]] = acc;
                }
            }
        }
    }
    FeatureField::new(ft.clone(), out)
}

/// Reads all channels at a fractional location, bilinear with a zero exterior.
fn sample<T: Scalar>(src: &Array3<T>, row: f64, col: f64, out: &mut [T]) {
    let (c, h, w) = src.dim();
    let (rr, cr) = (row.round(), col.round());
    let inside = |r: f64, k: f64| r >= 0.0 && k >= 0.0 && r < h as f64 && k < w as f64;
    if (row - rr).abs() < GRID_EPS && (col - cr).abs() < GRID_EPS {
        if inside(rr, cr) {
            for (ch, o) in out.iter_mut().enumerate().take(c) {
                *o = src[[ch, rr as usize, cr as usize]];
            }
        } else {
            out.iter_mut().for_each(|o| *o = T::zero());
        }
        return;
    }
    let (r0, c0) = (row.floor(), col.floor());
    let (fr, fc) = (row - r0, col - c0);
    out.iter_mut().for_each(|o| *o = T::zero());
    for (dr, wr) in [(0.0, 1.0 - fr), (1.0, fr)] {
        for (dc, wc) in [(0.0, 1.0 - fc), (1.0, fc)] {
            let (r, k) = (r0 + dr, c0 + dc);
            let wgt = wr * wc;
            if wgt == 0.0 || !inside(r, k) {
                continue;
            }
            let wt = T::from_f64_lossy(wgt);
            for (ch, o) in out.iter_mut().enumerate().take(c) {
                *o += wt * src[[ch, r as usize, k as usize]];
            }
        }
    }
}

/// Cross-correlation `out(x) = Σ_y K(y) f(x + y)` with stride 1 and zero
/// padding `⌊S/2⌋`; the output keeps the input's `H × W`.
///
/// Rows of the output are computed in parallel.
pub fn convolve<T: Scalar>(f: &FeatureField<T>, kernel: ArrayView4<'_, T>, out_type: &FieldType) -> Result<FeatureField<T>> {
    let (c_out, c_in, kh, kw) = kernel.dim();
    if c_in != f.field_type().total_dim() {
        return Err(Error::Shape(format!(
            "kernel expects {c_in} input channels, field has {}",
            f.field_type().total_dim()
        )));
    }
    if c_out != out_type.total_dim() {
        return Err(Error::Shape(format!(
            "kernel produces {c_out} channels, output type has {}",
            out_type.total_dim()
        )));
    }
    if kh != kw || kh % 2 == 0 {
        return Err(Error::Shape(format!("kernel must be square with odd size, got {kh}x{kw}")));
    }
    let (_, h, w) = f.data().dim();
    let half = (kh / 2) as isize;
    let src = f.data();
    let rows: Vec<Array2<T>> = (0..h)
        .into_par_iter()
        .map(|a| {
            let mut row = Array2::<T>::zeros((c_out, w));
            for ka in 0..kh {
                let ia = a as isize + ka as isize - half;
                if ia < 0 || ia >= h as isize {
                    continue;
                }
                for kb in 0..kw {
                    let shift = kb as isize - half;
                    let b_lo = (-shift).max(0) as usize;
                    let b_hi = (w as isize - shift).min(w as isize).max(0) as usize;
                    if b_lo >= b_hi {
                        continue;
                    }
                    for i in 0..c_in {
                        let line = src.slice(s![i, ia as usize, ..]);
                        for o in 0..c_out {
                            let k = kernel[[o, i, ka, kb]];
                            if k == T::zero() {
                                continue;
                            }
                            let mut dst = row.row_mut(o);
                            for b in b_lo..b_hi {
                                dst[b] += k * line[(b as isize + shift) as usize];
                            }
                        }
                    }
                }
            }
            row
        })
        .collect();
    let mut out = Array3::<T>::zeros((c_out, h, w));
    for (a, row) in rows.into_iter().enumerate() {
        out.index_axis_mut(Axis(1), a).assign(&row);
    }
    FeatureField::new(out_type.clone(), out)
}

/// `‖conv(T_g f) − T_g conv(f)‖ / ‖conv(f)‖` for the kernel expanded from a
/// basis, with transforms about the image center.
pub fn equivariance_error<T: Scalar>(
    in_type: &FieldType,
    out_type: &FieldType,
    basis: &SteerableBasis<T>,
    weights: &BlockWeights<T>,
    g: &GroupElement,
    probe: &FeatureField<T>,
) -> Result<f64> {
    if !probe.field_type().same_layout(in_type) {
        return Err(Error::Type("probe does not match the input field type".into()));
    }
    if basis.c_in() != in_type.total_dim() || basis.c_out() != out_type.total_dim() {
        return Err(Error::Shape("basis does not match the field types".into()));
    }
    let kernel = expand_kernel(basis, weights)?;
    kernel_equivariance_error(kernel.view(), out_type, g, probe)
}

/// [`equivariance_error`] for an explicit kernel tensor.
pub fn kernel_equivariance_error<T: Scalar>(
    kernel: ArrayView4<'_, T>,
    out_type: &FieldType,
    g: &GroupElement,
    probe: &FeatureField<T>,
) -> Result<f64> {
    let base = convolve(probe, kernel, out_type)?;
    let lhs = convolve(&transform_field(probe, g, [0.0, 0.0])?, kernel, out_type)?;
    let rhs = transform_field(&base, g, [0.0, 0.0])?;
    let num = (lhs.data() - rhs.data()).iter().map(|v| v.to_f64_lossy().powi(2)).sum::<f64>().sqrt();
    let den = base.norm().to_f64_lossy();
    Ok(if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    })
}

/// Width `⌊S/2⌋ + ⌈S/2⌉` of the zero border around an equivariance probe
/// for an `S × S` kernel.
pub fn probe_margin(kernel_size: usize) -> usize {
    kernel_size / 2 + kernel_size.div_ceil(2)
}

/// I.i.d. standard normal values inside the square that leaves `margin` zero
/// pixels at each border.
pub fn interior_probe<T: Scalar>(ft: &FieldType, size: usize, margin: usize, seed: u64) -> FeatureField<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut f = FeatureField::zeros(ft.clone(), size, size);
    let c = ft.total_dim();
    if 2 * margin < size {
        let data = f.data_mut();
        for ch in 0..c {
            for a in margin..size - margin {
                for b in margin..size - margin {
                    let v: f64 = StandardNormal.sample(&mut rng);
                    data[[ch, a, b]] = T::from_f64_lossy(v);
                }
            }
        }
    }
    f
}

/// Smooth random field: Gaussian noise blurred with width `sigma`, tapered by
/// `cos²` to zero on the disk that leaves `margin` pixels to the border.
pub fn smooth_probe<T: Scalar>(ft: &FieldType, size: usize, margin: usize, sigma: f64, seed: u64) -> FeatureField<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = ft.total_dim();
    let center = (size as f64 - 1.0) / 2.0;
    let radius = center - margin as f64;
    let taps = (3.0 * sigma).ceil().max(0.0) as isize;
    let kernel: Vec<f64> = (-taps..=taps)
        .map(|i| if sigma > 0.0 { (-(i * i) as f64 / (2.0 * sigma * sigma)).exp() } else { 1.0 })
        .collect();
    let blur = |img: &Mat, along_rows: bool| -> Mat {
        Mat::from_fn(size, size, |a, b| {
            let mut acc = 0.0;
            for (k, &wk) in kernel.iter().enumerate() {
                let d = k as isize - taps;
                let (ra, rb) = if along_rows { (a as isize + d, b as isize) } else { (a as isize, b as isize + d) };
                if ra >= 0 && rb >= 0 && (ra as usize) < size && (rb as usize) < size {
                    acc += wk * img[(ra as usize, rb as usize)];
                }
            }
            acc
        })
    };
    let mut f = FeatureField::zeros(ft.clone(), size, size);
    let data = f.data_mut();
    for ch in 0..c {
        let noise = Mat::from_fn(size, size, |_, _| StandardNormal.sample(&mut rng));
        let img = blur(&blur(&noise, true), false);
        for a in 0..size {
            for b in 0..size {
                let (x, y) = (b as f64 - center, center - a as f64);
                let r = (x * x + y * y).sqrt();
                if radius > 0.0 && r < radius {
                    let taper = (std::f64::consts::FRAC_PI_2 * r / radius).cos().powi(2);
                    data[[ch, a, b]] = T::from_f64_lossy(taper * img[(a, b)]);
                }
            }
        }
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use crate::representation::{IrrepId, Representation};
    use ndarray::Array4;
    use std::f64::consts::PI;

    fn scalar_type(g: Group) -> FieldType {
        FieldType::new(g, vec![Representation::trivial(g)]).unwrap()
    }

    #[test]
    fn scalar_quarter_turn() {
        let ft = scalar_type(Group::cyclic(4));
        let data = Array3::from_shape_vec((1, 3, 3), (1..=9).map(f64::from).collect()).unwrap();
        let f = FeatureField::new(ft, data).unwrap();
        let r = transform_field(&f, &GroupElement::rotation(PI / 2.0), [0.0, 0.0]).unwrap();
        let expect = Array3::from_shape_vec((1, 3, 3), vec![3., 6., 9., 2., 5., 8., 1., 4., 7.]).unwrap();
        assert_eq!(r.data(), &expect);
    }

    #[test]
    fn vector_quarter_turn() {
        let g = Group::SO2;
        let ft = FieldType::new(g, vec![Representation::irrep(IrrepId::new(g, 0, 1).unwrap())]).unwrap();
        let mut data = Array3::zeros((2, 3, 3));
        data[[0, 1, 2]] = 1.0; // vector (1, 0) at x = (1, 0)
        let f = FeatureField::new(ft, data).unwrap();
        let r = transform_field(&f, &GroupElement::rotation(PI / 2.0), [0.0, 0.0]).unwrap();
        // moves to x = (0, 1) = pixel (0, 1) and turns into (0, 1)
        assert_eq!(r.data()[[0, 0, 1]], 0.0);
        assert_eq!(r.data()[[1, 0, 1]], 1.0);
        assert_eq!(r.data().iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn identity_is_bit_exact() {
        let ft = scalar_type(Group::cyclic(8));
        let f = smooth_probe::<f64>(&ft, 11, 2, 1.0, 3);
        let r = transform_field(&f, &GroupElement::identity(), [0.0, 0.0]).unwrap();
        assert_eq!(r.data(), f.data());
    }

    #[test]
    fn rejects_foreign_elements() {
        let ft = scalar_type(Group::cyclic(4));
        let f = FeatureField::<f64>::zeros(ft, 3, 3);
        assert!(transform_field(&f, &GroupElement::rotation(0.3), [0.0, 0.0]).is_err());
    }

    #[test]
    fn delta_kernel_is_identity() {
        let ft = FieldType::repeated(&Representation::trivial(Group::Trivial), 2).unwrap();
        let f = interior_probe::<f64>(&ft, 7, 0, 1);
        let mut k = Array4::zeros((2, 2, 3, 3));
        k[[0, 0, 1, 1]] = 1.0;
        k[[1, 1, 1, 1]] = 1.0;
        let out = convolve(&f, k.view(), &ft).unwrap();
        assert_eq!(out.data(), f.data());
        let zero = convolve(&f, Array4::zeros((2, 2, 3, 3)).view(), &ft).unwrap();
        assert!(zero.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_pixel_response_is_flipped_kernel() {
        let ft = scalar_type(Group::Trivial);
        let mut data = Array3::zeros((1, 5, 5));
        data[[0, 2, 2]] = 1.0;
        let f = FeatureField::new(ft.clone(), data).unwrap();
        let k = Array4::from_shape_vec((1, 1, 3, 3), (1..=9).map(f64::from).collect()).unwrap();
        let out = convolve(&f, k.view(), &ft).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(out.data()[[0, 1 + a, 1 + b]], k[[0, 0, 2 - a, 2 - b]]);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let ft = scalar_type(Group::Trivial);
        let f = FeatureField::<f64>::zeros(ft.clone(), 4, 4);
        assert!(convolve(&f, Array4::zeros((1, 2, 3, 3)).view(), &ft).is_err());
        assert!(convolve(&f, Array4::zeros((1, 1, 2, 2)).view(), &ft).is_err());
        assert_eq!(probe_margin(5), 5);
    }
}
