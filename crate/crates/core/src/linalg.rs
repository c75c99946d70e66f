//! Small dense linear-algebra helpers on `nalgebra::DMatrix<f64>`.

use nalgebra::DMatrix;

pub type Mat = DMatrix<f64>;

/// Block-diagonal stacking.
pub fn block_diag(blocks: &[Mat]) -> Mat {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = Mat::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// `‖AᵀA − I‖_F`.
pub fn orthogonality_defect(a: &Mat) -> f64 {
    (a.transpose() * a - Mat::identity(a.ncols(), a.ncols())).norm()
}

/// Orthonormal basis of the null space of `a`.
///
/// Singular values below `rel_tol · σ_max` count as zero; an all-zero matrix has
/// the full space as null space.
pub fn null_space(a: &Mat, rel_tol: f64) -> Mat {
    let n = a.ncols();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    let padded = if a.nrows() < n {
        let mut p = Mat::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested V");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax == 0.0 || svd.singular_values[i] < rel_tol * smax)
        .collect();
    let mut out = Mat::zeros(n, keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &vt.row(i).transpose());
    }
    out
}

/// Orthonormal basis of the column space of `a` (rank by relative tolerance).
pub fn column_space(a: &Mat, rel_tol: f64) -> Mat {
    if a.ncols() == 0 || a.nrows() == 0 {
        return Mat::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Mat::zeros(a.nrows(), 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_tol * smax)
        .collect();
    let mut out = Mat::zeros(a.nrows(), keep.len());
    for (j, &i) in keep.iter().enumerate() {
        out.set_column(j, &u.column(i));
    }
    out
}

/// Largest singular value.
pub fn spectral_norm(a: &Mat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Smallest singular value of a tall matrix (columns as vectors).
pub fn min_singular_value(a: &Mat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let sv = if a.nrows() >= a.ncols() {
        a.singular_values()
    } else {
        return 0.0;
    };
    sv.iter().cloned().fold(f64::INFINITY, f64::min)
}
