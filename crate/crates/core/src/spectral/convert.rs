//! Exact projections between parity families.
//!
//! Quadratic products of expansion fields are even in every axis, so they
//! live exactly in a widened all-cosine basis. Returning them to a sine
//! (Dirichlet) equation basis is the exact Galerkin projection, applied here
//! through the closed-form coupling
//! `(2/L) int_0^L cos(k pi x/L) sin(n pi x/L) dx = (4/pi) n/(n^2-k^2)` for
//! `n + k` odd (zero otherwise). Cosine targets only truncate.
//!
//! Polynomial boundary lifts are projected with the exact recursion for
//! `int_0^L x^p sin(n pi x/L) dx` (endpoint terms carry `(-1)^n` exactly).

use num_complex::Complex;

use super::transform::apply_axis_real_matrix;
use super::{AxisFamily, Basis, SpectralField};
use crate::scalar::Scalar;

/// Row-major `n_rows x k_cols` Galerkin matrix taking cosine coefficients
/// (wavenumbers `0..k_cols`) to sine coefficients (wavenumbers `1..=n_rows`).
pub fn cosine_to_sine_matrix<T: Scalar>(n_rows: usize, k_cols: usize) -> Vec<T> {
    let four_over_pi = T::lit(4.0) / T::PI();
    let mut mat = vec![T::zero(); n_rows * k_cols];
    for n in 1..=n_rows {
        for k in 0..k_cols {
            if (n + k) % 2 == 1 {
                let nf = T::of_usize(n);
                let kf = T::of_usize(k);
                mat[(n - 1) * k_cols + k] = four_over_pi * nf / (nf * nf - kf * kf);
            }
        }
    }
    mat
}

/// Exact Galerkin projection of an all-cosine field onto `target` (same
/// lengths, narrower band), truncating the temporal band to `target_m`.
pub fn project_to_basis<T: Scalar>(
    src: &SpectralField<T>,
    target: &Basis<T>,
    target_m: usize,
) -> SpectralField<T> {
    let src_basis = src.basis();
    assert!(src_basis
        .families()
        .iter()
        .all(|&f| f == AxisFamily::Cosine));
    assert_eq!(src_basis.dim(), target.dim());
    assert!(target_m <= src.m_max());

    // temporal truncation first
    let spatial = src.spatial_len();
    let rows_out = 2 * target_m + 1;
    let offset = (src.m_max() - target_m) * spatial;
    let mut data: Vec<Complex<T>> = src.coeffs()[offset..offset + rows_out * spatial].to_vec();

    let mut shape: Vec<usize> = std::iter::once(rows_out)
        .chain(src_basis.counts().iter().copied())
        .collect();
    for axis in 0..target.dim() {
        let k_cols = shape[axis + 1];
        let rows = target.counts()[axis];
        match target.families()[axis] {
            AxisFamily::Sine => {
                let mat = cosine_to_sine_matrix::<T>(rows, k_cols);
                data = apply_axis_real_matrix(&data, &shape, axis + 1, &mat, rows);
            }
            AxisFamily::Cosine => {
                // plain truncation is the exact projection within the family
                let mut mat = vec![T::zero(); rows * k_cols];
                for r in 0..rows.min(k_cols) {
                    mat[r * k_cols + r] = T::one();
                }
                data = apply_axis_real_matrix(&data, &shape, axis + 1, &mat, rows);
            }
        }
        shape[axis + 1] = rows;
    }

    let mut out = SpectralField::zero(target.clone(), target_m, src.period());
    out.coeffs_mut().copy_from_slice(&data);
    out
}

/// `int_0^L x^p sin(n pi x / L) dx` for `p = 0..=max_p`, computed by the
/// integration-by-parts recursion with `cos(n pi) = (-1)^n` taken exactly.
fn sine_moments<T: Scalar>(l: T, n: usize, max_p: usize) -> Vec<T> {
    debug_assert!(n >= 1);
    let beta = T::of_usize(n) * T::PI() / l;
    let cn = if n.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    };
    let mut i_sin = vec![T::zero(); max_p + 1];
    let mut i_cos = vec![T::zero(); max_p + 1];
    i_sin[0] = (T::one() - cn) / beta;
    i_cos[0] = T::zero();
    let mut l_pow = T::one();
    for p in 1..=max_p {
        l_pow *= l; // L^p
        i_sin[p] = (-l_pow * cn + T::of_usize(p) * i_cos[p - 1]) / beta;
        i_cos[p] = -(T::of_usize(p) / beta) * i_sin[p - 1];
    }
    i_sin
}

/// `int_0^L x^p cos(n pi x / L) dx` for `p = 0..=max_p`, `n >= 1`.
fn cosine_moments<T: Scalar>(l: T, n: usize, max_p: usize) -> Vec<T> {
    debug_assert!(n >= 1);
    let beta = T::of_usize(n) * T::PI() / l;
    let cn = if n.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    };
    let mut i_sin = vec![T::zero(); max_p + 1];
    let mut i_cos = vec![T::zero(); max_p + 1];
    i_sin[0] = (T::one() - cn) / beta;
    i_cos[0] = T::zero();
    let mut l_pow = T::one();
    for p in 1..=max_p {
        l_pow *= l;
        i_sin[p] = (-l_pow * cn + T::of_usize(p) * i_cos[p - 1]) / beta;
        i_cos[p] = -(T::of_usize(p) / beta) * i_sin[p - 1];
    }
    i_cos
}

/// Exact Galerkin coefficients of a polynomial `sum_p poly[p] x^p` in a 1-D
/// axis family with `count` stored modes.
pub fn polynomial_coefficients<T: Scalar>(
    poly: &[Complex<T>],
    l: T,
    family: AxisFamily,
    count: usize,
) -> Vec<Complex<T>> {
    let max_p = poly.len().saturating_sub(1);
    let mut out = vec![Complex::new(T::zero(), T::zero()); count];
    let two_over_l = T::lit(2.0) / l;
    match family {
        AxisFamily::Sine => {
            for (idx, slot) in out.iter_mut().enumerate() {
                let n = idx + 1;
                let moments = sine_moments(l, n, max_p);
                let mut acc = Complex::new(T::zero(), T::zero());
                for (p, &a) in poly.iter().enumerate() {
                    acc += a * moments[p];
                }
                *slot = acc * two_over_l;
            }
        }
        AxisFamily::Cosine => {
            // mean mode
            let mut mean = Complex::new(T::zero(), T::zero());
            let mut l_pow = l;
            for (p, &a) in poly.iter().enumerate() {
                mean += a * (l_pow / T::of_usize(p + 1));
                l_pow *= l;
            }
            out[0] = mean / l;
            for (idx, slot) in out.iter_mut().enumerate().skip(1) {
                let moments = cosine_moments(l, idx, max_p);
                let mut acc = Complex::new(T::zero(), T::zero());
                for (p, &a) in poly.iter().enumerate() {
                    acc += a * moments[p];
                }
                *slot = acc * two_over_l;
            }
        }
    }
    out
}
