//! Forward/inverse transforms between coefficient fields and collocation
//! grids.
//!
//! Grids are uniform in time (`t_i = i T / Nt`) and midpoint in space
//! (`x_j = (j + 1/2) L / Ng`). With `Nt >= 2M + 1` and `Ng` at least one
//! more than the largest wavenumber, the discrete transforms are exact on
//! in-band fields, which is what the dealiased product pipeline relies on.
//! Everything is a naive dense contraction; grid sizes stay desk-scale.

use num_complex::Complex;

use super::{AxisFamily, Basis, PhysicalField, SpectralField};
use crate::error::FieldError;
use crate::scalar::Scalar;

/// Evaluates a truncated expansion on the collocation grid; `pad` multiplies
/// the minimal exact grid in every direction. Exact for in-band fields.
pub fn to_physical<T: Scalar>(u: &SpectralField<T>, pad: usize) -> PhysicalField<T> {
    assert!(pad >= 1, "padding factor must be >= 1");
    let nt = pad * (2 * u.m_max() + 1);
    let ng: Vec<usize> = (0..u.basis().dim())
        .map(|axis| pad * u.basis().min_grid(axis))
        .collect();
    to_physical_on(u, nt, &ng, pad)
}

/// Evaluates on an explicitly sized grid (used to align grids of conjugate
/// bases before pointwise products).
pub fn to_physical_on<T: Scalar>(
    u: &SpectralField<T>,
    nt: usize,
    ng: &[usize],
    pad: usize,
) -> PhysicalField<T> {
    let basis = u.basis();
    let dim = basis.dim();
    assert_eq!(ng.len(), dim);
    assert!(
        nt > 2 * u.m_max(),
        "time grid below transform-exactness minimum"
    );
    for (axis, &size) in ng.iter().enumerate() {
        assert!(
            size >= basis.min_grid(axis),
            "spatial grid below exactness minimum"
        );
    }

    // temporal synthesis: rows (2M+1) -> nt
    let rows = u.temporal_rows();
    let spatial = u.spatial_len();
    let m_max = u.m_max() as i64;
    let mut data = vec![Complex::new(T::zero(), T::zero()); nt * spatial];
    let two_pi = T::lit(2.0) * T::PI();
    for i in 0..nt {
        for r in 0..rows {
            let m = r as i64 - m_max;
            let angle = two_pi * T::of_i64(m) * T::of_usize(i) / T::of_usize(nt);
            let e = Complex::from_polar(T::one(), angle);
            let src = &u.coeffs()[r * spatial..(r + 1) * spatial];
            let dst = &mut data[i * spatial..(i + 1) * spatial];
            for (d, s) in dst.iter_mut().zip(src) {
                *d += *s * e;
            }
        }
    }

    // spatial synthesis per axis
    let mut shape: Vec<usize> = std::iter::once(nt)
        .chain(basis.counts().iter().copied())
        .collect();
    for axis in 0..dim {
        let mat = synth_matrix(basis.families()[axis], basis.counts()[axis], ng[axis]);
        data = apply_axis_real_matrix(&data, &shape, axis + 1, &mat, ng[axis]);
        shape[axis + 1] = ng[axis];
    }

    let values: Vec<T> = data.iter().map(|c| c.re).collect();
    PhysicalField::new(
        values,
        nt,
        ng.to_vec(),
        basis.clone(),
        u.m_max(),
        u.period(),
        pad,
    )
}

/// Inverse of `to_physical` on in-band data; truncates out-of-band content.
pub fn to_spectral<T: Scalar>(
    p: &PhysicalField<T>,
    basis: &Basis<T>,
) -> Result<SpectralField<T>, FieldError> {
    if basis.dim() != p.spatial_sizes().len() {
        return Err(FieldError::ShapeMismatch(format!(
            "grid dimension {} vs basis dimension {}",
            p.spatial_sizes().len(),
            basis.dim()
        )));
    }
    for axis in 0..basis.dim() {
        if p.spatial_sizes()[axis] < basis.min_grid(axis) {
            return Err(FieldError::ShapeMismatch(format!(
                "axis {axis}: {} grid points cannot resolve {} modes",
                p.spatial_sizes()[axis],
                basis.counts()[axis]
            )));
        }
    }
    if p.nt() < 2 * p.m_max() + 1 {
        return Err(FieldError::ShapeMismatch(format!(
            "{} time samples cannot resolve temporal band {}",
            p.nt(),
            p.m_max()
        )));
    }
    Ok(analyze(
        p.values(),
        p.nt(),
        p.spatial_sizes(),
        basis,
        p.m_max(),
        p.period(),
    ))
}

/// Exact projection of grid values onto `basis` with temporal band `m_max`.
///
/// The temporal loop fills `+m` and `-m` rows from shared cosine/sine sums,
/// so real input produces exactly Hermitian output.
pub(crate) fn analyze<T: Scalar>(
    values: &[T],
    nt: usize,
    ng: &[usize],
    basis: &Basis<T>,
    m_max: usize,
    period: T,
) -> SpectralField<T> {
    let dim = basis.dim();
    // spatial analysis per axis, staying real
    let mut shape: Vec<usize> = std::iter::once(nt).chain(ng.iter().copied()).collect();
    let mut data: Vec<T> = values.to_vec();
    for axis in 0..dim {
        let mat = analysis_matrix(basis.families()[axis], basis.counts()[axis], ng[axis]);
        data = apply_axis_matrix_real(&data, &shape, axis + 1, &mat, basis.counts()[axis]);
        shape[axis + 1] = basis.counts()[axis];
    }

    // temporal analysis with Hermitian pairing
    let spatial = basis.spatial_len();
    let mut out = SpectralField::zero(basis.clone(), m_max, period);
    let two_pi = T::lit(2.0) * T::PI();
    let inv_nt = T::one() / T::of_usize(nt);
    for m in 0..=m_max {
        let mut acc_cos = vec![T::zero(); spatial];
        let mut acc_sin = vec![T::zero(); spatial];
        for i in 0..nt {
            let angle = two_pi * T::of_usize(m) * T::of_usize(i) / T::of_usize(nt);
            let (s, c) = angle.sin_cos();
            let row = &data[i * spatial..(i + 1) * spatial];
            for flat in 0..spatial {
                acc_cos[flat] += c * row[flat];
                acc_sin[flat] += s * row[flat];
            }
        }
        for flat in 0..spatial {
            let re = acc_cos[flat] * inv_nt;
            let im = -acc_sin[flat] * inv_nt;
            out.set(m as i64, flat, Complex::new(re, im));
            if m > 0 {
                out.set(-(m as i64), flat, Complex::new(re, im).conj());
            }
        }
    }
    out
}

/// `sum_i (d_i u)^2` evaluated pointwise on a product-exact collocation grid;
/// each derivative is taken spectrally in the conjugate basis per axis and
/// squares are formed only in physical space.
pub fn gradient_squared<T: Scalar>(u: &SpectralField<T>) -> PhysicalField<T> {
    let basis = u.basis();
    let dim = basis.dim();
    let pad = 2;
    let nt = pad * (2 * u.m_max() + 1);
    let ng: Vec<usize> = (0..dim).map(|axis| pad * basis.min_grid(axis)).collect();

    let mut total = vec![T::zero(); nt * ng.iter().product::<usize>()];
    for axis in 0..dim {
        let d = u.derivative_axis(axis);
        let vals = to_physical_on(&d, nt, &ng, pad);
        for (acc, &v) in total.iter_mut().zip(vals.values()) {
            *acc += v * v;
        }
    }
    PhysicalField::new(total, nt, ng, basis.clone(), u.m_max(), u.period(), pad)
}

/// Basis-function values at midpoint nodes: `mat[j * count + k] = phi_k(x_j)`.
pub(crate) fn synth_matrix<T: Scalar>(family: AxisFamily, count: usize, ng: usize) -> Vec<T> {
    let mut mat = vec![T::zero(); ng * count];
    for j in 0..ng {
        let theta = (T::of_usize(j) + T::lit(0.5)) * T::PI() / T::of_usize(ng);
        for k in 0..count {
            let w = super::wavenumber_of(family, k);
            let arg = T::of_usize(w) * theta;
            mat[j * count + k] = match family {
                AxisFamily::Sine => arg.sin(),
                AxisFamily::Cosine => arg.cos(),
            };
        }
    }
    mat
}

/// Discrete-orthogonality analysis weights: `mat[k * ng + j]`.
pub(crate) fn analysis_matrix<T: Scalar>(family: AxisFamily, count: usize, ng: usize) -> Vec<T> {
    let mut mat = vec![T::zero(); count * ng];
    let two_over = T::lit(2.0) / T::of_usize(ng);
    let one_over = T::one() / T::of_usize(ng);
    for k in 0..count {
        let w = super::wavenumber_of(family, k);
        for j in 0..ng {
            let theta = (T::of_usize(j) + T::lit(0.5)) * T::PI() / T::of_usize(ng);
            let arg = T::of_usize(w) * theta;
            mat[k * ng + j] = match family {
                AxisFamily::Sine => two_over * arg.sin(),
                AxisFamily::Cosine => {
                    if w == 0 {
                        one_over
                    } else {
                        two_over * arg.cos()
                    }
                }
            };
        }
    }
    mat
}

/// Contracts `data` (row-major over `shape`) along `axis` with a real matrix
/// of shape `rows_out x shape[axis]`.
pub(crate) fn apply_axis_real_matrix<T: Scalar>(
    data: &[Complex<T>],
    shape: &[usize],
    axis: usize,
    mat: &[T],
    rows_out: usize,
) -> Vec<Complex<T>> {
    let n_axis = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex::new(T::zero(), T::zero()); outer * rows_out * inner];
    for o in 0..outer {
        for r in 0..rows_out {
            let row = &mat[r * n_axis..(r + 1) * n_axis];
            let dst_base = (o * rows_out + r) * inner;
            for (i, &w) in row.iter().enumerate() {
                if w == T::zero() {
                    continue;
                }
                let src_base = (o * n_axis + i) * inner;
                for in_i in 0..inner {
                    out[dst_base + in_i] += data[src_base + in_i] * w;
                }
            }
        }
    }
    out
}

/// Same contraction on purely real data.
pub(crate) fn apply_axis_matrix_real<T: Scalar>(
    data: &[T],
    shape: &[usize],
    axis: usize,
    mat: &[T],
    rows_out: usize,
) -> Vec<T> {
    let n_axis = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![T::zero(); outer * rows_out * inner];
    for o in 0..outer {
        for r in 0..rows_out {
            let row = &mat[r * n_axis..(r + 1) * n_axis];
            let dst_base = (o * rows_out + r) * inner;
            for (i, &w) in row.iter().enumerate() {
                if w == T::zero() {
                    continue;
                }
                let src_base = (o * n_axis + i) * inner;
                for in_i in 0..inner {
                    out[dst_base + in_i] += data[src_base + in_i] * w;
                }
            }
        }
    }
    out
}
