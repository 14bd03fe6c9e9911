//! Iteration and reporting norms.

use super::{PhysicalField, SpectralField};
use crate::scalar::Scalar;

/// Multiplier weight `1 + |m w|^3 + |m w| lambda_n^2` on one mode.
pub fn ps_weight<T: Scalar>(m: i64, omega: T, lambda: T) -> T {
    let mu = (T::of_i64(m) * omega).abs();
    T::one() + mu * mu * mu + mu * lambda * lambda
}

/// Weighted coefficient l2 norm used as the solver's iteration/residual
/// norm: `sqrt(sum |(1 + |m w|^3 + |m w| lambda^2) c(m, n)|^2)`.
pub fn ps_norm<T: Scalar>(u: &SpectralField<T>) -> T {
    let omega = u.omega();
    let mut acc = T::zero();
    for (m, flat, c) in u.iter_modes() {
        let w = ps_weight(m, omega, u.basis().eigenvalue(flat));
        acc += (w * w) * c.norm_sqr();
    }
    acc.sqrt()
}

/// Unweighted coefficient l2 norm.
pub fn l2_norm<T: Scalar>(u: &SpectralField<T>) -> T {
    u.coeffs().iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
}

/// Quadrature approximation of the time- and measure-normalized space-time
/// `L^p` norm on the grid; `p = infinity` gives the max norm.
pub fn lp_norm<T: Scalar>(field: &PhysicalField<T>, p: T) -> T {
    if field.values().is_empty() {
        return T::zero();
    }
    if p.is_infinite() {
        return field.max_abs();
    }
    assert!(p >= T::one(), "exponent must be >= 1");
    let n = T::of_usize(field.values().len());
    let sum: T = field.values().iter().map(|&v| v.abs().powf(p)).sum();
    (sum / n).powf(T::one() / p)
}

/// Relative difference `|a - b| / max(|b|, floor)` in the ps norm.
pub fn relative_ps_diff<T: Scalar>(a: &SpectralField<T>, b: &SpectralField<T>) -> T {
    let diff = ps_norm(&a.sub(b));
    let scale = ps_norm(b);
    if scale == T::zero() {
        diff
    } else {
        diff / scale
    }
}
