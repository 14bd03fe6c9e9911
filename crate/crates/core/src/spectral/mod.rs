//! Eigenbases, coefficient fields, collocation grids, transforms,
//! differential operators as diagonal actions, projections, and norms.
//!
//! Fields are truncated expansions
//! `u(t, x) = sum_{|m| <= M} sum_n c(m, n) e^{i m w t} phi_n(x)`
//! over tensor-product sine/cosine eigenfunctions of the Laplacian on a box,
//! with Hermitian temporal symmetry for real fields.

pub mod convert;
pub mod norms;
pub mod transform;

use num_complex::Complex;

use crate::error::FieldError;
use crate::model::{BcKind, DomainSpec};
use crate::scalar::Scalar;

/// Trigonometric family along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisFamily {
    /// `sin(w pi x / L)`, wavenumbers `1..=count`.
    Sine,
    /// `cos(w pi x / L)`, wavenumbers `0..count`.
    Cosine,
}

/// Tensor-product eigenbasis over a box, one trig family per axis.
///
/// For a Dirichlet problem every axis is `Sine`, so every basis function and
/// its Laplacian vanish on the boundary; for Neumann every axis is `Cosine`,
/// so the normal derivatives of both vanish. Mixed-family bases appear
/// internally as gradient components.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis<T: Scalar> {
    families: Vec<AxisFamily>,
    lengths: Vec<T>,
    counts: Vec<usize>,
    strides: Vec<usize>,
    lambdas: Vec<T>,
}

impl<T: Scalar> Basis<T> {
    pub fn new(families: Vec<AxisFamily>, lengths: Vec<T>, counts: Vec<usize>) -> Self {
        assert_eq!(families.len(), lengths.len());
        assert_eq!(families.len(), counts.len());
        assert!(!counts.is_empty() && counts.iter().all(|&c| c > 0));
        let dim = counts.len();
        let mut strides = vec![1usize; dim];
        for i in (0..dim.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * counts[i + 1];
        }
        let total: usize = counts.iter().product();
        let mut lambdas = vec![T::zero(); total];
        let mut multi = vec![0usize; dim];
        for (flat, lam) in lambdas.iter_mut().enumerate() {
            decode(flat, &counts, &mut multi);
            let mut acc = T::zero();
            for axis in 0..dim {
                let w = wavenumber_of(families[axis], multi[axis]);
                let f = T::of_usize(w) * T::PI() / lengths[axis];
                acc += f * f;
            }
            *lam = acc;
        }
        Self {
            families,
            lengths,
            counts,
            strides,
            lambdas,
        }
    }

    /// All-sine basis with `n[i]` modes per axis (wavenumbers `1..=n[i]`).
    pub fn dirichlet(lengths: &[T], n: &[usize]) -> Self {
        Self::new(
            vec![AxisFamily::Sine; lengths.len()],
            lengths.to_vec(),
            n.to_vec(),
        )
    }

    /// All-cosine basis with wavenumbers `0..=n[i]` per axis.
    pub fn neumann(lengths: &[T], n: &[usize]) -> Self {
        let counts = n.iter().map(|&k| k + 1).collect();
        Self::new(
            vec![AxisFamily::Cosine; lengths.len()],
            lengths.to_vec(),
            counts,
        )
    }

    /// Equation basis for a problem domain and per-axis truncation `n`.
    pub fn from_domain(domain: &DomainSpec<T>, n: &[usize]) -> Self {
        match domain.bc_kind {
            BcKind::Dirichlet => Self::dirichlet(&domain.lengths, n),
            BcKind::Neumann => Self::neumann(&domain.lengths, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn lengths(&self) -> &[T] {
        &self.lengths
    }

    pub fn families(&self) -> &[AxisFamily] {
        &self.families
    }

    /// Uniform boundary-condition kind, when the basis has one.
    pub fn bc_kind(&self) -> Option<BcKind> {
        if self.families.iter().all(|&f| f == AxisFamily::Sine) {
            Some(BcKind::Dirichlet)
        } else if self.families.iter().all(|&f| f == AxisFamily::Cosine) {
            Some(BcKind::Neumann)
        } else {
            None
        }
    }

    pub fn spatial_len(&self) -> usize {
        self.lambdas.len()
    }

    /// Laplacian eigenvalue `lambda_n >= 0` for the flattened index.
    pub fn eigenvalue(&self, flat: usize) -> T {
        self.lambdas[flat]
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.lambdas
    }

    /// Largest eigenvalue in the truncation.
    pub fn max_eigenvalue(&self) -> T {
        self.lambdas.iter().fold(T::zero(), |a, &l| a.max(l))
    }

    pub fn wavenumber(&self, axis: usize, idx: usize) -> usize {
        wavenumber_of(self.families[axis], idx)
    }

    pub fn decode_multi(&self, flat: usize, out: &mut [usize]) {
        decode(flat, &self.counts, out);
    }

    pub fn multi_to_flat(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(&i, &s)| i * s).sum()
    }

    /// Flattened index for physical wavenumbers (Dirichlet axes 1-based).
    pub fn flat_of_wavenumbers(&self, wavenumbers: &[usize]) -> usize {
        let multi: Vec<usize> = wavenumbers
            .iter()
            .zip(&self.families)
            .map(|(&w, &f)| match f {
                AxisFamily::Sine => {
                    assert!(w >= 1, "sine axis has no constant mode");
                    w - 1
                }
                AxisFamily::Cosine => w,
            })
            .collect();
        for (axis, &i) in multi.iter().enumerate() {
            assert!(i < self.counts[axis], "wavenumber outside truncation");
        }
        self.multi_to_flat(&multi)
    }

    /// Minimal exact collocation size along one axis (`max wavenumber + 1`).
    pub fn min_grid(&self, axis: usize) -> usize {
        match self.families[axis] {
            AxisFamily::Sine => self.counts[axis] + 1,
            AxisFamily::Cosine => self.counts[axis],
        }
    }

    /// Basis holding the `axis`-derivative of fields in this basis
    /// (sine and cosine exchange roles along that axis).
    pub fn derivative_basis(&self, axis: usize) -> Self {
        let mut families = self.families.clone();
        let mut counts = self.counts.clone();
        match self.families[axis] {
            AxisFamily::Sine => {
                families[axis] = AxisFamily::Cosine;
                counts[axis] += 1;
            }
            AxisFamily::Cosine => {
                families[axis] = AxisFamily::Sine;
                counts[axis] -= 1;
            }
        }
        Self::new(families, self.lengths.clone(), counts)
    }

    /// All-cosine basis wide enough to hold products of two fields from this
    /// basis (or its derivative bases): wavenumbers up to twice the maximum.
    pub fn product_cosine_basis(&self) -> Self {
        let counts = self
            .counts
            .iter()
            .zip(&self.families)
            .map(|(&c, &f)| {
                let max_w = match f {
                    AxisFamily::Sine => c,
                    AxisFamily::Cosine => c - 1,
                };
                2 * max_w + 1
            })
            .collect();
        Self::new(
            vec![AxisFamily::Cosine; self.dim()],
            self.lengths.clone(),
            counts,
        )
    }
}

pub(crate) fn wavenumber_of(family: AxisFamily, idx: usize) -> usize {
    match family {
        AxisFamily::Sine => idx + 1,
        AxisFamily::Cosine => idx,
    }
}

fn decode(flat: usize, counts: &[usize], out: &mut [usize]) {
    let mut rem = flat;
    for axis in (0..counts.len()).rev() {
        out[axis] = rem % counts[axis];
        rem /= counts[axis];
    }
}

/// Complex coefficient tensor over (temporal mode, spatial multi-index).
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T: Scalar> {
    basis: Basis<T>,
    m_max: usize,
    period: T,
    coeffs: Vec<Complex<T>>,
}

impl<T: Scalar> SpectralField<T> {
    pub fn zero(basis: Basis<T>, m_max: usize, period: T) -> Self {
        let len = (2 * m_max + 1) * basis.spatial_len();
        Self {
            basis,
            m_max,
            period,
            coeffs: vec![Complex::new(T::zero(), T::zero()); len],
        }
    }

    pub fn basis(&self) -> &Basis<T> {
        &self.basis
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn omega(&self) -> T {
        T::lit(2.0) * T::PI() / self.period
    }

    pub fn temporal_rows(&self) -> usize {
        2 * self.m_max + 1
    }

    pub fn spatial_len(&self) -> usize {
        self.basis.spatial_len()
    }

    #[inline]
    pub fn idx(&self, m: i64, flat: usize) -> usize {
        debug_assert!(m.unsigned_abs() as usize <= self.m_max);
        (m + self.m_max as i64) as usize * self.spatial_len() + flat
    }

    pub fn get(&self, m: i64, flat: usize) -> Complex<T> {
        self.coeffs[self.idx(m, flat)]
    }

    pub fn set(&mut self, m: i64, flat: usize, value: Complex<T>) {
        let i = self.idx(m, flat);
        self.coeffs[i] = value;
    }

    pub fn add_assign_at(&mut self, m: i64, flat: usize, value: Complex<T>) {
        let i = self.idx(m, flat);
        self.coeffs[i] += value;
    }

    /// Adds `amplitude * cos(m w t + phase) * phi_n` keeping the field real.
    pub fn add_real_mode(&mut self, m: i64, wavenumbers: &[usize], amplitude: T, phase: T) {
        let flat = self.basis.flat_of_wavenumbers(wavenumbers);
        if m == 0 {
            self.add_assign_at(0, flat, Complex::new(amplitude * phase.cos(), T::zero()));
        } else {
            let c = Complex::from_polar(amplitude / T::lit(2.0), phase);
            self.add_assign_at(m, flat, c);
            self.add_assign_at(-m, flat, c.conj());
        }
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coeffs
    }

    /// Iterates `(m, flat, coeff)` over every stored mode.
    pub fn iter_modes(&self) -> impl Iterator<Item = (i64, usize, Complex<T>)> + '_ {
        let spatial = self.spatial_len();
        let m_max = self.m_max as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| {
            let m = (i / spatial) as i64 - m_max;
            (m, i % spatial, c)
        })
    }

    /// Multiplies each coefficient by `factor(m, flat)`.
    pub fn apply_diagonal(&self, factor: impl Fn(i64, usize) -> Complex<T>) -> Self {
        let mut out = self.clone();
        let spatial = out.spatial_len();
        let m_max = out.m_max as i64;
        for (i, c) in out.coeffs.iter_mut().enumerate() {
            let m = (i / spatial) as i64 - m_max;
            *c *= factor(m, i % spatial);
        }
        out
    }

    /// Temporal derivative of order `r`: coefficients scaled by `(i m w)^r`.
    pub fn dt(&self, order: u32) -> Self {
        let omega = self.omega();
        self.apply_diagonal(|m, _| {
            let base = Complex::new(T::zero(), T::of_i64(m) * omega);
            cpowi(base, order)
        })
    }

    /// Laplacian: coefficients scaled by `-lambda_n`.
    pub fn laplacian(&self) -> Self {
        let lambdas = self.basis.lambdas.clone();
        self.apply_diagonal(|_, flat| Complex::new(-lambdas[flat], T::zero()))
    }

    /// Keeps only the time-independent (m = 0) content.
    pub fn project_steady(&self) -> Self {
        let mut out = Self::zero(self.basis.clone(), self.m_max, self.period);
        let spatial = self.spatial_len();
        let row = self.m_max * spatial;
        out.coeffs[row..row + spatial].copy_from_slice(&self.coeffs[row..row + spatial]);
        out
    }

    /// Keeps only the m != 0 content; complements `project_steady`.
    pub fn project_oscillatory(&self) -> Self {
        let mut out = self.clone();
        let spatial = self.spatial_len();
        let row = self.m_max * spatial;
        for c in &mut out.coeffs[row..row + spatial] {
            *c = Complex::new(T::zero(), T::zero());
        }
        out
    }

    /// True when the steady row is identically zero.
    pub fn steady_part_max(&self) -> T {
        let spatial = self.spatial_len();
        let row = self.m_max * spatial;
        self.coeffs[row..row + spatial]
            .iter()
            .fold(T::zero(), |a, c| a.max(c.norm()))
    }

    pub fn max_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |a, c| a.max(c.norm()))
    }

    /// Largest violation of the real-field symmetry
    /// `c(-m, n) == conj(c(m, n))`.
    pub fn hermitian_error(&self) -> T {
        let spatial = self.spatial_len();
        let mut err = T::zero();
        for m in 0..=self.m_max as i64 {
            for flat in 0..spatial {
                let d = self.get(-m, flat) - self.get(m, flat).conj();
                err = err.max(d.norm());
            }
        }
        err
    }

    /// Spatial derivative along `axis`, expressed in the conjugate basis.
    pub fn derivative_axis(&self, axis: usize) -> Self {
        let src_basis = &self.basis;
        let dst_basis = src_basis.derivative_basis(axis);
        let mut out = Self::zero(dst_basis, self.m_max, self.period);
        let dim = src_basis.dim();
        let mut multi = vec![0usize; dim];
        let spatial = self.spatial_len();
        let length = src_basis.lengths[axis];
        for flat in 0..spatial {
            src_basis.decode_multi(flat, &mut multi);
            let w = src_basis.wavenumber(axis, multi[axis]);
            if w == 0 {
                continue; // constant mode differentiates to zero
            }
            let factor = T::of_usize(w) * T::PI() / length;
            let mut dst_multi = multi.clone();
            let scale = match src_basis.families[axis] {
                // d/dx sin(w..) = +w.. cos(w..): cosine store index = w
                AxisFamily::Sine => {
                    dst_multi[axis] = w;
                    factor
                }
                // d/dx cos(w..) = -w.. sin(w..): sine store index = w - 1
                AxisFamily::Cosine => {
                    dst_multi[axis] = w - 1;
                    -factor
                }
            };
            let dst_flat = out.basis.multi_to_flat(&dst_multi);
            for r in 0..self.temporal_rows() {
                let v = self.coeffs[r * spatial + flat];
                out.coeffs[r * out.basis.spatial_len() + dst_flat] =
                    v * Complex::new(scale, T::zero());
            }
        }
        out
    }

    /// Pointwise value of the truncated expansion.
    pub fn eval_point(&self, t: T, x: &[T]) -> T {
        let dim = self.basis.dim();
        assert_eq!(x.len(), dim);
        let mut multi = vec![0usize; dim];
        let omega = self.omega();
        let mut acc = Complex::new(T::zero(), T::zero());
        for m in -(self.m_max as i64)..=(self.m_max as i64) {
            let phase = Complex::from_polar(T::one(), T::of_i64(m) * omega * t);
            let mut row = Complex::new(T::zero(), T::zero());
            for flat in 0..self.spatial_len() {
                let c = self.get(m, flat);
                if c.re == T::zero() && c.im == T::zero() {
                    continue;
                }
                self.basis.decode_multi(flat, &mut multi);
                let mut phi = T::one();
                for axis in 0..dim {
                    let w = self.basis.wavenumber(axis, multi[axis]);
                    let arg = T::of_usize(w) * T::PI() * x[axis] / self.basis.lengths[axis];
                    phi *= match self.basis.families[axis] {
                        AxisFamily::Sine => arg.sin(),
                        AxisFamily::Cosine => arg.cos(),
                    };
                }
                row += c * Complex::new(phi, T::zero());
            }
            acc += row * phase;
        }
        acc.re
    }

    /// Copies the shared wavenumbers into another truncation of the same
    /// family layout (embedding into a wider band, or truncating to a
    /// narrower one).
    pub fn resample(&self, basis: &Basis<T>, m_max: usize) -> Self {
        assert_eq!(basis.families(), self.basis.families());
        let mut out = Self::zero(basis.clone(), m_max, self.period);
        let dim = basis.dim();
        let mut multi = vec![0usize; dim];
        let m_shared = self.m_max.min(m_max) as i64;
        for flat in 0..basis.spatial_len() {
            basis.decode_multi(flat, &mut multi);
            if multi
                .iter()
                .zip(self.basis.counts())
                .any(|(&idx, &count)| idx >= count)
            {
                continue;
            }
            let src_flat = self.basis.multi_to_flat(&multi);
            for m in -m_shared..=m_shared {
                out.set(m, flat, self.get(m, src_flat));
            }
        }
        out
    }

    pub fn checked_pair(&self, other: &Self) -> Result<(), FieldError> {
        if self.basis != other.basis || self.m_max != other.m_max {
            return Err(FieldError::BasisMismatch(format!(
                "counts {:?} x {} vs {:?} x {}",
                self.basis.counts, self.m_max, other.basis.counts, other.m_max
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Self {
        self.checked_pair(other).expect("field addition");
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a += *b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.checked_pair(other).expect("field subtraction");
        let mut out = self.clone();
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            *a -= *b;
        }
        out
    }

    pub fn scale(&self, factor: T) -> Self {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= factor;
        }
        out
    }
}

fn cpowi<T: Scalar>(base: Complex<T>, order: u32) -> Complex<T> {
    let mut acc = Complex::new(T::one(), T::zero());
    for _ in 0..order {
        acc *= base;
    }
    acc
}

/// Real values of a field on the collocation grid (time-major layout).
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalField<T: Scalar> {
    pub(crate) values: Vec<T>,
    nt: usize,
    spatial_sizes: Vec<usize>,
    basis: Basis<T>,
    m_max: usize,
    period: T,
    pad: usize,
}

impl<T: Scalar> PhysicalField<T> {
    pub(crate) fn new(
        values: Vec<T>,
        nt: usize,
        spatial_sizes: Vec<usize>,
        basis: Basis<T>,
        m_max: usize,
        period: T,
        pad: usize,
    ) -> Self {
        debug_assert_eq!(values.len(), nt * spatial_sizes.iter().product::<usize>());
        Self {
            values,
            nt,
            spatial_sizes,
            basis,
            m_max,
            period,
            pad,
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn spatial_sizes(&self) -> &[usize] {
        &self.spatial_sizes
    }

    pub fn spatial_total(&self) -> usize {
        self.spatial_sizes.iter().product()
    }

    pub fn pad(&self) -> usize {
        self.pad
    }

    pub fn period(&self) -> T {
        self.period
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn basis(&self) -> &Basis<T> {
        &self.basis
    }

    pub fn value(&self, t: usize, flat: usize) -> T {
        self.values[t * self.spatial_total() + flat]
    }

    /// Time of sample `i`: `i T / Nt`.
    pub fn time(&self, i: usize) -> T {
        T::of_usize(i) * self.period / T::of_usize(self.nt)
    }

    /// Midpoint collocation node `x_j = (j + 1/2) L / Ng` along an axis.
    pub fn node(&self, axis: usize, j: usize) -> T {
        (T::of_usize(j) + T::lit(0.5)) * self.basis.lengths()[axis]
            / T::of_usize(self.spatial_sizes[axis])
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &v| a.max(v.abs()))
    }
}

#[cfg(test)]
mod tests;
