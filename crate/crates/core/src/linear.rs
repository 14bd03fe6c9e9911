//! Linear theory: operator symbols, direct and decomposed time-periodic
//! solvers, steady bi-Laplacian solvers, boundary lifting, and invertibility
//! diagnostics.
//!
//! Everything is diagonal in the eigenbasis. The full operator
//! `(a lap - d_t)(d_t^2 - c^2 lap - b d_t lap)` acts on the mode
//! `e^{i m w t} phi_n` as the scalar
//! `sigma(m, n) = (-a lambda - i m w) (-(m w)^2 + c^2 lambda + i b m w lambda)`,
//! the product of a heat factor and a damped-wave (Kuznetsov) factor. For
//! `a, b > 0` the oscillatory symbols never vanish, which is the discrete
//! form of the no-resonance mechanism.
//!
//! Inhomogeneous endpoint data on intervals is handled by subtracting a
//! polynomial lift that carries the traces exactly, solving the homogeneous
//! problem for the remainder, and adding the lift back.

use num_complex::Complex;

use crate::error::SolveError;
use crate::model::{BcKind, BoundaryData1D, ModelParams, TraceSeries};
use crate::scalar::Scalar;
use crate::spectral::convert::polynomial_coefficients;
use crate::spectral::{Basis, SpectralField};

/// Absolute tolerance below which a symbol is flagged as resonant; genuine
/// zeros occur only in the vanishing-dissipation limit.
pub fn resonance_tolerance<T: Scalar>() -> T {
    T::lit(1e-14)
}

/// Heat factor `-a lambda - i m w`.
pub fn heat_symbol<T: Scalar>(m: i64, lambda: T, params: &ModelParams<T>, omega: T) -> Complex<T> {
    Complex::new(-params.a * lambda, -(T::of_i64(m) * omega))
}

/// Damped-wave factor `-(m w)^2 + c^2 lambda + i b m w lambda`.
pub fn kuznetsov_symbol<T: Scalar>(
    m: i64,
    lambda: T,
    params: &ModelParams<T>,
    omega: T,
) -> Complex<T> {
    let mu = T::of_i64(m) * omega;
    Complex::new(
        params.c * params.c * lambda - mu * mu,
        params.b * mu * lambda,
    )
}

/// Full operator symbol in expanded form,
/// `sigma = (a+b) lambda mu^2 - a c^2 lambda^2
///          + i (mu^3 - c^2 lambda mu - a b lambda^2 mu)`,
/// algebraically equal to the product of the two factors. The steady mode
/// reduces exactly to the bi-Laplacian: `sigma(0, n) = -a c^2 lambda^2`.
pub fn symbol<T: Scalar>(m: i64, lambda: T, params: &ModelParams<T>, omega: T) -> Complex<T> {
    let mu = T::of_i64(m) * omega;
    let (a, b, c) = (params.a, params.b, params.c);
    let c2 = c * c;
    let re = (a + b) * lambda * mu * mu - a * c2 * lambda * lambda;
    let im = mu * mu * mu - c2 * lambda * mu - a * b * lambda * lambda * mu;
    Complex::new(re, im)
}

/// One row of the symbol table.
#[derive(Debug, Clone)]
pub struct SymbolRow<T> {
    pub m: i64,
    pub n: Vec<usize>,
    pub abs_sigma: T,
}

/// `|sigma|` over every oscillatory mode of the truncation, for resonance
/// sweeps and CSV emission.
pub fn symbol_rows<T: Scalar>(
    params: &ModelParams<T>,
    period: T,
    m_max: usize,
    basis: &Basis<T>,
) -> Vec<SymbolRow<T>> {
    let omega = T::lit(2.0) * T::PI() / period;
    let mut rows = Vec::new();
    let mut multi = vec![0usize; basis.dim()];
    for m in -(m_max as i64)..=(m_max as i64) {
        if m == 0 {
            continue;
        }
        for flat in 0..basis.spatial_len() {
            basis.decode_multi(flat, &mut multi);
            let wavenumbers: Vec<usize> = (0..basis.dim())
                .map(|axis| basis.wavenumber(axis, multi[axis]))
                .collect();
            rows.push(SymbolRow {
                m,
                n: wavenumbers,
                abs_sigma: symbol(m, basis.eigenvalue(flat), params, omega).norm(),
            });
        }
    }
    rows
}

/// Result of the non-resonance scan: the smallest oscillatory `|sigma|` and
/// the mode attaining it.
#[derive(Debug, Clone)]
pub struct InvertibilityScan<T> {
    pub min_abs_sigma: T,
    pub at_m: i64,
    pub at_n: Vec<usize>,
}

/// Scans `min |sigma(m, n)|` over all oscillatory modes (`m != 0`); a
/// minimum below the resonance tolerance is reported as an error carrying
/// the offending mode.
pub fn check_invertibility<T: Scalar>(
    params: &ModelParams<T>,
    period: T,
    m_max: usize,
    basis: &Basis<T>,
) -> Result<InvertibilityScan<T>, SolveError> {
    let mut best: Option<InvertibilityScan<T>> = None;
    for row in symbol_rows(params, period, m_max, basis) {
        let replace = match &best {
            Some(b) => row.abs_sigma < b.min_abs_sigma,
            None => true,
        };
        if replace {
            best = Some(InvertibilityScan {
                min_abs_sigma: row.abs_sigma,
                at_m: row.m,
                at_n: row.n,
            });
        }
    }
    let scan = best.expect("truncation holds at least one oscillatory mode");
    if scan.min_abs_sigma < resonance_tolerance() {
        return Err(SolveError::Resonance {
            m: scan.at_m,
            n: scan.at_n.clone(),
            abs_sigma: scan.min_abs_sigma.to_f64().unwrap_or(0.0),
        });
    }
    Ok(scan)
}

/// Applies the full operator symbol mode-by-mode (the forward action of the
/// linearized equation on a coefficient field).
pub fn apply_symbol<T: Scalar>(u: &SpectralField<T>, params: &ModelParams<T>) -> SpectralField<T> {
    let omega = u.omega();
    let lambdas: Vec<T> = u.basis().eigenvalues().to_vec();
    u.apply_diagonal(|m, flat| symbol(m, lambdas[flat], params, omega))
}

fn ensure_oscillatory<T: Scalar>(f: &SpectralField<T>) -> Result<(), SolveError> {
    let steady = f.steady_part_max();
    if steady > T::zero() && steady > T::lit(16.0) * T::epsilon() * f.max_coeff() {
        return Err(SolveError::SteadyContent);
    }
    Ok(())
}

fn divide_oscillatory<T: Scalar>(
    f: &SpectralField<T>,
    factor: impl Fn(i64, T) -> Complex<T>,
) -> Result<SpectralField<T>, SolveError> {
    let mut out = f.clone();
    let basis = f.basis().clone();
    let spatial = basis.spatial_len();
    let m_max = out.m_max() as i64;
    let tol = resonance_tolerance::<T>();
    let mut multi = vec![0usize; basis.dim()];
    for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
        let m = (i / spatial) as i64 - m_max;
        let flat = i % spatial;
        if m == 0 {
            *c = Complex::new(T::zero(), T::zero());
            continue;
        }
        let s = factor(m, basis.eigenvalue(flat));
        if s.norm() < tol {
            basis.decode_multi(flat, &mut multi);
            let wavenumbers: Vec<usize> = (0..basis.dim())
                .map(|axis| basis.wavenumber(axis, multi[axis]))
                .collect();
            return Err(SolveError::Resonance {
                m,
                n: wavenumbers,
                abs_sigma: s.norm().to_f64().unwrap_or(0.0),
            });
        }
        *c /= s;
    }
    Ok(out)
}

/// Inverts the full operator on a purely oscillatory right-hand side with
/// homogeneous boundary data: `u(m, n) = f(m, n) / sigma(m, n)`.
pub fn solve_linear_direct<T: Scalar>(
    f: &SpectralField<T>,
    params: &ModelParams<T>,
) -> Result<SpectralField<T>, SolveError> {
    ensure_oscillatory(f)?;
    let omega = f.omega();
    divide_oscillatory(f, |m, lambda| symbol(m, lambda, params, omega))
}

/// Polynomial boundary lift on an interval: one polynomial (degree <= 4) per
/// temporal mode, carrying the endpoint traces exactly. The coefficient
/// remainder then solves a homogeneous problem.
#[derive(Debug, Clone)]
pub struct BoundaryLift<T: Scalar> {
    length: T,
    period: T,
    m_max: usize,
    polys: Vec<[Complex<T>; 5]>,
}

fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

fn poly_derivative<T: Scalar>(p: &[Complex<T>; 5]) -> [Complex<T>; 5] {
    let mut out = [czero::<T>(); 5];
    for k in 1..5 {
        out[k - 1] = p[k] * T::of_usize(k);
    }
    out
}

fn poly_eval<T: Scalar>(p: &[Complex<T>; 5], x: T) -> Complex<T> {
    let mut acc = czero::<T>();
    for k in (0..5).rev() {
        acc = acc * x + p[k];
    }
    acc
}

impl<T: Scalar> BoundaryLift<T> {
    /// Lift matching the full trace pair of the fourth-order problem:
    /// Dirichlet `(u, lap u) = (g, h)` with a cubic (its bi-Laplacian
    /// vanishes), Neumann `(du, d lap u)` in the outward normal sense with a
    /// quartic (a cubic cannot match two independent third-derivative
    /// traces).
    pub fn full(bc: BcKind, g: &TraceSeries<T>, h: &TraceSeries<T>, length: T, period: T) -> Self {
        assert_eq!(g.m_max(), h.m_max());
        let m_max = g.m_max();
        let l = length;
        let polys = (-(m_max as i64)..=(m_max as i64))
            .map(|m| {
                let (g0, gl) = (g.coeff(0, m), g.coeff(1, m));
                let (h0, hl) = (h.coeff(0, m), h.coeff(1, m));
                match bc {
                    BcKind::Dirichlet => {
                        let c2 = h0 / T::lit(2.0);
                        let c3 = (hl - h0) / (T::lit(6.0) * l);
                        let c0 = g0;
                        let c1 = (gl - g0 - c2 * (l * l) - c3 * (l * l * l)) / l;
                        [c0, c1, c2, c3, czero()]
                    }
                    BcKind::Neumann => {
                        // outward normal: -d/dx at the left endpoint
                        let c1 = -g0;
                        let c3 = -h0 / T::lit(6.0);
                        let c4 = (hl + h0) / (T::lit(24.0) * l);
                        let c2 =
                            (gl - c1 - c3 * (l * l) * T::lit(3.0) - c4 * (l * l * l) * T::lit(4.0))
                                / (T::lit(2.0) * l);
                        [czero(), c1, c2, c3, c4]
                    }
                }
            })
            .collect();
        Self {
            length,
            period,
            m_max,
            polys,
        }
    }

    /// Lift for a single second-order stage: Dirichlet values use the linear
    /// interpolant, Neumann fluxes a quadratic.
    pub fn stage(bc: BcKind, v: &TraceSeries<T>, length: T, period: T) -> Self {
        let m_max = v.m_max();
        let l = length;
        let polys = (-(m_max as i64)..=(m_max as i64))
            .map(|m| {
                let (v0, vl) = (v.coeff(0, m), v.coeff(1, m));
                match bc {
                    BcKind::Dirichlet => [v0, (vl - v0) / l, czero(), czero(), czero()],
                    BcKind::Neumann => {
                        let c1 = -v0;
                        let c2 = (vl + v0) / (T::lit(2.0) * l);
                        [czero(), c1, c2, czero(), czero()]
                    }
                }
            })
            .collect();
        Self {
            length,
            period,
            m_max,
            polys,
        }
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn is_zero(&self) -> bool {
        self.polys
            .iter()
            .all(|p| p.iter().all(|c| c.re == T::zero() && c.im == T::zero()))
    }

    pub fn omega(&self) -> T {
        T::lit(2.0) * T::PI() / self.period
    }

    /// Polynomial of one temporal mode, differentiated `dx_order` times.
    fn mode_poly(&self, m: i64, dx_order: usize) -> [Complex<T>; 5] {
        let mut p = self.polys[(m + self.m_max as i64) as usize];
        for _ in 0..dx_order {
            p = poly_derivative(&p);
        }
        p
    }

    /// Real value of `d_t^{dt_order} d_x^{dx_order}` of the lift at `(t, x)`.
    pub fn eval(&self, t: T, x: T, dt_order: u32, dx_order: usize) -> T {
        let omega = self.omega();
        let mut acc = czero::<T>();
        for m in -(self.m_max as i64)..=(self.m_max as i64) {
            let mut c = poly_eval(&self.mode_poly(m, dx_order), x);
            let iwm = Complex::new(T::zero(), T::of_i64(m) * omega);
            for _ in 0..dt_order {
                c *= iwm;
            }
            acc += c * Complex::from_polar(T::one(), T::of_i64(m) * omega * t);
        }
        acc.re
    }

    /// Values of `d_t^{dt} d_x^{dx}` of the lift on an `(nt, ng)` collocation
    /// grid, time-major, using Hermitian pairing so the result is exactly
    /// real.
    pub fn eval_grid(&self, nt: usize, ng: usize, dt_order: u32, dx_order: usize) -> Vec<T> {
        let omega = self.omega();
        let mut out = vec![T::zero(); nt * ng];
        let two_pi = T::lit(2.0) * T::PI();
        for m in 0..=self.m_max as i64 {
            let poly = self.mode_poly(m, dx_order);
            let iwm = Complex::new(T::zero(), T::of_i64(m) * omega);
            let mut scale = Complex::new(T::one(), T::zero());
            for _ in 0..dt_order {
                scale *= iwm;
            }
            let weight = if m == 0 { T::one() } else { T::lit(2.0) };
            for j in 0..ng {
                let x = (T::of_usize(j) + T::lit(0.5)) * self.length / T::of_usize(ng);
                let cval = poly_eval(&poly, x) * scale;
                if cval.re == T::zero() && cval.im == T::zero() {
                    continue;
                }
                for i in 0..nt {
                    let angle = two_pi * T::of_i64(m) * T::of_usize(i) / T::of_usize(nt);
                    let (s, c) = angle.sin_cos();
                    out[i * ng + j] += weight * (cval.re * c - cval.im * s);
                }
            }
        }
        out
    }

    /// Exact Galerkin projection of `d_x^{dx_order}` of the lift onto a 1-D
    /// basis, with the lift's temporal band.
    pub fn project(&self, basis: &Basis<T>, dx_order: usize) -> SpectralField<T> {
        assert_eq!(basis.dim(), 1, "lifting is an interval construction");
        let mut out = SpectralField::zero(basis.clone(), self.m_max, self.period);
        for m in -(self.m_max as i64)..=(self.m_max as i64) {
            let poly = self.mode_poly(m, dx_order);
            let coeffs =
                polynomial_coefficients(&poly, self.length, basis.families()[0], basis.counts()[0]);
            for (flat, c) in coeffs.into_iter().enumerate() {
                out.set(m, flat, c);
            }
        }
        out
    }

    /// Banded image of the lift under one of the constant-coefficient
    /// operators, assembled from exact projections of the lift and its even
    /// spatial derivatives (temporal factors are exact per mode).
    pub fn operator_image(
        &self,
        params: &ModelParams<T>,
        basis: &Basis<T>,
        op: LiftOperator,
    ) -> SpectralField<T> {
        let p0 = self.project(basis, 0);
        let p2 = self.project(basis, 2);
        let p4 = self.project(basis, 4);
        let omega = self.omega();
        let (a, b, c) = (params.a, params.b, params.c);
        let c2 = c * c;
        let mut out = SpectralField::zero(basis.clone(), self.m_max, self.period);
        for m in -(self.m_max as i64)..=(self.m_max as i64) {
            let iota = Complex::new(T::zero(), T::of_i64(m) * omega);
            let (w0, w2, w4): (Complex<T>, Complex<T>, Complex<T>) = match op {
                // (a lap - d_t)(d_t^2 - c^2 lap - b d_t lap)
                LiftOperator::Full => (
                    -(iota * iota * iota),
                    iota * iota * (a + b) + iota * c2,
                    -(iota * (a * b) + Complex::new(a * c2, T::zero())),
                ),
                // d_t^2 - c^2 lap - b d_t lap
                LiftOperator::Kuznetsov => (
                    iota * iota,
                    -(iota * b + Complex::new(c2, T::zero())),
                    czero(),
                ),
                // a lap - d_t
                LiftOperator::Heat => (-iota, Complex::new(a, T::zero()), czero()),
            };
            for flat in 0..basis.spatial_len() {
                let val = p0.get(m, flat) * w0 + p2.get(m, flat) * w2 + p4.get(m, flat) * w4;
                out.set(m, flat, val);
            }
        }
        out
    }
}

/// Which constant-coefficient operator a lift image is taken under.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftOperator {
    Full,
    Kuznetsov,
    Heat,
}

/// Builds the trace-carrying lift for the full problem on an interval.
pub fn lift_boundary_1d<T: Scalar>(
    boundary: &BoundaryData1D<T>,
    bc: BcKind,
    length: T,
    period: T,
) -> BoundaryLift<T> {
    BoundaryLift::full(bc, &boundary.g, &boundary.h, length, period)
}

/// A solution carrying an optional boundary lift next to its band-limited
/// interior part. Traces evaluate exactly through the lift; the interior
/// coefficients solve the lifted (homogeneous-boundary) problem.
#[derive(Debug, Clone)]
pub struct LinearSolution<T: Scalar> {
    pub field: SpectralField<T>,
    pub lift: Option<BoundaryLift<T>>,
}

impl<T: Scalar> LinearSolution<T> {
    pub fn homogeneous(field: SpectralField<T>) -> Self {
        Self { field, lift: None }
    }

    /// Best band-limited representation: interior plus projected lift.
    pub fn banded_total(&self) -> SpectralField<T> {
        match &self.lift {
            Some(l) if !l.is_zero() => self.field.add(&l.project(self.field.basis(), 0)),
            _ => self.field.clone(),
        }
    }

    /// Pointwise value including the lift.
    pub fn eval_point(&self, t: T, x: &[T]) -> T {
        let mut v = self.field.eval_point(t, x);
        if let Some(l) = &self.lift {
            v += l.eval(t, x[0], 0, 0);
        }
        v
    }

    /// Pointwise value of the Laplacian including the lift (1-D).
    pub fn eval_laplacian(&self, t: T, x: &[T]) -> T {
        let mut v = self.field.laplacian().eval_point(t, x);
        if let Some(l) = &self.lift {
            v += l.eval(t, x[0], 0, 2);
        }
        v
    }

    /// Pointwise x-derivative including the lift (1-D).
    pub fn eval_dx(&self, t: T, x: &[T]) -> T {
        let mut v = self.field.derivative_axis(0).eval_point(t, x);
        if let Some(l) = &self.lift {
            v += l.eval(t, x[0], 0, 1);
        }
        v
    }
}

fn boundary_is_oscillatory<T: Scalar>(b: &BoundaryData1D<T>) -> bool {
    let [g0, g1] = b.g.steady();
    let [h0, h1] = b.h.steady();
    g0 == T::zero() && g1 == T::zero() && h0 == T::zero() && h1 == T::zero()
}

/// Solves the time-periodic damped-wave (Kuznetsov) stage
/// `d_t^2 v - c^2 lap v - b d_t lap v = f` with optional 1-D boundary data
/// for `v` (value traces for Dirichlet, flux traces for Neumann), handled by
/// lifting.
pub fn solve_kuznetsov<T: Scalar>(
    f: &SpectralField<T>,
    params: &ModelParams<T>,
    v_boundary: Option<&TraceSeries<T>>,
) -> Result<LinearSolution<T>, SolveError> {
    ensure_oscillatory(f)?;
    let omega = f.omega();
    let bc = f.basis().bc_kind().ok_or(SolveError::WrongBcKind)?;
    let lift = match v_boundary {
        Some(tr) if !tr.is_zero() => {
            if f.basis().dim() != 1 {
                return Err(SolveError::UnsupportedBoundary);
            }
            Some(BoundaryLift::stage(
                bc,
                tr,
                f.basis().lengths()[0],
                f.period(),
            ))
        }
        _ => None,
    };
    let rhs = match &lift {
        Some(l) => f.sub(&l.operator_image(params, f.basis(), LiftOperator::Kuznetsov)),
        None => f.clone(),
    };
    let field = divide_oscillatory(&rhs, |m, lambda| kuznetsov_symbol(m, lambda, params, omega))?;
    Ok(LinearSolution { field, lift })
}

/// Solves the time-periodic heat stage `a lap u - d_t u = v` with optional
/// 1-D boundary data for `u`.
pub fn solve_heat<T: Scalar>(
    v: &SpectralField<T>,
    params: &ModelParams<T>,
    g_boundary: Option<&TraceSeries<T>>,
) -> Result<LinearSolution<T>, SolveError> {
    ensure_oscillatory(v)?;
    let omega = v.omega();
    let bc = v.basis().bc_kind().ok_or(SolveError::WrongBcKind)?;
    let lift = match g_boundary {
        Some(tr) if !tr.is_zero() => {
            if v.basis().dim() != 1 {
                return Err(SolveError::UnsupportedBoundary);
            }
            Some(BoundaryLift::stage(
                bc,
                tr,
                v.basis().lengths()[0],
                v.period(),
            ))
        }
        _ => None,
    };
    let rhs = match &lift {
        Some(l) => v.sub(&l.operator_image(params, v.basis(), LiftOperator::Heat)),
        None => v.clone(),
    };
    let field = divide_oscillatory(&rhs, |m, lambda| heat_symbol(m, lambda, params, omega))?;
    Ok(LinearSolution { field, lift })
}

/// Inverts the full oscillatory operator through its heat * damped-wave
/// factorization. A joint polynomial lift carries `(g, h)` exactly; the
/// coefficient remainder is divided by the damped-wave factor and then the
/// heat factor, so on homogeneous data the path agrees with
/// `solve_linear_direct` up to symbol-evaluation rounding.
pub fn solve_linear_decomposed<T: Scalar>(
    f: &SpectralField<T>,
    params: &ModelParams<T>,
    boundary: Option<&BoundaryData1D<T>>,
) -> Result<LinearSolution<T>, SolveError> {
    ensure_oscillatory(f)?;
    let omega = f.omega();
    let bc = f.basis().bc_kind().ok_or(SolveError::WrongBcKind)?;
    let lift = match boundary {
        Some(b) if !b.is_zero() => {
            if f.basis().dim() != 1 {
                return Err(SolveError::UnsupportedBoundary);
            }
            if !boundary_is_oscillatory(b) {
                return Err(SolveError::SteadyContent);
            }
            Some(lift_boundary_1d(b, bc, f.basis().lengths()[0], f.period()))
        }
        _ => None,
    };
    let rhs = match &lift {
        Some(l) => f.sub(&l.operator_image(params, f.basis(), LiftOperator::Full)),
        None => f.clone(),
    };
    let v = divide_oscillatory(&rhs, |m, lambda| kuznetsov_symbol(m, lambda, params, omega))?;
    let field = divide_oscillatory(&v, |m, lambda| heat_symbol(m, lambda, params, omega))?;
    Ok(LinearSolution { field, lift })
}

/// Steady endpoint traces for the elliptic problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyTraces<T> {
    pub g: [T; 2],
    pub h: [T; 2],
}

impl<T: Scalar> SteadyTraces<T> {
    pub fn homogeneous() -> Self {
        Self {
            g: [T::zero(); 2],
            h: [T::zero(); 2],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().chain(self.h.iter()).all(|&x| x == T::zero())
    }

    fn to_lift(self, bc: BcKind, length: T, period: T) -> BoundaryLift<T> {
        let mut g = TraceSeries::zero(0);
        let mut h = TraceSeries::zero(0);
        g.left[0] = Complex::new(self.g[0], T::zero());
        g.right[0] = Complex::new(self.g[1], T::zero());
        h.left[0] = Complex::new(self.h[0], T::zero());
        h.right[0] = Complex::new(self.h[1], T::zero());
        BoundaryLift::full(bc, &g, &h, length, period)
    }
}

fn ensure_steady<T: Scalar>(f: &SpectralField<T>) -> Result<(), SolveError> {
    let osc = f.project_oscillatory().max_coeff();
    if osc > T::zero() && osc > T::lit(16.0) * T::epsilon() * f.max_coeff() {
        return Err(SolveError::Parameter(
            "steady solver requires a time-independent right-hand side".into(),
        ));
    }
    Ok(())
}

/// Direct coefficient rule `u(n) = -f(n) / (a c^2 lambda_n^2)` for steady
/// homogeneous data; the internal cross-check of the staged route.
pub fn steady_dirichlet_direct<T: Scalar>(
    f: &SpectralField<T>,
    params: &ModelParams<T>,
) -> SpectralField<T> {
    let ac2 = params.a * params.c * params.c;
    let lambdas: Vec<T> = f.basis().eigenvalues().to_vec();
    f.apply_diagonal(|m, flat| {
        if m == 0 {
            Complex::new(
                -(T::one() / (ac2 * lambdas[flat] * lambdas[flat])),
                T::zero(),
            )
        } else {
            czero()
        }
    })
}

/// Steady problem `-a c^2 lap^2 u = f` with Dirichlet traces `(g, h)`,
/// solved by lifting and the two nested Laplace inversions
/// (`lap v = f`, then `-a c^2 lap u = v`).
pub fn solve_steady_dirichlet<T: Scalar>(
    f: &SpectralField<T>,
    traces: SteadyTraces<T>,
    params: &ModelParams<T>,
) -> Result<LinearSolution<T>, SolveError> {
    ensure_steady(f)?;
    let basis = f.basis().clone();
    if basis.bc_kind() != Some(BcKind::Dirichlet) {
        return Err(SolveError::WrongBcKind);
    }
    let lift = if traces.is_zero() {
        None
    } else {
        if basis.dim() != 1 {
            return Err(SolveError::UnsupportedBoundary);
        }
        Some(traces.to_lift(BcKind::Dirichlet, basis.lengths()[0], f.period()))
    };
    let rhs = match &lift {
        Some(l) => f.sub(&l.operator_image(params, &basis, LiftOperator::Full)),
        None => f.clone(),
    };
    let ac2 = params.a * params.c * params.c;
    let lambdas: Vec<T> = basis.eigenvalues().to_vec();
    // stage 1: lap v = f  ->  v(n) = -f(n)/lambda
    let v = rhs.apply_diagonal(|m, flat| {
        if m == 0 {
            Complex::new(-(T::one() / lambdas[flat]), T::zero())
        } else {
            czero()
        }
    });
    // stage 2: -a c^2 lap u = v  ->  u(n) = v(n)/(a c^2 lambda)
    let field = v.apply_diagonal(|m, flat| {
        if m == 0 {
            Complex::new(T::one() / (ac2 * lambdas[flat]), T::zero())
        } else {
            czero()
        }
    });
    Ok(LinearSolution { field, lift })
}

/// Solvability residual of the steady Neumann problem,
/// `int_Omega f dx + a c^2 int_bd h dS`, together with its scale.
pub fn neumann_compatibility<T: Scalar>(
    f: &SpectralField<T>,
    h_steady: [T; 2],
    params: &ModelParams<T>,
) -> (T, T) {
    let measure = f.basis().lengths().iter().fold(T::one(), |acc, &l| acc * l);
    let f_integral = f.get(0, 0).re * measure; // constant mode has flat index 0
    let ac2 = params.a * params.c * params.c;
    let h_integral = ac2 * (h_steady[0] + h_steady[1]);
    let residual = f_integral + h_integral;
    let scale = f_integral.abs().max(h_integral.abs());
    (residual, scale)
}

/// Steady problem `-a c^2 lap^2 u = f` with Neumann traces, zero-mean gauge.
/// The compatibility integral is checked against `1e-10` times the data
/// scale before anything else runs.
pub fn solve_steady_neumann<T: Scalar>(
    f: &SpectralField<T>,
    traces: SteadyTraces<T>,
    params: &ModelParams<T>,
) -> Result<LinearSolution<T>, SolveError> {
    ensure_steady(f)?;
    let basis = f.basis().clone();
    if basis.bc_kind() != Some(BcKind::Neumann) {
        return Err(SolveError::WrongBcKind);
    }
    let (residual, scale) = neumann_compatibility(f, traces.h, params);
    if residual.abs() > T::lit(1e-10) * scale {
        return Err(SolveError::IncompatibleData {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    let lift = if traces.is_zero() {
        None
    } else {
        if basis.dim() != 1 {
            return Err(SolveError::UnsupportedBoundary);
        }
        Some(traces.to_lift(BcKind::Neumann, basis.lengths()[0], f.period()))
    };
    let rhs = match &lift {
        Some(l) => f.sub(&l.operator_image(params, &basis, LiftOperator::Full)),
        None => f.clone(),
    };
    let ac2 = params.a * params.c * params.c;
    let lambdas: Vec<T> = basis.eigenvalues().to_vec();
    // two Laplace-Neumann stages on the nonconstant modes; the lifted
    // problem is compatible, so any residual constant content is rounding
    let v = rhs.apply_diagonal(|m, flat| {
        if m == 0 && lambdas[flat] > T::zero() {
            Complex::new(-(T::one() / lambdas[flat]), T::zero())
        } else {
            czero()
        }
    });
    let mut field = v.apply_diagonal(|m, flat| {
        if m == 0 && lambdas[flat] > T::zero() {
            Complex::new(T::one() / (ac2 * lambdas[flat]), T::zero())
        } else {
            czero()
        }
    });
    // zero-mean gauge for the total solution (interior + lift)
    if let Some(l) = &lift {
        let mean = l.project(&basis, 0).get(0, 0);
        field.set(0, 0, -mean);
    }
    Ok(LinearSolution { field, lift })
}
