//! The fixed-point solver: steady/oscillatory data splitting, steady solve,
//! Picard iteration of the oscillatory map, convergence and divergence
//! reporting, and the amplitude-threshold scan.
//!
//! The oscillatory iterate solves
//! `u_p = A^{-1}( d_t^2(k (d_t u_p)^2 + s |grad u_p|^2)
//!                + 2 s grad u_s . d_t^2 grad u_p + f_p, g_p, h_p )`
//! starting from zero. Both quadratic terms are evaluated together on the
//! total field `u_s + u_p` (the `d_t^2` projection makes that identical to
//! the split form), and boundary data enters once through a fixed polynomial
//! lift.

use serde::Serialize;

use crate::error::SolveError;
use crate::linear::{self, apply_symbol, BoundaryLift, LiftOperator, LinearSolution, SteadyTraces};
use crate::model::{
    BcKind, BoundaryData1D, ForcingSpec, ForcingTerm, ModelParams, ProblemSpec, TraceSeries,
};
use crate::nonlinear::eval_q_lifted;
use crate::scalar::Scalar;
use crate::spectral::norms::{lp_norm, ps_norm};
use crate::spectral::transform::to_physical;
use crate::spectral::{Basis, SpectralField};

/// Iteration controls. Defaults: pure Picard from zero, relative tolerance
/// `1e-10` in the weighted coefficient norm, divergence declared at a norm
/// ceiling of `1e6` or five consecutive contraction ratios above one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
#[serde(
    bound(
        serialize = "T: serde::Serialize",
        deserialize = "T: serde::Deserialize<'de> + Scalar"
    ),
    default
)]
pub struct FixedPointConfig<T: Scalar> {
    pub max_iterations: usize,
    pub tolerance: T,
    pub relaxation: T,
    pub norm_ceiling: T,
    pub ratio_guard: usize,
    /// Exponent for the reported space-time norms (any `p > 5/2`).
    pub report_exponent: T,
}

impl<T: Scalar> Default for FixedPointConfig<T> {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            tolerance: T::lit(1e-10),
            relaxation: T::one(),
            norm_ceiling: T::lit(1e6),
            ratio_guard: 5,
            report_exponent: T::lit(3.0),
        }
    }
}

impl<T: Scalar> FixedPointConfig<T> {
    pub fn validate(&self) -> Result<(), SolveError> {
        if !(self.tolerance > T::zero()) {
            return Err(SolveError::Parameter("tolerance must be positive".into()));
        }
        if !(self.relaxation > T::zero() && self.relaxation <= T::one()) {
            return Err(SolveError::Parameter(
                "relaxation must lie in (0, 1]".into(),
            ));
        }
        if self.max_iterations == 0 {
            return Err(SolveError::Parameter(
                "at least one iteration is required".into(),
            ));
        }
        Ok(())
    }
}

/// Why an iteration was declared divergent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceReason {
    NormCeiling,
    PersistentRatioAboveOne,
    MaxIterations,
}

/// Iterate history and verdict of one solve.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
pub struct SolveReport<T: Scalar> {
    pub converged: bool,
    pub iterations: usize,
    /// `|u^{j} - N(u^{j})|` in the weighted coefficient norm, per iteration.
    pub residual_history: Vec<T>,
    /// `|u^{j+1} - u^{j}| / |u^{j} - u^{j-1}|`.
    pub contraction_ratios: Vec<T>,
    pub final_ps_norm: T,
    pub final_lp_norm: T,
    /// Data smallness `|f|_p` plus coefficient bounds of the traces.
    pub data_epsilon: T,
    pub steady_norm: T,
    pub divergence: Option<DivergenceReason>,
}

/// Steady/oscillatory split of forcing and boundary data; the parts sum to
/// the inputs exactly.
#[derive(Debug, Clone)]
pub struct SplitData<T: Scalar> {
    pub f_steady: SpectralField<T>,
    pub f_oscillatory: SpectralField<T>,
    pub boundary_steady: Option<BoundaryData1D<T>>,
    pub boundary_oscillatory: Option<BoundaryData1D<T>>,
}

fn split_series<T: Scalar>(s: &TraceSeries<T>) -> (TraceSeries<T>, TraceSeries<T>) {
    let m_max = s.m_max();
    let mut steady = TraceSeries::zero(m_max);
    let mut osc = s.clone();
    steady.left[m_max] = s.left[m_max];
    steady.right[m_max] = s.right[m_max];
    osc.left[m_max] = num_complex::Complex::new(T::zero(), T::zero());
    osc.right[m_max] = num_complex::Complex::new(T::zero(), T::zero());
    (steady, osc)
}

/// Splits `(f, g, h)` into steady parts (temporal mean) and purely
/// oscillatory parts.
pub fn split_data<T: Scalar>(
    f: &SpectralField<T>,
    boundary: Option<&BoundaryData1D<T>>,
) -> SplitData<T> {
    let (boundary_steady, boundary_oscillatory) = match boundary {
        Some(b) => {
            let (gs, gp) = split_series(&b.g);
            let (hs, hp) = split_series(&b.h);
            (
                Some(BoundaryData1D { g: gs, h: hs }),
                Some(BoundaryData1D { g: gp, h: hp }),
            )
        }
        None => (None, None),
    };
    SplitData {
        f_steady: f.project_steady(),
        f_oscillatory: f.project_oscillatory(),
        boundary_steady,
        boundary_oscillatory,
    }
}

/// Assembles the structured forcing into a coefficient field on the
/// problem's equation basis.
pub fn assemble_forcing<T: Scalar>(problem: &ProblemSpec<T>) -> SpectralField<T> {
    let basis = Basis::from_domain(&problem.domain, &problem.n_spatial_modes);
    let mut f = SpectralField::zero(basis, problem.n_temporal_modes, problem.period);
    for term in &problem.forcing.terms {
        f.add_real_mode(
            term.temporal_mode,
            &term.spatial,
            term.amplitude,
            term.phase,
        );
    }
    f
}

/// Decomposes a real coefficient field into separable cosine forcing terms,
/// the inverse of `assemble_forcing` up to rounding. Lets the
/// manufactured-solution harness feed arbitrary in-band right-hand sides
/// through the ordinary problem interface.
pub fn forcing_spec_from_field<T: Scalar>(f: &SpectralField<T>) -> ForcingSpec<T> {
    let basis = f.basis();
    let mut terms = Vec::new();
    let mut multi = vec![0usize; basis.dim()];
    for flat in 0..f.spatial_len() {
        basis.decode_multi(flat, &mut multi);
        let wavenumbers: Vec<usize> = (0..basis.dim())
            .map(|a| basis.wavenumber(a, multi[a]))
            .collect();
        for m in 0..=f.m_max() as i64 {
            let c = f.get(m, flat);
            if c.norm() == T::zero() {
                continue;
            }
            if m == 0 {
                terms.push(ForcingTerm {
                    amplitude: c.re,
                    temporal_mode: 0,
                    phase: T::zero(),
                    spatial: wavenumbers.clone(),
                });
            } else {
                terms.push(ForcingTerm {
                    amplitude: T::lit(2.0) * c.norm(),
                    temporal_mode: m,
                    phase: c.arg(),
                    spatial: wavenumbers.clone(),
                });
            }
        }
    }
    ForcingSpec { terms }
}

fn coefficient_bound<T: Scalar>(s: &TraceSeries<T>) -> T {
    s.left.iter().chain(s.right.iter()).map(|c| c.norm()).sum()
}

fn boundary_epsilon<T: Scalar>(b: Option<&BoundaryData1D<T>>) -> T {
    match b {
        Some(b) => coefficient_bound(&b.g) + coefficient_bound(&b.h),
        None => T::zero(),
    }
}

struct Prepared<T: Scalar> {
    basis: Basis<T>,
    f: SpectralField<T>,
    lift: Option<BoundaryLift<T>>,
    /// forcing minus the lift's operator image
    f_eff: SpectralField<T>,
}

fn prepare<T: Scalar>(problem: &ProblemSpec<T>) -> Result<Prepared<T>, SolveError> {
    let validated = crate::model::validate_problem(problem.clone())?;
    let basis = Basis::from_domain(&validated.domain, &validated.n_spatial_modes);
    let f = assemble_forcing(&validated);
    let lift = match &validated.boundary {
        Some(b) if !b.is_zero() => {
            if validated.domain.dimension != 1 {
                return Err(SolveError::UnsupportedBoundary);
            }
            Some(linear::lift_boundary_1d(
                b,
                validated.domain.bc_kind,
                validated.domain.lengths[0],
                validated.period,
            ))
        }
        _ => None,
    };
    let f_eff = match &lift {
        Some(l) => f.sub(&l.operator_image(&validated.params, &basis, LiftOperator::Full)),
        None => f.clone(),
    };
    Ok(Prepared {
        basis,
        f,
        lift,
        f_eff,
    })
}

/// (iterate, residual history, contraction ratios, divergence verdict)
type IterationOutcome<T> = (SpectralField<T>, Vec<T>, Vec<T>, Option<DivergenceReason>);

fn run_picard<T: Scalar>(
    params: &ModelParams<T>,
    prepared: &Prepared<T>,
    steady_interior: &SpectralField<T>,
    cfg: &FixedPointConfig<T>,
) -> Result<IterationOutcome<T>, SolveError> {
    let f_p = prepared.f_eff.project_oscillatory();
    let omega = f_p.omega();
    let lambdas: Vec<T> = prepared.basis.eigenvalues().to_vec();

    let mut w = SpectralField::zero(prepared.basis.clone(), f_p.m_max(), f_p.period());
    let mut residuals: Vec<T> = Vec::new();
    let mut ratios: Vec<T> = Vec::new();
    let mut last_step_norm: Option<T> = None;
    let mut above_one_run = 0usize;
    let mut divergence = None;

    for _iter in 0..cfg.max_iterations {
        // N(w): invert the linear operator on the nonlinearity of the total
        // field plus the oscillatory data
        let total = steady_interior.add(&w);
        let q = eval_q_lifted(&total, prepared.lift.as_ref(), params);
        let rhs = q.add(&f_p);
        let mapped = {
            let mut out = rhs.clone();
            let spatial = prepared.basis.spatial_len();
            let m_max = out.m_max() as i64;
            let tol = linear::resonance_tolerance::<T>();
            for (i, c) in out.coeffs_mut().iter_mut().enumerate() {
                let m = (i / spatial) as i64 - m_max;
                if m == 0 {
                    *c = num_complex::Complex::new(T::zero(), T::zero());
                    continue;
                }
                let s = linear::symbol(m, lambdas[i % spatial], params, omega);
                if s.norm() < tol {
                    return Err(SolveError::Resonance {
                        m,
                        n: vec![i % spatial],
                        abs_sigma: s.norm().to_f64().unwrap_or(0.0),
                    });
                }
                *c /= s;
            }
            out
        };
        debug_assert_eq!(mapped.steady_part_max(), T::zero());

        let residual = ps_norm(&mapped.sub(&w));
        residuals.push(residual);

        let next = if cfg.relaxation == T::one() {
            mapped
        } else {
            w.scale(T::one() - cfg.relaxation)
                .add(&mapped.scale(cfg.relaxation))
        };
        let step_norm = ps_norm(&next.sub(&w));
        if let Some(prev) = last_step_norm {
            if prev > T::zero() {
                let ratio = step_norm / prev;
                ratios.push(ratio);
                if ratio > T::one() {
                    above_one_run += 1;
                } else {
                    above_one_run = 0;
                }
            }
        }
        last_step_norm = Some(step_norm);
        w = next;

        let w_norm = ps_norm(&w);
        if residual <= cfg.tolerance * w_norm || residual == T::zero() {
            return Ok((w, residuals, ratios, None));
        }
        if w_norm > cfg.norm_ceiling {
            divergence = Some(DivergenceReason::NormCeiling);
            break;
        }
        if above_one_run >= cfg.ratio_guard {
            divergence = Some(DivergenceReason::PersistentRatioAboveOne);
            break;
        }
    }
    Ok((
        w,
        residuals,
        ratios,
        Some(divergence.unwrap_or(DivergenceReason::MaxIterations)),
    ))
}

fn finish<T: Scalar>(
    params: &ModelParams<T>,
    prepared: Prepared<T>,
    steady_interior: SpectralField<T>,
    cfg: &FixedPointConfig<T>,
    boundary: Option<&BoundaryData1D<T>>,
    neumann_gauge: bool,
) -> Result<(LinearSolution<T>, SolveReport<T>), SolveError> {
    let _ = params;
    let (w_p, residuals, ratios, divergence) =
        run_picard(params, &prepared, &steady_interior, cfg)?;

    let mut field = steady_interior.add(&w_p);
    if neumann_gauge {
        if let Some(l) = &prepared.lift {
            // zero spatial mean of the total steady part
            let lift_mean = l.project(&prepared.basis, 0).get(0, 0);
            field.set(0, 0, -lift_mean);
        }
    }
    let solution = LinearSolution {
        field,
        lift: prepared.lift.clone(),
    };

    let banded = solution.banded_total();
    let steady_norm = {
        let s = banded.project_steady();
        crate::spectral::norms::l2_norm(&s)
    };
    let report = SolveReport {
        converged: divergence.is_none(),
        iterations: residuals.len(),
        residual_history: residuals,
        contraction_ratios: ratios,
        final_ps_norm: ps_norm(&banded),
        final_lp_norm: lp_norm(&to_physical(&banded, 2), cfg.report_exponent),
        data_epsilon: lp_norm(&to_physical(&prepared.f, 2), cfg.report_exponent)
            + boundary_epsilon(boundary),
        steady_norm,
        divergence,
    };
    Ok((solution, report))
}

/// Solves the Dirichlet problem: steady part through the elliptic solver,
/// oscillatory part by Picard iteration from zero. Divergence is reported in
/// the `SolveReport`, not as an error.
pub fn solve_bcd<T: Scalar>(
    problem: &ProblemSpec<T>,
    cfg: &FixedPointConfig<T>,
) -> Result<(LinearSolution<T>, SolveReport<T>), SolveError> {
    cfg.validate()?;
    if problem.domain.bc_kind != BcKind::Dirichlet {
        return Err(SolveError::WrongBcKind);
    }
    let prepared = prepare(problem)?;
    let f_s = prepared.f_eff.project_steady();
    let steady =
        linear::solve_steady_dirichlet(&f_s, SteadyTraces::homogeneous(), &problem.params)?;
    finish(
        &problem.params,
        prepared,
        steady.field,
        cfg,
        problem.boundary.as_ref(),
        false,
    )
}

/// Solves the Neumann problem; the compatibility integral is checked on the
/// original data before any iteration, and the steady part carries the
/// zero-mean gauge.
pub fn solve_bcn<T: Scalar>(
    problem: &ProblemSpec<T>,
    cfg: &FixedPointConfig<T>,
) -> Result<(LinearSolution<T>, SolveReport<T>), SolveError> {
    cfg.validate()?;
    if problem.domain.bc_kind != BcKind::Neumann {
        return Err(SolveError::WrongBcKind);
    }
    let prepared = prepare(problem)?;

    // compatibility on the original (f, h)
    let h_steady = problem
        .boundary
        .as_ref()
        .map(|b| b.h.steady())
        .unwrap_or([T::zero(); 2]);
    let f_s_original = prepared.f.project_steady();
    let (residual, scale) = linear::neumann_compatibility(&f_s_original, h_steady, &problem.params);
    if residual.abs() > T::lit(1e-10) * scale {
        return Err(SolveError::IncompatibleData {
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }

    let f_s = prepared.f_eff.project_steady();
    let steady = linear::solve_steady_neumann(&f_s, SteadyTraces::homogeneous(), &problem.params)?;
    finish(
        &problem.params,
        prepared,
        steady.field,
        cfg,
        problem.boundary.as_ref(),
        true,
    )
}

/// Dispatches on the boundary-condition kind.
pub fn solve<T: Scalar>(
    problem: &ProblemSpec<T>,
    cfg: &FixedPointConfig<T>,
) -> Result<(LinearSolution<T>, SolveReport<T>), SolveError> {
    match problem.domain.bc_kind {
        BcKind::Dirichlet => solve_bcd(problem, cfg),
        BcKind::Neumann => solve_bcn(problem, cfg),
    }
}

/// Interior and boundary residuals of a candidate solution against the full
/// nonlinear equation.
#[derive(Debug, Clone)]
pub struct ResidualReport<T: Scalar> {
    pub interior: SpectralField<T>,
    pub boundary_max: T,
}

/// Applies the full nonlinear operator to `u` (band part plus optional lift)
/// and subtracts the data: interior residual in the coefficient band,
/// boundary residual as the largest trace mismatch over collocation times.
pub fn residual<T: Scalar>(
    u: &LinearSolution<T>,
    f: &SpectralField<T>,
    boundary: Option<&BoundaryData1D<T>>,
    params: &ModelParams<T>,
    bc: BcKind,
) -> ResidualReport<T> {
    let mut interior = apply_symbol(&u.field, params);
    if let Some(l) = &u.lift {
        interior = interior.add(&l.operator_image(params, u.field.basis(), LiftOperator::Full));
    }
    let q = eval_q_lifted(&u.field, u.lift.as_ref(), params);
    interior = interior.sub(&q).sub(f);

    let mut boundary_max = T::zero();
    if u.field.basis().dim() == 1 {
        let m_max = u.field.m_max();
        let length = u.field.basis().lengths()[0];
        let period = u.field.period();
        let omega = u.field.omega();
        let nt = 2 * m_max + 1;
        for i in 0..nt {
            let t = T::of_usize(i) * period / T::of_usize(nt);
            for (side, x) in [(0usize, T::zero()), (1usize, length)] {
                let (g_val, h_val) = match boundary {
                    Some(b) => (
                        eval_series(&b.g, side, t, omega),
                        eval_series(&b.h, side, t, omega),
                    ),
                    None => (T::zero(), T::zero()),
                };
                let (trace_g, trace_h) = match bc {
                    BcKind::Dirichlet => (u.eval_point(t, &[x]), u.eval_laplacian(t, &[x])),
                    BcKind::Neumann => {
                        let sign = if side == 0 { -T::one() } else { T::one() };
                        let du = u.eval_dx(t, &[x]) * sign;
                        // normal derivative of the Laplacian
                        let mut dlap = u.field.laplacian().derivative_axis(0).eval_point(t, &[x]);
                        if let Some(l) = &u.lift {
                            dlap += l.eval(t, x, 0, 3);
                        }
                        (du, dlap * sign)
                    }
                };
                boundary_max = boundary_max.max((trace_g - g_val).abs());
                boundary_max = boundary_max.max((trace_h - h_val).abs());
            }
        }
    }
    ResidualReport {
        interior,
        boundary_max,
    }
}

fn eval_series<T: Scalar>(s: &TraceSeries<T>, side: usize, t: T, omega: T) -> T {
    let m_max = s.m_max() as i64;
    let mut acc = num_complex::Complex::new(T::zero(), T::zero());
    for m in -m_max..=m_max {
        let c = s.coeff(side, m);
        acc += c * num_complex::Complex::from_polar(T::one(), T::of_i64(m) * omega * t);
    }
    acc.re
}

/// Builds the forcing that makes an in-band `u_star` the exact discrete
/// solution: `f = A u_star - Q(u_star)` (manufactured-solution harness).
pub fn manufactured_rhs<T: Scalar>(
    u_star: &SpectralField<T>,
    params: &ModelParams<T>,
) -> SpectralField<T> {
    apply_symbol(u_star, params).sub(&crate::nonlinear::eval_q(u_star, params))
}

/// One amplitude point of the threshold scan.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
pub struct ThresholdEntry<T: Scalar> {
    pub amplitude: T,
    pub converged: bool,
    pub iterations: usize,
    pub mean_ratio: Option<T>,
}

/// Empirical convergence boundary over an amplitude grid.
#[derive(Debug, Clone, Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
pub struct ThresholdReport<T: Scalar> {
    pub entries: Vec<ThresholdEntry<T>>,
    pub largest_converged: Option<T>,
    pub smallest_diverged: Option<T>,
}

/// Runs the solver across a monotone amplitude grid (forcing and boundary
/// data scaled together) and reports the empirical convergence boundary.
/// Divergence is data here, not failure.
pub fn estimate_epsilon_threshold<T: Scalar>(
    problem: &ProblemSpec<T>,
    cfg: &FixedPointConfig<T>,
    amplitudes: &[T],
) -> Result<ThresholdReport<T>, SolveError> {
    if amplitudes.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SolveError::Parameter(
            "amplitude grid must be strictly increasing".into(),
        ));
    }
    let mut entries = Vec::with_capacity(amplitudes.len());
    let mut largest_converged = None;
    let mut smallest_diverged = None;
    for &amp in amplitudes {
        let scaled = problem.scaled_data(amp);
        let (_, report) = solve(&scaled, cfg)?;
        let mean_ratio = if report.contraction_ratios.is_empty() {
            None
        } else {
            let n = T::of_usize(report.contraction_ratios.len());
            Some(report.contraction_ratios.iter().copied().sum::<T>() / n)
        };
        if report.converged {
            largest_converged = Some(amp);
        } else if smallest_diverged.is_none() {
            smallest_diverged = Some(amp);
        }
        entries.push(ThresholdEntry {
            amplitude: amp,
            converged: report.converged,
            iterations: report.iterations,
            mean_ratio,
        });
    }
    Ok(ThresholdReport {
        entries,
        largest_converged,
        smallest_diverged,
    })
}
