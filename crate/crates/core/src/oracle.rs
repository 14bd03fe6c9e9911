//! Independent time-stepping reference solver: finds the periodic attractor
//! by long-time integration and cross-validates the harmonic-balance fixed
//! point.
//!
//! The third-order-in-time equation is rewritten as a first-order system in
//! the spatial coefficient vectors `(u, w, zeta)` with `w = d_t u`,
//! `z = d_t^2 u - c^2 lap u - b d_t lap w` and `zeta = z + d_t N`, where
//! `N = k w^2 + s |grad u|^2`:
//!
//! ```text
//! d_t u    = w
//! d_t w    = (zeta - D) + c^2 lap u + b lap w
//! d_t zeta = a lap (zeta - D) - f(t)
//! ```
//!
//! `D = d_t N` appears linearly in its own definition
//! `D (1 + 2 k w) = 2 k w (zeta + c^2 lap u + b lap w) + 2 s grad u . grad w`
//! and is recovered per step by a small Galerkin solve, valid while
//! `1 + 2 k w` stays away from zero (the small-solution regime).
//!
//! Time stepping is exponential ETDRK2: the per-mode 3x3 linear blocks and
//! the band-limited forcing are integrated exactly, the `D` terms explicitly
//! at second order. The scheme shares the spatial basis with the spectral
//! solver but is independent in method.

use num_complex::Complex;

use crate::error::SolveError;
use crate::model::ProblemSpec;
use crate::picard::assemble_forcing;
use crate::scalar::Scalar;
use crate::spectral::convert::project_to_basis;
use crate::spectral::transform::{analyze, to_physical_on};
use crate::spectral::{Basis, SpectralField};

/// Integration controls; `dt` defaults to `T/512`, the period-map tolerance
/// to `1e-8` in the unweighted coefficient norm.
#[derive(Debug, Clone, Copy)]
pub struct OracleConfig<T> {
    pub dt: T,
    pub max_periods: usize,
    pub tol: T,
}

impl<T: Scalar> OracleConfig<T> {
    pub fn for_period(period: T) -> Self {
        Self {
            dt: period / T::lit(512.0),
            max_periods: 200,
            tol: T::lit(1e-8),
        }
    }
}

/// First-order state: spatial coefficient vectors of `(u, w, zeta)` plus the
/// current time.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleState<T> {
    pub u: Vec<T>,
    pub w: Vec<T>,
    pub zeta: Vec<T>,
    pub t: T,
}

impl<T: Scalar> OracleState<T> {
    pub fn zero(spatial_len: usize) -> Self {
        Self {
            u: vec![T::zero(); spatial_len],
            w: vec![T::zero(); spatial_len],
            zeta: vec![T::zero(); spatial_len],
            t: T::zero(),
        }
    }

    /// Unweighted coefficient norm of the full state.
    pub fn norm(&self) -> T {
        let acc: T = self
            .u
            .iter()
            .chain(self.w.iter())
            .chain(self.zeta.iter())
            .map(|&x| x * x)
            .sum();
        acc.sqrt()
    }

    /// Norm of the `(u, w)` pair (the decaying energy surrogate).
    pub fn uw_norm(&self) -> T {
        let acc: T = self.u.iter().chain(self.w.iter()).map(|&x| x * x).sum();
        acc.sqrt()
    }

    pub fn diff_norm(&self, other: &Self) -> T {
        let mut acc = T::zero();
        for (a, b) in self
            .u
            .iter()
            .zip(&other.u)
            .chain(self.w.iter().zip(&other.w))
            .chain(self.zeta.iter().zip(&other.zeta))
        {
            let d = *a - *b;
            acc += d * d;
        }
        acc.sqrt()
    }
}

type Mat3<T> = [[Complex<T>; 3]; 3];

fn mat_identity<T: Scalar>() -> Mat3<T> {
    let z = Complex::new(T::zero(), T::zero());
    let o = Complex::new(T::one(), T::zero());
    [[o, z, z], [z, o, z], [z, z, o]]
}

fn mat_mul<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let z = Complex::new(T::zero(), T::zero());
    let mut out = [[z; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = z;
            for k in 0..3 {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn mat_scale<T: Scalar>(a: &Mat3<T>, s: T) -> Mat3<T> {
    let mut out = *a;
    for row in &mut out {
        for v in row {
            *v *= s;
        }
    }
    out
}

fn mat_add<T: Scalar>(a: &Mat3<T>, b: &Mat3<T>) -> Mat3<T> {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] += b[i][j];
        }
    }
    out
}

fn mat_norm<T: Scalar>(a: &Mat3<T>) -> T {
    let mut n = T::zero();
    for row in a {
        for v in row {
            n = n.max(v.norm());
        }
    }
    n
}

/// `(exp A, phi1(A), phi2(A))` by scaling-and-squaring of the truncated
/// series; exact enough at machine precision for the scaled norm `<= 1/4`.
fn phi_functions<T: Scalar>(a: &Mat3<T>) -> (Mat3<T>, Mat3<T>, Mat3<T>) {
    let norm = mat_norm(a);
    let mut squarings = 0usize;
    let mut scaled = *a;
    let quarter = T::lit(0.25);
    let mut nn = norm;
    while nn > quarter {
        nn /= T::lit(2.0);
        squarings += 1;
    }
    if squarings > 0 {
        scaled = mat_scale(a, T::one() / T::of_usize(1 << squarings));
    }

    // series sum_k A^k / (k + shift)!
    let mut e = mat_identity::<T>();
    let mut p1 = mat_identity::<T>();
    let mut p2 = mat_scale(&mat_identity::<T>(), T::lit(0.5));
    let mut term = mat_identity::<T>();
    let mut k_fact = T::one();
    for k in 1..=20usize {
        term = mat_mul(&term, &scaled);
        k_fact *= T::of_usize(k);
        let k1_fact = k_fact * T::of_usize(k + 1);
        let k2_fact = k1_fact * T::of_usize(k + 2);
        e = mat_add(&e, &mat_scale(&term, T::one() / k_fact));
        p1 = mat_add(&p1, &mat_scale(&term, T::one() / k1_fact));
        p2 = mat_add(&p2, &mat_scale(&term, T::of_usize(k + 2) / k2_fact));
    }

    // undo the scaling: phi1(2z) = (e^z + 1) phi1(z) / 2,
    // phi2(2z) = (phi1(z) + (e^z + 1) phi2(z)) / 4
    for _ in 0..squarings {
        let e_plus_i = mat_add(&e, &mat_identity::<T>());
        let new_p2 = mat_scale(&mat_add(&p1, &mat_mul(&e_plus_i, &p2)), T::lit(0.25));
        let new_p1 = mat_scale(&mat_mul(&e_plus_i, &p1), T::lit(0.5));
        e = mat_mul(&e, &e);
        p1 = new_p1;
        p2 = new_p2;
    }
    (e, p1, p2)
}

fn mat_vec_re<T: Scalar>(m: &[[T; 3]; 3], v: [T; 3]) -> [T; 3] {
    let mut out = [T::zero(); 3];
    for i in 0..3 {
        out[i] = m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2];
    }
    out
}

fn real_part<T: Scalar>(m: &Mat3<T>) -> [[T; 3]; 3] {
    let mut out = [[T::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = m[i][j].re;
        }
    }
    out
}

/// Dense LU solve with partial pivoting (the implicit `D` recovery is a
/// small system in the spatial band).
fn lu_solve<T: Scalar>(mut a: Vec<T>, n: usize, mut b: Vec<T>) -> Vec<T> {
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].abs();
        for row in (col + 1)..n {
            let cand = a[row * n + col].abs();
            if cand > best {
                best = cand;
                pivot = row;
            }
        }
        assert!(best > T::zero(), "singular system in pointwise recovery");
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / diag;
            if factor == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row * n + k] * b[k];
        }
        b[row] = acc / a[row * n + row];
    }
    b
}

/// Dense spatial Galerkin machinery shared by every step: synthesis to the
/// product grid and exact projection back to the equation band.
struct SpatialOps<T: Scalar> {
    grid_len: usize,
    n: usize,
    /// grid x band
    synth: Vec<T>,
    /// per-axis derivative synthesis, grid x band
    dsynth: Vec<Vec<T>>,
    /// band x grid (exact Galerkin projection)
    galerkin: Vec<T>,
}

impl<T: Scalar> SpatialOps<T> {
    fn new(basis: &Basis<T>, period: T) -> Self {
        let dim = basis.dim();
        let ng: Vec<usize> = (0..dim).map(|axis| 2 * basis.min_grid(axis)).collect();
        let grid_len: usize = ng.iter().product();
        let n = basis.spatial_len();

        let mut synth = vec![T::zero(); grid_len * n];
        let mut dsynth = vec![vec![T::zero(); grid_len * n]; dim];
        for j in 0..n {
            let mut unit = SpectralField::zero(basis.clone(), 0, period);
            unit.set(0, j, Complex::new(T::one(), T::zero()));
            let vals = to_physical_on(&unit, 1, &ng, 2);
            for g in 0..grid_len {
                synth[g * n + j] = vals.values()[g];
            }
            for (axis, ds) in dsynth.iter_mut().enumerate() {
                let dv = to_physical_on(&unit.derivative_axis(axis), 1, &ng, 2);
                for g in 0..grid_len {
                    ds[g * n + j] = dv.values()[g];
                }
            }
        }

        let wide = basis.product_cosine_basis();
        let mut galerkin = vec![T::zero(); n * grid_len];
        for g in 0..grid_len {
            let mut unit_vals = vec![T::zero(); grid_len];
            unit_vals[g] = T::one();
            let wide_field = analyze(&unit_vals, 1, &ng, &wide, 0, period);
            let band = project_to_basis(&wide_field, basis, 0);
            for j in 0..n {
                galerkin[j * grid_len + g] = band.get(0, j).re;
            }
        }

        Self {
            grid_len,
            n,
            synth,
            dsynth,
            galerkin,
        }
    }

    fn to_grid(&self, coeffs: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.grid_len];
        for (g, slot) in out.iter_mut().enumerate() {
            let row = &self.synth[g * self.n..(g + 1) * self.n];
            let mut acc = T::zero();
            for (c, s) in coeffs.iter().zip(row) {
                acc += *c * *s;
            }
            *slot = acc;
        }
        out
    }

    fn deriv_to_grid(&self, axis: usize, coeffs: &[T]) -> Vec<T> {
        let mat = &self.dsynth[axis];
        let mut out = vec![T::zero(); self.grid_len];
        for (g, slot) in out.iter_mut().enumerate() {
            let row = &mat[g * self.n..(g + 1) * self.n];
            let mut acc = T::zero();
            for (c, s) in coeffs.iter().zip(row) {
                acc += *c * *s;
            }
            *slot = acc;
        }
        out
    }

    fn project(&self, grid_vals: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.n];
        for (j, slot) in out.iter_mut().enumerate() {
            let row = &self.galerkin[j * self.grid_len..(j + 1) * self.grid_len];
            let mut acc = T::zero();
            for (v, g) in grid_vals.iter().zip(row) {
                acc += *v * *g;
            }
            *slot = acc;
        }
        out
    }
}

/// Precomputed propagators and nonlinear machinery for one step size.
pub struct Stepper<T: Scalar> {
    problem: ProblemSpec<T>,
    basis: Basis<T>,
    dt: T,
    lambdas: Vec<T>,
    /// real propagators per spatial mode
    e: Vec<[[T; 3]; 3]>,
    p1: Vec<[[T; 3]; 3]>,
    p2: Vec<[[T; 3]; 3]>,
    /// exact forcing contribution per (temporal mode, flat): `G Phi`
    forcing: Vec<(i64, usize, [Complex<T>; 3])>,
    ops: SpatialOps<T>,
}

impl<T: Scalar> Stepper<T> {
    pub fn new(problem: &ProblemSpec<T>, dt: T) -> Self {
        let basis = Basis::from_domain(&problem.domain, &problem.n_spatial_modes);
        let params = &problem.params;
        let omega = problem.omega();
        let lambdas: Vec<T> = basis.eigenvalues().to_vec();
        let n = basis.spatial_len();

        let mut e = Vec::with_capacity(n);
        let mut p1 = Vec::with_capacity(n);
        let mut p2 = Vec::with_capacity(n);
        let czer = Complex::new(T::zero(), T::zero());
        let c2 = params.c * params.c;
        for &lam in &lambdas {
            let l_mat: Mat3<T> = [
                [czer, Complex::new(T::one(), T::zero()), czer],
                [
                    Complex::new(-c2 * lam, T::zero()),
                    Complex::new(-params.b * lam, T::zero()),
                    Complex::new(T::one(), T::zero()),
                ],
                [czer, czer, Complex::new(-params.a * lam, T::zero())],
            ];
            let (ee, f1, f2) = phi_functions(&mat_scale(&l_mat, dt));
            e.push(real_part(&ee));
            p1.push(real_part(&mat_scale(&f1, dt)));
            p2.push(real_part(&mat_scale(&f2, dt)));
        }

        // exact band-limited forcing: for each occupied (m, flat) the vector
        // G Phi with G = dt e^{i m w dt} phi1((L - i m w I) dt), Phi = (0, 0, -f)
        let f_field = assemble_forcing(problem);
        let mut forcing = Vec::new();
        for (m, flat, coeff) in f_field.iter_modes() {
            if coeff.norm() == T::zero() {
                continue;
            }
            let lam = lambdas[flat];
            let l_mat: Mat3<T> = [
                [czer, Complex::new(T::one(), T::zero()), czer],
                [
                    Complex::new(-c2 * lam, T::zero()),
                    Complex::new(-params.b * lam, T::zero()),
                    Complex::new(T::one(), T::zero()),
                ],
                [czer, czer, Complex::new(-params.a * lam, T::zero())],
            ];
            let shift = Complex::new(T::zero(), -(T::of_i64(m) * omega));
            let mut shifted = l_mat;
            for (i, row) in shifted.iter_mut().enumerate() {
                row[i] += shift;
            }
            let (_, f1, _) = phi_functions(&mat_scale(&shifted, dt));
            let rot = Complex::from_polar(T::one(), T::of_i64(m) * omega * dt);
            let g_mat = mat_scale(&f1, dt);
            let phi_vec = [czer, czer, -coeff];
            let mut gv = [czer; 3];
            for i in 0..3 {
                for k in 0..3 {
                    gv[i] += g_mat[i][k] * phi_vec[k];
                }
                gv[i] *= rot;
            }
            forcing.push((m, flat, gv));
        }

        let ops = SpatialOps::new(&basis, problem.period);
        Self {
            problem: problem.clone(),
            basis,
            dt,
            lambdas,
            e,
            p1,
            p2,
            forcing,
            ops,
        }
    }

    pub fn basis(&self) -> &Basis<T> {
        &self.basis
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// `d = [d_t N]` recovered by the band Galerkin solve; the explicit part
    /// of the right-hand side.
    fn nonlinear_d(&self, state: &OracleState<T>) -> Result<Vec<T>, SolveError> {
        let params = &self.problem.params;
        let n = self.ops.n;
        let k = params.k;
        let s_on = params.s == 1;
        if k == T::zero() && !s_on {
            return Ok(vec![T::zero(); n]);
        }

        let w_vals = self.ops.to_grid(&state.w);
        // regime guard
        let mut min_abs = T::infinity();
        for &wv in &w_vals {
            min_abs = min_abs.min((T::one() + T::lit(2.0) * k * wv).abs());
        }
        if min_abs < T::lit(1e-6) {
            return Err(SolveError::OutOfRegime {
                min_abs: min_abs.to_f64().unwrap_or(0.0),
            });
        }

        // V = zeta + c^2 lap u + b lap w (band coefficients)
        let c2 = params.c * params.c;
        let v_coeffs: Vec<T> = (0..n)
            .map(|j| state.zeta[j] - self.lambdas[j] * (c2 * state.u[j] + params.b * state.w[j]))
            .collect();
        let v_vals = self.ops.to_grid(&v_coeffs);

        let mut r_vals = vec![T::zero(); self.ops.grid_len];
        if k != T::zero() {
            for ((r, &wv), &vv) in r_vals.iter_mut().zip(&w_vals).zip(&v_vals) {
                *r += T::lit(2.0) * k * wv * vv;
            }
        }
        if s_on {
            for axis in 0..self.basis.dim() {
                let du = self.ops.deriv_to_grid(axis, &state.u);
                let dw = self.ops.deriv_to_grid(axis, &state.w);
                for ((r, &a), &b) in r_vals.iter_mut().zip(&du).zip(&dw) {
                    *r += T::lit(2.0) * a * b;
                }
            }
        }
        let rhs = self.ops.project(&r_vals);

        if k == T::zero() {
            return Ok(rhs);
        }

        // (I + 2 k G diag(w) S) d = rhs
        let mut mat = vec![T::zero(); n * n];
        for j in 0..n {
            let mut col_vals = vec![T::zero(); self.ops.grid_len];
            for g in 0..self.ops.grid_len {
                col_vals[g] = w_vals[g] * self.ops.synth[g * n + j];
            }
            let col = self.ops.project(&col_vals);
            for i in 0..n {
                mat[i * n + j] = T::lit(2.0) * k * col[i];
            }
        }
        for i in 0..n {
            mat[i * n + i] += T::one();
        }
        Ok(lu_solve(mat, n, rhs))
    }

    fn f_nl(&self, state: &OracleState<T>) -> Result<Vec<[T; 3]>, SolveError> {
        let d = self.nonlinear_d(state)?;
        let a = self.problem.params.a;
        Ok((0..self.ops.n)
            .map(|j| [T::zero(), -d[j], a * self.lambdas[j] * d[j]])
            .collect())
    }

    /// One exponential-IMEX step of size `dt` from the state's current time.
    pub fn step(&self, state: &OracleState<T>) -> Result<OracleState<T>, SolveError> {
        let n = self.ops.n;
        let omega = self.problem.omega();
        let fk = self.f_nl(state)?;

        let mut mid = OracleState::zero(n);
        mid.t = state.t + self.dt;
        for (j, f) in fk.iter().enumerate() {
            let sv = [state.u[j], state.w[j], state.zeta[j]];
            let lin = mat_vec_re(&self.e[j], sv);
            let nl = mat_vec_re(&self.p1[j], *f);
            mid.u[j] = lin[0] + nl[0];
            mid.w[j] = lin[1] + nl[1];
            mid.zeta[j] = lin[2] + nl[2];
        }
        // exact forcing contribution over [t, t + dt]
        for &(m, flat, gv) in &self.forcing {
            let rot = Complex::from_polar(T::one(), T::of_i64(m) * omega * state.t);
            mid.u[flat] += (gv[0] * rot).re;
            mid.w[flat] += (gv[1] * rot).re;
            mid.zeta[flat] += (gv[2] * rot).re;
        }

        let fa = self.f_nl(&mid)?;
        let mut out = mid.clone();
        for (j, (fa_j, fk_j)) in fa.iter().zip(&fk).enumerate() {
            let df = [fa_j[0] - fk_j[0], fa_j[1] - fk_j[1], fa_j[2] - fk_j[2]];
            let corr = mat_vec_re(&self.p2[j], df);
            out.u[j] += corr[0];
            out.w[j] += corr[1];
            out.zeta[j] += corr[2];
        }
        Ok(out)
    }

    /// Integrates `n_steps` steps.
    pub fn advance(
        &self,
        mut state: OracleState<T>,
        n_steps: usize,
    ) -> Result<OracleState<T>, SolveError> {
        for _ in 0..n_steps {
            state = self.step(&state)?;
        }
        Ok(state)
    }
}

/// One period of the attractor sampled at the spectral solver's time grid.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Scalar> {
    pub times: Vec<T>,
    /// spatial coefficient vector of `u` at each sample time
    pub u_samples: Vec<Vec<T>>,
    pub periods_used: usize,
    pub final_period_diff: T,
    pub basis: Basis<T>,
    pub period: T,
}

/// Integrates from `initial` (zero by default) until the period map
/// contracts below tolerance, then samples one period at the `2M+1` uniform
/// times of the spectral grid.
pub fn find_attractor<T: Scalar>(
    problem: &ProblemSpec<T>,
    cfg: &OracleConfig<T>,
    initial: Option<OracleState<T>>,
) -> Result<Trajectory<T>, SolveError> {
    let validated = crate::model::validate_problem(problem.clone())?;
    let period = validated.period;
    let steps_per_period = (period / cfg.dt).round().to_f64().unwrap_or(512.0) as usize;
    let steps_per_period = steps_per_period.max(2);
    let dt_eff = period / T::of_usize(steps_per_period);
    let stepper = Stepper::new(&validated, dt_eff);

    let n = stepper.basis().spatial_len();
    let mut state = initial.unwrap_or_else(|| OracleState::zero(n));
    state.t = T::zero();

    let mut last_diff = T::infinity();
    let mut converged = false;
    let mut periods_used = 0usize;
    for p in 1..=cfg.max_periods {
        let prev = state.clone();
        state = stepper.advance(state, steps_per_period)?;
        last_diff = state.diff_norm(&prev);
        periods_used = p;
        if last_diff < cfg.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(SolveError::AttractorNotFound {
            periods: periods_used,
            last_diff: last_diff.to_f64().unwrap_or(f64::NAN),
        });
    }

    // sample one more period on the spectral time grid with aligned substeps
    let nt = 2 * validated.n_temporal_modes + 1;
    let seg = period / T::of_usize(nt);
    let n_sub = (seg / dt_eff).to_f64().unwrap_or(1.0).ceil().max(1.0) as usize;
    let sub_stepper = Stepper::new(&validated, seg / T::of_usize(n_sub));

    let mut times = Vec::with_capacity(nt);
    let mut u_samples = Vec::with_capacity(nt);
    let mut s = state.clone();
    // the attractor phase is fixed by the forcing; t is congruent to 0 mod T
    s.t = T::zero();
    for i in 0..nt {
        times.push(T::of_usize(i) * seg);
        u_samples.push(s.u.clone());
        s = sub_stepper.advance(s, n_sub)?;
    }

    Ok(Trajectory {
        times,
        u_samples,
        periods_used,
        final_period_diff: last_diff,
        basis: stepper.basis().clone(),
        period,
    })
}

/// Error norms between a harmonic-balance solution and a sampled attractor.
#[derive(Debug, Clone, serde::Serialize)]
#[serde(bound(serialize = "T: serde::Serialize"))]
pub struct ComparisonReport<T> {
    pub rel_l2: T,
    pub max_abs_diff: T,
    pub ref_l2: T,
}

/// Relative time-space L2 and max-norm differences over one period, both
/// fields evaluated on the shared collocation grid.
pub fn compare<T: Scalar>(
    u_spectral: &SpectralField<T>,
    trajectory: &Trajectory<T>,
) -> Result<ComparisonReport<T>, SolveError> {
    if u_spectral.basis() != &trajectory.basis {
        return Err(SolveError::Field(crate::error::FieldError::BasisMismatch(
            "spectral solution and trajectory use different bases".into(),
        )));
    }
    if trajectory.times.len() != 2 * u_spectral.m_max() + 1 {
        return Err(SolveError::Field(crate::error::FieldError::ShapeMismatch(
            format!(
                "{} samples vs temporal band {}",
                trajectory.times.len(),
                u_spectral.m_max()
            ),
        )));
    }
    let basis = u_spectral.basis();
    let ops = SpatialOps::new(basis, trajectory.period);
    let omega = u_spectral.omega();
    let n = basis.spatial_len();

    let mut num = T::zero();
    let mut den = T::zero();
    let mut max_abs = T::zero();
    for (i, t) in trajectory.times.iter().enumerate() {
        // spectral solution's spatial coefficients at this sample time
        let mut coeffs = vec![T::zero(); n];
        for m in -(u_spectral.m_max() as i64)..=(u_spectral.m_max() as i64) {
            let rot = Complex::from_polar(T::one(), T::of_i64(m) * omega * *t);
            for (flat, c) in coeffs.iter_mut().enumerate() {
                *c += (u_spectral.get(m, flat) * rot).re;
            }
        }
        let vals_hb = ops.to_grid(&coeffs);
        let vals_tr = ops.to_grid(&trajectory.u_samples[i]);
        for (a, b) in vals_hb.iter().zip(&vals_tr) {
            let d = *a - *b;
            num += d * d;
            den += *a * *a;
            max_abs = max_abs.max(d.abs());
        }
    }
    let rel_l2 = if den > T::zero() {
        (num / den).sqrt()
    } else {
        num.sqrt()
    };
    Ok(ComparisonReport {
        rel_l2,
        max_abs_diff: max_abs,
        ref_l2: den.sqrt(),
    })
}
