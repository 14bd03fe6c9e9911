//! Physical parameters, domain descriptions, and validated problem
//! specifications consumed by every other module.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{ValidationErrors, Violation};
use crate::scalar::Scalar;

/// Boundary-condition kind. Dirichlet prescribes the pair `(u, laplacian u)`
/// on the boundary, Neumann the pair of outward normal derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

/// Derived nonlinearity coefficient `k = (1/c^2)((1-s) + (B/A)/2)`.
///
/// `s = 1` keeps the local nonlinearity (Kuznetsov form), `s = 0` drops it
/// (Westervelt form).
pub fn derive_k<T: Scalar>(s: u8, b_over_a: T, c: T) -> Result<T, String> {
    if !(c > T::zero()) {
        return Err(format!("speed of sound must be positive, got {c}"));
    }
    if s > 1 {
        return Err(format!("nonlinearity switch must be 0 or 1, got {s}"));
    }
    if b_over_a < T::zero() {
        return Err(format!(
            "parameter of nonlinearity must be >= 0, got {b_over_a}"
        ));
    }
    let one_minus_s = T::of_usize(1 - s as usize);
    Ok((one_minus_s + b_over_a / T::lit(2.0)) / (c * c))
}

#[derive(Deserialize)]
#[serde(bound(deserialize = "T: serde::Deserialize<'de>"))]
struct RawModelParams<T> {
    a: T,
    b: T,
    c: T,
    s: u8,
    b_over_a: T,
}

/// Physical constants of the model: heat conductivity `a`, diffusivity of
/// sound `b`, speed of sound `c`, local-nonlinearity switch `s`, parameter of
/// nonlinearity `B/A`, and the derived coefficient `k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(
    bound(
        serialize = "T: serde::Serialize",
        deserialize = "T: serde::Deserialize<'de> + Scalar"
    ),
    try_from = "RawModelParams<T>"
)]
pub struct ModelParams<T: Scalar> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub s: u8,
    pub b_over_a: T,
    pub k: T,
}

impl<T: Scalar> TryFrom<RawModelParams<T>> for ModelParams<T> {
    type Error = String;
    fn try_from(raw: RawModelParams<T>) -> Result<Self, String> {
        ModelParams::new(raw.a, raw.b, raw.c, raw.s, raw.b_over_a)
    }
}

impl<T: Scalar> ModelParams<T> {
    /// Builds the parameter set, deriving `k`. Positivity of `a` and `b` is
    /// deliberately not enforced here (the resonance diagnostics probe the
    /// vanishing-dissipation limit); `validate_problem` enforces it for
    /// actual solves.
    pub fn new(a: T, b: T, c: T, s: u8, b_over_a: T) -> Result<Self, String> {
        let k = derive_k(s, b_over_a, c)?;
        Ok(Self {
            a,
            b,
            c,
            s,
            b_over_a,
            k,
        })
    }

    /// The switch as a scalar factor.
    pub fn s_factor(&self) -> T {
        T::of_usize(self.s as usize)
    }

    /// Copy with both dissipation constants scaled by `delta`, for
    /// resonance sweeps toward the vanishing-dissipation limit.
    pub fn scaled_dissipation(&self, delta: T) -> Self {
        Self {
            a: self.a * delta,
            b: self.b * delta,
            ..*self
        }
    }
}

/// Spatial domain: an interval/box with per-axis extents and one
/// boundary-condition kind on the whole boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::Deserialize<'de>"
))]
pub struct DomainSpec<T> {
    pub dimension: usize,
    pub lengths: Vec<T>,
    pub bc_kind: BcKind,
}

impl<T: Scalar> DomainSpec<T> {
    pub fn interval(length: T, bc_kind: BcKind) -> Self {
        Self {
            dimension: 1,
            lengths: vec![length],
            bc_kind,
        }
    }

    /// Domain measure (product of extents).
    pub fn measure(&self) -> T {
        self.lengths.iter().fold(T::one(), |acc, &l| acc * l)
    }
}

/// One separable forcing term `amplitude * cos(m w t + phase) * phi_n(x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::Deserialize<'de> + Scalar"
))]
pub struct ForcingTerm<T> {
    pub amplitude: T,
    pub temporal_mode: i64,
    #[serde(default = "zero_phase")]
    pub phase: T,
    pub spatial: Vec<usize>,
}

fn zero_phase<T: Scalar>() -> T {
    T::zero()
}

/// Structured separable forcing, assembled into a coefficient field by the
/// solver front ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::Deserialize<'de> + Scalar"
))]
pub struct ForcingSpec<T> {
    pub terms: Vec<ForcingTerm<T>>,
}

impl<T> Default for ForcingSpec<T> {
    fn default() -> Self {
        Self { terms: Vec::new() }
    }
}

impl<T: Scalar> ForcingSpec<T> {
    pub fn empty() -> Self {
        Self { terms: Vec::new() }
    }

    /// Scales every term amplitude, for amplitude sweeps.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| ForcingTerm {
                    amplitude: t.amplitude * factor,
                    ..t.clone()
                })
                .collect(),
        }
    }
}

/// Time-periodic trace data at the two endpoints of an interval, stored as
/// temporal Fourier coefficients (index `m + m_max`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::Deserialize<'de>"
))]
pub struct TraceSeries<T> {
    pub left: Vec<Complex<T>>,
    pub right: Vec<Complex<T>>,
}

impl<T: Scalar> TraceSeries<T> {
    pub fn zero(m_max: usize) -> Self {
        let n = 2 * m_max + 1;
        Self {
            left: vec![Complex::new(T::zero(), T::zero()); n],
            right: vec![Complex::new(T::zero(), T::zero()); n],
        }
    }

    pub fn m_max(&self) -> usize {
        (self.left.len() - 1) / 2
    }

    /// Adds `amplitude * cos(m w t + phase)` at the given endpoint
    /// (`0` = left, `1` = right).
    pub fn add_cosine(&mut self, endpoint: usize, amplitude: T, mode: i64, phase: T) {
        let m_max = self.m_max() as i64;
        assert!(
            mode.unsigned_abs() as i64 <= m_max,
            "trace mode out of band"
        );
        let series = if endpoint == 0 {
            &mut self.left
        } else {
            &mut self.right
        };
        if mode == 0 {
            series[m_max as usize].re += amplitude * phase.cos();
        } else {
            let half = amplitude / T::lit(2.0);
            let c = Complex::from_polar(half, phase);
            series[(m_max + mode) as usize] += c;
            series[(m_max - mode) as usize] += c.conj();
        }
    }

    pub fn coeff(&self, endpoint: usize, m: i64) -> Complex<T> {
        let r = (m + self.m_max() as i64) as usize;
        if endpoint == 0 {
            self.left[r]
        } else {
            self.right[r]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.left
            .iter()
            .chain(self.right.iter())
            .all(|c| c.re == T::zero() && c.im == T::zero())
    }

    fn hermitian_error(&self) -> T {
        let m_max = self.m_max() as i64;
        let mut err = T::zero();
        for series in [&self.left, &self.right] {
            for m in 0..=m_max {
                let d = series[(m_max + m) as usize] - series[(m_max - m) as usize].conj();
                err = err.max(d.norm());
            }
        }
        err
    }

    /// Steady (m = 0) part as a pair of real endpoint values.
    pub fn steady(&self) -> [T; 2] {
        [self.coeff(0, 0).re, self.coeff(1, 0).re]
    }
}

/// Time-periodic endpoint traces `(g, h)` for the 1-D boundary-lifting
/// construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::Deserialize<'de>"
))]
pub struct BoundaryData1D<T> {
    pub g: TraceSeries<T>,
    pub h: TraceSeries<T>,
}

impl<T: Scalar> BoundaryData1D<T> {
    pub fn zero(m_max: usize) -> Self {
        Self {
            g: TraceSeries::zero(m_max),
            h: TraceSeries::zero(m_max),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.g.is_zero() && self.h.is_zero()
    }
}

/// A fully specified solve: physics, domain, period, truncation, data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: serde::Serialize",
    deserialize = "T: serde::Deserialize<'de> + Scalar"
))]
pub struct ProblemSpec<T: Scalar> {
    pub params: ModelParams<T>,
    pub domain: DomainSpec<T>,
    pub period: T,
    pub n_temporal_modes: usize,
    pub n_spatial_modes: Vec<usize>,
    #[serde(default)]
    pub forcing: ForcingSpec<T>,
    #[serde(default)]
    pub boundary: Option<BoundaryData1D<T>>,
}

impl<T: Scalar> ProblemSpec<T> {
    /// Angular frequency `w = 2 pi / T`.
    pub fn omega(&self) -> T {
        T::lit(2.0) * T::PI() / self.period
    }

    /// Copy with all forcing and boundary amplitudes scaled by `factor`.
    pub fn scaled_data(&self, factor: T) -> Self {
        let mut out = self.clone();
        out.forcing = self.forcing.scaled(factor);
        if let Some(b) = &mut out.boundary {
            for series in [&mut b.g, &mut b.h] {
                for c in series.left.iter_mut().chain(series.right.iter_mut()) {
                    *c *= factor;
                }
            }
        }
        out
    }
}

/// Checks every type invariant, returning the spec unchanged when valid and
/// otherwise the complete list of violations with field paths.
pub fn validate_problem<T: Scalar>(
    spec: ProblemSpec<T>,
) -> Result<ProblemSpec<T>, ValidationErrors> {
    let mut v: Vec<Violation> = Vec::new();
    fn violation(v: &mut Vec<Violation>, path: &str, message: String) {
        v.push(Violation {
            path: path.to_string(),
            message,
        });
    }

    let p = &spec.params;
    if !(p.a > T::zero()) || !p.a.is_finite() {
        violation(&mut v, "params.a", "dissipation must be positive".into());
    }
    if !(p.b > T::zero()) || !p.b.is_finite() {
        violation(&mut v, "params.b", "dissipation must be positive".into());
    }
    if !(p.c > T::zero()) || !p.c.is_finite() {
        violation(&mut v, "params.c", "speed of sound must be positive".into());
    }
    if p.s > 1 {
        violation(
            &mut v,
            "params.s",
            format!("nonlinearity switch must be 0 or 1, got {}", p.s),
        );
    }
    if p.b_over_a < T::zero() || !p.b_over_a.is_finite() {
        violation(
            &mut v,
            "params.b_over_a",
            "parameter of nonlinearity must be >= 0".into(),
        );
    }
    if p.s <= 1 && p.c > T::zero() {
        match derive_k(p.s, p.b_over_a, p.c) {
            Ok(k) if k == p.k => {}
            Ok(k) => violation(
                &mut v,
                "params.k",
                format!("stored k = {} differs from derived {}", p.k, k),
            ),
            Err(e) => violation(&mut v, "params.k", e),
        }
    }

    let d = &spec.domain;
    if !(1..=3).contains(&d.dimension) {
        violation(
            &mut v,
            "domain.dimension",
            format!("dimension must be 1, 2 or 3, got {}", d.dimension),
        );
    }
    if d.lengths.len() != d.dimension {
        violation(
            &mut v,
            "domain.lengths",
            format!("expected {} extents, got {}", d.dimension, d.lengths.len()),
        );
    }
    for (i, &l) in d.lengths.iter().enumerate() {
        if !(l > T::zero()) || !l.is_finite() {
            v.push(Violation {
                path: format!("domain.lengths[{i}]"),
                message: "extent must be strictly positive".into(),
            });
        }
    }

    if !(spec.period > T::zero()) || !spec.period.is_finite() {
        violation(&mut v, "period", "period must be strictly positive".into());
    }
    if spec.n_temporal_modes == 0 {
        violation(
            &mut v,
            "n_temporal_modes",
            "at least one temporal mode is required".into(),
        );
    }
    if spec.n_spatial_modes.len() != d.dimension {
        violation(
            &mut v,
            "n_spatial_modes",
            format!(
                "expected {} per-axis counts, got {}",
                d.dimension,
                spec.n_spatial_modes.len()
            ),
        );
    }
    for (i, &n) in spec.n_spatial_modes.iter().enumerate() {
        if n == 0 {
            v.push(Violation {
                path: format!("n_spatial_modes[{i}]"),
                message: "at least one spatial mode per axis is required".into(),
            });
        }
    }

    let m_max = spec.n_temporal_modes as i64;
    for (ti, term) in spec.forcing.terms.iter().enumerate() {
        if !term.amplitude.is_finite() || !term.phase.is_finite() {
            v.push(Violation {
                path: format!("forcing.terms[{ti}]"),
                message: "amplitude and phase must be finite".into(),
            });
        }
        if term.temporal_mode.unsigned_abs() as i64 > m_max {
            v.push(Violation {
                path: format!("forcing.terms[{ti}].temporal_mode"),
                message: format!(
                    "|m| = {} exceeds truncation M = {m_max}",
                    term.temporal_mode.abs()
                ),
            });
        }
        if term.spatial.len() != d.dimension {
            v.push(Violation {
                path: format!("forcing.terms[{ti}].spatial"),
                message: format!(
                    "expected {} indices, got {}",
                    d.dimension,
                    term.spatial.len()
                ),
            });
            continue;
        }
        for (axis, &n) in term.spatial.iter().enumerate() {
            let n_axis = spec.n_spatial_modes.get(axis).copied().unwrap_or(0);
            let ok = match d.bc_kind {
                BcKind::Dirichlet => n >= 1 && n <= n_axis,
                BcKind::Neumann => n <= n_axis,
            };
            if !ok {
                v.push(Violation {
                    path: format!("forcing.terms[{ti}].spatial[{axis}]"),
                    message: format!("wavenumber {n} outside the truncation for this basis"),
                });
            }
        }
    }

    if let Some(b) = &spec.boundary {
        if !b.is_zero() && d.dimension != 1 {
            violation(
                &mut v,
                "boundary",
                "inhomogeneous boundary data is unsupported for dimension >= 2".into(),
            );
        }
        for (name, series) in [("g", &b.g), ("h", &b.h)] {
            if series.left.len() != 2 * spec.n_temporal_modes + 1
                || series.right.len() != 2 * spec.n_temporal_modes + 1
            {
                v.push(Violation {
                    path: format!("boundary.{name}"),
                    message: format!(
                        "trace series must have 2M+1 = {} coefficients",
                        2 * spec.n_temporal_modes + 1
                    ),
                });
            } else {
                let err = series.hermitian_error();
                let scale = series
                    .left
                    .iter()
                    .chain(series.right.iter())
                    .fold(T::zero(), |a, c| a.max(c.norm()))
                    .max(T::one());
                if err > T::lit(1e-12) * scale {
                    v.push(Violation {
                        path: format!("boundary.{name}"),
                        message: "trace coefficients are not Hermitian-symmetric (trace not real)"
                            .into(),
                    });
                }
            }
        }
    }

    if v.is_empty() {
        Ok(spec)
    } else {
        Err(ValidationErrors { violations: v })
    }
}
