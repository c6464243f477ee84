//! The Lee coupled-oscillator model: Hamiltonian matrix, region
//! classification, and the quadratic Lagrangian machinery.
//!
//! Units are fixed to `m = k = ħ = 1`.

use std::io::Write;

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::Serialize;

use crate::dynamics::LinearSystem;
use crate::error::{Error, Result};
use crate::exec::{map_collect, Execution};
use crate::phase::{eigendecompose, QuadraticHamiltonian};

/// Absolute tolerance below which `f(γ, λ)` counts as zero.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModelParams {
    pub gamma: f64,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(gamma: f64, lambda: f64) -> Result<Self> {
        if !gamma.is_finite() {
            return Err(Error::NonFiniteParameter("gamma"));
        }
        if !lambda.is_finite() {
            return Err(Error::NonFiniteParameter("lambda"));
        }
        Ok(Self { gamma, lambda })
    }
}

/// `γ₋ = (-1 - √5)/2`, the smaller root of `1 - γ - γ²`.
pub fn gamma_minus() -> f64 {
    -0.5 * (1.0 + 5f64.sqrt())
}

/// `γ₊ = (-1 + √5)/2`, the larger root of `1 - γ - γ²`.
pub fn gamma_plus() -> f64 {
    0.5 * (5f64.sqrt() - 1.0)
}

/// `f(γ, λ) = det h = 1 - γ - γ² - λ²`.
pub fn region_function(params: &ModelParams) -> f64 {
    let ModelParams { gamma: g, lambda: l } = *params;
    1.0 - g - g * g - l * l
}

/// The Hamiltonian matrix `h(γ, λ)` with `H = ½ vᵀ h v`, `v = (x, y, p_x, p_y)`.
pub fn build_h(params: &ModelParams) -> QuadraticHamiltonian {
    let ModelParams { gamma: g, lambda: l } = *params;
    QuadraticHamiltonian::new(Matrix4::new(
        2.0,
        l,
        0.0,
        -1.0, //
        l,
        2.0 + g,
        -(1.0 + g),
        0.0, //
        0.0,
        -(1.0 + g),
        1.0,
        0.0, //
        -1.0,
        0.0,
        0.0,
        1.0,
    ))
}

/// Numerical `(trace, determinant)`.
pub fn trace_det(h: &QuadraticHamiltonian) -> (f64, f64) {
    (h.trace(), h.determinant())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DetSign {
    Positive,
    Negative,
    Zero,
}

impl DetSign {
    pub fn as_str(self) -> &'static str {
        match self {
            DetSign::Positive => "positive",
            DetSign::Negative => "negative",
            DetSign::Zero => "zero",
        }
    }
}

/// Where `(γ, λ)` sits relative to the `f < 0` regions.
///
/// `Interior` is the `f > 0` region, which contains both worked examples'
/// neighbourhood of the origin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseLabel {
    /// `f < 0` with `γ < γ₋` or `γ > γ₊`.
    Case1,
    /// `f < 0` with `γ₋ < γ < γ₊` and `|λ| > √(1 - γ - γ²)`.
    Case2,
    Interior,
    Boundary,
}

impl CaseLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseLabel::Case1 => "Case1",
            CaseLabel::Case2 => "Case2",
            CaseLabel::Interior => "Interior",
            CaseLabel::Boundary => "Boundary",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RegionClass {
    pub f: f64,
    pub det_sign: DetSign,
    pub negative_eigenvalue_count: usize,
    pub case_label: CaseLabel,
}

impl RegionClass {
    /// Negative determinant must come with an odd number of negative
    /// eigenvalues, positive with an even number.
    pub fn parity_consistent(&self) -> bool {
        match self.det_sign {
            DetSign::Negative => !self.negative_eigenvalue_count.is_multiple_of(2),
            DetSign::Positive => self.negative_eigenvalue_count.is_multiple_of(2),
            DetSign::Zero => true,
        }
    }
}

pub fn classify_region(params: &ModelParams) -> RegionClass {
    let f = region_function(params);
    let det_sign = if f.abs() <= BOUNDARY_TOL {
        DetSign::Zero
    } else if f < 0.0 {
        DetSign::Negative
    } else {
        DetSign::Positive
    };
    let case_label = match det_sign {
        DetSign::Zero => CaseLabel::Boundary,
        DetSign::Positive => CaseLabel::Interior,
        DetSign::Negative => {
            let g = params.gamma;
            if g < gamma_minus() || g > gamma_plus() {
                CaseLabel::Case1
            } else {
                CaseLabel::Case2
            }
        }
    };
    let decomposition = eigendecompose(&build_h(params));
    let negative_eigenvalue_count = decomposition.eigenvalues.iter().filter(|e| **e < 0.0).count();
    RegionClass {
        f,
        det_sign,
        negative_eigenvalue_count,
        case_label,
    }
}

/// One cell of a region sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionRow {
    pub params: ModelParams,
    pub class: RegionClass,
}

/// Inclusive, evenly spaced axis `[lo, hi]` with `steps` points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, steps: usize) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(Error::MalformedRange(format!("[{lo}, {hi}]")));
        }
        if steps < 2 {
            return Err(Error::MalformedRange(format!("steps must be >= 2, got {steps}")));
        }
        Ok(Self { lo, hi, steps })
    }

    /// Parses `"lo:hi"`.
    pub fn parse(range: &str, steps: usize) -> Result<Self> {
        let (lo, hi) = range
            .split_once(':')
            .ok_or_else(|| Error::MalformedRange(format!("expected lo:hi, got {range:?}")))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::MalformedRange(format!("not a number: {s:?}")))
        };
        Self::new(parse(lo)?, parse(hi)?, steps)
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.hi;
        }
        self.lo + (self.hi - self.lo) * i as f64 / (self.steps - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.steps).map(|i| self.point(i)).collect()
    }
}

/// Classifies every grid cell, γ-major.
pub fn classify_grid(gamma: &Axis, lambda: &Axis, exec: Execution) -> Vec<RegionRow> {
    let cells: Vec<ModelParams> = gamma
        .points()
        .into_iter()
        .flat_map(|g| {
            lambda
                .points()
                .into_iter()
                .map(move |l| ModelParams { gamma: g, lambda: l })
        })
        .collect();
    map_collect(&cells, exec, |p| RegionRow {
        params: *p,
        class: classify_region(p),
    })
}

/// CSV with header `gamma,lambda,f,det_sign,neg_count,case_label`.
pub fn write_region_csv<W: Write>(rows: &[RegionRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gamma", "lambda", "f", "det_sign", "neg_count", "case_label"])?;
    for r in rows {
        w.write_record([
            r.params.gamma.to_string(),
            r.params.lambda.to_string(),
            r.class.f.to_string(),
            r.class.det_sign.as_str().to_string(),
            r.class.negative_eigenvalue_count.to_string(),
            r.class.case_label.as_str().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `𝓛 = ½ q̇ᵀ M q̇ + q̇ᵀ C q - ½ qᵀ K q` with `q = (x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticLagrangian {
    pub m: Matrix2<f64>,
    pub c: Matrix2<f64>,
    pub k: Matrix2<f64>,
}

impl QuadraticLagrangian {
    /// The Lagrangian whose Euler–Lagrange equations are the Lee system.
    pub fn lee(params: &ModelParams) -> Self {
        Self {
            m: Matrix2::identity(),
            c: Matrix2::new(0.0, 1.0 + params.gamma, 1.0, 0.0),
            k: Matrix2::new(1.0, params.lambda, params.lambda, 1.0),
        }
    }

    /// Bateman's `L = ẋẏ + (γ/2)(xẏ - ẋy) - xy`.
    pub fn bateman(gamma: f64) -> Self {
        let swap = Matrix2::new(0.0, 1.0, 1.0, 0.0);
        Self {
            m: swap,
            c: Matrix2::new(0.0, -0.5 * gamma, 0.5 * gamma, 0.0),
            k: swap,
        }
    }
}

/// `d/dt ∂𝓛/∂q̇ - ∂𝓛/∂q = 0`, i.e. `M q̈ + (C - Cᵀ) q̇ + K q = 0`.
pub fn euler_lagrange(lag: &QuadraticLagrangian) -> Result<LinearSystem> {
    LinearSystem::new(lag.m, lag.c - lag.c.transpose(), lag.k).map_err(|_| Error::DegenerateKinetic)
}

/// `H = ½(p − Cq)ᵀ M⁻¹ (p − Cq) + ½ qᵀ K q` as a matrix over `(x, y, p_x, p_y)`.
///
/// For the Lee Lagrangian this differs from [`build_h`] in the `y²` entry,
/// `1 + (1+γ)²` against `2 + γ`; the two coincide only at `γ ∈ {0, −1}`.
pub fn legendre_transform(lag: &QuadraticLagrangian) -> Result<QuadraticHamiltonian> {
    let m_inv = lag.m.try_inverse().ok_or(Error::DegenerateKinetic)?;
    let qq = lag.k + lag.c.transpose() * m_inv * lag.c;
    let qp = -(lag.c.transpose() * m_inv);
    let mut h = Matrix4::zeros();
    h.fixed_view_mut::<2, 2>(0, 0).copy_from(&qq);
    h.fixed_view_mut::<2, 2>(0, 2).copy_from(&qp);
    h.fixed_view_mut::<2, 2>(2, 0).copy_from(&qp.transpose());
    h.fixed_view_mut::<2, 2>(2, 2).copy_from(&m_inv);
    Ok(QuadraticHamiltonian::new(h))
}

/// `(x, y, ẋ, ẏ) ↦ (x, y, p_x, p_y)` with `p_x = ẋ + (1+γ) y`, `p_y = ẏ + x`.
pub fn legendre_momenta(params: &ModelParams, state: [f64; 4]) -> Vector4<f64> {
    let [x, y, xd, yd] = state;
    Vector4::new(x, y, xd + (1.0 + params.gamma) * y, yd + x)
}

/// Inverse of [`legendre_momenta`].
pub fn velocities(params: &ModelParams, v: &Vector4<f64>) -> [f64; 4] {
    [v[0], v[1], v[2] - (1.0 + params.gamma) * v[1], v[3] - v[0]]
}
