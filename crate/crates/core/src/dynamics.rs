//! Fixed-step RK4 integration of the classical oscillator systems and of the
//! Hamiltonian phase flow `v̇ = J h v`.

use std::io::Write;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::{map_collect, Execution};
use crate::model::ModelParams;
use crate::phase::{quad_eval, symplectic_j, QuadraticHamiltonian};

/// Any state entry beyond this magnitude aborts integration.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;

pub const DEFAULT_DT: f64 = 1e-3;
pub const DEFAULT_HORIZON: f64 = 100.0;

/// `M q̈ + G q̇ + K q = 0` for `q = (x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearSystem {
    pub m: Matrix2<f64>,
    pub g: Matrix2<f64>,
    pub k: Matrix2<f64>,
}

impl LinearSystem {
    pub fn new(m: Matrix2<f64>, g: Matrix2<f64>, k: Matrix2<f64>) -> Result<Self> {
        if m.try_inverse().is_none() || m.determinant() == 0.0 {
            return Err(Error::DegenerateMassMatrix);
        }
        Ok(Self { m, g, k })
    }

    fn m_inv(&self) -> Matrix2<f64> {
        self.m.try_inverse().expect("mass matrix checked at construction")
    }

    /// The same equations with `M` multiplied out: `q̈ + M⁻¹G q̇ + M⁻¹K q = 0`.
    pub fn normalized(&self) -> Self {
        let inv = self.m_inv();
        Self {
            m: Matrix2::identity(),
            g: inv * self.g,
            k: inv * self.k,
        }
    }

    /// First-order form `ṡ = A s` for `s = (x, y, ẋ, ẏ)`.
    pub fn first_order(&self) -> Matrix4<f64> {
        let inv = self.m_inv();
        let mut a = Matrix4::zeros();
        a.fixed_view_mut::<2, 2>(0, 2).copy_from(&Matrix2::identity());
        a.fixed_view_mut::<2, 2>(2, 0).copy_from(&(-inv * self.k));
        a.fixed_view_mut::<2, 2>(2, 2).copy_from(&(-inv * self.g));
        a
    }

    /// Eigenvalues of [`first_order`](Self::first_order); a positive real part
    /// means exponentially growing solutions. Diagnostic only.
    pub fn growth_rates(&self) -> Vec<Complex64> {
        self.first_order().complex_eigenvalues().iter().copied().collect()
    }
}

/// `ẍ + γẏ + x = -λy`, `ÿ - γẋ + y = -λx`.
pub fn lee_system(params: &ModelParams) -> LinearSystem {
    let ModelParams { gamma, lambda } = *params;
    LinearSystem {
        m: Matrix2::identity(),
        g: Matrix2::new(0.0, gamma, -gamma, 0.0),
        k: Matrix2::new(1.0, lambda, lambda, 1.0),
    }
}

/// Damped `x` and amplified `y`: `ẍ + γẋ + x = 0`, `ÿ - γẏ + y = 0`.
pub fn bateman_system(gamma: f64) -> LinearSystem {
    LinearSystem {
        m: Matrix2::identity(),
        g: Matrix2::new(gamma, 0.0, 0.0, -gamma),
        k: Matrix2::identity(),
    }
}

/// Bateman generalized with the couplings `A`, `B`:
/// `ẍ + γẋ + x = -2B(ÿ + y)`, `ÿ - γẏ + y = -2A(ẍ + x)`.
pub fn generalized_system(gamma: f64, a: f64, b: f64) -> Result<LinearSystem> {
    let mk = Matrix2::new(1.0, 2.0 * b, 2.0 * a, 1.0);
    if 4.0 * a * b == 1.0 {
        return Err(Error::DegenerateMassMatrix);
    }
    LinearSystem::new(mk, Matrix2::new(gamma, 0.0, 0.0, -gamma), mk)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectoryState {
    pub t: f64,
    pub q: [f64; 2],
    pub qdot: [f64; 2],
}

impl TrajectoryState {
    pub fn new(t: f64, q: [f64; 2], qdot: [f64; 2]) -> Self {
        Self { t, q, qdot }
    }

    pub fn at_rest(q: [f64; 2]) -> Self {
        Self::new(0.0, q, [0.0, 0.0])
    }

    pub fn vector(&self) -> Vector4<f64> {
        Vector4::new(self.q[0], self.q[1], self.qdot[0], self.qdot[1])
    }

    fn from_vector(t: f64, s: &Vector4<f64>) -> Self {
        Self::new(t, [s[0], s[1]], [s[2], s[3]])
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.q[0], self.q[1], self.qdot[0], self.qdot[1]]
    }
}

/// Samples at a uniform step, starting at the initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub samples: Vec<TrajectoryState>,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryState {
        self.samples.last().expect("trajectory always holds the initial state")
    }

    /// `max_t |p_λ(t) - p_λ(0)|`.
    pub fn p_lambda_drift(&self, lambda: f64) -> f64 {
        let p0 = p_lambda(&self.samples[0], lambda);
        self.samples
            .iter()
            .map(|s| (p_lambda(s, lambda) - p0).abs())
            .fold(0.0, f64::max)
    }

    /// CSV `t,x,y,xdot,ydot,p_lambda`, one row every `stride` samples.
    pub fn write_csv<W: Write>(&self, lambda: f64, stride: usize, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "y", "xdot", "ydot", "p_lambda"])?;
        for s in self.samples.iter().step_by(stride.max(1)) {
            w.write_record([s.t, s.q[0], s.q[1], s.qdot[0], s.qdot[1], p_lambda(s, lambda)].map(|x| x.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Number of steps and the effective step for `[0, T]`.
///
/// The step count is `⌈T/dt⌉` and the step is shrunk to `T / count`, so the
/// last sample lands on `T` exactly.
pub fn time_grid(dt: f64, horizon: f64) -> Result<(usize, f64)> {
    if !(dt.is_finite() && horizon.is_finite() && dt > 0.0 && dt < horizon) {
        return Err(Error::InvalidTimeGrid { dt, horizon });
    }
    let ratio = horizon / dt;
    let nearest = ratio.round();
    let steps = if (ratio - nearest).abs() <= 1e-9 * nearest {
        nearest
    } else {
        ratio.ceil()
    };
    let steps = steps as usize;
    Ok((steps, horizon / steps as f64))
}

fn rk4_step(a: &Matrix4<f64>, s: &Vector4<f64>, h: f64) -> Vector4<f64> {
    let k1 = a * s;
    let k2 = a * (s + k1 * (0.5 * h));
    let k3 = a * (s + k2 * (0.5 * h));
    let k4 = a * (s + k3 * h);
    s + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0)
}

fn check_finite(t: f64, s: &Vector4<f64>) -> Result<()> {
    if s.iter().all(|x| x.is_finite() && x.abs() <= BLOW_UP_THRESHOLD) {
        Ok(())
    } else {
        Err(Error::BlowUp { t })
    }
}

fn run_linear(a: &Matrix4<f64>, s0: Vector4<f64>, dt: f64, horizon: f64) -> Result<(f64, Vec<Vector4<f64>>)> {
    let (steps, h) = time_grid(dt, horizon)?;
    check_finite(0.0, &s0)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(s0);
    let mut s = s0;
    for i in 1..=steps {
        s = rk4_step(a, &s, h);
        check_finite(i as f64 * h, &s)?;
        out.push(s);
    }
    Ok((h, out))
}

/// Classic RK4 on the first-order form of `sys`. Returns `⌈T/dt⌉ + 1` samples.
pub fn integrate(sys: &LinearSystem, s0: &TrajectoryState, dt: f64, horizon: f64) -> Result<Trajectory> {
    let a = sys.first_order();
    let (h, states) = run_linear(&a, s0.vector(), dt, horizon)?;
    let t0 = s0.t;
    let samples = states
        .iter()
        .enumerate()
        .map(|(i, s)| TrajectoryState::from_vector(t0 + i as f64 * h, s))
        .collect();
    Ok(Trajectory { dt: h, samples })
}

/// Integrates several initial conditions of one system.
pub fn integrate_many(
    sys: &LinearSystem,
    starts: &[TrajectoryState],
    dt: f64,
    horizon: f64,
    exec: Execution,
) -> Vec<Result<Trajectory>> {
    map_collect(starts, exec, |s0| integrate(sys, s0, dt, horizon))
}

/// `½(ẋ² + ẏ²) + ½(x² + y²) + λxy`, conserved along Lee trajectories for any γ.
pub fn p_lambda(state: &TrajectoryState, lambda: f64) -> f64 {
    let [x, y] = state.q;
    let [xd, yd] = state.qdot;
    0.5 * (xd * xd + yd * yd) + 0.5 * (x * x + y * y) + lambda * x * y
}

/// Phase-space trajectory of `v̇ = J h v`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseTrajectory {
    pub dt: f64,
    pub states: Vec<Vector4<f64>>,
}

impl PhaseTrajectory {
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    /// `max_t |H(t) - H(0)|` with `H = ½ vᵀ h v`.
    pub fn energy_drift(&self, h: &QuadraticHamiltonian) -> f64 {
        let e0 = quad_eval(h, &self.states[0]);
        self.states
            .iter()
            .map(|v| (quad_eval(h, v) - e0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn hamilton_flow(h: &QuadraticHamiltonian, v0: &Vector4<f64>, dt: f64, horizon: f64) -> Result<PhaseTrajectory> {
    let a = symplectic_j() * h.matrix();
    let (dt, states) = run_linear(&a, *v0, dt, horizon)?;
    Ok(PhaseTrajectory { dt, states })
}
