//! Ladder operators, eigenfunctions and spectra of the decoupled modes.
//!
//! Mode functions are kept symbolic as `p(Q)·exp(σQ²/2)` with complex `p` and
//! `σ`; every first-order operator `μQ + ν d/dQ` and every quadratic
//! Hamiltonian maps this family to itself with the same `σ`, so eigen-identities
//! reduce to polynomial coefficient comparisons.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::{map_collect, Execution};
use crate::poly::Poly;
use crate::quantize::{DecoupledHamiltonian, DecoupledMode, ModeRegime};

/// `|Re σ|` below this is treated as zero (tempered).
pub const TEMPERED_TOL: f64 = 1e-12;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `e^{iπ/4}`, computed as `(1 + i)/√2`.
pub fn phase_quarter() -> Complex64 {
    c(FRAC_1_SQRT_2, FRAC_1_SQRT_2)
}

/// First-order operator `f ↦ μ·Q·f + ν·f′`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LadderOp {
    pub mu: Complex64,
    pub nu: Complex64,
}

impl LadderOp {
    pub fn new(mu: Complex64, nu: Complex64) -> Result<Self> {
        if mu == c(0.0, 0.0) && nu == c(0.0, 0.0) {
            return Err(Error::ZeroLadder);
        }
        Ok(Self { mu, nu })
    }

    /// Formal adjoint with respect to `∫ f̄ g dQ`: `(μQ + ν∂)† = μ̄Q − ν̄∂`.
    pub fn adjoint(&self) -> Self {
        Self {
            mu: self.mu.conj(),
            nu: -self.nu.conj(),
        }
    }

    pub fn apply(&self, f: &ModeFunction) -> ModeFunction {
        apply_ladder(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassTag {
    /// `Re σ < 0`.
    Normalizable,
    /// `Re σ = 0`.
    Tempered,
}

/// `poly(Q)·exp(σQ²/2)` with `Re σ ≤ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeFunction {
    poly: Poly,
    sigma: Complex64,
    class_tag: ClassTag,
}

impl ModeFunction {
    /// Rejects `Re σ > 0`. A real part within [`TEMPERED_TOL`] of zero is
    /// snapped to zero.
    pub fn new(poly: Poly, sigma: Complex64) -> Result<Self> {
        if !(sigma.re.is_finite() && sigma.im.is_finite()) {
            return Err(Error::NotTempered { sigma_re: sigma.re });
        }
        if sigma.re > TEMPERED_TOL {
            return Err(Error::NotTempered { sigma_re: sigma.re });
        }
        let (sigma, class_tag) = if sigma.re.abs() <= TEMPERED_TOL {
            (c(0.0, sigma.im), ClassTag::Tempered)
        } else {
            (sigma, ClassTag::Normalizable)
        };
        Ok(Self { poly, sigma, class_tag })
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn sigma(&self) -> Complex64 {
        self.sigma
    }

    pub fn class_tag(&self) -> ClassTag {
        self.class_tag
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn degree(&self) -> Option<usize> {
        self.poly.degree()
    }

    pub fn eval(&self, q: f64) -> Complex64 {
        let q = c(q, 0.0);
        self.poly.eval(q) * (self.sigma * q * q * 0.5).exp()
    }

    fn with_poly(&self, poly: Poly) -> Self {
        Self {
            poly,
            sigma: self.sigma,
            class_tag: self.class_tag,
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.with_poly(self.poly.scale(s))
    }

    /// Difference of two functions sharing the same Gaussian.
    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.sigma, other.sigma);
        self.with_poly(&self.poly - &other.poly)
    }

    /// Relative coefficient distance, see [`Poly::relative_distance`].
    /// Infinite when the Gaussians differ.
    pub fn distance(&self, other: &Self) -> f64 {
        if (self.sigma - other.sigma).norm() > TEMPERED_TOL {
            return f64::INFINITY;
        }
        self.poly.relative_distance(&other.poly)
    }
}

impl Serialize for ModeFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let coeffs: Vec<[f64; 2]> = self.poly.coeffs().iter().map(|z| [z.re, z.im]).collect();
        let mut st = serializer.serialize_struct("ModeFunction", 4)?;
        st.serialize_field("polyCoeffs", &coeffs)?;
        st.serialize_field("sigmaRe", &self.sigma.re)?;
        st.serialize_field("sigmaIm", &self.sigma.im)?;
        st.serialize_field("classTag", &self.class_tag)?;
        st.end()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LevelRegime {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyLevel {
    pub n: usize,
    pub m: usize,
    pub value: Complex64,
    pub regime: LevelRegime,
}

impl Serialize for EnergyLevel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("EnergyLevel", 5)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("m", &self.m)?;
        st.serialize_field("re", &self.value.re)?;
        st.serialize_field("im", &self.value.im)?;
        st.serialize_field("regime", &self.regime)?;
        st.end()
    }
}

fn require_standard(mode: &DecoupledMode) -> Result<()> {
    if mode.regime != ModeRegime::Standard {
        return Err(Error::NotStandardMode {
            p_coeff: mode.p_coeff,
            q_coeff: mode.q_coeff,
        });
    }
    Ok(())
}

/// `α = (B/A)^{1/4}` for `H = ½(A P² + B Q²)`.
pub fn standard_alpha(mode: &DecoupledMode) -> Result<f64> {
    require_standard(mode)?;
    Ok((mode.q_coeff / mode.p_coeff).powf(0.25))
}

/// Returns `(a, a†, ω)`.
pub fn standard_ladder(mode: &DecoupledMode) -> Result<(LadderOp, LadderOp, f64)> {
    let alpha = standard_alpha(mode)?;
    let omega = (mode.p_coeff * mode.q_coeff).sqrt();
    let mu = c(alpha * FRAC_1_SQRT_2, 0.0);
    let nu = c(FRAC_1_SQRT_2 / alpha, 0.0);
    Ok((LadderOp { mu, nu }, LadderOp { mu, nu: -nu }, omega))
}

/// Physicists' Hermite polynomial by recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (0.0, 1.0);
    for k in 0..n {
        let next = 2.0 * x * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficients of `H_n` in ascending order.
pub fn hermite_poly(n: usize) -> Poly {
    let two_q = Poly::real(&[0.0, 2.0]);
    let (mut prev, mut cur) = (Poly::zero(), Poly::real(&[1.0]));
    for k in 0..n {
        let next = &(&two_q * &cur) - &prev.scale(c(2.0 * k as f64, 0.0));
        prev = cur;
        cur = next;
    }
    cur
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `ξ_n = (2ⁿn!)^{-1/2} (α²/π)^{1/4} H_n(αQ) exp(-α²Q²/2)`.
pub fn eigenfunction_standard(mode: &DecoupledMode, n: usize) -> Result<ModeFunction> {
    let alpha = standard_alpha(mode)?;
    let norm = (alpha * alpha / PI).powf(0.25) / (2f64.powi(n as i32) * factorial(n)).sqrt();
    let h = hermite_poly(n);
    let poly = Poly::new(
        h.coeffs()
            .iter()
            .enumerate()
            .map(|(k, z)| z * (norm * alpha.powi(k as i32)))
            .collect(),
    );
    ModeFunction::new(poly, c(-alpha * alpha, 0.0))
}

/// `(A, B)` for `½(P² − Ω²Q²)` with `[A, B] = 1`:
/// `A = (2Ω)^{-1/2}(e^{iπ/4}ΩQ + e^{-iπ/4} d/dQ)`,
/// `B = (2Ω)^{-1/2}(e^{iπ/4}ΩQ − e^{-iπ/4} d/dQ)`.
pub fn pseudoboson_pair(omega_sq: f64) -> Result<(LadderOp, LadderOp)> {
    if omega_sq <= 0.0 || !omega_sq.is_finite() {
        return Err(Error::NonPositiveOmegaSq(omega_sq));
    }
    let omega = omega_sq.sqrt();
    let k = 1.0 / (2.0 * omega).sqrt();
    let e = phase_quarter();
    let mu = e * (k * omega);
    let nu = e.conj() * k;
    Ok((LadderOp { mu, nu }, LadderOp { mu, nu: -nu }))
}

/// Solves `μQf + νf′ = 0`: `f = exp(σQ²/2)` with `σ = −μ/ν`.
pub fn vacuum_solve(l: &LadderOp) -> Result<ModeFunction> {
    if l.nu == c(0.0, 0.0) {
        return Err(Error::NoDifferentialPart);
    }
    ModeFunction::new(Poly::real(&[1.0]), -l.mu / l.nu)
}

/// `L(p e^{σQ²/2}) = (μQp + ν(p′ + σQp)) e^{σQ²/2}`.
pub fn apply_ladder(l: &LadderOp, f: &ModeFunction) -> ModeFunction {
    let qp = f.poly.shift();
    let poly = &qp.scale(l.mu + l.nu * f.sigma) + &f.poly.derivative().scale(l.nu);
    f.with_poly(poly)
}

/// `[L₁, L₂] f`.
pub fn commutator_apply(l1: &LadderOp, l2: &LadderOp, f: &ModeFunction) -> ModeFunction {
    let a = apply_ladder(l1, &apply_ladder(l2, f));
    let b = apply_ladder(l2, &apply_ladder(l1, f));
    a.sub(&b)
}

/// `Bⁿ η₀ / √(n!)`.
pub fn excited_pseudo(b: &LadderOp, eta0: &ModeFunction, n: usize) -> ModeFunction {
    let mut f = eta0.clone();
    for k in 1..=n {
        f = apply_ladder(b, &f).scale(c(1.0 / (k as f64).sqrt(), 0.0));
    }
    f
}

/// `N f = B(A f)`.
pub fn number_apply(a: &LadderOp, b: &LadderOp, f: &ModeFunction) -> ModeFunction {
    apply_ladder(b, &apply_ladder(a, f))
}

/// `½(pCoeff·(−d²/dQ²) + qCoeff·Q²) f`, exactly.
pub fn hamiltonian_apply(mode: &DecoupledMode, f: &ModeFunction) -> ModeFunction {
    let s = f.sigma;
    let p = &f.poly;
    let dp = p.derivative();
    // (p e^{σQ²/2})″ = (p″ + 2σQp′ + σp + σ²Q²p) e^{σQ²/2}
    let second = &(&(&dp.derivative() + &dp.shift().scale(2.0 * s)) + &p.scale(s)) + &p.shift().shift().scale(s * s);
    let kinetic = second.scale(c(-0.5 * mode.p_coeff, 0.0));
    let potential = p.shift().shift().scale(c(0.5 * mode.q_coeff, 0.0));
    f.with_poly(&kinetic + &potential)
}

/// Generalized eigenfunction `η_n` of an inverted mode, together with its
/// pseudo-boson pair.
pub fn inverted_eigenfunction(mode: &DecoupledMode, n: usize) -> Result<(ModeFunction, LadderOp, LadderOp)> {
    let omega_sq = mode.omega_sq().ok_or(Error::InvalidMode {
        p_coeff: mode.p_coeff,
        q_coeff: mode.q_coeff,
    })?;
    let (a, b) = pseudoboson_pair(omega_sq)?;
    let eta0 = vacuum_solve(&a)?;
    Ok((excited_pseudo(&b, &eta0, n), a, b))
}

/// `E_{n,m}` of `H = H_X + relativeSign·H_Y`.
///
/// For an inverted `H_Y = pCoeff·½(P² − Ω²Q²)`, the generalized eigenvalue of
/// `H_Y` on `η_m` is `i·pCoeff·Ω(m + ½)`, so the level is
/// `ω_X(n + ½) + relativeSign·i·pCoeff·Ω(m + ½)`.
pub fn spectrum(decoupled: &DecoupledHamiltonian, n: usize, m: usize) -> Result<EnergyLevel> {
    let (_, _, omega_x) = standard_ladder(&decoupled.mode_x)?;
    let sign = f64::from(decoupled.relative_sign);
    let ex = omega_x * (n as f64 + 0.5);
    let y = &decoupled.mode_y;
    let (value, regime) = match y.regime {
        ModeRegime::Standard => {
            let omega_y = (y.p_coeff * y.q_coeff).sqrt();
            (c(ex + sign * omega_y * (m as f64 + 0.5), 0.0), LevelRegime::Real)
        }
        ModeRegime::Inverted => {
            let omega = y.omega_sq().unwrap_or(0.0).sqrt();
            (c(ex, sign * y.p_coeff * omega * (m as f64 + 0.5)), LevelRegime::Complex)
        }
    };
    Ok(EnergyLevel { n, m, value, regime })
}

/// Levels for all `n < n_max`, `m < m_max`, `n`-major.
pub fn spectrum_table(decoupled: &DecoupledHamiltonian, n_max: usize, m_max: usize) -> Result<Vec<EnergyLevel>> {
    let mut out = Vec::with_capacity(n_max * m_max);
    for n in 0..n_max {
        for m in 0..m_max {
            out.push(spectrum(decoupled, n, m)?);
        }
    }
    Ok(out)
}

/// `φ_{n,m}(X, Y) = ξ_n(X)·η_m(Y)` with its level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TensorState {
    pub xi: ModeFunction,
    pub eta: ModeFunction,
    pub level: EnergyLevel,
}

impl TensorState {
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        self.xi.eval(x) * self.eta.eval(y)
    }
}

pub fn tensor_level(xi: ModeFunction, eta: ModeFunction, level: EnergyLevel) -> TensorState {
    TensorState { xi, eta, level }
}

/// Builds `φ_{n,m}` for a decoupled Hamiltonian, choosing Hermite functions or
/// pseudo-boson states for the `Y` factor by regime.
pub fn tensor_state(decoupled: &DecoupledHamiltonian, n: usize, m: usize) -> Result<TensorState> {
    let xi = eigenfunction_standard(&decoupled.mode_x, n)?;
    let eta = match decoupled.mode_y.regime {
        ModeRegime::Standard => eigenfunction_standard(&decoupled.mode_y, m)?,
        ModeRegime::Inverted => inverted_eigenfunction(&decoupled.mode_y, m)?.0,
    };
    Ok(tensor_level(xi, eta, spectrum(decoupled, n, m)?))
}

/// `½(pCoeff P² + qCoeff Q²)` in the first `size` unit-oscillator number states.
pub fn truncated_matrix(mode: &DecoupledMode, size: usize) -> Result<DMatrix<Complex64>> {
    if size < 2 {
        return Err(Error::TruncationTooSmall(size));
    }
    let lower = DMatrix::<Complex64>::from_fn(size, size, |r, col| {
        if col + 1 == r {
            c((r as f64).sqrt(), 0.0)
        } else {
            c(0.0, 0.0)
        }
    });
    // `lower` is c† in the number basis; c is its transpose.
    let annihilate = lower.transpose();
    let q = (&annihilate + &lower).scale(FRAC_1_SQRT_2);
    let p = (&lower - &annihilate) * c(0.0, FRAC_1_SQRT_2);
    let h = (&p * &p) * c(0.5 * mode.p_coeff, 0.0) + (&q * &q) * c(0.5 * mode.q_coeff, 0.0);
    Ok(h)
}

/// All eigenvalues of [`truncated_matrix`], ascending.
pub fn truncated_levels(mode: &DecoupledMode, size: usize) -> Result<Vec<f64>> {
    let h = truncated_matrix(mode, size)?;
    let mut evs: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    evs.sort_by(f64::total_cmp);
    Ok(evs)
}

/// Runs [`truncated_levels`] for a batch of `(mode, size)` jobs, keeping the
/// lowest `keep` levels of each.
pub fn truncated_batch(jobs: &[(DecoupledMode, usize)], keep: usize, exec: Execution) -> Vec<Result<Vec<f64>>> {
    map_collect(jobs, exec, |(mode, size)| {
        truncated_levels(mode, *size).map(|mut v| {
            v.truncate(keep);
            v
        })
    })
}
