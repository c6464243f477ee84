//! From diagonal-but-non-canonical variables to decoupled canonical modes.
//!
//! Two routes are supported. When the transformed variables
//! `(X̃, Ỹ, P̃_X, P̃_Y)` obey a non-commutative algebra (non-zero `[X̃, Ỹ]` and
//! `[P̃_X, P̃_Y]`), a Bopp shift
//!
//! ```text
//! X̃ = a₁X + b₁P_Y,  Ỹ = a₂Y + b₂P_X,  P̃_X = a₃P_X + b₃Y,  P̃_Y = a₄P_Y + b₄X
//! ```
//!
//! with canonical `(X, Y, P_X, P_Y)` is solved for. When the transformed
//! variables are already two conjugate pairs up to an ordering, they are
//! relabeled instead.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase::{transform_commutators, CommutatorTable, TABLE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeRegime {
    /// `pCoeff > 0`, `qCoeff > 0`.
    Standard,
    /// `pCoeff · qCoeff < 0`.
    Inverted,
}

/// One-dimensional quadratic Hamiltonian `½(pCoeff·P² + qCoeff·Q²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecoupledMode {
    pub p_coeff: f64,
    pub q_coeff: f64,
    pub regime: ModeRegime,
}

impl DecoupledMode {
    pub fn new(p_coeff: f64, q_coeff: f64) -> Result<Self> {
        let regime = if p_coeff > 0.0 && q_coeff > 0.0 {
            ModeRegime::Standard
        } else if p_coeff * q_coeff < 0.0 {
            ModeRegime::Inverted
        } else {
            return Err(Error::InvalidMode { p_coeff, q_coeff });
        };
        Ok(Self {
            p_coeff,
            q_coeff,
            regime,
        })
    }

    pub fn is_standard(&self) -> bool {
        self.regime == ModeRegime::Standard
    }

    /// `√(pCoeff·qCoeff)` for standard modes.
    pub fn frequency(&self) -> Option<f64> {
        self.is_standard().then(|| (self.p_coeff * self.q_coeff).sqrt())
    }

    /// `Ω² = -qCoeff/pCoeff` for inverted modes, where the mode equals
    /// `pCoeff · ½(P² - Ω²Q²)`.
    pub fn omega_sq(&self) -> Option<f64> {
        (self.regime == ModeRegime::Inverted).then(|| -self.q_coeff / self.p_coeff)
    }
}

/// `H = H_X + relativeSign · H_Y` with `H_X` in `(X, P_X)` and `H_Y` in `(Y, P_Y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecoupledHamiltonian {
    pub mode_x: DecoupledMode,
    pub mode_y: DecoupledMode,
    pub relative_sign: i8,
}

/// Coefficients of the Bopp shift. `a₁ = a₄ = 0` always.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoppSolution {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    /// `(b3, b4)`.
    pub free_params: (f64, f64),
}

impl BoppSolution {
    /// Rows express `(X̃, Ỹ, P̃_X, P̃_Y)` in the basis `(X, Y, P_X, P_Y)`.
    pub fn ansatz_matrix(&self) -> Matrix4<f64> {
        Matrix4::new(
            self.a1, 0.0, 0.0, self.b1, //
            0.0, self.a2, self.b2, 0.0, //
            0.0, self.b3, self.a3, 0.0, //
            self.b4, 0.0, 0.0, self.a4,
        )
    }

    /// Commutators the ansatz induces on the tilde variables, assuming
    /// `(X, Y, P_X, P_Y)` canonical.
    pub fn induced_table(&self) -> CommutatorTable {
        transform_commutators(&self.ansatz_matrix())
    }

    /// `R⁻¹ S`: the Bopp variables in terms of the original `(x, y, p_x, p_y)`.
    pub fn variables_from(&self, s: &Matrix4<f64>) -> Option<Matrix4<f64>> {
        self.ansatz_matrix().try_inverse().map(|r_inv| r_inv * s)
    }
}

fn imag_part(table: &CommutatorTable, j: usize, k: usize) -> Result<f64> {
    let z = table.get(j, k);
    if z.re.abs() > TABLE_TOL {
        return Err(Error::AnsatzInadmissible(format!(
            "entry ({j},{k}) = {z} is not purely imaginary"
        )));
    }
    Ok(z.im)
}

/// Solves the Bopp ansatz against a commutator table of tilde variables.
///
/// The table must have `[X̃, P̃_Y] = [Ỹ, P̃_X] = 0` and non-zero, purely
/// imaginary `[X̃, Ỹ]`, `[X̃, P̃_X]`, `[Ỹ, P̃_Y]`, `[P̃_X, P̃_Y]`. Writing the
/// latter as `i·t₁₂, i·t₁₃, i·t₂₄, i·t₃₄`, the canonical relations for
/// `(X, Y, P_X, P_Y)` reduce to `b₁b₃ = -t₁₃`, `a₂b₁ = -t₁₂`, `b₂b₄ = -t₂₄`,
/// `a₃b₄ = -t₃₄`.
pub fn solve_bopp(table: &CommutatorTable, b3: f64, b4: f64) -> Result<BoppSolution> {
    if b3 == 0.0 || b4 == 0.0 || !b3.is_finite() || !b4.is_finite() {
        return Err(Error::DegenerateShift);
    }
    for (j, k, name) in [(0, 3, "[X~,P~_Y]"), (1, 2, "[Y~,P~_X]")] {
        if table.get(j, k).norm() > TABLE_TOL {
            return Err(Error::AnsatzInadmissible(format!("{name} must vanish")));
        }
    }
    let t12 = imag_part(table, 0, 1)?;
    let t13 = imag_part(table, 0, 2)?;
    let t24 = imag_part(table, 1, 3)?;
    let t34 = imag_part(table, 2, 3)?;
    for (t, name) in [
        (t12, "[X~,Y~]"),
        (t13, "[X~,P~_X]"),
        (t24, "[Y~,P~_Y]"),
        (t34, "[P~_X,P~_Y]"),
    ] {
        if t.abs() <= TABLE_TOL {
            return Err(Error::AnsatzInadmissible(format!(
                "{name} vanishes; the table has no non-commutative structure to shift away"
            )));
        }
    }

    let b1 = -t13 / b3;
    let solution = BoppSolution {
        a1: 0.0,
        a2: -t12 / b1,
        a3: -t34 / b4,
        a4: 0.0,
        b1,
        b2: -t24 / b4,
        b3,
        b4,
        free_params: (b3, b4),
    };
    debug_assert!(solution
        .induced_table()
        .approx_eq(table, 1e-9 * (1.0 + t12.abs() + t13.abs())));
    Ok(solution)
}

/// Free parameters that make both momentum coefficients equal to one after
/// [`decouple_case1`]. `None` when that requires a non-positive eigenvalue.
pub fn unit_momentum_gauge(table: &CommutatorTable, eigenvalues: &[f64; 4]) -> Option<(f64, f64)> {
    let [e1, e2, e3, _] = *eigenvalues;
    let (t13, t24, t34) = (table.get(0, 2).im, table.get(1, 3).im, table.get(2, 3).im);
    let x_mass = e2 * t24 * t24 + e3 * t34 * t34;
    if e1 <= 0.0 || x_mass <= 0.0 || t13 == 0.0 {
        return None;
    }
    Some((e1.sqrt() * t13.abs(), x_mass.sqrt()))
}

/// Coefficient matrix of `H` in `(X, Y, P_X, P_Y)`, i.e. `Rᵀ h_d R`.
pub fn bopp_quadratic_form(h_d: &Matrix4<f64>, bopp: &BoppSolution) -> Matrix4<f64> {
    let r = bopp.ansatz_matrix();
    r.transpose() * h_d * r
}

/// Substitutes the Bopp shift into `½(E₁X̃² + E₂Ỹ² + E₃P̃_X² + E₄P̃_Y²)`.
pub fn decouple_case1(h_d: &Matrix4<f64>, bopp: &BoppSolution) -> Result<DecoupledHamiltonian> {
    let form = bopp_quadratic_form(h_d, bopp);
    let scale = (0..4).map(|j| form[(j, j)].abs()).fold(1.0, f64::max);
    let mut residual: f64 = 0.0;
    for j in 0..4 {
        for k in 0..4 {
            if j != k {
                residual = residual.max(form[(j, k)].abs());
            }
        }
    }
    if residual > TABLE_TOL * scale {
        return Err(Error::DecouplingFailed { residual });
    }
    Ok(DecoupledHamiltonian {
        mode_x: DecoupledMode::new(form[(2, 2)], form[(0, 0)])?,
        mode_y: DecoupledMode::new(form[(3, 3)], form[(1, 1)])?,
        relative_sign: 1,
    })
}

/// How the relabeling maps tilde variables onto canonical ones.
pub const RELABEL_MAP: [(&str, &str); 4] = [("X", "P~_X"), ("P_X", "X~"), ("Y", "Y~"), ("P_Y", "P~_Y")];

/// `(X, Y, P_X, P_Y) = (P̃_X, Ỹ, X̃, P̃_Y)` as a permutation matrix acting on
/// `(X̃, Ỹ, P̃_X, P̃_Y)`.
pub fn relabel_matrix() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 1.0, 0.0, 0.0, //
        1.0, 0.0, 0.0, 0.0, //
        0.0, 0.0, 0.0, 1.0,
    )
}

/// True when the table is `[X̃, P̃_X] = -i`, `[Ỹ, P̃_Y] = +i`, all cross
/// commutators zero.
pub fn is_relabel_structure(table: &CommutatorTable) -> bool {
    let z = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let want = CommutatorTable::from_upper([z, -i, z, z, i, z]);
    table.approx_eq(&want, TABLE_TOL)
}

/// Relabels `X = P̃_X, P_X = X̃, Y = Ỹ, P_Y = P̃_Y` and splits `H` into modes.
///
/// The `Y` part `½(E₄P_Y² + E₂Y²)` is written as `-H_Y` when `E₄ < 0`, so
/// that `H_Y` always has a positive momentum coefficient.
pub fn relabel_case2(table: &CommutatorTable, h_d: &Matrix4<f64>) -> Result<DecoupledHamiltonian> {
    if !is_relabel_structure(table) {
        return Err(Error::NotDirectlyCanonical(format!(
            "expected [X~,P~_X] = -i, [Y~,P~_Y] = +i and vanishing cross terms, got [X~,P~_X] = {}, [Y~,P~_Y] = {}",
            table.get(0, 2),
            table.get(1, 3)
        )));
    }
    let (e1, e2, e3, e4) = (h_d[(0, 0)], h_d[(1, 1)], h_d[(2, 2)], h_d[(3, 3)]);
    let mode_x = DecoupledMode::new(e1, e3)?;
    let (mode_y, relative_sign) = if e4 < 0.0 {
        (DecoupledMode::new(-e4, -e2)?, -1)
    } else {
        (DecoupledMode::new(e4, e2)?, 1)
    };
    Ok(DecoupledHamiltonian {
        mode_x,
        mode_y,
        relative_sign,
    })
}

/// `[X, P_X] = [Y, P_Y] = i`, all others zero, to `1e-12`.
pub fn verify_canonical(table: &CommutatorTable) -> bool {
    table.approx_eq(&CommutatorTable::canonical(), TABLE_TOL)
}
