//! Symplectic linear algebra on the four-dimensional phase space.
//!
//! The basis ordering is fixed everywhere as `(x, y, p_x, p_y)`; index 0..4
//! of every vector and matrix in this crate follows it. Transformed variables
//! `V = S v` are named `(X̃, Ỹ, P̃_X, P̃_Y)` in the same slots.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Serialize, Serializer};

/// Absolute tolerance used when comparing commutator tables entrywise.
pub const TABLE_TOL: f64 = 1e-12;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// The symplectic matrix for the ordering `(x, y, p_x, p_y)`.
///
/// `[v_j, v_k] = i J_jk` reproduces `[x, p_x] = [y, p_y] = i`.
pub fn symplectic_j() -> Matrix4<f64> {
    Matrix4::new(
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 1.0, //
        -1.0, 0.0, 0.0, 0.0, //
        0.0, -1.0, 0.0, 0.0,
    )
}

/// An observable linear in phase space: `Σ c_j v_j`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearForm {
    coeffs: [Complex64; 4],
}

impl LinearForm {
    pub fn new(coeffs: [Complex64; 4]) -> Self {
        Self { coeffs }
    }

    pub fn real(coeffs: [f64; 4]) -> Self {
        Self::new(coeffs.map(|c| Complex64::new(c, 0.0)))
    }

    pub fn x() -> Self {
        Self::real([1.0, 0.0, 0.0, 0.0])
    }

    pub fn y() -> Self {
        Self::real([0.0, 1.0, 0.0, 0.0])
    }

    pub fn px() -> Self {
        Self::real([0.0, 0.0, 1.0, 0.0])
    }

    pub fn py() -> Self {
        Self::real([0.0, 0.0, 0.0, 1.0])
    }

    /// Row `row` of `s`, i.e. the transformed variable `(S v)_row`.
    pub fn from_row(s: &Matrix4<f64>, row: usize) -> Self {
        Self::real([s[(row, 0)], s[(row, 1)], s[(row, 2)], s[(row, 3)]])
    }

    pub fn coeffs(&self) -> &[Complex64; 4] {
        &self.coeffs
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self::new(self.coeffs.map(|c| c * alpha))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.coeffs;
        for (o, c) in out.iter_mut().zip(other.coeffs.iter()) {
            *o += c;
        }
        Self::new(out)
    }
}

/// `[f, g] = i fᵀ J g`, using the canonical relations of the original variables.
pub fn commutator(f: &LinearForm, g: &LinearForm) -> Complex64 {
    let (a, b) = (f.coeffs(), g.coeffs());
    // J couples slot j with slot j+2 only. Grouped so that swapping f and g
    // negates the result exactly.
    let form = (a[0] * b[2] - a[2] * b[0]) + (a[1] * b[3] - a[3] * b[1]);
    I * form
}

/// Pairwise commutators `[V_j, V_k]` of four transformed variables.
///
/// Stored so that `T_kj = -T_jk` holds bit-for-bit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorTable {
    entries: [[Complex64; 4]; 4],
}

impl CommutatorTable {
    /// Builds a table from its six upper-triangular entries
    /// `(T01, T02, T03, T12, T13, T23)` (zero-based slots).
    #[allow(clippy::needless_range_loop)]
    pub fn from_upper(upper: [Complex64; 6]) -> Self {
        let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
        let mut it = upper.into_iter();
        for j in 0..4 {
            for k in (j + 1)..4 {
                let v = it.next().unwrap();
                entries[j][k] = v;
                entries[k][j] = -v;
            }
        }
        Self { entries }
    }

    /// `[x, p_x] = [y, p_y] = i`, all others zero.
    pub fn canonical() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::from_upper([z, I, z, z, I, z])
    }

    /// Table of the six linear forms' pairwise commutators.
    pub fn of_forms(forms: &[LinearForm; 4]) -> Self {
        let mut upper = [Complex64::new(0.0, 0.0); 6];
        let mut idx = 0;
        for j in 0..4 {
            for k in (j + 1)..4 {
                upper[idx] = commutator(&forms[j], &forms[k]);
                idx += 1;
            }
        }
        Self::from_upper(upper)
    }

    /// Zero-based access: `get(0, 2)` is `[X̃, P̃_X]`.
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.entries[j][k]
    }

    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.entries
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                worst = worst.max((self.entries[j][k] - other.entries[j][k]).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_deviation(other) <= tol
    }

    pub fn is_antisymmetric(&self) -> bool {
        (0..4).all(|j| (0..4).all(|k| self.entries[j][k] == -self.entries[k][j]))
    }

    /// Returns the table after flipping the sign of variable `slot`.
    pub fn with_sign_flip(&self, slot: usize) -> Self {
        let mut out = *self;
        for k in 0..4 {
            out.entries[slot][k] = -out.entries[slot][k];
            out.entries[k][slot] = -out.entries[k][slot];
        }
        out
    }
}

impl Serialize for CommutatorTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(serializer)
    }
}

/// `T_jk = i (S J Sᵀ)_jk`, the commutators of `V = S v`.
///
/// `S` need not be orthogonal.
pub fn transform_commutators(s: &Matrix4<f64>) -> CommutatorTable {
    let m = s * symplectic_j() * s.transpose();
    let mut upper = [Complex64::new(0.0, 0.0); 6];
    let mut idx = 0;
    for j in 0..4 {
        for k in (j + 1)..4 {
            upper[idx] = I * m[(j, k)];
            idx += 1;
        }
    }
    CommutatorTable::from_upper(upper)
}

/// Quadratic Hamiltonian `H = ½ vᵀ h v` with `h` symmetric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticHamiltonian {
    h: Matrix4<f64>,
}

impl QuadraticHamiltonian {
    /// Symmetrizes the input as `(m + mᵀ)/2`, so symmetric input passes
    /// through unchanged.
    pub fn new(m: Matrix4<f64>) -> Self {
        let mut h = m;
        for j in 0..4 {
            for k in (j + 1)..4 {
                let v = 0.5 * (m[(j, k)] + m[(k, j)]);
                h[(j, k)] = v;
                h[(k, j)] = v;
            }
        }
        Self { h }
    }

    pub fn identity() -> Self {
        Self::new(Matrix4::identity())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.h
    }

    pub fn trace(&self) -> f64 {
        self.h.trace()
    }

    pub fn determinant(&self) -> f64 {
        self.h.determinant()
    }
}

/// `½ vᵀ h v`.
pub fn quad_eval(h: &QuadraticHamiltonian, v: &Vector4<f64>) -> f64 {
    0.5 * v.dot(&(h.matrix() * v))
}

/// Orthogonal diagonalization `S h Sᵀ = h_d`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    /// Sorted descending.
    pub eigenvalues: Vector4<f64>,
    /// Rows are the eigenvectors, in eigenvalue order.
    pub s: Matrix4<f64>,
    pub h_d: Matrix4<f64>,
}

impl EigenDecomposition {
    /// Uses a caller-supplied `S` (e.g. a stored fixture). The eigenvalues are
    /// read off the diagonal of `S h Sᵀ` in row order; the second value is the
    /// largest off-diagonal magnitude left over.
    pub fn with_rows(h: &QuadraticHamiltonian, s: Matrix4<f64>) -> (Self, f64) {
        let full = s * h.matrix() * s.transpose();
        let eigenvalues = full.diagonal();
        let mut residual: f64 = 0.0;
        for j in 0..4 {
            for k in 0..4 {
                if j != k {
                    residual = residual.max(full[(j, k)].abs());
                }
            }
        }
        let h_d = Matrix4::from_diagonal(&eigenvalues);
        (Self { eigenvalues, s, h_d }, residual)
    }

    /// `Sᵀ h_d S`.
    pub fn reconstruct(&self) -> Matrix4<f64> {
        self.s.transpose() * self.h_d * self.s
    }

    /// Max entry of `|S Sᵀ - 1|`.
    pub fn orthogonality_error(&self) -> f64 {
        (self.s * self.s.transpose() - Matrix4::identity()).abs().max()
    }
}

/// Orthogonal eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues come out descending; each eigenvector row is signed so that its
/// first entry of largest magnitude is positive.
pub fn eigendecompose(h: &QuadraticHamiltonian) -> EigenDecomposition {
    let (values, vectors) = jacobi_eigen(h.matrix());

    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));

    let mut s = Matrix4::zeros();
    let mut eigenvalues = Vector4::zeros();
    for (row, &col) in order.iter().enumerate() {
        eigenvalues[row] = values[col];
        let mut v: Vector4<f64> = vectors.column(col).into();
        let lead = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let first = v.iter().position(|x| x.abs() == lead).unwrap_or(0);
        if v[first] < 0.0 {
            v = -v;
        }
        s.set_row(row, &v.transpose());
    }
    EigenDecomposition {
        eigenvalues,
        s,
        h_d: Matrix4::from_diagonal(&eigenvalues),
    }
}

const MAX_SWEEPS: usize = 64;

/// Returns eigenvalues and a matrix whose columns are the eigenvectors.
fn jacobi_eigen(m: &Matrix4<f64>) -> (Vector4<f64>, Matrix4<f64>) {
    let mut a = *m;
    let mut v = Matrix4::<f64>::identity();
    let scale = a.norm().max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..4)
            .flat_map(|p| ((p + 1)..4).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)] * a[(p, q)])
            .sum();
        if off.sqrt() <= 1e-18 * scale {
            break;
        }
        for p in 0..3 {
            for q in (p + 1)..4 {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..4 {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..4 {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    (a.diagonal(), v)
}

/// Row-major copy, for serialization and display.
pub fn rows(m: &Matrix4<f64>) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for (j, row) in out.iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            *x = m[(j, k)];
        }
    }
    out
}
