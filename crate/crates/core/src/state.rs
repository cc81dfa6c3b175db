//! Density matrices, bipartite structure, partial traces and random states.
//!
//! Composite indices follow `i = i_a * d_b + i_b`: subsystem A is the slow
//! index. All constructors validate; states are immutable once built.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result, Violations};
use crate::linalg::{self, CMatrix, CVector};

/// Acceptance thresholds for the three density-matrix invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { hermiticity: 1e-10, trace: 1e-10, psd: 1e-10 }
    }
}

/// Allowed `| ‖v‖₂ - 1 |` for pure-state amplitudes.
pub const NORM_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

impl fmt::Display for Subsystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Subsystem::A => "A",
            Subsystem::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    Hermiticity,
    UnitTrace,
    PositiveSemidefinite,
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Invariant::Hermiticity => "hermiticity",
            Invariant::UnitTrace => "unit trace",
            Invariant::PositiveSemidefinite => "positive semidefiniteness",
        })
    }
}

/// A violated invariant and how far past zero it is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub invariant: Invariant,
    pub magnitude: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated by {:e}", self.invariant, self.magnitude)
    }
}

/// Checks hermiticity, unit trace and positivity of a square matrix.
///
/// Returns the list of violations; an empty list means the matrix is a valid
/// density matrix at the given tolerances. Positivity is judged on the
/// Hermitian part so that a non-Hermitian input reports both defects.
pub fn validate_state(m: &CMatrix, tol: &Tolerances) -> Result<Vec<Violation>> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    let mut out = Vec::new();
    let herm = linalg::hermiticity_defect(m);
    if herm > tol.hermiticity {
        out.push(Violation { invariant: Invariant::Hermiticity, magnitude: herm });
    }
    let tr = linalg::trace(m);
    let trace_dev = (tr - linalg::ONE).norm();
    if trace_dev > tol.trace {
        out.push(Violation { invariant: Invariant::UnitTrace, magnitude: trace_dev });
    }
    let min_eig = linalg::hermitian_eigenvalues(m).first().copied().unwrap_or(0.0);
    if min_eig < -tol.psd {
        out.push(Violation { invariant: Invariant::PositiveSemidefinite, magnitude: -min_eig });
    }
    Ok(out)
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates `m` at default tolerances.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerances(m, &Tolerances::default())
    }

    pub fn with_tolerances(m: CMatrix, tol: &Tolerances) -> Result<Self> {
        let violations = validate_state(&m, tol)?;
        if !violations.is_empty() {
            return Err(Error::InvalidState(Violations(violations)));
        }
        Ok(Self { matrix: m })
    }

    /// Symmetrizes `m` to `(m + m†)/2` before validating. Used after
    /// constructions that leave rounding-level asymmetry behind.
    pub fn from_noisy(m: &CMatrix) -> Result<Self> {
        Self::new(linalg::hermitian_part(m))
    }

    pub(crate) fn from_trusted(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: linalg::identity(d) * linalg::c(1.0 / d as f64, 0.0) }
    }

    /// `|i⟩⟨i|` in dimension `d`.
    pub fn basis_projector(d: usize, i: usize) -> Self {
        Self { matrix: linalg::outer(&linalg::basis_vector(d, i)) }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let d = probs.len();
        Self::new(CMatrix::from_fn(d, d, |i, j| {
            if i == j {
                linalg::c(probs[i], 0.0)
            } else {
                linalg::ZERO
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.matrix)
    }

    /// `U ρ U†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "unitary conjugation",
                expected: self.dim(),
                found: u.ncols(),
            });
        }
        Self::from_noisy(&(u * &self.matrix * u.adjoint()))
    }
}

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
}

impl PureState {
    pub fn new(amplitudes: CVector) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("pure state needs at least one amplitude".into()));
        }
        let deviation = (amplitudes.norm() - 1.0).abs();
        if deviation > NORM_TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    pub fn from_slice(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(CVector::from_column_slice(amplitudes))
    }

    pub fn basis(d: usize, i: usize) -> Self {
        Self { amplitudes: linalg::basis_vector(d, i) }
    }

    /// Haar-random pure state.
    pub fn random(d: usize, seed: u64) -> Self {
        let mut rng = linalg::seeded_rng(seed);
        let g = linalg::ginibre(d, 1, &mut rng);
        let v = g.column(0).into_owned();
        let norm = v.norm();
        Self { amplitudes: v / linalg::c(norm, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }
}

/// `|v⟩⟨v|`.
pub fn pure_to_density(v: &PureState) -> DensityMatrix {
    DensityMatrix::from_trusted(linalg::outer(&v.amplitudes))
}

/// A density matrix on `C^{d_a} ⊗ C^{d_b}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    state: DensityMatrix,
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidArgument("factor dimensions must be positive".into()));
        }
        if dim_a * dim_b != state.dim() {
            return Err(Error::DimensionMismatch {
                context: "bipartite factor dimensions",
                expected: state.dim(),
                found: dim_a * dim_b,
            });
        }
        Ok(Self { state, dim_a, dim_b })
    }

    pub fn from_matrix(m: CMatrix, dim_a: usize, dim_b: usize) -> Result<Self> {
        Self::new(DensityMatrix::new(m)?, dim_a, dim_b)
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let mut v = CVector::zeros(4);
        v[0] = linalg::c(s, 0.0);
        v[3] = linalg::c(s, 0.0);
        Self {
            state: DensityMatrix::from_trusted(linalg::outer(&v)),
            dim_a: 2,
            dim_b: 2,
        }
    }

    /// `p |Φ⁺⟩⟨Φ⁺| + (1-p) I/4`.
    pub fn werner(p: f64) -> Result<Self> {
        let bell = Self::bell();
        let m = bell.state.matrix * linalg::c(p, 0.0) + linalg::identity(4) * linalg::c((1.0 - p) / 4.0, 0.0);
        Self::from_matrix(m, 2, 2)
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &CMatrix {
        self.state.matrix()
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn dim_of(&self, side: Subsystem) -> usize {
        match side {
            Subsystem::A => self.dim_a,
            Subsystem::B => self.dim_b,
        }
    }

    pub fn marginal(&self, keep: Subsystem) -> DensityMatrix {
        partial_trace(self, keep)
    }
}

/// Kronecker product `a ⊗ b` as a bipartite state.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> BipartiteState {
    BipartiteState {
        state: DensityMatrix::from_trusted(linalg::kron(&a.matrix, &b.matrix)),
        dim_a: a.dim(),
        dim_b: b.dim(),
    }
}

/// Reduced state on `keep`.
pub fn partial_trace(s: &BipartiteState, keep: Subsystem) -> DensityMatrix {
    let m = partial_trace_matrix(s.matrix(), s.dim_a, s.dim_b, keep)
        .expect("bipartite dimensions are checked at construction");
    DensityMatrix::from_trusted(linalg::hermitian_part(&m))
}

/// Partial trace on a raw `(d_a d_b) × (d_a d_b)` matrix.
pub fn partial_trace_matrix(m: &CMatrix, dim_a: usize, dim_b: usize, keep: Subsystem) -> Result<CMatrix> {
    let n = dim_a * dim_b;
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            context: "partial trace",
            expected: n,
            found: m.nrows(),
        });
    }
    Ok(match keep {
        Subsystem::A => CMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Subsystem::B => CMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    })
}

/// Ginibre-ensemble density matrix `G G† / tr(G G†)` with `G` of shape
/// `dim × rank`. Deterministic in `seed`.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(dim, rank, &mut linalg::seeded_rng(seed))
}

pub fn random_density_with<R: rand::Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(alloc::format!(
            "rank {rank} must lie in 1..={dim}"
        )));
    }
    let g = linalg::ginibre(dim, rank, rng);
    let w = &g * g.adjoint();
    let tr = linalg::trace(&w).re;
    DensityMatrix::from_noisy(&(w / linalg::c(tr, 0.0)))
}
