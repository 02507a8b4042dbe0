//! Dense density matrices and the circuits the analytic maps abstract.
//!
//! Qubit 0 is the most significant index bit. A single pair is ordered
//! `(A, B)`. Two pairs for purification are ordered `(A1, B1, A2, B2)` and
//! for connection `(A, B1, B2, C)`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{BitPair, GraphDiagonalState};
use crate::noise::NoiseModel;

pub const DENSE_TOL: f64 = 1e-12;
pub const MIN_OUTCOME_PROB: f64 = 1e-15;

type Mat = DMatrix<Complex64>;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    matrix: Mat,
}

impl DenseState {
    /// Accepts 4×4 and 16×16 matrices that are Hermitian, unit-trace and
    /// positive semidefinite within [`DENSE_TOL`].
    pub fn new(matrix: Mat) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || !(n == 4 || n == 16) {
            return Err(Error::Oracle(format!(
                "dimension {}x{} is not 4x4 or 16x16",
                n,
                matrix.ncols()
            )));
        }
        let herm = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if herm > DENSE_TOL {
            return Err(Error::Oracle(format!("not Hermitian (deviation {herm:e})")));
        }
        let trace = matrix.trace();
        if (trace - c(1.0)).norm() > DENSE_TOL {
            return Err(Error::Oracle(format!("trace {trace} is not 1")));
        }
        let min_eig = matrix.clone().symmetric_eigenvalues().min();
        if min_eig < -DENSE_TOL {
            return Err(Error::Oracle(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(DenseState { matrix })
    }

    fn unchecked(matrix: Mat) -> Self {
        DenseState { matrix }
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn from_graph_diagonal(s: &GraphDiagonalState) -> Self {
        let basis = graph_basis();
        let weights = s.coeffs_in_unshifted_basis();
        let mut m = Mat::zeros(4, 4);
        for (v, w) in basis.iter().zip(weights) {
            m += v * v.adjoint() * c(w);
        }
        Self::unchecked(m)
    }

    /// `⟨k|ρ|k⟩_G` for the unshifted graph basis, in index order.
    pub fn graph_diagonal(&self) -> Result<[f64; 4]> {
        if self.dim() != 4 {
            return Err(Error::Oracle("graph diagonal needs a single pair".into()));
        }
        let basis = graph_basis();
        Ok(std::array::from_fn(|k| {
            (basis[k].adjoint() * &self.matrix * &basis[k])[(0, 0)].re
        }))
    }

    /// Largest modulus of an off-diagonal element in the graph basis.
    pub fn graph_off_diagonal(&self) -> Result<f64> {
        if self.dim() != 4 {
            return Err(Error::Oracle("graph basis needs a single pair".into()));
        }
        let basis = graph_basis();
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    let z = (basis[i].adjoint() * &self.matrix * &basis[j])[(0, 0)];
                    worst = worst.max(z.norm());
                }
            }
        }
        Ok(worst)
    }

    pub fn max_abs_diff(&self, other: &DenseState) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

fn ket(v: [f64; 2]) -> DVector<Complex64> {
    DVector::from_iterator(2, v.into_iter().map(c))
}

fn z_basis(b: bool) -> DVector<Complex64> {
    if b {
        ket([0.0, 1.0])
    } else {
        ket([1.0, 0.0])
    }
}

fn x_basis(b: bool) -> DVector<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    if b {
        ket([s, -s])
    } else {
        ket([s, s])
    }
}

/// `|k1 k2⟩_G = (|0_z, k2_x⟩ + (−1)^k1 |1_z, ¬k2_x⟩)/√2`.
pub fn graph_basis() -> [DVector<Complex64>; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    std::array::from_fn(|k| {
        let b = BitPair::from_index(k);
        let sign = if b.0 { -1.0 } else { 1.0 };
        (z_basis(false).kronecker(&x_basis(b.1)) + z_basis(true).kronecker(&x_basis(!b.1)) * c(sign)) * c(s)
    })
}

fn identity2() -> Mat {
    Mat::identity(2, 2)
}

fn pauli_x() -> Mat {
    Mat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
}

fn pauli_y() -> Mat {
    Mat::from_row_slice(2, 2, &[c(0.0), -I, I, c(0.0)])
}

fn pauli_z() -> Mat {
    Mat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
}

fn hadamard() -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Mat::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)])
}

fn projector(v: &DVector<Complex64>) -> Mat {
    v * v.adjoint()
}

/// Tensor product over `n` qubits with `ops` placed on the given qubits.
fn on_qubits(n: usize, ops: &[(usize, &Mat)]) -> Mat {
    (0..n).fold(Mat::identity(1, 1), |acc, q| {
        match ops.iter().find(|(k, _)| *k == q) {
            Some((_, m)) => acc.kronecker(m),
            None => acc.kronecker(&identity2()),
        }
    })
}

fn cnot(n: usize, control: usize, target: usize) -> Mat {
    let p0 = projector(&z_basis(false));
    let p1 = projector(&z_basis(true));
    on_qubits(n, &[(control, &p0)]) + on_qubits(n, &[(control, &p1), (target, &pauli_x())])
}

fn bit(index: usize, n: usize, q: usize) -> usize {
    (index >> (n - 1 - q)) & 1
}

/// Partial trace keeping `keep` (in ascending order).
fn partial_trace(m: &Mat, n: usize, keep: &[usize]) -> Mat {
    let d = 1 << keep.len();
    let reduced = |index: usize| keep.iter().fold(0, |acc, &q| (acc << 1) | bit(index, n, q));
    let traced = |index: usize| {
        (0..n)
            .filter(|q| !keep.contains(q))
            .fold(0, |acc, q| (acc << 1) | bit(index, n, q))
    };
    let mut out = Mat::zeros(d, d);
    for i in 0..(1 << n) {
        for j in 0..(1 << n) {
            if traced(i) == traced(j) {
                out[(reduced(i), reduced(j))] += m[(i, j)];
            }
        }
    }
    out
}

/// `tr_{q1 q2}(ρ) ⊗ 1/4` in the original qubit order.
fn white_on_pair(m: &Mat, n: usize, q1: usize, q2: usize) -> Mat {
    let dim = 1 << n;
    let mut out = Mat::zeros(dim, dim);
    let same = |i: usize, j: usize| bit(i, n, q1) == bit(j, n, q1) && bit(i, n, q2) == bit(j, n, q2);
    let mask = (1 << (n - 1 - q1)) | (1 << (n - 1 - q2));
    for i in 0..dim {
        for j in 0..dim {
            if !same(i, j) {
                continue;
            }
            let mut acc = c(0.0);
            for v in [0, 1 << (n - 1 - q1), 1 << (n - 1 - q2), mask] {
                acc += m[((i & !mask) | v, (j & !mask) | v)];
            }
            out[(i, j)] = acc * c(0.25);
        }
    }
    out
}

/// Two-qubit gate with reliability `p`:
/// `ρ ↦ p U ρ U† + (1 − p) tr_{q1 q2}(ρ) ⊗ 1/4`.
fn noisy_gate(m: &Mat, n: usize, q1: usize, q2: usize, u: &Mat, p: f64) -> Mat {
    let ideal = u * m * u.adjoint();
    ideal * c(p) + white_on_pair(m, n, q1, q2) * c(1.0 - p)
}

/// POVM element for reading `outcome` off a noisy detector.
fn povm(basis: fn(bool) -> DVector<Complex64>, outcome: bool, eta: f64) -> Mat {
    projector(&basis(outcome)) * c(eta) + projector(&basis(!outcome)) * c(1.0 - eta)
}

fn measure_and_reduce(
    joint: &Mat,
    n: usize,
    meas: [(usize, Mat); 2],
    keep: &[usize],
) -> Result<(DenseState, f64)> {
    let m = on_qubits(n, &[(meas[0].0, &meas[0].1), (meas[1].0, &meas[1].1)]);
    let reduced = partial_trace(&(m * joint), n, keep);
    let prob = reduced.trace().re;
    if !(prob >= MIN_OUTCOME_PROB) {
        return Err(Error::Degenerate { norm: prob });
    }
    let state = (&reduced + reduced.adjoint()) * c(0.5 / prob);
    Ok((DenseState::unchecked(state), prob))
}

fn require_pair(s: &DenseState) -> Result<()> {
    if s.dim() != 4 {
        return Err(Error::Oracle(format!("expected a 4x4 pair, got {0}x{0}", s.dim())));
    }
    Ok(())
}

/// One DEJMPS round on `(a, b)` for a single outcome `(ζ, ξ)`: `ζ` read off
/// A2 in the z basis, `ξ` off B2 in the x basis. Returns the normalized
/// state of the first pair and the outcome probability.
pub fn dm_dejmps_step(
    a: &DenseState,
    b: &DenseState,
    model: &NoiseModel,
    outcome: BitPair,
) -> Result<(DenseState, f64)> {
    require_pair(a)?;
    require_pair(b)?;
    // (A, B) ⊗ (A, B) → (A1, B1, A2, B2) is already the kronecker order.
    let mut joint = a.matrix.kronecker(&b.matrix);

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let ua = Mat::from_row_slice(2, 2, &[c(1.0), -I, -I, c(1.0)]) * c(s);
    // |0x⟩ ↦ (|0x⟩ + i|1x⟩)/√2, |1x⟩ ↦ (|1x⟩ + i|0x⟩)/√2
    let (x0, x1) = (x_basis(false), x_basis(true));
    let ub = ((&x0 + &x1 * I) * x0.adjoint() + (&x1 + &x0 * I) * x1.adjoint()) * c(s);
    let local = on_qubits(4, &[(0, &ua), (1, &ub), (2, &ua), (3, &ub)]);
    joint = &local * joint * local.adjoint();

    joint = noisy_gate(&joint, 4, 0, 2, &cnot(4, 0, 2), model.p);
    joint = noisy_gate(&joint, 4, 1, 3, &cnot(4, 3, 1), model.p);

    let meas = [
        (2, povm(z_basis, outcome.0, model.eta)),
        (3, povm(x_basis, outcome.1, model.eta)),
    ];
    measure_and_reduce(&joint, 4, meas, &[0, 1])
}

/// Bell measurement on the inner qubits: noisy `CNOT(B1 → B2) · H(B1)`, then
/// B1 read in the x basis (`ζ1`) and B2 in the z basis (`ζ2`). Returns the
/// normalized outer pair and the outcome probability.
pub fn dm_connect(
    a: &DenseState,
    b: &DenseState,
    model: &NoiseModel,
    outcome: BitPair,
) -> Result<(DenseState, f64)> {
    require_pair(a)?;
    require_pair(b)?;
    let joint = a.matrix.kronecker(&b.matrix);
    let u = cnot(4, 1, 2) * on_qubits(4, &[(1, &hadamard())]);
    let joint = noisy_gate(&joint, 4, 1, 2, &u, model.p);
    let meas = [
        (1, povm(x_basis, outcome.0, model.eta)),
        (2, povm(z_basis, outcome.1, model.eta)),
    ];
    measure_and_reduce(&joint, 4, meas, &[0, 3])
}

/// Average over the stabilizer group `{1, K1, K2, K1 K2}` with
/// `K1 = σx ⊗ σz`, `K2 = σz ⊗ σx`.
pub fn dm_twirl(s: &DenseState) -> Result<DenseState> {
    require_pair(s)?;
    let k1 = pauli_x().kronecker(&pauli_z());
    let k2 = pauli_z().kronecker(&pauli_x());
    let k12 = &k1 * &k2;
    let mut out = s.matrix.clone();
    for k in [&k1, &k2, &k12] {
        out += k * &s.matrix * k.adjoint();
    }
    Ok(DenseState::unchecked(out * c(0.25)))
}

/// Memory noise in Kraus form: every stored qubit goes through
/// `ρ ↦ q ρ + (1 − q) · 1/2 ⊗ tr_q ρ` with `q = exp(−κ t)`, i.e. Kraus
/// operators `√(1 − 3(1−q)/4) · 1` and `√((1−q)/4) · σ_i`.
pub fn dm_memory(s: &DenseState, t: f64, model: &NoiseModel) -> Result<DenseState> {
    require_pair(s)?;
    if !(t >= 0.0) {
        return Err(Error::domain(format!("waiting time {t} must be >= 0")));
    }
    let q = (-model.kappa * t).exp();
    let kraus = [
        identity2() * c((1.0 - 0.75 * (1.0 - q)).sqrt()),
        pauli_x() * c((0.25 * (1.0 - q)).sqrt()),
        pauli_y() * c((0.25 * (1.0 - q)).sqrt()),
        pauli_z() * c((0.25 * (1.0 - q)).sqrt()),
    ];
    let qubits: &[usize] = match model.memory {
        crate::noise::MemorySides::Both => &[0, 1],
        crate::noise::MemorySides::One => &[0],
    };
    let mut m = s.matrix.clone();
    for &qubit in qubits {
        let mut next = Mat::zeros(4, 4);
        for k in &kraus {
            let full = on_qubits(2, &[(qubit, k)]);
            next += &full * &m * full.adjoint();
        }
        m = next;
    }
    Ok(DenseState::unchecked(m))
}
