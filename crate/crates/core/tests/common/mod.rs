//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library's numerics: eigenvalues come from a
//! Jacobi sweep on the real embedding of a Hermitian matrix, tensor
//! operations are explicit index sums, and the classical correlation of a
//! qubit-measured state comes from a grid search over the Bloch sphere.

#![allow(dead_code)]

use num_complex::Complex64;
use qcorr_core::CMatrix;

pub fn cplx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// `H = X + iY` embeds as the real symmetric `[[X, -Y], [Y, X]]` whose
/// spectrum is that of `H` with every eigenvalue doubled.
pub fn hermitian_spectrum(h: &CMatrix) -> Vec<f64> {
    let n = h.nrows();
    let mut r = vec![vec![0.0; 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            let z = 0.5 * (h[(i, j)] + h[(j, i)].conj());
            r[i][j] = z.re;
            r[i + n][j + n] = z.re;
            r[i][j + n] = -z.im;
            r[i + n][j] = z.im;
        }
    }
    jacobi_eigenvalues(r).into_iter().step_by(2).collect()
}

pub fn entropy_bits(rho: &CMatrix) -> f64 {
    hermitian_spectrum(rho).into_iter().filter(|&l| l > 1e-12).map(|l| -l * l.log2()).sum()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac, br, bc) = (a.nrows(), a.ncols(), b.nrows(), b.ncols());
    CMatrix::from_fn(ar * br, ac * bc, |i, j| a[(i / br, j / bc)] * b[(i % br, j % bc)])
}

pub fn trace_out_b(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum())
}

pub fn trace_out_a(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(db, db, |i, j| (0..da).map(|k| m[(k * db + i, k * db + j)]).sum())
}

/// `Σ_{ij} (A_i⊗B_j) ρ (A_i⊗B_j)†` by explicit double sum.
pub fn apply_product_kraus(ka: &[CMatrix], kb: &[CMatrix], rho: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
    for a in ka {
        for b in kb {
            let k = kron(a, b);
            out += &k * rho * k.adjoint();
        }
    }
    out
}

pub fn trace(m: &CMatrix) -> Complex64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

/// Holevo quantity of measuring a qubit A along the Bloch direction `(θ, φ)`.
pub fn bloch_holevo(rho: &CMatrix, db: usize, theta: f64, phi: f64) -> f64 {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let e = Complex64::from_polar(1.0, phi);
    let basis = [[cplx(c, 0.0), e * s], [cplx(-s, 0.0), e * c]];
    let rho_b = trace_out_a(rho, 2, db);
    let mut avg = 0.0;
    for v in basis {
        // ⟨v|_A ρ |v⟩_A
        let cond = CMatrix::from_fn(db, db, |i, j| {
            let mut z = cplx(0.0, 0.0);
            for a in 0..2 {
                for b in 0..2 {
                    z += v[a].conj() * rho[(a * db + i, b * db + j)] * v[b];
                }
            }
            z
        });
        let p = trace(&cond).re;
        if p > 1e-14 {
            avg += p * entropy_bits(&(cond / cplx(p, 0.0)));
        }
    }
    entropy_bits(&rho_b) - avg
}

/// Classical correlation with measurement on a qubit A: 1° grid over
/// `θ ∈ [0°,180°]`, `φ ∈ [0°,360°)`, then a 0.01° grid within ±1° of the best
/// grid point.
pub fn grid_classical_correlation(rho: &CMatrix, db: usize) -> f64 {
    let deg = core::f64::consts::PI / 180.0;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for t in 0..=180 {
        for f in 0..360 {
            let (th, ph) = (t as f64 * deg, f as f64 * deg);
            let v = bloch_holevo(rho, db, th, ph);
            if v > best.0 {
                best = (v, th, ph);
            }
        }
    }
    let (_, th0, ph0) = best;
    for t in -100..=100 {
        for f in -100..=100 {
            let (th, ph) = (th0 + t as f64 * 0.01 * deg, ph0 + f as f64 * 0.01 * deg);
            let v = bloch_holevo(rho, db, th, ph);
            if v > best.0 {
                best = (v, th, ph);
            }
        }
    }
    best.0
}

pub fn mutual_information_oracle(rho: &CMatrix, da: usize, db: usize) -> f64 {
    entropy_bits(&trace_out_b(rho, da, db)) + entropy_bits(&trace_out_a(rho, da, db)) - entropy_bits(rho)
}

/// `(I, C, D)` of `¼(I + Σ c_j σ_j⊗σ_j)` in closed form.
pub fn bell_diagonal(c1: f64, c2: f64, c3: f64) -> (f64, f64, f64) {
    let lambdas = [
        (1.0 - c1 - c2 - c3) / 4.0,
        (1.0 - c1 + c2 + c3) / 4.0,
        (1.0 + c1 - c2 + c3) / 4.0,
        (1.0 + c1 + c2 - c3) / 4.0,
    ];
    let xlog = |x: f64| if x > 0.0 { x * x.log2() } else { 0.0 };
    let i = 2.0 + lambdas.iter().map(|&l| xlog(l)).sum::<f64>();
    let c = c1.abs().max(c2.abs()).max(c3.abs());
    let cc = 0.5 * xlog(1.0 - c) + 0.5 * xlog(1.0 + c);
    (i, cc, i - cc)
}

/// Bell-diagonal correlations of `p|Φ⁺⟩⟨Φ⁺| + (1-p)I/4`.
pub fn werner_oracle(p: f64) -> (f64, f64, f64) {
    bell_diagonal(p, -p, p)
}

pub fn bell_diagonal_matrix(c1: f64, c2: f64, c3: f64) -> CMatrix {
    let id = CMatrix::identity(2, 2);
    let x = CMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)]);
    let y = CMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(0.0, -1.0), cplx(0.0, 1.0), cplx(0.0, 0.0)]);
    let z = CMatrix::from_row_slice(2, 2, &[cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(-1.0, 0.0)]);
    (kron(&id, &id) + kron(&x, &x) * cplx(c1, 0.0) + kron(&y, &y) * cplx(c2, 0.0) + kron(&z, &z) * cplx(c3, 0.0)) * cplx(0.25, 0.0)
}
