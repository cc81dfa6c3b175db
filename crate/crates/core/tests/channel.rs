mod common;

use common::{apply_product_kraus, cplx, kron, max_diff};
use proptest::prelude::*;
use qcorr_core::channel::zoo::{self, SpectrumPreserving};
use qcorr_core::channel::{classify, ClassifyConfig, ProbeVerdict};
use qcorr_core::linalg::{random_unitary, seeded_rng};
use qcorr_core::recovery::is_reversible_cptp;
use qcorr_core::state::{random_density, tensor, validate_state, Tolerances};
use qcorr_core::{apply_local, BipartiteState, CMatrix, DensityMatrix, Error, KrausChannel, LocalChannelPair};

fn unit(d: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = cplx(1.0, 0.0);
    m
}

/// `Σ_ij Λ(|i⟩⟨j|) ⊗ |i⟩⟨j| / d_in`, output factor first.
fn choi_oracle(ch: &KrausChannel) -> CMatrix {
    let din = ch.dim_in();
    let mut out = CMatrix::zeros(ch.dim_out() * din, ch.dim_out() * din);
    for i in 0..din {
        for j in 0..din {
            out += kron(&ch.apply_matrix(&unit(din, i, j)), &unit(din, i, j));
        }
    }
    out / cplx(din as f64, 0.0)
}

/// Columns are column-stacked images of the matrix units.
fn superoperator_oracle(ch: &KrausChannel) -> CMatrix {
    let (din, dout) = (ch.dim_in(), ch.dim_out());
    let mut m = CMatrix::zeros(dout * dout, din * din);
    for i in 0..din {
        for j in 0..din {
            let img = ch.apply_matrix(&unit(din, i, j));
            for b in 0..dout {
                for a in 0..dout {
                    m[(b * dout + a, j * din + i)] = img[(a, b)];
                }
            }
        }
    }
    m
}

fn hadamard() -> CMatrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[cplx(h, 0.0), cplx(h, 0.0), cplx(h, 0.0), cplx(-h, 0.0)])
}

fn zoo_members(d: usize, seed: u64) -> Vec<(KrausChannel, bool)> {
    let mut rng = seeded_rng(seed);
    let prepared: Vec<DensityMatrix> = (0..d).map(|k| random_density(d, 1 + k % d, seed + k as u64).unwrap()).collect();
    vec![
        (zoo::unitary(random_unitary(d, &mut rng)).unwrap(), true),
        (zoo::depolarizing(0.3, d).unwrap(), false),
        (zoo::depolarizing(1.0, d).unwrap(), false),
        (zoo::completely_decohering(&random_unitary(d, &mut rng)).unwrap(), false),
        (zoo::isotropic(0.7, &SpectrumPreserving::Unitary(random_unitary(d, &mut rng)), d).unwrap(), false),
        (zoo::isotropic(0.2, &SpectrumPreserving::Transpose, d).unwrap(), false),
        (zoo::measure_and_prepare(&random_unitary(d, &mut rng), &prepared).unwrap(), false),
    ]
}

#[test]
fn apply_examples() {
    let rho = random_density(3, 2, 1).unwrap();
    assert!(max_diff(zoo::identity(3).apply(&rho).unwrap().matrix(), rho.matrix()) < 1e-15);
    let q = random_density(2, 2, 2).unwrap();
    assert!(max_diff(zoo::depolarizing(1.0, 2).unwrap().apply(&q).unwrap().matrix(), DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    let x = CMatrix::from_row_slice(2, 2, &[cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)]);
    let flipped = zoo::unitary(x).unwrap().apply(&DensityMatrix::basis_projector(2, 0)).unwrap();
    assert_eq!(flipped.matrix(), DensityMatrix::basis_projector(2, 1).matrix());
}

#[test]
fn apply_local_examples() {
    let mut rng = seeded_rng(3);
    let s = BipartiteState::new(random_density(6, 3, 4).unwrap(), 2, 3).unwrap();
    let ids = LocalChannelPair::new(zoo::identity(2), zoo::identity(3)).unwrap();
    assert!(max_diff(apply_local(&ids, &s).unwrap().matrix(), s.matrix()) < 1e-15);

    let (u, v) = (random_unitary(2, &mut rng), random_unitary(3, &mut rng));
    let (ra, rb) = (random_density(2, 2, 5).unwrap(), random_density(3, 3, 6).unwrap());
    let pair = LocalChannelPair::new(zoo::unitary(u.clone()).unwrap(), zoo::unitary(v.clone()).unwrap()).unwrap();
    let out = apply_local(&pair, &tensor(&ra, &rb)).unwrap();
    let expected = kron(&(&u * ra.matrix() * u.adjoint()), &(&v * rb.matrix() * v.adjoint()));
    assert!(max_diff(out.matrix(), &expected) < 1e-12);

    let bad = LocalChannelPair::new(zoo::identity(3), zoo::identity(3)).unwrap();
    assert!(matches!(apply_local(&bad, &s), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn apply_local_matches_double_sum_and_sequential_application() {
    let mut rng = seeded_rng(9);
    for seed in 0..20 {
        let (da, db) = (2 + seed as usize % 2, 2 + (seed as usize / 2) % 2);
        let s = BipartiteState::new(random_density(da * db, da * db, seed).unwrap(), da, db).unwrap();
        let ca = zoo::random(da, da, 2, &mut rng).unwrap();
        let cb = zoo::random(db, db, 3, &mut rng).unwrap();
        let pair = LocalChannelPair::new(ca.clone(), cb.clone()).unwrap();
        let out = apply_local(&pair, &s).unwrap();
        assert!(max_diff(out.matrix(), &apply_product_kraus(ca.kraus(), cb.kraus(), s.matrix())) < 1e-12);
        let first = apply_local(&LocalChannelPair::new(ca, zoo::identity(db)).unwrap(), &s).unwrap();
        let second = apply_local(&LocalChannelPair::new(zoo::identity(da), cb).unwrap(), &first).unwrap();
        assert!(max_diff(out.matrix(), second.matrix()) < 1e-12);
    }
}

#[test]
fn choi_examples() {
    let bell = BipartiteState::bell();
    assert!(max_diff(&zoo::identity(2).choi_matrix(), bell.matrix()) < 1e-15);
    assert!(max_diff(&zoo::depolarizing(1.0, 2).unwrap().choi_matrix(), &(CMatrix::identity(4, 4) * cplx(0.25, 0.0))) < 1e-15);
    let u = zoo::unitary(random_unitary(3, &mut seeded_rng(1))).unwrap();
    assert_eq!(qcorr_core::linalg::numerical_rank(&u.choi_matrix(), 1e-10), 1);
}

#[test]
fn superoperator_examples() {
    assert!(max_diff(&zoo::identity(3).superoperator_matrix(), &CMatrix::identity(9, 9)) < 1e-15);
    let u = random_unitary(2, &mut seeded_rng(2));
    let m = zoo::unitary(u.clone()).unwrap().superoperator_matrix();
    assert!(max_diff(&m, &kron(&u.conjugate(), &u)) < 1e-15);
    assert!(max_diff(&(m.adjoint() * &m), &CMatrix::identity(4, 4)) < 1e-12);
}

#[test]
fn apply_preserves_trace_and_positivity_1000_trials() {
    let mut rng = seeded_rng(77);
    for t in 0..1000u64 {
        let din = 1 + t as usize % 4;
        let dout = 1 + (t / 4) as usize % 4;
        let n = din.div_ceil(dout) + (t as usize % 3);
        let ch = zoo::random(din, dout, n, &mut rng).unwrap();
        let rho = random_density(din, 1 + t as usize % din, t).unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!((out.trace() - 1.0).abs() < 1e-10);
        assert!(validate_state(out.matrix(), &Tolerances::default()).unwrap().is_empty());
    }
}

#[test]
fn zoo_examples() {
    let plus = CMatrix::from_element(2, 2, cplx(0.5, 0.0));
    let dec = zoo::completely_decohering(&CMatrix::identity(2, 2)).unwrap();
    assert!(max_diff(&dec.apply_matrix(&plus), &(CMatrix::identity(2, 2) * cplx(0.5, 0.0))) < 1e-15);
    assert_eq!(dec.kraus().len(), 2);

    let rho = random_density(3, 3, 4).unwrap();
    let u = random_unitary(3, &mut seeded_rng(8));
    for gamma in [SpectrumPreserving::Unitary(u.clone()), SpectrumPreserving::Transpose] {
        let out = zoo::isotropic(0.0, &gamma, 3).unwrap().apply(&rho).unwrap();
        assert!(max_diff(out.matrix(), DensityMatrix::maximally_mixed(3).matrix()) < 1e-15);
    }
    let full = zoo::isotropic(1.0, &SpectrumPreserving::Unitary(u.clone()), 3).unwrap();
    assert!(max_diff(&full.superoperator_matrix(), &zoo::unitary(u).unwrap().superoperator_matrix()) < 1e-12);
}

#[test]
fn transpose_isotropic_admissibility() {
    // Choi eigenvalues of p·T + (1-p)·I/d: (1-p)/d² + p/d on the symmetric part,
    // (1-p)/d² - p/d on the antisymmetric part.
    for d in 2..=3 {
        let bound = 1.0 / (d as f64 + 1.0);
        assert!(zoo::isotropic(bound, &SpectrumPreserving::Transpose, d).is_ok());
        match zoo::isotropic(0.9, &SpectrumPreserving::Transpose, d) {
            Err(Error::NotCompletelyPositive { min_eigenvalue }) => {
                let expected = 0.1 / (d * d) as f64 - 0.9 / d as f64;
                assert!((min_eigenvalue - expected).abs() < 1e-12);
            }
            other => panic!("expected CP violation, got {other:?}"),
        }
    }
}

#[test]
fn zoo_is_cptp_unital_and_classified() {
    for d in 2..=3 {
        for (ch, reversible) in zoo_members(d, 40 + d as u64) {
            let v = classify(&ch, &ClassifyConfig::default()).unwrap();
            assert!(v.cptp_valid, "{}", ch.label());
            assert_eq!(v.reversible_cptp, reversible, "{}", ch.label());
            assert_eq!(is_reversible_cptp(&ch, 1e-9), reversible);
            if v.reversible_cptp {
                assert_eq!(v.linear_rank, d * d);
            }
            let is_mp = ch.label().starts_with("measure");
            if !is_mp {
                assert!(ch.is_unital(1e-10), "{}", ch.label());
            }
        }
    }
}

#[test]
fn reversibility_examples() {
    assert!(classify(&zoo::unitary(hadamard()).unwrap(), &ClassifyConfig::default()).unwrap().reversible_cptp);
    let dep = classify(&zoo::depolarizing(0.5, 2).unwrap(), &ClassifyConfig::default()).unwrap();
    assert!(dep.cptp_valid && dep.unital && !dep.reversible_cptp);
    assert!(dep.reversibility_deviation > 0.1);
    let dec = classify(&zoo::completely_decohering(&CMatrix::identity(3, 3)).unwrap(), &ClassifyConfig::default()).unwrap();
    assert!(!dec.reversible_cptp);
    assert_eq!(dec.linear_rank, 3);
}

#[test]
fn commutativity_probe_examples() {
    let mut rng = seeded_rng(12);
    for d in 2..=3 {
        let u = zoo::unitary(random_unitary(d, &mut rng)).unwrap();
        assert!(qcorr_core::channel::preserves_commutativity_probe(&u, 200, 1, 1e-9).preserves());
        let dec = zoo::completely_decohering(&random_unitary(d, &mut rng)).unwrap();
        assert!(qcorr_core::channel::preserves_commutativity_probe(&dec, 200, 1, 1e-9).preserves());
    }
    let generic = zoo::random(2, 2, 2, &mut rng).unwrap();
    match qcorr_core::channel::preserves_commutativity_probe(&generic, 200, 1, 1e-9) {
        ProbeVerdict::Violates(w) => {
            assert!(w.input_commutator <= 1e-12);
            let out = qcorr_core::linalg::commutator(&generic.apply_matrix(w.rho.matrix()), &generic.apply_matrix(w.sigma.matrix()));
            assert!((qcorr_core::linalg::max_abs(&out) - w.output_commutator).abs() < 1e-12);
            assert!(w.output_commutator > 1e-9);
        }
        other => panic!("expected violation, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn choi_and_superoperator_agree_with_oracles(din in 1usize..=3, dout in 1usize..=3, extra in 0usize..3, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let ch = zoo::random(din, dout, din.div_ceil(dout) + extra, &mut rng).unwrap();
        let choi = ch.choi_matrix();
        let sup = ch.superoperator_matrix();
        prop_assert!(max_diff(&choi, &choi_oracle(&ch)) < 1e-12);
        prop_assert!(max_diff(&sup, &superoperator_oracle(&ch)) < 1e-12);
        // reshuffle one into the other
        for a in 0..dout { for b in 0..dout { for i in 0..din { for j in 0..din {
            let lhs = sup[(b * dout + a, j * din + i)];
            let rhs = choi[(a * din + i, b * din + j)] * cplx(din as f64, 0.0);
            prop_assert!((lhs - rhs).norm() < 1e-12);
        }}}}
        let rho = random_density(din, din, seed ^ 1).unwrap();
        let v = qcorr_core::linalg::vec_columns(rho.matrix());
        let out = qcorr_core::linalg::unvec_columns(&(&sup * v), dout, dout);
        prop_assert!(max_diff(&out, ch.apply(&rho).unwrap().matrix()) < 1e-12);
    }

    #[test]
    fn choi_round_trip(din in 1usize..=3, dout in 1usize..=3, seed in any::<u64>()) {
        let ch = zoo::random(din, dout, din.div_ceil(dout) + 1, &mut seeded_rng(seed)).unwrap();
        let back = KrausChannel::from_choi(&ch.choi_matrix(), din, dout).unwrap();
        prop_assert!(max_diff(&back.superoperator_matrix(), &ch.superoperator_matrix()) < 1e-10);
    }

    #[test]
    fn choi_is_psd_with_maximally_mixed_input_marginal(d in 1usize..=3, seed in any::<u64>()) {
        let ch = zoo::random(d, d, 2, &mut seeded_rng(seed)).unwrap();
        let choi = ch.choi_matrix();
        prop_assert!(common::hermitian_spectrum(&choi)[0] > -1e-10);
        let reduced = common::trace_out_a(&choi, d, d);
        prop_assert!(max_diff(&reduced, &(CMatrix::identity(d, d) / cplx(d as f64, 0.0))) < 1e-12);
    }
}
