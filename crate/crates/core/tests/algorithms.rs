//! Gadget, phase-transform and application checks against brute-force
//! references computed directly in this file.

use std::f64::consts::PI;

use phasekit::apps::*;
use phasekit::gadget::*;
use phasekit::oracle::{indicator_table, random_table, FunctionTable};
use phasekit::random::{derive_seed, random_density, random_state, random_state_on};
use phasekit::spectral::{omega, PrimitiveOp};
use phasekit::state::*;
use phasekit::{ANCILLA, CONTROL};
use proptest::prelude::*;

fn cis(turns: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * turns)
}

/// `(diag(w^{k f(x)}) |phi>) ⊗ env` by direct multiplication.
fn brute_force_phase(
    phi: &StateVector,
    env: &StateVector,
    f: &FunctionTable,
    k: usize,
) -> Vec<C64> {
    let m = f.modulus() as f64;
    let mut out = Vec::with_capacity(phi.len() * env.len());
    for (x, a) in phi.amplitudes().iter().enumerate() {
        let phase = cis((k * f.value(x)) as f64 / m);
        for b in env.amplitudes() {
            out.push(phase * a * b);
        }
    }
    out
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn control_state(n: usize, seed: u64) -> StateVector {
    random_state_on(&RegisterLayout::single(CONTROL, n).unwrap(), seed)
}

#[test]
fn every_variant_equals_scalar_phase() {
    for m in [2usize, 4, 8, 16] {
        for k in 0..m as i64 {
            for z in 0..m as i64 {
                let target = CMatrix::identity(m, m) * cis((k * z) as f64 / m as f64);
                let mats: Vec<CMatrix> = GadgetVariant::ALL
                    .iter()
                    .map(|&v| j_gadget_matrix(&GadgetPlan::new(v, k, m).unwrap(), z))
                    .collect();
                for (v, mat) in GadgetVariant::ALL.iter().zip(&mats) {
                    assert!(max_abs_diff(mat, &target) < 1e-10, "{v} M={m} k={k} z={z}");
                }
                for a in &mats {
                    for b in &mats {
                        assert!(max_abs_diff(a, b) < 1e-10);
                    }
                }
            }
        }
    }
}

#[test]
fn j_gadget_live_state_matches_dense_phase() {
    for m in [3usize, 4, 8] {
        let s = random_state(m, m as u64).unwrap();
        for v in GadgetVariant::ALL {
            for z in 0..m as i64 {
                let plan = GadgetPlan::new(v, 1, m).unwrap();
                let out = j_gadget(&s, ANCILLA, &plan, z).unwrap();
                assert_eq!(out.translations, 2);
                let want = s.with_global_phase(cis(z as f64 / m as f64)).unwrap();
                assert!(out.state.max_abs_diff(&want) < 1e-12);
            }
        }
    }
}

#[test]
fn uninitialized_phase_transform_hundred_instances() {
    let dims = [2usize, 4, 8];
    for i in 0..100u64 {
        let seed = derive_seed(2024, i);
        let n = dims[(seed % 3) as usize];
        let m = dims[((seed >> 8) % 3) as usize];
        let k = ((seed >> 16) % m as u64) as usize;
        let variant = GadgetVariant::ALL[((seed >> 24) % 5) as usize];
        let f = random_table(n, m, seed ^ 1).unwrap();
        let phi = control_state(n, seed ^ 2);
        let psi = random_state(m, seed ^ 3).unwrap();
        let joint = phi.tensor(&psi).unwrap();
        let out = phase_transform(
            &joint,
            CONTROL,
            ANCILLA,
            &f,
            &GadgetPlan::new(variant, k as i64, m).unwrap(),
        )
        .unwrap();
        assert_eq!(out.oracle_calls, 2);
        let want = brute_force_phase(&phi, &psi, &f, k);
        assert!(
            max_diff(out.state.amplitudes(), &want) < 1e-10,
            "instance {i}"
        );
        let anc_in = partial_trace(&joint, ANCILLA).unwrap();
        let anc_out = partial_trace(&out.state, ANCILLA).unwrap();
        assert!(anc_in.max_abs_diff(&anc_out) < 1e-10);
    }
}

#[test]
fn extra_segments_are_untouched() {
    // ancilla entangled with a reference that sits between control and ancilla
    let layout = RegisterLayout::new([("ref", 3), (CONTROL, 4), (ANCILLA, 4)]).unwrap();
    let s = random_state_on(&layout, 5);
    let f = random_table(4, 4, 5).unwrap();
    let out = phase_transform(
        &s,
        CONTROL,
        ANCILLA,
        &f,
        &GadgetPlan::new(GadgetVariant::CommD, 3, 4).unwrap(),
    )
    .unwrap();
    for (i, (a, b)) in s
        .amplitudes()
        .iter()
        .zip(out.state.amplitudes())
        .enumerate()
    {
        let x = layout.values_of(i)[1];
        let want = a * cis((3 * f.value(x)) as f64 / 4.0);
        assert!((b - want).norm() < 1e-12);
    }
}

#[test]
fn mixed_ancilla_twenty_five_instances() {
    for i in 0..25u64 {
        let seed = derive_seed(7, i);
        let m = [2usize, 4][(i % 2) as usize];
        let rank = 1 + (seed % m as u64) as usize;
        let rho = random_density(m, rank, seed).unwrap();
        let phi = control_state(4, seed ^ 5);
        let f = random_table(4, m, seed ^ 6).unwrap();
        let k = 1 + ((seed >> 8) % (m as u64 - 1)) as i64;
        let plan = GadgetPlan::new(GadgetVariant::ALL[(i % 5) as usize], k, m).unwrap();
        let (out, report) = phase_transform_mixed(&phi, &rho, &f, &plan).unwrap();
        assert_eq!(report.rank, rank);
        let env = purify(&rho).unwrap().joint;
        let want = brute_force_phase(&phi, &env, &f, plan.k());
        assert!(max_diff(out.amplitudes(), &want) < 1e-9, "instance {i}");
        assert!(partial_trace(&out, ANCILLA).unwrap().max_abs_diff(&rho) < 1e-9);
        assert!(report.restored);
        assert!((report.mutual_information_after - report.mutual_information_before).abs() < 1e-9);
    }
}

#[test]
fn pauli_scheme_matches_phase_transform() {
    // (I ⊗ sz) U_f (I ⊗ sz) U_f, composed by hand from oracle and dense sz
    let sz = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ],
    );
    for seed in 0..10u64 {
        let f = random_table(8, 2, seed).unwrap();
        let joint = control_state(8, seed)
            .tensor(&random_state(2, seed + 100).unwrap())
            .unwrap();
        let mut s = phasekit::oracle::apply_oracle(
            &joint,
            CONTROL,
            ANCILLA,
            &f,
            phasekit::oracle::Sign::Plus,
        )
        .unwrap();
        s = s.apply_on_segment(ANCILLA, &sz).unwrap();
        s = phasekit::oracle::apply_oracle(&s, CONTROL, ANCILLA, &f, phasekit::oracle::Sign::Plus)
            .unwrap();
        s = s.apply_on_segment(ANCILLA, &sz).unwrap();
        let out = phase_transform(
            &joint,
            CONTROL,
            ANCILLA,
            &f,
            &GadgetPlan::new(GadgetVariant::SForm, 1, 2).unwrap(),
        )
        .unwrap();
        assert!(s.max_abs_diff(&out.state) < 1e-12);
    }
}

#[test]
fn eigen_relation_and_initialized_variant() {
    for m in [2usize, 4, 8, 16] {
        for k in 0..m as i64 {
            let psi = eigen_ancilla(m, k).unwrap();
            for z in 0..m as i64 {
                let shifted = PrimitiveOp::translate(m, z)
                    .unwrap()
                    .apply(&psi, ANCILLA)
                    .unwrap();
                let want: Vec<C64> = psi
                    .amplitudes()
                    .iter()
                    .map(|a| a * cis((k * z) as f64 / m as f64))
                    .collect();
                assert!(max_diff(shifted.amplitudes(), &want) < 1e-12);
            }
        }
    }
    for i in 0..20u64 {
        let m = [2usize, 4, 8][(i % 3) as usize];
        let n = [2usize, 4, 8][((i / 3) % 3) as usize];
        let k = (i as usize * 7 + 1) % m;
        let f = random_table(n, m, i).unwrap();
        let phi = control_state(n, i + 50);
        let psi = eigen_ancilla(m, k as i64).unwrap();
        let joint = phi.tensor(&psi).unwrap();
        let one = phase_transform_initialized(&joint, CONTROL, ANCILLA, &f, k as i64).unwrap();
        let two = phase_transform(
            &joint,
            CONTROL,
            ANCILLA,
            &f,
            &GadgetPlan::new(GadgetVariant::CommA, k as i64, m).unwrap(),
        )
        .unwrap();
        assert_eq!(one.oracle_calls, 1);
        assert!(one.state.max_abs_diff(&two.state) < 1e-10);
    }
}

#[test]
fn optimality_for_all_small_moduli() {
    for m in 2..=16usize {
        for k in 1..m as i64 {
            let r = optimality_check(m, k).unwrap();
            assert!(r.passes(), "M={m} k={k}");
            assert!(r.min_separation() > 1e-6);
            assert_eq!(r.per_sign.len(), 2);
            assert!(r.per_sign.iter().all(|s| s.pairs == m * (m - 1) / 2));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn phase_transform_group_property(
        n in prop_oneof![Just(2usize), Just(4), Just(8)],
        m in prop_oneof![Just(2usize), Just(4), Just(8)],
        k1 in 0i64..16, k2 in 0i64..16, seed in any::<u64>(),
    ) {
        let f = random_table(n, m, seed).unwrap();
        let joint = control_state(n, seed ^ 9).tensor(&random_state(m, seed ^ 10).unwrap()).unwrap();
        let plan = |k| GadgetPlan::new(GadgetVariant::CommA, k, m).unwrap();
        let a = phase_transform(&joint, CONTROL, ANCILLA, &f, &plan(k1)).unwrap().state;
        let ab = phase_transform(&a, CONTROL, ANCILLA, &f, &plan(k2)).unwrap().state;
        let sum = phase_transform(&joint, CONTROL, ANCILLA, &f, &plan(k1 + k2)).unwrap().state;
        prop_assert!(ab.max_abs_diff(&sum) < 1e-10);
    }

    #[test]
    fn inverse_plan_undoes_transform(seed in any::<u64>(), v in 0usize..5) {
        let f = random_table(4, 8, seed).unwrap();
        let joint = control_state(4, seed ^ 1).tensor(&random_state(8, seed ^ 2).unwrap()).unwrap();
        let plan = GadgetPlan::new(GadgetVariant::ALL[v], 3, 8).unwrap();
        let there = phase_transform(&joint, CONTROL, ANCILLA, &f, &plan).unwrap().state;
        let back = phase_transform(&there, CONTROL, ANCILLA, &f, &plan.inverse()).unwrap().state;
        prop_assert!(back.max_abs_diff(&joint) < 1e-10);
    }
}

fn balanced_tables_n4() -> Vec<FunctionTable> {
    let mut out = Vec::new();
    for mask in 0u32..16 {
        if mask.count_ones() == 2 {
            out.push(
                FunctionTable::new(2, (0..4).map(|x| ((mask >> x) & 1) as usize).collect())
                    .unwrap(),
            );
        }
    }
    out
}

#[test]
fn deutsch_jozsa_exhaustive_n4() {
    let balanced = balanced_tables_n4();
    assert_eq!(balanced.len(), 6);
    let mut tables: Vec<(FunctionTable, DjClass)> = balanced
        .into_iter()
        .map(|t| (t, DjClass::Balanced))
        .collect();
    tables.push((FunctionTable::constant(4, 2, 0).unwrap(), DjClass::Constant));
    tables.push((FunctionTable::constant(4, 2, 1).unwrap(), DjClass::Constant));

    for (t_idx, (f, expected)) in tables.iter().enumerate() {
        let mut ancillas: Vec<Ancilla> = (0..10)
            .map(|i| Ancilla::Random { seed: 1000 + i })
            .collect();
        for r in 0..3u64 {
            ancillas.push(Ancilla::Mixed(
                random_density(2, 1 + (r as usize % 2), 77 + r).unwrap(),
            ));
        }
        let first = deutsch_jozsa(f, &ancillas[0], GadgetVariant::CommA).unwrap();
        for anc in &ancillas {
            let v = deutsch_jozsa(f, anc, GadgetVariant::CommA).unwrap();
            assert_eq!(v.verdict, *expected, "table {t_idx}");
            let exact = v.p_zero.abs() < 1e-9 || (v.p_zero - 1.0).abs() < 1e-9;
            assert!(exact);
            assert_eq!(v.oracle_calls, 2 * v.phase_transforms);
            assert!(v.ancilla_restoration_fidelity >= 1.0 - 1e-9);
            for (p, q) in v
                .outcome_distribution
                .iter()
                .zip(&first.outcome_distribution)
            {
                assert!((p - q).abs() < 1e-10);
            }
        }
    }
}

fn grover_closed_form(n: usize, t: usize, j: usize) -> f64 {
    let theta = (t as f64 / n as f64).sqrt().asin();
    ((2 * j + 1) as f64 * theta).sin().powi(2)
}

#[test]
fn grover_matches_closed_form() {
    for n in [4usize, 8, 16, 32, 64] {
        for t in [1, n / 4, n / 2] {
            let marked: Vec<usize> = (0..t).map(|i| (i * 7 + 3) % n).collect();
            let f = indicator_table(n, &marked).unwrap();
            assert_eq!(f.support_size(), t, "collision in marked set for N={n}");
            for j in 0..=5 {
                let r = grover(
                    &f,
                    j,
                    &Ancilla::Random { seed: j as u64 },
                    GadgetVariant::CommA,
                )
                .unwrap();
                let want = grover_closed_form(n, t, j);
                assert!(
                    (r.success_probability - want).abs() < 1e-9,
                    "N={n} t={t} j={j}"
                );
                assert_eq!(r.oracle_calls, 2 * r.phase_transforms);
                assert_eq!(r.phase_transforms, 2 * j);
            }
        }
    }
}

/// Exact-phase single-query search: `e^{i gamma f}` and the diffusion
/// `I + (e^{i beta} - 1)|s><s|` applied directly to the uniform state.
fn ck_exact(f: &FunctionTable, gamma: f64, beta: f64) -> f64 {
    let n = f.domain_size();
    let amp = 1.0 / (n as f64).sqrt();
    let v: Vec<C64> = (0..n)
        .map(|x| C64::from_polar(amp, gamma * f.value(x) as f64))
        .collect();
    let overlap: C64 = v.iter().map(|a| a * amp).sum();
    let factor = C64::from_polar(1.0, beta) - 1.0;
    (0..n)
        .filter(|&x| f.value(x) == 1)
        .map(|x| (v[x] + factor * overlap * amp).norm_sqr())
        .sum()
}

#[test]
fn single_query_quarter_claim() {
    for n in [4usize, 8, 16] {
        let t = n / 4;
        let marked: Vec<usize> = (0..t).map(|i| (i * 5 + 1) % n).collect();
        let f = indicator_table(n, &marked).unwrap();
        let exact = ck_exact(&f, PI, PI);
        assert!((exact - 1.0).abs() < 1e-12);
        for bits in [1u32, 4] {
            let r = ck_single_query(
                &f,
                &CkParams::default(),
                bits,
                &Ancilla::Random { seed: 4 },
                GadgetVariant::CommA,
            )
            .unwrap();
            assert!(
                (r.success_probability - 1.0).abs() < 1e-9,
                "N={n} bits={bits}"
            );
            assert!((r.success_probability - exact).abs() < 0.05);
            assert_eq!(r.f_evaluations, 2);
            assert_eq!(r.oracle_calls, 2 * r.phase_transforms);
        }
    }
}

#[test]
fn single_query_quantization_error_is_bounded() {
    // each quantized phase differs from the exact one by at most 2 pi 2^-m in
    // operator norm, so the success probability moves by at most 4 * 2 pi 2^-m
    for (i, (gamma, beta)) in [(2.0, 1.3), (0.7, 2.9), (5.5, 4.0), (PI / 3.0, PI)]
        .into_iter()
        .enumerate()
    {
        let f = indicator_table(8, &[1, 4, 6]).unwrap();
        let exact = ck_exact(&f, gamma, beta);
        for bits in 1..=8u32 {
            let params = CkParams {
                gamma,
                beta,
                pivot: 0,
            };
            let r = ck_single_query(
                &f,
                &params,
                bits,
                &Ancilla::Random { seed: i as u64 },
                GadgetVariant::CommB,
            )
            .unwrap();
            let bound = 4.0 * 2.0 * PI / (1u64 << bits) as f64;
            assert!(
                (r.success_probability - exact).abs() <= bound,
                "gamma={gamma} beta={beta} bits={bits}"
            );
        }
    }
}

#[test]
fn omega_agrees_with_reference_phase() {
    let f = random_table(6, 5, 3).unwrap();
    let phi = control_state(6, 3);
    let out = reference_phase(&phi, CONTROL, &f, 2).unwrap();
    for x in 0..6 {
        let want = phi.amplitudes()[x] * omega(5, 2 * f.value(x) as i64);
        assert!((out.amplitudes()[x] - want).norm() < 1e-15);
    }
}
