//! Verification suites. Each check compares library output against a value
//! computed here by a separate route (direct formulas, closed forms or
//! brute-force matrix arithmetic), never against the library itself.

use std::f64::consts::PI;

use phasekit::apps::{ck_single_query, deutsch_jozsa, grover, Ancilla, CkParams, DjClass};
use phasekit::gadget::{
    eigen_ancilla, j_gadget, j_gadget_matrix, optimality_check, phase_transform,
    phase_transform_initialized, phase_transform_mixed, GadgetPlan, GadgetVariant,
};
use phasekit::oracle::{
    apply_oracle, indicator_table, quantize, random_real_table, random_table, FunctionTable, Sign,
};
use phasekit::random::{derive_seed, random_density, random_state, random_state_on, rng};
use phasekit::spectral::*;
use phasekit::state::*;
use phasekit::{ANCILLA, CONTROL};
use rand::seq::index::sample;
use rand::Rng;

use crate::error::CliError;
use crate::report::{Case, Relation, Tolerances};

pub const SUITES: [&str; 7] = [
    "primitives",
    "gadget",
    "phase-transform",
    "mixed",
    "optimality",
    "apps",
    "all",
];

/// Shared state for one suite run.
pub struct Ctx {
    pub seed: u64,
    pub tol: Tolerances,
    /// Largest state vector (in amplitudes) any check allocated.
    pub peak_amplitudes: usize,
    cases: Vec<Case>,
    suite: &'static str,
}

impl Ctx {
    pub fn new(seed: u64, tol: Tolerances) -> Self {
        Ctx {
            seed,
            tol,
            peak_amplitudes: 0,
            cases: Vec::new(),
            suite: "",
        }
    }

    fn seed_for(&self, stream: u64) -> u64 {
        derive_seed(self.seed, stream)
    }

    fn touch(&mut self, amplitudes: usize) {
        self.peak_amplitudes = self.peak_amplitudes.max(amplitudes);
    }

    fn push(&mut self, case: Case) {
        self.cases.push(case);
    }

    fn at_most(&mut self, name: &str, measured: f64, bound: f64) -> &mut Case {
        self.cases.push(Case::new(
            self.suite,
            name,
            Relation::AtMost,
            measured,
            bound,
        ));
        self.cases.last_mut().expect("just pushed")
    }

    fn at_least(&mut self, name: &str, measured: f64, bound: f64) -> &mut Case {
        self.cases.push(Case::new(
            self.suite,
            name,
            Relation::AtLeast,
            measured,
            bound,
        ));
        self.cases.last_mut().expect("just pushed")
    }

    fn equal(&mut self, name: &str, measured: f64, expected: f64) -> &mut Case {
        self.cases.push(Case::new(
            self.suite,
            name,
            Relation::Equal,
            measured,
            expected,
        ));
        self.cases.last_mut().expect("just pushed")
    }

    pub fn into_cases(self) -> Vec<Case> {
        self.cases
    }
}

trait Params {
    fn with(&mut self, key: &str, value: impl Into<serde_json::Value>) -> &mut Self;
}

impl Params for Case {
    fn with(&mut self, key: &str, value: impl Into<serde_json::Value>) -> &mut Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }
}

type Outcome = Result<(), CliError>;

/// Runs `name` (or every suite for `all`) and returns its cases.
pub fn run_suite(name: &str, ctx: &mut Ctx) -> Outcome {
    match name {
        "primitives" => primitives(ctx),
        "gadget" => gadget(ctx),
        "phase-transform" => phase(ctx),
        "mixed" => mixed(ctx),
        "optimality" => optimality(ctx),
        "apps" => apps(ctx),
        "all" => {
            for s in &SUITES[..SUITES.len() - 1] {
                run_suite(s, ctx)?;
            }
            ctx.suite = "all";
            let budget = crate::bench::DEFAULT_BUDGET as f64;
            let peak = ctx.peak_amplitudes as f64;
            ctx.at_most("peak-amplitudes-within-budget", peak, budget);
            Ok(())
        }
        other => Err(CliError::Usage(format!(
            "unknown suite '{other}' (expected one of: {})",
            SUITES.join(", ")
        ))),
    }
}

/// Independent references written from the defining formulas.
pub mod reference {
    use super::*;

    pub fn cis_turns(turns: f64) -> C64 {
        C64::from_polar(1.0, 2.0 * PI * turns)
    }

    /// Multiplies each control block (most significant index) by
    /// `exp(2 pi i k f(x) / M)`.
    pub fn brute_force_phase(amps: &[C64], f: &FunctionTable, k: usize) -> Vec<C64> {
        let n = f.domain_size();
        let block = amps.len() / n;
        let m = f.modulus() as f64;
        amps.iter()
            .enumerate()
            .map(|(i, a)| a * cis_turns(((k * f.value(i / block)) as f64) / m))
            .collect()
    }

    pub fn grover_closed_form(n: usize, t: usize, j: usize) -> f64 {
        let theta = (t as f64 / n as f64).sqrt().asin();
        ((2 * j + 1) as f64 * theta).sin().powi(2)
    }

    /// `D_beta S_{f,gamma}` on the uniform state with exact phases, diffusion
    /// about the uniform vector.
    pub fn single_query_exact(marked: &[bool], gamma: f64, beta: f64) -> f64 {
        let n = marked.len();
        let u = 1.0 / (n as f64).sqrt();
        let v: Vec<C64> = marked
            .iter()
            .map(|&m| C64::from_polar(u, if m { gamma } else { 0.0 }))
            .collect();
        let overlap: C64 = v.iter().sum::<C64>() * u;
        let shift = C64::from_polar(1.0, beta) - 1.0;
        v.iter()
            .zip(marked)
            .filter(|(_, &m)| m)
            .map(|(a, _)| (a + shift * overlap * u).norm_sqr())
            .sum()
    }
}

use reference::*;

fn dense_max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn scalar_identity(m: usize, turns: f64) -> CMatrix {
    CMatrix::identity(m, m) * cis_turns(turns)
}

fn vec_max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn primitives(ctx: &mut Ctx) -> Outcome {
    ctx.suite = "primitives";
    let matrix = ctx.tol.get("matrix");
    let exact = ctx.tol.get("exact");

    for m in 1..=64usize {
        let values: Vec<i64> = if m <= 16 {
            (0..m as i64).collect()
        } else {
            let mut r = rng(ctx.seed_for(m as u64));
            let mut v = vec![0, 1, m as i64 / 2, m as i64 - 1];
            v.extend((0..4).map(|_| r.random_range(0..m as i64)));
            v
        };
        let mut worst = unitarity_residual(&fourier_matrix(m))
            .max(unitarity_residual(&fourier_inverse_matrix(m)));
        for &p in &values {
            for op in [
                translate_matrix(m, p),
                phase_by_value_matrix(m, p),
                reflect_phase_matrix(m, p),
            ] {
                worst = worst.max(unitarity_residual(&op));
            }
        }
        ctx.at_most("unitarity", worst, matrix)
            .with("M", m)
            .with("parameters_checked", values.len());
    }

    for m in [2usize, 4, 8, 16] {
        let f = fourier_matrix(m);
        let mut direct = CMatrix::zeros(m, m);
        for z in 0..m {
            for y in 0..m {
                direct[(z, y)] = cis_turns(((y * z) % m) as f64 / m as f64) / (m as f64).sqrt();
            }
        }
        ctx.at_most("fourier-entries", dense_max_diff(&f, &direct), exact)
            .with("M", m);

        let fd = f.adjoint();
        let (mut r_err, mut s_err, mut s_herm, mut s_inv) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for k in 0..m as i64 {
            let r = &fd * translate_matrix(m, -k) * &f;
            r_err = r_err.max(dense_max_diff(&r, &phase_by_value_matrix(m, k)));
            let s = &f * translate_matrix(m, -k) * &f;
            let built = reflect_phase_matrix(m, k);
            s_err = s_err.max(dense_max_diff(&s, &built));
            s_herm = s_herm.max(dense_max_diff(&built, &built.adjoint()));
            s_inv = s_inv.max(dense_max_diff(&(&built * &built), &CMatrix::identity(m, m)));
        }
        ctx.at_most("phase-by-value-from-fourier", r_err, matrix)
            .with("M", m);
        ctx.at_most("reflect-phase-from-fourier", s_err, matrix)
            .with("M", m);
        ctx.at_most("reflect-phase-hermitian", s_herm, matrix)
            .with("M", m);
        ctx.at_most("reflect-phase-involution", s_inv, matrix)
            .with("M", m);

        let (mut t_law, mut r_law) = (0.0f64, 0.0f64);
        for a in 0..m as i64 {
            for b in [-1i64, 1, m as i64 - 1, 3] {
                t_law = t_law.max(dense_max_diff(
                    &(translate_matrix(m, a) * translate_matrix(m, b)),
                    &translate_matrix(m, a + b),
                ));
                r_law = r_law.max(dense_max_diff(
                    &(phase_by_value_matrix(m, a) * phase_by_value_matrix(m, b)),
                    &phase_by_value_matrix(m, a + b),
                ));
            }
        }
        ctx.at_most("translate-group-law", t_law, matrix)
            .with("M", m);
        ctx.at_most("phase-group-law", r_law, matrix).with("M", m);

        let layout = RegisterLayout::new([("x", 3), ("s", m)])?;
        ctx.touch(3 * m);
        let s = random_state_on(&layout, ctx.seed_for(100 + m as u64));
        let mut fast = 0.0f64;
        for op in [
            PrimitiveOp::translate(m, 3)?,
            PrimitiveOp::phase_by_value(m, 5)?,
            PrimitiveOp::reflect_phase(m, 7)?,
        ] {
            let dense = s.apply_on_segment("s", &op.build())?;
            fast = fast.max(op.apply(&s, "s")?.max_abs_diff(&dense));
        }
        ctx.at_most("monomial-fast-path-vs-dense", fast, exact)
            .with("M", m);
    }

    let h = 1.0 / 2f64.sqrt();
    let sx = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    );
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
    let w = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(h, 0.0),
            C64::new(-h, 0.0),
        ],
    );
    ctx.at_most(
        "pauli-x-is-translate",
        dense_max_diff(&translate_matrix(2, 1), &sx),
        exact,
    );
    ctx.at_most(
        "pauli-z-is-phase",
        dense_max_diff(&phase_by_value_matrix(2, 1), &sz),
        exact,
    );
    ctx.at_most(
        "hadamard-is-fourier",
        dense_max_diff(&fourier_matrix(2), &w),
        exact,
    );
    Ok(())
}

fn gadget(ctx: &mut Ctx) -> Outcome {
    ctx.suite = "gadget";
    let matrix = ctx.tol.get("matrix");
    for m in [2usize, 4, 8, 16] {
        let mut per_variant = vec![0.0f64; GadgetVariant::ALL.len()];
        let mut pairwise = vec![vec![0.0f64; GadgetVariant::ALL.len()]; GadgetVariant::ALL.len()];
        let mut translations_ok = true;
        for k in 0..m as i64 {
            for z in 0..m as i64 {
                let target = scalar_identity(m, ((k * z) % m as i64) as f64 / m as f64);
                let mats: Vec<CMatrix> = GadgetVariant::ALL
                    .iter()
                    .map(|&v| j_gadget_matrix(&GadgetPlan::new(v, k, m).expect("valid plan"), z))
                    .collect();
                for (i, a) in mats.iter().enumerate() {
                    per_variant[i] = per_variant[i].max(dense_max_diff(a, &target));
                    for (j, b) in mats.iter().enumerate().skip(i + 1) {
                        pairwise[i][j] = pairwise[i][j].max(dense_max_diff(a, b));
                    }
                }
            }
        }
        for (i, v) in GadgetVariant::ALL.iter().enumerate() {
            ctx.at_most("gadget-equals-scalar", per_variant[i], matrix)
                .with("M", m)
                .with("variant", v.name());
            translations_ok &= v.translation_count() == 2;
        }
        for (i, a) in GadgetVariant::ALL.iter().enumerate() {
            for (j, b) in GadgetVariant::ALL.iter().enumerate().skip(i + 1) {
                ctx.at_most("variant-equivalence", pairwise[i][j], matrix)
                    .with("M", m)
                    .with("variants", format!("{}={}", a.name(), b.name()));
            }
        }
        ctx.equal(
            "two-translations-per-variant",
            translations_ok as u8 as f64,
            1.0,
        )
        .with("M", m);

        // live state with a spectator segment
        let layout = RegisterLayout::new([("spectator", 3), (ANCILLA, m)])?;
        ctx.touch(3 * m);
        let s = random_state_on(&layout, ctx.seed_for(200 + m as u64));
        let mut worst = 0.0f64;
        let mut counted = true;
        for v in GadgetVariant::ALL {
            for (k, z) in [(1i64, 1i64), (m as i64 - 1, 3), (3, m as i64 / 2)] {
                let out = j_gadget(&s, ANCILLA, &GadgetPlan::new(v, k, m)?, z)?;
                counted &= out.translations == 2;
                let expected: Vec<C64> = s
                    .amplitudes()
                    .iter()
                    .map(|a| a * cis_turns(((k * z) % m as i64) as f64 / m as f64))
                    .collect();
                worst = worst.max(vec_max_diff(out.state.amplitudes(), &expected));
            }
        }
        ctx.at_most("gadget-on-state", worst, matrix).with("M", m);
        ctx.equal("gadget-translation-counter", counted as u8 as f64, 1.0)
            .with("M", m);
    }
    Ok(())
}

fn phase(ctx: &mut Ctx) -> Outcome {
    ctx.suite = "phase-transform";
    let matrix = ctx.tol.get("matrix");
    let exact = ctx.tol.get("exact");
    let dims = [2usize, 4, 8];

    let mut amp_err = 0.0f64;
    let mut fidelity_min = f64::INFINITY;
    let mut calls_ok = 0usize;
    let instances = 100usize;
    for i in 0..instances {
        let seed = ctx.seed_for(1000 + i as u64);
        let mut r = rng(seed);
        let n = dims[r.random_range(0..3)];
        let m = dims[r.random_range(0..3)];
        let k = r.random_range(0..m as i64);
        let variant = GadgetVariant::ALL[i % GadgetVariant::ALL.len()];
        let f = random_table(n, m, derive_seed(seed, 1))?;
        let control = random_state_on(&RegisterLayout::single(CONTROL, n)?, derive_seed(seed, 2));
        let env = random_state_on(&RegisterLayout::single(ANCILLA, m)?, derive_seed(seed, 3));
        let input = control.tensor(&env)?;
        ctx.touch(input.len());
        let out = phase_transform(
            &input,
            CONTROL,
            ANCILLA,
            &f,
            &GadgetPlan::new(variant, k, m)?,
        )?;
        let expected = brute_force_phase(input.amplitudes(), &f, k as usize);
        amp_err = amp_err.max(vec_max_diff(out.state.amplitudes(), &expected));
        fidelity_min = fidelity_min.min(phasekit::gadget::restoration_fidelity(&out.state, &env)?);
        calls_ok += (out.oracle_calls == 2) as usize;
    }
    ctx.at_most("uninitialized-vs-brute-force", amp_err, matrix)
        .with("instances", instances);
    ctx.equal("two-oracle-calls", calls_ok as f64, instances as f64)
        .with("instances", instances);
    ctx.at_least(
        "ancilla-restoration-fidelity",
        fidelity_min,
        1.0 - ctx.tol.get("eigen"),
    )
    .with("instances", instances);

    // Pauli composite (I ⊗ sz) U_f (I ⊗ sz) U_f at M = 2
    let sz = phase_by_value_matrix(2, 1);
    let mut pauli = 0.0f64;
    for (i, n) in [2usize, 4, 8].into_iter().enumerate() {
        let seed = ctx.seed_for(2000 + i as u64);
        let f = random_table(n, 2, seed)?;
        let layout = RegisterLayout::new([(CONTROL, n), (ANCILLA, 2)])?;
        let s = random_state_on(&layout, derive_seed(seed, 1));
        let mut composed = apply_oracle(&s, CONTROL, ANCILLA, &f, Sign::Plus)?;
        composed = composed.apply_on_segment(ANCILLA, &sz)?;
        composed = apply_oracle(&composed, CONTROL, ANCILLA, &f, Sign::Plus)?;
        composed = composed.apply_on_segment(ANCILLA, &sz)?;
        let pt = phase_transform(
            &s,
            CONTROL,
            ANCILLA,
            &f,
            &GadgetPlan::new(GadgetVariant::SForm, 1, 2)?,
        )?;
        pauli = pauli.max(pt.state.max_abs_diff(&composed));
    }
    ctx.at_most("pauli-composite-matches", pauli, exact);

    // eigen-ancilla relation and the one-evaluation variant
    for m in [2usize, 4, 8, 16] {
        let mut worst = 0.0f64;
        for k in 0..m as i64 {
            let e = eigen_ancilla(m, k)?;
            for z in 0..m as i64 {
                let shifted = PrimitiveOp::translate(m, z)?.apply(&e, ANCILLA)?;
                let expected: Vec<C64> = e
                    .amplitudes()
                    .iter()
                    .map(|a| a * cis_turns(((k * z) % m as i64) as f64 / m as f64))
                    .collect();
                worst = worst.max(vec_max_diff(shifted.amplitudes(), &expected));
            }
        }
        ctx.at_most("eigen-ancilla-relation", worst, exact)
            .with("M", m);
    }
    let mut init_err = 0.0f64;
    let mut one_call = 0usize;
    for i in 0..20u64 {
        let seed = ctx.seed_for(3000 + i);
        let mut r = rng(seed);
        let n = dims[r.random_range(0..3)];
        let m = dims[r.random_range(0..3)];
        let k = r.random_range(0..m as i64);
        let f = random_table(n, m, derive_seed(seed, 1))?;
        let control = random_state_on(&RegisterLayout::single(CONTROL, n)?, derive_seed(seed, 2));
        let input = control.tensor(&eigen_ancilla(m, k)?)?;
        let one = phase_transform_initialized(&input, CONTROL, ANCILLA, &f, k)?;
        let two = phase_transform(
            &input,
            CONTROL,
            ANCILLA,
            &f,
            &GadgetPlan::new(GadgetVariant::CommA, k, m)?,
        )?;
        init_err = init_err.max(one.state.max_abs_diff(&two.state));
        one_call += (one.oracle_calls == 1) as usize;
    }
    ctx.at_most("initialized-matches-uninitialized", init_err, matrix)
        .with("instances", 20);
    ctx.equal("one-oracle-call", one_call as f64, 20.0)
        .with("instances", 20);
    Ok(())
}

fn mixed(ctx: &mut Ctx) -> Outcome {
    ctx.suite = "mixed";
    let eigen = ctx.tol.get("eigen");
    for i in 0..25u64 {
        let seed = ctx.seed_for(4000 + i);
        let mut r = rng(seed);
        let m = [2usize, 4][(i % 2) as usize];
        let rank = 1 + r.random_range(0..m);
        let n = [2usize, 4][r.random_range(0..2)];
        let k = r.random_range(0..m as i64);
        let variant = GadgetVariant::ALL[(i as usize) % GadgetVariant::ALL.len()];
        let rho = random_density(m, rank, derive_seed(seed, 1))?;
        let f = random_table(n, m, derive_seed(seed, 2))?;
        let control = random_state_on(&RegisterLayout::single(CONTROL, n)?, derive_seed(seed, 3));
        let plan = GadgetPlan::new(variant, k, m)?;
        let (out, report) = phase_transform_mixed(&control, &rho, &f, &plan)?;
        ctx.touch(out.len());

        // expected joint: brute-force phase on control ⊗ the same purification
        let env = purify(&rho)?.joint;
        let input = control.tensor(&env)?;
        let expected = brute_force_phase(input.amplitudes(), &f, k as usize);
        let joint = vec_max_diff(out.amplitudes(), &expected);
        let anc = partial_trace(&out, ANCILLA)?;
        let anc_err = dense_max_diff(anc.matrix(), rho.matrix());
        let mi_delta = (mutual_information_between(&out, ANCILLA, phasekit::REFERENCE)?
            - mutual_information(&env, (ANCILLA, phasekit::REFERENCE))?)
        .abs();
        for (name, value) in [
            ("joint-state", joint),
            ("reduced-ancilla", anc_err),
            ("mutual-information-unchanged", mi_delta),
        ] {
            ctx.at_most(name, value, eigen)
                .with("instance", i)
                .with("M", m)
                .with("N", n)
                .with("rank", rank)
                .with("variant", variant.name());
        }
        ctx.equal("two-oracle-calls", report.oracle_calls as f64, 2.0)
            .with("instance", i);
    }
    Ok(())
}

fn optimality(ctx: &mut Ctx) -> Outcome {
    ctx.suite = "optimality";
    let distinct = ctx.tol.get("distinct");
    let matrix = ctx.tol.get("matrix");
    for m in 2..=16usize {
        for k in 1..m as i64 {
            let report = optimality_check(m, k)?;
            let mut case = Case::new(
                ctx.suite,
                "candidates-pairwise-distinct",
                Relation::Above,
                report.min_separation(),
                distinct,
            )
            .param("M", m)
            .param("k", k)
            .param("demonstration", report.demonstration);
            for s in &report.per_sign {
                let key = if s.sign > 0 { "plus" } else { "minus" };
                case = case
                    .param(&format!("min_separation_{key}"), s.min_separation)
                    .param(&format!("pairs_{key}"), s.pairs);
            }
            ctx.push(case);
            let residual = report
                .per_sign
                .iter()
                .map(|s| s.max_identity_residual)
                .fold(0.0, f64::max);
            ctx.at_most("candidate-inverts-translation", residual, matrix)
                .with("M", m)
                .with("k", k);
        }
    }
    Ok(())
}

fn balanced_tables_n4() -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 0u32..16 {
        if mask.count_ones() == 2 {
            out.push((0..4).map(|x| ((mask >> x) & 1) as usize).collect());
        }
    }
    out
}

fn random_marked(n: usize, t: usize, seed: u64) -> Result<FunctionTable, CliError> {
    let marked: Vec<usize> = sample(&mut rng(seed), n, t).into_vec();
    Ok(indicator_table(n, &marked)?)
}

fn apps(ctx: &mut Ctx) -> Outcome {
    ctx.suite = "apps";
    let eigen = ctx.tol.get("eigen");
    let matrix = ctx.tol.get("matrix");

    // Deutsch-Jozsa, N = 4, every constant and balanced table
    let mut tables: Vec<(Vec<usize>, DjClass)> = vec![
        (vec![0; 4], DjClass::Constant),
        (vec![1; 4], DjClass::Constant),
    ];
    tables.extend(
        balanced_tables_n4()
            .into_iter()
            .map(|t| (t, DjClass::Balanced)),
    );
    for (ti, (values, class)) in tables.iter().enumerate() {
        let f = FunctionTable::new(2, values.clone())?;
        let expected_p0 = if *class == DjClass::Constant {
            1.0
        } else {
            0.0
        };
        let mut ancillas = Vec::new();
        for j in 0..10u64 {
            ancillas.push(Ancilla::Random {
                seed: ctx.seed_for(5000 + 100 * ti as u64 + j),
            });
        }
        for j in 0..3u64 {
            let seed = ctx.seed_for(6000 + 100 * ti as u64 + j);
            ancillas.push(Ancilla::Mixed(random_density(
                2,
                1 + (j as usize % 2),
                seed,
            )?));
        }
        let mut p0_err = 0.0f64;
        let mut verdicts = 0usize;
        let mut spread = 0.0f64;
        let mut fidelity = f64::INFINITY;
        let mut first: Option<Vec<f64>> = None;
        for (j, a) in ancillas.iter().enumerate() {
            let v = deutsch_jozsa(&f, a, GadgetVariant::ALL[j % GadgetVariant::ALL.len()])?;
            p0_err = p0_err.max((v.p_zero - expected_p0).abs());
            verdicts += (v.verdict == *class) as usize;
            fidelity = fidelity.min(v.ancilla_restoration_fidelity);
            match &first {
                None => first = Some(v.outcome_distribution.clone()),
                Some(d) => {
                    let diff = d
                        .iter()
                        .zip(&v.outcome_distribution)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max);
                    spread = spread.max(diff);
                }
            }
        }
        let label = values.iter().map(|v| v.to_string()).collect::<String>();
        ctx.at_most("dj-p-zero", p0_err, eigen)
            .with("table", label.clone())
            .with("ancillas", ancillas.len());
        ctx.equal("dj-verdict", verdicts as f64, ancillas.len() as f64)
            .with("table", label.clone());
        ctx.at_most("dj-ancilla-independent", spread, matrix)
            .with("table", label.clone());
        ctx.at_least("dj-restoration-fidelity", fidelity, 1.0 - eigen)
            .with("table", label);
    }

    // Grover against the closed form
    for n in [4usize, 8, 16, 64] {
        let mut ts = vec![1, n / 4, n / 2];
        ts.dedup();
        for t in ts {
            let f = random_marked(n, t, ctx.seed_for(7000 + (n * 100 + t) as u64))?;
            let mut worst = 0.0f64;
            let mut fidelity = f64::INFINITY;
            for j in 0..=5usize {
                let anc = Ancilla::Random {
                    seed: ctx.seed_for(7500 + (n * 100 + t * 10 + j) as u64),
                };
                let res = grover(
                    &f,
                    j,
                    &anc,
                    GadgetVariant::ALL[j % GadgetVariant::ALL.len()],
                )?;
                ctx.touch(2 * n);
                worst = worst.max((res.success_probability - grover_closed_form(n, t, j)).abs());
                fidelity = fidelity.min(res.ancilla_restoration_fidelity);
            }
            ctx.at_most("grover-closed-form", worst, eigen)
                .with("N", n)
                .with("t", t)
                .with("max_iterations", 5);
            ctx.at_least("grover-restoration-fidelity", fidelity, 1.0 - eigen)
                .with("N", n)
                .with("t", t);
        }
    }
    let f = indicator_table(4, &[2])?;
    let res = grover(
        &f,
        1,
        &Ancilla::Random {
            seed: ctx.seed_for(7999),
        },
        GadgetVariant::CommA,
    )?;
    ctx.at_least(
        "grover-n4-one-iteration",
        res.success_probability,
        1.0 - eigen,
    );

    // single-query search
    let quantized = ctx.tol.get("quantized");
    for n in [4usize, 8, 16] {
        let t = n / 4;
        let f = random_marked(n, t, ctx.seed_for(8000 + n as u64))?;
        let marked: Vec<bool> = f.values().iter().map(|&v| v != 0).collect();
        let anc = Ancilla::Random {
            seed: ctx.seed_for(8100 + n as u64),
        };
        for (gamma, beta, label) in [(PI, PI, "pi"), (2.0 * PI / 3.0, 2.0 * PI / 3.0, "2pi/3")] {
            let exact = single_query_exact(&marked, gamma, beta);
            let params = CkParams {
                gamma,
                beta,
                pivot: 0,
            };
            let res = ck_single_query(&f, &params, 4, &anc, GadgetVariant::CommB)?;
            ctx.touch(n * 16);
            ctx.at_most(
                "ck-quantized-vs-exact",
                (res.success_probability - exact).abs(),
                quantized,
            )
            .with("N", n)
            .with("t", t)
            .with("angles", label)
            .with("mbits", 4);
            ctx.at_least(
                "ck-restoration-fidelity",
                res.ancilla_restoration_fidelity,
                1.0 - eigen,
            )
            .with("N", n)
            .with("angles", label);
            if label == "pi" {
                ctx.at_least("ck-quarter-success", exact, 1.0 - eigen)
                    .with("N", n)
                    .with("t", t)
                    .with("phases", "exact");
                let fine = ck_single_query(&f, &params, 1, &anc, GadgetVariant::SForm)?;
                ctx.at_least("ck-quarter-success", fine.success_probability, 1.0 - eigen)
                    .with("N", n)
                    .with("t", t)
                    .with("phases", "phase-transform");
            }
        }
    }

    // m-bit approximation bound, no tolerance
    for bits in 1..=10u32 {
        let mut worst = 0.0f64;
        for rep in 0..4u64 {
            let rf = random_real_table(64, ctx.seed_for(9000 + 10 * bits as u64 + rep))?;
            let q = quantize(&rf, bits)?;
            let m = q.modulus();
            for (x, &v) in rf.values().iter().enumerate() {
                let err = (omega(m, q.value(x) as i64) - cis_turns(v)).norm();
                worst = worst.max(err);
            }
        }
        ctx.at_most(
            "quantization-bound",
            worst,
            2.0 * PI / (1u64 << bits) as f64,
        )
        .with("mbits", bits);
    }

    // the random pure states used above are genuinely not eigenstates
    let anc = random_state(2, ctx.seed_for(9999))?;
    let p = PrimitiveOp::translate(2, 1)?.apply(&anc, ANCILLA)?;
    let overlap = p.inner(&anc).norm();
    ctx.at_most("random-ancilla-is-not-an-eigenvector", overlap, 1.0 - 1e-6);
    Ok(())
}
