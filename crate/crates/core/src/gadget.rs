//! The `J_{k,z}` gadget and the phase transform built on it.
//!
//! `J_{k,z} = w^{kz} I` is realized as a four-step sequence of translations
//! and phase operators on the ancilla. Replacing each translation `T_{±z}`
//! by the oracle `U_{±f}` turns the gadget into the phase transform
//! `R_{k,f}` on the control register, with the ancilla returned to its
//! input state whatever that state was.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{apply_oracle, FunctionTable, Sign};
use crate::spectral::{omega, reduce, translate_matrix, PrimitiveOp};
use crate::state::{
    max_abs_diff, mutual_information, mutual_information_between, partial_trace, purify, CMatrix,
    DensityOperator, StateVector, C64,
};
use crate::{tol, ANCILLA, REFERENCE};

/// The five equivalent realizations of `J_{k,z}`.
///
/// With `[A,B] = A B A^-1 B^-1`, `R = R_{k,I}` and `T = T_z`:
/// `CommA = [R^†,T^†]`, `CommB = [T,R^†]`, `CommC = [R,T]`, `CommD = [T^†,R]`,
/// `SForm = S T S T` with `S = S_{k,I}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GadgetVariant {
    CommA,
    CommB,
    CommC,
    CommD,
    SForm,
}

/// One factor of a gadget sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GadgetStep {
    /// `T_{±z}`; becomes `U_{±f}` inside the phase transform.
    Translate(Sign),
    /// `R_{±k,I}`.
    Phase(Sign),
    /// `S_{k,I}`.
    Reflect,
}

impl GadgetVariant {
    pub const ALL: [GadgetVariant; 5] = [
        GadgetVariant::CommA,
        GadgetVariant::CommB,
        GadgetVariant::CommC,
        GadgetVariant::CommD,
        GadgetVariant::SForm,
    ];

    /// Factors in application order (rightmost matrix factor first).
    pub fn steps(self) -> [GadgetStep; 4] {
        use GadgetStep::*;
        use Sign::*;
        match self {
            GadgetVariant::CommA => [Translate(Plus), Phase(Plus), Translate(Minus), Phase(Minus)],
            GadgetVariant::CommB => [Phase(Plus), Translate(Minus), Phase(Minus), Translate(Plus)],
            GadgetVariant::CommC => [Translate(Minus), Phase(Minus), Translate(Plus), Phase(Plus)],
            GadgetVariant::CommD => [Phase(Minus), Translate(Plus), Phase(Plus), Translate(Minus)],
            GadgetVariant::SForm => [Translate(Plus), Reflect, Translate(Plus), Reflect],
        }
    }

    pub fn translation_count(self) -> usize {
        self.steps()
            .iter()
            .filter(|s| matches!(s, GadgetStep::Translate(_)))
            .count()
    }

    pub fn name(self) -> &'static str {
        match self {
            GadgetVariant::CommA => "comm-a",
            GadgetVariant::CommB => "comm-b",
            GadgetVariant::CommC => "comm-c",
            GadgetVariant::CommD => "comm-d",
            GadgetVariant::SForm => "sform",
        }
    }
}

impl fmt::Display for GadgetVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GadgetVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GadgetVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::domain(format!(
                    "unknown gadget variant '{s}' (expected comm-a, comm-b, comm-c, comm-d or sform)"
                ))
            })
    }
}

/// Variant plus the phase multiplier `k`, reduced into `0..M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GadgetPlan {
    pub variant: GadgetVariant,
    k: usize,
    modulus: usize,
}

impl GadgetPlan {
    pub fn new(variant: GadgetVariant, k: i64, modulus: usize) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::domain("modulus must be positive"));
        }
        Ok(GadgetPlan {
            variant,
            k: reduce(k, modulus),
            modulus,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// Same variant with `k -> -k`, realizing `J_{k,z}^†`.
    pub fn inverse(&self) -> GadgetPlan {
        GadgetPlan {
            k: (self.modulus - self.k) % self.modulus,
            ..*self
        }
    }

    fn ancilla_op(&self, step: GadgetStep, z: i64) -> Result<PrimitiveOp> {
        let k = self.k as i64;
        match step {
            GadgetStep::Translate(s) => PrimitiveOp::translate(self.modulus, s.value() * z),
            GadgetStep::Phase(s) => PrimitiveOp::phase_by_value(self.modulus, s.value() * k),
            GadgetStep::Reflect => PrimitiveOp::reflect_phase(self.modulus, k),
        }
    }
}

/// State after a gadget run, with the number of `T_{±z}` applications.
#[derive(Debug, Clone, PartialEq)]
pub struct GadgetOutcome {
    pub state: StateVector,
    pub translations: usize,
}

/// Runs the gadget on `segment`; the result is `w^{kz}` times the input.
pub fn j_gadget(
    state: &StateVector,
    segment: &str,
    plan: &GadgetPlan,
    z: i64,
) -> Result<GadgetOutcome> {
    let dim = state.layout().dim_of(segment)?;
    if dim != plan.modulus {
        return Err(Error::domain(format!(
            "gadget modulus {} on segment '{segment}' of dimension {dim}",
            plan.modulus
        )));
    }
    let mut current = state.clone();
    let mut translations = 0;
    for step in plan.variant.steps() {
        if matches!(step, GadgetStep::Translate(_)) {
            translations += 1;
        }
        current = plan.ancilla_op(step, z)?.apply(&current, segment)?;
    }
    Ok(GadgetOutcome {
        state: current,
        translations,
    })
}

/// Dense product of the variant's four factors.
pub fn j_gadget_matrix(plan: &GadgetPlan, z: i64) -> CMatrix {
    let m = plan.modulus;
    plan.variant
        .steps()
        .iter()
        .fold(CMatrix::identity(m, m), |acc, &step| {
            let op = plan.ancilla_op(step, z).expect("plan modulus is positive");
            op.build() * acc
        })
}

/// State after a phase transform, with the number of oracle applications.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOutcome {
    pub state: StateVector,
    pub oracle_calls: usize,
}

/// `R_{k,f}` on `control` without initializing `ancilla`.
///
/// Runs the plan's gadget sequence with each `T_{±z}` replaced by `U_{±f}`.
/// For every control value `x` the ancilla sees `J_{k,f(x)} = w^{k f(x)} I`,
/// so the control picks up the phase and every non-control segment is
/// returned unchanged. Makes exactly two oracle calls.
pub fn phase_transform(
    state: &StateVector,
    control: &str,
    ancilla: &str,
    f: &FunctionTable,
    plan: &GadgetPlan,
) -> Result<PhaseOutcome> {
    let adim = state.layout().dim_of(ancilla)?;
    if adim != plan.modulus || f.modulus() != plan.modulus {
        return Err(Error::domain(format!(
            "ancilla dimension {adim}, table modulus {} and plan modulus {} must agree",
            f.modulus(),
            plan.modulus
        )));
    }
    let mut current = state.clone();
    let mut oracle_calls = 0;
    for step in plan.variant.steps() {
        current = match step {
            GadgetStep::Translate(sign) => {
                oracle_calls += 1;
                apply_oracle(&current, control, ancilla, f, sign)?
            }
            other => plan.ancilla_op(other, 0)?.apply(&current, ancilla)?,
        };
    }
    Ok(PhaseOutcome {
        state: current,
        oracle_calls,
    })
}

/// `diag(w^{k f(x)})` applied directly on `control`. This is the target of
/// the phase transform, used for restoration reports.
pub fn reference_phase(
    state: &StateVector,
    control: &str,
    f: &FunctionTable,
    k: i64,
) -> Result<StateVector> {
    let n = state.layout().dim_of(control)?;
    if n != f.domain_size() {
        return Err(Error::domain(format!(
            "control segment has dimension {n}, table domain is {}",
            f.domain_size()
        )));
    }
    let m = f.modulus();
    let phases: Vec<C64> = f
        .values()
        .iter()
        .map(|&v| omega(m, (reduce(k, m) * v % m) as i64))
        .collect();
    let targets: Vec<usize> = (0..n).collect();
    state.apply_monomial(control, &targets, &phases)
}

/// Fidelity `<E| rho_E |E>` between the initial environment state `env` and
/// the reduced state of `out` on the same trailing segments.
pub fn restoration_fidelity(out: &StateVector, env: &StateVector) -> Result<f64> {
    let segs = out.layout().segments();
    let env_segs = env.layout().segments();
    if env_segs.len() >= segs.len() || segs[segs.len() - env_segs.len()..] != *env_segs {
        return Err(Error::domain(
            "environment segments must be the trailing segments of the output layout",
        ));
    }
    let e = env.len();
    let env_amps = env.amplitudes();
    Ok(out
        .amplitudes()
        .chunks(e)
        .map(|block| {
            block
                .iter()
                .zip(env_amps)
                .map(|(o, v)| v.conj() * o)
                .sum::<C64>()
                .norm_sqr()
        })
        .sum())
}

/// Restoration diagnostics for a phase transform with a mixed ancilla.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedReport {
    pub rank: usize,
    pub oracle_calls: usize,
    /// Max amplitude error against `(R_{k,f}|Phi>) ⊗ |Psi^{AR}>`.
    pub joint_error: f64,
    /// Max entry error of the final ancilla marginal against the input.
    pub ancilla_error: f64,
    pub mutual_information_before: f64,
    pub mutual_information_after: f64,
    pub restoration_fidelity: f64,
    pub restored: bool,
}

/// Purifies `rho` with a reference segment, runs the phase transform on
/// `control_state ⊗ |Psi^{AR}>` and checks that the joint ancilla/reference
/// state comes back unchanged.
pub fn phase_transform_mixed(
    control_state: &StateVector,
    rho: &DensityOperator,
    f: &FunctionTable,
    plan: &GadgetPlan,
) -> Result<(StateVector, MixedReport)> {
    let segs = control_state.layout().segments();
    if segs.len() != 1 {
        return Err(Error::domain("control state must have exactly one segment"));
    }
    let control = segs[0].name.clone();
    if rho.dim() != plan.modulus {
        return Err(Error::domain(format!(
            "density operator of dimension {} for modulus {}",
            rho.dim(),
            plan.modulus
        )));
    }
    let purification = purify(rho)?;
    let env = &purification.joint;
    let input = control_state.tensor(env)?;
    let outcome = phase_transform(&input, &control, ANCILLA, f, plan)?;
    let out = outcome.state;

    let expected = reference_phase(control_state, &control, f, plan.k as i64)?.tensor(env)?;
    let joint_error = out.max_abs_diff(&expected);
    let ancilla_error = max_abs_diff(partial_trace(&out, ANCILLA)?.matrix(), rho.matrix());
    let mutual_information_before = mutual_information(env, (ANCILLA, REFERENCE))?;
    let mutual_information_after = mutual_information_between(&out, ANCILLA, REFERENCE)?;
    let restoration_fidelity = restoration_fidelity(&out, env)?;
    let restored = joint_error <= tol::EIGEN
        && ancilla_error <= tol::EIGEN
        && (mutual_information_after - mutual_information_before).abs() <= tol::EIGEN;
    let report = MixedReport {
        rank: purification.rank(),
        oracle_calls: outcome.oracle_calls,
        joint_error,
        ancilla_error,
        mutual_information_before,
        mutual_information_after,
        restoration_fidelity,
        restored,
    };
    Ok((out, report))
}

/// `F T_{-k} |0>`, the common eigenvector of every `T_z` with eigenvalue
/// `w^{kz}`.
pub fn eigen_ancilla(modulus: usize, k: i64) -> Result<StateVector> {
    let layout = crate::state::RegisterLayout::single(ANCILLA, modulus)?;
    let zero = StateVector::basis(layout, &[0])?;
    let shifted = PrimitiveOp::translate(modulus, -k)?.apply(&zero, ANCILLA)?;
    PrimitiveOp::fourier(modulus)?.apply(&shifted, ANCILLA)
}

/// One-evaluation phase transform. Correct only when `ancilla` holds
/// `eigen_ancilla(M, k)`; the operation does not check this.
pub fn phase_transform_initialized(
    state: &StateVector,
    control: &str,
    ancilla: &str,
    f: &FunctionTable,
    _k: i64,
) -> Result<PhaseOutcome> {
    Ok(PhaseOutcome {
        state: apply_oracle(state, control, ancilla, f, Sign::Plus)?,
        oracle_calls: 1,
    })
}

/// Pairwise separation of the candidates `V_z = w^{kz} T_{±z}^†` for one sign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignSeparation {
    pub sign: i64,
    pub pairs: usize,
    /// Minimum over `z1 != z2` of `max_ij |V_{z1} - V_{z2}|`.
    pub min_separation: f64,
    pub max_separation: f64,
    pub all_distinct: bool,
    /// Max over `z` of `|V_z T_{±z} - w^{kz} I|`.
    pub max_identity_residual: f64,
}

/// Brute-force demonstration that no single `z`-independent `V` satisfies
/// `V T_{±z} = w^{kz} I`, so a second use of `z` is needed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalityReport {
    pub modulus: usize,
    pub k: usize,
    pub per_sign: Vec<SignSeparation>,
    pub demonstration: bool,
    pub note: String,
}

impl OptimalityReport {
    pub fn passes(&self) -> bool {
        self.per_sign.iter().all(|s| s.all_distinct)
    }

    pub fn min_separation(&self) -> f64 {
        self.per_sign
            .iter()
            .map(|s| s.min_separation)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Separation threshold for calling two candidates distinct.
pub const DISTINCT_THRESHOLD: f64 = 1e-6;

pub fn optimality_check(modulus: usize, k: i64) -> Result<OptimalityReport> {
    if modulus < 2 {
        return Err(Error::domain("optimality check needs M >= 2"));
    }
    let k = reduce(k, modulus);
    if k == 0 {
        return Err(Error::domain(
            "k = 0 mod M makes the phase trivial; the claim is vacuous",
        ));
    }
    let m = modulus;
    let mut per_sign = Vec::with_capacity(2);
    for sign in [Sign::Plus, Sign::Minus] {
        let s = sign.value();
        let candidates: Vec<CMatrix> = (0..m as i64)
            .map(|z| translate_matrix(m, -s * z) * omega(m, k as i64 * z))
            .collect();
        let mut max_identity_residual = 0.0f64;
        for (z, v) in candidates.iter().enumerate() {
            let prod = v * translate_matrix(m, s * z as i64);
            let target = CMatrix::identity(m, m) * omega(m, (k * z) as i64);
            max_identity_residual = max_identity_residual.max(max_abs_diff(&prod, &target));
        }
        let mut min_separation = f64::INFINITY;
        let mut max_separation = 0.0f64;
        let mut pairs = 0;
        for z1 in 0..m {
            for z2 in z1 + 1..m {
                let d = max_abs_diff(&candidates[z1], &candidates[z2]);
                min_separation = min_separation.min(d);
                max_separation = max_separation.max(d);
                pairs += 1;
            }
        }
        per_sign.push(SignSeparation {
            sign: s,
            pairs,
            min_separation,
            max_separation,
            all_distinct: min_separation > DISTINCT_THRESHOLD,
            max_identity_residual,
        });
    }
    Ok(OptimalityReport {
        modulus: m,
        k,
        per_sign,
        demonstration: true,
        note: "demonstration under the oracle model where z enters only through T_{+z} or T_{-z}; \
               arbitrary z-dependent unitaries are not covered"
            .into(),
    })
}
