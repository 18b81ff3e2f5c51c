//! Deutsch–Jozsa, Grover search and single-query search with tunable phases, each
//! routing every conditional phase through [`phase_transform`] on an
//! ancilla that is never initialized.

use std::f64::consts::TAU;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gadget::{phase_transform, restoration_fidelity, GadgetPlan, GadgetVariant};
use crate::oracle::{delta_table, quantize, FunctionTable, RealFunctionTable};
use crate::random::random_state;
use crate::spectral::PrimitiveOp;
use crate::state::{purify, DensityOperator, RegisterLayout, StateVector};
use crate::{ANCILLA, CONTROL};

/// How the ancilla register starts out. None of these are prepared by the
/// algorithms; they model whatever happened to be in the register.
#[derive(Debug, Clone, PartialEq)]
pub enum Ancilla {
    /// Seeded random pure state of the required dimension.
    Random { seed: u64 },
    /// A given pure state; its layout is relabeled to a single ancilla segment.
    Pure(StateVector),
    /// A mixed state, carried as a purification with a reference segment.
    Mixed(DensityOperator),
}

impl Ancilla {
    /// Environment state over `[ancilla]` or `[ancilla, reference]`.
    pub fn prepare(&self, dim: usize) -> Result<StateVector> {
        match self {
            Ancilla::Random { seed } => random_state(dim, *seed),
            Ancilla::Pure(s) => {
                if s.len() != dim {
                    return Err(Error::domain(format!(
                        "ancilla state has dimension {}, register needs {dim}",
                        s.len()
                    )));
                }
                StateVector::new(
                    RegisterLayout::single(ANCILLA, dim)?,
                    s.amplitudes().to_vec(),
                )
            }
            Ancilla::Mixed(rho) => {
                if rho.dim() != dim {
                    return Err(Error::domain(format!(
                        "ancilla density operator has dimension {}, register needs {dim}",
                        rho.dim()
                    )));
                }
                Ok(purify(rho)?.joint)
            }
        }
    }
}

/// Control register plus borrowed ancilla, with call accounting.
struct Machine {
    state: StateVector,
    env: StateVector,
    variant: GadgetVariant,
    oracle_calls: usize,
    phase_transforms: usize,
}

impl Machine {
    fn uniform(n: usize, ancilla: &Ancilla, m: usize, variant: GadgetVariant) -> Result<Self> {
        let zero = StateVector::basis(RegisterLayout::single(CONTROL, n)?, &[0])?;
        let control = PrimitiveOp::fourier(n)?.apply(&zero, CONTROL)?;
        let env = ancilla.prepare(m)?;
        Ok(Machine {
            state: control.tensor(&env)?,
            env,
            variant,
            oracle_calls: 0,
            phase_transforms: 0,
        })
    }

    fn conditional_phase(&mut self, f: &FunctionTable, k: i64) -> Result<usize> {
        let plan = GadgetPlan::new(self.variant, k, f.modulus())?;
        let out = phase_transform(&self.state, CONTROL, ANCILLA, f, &plan)?;
        self.state = out.state;
        self.oracle_calls += out.oracle_calls;
        self.phase_transforms += 1;
        Ok(out.oracle_calls)
    }

    fn control_op(&mut self, op: PrimitiveOp) -> Result<()> {
        self.state = op.apply(&self.state, CONTROL)?;
        Ok(())
    }

    fn distribution(&self) -> Result<Vec<f64>> {
        self.state.marginal_probabilities(CONTROL)
    }

    fn fidelity(&self) -> Result<f64> {
        restoration_fidelity(&self.state, &self.env)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DjClass {
    Constant,
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DjVerdict {
    pub outcome_distribution: Vec<f64>,
    pub verdict: DjClass,
    pub p_zero: f64,
    pub oracle_calls: usize,
    pub phase_transforms: usize,
    pub ancilla_restoration_fidelity: f64,
}

/// Constant-vs-balanced with `k = 1`, `M = 2`. The control starts in
/// `F_N|0>` and is measured after `F_N^†`; only the probability of `0`
/// carries the verdict.
pub fn deutsch_jozsa(
    f: &FunctionTable,
    ancilla: &Ancilla,
    variant: GadgetVariant,
) -> Result<DjVerdict> {
    if f.modulus() != 2 {
        return Err(Error::domain(format!(
            "Deutsch-Jozsa needs a Boolean table (M = 2), got M = {}",
            f.modulus()
        )));
    }
    let n = f.domain_size();
    let mut machine = Machine::uniform(n, ancilla, 2, variant)?;
    machine.conditional_phase(f, 1)?;
    machine.control_op(PrimitiveOp::fourier_inverse(n)?)?;
    let outcome_distribution = machine.distribution()?;
    let p_zero = outcome_distribution[0];
    let verdict = if p_zero >= 1.0 - crate::tol::EIGEN {
        DjClass::Constant
    } else {
        DjClass::Balanced
    };
    Ok(DjVerdict {
        outcome_distribution,
        verdict,
        p_zero,
        oracle_calls: machine.oracle_calls,
        phase_transforms: machine.phase_transforms,
        ancilla_restoration_fidelity: machine.fidelity()?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub success_probability: f64,
    pub iterations: usize,
    pub probabilities: Vec<f64>,
    pub solution_count: usize,
    /// All oracle applications, including those for the diffusion's `f_l`.
    pub oracle_calls: usize,
    /// Oracle applications of the searched function only.
    pub f_evaluations: usize,
    pub phase_transforms: usize,
    pub ancilla_restoration_fidelity: f64,
    pub notes: Vec<String>,
}

fn success_mass(f: &FunctionTable, probs: &[f64]) -> f64 {
    f.values()
        .iter()
        .zip(probs)
        .filter(|(&v, _)| v != 0)
        .map(|(_, p)| p)
        .sum()
}

fn check_boolean_search(f: &FunctionTable) -> Result<()> {
    if f.modulus() != 2 {
        return Err(Error::domain(format!(
            "search needs a Boolean table (M = 2), got M = {}",
            f.modulus()
        )));
    }
    if f.domain_size() < 2 {
        return Err(Error::domain("search needs N >= 2"));
    }
    Ok(())
}

/// Grover iterations `D S_f` from the uniform superposition, where
/// `S_f = R_{1,f}` and `D = -W S_0 W^†` with `W = F_N`, `S_0 = R_{1,f_0}`.
pub fn grover(
    f: &FunctionTable,
    iterations: usize,
    ancilla: &Ancilla,
    variant: GadgetVariant,
) -> Result<SearchResult> {
    check_boolean_search(f)?;
    let n = f.domain_size();
    let f0 = delta_table(n, 0)?;
    let mut machine = Machine::uniform(n, ancilla, 2, variant)?;
    let mut f_evaluations = 0;
    for _ in 0..iterations {
        f_evaluations += machine.conditional_phase(f, 1)?;
        machine.control_op(PrimitiveOp::fourier_inverse(n)?)?;
        machine.conditional_phase(&f0, 1)?;
        machine.control_op(PrimitiveOp::fourier(n)?)?;
        machine.state = machine
            .state
            .with_global_phase(crate::state::C64::new(-1.0, 0.0))?;
    }
    let probabilities = machine.distribution()?;
    let solution_count = f.support_size();
    let mut notes =
        vec!["diffusion D = -W S_0 W^dagger with W = F_N; the sign is global".to_string()];
    if solution_count == 0 {
        notes.push("table has no solutions; success probability is 0".into());
    }
    Ok(SearchResult {
        success_probability: success_mass(f, &probabilities),
        iterations,
        probabilities,
        solution_count,
        oracle_calls: machine.oracle_calls,
        f_evaluations,
        phase_transforms: machine.phase_transforms,
        ancilla_restoration_fidelity: machine.fidelity()?,
        notes,
    })
}

/// Phase angles for the single-query search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CkParams {
    /// Conditional phase `S_{f,gamma}: |x> -> e^{i gamma f(x)} |x>`.
    pub gamma: f64,
    /// Diffusion phase in `D_beta = W_l S_{l,beta} W_l^†`.
    pub beta: f64,
    /// Pivot `l` of the diffusion.
    pub pivot: usize,
}

impl Default for CkParams {
    fn default() -> Self {
        CkParams {
            gamma: std::f64::consts::PI,
            beta: std::f64::consts::PI,
            pivot: 0,
        }
    }
}

/// `angle / 2pi` folded into `[0, 1)`.
fn turns(angle: f64) -> f64 {
    let t = (angle / TAU).rem_euclid(1.0);
    if t >= 1.0 {
        0.0
    } else {
        t
    }
}

/// Table of `angle * g(x) / 2pi` quantized to `bits` bits.
pub fn quantized_phase_table(g: &FunctionTable, angle: f64, bits: u32) -> Result<FunctionTable> {
    if !angle.is_finite() {
        return Err(Error::domain("phase angle must be finite"));
    }
    let t = turns(angle);
    let rf = RealFunctionTable::new(
        g.values()
            .iter()
            .map(|&v| if v != 0 { t } else { 0.0 })
            .collect(),
    )?;
    quantize(&rf, bits)
}

/// One application of `D_beta S_{f,gamma}` to the uniform superposition.
/// Both conditional phases are approximate phase transforms `R_{1,f~}` on a
/// `2^bits`-dimensional ancilla, and `W_l = F_N T_{-l}`.
pub fn ck_single_query(
    f: &FunctionTable,
    params: &CkParams,
    bits: u32,
    ancilla: &Ancilla,
    variant: GadgetVariant,
) -> Result<SearchResult> {
    check_boolean_search(f)?;
    let n = f.domain_size();
    let l = params.pivot;
    let fl = delta_table(n, l)?;
    let f_gamma = quantized_phase_table(f, params.gamma, bits)?;
    let fl_beta = quantized_phase_table(&fl, params.beta, bits)?;
    let m = f_gamma.modulus();

    let mut machine = Machine::uniform(n, ancilla, m, variant)?;
    let f_evaluations = machine.conditional_phase(&f_gamma, 1)?;
    machine.control_op(PrimitiveOp::fourier_inverse(n)?)?;
    machine.control_op(PrimitiveOp::translate(n, l as i64)?)?;
    machine.conditional_phase(&fl_beta, 1)?;
    machine.control_op(PrimitiveOp::translate(n, -(l as i64))?)?;
    machine.control_op(PrimitiveOp::fourier(n)?)?;

    let probabilities = machine.distribution()?;
    let solution_count = f.support_size();
    let mut notes = vec![format!(
        "W_l = F_N T_(-l) with l = {l}; phases quantized to {bits} bits (M = {m})"
    )];
    if solution_count == 0 {
        notes.push("table has no solutions; success probability is 0".into());
    }
    Ok(SearchResult {
        success_probability: success_mass(f, &probabilities),
        iterations: 1,
        probabilities,
        solution_count,
        oracle_calls: machine.oracle_calls,
        f_evaluations,
        phase_transforms: machine.phase_transforms,
        ancilla_restoration_fidelity: machine.fidelity()?,
        notes,
    })
}
