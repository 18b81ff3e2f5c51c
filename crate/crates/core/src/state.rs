//! Dense register states, density operators and the reduced-state machinery
//! (partial trace, purification, entropy) used by the rest of the crate.
//!
//! A register is a list of named segments, each holding a value in
//! `0..dim`. Basis states are addressed by a mixed-radix flat index with the
//! first segment most significant, so `[(c,4),(a,2)]` with values `(3,1)`
//! lives at index `3*2 + 1 = 7`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

/// Complex amplitude.
pub type C64 = Complex64;

/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;

/// A named register segment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Segment {
    pub name: String,
    pub dim: usize,
}

/// Ordered list of named segments making up a composite register.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct RegisterLayout {
    segments: Vec<Segment>,
    total_dim: usize,
}

impl RegisterLayout {
    pub fn new<I, S>(segments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let segments: Vec<Segment> = segments
            .into_iter()
            .map(|(name, dim)| Segment {
                name: name.into(),
                dim,
            })
            .collect();
        if segments.is_empty() {
            return Err(Error::domain("a layout needs at least one segment"));
        }
        let mut total_dim = 1usize;
        for (i, seg) in segments.iter().enumerate() {
            if seg.dim == 0 {
                return Err(Error::domain(format!(
                    "segment '{}' has dimension 0",
                    seg.name
                )));
            }
            if segments[..i].iter().any(|s| s.name == seg.name) {
                return Err(Error::domain(format!(
                    "duplicate segment name '{}'",
                    seg.name
                )));
            }
            total_dim = total_dim
                .checked_mul(seg.dim)
                .ok_or_else(|| Error::domain("layout dimension overflows usize"))?;
        }
        Ok(RegisterLayout {
            segments,
            total_dim,
        })
    }

    pub fn single(name: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(name.into(), dim)])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.segments
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::domain(format!("unknown segment '{name}'")))
    }

    pub fn dim_of(&self, name: &str) -> Result<usize> {
        Ok(self.segments[self.position(name)?].dim)
    }

    /// Distance in the flat index between consecutive values of the segment
    /// at `pos`.
    pub fn stride(&self, pos: usize) -> usize {
        self.segments[pos + 1..].iter().map(|s| s.dim).product()
    }

    pub fn flat_index(&self, values: &[usize]) -> Result<usize> {
        if values.len() != self.segments.len() {
            return Err(Error::domain(format!(
                "expected {} segment values, got {}",
                self.segments.len(),
                values.len()
            )));
        }
        let mut index = 0usize;
        for (seg, &v) in self.segments.iter().zip(values) {
            if v >= seg.dim {
                return Err(Error::domain(format!(
                    "value {v} out of range for segment '{}' of dimension {}",
                    seg.name, seg.dim
                )));
            }
            index = index * seg.dim + v;
        }
        Ok(index)
    }

    /// Inverse of [`flat_index`](Self::flat_index).
    pub fn values_of(&self, mut index: usize) -> Vec<usize> {
        let mut values = vec![0; self.segments.len()];
        for (slot, seg) in values.iter_mut().zip(&self.segments).rev() {
            *slot = index % seg.dim;
            index /= seg.dim;
        }
        values
    }

    /// Concatenation of two layouts; names must stay unique.
    pub fn tensor(&self, other: &RegisterLayout) -> Result<RegisterLayout> {
        RegisterLayout::new(
            self.segments
                .iter()
                .chain(&other.segments)
                .map(|s| (s.name.clone(), s.dim)),
        )
    }
}

/// Offsets of the first element of every fiber along a segment.
fn fiber_bases(total: usize, dim: usize, stride: usize) -> impl Iterator<Item = usize> {
    let block = dim * stride;
    (0..total / block).flat_map(move |outer| (0..stride).map(move |inner| outer * block + inner))
}

/// Result of [`equal_up_to_global_phase`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseMatch {
    pub equal: bool,
    /// `arg <a|b>` in radians, in `(-pi, pi]`.
    pub phase: f64,
    /// `|<a|b>|`.
    pub overlap: f64,
}

/// Unit vector over a [`RegisterLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: RegisterLayout,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized (within 1e-10).
    pub fn new(layout: RegisterLayout, amps: Vec<C64>) -> Result<Self> {
        Self::check_shape(&layout, &amps)?;
        let norm = l2_norm(&amps);
        if (norm - 1.0).abs() > tol::MATRIX {
            return Err(Error::numeric(format!("state has norm {norm}, expected 1")));
        }
        Ok(StateVector { layout, amps })
    }

    /// Divides the amplitudes by their norm.
    pub fn normalized(layout: RegisterLayout, mut amps: Vec<C64>) -> Result<Self> {
        Self::check_shape(&layout, &amps)?;
        let norm = l2_norm(&amps);
        if norm == 0.0 {
            return Err(Error::numeric("cannot normalize the zero vector"));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Ok(StateVector { layout, amps })
    }

    fn check_shape(layout: &RegisterLayout, amps: &[C64]) -> Result<()> {
        if amps.len() != layout.total_dim() {
            return Err(Error::domain(format!(
                "{} amplitudes for a layout of dimension {}",
                amps.len(),
                layout.total_dim()
            )));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::numeric("non-finite amplitude"));
        }
        Ok(())
    }

    pub fn basis(layout: RegisterLayout, values: &[usize]) -> Result<Self> {
        let index = layout.flat_index(values)?;
        let mut amps = vec![C64::new(0.0, 0.0); layout.total_dim()];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { layout, amps })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitude(&self, values: &[usize]) -> Result<C64> {
        Ok(self.amps[self.layout.flat_index(values)?])
    }

    pub fn norm(&self) -> f64 {
        l2_norm(&self.amps)
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Measurement distribution of one segment, summed over the others.
    pub fn marginal_probabilities(&self, segment: &str) -> Result<Vec<f64>> {
        let pos = self.layout.position(segment)?;
        let dim = self.layout.segments[pos].dim;
        let stride = self.layout.stride(pos);
        let mut probs = vec![0.0; dim];
        for (i, a) in self.amps.iter().enumerate() {
            probs[(i / stride) % dim] += a.norm_sqr();
        }
        Ok(probs)
    }

    /// Product state `self ⊗ other`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let layout = self.layout.tensor(&other.layout)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|a| other.amps.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { layout, amps })
    }

    /// Multiplies every amplitude by a unit-modulus factor.
    pub fn with_global_phase(&self, phase: C64) -> Result<StateVector> {
        if (phase.norm() - 1.0).abs() > tol::MATRIX {
            return Err(Error::numeric("global phase factor must have modulus 1"));
        }
        Ok(StateVector {
            layout: self.layout.clone(),
            amps: self.amps.iter().map(|a| a * phase).collect(),
        })
    }

    /// Applies a unitary matrix to one segment, identity elsewhere.
    pub fn apply_on_segment(&self, segment: &str, op: &CMatrix) -> Result<StateVector> {
        let pos = self.layout.position(segment)?;
        let dim = self.layout.segments[pos].dim;
        if op.nrows() != dim || op.ncols() != dim {
            return Err(Error::domain(format!(
                "{}x{} operator on segment '{segment}' of dimension {dim}",
                op.nrows(),
                op.ncols()
            )));
        }
        let residual = unitarity_residual(op);
        if residual > tol::MATRIX {
            return Err(Error::numeric(format!(
                "operator is not unitary (residual {residual:e})"
            )));
        }
        Ok(self.apply_matrix_unchecked(pos, op))
    }

    pub(crate) fn apply_matrix_unchecked(&self, pos: usize, op: &CMatrix) -> StateVector {
        let dim = self.layout.segments[pos].dim;
        let stride = self.layout.stride(pos);
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        let mut fiber = vec![C64::new(0.0, 0.0); dim];
        for base in fiber_bases(self.amps.len(), dim, stride) {
            for (y, slot) in fiber.iter_mut().enumerate() {
                *slot = self.amps[base + y * stride];
            }
            for row in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for (col, v) in fiber.iter().enumerate() {
                    acc += op[(row, col)] * v;
                }
                out[base + row * stride] = acc;
            }
        }
        StateVector {
            layout: self.layout.clone(),
            amps: out,
        }
    }

    /// Applies `|y> -> phases[y] |targets[y]>` on a segment. `targets` must
    /// be a permutation of `0..dim` and every phase must have modulus 1.
    pub fn apply_monomial(
        &self,
        segment: &str,
        targets: &[usize],
        phases: &[C64],
    ) -> Result<StateVector> {
        let pos = self.layout.position(segment)?;
        let dim = self.layout.segments[pos].dim;
        if targets.len() != dim || phases.len() != dim {
            return Err(Error::domain(format!(
                "monomial operator of size {} on segment '{segment}' of dimension {dim}",
                targets.len()
            )));
        }
        let mut seen = vec![false; dim];
        for &t in targets {
            if t >= dim || std::mem::replace(&mut seen[t], true) {
                return Err(Error::domain("targets do not form a permutation"));
            }
        }
        if phases.iter().any(|p| (p.norm() - 1.0).abs() > tol::MATRIX) {
            return Err(Error::numeric("monomial phases must have modulus 1"));
        }
        Ok(self.apply_monomial_unchecked(pos, targets, phases))
    }

    pub(crate) fn apply_monomial_unchecked(
        &self,
        pos: usize,
        targets: &[usize],
        phases: &[C64],
    ) -> StateVector {
        let dim = self.layout.segments[pos].dim;
        let stride = self.layout.stride(pos);
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for base in fiber_bases(self.amps.len(), dim, stride) {
            for y in 0..dim {
                out[base + targets[y] * stride] = phases[y] * self.amps[base + y * stride];
            }
        }
        StateVector {
            layout: self.layout.clone(),
            amps: out,
        }
    }

    /// Rebuilds the state from a closure that maps each flat index to its
    /// destination. The closure must describe a permutation.
    pub(crate) fn permuted(&self, dest: impl Fn(usize) -> usize) -> StateVector {
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            out[dest(i)] = *a;
        }
        StateVector {
            layout: self.layout.clone(),
            amps: out,
        }
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.amps.len() != other.amps.len() {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn l2_norm(amps: &[C64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `|1>` at the flat index of `values`.
pub fn basis_state(layout: &RegisterLayout, values: &[usize]) -> Result<StateVector> {
    StateVector::basis(layout.clone(), values)
}

/// True iff `|<a|b>| >= 1 - tol`. Layout mismatch is reported as not equal.
pub fn equal_up_to_global_phase(a: &StateVector, b: &StateVector, tol: f64) -> PhaseMatch {
    if a.layout != b.layout {
        return PhaseMatch {
            equal: false,
            phase: 0.0,
            overlap: 0.0,
        };
    }
    let ip = a.inner(b);
    let overlap = ip.norm();
    PhaseMatch {
        equal: overlap >= 1.0 - tol,
        phase: ip.arg(),
        overlap,
    }
}

/// Max entry of `|U^† U - I|`.
pub fn unitarity_residual(op: &CMatrix) -> f64 {
    if op.nrows() != op.ncols() {
        return f64::INFINITY;
    }
    let prod = op.adjoint() * op;
    max_abs_diff(&prod, &CMatrix::identity(op.nrows(), op.ncols()))
}

pub fn is_unitary(op: &CMatrix, tol: f64) -> bool {
    unitarity_residual(op) <= tol
}

/// Max entrywise modulus of `a - b`; infinite on shape mismatch.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    mat: CMatrix,
}

impl DensityOperator {
    /// Validates Hermiticity, trace and positivity (all within 1e-10).
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() || mat.nrows() == 0 {
            return Err(Error::domain(
                "density operator must be a non-empty square matrix",
            ));
        }
        let herm = max_abs_diff(&mat, &mat.adjoint());
        if herm > tol::MATRIX {
            return Err(Error::numeric(format!(
                "matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > tol::MATRIX || trace.im.abs() > tol::MATRIX {
            return Err(Error::numeric(format!("trace is {trace}, expected 1")));
        }
        let rho = DensityOperator { mat };
        let min_eig = rho.eigenvalues().last().copied().unwrap_or(0.0);
        if min_eig < -tol::MATRIX {
            return Err(Error::numeric(format!("negative eigenvalue {min_eig:e}")));
        }
        Ok(rho)
    }

    /// Skips validation. Operations on the result may return numeric errors.
    pub fn from_matrix_unchecked(mat: CMatrix) -> Self {
        DensityOperator { mat }
    }

    pub fn pure(state: &StateVector) -> Self {
        let v = CMatrix::from_column_slice(state.len(), 1, state.amplitudes());
        DensityOperator {
            mat: &v * v.adjoint(),
        }
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("dimension must be positive"));
        }
        Ok(DensityOperator {
            mat: CMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eig: Vec<f64> = self.hermitian_part().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| b.total_cmp(a));
        eig
    }

    fn hermitian_part(&self) -> SymmetricEigen<C64, nalgebra::Dyn> {
        let sym = (&self.mat + self.mat.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(sym)
    }

    /// Von Neumann entropy in nats, with `0 ln 0 = 0`.
    pub fn entropy(&self) -> f64 {
        entropy_of_spectrum(&self.eigenvalues())
    }

    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        max_abs_diff(&self.mat, &other.mat)
    }

    /// `<psi| rho |psi>`.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        if state.len() != self.dim() {
            return Err(Error::domain(
                "state and density operator dimensions differ",
            ));
        }
        let v = CMatrix::from_column_slice(state.len(), 1, state.amplitudes());
        Ok((v.adjoint() * &self.mat * &v)[(0, 0)].re)
    }
}

/// `-sum p ln p` over the positive part of a spectrum.
pub fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    spectrum
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

/// Pure joint state on `[ancilla, reference]` whose ancilla marginal is a
/// given density operator. The reference dimension equals the rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Purification {
    pub joint: StateVector,
    /// Descending; their squares are the nonzero eigenvalues of the source.
    pub schmidt_coeffs: Vec<f64>,
}

impl Purification {
    pub fn rank(&self) -> usize {
        self.schmidt_coeffs.len()
    }
}

/// Builds `sum_j sqrt(l_j) |v_j> ⊗ |j>` from the eigendecomposition of `rho`.
/// Segments are named [`crate::ANCILLA`] and [`crate::REFERENCE`].
pub fn purify(rho: &DensityOperator) -> Result<Purification> {
    let eig = rho.hermitian_part();
    let mut pairs: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, i))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    if let Some(&(min, _)) = pairs.last() {
        if min < -tol::MATRIX {
            return Err(Error::numeric(format!(
                "density operator has negative eigenvalue {min:e}"
            )));
        }
    }
    let kept: Vec<(f64, usize)> = pairs.into_iter().filter(|&(l, _)| l > tol::RANK).collect();
    if kept.is_empty() {
        return Err(Error::numeric(
            "density operator has no positive eigenvalue",
        ));
    }
    let total: f64 = kept.iter().map(|&(l, _)| l).sum();
    let dim = rho.dim();
    let rank = kept.len();
    let layout = RegisterLayout::new([(crate::ANCILLA, dim), (crate::REFERENCE, rank)])?;
    let mut amps = vec![C64::new(0.0, 0.0); dim * rank];
    let mut schmidt_coeffs = Vec::with_capacity(rank);
    for (j, &(l, col)) in kept.iter().enumerate() {
        let coeff = (l / total).sqrt();
        schmidt_coeffs.push(coeff);
        for y in 0..dim {
            amps[y * rank + j] = eig.eigenvectors[(y, col)] * coeff;
        }
    }
    let joint = StateVector::normalized(layout, amps)?;
    Ok(Purification {
        joint,
        schmidt_coeffs,
    })
}

/// Reduced state on the named segments (kept in layout order).
pub fn reduced_density(state: &StateVector, keep: &[&str]) -> Result<DensityOperator> {
    let layout = state.layout();
    let mut kept_pos = Vec::with_capacity(keep.len());
    for name in keep {
        let pos = layout.position(name)?;
        if kept_pos.contains(&pos) {
            return Err(Error::domain(format!("segment '{name}' listed twice")));
        }
        kept_pos.push(pos);
    }
    kept_pos.sort_unstable();
    let segs = layout.segments();
    let kept_dim: usize = kept_pos.iter().map(|&p| segs[p].dim).product();
    let rest_dim = layout.total_dim() / kept_dim;
    let mut a = CMatrix::zeros(kept_dim, rest_dim);
    for (i, amp) in state.amplitudes().iter().enumerate() {
        let values = layout.values_of(i);
        let (mut k, mut r) = (0usize, 0usize);
        for (p, (seg, v)) in segs.iter().zip(&values).enumerate() {
            if kept_pos.contains(&p) {
                k = k * seg.dim + v;
            } else {
                r = r * seg.dim + v;
            }
        }
        a[(k, r)] = *amp;
    }
    Ok(DensityOperator {
        mat: &a * a.adjoint(),
    })
}

/// Reduced density operator on one segment.
pub fn partial_trace(state: &StateVector, keep: &str) -> Result<DensityOperator> {
    reduced_density(state, &[keep])
}

/// `S(A) + S(B) - S(AB)` in nats for a pure state over exactly the two
/// named segments; reduces to `2 S(A)`.
pub fn mutual_information(state: &StateVector, split: (&str, &str)) -> Result<f64> {
    let segs = state.layout().segments();
    if segs.len() != 2 {
        return Err(Error::domain(format!(
            "mutual information needs exactly two segments, layout has {}",
            segs.len()
        )));
    }
    let (a, b) = split;
    if a == b {
        return Err(Error::domain("split must name two different segments"));
    }
    let s_a = partial_trace(state, a)?.entropy();
    let s_b = partial_trace(state, b)?.entropy();
    Ok((s_a + s_b).max(0.0))
}

/// `S(A) + S(B) - S(AB)` for two segments of a larger pure state, where the
/// pair is in general mixed.
pub fn mutual_information_between(state: &StateVector, a: &str, b: &str) -> Result<f64> {
    if a == b {
        return Err(Error::domain("split must name two different segments"));
    }
    let s_a = partial_trace(state, a)?.entropy();
    let s_b = partial_trace(state, b)?.entropy();
    let s_ab = reduced_density(state, &[a, b])?.entropy();
    Ok((s_a + s_b - s_ab).max(0.0))
}
