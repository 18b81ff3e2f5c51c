//! The single-segment primitives: Fourier transform `F`, translation `T_z`,
//! value phase `R_{k,I}` and reflection phase `S_{k,I}`.
//!
//! Sign convention: `F|y> = M^{-1/2} sum_z w^{+yz} |z>` with `w = exp(2 pi i/M)`.
//! Under this choice `R_{k,I} = F^† T_k^† F` and `S_{k,I} = F T_k^† F`
//! hold exactly as written.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{CMatrix, StateVector, C64};

/// Reduces `value` into `0..modulus`.
pub fn reduce(value: i64, modulus: usize) -> usize {
    debug_assert!(modulus > 0);
    value.rem_euclid(modulus as i64) as usize
}

/// `exp(2 pi i e / M)`, with `e` reduced mod `M` first. Quarter turns are
/// returned exactly.
pub fn omega(modulus: usize, exponent: i64) -> C64 {
    assert!(modulus > 0, "modulus must be positive");
    let r = reduce(exponent, modulus);
    if (4 * r).is_multiple_of(modulus) {
        return match 4 * r / modulus {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, 2.0 * PI * r as f64 / modulus as f64)
}

fn omega_product(modulus: usize, a: usize, b: usize) -> C64 {
    let e = (a as u128 * b as u128 % modulus as u128) as i64;
    omega(modulus, e)
}

/// Entry `(z, y) = w^{yz} / sqrt(M)`.
pub fn fourier_matrix(modulus: usize) -> CMatrix {
    let scale = 1.0 / (modulus as f64).sqrt();
    CMatrix::from_fn(modulus, modulus, |z, y| {
        omega_product(modulus, y, z) * scale
    })
}

pub fn fourier_inverse_matrix(modulus: usize) -> CMatrix {
    fourier_matrix(modulus).adjoint()
}

/// Permutation `|y> -> |y + z mod M>`.
pub fn translate_matrix(modulus: usize, z: i64) -> CMatrix {
    let z = reduce(z, modulus);
    CMatrix::from_fn(modulus, modulus, |row, col| {
        if row == (col + z) % modulus {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `diag(w^{ky})`.
pub fn phase_by_value_matrix(modulus: usize, k: i64) -> CMatrix {
    let k = reduce(k, modulus);
    CMatrix::from_fn(modulus, modulus, |row, col| {
        if row == col {
            omega_product(modulus, k, col)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `|y> -> w^{ky} |-y mod M>`; Hermitian and an involution.
pub fn reflect_phase_matrix(modulus: usize, k: i64) -> CMatrix {
    let k = reduce(k, modulus);
    CMatrix::from_fn(modulus, modulus, |row, col| {
        if row == (modulus - col) % modulus {
            omega_product(modulus, k, col)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Which primitive, with its integer parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PrimitiveKind {
    Fourier,
    FourierInverse,
    Translate(i64),
    PhaseByValue(i64),
    ReflectPhase(i64),
}

/// A primitive operator on a segment of dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct PrimitiveOp {
    pub kind: PrimitiveKind,
    pub dim: usize,
}

impl PrimitiveOp {
    pub fn new(kind: PrimitiveKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("primitive dimension must be positive"));
        }
        Ok(PrimitiveOp { kind, dim })
    }

    pub fn fourier(dim: usize) -> Result<Self> {
        Self::new(PrimitiveKind::Fourier, dim)
    }

    pub fn fourier_inverse(dim: usize) -> Result<Self> {
        Self::new(PrimitiveKind::FourierInverse, dim)
    }

    pub fn translate(dim: usize, z: i64) -> Result<Self> {
        Self::new(PrimitiveKind::Translate(z), dim)
    }

    pub fn phase_by_value(dim: usize, k: i64) -> Result<Self> {
        Self::new(PrimitiveKind::PhaseByValue(k), dim)
    }

    pub fn reflect_phase(dim: usize, k: i64) -> Result<Self> {
        Self::new(PrimitiveKind::ReflectPhase(k), dim)
    }

    pub fn adjoint(&self) -> PrimitiveOp {
        let kind = match self.kind {
            PrimitiveKind::Fourier => PrimitiveKind::FourierInverse,
            PrimitiveKind::FourierInverse => PrimitiveKind::Fourier,
            PrimitiveKind::Translate(z) => PrimitiveKind::Translate(-z),
            PrimitiveKind::PhaseByValue(k) => PrimitiveKind::PhaseByValue(-k),
            PrimitiveKind::ReflectPhase(k) => PrimitiveKind::ReflectPhase(k),
        };
        PrimitiveOp {
            kind,
            dim: self.dim,
        }
    }

    /// Dense matrix.
    pub fn build(&self) -> CMatrix {
        let m = self.dim;
        match self.kind {
            PrimitiveKind::Fourier => fourier_matrix(m),
            PrimitiveKind::FourierInverse => fourier_inverse_matrix(m),
            PrimitiveKind::Translate(z) => translate_matrix(m, z),
            PrimitiveKind::PhaseByValue(k) => phase_by_value_matrix(m, k),
            PrimitiveKind::ReflectPhase(k) => reflect_phase_matrix(m, k),
        }
    }

    /// `(targets, phases)` with `|y> -> phases[y] |targets[y]>`, for the
    /// primitives that are monomial. `None` for the Fourier pair.
    pub fn monomial(&self) -> Option<(Vec<usize>, Vec<C64>)> {
        let m = self.dim;
        match self.kind {
            PrimitiveKind::Fourier | PrimitiveKind::FourierInverse => None,
            PrimitiveKind::Translate(z) => {
                let z = reduce(z, m);
                Some((
                    (0..m).map(|y| (y + z) % m).collect(),
                    vec![C64::new(1.0, 0.0); m],
                ))
            }
            PrimitiveKind::PhaseByValue(k) => {
                let k = reduce(k, m);
                Some((
                    (0..m).collect(),
                    (0..m).map(|y| omega_product(m, k, y)).collect(),
                ))
            }
            PrimitiveKind::ReflectPhase(k) => {
                let k = reduce(k, m);
                Some((
                    (0..m).map(|y| (m - y) % m).collect(),
                    (0..m).map(|y| omega_product(m, k, y)).collect(),
                ))
            }
        }
    }

    /// Applies the operator to `segment`, using the monomial fast path
    /// where available.
    pub fn apply(&self, state: &StateVector, segment: &str) -> Result<StateVector> {
        let pos = state.layout().position(segment)?;
        let dim = state.layout().segments()[pos].dim;
        if dim != self.dim {
            return Err(Error::domain(format!(
                "operator of dimension {} on segment '{segment}' of dimension {dim}",
                self.dim
            )));
        }
        Ok(match self.monomial() {
            Some((targets, phases)) => state.apply_monomial_unchecked(pos, &targets, &phases),
            None => state.apply_matrix_unchecked(pos, &self.build()),
        })
    }
}
