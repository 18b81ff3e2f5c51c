//! Seeded random states, density operators and unitaries.
//!
//! Every generator draws from `ChaCha20Rng::seed_from_u64(seed)`
//! (rand_chacha 0.9) and samples normals with `rand_distr::StandardNormal`
//! (rand_distr 0.5). Complex Gaussians take the real part first, then the
//! imaginary part. Reports record this as [`RNG_ALGORITHM`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::state::{CMatrix, DensityOperator, RegisterLayout, StateVector, C64};

pub const RNG_ALGORITHM: &str =
    "chacha20/seed_from_u64 (rand_chacha 0.9) + StandardNormal (rand_distr 0.5)";

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Mixes a stream index into a seed (splitmix64 finalizer), so independent
/// draws can be keyed by `(seed, stream)`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im)
}

/// Normalized i.i.d. complex Gaussian vector over `layout`.
pub fn random_state_on(layout: &RegisterLayout, seed: u64) -> StateVector {
    let mut rng = rng(seed);
    loop {
        let amps: Vec<C64> = (0..layout.total_dim())
            .map(|_| complex_gaussian(&mut rng))
            .collect();
        if let Ok(s) = StateVector::normalized(layout.clone(), amps) {
            return s;
        }
    }
}

/// Random unit vector on a single segment named [`crate::ANCILLA`].
pub fn random_state(dim: usize, seed: u64) -> Result<StateVector> {
    let layout = RegisterLayout::single(crate::ANCILLA, dim)?;
    Ok(random_state_on(&layout, seed))
}

/// Convex mixture of `rank` random orthonormal pure states with
/// flat-Dirichlet weights.
pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityOperator> {
    if dim == 0 || rank == 0 || rank > dim {
        return Err(Error::domain(format!(
            "need 1 <= rank <= dim, got rank {rank}, dim {dim}"
        )));
    }
    let mut rng = rng(seed);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(rank);
    while basis.len() < rank {
        let mut v: Vec<C64> = (0..dim).map(|_| complex_gaussian(&mut rng)).collect();
        for u in &basis {
            let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            v.iter_mut().zip(u).for_each(|(x, a)| *x -= proj * a);
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    let mut weights: Vec<f64> = (0..rank)
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);

    let mut mat = CMatrix::zeros(dim, dim);
    for (w, v) in weights.iter().zip(&basis) {
        let col = CMatrix::from_column_slice(dim, 1, v);
        mat += (&col * col.adjoint()) * C64::new(*w, 0.0);
    }
    // symmetrize away rounding
    let mat = (&mat + mat.adjoint()) * C64::new(0.5, 0.0);
    DensityOperator::new(mat)
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix with the
/// diagonal phases of `R` folded back into `Q`.
pub fn random_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    if dim == 0 {
        return Err(Error::domain("dimension must be positive"));
    }
    let mut rng = rng(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_gaussian(&mut rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}
