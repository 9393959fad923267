//! Seeded random ensembles for property sweeps.
//!
//! All sampling goes through [`ChaCha8Rng`]. A run is identified by a `u64`
//! seed expanded with `SeedableRng::seed_from_u64`; independent workers use
//! the same seed on distinct ChaCha streams (`set_stream(index)`), so a
//! partitioned computation reproduces regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c, projector, CMatrix, CVector, C64};
use crate::quantum::{HermitianOperator, Measurement, QuantumState};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Generator for worker `stream` of the run identified by `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Complex normal with `E|z|² = 1`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-random pure state: a normalized complex-Gaussian vector.
pub fn haar_pure_state<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| complex_gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random unitary: QR of a complex-Gaussian matrix with the phases of
/// `R`'s diagonal moved into `Q`.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let qr = gaussian_matrix(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for row in 0..dim {
            q[(row, k)] *= phase;
        }
    }
    q
}

/// Hilbert–Schmidt density matrix `GG†/Tr{GG†}` with `G` of shape dim×rank.
pub fn hs_density_matrix<R: Rng + ?Sized>(dim: usize, rank: usize, rng: &mut R) -> Result<CMatrix> {
    if rank == 0 || rank > dim {
        return Err(Error::Parameter(format!("rank {rank} not in 1..={dim}")));
    }
    let g = gaussian_matrix(dim, rank, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    Ok(rho.unscale(tr))
}

/// Haar basis projectors mixed with white noise: `v|m⟩⟨m| + (1-v) I/d`.
pub fn noisy_povm<R: Rng + ?Sized>(dim: usize, visibility: f64, rng: &mut R) -> Result<Vec<CMatrix>> {
    if !(0.0..=1.0).contains(&visibility) {
        return Err(Error::Parameter(format!("visibility {visibility} not in [0, 1]")));
    }
    let u = haar_unitary(dim, rng);
    let noise = CMatrix::identity(dim, dim).scale((1.0 - visibility) / dim as f64);
    Ok((0..dim)
        .map(|k| projector(&u.column(k).into_owned()).scale(visibility) + &noise)
        .collect())
}

/// GUE-distributed Hermitian operator `(G + G†)/2`.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> HermitianOperator {
    let g = gaussian_matrix(dim, dim, rng);
    HermitianOperator::new_unchecked((&g + g.adjoint()).scale(0.5))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EnsembleKind {
    HaarPureState,
    HsDensityMatrix { rank: usize },
    HaarBasis,
    NoisyPovm { visibility: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sample {
    State(QuantumState),
    Measurement(Measurement),
}

/// Draws one member of `kind` deterministically from `seed`.
pub fn random_ensemble(dim: usize, kind: EnsembleKind, seed: u64) -> Result<Sample> {
    if dim == 0 {
        return Err(Error::Parameter("dimension must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    Ok(match kind {
        EnsembleKind::HaarPureState => Sample::State(QuantumState::Pure(haar_pure_state(dim, &mut rng))),
        EnsembleKind::HsDensityMatrix { rank } => {
            Sample::State(QuantumState::Mixed(hs_density_matrix(dim, rank, &mut rng)?))
        }
        EnsembleKind::HaarBasis => Sample::Measurement(Measurement::Basis(haar_unitary(dim, &mut rng))),
        EnsembleKind::NoisyPovm { visibility } => {
            Sample::Measurement(Measurement::Povm(noisy_povm(dim, visibility, &mut rng)?))
        }
    })
}
