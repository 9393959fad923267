//! Monte Carlo simulation of a Gaussian von Neumann meter coupled to the
//! system through `λ p̂ Â` and followed by post-selection on a basis.
//!
//! Position readout uses the exact post-selected meter wavefunction
//! `φ_m(x) = Σ_a ⟨m|a⟩⟨a|ψ⟩ G(x − λa)`, tabulated on a uniform grid and
//! sampled by inverse CDF; `E[x|m]/λ → Re[A_w(m)]` as `λ → 0`.
//!
//! Momentum readout commutes with the coupling, so `p` is drawn from the
//! meter's momentum distribution first and then acts as a classical phase
//! `φ = λp` on the system; `E[p|m]/(2λσ_p²) → Im[A_w(m)]`.
//!
//! Samples are split into fixed-size chunks, chunk `k` drawing from ChaCha
//! stream `k` of the configured seed, so results do not depend on how chunks
//! are scheduled across threads.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};
use crate::quantum::{HermitianOperator, Measurement, QuantumState};
use crate::random::substream;
use crate::weak::{pure_projective, weak_value_profile};

const CHUNK: usize = 1 << 15;
const GRID_MASS_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeterConfig {
    /// Position spread of the meter, `⟨x²⟩ = σ_x²`.
    pub sigma_x: f64,
    /// `λ = g·δt`.
    pub coupling: f64,
    pub samples: usize,
    pub grid_points: usize,
    pub grid_halfwidth: f64,
    pub seed: u64,
}

impl MeterConfig {
    /// Default grid (2¹⁴ points) wide enough for `a`: `10σ_x + λ·max|a|`.
    pub fn for_generator(a: &HermitianOperator, sigma_x: f64, coupling: f64, samples: usize, seed: u64) -> Self {
        MeterConfig {
            sigma_x,
            coupling,
            samples,
            grid_points: 1 << 14,
            grid_halfwidth: 10.0 * sigma_x + coupling.abs() * a.spectrum().max_abs(),
            seed,
        }
    }

    pub fn sigma_p(&self) -> f64 {
        0.5 / self.sigma_x
    }

    pub fn with_coupling(mut self, coupling: f64) -> Self {
        self.coupling = coupling;
        self
    }

    fn validate(&self, max_eigenvalue: f64) -> Result<Vec<String>> {
        if !(self.sigma_x > 0.0) || !self.sigma_x.is_finite() {
            return Err(Error::Parameter(format!("sigma_x = {} must be positive", self.sigma_x)));
        }
        if self.coupling == 0.0 || !self.coupling.is_finite() {
            return Err(Error::Parameter(format!("coupling = {} must be finite and nonzero", self.coupling)));
        }
        if self.samples == 0 {
            return Err(Error::Parameter("samples must be at least 1".into()));
        }
        if self.grid_points < 2 {
            return Err(Error::Parameter("grid needs at least 2 points".into()));
        }
        let needed = 8.0 * self.sigma_x + self.coupling.abs() * max_eigenvalue;
        if self.grid_halfwidth < needed {
            return Err(Error::Parameter(format!(
                "grid half-width {} below 8·sigma_x + |λ|·max|a| = {needed}",
                self.grid_halfwidth
            )));
        }
        let mut warnings = Vec::new();
        if self.coupling.abs() * max_eigenvalue > self.sigma_x / 4.0 {
            warnings.push(format!(
                "coupling is not weak: |λ|·max|a| = {:.3e} exceeds sigma_x/4 = {:.3e}",
                self.coupling.abs() * max_eigenvalue,
                self.sigma_x / 4.0
            ));
        }
        Ok(warnings)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutMode {
    Position,
    Momentum,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeterOutcome {
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
    pub implied_weak_part: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeterReadout {
    pub mode: ReadoutMode,
    pub coupling: f64,
    pub samples: usize,
    pub outcomes: Vec<MeterOutcome>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Default)]
struct Moments {
    count: Vec<usize>,
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl Moments {
    fn new(outcomes: usize) -> Self {
        Moments {
            count: vec![0; outcomes],
            sum: vec![0.0; outcomes],
            sum_sq: vec![0.0; outcomes],
        }
    }

    fn push(&mut self, m: usize, value: f64) {
        self.count[m] += 1;
        self.sum[m] += value;
        self.sum_sq[m] += value * value;
    }

    fn merge(mut self, other: &Moments) -> Self {
        for m in 0..self.count.len() {
            self.count[m] += other.count[m];
            self.sum[m] += other.sum[m];
            self.sum_sq[m] += other.sum_sq[m];
        }
        self
    }

    fn outcomes(&self, scale: f64) -> Vec<MeterOutcome> {
        (0..self.count.len())
            .map(|m| {
                let n = self.count[m];
                let mean = if n > 0 { self.sum[m] / n as f64 } else { f64::NAN };
                let stderr = if n > 1 {
                    let var = (self.sum_sq[m] - n as f64 * mean * mean) / (n - 1) as f64;
                    (var.max(0.0) / n as f64).sqrt()
                } else {
                    f64::NAN
                };
                MeterOutcome {
                    count: n,
                    mean,
                    stderr,
                    implied_weak_part: mean / scale,
                }
            })
            .collect()
    }
}

/// Runs `samples` draws in fixed chunks and merges them in chunk order.
fn run_chunks<F>(samples: usize, seed: u64, outcomes: usize, draw: F) -> Moments
where
    F: Fn(&mut rand_chacha::ChaCha8Rng, &mut Moments) + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(seed, k as u64);
            let mut acc = Moments::new(outcomes);
            let n = CHUNK.min(samples - k * CHUNK);
            for _ in 0..n {
                draw(&mut rng, &mut acc);
            }
            acc
        })
        .collect();
    parts.iter().fold(Moments::new(outcomes), |acc, p| acc.merge(p))
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .iter()
        .position(|&c| u < c)
        .unwrap_or(cumulative.len() - 1)
}

/// `c[m][a] = ⟨m|a⟩⟨a|ψ⟩` and the eigenvalues `a` of the generator.
fn eigen_amplitudes(psi: &crate::linalg::CVector, basis: &CMatrix, a: &HermitianOperator) -> (Vec<f64>, Vec<Vec<C64>>) {
    let spec = a.spectrum();
    let overlaps = spec.vectors.adjoint() * psi;
    let m_in_a = basis.adjoint() * &spec.vectors;
    let amps = (0..basis.ncols())
        .map(|m| (0..spec.values.len()).map(|k| m_in_a[(m, k)] * overlaps[k]).collect())
        .collect();
    (spec.values, amps)
}

/// Tabulated post-selected meter density `|φ_m(x)|²` for one outcome.
#[derive(Clone, Debug)]
pub struct PostSelectedMeter {
    x0: f64,
    dx: f64,
    density: Vec<f64>,
    cdf: Vec<f64>,
}

impl PostSelectedMeter {
    /// Total weight `∫|φ_m|²`, the post-selection probability of `m`.
    pub fn mass(&self) -> f64 {
        *self.cdf.last().unwrap()
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.density.len()).map(|i| self.x0 + i as f64 * self.dx)
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    /// `E[x|m]` by trapezoidal quadrature.
    pub fn conditional_mean(&self) -> f64 {
        let n = self.density.len();
        let weighted: f64 = self
            .grid()
            .zip(&self.density)
            .enumerate()
            .map(|(i, (x, f))| if i == 0 || i == n - 1 { 0.5 * x * f } else { x * f })
            .sum::<f64>()
            * self.dx;
        weighted / self.mass()
    }

    fn cell_offset(&self, i: usize, target: f64) -> f64 {
        // solves dx·(f0 t + (f1 − f0) t²/2) = target for t ∈ [0, 1]
        let (f0, f1) = (self.density[i], self.density[i + 1]);
        let r = target / self.dx;
        let disc = (f0 * f0 + 2.0 * (f1 - f0) * r).max(0.0);
        let denom = f0 + disc.sqrt();
        if denom > 0.0 {
            (2.0 * r / denom).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }

    /// Inverse of the normalized CDF at `u ∈ [0, 1)`.
    pub fn sample_position(&self, u: f64) -> f64 {
        let target = u * self.mass();
        let i = self.cdf.partition_point(|&c| c <= target).clamp(1, self.cdf.len() - 1) - 1;
        let t = self.cell_offset(i, target - self.cdf[i]);
        self.x0 + (i as f64 + t) * self.dx
    }

    /// Normalized CDF at `x`, consistent with [`Self::sample_position`].
    pub fn cdf_at(&self, x: f64) -> f64 {
        let pos = (x - self.x0) / self.dx;
        if pos <= 0.0 {
            return 0.0;
        }
        let i = pos.floor() as usize;
        if i + 1 >= self.density.len() {
            return 1.0;
        }
        let t = pos - i as f64;
        let (f0, f1) = (self.density[i], self.density[i + 1]);
        (self.cdf[i] + self.dx * (f0 * t + 0.5 * (f1 - f0) * t * t)) / self.mass()
    }
}

/// Exact post-selected meter densities for every outcome on the configured grid.
pub fn post_selected_meters(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    config: &MeterConfig,
) -> Result<Vec<PostSelectedMeter>> {
    let (psi, basis) = pure_projective(state, measurement, "meter simulation")?;
    config.validate(a.spectrum().max_abs())?;
    let (eigenvalues, amps) = eigen_amplitudes(psi, basis, a);
    let n = config.grid_points;
    let x0 = -config.grid_halfwidth;
    let dx = 2.0 * config.grid_halfwidth / (n - 1) as f64;
    let sigma = config.sigma_x;
    let norm = (2.0 * std::f64::consts::PI * sigma * sigma).powf(-0.25);
    let gauss = |x: f64| norm * (-x * x / (4.0 * sigma * sigma)).exp();

    Ok(amps
        .iter()
        .map(|coeffs| {
            let density: Vec<f64> = (0..n)
                .map(|i| {
                    let x = x0 + i as f64 * dx;
                    eigenvalues
                        .iter()
                        .zip(coeffs)
                        .map(|(&ev, &c)| c * gauss(x - config.coupling * ev))
                        .sum::<C64>()
                        .norm_sqr()
                })
                .collect();
            let mut cdf = Vec::with_capacity(n);
            cdf.push(0.0);
            for i in 1..n {
                cdf.push(cdf[i - 1] + 0.5 * dx * (density[i - 1] + density[i]));
            }
            PostSelectedMeter { x0, dx, density, cdf }
        })
        .collect())
}

/// Position readout conditioned on each outcome; `implied_weak_part = mean/λ`.
pub fn simulate_position_readout(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    config: &MeterConfig,
) -> Result<MeterReadout> {
    let meters = post_selected_meters(state, measurement, a, config)?;
    let warnings = config.validate(a.spectrum().max_abs())?;
    let masses: Vec<f64> = meters.iter().map(PostSelectedMeter::mass).collect();
    let total: f64 = masses.iter().sum();
    let outside_mass = (1.0 - total).abs();
    if outside_mass > GRID_MASS_TOL {
        return Err(Error::Grid { outside_mass });
    }
    let cumulative: Vec<f64> = masses
        .iter()
        .scan(0.0, |acc, m| {
            *acc += m / total;
            Some(*acc)
        })
        .collect();

    let moments = run_chunks(config.samples, config.seed, meters.len(), |rng, acc| {
        let m = pick(&cumulative, rng.random::<f64>());
        let x = meters[m].sample_position(rng.random::<f64>());
        acc.push(m, x);
    });
    Ok(MeterReadout {
        mode: ReadoutMode::Position,
        coupling: config.coupling,
        samples: config.samples,
        outcomes: moments.outcomes(config.coupling),
        warnings,
    })
}

/// Momentum readout: `p ~ N(0, σ_p²)`, outcome drawn from `p(m; λp)`;
/// `implied_weak_part = mean/(2λσ_p²)`.
pub fn simulate_momentum_readout(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    config: &MeterConfig,
) -> Result<MeterReadout> {
    let (psi, basis) = pure_projective(state, measurement, "meter simulation")?;
    let warnings = config.validate(a.spectrum().max_abs())?;
    let (eigenvalues, amps) = eigen_amplitudes(psi, basis, a);
    let sigma_p = config.sigma_p();
    let lambda = config.coupling;
    let outcomes = amps.len();

    let moments = run_chunks(config.samples, config.seed, outcomes, |rng, acc| {
        let z: f64 = rng.sample(StandardNormal);
        let p = sigma_p * z;
        let phi = lambda * p;
        let phases: Vec<C64> = eigenvalues.iter().map(|&ev| C64::from_polar(1.0, -phi * ev)).collect();
        let u = rng.random::<f64>();
        let mut cumulative = 0.0;
        let mut chosen = outcomes - 1;
        for (m, coeffs) in amps.iter().enumerate() {
            let amp: C64 = coeffs.iter().zip(&phases).map(|(c, e)| c * e).sum();
            cumulative += amp.norm_sqr();
            if u < cumulative {
                chosen = m;
                break;
            }
        }
        acc.push(chosen, p);
    });
    Ok(MeterReadout {
        mode: ReadoutMode::Momentum,
        coupling: lambda,
        samples: config.samples,
        outcomes: moments.outcomes(2.0 * lambda * sigma_p * sigma_p),
        warnings,
    })
}

pub fn simulate_readout(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    config: &MeterConfig,
    mode: ReadoutMode,
) -> Result<MeterReadout> {
    match mode {
        ReadoutMode::Position => simulate_position_readout(state, measurement, a, config),
        ReadoutMode::Momentum => simulate_momentum_readout(state, measurement, a, config),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub lambda: f64,
    /// Outcome whose bias is reported: the most probable one.
    pub outcome: usize,
    pub implied: f64,
    pub exact: f64,
    pub bias: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub mode: ReadoutMode,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceStudy {
    fn row(&self, lambda: f64) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.lambda == lambda)
    }

    /// `bias(λ_big)/bias(λ_small)` and its propagated standard error.
    pub fn bias_ratio(&self, big: f64, small: f64) -> Option<(f64, f64)> {
        let (b, s) = (self.row(big)?, self.row(small)?);
        let ratio = b.bias / s.bias;
        let rel = ((b.stderr / b.bias).powi(2) + (s.stderr / s.bias).powi(2)).sqrt();
        Some((ratio, ratio * rel))
    }

    /// Fits `c` on the largest coupling and checks every row satisfies
    /// `bias ≤ c·λ² + 3·stderr`.
    pub fn is_quadratic(&self) -> bool {
        let Some(first) = self
            .rows
            .iter()
            .max_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()))
        else {
            return true;
        };
        let c = (first.bias + 3.0 * first.stderr) / (first.lambda * first.lambda);
        self.rows
            .iter()
            .all(|r| r.bias <= c * r.lambda * r.lambda + 3.0 * r.stderr)
    }
}

/// Repeats a readout across couplings and measures the distance of the
/// implied weak part from the exact one.
pub fn convergence_study(
    state: &QuantumState,
    measurement: &Measurement,
    a: &HermitianOperator,
    config: &MeterConfig,
    lambdas: &[f64],
    mode: ReadoutMode,
) -> Result<ConvergenceStudy> {
    let profile = weak_value_profile(state, measurement, a)?;
    let outcome = profile
        .outcomes
        .iter()
        .filter(|o| o.weak_value.is_some())
        .max_by(|x, y| x.probability.total_cmp(&y.probability).then(y.index.cmp(&x.index)))
        .map(|o| o.index)
        .ok_or_else(|| Error::Parameter("no outcome with a defined weak value".into()))?;
    let w = profile.outcomes[outcome].weak_value.unwrap();
    let exact = match mode {
        ReadoutMode::Position => w.re,
        ReadoutMode::Momentum => w.im,
    };
    let sigma_p = config.sigma_p();
    let rows = lambdas
        .iter()
        .map(|&lambda| {
            let cfg = MeterConfig {
                grid_halfwidth: config
                    .grid_halfwidth
                    .max(8.0 * config.sigma_x + lambda.abs() * a.spectrum().max_abs()),
                ..config.with_coupling(lambda)
            };
            let readout = simulate_readout(state, measurement, a, &cfg, mode)?;
            let o = readout.outcomes[outcome];
            let scale = match mode {
                ReadoutMode::Position => lambda,
                ReadoutMode::Momentum => 2.0 * lambda * sigma_p * sigma_p,
            };
            Ok(ConvergenceRow {
                lambda,
                outcome,
                implied: o.implied_weak_part,
                exact,
                bias: (o.implied_weak_part - exact).abs(),
                stderr: o.stderr / scale.abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceStudy { mode, rows })
}
