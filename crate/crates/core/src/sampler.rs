//! Reproducible random unitaries and states, and the H-theorem sweep that
//! cross-checks the two unitality-defect routes on random dilations.
//!
//! All randomness flows through ChaCha8 streams keyed by a SplitMix64 hash
//! of (seed, trial index), so trials are independent of each other and of
//! evaluation order; complex Gaussians come from Box–Muller over the raw
//! 64-bit output.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{unitality_both_methods, BipartiteUnitary, KrausChannel};
use crate::linalg::{Complex64, ComplexMatrix, DimensionSplit};
use crate::state::DensityMatrix;
use crate::{Error, Result};

/// Defect-norm threshold separating exact-zero physics from round-off when
/// classifying sweep trials.
pub const SWEEP_UNITALITY_TOL: f64 = 1e-9;

/// Deterministic stream selector: identical (seed, trial_index) always
/// yields identical draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerSeed {
    pub seed: u64,
    pub trial_index: u64,
}

impl SamplerSeed {
    pub fn new(seed: u64, trial_index: u64) -> Self {
        Self { seed, trial_index }
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(splitmix64(
            splitmix64(self.seed) ^ self.trial_index.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        ))
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn uniform_open01(rng: &mut ChaCha8Rng) -> f64 {
    // (0, 1]: never zero, safe under ln()
    ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn standard_normal_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = uniform_open01(rng);
    let u2 = uniform_open01(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let (re, im) = standard_normal_pair(rng);
    Complex64::new(re, im)
}

fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Haar-distributed d×d unitary: Ginibre draw, then modified Gram–Schmidt.
/// Column norms enter the triangular factor as positive reals, which fixes
/// the phase gauge and makes the result Haar.
pub fn haar_unitary(d: usize, seed: SamplerSeed) -> Result<ComplexMatrix> {
    if d == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let mut rng = seed.rng();
    haar_unitary_with(d, &mut rng)
}

fn haar_unitary_with(d: usize, rng: &mut ChaCha8Rng) -> Result<ComplexMatrix> {
    loop {
        let g = ginibre(d, d, rng);
        // columns as vectors
        let mut cols: Vec<Vec<Complex64>> = (0..d)
            .map(|j| (0..d).map(|i| g.get(i, j)).collect())
            .collect();
        let mut ok = true;
        for j in 0..d {
            for k in 0..j {
                let proj: Complex64 = (0..d).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                let prev = cols[k].clone();
                for (x, v) in cols[j].iter_mut().zip(prev) {
                    *x -= proj * v;
                }
            }
            let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-8 {
                ok = false; // degenerate draw, retry (measure-zero event)
                break;
            }
            for z in cols[j].iter_mut() {
                *z /= norm;
            }
        }
        if ok {
            return ComplexMatrix::new(
                d,
                d,
                (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| cols[j][i])
                    .collect(),
            );
        }
    }
}

/// Random density matrix of the given rank: G·G†/tr with G a d×rank
/// Ginibre draw.
pub fn random_density(d: usize, rank: usize, seed: SamplerSeed) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::InvalidArgument(format!(
            "rank must lie in 1..={d}, got {rank}"
        )));
    }
    let mut rng = seed.rng();
    random_density_with(d, rank, &mut rng)
}

fn random_density_with(d: usize, rank: usize, rng: &mut ChaCha8Rng) -> Result<DensityMatrix> {
    let g = ginibre(d, rank, rng);
    let gram = g.matmul(&g.dagger())?;
    let tr = gram.trace().re;
    DensityMatrix::validate_default(gram.scale(Complex64::new(1.0 / tr, 0.0)))
}

/// Environment preparation for sweep trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvMode {
    /// Random rank-1 state.
    Pure,
    /// Random full-rank state.
    Mixed,
    /// I/d, for which every dilation is unital.
    MaximallyMixed,
}

impl EnvMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EnvMode::Pure => "pure",
            EnvMode::Mixed => "mixed",
            EnvMode::MaximallyMixed => "maxmixed",
        }
    }
}

/// A logged sweep failure.
#[derive(Debug, Clone)]
pub struct SweepViolation {
    pub trial_index: u64,
    pub description: String,
}

/// Aggregate outcome of an H-theorem sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub dim_system: usize,
    pub dim_reservoir: usize,
    pub env_mode: EnvMode,
    pub seed: u64,
    pub trials: u64,
    pub unital_count: u64,
    pub nonunital_count: u64,
    pub max_method_disagreement: f64,
    /// Minimum entropy change observed over unital trials; absent if no
    /// trial classified unital.
    pub min_entropy_delta_unital: Option<f64>,
    pub violations: Vec<SweepViolation>,
}

impl SweepResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per trial: draw a Haar unitary and an environment, compute the unitality
/// defect along both routes, and when the channel is unital probe the
/// entropy change on random input states. Violations are method
/// disagreement > 1e-9 or a unital channel with ΔS < −1e-9.
pub fn h_theorem_sweep(
    d_sys: usize,
    d_env: usize,
    trials: u64,
    env_mode: EnvMode,
    seed: u64,
) -> Result<SweepResult> {
    if d_sys == 0 || d_env == 0 {
        return Err(Error::InvalidArgument("dimensions must be positive".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let split = DimensionSplit::new(d_sys, d_env)?;

    let mut unital_count = 0u64;
    let mut max_disagreement = 0.0f64;
    let mut min_delta: Option<f64> = None;
    let mut violations = Vec::new();

    for trial in 0..trials {
        let mut rng = SamplerSeed::new(seed, trial).rng();
        let u_matrix = haar_unitary_with(split.composite(), &mut rng)?;
        let u = BipartiteUnitary::new(u_matrix, split, 1e-10)?;
        let env = match env_mode {
            EnvMode::Pure => random_density_with(d_env, 1, &mut rng)?,
            EnvMode::Mixed => random_density_with(d_env, d_env, &mut rng)?,
            EnvMode::MaximallyMixed => DensityMatrix::maximally_mixed(d_env)?,
        };

        let (direct, _comm, disagreement) =
            unitality_both_methods(&u, &env, SWEEP_UNITALITY_TOL)?;
        max_disagreement = max_disagreement.max(disagreement);
        if disagreement > 1e-9 {
            violations.push(SweepViolation {
                trial_index: trial,
                description: format!(
                    "method disagreement {disagreement:.3e} exceeds 1e-9"
                ),
            });
        }

        if direct.is_unital {
            unital_count += 1;
            let channel = KrausChannel::from_dilation(&u, &env)?;
            for _ in 0..20 {
                let rho = random_density_with(d_sys, d_sys, &mut rng)?;
                let delta = channel.entropy_delta(&rho)?;
                min_delta = Some(min_delta.map_or(delta, |m: f64| m.min(delta)));
                if delta < -1e-9 {
                    violations.push(SweepViolation {
                        trial_index: trial,
                        description: format!(
                            "unital channel decreased entropy: ΔS = {delta:.3e}"
                        ),
                    });
                }
            }
        }
    }

    Ok(SweepResult {
        dim_system: d_sys,
        dim_reservoir: d_env,
        env_mode,
        seed,
        trials,
        unital_count,
        nonunital_count: trials - unital_count,
        max_method_disagreement: max_disagreement,
        min_entropy_delta_unital: min_delta,
        violations,
    })
}
