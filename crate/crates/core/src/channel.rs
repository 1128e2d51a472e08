//! Quantum channels from bipartite dilations.
//!
//! A channel Φ(ρ) = Tr_R[U(ρ⊗π)U†] is represented three ways here, and the
//! unitality defect Φ(1)−1 is computed along two independent routes:
//!
//! * **Direct**: reduce U(1⊗π)U† over the reservoir and subtract the identity.
//! * **Commutator**: decompose U into reservoir-space blocks B_ji (one per
//!   system index pair) and sum reservoir-averaged commutators,
//!   defect[j][j'] = Σ_i ⟨[B†_{j'i}, B_{ji}]⟩_π.
//!
//! The two agree exactly when U is unitary; that equivalence is itself one
//! of the things the test suite checks, including its failure on
//! non-unitary input.

use crate::linalg::{hermitian_eigen, Complex64, ComplexMatrix, DimensionSplit, Subsystem, VALIDATION_TOL};
use crate::state::DensityMatrix;
use crate::{Error, Result};

/// Kraus operators with Frobenius norm below this are dropped; dilations of
/// low-rank environments produce exact-zero operators.
const KRAUS_PRUNE_TOL: f64 = 1e-12;
/// Environment eigenvalues below this contribute no Kraus operators.
const ENV_WEIGHT_CUTOFF: f64 = 1e-12;

/// A unitary on system ⊗ reservoir with its recorded dimension split.
#[derive(Debug, Clone)]
pub struct BipartiteUnitary {
    matrix: ComplexMatrix,
    split: DimensionSplit,
    unitarity_tol: f64,
}

impl BipartiteUnitary {
    pub fn new(matrix: ComplexMatrix, split: DimensionSplit, unitarity_tol: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.rows() != split.composite() {
            return Err(Error::Shape(format!(
                "unitary must be {0}x{0} for split {1}x{2}, got {3}x{4}",
                split.composite(),
                split.dim_system,
                split.dim_reservoir,
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_unitary(unitarity_tol) {
            let gram = matrix.dagger().matmul(&matrix)?;
            let defect = gram.frobenius_distance(&ComplexMatrix::identity(matrix.rows()))?;
            return Err(Error::Validation(format!(
                "unitarity violation: ‖U†U − I‖_F = {defect:.3e} exceeds tolerance {unitarity_tol:.3e}"
            )));
        }
        Ok(Self {
            matrix,
            split,
            unitarity_tol,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn split(&self) -> DimensionSplit {
        self.split
    }

    pub fn unitarity_tol(&self) -> f64 {
        self.unitarity_tol
    }

    /// Exchange the roles of system and reservoir by re-indexing the
    /// composite basis (system-major on both sides). This is how "the
    /// channel on the second subsystem" is obtained.
    pub fn swap_roles(&self) -> BipartiteUnitary {
        let (ds, dr) = (self.split.dim_system, self.split.dim_reservoir);
        let m = ComplexMatrix::from_fn(self.matrix.rows(), self.matrix.cols(), |row, col| {
            let (jr, js) = (row / ds, row % ds);
            let (ir, is) = (col / ds, col % ds);
            self.matrix.get(js * dr + jr, is * dr + ir)
        });
        BipartiteUnitary {
            matrix: m,
            split: self.split.swapped(),
            unitarity_tol: self.unitarity_tol,
        }
    }
}

/// The reservoir-space blocks of a bipartite unitary, one d_R×d_R block per
/// ordered system index pair (j, i).
///
/// Each stored block is the product of scattering amplitude and reservoir
/// operator, B_ji = s_ji·F_ji; the split between the two is a gauge choice
/// that cancels in every defect formula, so it is not represented.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    split: DimensionSplit,
    /// Row-major over (j, i): `blocks[j * d_S + i]`.
    blocks: Vec<ComplexMatrix>,
}

impl BlockDecomposition {
    /// Extract the blocks of a bipartite unitary by pure re-indexing:
    /// `block(j,i)[r,r'] = U[(j·d_R + r), (i·d_R + r')]`.
    pub fn from_unitary(u: &BipartiteUnitary) -> BlockDecomposition {
        Self::from_matrix(u.matrix(), u.split())
    }

    /// Block extraction from a raw composite matrix (no unitarity check);
    /// used by the negative tests for the cross-method equivalence.
    pub fn from_matrix(m: &ComplexMatrix, split: DimensionSplit) -> BlockDecomposition {
        let (ds, dr) = (split.dim_system, split.dim_reservoir);
        let mut blocks = Vec::with_capacity(ds * ds);
        for j in 0..ds {
            for i in 0..ds {
                blocks.push(ComplexMatrix::from_fn(dr, dr, |r, rp| {
                    m.get(j * dr + r, i * dr + rp)
                }));
            }
        }
        BlockDecomposition { split, blocks }
    }

    /// Build from a separate scattering-amplitude matrix and reservoir
    /// operator family; stores the products s_ji·F_ji.
    pub fn from_amplitudes(
        split: DimensionSplit,
        amplitudes: &ComplexMatrix,
        operators: &[ComplexMatrix],
    ) -> Result<BlockDecomposition> {
        let ds = split.dim_system;
        if amplitudes.rows() != ds || amplitudes.cols() != ds {
            return Err(Error::Shape(format!(
                "amplitude matrix must be {ds}x{ds}"
            )));
        }
        if operators.len() != ds * ds {
            return Err(Error::Shape(format!(
                "expected {} reservoir operators, got {}",
                ds * ds,
                operators.len()
            )));
        }
        let mut blocks = Vec::with_capacity(ds * ds);
        for j in 0..ds {
            for i in 0..ds {
                let f = &operators[j * ds + i];
                if f.rows() != split.dim_reservoir || f.cols() != split.dim_reservoir {
                    return Err(Error::Shape(format!(
                        "reservoir operator ({j},{i}) must be {0}x{0}",
                        split.dim_reservoir
                    )));
                }
                blocks.push(f.scale(amplitudes.get(j, i)));
            }
        }
        Ok(BlockDecomposition { split, blocks })
    }

    pub fn split(&self) -> DimensionSplit {
        self.split
    }

    pub fn block(&self, j: usize, i: usize) -> &ComplexMatrix {
        &self.blocks[j * self.split.dim_system + i]
    }

    /// Reassemble the composite matrix; exact inverse of the extraction.
    pub fn reassemble(&self) -> ComplexMatrix {
        let (ds, dr) = (self.split.dim_system, self.split.dim_reservoir);
        ComplexMatrix::from_fn(ds * dr, ds * dr, |row, col| {
            self.block(row / dr, col / dr).get(row % dr, col % dr)
        })
    }
}

/// A CPTP map as a non-empty list of Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    operators: Vec<ComplexMatrix>,
    tp_tol: f64,
}

impl KrausChannel {
    /// Wrap a Kraus set, checking trace preservation Σ K†K = I.
    pub fn new(operators: Vec<ComplexMatrix>, tp_tol: f64) -> Result<Self> {
        let first = operators
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus set".into()))?;
        let dim = first.rows();
        for k in &operators {
            if k.rows() != dim || k.cols() != dim {
                return Err(Error::Shape("Kraus operators must share one square shape".into()));
            }
        }
        let defect = Self::tp_defect(&operators)?;
        if defect > tp_tol {
            return Err(Error::Validation(format!(
                "trace preservation violated: ‖ΣK†K − I‖_F = {defect:.3e}"
            )));
        }
        Ok(Self {
            dim,
            operators,
            tp_tol,
        })
    }

    fn tp_defect(operators: &[ComplexMatrix]) -> Result<f64> {
        let dim = operators[0].rows();
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for k in operators {
            sum = sum.add(&k.dagger().matmul(k)?)?;
        }
        sum.frobenius_distance(&ComplexMatrix::identity(dim))
    }

    /// Stinespring-style extraction: diagonalize the environment state,
    /// `K_{m,k}[j,i] = √p_k ⟨j,m|U|i,e_k⟩`, one operator per reservoir
    /// output index m and environment eigenvector e_k with weight above the
    /// cutoff. Near-zero operators are pruned.
    pub fn from_dilation(u: &BipartiteUnitary, env: &DensityMatrix) -> Result<KrausChannel> {
        let split = u.split();
        let (ds, dr) = (split.dim_system, split.dim_reservoir);
        if env.dim() != dr {
            return Err(Error::Shape(format!(
                "environment dimension {} does not match reservoir dimension {dr}",
                env.dim()
            )));
        }
        let eig = hermitian_eigen(env.matrix(), VALIDATION_TOL)?;
        let mut operators = Vec::new();
        for (k, &p) in eig.values.iter().enumerate() {
            if p < ENV_WEIGHT_CUTOFF {
                continue;
            }
            let w = p.sqrt();
            for m in 0..dr {
                let op = ComplexMatrix::from_fn(ds, ds, |j, i| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for r in 0..dr {
                        acc += u.matrix().get(j * dr + m, i * dr + r) * eig.vectors.get(r, k);
                    }
                    acc * w
                });
                if op.frobenius_norm() >= KRAUS_PRUNE_TOL {
                    operators.push(op);
                }
            }
        }
        KrausChannel::new(operators, 1e-10)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn tp_tol(&self) -> f64 {
        self.tp_tol
    }

    /// Σ K M K† on a raw matrix (not necessarily a state).
    pub fn apply_to_matrix(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.rows() != self.dim || m.cols() != self.dim {
            return Err(Error::Shape(format!(
                "channel acts on {0}x{0} matrices, got {1}x{2}",
                self.dim,
                m.rows(),
                m.cols()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.dim, self.dim);
        for k in &self.operators {
            out = out.add(&k.matmul(m)?.matmul(&k.dagger())?)?;
        }
        Ok(out)
    }

    /// Apply the channel to a state; the output is re-validated.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.apply_to_matrix(rho.matrix())?;
        DensityMatrix::validate(out, rho.validation_tol().max(VALIDATION_TOL))
    }

    /// S(Φ(ρ)) − S(ρ) in nats; negative values witness non-unital evolution.
    pub fn entropy_delta(&self, rho: &DensityMatrix) -> Result<f64> {
        let after = self.apply(rho)?;
        Ok(after.von_neumann_entropy()? - rho.von_neumann_entropy()?)
    }
}

/// Which route produced a [`UnitalityReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnitalityMethod {
    /// Φ(1) computed by reducing U(1⊗π)U† over the reservoir.
    Direct,
    /// Reservoir-averaged block commutators Σ_i ⟨[B†_{j'i}, B_{ji}]⟩.
    Commutator,
}

impl UnitalityMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnitalityMethod::Direct => "direct",
            UnitalityMethod::Commutator => "commutator",
        }
    }
}

/// The defect matrix Φ(1) − 1 with its verdict.
#[derive(Debug, Clone)]
pub struct UnitalityReport {
    pub defect: ComplexMatrix,
    pub defect_norm: f64,
    pub is_unital: bool,
    pub method: UnitalityMethod,
    pub tolerance: f64,
    /// Per (j, j') commutator expectations, populated by the commutator
    /// method only.
    pub per_pair_contributions: Option<Vec<((usize, usize), Complex64)>>,
}

impl UnitalityReport {
    fn from_defect(
        defect: ComplexMatrix,
        method: UnitalityMethod,
        tolerance: f64,
        per_pair: Option<Vec<((usize, usize), Complex64)>>,
    ) -> Self {
        let defect_norm = defect.frobenius_norm();
        UnitalityReport {
            defect,
            defect_norm,
            is_unital: defect_norm <= tolerance,
            method,
            tolerance,
            per_pair_contributions: per_pair,
        }
    }

    /// Φ(1), reconstructed as defect + identity.
    pub fn phi_of_identity(&self) -> ComplexMatrix {
        self.defect
            .add(&ComplexMatrix::identity(self.defect.rows()))
            .expect("square defect")
    }
}

/// Unitality defect by the direct route: Φ(1) = Tr_R[U(1⊗π)U†].
pub fn unital_defect_direct(
    u: &BipartiteUnitary,
    env: &DensityMatrix,
    tolerance: f64,
) -> Result<UnitalityReport> {
    let defect = defect_direct_raw(u.matrix(), u.split(), env)?;
    Ok(UnitalityReport::from_defect(
        defect,
        UnitalityMethod::Direct,
        tolerance,
        None,
    ))
}

/// Direct defect on a raw composite matrix, no unitarity check. The public
/// entry point is [`unital_defect_direct`]; this exists so the equivalence
/// tests can probe non-unitary input.
pub fn defect_direct_raw(
    m: &ComplexMatrix,
    split: DimensionSplit,
    env: &DensityMatrix,
) -> Result<ComplexMatrix> {
    if env.dim() != split.dim_reservoir {
        return Err(Error::Shape(format!(
            "environment dimension {} does not match reservoir dimension {}",
            env.dim(),
            split.dim_reservoir
        )));
    }
    let ds = split.dim_system;
    let one_env = ComplexMatrix::identity(ds).kron(env.matrix());
    let evolved = one_env.conjugate_by(m)?;
    let phi_one = evolved.partial_trace(split, Subsystem::Reservoir)?;
    phi_one.sub(&ComplexMatrix::identity(ds))
}

/// Unitality defect by the commutator route:
/// defect[j][j'] = Σ_i tr(π·[B†_{j'i}, B_{ji}]).
pub fn unital_defect_commutator(
    blocks: &BlockDecomposition,
    env: &DensityMatrix,
    tolerance: f64,
) -> Result<UnitalityReport> {
    let split = blocks.split();
    if env.dim() != split.dim_reservoir {
        return Err(Error::Shape(format!(
            "environment dimension {} does not match reservoir dimension {}",
            env.dim(),
            split.dim_reservoir
        )));
    }
    let ds = split.dim_system;
    let mut defect = ComplexMatrix::zeros(ds, ds);
    let mut per_pair = Vec::with_capacity(ds * ds);
    for j in 0..ds {
        for jp in 0..ds {
            let mut total = Complex64::new(0.0, 0.0);
            for i in 0..ds {
                let b = blocks.block(j, i);
                let bp_dag = blocks.block(jp, i).dagger();
                let comm = bp_dag.matmul(b)?.sub(&b.matmul(&bp_dag)?)?;
                total += env.matrix().matmul(&comm)?.trace();
            }
            defect.set(j, jp, total);
            per_pair.push(((j, jp), total));
        }
    }
    Ok(UnitalityReport::from_defect(
        defect,
        UnitalityMethod::Commutator,
        tolerance,
        Some(per_pair),
    ))
}

/// Convenience: both defect reports plus their Frobenius disagreement.
pub fn unitality_both_methods(
    u: &BipartiteUnitary,
    env: &DensityMatrix,
    tolerance: f64,
) -> Result<(UnitalityReport, UnitalityReport, f64)> {
    let direct = unital_defect_direct(u, env, tolerance)?;
    let blocks = BlockDecomposition::from_unitary(u);
    let comm = unital_defect_commutator(&blocks, env, tolerance)?;
    let disagreement = direct.defect.frobenius_distance(&comm.defect)?;
    Ok((direct, comm, disagreement))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::EQUALITY_TOL;
    use crate::scenarios::{build_demon_measure_unitary, build_demon_feedback_unitary, build_heat_swap_unitary};

    const LN2: f64 = std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn demon_unitary() -> BipartiteUnitary {
        let u1 = build_demon_measure_unitary();
        let u2 = build_demon_feedback_unitary();
        let m = u2.matrix().matmul(u1.matrix()).unwrap();
        BipartiteUnitary::new(m, u1.split(), 1e-15).unwrap()
    }

    fn ket0_env() -> DensityMatrix {
        DensityMatrix::pure_state(&[c(1.0, 0.0), c(0.0, 0.0)], false).unwrap()
    }

    #[test]
    fn demon_block_table() {
        // blocks of the composed measure+feedback unitary
        let blocks = BlockDecomposition::from_unitary(&demon_unitary());
        assert_eq!(blocks.block(0, 0), &ComplexMatrix::basis_outer(2, 0, 0)); // F_gg = |0><0|
        assert_eq!(blocks.block(0, 1), &ComplexMatrix::basis_outer(2, 1, 0)); // F_ge = |1><0|
        assert_eq!(blocks.block(1, 0), &ComplexMatrix::basis_outer(2, 1, 1)); // F_eg = |1><1|
        assert_eq!(blocks.block(1, 1), &ComplexMatrix::basis_outer(2, 0, 1)); // F_ee = |0><1|
        // reassembly is exact
        assert_eq!(blocks.reassemble(), *demon_unitary().matrix());
    }

    #[test]
    fn swap_block_tables_both_subsystems() {
        let u = build_heat_swap_unitary();
        let b1 = BlockDecomposition::from_unitary(&u);
        assert_eq!(b1.block(0, 0), &ComplexMatrix::basis_outer(2, 0, 0));
        assert_eq!(b1.block(0, 1), &ComplexMatrix::basis_outer(2, 1, 1));
        assert_eq!(b1.block(1, 0), &ComplexMatrix::basis_outer(2, 0, 1));
        assert_eq!(b1.block(1, 1), &ComplexMatrix::basis_outer(2, 1, 0));

        let b2 = BlockDecomposition::from_unitary(&u.swap_roles());
        assert_eq!(b2.block(0, 0), &ComplexMatrix::basis_outer(2, 0, 0));
        assert_eq!(b2.block(0, 1), &ComplexMatrix::basis_outer(2, 1, 0));
        assert_eq!(b2.block(1, 0), &ComplexMatrix::basis_outer(2, 1, 1));
        assert_eq!(b2.block(1, 1), &ComplexMatrix::basis_outer(2, 0, 1));
    }

    #[test]
    fn identity_blocks() {
        let split = DimensionSplit::new(2, 2).unwrap();
        let u = BipartiteUnitary::new(ComplexMatrix::identity(4), split, 1e-15).unwrap();
        let b = BlockDecomposition::from_unitary(&u);
        assert_eq!(b.block(0, 0), &ComplexMatrix::identity(2));
        assert_eq!(b.block(1, 1), &ComplexMatrix::identity(2));
        assert_eq!(b.block(0, 1), &ComplexMatrix::zeros(2, 2));
        assert_eq!(b.block(1, 0), &ComplexMatrix::zeros(2, 2));
    }

    #[test]
    fn amplitude_constructor_matches_absorbed_blocks() {
        let u = demon_unitary();
        let absorbed = BlockDecomposition::from_unitary(&u);
        // split each block into an arbitrary amplitude and remainder; the
        // defect must not change.
        let amps = ComplexMatrix::from_fn(2, 2, |_, _| c(0.5, 0.0));
        let ops: Vec<ComplexMatrix> = (0..2)
            .flat_map(|j| (0..2).map(move |i| (j, i)))
            .map(|(j, i)| absorbed.block(j, i).scale(c(2.0, 0.0)))
            .collect();
        let rebuilt = BlockDecomposition::from_amplitudes(u.split(), &amps, &ops).unwrap();
        let env = ket0_env();
        let a = unital_defect_commutator(&absorbed, &env, EQUALITY_TOL).unwrap();
        let b = unital_defect_commutator(&rebuilt, &env, EQUALITY_TOL).unwrap();
        assert!(a.defect.frobenius_distance(&b.defect).unwrap() < 1e-12);
    }

    #[test]
    fn demon_kraus_from_dilation() {
        let phi = KrausChannel::from_dilation(&demon_unitary(), &ket0_env()).unwrap();
        assert_eq!(phi.operators().len(), 2);
        // canonical check Σ KK† = 2|g><g| (basis-independent of remixing)
        let mut kk = ComplexMatrix::zeros(2, 2);
        for k in phi.operators() {
            kk = kk.add(&k.matmul(&k.dagger()).unwrap()).unwrap();
        }
        let expected = ComplexMatrix::basis_outer(2, 0, 0).scale(c(2.0, 0.0));
        assert!(kk.frobenius_distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn identity_dilation_gives_identity_kraus() {
        let split = DimensionSplit::new(2, 3).unwrap();
        let u = BipartiteUnitary::new(ComplexMatrix::identity(6), split, 1e-15).unwrap();
        let env = DensityMatrix::maximally_mixed(3).unwrap();
        let phi = KrausChannel::from_dilation(&u, &env).unwrap();
        // zero operators pruned; survivors are scalar multiples of I
        let rho = DensityMatrix::validate_default(ComplexMatrix::diag(&[0.7, 0.3])).unwrap();
        let out = phi.apply(&rho).unwrap();
        assert!(out.matrix().frobenius_distance(rho.matrix()).unwrap() < 1e-12);
        assert_eq!(phi.operators().len(), 3);
    }

    #[test]
    fn swap_dilation_matches_partial_trace_oracle() {
        let u = build_heat_swap_unitary();
        let env = DensityMatrix::maximally_mixed(2).unwrap();
        let phi = KrausChannel::from_dilation(&u, &env).unwrap();
        assert_eq!(phi.operators().len(), 4);
        let rho = DensityMatrix::validate_default(ComplexMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c(if i == 0 { 0.6 } else { 0.4 }, 0.0)
            } else {
                c(0.2, if i < j { 0.1 } else { -0.1 })
            }
        }))
        .unwrap();
        let via_kraus = phi.apply(&rho).unwrap();
        // independent route: full dilation then partial trace
        let joint = rho.matrix().kron(env.matrix());
        let evolved = joint.conjugate_by(u.matrix()).unwrap();
        let reduced = evolved
            .partial_trace(u.split(), Subsystem::Reservoir)
            .unwrap();
        assert!(via_kraus.matrix().frobenius_distance(&reduced).unwrap() < 1e-10);
    }

    #[test]
    fn demon_channel_application() {
        let phi = KrausChannel::from_dilation(&demon_unitary(), &ket0_env()).unwrap();
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let out = phi.apply(&rho).unwrap();
        assert!(out
            .matrix()
            .frobenius_distance(&ComplexMatrix::basis_outer(2, 0, 0))
            .unwrap()
            < 1e-12);
        // entropy drop of exactly ln 2
        assert!((phi.entropy_delta(&rho).unwrap() + LN2).abs() < 1e-9);
    }

    #[test]
    fn heating_channel_application() {
        let u = build_heat_swap_unitary();
        let env = DensityMatrix::maximally_mixed(2).unwrap();
        let phi = KrausChannel::from_dilation(&u, &env).unwrap();
        let ground = DensityMatrix::pure_state(&[c(1.0, 0.0), c(0.0, 0.0)], false).unwrap();
        let out = phi.apply(&ground).unwrap();
        assert!(out
            .matrix()
            .frobenius_distance(&ComplexMatrix::diag(&[0.5, 0.5]))
            .unwrap()
            < 1e-12);
        assert!((phi.entropy_delta(&ground).unwrap() - LN2).abs() < 1e-9);
    }

    #[test]
    fn demon_defect_both_methods() {
        let u = demon_unitary();
        let env = ket0_env();
        let (direct, comm, disagreement) = unitality_both_methods(&u, &env, EQUALITY_TOL).unwrap();
        let expected = ComplexMatrix::diag(&[1.0, -1.0]);
        assert!(direct.defect.frobenius_distance(&expected).unwrap() < 1e-12);
        assert!(comm.defect.frobenius_distance(&expected).unwrap() < 1e-12);
        assert!(disagreement < 1e-12);
        assert!(!direct.is_unital);
        assert!(!comm.is_unital);
        // Φ(1) = 2|g><g|
        assert!(direct
            .phi_of_identity()
            .frobenius_distance(&ComplexMatrix::diag(&[2.0, 0.0]))
            .unwrap()
            < 1e-12);
        // per-pair table: (g,g) entry = 0 + 1
        let pairs = comm.per_pair_contributions.as_ref().unwrap();
        let gg = pairs.iter().find(|(p, _)| *p == (0, 0)).unwrap().1;
        assert!((gg - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn swap_defects() {
        let u = build_heat_swap_unitary();
        // first qubit, maximally mixed env: unital
        let env = DensityMatrix::maximally_mixed(2).unwrap();
        let (d1, c1, dis1) = unitality_both_methods(&u, &env, EQUALITY_TOL).unwrap();
        assert!(d1.is_unital && c1.is_unital && dis1 < 1e-12);
        // second qubit, env |0><0|: defect diag(1,-1)
        let u2 = u.swap_roles();
        let env0 = ket0_env();
        let (d2, c2, dis2) = unitality_both_methods(&u2, &env0, EQUALITY_TOL).unwrap();
        let expected = ComplexMatrix::diag(&[1.0, -1.0]);
        assert!(d2.defect.frobenius_distance(&expected).unwrap() < 1e-12);
        assert!(c2.defect.frobenius_distance(&expected).unwrap() < 1e-12);
        assert!(dis2 < 1e-12);
        assert!(!d2.is_unital);
    }

    #[test]
    fn unitarity_check_catches_broken_unitary() {
        // Eq.-(8)-style permutation with one term deleted is not unitary
        let mut m = demon_unitary().matrix().clone();
        m.set(1, 2, c(0.0, 0.0)); // drop the |g><e| ⊗ |1><0| term
        let split = DimensionSplit::new(2, 2).unwrap();
        assert!(!m.is_unitary(1.0 - 1e-9));
        assert!(matches!(
            BipartiteUnitary::new(m, split, 1e-9),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn method_equivalence_fails_without_unitarity() {
        // same broken matrix, admitted by a huge tolerance: the two defect
        // routes must now disagree, showing the equivalence rests on
        // unitarity
        let mut m = demon_unitary().matrix().clone();
        m.set(1, 2, c(0.0, 0.0));
        let split = DimensionSplit::new(2, 2).unwrap();
        let env = DensityMatrix::maximally_mixed(2).unwrap();
        let direct = defect_direct_raw(&m, split, &env).unwrap();
        let blocks = BlockDecomposition::from_matrix(&m, split);
        let comm = unital_defect_commutator(&blocks, &env, EQUALITY_TOL).unwrap();
        assert!(direct.frobenius_distance(&comm.defect).unwrap() > 1e-3);
    }

    #[test]
    fn defect_is_hermitian_and_traceless() {
        let u = demon_unitary();
        let env = ket0_env();
        let rep = unital_defect_direct(&u, &env, EQUALITY_TOL).unwrap();
        assert!(rep.defect.hermiticity_defect() < 1e-9);
        assert!(rep.defect.trace().norm() < 1e-9);
    }

    #[test]
    fn kraus_rejects_non_tp_set() {
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        assert!(matches!(
            KrausChannel::new(vec![half], 1e-10),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            KrausChannel::new(vec![], 1e-10),
            Err(Error::InvalidArgument(_))
        ));
    }
}
