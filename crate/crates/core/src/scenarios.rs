//! Executable reproductions of the two worked scenarios: the single-qubit
//! Maxwell demon cycle (measure, then conditional feedback) and the
//! two-qubit heating/cooling swap. Each run emits a stage-by-stage report
//! with entropy and heat bookkeeping plus named pass/fail verdicts.

use crate::channel::{unitality_both_methods, BipartiteUnitary, KrausChannel, UnitalityReport};
use crate::linalg::{Complex64, ComplexMatrix, DimensionSplit, Subsystem, EQUALITY_TOL};
use crate::state::DensityMatrix;
use crate::{Error, Result};

const LN2: f64 = std::f64::consts::LN_2;

/// Parameters of the demon cycle.
#[derive(Debug, Clone, Copy)]
pub struct DemonConfig {
    /// Excited-state population of the qubit after thermalization at the
    /// minimum level splitting; ½ in the ideal small-gap limit.
    pub rho_ee: f64,
    /// Bath temperature in k_B = 1 units, used for heat bookkeeping.
    pub temperature: f64,
    /// Verdict tolerance.
    pub tol: f64,
}

impl Default for DemonConfig {
    fn default() -> Self {
        Self {
            rho_ee: 0.5,
            temperature: 1.0,
            tol: EQUALITY_TOL,
        }
    }
}

impl DemonConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rho_ee) || !self.rho_ee.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rho_ee must lie in [0, 1], got {}",
                self.rho_ee
            )));
        }
        if !self.temperature.is_finite() || self.temperature <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "temperature must be positive, got {}",
                self.temperature
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidArgument("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// One snapshot of the composite system during a scenario.
#[derive(Debug, Clone)]
pub struct Stage {
    pub label: String,
    pub joint_state: DensityMatrix,
    pub system_reduced: DensityMatrix,
    pub env_reduced: DensityMatrix,
    pub system_entropy_nats: f64,
    pub env_entropy_nats: f64,
}

impl Stage {
    fn from_joint(label: &str, joint: DensityMatrix, split: DimensionSplit) -> Result<Stage> {
        let tol = joint.validation_tol();
        let sys = DensityMatrix::validate(
            joint.matrix().partial_trace(split, Subsystem::Reservoir)?,
            tol,
        )?;
        let env = DensityMatrix::validate(
            joint.matrix().partial_trace(split, Subsystem::System)?,
            tol,
        )?;
        let system_entropy_nats = sys.von_neumann_entropy()?;
        let env_entropy_nats = env.von_neumann_entropy()?;
        Ok(Stage {
            label: label.to_string(),
            joint_state: joint,
            system_reduced: sys,
            env_reduced: env,
            system_entropy_nats,
            env_entropy_nats,
        })
    }
}

/// A named pass/fail check with a human-readable magnitude.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn check(name: &str, error: f64, tol: f64) -> Verdict {
        Verdict {
            name: name.to_string(),
            passed: error <= tol,
            detail: format!("error {error:.3e} vs tolerance {tol:.1e}"),
        }
    }
}

/// Full record of a scenario run.
#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub name: String,
    pub stages: Vec<Stage>,
    /// Unitality reports per analyzed channel, labelled.
    pub unitality: Vec<(String, UnitalityReport)>,
    /// Heat extracted from the bath (positive = out of the bath), nats·T.
    pub heat_extracted: f64,
    /// Work performed by the controller; zero in the ideal small-gap limit.
    pub work_bookkeeping: Option<f64>,
    /// Entropy parked in the auxiliary system at cycle end; it must leave
    /// the cycle elsewhere (the reset is bookkeeping, not dynamics).
    pub residual_env_entropy_nats: Option<f64>,
    pub verdicts: Vec<Verdict>,
}

impl ScenarioReport {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

fn qubit_split() -> DimensionSplit {
    DimensionSplit::new(2, 2).expect("static split")
}

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// The measurement unitary: the demon flips iff the qubit is excited,
/// |g⟩⟨g|⊗I + |e⟩⟨e|⊗X on qubit ⊗ demon.
pub fn build_demon_measure_unitary() -> BipartiteUnitary {
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, re(1.0)); // |g0><g0|
    m.set(1, 1, re(1.0)); // |g1><g1|
    m.set(2, 3, re(1.0)); // |e0><e1|
    m.set(3, 2, re(1.0)); // |e1><e0|
    BipartiteUnitary::new(m, qubit_split(), 1e-15).expect("permutation matrix")
}

/// The feedback unitary: the qubit flips iff the demon recorded |1⟩,
/// I⊗|0⟩⟨0| + X⊗|1⟩⟨1|.
pub fn build_demon_feedback_unitary() -> BipartiteUnitary {
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, re(1.0)); // |g0><g0|
    m.set(2, 2, re(1.0)); // |e0><e0|
    m.set(1, 3, re(1.0)); // |g1><e1|
    m.set(3, 1, re(1.0)); // |e1><g1|
    BipartiteUnitary::new(m, qubit_split(), 1e-15).expect("permutation matrix")
}

/// The composed measure-then-feedback unitary for the full demon stroke.
pub fn build_demon_cycle_unitary() -> BipartiteUnitary {
    let u1 = build_demon_measure_unitary();
    let u2 = build_demon_feedback_unitary();
    let m = u2.matrix().matmul(u1.matrix()).expect("4x4 product");
    BipartiteUnitary::new(m, qubit_split(), 1e-15).expect("product of permutations")
}

/// The two-qubit heating/cooling unitary. Not the symmetric SWAP gate: its
/// action on the basis is 00→00, 01→10, 10→11, 11→01.
pub fn build_heat_swap_unitary() -> BipartiteUnitary {
    let mut m = ComplexMatrix::zeros(4, 4);
    m.set(0, 0, re(1.0)); // |00><00|
    m.set(2, 1, re(1.0)); // |10><01|
    m.set(3, 2, re(1.0)); // |11><10|
    m.set(1, 3, re(1.0)); // |01><11|
    BipartiteUnitary::new(m, qubit_split(), 1e-15).expect("permutation matrix")
}

fn entropy_of_populations(p: &[f64]) -> f64 {
    p.iter()
        .map(|&x| if x > 0.0 { -x * x.ln() } else { 0.0 })
        .sum()
}

/// Run the five-stage demon cycle and check it against the expected states,
/// defects, and entropy transfers.
pub fn run_demon_cycle(cfg: &DemonConfig) -> Result<ScenarioReport> {
    cfg.validate()?;
    let split = qubit_split();
    let rho_gg = 1.0 - cfg.rho_ee;
    let tol = cfg.tol;

    let ground = ComplexMatrix::basis_outer(2, 0, 0);
    let demon0 = ComplexMatrix::basis_outer(2, 0, 0);
    let qubit_thermal = ComplexMatrix::diag(&[rho_gg, cfg.rho_ee]);

    // t0: point A, qubit pinned to the ground state, demon reset.
    let t0 = DensityMatrix::validate_default(ground.kron(&demon0))?;
    // t1: after the adiabatic sweep and bath contact (parametric bookkeeping).
    let t1 = DensityMatrix::validate_default(qubit_thermal.kron(&demon0))?;

    let u1 = build_demon_measure_unitary();
    let u2 = build_demon_feedback_unitary();
    let t2 = DensityMatrix::validate_default(t1.matrix().conjugate_by(u1.matrix())?)?;
    let t3 = DensityMatrix::validate_default(t2.matrix().conjugate_by(u2.matrix())?)?;

    // Expected forms: t2 = ρ_gg|g0><g0| + ρ_ee|e1><e1|,
    // t3 = |g><g| ⊗ diag(ρ_gg, ρ_ee).
    let t2_expected = ComplexMatrix::diag(&[rho_gg, 0.0, 0.0, cfg.rho_ee]);
    let t3_expected = ground.kron(&ComplexMatrix::diag(&[rho_gg, cfg.rho_ee]));

    let stages = vec![
        Stage::from_joint("t0", t0, split)?,
        Stage::from_joint("t1", t1, split)?,
        Stage::from_joint("t2", t2.clone(), split)?,
        Stage::from_joint("t3", t3.clone(), split)?,
    ];

    // Qubit channel over the measure+feedback stroke, demon as reservoir.
    let u = build_demon_cycle_unitary();
    let env = DensityMatrix::validate_default(demon0.clone())?;
    let (direct, comm, disagreement) = unitality_both_methods(&u, &env, tol)?;
    let expected_defect = ComplexMatrix::diag(&[1.0, -1.0]);

    let s_x = entropy_of_populations(&[rho_gg, cfg.rho_ee]);
    let qubit_delta = stages[3].system_entropy_nats - stages[1].system_entropy_nats;
    let demon_delta = stages[3].env_entropy_nats - stages[1].env_entropy_nats;
    let heat_extracted = cfg.temperature * s_x;

    let verdicts = vec![
        Verdict::check(
            "t2 state matches expected",
            t2.matrix().frobenius_distance(&t2_expected)?,
            tol,
        ),
        Verdict::check(
            "t3 state matches expected",
            t3.matrix().frobenius_distance(&t3_expected)?,
            tol,
        ),
        Verdict::check(
            "direct defect matches diag(1,-1)",
            direct.defect.frobenius_distance(&expected_defect)?,
            tol,
        ),
        Verdict::check(
            "commutator defect matches diag(1,-1)",
            comm.defect.frobenius_distance(&expected_defect)?,
            tol,
        ),
        Verdict::check("unitality methods agree", disagreement, 1e-10),
        Verdict::check("qubit entropy change equals -S_X", (qubit_delta + s_x).abs(), tol),
        Verdict::check("demon entropy change equals +S_X", (demon_delta - s_x).abs(), tol),
    ];

    Ok(ScenarioReport {
        name: "maxwell-demon".to_string(),
        stages,
        unitality: vec![
            ("qubit channel (direct)".to_string(), direct),
            ("qubit channel (commutator)".to_string(), comm),
        ],
        heat_extracted,
        work_bookkeeping: Some(0.0),
        residual_env_entropy_nats: Some(s_x),
        verdicts,
    })
}

/// Run the two-qubit heating/cooling process and analyze both per-qubit
/// channels.
pub fn run_heating_cooling(tol: f64) -> Result<ScenarioReport> {
    let split = qubit_split();
    let ket0 = ComplexMatrix::basis_outer(2, 0, 0);
    let half_mixed = ComplexMatrix::diag(&[0.5, 0.5]);

    let initial = DensityMatrix::validate_default(ket0.kron(&half_mixed))?;
    let u = build_heat_swap_unitary();
    let final_state = DensityMatrix::validate_default(initial.matrix().conjugate_by(u.matrix())?)?;
    let final_expected = half_mixed.kron(&ket0);

    let stages = vec![
        Stage::from_joint("initial", initial.clone(), split)?,
        Stage::from_joint("final", final_state.clone(), split)?,
    ];

    // Heating channel on qubit 1: qubit 2 (initially maximally mixed) is
    // the reservoir.
    let env1 = DensityMatrix::maximally_mixed(2)?;
    let (heat_direct, heat_comm, heat_dis) = unitality_both_methods(&u, &env1, tol)?;

    // Cooling channel on qubit 2: roles swapped, qubit 1 (initially |0><0|)
    // is the reservoir.
    let u_swapped = u.swap_roles();
    let env2 = DensityMatrix::validate_default(ket0.clone())?;
    let (cool_direct, cool_comm, cool_dis) = unitality_both_methods(&u_swapped, &env2, tol)?;
    let cool_expected = ComplexMatrix::diag(&[1.0, -1.0]);

    let q1_delta = stages[1].system_entropy_nats - stages[0].system_entropy_nats;
    let q2_delta = stages[1].env_entropy_nats - stages[0].env_entropy_nats;
    let joint_delta = final_state.von_neumann_entropy()? - initial.von_neumann_entropy()?;

    let verdicts = vec![
        Verdict::check(
            "final state matches expected",
            final_state.matrix().frobenius_distance(&final_expected)?,
            tol,
        ),
        Verdict::check("heating channel is unital (direct)", heat_direct.defect_norm, tol),
        Verdict::check(
            "heating channel is unital (commutator)",
            heat_comm.defect_norm,
            tol,
        ),
        Verdict::check(
            "cooling defect matches diag(1,-1) (direct)",
            cool_direct.defect.frobenius_distance(&cool_expected)?,
            tol,
        ),
        Verdict::check(
            "cooling defect matches diag(1,-1) (commutator)",
            cool_comm.defect.frobenius_distance(&cool_expected)?,
            tol,
        ),
        Verdict::check("heating methods agree", heat_dis, 1e-10),
        Verdict::check("cooling methods agree", cool_dis, 1e-10),
        Verdict::check("qubit 1 entropy change equals +ln 2", (q1_delta - LN2).abs(), tol),
        Verdict::check("qubit 2 entropy change equals -ln 2", (q2_delta + LN2).abs(), tol),
        Verdict::check("joint entropy unchanged", joint_delta.abs(), tol),
    ];

    Ok(ScenarioReport {
        name: "heating-cooling".to_string(),
        stages,
        unitality: vec![
            ("qubit 1 heating (direct)".to_string(), heat_direct),
            ("qubit 1 heating (commutator)".to_string(), heat_comm),
            ("qubit 2 cooling (direct)".to_string(), cool_direct),
            ("qubit 2 cooling (commutator)".to_string(), cool_comm),
        ],
        heat_extracted: 0.0,
        work_bookkeeping: None,
        residual_env_entropy_nats: None,
        verdicts,
    })
}

/// The Kraus channel of the demon's qubit stroke, exposed for entropy tests.
pub fn demon_qubit_channel() -> Result<KrausChannel> {
    let env = DensityMatrix::pure_state(&[re(1.0), re(0.0)], false)?;
    KrausChannel::from_dilation(&build_demon_cycle_unitary(), &env)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_unitary_action() {
        let u1 = build_demon_measure_unitary();
        assert!(u1.matrix().is_unitary(1e-15));
        // U1² = I
        let sq = u1.matrix().matmul(u1.matrix()).unwrap();
        assert_eq!(sq, ComplexMatrix::identity(4));
        // ground branch untouched
        let g0 = ComplexMatrix::basis_outer(4, 0, 0);
        assert_eq!(g0.conjugate_by(u1.matrix()).unwrap(), g0);
        // Eq.-(2)-style input at ρ_ee = ½ goes to diag(½,0,0,½)
        let r1 = ComplexMatrix::diag(&[0.5, 0.5]).kron(&ComplexMatrix::basis_outer(2, 0, 0));
        let r2 = r1.conjugate_by(u1.matrix()).unwrap();
        assert_eq!(r2, ComplexMatrix::diag(&[0.5, 0.0, 0.0, 0.5]));
    }

    #[test]
    fn feedback_unitary_action() {
        let u2 = build_demon_feedback_unitary();
        assert!(u2.matrix().is_unitary(1e-15));
        let g0 = ComplexMatrix::basis_outer(4, 0, 0);
        assert_eq!(g0.conjugate_by(u2.matrix()).unwrap(), g0);
        // measured state goes to |g><g| ⊗ diag(ρ_gg, ρ_ee)
        let r2 = ComplexMatrix::diag(&[0.25, 0.0, 0.0, 0.75]);
        let r3 = r2.conjugate_by(u2.matrix()).unwrap();
        let expected =
            ComplexMatrix::basis_outer(2, 0, 0).kron(&ComplexMatrix::diag(&[0.25, 0.75]));
        assert_eq!(r3, expected);
    }

    #[test]
    fn composed_unitary_matches_four_term_form() {
        let u = build_demon_cycle_unitary();
        // |g><g|⊗|0><0| + |g><e|⊗|1><0| + |e><g|⊗|1><1| + |e><e|⊗|0><1|
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected.set(0, 0, re(1.0));
        expected.set(1, 2, re(1.0));
        expected.set(3, 1, re(1.0));
        expected.set(2, 3, re(1.0));
        assert_eq!(u.matrix(), &expected);
        assert!(u.matrix().is_unitary(1e-15));
    }

    #[test]
    fn heat_swap_unitary_columns() {
        let u = build_heat_swap_unitary();
        assert!(u.matrix().is_unitary(1e-15));
        // |00> fixed, |11> -> |10>
        assert_eq!(u.matrix().get(0, 0), re(1.0));
        assert_eq!(u.matrix().get(2, 3), re(0.0));
        assert_eq!(u.matrix().get(3, 2), re(1.0)); // |10> -> |11>
        assert_eq!(u.matrix().get(2, 1), re(1.0)); // |01> -> |10>
        assert_eq!(u.matrix().get(1, 3), re(1.0)); // |11> -> |01>
    }

    #[test]
    fn demon_cycle_default_config() {
        let report = run_demon_cycle(&DemonConfig::default()).unwrap();
        assert!(report.all_passed(), "{:#?}", report.verdicts);
        assert!((report.heat_extracted - LN2).abs() < 1e-12);
        // entropy trajectory: qubit ln2 -> 0, demon 0 -> ln2
        assert!((report.stages[1].system_entropy_nats - LN2).abs() < 1e-9);
        assert!(report.stages[3].system_entropy_nats.abs() < 1e-9);
        assert!(report.stages[1].env_entropy_nats.abs() < 1e-9);
        assert!((report.stages[3].env_entropy_nats - LN2).abs() < 1e-9);
        assert!((report.residual_env_entropy_nats.unwrap() - LN2).abs() < 1e-12);
    }

    #[test]
    fn demon_cycle_cold_limit() {
        let cfg = DemonConfig {
            rho_ee: 0.0,
            ..DemonConfig::default()
        };
        let report = run_demon_cycle(&cfg).unwrap();
        assert!(report.all_passed());
        assert!(report.heat_extracted.abs() < 1e-12);
        for stage in &report.stages {
            assert!(stage.system_entropy_nats.abs() < 1e-9);
            assert!(stage.env_entropy_nats.abs() < 1e-9);
        }
    }

    #[test]
    fn demon_cycle_quarter_population() {
        let cfg = DemonConfig {
            rho_ee: 0.25,
            temperature: 2.0,
            ..DemonConfig::default()
        };
        let report = run_demon_cycle(&cfg).unwrap();
        assert!(report.all_passed(), "{:#?}", report.verdicts);
        // scalar entropy oracle
        let s_x = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        let qubit_delta =
            report.stages[3].system_entropy_nats - report.stages[1].system_entropy_nats;
        assert!((qubit_delta + s_x).abs() < 1e-12);
        let heat = 2.0 * (0.75 * (4.0f64 / 3.0).ln() + 0.25 * 4.0f64.ln());
        assert!((report.heat_extracted - heat).abs() < 1e-12);
    }

    #[test]
    fn demon_final_structure_for_any_population() {
        for rho_ee in [0.0, 0.1, 0.3, 0.5, 0.77, 1.0] {
            let cfg = DemonConfig {
                rho_ee,
                ..DemonConfig::default()
            };
            let report = run_demon_cycle(&cfg).unwrap();
            let last = report.stages.last().unwrap();
            assert!(
                last.system_reduced
                    .matrix()
                    .frobenius_distance(&ComplexMatrix::basis_outer(2, 0, 0))
                    .unwrap()
                    < 1e-12
            );
            let demon_expected = ComplexMatrix::diag(&[1.0 - rho_ee, rho_ee]);
            assert!(
                last.env_reduced
                    .matrix()
                    .frobenius_distance(&demon_expected)
                    .unwrap()
                    < 1e-12
            );
        }
    }

    #[test]
    fn demon_config_validation() {
        assert!(run_demon_cycle(&DemonConfig {
            rho_ee: 1.5,
            ..DemonConfig::default()
        })
        .is_err());
        assert!(run_demon_cycle(&DemonConfig {
            temperature: -1.0,
            ..DemonConfig::default()
        })
        .is_err());
    }

    #[test]
    fn heating_cooling_report() {
        let report = run_heating_cooling(EQUALITY_TOL).unwrap();
        assert!(report.all_passed(), "{:#?}", report.verdicts);
        assert!(report.stages[0].system_entropy_nats.abs() < 1e-9);
        assert!((report.stages[1].system_entropy_nats - LN2).abs() < 1e-9);
        assert!((report.stages[0].env_entropy_nats - LN2).abs() < 1e-9);
        assert!(report.stages[1].env_entropy_nats.abs() < 1e-9);
        // Φ¹(1) = I and Φ²(1) = diag(2,0)
        let heat = &report.unitality[0].1;
        assert!(heat
            .phi_of_identity()
            .frobenius_distance(&ComplexMatrix::identity(2))
            .unwrap()
            < 1e-12);
        let cool = &report.unitality[2].1;
        assert!(cool
            .phi_of_identity()
            .frobenius_distance(&ComplexMatrix::diag(&[2.0, 0.0]))
            .unwrap()
            < 1e-12);
    }

    #[test]
    fn joint_entropy_invariant_under_unitary_stages() {
        let report = run_demon_cycle(&DemonConfig::default()).unwrap();
        let s: Vec<f64> = report.stages[1..]
            .iter()
            .map(|st| st.joint_state.von_neumann_entropy().unwrap())
            .collect();
        for w in s.windows(2) {
            assert!((w[0] - w[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn subsystem_entropy_changes_cancel_in_heating_cooling() {
        let report = run_heating_cooling(EQUALITY_TOL).unwrap();
        let q1 = report.stages[1].system_entropy_nats - report.stages[0].system_entropy_nats;
        let q2 = report.stages[1].env_entropy_nats - report.stages[0].env_entropy_nats;
        assert!((q1 + q2).abs() < 1e-9);
    }
}
