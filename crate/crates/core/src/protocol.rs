//! Exact density-matrix simulation of the two-copy distillation round.
//!
//! Alice holds the first qubit of each pair, Bob the second. The 16-dim joint
//! space is ordered `(A_source, B_source, A_ancilla, B_ancilla)`, i.e. the
//! joint state is `source ⊗ ancilla`. One round is:
//!
//! 1. Alice flips her qubit of one copy (`σx ⊗ 1`).
//! 2. Both parties apply a CNOT with their source qubit as control and their
//!    ancilla qubit as target. The control is active on `|−⟩`.
//! 3. Both measure their ancilla qubit in the `{|+⟩, |−⟩}` basis and keep the
//!    source only for accepted outcomes.
//! 4. Optionally Alice applies `σz` to the kept source.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{pauli, CMatrix};
use crate::states::{concurrence, validate, DensityMatrix};

/// Below this probability an outcome has no well-defined conditional state.
pub const NEGLIGIBLE_PROB: f64 = 1e-14;

/// Ancilla measurement result, Alice's value first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    PP,
    PM,
    MP,
    MM,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [Outcome::PP, Outcome::PM, Outcome::MP, Outcome::MM];

    /// Position of `|outcome⟩` in the ancilla's product basis.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Outcome::PP => "++",
            Outcome::PM => "+-",
            Outcome::MP => "-+",
            Outcome::MM => "--",
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NotTarget {
    Source,
    Ancilla,
}

/// Which control value triggers the CNOT target flip.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlLevel {
    /// `|−⟩` (computational 1) flips the target. This is the protocol's
    /// convention.
    Minus,
    Plus,
}

/// Post-selection policies with closed-form predictions on the rank-2 family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Accept `+−` only.
    StrictPM,
    /// Accept `+−` and `−+`.
    BothPMMP,
}

impl Policy {
    pub fn accepted(self) -> Vec<Outcome> {
        match self {
            Policy::StrictPM => vec![Outcome::PM],
            Policy::BothPMMP => vec![Outcome::PM, Outcome::MP],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolConfig {
    pub not_target: NotTarget,
    pub accepted: Vec<Outcome>,
    pub final_sz: bool,
}

impl ProtocolConfig {
    pub fn new(not_target: NotTarget, accepted: Vec<Outcome>, final_sz: bool) -> Result<Self> {
        if accepted.is_empty() {
            return Err(Error::InvalidMixture("no accepted outcomes".into()));
        }
        Ok(Self { not_target, accepted, final_sz })
    }

    pub fn with_policy(not_target: NotTarget, policy: Policy, final_sz: bool) -> Self {
        Self { not_target, accepted: policy.accepted(), final_sz }
    }

    /// NOT on the source copy, both outcomes `+−`/`−+` accepted.
    pub fn source_not(policy: Policy) -> Self {
        Self::with_policy(NotTarget::Source, policy, false)
    }

    /// NOT on the ancilla, `+−` only, `σz` correction: turns two copies of
    /// the decayed singlet into the singlet.
    pub fn singlet_recovery() -> Self {
        Self::with_policy(NotTarget::Ancilla, Policy::StrictPM, true)
    }
}

/// One measurement branch. `source` is `None` when `prob` is below
/// [`NEGLIGIBLE_PROB`] and the conditional state cannot be normalized.
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcome: Outcome,
    pub prob: f64,
    pub source: Option<DensityMatrix>,
}

#[derive(Clone, Debug)]
pub struct ProtocolResult {
    pub outcome_probs: BTreeMap<Outcome, f64>,
    /// Source state conditioned on each resolvable outcome, before any `σz`.
    pub conditional_sources: BTreeMap<Outcome, DensityMatrix>,
    pub accepted_prob: f64,
    /// Normalized mixture over the accepted outcomes, after the optional `σz`.
    pub distilled: DensityMatrix,
    pub distilled_concurrence: f64,
}

fn local_on_alice(op: &CMatrix, rho: &DensityMatrix) -> DensityMatrix {
    let u = op.tensor(&CMatrix::identity(2)).unwrap();
    // unitary conjugation preserves validity up to roundoff
    DensityMatrix::new(rho.matrix().conjugate_by(&u).unwrap()).expect("unitary image of a state")
}

/// `(σx ⊗ 1) ρ (σx ⊗ 1)`
pub fn unilateral_not(rho: &DensityMatrix) -> DensityMatrix {
    local_on_alice(&pauli::x(), rho)
}

/// `(σz ⊗ 1) ρ (σz ⊗ 1)`
pub fn sz_rotation(rho: &DensityMatrix) -> DensityMatrix {
    local_on_alice(&pauli::z(), rho)
}

/// Permutation matrix of the two CNOTs on the joint basis.
pub fn bilateral_cnot_unitary(control: ControlLevel) -> CMatrix {
    let active = match control {
        ControlLevel::Minus => 1,
        ControlLevel::Plus => 0,
    };
    let mut u = CMatrix::zeros(16);
    for input in 0..16usize {
        let (a_s, b_s) = ((input >> 3) & 1, (input >> 2) & 1);
        let mut output = input;
        if a_s == active {
            output ^= 0b10;
        }
        if b_s == active {
            output ^= 0b01;
        }
        u[(output, input)] = 1.0.into();
    }
    u
}

pub fn bilateral_cnot(joint: &CMatrix) -> Result<CMatrix> {
    bilateral_cnot_with(joint, ControlLevel::Minus)
}

pub fn bilateral_cnot_with(joint: &CMatrix, control: ControlLevel) -> Result<CMatrix> {
    if joint.dim() != 16 {
        return Err(Error::DimensionMismatch { left: 16, right: joint.dim() });
    }
    joint.conjugate_by(&bilateral_cnot_unitary(control))
}

/// `(1 ⊗ |o⟩⟨o|) joint (1 ⊗ |o⟩⟨o|)` traced over the ancilla: the source
/// block weighted by the outcome probability.
fn unnormalized_source(joint: &CMatrix, outcome: Outcome) -> CMatrix {
    let mut proj = CMatrix::zeros(4);
    proj[(outcome.index(), outcome.index())] = 1.0.into();
    let p = CMatrix::identity(4).tensor(&proj).unwrap();
    let sandwich = &(&p * joint) * &p;
    sandwich.partial_trace_second(4, 4).unwrap()
}

/// Ancilla measurement in the product basis.
pub fn measure_ancilla(joint: &CMatrix) -> Result<[Branch; 4]> {
    if joint.dim() != 16 {
        return Err(Error::DimensionMismatch { left: 16, right: joint.dim() });
    }
    validate(joint)?;
    let total = joint.trace().re;
    Ok(Outcome::ALL.map(|outcome| {
        let block = unnormalized_source(joint, outcome);
        let prob = block.trace().re / total;
        let source = (prob >= NEGLIGIBLE_PROB)
            .then(|| DensityMatrix::new(block.scale_real(1.0 / block.trace().re).hermitian_part()).ok())
            .flatten();
        Branch { outcome, prob, source }
    }))
}

pub fn run_protocol(source: &DensityMatrix, ancilla: &DensityMatrix, cfg: &ProtocolConfig) -> Result<ProtocolResult> {
    run_protocol_with(source, ancilla, cfg, ControlLevel::Minus)
}

/// [`run_protocol`] with an explicit CNOT control convention.
pub fn run_protocol_with(
    source: &DensityMatrix,
    ancilla: &DensityMatrix,
    cfg: &ProtocolConfig,
    control: ControlLevel,
) -> Result<ProtocolResult> {
    if cfg.accepted.is_empty() {
        return Err(Error::InvalidMixture("no accepted outcomes".into()));
    }
    let (source, ancilla) = match cfg.not_target {
        NotTarget::Source => (unilateral_not(source), ancilla.clone()),
        NotTarget::Ancilla => (source.clone(), unilateral_not(ancilla)),
    };
    let joint = source.matrix().tensor(ancilla.matrix())?;
    let joint = bilateral_cnot_with(&joint, control)?;
    let branches = measure_ancilla(&joint)?;

    let outcome_probs: BTreeMap<_, _> = branches.iter().map(|b| (b.outcome, b.prob)).collect();
    let conditional_sources: BTreeMap<_, _> =
        branches.iter().filter_map(|b| b.source.clone().map(|s| (b.outcome, s))).collect();

    let mut accepted: Vec<Outcome> = cfg.accepted.clone();
    accepted.sort();
    accepted.dedup();
    let accepted_prob: f64 = accepted.iter().map(|o| outcome_probs[o]).sum();
    if accepted_prob < NEGLIGIBLE_PROB {
        return Err(Error::ProtocolFailure { accepted_prob });
    }

    let mut kept = CMatrix::zeros(4);
    for o in &accepted {
        kept = &kept + &unnormalized_source(&joint, *o);
    }
    let kept = kept.scale_real(1.0 / kept.trace().re).hermitian_part();
    let mut distilled = DensityMatrix::new(kept)?;
    if cfg.final_sz {
        distilled = sz_rotation(&distilled);
    }
    let distilled_concurrence = concurrence(&distilled);

    Ok(ProtocolResult { outcome_probs, conditional_sources, accepted_prob, distilled, distilled_concurrence })
}

/// Success probability and distilled concurrence on two copies of
/// `(1 − p1)|++⟩⟨++| + p1 |Φ⁺⟩⟨Φ⁺|` with the NOT on the source.
pub fn predicted_rank2(p1: f64, policy: Policy) -> (f64, f64) {
    match policy {
        Policy::StrictPM => (p1 * p1 / 2.0, 1.0),
        Policy::BothPMMP => {
            let norm = (1.0 - p1).powi(2) + p1 * p1;
            (norm, p1 * p1 / norm)
        }
    }
}
