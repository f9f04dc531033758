//! Quasi-separability of two-qubit states.
//!
//! A "new state" of `ρ = Σ pᵢ|Ψᵢ⟩⟨Ψᵢ|` keeps every pure component and changes
//! only the weights, all of which must stay strictly positive. `ρ` is
//! quasi-separable when one of its new states is separable. The notion is
//! relative to a decomposition; this module always uses the canonical one
//! attached to each recognized family:
//!
//! * Bell-diagonal states: `Σ Pᵢ |Bᵢ⟩⟨Bᵢ|` over the nonzero weights.
//! * The non-diagonal family `½ [[b+c,0,0,0],[0,a−b,d,0],[0,d,a−c,0],[0,0,0,0]]`
//!   with exactly one of
//!   1. `b = c = a/2` (rank 3 for `|d| < a/2`, rank 2 at `|d| = a/2`),
//!      together with its new states, which keep `b = c` and move the
//!      rank-2 edge to `|d| = a − b`,
//!   2. `d = c = 0, a = b`,
//!   3. `d = b = 0, a = c`,
//!   4. `d = 0, a = b = c`.
//!
//! States outside both families (for instance thermally decayed singlets,
//! which populate `|−−⟩`) come back as [`FamilyClass::Unclassified`]. No
//! verdict is produced for them.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::states::{
    basis_ket, from_mixture, ppt_is_separable, BellState, DensityMatrix, Ket, NonDiagonalParams, PureStateMixture,
    MIXTURE_TOL, MM, MP, PM, PP,
};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FamilyClass {
    /// Weights in the order of [`BellState::ALL`].
    BellDiagonal {
        weights: [f64; 4],
    },
    Case1Rank3(NonDiagonalParams),
    Case1Rank2(NonDiagonalParams),
    Case2(NonDiagonalParams),
    Case3(NonDiagonalParams),
    Case4(NonDiagonalParams),
    Unclassified,
}

impl FamilyClass {
    pub fn name(&self) -> &'static str {
        match self {
            FamilyClass::BellDiagonal { .. } => "BellDiagonal",
            FamilyClass::Case1Rank3(_) => "Case1Rank3",
            FamilyClass::Case1Rank2(_) => "Case1Rank2",
            FamilyClass::Case2(_) => "Case2",
            FamilyClass::Case3(_) => "Case3",
            FamilyClass::Case4(_) => "Case4",
            FamilyClass::Unclassified => "Unclassified",
        }
    }
}

impl fmt::Display for FamilyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Separable,
    QuasiSeparable,
    NonQuasiSeparable,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Separable => "Separable",
            Verdict::QuasiSeparable => "QuasiSeparable",
            Verdict::NonQuasiSeparable => "NonQuasiSeparable",
        })
    }
}

/// A new state of `mix`: same pure components, weights `new_probs`.
pub fn reweight(mix: &PureStateMixture, new_probs: &[f64]) -> Result<PureStateMixture> {
    if new_probs.len() != mix.len() {
        return Err(Error::DimensionMismatch { left: mix.len(), right: new_probs.len() });
    }
    if let Some(p) = new_probs.iter().find(|p| p.is_nan() || **p <= 0.0) {
        return Err(Error::InvalidMixture(format!("new weight {p} vanishes; a new state keeps every component")));
    }
    PureStateMixture::new(new_probs.iter().copied().zip(mix.kets().copied()).collect())
}

fn bell_basis() -> CMatrix {
    let mut u = CMatrix::zeros(4);
    for (col, b) in BellState::ALL.iter().enumerate() {
        for (row, amp) in b.ket().iter().enumerate() {
            u[(row, col)] = *amp;
        }
    }
    u
}

fn approx(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol
}

pub fn classify_family(rho: &DensityMatrix, tol: f64) -> FamilyClass {
    let u = bell_basis();
    let in_bell = &(&u.dagger() * rho.matrix()) * &u;
    let off_bell = (0..4)
        .flat_map(|i| (0..4).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .all(|(i, j)| in_bell[(i, j)].norm() <= tol);
    if off_bell {
        let weights = [0, 1, 2, 3].map(|k| in_bell[(k, k)].re);
        return FamilyClass::BellDiagonal { weights };
    }

    let m = rho.matrix();
    let must_vanish = [(PP, PM), (PP, MP), (PP, MM), (PM, MM), (MP, MM), (MM, MM)];
    if must_vanish.iter().any(|&(i, j)| m[(i, j)].norm() > tol) || m[(PM, MP)].im.abs() > tol {
        return FamilyClass::Unclassified;
    }

    let (r00, r11, r22) = (m[(PP, PP)].re, m[(PM, PM)].re, m[(MP, MP)].re);
    let a = r00 + r11 + r22;
    let params = NonDiagonalParams { a, b: a - 2.0 * r11, c: a - 2.0 * r22, d: 2.0 * m[(PM, MP)].re };
    let NonDiagonalParams { a, b, c, d } = params;

    let d_zero = d.abs() <= tol;
    if d_zero && approx(a, b, tol) && approx(a, c, tol) {
        FamilyClass::Case4(params)
    } else if d_zero && c.abs() <= tol && approx(a, b, tol) {
        FamilyClass::Case2(params)
    } else if d_zero && b.abs() <= tol && approx(a, c, tol) {
        FamilyClass::Case3(params)
    } else if approx(b, c, tol) {
        // b = c = a/2 and every reweighting of its decomposition
        if approx(d.abs(), a - b, tol) {
            FamilyClass::Case1Rank2(params)
        } else {
            FamilyClass::Case1Rank3(params)
        }
    } else {
        FamilyClass::Unclassified
    }
}

fn is_pure_bell(weights: &[f64; 4]) -> bool {
    weights.iter().filter(|w| **w > MIXTURE_TOL).count() == 1
}

pub fn verdict(fc: &FamilyClass) -> Result<Verdict> {
    Ok(match fc {
        FamilyClass::Case2(_) | FamilyClass::Case3(_) | FamilyClass::Case4(_) => Verdict::Separable,
        FamilyClass::BellDiagonal { weights } if is_pure_bell(weights) => Verdict::NonQuasiSeparable,
        FamilyClass::BellDiagonal { .. } | FamilyClass::Case1Rank3(_) => Verdict::QuasiSeparable,
        FamilyClass::Case1Rank2(_) => Verdict::NonQuasiSeparable,
        FamilyClass::Unclassified => return Err(Error::NoVerdict),
    })
}

fn mixture_of(components: &[(f64, Ket)]) -> Option<PureStateMixture> {
    let kept: Vec<_> = components.iter().filter(|(p, _)| *p > MIXTURE_TOL).copied().collect();
    let total: f64 = kept.iter().map(|(p, _)| p).sum();
    PureStateMixture::new(kept.into_iter().map(|(p, k)| (p / total, k)).collect()).ok()
}

/// The decomposition each family is written in, rebuilt from its parameters.
pub fn canonical_decomposition(fc: &FamilyClass) -> Option<PureStateMixture> {
    let plus_plus = basis_ket(PP);
    match *fc {
        FamilyClass::BellDiagonal { weights } => {
            mixture_of(&BellState::ALL.iter().zip(weights).map(|(b, w)| (w, b.ket())).collect::<Vec<_>>())
        }
        FamilyClass::Case1Rank3(p) | FamilyClass::Case1Rank2(p) => {
            // ½[[2b,0,0,0],[0,a−b,d,0],[0,d,a−b,0],[0,0,0,0]]
            //   = b|++⟩⟨++| + ((a−b)/2 + d/2)|Φ⁺⟩⟨Φ⁺| + ((a−b)/2 − d/2)|Φ⁻⟩⟨Φ⁻|
            let half_gap = (p.a - p.b) / 2.0;
            mixture_of(&[
                (p.b, plus_plus),
                (half_gap + p.d / 2.0, BellState::PhiPlus.ket()),
                (half_gap - p.d / 2.0, BellState::PhiMinus.ket()),
            ])
        }
        FamilyClass::Case2(_) => mixture_of(&[(0.5, plus_plus), (0.5, basis_ket(MP))]),
        FamilyClass::Case3(_) => mixture_of(&[(0.5, plus_plus), (0.5, basis_ket(PM))]),
        FamilyClass::Case4(_) => mixture_of(&[(1.0, plus_plus)]),
        FamilyClass::Unclassified => None,
    }
}

/// A separable new state of `rho`, when one exists.
///
/// Mixed Bell-diagonal states are flattened to equal weights; the rank-3
/// branch of case 1 is sent to `½|++⟩⟨++| + ¼|Φ⁺⟩⟨Φ⁺| + ¼|Φ⁻⟩⟨Φ⁻|`. Cases 2–4
/// are already separable and are returned unchanged. Rank-2 states of case 1
/// and pure Bell states have none.
pub fn separable_witness(rho: &DensityMatrix, fc: &FamilyClass) -> Result<Option<PureStateMixture>> {
    let Some(decomp) = canonical_decomposition(fc) else {
        return Ok(None);
    };
    let rebuilt = from_mixture(&decomp)?;
    if rebuilt.max_abs_diff(rho) > 10.0 * DEFAULT_TOL.max(MIXTURE_TOL) {
        return Err(Error::Consistency(format!(
            "{fc} decomposition does not reproduce the state (deviation {:.3e})",
            rebuilt.max_abs_diff(rho)
        )));
    }

    let candidate = match fc {
        FamilyClass::BellDiagonal { .. } if decomp.len() > 1 => {
            let n = decomp.len();
            reweight(&decomp, &vec![1.0 / n as f64; n])?
        }
        // components are (|++⟩, |Φ⁺⟩, |Φ⁻⟩)
        FamilyClass::Case1Rank3(_) => reweight(&decomp, &[0.5, 0.25, 0.25])?,
        FamilyClass::Case2(_) | FamilyClass::Case3(_) | FamilyClass::Case4(_) => decomp,
        _ => return Ok(None),
    };

    if ppt_is_separable(&from_mixture(&candidate)?) {
        Ok(Some(candidate))
    } else {
        Ok(None)
    }
}

/// Family, verdict and witness of one state.
#[derive(Clone, Debug)]
pub struct Classification {
    pub family: FamilyClass,
    pub verdict: Option<Verdict>,
    pub witness: Option<PureStateMixture>,
}

pub fn analyze(rho: &DensityMatrix, tol: f64) -> Result<Classification> {
    let family = classify_family(rho, tol);
    let verdict = verdict(&family).ok();
    let witness = separable_witness(rho, &family)?;
    Ok(Classification { family, verdict, witness })
}

/// True when the two mixtures use the same set of projectors `|Ψ⟩⟨Ψ|`.
pub fn same_components(x: &PureStateMixture, y: &PureStateMixture, eps: f64) -> bool {
    let projectors = |m: &PureStateMixture| -> Vec<CMatrix> { m.kets().map(|k| CMatrix::outer(k)).collect() };
    let (px, py) = (projectors(x), projectors(y));
    let covered = |a: &[CMatrix], b: &[CMatrix]| a.iter().all(|p| b.iter().any(|q| p.max_abs_diff(q).unwrap() <= eps));
    px.len() == py.len() && covered(&px, &py) && covered(&py, &px)
}
