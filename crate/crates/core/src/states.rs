//! Two-qubit density matrices, the named state families and entanglement
//! measures.
//!
//! Every 4×4 matrix here is written in the product basis
//! `|++⟩, |+−⟩, |−+⟩, |−−⟩`, with `+` playing the role of computational `0`
//! and `−` of computational `1`.

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, pauli, tol, CMatrix};

/// A two-qubit state vector in the product basis.
pub type Ket = [C64; 4];

pub const PP: usize = 0;
pub const PM: usize = 1;
pub const MP: usize = 2;
pub const MM: usize = 3;

/// Tolerance on mixture weights and on ket normalization.
pub const MIXTURE_TOL: f64 = 1e-12;

/// Eigenvalues of ρ at or below this floor are roundoff and are dropped
/// before square roots are taken in the concurrence.
const SPECTRUM_FLOOR: f64 = 8.0 * f64::EPSILON;

pub fn basis_ket(index: usize) -> Ket {
    let mut k = [C64::new(0.0, 0.0); 4];
    k[index] = C64::new(1.0, 0.0);
    k
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    /// `|Φ±⟩ = (|+−⟩ ± |−+⟩)/√2`, `|Ψ±⟩ = (|++⟩ ± |−−⟩)/√2`.
    pub fn ket(self) -> Ket {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut k = [C64::new(0.0, 0.0); 4];
        let (i, j, sign) = match self {
            BellState::PhiPlus => (PM, MP, 1.0),
            BellState::PhiMinus => (PM, MP, -1.0),
            BellState::PsiPlus => (PP, MM, 1.0),
            BellState::PsiMinus => (PP, MM, -1.0),
        };
        k[i] = C64::new(h, 0.0);
        k[j] = C64::new(sign * h, 0.0);
        k
    }

    pub fn projector(self) -> DensityMatrix {
        DensityMatrix(CMatrix::outer(&self.ket()))
    }

    pub fn label(self) -> &'static str {
        match self {
            BellState::PhiPlus => "phi+",
            BellState::PhiMinus => "phi-",
            BellState::PsiPlus => "psi+",
            BellState::PsiMinus => "psi-",
        }
    }
}

impl fmt::Display for BellState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A validated two-qubit density matrix: Hermitian, unit trace, PSD.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::DimensionMismatch { left: 4, right: m.dim() });
        }
        validate(&m)?;
        Ok(Self(m))
    }

    /// The pure state `|ψ⟩⟨ψ|`; `psi` must be normalized.
    pub fn pure(psi: &Ket) -> Result<Self> {
        check_unit(psi)?;
        Ok(Self(CMatrix::outer(psi)))
    }

    pub fn maximally_mixed() -> Self {
        Self(CMatrix::identity(4).scale_real(0.25))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigen(&self.0).expect("validated density matrix").values
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.0.max_abs_diff(&other.0).expect("both 4x4")
    }
}

/// Hermitian within `HERM_TOL`, trace one within `TRACE_TOL`, smallest
/// eigenvalue at least `-PSD_TOL`. Works for any dimension.
pub fn validate(m: &CMatrix) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    m.check_hermitian(tol::HERM_TOL)?;
    let tr = m.trace();
    if (tr.re - 1.0).abs() > tol::TRACE_TOL || tr.im.abs() > tol::TRACE_TOL {
        return Err(Error::Trace { trace: tr.re });
    }
    let min = hermitian_eigen(m)?.values[0];
    if min < -tol::PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}

fn check_unit(v: &[C64]) -> Result<()> {
    let n = norm(v);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::NonUnitVector { norm: n });
    }
    Ok(())
}

/// An explicit decomposition `ρ = Σ pᵢ |Ψᵢ⟩⟨Ψᵢ|` with strictly positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct PureStateMixture {
    components: Vec<(f64, Ket)>,
}

impl PureStateMixture {
    pub fn new(components: Vec<(f64, Ket)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidMixture("no components".into()));
        }
        for (i, (p, psi)) in components.iter().enumerate() {
            if p.is_nan() || *p <= 0.0 || *p > 1.0 + MIXTURE_TOL {
                return Err(Error::InvalidMixture(format!(
                    "component {i} has probability {p}; weights must lie in (0, 1]"
                )));
            }
            let n = norm(psi);
            if (n - 1.0).abs() > MIXTURE_TOL {
                return Err(Error::InvalidMixture(format!("component {i} has norm {n}")));
            }
        }
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > MIXTURE_TOL {
            return Err(Error::InvalidMixture(format!("weights sum to {total}")));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[(f64, Ket)] {
        &self.components
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.components.iter().map(|(p, _)| *p).collect()
    }

    pub fn kets(&self) -> impl Iterator<Item = &Ket> {
        self.components.iter().map(|(_, k)| k)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

/// `ρ = Σ pᵢ |Ψᵢ⟩⟨Ψᵢ|`
pub fn from_mixture(mix: &PureStateMixture) -> Result<DensityMatrix> {
    let mut m = CMatrix::zeros(4);
    for (p, psi) in mix.components() {
        m = &m + &CMatrix::outer(psi).scale_real(*p);
    }
    DensityMatrix::new(m)
}

/// `(1 − p1)|++⟩⟨++| + p1 |Φ⁺⟩⟨Φ⁺|` as a mixture, for `p1 ∈ (0, 1)`.
pub fn rank2_mixture(p1: f64) -> Result<PureStateMixture> {
    if !(p1 > 0.0 && p1 < 1.0) {
        return Err(Error::Domain { what: "p1", value: p1, domain: "(0, 1)" });
    }
    PureStateMixture::new(vec![(1.0 - p1, basis_ket(PP)), (p1, BellState::PhiPlus.ket())])
}

/// The rank-2 family `(1 − p1)|++⟩⟨++| + p1 |Φ⁺⟩⟨Φ⁺|`; its concurrence is `p1`.
pub fn rank2_state(p1: f64) -> Result<DensityMatrix> {
    from_mixture(&rank2_mixture(p1)?)
}

/// Parameters of the non-diagonal family
/// `½ [[b+c, 0, 0, 0], [0, a−b, d, 0], [0, d, a−c, 0], [0, 0, 0, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonDiagonalParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl NonDiagonalParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn validate(&self) -> Result<()> {
        let Self { a, b, c, d } = *self;
        if ![a, b, c, d].iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        for (what, v) in [("b+c", b + c), ("a-b", a - b), ("a-c", a - c)] {
            if v < -MIXTURE_TOL {
                return Err(Error::Domain { what, value: v, domain: "[0, inf)" });
            }
        }
        // trace = ((b+c) + (a-b) + (a-c)) / 2 = a
        if (a - 1.0).abs() > MIXTURE_TOL {
            return Err(Error::Trace { trace: a });
        }
        Ok(())
    }

    pub fn matrix(&self) -> CMatrix {
        let Self { a, b, c, d } = *self;
        #[rustfmt::skip]
        let entries = [
            (b + c) / 2.0, 0.0, 0.0, 0.0,
            0.0, (a - b) / 2.0, d / 2.0, 0.0,
            0.0, d / 2.0, (a - c) / 2.0, 0.0,
            0.0, 0.0, 0.0, 0.0,
        ];
        CMatrix::from_real(4, &entries).unwrap()
    }
}

pub fn nondiagonal_state(p: NonDiagonalParams) -> Result<DensityMatrix> {
    p.validate()?;
    DensityMatrix::new(p.matrix())
}

/// `σy ⊗ σy`
pub fn spin_flip_operator() -> CMatrix {
    pauli::y().tensor(&pauli::y()).unwrap()
}

/// Wootters concurrence `max{0, λ₁ − λ₂ − λ₃ − λ₄}`.
///
/// The `λᵢ` are the singular values of `√ρ · (σy⊗σy) · √ρ*`, i.e. the square
/// roots of the eigenvalues of `√ρ ρ̃ √ρ`. They are read off the Hermitian
/// dilation `[[0, B], [B†, 0]]`, whose spectrum is `±λᵢ`, so small `λᵢ` keep
/// full absolute precision.
pub fn concurrence(rho: &DensityMatrix) -> f64 {
    let lambdas = wootters_lambdas(rho);
    (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0)
}

/// The four `λᵢ` in decreasing order.
pub fn wootters_lambdas(rho: &DensityMatrix) -> [f64; 4] {
    let eig = hermitian_eigen(rho.matrix()).expect("validated density matrix");
    let sqrt_rho = eig.map_spectrum(|x| if x > SPECTRUM_FLOOR { x.sqrt() } else { 0.0 });
    let y = spin_flip_operator();
    let b = &(&sqrt_rho * &y) * &sqrt_rho.conj();

    let mut dilation = CMatrix::zeros(8);
    for i in 0..4 {
        for j in 0..4 {
            dilation[(i, 4 + j)] = b[(i, j)];
            dilation[(4 + j, i)] = b[(i, j)].conj();
        }
    }
    let values = hermitian_eigen(&dilation).expect("dilation is Hermitian by construction").values;
    // ascending: the top four are +λᵢ
    [values[7].max(0.0), values[6].max(0.0), values[5].max(0.0), values[4].max(0.0)]
}

/// Closed-form concurrence of an X-shaped state:
/// `2·max{0, |ρ₂₃| − √(ρ₁₁ρ₄₄), |ρ₁₄| − √(ρ₂₂ρ₃₃)}`.
pub fn x_state_concurrence(rho: &DensityMatrix) -> f64 {
    let d = |i: usize| rho.get(i, i).re.max(0.0);
    let inner = rho.get(PM, MP).norm() - (d(PP) * d(MM)).sqrt();
    let outer = rho.get(PP, MM).norm() - (d(PM) * d(MP)).sqrt();
    2.0 * inner.max(outer).max(0.0)
}

/// Smallest eigenvalue of the partial transpose over the second qubit.
pub fn partial_transpose_min_eigenvalue(rho: &DensityMatrix) -> f64 {
    let pt = rho.matrix().partial_transpose_second(2, 2).unwrap();
    hermitian_eigen(&pt).expect("partial transpose of a Hermitian matrix").values[0]
}

/// Peres–Horodecki: separable iff the partial transpose is PSD (exact for
/// two qubits).
pub fn ppt_is_separable(rho: &DensityMatrix) -> bool {
    partial_transpose_min_eigenvalue(rho) >= -tol::PSD_TOL
}

/// `⟨ψ|ρ|ψ⟩`
pub fn fidelity_with_pure(rho: &DensityMatrix, psi: &Ket) -> Result<f64> {
    check_unit(psi)?;
    let rho_psi = rho.matrix().apply(psi)?;
    let f: C64 = psi.iter().zip(&rho_psi).map(|(a, b)| a.conj() * b).sum();
    Ok(f.re)
}

/// Bell state with the largest overlap, and that overlap.
pub fn nearest_bell(rho: &DensityMatrix) -> (BellState, f64) {
    BellState::ALL.iter().map(|&b| (b, fidelity_with_pure(rho, &b.ket()).unwrap())).fold(
        (BellState::PhiPlus, f64::NEG_INFINITY),
        |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        },
    )
}
