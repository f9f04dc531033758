//! Singlet decay in independent vacuum or thermal baths.
//!
//! Each qubit couples to its own bath through `σ = |−⟩⟨+|` (so `|−⟩` is the
//! ground state) with the master equation
//!
//! ```text
//! dρ/dt = γ Σ_{k∈{a,b}} [ (n̄+1) D[σ_k] ρ + n̄ D[σ_k†] ρ ],
//! D[L] ρ = L ρ L† − ½ {L†L, ρ}.
//! ```
//!
//! Starting from the singlet the state stays X-shaped. All closed forms are
//! written in dimensionless time `τ = γ t`.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::states::{BellState, DensityMatrix, MM, MP, PM};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BathParams {
    pub gamma: f64,
    pub nbar: f64,
}

impl BathParams {
    pub fn new(gamma: f64, nbar: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Domain { what: "gamma", value: gamma, domain: "(0, inf)" });
        }
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::Domain { what: "nbar", value: nbar, domain: "[0, inf)" });
        }
        Ok(Self { gamma, nbar })
    }

    pub fn vacuum(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0)
    }

    /// `γ (1 + 2n̄)`, the relaxation rate of populations.
    pub fn total_rate(&self) -> f64 {
        self.gamma * (1.0 + 2.0 * self.nbar)
    }

    /// Step used when the caller does not choose one.
    pub fn default_dt(&self) -> f64 {
        1e-4 / self.total_rate()
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain { what: "t", value: t, domain: "[0, inf)" });
    }
    Ok(())
}

/// `(1 − e^{−γt}) |−−⟩⟨−−| + e^{−γt} |Φ⁻⟩⟨Φ⁻|`
pub fn vacuum_solution(t: f64, gamma: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let bath = BathParams::vacuum(gamma)?;
    let w = (-bath.gamma * t).exp();
    let mut m = BellState::PhiMinus.projector().into_matrix().scale_real(w);
    m[(MM, MM)] += 1.0 - w;
    DensityMatrix::new(m)
}

/// Coefficients of the thermal solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermalCoeffs {
    pub a: f64,
    pub c: f64,
    pub d: f64,
    /// `γ t`
    pub tau: f64,
    pub nbar: f64,
}

/// With `k = 1 + 2n̄` and `E = e^{−kτ}`:
///
/// ```text
/// d = (E − 1)/k,   a = −E,   c = (1 − 2E − 4n̄(n̄+1)E²)/k².
/// ```
pub fn thermal_coeffs(t: f64, p: &BathParams) -> Result<ThermalCoeffs> {
    check_time(t)?;
    let tau = p.gamma * t;
    let n = p.nbar;
    let k = 1.0 + 2.0 * n;
    let e = (-k * tau).exp();
    Ok(ThermalCoeffs {
        a: -e,
        c: (1.0 - 2.0 * e - 4.0 * n * (n + 1.0) * e * e) / (k * k),
        d: (e - 1.0) / k,
        tau,
        nbar: n,
    })
}

impl ThermalCoeffs {
    /// Populations of `|++⟩` and `|−−⟩`, equal to `(1+c)/4 ± d/2`.
    ///
    /// Evaluated as products of single-qubit transition probabilities
    /// (excited fraction `s = n̄/k`), which avoids the cancellation in
    /// `(1+c)/4 + d/2` and keeps `|++⟩` exactly empty at `n̄ = 0`.
    pub fn corner_populations(&self) -> (f64, f64) {
        let e = -self.a;
        let s = self.nbar / (1.0 + 2.0 * self.nbar);
        let p_pp = s * (1.0 - e) * (s + (1.0 - s) * e);
        let p_mm = (1.0 - s) * (1.0 - e) * (1.0 - s + s * e);
        (p_pp, p_mm)
    }

    /// `√((1+c)² − 4d²)`, i.e. `4√(P₁P₂)` with the corner populations.
    pub fn corner_root(&self) -> f64 {
        let (p_pp, p_mm) = self.corner_populations();
        4.0 * (p_pp * p_mm).sqrt()
    }

    pub fn matrix(&self) -> CMatrix {
        let (p_pp, p_mm) = self.corner_populations();
        let mid = (1.0 - self.c) / 4.0;
        let mut m = CMatrix::from_real_diag(&[p_pp, mid, mid, p_mm]);
        m[(PM, MP)] = (self.a / 2.0).into();
        m[(MP, PM)] = (self.a / 2.0).into();
        m
    }
}

pub fn thermal_solution(t: f64, p: &BathParams) -> Result<DensityMatrix> {
    let coeffs = thermal_coeffs(t, p)?;
    DensityMatrix::new(coeffs.matrix())
        .map_err(|e| Error::Consistency(format!("thermal solution at τ = {} is not a state: {e}", coeffs.tau)))
}

/// `max{0, −a − ¼ √((1+c)² − 4d²)}`, kept verbatim for comparison with the
/// actual concurrence `−a − ½ √((1+c)² − 4d²)` of the X-shaped state.
pub fn quoted_concurrence_c1(t: f64, p: &BathParams) -> Result<f64> {
    let co = thermal_coeffs(t, p)?;
    Ok((-co.a - co.corner_root() / 4.0).max(0.0))
}

/// Closed-form concurrence of the thermal state.
pub fn thermal_concurrence(t: f64, p: &BathParams) -> Result<f64> {
    let co = thermal_coeffs(t, p)?;
    Ok((-co.a - co.corner_root() / 2.0).max(0.0))
}

/// The generator of the master equation, with jump operators cached.
#[derive(Clone, Debug)]
pub struct Lindbladian {
    /// `(√rate · L, √rate · L†, rate · L†L / 2)`
    jumps: Vec<(CMatrix, CMatrix, CMatrix)>,
}

impl Lindbladian {
    pub fn new(p: &BathParams) -> Self {
        let lower = CMatrix::from_real(2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        let raise = lower.dagger();
        let id = CMatrix::identity(2);
        let on_a = |op: &CMatrix| op.tensor(&id).unwrap();
        let on_b = |op: &CMatrix| id.tensor(op).unwrap();
        let mut jumps = Vec::new();
        for (rate, op) in [(p.gamma * (p.nbar + 1.0), &lower), (p.gamma * p.nbar, &raise)] {
            if rate == 0.0 {
                continue;
            }
            for l in [on_a(op), on_b(op)] {
                let ldl = &l.dagger() * &l;
                let l = l.scale_real(rate.sqrt());
                jumps.push((l.clone(), l.dagger(), ldl.scale_real(rate / 2.0)));
            }
        }
        Self { jumps }
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.dim());
        for (l, l_dag, half_ldl) in &self.jumps {
            let jump = &(l * rho) * l_dag;
            let anti = &(half_ldl * rho) + &(rho * half_ldl);
            out = &out + &(&jump - &anti);
        }
        out
    }
}

/// `dρ/dt` at `rho`.
pub fn lindblad_rhs(rho: &DensityMatrix, p: &BathParams) -> CMatrix {
    Lindbladian::new(p).apply(rho.matrix())
}

/// Single-qubit Gibbs product state, the fixed point of the generator.
pub fn thermal_steady_state(p: &BathParams) -> DensityMatrix {
    let k = 1.0 + 2.0 * p.nbar;
    let (excited, ground) = (p.nbar / k, (p.nbar + 1.0) / k);
    let one = CMatrix::from_real_diag(&[excited, ground]);
    DensityMatrix::new(one.tensor(&one).unwrap()).expect("product of qubit states")
}

/// Thresholds past which an RK4 run is reported as unreliable.
pub const RK4_TRACE_DRIFT: f64 = 1e-8;
pub const RK4_PSD_VIOLATION: f64 = 1e-8;
/// Health checks run once per this many steps, and at every sample.
pub const RK4_CHECK_EVERY: usize = 100;

/// Worst deviations seen at the health checks of one run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Rk4Health {
    pub steps: usize,
    pub max_trace_drift: f64,
    pub max_asymmetry: f64,
    pub min_eigenvalue: f64,
}

impl Rk4Health {
    fn observe(&mut self, rho: &CMatrix) -> Result<()> {
        let drift = (rho.trace().re - 1.0).abs();
        let (asym, _, _) = rho.max_asymmetry();
        let min = hermitian_eigen(&rho.hermitian_part())?.values[0];
        self.max_trace_drift = self.max_trace_drift.max(drift);
        self.max_asymmetry = self.max_asymmetry.max(asym);
        self.min_eigenvalue = self.min_eigenvalue.min(min);
        if drift > RK4_TRACE_DRIFT {
            return Err(Error::IntegrationQuality {
                detail: format!("trace drifted by {drift:.3e} after {} steps", self.steps),
            });
        }
        if min < -RK4_PSD_VIOLATION {
            return Err(Error::IntegrationQuality {
                detail: format!("eigenvalue {min:.3e} after {} steps", self.steps),
            });
        }
        Ok(())
    }
}

/// States at each of `times` (ascending, non-negative) along one RK4
/// trajectory, plus the health record. Steps never exceed `dt` and land
/// exactly on every sample time.
pub fn integrate_rk4_samples(
    rho0: &DensityMatrix,
    p: &BathParams,
    times: &[f64],
    dt: f64,
) -> Result<(Vec<DensityMatrix>, Rk4Health)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Domain { what: "dt", value: dt, domain: "(0, inf)" });
    }
    for &t in times {
        check_time(t)?;
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidMixture("sample times must be ascending".into()));
    }

    let gen = Lindbladian::new(p);
    let mut health = Rk4Health { min_eigenvalue: 0.0, ..Default::default() };
    let mut rho = rho0.matrix().clone();
    let mut current = rho0.clone();
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());

    for &target in times {
        let span = target - now;
        if span > 0.0 {
            let n = (span / dt * (1.0 - 1e-12)).ceil().max(1.0) as usize;
            let h = span / n as f64;
            for _ in 0..n {
                rho = rk4_step(&gen, &rho, h);
                health.steps += 1;
                if health.steps.is_multiple_of(RK4_CHECK_EVERY) {
                    health.observe(&rho)?;
                }
            }
            now = target;
            health.observe(&rho)?;
            current = DensityMatrix::new(rho.hermitian_part()).map_err(|e| Error::IntegrationQuality {
                detail: format!("state at t = {target} failed validation: {e}"),
            })?;
        }
        out.push(current.clone());
    }
    Ok((out, health))
}

/// Fixed-step RK4 from `rho0` to `t_end`.
pub fn integrate_rk4(rho0: &DensityMatrix, p: &BathParams, t_end: f64, dt: f64) -> Result<DensityMatrix> {
    check_time(t_end)?;
    if t_end == 0.0 {
        return Ok(rho0.clone());
    }
    let (mut states, _) = integrate_rk4_samples(rho0, p, &[t_end], dt)?;
    Ok(states.pop().expect("one sample requested"))
}

fn rk4_step(gen: &Lindbladian, rho: &CMatrix, h: f64) -> CMatrix {
    let k1 = gen.apply(rho);
    let k2 = gen.apply(&(rho + &k1.scale_real(h / 2.0)));
    let k3 = gen.apply(&(rho + &k2.scale_real(h / 2.0)));
    let k4 = gen.apply(&(rho + &k3.scale_real(h)));
    let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
    rho + &incr.scale_real(h / 6.0)
}

/// The closed forms quoted for the distilled thermal state, transcribed as
/// written so they can be compared with simulation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuotedDistilled {
    /// `(1+c)/4 + d/2`
    pub p1: f64,
    /// `(1+c)/4 − d/2`
    pub p2: f64,
    /// `(1−c)/4 + a/2`
    pub p3: f64,
    /// `(1−c)/4 − a/2`
    pub p4: f64,
    /// `2 P₁P₂ + (P₃ − P₄)²/2`
    pub p_success: f64,
    /// `max{0, (P₃−P₄)²/(2P) − P₁P₂/P}`
    pub c2: f64,
}

impl QuotedDistilled {
    /// The quoted distilled matrix, divided by the quoted `P`:
    /// corners `P₁P₂`, middle diagonal `(P₃+P₄)²`, middle coherence
    /// `−(P₃−P₄)²/4`.
    pub fn matrix(&self) -> CMatrix {
        let corner = self.p1 * self.p2;
        let mid = (self.p3 + self.p4).powi(2);
        let coh = -(self.p3 - self.p4).powi(2) / 4.0;
        let mut m = CMatrix::from_real_diag(&[corner, mid, mid, corner]);
        m[(PM, MP)] = coh.into();
        m[(MP, PM)] = coh.into();
        m.scale_real(1.0 / self.p_success)
    }

    /// What the same algebra gives when the protocol is carried out on two
    /// copies: probability `2P₁P₂ + (P₃+P₄)²/2` and concurrence
    /// `max{0, ((P₃−P₄)²/2 − 2P₁P₂)/P}`.
    pub fn simulated_counterparts(&self) -> (f64, f64) {
        let corner = self.p1 * self.p2;
        let p = 2.0 * corner + (self.p3 + self.p4).powi(2) / 2.0;
        let c = (((self.p3 - self.p4).powi(2) / 2.0 - 2.0 * corner) / p).max(0.0);
        (p, c)
    }
}

pub fn quoted_distilled_closed_forms(t: f64, p: &BathParams) -> Result<QuotedDistilled> {
    let co = thermal_coeffs(t, p)?;
    let (p1, p2) = co.corner_populations();
    let mid = (1.0 - co.c) / 4.0;
    let (p3, p4) = (mid + co.a / 2.0, mid - co.a / 2.0);
    let p_success = 2.0 * p1 * p2 + (p3 - p4).powi(2) / 2.0;
    let c2 = ((p3 - p4).powi(2) / (2.0 * p_success) - p1 * p2 / p_success).max(0.0);
    Ok(QuotedDistilled { p1, p2, p3, p4, p_success, c2 })
}

/// `Σ Pᵢ` under the literal reading `P₃,₄ = ½·(1−c)/4 ± a/2`.
pub fn literal_grouping_trace(t: f64, p: &BathParams) -> Result<f64> {
    let co = thermal_coeffs(t, p)?;
    let (p1, p2) = co.corner_populations();
    let mid = (1.0 - co.c) / 8.0;
    Ok(p1 + p2 + (mid + co.a / 2.0) + (mid - co.a / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::concurrence;

    fn bath(n: f64) -> BathParams {
        BathParams::new(1.0, n).unwrap()
    }

    #[test]
    fn bath_validation() {
        assert!(BathParams::new(0.0, 0.1).is_err());
        assert!(BathParams::new(1.0, -0.1).is_err());
        assert!(BathParams::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn vacuum_endpoints() {
        let singlet = BellState::PhiMinus.projector();
        assert!(vacuum_solution(0.0, 1.0).unwrap().max_abs_diff(&singlet) < 1e-15);
        let late = vacuum_solution(60.0, 1.0).unwrap();
        assert!((late.get(MM, MM).re - 1.0).abs() < 1e-15);
        assert!(vacuum_solution(-1.0, 1.0).is_err());
    }

    #[test]
    fn vacuum_weights_at_unit_time() {
        let rho = vacuum_solution(1.0, 1.0).unwrap();
        let w = (-1.0f64).exp();
        assert!((rho.get(MM, MM).re - (1.0 - w)).abs() < 1e-15);
        assert!((rho.get(PM, MP).re + w / 2.0).abs() < 1e-15);
        // gamma scales time
        assert!(vacuum_solution(0.5, 2.0).unwrap().max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn coefficients_start_at_the_singlet() {
        for n in [0.0, 0.001, 0.1, 3.0] {
            let co = thermal_coeffs(0.0, &bath(n)).unwrap();
            assert!((co.a + 1.0).abs() < 1e-15);
            assert!((co.c + 1.0).abs() < 1e-14);
            assert!(co.d.abs() < 1e-15);
        }
    }

    #[test]
    fn coefficients_reduce_to_vacuum() {
        for tau in [0.0f64, 0.3, 1.0, 2.5] {
            let e = (-tau).exp();
            let co = thermal_coeffs(tau, &bath(0.0)).unwrap();
            assert!((co.c - (1.0 - 2.0 * e)).abs() < 1e-15);
            assert!((co.d - (e - 1.0)).abs() < 1e-15);
            assert!((co.a + e).abs() < 1e-15);
        }
        let late = thermal_coeffs(50.0, &bath(0.0)).unwrap();
        assert!(late.a.abs() < 1e-15 && (late.d + 1.0).abs() < 1e-15 && (late.c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_solution_without_photons_is_vacuum() {
        for k in 0..=50 {
            let tau = k as f64 * 0.1;
            let th = thermal_solution(tau, &bath(0.0)).unwrap();
            let vac = vacuum_solution(tau, 1.0).unwrap();
            assert!(th.max_abs_diff(&vac) < 1e-12, "tau = {tau}");
        }
    }

    #[test]
    fn quoted_c1_limits() {
        assert!((quoted_concurrence_c1(0.0, &bath(0.3)).unwrap() - 1.0).abs() < 1e-14);
        for tau in [0.2, 1.0, 4.0] {
            let c1 = quoted_concurrence_c1(tau, &bath(0.0)).unwrap();
            assert!((c1 - (-tau).exp()).abs() < 1e-14);
        }
    }

    #[test]
    fn quoted_c1_overstates_concurrence_in_a_thermal_bath() {
        let p = bath(0.001);
        let c1 = quoted_concurrence_c1(0.5, &p).unwrap();
        let wootters = concurrence(&thermal_solution(0.5, &p).unwrap());
        let closed = thermal_concurrence(0.5, &p).unwrap();
        assert!((wootters - closed).abs() < 1e-10);
        // the gap is exactly one quarter of the square-root term
        let co = thermal_coeffs(0.5, &p).unwrap();
        let quarter_root = ((1.0 + co.c).powi(2) - 4.0 * co.d * co.d).sqrt() / 4.0;
        assert!((c1 - wootters - quarter_root).abs() < 1e-10);
        assert!(quarter_root > 1e-3);
    }

    #[test]
    fn generator_is_traceless_and_hermitian() {
        let p = bath(0.2);
        let rho = thermal_solution(0.7, &p).unwrap();
        let d = lindblad_rhs(&rho, &p);
        assert!(d.trace().norm() < 1e-15);
        assert!(d.max_asymmetry().0 < 1e-15);
    }

    #[test]
    fn fixed_points() {
        for n in [0.0, 0.001, 0.4, 2.0] {
            let p = bath(n);
            let d = lindblad_rhs(&thermal_steady_state(&p), &p);
            assert!(d.max_abs_diff(&CMatrix::zeros(4)).unwrap() < 1e-10, "n = {n}");
        }
        let ground = DensityMatrix::pure(&crate::states::basis_ket(MM)).unwrap();
        let d = lindblad_rhs(&ground, &bath(0.0));
        assert_eq!(d, CMatrix::zeros(4));
    }

    #[test]
    fn rk4_zero_time_is_identity() {
        let rho = BellState::PhiMinus.projector();
        assert_eq!(integrate_rk4(&rho, &bath(0.1), 0.0, 1e-3).unwrap(), rho);
    }

    #[test]
    fn rk4_tracks_vacuum_solution() {
        let rho = BellState::PhiMinus.projector();
        let got = integrate_rk4(&rho, &bath(0.0), 1.0, 1e-4).unwrap();
        assert!(got.max_abs_diff(&vacuum_solution(1.0, 1.0).unwrap()) < 1e-8);
    }

    #[test]
    fn rk4_tracks_thermal_solution() {
        let rho = BellState::PhiMinus.projector();
        for (n, tau) in [(0.001, 1.0), (0.1, 2.0)] {
            let p = bath(n);
            let got = integrate_rk4(&rho, &p, tau, p.default_dt()).unwrap();
            let want = thermal_solution(tau, &p).unwrap();
            assert!(got.max_abs_diff(&want) < 1e-6, "n = {n}");
        }
    }

    #[test]
    fn rk4_rejects_bad_steps() {
        let rho = BellState::PhiMinus.projector();
        assert!(integrate_rk4(&rho, &bath(0.0), 1.0, 0.0).is_err());
        assert!(integrate_rk4(&rho, &bath(0.0), -1.0, 1e-3).is_err());
    }

    #[test]
    fn rk4_coarse_step_is_flagged() {
        // a step far beyond the stability limit blows the trace up
        let rho = BellState::PhiMinus.projector();
        let r = integrate_rk4(&rho, &bath(0.0), 200.0, 5.0);
        assert!(matches!(r, Err(Error::IntegrationQuality { .. })), "{r:?}");
    }

    #[test]
    fn sqrt_of_thermal_state_round_trips() {
        let rho = thermal_solution(1.0, &bath(0.1)).unwrap();
        let s = crate::linalg::sqrt_psd(rho.matrix()).unwrap();
        assert!((&s * &s).max_abs_diff(rho.matrix()).unwrap() < 1e-8);
    }

    #[test]
    fn middle_block_eigenvalues_are_p3_p4() {
        let p = bath(0.05);
        let co = thermal_coeffs(0.9, &p).unwrap();
        let m = (1.0 - co.c) / 4.0;
        let block = CMatrix::from_real(2, &[m, co.a / 2.0, co.a / 2.0, m]).unwrap();
        let ev = hermitian_eigen(&block).unwrap().values;
        let pd = quoted_distilled_closed_forms(0.9, &p).unwrap();
        assert!((ev[0] - pd.p3).abs() < 1e-15 && (ev[1] - pd.p4).abs() < 1e-15);
    }

    #[test]
    fn closed_form_populations_sum_to_one() {
        for n in [0.0, 0.001, 0.1, 1.0] {
            for k in 0..20 {
                let pd = quoted_distilled_closed_forms(k as f64 * 0.25, &bath(n)).unwrap();
                assert!((pd.p1 + pd.p2 + pd.p3 + pd.p4 - 1.0).abs() < 1e-14);
            }
        }
        let lit = literal_grouping_trace(0.5, &bath(0.1)).unwrap();
        assert!((lit - 1.0).abs() > 0.05);
    }

    #[test]
    fn closed_forms_at_the_singlet() {
        let pd = quoted_distilled_closed_forms(0.0, &bath(0.01)).unwrap();
        let mut ps = [pd.p1, pd.p2, pd.p3, pd.p4];
        ps.sort_by(f64::total_cmp);
        for (got, want) in ps.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        assert!((pd.p_success - 0.5).abs() < 1e-14);
    }
}
