//! Limit behaviour of `ν_n`: the labeled-tree series `β`, parameter regimes,
//! moment approximations, the Poisson limit and the two-sided bounds on
//! `p_n` and `π_n`.
//!
//! Everything here except [`bounds_report`] and [`moment_bounds_check`] is
//! floating point. Large-`n` exact-vs-approximate comparisons use the
//! configurable-precision evaluator in [`highprec`].

pub mod highprec;

use std::f64::consts::{E, PI};

use rug::Rational;

use crate::exact::{q_power, rational_to_f64, ExactProb, GraphParams};
use crate::probability::{falling, isolated_vertex_probability, CheckOutcome, ComponentTable, ConnectivityTable};
use crate::{Error, Result, EXACT_N_LIMIT};

/// Hard cap on the number of `β` terms.
pub const BETA_MAX_TERMS: u64 = 1_000_000;
/// Relative slack above `e^{-1}` accepted as rounding noise in `n p q^n`.
pub const BETA_BOUNDARY_SLACK: f64 = 1e-12;
/// Truncation tolerance used by the moment approximations.
pub const BETA_DEFAULT_TOL: f64 = 1e-13;

/// A truncated evaluation of `β(x)` with a rigorous bound on the omitted tail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaValue {
    pub value: f64,
    pub terms: u64,
    /// Upper bound on `Σ_{k > terms} k^{k-2} x^k / k!`.
    pub tail_bound: f64,
}

/// `β(x) = Σ_{k≥1} k^{k-2} x^k / k!` on `0 ≤ x ≤ e^{-1}`.
///
/// Terms follow `t_{k+1} = t_k · x · (1 + 1/k)^{k-2}` and summation stops at
/// the first term below `tol` times the partial sum (or after
/// [`BETA_MAX_TERMS`]). Since every later ratio is below `xe`, the tail is
/// at most `t_K · xe / (1 - xe)`, so away from the boundary the relative
/// error is below `tol · xe / (1 - xe)`. Near `x = e^{-1}` the terms decay
/// only like `k^{-5/2}`; there the bound `(2/3) K^{-3/2} / sqrt(2π)` from
/// `k! ≥ sqrt(2πk) (k/e)^k` is reported instead.
pub fn beta(x: f64, tol: f64) -> Result<BetaValue> {
    let limit = (-1.0f64).exp() * (1.0 + BETA_BOUNDARY_SLACK);
    if !(0.0..=limit).contains(&x) {
        return Err(Error::Domain(format!("beta(x) needs 0 <= x <= 1/e, got x = {x}")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tolerance must be positive, got {tol}")));
    }
    if x == 0.0 {
        return Ok(BetaValue { value: 0.0, terms: 0, tail_bound: 0.0 });
    }
    let mut term = x;
    let mut sum = x;
    let mut k = 1u64;
    while term >= tol * sum && k < BETA_MAX_TERMS {
        let kf = k as f64;
        term *= x * ((kf - 2.0) * (1.0 / kf).ln_1p()).exp();
        k += 1;
        sum += term;
    }
    let r = x * E;
    let geometric = if r < 1.0 { term * r / (1.0 - r) } else { f64::INFINITY };
    let boundary = 2.0 / 3.0 * (k as f64).powf(-1.5) / (2.0 * PI).sqrt() * r.max(1.0).powf(BETA_MAX_TERMS as f64);
    Ok(BetaValue { value: sum, terms: k, tail_bound: geometric.min(boundary) })
}

/// Asymptotic parameter zones for `n → ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Zone {
    /// `n` fixed, `p → 0`: the graph is almost surely empty.
    FixedN,
    /// `q^n → e^{-α}`.
    QnConst,
    /// `q^n → 0`, `n q^n → ∞`.
    NqnInfinite,
    /// `n q^n → α > 0`.
    NqnConst,
    /// `n q^n → 0`.
    NqnZero,
}

impl Zone {
    pub fn as_str(self) -> &'static str {
        match self {
            Zone::FixedN => "FIXED_N",
            Zone::QnConst => "QN_CONST",
            Zone::NqnInfinite => "NQN_INFTY",
            Zone::NqnConst => "NQN_CONST",
            Zone::NqnZero => "NQN_ZERO",
        }
    }
}

impl std::fmt::Display for Zone {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which finite-`n` stand-in for `α` a [`RegimeLabel`] carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaProxy {
    /// `-n ln q`
    NegNLnQ,
    /// `n q^n`
    NQn,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeLabel {
    pub zone: Zone,
    pub alpha_estimate: f64,
    pub proxy: AlphaProxy,
}

/// Heuristic thresholds for [`classify_regime`]. Diagnostic only; no formula
/// branches on them.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegimeThresholds {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub eps_q: f64,
    /// Expected edge count `C(n,2) p` at or below which `n` counts as fixed.
    pub fixed_edges: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        Self { theta_lo: 0.01, theta_hi: 100.0, eps_q: 0.01, fixed_edges: 0.1 }
    }
}

/// `q^n` as `exp(n ln(1 - p))`, so tiny values do not underflow early.
pub fn q_pow_n(n: f64, p: f64) -> f64 {
    (n * (-p).ln_1p()).exp()
}

/// `n q^n` computed in the log domain.
pub fn n_q_pow_n(n: f64, p: f64) -> f64 {
    (n.ln() + n * (-p).ln_1p()).exp()
}

pub fn classify_regime(n: u64, p: f64, thresholds: &RegimeThresholds) -> Result<RegimeLabel> {
    check_open_unit(n, p)?;
    let nf = n as f64;
    let neg_n_ln_q = -nf * (-p).ln_1p();
    let t = n_q_pow_n(nf, p);
    let qn = q_pow_n(nf, p);
    let edges = nf * (nf - 1.0) / 2.0 * p;
    let (zone, proxy) = if edges <= thresholds.fixed_edges {
        (Zone::FixedN, AlphaProxy::NegNLnQ)
    } else if t < thresholds.theta_lo {
        (Zone::NqnZero, AlphaProxy::NQn)
    } else if t <= thresholds.theta_hi {
        (Zone::NqnConst, AlphaProxy::NQn)
    } else if qn < thresholds.eps_q {
        (Zone::NqnInfinite, AlphaProxy::NQn)
    } else {
        (Zone::QnConst, AlphaProxy::NegNLnQ)
    };
    let alpha_estimate = match proxy {
        AlphaProxy::NegNLnQ => neg_n_ln_q,
        AlphaProxy::NQn => t,
    };
    Ok(RegimeLabel { zone, alpha_estimate, proxy })
}

fn check_open_unit(n: u64, p: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("p = {p} must lie strictly between 0 and 1")));
    }
    Ok(())
}

/// Unified approximation `E(ν_n - 1)^(s) ≈ (β(n p q^n) / p)^s`.
///
/// Falls back to the `q^n → e^{-α}` form if rounding pushes `n p q^n` past
/// the series boundary.
pub fn moment_approx(n: u64, p: f64, s: u32) -> Result<f64> {
    check_open_unit(n, p)?;
    if s == 0 {
        return Ok(1.0);
    }
    let x = p * n_q_pow_n(n as f64, p);
    match beta(x, BETA_DEFAULT_TOL) {
        Ok(b) => Ok((b.value / p).powi(s as i32)),
        Err(Error::Domain(_)) => zone2_moment_approx(n, p, s),
        Err(e) => Err(e),
    }
}

/// `((n/α) β(α e^{-α}))^s` with `α = -n ln q`, the `q^n → e^{-α}` limit form.
pub fn zone2_moment_approx(n: u64, p: f64, s: u32) -> Result<f64> {
    check_open_unit(n, p)?;
    let nf = n as f64;
    let alpha = -nf * (-p).ln_1p();
    let y = alpha * (-alpha).exp();
    let b = beta(y.min((-1.0f64).exp()), BETA_DEFAULT_TOL)?;
    Ok((nf / alpha * b.value).powi(s as i32))
}

/// `(n q^n)^s`, the limit form when `q^n → 0` and `n q^n` stays bounded below.
pub fn middle_moment_approx(n: u64, p: f64, s: u32) -> Result<f64> {
    check_open_unit(n, p)?;
    Ok(n_q_pow_n(n as f64, p).powi(s as i32))
}

/// Limit of `P{ν_n = k}` when `n q^n → α`: `α^{k-1} e^{-α} / (k-1)!`.
pub fn poisson_limit_pmf(alpha: f64, k: u32) -> Result<f64> {
    if k < 1 {
        return Err(Error::invalid("the component count k must be at least 1"));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    let j = (k - 1) as f64;
    let ln_fact: f64 = (2..k).map(|i| (i as f64).ln()).sum();
    Ok((j * alpha.ln() - alpha - ln_fact).exp())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundSide {
    Lower,
    Upper,
}

/// One two-sided bound inequality on `p_n` or `π_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub side: BoundSide,
    /// Exact bound value; absent for the cross bound without exact `p_n`.
    pub bound: Option<Rational>,
    /// The bound lies outside `[0, 1]` and carries no information.
    pub vacuous: bool,
    /// Outcome against the exact probability, when it was computed.
    pub holds: Option<bool>,
}

impl BoundCheck {
    fn new(name: &'static str, side: BoundSide, bound: Option<Rational>, exact: Option<&Rational>) -> Self {
        let vacuous = match (&bound, side) {
            (Some(b), BoundSide::Lower) => *b < 0,
            (Some(b), BoundSide::Upper) => *b > 1,
            (None, _) => false,
        };
        let holds = match (&bound, exact) {
            (Some(b), Some(v)) => Some(match side {
                BoundSide::Lower => v >= b,
                BoundSide::Upper => v <= b,
            }),
            _ => None,
        };
        Self { name, side, bound, vacuous, holds }
    }

    pub fn value_f64(&self) -> Option<f64> {
        self.bound.as_ref().map(rational_to_f64)
    }

    /// The bound clamped into `[0, 1]`.
    pub fn clamped_f64(&self) -> Option<f64> {
        self.value_f64().map(|v| v.clamp(0.0, 1.0))
    }

    pub fn violated(&self) -> bool {
        !self.vacuous && self.holds == Some(false)
    }
}

/// All five bound inequalities at one `(n, p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundsReport {
    pub params: GraphParams,
    pub exact_pn: Option<ExactProb>,
    pub exact_pi: Option<ExactProb>,
    pub exact_pi_next: Option<ExactProb>,
    /// `p_n ≥ 1 - 2n q^{n-1}`
    pub lower_pn: BoundCheck,
    /// `p_n ≤ 1 / (n q^n)`
    pub upper_pn: BoundCheck,
    /// `π_n ≥ 1 - 1 / (n q^n)`
    pub lower_pi: BoundCheck,
    /// `π_n ≤ n q^{n-1}`
    pub upper_pi: BoundCheck,
    /// `π_{n+1} ≥ n q^n p_n`
    pub cross_pi_next: BoundCheck,
}

impl BoundsReport {
    pub fn checks(&self) -> [&BoundCheck; 5] {
        [&self.lower_pn, &self.upper_pn, &self.lower_pi, &self.upper_pi, &self.cross_pi_next]
    }

    pub fn violations(&self) -> Vec<&'static str> {
        self.checks().iter().filter(|c| c.violated()).map(|c| c.name).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Evaluates the bound expressions, and with `use_exact` (and `n` within the
/// exact limit) checks each one against exact `p_n`, `π_n`, `π_{n+1}`.
pub fn bounds_report(params: &GraphParams, use_exact: bool) -> Result<BoundsReport> {
    let n = params.n();
    if n == 0 {
        return Err(Error::invalid("bounds need n >= 1"));
    }
    if params.is_degenerate() {
        return Err(Error::Domain("bounds need 0 < p < 1".into()));
    }
    let q = params.q();
    let qn = q_power(q, n as u64)?;
    let qn1 = q_power(q, n as u64 - 1)?;
    let nqn = Rational::from(&qn * n);
    let nqn1 = Rational::from(&qn1 * n);
    let inv_nqn = Rational::from(nqn.recip_ref());

    let exact = use_exact && n < EXACT_N_LIMIT;
    let (pn, pi, pi_next) = if exact {
        let pn = ConnectivityTable::build(params).probability(n);
        let pi = isolated_vertex_probability(params)?;
        let pi_next = isolated_vertex_probability(&params.with_n(n + 1))?;
        (Some(pn), Some(pi), Some(pi_next))
    } else {
        (None, None, None)
    };
    let val = |x: &Option<ExactProb>| x.as_ref().map(|v| v.value().clone());
    let (pn_v, pi_v, pi_next_v) = (val(&pn), val(&pi), val(&pi_next));

    let lower_pn = BoundCheck::new("lower_pn", BoundSide::Lower, Some(1 - Rational::from(&nqn1 * 2u32)), pn_v.as_ref());
    let upper_pn = BoundCheck::new("upper_pn", BoundSide::Upper, Some(inv_nqn.clone()), pn_v.as_ref());
    let lower_pi = BoundCheck::new("lower_pi", BoundSide::Lower, Some(1 - inv_nqn), pi_v.as_ref());
    let upper_pi = BoundCheck::new("upper_pi", BoundSide::Upper, Some(nqn1), pi_v.as_ref());
    let cross = pn_v.as_ref().map(|p| Rational::from(&nqn * p));
    let cross_pi_next = BoundCheck::new("cross_pi_next", BoundSide::Lower, cross, pi_next_v.as_ref());

    Ok(BoundsReport {
        params: params.clone(),
        exact_pn: pn,
        exact_pi: pi,
        exact_pi_next: pi_next,
        lower_pn,
        upper_pn,
        lower_pi,
        upper_pi,
        cross_pi_next,
    })
}

/// Sandwich inequalities on the shifted factorial moments at one `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MomentBoundsReport {
    pub n: u32,
    pub s_max: u32,
    /// `q^{n-1} E(ν_{n-1})^(s) ≤ E(ν_n - 1)^(s) ≤ E(ν_{n-1})^(s)`.
    pub neighbour: CheckOutcome,
    /// `(n-1)^(s) q^{(n-1)s} ≤ E(ν_n - 1)^(s) ≤ 2 (n-1)^(s) q^{(n-1)(s+1)/2}`.
    pub falling: CheckOutcome,
}

impl MomentBoundsReport {
    pub fn passed(&self) -> bool {
        self.neighbour.passed() && self.falling.passed()
    }
}

/// Checks both moment sandwiches for `s = 1..=s_max`, reading moments off a
/// component table that covers `n`. The half-integer power in the upper
/// falling bound is compared after squaring both (non-negative) sides.
pub fn moment_bounds_check(table: &ComponentTable, n: u32, s_max: u32) -> Result<MomentBoundsReport> {
    if n == 0 || n > table.n_max() {
        return Err(Error::invalid(format!("n = {n} is outside the table range 1..={}", table.n_max())));
    }
    let q = table.connectivity().params().q().clone();
    let qn1 = q_power(&q, n as u64 - 1)?;
    let mut neighbour = CheckOutcome::Pass;
    let mut falling_check = CheckOutcome::Pass;
    for s in 1..=s_max {
        let shifted = table.shifted_moment(n, s);
        let prev = table.plain_moment(n - 1, s);
        let lower = Rational::from(&qn1 * &prev);
        if neighbour.passed() && !(lower <= shifted && shifted <= prev) {
            neighbour = CheckOutcome::Fail { at: s };
        }

        let ff = Rational::from(falling(n as i64 - 1, s as usize));
        let low = ff.clone() * q_power(&q, (n as u64 - 1) * s as u64)?;
        let high_sq = Rational::from(ff.square_ref()) * 4u32 * q_power(&q, (n as u64 - 1) * (s as u64 + 1))?;
        let shifted_sq = Rational::from(shifted.square_ref());
        if falling_check.passed() && !(low <= shifted && shifted_sq <= high_sq) {
            falling_check = CheckOutcome::Fail { at: s };
        }
    }
    Ok(MomentBoundsReport { n, s_max, neighbour, falling: falling_check })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::make_params;

    fn independent_beta(x: f64, terms: u64) -> f64 {
        // term_k = exp((k-2) ln k + k ln x - ln k!)
        let mut ln_fact = 0.0;
        let mut sum = 0.0;
        for k in 1..=terms {
            let kf = k as f64;
            ln_fact += kf.ln();
            sum += ((kf - 2.0) * kf.ln() + kf * x.ln() - ln_fact).exp();
        }
        sum
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(0.0, 1e-12).unwrap().value, 0.0);
        let b = beta(0.1, 1e-15).unwrap();
        assert!((b.value - 0.105_579_3).abs() < 1e-7, "{}", b.value);
        assert!((b.value - independent_beta(0.1, 200)).abs() < 1e-14);
        let boundary = beta((-1.0f64).exp(), 1e-12).unwrap();
        assert!((boundary.value - 0.5).abs() < 1e-6, "{boundary:?}");
        assert!(0.5 - boundary.value <= boundary.tail_bound + 1e-12);
    }

    #[test]
    fn beta_domain() {
        assert!(matches!(beta(-0.01, 1e-12), Err(Error::Domain(_))));
        assert!(matches!(beta(0.37, 1e-12), Err(Error::Domain(_))));
        assert!(beta((-1.0f64).exp() * (1.0 + 1e-13), 1e-12).is_ok());
    }

    #[test]
    fn beta_tail_bound_covers_truncation() {
        let limit = (-1.0f64).exp();
        for i in 1..=9 {
            let x = 0.1 * i as f64 * limit;
            let coarse = beta(x, 1e-8).unwrap();
            let fine = beta(x, 1e-15).unwrap();
            assert!(fine.value - coarse.value <= coarse.tail_bound * (1.0 + 1e-9) + 1e-15);
            assert!(coarse.tail_bound <= 1e-8 * coarse.value * x * E / (1.0 - x * E) * 1.0001);
        }
    }

    #[test]
    fn regimes() {
        let th = RegimeThresholds::default();
        let p = ((1000f64).ln() + 1.0) / 1000.0;
        let r = classify_regime(1000, p, &th).unwrap();
        assert_eq!(r.zone, Zone::NqnConst);
        assert!((r.alpha_estimate - (-1.0f64).exp()).abs() < 0.02);
        assert_eq!(classify_regime(1000, 0.5, &th).unwrap().zone, Zone::NqnZero);
        let r = classify_regime(1000, 1e-3, &th).unwrap();
        assert_eq!(r.zone, Zone::QnConst);
        assert_eq!(r.proxy, AlphaProxy::NegNLnQ);
        assert!((r.alpha_estimate - 1.0).abs() < 1e-3);
        assert_eq!(classify_regime(5, 1e-4, &th).unwrap().zone, Zone::FixedN);
        assert_eq!(classify_regime(100_000, 5e-5, &th).unwrap().zone, Zone::NqnInfinite);
        assert!(classify_regime(10, 0.0, &th).is_err());
    }

    #[test]
    fn approximations() {
        assert_eq!(moment_approx(50, 0.3, 0).unwrap(), 1.0);
        // n p q^n tiny: β(x) ~ x so the approximation is n q^n
        let (n, p) = (200u64, 0.2);
        let rel = moment_approx(n, p, 1).unwrap() / n_q_pow_n(n as f64, p) - 1.0;
        assert!(rel.abs() < 1e-6);
        let v = zone2_moment_approx(1000, 1e-3, 1).unwrap();
        let alpha = -1000.0 * (-1e-3f64).ln_1p();
        let expect = 1000.0 / alpha * beta(alpha * (-alpha).exp(), BETA_DEFAULT_TOL).unwrap().value;
        assert!((v - expect).abs() < 1e-9);
    }

    #[test]
    fn poisson() {
        assert!((poisson_limit_pmf(1.0, 1).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert!((poisson_limit_pmf(2.0, 3).unwrap() - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        assert!((poisson_limit_pmf(1e-12, 1).unwrap() - 1.0).abs() < 1e-9);
        assert!(poisson_limit_pmf(1.0, 0).is_err());
        assert!(poisson_limit_pmf(0.0, 1).is_err());
    }

    #[test]
    fn bounds_examples() {
        let r = bounds_report(&make_params(10, 1, 2).unwrap(), true).unwrap();
        assert_eq!(r.lower_pn.value_f64(), Some(0.9609375));
        assert_eq!(r.upper_pn.value_f64(), Some(102.4));
        assert!(r.upper_pn.vacuous);
        assert_eq!(r.upper_pn.clamped_f64(), Some(1.0));
        assert_eq!(r.lower_pn.holds, Some(true));
        assert!(r.all_pass());

        let r = bounds_report(&make_params(2, 1, 2).unwrap(), true).unwrap();
        assert_eq!(r.lower_pi.value_f64(), Some(-1.0));
        assert!(r.lower_pi.vacuous);
        assert_eq!(r.upper_pi.value_f64(), Some(1.0));
        assert_eq!(r.exact_pi.as_ref().unwrap().to_string(), "1/2");
        assert!(r.all_pass());

        let r = bounds_report(&make_params(1, 1, 2).unwrap(), true).unwrap();
        assert_eq!(r.lower_pn.value_f64(), Some(-1.0));
        assert!(r.lower_pn.vacuous && r.all_pass());

        let r = bounds_report(&make_params(30, 1, 1000).unwrap(), true).unwrap();
        assert!(r.lower_pn.vacuous);
        assert!(r.all_pass());

        let r = bounds_report(&make_params(500, 1, 2).unwrap(), true).unwrap();
        assert!(r.exact_pn.is_none() && r.cross_pi_next.bound.is_none());
        assert!(bounds_report(&make_params(5, 0, 1).unwrap(), true).is_err());
    }

    #[test]
    fn moment_sandwiches_hold_on_small_grid() {
        for (a, b) in [(1, 10), (1, 2), (9, 10)] {
            let table = ComponentTable::build(&make_params(20, a, b).unwrap());
            for n in 1..=20 {
                let r = moment_bounds_check(&table, n, 4).unwrap();
                assert!(r.passed(), "n={n} p={a}/{b}: {r:?}");
            }
        }
    }
}
