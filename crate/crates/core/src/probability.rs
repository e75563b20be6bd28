//! Exact connectivity probability, component-count distribution, isolated
//! vertex probability and factorial moments of `ν_n`, the number of
//! connected components of `G(n,p)`.
//!
//! With `p = a/d` in lowest terms and `b = d - a`, every probability attached
//! to an `m`-vertex graph is an integer multiple of `d^{-C(m,2)}`. The tables
//! here store those integers, so the recursions run on big integers only and
//! a rational is formed (and reduced) when a value is read out.
//!
//! Two routes are provided for the factorial moments:
//! [`factorial_moments_from_pmf`] sums over the exact distribution, while
//! [`factorial_moments_by_convolution`] runs the generating-function
//! recursions on plain rationals through [`sg_convolve`]. They share no
//! arithmetic and must agree exactly.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::exact::{binomial, pairs, q_power, sg_convolve, CoefficientSeq, ExactProb, GraphParams};
use crate::{Error, Result};

/// Integer scaling data for `p = a/d`, `q = b/d`.
#[derive(Clone, Debug)]
struct Scale {
    /// `b^j` for `j = 0..=n_max`.
    b_pows: Vec<Integer>,
    /// `d^{C(m,2)}` for `m = 0..=n_max`.
    d_pair_pows: Vec<Integer>,
}

impl Scale {
    fn new(params: &GraphParams, n_max: u32) -> Self {
        let d = params.p().denom().clone();
        let b = Integer::from(&d - params.p().numer());
        let mut b_pows = Vec::with_capacity(n_max as usize + 1);
        let mut acc = Integer::from(1);
        for _ in 0..=n_max {
            b_pows.push(acc.clone());
            acc *= &b;
        }
        let mut d_pair_pows = Vec::with_capacity(n_max as usize + 1);
        let mut acc = Integer::from(1);
        for m in 0..=n_max {
            // d^{C(m,2)} = d^{C(m-1,2)} * d^{m-1}
            if m >= 2 {
                acc *= Integer::from(Pow::pow(&d, m - 1));
            }
            d_pair_pows.push(acc.clone());
        }
        Self { b_pows, d_pair_pows }
    }

    /// `b^{k(m-k)}` for `k = 0..=m`.
    fn cross_powers(&self, m: usize) -> Vec<Integer> {
        let mut out = vec![Integer::new(); m + 1];
        out[0] = Integer::from(1);
        for k in 1..=m / 2 {
            // k(m-k) - (k-1)(m-k+1) = m - 2k + 1
            out[k] = Integer::from(&out[k - 1] * &self.b_pows[m - 2 * k + 1]);
        }
        for k in m / 2 + 1..=m {
            out[k] = out[m - k].clone();
        }
        out
    }

    fn to_rational(&self, scaled: &Integer, m: usize) -> Rational {
        Rational::from((scaled.clone(), self.d_pair_pows[m].clone()))
    }
}

/// Exact `p_m = P{G(m,p) connected}` for `m = 0..=n`, held as scaled integers.
#[derive(Clone, Debug)]
pub struct ConnectivityTable {
    params: GraphParams,
    scale: Scale,
    scaled: Vec<Integer>,
}

impl ConnectivityTable {
    /// Tabulates `p_0..p_n` with `n = params.n()` by the recursion
    /// `p_m = 1 - Σ_{k=1}^{m-1} C(m-1,k) q^{k(m-k)} p_{m-k}`.
    pub fn build(params: &GraphParams) -> Self {
        let n = params.n() as usize;
        let scale = Scale::new(params, params.n());
        let mut scaled = Vec::with_capacity(n + 1);
        scaled.push(Integer::new());
        if n >= 1 {
            scaled.push(Integer::from(1));
        }
        if *params.p() == 0 {
            scaled.resize(n + 1, Integer::new());
        } else if *params.p() == 1 {
            scaled.resize(n + 1, Integer::from(1));
        } else {
            for m in 2..=n {
                let cross = scale.cross_powers(m);
                let mut acc = scale.d_pair_pows[m].clone();
                let mut binom = Integer::from(1);
                for k in 1..m {
                    binom *= (m - k) as u32;
                    binom /= k as u32;
                    let mut term = Integer::from(&binom * &cross[k]);
                    term *= &scale.d_pair_pows[k];
                    term *= &scaled[m - k];
                    acc -= term;
                }
                scaled.push(acc);
            }
        }
        Self { params: params.clone(), scale, scaled }
    }

    pub fn n_max(&self) -> u32 {
        self.params.n()
    }

    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn probability(&self, m: u32) -> ExactProb {
        let m = m as usize;
        ExactProb::from_trusted(self.scale.to_rational(&self.scaled[m], m))
    }
}

/// Exact `P{ν_m = j}` for every `m ≤ n` and `j ≤ m`.
///
/// Memory is `O(n^2)` big integers; this is the table every pmf and moment
/// query in the exact layer is read from.
#[derive(Clone, Debug)]
pub struct ComponentTable {
    conn: ConnectivityTable,
    /// `rows[m][j] = P{ν_m = j} d^{C(m,2)}`.
    rows: Vec<Vec<Integer>>,
}

impl ComponentTable {
    pub fn build(params: &GraphParams) -> Self {
        let conn = ConnectivityTable::build(params);
        let n = params.n() as usize;
        let mut rows: Vec<Vec<Integer>> = Vec::with_capacity(n + 1);
        rows.push(vec![Integer::from(1)]);
        for m in 1..=n {
            let mut row = vec![Integer::new(); m + 1];
            if *params.p() == 0 {
                row[m] = Integer::from(1);
            } else if *params.p() == 1 {
                row[1] = Integer::from(1);
            } else {
                row[1] = conn.scaled[m].clone();
                // weight[k] = C(m-1,k) p_{m-k} b^{k(m-k)}, independent of j
                let cross = conn.scale.cross_powers(m);
                let mut weight = Vec::with_capacity(m);
                let mut binom = Integer::from(1);
                weight.push(Integer::new());
                for k in 1..m {
                    binom *= (m - k) as u32;
                    binom /= k as u32;
                    let mut w = Integer::from(&binom * &cross[k]);
                    w *= &conn.scaled[m - k];
                    weight.push(w);
                }
                for j in 2..=m {
                    let mut acc = Integer::new();
                    for k in j - 1..m {
                        acc += &weight[k] * &rows[k][j - 1];
                    }
                    row[j] = acc;
                }
            }
            rows.push(row);
        }
        Self { conn, rows }
    }

    pub fn n_max(&self) -> u32 {
        self.conn.n_max()
    }

    pub fn connectivity(&self) -> &ConnectivityTable {
        &self.conn
    }

    /// `P{ν_m = j}`; zero for `j > m`.
    pub fn probability(&self, m: u32, j: u32) -> ExactProb {
        let row = &self.rows[m as usize];
        match row.get(j as usize) {
            Some(v) => ExactProb::from_trusted(self.conn.scale.to_rational(v, m as usize)),
            None => ExactProb::zero(),
        }
    }

    pub fn pmf(&self, m: u32) -> Result<ComponentPMF> {
        if m == 0 {
            return Err(Error::invalid("the component distribution needs n >= 1"));
        }
        if m > self.n_max() {
            return Err(Error::IndexOutOfRange { index: m as usize, len: self.n_max() as usize + 1 });
        }
        let probs = (0..=m).map(|j| self.probability(m, j)).collect();
        Ok(ComponentPMF { params: self.conn.params.with_n(m), probs })
    }

    /// `E(ν_m - shift)^(s)` for `shift ∈ {0, 1}`, read directly off the table.
    fn factorial_moment(&self, m: usize, s: usize, shift: i64) -> Rational {
        let mut acc = Integer::new();
        for (j, v) in self.rows[m].iter().enumerate() {
            if *v != 0 {
                acc += falling(j as i64 - shift, s) * v;
            }
        }
        self.conn.scale.to_rational(&acc, m)
    }

    /// `E(ν_m - 1)^(s)`.
    pub fn shifted_moment(&self, m: u32, s: u32) -> Rational {
        self.factorial_moment(m as usize, s as usize, 1)
    }

    /// `E(ν_m)^(s)`.
    pub fn plain_moment(&self, m: u32, s: u32) -> Rational {
        self.factorial_moment(m as usize, s as usize, 0)
    }

    pub fn moments(&self, m: u32, s_max: u32) -> Result<MomentTable> {
        factorial_moments_from_pmf(&self.pmf(m)?, s_max)
    }
}

/// The exact distribution of `ν_n` over `s = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentPMF {
    params: GraphParams,
    probs: Vec<ExactProb>,
}

impl ComponentPMF {
    pub fn n(&self) -> u32 {
        self.params.n()
    }

    pub fn params(&self) -> &GraphParams {
        &self.params
    }

    pub fn probs(&self) -> &[ExactProb] {
        &self.probs
    }

    /// `P{ν_n = s}`; zero beyond `n`.
    pub fn prob(&self, s: u32) -> ExactProb {
        self.probs.get(s as usize).cloned().unwrap_or_else(ExactProb::zero)
    }

    pub fn total(&self) -> Rational {
        self.probs.iter().map(ExactProb::value).sum()
    }

    pub(crate) fn from_parts(params: GraphParams, probs: Vec<ExactProb>) -> Self {
        Self { params, probs }
    }
}

/// Exact factorial moments `E(ν_n - 1)^(s)` (`shifted`) and `E(ν_n)^(s)`
/// (`plain`) for `s = 0..=s_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentTable {
    pub params: GraphParams,
    pub s_max: u32,
    pub shifted: Vec<Rational>,
    pub plain: Vec<Rational>,
}

impl MomentTable {
    pub fn n(&self) -> u32 {
        self.params.n()
    }
}

/// `x (x-1) ... (x-s+1)`.
pub(crate) fn falling(x: i64, s: usize) -> Integer {
    let mut acc = Integer::from(1);
    for i in 0..s as i64 {
        acc *= x - i;
        if acc == 0 {
            break;
        }
    }
    acc
}

/// `p_n`, with `p_0 = 0` and `p_1 = 1`.
pub fn connected_probability(params: &GraphParams) -> ExactProb {
    if params.n() == 0 {
        return ExactProb::zero();
    }
    ConnectivityTable::build(params).probability(params.n())
}

pub fn component_pmf(params: &GraphParams) -> Result<ComponentPMF> {
    if params.n() == 0 {
        return Err(Error::invalid("the component distribution needs n >= 1"));
    }
    ComponentTable::build(params).pmf(params.n())
}

/// Probability of at least one isolated vertex, by inclusion–exclusion:
/// `π_n = Σ_{k=1}^{n} (-1)^{k-1} C(n,k) q^{k(n-k) + k(k-1)/2}`.
pub fn isolated_vertex_probability(params: &GraphParams) -> Result<ExactProb> {
    let n = params.n() as u64;
    if n == 0 {
        return Err(Error::invalid("isolated-vertex probability needs n >= 1"));
    }
    if *params.p() == 0 {
        return Ok(ExactProb::one());
    }
    if *params.p() == 1 {
        return Ok(if n == 1 { ExactProb::one() } else { ExactProb::zero() });
    }
    let d = params.p().denom();
    let b = Integer::from(d - params.p().numer());
    // scaled by d^{C(n,2)}: the k-th term keeps d^{C(n-k,2)}
    let mut acc = Integer::new();
    for k in 1..=n {
        let e = k * (n - k) + pairs(k);
        let mut term = binomial(n, k);
        term *= Integer::from(Pow::pow(&b, u32_exp(e)?));
        term *= Integer::from(Pow::pow(d, u32_exp(pairs(n - k))?));
        if k % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    let den = Integer::from(Pow::pow(d, u32_exp(pairs(n))?));
    Ok(ExactProb::from_trusted(Rational::from((acc, den))))
}

fn u32_exp(e: u64) -> Result<u32> {
    u32::try_from(e).map_err(|_| Error::invalid(format!("exponent {e} exceeds u32")))
}

pub fn factorial_moments_from_pmf(pmf: &ComponentPMF, s_max: u32) -> Result<MomentTable> {
    if s_max > pmf.n() {
        return Err(Error::invalid(format!("s_max = {s_max} exceeds n = {}", pmf.n())));
    }
    let mut shifted = Vec::with_capacity(s_max as usize + 1);
    let mut plain = Vec::with_capacity(s_max as usize + 1);
    for s in 0..=s_max as usize {
        let mut sh = Rational::new();
        let mut pl = Rational::new();
        for (k, prob) in pmf.probs().iter().enumerate() {
            if *prob.value() == 0 {
                continue;
            }
            sh += Rational::from(falling(k as i64 - 1, s) * prob.value());
            pl += Rational::from(falling(k as i64, s) * prob.value());
        }
        shifted.push(sh);
        plain.push(pl);
    }
    Ok(MomentTable { params: pmf.params().clone(), s_max, shifted, plain })
}

/// Factorial moments from the generating-function identities alone:
///
/// * `p_m` from `m = Σ_k C(m,k) q^{k(m-k)} k p_k`,
/// * `E(ν_m)^(s)` from `M_s = B·M_{s-1}` (that is, `M_s = A B^s`),
/// * `m E(ν_m - 1)^(s) = Σ_k C(m,k) q^{k(m-k)} p_k (m-k) E(ν_{m-k} - 1)^(s-1)`.
pub fn factorial_moments_by_convolution(params: &GraphParams, s_max: u32) -> Result<MomentTable> {
    let n = params.n() as usize;
    if n == 0 {
        return Err(Error::invalid("factorial moments need n >= 1"));
    }
    if s_max > params.n() {
        return Err(Error::invalid(format!("s_max = {s_max} exceeds n = {n}")));
    }
    if params.is_degenerate() {
        return Ok(degenerate_moments(params, s_max));
    }
    let q = params.q();
    let len = n + 1;
    let ones = CoefficientSeq::ones(len);

    let mut kp = CoefficientSeq::zeros(len);
    let mut conn = CoefficientSeq::zeros(len);
    for m in 1..=n {
        // kp[m] is still zero, so the convolution is the sum over k < m
        let rest = sg_convolve(&kp, &ones, q, m)?;
        let mp = Rational::from(m as u32) - rest;
        conn.set(m, Rational::from(&mp / m as u32))?;
        kp.set(m, mp)?;
    }

    let mut plain = vec![Rational::from(1)];
    let mut shifted = vec![Rational::from(1)];
    let mut plain_prev = ones.clone();
    let mut shifted_prev = ones;
    for _ in 1..=s_max {
        let weighted = CoefficientSeq::new(
            shifted_prev.terms().iter().enumerate().map(|(j, v)| Rational::from(v * j as u32)).collect(),
        );
        let mut plain_next = CoefficientSeq::zeros(len);
        let mut shifted_next = CoefficientSeq::zeros(len);
        for m in 0..=n {
            plain_next.set(m, sg_convolve(&conn, &plain_prev, q, m)?)?;
            if m > 0 {
                let z = sg_convolve(&conn, &weighted, q, m)?;
                shifted_next.set(m, z / m as u32)?;
            }
        }
        plain.push(plain_next[n].clone());
        shifted.push(shifted_next[n].clone());
        plain_prev = plain_next;
        shifted_prev = shifted_next;
    }
    Ok(MomentTable { params: params.clone(), s_max, shifted, plain })
}

/// Closed forms at `p = 0` (`ν_n = n`) and `p = 1` (`ν_n = 1`).
fn degenerate_moments(params: &GraphParams, s_max: u32) -> MomentTable {
    let nu = if *params.p() == 0 { params.n() as i64 } else { 1 };
    let range = 0..=s_max as usize;
    MomentTable {
        params: params.clone(),
        s_max,
        shifted: range.clone().map(|s| Rational::from(falling(nu - 1, s))).collect(),
        plain: range.map(|s| Rational::from(falling(nu, s))).collect(),
    }
}

/// Result of checking one identity or inequality chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckOutcome {
    Pass,
    /// First index at which the check failed.
    Fail { at: u32 },
}

impl CheckOutcome {
    pub fn passed(self) -> bool {
        self == CheckOutcome::Pass
    }

    fn first_failure(mut indices: impl Iterator<Item = (u32, bool)>) -> Self {
        match indices.find(|(_, ok)| !ok) {
            Some((at, _)) => CheckOutcome::Fail { at },
            None => CheckOutcome::Pass,
        }
    }
}

/// Both moment conversions between `ν_n` and `ν_n - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    /// `E(ν)^(s) = E(ν-1)^(s) + s E(ν-1)^(s-1)`.
    pub shift: CheckOutcome,
    /// `(-1)^s E(ν-1)^(s) / s! = Σ_{k=0}^{s} (-1)^k E(ν)^(k) / k!`.
    pub inversion: CheckOutcome,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.shift.passed() && self.inversion.passed()
    }
}

pub fn moment_identity_check(table: &MomentTable) -> IdentityReport {
    let s_max = table.s_max as usize;
    let shift = CheckOutcome::first_failure((1..=s_max).map(|s| {
        let rhs = Rational::from(&table.shifted[s - 1] * s as u32) + &table.shifted[s];
        (s as u32, table.plain[s] == rhs)
    }));

    let mut factorial = Integer::from(1);
    let mut partial = Rational::new();
    let inversion = CheckOutcome::first_failure((0..=s_max).map(|s| {
        if s > 0 {
            factorial *= s as u32;
        }
        let mut term = Rational::from(&table.plain[s] / &factorial);
        let mut lhs = Rational::from(&table.shifted[s] / &factorial);
        if s % 2 == 1 {
            term = -term;
            lhs = -lhs;
        }
        partial += term;
        (s as u32, lhs == partial)
    }));
    IdentityReport { shift, inversion }
}

/// The two monotonicity chains `p_{k+1} ≥ (1 - q^k) p_k` and
/// `π_{k+1} ≥ k q^k p_k` for `1 ≤ k ≤ n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MonotonicityReport {
    pub connectivity: CheckOutcome,
    pub isolation: CheckOutcome,
}

impl MonotonicityReport {
    pub fn passed(&self) -> bool {
        self.connectivity.passed() && self.isolation.passed()
    }
}

pub fn monotonicity_check(params: &GraphParams) -> Result<MonotonicityReport> {
    let n = params.n();
    if n == 0 {
        return Err(Error::invalid("monotonicity check needs n >= 1"));
    }
    let conn = ConnectivityTable::build(&params.with_n(n + 1));
    let isolated = (1..=n + 1)
        .map(|m| isolated_vertex_probability(&params.with_n(m)).map(ExactProb::into_inner))
        .collect::<Result<Vec<_>>>()?;
    let q = params.q();
    let mut qk = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        qk.push(q_power(q, k as u64)?);
    }

    let connectivity = CheckOutcome::first_failure((1..=n).map(|k| {
        let bound = Rational::from(1 - &qk[k as usize]) * conn.probability(k).value();
        (k, *conn.probability(k + 1).value() >= bound)
    }));
    let isolation = CheckOutcome::first_failure((1..=n).map(|k| {
        let bound = Rational::from(&qk[k as usize] * k) * conn.probability(k).value();
        (k, isolated[k as usize] >= bound)
    }));
    Ok(MonotonicityReport { connectivity, isolation })
}
