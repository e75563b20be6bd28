//! Configurable-precision evaluation of `p_m`, the shifted factorial moments
//! and the low end of the component pmf, for `n` too large for exact
//! rationals.
//!
//! The connectivity recursion subtracts terms as large as
//! `max_k C(m-1,k) q^{k(m-k)}` to produce a result in `[0,1]`, so that many
//! bits cancel. The working precision is the requested output precision plus
//! `log2` of the largest such weight plus a fixed guard.

use rug::Assign;
use rug::ops::PowAssign;
use rug::{Float, Rational};

use crate::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u32 = 256;
const EXTRA_GUARD_BITS: u32 = 48;
/// Refuse to run above this many working bits.
pub const MAX_WORKING_BITS: u32 = 1 << 20;

/// How the edge probability is given.
#[derive(Clone, Debug, PartialEq)]
pub enum EdgeSource {
    Decimal(f64),
    Exact(Rational),
    /// Choose `p` so that `n q^n` equals this value.
    NqnTarget(f64),
}

impl EdgeSource {
    /// `ln q` in double precision, only used to size the working precision.
    fn ln_q_estimate(&self, n: u32) -> f64 {
        match self {
            EdgeSource::Decimal(p) => (-p).ln_1p(),
            EdgeSource::Exact(p) => (-crate::exact::rational_to_f64(p)).ln_1p(),
            EdgeSource::NqnTarget(alpha) => (alpha.ln() - (n as f64).ln()) / n as f64,
        }
    }

    fn q(&self, n: u32, prec: u32) -> Float {
        match self {
            EdgeSource::Decimal(p) => 1 - Float::with_val(prec, *p),
            EdgeSource::Exact(p) => Float::with_val(prec, 1 - p.clone()),
            EdgeSource::NqnTarget(alpha) => {
                let nf = Float::with_val(prec, n);
                let lq = (Float::with_val(prec, *alpha).ln() - nf.clone().ln()) / nf;
                lq.exp()
            }
        }
    }
}

/// Extra bits needed so that every `p_m`, `m ≤ n`, keeps full relative
/// precision: `log2` of the largest subtracted weight (absolute error of the
/// subtraction) plus `-log2` of a lower bound on `p_m` (converting that to
/// relative error).
///
/// The lower bound is the larger of `1 - 2m q^{m-1}` and the probability
/// `m^{m-2} p^{m-1} q^{C(m,2)-m+1}` that the graph is a spanning tree.
pub fn cancellation_bits(n: u32, ln_q: f64) -> u32 {
    let ln_p = (-ln_q.exp_m1()).ln();
    let mut worst = 0.0f64;
    for m in 2..=n as u64 {
        // log-binomial grows then shrinks; scan all k, cheap next to the recursion
        let mut ln_binom = 0.0f64;
        let mut ln_w = f64::NEG_INFINITY;
        for k in 1..m {
            ln_binom += ((m - k) as f64).ln() - (k as f64).ln();
            ln_w = ln_w.max(ln_binom + (k * (m - k)) as f64 * ln_q);
        }
        let mf = m as f64;
        let tree = (mf - 2.0) * mf.ln() + (mf - 1.0) * ln_p + ((m * (m - 1) / 2 + 1 - m) as f64) * ln_q;
        let union = (-2.0 * mf * ((mf - 1.0) * ln_q).exp()).ln_1p();
        let ln_lower = if union.is_finite() { tree.max(union) } else { tree };
        worst = worst.max(ln_w.max(0.0) - ln_lower.min(0.0));
    }
    (worst / std::f64::consts::LN_2).ceil() as u32 + 1
}

/// Options for [`FloatModel::build`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FloatOptions {
    pub output_bits: u32,
    /// Highest shifted factorial moment order to carry.
    pub s_max: u32,
    /// Highest component count whose probability is carried.
    pub j_max: u32,
}

impl Default for FloatOptions {
    fn default() -> Self {
        Self { output_bits: DEFAULT_PRECISION_BITS, s_max: 2, j_max: 3 }
    }
}

/// Float tables for all sizes `0..=n` at a fixed `q`.
#[derive(Clone, Debug)]
pub struct FloatModel {
    n: u32,
    working_bits: u32,
    p: Float,
    q: Float,
    conn: Vec<Float>,
    /// `shifted[s][m] = E(ν_m - 1)^(s)`
    shifted: Vec<Vec<Float>>,
    /// `pmf[j][m] = P{ν_m = j}`
    pmf: Vec<Vec<Float>>,
}

impl FloatModel {
    pub fn build(n: u32, source: &EdgeSource, opts: FloatOptions) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n must be positive"));
        }
        match source {
            EdgeSource::Decimal(p) if !(*p > 0.0 && *p < 1.0) => {
                return Err(Error::Domain(format!("p = {p} must lie strictly between 0 and 1")));
            }
            EdgeSource::Exact(p) if !(*p > 0 && *p < 1) => {
                return Err(Error::Domain(format!("p = {p} must lie strictly between 0 and 1")));
            }
            EdgeSource::NqnTarget(a) if !(*a > 0.0 && *a < n as f64) || !a.is_finite() => {
                return Err(Error::Domain(format!("n q^n = {a} needs 0 < target < n")));
            }
            _ => {}
        }
        let guard = cancellation_bits(n, source.ln_q_estimate(n));
        let working = opts.output_bits.saturating_add(guard).saturating_add(EXTRA_GUARD_BITS);
        if working > MAX_WORKING_BITS {
            return Err(Error::ResourceLimit {
                what: "working precision bits",
                n: working as u64,
                limit: MAX_WORKING_BITS as u64,
            });
        }
        let q = source.q(n, working);
        let p = Float::with_val(working, 1 - &q);
        Ok(Self::run(n, working, p, q, opts))
    }

    fn run(n: u32, prec: u32, p: Float, q: Float, opts: FloatOptions) -> Self {
        let len = n as usize + 1;
        let zero = Float::new(prec);
        let one = Float::with_val(prec, 1);
        let s_len = opts.s_max as usize + 1;
        let j_len = opts.j_max as usize + 1;

        let mut q_pows = Vec::with_capacity(len);
        q_pows.push(one.clone());
        for e in 1..len {
            let next = Float::with_val(prec, &q_pows[e - 1] * &q);
            q_pows.push(next);
        }

        let mut conn = vec![zero.clone(); len];
        conn[1] = one.clone();
        let mut shifted = vec![vec![zero.clone(); len]; s_len];
        shifted[0].fill(one.clone());
        let mut pmf = vec![vec![zero.clone(); len]; j_len];
        if j_len > 0 {
            pmf[0][0] = one.clone();
        }
        if j_len > 1 {
            pmf[1][1] = one.clone();
        }

        let mut weights: Vec<Float> = Vec::with_capacity(len);
        let mut acc = Float::new(prec);
        let mut tmp = Float::new(prec);
        for m in 2..len {
            // w_k = C(m-1,k) q^{k(m-k)}, k = 1..m-1
            weights.clear();
            weights.resize(m, zero.clone());
            let mut cross = one.clone();
            for k in 1..=m / 2 {
                // q^{k(m-k)} = q^{(k-1)(m-k+1)} q^{m-2k+1}
                cross *= &q_pows[m - 2 * k + 1];
                weights[k].assign(&cross);
                weights[m - k].assign(&cross);
            }
            let mut binom = one.clone();
            for k in 1..m {
                binom *= (m - k) as u32;
                binom /= k as u32;
                weights[k] *= &binom;
            }

            acc.assign(0);
            for k in 1..m {
                tmp.assign(&weights[k] * &conn[m - k]);
                acc += &tmp;
            }
            conn[m] = Float::with_val(prec, 1 - &acc);

            for s in 1..s_len {
                acc.assign(0);
                for k in 1..m {
                    tmp.assign(&weights[k] * &conn[k]);
                    tmp *= &shifted[s - 1][m - k];
                    acc += &tmp;
                }
                shifted[s][m].assign(&acc);
            }

            if j_len > 1 {
                pmf[1][m] = conn[m].clone();
            }
            for j in 2..j_len {
                acc.assign(0);
                for k in (j - 1)..m {
                    tmp.assign(&weights[k] * &pmf[j - 1][k]);
                    tmp *= &conn[m - k];
                    acc += &tmp;
                }
                pmf[j][m].assign(&acc);
            }
        }
        Self { n, working_bits: prec, p, q, conn, shifted, pmf }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn working_bits(&self) -> u32 {
        self.working_bits
    }

    pub fn p(&self) -> &Float {
        &self.p
    }

    pub fn q(&self) -> &Float {
        &self.q
    }

    pub fn s_max(&self) -> u32 {
        self.shifted.len() as u32 - 1
    }

    pub fn j_max(&self) -> u32 {
        self.pmf.len() as u32 - 1
    }

    /// `p_m` for `m ≤ n`.
    pub fn connected(&self, m: u32) -> &Float {
        &self.conn[m as usize]
    }

    /// `E(ν_m - 1)^(s)` for `m ≤ n`, `s ≤ s_max`.
    pub fn shifted_moment(&self, m: u32, s: u32) -> &Float {
        &self.shifted[s as usize][m as usize]
    }

    /// `P{ν_m = j}` for `m ≤ n`, `j ≤ j_max`.
    pub fn component_prob(&self, m: u32, j: u32) -> &Float {
        &self.pmf[j as usize][m as usize]
    }

    /// `n q^n` at working precision.
    pub fn n_q_pow_n(&self) -> Float {
        let mut t = self.q.clone();
        t.pow_assign(self.n);
        t * self.n
    }
}
