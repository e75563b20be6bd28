//! Exact-arithmetic foundation: validated parameters, probabilities and the
//! coefficient convolution of the normalised generating functions.
//!
//! A sequence `r_0, r_1, ...` is attached to the formal series
//! `Σ r_n x^n / (n! q^{n(n-1)/2})`. Multiplying two such series multiplies
//! their coefficient sequences by the weighted binomial convolution
//! implemented in [`sg_convolve`]; every exact identity in the crate is a
//! statement about such products.

use std::fmt;
use std::str::FromStr;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::{Error, Result};

/// Parameters of `G(n,p)`: vertex count and an exact edge probability.
///
/// `q = 1 - p` is derived on construction and cannot be set independently.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphParams {
    n: u32,
    p: Rational,
    q: Rational,
}

impl GraphParams {
    pub fn new(n: u32, p: Rational) -> Result<Self> {
        if !(0..=1).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(format_rational(&p)));
        }
        let q = Rational::from(1) - &p;
        Ok(Self { n, p, q })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    /// Same edge probability, different vertex count.
    pub fn with_n(&self, n: u32) -> Self {
        Self { n, p: self.p.clone(), q: self.q.clone() }
    }

    /// Round-to-nearest conversion of `p`, used by the float layers.
    pub fn p_f64(&self) -> f64 {
        rational_to_f64(&self.p)
    }

    pub(crate) fn is_degenerate(&self) -> bool {
        self.p == 0 || self.p == 1
    }
}

impl fmt::Display for GraphParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G({}, {})", self.n, format_rational(&self.p))
    }
}

/// Builds [`GraphParams`] from `p = p_num / p_den`, reduced to lowest terms.
pub fn make_params(n: u32, p_num: i64, p_den: i64) -> Result<GraphParams> {
    if p_den == 0 {
        return Err(Error::ZeroDenominator);
    }
    if p_den < 0 {
        return Err(Error::invalid("probability denominator must be positive"));
    }
    GraphParams::new(n, Rational::from((p_num, p_den)))
}

/// An exact probability, guaranteed to lie in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ExactProb(Rational);

impl ExactProb {
    pub fn new(value: Rational) -> Result<Self> {
        if !(0..=1).contains(&value) {
            return Err(Error::ProbabilityOutOfRange(format_rational(&value)));
        }
        Ok(Self(value))
    }

    /// Wraps a value the caller has already proven to be a probability.
    pub(crate) fn from_trusted(value: Rational) -> Self {
        debug_assert!((0..=1).contains(&value), "not a probability: {value}");
        Self(value)
    }

    pub fn zero() -> Self {
        Self(Rational::new())
    }

    pub fn one() -> Self {
        Self(Rational::from(1))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn into_inner(self) -> Rational {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.0)
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl PartialEq<Rational> for ExactProb {
    fn eq(&self, other: &Rational) -> bool {
        self.0 == *other
    }
}

/// A finite coefficient sequence `r_0..r_N` evaluated at a fixed `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientSeq(Vec<Rational>);

impl CoefficientSeq {
    pub fn new(terms: Vec<Rational>) -> Self {
        Self(terms)
    }

    /// `len` zero coefficients.
    pub fn zeros(len: usize) -> Self {
        Self(vec![Rational::new(); len])
    }

    /// The sequence of the series `A`: all ones.
    pub fn ones(len: usize) -> Self {
        Self(vec![Rational::from(1); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<&Rational> {
        self.0.get(i)
    }

    /// Overwrites one coefficient; the length never changes.
    pub fn set(&mut self, i: usize, value: Rational) -> Result<()> {
        let len = self.0.len();
        let slot = self.0.get_mut(i).ok_or(Error::IndexOutOfRange { index: i, len })?;
        *slot = value;
        Ok(())
    }

    pub fn terms(&self) -> &[Rational] {
        &self.0
    }
}

impl std::ops::Index<usize> for CoefficientSeq {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.0[i]
    }
}

/// Coefficient `z_n` of the product of two normalised series:
/// `z_n = Σ_{k=0}^{n} C(n,k) q^{k(n-k)} r_k t_{n-k}`, computed exactly.
pub fn sg_convolve(r: &CoefficientSeq, t: &CoefficientSeq, q: &Rational, n: usize) -> Result<Rational> {
    let len = r.len().min(t.len());
    if n >= len {
        return Err(Error::IndexOutOfRange { index: n, len });
    }
    if *q < 0 || *q > 1 {
        return Err(Error::ProbabilityOutOfRange(format_rational(q)));
    }
    let n32 = u32::try_from(n).map_err(|_| Error::invalid("convolution index exceeds u32"))?;
    let mut z = Rational::new();
    let mut binom = Integer::from(1);
    for k in 0..=n {
        if k > 0 {
            // C(n,k) = C(n,k-1) (n-k+1) / k
            binom *= n32 - k as u32 + 1;
            binom /= k as u32;
        }
        let rk = &r[k];
        let tk = &t[n - k];
        if *rk == 0 || *tk == 0 {
            continue;
        }
        let weight = q_power(q, k as u64 * (n - k) as u64)?;
        let mut term = Rational::from(rk * tk);
        term *= weight;
        term *= &binom;
        z += term;
    }
    Ok(z)
}

/// `q^e` for a 64-bit exponent; `q^0 = 1` even for `q = 0`.
pub(crate) fn q_power(q: &Rational, e: u64) -> Result<Rational> {
    let e = u32::try_from(e).map_err(|_| Error::invalid(format!("exponent {e} exceeds u32")))?;
    Ok(Rational::from(q.pow(e)))
}

/// `n choose k` as a big integer (zero when `k > n`).
pub(crate) fn binomial(n: u64, k: u64) -> Integer {
    if k > n {
        return Integer::new();
    }
    match (u32::try_from(n), u32::try_from(k)) {
        (Ok(n), Ok(k)) => Integer::from(Integer::binomial_u(n, k)),
        _ => Integer::from(n).binomial(k.min(n - k) as u32),
    }
}

/// `C(n,2)`.
pub(crate) fn pairs(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Serialises a rational as `"num/den"` in lowest terms (`"1/1"`, `"0/1"` included).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses the `"num/den"` form produced by [`format_rational`].
pub fn parse_rational(s: &str) -> Result<Rational> {
    let (num, den) = s.trim().split_once('/').ok_or_else(|| Error::Parse(s.to_string()))?;
    let num = Integer::from_str(num.trim()).map_err(|_| Error::Parse(s.to_string()))?;
    let den = Integer::from_str(den.trim()).map_err(|_| Error::Parse(s.to_string()))?;
    if den == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::from((num, den)))
}

/// Nearest `f64` to an exact rational (rug's own cast truncates).
pub fn rational_to_f64(r: &Rational) -> f64 {
    Float::with_val(64, r).to_f64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn make_params_reduces_and_derives_q() {
        let g = make_params(3, 1, 2).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(*g.p(), rat(1, 2));
        assert_eq!(*g.q(), rat(1, 2));

        let g = make_params(5, 0, 1).unwrap();
        assert_eq!(*g.p(), 0);
        assert_eq!(*g.q(), 1);

        let g = make_params(2, 6, 8).unwrap();
        assert_eq!(format_rational(g.p()), "3/4");
        assert_eq!(format_rational(g.q()), "1/4");
    }

    #[test]
    fn make_params_rejects_bad_probabilities() {
        assert!(matches!(make_params(4, 3, 2), Err(Error::ProbabilityOutOfRange(_))));
        assert!(matches!(make_params(4, -1, 2), Err(Error::ProbabilityOutOfRange(_))));
        assert_eq!(make_params(4, 1, 0), Err(Error::ZeroDenominator));
    }

    #[test]
    fn exact_prob_range() {
        assert!(ExactProb::new(rat(3, 2)).is_err());
        assert!(ExactProb::new(rat(-1, 3)).is_err());
        assert_eq!(ExactProb::new(rat(19, 32)).unwrap().to_string(), "19/32");
    }

    #[test]
    fn convolution_of_ones_at_q_one_is_binomial_sum() {
        let ones = CoefficientSeq::ones(4);
        let z = sg_convolve(&ones, &ones, &Rational::from(1), 3).unwrap();
        assert_eq!(z, 8);
    }

    #[test]
    fn convolution_gives_expected_components_for_two_vertices() {
        // r = (p_0, p_1, p_2) at p = 1/2; z_2 = E ν_2 by E = AB.
        let r = CoefficientSeq::new(vec![rat(0, 1), rat(1, 1), rat(1, 2)]);
        let t = CoefficientSeq::ones(3);
        let z = sg_convolve(&r, &t, &rat(1, 2), 2).unwrap();
        assert_eq!(z, rat(3, 2));
    }

    #[test]
    fn convolution_at_zero_index_is_product_of_heads() {
        let r = CoefficientSeq::new(vec![rat(2, 3), rat(5, 1)]);
        let t = CoefficientSeq::new(vec![rat(3, 7)]);
        assert_eq!(sg_convolve(&r, &t, &rat(1, 3), 0).unwrap(), rat(2, 7));
        // q = 0 still uses 0^0 = 1
        assert_eq!(sg_convolve(&r, &t, &rat(0, 1), 0).unwrap(), rat(2, 7));
    }

    #[test]
    fn convolution_index_out_of_range() {
        let r = CoefficientSeq::ones(3);
        let t = CoefficientSeq::ones(2);
        assert_eq!(
            sg_convolve(&r, &t, &rat(1, 2), 2),
            Err(Error::IndexOutOfRange { index: 2, len: 2 })
        );
    }

    #[test]
    fn large_exponents_do_not_overflow() {
        let q = rat(1, 2);
        let w = q_power(&q, 1_000_000).unwrap();
        assert_eq!(w.denom().significant_bits(), 1_000_001);
    }

    #[test]
    fn rational_text_round_trip() {
        for s in ["19/32", "0/1", "1/1", "-3/7"] {
            assert_eq!(format_rational(&parse_rational(s).unwrap()), s);
        }
        assert_eq!(format_rational(&parse_rational("2/4").unwrap()), "1/2");
        assert!(parse_rational("0.5").is_err());
        assert_eq!(parse_rational("1/0"), Err(Error::ZeroDenominator));
    }

    #[test]
    fn nearest_f64_conversion() {
        assert_eq!(rational_to_f64(&rat(19, 32)), 0.59375);
        assert_eq!(rational_to_f64(&rat(1, 3)), 1.0 / 3.0);
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..20, 1i64..12).prop_map(|(n, d)| Rational::from((n, d)))
    }

    proptest! {
        #[test]
        fn convolution_is_symmetric(
            r in proptest::collection::vec(small_rational(), 1..8),
            t in proptest::collection::vec(small_rational(), 1..8),
            qn in 0i64..=6,
        ) {
            let len = r.len().min(t.len());
            let q = Rational::from((qn, 6));
            let r = CoefficientSeq::new(r);
            let t = CoefficientSeq::new(t);
            for n in 0..len {
                prop_assert_eq!(sg_convolve(&r, &t, &q, n)?, sg_convolve(&t, &r, &q, n)?);
            }
        }

        #[test]
        fn rational_format_parses_back(n in any::<i64>(), d in 1i64..i64::MAX) {
            let r = Rational::from((n, d));
            prop_assert_eq!(parse_rational(&format_rational(&r))?, r);
        }
    }
}
