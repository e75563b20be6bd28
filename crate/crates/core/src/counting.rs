//! Exact counts of labeled graphs by vertices, edges and components, and the
//! exhaustive enumeration oracle for tiny `n`.
//!
//! Connected-graph counts come from the logarithm of the exponential
//! generating function `A(x,y) = Σ_m (1+y)^{C(m,2)} x^m/m!`. Writing
//! `A_m(y)` and `B_m(y)` for the edge polynomials of all and of connected
//! graphs on `m` vertices, `A' = A B'` becomes
//!
//! ```text
//! B_m = A_m - Σ_{k=1}^{m-1} C(m-1,k-1) B_k A_{m-k}
//! ```
//!
//! and the graphs with exactly `s` components (the coefficients of `B^s/s!`)
//! follow by rooting the component that contains the first vertex:
//! `S^{(s)}_m = Σ_k C(m-1,k-1) B_k S^{(s-1)}_{m-k}`.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::dsu::DisjointSet;
use crate::exact::{binomial, pairs, ExactProb, GraphParams};
use crate::probability::ComponentPMF;
use crate::{Error, Result};

/// Practical cap for [`component_counts`]; counts grow like `2^{C(n,2)}`.
pub const COUNT_N_LIMIT: u32 = 30;

/// Default and hard caps for [`brute_force_oracle`].
pub const ORACLE_DEFAULT_MAX_N: u32 = 6;
pub const ORACLE_HARD_MAX_N: u32 = 8;

/// Dense polynomial with big-integer coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(Vec<Integer>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: impl Into<Integer>) -> Self {
        Poly(vec![c.into()]).trimmed()
    }

    /// `(c0 + c1 y)^e`, expanded by the binomial theorem.
    pub fn binomial_power(c0: i64, c1: i64, e: u64) -> Self {
        let coeffs = (0..=e)
            .map(|k| {
                let mut c = binomial(e, k);
                c *= Integer::from(c1).pow(k as u32);
                c *= Integer::from(c0).pow((e - k) as u32);
                c
            })
            .collect();
        Poly(coeffs).trimmed()
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.0
    }

    /// Coefficient of `y^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Integer {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Integer::new(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    /// `self += factor * other`.
    pub fn add_scaled(&mut self, factor: &Integer, other: &Poly) {
        if self.0.len() < other.0.len() {
            self.0.resize(other.0.len(), Integer::new());
        }
        for (dst, src) in self.0.iter_mut().zip(&other.0) {
            *dst += factor * src;
        }
        self.trim();
    }

    /// Evaluates at an exact rational point.
    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.0.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    fn trim(&mut self) {
        while self.0.last().is_some_and(|c| *c == 0) {
            self.0.pop();
        }
    }

    fn trimmed(mut self) -> Self {
        self.trim();
        self
    }
}

/// `A_{n,k}`, `B_{n,k}`, `A_{n,k,s}` and `F_{s,n}` for one vertex count `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub n: u32,
    /// `A_{n,k}` for `k = 0..=C(n,2)`.
    pub edge_counts: Vec<Integer>,
    /// `B_{n,k}` for `k = 0..=C(n,2)`.
    pub connected_counts: Vec<Integer>,
    /// `component_counts[s][k] = A_{n,k,s}` for `s = 0..=n`.
    pub component_counts: Vec<Vec<Integer>>,
    /// `F_{s,n}` for `s = 0..=n`.
    pub forest_counts: Vec<Integer>,
}

impl CountTable {
    pub fn edge_slots(&self) -> u64 {
        pairs(self.n as u64)
    }

    fn from_polys(n: u32, all: &Poly, by_components: &[Poly]) -> Self {
        let slots = pairs(n as u64) as usize;
        let dense = |p: &Poly| (0..=slots).map(|k| p.coeff(k)).collect::<Vec<_>>();
        let component_counts: Vec<Vec<Integer>> = by_components.iter().map(dense).collect();
        let forest_counts = (0..=n as usize)
            .map(|s| if s == 0 { Integer::from((n == 0) as u32) } else { component_counts[s][n as usize - s].clone() })
            .collect();
        CountTable {
            n,
            edge_counts: dense(all),
            connected_counts: component_counts.get(1).cloned().unwrap_or_else(|| vec![Integer::new(); slots + 1]),
            component_counts,
            forest_counts,
        }
    }
}

/// `A_{n,k} = C(n(n-1)/2, k)`, zero when `k` exceeds the number of slots.
pub fn edge_count(n: u64, k: u64) -> Integer {
    binomial(pairs(n), k)
}

/// Edge polynomials `B_m(y)` of connected graphs for `m = 0..=n` (`B_0 = 0`).
pub fn connected_polys(n: u32) -> Vec<Poly> {
    let all: Vec<Poly> = (0..=n as u64).map(|m| Poly::binomial_power(1, 1, pairs(m))).collect();
    let mut conn: Vec<Poly> = vec![Poly::zero()];
    for m in 1..=n as usize {
        let mut b = all[m].clone();
        for k in 1..m {
            let c = -binomial(m as u64 - 1, k as u64 - 1);
            b.add_scaled(&c, &conn[k].mul(&all[m - k]));
        }
        conn.push(b);
    }
    conn
}

/// Count tables for `n` vertices from the log-EGF recursion.
pub fn component_counts(n: u32) -> Result<CountTable> {
    if n > COUNT_N_LIMIT {
        return Err(Error::ResourceLimit { what: "graph counting n", n: n as u64, limit: COUNT_N_LIMIT as u64 });
    }
    let conn = connected_polys(n);
    let n = n as usize;
    // layer[m] = S^{(s)}_m for the current s; S^{(0)} is 1 at m = 0 only
    let mut layer: Vec<Poly> = (0..=n).map(|m| Poly::constant((m == 0) as u32)).collect();
    let mut by_components = vec![layer[n].clone()];
    for _ in 1..=n {
        let mut next = vec![Poly::zero(); n + 1];
        for (m, slot) in next.iter_mut().enumerate().skip(1) {
            for k in 1..=m {
                if layer[m - k].is_zero() {
                    continue;
                }
                let c = binomial(m as u64 - 1, k as u64 - 1);
                slot.add_scaled(&c, &conn[k].mul(&layer[m - k]));
            }
        }
        layer = next;
        by_components.push(layer[n].clone());
    }
    let all = Poly::binomial_power(1, 1, pairs(n as u64));
    Ok(CountTable::from_polys(n as u32, &all, &by_components))
}

/// Exact reference values obtained by enumerating every graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub pmf: ComponentPMF,
    pub connected: ExactProb,
    pub isolated: ExactProb,
    /// `counts[s][k]`: graphs with `s` components and `k` edges.
    pub counts: Vec<Vec<u64>>,
}

/// Component count and isolated-vertex flag of the graph with edge set `mask`
/// over the slots `(i,j)`, `i < j`, in lexicographic order.
fn classify(n: usize, mask: u64, dsu: &mut DisjointSet, degree: &mut [u32]) -> (u32, bool) {
    dsu.reset();
    degree.fill(0);
    let mut slot = 0;
    for i in 0..n {
        for j in i + 1..n {
            if mask >> slot & 1 == 1 {
                dsu.union(i as u32, j as u32);
                degree[i] += 1;
                degree[j] += 1;
            }
            slot += 1;
        }
    }
    (dsu.sets(), degree.contains(&0))
}

/// Enumerates all `2^{C(n,2)}` graphs and sums `p^{E(g)} q^{C(n,2)-E(g)}`
/// into component, connectivity and isolation buckets.
pub fn brute_force_oracle(params: &GraphParams, max_n: u32) -> Result<OracleResult> {
    let n = params.n();
    if n == 0 {
        return Err(Error::invalid("the oracle needs n >= 1"));
    }
    let cap = max_n.min(ORACLE_HARD_MAX_N);
    if n > cap {
        return Err(Error::ResourceLimit { what: "brute-force enumeration n", n: n as u64, limit: cap as u64 });
    }
    let nu = n as usize;
    let slots = pairs(n as u64) as usize;
    let mut counts = vec![vec![0u64; slots + 1]; nu + 1];
    let mut isolated_counts = vec![0u64; slots + 1];
    let mut dsu = DisjointSet::new(nu);
    let mut degree = vec![0u32; nu];
    for mask in 0..1u64 << slots {
        let (components, has_isolated) = classify(nu, mask, &mut dsu, &mut degree);
        let edges = mask.count_ones() as usize;
        counts[components as usize][edges] += 1;
        if has_isolated {
            isolated_counts[edges] += 1;
        }
    }

    let weight: Vec<Rational> = (0..=slots)
        .map(|k| Rational::from(params.p().pow(k as u32)) * Rational::from(params.q().pow((slots - k) as u32)))
        .collect();
    let bucket = |row: &[u64]| -> Rational { row.iter().zip(&weight).map(|(c, w)| Rational::from(w * *c)).sum() };

    let probs: Vec<ExactProb> = counts.iter().map(|row| ExactProb::from_trusted(bucket(row))).collect();
    let connected = probs[1].clone();
    let isolated = ExactProb::from_trusted(bucket(&isolated_counts));
    Ok(OracleResult {
        pmf: ComponentPMF::from_parts(params.clone(), probs),
        connected,
        isolated,
        counts,
    })
}

/// Low-order structure of `P{ν_n = s}` viewed as a polynomial in `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowOrderReport {
    pub n: u32,
    pub s: u32,
    /// The full polynomial, lowest degree first.
    pub poly: Poly,
    /// Coefficient of `p^{n-s}`.
    pub leading: Integer,
    /// `F_{s,n}` from the counting tables.
    pub forests: Integer,
    /// All coefficients below `p^{n-s}` vanish.
    pub lower_vanish: bool,
}

impl LowOrderReport {
    pub fn passed(&self) -> bool {
        self.lower_vanish && self.leading == self.forests
    }
}

pub const LOW_ORDER_N_LIMIT: u32 = 8;

/// `P{ν_m = j}` as integer polynomials in `p` for all `m ≤ n`, `j ≤ m`,
/// running the probability recursions over `Z[p]` with `q = 1 - p`.
pub fn component_polys_in_p(n: u32) -> Vec<Vec<Poly>> {
    let n = n as usize;
    let q_pow = |e: usize| Poly::binomial_power(1, -1, e as u64);
    let mut conn = vec![Poly::zero(), Poly::constant(1)];
    for m in 2..=n {
        let mut pm = Poly::constant(1);
        for k in 1..m {
            let c = -binomial(m as u64 - 1, k as u64);
            pm.add_scaled(&c, &q_pow(k * (m - k)).mul(&conn[m - k]));
        }
        conn.push(pm);
    }
    let mut rows: Vec<Vec<Poly>> = vec![vec![Poly::constant(1)]];
    for m in 1..=n {
        let mut row = vec![Poly::zero(); m + 1];
        row[1] = conn[m].clone();
        for j in 2..=m {
            let mut acc = Poly::zero();
            for k in j - 1..m {
                let c = binomial(m as u64 - 1, k as u64);
                acc.add_scaled(&c, &rows[k][j - 1].mul(&conn[m - k]).mul(&q_pow(k * (m - k))));
            }
            row[j] = acc;
        }
        rows.push(row);
    }
    rows
}

/// Checks that `P{ν_n = s} = F_{s,n} p^{n-s} + O(p^{n-s+1})`.
pub fn low_order_coefficient_check(n: u32, s: u32) -> Result<LowOrderReport> {
    if n > LOW_ORDER_N_LIMIT {
        return Err(Error::ResourceLimit { what: "low-order coefficient check n", n: n as u64, limit: LOW_ORDER_N_LIMIT as u64 });
    }
    if s == 0 || s > n {
        return Err(Error::invalid(format!("need 1 <= s <= n, got s = {s}, n = {n}")));
    }
    let poly = component_polys_in_p(n).swap_remove(n as usize).swap_remove(s as usize);
    let order = (n - s) as usize;
    let lower_vanish = (0..order).all(|k| poly.coeff(k) == 0);
    let forests = component_counts(n)?.forest_counts[s as usize].clone();
    Ok(LowOrderReport { n, s, leading: poly.coeff(order), poly, forests, lower_vanish })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::make_params;

    fn total(v: &[Integer]) -> Integer {
        v.iter().sum()
    }

    #[test]
    fn edge_counts() {
        assert_eq!(edge_count(4, 3), 20);
        assert_eq!(edge_count(3, 4), 0);
        assert_eq!(edge_count(0, 0), 1);
    }

    #[test]
    fn three_vertex_table() {
        let t = component_counts(3).unwrap();
        assert_eq!(t.connected_counts[2], 3);
        assert_eq!(t.connected_counts[3], 1);
        assert_eq!(t.component_counts[2][1], 3);
        assert_eq!(t.forest_counts[2], 3);
        assert_eq!(t.forest_counts[3], 1);
    }

    #[test]
    fn connected_totals() {
        assert_eq!(total(&component_counts(4).unwrap().connected_counts), 38);
        let one = component_counts(1).unwrap();
        assert_eq!(one.connected_counts, vec![Integer::from(1)]);
        let zero = component_counts(0).unwrap();
        assert_eq!(zero.component_counts[0][0], 1);
    }

    #[test]
    fn counting_cap() {
        assert!(matches!(component_counts(31), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn oracle_three_vertices() {
        let r = brute_force_oracle(&make_params(3, 1, 2).unwrap(), 6).unwrap();
        let got: Vec<String> = r.pmf.probs().iter().map(|p| p.to_string()).collect();
        assert_eq!(got, ["0/1", "1/2", "3/8", "1/8"]);
        assert_eq!(r.connected.to_string(), "1/2");
        assert_eq!(r.isolated.to_string(), "1/2");
    }

    #[test]
    fn oracle_edge_cases() {
        let r = brute_force_oracle(&make_params(2, 1, 3).unwrap(), 6).unwrap();
        assert_eq!(r.connected.to_string(), "1/3");
        assert_eq!(r.isolated.to_string(), "2/3");
        let r = brute_force_oracle(&make_params(1, 1, 3).unwrap(), 6).unwrap();
        assert_eq!(r.pmf.prob(1).to_string(), "1/1");
        assert!(matches!(brute_force_oracle(&make_params(7, 1, 2).unwrap(), 6), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn low_order_examples() {
        let r = low_order_coefficient_check(4, 1).unwrap();
        assert!(r.passed());
        assert_eq!(r.leading, 16);
        let r = low_order_coefficient_check(3, 2).unwrap();
        assert_eq!(r.leading, 3);
        assert!(r.passed());
        let r = low_order_coefficient_check(2, 2).unwrap();
        assert_eq!(r.leading, 1);
        assert_eq!(r.forests, 1);
        assert!(low_order_coefficient_check(9, 1).is_err());
        assert!(low_order_coefficient_check(4, 0).is_err());
    }

    #[test]
    fn poly_basics() {
        let p = Poly::binomial_power(1, 1, 3);
        assert_eq!(p.coeffs(), &[1, 3, 3, 1].map(Integer::from));
        let q = Poly::binomial_power(1, -1, 2);
        assert_eq!(p.mul(&q).eval(&Rational::from(2)), Rational::from(27));
        assert!(Poly::constant(0).is_zero());
    }
}
