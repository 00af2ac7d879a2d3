//! Truncated power series in `Z/2[v_1, v_1^{-1}][[v_2, v_3, ...]]`.
//!
//! A series keeps the monomials `v_1^a v_2^{j_2} v_3^{j_3} ...` whose order
//! `j_2 + j_3 + ...` is at most the truncation order; arithmetic drops
//! everything above it.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

/// `v_1^{v1} v_2^{rest[0]} v_3^{rest[1]} ...`, trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct LaurentMonomial {
    pub v1: i32,
    pub rest: Vec<u32>,
}

impl LaurentMonomial {
    pub fn new(v1: i32, mut rest: Vec<u32>) -> Self {
        while rest.last() == Some(&0) {
            rest.pop();
        }
        LaurentMonomial { v1, rest }
    }

    pub fn order(&self) -> u32 {
        self.rest.iter().sum()
    }

    pub fn degree(&self) -> i64 {
        self.v1 as i64
            + self
                .rest
                .iter()
                .enumerate()
                .map(|(k, &m)| (k as i64 + 2) * m as i64)
                .sum::<i64>()
    }

    fn times(&self, other: &LaurentMonomial) -> LaurentMonomial {
        let n = self.rest.len().max(other.rest.len());
        let rest = (0..n)
            .map(|k| self.rest.get(k).copied().unwrap_or(0) + other.rest.get(k).copied().unwrap_or(0))
            .collect();
        LaurentMonomial::new(self.v1 + other.v1, rest)
    }
}

impl fmt::Display for LaurentMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.v1 {
            0 => {}
            1 => parts.push("v[1]".to_string()),
            a => parts.push(format!("v[1]^{a}")),
        }
        for (k, &m) in self.rest.iter().enumerate() {
            match m {
                0 => {}
                1 => parts.push(format!("v[{}]", k + 2)),
                m => parts.push(format!("v[{}]^{m}", k + 2)),
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruncatedSeries {
    pub order: u32,
    terms: BTreeSet<LaurentMonomial>,
}

impl TruncatedSeries {
    pub fn zero(order: u32) -> Self {
        TruncatedSeries {
            order,
            terms: BTreeSet::new(),
        }
    }

    pub fn one(order: u32) -> Self {
        Self::monomial(order, LaurentMonomial::new(0, vec![]))
    }

    pub fn monomial(order: u32, m: LaurentMonomial) -> Self {
        let mut s = Self::zero(order);
        s.toggle(m);
        s
    }

    /// `v_i`, or `v_1^a` through [`v1_pow`](Self::v1_pow).
    pub fn v(order: u32, i: u32) -> Self {
        assert!(i >= 1);
        if i == 1 {
            return Self::v1_pow(order, 1);
        }
        let mut rest = vec![0; i as usize - 1];
        rest[i as usize - 2] = 1;
        Self::monomial(order, LaurentMonomial::new(0, rest))
    }

    pub fn v1_pow(order: u32, a: i32) -> Self {
        Self::monomial(order, LaurentMonomial::new(a, vec![]))
    }

    /// `xi_2 = v_1^2 + v_2`.
    pub fn xi2(order: u32) -> Self {
        Self::v1_pow(order, 2).add(&Self::v(order, 2))
    }

    fn toggle(&mut self, m: LaurentMonomial) {
        if m.order() > self.order {
            return;
        }
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = &LaurentMonomial> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let mut out = self.clone();
        out.order = self.order.min(other.order);
        out.terms.retain(|m| m.order() <= out.order);
        for m in &other.terms {
            out.toggle(m.clone());
        }
        out
    }

    pub fn mul(&self, other: &TruncatedSeries) -> TruncatedSeries {
        let mut out = Self::zero(self.order.min(other.order));
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.times(b));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> TruncatedSeries {
        (0..e).fold(Self::one(self.order), |acc, _| acc.mul(self))
    }

    /// Raises the truncation order without adding terms.
    pub fn with_order(&self, order: u32) -> TruncatedSeries {
        let mut out = self.clone();
        out.order = order;
        out.terms.retain(|m| m.order() <= order);
        out
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Lowest order first, then descending powers of v_1.
        let mut terms: Vec<&LaurentMonomial> = self.terms.iter().collect();
        terms.sort_by(|a, b| a.order().cmp(&b.order()).then(b.v1.cmp(&a.v1)).then(a.rest.cmp(&b.rest)));
        let parts: Vec<String> = terms.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The displayed inverse of `xi_2`: `sum_{k <= n} v_1^{-2-2k} v_2^k`.
pub fn xi2_inverse(n: u32) -> TruncatedSeries {
    let mut s = TruncatedSeries::zero(n);
    for k in 0..=n {
        s.toggle(LaurentMonomial::new(-2 - 2 * k as i32, vec![k]));
    }
    s
}

/// The displayed inverse of `v_1`: `v_1 xi_2^{-1} sum_{k <= n} v_2^k xi_2^{-k}`.
pub fn v1_inverse(n: u32) -> TruncatedSeries {
    let xinv = xi2_inverse(n);
    let ratio = TruncatedSeries::v(n, 2).mul(&xinv);
    let mut geometric = TruncatedSeries::zero(n);
    for k in 0..=n {
        geometric = geometric.add(&ratio.pow(k));
    }
    TruncatedSeries::v1_pow(n, 1).mul(&xinv).mul(&geometric)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesReport {
    pub order: u32,
    /// `xi_2^{-1} * xi_2` at the truncation order.
    pub xi2_product: String,
    /// `v_1^{-1} * v_1` at the truncation order.
    pub v1_product: String,
    /// The expanded `v_1^{-1}` series, which must collapse to the monomial.
    pub v1_inverse: String,
    /// The order-`n` partial sum of `xi_2^{-1}` times `xi_2`, kept one order
    /// higher: `1` plus the first dropped monomial.
    pub xi2_tail: String,
    pub pass: bool,
}

/// Checks both inverse series to v_2-order `n`: each product with its
/// inverse is `1` after truncation, the `v_1^{-1}` expansion equals
/// `v_1^{-1}`, and one order higher the `xi_2` defect is the single monomial
/// `v_1^{-2n-2} v_2^{n+1}`.
pub fn series_identities(n: u32) -> SeriesReport {
    let one = TruncatedSeries::one(n);
    let xi2_product = xi2_inverse(n).mul(&TruncatedSeries::xi2(n));
    let v1_inv = v1_inverse(n);
    let v1_product = v1_inv.mul(&TruncatedSeries::v1_pow(n, 1));
    let up = n + 1;
    let xi2_tail = xi2_inverse(n).with_order(up).mul(&TruncatedSeries::xi2(up));
    let defect = TruncatedSeries::one(up).add(&TruncatedSeries::monomial(
        up,
        LaurentMonomial::new(-2 * n as i32 - 2, vec![up]),
    ));
    let pass = xi2_product == one
        && v1_product == one
        && v1_inv == TruncatedSeries::v1_pow(n, -1)
        && xi2_tail == defect;
    SeriesReport {
        order: n,
        xi2_product: xi2_product.to_string(),
        v1_product: v1_product.to_string(),
        v1_inverse: v1_inv.to_string(),
        xi2_tail: xi2_tail.to_string(),
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn displayed_example() {
        let s = xi2_inverse(2).with_order(3);
        let p = s.mul(&TruncatedSeries::xi2(3));
        assert_eq!(p.to_string(), "1 + v[1]^-6*v[2]^3");
    }

    #[test]
    fn xi2_is_v1_squared_plus_v2() {
        assert_eq!(TruncatedSeries::xi2(3).to_string(), "v[1]^2 + v[2]");
    }

    #[test]
    fn identities_hold() {
        for n in 1..=5 {
            let r = series_identities(n);
            assert!(r.pass, "{r:?}");
        }
        let r = series_identities(3);
        assert_eq!(r.xi2_product, "1");
        assert_eq!(r.v1_product, "1");
    }

    #[test]
    fn v1_times_inverse_is_one() {
        let p = TruncatedSeries::v1_pow(3, 1).mul(&TruncatedSeries::v1_pow(3, -1));
        assert_eq!(p, TruncatedSeries::one(3));
    }
}
