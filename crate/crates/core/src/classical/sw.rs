//! Truncated polynomial rings on characteristic classes, with the Wu-formula
//! Steenrod action on Stiefel-Whitney monomials.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::f2linalg::{binom_mod2, BitVector};

/// A monomial in generators `x_i` (`i >= 1`), stored as the sorted list of
/// indices with repetition: `w2^3 w5` is `[2, 2, 2, 5]`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_indices<I: IntoIterator<Item = u16>>(indices: I) -> Self {
        let mut v: Vec<u16> = indices.into_iter().filter(|&i| i > 0).collect();
        v.sort_unstable();
        Monomial(v)
    }

    pub fn indices(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&i| i as u32).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        Monomial(v)
    }

    /// `(index, multiplicity)` pairs in ascending index order.
    pub fn multiplicities(&self) -> Vec<(u16, u32)> {
        let mut out: Vec<(u16, u32)> = Vec::new();
        for &i in &self.0 {
            match out.last_mut() {
                Some((j, m)) if *j == i => *m += 1,
                _ => out.push((i, 1)),
            }
        }
        out
    }

    /// Renders with the given generator name: `w[2]^3*w[5]`, `1` for the unit.
    pub fn render(&self, var: &str) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        self.multiplicities()
            .iter()
            .map(|&(i, m)| {
                if m == 1 {
                    format!("{var}[{i}]")
                } else {
                    format!("{var}[{i}]^{m}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Parses the output of [`render`](Self::render).
    pub fn parse(s: &str, var: &str) -> Option<Monomial> {
        let s = s.trim();
        if s == "1" {
            return Some(Monomial::one());
        }
        let mut v = Vec::new();
        for factor in s.split('*') {
            let rest = factor.strip_prefix(var)?.strip_prefix('[')?;
            let (idx, tail) = rest.split_once(']')?;
            let i: u16 = idx.parse().ok()?;
            if i == 0 {
                return None;
            }
            let m: u32 = if tail.is_empty() {
                1
            } else {
                tail.strip_prefix('^')?.parse().ok()?
            };
            v.extend(std::iter::repeat_n(i, m as usize));
        }
        Some(Monomial::from_indices(v))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("w"))
    }
}

/// Partitions of `n` with parts in `[min_part, max_part]`, each as an ascending
/// index list, in ascending lexicographic order.
pub fn partitions(n: u32, min_part: u16, max_part: u16) -> Vec<Monomial> {
    fn rec(rest: u32, min: u16, max: u16, cur: &mut Vec<u16>, out: &mut Vec<Monomial>) {
        if rest == 0 {
            out.push(Monomial(cur.clone()));
            return;
        }
        for p in min..=max {
            if p as u32 > rest {
                break;
            }
            cur.push(p);
            rec(rest - p as u32, p, max, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, min_part.max(1), max_part, &mut Vec::new(), &mut out);
    out
}

/// Homogeneous element of the ring: a degree and coordinates in the monomial
/// basis of that degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub degree: u32,
    pub coords: BitVector,
}

/// `H*(BO)` (or `H*(BSO)` when `oriented`) truncated above `max_deg`.
#[derive(Debug)]
pub struct SwRing {
    pub max_deg: u32,
    pub oriented: bool,
    basis: Vec<Vec<Monomial>>,
    index: Vec<HashMap<Monomial, usize>>,
    // Sq^k of a basis monomial, keyed by (k, degree, index).
    sq_cache: RwLock<HashMap<(u32, u32, usize), Arc<BitVector>>>,
    dual: Vec<Poly>,
}

impl SwRing {
    pub fn new(max_deg: u32, oriented: bool) -> SwRing {
        let min_part = if oriented { 2 } else { 1 };
        let basis: Vec<Vec<Monomial>> = (0..=max_deg)
            .map(|d| partitions(d, min_part, d.max(1) as u16))
            .collect();
        let index = basis
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect())
            .collect();
        let mut ring = SwRing {
            max_deg,
            oriented,
            basis,
            index,
            sq_cache: RwLock::new(HashMap::new()),
            dual: Vec::new(),
        };
        ring.dual = ring.compute_dual();
        ring
    }

    pub fn dim(&self, d: u32) -> usize {
        self.basis.get(d as usize).map_or(0, Vec::len)
    }

    pub fn basis(&self, d: u32) -> &[Monomial] {
        self.basis.get(d as usize).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m.degree() as usize)?.get(m).copied()
    }

    pub fn zero(&self, d: u32) -> Poly {
        Poly {
            degree: d,
            coords: BitVector::zeros(self.dim(d)),
        }
    }

    pub fn one(&self) -> Poly {
        self.monomial(&Monomial::one())
    }

    /// The monomial as a ring element; zero if it involves `w1` in the
    /// oriented ring or exceeds the truncation.
    pub fn monomial(&self, m: &Monomial) -> Poly {
        let d = m.degree();
        let mut p = self.zero(d);
        if let Some(i) = self.index_of(m) {
            p.coords.set(i, true);
        }
        p
    }

    /// The generator `w_i` (`w_0 = 1`).
    pub fn w(&self, i: u32) -> Poly {
        if i == 0 {
            self.one()
        } else {
            self.monomial(&Monomial::from_indices([i as u16]))
        }
    }

    pub fn monomials_of(&self, p: &Poly) -> Vec<&Monomial> {
        let b = self.basis(p.degree);
        p.coords.support().map(|i| &b[i]).collect()
    }

    pub fn add(&self, a: &Poly, b: &Poly) -> Poly {
        assert_eq!(a.degree, b.degree);
        let mut c = a.clone();
        c.coords.xor_assign(&b.coords);
        c
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        let d = a.degree + b.degree;
        let mut out = self.zero(d);
        if d > self.max_deg {
            return out;
        }
        let ba = self.basis(a.degree);
        let bb = self.basis(b.degree);
        for i in a.coords.support() {
            for j in b.coords.support() {
                if let Some(k) = self.index_of(&ba[i].times(&bb[j])) {
                    out.coords.flip(k);
                }
            }
        }
        out
    }

    /// The dual class `wbar_i`: `wbar_0 = 1`, `sum_{j} w_j wbar_{i-j} = 0`.
    pub fn wbar(&self, i: u32) -> &Poly {
        &self.dual[i as usize]
    }

    fn compute_dual(&self) -> Vec<Poly> {
        let mut out: Vec<Poly> = vec![self.one()];
        for i in 1..=self.max_deg {
            let mut acc = self.zero(i);
            for j in 1..=i {
                acc = self.add(&acc, &self.mul(&self.w(j), &out[(i - j) as usize]));
            }
            out.push(acc);
        }
        out
    }

    /// `Sq^k(w_m)` by the Wu formula; zero for `k > m`.
    pub fn sq_generator(&self, k: u32, m: u32) -> Poly {
        let mut out = self.zero(m + k);
        if k > m || m + k > self.max_deg {
            return out;
        }
        for l in 0..=k {
            if binom_mod2(m as i64 - k as i64 + l as i64 - 1, l as i64) {
                out = self.add(&out, &self.mul(&self.w(k - l), &self.w(m + l)));
            }
        }
        out
    }

    /// `Sq^k` of the `idx`-th basis monomial of degree `d`, via Cartan.
    pub fn sq_basis(&self, k: u32, d: u32, idx: usize) -> Arc<BitVector> {
        if let Some(v) = self.sq_cache.read().expect("cache lock").get(&(k, d, idx)) {
            return v.clone();
        }
        let target = d + k;
        let v = if target > self.max_deg {
            BitVector::zeros(0)
        } else if k == 0 {
            BitVector::unit(self.dim(d), idx)
        } else if d == 0 {
            BitVector::zeros(self.dim(target))
        } else {
            let m = &self.basis[d as usize][idx];
            let (first, rest) = m.0.split_first().expect("nonempty monomial");
            let first = *first as u32;
            let rest = Monomial(rest.to_vec());
            let rest_deg = rest.degree();
            let rest_idx = self.index[rest_deg as usize][&rest];
            let mut acc = BitVector::zeros(self.dim(target));
            for a in 0..=k.min(first) {
                let b = k - a;
                if rest_deg + b > self.max_deg || (rest.is_one() && b > 0) {
                    continue;
                }
                let left = self.sq_generator(a, first);
                if left.coords.is_zero() {
                    continue;
                }
                let right = Poly {
                    degree: rest_deg + b,
                    coords: (*self.sq_basis(b, rest_deg, rest_idx)).clone(),
                };
                acc.xor_assign(&self.mul(&left, &right).coords);
            }
            acc
        };
        let v = Arc::new(v);
        self.sq_cache
            .write()
            .expect("cache lock")
            .insert((k, d, idx), v.clone());
        v
    }

    /// `Sq^k` of an arbitrary homogeneous element.
    pub fn sq(&self, k: u32, p: &Poly) -> Poly {
        let mut out = self.zero(p.degree + k);
        if p.degree + k > self.max_deg {
            return out;
        }
        for i in p.coords.support() {
            out.coords.xor_assign(&self.sq_basis(k, p.degree, i));
        }
        out
    }

    /// Parses a sum of monomial labels (`"w[1]*w[2] + w[3]"`, `"0"`) of the
    /// given degree.
    pub fn parse_poly(&self, degree: u32, s: &str) -> Option<Poly> {
        let mut p = self.zero(degree);
        if s.trim() == "0" {
            return Some(p);
        }
        for term in s.split('+') {
            let m = Monomial::parse(term, "w")?;
            if m.degree() != degree {
                return None;
            }
            let i = self.index_of(&m)?;
            p.coords.flip(i);
        }
        Some(p)
    }

    pub fn render(&self, p: &Poly) -> String {
        let parts: Vec<String> = self.monomials_of(p).iter().map(|m| m.render("w")).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=10).map(|n| partitions(n, 1, n.max(1) as u16).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42]);
    }

    #[test]
    fn labels_round_trip() {
        let m = Monomial::from_indices([5, 2, 2, 2]);
        assert_eq!(m.render("w"), "w[2]^3*w[5]");
        assert_eq!(Monomial::parse("w[2]^3*w[5]", "w"), Some(m));
        assert_eq!(Monomial::parse("1", "w"), Some(Monomial::one()));
        assert_eq!(Monomial::parse("w[0]", "w"), None);
    }

    #[test]
    fn dual_classes() {
        let r = SwRing::new(6, false);
        assert_eq!(r.render(r.wbar(1)), "w[1]");
        assert_eq!(r.render(r.wbar(2)), "w[1]^2 + w[2]");
        assert_eq!(r.render(r.wbar(3)), "w[1]^3 + w[3]");
        for i in 1..=6 {
            let mut acc = r.zero(i);
            for j in 0..=i {
                acc = r.add(&acc, &r.mul(&r.w(j), r.wbar(i - j)));
            }
            assert!(acc.coords.is_zero(), "i = {i}");
        }
    }

    #[test]
    fn wu_formula_examples() {
        let r = SwRing::new(8, false);
        assert_eq!(r.render(&r.sq_generator(1, 2)), "w[1]*w[2] + w[3]");
        assert_eq!(r.render(&r.sq_generator(2, 2)), "w[2]^2");
        assert_eq!(r.render(&r.sq_generator(1, 1)), "w[1]^2");
        assert!(r.sq_generator(3, 2).coords.is_zero());
        let w1 = r.w(1);
        assert_eq!(r.render(&r.sq(1, &r.mul(&w1, &w1))), "0");
    }

    #[test]
    fn oriented_ring_drops_w1() {
        let r = SwRing::new(8, true);
        assert_eq!(r.dim(1), 0);
        assert_eq!(r.dim(4), 2);
        assert_eq!(r.render(&r.sq_generator(1, 2)), "w[3]");
        assert_eq!(r.render(r.wbar(2)), "w[2]");
    }
}
