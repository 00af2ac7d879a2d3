//! Exhaustive checks of the evaluation pairing between `H_*(BO)` and
//! Stiefel-Whitney monomials, and of its extension to the classes `wt[l]`.

use serde::Serialize;

use super::homology::{
    build_h_bo_homology, mu_tilde, mu_tilde_slant, mu_tilde_with, pairing, v_basis, RMonomial, VMonomial,
};
use super::sw::{partitions, Monomial, SwRing};
use super::thom_sq;
use crate::f2linalg::{BitMatrix, BitVector};

const MAX_REPORTED: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingCheck {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl PairingCheck {
    fn new(name: &'static str) -> Self {
        PairingCheck {
            name,
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok && self.failures.len() < MAX_REPORTED {
            self.failures.push(what());
        }
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

fn all_monomials(d: u32) -> Vec<Monomial> {
    if d == 0 {
        vec![Monomial::one()]
    } else {
        partitions(d, 1, d as u16)
    }
}

fn ws(m: &Monomial) -> Vec<u32> {
    m.indices().iter().map(|&i| i as u32).collect()
}

fn pow(x: &VMonomial, e: u32) -> VMonomial {
    (0..e).fold(VMonomial::one(), |acc, _| acc.times(x))
}

/// `<w_i, v_i> = 1` exactly for `i = 1`.
pub fn generator_values(max_deg: u32) -> PairingCheck {
    let mut c = PairingCheck::new("w_i on v_i");
    for i in 1..=max_deg {
        let got = pairing(&[i], &VMonomial::v(i));
        c.record(got == (i == 1), || format!("<w[{i}], v[{i}]> = {got}"));
    }
    c
}

/// `<w_n, v_j x> = 0` for `j >= 2`.
pub fn single_class_on_higher_v(max_deg: u32) -> PairingCheck {
    let mut c = PairingCheck::new("w_n on v_j x, j >= 2");
    for n in 2..=max_deg {
        for j in 2..=n {
            for x in v_basis(n - j) {
                let y = VMonomial::v(j).times(&x);
                let got = pairing(&[n], &y);
                c.record(!got, || format!("<w[{n}], {y}> = 1"));
            }
        }
    }
    c
}

/// A product of `n` classes vanishes on `v_j x` once `j > n`.
///
/// The sharp bound is `j > n`: for `n = 1`, `<w_1, v_1> = 1`.
pub fn short_words_on_long_v(max_deg: u32, max_len: usize) -> PairingCheck {
    let mut c = PairingCheck::new("n-fold products on v_j x, j > n");
    for d in 1..=max_deg {
        for a in all_monomials(d).into_iter().filter(|a| a.len() <= max_len) {
            let n = a.len() as u32;
            for j in (n + 1)..=d {
                for x in v_basis(d - j) {
                    let y = VMonomial::v(j).times(&x);
                    let got = pairing(&ws(&a), &y);
                    c.record(!got, || format!("<{a}, {y}> = 1"));
                }
            }
        }
    }
    c
}

/// Shifting the first index by `2^N` (resp. `k 2^N`) against `v_1^{2^N}`
/// (resp. `v_k^{2^N}`, `k >= 2`), for the two smallest `N` with `2^N`
/// above every other index.
pub fn power_shift(max_deg: u32, ks: &[u32]) -> PairingCheck {
    let mut c = PairingCheck::new("index shift against v_k^(2^N)");
    for d in 0..=max_deg {
        for rest in all_monomials(d).into_iter().filter(|m| m.len() <= 2) {
            let top = rest.indices().iter().copied().max().unwrap_or(0) as u32;
            let n0 = (0..).find(|&n| (1u32 << n) > top).expect("finite");
            for i1 in 0..=(max_deg - d) {
                for x in v_basis(i1 + d) {
                    let base = {
                        let mut w = vec![i1];
                        w.extend(ws(&rest));
                        pairing(&w, &x)
                    };
                    for n in [n0, n0 + 1] {
                        let s = 1u32 << n;
                        let mut w = vec![i1 + s];
                        w.extend(ws(&rest));
                        let y = pow(&VMonomial::v(1), s).times(&x);
                        let got = pairing(&w, &y);
                        c.record(got == base, || format!("w[{}]*{rest} on {y}", i1 + s));
                        for &k in ks {
                            let mut w = vec![i1 + k * s];
                            w.extend(ws(&rest));
                            let y = pow(&VMonomial::v(k), s).times(&x);
                            let got = pairing(&w, &y);
                            c.record(!got, || format!("w[{}]*{rest} on {y} = 1", i1 + k * s));
                        }
                    }
                }
            }
        }
    }
    c
}

/// The restricted pairing between `Z/2[v_1..v_n]` and products of at most
/// `n` classes is square and nondegenerate in every degree.
pub fn restricted_perfect_pairing(max_deg: u32, max_n: u32) -> PairingCheck {
    let mut c = PairingCheck::new("restricted pairing is perfect");
    for n in 1..=max_n {
        for d in 0..=max_deg {
            let vs: Vec<VMonomial> = v_basis(d)
                .into_iter()
                .filter(|v| v.multiplicities().len() <= n as usize)
                .collect();
            let wsn: Vec<Monomial> = all_monomials(d)
                .into_iter()
                .filter(|m| m.len() <= n as usize)
                .collect();
            if vs.len() != wsn.len() {
                c.record(false, || format!("n = {n}, degree {d}: {} x {}", wsn.len(), vs.len()));
                continue;
            }
            let rows: Vec<BitVector> = wsn
                .iter()
                .map(|a| BitVector::from_support(vs.len(), (0..vs.len()).filter(|&j| pairing(&ws(a), &vs[j]))))
                .collect();
            let rank = BitMatrix::from_rows(vs.len(), rows).rank();
            c.record(rank == vs.len(), || format!("n = {n}, degree {d}: rank {rank} of {}", vs.len()));
        }
    }
    c
}

/// Non-increasing sequences of length `len` with the given sum.
fn tails(len: usize, sum: u32, max: u32) -> Vec<Vec<u32>> {
    if len == 0 {
        return if sum == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=sum.min(max) {
        for mut t in tails(len - 1, sum - first, first) {
            t.insert(0, first);
            out.push(t);
        }
    }
    out
}

/// Exponent vectors `(j_2, .., j_n)` with weight `sum_k k j_k = weight`.
fn j_tails(n: u32, weight: u32) -> Vec<Vec<u32>> {
    fn rec(k: u32, n: u32, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k > n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for j in 0..=left / k {
            cur.push(j);
            rec(k + 1, n, left - k * j, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(2, n, weight, &mut Vec::new(), &mut out);
    out
}

/// `l_s` of a sequence `(i_1, .., i_n)`: `sum_{k >= s} i_k`.
fn l_of_i(i: &[i64], s: usize) -> i64 {
    i[s - 1..].iter().sum()
}

/// Brute-force triangularity of `wt_{i_1} w_{i_2} .. w_{i_n}` against
/// `v_1^{j_1} .. v_n^{j_n}`: the value is 1 when `alpha(J) = I` and 0 unless
/// `alpha(J) <= I`, for total degrees in `[deg_lo, deg_hi]` and tails of
/// degree at most `tail_max`.
pub fn triangularity(max_n: u32, deg_lo: i32, deg_hi: i32, tail_max: u32) -> PairingCheck {
    let mut c = PairingCheck::new("triangularity against alpha(J)");
    for n in 1..=max_n {
        for d in deg_lo..=deg_hi {
            let mut is: Vec<Vec<i64>> = Vec::new();
            for s in 0..=tail_max {
                for t in tails(n as usize - 1, s, s) {
                    let mut i = vec![d as i64 - s as i64];
                    i.extend(t.iter().map(|&x| x as i64));
                    is.push(i);
                }
            }
            // J up to a larger weight, so zeros beyond the order are exercised.
            let mut js: Vec<Vec<i64>> = Vec::new();
            for w in 0..=tail_max + 4 {
                for t in j_tails(n, w) {
                    let mut j = vec![d as i64 - w as i64];
                    j.extend(t.iter().map(|&x| x as i64));
                    js.push(j);
                }
            }
            for i in &is {
                let x = Monomial::from_indices(i[1..].iter().map(|&v| v as u16));
                for j in &js {
                    let alpha: Vec<i64> = (0..n as usize).map(|k| j[k..].iter().sum()).collect();
                    let below = (2..=n as usize).all(|s| l_of_i(&alpha, s) <= l_of_i(i, s));
                    let r = RMonomial {
                        xi2: 0,
                        v1: j[0] as i32,
                        rest: j[1..].iter().map(|&v| v as u32).collect(),
                    };
                    let got = mu_tilde_slant(&r, i[0] as i32, &x);
                    let ok = if alpha == *i { got } else { below || !got };
                    c.record(ok, || format!("I = {i:?}, J = {j:?}: {got}"));
                }
            }
        }
    }
    c
}

/// `<Sq^k a, x> = <a, Sq_*^k x>` for the Thom-twisted action on `H*(MTO)`.
pub fn adjunction(max_deg: u32) -> PairingCheck {
    let mut c = PairingCheck::new("adjunction with Sq_*");
    let ring = SwRing::new(max_deg, false);
    let h = build_h_bo_homology(max_deg);
    for t in 0..=max_deg {
        for k in 1..=(max_deg - t) {
            for (ai, a) in ring.basis(t).iter().enumerate() {
                let sa = thom_sq(&ring, true, k, t, ai);
                let images = ring.monomials_of(&sa);
                for x in h.basis(t + k) {
                    let lhs = images.iter().filter(|m| pairing(&ws(m), x)).count() % 2 == 1;
                    let rhs = h
                        .apply_lower(k, x)
                        .support()
                        .filter(|&j| pairing(&ws(a), &h.basis(t)[j]))
                        .count()
                        % 2
                        == 1;
                    c.record(lhs == rhs, || format!("Sq^{k} {a} against {x}"));
                }
            }
        }
    }
    c
}

/// The stabilized value of `mu~(xi_2^e v^J, wt[l] x)` is the same for
/// consecutive admissible `N`, and agrees with the closed slant form.
pub fn stabilization(l_lo: i32, l_hi: i32, xi_lo: i32, xi_hi: i32, coeff_max: u32) -> PairingCheck {
    let mut c = PairingCheck::new("stabilization in N");
    for l in l_lo..=l_hi {
        for e in xi_lo..=xi_hi {
            for cd in 0..=coeff_max {
                for x in all_monomials(cd) {
                    let deg = l + cd as i32 - 2 * e;
                    if deg < 0 {
                        continue;
                    }
                    let top = x.indices().iter().copied().max().unwrap_or(0) as u32;
                    for v in v_basis(deg as u32) {
                        let mut r = RMonomial::from_v(&v);
                        r.xi2 = e;
                        let n0 = (1..)
                            .find(|&n| {
                                let s = 1i64 << n;
                                s / 2 > top as i64 && s / 2 + e as i64 >= 0 && l as i64 + 2 * s >= 0
                            })
                            .expect("finite");
                        let a = mu_tilde_with(&r, l, &x, n0);
                        let b = mu_tilde_with(&r, l, &x, n0 + 1);
                        let slant = mu_tilde_slant(&r, l, &x);
                        let defined = mu_tilde(&r, l, &x).ok();
                        c.record(a == b && a == Some(slant) && defined == Some(slant), || {
                            format!("xi2^{e}*{v} on wt[{l}]*{x}: {a:?} / {b:?} / {slant}")
                        });
                    }
                }
            }
        }
    }
    c
}

/// Every pairing check on the standard ranges: classes of degree at most 10,
/// products of at most 3 classes.
pub fn pairing_suite() -> Vec<PairingCheck> {
    vec![
        generator_values(10),
        single_class_on_higher_v(10),
        short_words_on_long_v(10, 3),
        power_shift(6, &[2, 3]),
        restricted_perfect_pairing(10, 3),
        triangularity(3, -4, 10, 8),
        adjunction(10),
        stabilization(-6, 2, -3, 1, 3),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_j_greater_than_n_is_sharp() {
        assert!(pairing(&[1], &VMonomial::v(1)));
        assert!(pairing(&[1, 1], &VMonomial::from_multiplicities(vec![0, 1])));
    }

    #[test]
    fn small_ranges_pass() {
        for c in [
            generator_values(6),
            single_class_on_higher_v(6),
            short_words_on_long_v(6, 3),
            power_shift(3, &[2]),
            restricted_perfect_pairing(6, 3),
            triangularity(3, -2, 4, 4),
            adjunction(6),
            stabilization(-3, 1, -1, 1, 2),
        ] {
            assert!(c.pass(), "{}: {:?}", c.name, c.failures);
        }
    }

    #[test]
    fn restricted_counts_are_square() {
        // Partitions of 6 into parts <= 2 and into at most 2 parts: 4 each.
        let vs = v_basis(6).into_iter().filter(|v| v.multiplicities().len() <= 2).count();
        let wsn = all_monomials(6).into_iter().filter(|m| m.len() <= 2).count();
        assert_eq!((vs, wsn), (4, 4));
    }
}
