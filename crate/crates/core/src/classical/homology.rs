//! `H_*(BO)` as the polynomial ring on `v_i` with the dual action
//! `Sq_*^k v_i = binom(i-k-1, k) v_{i-k}` (the Thom-twisted action on
//! `H_*(MTO)`), and the evaluation pairing with Stiefel-Whitney monomials.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::f2linalg::{binom_mod2, multinom_mod2, BitMatrix, BitVector};
use crate::gradmod::{DegreeWindow, GradedModule};
use crate::steenrod;

use super::sw::{partitions, Monomial};

/// `v_1^{m_1} v_2^{m_2} ...` stored as the multiplicity vector, trailing
/// zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct VMonomial(Vec<u32>);

impl VMonomial {
    pub fn one() -> Self {
        VMonomial(Vec::new())
    }

    pub fn from_multiplicities(mut m: Vec<u32>) -> Self {
        while m.last() == Some(&0) {
            m.pop();
        }
        VMonomial(m)
    }

    /// `v_i` (`v_0 = 1`).
    pub fn v(i: u32) -> Self {
        if i == 0 {
            return VMonomial::one();
        }
        let mut m = vec![0; i as usize];
        m[i as usize - 1] = 1;
        VMonomial(m)
    }

    pub fn from_indices(indices: &[u16]) -> Self {
        let mut m = Vec::new();
        for &i in indices {
            if i == 0 {
                continue;
            }
            if m.len() < i as usize {
                m.resize(i as usize, 0);
            }
            m[i as usize - 1] += 1;
        }
        VMonomial(m)
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.0
    }

    pub fn mult(&self, i: u32) -> u32 {
        if i == 0 {
            0
        } else {
            self.0.get(i as usize - 1).copied().unwrap_or(0)
        }
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().enumerate().map(|(k, &m)| (k as u64 + 1) * m as u64).sum()
    }

    pub fn times(&self, other: &VMonomial) -> VMonomial {
        let n = self.0.len().max(other.0.len());
        let m = (0..n)
            .map(|k| self.0.get(k).copied().unwrap_or(0) + other.0.get(k).copied().unwrap_or(0))
            .collect();
        VMonomial::from_multiplicities(m)
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(k, &m)| {
                if m == 1 {
                    format!("v[{}]", k + 1)
                } else {
                    format!("v[{}]^{m}", k + 1)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn parse(s: &str) -> Option<VMonomial> {
        let m = Monomial::parse(s, "v")?;
        Some(VMonomial::from_indices(m.indices()))
    }
}

impl fmt::Display for VMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Monomials of `H_t(BO)`, in the same order as the cohomology basis.
pub fn v_basis(t: u32) -> Vec<VMonomial> {
    partitions(t, 1, t.max(1) as u16)
        .iter()
        .map(|m| VMonomial::from_indices(m.indices()))
        .collect()
}

/// `Delta_*(v^J)` as a list of `(left, right)` pairs with odd multiplicity.
pub fn homology_coproduct(x: &VMonomial) -> Vec<(VMonomial, VMonomial)> {
    let mut acc: HashMap<(VMonomial, VMonomial), bool> = HashMap::new();
    acc.insert((VMonomial::one(), VMonomial::one()), true);
    for (k, &m) in x.0.iter().enumerate() {
        let i = k as u32 + 1;
        for _ in 0..m {
            let mut next: HashMap<(VMonomial, VMonomial), bool> = HashMap::new();
            for ((a, b), on) in acc {
                if !on {
                    continue;
                }
                for j in 0..=i {
                    let key = (a.times(&VMonomial::v(j)), b.times(&VMonomial::v(i - j)));
                    let e = next.entry(key).or_insert(false);
                    *e = !*e;
                }
            }
            acc = next;
        }
    }
    let mut out: Vec<_> = acc.into_iter().filter(|(_, on)| *on).map(|(k, _)| k).collect();
    out.sort();
    out
}

type PairKey = (Vec<u32>, Vec<u32>);

fn pair_cache() -> &'static RwLock<HashMap<PairKey, bool>> {
    static CACHE: OnceLock<RwLock<HashMap<PairKey, bool>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// `<w_I, v^J>`: the evaluation of a Stiefel-Whitney monomial (indices in any
/// order, zeros ignored) on a homology monomial.
///
/// Uses `<w_i * rest, x> = sum <w_i, x'> <rest, x''>` over `Delta_* x` and
/// `<w_i, v^J> = 1` iff `v^J = v_1^i`: the factor `w_i` lowers exactly `i`
/// of the `v`'s by one, each choice counted once.
pub fn pairing(w: &[u32], v: &VMonomial) -> bool {
    let mut ws: Vec<u32> = w.iter().copied().filter(|&i| i > 0).collect();
    ws.sort_unstable_by(|a, b| b.cmp(a));
    let wdeg: u64 = ws.iter().map(|&i| i as u64).sum();
    if wdeg != v.degree() {
        return false;
    }
    pair_rec(&ws, &v.0)
}

fn pair_rec(ws: &[u32], mult: &[u32]) -> bool {
    let Some((&first, rest)) = ws.split_first() else {
        return mult.iter().all(|&m| m == 0);
    };
    let len: u64 = mult.iter().map(|&m| m as u64).sum();
    if (first as u64) > len {
        return false;
    }
    if rest.is_empty() {
        // Only v_1^i survives.
        return mult.first().copied() == Some(first) && mult[1..].iter().all(|&m| m == 0);
    }
    let key = (ws.to_vec(), mult.to_vec());
    if let Some(&v) = pair_cache().read().expect("pair cache").get(&key) {
        return v;
    }
    let budget: u64 = rest.iter().map(|&i| i as u64).sum();
    let n = mult.len();
    let mut c = vec![0u32; n + 1];
    let mut acc = false;
    choose_lowerings(n, mult, first, budget, &mut c, rest, &mut acc);
    pair_cache().write().expect("pair cache").insert(key, acc);
    acc
}

/// Enumerates `c_k <= m_k` (how many `v_k` get lowered to `v_{k-1}`) from the
/// top index down, keeping only choices whose remainder can still have degree
/// `budget`.
fn choose_lowerings(
    k: usize,
    mult: &[u32],
    need: u32,
    budget: u64,
    c: &mut [u32],
    rest: &[u32],
    acc: &mut bool,
) {
    // k is 1-based; c[k] is the count for v_k, c[k+1] already fixed.
    if k == 1 {
        let c1 = need;
        if c1 > mult[0] || !binom_mod2(mult[0] as i64, c1 as i64) {
            return;
        }
        c[1] = c1;
        let remainder: Vec<u32> = (1..=mult.len())
            .map(|j| mult[j - 1] - c[j] + c.get(j + 1).copied().unwrap_or(0))
            .collect();
        let rem = VMonomial::from_multiplicities(remainder);
        if rem.degree() == budget && pair_rec(rest, &rem.0) {
            *acc = !*acc;
        }
        return;
    }
    let m = mult[k - 1];
    let above = c.get(k + 1).copied().unwrap_or(0);
    // Remaining v_k count is m - c_k + c_{k+1} and contributes k each.
    let max_left = budget / k as u64;
    let lo = (m as u64 + above as u64).saturating_sub(max_left) as u32;
    for ck in lo..=m.min(need) {
        if !binom_mod2(m as i64, ck as i64) {
            continue;
        }
        c[k] = ck;
        choose_lowerings(k - 1, mult, need - ck, budget, c, rest, acc);
    }
    c[k] = 0;
}

/// Reference evaluation by full expansion of `Delta_*`: slow, used as an
/// oracle for [`pairing`].
pub fn pairing_by_coproduct(w: &[u32], v: &VMonomial) -> bool {
    let ws: Vec<u32> = w.iter().copied().filter(|&i| i > 0).collect();
    if ws.iter().map(|&i| i as u64).sum::<u64>() != v.degree() {
        return false;
    }
    let Some((&first, rest)) = ws.split_first() else {
        return v.0.is_empty();
    };
    let mut acc = false;
    for (a, b) in homology_coproduct(v) {
        if a == VMonomial::from_multiplicities(vec![first]) && pairing_by_coproduct(rest, &b) {
            acc = !acc;
        }
    }
    acc
}

/// An element `xi_2^e v_1^{j_1} v_2^{j_2} ...` of `R` (or of its
/// `v_1`-Laurent completion when `j_1 < 0`).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RMonomial {
    pub xi2: i32,
    pub v1: i32,
    /// Multiplicities of `v_2, v_3, ...`.
    pub rest: Vec<u32>,
}

impl RMonomial {
    pub fn degree(&self) -> i64 {
        2 * self.xi2 as i64
            + self.v1 as i64
            + self
                .rest
                .iter()
                .enumerate()
                .map(|(k, &m)| (k as i64 + 2) * m as i64)
                .sum::<i64>()
    }

    pub fn from_v(x: &VMonomial) -> Self {
        RMonomial {
            xi2: 0,
            v1: x.mult(1) as i32,
            rest: x.0.iter().skip(1).copied().collect(),
        }
    }
}

/// `mu(xi_2^a v_1^b rest, w_{top} w_I)` with `a, b >= 0`, expanding
/// `xi_2^a = sum_c binom(a, c) v_1^{2(a-c)} v_2^c`.
fn mu_expanded(a: u64, b: u64, rest: &[u32], top: u32, w: &[u32]) -> bool {
    let mut acc = false;
    for c in 0..=a {
        if !binom_mod2(a as i64, c as i64) {
            continue;
        }
        let mut mult = vec![(2 * (a - c) + b) as u32];
        mult.extend_from_slice(rest);
        if mult.len() < 2 {
            mult.push(0);
        }
        mult[1] += c as u32;
        let mut ws = vec![top];
        ws.extend_from_slice(w);
        if pairing(&ws, &VMonomial::from_multiplicities(mult)) {
            acc = !acc;
        }
    }
    acc
}

fn mu_tilde_at(r: &RMonomial, l: i32, x: &Monomial, n: u32) -> Option<bool> {
    let s = 1i64 << n;
    let a = s / 2 + r.xi2 as i64;
    let b = s + r.v1 as i64;
    let top = l as i64 + 2 * s;
    if a < 0 || b < 0 || top < 0 {
        return None;
    }
    let w: Vec<u32> = x.indices().iter().map(|&i| i as u32).collect();
    Some(mu_expanded(a as u64, b as u64, &r.rest, top as u32, &w))
}

/// The extended pairing `mu~(r, wt[l] * x)`: shift the generator index by
/// `2^{N+1}` and compensate by `xi_2^{2^{N-1}} v_1^{2^N}` on the homology
/// side. Evaluated at the two smallest admissible `N`, which must agree.
pub fn mu_tilde(r: &RMonomial, l: i32, x: &Monomial) -> Result<bool> {
    if r.degree() != l as i64 + x.degree() as i64 {
        return Ok(false);
    }
    let max_i = x.indices().iter().copied().max().unwrap_or(0) as i64;
    let mut n = 1u32;
    loop {
        let s = 1i64 << n;
        if s / 2 > max_i && s / 2 + r.xi2 as i64 >= 0 && s + r.v1 as i64 >= 0 && l as i64 + 2 * s >= 0 {
            break;
        }
        n += 1;
    }
    let first = mu_tilde_at(r, l, x, n).expect("admissible N");
    let second = mu_tilde_at(r, l, x, n + 1).expect("admissible N");
    if first != second {
        return Err(Error::Integrity(format!(
            "pairing of {r:?} with wt[{l}]*{x} not stable in N"
        )));
    }
    Ok(first)
}

/// `mu~` evaluated at an explicit stabilization exponent, for stability tests.
pub fn mu_tilde_with(r: &RMonomial, l: i32, x: &Monomial, n: u32) -> Option<bool> {
    mu_tilde_at(r, l, x, n)
}

/// A homology polynomial: the set of monomials with coefficient 1.
pub type HPoly = BTreeSet<VMonomial>;

pub fn hpoly_toggle(p: &mut HPoly, m: VMonomial) {
    if !p.remove(&m) {
        p.insert(m);
    }
}

pub fn hpoly_mul(a: &HPoly, b: &HPoly) -> HPoly {
    let mut out = HPoly::new();
    for x in a {
        for y in b {
            hpoly_toggle(&mut out, x.times(y));
        }
    }
    out
}

/// `<w_I, p>` extended linearly over the monomials of `p`.
pub fn pairing_poly(w: &[u32], p: &HPoly) -> bool {
    p.iter().fold(false, |acc, v| acc ^ pairing(w, v))
}

/// Product of two truncated series `sum_m c_m s^{-m}` (coefficients `c_m` of
/// homology degree `m`), keeping `m <= max_m`.
fn series_mul(a: &[HPoly], b: &[HPoly], max_m: usize) -> Vec<HPoly> {
    let mut out = vec![HPoly::new(); max_m + 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate().take(max_m + 1 - i.min(max_m + 1)) {
            if i + j > max_m {
                break;
            }
            for x in ai {
                for y in bj {
                    hpoly_toggle(&mut out[i + j], x.times(y));
                }
            }
        }
    }
    out
}

/// The slant coefficients of `r` against the generators `wt[l]`.
///
/// Under `Delta_*`, extracting the left factor `v_1^k` turns each `v_i` into
/// `v_i + s v_{i-1}` with `s` counting the lowered factors, so `v_1 -> s + v_1`
/// and `xi_2 -> s^2 + s v_1 + xi_2`. Negative exponents are expanded in
/// `s^{-1}`. Returns `c_0, ..., c_max_m` with
/// `mu~(r, wt[deg r - m] * x) = <x, c_m>`.
pub fn slant_coefficients(r: &RMonomial, max_m: u32) -> Vec<HPoly> {
    let max_m = max_m as usize;
    let mut acc = vec![HPoly::new(); max_m + 1];
    acc[0].insert(VMonomial::one());
    // (1 + v_1 s^{-1})^{j_1}
    let v1 = (0..=max_m)
        .map(|m| {
            let mut p = HPoly::new();
            if binom_mod2(r.v1 as i64, m as i64) {
                p.insert(VMonomial::from_multiplicities(vec![m as u32]));
            }
            p
        })
        .collect::<Vec<_>>();
    acc = series_mul(&acc, &v1, max_m);
    // (1 + v_1 s^{-1} + xi_2 s^{-2})^e
    let xi = (0..=max_m)
        .map(|m| {
            let mut p = HPoly::new();
            for b in 0..=m / 2 {
                let a = m - 2 * b;
                if !multinom_mod2(r.xi2 as i64, a as i64, b as i64) {
                    continue;
                }
                for c in 0..=b {
                    if binom_mod2(b as i64, c as i64) {
                        hpoly_toggle(&mut p, VMonomial::from_multiplicities(vec![(a + 2 * (b - c)) as u32, c as u32]));
                    }
                }
            }
            p
        })
        .collect::<Vec<_>>();
    acc = series_mul(&acc, &xi, max_m);
    // (v_{i-1} + v_i s^{-1})^{j_i} for i >= 2, shifted by the base degree.
    for (k, &j) in r.rest.iter().enumerate() {
        if j == 0 {
            continue;
        }
        let i = k as u32 + 2;
        let base = ((i - 1) * j) as usize;
        if base > max_m {
            return vec![HPoly::new(); max_m + 1];
        }
        let mut f = vec![HPoly::new(); max_m + 1];
        let lower = VMonomial::v(i - 1);
        let upper = VMonomial::v(i);
        for c in 0..=j {
            let m = base + c as usize;
            if m > max_m {
                break;
            }
            if binom_mod2(j as i64, c as i64) {
                let mut mono = VMonomial::one();
                for _ in 0..(j - c) {
                    mono = mono.times(&lower);
                }
                for _ in 0..c {
                    mono = mono.times(&upper);
                }
                hpoly_toggle(&mut f[m], mono);
            }
        }
        acc = series_mul(&acc, &f, max_m);
    }
    acc
}

/// `mu~(r, wt[l] * x)` through [`slant_coefficients`].
pub fn mu_tilde_slant(r: &RMonomial, l: i32, x: &Monomial) -> bool {
    if r.degree() != l as i64 + x.degree() as i64 {
        return false;
    }
    let m = x.degree();
    let w: Vec<u32> = x.indices().iter().map(|&i| i as u32).collect();
    slant_coefficients(r, m)[m as usize]
        .iter()
        .fold(false, |acc, v| acc ^ pairing(&w, v))
}

/// `H_*(BO)` on degrees `[0, max_deg]` with the dual action `Sq_*^k`.
#[derive(Clone, Debug)]
pub struct HomologyModule {
    pub max_deg: u32,
    basis: Vec<Vec<VMonomial>>,
    index: Vec<HashMap<VMonomial, usize>>,
    /// `Sq_*^k : H_t -> H_{t-k}`, keyed by `(k, t)`.
    lower: HashMap<(u32, u32), BitMatrix>,
}

impl HomologyModule {
    pub fn dim(&self, t: u32) -> usize {
        self.basis.get(t as usize).map_or(0, Vec::len)
    }

    pub fn basis(&self, t: u32) -> &[VMonomial] {
        self.basis.get(t as usize).map_or(&[], |v| v.as_slice())
    }

    pub fn index_of(&self, x: &VMonomial) -> Option<usize> {
        let d = x.degree();
        self.index.get(d as usize)?.get(x).copied()
    }

    /// `Sq_*^k` from degree `t`; the identity for `k = 0`, zero for `k > t`.
    pub fn sq_lower(&self, k: u32, t: u32) -> BitMatrix {
        if k == 0 {
            return BitMatrix::identity(self.dim(t));
        }
        if k > t {
            return BitMatrix::zeros(0, self.dim(t));
        }
        self.lower[&(k, t)].clone()
    }

    pub fn apply_lower(&self, k: u32, x: &VMonomial) -> BitVector {
        let t = x.degree() as u32;
        let i = self.index_of(x).expect("monomial in range");
        self.sq_lower(k, t).column(i)
    }

    pub fn render(&self, t: u32, v: &BitVector) -> String {
        let parts: Vec<String> = v.support().map(|i| self.basis[t as usize][i].render()).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// The left module obtained by placing `H_t` in degree `-t` and letting
    /// `Sq^k` act by the dual of `chi(Sq^k)`; Adem relations for it are
    /// equivalent to `Sq_*` being an anti-homomorphism.
    pub fn as_left_module(&self) -> GradedModule {
        let max = self.max_deg as i32;
        let window = DegreeWindow::new(-max, 0, 0);
        let basis: Vec<Vec<String>> = window
            .degrees()
            .map(|t| self.basis((-t) as u32).iter().map(VMonomial::render).collect())
            .collect();
        let mut action = HashMap::new();
        for k in 1..=self.max_deg {
            let chi = steenrod::chi(&steenrod::SteenrodElement::sq(k));
            for t in -max..=-(k as i32) {
                let src = (-t) as u32;
                let mut acc = BitMatrix::zeros(self.dim(src - k), self.dim(src));
                for word in chi.terms() {
                    // The dual of Sq^{a_1} ... Sq^{a_r} applies Sq_*^{a_1} first.
                    let mut m = BitMatrix::identity(self.dim(src));
                    let mut deg = src;
                    for &a in word.exponents() {
                        m = self.sq_lower(a, deg).mul(&m);
                        deg -= a;
                    }
                    acc = acc.add(&m);
                }
                action.insert((k, t), acc);
            }
        }
        GradedModule::from_parts(
            "H_*(MTO)",
            window,
            basis,
            (1..=self.max_deg).collect(),
            action,
        )
        .expect("consistent homology module")
    }
}

/// `Sq_*^k v_i = binom(i-k-1, k) v_{i-k}`.
fn sq_lower_generator(k: u32, i: u32) -> Option<VMonomial> {
    if k > i {
        return None;
    }
    binom_mod2(i as i64 - k as i64 - 1, k as i64).then(|| VMonomial::v(i - k))
}

pub fn build_h_bo_homology(max_deg: u32) -> HomologyModule {
    let basis: Vec<Vec<VMonomial>> = (0..=max_deg).map(v_basis).collect();
    let index: Vec<HashMap<VMonomial, usize>> = basis
        .iter()
        .map(|b| b.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect())
        .collect();
    // Sq_*^k on every monomial, by the Cartan rule over its factors.
    let mut images: HashMap<(u32, VMonomial), HashMap<VMonomial, bool>> = HashMap::new();
    fn image(
        k: u32,
        x: &VMonomial,
        memo: &mut HashMap<(u32, VMonomial), HashMap<VMonomial, bool>>,
    ) -> HashMap<VMonomial, bool> {
        if let Some(v) = memo.get(&(k, x.clone())) {
            return v.clone();
        }
        let mut out: HashMap<VMonomial, bool> = HashMap::new();
        if k == 0 {
            out.insert(x.clone(), true);
        } else if let Some(i) = x.0.iter().position(|&m| m > 0) {
            let i = i as u32 + 1;
            let mut rest = x.0.clone();
            rest[i as usize - 1] -= 1;
            let rest = VMonomial::from_multiplicities(rest);
            for a in 0..=k.min(i) {
                let Some(left) = sq_lower_generator(a, i) else { continue };
                for (r, on) in image(k - a, &rest, memo) {
                    if on {
                        let e = out.entry(left.times(&r)).or_insert(false);
                        *e = !*e;
                    }
                }
            }
        }
        out.retain(|_, on| *on);
        memo.insert((k, x.clone()), out.clone());
        out
    }
    let mut lower = HashMap::new();
    for t in 1..=max_deg {
        for k in 1..=t {
            let cols: Vec<BitVector> = basis[t as usize]
                .iter()
                .map(|x| {
                    let img = image(k, x, &mut images);
                    BitVector::from_support(
                        basis[(t - k) as usize].len(),
                        img.keys().map(|y| index[(t - k) as usize][y]),
                    )
                })
                .collect();
            lower.insert((k, t), BitMatrix::from_columns(basis[(t - k) as usize].len(), &cols));
        }
    }
    HomologyModule {
        max_deg,
        basis,
        index,
        lower,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::sw::SwRing;
    use crate::classical::thom_sq;
    use crate::gradmod::verify_action;

    fn w(indices: &[u16]) -> Vec<u32> {
        indices.iter().map(|&i| i as u32).collect()
    }

    #[test]
    fn slant_form_matches_stabilized_pairing() {
        let rests: [&[u32]; 4] = [&[], &[1], &[0, 1], &[2, 0, 1]];
        for e in -3..=2 {
            for j1 in -2..=3 {
                for rest in rests {
                    let r = RMonomial { xi2: e, v1: j1, rest: rest.to_vec() };
                    for m in 0..=6u32 {
                        let l = (r.degree() - m as i64) as i32;
                        for x in partitions(m, 1, m.max(1) as u16) {
                            assert_eq!(mu_tilde_slant(&r, l, &x), mu_tilde(&r, l, &x).unwrap(), "{r:?} wt[{l}]*{x}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn basic_pairings() {
        assert!(pairing(&[1], &VMonomial::v(1)));
        assert!(!pairing(&[2], &VMonomial::v(2)));
        let v1sq = VMonomial::from_multiplicities(vec![2]);
        let v2 = VMonomial::v(2);
        // rows w2, w1^2; columns v2, v1^2
        let m = [
            [pairing(&[2], &v2), pairing(&[2], &v1sq)],
            [pairing(&[1, 1], &v2), pairing(&[1, 1], &v1sq)],
        ];
        assert_eq!(m, [[false, true], [true, false]]);
    }

    #[test]
    fn fast_pairing_matches_coproduct_expansion() {
        for d in 0..=8u32 {
            let ws = partitions(d, 1, d.max(1) as u16);
            let vs = v_basis(d);
            for a in &ws {
                for x in &vs {
                    let wi = w(a.indices());
                    assert_eq!(pairing(&wi, x), pairing_by_coproduct(&wi, x), "{a} on {x}");
                }
            }
        }
    }

    #[test]
    fn pairing_is_perfect() {
        for d in 0..=10u32 {
            let ws = partitions(d, 1, d.max(1) as u16);
            let vs = v_basis(d);
            let rows: Vec<BitVector> = ws
                .iter()
                .map(|a| BitVector::from_support(vs.len(), (0..vs.len()).filter(|&j| pairing(&w(a.indices()), &vs[j]))))
                .collect();
            assert_eq!(BitMatrix::from_rows(vs.len(), rows).rank(), vs.len(), "degree {d}");
        }
    }

    #[test]
    fn lower_action_examples() {
        let h = build_h_bo_homology(6);
        assert!(h.apply_lower(1, &VMonomial::v(2)).is_zero());
        assert_eq!(h.render(2, &h.apply_lower(1, &VMonomial::v(3))), "v[2]");
        let x = VMonomial::parse("v[1]^2*v[2]").unwrap();
        assert_eq!(h.sq_lower(0, 4).column(h.index_of(&x).unwrap()), BitVector::unit(h.dim(4), h.index_of(&x).unwrap()));
    }

    #[test]
    fn xi2_is_invariant() {
        let h = build_h_bo_homology(6);
        let i2 = h.index_of(&VMonomial::v(2)).unwrap();
        let i11 = h.index_of(&VMonomial::from_multiplicities(vec![2])).unwrap();
        let xi2 = BitVector::from_support(h.dim(2), [i2, i11]);
        for k in 1..=2 {
            assert!(h.sq_lower(k, 2).mul_vec(&xi2).is_zero());
        }
    }

    #[test]
    fn dual_action_is_a_module() {
        let h = build_h_bo_homology(9);
        let m = h.as_left_module();
        assert!(verify_action(&m).is_empty());
    }

    #[test]
    fn adjunction_with_thom_action() {
        let ring = SwRing::new(9, false);
        let h = build_h_bo_homology(9);
        for t in 0..=9u32 {
            for k in 1..=(9 - t) {
                for (ai, a) in ring.basis(t).iter().enumerate() {
                    let sa = thom_sq(&ring, true, k, t, ai);
                    for x in h.basis(t + k) {
                        let lhs = ring
                            .monomials_of(&sa)
                            .iter()
                            .filter(|m| pairing(&w(m.indices()), x))
                            .count()
                            % 2
                            == 1;
                        let down = h.apply_lower(k, x);
                        let rhs = down
                            .support()
                            .filter(|&j| pairing(&w(a.indices()), &h.basis(t)[j]))
                            .count()
                            % 2
                            == 1;
                        assert_eq!(lhs, rhs, "Sq^{k} {a} against {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn mu_tilde_reduces_to_mu_on_nonnegative_generators() {
        for (l, x) in [(2, Monomial::from_indices([1])), (3, Monomial::from_indices([2, 1])), (0, Monomial::from_indices([3]))] {
            let d = l as u32 + x.degree();
            for v in v_basis(d) {
                let mut ws = vec![l as u32];
                ws.extend(x.indices().iter().map(|&i| i as u32));
                assert_eq!(mu_tilde(&RMonomial::from_v(&v), l, &x).unwrap(), pairing(&ws, &v));
            }
        }
    }

    #[test]
    fn mu_tilde_is_stable_in_n() {
        for l in -6..=2 {
            for xi in -3..=1 {
                for x in [Monomial::one(), Monomial::from_indices([2]), Monomial::from_indices([1, 1])] {
                    let deg = l + x.degree() as i32 - 2 * xi;
                    if deg < 0 {
                        continue;
                    }
                    for v in v_basis(deg as u32) {
                        let mut r = RMonomial::from_v(&v);
                        r.xi2 = xi;
                        let vals: Vec<Option<bool>> = (3..=6).map(|n| mu_tilde_with(&r, l, &x, n)).collect();
                        assert!(vals.windows(2).all(|p| p[0] == p[1]), "{r:?} wt[{l}]*{x}: {vals:?}");
                    }
                }
            }
        }
    }
}
