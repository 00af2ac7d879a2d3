//! `Hom_A(WH*, Z/2)`: the functionals `xi_2^e` for all integers `e`, the
//! coproduct `WH* -> H* (x) WH*` that multiplies them, and the generators
//! `xi_k` of `Hom_A(H*(MTO), Z/2)`.
//!
//! `xi_2^e` on `p wt[l]` (with `l + deg p = 2e`) is evaluated by lifting to
//! `p w_{2K - i}` in `H*(MTO)` with `K = 2^{N-1} + e`, where the value is
//! `sum_{a + 2b = i} multinom(K; a, b) <p, v_1^a xi_2^b>`. Three consecutive
//! lifts are computed and must agree.

use std::collections::{BTreeMap, HashMap};

use super::homology::{build_h_bo_homology, hpoly_mul, hpoly_toggle, pairing, pairing_poly, HPoly, VMonomial};
use super::sw::{partitions, Monomial};
use super::{build_h_bo, build_wh, sw_label, wh_label, HboVariant, WhParams};
use crate::error::{Error, Result};
use crate::f2linalg::{binom_mod2, multinom_mod2, BitMatrix, BitVector, EchelonBasis};
use crate::gradmod::{tensor_product, GradedModule, ModuleMap};

fn w_list(x: &Monomial) -> Vec<u32> {
    x.indices().iter().map(|&i| i as u32).collect()
}

/// `xi_2 = v_1^2 + v_2` as a homology class.
pub fn xi2_class() -> HPoly {
    let mut p = HPoly::new();
    p.insert(VMonomial::from_multiplicities(vec![2]));
    p.insert(VMonomial::v(2));
    p
}

/// `v_1^a xi_2^b`, expanded.
fn v1_xi2(a: u32, b: u32) -> HPoly {
    let mut p = HPoly::new();
    for c in 0..=b {
        if binom_mod2(b as i64, c as i64) {
            hpoly_toggle(&mut p, VMonomial::from_multiplicities(vec![a + 2 * (b - c), c]));
        }
    }
    p
}

/// `xi_1^a xi_2^b (p)`: evaluate `Delta(p)` with `xi_1` on `a` degree-one
/// factors and `xi_2` on `b` degree-two factors.
pub fn xi1_xi2_value(p: &Monomial, a: u32, b: u32) -> bool {
    if p.degree() != a + 2 * b {
        return false;
    }
    pairing_poly(&w_list(p), &v1_xi2(a, b))
}

/// The right side of the lifted formula at multiplicity `k`.
pub fn xi2_power_formula(k: i64, p: &Monomial) -> bool {
    let i = p.degree();
    let mut acc = false;
    for b in 0..=i / 2 {
        let a = i - 2 * b;
        if multinom_mod2(k, a as i64, b as i64) && xi1_xi2_value(p, a, b) {
            acc = !acc;
        }
    }
    acc
}

/// `xi_2^k (p w_top)` on `H*(MTO)` straight from the pairing with
/// `(v_1^2 + v_2)^k`: the definition the formula is derived from.
pub fn xi2_power_direct(k: u32, p: &Monomial, top: u32) -> bool {
    let mut ws = w_list(p);
    ws.push(top);
    if ws.iter().sum::<u32>() != 2 * k {
        return false;
    }
    let mut acc = false;
    for c in 0..=k {
        if binom_mod2(k as i64, c as i64) && pairing(&ws, &VMonomial::from_multiplicities(vec![2 * (k - c), c])) {
            acc = !acc;
        }
    }
    acc
}

/// `xi_2^e` on `H^{2e}(MTO)` for `e >= 0`.
pub fn xi2_on_h(e: u32, p: &Monomial) -> bool {
    if p.degree() != 2 * e {
        return false;
    }
    let mut cls = HPoly::new();
    cls.insert(VMonomial::one());
    for _ in 0..e {
        cls = hpoly_mul(&cls, &xi2_class());
    }
    pairing_poly(&w_list(p), &cls)
}

/// The three lift sizes `k a_r = 2^N, 2^{N+1}, 2^{N+2}` used for `p wt[l]`.
/// `N` is minimal with `2^{N-1} > deg p` (so every multinomial is read modulo
/// a power of two dividing `2^{N-1}`), `2^{N-1} + e >= 0` and `2^N + l >= 0`.
pub fn lift_sizes(e: i32, l: i32, p: &Monomial) -> [u64; 3] {
    let i = p.degree() as i64;
    let mut n = 1u32;
    loop {
        let s = 1i64 << n;
        if s / 2 > i && s / 2 + e as i64 >= 0 && s + l as i64 >= 0 {
            break;
        }
        n += 1;
    }
    [1u64 << n, 1u64 << (n + 1), 1u64 << (n + 2)]
}

/// `xi_2^e (p wt[l])`, zero unless `l + deg p = 2e`.
pub fn xi2_functional(e: i32, l: i32, p: &Monomial) -> Result<bool> {
    if l as i64 + p.degree() as i64 != 2 * e as i64 {
        return Ok(false);
    }
    let values = lift_sizes(e, l, p).map(|kar| xi2_power_formula(kar as i64 / 2 + e as i64, p));
    if values[0] != values[1] || values[1] != values[2] {
        return Err(Error::Integrity(format!(
            "xi_2^{e} on {} depends on the lift: {values:?}",
            wh_label(l, p)
        )));
    }
    Ok(values[0])
}

/// `Delta_H` on a Stiefel-Whitney monomial: `w_i -> sum_j w_j (x) w_{i-j}`,
/// multiplicatively. Pairs with odd multiplicity.
pub fn sw_coproduct(x: &Monomial) -> Vec<(Monomial, Monomial)> {
    let mut acc: BTreeMap<(Monomial, Monomial), bool> = BTreeMap::new();
    acc.insert((Monomial::one(), Monomial::one()), true);
    for &i in x.indices() {
        let mut next: BTreeMap<(Monomial, Monomial), bool> = BTreeMap::new();
        for ((a, b), on) in acc {
            if !on {
                continue;
            }
            for j in 0..=i {
                let key = (a.times(&Monomial::from_indices([j])), b.times(&Monomial::from_indices([i - j])));
                let e = next.entry(key).or_insert(false);
                *e = !*e;
            }
        }
        acc = next;
    }
    acc.into_iter().filter(|&(_, on)| on).map(|(k, _)| k).collect()
}

/// One summand `left (x) right wt[l]` of the coproduct.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoproductTerm {
    pub left: Monomial,
    pub l: i32,
    pub right: Monomial,
}

/// `Delta(x wt[k]) = Delta_H(x) * sum_j (w_j (x) wt[k - j])`, keeping the
/// summands whose left factor has degree at most `left_max`.
pub fn coproduct_wh(k: i32, x: &Monomial, left_max: u32) -> Vec<CoproductTerm> {
    let mut acc: BTreeMap<CoproductTerm, bool> = BTreeMap::new();
    for (a, b) in sw_coproduct(x) {
        if a.degree() > left_max {
            continue;
        }
        for j in 0..=(left_max - a.degree()) {
            let term = CoproductTerm {
                left: a.times(&Monomial::from_indices([j as u16])),
                l: k - j as i32,
                right: b.clone(),
            };
            let e = acc.entry(term).or_insert(false);
            *e = !*e;
        }
    }
    acc.into_iter().filter(|&(_, on)| on).map(|(t, _)| t).collect()
}

/// `(xi_2^m . xi_2^e)(x wt[k])` through the coproduct: `xi_2^m` on the
/// `H*`-factor, `xi_2^e` on the `WH*`-factor.
pub fn xi2_product_value(m: u32, e: i32, k: i32, x: &Monomial) -> Result<bool> {
    let mut acc = false;
    for term in coproduct_wh(k, x, 2 * m) {
        if term.left.degree() != 2 * m || !xi2_on_h(m, &term.left) {
            continue;
        }
        if xi2_functional(e, term.l, &term.right)? {
            acc = !acc;
        }
    }
    Ok(acc)
}

/// `(xi . xi_2^e)(x wt[k])` for a functional `xi` on `H*` given as a
/// homology class of degree `deg xi`.
pub fn product_with_h_class(xi: &HPoly, deg: u32, e: i32, k: i32, x: &Monomial) -> Result<bool> {
    let mut acc = false;
    for term in coproduct_wh(k, x, deg) {
        if term.left.degree() != deg || !pairing_poly(&w_list(&term.left), xi) {
            continue;
        }
        if xi2_functional(e, term.l, &term.right)? {
            acc = !acc;
        }
    }
    Ok(acc)
}

/// Generators of `Hom_A(H*(MTO), Z/2) = Z/2[xi_k : k != 2^s - 1]` in degrees
/// `1..=max_deg`: the A-invariant homology classes, one per degree not of
/// the form `2^s - 1`, each the first invariant (in echelon order) that is
/// not a product of lower invariants. Degree 2 is fixed to `v_1^2 + v_2`.
pub fn xi_generators(max_deg: u32) -> Result<BTreeMap<u32, HPoly>> {
    let h = build_h_bo_homology(max_deg);
    let to_vec = |t: u32, p: &HPoly| {
        BitVector::from_support(h.dim(t), p.iter().map(|v| h.index_of(v).expect("basis monomial")))
    };
    let to_poly = |t: u32, v: &BitVector| -> HPoly { v.support().map(|i| h.basis(t)[i].clone()).collect() };
    let mut invariants: Vec<Vec<HPoly>> = vec![vec![[VMonomial::one()].into_iter().collect()]];
    let mut gens = BTreeMap::new();
    for t in 1..=max_deg {
        let rows: Vec<BitVector> = (1..=t)
            .flat_map(|k| {
                let m = h.sq_lower(k, t);
                (0..m.rows()).map(move |r| m.row(r).clone()).collect::<Vec<_>>()
            })
            .collect();
        let kernel = BitMatrix::from_rows(h.dim(t), rows).kernel_basis();
        let mut ech = EchelonBasis::new(h.dim(t));
        for v in &kernel {
            ech.insert(v);
        }
        let mut basis: Vec<BitVector> = ech.vectors().cloned().collect();
        basis.sort_by_key(|v| v.first_one());
        let mut decomposable = EchelonBasis::new(h.dim(t));
        for s in 1..t {
            for a in &invariants[s as usize] {
                for b in &invariants[(t - s) as usize] {
                    decomposable.insert(&to_vec(t, &hpoly_mul(a, b)));
                }
            }
        }
        let fresh: Vec<&BitVector> = basis.iter().filter(|v| decomposable.insert(v)).collect();
        let expected = usize::from(!(t + 1).is_power_of_two());
        if fresh.len() != expected {
            return Err(Error::Integrity(format!(
                "{} indecomposable invariants in degree {t}, expected {expected}",
                fresh.len()
            )));
        }
        if let Some(v) = fresh.first() {
            let g = if t == 2 { xi2_class() } else { to_poly(t, v) };
            if t == 2 && !ech.contains(&to_vec(2, &g)) {
                return Err(Error::Integrity("v_1^2 + v_2 is not invariant".into()));
            }
            gens.insert(t, g);
        }
        invariants.push(basis.iter().map(|v| to_poly(t, v)).collect());
    }
    Ok(gens)
}

/// Monomials in the generators `xi_k`, `k >= 4`, `k != 2^s - 1`, of degree
/// exactly `deg`, as exponent maps.
pub fn s_a_monomials(deg: u32) -> Vec<BTreeMap<u32, u32>> {
    let allowed = |k: u16| k >= 4 && !(k as u32 + 1).is_power_of_two();
    if deg == 0 {
        return vec![BTreeMap::new()];
    }
    partitions(deg, 4, deg as u16)
        .into_iter()
        .filter(|m| m.indices().iter().all(|&k| allowed(k)))
        .map(|m| m.multiplicities().into_iter().map(|(k, c)| (k as u32, c)).collect())
        .collect()
}

/// `xi_I` as a homology class.
pub fn xi_monomial(gens: &BTreeMap<u32, HPoly>, exps: &BTreeMap<u32, u32>) -> HPoly {
    let mut p: HPoly = [VMonomial::one()].into_iter().collect();
    for (&k, &c) in exps {
        for _ in 0..c {
            p = hpoly_mul(&p, &gens[&k]);
        }
    }
    p
}

/// Result of evaluating the functionals `xi_2^n xi_I` of one degree on the
/// window basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankCheck {
    pub degree: i32,
    pub functionals: usize,
    pub rank: usize,
}

/// Rank of `{xi_2^n xi_I : n in [n_lo, n_hi], deg = t}` evaluated on the
/// basis `x wt[l]` of degree `t` with `gen_lo <= l <= t` and coefficient
/// degree at most `t - gen_lo`.
pub fn xi_monomial_rank(t: i32, n_lo: i32, n_hi: i32, gen_lo: i32) -> Result<RankCheck> {
    let max_i = (t - 2 * n_lo).max(0) as u32;
    let gens = xi_generators(max_i.max(2))?;
    let cells: Vec<(i32, Monomial)> = (gen_lo..=t)
        .flat_map(|l| {
            let c = (t - l) as u32;
            let ps = if c == 0 { vec![Monomial::one()] } else { partitions(c, 1, c as u16) };
            ps.into_iter().map(move |p| (l, p))
        })
        .collect();
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        let deg_i = t - 2 * n;
        if deg_i < 0 {
            continue;
        }
        for exps in s_a_monomials(deg_i as u32) {
            let xi = xi_monomial(&gens, &exps);
            let mut row = BitVector::zeros(cells.len());
            for (c, (l, p)) in cells.iter().enumerate() {
                if product_with_h_class(&xi, deg_i as u32, n, *l, p)? {
                    row.set(c, true);
                }
            }
            rows.push(row);
        }
    }
    let functionals = rows.len();
    let rank = if rows.is_empty() { 0 } else { BitMatrix::from_rows(cells.len(), rows).rank() };
    Ok(RankCheck { degree: t, functionals, rank })
}

/// The coproduct as a degree-preserving map `WH(d + h_max)* -> H*(MTO)_{<= h_max} (x) WH(d)*`
/// on degrees `[gen_lo, hi]`. The source keeps generators `wt[l]` up to
/// `d + h_max`: a summand `w_j (x) wt[k - j]` with `k > d + h_max` and
/// `k - j <= d` has `j > h_max`, so it dies on the left.
pub struct CoproductMap {
    pub source: GradedModule,
    pub target: GradedModule,
    pub map: ModuleMap,
}

pub fn coproduct_map(d: i32, gen_lo: i32, hi: i32, h_max: u32) -> Result<CoproductMap> {
    if hi < gen_lo || d < gen_lo {
        return Err(Error::WindowTooSmall(format!("empty window [{gen_lo}, {hi}]")));
    }
    let source = build_wh(&WhParams::new(d + h_max as i32, gen_lo, (hi - gen_lo) as u32, false).degree_hi(hi));
    let h = build_h_bo(h_max, HboVariant::Thom);
    let lo_r = gen_lo - h_max as i32;
    let right = build_wh(&WhParams::new(d, lo_r, (hi - lo_r) as u32, false).degree_hi(hi));
    let span = (hi - gen_lo) as u32;
    let target = tensor_product(&h, &right, gen_lo, hi, span);
    let mut map = ModuleMap::new(0);
    for t in gen_lo..=hi {
        let index: HashMap<&str, usize> =
            target.basis(t).iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut cols = Vec::new();
        for label in source.basis(t) {
            let (k, x) = super::parse_wh_label(label).expect("window label");
            let mut col = BitVector::zeros(target.dim(t));
            for term in coproduct_wh(k, &x, h_max).into_iter().filter(|t| t.l <= d) {
                let key = format!("{}|{}", sw_label(&term.left, true), wh_label(term.l, &term.right));
                let &pos = index.get(key.as_str()).ok_or_else(|| {
                    Error::WindowTooSmall(format!("coproduct term {key} falls outside the target window"))
                })?;
                col.flip(pos);
            }
            cols.push(col);
        }
        map.matrices.insert(t, BitMatrix::from_columns(target.dim(t), &cols));
    }
    Ok(CoproductMap { source, target, map })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::homology::{mu_tilde_slant, RMonomial};
    use crate::gradmod::check_linearity;

    fn mono(s: &str) -> Monomial {
        Monomial::parse(s, "w").unwrap()
    }

    #[test]
    fn xi2_takes_one_on_both_degree_two_classes() {
        assert!(xi2_on_h(1, &mono("w[2]")));
        assert!(xi2_on_h(1, &mono("w[1]^2")));
    }

    #[test]
    fn inverse_on_bottom_generator() {
        assert!(xi2_functional(-1, -2, &Monomial::one()).unwrap());
    }

    #[test]
    fn formula_matches_direct_evaluation() {
        for i in 0..=6u32 {
            for p in partitions(i, 1, i.max(1) as u16).into_iter().chain((i == 0).then(Monomial::one)) {
                for k in i.div_ceil(2)..=8 {
                    let top = 2 * k - i;
                    assert_eq!(xi2_power_formula(k as i64, &p), xi2_power_direct(k, &p, top), "k = {k}, p = {p:?}");
                }
            }
        }
    }

    #[test]
    fn functional_matches_stabilized_pairing() {
        for e in -4..=3 {
            for i in 0..=8u32 {
                let l = 2 * e - i as i32;
                let ps = if i == 0 { vec![Monomial::one()] } else { partitions(i, 1, i as u16) };
                for p in ps {
                    let r = RMonomial { xi2: e, v1: 0, rest: vec![] };
                    assert_eq!(xi2_functional(e, l, &p).unwrap(), mu_tilde_slant(&r, l, &p), "e = {e}, {p:?}");
                }
            }
        }
    }

    #[test]
    fn coproduct_of_generator() {
        let terms = coproduct_wh(3, &Monomial::one(), 2);
        let shown: Vec<String> = terms.iter().map(|t| format!("{}|{}", t.left.render("w"), wh_label(t.l, &t.right))).collect();
        assert_eq!(shown, ["1|wt[3]", "w[1]|wt[2]", "w[2]|wt[1]"]);
    }

    #[test]
    fn coproduct_is_a_linear() {
        let c = coproduct_map(2, -4, 3, 3).unwrap();
        assert!(check_linearity(&c.map, &c.source, &c.target, 7).is_empty());
    }

    #[test]
    fn generators_in_low_degrees() {
        let g = xi_generators(8).unwrap();
        assert_eq!(g.keys().copied().collect::<Vec<_>>(), vec![2, 4, 5, 6, 8]);
    }

    #[test]
    fn h_class_product_matches_pairing_with_product() {
        let gens = xi_generators(6).unwrap();
        for (&k, xi) in &gens {
            for n in -2..=1 {
                let t = 2 * n + k as i32;
                for l in t - 6..=t {
                    let c = (t - l) as u32;
                    let ps = if c == 0 { vec![Monomial::one()] } else { partitions(c, 1, c as u16) };
                    for p in ps {
                        let via_pairing = xi.iter().fold(false, |acc, v| {
                            let mut r = RMonomial::from_v(v);
                            r.xi2 = n;
                            acc ^ mu_tilde_slant(&r, l, &p)
                        });
                        assert_eq!(product_with_h_class(xi, k, n, l, &p).unwrap(), via_pairing);
                    }
                }
            }
        }
    }
}
