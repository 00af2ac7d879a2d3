//! Concrete modules: `H*(BO)` and its Thom and oriented variants, the
//! twisted modules `WH(d)*`, the Laurent module, and the homology side with
//! its evaluation pairing.

pub mod adic;
pub mod homology;
pub mod pairing_checks;
pub mod series;
pub mod sw;
pub mod xi2;

use std::collections::HashMap;
use std::sync::Arc;

use crate::f2linalg::{binom_mod2, BitVector};
use crate::gradmod::{DegreeWindow, GradedModule, OpSet};

pub use adic::{build_wh_adic, partition_count, AdicPiece};
pub use homology::{
    build_h_bo_homology, homology_coproduct, mu_tilde, pairing, pairing_by_coproduct, HomologyModule,
    RMonomial, VMonomial,
};
pub use series::{series_identities, LaurentMonomial, SeriesReport, TruncatedSeries};
pub use xi2::{coproduct_map, coproduct_wh, xi2_functional, xi_generators, xi_monomial_rank, CoproductTerm};
pub use sw::{partitions, Monomial, Poly, SwRing};

/// Which cohomology ring and whether the Thom class twists the action.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HboVariant {
    /// `H*(BO)`.
    Plain,
    /// `H*(BSO)`.
    Oriented,
    /// `H*(MTO)`: `H*(BO)` times a degree-0 Thom class with `Sq^i(u) = wbar_i`.
    Thom,
    /// `H*(MTSO)`.
    ThomOriented,
}

impl HboVariant {
    pub fn oriented(self) -> bool {
        matches!(self, HboVariant::Oriented | HboVariant::ThomOriented)
    }

    pub fn thom(self) -> bool {
        matches!(self, HboVariant::Thom | HboVariant::ThomOriented)
    }
}

fn sw_label(m: &Monomial, thom: bool) -> String {
    match (thom, m.is_one()) {
        (false, _) => m.render("w"),
        (true, true) => "u".into(),
        (true, false) => format!("{}*u", m.render("w")),
    }
}

/// `H*(BO)` (or a variant) on degrees `[0, max_deg]`, all `Sq^k` stored.
pub fn build_h_bo(max_deg: u32, variant: HboVariant) -> GradedModule {
    let ring = Arc::new(SwRing::new(max_deg, variant.oriented()));
    build_h_bo_with_ring(&ring, variant.thom())
}

pub(crate) fn build_h_bo_with_ring(ring: &Arc<SwRing>, thom: bool) -> GradedModule {
    let max_deg = ring.max_deg;
    let basis = (0..=max_deg)
        .map(|d| ring.basis(d).iter().map(|m| sw_label(m, thom)).collect())
        .collect();
    let name = match (ring.oriented, thom) {
        (false, false) => "H*(BO)",
        (true, false) => "H*(BSO)",
        (false, true) => "H*(MTO)",
        (true, true) => "H*(MTSO)",
    };
    GradedModule::from_columns(
        name,
        DegreeWindow::new(0, max_deg as i32, 0),
        basis,
        OpSet::UpTo(max_deg),
        |k, t, i| thom_sq(ring, thom, k, t as u32, i).coords,
    )
}

/// `Sq^k(x)` or, with `thom`, `Sq^k(x u) / u = sum_a Sq^a(x) wbar_{k-a}`.
pub(crate) fn thom_sq(ring: &SwRing, thom: bool, k: u32, d: u32, i: usize) -> Poly {
    let x = Poly {
        degree: d,
        coords: BitVector::unit(ring.dim(d), i),
    };
    if !thom {
        return ring.sq(k, &x);
    }
    let mut out = ring.zero(d + k);
    for a in 0..=k {
        let sa = ring.sq(a, &x);
        out = ring.add(&out, &ring.mul(&sa, ring.wbar(k - a)));
    }
    out
}

/// The dual Stiefel-Whitney classes up to `max_deg`.
pub struct DualSwTable {
    ring: Arc<SwRing>,
}

impl DualSwTable {
    pub fn get(&self, i: u32) -> &Poly {
        self.ring.wbar(i)
    }

    pub fn render(&self, i: u32) -> String {
        self.ring.render(self.ring.wbar(i))
    }

    pub fn ring(&self) -> &SwRing {
        &self.ring
    }
}

pub fn dual_sw(max_deg: u32, oriented: bool) -> DualSwTable {
    DualSwTable {
        ring: Arc::new(SwRing::new(max_deg, oriented)),
    }
}

/// Parameters of a rectangular truncation of `WH(d)*`: generators `wt[l]`
/// with `gen_lo <= l <= d`, coefficients of degree at most `coeff_max`, and
/// optionally a cap on total degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhParams {
    pub d: i32,
    pub gen_lo: i32,
    pub coeff_max: u32,
    pub oriented: bool,
    pub degree_hi: Option<i32>,
    pub ops: Option<OpSet>,
}

impl WhParams {
    pub fn new(d: i32, gen_lo: i32, coeff_max: u32, oriented: bool) -> Self {
        assert!(gen_lo <= d, "gen_lo must not exceed d");
        WhParams {
            d,
            gen_lo,
            coeff_max,
            oriented,
            degree_hi: None,
            ops: None,
        }
    }

    pub fn degree_hi(mut self, hi: i32) -> Self {
        self.degree_hi = Some(hi);
        self
    }

    pub fn ops(mut self, ops: OpSet) -> Self {
        self.ops = Some(ops);
        self
    }

    pub fn window(&self) -> DegreeWindow {
        let hi = self.d + self.coeff_max as i32;
        let hi = self.degree_hi.map_or(hi, |h| h.min(hi)).max(self.gen_lo);
        DegreeWindow::new(self.gen_lo, hi, 0)
    }
}

/// Label of `x * wt[l]`: `wt[-4]*w[2]`, or `wt[-4]` when `x = 1`.
pub fn wh_label(l: i32, m: &Monomial) -> String {
    if m.is_one() {
        format!("wt[{l}]")
    } else {
        format!("wt[{l}]*{}", m.render("w"))
    }
}

/// Parses a label produced by [`wh_label`].
pub fn parse_wh_label(s: &str) -> Option<(i32, Monomial)> {
    let rest = s.trim().strip_prefix("wt[")?;
    let (l, tail) = rest.split_once(']')?;
    let l: i32 = l.parse().ok()?;
    let m = match tail.strip_prefix('*') {
        Some(m) => Monomial::parse(m, "w")?,
        None if tail.is_empty() => Monomial::one(),
        None => return None,
    };
    Some((l, m))
}

/// Basis bookkeeping for a truncated `WH` module.
#[derive(Debug)]
pub struct WhLayout {
    pub params: WhParams,
    pub window: DegreeWindow,
    pub ring: Arc<SwRing>,
    /// Per degree, the `(l, coefficient index)` of each basis element.
    pub cells: Vec<Vec<(i32, usize)>>,
    index: Vec<HashMap<(i32, usize), usize>>,
}

impl WhLayout {
    pub fn new(params: &WhParams) -> WhLayout {
        let window = params.window();
        let ring = Arc::new(SwRing::new(params.coeff_max, params.oriented));
        let cells: Vec<Vec<(i32, usize)>> = window
            .degrees()
            .map(|t| {
                let mut c = Vec::new();
                let l_lo = params.gen_lo.max(t - params.coeff_max as i32);
                for l in l_lo..=params.d.min(t) {
                    for i in 0..ring.dim((t - l) as u32) {
                        c.push((l, i));
                    }
                }
                c
            })
            .collect();
        let index = cells
            .iter()
            .map(|c| c.iter().enumerate().map(|(i, &x)| (x, i)).collect())
            .collect();
        WhLayout {
            params: params.clone(),
            window,
            ring,
            cells,
            index,
        }
    }

    pub fn dim(&self, t: i32) -> usize {
        if self.window.contains(t) {
            self.cells[(t - self.window.lo) as usize].len()
        } else {
            0
        }
    }

    pub fn position(&self, t: i32, l: i32, coeff: usize) -> Option<usize> {
        if !self.window.contains(t) {
            return None;
        }
        self.index[(t - self.window.lo) as usize].get(&(l, coeff)).copied()
    }

    pub fn cell(&self, t: i32, i: usize) -> (i32, &Monomial) {
        let (l, c) = self.cells[(t - self.window.lo) as usize][i];
        (l, &self.ring.basis((t - l) as u32)[c])
    }

    pub fn labels(&self) -> Vec<Vec<String>> {
        self.window
            .degrees()
            .map(|t| {
                (0..self.dim(t))
                    .map(|i| {
                        let (l, m) = self.cell(t, i);
                        wh_label(l, m)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Coefficient polynomials `P(b, l, i) = sum_j binom(j - l, i) w_{j-i} wbar_{b-j}`
/// of the twisted action `Sq^b(wt[l]) = sum_i P(b, l, i) wt[l + i]`.
fn twist_coefficient(ring: &SwRing, b: u32, l: i32, i: u32) -> Poly {
    let mut out = ring.zero(b - i);
    if b - i > ring.max_deg {
        return out;
    }
    for j in i..=b {
        if binom_mod2(j as i64 - l as i64, i as i64) {
            out = ring.add(&out, &ring.mul(&ring.w(j - i), ring.wbar(b - j)));
        }
    }
    out
}

/// `Sq^k` of a basis element `x wt[l]` as coordinates in degree `t + k`.
fn wh_sq_column(layout: &WhLayout, table: &HashMap<(u32, i32, u32), Poly>, k: u32, t: i32, col: usize) -> BitVector {
    let ring = &layout.ring;
    let p = &layout.params;
    let target = t + k as i32;
    let mut out = BitVector::zeros(layout.dim(target));
    let (l, c) = layout.cells[(t - layout.window.lo) as usize][col];
    let xdeg = (t - l) as u32;
    let x = Poly {
        degree: xdeg,
        coords: BitVector::unit(ring.dim(xdeg), c),
    };
    for a in 0..=k {
        let sa = ring.sq(a, &x);
        if sa.coords.is_zero() {
            continue;
        }
        let b = k - a;
        for i in 0..=b {
            let li = l + i as i32;
            if li > p.d {
                break;
            }
            let coeff = ring.mul(&sa, &table[&(b, l, i)]);
            for m in coeff.coords.support() {
                if let Some(pos) = layout.position(target, li, m) {
                    out.flip(pos);
                }
            }
        }
    }
    out
}

/// The truncated twisted module `WH(d)*` described by `params`.
pub fn build_wh(params: &WhParams) -> GradedModule {
    let layout = WhLayout::new(params);
    let window = layout.window;
    let ops = params.ops.clone().unwrap_or(OpSet::UpTo(window.span()));
    let max_op = ops.list().last().copied().unwrap_or(0);
    let mut table = HashMap::new();
    for b in 0..=max_op {
        for l in params.gen_lo..=params.d {
            for i in 0..=b {
                table.insert((b, l, i), twist_coefficient(&layout.ring, b, l, i));
            }
        }
    }
    let name = format!(
        "WH{}({}; l >= {}, coeff <= {})",
        if params.oriented { "SO" } else { "O" },
        params.d,
        params.gen_lo,
        params.coeff_max
    );
    GradedModule::from_columns(name, window, layout.labels(), ops, |k, t, i| {
        wh_sq_column(&layout, &table, k, t, i)
    })
}

/// Convenience form of [`build_wh`] with the natural window.
#[allow(non_snake_case)]
pub fn build_WH(d: i32, gen_lo: i32, coeff_max: u32, oriented: bool) -> GradedModule {
    build_wh(&WhParams::new(d, gen_lo, coeff_max, oriented))
}

/// `WH*` for `X = pt`: generators `wt[l]` only, `Sq^k(wt[l]) = binom(k - l, k) wt[l + k]`.
pub fn build_wh_point(gen_lo: i32, d: i32) -> GradedModule {
    let mut m = build_wh(&WhParams::new(d, gen_lo, 0, false));
    m.name = format!("WH(pt)({d}; l >= {gen_lo})");
    m
}

/// Multiplication by `t` on a truncated `WH`: `x wt[l] -> x wt[l + 1]`.
pub fn wh_t_action(params: &WhParams) -> crate::gradmod::ModuleMap {
    let layout = WhLayout::new(params);
    let mut f = crate::gradmod::ModuleMap::new(1);
    for t in layout.window.degrees() {
        let cols: Vec<BitVector> = (0..layout.dim(t))
            .map(|i| {
                let (l, c) = layout.cells[(t - layout.window.lo) as usize][i];
                let mut v = BitVector::zeros(layout.dim(t + 1));
                if let Some(p) = layout.position(t + 1, l + 1, c) {
                    v.set(p, true);
                }
                v
            })
            .collect();
        f.matrices
            .insert(t, crate::f2linalg::BitMatrix::from_columns(layout.dim(t + 1), &cols));
    }
    f
}

/// The Laurent module `Z/2[t, t^-1]` on exponents `[lo, hi]`, `t[l]` in
/// degree `l`, `Sq^k(t^l) = binom(l, k) t^{l + k}`.
pub fn build_laurent(lo: i32, hi: i32) -> GradedModule {
    assert!(lo <= hi, "empty Laurent window");
    let window = DegreeWindow::new(lo, hi, 0);
    let basis = window.degrees().map(|l| vec![format!("t[{l}]")]).collect();
    GradedModule::from_columns(
        "Z/2[t,t^-1]",
        window,
        basis,
        OpSet::UpTo(window.span()),
        |k, l, _| BitVector::from_support(1, binom_mod2(l as i64, k as i64).then_some(0)),
    )
}

/// Periodicity numbers `a_r`: `1, 2, 4, 4, 8, 8, 8, 8` for `r <= 8`, then
/// `a_{r+8} = 16 a_r`.
pub fn clifford_ar(r: u32) -> u64 {
    const TABLE: [u64; 8] = [1, 2, 4, 4, 8, 8, 8, 8];
    assert!(r >= 1, "a_r is defined for r >= 1");
    let (q, rem) = ((r - 1) / 8, (r - 1) % 8);
    TABLE[rem as usize] << (4 * q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradmod::verify_action;

    #[test]
    fn h_bo_dimensions_are_partition_numbers() {
        let m = build_h_bo(6, HboVariant::Plain);
        let dims: Vec<usize> = (0..=4).map(|t| m.dim(t)).collect();
        assert_eq!(dims, vec![1, 1, 2, 3, 5]);
    }

    #[test]
    fn wu_and_thom_examples() {
        let h = build_h_bo(6, HboVariant::Plain);
        let x = h.element(2, &["w[2]"]).unwrap();
        let y = h.apply_sq(1, 2, &x).unwrap();
        assert_eq!(h.render(3, &y), "w[1]*w[2] + w[3]");
        let thom = build_h_bo(6, HboVariant::Thom);
        let u = thom.element(0, &["u"]).unwrap();
        let y = thom.apply_sq(2, 0, &u).unwrap();
        assert_eq!(thom.render(2, &y), "w[1]^2*u + w[2]*u");
    }

    #[test]
    fn builders_satisfy_adem() {
        for m in [
            build_h_bo(10, HboVariant::Plain),
            build_h_bo(10, HboVariant::Oriented),
            build_h_bo(10, HboVariant::Thom),
            build_h_bo(10, HboVariant::ThomOriented),
            build_laurent(-12, 12),
            build_WH(2, -6, 5, false),
            build_WH(2, -6, 5, true),
            build_wh_point(-12, 4),
        ] {
            let v = verify_action(&m);
            assert!(v.is_empty(), "{}: {:?}", m.name, &v[..v.len().min(5)]);
        }
    }

    #[test]
    fn laurent_examples() {
        let m = build_laurent(-4, 4);
        let one = BitVector::unit(1, 0);
        assert_eq!(m.apply_sq(1, 1, &one).unwrap(), one);
        assert_eq!(m.apply_sq(2, -1, &one).unwrap(), one);
        for k in 1..=4 {
            assert!(m.apply_sq(k, 0, &one).unwrap().is_zero());
        }
    }

    #[test]
    fn wh_labels_round_trip() {
        let m = Monomial::from_indices([2]);
        assert_eq!(wh_label(-4, &m), "wt[-4]*w[2]");
        assert_eq!(parse_wh_label("wt[-4]*w[2]"), Some((-4, m)));
        assert_eq!(parse_wh_label("wt[3]"), Some((3, Monomial::one())));
        assert_eq!(parse_wh_label("wt[3]*"), None);
    }

    #[test]
    fn oriented_relation_on_wt0() {
        let m = build_WH(6, -4, 6, true);
        let x = m.element(0, &["wt[0]"]).unwrap();
        let lhs = m.apply_word(&[2, 1, 2], 0, &x).unwrap();
        let w4 = m.element(4, &["wt[4]"]).unwrap();
        let rhs = m.apply_sq(1, 4, &w4).unwrap();
        assert_eq!(lhs, rhs, "{} vs {}", m.render(5, &lhs), m.render(5, &rhs));
        assert!(!lhs.is_zero());
    }

    #[test]
    fn square_class_lifts_into_sq1_kernel() {
        let h = build_h_bo(8, HboVariant::Oriented);
        let m = build_WH(2, -4, 8, true);
        for sq in ["w[2]^2", "w[2]^4", "w[4]^2", "w[2]^2*w[4]^2"] {
            let d = Monomial::parse(sq, "w").unwrap().degree() as i32;
            if d + 2 > 8 {
                continue;
            }
            let s2 = h.apply_sq(2, d, &h.element(d, &[sq]).unwrap()).unwrap();
            let mut labels = vec![format!("wt[0]*{sq}")];
            labels.extend(s2.support().map(|i| format!("wt[-2]*{}", h.basis(d + 2)[i])));
            let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
            let lift = m.element(d, &refs).unwrap();
            let lhs = m.apply_sq(1, d, &lift).unwrap();
            let src = m.element(d - 1, &[&format!("wt[-1]*{sq}")]).unwrap();
            let rhs = m.apply_sq(2, d - 1, &src).unwrap();
            assert_eq!(lhs, rhs, "{sq}: {} vs {}", m.render(d + 1, &lhs), m.render(d + 1, &rhs));
        }
    }

    #[test]
    fn sq1_raises_even_generator() {
        let m = build_WH(6, -6, 4, false);
        for i in -3..=2 {
            let l = 2 * i;
            let x = m.element(l, &[&format!("wt[{l}]")]).unwrap();
            let y = m.apply_sq(1, l, &x).unwrap();
            let pos = m.label_index(l + 1, &format!("wt[{}]", l + 1)).unwrap();
            assert!(y.get(pos), "l = {l}: {}", m.render(l + 1, &y));
        }
    }

    #[test]
    fn clifford_numbers() {
        let a: Vec<u64> = (1..=9).map(clifford_ar).collect();
        assert_eq!(a, vec![1, 2, 4, 4, 8, 8, 8, 8, 16]);
        assert_eq!(clifford_ar(17), 256);
    }
}
