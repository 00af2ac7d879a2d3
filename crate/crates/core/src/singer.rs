//! The Singer construction `R_+ M = Sigma(Z/2[t, t^-1] (x) M)` with its
//! twisted action, the evaluation `epsilon: R_+ M -> M`, and the map `Phi`
//! from the twisted module `WH(X)*` to `R_+ H*(f*MT)` built from the
//! dual squares.
//!
//! `t[b]|x` sits in degree `b + deg(x) + 1`. The exponent range is truncated
//! to `[t_lo, t_hi]`; exponents only grow under the action, so this is a
//! subquotient and the action stays exact.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2linalg::{binom_mod2, BitMatrix, BitVector};
use crate::gradmod::{check_linearity, DegreeWindow, GradedModule, LinearityViolation, ModuleMap, OpSet};
use crate::steenrod::{self, SteenrodElement};

/// Bookkeeping for a truncated Singer construction.
#[derive(Clone, Debug)]
pub struct SingerLayout {
    pub t_lo: i32,
    pub t_hi: i32,
    pub window: DegreeWindow,
    /// Per degree, `(b, source degree, source index)` of each basis element.
    pub cells: Vec<Vec<(i32, i32, usize)>>,
    index: Vec<HashMap<(i32, i32, usize), usize>>,
}

impl SingerLayout {
    pub fn new(m: &GradedModule, t_lo: i32, t_hi: i32) -> SingerLayout {
        assert!(t_lo <= t_hi, "empty exponent range");
        let mw = m.window();
        let window = DegreeWindow::new(t_lo + mw.lo + 1, t_hi + mw.hi + 1, 0);
        let cells: Vec<Vec<(i32, i32, usize)>> = window
            .degrees()
            .map(|deg| {
                let mut c = Vec::new();
                for b in t_lo..=t_hi {
                    let s = deg - b - 1;
                    for i in 0..m.dim(s) {
                        c.push((b, s, i));
                    }
                }
                c
            })
            .collect();
        let index = cells
            .iter()
            .map(|c| c.iter().enumerate().map(|(i, &x)| (x, i)).collect())
            .collect();
        SingerLayout {
            t_lo,
            t_hi,
            window,
            cells,
            index,
        }
    }

    pub fn dim(&self, deg: i32) -> usize {
        if self.window.contains(deg) {
            self.cells[(deg - self.window.lo) as usize].len()
        } else {
            0
        }
    }

    /// Position of `t[b] | (basis element i of M_s)`, if it is in range.
    pub fn position(&self, b: i32, s: i32, i: usize) -> Option<usize> {
        let deg = b + s + 1;
        if !self.window.contains(deg) {
            return None;
        }
        self.index[(deg - self.window.lo) as usize].get(&(b, s, i)).copied()
    }

    pub fn cell(&self, deg: i32, i: usize) -> (i32, i32, usize) {
        self.cells[(deg - self.window.lo) as usize][i]
    }
}

/// `R_+ M` with exponents in `[t_lo, t_hi]` and every `Sq^a` stored.
pub fn singer_construct(m: &GradedModule, t_lo: i32, t_hi: i32) -> GradedModule {
    let layout = SingerLayout::new(m, t_lo, t_hi);
    let window = layout.window;
    let basis = window
        .degrees()
        .map(|deg| {
            (0..layout.dim(deg))
                .map(|i| {
                    let (b, s, j) = layout.cell(deg, i);
                    format!("t[{b}]|{}", m.basis(s)[j])
                })
                .collect()
        })
        .collect();
    GradedModule::from_columns(
        format!("R+({})", m.name),
        window,
        basis,
        OpSet::UpTo(window.span()),
        |a, deg, col| {
            let (b, s, i) = layout.cell(deg, col);
            let mut out = BitVector::zeros(layout.dim(deg + a as i32));
            let x = BitVector::unit(m.dim(s), i);
            for j in 0..=a / 2 {
                if !binom_mod2(b as i64 - j as i64, (a - 2 * j) as i64) {
                    continue;
                }
                let e = a as i32 + b - j as i32;
                let y = m.sq_or_zero(j, s).expect("operation on the source module").mul_vec(&x);
                for yi in y.support() {
                    if let Some(p) = layout.position(e, s + j as i32, yi) {
                        out.flip(p);
                    }
                }
            }
            out
        },
    )
}

/// Multiplication by `t` on a truncated `R_+ M`; exponents above the range
/// are dropped.
pub fn singer_t_action(m: &GradedModule, t_lo: i32, t_hi: i32) -> ModuleMap {
    let layout = SingerLayout::new(m, t_lo, t_hi);
    let mut f = ModuleMap::new(1);
    for deg in layout.window.degrees() {
        let cols: Vec<BitVector> = (0..layout.dim(deg))
            .map(|i| {
                let (b, s, j) = layout.cell(deg, i);
                BitVector::from_support(layout.dim(deg + 1), layout.position(b + 1, s, j))
            })
            .collect();
        f.matrices.insert(deg, BitMatrix::from_columns(layout.dim(deg + 1), &cols));
    }
    f
}

/// `epsilon(t^k (x) x) = Sq^{k+1}(x)` on the degrees of `R_+ M` inside the
/// window of `M`. `Sq^{<0}` is zero; an operation `M` cannot evaluate is an
/// error rather than a silent zero.
pub fn epsilon(m: &GradedModule, t_lo: i32, t_hi: i32) -> Result<ModuleMap> {
    let layout = SingerLayout::new(m, t_lo, t_hi);
    let mw = m.window();
    let mut f = ModuleMap::new(0);
    for deg in layout.window.degrees().filter(|&d| mw.contains(d)) {
        let cols = (0..layout.dim(deg))
            .map(|i| {
                let (b, s, j) = layout.cell(deg, i);
                let k = b + 1;
                if k < 0 {
                    return Ok(BitVector::zeros(m.dim(deg)));
                }
                m.apply_sq(k as u32, s, &BitVector::unit(m.dim(s), j))
            })
            .collect::<Result<Vec<_>>>()?;
        f.matrices.insert(deg, BitMatrix::from_columns(m.dim(deg), &cols));
    }
    Ok(f)
}

/// Evaluates `epsilon` on `t[k] | x` directly.
pub fn epsilon_on(m: &GradedModule, k: i32, s: i32, x: &BitVector) -> Result<BitVector> {
    if k + 1 < 0 {
        return Ok(BitVector::zeros(m.dim(s + k + 1)));
    }
    m.apply_sq((k + 1) as u32, s, x)
}

/// `epsilon` is A-linear: violations of `epsilon Sq^a = Sq^a epsilon` for
/// `a <= max_a`.
pub fn epsilon_linearity(m: &GradedModule, t_lo: i32, t_hi: i32, max_a: u32) -> Result<Vec<LinearityViolation>> {
    let r = singer_construct(m, t_lo, t_hi);
    let eps = epsilon(m, t_lo, t_hi)?;
    Ok(check_linearity(&eps, &r, m, max_a))
}

/// Violations of `Sq^k(t x) = t Sq^k(x) + t^2 Sq^{k-1}(x)` for `k <= max_k`
/// and every basis element `x` whose degrees stay in the window.
pub fn t_relation_violations(m: &GradedModule, t: &ModuleMap, max_k: u32) -> Vec<(u32, i32, usize)> {
    t_relation_check(m, t, max_k).1
}

/// As [`t_relation_violations`], also returning the number of cases checked.
pub fn t_relation_check(m: &GradedModule, t: &ModuleMap, max_k: u32) -> (usize, Vec<(u32, i32, usize)>) {
    let w = m.window();
    let mut out = Vec::new();
    let mut checked = 0;
    let tmap = |deg: i32, v: &BitVector| t.apply(deg, v);
    for deg in w.degrees() {
        for k in 1..=max_k {
            let top = deg + k as i32 + 1;
            if !w.contains(top) || !w.contains(deg + 1) {
                continue;
            }
            for i in 0..m.dim(deg) {
                let x = BitVector::unit(m.dim(deg), i);
                let (Some(tx), Ok(sk)) = (tmap(deg, &x), m.sq(k, deg)) else { continue };
                let Ok(lhs) = m.apply_sq(k, deg + 1, &tx) else { continue };
                let skx = sk.mul_vec(&x);
                let Some(mut rhs) = tmap(deg + k as i32, &skx) else { continue };
                let Ok(sk1) = m.apply_sq(k - 1, deg, &x) else { continue };
                let Some(t1) = tmap(deg + k as i32 - 1, &sk1) else { continue };
                let Some(t2) = tmap(deg + k as i32, &t1) else { continue };
                rhs.xor_assign(&t2);
                checked += 1;
                if lhs != rhs {
                    out.push((k, deg, i));
                }
            }
        }
    }
    (checked, out)
}

/// The components `phi_r : M_s -> M_{s+r}` and the assembled map.
#[derive(Clone, Debug)]
pub struct PhiData {
    /// `phi_r` on `M_s`, keyed by `(r, s)`.
    pub components: BTreeMap<(u32, i32), BitMatrix>,
    pub map: ModuleMap,
    pub t_lo: i32,
    pub t_hi: i32,
}

/// The dual-square operator matrix of size `n`: entry `(i, j)` is
/// `chi(Sq^{j-i})` above the diagonal, 1 on it.
pub fn chi_matrix(n: usize) -> Vec<Vec<SteenrodElement>> {
    op_matrix(n, steenrod::antipode_chi)
}

/// The operator matrix with entries `Sq^{j-i}`.
pub fn sq_matrix(n: usize) -> Vec<Vec<SteenrodElement>> {
    op_matrix(n, SteenrodElement::sq)
}

fn op_matrix(n: usize, entry: impl Fn(u32) -> SteenrodElement) -> Vec<Vec<SteenrodElement>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if j < i {
                        SteenrodElement::zero(0)
                    } else {
                        entry((j - i) as u32)
                    }
                })
                .collect()
        })
        .collect()
}

/// Product of operator matrices; entry `(i, k)` of degree `k - i`.
pub fn op_matrix_product(a: &[Vec<SteenrodElement>], b: &[Vec<SteenrodElement>]) -> Vec<Vec<SteenrodElement>> {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|k| {
                    let mut acc = SteenrodElement::zero(k.saturating_sub(i) as u32);
                    for j in i..=k {
                        if a[i][j].is_zero() || b[j][k].is_zero() {
                            continue;
                        }
                        acc.add_assign(&a[i][j].product(&b[j][k]));
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Whether an operator matrix is the identity.
pub fn is_identity(m: &[Vec<SteenrodElement>]) -> bool {
    m.iter().enumerate().all(|(i, row)| {
        row.iter().enumerate().all(|(j, e)| {
            if i == j {
                *e == SteenrodElement::one()
            } else {
                e.is_zero()
            }
        })
    })
}

/// `phi_r = sum_{r' <= r} chi(Sq^{r - r'}) (x w_{r'})`, solving the
/// triangular system `sum_i Sq^{l-i} phi_i(x) = x w_l` by the dual squares.
/// `w_mult(r, s)` is multiplication by `w_r` from `M_s` to `M_{s+r}`.
pub fn phi_components(
    m: &GradedModule,
    w_mult: &dyn Fn(u32, i32) -> BitMatrix,
    max_r: u32,
) -> Result<BTreeMap<(u32, i32), BitMatrix>> {
    let mw = m.window();
    let mut out = BTreeMap::new();
    for s in mw.degrees() {
        for r in 0..=max_r {
            let target = s + r as i32;
            if !mw.contains(target) {
                break;
            }
            let mut acc = BitMatrix::zeros(m.dim(target), m.dim(s));
            for rp in 0..=r {
                let wm = w_mult(rp, s);
                let chi = steenrod::antipode_chi(r - rp);
                let cols = (0..m.dim(s))
                    .map(|i| m.apply(&chi, s + rp as i32, &wm.column(i)))
                    .collect::<Result<Vec<_>>>()?;
                acc = acc.add(&BitMatrix::from_columns(m.dim(target), &cols));
            }
            out.insert((r, s), acc);
        }
    }
    Ok(out)
}

/// Builds `Phi(x wt[l]) = sum_r t^{l-1-r} (x) phi_r(x)` from a source whose
/// basis element `i` in degree `deg` is `x wt[l]` with `x` the `j`-th basis
/// element of `M_s`, as described by `cell(deg, i) = (l, s, j)`.
pub fn build_phi(
    source: &GradedModule,
    cell: &dyn Fn(i32, usize) -> (i32, i32, usize),
    m: &GradedModule,
    w_mult: &dyn Fn(u32, i32) -> BitMatrix,
    t_lo: i32,
    t_hi: i32,
) -> Result<PhiData> {
    let mw = m.window();
    let components = phi_components(m, w_mult, mw.span())?;
    let layout = SingerLayout::new(m, t_lo, t_hi);
    let mut map = ModuleMap::new(0);
    for deg in source.window().degrees() {
        let mut cols = Vec::new();
        for i in 0..source.dim(deg) {
            let (l, s, j) = cell(deg, i);
            let mut v = BitVector::zeros(layout.dim(deg));
            for r in 0..=mw.span() {
                let Some(phi) = components.get(&(r, s)) else { continue };
                let y = phi.column(j);
                let b = l - 1 - r as i32;
                for yi in y.support() {
                    if b > t_hi {
                        continue;
                    }
                    let p = layout.position(b, s + r as i32, yi).ok_or_else(|| {
                        Error::WindowTooSmall(format!("t[{b}] below the exponent range [{t_lo}, {t_hi}]"))
                    })?;
                    v.flip(p);
                }
            }
            cols.push(v);
        }
        map.matrices.insert(deg, BitMatrix::from_columns(layout.dim(deg), &cols));
    }
    Ok(PhiData {
        components,
        map,
        t_lo,
        t_hi,
    })
}

/// `Phi` for `X = pt`: `WH(pt)` with generators `wt[l]`, `l in [lo, hi]`,
/// into `R_+ F2` with exponents `[lo - 1, hi - 1]`.
pub fn build_phi_point(lo: i32, hi: i32) -> Result<(GradedModule, GradedModule, PhiData)> {
    let wh = crate::classical::build_wh_point(lo, hi);
    let f2 = crate::gradmod::trivial_module();
    let zero_w = |r: u32, s: i32| {
        if r == 0 {
            BitMatrix::identity(f2.dim(s))
        } else {
            BitMatrix::zeros(f2.dim(s + r as i32), f2.dim(s))
        }
    };
    let cell = |deg: i32, _i: usize| (deg, 0, 0);
    let phi = build_phi(&wh, &cell, &f2, &zero_w, lo - 1, hi - 1)?;
    let r = singer_construct(&f2, lo - 1, hi - 1);
    Ok((wh, r, phi))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PhiReport {
    pub linearity_violations: usize,
    pub non_bijective_degrees: Vec<i32>,
    pub t_action_violations: usize,
    /// `Phi(wt[k])` has top exponent exactly `k - 1`.
    pub triangular: bool,
    /// `epsilon Phi` is the projection `x wt[l] -> x w_l`.
    pub projection: bool,
}

impl PhiReport {
    pub fn pass(&self) -> bool {
        self.linearity_violations == 0
            && self.non_bijective_degrees.is_empty()
            && self.t_action_violations == 0
            && self.triangular
            && self.projection
    }
}

/// Checks `Phi` for `X = pt` on `[lo, hi]`: A-linearity for `Sq^k`,
/// `k <= max_k`, bijectivity on the interior `[lo + margin, hi - margin]`,
/// commutation with `t`, triangularity, and `epsilon Phi = projection`.
pub fn verify_phi_point(wh: &GradedModule, r: &GradedModule, phi: &PhiData, max_k: u32, margin: u32) -> Result<PhiReport> {
    let w = wh.window();
    let linearity_violations = check_linearity(&phi.map, wh, r, max_k).len();
    let non_bijective_degrees = (w.lo + margin as i32..=w.hi - margin as i32)
        .filter(|&d| {
            let m = phi.map.at(d).expect("Phi defined on the window");
            !(m.rows() == m.cols() && m.rank() == m.cols())
        })
        .collect();
    let f2 = crate::gradmod::trivial_module();
    let tr = singer_t_action(&f2, phi.t_lo, phi.t_hi);
    let params = crate::classical::WhParams::new(w.hi, w.lo, 0, false);
    let tw = crate::classical::wh_t_action(&params);
    let mut t_action_violations = 0;
    for d in w.lo..w.hi {
        let lhs = phi.map.at(d + 1).expect("Phi").mul(tw.at(d).expect("t on WH"));
        let rhs = tr.at(d).expect("t on R+").mul(phi.map.at(d).expect("Phi"));
        if lhs != rhs {
            t_action_violations += 1;
        }
    }
    let layout = SingerLayout::new(&f2, phi.t_lo, phi.t_hi);
    let triangular = w.degrees().all(|d| {
        let v = phi.map.at(d).expect("Phi").column(0);
        let top = v.support().map(|i| layout.cell(d, i).0).max();
        top == Some(d - 1)
    });
    let eps = epsilon(&f2, phi.t_lo, phi.t_hi)?;
    let projection = w.degrees().all(|d| {
        let image = eps.at(d).map(|e| e.mul(phi.map.at(d).expect("Phi")));
        let expected = (d == 0) as usize;
        match image {
            Some(m) => m.column(0).count_ones() == expected,
            None => expected == 0,
        }
    });
    Ok(PhiReport {
        linearity_violations,
        non_bijective_degrees,
        t_action_violations,
        triangular,
        projection,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{build_h_bo, build_wh, wh_t_action, HboVariant, WhParams};
    use crate::gradmod::{trivial_module, verify_action};

    #[test]
    fn formula_examples() {
        let h = build_h_bo(4, HboVariant::Plain);
        let r = singer_construct(&h, -3, 4);
        for (x, deg) in [("w[1]", 1), ("w[2]", 2), ("w[1]^2", 2)] {
            let v = r.element(deg + 2, &[&format!("t[1]|{x}")]).unwrap();
            let y = r.apply_sq(1, deg + 2, &v).unwrap();
            assert_eq!(r.render(deg + 3, &y), format!("t[2]|{x}"));
            let v0 = r.element(deg + 1, &[&format!("t[0]|{x}")]).unwrap();
            assert!(r.apply_sq(1, deg + 1, &v0).unwrap().is_zero());
        }
        // Sq^2(t (x) w1) = t^2 (x) Sq^1 w1 = t^2 (x) w1^2.
        let v = r.element(3, &["t[1]|w[1]"]).unwrap();
        assert_eq!(r.render(5, &r.apply_sq(2, 3, &v).unwrap()), "t[2]|w[1]^2");
    }

    #[test]
    fn singer_modules_are_sound() {
        for m in [trivial_module(), build_h_bo(6, HboVariant::Thom)] {
            let r = singer_construct(&m, -6, 6);
            assert!(verify_action(&r).is_empty(), "{}", r.name);
        }
    }

    #[test]
    fn epsilon_values() {
        let h = build_h_bo(6, HboVariant::Thom);
        let x = h.element(2, &["w[2]*u"]).unwrap();
        assert_eq!(epsilon_on(&h, 0, 2, &x).unwrap(), h.apply_sq(1, 2, &x).unwrap());
        assert_eq!(epsilon_on(&h, -1, 2, &x).unwrap(), x);
        assert!(epsilon_on(&h, -2, 2, &x).unwrap().is_zero());
    }

    #[test]
    fn epsilon_is_linear() {
        assert!(epsilon_linearity(&trivial_module(), -10, 10, 8).unwrap().is_empty());
        let h = build_h_bo(6, HboVariant::Thom);
        assert!(epsilon_linearity(&h, -8, 8, 6).unwrap().is_empty());
    }

    #[test]
    fn epsilon_negative_control() {
        let h = build_h_bo(6, HboVariant::Thom);
        let r = singer_construct(&h, -6, 6);
        let mut eps = epsilon(&h, -6, 6).unwrap();
        eps.matrices.get_mut(&2).unwrap().flip(0, 0);
        assert!(!check_linearity(&eps, &r, &h, 4).is_empty());
    }

    #[test]
    fn t_relation_holds() {
        let h = build_h_bo(6, HboVariant::Thom);
        let r = singer_construct(&h, -4, 4);
        let t = singer_t_action(&h, -4, 4);
        assert!(t_relation_violations(&r, &t, 6).is_empty());
        let params = WhParams::new(2, -6, 5, false);
        let wh = build_wh(&params);
        assert!(t_relation_violations(&wh, &wh_t_action(&params), 6).is_empty());
    }

    #[test]
    fn dual_square_matrix_inverts() {
        for n in 1..=8 {
            assert!(is_identity(&op_matrix_product(&sq_matrix(n), &chi_matrix(n))), "size {n}");
            assert!(is_identity(&op_matrix_product(&chi_matrix(n), &sq_matrix(n))), "size {n}");
        }
    }

    #[test]
    fn phi_for_a_point() {
        let (wh, r, phi) = build_phi_point(-8, 8).unwrap();
        for l in -8..=8 {
            let v = phi.map.at(l).unwrap().column(0);
            assert_eq!(r.render(l, &v), format!("t[{}]|1", l - 1));
        }
        let rep = verify_phi_point(&wh, &r, &phi, 8, 0).unwrap();
        assert!(rep.pass(), "{rep:?}");
    }

    #[test]
    fn perturbed_phi_is_not_linear() {
        let (wh, r, mut phi) = build_phi_point(-6, 6).unwrap();
        phi.map.matrices.get_mut(&1).unwrap().flip(0, 0);
        assert!(verify_phi_point(&wh, &r, &phi, 6, 0).unwrap().linearity_violations > 0);
    }

    #[test]
    fn phi_components_with_classes() {
        // For H*(MTO) with multiplication by w_r, the components solve the
        // triangular system: sum_i Sq^{l-i} phi_i(x) = x w_l.
        let ring = crate::classical::SwRing::new(6, false);
        let h = build_h_bo(6, HboVariant::Thom);
        let w_mult = |r: u32, s: i32| {
            let cols: Vec<BitVector> = (0..ring.dim(s as u32))
                .map(|i| {
                    let x = crate::classical::Poly { degree: s as u32, coords: BitVector::unit(ring.dim(s as u32), i) };
                    if s as u32 + r > 6 {
                        BitVector::zeros(0)
                    } else {
                        ring.mul(&x, &ring.w(r)).coords
                    }
                })
                .collect();
            BitMatrix::from_columns(h.dim(s + r as i32), &cols)
        };
        let comps = phi_components(&h, &w_mult, 6).unwrap();
        for s in 0..=6 {
            for l in 0..=(6 - s) as u32 {
                let mut acc = BitMatrix::zeros(h.dim(s + l as i32), h.dim(s));
                for i in 0..=l {
                    let sq = h.sq(l - i, s + i as i32).unwrap();
                    acc = acc.add(&sq.mul(&comps[&(i, s)]));
                }
                assert_eq!(acc, w_mult(l, s), "l = {l}, s = {s}");
            }
        }
    }
}
