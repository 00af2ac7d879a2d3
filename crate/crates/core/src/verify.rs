//! The acceptance suite: twelve checks on exact windowed algebra. Each check
//! reports a pass flag, the number of cases it examined and the first few
//! failures.

use serde::Serialize;

use crate::classical::pairing_checks::pairing_suite;
use crate::classical::xi2::{xi2_on_h, xi2_product_value};
use crate::classical::{
    build_WH, build_h_bo, build_laurent, build_wh, build_wh_adic, clifford_ar, partitions, series_identities,
    wh_t_action, xi2_functional, xi_monomial_rank, HboVariant, Monomial, WhParams,
};
use crate::ehp::{apply_d1, build_e1, stems_from_resolution};
use crate::error::Result;
use crate::extcalc::{hom_a_dims, minimal_resolution, predicted_dims, resolution_over_an, Boundary, Predicted};
use crate::gradmod::{
    freeness_check, indecomposables, sq1_homology, sq1_kernel_on_indecomposables, trivial_module, verify_action,
    GradedModule, Level, OpSet,
};
use crate::singer::{
    build_phi_point, chi_matrix, epsilon_linearity, is_identity, op_matrix_product, singer_construct,
    singer_t_action, sq_matrix, t_relation_check, verify_phi_point,
};
use crate::steenrod::{antipode_chi, basis, product, subalgebra, SteenrodElement};

const MAX_REPORTED: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!("[{verdict}] {:>2} {} ({} cases)", self.id, self.title, self.cases);
        if let Some(f) = self.failures.first() {
            s.push_str(&format!(": {f}"));
        }
        s
    }
}

pub const TITLES: [&str; 12] = [
    "Steenrod algebra: basis counts, antipode recursion, A(1) and A(2)",
    "module actions satisfy the Adem relations",
    "point values of the concrete modules",
    "t-action relation on WH and on the Singer construction",
    "Singer map epsilon and the isomorphism Phi for a point",
    "evaluation pairing identities",
    "inverse series identities",
    "xi_2 functionals: lift independence, products, independence",
    "freeness, Tor vanishing and indecomposables of WH",
    "oriented WH: Sq^1-homology and Tor against K_1",
    "Ext of the sphere",
    "EHP pages for a point",
];

struct Tally {
    cases: usize,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Tally {
            cases: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            if self.failures.len() < MAX_REPORTED {
                self.failures.push(what());
            } else if self.failures.len() == MAX_REPORTED {
                self.failures.push("...".into());
            }
        }
    }

    fn result<T>(&mut self, r: Result<T>, what: &str) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.check(false, || format!("{what}: {e}"));
                None
            }
        }
    }
}

pub fn run(id: u32) -> Option<CheckOutcome> {
    let body: fn(&mut Tally) = match id {
        1 => steenrod_soundness,
        2 => module_soundness,
        3 => point_values,
        4 => t_relation,
        5 => singer_and_phi,
        6 => pairing_identities,
        7 => series,
        8 => xi2_inversion,
        9 => freeness_and_indecomposables,
        10 => oriented_case,
        11 => sphere_ext,
        12 => ehp_page,
        _ => return None,
    };
    let mut t = Tally::new();
    body(&mut t);
    Some(CheckOutcome {
        id,
        title: TITLES[id as usize - 1],
        pass: t.failures.is_empty() && t.cases > 0,
        cases: t.cases,
        failures: t.failures,
    })
}

pub fn run_all() -> Vec<CheckOutcome> {
    (1..=12).filter_map(run).collect()
}

/// Number of Milnor basis elements `Sq(r_1, r_2, ...)` of degree `n`:
/// solutions of `sum r_i (2^i - 1) = n`.
pub fn milnor_count(n: u32) -> usize {
    let mut ways = vec![0usize; n as usize + 1];
    ways[0] = 1;
    let mut w = 1usize;
    while w <= n as usize {
        for d in w..=n as usize {
            ways[d] += ways[d - w];
        }
        w = 2 * w + 1;
    }
    ways[n as usize]
}

fn steenrod_soundness(t: &mut Tally) {
    for n in 0..=20 {
        let (got, want) = (basis(n).len(), milnor_count(n));
        t.check(got == want, || format!("degree {n}: {got} admissible vs {want} Milnor"));
    }
    for k in 1..=24 {
        let mut acc = SteenrodElement::zero(k);
        for i in 0..=k {
            acc.add_assign(&product(&antipode_chi(i), &SteenrodElement::sq(k - i)));
        }
        t.check(acc.is_zero(), || format!("antipode recursion fails at k = {k}"));
    }
    for (n, want) in [(1, 8), (2, 64)] {
        let got = subalgebra(n).total_dim();
        t.check(got == want, || format!("A({n}) has dimension {got}"));
    }
}

fn sound(t: &mut Tally, m: &GradedModule) {
    let v = verify_action(m);
    t.check(m.total_dim() > 0 && v.is_empty(), || format!("{}: {} Adem violations", m.name, v.len()));
}

fn module_soundness(t: &mut Tally) {
    let bo = build_h_bo(12, HboVariant::Plain);
    let mto = build_h_bo(12, HboVariant::Thom);
    for m in [
        &bo,
        &mto,
        &build_WH(2, -12, 8, false),
        &build_WH(2, -12, 8, true),
        &build_laurent(-12, 12),
    ] {
        sound(t, m);
    }
    // R_+ applies to bounded-below modules.
    sound(t, &singer_construct(&trivial_module(), -12, 12));
    sound(t, &singer_construct(&build_h_bo(8, HboVariant::Plain), -8, 8));
    sound(t, &singer_construct(&build_h_bo(8, HboVariant::Thom), -8, 8));
}

fn render_check(t: &mut Tally, what: &str, got: Result<String>, want: &str) {
    if let Some(g) = t.result(got, what) {
        t.check(g == want, || format!("{what}: {g} instead of {want}"));
    }
}

fn point_values(t: &mut Tally) {
    let h = build_h_bo(6, HboVariant::Plain);
    render_check(
        t,
        "Sq^1 w[2]",
        h.element(2, &["w[2]"]).and_then(|x| h.apply_sq(1, 2, &x)).map(|y| h.render(3, &y)),
        "w[1]*w[2] + w[3]",
    );
    let th = build_h_bo(6, HboVariant::Thom);
    render_check(
        t,
        "Sq^2 u",
        th.element(0, &["u"]).and_then(|x| th.apply_sq(2, 0, &x)).map(|y| th.render(2, &y)),
        "w[1]^2*u + w[2]*u",
    );
    for p in ["w[2]", "w[1]^2"] {
        let m = Monomial::parse(p, "w").expect("label");
        t.check(xi2_on_h(1, &m), || format!("xi_2 vanishes on {p}"));
    }

    let wh = build_WH(6, -4, 6, true);
    let sides = wh.element(0, &["wt[0]"]).and_then(|x| wh.apply_word(&[2, 1, 2], 0, &x)).and_then(|lhs| {
        let rhs = wh.element(4, &["wt[4]"]).and_then(|y| wh.apply_sq(1, 4, &y))?;
        Ok((lhs, rhs))
    });
    if let Some((lhs, rhs)) = t.result(sides, "Sq^2 Sq^1 Sq^2 wt[0]") {
        t.check(lhs == rhs && !lhs.is_zero(), || {
            format!("Sq^2 Sq^1 Sq^2 wt[0] = {} but Sq^1 wt[4] = {}", wh.render(5, &lhs), wh.render(5, &rhs))
        });
    }

    // The lift wt[0] w^2 + wt[-2] Sq^2(w^2) of w = w[2] satisfies
    // Sq^1(lift) = Sq^2(wt[-1] w^2).
    let ho = build_h_bo(8, HboVariant::Oriented);
    let wo = build_WH(2, -4, 8, true);
    let sq = "w[2]^2";
    let lift = (|| {
        let s2 = ho.apply_sq(2, 4, &ho.element(4, &[sq])?)?;
        let mut labels = vec![format!("wt[0]*{sq}")];
        labels.extend(s2.support().map(|i| format!("wt[-2]*{}", ho.basis(6)[i])));
        let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
        let lhs = wo.apply_sq(1, 4, &wo.element(4, &refs)?)?;
        let rhs = wo.apply_sq(2, 3, &wo.element(3, &[&format!("wt[-1]*{sq}")])?)?;
        Ok((lhs, rhs))
    })();
    if let Some((lhs, rhs)) = t.result(lift, "lift of w[2]^2") {
        t.check(lhs == rhs, || format!("lift of w[2]^2: {} vs {}", wo.render(5, &lhs), wo.render(5, &rhs)));
    }

    let table: Vec<u64> = (1..=9).map(clifford_ar).collect();
    t.check(table == [1, 2, 4, 4, 8, 8, 8, 8, 16], || format!("a_r for r = 1..9: {table:?}"));
}

fn t_relation(t: &mut Tally) {
    let params = WhParams::new(2, -12, 8, false);
    let (n, v) = t_relation_check(&build_wh(&params), &wh_t_action(&params), 8);
    t.check(n > 0 && v.is_empty(), || format!("WH: {} of {n} cases fail, first {:?}", v.len(), v.first()));
    let h = build_h_bo(8, HboVariant::Thom);
    let r = singer_construct(&h, -8, 8);
    let (n, v) = t_relation_check(&r, &singer_t_action(&h, -8, 8), 8);
    t.check(n > 0 && v.is_empty(), || format!("R+ H*(MTO): {} of {n} cases fail, first {:?}", v.len(), v.first()));
}

fn singer_and_phi(t: &mut Tally) {
    for (m, lo, hi) in [(trivial_module(), -12, 12), (build_h_bo(8, HboVariant::Thom), -8, 8)] {
        if let Some(v) = t.result(epsilon_linearity(&m, lo, hi, 8), "epsilon") {
            t.check(v.is_empty(), || format!("epsilon on R+ {}: {} violations", m.name, v.len()));
        }
    }
    let phi = build_phi_point(-12, 12).and_then(|(wh, r, phi)| verify_phi_point(&wh, &r, &phi, 8, 0));
    if let Some(rep) = t.result(phi, "Phi") {
        t.check(rep.pass(), || format!("Phi: {rep:?}"));
    }
    for n in 1..=8 {
        let (a, b) = (sq_matrix(n), chi_matrix(n));
        t.check(is_identity(&op_matrix_product(&a, &b)), || format!("dual squares are not a right inverse at size {n}"));
        t.check(is_identity(&op_matrix_product(&b, &a)), || format!("dual squares are not a left inverse at size {n}"));
    }
}

fn pairing_identities(t: &mut Tally) {
    for c in pairing_suite() {
        t.check(c.pass(), || format!("{}: {:?}", c.name, c.failures.first()));
    }
}

fn series(t: &mut Tally) {
    let r = series_identities(3);
    t.check(r.pass, || format!("{r:?}"));
}

fn monomials(deg: i32) -> Vec<Monomial> {
    match deg {
        d if d < 0 => Vec::new(),
        0 => vec![Monomial::one()],
        d => partitions(d as u32, 1, d as u16),
    }
}

fn xi2_inversion(t: &mut Tally) {
    // Functionals are evaluated at three lift sizes; disagreement is an error.
    for e in -4..=4 {
        for i in 0..=10 {
            for p in monomials(i) {
                let l = 2 * e - i;
                t.check(xi2_functional(e, l, &p).is_ok(), || format!("xi_2^{e} on wt[{l}]*{}", p.render("w")));
            }
        }
    }
    // xi_2^m . xi_2^{-n} = xi_2^{m-n} on the basis of WH(2), gen_lo = -12, coeff <= 8.
    for m in 0..=3u32 {
        for n in 0..=3i32 {
            let e = m as i32 - n;
            for l in -12..=2 {
                for p in monomials(2 * e - l).into_iter().filter(|p| p.degree() <= 8) {
                    let lhs = xi2_product_value(m, -n, l, &p);
                    let rhs = xi2_functional(e, l, &p);
                    match (lhs, rhs) {
                        (Ok(a), Ok(b)) => t.check(a == b, || format!("m = {m}, n = {n} on wt[{l}]*{}", p.render("w"))),
                        (Err(err), _) | (_, Err(err)) => t.check(false, || err.to_string()),
                    }
                }
            }
        }
    }
    for deg in -4..=8 {
        if let Some(r) = t.result(xi_monomial_rank(deg, -2, 2, -12), "rank") {
            t.check(r.rank == r.functionals, || format!("degree {deg}: rank {} of {}", r.rank, r.functionals));
        }
    }
}

fn freeness_and_indecomposables(t: &mut Tally) {
    let (l, hi) = (-4, 14);
    if let Some(piece) = t.result(build_wh_adic(l, hi, Some(OpSet::PowersOfTwo(16))), "Ann(I_-4)") {
        let m = &piece.module;
        for n in [1, 2] {
            if let Some(rep) = t.result(freeness_check(m, n, 2 * l, hi), "freeness") {
                t.check(rep.pass(), || format!("not free over A({n}): {:?}", rep.first_failure()));
            }
        }
        if let Some(r) = t.result(resolution_over_an(m, 1, 2, hi, None), "A(1) resolution") {
            for s in 1..=2 {
                for deg in 2 * l..=r.valid_top(s) {
                    let g = r.generators(s, deg);
                    t.check(g == 0, || format!("Tor_({s},{deg}) over A(1) is {g}"));
                }
            }
        }
    }

    let mto = build_h_bo(12, HboVariant::Thom);
    let want = [1, 0, 1, 0, 2, 1, 3];
    for (deg, &w) in want.iter().enumerate() {
        let deg = deg as i32;
        let oracle = predicted_dims(Predicted::MtoHom, deg);
        if let Some(got) = t.result(hom_a_dims(&mto, deg), "H*(MTO) indecomposables") {
            t.check(got == w && oracle == w, || format!("t = {deg}: {got} indecomposables, count {oracle}, expected {w}"));
        }
    }

    // Lowering the bottom generator from 2l to 2l - 2 adds indecomposables
    // counted by the monomials attached to l - 1.
    let (lo, top) = (-6, 6);
    let dims: Vec<Option<Vec<usize>>> = [-4, -5, -6]
        .into_iter()
        .map(|l| {
            let piece = t.result(build_wh_adic(l, top, Some(OpSet::PowersOfTwo(32))), "Ann(I_l)")?;
            let slices: Result<Vec<usize>> =
                (lo..=top).map(|d| indecomposables(&piece.module, Level::Full, d).map(|s| s.dim)).collect();
            t.result(slices, "indecomposables")
        })
        .collect();
    for (i, l) in [-4, -5].into_iter().enumerate() {
        let (Some(a), Some(b)) = (&dims[i], &dims[i + 1]) else { continue };
        for (j, deg) in (lo..=top).enumerate() {
            let inc = b[j] as i64 - a[j] as i64;
            let want = predicted_dims(Predicted::WhHom { l_lo: l - 1, l_hi: l - 1 }, deg) as i64;
            t.check(inc == want, || format!("gen_lo {} -> {}, t = {deg}: increment {inc}, predicted {want}", 2 * l, 2 * l - 2));
        }
    }
}

fn oriented_case(t: &mut Tally) {
    let (d, gen_lo) = (2, -12);
    let m = build_WH(d, gen_lo, 8, true);
    for deg in gen_lo..d {
        if let Some(h) = t.result(sq1_homology(&m, deg), "Sq^1-homology") {
            t.check(h == 0, || format!("Sq^1-homology in degree {deg} is {h}"));
        }
    }

    let hi = 20;
    let params = WhParams::new(hi, gen_lo, (hi - gen_lo) as u32, true)
        .degree_hi(hi)
        .ops(OpSet::PowersOfTwo(2));
    let m = build_wh(&params);
    let Some(r) = t.result(resolution_over_an(&m, 1, 3, 8, None), "A(1) resolution") else { return };
    for s in 1..=3u32 {
        for stem in -4..=6 {
            let deg = stem + s as i32;
            if !r.is_valid(s, deg) {
                continue;
            }
            let tor = r.generators(s, deg);
            if let Some(k) = t.result(sq1_kernel_on_indecomposables(&m, 1, stem), "K_1") {
                t.check(tor == k, || format!("Tor_({s},{deg}) = {tor} but K_1 in degree {stem} is {k}"));
            }
        }
    }
}

fn sphere_ext(t: &mut Tally) {
    let charts: Vec<_> = [11, 12]
        .into_iter()
        .filter_map(|seed| {
            let r = minimal_resolution(&trivial_module(), Boundary::Exact, 6, 14, Some(seed));
            t.result(r, "sphere resolution").map(|r| r.chart())
        })
        .collect();
    let Some(c) = charts.first() else { return };
    for s in 0..=6 {
        let got = c.dim(s, s as i32);
        t.check(got == Some(1), || format!("Ext^({s},{s}) = {got:?}"));
    }
    for deg in 1..=14 {
        let want = usize::from([1, 2, 4, 8].contains(&deg));
        let got = c.dim(1, deg);
        t.check(got == Some(want), || format!("Ext^(1,{deg}) = {got:?}"));
    }
    if let [a, b] = &charts[..] {
        t.check(a.same_dims(b), || "charts differ between generator orderings".into());
    }
}

fn ehp_page(t: &mut Tally) {
    let Some(stems) = t.result(stems_from_resolution(7), "stem table") else { return };
    for (d, r) in [(4, 4), (9, 6), (0, 5), (-3, 7), (12, 10)] {
        let Some(p) = t.result(build_e1(d, r, &stems), "E1") else { continue };
        let lo = d - r as i64;
        for s in lo - 3..=d + 3 {
            for row in -2..=stems.max_stem() as i64 + 2 {
                let outside = s <= lo || s > d || row < 0 || row > stems.max_stem() as i64;
                if outside {
                    t.check(p.group(s, row).is_zero(), || format!("E1 nonzero at ({s},{row}) for d = {d}, r = {r}"));
                }
            }
        }
        let e2 = apply_d1(&p);
        for s in lo + 2..d {
            let got = e2.group(s, 0).map(|g| g.to_string()).unwrap_or_default();
            let want = if s % 2 == 0 { "0" } else { "Z/2" };
            t.check(got == want, || format!("bottom-row E2 at s = {s} (d = {d}, r = {r}) is {got}"));
        }
        let Some(q) = t.result(build_e1(d + 2, r, &stems), "E1") else { continue };
        for s in p.columns() {
            for row in p.rows() {
                t.check(p.d1(s, row) == q.d1(s + 2, row), || format!("d1 changes under the shift at ({s},{row})"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn milnor_counts() {
        let c: Vec<usize> = (0..=10).map(milnor_count).collect();
        assert_eq!(c, [1, 1, 1, 2, 2, 2, 3, 4, 4, 5, 6]);
        let brute = (0..=20u32)
            .flat_map(|a| (0..=6u32).flat_map(move |b| (0..=2u32).flat_map(move |c| (0..=1u32).map(move |d| (a, b, c, d)))))
            .filter(|&(a, b, c, d)| a + 3 * b + 7 * c + 15 * d == 20)
            .count();
        assert_eq!(milnor_count(20), brute);
    }

    #[test]
    fn unknown_ids() {
        assert!(run(0).is_none() && run(13).is_none());
    }

    #[test]
    fn small_checks_pass() {
        for id in [1, 7, 12] {
            let o = run(id).unwrap();
            assert!(o.pass, "{}", o.line());
        }
    }
}
