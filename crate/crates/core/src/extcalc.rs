//! Minimal free resolutions over A and over A(n), Ext charts, `Ext^0`
//! through indecomposables, and monomial counts predicting `Hom_A`.
//!
//! A resolution is built stage by stage and, inside a stage, degree by
//! degree: the new generators in degree `t` are the candidates (unit vectors
//! of `M_t` for the first stage, a kernel basis of the previous differential
//! afterwards) that are not already hit. Stage `s` of a free module is stored
//! as its generator degrees plus the image of every generator.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::f2linalg::{BitMatrix, BitVector, EchelonBasis};
use crate::gradmod::{indecomposables, DegreeWindow, GradedModule, Level};
use crate::steenrod::{self, SteenrodElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Ring {
    Full,
    Sub(u32),
}

impl Ring {
    pub fn name(&self) -> String {
        match self {
            Ring::Full => "A".into(),
            Ring::Sub(n) => format!("A({n})"),
        }
    }
}

/// How a window relates to the module it stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Boundary {
    /// The window is the whole module.
    Exact,
    /// The window cuts a larger module from above; charts are eroded.
    Truncated,
}

struct Algebra {
    elems: Vec<Vec<SteenrodElement>>,
    words: Vec<Vec<Vec<u32>>>,
    /// `products[(p, q)][i][j]`: coordinates of `elems[p][i] * elems[q][j]`.
    products: HashMap<(u32, u32), Vec<Vec<BitVector>>>,
}

impl Algebra {
    fn new(ring: Ring, max_deg: u32) -> Algebra {
        let (elems, words): (Vec<Vec<SteenrodElement>>, Vec<Vec<Vec<u32>>>) = match ring {
            Ring::Full => (0..=max_deg)
                .map(|d| {
                    let b = steenrod::basis(d);
                    (
                        b.iter().map(SteenrodElement::from_word).collect(),
                        b.iter().map(|w| w.exponents().to_vec()).collect(),
                    )
                })
                .unzip(),
            Ring::Sub(n) => {
                let sub = steenrod::subalgebra(n);
                (0..=max_deg as usize)
                    .map(|d| {
                        (
                            sub.per_degree.get(d).cloned().unwrap_or_default(),
                            sub.words
                                .get(d)
                                .map(|ws| ws.iter().map(|w| w.exponents().to_vec()).collect())
                                .unwrap_or_default(),
                        )
                    })
                    .unzip()
            }
        };
        let solvers: Vec<BitMatrix> = elems
            .iter()
            .enumerate()
            .map(|(d, es)| {
                let cols: Vec<BitVector> = es.iter().map(SteenrodElement::to_vector).collect();
                BitMatrix::from_columns(steenrod::basis(d as u32).len(), &cols)
            })
            .collect();
        let pairs: Vec<(u32, u32)> = (1..=max_deg)
            .flat_map(|p| (1..=max_deg - p).map(move |q| (p, q)))
            .filter(|&(p, q)| {
                !elems[p as usize].is_empty()
                    && !elems[q as usize].is_empty()
                    && !elems[(p + q) as usize].is_empty()
            })
            .collect();
        let products = pairs
            .par_iter()
            .map(|&(p, q)| {
                let table = elems[p as usize]
                    .iter()
                    .map(|a| {
                        elems[q as usize]
                            .iter()
                            .map(|b| {
                                let v = a.product(b).to_vector();
                                match ring {
                                    Ring::Full => v,
                                    Ring::Sub(_) => solvers[(p + q) as usize]
                                        .solve(&v)
                                        .expect("A(n) is closed under products"),
                                }
                            })
                            .collect()
                    })
                    .collect();
                ((p, q), table)
            })
            .collect();
        Algebra {
            elems,
            words,
            products,
        }
    }

    fn dim(&self, d: i32) -> usize {
        if d < 0 {
            return 0;
        }
        self.elems.get(d as usize).map_or(0, Vec::len)
    }

    /// Coordinates of `elems[p][i] * elems[q][j]` in degree `p + q`.
    fn product(&self, p: u32, i: usize, q: u32, j: usize) -> BitVector {
        if p == 0 {
            return BitVector::unit(self.dim(q as i32), j);
        }
        if q == 0 {
            return BitVector::unit(self.dim(p as i32), i);
        }
        match self.products.get(&(p, q)) {
            Some(t) => t[i][j].clone(),
            None => BitVector::zeros(self.dim((p + q) as i32)),
        }
    }
}

/// One free module of a resolution.
#[derive(Clone, Debug, Default, Serialize)]
pub struct FreeStage {
    /// Generator degrees, ascending.
    pub degrees: Vec<i32>,
    /// Image of each generator in the previous stage (or the module).
    #[serde(skip)]
    pub images: Vec<BitVector>,
}

impl FreeStage {
    pub fn count(&self, t: i32) -> usize {
        self.degrees.iter().filter(|&&d| d == t).count()
    }
}

/// Basis of a free stage in one degree: `(generator, algebra index)` pairs.
struct Cells {
    start: Vec<usize>,
    owner: Vec<(usize, usize)>,
}

impl Cells {
    fn new(stage: &FreeStage, alg: &Algebra, t: i32) -> Cells {
        let mut start = Vec::with_capacity(stage.degrees.len());
        let mut owner = Vec::new();
        for (g, &d) in stage.degrees.iter().enumerate() {
            start.push(owner.len());
            for a in 0..alg.dim(t - d) {
                owner.push((g, a));
            }
        }
        Cells { start, owner }
    }

    fn dim(&self) -> usize {
        self.owner.len()
    }
}

#[derive(Clone)]
pub struct Resolution {
    pub ring: Ring,
    pub module: String,
    pub window: DegreeWindow,
    pub boundary: Boundary,
    pub max_s: u32,
    pub max_t: i32,
    pub stages: Vec<FreeStage>,
    alg: Arc<Algebra>,
}

impl std::fmt::Debug for Resolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Resolution")
            .field("ring", &self.ring)
            .field("module", &self.module)
            .field("max_s", &self.max_s)
            .field("max_t", &self.max_t)
            .field("stages", &self.stages)
            .finish()
    }
}

/// Minimal resolution over A of a bounded-below module.
pub fn minimal_resolution(
    m: &GradedModule,
    boundary: Boundary,
    max_s: u32,
    max_t: i32,
    seed: Option<u64>,
) -> Result<Resolution> {
    resolve(m, Ring::Full, boundary, max_s, max_t, seed)
}

/// Minimal resolution over A(n) of a window-truncated module.
pub fn resolution_over_an(
    m: &GradedModule,
    n: u32,
    max_s: u32,
    max_t: i32,
    seed: Option<u64>,
) -> Result<Resolution> {
    resolve(m, Ring::Sub(n), Boundary::Truncated, max_s, max_t, seed)
}

pub fn resolve(
    m: &GradedModule,
    ring: Ring,
    boundary: Boundary,
    max_s: u32,
    max_t: i32,
    seed: Option<u64>,
) -> Result<Resolution> {
    let w = m.window();
    if max_t < w.lo {
        return Err(Error::WindowTooSmall(format!(
            "max_t = {max_t} lies below the module's bottom degree {}",
            w.lo
        )));
    }
    let mut alg_deg = (max_t - w.lo) as u32;
    if let Ring::Sub(n) = ring {
        alg_deg = alg_deg.min(steenrod::subalgebra_top_degree(n));
    }
    let alg = Arc::new(Algebra::new(ring, alg_deg));
    let mut rng = seed.map(ChaCha8Rng::seed_from_u64);
    let mut stages: Vec<FreeStage> = Vec::new();
    let mut pending: BTreeMap<i32, Vec<BitVector>> = BTreeMap::new();
    for s in 0..=max_s {
        let mut stage = FreeStage::default();
        let mut kernels = BTreeMap::new();
        for t in w.lo..=max_t {
            let mut candidates = if s == 0 {
                (0..m.dim(t)).map(|i| BitVector::unit(m.dim(t), i)).collect()
            } else {
                pending.remove(&t).unwrap_or_default()
            };
            let target_dim = if s == 0 {
                m.dim(t)
            } else {
                Cells::new(&stages[s as usize - 1], &alg, t).dim()
            };
            let cells = Cells::new(&stage, &alg, t);
            let mut cols: Vec<BitVector> = cells
                .owner
                .par_iter()
                .map(|&(g, a)| {
                    let d = stage.degrees[g];
                    let (p, v) = ((t - d) as u32, &stage.images[g]);
                    if s == 0 {
                        act_module(m, &alg.words[p as usize][a], d, v)
                    } else {
                        act_free(&alg, &stages[s as usize - 1], p, a, d, v, t)
                    }
                })
                .collect::<Result<_>>()?;
            let mut span = EchelonBasis::new(target_dim);
            for c in &cols {
                span.insert(c);
            }
            if let Some(r) = rng.as_mut() {
                candidates.shuffle(r);
            }
            for v in candidates {
                if span.insert(&v) {
                    stage.degrees.push(t);
                    stage.images.push(v.clone());
                    cols.push(v);
                }
            }
            if s < max_s {
                let kernel = if cols.is_empty() {
                    Vec::new()
                } else {
                    BitMatrix::from_columns(target_dim, &cols).kernel_basis()
                };
                kernels.insert(t, kernel);
            }
        }
        stages.push(stage);
        pending = kernels;
    }
    Ok(Resolution {
        ring,
        module: m.name.clone(),
        window: w,
        boundary,
        max_s,
        max_t,
        stages,
        alg,
    })
}

fn act_module(m: &GradedModule, word: &[u32], d: i32, v: &BitVector) -> Result<BitVector> {
    let deg: u32 = word.iter().sum();
    let t = d + deg as i32;
    if !m.window().contains(t) {
        return Ok(BitVector::zeros(0));
    }
    m.apply_word(word, d, v)
}

/// `elems[p][a]` times a vector of `prev` in degree `d`, landing in `d + p`.
fn act_free(alg: &Algebra, prev: &FreeStage, p: u32, a: usize, d: i32, v: &BitVector, t: i32) -> Result<BitVector> {
    let src = Cells::new(prev, alg, d);
    let tgt = Cells::new(prev, alg, t);
    let mut out = BitVector::zeros(tgt.dim());
    for idx in v.support() {
        let (h, b) = src.owner[idx];
        let q = (d - prev.degrees[h]) as u32;
        for c in alg.product(p, a, q, b).support() {
            out.flip(tgt.start[h] + c);
        }
    }
    Ok(out)
}

impl Resolution {
    /// Highest valid internal degree for stage `s`.
    pub fn valid_top(&self, s: u32) -> i32 {
        let w = self.window;
        match (self.boundary, self.ring) {
            (Boundary::Exact, _) => self.max_t,
            (Boundary::Truncated, Ring::Full) => self.max_t.min(w.hi - w.margin as i32),
            (Boundary::Truncated, Ring::Sub(n)) => self
                .max_t
                .min(w.hi - (s as i32 + 1) * steenrod::subalgebra_top_degree(n) as i32),
        }
    }

    pub fn is_valid(&self, s: u32, t: i32) -> bool {
        s <= self.max_s && self.window.lo <= t && t <= self.valid_top(s)
    }

    /// Number of generators of stage `s` in degree `t`, i.e. `dim Ext^{s,t}`.
    pub fn generators(&self, s: u32, t: i32) -> usize {
        self.stages.get(s as usize).map_or(0, |st| st.count(t))
    }

    pub fn dim(&self, s: u32, t: i32) -> Option<usize> {
        self.is_valid(s, t).then(|| self.generators(s, t))
    }

    /// The differential on generator `g` of stage `s >= 1` as a list of
    /// `(target generator, coefficient)`.
    pub fn differential(&self, s: u32, g: usize) -> Vec<(usize, SteenrodElement)> {
        assert!(s >= 1, "stage 0 maps to the module");
        let stage = &self.stages[s as usize];
        let prev = &self.stages[s as usize - 1];
        let d = stage.degrees[g];
        let cells = Cells::new(prev, &self.alg, d);
        let mut out: BTreeMap<usize, SteenrodElement> = BTreeMap::new();
        for idx in stage.images[g].support() {
            let (h, a) = cells.owner[idx];
            let p = (d - prev.degrees[h]) as usize;
            out.entry(h)
                .or_insert_with(|| SteenrodElement::zero(p as u32))
                .add_assign(&self.alg.elems[p][a]);
        }
        out.into_iter().filter(|(_, e)| !e.is_zero()).collect()
    }

    /// Generators of stage `s >= 1` whose differential has a unit coefficient.
    pub fn minimality_violations(&self) -> Vec<(u32, usize)> {
        let mut out = Vec::new();
        for s in 1..self.stages.len() as u32 {
            for g in 0..self.stages[s as usize].degrees.len() {
                if self.differential(s, g).iter().any(|(_, e)| e.degree() == 0) {
                    out.push((s, g));
                }
            }
        }
        out
    }

    /// Generators `g` of stage `s >= 1` with `d(d(g)) != 0`.
    pub fn d_squared_violations(&self, m: &GradedModule) -> Result<Vec<(u32, usize)>> {
        let mut out = Vec::new();
        for s in 1..self.stages.len() {
            let stage = &self.stages[s];
            let prev = &self.stages[s - 1];
            for g in 0..stage.degrees.len() {
                let t = stage.degrees[g];
                let cells = Cells::new(prev, &self.alg, t);
                let mut acc: Option<BitVector> = None;
                for idx in stage.images[g].support() {
                    let (h, a) = cells.owner[idx];
                    let d = prev.degrees[h];
                    let p = (t - d) as u32;
                    let v = &prev.images[h];
                    let img = if s == 1 {
                        act_module(m, &self.alg.words[p as usize][a], d, v)?
                    } else {
                        act_free(&self.alg, &self.stages[s - 2], p, a, d, v, t)?
                    };
                    match acc.as_mut() {
                        Some(x) => x.xor_assign(&img),
                        None => acc = Some(img),
                    }
                }
                if acc.is_some_and(|x| !x.is_zero()) {
                    out.push((s as u32, g));
                }
            }
        }
        Ok(out)
    }

    /// Multiplication by `h_i` from `Ext^{s,t}` to `Ext^{s+1,t+2^i}`, read off
    /// as the coefficient of `Sq^{2^i}` in the differential. Rows index the
    /// stage `s + 1` generators of degree `t + 2^i`, columns the stage `s`
    /// generators of degree `t`, both in resolution order.
    pub fn h_product(&self, i: u32, s: u32, t: i32) -> Result<BitMatrix> {
        let g = 1u32 << i;
        if s + 1 > self.max_s {
            return Err(Error::Unsupported(format!("stage {} was not computed", s + 1)));
        }
        let pos = self
            .alg
            .elems
            .get(g as usize)
            .and_then(|es| es.iter().position(|e| *e == SteenrodElement::sq(g)))
            .ok_or_else(|| Error::Unsupported(format!("Sq^{g} is not in {}", self.ring.name())))?;
        let src: Vec<usize> = gens_in(&self.stages[s as usize], t);
        let tgt: Vec<usize> = gens_in(&self.stages[s as usize + 1], t + g as i32);
        let cells = Cells::new(&self.stages[s as usize], &self.alg, t + g as i32);
        let upper = &self.stages[s as usize + 1];
        Ok(BitMatrix::from_entries(
            tgt.len(),
            src.len(),
            tgt.iter().enumerate().flat_map(|(r, &gp)| {
                let img = &upper.images[gp];
                let cells = &cells;
                src.iter()
                    .enumerate()
                    .filter(move |&(_, &gs)| img.get(cells.start[gs] + pos))
                    .map(move |(c, _)| (r, c))
            }),
        ))
    }

    pub fn chart(&self) -> ExtChart {
        let mut entries = Vec::new();
        for s in 0..=self.max_s {
            for t in self.window.lo..=self.valid_top(s) {
                entries.push(ChartEntry {
                    s,
                    t,
                    dim: self.generators(s, t),
                });
            }
        }
        entries.sort_by_key(|e| (e.t - e.s as i32, e.s));
        ExtChart {
            ring: self.ring.name(),
            module: self.module.clone(),
            validity: Validity {
                max_s: self.max_s,
                max_t: self.max_t,
                margin: self.window.margin,
                t_lo: self.window.lo,
                t_hi: (0..=self.max_s).map(|s| self.valid_top(s)).collect(),
            },
            entries,
        }
    }
}

fn gens_in(stage: &FreeStage, t: i32) -> Vec<usize> {
    (0..stage.degrees.len())
        .filter(|&g| stage.degrees[g] == t)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChartEntry {
    pub s: u32,
    pub t: i32,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validity {
    pub max_s: u32,
    pub max_t: i32,
    pub margin: u32,
    pub t_lo: i32,
    /// Per stage, the highest valid internal degree.
    pub t_hi: Vec<i32>,
}

/// `dim Ext^{s,t}` on the validity region, sorted by `(t - s, s)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtChart {
    pub ring: String,
    pub module: String,
    pub validity: Validity,
    pub entries: Vec<ChartEntry>,
}

impl ExtChart {
    pub fn dim(&self, s: u32, t: i32) -> Option<usize> {
        self.entries.iter().find(|e| e.s == s && e.t == t).map(|e| e.dim)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("s,t,dim\n");
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{}", e.s, e.t, e.dim);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("chart serializes")
    }

    /// Same positions and dimensions.
    pub fn same_dims(&self, other: &ExtChart) -> bool {
        self.validity == other.validity && self.entries == other.entries
    }
}

/// `dim Hom_A(M, F2)` in degree `t`, as the dimension of the indecomposables.
pub fn hom_a_dims(m: &GradedModule, t: i32) -> Result<usize> {
    Ok(indecomposables(m, Level::Full, t)?.dim)
}

/// Which monomial basis a prediction counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Predicted {
    /// Monomials in `xi_k`, `k != 2^s - 1`.
    MtoHom,
    /// `xi_2^l * xi_I` with `l` in `[l_lo, l_hi]` and `xi_I` free of
    /// `xi_2` and of every `xi_{2^s - 1}`.
    WhHom { l_lo: i32, l_hi: i32 },
}

/// One predicted dual generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PredictedMonomial {
    pub xi2_exponent: i32,
    /// Indices `k` of the remaining factors `xi_k`, descending.
    pub factors: Vec<u32>,
}

impl PredictedMonomial {
    pub fn render(&self) -> String {
        let mut parts = Vec::new();
        match self.xi2_exponent {
            0 => {}
            1 => parts.push("xi2".into()),
            e => parts.push(format!("xi2^{e}")),
        }
        parts.extend(self.factors.iter().map(|k| format!("xi{k}")));
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }
}

fn excluded(k: u32) -> bool {
    (k + 1).is_power_of_two()
}

fn restricted_partitions(n: i64, max_part: u32, allow: &dyn Fn(u32) -> bool, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if n == 0 {
        out.push(prefix.clone());
        return;
    }
    for k in (1..=max_part.min(n as u32)).rev() {
        if !allow(k) {
            continue;
        }
        prefix.push(k);
        restricted_partitions(n - k as i64, k, allow, prefix, out);
        prefix.pop();
    }
}

pub fn predicted_basis(kind: Predicted, t: i32) -> Vec<PredictedMonomial> {
    let mut out = Vec::new();
    match kind {
        Predicted::MtoHom => {
            if t < 0 {
                return out;
            }
            let mut parts = Vec::new();
            restricted_partitions(t as i64, t as u32, &|k| !excluded(k), &mut Vec::new(), &mut parts);
            for p in parts {
                let e = p.iter().filter(|&&k| k == 2).count() as i32;
                out.push(PredictedMonomial {
                    xi2_exponent: e,
                    factors: p.into_iter().filter(|&k| k != 2).collect(),
                });
            }
        }
        Predicted::WhHom { l_lo, l_hi } => {
            for l in l_lo..=l_hi {
                let rest = t as i64 - 2 * l as i64;
                if rest < 0 {
                    continue;
                }
                let mut parts = Vec::new();
                restricted_partitions(rest, rest as u32, &|k| k != 2 && !excluded(k), &mut Vec::new(), &mut parts);
                out.extend(parts.into_iter().map(|factors| PredictedMonomial {
                    xi2_exponent: l,
                    factors,
                }));
            }
        }
    }
    out
}

pub fn predicted_dims(kind: Predicted, t: i32) -> usize {
    predicted_basis(kind, t).len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{build_h_bo, HboVariant};
    use crate::gradmod::{free_module, trivial_module};
    use std::collections::HashMap;

    fn sphere(max_s: u32, max_t: i32, seed: Option<u64>) -> Resolution {
        minimal_resolution(&trivial_module(), Boundary::Exact, max_s, max_t, seed).unwrap()
    }

    #[test]
    fn sphere_low_chart() {
        let r = sphere(6, 14, None);
        for s in 0..=6 {
            assert_eq!(r.dim(s, s as i32), Some(1), "Ext^({s},{s})");
        }
        for t in 1..=14 {
            let want = usize::from([1, 2, 4, 8].contains(&t));
            assert_eq!(r.dim(1, t), Some(want), "Ext^(1,{t})");
        }
        // h1^2, h0 h2, h1 h3 and h2^2 in stage 2.
        assert_eq!(r.dim(2, 4), Some(1));
        assert_eq!(r.dim(2, 5), Some(1));
        assert_eq!(r.dim(2, 6), Some(0));
        assert_eq!(r.dim(2, 8), Some(1));
        assert_eq!(r.dim(2, 10), Some(1));
        assert!(r.minimality_violations().is_empty());
        assert!(r.d_squared_violations(&trivial_module()).unwrap().is_empty());
    }

    #[test]
    fn h0_tower_on_the_unit() {
        let r = sphere(5, 8, None);
        for s in 0..5 {
            let m = r.h_product(0, s, s as i32).unwrap();
            assert_eq!((m.rows(), m.cols(), m.rank()), (1, 1, 1));
        }
        // h0 h1 = 0
        assert!(r.h_product(0, 1, 2).unwrap().is_zero());
        // h0^2 h2 != 0 while h0^3 h2 = 0
        assert_eq!(r.h_product(0, 2, 5).unwrap().rank(), 1);
        assert_eq!(r.h_product(0, 3, 7).unwrap().rows(), 0);
    }

    #[test]
    fn seeds_do_not_change_the_chart() {
        let a = sphere(4, 12, None).chart();
        let b = sphere(4, 12, Some(3)).chart();
        let c = sphere(4, 12, Some(11)).chart();
        assert!(a.same_dims(&b) && a.same_dims(&c));
    }

    #[test]
    fn free_module_has_no_higher_ext() {
        let m = free_module(None, &[0], 0, 12).with_margin(1);
        let r = minimal_resolution(&m, Boundary::Truncated, 3, 12, None).unwrap();
        assert_eq!(r.dim(0, 0), Some(1));
        for s in 0..=3 {
            for t in 0..=r.valid_top(s) {
                if (s, t) != (0, 0) {
                    assert_eq!(r.dim(s, t), Some(0), "({s},{t})");
                }
            }
        }
        assert_eq!(r.dim(1, 12), None);
    }

    #[test]
    fn sq1_tower_over_a0() {
        let r = resolve(&trivial_module(), Ring::Sub(0), Boundary::Exact, 6, 10, None).unwrap();
        for s in 0..=6 {
            for t in 0..=10 {
                assert_eq!(r.generators(s, t), usize::from(t == s as i32));
            }
        }
    }

    #[test]
    fn a1_chart_of_the_trivial_module() {
        let r = resolve(&trivial_module(), Ring::Sub(1), Boundary::Exact, 4, 16, None).unwrap();
        // h0, h1, h1^2, the stem-4 tower from s = 3 and the stem-8 class in s = 4.
        let nonzero = [(0, 0), (1, 1), (1, 2), (2, 2), (2, 4), (3, 3), (3, 7), (4, 4), (4, 8), (4, 12)];
        for s in 0..=4u32 {
            for t in 0..=16 {
                let want = usize::from(nonzero.contains(&(s, t)));
                assert_eq!(r.generators(s, t), want, "({s},{t})");
            }
        }
        assert!(r.d_squared_violations(&trivial_module()).unwrap().is_empty());
        assert!(r.minimality_violations().is_empty());
    }

    fn a1_mod_a0() -> GradedModule {
        // 1, Sq^2, Sq^1 Sq^2, Sq^2 Sq^1 Sq^2 in degrees 0, 2, 3, 5.
        let window = DegreeWindow::new(0, 5, 0);
        let dims = [1, 0, 1, 1, 0, 1];
        let basis = dims
            .iter()
            .enumerate()
            .map(|(t, &d)| (0..d).map(|_| format!("x{t}")).collect())
            .collect();
        let one = BitMatrix::identity(1);
        let action = HashMap::from([((2, 0), one.clone()), ((1, 2), one.clone()), ((2, 3), one)]);
        GradedModule::from_parts("A(1)//A(0)", window, basis, vec![1, 2], action).unwrap()
    }

    #[test]
    fn sq1_tower_module_matches_its_kernel_count() {
        let m = a1_mod_a0();
        let r = resolve(&m, Ring::Sub(1), Boundary::Exact, 4, 12, None).unwrap();
        for s in 0..=4u32 {
            for t in 0..=12 {
                assert_eq!(r.generators(s, t), usize::from(t == s as i32), "({s},{t})");
            }
        }
        assert_eq!(crate::gradmod::sq1_kernel_on_indecomposables(&m, 1, 0).unwrap(), 1);
        for k in 1..5 {
            assert_eq!(crate::gradmod::sq1_kernel_on_indecomposables(&m, 1, k).unwrap(), 0);
        }
    }

    #[test]
    fn csv_is_sorted_by_stem() {
        let c = sphere(2, 4, None).chart();
        let csv = c.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("s,t,dim"));
        let rows: Vec<(i32, u32)> = lines
            .map(|l| {
                let f: Vec<i32> = l.split(',').map(|x| x.parse().unwrap()).collect();
                (f[1] - f[0], f[0] as u32)
            })
            .collect();
        let mut sorted = rows.clone();
        sorted.sort();
        assert_eq!(rows, sorted);
        let json: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
        assert_eq!(json["validity"]["max_s"], 2);
    }

    #[test]
    fn hom_dims_of_small_modules() {
        let mto = build_h_bo(10, HboVariant::Thom);
        assert_eq!(hom_a_dims(&mto, 4).unwrap(), 2);
        assert_eq!(hom_a_dims(&mto, 1).unwrap(), 0);
        assert_eq!(hom_a_dims(&trivial_module(), 0).unwrap(), 1);
    }

    #[test]
    fn predicted_examples() {
        assert_eq!(predicted_dims(Predicted::MtoHom, 6), 3);
        assert_eq!(predicted_dims(Predicted::MtoHom, 3), 0);
        assert_eq!(predicted_dims(Predicted::WhHom { l_lo: -2, l_hi: 2 }, 0), 2);
        let names: Vec<String> = predicted_basis(Predicted::MtoHom, 6)
            .iter()
            .map(PredictedMonomial::render)
            .collect();
        assert_eq!(names, ["xi6", "xi2*xi4", "xi2^3"]);
    }
}
