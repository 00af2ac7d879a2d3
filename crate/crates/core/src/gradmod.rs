//! Windowed graded F2-modules over the Steenrod algebra.
//!
//! A module is materialized on a finite degree window `[lo, hi]`: a labelled
//! basis per degree plus one matrix per stored operation `Sq^k` and source
//! degree `t` with `t + k <= hi`. Degrees outside the window are treated as
//! zero, so every assertion is restricted to the interior
//! `[lo + margin, hi - margin]`.

use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2linalg::{binom_mod2, BitMatrix, BitVector, EchelonBasis};
use crate::steenrod::{self, SteenrodElement};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeWindow {
    pub lo: i32,
    pub hi: i32,
    pub margin: u32,
}

impl DegreeWindow {
    pub fn new(lo: i32, hi: i32, margin: u32) -> Self {
        assert!(lo <= hi, "empty window [{lo}, {hi}]");
        DegreeWindow { lo, hi, margin }
    }

    pub fn contains(&self, t: i32) -> bool {
        self.lo <= t && t <= self.hi
    }

    pub fn interior(&self) -> (i32, i32) {
        (self.lo + self.margin as i32, self.hi - self.margin as i32)
    }

    pub fn in_interior(&self, t: i32) -> bool {
        let (a, b) = self.interior();
        a <= t && t <= b
    }

    pub fn span(&self) -> u32 {
        (self.hi - self.lo) as u32
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi
    }

    pub(crate) fn require_interior(&self, t: i32) -> Result<()> {
        if self.in_interior(t) {
            Ok(())
        } else {
            let (lo, hi) = self.interior();
            Err(Error::OutOfInterior {
                degree: t as i64,
                lo: lo as i64,
                hi: hi as i64,
            })
        }
    }

    pub(crate) fn require(&self, t: i32) -> Result<()> {
        if self.contains(t) {
            Ok(())
        } else {
            Err(Error::OutOfWindow {
                degree: t as i64,
                lo: self.lo as i64,
                hi: self.hi as i64,
            })
        }
    }
}

/// Which operations a module stores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OpSet {
    /// Every `Sq^k` with `1 <= k <= max`.
    UpTo(u32),
    /// Only `Sq^{2^i}` with `2^i <= max`: enough for decomposables and A(n)
    /// structure, not for `verify_action`.
    PowersOfTwo(u32),
}

impl OpSet {
    pub fn list(&self) -> Vec<u32> {
        match *self {
            OpSet::UpTo(m) => (1..=m).collect(),
            OpSet::PowersOfTwo(m) => (0..32).map(|i| 1u32 << i).take_while(|&k| k <= m).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedModule {
    pub name: String,
    window: DegreeWindow,
    /// Global suspension recorded as an attribute; labels are not shifted.
    suspension: i32,
    basis: Vec<Vec<String>>,
    ops: Vec<u32>,
    action: HashMap<(u32, i32), BitMatrix>,
}

impl GradedModule {
    /// Builds a module from a column rule: `column(k, t, i)` is `Sq^k` of the
    /// `i`-th basis element of degree `t`, in the basis of degree `t + k`.
    pub fn from_columns<F>(
        name: impl Into<String>,
        window: DegreeWindow,
        basis: Vec<Vec<String>>,
        ops: OpSet,
        column: F,
    ) -> GradedModule
    where
        F: Fn(u32, i32, usize) -> BitVector + Sync,
    {
        assert_eq!(basis.len(), (window.hi - window.lo + 1) as usize);
        let ops = ops.list();
        let jobs: Vec<(u32, i32)> = ops
            .iter()
            .flat_map(|&k| (window.lo..=window.hi - k as i32).map(move |t| (k, t)))
            .collect();
        let dim = |t: i32| basis[(t - window.lo) as usize].len();
        let action: HashMap<(u32, i32), BitMatrix> = jobs
            .par_iter()
            .map(|&(k, t)| {
                let cols: Vec<BitVector> = (0..dim(t)).map(|i| column(k, t, i)).collect();
                ((k, t), BitMatrix::from_columns(dim(t + k as i32), &cols))
            })
            .collect();
        GradedModule {
            name: name.into(),
            window,
            suspension: 0,
            basis,
            ops,
            action,
        }
    }

    /// Assembles a module from explicit matrices. Absent `(k, t)` entries are
    /// zero maps.
    pub fn from_parts(
        name: impl Into<String>,
        window: DegreeWindow,
        basis: Vec<Vec<String>>,
        ops: Vec<u32>,
        mut action: HashMap<(u32, i32), BitMatrix>,
    ) -> Result<GradedModule> {
        if basis.len() != (window.hi - window.lo + 1) as usize {
            return Err(Error::Parse("basis does not cover the window".into()));
        }
        let dim = |t: i32| basis[(t - window.lo) as usize].len();
        for (&(k, t), m) in &action {
            if !window.contains(t) || !window.contains(t + k as i32) {
                return Err(Error::Parse(format!("Sq^{k} on degree {t} leaves the window")));
            }
            if k != 0 && !ops.contains(&k) {
                return Err(Error::Parse(format!("Sq^{k} is not among the stored operations")));
            }
            if m.rows() != dim(t + k as i32) || m.cols() != dim(t) {
                return Err(Error::Parse(format!("Sq^{k} on degree {t} has the wrong shape")));
            }
        }
        for &k in &ops {
            for t in window.lo..=window.hi - k as i32 {
                action
                    .entry((k, t))
                    .or_insert_with(|| BitMatrix::zeros(dim(t + k as i32), dim(t)));
            }
        }
        Ok(GradedModule {
            name: name.into(),
            window,
            suspension: 0,
            basis,
            ops,
            action,
        })
    }

    pub fn with_suspension(mut self, s: i32) -> Self {
        self.suspension = s;
        self
    }

    pub fn with_margin(mut self, margin: u32) -> Self {
        self.window.margin = margin;
        self
    }

    pub fn window(&self) -> DegreeWindow {
        self.window
    }

    pub fn suspension(&self) -> i32 {
        self.suspension
    }

    pub fn ops(&self) -> &[u32] {
        &self.ops
    }

    /// Whether `Sq^k` is stored directly.
    pub fn has_op(&self, k: u32) -> bool {
        k == 0 || self.ops.contains(&k)
    }

    pub fn dim(&self, t: i32) -> usize {
        if self.window.contains(t) {
            self.basis[(t - self.window.lo) as usize].len()
        } else {
            0
        }
    }

    pub fn total_dim(&self) -> usize {
        self.basis.iter().map(Vec::len).sum()
    }

    pub fn basis(&self, t: i32) -> &[String] {
        if self.window.contains(t) {
            &self.basis[(t - self.window.lo) as usize]
        } else {
            &[]
        }
    }

    pub fn label_index(&self, t: i32, label: &str) -> Option<usize> {
        self.basis(t).iter().position(|l| l == label)
    }

    /// The element of degree `t` given as a sum of labels.
    pub fn element(&self, t: i32, labels: &[&str]) -> Result<BitVector> {
        self.window.require(t)?;
        let mut v = BitVector::zeros(self.dim(t));
        for l in labels {
            let i = self
                .label_index(t, l)
                .ok_or_else(|| Error::Parse(format!("no basis element {l} in degree {t}")))?;
            v.flip(i);
        }
        Ok(v)
    }

    /// Renders a vector as a sum of labels, `0` for zero.
    pub fn render(&self, t: i32, v: &BitVector) -> String {
        let b = self.basis(t);
        let parts: Vec<&str> = v.support().map(|i| b[i].as_str()).collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    /// The matrix of `Sq^k` from degree `t` to `t + k`.
    pub fn sq(&self, k: u32, t: i32) -> Result<Cow<'_, BitMatrix>> {
        self.window.require(t)?;
        self.window.require(t + k as i32)?;
        if let Some(m) = self.action.get(&(k, t)) {
            return Ok(Cow::Borrowed(m));
        }
        if k == 0 {
            return Ok(Cow::Owned(BitMatrix::identity(self.dim(t))));
        }
        // Expand in the generators Sq^{2^i} when only those are stored.
        let words = steenrod::generator_words(k);
        let missing = || Error::MissingOperation {
            k,
            degree: t as i64,
        };
        let mut acc = BitMatrix::zeros(self.dim(t + k as i32), self.dim(t));
        for w in words.iter() {
            let mut cur = BitMatrix::identity(self.dim(t));
            let mut deg = t;
            for &e in w.iter().rev() {
                let step = self.action.get(&(e, deg)).ok_or_else(missing)?;
                cur = step.mul(&cur);
                deg += e as i32;
            }
            acc = acc.add(&cur);
        }
        Ok(Cow::Owned(acc))
    }

    /// Like [`sq`](Self::sq), but degrees outside the window count as zero.
    pub(crate) fn sq_or_zero(&self, k: u32, t: i32) -> Result<Cow<'_, BitMatrix>> {
        if !self.window.contains(t) || !self.window.contains(t + k as i32) {
            return Ok(Cow::Owned(BitMatrix::zeros(
                self.dim(t + k as i32),
                self.dim(t),
            )));
        }
        self.sq(k, t)
    }

    pub fn apply_sq(&self, k: u32, t: i32, v: &BitVector) -> Result<BitVector> {
        Ok(self.sq(k, t)?.mul_vec(v))
    }

    /// Applies a Steenrod element; words act right to left.
    pub fn apply(&self, a: &SteenrodElement, t: i32, v: &BitVector) -> Result<BitVector> {
        self.window.require(t)?;
        if v.len() != self.dim(t) {
            return Err(Error::Parse("vector length does not match the basis".into()));
        }
        let target = t + a.degree() as i32;
        self.window.require(target)?;
        let mut out = BitVector::zeros(self.dim(target));
        for w in a.terms() {
            let mut cur = v.clone();
            let mut deg = t;
            for &e in w.exponents().iter().rev() {
                cur = self.apply_sq(e, deg, &cur)?;
                deg += e as i32;
            }
            out.xor_assign(&cur);
        }
        Ok(out)
    }

    /// Applies a word `Sq^{i1} ... Sq^{ik}`, rightmost letter first.
    pub fn apply_word(&self, word: &[u32], t: i32, v: &BitVector) -> Result<BitVector> {
        let mut cur = v.clone();
        let mut deg = t;
        for &e in word.iter().rev() {
            cur = self.apply_sq(e, deg, &cur)?;
            deg += e as i32;
        }
        Ok(cur)
    }

    /// Flips one stored action entry; used to build negative controls.
    pub fn flip_action_entry(&mut self, k: u32, t: i32, row: usize, col: usize) {
        let m = self
            .action
            .get_mut(&(k, t))
            .expect("no stored matrix at that position");
        m.flip(row, col);
    }

    /// Stored `(k, t, matrix)` triples in a fixed order.
    pub fn stored_actions(&self) -> Vec<(u32, i32, &BitMatrix)> {
        let mut v: Vec<_> = self.action.iter().map(|(&(k, t), m)| (k, t, m)).collect();
        v.sort_by_key(|&(k, t, _)| (k, t));
        v
    }

    /// Restriction to a smaller window: a quotient from above and a cut from
    /// below. Only a module when nothing below `lo` maps into the window.
    pub fn restrict(&self, lo: i32, hi: i32, margin: u32) -> GradedModule {
        assert!(self.window.lo <= lo && hi <= self.window.hi && lo <= hi);
        let window = DegreeWindow::new(lo, hi, margin);
        let basis = (lo..=hi).map(|t| self.basis(t).to_vec()).collect();
        let action = self
            .action
            .iter()
            .filter(|(&(k, t), _)| lo <= t && t + k as i32 <= hi)
            .map(|(&key, m)| (key, m.clone()))
            .collect();
        GradedModule {
            name: self.name.clone(),
            window,
            suspension: self.suspension,
            basis,
            ops: self.ops.clone(),
            action,
        }
    }
}

/// F2 concentrated in degree 0.
pub fn trivial_module() -> GradedModule {
    GradedModule::from_columns(
        "F2",
        DegreeWindow::new(0, 0, 0),
        vec![vec!["1".into()]],
        OpSet::UpTo(0),
        |_, _, _| unreachable!(),
    )
}

/// The free module over A(n) (or over A, with `n = None`) on generators of the
/// given degrees, materialized on `[lo, hi]`.
pub fn free_module(n: Option<u32>, generators: &[i32], lo: i32, hi: i32) -> GradedModule {
    let span = (hi - lo).max(0) as u32;
    let alg: Vec<Vec<SteenrodElement>> = match n {
        Some(n) => {
            let sub = steenrod::subalgebra(n);
            (0..=span)
                .map(|d| sub.per_degree.get(d as usize).cloned().unwrap_or_default())
                .collect()
        }
        None => (0..=span)
            .map(|d| {
                steenrod::basis(d)
                    .iter()
                    .map(SteenrodElement::from_word)
                    .collect()
            })
            .collect(),
    };
    // Per degree: list of (generator index, algebra basis index).
    let mut cells: Vec<Vec<(usize, usize)>> = vec![Vec::new(); (hi - lo + 1) as usize];
    let mut basis: Vec<Vec<String>> = vec![Vec::new(); (hi - lo + 1) as usize];
    for (gi, &g) in generators.iter().enumerate() {
        for t in lo.max(g)..=hi {
            let d = (t - g) as usize;
            for (ai, a) in alg[d].iter().enumerate() {
                cells[(t - lo) as usize].push((gi, ai));
                let name = a.to_string();
                let wrapped = if a.terms().count() > 1 {
                    format!("[{name}]")
                } else {
                    name
                };
                basis[(t - lo) as usize].push(format!("{wrapped}*g{gi}[{g}]"));
            }
        }
    }
    // Coordinates of a product in the chosen algebra basis of its degree.
    let solvers: Vec<BitMatrix> = alg
        .iter()
        .enumerate()
        .map(|(d, elems)| {
            let cols: Vec<BitVector> = elems.iter().map(SteenrodElement::to_vector).collect();
            BitMatrix::from_columns(steenrod::basis(d as u32).len(), &cols)
        })
        .collect();
    let ops = match n {
        Some(n) => OpSet::PowersOfTwo(1 << n),
        None => OpSet::UpTo(span),
    };
    let name = match n {
        Some(n) => format!("free A({n})-module"),
        None => "free A-module".to_string(),
    };
    let window = DegreeWindow::new(lo, hi, 0);
    let m = GradedModule::from_columns(name, window, basis, ops, |k, t, i| {
        let (gi, ai) = cells[(t - lo) as usize][i];
        let g = generators[gi];
        let d = (t - g) as usize;
        let target = t + k as i32;
        let prod = SteenrodElement::sq(k).product(&alg[d][ai]);
        let coords = solvers[d + k as usize]
            .solve(&prod.to_vector())
            .expect("A(n) is closed under its generators");
        let tcells = &cells[(target - lo) as usize];
        BitVector::from_support(
            tcells.len(),
            coords.support().map(|c| {
                tcells
                    .iter()
                    .position(|&cell| cell == (gi, c))
                    .expect("product cell present")
            }),
        )
    });
    m
}

/// Direct sum of two modules on a common window.
pub fn direct_sum(a: &GradedModule, b: &GradedModule) -> GradedModule {
    let wa = a.window();
    let wb = b.window();
    let window = DegreeWindow::new(wa.lo.min(wb.lo), wa.hi.max(wb.hi), wa.margin.max(wb.margin));
    let ops: Vec<u32> = a.ops().iter().copied().filter(|k| b.has_op(*k)).collect();
    let basis = window
        .degrees()
        .map(|t| {
            let mut v = a.basis(t).to_vec();
            v.extend(b.basis(t).iter().cloned());
            v
        })
        .collect();
    let mut action = HashMap::new();
    for &k in &ops {
        for t in window.lo..=window.hi - k as i32 {
            let ma = a.sq_or_zero(k, t).expect("operation present");
            let mb = b.sq_or_zero(k, t).expect("operation present");
            let top = ma.hstack(&BitMatrix::zeros(ma.rows(), mb.cols()));
            let bottom = BitMatrix::zeros(mb.rows(), ma.cols()).hstack(&mb);
            action.insert((k, t), top.vstack(&bottom));
        }
    }
    GradedModule::from_parts(format!("{} + {}", a.name, b.name), window, basis, ops, action)
        .expect("consistent direct sum")
}

/// Tensor product with the Cartan diagonal, on degrees `[lo, hi]`.
pub fn tensor_product(a: &GradedModule, b: &GradedModule, lo: i32, hi: i32, max_op: u32) -> GradedModule {
    let window = DegreeWindow::new(lo, hi, 0);
    let mut cells: Vec<Vec<(i32, usize, usize)>> = Vec::new();
    let mut basis = Vec::new();
    for t in lo..=hi {
        let mut c = Vec::new();
        let mut l = Vec::new();
        for s in a.window().degrees() {
            let u = t - s;
            for i in 0..a.dim(s) {
                for j in 0..b.dim(u) {
                    c.push((s, i, j));
                    l.push(format!("{}|{}", a.basis(s)[i], b.basis(u)[j]));
                }
            }
        }
        cells.push(c);
        basis.push(l);
    }
    let index: Vec<HashMap<(i32, usize, usize), usize>> = cells
        .iter()
        .map(|c| c.iter().enumerate().map(|(i, &x)| (x, i)).collect())
        .collect();
    GradedModule::from_columns(
        format!("{} (x) {}", a.name, b.name),
        window,
        basis,
        OpSet::UpTo(max_op),
        |k, t, col| {
            let (s, i, j) = cells[(t - lo) as usize][col];
            let u = t - s;
            let target = t + k as i32;
            let tindex = &index[(target - lo) as usize];
            let mut out = BitVector::zeros(tindex.len());
            for p in 0..=k {
                let q = k - p;
                let x = a.sq_or_zero(p, s).expect("left operation").column(i);
                let y = b.sq_or_zero(q, u).expect("right operation").column(j);
                for xi in x.support() {
                    for yj in y.support() {
                        if let Some(&pos) = tindex.get(&(s + p as i32, xi, yj)) {
                            out.flip(pos);
                        }
                    }
                }
            }
            out
        },
    )
}

/// A single failed relation reported by [`verify_action`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ActionViolation {
    /// `Sq^a Sq^b` for an Adem check, `(0, 0)` for the identity check.
    pub a: u32,
    pub b: u32,
    pub degree: i32,
}

/// Checks `Sq^0 = id` and every Adem relation whose matrices all stay inside
/// the window and are stored.
pub fn verify_action(m: &GradedModule) -> Vec<ActionViolation> {
    let w = m.window();
    let mut out: Vec<ActionViolation> = w
        .degrees()
        .filter(|&t| m.sq(0, t).map(|s| *s != BitMatrix::identity(m.dim(t))).unwrap_or(true))
        .map(|t| ActionViolation { a: 0, b: 0, degree: t })
        .collect();
    let span = w.span();
    let triples: Vec<(u32, u32, i32)> = (1..=span)
        .flat_map(|b| (1..2 * b).map(move |a| (a, b)))
        .filter(|&(a, b)| a + b <= span)
        .flat_map(|(a, b)| (w.lo..=w.hi - (a + b) as i32).map(move |t| (a, b, t)))
        .collect();
    let mut bad: Vec<ActionViolation> = triples
        .par_iter()
        .filter_map(|&(a, b, t)| {
            let needed = (0..=a / 2).map(|j| a + b - j).chain([a, b]);
            if !needed.into_iter().all(|k| m.has_op(k)) || !(0..=a / 2).all(|j| m.has_op(j)) {
                return None;
            }
            let first = m.sq(b, t).ok()?;
            let lhs = m.sq(a, t + b as i32).ok()?.mul(&first);
            let mut rhs = BitMatrix::zeros(lhs.rows(), lhs.cols());
            for j in 0..=a / 2 {
                if binom_mod2(b as i64 - 1 - j as i64, (a - 2 * j) as i64) {
                    let inner = m.sq(j, t).ok()?;
                    let term = m.sq(a + b - j, t + j as i32).ok()?.mul(&inner);
                    rhs = rhs.add(&term);
                }
            }
            (lhs != rhs).then_some(ActionViolation { a, b, degree: t })
        })
        .collect();
    bad.sort_by_key(|v| (v.degree, v.a, v.b));
    out.extend(bad);
    out
}

/// Decomposition level for indecomposables and freeness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Level {
    /// The subalgebra A(n).
    Sub(u32),
    /// All of A, realized through `Sq^{2^i}` for every `2^i` fitting the window.
    Full,
}

impl Level {
    fn generators(&self, max: u32) -> Vec<u32> {
        let cap = match *self {
            Level::Sub(n) => n,
            Level::Full => 31,
        };
        (0..=cap)
            .map(|i| 1u32 << i)
            .take_while(|&g| g <= max.max(1))
            .filter(|&g| g <= max)
            .collect()
    }
}

/// The subspace `sum_i Sq^{2^i} M_{t - 2^i}` of `M_t`.
pub fn decomposables(m: &GradedModule, level: Level, t: i32) -> Result<EchelonBasis> {
    let w = m.window();
    let mut span = EchelonBasis::new(m.dim(t));
    let reach = (t - w.lo).max(0) as u32;
    for g in level.generators(reach) {
        let src = t - g as i32;
        if m.dim(src) == 0 {
            continue;
        }
        let mat = m.sq(g, src)?;
        for c in 0..mat.cols() {
            span.insert(&mat.column(c));
        }
    }
    Ok(span)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndecomposablesSlice {
    pub degree: i32,
    pub dim: usize,
    pub representatives: Vec<String>,
    #[serde(skip)]
    pub vectors: Vec<BitVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndecomposablesReport {
    pub level: Level,
    pub slices: Vec<IndecomposablesSlice>,
}

/// `M_t` modulo decomposables; representatives are the first basis vectors
/// (in label order) completing the decomposable subspace.
pub fn indecomposables(m: &GradedModule, level: Level, t: i32) -> Result<IndecomposablesSlice> {
    m.window().require_interior(t)?;
    let mut span = decomposables(m, level, t)?;
    let mut vectors = Vec::new();
    for i in 0..m.dim(t) {
        let e = BitVector::unit(m.dim(t), i);
        if span.insert(&e) {
            vectors.push(e);
        }
    }
    Ok(IndecomposablesSlice {
        degree: t,
        dim: vectors.len(),
        representatives: vectors.iter().map(|v| m.render(t, v)).collect(),
        vectors,
    })
}

pub fn indecomposables_report(m: &GradedModule, level: Level, lo: i32, hi: i32) -> Result<IndecomposablesReport> {
    let slices = (lo..=hi)
        .into_par_iter()
        .map(|t| indecomposables(m, level, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(IndecomposablesReport { level, slices })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreenessDegree {
    pub degree: i32,
    pub dim: usize,
    pub predicted: usize,
    pub injective: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreenessReport {
    pub n: u32,
    pub degrees: Vec<FreenessDegree>,
}

impl FreenessReport {
    pub fn pass(&self) -> bool {
        self.degrees.iter().all(|d| d.pass)
    }

    pub fn first_failure(&self) -> Option<&FreenessDegree> {
        self.degrees.iter().find(|d| !d.pass)
    }
}

/// Checks degreewise that `M` is free over A(n) on its indecomposables for
/// every `t` in `[lo, hi]`: the evaluation map from `A(n) (x) generators`
/// into `M_t` is injective and dimensions agree. Generators are read from all
/// degrees down to `lo - topdeg(A(n))`, which must lie in the interior or
/// below the window (where the module is zero).
pub fn freeness_check(m: &GradedModule, n: u32, lo: i32, hi: i32) -> Result<FreenessReport> {
    let alg = steenrod::subalgebra(n);
    let top = steenrod::subalgebra_top_degree(n) as i32;
    let w = m.window();
    let gen_lo = (lo - top).max(w.lo);
    let gens: BTreeMap<i32, IndecomposablesSlice> = (gen_lo..=hi)
        .into_par_iter()
        .map(|s| {
            let mut span = decomposables(m, Level::Sub(n), s)?;
            let mut vectors = Vec::new();
            for i in 0..m.dim(s) {
                let e = BitVector::unit(m.dim(s), i);
                if span.insert(&e) {
                    vectors.push(e);
                }
            }
            Ok((
                s,
                IndecomposablesSlice {
                    degree: s,
                    dim: vectors.len(),
                    representatives: Vec::new(),
                    vectors,
                },
            ))
        })
        .collect::<Result<_>>()?;
    for t in lo..=hi {
        w.require_interior(t)?;
    }
    let degrees = (lo..=hi)
        .into_par_iter()
        .map(|t| {
            let mut images = Vec::new();
            let mut predicted = 0;
            for s in (t - top).max(gen_lo)..=t {
                let d = (t - s) as usize;
                let Some(slice) = gens.get(&s) else { continue };
                for a in alg.words.get(d).into_iter().flatten() {
                    for g in &slice.vectors {
                        images.push(m.apply_word(a.exponents(), s, g)?);
                        predicted += 1;
                    }
                }
            }
            let rank = if images.is_empty() {
                0
            } else {
                BitMatrix::from_rows(m.dim(t), images).rank()
            };
            let injective = rank == predicted;
            Ok(FreenessDegree {
                degree: t,
                dim: m.dim(t),
                predicted,
                injective,
                pass: injective && predicted == m.dim(t),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FreenessReport { n, degrees })
}

/// `dim ker(Sq^1 on M_t) - rank(Sq^1 into M_t)`.
pub fn sq1_homology(m: &GradedModule, t: i32) -> Result<usize> {
    m.window().require_interior(t)?;
    let out = m.sq_or_zero(1, t)?;
    let inc = m.sq_or_zero(1, t - 1)?;
    let kernel = m.dim(t) - out.rank();
    Ok(kernel - inc.rank())
}

/// `dim K_n^k`: classes of `M_k / A(n)M_{<k}` whose `Sq^1` vanishes in
/// `M_{k+1} / A(n)M_{<k}`.
///
/// In degree `k + 1`, `A(n)M_{<k}` is `Sq^1` of the decomposables of degree
/// `k` plus `Sq^g M_{k+1-g}` for the generators `g >= 2`.
pub fn sq1_kernel_on_indecomposables(m: &GradedModule, n: u32, k: i32) -> Result<usize> {
    m.window().require_interior(k)?;
    m.window().require(k + 1)?;
    let dec = decomposables(m, Level::Sub(n), k)?;
    let sq1 = m.sq_or_zero(1, k)?;
    let mut rel = EchelonBasis::new(m.dim(k + 1));
    for v in dec.vectors() {
        rel.insert(&sq1.mul_vec(v));
    }
    let reach = (k + 1 - m.window().lo).max(0) as u32;
    for g in Level::Sub(n).generators(reach) {
        if g < 2 || m.dim(k + 1 - g as i32) == 0 {
            continue;
        }
        let mat = m.sq(g, k + 1 - g as i32)?;
        for c in 0..mat.cols() {
            rel.insert(&mat.column(c));
        }
    }
    let base = rel.dim();
    let mut image = rel;
    for c in 0..sq1.cols() {
        image.insert(&sq1.column(c));
    }
    let rank = image.dim() - base;
    Ok(m.dim(k) - rank - dec.dim())
}

/// A degree-shifting linear map between windowed modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    pub shift: i32,
    /// Source degree to matrix `target_{t + shift} <- source_t`.
    pub matrices: BTreeMap<i32, BitMatrix>,
}

impl ModuleMap {
    pub fn new(shift: i32) -> Self {
        ModuleMap {
            shift,
            matrices: BTreeMap::new(),
        }
    }

    pub fn identity(m: &GradedModule) -> Self {
        ModuleMap {
            shift: 0,
            matrices: m
                .window()
                .degrees()
                .map(|t| (t, BitMatrix::identity(m.dim(t))))
                .collect(),
        }
    }

    pub fn at(&self, t: i32) -> Option<&BitMatrix> {
        self.matrices.get(&t)
    }

    pub fn apply(&self, t: i32, v: &BitVector) -> Option<BitVector> {
        self.at(t).map(|m| m.mul_vec(v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearityViolation {
    pub k: u32,
    pub degree: i32,
    pub basis_index: usize,
}

/// Lists every `(k, t, basis element)` where `f Sq^k != Sq^k f`, over the
/// degrees where both composites are defined, for `1 <= k <= max_k`.
pub fn check_linearity(
    f: &ModuleMap,
    source: &GradedModule,
    target: &GradedModule,
    max_k: u32,
) -> Vec<LinearityViolation> {
    let mut out = Vec::new();
    for (&t, ft) in &f.matrices {
        for k in 1..=max_k {
            let up = t + k as i32;
            let Some(fup) = f.at(up) else { continue };
            let (Ok(sk), Ok(tk)) = (source.sq(k, t), target.sq(k, t + f.shift)) else {
                continue;
            };
            let lhs = fup.mul(&sk);
            let rhs = tk.mul(ft);
            if lhs != rhs {
                for c in 0..lhs.cols() {
                    if lhs.column(c) != rhs.column(c) {
                        out.push(LinearityViolation {
                            k,
                            degree: t,
                            basis_index: c,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Serialized form of a module: the window, labels per degree, the stored
/// operations and every nonzero action entry as `[k, t, row, col]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleJson {
    pub name: String,
    pub window: DegreeWindow,
    #[serde(default)]
    pub suspension: i32,
    pub ops: Vec<u32>,
    pub basis: Vec<Vec<String>>,
    pub action: Vec<[i64; 4]>,
}

impl GradedModule {
    pub fn to_json_value(&self) -> ModuleJson {
        let mut action: Vec<[i64; 4]> = self
            .action
            .iter()
            .flat_map(|(&(k, t), m)| m.entries().into_iter().map(move |(r, c)| [k as i64, t as i64, r as i64, c as i64]))
            .collect();
        action.sort_unstable();
        ModuleJson {
            name: self.name.clone(),
            window: self.window,
            suspension: self.suspension,
            ops: self.ops.clone(),
            basis: self.basis.clone(),
            action,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("module serializes")
    }

    pub fn from_json_value(j: ModuleJson) -> Result<GradedModule> {
        let w = j.window;
        if w.hi < w.lo {
            return Err(Error::Parse("empty window".into()));
        }
        let dim = |t: i64| -> Option<usize> {
            (t >= w.lo as i64 && t <= w.hi as i64).then(|| j.basis.get((t - w.lo as i64) as usize).map_or(0, Vec::len))
        };
        let mut action: HashMap<(u32, i32), BitMatrix> = HashMap::new();
        for &[k, t, r, c] in &j.action {
            let (Some(src), Some(dst)) = (dim(t), dim(t + k)) else {
                return Err(Error::Parse(format!("entry [{k}, {t}, {r}, {c}] leaves the window")));
            };
            if k < 0 || r < 0 || c < 0 || r as usize >= dst || c as usize >= src {
                return Err(Error::Parse(format!("entry [{k}, {t}, {r}, {c}] is out of range")));
            }
            action
                .entry((k as u32, t as i32))
                .or_insert_with(|| BitMatrix::zeros(dst, src))
                .set(r as usize, c as usize, true);
        }
        Ok(GradedModule::from_parts(j.name, w, j.basis, j.ops, action)?.with_suspension(j.suspension))
    }

    pub fn from_json(s: &str) -> Result<GradedModule> {
        let j: ModuleJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        GradedModule::from_json_value(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_points() -> GradedModule {
        // F2 in degrees 0 and 1 with zero action.
        GradedModule::from_parts(
            "F2+F2[1]",
            DegreeWindow::new(0, 1, 0),
            vec![vec!["x0".into()], vec!["x1".into()]],
            vec![1],
            HashMap::new(),
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip_is_exact() {
        let m = free_module(Some(1), &[0, 2], 0, 8).with_margin(1);
        let s = m.to_json();
        let back = GradedModule::from_json(&s).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_json(), s);
        assert!(GradedModule::from_json("{}").is_err());
    }

    #[test]
    fn trivial_module_is_sound() {
        let m = trivial_module();
        assert!(verify_action(&m).is_empty());
        assert_eq!(indecomposables(&m, Level::Full, 0).unwrap().dim, 1);
        assert_eq!(sq1_homology(&m, 0).unwrap(), 1);
    }

    #[test]
    fn free_a1_module_dimensions() {
        let m = free_module(Some(1), &[0], 0, 8);
        let dims: Vec<usize> = (0..=8).map(|t| m.dim(t)).collect();
        assert_eq!(dims, vec![1, 1, 1, 2, 1, 1, 1, 0, 0]);
        let r = freeness_check(&m, 1, 0, 8).unwrap();
        assert!(r.pass(), "{r:?}");
        assert_eq!(sq1_homology(&m, 3).unwrap(), 0);
    }

    #[test]
    fn free_modules_round_trip_through_freeness() {
        for n in 0..=2 {
            let gens = [0, 3, 3, 7];
            let m = free_module(Some(n), &gens, 0, 30);
            let r = freeness_check(&m, n, 0, 30).unwrap();
            assert!(r.pass(), "n = {n}: {:?}", r.first_failure());
        }
    }

    #[test]
    fn trivial_pair_is_not_free() {
        let m = two_points();
        let r = freeness_check(&m, 1, 0, 1).unwrap();
        assert!(r.degrees[0].pass);
        assert!(!r.degrees[1].pass);
    }

    #[test]
    fn corrupted_action_is_reported() {
        let mut m = free_module(None, &[0], 0, 8);
        assert!(verify_action(&m).is_empty());
        m.flip_action_entry(1, 2, 0, 0);
        assert!(!verify_action(&m).is_empty());
    }

    #[test]
    fn free_a_module_indecomposables() {
        let m = free_module(None, &[0], 0, 10);
        assert_eq!(indecomposables(&m, Level::Full, 0).unwrap().dim, 1);
        for t in 1..=10 {
            assert_eq!(indecomposables(&m, Level::Full, t).unwrap().dim, 0);
        }
    }

    #[test]
    fn apply_composes_right_to_left() {
        let m = free_module(None, &[0], 0, 8);
        let g = m.element(0, &["1*g0[0]"]).unwrap();
        let word = SteenrodElement::from_word(&steenrod::SqWord::new([2, 1]));
        let direct = m.apply(&word, 0, &g).unwrap();
        let stepwise = m
            .apply_sq(2, 1, &m.apply_sq(1, 0, &g).unwrap())
            .unwrap();
        assert_eq!(direct, stepwise);
        assert_eq!(m.apply(&SteenrodElement::one(), 0, &g).unwrap(), g);
        assert!(matches!(
            m.apply(&SteenrodElement::sq(9), 0, &g),
            Err(Error::OutOfWindow { .. })
        ));
    }

    #[test]
    fn identity_map_is_linear() {
        let m = free_module(Some(1), &[0, 2], 0, 10);
        assert!(check_linearity(&ModuleMap::identity(&m), &m, &m, 8).is_empty());
    }

    #[test]
    fn map_to_sq1_cycle_is_not_linear() {
        // Source: free A(0)-module on g (g, Sq1 g); target: F2 in degrees 0, 1
        // with zero action. Sending g to x0 and Sq1 g to x1 breaks linearity.
        let src = free_module(Some(0), &[0], 0, 1);
        let tgt = two_points();
        let mut f = ModuleMap::new(0);
        f.matrices.insert(0, BitMatrix::identity(1));
        f.matrices.insert(1, BitMatrix::identity(1));
        assert!(!check_linearity(&f, &src, &tgt, 1).is_empty());
    }

    #[test]
    fn tensor_of_free_modules() {
        let a = free_module(Some(0), &[0], 0, 1);
        let t = tensor_product(&a, &a, 0, 2, 2);
        assert!(verify_action(&t).is_empty());
        assert_eq!((0..=2).map(|d| t.dim(d)).collect::<Vec<_>>(), vec![1, 2, 1]);
        assert_eq!(sq1_homology(&t, 1).unwrap(), 0);
    }
}
