//! The mod-2 Steenrod algebra in the admissible basis.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::f2linalg::{binom_mod2, BitVector, EchelonBasis};

/// A word `Sq^{i1} Sq^{i2} ... Sq^{ik}`; the empty word is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct SqWord(Vec<u32>);

impl SqWord {
    /// Builds a word, dropping `Sq^0` factors.
    pub fn new<I: IntoIterator<Item = u32>>(exponents: I) -> Self {
        SqWord(exponents.into_iter().filter(|&e| e > 0).collect())
    }

    pub fn unit() -> Self {
        SqWord(Vec::new())
    }

    pub fn sq(k: u32) -> Self {
        SqWord::new([k])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_admissible(&self) -> bool {
        self.0.windows(2).all(|w| w[0] >= 2 * w[1])
    }

    pub fn concat(&self, other: &SqWord) -> SqWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SqWord(v)
    }

    /// Parses `Sq(3,1)`, `Sq()` or `1`.
    pub fn parse(s: &str) -> Option<SqWord> {
        let s = s.trim();
        if s == "1" {
            return Some(SqWord::unit());
        }
        let inner = s.strip_prefix("Sq(")?.strip_suffix(')')?;
        if inner.trim().is_empty() {
            return Some(SqWord::unit());
        }
        let exps: Option<Vec<u32>> = inner.split(',').map(|p| p.trim().parse().ok()).collect();
        let exps = exps?;
        if exps.contains(&0) {
            return None;
        }
        Some(SqWord(exps))
    }
}

impl fmt::Display for SqWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        write!(f, "Sq(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// An F2-linear combination of admissible words of one degree.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SteenrodElement {
    degree: u32,
    terms: BTreeSet<SqWord>,
}

impl SteenrodElement {
    pub fn zero(degree: u32) -> Self {
        SteenrodElement {
            degree,
            terms: BTreeSet::new(),
        }
    }

    pub fn one() -> Self {
        SteenrodElement::from_admissible(SqWord::unit())
    }

    pub fn sq(k: u32) -> Self {
        SteenrodElement::from_admissible(SqWord::sq(k))
    }

    fn from_admissible(w: SqWord) -> Self {
        debug_assert!(w.is_admissible());
        SteenrodElement {
            degree: w.degree(),
            terms: BTreeSet::from([w]),
        }
    }

    /// Reduces an arbitrary word to the admissible basis.
    pub fn from_word(w: &SqWord) -> Self {
        adem_reduce(w)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = &SqWord> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_assign(&mut self, other: &SteenrodElement) {
        assert_eq!(self.degree, other.degree, "adding elements of different degree");
        for t in &other.terms {
            toggle(&mut self.terms, t.clone());
        }
    }

    pub fn add(&self, other: &SteenrodElement) -> SteenrodElement {
        let mut s = self.clone();
        s.add_assign(other);
        s
    }

    pub fn product(&self, other: &SteenrodElement) -> SteenrodElement {
        product(self, other)
    }

    /// Coordinates in the admissible basis of its degree.
    pub fn to_vector(&self) -> BitVector {
        let index = basis_index(self.degree);
        BitVector::from_support(index.len(), self.terms.iter().map(|w| index[w]))
    }

    pub fn from_vector(degree: u32, v: &BitVector) -> SteenrodElement {
        let b = basis(degree);
        assert_eq!(v.len(), b.len());
        SteenrodElement {
            degree,
            terms: v.support().map(|i| b[i].clone()).collect(),
        }
    }
}

impl fmt::Display for SteenrodElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Same order as `basis`: descending lexicographic.
        for (i, t) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

fn toggle(set: &mut BTreeSet<SqWord>, w: SqWord) {
    if !set.remove(&w) {
        set.insert(w);
    }
}

type Memo<K, V> = OnceLock<RwLock<HashMap<K, V>>>;

fn memo_get<K, V, F>(memo: &'static Memo<K, V>, key: &K, compute: F) -> V
where
    K: std::hash::Hash + Eq + Clone,
    V: Clone,
    F: FnOnce() -> V,
{
    let table = memo.get_or_init(|| RwLock::new(HashMap::new()));
    if let Some(v) = table.read().expect("memo lock").get(key) {
        return v.clone();
    }
    // Computed outside the lock: recursion re-enters the table.
    let v = compute();
    table
        .write()
        .expect("memo lock")
        .entry(key.clone())
        .or_insert(v)
        .clone()
}

static ADEM: Memo<Vec<u32>, Arc<BTreeSet<SqWord>>> = OnceLock::new();

/// Rewrites a word into admissible form, fixing the leftmost inadmissible pair
/// first.
pub fn adem_reduce(word: &SqWord) -> SteenrodElement {
    SteenrodElement {
        degree: word.degree(),
        terms: (*reduce_terms(&word.0)).clone(),
    }
}

fn reduce_terms(w: &[u32]) -> Arc<BTreeSet<SqWord>> {
    let Some(p) = w.windows(2).position(|pair| pair[0] < 2 * pair[1]) else {
        return Arc::new(BTreeSet::from([SqWord(w.to_vec())]));
    };
    memo_get(&ADEM, &w.to_vec(), || {
        let (a, b) = (w[p] as i64, w[p + 1] as i64);
        let mut out = BTreeSet::new();
        for j in 0..=a / 2 {
            if !binom_mod2(b - 1 - j, a - 2 * j) {
                continue;
            }
            let mut next: Vec<u32> = w[..p].to_vec();
            next.push((a + b - j) as u32);
            if j > 0 {
                next.push(j as u32);
            }
            next.extend_from_slice(&w[p + 2..]);
            for t in reduce_terms(&next).iter() {
                toggle(&mut out, t.clone());
            }
        }
        Arc::new(out)
    })
}

/// Product in A; bilinear extension of word concatenation.
pub fn product(x: &SteenrodElement, y: &SteenrodElement) -> SteenrodElement {
    let mut out = SteenrodElement::zero(x.degree + y.degree);
    for a in &x.terms {
        for b in &y.terms {
            for t in reduce_terms(&a.concat(b).0).iter() {
                toggle(&mut out.terms, t.clone());
            }
        }
    }
    out
}

static GEN_WORDS: Memo<u32, Arc<BTreeSet<Vec<u32>>>> = OnceLock::new();

/// `Sq^k` as a sum of words in the generators `Sq^{2^i}`.
///
/// For `k = 2^j + r` with `0 < r < 2^j` the Adem relation for `Sq^r Sq^{2^j}`
/// has leading term `Sq^k`, which gives a recursion on smaller exponents.
pub fn generator_words(k: u32) -> Arc<BTreeSet<Vec<u32>>> {
    if k == 0 {
        return Arc::new(BTreeSet::from([Vec::new()]));
    }
    if k.is_power_of_two() {
        return Arc::new(BTreeSet::from([vec![k]]));
    }
    memo_get(&GEN_WORDS, &k, || {
        let b = 1u32 << (31 - k.leading_zeros());
        let r = k - b;
        let mut out = BTreeSet::new();
        let mut add = |w: Vec<u32>| {
            if !out.remove(&w) {
                out.insert(w);
            }
        };
        for w in generator_words(r).iter() {
            let mut w = w.clone();
            w.push(b);
            add(w);
        }
        for i in 1..=r / 2 {
            if !binom_mod2(b as i64 - 1 - i as i64, (r - 2 * i) as i64) {
                continue;
            }
            for left in generator_words(k - i).iter() {
                for right in generator_words(i).iter() {
                    let mut w = left.clone();
                    w.extend_from_slice(right);
                    add(w);
                }
            }
        }
        Arc::new(out)
    })
}

static BASIS: Memo<u32, Arc<Vec<SqWord>>> = OnceLock::new();
static BASIS_INDEX: Memo<u32, Arc<HashMap<SqWord, usize>>> = OnceLock::new();

/// Admissible words of a degree, in descending lexicographic order
/// (`Sq(3)` before `Sq(2,1)`).
pub fn basis(degree: u32) -> Arc<Vec<SqWord>> {
    memo_get(&BASIS, &degree, || {
        let mut out = Vec::new();
        admissible_sequences(degree, degree, &mut Vec::new(), &mut out);
        Arc::new(out)
    })
}

fn admissible_sequences(rest: u32, max_first: u32, prefix: &mut Vec<u32>, out: &mut Vec<SqWord>) {
    if rest == 0 {
        out.push(SqWord(prefix.clone()));
        return;
    }
    for first in (1..=max_first.min(rest)).rev() {
        // The tail must fit under first/2, and an admissible sequence headed by
        // m has degree at most 2m - 1.
        let tail = rest - first;
        if tail > 0 && tail > first.saturating_sub(1) {
            continue;
        }
        prefix.push(first);
        admissible_sequences(tail, first / 2, prefix, out);
        prefix.pop();
    }
}

pub fn basis_index(degree: u32) -> Arc<HashMap<SqWord, usize>> {
    memo_get(&BASIS_INDEX, &degree, || {
        Arc::new(
            basis(degree)
                .iter()
                .enumerate()
                .map(|(i, w)| (w.clone(), i))
                .collect(),
        )
    })
}

static CHI: Memo<u32, Arc<SteenrodElement>> = OnceLock::new();

/// The antipode on `Sq^k`, from `sum_i chi(Sq^i) Sq^{k-i} = 0`.
pub fn antipode_chi(k: u32) -> SteenrodElement {
    (*chi_sq(k)).clone()
}

fn chi_sq(k: u32) -> Arc<SteenrodElement> {
    if k == 0 {
        return Arc::new(SteenrodElement::one());
    }
    memo_get(&CHI, &k, || {
        let mut acc = SteenrodElement::zero(k);
        for i in 0..k {
            acc.add_assign(&product(&chi_sq(i), &SteenrodElement::sq(k - i)));
        }
        Arc::new(acc)
    })
}

/// The antipode on an arbitrary element: reverses words and conjugates letters.
pub fn chi(x: &SteenrodElement) -> SteenrodElement {
    let mut out = SteenrodElement::zero(x.degree);
    for w in &x.terms {
        let mut acc = SteenrodElement::one();
        for &e in w.0.iter().rev() {
            acc = product(&acc, &chi_sq(e));
        }
        out.add_assign(&acc);
    }
    out
}

/// Top nonzero degree of A(n).
pub fn subalgebra_top_degree(n: u32) -> u32 {
    (1..=n + 1)
        .map(|i| ((1u32 << (n + 2 - i)) - 1) * ((1u32 << i) - 1))
        .sum()
}

/// Degreewise basis of A(n), the subalgebra generated by `Sq^{2^i}`, `i <= n`.
#[derive(Clone, Debug)]
pub struct SubalgebraBasis {
    pub n: u32,
    /// `per_degree[d]` is a basis of A(n) in degree d.
    pub per_degree: Vec<Vec<SteenrodElement>>,
    /// For each basis element, a word in the generators `Sq^{2^i}` (`i <= n`)
    /// whose product is that element.
    pub words: Vec<Vec<SqWord>>,
}

impl SubalgebraBasis {
    pub fn dim(&self, degree: i64) -> usize {
        if degree < 0 {
            return 0;
        }
        self.per_degree.get(degree as usize).map_or(0, Vec::len)
    }

    pub fn total_dim(&self) -> usize {
        self.per_degree.iter().map(Vec::len).sum()
    }

    pub fn max_degree(&self) -> u32 {
        self.per_degree.len() as u32 - 1
    }
}

static SUBALGEBRA: Memo<(u32, u32), Arc<SubalgebraBasis>> = OnceLock::new();

/// Span closure: `A(n)_d = sum_i Sq^{2^i} A(n)_{d - 2^i}`.
pub fn subalgebra_basis(n: u32, max_degree: u32) -> Arc<SubalgebraBasis> {
    memo_get(&SUBALGEBRA, &(n, max_degree), || {
        let mut per_degree: Vec<Vec<SteenrodElement>> = vec![vec![SteenrodElement::one()]];
        let mut words: Vec<Vec<SqWord>> = vec![vec![SqWord::unit()]];
        for d in 1..=max_degree {
            let mut span = EchelonBasis::new(basis(d).len());
            let mut elems = Vec::new();
            let mut elem_words = Vec::new();
            for i in 0..=n {
                let g = 1u32 << i;
                if g > d {
                    break;
                }
                let gen = SteenrodElement::sq(g);
                let below = (d - g) as usize;
                for (y, wy) in per_degree[below].iter().zip(&words[below]) {
                    let p = product(&gen, y);
                    if span.insert(&p.to_vector()) {
                        elems.push(p);
                        elem_words.push(SqWord::sq(g).concat(wy));
                    }
                }
            }
            per_degree.push(elems);
            words.push(elem_words);
        }
        Arc::new(SubalgebraBasis {
            n,
            per_degree,
            words,
        })
    })
}

/// The whole of A(n), up to its top degree.
pub fn subalgebra(n: u32) -> Arc<SubalgebraBasis> {
    subalgebra_basis(n, subalgebra_top_degree(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn el(words: &[&[u32]]) -> SteenrodElement {
        let mut out: Option<SteenrodElement> = None;
        for w in words {
            let x = SteenrodElement::from_word(&SqWord::new(w.iter().copied()));
            match &mut out {
                None => out = Some(x),
                Some(o) => o.add_assign(&x),
            }
        }
        out.unwrap()
    }

    #[test]
    fn adem_examples() {
        assert!(adem_reduce(&SqWord::new([1, 1])).is_zero());
        assert_eq!(adem_reduce(&SqWord::new([1, 2])), el(&[&[3]]));
        assert_eq!(adem_reduce(&SqWord::new([2, 2])), el(&[&[3, 1]]));
        assert_eq!(adem_reduce(&SqWord::new([2, 3])), el(&[&[5]]).add(&el(&[&[4, 1]])));
    }

    #[test]
    fn product_examples() {
        let sq1 = SteenrodElement::sq(1);
        assert_eq!(product(&SteenrodElement::one(), &sq1), sq1);
        assert!(product(&sq1, &sq1).is_zero());
        let p = product(&SteenrodElement::sq(2), &sq1);
        assert_eq!(p.terms().collect::<Vec<_>>(), vec![&SqWord::new([2, 1])]);
    }

    #[test]
    fn basis_examples() {
        assert_eq!(*basis(0), vec![SqWord::unit()]);
        assert_eq!(*basis(3), vec![SqWord::new([3]), SqWord::new([2, 1])]);
        assert_eq!(*basis(5), vec![SqWord::new([5]), SqWord::new([4, 1])]);
        let six: Vec<String> = basis(6).iter().map(ToString::to_string).collect();
        assert_eq!(six, vec!["Sq(6)", "Sq(5,1)", "Sq(4,2)"]);
    }

    #[test]
    fn render_and_parse() {
        for d in 0..10 {
            for w in basis(d).iter() {
                assert_eq!(SqWord::parse(&w.to_string()).as_ref(), Some(w));
            }
        }
        assert_eq!(SqWord::parse("Sq()"), Some(SqWord::unit()));
        assert_eq!(SqWord::parse("Sq(0)"), None);
        assert_eq!(SqWord::parse("Sq(2,1"), None);
    }

    #[test]
    fn chi_examples() {
        assert_eq!(antipode_chi(0), SteenrodElement::one());
        assert_eq!(antipode_chi(1), el(&[&[1]]));
        assert_eq!(antipode_chi(2), el(&[&[2]]));
        assert_eq!(antipode_chi(3), el(&[&[2, 1]]));
    }

    #[test]
    fn chi_recursion_vanishes() {
        for k in 1..=24 {
            let mut acc = SteenrodElement::zero(k);
            for i in 0..=k {
                acc.add_assign(&product(&antipode_chi(i), &SteenrodElement::sq(k - i)));
            }
            assert!(acc.is_zero(), "k = {k}");
        }
    }

    #[test]
    fn chi_is_an_involution_and_anti_homomorphism() {
        for a in 0..=16u32 {
            for b in 0..=16 - a {
                let x = adem_reduce(&SqWord::new([a, b]));
                let lhs = chi(&x);
                let rhs = product(&antipode_chi(b), &antipode_chi(a));
                assert_eq!(lhs, rhs, "a={a} b={b}");
            }
        }
        for k in 0..12 {
            assert_eq!(chi(&antipode_chi(k)), SteenrodElement::sq(k));
        }
    }

    #[test]
    fn generator_words_reduce_to_sq() {
        for k in 0..=40 {
            let mut acc = SteenrodElement::zero(k);
            for w in generator_words(k).iter() {
                assert!(w.iter().all(|e| e.is_power_of_two()));
                acc.add_assign(&adem_reduce(&SqWord::new(w.iter().copied())));
            }
            assert_eq!(acc, SteenrodElement::sq(k), "k = {k}");
        }
    }

    #[test]
    fn subalgebra_dimensions() {
        assert_eq!(subalgebra_top_degree(0), 1);
        assert_eq!(subalgebra_top_degree(1), 6);
        assert_eq!(subalgebra_top_degree(2), 23);
        let a0 = subalgebra(0);
        assert_eq!(a0.total_dim(), 2);
        let a1 = subalgebra(1);
        assert_eq!(a1.total_dim(), 8);
        let dims: Vec<usize> = (0..=6).map(|d| a1.dim(d)).collect();
        assert_eq!(dims, vec![1, 1, 1, 2, 1, 1, 1]);
        assert_eq!(subalgebra_basis(1, 9).total_dim(), 8);
        assert_eq!(subalgebra(2).total_dim(), 64);
        let a2 = subalgebra(2);
        for (elems, words) in a2.per_degree.iter().zip(&a2.words) {
            for (e, w) in elems.iter().zip(words) {
                assert_eq!(&adem_reduce(w), e);
            }
        }
    }

    #[test]
    fn random_triples_associate() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0;
        while checked < 200 {
            let degs: Vec<u32> = (0..3).map(|_| rng.gen_range(0..=8)).collect();
            if degs.iter().sum::<u32>() > 16 {
                continue;
            }
            let pick = |d: u32, rng: &mut rand_chacha::ChaCha8Rng| {
                let b = basis(d);
                SteenrodElement::from_word(&b[rng.gen_range(0..b.len())])
            };
            let (x, y, z) = (pick(degs[0], &mut rng), pick(degs[1], &mut rng), pick(degs[2], &mut rng));
            assert_eq!(product(&product(&x, &y), &z), product(&x, &product(&y, &z)));
            checked += 1;
        }
    }

    proptest! {
        #[test]
        fn reduction_is_admissible_and_idempotent(w in proptest::collection::vec(1u32..7, 0..5)) {
            let r = adem_reduce(&SqWord::new(w.clone()));
            prop_assert_eq!(r.degree(), w.iter().sum::<u32>());
            for t in r.terms() {
                prop_assert!(t.is_admissible());
                let again = adem_reduce(t);
                prop_assert_eq!(again.terms().collect::<Vec<_>>(), vec![t]);
            }
        }
    }
}
