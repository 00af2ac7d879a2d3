//! Exact linear algebra over F2, plus mod-2 binomial arithmetic.
//!
//! Vectors and matrices are bit-packed into `u64` words; a matrix is a
//! sequence of packed rows so that row reduction is word-level XOR.

use std::fmt;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over F2 of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector from the positions holding 1. Repeated positions cancel.
    pub fn from_support<I: IntoIterator<Item = usize>>(len: usize, support: I) -> Self {
        let mut v = BitVector::zeros(len);
        for i in support {
            v.flip(i);
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        BitVector::from_support(len, [i])
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// F2 inner product.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Positions holding 1, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    pub fn first_one(&self) -> Option<usize> {
        self.support().next()
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut v = BitVector::zeros(self.len + other.len);
        for i in self.support() {
            v.set(i, true);
        }
        for i in other.support() {
            v.set(self.len + i, true);
        }
        v
    }

    /// Sub-vector `[start, start + len)`.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len);
        BitVector::from_support(
            len,
            self.support()
                .filter(|&i| i >= start && i < start + len)
                .map(|i| i - start),
        )
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "[{s}]")
    }
}

/// A `rows × cols` matrix over F2, stored as packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

/// Output of [`BitMatrix::row_reduce`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowReduced {
    pub reduced: BitMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from the positions holding 1. Panics if a position lies
    /// outside the shape; repeated positions cancel.
    pub fn from_entries<I: IntoIterator<Item = (usize, usize)>>(
        rows: usize,
        cols: usize,
        entries: I,
    ) -> Self {
        let mut m = BitMatrix::zeros(rows, cols);
        for (r, c) in entries {
            m.flip(r, c);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Self {
        for r in &rows {
            assert_eq!(r.len(), cols, "row length mismatch");
        }
        BitMatrix {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Self {
        let mut m = BitMatrix::zeros(rows, columns.len());
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length mismatch");
            for r in col.support() {
                m.set(r, c, true);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value)
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.data[r]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.data
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_support(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVector::is_zero)
    }

    /// All `(row, col)` positions holding 1, in row-major order.
    pub fn entries(&self) -> Vec<(usize, usize)> {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.support().map(move |c| (r, c)))
            .collect()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (r, c) in self.entries() {
            t.set(c, r, true);
        }
        t
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        BitVector::from_support(
            self.rows,
            (0..self.rows).filter(|&r| self.data[r].dot(v)),
        )
    }

    /// `self · other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "matrix product shape mismatch");
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let acc = &mut out.data[r];
            for k in row.support() {
                acc.xor_assign(&other.data[k]);
            }
        }
        out
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
        out
    }

    /// Stacks `self` above `other`.
    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        BitMatrix::from_rows(self.cols, data)
    }

    /// Places `self` to the left of `other`.
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows);
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.concat(b))
            .collect();
        BitMatrix::from_rows(self.cols + other.cols, data)
    }

    /// Reduced row-echelon form. Row space is preserved; zero rows go last.
    pub fn row_reduce(&self) -> RowReduced {
        let mut rows = self.data.clone();
        let mut pivots = Vec::new();
        let mut next = 0;
        for col in 0..self.cols {
            if next == rows.len() {
                break;
            }
            let Some(p) = (next..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(next, p);
            let pivot_row = rows[next].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != next && row.get(col) {
                    row.xor_assign(&pivot_row);
                }
            }
            pivots.push(col);
            next += 1;
        }
        let rank = pivots.len();
        RowReduced {
            reduced: BitMatrix::from_rows(self.cols, rows),
            pivots,
            rank,
        }
    }

    pub fn rank(&self) -> usize {
        // Eliminate on the smaller side.
        if self.rows <= self.cols {
            self.row_reduce().rank
        } else {
            self.transpose().row_reduce().rank
        }
    }

    /// A basis of `{ v : self · v = 0 }`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let RowReduced {
            reduced, pivots, ..
        } = self.row_reduce();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVector::unit(self.cols, free);
                for (r, &p) in pivots.iter().enumerate() {
                    if reduced.get(r, free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }

    /// Some `x` with `self · x = b`, free variables set to zero; `None` if the
    /// system is inconsistent.
    pub fn solve(&self, b: &BitVector) -> Option<BitVector> {
        assert_eq!(b.len(), self.rows, "right-hand side length mismatch");
        let augmented = BitMatrix::from_rows(
            self.cols + 1,
            self.data
                .iter()
                .enumerate()
                .map(|(r, row)| row.concat(&BitVector::from_support(1, b.get(r).then_some(0))))
                .collect(),
        );
        let RowReduced {
            reduced, pivots, ..
        } = augmented.row_reduce();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = BitVector::zeros(self.cols);
        for (r, &p) in pivots.iter().enumerate() {
            if reduced.get(r, self.cols) {
                x.set(p, true);
            }
        }
        Some(x)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for row in &self.data {
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// Incrementally maintained row-echelon basis of a subspace of F2^n.
///
/// Used wherever a span is grown one vector at a time (decomposables,
/// closures, generator selection).
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    len: usize,
    // (pivot column, row) with the row's lowest set bit at the pivot.
    rows: Vec<(usize, BitVector)>,
    pivot_of: Vec<Option<usize>>,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        EchelonBasis {
            len,
            rows: Vec::new(),
            pivot_of: vec![None; len],
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.len
    }

    /// Reduces `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut v = v.clone();
        // Rows are stored so that each pivot is the row's lowest set bit;
        // sweeping in ascending pivot order clears every pivot position.
        loop {
            let mut changed = false;
            for i in v.support().collect::<Vec<_>>() {
                if !v.get(i) {
                    continue;
                }
                if let Some(r) = self.pivot_of[i] {
                    v.xor_assign(&self.rows[r].1);
                    changed = true;
                }
            }
            if !changed {
                return v;
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` to the span; returns true if the dimension grew.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.len);
        let r = self.reduce(v);
        match r.first_one() {
            None => false,
            Some(p) => {
                self.pivot_of[p] = Some(self.rows.len());
                self.rows.push((p, r));
                true
            }
        }
    }

    pub fn vectors(&self) -> impl Iterator<Item = &BitVector> {
        self.rows.iter().map(|(_, v)| v)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|(p, _)| *p)
    }
}

/// `binom(n, k) mod 2` for any integer `n` and `k ≥ 0`.
///
/// Negative `n` uses `binom(n, k) = (-1)^k binom(k - n - 1, k)`, so the value
/// is Lucas' criterion applied to `k - n - 1`. `k < 0` gives 0.
pub fn binom_mod2(n: i64, k: i64) -> bool {
    if k < 0 {
        return false;
    }
    let top = if n >= 0 { n } else { k - n - 1 };
    top & k == k
}

/// The multinomial `n! / (a! b! (n-a-b)!)` mod 2, as `binom(n,a)·binom(n-a,b)`.
pub fn multinom_mod2(n: i64, a: i64, b: i64) -> bool {
    binom_mod2(n, a) && binom_mod2(n - a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mat(rows: &[&[u8]]) -> BitMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        BitMatrix::from_entries(
            rows.len(),
            cols,
            rows.iter().enumerate().flat_map(|(r, row)| {
                row.iter()
                    .enumerate()
                    .filter(|(_, &b)| b == 1)
                    .map(move |(c, _)| (r, c))
            }),
        )
    }

    fn arb_matrix() -> impl Strategy<Value = BitMatrix> {
        (0usize..9, 0usize..9).prop_flat_map(|(r, c)| {
            proptest::collection::vec(any::<bool>(), r * c).prop_map(move |bits| {
                BitMatrix::from_entries(
                    r,
                    c,
                    bits.iter()
                        .enumerate()
                        .filter(|(_, &b)| b)
                        .map(|(i, _)| (i / c.max(1), i % c.max(1))),
                )
            })
        })
    }

    #[test]
    fn row_reduce_examples() {
        let id = BitMatrix::identity(2).row_reduce();
        assert_eq!(id.pivots, vec![0, 1]);
        assert_eq!(id.rank, 2);

        let z = BitMatrix::zeros(3, 3).row_reduce();
        assert!(z.pivots.is_empty());
        assert_eq!(z.rank, 0);

        let ones = mat(&[&[1, 1], &[1, 1]]).row_reduce();
        assert_eq!(ones.rank, 1);
        assert_eq!(ones.pivots, vec![0]);
    }

    #[test]
    fn kernel_examples() {
        assert!(BitMatrix::identity(2).kernel_basis().is_empty());
        assert_eq!(BitMatrix::zeros(1, 3).kernel_basis().len(), 3);
        let k = mat(&[&[1, 1]]).kernel_basis();
        assert_eq!(k, vec![BitVector::from_support(2, [0, 1])]);
        // exhaustive: the only nonzero kernel vector of [1 1] over F2^2
        let m = mat(&[&[1, 1]]);
        let nonzero: Vec<_> = (1u8..4)
            .map(|x| BitVector::from_support(2, (0..2).filter(|i| x >> i & 1 == 1)))
            .filter(|v| m.mul_vec(v).is_zero())
            .collect();
        assert_eq!(nonzero, k);
    }

    #[test]
    fn solve_examples() {
        let b = BitVector::from_support(3, [0, 2]);
        assert_eq!(BitMatrix::identity(3).solve(&b), Some(b.clone()));

        let m = mat(&[&[1, 1]]);
        let x = m.solve(&BitVector::from_support(1, [0])).unwrap();
        // free variable zeroed: the pivot column carries the solution
        assert_eq!(x, BitVector::from_support(2, [0]));
        assert!(m.mul_vec(&x).get(0));

        assert_eq!(
            BitMatrix::zeros(1, 1).solve(&BitVector::from_support(1, [0])),
            None
        );
    }

    #[test]
    fn binomial_examples() {
        for l in -20..20 {
            assert!(binom_mod2(l, 0));
        }
        for k in 0..40 {
            assert!(binom_mod2(-1, k), "binom(-1,{k})");
        }
        assert!(!binom_mod2(5, 2));
        assert!(binom_mod2(5, 1));
        assert!(!binom_mod2(3, 4));
        assert!(!binom_mod2(2, -1));
    }

    #[test]
    fn multinomial_examples() {
        assert!(multinom_mod2(7, 0, 0));
        assert!(multinom_mod2(-3, 0, 0));
        assert!(!multinom_mod2(2, 1, 1));
        assert!(multinom_mod2(3, 1, 2));
    }

    /// Factorial-formula oracle for binom(n, k), n of either sign.
    fn binom_exact(n: i64, k: i64) -> i128 {
        let mut num: i128 = 1;
        let mut den: i128 = 1;
        for i in 0..k {
            num *= (n - i) as i128;
            den *= (i + 1) as i128;
        }
        num / den
    }

    #[test]
    fn binomial_matches_factorial_formula() {
        for n in -12..=12 {
            for k in 0..=10 {
                assert_eq!(
                    binom_mod2(n, k),
                    binom_exact(n, k).rem_euclid(2) == 1,
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn pascal_mod2() {
        for n in -32..=32 {
            for k in 1..=32 {
                assert_eq!(
                    binom_mod2(n, k),
                    binom_mod2(n - 1, k) ^ binom_mod2(n - 1, k - 1),
                    "n={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn echelon_basis_tracks_span() {
        let mut e = EchelonBasis::new(4);
        assert!(e.insert(&BitVector::from_support(4, [0, 1])));
        assert!(e.insert(&BitVector::from_support(4, [1, 2])));
        assert!(!e.insert(&BitVector::from_support(4, [0, 2])));
        assert!(e.contains(&BitVector::zeros(4)));
        assert!(!e.contains(&BitVector::from_support(4, [3])));
        assert_eq!(e.dim(), 2);
    }

    proptest! {
        #[test]
        fn row_reduce_idempotent(m in arb_matrix()) {
            let once = m.row_reduce();
            let twice = once.reduced.row_reduce();
            prop_assert_eq!(&once.reduced, &twice.reduced);
            prop_assert_eq!(once.rank, m.transpose().row_reduce().rank);
        }

        #[test]
        fn kernel_is_kernel(m in arb_matrix()) {
            let k = m.kernel_basis();
            for v in &k {
                prop_assert!(m.mul_vec(v).is_zero());
            }
            prop_assert_eq!(k.len() + m.row_reduce().rank, m.cols());
            if !k.is_empty() {
                prop_assert_eq!(BitMatrix::from_rows(m.cols(), k).rank(), m.cols() - m.rank());
            }
        }

        #[test]
        fn solve_finds_solutions(m in arb_matrix(), seed in any::<u64>()) {
            let x0 = BitVector::from_support(m.cols(), (0..m.cols()).filter(|i| seed >> (i % 64) & 1 == 1));
            let b = m.mul_vec(&x0);
            let x = m.solve(&b).expect("consistent system");
            prop_assert_eq!(m.mul_vec(&x), b);
        }

        #[test]
        fn multinomial_symmetric(n in -40i64..40, a in 0i64..12, b in 0i64..12) {
            prop_assert_eq!(multinom_mod2(n, a, b), multinom_mod2(n, b, a));
        }
    }
}
