//! The `xi_2`-adic pieces of the unoriented `WH*`.
//!
//! `WH*` is predual to `H_*(BO)[xi_2^{-1}]`. For an integer `l` let `I_l` be
//! the span of `xi_2^e p` with `e < l`; its annihilator `Ann(I_l)` is an
//! A-submodule of `WH*`, bounded below in degree `2l`, and is abstractly
//! `Sigma^{2l} H*(MTO)`. Unlike the rectangular windows of [`build_wh`] these
//! pieces are honest A-modules, so freeness and Tor can be tested on them
//! without boundary artifacts.
//!
//! The annihilator is cut out by the functionals `mu~(xi_2^e p, -)` where `p`
//! runs over `{1, v_1}` times monomials in `v_2, v_3, ...`. Elements of
//! degree `t` live on generators `2l <= l' <= t` with coefficient degree at
//! most `t - 2l`, so a rectangular window with `gen_lo = 2l`, `d = hi` and
//! `coeff_max = hi - 2l` holds all of them. Every degree is certified by
//! comparing the kernel dimension with the partition count `p(t - 2l)`.

use std::collections::HashMap;

use rayon::prelude::*;

use super::homology::{pairing, slant_coefficients, v_basis, RMonomial, VMonomial};
use super::sw::partitions;
use super::{build_wh, wh_label, WhLayout, WhParams};
use crate::error::{Error, Result};
use crate::f2linalg::{BitMatrix, BitVector, EchelonBasis};
use crate::gradmod::{DegreeWindow, GradedModule, OpSet};

/// `Ann(I_l)` on degrees `[2l, hi]` together with its embedding in `WH*`.
#[derive(Clone, Debug)]
pub struct AdicPiece {
    pub l: i32,
    pub hi: i32,
    pub params: WhParams,
    /// Per degree, the basis in the coordinates of the rectangular window.
    pub embedding: Vec<Vec<BitVector>>,
    pub module: GradedModule,
}

impl AdicPiece {
    pub fn embedded(&self, t: i32) -> &[BitVector] {
        &self.embedding[(t - 2 * self.l) as usize]
    }
}

/// Number of partitions of `n`.
pub fn partition_count(n: i64) -> usize {
    if n < 0 {
        return 0;
    }
    if n == 0 {
        return 1;
    }
    partitions(n as u32, 1, n as u16).len()
}

/// Homology functionals `v_1^eps * v^J` (`J` free of `v_1`) of degree `deg`
/// whose weight `sum_i (i - 1) j_i` is at most `max_weight`.
fn functional_tails(deg: i64, max_weight: i64) -> Vec<(i32, Vec<u32>)> {
    let mut out = Vec::new();
    for eps in 0..=1i64 {
        let ds = deg - eps;
        if ds < 0 || ds == 1 {
            continue;
        }
        let parts = if ds == 0 {
            vec![super::sw::Monomial::one()]
        } else {
            partitions(ds as u32, 2, ds as u16)
        };
        for p in parts {
            let weight: i64 = p.indices().iter().map(|&i| i as i64 - 1).sum();
            if weight > max_weight {
                continue;
            }
            let mut mult = Vec::new();
            for &i in p.indices() {
                let k = i as usize - 2;
                if mult.len() <= k {
                    mult.resize(k + 1, 0);
                }
                mult[k] += 1;
            }
            out.push((eps as i32, mult));
        }
    }
    out
}

/// Builds `Ann(I_l)` on `[2l, hi]`. `ops` selects the stored operations; the
/// default is every `Sq^k` up to the span.
pub fn build_wh_adic(l: i32, hi: i32, ops: Option<OpSet>) -> Result<AdicPiece> {
    let lo = 2 * l;
    if hi < lo {
        return Err(Error::WindowTooSmall(format!("top degree {hi} below 2l = {lo}")));
    }
    let span = (hi - lo) as u32;
    let ops = ops.unwrap_or(OpSet::UpTo(span));
    let params = WhParams::new(hi, lo, span, false)
        .degree_hi(hi)
        .ops(ops.clone());
    let layout = WhLayout::new(&params);
    let columns = pairing_columns(&layout, span);
    let embedding: Vec<Vec<BitVector>> = (lo..=hi)
        .into_par_iter()
        .map(|t| annihilator_slice(&layout, &columns, l, t))
        .collect::<Result<_>>()?;
    let wh = build_wh(&params);

    let basis: Vec<Vec<String>> = (lo..=hi)
        .map(|t| {
            embedding[(t - lo) as usize]
                .iter()
                .map(|v| {
                    let (lp, m) = layout.cell(t, v.first_one().expect("nonzero basis vector"));
                    wh_label(lp, m)
                })
                .collect()
        })
        .collect();

    let op_list = ops.list();
    let jobs: Vec<(u32, i32)> = op_list
        .iter()
        .flat_map(|&k| (lo..=hi - k as i32).map(move |t| (k, t)))
        .collect();
    let action: HashMap<(u32, i32), BitMatrix> = jobs
        .par_iter()
        .map(|&(k, t)| {
            let src = &embedding[(t - lo) as usize];
            let dst = &embedding[(t + k as i32 - lo) as usize];
            let sq = wh.sq(k, t)?;
            let cols = src
                .iter()
                .map(|b| {
                    coordinates(dst, &sq.mul_vec(b)).ok_or_else(|| {
                        Error::Integrity(format!("Sq^{k} leaves Ann(I_{l}) in degree {t}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(((k, t), BitMatrix::from_columns(dst.len(), &cols)))
        })
        .collect::<Result<_>>()?;
    let module = GradedModule::from_parts(
        format!("Ann(I_{l}) in WH*, degrees <= {hi}"),
        DegreeWindow::new(lo, hi, 0),
        basis,
        op_list,
        action,
    )?;
    Ok(AdicPiece {
        l,
        hi,
        params,
        embedding,
        module,
    })
}

/// For each degree `m <= max_m`, the map `v -> (<x, v>)_x` over the
/// coefficient basis of the window's Stiefel-Whitney ring.
fn pairing_columns(layout: &WhLayout, max_m: u32) -> Vec<HashMap<VMonomial, BitVector>> {
    (0..=max_m)
        .map(|m| {
            let xs = layout.ring.basis(m);
            v_basis(m)
                .into_iter()
                .map(|v| {
                    let col = BitVector::from_support(
                        xs.len(),
                        (0..xs.len()).filter(|&i| {
                            let w: Vec<u32> = xs[i].indices().iter().map(|&k| k as u32).collect();
                            pairing(&w, &v)
                        }),
                    );
                    (v, col)
                })
                .collect()
        })
        .collect()
}

/// Echelon basis of `Ann(I_l)_t` inside the rectangular window, pivots being
/// the lowest set bits.
fn annihilator_slice(
    layout: &WhLayout,
    columns: &[HashMap<VMonomial, BitVector>],
    l: i32,
    t: i32,
) -> Result<Vec<BitVector>> {
    let cols = layout.dim(t);
    let max_weight = layout.params.coeff_max as i64;
    let max_m = (t - layout.params.gen_lo) as u32;
    let mut rows = Vec::new();
    for e in (1..).map(|k| l - k) {
        let deg = t as i64 - 2 * e as i64;
        if deg > 2 * max_weight + 1 {
            break;
        }
        for (eps, rest) in functional_tails(deg, max_weight) {
            let r = RMonomial { xi2: e, v1: eps, rest };
            let slant = slant_coefficients(&r, max_m);
            let mut row = BitVector::zeros(cols);
            for (m, c) in slant.iter().enumerate() {
                let lp = t - m as i32;
                let mut acc = BitVector::zeros(layout.ring.dim(m as u32));
                for v in c {
                    acc.xor_assign(&columns[m][v]);
                }
                for idx in acc.support() {
                    if let Some(pos) = layout.position(t, lp, idx) {
                        row.set(pos, true);
                    }
                }
            }
            rows.push(row);
        }
    }
    let kernel = BitMatrix::from_rows(cols, rows).kernel_basis();
    let expected = partition_count((t - 2 * l) as i64);
    if kernel.len() != expected {
        return Err(Error::Integrity(format!(
            "Ann(I_{l}) in degree {t} has dimension {} instead of {expected}",
            kernel.len()
        )));
    }
    let mut ech = EchelonBasis::new(cols);
    for v in &kernel {
        ech.insert(v);
    }
    let mut basis: Vec<BitVector> = ech.vectors().cloned().collect();
    basis.sort_by_key(|v| v.first_one());
    Ok(basis)
}

/// Coordinates of `v` in a basis with distinct lowest set bits.
fn coordinates(basis: &[BitVector], v: &BitVector) -> Option<BitVector> {
    let pivot: HashMap<usize, usize> = basis
        .iter()
        .enumerate()
        .map(|(i, b)| (b.first_one().expect("nonzero basis vector"), i))
        .collect();
    let mut rest = v.clone();
    let mut out = BitVector::zeros(basis.len());
    while let Some(p) = rest.first_one() {
        let &i = pivot.get(&p)?;
        rest.xor_assign(&basis[i]);
        out.flip(i);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradmod::{freeness_check, verify_action};

    #[test]
    fn dimensions_follow_partitions() {
        let piece = build_wh_adic(-2, 4, None).unwrap();
        for t in -4..=4 {
            assert_eq!(piece.module.dim(t), partition_count((t + 4) as i64));
        }
        assert_eq!(piece.module.basis(-4), ["wt[-4]"]);
    }

    #[test]
    fn action_is_consistent() {
        let piece = build_wh_adic(-1, 5, None).unwrap();
        assert!(verify_action(&piece.module).is_empty());
    }

    #[test]
    fn free_over_a1() {
        let piece = build_wh_adic(-2, 6, Some(OpSet::PowersOfTwo(8))).unwrap();
        assert!(freeness_check(&piece.module, 1, -4, 6).unwrap().pass());
    }
}
