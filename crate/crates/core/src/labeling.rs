//! Constellation labelings and linear transforms between them.
//!
//! A label table has one row per constellation point and one column per bit
//! level; the leftmost column is the least significant bit. For square QAM
//! the point with row index `r` and column index `c` is table row `r·M + c`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::gf2::{kernel, BitMatrix};
use crate::math::{boxplus, clamp_llr, hard, log_add_exp};
use crate::{Error, Result};

/// How a label table was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelKind {
    /// Set partitioning (natural counting on ASK).
    SetPartition,
    /// Binary-reflected Gray.
    Gray,
    /// Any other table, e.g. the image of a transform.
    Derived,
}

/// A `(2^k, k)` binary table mapping constellation points to labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTable {
    matrix: BitMatrix,
    kind: LabelKind,
}

impl LabelTable {
    /// Wraps a matrix, checking that its rows exhaust `{0,1}^k`.
    pub fn new(matrix: BitMatrix, kind: LabelKind) -> Result<Self> {
        let k = matrix.cols();
        if k > 24 || matrix.rows() != 1 << k {
            return Err(Error::DimensionMismatch("label table must have 2^k rows"));
        }
        let table = Self { matrix, kind };
        if !table.is_bijective() {
            return Err(Error::InvalidParameter("label table is not a bijection"));
        }
        Ok(table)
    }

    /// Label bits per point.
    pub fn order(&self) -> usize {
        self.matrix.cols()
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.matrix.rows()
    }

    /// Always false: tables have at least two rows.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Provenance flag.
    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    /// The underlying `(2^k, k)` matrix.
    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    /// Label of `point` as bits `b_0..b_{k-1}`.
    pub fn label(&self, point: usize) -> Vec<u8> {
        self.matrix.row(point)
    }

    /// Label of `point` packed as an integer with bit `i` holding `b_i`.
    pub fn label_index(&self, point: usize) -> usize {
        (0..self.order()).fold(0, |acc, i| acc | (usize::from(self.matrix.get(point, i)) << i))
    }

    /// Point index for every packed label.
    pub fn inverse_map(&self) -> Vec<usize> {
        let mut inv = vec![0; self.len()];
        for p in 0..self.len() {
            inv[self.label_index(p)] = p;
        }
        inv
    }

    fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.len()];
        for p in 0..self.len() {
            let l = self.label_index(p);
            if seen[l] {
                return false;
            }
            seen[l] = true;
        }
        true
    }

    /// `self · a`: relabels every point by the linear map `a`.
    pub fn transform(&self, a: &BitMatrix) -> Result<LabelTable> {
        let product = self.matrix.mul(a)?;
        LabelTable::new(product, LabelKind::Derived)
    }

    /// Whether consecutive rows differ in exactly one bit.
    pub fn is_gray_sequence(&self) -> bool {
        (1..self.len()).all(|p| (self.label_index(p) ^ self.label_index(p - 1)).count_ones() == 1)
    }
}

/// Natural (= set-partitioning) labeling of `2^m` ASK/PSK points: row `r` is
/// the binary expansion of `r`, least significant bit first.
pub fn sp_table(m: usize) -> LabelTable {
    assert!(m >= 1);
    let matrix = BitMatrix::from_fn(1 << m, m, |r, c| (r >> c) & 1 == 1);
    LabelTable::new(matrix, LabelKind::SetPartition).expect("natural labeling is bijective")
}

/// Binary-reflected Gray labeling of `2^m` points, built by reflection.
pub fn gray_table(m: usize) -> LabelTable {
    assert!(m >= 1);
    let mut rows: Vec<Vec<u8>> = vec![vec![0], vec![1]];
    for _ in 1..m {
        let mut next = Vec::with_capacity(rows.len() * 2);
        for r in &rows {
            let mut row = r.clone();
            row.push(0);
            next.push(row);
        }
        for r in rows.iter().rev() {
            let mut row = r.clone();
            row.push(1);
            next.push(row);
        }
        rows = next;
    }
    let matrix = BitMatrix::from_rows(&rows).expect("rectangular");
    LabelTable::new(matrix, LabelKind::Gray).expect("reflected code is bijective")
}

/// `T_m`: ones on the diagonal and the first subdiagonal, so that
/// `sp_table(m) · T_m = gray_table(m)`.
pub fn sp_to_gray_matrix(m: usize) -> BitMatrix {
    assert!(m >= 1);
    BitMatrix::from_fn(m, m, |r, c| r == c || r == c + 1)
}

/// `G_2 ⊗ T_m`, the SP→Gray transform of square `2^{2m}`-QAM.
pub fn qam_sp_to_gray(m: usize) -> BitMatrix {
    kernel().kron(&sp_to_gray_matrix(m))
}

/// QAM point index for row index `r` and column index `c` of a `2^m x 2^m` grid.
pub fn qam_point(m: usize, r: usize, c: usize) -> usize {
    (r << m) | c
}

fn qam_table_from(m: usize, kind: LabelKind, label: impl Fn(usize, usize) -> (usize, usize)) -> LabelTable {
    assert!(m >= 1);
    let side = 1usize << m;
    let mut matrix = BitMatrix::zeros(side * side, 2 * m);
    for r in 0..side {
        for c in 0..side {
            let (first, second) = label(r, c);
            let p = qam_point(m, r, c);
            for i in 0..m {
                matrix.set(p, i, (first >> i) & 1 == 1);
                matrix.set(p, m + i, (second >> i) & 1 == 1);
            }
        }
    }
    LabelTable::new(matrix, kind).expect("QAM labels are bijective")
}

/// Natural QAM labeling `[row bits, column bits]`.
pub fn qam_natural_table(m: usize) -> LabelTable {
    qam_table_from(m, LabelKind::Derived, |r, c| (r, c))
}

/// Set-partitioning QAM labeling `[row ⊕ column, column]` (natural bits per axis).
pub fn qam_sp_table(m: usize) -> LabelTable {
    qam_table_from(m, LabelKind::SetPartition, |r, c| (r ^ c, c))
}

/// Per-axis binary-reflected Gray QAM labeling `[gray(row), gray(column)]`.
pub fn qam_gray_table(m: usize) -> LabelTable {
    qam_table_from(m, LabelKind::Gray, |r, c| (r ^ (r >> 1), c ^ (c >> 1)))
}

/// One decoding tree of the successive inversion of `x = u·T_m`.
///
/// `u_j` equals the parity of `x[parity]`; for `j ≥ 1` it also equals
/// `x[feedback] ⊕ u_{j-1}`. The two estimates share no code symbol and are
/// fused at a variable node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TmTree {
    /// Code symbols entering the parity check.
    pub parity: Range<usize>,
    /// Code symbol of the second check, tied to the previous decision.
    pub feedback: Option<usize>,
}

impl TmTree {
    /// Degrees of the check nodes (the feedback check includes `u_{j-1}`).
    pub fn check_degrees(&self) -> Vec<usize> {
        let mut d = vec![self.parity.len()];
        if self.feedback.is_some() {
            d.push(2);
        }
        d
    }

    /// Whether the tree ends in a variable node.
    pub fn has_variable_node(&self) -> bool {
        self.feedback.is_some()
    }
}

/// The decoding tree for `u_j` of `x = u·T_m`.
pub fn tm_tree(m: usize, j: usize) -> TmTree {
    assert!(j < m);
    TmTree {
        parity: j..m,
        feedback: j.checked_sub(1),
    }
}

/// LLR of `u_j` given the code-symbol LLRs of `x = u·T_m` and the value of `u_{j-1}`.
pub fn tm_level_llr(x_llrs: &[f64], j: usize, prev: Option<u8>) -> f64 {
    let tree = tm_tree(x_llrs.len(), j);
    let parity = x_llrs[tree.parity.clone()]
        .iter()
        .copied()
        .reduce(boxplus)
        .expect("non-empty parity range");
    match (tree.feedback, prev) {
        (Some(i), Some(u)) => clamp_llr(parity + if u == 0 { x_llrs[i] } else { -x_llrs[i] }),
        (Some(_), None) => panic!("u_{{j-1}} required for j >= 1"),
        (None, _) => parity,
    }
}

/// Output of [`tm_successive_decode`].
#[derive(Debug, Clone, PartialEq)]
pub struct TmDecoded {
    /// Hard decisions `û_0..û_{m-1}`.
    pub bits: Vec<u8>,
    /// Internal LLRs on which the decisions were taken.
    pub llrs: Vec<f64>,
}

/// Successive estimation of `u` from LLRs of the Gray-labeled bits `x = u·T_m`,
/// each decision feeding the next tree.
pub fn tm_successive_decode(x_llrs: &[f64], m: usize) -> Result<TmDecoded> {
    if x_llrs.len() != m || m == 0 {
        return Err(Error::LengthMismatch {
            expected: m,
            got: x_llrs.len(),
        });
    }
    let mut bits = Vec::with_capacity(m);
    let mut llrs = Vec::with_capacity(m);
    for j in 0..m {
        let l = tm_level_llr(x_llrs, j, bits.last().copied());
        llrs.push(l);
        bits.push(hard(l));
    }
    Ok(TmDecoded { bits, llrs })
}

/// LLR of `u_t` for `x = u·head` given independent code-symbol LLRs and the
/// known `u_0..u_{t-1}`, marginalizing over `u_{t+1}..` exactly.
///
/// Cost is `2^{k-t}` label evaluations, fine for per-symbol heads (`k ≤ 10`).
pub fn successive_head_llr(head: &BitMatrix, x_llrs: &[f64], t: usize, known: &[u8]) -> f64 {
    let k = head.rows();
    debug_assert_eq!(known.len(), t);
    debug_assert_eq!(x_llrs.len(), k);
    let free = k - t;
    let mut acc = [f64::NEG_INFINITY; 2];
    let mut u = vec![0u8; k];
    u[..t].copy_from_slice(known);
    for pattern in 0..(1usize << free) {
        for (i, slot) in u[t..].iter_mut().enumerate() {
            *slot = ((pattern >> i) & 1) as u8;
        }
        let x = head.vec_mul(&u).expect("length k");
        let metric: f64 = x
            .iter()
            .zip(x_llrs)
            .map(|(&b, &l)| if b == 0 { 0.5 * l } else { -0.5 * l })
            .sum();
        let slot = usize::from(u[t]);
        acc[slot] = log_add_exp(acc[slot], metric);
    }
    clamp_llr(acc[0] - acc[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::polar_generator;

    fn rows(t: &LabelTable) -> Vec<Vec<u8>> {
        t.matrix().to_rows()
    }

    const SP3: [[u8; 3]; 8] = [
        [0, 0, 0],
        [1, 0, 0],
        [0, 1, 0],
        [1, 1, 0],
        [0, 0, 1],
        [1, 0, 1],
        [0, 1, 1],
        [1, 1, 1],
    ];
    const GRAY3: [[u8; 3]; 8] = [
        [0, 0, 0],
        [1, 0, 0],
        [1, 1, 0],
        [0, 1, 0],
        [0, 1, 1],
        [1, 1, 1],
        [1, 0, 1],
        [0, 0, 1],
    ];

    #[test]
    fn printed_m3_tables() {
        assert_eq!(rows(&sp_table(3)), SP3.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        assert_eq!(rows(&gray_table(3)), GRAY3.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        assert_eq!(rows(&sp_table(1)), vec![vec![0], vec![1]]);
        assert_eq!(rows(&gray_table(1)), vec![vec![0], vec![1]]);
        assert_eq!(sp_table(4).label(6), vec![0, 1, 1, 0]);
    }

    #[test]
    fn t_matrix_shape() {
        assert_eq!(sp_to_gray_matrix(1), BitMatrix::identity(1));
        let t3 = BitMatrix::from_rows(&[[1u8, 0, 0], [1, 1, 0], [0, 1, 1]]).unwrap();
        assert_eq!(sp_to_gray_matrix(3), t3);
        let product = sp_table(3).matrix().mul(&t3).unwrap();
        assert_eq!(&product, gray_table(3).matrix());
    }

    #[test]
    fn sp_times_t_is_gray_up_to_8() {
        for m in 1..=8 {
            let t = sp_to_gray_matrix(m);
            assert_eq!(&sp_table(m).matrix().mul(&t).unwrap(), gray_table(m).matrix(), "m={m}");
            let inv = t.inverse().expect("T_m invertible");
            let back = gray_table(m).transform(&inv).unwrap();
            assert_eq!(back.matrix(), sp_table(m).matrix());
            assert!(gray_table(m).is_gray_sequence());
        }
    }

    #[test]
    fn qam_transform_identity() {
        for m in 1..=3 {
            let lhs = qam_sp_table(m).matrix().mul(&qam_sp_to_gray(m)).unwrap();
            assert_eq!(&lhs, qam_gray_table(m).matrix(), "m={m}");
        }
        assert_eq!(qam_sp_to_gray(1), polar_generator(1));
    }

    #[test]
    fn qam_tables_from_natural_by_g2_kron_i() {
        for m in 1..=3 {
            let g2_i = kernel().kron(&BitMatrix::identity(m));
            let sp = qam_natural_table(m).transform(&g2_i).unwrap();
            assert_eq!(sp.matrix(), qam_sp_table(m).matrix());
            let i2_t = BitMatrix::identity(2).kron(&sp_to_gray_matrix(m));
            let gray = qam_natural_table(m).transform(&i2_t).unwrap();
            assert_eq!(gray.matrix(), qam_gray_table(m).matrix());
        }
    }

    #[test]
    fn qam_factorization() {
        for m in 1..=4 {
            let g2_i = kernel().kron(&BitMatrix::identity(m));
            let i2_t = BitMatrix::identity(2).kron(&sp_to_gray_matrix(m));
            assert_eq!(g2_i.mul(&i2_t).unwrap(), qam_sp_to_gray(m));
        }
    }

    #[test]
    fn four_qam_by_hand() {
        // Points (r, c) in order (0,0), (0,1), (1,0), (1,1).
        let sp = [[0u8, 0], [1, 1], [1, 0], [0, 1]];
        let gray = [[0u8, 0], [0, 1], [1, 0], [1, 1]];
        assert_eq!(rows(&qam_sp_table(1)), sp.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
        assert_eq!(rows(&qam_gray_table(1)), gray.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_non_bijective() {
        let m = BitMatrix::from_rows(&[[0u8], [0]]).unwrap();
        assert!(LabelTable::new(m, LabelKind::Derived).is_err());
    }

    fn saturated(x: &[u8]) -> Vec<f64> {
        x.iter().map(|&b| if b == 0 { 40.0 } else { -40.0 }).collect()
    }

    #[test]
    fn tm_decode_noiseless_exhaustive() {
        for m in 1..=6 {
            let t = sp_to_gray_matrix(m);
            for idx in 0..(1usize << m) {
                let u: Vec<u8> = (0..m).map(|i| ((idx >> i) & 1) as u8).collect();
                let x = t.vec_mul(&u).unwrap();
                let dec = tm_successive_decode(&saturated(&x), m).unwrap();
                assert_eq!(dec.bits, u, "m={m} u={u:?}");
            }
        }
        assert!(tm_successive_decode(&[1.0, 2.0], 3).is_err());
    }

    #[test]
    fn tm_tree_shapes() {
        assert_eq!(tm_tree(4, 0).check_degrees(), vec![4]);
        assert!(!tm_tree(4, 0).has_variable_node());
        assert_eq!(tm_tree(4, 1).check_degrees(), vec![3, 2]);
        assert_eq!(tm_tree(4, 2).check_degrees(), vec![2, 2]);
        assert_eq!(tm_tree(4, 3).check_degrees(), vec![1, 2]);
        assert!(tm_tree(4, 3).has_variable_node());
    }

    #[test]
    fn tm_decode_with_erasure() {
        // u = [1,0,1,1] → x = [1,1,0,1]; erase x_0.
        let u = [1u8, 0, 1, 1];
        let x = sp_to_gray_matrix(4).vec_mul(&u).unwrap();
        let mut l = saturated(&x);
        l[0] = 0.0;
        assert_eq!(tm_level_llr(&l, 0, None), 0.0);
        // With u_0 frozen to its true value, u_1 is still recovered from x_1..x_3.
        let l1 = tm_level_llr(&l, 1, Some(u[0]));
        assert_eq!(hard(l1), u[1]);
        assert!(l1.abs() > 30.0);
    }

    #[test]
    fn tm_trees_equal_exact_marginalization() {
        let t = sp_to_gray_matrix(5);
        let llrs = [0.7, -1.3, 2.2, -0.4, 0.9];
        let known = [1u8, 0, 0, 1];
        for j in 0..5 {
            let tree = tm_level_llr(&llrs, j, j.checked_sub(1).map(|i| known[i]));
            let exact = successive_head_llr(&t, &llrs, j, &known[..j]);
            assert!((tree - exact).abs() < 1e-10, "j={j}: {tree} vs {exact}");
        }
    }
}
