//! Binary partitions of a channel and their bit-channel capacity profiles.
//!
//! A sequential partition (SBP) of order `k` splits a `2^k`-ary channel into
//! bit channels `B^{(i)}` with capacity `I(B_i; Y | B_0..B_{i-1})`; a parallel
//! one (PBP) keeps only `I(B_i; Y)`. Linear partitions are given by an
//! invertible matrix `A` acting as `x = b·A`.
//!
//! Exact capacities are available for linear partitions of independent
//! erasure channels (rank tests over erasure patterns) and of small BSC
//! products (joint enumeration). Modulated channels are handled by
//! mergeable Monte-Carlo accumulators.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use libm::{log, log2, sqrt};
use rand::Rng;

use crate::channels::ModChannel;
use crate::gf2::{stride_permutation, BitMatrix};
use crate::labeling::{successive_head_llr, LabelKind, LabelTable};
use crate::math::{binary_entropy, log_add_exp, mi_loss};
use crate::{Error, Result};

/// How a profile was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimationMethod {
    /// Exact erasure-probability computation.
    ExactBec,
    /// Monte-Carlo estimate from the given number of samples.
    MonteCarlo {
        /// Samples per bit channel.
        samples: u64,
    },
    /// Gaussian-approximated density evolution.
    DeGa,
}

/// Ordered bit-channel capacities, optionally with SC error probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct BitChannelProfile {
    capacities: Vec<f64>,
    error_probs: Option<Vec<f64>>,
    method: EstimationMethod,
}

impl BitChannelProfile {
    /// Capacities only; each must lie in `[0, 1]`.
    pub fn new(capacities: Vec<f64>, method: EstimationMethod) -> Result<Self> {
        if capacities.iter().any(|c| !(0.0..=1.0).contains(c)) {
            return Err(Error::InvalidParameter("capacity outside [0, 1]"));
        }
        Ok(Self {
            capacities,
            error_probs: None,
            method,
        })
    }

    /// Capacities with matching error probabilities.
    pub fn with_error_probs(capacities: Vec<f64>, error_probs: Vec<f64>, method: EstimationMethod) -> Result<Self> {
        if error_probs.len() != capacities.len() {
            return Err(Error::LengthMismatch {
                expected: capacities.len(),
                got: error_probs.len(),
            });
        }
        if error_probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("error probability outside [0, 1]"));
        }
        let mut p = Self::new(capacities, method)?;
        p.error_probs = Some(error_probs);
        Ok(p)
    }

    /// Number of bit channels.
    pub fn len(&self) -> usize {
        self.capacities.len()
    }

    /// Whether the profile has no entries.
    pub fn is_empty(&self) -> bool {
        self.capacities.is_empty()
    }

    /// Capacities in index order.
    pub fn capacities(&self) -> &[f64] {
        &self.capacities
    }

    /// Error probabilities, when known.
    pub fn error_probs(&self) -> Option<&[f64]> {
        self.error_probs.as_deref()
    }

    /// Estimation method.
    pub fn method(&self) -> EstimationMethod {
        self.method
    }

    /// Sum of capacities.
    pub fn total(&self) -> f64 {
        self.capacities.iter().sum()
    }

    /// Arithmetic mean of the capacities.
    pub fn mean(&self) -> Result<f64> {
        profile_mean(&self.capacities)
    }

    /// Population variance of the capacities.
    pub fn variance(&self) -> Result<f64> {
        profile_variance(&self.capacities)
    }

    /// Concatenates profiles (e.g. one per level) in order.
    pub fn concat(parts: &[BitChannelProfile]) -> Result<Self> {
        let method = parts.first().ok_or(Error::EmptyProfile)?.method;
        let capacities = parts.iter().flat_map(|p| p.capacities.iter().copied()).collect();
        if parts.iter().all(|p| p.error_probs.is_some()) {
            let pe = parts.iter().flat_map(|p| p.error_probs().unwrap().iter().copied()).collect();
            Self::with_error_probs(capacities, pe, method)
        } else {
            Self::new(capacities, method)
        }
    }
}

/// Arithmetic mean.
pub fn profile_mean(caps: &[f64]) -> Result<f64> {
    if caps.is_empty() {
        return Err(Error::EmptyProfile);
    }
    Ok(caps.iter().sum::<f64>() / caps.len() as f64)
}

/// Population variance.
pub fn profile_variance(caps: &[f64]) -> Result<f64> {
    let m = profile_mean(caps)?;
    Ok(caps.iter().map(|c| (c - m) * (c - m)).sum::<f64>() / caps.len() as f64)
}

/// Variance of a product concatenation from the outer variance and the
/// variances of the inner partitions applied to each outer bit channel.
pub fn predict_concat_variance(v_outer: f64, inner_variances: &[f64]) -> f64 {
    if inner_variances.is_empty() {
        return v_outer;
    }
    v_outer + inner_variances.iter().sum::<f64>() / inner_variances.len() as f64
}

/// Erasure probabilities of the `2^n` polar bit channels of BEC(`eps`).
pub fn bec_polar_erasures(eps: f64, n_exp: u32) -> Vec<f64> {
    let mut cur = vec![eps];
    for _ in 0..n_exp {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for &e in &cur {
            next.push(2.0 * e - e * e);
            next.push(e * e);
        }
        cur = next;
    }
    cur
}

/// Exact polar profile of BEC(`eps`); error probabilities assume a fair
/// guess on erasure.
pub fn bec_polar_profile(eps: f64, n_exp: u32) -> Result<BitChannelProfile> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter("erasure probability outside [0, 1]"));
    }
    let e = bec_polar_erasures(eps, n_exp);
    BitChannelProfile::with_error_probs(
        e.iter().map(|x| 1.0 - x).collect(),
        e.iter().map(|x| x / 2.0).collect(),
        EstimationMethod::ExactBec,
    )
}

fn submatrix(a: &BitMatrix, rows: impl Iterator<Item = usize> + Clone, cols: &[usize]) -> Option<BitMatrix> {
    let r: Vec<usize> = rows.collect();
    if r.is_empty() || cols.is_empty() {
        return None;
    }
    Some(BitMatrix::from_fn(r.len(), cols.len(), |i, j| a.get(r[i], cols[j])))
}

fn rank_of(a: &BitMatrix, rows: impl Iterator<Item = usize> + Clone, cols: &[usize]) -> usize {
    submatrix(a, rows, cols).map_or(0, |m| m.rank())
}

fn check_linear_bec(a: &BitMatrix, eps: &[f64]) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let k = a.rows();
    if eps.len() != k {
        return Err(Error::LengthMismatch { expected: k, got: eps.len() });
    }
    if k > 20 {
        return Err(Error::Unsupported("exact enumeration limited to order 20"));
    }
    if eps.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::InvalidParameter("erasure probability outside [0, 1]"));
    }
    Ok(k)
}

/// Neumaier-compensated running sum.
#[derive(Clone, Copy, Default)]
struct Sum {
    hi: f64,
    lo: f64,
}

impl Sum {
    fn add(&mut self, x: f64) {
        let t = self.hi + x;
        if self.hi.abs() >= x.abs() {
            self.lo += (self.hi - t) + x;
        } else {
            self.lo += (x - t) + self.hi;
        }
        self.hi = t;
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

fn for_each_pattern(eps: &[f64], mut f: impl FnMut(&[usize], f64)) {
    let k = eps.len();
    let mut seen = Vec::with_capacity(k);
    for pattern in 0..(1usize << k) {
        seen.clear();
        let mut prob = 1.0;
        for (j, &e) in eps.iter().enumerate() {
            if (pattern >> j) & 1 == 1 {
                seen.push(j);
                prob *= 1.0 - e;
            } else {
                prob *= e;
            }
        }
        if prob > 0.0 {
            f(&seen, prob);
        }
    }
}

/// Exact SBP bit-channel capacities of `x = b·A` over independent BECs with
/// erasure probabilities `eps`.
///
/// `b_i` is recovered from the observed columns `S` and `b_0..b_{i-1}`
/// exactly when row `i` of `A_S` is independent of rows `i+1..`.
pub fn linear_bec_sbp(a: &BitMatrix, eps: &[f64]) -> Result<Vec<f64>> {
    let k = check_linear_bec(a, eps)?;
    let mut caps = vec![Sum::default(); k];
    for_each_pattern(eps, |seen, prob| {
        for (i, c) in caps.iter_mut().enumerate() {
            if rank_of(a, i..k, seen) > rank_of(a, i + 1..k, seen) {
                c.add(prob);
            }
        }
    });
    Ok(caps.into_iter().map(Sum::value).collect())
}

/// Exact PBP (marginal) capacities of `x = b·A` over independent BECs.
pub fn linear_bec_pbp(a: &BitMatrix, eps: &[f64]) -> Result<Vec<f64>> {
    let k = check_linear_bec(a, eps)?;
    let mut caps = vec![Sum::default(); k];
    for_each_pattern(eps, |seen, prob| {
        let full = rank_of(a, 0..k, seen);
        for (i, c) in caps.iter_mut().enumerate() {
            if full > rank_of(a, (0..k).filter(move |&r| r != i), seen) {
                c.add(prob);
            }
        }
    });
    Ok(caps.into_iter().map(Sum::value).collect())
}

/// Product concatenation on erasure channels: every outer bit channel `i`
/// (a BEC of capacity `outer[i]`) is split by the inner linear SBP `inner`;
/// output index `k2·i + j`.
pub fn concat_bec(outer: &[f64], inner: &BitMatrix) -> Result<Vec<f64>> {
    let k2 = inner.rows();
    let mut out = Vec::with_capacity(outer.len() * k2);
    for &c in outer {
        out.extend(linear_bec_sbp(inner, &vec![1.0 - c; k2])?);
    }
    Ok(out)
}

/// Exact SBP capacities of `x = b·A` over independent BSCs with crossover `p`
/// by joint enumeration; order at most 10.
pub fn linear_bsc_sbp(a: &BitMatrix, p: f64) -> Result<Vec<f64>> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let k = a.rows();
    if k > 10 {
        return Err(Error::Unsupported("exact enumeration limited to order 10"));
    }
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::InvalidParameter("crossover probability outside [0, 1/2]"));
    }
    let size = 1usize << k;
    let codeword: Vec<usize> = (0..size)
        .map(|u| {
            let bits: Vec<u8> = (0..k).map(|i| ((u >> i) & 1) as u8).collect();
            a.vec_mul(&bits).unwrap().iter().enumerate().fold(0, |acc, (i, &b)| acc | (usize::from(b) << i))
        })
        .collect();
    let plog = |q: f64| if q > 0.0 { -q * log2(q) } else { 0.0 };
    // H(Y, B_0..B_i) for i = -1..k-1, stored at i+1.
    let mut joint_entropy = vec![0.0; k + 1];
    let mut marg = vec![0.0; size];
    for y in 0..size {
        let w: Vec<f64> = codeword
            .iter()
            .map(|&x| {
                let d = (x ^ y).count_ones() as i32;
                libm::pow(p, d as f64) * libm::pow(1.0 - p, (k as i32 - d) as f64) / size as f64
            })
            .collect();
        for (prefix, h) in joint_entropy.iter_mut().enumerate() {
            let mask = (1usize << prefix) - 1;
            marg[..=mask].iter_mut().for_each(|m| *m = 0.0);
            for (u, &q) in w.iter().enumerate() {
                marg[u & mask] += q;
            }
            *h += marg[..=mask].iter().map(|&q| plog(q)).sum::<f64>();
        }
    }
    // I(B_i; Y | B_<i) = 1 - H(B_i | Y, B_<i).
    Ok((0..k).map(|i| 1.0 - (joint_entropy[i + 1] - joint_entropy[i])).collect())
}

/// Capacity of BSC(`p`).
pub fn bsc_capacity(p: f64) -> f64 {
    1.0 - binary_entropy(p)
}

/// Kind of a binary partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionKind {
    /// Sequential binary partition.
    Sbp,
    /// Parallel binary partition.
    Pbp,
    /// SBP seen through a PBP (composition `PBP ⊙ SBP`).
    DegradedSbp,
}

/// How a partition maps `k` bits to a channel input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartitionLabeling {
    /// `x = b·A` with `A` invertible.
    Linear(BitMatrix),
    /// Point whose label is `b`.
    Table(LabelTable),
}

/// A binary partition of order `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    kind: PartitionKind,
    labeling: PartitionLabeling,
    inner: Option<Box<BitMatrix>>,
}

impl PartitionSpec {
    /// Linear partition; `a` must be invertible.
    pub fn linear(kind: PartitionKind, a: BitMatrix) -> Result<Self> {
        if kind == PartitionKind::DegradedSbp {
            return Err(Error::InvalidParameter("degraded partitions arise only by composition"));
        }
        a.inverse()?;
        Ok(Self {
            kind,
            labeling: PartitionLabeling::Linear(a),
            inner: None,
        })
    }

    /// Partition given by a label table.
    pub fn table(kind: PartitionKind, table: LabelTable) -> Result<Self> {
        if kind == PartitionKind::DegradedSbp {
            return Err(Error::InvalidParameter("degraded partitions arise only by composition"));
        }
        Ok(Self {
            kind,
            labeling: PartitionLabeling::Table(table),
            inner: None,
        })
    }

    /// The polar kernel `π` as a 2-SBP.
    pub fn polar_kernel() -> Self {
        Self::linear(PartitionKind::Sbp, crate::gf2::kernel()).expect("invertible")
    }

    /// Kind.
    pub fn kind(&self) -> PartitionKind {
        self.kind
    }

    /// Order `k`.
    pub fn order(&self) -> usize {
        match &self.labeling {
            PartitionLabeling::Linear(a) => a.rows(),
            PartitionLabeling::Table(t) => t.order(),
        }
    }

    /// Labeling.
    pub fn labeling(&self) -> &PartitionLabeling {
        &self.labeling
    }

    /// Linear matrix, if any.
    pub fn matrix(&self) -> Option<&BitMatrix> {
        match &self.labeling {
            PartitionLabeling::Linear(a) => Some(a),
            PartitionLabeling::Table(_) => None,
        }
    }

    /// For a degraded SBP, the matrix of the sequential part.
    pub fn sequential_part(&self) -> Option<&BitMatrix> {
        self.inner.as_deref()
    }

    /// Product concatenation `outer ⊗ inner` of two SBPs, or `outer ⊙ inner`
    /// of a PBP with an SBP of equal order.
    ///
    /// For the product the labeling is `P_{k1,k2}·(A_inner ⊗ A_outer)`; for
    /// the composition it is `A_inner·A_outer` (or the outer table
    /// relabeled by `A_inner^{-1}`).
    pub fn compose(outer: &PartitionSpec, inner: &PartitionSpec) -> Result<Self> {
        let a_in = inner.matrix().ok_or(Error::NonlinearPartition)?;
        if inner.kind != PartitionKind::Sbp {
            return Err(Error::InvalidParameter("inner partition must be sequential"));
        }
        match outer.kind {
            PartitionKind::Sbp => {
                let a_out = outer.matrix().ok_or(Error::NonlinearPartition)?;
                let (k1, k2) = (a_out.rows(), a_in.rows());
                let a = stride_permutation(k1, k2).mul(&a_in.kron(a_out))?;
                Self::linear(PartitionKind::Sbp, a)
            }
            PartitionKind::Pbp => {
                if outer.order() != inner.order() {
                    return Err(Error::DimensionMismatch("composition needs equal orders"));
                }
                let labeling = match &outer.labeling {
                    PartitionLabeling::Linear(a_out) => PartitionLabeling::Linear(a_in.mul(a_out)?),
                    PartitionLabeling::Table(t) => PartitionLabeling::Table(t.transform(&a_in.inverse()?)?),
                };
                Ok(Self {
                    kind: PartitionKind::DegradedSbp,
                    labeling,
                    inner: Some(Box::new(a_in.clone())),
                })
            }
            PartitionKind::DegradedSbp => Err(Error::Unsupported("composition of a degraded partition")),
        }
    }

    /// Exact capacities when the partition is linear and its inputs are
    /// independent BECs with erasure probabilities `eps`.
    ///
    /// A degraded SBP treats the parallel outputs as independent erasure
    /// channels, which is what its decoder assumes.
    pub fn bec_profile(&self, eps: &[f64]) -> Result<BitChannelProfile> {
        let caps = match self.kind {
            PartitionKind::Sbp => linear_bec_sbp(self.matrix().ok_or(Error::NonlinearPartition)?, eps)?,
            PartitionKind::Pbp => linear_bec_pbp(self.matrix().ok_or(Error::NonlinearPartition)?, eps)?,
            PartitionKind::DegradedSbp => {
                let whole = self.matrix().ok_or(Error::NonlinearPartition)?;
                let head = self.sequential_part().expect("degraded partitions carry their sequential part");
                let outer = head.inverse()?.mul(whole)?;
                let marg = linear_bec_pbp(&outer, eps)?;
                let erasures: Vec<f64> = marg.iter().map(|c| 1.0 - c).collect();
                linear_bec_sbp(head, &erasures)?
            }
        };
        BitChannelProfile::new(caps.into_iter().map(|c| c.clamp(0.0, 1.0)).collect(), EstimationMethod::ExactBec)
    }

    /// Label table view of a table partition over `2^k` points.
    pub fn label_table(&self) -> Result<LabelTable> {
        match &self.labeling {
            PartitionLabeling::Table(t) => Ok(t.clone()),
            PartitionLabeling::Linear(a) => {
                // Point index is the packed input x = b·A; its label is b.
                let inv = a.inverse()?;
                let k = a.rows();
                let rows: Vec<Vec<u8>> = (0..1usize << k)
                    .map(|x| {
                        let bits: Vec<u8> = (0..k).map(|i| ((x >> i) & 1) as u8).collect();
                        inv.vec_mul(&bits).unwrap()
                    })
                    .collect();
                LabelTable::new(BitMatrix::from_rows(&rows)?, LabelKind::Derived)
            }
        }
    }
}

/// Running means and variances of per-index mutual-information samples.
#[derive(Debug, Clone, PartialEq)]
pub struct MiAccumulator {
    sum: Vec<f64>,
    sum_sq: Vec<f64>,
    count: u64,
}

impl MiAccumulator {
    /// Accumulator for `len` indices.
    pub fn new(len: usize) -> Self {
        Self {
            sum: vec![0.0; len],
            sum_sq: vec![0.0; len],
            count: 0,
        }
    }

    /// Number of indices.
    pub fn len(&self) -> usize {
        self.sum.len()
    }

    /// Whether there are no indices.
    pub fn is_empty(&self) -> bool {
        self.sum.is_empty()
    }

    /// Samples recorded per index.
    pub fn count(&self) -> u64 {
        self.count
    }

    /// Records one sample vector of information values `1 - loss`.
    pub fn record(&mut self, values: &[f64]) {
        for ((s, q), &v) in self.sum.iter_mut().zip(&mut self.sum_sq).zip(values) {
            *s += v;
            *q += v * v;
        }
        self.count += 1;
    }

    /// Records the information carried by LLRs `llrs` about `bits`.
    pub fn record_llrs(&mut self, llrs: &[f64], bits: &[u8]) {
        for (i, (&l, &b)) in llrs.iter().zip(bits).enumerate() {
            let v = 1.0 - mi_loss(l, b);
            self.sum[i] += v;
            self.sum_sq[i] += v * v;
        }
        self.count += 1;
    }

    /// Adds another accumulator's samples.
    pub fn merge(&mut self, other: &MiAccumulator) {
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self.count += other.count;
    }

    /// Sample means.
    pub fn means(&self) -> Vec<f64> {
        let n = self.count.max(1) as f64;
        self.sum.iter().map(|s| s / n).collect()
    }

    /// Standard errors of the means.
    pub fn std_errors(&self) -> Vec<f64> {
        let n = self.count.max(1) as f64;
        self.sum
            .iter()
            .zip(&self.sum_sq)
            .map(|(s, q)| {
                let m = s / n;
                sqrt(((q / n - m * m).max(0.0)) / n)
            })
            .collect()
    }

    /// Standard error of the sum of all indices, from per-index errors
    /// treated as independent.
    pub fn total_std_error(&self) -> f64 {
        sqrt(self.std_errors().iter().map(|e| e * e).sum())
    }

    /// Means clamped into `[0, 1]` as a profile.
    pub fn to_profile(&self) -> Result<BitChannelProfile> {
        BitChannelProfile::new(
            self.means().into_iter().map(|c| c.clamp(0.0, 1.0)).collect(),
            EstimationMethod::MonteCarlo { samples: self.count },
        )
    }
}

/// Monte-Carlo capacities of a modulated channel: sequential and parallel
/// level capacities and `I(X;Y)` from shared samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCapacityEstimate {
    /// `I(B_i; Y | B_0..B_{i-1})` samples.
    pub sbp: MiAccumulator,
    /// `I(B_i; Y)` samples.
    pub pbp: MiAccumulator,
    /// `I(X; Y)` samples in bits.
    pub direct: MiAccumulator,
}

impl LevelCapacityEstimate {
    /// Empty estimate for `m` levels.
    pub fn new(m: usize) -> Self {
        Self {
            sbp: MiAccumulator::new(m),
            pbp: MiAccumulator::new(m),
            direct: MiAccumulator::new(1),
        }
    }

    /// Draws `samples` uniform labels through `ch`.
    pub fn run<R: Rng + ?Sized>(ch: &ModChannel, samples: u64, rng: &mut R) -> Self {
        let mut est = Self::new(ch.bits());
        est.extend(ch, samples, rng);
        est
    }

    /// Adds `samples` more draws.
    pub fn extend<R: Rng + ?Sized>(&mut self, ch: &ModChannel, samples: u64, rng: &mut R) {
        let m = ch.bits();
        let size = 1usize << m;
        let mut metrics = vec![0.0; size];
        let mut seq = vec![0.0; m];
        let mut par = vec![0.0; m];
        let mut bits = vec![0u8; m];
        for _ in 0..samples {
            let label = rng.random_range(0..size);
            let y = ch.transmit_packed(label, rng);
            ch.label_metrics(&y, &mut metrics);
            for i in 0..m {
                bits[i] = ((label >> i) & 1) as u8;
                let lower = label & ((1 << i) - 1);
                seq[i] = crate::channels::level_llr(&metrics, i, Some(lower));
                par[i] = crate::channels::level_llr(&metrics, i, None);
            }
            self.sbp.record_llrs(&seq, &bits);
            self.pbp.record_llrs(&par, &bits);
            let total = metrics.iter().fold(f64::NEG_INFINITY, |a, &b| log_add_exp(a, b));
            let info = m as f64 - (total - metrics[label]) / log(2.0);
            self.direct.record(&[info]);
        }
    }

    /// Merges another estimate of the same channel.
    pub fn merge(&mut self, other: &LevelCapacityEstimate) {
        self.sbp.merge(&other.sbp);
        self.pbp.merge(&other.pbp);
        self.direct.merge(&other.direct);
    }
}

/// Monte-Carlo capacities of a degraded SBP: `x = u·head`, each bit of `x`
/// demapped in parallel through `ch`, then `u` decoded successively with the
/// true lower `u` bits known.
pub fn degraded_sbp_estimate<R: Rng + ?Sized>(
    ch: &ModChannel,
    head: &BitMatrix,
    samples: u64,
    rng: &mut R,
) -> Result<MiAccumulator> {
    let m = ch.bits();
    if head.rows() != m || !head.is_square() {
        return Err(Error::DimensionMismatch("head order differs from bits per symbol"));
    }
    let mut acc = MiAccumulator::new(m);
    let mut metrics = vec![0.0; 1 << m];
    let mut x_llrs = vec![0.0; m];
    let mut llrs = vec![0.0; m];
    for _ in 0..samples {
        let u: Vec<u8> = (0..m).map(|_| rng.random_range(0..2u8)).collect();
        let x = head.vec_mul(&u)?;
        let packed = x.iter().enumerate().fold(0, |a, (i, &b)| a | (usize::from(b) << i));
        let y = ch.transmit_packed(packed, rng);
        ch.label_metrics(&y, &mut metrics);
        for (i, l) in x_llrs.iter_mut().enumerate() {
            *l = crate::channels::level_llr(&metrics, i, None);
        }
        for (t, l) in llrs.iter_mut().enumerate() {
            *l = successive_head_llr(head, &x_llrs, t, &u[..t]);
        }
        acc.record_llrs(&llrs, &u);
    }
    Ok(acc)
}

/// Level capacities of a modulated channel.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCapacities {
    /// `I(B_i; Y | B_0..B_{i-1})`.
    pub sbp: Vec<f64>,
    /// `I(B_i; Y)`.
    pub pbp: Vec<f64>,
    /// `I(X; Y)` in bits.
    pub direct: f64,
}

const QUADRATURE_INTERVALS: usize = 1200;

/// Mean over uniform source words `s ∈ {0..2^m}` and channel noise of the
/// vector `f(s, y, metrics, out)`, where `label_of(s)` is the transmitted
/// packed label. Simpson's rule over `±12σ` around each point; 1-D only.
fn ask_quadrature(
    ch: &ModChannel,
    len: usize,
    label_of: impl Fn(usize) -> usize,
    mut f: impl FnMut(usize, &[f64], &mut [f64]),
) -> Result<Vec<f64>> {
    if ch.constellation().dims() != 1 {
        return Err(Error::Unsupported("quadrature needs a one-dimensional signal set"));
    }
    let size = 1usize << ch.bits();
    let sigma = sqrt(ch.sigma2());
    let mut total = vec![0.0; len];
    let mut metrics = vec![0.0; size];
    let mut out = vec![0.0; len];
    let norm = 1.0 / (sigma * sqrt(2.0 * core::f64::consts::PI));
    let h = 24.0 * sigma / QUADRATURE_INTERVALS as f64;
    for s in 0..size {
        let x = ch.map_packed(label_of(s))[0];
        for step in 0..=QUADRATURE_INTERVALS {
            let z = -12.0 * sigma + step as f64 * h;
            let coeff = if step == 0 || step == QUADRATURE_INTERVALS {
                1.0
            } else if step % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let w = coeff * h / 3.0 * norm * libm::exp(-0.5 * (z / sigma) * (z / sigma)) / size as f64;
            ch.label_metrics(&[x + z, 0.0], &mut metrics);
            f(s, &metrics, &mut out);
            for (t, o) in total.iter_mut().zip(&out) {
                *t += w * o;
            }
        }
    }
    Ok(total)
}

/// Level capacities of a one-dimensional modulated channel by numerical
/// integration over the noise.
pub fn ask_level_capacities(ch: &ModChannel) -> Result<LevelCapacities> {
    let m = ch.bits();
    if ch.sigma2() == 0.0 {
        return Ok(LevelCapacities {
            sbp: vec![1.0; m],
            pbp: vec![1.0; m],
            direct: m as f64,
        });
    }
    let v = ask_quadrature(ch, 2 * m + 1, |s| s, |label, metrics, out| {
        for i in 0..m {
            let bit = ((label >> i) & 1) as u8;
            let lower = label & ((1 << i) - 1);
            out[i] = 1.0 - mi_loss(crate::channels::level_llr(metrics, i, Some(lower)), bit);
            out[m + i] = 1.0 - mi_loss(crate::channels::level_llr(metrics, i, None), bit);
        }
        let total = metrics.iter().fold(f64::NEG_INFINITY, |a, &b| log_add_exp(a, b));
        out[2 * m] = m as f64 - (total - metrics[label]) / log(2.0);
    })?;
    Ok(LevelCapacities {
        sbp: v[..m].iter().map(|c| c.clamp(0.0, 1.0)).collect(),
        pbp: v[m..2 * m].iter().map(|c| c.clamp(0.0, 1.0)).collect(),
        direct: v[2 * m],
    })
}

/// Capacities of the degraded SBP `x = u·head` behind parallel demapping of
/// a one-dimensional modulated channel, by numerical integration.
pub fn ask_head_capacities(ch: &ModChannel, head: &BitMatrix) -> Result<Vec<f64>> {
    let m = ch.bits();
    if head.rows() != m || !head.is_square() {
        return Err(Error::DimensionMismatch("head order differs from bits per symbol"));
    }
    if ch.sigma2() == 0.0 {
        return Ok(vec![1.0; m]);
    }
    let apply = |u: usize| {
        let bits: Vec<u8> = (0..m).map(|i| ((u >> i) & 1) as u8).collect();
        head.vec_mul(&bits).unwrap().iter().enumerate().fold(0, |a, (i, &b)| a | (usize::from(b) << i))
    };
    let image: Vec<usize> = (0..1usize << m).map(apply).collect();
    let mut x_llrs = vec![0.0; m];
    let mut u_bits = vec![0u8; m];
    let v = ask_quadrature(ch, m, |u| image[u], |u, metrics, out| {
        for (i, l) in x_llrs.iter_mut().enumerate() {
            *l = crate::channels::level_llr(metrics, i, None);
            u_bits[i] = ((u >> i) & 1) as u8;
        }
        for t in 0..m {
            out[t] = 1.0 - mi_loss(successive_head_llr(head, &x_llrs, t, &u_bits[..t]), u_bits[t]);
        }
    })?;
    Ok(v.into_iter().map(|c| c.clamp(0.0, 1.0)).collect())
}
