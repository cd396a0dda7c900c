//! Binary polar codes with `G_N = B_N · F_N`.
//!
//! Bit channel `i` of a length-`2^n` code is reached by `n` polarization
//! steps, the most significant bit of `i` selecting the step applied to the
//! raw channel (`0` = check/"minus", `1` = variable/"plus"). Encoder, SC
//! decoder, exact BEC recursion and density evolution all share this order.

use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, expm1, log1p, sqrt};

use crate::gf2::reverse_bits;
use crate::math::{boxplus, boxplus_min_sum, clamp_llr, hard, j_capacity, j_inverse, q_function, PhiApprox};
use crate::partition::{BitChannelProfile, EstimationMethod};
use crate::{Error, Result};

/// A polar code: block length `2^n_exp` and its frozen positions (frozen to zero).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    n_exp: u32,
    frozen: Vec<usize>,
    mask: Vec<bool>,
}

impl CodeSpec {
    /// Validates and sorts the frozen set.
    pub fn new(n_exp: u32, frozen: impl IntoIterator<Item = usize>) -> Result<Self> {
        if n_exp > 24 {
            return Err(Error::InvalidParameter("block length exponent too large"));
        }
        let n = 1usize << n_exp;
        let mut mask = vec![false; n];
        for i in frozen {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, size: n });
            }
            mask[i] = true;
        }
        let frozen = (0..n).filter(|&i| mask[i]).collect();
        Ok(Self { n_exp, frozen, mask })
    }

    /// Rate-one code.
    pub fn all_info(n_exp: u32) -> Self {
        Self::new(n_exp, core::iter::empty()).expect("valid exponent")
    }

    /// `log2` of the block length.
    pub fn n_exp(&self) -> u32 {
        self.n_exp
    }

    /// Block length `N`.
    pub fn len(&self) -> usize {
        1 << self.n_exp
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sorted frozen positions.
    pub fn frozen(&self) -> &[usize] {
        &self.frozen
    }

    /// Per-position frozen flags.
    pub fn frozen_mask(&self) -> &[bool] {
        &self.mask
    }

    /// Whether position `i` is frozen.
    pub fn is_frozen(&self, i: usize) -> bool {
        self.mask[i]
    }

    /// Sorted information positions.
    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.mask[i]).collect()
    }

    /// Number of information bits.
    pub fn info_len(&self) -> usize {
        self.len() - self.frozen.len()
    }

    /// `|A| / N`.
    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.len() as f64
    }

    /// Places `info` bits on the information positions, zeros elsewhere.
    pub fn embed(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.info_len() {
            return Err(Error::LengthMismatch {
                expected: self.info_len(),
                got: info.len(),
            });
        }
        let mut u = vec![0u8; self.len()];
        for (slot, &b) in self.info_positions().into_iter().zip(info) {
            u[slot] = b & 1;
        }
        Ok(u)
    }

    /// Reads the information positions out of a source vector.
    pub fn extract(&self, u: &[u8]) -> Vec<u8> {
        (0..self.len()).filter(|&i| !self.mask[i]).map(|i| u[i]).collect()
    }
}

/// In-place `x ← x · G_N` for `len(x) = 2^n`.
pub fn polar_transform(x: &mut [u8]) {
    let n = x.len();
    assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in x.chunks_exact_mut(2 * h) {
            let (a, b) = block.split_at_mut(h);
            for (ai, bi) in a.iter_mut().zip(b.iter()) {
                *ai ^= bi;
            }
        }
        h *= 2;
    }
    bit_reverse_permute(x);
}

/// Permutes `x` by bit reversal of its indices (an involution).
pub fn bit_reverse_permute<T>(x: &mut [T]) {
    let n = x.len();
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = reverse_bits(i, bits);
        if j > i {
            x.swap(i, j);
        }
    }
}

/// Encodes `c = u · G_N`; frozen positions of `u` must hold zero.
pub fn polar_encode(u: &[u8], code: &CodeSpec) -> Result<Vec<u8>> {
    if u.len() != code.len() {
        return Err(Error::LengthMismatch {
            expected: code.len(),
            got: u.len(),
        });
    }
    if let Some(&i) = code.frozen().iter().find(|&&i| u[i] != 0) {
        return Err(Error::FrozenViolation(i));
    }
    let mut c = u.to_vec();
    polar_transform(&mut c);
    Ok(c)
}

/// Check-node rule of the SC decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CheckRule {
    /// `2·atanh(tanh(a/2)·tanh(b/2))`.
    #[default]
    Exact,
    /// `sign(a)·sign(b)·min(|a|,|b|)`.
    MinSum,
}

/// Successive-cancellation decoder with a reusable workspace for one block length.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    n_exp: u32,
    rule: CheckRule,
    alpha: Vec<f64>,
    beta: Vec<u8>,
}

impl ScDecoder {
    /// Decoder for length `2^n_exp` with the exact check-node rule.
    pub fn new(n_exp: u32) -> Self {
        Self::with_rule(n_exp, CheckRule::Exact)
    }

    /// Decoder with an explicit check-node rule.
    pub fn with_rule(n_exp: u32, rule: CheckRule) -> Self {
        let n = 1usize << n_exp;
        Self {
            n_exp,
            rule,
            alpha: vec![0.0; 2 * n],
            beta: vec![0; 2 * n],
        }
    }

    /// Block length.
    pub fn len(&self) -> usize {
        1 << self.n_exp
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decodes with the code's frozen set; returns `û`.
    pub fn decode(&mut self, llrs: &[f64], code: &CodeSpec) -> Result<Vec<u8>> {
        let mut u = vec![0u8; self.len()];
        let mask = code.frozen_mask();
        self.decode_with(llrs, &mut u, |i, l| if mask[i] { 0 } else { hard(l) })?;
        Ok(u)
    }

    /// Runs SC over channel LLRs of `c = u · G_N`, asking `decide(i, llr_i)`
    /// for every source bit in increasing order. The decision returned is the
    /// one fed forward, so a genie can return the true bit.
    pub fn decode_with(
        &mut self,
        llrs: &[f64],
        u_out: &mut [u8],
        mut decide: impl FnMut(usize, f64) -> u8,
    ) -> Result<()> {
        let n = self.len();
        if llrs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: llrs.len(),
            });
        }
        if u_out.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: u_out.len(),
            });
        }
        // c = (u F_N) permuted by bit reversal; undo the permutation on the LLRs.
        let bits = self.n_exp;
        for (p, slot) in self.alpha[..n].iter_mut().enumerate() {
            *slot = llrs[reverse_bits(p, bits)];
        }
        self.recurse(0, 0, 0, u_out, &mut decide);
        Ok(())
    }

    fn offset(&self, depth: u32) -> usize {
        let n = self.len();
        2 * n - 2 * (n >> depth)
    }

    fn recurse(
        &mut self,
        depth: u32,
        u_offset: usize,
        beta_offset: usize,
        u_out: &mut [u8],
        decide: &mut impl FnMut(usize, f64) -> u8,
    ) {
        let size = self.len() >> depth;
        let a = self.offset(depth);
        if size == 1 {
            let bit = decide(u_offset, self.alpha[a]) & 1;
            u_out[u_offset] = bit;
            self.beta[beta_offset] = bit;
            return;
        }
        let h = size / 2;
        let child = self.offset(depth + 1);
        for k in 0..h {
            let (l0, l1) = (self.alpha[a + k], self.alpha[a + k + h]);
            self.alpha[child + k] = match self.rule {
                CheckRule::Exact => boxplus(l0, l1),
                CheckRule::MinSum => boxplus_min_sum(clamp_llr(l0), clamp_llr(l1)),
            };
        }
        // Left child writes its partial sums into the first half of this node's slot.
        self.recurse(depth + 1, u_offset, beta_offset, u_out, decide);
        for k in 0..h {
            let (l0, l1) = (self.alpha[a + k], self.alpha[a + k + h]);
            let xa = self.beta[beta_offset + k];
            self.alpha[child + k] = clamp_llr(if xa == 0 { l1 + l0 } else { l1 - l0 });
        }
        self.recurse(depth + 1, u_offset + h, beta_offset + h, u_out, decide);
        for k in 0..h {
            self.beta[beta_offset + k] ^= self.beta[beta_offset + h + k];
        }
    }
}

/// Convenience wrapper around [`ScDecoder::decode`].
pub fn sc_decode(llrs: &[f64], code: &CodeSpec) -> Result<Vec<u8>> {
    ScDecoder::new(code.n_exp()).decode(llrs, code)
}

/// Bit-channel indices from most to least reliable.
///
/// Ranks by error probability when the profile carries them (capacity breaks
/// ties), else by capacity; remaining ties go to the lower index.
pub fn reliability_order(profile: &BitChannelProfile) -> Vec<usize> {
    let mut order: Vec<usize> = (0..profile.len()).collect();
    match profile.error_probs() {
        Some(pe) => {
            let cap = profile.capacities();
            order.sort_by(|&a, &b| pe[a].total_cmp(&pe[b]).then(cap[b].total_cmp(&cap[a])).then(a.cmp(&b)))
        }
        None => {
            let cap = profile.capacities();
            order.sort_by(|&a, &b| cap[b].total_cmp(&cap[a]).then(a.cmp(&b)));
        }
    }
    order
}

/// Code using the `k_info` most reliable bit channels of `profile`.
pub fn construct_frozen(profile: &BitChannelProfile, k_info: usize) -> Result<CodeSpec> {
    let n = profile.len();
    let n_exp = crate::gf2::log2_exact(n)?;
    if k_info > n {
        return Err(Error::IndexOutOfRange { index: k_info, size: n + 1 });
    }
    let order = reliability_order(profile);
    CodeSpec::new(n_exp, order[k_info..].iter().copied())
}

/// `1 - Π_{i∈A} (1 - p_e(i))` over the information set of `code`.
pub fn predict_wer(code: &CodeSpec, profile: &BitChannelProfile) -> Result<f64> {
    let pe = profile.error_probs().ok_or(Error::MissingErrorProbabilities)?;
    if pe.len() != code.len() {
        return Err(Error::LengthMismatch {
            expected: code.len(),
            got: pe.len(),
        });
    }
    Ok(wer_of(code.info_positions().into_iter().map(|i| pe[i])))
}

fn wer_of(pe: impl Iterator<Item = f64>) -> f64 {
    let log_ok: f64 = pe.map(|p| log1p(-p.min(1.0))).sum();
    -expm1(log_ok)
}

/// Largest information-set size whose predicted WER stays within `target`,
/// with the WER it achieves.
pub fn max_info_for_target(profile: &BitChannelProfile, target: f64) -> Result<(usize, f64)> {
    let pe = profile.error_probs().ok_or(Error::MissingErrorProbabilities)?;
    let mut log_ok = 0.0;
    let mut k = 0;
    for i in reliability_order(profile) {
        let next = log_ok + log1p(-pe[i].min(1.0));
        if -expm1(next) > target {
            break;
        }
        log_ok = next;
        k += 1;
    }
    Ok((k, -expm1(log_ok)))
}

/// Gaussian-approximated density evolution.
///
/// Each entry of `capacities` describes one independent input channel,
/// modelled as a consistent Gaussian LLR channel of that capacity; each is
/// polarized by a length-`2^n_exp` code. Output index `level·N + j` is bit
/// channel `j` of the code on input channel `level`.
pub fn de_ga_profile(capacities: &[f64], n_exp: u32) -> Result<BitChannelProfile> {
    let means = capacities.iter().map(|&c| j_inverse(c)).collect::<Result<Vec<_>>>()?;
    de_ga_from_means(&means, n_exp, &PhiApprox::default())
}

/// [`de_ga_profile`] for a BiAWGN channel of noise deviation `sigma`.
pub fn de_ga_profile_biawgn(sigma: f64, n_exp: u32) -> Result<BitChannelProfile> {
    de_ga_from_means(&[2.0 / (sigma * sigma)], n_exp, &PhiApprox::default())
}

/// Density evolution from input LLR means.
pub fn de_ga_from_means(means: &[f64], n_exp: u32, phi: &PhiApprox) -> Result<BitChannelProfile> {
    let n = 1usize << n_exp;
    let mut all = Vec::with_capacity(means.len() * n);
    for &mu in means {
        let mut cur = vec![mu];
        for _ in 0..n_exp {
            let mut next = Vec::with_capacity(cur.len() * 2);
            for &m in &cur {
                next.push(phi.check_mean(m, m)?);
                next.push(2.0 * m);
            }
            cur = next;
        }
        all.extend(cur);
    }
    let capacities = all.iter().map(|&m| j_capacity(m)).collect();
    let error_probs = all.iter().map(|&m| gaussian_error_prob(m)).collect();
    BitChannelProfile::with_error_probs(capacities, error_probs, EstimationMethod::DeGa)
}

/// Hard-decision error probability `Q(sqrt(μ/2))` of a consistent Gaussian LLR.
pub fn gaussian_error_prob(mu: f64) -> f64 {
    if mu.is_infinite() {
        0.0
    } else if mu > 1400.0 {
        // Q(x) ≈ φ(x)/x once erfc underflows.
        let x = sqrt(mu / 2.0);
        exp(-0.5 * x * x) / (x * sqrt(2.0 * core::f64::consts::PI))
    } else {
        q_function(sqrt(mu.max(0.0) / 2.0))
    }
}

/// What precedes the polar stages of a successive decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadStage {
    /// Successive demapping with feedback of decided lower levels.
    Demapper,
    /// Parallel demapping followed by the `T_m` trees.
    TmTrees,
}

/// Stage layout of a successive decoder over `m` levels of length-`2^n_exp` codes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageSchedule {
    /// Polar stages per level.
    pub n_exp: u32,
    /// Levels (component codes).
    pub levels: usize,
    /// Optional head stage.
    pub head: Option<HeadStage>,
}

impl StageSchedule {
    /// Total combining depth.
    pub fn depth(&self) -> u32 {
        self.n_exp + u32::from(self.head.is_some())
    }

    /// Source indices in decoding order: level-major, each exactly once.
    pub fn source_order(&self) -> impl Iterator<Item = usize> {
        0..self.levels << self.n_exp
    }
}
