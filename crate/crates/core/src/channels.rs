//! Memoryless channel models.
//!
//! Binary-input channels ([`Bdmc`]) back the polar-code experiments; the
//! modulated AWGN channel ([`ModChannel`]) carries `2^m`-ary ASK or square QAM
//! with a label table and provides exact per-level demapping, either
//! successive (conditioned on lower levels) or parallel.
//!
//! Signal points have unit average energy and the noise variance is `N0/2`
//! per real dimension, so `Es/N0 = 1/(2σ²)`.

use alloc::vec;
use alloc::vec::Vec;

use libm::{log, log10, pow, sqrt};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::labeling::{gray_table, qam_gray_table, qam_sp_table, sp_table, LabelTable};
use crate::math::{clamp_llr, j_capacity, log_add_exp};
use crate::{Error, Result};

/// A binary-input memoryless channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bdmc {
    /// Erasure channel with erasure probability `ε`.
    Bec(f64),
    /// Symmetric channel with crossover probability `p ≤ 1/2`.
    Bsc(f64),
    /// Antipodal `±1` input with Gaussian noise of standard deviation `σ`.
    BiAwgn(f64),
}

impl Bdmc {
    /// BEC(ε), `0 ≤ ε ≤ 1`.
    pub fn bec(eps: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&eps) {
            Ok(Self::Bec(eps))
        } else {
            Err(Error::InvalidParameter("erasure probability outside [0, 1]"))
        }
    }

    /// BSC(p), `0 ≤ p ≤ 1/2`.
    pub fn bsc(p: f64) -> Result<Self> {
        if (0.0..=0.5).contains(&p) {
            Ok(Self::Bsc(p))
        } else {
            Err(Error::InvalidParameter("crossover probability outside [0, 1/2]"))
        }
    }

    /// BiAWGN(σ), `σ > 0`.
    pub fn bi_awgn(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(Self::BiAwgn(sigma))
        } else {
            Err(Error::InvalidParameter("noise deviation must be positive"))
        }
    }

    /// Symmetric capacity in bits.
    pub fn capacity(&self) -> f64 {
        match *self {
            Bdmc::Bec(eps) => 1.0 - eps,
            Bdmc::Bsc(p) => 1.0 - crate::math::binary_entropy(p),
            Bdmc::BiAwgn(sigma) => j_capacity(2.0 / (sigma * sigma)),
        }
    }

    /// One channel use: the exact LLR of the observation for input `bit`.
    ///
    /// Erasures give `0`; noiseless observations give `±∞`.
    pub fn sample_llr<R: Rng + ?Sized>(&self, bit: u8, rng: &mut R) -> f64 {
        let sign = if bit == 0 { 1.0 } else { -1.0 };
        match *self {
            Bdmc::Bec(eps) => {
                if rng.random::<f64>() < eps {
                    0.0
                } else {
                    sign * f64::INFINITY
                }
            }
            Bdmc::Bsc(p) => {
                let flipped = rng.random::<f64>() < p;
                let magnitude = if p == 0.0 { f64::INFINITY } else { log((1.0 - p) / p) };
                if flipped {
                    -sign * magnitude
                } else {
                    sign * magnitude
                }
            }
            Bdmc::BiAwgn(sigma) => {
                let z: f64 = StandardNormal.sample(rng);
                let y = sign + sigma * z;
                2.0 * y / (sigma * sigma)
            }
        }
    }
}

/// Signal-set family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstellationKind {
    /// One-dimensional amplitude-shift keying.
    Ask,
    /// Square QAM, the Cartesian product of two ASK axes.
    Qam,
}

/// A unit-energy signal set of `2^bits` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    kind: ConstellationKind,
    bits: usize,
    points: Vec<[f64; 2]>,
}

fn pam_amplitudes(levels: usize, energy: f64) -> Vec<f64> {
    // 2i - M + 1 grid has mean energy (M² - 1)/3.
    let m = levels as f64;
    let scale = sqrt(3.0 * energy / (m * m - 1.0));
    (0..levels).map(|i| (2.0 * i as f64 - m + 1.0) * scale).collect()
}

impl Constellation {
    /// `2^bits`-ASK, equally spaced and symmetric about zero.
    pub fn ask(bits: usize) -> Result<Self> {
        if bits == 0 || bits > 12 {
            return Err(Error::InvalidParameter("ASK order must be 1..=12 bits"));
        }
        let points = pam_amplitudes(1 << bits, 1.0).into_iter().map(|a| [a, 0.0]).collect();
        Ok(Self {
            kind: ConstellationKind::Ask,
            bits,
            points,
        })
    }

    /// Square `2^bits`-QAM; `bits` must be even. Point `r·2^{bits/2} + c`
    /// sits at in-phase amplitude `r` and quadrature amplitude `c`.
    pub fn qam(bits: usize) -> Result<Self> {
        if bits < 2 || bits % 2 != 0 || bits > 16 {
            return Err(Error::InvalidParameter("square QAM needs an even bit count 2..=16"));
        }
        let axis = pam_amplitudes(1 << (bits / 2), 0.5);
        let mut points = Vec::with_capacity(1 << bits);
        for &re in &axis {
            for &im in &axis {
                points.push([re, im]);
            }
        }
        Ok(Self {
            kind: ConstellationKind::Qam,
            bits,
            points,
        })
    }

    /// Builds the constellation of a kind with `bits` per symbol.
    pub fn new(kind: ConstellationKind, bits: usize) -> Result<Self> {
        match kind {
            ConstellationKind::Ask => Self::ask(bits),
            ConstellationKind::Qam => Self::qam(bits),
        }
    }

    /// Family.
    pub fn kind(&self) -> ConstellationKind {
        self.kind
    }

    /// Bits per symbol `m`.
    pub fn bits(&self) -> usize {
        self.bits
    }

    /// Real dimensions (1 or 2).
    pub fn dims(&self) -> usize {
        match self.kind {
            ConstellationKind::Ask => 1,
            ConstellationKind::Qam => 2,
        }
    }

    /// Signal points; the second coordinate is zero for ASK.
    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    /// Mean squared magnitude over equiprobable points.
    pub fn energy(&self) -> f64 {
        self.points.iter().map(|p| p[0] * p[0] + p[1] * p[1]).sum::<f64>() / self.points.len() as f64
    }

    /// Label table of the given rule for this signal set.
    pub fn label_table(&self, rule: LabelingRule) -> LabelTable {
        match (self.kind, rule) {
            (ConstellationKind::Ask, LabelingRule::SetPartition) => sp_table(self.bits),
            (ConstellationKind::Ask, LabelingRule::Gray) => gray_table(self.bits),
            (ConstellationKind::Qam, LabelingRule::SetPartition) => qam_sp_table(self.bits / 2),
            (ConstellationKind::Qam, LabelingRule::Gray) => qam_gray_table(self.bits / 2),
        }
    }

    /// Minimum Euclidean distance within the subsets obtained by fixing label
    /// bits `b_0..b_{i-1}`, for `i = 0..bits`.
    pub fn subset_min_distances(&self, table: &LabelTable) -> Vec<f64> {
        (0..self.bits)
            .map(|level| {
                let mask = (1usize << level) - 1;
                let mut best = f64::INFINITY;
                for a in 0..self.points.len() {
                    for b in a + 1..self.points.len() {
                        if table.label_index(a) & mask == table.label_index(b) & mask {
                            best = best.min(distance(&self.points[a], &self.points[b]));
                        }
                    }
                }
                best
            })
            .collect()
    }
}

fn distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
    sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]))
}

/// Labeling rule of a modulated channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LabelingRule {
    /// Set partitioning (natural on ASK, `[r⊕c, c]` on QAM).
    SetPartition,
    /// Binary-reflected Gray (per axis on QAM).
    Gray,
}

/// Converts `Es/N0` in dB to the per-dimension noise variance at unit symbol energy.
pub fn noise_variance(es_n0_db: f64) -> f64 {
    1.0 / (2.0 * pow(10.0, es_n0_db / 10.0))
}

/// `Es/N0 = Eb/N0 + 10·log10(R)` in dB, `R` in information bits per symbol.
pub fn es_n0_from_eb_n0(eb_n0_db: f64, rate: f64) -> f64 {
    eb_n0_db + 10.0 * log10(rate)
}

/// `Eb/N0 = Es/N0 - 10·log10(R)` in dB.
pub fn eb_n0_from_es_n0(es_n0_db: f64, rate: f64) -> f64 {
    es_n0_db - 10.0 * log10(rate)
}

/// A `2^m`-ary AWGN channel with a labeled signal set.
#[derive(Debug, Clone)]
pub struct ModChannel {
    constellation: Constellation,
    table: LabelTable,
    point_of_label: Vec<usize>,
    label_points: Vec<[f64; 2]>,
    sigma2: f64,
}

impl ModChannel {
    /// Channel with an explicit label table and noise variance per real dimension.
    pub fn new(constellation: Constellation, table: LabelTable, sigma2: f64) -> Result<Self> {
        if table.order() != constellation.bits() {
            return Err(Error::DimensionMismatch("label width differs from bits per symbol"));
        }
        if !(sigma2 >= 0.0) {
            return Err(Error::InvalidParameter("noise variance must be non-negative"));
        }
        let point_of_label = table.inverse_map();
        let label_points = point_of_label.iter().map(|&p| constellation.points()[p]).collect();
        Ok(Self {
            constellation,
            table,
            point_of_label,
            label_points,
            sigma2,
        })
    }

    /// Channel at a given `Es/N0` in dB with a standard labeling rule.
    pub fn at_es_n0(constellation: Constellation, rule: LabelingRule, es_n0_db: f64) -> Result<Self> {
        let table = constellation.label_table(rule);
        Self::new(constellation, table, noise_variance(es_n0_db))
    }

    /// Bits per symbol.
    pub fn bits(&self) -> usize {
        self.constellation.bits()
    }

    /// Signal set.
    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    /// Label table.
    pub fn table(&self) -> &LabelTable {
        &self.table
    }

    /// Noise variance per real dimension.
    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Packs label bits `b_0..b_{m-1}` into an integer.
    pub fn pack(&self, label: &[u8]) -> Result<usize> {
        if label.len() != self.bits() {
            return Err(Error::LengthMismatch {
                expected: self.bits(),
                got: label.len(),
            });
        }
        Ok(label.iter().enumerate().fold(0, |acc, (i, &b)| acc | (usize::from(b & 1) << i)))
    }

    /// Point index carrying a packed label.
    pub fn point_of(&self, packed_label: usize) -> usize {
        self.point_of_label[packed_label]
    }

    /// Signal point carrying a packed label.
    pub fn map_packed(&self, packed_label: usize) -> [f64; 2] {
        self.label_points[packed_label]
    }

    /// Adds noise to the point carrying a packed label.
    pub fn transmit_packed<R: Rng + ?Sized>(&self, packed_label: usize, rng: &mut R) -> [f64; 2] {
        let x = self.label_points[packed_label];
        if self.sigma2 == 0.0 {
            return x;
        }
        let s = sqrt(self.sigma2);
        let mut y = x;
        for coord in y.iter_mut().take(self.constellation.dims()) {
            let z: f64 = StandardNormal.sample(rng);
            *coord += s * z;
        }
        y
    }

    /// Maps `label` and adds Gaussian noise in every used dimension.
    pub fn transmit<R: Rng + ?Sized>(&self, label: &[u8], rng: &mut R) -> Result<[f64; 2]> {
        let packed = self.pack(label)?;
        Ok(self.transmit_packed(packed, rng))
    }

    /// Log-likelihoods `-|y - x|²/(2σ²)` of every label, indexed by packed label.
    pub fn label_metrics(&self, y: &[f64; 2], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.label_points.len());
        let scale = if self.sigma2 > 0.0 { 0.5 / self.sigma2 } else { f64::INFINITY };
        for (o, x) in out.iter_mut().zip(&self.label_points) {
            let d2 = (y[0] - x[0]) * (y[0] - x[0]) + (y[1] - x[1]) * (y[1] - x[1]);
            *o = if d2 == 0.0 { 0.0 } else { -d2 * scale };
        }
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level >= self.bits() {
            Err(Error::IndexOutOfRange {
                index: level,
                size: self.bits(),
            })
        } else {
            Ok(())
        }
    }

    /// LLR of `b_level` given `y` and the known lower bits (successive demapping).
    pub fn msd_level_llr(&self, y: &[f64; 2], level: usize, known: &[u8]) -> Result<f64> {
        self.check_level(level)?;
        if known.len() != level {
            return Err(Error::LengthMismatch {
                expected: level,
                got: known.len(),
            });
        }
        let mut metrics = vec![0.0; self.label_points.len()];
        self.label_metrics(y, &mut metrics);
        let lower = known.iter().enumerate().fold(0, |acc, (i, &b)| acc | (usize::from(b & 1) << i));
        Ok(level_llr(&metrics, level, Some(lower)))
    }

    /// LLR of `b_level` given `y` only (parallel demapping).
    pub fn parallel_level_llr(&self, y: &[f64; 2], level: usize) -> Result<f64> {
        self.check_level(level)?;
        let mut metrics = vec![0.0; self.label_points.len()];
        self.label_metrics(y, &mut metrics);
        Ok(level_llr(&metrics, level, None))
    }
}

/// LLR of bit `level` from per-label log-likelihoods.
///
/// With `lower = Some(v)` only labels whose bits below `level` equal `v` take
/// part (successive demapping); with `None` all labels are marginalized.
pub fn level_llr(metrics: &[f64], level: usize, lower: Option<usize>) -> f64 {
    let mask = (1usize << level) - 1;
    let mut acc = [f64::NEG_INFINITY; 2];
    for (label, &m) in metrics.iter().enumerate() {
        if let Some(v) = lower {
            if label & mask != v {
                continue;
            }
        }
        let bit = (label >> level) & 1;
        acc[bit] = log_add_exp(acc[bit], m);
    }
    let l = acc[0] - acc[1];
    if l.is_nan() {
        0.0
    } else {
        clamp_llr(l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bdmc_validation_and_capacity() {
        assert!(Bdmc::bec(1.2).is_err());
        assert!(Bdmc::bsc(0.7).is_err());
        assert!(Bdmc::bi_awgn(0.0).is_err());
        assert_eq!(Bdmc::bec(0.0).unwrap().capacity(), 1.0);
        assert!((Bdmc::bec(0.3).unwrap().capacity() - 0.7).abs() < 1e-15);
        assert_eq!(Bdmc::bsc(0.5).unwrap().capacity(), 0.0);
        assert!((Bdmc::bi_awgn(1.0).unwrap().capacity() - 0.4859).abs() < 1e-3);
    }

    #[test]
    fn bec_llr_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ch = Bdmc::bec(0.3).unwrap();
        let n = 100_000;
        let mut erasures = 0;
        for _ in 0..n {
            let l = ch.sample_llr(1, &mut rng);
            if l == 0.0 {
                erasures += 1;
            } else {
                assert_eq!(l, f64::NEG_INFINITY);
            }
        }
        let freq = erasures as f64 / n as f64;
        assert!((freq - 0.3).abs() < 4.0 * (0.3f64 * 0.7 / n as f64).sqrt());
    }

    #[test]
    fn bsc_llr_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = 0.11;
        let ch = Bdmc::bsc(p).unwrap();
        let mag = ((1.0 - p) / p).ln();
        let n = 100_000;
        let mut neg = 0;
        for _ in 0..n {
            let l = ch.sample_llr(0, &mut rng);
            assert!((l.abs() - mag).abs() < 1e-12);
            if l < 0.0 {
                neg += 1;
            }
        }
        let freq = neg as f64 / n as f64;
        assert!((freq - p).abs() < 4.0 * (p * (1.0 - p) / n as f64).sqrt());
    }

    #[test]
    fn biawgn_llr_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sigma = 0.8;
        let ch = Bdmc::bi_awgn(sigma).unwrap();
        let n = 100_000;
        for bit in 0..2u8 {
            let mean = (0..n).map(|_| ch.sample_llr(bit, &mut rng)).sum::<f64>() / n as f64;
            let expected = (1.0 - 2.0 * f64::from(bit)) * 2.0 / (sigma * sigma);
            let sd = 2.0 / sigma / (n as f64).sqrt();
            assert!((mean - expected).abs() < 5.0 * sd, "bit {bit}: {mean} vs {expected}");
        }
    }

    #[test]
    fn constellations_are_normalized_and_distinct() {
        for bits in 1..=8 {
            let c = Constellation::ask(bits).unwrap();
            assert_eq!(c.points().len(), 1 << bits);
            assert!((c.energy() - 1.0).abs() < 1e-12);
            let min = c.subset_min_distances(&c.label_table(LabelingRule::SetPartition))[0];
            assert!(min > 0.0);
        }
        for bits in [2, 4, 6, 8] {
            let c = Constellation::qam(bits).unwrap();
            assert_eq!(c.points().len(), 1 << bits);
            assert!((c.energy() - 1.0).abs() < 1e-12);
        }
        assert!(Constellation::qam(3).is_err());
        assert!(Constellation::ask(0).is_err());
        let a4 = Constellation::ask(2).unwrap();
        let s = (0.2f64).sqrt();
        let expected = [-3.0 * s, -s, s, 3.0 * s];
        for (p, e) in a4.points().iter().zip(expected) {
            assert!((p[0] - e).abs() < 1e-12);
        }
    }

    #[test]
    fn ask_set_partitioning_doubles_distance() {
        for bits in 2..=4 {
            let c = Constellation::ask(bits).unwrap();
            let d = c.subset_min_distances(&c.label_table(LabelingRule::SetPartition));
            for w in d.windows(2) {
                assert!((w[1] / w[0] - 2.0).abs() < 1e-9, "{d:?}");
            }
        }
    }

    #[test]
    fn qam16_set_partitioning_distances() {
        // [r⊕c, c] labels: squared distances relative to the minimum go 1, 2, 2, 8.
        let c = Constellation::qam(4).unwrap();
        let d = c.subset_min_distances(&c.label_table(LabelingRule::SetPartition));
        let d0 = d[0] * d[0];
        let rel: Vec<f64> = d.iter().map(|x| x * x / d0).collect();
        for (r, e) in rel.iter().zip([1.0, 2.0, 2.0, 8.0]) {
            assert!((r - e).abs() < 1e-9, "{rel:?}");
        }
        for w in d.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
        let gray = c.subset_min_distances(&c.label_table(LabelingRule::Gray));
        assert!(gray[1] <= d[1] + 1e-12);
    }

    #[test]
    fn single_level_reduces_to_biawgn() {
        let sigma2 = 0.3;
        let ch = ModChannel::new(Constellation::ask(1).unwrap(), sp_table(1), sigma2).unwrap();
        // Natural labeling on 2-ASK: bit 0 is the point at -1.
        for &y in &[-0.7, 0.1, 1.4] {
            let l = ch.msd_level_llr(&[y, 0.0], 0, &[]).unwrap();
            assert!((l - (-2.0 * y / sigma2)).abs() < 1e-12);
            assert_eq!(l, ch.parallel_level_llr(&[y, 0.0], 0).unwrap());
        }
    }

    #[test]
    fn noiseless_llrs_saturate_with_label_sign() {
        let c = Constellation::ask(3).unwrap();
        let ch = ModChannel::new(c.clone(), gray_table(3), 1e-6).unwrap();
        for p in 0..8 {
            let y = c.points()[p];
            let label = gray_table(3).label(p);
            for level in 0..3 {
                let lp = ch.parallel_level_llr(&y, level).unwrap();
                let lm = ch.msd_level_llr(&y, level, &label[..level]).unwrap();
                for l in [lp, lm] {
                    assert_eq!(l.abs(), 40.0);
                    assert_eq!(crate::math::hard(l), label[level]);
                }
            }
        }
    }

    #[test]
    fn transmit_noise_free_and_errors() {
        let c = Constellation::ask(2).unwrap();
        let ch = ModChannel::new(c.clone(), sp_table(2), 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(ch.transmit(&[0, 0], &mut rng).unwrap(), c.points()[0]);
        assert_eq!(ch.transmit(&[1, 0], &mut rng).unwrap(), c.points()[1]);
        assert!(ch.transmit(&[1, 0, 1], &mut rng).is_err());
        assert!(ch.msd_level_llr(&[0.0, 0.0], 2, &[0, 0]).is_err());
        assert!(ch.parallel_level_llr(&[0.0, 0.0], 5).is_err());
        assert!(ch.msd_level_llr(&[0.0, 0.0], 1, &[]).is_err());
    }

    #[test]
    fn received_mean_matches_point() {
        let c = Constellation::qam(4).unwrap();
        let ch = ModChannel::at_es_n0(c.clone(), LabelingRule::Gray, 5.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let label = [1u8, 0, 1, 1];
        let n = 20_000;
        let mut mean = [0.0; 2];
        for _ in 0..n {
            let y = ch.transmit(&label, &mut rng).unwrap();
            mean[0] += y[0] / n as f64;
            mean[1] += y[1] / n as f64;
        }
        let x = ch.map_packed(ch.pack(&label).unwrap());
        let tol = 3.0 * ch.sigma2().sqrt() / (n as f64).sqrt();
        assert!((mean[0] - x[0]).abs() < tol && (mean[1] - x[1]).abs() < tol);
    }

    #[test]
    fn snr_conversions() {
        assert!((noise_variance(0.0) - 0.5).abs() < 1e-15);
        assert!((es_n0_from_eb_n0(3.0, 2.0) - (3.0 + 10.0 * 2f64.log10())).abs() < 1e-12);
        assert!((eb_n0_from_es_n0(es_n0_from_eb_n0(4.2, 1.5), 1.5) - 4.2).abs() < 1e-12);
    }
}
