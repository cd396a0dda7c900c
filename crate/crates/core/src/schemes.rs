//! Polar-coded modulation: multilevel codes with multistage decoding and
//! BICM polar codes in their original and modified forms.
//!
//! Source bit `N·i + j` of a multilevel or modified-BICM scheme is bit `j`
//! of the component code on level `i`. Symbols are carried as packed labels
//! (bit `t` of the integer is label bit `b_t`) of the scheme's channel table.
//!
//! * MLC: level `i` of symbol `j` is bit `j` of the level-`i` polar codeword.
//! * Modified BICM: the level codewords form `v`, and symbol `j` carries the
//!   Gray label `v_j·T` (`T = T_m` on ASK, `G_2 ⊗ T_{m/2}` on QAM).
//! * Original BICM: `c = u·G_{mN}`, with `c[m·j .. m·j+m]` the Gray label of symbol `j`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::channels::{level_llr, Constellation, ConstellationKind, LabelingRule, ModChannel};
use crate::gf2::{log2_exact, BitMatrix};
use crate::labeling::{qam_sp_to_gray, sp_to_gray_matrix, successive_head_llr, tm_level_llr};
use crate::math::{hard, mi_loss};
use crate::polar::{polar_transform, CodeSpec, ScDecoder};
use crate::{Error, Result};

/// Coded-modulation scheme family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    /// Multilevel polar code with multistage decoding.
    Mlc,
    /// One long polar code, Gray mapping, parallel demapping.
    BicmOriginal,
    /// Per-level component codes behind the `T` transform, Gray mapping, parallel demapping.
    BicmModified,
}

/// A fully specified scheme: constellation, labeling, component length and frozen set.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSpec {
    kind: SchemeKind,
    constellation: Constellation,
    labeling: LabelingRule,
    n_exp: u32,
    frozen: Vec<bool>,
}

impl SchemeSpec {
    /// Validates a scheme; `frozen` indexes the `m·N` source bits.
    pub fn new(
        kind: SchemeKind,
        constellation: Constellation,
        labeling: LabelingRule,
        n_exp: u32,
        frozen: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let m = constellation.bits();
        if kind != SchemeKind::Mlc && labeling != LabelingRule::Gray {
            return Err(Error::Unsupported("BICM schemes use Gray labeling"));
        }
        if kind == SchemeKind::BicmOriginal && !m.is_power_of_two() {
            return Err(Error::Unsupported("original BICM needs m to be a power of two"));
        }
        if n_exp > 20 {
            return Err(Error::InvalidParameter("component length exponent too large"));
        }
        let len = m << n_exp;
        let mut mask = vec![false; len];
        for i in frozen {
            if i >= len {
                return Err(Error::IndexOutOfRange { index: i, size: len });
            }
            mask[i] = true;
        }
        Ok(Self {
            kind,
            constellation,
            labeling,
            n_exp,
            frozen: mask,
        })
    }

    /// Scheme family.
    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    /// Signal set.
    pub fn constellation(&self) -> &Constellation {
        &self.constellation
    }

    /// Labeling rule of the channel.
    pub fn labeling(&self) -> LabelingRule {
        self.labeling
    }

    /// Bits per symbol `m`.
    pub fn m(&self) -> usize {
        self.constellation.bits()
    }

    /// `log2 N`.
    pub fn n_exp(&self) -> u32 {
        self.n_exp
    }

    /// Symbols per block `N`.
    pub fn symbols(&self) -> usize {
        1 << self.n_exp
    }

    /// Source bits per block `m·N`.
    pub fn len(&self) -> usize {
        self.frozen.len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Frozen flags over the `m·N` source bits.
    pub fn frozen_mask(&self) -> &[bool] {
        &self.frozen
    }

    /// Sorted frozen positions.
    pub fn frozen(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.frozen[i]).collect()
    }

    /// Number of information bits.
    pub fn info_len(&self) -> usize {
        self.frozen.iter().filter(|f| !**f).count()
    }

    /// Information bits per symbol.
    pub fn rate(&self) -> f64 {
        self.info_len() as f64 / self.symbols() as f64
    }

    /// Information bits per level (level-major index blocks of length `N`).
    pub fn level_rates(&self) -> Vec<usize> {
        self.frozen.chunks(self.symbols()).map(|c| c.iter().filter(|f| !**f).count()).collect()
    }

    /// Same scheme with a new frozen set.
    pub fn with_frozen(&self, frozen: impl IntoIterator<Item = usize>) -> Result<Self> {
        Self::new(self.kind, self.constellation.clone(), self.labeling, self.n_exp, frozen)
    }

    /// Component code of level `i`.
    pub fn level_code(&self, level: usize) -> CodeSpec {
        let n = self.symbols();
        let base = level * n;
        CodeSpec::new(self.n_exp, (0..n).filter(|&j| self.frozen[base + j])).expect("valid exponent")
    }

    /// The length-`m·N` code of original BICM.
    pub fn global_code(&self) -> Result<CodeSpec> {
        let n_exp = log2_exact(self.len())?;
        CodeSpec::new(n_exp, self.frozen())
    }

    /// Modulated AWGN channel with this scheme's labeling.
    pub fn channel(&self, es_n0_db: f64) -> Result<ModChannel> {
        ModChannel::at_es_n0(self.constellation.clone(), self.labeling, es_n0_db)
    }

    /// Places information bits on the unfrozen positions.
    pub fn embed(&self, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.info_len() {
            return Err(Error::LengthMismatch {
                expected: self.info_len(),
                got: info.len(),
            });
        }
        let mut u = vec![0u8; self.len()];
        let mut it = info.iter();
        for (slot, &f) in u.iter_mut().zip(&self.frozen) {
            if !f {
                *slot = it.next().copied().unwrap_or(0) & 1;
            }
        }
        Ok(u)
    }

    /// Like [`SchemeSpec::embed`], with the frozen positions (in increasing
    /// order) set to `frozen_values` instead of zero.
    pub fn embed_with(&self, info: &[u8], frozen_values: &[u8]) -> Result<Vec<u8>> {
        let n_frozen = self.len() - self.info_len();
        if frozen_values.len() != n_frozen {
            return Err(Error::LengthMismatch {
                expected: n_frozen,
                got: frozen_values.len(),
            });
        }
        let mut u = self.embed(info)?;
        let slots = u.iter_mut().zip(&self.frozen).filter(|(_, f)| **f);
        for ((slot, _), &b) in slots.zip(frozen_values) {
            *slot = b & 1;
        }
        Ok(u)
    }

    /// Reads the information bits out of a source vector.
    pub fn extract(&self, u: &[u8]) -> Vec<u8> {
        u.iter().zip(&self.frozen).filter(|(_, f)| !**f).map(|(&b, _)| b).collect()
    }

    /// Encodes a source vector into packed labels, one per symbol.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<usize>> {
        if u.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: u.len(),
            });
        }
        if let Some(i) = (0..self.len()).find(|&i| self.frozen[i] && u[i] != 0) {
            return Err(Error::FrozenViolation(i));
        }
        self.encode_any(u)
    }

    /// Encodes any source vector, whatever its frozen positions hold.
    pub fn encode_any(&self, u: &[u8]) -> Result<Vec<usize>> {
        if u.len() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: u.len(),
            });
        }
        let (m, n) = (self.m(), self.symbols());
        match self.kind {
            SchemeKind::Mlc => Ok(pack_levels(&level_codewords(u, m, n), n)),
            SchemeKind::BicmModified => {
                let v = pack_levels(&level_codewords(u, m, n), n);
                let head = self.head_matrix();
                Ok(v.into_iter().map(|x| apply_packed(&head, x)).collect())
            }
            SchemeKind::BicmOriginal => {
                let mut c = u.to_vec();
                polar_transform(&mut c);
                Ok(c.chunks(m).map(pack_bits).collect())
            }
        }
    }

    /// Constellation point indices of packed labels.
    pub fn points_of(&self, labels: &[usize]) -> Vec<usize> {
        let inv = self.constellation.label_table(self.labeling).inverse_map();
        labels.iter().map(|&l| inv[l]).collect()
    }

    /// The per-symbol transform between level codewords and Gray labels.
    pub fn head_matrix(&self) -> BitMatrix {
        head_for(&self.constellation)
    }
}

fn head_for(c: &Constellation) -> BitMatrix {
    match c.kind() {
        ConstellationKind::Ask => sp_to_gray_matrix(c.bits()),
        ConstellationKind::Qam => qam_sp_to_gray(c.bits() / 2),
    }
}

fn pack_bits(bits: &[u8]) -> usize {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (usize::from(b & 1) << i))
}

fn apply_packed(a: &BitMatrix, x: usize) -> usize {
    let bits: Vec<u8> = (0..a.rows()).map(|i| ((x >> i) & 1) as u8).collect();
    pack_bits(&a.vec_mul(&bits).expect("square head"))
}

fn level_codewords(u: &[u8], m: usize, n: usize) -> Vec<Vec<u8>> {
    (0..m)
        .map(|i| {
            let mut c = u[i * n..(i + 1) * n].to_vec();
            polar_transform(&mut c);
            c
        })
        .collect()
}

fn pack_levels(levels: &[Vec<u8>], n: usize) -> Vec<usize> {
    (0..n)
        .map(|j| levels.iter().enumerate().fold(0, |acc, (i, c)| acc | (usize::from(c[j]) << i)))
        .collect()
}

/// Decoder workspace for one scheme.
#[derive(Debug, Clone)]
pub struct SchemeDecoder {
    spec: SchemeSpec,
    sc: ScDecoder,
    metrics: Vec<f64>,
    llrs: Vec<f64>,
    lower: Vec<usize>,
    x_llrs: Vec<f64>,
    head: BitMatrix,
}

impl SchemeDecoder {
    /// Workspace sized for `spec`.
    pub fn new(spec: &SchemeSpec) -> Result<Self> {
        let (m, n) = (spec.m(), spec.symbols());
        let sc = match spec.kind {
            SchemeKind::BicmOriginal => ScDecoder::new(log2_exact(m * n)?),
            _ => ScDecoder::new(spec.n_exp),
        };
        Ok(Self {
            spec: spec.clone(),
            sc,
            metrics: vec![0.0; n << m],
            llrs: vec![0.0; m * n],
            lower: vec![0; n],
            x_llrs: vec![0.0; n * m],
            head: spec.head_matrix(),
        })
    }

    /// The scheme being decoded.
    pub fn spec(&self) -> &SchemeSpec {
        &self.spec
    }

    /// SC-based decoding of received samples `y`; returns `û`.
    pub fn decode(&mut self, ch: &ModChannel, y: &[[f64; 2]]) -> Result<Vec<u8>> {
        let mask = self.spec.frozen.clone();
        let mut u = vec![0u8; self.spec.len()];
        self.decode_with(ch, y, &mut u, |i, l| if mask[i] { 0 } else { hard(l) })?;
        Ok(u)
    }

    /// Decoding with known, not necessarily zero, frozen values (in
    /// increasing position order).
    pub fn decode_known(&mut self, ch: &ModChannel, y: &[[f64; 2]], frozen_values: &[u8]) -> Result<Vec<u8>> {
        let full = self.spec.embed_with(&vec![0; self.spec.info_len()], frozen_values)?;
        let mask = self.spec.frozen.clone();
        let mut u = vec![0u8; self.spec.len()];
        self.decode_with(ch, y, &mut u, |i, l| if mask[i] { full[i] } else { hard(l) })?;
        Ok(u)
    }

    /// Genie-aided pass: every decision is replaced by the true bit. Counts
    /// hard-decision errors and records per-bit information `1 - loss`.
    pub fn genie(&mut self, ch: &ModChannel, y: &[[f64; 2]], u: &[u8], errors: &mut [u64], info: &mut [f64]) -> Result<()> {
        let mut out = vec![0u8; self.spec.len()];
        self.decode_with(ch, y, &mut out, |i, l| {
            let b = u[i];
            if hard(l) != b {
                errors[i] += 1;
            }
            info[i] = 1.0 - mi_loss(l, b);
            b
        })
    }

    /// Decoding with a caller-supplied decision rule `decide(source_index, llr)`.
    ///
    /// MLC demaps each level with the re-encoded lower levels as side
    /// information; modified BICM demaps all levels in parallel and resolves
    /// the per-symbol transform with the re-encoded previous level; original
    /// BICM runs one SC pass over the parallel LLRs.
    pub fn decode_with(
        &mut self,
        ch: &ModChannel,
        y: &[[f64; 2]],
        u_out: &mut [u8],
        mut decide: impl FnMut(usize, f64) -> u8,
    ) -> Result<()> {
        let (m, n) = (self.spec.m(), self.spec.symbols());
        if ch.bits() != m {
            return Err(Error::DimensionMismatch("channel bits differ from scheme"));
        }
        if y.len() != n {
            return Err(Error::LengthMismatch { expected: n, got: y.len() });
        }
        if u_out.len() != m * n {
            return Err(Error::LengthMismatch {
                expected: m * n,
                got: u_out.len(),
            });
        }
        let size = 1usize << m;
        for (j, yj) in y.iter().enumerate() {
            ch.label_metrics(yj, &mut self.metrics[j * size..(j + 1) * size]);
        }
        match self.spec.kind {
            SchemeKind::BicmOriginal => {
                for j in 0..n {
                    let metrics = &self.metrics[j * size..(j + 1) * size];
                    for t in 0..m {
                        self.llrs[j * m + t] = level_llr(metrics, t, None);
                    }
                }
                self.sc.decode_with(&self.llrs, u_out, decide)
            }
            SchemeKind::Mlc => {
                self.lower.iter_mut().for_each(|l| *l = 0);
                for level in 0..m {
                    for j in 0..n {
                        let metrics = &self.metrics[j * size..(j + 1) * size];
                        self.llrs[j] = level_llr(metrics, level, Some(self.lower[j]));
                    }
                    let base = level * n;
                    let block = &mut u_out[base..base + n];
                    self.sc.decode_with(&self.llrs[..n], block, |i, l| decide(base + i, l))?;
                    let mut c = block.to_vec();
                    polar_transform(&mut c);
                    for (l, &b) in self.lower.iter_mut().zip(&c) {
                        *l |= usize::from(b) << level;
                    }
                }
                Ok(())
            }
            SchemeKind::BicmModified => {
                for j in 0..n {
                    let metrics = &self.metrics[j * size..(j + 1) * size];
                    for t in 0..m {
                        self.x_llrs[j * m + t] = level_llr(metrics, t, None);
                    }
                }
                self.lower.iter_mut().for_each(|l| *l = 0);
                let ask = self.spec.constellation.kind() == ConstellationKind::Ask;
                let mut known = vec![0u8; m];
                for level in 0..m {
                    for j in 0..n {
                        let x = &self.x_llrs[j * m..(j + 1) * m];
                        self.llrs[j] = if ask {
                            let prev = level.checked_sub(1).map(|p| ((self.lower[j] >> p) & 1) as u8);
                            tm_level_llr(x, level, prev)
                        } else {
                            for (t, k) in known[..level].iter_mut().enumerate() {
                                *k = ((self.lower[j] >> t) & 1) as u8;
                            }
                            successive_head_llr(&self.head, x, level, &known[..level])
                        };
                    }
                    let base = level * n;
                    let block = &mut u_out[base..base + n];
                    self.sc.decode_with(&self.llrs[..n], block, |i, l| decide(base + i, l))?;
                    let mut c = block.to_vec();
                    polar_transform(&mut c);
                    for (l, &b) in self.lower.iter_mut().zip(&c) {
                        *l |= usize::from(b) << level;
                    }
                }
                Ok(())
            }
        }
    }
}

/// Outcome of [`verify_code_equivalence`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    /// Source vectors compared.
    pub checked: u64,
    /// Whether every source vector was enumerated.
    pub exhaustive: bool,
    /// First source vector whose symbol sequences differ.
    pub counterexample: Option<Vec<u8>>,
}

impl EquivalenceReport {
    /// No counterexample found.
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Compares MLC with set-partitioning labels against modified BICM with
/// Gray labels, symbol by symbol, over all source vectors when `m·N ≤ 16`
/// and over `samples` random ones otherwise.
pub fn verify_code_equivalence<R: Rng + ?Sized>(
    constellation: &Constellation,
    n_exp: u32,
    samples: u64,
    rng: &mut R,
) -> Result<EquivalenceReport> {
    let mlc = SchemeSpec::new(SchemeKind::Mlc, constellation.clone(), LabelingRule::SetPartition, n_exp, [])?;
    let bicm = SchemeSpec::new(SchemeKind::BicmModified, constellation.clone(), LabelingRule::Gray, n_exp, [])?;
    let len = mlc.len();
    let exhaustive = len <= 16;
    let total = if exhaustive { 1u64 << len } else { samples };
    let mut u = vec![0u8; len];
    for t in 0..total {
        for (i, b) in u.iter_mut().enumerate() {
            *b = if exhaustive { ((t >> i) & 1) as u8 } else { rng.random_range(0..2) };
        }
        let a = mlc.points_of(&mlc.encode(&u)?);
        let b = bicm.points_of(&bicm.encode(&u)?);
        if a != b {
            return Ok(EquivalenceReport {
                checked: t + 1,
                exhaustive,
                counterexample: Some(u),
            });
        }
    }
    Ok(EquivalenceReport {
        checked: total,
        exhaustive,
        counterexample: None,
    })
}

/// Generator matrix of a scheme over GF(2): row `r` is the concatenated
/// label bits (symbol-major) produced by source unit vector `e_r`.
pub fn generator_matrix(spec: &SchemeSpec) -> Result<BitMatrix> {
    let all = spec.with_frozen([])?;
    let (m, len) = (spec.m(), spec.len());
    let mut g = BitMatrix::zeros(len, len);
    let mut u = vec![0u8; len];
    for r in 0..len {
        u[r] = 1;
        for (j, label) in all.encode(&u)?.into_iter().enumerate() {
            for t in 0..m {
                g.set(r, j * m + t, (label >> t) & 1 == 1);
            }
        }
        u[r] = 0;
    }
    Ok(g)
}
