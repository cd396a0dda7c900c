//! JSON configuration and code-description formats.

use clap::ValueEnum;
use polarcm_core::channels::{Constellation, ConstellationKind, LabelingRule};
use polarcm_core::schemes::{SchemeKind, SchemeSpec};
use serde::{Deserialize, Serialize};

use crate::engine::Budget;
use crate::error::{config_err, Result};

/// Scheme family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Multilevel code, multistage decoding.
    Mlc,
    /// One polar code of length `mN`, parallel demapping.
    BicmOriginal,
    /// Per-level codes behind the SP-to-Gray transform, parallel demapping.
    BicmModified,
}

impl From<Kind> for SchemeKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Mlc => SchemeKind::Mlc,
            Kind::BicmOriginal => SchemeKind::BicmOriginal,
            Kind::BicmModified => SchemeKind::BicmModified,
        }
    }
}

/// Signal-set family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Modulation {
    /// Amplitude-shift keying.
    Ask,
    /// Square QAM.
    Qam,
}

/// Labeling rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Labeling {
    /// Set partitioning.
    Sp,
    /// Binary-reflected Gray.
    Gray,
}

impl From<Labeling> for LabelingRule {
    fn from(l: Labeling) -> Self {
        match l {
            Labeling::Sp => LabelingRule::SetPartition,
            Labeling::Gray => LabelingRule::Gray,
        }
    }
}

/// Everything about a scheme except its frozen set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeConfig {
    /// Family.
    pub kind: Kind,
    /// Signal set.
    pub modulation: Modulation,
    /// Bits per symbol.
    pub bits: usize,
    /// `log2` of the symbols per block.
    pub n_exp: u32,
    /// Labeling rule.
    pub labeling: Labeling,
}

impl SchemeConfig {
    /// The signal set.
    pub fn constellation(&self) -> Result<Constellation> {
        let kind = match self.modulation {
            Modulation::Ask => ConstellationKind::Ask,
            Modulation::Qam => ConstellationKind::Qam,
        };
        Ok(Constellation::new(kind, self.bits)?)
    }

    /// Scheme with the given frozen positions.
    pub fn spec(&self, frozen: impl IntoIterator<Item = usize>) -> Result<SchemeSpec> {
        Ok(SchemeSpec::new(
            self.kind.into(),
            self.constellation()?,
            self.labeling.into(),
            self.n_exp,
            frozen,
        )?)
    }

    /// Source bits per block.
    pub fn len(&self) -> usize {
        self.bits << self.n_exp
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Construction method of a frozen set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Level capacities, then Gaussian-approximated density evolution.
    DeGa,
    /// Genie-aided Monte-Carlo decoding.
    MonteCarlo,
}

/// How a campaign obtains its frozen set when none is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    /// Construction method.
    pub method: Method,
    /// Design `Es/N0` in dB.
    pub es_n0_db: f64,
    /// Fixed information length; takes precedence over `target_wer`.
    #[serde(default)]
    pub info_bits: Option<usize>,
    /// Largest information set whose predicted WER stays within this value.
    #[serde(default)]
    pub target_wer: Option<f64>,
    /// Samples for Monte-Carlo steps.
    #[serde(default = "default_samples")]
    pub samples: u64,
}

fn default_samples() -> u64 {
    100_000
}

/// Unit of the SNR grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SnrUnit {
    /// Energy per symbol over `N0`.
    EsN0,
    /// Energy per information bit over `N0`.
    EbN0,
}

/// Values carried by frozen positions during simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum FrozenValues {
    /// All zero.
    Zero,
    /// Uniform per trial and known to the decoder, so every level channel
    /// sees uniform inputs as the construction assumes.
    #[default]
    Random,
}

/// A Monte-Carlo error-rate campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    /// Scheme under test.
    pub scheme: SchemeConfig,
    /// Explicit frozen set.
    #[serde(default)]
    pub frozen: Option<Vec<usize>>,
    /// Construction used when `frozen` is absent.
    #[serde(default)]
    pub design: Option<Design>,
    /// Frozen-bit values in simulation.
    #[serde(default)]
    pub frozen_values: FrozenValues,
    /// Unit of `grid`.
    pub snr: SnrUnit,
    /// Strictly increasing SNR points in dB.
    pub grid: Vec<f64>,
    /// Budget per point.
    pub budget: Budget,
    /// Master seed.
    pub seed: u64,
}

impl Campaign {
    /// Checks grid order, budgets and the code source.
    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() || self.grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(config_err("SNR grid must be non-empty and strictly increasing"));
        }
        if self.budget.max_trials == 0 || self.budget.target_errors == 0 || self.budget.batch == 0 {
            return Err(config_err("budgets must be positive"));
        }
        if self.frozen.is_none() && self.design.is_none() {
            return Err(config_err("campaign needs a frozen set or a design"));
        }
        if let Some(d) = &self.design {
            if d.info_bits.is_none() && d.target_wer.is_none() {
                return Err(config_err("design needs info_bits or target_wer"));
            }
        }
        Ok(())
    }
}

/// Per-level diagnostic of a constructed code: level capacity and level rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    /// Level index.
    pub level: usize,
    /// Capacity of the level (head) channel.
    pub capacity: f64,
    /// Information bits of the level divided by `N`.
    pub rate: f64,
}

/// A constructed code as written by `construct`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeFile {
    /// Scheme.
    pub scheme: SchemeConfig,
    /// Sorted frozen positions over the `mN` source bits.
    pub frozen: Vec<usize>,
    /// Information bits.
    pub info_bits: usize,
    /// Bits per symbol.
    pub rate: f64,
    /// Predicted word error rate of the construction.
    pub predicted_wer: Option<f64>,
    /// Design used.
    pub design: Design,
    /// Seed of any Monte-Carlo step.
    pub seed: u64,
    /// Level capacities against level rates.
    pub levels: Vec<LevelReport>,
}

impl CodeFile {
    /// The scheme this file describes.
    pub fn spec(&self) -> Result<SchemeSpec> {
        self.scheme.spec(self.frozen.iter().copied())
    }
}
