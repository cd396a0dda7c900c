//! Capacity-variance curves of polarized and level-partitioned channels.

use clap::ValueEnum;
use polarcm_core::channels::{Constellation, LabelingRule, ModChannel};
use polarcm_core::gf2::polar_generator;
use polarcm_core::math::{j_inverse, PhiApprox};
use polarcm_core::partition::{ask_level_capacities, bec_polar_erasures, linear_bsc_sbp, profile_mean, profile_variance};
use polarcm_core::polar::de_ga_from_means;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Channel family of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Erasure channel, exact recursion; orders are `n`.
    Bec,
    /// Symmetric channel, exact enumeration for `n ≤ 3`.
    Bsc,
    /// Binary-input AWGN via DE-GA; parameter is the input capacity.
    BiAwgn,
    /// `2^m`-ASK levels by numerical integration; orders are `m`, parameter is `Es/N0` in dB.
    Ask,
}

/// One point of a variance curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    /// Family name.
    pub family: String,
    /// Labeling (`-` for binary channels).
    pub labeling: String,
    /// `msd`, `parallel` or `-`.
    pub demapping: String,
    /// `n` (polar) or `m` (ASK).
    pub order: u32,
    /// Channel parameter.
    pub parameter: f64,
    /// Mean bit-channel capacity.
    pub mean: f64,
    /// Variance of the bit-channel capacities.
    pub variance: f64,
    /// `mean·(1 - mean)`.
    pub bound: f64,
}

fn curve_row(family: &str, labeling: &str, demapping: &str, order: u32, parameter: f64, caps: &[f64]) -> Result<CurveRow> {
    let mean = profile_mean(caps)?;
    Ok(CurveRow {
        family: family.into(),
        labeling: labeling.into(),
        demapping: demapping.into(),
        order,
        parameter,
        mean,
        variance: profile_variance(caps)?,
        bound: mean * (1.0 - mean),
    })
}

/// Curves of `family` for each order over `points` parameter values.
pub fn variance_curves(family: Family, orders: &[u32], points: usize) -> Result<Vec<CurveRow>> {
    if points < 2 {
        return Err(config_err("a curve needs at least two points"));
    }
    let mut rows = Vec::new();
    for &order in orders {
        match family {
            Family::Bec => {
                for i in 1..points {
                    let eps = i as f64 / points as f64;
                    let caps: Vec<f64> = bec_polar_erasures(eps, order).iter().map(|e| 1.0 - e).collect();
                    rows.push(curve_row("bec", "-", "-", order, eps, &caps)?);
                }
            }
            Family::Bsc => {
                if order > 3 {
                    return Err(config_err("exact BSC curves are limited to n <= 3"));
                }
                let g = polar_generator(order);
                for i in 1..points {
                    let p = 0.5 * i as f64 / points as f64;
                    rows.push(curve_row("bsc", "-", "-", order, p, &linear_bsc_sbp(&g, p)?)?);
                }
            }
            Family::BiAwgn => {
                for i in 1..points {
                    let c = i as f64 / points as f64;
                    let mu = j_inverse(c)?;
                    let prof = de_ga_from_means(&[mu], order, &PhiApprox::default())?;
                    rows.push(curve_row("bi-awgn", "-", "-", order, c, prof.capacities())?);
                }
            }
            Family::Ask => {
                let constellation = Constellation::ask(order as usize)?;
                for i in 0..points {
                    let es = -10.0 + 40.0 * i as f64 / (points - 1) as f64;
                    for (rule, name) in [(LabelingRule::SetPartition, "sp"), (LabelingRule::Gray, "gray")] {
                        let ch = ModChannel::at_es_n0(constellation.clone(), rule, es)?;
                        let caps = ask_level_capacities(&ch)?;
                        rows.push(curve_row("ask", name, "msd", order, es, &caps.sbp)?);
                        rows.push(curve_row("ask", name, "parallel", order, es, &caps.pbp)?);
                    }
                }
            }
        }
    }
    Ok(rows)
}
