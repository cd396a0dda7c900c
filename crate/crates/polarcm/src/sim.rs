//! Error-rate campaigns and rate-versus-SNR sweeps.

use polarcm_core::channels::{eb_n0_from_es_n0, es_n0_from_eb_n0, Bdmc};
use polarcm_core::polar::{max_info_for_target, polar_encode, CodeSpec, ScDecoder};
use polarcm_core::schemes::{SchemeDecoder, SchemeSpec};
use rand::Rng;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::config::{Campaign, Design, FrozenValues, Method, SchemeConfig, SnrUnit};
use crate::construct::{construct, design_profile};
use crate::engine::{run_point, Budget, Counts, TrialOutcome};
use crate::error::{config_err, Result};

/// One simulated SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Grid value in the campaign's unit (dB).
    pub snr_db: f64,
    /// `Es/N0` in dB.
    pub es_n0_db: f64,
    /// `Eb/N0` in dB at the realized rate (empty at rate zero).
    pub eb_n0_db: Option<f64>,
    /// Information bits per symbol.
    pub rate: f64,
    /// Trials run.
    pub trials: u64,
    /// Word errors.
    pub word_errors: u64,
    /// Word error rate.
    pub wer: f64,
    /// 95% half-width of the WER.
    pub wer_ci: f64,
    /// Information-bit errors.
    pub bit_errors: u64,
    /// Bit error rate.
    pub ber: f64,
    /// `MC`.
    pub method: String,
}

fn row(snr_db: f64, es_n0_db: f64, rate: f64, c: &Counts) -> ResultRow {
    ResultRow {
        snr_db,
        es_n0_db,
        eb_n0_db: (rate > 0.0).then(|| eb_n0_from_es_n0(es_n0_db, rate)),
        rate,
        trials: c.trials,
        word_errors: c.word_errors,
        wer: c.wer(),
        wer_ci: c.wer_half_width(),
        bit_errors: c.bit_errors,
        ber: c.ber(),
        method: "MC".into(),
    }
}

/// Simulates `spec` at one `Es/N0` point with uniformly random information bits.
pub fn simulate_scheme(
    spec: &SchemeSpec,
    es_n0_db: f64,
    frozen_values: FrozenValues,
    budget: &Budget,
    seed: u64,
    point: u64,
    pool: &ThreadPool,
) -> Result<Counts> {
    let ch = spec.channel(es_n0_db)?;
    SchemeDecoder::new(spec)?;
    let k = spec.info_len();
    let n_frozen = spec.len() - k;
    Ok(run_point(
        pool,
        budget,
        seed,
        point,
        || SchemeDecoder::new(spec).expect("validated"),
        |dec, rng| {
            let info: Vec<u8> = (0..k).map(|_| rng.random_range(0..2u8)).collect();
            let fv: Vec<u8> = match frozen_values {
                FrozenValues::Zero => vec![0; n_frozen],
                FrozenValues::Random => (0..n_frozen).map(|_| rng.random_range(0..2u8)).collect(),
            };
            let u = spec.embed_with(&info, &fv).expect("consistent lengths");
            let y: Vec<[f64; 2]> = spec
                .encode_any(&u)
                .expect("length mN")
                .into_iter()
                .map(|l| ch.transmit_packed(l, rng))
                .collect();
            let u_hat = dec.decode_known(&ch, &y, &fv).expect("consistent sizes");
            let bit_errors = spec.extract(&u_hat).iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
            TrialOutcome { bit_errors, bits: k as u64 }
        },
    ))
}

/// Simulates a plain polar code over a binary-input channel.
pub fn simulate_binary(code: &CodeSpec, channel: Bdmc, budget: &Budget, seed: u64, point: u64, pool: &ThreadPool) -> Result<Counts> {
    let k = code.info_len();
    Ok(run_point(
        pool,
        budget,
        seed,
        point,
        || ScDecoder::new(code.n_exp()),
        |dec, rng| {
            let info: Vec<u8> = (0..k).map(|_| rng.random_range(0..2u8)).collect();
            let u = code.embed(&info).expect("length k");
            let c = polar_encode(&u, code).expect("frozen bits are zero");
            let llrs: Vec<f64> = c.iter().map(|&b| channel.sample_llr(b, rng)).collect();
            let u_hat = dec.decode(&llrs, code).expect("length N");
            let bit_errors = code.extract(&u_hat).iter().zip(&info).filter(|(a, b)| a != b).count() as u64;
            TrialOutcome { bit_errors, bits: k as u64 }
        },
    ))
}

/// The code a campaign simulates.
pub fn campaign_spec(c: &Campaign, pool: &ThreadPool) -> Result<SchemeSpec> {
    c.validate()?;
    match (&c.frozen, &c.design) {
        (Some(frozen), _) => c.scheme.spec(frozen.iter().copied()),
        (None, Some(design)) => construct(&c.scheme, design, c.seed, pool)?.spec(),
        (None, None) => Err(config_err("campaign needs a frozen set or a design")),
    }
}

/// Runs every grid point of a campaign.
pub fn run_wer(c: &Campaign, pool: &ThreadPool) -> Result<Vec<ResultRow>> {
    let spec = campaign_spec(c, pool)?;
    let rate = spec.rate();
    if c.snr == SnrUnit::EbN0 && rate == 0.0 {
        return Err(config_err("Eb/N0 grid needs a positive rate"));
    }
    c.grid
        .iter()
        .enumerate()
        .map(|(idx, &snr)| {
            let es = match c.snr {
                SnrUnit::EsN0 => snr,
                SnrUnit::EbN0 => es_n0_from_eb_n0(snr, rate),
            };
            let counts = simulate_scheme(&spec, es, c.frozen_values, &c.budget, c.seed, idx as u64, pool)?;
            Ok(row(snr, es, rate, &counts))
        })
        .collect()
}

/// One point of a rate-versus-SNR sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// `Es/N0` in dB.
    pub es_n0_db: f64,
    /// `Eb/N0` in dB at the selected rate (empty at rate zero).
    pub eb_n0_db: Option<f64>,
    /// Information bits per symbol.
    pub rate: f64,
    /// Information bits per block.
    pub info_bits: usize,
    /// Predicted WER of the selected code.
    pub predicted_wer: f64,
    /// `DE-GA` or `MC`.
    pub method: String,
}

/// Largest rate per `Es/N0` whose predicted WER meets `target_wer`.
pub fn sweep_rate_vs_snr(
    scheme: &SchemeConfig,
    grid: &[f64],
    target_wer: f64,
    method: Method,
    samples: u64,
    seed: u64,
    pool: &ThreadPool,
) -> Result<Vec<SweepRow>> {
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(config_err("SNR grid must be strictly increasing"));
    }
    let n = (1usize << scheme.n_exp) as f64;
    grid.iter()
        .map(|&es| {
            let design = Design {
                method,
                es_n0_db: es,
                info_bits: None,
                target_wer: Some(target_wer),
                samples,
            };
            let profile = design_profile(scheme, &design, seed, pool)?;
            let (k, wer) = max_info_for_target(&profile, target_wer)?;
            let rate = k as f64 / n;
            Ok(SweepRow {
                es_n0_db: es,
                eb_n0_db: (rate > 0.0).then(|| eb_n0_from_es_n0(es, rate)),
                rate,
                info_bits: k,
                predicted_wer: wer,
                method: match method {
                    Method::DeGa => "DE-GA".into(),
                    Method::MonteCarlo => "MC".into(),
                },
            })
        })
        .collect()
}
