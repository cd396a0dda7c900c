//! Frozen-set construction for coded-modulation schemes.
//!
//! Both methods yield a level-major profile over the `mN` source bits. DE-GA
//! starts from the capacities of the per-symbol level channels seen by each
//! component code (numerical integration on ASK, Monte-Carlo on QAM) and
//! evolves them through the `N`-point polar transform. The Monte-Carlo
//! method runs a genie-aided decoder and counts first-error events per bit.

use polarcm_core::channels::ConstellationKind;
use polarcm_core::gf2::{log2_exact, polar_generator};
use polarcm_core::partition::{
    ask_head_capacities, ask_level_capacities, degraded_sbp_estimate, BitChannelProfile, EstimationMethod,
    LevelCapacityEstimate,
};
use polarcm_core::polar::{de_ga_profile, max_info_for_target, reliability_order};
use polarcm_core::schemes::{SchemeDecoder, SchemeKind, SchemeSpec};
use rand::Rng;
use rayon::ThreadPool;

use crate::config::{CodeFile, Design, LevelReport, Method, SchemeConfig};
use crate::engine::{run_ordered, trial_rng};
use crate::error::{config_err, Result};

/// Stream index reserved for construction-time sampling.
pub const DESIGN_POINT: u64 = u64::MAX;

/// Capacities of the `m` channels entering the component codes at `es_n0_db`.
pub fn level_capacities(spec: &SchemeSpec, es_n0_db: f64, samples: u64, seed: u64) -> Result<Vec<f64>> {
    let ch = spec.channel(es_n0_db)?;
    let m = spec.m();
    let head = match spec.kind() {
        SchemeKind::Mlc => None,
        SchemeKind::BicmModified => Some(spec.head_matrix()),
        SchemeKind::BicmOriginal => Some(polar_generator(log2_exact(m)?)),
    };
    if spec.constellation().kind() == ConstellationKind::Ask {
        return Ok(match head {
            None => ask_level_capacities(&ch)?.sbp,
            Some(h) => ask_head_capacities(&ch, &h)?,
        });
    }
    if samples == 0 {
        return Err(config_err("Monte-Carlo level capacities need a positive sample count"));
    }
    let mut rng = trial_rng(seed, DESIGN_POINT, 0);
    let means = match head {
        None => LevelCapacityEstimate::run(&ch, samples, &mut rng).sbp.means(),
        Some(h) => degraded_sbp_estimate(&ch, &h, samples, &mut rng)?.means(),
    };
    Ok(means.into_iter().map(|c| c.clamp(0.0, 1.0)).collect())
}

/// DE-GA profile of a scheme at `es_n0_db`.
pub fn de_ga_scheme_profile(spec: &SchemeSpec, es_n0_db: f64, samples: u64, seed: u64) -> Result<BitChannelProfile> {
    let caps = level_capacities(spec, es_n0_db, samples, seed)?;
    Ok(de_ga_profile(&caps, spec.n_exp())?)
}

/// Genie-aided Monte-Carlo profile: first-error probability and mutual
/// information of every source bit at `es_n0_db`.
pub fn mc_scheme_profile(
    spec: &SchemeSpec,
    es_n0_db: f64,
    trials: u64,
    seed: u64,
    pool: &ThreadPool,
) -> Result<BitChannelProfile> {
    if trials == 0 {
        return Err(config_err("Monte-Carlo construction needs a positive trial count"));
    }
    let open = spec.with_frozen([])?;
    let ch = open.channel(es_n0_db)?;
    let len = open.len();
    SchemeDecoder::new(&open)?;
    let (errors, info) = run_ordered(
        pool,
        trials,
        1_000,
        seed,
        DESIGN_POINT,
        || SchemeDecoder::new(&open).expect("validated"),
        |dec, rng| {
            let u: Vec<u8> = (0..len).map(|_| rng.random_range(0..2u8)).collect();
            let y: Vec<[f64; 2]> = open
                .encode(&u)
                .expect("unfrozen code")
                .into_iter()
                .map(|l| ch.transmit_packed(l, rng))
                .collect();
            let mut errors = vec![0u64; len];
            let mut info = vec![0.0; len];
            dec.genie(&ch, &y, &u, &mut errors, &mut info).expect("consistent sizes");
            (errors, info)
        },
        (vec![0u64; len], vec![0.0f64; len]),
        |acc, (e, i)| {
            for (a, b) in acc.0.iter_mut().zip(&e) {
                *a += b;
            }
            for (a, b) in acc.1.iter_mut().zip(&i) {
                *a += b;
            }
        },
    );
    let n = trials as f64;
    Ok(BitChannelProfile::with_error_probs(
        info.iter().map(|s| (s / n).clamp(0.0, 1.0)).collect(),
        errors.iter().map(|&e| e as f64 / n).collect(),
        EstimationMethod::MonteCarlo { samples: trials },
    )?)
}

/// `1 - Π (1 - p_e)` over the unfrozen positions.
pub fn predicted_wer(profile: &BitChannelProfile, frozen: &[bool]) -> Option<f64> {
    let pe = profile.error_probs()?;
    let log_ok: f64 = pe.iter().zip(frozen).filter(|(_, f)| !**f).map(|(p, _)| (-p.min(1.0)).ln_1p()).sum();
    Some(-log_ok.exp_m1())
}

/// Frozen set of the `k` most reliable positions of `profile`, sorted.
pub fn frozen_for(profile: &BitChannelProfile, k: usize) -> Result<Vec<usize>> {
    if k > profile.len() {
        return Err(config_err(format!("{k} information bits exceed {} positions", profile.len())));
    }
    let mut frozen = reliability_order(profile)[k..].to_vec();
    frozen.sort_unstable();
    Ok(frozen)
}

/// Profile of `scheme` under `design`.
pub fn design_profile(scheme: &SchemeConfig, design: &Design, seed: u64, pool: &ThreadPool) -> Result<BitChannelProfile> {
    let spec = scheme.spec([])?;
    match design.method {
        Method::DeGa => de_ga_scheme_profile(&spec, design.es_n0_db, design.samples, seed),
        Method::MonteCarlo => mc_scheme_profile(&spec, design.es_n0_db, design.samples, seed, pool),
    }
}

/// Constructs a code for `scheme` under `design`.
pub fn construct(scheme: &SchemeConfig, design: &Design, seed: u64, pool: &ThreadPool) -> Result<CodeFile> {
    let profile = design_profile(scheme, design, seed, pool)?;
    let k = match (design.info_bits, design.target_wer) {
        (Some(k), _) => k,
        (None, Some(target)) => max_info_for_target(&profile, target)?.0,
        (None, None) => return Err(config_err("design needs info_bits or target_wer")),
    };
    let frozen = frozen_for(&profile, k)?;
    let spec = scheme.spec(frozen.iter().copied())?;
    let n = spec.symbols();
    let level_caps = match design.method {
        Method::DeGa => level_capacities(&spec, design.es_n0_db, design.samples, seed)?,
        Method::MonteCarlo => profile.capacities().chunks(n).map(|c| c.iter().sum::<f64>() / n as f64).collect(),
    };
    let levels = level_caps
        .iter()
        .zip(spec.level_rates())
        .enumerate()
        .map(|(level, (&capacity, k_i))| LevelReport {
            level,
            capacity,
            rate: k_i as f64 / n as f64,
        })
        .collect();
    Ok(CodeFile {
        scheme: *scheme,
        predicted_wer: predicted_wer(&profile, spec.frozen_mask()),
        info_bits: spec.info_len(),
        rate: spec.rate(),
        frozen,
        design: design.clone(),
        seed,
        levels,
    })
}
