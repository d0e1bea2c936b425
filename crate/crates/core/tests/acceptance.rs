//! Acceptance suite. Runs every criterion at its stated operating point and
//! tolerance, prints one PASS/FAIL line per criterion, and exits non-zero if
//! any criterion fails. Lines starting with `note:` are diagnostics only.

mod common;

use std::time::{Duration, Instant};

use common::{class_fractions, markov_oracle, params, RandomWalk, F3DB, SIGMA};
use dvs_shotnoise::io::{decode_events, encode_events, read_events_csv, write_events_csv, EventFileHeader};
use dvs_shotnoise::noise::OuNoise;
use dvs_shotnoise::pixel::run_pixel;
use dvs_shotnoise::stats::{isis_by_class, median_us, pair_transitions, per_pixel_rates, TransitionClass};
use dvs_shotnoise::sweep::{run_refractory_sweep, run_threshold_ratio_sweep, SweepKind, SweepSpec, ThresholdHold};
use dvs_shotnoise::{simulate_array, simulate_pixel, ArrayConfig, DvsEvent, PixelParams, Polarity};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn tau_c() -> f64 {
    common::corr_time()
}

/// Pairing regime as stated: thresholds at 0.8 sigma, reset within 0.01 tau.
fn stated_pairing_regime() -> PixelParams {
    params(0.8, 0.8, 0.01)
}

fn opposite_vs_same_median(events: &[DvsEvent]) -> (f64, f64) {
    let isis = isis_by_class(events).unwrap();
    let (mut opp, mut same) = (Vec::new(), Vec::new());
    for c in TransitionClass::ALL {
        let bucket = if c.is_opposite() { &mut opp } else { &mut same };
        bucket.extend(&isis[c.index()]);
    }
    (median_us(&opp).unwrap_or(f64::NAN), median_us(&same).unwrap_or(f64::NAN))
}

/// Runs one pixel long enough for at least `min_events` events.
fn pixel_run(p: &PixelParams, min_events: usize, seed: u64) -> Vec<DvsEvent> {
    let mut duration = 100.0;
    loop {
        let ev = simulate_pixel(p, duration, seed).unwrap();
        if ev.len() >= min_events {
            return ev;
        }
        duration *= 2.0;
    }
}

fn c1_pair_dominance() -> Outcome {
    let start = Instant::now();
    let events = pixel_run(&stated_pairing_regime(), 100_000, 1);
    let frac = pair_transitions(&events).unwrap().opposite_fraction;
    let elapsed = start.elapsed();

    let paper = pixel_run(&params(3.0, 3.0, 0.01), 100_000, 1);
    println!(
        "note: C1 at theta = 3 sigma: opposite_fraction = {:.4}",
        pair_transitions(&paper).unwrap().opposite_fraction
    );
    check(
        frac > 0.85 && elapsed < Duration::from_secs(60),
        format!(
            "opposite_fraction = {frac:.4} (need > 0.85) over {} events at theta = 0.8 sigma, {:.1?}",
            events.len(),
            elapsed
        ),
    )
}

fn c2_isi_ordering() -> Outcome {
    let events = pixel_run(&stated_pairing_regime(), 100_000, 1);
    let (opp, same) = opposite_vs_same_median(&events);
    let paper = pixel_run(&params(3.0, 3.0, 0.01), 100_000, 1);
    let (po, ps) = opposite_vs_same_median(&paper);
    println!("note: C2 at theta = 3 sigma: median ratio = {:.3} ({po} us / {ps} us)", po / ps);
    check(
        opp < 0.5 * same,
        format!("median opposite ISI {opp} us vs same {same} us, ratio {:.3} (need < 0.5)", opp / same),
    )
}

fn balanced_share(cfg: &ArrayConfig, duration: f64) -> (f64, usize) {
    let events = simulate_array(cfg, duration).unwrap();
    let table = per_pixel_rates(&events, duration).unwrap();
    let mut eligible = 0;
    let mut balanced = 0;
    for r in &table.rows {
        let (on, off) = (r.rate_on * duration, r.rate_off * duration);
        if (on + off).round() >= 200.0 {
            eligible += 1;
            if (on - off).abs() / (on + off) < 0.1 {
                balanced += 1;
            }
        }
    }
    (balanced as f64 / eligible.max(1) as f64, eligible)
}

fn c3_balance_under_mismatch() -> Outcome {
    let start = Instant::now();
    let cfg = ArrayConfig::new(64, 64, stated_pairing_regime(), 64).with_mismatch(0.2);
    let (share, eligible) = balanced_share(&cfg, 2.0);
    let elapsed = start.elapsed();

    let paper = ArrayConfig::new(64, 64, params(3.0, 3.0, 0.01), 64).with_mismatch(0.2);
    let (pshare, pelig) = balanced_share(&paper, 20.0);
    println!("note: C3 at theta = 3 sigma: {:.1}% of {pelig} pixels balanced", 100.0 * pshare);
    check(
        share >= 0.95 && eligible > 0 && elapsed < Duration::from_secs(300),
        format!(
            "{:.1}% of {eligible} pixels with >= 200 events have imbalance < 0.1 (need >= 95%), {:.1?}",
            100.0 * share,
            elapsed
        ),
    )
}

fn c4_refractory_reduction() -> Outcome {
    // Quarter-decade grid over [0.01, 10] correlation times, 3-sigma thresholds.
    let fracs: Vec<f64> = (0..=12).map(|i| 10f64.powf(-2.0 + i as f64 / 4.0)).collect();
    let values: Vec<f64> = fracs.iter().map(|f| f * tau_c()).collect();
    let cfg = ArrayConfig::new(8, 8, params(3.0, 3.0, 0.01), 4);
    let spec = SweepSpec::new(SweepKind::Refractory, values, cfg, 30.0);
    let rows = run_refractory_sweep(&spec).unwrap().rows;
    let (first, last) = (&rows[0], rows.last().unwrap());
    let rate_ratio = last.rate_total_hz / first.rate_total_hz;
    let drop = first.opposite_fraction - last.opposite_fraction;

    // Knee: where the opposite fraction has fallen halfway, interpolated in log tau.
    let half = (first.opposite_fraction + last.opposite_fraction) / 2.0;
    let i = rows.iter().position(|r| r.opposite_fraction < half).unwrap_or(rows.len() - 1).max(1);
    let (a, b) = (&rows[i - 1], &rows[i]);
    let w = (a.opposite_fraction - half) / (a.opposite_fraction - b.opposite_fraction);
    let knee = (fracs[i - 1].ln() + w * (fracs[i].ln() - fracs[i - 1].ln())).exp();

    for (f, r) in fracs.iter().zip(&rows) {
        println!(
            "note: C4 tau = {f:7.4} tau_c: rate {:8.3} Hz, opposite {:.4}",
            r.rate_total_hz, r.opposite_fraction
        );
    }
    let at_08 = ArrayConfig::new(8, 8, stated_pairing_regime(), 4);
    let spec08 = SweepSpec::new(SweepKind::Refractory, vec![0.01 * tau_c(), 10.0 * tau_c()], at_08, 5.0);
    let r08 = run_refractory_sweep(&spec08).unwrap().rows;
    println!(
        "note: C4 at theta = 0.8 sigma: rate ratio {:.3}, opposite drop {:.4}",
        r08[1].rate_total_hz / r08[0].rate_total_hz,
        r08[0].opposite_fraction - r08[1].opposite_fraction
    );
    check(
        rate_ratio <= 0.5 && drop >= 0.15 && (1.0 / 3.0..=3.0).contains(&knee),
        format!(
            "rate(max)/rate(min) = {rate_ratio:.3} (need <= 0.5), opposite drop {drop:.4} (need >= 0.15), \
             knee at {knee:.2} tau_c (need within [1/3, 3])"
        ),
    )
}

fn opposite_medians(row: &dvs_shotnoise::sweep::SweepRow) -> (f64, f64) {
    (
        row.isi_median(TransitionClass::OnOff).unwrap_or(f64::NAN),
        row.isi_median(TransitionClass::OffOn).unwrap_or(f64::NAN),
    )
}

fn c5_threshold_imbalance() -> Outcome {
    let cfg = ArrayConfig::new(8, 8, params(3.0, 3.0, 0.01), 5);
    let spec = SweepSpec::new(SweepKind::ThresholdRatio, vec![1.0, 0.3], cfg.clone(), 30.0);
    let rows = run_threshold_ratio_sweep(&spec).unwrap().rows;
    let ratio = rows[1].rate_total_hz / rows[0].rate_total_hz;
    let (b_on_off, b_off_on) = opposite_medians(&rows[0]);
    let (r_on_off, r_off_on) = opposite_medians(&rows[1]);
    let shifted = r_on_off > b_on_off && r_off_on > b_off_on;

    for hold in [ThresholdHold::Sum, ThresholdHold::ThetaOn] {
        let mut alt = spec.clone();
        alt.hold = hold;
        let r = run_threshold_ratio_sweep(&alt).unwrap().rows;
        println!(
            "note: C5 holding {hold}: rate ratio {:.3}, ON->OFF median {:?} -> {:?} us",
            r[1].rate_total_hz / r[0].rate_total_hz,
            r[0].isi_median(TransitionClass::OnOff),
            r[1].isi_median(TransitionClass::OnOff)
        );
    }
    check(
        ratio <= 0.5 && shifted,
        format!(
            "rate(0.3)/rate(1) = {ratio:.3} (need <= 0.5); opposite ISI medians ON->OFF {b_on_off} -> {r_on_off} us, \
             OFF->ON {b_off_on} -> {r_off_on} us (need strictly larger)"
        ),
    )
}

fn c6_oracle_equivalence() -> Outcome {
    let steps = 1_000_000;
    let oracle = markov_oracle(21, 3);
    let p = PixelParams::with_dt(3.0, 3.0, 0.0, 1.0, 0.0, 0.05).unwrap();
    let events = run_pixel(&p, &mut RandomWalk::new(21, 10, 6), steps, 0, 0, usize::MAX).unwrap();
    let rate = events.len() as f64 / steps as f64;
    let sim = class_fractions(pair_transitions(&events).unwrap().counts);
    let mut worst = (rate / oracle.events_per_step - 1.0).abs();
    for (s, o) in sim.iter().zip(oracle.class_fraction) {
        worst = worst.max((s / o - 1.0).abs());
    }
    check(
        worst < 0.02,
        format!(
            "rate {rate:.5} vs {:.5}/step, classes {:?} vs {:?}; worst relative error {:.2}% (need < 2%)",
            oracle.events_per_step,
            sim.map(|v| (v * 1e4).round() / 1e4),
            oracle.class_fraction.map(|v| (v * 1e4).round() / 1e4),
            100.0 * worst
        ),
    )
}

fn c7_noise_fidelity() -> Outcome {
    let dt = 1e-4;
    let n = 10_000_000;
    let mut noise = OuNoise::stationary(SIGMA, F3DB, dt, 7);
    let xs: Vec<f64> = (0..n).map(|_| noise.step()).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    let cov: f64 = xs.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    let r1 = cov / var;
    let std = (var / n as f64).sqrt();
    let expected = (-2.0 * std::f64::consts::PI * F3DB * dt).exp();
    let std_err = (std / SIGMA - 1.0).abs();
    check(
        (r1 - expected).abs() <= 0.005 && std_err <= 0.02,
        format!(
            "lag-1 {r1:.5} vs {expected:.5} (need +-0.005); std {std:.5} vs {SIGMA} ({:.2}%, need <= 2%)",
            100.0 * std_err
        ),
    )
}

fn c8_determinism_round_trips() -> Outcome {
    let cfg = ArrayConfig::new(32, 32, params(2.0, 2.0, 0.01), 8).with_mismatch(0.2);
    let in_pool = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_array(&cfg, 1.0).unwrap())
    };
    let serial = in_pool(1);
    let parallel = in_pool(4);
    let again = in_pool(4);
    let header = EventFileHeader::new(32, 32, serial.len() as u64);
    let bytes = encode_events(&header, &serial).unwrap();
    let seeds_identical = bytes == encode_events(&header, &again).unwrap();
    let sched_identical = bytes == encode_events(&header, &parallel).unwrap();
    let binary_rt = decode_events(&bytes).map(|(h, e)| h == header && e == serial).unwrap_or(false);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("events.csv");
    write_events_csv(&serial, &path).unwrap();
    let csv_rt = read_events_csv(&path).map(|e| e == serial).unwrap_or(false);
    let has_both = serial.iter().any(|e| e.polarity == Polarity::On) && serial.iter().any(|e| e.polarity == Polarity::Off);
    check(
        seeds_identical && sched_identical && binary_rt && csv_rt && has_both,
        format!(
            "{} events: same seed identical {seeds_identical}, 1 vs 4 threads identical {sched_identical}, \
             binary round-trip {binary_rt}, CSV round-trip {csv_rt}",
            serial.len()
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("C1 pair dominance", c1_pair_dominance),
        ("C2 ISI ordering", c2_isi_ordering),
        ("C3 ON/OFF balance under mismatch", c3_balance_under_mismatch),
        ("C4 refractory reduction", c4_refractory_reduction),
        ("C5 threshold-imbalance reduction", c5_threshold_imbalance),
        ("C6 Markov oracle equivalence", c6_oracle_equivalence),
        ("C7 noise-process fidelity", c7_noise_fidelity),
        ("C8 determinism and round-trips", c8_determinism_round_trips),
    ];
    let mut failed = 0;
    let mut lines = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let line = format!(
            "[{}] {name}: {} ({:.1?})",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed()
        );
        println!("{line}");
        lines.push(line);
        failed += usize::from(!outcome.pass);
    }
    println!("\nacceptance summary");
    for line in &lines {
        println!("  {line}");
    }
    println!("{} of {} criteria passed", lines.len() - failed, lines.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
