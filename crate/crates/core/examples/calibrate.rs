//! Sweeps the detection threshold scale and replica power policy and scores
//! each setting against published packet loss rates.
//!
//! cargo run --release --example calibrate -- [trials]

use csra::channel::PowerPolicy;
use csra::harness::{run_campaign, SimConfig, SweepPoint};
use csra::receiver::Scheme;

// (K, R, SIC, reference P_L)
const REFERENCE: [(usize, usize, bool, f64); 5] = [
    (25, 2, true, 2.468e-3),
    (25, 4, true, 1.29e-4),
    (25, 4, false, 2.8679e-2),
    (45, 4, true, 3.168e-3),
    (45, 7, true, 0.265),
];

fn main() {
    let trials = std::env::args().nth(1).map_or(300, |a| a.parse().expect("trial count"));
    let sweep: Vec<SweepPoint> = REFERENCE
        .iter()
        .map(|&(k, r, sic, _)| SweepPoint { k, r, scheme: Scheme::Csra, sic })
        .collect();
    println!("policy,threshold_scale,k,r,sic,plr,reference,log10_ratio");
    for policy in [PowerPolicy::Split, PowerPolicy::Full] {
        for scale in [1.5, 2.0, 3.0, 4.0] {
            let config = SimConfig {
                power_policy: policy,
                threshold_scale: scale,
                trials,
                ..SimConfig::default()
            };
            let results = run_campaign(&config, &sweep).expect("valid calibration config");
            let mut score = 0.0;
            for (res, &(k, r, sic, reference)) in results.iter().zip(&REFERENCE) {
                let e = &res.estimate;
                // half a loss keeps empty counts finite on the log scale
                let plr = (e.msgs_lost as f64 + 0.5) / (e.msgs_total as f64 + 1.0);
                let ratio = (plr / reference).log10();
                score += ratio.abs();
                println!("{policy:?},{scale},{k},{r},{sic},{:.4e},{reference:e},{ratio:+.2}", e.plr);
            }
            println!("# {policy:?} scale {scale}: mean |log10 ratio| {:.3}", score / REFERENCE.len() as f64);
        }
    }
}
