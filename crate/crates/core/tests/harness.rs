use csra::harness::output::write_csv;
use csra::harness::{run_campaign, run_slot, SimConfig, SweepPoint};
use csra::receiver::Scheme;

fn small(trials: usize, workers: usize) -> SimConfig {
    SimConfig {
        trials,
        workers,
        seed: 77,
        precision: csra::harness::Precision::F32,
        ..SimConfig::default()
    }
}

fn sweep() -> Vec<SweepPoint> {
    let mut v = Vec::new();
    for (k, r) in [(6, 2), (12, 3)] {
        for sic in [true, false] {
            v.push(SweepPoint { k, r, scheme: Scheme::Csra, sic });
        }
    }
    v.push(SweepPoint { k: 6, r: 2, scheme: Scheme::CsraSe, sic: true });
    v
}

fn csv(config: &SimConfig) -> Vec<u8> {
    let mut out = Vec::new();
    write_csv(&mut out, &run_campaign(config, &sweep()).unwrap()).unwrap();
    out
}

#[test]
fn tables_do_not_depend_on_worker_count() {
    let one = csv(&small(6, 1));
    assert_eq!(one, csv(&small(6, 3)));
    assert_eq!(one, csv(&small(6, 8)));
}

#[test]
fn paired_points_share_realizations() {
    let res = run_campaign(&small(8, 1), &sweep()).unwrap();
    let (sic, nosic) = (&res[0], &res[1]);
    for (a, b) in sic.per_trial.iter().zip(&nosic.per_trial) {
        assert_eq!((a.trial, a.k), (b.trial, b.k));
        assert!(a.recovered >= b.recovered);
        assert_eq!(b.sic_rounds, 0);
    }
    assert!(sic.estimate.msgs_lost <= nosic.estimate.msgs_lost);
}

#[test]
fn unpaired_points_draw_independent_slots() {
    let cfg = SimConfig { paired: false, ..small(4, 1) };
    let res = run_campaign(&cfg, &sweep()).unwrap();
    assert_eq!(res.len(), 5);
    assert!(res.iter().all(|p| p.trials == 4));
}

#[test]
fn run_slot_matches_campaign_conventions() {
    let cfg = SimConfig { k: 5, r: 2, ..small(1, 1) };
    let a = run_slot(3, &cfg).unwrap();
    assert_eq!(a, run_slot(3, &cfg).unwrap());
    assert_eq!(a.k, 5);
    assert!(a.recovered <= 5);
}

#[test]
fn interval_narrows_like_inverse_square_root() {
    // doubling the trials narrows the interval by about √2; quadrupling halves it
    let a = csra::harness::PlrEstimate::from_counts(40, 10_000);
    let b = csra::harness::PlrEstimate::from_counts(80, 20_000);
    let c = csra::harness::PlrEstimate::from_counts(160, 40_000);
    let w = |e: &csra::harness::PlrEstimate| e.ci_high - e.ci_low;
    assert!((w(&a) / w(&b) - 2f64.sqrt()).abs() < 0.05);
    assert!((w(&a) / w(&c) - 2.0).abs() < 0.05);
}
