//! CSV and JSON reports of campaign results.

use std::io::{self, Write};

use serde::Serialize;

use super::campaign::PointResult;

pub const CSV_HEADER: &str = "scheme,sic,k,r,trials,msgs_total,msgs_lost,plr,ci_low,ci_high,seed";

pub fn write_csv<W: Write>(mut w: W, results: &[PointResult]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for p in results {
        let e = &p.estimate;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{:e},{:e},{:e},{}",
            p.point.scheme.label(),
            p.point.sic,
            p.point.k,
            p.point.r,
            p.trials,
            e.msgs_total,
            e.msgs_lost,
            e.plr,
            e.ci_low,
            e.ci_high,
            p.seed
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Row<'a> {
    scheme: &'a str,
    sic: bool,
    k: usize,
    r: usize,
    trials: usize,
    msgs_total: u64,
    msgs_lost: u64,
    plr: f64,
    ci_low: f64,
    ci_high: f64,
    seed: u64,
    mean_sic_rounds: f64,
    false_decode_rate: f64,
}

pub fn write_json<W: Write>(w: W, results: &[PointResult]) -> io::Result<()> {
    let rows: Vec<Row> = results
        .iter()
        .map(|p| Row {
            scheme: p.point.scheme.label(),
            sic: p.point.sic,
            k: p.point.k,
            r: p.point.r,
            trials: p.trials,
            msgs_total: p.estimate.msgs_total,
            msgs_lost: p.estimate.msgs_lost,
            plr: p.estimate.plr,
            ci_low: p.estimate.ci_low,
            ci_high: p.estimate.ci_high,
            seed: p.seed,
            mean_sic_rounds: p.mean_sic_rounds,
            false_decode_rate: p.false_decode_rate,
        })
        .collect();
    serde_json::to_writer_pretty(w, &rows).map_err(io::Error::other)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::campaign::SweepPoint;
    use crate::harness::stats::PlrEstimate;
    use crate::receiver::Scheme;

    fn result() -> PointResult {
        PointResult {
            point: SweepPoint { k: 25, r: 4, scheme: Scheme::CsraSe, sic: false },
            trials: 100,
            estimate: PlrEstimate::from_counts(5, 2500),
            seed: 9,
            mean_sic_rounds: 0.0,
            false_decode_rate: 0.01,
            per_trial: Vec::new(),
        }
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[result()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let cells: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(&cells[..7], &["csra-se", "false", "25", "4", "100", "2500", "5"]);
        assert_eq!(cells[7].parse::<f64>().unwrap(), 0.002);
        assert_eq!(cells[10], "9");
    }

    #[test]
    fn json_round_trips_fields() {
        let mut buf = Vec::new();
        write_json(&mut buf, &[result()]).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["scheme"], "csra-se");
        assert_eq!(v[0]["msgs_lost"], 5);
        assert_eq!(v[0]["false_decode_rate"], 0.01);
    }
}
