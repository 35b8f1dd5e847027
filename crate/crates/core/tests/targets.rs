mod common;

use chrono::{TimeZone, Utc};
use common::*;
use harmonia::targets::*;
use std::collections::BTreeSet;

fn rec(id: &str, rating: u8, round: u32) -> RatingRecord {
    RatingRecord {
        composition_id: id.into(),
        rating,
        round,
        timestamp: Utc.with_ymd_and_hms(2026, 1, 1, 0, 0, 0).unwrap(),
        rater_id: "r1".into(),
    }
}

#[test]
fn merge_mapping() {
    let got: Vec<ClassLabel> = (1..=5).map(|r| merge_classes(r).unwrap()).collect();
    use ClassLabel::*;
    assert_eq!(got, vec![Bad, Neutral, Neutral, Good, Good]);
    assert!(merge_classes(0).is_err() && merge_classes(6).is_err());
}

#[test]
fn degenerate_deviations_are_fixed_points() {
    let c = simulate_convergence(&DeviationDistribution::degenerate(), 100, 1000, 3);
    assert_eq!(c.values, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
}

#[test]
fn monte_carlo_matches_stationary_expectation() {
    for seed in 0..3 {
        let m = random_deviation_model(seed);
        let (z, pairs) = convergence_z(&m, 400, 4000, seed);
        assert!(z <= 3.0, "model {seed}: z = {z}, {pairs:?}");
    }
}

#[test]
fn oracle_chain_rows_are_stochastic() {
    let p = transition_matrix(&random_deviation_model(9));
    for row in p {
        assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn deviations_from_records() {
    let records = vec![
        rec("a", 2, 0),
        rec("a", 3, 1),
        rec("b", 2, 0),
        rec("b", 2, 1),
        rec("c", 5, 0),
        rec("c", 4, 1),
        rec("c", 5, 2),
    ];
    let d = deviation_distributions(&records, Some("r1"));
    let two = d.class(2);
    assert_eq!(two.samples, 2);
    assert!((two.mass[10] - 0.5).abs() < 1e-12 && (two.mass[8] - 0.5).abs() < 1e-12);
    // class 5 rerated 4 then 5: mean deviation −0.5
    assert!((d.class(5).mean() + 0.5).abs() < 1e-12);
    assert!(d.class(1).degenerate);
    let none = deviation_distributions(&records, Some("nobody"));
    assert!(none.classes.iter().all(|c| c.degenerate && c.mass == ClassDeviation::at_zero(true).mass));
}

#[test]
fn rerate_queue_audit() {
    let mut records: Vec<RatingRecord> = (0..40).map(|i| rec(&format!("c{i:02}"), (i % 5 + 1) as u8, 0)).collect();
    let q = rerate_queue(&records, 10, 3, Some("r1"));
    assert_eq!(q.len(), 10);
    assert_eq!(q.iter().collect::<BTreeSet<_>>().len(), 10);
    // two more rounds for every queued item empties the queue
    for round in 1..3 {
        for id in &q {
            records.push(rec(id, 3, round));
        }
    }
    assert!(rerate_queue(&records, 10, 3, Some("r1")).is_empty());
}

#[test]
fn jsonl_append_survives_reload() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ratings.jsonl");
    assert!(read_jsonl(&path).unwrap().is_empty());
    for i in 0..5 {
        append_jsonl(&path, &rec("x", i + 1, i as u32)).unwrap();
    }
    let back = read_jsonl(&path).unwrap();
    assert_eq!(back.len(), 5);
    assert_eq!(back[4], rec("x", 5, 4));
}
