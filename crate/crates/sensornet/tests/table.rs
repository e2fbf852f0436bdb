use tcreol_sensornet::table::{build_table1, render, TableOptions, TARGETS};
use tcreol_sensornet::SinkMetrics;

#[test]
fn targets_cover_every_cell_once() {
    let mut cells: Vec<(&str, &str)> = TARGETS.iter().map(|t| (t.collision, t.topology)).collect();
    cells.sort();
    cells.dedup();
    assert_eq!(cells.len(), 9);
}

#[test]
fn matching_respects_tolerance_and_missing_times() {
    let star = TARGETS.iter().find(|t| t.collision == "resend" && t.topology == "star").unwrap();
    assert!(star.matches(&SinkMetrics { received: 12, last: Some(12) }));
    assert!(!star.matches(&SinkMetrics { received: 12, last: Some(13) }));
    let mixed = TARGETS.iter().find(|t| t.collision == "resend" && t.topology == "mixed").unwrap();
    assert!(mixed.matches(&SinkMetrics { received: 12, last: Some(36) }));
    assert!(!mixed.matches(&SinkMetrics { received: 11, last: Some(38) }));
    let linear = TARGETS.iter().find(|t| t.collision == "drop" && t.topology == "linear").unwrap();
    assert!(linear.matches(&SinkMetrics { received: 0, last: None }));
    assert!(!linear.matches(&SinkMetrics { received: 0, last: Some(0) }));
}

#[test]
fn star_rows_are_achievable_and_replay() {
    let opts = TableOptions {
        topologies: vec!["star".into()],
        seeds: 3,
        ..TableOptions::default()
    };
    let rows = build_table1(&opts).unwrap();
    assert_eq!(rows.len(), 3);
    for r in &rows {
        assert!(r.achievable && r.replayed, "{r}");
        assert!(r.target.matches(&r.achieved.unwrap()));
        assert_eq!(r.distribution.values().sum::<u64>(), 3);
    }
    let text = render(&rows);
    assert_eq!(text.lines().filter(|l| l.contains(" star ")).count(), 3, "{text}");
    assert!(text.contains("seeded outcomes"));
}
