mod common;

use std::fs;
use std::io::Write;
use std::sync::Arc;
use std::thread;

use lightor_core::extractor::{ExtractorConfig, InteractionEvent};
use lightor_service::{Store, StoreError};

fn open(dir: &std::path::Path) -> Store {
    Store::open(dir, Some(common::model()), ExtractorConfig::default()).unwrap()
}

/// Registers a video and feeds it batches of simulated sessions, refining
/// after each batch, returning the bytes of the final state file.
fn replay(batches: &[Vec<InteractionEvent>]) -> Vec<u8> {
    let dir = tempfile::tempdir().unwrap();
    let store = open(dir.path());
    let (log, _) = common::video(11, 4);
    store.register("v", log, None).unwrap();
    for batch in batches {
        store.append("v", batch.clone()).unwrap();
        store.refine("v").unwrap();
    }
    fs::read(dir.path().join("v").join("state.json")).unwrap()
}

#[test]
fn replay_is_byte_identical() {
    let (log, truth) = common::video(11, 4);
    let probe = tempfile::tempdir().unwrap();
    let store = open(probe.path());
    store.register("v", log, None).unwrap();
    let dots = store.red_dots("v").unwrap();

    let batches: Vec<Vec<InteractionEvent>> = (0..4)
        .map(|round| {
            dots.iter()
                .flat_map(|d| common::viewers(round * 100 + u64::from(d.red_dot_id), d.red_dot_id, d.position_s, &truth, 12))
                .collect()
        })
        .collect();
    let a = replay(&batches);
    let b = replay(&batches);
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().contains("history"));
}

#[test]
fn concurrent_writers_lose_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let store = Arc::new(open(dir.path()));
    let (log, _) = common::video(12, 3);
    store.register("v", log, None).unwrap();
    let dot = store.red_dots("v").unwrap()[0].red_dot_id;

    let writers = 8;
    let batches = 40;
    let handles: Vec<_> = (0..writers)
        .map(|w| {
            let store = store.clone();
            thread::spawn(move || {
                let mut acked = 0;
                for b in 0..batches {
                    let user = format!("w{w}-b{b}");
                    let batch = vec![
                        InteractionEvent::play(&user, dot, 100.0, 1),
                        InteractionEvent::seek(&user, dot, 105.0, 120.0, 2),
                        InteractionEvent::pause(&user, dot, 130.0, 3),
                    ];
                    acked += store.append("v", batch.clone()).unwrap();
                    // resending must not duplicate
                    acked += store.append("v", batch).unwrap();
                }
                acked
            })
        })
        .collect();
    let acked: usize = handles.into_iter().map(|h| h.join().unwrap()).sum();
    assert_eq!(acked, writers * batches * 3);
    assert_eq!(store.events("v").unwrap().len(), acked);

    let reopened = open(dir.path());
    let events = reopened.events("v").unwrap();
    assert_eq!(events.len(), acked);
    let lines = fs::read_to_string(dir.path().join("v").join("events.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), acked);
}

#[test]
fn partial_trailing_record_is_dropped_on_open() {
    let dir = tempfile::tempdir().unwrap();
    {
        let store = open(dir.path());
        let (log, _) = common::video(13, 2);
        store.register("v", log, None).unwrap();
        store.append("v", vec![InteractionEvent::play("a", 0, 10.0, 1)]).unwrap();
    }
    let path = dir.path().join("v").join("events.jsonl");
    fs::OpenOptions::new().append(true).open(&path).unwrap().write_all(b"{\"user\":\"b\",\"red").unwrap();
    let store = open(dir.path());
    assert_eq!(store.events("v").unwrap().len(), 1);
    store.append("v", vec![InteractionEvent::pause("a", 0, 20.0, 2)]).unwrap();
    let reopened = open(dir.path());
    assert_eq!(reopened.events("v").unwrap().len(), 2);
}

#[test]
fn register_needs_a_model() {
    let dir = tempfile::tempdir().unwrap();
    let store = Store::open(dir.path(), None, ExtractorConfig::default()).unwrap();
    let (log, _) = common::video(1, 2);
    assert!(matches!(store.register("v", log, None), Err(StoreError::MissingModel(_))));
    let (log, _) = common::video(1, 2);
    assert!(matches!(store.register("../x", log, Some(common::model())), Err(StoreError::Invalid { .. })));
}

#[test]
fn positions_stay_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let store = open(dir.path());
    let (log, truth) = common::video(14, 5);
    let len = log.meta.length_s;
    store.register("v", log, None).unwrap();
    for round in 0..6 {
        let dots = store.red_dots("v").unwrap();
        let events: Vec<InteractionEvent> = dots
            .iter()
            .flat_map(|d| common::viewers(round * 31 + u64::from(d.red_dot_id), d.red_dot_id, d.position_s, &truth, 12))
            .collect();
        store.append("v", events).unwrap();
        store.refine("v").unwrap();
        assert!(store.red_dots("v").unwrap().iter().all(|d| (0.0..=len).contains(&d.position_s)));
    }
}
