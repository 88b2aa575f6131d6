//! A thread suspended right after publishing a descriptor must not stop
//! the others: whoever runs into the descriptor completes it.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use common::{become_victim, grid, Parker};
use quadboost::bench::Mix;
use quadboost::checker::validate_structure;
use quadboost::{Builder, Event, OpKind, Point, QuadTree, Variant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const WORKERS: usize = 4;
const OPS: usize = 1000;
const LIMIT: Duration = Duration::from_secs(10);

/// Runs `victim` on its own thread until it parks, then lets four workers
/// run `OPS` operations each over `keys` and returns how long they took.
fn suspend_and_run(
    variant: Variant,
    range: f64,
    pred: impl Fn(&Event) -> bool + Send + Sync + 'static,
    setup: impl FnOnce(&QuadTree<()>),
    victim: impl FnOnce(&QuadTree<()>) + Send,
    keys: Vec<Point>,
    mix: &str,
) -> (Event, Duration) {
    let (parker, handle) = Parker::new(pred);
    let tree: QuadTree<()> = Builder::new(variant, range).observer(parker).build().unwrap();
    setup(&tree);
    let mix: Mix = mix.parse().unwrap();
    let (event, elapsed) = std::thread::scope(|s| {
        let t = &tree;
        s.spawn(move || {
            become_victim();
            victim(t);
        });
        let event = match handle.parked.recv_timeout(LIMIT) {
            Ok(e) => e,
            Err(_) => {
                let _ = handle.release.send(());
                panic!("victim never reached the hook");
            }
        };
        let start = Instant::now();
        let workers: Vec<_> = (0..WORKERS)
            .map(|w| {
                let keys = &keys;
                s.spawn(move || {
                    let mut rng = ChaCha8Rng::seed_from_u64(w as u64);
                    for _ in 0..OPS {
                        t.apply(&mix.sample(&mut rng, keys)).unwrap();
                    }
                })
            })
            .collect();
        for w in workers {
            w.join().unwrap();
        }
        let elapsed = start.elapsed();
        handle.release.send(()).unwrap();
        (event, elapsed)
    });
    validate_structure(&tree).unwrap();
    (event, elapsed)
}

fn is_flag(to: OpKind) -> impl Fn(&Event) -> bool {
    move |e| matches!(e, Event::Flag { to: t, .. } if *t == to)
}

#[test]
fn substitute_flag_suspension() {
    for v in [Variant::QbS, Variant::QbO, Variant::QbD] {
        let (e, took) = suspend_and_run(
            v,
            4.0,
            is_flag(OpKind::Substitute),
            |_| {},
            |t| {
                t.insert(Point::new(1.0, 1.0), ()).unwrap();
            },
            grid(4),
            "30:30:20:20",
        );
        assert!(matches!(e, Event::Flag { to: OpKind::Substitute, .. }));
        assert!(took < LIMIT, "{v}: {took:?}");
    }
}

#[test]
fn coupled_flag_suspension() {
    let (_, took) = suspend_and_run(
        Variant::QbF,
        16.0,
        is_flag(OpKind::Coupled),
        |t| {
            t.insert(Point::new(0.0, 0.0), ()).unwrap();
            t.insert(Point::new(1.0, 1.0), ()).unwrap();
        },
        |t| {
            t.remove(Point::new(1.0, 1.0)).unwrap();
        },
        grid(4),
        "30:30:20:20",
    );
    assert!(took < LIMIT);
}

#[test]
fn compress_flag_suspension() {
    for v in [Variant::QbS, Variant::QbO, Variant::QbD] {
        let (e, took) = suspend_and_run(
            v,
            16.0,
            is_flag(OpKind::Compress),
            |t| {
                t.insert(Point::new(0.0, 0.0), ()).unwrap();
                t.insert(Point::new(1.0, 1.0), ()).unwrap();
            },
            |t| {
                t.remove(Point::new(0.0, 0.0)).unwrap();
                t.remove(Point::new(1.0, 1.0)).unwrap();
            },
            grid(4),
            "30:30:20:20",
        );
        assert!(matches!(e, Event::Flag { to: OpKind::Compress, .. }));
        assert!(took < LIMIT, "{v}: {took:?}");
    }
}

#[test]
fn move_first_flag_suspension() {
    for v in [Variant::QbS, Variant::QbO, Variant::QbF, Variant::QbD] {
        let (e, took) = suspend_and_run(
            v,
            4.0,
            |e| matches!(e, Event::Flag { to: OpKind::Move, from, .. } if *from != OpKind::Move),
            |t| {
                t.insert(Point::new(0.0, 0.0), ()).unwrap();
            },
            |t| {
                t.move_key(Point::new(0.0, 0.0), Point::new(3.0, 3.0)).unwrap();
            },
            grid(4),
            "30:30:20:20",
        );
        assert!(matches!(e, Event::Flag { to: OpKind::Move, .. }));
        assert!(took < LIMIT, "{v}: {took:?}");
    }
}

#[test]
fn parked_move_is_completed_by_helpers() {
    // the victim parks with only its first flag (on the nw dummy) in place;
    // an insert below that dummy must help the move through
    let (parker, handle) = Parker::new(is_flag(OpKind::Move));
    let tree: QuadTree<u8> = Builder::new(Variant::QbO, 16.0).observer(parker).build().unwrap();
    tree.insert(Point::new(1.0, 1.0), 9).unwrap();
    let (before, inserted, after, moved_ok) = std::thread::scope(|s| {
        let t = &tree;
        let victim = s.spawn(move || {
            become_victim();
            t.move_key(Point::new(1.0, 1.0), Point::new(13.0, 13.0)).unwrap()
        });
        handle.parked.recv_timeout(LIMIT).unwrap();
        let before = (t.contains(Point::new(1.0, 1.0)), t.contains(Point::new(13.0, 13.0)));
        let inserted = t.insert(Point::new(6.0, 6.0), 1);
        let after = (t.contains(Point::new(1.0, 1.0)), t.get(Point::new(13.0, 13.0)));
        handle.release.send(()).unwrap();
        (before, inserted, after, victim.join().unwrap())
    });
    assert_eq!(before, (Ok(true), Ok(false)));
    assert_eq!(inserted, Ok(true));
    assert_eq!(after, (Ok(false), Ok(Some(9))));
    assert!(moved_ok);
    validate_structure(&tree).unwrap();
    assert_eq!(tree.keys().len(), 2);
}

#[test]
fn restart_depth_follows_policy() {
    // victim parks holding a Substitute on a deep parent; a second insert
    // below that parent must help and then restart
    let expected = [(Variant::QbS, true), (Variant::QbO, true), (Variant::QbD, false)];
    for (v, from_parent) in expected {
        let log = Arc::new(std::sync::Mutex::new(Vec::new()));
        let (parker, handle) = Parker::new(is_flag(OpKind::Substitute));
        let sink = Arc::clone(&log);
        let observer = Arc::new(move |e: Event| {
            sink.lock().unwrap().push(e);
            parker.event(e)
        });
        use quadboost::Observer;
        let tree: QuadTree<()> = Builder::new(v, 16.0).observer(observer).build().unwrap();
        tree.insert(Point::new(0.0, 0.0), ()).unwrap();
        tree.insert(Point::new(1.0, 1.0), ()).unwrap();
        std::thread::scope(|s| {
            let t = &tree;
            s.spawn(move || {
                become_victim();
                t.insert(Point::new(0.0, 1.0), ()).unwrap();
            });
            handle.parked.recv_timeout(LIMIT).unwrap();
            log.lock().unwrap().clear();
            t.insert(Point::new(1.0, 0.0), ()).unwrap();
            handle.release.send(()).unwrap();
        });
        let restarts: Vec<_> = log
            .lock()
            .unwrap()
            .iter()
            .filter_map(|e| match e {
                Event::Restart { depth, prev_depth } => Some((*depth, *prev_depth)),
                _ => None,
            })
            .collect();
        assert_eq!(restarts.len(), 1, "{v}");
        let (depth, prev) = restarts[0];
        assert_eq!(prev, 3, "{v}");
        assert_eq!(depth, if from_parent { 3 } else { 0 }, "{v}");
        assert_eq!(tree.keys().len(), 4);
    }
}
