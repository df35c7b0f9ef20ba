use ailfem_cli::records::{format_float, header, read_records, RecordWriter};
use ailfem_core::adaptivity::{Event, GoalColumns, StepRecord};
use proptest::prelude::*;

fn float() -> impl Strategy<Value = f64> {
    prop_oneof![
        4 => any::<f64>().prop_filter("finite", |v| v.is_finite()),
        1 => Just(f64::NAN),
        1 => Just(0.0),
        1 => Just(-0.0),
        1 => Just(f64::MIN_POSITIVE / 4.0),
    ]
}

fn event() -> impl Strategy<Value = Event> {
    prop_oneof![
        Just(Event::Accepted),
        Just(Event::StoppedInner),
        Just(Event::DiscardedIiC),
        Just(Event::Refined)
    ]
}

prop_compose! {
    fn record(goal: bool)(
        ints in (0usize..1000, 0usize..1000, 0usize..100000, 1usize..1 << 20, 0usize..1 << 21, any::<u64>()),
        floats in prop::collection::vec(float(), 10),
        event in event(),
    ) -> StepRecord {
        StepRecord {
            ell: ints.0,
            k: ints.1,
            total_step: ints.2,
            nelem: ints.3,
            ndof: ints.4,
            work: ints.5,
            eta: floats[0],
            energy: floats[1],
            energy_diff: floats[2],
            u_norm: floats[3],
            delta: floats[4],
            l: floats[5],
            event,
            goal: goal.then_some(GoalColumns {
                zeta: floats[6],
                product_estimator: floats[7],
                goal_value: floats[8],
                goal_error: floats[9],
            }),
        }
    }
}

fn same_bits(a: &StepRecord, b: &StepRecord) -> bool {
    let bits = |r: &StepRecord| {
        let mut v = vec![r.eta, r.energy, r.energy_diff, r.u_norm, r.delta, r.l];
        if let Some(g) = r.goal {
            v.extend([g.zeta, g.product_estimator, g.goal_value, g.goal_error]);
        }
        v.iter().map(|x| if x.is_nan() { u64::MAX } else { x.to_bits() }).collect::<Vec<_>>()
    };
    (a.ell, a.k, a.total_step, a.nelem, a.ndof, a.work, a.event, a.goal.is_some())
        == (b.ell, b.k, b.total_step, b.nelem, b.ndof, b.work, b.event, b.goal.is_some())
        && bits(a) == bits(b)
}

fn write_all(records: &[StepRecord], goal: bool) -> Vec<u8> {
    let mut w = RecordWriter::new(Vec::new(), goal).unwrap();
    for r in records {
        w.write(r).unwrap();
    }
    w.into_inner().unwrap()
}

proptest! {
    #[test]
    fn round_trip_is_lossless(goal in any::<bool>(), records in prop::collection::vec(record(false), 0..20)) {
        let records: Vec<StepRecord> = if goal {
            records.into_iter().map(|mut r| {
                r.goal = Some(GoalColumns { zeta: r.eta, product_estimator: r.energy, goal_value: f64::NAN, goal_error: r.l });
                r
            }).collect()
        } else {
            records
        };
        let bytes = write_all(&records, goal);
        let back = read_records(bytes.as_slice()).unwrap();
        prop_assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            prop_assert!(same_bits(a, b), "{:?} vs {:?}", a, b);
        }
        prop_assert_eq!(write_all(&back, goal), bytes);
    }

    #[test]
    fn goal_records_round_trip(records in prop::collection::vec(record(true), 1..10)) {
        let back = read_records(write_all(&records, true).as_slice()).unwrap();
        for (a, b) in records.iter().zip(&back) {
            prop_assert!(same_bits(a, b));
        }
    }

    #[test]
    fn float_format_parses_back_exactly(v in any::<f64>()) {
        let s = format_float(v);
        let back: f64 = s.parse().unwrap();
        prop_assert!(back.to_bits() == v.to_bits() || (v.is_nan() && back.is_nan()));
    }
}

#[test]
fn header_columns() {
    assert_eq!(
        header(false).join(","),
        "ell,k,total_step,nelem,ndof,work,eta,energy,energy_diff,u_norm,delta,L,event"
    );
    assert_eq!(
        header(true)[13..].join(","),
        "zeta,product_estimator,goal_value,goal_error"
    );
    assert_eq!(format_float(f64::NAN), "NaN");
}

#[test]
fn malformed_rows_are_rejected() {
    let h = header(false).join(",");
    let short = format!("{h}\n1,2,3\n");
    assert!(read_records(short.as_bytes()).is_err());
    let bad_event = format!("{h}\n0,1,1,4,1,4,1e0,0e0,NaN,0e0,1e0,1e0,exploded\n");
    assert!(read_records(bad_event.as_bytes()).is_err());
    let bad_float = format!("{h}\n0,1,1,4,1,4,one,0e0,NaN,0e0,1e0,1e0,accepted\n");
    assert!(read_records(bad_float.as_bytes()).is_err());
    let ok = format!("{h}\n0,1,1,4,1,4,1e0,0e0,NaN,0e0,1e0,1e0,accepted\n");
    assert_eq!(read_records(ok.as_bytes()).unwrap().len(), 1);
}
