use braidmon::braid::{block_halftwist, BraidWord};
use braidmon::moves::{apply_move, realize_move, realize_move_oriented, straight_motion, Model, Q, MoveError, MoveKind, Orientation};
use braidmon::notation::{parse, to_band, LabelMap};

fn labels(m: &Model) -> LabelMap {
    LabelMap::for_model(m.real_count(), m.pairs)
}

fn path(m: &Model, text: &str) -> braidmon::Band {
    let l = labels(m);
    to_band(&parse(text, &l).unwrap(), &l).unwrap().0
}

/// Every move with every valid parameter, together with its source model.
fn all_moves(n: usize) -> Vec<(MoveKind, Model)> {
    let mut out = Vec::new();
    for k in 1..n {
        for (mv, pairs) in [
            (MoveKind::I2toR(k), 1),
            (MoveKind::RtoI2(k), 0),
            (MoveKind::I4toI2(k), 2),
            (MoveKind::I4toI2Prime(k), 2),
            (MoveKind::I2toI4(k), 1),
            (MoveKind::I6toI4(k), 3),
            (MoveKind::I4toI6(k), 2),
        ] {
            let m = Model::new(n, pairs).unwrap();
            if realize_move(&mv, &m).is_ok() {
                out.push((mv, m));
            }
        }
    }
    out
}

#[test]
fn valid_parameter_ranges() {
    for n in [8, 10, 12] {
        let count = |f: fn(usize) -> MoveKind| all_moves(n).iter().filter(|(m, _)| *m == f(m.parameter())).count();
        assert_eq!(count(MoveKind::I2toR), n - 1);
        assert_eq!(count(MoveKind::RtoI2), n - 1);
        assert_eq!(count(MoveKind::I4toI2), n - 3);
        assert_eq!(count(MoveKind::I2toI4), n - 3);
        assert_eq!(count(MoveKind::I6toI4), n - 5);
        assert_eq!(count(MoveKind::I4toI6), n - 5);
    }
}

#[test]
fn targets_and_levels() {
    for n in [8, 10, 12] {
        for (mv, m) in all_moves(n) {
            let (w, t) = realize_move(&mv, &m).unwrap();
            assert_eq!(w.strands(), n);
            let (from, to) = mv.levels().unwrap();
            assert_eq!((m.pairs, t.pairs), (from, to), "{mv}");
            assert_eq!(mv.source(&t).unwrap(), m);
            // real punctures left of the action stay put
            let k = mv.parameter();
            for i in 1..k.min(m.real_count()) {
                assert_eq!(w.permutation().apply(i), i, "{mv} moves point {i}");
            }
        }
    }
}

#[test]
fn wrong_model_is_refused() {
    let k1 = Model::new(10, 0).unwrap();
    assert!(matches!(realize_move(&MoveKind::I4toI2(2), &k1), Err(MoveError::LevelMismatch { .. })));
    let k4 = Model::new(10, 2).unwrap();
    assert!(matches!(realize_move(&MoveKind::I4toI6(6), &k4), Err(MoveError::OutOfRange(_))));
    assert!(Model::new(4, 3).is_err());
    assert!(Model::parse_name(10, "K3").is_err());
    assert_eq!(Model::parse_name(10, "K6").unwrap().real_count(), 4);
}

#[test]
fn block_twists() {
    let m = Model::new(10, 0).unwrap();
    let (w, t) = realize_move(&MoveKind::BlockTwist { k: 3, l: 6, r: 2 }, &m).unwrap();
    assert_eq!(t, m);
    assert!(w.equal(&block_halftwist(3, 6, 10).unwrap().power(2)).unwrap());
    let (zero, _) = realize_move(&MoveKind::BlockTwist { k: 3, l: 6, r: 0 }, &m).unwrap();
    assert!(zero.is_empty());
    let (cw, _) = realize_move_oriented(&MoveKind::BlockTwist { k: 2, l: 4, r: 1 }, &m, Orientation::Clockwise).unwrap();
    assert_eq!(cw, block_halftwist(2, 4, 10).unwrap().mirror());
    // a zero-power twist changes no band
    let b = path(&m, "_z(5)[2,8]");
    assert!(apply_move(&MoveKind::BlockTwist { k: 4, l: 7, r: 0 }, &m, &b).unwrap().same_path(&b).unwrap());
}

#[test]
fn clockwise_reverses_the_twisting() {
    // up to the pairs whose flattened order flips with the picture
    for (mv, m) in all_moves(10) {
        let (ccw, t) = realize_move(&mv, &m).unwrap();
        let (cw, _) = realize_move_oriented(&mv, &m, Orientation::Clockwise).unwrap();
        let flips = t.pairs as i64 - m.pairs as i64;
        assert_eq!(ccw.exponent_sum() + cw.exponent_sum(), flips, "{mv}");
    }
}

#[test]
fn primed_variant_differs() {
    for n in [8, 10, 12] {
        let m = Model::new(n, 2).unwrap();
        for k in 1..=n - 3 {
            let (a, _) = realize_move(&MoveKind::I4toI2(k), &m).unwrap();
            let (b, _) = realize_move(&MoveKind::I4toI2Prime(k), &m).unwrap();
            assert!(!a.equal(&b).unwrap(), "n={n} k={k}");
            // which pair lands is visible in the permutation
            let pa = a.permutation();
            let pb = b.permutation();
            assert_ne!(pa.apply(n - 3), pb.apply(n - 3));
        }
    }
}

#[test]
fn straight_motion_of_a_swap() {
    let p = |x: i64, y: i64| (Q::from_integer(x), Q::new(y, 2));
    let from = vec![p(1, 0), p(2, 0), p(3, 0)];
    assert!(straight_motion(3, &from, &from).unwrap().is_empty());
    // 1 and 2 trade places, 1 passing above: one negative crossing
    let to = vec![p(2, 1), p(1, 0), p(3, 0)];
    let w = straight_motion(3, &from, &to).unwrap();
    assert_eq!(w.len(), 1);
    assert_eq!(w.permutation().apply(1), 2);
}

/// Each round trip lands back on its source model, yet is one halftwist
/// rather than the identity: the two quarter turns go the same way.
#[test]
fn round_trips_are_one_halftwist() {
    for n in [8, 10, 12] {
        for (there, back, pairs) in [
            (MoveKind::I2toR as fn(usize) -> MoveKind, MoveKind::RtoI2 as fn(usize) -> MoveKind, 1),
            (MoveKind::I4toI2, MoveKind::I2toI4, 2),
            (MoveKind::I6toI4, MoveKind::I4toI6, 3),
        ] {
            let m = Model::new(n, pairs).unwrap();
            for k in 1..n {
                let Ok((w1, t)) = realize_move(&there(k), &m) else { continue };
                let Ok((w2, home)) = realize_move(&back(k), &t) else { continue };
                assert_eq!(home, m);
                let c = w1.compose(&w2).unwrap();
                assert_eq!(c.exponent_sum(), 1, "{} {}", there(k), back(k));
                assert!(!c.equal(&BraidWord::identity(n)).unwrap());
                let moved = (1..=n).filter(|&i| c.permutation().apply(i) != i).count();
                assert_eq!(moved, 2);
            }
        }
    }
}

/// The worked images of the two real/complex moves pin down both
/// orientations. If RtoI2 undid I2toR, one path in K₁ would have two
/// different preimages; the two candidates are checked to differ.
#[test]
fn worked_images_rule_out_identity_round_trips() {
    for n in [10, 12] {
        let k1 = Model::new(n, 0).unwrap();
        let k2 = Model::new(n, 1).unwrap();
        for k in [3, 4] {
            let (up, _) = realize_move(&MoveKind::I2toR(k), &k2).unwrap();
            let (down, _) = realize_move(&MoveKind::RtoI2(k), &k1).unwrap();
            let start = path(&k2, &format!("z[{},{k}]", k - 1));
            let via_up = start.transported(&up);
            assert!(via_up.same_path(&path(&k1, &format!("_z({})[{},{}]", k + 1, k - 1, k + 2))).unwrap());
            let pre = path(&k1, &format!("z({k})[{},{}]", k - 1, k + 2));
            assert!(pre.transported(&down).same_path(&start).unwrap());
            assert!(!pre.same_path(&via_up).unwrap());
            // with an exact inverse the second image would break
            assert!(!pre.transported(&up.invert()).same_path(&start).unwrap());
        }
    }
}
