use std::fs;
use std::path::PathBuf;

use braidmon::notation::{
    describe_monotone, parse, parse_expr, to_band, to_band_flagged, DecoratedExpr, Detour, Kind, Label, LabelMap,
    MonotonePath, Side,
};
use proptest::prelude::*;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Every expression printed in the expected-factor fixtures.
fn corpus() -> Vec<String> {
    let mut out = Vec::new();
    let mut files: Vec<_> = fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "expected"))
        .collect();
    files.sort();
    for f in files {
        for line in fs::read_to_string(&f).unwrap().lines() {
            let l = line.split('#').next().unwrap().trim();
            let Some((_, body)) = l.split_once(' ') else { continue };
            out.extend(body.split(';').map(|s| s.trim().to_string()));
        }
    }
    out
}

#[test]
fn corpus_round_trips() {
    let c = corpus();
    assert!(c.len() > 100, "corpus has {} expressions", c.len());
    for t in &c {
        let e = parse_expr(t).unwrap_or_else(|err| panic!("{t}: {err}"));
        assert_eq!(&e.render(), t);
        assert_eq!(parse_expr(&e.render()).unwrap(), e);
    }
}

#[test]
fn whitespace_and_exponent_forms_normalise() {
    let e = parse_expr("  ~Z2(7)[4 ,9]^Z1[10,11]  ").unwrap();
    assert_eq!(e.render(), "~Z2(7)[4,9] ^ Z[10,11]");
    assert_eq!(parse_expr("Z(3)-(5)-2[2,6]").unwrap().render(), "Z-2(3)-(5)[2,6]");
}

#[test]
fn detour_ranges_flip_a_stretch() {
    let l = LabelMap::standard(8);
    let a = to_band(&parse("_z(3)-(5)[2,7]", &l).unwrap(), &l).unwrap().0;
    let b = to_band(&parse("_z(3)(4)(5)[2,7]", &l).unwrap(), &l).unwrap().0;
    assert!(a.same_path(&b).unwrap());
    let c = to_band(&parse("~z(6)[2,7]", &l).unwrap(), &l).unwrap().0;
    let d = to_band(&parse("_z(3)-(5)[2,7]", &l).unwrap(), &l).unwrap().0;
    assert!(c.same_path(&d).unwrap());
}

#[test]
fn plain_long_letters_are_flagged() {
    let l = LabelMap::standard(8);
    assert!(to_band_flagged(&parse("Z2[2,5]", &l).unwrap(), &l).unwrap().defaulted);
    assert!(!to_band_flagged(&parse("Z2[2,3]", &l).unwrap(), &l).unwrap().defaulted);
    assert!(!to_band_flagged(&parse("_Z2[2,5]", &l).unwrap(), &l).unwrap().defaulted);
    // a plain letter with detours reads as an underlined one
    let a = to_band(&parse("z(3)[2,5]", &l).unwrap(), &l).unwrap().0;
    let b = to_band(&parse("_z(3)[2,5]", &l).unwrap(), &l).unwrap().0;
    assert!(a.same_path(&b).unwrap());
}

#[test]
fn below_and_above_adjacent_chords_agree() {
    let l = LabelMap::standard(6);
    let a = to_band(&parse("_z[3,4]", &l).unwrap(), &l).unwrap().0;
    let b = to_band(&parse("~z[3,4]", &l).unwrap(), &l).unwrap().0;
    assert!(a.same_path(&b).unwrap());
    let a = to_band(&parse("_z[2,4]", &l).unwrap(), &l).unwrap().0;
    let b = to_band(&parse("~z[2,4]", &l).unwrap(), &l).unwrap().0;
    assert!(!a.same_path(&b).unwrap());
}

fn label(max: u32) -> impl Strategy<Value = Label> {
    (1..=max, any::<bool>()).prop_map(|(number, prime)| Label { number, prime })
}

fn base(kind: Kind) -> impl Strategy<Value = DecoratedExpr> {
    let side = prop_oneof![Just(Side::Below), Just(Side::Above), Just(Side::Plain)];
    let exponent = prop_oneof![(-6..=-1i32), (1..=6i32)];
    let detour = (label(20), prop::option::of(label(20))).prop_map(|(from, to)| Detour { from, to });
    (side, exponent, prop::collection::vec(detour, 0..3), label(20), label(20)).prop_filter_map(
        "distinct endpoints",
        move |(side, exponent, detours, left, right)| {
            (left != right).then(|| DecoratedExpr {
                kind,
                side,
                detours,
                left,
                right,
                exponent: if kind == Kind::Path { 1 } else { exponent },
                conjugators: Vec::new(),
            })
        },
    )
}

fn ast() -> impl Strategy<Value = DecoratedExpr> {
    let kind = prop_oneof![Just(Kind::Path), Just(Kind::Halftwist)];
    (kind.prop_flat_map(base), prop::collection::vec(base(Kind::Halftwist), 0..4)).prop_map(|(mut e, c)| {
        e.conjugators = c;
        e
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_asts_round_trip(e in ast()) {
        let text = e.render();
        let back = parse_expr(&text).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.render(), text);
    }

    #[test]
    fn described_paths_resolve_back(n in 3usize..10, seed in any::<u64>()) {
        let left = 1 + (seed as usize) % (n - 1);
        let right = left + 1 + (seed as usize / 7) % (n - left);
        let below = (0..right - left - 1).map(|i| (seed >> (i + 8)) & 1 == 1).collect();
        let p = MonotonePath { left, right, below };
        let l = LabelMap::standard(n);
        let e = describe_monotone(&p, Kind::Path, 1, &l);
        let direct = p.to_band(n).unwrap();
        let parsed = to_band(&parse(&e.render(), &l).unwrap(), &l).unwrap().0;
        prop_assert!(direct.same_path(&parsed).unwrap(), "{}", e.render());
    }
}
