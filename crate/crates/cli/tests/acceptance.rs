//! One line per acceptance criterion, then a single verdict.

use std::fs;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use braidmon::arrangement::{lefschetz_table, BaseSide, CurveSpec};
use braidmon::braid::{Band, BraidWord, FreeWord};
use braidmon::check::{compare, parse_expected, Verdict};
use braidmon::dictionary::entries;
use braidmon::engine::{
    braid_monodromy, conjugate_factorization, moves_word, parse_table_file, reversed_monodromy, rotate_half,
    run_table_file, Factor, PathSide, SingularityTable,
};
use braidmon::moves::{realize_move, Model, MoveKind};
use braidmon::notation::{parse, parse_expr, to_band, DecoratedExpr, Detour, Kind, Label, LabelMap, Side};

const BRAID_LIMIT: Duration = Duration::from_secs(5);
const DICT_LIMIT: Duration = Duration::from_secs(5);
const END_TO_END_LIMIT: Duration = Duration::from_secs(30);
const REALIZATION_LIMIT: Duration = Duration::from_secs(60);
const RANDOM_WORDS: usize = 1000;
const MAX_WORD_LEN: usize = 64;
const RANDOM_ASTS: usize = 200;
const FAULTS: usize = 50;

type Outcome = Result<String, String>;

fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn fixture(name: &str) -> Result<String, String> {
    fs::read_to_string(fixture_path(name)).map_err(|e| format!("{name}: {e}"))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let r = f();
    let t = start.elapsed();
    let r = r.map(|s| format!("{s}, {:.2}s", t.as_secs_f64()));
    match r {
        Ok(s) if t > limit => Err(format!("{s} exceeds {}s", limit.as_secs())),
        other => other,
    }
}

fn word(rng: &mut StdRng, n: usize, len: usize) -> BraidWord {
    let letters = (0..len)
        .map(|_| {
            let g = rng.gen_range(1..n as i32);
            if rng.gen() {
                g
            } else {
                -g
            }
        })
        .collect();
    BraidWord::new(n, letters).unwrap()
}

fn braid_core() -> Outcome {
    let e = |r: Result<bool, braidmon::BraidError>| r.map_err(|e| e.to_string());
    let mut checks = 0;
    for n in 2..=8usize {
        for i in 1..n as i32 {
            for j in 1..n as i32 {
                let w = |l: &[i32]| BraidWord::new(n, l.to_vec()).unwrap();
                if (i - j).abs() >= 2 {
                    ensure(e(w(&[i, j]).equal(&w(&[j, i])))?, || format!("s{i} s{j} do not commute in B{n}"))?;
                }
                if j == i + 1 {
                    ensure(e(w(&[i, j, i]).equal(&w(&[j, i, j])))?, || format!("braid relation {i},{j} in B{n}"))?;
                }
                if (i - j).abs() == 1 {
                    ensure(!e(w(&[i, j]).equal(&w(&[j, i])))?, || format!("s{i} s{j} commute in B{n}"))?;
                }
                checks += 1;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for _ in 0..RANDOM_WORDS {
        let n = rng.gen_range(2..=8);
        let (la, lb) = (rng.gen_range(0..=MAX_WORD_LEN), rng.gen_range(0..=MAX_WORD_LEN));
        let a = word(&mut rng, n, la);
        let b = word(&mut rng, n, lb);
        let boundary = FreeWord::new(1..=n as i32);
        ensure(a.artin_action().apply(&boundary) == boundary, || format!("boundary word moved by {a}"))?;
        let ab = a.compose(&b).map_err(|e| e.to_string())?;
        ensure(ab.permutation() == a.permutation().then(&b.permutation()), || format!("permutation of {a} * {b}"))?;
        ensure(ab.exponent_sum() == a.exponent_sum() + b.exponent_sum(), || format!("exponent sum of {a} * {b}"))?;
        checks += 1;
    }
    Ok(format!("{checks} checks"))
}

fn dictionary() -> Outcome {
    let mut held = 0;
    for n in [10, 12] {
        for k in [3, 4] {
            for c in entries(n, k).map_err(|e| e.to_string())? {
                ensure(c.holds().map_err(|e| e.to_string())?, || format!("n={n} k={k}: {c}"))?;
                held += 1;
            }
        }
    }
    Ok(format!("{held} entry instances"))
}

fn round_trips() -> Outcome {
    let mut checked = 0;
    let mut broken = Vec::new();
    for n in [8usize, 10, 12] {
        for (there, back, pairs) in [
            (MoveKind::I2toR as fn(usize) -> MoveKind, MoveKind::RtoI2 as fn(usize) -> MoveKind, 1),
            (MoveKind::I4toI2, MoveKind::I2toI4, 2),
            (MoveKind::I6toI4, MoveKind::I4toI6, 3),
        ] {
            let m = Model::new(n, pairs).map_err(|e| e.to_string())?;
            for k in 1..n {
                let Ok((w1, mid)) = realize_move(&there(k), &m) else { continue };
                let Ok((w2, _)) = realize_move(&back(k), &mid) else { continue };
                let c = w1.compose(&w2).map_err(|e| e.to_string())?;
                checked += 1;
                if !c.equal(&BraidWord::identity(n)).map_err(|e| e.to_string())? {
                    broken.push(format!("n={n} {} then {}", there(k), back(k)));
                }
            }
        }
    }
    if broken.is_empty() {
        Ok(format!("{checked} round trips"))
    } else {
        Err(format!("{} of {checked} round trips are not the identity, first: {}", broken.len(), broken[0]))
    }
}

fn all_match(factors: &[Factor], expected: &str, labels: &LabelMap, rows: usize) -> Result<(), String> {
    let exp = parse_expected(&fixture(expected)?, labels).map_err(|e| e.to_string())?;
    let r = compare(factors, &exp, labels).map_err(|e| e.to_string())?;
    ensure(r.all_match() && r.rows.len() == rows, || format!("{expected}: {r}"))
}

fn factor_invariants(factors: &[Factor]) -> Result<(), String> {
    for f in factors {
        let b = f.braid();
        ensure(b.exponent_sum() == f.epsilon as i64, || format!("j={} exponent sum", f.origin_j))?;
        let moved = (1..=b.strands()).filter(|&i| b.permutation().apply(i) != i).count();
        let want = if f.epsilon % 2 == 0 { 0 } else { 2 };
        ensure(moved == want, || format!("j={} permutation", f.origin_j))?;
    }
    Ok(())
}

fn s1_end_to_end() -> Outcome {
    let file = parse_table_file(&fixture("s1.table")?).map_err(|e| e.to_string())?;
    let labels = &file.table.labels;
    let factors = braid_monodromy(&file.table).map_err(|e| e.to_string())?;
    ensure(factors.len() == 28, || format!("{} factors", factors.len()))?;
    all_match(&factors, "s1.expected", labels, 28)?;
    all_match(&factors, "s1_traces.expected", labels, 4)?;
    factor_invariants(&factors)?;
    let total: i32 = factors.iter().map(|f| f.epsilon).sum();
    ensure(total == 62, || format!("total epsilon {total}"))?;
    Ok("28 factors, 4 traces, total epsilon 62".into())
}

fn s2_end_to_end() -> Outcome {
    let file = parse_table_file(&fixture("s2.table")?).map_err(|e| e.to_string())?;
    let labels = &file.table.labels;
    let first = braid_monodromy(&file.table).map_err(|e| e.to_string())?;
    all_match(&first, "s2_f1.expected", labels, 14)?;
    let rev = file.reversed.as_ref().ok_or("no reversed table")?;
    let back = reversed_monodromy(rev, PathSide::Above).map_err(|e| e.to_string())?;
    all_match(&back, "s2_left.expected", &rev.labels, 14)?;
    all_match(&back, "s2_left_traces.expected", &rev.labels, 3)?;
    all_match(&rotate_half(&back, 10).map_err(|e| e.to_string())?, "s2_rotated.expected", &rev.labels, 14)?;
    let all = run_table_file(&file).map_err(|e| e.to_string())?;
    factor_invariants(&all)?;
    all_match(&all, "s2.expected", labels, 28)?;
    let rho = moves_word(10, file.rho.as_deref().unwrap_or(&[])).map_err(|e| e.to_string())?;
    let conj = conjugate_factorization(&first, &rho);
    for j in 15..=28 {
        let partner = match j {
            21 => 7,
            22 => 8,
            _ => 29 - j,
        };
        let mine: Vec<&Factor> = all.iter().filter(|f| f.origin_j == j).collect();
        let theirs: Vec<&Factor> = conj.iter().filter(|f| f.origin_j == partner).collect();
        ensure(!mine.is_empty() && mine.len() == theirs.len(), || format!("j={j}: factor count"))?;
        for m in mine {
            let mut hit = false;
            for t in &theirs {
                hit |= t.epsilon == m.epsilon && t.braid().equal(&m.braid()).map_err(|e| e.to_string())?;
            }
            ensure(hit, || format!("j={j} is not a conjugate of row {partner}"))?;
        }
    }
    Ok("F1, left half, rotation and rho pairing".into())
}

fn rows_text(t: &SingularityTable) -> Vec<String> {
    std::iter::once(t.header()).chain(t.rows.iter().map(|r| r.to_string())).collect()
}

fn same_rows(got: &[String], want: &[String], what: &str) -> Result<(), String> {
    for (i, w) in want.iter().enumerate() {
        let g = got.get(i).map(String::as_str).unwrap_or("<missing>");
        ensure(g == w, || format!("{what} line {}: got `{g}`, want `{w}`", i + 1))?;
    }
    ensure(got.len() >= want.len(), || format!("{what}: too few rows"))
}

fn realization(curve: &str, table: &str) -> Outcome {
    let spec = CurveSpec::parse(&fixture(curve)?).map_err(|e| format!("{curve}: {e}"))?;
    let file = parse_table_file(&fixture(table)?).map_err(|e| e.to_string())?;
    let right = lefschetz_table(&spec, BaseSide::Right).map_err(|e| format!("{curve}: {e}"))?;
    let want = rows_text(&file.table);
    match &file.reversed {
        None => {
            let got = rows_text(&right);
            ensure(got.len() == want.len(), || format!("{curve}: {} rows, want {}", got.len() - 1, want.len() - 1))?;
            same_rows(&got, &want, curve)?;
        }
        Some(rev) => {
            // the two halves are read from opposite base points
            let half = file.table.rows.len();
            ensure(right.rows.len() == half + rev.rows.len(), || format!("{curve}: {} rows", right.rows.len()))?;
            let got = rows_text(&right);
            same_rows(&got[..=half], &want, curve)?;
            let left = lefschetz_table(&spec, BaseSide::Left).map_err(|e| format!("{curve}: {e}"))?;
            let total = right.rows.len() + 1;
            let mut got = vec![left.header()];
            for r in left.rows.iter().take(rev.rows.len()) {
                let mut r = r.clone();
                r.j = total - r.j;
                got.push(r.to_string());
            }
            same_rows(&got, &rows_text(rev), curve)?;
        }
    }
    Ok(curve.to_string())
}

fn realizations() -> Outcome {
    let mut done = Vec::new();
    let mut failed = Vec::new();
    for (curve, table) in
        [("s1_a.curve", "s1.table"), ("s1_b.curve", "s1.table"), ("s2_a.curve", "s2.table"), ("s2_b.curve", "s2.table")]
    {
        match timed(REALIZATION_LIMIT, || realization(curve, table)) {
            Ok(s) => done.push(s),
            Err(e) => failed.push(e),
        }
    }
    if failed.is_empty() {
        Ok(done.join("; "))
    } else {
        Err(format!("{} of 4 realizations fail: {}", failed.len(), failed.join("; ")))
    }
}

fn random_label(rng: &mut StdRng) -> Label {
    Label { number: rng.gen_range(1..=20), prime: rng.gen_bool(0.3) }
}

fn random_base(rng: &mut StdRng, kind: Kind) -> DecoratedExpr {
    let side = [Side::Below, Side::Above, Side::Plain][rng.gen_range(0..3)];
    let left = random_label(rng);
    let mut right = random_label(rng);
    while right == left {
        right = random_label(rng);
    }
    let mut e = DecoratedExpr::simple(kind, side, left, right, 1);
    if kind == Kind::Halftwist {
        let x = rng.gen_range(1..=6);
        e.exponent = if rng.gen() { x } else { -x };
    }
    for _ in 0..rng.gen_range(0..3) {
        let from = random_label(rng);
        let to = rng.gen_bool(0.3).then(|| random_label(rng));
        e.detours.push(Detour { from, to });
    }
    e
}

fn notation_round_trip() -> Outcome {
    let mut corpus = 0;
    for name in ["s1.expected", "s1_traces.expected", "s2_f1.expected", "s2_traces.expected", "s2_left.expected"]
        .iter()
        .chain(&["s2_left_traces.expected", "s2_rotated.expected", "s2.expected"])
    {
        for line in fixture(name)?.lines() {
            let l = line.split('#').next().unwrap().trim();
            let Some((_, body)) = l.split_once(' ') else { continue };
            for t in body.split(';').map(str::trim) {
                let e = parse_expr(t).map_err(|err| format!("{t}: {err}"))?;
                ensure(e.render() == t, || format!("{t} renders as {}", e.render()))?;
                ensure(parse_expr(&e.render()).ok() == Some(e), || format!("{t} reparses differently"))?;
                corpus += 1;
            }
        }
    }
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..RANDOM_ASTS {
        let kind = if rng.gen() { Kind::Path } else { Kind::Halftwist };
        let mut e = random_base(&mut rng, kind);
        for _ in 0..rng.gen_range(0..4) {
            e.conjugators.push(random_base(&mut rng, Kind::Halftwist));
        }
        let back = parse_expr(&e.render()).map_err(|err| format!("{}: {err}", e.render()))?;
        ensure(back == e, || format!("{} reparses differently", e.render()))?;
    }
    Ok(format!("{corpus} corpus expressions, {RANDOM_ASTS} random trees"))
}

#[derive(Clone, Copy, Debug)]
enum Fault {
    Inversion,
    Reorder,
    Exponent,
}

/// Apply one fault to the expression text, or `None` when the fault
/// would leave the braid unchanged.
fn inject(fault: Fault, t: &str, labels: &LabelMap, rng: &mut StdRng) -> Result<Option<String>, String> {
    let mut e = parse(t, labels).map_err(|e| e.to_string())?;
    match fault {
        Fault::Inversion => e.exponent = -e.exponent,
        Fault::Exponent => {
            let d = if rng.gen() { 1 } else { 2 };
            e.exponent += if e.exponent + d == 0 { d + 1 } else { d };
        }
        Fault::Reorder => {
            let c = e.conjugators.len();
            if c < 2 {
                return Ok(None);
            }
            let i = rng.gen_range(0..c - 1);
            let bands = |e: &DecoratedExpr| to_band(e, labels).map(|b| b.0).map_err(|e| e.to_string());
            let before: Band = bands(&e)?;
            e.conjugators.swap(i, i + 1);
            if before.same_path(&bands(&e)?).map_err(|e| e.to_string())? {
                return Ok(None);
            }
        }
    }
    Ok(Some(e.render()))
}

fn fault_injection() -> Outcome {
    let mut rng = StdRng::seed_from_u64(11);
    let cases = [("s1.table", "s1.expected"), ("s2.table", "s2.expected")];
    let mut data = Vec::new();
    for (t, e) in cases {
        let file = parse_table_file(&fixture(t)?).map_err(|e| e.to_string())?;
        let factors = run_table_file(&file).map_err(|e| e.to_string())?;
        let lines: Vec<String> = fixture(e)?.lines().map(String::from).collect();
        data.push((file.table.labels.clone(), factors, lines));
    }
    let mut injected = 0;
    let mut tally = [0; 3];
    let mut attempts = 0;
    while injected < FAULTS {
        attempts += 1;
        ensure(attempts < 10_000, || format!("only {injected} faults found"))?;
        let (labels, factors, lines) = &data[rng.gen_range(0..data.len())];
        let fault = [Fault::Inversion, Fault::Reorder, Fault::Exponent][injected % 3];
        let i = rng.gen_range(0..lines.len());
        let Some(body) = lines[i].strip_prefix("j=") else { continue };
        let (j, exprs) = body.split_once(' ').unwrap();
        let mut parts: Vec<String> = exprs.split(';').map(|s| s.trim().to_string()).collect();
        let p = rng.gen_range(0..parts.len());
        let Some(bad) = inject(fault, &parts[p], labels, &mut rng)? else { continue };
        parts[p] = bad;
        let mut text = lines.clone();
        text[i] = format!("j={j} {}", parts.join(" ; "));
        let exp = parse_expected(&text.join("\n"), labels).map_err(|e| e.to_string())?;
        let report = compare(factors, &exp, labels).map_err(|e| e.to_string())?;
        let flagged = report.rows.iter().any(|r| r.j.to_string() == j && r.verdict != Verdict::Match);
        ensure(flagged, || format!("{fault:?} accepted: {}", text[i]))?;
        tally[fault as usize] += 1;
        injected += 1;
    }
    Ok(format!("{injected} faults flagged ({} inversions, {} reorders, {} exponent changes)", tally[0], tally[1], tally[2]))
}

#[test]
fn acceptance() {
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("braid core", Box::new(|| timed(BRAID_LIMIT, braid_core))),
        ("dictionary", Box::new(|| timed(DICT_LIMIT, dictionary))),
        ("move round trips", Box::new(round_trips)),
        ("S1 end to end", Box::new(|| timed(END_TO_END_LIMIT, s1_end_to_end))),
        ("S2 end to end", Box::new(|| timed(END_TO_END_LIMIT, s2_end_to_end))),
        ("realizations", Box::new(realizations)),
        ("notation round trip", Box::new(notation_round_trip)),
        ("fault injection", Box::new(fault_injection)),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
