use std::path::{Path, PathBuf};
use std::process::Command;

use agt_core::gen;
use agt_core::lens::identity_lens;
use agt_core::metric::{ExtReal, Subset};
use agt_core::opengame::OpenGame;
use agt_core::selection::t_eps;
use agt_core::specio::{serialize, Body, SelectionDoc, SpecDocument};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn agt(args: &[&str]) -> Run {
    let o = Command::new(env!("CARGO_BIN_EXE_agt")).args(args).output().unwrap();
    Run {
        code: o.status.code().unwrap_or(-1),
        out: String::from_utf8(o.stdout).unwrap(),
        err: String::from_utf8(o.stderr).unwrap(),
    }
}

fn write_doc(dir: &TempDir, name: &str, body: Body) -> PathBuf {
    write_unit(dir, name, body, "1")
}

fn write_unit(dir: &TempDir, name: &str, body: Body, unit: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, serialize(&SpecDocument { unit: unit.into(), body })).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const ARGMAX_AB_2: &str = r#"{"version": "agt/1", "kind": "selection", "unit": "1",
  "body": {"rule": "argmax", "object": {"fwd": {"discrete": ["a", "b"]}, "bwd": {"grid": 2}},
           "queries": [["2", "0"]]}}"#;

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn solve_prisoners_dilemma_golden() {
    let r = agt(&["solve", s(&golden("pd.agt.json"))]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert_eq!(r.out, std::fs::read_to_string(golden("pd.solve.txt")).unwrap());
    let r = agt(&["--eps", "1", "approx", s(&golden("pd.agt.json"))]);
    assert_eq!(r.out, std::fs::read_to_string(golden("pd.approx1.txt")).unwrap());
}

#[test]
fn empty_equilibrium_game_lists_nothing() {
    let dir = TempDir::new().unwrap();
    let o = gen::object(2, 1);
    let count = o.utility_space().unwrap().count();
    let g = OpenGame::new(o.clone(), o.clone(), vec!["s".into()], vec![identity_lens(&o)], vec![vec![Subset::EMPTY; count]])
        .unwrap();
    let p = write_doc(&dir, "empty.json", Body::OpenGame(g));
    let r = agt(&["solve", s(&p)]);
    assert_eq!((r.code, r.out.as_str()), (0, ""));
}

#[test]
fn malformed_documents_name_the_location() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"version\": \"agt/1\",\n  \"kind\": \n").unwrap();
    let r = agt(&["solve", s(&p)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("line "), "{}", r.err);

    std::fs::write(&p, ARGMAX_AB_2.replace("\"grid\": 2", "\"grid\": \"x\"")).unwrap();
    let r = agt(&["solve", s(&p)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("body.object.bwd"), "{}", r.err);
}

#[test]
fn approx_of_argmax() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("argmax.json");
    std::fs::write(&p, ARGMAX_AB_2).unwrap();
    assert_eq!(agt(&["solve", s(&p)]).out, "k=[2, 0]  {a}\n");
    // k=(a:2, b:0) is within 1 of (a:1, b:1), where both actions are optimal
    let r = agt(&["--eps", "1", "approx", s(&p)]);
    assert_eq!(r.out, "k=[2, 0]  {a, b}\nadded at eps=1:\nk=[2, 0]  {b}\n");
    // with an unbounded radius every action optimal somewhere is selected everywhere
    let r = agt(&["--eps", "inf", "--format", "records", "approx", s(&p)]);
    assert_eq!(r.out, "selected\tk=[2,0]\ta\nselected\tk=[2,0]\tb\nadded\tk=[2,0]\tb\n");
}

#[test]
fn approx_at_zero_is_solve() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 30 {
        let doc = gen::document(&mut rng);
        if !matches!(doc.body, Body::Selection(_) | Body::OpenGame(_)) {
            continue;
        }
        let p = write_unit(&dir, "doc.json", doc.body, &doc.unit);
        for format in ["text", "records"] {
            let a = agt(&["--format", format, "solve", s(&p)]);
            let b = agt(&["--format", format, "--eps", "0", "approx", s(&p)]);
            assert_eq!(a.code, 0, "{}", a.err);
            assert_eq!(a.out, b.out);
        }
        checked += 1;
    }
}

#[test]
fn distances() {
    let dir = TempDir::new().unwrap();
    let o = gen::object(2, 2);
    let am = write_doc(&dir, "am.json", Body::Selection(SelectionDoc::argmax(&o).unwrap()));
    let one = write_doc(&dir, "one.json", Body::Selection(SelectionDoc::eps_argmax(&o, ExtReal::units(1)).unwrap()));
    assert_eq!(agt(&["--format", "records", "distance", s(&am), s(&am)]).out, "distance\t0\t0\ttrue\n");
    assert_eq!(agt(&["--format", "records", "distance", s(&am), s(&one)]).out, "distance\t1\t1\ttrue\n");
    assert_eq!(agt(&["distance", s(&am), s(&one)]).out, "distance 1 units = 1 (unit 1)\n");

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sel = gen::selection(&mut rng, &o);
    let near = t_eps(ExtReal::units(1), &sel);
    let a = write_unit(&dir, "s.json", Body::Selection(SelectionDoc::table(sel)), "0.5");
    let b = write_unit(&dir, "t.json", Body::Selection(SelectionDoc::table(near)), "0.5");
    let r = agt(&["--format", "records", "distance", s(&a), s(&b)]);
    let fields: Vec<&str> = r.out.trim_end().split('\t').collect();
    let units: u64 = fields[1].parse().unwrap();
    assert!(units <= 1, "{}", r.out);
    assert_eq!(fields[2], if units == 0 { "0" } else { "0.5" });

    let other = write_doc(&dir, "other.json", Body::Selection(SelectionDoc::argmax(&gen::object(1, 2)).unwrap()));
    assert_eq!(agt(&["distance", s(&am), s(&other)]).code, 2);
}

#[test]
fn law_suites() {
    let r = agt(&["laws", "argmax-sandwich"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(r.out.lines().any(|l| l.contains("skipped=") && !l.contains("skipped=0")), "{}", r.out);

    let r = agt(&["laws", "seq-approx"]);
    assert_eq!(r.code, 0);
    assert!(r.out.contains("TH.TG within T(HG)") && r.out.contains("recorded"), "{}", r.out);

    let r = agt(&["--format", "records", "laws", "metric", "--max-x", "1", "--max-v", "2"]);
    assert_eq!(r.code, 0);
    assert!(r.out.lines().all(|l| l.starts_with("law\tmetric\t")), "{}", r.out);

    assert_eq!(agt(&["laws", "everything"]).code, 2);
    assert_eq!(agt(&["--budget-secs", "0", "laws", "all"]).code, 3);
}

#[test]
fn all_laws_at_default_caps() {
    let r = agt(&["laws", "all"]);
    assert_eq!(r.code, 0, "{}", r.out);
    assert!(!r.out.contains("VIOLATED"));
}

#[test]
fn law_output_is_deterministic_across_execution_modes() {
    let a = agt(&["laws", "game-monoidal"]);
    let b = agt(&["--sequential", "laws", "game-monoidal"]);
    assert_eq!(a.out, b.out);
}

/// Nash profiles of a two-player game on `{a,b} x {a,b}` with utilities in
/// `{0,1}^2`, straight from best responses; `k` holds product indices `2u + u'`.
fn nash_oracle(k: &[usize]) -> Vec<usize> {
    let util = |x: usize, y: usize| (k[x * 2 + y] / 2, k[x * 2 + y] % 2);
    (0..4)
        .filter(|&p| {
            let (x, y) = (p / 2, p % 2);
            (0..2).all(|x2| util(x2, y).0 <= util(x, y).0) && (0..2).all(|y2| util(x, y2).1 <= util(x, y).1)
        })
        .collect()
}

#[test]
fn tensor_of_argmax_matches_nash_oracle() {
    let dir = TempDir::new().unwrap();
    let o = gen::object(2, 1);
    let a = write_doc(&dir, "a.json", Body::Selection(SelectionDoc::argmax(&o).unwrap()));
    let out = dir.path().join("ab.json");
    assert_eq!(agt(&["compose", "tensor", s(&a), s(&a), s(&out)]).code, 0);
    let r = agt(&["--format", "records", "solve", s(&out)]);
    let labels = ["(a,a)", "(a,b)", "(b,a)", "(b,b)"];
    let mut seen = 0;
    for line in r.out.lines() {
        let f: Vec<&str> = line.split('\t').collect();
        let k: Vec<usize> = f[1].trim_start_matches("k=[").trim_end_matches(']').split(',').map(|v| v.parse().unwrap()).collect();
        let expected = nash_oracle(&k);
        if f[2] == "-" {
            assert!(expected.is_empty(), "{line}");
        } else {
            assert!(expected.iter().any(|&p| labels[p] == f[2]), "{line}");
            seen += 1;
        }
    }
    let total: usize = (0..256usize)
        .map(|i| nash_oracle(&(0..4).map(|j| i >> (2 * (3 - j)) & 3).collect::<Vec<_>>()).len())
        .sum();
    assert_eq!(seen, total);
}

#[test]
fn seq_with_identity_game_keeps_the_listing() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let (x, y) = (gen::object(2, 2), gen::object(2, 1));
    let g = gen::game(&mut rng, &x, &y, 2);
    let count = y.utility_space().unwrap().count();
    let id = OpenGame::new(y.clone(), y.clone(), vec!["id".into()], vec![identity_lens(&y)], vec![vec![Subset::full(2); count]])
        .unwrap();
    let gp = write_doc(&dir, "g.json", Body::OpenGame(g));
    let ip = write_doc(&dir, "id.json", Body::OpenGame(id));
    let out = dir.path().join("gi.json");
    assert_eq!(agt(&["compose", "seq", s(&gp), s(&ip), s(&out)]).code, 0);
    let first = std::fs::read(&out).unwrap();
    assert_eq!(agt(&["compose", "seq", s(&gp), s(&ip), s(&out)]).code, 0);
    assert_eq!(std::fs::read(&out).unwrap(), first);

    let composite = agt(&["solve", s(&out)]).out;
    let original = agt(&["solve", s(&gp)]).out;
    assert!(!original.is_empty());
    assert_eq!(composite.replace(",id)", "").replace("strategy=(", "strategy="), original);
}

#[test]
fn mismatched_boundaries() {
    let dir = TempDir::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (x, y) = (gen::object(2, 2), gen::object(2, 1));
    let g = write_doc(&dir, "g.json", Body::OpenGame(gen::game(&mut rng, &x, &y, 1)));
    let out = dir.path().join("o.json");
    let r = agt(&["compose", "seq", s(&g), s(&g), s(&out)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("({a,b}, {0,1})") && r.err.contains("({a,b}, {0,1,2})"), "{}", r.err);
    assert!(!out.exists());
}
