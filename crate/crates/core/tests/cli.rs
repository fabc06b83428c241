use std::path::{Path, PathBuf};

use rapnc::cli::run;
use rapnc::model::io::{parse_instance, SolutionDoc};
use rapnc::model::{check_feasibility, evaluate, Mode};

const QUADRATIC: &str = r#"{"n":2,"m":2,"sigma":[1,2],"a":[0,4],"b":[1,4],"c":[0,0],"d":[4,4],
  "objective":{"kind":"quadratic","params":{"w":[1,1],"t":[0,0]}},"mode":"integer"}"#;

// Prefix one needs at least 3 but both boxes stop at 1.
const INFEASIBLE: &str = r#"{"n":2,"m":2,"sigma":[1,2],"a":[3,4],"b":[3,4],"c":[0,0],"d":[1,1],
  "objective":{"kind":"linear","params":{"p":[1,1]}},"mode":"integer"}"#;

fn rapnc(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("rapnc").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn solve_prints_the_quadratic_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(dir.path(), "q.json", QUADRATIC);
    let (code, out, err) = rapnc(&["solve", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let doc: SolutionDoc = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.x, vec![1.0, 3.0]);
    assert_eq!(doc.objective, 10.0);
    assert!(doc.feasibility.all_zero());
    assert!(doc.rap_solves > 0);
}

#[test]
fn solve_output_reloads_feasibly() {
    let dir = tempfile::tempdir().unwrap();
    let inst_path = dir.path().join("g.json");
    let (code, _, err) = rapnc(&["gen", "--n", "40", "--m", "12", "--family", "crash", "--seed", "3", "--out", inst_path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let sol_path = dir.path().join("s.json");
    let (code, _, err) = rapnc(&["solve", inst_path.to_str().unwrap(), "--eps", "1e-6", "--out", sol_path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (inst, mode) = parse_instance(&std::fs::read_to_string(&inst_path).unwrap()).unwrap();
    assert_eq!(mode, Mode::Continuous);
    let doc: SolutionDoc = serde_json::from_str(&std::fs::read_to_string(&sol_path).unwrap()).unwrap();
    // Twelve printed digits keep the residual near the instance's scale times 1e-12.
    assert!(check_feasibility(&inst, &doc.x, 1e-9).within(1e-9));
    let value = evaluate(&inst.objective, &doc.x).unwrap();
    assert!((value - doc.objective).abs() <= 1e-9 * value.abs().max(1.0));
}

#[test]
fn infeasible_instance_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(dir.path(), "bad.json", INFEASIBLE);
    let (code, out, err) = rapnc(&["solve", p.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("infeasible"), "{err}");
    let (code, _, _) = rapnc(&["oracle", p.to_str().unwrap()]);
    assert_eq!(code, 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(rapnc(&["solve"]).0, 2);
    assert_eq!(rapnc(&["frobnicate"]).0, 2);
    assert_eq!(rapnc(&["solve", "/nonexistent/instance.json"]).0, 2);
    let dir = tempfile::tempdir().unwrap();
    let p = file(dir.path(), "junk.json", "{\"n\": 2");
    assert_eq!(rapnc(&["solve", p.to_str().unwrap()]).0, 2);
    assert_eq!(rapnc(&["--help"]).0, 0);
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let (code, _, _) = rapnc(&["gen", "--n", "100", "--m", "100", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert_eq!(code, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn oracle_agrees_with_solve() {
    let dir = tempfile::tempdir().unwrap();
    let p = file(dir.path(), "q.json", QUADRATIC);
    let (code, out, _) = rapnc(&["oracle", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc: SolutionDoc = serde_json::from_str(&out).unwrap();
    assert_eq!(doc.objective, 10.0);
}

#[test]
fn lot_sizing_reduction_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let src = file(
        dir.path(),
        "ls.json",
        r#"{"demand":[1,1],"initial_inventory":0,"inventory_cap":[1,1],"production_cap":[2,2],
            "production_cost":{"kind":"linear","params":{"p":[1,3]}},"holding_cost":[0.5,0.5]}"#,
    );
    let out_path = dir.path().join("inst.json");
    let (code, _, err) = rapnc(&["reduce", "--kind", "lotsizing", "--in", src.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&out_path).unwrap();
    let doc: rapnc::model::io::InstanceDoc = serde_json::from_str(&text).unwrap();
    let offset = doc.value_offset.expect("offset written").0;
    let (code, out, err) = rapnc(&["solve", out_path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let sol: SolutionDoc = serde_json::from_str(&out).unwrap();
    // Produce both units in period one at cost 1 each and hold one unit at 0.5.
    assert!((sol.objective + offset - 2.5).abs() < 1e-6, "{} + {offset}", sol.objective);
}

#[test]
fn speed_reduction_solves() {
    let dir = tempfile::tempdir().unwrap();
    let src = file(
        dir.path(),
        "voyage.json",
        r#"{"legs":[10,10],"windows":[[0,0],[0,4],[4,4]],"v_max":10,
            "fuel":[{"kind":"power","k":1,"exponent":3},{"kind":"power","k":1,"exponent":3}]}"#,
    );
    let out_path = dir.path().join("inst.json");
    let (code, _, err) = rapnc(&["reduce", "--kind", "speed", "--in", src.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (code, out, err) = rapnc(&["solve", out_path.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let sol: SolutionDoc = serde_json::from_str(&out).unwrap();
    // Both legs take two hours.
    assert!((sol.x[1] - 2.0).abs() < 1e-4 && (sol.x[2] - 2.0).abs() < 1e-4, "{:?}", sol.x);
}

#[test]
fn bench_writes_stable_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let (code, _, err) = rapnc(&["bench", "--sizes", "100,200", "--families", "linear,quadratic", "--repeats", "1", "--min-time", "0", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&csv).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("n,m,family,seed,mode,time_seconds"), "{header}");
    assert_eq!(text.lines().count(), 5);
}

#[test]
fn svorex_train_then_predict() {
    let dir = tempfile::tempdir().unwrap();
    let ds = rapnc::svorex::synthetic(40, 2, 3, 0.2, 5).unwrap();
    let data = file(dir.path(), "train.txt", &ds.to_text());
    let model = dir.path().join("model.json");
    let (code, _, err) = rapnc(&["svorex-train", "--data", data.to_str().unwrap(), "--out", model.to_str().unwrap(), "--n-ws", "4"]);
    assert_eq!(code, 0, "{err}");
    let (code, out, err) = rapnc(&["svorex-predict", "--model", model.to_str().unwrap(), "--train", data.to_str().unwrap(), "--data", data.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let predicted: Vec<usize> = out.lines().map(|l| l.parse().unwrap()).collect();
    assert_eq!(predicted.len(), 40);
    let correct = predicted.iter().zip(&ds.labels).filter(|(p, l)| p == l).count();
    assert!(correct >= 30, "{correct}/40");
}
