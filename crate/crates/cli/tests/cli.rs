use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn emosel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emosel"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("run emosel")
}

const SPEC: &str = r#"
seed = 5
rows = 80
shared_informative = 4
corpus_specific_informative = 2
noise = 4
separation = 3.0
speakers = 8

[[corpora]]
id = "alpha"
labels = ["happy", "sad", "anger", "neutral"]

[[corpora]]
id = "beta"
labels = ["happy", "sad", "anger", "neutral", "fear"]

[[corpora]]
id = "gamma"
labels = ["yes", "no"]
role = "independent"
"#;

fn shrink_plan(plan: &Path) {
    let text = fs::read_to_string(plan).unwrap();
    let text = text
        .replace("runs = 50", "runs = 4")
        .replace("population = 50", "population = 10")
        .replace("generations = 40", "generations = 4")
        .replace("c_values = [0.1, 1.0, 10.0, 100.0]", "c_values = [1.0]")
        .replace("gamma_factors = [0.1, 1.0, 10.0]", "gamma_factors = [1.0]")
        .replace("folds = 10", "folds = 4");
    fs::write(plan, text).unwrap();
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push((
                    path.strip_prefix(dir).unwrap().display().to_string(),
                    fs::read(&path).unwrap(),
                ));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn synth_then_pipeline_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    fs::write(&spec, SPEC).unwrap();
    let data = dir.path().join("data");
    let out = emosel(&[
        "synth",
        "--spec",
        spec.to_str().unwrap(),
        "--out",
        data.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let plan = data.join("plan.toml");
    shrink_plan(&plan);

    let runs: Vec<_> = ["one", "two"]
        .iter()
        .map(|name| {
            let res = dir.path().join(name);
            let out = emosel(&[
                "--jobs",
                "2",
                "pipeline",
                "--plan",
                plan.to_str().unwrap(),
                "--out",
                res.to_str().unwrap(),
            ]);
            assert!(
                out.status.success(),
                "{}",
                String::from_utf8_lossy(&out.stderr)
            );
            res
        })
        .collect();
    let first = files(&runs[0]);
    assert!(first.iter().any(|(n, _)| n == "report.md"));
    assert!(first.iter().any(|(n, _)| n == "chosen_subset.txt"));
    assert!(first
        .iter()
        .any(|(n, _)| n.starts_with("subsets") && n.ends_with("ffs.txt")));
    assert_eq!(first, files(&runs[1]));

    let csv = runs[0].join("report.csv");
    let rendered = emosel(&["report", "--csv", csv.to_str().unwrap()]);
    assert!(rendered.status.success());
    let md = String::from_utf8(rendered.stdout).unwrap();
    assert!(md.contains("Recognition rate [mean (std)], KNN"));
    assert!(md.contains("gamma"));

    let picked = emosel(&[
        "select",
        "--plan",
        plan.to_str().unwrap(),
        "--corpus",
        "alpha",
        "--selector",
        "boost",
    ]);
    assert!(
        picked.status.success(),
        "{}",
        String::from_utf8_lossy(&picked.stderr)
    );
    assert!(String::from_utf8(picked.stdout)
        .unwrap()
        .contains("# selector=BOOST"));
}

#[test]
fn exit_codes() {
    assert_eq!(emosel(&[]).status.code(), Some(2));
    assert_eq!(emosel(&["pipeline", "--plan"]).status.code(), Some(2));
    assert_eq!(emosel(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(emosel(&["--help"]).status.code(), Some(0));

    let missing = emosel(&[
        "pipeline",
        "--plan",
        "/nonexistent/plan.toml",
        "--out",
        "/tmp/never",
    ]);
    assert_eq!(missing.status.code(), Some(1));
    let err = String::from_utf8(missing.stderr).unwrap();
    assert!(err.contains("plan"), "{err}");
}

#[test]
fn compare_published_list() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.txt");
    fs::write(&path, "loudness: 25 percentile\nloudness: 50 percentile\n").unwrap();
    let out = emosel(&["compare", "--subset", path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("| Total | 2 | 2/161 |"));
}
