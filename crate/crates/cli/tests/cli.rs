use std::path::PathBuf;
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn abcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_abcs")).args(args).output().unwrap()
}

fn graph_args(stem: &str) -> Vec<String> {
    let f = fixtures();
    vec![
        "--graph".into(),
        f.join(format!("{stem}.edges")).display().to_string(),
        "--attrs-u".into(),
        f.join(format!("{stem}.attrs_u")).display().to_string(),
        "--attrs-v".into(),
        f.join(format!("{stem}.attrs_v")).display().to_string(),
    ]
}

fn query(stem: &str, extra: &[&str]) -> Output {
    let mut args: Vec<String> = vec!["query".into()];
    args.extend(graph_args(stem));
    args.extend(extra.iter().map(|s| s.to_string()));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    abcs(&refs)
}

#[test]
fn southern_women_case_study() {
    let out = query("southern_women", &["--q", "A", "--alpha", "2", "--beta", "2", "--keywords", "environmental"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"][0]["vertices_u"], serde_json::json!(["A", "B"]));
    assert_eq!(v["results"][0]["vertices_v"], serde_json::json!(["w", "x"]));
}

#[test]
fn json_is_byte_identical_across_runs_and_algorithms() {
    let run = |algo: &str| {
        let out = query("toy", &["--q", "A", "--alpha", "2", "--beta", "2", "--keywords", "all", "--algo", algo, "--no-timing"]);
        assert!(out.status.success());
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        (out.stdout, v["results"].to_string())
    };
    let (a, ra) = run("dec");
    let (b, _) = run("dec");
    assert_eq!(a, b);
    for algo in ["basic", "basic+", "inc", "oracle"] {
        assert_eq!(run(algo).1, ra, "{algo}");
    }
}

#[test]
fn tsv_output() {
    let out = query("toy", &["--q", "A", "--alpha", "2", "--beta", "2", "--keywords", "a,b,c", "--output", "tsv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "keywords_u\tkeywords_v\tvertices_u\tvertices_v\tsize\nb,c\tx,y\tA,C,D\tG,H,I\t4\n");
}

#[test]
fn empty_result_exits_zero() {
    let out = query("toy", &["--q", "J", "--alpha", "2", "--beta", "2", "--keywords", "a"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["results"], serde_json::json!([]));
}

#[test]
fn input_errors_exit_two() {
    // unknown vertex
    let out = query("toy", &["--q", "Z", "--alpha", "2", "--beta", "2", "--keywords", "a"]);
    assert_eq!(out.status.code(), Some(2));
    // keyword not held by q
    let out = query("toy", &["--q", "E", "--alpha", "2", "--beta", "2", "--keywords", "a"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not held"));
    // unparseable edge list
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.edges");
    std::fs::write(&bad, "1 1\nnonsense\n").unwrap();
    let out = abcs(&["query", "--graph", bad.to_str().unwrap(), "--q", "1", "--alpha", "1", "--beta", "1", "--keywords", "all"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn all_keywords_of_bare_vertex_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("g.edges");
    std::fs::write(&e, "1 1\n").unwrap();
    let out = abcs(&["query", "--graph", e.to_str().unwrap(), "--q", "1", "--alpha", "1", "--beta", "1", "--keywords", "all"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("empty"));
}

#[test]
fn core_components() {
    let mut args: Vec<String> = vec!["core".into()];
    args.extend(graph_args("toy"));
    args.extend(["--alpha", "1", "--beta", "1"].map(String::from));
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = abcs(&refs);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("components: 2\n"), "{text}");
    assert!(text.contains("5 upper, 4 lower"));

    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("g.edges");
    std::fs::write(&e, "% nothing\n").unwrap();
    let out = abcs(&["core", "--graph", e.to_str().unwrap(), "--alpha", "1", "--beta", "1"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "components: 0\n");
}

#[test]
fn gen_attrs_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let e = fixtures().join("southern_women.edges");
    let gen = |tag: &str, seed: &str| {
        let u = dir.path().join(format!("{tag}.u"));
        let v = dir.path().join(format!("{tag}.v"));
        let out = abcs(&[
            "gen-attrs", "--graph", e.to_str().unwrap(), "--seed", seed, "--out-u", u.to_str().unwrap(), "--out-v", v.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        (std::fs::read_to_string(u).unwrap(), std::fs::read_to_string(v).unwrap())
    };
    assert_eq!(gen("a", "5"), gen("b", "5"));
    assert_ne!(gen("a", "5"), gen("c", "6"));
    let (u, _) = gen("d", "1");
    assert_eq!(u.lines().count(), 18);
    let out = abcs(&["gen-attrs", "--graph", e.to_str().unwrap(), "--min", "9", "--max", "3", "--out-u", "/dev/null", "--out-v", "/dev/null"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_writes_one_row_per_query_and_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixtures();
    let plan = dir.path().join("plan.toml");
    std::fs::write(
        &plan,
        format!(
            r#"alpha_range = [2]
beta_range = [2]
base_alpha = 2
base_beta = 2
vertex_fractions = [1.0]
keyword_fractions = [1.0]
s_fractions = [1.0]
queries_per_cell = 1
algorithms = ["oracle"]
seed = 3

[[datasets]]
name = "toy"
edges = "{}"
attrs_u = "{}"
attrs_v = "{}"

[[datasets]]
name = "missing"
edges = "does-not-exist.edges"
"#,
            f.join("toy.edges").display(),
            f.join("toy.attrs_u").display(),
            f.join("toy.attrs_v").display()
        ),
    )
    .unwrap();
    let out_csv = dir.path().join("rows.csv");
    let sum_csv = dir.path().join("sum.csv");
    let out = abcs(&["bench", "--plan", plan.to_str().unwrap(), "--out", out_csv.to_str().unwrap(), "--summary", sum_csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
    let rows = std::fs::read_to_string(out_csv).unwrap();
    assert_eq!(rows.lines().count(), 2, "{rows}");
    assert!(rows.starts_with("dataset,algorithm,alpha,beta,vfrac,kfrac,sfrac,query,elapsed_ms,result_size,generated,verified,timeout\n"));
    assert_eq!(std::fs::read_to_string(sum_csv).unwrap().lines().count(), 2);
}
