use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use focalsphere_cli::RunManifest;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_focalsphere"));
    c.env("RUST_LOG", "warn");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn grid_layout(dir: &Path, name: &str) -> PathBuf {
    let out = dir.join(name);
    ok(&["layout", "--generate", "grid:6,6", "--steps", "60", "--seed", "7", "--out", p(&out)]);
    out
}

#[test]
fn layout_writes_rows_sidecar_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ws.tsv");
    ok(&["layout", "--generate", "ws:1000,4,0.02", "--steps", "250", "--out", p(&out)]);
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 1000);
    assert_eq!(text.lines().next().unwrap().split('\t').count(), 4);
    let side: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("ws.tsv.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["steps"], 250);
    let m = RunManifest::read(&dir.path().join("ws.tsv.manifest.json")).unwrap();
    assert_eq!(m.command, "layout");
    assert!(m.timings.contains_key("layout"));
    assert_eq!(m.outputs[0].role, "embedding");
}

#[test]
fn layout_twice_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("grid.tsv");
    let edges: String = (0..5)
        .flat_map(|r| (0..5).map(move |c| (r, c)))
        .flat_map(|(r, c)| {
            let id = r * 5 + c;
            let mut v = Vec::new();
            if c + 1 < 5 {
                v.push(format!("n{id}\tn{}\n", id + 1));
            }
            if r + 1 < 5 {
                v.push(format!("n{id}\tn{}\n", id + 5));
            }
            v
        })
        .collect();
    std::fs::write(&graph, edges).unwrap();
    let a = dir.path().join("a.tsv");
    let b = dir.path().join("b.tsv");
    for out in [&a, &b] {
        ok(&["layout", "--input", p(&graph), "--steps", "500", "--seed", "7", "--out", p(out)]);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let ma = RunManifest::read(&dir.path().join("a.tsv.manifest.json")).unwrap();
    assert_eq!(ma.inputs[0].role, "graph");
}

#[test]
fn empty_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.tsv");
    std::fs::write(&empty, "# nothing\n").unwrap();
    let out = run(&["layout", "--input", p(&empty), "--out", p(&dir.path().join("x.tsv"))]);
    assert_eq!(out.status.code(), Some(3));
    let missing = run(&["layout", "--input", "/no/such/file.tsv", "--out", "x.tsv"]);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn argument_errors_exit_2() {
    let out = run(&["layout", "--generate", "ws:10", "--out", "x.tsv"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["layout", "--generate", "grid:3,3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["layout", "--steps", "many"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn focal_images_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let emb = grid_layout(dir.path(), "g.tsv");
    let focal = |alpha: &str, out: &Path| {
        run(&[
            "focal", "--generate", "grid:6,6", "--embedding", p(&emb), "--focal", "14",
            "--alpha", alpha, "--width", "128", "--out", p(out),
        ])
    };
    let a0 = dir.path().join("a0.png");
    let a1 = dir.path().join("a1.png");
    assert!(focal("0", &a0).status.success());
    assert!(focal("1", &a1).status.success());
    let (i0, i1) = (std::fs::read(&a0).unwrap(), std::fs::read(&a1).unwrap());
    assert_ne!(i0, i1);

    let dec = png::Decoder::new(i1.as_slice());
    let mut r = dec.read_info().unwrap();
    let mut buf = vec![0; r.output_buffer_size()];
    r.next_frame(&mut buf).unwrap();
    assert!(buf[(64 * 128 + 64) * 4 + 3] > 0, "focal pixel not at the center");

    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("a1.png.json")).unwrap()).unwrap();
    assert_eq!(meta["focal_label"], "14");
    assert_eq!(meta["overlay"], "distance-bands");

    let bad = focal("2", &dir.path().join("bad.png"));
    assert_eq!(bad.status.code(), Some(2));

    let unknown = run(&[
        "focal", "--generate", "grid:6,6", "--embedding", p(&emb), "--focal", "140",
        "--out", p(&dir.path().join("u.png")),
    ]);
    assert_eq!(unknown.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&unknown.stderr);
    assert!(msg.contains("nearest matches") && msg.contains("14"), "{msg}");
}

#[test]
fn metrics_report_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let emb = grid_layout(dir.path(), "g.tsv");
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        ok(&["metrics", "--generate", "grid:6,6", "--embedding", p(&emb), "--seed", "3", "--out", p(out)]);
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let v: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert!(v["rho"].is_number() && v["norm_avg_edge_len"].is_number());
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"generate": "grid:5,5", "steps": 30, "seed": 4}"#).unwrap();
    let a = dir.path().join("a.tsv");
    ok(&["layout", "--config", p(&cfg), "--out", p(&a)]);
    let m = RunManifest::read(&dir.path().join("a.tsv.manifest.json")).unwrap();
    assert_eq!(m.config.steps, Some(30));
    assert_eq!(m.seed, 4);
    let b = dir.path().join("b.tsv");
    ok(&["layout", "--config", p(&cfg), "--seed", "5", "--out", p(&b)]);
    let m = RunManifest::read(&dir.path().join("b.tsv.manifest.json")).unwrap();
    assert_eq!(m.seed, 5);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn replay_reproduces_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let emb = grid_layout(dir.path(), "g.tsv");
    let img = dir.path().join("f.png");
    ok(&[
        "focal", "--generate", "grid:6,6", "--embedding", p(&emb), "--focal", "0",
        "--width", "64", "--out", p(&img),
    ]);
    for m in ["g.tsv.manifest.json", "f.png.manifest.json"] {
        let again = dir.path().join(format!("again-{m}"));
        let out = ok(&["replay", p(&dir.path().join(m)), "--out", p(&again)]);
        assert!(String::from_utf8_lossy(&out.stdout).contains("identical"));
    }
}

#[test]
fn hemispheres_cover_every_node() {
    let dir = tempfile::tempdir().unwrap();
    let emb = grid_layout(dir.path(), "g.tsv");
    let out = dir.path().join("h.png");
    ok(&["hemisphere", "--generate", "grid:6,6", "--embedding", p(&emb), "--width", "64", "--out", p(&out)]);
    assert!(dir.path().join("h.north.png").exists());
    assert!(dir.path().join("h.south.png").exists());
}

#[test]
fn bench_reports_machine() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bench.json");
    let o = ok(&[
        "bench", "--generate", "grid:8,8", "--thread-counts", "1,2", "--steps", "10",
        "--out", p(&out),
    ]);
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("speedup"), "{table}");
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert_eq!(v["rows"][0]["speedup"], 1.0);
    assert!(v["machine"]["available_parallelism"].as_u64().unwrap() >= 1);
}
