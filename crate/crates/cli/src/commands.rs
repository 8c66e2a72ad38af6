//! Batch commands. Each writes its outputs plus a run manifest.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use focalsphere_core::focal::{fit_dmax_from, fit_dmax_global, DEFAULT_ALPHA};
use focalsphere_core::graph::bfs_distances;
use focalsphere_core::layout::{run_layout, write_embedding_tsv, EmbeddingSidecar};
use focalsphere_core::metrics::quality_report;
use focalsphere_core::render::{
    draw_edges, hemisphere_density, rasterize, view_from_distances, ViewMeta, FOCAL_STAMP,
    HEMISPHERE_STAMP,
};
use focalsphere_core::{FocalParams, Graph, OverlayMode, OverlaySpec, QualityReport, UnitVec3};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::input::{
    load_category_table, load_embedding, load_event_table, load_graph, resolve_label,
};
use crate::manifest::{sibling, RunManifest};
use crate::settings::Settings;

pub const DEFAULT_WIDTH: u32 = 1024;
pub const BENCH_STEPS: usize = 100;

fn secs(t: Instant) -> f64 {
    t.elapsed().as_secs_f64()
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Positions from `--embedding`.
fn embedding_positions(s: &Settings, graph: &Graph) -> CliResult<Vec<UnitVec3>> {
    let path = s
        .embedding
        .as_deref()
        .ok_or_else(|| CliError::arg("--embedding is required"))?;
    Ok(load_embedding(path, graph)?.positions)
}

/// Overlay tables named in the settings.
pub struct Overlays {
    pub events: Option<Vec<Option<f64>>>,
    pub categories: Option<Vec<Option<u8>>>,
}

impl Overlays {
    pub fn load(s: &Settings, graph: &Graph) -> CliResult<Overlays> {
        Ok(Overlays {
            events: s.events.as_deref().map(|p| load_event_table(p, graph)).transpose()?,
            categories: s
                .categories
                .as_deref()
                .map(|p| load_category_table(p, graph))
                .transpose()?,
        })
    }

    /// Event time if events were given, else category, else distance bands.
    pub fn default_mode(&self) -> OverlayMode {
        if self.events.is_some() {
            OverlayMode::EventTime
        } else if self.categories.is_some() {
            OverlayMode::Category
        } else {
            OverlayMode::DistanceBands
        }
    }

    pub fn spec(&self, mode: OverlayMode, window: [f64; 2]) -> OverlaySpec<'_> {
        OverlaySpec {
            mode,
            categories: self.categories.as_deref(),
            event_times: self.events.as_deref(),
            window,
        }
    }
}

pub fn cmd_layout(s: &Settings) -> CliResult<RunManifest> {
    let out = s.required_out()?;
    let t = Instant::now();
    let graph = load_graph(s)?;
    let mut m = RunManifest::new("layout", s, graph.content_hash());
    m.record_inputs()?;
    m.time("load", secs(t));

    let config = s.layout_config(graph.node_count());
    let t = Instant::now();
    let embedding = run_layout(&graph, &config)?;
    m.time("layout", secs(t));

    let t = Instant::now();
    let mut w = create(out)?;
    write_embedding_tsv(&mut w, &graph, &embedding)?;
    w.flush()?;
    let side = sibling(out, "json");
    write_file(&side, &serde_json::to_vec_pretty(&EmbeddingSidecar::of(&embedding))?)?;
    m.time("write", secs(t));
    m.output("embedding", out, true)?;
    m.output("sidecar", &side, false)?;
    m.write(out)?;
    log::info!(
        "layout: {} nodes, {} edges, {} steps in {:.2} s",
        graph.node_count(),
        graph.edge_count(),
        config.steps,
        m.timings["layout"]
    );
    Ok(m)
}

/// d_max from `--d-max`, a per-focal refit, or the global fit.
pub fn choose_dmax(
    s: &Settings,
    graph: &Graph,
    positions: &[UnitVec3],
    dist: &focalsphere_core::DistanceField,
) -> CliResult<f64> {
    if let Some(d) = s.d_max {
        return Ok(d);
    }
    if s.refit.unwrap_or(false) {
        return Ok(fit_dmax_from(positions, dist)?);
    }
    Ok(fit_dmax_global(graph, positions, s.seed())?)
}

pub fn cmd_focal(s: &Settings) -> CliResult<RunManifest> {
    let out = s.required_out()?;
    let alpha = s.alpha.unwrap_or(DEFAULT_ALPHA);
    if !(0.0..=1.0).contains(&alpha) {
        return Err(CliError::arg(format!("alpha {alpha} outside [0, 1]")));
    }
    let label = s
        .focal
        .as_deref()
        .ok_or_else(|| CliError::arg("--focal LABEL is required"))?;
    let width = s.width.unwrap_or(DEFAULT_WIDTH);
    let stamp = s.stamp.unwrap_or(FOCAL_STAMP);

    let t = Instant::now();
    let graph = load_graph(s)?;
    let focal = resolve_label(&graph, label)?;
    let positions = embedding_positions(s, &graph)?;
    let overlays = Overlays::load(s, &graph)?;
    let mut m = RunManifest::new("focal", s, graph.content_hash());
    m.record_inputs()?;
    m.time("load", secs(t));

    let t = Instant::now();
    let dist = bfs_distances(&graph, focal)?;
    m.time("bfs", secs(t));
    let t = Instant::now();
    let d_max = choose_dmax(s, &graph, &positions, &dist)?;
    m.time("fit", secs(t));

    let params = FocalParams { focal, alpha, d_max };
    params.validate()?;
    let mode = s.overlay.unwrap_or_else(|| overlays.default_mode());
    let spec = overlays.spec(mode, s.window());
    let t = Instant::now();
    let view = view_from_distances(&positions, dist, &params)?;
    let mut raster = rasterize(&view, &spec, width, stamp)?;
    if s.edges.unwrap_or(false) {
        draw_edges(&mut raster, &view, &graph)?;
    }
    m.time("render", secs(t));
    let t = Instant::now();
    let png = raster.encode_png()?;
    m.time("encode", secs(t));
    write_file(out, &png)?;

    let meta = ViewMeta {
        focal_label: label.to_owned(),
        alpha,
        d_max,
        width,
        stamp,
        overlay: mode,
        colormap: mode.colormap_id().map(str::to_owned),
        antipode_clamped: view.antipode_clamped,
    };
    let meta_path = sibling(out, "json");
    write_file(&meta_path, &serde_json::to_vec_pretty(&meta)?)?;
    m.output("image", out, true)?;
    m.output("view-meta", &meta_path, true)?;
    m.write(out)?;
    Ok(m)
}

pub fn cmd_metrics(s: &Settings) -> CliResult<(QualityReport, RunManifest)> {
    let out = s.required_out()?;
    let t = Instant::now();
    let graph = load_graph(s)?;
    let positions = embedding_positions(s, &graph)?;
    let mut m = RunManifest::new("metrics", s, graph.content_hash());
    m.record_inputs()?;
    m.time("load", secs(t));
    let t = Instant::now();
    let report = quality_report(&graph, &positions, s.seed())?;
    m.time("metrics", secs(t));
    write_file(out, &serde_json::to_vec_pretty(&report)?)?;
    m.output("report", out, true)?;
    m.write(out)?;
    Ok((report, m))
}

pub fn cmd_hemisphere(s: &Settings) -> CliResult<RunManifest> {
    let out = s.required_out()?;
    let width = s.width.unwrap_or(DEFAULT_WIDTH);
    let stamp = s.stamp.unwrap_or(HEMISPHERE_STAMP);
    let t = Instant::now();
    let graph = load_graph(s)?;
    let positions = embedding_positions(s, &graph)?;
    let overlays = Overlays::load(s, &graph)?;
    let mut m = RunManifest::new("hemisphere", s, graph.content_hash());
    m.record_inputs()?;
    m.time("load", secs(t));

    let mode = match s.overlay {
        Some(OverlayMode::DistanceBands) => {
            return Err(CliError::arg("distance bands need a focal node; use `focal`"))
        }
        Some(mode) => mode,
        None if overlays.events.is_some() || overlays.categories.is_some() => {
            overlays.default_mode()
        }
        None => OverlayMode::None,
    };
    let spec = overlays.spec(mode, s.window());
    let t = Instant::now();
    let (north, south) = hemisphere_density(&positions, &spec, width, stamp)?;
    m.time("render", secs(t));
    for (name, r) in [("north", north), ("south", south)] {
        let path = hemisphere_path(out, name);
        write_file(&path, &r.encode_png()?)?;
        m.output(name, &path, true)?;
    }
    m.write(out)?;
    Ok(m)
}

/// `map.png` → `map.north.png`
pub fn hemisphere_path(out: &Path, name: &str) -> PathBuf {
    match out.extension().and_then(|e| e.to_str()) {
        Some(ext) => out.with_extension(format!("{name}.{ext}")),
        None => sibling(out, &format!("{name}.png")),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchRow {
    pub threads: usize,
    pub seconds: f64,
    pub speedup: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Machine {
    pub os: String,
    pub arch: String,
    pub available_parallelism: usize,
    pub cpu_model: Option<String>,
}

impl Machine {
    pub fn current() -> Machine {
        let cpu_model = std::fs::read_to_string("/proc/cpuinfo").ok().and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_owned())
        });
        Machine {
            os: std::env::consts::OS.to_owned(),
            arch: std::env::consts::ARCH.to_owned(),
            available_parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            cpu_model,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub nodes: usize,
    pub edges: usize,
    pub steps: usize,
    pub rows: Vec<BenchRow>,
    /// Wall time never increased with more threads.
    pub monotone: bool,
    pub machine: Machine,
}

impl BenchReport {
    pub fn table(&self) -> String {
        let mut s = format!(
            "{} nodes, {} edges, {} steps; {} cpus ({})\n",
            self.nodes,
            self.edges,
            self.steps,
            self.machine.available_parallelism,
            self.machine.cpu_model.as_deref().unwrap_or("unknown cpu")
        );
        s.push_str("threads  seconds  speedup\n");
        for r in &self.rows {
            s.push_str(&format!("{:>7}  {:>7.3}  {:>6.2}x\n", r.threads, r.seconds, r.speedup));
        }
        if !self.monotone {
            s.push_str("note: wall time increased with more threads\n");
        }
        s
    }
}

/// Times `steps` layout steps for each thread count.
pub fn cmd_bench(s: &Settings) -> CliResult<(BenchReport, Option<RunManifest>)> {
    let graph = load_graph(s)?;
    let counts = s.thread_counts.clone().unwrap_or_else(|| vec![1, 2, 4]);
    if counts.is_empty() || counts.contains(&0) {
        return Err(CliError::arg("thread counts must be >= 1"));
    }
    let steps = s.steps.unwrap_or(BENCH_STEPS);
    let mut rows: Vec<BenchRow> = Vec::new();
    for &threads in &counts {
        let mut config = s.layout_config(graph.node_count());
        config.steps = steps;
        config.threads = threads;
        let t = Instant::now();
        run_layout(&graph, &config)?;
        let seconds = secs(t);
        let base = rows.first().map_or(seconds, |r| r.seconds);
        rows.push(BenchRow {
            threads,
            seconds,
            speedup: base / seconds,
        });
    }
    let mut sorted = rows.clone();
    sorted.sort_by_key(|r| r.threads);
    let monotone = sorted.windows(2).all(|w| w[1].seconds <= w[0].seconds);
    let report = BenchReport {
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        steps,
        rows,
        monotone,
        machine: Machine::current(),
    };
    let manifest = match s.out.as_deref() {
        Some(out) => {
            let mut m = RunManifest::new("bench", s, graph.content_hash());
            m.record_inputs()?;
            for r in &report.rows {
                m.time(&format!("threads-{}", r.threads), r.seconds);
            }
            write_file(out, &serde_json::to_vec_pretty(&report)?)?;
            m.output("report", out, false)?;
            m.write(out)?;
            Some(m)
        }
        None => None,
    };
    Ok((report, manifest))
}

#[derive(Clone, Debug, Serialize)]
pub struct ReplayReport {
    pub checked: Vec<(String, bool)>,
}

/// Re-runs a manifest at threads=1 and compares every deterministic
/// output with the recorded hash. `out` redirects the primary output.
pub fn cmd_replay(manifest: &Path, out: Option<PathBuf>) -> CliResult<ReplayReport> {
    let old = RunManifest::read(manifest)?;
    let mut s = old.config.clone();
    s.threads = Some(1);
    for input in &old.inputs {
        let now = crate::manifest::sha256_file(&input.path)?;
        if now != input.sha256 {
            return Err(CliError::Mismatch(format!(
                "input {} changed since the recorded run",
                input.path.display()
            )));
        }
    }
    if let Some(o) = out {
        s.out = Some(o);
    }
    let new = match old.command.as_str() {
        "layout" => cmd_layout(&s)?,
        "focal" => cmd_focal(&s)?,
        "metrics" => cmd_metrics(&s)?.1,
        "hemisphere" => cmd_hemisphere(&s)?,
        other => return Err(CliError::arg(format!("cannot replay {other:?} runs"))),
    };
    let mut checked = Vec::new();
    for rec in old.outputs.iter().filter(|r| r.deterministic) {
        let same = new
            .outputs
            .iter()
            .find(|r| r.role == rec.role)
            .is_some_and(|r| r.sha256 == rec.sha256);
        checked.push((rec.role.clone(), same));
    }
    if let Some((role, _)) = checked.iter().find(|c| !c.1) {
        return Err(CliError::Mismatch(format!("output {role} differs")));
    }
    Ok(ReplayReport { checked })
}
