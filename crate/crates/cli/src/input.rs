//! Graph sources, embeddings, overlay tables and label lookup.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use focalsphere_core::graph::{generate_grid, generate_watts_strogatz, load_edge_list_path};
use focalsphere_core::layout::read_embedding_tsv;
use focalsphere_core::render::{load_categories, load_events};
use focalsphere_core::{Embedding, Graph};

use crate::error::{CliError, CliResult};
use crate::settings::Settings;

/// Parsed `--generate` shorthand.
#[derive(Clone, Debug, PartialEq)]
pub enum Generator {
    WattsStrogatz { n: usize, k: usize, p: f64, seed: u64 },
    Grid { w: usize, h: usize },
}

impl std::str::FromStr for Generator {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Generator> {
        let bad = || CliError::arg(format!("bad generator {s:?}; expected ws:n,k,p[,seed] or grid:w,h"));
        let (kind, rest) = s.split_once(':').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
        match (kind, parts.as_slice()) {
            ("ws", [n, k, p]) | ("ws", [n, k, p, _]) => Ok(Generator::WattsStrogatz {
                n: n.parse().map_err(|_| bad())?,
                k: k.parse().map_err(|_| bad())?,
                p: p.parse().map_err(|_| bad())?,
                seed: match parts.get(3) {
                    Some(v) => v.parse().map_err(|_| bad())?,
                    None => 0,
                },
            }),
            ("grid", [w, h]) => Ok(Generator::Grid {
                w: w.parse().map_err(|_| bad())?,
                h: h.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl Generator {
    pub fn build(&self) -> CliResult<Graph> {
        Ok(match *self {
            Generator::WattsStrogatz { n, k, p, seed } => generate_watts_strogatz(n, k, p, seed)?,
            Generator::Grid { w, h } => generate_grid(w, h)?,
        })
    }
}

pub fn load_graph(s: &Settings) -> CliResult<Graph> {
    match (&s.input, &s.generate) {
        (Some(path), None) => {
            let g = load_edge_list_path(path)
                .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            if g.node_count() == 0 {
                return Err(CliError::input(format!("{}: graph is empty", path.display())));
            }
            Ok(g)
        }
        (None, Some(spec)) => spec.parse::<Generator>()?.build(),
        (Some(_), Some(_)) => Err(CliError::arg("give either --input or --generate, not both")),
        (None, None) => Err(CliError::arg("a graph is required: --input FILE or --generate SPEC")),
    }
}

pub fn load_embedding(path: &Path, graph: &Graph) -> CliResult<Embedding> {
    let f = File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    read_embedding_tsv(BufReader::new(f), graph)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

pub fn load_event_table(path: &Path, graph: &Graph) -> CliResult<Vec<Option<f64>>> {
    let f = File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let t = load_events(BufReader::new(f), graph)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if t.unknown_labels > 0 {
        log::warn!("{}: skipped {} rows with unknown labels", path.display(), t.unknown_labels);
    }
    Ok(t.values)
}

pub fn load_category_table(path: &Path, graph: &Graph) -> CliResult<Vec<Option<u8>>> {
    let f = File::open(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let t = load_categories(BufReader::new(f), graph)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    if t.unknown_labels > 0 {
        log::warn!("{}: skipped {} rows with unknown labels", path.display(), t.unknown_labels);
    }
    Ok(t.values)
}

/// Up to `k` labels closest to `query`, best first.
pub fn nearest_labels(graph: &Graph, query: &str, k: usize) -> Vec<String> {
    let q = query.to_lowercase();
    let mut scored: Vec<(f64, String)> = (0..graph.node_count())
        .map(|i| {
            let l = graph.label(i);
            (strsim::jaro_winkler(&q, &l.to_lowercase()), l.into_owned())
        })
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    scored.into_iter().take(k).map(|(_, l)| l).collect()
}

/// Dense index of a node label, or an argument error naming close matches.
pub fn resolve_label(graph: &Graph, label: &str) -> CliResult<usize> {
    if let Some(i) = (0..graph.node_count()).find(|&i| graph.label(i) == label) {
        return Ok(i);
    }
    let near = nearest_labels(graph, label, 5);
    Err(CliError::arg(format!(
        "unknown node label {label:?}; nearest matches: {}",
        near.join(", ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_specs() {
        assert_eq!(
            "ws:1000,4,0.02".parse::<Generator>().unwrap(),
            Generator::WattsStrogatz { n: 1000, k: 4, p: 0.02, seed: 0 }
        );
        assert_eq!(
            "ws:15,4,0.1,3".parse::<Generator>().unwrap(),
            Generator::WattsStrogatz { n: 15, k: 4, p: 0.1, seed: 3 }
        );
        assert_eq!("grid:10,10".parse::<Generator>().unwrap(), Generator::Grid { w: 10, h: 10 });
        for bad in ["ws:10,4", "grid:3", "er:10,0.1", "grid:a,b", "ws"] {
            assert_eq!(bad.parse::<Generator>().unwrap_err().exit_code(), 2, "{bad}");
        }
    }

    #[test]
    fn unknown_label_lists_matches() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).with_labels(vec![
            "alice".into(),
            "bob".into(),
            "alicia".into(),
        ]);
        assert_eq!(resolve_label(&g, "bob").unwrap(), 1);
        let msg = resolve_label(&g, "alise").unwrap_err().to_string();
        assert!(msg.contains("alice") && msg.contains("alicia"), "{msg}");
    }
}
