use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeListFormat {
    /// `src<TAB>dst[<TAB>timestamp]`, `#` comments.
    Tsv,
    /// Matrix Market coordinate format.
    MatrixMarket,
}

impl EdgeListFormat {
    /// Guesses the format from a file extension (`.mtx` → Matrix Market).
    pub fn from_path(path: &Path) -> EdgeListFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("mtx") | Some("mm") => EdgeListFormat::MatrixMarket,
            _ => EdgeListFormat::Tsv,
        }
    }
}

pub fn load_edge_list_path(path: &Path) -> Result<Graph> {
    let file = File::open(path)?;
    load_edge_list(BufReader::new(file), EdgeListFormat::from_path(path))
}

/// Reads a graph. Dense indices follow first appearance in the input (TSV)
/// or the 1-based matrix index (Matrix Market).
pub fn load_edge_list<R: BufRead>(reader: R, format: EdgeListFormat) -> Result<Graph> {
    match format {
        EdgeListFormat::Tsv => load_tsv(reader),
        EdgeListFormat::MatrixMarket => load_matrix_market(reader),
    }
}

fn load_tsv<R: BufRead>(reader: R) -> Result<Graph> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let mut times: Option<Vec<i64>> = None;
    let mut timed: Option<bool> = None;

    let mut intern = |label: &str, labels: &mut Vec<String>| -> usize {
        if let Some(&i) = index.get(label) {
            return i;
        }
        let i = labels.len();
        index.insert(label.to_owned(), i);
        labels.push(label.to_owned());
        i
    };

    for (lineno, line) in reader.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(['\t', ' ']).filter(|f| !f.is_empty()).collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::parse(
                lineno,
                format!("expected 2 or 3 fields, found {}", fields.len()),
            ));
        }
        let has_time = fields.len() == 3;
        match timed {
            None => timed = Some(has_time),
            Some(t) if t != has_time => {
                return Err(Error::parse(
                    lineno,
                    "timestamp column present on some lines but not others",
                ))
            }
            _ => {}
        }
        let a = intern(fields[0], &mut labels);
        let b = intern(fields[1], &mut labels);
        if has_time {
            let t: i64 = fields[2].parse().map_err(|_| {
                Error::parse(lineno, format!("invalid integer timestamp {:?}", fields[2]))
            })?;
            let times = times.get_or_insert_with(Vec::new);
            times.resize(labels.len(), i64::MAX);
            times[a] = times[a].min(t);
            times[b] = times[b].min(t);
        }
        edges.push((a, b));
    }

    if labels.is_empty() {
        return Err(Error::EmptyGraph);
    }
    let mut g = Graph::from_edges(labels.len(), edges).with_labels(labels);
    if let Some(t) = times {
        g = g.with_node_times(t);
    }
    Ok(g)
}

fn load_matrix_market<R: BufRead>(reader: R) -> Result<Graph> {
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::EmptyGraph)?;
    let header = header?;
    let tokens: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if tokens.len() < 4 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(Error::parse(1, "missing %%MatrixMarket matrix header"));
    }
    if tokens[2] != "coordinate" {
        return Err(Error::parse(1, "only coordinate format is supported"));
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::parse(lineno, format!("invalid index {s:?}")))
        };
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(Error::parse(
                        lineno,
                        "expected `rows cols entries` size line",
                    ));
                }
                size = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
            }
            Some((rows, cols, _)) => {
                if fields.len() < 2 {
                    return Err(Error::parse(lineno, "expected `row col [value]`"));
                }
                let (i, j) = (parse(fields[0])?, parse(fields[1])?);
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(Error::parse(
                        lineno,
                        format!("entry ({i}, {j}) out of range"),
                    ));
                }
                edges.push((i - 1, j - 1));
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or(Error::EmptyGraph)?;
    if edges.len() != nnz {
        return Err(Error::parse(
            0,
            format!("header declares {nnz} entries, found {}", edges.len()),
        ));
    }
    let n = rows.max(cols);
    if n == 0 {
        return Err(Error::EmptyGraph);
    }
    let labels = (1..=n).map(|i| i.to_string()).collect();
    Ok(Graph::from_edges(n, edges).with_labels(labels))
}
