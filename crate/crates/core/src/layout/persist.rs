//! Embedding files: `label<TAB>x1<TAB>x2<TAB>x3` rows with 9 significant
//! digits, plus a JSON sidecar with the layout configuration.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Embedding, LayoutConfig, Provenance};
use crate::error::{Error, Result};
use crate::geom::Vec3;
use crate::graph::Graph;

const SIGNIFICANT_DIGITS: usize = 9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingSidecar {
    pub config: LayoutConfig,
    pub graph_hash: String,
    pub nodes: usize,
    pub provenance: Provenance,
}

impl EmbeddingSidecar {
    pub fn of(embedding: &Embedding) -> EmbeddingSidecar {
        EmbeddingSidecar {
            config: embedding.config.clone(),
            graph_hash: embedding.provenance.graph_hash.clone(),
            nodes: embedding.len(),
            provenance: embedding.provenance.clone(),
        }
    }
}

/// `%.9g`-style formatting: shortest of fixed or scientific notation with
/// trailing zeros trimmed.
pub(crate) fn fmt_significant(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".to_owned();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (_, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_owned()
        } else {
            fixed
        }
    } else {
        sci
    }
}

pub fn write_embedding_tsv<W: Write>(mut w: W, graph: &Graph, embedding: &Embedding) -> Result<()> {
    if graph.node_count() != embedding.len() {
        return Err(Error::arg(format!(
            "embedding has {} rows but graph has {} nodes",
            embedding.len(),
            graph.node_count()
        )));
    }
    for (i, p) in embedding.positions.iter().enumerate() {
        let [x1, x2, x3] = p.coords();
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            graph.label(i),
            fmt_significant(x1, SIGNIFICANT_DIGITS),
            fmt_significant(x2, SIGNIFICANT_DIGITS),
            fmt_significant(x3, SIGNIFICANT_DIGITS)
        )?;
    }
    Ok(())
}

/// Reads an embedding for `graph`, joining rows on node labels. Every node
/// must appear exactly once; coordinates are renormalized.
pub fn read_embedding_tsv<R: BufRead>(r: R, graph: &Graph) -> Result<Embedding> {
    let index: HashMap<String, usize> = graph.label_index();
    let mut positions = vec![None; graph.node_count()];
    for (lineno, line) in r.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(
                lineno,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let &i = index
            .get(fields[0])
            .ok_or_else(|| Error::parse(lineno, format!("unknown node label {:?}", fields[0])))?;
        let mut c = [0.0; 3];
        for (k, f) in fields[1..].iter().enumerate() {
            c[k] = f
                .trim()
                .parse()
                .map_err(|_| Error::parse(lineno, format!("invalid coordinate {f:?}")))?;
        }
        let p = Vec3(c)
            .normalize()
            .ok_or_else(|| Error::parse(lineno, "zero-length position"))?;
        if positions[i].replace(p).is_some() {
            return Err(Error::parse(
                lineno,
                format!("duplicate node label {:?}", fields[0]),
            ));
        }
    }
    let missing = positions.iter().filter(|p| p.is_none()).count();
    if missing > 0 {
        return Err(Error::arg(format!(
            "embedding is missing {missing} of {} nodes",
            positions.len()
        )));
    }
    Ok(Embedding {
        positions: positions.into_iter().map(Option::unwrap).collect(),
        config: LayoutConfig::default(),
        provenance: Provenance {
            graph_hash: graph.content_hash(),
            ..Default::default()
        },
    })
}
