use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DistanceField, Graph};

pub type Rgb = [u8; 3];

pub const BACKGROUND: Rgb = [255, 255, 255];

/// Plain node color when no overlay is selected.
pub const NODE_COLOR: Rgb = [33, 37, 41];

/// Nodes without an overlay value (no category, no event in the window).
pub const MUTED: Rgb = [190, 190, 190];

/// Hop distances 0..=6; anything farther (or unreachable) is black.
pub const DISTANCE_BANDS: [Rgb; 7] = [
    [228, 26, 28],
    [255, 127, 0],
    [77, 175, 74],
    [55, 126, 184],
    [152, 78, 163],
    [166, 86, 40],
    [247, 129, 191],
];

pub const FAR: Rgb = [0, 0, 0];

/// Cooling colormap anchors at t = 0, 0.25, 0.5, 0.75, 1.
pub const COOLING: [Rgb; 5] = [
    [215, 25, 28],
    [250, 210, 20],
    [26, 150, 65],
    [43, 100, 200],
    [255, 255, 255],
];

pub const COOLING_ID: &str = "cooling-rygbw";
pub const BANDS_ID: &str = "distance-bands-7";
pub const CATEGORY_ID: &str = "category-42";

pub const PALETTE_SIZE: usize = 42;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OverlayMode {
    #[default]
    None,
    DistanceBands,
    Category,
    EventTime,
}

impl OverlayMode {
    pub const ALL: [OverlayMode; 4] = [
        OverlayMode::None,
        OverlayMode::DistanceBands,
        OverlayMode::Category,
        OverlayMode::EventTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OverlayMode::None => "none",
            OverlayMode::DistanceBands => "distance-bands",
            OverlayMode::Category => "category",
            OverlayMode::EventTime => "event-time",
        }
    }

    pub fn colormap_id(self) -> Option<&'static str> {
        match self {
            OverlayMode::None => None,
            OverlayMode::DistanceBands => Some(BANDS_ID),
            OverlayMode::Category => Some(CATEGORY_ID),
            OverlayMode::EventTime => Some(COOLING_ID),
        }
    }
}

impl std::str::FromStr for OverlayMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OverlayMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::arg(format!("unknown overlay {s:?}")))
    }
}

/// How nodes are colored. Borrowed tables are indexed by node.
#[derive(Clone, Copy, Debug, Default)]
pub struct OverlaySpec<'a> {
    pub mode: OverlayMode,
    /// Palette index per node (see [`category_index`]).
    pub categories: Option<&'a [Option<u8>]>,
    /// Normalized event time per node.
    pub event_times: Option<&'a [Option<f64>]>,
    /// Only events with `t0 ≤ t ≤ t1` are colored.
    pub window: [f64; 2],
}

impl<'a> OverlaySpec<'a> {
    pub fn new(mode: OverlayMode) -> Self {
        OverlaySpec {
            mode,
            window: [0.0, 1.0],
            ..Default::default()
        }
    }

    pub fn validate(&self, node_count: usize) -> Result<()> {
        let [t0, t1] = self.window;
        if !(0.0..=1.0).contains(&t0) || !(0.0..=1.0).contains(&t1) || t0 > t1 {
            return Err(Error::arg(format!(
                "time window [{t0}, {t1}] must satisfy 0 <= t0 <= t1 <= 1"
            )));
        }
        match self.mode {
            OverlayMode::EventTime => match self.event_times {
                Some(t) if t.len() == node_count => Ok(()),
                Some(_) => Err(Error::arg("event table size differs from node count")),
                None => Err(Error::arg("event-time overlay needs an events table")),
            },
            OverlayMode::Category => match self.categories {
                Some(c) if c.len() == node_count => Ok(()),
                Some(_) => Err(Error::arg("category table size differs from node count")),
                None => Err(Error::arg("category overlay needs a categories table")),
            },
            _ => Ok(()),
        }
    }

    /// Color of node `i`; `dist` is only consulted for distance bands.
    #[inline]
    pub fn color(&self, i: usize, dist: Option<&DistanceField>) -> Rgb {
        match self.mode {
            OverlayMode::None => NODE_COLOR,
            OverlayMode::DistanceBands => match dist.and_then(|d| d.get(i)) {
                Some(d) if (d as usize) < DISTANCE_BANDS.len() => DISTANCE_BANDS[d as usize],
                Some(_) => FAR,
                None if dist.is_none() => NODE_COLOR,
                None => FAR,
            },
            OverlayMode::Category => match self.categories.and_then(|c| c[i]) {
                Some(k) => palette_color(k as usize),
                None => MUTED,
            },
            OverlayMode::EventTime => match self.event_times.and_then(|e| e[i]) {
                Some(t) if t >= self.window[0] && t <= self.window[1] => cooling(t),
                _ => MUTED,
            },
        }
    }
}

fn lerp(a: Rgb, b: Rgb, f: f64) -> Rgb {
    let mut out = [0u8; 3];
    for k in 0..3 {
        out[k] = (a[k] as f64 + (b[k] as f64 - a[k] as f64) * f).round() as u8;
    }
    out
}

/// Cooling colormap, red → yellow → green → blue → white; `t` is clamped
/// to [0, 1].
pub fn cooling(t: f64) -> Rgb {
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let x = t * 4.0;
    let k = (x.floor() as usize).min(3);
    lerp(COOLING[k], COOLING[k + 1], x - k as f64)
}

/// Color `k` (mod 42) of the category palette: 14 hues at three
/// saturation/value levels.
pub fn palette_color(k: usize) -> Rgb {
    let k = k % PALETTE_SIZE;
    let hue = (k % 14) as f64 * (360.0 / 14.0) + (k / 14) as f64 * 8.0;
    let (s, v) = [(0.85, 0.85), (0.55, 0.95), (0.9, 0.55)][k / 14];
    hsv(hue, s, v)
}

fn hsv(h: f64, s: f64, v: f64) -> Rgb {
    let c = v * s;
    let hp = (h % 360.0) / 60.0;
    let x = c * (1.0 - (hp % 2.0 - 1.0).abs());
    let (r, g, b) = match hp as u32 {
        0 => (c, x, 0.0),
        1 => (x, c, 0.0),
        2 => (0.0, c, x),
        3 => (0.0, x, c),
        4 => (x, 0.0, c),
        _ => (c, 0.0, x),
    };
    let m = v - c;
    let to = |f: f64| ((f + m) * 255.0).round() as u8;
    [to(r), to(g), to(b)]
}

/// Palette index of a category name: FNV-1a, stable across runs and
/// platforms.
pub fn category_index(name: &str) -> u8 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    (h % PALETTE_SIZE as u64) as u8
}

/// Per-node values read from a `label<TAB>value` file.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTable<T> {
    pub values: Vec<Option<T>>,
    /// Rows whose label is not a node of the graph.
    pub unknown_labels: usize,
}

fn read_label_rows<R: BufRead>(
    r: R,
    graph: &Graph,
    mut on_row: impl FnMut(usize, usize, &str) -> Result<()>,
) -> Result<usize> {
    let index: HashMap<String, usize> = graph.label_index();
    let mut unknown = 0;
    for (lineno, line) in r.lines().enumerate() {
        let lineno = lineno + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, value) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(lineno, "expected label<TAB>value"))?;
        match index.get(label) {
            Some(&i) => on_row(lineno, i, value.trim())?,
            None => unknown += 1,
        }
    }
    Ok(unknown)
}

/// Reads `label<TAB>event_time` rows and normalizes the times to [0, 1]
/// over their observed range. A node listed twice keeps its earliest time.
pub fn load_events<R: BufRead>(r: R, graph: &Graph) -> Result<NodeTable<f64>> {
    let mut raw: Vec<Option<f64>> = vec![None; graph.node_count()];
    let unknown = read_label_rows(r, graph, |lineno, i, value| {
        let t: f64 = value
            .parse()
            .ok()
            .filter(|t: &f64| t.is_finite())
            .ok_or_else(|| Error::parse(lineno, format!("invalid event time {value:?}")))?;
        raw[i] = Some(raw[i].map_or(t, |old: f64| old.min(t)));
        Ok(())
    })?;
    let (lo, hi) = raw
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &t| {
            (lo.min(t), hi.max(t))
        });
    let span = hi - lo;
    let values = raw
        .into_iter()
        .map(|t| t.map(|t| if span > 0.0 { (t - lo) / span } else { 0.0 }))
        .collect();
    Ok(NodeTable {
        values,
        unknown_labels: unknown,
    })
}

/// Reads `label<TAB>category` rows into palette indices.
pub fn load_categories<R: BufRead>(r: R, graph: &Graph) -> Result<NodeTable<u8>> {
    let mut values = vec![None; graph.node_count()];
    let unknown = read_label_rows(r, graph, |_, i, value| {
        values[i] = Some(category_index(value));
        Ok(())
    })?;
    Ok(NodeTable {
        values,
        unknown_labels: unknown,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cooling_anchors() {
        assert_eq!(cooling(0.0), COOLING[0]);
        assert_eq!(cooling(0.25), COOLING[1]);
        assert_eq!(cooling(0.5), COOLING[2]);
        assert_eq!(cooling(0.75), COOLING[3]);
        assert_eq!(cooling(1.0), COOLING[4]);
        assert_eq!(cooling(-3.0), COOLING[0]);
        assert_eq!(cooling(7.0), COOLING[4]);
        assert_eq!(cooling(0.125), lerp(COOLING[0], COOLING[1], 0.5));
    }

    #[test]
    fn palette_is_distinct() {
        let mut colors: Vec<Rgb> = (0..PALETTE_SIZE).map(palette_color).collect();
        colors.sort();
        colors.dedup();
        assert_eq!(colors.len(), PALETTE_SIZE);
        assert_eq!(category_index("Physics"), category_index("Physics"));
    }

    #[test]
    fn distance_band_colors() {
        let d = DistanceField {
            source: 0,
            dist: vec![0, 3, 7, crate::graph::UNREACHED],
        };
        let s = OverlaySpec::new(OverlayMode::DistanceBands);
        assert_eq!(s.color(0, Some(&d)), DISTANCE_BANDS[0]);
        assert_eq!(s.color(1, Some(&d)), DISTANCE_BANDS[3]);
        assert_eq!(s.color(2, Some(&d)), FAR);
        assert_eq!(s.color(3, Some(&d)), FAR);
    }

    #[test]
    fn events_normalized_and_windowed() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)])
            .with_labels(vec!["a".into(), "b".into(), "c".into()]);
        let t = load_events("a\t1990\nb\t2010\na\t2000\nzz\t1\n".as_bytes(), &g).unwrap();
        assert_eq!(t.values, vec![Some(0.0), Some(1.0), None]);
        assert_eq!(t.unknown_labels, 1);
        let mut s = OverlaySpec::new(OverlayMode::EventTime);
        s.event_times = Some(&t.values);
        s.window = [0.0, 0.5];
        assert_eq!(s.color(0, None), cooling(0.0));
        assert_eq!(s.color(1, None), MUTED);
        assert_eq!(s.color(2, None), MUTED);
        assert!(load_events("a\tsoon\n".as_bytes(), &g).is_err());
    }

    #[test]
    fn spec_validation() {
        let s = OverlaySpec::new(OverlayMode::EventTime);
        assert!(s.validate(3).is_err());
        let mut s = OverlaySpec::new(OverlayMode::None);
        s.window = [0.6, 0.2];
        assert!(s.validate(3).is_err());
        assert_eq!("event-time".parse::<OverlayMode>().unwrap(), OverlayMode::EventTime);
        assert!("heat".parse::<OverlayMode>().is_err());
    }
}
