use rayon::prelude::*;

use super::overlay::{Rgb, BACKGROUND};
use crate::error::{Error, Result};
use crate::geom::PlanePoint;

pub const MIN_WIDTH: u32 = 16;

/// Nodes per worker buffer when stamping in parallel.
const NODES_PER_BUFFER: usize = 50_000;

/// 2D histogram of projected nodes over the plane square [−1, 1]².
///
/// Each pixel stores how many node stamps hit it and the summed stamp
/// colors. A pixel with `n` stamps is drawn with opacity `n/(1+n)` in the
/// mean stamp color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityRaster {
    pub width: u32,
    pub height: u32,
    pub bins: Vec<u32>,
    pub color_sums: Vec<[u64; 3]>,
    pub background: Rgb,
    /// Edge pixels drawn underneath the nodes, if any.
    pub edges: Option<Vec<u32>>,
}

/// Pixel offsets within `radius` of the center (a single pixel for 0, a
/// 5-pixel cross for 1).
pub fn stamp_offsets(radius: u32) -> Vec<(i32, i32)> {
    let r = radius as i32;
    let mut out = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            if dx * dx + dy * dy <= r * r {
                out.push((dx, dy));
            }
        }
    }
    out
}

impl DensityRaster {
    pub fn new(width: u32) -> Result<DensityRaster> {
        if width < MIN_WIDTH {
            return Err(Error::arg(format!("width must be >= {MIN_WIDTH}")));
        }
        if width > 16_384 {
            return Err(Error::arg("width must be <= 16384"));
        }
        let px = (width as usize) * (width as usize);
        Ok(DensityRaster {
            width,
            height: width,
            bins: vec![0; px],
            color_sums: vec![[0; 3]; px],
            background: BACKGROUND,
            edges: None,
        })
    }

    /// Pixel containing plane point `p`; points on or beyond the square's
    /// edge fall into the border pixels.
    #[inline]
    pub fn pixel_of(&self, p: PlanePoint) -> (i32, i32) {
        let w = self.width as f64;
        let h = self.height as f64;
        let x = ((p.u + 1.0) * 0.5 * w).floor();
        let y = ((1.0 - p.v) * 0.5 * h).floor();
        (
            x.clamp(0.0, w - 1.0) as i32,
            y.clamp(0.0, h - 1.0) as i32,
        )
    }

    #[inline]
    fn index(&self, x: i32, y: i32) -> Option<usize> {
        (x >= 0 && y >= 0 && (x as u32) < self.width && (y as u32) < self.height)
            .then(|| y as usize * self.width as usize + x as usize)
    }

    /// Stamps every node `i` with `include(i)` at `points[i]` in
    /// `color(i)`. Returns the number of in-frame stamp pixels added.
    ///
    /// Nodes are split across workers with private buffers that are summed
    /// afterwards; integer sums make the result independent of the number
    /// of threads.
    pub fn stamp_points<C, F>(
        &mut self,
        points: &[PlanePoint],
        radius: u32,
        color: C,
        include: F,
    ) -> u64
    where
        C: Fn(usize) -> Rgb + Sync,
        F: Fn(usize) -> bool + Sync,
    {
        let offsets = stamp_offsets(radius);
        let px = self.bins.len();
        let shape = DensityRaster {
            bins: Vec::new(),
            color_sums: Vec::new(),
            edges: None,
            ..*self
        };
        let stamp_range = |range: std::ops::Range<usize>,
                           bins: &mut [u32],
                           sums: &mut [[u64; 3]]|
         -> u64 {
            let mut added = 0;
            for i in range {
                if !include(i) {
                    continue;
                }
                let (x, y) = shape.pixel_of(points[i]);
                let c = color(i);
                for &(dx, dy) in &offsets {
                    if let Some(k) = shape.index(x + dx, y + dy) {
                        bins[k] += 1;
                        for ch in 0..3 {
                            sums[k][ch] += c[ch] as u64;
                        }
                        added += 1;
                    }
                }
            }
            added
        };

        let n = points.len();
        let buffers = n.div_ceil(NODES_PER_BUFFER).min(rayon::current_num_threads());
        if buffers <= 1 {
            return stamp_range(0..n, &mut self.bins, &mut self.color_sums);
        }
        let chunk = n.div_ceil(buffers);
        let partial: Vec<(Vec<u32>, Vec<[u64; 3]>, u64)> = (0..buffers)
            .into_par_iter()
            .map(|b| {
                let mut bins = vec![0u32; px];
                let mut sums = vec![[0u64; 3]; px];
                let range = b * chunk..((b + 1) * chunk).min(n);
                let added = stamp_range(range, &mut bins, &mut sums);
                (bins, sums, added)
            })
            .collect();
        let mut added = 0;
        for (bins, sums, a) in partial {
            added += a;
            self.bins
                .par_iter_mut()
                .zip(&bins)
                .for_each(|(dst, src)| *dst += src);
            self.color_sums
                .par_iter_mut()
                .zip(&sums)
                .for_each(|(dst, src)| {
                    for ch in 0..3 {
                        dst[ch] += src[ch];
                    }
                });
        }
        added
    }

    /// Marks a one-pixel polyline through the given plane points in the
    /// edge layer.
    pub fn stamp_edge_path(&mut self, path: &[PlanePoint]) {
        let w = self.width as usize;
        let edges = self
            .edges
            .get_or_insert_with(|| vec![0; w * self.height as usize]);
        let shape = (self.width, self.height);
        let to_px = |p: PlanePoint| {
            let x = ((p.u + 1.0) * 0.5 * shape.0 as f64).floor();
            let y = ((1.0 - p.v) * 0.5 * shape.1 as f64).floor();
            (
                x.clamp(0.0, shape.0 as f64 - 1.0) as i64,
                y.clamp(0.0, shape.1 as f64 - 1.0) as i64,
            )
        };
        for seg in path.windows(2) {
            let (mut x0, mut y0) = to_px(seg[0]);
            let (x1, y1) = to_px(seg[1]);
            // Bresenham
            let dx = (x1 - x0).abs();
            let dy = -(y1 - y0).abs();
            let sx = if x0 < x1 { 1 } else { -1 };
            let sy = if y0 < y1 { 1 } else { -1 };
            let mut err = dx + dy;
            loop {
                edges[y0 as usize * w + x0 as usize] += 1;
                if x0 == x1 && y0 == y1 {
                    break;
                }
                let e2 = 2 * err;
                if e2 >= dy {
                    err += dy;
                    x0 += sx;
                }
                if e2 <= dx {
                    err += dx;
                    y0 += sy;
                }
            }
        }
    }

    pub fn total_stamps(&self) -> u64 {
        self.bins.iter().map(|&b| b as u64).sum()
    }

    /// Opacity `n/(1+n)` of pixel `(x, y)`.
    pub fn opacity(&self, x: u32, y: u32) -> f64 {
        let n = self.bins[(y * self.width + x) as usize] as f64;
        n / (1.0 + n)
    }

    /// Transparency `1/(1+n)` of pixel `(x, y)`.
    pub fn transparency(&self, x: u32, y: u32) -> f64 {
        1.0 / (1.0 + self.bins[(y * self.width + x) as usize] as f64)
    }

    /// Mean stamp color of pixel `k`, or `None` for an empty pixel.
    #[inline]
    pub fn mean_color(&self, k: usize) -> Option<Rgb> {
        let n = self.bins[k] as u64;
        (n > 0).then(|| {
            let s = self.color_sums[k];
            [
                ((s[0] + n / 2) / n) as u8,
                ((s[1] + n / 2) / n) as u8,
                ((s[2] + n / 2) / n) as u8,
            ]
        })
    }

    /// Straight-alpha RGBA pixels: mean stamp color with alpha
    /// `round(255·n/(1+n))`. Empty pixels carry the background color with
    /// alpha 0, or the edge color where an edge passes.
    pub fn to_rgba(&self) -> Vec<u8> {
        const EDGE: [u8; 4] = [150, 150, 150, 90];
        let mut out = vec![0u8; self.bins.len() * 4];
        out.par_chunks_mut(4).enumerate().for_each(|(k, px)| {
            let n = self.bins[k] as f64;
            match self.mean_color(k) {
                Some(c) => {
                    px[..3].copy_from_slice(&c);
                    px[3] = (255.0 * n / (1.0 + n)).round() as u8;
                }
                None => {
                    let on_edge = self.edges.as_ref().is_some_and(|e| e[k] > 0);
                    if on_edge {
                        px.copy_from_slice(&EDGE);
                    } else {
                        px[..3].copy_from_slice(&self.background);
                        px[3] = 0;
                    }
                }
            }
        });
        out
    }

    /// RGB image composited over the background.
    pub fn composite_rgb(&self) -> Vec<u8> {
        let rgba = self.to_rgba();
        let bg = self.background;
        rgba.chunks(4)
            .flat_map(|px| {
                let a = px[3] as f64 / 255.0;
                (0..3).map(move |ch| (px[ch] as f64 * a + bg[ch] as f64 * (1.0 - a)).round() as u8)
            })
            .collect()
    }

    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        {
            let mut enc = png::Encoder::new(&mut buf, self.width, self.height);
            enc.set_color(png::ColorType::Rgba);
            enc.set_depth(png::BitDepth::Eight);
            enc.set_compression(png::Compression::Fast);
            let mut w = enc.write_header().map_err(|e| Error::Encode(e.to_string()))?;
            w.write_image_data(&self.to_rgba())
                .map_err(|e| Error::Encode(e.to_string()))?;
        }
        Ok(buf)
    }
}
