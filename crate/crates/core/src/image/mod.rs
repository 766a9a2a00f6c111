//! Seeded graph-cut segmentation of grayscale images.
//!
//! Each pixel becomes a vertex joined to its grid neighbours by a pair of
//! opposite edges weighted by intensity similarity. Two extra vertices `S` and
//! `T` attach to the source- and sink-seeded pixels with capacities too large
//! to ever be cut, so the minimum cut separates the seeds along the cheapest
//! boundary.

pub mod pgm;

use crate::error::{ImageError, PgmError};
use crate::network::{Capacity, EdgeId, Flow, FlowNetwork, VertexId};
use crate::solve::{ford_fulkerson, min_cut, CutResult, SolveStats, Strategy};

pub use pgm::GrayImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Seed {
    Neutral,
    Source,
    Sink,
}

impl Seed {
    /// Seed files use 0 for neutral, 255 for source and 128 for sink.
    pub fn from_pixel(value: u8) -> Option<Seed> {
        match value {
            0 => Some(Seed::Neutral),
            255 => Some(Seed::Source),
            128 => Some(Seed::Sink),
            _ => None,
        }
    }

    pub fn to_pixel(self) -> u8 {
        match self {
            Seed::Neutral => 0,
            Seed::Source => 255,
            Seed::Sink => 128,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedMask {
    width: usize,
    height: usize,
    labels: Vec<Seed>,
}

impl SeedMask {
    pub fn neutral(width: usize, height: usize) -> Self {
        SeedMask {
            width,
            height,
            labels: vec![Seed::Neutral; width * height],
        }
    }

    pub fn from_image(image: &GrayImage) -> Result<Self, ImageError> {
        let labels = image
            .pixels()
            .iter()
            .enumerate()
            .map(|(index, &value)| {
                Seed::from_pixel(value).ok_or(ImageError::BadSeedValue { index, value })
            })
            .collect::<Result<_, _>>()?;
        Ok(SeedMask {
            width: image.width(),
            height: image.height(),
            labels,
        })
    }

    pub fn to_image(&self) -> GrayImage {
        let pixels = self.labels.iter().map(|s| s.to_pixel()).collect();
        GrayImage::new(self.width, self.height, pixels).expect("dimensions already checked")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[Seed] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> Seed {
        self.labels[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, seed: Seed) {
        self.labels[y * self.width + x] = seed;
    }

    pub fn mirrored(&self) -> SeedMask {
        let labels = (0..self.height)
            .flat_map(|y| (0..self.width).rev().map(move |x| (x, y)))
            .map(|(x, y)| self.get(x, y))
            .collect();
        SeedMask { labels, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Neighborhood {
    Four,
    Eight,
}

impl Neighborhood {
    pub fn from_count(n: u32) -> Option<Self> {
        match n {
            4 => Some(Neighborhood::Four),
            8 => Some(Neighborhood::Eight),
            _ => None,
        }
    }

    // offsets that point "forward" in row-major order; each adjacency once
    fn forward_offsets(self) -> &'static [(isize, isize)] {
        match self {
            Neighborhood::Four => &[(1, 0), (0, 1)],
            Neighborhood::Eight => &[(1, 0), (0, 1), (1, 1), (-1, 1)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphParams {
    pub contrast_scale: u32,
    pub sigma: f64,
    pub neighborhood: Neighborhood,
    /// Fixed-point multiplier applied before rounding to integer capacity.
    pub weight_scale: u32,
}

impl Default for GraphParams {
    fn default() -> Self {
        GraphParams {
            contrast_scale: 1,
            sigma: 20.0,
            neighborhood: Neighborhood::Four,
            weight_scale: 1000,
        }
    }
}

impl GraphParams {
    pub fn validate(&self) -> Result<(), ImageError> {
        if self.contrast_scale == 0 {
            return Err(ImageError::BadParams(
                "contrast scale must be at least 1".into(),
            ));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(ImageError::BadParams(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        if self.weight_scale == 0 {
            return Err(ImageError::BadParams(
                "weight scale must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// `round(weight_scale * C * exp(-(Ip - Iq)^2 / (2 sigma^2)))`, never below 1.
pub fn boundary_weight(ip: u8, iq: u8, params: &GraphParams) -> Capacity {
    let d = ip as f64 - iq as f64;
    let scale = params.weight_scale as f64 * params.contrast_scale as f64;
    let w = (scale * (-(d * d) / (2.0 * params.sigma * params.sigma)).exp()).round();
    (w as Capacity).max(1)
}

#[derive(Debug, Clone)]
pub struct SegmentationGraph {
    network: FlowNetwork,
    width: usize,
    height: usize,
    grid_edges: usize,
}

impl SegmentationGraph {
    pub fn network(&self) -> &FlowNetwork {
        &self.network
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn source(&self) -> VertexId {
        self.network.source()
    }

    pub fn sink(&self) -> VertexId {
        self.network.sink()
    }

    pub fn vertex_of_pixel(&self, x: usize, y: usize) -> VertexId {
        y * self.width + x
    }

    pub fn pixel_of_vertex(&self, v: VertexId) -> Option<(usize, usize)> {
        (v < self.width * self.height).then(|| (v % self.width, v / self.width))
    }

    /// Grid edges come first, in pixel order; terminal edges follow.
    pub fn grid_edge_count(&self) -> usize {
        self.grid_edges
    }

    pub fn is_terminal_edge(&self, edge: EdgeId) -> bool {
        edge >= self.grid_edges
    }
}

pub fn build_grid_graph(
    image: &GrayImage,
    seeds: &SeedMask,
    params: &GraphParams,
) -> Result<SegmentationGraph, ImageError> {
    params.validate()?;
    let (w, h) = (image.width(), image.height());
    if (seeds.width, seeds.height) != (w, h) {
        return Err(ImageError::DimensionMismatch {
            image_width: w,
            image_height: h,
            seed_width: seeds.width,
            seed_height: seeds.height,
        });
    }
    let has_source = seeds.labels.contains(&Seed::Source);
    let has_sink = seeds.labels.contains(&Seed::Sink);
    match (has_source, has_sink) {
        (false, false) => return Err(ImageError::NoSeeds),
        (false, true) => return Err(ImageError::NoSourceSeed),
        (true, false) => return Err(ImageError::NoSinkSeed),
        (true, true) => {}
    }

    let pixels = w * h;
    let (s, t) = (pixels, pixels + 1);
    let mut edges: Vec<(VertexId, VertexId, Capacity)> = Vec::new();
    let mut incident = vec![0 as Capacity; pixels];
    for y in 0..h {
        for x in 0..w {
            let p = y * w + x;
            for &(dx, dy) in params.neighborhood.forward_offsets() {
                let (qx, qy) = (x as isize + dx, y as isize + dy);
                if qx < 0 || qx >= w as isize || qy >= h as isize {
                    continue;
                }
                let q = qy as usize * w + qx as usize;
                let c = boundary_weight(image.pixels()[p], image.pixels()[q], params);
                edges.push((p, q, c));
                edges.push((q, p, c));
                incident[p] += 2 * c;
                incident[q] += 2 * c;
            }
        }
    }
    let grid_edges = edges.len();
    for (p, seed) in seeds.labels.iter().enumerate() {
        match seed {
            Seed::Source => edges.push((s, p, 1 + incident[p])),
            Seed::Sink => edges.push((p, t, 1 + incident[p])),
            Seed::Neutral => {}
        }
    }
    let network = FlowNetwork::new(pixels + 2, &edges, s, t).expect("grid graph is well-formed");
    Ok(SegmentationGraph {
        network,
        width: w,
        height: h,
        grid_edges,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentationMask {
    width: usize,
    height: usize,
    foreground: Vec<bool>,
}

impl SegmentationMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn is_foreground(&self, x: usize, y: usize) -> bool {
        self.foreground[y * self.width + x]
    }

    pub fn foreground(&self) -> &[bool] {
        &self.foreground
    }

    pub fn foreground_count(&self) -> usize {
        self.foreground.iter().filter(|&&f| f).count()
    }

    /// 255 for foreground, 0 for background.
    pub fn to_image(&self) -> GrayImage {
        let pixels = self
            .foreground
            .iter()
            .map(|&f| if f { 255 } else { 0 })
            .collect();
        GrayImage::new(self.width, self.height, pixels).expect("dimensions already checked")
    }

    pub fn from_image(image: &GrayImage) -> Result<Self, PgmError> {
        let foreground = image
            .pixels()
            .iter()
            .enumerate()
            .map(|(index, &v)| match v {
                0 => Ok(false),
                255 => Ok(true),
                value => Err(PgmError::BadPixel {
                    index,
                    value: value as u32,
                    maxval: 255,
                }),
            })
            .collect::<Result<_, _>>()?;
        Ok(SegmentationMask {
            width: image.width(),
            height: image.height(),
            foreground,
        })
    }

    pub fn mirrored(&self) -> SegmentationMask {
        let foreground = (0..self.height)
            .flat_map(|y| (0..self.width).rev().map(move |x| (x, y)))
            .map(|(x, y)| self.is_foreground(x, y))
            .collect();
        SegmentationMask {
            foreground,
            ..*self
        }
    }
}

#[derive(Debug, Clone)]
pub struct Segmentation {
    pub mask: SegmentationMask,
    pub stats: SolveStats,
    pub flow: Flow,
    pub cut: CutResult,
}

/// Foreground is the source side of the source-side-minimal minimum cut.
pub fn segment(
    graph: &SegmentationGraph,
    strategy: Strategy<'_>,
) -> Result<Segmentation, ImageError> {
    let net = &graph.network;
    let (flow, stats) = ford_fulkerson(net, &Flow::zero(net), strategy)?;
    let cut = min_cut(net, &flow)?;
    let foreground = cut.source_side[..graph.width * graph.height].to_vec();
    Ok(Segmentation {
        mask: SegmentationMask {
            width: graph.width,
            height: graph.height,
            foreground,
        },
        stats,
        flow,
        cut,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(c: u32, sigma: f64, scale: u32) -> GraphParams {
        GraphParams {
            contrast_scale: c,
            sigma,
            neighborhood: Neighborhood::Four,
            weight_scale: scale,
        }
    }

    #[test]
    fn weights() {
        let p = params(100, 10.0, 1);
        assert_eq!(boundary_weight(10, 20, &p), 61);
        assert_eq!(boundary_weight(20, 10, &p), 61);
        assert_eq!(boundary_weight(7, 7, &GraphParams::default()), 1000);
        assert_eq!(boundary_weight(0, 255, &params(1, 1.0, 1000)), 1);
    }

    #[test]
    fn two_pixel_graph() {
        let image = GrayImage::filled(2, 1, 50).unwrap();
        let mut seeds = SeedMask::neutral(2, 1);
        seeds.set(0, 0, Seed::Source);
        seeds.set(1, 0, Seed::Sink);
        let graph = build_grid_graph(&image, &seeds, &GraphParams::default()).unwrap();
        let net = graph.network();
        assert_eq!(net.vertex_count(), 4);
        assert_eq!(net.edge_count(), 4);
        assert_eq!(graph.grid_edge_count(), 2);
        assert_eq!((graph.source(), graph.sink()), (2, 3));
        assert_eq!(net.edge(2).capacity, 2001);
        let seg = segment(&graph, Strategy::Bfs).unwrap();
        assert_eq!(seg.mask.foreground(), &[true, false]);
        assert_eq!(seg.cut.cut_edges, vec![0]);
    }

    #[test]
    fn grid_edge_counts() {
        let image = GrayImage::filled(3, 3, 0).unwrap();
        let mut seeds = SeedMask::neutral(3, 3);
        seeds.set(0, 0, Seed::Source);
        seeds.set(2, 2, Seed::Sink);
        let four = build_grid_graph(&image, &seeds, &GraphParams::default()).unwrap();
        assert_eq!(four.grid_edge_count(), 24);
        let eight = GraphParams {
            neighborhood: Neighborhood::Eight,
            ..GraphParams::default()
        };
        let eight = build_grid_graph(&image, &seeds, &eight).unwrap();
        // 12 straight + 8 diagonal adjacencies
        assert_eq!(eight.grid_edge_count(), 40);
    }

    #[test]
    fn seed_errors() {
        let image = GrayImage::filled(1, 1, 0).unwrap();
        let mut seeds = SeedMask::neutral(1, 1);
        let p = GraphParams::default();
        assert!(matches!(
            build_grid_graph(&image, &seeds, &p),
            Err(ImageError::NoSeeds)
        ));
        seeds.set(0, 0, Seed::Source);
        assert!(matches!(
            build_grid_graph(&image, &seeds, &p),
            Err(ImageError::NoSinkSeed)
        ));
        seeds.set(0, 0, Seed::Sink);
        assert!(matches!(
            build_grid_graph(&image, &seeds, &p),
            Err(ImageError::NoSourceSeed)
        ));
        let seeds = SeedMask::neutral(2, 1);
        assert!(matches!(
            build_grid_graph(&image, &seeds, &p),
            Err(ImageError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            build_grid_graph(&image, &SeedMask::neutral(1, 1), &params(0, 1.0, 1)),
            Err(ImageError::BadParams(_))
        ));
    }

    #[test]
    fn seed_pixel_mapping() {
        let img = GrayImage::new(4, 1, vec![0, 255, 128, 0]).unwrap();
        let seeds = SeedMask::from_image(&img).unwrap();
        assert_eq!(
            seeds.labels(),
            &[Seed::Neutral, Seed::Source, Seed::Sink, Seed::Neutral]
        );
        assert_eq!(seeds.to_image(), img);
        let bad = GrayImage::new(1, 1, vec![3]).unwrap();
        assert!(matches!(
            SeedMask::from_image(&bad),
            Err(ImageError::BadSeedValue { index: 0, value: 3 })
        ));
    }
}
