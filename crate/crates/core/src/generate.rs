//! Seeded instance generators: grids with grown regions, random segment
//! scenes, and pairwise-crossing segment fans.

use std::collections::HashSet;

use thiserror::Error;

use crate::arrangement::{build_arrangement, geometric_intersection_graph, segment_intersect, RatPoint, SegmentIntersection, StringScene};
use crate::docs::Instance;
use crate::geom::Point;
use crate::plane_graph::build_plane_graph;
use crate::regions::{Region, RegionSet};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("bad parameters: {0}")]
    Params(String),
    #[error("no segment in general position after {0} attempts")]
    ResampleLimit(usize),
}

/// `w x h` grid graph with `k` regions grown from random roots.
pub fn gen_grid_instance(w: usize, h: usize, k: usize, seed: u64) -> Result<Instance, GenerateError> {
    if w == 0 || h == 0 || k == 0 {
        return Err(GenerateError::Params("w, h and k must be positive".into()));
    }
    let n = w * h;
    let coords: Vec<Point> = (0..n).map(|v| ((v % w) as i64, (v / w) as i64)).collect();
    let mut edges = Vec::new();
    for v in 0..n {
        if v % w + 1 < w {
            edges.push((v, v + 1));
        }
        if v + w < n {
            edges.push((v, v + w));
        }
    }
    let g = build_plane_graph(&coords, &edges).expect("grid drawing is plane");
    let mut rng = SplitMix64::new(seed);
    let cap = (2 * n / k).max(1) as u64;
    let mut regions: Vec<Vec<usize>> = Vec::with_capacity(k);
    for _ in 0..k {
        let root = rng.below(n as u64) as usize;
        let target = 1 + rng.below(cap) as usize;
        let mut inside = vec![false; n];
        inside[root] = true;
        let mut verts = vec![root];
        let mut frontier: Vec<usize> = g.rotation(root).to_vec();
        while verts.len() < target && !frontier.is_empty() {
            let i = rng.below(frontier.len() as u64) as usize;
            let v = frontier.swap_remove(i);
            if inside[v] {
                continue;
            }
            inside[v] = true;
            verts.push(v);
            frontier.extend(g.rotation(v).iter().copied().filter(|&u| !inside[u]));
        }
        regions.push(verts);
    }
    // attach uncovered vertices to the region they are first reached from
    let mut label = vec![usize::MAX; n];
    for (i, r) in regions.iter().enumerate() {
        for &v in r {
            if label[v] == usize::MAX {
                label[v] = i;
            }
        }
    }
    let mut queue: std::collections::VecDeque<usize> = (0..n).filter(|&v| label[v] != usize::MAX).collect();
    while let Some(v) = queue.pop_front() {
        for &u in g.rotation(v) {
            if label[u] == usize::MAX {
                label[u] = label[v];
                regions[label[v]].push(u);
                queue.push_back(u);
            }
        }
    }
    let rs = RegionSet::new(regions.into_iter().enumerate().map(|(i, vs)| Region::new(i, vs)).collect());
    Ok(Instance::new(g, rs))
}

const MAX_ATTEMPTS: usize = 10_000;

/// `n` random segments in `[0, bbox]^2`: pairwise crossings are proper, and
/// no three segments share a point.
pub fn gen_segment_scene(n: usize, bbox: i64, seed: u64) -> Result<StringScene, GenerateError> {
    if n == 0 || bbox < 2 {
        return Err(GenerateError::Params("need n >= 1 and bbox >= 2".into()));
    }
    let mut rng = SplitMix64::new(seed);
    let mut segs: Vec<(Point, Point)> = Vec::with_capacity(n);
    let mut crossings: HashSet<RatPoint> = HashSet::new();
    for _ in 0..n {
        let mut placed = false;
        for _ in 0..MAX_ATTEMPTS {
            let p = (rng.range(0, bbox), rng.range(0, bbox));
            let q = (rng.range(0, bbox), rng.range(0, bbox));
            if p == q {
                continue;
            }
            if let Some(new) = proper_crossings(&segs, p, q, &crossings) {
                crossings.extend(new);
                segs.push((p, q));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(GenerateError::ResampleLimit(MAX_ATTEMPTS));
        }
    }
    Ok(StringScene::from_polylines(segs.into_iter().map(|(a, b)| vec![a, b]).collect()))
}

/// Crossings of `p q` with `segs` if all are proper and fresh.
fn proper_crossings(segs: &[(Point, Point)], p: Point, q: Point, old: &HashSet<RatPoint>) -> Option<Vec<RatPoint>> {
    let mut new = Vec::new();
    for &(a, b) in segs {
        match segment_intersect(p, q, a, b) {
            SegmentIntersection::None => {}
            SegmentIntersection::Violation => return None,
            SegmentIntersection::Point(x) => {
                let ends = [p, q, a, b].map(RatPoint::integer);
                if ends.contains(&x) || old.contains(&x) || new.contains(&x) {
                    return None;
                }
                new.push(x);
            }
        }
    }
    Some(new)
}

/// `k` chords of a circle with interleaved endpoints, so every pair crosses;
/// the second endpoints are rotated slightly so the chords are not concurrent.
pub fn gen_clique_scene(k: usize) -> Result<StringScene, GenerateError> {
    if k < 2 {
        return Err(GenerateError::Params("k must be at least 2".into()));
    }
    let radius = 1000.0 * k as f64;
    let step = std::f64::consts::PI / k as f64;
    let at = |theta: f64| -> Point { ((radius * theta.cos()).round() as i64, (radius * theta.sin()).round() as i64) };
    let mut rng = SplitMix64::new(k as u64);
    let mut jitter = vec![(0i64, 0i64); k];
    loop {
        let lines: Vec<Vec<Point>> = (0..k)
            .map(|i| {
                let a = at(i as f64 * step);
                let bend = step * (i + 1) as f64 / (2 * (k + 1)) as f64;
                let b = at(i as f64 * step + std::f64::consts::PI + bend);
                vec![a, (b.0 + jitter[i].0, b.1 + jitter[i].1)]
            })
            .collect();
        let scene = StringScene::from_polylines(lines);
        let ok = build_arrangement(&scene).is_ok_and(|a| a.meta.touches.is_empty() && a.meta.crossings == k * (k - 1) / 2);
        if ok && geometric_intersection_graph(&scene).iter().enumerate().all(|(i, row)| row.iter().enumerate().all(|(j, &x)| x || i == j)) {
            return Ok(scene);
        }
        for j in jitter.iter_mut() {
            *j = (rng.range(-3, 3), rng.range(-3, 3));
        }
    }
}
