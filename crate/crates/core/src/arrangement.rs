//! Exact arrangements of integer polylines ("strings") and their conversion
//! into region instances.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{self, cross, dot, orient, sub, Point};
use crate::plane_graph::{PlaneGraph, PlaneGraphError};
use crate::regions::{Region, RegionId, RegionSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrangementError {
    #[error("strings {a} and {b} violate general position: {reason}")]
    GeneralPositionViolation { a: i64, b: i64, reason: String },
    #[error("string {0} has no points")]
    EmptyString(i64),
    #[error("string {0} has a zero-length segment")]
    DegenerateSegment(i64),
    #[error("string id {0} appears twice")]
    DuplicateString(i64),
    #[error("string id {0} is negative")]
    NegativeId(i64),
    #[error("crossing points cannot be placed on an integer grid")]
    Snap,
    #[error(transparent)]
    Plane(#[from] PlaneGraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneString {
    pub id: i64,
    pub points: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StringScene {
    pub strings: Vec<SceneString>,
}

impl StringScene {
    /// Scene with ids `0..` in order.
    pub fn from_polylines(lines: Vec<Vec<Point>>) -> Self {
        StringScene { strings: lines.into_iter().enumerate().map(|(i, points)| SceneString { id: i as i64, points }).collect() }
    }
}

/// Exact rational point `(x/d, y/d)` with `d > 0` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RatPoint {
    pub x: i128,
    pub y: i128,
    pub d: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl RatPoint {
    pub fn new(x: i128, y: i128, d: i128) -> Self {
        let s = if d < 0 { -1 } else { 1 };
        let g = gcd(gcd(x, y), d).max(1);
        RatPoint { x: s * x / g, y: s * y / g, d: s * d / g }
    }

    pub fn integer(p: Point) -> Self {
        RatPoint { x: p.0 as i128, y: p.1 as i128, d: 1 }
    }

    pub fn as_integer(&self) -> Option<Point> {
        (self.d == 1).then_some((self.x as i64, self.y as i64))
    }
}

impl PartialOrd for RatPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RatPoint {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.x * o.d).cmp(&(o.x * self.d)).then_with(|| (self.y * o.d).cmp(&(o.y * self.d)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentIntersection {
    None,
    Point(RatPoint),
    /// Collinear segments sharing more than one point.
    Violation,
}

/// Exact intersection of two closed, non-degenerate segments.
pub fn segment_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> SegmentIntersection {
    let r = sub(p2, p1);
    let s = sub(q2, q1);
    let qp = sub(q1, p1);
    let denom = cross(r, s);
    if denom == 0 {
        if cross(qp, r) != 0 {
            return SegmentIntersection::None;
        }
        let rr = dot(r, r);
        let t0 = dot(qp, r);
        let t1 = dot(sub(q2, p1), r);
        let (lo, hi) = (t0.min(t1), t0.max(t1));
        if hi < 0 || lo > rr {
            return SegmentIntersection::None;
        }
        if hi == 0 {
            return SegmentIntersection::Point(RatPoint::integer(p1));
        }
        if lo == rr {
            return SegmentIntersection::Point(RatPoint::integer(p2));
        }
        return SegmentIntersection::Violation;
    }
    let (mut tn, mut un, mut d) = (cross(qp, s), cross(qp, r), denom);
    if d < 0 {
        (tn, un, d) = (-tn, -un, -d);
    }
    if tn < 0 || tn > d || un < 0 || un > d {
        return SegmentIntersection::None;
    }
    let x = p1.0 as i128 * d + tn * r.0;
    let y = p1.1 as i128 * d + tn * r.1;
    SegmentIntersection::Point(RatPoint::new(x, y, d))
}

/// How rational crossing points were placed on the integer grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scale {
    /// All coordinates multiplied by `factor`; exact.
    Exact { factor: i64 },
    /// Coordinates multiplied by `2^bits` and rounded.
    Rounded { bits: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrangementMeta {
    pub polyline_vertices: usize,
    pub crossings: usize,
    /// String pairs meeting at a polyline vertex of one of them.
    pub touches: Vec<(i64, i64)>,
    pub scale: Scale,
}

#[derive(Debug, Clone)]
pub struct ArrangementOutput {
    pub graph: PlaneGraph,
    /// One region per string; region id = string id.
    pub regions: RegionSet,
    pub meta: ArrangementMeta,
}

/// Largest common denominator still scaled exactly.
const EXACT_SCALE_LIMIT: i128 = 1 << 20;
const ROUNDING_BITS: [u32; 6] = [20, 24, 28, 32, 40, 48];

struct Seg {
    string: usize,
    index: usize,
    a: Point,
    b: Point,
}

fn violation(a: i64, b: i64, reason: &str) -> ArrangementError {
    ArrangementError::GeneralPositionViolation { a, b, reason: reason.to_string() }
}

fn validate_scene(scene: &StringScene) -> Result<(), ArrangementError> {
    let mut ids = BTreeSet::new();
    for s in &scene.strings {
        if s.id < 0 {
            return Err(ArrangementError::NegativeId(s.id));
        }
        if !ids.insert(s.id) {
            return Err(ArrangementError::DuplicateString(s.id));
        }
        if s.points.is_empty() {
            return Err(ArrangementError::EmptyString(s.id));
        }
        if s.points.windows(2).any(|w| w[0] == w[1]) {
            return Err(ArrangementError::DegenerateSegment(s.id));
        }
    }
    Ok(())
}

fn point_on_segment(p: Point, a: Point, b: Point) -> bool {
    orient(a, b, p) == 0 && geom::on_segment(a, b, p)
}

/// Builds the arrangement graph and one region per string.
pub fn build_arrangement(scene: &StringScene) -> Result<ArrangementOutput, ArrangementError> {
    validate_scene(scene)?;
    let strings = &scene.strings;
    let sid = |i: usize| strings[i].id;
    let mut segs = Vec::new();
    for (si, s) in strings.iter().enumerate() {
        if s.points.len() == 1 {
            segs.push(Seg { string: si, index: 0, a: s.points[0], b: s.points[0] });
        }
        for (k, w) in s.points.windows(2).enumerate() {
            segs.push(Seg { string: si, index: k, a: w[0], b: w[1] });
        }
    }
    // points lying on each segment, and strings through each point
    let mut on_seg: Vec<Vec<RatPoint>> = segs.iter().map(|s| vec![RatPoint::integer(s.a), RatPoint::integer(s.b)]).collect();
    let mut through: BTreeMap<RatPoint, BTreeSet<usize>> = BTreeMap::new();
    let mut polyline_points: BTreeSet<RatPoint> = BTreeSet::new();
    for s in &segs {
        for p in [s.a, s.b] {
            let rp = RatPoint::integer(p);
            through.entry(rp).or_default().insert(s.string);
            polyline_points.insert(rp);
        }
    }
    let mut touches: BTreeSet<(i64, i64)> = BTreeSet::new();
    for i in 0..segs.len() {
        for j in i + 1..segs.len() {
            let (s, t) = (&segs[i], &segs[j]);
            let hit = if s.a == s.b || t.a == t.b {
                let (p, o) = if s.a == s.b { (s.a, t) } else { (t.a, s) };
                if point_on_segment(p, o.a, o.b) {
                    SegmentIntersection::Point(RatPoint::integer(p))
                } else {
                    SegmentIntersection::None
                }
            } else {
                segment_intersect(s.a, s.b, t.a, t.b)
            };
            let p = match hit {
                SegmentIntersection::None => continue,
                SegmentIntersection::Violation => return Err(violation(sid(s.string), sid(t.string), "collinear overlap")),
                SegmentIntersection::Point(p) => p,
            };
            if s.string == t.string {
                let shared = if s.index + 1 == t.index { Some(s.b) } else { None };
                if shared.map(RatPoint::integer) != Some(p) {
                    return Err(violation(sid(s.string), sid(t.string), "string intersects itself"));
                }
                continue;
            }
            if polyline_points.contains(&p) {
                let (a, b) = (sid(s.string), sid(t.string));
                touches.insert((a.min(b), a.max(b)));
            }
            on_seg[i].push(p);
            on_seg[j].push(p);
            let e = through.entry(p).or_default();
            e.insert(s.string);
            e.insert(t.string);
        }
    }
    for (p, ss) in &through {
        if ss.len() >= 3 {
            let v: Vec<usize> = ss.iter().copied().collect();
            return Err(violation(sid(v[0]), sid(v[1]), &format!("three strings meet at {}/{},{}/{}", p.x, p.d, p.y, p.d)));
        }
    }
    let points: Vec<RatPoint> = through.keys().copied().collect();
    let index: HashMap<RatPoint, usize> = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let crossings = points.len() - polyline_points.len();
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (k, s) in segs.iter().enumerate() {
        let list = &mut on_seg[k];
        let base = s.a;
        let r = sub(s.b, s.a);
        // order along the segment by the projection onto its direction
        let key = |p: &RatPoint| (((p.x - base.0 as i128 * p.d) * r.0 + (p.y - base.1 as i128 * p.d) * r.1), p.d);
        list.sort_by(|p, q| {
            let (a, da) = key(p);
            let (b, db) = key(q);
            (a * db).cmp(&(b * da))
        });
        list.dedup();
        for w in list.windows(2) {
            let (u, v) = (index[&w[0]], index[&w[1]]);
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); strings.len()];
    for (p, ss) in &through {
        for &s in ss {
            members[s].push(index[p]);
        }
    }
    let regions = RegionSet::new(
        members.into_iter().enumerate().map(|(s, vs)| Region::new(strings[s].id as RegionId, vs)).collect(),
    );
    let edges: Vec<(i64, i64)> = edges.into_iter().map(|(a, b)| (a as i64, b as i64)).collect();
    let (graph, scale) = snap(&points, &edges)?;
    let meta = ArrangementMeta { polyline_vertices: polyline_points.len(), crossings, touches: touches.into_iter().collect(), scale };
    Ok(ArrangementOutput { graph, regions, meta })
}

fn round_div(n: i128, d: i128) -> i128 {
    (2 * n + d).div_euclid(2 * d)
}

fn snap(points: &[RatPoint], edges: &[(i64, i64)]) -> Result<(PlaneGraph, Scale), ArrangementError> {
    let mut l: i128 = 1;
    for p in points {
        l = l / gcd(l, p.d) * p.d;
        if l > EXACT_SCALE_LIMIT {
            break;
        }
    }
    let extent = points.iter().map(|p| (p.x.abs().max(p.y.abs())) / p.d + 1).max().unwrap_or(1);
    let fits = |factor: i128| extent.checked_mul(factor).is_some_and(|v| v < (1i128 << 60));
    if l <= EXACT_SCALE_LIMIT && fits(l) {
        let vs: Vec<(i64, Point)> =
            points.iter().enumerate().map(|(i, p)| (i as i64, ((p.x * (l / p.d)) as i64, (p.y * (l / p.d)) as i64))).collect();
        return Ok((PlaneGraph::new(vs, edges)?, Scale::Exact { factor: l as i64 }));
    }
    for bits in ROUNDING_BITS {
        let f = 1i128 << bits;
        if !fits(f) {
            break;
        }
        let vs: Vec<(i64, Point)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (i as i64, (round_div(p.x * f, p.d) as i64, round_div(p.y * f, p.d) as i64)))
            .collect();
        if let Ok(g) = PlaneGraph::new(vs, edges) {
            return Ok((g, Scale::Rounded { bits }));
        }
    }
    Err(ArrangementError::Snap)
}

/// Pairwise geometric intersection test over all segment pairs.
pub fn geometric_intersection_graph(scene: &StringScene) -> Vec<Vec<bool>> {
    let n = scene.strings.len();
    let segs: Vec<Vec<(Point, Point)>> = scene
        .strings
        .iter()
        .map(|s| {
            if s.points.len() == 1 {
                vec![(s.points[0], s.points[0])]
            } else {
                s.points.windows(2).map(|w| (w[0], w[1])).collect()
            }
        })
        .collect();
    let mut m = vec![vec![false; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let hit = segs[a].iter().any(|&(p1, p2)| segs[b].iter().any(|&(q1, q2)| geom::segments_touch(p1, p2, q1, q2)));
            m[a][b] = hit;
            m[b][a] = hit;
        }
    }
    m
}
