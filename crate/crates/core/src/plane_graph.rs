//! Plane graphs drawn with straight integer segments.
//!
//! The combinatorial embedding is derived from the drawing: each vertex keeps
//! its neighbors in counterclockwise angular order, faces are traced with the
//! "turn to the clockwise-next neighbor" rule (face on the left), and a face
//! walk whose direction vector winds once clockwise (total turning `-2pi`) is
//! the outer boundary of its component.
//!
//! Vertices carry arbitrary integer ids; internally they are addressed by a
//! dense index in ascending id order, so "lowest id" and "lowest index" agree.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::geom::{self, angle_cmp, orient, segments_touch, sub, sweep_crossings, Point};
use crate::search;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlaneGraphError {
    #[error("edges ({0}, {1}) and ({2}, {3}) cross")]
    CrossingDrawing(i64, i64, i64, i64),
    #[error("vertices {0} and {1} share a coordinate")]
    DuplicateCoordinate(i64, i64),
    #[error("vertex id {0} appears twice")]
    DuplicateId(i64),
    #[error("edge ({0}, {1}) references an unknown vertex")]
    DanglingEdge(i64, i64),
    #[error("edge ({0}, {1}) is a loop or a repeated edge")]
    NonSimple(i64, i64),
    #[error("induced subgraph is not connected")]
    DisconnectedInduced,
    #[error("vertex set is not outer-bounded: {0}")]
    NotOuterBounded(String),
    #[error("part {0} does not induce a connected subgraph")]
    DisconnectedPart(usize),
    #[error("vertex {0} is not covered exactly once by the partition")]
    InvalidPartition(i64),
}

pub type Result<T> = std::result::Result<T, PlaneGraphError>;

/// A closed walk of directed edges `(tail, head)`, dense indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceWalk {
    pub darts: Vec<(usize, usize)>,
    /// Number of full turns of the walk direction; `+1` bounded, `-1` outer.
    pub winding: i32,
    pub is_outer: bool,
}

impl FaceWalk {
    pub fn len(&self) -> usize {
        self.darts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.darts.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct PlaneGraph {
    ids: Vec<i64>,
    coords: Vec<Point>,
    rotation: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    faces: Vec<FaceWalk>,
    index: HashMap<i64, usize>,
}

/// Builds a plane graph whose vertex ids are the positions in `coords`.
pub fn build_plane_graph(coords: &[Point], edges: &[(usize, usize)]) -> Result<PlaneGraph> {
    let vertices: Vec<(i64, Point)> = coords.iter().enumerate().map(|(i, &p)| (i as i64, p)).collect();
    let edges: Vec<(i64, i64)> = edges.iter().map(|&(a, b)| (a as i64, b as i64)).collect();
    PlaneGraph::new(vertices, &edges)
}

impl PlaneGraph {
    /// Validating constructor: distinct ids and coordinates, simple edges,
    /// crossing-free drawing.
    pub fn new(mut vertices: Vec<(i64, Point)>, edges: &[(i64, i64)]) -> Result<Self> {
        vertices.sort_by_key(|v| v.0);
        for w in vertices.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(PlaneGraphError::DuplicateId(w[0].0));
            }
        }
        let ids: Vec<i64> = vertices.iter().map(|v| v.0).collect();
        let coords: Vec<Point> = vertices.iter().map(|v| v.1).collect();
        let index: HashMap<i64, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut at: HashMap<Point, i64> = HashMap::with_capacity(coords.len());
        for (i, &p) in coords.iter().enumerate() {
            if let Some(&other) = at.get(&p) {
                return Err(PlaneGraphError::DuplicateCoordinate(other, ids[i]));
            }
            at.insert(p, ids[i]);
        }
        let mut dense = Vec::with_capacity(edges.len());
        let mut seen = HashSet::with_capacity(edges.len());
        for &(a, b) in edges {
            let (Some(&u), Some(&v)) = (index.get(&a), index.get(&b)) else {
                return Err(PlaneGraphError::DanglingEdge(a, b));
            };
            let key = (u.min(v), u.max(v));
            if u == v || !seen.insert(key) {
                return Err(PlaneGraphError::NonSimple(a, b));
            }
            dense.push(key);
        }
        if let Some((e, f)) = find_crossing(&coords, &dense) {
            let (a, b) = dense[e];
            let (c, d) = dense[f];
            return Err(PlaneGraphError::CrossingDrawing(ids[a], ids[b], ids[c], ids[d]));
        }
        Ok(Self::assemble(ids, coords, dense))
    }

    /// Builds the embedding without validating the drawing.
    fn assemble(ids: Vec<i64>, coords: Vec<Point>, mut edges: Vec<(usize, usize)>) -> Self {
        let n = ids.len();
        edges.sort_unstable();
        let mut rotation: Vec<Vec<usize>> = vec![Vec::new(); n];
        for &(u, v) in &edges {
            rotation[u].push(v);
            rotation[v].push(u);
        }
        for (v, nbrs) in rotation.iter_mut().enumerate() {
            let c = coords[v];
            nbrs.sort_by(|&a, &b| {
                let da = sub(coords[a], c);
                let db = sub(coords[b], c);
                angle_cmp(da, db).then_with(|| geom::dot(da, da).cmp(&geom::dot(db, db)))
            });
        }
        let index = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let faces = trace_faces(&coords, &rotation);
        PlaneGraph { ids, coords, rotation, edges, faces, index }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn id(&self, v: usize) -> i64 {
        self.ids[v]
    }

    pub fn ids(&self) -> &[i64] {
        &self.ids
    }

    pub fn index_of(&self, id: i64) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn coord(&self, v: usize) -> Point {
        self.coords[v]
    }

    pub fn coords(&self) -> &[Point] {
        &self.coords
    }

    /// Neighbors of `v` in counterclockwise order around `v`.
    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rotation[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rotation[v].len()
    }

    /// Edges as `(low, high)` dense index pairs, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn faces(&self) -> &[FaceWalk] {
        &self.faces
    }

    /// The outer boundary walk; for a disconnected graph, the one of the
    /// component containing the lowest non-isolated vertex.
    pub fn outer_face(&self) -> Option<&FaceWalk> {
        self.faces.iter().find(|f| f.is_outer)
    }

    /// Vertices on the outer boundary of their component (isolated vertices
    /// included), ascending.
    pub fn outer_vertices(&self) -> Vec<usize> {
        let mut mask = vec![false; self.vertex_count()];
        for f in self.faces.iter().filter(|f| f.is_outer) {
            for &(a, _) in &f.darts {
                mask[a] = true;
            }
        }
        for (v, nbrs) in self.rotation.iter().enumerate() {
            if nbrs.is_empty() {
                mask[v] = true;
            }
        }
        (0..self.vertex_count()).filter(|&v| mask[v]).collect()
    }

    pub fn outer_mask(&self) -> Vec<bool> {
        search::mask_of(self.vertex_count(), &self.outer_vertices())
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mask = vec![true; self.vertex_count()];
        search::components(self.vertex_count(), &mask, |v| self.rotation[v].iter().copied())
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Subgraph induced by `x` (dense indices), keeping coordinates and ids,
    /// together with the map from new dense index to the index in `self`.
    /// The subgraph may be disconnected.
    pub fn restrict(&self, x: &[usize]) -> (PlaneGraph, Vec<usize>) {
        let mut keep: Vec<usize> = x.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut local = vec![usize::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            local[v] = i;
        }
        let ids = keep.iter().map(|&v| self.ids[v]).collect();
        let coords = keep.iter().map(|&v| self.coords[v]).collect();
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| local[a] != usize::MAX && local[b] != usize::MAX)
            .map(|&(a, b)| (local[a], local[b]))
            .collect();
        (Self::assemble(ids, coords, edges), keep)
    }

    /// Induced subgraph on a connected vertex set; the outer face is
    /// recomputed from the inherited drawing.
    pub fn induced_plane_subgraph(&self, x: &[usize]) -> Result<PlaneGraph> {
        self.induced_with_map(x).map(|(g, _)| g)
    }

    pub fn induced_with_map(&self, x: &[usize]) -> Result<(PlaneGraph, Vec<usize>)> {
        let (g, map) = self.restrict(x);
        if !g.is_connected() {
            return Err(PlaneGraphError::DisconnectedInduced);
        }
        Ok((g, map))
    }

    /// The 1 or 2 vertices of `h` joined to `w` by an edge of the outer face.
    ///
    /// With `w` empty, `h` must be the whole graph and the result is the
    /// lowest-id outer vertex.
    pub fn critical_vertices(&self, h: &[usize], w: &[usize]) -> Result<Vec<usize>> {
        let n = self.vertex_count();
        let h_mask = search::mask_of(n, h);
        let outer = self.outer_mask();
        if w.is_empty() {
            if h_mask.iter().filter(|&&b| b).count() != n || n == 0 {
                return Err(PlaneGraphError::NotOuterBounded("empty W requires H to be the whole graph".into()));
            }
            let first = (0..n).find(|&v| outer[v]).expect("nonempty graph has an outer vertex");
            return Ok(vec![first]);
        }
        let w_mask = search::mask_of(n, w);
        if h.iter().any(|&v| w_mask[v]) {
            return Err(PlaneGraphError::NotOuterBounded("H and W overlap".into()));
        }
        if !h.iter().any(|&v| outer[v]) || !w.iter().any(|&v| outer[v]) {
            return Err(PlaneGraphError::NotOuterBounded("H or W misses the outer face".into()));
        }
        // H must be a whole component of the graph minus W.
        let comp = search::bfs(n, &h[..1], |v| {
            self.rotation[v].iter().copied().filter(|&u| !w_mask[u]).collect::<Vec<_>>()
        });
        let reached = comp.iter().filter(|&&d| d != search::UNREACHED).count();
        if reached != h.len() || h.iter().any(|&v| comp[v] == search::UNREACHED) {
            return Err(PlaneGraphError::NotOuterBounded("H is not a component of the graph minus W".into()));
        }
        let mut crit: Vec<usize> = Vec::new();
        for f in self.faces.iter().filter(|f| f.is_outer) {
            for &(a, b) in &f.darts {
                if h_mask[a] && w_mask[b] {
                    crit.push(a);
                } else if h_mask[b] && w_mask[a] {
                    crit.push(b);
                }
            }
        }
        crit.sort_unstable();
        crit.dedup();
        if crit.is_empty() || crit.len() > 2 {
            return Err(PlaneGraphError::NotOuterBounded(format!("{} critical vertices", crit.len())));
        }
        Ok(crit)
    }

    /// Contracts every part (a connected vertex set) to a node. Parts are
    /// given as dense index lists and must partition the vertex set.
    pub fn contract_partition(&self, parts: &[Vec<usize>]) -> Result<SimpleGraph> {
        let n = self.vertex_count();
        let mut part_of = vec![usize::MAX; n];
        for (p, part) in parts.iter().enumerate() {
            for &v in part {
                if part_of[v] != usize::MAX {
                    return Err(PlaneGraphError::InvalidPartition(self.ids[v]));
                }
                part_of[v] = p;
            }
        }
        if let Some(v) = part_of.iter().position(|&p| p == usize::MAX) {
            return Err(PlaneGraphError::InvalidPartition(self.ids[v]));
        }
        for (p, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(PlaneGraphError::DisconnectedPart(p));
            }
            let d = search::bfs(n, &part[..1], |v| {
                self.rotation[v].iter().copied().filter(|&u| part_of[u] == p).collect::<Vec<_>>()
            });
            if part.iter().any(|&v| d[v] == search::UNREACHED) {
                return Err(PlaneGraphError::DisconnectedPart(p));
            }
        }
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); parts.len()];
        for &(a, b) in &self.edges {
            let (pa, pb) = (part_of[a], part_of[b]);
            if pa != pb {
                adj[pa].push(pb);
                adj[pb].push(pa);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(SimpleGraph { adj })
    }

    /// Replaces every edge by a path of length two. Coordinates are doubled;
    /// the midpoint of `edges()[e]` gets dense index `n + e` and id
    /// `max_id + 1 + e`.
    pub fn subdivide(&self) -> PlaneGraph {
        let n = self.vertex_count();
        let next_id = self.ids.iter().copied().max().map_or(0, |m| m + 1);
        let mut ids = self.ids.clone();
        let mut coords: Vec<Point> = self.coords.iter().map(|&(x, y)| (2 * x, 2 * y)).collect();
        let mut edges = Vec::with_capacity(2 * self.edges.len());
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            ids.push(next_id + e as i64);
            let (pa, pb) = (self.coords[a], self.coords[b]);
            coords.push((pa.0 + pb.0, pa.1 + pb.1));
            edges.push((a, n + e));
            edges.push((b, n + e));
        }
        Self::assemble(ids, coords, edges)
    }

    /// Whether the stored drawing is crossing-free (quadratic worst case).
    pub fn is_crossing_free(&self) -> bool {
        find_crossing(&self.coords, &self.edges).is_none()
    }
}

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimpleGraph {
    pub adj: Vec<Vec<usize>>,
}

impl SimpleGraph {
    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn distances_from(&self, src: usize) -> Vec<u32> {
        search::bfs(self.adj.len(), &[src], |v| self.adj[v].iter().copied())
    }
}

fn trace_faces(coords: &[Point], rotation: &[Vec<usize>]) -> Vec<FaceWalk> {
    let n = rotation.len();
    let mut pos: HashMap<(usize, usize), usize> = HashMap::new();
    for (v, nbrs) in rotation.iter().enumerate() {
        for (i, &w) in nbrs.iter().enumerate() {
            pos.insert((v, w), i);
        }
    }
    let mut visited: Vec<Vec<bool>> = rotation.iter().map(|r| vec![false; r.len()]).collect();
    let mut faces = Vec::new();
    let mut outer_seen = vec![false; n];
    for v in 0..n {
        for i in 0..rotation[v].len() {
            if visited[v][i] {
                continue;
            }
            let mut darts = Vec::new();
            let (mut a, mut k) = (v, i);
            while !visited[a][k] {
                visited[a][k] = true;
                let b = rotation[a][k];
                darts.push((a, b));
                let p = pos[&(b, a)];
                let deg = rotation[b].len();
                k = (p + deg - 1) % deg;
                a = b;
            }
            let dir = |d: (usize, usize)| sub(coords[d.1], coords[d.0]);
            let winding: i32 = (0..darts.len())
                .map(|j| sweep_crossings(dir(darts[j]), dir(darts[(j + 1) % darts.len()])))
                .sum();
            faces.push(FaceWalk { darts, winding, is_outer: false });
        }
    }
    // One outer walk per component; mark the first -1 walk met per component.
    let comp = {
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(x) = stack.pop() {
                for &y in &rotation[x] {
                    if label[y] == usize::MAX {
                        label[y] = next;
                        stack.push(y);
                    }
                }
            }
            next += 1;
        }
        label
    };
    for f in &mut faces {
        let c = comp[f.darts[0].0];
        if f.winding == -1 && !outer_seen[c] {
            outer_seen[c] = true;
            f.is_outer = true;
        }
    }
    faces
}

/// Returns a pair of edge indices whose segments meet illegally.
fn find_crossing(coords: &[Point], edges: &[(usize, usize)]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..edges.len()).collect();
    let xmin = |e: usize| coords[edges[e].0].0.min(coords[edges[e].1].0);
    let xmax = |e: usize| coords[edges[e].0].0.max(coords[edges[e].1].0);
    order.sort_by_key(|&e| xmin(e));
    for (i, &e) in order.iter().enumerate() {
        let (a, b) = edges[e];
        let (pa, pb) = (coords[a], coords[b]);
        let (ylo, yhi) = (pa.1.min(pb.1), pa.1.max(pb.1));
        let hi = xmax(e);
        for &f in &order[i + 1..] {
            if xmin(f) > hi {
                break;
            }
            let (c, d) = edges[f];
            let (pc, pd) = (coords[c], coords[d]);
            if pc.1.max(pd.1) < ylo || pc.1.min(pd.1) > yhi {
                continue;
            }
            let shared = [a, b].iter().find(|&&x| x == c || x == d).copied();
            let bad = match shared {
                Some(s) => {
                    let u = if s == a { pb } else { pa };
                    let w = if s == c { pd } else { pc };
                    let o = coords[s];
                    orient(o, u, w) == 0 && geom::dot(sub(u, o), sub(w, o)) > 0
                }
                None => segments_touch(pa, pb, pc, pd),
            };
            if bad {
                return Some((e.min(f), e.max(f)));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn grid(w: i64, h: i64) -> PlaneGraph {
        let mut coords = Vec::new();
        for y in 0..h {
            for x in 0..w {
                coords.push((x, y));
            }
        }
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                let v = (y * w + x) as usize;
                if x + 1 < w {
                    edges.push((v, v + 1));
                }
                if y + 1 < h {
                    edges.push((v, v + w as usize));
                }
            }
        }
        build_plane_graph(&coords, &edges).unwrap()
    }

    fn euler_ok(g: &PlaneGraph) -> bool {
        let v = g.vertex_count() as i64;
        let e = g.edge_count() as i64;
        let f = g.faces().len() as i64;
        v - e + f == 2
    }

    #[test]
    fn triangle_has_two_faces_and_clockwise_outer() {
        let g = build_plane_graph(&[(0, 0), (2, 0), (1, 2)], &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.faces().len(), 2);
        let outer = g.outer_face().unwrap();
        assert_eq!(outer.len(), 3);
        assert_eq!(outer.winding, -1);
        // clockwise: 0 -> 2 -> 1
        assert!(outer.darts.contains(&(0, 2)) && outer.darts.contains(&(2, 1)) && outer.darts.contains(&(1, 0)));
        assert_eq!(g.outer_vertices(), vec![0, 1, 2]);
        assert!(euler_ok(&g));
    }

    #[test]
    fn single_edge_one_outer_face() {
        let g = build_plane_graph(&[(0, 0), (1, 0)], &[(0, 1)]).unwrap();
        assert_eq!(g.faces().len(), 1);
        assert!(g.faces()[0].is_outer);
        assert_eq!(g.faces()[0].winding, -1);
    }

    #[test]
    fn single_vertex_is_outer() {
        let g = build_plane_graph(&[(3, 4)], &[]).unwrap();
        assert_eq!(g.outer_vertices(), vec![0]);
        assert!(g.faces().is_empty());
    }

    #[test]
    fn grid_faces_and_outer_vertices() {
        let g = grid(3, 3);
        assert_eq!(g.faces().len(), 5);
        assert!(euler_ok(&g));
        assert_eq!(g.faces().iter().filter(|f| f.is_outer).count(), 1);
        assert_eq!(g.faces().iter().map(FaceWalk::len).sum::<usize>(), 2 * g.edge_count());
        assert_eq!(g.outer_vertices(), vec![0, 1, 2, 3, 5, 6, 7, 8]);
    }

    #[test]
    fn induced_ring_of_grid() {
        let g = grid(3, 3);
        let x: Vec<usize> = vec![0, 1, 2, 3, 5, 6, 7, 8];
        let h = g.induced_plane_subgraph(&x).unwrap();
        assert_eq!(h.edge_count(), 8);
        assert_eq!(h.faces().len(), 2);
        assert_eq!(h.outer_face().unwrap().len(), 8);
        assert_eq!(h.outer_vertices().len(), 8);
        let all: Vec<usize> = (0..9).collect();
        let same = g.induced_plane_subgraph(&all).unwrap();
        assert_eq!(same.edges(), g.edges());
        assert_eq!(same.faces(), g.faces());
        let one = g.induced_plane_subgraph(&[4]).unwrap();
        assert_eq!(one.vertex_count(), 1);
        assert_eq!(g.induced_plane_subgraph(&[0, 8]).unwrap_err(), PlaneGraphError::DisconnectedInduced);
    }

    #[test]
    fn construction_errors() {
        let e = build_plane_graph(&[(0, 0), (2, 2), (0, 2), (2, 0)], &[(0, 1), (2, 3)]).unwrap_err();
        assert!(matches!(e, PlaneGraphError::CrossingDrawing(..)));
        let e = build_plane_graph(&[(0, 0), (0, 0)], &[]).unwrap_err();
        assert_eq!(e, PlaneGraphError::DuplicateCoordinate(0, 1));
        let e = build_plane_graph(&[(0, 0)], &[(0, 1)]).unwrap_err();
        assert_eq!(e, PlaneGraphError::DanglingEdge(0, 1));
        // overlapping collinear edges sharing an endpoint
        let e = build_plane_graph(&[(0, 0), (2, 0), (4, 0)], &[(0, 1), (0, 2)]).unwrap_err();
        assert!(matches!(e, PlaneGraphError::CrossingDrawing(..)));
        // vertex lying on the interior of another edge
        let e = build_plane_graph(&[(0, 0), (4, 0), (2, 0), (2, 3)], &[(0, 1), (2, 3)]).unwrap_err();
        assert!(matches!(e, PlaneGraphError::CrossingDrawing(..)));
    }

    #[test]
    fn critical_vertices_of_cycle() {
        let pts = [(2, 0), (4, 1), (4, 3), (2, 4), (0, 3), (0, 1)];
        let edges: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let g = build_plane_graph(&pts, &edges).unwrap();
        assert_eq!(g.critical_vertices(&[1, 2, 3, 4, 5], &[0]).unwrap(), vec![1, 5]);
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(g.critical_vertices(&all, &[]).unwrap(), vec![0]);
        assert!(g.critical_vertices(&[1, 2], &[0]).is_err());
    }

    #[test]
    fn contraction() {
        let g = grid(3, 2);
        let rows = vec![vec![0, 1, 2], vec![3, 4, 5]];
        let c = g.contract_partition(&rows).unwrap();
        assert_eq!(c.adj, vec![vec![1], vec![0]]);
        let single = g.contract_partition(&[(0..6).collect()]).unwrap();
        assert_eq!(single.node_count(), 1);
        assert_eq!(single.edge_count(), 0);
        let singletons: Vec<Vec<usize>> = (0..6).map(|v| vec![v]).collect();
        assert_eq!(g.contract_partition(&singletons).unwrap().edge_count(), g.edge_count());
        assert_eq!(g.contract_partition(&[vec![0, 2], vec![1, 3, 4, 5]]).unwrap_err(), PlaneGraphError::DisconnectedPart(0));
    }

    #[test]
    fn subdivision_counts() {
        let e = build_plane_graph(&[(0, 0), (1, 0)], &[(0, 1)]).unwrap().subdivide();
        assert_eq!((e.vertex_count(), e.edge_count()), (3, 2));
        let t = build_plane_graph(&[(0, 0), (2, 0), (1, 2)], &[(0, 1), (1, 2), (2, 0)]).unwrap().subdivide();
        assert_eq!((t.vertex_count(), t.edge_count()), (6, 6));
        assert!(t.rotation(0).len() == 2 && t.faces().len() == 2);
        let g = grid(3, 3).subdivide();
        assert_eq!((g.vertex_count(), g.edge_count()), (21, 24));
        assert!(euler_ok(&g));
        assert!(g.is_crossing_free());
    }
}
