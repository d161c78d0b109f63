//! Regions over a base plane graph, the region contact graph, and shattering.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::PlaneGraph;
use crate::search::{self, UNREACHED};

pub type RegionId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegionError {
    #[error("region {0} is empty")]
    EmptyRegion(RegionId),
    #[error("region {0} does not induce a connected subgraph")]
    DisconnectedRegion(RegionId),
    #[error("region {0} references unknown vertex {1}")]
    UnknownVertex(RegionId, i64),
    #[error("region id {0} appears twice")]
    DuplicateRegion(RegionId),
}

/// A connected vertex subset. `vertices` are sorted dense indices of the base
/// graph the region lives on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub id: RegionId,
    /// The input region this one descends from through shattering.
    pub origin: RegionId,
    /// The region this one was directly shattered from.
    pub parent: Option<RegionId>,
    pub vertices: Vec<usize>,
}

impl Region {
    pub fn new(id: RegionId, mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Region { id, origin: id, parent: None, vertices }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn lowest_vertex(&self) -> usize {
        self.vertices[0]
    }
}

/// Regions kept in ascending id order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RegionSet {
    regions: Vec<Region>,
}

impl RegionSet {
    pub fn new(mut regions: Vec<Region>) -> Self {
        regions.sort_by_key(|r| r.id);
        RegionSet { regions }
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn into_regions(self) -> Vec<Region> {
        self.regions
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    pub fn position(&self, id: RegionId) -> Option<usize> {
        self.regions.binary_search_by_key(&id, |r| r.id).ok()
    }

    pub fn get(&self, id: RegionId) -> Option<&Region> {
        self.position(id).map(|i| &self.regions[i])
    }

    pub fn max_id(&self) -> Option<RegionId> {
        self.regions.last().map(|r| r.id)
    }

    /// Union of the vertex sets, ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.regions.iter().flat_map(|r| r.vertices.iter().copied()).collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Checks every region is nonempty and connected in `g`.
    pub fn validate(&self, g: &PlaneGraph) -> Result<(), RegionError> {
        for w in self.regions.windows(2) {
            if w[0].id == w[1].id {
                return Err(RegionError::DuplicateRegion(w[0].id));
            }
        }
        for r in &self.regions {
            if r.vertices.is_empty() {
                return Err(RegionError::EmptyRegion(r.id));
            }
            if !is_connected_in(g, &r.vertices) {
                return Err(RegionError::DisconnectedRegion(r.id));
            }
        }
        Ok(())
    }

    /// For every base vertex, the positions of the regions containing it.
    pub fn membership(&self, n: usize) -> Vec<Vec<usize>> {
        let mut m = vec![Vec::new(); n];
        for (i, r) in self.regions.iter().enumerate() {
            for &v in &r.vertices {
                m[v].push(i);
            }
        }
        m
    }

    /// Shatters every region by `s` (a vertex mask). Regions that do not
    /// split keep their id; new pieces receive sequential ids starting at
    /// `*next_id`, in order of lowest contained vertex.
    pub fn shatter_all(&self, g: &PlaneGraph, s: &[bool], next_id: &mut RegionId) -> RegionSet {
        let mut kept = Vec::new();
        let mut fresh: Vec<Region> = Vec::new();
        for r in &self.regions {
            let pieces = shatter_pieces(g, &r.vertices, s);
            if pieces.len() == 1 {
                kept.push(r.clone());
            } else {
                fresh.extend(pieces.into_iter().map(|vs| Region {
                    id: 0,
                    origin: r.origin,
                    parent: Some(r.id),
                    vertices: vs,
                }));
            }
        }
        fresh.sort_by_key(|p| (p.lowest_vertex(), p.parent));
        for p in &mut fresh {
            p.id = *next_id;
            *next_id += 1;
        }
        kept.extend(fresh);
        RegionSet::new(kept)
    }
}

pub(crate) fn is_connected_in(g: &PlaneGraph, vs: &[usize]) -> bool {
    if vs.is_empty() {
        return false;
    }
    let mask = search::mask_of(g.vertex_count(), vs);
    let d = search::bfs(g.vertex_count(), &vs[..1], |v| {
        g.rotation(v).iter().copied().filter(|&u| mask[u]).collect::<Vec<_>>()
    });
    vs.iter().all(|&v| d[v] != UNREACHED)
}

/// Validates raw regions (external vertex ids) and trims base vertices that
/// belong to no region. The trimmed graph may be disconnected.
pub fn make_region_set(g: &PlaneGraph, raw: &[(RegionId, Vec<i64>)]) -> Result<(PlaneGraph, RegionSet), RegionError> {
    let mut dense: Vec<(RegionId, Vec<usize>)> = Vec::with_capacity(raw.len());
    for (id, verts) in raw {
        if verts.is_empty() {
            return Err(RegionError::EmptyRegion(*id));
        }
        let mut vs = Vec::with_capacity(verts.len());
        for &x in verts {
            vs.push(g.index_of(x).ok_or(RegionError::UnknownVertex(*id, x))?);
        }
        vs.sort_unstable();
        vs.dedup();
        if !is_connected_in(g, &vs) {
            return Err(RegionError::DisconnectedRegion(*id));
        }
        dense.push((*id, vs));
    }
    let mut support: Vec<usize> = dense.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    support.sort_unstable();
    support.dedup();
    let (trimmed, map) = g.restrict(&support);
    let mut local = vec![usize::MAX; g.vertex_count()];
    for (i, &v) in map.iter().enumerate() {
        local[v] = i;
    }
    let regions: Vec<Region> =
        dense.into_iter().map(|(id, vs)| Region::new(id, vs.into_iter().map(|v| local[v]).collect())).collect();
    let set = RegionSet::new(regions);
    set.validate(&trimmed)?;
    Ok((trimmed, set))
}

/// Connected components of `G[R \ S]` and `G[R ∩ S]`, ordered by lowest vertex.
pub fn shatter_pieces(g: &PlaneGraph, region: &[usize], s: &[bool]) -> Vec<Vec<usize>> {
    let inside = region.iter().filter(|&&v| s[v]).count();
    if inside == 0 || inside == region.len() {
        return vec![region.to_vec()];
    }
    let n = g.vertex_count();
    let mut mask = vec![false; n];
    for &v in region {
        mask[v] = true;
    }
    let comps = search::components(n, &mask, |v| {
        let side = s[v];
        g.rotation(v).iter().copied().filter(move |&u| s[u] == side).collect::<Vec<_>>()
    });
    comps
}

/// Shatters one region by the vertex set `s` (dense indices). A region that
/// does not split is returned unchanged; pieces of a split get fresh ids.
pub fn shatter(g: &PlaneGraph, region: &Region, s: &[usize], next_id: &mut RegionId) -> Vec<Region> {
    let mask = search::mask_of(g.vertex_count(), s);
    let pieces = shatter_pieces(g, &region.vertices, &mask);
    if pieces.len() == 1 {
        return vec![region.clone()];
    }
    pieces
        .into_iter()
        .map(|vs| {
            let id = *next_id;
            *next_id += 1;
            Region { id, origin: region.origin, parent: Some(region.id), vertices: vs }
        })
        .collect()
}

/// Subdivides every edge; a midpoint joins a region iff both endpoints did.
/// The contact graph of the result equals the intersection graph of the input.
pub fn intersection_to_contact(g: &PlaneGraph, rs: &RegionSet) -> (PlaneGraph, RegionSet) {
    let n = g.vertex_count();
    let sub = g.subdivide();
    let regions = rs
        .regions()
        .iter()
        .map(|r| {
            let mut vs = r.vertices.clone();
            for (e, &(a, b)) in g.edges().iter().enumerate() {
                if r.contains(a) && r.contains(b) {
                    vs.push(n + e);
                }
            }
            Region { vertices: { vs.sort_unstable(); vs }, ..r.clone() }
        })
        .collect();
    (sub, RegionSet::new(regions))
}

/// Region contact graph: nodes are positions in the region set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContactGraph {
    ids: Vec<RegionId>,
    adj: Vec<Vec<usize>>,
}

impl ContactGraph {
    pub fn new(g: &PlaneGraph, rs: &RegionSet) -> Self {
        let members = rs.membership(g.vertex_count());
        Self::from_parts(g, rs.regions(), &members)
    }

    /// `members[v]` lists positions (in `regions`) of regions containing `v`.
    pub(crate) fn from_parts(g: &PlaneGraph, regions: &[Region], members: &[Vec<usize>]) -> Self {
        let k = regions.len();
        let mut stamp = vec![usize::MAX; k];
        let mut adj = vec![Vec::new(); k];
        for (a, r) in regions.iter().enumerate() {
            stamp[a] = a;
            for &v in &r.vertices {
                for u in std::iter::once(v).chain(g.rotation(v).iter().copied()) {
                    for &b in &members[u] {
                        if stamp[b] != a {
                            stamp[b] = a;
                            adj[a].push(b);
                        }
                    }
                }
            }
            adj[a].sort_unstable();
        }
        ContactGraph { ids: regions.iter().map(|r| r.id).collect(), adj }
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn region_id(&self, node: usize) -> RegionId {
        self.ids[node]
    }

    pub fn node_of(&self, id: RegionId) -> Option<usize> {
        self.ids.binary_search(&id).ok().or_else(|| self.ids.iter().position(|&x| x == id))
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Hop distances from `node` to every node (`UNREACHED` when disconnected).
    pub fn distances_from(&self, node: usize) -> Vec<u32> {
        search::bfs(self.node_count(), &[node], |v| self.adj[v].iter().copied())
    }

    /// BFS restricted to nodes with `allowed[node]`, up to `max_depth`.
    pub fn distances_within(&self, sources: &[usize], allowed: &[bool], max_depth: u32) -> Vec<u32> {
        search::bfs_bounded(self.node_count(), sources, max_depth, |v| {
            self.adj[v].iter().copied().filter(|&w| allowed[w]).collect::<Vec<_>>()
        })
    }

    /// Canonical shortest path between two nodes: BFS from `a` scanning
    /// neighbors in ascending order.
    pub fn shortest_path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        search::bfs_path(self.node_count(), a, |v| v == b, |v| self.adj[v].iter().copied())
    }

    /// Contact distance between two regions by id.
    pub fn distance(&self, r1: RegionId, r2: RegionId) -> Option<u32> {
        let (a, b) = (self.node_of(r1)?, self.node_of(r2)?);
        let d = self.distances_from(a)[b];
        (d != UNREACHED).then_some(d)
    }
}

pub fn contact_graph(g: &PlaneGraph, rs: &RegionSet) -> ContactGraph {
    ContactGraph::new(g, rs)
}

pub fn contact_distance(cg: &ContactGraph, r1: RegionId, r2: RegionId) -> Option<u32> {
    cg.distance(r1, r2)
}

/// Groups regions of `rs` by the connected component of `g` they lie in.
pub fn split_by_component(g: &PlaneGraph, rs: &RegionSet) -> Vec<(Vec<usize>, Vec<Region>)> {
    let comps = g.components();
    let mut comp_of = vec![0; g.vertex_count()];
    for (c, vs) in comps.iter().enumerate() {
        for &v in vs {
            comp_of[v] = c;
        }
    }
    let mut grouped: HashMap<usize, Vec<Region>> = HashMap::new();
    for r in rs.regions() {
        grouped.entry(comp_of[r.lowest_vertex()]).or_default().push(r.clone());
    }
    comps
        .into_iter()
        .enumerate()
        .map(|(c, vs)| (vs, grouped.remove(&c).unwrap_or_default()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plane_graph::build_plane_graph;

    fn path(n: usize) -> PlaneGraph {
        let coords: Vec<(i64, i64)> = (0..n as i64).map(|i| (i, 0)).collect();
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        build_plane_graph(&coords, &edges).unwrap()
    }

    fn grid(w: usize, h: usize) -> PlaneGraph {
        let coords: Vec<(i64, i64)> = (0..w * h).map(|v| ((v % w) as i64, (v / w) as i64)).collect();
        let mut edges = Vec::new();
        for v in 0..w * h {
            if v % w + 1 < w {
                edges.push((v, v + 1));
            }
            if v + w < w * h {
                edges.push((v, v + w));
            }
        }
        build_plane_graph(&coords, &edges).unwrap()
    }

    /// Definitional double loop over region pairs and vertex pairs.
    fn brute_adjacent(g: &PlaneGraph, a: &Region, b: &Region) -> bool {
        a.vertices.iter().any(|&x| b.vertices.iter().any(|&y| x == y || g.has_edge(x, y)))
    }

    #[test]
    fn trimming() {
        let g = grid(3, 3);
        let raw = vec![(0, (0..9).collect::<Vec<i64>>())];
        let (t, rs) = make_region_set(&g, &raw).unwrap();
        assert_eq!(t.vertex_count(), 9);
        assert_eq!(rs.len(), 1);
        let singles: Vec<(RegionId, Vec<i64>)> = (0..9).map(|v| (v as usize, vec![v])).collect();
        assert_eq!(make_region_set(&g, &singles).unwrap().0.vertex_count(), 9);
        let two = vec![(0, vec![0, 1, 2, 5]), (1, vec![3, 6, 7])];
        let (t, rs) = make_region_set(&g, &two).unwrap();
        assert_eq!(t.vertex_count(), 7);
        assert_eq!(rs.support().len(), 7);
        assert_eq!(make_region_set(&g, &[(4, vec![0, 8])]).unwrap_err(), RegionError::DisconnectedRegion(4));
        assert_eq!(make_region_set(&g, &[(4, vec![])]).unwrap_err(), RegionError::EmptyRegion(4));
    }

    #[test]
    fn contact_basics() {
        let g = path(4);
        let one = RegionSet::new(vec![Region::new(0, vec![0, 1, 2, 3])]);
        let cg = contact_graph(&g, &one);
        assert_eq!((cg.node_count(), cg.edge_count()), (1, 0));
        assert_eq!(contact_distance(&cg, 0, 0), Some(0));
        let two = RegionSet::new(vec![Region::new(0, vec![0, 1]), Region::new(1, vec![2, 3])]);
        let cg = contact_graph(&g, &two);
        assert_eq!(cg.edge_count(), 1);
        assert_eq!(contact_distance(&cg, 0, 1), Some(1));
    }

    #[test]
    fn overlapping_intervals_match_brute_force() {
        let g = path(20);
        let rs = RegionSet::new(
            (0..5).map(|i| Region::new(i, (i * 4..(i * 4 + 5).min(20)).collect())).collect(),
        );
        let cg = contact_graph(&g, &rs);
        for a in 0..5 {
            for b in 0..5 {
                if a != b {
                    assert_eq!(cg.adjacent(a, b), brute_adjacent(&g, &rs.regions()[a], &rs.regions()[b]));
                }
            }
        }
    }

    #[test]
    fn chain_distance() {
        let k = 6;
        let g = path(2 * k);
        let rs = RegionSet::new((0..k).map(|i| Region::new(i, vec![2 * i, 2 * i + 1])).collect());
        let cg = contact_graph(&g, &rs);
        for i in 0..k {
            assert_eq!(contact_distance(&cg, 0, i), Some(i as u32));
        }
        assert_eq!(contact_distance(&cg, 0, k - 1), Some((k - 1) as u32));
    }

    #[test]
    fn shatter_path_at_middle() {
        let g = path(5);
        let r = Region::new(7, vec![0, 1, 2, 3, 4]);
        let mut next = 100;
        let pieces = shatter(&g, &r, &[2], &mut next);
        let sets: Vec<Vec<usize>> = pieces.iter().map(|p| p.vertices.clone()).collect();
        assert_eq!(sets, vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert!(pieces.iter().all(|p| p.origin == 7 && p.parent == Some(7)));
        assert_eq!(shatter(&g, &r, &[], &mut next), vec![r.clone()]);
        assert_eq!(shatter(&g, &r, &[0, 1, 2, 3, 4], &mut next), vec![r.clone()]);
    }

    #[test]
    fn shatter_all_crossing_paths() {
        // plus shape: horizontal 0-1-2, vertical 3-1-4
        let g = build_plane_graph(&[(0, 1), (1, 1), (2, 1), (1, 2), (1, 0)], &[(0, 1), (1, 2), (3, 1), (1, 4)]).unwrap();
        let rs = RegionSet::new(vec![Region::new(0, vec![0, 1, 2]), Region::new(1, vec![1, 3, 4])]);
        let mut next = 2;
        let s = search::mask_of(5, &[1, 3, 4]);
        let out = rs.shatter_all(&g, &s, &mut next);
        let sets: Vec<Vec<usize>> = out.regions().iter().map(|r| r.vertices.clone()).collect();
        assert_eq!(sets, vec![vec![1, 3, 4], vec![0], vec![1], vec![2]]);
        let none = vec![false; 5];
        assert_eq!(rs.shatter_all(&g, &none, &mut next), rs);
        let all = vec![true; 5];
        assert_eq!(rs.shatter_all(&g, &all, &mut next), rs);
    }

    #[test]
    fn conversion_keeps_intersection_semantics() {
        let g = path(2);
        let rs = RegionSet::new(vec![Region::new(0, vec![0]), Region::new(1, vec![1])]);
        assert_eq!(contact_graph(&g, &rs).edge_count(), 1);
        let (g2, rs2) = intersection_to_contact(&g, &rs);
        assert_eq!(contact_graph(&g2, &rs2).edge_count(), 0);
        let shared = RegionSet::new(vec![Region::new(0, vec![0, 1]), Region::new(1, vec![1])]);
        let (g3, rs3) = intersection_to_contact(&g, &shared);
        assert_eq!(rs3.get(0).unwrap().vertices, vec![0, 1, 2]);
        assert_eq!(contact_graph(&g3, &rs3).edge_count(), 1);
        let far = path(4);
        let rs = RegionSet::new(vec![Region::new(0, vec![0]), Region::new(1, vec![3])]);
        let (g4, rs4) = intersection_to_contact(&far, &rs);
        assert_eq!(contact_graph(&g4, &rs4).edge_count(), 0);
    }
}
