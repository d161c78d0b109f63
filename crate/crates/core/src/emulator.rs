//! The weighted planar emulator: contracted clusters plus one pendant node
//! per region.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{Clustering, CONSTANTS};
use crate::plane_graph::PlaneGraph;
use crate::regions::{RegionId, RegionSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EmulatorError {
    #[error("vertex {0} is not assigned to any cluster")]
    PartialClustering(usize),
    #[error("unknown region {0}")]
    UnknownRegion(RegionId),
    #[error("malformed emulator: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Cluster,
    Region,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmuNode {
    pub id: usize,
    pub kind: NodeKind,
    /// Cluster id or region id this node stands for.
    #[serde(rename = "ref")]
    pub reference: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emulator {
    nodes: Vec<EmuNode>,
    edges: Vec<(usize, usize, u64)>,
    representative: BTreeMap<RegionId, usize>,
    region_node: BTreeMap<RegionId, usize>,
    cluster_node: BTreeMap<usize, usize>,
    adj: Vec<Vec<(usize, u64)>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EmulatorStats {
    pub nodes: usize,
    pub edges: usize,
    pub cluster_nodes: usize,
    pub region_nodes: usize,
    pub max_degree: usize,
    pub weight_total: u64,
}

/// Contracts every cluster and attaches each region to the cluster holding
/// its lowest vertex. All edges get weight 171.
pub fn build_emulator(g: &PlaneGraph, rs: &RegionSet, c: &Clustering) -> Result<Emulator, EmulatorError> {
    let w = CONSTANTS.emulator_weight;
    if let Some(v) = c.assignment.iter().position(|&a| a >= c.len()) {
        return Err(EmulatorError::PartialClustering(v));
    }
    if c.assignment.len() != g.vertex_count() {
        return Err(EmulatorError::Malformed("clustering size differs from the graph".into()));
    }
    let k = c.len();
    let mut nodes: Vec<EmuNode> = (0..k).map(|i| EmuNode { id: i, kind: NodeKind::Cluster, reference: c.clusters[i].id }).collect();
    let mut edges = Vec::new();
    for &(a, b) in g.edges() {
        let (ca, cb) = (c.assignment[a], c.assignment[b]);
        if ca != cb {
            edges.push((ca.min(cb), ca.max(cb), w));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let mut representative = BTreeMap::new();
    for r in rs.regions() {
        let node = nodes.len();
        nodes.push(EmuNode { id: node, kind: NodeKind::Region, reference: r.id });
        let rep = c.assignment[r.lowest_vertex()];
        representative.insert(r.id, rep);
        edges.push((rep, node, w));
    }
    Emulator::from_parts(nodes, edges, representative)
}

impl Emulator {
    /// Assembles an emulator from raw parts, checking references.
    pub fn from_parts(
        nodes: Vec<EmuNode>,
        edges: Vec<(usize, usize, u64)>,
        representative: BTreeMap<RegionId, usize>,
    ) -> Result<Self, EmulatorError> {
        let mut region_node = BTreeMap::new();
        let mut cluster_node = BTreeMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.id != i {
                return Err(EmulatorError::Malformed(format!("node ids must be 0..n, got {} at {i}", n.id)));
            }
            let dup = match n.kind {
                NodeKind::Region => region_node.insert(n.reference, i),
                NodeKind::Cluster => cluster_node.insert(n.reference, i),
            };
            if dup.is_some() {
                return Err(EmulatorError::Malformed(format!("duplicate node reference {}", n.reference)));
            }
        }
        let mut adj = vec![Vec::new(); nodes.len()];
        for &(a, b, w) in &edges {
            if a >= nodes.len() || b >= nodes.len() || a == b {
                return Err(EmulatorError::Malformed(format!("bad edge ({a}, {b})")));
            }
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        for (&r, &c) in &representative {
            if !region_node.contains_key(&r) || !cluster_node.contains_key(&c) {
                return Err(EmulatorError::Malformed(format!("representative of region {r} is invalid")));
            }
        }
        Ok(Emulator { nodes, edges, representative, region_node, cluster_node, adj })
    }

    pub fn nodes(&self) -> &[EmuNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize, u64)] {
        &self.edges
    }

    pub fn representative(&self) -> &BTreeMap<RegionId, usize> {
        &self.representative
    }

    pub fn region_node(&self, r: RegionId) -> Option<usize> {
        self.region_node.get(&r).copied()
    }

    pub fn cluster_node(&self, c: usize) -> Option<usize> {
        self.cluster_node.get(&c).copied()
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adj[node].len()
    }

    /// Dijkstra from `node`; `None` for unreachable nodes.
    pub fn distances_from(&self, node: usize) -> Vec<Option<u64>> {
        let mut dist: Vec<Option<u64>> = vec![None; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        dist[node] = Some(0);
        heap.push(Reverse((0u64, node)));
        while let Some(Reverse((d, v))) = heap.pop() {
            if dist[v].is_some_and(|x| x < d) {
                continue;
            }
            for &(u, w) in &self.adj[v] {
                let nd = d + w;
                if dist[u].is_none_or(|x| nd < x) {
                    dist[u] = Some(nd);
                    heap.push(Reverse((nd, u)));
                }
            }
        }
        dist
    }
}

/// Weighted distance between two region nodes.
pub fn emulator_distance(e: &Emulator, ra: RegionId, rb: RegionId) -> Result<Option<u64>, EmulatorError> {
    let a = e.region_node(ra).ok_or(EmulatorError::UnknownRegion(ra))?;
    let b = e.region_node(rb).ok_or(EmulatorError::UnknownRegion(rb))?;
    Ok(e.distances_from(a)[b])
}

pub fn emulator_stats(e: &Emulator) -> EmulatorStats {
    EmulatorStats {
        nodes: e.nodes.len(),
        edges: e.edges.len(),
        cluster_nodes: e.cluster_node.len(),
        region_nodes: e.region_node.len(),
        max_degree: (0..e.nodes.len()).map(|v| e.degree(v)).max().unwrap_or(0),
        weight_total: e.edges.iter().map(|&(_, _, w)| w).sum(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{cluster, ClusterOptions, ClusterRecord};
    use crate::plane_graph::build_plane_graph;
    use crate::regions::Region;

    fn one_cluster(n: usize) -> Clustering {
        Clustering::from_clusters(n, vec![ClusterRecord { id: 0, vertices: (0..n).collect(), supernode: 0, net_point_region: 0, level: 0 }]).unwrap()
    }

    #[test]
    fn single_region_single_cluster() {
        let g = build_plane_graph(&[(0, 0)], &[]).unwrap();
        let rs = RegionSet::new(vec![Region::new(0, vec![0])]);
        let e = build_emulator(&g, &rs, &one_cluster(1)).unwrap();
        assert_eq!(e.nodes().len(), 2);
        assert_eq!(e.edges(), &[(0, 1, 171)]);
        assert_eq!(emulator_distance(&e, 0, 0).unwrap(), Some(0));
    }

    #[test]
    fn star_of_regions() {
        let g = build_plane_graph(&[(0, 0), (1, 0), (2, 0)], &[(0, 1), (1, 2)]).unwrap();
        let rs = RegionSet::new((0..3).map(|i| Region::new(i, vec![i])).collect());
        let e = build_emulator(&g, &rs, &one_cluster(3)).unwrap();
        let st = emulator_stats(&e);
        assert_eq!((st.nodes, st.edges, st.max_degree), (4, 3, 3));
        assert_eq!(emulator_distance(&e, 0, 2).unwrap(), Some(342));
        assert_eq!(emulator_distance(&e, 0, 9), Err(EmulatorError::UnknownRegion(9)));
    }

    #[test]
    fn empty_emulator_stats() {
        let e = Emulator::from_parts(vec![], vec![], BTreeMap::new()).unwrap();
        assert_eq!(emulator_stats(&e), EmulatorStats::default());
    }

    #[test]
    fn grid_counts_match_recount() {
        let w = 6;
        let coords: Vec<(i64, i64)> = (0..w * w).map(|v| ((v % w) as i64, (v / w) as i64)).collect();
        let mut edges = Vec::new();
        for v in 0..w * w {
            if v % w + 1 < w {
                edges.push((v, v + 1));
            }
            if v + w < w * w {
                edges.push((v, v + w));
            }
        }
        let g = build_plane_graph(&coords, &edges).unwrap();
        let rs = RegionSet::new((0..w * w).map(|v| Region::new(v, vec![v])).collect());
        let c = cluster(&g, &rs, ClusterOptions::default()).unwrap();
        let e = build_emulator(&g, &rs, &c).unwrap();
        let st = emulator_stats(&e);
        assert_eq!(st.nodes, c.len() + rs.len());
        let contracted = g.contract_partition(&c.parts()).unwrap();
        assert_eq!(st.edges, contracted.edge_count() + rs.len());
        for n in e.nodes().iter().filter(|n| n.kind == NodeKind::Region) {
            assert_eq!(e.degree(n.id), 1);
        }
        assert_eq!(st.weight_total, 171 * st.edges as u64);
    }

    #[test]
    fn partial_clustering_rejected() {
        let g = build_plane_graph(&[(0, 0), (1, 0)], &[(0, 1)]).unwrap();
        let rs = RegionSet::new(vec![Region::new(0, vec![0, 1])]);
        let c = Clustering { clusters: vec![], assignment: vec![usize::MAX, usize::MAX], trace: None };
        assert_eq!(build_emulator(&g, &rs, &c), Err(EmulatorError::PartialClustering(0)));
    }
}
