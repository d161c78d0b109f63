//! JSON documents exchanged between pipeline stages. Files carry external
//! vertex ids; the trace document uses dense indices (position in ascending
//! external id order of the instance).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{ClusterRecord, Clustering, Trace};
use crate::emulator::{EmuNode, Emulator, EmulatorError};
use crate::plane_graph::{PlaneGraph, PlaneGraphError};
use crate::regions::{make_region_set, RegionError, RegionId, RegionSet};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Plane(#[from] PlaneGraphError),
    #[error(transparent)]
    Region(#[from] RegionError),
    #[error(transparent)]
    Emulator(#[from] EmulatorError),
    #[error("{0}")]
    Mismatch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: i64,
    pub x: i64,
    pub y: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneGraphDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<(i64, i64)>,
}

impl PlaneGraphDoc {
    pub fn from_graph(g: &PlaneGraph) -> Self {
        PlaneGraphDoc {
            vertices: (0..g.vertex_count()).map(|v| VertexDoc { id: g.id(v), x: g.coord(v).0, y: g.coord(v).1 }).collect(),
            edges: g.edges().iter().map(|&(a, b)| (g.id(a), g.id(b))).collect(),
        }
    }

    pub fn to_graph(&self) -> Result<PlaneGraph, PlaneGraphError> {
        PlaneGraph::new(self.vertices.iter().map(|v| (v.id, (v.x, v.y))).collect(), &self.edges)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegionDoc {
    pub id: RegionId,
    pub vertices: Vec<i64>,
}

/// Plane graph plus regions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<(i64, i64)>,
    pub regions: Vec<RegionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<serde_json::Value>,
}

/// A validated region instance. Base vertices outside every region are
/// dropped on load.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: PlaneGraph,
    pub regions: RegionSet,
    pub metadata: Option<serde_json::Value>,
}

impl Instance {
    pub fn new(graph: PlaneGraph, regions: RegionSet) -> Self {
        Instance { graph, regions, metadata: None }
    }

    pub fn from_doc(doc: &InstanceDoc) -> Result<Self, DocError> {
        let g = PlaneGraphDoc { vertices: doc.vertices.clone(), edges: doc.edges.clone() }.to_graph()?;
        let raw: Vec<(RegionId, Vec<i64>)> = doc.regions.iter().map(|r| (r.id, r.vertices.clone())).collect();
        let (graph, regions) = make_region_set(&g, &raw)?;
        Ok(Instance { graph, regions, metadata: doc.metadata.clone() })
    }

    pub fn to_doc(&self) -> InstanceDoc {
        let g = PlaneGraphDoc::from_graph(&self.graph);
        InstanceDoc {
            vertices: g.vertices,
            edges: g.edges,
            regions: self
                .regions
                .regions()
                .iter()
                .map(|r| RegionDoc { id: r.id, vertices: r.vertices.iter().map(|&v| self.graph.id(v)).collect() })
                .collect(),
            metadata: self.metadata.clone(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, DocError> {
        Self::from_doc(&serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("instance serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterDoc {
    pub id: usize,
    pub vertices: Vec<i64>,
    pub supernode: usize,
    pub net_point_region: RegionId,
    #[serde(default)]
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusteringDoc {
    pub clusters: Vec<ClusterDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace_file: Option<String>,
}

impl ClusteringDoc {
    pub fn from_clustering(g: &PlaneGraph, c: &Clustering, trace_file: Option<String>) -> Self {
        ClusteringDoc {
            clusters: c
                .clusters
                .iter()
                .map(|r| ClusterDoc {
                    id: r.id,
                    vertices: r.vertices.iter().map(|&v| g.id(v)).collect(),
                    supernode: r.supernode,
                    net_point_region: r.net_point_region,
                    level: r.level,
                })
                .collect(),
            trace_file,
        }
    }

    pub fn to_clustering(&self, g: &PlaneGraph) -> Result<Clustering, DocError> {
        let mut records = Vec::with_capacity(self.clusters.len());
        for c in &self.clusters {
            let mut vertices = Vec::with_capacity(c.vertices.len());
            for &x in &c.vertices {
                vertices.push(g.index_of(x).ok_or_else(|| DocError::Mismatch(format!("cluster {} names unknown vertex {x}", c.id)))?);
            }
            vertices.sort_unstable();
            records.push(ClusterRecord { id: c.id, vertices, supernode: c.supernode, net_point_region: c.net_point_region, level: c.level });
        }
        Clustering::from_clusters(g.vertex_count(), records).map_err(|e| DocError::Mismatch(e.to_string()))
    }
}

/// Trace file: the per-call instrumentation of a clustering run.
pub fn trace_to_json(t: &Trace) -> String {
    serde_json::to_string(t).expect("trace serializes")
}

pub fn trace_from_json(s: &str) -> Result<Trace, DocError> {
    Ok(serde_json::from_str(s)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmulatorDoc {
    pub nodes: Vec<EmuNode>,
    pub edges: Vec<(usize, usize, u64)>,
    pub representative: BTreeMap<RegionId, usize>,
}

impl EmulatorDoc {
    pub fn from_emulator(e: &Emulator) -> Self {
        EmulatorDoc { nodes: e.nodes().to_vec(), edges: e.edges().to_vec(), representative: e.representative().clone() }
    }

    pub fn to_emulator(&self) -> Result<Emulator, DocError> {
        Ok(Emulator::from_parts(self.nodes.clone(), self.edges.clone(), self.representative.clone())?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::{cluster, ClusterOptions};
    use crate::emulator::build_emulator;

    const SAMPLE: &str = r#"{"vertices":[{"id":10,"x":0,"y":0},{"id":20,"x":1,"y":0},{"id":30,"x":2,"y":0}],
        "edges":[[10,20],[20,30]],"regions":[{"id":0,"vertices":[10,20]},{"id":1,"vertices":[30]}]}"#;

    #[test]
    fn instance_round_trip() {
        let inst = Instance::from_json(SAMPLE).unwrap();
        assert_eq!(inst.graph.vertex_count(), 3);
        let again = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(again.to_doc(), inst.to_doc());
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(matches!(Instance::from_json("{"), Err(DocError::Json(_))));
        let bad = SAMPLE.replace("[30]", "[10,30]");
        assert!(matches!(Instance::from_json(&bad), Err(DocError::Region(RegionError::DisconnectedRegion(1)))));
    }

    #[test]
    fn clustering_and_emulator_round_trip() {
        let inst = Instance::from_json(SAMPLE).unwrap();
        let c = cluster(&inst.graph, &inst.regions, ClusterOptions::default()).unwrap();
        let doc = ClusteringDoc::from_clustering(&inst.graph, &c, None);
        let json = serde_json::to_string(&doc).unwrap();
        let back: ClusteringDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_clustering(&inst.graph).unwrap().assignment, c.assignment);
        let e = build_emulator(&inst.graph, &inst.regions, &c).unwrap();
        let ed = EmulatorDoc::from_emulator(&e);
        let back: EmulatorDoc = serde_json::from_str(&serde_json::to_string(&ed).unwrap()).unwrap();
        assert_eq!(back.to_emulator().unwrap(), e);
    }
}
