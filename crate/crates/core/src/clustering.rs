//! Outer-face clustering: spine selection, supernode expansion, vertex
//! assignment, and the recursion over unassigned vertices.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plane_graph::{PlaneGraph, PlaneGraphError};
use crate::regions::{ContactGraph, Region, RegionId, RegionSet};
use crate::search::{self, UNREACHED};

/// Fixed constants of the construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    pub alpha_diam: u64,
    /// Hop bound as printed alongside the diameter bound.
    pub alpha_hop: u64,
    /// Hop bound obtained by squaring `beta`.
    pub alpha_hop_derived: u64,
    pub alpha: u64,
    pub beta: u64,
    pub spine_spacing: usize,
    pub small_radius: u32,
    pub big_radius: u32,
    pub emulator_weight: u64,
    pub c: u64,
}

impl Default for Constants {
    fn default() -> Self {
        CONSTANTS
    }
}

pub const CONSTANTS: Constants = Constants {
    alpha_diam: 170,
    alpha_hop: 7_884_864,
    alpha_hop_derived: 14_017_536,
    alpha: 170,
    beta: 3744,
    spine_spacing: 14,
    small_radius: 4,
    big_radius: 6,
    emulator_weight: 171,
    c: 4_793_997_141,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClusterError {
    #[error("empty region set")]
    EmptyRegionSet,
    #[error("region support does not match the vertex set")]
    SupportMismatch,
    #[error(transparent)]
    Plane(#[from] PlaneGraphError),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Step of the outer clustering that assigned a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Step {
    #[serde(rename = "3a")]
    SmallBall,
    #[serde(rename = "3b")]
    Supernode,
    #[serde(rename = "4a")]
    BigBall,
    #[serde(rename = "4b")]
    Expansion,
}

impl Step {
    pub fn tag(self) -> &'static str {
        match self {
            Step::SmallBall => "3a",
            Step::Supernode => "3b",
            Step::BigBall => "4a",
            Step::Expansion => "4b",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Supernode {
    pub id: usize,
    /// Pre-order index of the spine-selection call that created it.
    pub creation_index: usize,
    pub parent: Option<usize>,
    pub spine: Vec<RegionId>,
    pub members: Vec<RegionId>,
    pub expansion: Vec<RegionId>,
    pub net_points: Vec<RegionId>,
    /// Output regions lying inside the creating call's subgraph. Only filled
    /// when tracing.
    pub domain: Vec<RegionId>,
    /// Ids of the regions handed to the creating call.
    pub input_regions: Vec<RegionId>,
}

/// Output of spine selection over one connected plane graph.
#[derive(Debug, Clone)]
pub struct SupernodeForest {
    pub regions: RegionSet,
    pub supernodes: Vec<Supernode>,
    /// Region id to supernode index, for regions inside some supernode.
    pub owner: BTreeMap<RegionId, usize>,
    /// Every region created by a split, mapped to the region it was split from.
    pub lineage: BTreeMap<RegionId, RegionId>,
}

/// Spine indices `0, spacing, 2*spacing, ...` of a spine.
pub fn net_points(spine: &[RegionId], spacing: usize) -> Vec<RegionId> {
    spine.iter().copied().step_by(spacing.max(1)).collect()
}

struct Call {
    h: Vec<usize>,
    w: Vec<usize>,
    regions: Vec<Region>,
    parent: Option<usize>,
}

/// Spine selection. `h` must be outer-bounded by `w_old` in `h0` (or `w_old`
/// empty and `h` all of `h0`); region vertices are indices of `h0`.
pub fn select_paths(
    h0: &PlaneGraph,
    h: &[usize],
    w_old: &[usize],
    rs: &RegionSet,
    next_id: &mut RegionId,
    with_domains: bool,
) -> Result<SupernodeForest, ClusterError> {
    if rs.is_empty() {
        return Err(ClusterError::EmptyRegionSet);
    }
    let mut hs = h.to_vec();
    hs.sort_unstable();
    if rs.support() != hs {
        return Err(ClusterError::SupportMismatch);
    }
    let n = h0.vertex_count();
    let outer = h0.outer_mask();
    let mut stack = vec![Call { h: hs, w: w_old.to_vec(), regions: rs.regions().to_vec(), parent: None }];
    let mut out_regions: Vec<Region> = Vec::new();
    let mut supernodes: Vec<Supernode> = Vec::new();
    let mut call_vertices: Vec<Vec<usize>> = Vec::new();
    let mut lineage = BTreeMap::new();

    while let Some(call) = stack.pop() {
        let idx = supernodes.len();
        let crit = h0.critical_vertices(&call.h, &call.w)?;
        let input_ids: Vec<RegionId> = call.regions.iter().map(|r| r.id).collect();
        let set = RegionSet::new(call.regions);
        let members = set.membership(n);
        let cg = ContactGraph::new(h0, &set);
        let ends: Vec<usize> = crit
            .iter()
            .map(|&y| members[y].first().copied().ok_or_else(|| ClusterError::Invariant(format!("critical vertex {y} uncovered"))))
            .collect::<Result<_, _>>()?;
        let spine = if ends.len() == 1 || ends[0] == ends[1] {
            vec![ends[0]]
        } else {
            cg.shortest_path(ends[0], ends[1])
                .ok_or_else(|| ClusterError::Invariant("critical regions not connected".into()))?
        };
        let all = vec![true; set.len()];
        let near = cg.distances_within(&spine, &all, 1);
        let mut in_s = vec![false; n];
        for (p, r) in set.regions().iter().enumerate() {
            if near[p] != UNREACHED {
                for &v in &r.vertices {
                    in_s[v] = true;
                }
            }
        }
        let shattered = set.shatter_all(h0, &in_s, next_id);
        for r in shattered.regions() {
            if let Some(p) = r.parent {
                if set.position(r.id).is_none() {
                    lineage.insert(r.id, p);
                }
            }
        }
        let mut s_members = Vec::new();
        let mut rest = Vec::new();
        for r in shattered.into_regions() {
            if in_s[r.lowest_vertex()] {
                s_members.push(r);
            } else {
                rest.push(r);
            }
        }
        let mut h_rest = vec![false; n];
        for &v in &call.h {
            h_rest[v] = !in_s[v];
        }
        let comps = search::components(n, &h_rest, |v| h0.rotation(v).to_vec());
        let mut comp_of = vec![usize::MAX; n];
        for (c, vs) in comps.iter().enumerate() {
            for &v in vs {
                comp_of[v] = c;
            }
        }
        let mut per_comp: Vec<Vec<Region>> = vec![Vec::new(); comps.len()];
        for r in rest {
            per_comp[comp_of[r.lowest_vertex()]].push(r);
        }
        let w_new: Vec<usize> = (0..n).filter(|&v| in_s[v]).collect();
        let mut children = Vec::new();
        for (vs, regs) in comps.into_iter().zip(per_comp) {
            if vs.iter().any(|&v| outer[v]) {
                children.push(Call { h: vs, w: w_new.clone(), regions: regs, parent: Some(idx) });
            } else {
                out_regions.extend(regs);
            }
        }
        let spine_ids: Vec<RegionId> = spine.iter().map(|&p| set.regions()[p].id).collect();
        let mut member_ids: Vec<RegionId> = s_members.iter().map(|r| r.id).collect();
        member_ids.sort_unstable();
        out_regions.extend(s_members);
        supernodes.push(Supernode {
            id: idx,
            creation_index: idx,
            parent: call.parent,
            net_points: Vec::new(),
            spine: spine_ids,
            members: member_ids,
            expansion: Vec::new(),
            domain: Vec::new(),
            input_regions: input_ids,
        });
        call_vertices.push(call.h);
        stack.extend(children.into_iter().rev());
    }

    let regions = RegionSet::new(out_regions);
    let mut owner = BTreeMap::new();
    for s in &supernodes {
        for &m in &s.members {
            owner.insert(m, s.id);
        }
    }
    if with_domains {
        for (s, vs) in supernodes.iter_mut().zip(&call_vertices) {
            let mask = search::mask_of(n, vs);
            s.domain = regions.regions().iter().filter(|r| mask[r.lowest_vertex()]).map(|r| r.id).collect();
        }
    }
    Ok(SupernodeForest { regions, supernodes, owner, lineage })
}

/// Fills `expansion` of every supernode: supernodes in creation order claim
/// adjacent regions not yet claimed by anyone.
pub fn expand_supernodes(forest: &mut SupernodeForest, cg: &ContactGraph) {
    let rs = &forest.regions;
    let mut claimed: Vec<Option<usize>> = vec![None; rs.len()];
    for (&id, &s) in &forest.owner {
        claimed[rs.position(id).expect("owned region exists")] = Some(s);
    }
    for s in 0..forest.supernodes.len() {
        let mut plus: Vec<usize> = forest.supernodes[s].members.iter().map(|&id| rs.position(id).unwrap()).collect();
        let base = plus.clone();
        for m in base {
            for &nb in cg.neighbors(m) {
                if claimed[nb].is_none() {
                    claimed[nb] = Some(s);
                    plus.push(nb);
                }
            }
        }
        plus.sort_unstable();
        forest.supernodes[s].expansion = plus.into_iter().map(|p| rs.regions()[p].id).collect();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssignEvent {
    pub vertex: usize,
    pub step: Step,
    /// Supernode being processed when the vertex was assigned.
    pub supernode: usize,
    /// Net point whose cluster was targeted.
    pub target: RegionId,
    /// Cluster the vertex ended up in.
    pub cluster: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterRecord {
    pub id: usize,
    pub vertices: Vec<usize>,
    pub supernode: usize,
    pub net_point_region: RegionId,
    pub level: usize,
}

/// Partial clustering of one outer-clustering call, on local vertex indices.
#[derive(Debug, Clone)]
pub struct OuterClustering {
    pub forest: SupernodeForest,
    pub clusters: Vec<ClusterRecord>,
    pub assignment: Vec<Option<usize>>,
    pub events: Vec<AssignEvent>,
}

struct AssignState<'a> {
    adj: &'a [Vec<usize>],
    assignment: Vec<Option<usize>>,
    members: Vec<Vec<usize>>,
    events: Vec<AssignEvent>,
}

impl AssignState<'_> {
    fn put(&mut self, v: usize, c: usize, step: Step, supernode: usize, target: RegionId) {
        self.assignment[v] = Some(c);
        self.members[c].push(v);
        self.events.push(AssignEvent { vertex: v, step, supernode, target, cluster: c });
    }

    /// Walks the BFS path in `H[x]` from `v` toward cluster `c` and gives the
    /// prefix before the first assigned vertex to that vertex's cluster.
    fn assign(&mut self, v: usize, c: usize, x: &[bool], step: Step, supernode: usize, target: RegionId) -> Result<(), ClusterError> {
        let adj = self.adj;
        let assignment = &self.assignment;
        let path = search::bfs_path(adj.len(), v, |u| assignment[u] == Some(c), |u| {
            adj[u].iter().copied().filter(|&w| x[w]).collect::<Vec<_>>()
        })
        .ok_or_else(|| ClusterError::Invariant(format!("no path from vertex {v} to cluster {c} inside X")))?;
        let j = path.iter().position(|&u| self.assignment[u].is_some()).expect("path ends in the cluster");
        let owner = self.assignment[path[j]].unwrap();
        for &u in &path[..j] {
            self.put(u, owner, step, supernode, target);
        }
        Ok(())
    }
}

fn union_vertices(rs: &RegionSet, positions: &[usize]) -> Vec<usize> {
    let mut vs: Vec<usize> = positions.iter().flat_map(|&p| rs.regions()[p].vertices.iter().copied()).collect();
    vs.sort_unstable();
    vs.dedup();
    vs
}

fn ball(cg: &ContactGraph, source: usize, allowed: &[usize], radius: u32) -> Vec<usize> {
    let mut mask = vec![false; cg.node_count()];
    for &p in allowed {
        mask[p] = true;
    }
    let d = cg.distances_within(&[source], &mask, radius);
    (0..cg.node_count()).filter(|&p| d[p] != UNREACHED).collect()
}

/// Partial clustering of a connected plane graph `h` whose vertices are all
/// covered by `rs`.
pub fn cluster_outer(h: &PlaneGraph, rs: &RegionSet, next_id: &mut RegionId, with_domains: bool) -> Result<OuterClustering, ClusterError> {
    let k = CONSTANTS;
    let n = h.vertex_count();
    if !h.is_connected() {
        return Err(ClusterError::Plane(PlaneGraphError::DisconnectedInduced));
    }
    let all: Vec<usize> = (0..n).collect();
    let mut forest = select_paths(h, &all, &[], rs, next_id, with_domains)?;
    let cg = ContactGraph::new(h, &forest.regions);
    expand_supernodes(&mut forest, &cg);
    for s in &mut forest.supernodes {
        s.net_points = net_points(&s.spine, k.spine_spacing);
    }
    let rstar = &forest.regions;
    let pos = |id: RegionId| rstar.position(id).expect("region of R*");

    let adj: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut a = h.rotation(v).to_vec();
            a.sort_unstable();
            a
        })
        .collect();
    let mut st = AssignState { adj: &adj, assignment: vec![None; n], members: Vec::new(), events: Vec::new() };
    let mut clusters: Vec<ClusterRecord> = Vec::new();
    // net point cluster ids per supernode, parallel to `net_points`
    let mut net_cluster: Vec<Vec<usize>> = Vec::with_capacity(forest.supernodes.len());

    for (si, s) in forest.supernodes.iter().enumerate() {
        let member_pos: Vec<usize> = s.members.iter().map(|&id| pos(id)).collect();
        let mut ids = Vec::new();
        for &p in &s.net_points {
            let c = clusters.len();
            clusters.push(ClusterRecord { id: c, vertices: Vec::new(), supernode: si, net_point_region: p, level: 0 });
            st.members.push(Vec::new());
            ids.push(c);
            let small = ball(&cg, pos(p), &member_pos, k.small_radius);
            for v in union_vertices(rstar, &small) {
                if st.assignment[v].is_some() {
                    return Err(ClusterError::Invariant(format!("small balls overlap at vertex {v}")));
                }
                st.put(v, c, Step::SmallBall, si, p);
            }
        }
        let vs = union_vertices(rstar, &member_pos);
        let x = search::mask_of(n, &vs);
        for &v in &vs {
            if st.assignment[v].is_none() {
                st.assign(v, ids[0], &x, Step::Supernode, si, s.net_points[0])?;
            }
        }
        net_cluster.push(ids);
    }

    for (si, s) in forest.supernodes.iter().enumerate() {
        let plus_pos: Vec<usize> = s.expansion.iter().map(|&id| pos(id)).collect();
        for (pi, &p) in s.net_points.iter().enumerate() {
            let big = ball(&cg, pos(p), &plus_pos, k.big_radius);
            let vs = union_vertices(rstar, &big);
            let x = search::mask_of(n, &vs);
            for &v in &vs {
                if st.assignment[v].is_none() {
                    st.assign(v, net_cluster[si][pi], &x, Step::BigBall, si, p)?;
                }
            }
        }
        let vs = union_vertices(rstar, &plus_pos);
        let x = search::mask_of(n, &vs);
        for &v in &vs {
            if st.assignment[v].is_none() {
                st.assign(v, net_cluster[si][0], &x, Step::Expansion, si, s.net_points[0])?;
            }
        }
    }

    for (c, mut vs) in st.members.into_iter().enumerate() {
        vs.sort_unstable();
        clusters[c].vertices = vs;
    }
    Ok(OuterClustering { forest, clusters, assignment: st.assignment, events: st.events })
}

/// Instrumentation for one outer-clustering call, on base-graph indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CallTrace {
    pub level: usize,
    pub vertices: Vec<usize>,
    pub input_regions: Vec<Region>,
    pub regions: Vec<Region>,
    pub lineage: Vec<(RegionId, RegionId)>,
    pub supernodes: Vec<Supernode>,
    pub clusters: Vec<usize>,
    pub events: Vec<AssignEvent>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub calls: Vec<CallTrace>,
}

/// A partition of the base graph into clusters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    pub clusters: Vec<ClusterRecord>,
    /// Cluster id per base vertex.
    pub assignment: Vec<usize>,
    pub trace: Option<Trace>,
}

impl Clustering {
    /// Builds a clustering from cluster vertex lists; ids must be `0..k`.
    pub fn from_clusters(n: usize, clusters: Vec<ClusterRecord>) -> Result<Self, ClusterError> {
        let mut assignment = vec![usize::MAX; n];
        for (i, c) in clusters.iter().enumerate() {
            if c.id != i {
                return Err(ClusterError::Invariant(format!("cluster ids must be 0..k, got {} at {i}", c.id)));
            }
            for &v in &c.vertices {
                if v >= n || assignment[v] != usize::MAX {
                    return Err(ClusterError::Invariant(format!("vertex {v} assigned twice or out of range")));
                }
                assignment[v] = i;
            }
        }
        if assignment.contains(&usize::MAX) {
            return Err(ClusterError::Invariant("clustering does not cover every vertex".into()));
        }
        Ok(Clustering { clusters, assignment, trace: None })
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn parts(&self) -> Vec<Vec<usize>> {
        self.clusters.iter().map(|c| c.vertices.clone()).collect()
    }
}

struct Job {
    vertices: Vec<usize>,
    regions: Vec<Region>,
    level: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ClusterOptions {
    /// Record a trace with domains for the verifier.
    pub trace: bool,
}

/// Full clustering of `g`. The support of `rs` must be all of `V(g)`; each
/// connected component is handled on its own.
pub fn cluster(g: &PlaneGraph, rs: &RegionSet, opts: ClusterOptions) -> Result<Clustering, ClusterError> {
    let n = g.vertex_count();
    if n == 0 {
        return Ok(Clustering { clusters: Vec::new(), assignment: Vec::new(), trace: opts.trace.then(Trace::default) });
    }
    if rs.is_empty() {
        return Err(ClusterError::EmptyRegionSet);
    }
    if rs.support().len() != n {
        return Err(ClusterError::SupportMismatch);
    }
    let mut next_id = rs.max_id().map_or(0, |m| m + 1);
    let mut stack: Vec<Job> = crate::regions::split_by_component(g, rs)
        .into_iter()
        .rev()
        .map(|(vertices, regions)| Job { vertices, regions, level: 0 })
        .collect();
    let mut assignment = vec![usize::MAX; n];
    let mut clusters: Vec<ClusterRecord> = Vec::new();
    let mut supernode_base = 0usize;
    let mut trace = opts.trace.then(Trace::default);

    while let Some(job) = stack.pop() {
        let (h, map) = g.restrict(&job.vertices);
        let mut local = vec![usize::MAX; n];
        for (i, &v) in map.iter().enumerate() {
            local[v] = i;
        }
        let to_local = |r: &Region| Region { vertices: r.vertices.iter().map(|&v| local[v]).collect(), ..r.clone() };
        let to_base = |r: &Region| Region { vertices: r.vertices.iter().map(|&v| map[v]).collect(), ..r.clone() };
        let local_rs = RegionSet::new(job.regions.iter().map(to_local).collect());
        if local_rs.support().len() != h.vertex_count() {
            return Err(ClusterError::SupportMismatch);
        }
        let outer = cluster_outer(&h, &local_rs, &mut next_id, opts.trace)?;
        let cluster_base = clusters.len();
        for c in &outer.clusters {
            let id = cluster_base + c.id;
            let vertices: Vec<usize> = c.vertices.iter().map(|&v| map[v]).collect();
            for &v in &vertices {
                assignment[v] = id;
            }
            clusters.push(ClusterRecord {
                id,
                vertices,
                supernode: supernode_base + c.supernode,
                net_point_region: c.net_point_region,
                level: job.level,
            });
        }
        if let Some(t) = trace.as_mut() {
            let shift = |s: &Supernode| Supernode {
                id: supernode_base + s.id,
                parent: s.parent.map(|p| supernode_base + p),
                ..s.clone()
            };
            t.calls.push(CallTrace {
                level: job.level,
                vertices: job.vertices.clone(),
                input_regions: job.regions.clone(),
                regions: outer.forest.regions.regions().iter().map(to_base).collect(),
                lineage: outer.forest.lineage.iter().map(|(&a, &b)| (a, b)).collect(),
                supernodes: outer.forest.supernodes.iter().map(shift).collect(),
                clusters: (cluster_base..clusters.len()).collect(),
                events: outer
                    .events
                    .iter()
                    .map(|e| AssignEvent {
                        vertex: map[e.vertex],
                        supernode: supernode_base + e.supernode,
                        cluster: cluster_base + e.cluster,
                        ..*e
                    })
                    .collect(),
            });
        }
        supernode_base += outer.forest.supernodes.len();

        let unassigned: Vec<usize> = job.vertices.iter().copied().filter(|&v| assignment[v] == usize::MAX).collect();
        if unassigned.is_empty() {
            continue;
        }
        if unassigned.len() == job.vertices.len() {
            return Err(ClusterError::Invariant("outer clustering assigned no vertex".into()));
        }
        let u_mask = search::mask_of(n, &unassigned);
        let shattered = RegionSet::new(job.regions).shatter_all(g, &u_mask, &mut next_id);
        let comps = search::components(n, &u_mask, |v| g.rotation(v).to_vec());
        let mut comp_of = vec![usize::MAX; n];
        for (c, vs) in comps.iter().enumerate() {
            for &v in vs {
                comp_of[v] = c;
            }
        }
        let mut per_comp: Vec<Vec<Region>> = vec![Vec::new(); comps.len()];
        for r in shattered.into_regions() {
            if u_mask[r.lowest_vertex()] {
                per_comp[comp_of[r.lowest_vertex()]].push(r);
            }
        }
        for (vertices, regions) in comps.into_iter().zip(per_comp).rev() {
            stack.push(Job { vertices, regions, level: job.level + 1 });
        }
    }
    Ok(Clustering { clusters, assignment, trace })
}
