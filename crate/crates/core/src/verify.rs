//! Runtime certification of a clustering and emulator: both distance bounds,
//! cluster diameter, scattering, and the per-call invariants recorded in a
//! clustering trace.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{AssignEvent, CallTrace, Clustering, Step, Trace, CONSTANTS};
use crate::emulator::{emulator_stats, Emulator, EmulatorStats};
use crate::plane_graph::PlaneGraph;
use crate::regions::{is_connected_in, ContactGraph, Region, RegionId, RegionSet};
use crate::rng::SplitMix64;
use crate::search::{self, UNREACHED};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("instance too large for the brute-force oracle ({0} vertices)")]
    TooLarge(usize),
    #[error("closeness checks need a clustering trace")]
    MissingTrace,
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paper,
    #[default]
    Derived,
}

impl Mode {
    pub fn hop_bound(self) -> u64 {
        match self {
            Mode::Paper => CONSTANTS.alpha_hop,
            Mode::Derived => CONSTANTS.alpha_hop_derived,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "paper" => Ok(Mode::Paper),
            "derived" => Ok(Mode::Derived),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: String,
    pub detail: String,
}

fn violation(kind: &str, detail: String) -> Violation {
    Violation { kind: kind.to_string(), detail }
}

/// Nonnegative rational, compared exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        let g = gcd(num, den).max(1);
        Ratio { num: num / g, den: den / g }
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    pub mode: Mode,
    /// Region pairs checked exhaustively up to this many; sampled beyond.
    pub max_pairs: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { mode: Mode::Derived, max_pairs: 5000, seed: 0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistortionReport {
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub max_stretch: Option<Ratio>,
    pub min_ratio: Option<Ratio>,
    /// Count of pairs per (contact distance, emulator distance).
    pub histogram: BTreeMap<(u32, u64), usize>,
    /// Largest emulator distance between representative clusters of two
    /// adjacent regions, in units of the edge weight.
    pub per_edge_max_hops: Option<u64>,
    /// Adjacent pairs with emulator distance above `(2h-1)*171`.
    pub per_edge_region_form_exceeded: usize,
    pub violations: Vec<Violation>,
}

/// All-pairs hop distances in a contact graph.
pub fn all_pairs(cg: &ContactGraph) -> Vec<Vec<u32>> {
    (0..cg.node_count()).map(|i| cg.distances_from(i)).collect()
}

/// Checks every edge weight equals the emulator weight.
pub fn check_weights(e: &Emulator) -> Vec<Violation> {
    let w = CONSTANTS.emulator_weight;
    e.edges()
        .iter()
        .filter(|&&(_, _, x)| x != w)
        .map(|&(a, b, x)| violation("weight", format!("edge ({a}, {b}) has weight {x}, expected {w}")))
        .collect()
}

/// Compares contact distances against emulator distances. `hop_bound` is the
/// measured scattering bound `h`; when given, adjacent regions must have
/// representative clusters within `(2h-1)` weighted hops.
pub fn check_distortion(cg: &ContactGraph, e: &Emulator, c: u64, hop_bound: Option<u64>, opts: &VerifyOptions) -> DistortionReport {
    let r = cg.node_count();
    let mut rep = DistortionReport::default();
    let total = r * r.saturating_sub(1) / 2;
    let mut sources: Vec<usize> = (0..r).collect();
    rep.exhaustive = total <= opts.max_pairs;
    if !rep.exhaustive {
        SplitMix64::new(opts.seed).shuffle(&mut sources);
        let per_source = r - 1;
        let keep = opts.max_pairs.div_ceil(per_source.max(1)).max(1);
        sources.truncate(keep);
        sources.sort_unstable();
    }
    let region_nodes: Vec<Option<usize>> = (0..r).map(|i| e.region_node(cg.region_id(i))).collect();
    for (i, node) in region_nodes.iter().enumerate() {
        if node.is_none() {
            rep.violations.push(violation("missing_region", format!("region {} has no emulator node", cg.region_id(i))));
        }
    }
    if !rep.violations.is_empty() {
        return rep;
    }
    let rep_cluster: Vec<Option<usize>> = (0..r)
        .map(|i| e.representative().get(&cg.region_id(i)).and_then(|&cl| e.cluster_node(cl)))
        .collect();
    let w = CONSTANTS.emulator_weight;
    for &i in &sources {
        let dr = cg.distances_from(i);
        let a = region_nodes[i].unwrap();
        let dh = e.distances_from(a);
        let pendant = rep_cluster[i].and_then(|cn| dh[cn]);
        let targets: Box<dyn Iterator<Item = usize>> =
            if rep.exhaustive { Box::new(i + 1..r) } else { Box::new((0..r).filter(move |&j| j != i)) };
        for j in targets {
            rep.pairs_checked += 1;
            let (ri, rj) = (cg.region_id(i), cg.region_id(j));
            let h = dh[region_nodes[j].unwrap()];
            let g = (dr[j] != UNREACHED).then_some(dr[j]);
            match (g, h) {
                (None, None) => continue,
                (None, Some(h)) => {
                    rep.violations.push(violation("lower_bound", format!("regions {ri},{rj}: contact distance infinite, emulator {h}")));
                    continue;
                }
                (Some(g), None) => {
                    rep.violations.push(violation("upper_bound", format!("regions {ri},{rj}: contact distance {g}, emulator infinite")));
                    continue;
                }
                (Some(g), Some(h)) => {
                    *rep.histogram.entry((g, h)).or_default() += 1;
                    if g as u64 > h {
                        rep.violations.push(violation("lower_bound", format!("regions {ri},{rj}: contact {g} > emulator {h}")));
                    }
                    if h as u128 > c as u128 * g as u128 {
                        rep.violations.push(violation("upper_bound", format!("regions {ri},{rj}: emulator {h} > {c} * {g}")));
                    }
                    if g > 0 {
                        let s = Ratio::new(h, g as u64);
                        rep.max_stretch = Some(rep.max_stretch.map_or(s, |m| m.max(s)));
                        rep.min_ratio = Some(rep.min_ratio.map_or(s, |m| m.min(s)));
                    }
                    if g == 1 {
                        if let (Some(hb), Some(pa), Some(cb)) = (hop_bound, pendant, rep_cluster[j]) {
                            let between = dh[cb].map(|x| x.saturating_sub(pa));
                            let limit = (2 * hb).saturating_sub(1) * w;
                            match between {
                                Some(x) => {
                                    rep.per_edge_max_hops = Some(rep.per_edge_max_hops.unwrap_or(0).max(x / w));
                                    if x > limit {
                                        rep.violations.push(violation(
                                            "per_edge",
                                            format!("regions {ri},{rj}: representative clusters at {x} > (2*{hb}-1)*{w}"),
                                        ));
                                    }
                                }
                                None => rep.violations.push(violation("per_edge", format!("regions {ri},{rj}: representatives disconnected"))),
                            }
                            if h > limit {
                                rep.per_edge_region_form_exceeded += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    rep
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub max: u32,
    pub per_cluster: Vec<u32>,
    pub violations: Vec<Violation>,
}

/// For every cluster, the largest contact distance between two regions of
/// `rs` touching it.
pub fn check_cluster_diameter(g: &PlaneGraph, rs: &RegionSet, c: &Clustering, cg: &ContactGraph, bound: u32) -> DiameterReport {
    let members = rs.membership(g.vertex_count());
    let mut cache: HashMap<usize, Vec<u32>> = HashMap::new();
    let mut rep = DiameterReport::default();
    for cl in &c.clusters {
        let mut touching: Vec<usize> = cl.vertices.iter().flat_map(|&v| members[v].iter().copied()).collect();
        touching.sort_unstable();
        touching.dedup();
        let mut worst = 0u32;
        for (x, &a) in touching.iter().enumerate() {
            let d = cache.entry(a).or_insert_with(|| cg.distances_from(a));
            for &b in &touching[x + 1..] {
                worst = worst.max(d[b]);
            }
        }
        if worst > bound {
            let shown = if worst == UNREACHED { "infinite".to_string() } else { worst.to_string() };
            rep.violations.push(violation("diameter", format!("cluster {} has region diameter {shown} > {bound}", cl.id)));
        }
        rep.max = rep.max.max(worst);
        rep.per_cluster.push(worst);
    }
    rep
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScatteringReport {
    pub max: u32,
    pub per_region: Vec<u32>,
    pub violations: Vec<Violation>,
}

/// For every region, the worst case over its vertex pairs of the fewest
/// clusters a connecting path must meet: cluster-graph hops plus one.
pub fn check_scattering(g: &PlaneGraph, c: &Clustering, rs: &RegionSet, bound: u64) -> ScatteringReport {
    let mut rep = ScatteringReport::default();
    let cgraph = match g.contract_partition(&c.parts()) {
        Ok(x) => x,
        Err(err) => {
            rep.violations.push(violation("cluster_connectivity", err.to_string()));
            return rep;
        }
    };
    let mut cache: HashMap<usize, Vec<u32>> = HashMap::new();
    for r in rs.regions() {
        let mut q: Vec<usize> = r.vertices.iter().map(|&v| c.assignment[v]).collect();
        q.sort_unstable();
        q.dedup();
        let mut worst = 1u32;
        for (x, &a) in q.iter().enumerate() {
            let d = cache.entry(a).or_insert_with(|| cgraph.distances_from(a));
            for &b in &q[x + 1..] {
                worst = worst.max(d[b].saturating_add(1));
            }
        }
        if worst as u64 > bound {
            rep.violations.push(violation("scattering", format!("region {} needs {worst} clusters > {bound}", r.id)));
        }
        rep.max = rep.max.max(worst);
        rep.per_region.push(worst);
    }
    rep
}

/// Fewest distinct clusters over all walks from `v1` to `v2`, by search over
/// (vertex, visited-cluster set) states. Needs at most 64 clusters; gives up
/// after `cap` states.
pub fn scattering_exhaustive(g: &PlaneGraph, assignment: &[usize], v1: usize, v2: usize, cap: usize) -> Option<u32> {
    let n = g.vertex_count();
    if assignment.iter().any(|&a| a >= 64) {
        return None;
    }
    let bit = |v: usize| 1u64 << assignment[v];
    // states bucketed by popcount; a mask is dropped when a subset already
    // reached the same vertex
    let mut seen: Vec<Vec<u64>> = vec![Vec::new(); n];
    let mut buckets: Vec<VecDeque<(usize, u64)>> = vec![VecDeque::new(); 66];
    buckets[1].push_back((v1, bit(v1)));
    let mut states = 0usize;
    for k in 1..66 {
        while let Some((v, m)) = buckets[k].pop_front() {
            if seen[v].iter().any(|&s| s & !m == 0) {
                continue;
            }
            if v == v2 {
                return Some(k as u32);
            }
            seen[v].push(m);
            states += 1;
            if states > cap {
                return None;
            }
            for &u in g.rotation(v) {
                let nm = m | bit(u);
                let nk = nm.count_ones() as usize;
                buckets[nk].push_back((u, nm));
            }
        }
    }
    None
}

/// Definitional contact adjacency: a double loop over region pairs and their
/// vertex pairs.
pub fn brute_force_contact(g: &PlaneGraph, rs: &RegionSet) -> Result<Vec<Vec<bool>>, VerifyError> {
    if g.vertex_count() > 500 {
        return Err(VerifyError::TooLarge(g.vertex_count()));
    }
    let r = rs.regions();
    let mut m = vec![vec![false; r.len()]; r.len()];
    for a in 0..r.len() {
        for b in 0..r.len() {
            if a == b {
                continue;
            }
            m[a][b] = r[a].vertices.iter().any(|&x| r[b].vertices.iter().any(|&y| x == y || g.has_edge(x, y)));
        }
    }
    Ok(m)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCloseness {
    pub count: usize,
    pub max: u32,
    pub bound: u32,
    /// Vertices above `bound`.
    pub exceeded: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosenessReport {
    /// Step 3a over every domain region containing the vertex. A second
    /// region through the vertex can sit one hop past the ball, so only
    /// `bound + 1` is enforced here.
    #[serde(rename = "3a")]
    pub small_ball: StepCloseness,
    /// Step 3a measured from the ball region that placed the vertex.
    #[serde(rename = "3a_ball")]
    pub small_ball_region: StepCloseness,
    #[serde(rename = "3b")]
    pub supernode: StepCloseness,
    /// Step-4 vertices ending in a cluster of the supernode being processed.
    #[serde(rename = "4_own")]
    pub own: StepCloseness,
    /// Step-4 vertices ending in a cluster of its parent.
    #[serde(rename = "4_parent")]
    pub parent: StepCloseness,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceReport {
    pub calls: usize,
    pub supernodes: usize,
    /// Largest contact distance between subregions of one input region after
    /// spine selection.
    pub proximity_max: u32,
    /// Same, for walks through supernode regions and sibling pieces only.
    pub proximity_walk_max: u32,
    pub proximity_pairs: usize,
    /// Largest number of clusters of one call meeting a region of that call.
    pub candidates_max: usize,
    pub candidates_max_supernode: usize,
    pub radius_max: u32,
    pub closeness: ClosenessReport,
    pub violations: Vec<Violation>,
}

struct CallView<'a> {
    call: &'a CallTrace,
    cg: ContactGraph,
    members: Vec<Vec<usize>>,
    first_supernode: usize,
    dom_masks: Vec<Vec<bool>>,
    member_masks: Vec<Vec<bool>>,
}

impl<'a> CallView<'a> {
    fn new(g: &PlaneGraph, call: &'a CallTrace) -> Result<Self, VerifyError> {
        let n = g.vertex_count();
        let mut members = vec![Vec::new(); n];
        for (i, r) in call.regions.iter().enumerate() {
            for &v in &r.vertices {
                if v >= n {
                    return Err(VerifyError::Inconsistent(format!("trace vertex {v} out of range")));
                }
                members[v].push(i);
            }
        }
        let cg = ContactGraph::from_parts(g, &call.regions, &members);
        let pos: HashMap<RegionId, usize> = call.regions.iter().enumerate().map(|(i, r)| (r.id, i)).collect();
        let mut dom_masks = Vec::new();
        let mut member_masks = Vec::new();
        for s in &call.supernodes {
            let mut m = vec![false; call.regions.len()];
            for id in &s.members {
                let p = *pos.get(id).ok_or_else(|| VerifyError::Inconsistent(format!("member region {id} missing")))?;
                m[p] = true;
            }
            member_masks.push(m);
            let mut m = vec![false; call.regions.len()];
            for id in &s.domain {
                let p = *pos.get(id).ok_or_else(|| VerifyError::Inconsistent(format!("domain region {id} missing")))?;
                m[p] = true;
            }
            dom_masks.push(m);
        }
        Ok(CallView { call, cg, members, first_supernode: call.supernodes.first().map_or(0, |s| s.id), dom_masks, member_masks })
    }

    fn pos(&self, id: RegionId) -> Option<usize> {
        self.cg.node_of(id)
    }

    fn local(&self, supernode: usize) -> Option<usize> {
        supernode.checked_sub(self.first_supernode).filter(|&i| i < self.call.supernodes.len())
    }
}

/// Evaluates every per-call invariant recorded in a trace.
pub fn check_trace(g: &PlaneGraph, c: &Clustering, trace: &Trace) -> Result<TraceReport, VerifyError> {
    let mut rep = TraceReport {
        closeness: ClosenessReport {
            small_ball: StepCloseness { bound: 4, ..Default::default() },
            small_ball_region: StepCloseness { bound: 4, ..Default::default() },
            supernode: StepCloseness { bound: 25, ..Default::default() },
            own: StepCloseness { bound: 55, ..Default::default() },
            parent: StepCloseness { bound: 85, ..Default::default() },
            violations: Vec::new(),
        },
        ..Default::default()
    };
    for call in &trace.calls {
        rep.calls += 1;
        rep.supernodes += call.supernodes.len();
        let view = CallView::new(g, call)?;
        check_outer_clustered(g, c, call, &mut rep.violations);
        check_proximity(&view, &mut rep);
        check_candidates(&view, c, &mut rep);
        check_forest(&view, &mut rep);
        check_closeness_call(&view, c, &mut rep.closeness)?;
    }
    Ok(rep)
}

/// Closeness ladder alone.
pub fn check_closeness(g: &PlaneGraph, c: &Clustering, trace: Option<&Trace>) -> Result<ClosenessReport, VerifyError> {
    let trace = trace.ok_or(VerifyError::MissingTrace)?;
    Ok(check_trace(g, c, trace)?.closeness)
}

fn check_outer_clustered(g: &PlaneGraph, c: &Clustering, call: &CallTrace, out: &mut Vec<Violation>) {
    let (h, map) = g.restrict(&call.vertices);
    let outer = h.outer_mask();
    let mut local = HashMap::new();
    for (i, &v) in map.iter().enumerate() {
        local.insert(v, i);
    }
    let in_call: HashSet<usize> = call.clusters.iter().copied().collect();
    let assigned_here = |v: usize| c.assignment.get(v).is_some_and(|a| in_call.contains(a));
    for r in &call.input_regions {
        let is_outer = r.vertices.iter().any(|v| local.get(v).is_some_and(|&i| outer[i]));
        if is_outer {
            if let Some(&v) = r.vertices.iter().find(|&&v| !assigned_here(v)) {
                out.push(violation("outer_clustered", format!("vertex {v} of outer region {} unassigned after its call", r.id)));
            }
        }
    }
    let assigned: Vec<usize> = call.vertices.iter().copied().filter(|&v| assigned_here(v)).collect();
    if assigned.is_empty() || !is_connected_in(g, &assigned) {
        out.push(violation("outer_clustered", format!("assigned vertices of call at level {} not connected", call.level)));
    }
}

fn check_proximity(view: &CallView, rep: &mut TraceReport) {
    let call = view.call;
    let lineage: HashMap<RegionId, RegionId> = call.lineage.iter().copied().collect();
    let inputs: HashSet<RegionId> = call.input_regions.iter().map(|r| r.id).collect();
    let mut groups: BTreeMap<RegionId, Vec<usize>> = BTreeMap::new();
    for (p, r) in call.regions.iter().enumerate() {
        let mut a = r.id;
        let mut steps = 0;
        while !inputs.contains(&a) && steps <= lineage.len() {
            match lineage.get(&a) {
                Some(&up) => a = up,
                None => break,
            }
            steps += 1;
        }
        if inputs.contains(&a) {
            groups.entry(a).or_default().push(p);
        } else {
            rep.violations.push(violation("proximity", format!("region {} has no ancestor among the call inputs", r.id)));
        }
    }
    let in_supernode: Vec<bool> = {
        let mut m = vec![false; call.regions.len()];
        for s in &call.supernodes {
            for &id in &s.members {
                if let Some(p) = view.pos(id) {
                    m[p] = true;
                }
            }
        }
        m
    };
    let all = vec![true; call.regions.len()];
    for (origin, group) in groups.into_iter().filter(|(_, g)| g.len() > 1) {
        // walks may use supernode regions and pieces of the same origin
        let mut allowed = in_supernode.clone();
        for &p in &group {
            allowed[p] = true;
        }
        for (x, &a) in group.iter().enumerate() {
            let free = view.cg.distances_within(&[a], &all, UNREACHED - 1);
            let walk = view.cg.distances_within(&[a], &allowed, UNREACHED - 1);
            for &b in &group[x + 1..] {
                rep.proximity_pairs += 1;
                rep.proximity_max = rep.proximity_max.max(free[b]);
                rep.proximity_walk_max = rep.proximity_walk_max.max(walk[b]);
                if walk[b] > 24 {
                    rep.violations.push(violation(
                        "proximity",
                        format!(
                            "subregions {} and {} of {origin}: distance {}, {} through supernode and sibling regions, bound 24",
                            call.regions[a].id,
                            call.regions[b].id,
                            show(free[b]),
                            show(walk[b])
                        ),
                    ));
                }
            }
        }
    }
}

fn check_candidates(view: &CallView, c: &Clustering, rep: &mut TraceReport) {
    let call = view.call;
    let in_call: HashSet<usize> = call.clusters.iter().copied().collect();
    let in_supernode: HashSet<RegionId> = call.supernodes.iter().flat_map(|s| s.members.iter().copied()).collect();
    for r in &call.regions {
        let mut used: Vec<usize> = r.vertices.iter().filter_map(|&v| c.assignment.get(v).copied()).filter(|a| in_call.contains(a)).collect();
        used.sort_unstable();
        used.dedup();
        if used.len() > 78 {
            rep.violations.push(violation("candidates", format!("region {} meets {} clusters > 78", r.id, used.len())));
        }
        rep.candidates_max = rep.candidates_max.max(used.len());
        if in_supernode.contains(&r.id) {
            rep.candidates_max_supernode = rep.candidates_max_supernode.max(used.len());
        }
    }
}

fn show(d: u32) -> String {
    if d == UNREACHED {
        "infinite".into()
    } else {
        d.to_string()
    }
}

fn check_forest(view: &CallView, rep: &mut TraceReport) {
    let call = view.call;
    let n_regions = call.regions.len();
    let mut owner: Vec<Option<usize>> = vec![None; n_regions];
    let mut vertex_owner: HashMap<usize, usize> = HashMap::new();
    for (si, s) in call.supernodes.iter().enumerate() {
        let dom = &view.dom_masks[si];
        let spine: Vec<usize> = s.spine.iter().filter_map(|&id| view.pos(id)).collect();
        if spine.len() != s.spine.len() || spine.is_empty() {
            rep.violations.push(violation("forest", format!("supernode {} spine regions missing", s.id)));
            continue;
        }
        for &m in &s.members {
            let Some(p) = view.pos(m) else {
                rep.violations.push(violation("forest", format!("member {m} of supernode {} missing", s.id)));
                continue;
            };
            if owner[p].replace(si).is_some() {
                rep.violations.push(violation("forest", format!("region {m} in two supernodes")));
            }
            for &v in &call.regions[p].vertices {
                if let Some(o) = vertex_owner.insert(v, si) {
                    if o != si {
                        rep.violations.push(violation("forest", format!("vertex {v} in two supernodes")));
                    }
                }
            }
        }
        // members within distance 2 of the spine inside the domain
        let near = view.cg.distances_within(&spine, dom, 2);
        for &m in &s.members {
            if let Some(p) = view.pos(m) {
                if !dom[p] || near[p] == UNREACHED {
                    rep.violations.push(violation("radius", format!("member {m} of supernode {} farther than 2 from its spine", s.id)));
                } else {
                    rep.radius_max = rep.radius_max.max(near[p]);
                }
            }
        }
        let from_start = view.cg.distances_within(&spine[..1], dom, UNREACHED - 1);
        for (i, &p) in spine.iter().enumerate() {
            if from_start[p] != i as u32 {
                rep.violations.push(violation("spine", format!("spine of supernode {} is not a shortest path in its domain", s.id)));
                break;
            }
        }
        for w in s.net_points.windows(2) {
            let (a, b) = (view.pos(w[0]).unwrap(), view.pos(w[1]).unwrap());
            let d = view.cg.distances_within(&[a], dom, UNREACHED - 1)[b];
            if d != CONSTANTS.spine_spacing as u32 {
                rep.violations.push(violation("net_points", format!("net points {} and {} at distance {}", w[0], w[1], show(d))));
            }
        }
        for &x in &s.expansion {
            if view.pos(x).is_none_or(|p| !dom[p]) {
                rep.violations.push(violation("expansion", format!("region {x} of supernode {} lies outside its domain", s.id)));
            }
        }
    }
    // a region outside every supernode touches at most a child and its parent
    for p in 0..n_regions {
        if owner[p].is_some() {
            continue;
        }
        let mut near: Vec<usize> = view.cg.neighbors(p).iter().filter_map(|&q| owner[q]).collect();
        near.sort_unstable();
        near.dedup();
        let ok = match near.as_slice() {
            [] | [_] => true,
            [a, b] => {
                let (sa, sb) = (&call.supernodes[*a], &call.supernodes[*b]);
                sa.parent == Some(sb.id) || sb.parent == Some(sa.id)
            }
            _ => false,
        };
        if !ok {
            rep.violations.push(violation("forest", format!("region {} touches supernodes {:?}", call.regions[p].id, near)));
        }
    }
}

fn record(bucket: &mut StepCloseness, measured: Option<u32>, slack: u32, e: &AssignEvent, p: RegionId, out: &mut Vec<Violation>) {
    bucket.count += 1;
    let Some(d) = measured else {
        out.push(violation("closeness", format!("vertex {} lies in no region of the owning domain", e.vertex)));
        return;
    };
    bucket.max = bucket.max.max(d);
    if d > bucket.bound {
        bucket.exceeded += 1;
    }
    if d > bucket.bound + slack {
        out.push(violation(
            "closeness",
            format!("vertex {} (step {}) is only {}-close to net point {p}, bound {}", e.vertex, e.step.tag(), show(d), bucket.bound + slack),
        ));
    }
}

fn check_closeness_call(view: &CallView, c: &Clustering, out: &mut ClosenessReport) -> Result<(), VerifyError> {
    let call = view.call;
    let mut cache: HashMap<(usize, RegionId), Vec<u32>> = HashMap::new();
    let mut members_cache: HashMap<(usize, RegionId), Vec<u32>> = HashMap::new();
    for e in &call.events {
        let rec = c
            .clusters
            .get(e.cluster)
            .ok_or_else(|| VerifyError::Inconsistent(format!("trace cluster {} missing", e.cluster)))?;
        let (Some(owner), Some(processed)) = (view.local(rec.supernode), view.local(e.supernode)) else {
            return Err(VerifyError::Inconsistent(format!("trace supernode of vertex {} missing", e.vertex)));
        };
        let p = rec.net_point_region;
        let pp = view.pos(p).ok_or_else(|| VerifyError::Inconsistent(format!("net point {p} missing")))?;
        let dom = &view.dom_masks[owner];
        let d = cache.entry((owner, p)).or_insert_with(|| view.cg.distances_within(&[pp], dom, UNREACHED - 1));
        let mut worst: Option<u32> = None;
        for &q in &view.members[e.vertex] {
            if dom[q] {
                worst = Some(worst.unwrap_or(0).max(d[q]));
            }
        }
        let sp = &call.supernodes[processed];
        if matches!(e.step, Step::SmallBall | Step::Supernode) && owner != processed {
            out.violations.push(violation("closeness", format!("vertex {} left its own supernode in step {}", e.vertex, e.step.tag())));
        }
        let (bucket, slack) = match e.step {
            Step::SmallBall => {
                let within = members_cache.entry((owner, p)).or_insert_with(|| view.cg.distances_within(&[pp], &view.member_masks[owner], UNREACHED - 1));
                let ball = view.members[e.vertex].iter().filter(|&&q| view.member_masks[owner][q]).map(|&q| within[q]).min();
                record(&mut out.small_ball_region, ball, 0, e, p, &mut out.violations);
                (&mut out.small_ball, 1)
            }
            Step::Supernode => (&mut out.supernode, 0),
            Step::BigBall | Step::Expansion => {
                if owner == processed {
                    (&mut out.own, 0)
                } else if sp.parent == Some(call.supernodes[owner].id) {
                    (&mut out.parent, 0)
                } else {
                    out.violations.push(violation(
                        "closeness",
                        format!("vertex {} assigned in step {} to a cluster of supernode {}, neither {} nor its parent", e.vertex, e.step.tag(), rec.supernode, sp.id),
                    ));
                    continue;
                }
            }
        };
        record(bucket, worst, slack, e, p, &mut out.violations);
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub mode: Mode,
    pub hop_bound: u64,
    pub max_stretch: Option<Ratio>,
    pub min_ratio: Option<Ratio>,
    pub violations: Vec<Violation>,
    pub diameter_max: u32,
    pub scattering_max: u32,
    pub scattering_paper_exceeded: bool,
    pub pairs_checked: usize,
    pub exhaustive: bool,
    pub per_edge_max_hops: Option<u64>,
    pub per_edge_region_form_exceeded: usize,
    pub closeness: Option<ClosenessReport>,
    pub trace: Option<TraceReport>,
    pub emulator: EmulatorStats,
    #[serde(skip)]
    pub histogram: BTreeMap<(u32, u64), usize>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Runs every check. `rs` are the regions the emulator was built for.
pub fn verify_all(g: &PlaneGraph, rs: &RegionSet, c: &Clustering, e: &Emulator, opts: &VerifyOptions) -> Result<Report, VerifyError> {
    if c.assignment.len() != g.vertex_count() {
        return Err(VerifyError::Inconsistent("clustering size differs from the graph".into()));
    }
    let mut report = Report { mode: opts.mode, hop_bound: opts.mode.hop_bound(), emulator: emulator_stats(e), ..Default::default() };
    let mut v = partition_violations(g, c);
    let cg = ContactGraph::new(g, rs);
    v.extend(check_weights(e));
    let diam = check_cluster_diameter(g, rs, c, &cg, CONSTANTS.alpha_diam as u32);
    report.diameter_max = diam.max;
    v.extend(diam.violations);
    let scat = check_scattering(g, c, rs, opts.mode.hop_bound());
    report.scattering_max = scat.max;
    report.scattering_paper_exceeded = scat.max as u64 > CONSTANTS.alpha_hop;
    v.extend(scat.violations);
    let dist = check_distortion(&cg, e, CONSTANTS.c, Some(scat.max as u64), opts);
    report.max_stretch = dist.max_stretch;
    report.min_ratio = dist.min_ratio;
    report.pairs_checked = dist.pairs_checked;
    report.exhaustive = dist.exhaustive;
    report.per_edge_max_hops = dist.per_edge_max_hops;
    report.per_edge_region_form_exceeded = dist.per_edge_region_form_exceeded;
    report.histogram = dist.histogram;
    v.extend(dist.violations);
    if let Some(t) = &c.trace {
        let tr = check_trace(g, c, t)?;
        v.extend(tr.violations.iter().cloned());
        v.extend(tr.closeness.violations.iter().cloned());
        report.closeness = Some(tr.closeness.clone());
        report.trace = Some(tr);
    }
    report.violations = v;
    Ok(report)
}

/// Clusters must be disjoint, cover the graph, and be connected.
pub fn partition_violations(g: &PlaneGraph, c: &Clustering) -> Vec<Violation> {
    let n = g.vertex_count();
    let mut out = Vec::new();
    let mut owner = vec![usize::MAX; n];
    for cl in &c.clusters {
        for &v in &cl.vertices {
            if v >= n || owner[v] != usize::MAX {
                out.push(violation("partition", format!("vertex {v} in more than one cluster or out of range")));
            } else {
                owner[v] = cl.id;
            }
        }
        if cl.vertices.is_empty() || !is_connected_in(g, &cl.vertices) {
            out.push(violation("partition", format!("cluster {} is empty or disconnected", cl.id)));
        }
    }
    if let Some(v) = owner.iter().position(|&o| o == usize::MAX) {
        out.push(violation("partition", format!("vertex {v} is in no cluster")));
    }
    out
}

/// Region positions reachable within `max` hops, for property tests.
pub fn regions_within(cg: &ContactGraph, from: usize, max: u32) -> Vec<usize> {
    let d = search::bfs_bounded(cg.node_count(), &[from], max, |v| cg.neighbors(v).to_vec());
    (0..cg.node_count()).filter(|&i| d[i] != UNREACHED).collect()
}

/// Pull-back check: for a shattering `fine` of `coarse`, origin distances never
/// exceed the distances between the pieces.
pub fn pullback_holds(g: &PlaneGraph, coarse: &RegionSet, fine: &[Region]) -> bool {
    let cc = ContactGraph::new(g, coarse);
    let fs = RegionSet::new(fine.to_vec());
    let fc = ContactGraph::new(g, &fs);
    for a in 0..fc.node_count() {
        let df = fc.distances_from(a);
        let oa = cc.node_of(fs.regions()[a].origin).unwrap();
        let dc = cc.distances_from(oa);
        for b in 0..fc.node_count() {
            let ob = cc.node_of(fs.regions()[b].origin).unwrap();
            if df[b] != UNREACHED && dc[ob] > df[b] {
                return false;
            }
        }
    }
    true
}
