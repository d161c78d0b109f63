//! End-to-end helpers: scene to instance, and instance to verified emulator.

use thiserror::Error;

use crate::arrangement::{build_arrangement, ArrangementError, ArrangementMeta, StringScene};
use crate::clustering::{cluster, ClusterError, ClusterOptions, Clustering};
use crate::docs::Instance;
use crate::emulator::{build_emulator, Emulator, EmulatorError};
use crate::regions::intersection_to_contact;
use crate::verify::{verify_all, Report, VerifyError, VerifyOptions};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Arrangement(#[from] ArrangementError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Emulator(#[from] EmulatorError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

/// Arrangement of the scene, subdivided so that strings meet only at shared
/// vertices. The arrangement metadata is kept on the instance.
pub fn scene_to_instance(scene: &StringScene) -> Result<(Instance, ArrangementMeta), ArrangementError> {
    let arr = build_arrangement(scene)?;
    let (graph, regions) = intersection_to_contact(&arr.graph, &arr.regions);
    let mut inst = Instance::new(graph, regions);
    inst.metadata = Some(serde_json::json!({ "arrangement": arr.meta }));
    Ok((inst, arr.meta))
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub clustering: Clustering,
    pub emulator: Emulator,
    pub report: Report,
}

/// Clusters with a trace, builds the emulator and runs the verifier.
pub fn run(inst: &Instance, opts: &VerifyOptions) -> Result<PipelineOutput, PipelineError> {
    let clustering = cluster(&inst.graph, &inst.regions, ClusterOptions { trace: true })?;
    let emulator = build_emulator(&inst.graph, &inst.regions, &clustering)?;
    let report = verify_all(&inst.graph, &inst.regions, &clustering, &emulator, opts)?;
    Ok(PipelineOutput { clustering, emulator, report })
}
