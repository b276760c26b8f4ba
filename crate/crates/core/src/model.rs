//! Domain types shared by the schedulers, the runtime simulator and the
//! workload generator: processing elements, tasks, application DAGs and
//! their per-instance execution state.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::time::SimTime;

/// Per-PE execution time in nanoseconds; `None` marks a PE that cannot run
/// the task at all.
pub type ExecTime = Option<u64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("task has no supported processing element")]
    NoSupportedPe,
    #[error("execution time on PE {pe} is zero; times must be at least 1 ns")]
    ZeroExecTime { pe: usize },
    #[error("node {node} cannot move from {from:?} to {to:?}")]
    IllegalTransition {
        node: usize,
        from: NodeState,
        to: NodeState,
    },
    #[error(transparent)]
    Dag(#[from] DagError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DagError {
    #[error("DAG has no nodes")]
    EmptyDag,
    #[error("edge {from} -> {to} references a node that does not exist")]
    DanglingEdge { from: usize, to: usize },
    #[error("dependency cycle through node {node}")]
    CycleDetected { node: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PeDescriptor {
    pub id: usize,
    pub name: String,
}

impl PeDescriptor {
    pub fn new(id: usize, name: impl Into<String>) -> Self {
        PeDescriptor {
            id,
            name: name.into(),
        }
    }
}

/// Arithmetic mean over the supported entries, rounded half up.
pub fn task_average(exec: &[ExecTime]) -> Result<u64, ModelError> {
    let (sum, count) = exec
        .iter()
        .flatten()
        .fold((0u128, 0u128), |(s, c), &t| (s + t as u128, c + 1));
    if count == 0 {
        return Err(ModelError::NoSupportedPe);
    }
    Ok(((sum + count / 2) / count) as u64)
}

/// One schedulable task as handed to a scheduler: a global task id, the
/// execution time on every PE and the average over supported PEs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskRecord {
    tid: u64,
    exec: Vec<ExecTime>,
    avg: u64,
}

impl TaskRecord {
    pub fn new(tid: u64, exec: Vec<ExecTime>) -> Result<Self, ModelError> {
        if let Some(pe) = exec.iter().position(|t| *t == Some(0)) {
            return Err(ModelError::ZeroExecTime { pe });
        }
        let avg = task_average(&exec)?;
        Ok(TaskRecord { tid, exec, avg })
    }

    pub fn tid(&self) -> u64 {
        self.tid
    }

    pub fn exec(&self) -> &[ExecTime] {
        &self.exec
    }

    pub fn avg(&self) -> u64 {
        self.avg
    }

    pub fn pe_count(&self) -> usize {
        self.exec.len()
    }
}

/// A task template inside an application DAG. The local node id is the
/// index in [`AppDag::nodes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTemplate {
    pub name: String,
    /// Kernel class, e.g. `"fft"` or `"cpu"`; informational only.
    pub kind: String,
    pub exec: Vec<ExecTime>,
}

impl NodeTemplate {
    pub fn new(name: impl Into<String>, kind: impl Into<String>, exec: Vec<ExecTime>) -> Self {
        NodeTemplate {
            name: name.into(),
            kind: kind.into(),
            exec,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppDag {
    pub template_name: String,
    pub nodes: Vec<NodeTemplate>,
    pub edges: Vec<(usize, usize)>,
}

impl AppDag {
    pub fn predecessors(&self) -> Vec<Vec<usize>> {
        let mut preds = vec![Vec::new(); self.nodes.len()];
        for &(from, to) in &self.edges {
            preds[to].push(from);
        }
        preds
    }

    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut succs = vec![Vec::new(); self.nodes.len()];
        for &(from, to) in &self.edges {
            succs[from].push(to);
        }
        succs
    }

    /// Sum over nodes of the mean supported execution time.
    pub fn mean_total_exec(&self) -> f64 {
        self.nodes
            .iter()
            .map(|n| {
                let v: Vec<u64> = n.exec.iter().flatten().copied().collect();
                v.iter().sum::<u64>() as f64 / v.len().max(1) as f64
            })
            .sum()
    }
}

/// Checks that `dag` is a non-empty DAG with in-range edges, returning the
/// topological order produced by Kahn's algorithm with the lowest ready node
/// id taken first.
pub fn validate_dag(dag: &AppDag) -> Result<Vec<usize>, DagError> {
    let n = dag.nodes.len();
    if n == 0 {
        return Err(DagError::EmptyDag);
    }
    for &(from, to) in &dag.edges {
        if from >= n || to >= n {
            return Err(DagError::DanglingEdge { from, to });
        }
    }

    let succs = dag.successors();
    let mut indegree = vec![0usize; n];
    for &(_, to) in &dag.edges {
        indegree[to] += 1;
    }
    let mut frontier: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| indegree[v] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(v)) = frontier.pop() {
        order.push(v);
        for &s in &succs[v] {
            indegree[s] -= 1;
            if indegree[s] == 0 {
                frontier.push(Reverse(s));
            }
        }
    }
    if order.len() < n {
        return Err(DagError::CycleDetected {
            node: node_on_cycle(&succs, &indegree),
        });
    }
    Ok(order)
}

// Every node left with a positive indegree after Kahn's algorithm either lies
// on a cycle or is downstream of one. Walking backwards along unresolved
// predecessors must eventually revisit a node, which is on the cycle.
fn node_on_cycle(succs: &[Vec<usize>], indegree: &[usize]) -> usize {
    let n = indegree.len();
    let mut preds = vec![Vec::new(); n];
    for (from, list) in succs.iter().enumerate() {
        for &to in list {
            if indegree[from] > 0 && indegree[to] > 0 {
                preds[to].push(from);
            }
        }
    }
    let start = (0..n).find(|&v| indegree[v] > 0).expect("cycle exists");
    let mut seen = vec![false; n];
    let mut v = start;
    while !seen[v] {
        seen[v] = true;
        v = *preds[v]
            .iter()
            .min()
            .expect("unresolved node has an unresolved predecessor");
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeState {
    Waiting,
    Ready,
    Scheduled,
    Running,
    Done,
}

/// An arrived copy of an application DAG and the progress of each node.
#[derive(Debug, Clone)]
pub struct AppInstance {
    pub instance_id: usize,
    pub dag: Arc<AppDag>,
    pub arrival: SimTime,
    state: Vec<NodeState>,
    start: Vec<Option<SimTime>>,
    finish: Vec<Option<SimTime>>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
    pending_preds: Vec<usize>,
}

impl AppInstance {
    pub fn new(instance_id: usize, dag: Arc<AppDag>, arrival: SimTime) -> Result<Self, DagError> {
        validate_dag(&dag)?;
        let preds = dag.predecessors();
        let succs = dag.successors();
        let pending_preds = preds.iter().map(Vec::len).collect();
        let n = dag.nodes.len();
        Ok(AppInstance {
            instance_id,
            dag,
            arrival,
            state: vec![NodeState::Waiting; n],
            start: vec![None; n],
            finish: vec![None; n],
            preds,
            succs,
            pending_preds,
        })
    }

    pub fn node_count(&self) -> usize {
        self.state.len()
    }

    pub fn state(&self, node: usize) -> NodeState {
        self.state[node]
    }

    pub fn start_time(&self, node: usize) -> Option<SimTime> {
        self.start[node]
    }

    pub fn finish_time(&self, node: usize) -> Option<SimTime> {
        self.finish[node]
    }

    pub fn predecessors(&self, node: usize) -> &[usize] {
        &self.preds[node]
    }

    /// Waiting nodes whose predecessors are all done, in ascending id order.
    pub fn ready_nodes(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&v| {
                self.state[v] == NodeState::Waiting
                    && self.preds[v]
                        .iter()
                        .all(|&p| self.state[p] == NodeState::Done)
            })
            .collect()
    }

    pub fn is_complete(&self) -> bool {
        self.state.iter().all(|&s| s == NodeState::Done)
    }

    fn advance(&mut self, node: usize, from: NodeState, to: NodeState) -> Result<(), ModelError> {
        if self.state[node] != from {
            return Err(ModelError::IllegalTransition {
                node,
                from: self.state[node],
                to,
            });
        }
        self.state[node] = to;
        Ok(())
    }

    pub fn mark_ready(&mut self, node: usize) -> Result<(), ModelError> {
        if self.pending_preds[node] != 0 {
            return Err(ModelError::IllegalTransition {
                node,
                from: self.state[node],
                to: NodeState::Ready,
            });
        }
        self.advance(node, NodeState::Waiting, NodeState::Ready)
    }

    pub fn mark_scheduled(&mut self, node: usize) -> Result<(), ModelError> {
        self.advance(node, NodeState::Ready, NodeState::Scheduled)
    }

    pub fn mark_running(&mut self, node: usize, at: SimTime) -> Result<(), ModelError> {
        self.advance(node, NodeState::Scheduled, NodeState::Running)?;
        self.start[node] = Some(at);
        Ok(())
    }

    /// Completes `node` and returns the successors that became ready-eligible,
    /// in ascending id order.
    pub fn mark_done(&mut self, node: usize, at: SimTime) -> Result<Vec<usize>, ModelError> {
        self.advance(node, NodeState::Running, NodeState::Done)?;
        self.finish[node] = Some(at);
        let mut released = Vec::new();
        for &s in &self.succs[node] {
            self.pending_preds[s] -= 1;
            if self.pending_preds[s] == 0 {
                released.push(s);
            }
        }
        released.sort_unstable();
        Ok(released)
    }

    /// Nodes with no predecessors, in ascending id order.
    pub fn sources(&self) -> Vec<usize> {
        (0..self.node_count())
            .filter(|&v| self.preds[v].is_empty())
            .collect()
    }
}

/// A (task, PE, predicted finish) triple emitted by a scheduler. The finish
/// time is in the units the scheduler was fed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MappingDecision {
    pub tid: u64,
    pub pe: usize,
    pub predicted_finish: u64,
}
