use serde::Serialize;

use crate::automaton::{AtomicGuard, StateId};
use crate::zone::{LuBounds, Zone};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NodeStatus {
    /// In the waiting list, not yet explored.
    Waiting,
    /// Explored and not covered.
    Active,
    /// Covered by an active node at the same state; has no children.
    Tentative { covered_by: NodeId },
    /// Dropped from the passed list by a node with a larger zone.
    Removed,
}

/// An edge of the propagation relation: bounds of the owning node flow to
/// `parent` through `transition`, or to a node the owner covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PropEdge {
    Transition { parent: NodeId, transition: usize },
    Cover { covered: NodeId },
}

#[derive(Clone, Debug, Serialize)]
pub struct Node {
    pub id: NodeId,
    pub state: StateId,
    pub zone: Zone,
    pub lu: LuBounds,
    pub status: NodeStatus,
    /// The node and transition that created this one.
    pub tree_parent: Option<(NodeId, usize)>,
    pub prop: Vec<PropEdge>,
    /// Disabling atom chosen per disabled transition when the node was explored.
    pub disabling: Vec<(usize, AtomicGuard)>,
}

impl Node {
    pub fn is_live(&self) -> bool {
        self.status != NodeStatus::Removed
    }

    pub fn is_active(&self) -> bool {
        self.status == NodeStatus::Active
    }

    pub fn is_tentative(&self) -> bool {
        matches!(self.status, NodeStatus::Tentative { .. })
    }

    pub fn covered_by(&self) -> Option<NodeId> {
        match self.status {
            NodeStatus::Tentative { covered_by } => Some(covered_by),
            _ => None,
        }
    }
}

/// Adaptive simulation graph: the arena of every node ever created.
/// Removed nodes stay in the arena with status [`NodeStatus::Removed`].
#[derive(Clone, Debug, Serialize)]
pub struct Asg {
    pub nodes: Vec<Node>,
    pub root: NodeId,
}

impl Asg {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn live(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_live())
    }

    pub fn active(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_active())
    }

    pub fn tentative(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.is_tentative())
    }
}
