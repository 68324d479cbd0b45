use num_rational::Ratio;

use super::pattern::Pattern;
use crate::kb::Atom;

pub type NodeId = usize;

/// How a node's atom was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Root,
    Dependent,
    /// Copy of a right sibling of the parent node.
    Brother,
    /// Direct subconcept or subrole of a sibling's atom.
    Specialization,
}

#[derive(Debug, Clone)]
pub struct TrieNode {
    pub atom: Atom,
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Atoms on the root path, this one included.
    pub depth: usize,
    pub support: Ratio<usize>,
    pub answers: usize,
    /// Variables of `atom` not occurring earlier on the path.
    pub new_vars: Vec<String>,
    pub origin: Origin,
}

/// Arena-backed search tree; node 0 is the root.
#[derive(Debug, Clone)]
pub struct Trie {
    nodes: Vec<TrieNode>,
}

impl Trie {
    pub fn new(root: TrieNode) -> Self {
        Trie { nodes: vec![root] }
    }

    pub const ROOT: NodeId = 0;

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &TrieNode {
        &self.nodes[id]
    }

    pub fn add_child(&mut self, parent: NodeId, mut node: TrieNode) -> NodeId {
        let id = self.nodes.len();
        node.parent = Some(parent);
        self.nodes.push(node);
        self.nodes[parent].children.push(id);
        id
    }

    /// Atoms from the root down to `id`.
    pub fn path_atoms(&self, id: NodeId) -> Vec<Atom> {
        let mut out = Vec::with_capacity(self.nodes[id].depth);
        let mut cur = Some(id);
        while let Some(n) = cur {
            out.push(self.nodes[n].atom.clone());
            cur = self.nodes[n].parent;
        }
        out.reverse();
        out
    }

    pub fn pattern(&self, id: NodeId) -> Pattern {
        Pattern::new(self.path_atoms(id))
    }

    /// Node ids in depth-first order, children in list order.
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![Self::ROOT];
        while let Some(n) = stack.pop() {
            out.push(n);
            stack.extend(self.nodes[n].children.iter().rev());
        }
        out
    }

    /// `(parent, child)` pairs in preorder of the child.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        self.preorder()
            .into_iter()
            .filter_map(|n| self.nodes[n].parent.map(|p| (p, n)))
            .collect()
    }
}
