//! Heisenberg-picture causal maps over a finite rooted tree.
//!
//! A map attached to the edge `(s, t)` carries observables at `t` back to
//! `s` by `F -> U* F U`, where `U` evolves states from `s` to `t`. Maps along
//! a path compose, and [`realize_sequential`] collapses a tree of observables
//! into a single observable at the root, provided every product it needs
//! exists.

use crate::error::{Error, Result};
use crate::kernel::COp;
use crate::measurement::{conjugate_observable, max_commutator, product_observable, Povm};

/// Tolerance for the unitarity check on generators.
pub const UNITARY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub usize);

/// Deterministic causal map `Φ(F) = U* F U` from the algebra at `target`
/// back to the algebra at `source`.
#[derive(Clone, Debug, PartialEq)]
pub struct CausalMap {
    source: NodeId,
    target: NodeId,
    generator: COp,
}

impl CausalMap {
    pub fn new(source: NodeId, target: NodeId, generator: COp) -> Result<Self> {
        if !generator.is_unitary(UNITARY_TOL) {
            return Err(Error::InvalidOperator("causal map generator is not unitary".into()));
        }
        Ok(CausalMap { source, target, generator })
    }

    pub fn identity(node: NodeId, dim: usize) -> Self {
        CausalMap { source: node, target: node, generator: COp::identity(dim) }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn target(&self) -> NodeId {
        self.target
    }

    pub fn generator(&self) -> &COp {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    /// `Φ(F) = U* F U`
    pub fn apply(&self, op: &COp) -> Result<COp> {
        if op.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: op.dim() });
        }
        Ok(&(&self.generator.adjoint() * op) * &self.generator)
    }
}

/// `Φ O`: the observable at `target` read as an observable at `source`.
pub fn pull_back(map: &CausalMap, observable: &Povm) -> Result<Povm> {
    conjugate_observable(observable, &map.generator)
}

/// `Φ^{s,t} Φ^{t,u} = Φ^{s,u}`; the composite generator is `U_{t,u} U_{s,t}`.
pub fn compose(first: &CausalMap, second: &CausalMap) -> Result<CausalMap> {
    if first.target != second.source {
        return Err(Error::NodeMismatch(format!(
            "first map ends at node {} but second starts at node {}",
            first.target.0, second.source.0
        )));
    }
    if first.dim() != second.dim() {
        return Err(Error::DimensionMismatch { expected: first.dim(), found: second.dim() });
    }
    Ok(CausalMap { source: first.source, target: second.target, generator: &second.generator * &first.generator })
}

#[derive(Clone, Debug)]
struct TreeNode {
    label: String,
    parent: Option<NodeId>,
    /// Map from the parent to this node.
    edge: Option<CausalMap>,
    observable: Option<Povm>,
}

/// A finite rooted tree of time points with one causal map per edge and an
/// optional observable per node.
#[derive(Clone, Debug)]
pub struct CausalTree {
    dim: usize,
    nodes: Vec<TreeNode>,
}

impl CausalTree {
    pub fn new(root_label: impl Into<String>, dim: usize) -> Self {
        CausalTree {
            dim,
            nodes: vec![TreeNode { label: root_label.into(), parent: None, edge: None, observable: None }],
        }
    }

    /// Builds a tree from an explicit parent map. Exactly one entry must be
    /// `None` (the root); `generators[i]` evolves states from `parents[i]` to
    /// node `i` and is ignored for the root.
    pub fn from_parent_map(
        labels: Vec<String>,
        parents: Vec<Option<usize>>,
        generators: Vec<COp>,
        dim: usize,
    ) -> Result<Self> {
        let n = labels.len();
        if parents.len() != n || generators.len() != n {
            return Err(Error::InvalidTree("labels, parents and generators differ in length".into()));
        }
        let roots: Vec<usize> = (0..n).filter(|&i| parents[i].is_none()).collect();
        let [root] = roots[..] else {
            return Err(Error::InvalidTree(format!("expected one root, found {}", roots.len())));
        };
        if parents.iter().flatten().any(|&p| p >= n) {
            return Err(Error::InvalidTree("parent index out of range".into()));
        }
        // every node must reach the root without revisiting anything
        for start in 0..n {
            let (mut cur, mut steps) = (start, 0);
            while let Some(p) = parents[cur] {
                cur = p;
                steps += 1;
                if steps > n {
                    return Err(Error::InvalidTree(format!("cycle through node {start}")));
                }
            }
        }
        // insert in breadth-first order so parents precede children
        let mut tree = CausalTree::new(labels[root].clone(), dim);
        let mut new_id = vec![None; n];
        new_id[root] = Some(NodeId(0));
        let mut frontier = vec![root];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &p in &frontier {
                for c in (0..n).filter(|&c| parents[c] == Some(p)) {
                    let id = tree.add_child(new_id[p].unwrap(), labels[c].clone(), generators[c].clone())?;
                    new_id[c] = Some(id);
                    next.push(c);
                }
            }
            frontier = next;
        }
        Ok(tree)
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Adds a node below `parent`; `generator` evolves states from the parent
    /// to the new node.
    pub fn add_child(&mut self, parent: NodeId, label: impl Into<String>, generator: COp) -> Result<NodeId> {
        self.check(parent)?;
        if generator.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: generator.dim() });
        }
        let id = NodeId(self.nodes.len());
        let edge = CausalMap::new(parent, id, generator)?;
        self.nodes.push(TreeNode { label: label.into(), parent: Some(parent), edge: Some(edge), observable: None });
        Ok(id)
    }

    pub fn set_observable(&mut self, node: NodeId, observable: Povm) -> Result<()> {
        self.check(node)?;
        if observable.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: observable.dim() });
        }
        self.nodes[node.0].observable = Some(observable);
        Ok(())
    }

    fn check(&self, node: NodeId) -> Result<()> {
        if node.0 >= self.nodes.len() {
            return Err(Error::InvalidTree(format!("unknown node {}", node.0)));
        }
        Ok(())
    }

    pub fn label(&self, node: NodeId) -> &str {
        &self.nodes[node.0].label
    }

    /// `π(t)`, the immediate predecessor.
    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.nodes[node.0].parent
    }

    /// `π⁻¹({s})` in declaration order.
    pub fn children(&self, node: NodeId) -> Vec<NodeId> {
        (0..self.nodes.len()).map(NodeId).filter(|&c| self.nodes[c.0].parent == Some(node)).collect()
    }

    pub fn observable(&self, node: NodeId) -> Option<&Povm> {
        self.nodes[node.0].observable.as_ref()
    }

    /// `s <= t` in the tree order.
    pub fn precedes(&self, s: NodeId, t: NodeId) -> bool {
        let mut cur = Some(t);
        while let Some(c) = cur {
            if c == s {
                return true;
            }
            cur = self.parent(c);
        }
        false
    }

    /// `Φ^{s,t}` for `s <= t`, composed along the path.
    pub fn map(&self, s: NodeId, t: NodeId) -> Result<CausalMap> {
        self.check(s)?;
        self.check(t)?;
        if !self.precedes(s, t) {
            return Err(Error::NodeMismatch(format!("{} does not precede {}", self.label(s), self.label(t))));
        }
        let mut path = Vec::new();
        let mut cur = t;
        while cur != s {
            path.push(self.nodes[cur.0].edge.clone().expect("non-root node has an edge"));
            cur = self.parent(cur).expect("path reaches s");
        }
        path.into_iter().rev().try_fold(CausalMap::identity(s, self.dim), |acc, m| compose(&acc, &m))
    }
}

/// Realization of the sequential causal observable: bottom-up, each node's
/// observable is multiplied with the pulled-back realizations of its
/// children, in declaration order. Fails with `NonCommuting` naming the first
/// offending pair of nodes.
pub fn realize_sequential(tree: &CausalTree, tol: f64) -> Result<Povm> {
    realize_at(tree, tree.root(), tol)
}

fn realize_at(tree: &CausalTree, s: NodeId, tol: f64) -> Result<Povm> {
    let own =
        tree.observable(s).ok_or_else(|| Error::InvalidTree(format!("node {} has no observable", tree.label(s))))?;
    let mut factors: Vec<(NodeId, Povm)> = vec![(s, own.clone())];
    for t in tree.children(s) {
        let realized = realize_at(tree, t, tol)?;
        let edge = tree.nodes[t.0].edge.as_ref().expect("child has an edge");
        factors.push((t, pull_back(edge, &realized)?));
    }
    for (i, (ni, a)) in factors.iter().enumerate() {
        for (nj, b) in &factors[i + 1..] {
            let (norm, _, _) = max_commutator(a, b)?;
            if norm > tol {
                return Err(Error::NonCommuting {
                    left: tree.label(*ni).to_string(),
                    right: tree.label(*nj).to_string(),
                    norm,
                });
            }
        }
    }
    let mut iter = factors.into_iter().map(|(_, o)| o);
    let first = iter.next().expect("node's own observable");
    iter.try_fold(first, |acc, o| product_observable(&acc, &o, tol))
}
