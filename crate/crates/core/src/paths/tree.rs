//! Maximum influence trees rooted at the virtual seed.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::boost::{BoostedGraphView, DelayPolicy};
use crate::scalar::Scalar;

use super::convolve::{total_mass, truncated_convolve};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeKind {
    /// Most probable paths by propagation probability, subject to the
    /// minimum path time fitting the horizon.
    Mit,
    /// Paths maximizing `pp(P) * p_T(P)`, carrying per-node truncated
    /// arrival-time distributions.
    Mtcit,
}

/// Union of best paths from the virtual seed to every reachable node.
#[derive(Debug, Clone)]
pub struct InfluenceTree<T> {
    kind: TreeKind,
    root: u32,
    horizon: usize,
    parent: Vec<Option<u32>>,
    children: Vec<Vec<u32>>,
    in_tree: Vec<bool>,
    /// Activation probability: path probability for MIT, `pp * p_T` for
    /// MTCIT; zero outside the tree.
    ap: Vec<T>,
    /// Propagation probability of the root path.
    pp: Vec<T>,
    /// Effective probability of the edge from the parent, as of the last
    /// build or refresh.
    edge_prob_from_parent: Vec<T>,
    depth: Vec<u32>,
    /// Minimum feasible arrival time of the root path.
    t_min: Vec<u32>,
    /// Largest single-node arrival reduction a delay boost could buy on the
    /// root path (MTCIT bookkeeping for boundary nodes).
    shift: Vec<u32>,
    /// Truncated arrival-time distribution (MTCIT only).
    time_dist: Vec<Option<Vec<T>>>,
    /// Settle order; parents precede children, root first.
    members: Vec<u32>,
}

struct HeapEntry<T> {
    key: T,
    node: u32,
    parent: u32,
    edge_prob: T,
    /// Minimum feasible arrival time of the path into `node`.
    t_min: u32,
    shift: u32,
}

impl<T: Scalar> PartialEq for HeapEntry<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<T: Scalar> Eq for HeapEntry<T> {}
impl<T: Scalar> PartialOrd for HeapEntry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Scalar> Ord for HeapEntry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on key; ties prefer the smaller node id, then parent id
        self.key
            .partial_cmp(&other.key)
            .expect("tree keys are never NaN")
            .then_with(|| other.node.cmp(&self.node))
            .then_with(|| other.parent.cmp(&self.parent))
    }
}

/// Builds the maximum influence tree: Dijkstra on path probability from
/// `root`, never extending a path whose minimum arrival time would exceed
/// `horizon`.
pub fn build_mit<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    root: u32,
    horizon: usize,
) -> InfluenceTree<T> {
    build(view, root, horizon, TreeKind::Mit, None)
}

/// [`build_mit`] that stops after settling the first `limit` non-root nodes.
pub fn build_mit_partial<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    root: u32,
    horizon: usize,
    limit: usize,
) -> InfluenceTree<T> {
    build(view, root, horizon, TreeKind::Mit, Some(limit))
}

/// Builds the time-constrained tree: best-first on `pp * p_T`, where each
/// settled node carries the truncated convolution of its root path's delays.
pub fn build_mtcit<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    root: u32,
    horizon: usize,
) -> InfluenceTree<T> {
    build(view, root, horizon, TreeKind::Mtcit, None)
}

/// [`build_mtcit`] stopping after the first `limit` non-root settles.
pub fn build_mtcit_partial<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    root: u32,
    horizon: usize,
    limit: usize,
) -> InfluenceTree<T> {
    build(view, root, horizon, TreeKind::Mtcit, Some(limit))
}

fn build<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    root: u32,
    horizon: usize,
    kind: TreeKind,
    limit: Option<usize>,
) -> InfluenceTree<T> {
    let n = view.node_count();
    let mut tree = InfluenceTree {
        kind,
        root,
        horizon,
        parent: vec![None; n],
        children: vec![Vec::new(); n],
        in_tree: vec![false; n],
        ap: vec![T::zero(); n],
        pp: vec![T::zero(); n],
        edge_prob_from_parent: vec![T::zero(); n],
        depth: vec![0; n],
        t_min: vec![0; n],
        shift: vec![0; n],
        time_dist: vec![None; n],
        members: Vec::new(),
    };

    tree.in_tree[root as usize] = true;
    tree.ap[root as usize] = T::one();
    tree.pp[root as usize] = T::one();
    tree.members.push(root);
    if kind == TreeKind::Mtcit {
        let mut d = vec![T::zero(); horizon + 1];
        d[0] = T::one();
        tree.time_dist[root as usize] = Some(d);
    }

    // A delay boost can pull a path's minimum arrival down by at most
    // (min_delay - floor) at one node; boundary nodes within that allowance
    // enter the MTCIT with zero activation probability so their pull-in gain
    // is visible to the selector.
    let shift_floor = match (kind, view.spec().policy) {
        (TreeKind::Mtcit, DelayPolicy::FirstTu) => Some(1usize),
        (TreeKind::Mtcit, DelayPolicy::SecondTu) => Some(2usize),
        _ => None,
    };

    let mut heap: BinaryHeap<HeapEntry<T>> = BinaryHeap::new();
    let mut settled_non_root = 0usize;
    push_extensions(view, &tree, root, horizon, kind, shift_floor, &mut heap);

    while let Some(entry) = heap.pop() {
        let w = entry.node as usize;
        if tree.in_tree[w] {
            continue;
        }
        let parent = entry.parent;
        tree.in_tree[w] = true;
        tree.parent[w] = Some(parent);
        tree.children[parent as usize].push(entry.node);
        tree.depth[w] = tree.depth[parent as usize] + 1;
        tree.edge_prob_from_parent[w] = entry.edge_prob;
        tree.pp[w] = tree.pp[parent as usize] * entry.edge_prob;
        match kind {
            TreeKind::Mit => {
                tree.ap[w] = entry.key;
            }
            TreeKind::Mtcit => {
                let parent_dist = tree.time_dist[parent as usize]
                    .as_deref()
                    .expect("settled parent carries a distribution");
                let dist = truncated_convolve(parent_dist, view.delay(parent), horizon);
                tree.ap[w] = tree.pp[w] * total_mass(&dist);
                tree.time_dist[w] = Some(dist);
            }
        }
        tree.members.push(entry.node);
        tree.t_min[w] = entry.t_min;
        tree.shift[w] = entry.shift;

        settled_non_root += 1;
        if let Some(limit) = limit {
            if settled_non_root >= limit {
                break;
            }
        }
        push_extensions(view, &tree, entry.node, horizon, kind, shift_floor, &mut heap);
    }
    tree
}

fn push_extensions<T: Scalar>(
    view: &BoostedGraphView<'_, T>,
    tree: &InfluenceTree<T>,
    u: u32,
    horizon: usize,
    kind: TreeKind,
    shift_floor: Option<usize>,
    heap: &mut BinaryHeap<HeapEntry<T>>,
) {
    let pp_u = tree.pp[u as usize];
    let Some(min_delay) = view.delay(u).min_delay() else {
        return; // nothing from u ever lands
    };
    let t_min_next = tree.t_min[u as usize] as u64 + min_delay as u64;
    let (ext_mass, shift_next, admit_zero) = match kind {
        TreeKind::Mit => {
            if t_min_next > horizon as u64 {
                return;
            }
            (T::one(), 0u32, false)
        }
        TreeKind::Mtcit => {
            let shift_next = match shift_floor {
                Some(floor) => tree.shift[u as usize]
                    .max(min_delay.saturating_sub(floor) as u32),
                None => 0,
            };
            let admit_zero = shift_floor.is_some()
                && t_min_next <= horizon as u64 + shift_next as u64;
            let dist_u = tree.time_dist[u as usize]
                .as_deref()
                .expect("settled node carries a distribution");
            let extended = truncated_convolve(dist_u, view.delay(u), horizon);
            let p_t = total_mass(&extended);
            if p_t <= T::zero() && !admit_zero {
                return;
            }
            (p_t, shift_next, admit_zero)
        }
    };
    for edge in view.graph().out_edges(u) {
        if tree.in_tree[edge.target as usize] {
            continue;
        }
        let p = view.edge_prob(u, edge.prob);
        if p <= T::zero() {
            continue;
        }
        let key = pp_u * p * ext_mass;
        if key <= T::zero() && !admit_zero {
            continue;
        }
        heap.push(HeapEntry {
            key,
            node: edge.target,
            parent: u,
            edge_prob: p,
            t_min: t_min_next.min(u32::MAX as u64) as u32,
            shift: shift_next,
        });
    }
}

impl<T: Scalar> InfluenceTree<T> {
    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Size of the underlying node-id space (graph node count at build).
    pub fn capacity(&self) -> usize {
        self.parent.len()
    }

    /// Settle order, root first; parents precede children.
    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn contains(&self, w: u32) -> bool {
        self.in_tree[w as usize]
    }

    pub fn ap(&self, w: u32) -> T {
        self.ap[w as usize]
    }

    pub fn pp(&self, w: u32) -> T {
        self.pp[w as usize]
    }

    pub fn parent(&self, w: u32) -> Option<u32> {
        self.parent[w as usize]
    }

    pub fn children(&self, w: u32) -> &[u32] {
        &self.children[w as usize]
    }

    pub fn depth(&self, w: u32) -> u32 {
        self.depth[w as usize]
    }

    pub fn edge_prob_from_parent(&self, w: u32) -> T {
        self.edge_prob_from_parent[w as usize]
    }

    pub fn time_dist(&self, w: u32) -> Option<&[T]> {
        self.time_dist[w as usize].as_deref()
    }

    /// Root-to-`w` node sequence; empty if `w` is not in the tree.
    pub fn path_from_root(&self, w: u32) -> Vec<u32> {
        if !self.in_tree[w as usize] {
            return Vec::new();
        }
        let mut path = vec![w];
        let mut cur = w;
        while let Some(p) = self.parent[cur as usize] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Pre-order walk of the subtree rooted at `u`, `u` included.
    pub fn subtree(&self, u: u32) -> Vec<u32> {
        let mut out = Vec::new();
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend_from_slice(&self.children[v as usize]);
        }
        out
    }

    /// Recomputes pp, ap (and arrival distributions for MTCIT) for the strict
    /// descendants of `u` against the current `view`, keeping the structure.
    pub fn refresh_subtree(&mut self, view: &BoostedGraphView<'_, T>, u: u32) {
        let mut stack: Vec<u32> = self.children[u as usize].to_vec();
        while let Some(w) = stack.pop() {
            let parent = self.parent[w as usize].expect("non-root tree member");
            let raw = view
                .graph()
                .out_edges(parent)
                .iter()
                .find(|e| e.target == w)
                .expect("tree edge exists in the graph")
                .prob;
            let p = view.edge_prob(parent, raw);
            self.edge_prob_from_parent[w as usize] = p;
            self.pp[w as usize] = self.pp[parent as usize] * p;
            match self.kind {
                TreeKind::Mit => {
                    self.ap[w as usize] = self.pp[w as usize];
                }
                TreeKind::Mtcit => {
                    let parent_dist = self.time_dist[parent as usize]
                        .as_deref()
                        .expect("parent carries a distribution");
                    let dist = truncated_convolve(parent_dist, view.delay(parent), self.horizon);
                    self.ap[w as usize] = self.pp[w as usize] * total_mass(&dist);
                    self.time_dist[w as usize] = Some(dist);
                }
            }
            stack.extend_from_slice(&self.children[w as usize]);
        }
    }
}
