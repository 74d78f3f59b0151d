//! Directed multigraphs with class-labelled edges.
//!
//! Parallel edges and self-loops are kept as given. Traversals build a
//! compressed adjacency on demand; the graph value itself is immutable.

mod io;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use io::{parse_edge_list, read_edge_list, write_edge_list, EDGE_LIST_MAGIC};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeClassId(pub u8);

impl EdgeClassId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub class: EdgeClassId,
}

impl Edge {
    pub fn new(src: usize, dst: usize, class: u8) -> Self {
        Edge { src, dst, class: EdgeClassId(class) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedDigraph {
    node_count: usize,
    n_classes: usize,
    edges: Vec<Edge>,
}

impl TypedDigraph {
    pub fn new(node_count: usize, n_classes: usize, edges: Vec<Edge>) -> Result<Self> {
        if n_classes == 0 || n_classes > crate::MAX_CLASSES {
            return Err(Error::domain(format!(
                "number of edge classes must be in 1..={}, got {n_classes}",
                crate::MAX_CLASSES
            )));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.src >= node_count || e.dst >= node_count {
                return Err(Error::domain(format!(
                    "edge {i} ({} -> {}) references a node outside 0..{node_count}",
                    e.src, e.dst
                )));
            }
            if e.class.index() >= n_classes {
                return Err(Error::domain(format!(
                    "edge {i} has class {} but only {n_classes} classes are declared",
                    e.class.0
                )));
            }
        }
        Ok(TypedDigraph { node_count, n_classes, edges })
    }

    /// Builds a graph whose edges were produced by trusted code (generators,
    /// transforms) and are known to be in range.
    pub(crate) fn from_parts_unchecked(node_count: usize, n_classes: usize, edges: Vec<Edge>) -> Self {
        debug_assert!(edges
            .iter()
            .all(|e| e.src < node_count && e.dst < node_count && e.class.index() < n_classes));
        TypedDigraph { node_count, n_classes, edges }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// The same graph with every edge reversed.
    pub fn reversed(&self) -> TypedDigraph {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge { src: e.dst, dst: e.src, class: e.class })
            .collect();
        TypedDigraph::from_parts_unchecked(self.node_count, self.n_classes, edges)
    }

    pub fn adjacency(&self) -> Adjacency {
        Adjacency::build(self.node_count, self.edges.iter().map(|e| (e.src, e.dst)))
    }

    pub fn reverse_adjacency(&self) -> Adjacency {
        Adjacency::build(self.node_count, self.edges.iter().map(|e| (e.dst, e.src)))
    }
}

/// Compressed sparse row successor lists.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Adjacency {
    fn build(node_count: usize, arcs: impl Iterator<Item = (usize, usize)> + Clone) -> Self {
        let mut offsets = vec![0usize; node_count + 1];
        for (u, _) in arcs.clone() {
            offsets[u + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; offsets[node_count]];
        for (u, v) in arcs {
            targets[fill[u]] = v;
            fill[u] += 1;
        }
        Adjacency { offsets, targets }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn successors(&self, u: usize) -> &[usize] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// Bow-tie split of the node set around the largest strongly connected
/// component.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ComponentDecomposition {
    pub gscc: BTreeSet<usize>,
    pub gin: BTreeSet<usize>,
    pub gout: BTreeSet<usize>,
    pub rest: BTreeSet<usize>,
}

/// Strongly connected component label of every node (iterative Tarjan).
/// Labels are assigned in the order components are completed.
pub fn scc_labels(adj: &Adjacency) -> (Vec<usize>, usize) {
    const UNVISITED: usize = usize::MAX;
    let n = adj.node_count();
    let mut index = vec![UNVISITED; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNVISITED; n];
    let mut stack = Vec::new();
    // (node, position in its successor list)
    let mut call = Vec::new();
    let mut next_index = 0;
    let mut n_comp = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0usize));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (u, ref mut pos)) = call.last_mut() {
            let succ = adj.successors(u);
            if *pos < succ.len() {
                let v = succ[*pos];
                *pos += 1;
                if index[v] == UNVISITED {
                    index[v] = next_index;
                    lowlink[v] = next_index;
                    next_index += 1;
                    stack.push(v);
                    on_stack[v] = true;
                    call.push((v, 0));
                } else if on_stack[v] {
                    lowlink[u] = lowlink[u].min(index[v]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                lowlink[parent] = lowlink[parent].min(lowlink[u]);
            }
            if lowlink[u] == index[u] {
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp[w] = n_comp;
                    if w == u {
                        break;
                    }
                }
                n_comp += 1;
            }
        }
    }
    (comp, n_comp)
}

/// Membership mask of the largest SCC (ties go to the component holding the
/// lowest node index). Empty for the empty graph.
fn largest_scc_mask(adj: &Adjacency) -> Vec<bool> {
    let n = adj.node_count();
    let (comp, n_comp) = scc_labels(adj);
    let mut size = vec![0usize; n_comp];
    let mut min_node = vec![usize::MAX; n_comp];
    for (u, &c) in comp.iter().enumerate() {
        size[c] += 1;
        min_node[c] = min_node[c].min(u);
    }
    let best = (0..n_comp).max_by(|&a, &b| size[a].cmp(&size[b]).then(min_node[b].cmp(&min_node[a])));
    match best {
        Some(c) => comp.iter().map(|&x| x == c).collect(),
        None => vec![false; n],
    }
}

/// Marks every node reachable from any `true` entry of `start`.
fn flood(adj: &Adjacency, start: &[bool]) -> Vec<bool> {
    let mut seen = start.to_vec();
    let mut queue: Vec<usize> = (0..seen.len()).filter(|&u| seen[u]).collect();
    while let Some(u) = queue.pop() {
        for &v in adj.successors(u) {
            if !seen[v] {
                seen[v] = true;
                queue.push(v);
            }
        }
    }
    seen
}

/// Node counts of the bow-tie decomposition, computed without materialising
/// node sets. Used by the simulator on large graphs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BowTieSizes {
    pub gscc: usize,
    pub gin: usize,
    pub gout: usize,
    pub rest: usize,
}

fn bow_tie_masks(g: &TypedDigraph) -> (Vec<bool>, Vec<bool>, Vec<bool>) {
    let fwd = g.adjacency();
    let rev = g.reverse_adjacency();
    let core = largest_scc_mask(&fwd);
    let downstream = flood(&fwd, &core);
    let upstream = flood(&rev, &core);
    (core, upstream, downstream)
}

pub fn bow_tie_sizes(g: &TypedDigraph) -> BowTieSizes {
    let (core, up, down) = bow_tie_masks(g);
    let mut s = BowTieSizes::default();
    for u in 0..g.node_count() {
        if core[u] {
            s.gscc += 1;
        } else if up[u] {
            s.gin += 1;
        } else if down[u] {
            s.gout += 1;
        } else {
            s.rest += 1;
        }
    }
    s
}

pub fn decompose(g: &TypedDigraph) -> ComponentDecomposition {
    let (core, up, down) = bow_tie_masks(g);
    let mut d = ComponentDecomposition::default();
    for u in 0..g.node_count() {
        let set = if core[u] {
            &mut d.gscc
        } else if up[u] {
            &mut d.gin
        } else if down[u] {
            &mut d.gout
        } else {
            &mut d.rest
        };
        set.insert(u);
    }
    d
}

pub fn reachable_set(g: &TypedDigraph, seed: usize) -> Result<BTreeSet<usize>> {
    if seed >= g.node_count() {
        return Err(Error::domain(format!(
            "seed {seed} out of range for a graph with {} nodes",
            g.node_count()
        )));
    }
    let mut start = vec![false; g.node_count()];
    start[seed] = true;
    let seen = flood(&g.adjacency(), &start);
    Ok((0..seen.len()).filter(|&u| seen[u]).collect())
}

/// Replaces edge `edge` (u -> v) by u -> z and z -> v of the same class,
/// where z is a fresh node appended at the end. Returns the new graph and z.
pub fn split_edge(g: &TypedDigraph, edge: usize) -> Result<(TypedDigraph, usize)> {
    let Some(&old) = g.edges.get(edge) else {
        return Err(Error::domain(format!(
            "edge index {edge} out of range for a graph with {} edges",
            g.edge_count()
        )));
    };
    let z = g.node_count;
    let mut edges = Vec::with_capacity(g.edges.len() + 1);
    edges.extend_from_slice(&g.edges[..edge]);
    edges.push(Edge { src: old.src, dst: z, class: old.class });
    edges.extend_from_slice(&g.edges[edge + 1..]);
    edges.push(Edge { src: z, dst: old.dst, class: old.class });
    Ok((TypedDigraph::from_parts_unchecked(z + 1, g.n_classes, edges), z))
}
