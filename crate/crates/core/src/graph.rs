//! Internal graphs, tail attachment, the symmetric arc space and a
//! fundamental cycle basis.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("line {line}: expected two vertex ids `u v`, got {content:?}")]
    MalformedLine { line: usize, content: String },
    #[error("line {line}: duplicate edge {u}-{v}")]
    DuplicateEdge { line: usize, u: usize, v: usize },
    #[error("line {line}: self-loop at vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },
    #[error("graph is disconnected: vertex {unreachable} is not reachable from vertex 0")]
    Disconnected { unreachable: usize },
    #[error("graph has no vertices")]
    Empty,
    #[error("vertex {vertex} is out of range for a graph with {vertex_count} vertices")]
    InvalidVertex { vertex: usize, vertex_count: usize },
    #[error("at least one tail must be attached")]
    EmptyAttachment,
}

/// The finite connected graph the walker scatters on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InternalGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl InternalGraph {
    /// Builds a simple connected graph. Edges are normalized to `(min, max)`
    /// and sorted lexicographically.
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let tagged: Vec<_> = edges.iter().enumerate().map(|(i, &e)| (i + 1, e)).collect();
        Self::from_tagged(vertex_count, &tagged)
    }

    /// The edgeless graph on one vertex.
    pub fn single_vertex() -> Self {
        InternalGraph {
            vertex_count: 1,
            edges: Vec::new(),
            adjacency: vec![Vec::new()],
        }
    }

    fn from_tagged(
        vertex_count: usize,
        edges: &[(usize, (usize, usize))],
    ) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        let mut seen = BTreeMap::new();
        for &(line, (a, b)) in edges {
            for vertex in [a, b] {
                if vertex >= vertex_count {
                    return Err(GraphError::InvalidVertex {
                        vertex,
                        vertex_count,
                    });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop { line, vertex: a });
            }
            let key = (a.min(b), a.max(b));
            if seen.insert(key, line).is_some() {
                return Err(GraphError::DuplicateEdge {
                    line,
                    u: key.0,
                    v: key.1,
                });
            }
        }
        let edges: Vec<(usize, usize)> = seen.into_keys().collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let graph = InternalGraph {
            vertex_count,
            edges,
            adjacency,
        };
        if let Some(unreachable) = graph.first_unreachable() {
            return Err(GraphError::Disconnected { unreachable });
        }
        Ok(graph)
    }

    fn first_unreachable(&self) -> Option<usize> {
        let (_, depth) = self.bfs_tree();
        depth.iter().position(Option::is_none)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adjacency[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adjacency[u].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency
            .get(u)
            .is_some_and(|n| n.binary_search(&v).is_ok())
    }

    /// `|E| - |V| + 1`, the number of independent cycles.
    pub fn cyclomatic_number(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    /// Breadth-first tree from vertex 0 with neighbors visited in id order.
    /// Returns parent pointers and depths (`None` for unreachable vertices).
    fn bfs_tree(&self) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let mut parent = vec![None; self.vertex_count];
        let mut depth = vec![None; self.vertex_count];
        let mut queue = VecDeque::new();
        depth[0] = Some(0);
        queue.push_back(0);
        while let Some(u) = queue.pop_front() {
            let du = depth[u].unwrap_or(0);
            for &v in &self.adjacency[u] {
                if depth[v].is_none() {
                    depth[v] = Some(du + 1);
                    parent[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        (parent, depth)
    }

    /// Shortest path (as a vertex sequence) from any vertex in `from` to any
    /// vertex in `to`. Ties resolve toward lower ids.
    pub fn shortest_path_between(&self, from: &[usize], to: &[usize]) -> Option<Vec<usize>> {
        let mut prev = vec![None; self.vertex_count];
        let mut visited = vec![false; self.vertex_count];
        let mut queue = VecDeque::new();
        let mut sources: Vec<usize> = from.to_vec();
        sources.sort_unstable();
        sources.dedup();
        for &s in &sources {
            visited[s] = true;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            if to.contains(&u) {
                let mut path = vec![u];
                let mut cur = u;
                while let Some(p) = prev[cur] {
                    path.push(p);
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &v in &self.adjacency[u] {
                if !visited[v] {
                    visited[v] = true;
                    prev[v] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

/// Parses the edge-list text format: one `u v` pair per line, `#` starts a
/// comment, blank lines are ignored. A line holding a single id declares an
/// isolated vertex, which is how the one-vertex graph is written.
pub fn parse_edge_list(text: &str) -> Result<InternalGraph, GraphError> {
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let malformed = || GraphError::MalformedLine {
            line,
            content: raw.to_string(),
        };
        let ids: Vec<usize> = body
            .split_whitespace()
            .map(|tok| tok.parse::<usize>().map_err(|_| malformed()))
            .collect::<Result<_, _>>()?;
        match ids.as_slice() {
            [v] => max_id = Some(max_id.map_or(*v, |m| m.max(*v))),
            [u, v] => {
                max_id = Some(max_id.map_or(*u.max(v), |m| m.max(*u).max(*v)));
                edges.push((line, (*u, *v)));
            }
            _ => return Err(malformed()),
        }
    }
    let vertex_count = max_id.map_or(0, |m| m + 1);
    InternalGraph::from_tagged(vertex_count, &edges)
}

/// An internal graph with `r >= 1` semi-infinite tails attached.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailedGraph {
    internal: InternalGraph,
    tail_attachments: Vec<usize>,
    tilde_degree: Vec<usize>,
}

/// Attaches one tail per entry of `attachments`; repeated ids put several
/// tails on the same vertex.
pub fn attach_tails(g: InternalGraph, attachments: &[usize]) -> Result<TailedGraph, GraphError> {
    if attachments.is_empty() {
        return Err(GraphError::EmptyAttachment);
    }
    let n = g.vertex_count();
    let mut tilde_degree: Vec<usize> = (0..n).map(|u| g.degree(u)).collect();
    for &u in attachments {
        if u >= n {
            return Err(GraphError::InvalidVertex {
                vertex: u,
                vertex_count: n,
            });
        }
        tilde_degree[u] += 1;
    }
    Ok(TailedGraph {
        internal: g,
        tail_attachments: attachments.to_vec(),
        tilde_degree,
    })
}

impl TailedGraph {
    pub fn internal(&self) -> &InternalGraph {
        &self.internal
    }

    pub fn tail_count(&self) -> usize {
        self.tail_attachments.len()
    }

    /// Attachment vertex of each tail, in tail order.
    pub fn tail_attachments(&self) -> &[usize] {
        &self.tail_attachments
    }

    /// Degree inside the internal graph, `d(u)`.
    pub fn degree(&self, u: usize) -> usize {
        self.internal.degree(u)
    }

    /// Degree in the whole tailed graph, `d̃(u)`.
    pub fn tilde_degree(&self, u: usize) -> usize {
        self.tilde_degree[u]
    }

    pub fn tilde_degrees(&self) -> &[usize] {
        &self.tilde_degree
    }

    pub fn tails_at(&self, u: usize) -> usize {
        self.tail_attachments.iter().filter(|&&a| a == u).count()
    }

    /// Boundary vertices (where at least one tail attaches), sorted.
    pub fn boundary(&self) -> Vec<usize> {
        let mut b = self.tail_attachments.clone();
        b.sort_unstable();
        b.dedup();
        b
    }

    pub fn is_boundary(&self, u: usize) -> bool {
        self.tilde_degree[u] > self.internal.degree(u)
    }
}

/// Indexed symmetric arc set of the internal graph.
///
/// Edge `k = (u, v)` with `u < v` yields arc `2k = u -> v` and
/// `2k + 1 = v -> u`, so the inverse arc is `a ^ 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArcSpace {
    arcs: Vec<(usize, usize)>,
    in_arcs: Vec<Vec<usize>>,
    out_arcs: Vec<Vec<usize>>,
    lookup: BTreeMap<(usize, usize), usize>,
}

pub fn arc_space(g: &InternalGraph) -> ArcSpace {
    let mut arcs = Vec::with_capacity(2 * g.edge_count());
    for &(u, v) in g.edges() {
        arcs.push((u, v));
        arcs.push((v, u));
    }
    let mut in_arcs = vec![Vec::new(); g.vertex_count()];
    let mut out_arcs = vec![Vec::new(); g.vertex_count()];
    let mut lookup = BTreeMap::new();
    for (a, &(o, t)) in arcs.iter().enumerate() {
        out_arcs[o].push(a);
        in_arcs[t].push(a);
        lookup.insert((o, t), a);
    }
    ArcSpace {
        arcs,
        in_arcs,
        out_arcs,
        lookup,
    }
}

impl ArcSpace {
    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn origin(&self, a: usize) -> usize {
        self.arcs[a].0
    }

    pub fn terminus(&self, a: usize) -> usize {
        self.arcs[a].1
    }

    pub fn bar(&self, a: usize) -> usize {
        a ^ 1
    }

    /// Arcs ending at `u`, in arc order.
    pub fn in_arcs(&self, u: usize) -> &[usize] {
        &self.in_arcs[u]
    }

    /// Arcs leaving `u`, in arc order.
    pub fn out_arcs(&self, u: usize) -> &[usize] {
        &self.out_arcs[u]
    }

    pub fn find(&self, origin: usize, terminus: usize) -> Option<usize> {
        self.lookup.get(&(origin, terminus)).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.arcs.iter().enumerate().map(|(a, &(o, t))| (a, o, t))
    }
}

/// A closed walk through distinct arcs, none paired with its inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientedCycle {
    arcs: Vec<usize>,
}

impl OrientedCycle {
    pub fn arcs(&self) -> &[usize] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_even(&self) -> bool {
        self.arcs.len().is_multiple_of(2)
    }

    /// Vertices in traversal order, starting at the origin of the first arc.
    pub fn vertices(&self, arcs: &ArcSpace) -> Vec<usize> {
        self.arcs.iter().map(|&a| arcs.origin(a)).collect()
    }
}

/// One cycle per non-tree edge of the breadth-first tree rooted at 0. Each
/// cycle starts with its non-tree arc, oriented from the lower to the higher
/// vertex id, and closes through the tree.
pub fn fundamental_cycles(g: &InternalGraph) -> Vec<OrientedCycle> {
    let arcs = arc_space(g);
    let (parent, depth) = g.bfs_tree();
    let is_tree_edge = |u: usize, v: usize| parent[v] == Some(u) || parent[u] == Some(v);
    let mut cycles = Vec::new();
    for &(u, v) in g.edges() {
        if is_tree_edge(u, v) {
            continue;
        }
        // climb from v and u to their lowest common ancestor
        let mut up_from_v = vec![v];
        let mut up_from_u = vec![u];
        let (mut x, mut y) = (v, u);
        while x != y {
            let dx = depth[x].unwrap_or(0);
            let dy = depth[y].unwrap_or(0);
            if dx >= dy {
                x = parent[x].expect("non-root vertex has a parent");
                up_from_v.push(x);
            } else {
                y = parent[y].expect("non-root vertex has a parent");
                up_from_u.push(y);
            }
        }
        // u -> v -> ... -> lca -> ... -> u
        up_from_u.pop();
        let mut walk = up_from_v;
        walk.extend(up_from_u.into_iter().rev());
        let mut cycle_arcs = vec![arcs.find(u, v).expect("edge present")];
        for pair in walk.windows(2) {
            cycle_arcs.push(arcs.find(pair[0], pair[1]).expect("tree edge present"));
        }
        cycles.push(OrientedCycle { arcs: cycle_arcs });
    }
    cycles
}
