//! Simple undirected graphs, rooted trees and degeneracy orderings.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("loop at vertex {0} rejected")]
    LoopRejected(String),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(String, String),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("graph is not a tree")]
    NotATree,
    #[error("io error: {0}")]
    Io(String),
}

type Result<T> = std::result::Result<T, GraphError>;

/// Input formats accepted by [`load_graph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    EdgeList,
    Json,
}

impl GraphFormat {
    /// `.json` selects JSON, anything else the edge-list format.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => GraphFormat::Json,
            _ => GraphFormat::EdgeList,
        }
    }
}

/// A simple graph on vertices `0..n`. Edge ids index [`Graph::edges`];
/// each edge is stored with its smaller endpoint first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<(usize, usize)>>,
    names: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Graph::build(n, edges, None)
    }

    fn build(n: usize, edges: &[(usize, usize)], names: Option<Vec<String>>) -> Result<Self> {
        let mut g = Graph {
            n,
            edges: Vec::with_capacity(edges.len()),
            adj: vec![Vec::new(); n],
            names,
        };
        let mut seen = HashSet::with_capacity(edges.len());
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::LoopRejected(g.name(u)));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(GraphError::DuplicateEdge(g.name(key.0), g.name(key.1)));
            }
            let id = g.edges.len();
            g.edges.push(key);
            g.adj[u].push((v, id));
            g.adj[v].push((u, id));
        }
        Ok(g)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges).expect("path is simple")
    }

    /// The star `K_{1,k}` with center 0.
    pub fn star(k: usize) -> Self {
        let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
        Graph::new(k + 1, &edges).expect("star is simple")
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, &edges).expect("cycle is simple")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Graph::new(n, &edges).expect("complete graph is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    /// `(neighbor, edge id)` pairs in insertion order.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_id(&self, u: usize, v: usize) -> Option<usize> {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() { (u, v) } else { (v, u) };
        self.adj[a].iter().find(|&&(w, _)| w == b).map(|&(_, e)| e)
    }

    /// Original label of vertex `v` if the input used non-numeric names.
    pub fn name(&self, v: usize) -> String {
        match &self.names {
            Some(names) if v < names.len() => names[v].clone(),
            _ => v.to_string(),
        }
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for &(w, _) in &self.adj[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n <= 1 || self.components().len() == 1
    }

    pub fn is_tree(&self) -> bool {
        self.n >= 1 && self.edges.len() + 1 == self.n && self.is_connected()
    }

    pub fn is_forest(&self) -> bool {
        self.edges.len() + self.components().len() == self.n
    }

    /// True if some component is a single edge.
    pub fn has_isolated_edge(&self) -> bool {
        self.edges
            .iter()
            .any(|&(u, v)| self.degree(u) == 1 && self.degree(v) == 1)
    }

    /// Subgraph induced by `vertices`, renumbered in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let pos: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter_map(|&(u, v)| Some((*pos.get(&u)?, *pos.get(&v)?)))
            .collect();
        let mut g = Graph::new(vertices.len(), &edges).expect("induced subgraph is simple");
        if let Some(names) = &self.names {
            g.names = Some(vertices.iter().map(|&v| names[v].clone()).collect());
        }
        g
    }

    /// Image under `perm` (vertex `v` becomes `perm[v]`), edges kept in id order.
    pub fn relabeled(&self, perm: &[usize]) -> Graph {
        let edges: Vec<_> = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
        Graph::new(self.n, &edges).expect("relabeling preserves simplicity")
    }

    /// Parses the edge-list format. Numeric inputs keep their ids;
    /// otherwise names are numbered by first appearance.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 2 {
                return Err(GraphError::Parse {
                    line: i + 1,
                    msg: format!("expected two vertices, found {}", tokens.len()),
                });
            }
            pairs.push((i + 1, tokens[0], tokens[1]));
        }
        let numeric: Option<Vec<(usize, usize)>> = pairs
            .iter()
            .map(|(_, a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
            .collect();
        if let Some(edges) = numeric {
            let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
            return Graph::new(n, &edges);
        }
        let mut ids: HashMap<&str, usize> = HashMap::new();
        let mut names = Vec::new();
        let mut edges = Vec::new();
        for &(_, a, b) in &pairs {
            let mut id = |s| {
                *ids.entry(s).or_insert_with(|| {
                    names.push(s.to_string());
                    names.len() - 1
                })
            };
            let (u, v) = (id(a), id(b));
            edges.push((u, v));
        }
        Graph::build(names.len(), &edges, Some(names))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let parsed: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Parse {
            line: e.line(),
            msg: e.to_string(),
        })?;
        let edges: Vec<_> = parsed.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::new(parsed.n, &edges)
    }

    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        if self.edges.is_empty() && self.n > 0 {
            s.push_str(&format!("# n = {}\n", self.n));
        }
        for &(u, v) in &self.edges {
            s.push_str(&format!("{} {}\n", self.name(u), self.name(v)));
        }
        s
    }

    pub fn to_json(&self) -> String {
        let j = GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&j).expect("graph json")
    }
}

/// Reads a graph from `source` in the given format.
pub fn load_graph<R: Read>(mut source: R, format: GraphFormat) -> Result<Graph> {
    let mut text = String::new();
    source
        .read_to_string(&mut text)
        .map_err(|e| GraphError::Io(e.to_string()))?;
    match format {
        GraphFormat::EdgeList => Graph::from_edge_list(&text),
        GraphFormat::Json => Graph::from_json(&text),
    }
}

/// A tree with a chosen root. Children are listed in increasing id order.
#[derive(Debug, Clone)]
pub struct RootedTree<'a> {
    pub graph: &'a Graph,
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub parent_edge: Vec<Option<usize>>,
    pub children: Vec<Vec<(usize, usize)>>,
    pub bfs_order: Vec<usize>,
}

impl<'a> RootedTree<'a> {
    pub fn new(graph: &'a Graph, root: usize) -> Result<Self> {
        if !graph.is_tree() || root >= graph.n() {
            return Err(GraphError::NotATree);
        }
        let n = graph.n();
        let mut parent = vec![None; n];
        let mut parent_edge = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut bfs_order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            bfs_order.push(v);
            let mut kids: Vec<(usize, usize)> = graph
                .neighbors(v)
                .iter()
                .copied()
                .filter(|&(w, _)| !seen[w])
                .collect();
            kids.sort_unstable();
            for &(w, e) in &kids {
                seen[w] = true;
                parent[w] = Some(v);
                parent_edge[w] = Some(e);
                queue.push_back(w);
            }
            children[v] = kids;
        }
        Ok(RootedTree {
            graph,
            root,
            parent,
            parent_edge,
            children,
            bfs_order,
        })
    }

    /// Number of children `r_v`.
    pub fn child_count(&self, v: usize) -> usize {
        self.children[v].len()
    }
}

/// Shorthand for [`RootedTree::new`].
pub fn root_tree(graph: &Graph, root: usize) -> Result<RootedTree<'_>> {
    RootedTree::new(graph, root)
}

/// A min-degree peeling order, reversed. `order[i]` is `v_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegeneracyOrdering {
    pub order: Vec<usize>,
    pub position: Vec<usize>,
    pub col: usize,
    /// Earlier neighbors of each vertex, sorted by position.
    pub backward: Vec<Vec<usize>>,
}

pub fn degeneracy_ordering(graph: &Graph) -> DegeneracyOrdering {
    let n = graph.n();
    let mut deg: Vec<usize> = (0..n).map(|v| graph.degree(v)).collect();
    let mut heap: BTreeSet<(usize, usize)> = (0..n).map(|v| (deg[v], v)).collect();
    let mut removed = vec![false; n];
    let mut peel = Vec::with_capacity(n);
    while let Some((_, v)) = heap.pop_first() {
        removed[v] = true;
        peel.push(v);
        for &(w, _) in graph.neighbors(v) {
            if !removed[w] {
                heap.remove(&(deg[w], w));
                deg[w] -= 1;
                heap.insert((deg[w], w));
            }
        }
    }
    peel.reverse();
    let mut position = vec![0; n];
    for (i, &v) in peel.iter().enumerate() {
        position[v] = i;
    }
    let backward: Vec<Vec<usize>> = (0..n)
        .map(|v| {
            let mut b: Vec<usize> = graph
                .neighbors(v)
                .iter()
                .map(|&(w, _)| w)
                .filter(|&w| position[w] < position[v])
                .collect();
            b.sort_unstable_by_key(|&w| position[w]);
            b
        })
        .collect();
    let col = 1 + backward.iter().map(Vec::len).max().unwrap_or(0);
    DegeneracyOrdering {
        order: peel,
        position,
        col,
        backward,
    }
}

/// Structural facts about a tree that the tree dispatcher branches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TreeClass {
    pub max_degree: usize,
    /// Every non-leaf has the same degree.
    pub is_regular_tree: bool,
    /// `Some(p)` when the tree is regular of degree `3^p - 2` with `p >= 2`.
    pub three_power_regular: Option<u32>,
    /// Every degree-2 vertex has a degree-2 neighbor.
    pub degree2_rule_holds: bool,
}

pub fn classify_tree(tree: &Graph) -> Result<TreeClass> {
    if !tree.is_tree() {
        return Err(GraphError::NotATree);
    }
    let max_degree = tree.max_degree();
    let is_regular_tree = (0..tree.n())
        .map(|v| tree.degree(v))
        .filter(|&d| d > 1)
        .all(|d| d == max_degree);
    let three_power_regular = if is_regular_tree {
        three_power_minus_two(max_degree)
    } else {
        None
    };
    let degree2_rule_holds = (0..tree.n()).filter(|&v| tree.degree(v) == 2).all(|v| {
        tree.neighbors(v)
            .iter()
            .any(|&(w, _)| tree.degree(w) == 2)
    });
    Ok(TreeClass {
        max_degree,
        is_regular_tree,
        three_power_regular,
        degree2_rule_holds,
    })
}

/// `Some(p)` if `d = 3^p - 2` for an integer `p >= 2`.
pub fn three_power_minus_two(d: usize) -> Option<u32> {
    let mut p = 2;
    let mut q: usize = 9;
    while q - 2 < d {
        q = q.checked_mul(3)?;
        p += 1;
    }
    (q - 2 == d).then_some(p)
}

/// Whether `x` is a power of two (including 1).
pub fn is_power_of_two(x: usize) -> bool {
    x.is_power_of_two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn load_examples() {
        let p3 = Graph::from_edge_list("0 1\n1 2").unwrap();
        assert_eq!(p3.n(), 3);
        assert_eq!(p3.edges(), &[(0, 1), (1, 2)]);
        assert!(matches!(
            Graph::from_edge_list("0 0"),
            Err(GraphError::LoopRejected(_))
        ));
        let k2 = Graph::from_json(r#"{"n":2,"edges":[[0,1]]}"#).unwrap();
        assert_eq!(k2.edge_count(), 1);
        assert!(k2.has_isolated_edge());
        assert!(matches!(
            Graph::from_edge_list("0 1\n1 0"),
            Err(GraphError::DuplicateEdge(..))
        ));
        assert!(matches!(
            Graph::from_edge_list("0 1 2"),
            Err(GraphError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn named_vertices_and_comments() {
        let g = Graph::from_edge_list("# header\n\na b # first\nb c\n").unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.name(2), "c");
        assert_eq!(g.to_edge_list(), "a b\nb c\n");
        assert!(matches!(
            Graph::from_edge_list("x y\ny x"),
            Err(GraphError::DuplicateEdge(a, b)) if a == "x" && b == "y"
        ));
        assert!(matches!(
            Graph::from_edge_list("x y\nz z"),
            Err(GraphError::LoopRejected(v)) if v == "z"
        ));
    }

    #[test]
    fn round_trips() {
        let g = Graph::new(5, &[(0, 3), (3, 1), (1, 4), (2, 4)]).unwrap();
        let again = Graph::from_edge_list(&g.to_edge_list()).unwrap();
        assert_eq!(again.edges(), g.edges());
        let again = Graph::from_json(&g.to_json()).unwrap();
        assert_eq!(again, g);
        let rooted = root_tree(&again, 4).unwrap();
        let mut edges: Vec<_> = (0..5)
            .filter_map(|v| rooted.parent[v].map(|p| (p.min(v), p.max(v))))
            .collect();
        edges.sort_unstable();
        let mut orig = g.edges().to_vec();
        orig.sort_unstable();
        assert_eq!(edges, orig);
    }

    #[test]
    fn rooting() {
        let p3 = Graph::path(3);
        let t = root_tree(&p3, 1).unwrap();
        assert_eq!(t.child_count(1), 2);
        let s = Graph::star(5);
        let t = root_tree(&s, 0).unwrap();
        assert_eq!(t.child_count(0), 5);
        assert!(t.children[0].iter().all(|&(c, _)| s.degree(c) == 1));
        assert_eq!(t.bfs_order[0], 0);
        assert!(matches!(root_tree(&Graph::cycle(3), 0), Err(GraphError::NotATree)));
    }

    #[test]
    fn degeneracy_examples() {
        assert_eq!(degeneracy_ordering(&Graph::path(6)).col, 2);
        assert_eq!(degeneracy_ordering(&Graph::star(4)).col, 2);
        assert_eq!(degeneracy_ordering(&Graph::complete(4)).col, 4);
        let c5 = degeneracy_ordering(&Graph::cycle(5));
        assert_eq!(c5.col, 3);
        assert!(c5.backward.iter().all(|b| b.len() <= 2));
    }

    /// Degeneracy as the maximum over vertex subsets of the minimum degree.
    fn degeneracy_oracle(g: &Graph) -> usize {
        let n = g.n();
        (1u32..1 << n)
            .map(|set| {
                (0..n)
                    .filter(|&v| set >> v & 1 == 1)
                    .map(|v| g.neighbors(v).iter().filter(|&&(w, _)| set >> w & 1 == 1).count())
                    .min()
                    .unwrap()
            })
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn degeneracy_matches_subgraph_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let n = rng.gen_range(1..=8);
            let p = rng.gen_range(0.1..0.9);
            let edges: Vec<_> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                .filter(|_| rng.gen_bool(p))
                .collect();
            let g = Graph::new(n, &edges).unwrap();
            let ord = degeneracy_ordering(&g);
            assert_eq!(ord.col, degeneracy_oracle(&g) + 1, "{edges:?}");
            for v in 0..n {
                assert!(ord.backward[v].len() < ord.col);
            }
            assert!(ord.col <= g.max_degree() + 1);
        }
    }

    #[test]
    fn classification_examples() {
        let k17 = classify_tree(&Graph::star(7)).unwrap();
        assert!(k17.is_regular_tree);
        assert_eq!(k17.max_degree, 7);
        assert_eq!(k17.three_power_regular, Some(2));
        assert_eq!(classify_tree(&Graph::star(25)).unwrap().three_power_regular, Some(3));
        assert_eq!(classify_tree(&Graph::star(8)).unwrap().three_power_regular, None);
        assert!(classify_tree(&Graph::path(4)).unwrap().degree2_rule_holds);
        assert!(!classify_tree(&Graph::path(3)).unwrap().degree2_rule_holds);
        assert!(matches!(classify_tree(&Graph::cycle(4)), Err(GraphError::NotATree)));
    }

    #[test]
    fn three_powers() {
        let hits: Vec<usize> = (0..300).filter(|&d| three_power_minus_two(d).is_some()).collect();
        assert_eq!(hits, vec![7, 25, 79, 241]);
    }

    #[test]
    fn components_and_forests() {
        let g = Graph::new(7, &[(0, 1), (1, 2), (4, 5), (5, 6)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1, 2], vec![3], vec![4, 5, 6]]);
        assert!(g.is_forest() && !g.is_tree());
        assert!(!g.has_isolated_edge());
        let h = g.induced(&[4, 5, 6]);
        assert!(h.is_tree());
    }
}
