//! Finite weighted multigraphs with dart bookkeeping.
//!
//! Every edge `e` carries an orientation (initial vertex, terminal vertex)
//! and a positive length. Incidences are tracked as *darts*: an edge has one
//! dart with sign `-` at its initial vertex and one with sign `+` at its
//! terminal vertex, so a self-loop contributes two distinct darts to the same
//! vertex. The dart lists are the canonical coordinate order for everything
//! built on top (vertex spaces, operators, boundary conditions): per vertex,
//! darts are sorted by edge id with the `-` dart before the `+` dart.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Endpoint sign of a dart. `Minus` marks the initial vertex of the edge,
/// `Plus` the terminal vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    /// Oriented evaluation factor: the value of the signed indicator at this
    /// endpoint.
    pub fn factor(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            Sign::Plus => 1.0,
        }
    }
}

/// An (edge, endpoint) incidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dart {
    pub edge: usize,
    pub sign: Sign,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeRecord {
    pub id: usize,
    /// Initial vertex (index into `Graph::vertices`).
    pub src: usize,
    /// Terminal vertex.
    pub dst: usize,
    pub length: f64,
}

/// An edge as given to [`build_graph`]: `(src id, dst id, length)` with
/// length defaulting to 1.
#[derive(Debug, Clone)]
pub struct EdgeSpec {
    pub src: String,
    pub dst: String,
    pub length: Option<f64>,
}

impl EdgeSpec {
    pub fn new(src: impl Into<String>, dst: impl Into<String>) -> Self {
        EdgeSpec { src: src.into(), dst: dst.into(), length: None }
    }

    pub fn with_length(src: impl Into<String>, dst: impl Into<String>, length: f64) -> Self {
        EdgeSpec { src: src.into(), dst: dst.into(), length: Some(length) }
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<EdgeRecord>,
    /// Darts at each vertex, sorted by (edge id, sign) with Minus < Plus.
    darts_at: Vec<Vec<Dart>>,
    /// Offset of each vertex's dart block in the global dart order.
    dart_offset: Vec<usize>,
    /// Global dart index of the (-, +) darts of each edge.
    edge_darts: Vec<(usize, usize)>,
}

impl Graph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn vertex_id(&self, v: usize) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|x| x == id)
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &EdgeRecord {
        &self.edges[e]
    }

    pub fn darts_at(&self, v: usize) -> &[Dart] {
        &self.darts_at[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.darts_at[v].len()
    }

    /// Total number of darts, i.e. `2 |E|` and the dimension of the maximal
    /// vertex space.
    pub fn dart_count(&self) -> usize {
        2 * self.edges.len()
    }

    /// Position of a vertex's dart block inside the global dart order.
    pub fn dart_offset(&self, v: usize) -> usize {
        self.dart_offset[v]
    }

    /// Global dart indices `(minus, plus)` of an edge.
    pub fn edge_dart_indices(&self, e: usize) -> (usize, usize) {
        self.edge_darts[e]
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.length).collect()
    }

    pub fn has_unit_lengths(&self) -> bool {
        self.edges.iter().all(|e| e.length == 1.0)
    }

    pub fn is_regular(&self) -> Option<usize> {
        let d = self.degree(0);
        if (0..self.vertex_count()).all(|v| self.degree(v) == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn has_self_loop(&self) -> Option<usize> {
        self.edges.iter().find(|e| e.src == e.dst).map(|e| e.id)
    }

    pub fn has_multi_edge(&self) -> Option<(usize, usize)> {
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for e in &self.edges {
            let key = (e.src.min(e.dst), e.src.max(e.dst));
            if let Some(&first) = seen.get(&key) {
                return Some((first, e.id));
            }
            seen.insert(key, e.id);
        }
        None
    }

    /// Structure digest used to tie vertex spaces to the graph they decorate.
    pub fn digest(&self) -> u64 {
        let mut h = Sha256::new();
        for v in &self.vertices {
            h.update(v.as_bytes());
            h.update([0u8]);
        }
        for e in &self.edges {
            h.update(e.src.to_le_bytes());
            h.update(e.dst.to_le_bytes());
            h.update(e.length.to_le_bytes());
        }
        let out = h.finalize();
        u64::from_le_bytes(out[..8].try_into().unwrap())
    }
}

/// Builds a graph from vertex ids and edge specs, enumerating darts in the
/// canonical order. Lengths default to 1.
pub fn build_graph(vertex_ids: &[String], edge_specs: &[EdgeSpec]) -> Result<Graph> {
    let mut index: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, id) in vertex_ids.iter().enumerate() {
        if index.insert(id.as_str(), i).is_some() {
            return Err(Error::DuplicateVertex(id.clone()));
        }
    }
    let mut edges = Vec::with_capacity(edge_specs.len());
    for (id, spec) in edge_specs.iter().enumerate() {
        let src = *index
            .get(spec.src.as_str())
            .ok_or_else(|| Error::UnknownVertex(spec.src.clone()))?;
        let dst = *index
            .get(spec.dst.as_str())
            .ok_or_else(|| Error::UnknownVertex(spec.dst.clone()))?;
        let length = spec.length.unwrap_or(1.0);
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::NonPositiveLength { edge: id, length });
        }
        edges.push(EdgeRecord { id, src, dst, length });
    }

    let mut darts_at: Vec<Vec<Dart>> = vec![Vec::new(); vertex_ids.len()];
    for e in &edges {
        darts_at[e.src].push(Dart { edge: e.id, sign: Sign::Minus });
        darts_at[e.dst].push(Dart { edge: e.id, sign: Sign::Plus });
    }
    for (v, darts) in darts_at.iter_mut().enumerate() {
        if darts.is_empty() {
            return Err(Error::IsolatedVertex(vertex_ids[v].clone()));
        }
        darts.sort_by_key(|d| (d.edge, d.sign));
    }

    let mut dart_offset = Vec::with_capacity(vertex_ids.len());
    let mut acc = 0usize;
    for darts in &darts_at {
        dart_offset.push(acc);
        acc += darts.len();
    }
    debug_assert_eq!(acc, 2 * edges.len());

    let mut edge_darts = vec![(usize::MAX, usize::MAX); edges.len()];
    for (v, darts) in darts_at.iter().enumerate() {
        for (i, d) in darts.iter().enumerate() {
            let global = dart_offset[v] + i;
            match d.sign {
                Sign::Minus => edge_darts[d.edge].0 = global,
                Sign::Plus => edge_darts[d.edge].1 = global,
            }
        }
    }

    Ok(Graph { vertices: vertex_ids.to_vec(), edges, darts_at, dart_offset, edge_darts })
}

/// Convenience builders for the graphs used throughout the tests and presets.
impl Graph {
    /// Cycle on `n >= 1` vertices (`n = 1` gives a single self-loop), unit
    /// lengths.
    pub fn cycle(n: usize) -> Graph {
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let specs: Vec<EdgeSpec> = (0..n)
            .map(|i| EdgeSpec::new(ids[i].clone(), ids[(i + 1) % n].clone()))
            .collect();
        build_graph(&ids, &specs).expect("cycle graph is valid")
    }

    /// Complete graph on `n >= 2` vertices, unit lengths.
    pub fn complete(n: usize) -> Graph {
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut specs = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                specs.push(EdgeSpec::new(ids[i].clone(), ids[j].clone()));
            }
        }
        build_graph(&ids, &specs).expect("complete graph is valid")
    }

    /// Path on `n >= 2` vertices, unit lengths.
    pub fn path(n: usize) -> Graph {
        let ids: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let specs: Vec<EdgeSpec> = (0..n - 1)
            .map(|i| EdgeSpec::new(ids[i].clone(), ids[i + 1].clone()))
            .collect();
        build_graph(&ids, &specs).expect("path graph is valid")
    }

    /// A single edge of the given length.
    pub fn interval(length: f64) -> Graph {
        build_graph(
            &["0".into(), "1".into()],
            &[EdgeSpec::with_length("0", "1", length)],
        )
        .expect("interval is valid")
    }

    /// One vertex with one self-loop of the given length.
    pub fn loop_graph(length: f64) -> Graph {
        build_graph(&["0".into()], &[EdgeSpec::with_length("0", "0", length)])
            .expect("loop is valid")
    }

    /// Octahedron: K_{2,2,2}, 4-regular on 6 vertices.
    pub fn octahedron() -> Graph {
        let ids: Vec<String> = (0..6).map(|i| i.to_string()).collect();
        let mut specs = Vec::new();
        for i in 0..6usize {
            for j in (i + 1)..6usize {
                if j != i + 3 {
                    specs.push(EdgeSpec::new(ids[i].clone(), ids[j].clone()));
                }
            }
        }
        build_graph(&ids, &specs).expect("octahedron is valid")
    }
}

/// Line graph: vertices are the edges of `g`; two are joined when the edges
/// share a vertex. New edges are oriented from the lower edge id to the
/// higher one and get unit length.
pub fn line_graph(g: &Graph) -> Result<Graph> {
    if let Some(e) = g.has_self_loop() {
        return Err(Error::SelfLoopPresent(e));
    }
    if let Some((a, b)) = g.has_multi_edge() {
        return Err(Error::MultiEdgePresent(a.to_string(), b.to_string()));
    }
    for e in g.edges() {
        if g.degree(e.src) == 1 && g.degree(e.dst) == 1 {
            return Err(Error::IsolatedEdge(e.id));
        }
    }
    let ids: Vec<String> = (0..g.edge_count()).map(|i| format!("e{i}")).collect();
    let mut specs = Vec::new();
    for v in 0..g.vertex_count() {
        let darts = g.darts_at(v);
        for i in 0..darts.len() {
            for j in (i + 1)..darts.len() {
                let (a, b) = (darts[i].edge, darts[j].edge);
                specs.push(EdgeSpec::new(ids[a.min(b)].clone(), ids[a.max(b)].clone()));
            }
        }
    }
    build_graph(&ids, &specs)
}

/// Subdivision graph: one new vertex per edge, each original edge replaced by
/// the two unit-length edges `(src, e)` and `(e, dst)`.
pub fn subdivision_graph(g: &Graph) -> Result<Graph> {
    if let Some(e) = g.has_self_loop() {
        return Err(Error::SelfLoopPresent(e));
    }
    if let Some((a, b)) = g.has_multi_edge() {
        return Err(Error::MultiEdgePresent(a.to_string(), b.to_string()));
    }
    let mut ids: Vec<String> = g.vertex_ids().to_vec();
    let mut edge_vertex = Vec::with_capacity(g.edge_count());
    for e in 0..g.edge_count() {
        let mut id = format!("e{e}");
        while ids.contains(&id) {
            id.push('_');
        }
        edge_vertex.push(id.clone());
        ids.push(id);
    }
    let mut specs = Vec::new();
    for e in g.edges() {
        specs.push(EdgeSpec::new(g.vertex_id(e.src), edge_vertex[e.id].clone()));
        specs.push(EdgeSpec::new(edge_vertex[e.id].clone(), g.vertex_id(e.dst)));
    }
    build_graph(&ids, &specs)
}

/// Spanning-forest and prime-cycle structure of a graph.
#[derive(Debug, Clone)]
pub struct CycleBasis {
    /// Edge ids of the spanning forest (deterministic BFS from the lowest
    /// vertex of each component).
    pub spanning_forest: Vec<usize>,
    /// One prime cycle per non-forest edge, as a signed edge walk: the
    /// non-forest edge traversed forward, then the tree path closing it.
    pub prime_cycles: Vec<Vec<(usize, i8)>>,
    pub component_count: usize,
    /// Components whose prime cycles all have an even number of edges.
    pub bipartite_components: usize,
    /// Component index of each vertex.
    pub component_of: Vec<usize>,
}

pub fn cycle_structure(g: &Graph) -> CycleBasis {
    let n = g.vertex_count();
    let mut component_of = vec![usize::MAX; n];
    // parent[v] = (parent vertex, connecting edge id) along the BFS forest.
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut depth = vec![0usize; n];
    let mut in_forest = vec![false; g.edge_count()];
    let mut component_count = 0;

    for root in 0..n {
        if component_of[root] != usize::MAX {
            continue;
        }
        let comp = component_count;
        component_count += 1;
        component_of[root] = comp;
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for d in g.darts_at(v) {
                let e = g.edge(d.edge);
                let w = if e.src == v { e.dst } else { e.src };
                if component_of[w] == usize::MAX {
                    component_of[w] = comp;
                    parent[w] = Some((v, d.edge));
                    depth[w] = depth[v] + 1;
                    in_forest[d.edge] = true;
                    queue.push_back(w);
                }
            }
        }
    }

    let mut prime_cycles = Vec::new();
    let mut odd_cycle_in = vec![false; component_count];
    for e in g.edges() {
        if in_forest[e.id] {
            continue;
        }
        // Cycle: e traversed forward from src to dst, then the tree path dst -> src.
        let mut cycle = vec![(e.id, 1i8)];
        if e.src == e.dst {
            prime_cycles.push(cycle);
            odd_cycle_in[component_of[e.src]] = true;
            continue;
        }
        // Find the least common ancestor of src and dst in the BFS tree.
        let (mut x, mut y) = (e.dst, e.src);
        let mut up_from_dst = Vec::new();
        let mut up_from_src = Vec::new();
        while depth[x] > depth[y] {
            let (p, t) = parent[x].unwrap();
            up_from_dst.push((t, if g.edge(t).src == x { 1i8 } else { -1 }));
            x = p;
        }
        while depth[y] > depth[x] {
            let (p, t) = parent[y].unwrap();
            up_from_src.push((t, if g.edge(t).src == y { 1i8 } else { -1 }));
            y = p;
        }
        while x != y {
            let (px, tx) = parent[x].unwrap();
            up_from_dst.push((tx, if g.edge(tx).src == x { 1i8 } else { -1 }));
            x = px;
            let (py, ty) = parent[y].unwrap();
            up_from_src.push((ty, if g.edge(ty).src == y { 1i8 } else { -1 }));
            y = py;
        }
        // dst -> lca (as walked), then lca -> src (reverse of src -> lca).
        cycle.extend(up_from_dst.iter().copied());
        cycle.extend(up_from_src.iter().rev().map(|&(t, s)| (t, -s)));
        debug_assert!(cycle.len() >= 2);
        if cycle.len() % 2 == 1 {
            odd_cycle_in[component_of[e.src]] = true;
        }
        prime_cycles.push(cycle);
    }

    let spanning_forest: Vec<usize> =
        (0..g.edge_count()).filter(|&e| in_forest[e]).collect();
    let bipartite_components = odd_cycle_in.iter().filter(|&&odd| !odd).count();

    CycleBasis {
        spanning_forest,
        prime_cycles,
        component_count,
        bipartite_components,
        component_of,
    }
}

/// Flux of an edge potential through a signed cycle: the signed sum of the
/// potential over the traversal.
pub fn flux(g: &Graph, alpha: &[f64], cycle: &[(usize, i8)]) -> Result<f64> {
    if alpha.len() != g.edge_count() {
        return Err(Error::DimensionMismatch(format!(
            "potential has {} entries for {} edges",
            alpha.len(),
            g.edge_count()
        )));
    }
    let mut total = 0.0;
    for &(e, sign) in cycle {
        if e >= g.edge_count() {
            return Err(Error::UnknownEdge(e));
        }
        total += sign as f64 * alpha[e];
    }
    Ok(total)
}
