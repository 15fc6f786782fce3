use serde::Serialize;

use crate::algebra::{EchelonBasis, Field};
use crate::blocking::{is_strong_blocking, PointSet};
use crate::codes::max_hyperplane_intersection;
use crate::error::{Error, Result};

/// Vertex limits for the exact integrity search and the hypothesis check.
pub const EXHAUSTIVE_LIMIT: usize = 20;
pub const BNB_LIMIT: usize = 40;
/// Graphs are stored as 64-bit adjacency masks.
pub const GRAPH_LIMIT: usize = 64;

/// A simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adj: Vec<u64>,
}

impl Graph {
    /// Builds a graph, normalizing each edge to `(min, max)` and dropping
    /// duplicates. Self-loops and out-of-range endpoints are errors.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n > GRAPH_LIMIT {
            return Err(Error::GraphTooLarge { n, limit: GRAPH_LIMIT });
        }
        let mut adj = vec![0u64; n];
        let mut list = Vec::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidArgument(format!("edge ({a}, {b}) outside 0..{n}")));
            }
            if a == b {
                return Err(Error::InvalidArgument(format!("self-loop at {a}")));
            }
            list.push((a.min(b), a.max(b)));
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        list.sort_unstable();
        list.dedup();
        Ok(Graph { n, edges: list, adj })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        Graph::new(n, &edges)
    }

    pub fn empty(n: usize) -> Result<Self> {
        Graph::new(n, &[])
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::new(n, &edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        if n > 2 {
            edges.push((n - 1, 0));
        }
        Graph::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn has_isolated_vertex(&self) -> bool {
        self.adj.iter().any(|&a| a == 0)
    }

    fn all(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    /// The connected components of the subgraph induced on `mask`.
    pub fn components(&self, mask: u64) -> Vec<u64> {
        let mut rest = mask;
        let mut out = Vec::new();
        while rest != 0 {
            let start = rest & rest.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let v = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let new = self.adj[v] & mask & !comp;
                comp |= new;
                frontier |= new;
            }
            out.push(comp);
            rest &= !comp;
        }
        out
    }

    /// Size of the largest component induced on `mask`, 0 when empty.
    pub fn largest_component(&self, mask: u64) -> usize {
        self.components(mask).iter().map(|c| c.count_ones() as usize).max().unwrap_or(0)
    }
}

fn mask_to_list(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrityMode {
    /// Exhaustive up to `EXHAUSTIVE_LIMIT` vertices, branch and bound above.
    #[default]
    Auto,
    Exhaustive,
    BranchAndBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Integrity {
    pub value: usize,
    /// Lexicographically smallest optimal deletion set, sorted.
    pub set: Vec<usize>,
}

/// ι(G) = min over S of |S| + (largest component of G − S).
pub fn vertex_integrity(g: &Graph, mode: IntegrityMode) -> Result<Integrity> {
    let mode = match mode {
        IntegrityMode::Auto if g.n <= EXHAUSTIVE_LIMIT => IntegrityMode::Exhaustive,
        IntegrityMode::Auto => IntegrityMode::BranchAndBound,
        m => m,
    };
    match mode {
        IntegrityMode::Exhaustive => {
            if g.n > EXHAUSTIVE_LIMIT {
                return Err(Error::GraphTooLarge { n: g.n, limit: EXHAUSTIVE_LIMIT });
            }
            Ok(integrity_exhaustive(g))
        }
        _ => {
            if g.n > BNB_LIMIT {
                return Err(Error::GraphTooLarge { n: g.n, limit: BNB_LIMIT });
            }
            Ok(integrity_bnb(g))
        }
    }
}

fn integrity_exhaustive(g: &Graph) -> Integrity {
    let all = g.all();
    let mut best: Option<(usize, Vec<usize>)> = None;
    for s in 0..=all {
        let value = s.count_ones() as usize + g.largest_component(all & !s);
        let better = match &best {
            None => true,
            Some((v, list)) => value < *v || (value == *v && mask_to_list(s) < *list),
        };
        if better {
            best = Some((value, mask_to_list(s)));
        }
    }
    let (value, set) = best.expect("at least the empty set");
    Integrity { value, set }
}

/// Pre-order search over sorted vertex lists: a node `P` with last element
/// `l` has children `P + [v]` for `v > l`, so lists are visited in
/// lexicographic order and keeping only strict improvements yields the
/// lexicographically smallest optimum.
///
/// Bound for the subtree of `P`: vertices below `l` outside `P` are never
/// deleted there. A component `C` they induce ends up inside one component of
/// `G − S`, and each neighbour of `C` above `l` is either deleted or joins
/// that component, so every set in the subtree scores at least
/// `|P| + |C| + |N(C) ∩ {v > l}|`.
fn integrity_bnb(g: &Graph) -> Integrity {
    let all = g.all();
    let mut best = Integrity { value: g.n, set: Vec::new() };
    // The empty set is the first node.
    best.value = g.largest_component(all);
    let mut stack: Vec<usize> = Vec::new();
    fn rec(g: &Graph, all: u64, stack: &mut Vec<usize>, chosen: u64, best: &mut Integrity) {
        let start = stack.last().map_or(0, |&l| l + 1);
        for v in start..g.n {
            let chosen = chosen | 1 << v;
            let size = stack.len() + 1;
            let above = if v + 1 >= 64 { 0 } else { all & !((1u64 << (v + 1)) - 1) };
            let below = all & !chosen & !above;
            let bound = g
                .components(below)
                .iter()
                .map(|&c| {
                    let nb = c.count_ones() as usize;
                    let mut border = 0u64;
                    let mut rest = c;
                    while rest != 0 {
                        let u = rest.trailing_zeros() as usize;
                        rest &= rest - 1;
                        border |= g.adj[u];
                    }
                    nb + (border & above).count_ones() as usize
                })
                .max()
                .unwrap_or(0);
            if size + bound >= best.value || size >= best.value {
                continue;
            }
            stack.push(v);
            let value = size + g.largest_component(all & !chosen);
            if value < best.value {
                *best = Integrity { value, set: stack.clone() };
            }
            rec(g, all, stack, chosen, best);
            stack.pop();
        }
    }
    rec(g, all, &mut stack, 0, &mut best);
    best
}

/// All points on the lines joining pairs of the k standard basis points.
pub fn tetrahedron(field: &Field, k: usize) -> Result<PointSet> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("tetrahedron needs k >= 2, got {k}")));
    }
    let basis: Vec<Vec<u8>> = (0..k)
        .map(|i| {
            let mut e = vec![0u8; k];
            e[i] = 1;
            e
        })
        .collect();
    let mut pts = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            pts.extend(line_points(field, &basis[i], &basis[j]));
        }
    }
    PointSet::projective(field, k, pts)
}

/// The q + 1 points of the projective line through `a` and `b`.
pub fn line_points(field: &Field, a: &[u8], b: &[u8]) -> Vec<Vec<u8>> {
    let mut out = vec![field.normalize(a)];
    for c in field.elements() {
        let mut v = b.to_vec();
        field.axpy(&mut v, c, a);
        out.push(field.normalize(&v));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphConstruction {
    pub set: PointSet,
    /// Minimum distance of the code with the input points as columns.
    pub d: usize,
    pub integrity: Integrity,
    /// Whether ι(G) >= n − d + 1, which guarantees a strong blocking set.
    pub condition: bool,
    /// Outcome of the strong blocking verifier, when it was run.
    pub verified: Option<bool>,
}

/// The union of the lines ⟨P_i, P_j⟩ over the edges ij of `g`, where vertex
/// `i` is the i-th point of `p` in its stored order.
pub fn graph_lines_construction(p: &PointSet, g: &Graph, verify: bool) -> Result<GraphConstruction> {
    if g.n() != p.len() {
        return Err(Error::DimensionMismatch(format!(
            "graph on {} vertices for {} points",
            g.n(),
            p.len()
        )));
    }
    let rank = p.rank();
    if rank < p.k() {
        return Err(Error::NonSpanningPoints { rank, k: p.k() });
    }
    let field = p.field();
    let pts = p.points();
    let mut union = Vec::new();
    for &(i, j) in g.edges() {
        union.extend(line_points(field, &pts[i], &pts[j]));
    }
    let set = PointSet::projective(field, p.k(), union)?;
    let n = p.len();
    let d = n - max_hyperplane_intersection(field, p.k(), pts)?;
    let integrity = vertex_integrity(g, IntegrityMode::Auto)?;
    let condition = integrity.value > n - d;
    let verified = if verify && p.k() >= 2 { Some(is_strong_blocking(&set, 1)?.holds) } else { None };
    Ok(GraphConstruction { set, d, integrity, condition, verified })
}

/// Exhaustive check that for every vertex subset S some component C of
/// G − S has ⟨S ∪ C⟩ equal to the whole space (when G − S is empty, that
/// ⟨S⟩ is).
pub fn check_main_const_hypothesis(p: &PointSet, g: &Graph) -> Result<bool> {
    let n = p.len();
    if g.n() != n {
        return Err(Error::DimensionMismatch(format!("graph on {} vertices for {n} points", g.n())));
    }
    if n > EXHAUSTIVE_LIMIT {
        return Err(Error::GraphTooLarge { n, limit: EXHAUSTIVE_LIMIT });
    }
    let field = p.field();
    let k = p.k();
    let pts = p.points();
    let all = g.all();
    let spans = |mask: u64, base: &EchelonBasis| {
        let mut b = base.clone();
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            b.insert(&pts[v]);
            if b.rank() == k {
                return true;
            }
        }
        b.rank() == k
    };
    for s in 0..=all {
        let mut base = EchelonBasis::new(field);
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            base.insert(&pts[v]);
        }
        if base.rank() == k {
            continue;
        }
        if !g.components(all & !s).iter().any(|&c| spans(c, &base)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::projective_points;

    #[test]
    fn integrity_examples() {
        for n in 1..8 {
            assert_eq!(vertex_integrity(&Graph::complete(n).unwrap(), IntegrityMode::Auto).unwrap().value, n);
            assert_eq!(vertex_integrity(&Graph::empty(n).unwrap(), IntegrityMode::Auto).unwrap().value, 1);
        }
        let p4 = vertex_integrity(&Graph::path(4).unwrap(), IntegrityMode::Exhaustive).unwrap();
        assert_eq!(p4.value, 3);
        assert_eq!(p4.set, vec![0, 2]);
    }

    #[test]
    fn bnb_agrees_with_exhaustive() {
        let graphs = [
            Graph::path(9).unwrap(),
            Graph::cycle(10).unwrap(),
            Graph::complete(6).unwrap(),
            Graph::new(7, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 6), (6, 3), (0, 3)]).unwrap(),
        ];
        for g in &graphs {
            let a = vertex_integrity(g, IntegrityMode::Exhaustive).unwrap();
            let b = vertex_integrity(g, IntegrityMode::BranchAndBound).unwrap();
            assert_eq!(a, b, "{g:?}");
        }
    }

    #[test]
    fn bnb_handles_large_complete_graph() {
        let g = Graph::complete(40).unwrap();
        let r = vertex_integrity(&g, IntegrityMode::Auto).unwrap();
        assert_eq!(r.value, 40);
        assert!(r.set.is_empty());
        assert!(matches!(
            vertex_integrity(&Graph::empty(41).unwrap(), IntegrityMode::Auto),
            Err(Error::GraphTooLarge { .. })
        ));
    }

    #[test]
    fn tetrahedron_sizes() {
        for q in [2, 3, 4] {
            let f = Field::new(q).unwrap();
            for k in 2..=6usize {
                let t = tetrahedron(&f, k).unwrap();
                assert_eq!(t.len(), k * (k - 1) / 2 * (q as usize - 1) + k);
            }
            assert_eq!(tetrahedron(&f, 2).unwrap().len(), projective_points(&f, 2).len());
        }
    }

    #[test]
    fn complete_graph_on_basis_gives_tetrahedron() {
        let f = Field::new(3).unwrap();
        let basis = PointSet::projective(&f, 4, (0..4).map(|i| {
            let mut e = vec![0; 4];
            e[i] = 1;
            e
        }).collect()).unwrap();
        let g = Graph::complete(4).unwrap();
        let r = graph_lines_construction(&basis, &g, true).unwrap();
        assert_eq!(r.set, tetrahedron(&f, 4).unwrap());
        assert_eq!(r.d, 1);
        assert!(r.condition);
        assert_eq!(r.verified, Some(true));
        assert!(check_main_const_hypothesis(&basis, &g).unwrap());
        assert!(!check_main_const_hypothesis(&basis, &Graph::empty(4).unwrap()).unwrap());
    }
}
