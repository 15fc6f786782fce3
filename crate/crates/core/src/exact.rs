//! Minimum symmetric 2-blocking sets of F_3^k by branch and bound.
//!
//! A symmetric 2-blocking set is `{0}` together with a union of lines through
//! the origin, so the search runs over lines (points of PG(k−1, 3)). A line
//! `⟨v⟩` meets the codimension-2 subspace `{x : Ax = b}`, `b ≠ 0`, exactly when
//! `Av = ±b`. The minimum number of lines is b'_3(k, 2) and the minimum size of
//! the affine set is `2 b'_3(k, 2) + 1`.

use std::collections::{BTreeMap, HashMap};
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::algebra::Field;
use crate::blocking::{is_affine_blocking, lift_to_affine, PointSet};
use crate::error::{Error, Result};
use crate::geometry::{projective_points, AffineSubspace, AffineUniverse, SubspaceFilter};

/// Fixed-width bitset over `0..len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn full(len: usize) -> Self {
        let mut b = Bits::new(len);
        for i in 0..len {
            b.insert(i);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and_count(&self, other: &Bits) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn intersects(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn difference_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKind {
    /// `Σ y_ℓ ≥ k − 1` over the lines inside a linear hyperplane.
    Linear,
    /// `Σ y_ℓ ≥ 2k − 1` over the lines meeting an affine hyperplane that avoids 0.
    Affine,
}

/// A hyperplane inequality over line variables.
#[derive(Debug, Clone, Serialize)]
pub struct Cut {
    pub kind: CutKind,
    /// Normal vector `a` of the hyperplane `a·x = c`, normalized.
    pub normal: Vec<u8>,
    /// Indices of the lines the inequality sums over.
    pub sets: Vec<usize>,
    pub rhs: usize,
}

impl Cut {
    pub fn satisfied_by(&self, chosen: &[usize]) -> bool {
        chosen.iter().filter(|j| self.sets.binary_search(j).is_ok()).count() >= self.rhs
    }
}

/// The covering problem whose optimum is b'_3(k, 2).
#[derive(Debug, Clone)]
pub struct CoverInstance {
    k: usize,
    field: Field,
    /// The lines through the origin, by their normalized direction, in the
    /// canonical order of PG(k−1, 3).
    pub sets: Vec<Vec<u8>>,
    /// The codimension-2 affine subspaces avoiding the origin.
    pub universe: Vec<AffineSubspace>,
    /// For each line, the universe elements it meets.
    pub incidence: Vec<Bits>,
    pub cuts: Vec<Cut>,
}

impl CoverInstance {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Whether the lines with the given indices meet every universe element.
    pub fn is_cover(&self, chosen: &[usize]) -> bool {
        let mut u = Bits::new(self.universe.len());
        for &j in chosen {
            u.union_with(&self.incidence[j]);
        }
        u.count() == self.universe.len()
    }
}

pub fn build_instance(k: usize) -> Result<CoverInstance> {
    if !(2..=6).contains(&k) {
        return Err(Error::KTooLarge(k));
    }
    let field = Field::new(3)?;
    let sets: Vec<Vec<u8>> = projective_points(&field, k).into_iter().map(|p| p.into_coords()).collect();
    let uni = AffineUniverse::new(&field, k, 2, SubspaceFilter::AvoidingOrigin)?;
    let universe: Vec<AffineSubspace> = uni.iter().collect();
    let per_dual = 8;
    let mut incidence = vec![Bits::new(universe.len()); sets.len()];
    for (d, dual) in uni.duals().iter().enumerate() {
        for (j, v) in sets.iter().enumerate() {
            let w = dual.mul_vec(v);
            if w.iter().all(|&c| c == 0) {
                continue;
            }
            for rhs in [w.clone(), field.negate(&w)] {
                let slot = uni.rhs_slot(&rhs).expect("nonzero right-hand side") as usize;
                incidence[j].insert(d * per_dual + slot);
            }
        }
    }
    let mut cuts = Vec::new();
    for a in &sets {
        let (inside, outside): (Vec<usize>, Vec<usize>) = (0..sets.len()).partition(|&j| field.dot(a, &sets[j]) == 0);
        cuts.push(Cut { kind: CutKind::Linear, normal: a.clone(), sets: inside, rhs: k - 1 });
        cuts.push(Cut { kind: CutKind::Affine, normal: a.clone(), sets: outside, rhs: 2 * k - 1 });
    }
    Ok(CoverInstance { k, field, sets, universe, incidence, cuts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Lines decided in index order, pruned only by feasibility: every
    /// uncovered element still has a candidate line and the remaining budget
    /// can cover what is left.
    Exhaustive,
    /// Branching on the uncovered element with the fewest candidate lines,
    /// with cut and packing bounds.
    Bnb,
}

impl std::str::FromStr for SearchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exhaustive" => Ok(SearchMode::Exhaustive),
            "bnb" => Ok(SearchMode::Bnb),
            _ => Err(Error::InvalidArgument(format!("unknown search mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub mode: SearchMode,
    pub time_limit: Option<Duration>,
    /// Worker threads for the size-feasibility searches; 1 is sequential.
    pub threads: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { mode: SearchMode::Bnb, time_limit: None, threads: 1 }
    }
}

/// One step of the iterative deepening: whether a cover with `size` lines exists.
#[derive(Debug, Clone, Serialize)]
pub struct BoundStep {
    pub size: usize,
    pub feasible: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchCertificate {
    pub k: usize,
    pub optimum: usize,
    /// Directions of the chosen lines, in index order.
    pub chosen: Vec<Vec<u8>>,
    pub chosen_indices: Vec<usize>,
    pub node_count: u64,
    /// Wall-clock seconds.
    pub time: f64,
    /// Lower bound at the root, before any search.
    pub root_lower_bound: usize,
    pub greedy_upper_bound: usize,
    /// The value of b'_3(k−1, 2) used by the projection bound, if any.
    pub projection_bound: Option<usize>,
    /// One entry per size tried by the iterative deepening.
    pub lower_bound_trace: Vec<BoundStep>,
    pub mode: SearchMode,
    /// Whether `chosen` is the lexicographically smallest optimal set.
    pub canonical: bool,
    /// Independent check: the lifted set passes the affine 2-blocking verifier.
    pub verified: bool,
}

impl SearchCertificate {
    /// The symmetric affine 2-blocking set `{0} ∪ ±chosen`.
    pub fn affine_set(&self) -> PointSet {
        let f = Field::new(3).expect("3 is prime");
        lift_to_affine(&PointSet::projective(&f, self.k, self.chosen.clone()).expect("valid points"))
    }
}

/// The instance with duplicate universe elements merged (`W` and `−W` are
/// met by the same lines), stored both ways round.
struct Reduced {
    n: usize,
    /// Per element, the lines meeting it.
    covers: Vec<Bits>,
    /// Per line, the reduced elements it meets.
    meets: Vec<Bits>,
    cuts: Vec<(Bits, usize)>,
    /// `line_id[p * n + x]` names the line through points `p` and `x` by the
    /// smallest index among its points other than `p`.
    line_id: Vec<u16>,
    /// Root cases for branch and bound as (forced lines, excluded lines).
    ///
    /// A cover spans F_3^k, so it contains a basis, and a collineation maps
    /// that basis to the unit vectors. The monomial maps fixing the unit
    /// vectors preserve the weight of every point, so they move a lightest
    /// remaining point of the cover, of weight w, to (1, …, 1, 0, …, 0). Case
    /// w forces the unit vectors and that point and excludes every other
    /// point of weight 2..w−1.
    frame_cases: Vec<(Vec<usize>, Vec<usize>)>,
}

impl Reduced {
    fn new(inst: &CoverInstance) -> Self {
        let n = inst.sets.len();
        let mut index: HashMap<Bits, usize> = HashMap::new();
        let mut covers = Vec::new();
        for e in 0..inst.universe.len() {
            let mut c = Bits::new(n);
            for (j, inc) in inst.incidence.iter().enumerate() {
                if inc.contains(e) {
                    c.insert(j);
                }
            }
            if !index.contains_key(&c) {
                index.insert(c.clone(), covers.len());
                covers.push(c);
            }
        }
        let mut meets = vec![Bits::new(covers.len()); n];
        for (e, c) in covers.iter().enumerate() {
            for j in c.iter() {
                meets[j].insert(e);
            }
        }
        let cuts = inst
            .cuts
            .iter()
            .map(|c| {
                let mut b = Bits::new(n);
                for &j in &c.sets {
                    b.insert(j);
                }
                (b, c.rhs)
            })
            .collect();
        let f = &inst.field;
        let pos: HashMap<&[u8], usize> = inst.sets.iter().enumerate().map(|(i, v)| (v.as_slice(), i)).collect();
        let mut line_id = vec![0u16; n * n];
        for (p, vp) in inst.sets.iter().enumerate() {
            for (x, vx) in inst.sets.iter().enumerate() {
                if p == x {
                    continue;
                }
                let id = f
                    .elements()
                    .map(|c| {
                        let mut w = vx.clone();
                        f.axpy(&mut w, c, vp);
                        pos[f.normalize(&w).as_slice()]
                    })
                    .min()
                    .expect("three points");
                line_id[p * n + x] = id as u16;
            }
        }
        let weight = |v: &[u8]| v.iter().filter(|&&c| c != 0).count();
        let k = inst.k;
        let units: Vec<usize> = (0..n).filter(|&j| weight(&inst.sets[j]) == 1).collect();
        let frame_cases = (2..=k)
            .map(|w| {
                let mut rep = vec![0u8; k];
                rep[..w].fill(1);
                let mut forced = units.clone();
                forced.push(pos[rep.as_slice()]);
                forced.sort_unstable();
                let excluded = (0..n).filter(|&j| (2..w).contains(&weight(&inst.sets[j]))).collect();
                (forced, excluded)
            })
            .collect();
        Reduced { n, covers, meets, cuts, line_id, frame_cases }
    }

    fn greedy_cover(&self) -> Vec<usize> {
        let mut uncovered = Bits::full(self.covers.len());
        let mut chosen = Vec::new();
        while !uncovered.is_empty() {
            let j = (0..self.n)
                .max_by_key(|&j| (self.meets[j].and_count(&uncovered), std::cmp::Reverse(j)))
                .expect("nonempty");
            uncovered.difference_with(&self.meets[j]);
            chosen.push(j);
        }
        // Drop lines that became redundant, latest first.
        let mut i = chosen.len();
        while i > 0 {
            i -= 1;
            let mut u = Bits::new(self.covers.len());
            for (p, &j) in chosen.iter().enumerate() {
                if p != i {
                    u.union_with(&self.meets[j]);
                }
            }
            if u.count() == self.covers.len() {
                chosen.remove(i);
            }
        }
        chosen.sort_unstable();
        chosen
    }
}

struct Budget {
    start: Instant,
    limit: Option<Duration>,
    expired: AtomicBool,
    found: AtomicBool,
}

impl Budget {
    fn out(&self) -> bool {
        self.expired.load(Ordering::Relaxed) || self.found.load(Ordering::Relaxed)
    }

    fn tick(&self, local: &mut u64) -> bool {
        *local += 1;
        if *local % 1024 == 0 {
            if let Some(l) = self.limit {
                if self.start.elapsed() > l {
                    self.expired.store(true, Ordering::Relaxed);
                }
            }
        }
        self.out()
    }
}

#[derive(Clone)]
struct State {
    chosen: Vec<usize>,
    uncovered: Bits,
    avail: Bits,
    /// Per point p and line through p, how many chosen points other than p lie on it.
    on_line: Vec<u8>,
    /// Per point p, chosen points other than p minus the lines through p they occupy.
    collisions: Vec<u16>,
    in_chosen: Vec<bool>,
}

impl State {
    fn push(&mut self, red: &Reduced, j: usize) {
        self.avail.remove(j);
        self.chosen.push(j);
        self.in_chosen[j] = true;
        self.uncovered.difference_with(&red.meets[j]);
        let n = red.n;
        for p in 0..n {
            if p != j {
                let c = &mut self.on_line[p * n + red.line_id[p * n + j] as usize];
                if *c > 0 {
                    self.collisions[p] += 1;
                }
                *c += 1;
            }
        }
    }

    /// Undoes the last `push`, given the uncovered set from before it.
    fn pop(&mut self, red: &Reduced, uncovered: Bits) {
        let j = self.chosen.pop().expect("nonempty");
        self.in_chosen[j] = false;
        self.uncovered = uncovered;
        self.avail.insert(j);
        let n = red.n;
        for p in 0..n {
            if p != j {
                let c = &mut self.on_line[p * n + red.line_id[p * n + j] as usize];
                *c -= 1;
                if *c > 0 {
                    self.collisions[p] -= 1;
                }
            }
        }
    }
}

struct Search<'a> {
    red: &'a Reduced,
    target: usize,
    /// Branch on the hardest uncovered element rather than on lines in index order.
    element: bool,
    /// Apply the cut, projection and packing bounds.
    bounds: bool,
    /// A proven lower bound on b'_3(k−1, 2), enabling the projection bound.
    sub: Option<usize>,
    budget: &'a Budget,
    nodes: u64,
}

enum Pruned {
    Dead,
    Branch(usize),
}

impl<'a> Search<'a> {
    /// Bounds shared by both modes. In branch-and-bound mode also returns the
    /// element to branch on.
    fn bound(&self, st: &State) -> Pruned {
        let red = self.red;
        let r = self.target - st.chosen.len();
        let left = st.uncovered.count();
        let mut gains: Vec<usize> = st.avail.iter().map(|j| red.meets[j].and_count(&st.uncovered)).collect();
        gains.sort_unstable_by(|a, b| b.cmp(a));
        if gains.iter().take(r).sum::<usize>() < left {
            return Pruned::Dead;
        }
        let mut degs: Vec<(usize, usize)> = Vec::with_capacity(left);
        for e in st.uncovered.iter() {
            let d = red.covers[e].and_count(&st.avail);
            if d == 0 {
                return Pruned::Dead;
            }
            degs.push((d, e));
        }
        if !self.bounds {
            return Pruned::Branch(0);
        }
        if let Some(sub) = self.sub {
            // Projecting the final set from p gives a strong blocking set one
            // dimension down, so the points other than p must occupy at least
            // `sub` lines through p.
            for p in 0..red.n {
                let others = self.target - st.in_chosen[p] as usize;
                if st.collisions[p] as usize + sub > others {
                    return Pruned::Dead;
                }
            }
        }
        for (cut, rhs) in &red.cuts {
            let have = st.chosen.iter().filter(|&&j| cut.contains(j)).count();
            if have < *rhs {
                let need = rhs - have;
                if need > r || need > cut.and_count(&st.avail) {
                    return Pruned::Dead;
                }
            }
        }
        degs.sort_unstable();
        let mut used = Bits::new(red.n);
        let mut packed = 0;
        for &(_, e) in &degs {
            let mut avail_cov = red.covers[e].clone();
            intersect(&mut avail_cov, &st.avail);
            if !avail_cov.intersects(&used) {
                used.union_with(&avail_cov);
                packed += 1;
                if packed > r {
                    return Pruned::Dead;
                }
            }
        }
        Pruned::Branch(degs[0].1)
    }

    fn dfs(&mut self, st: &mut State) -> Option<Vec<usize>> {
        if self.budget.tick(&mut self.nodes) {
            return None;
        }
        if st.uncovered.is_empty() {
            return Some(st.chosen.clone());
        }
        if st.chosen.len() >= self.target {
            return None;
        }
        let saved = st.avail.clone();
        let r = if self.bounds && !self.propagate(st) {
            None
        } else {
            match self.bound(st) {
                Pruned::Dead => None,
                Pruned::Branch(_) if !self.element => self.branch_index(st),
                Pruned::Branch(e) => self.branch_element(st, e),
            }
        };
        st.avail = saved;
        r
    }

    /// Removes lines that no cover of at most `target` lines extending the
    /// current choice can use. Returns false when the choice is already dead.
    fn propagate(&self, st: &mut State) -> bool {
        let red = self.red;
        let t = self.target;
        // A cut `Σ_S y ≥ rhs` caps the complement of S at t − rhs lines.
        for (cut, rhs) in &red.cuts {
            let outside = st.chosen.iter().filter(|&&j| !cut.contains(j)).count();
            if outside + rhs > t {
                return false;
            }
            if outside + rhs == t {
                let keep: Vec<usize> = st.avail.iter().filter(|&j| cut.contains(j)).collect();
                let mut a = Bits::new(red.n);
                for j in keep {
                    a.insert(j);
                }
                st.avail = a;
            }
        }
        let Some(sub) = self.sub else { return true };
        let n = red.n;
        for p in 0..n {
            let allowed = (t - st.in_chosen[p] as usize).saturating_sub(sub);
            let coll = st.collisions[p] as usize;
            if coll > allowed {
                return false;
            }
            if coll == allowed {
                // One more point on an occupied line through p would collide.
                let drop: Vec<usize> = st
                    .avail
                    .iter()
                    .filter(|&x| x == p || st.on_line[p * n + red.line_id[p * n + x] as usize] > 0)
                    .collect();
                for x in drop {
                    st.avail.remove(x);
                }
            }
        }
        true
    }

    fn candidates(&self, st: &State, e: usize) -> Vec<usize> {
        let mut c = self.red.covers[e].clone();
        intersect(&mut c, &st.avail);
        let mut cand: Vec<(usize, usize)> =
            c.iter().map(|j| (self.red.meets[j].and_count(&st.uncovered), j)).collect();
        cand.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        cand.into_iter().map(|(_, j)| j).collect()
    }

    fn branch_element(&mut self, st: &mut State, e: usize) -> Option<Vec<usize>> {
        let cand = self.candidates(st, e);
        for &j in &cand {
            if let Some(found) = self.take(st, j) {
                return Some(found);
            }
            st.avail.remove(j);
        }
        None
    }

    fn take(&mut self, st: &mut State, j: usize) -> Option<Vec<usize>> {
        let saved = st.uncovered.clone();
        st.push(self.red, j);
        let r = self.dfs(st);
        st.pop(self.red, saved);
        r
    }

    /// Include-first branching in index order: the first cover found is the
    /// lexicographically smallest of at most `target` lines.
    fn branch_index(&mut self, st: &mut State) -> Option<Vec<usize>> {
        let i = st.avail.iter().next()?;
        st.avail.remove(i);
        let mut result = None;
        if self.red.meets[i].intersects(&st.uncovered) {
            result = self.take(st, i);
            st.avail.remove(i);
        }
        if result.is_none() {
            result = self.dfs(st);
        }
        st.avail.insert(i);
        result
    }
}

fn intersect(a: &mut Bits, b: &Bits) {
    for (x, y) in a.words.iter_mut().zip(&b.words) {
        *x &= y;
    }
}

/// The start of a search with some lines taken and some ruled out.
fn root_state(red: &Reduced, forced: &[usize], excluded: &[usize]) -> State {
    let n = red.n;
    let mut st = State {
        chosen: Vec::new(),
        uncovered: Bits::full(red.covers.len()),
        avail: Bits::full(n),
        on_line: vec![0; n * n],
        collisions: vec![0; n],
        in_chosen: vec![false; n],
    };
    for &j in forced {
        st.push(red, j);
    }
    for &j in excluded {
        st.avail.remove(j);
    }
    st
}

/// Searches for a cover with at most `target` lines.
///
/// In branch-and-bound mode the search is split into the frame cases of
/// `Reduced::frame_cases`; with several threads the cases run concurrently.
fn feasible(
    red: &Reduced,
    target: usize,
    bnb: bool,
    sub: Option<usize>,
    threads: usize,
    budget: &Budget,
) -> (Option<Vec<usize>>, u64) {
    budget.found.store(false, Ordering::Relaxed);
    if !bnb {
        let mut st = root_state(red, &[], &[]);
        let mut s = Search { red, target, element: false, bounds: false, sub, budget, nodes: 0 };
        let r = s.dfs(&mut st);
        return (r, s.nodes);
    }
    let run = |(forced, excluded): &(Vec<usize>, Vec<usize>)| {
        let mut st = root_state(red, forced, excluded);
        let mut s = Search { red, target, element: true, bounds: true, sub, budget, nodes: 0 };
        let r = if forced.len() <= target { s.dfs(&mut st) } else { None };
        if r.is_some() && threads > 1 {
            budget.found.store(true, Ordering::Relaxed);
        }
        (r, s.nodes)
    };
    let results: Vec<(Option<Vec<usize>>, u64)> = if threads <= 1 {
        let mut out = Vec::new();
        for case in &red.frame_cases {
            let r = run(case);
            let done = r.0.is_some();
            out.push(r);
            if done {
                break;
            }
        }
        out
    } else {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool");
        pool.install(|| {
            use rayon::prelude::*;
            red.frame_cases.par_iter().map(run).collect()
        })
    };
    budget.found.store(false, Ordering::Relaxed);
    let nodes = results.iter().map(|r| r.1).sum();
    (results.into_iter().find_map(|r| r.0), nodes)
}

/// `(q+1)(k−1) = 4(k−1)`, and `b'(k−1) + 1` when that is known.
fn root_lower_bound(k: usize, sub: Option<usize>) -> usize {
    (4 * (k - 1)).max(sub.map_or(0, |b| b + 1))
}

pub fn solve_min_cover(inst: &CoverInstance, time_limit: Option<Duration>, mode: SearchMode) -> Result<SearchCertificate> {
    solve_with(inst, &SolveOptions { mode, time_limit, threads: 1 })
}

pub fn solve_with(inst: &CoverInstance, opts: &SolveOptions) -> Result<SearchCertificate> {
    let start = Instant::now();
    let bnb = opts.mode == SearchMode::Bnb;
    // The projection bound needs b'(k−1), solved first (b'(1) = 1).
    let sub = match (bnb, inst.k) {
        (false, _) => None,
        (true, 2) => Some(1),
        (true, k) => Some(solve_with(&build_instance(k - 1)?, opts).map_err(|e| match e {
            Error::TimeLimitExceeded { .. } => {
                Error::TimeLimitExceeded { lower: 4 * (k - 1), upper: Reduced::new(inst).greedy_cover().len() }
            }
            e => e,
        })?.optimum),
    };
    let red = Reduced::new(inst);
    let budget = Budget {
        start,
        limit: opts.time_limit,
        expired: AtomicBool::new(false),
        found: AtomicBool::new(false),
    };
    let greedy = red.greedy_cover();
    let root = root_lower_bound(inst.k, sub).min(greedy.len());
    let mut trace = Vec::new();
    let mut total = 0u64;
    let mut t = root;
    let found = loop {
        let (r, nodes) = feasible(&red, t, bnb, sub, opts.threads, &budget);
        total += nodes;
        if budget.expired.load(Ordering::Relaxed) {
            return Err(Error::TimeLimitExceeded { lower: t, upper: greedy.len() });
        }
        trace.push(BoundStep { size: t, feasible: r.is_some(), nodes });
        if let Some(c) = r {
            break c;
        }
        t += 1;
    };
    let optimum = found.len();
    // Canonical pass: the lexicographically smallest cover of the optimal size.
    let (chosen, canonical) = if bnb {
        // The collineation group is 2-transitive on lines and preserves the
        // universe, so some optimal cover contains lines 0 and 1, and hence
        // so does the lexicographically smallest.
        let mut st = root_state(&red, if optimum >= 2 { &[0, 1] } else { &[] }, &[]);
        let mut s =
            Search { red: &red, target: optimum, element: false, bounds: true, sub, budget: &budget, nodes: 0 };
        let r = s.dfs(&mut st);
        total += s.nodes;
        match r {
            Some(c) => (c, true),
            None if budget.expired.load(Ordering::Relaxed) => (sorted(found), false),
            None => unreachable!("a cover of size {optimum} exists"),
        }
    } else {
        (sorted(found), true)
    };
    let mut cert = SearchCertificate {
        k: inst.k,
        optimum,
        chosen: chosen.iter().map(|&j| inst.sets[j].clone()).collect(),
        chosen_indices: chosen,
        node_count: total,
        time: budget.start.elapsed().as_secs_f64(),
        root_lower_bound: root,
        greedy_upper_bound: greedy.len(),
        projection_bound: sub,
        lower_bound_trace: trace,
        mode: opts.mode,
        canonical,
        verified: false,
    };
    cert.verified = verify_certificate(&cert)?;
    Ok(cert)
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Checks `{0} ∪ ±chosen` with the blocking-set verifier.
pub fn verify_certificate(cert: &SearchCertificate) -> Result<bool> {
    Ok(cert.chosen.len() == cert.optimum && is_affine_blocking(&cert.affine_set(), 2)?.holds)
}

/// A value of b'_3(k, 2): known exactly or only bracketed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum BPrime {
    Exact { value: usize },
    Range { lo: usize, hi: usize },
}

impl BPrime {
    pub fn lo(&self) -> usize {
        match *self {
            BPrime::Exact { value } => value,
            BPrime::Range { lo, .. } => lo,
        }
    }

    pub fn hi(&self) -> usize {
        match *self {
            BPrime::Exact { value } => value,
            BPrime::Range { hi, .. } => hi,
        }
    }
}

/// Known values of b'_3(k, 2) for k ≤ 6; b'_3(1, 2) = 1 is immediate.
pub fn reported_bprime() -> BTreeMap<usize, BPrime> {
    let mut m = BTreeMap::new();
    for (k, v) in [(1, 1), (2, 4), (3, 9), (4, 14), (5, 19)] {
        m.insert(k, BPrime::Exact { value: v });
    }
    m.insert(6, BPrime::Range { lo: 22, hi: 24 });
    m
}

/// T_L(n) = 3^K with K the largest k such that b'_3(k, 2) ≤ n, possibly
/// only known to lie in `k_min..=k_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TlRow {
    pub n: usize,
    pub k_min: usize,
    pub k_max: usize,
}

impl TlRow {
    pub fn is_exact(&self) -> bool {
        self.k_min == self.k_max
    }

    pub fn size_min(&self) -> u128 {
        3u128.pow(self.k_min as u32)
    }

    pub fn size_max(&self) -> u128 {
        3u128.pow(self.k_max as u32)
    }
}

/// The table of T_L(n) for `1 <= n <= n_max` from values of b'_3(k, 2),
/// which must be given for k = 1, 2, … without gaps.
///
/// Beyond the last given k, b' is bounded below by `b'(k+1) ≥ b'(k) + 1`
/// (shorten a minimal code) and by `4k`; rows that these bounds cannot settle
/// are `InsufficientData`.
pub fn tl_table(n_max: usize, values: &BTreeMap<usize, BPrime>) -> Result<Vec<TlRow>> {
    let kmax = values.len();
    if (1..=kmax).any(|k| !values.contains_key(&k)) {
        return Err(Error::InsufficientData("b' values must be given for k = 1, 2, … without gaps".into()));
    }
    let next_lo = (values[&kmax].lo() + 1).max(4 * kmax);
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n >= next_lo {
            return Err(Error::InsufficientData(format!(
                "T_L({n}) needs b'_3({}, 2), which is not known",
                kmax + 1
            )));
        }
        let k_min = (1..=kmax).filter(|k| values[k].hi() <= n).max().unwrap_or(0);
        let k_max = (1..=kmax).filter(|k| values[k].lo() <= n).max().unwrap_or(0);
        rows.push(TlRow { n, k_min, k_max });
    }
    Ok(rows)
}

/// Consecutive rows with the same value merged into `(n_from, n_to, row)`.
pub fn tl_steps(rows: &[TlRow]) -> Vec<(usize, usize, TlRow)> {
    let mut out: Vec<(usize, usize, TlRow)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some((_, to, last)) if last.k_min == r.k_min && last.k_max == r.k_max => *to = r.n,
            _ => out.push((r.n, r.n, *r)),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_sizes() {
        for (k, sets, uni) in [(2, 4, 8), (3, 13, 104), (4, 40, 1040)] {
            let inst = build_instance(k).unwrap();
            assert_eq!(inst.sets.len(), sets);
            assert_eq!(inst.universe.len(), uni);
            assert_eq!(inst.incidence.len(), sets);
        }
        let inst = build_instance(2).unwrap();
        for inc in &inst.incidence {
            assert_eq!(inc.count(), 2);
        }
        assert!(matches!(build_instance(7), Err(Error::KTooLarge(7))));
        assert!(matches!(build_instance(1), Err(Error::KTooLarge(1))));
    }

    #[test]
    fn incidence_matches_geometry() {
        let inst = build_instance(3).unwrap();
        let f = inst.field().clone();
        for (j, v) in inst.sets.iter().enumerate() {
            for (e, w) in inst.universe.iter().enumerate() {
                let meets = w.contains(v) || w.contains(&f.negate(v));
                assert_eq!(inst.incidence[j].contains(e), meets);
            }
        }
    }

    #[test]
    fn small_optima() {
        for (k, opt) in [(2, 4), (3, 9)] {
            let inst = build_instance(k).unwrap();
            let a = solve_min_cover(&inst, None, SearchMode::Bnb).unwrap();
            let b = solve_min_cover(&inst, None, SearchMode::Exhaustive).unwrap();
            assert_eq!(a.optimum, opt);
            assert_eq!(b.optimum, opt);
            assert_eq!(a.chosen, b.chosen);
            assert!(a.verified && a.canonical);
        }
    }

    #[test]
    fn tl_table_steps() {
        let rows = tl_table(18, &reported_bprime()).unwrap();
        let steps: Vec<(usize, usize, usize)> = tl_steps(&rows).iter().map(|(a, b, r)| (*a, *b, r.k_min)).collect();
        assert_eq!(steps, vec![(1, 3, 1), (4, 8, 2), (9, 13, 3), (14, 18, 4)]);
        let rows = tl_table(23, &reported_bprime()).unwrap();
        assert_eq!((rows[21].k_min, rows[21].k_max), (5, 6));
        assert!(matches!(tl_table(24, &reported_bprime()), Err(Error::InsufficientData(_))));
    }
}
