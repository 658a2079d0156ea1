//! Dynamics of a multivector field: strongly connected components of the
//! combinatorial flow, the finest Morse decomposition, the Morse poset, and
//! reachability queries (intervals, connections, limits, attractors).

use std::collections::BTreeSet;

use crate::error::Error;
use crate::lefschetz::{CellSet, LefschetzComplex};
use crate::mvf::MultivectorField;
use crate::Result;

/// Fixed-width bit set used for poset relations and Morse reachability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub(crate) fn new(len: usize) -> Bits {
        Bits { words: vec![0; len.div_ceil(64)], len }
    }

    pub(crate) fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn or_assign(&mut self, other: &Bits) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub(crate) fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    pub(crate) fn ones(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// True when any set bit lies in `indices`.
    pub(crate) fn hits(&self, indices: &[usize]) -> bool {
        indices.iter().any(|&i| self.get(i))
    }
}

/// A finite partial order on 0..n, stored as reflexive down-sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    /// `below[q]` = {p : p ≤ q}, including q itself.
    below: Vec<Bits>,
}

impl Poset {
    pub(crate) fn from_down_sets(below: Vec<Bits>) -> Poset {
        Poset { below }
    }

    /// Builds a poset as the reflexive-transitive closure of strict
    /// relations `p < q`, rejecting cycles.
    pub fn from_relations(n: usize, relations: &[(usize, usize)]) -> Result<Poset> {
        let mut below: Vec<Bits> = (0..n)
            .map(|q| {
                let mut b = Bits::new(n);
                b.set(q);
                b
            })
            .collect();
        for &(p, q) in relations {
            if p >= n || q >= n {
                return Err(Error::InvalidData(format!("poset relation ({p}, {q}) out of range")));
            }
            below[q].set(p);
        }
        // Transitive closure: iterate until stable (n is small).
        loop {
            let mut changed = false;
            for q in 0..n {
                let mut merged = below[q].clone();
                for p in below[q].ones() {
                    if p != q {
                        merged.or_assign(&below[p]);
                    }
                }
                if merged != below[q] {
                    below[q] = merged;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for q in 0..n {
            for p in below[q].ones() {
                if p != q && below[p].get(q) {
                    return Err(Error::InvalidData(format!(
                        "poset relations contain a cycle through {p} and {q}"
                    )));
                }
            }
        }
        Ok(Poset { below })
    }

    pub fn len(&self) -> usize {
        self.below.len()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    pub fn leq(&self, p: usize, q: usize) -> bool {
        self.below[q].get(p)
    }

    pub fn lt(&self, p: usize, q: usize) -> bool {
        p != q && self.leq(p, q)
    }

    pub fn comparable(&self, p: usize, q: usize) -> bool {
        self.leq(p, q) || self.leq(q, p)
    }

    /// All strict pairs (p, q) with p < q, in lexicographic order.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut pairs = Vec::new();
        for p in 0..n {
            for q in 0..n {
                if self.lt(p, q) {
                    pairs.push((p, q));
                }
            }
        }
        pairs
    }

    /// Covering pairs p ⋖ q: p < q with nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        self.strict_pairs()
            .into_iter()
            .filter(|&(p, q)| !(0..self.len()).any(|r| self.lt(p, r) && self.lt(r, q)))
            .collect()
    }

    /// First triple (p, q, r) with p, q in the set, p < r < q, r outside.
    pub fn interval_violation(&self, set: &[usize]) -> Option<(usize, usize, usize)> {
        let members: BTreeSet<usize> = set.iter().copied().collect();
        for &p in set {
            for &q in set {
                for r in 0..self.len() {
                    if !members.contains(&r) && self.lt(p, r) && self.lt(r, q) {
                        return Some((p, q, r));
                    }
                }
            }
        }
        None
    }

    /// Whether the set is order-convex.
    pub fn is_interval(&self, set: &[usize]) -> bool {
        self.interval_violation(set).is_none()
    }

    pub fn is_down_set(&self, set: &[usize]) -> bool {
        let members: BTreeSet<usize> = set.iter().copied().collect();
        set.iter().all(|&q| self.below[q].ones().iter().all(|p| members.contains(p)))
    }

    pub fn is_up_set(&self, set: &[usize]) -> bool {
        let members: BTreeSet<usize> = set.iter().copied().collect();
        (0..self.len())
            .filter(|q| !members.contains(q))
            .all(|q| !self.below[q].hits(set))
    }

    /// Smallest down set containing the given elements.
    pub fn down_closure(&self, set: &[usize]) -> Vec<usize> {
        let mut out = BTreeSet::new();
        for &q in set {
            out.extend(self.below[q].ones());
        }
        out.into_iter().collect()
    }

    /// Smallest up set containing the given elements.
    pub fn up_closure(&self, set: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|&q| self.below[q].hits(set)).collect()
    }

    /// Deterministic linear extension: repeatedly emits the smallest-index
    /// element whose strict lower bounds are all emitted.
    pub fn linear_extension(&self) -> Vec<usize> {
        let n = self.len();
        let mut emitted = vec![false; n];
        let mut out = Vec::with_capacity(n);
        while out.len() < n {
            let next = (0..n)
                .find(|&q| {
                    !emitted[q] && self.below[q].ones().iter().all(|&p| p == q || emitted[p])
                })
                .expect("a poset always has a minimal element");
            emitted[next] = true;
            out.push(next);
        }
        out
    }

    /// Every order-convex subset, each sorted, in mask order. Enumerates
    /// all 2^n subsets — intended for small posets and tests.
    pub fn all_intervals(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        assert!(n < usize::BITS as usize, "interval enumeration is exponential");
        (0..1usize << n)
            .map(|mask| (0..n).filter(|i| mask >> i & 1 == 1).collect::<Vec<_>>())
            .filter(|set| self.is_interval(set))
            .collect()
    }
}

/// The analyzed dynamics of a multivector field on a complex: SCCs of the
/// flow, the finest Morse decomposition, and Morse-set reachability.
pub struct Dynamics {
    /// SCC index of each cell.
    scc_of_cell: Vec<usize>,
    /// Cells of each SCC.
    scc_cells: Vec<CellSet>,
    /// Multivector count of each SCC (for diagnostics and tests).
    scc_sizes: Vec<usize>,
    /// Morse position of each SCC, if essential.
    morse_rank: Vec<Option<usize>>,
    /// SCC index of each Morse set, by Morse position.
    morse_scc: Vec<usize>,
    morse_sets: Vec<CellSet>,
    /// Per SCC: Morse positions reachable from it (including itself).
    reaches: Vec<Bits>,
    /// Per SCC: Morse positions that reach it.
    reached_by: Vec<Bits>,
    /// Condensation successors, used for connection-set searches.
    scc_succ: Vec<Vec<usize>>,
    scc_pred: Vec<Vec<usize>>,
    poset: Poset,
}

impl Dynamics {
    /// Computes SCCs of the flow and everything derived from them.
    ///
    /// The flow through a cell is its closure together with its multivector.
    /// Cells of one multivector always flow into each other, so the SCC
    /// search runs on the contracted digraph whose nodes are multivectors
    /// and whose edges are facet relations crossing between them; cell-level
    /// SCCs are recovered as unions of multivectors.
    ///
    /// An SCC is a Morse set when it can carry a solution that never gets
    /// stuck in a regular multivector: either it joins two or more
    /// multivectors (some cycle must cross between them), or its single
    /// multivector is critical.
    pub fn analyze(x: &LefschetzComplex, v: &MultivectorField) -> Result<Dynamics> {
        let m = v.n_multivectors();
        // Contracted adjacency: multivector → multivectors its cells' facets land in.
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (i, entry) in succ.iter_mut().enumerate() {
            let mut targets = BTreeSet::new();
            for c in v.multivector(i).iter() {
                for (y, _) in x.facet_entries(c) {
                    let j = v.index_of(*y);
                    if j != i {
                        targets.insert(j);
                    }
                }
            }
            *entry = targets.into_iter().collect();
        }
        // SCCs in reverse topological order of the condensation.
        let scc_of_mv = tarjan_sccs(&succ);
        let n_sccs = scc_of_mv.iter().map(|&s| s + 1).max().unwrap_or(0);
        let mut mvs_of_scc: Vec<Vec<usize>> = vec![Vec::new(); n_sccs];
        for (mv, &s) in scc_of_mv.iter().enumerate() {
            mvs_of_scc[s].push(mv);
        }
        let scc_cells: Vec<CellSet> = mvs_of_scc
            .iter()
            .map(|mvs| {
                let mut cells = CellSet::new();
                for &mv in mvs {
                    cells = cells.union(v.multivector(mv));
                }
                cells
            })
            .collect();
        let mut scc_of_cell = vec![0usize; x.n_cells()];
        for (s, cells) in scc_cells.iter().enumerate() {
            for c in cells.iter() {
                scc_of_cell[c] = s;
            }
        }
        // Essential SCCs, in canonical order by smallest cell id.
        let mut essential: Vec<usize> = Vec::new();
        for (s, mvs) in mvs_of_scc.iter().enumerate() {
            let is_morse = mvs.len() >= 2 || v.is_critical(x, mvs[0])?;
            if is_morse {
                essential.push(s);
            }
        }
        essential.sort_by_key(|&s| scc_cells[s].first());
        let mut morse_rank: Vec<Option<usize>> = vec![None; n_sccs];
        for (rank, &s) in essential.iter().enumerate() {
            morse_rank[s] = Some(rank);
        }
        let morse_sets: Vec<CellSet> = essential.iter().map(|&s| scc_cells[s].clone()).collect();
        // Condensation edges.
        let mut scc_succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n_sccs];
        for (mv, targets) in succ.iter().enumerate() {
            for &t in targets {
                let (a, b) = (scc_of_mv[mv], scc_of_mv[t]);
                if a != b {
                    scc_succ[a].insert(b);
                }
            }
        }
        let mut scc_pred: Vec<Vec<usize>> = vec![Vec::new(); n_sccs];
        for (a, targets) in scc_succ.iter().enumerate() {
            for &b in targets {
                scc_pred[b].push(a);
            }
        }
        let scc_succ: Vec<Vec<usize>> =
            scc_succ.into_iter().map(|t| t.into_iter().collect()).collect();
        // Reachability over Morse positions. SCC indices come out of the
        // search in reverse topological order: successors have smaller
        // indices, so one forward pass settles `reaches` and one backward
        // pass settles `reached_by`.
        let n_morse = essential.len();
        let mut reaches = vec![Bits::new(n_morse); n_sccs];
        for s in 0..n_sccs {
            if let Some(r) = morse_rank[s] {
                reaches[s].set(r);
            }
            let (done, rest) = reaches.split_at_mut(s);
            for &t in &scc_succ[s] {
                rest[0].or_assign(&done[t]);
            }
        }
        let mut reached_by = vec![Bits::new(n_morse); n_sccs];
        for s in (0..n_sccs).rev() {
            if let Some(r) = morse_rank[s] {
                reached_by[s].set(r);
            }
            let (rest, done) = reached_by.split_at_mut(s + 1);
            for &t in &scc_pred[s] {
                rest[s].or_assign(&done[t - s - 1]);
            }
        }
        // Morse poset: p ≤ q exactly when q's SCC flows into p's.
        let below: Vec<Bits> = essential.iter().map(|&s| reaches[s].clone()).collect();
        let scc_sizes = mvs_of_scc.iter().map(Vec::len).collect();
        Ok(Dynamics {
            scc_of_cell,
            scc_cells,
            scc_sizes,
            morse_rank,
            morse_scc: essential,
            morse_sets,
            reaches,
            reached_by,
            scc_succ,
            scc_pred,
            poset: Poset::from_down_sets(below),
        })
    }

    /// The finest Morse decomposition, indexed by Morse position.
    pub fn morse_sets(&self) -> &[CellSet] {
        &self.morse_sets
    }

    pub fn n_morse(&self) -> usize {
        self.morse_sets.len()
    }

    /// The Morse poset: p ≤ q when flow runs from M_q to M_p.
    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn n_sccs(&self) -> usize {
        self.scc_cells.len()
    }

    /// Cells of an SCC by internal index (diagnostics).
    pub fn scc_cells(&self, s: usize) -> &CellSet {
        &self.scc_cells[s]
    }

    /// Number of multivectors inside an SCC (diagnostics).
    pub fn scc_size(&self, s: usize) -> usize {
        self.scc_sizes[s]
    }

    /// Morse position of the SCC containing a cell, when essential.
    pub fn morse_index_of_cell(&self, cell: usize) -> Option<usize> {
        self.morse_rank[self.scc_of_cell[cell]]
    }

    /// SCC index of the cell, essential or not.
    pub fn scc_index_of_cell(&self, cell: usize) -> usize {
        self.scc_of_cell[cell]
    }

    /// Backward and forward Morse limits of the essential solutions through
    /// a cell: (sets they can come from, sets they can end in). Errors when
    /// no essential solution passes through the cell.
    pub fn alpha_omega(&self, cell: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let s = self.scc_of_cell[cell];
        if !self.reached_by[s].any() || !self.reaches[s].any() {
            return Err(Error::NoEssentialSolution(cell));
        }
        Ok((self.reached_by[s].ones(), self.reaches[s].ones()))
    }

    /// The Morse set of an interval I of the poset: all cells that an
    /// essential solution entering from I and leaving into I can pass
    /// through. Rejects index sets that are not order-convex.
    pub fn morse_interval(&self, indices: &[usize]) -> Result<CellSet> {
        for &i in indices {
            if i >= self.n_morse() {
                return Err(Error::InvalidData(format!("no Morse set {i}")));
            }
        }
        if let Some((p, q, r)) = self.poset.interval_violation(indices) {
            return Err(Error::NotAnInterval { indices: indices.to_vec(), p, q, r });
        }
        let mut out = CellSet::new();
        for (s, cells) in self.scc_cells.iter().enumerate() {
            if self.reached_by[s].hits(indices) && self.reaches[s].hits(indices) {
                out = out.union(cells);
            }
        }
        Ok(out)
    }

    /// Every cell some essential solution passes through on its way out of
    /// `source` and into `target` — including the cells of the two Morse
    /// sets themselves that such a solution crosses. Computed as
    /// forward-reach(source) ∩ backward-reach(target) over the condensation,
    /// which is exact when both endpoints are Morse sets of the finest
    /// decomposition: inside any strongly connected piece a solution can be
    /// routed through any cell, and its tails can be prolonged within the
    /// endpoint Morse sets forever.
    pub fn connection_set(&self, source: usize, target: usize) -> Result<CellSet> {
        if source >= self.n_morse() || target >= self.n_morse() {
            return Err(Error::InvalidData("no such Morse set".into()));
        }
        let fwd = bfs(&self.scc_succ, self.morse_scc[source]);
        let bwd = bfs(&self.scc_pred, self.morse_scc[target]);
        let mut out = CellSet::new();
        for s in 0..self.n_sccs() {
            if fwd[s] && bwd[s] {
                out = out.union(&self.scc_cells[s]);
            }
        }
        Ok(out)
    }
}

/// Π(S) = S: the set flows into itself, so nothing ever leaves it.
pub fn is_attractor(x: &LefschetzComplex, v: &MultivectorField, s: &CellSet) -> bool {
    let mut image = CellSet::new();
    for c in s.iter() {
        image = image.union(&v.flow_map(x, c));
    }
    image == *s
}

/// Π⁻¹(S) = S: nothing outside the set ever flows into it.
pub fn is_repeller(x: &LefschetzComplex, v: &MultivectorField, s: &CellSet) -> bool {
    let mut preimage = CellSet::new();
    for c in s.iter() {
        preimage = preimage.union(&x.star(&CellSet::from_ids([c]))).union(v.containing(c));
    }
    preimage == *s
}

/// Iterative Tarjan over an adjacency list; returns the SCC index of each
/// node, with SCCs numbered in reverse topological order.
fn tarjan_sccs(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    const UNSET: usize = usize::MAX;
    let mut index = vec![UNSET; n];
    let mut lowlink = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut scc_of = vec![UNSET; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut next_index = 0usize;
    let mut next_scc = 0usize;
    // Explicit DFS frames: (node, position in its successor list).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        frames.push((root, 0));
        index[root] = next_index;
        lowlink[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (node, ref mut pos)) = frames.last_mut() {
            if *pos < succ[node].len() {
                let next = succ[node][*pos];
                *pos += 1;
                if index[next] == UNSET {
                    index[next] = next_index;
                    lowlink[next] = next_index;
                    next_index += 1;
                    stack.push(next);
                    on_stack[next] = true;
                    frames.push((next, 0));
                } else if on_stack[next] {
                    lowlink[node] = lowlink[node].min(index[next]);
                }
            } else {
                frames.pop();
                if let Some(&(parent, _)) = frames.last() {
                    lowlink[parent] = lowlink[parent].min(lowlink[node]);
                }
                if lowlink[node] == index[node] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        scc_of[w] = next_scc;
                        if w == node {
                            break;
                        }
                    }
                    next_scc += 1;
                }
            }
        }
    }
    scc_of
}

fn bfs(adj: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut queue = std::collections::VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}
