//! Combinatorial multivector fields: partitions of a Lefschetz complex into
//! locally closed sets, their critical/regular classification, and the
//! coarsening forced by an arbitrary collection of cell sets.

use serde_json::{json, Value};

use crate::error::Error;
use crate::homology::relative_betti;
use crate::lefschetz::{CellSet, LefschetzComplex};
use crate::Result;

/// A partition of the cells into locally closed multivectors.
///
/// Multivectors are indexed 0..m, ordered by their smallest cell id, so the
/// representation is canonical for a given partition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultivectorField {
    multivectors: Vec<CellSet>,
    /// Multivector index of each cell.
    assignment: Vec<usize>,
}

impl MultivectorField {
    /// Validates that `parts` partitions the cells of `x` into locally
    /// closed sets and assembles the field.
    pub fn new(x: &LefschetzComplex, parts: Vec<CellSet>) -> Result<MultivectorField> {
        let mut assignment = vec![usize::MAX; x.n_cells()];
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return Err(Error::NotAPartition { context: "empty multivector".into() });
            }
            for c in part.iter() {
                if c >= x.n_cells() {
                    return Err(Error::UnknownCell(c));
                }
                if assignment[c] != usize::MAX {
                    return Err(Error::NotAPartition {
                        context: format!("cell {} appears in two multivectors", x.cell_label(c)),
                    });
                }
                assignment[c] = i;
            }
        }
        if let Some(c) = assignment.iter().position(|&a| a == usize::MAX) {
            return Err(Error::NotAPartition {
                context: format!("cell {} is not covered", x.cell_label(c)),
            });
        }
        for part in &parts {
            if !x.is_locally_closed(part) {
                return Err(Error::NotLocallyClosed {
                    context: format!("multivector {part}"),
                });
            }
        }
        Ok(Self::from_partition(parts, x.n_cells()))
    }

    /// Canonicalizes an already-checked partition: sorts multivectors by
    /// smallest member and rebuilds the assignment.
    fn from_partition(mut parts: Vec<CellSet>, n_cells: usize) -> MultivectorField {
        parts.sort_by_key(|p| p.first().expect("non-empty part"));
        let mut assignment = vec![usize::MAX; n_cells];
        for (i, part) in parts.iter().enumerate() {
            for c in part.iter() {
                assignment[c] = i;
            }
        }
        MultivectorField { multivectors: parts, assignment }
    }

    /// The finest multivector field: every cell a singleton.
    pub fn singletons(x: &LefschetzComplex) -> MultivectorField {
        let parts = (0..x.n_cells()).map(|c| CellSet::from_ids([c])).collect();
        Self::from_partition(parts, x.n_cells())
    }

    pub fn n_multivectors(&self) -> usize {
        self.multivectors.len()
    }

    pub fn multivector(&self, i: usize) -> &CellSet {
        &self.multivectors[i]
    }

    pub fn multivectors(&self) -> &[CellSet] {
        &self.multivectors
    }

    /// Index of the multivector containing a cell.
    pub fn index_of(&self, cell: usize) -> usize {
        self.assignment[cell]
    }

    /// The multivector [cell] containing a cell.
    pub fn containing(&self, cell: usize) -> &CellSet {
        &self.multivectors[self.assignment[cell]]
    }

    /// Whether S is a union of multivectors.
    pub fn is_compatible(&self, s: &CellSet) -> bool {
        s.iter().all(|c| self.multivectors[self.assignment[c]].is_subset(s))
    }

    /// A multivector is critical when the homology of its closure relative
    /// to its mouth does not vanish; otherwise it is regular.
    pub fn is_critical(&self, x: &LefschetzComplex, i: usize) -> Result<bool> {
        Ok(!relative_betti(x, &self.multivectors[i])?.is_zero())
    }

    /// Critical flags for all multivectors.
    pub fn critical_flags(&self, x: &LefschetzComplex) -> Result<Vec<bool>> {
        (0..self.multivectors.len()).map(|i| self.is_critical(x, i)).collect()
    }

    /// The combinatorial flow through a cell: its closure together with its
    /// multivector.
    pub fn flow_map(&self, x: &LefschetzComplex, cell: usize) -> CellSet {
        x.closure(&CellSet::from_ids([cell])).union(self.containing(cell))
    }

    /// Serializes the field as multivector cell-id lists plus a parallel
    /// `"critical"` / `"regular"` tag list.
    pub fn to_json(&self, x: &LefschetzComplex) -> Result<Value> {
        let multivectors: Vec<Vec<usize>> =
            self.multivectors.iter().map(|m| m.iter().collect()).collect();
        let tags: Vec<&str> = self
            .critical_flags(x)?
            .into_iter()
            .map(|c| if c { "critical" } else { "regular" })
            .collect();
        Ok(json!({ "multivectors": multivectors, "tags": tags }))
    }

    /// Loads a field from its JSON form, revalidating against the complex.
    pub fn from_json(x: &LefschetzComplex, v: &Value) -> Result<MultivectorField> {
        let raw = v
            .get("multivectors")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidData("missing multivectors array".into()))?;
        let mut parts = Vec::with_capacity(raw.len());
        for m in raw {
            let ids = m
                .as_array()
                .ok_or_else(|| Error::InvalidData("multivector must be a cell id array".into()))?
                .iter()
                .map(|c| {
                    c.as_u64()
                        .map(|id| id as usize)
                        .ok_or_else(|| Error::InvalidData("cell id must be a number".into()))
                })
                .collect::<Result<Vec<usize>>>()?;
            parts.push(CellSet::from_ids(ids));
        }
        MultivectorField::new(x, parts)
    }
}

/// The finest multivector field in which every input set lies inside a
/// single multivector.
///
/// Cells are merged with union–find: first each input set is collapsed, then
/// classes are saturated against the face-order interval hull — local
/// closedness means order convexity, so any cell lying between two members
/// of a class is forced into it. Every merge is forced by the requirements,
/// so the fixpoint refines every valid coarsening of the input.
pub fn minimal_mvf(x: &LefschetzComplex, sets: &[CellSet]) -> Result<MultivectorField> {
    let mut uf = UnionFind::new(x.n_cells());
    for s in sets {
        let mut prev = None;
        for c in s.iter() {
            if c >= x.n_cells() {
                return Err(Error::UnknownCell(c));
            }
            if let Some(p) = prev {
                uf.union(p, c);
            }
            prev = Some(c);
        }
    }
    loop {
        let classes = uf.classes();
        let mut changed = false;
        for class in classes {
            let hull = x.interval_hull(&class);
            let root = class.first().expect("non-empty class");
            for c in hull.iter() {
                changed |= uf.union(root, c);
            }
        }
        if !changed {
            break;
        }
    }
    let field = MultivectorField::from_partition(uf.classes(), x.n_cells());
    debug_assert!(field.multivectors.iter().all(|m| x.is_locally_closed(m)));
    Ok(field)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Merges two classes; true when they were distinct.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // Smaller root wins, keeping representatives deterministic.
        let (lo, hi) = (ra.min(rb), ra.max(rb));
        self.parent[hi] = lo;
        true
    }

    fn classes(&mut self) -> Vec<CellSet> {
        let n = self.parent.len();
        let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for c in 0..n {
            let r = self.find(c);
            by_root.entry(r).or_default().push(c);
        }
        by_root.into_values().map(CellSet::from_ids).collect()
    }
}
