//! Lefschetz complexes: graded cell sets with an incidence coefficient map.
//!
//! A complex stores cells graded by dimension together with a sparse
//! incidence map κ; `κ(x, y) ≠ 0` couples a cell to a one-lower-dimensional
//! facet, and the induced boundary operator squares to zero. On top of the
//! raw structure this module provides the face-order topology used by the
//! dynamics: closures, mouths, local closedness, and subcomplex restriction.

mod builders;
mod delaunay;
mod json;

pub use builders::{build_cubical, build_cubical_geometry, build_simplicial, build_simplicial_geometry};
pub use delaunay::{build_delaunay, delaunay_triangles, empty_circumcircle_holds};

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::algebra::{FieldId, Scalar};
use crate::error::Error;
use crate::Result;

/// One cell of a complex: a stable integer id, a human-readable label,
/// and its dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub id: usize,
    pub label: String,
    pub dim: usize,
}

/// A set of cell ids with set semantics and deterministic iteration order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellSet(BTreeSet<usize>);

impl CellSet {
    pub fn new() -> CellSet {
        CellSet(BTreeSet::new())
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> CellSet {
        CellSet(ids.into_iter().collect())
    }

    /// Looks up each label in the complex; panics on unknown labels
    /// (a convenience for fixtures and tests).
    pub fn from_labels(complex: &LefschetzComplex, labels: &[&str]) -> CellSet {
        CellSet(
            labels
                .iter()
                .map(|l| complex.cell_by_label(l).unwrap_or_else(|| panic!("no cell labeled '{l}'")))
                .collect(),
        )
    }

    pub fn insert(&mut self, id: usize) -> bool {
        self.0.insert(id)
    }

    pub fn remove(&mut self, id: usize) -> bool {
        self.0.remove(&id)
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        CellSet(self.0.union(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &CellSet) -> CellSet {
        CellSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn minus(&self, other: &CellSet) -> CellSet {
        CellSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &CellSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &CellSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }
}

impl FromIterator<usize> for CellSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        CellSet(iter.into_iter().collect())
    }
}

impl fmt::Display for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, id) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{id}")?;
        }
        write!(f, "}}")
    }
}

/// A finite Lefschetz complex over a fixed coefficient field.
///
/// Construction assigns ids 0..n in (dimension, label) lexicographic order,
/// so downstream output referring to ids is reproducible across runs.
#[derive(Clone, Debug)]
pub struct LefschetzComplex {
    field: FieldId,
    cells: Vec<Cell>,
    /// `facets[x]` lists `(y, κ(x,y))` sorted by y.
    facets: Vec<Vec<(usize, Scalar)>>,
    /// `cofacets[y]` lists `(x, κ(x,y))` sorted by x.
    cofacets: Vec<Vec<(usize, Scalar)>>,
    dim: usize,
    label_index: HashMap<String, usize>,
}

impl LefschetzComplex {
    /// Assembles a complex from labeled cells and κ entries between labels.
    ///
    /// Cells are sorted by (dimension, label) and ids assigned in that
    /// order. Shape errors (duplicate labels, unknown labels, zero or
    /// foreign-field scalars) are rejected here; the mathematical
    /// conditions on κ are checked separately by [`validate`](Self::validate).
    pub fn from_labeled(
        field: FieldId,
        cells: Vec<(String, usize)>,
        kappa: Vec<(String, String, Scalar)>,
    ) -> Result<LefschetzComplex> {
        let mut sorted = cells;
        sorted.sort_by(|a, b| (a.1, &a.0).cmp(&(b.1, &b.0)));
        let mut label_index = HashMap::new();
        let mut cell_list = Vec::with_capacity(sorted.len());
        for (id, (label, dim)) in sorted.into_iter().enumerate() {
            if label_index.insert(label.clone(), id).is_some() {
                return Err(Error::InvalidData(format!("duplicate cell label '{label}'")));
            }
            cell_list.push(Cell { id, label, dim });
        }
        let dim = cell_list.iter().map(|c| c.dim).max().unwrap_or(0);
        let n = cell_list.len();
        let mut complex = LefschetzComplex {
            field,
            cells: cell_list,
            facets: vec![Vec::new(); n],
            cofacets: vec![Vec::new(); n],
            dim,
            label_index,
        };
        for (xl, yl, v) in kappa {
            let x = complex
                .cell_by_label(&xl)
                .ok_or_else(|| Error::InvalidData(format!("kappa refers to unknown cell '{xl}'")))?;
            let y = complex
                .cell_by_label(&yl)
                .ok_or_else(|| Error::InvalidData(format!("kappa refers to unknown cell '{yl}'")))?;
            complex.push_kappa(x, y, v)?;
        }
        complex.sort_adjacency();
        Ok(complex)
    }

    /// Assembles a complex whose cells are already id-ordered; κ entries
    /// refer to those ids. Used by builders that compute their own ordering.
    pub(crate) fn from_ordered(
        field: FieldId,
        cells: Vec<Cell>,
        kappa: Vec<(usize, usize, Scalar)>,
    ) -> Result<LefschetzComplex> {
        let n = cells.len();
        let mut label_index = HashMap::new();
        for c in &cells {
            if c.id != label_index.len() {
                return Err(Error::InvalidData("cell ids must be 0..n in order".into()));
            }
            if label_index.insert(c.label.clone(), c.id).is_some() {
                return Err(Error::InvalidData(format!("duplicate cell label '{}'", c.label)));
            }
        }
        let dim = cells.iter().map(|c| c.dim).max().unwrap_or(0);
        let mut complex = LefschetzComplex {
            field,
            cells,
            facets: vec![Vec::new(); n],
            cofacets: vec![Vec::new(); n],
            dim,
            label_index,
        };
        for (x, y, v) in kappa {
            complex.push_kappa(x, y, v)?;
        }
        complex.sort_adjacency();
        Ok(complex)
    }

    fn push_kappa(&mut self, x: usize, y: usize, v: Scalar) -> Result<()> {
        if x >= self.cells.len() || y >= self.cells.len() {
            return Err(Error::UnknownCell(x.max(y)));
        }
        if v.field() != self.field {
            return Err(Error::InvalidData(format!(
                "kappa scalar in field {} on a {} complex",
                v.field(),
                self.field
            )));
        }
        if v.is_zero() {
            return Ok(()); // zero entries are simply not stored
        }
        self.facets[x].push((y, v.clone()));
        self.cofacets[y].push((x, v));
        Ok(())
    }

    fn sort_adjacency(&mut self) {
        for l in &mut self.facets {
            l.sort_by_key(|e| e.0);
        }
        for l in &mut self.cofacets {
            l.sort_by_key(|e| e.0);
        }
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Top dimension of the complex (0 for an empty complex).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: usize) -> Result<&Cell> {
        self.cells.get(id).ok_or(Error::UnknownCell(id))
    }

    pub fn cell_dim(&self, id: usize) -> usize {
        self.cells[id].dim
    }

    pub fn cell_label(&self, id: usize) -> &str {
        &self.cells[id].label
    }

    pub fn cell_by_label(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    /// All cell ids of one dimension, ascending.
    pub fn cells_of_dim(&self, k: usize) -> Vec<usize> {
        self.cells.iter().filter(|c| c.dim == k).map(|c| c.id).collect()
    }

    /// The whole complex as a cell set.
    pub fn all_cells(&self) -> CellSet {
        CellSet::from_ids(0..self.cells.len())
    }

    /// κ(x, y), zero when the cells are not incident.
    pub fn kappa(&self, x: usize, y: usize) -> Scalar {
        match self.facets[x].binary_search_by_key(&y, |e| e.0) {
            Ok(i) => self.facets[x][i].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    /// The facet entries of x: `(y, κ(x,y))` with κ ≠ 0.
    pub fn facet_entries(&self, x: usize) -> &[(usize, Scalar)] {
        &self.facets[x]
    }

    /// The cofacet entries of y: `(x, κ(x,y))` with κ ≠ 0.
    pub fn cofacet_entries(&self, y: usize) -> &[(usize, Scalar)] {
        &self.cofacets[y]
    }

    /// Cells y with κ(x, y) ≠ 0.
    pub fn facets(&self, x: usize) -> Result<CellSet> {
        if x >= self.cells.len() {
            return Err(Error::UnknownCell(x));
        }
        Ok(CellSet::from_ids(self.facets[x].iter().map(|e| e.0)))
    }

    /// Cells x with κ(x, y) ≠ 0.
    pub fn cofacets(&self, y: usize) -> Result<CellSet> {
        if y >= self.cells.len() {
            return Err(Error::UnknownCell(y));
        }
        Ok(CellSet::from_ids(self.cofacets[y].iter().map(|e| e.0)))
    }

    /// Checks both Lefschetz conditions: κ only couples consecutive
    /// dimensions, and the boundary of a boundary vanishes. Reports the
    /// first violating pair (in ascending cell order) on failure.
    pub fn validate(&self) -> Result<()> {
        for x in 0..self.cells.len() {
            for (y, _) in &self.facets[x] {
                if self.cells[x].dim != self.cells[*y].dim + 1 {
                    return Err(Error::GradingViolation {
                        x: self.cells[x].label.clone(),
                        y: self.cells[*y].label.clone(),
                        dx: self.cells[x].dim,
                        dy: self.cells[*y].dim,
                    });
                }
            }
        }
        // Σ_z κ(x,z)·κ(z,y) = 0 for every x; accumulate ∂∂x sparsely.
        for x in 0..self.cells.len() {
            let mut acc: HashMap<usize, Scalar> = HashMap::new();
            for (z, a) in &self.facets[x] {
                for (y, b) in &self.facets[*z] {
                    let term = a.clone() * b.clone();
                    match acc.entry(*y) {
                        std::collections::hash_map::Entry::Vacant(e) => {
                            e.insert(term);
                        }
                        std::collections::hash_map::Entry::Occupied(mut e) => {
                            let sum = e.get().clone() + term;
                            *e.get_mut() = sum;
                        }
                    }
                }
            }
            let mut bad: Vec<usize> = acc
                .into_iter()
                .filter_map(|(y, v)| if v.is_zero() { None } else { Some(y) })
                .collect();
            bad.sort_unstable();
            if let Some(y) = bad.first() {
                return Err(Error::SquareNotZero {
                    x: self.cells[x].label.clone(),
                    y: self.cells[*y].label.clone(),
                });
            }
        }
        Ok(())
    }

    /// Smallest closed superset of S: transitive facet descent.
    pub fn closure(&self, s: &CellSet) -> CellSet {
        let mut out = s.clone();
        let mut stack: Vec<usize> = s.iter().collect();
        while let Some(x) = stack.pop() {
            for (y, _) in &self.facets[x] {
                if out.insert(*y) {
                    stack.push(*y);
                }
            }
        }
        out
    }

    /// Dual closure upward: all cells having a face in S (including S).
    pub fn star(&self, s: &CellSet) -> CellSet {
        let mut out = s.clone();
        let mut stack: Vec<usize> = s.iter().collect();
        while let Some(y) = stack.pop() {
            for (x, _) in &self.cofacets[y] {
                if out.insert(*x) {
                    stack.push(*x);
                }
            }
        }
        out
    }

    /// mo S = cl S \ S.
    pub fn mouth(&self, s: &CellSet) -> CellSet {
        self.closure(s).minus(s)
    }

    /// True when S already contains every face of its cells.
    pub fn is_closed(&self, s: &CellSet) -> bool {
        s.iter().all(|x| self.facets[x].iter().all(|(y, _)| s.contains(*y)))
    }

    /// True when the mouth of S is closed.
    pub fn is_locally_closed(&self, s: &CellSet) -> bool {
        self.is_closed(&self.mouth(s))
    }

    /// The face-interval criterion for local closedness: S contains every
    /// cell y sitting between two of its cells in the face order
    /// (x ≤ y ≤ z with x, z ∈ S). Kept as an independent code path and
    /// compared against [`is_locally_closed`](Self::is_locally_closed) in tests.
    pub fn is_face_interval(&self, s: &CellSet) -> bool {
        self.interval_hull(s).len() == s.len()
    }

    /// The order-convex hull of S: cl S ∩ star S, the smallest face-order
    /// interval containing S.
    pub fn interval_hull(&self, s: &CellSet) -> CellSet {
        self.closure(s).intersection(&self.star(s))
    }

    /// Restriction to a locally closed set, with κ restricted to S × S.
    /// The result is a valid Lefschetz complex; cells keep their labels
    /// but receive fresh ids in (dimension, label) order.
    pub fn subcomplex(&self, s: &CellSet) -> Result<LefschetzComplex> {
        if !self.is_locally_closed(s) {
            return Err(Error::NotLocallyClosed {
                context: format!("subcomplex of {} cells", s.len()),
            });
        }
        for id in s.iter() {
            if id >= self.cells.len() {
                return Err(Error::UnknownCell(id));
            }
        }
        let cells: Vec<(String, usize)> =
            s.iter().map(|id| (self.cells[id].label.clone(), self.cells[id].dim)).collect();
        let mut kappa = Vec::new();
        for x in s.iter() {
            for (y, v) in &self.facets[x] {
                if s.contains(*y) {
                    kappa.push((
                        self.cells[x].label.clone(),
                        self.cells[*y].label.clone(),
                        v.clone(),
                    ));
                }
            }
        }
        LefschetzComplex::from_labeled(self.field, cells, kappa)
    }
}

/// Convenience builder for hand-written complexes in tests and examples.
pub struct ComplexBuilder {
    field: FieldId,
    cells: Vec<(String, usize)>,
    kappa: Vec<(String, String, Scalar)>,
}

impl ComplexBuilder {
    pub fn new(field: FieldId) -> ComplexBuilder {
        ComplexBuilder { field, cells: Vec::new(), kappa: Vec::new() }
    }

    pub fn cell(mut self, label: &str, dim: usize) -> Self {
        self.cells.push((label.to_string(), dim));
        self
    }

    pub fn kappa(mut self, x: &str, y: &str, value: i64) -> Self {
        self.kappa.push((x.to_string(), y.to_string(), self.field.from_i64(value)));
        self
    }

    pub fn build(self) -> Result<LefschetzComplex> {
        LefschetzComplex::from_labeled(self.field, self.cells, self.kappa)
    }
}

/// The three-cell complex of a single edge with its endpoints: the
/// smallest interesting fixture, used across the test suite.
pub fn interval_complex(field: FieldId) -> LefschetzComplex {
    ComplexBuilder::new(field)
        .cell("A", 0)
        .cell("B", 0)
        .cell("AB", 1)
        .kappa("AB", "A", -1)
        .kappa("AB", "B", 1)
        .build()
        .expect("the interval complex is well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldId {
        FieldId::Q
    }

    #[test]
    fn interval_complex_validates() {
        interval_complex(q()).validate().unwrap();
    }

    #[test]
    fn ids_follow_dimension_then_label_order() {
        let x = interval_complex(q());
        assert_eq!(x.cell_label(0), "A");
        assert_eq!(x.cell_label(1), "B");
        assert_eq!(x.cell_label(2), "AB");
        assert_eq!(x.cell_dim(2), 1);
    }

    #[test]
    fn full_triangle_validates() {
        build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap().validate().unwrap();
    }

    #[test]
    fn sign_flip_breaks_boundary_condition() {
        // Full triangle with κ(edge 01, vertex 0) forced to +1 instead of −1.
        let x = ComplexBuilder::new(q())
            .cell("0", 0)
            .cell("1", 0)
            .cell("2", 0)
            .cell("01", 1)
            .cell("02", 1)
            .cell("12", 1)
            .cell("012", 2)
            .kappa("01", "0", 1) // flipped sign
            .kappa("01", "1", 1)
            .kappa("02", "0", -1)
            .kappa("02", "2", 1)
            .kappa("12", "1", -1)
            .kappa("12", "2", 1)
            .kappa("012", "12", 1)
            .kappa("012", "02", -1)
            .kappa("012", "01", 1)
            .build()
            .unwrap();
        assert!(matches!(x.validate(), Err(Error::SquareNotZero { .. })));
    }

    #[test]
    fn grading_violation_is_reported() {
        let x = ComplexBuilder::new(q())
            .cell("A", 0)
            .cell("F", 2)
            .kappa("F", "A", 1)
            .build()
            .unwrap();
        assert!(matches!(x.validate(), Err(Error::GradingViolation { .. })));
    }

    #[test]
    fn facets_of_edge_are_its_endpoints() {
        let x = interval_complex(q());
        let ab = x.cell_by_label("AB").unwrap();
        assert_eq!(x.facets(ab).unwrap(), CellSet::from_labels(&x, &["A", "B"]));
        let a = x.cell_by_label("A").unwrap();
        assert!(x.facets(a).unwrap().is_empty());
    }

    #[test]
    fn facets_of_unknown_cell_error() {
        let x = interval_complex(q());
        assert!(matches!(x.facets(99), Err(Error::UnknownCell(99))));
    }

    #[test]
    fn closure_of_edge_is_whole_interval() {
        let x = interval_complex(q());
        let s = CellSet::from_labels(&x, &["AB"]);
        assert_eq!(x.closure(&s), x.all_cells());
        let a = CellSet::from_labels(&x, &["A"]);
        assert_eq!(x.closure(&a), a);
    }

    #[test]
    fn closure_of_triangle_top_cell_is_everything() {
        let x = build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap();
        let top = CellSet::from_labels(&x, &["0-1-2"]);
        assert_eq!(x.closure(&top).len(), 7);
    }

    #[test]
    fn mouth_examples() {
        let x = interval_complex(q());
        assert_eq!(
            x.mouth(&CellSet::from_labels(&x, &["AB"])),
            CellSet::from_labels(&x, &["A", "B"])
        );
        assert!(x.mouth(&x.all_cells()).is_empty());
        assert_eq!(
            x.mouth(&CellSet::from_labels(&x, &["A", "AB"])),
            CellSet::from_labels(&x, &["B"])
        );
    }

    #[test]
    fn local_closedness_examples() {
        let x = interval_complex(q());
        assert!(x.is_locally_closed(&CellSet::from_labels(&x, &["AB"])));
        assert!(x.is_locally_closed(&CellSet::from_labels(&x, &["A", "AB"])));

        let t = build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap();
        let bad = CellSet::from_labels(&t, &["0-1-2", "0"]);
        assert!(!t.is_locally_closed(&bad));
        assert!(!t.is_face_interval(&bad));
    }

    #[test]
    fn subcomplex_restricts_kappa() {
        let x = interval_complex(q());
        let s = x.subcomplex(&CellSet::from_labels(&x, &["A", "AB"])).unwrap();
        s.validate().unwrap();
        assert_eq!(s.n_cells(), 2);
        let ab = s.cell_by_label("AB").unwrap();
        let a = s.cell_by_label("A").unwrap();
        assert_eq!(s.kappa(ab, a), q().from_i64(-1));

        let single = x.subcomplex(&CellSet::from_labels(&x, &["AB"])).unwrap();
        assert_eq!(single.n_cells(), 1);
        assert!(single.facet_entries(0).is_empty());

        let full = x.subcomplex(&x.all_cells()).unwrap();
        assert_eq!(full.n_cells(), x.n_cells());
    }

    #[test]
    fn subcomplex_rejects_non_locally_closed() {
        let t = build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap();
        let bad = CellSet::from_labels(&t, &["0-1-2", "0"]);
        assert!(matches!(t.subcomplex(&bad), Err(Error::NotLocallyClosed { .. })));
    }

    /// Exhaustive cross-checks of the topology predicates on a small
    /// complex: local closedness (mouth route) vs face-interval route vs
    /// representability as a difference of two closed sets.
    #[test]
    fn locally_closed_equivalences_exhaustive() {
        for x in [
            interval_complex(q()),
            build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap(),
            build_simplicial(3, &[vec![0, 1], vec![1, 2], vec![0, 2]], q()).unwrap(),
        ] {
            let n = x.n_cells();
            assert!(n <= 8, "exhaustive enumeration is meant for small complexes");
            // Collect all closed subsets and all differences of two of them.
            let subsets: Vec<CellSet> = (0..1u32 << n)
                .map(|mask| CellSet::from_ids((0..n).filter(|i| mask >> i & 1 == 1)))
                .collect();
            let closed: Vec<&CellSet> = subsets.iter().filter(|s| x.is_closed(s)).collect();
            let mut differences = std::collections::BTreeSet::new();
            for c1 in &closed {
                for c2 in &closed {
                    differences.insert(c1.minus(c2));
                }
            }
            for s in &subsets {
                let lc = x.is_locally_closed(s);
                assert_eq!(lc, x.is_face_interval(s), "face-interval route disagrees on {s}");
                assert_eq!(lc, differences.contains(s), "difference-of-closed route disagrees on {s}");
                if x.is_closed(s) {
                    assert!(lc, "closed set {s} must be locally closed");
                }
            }
        }
    }

    #[test]
    fn closure_is_idempotent_and_monotone_exhaustive() {
        let x = build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap();
        let n = x.n_cells();
        let subsets: Vec<CellSet> = (0..1u32 << n)
            .map(|mask| CellSet::from_ids((0..n).filter(|i| mask >> i & 1 == 1)))
            .collect();
        for s in &subsets {
            let c = x.closure(s);
            assert_eq!(x.closure(&c), c);
            assert!(s.is_subset(&c));
        }
        for s in &subsets {
            for t in &subsets {
                if s.is_subset(t) {
                    assert!(x.closure(s).is_subset(&x.closure(t)));
                }
            }
        }
    }
}
