//! Simplicial and cubical complex builders with deterministic κ signs.

use std::collections::BTreeSet;

use super::{Cell, LefschetzComplex};
use crate::algebra::FieldId;
use crate::error::Error;
use crate::Result;

/// Builds the simplicial complex generated by the given simplices
/// (auto-completed under faces; vertices 0..vertex_count always present).
///
/// κ follows the sorted-vertex orientation: dropping the i-th smallest
/// vertex contributes the sign (−1)^i.
pub fn build_simplicial(
    vertex_count: usize,
    simplices: &[Vec<usize>],
    field: FieldId,
) -> Result<LefschetzComplex> {
    Ok(build_simplicial_geometry(vertex_count, simplices, field)?.0)
}

/// Like [`build_simplicial`], additionally returning each cell's sorted
/// vertex list (indexed by cell id) for geometric consumers.
pub fn build_simplicial_geometry(
    vertex_count: usize,
    simplices: &[Vec<usize>],
    field: FieldId,
) -> Result<(LefschetzComplex, Vec<Vec<usize>>)> {
    let mut seen_inputs: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for v in 0..vertex_count {
        faces.insert(vec![v]);
    }
    for simplex in simplices {
        let mut s = simplex.clone();
        s.sort_unstable();
        if s.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidData(format!("simplex {simplex:?} repeats a vertex")));
        }
        if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
            return Err(Error::InvalidVertex { simplex: simplex.clone(), vertex: v, vertex_count });
        }
        if !seen_inputs.insert(s.clone()) {
            return Err(Error::DuplicateSimplex(simplex.clone()));
        }
        // All nonempty subsets of s are faces.
        let k = s.len();
        for mask in 1u32..(1 << k) {
            let face: Vec<usize> =
                (0..k).filter(|i| mask >> i & 1 == 1).map(|i| s[i]).collect();
            faces.insert(face);
        }
    }

    // Sort by (dimension, label) and assign ids.
    let mut with_labels: Vec<(usize, String, Vec<usize>)> = faces
        .into_iter()
        .map(|f| (f.len() - 1, simplex_label(&f), f))
        .collect();
    with_labels.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let mut id_of = std::collections::HashMap::new();
    let mut cells = Vec::with_capacity(with_labels.len());
    let mut vertex_lists = Vec::with_capacity(with_labels.len());
    for (id, (dim, label, verts)) in with_labels.iter().enumerate() {
        id_of.insert(verts.clone(), id);
        cells.push(Cell { id, label: label.clone(), dim: *dim });
        vertex_lists.push(verts.clone());
    }

    let mut kappa = Vec::new();
    for (x, verts) in vertex_lists.iter().enumerate() {
        if verts.len() < 2 {
            continue;
        }
        for i in 0..verts.len() {
            let mut facet = verts.clone();
            facet.remove(i);
            let y = id_of[&facet];
            let sign = if i % 2 == 0 { 1 } else { -1 };
            kappa.push((x, y, field.from_i64(sign)));
        }
    }

    let complex = LefschetzComplex::from_ordered(field, cells, kappa)?;
    complex.validate()?;
    Ok((complex, vertex_lists))
}

fn simplex_label(verts: &[usize]) -> String {
    verts.iter().map(ToString::to_string).collect::<Vec<_>>().join("-")
}

/// One elementary cube: per-axis integer extents (lo, hi) with
/// hi ∈ {lo, lo+1}; degenerate axes have hi = lo.
pub type CubeExtents = Vec<(usize, usize)>;

/// Builds the cubical complex generated by the given top-dimensional
/// cubes on an integer grid; all faces are generated.
///
/// κ follows the standard product orientation: for the j-th nondegenerate
/// axis (1-based), the right facet gets (−1)^(j−1) and the left facet the
/// opposite sign.
pub fn build_cubical(
    grid_dims: &[usize],
    active_cubes: &[Vec<usize>],
    field: FieldId,
) -> Result<LefschetzComplex> {
    Ok(build_cubical_geometry(grid_dims, active_cubes, field)?.0)
}

/// Like [`build_cubical`], additionally returning each cell's extents
/// (indexed by cell id) for geometric consumers.
pub fn build_cubical_geometry(
    grid_dims: &[usize],
    active_cubes: &[Vec<usize>],
    field: FieldId,
) -> Result<(LefschetzComplex, Vec<CubeExtents>)> {
    let n = grid_dims.len();
    let mut faces: BTreeSet<CubeExtents> = BTreeSet::new();
    for cube in active_cubes {
        if cube.len() != n {
            return Err(Error::OutOfGrid { cube: cube.clone(), dims: grid_dims.to_vec() });
        }
        if cube.iter().zip(grid_dims).any(|(c, d)| c >= d) {
            return Err(Error::OutOfGrid { cube: cube.clone(), dims: grid_dims.to_vec() });
        }
        // Each axis independently: full interval, left endpoint, or right.
        let mut stack: Vec<CubeExtents> = vec![Vec::with_capacity(n)];
        for (axis, &c) in cube.iter().enumerate() {
            let mut next = Vec::with_capacity(stack.len() * 3);
            for prefix in &stack {
                for ext in [(c, c + 1), (c, c), (c + 1, c + 1)] {
                    let mut e = prefix.clone();
                    e.push(ext);
                    next.push(e);
                }
            }
            stack = next;
            let _ = axis;
        }
        faces.extend(stack);
    }

    let mut with_labels: Vec<(usize, String, CubeExtents)> = faces
        .into_iter()
        .map(|e| (cube_dim(&e), cube_label(&e), e))
        .collect();
    with_labels.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));

    let mut id_of = std::collections::HashMap::new();
    let mut cells = Vec::with_capacity(with_labels.len());
    let mut extents = Vec::with_capacity(with_labels.len());
    for (id, (dim, label, e)) in with_labels.iter().enumerate() {
        id_of.insert(e.clone(), id);
        cells.push(Cell { id, label: label.clone(), dim: *dim });
        extents.push(e.clone());
    }

    let mut kappa = Vec::new();
    for (x, e) in extents.iter().enumerate() {
        let mut j = 0; // 1-based index among nondegenerate axes, after increment
        for (axis, &(lo, hi)) in e.iter().enumerate() {
            if lo == hi {
                continue;
            }
            j += 1;
            let sign = if j % 2 == 1 { 1 } else { -1 };
            let mut right = e.clone();
            right[axis] = (hi, hi);
            let mut left = e.clone();
            left[axis] = (lo, lo);
            kappa.push((x, id_of[&right], field.from_i64(sign)));
            kappa.push((x, id_of[&left], field.from_i64(-sign)));
        }
    }

    let complex = LefschetzComplex::from_ordered(field, cells, kappa)?;
    complex.validate()?;
    Ok((complex, extents))
}

fn cube_dim(e: &CubeExtents) -> usize {
    e.iter().filter(|(lo, hi)| lo != hi).count()
}

fn cube_label(e: &CubeExtents) -> String {
    e.iter()
        .map(|&(lo, hi)| if lo == hi { format!("[{lo}]") } else { format!("[{lo},{hi}]") })
        .collect::<Vec<_>>()
        .join("x")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lefschetz::CellSet;

    fn q() -> FieldId {
        FieldId::Q
    }

    #[test]
    fn one_edge_gives_interval_complex() {
        let x = build_simplicial(2, &[vec![0, 1]], q()).unwrap();
        assert_eq!(x.n_cells(), 3);
        let e = x.cell_by_label("0-1").unwrap();
        assert_eq!(x.facets(e).unwrap(), CellSet::from_labels(&x, &["0", "1"]));
        assert_eq!(x.kappa(e, x.cell_by_label("0").unwrap()), q().from_i64(-1));
        assert_eq!(x.kappa(e, x.cell_by_label("1").unwrap()), q().from_i64(1));
    }

    #[test]
    fn triangle_has_seven_cells() {
        let x = build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap();
        assert_eq!(x.n_cells(), 7);
        assert_eq!(x.cells_of_dim(0).len(), 3);
        assert_eq!(x.cells_of_dim(1).len(), 3);
        assert_eq!(x.cells_of_dim(2).len(), 1);
    }

    #[test]
    fn isolated_vertices_are_kept() {
        let x = build_simplicial(4, &[vec![0, 1]], q()).unwrap();
        assert_eq!(x.n_cells(), 5); // 4 vertices + 1 edge
    }

    #[test]
    fn duplicate_simplex_rejected() {
        let r = build_simplicial(3, &[vec![0, 1], vec![1, 0]], q());
        assert!(matches!(r, Err(Error::DuplicateSimplex(_))));
    }

    #[test]
    fn out_of_range_vertex_rejected() {
        let r = build_simplicial(2, &[vec![0, 2]], q());
        assert!(matches!(r, Err(Error::InvalidVertex { vertex: 2, .. })));
    }

    #[test]
    fn unit_square_has_nine_cells() {
        let x = build_cubical(&[1, 1], &[vec![0, 0]], q()).unwrap();
        assert_eq!(x.n_cells(), 9);
        assert_eq!(x.cells_of_dim(0).len(), 4);
        assert_eq!(x.cells_of_dim(1).len(), 4);
        assert_eq!(x.cells_of_dim(2).len(), 1);
    }

    #[test]
    fn unit_cube_has_twenty_seven_cells() {
        let x = build_cubical(&[1, 1, 1], &[vec![0, 0, 0]], q()).unwrap();
        assert_eq!(x.n_cells(), 27);
        assert_eq!(x.cells_of_dim(3).len(), 1);
        assert_eq!(x.cells_of_dim(2).len(), 6);
        assert_eq!(x.cells_of_dim(1).len(), 12);
        assert_eq!(x.cells_of_dim(0).len(), 8);
    }

    #[test]
    fn shared_faces_are_not_duplicated() {
        let x = build_cubical(&[2, 1], &[vec![0, 0], vec![1, 0]], q()).unwrap();
        // Two squares sharing one edge: 6 vertices, 7 edges, 2 squares.
        assert_eq!(x.n_cells(), 15);
        assert_eq!(x.cells_of_dim(1).len(), 7);
    }

    #[test]
    fn cube_outside_grid_rejected() {
        let r = build_cubical(&[2, 2], &[vec![2, 0]], q());
        assert!(matches!(r, Err(Error::OutOfGrid { .. })));
        let r = build_cubical(&[2, 2], &[vec![0]], q());
        assert!(matches!(r, Err(Error::OutOfGrid { .. })));
    }

    #[test]
    fn cubical_boundary_signs_cancel_on_shared_edges() {
        // validate() inside the builder already checks ∂∂ = 0; spot-check
        // one sign: the square's right edge carries +1.
        let (x, extents) = build_cubical_geometry(&[1, 1], &[vec![0, 0]], q()).unwrap();
        let square = extents.iter().position(|e| cube_dim(e) == 2).unwrap();
        let right = extents
            .iter()
            .position(|e| e == &vec![(1, 1), (0, 1)])
            .unwrap();
        assert_eq!(x.kappa(square, right), q().from_i64(1));
    }

    #[test]
    fn builders_work_over_gf2() {
        let f = FieldId::gf(2).unwrap();
        build_simplicial(3, &[vec![0, 1, 2]], f).unwrap().validate().unwrap();
        build_cubical(&[1, 1, 1], &[vec![0, 0, 0]], f).unwrap().validate().unwrap();
    }
}
