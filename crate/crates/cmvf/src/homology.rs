//! Chain complexes, Betti numbers, and relative homology over a field.

use std::fmt;

use crate::algebra::{FieldId, Scalar, SparseMatrix};
use crate::error::Error;
use crate::lefschetz::{CellSet, LefschetzComplex};
use crate::Result;

/// Graded homology dimensions β₀..β_d.
///
/// Equality pads with zeros, so `(1, 0)` equals `(1)`: the values are graded
/// vector-space dimensions, and trailing zero groups carry no information.
#[derive(Clone, Debug, Eq)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    pub fn zero() -> BettiVector {
        BettiVector(Vec::new())
    }

    /// β_k, defaulting to 0 above the stored range.
    pub fn get(&self, k: usize) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&b| b == 0)
    }

    /// Total dimension Σ β_k.
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Euler characteristic Σ (−1)^k β_k.
    pub fn euler(&self) -> i64 {
        self.0
            .iter()
            .enumerate()
            .map(|(k, &b)| if k % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum()
    }
}

impl PartialEq for BettiVector {
    fn eq(&self, other: &Self) -> bool {
        let len = self.0.len().max(other.0.len());
        (0..len).all(|k| self.get(k) == other.get(k))
    }
}

impl fmt::Display for BettiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<usize>> for BettiVector {
    fn from(v: Vec<usize>) -> Self {
        BettiVector(v)
    }
}

/// The chain complex of a Lefschetz complex: per-dimension cell bases and
/// boundary matrices with entries κ(x, y).
pub struct ChainComplex {
    field: FieldId,
    /// `bases[k]`: ascending cell ids of dimension k.
    bases: Vec<Vec<usize>>,
    /// `boundaries[k]`: ∂_k as a |bases[k−1]| × |bases[k]| matrix
    /// (∂₀ has zero rows).
    boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    pub fn field(&self) -> FieldId {
        self.field
    }

    /// Top grading of the complex.
    pub fn dim(&self) -> usize {
        self.bases.len().saturating_sub(1)
    }

    pub fn basis(&self, k: usize) -> &[usize] {
        self.bases.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// ∂_k, or None above the top dimension.
    pub fn boundary(&self, k: usize) -> Option<&SparseMatrix> {
        self.boundaries.get(k)
    }

    /// β_k = dim C_k − rank ∂_k − rank ∂_{k+1}.
    pub fn betti(&self) -> BettiVector {
        let ranks: Vec<usize> = self.boundaries.iter().map(SparseMatrix::rank).collect();
        let betti = (0..self.bases.len())
            .map(|k| {
                let n_k = self.bases[k].len();
                let r_k = ranks.get(k).copied().unwrap_or(0);
                let r_k1 = ranks.get(k + 1).copied().unwrap_or(0);
                n_k - r_k - r_k1
            })
            .collect();
        BettiVector(betti)
    }
}

/// Builds the chain complex of a whole Lefschetz complex.
pub fn chain_complex_of(x: &LefschetzComplex) -> ChainComplex {
    chain_complex_on(x, &x.all_cells())
}

/// The chain complex spanned by an arbitrary cell subset, with boundary
/// entries κ(x, y) kept only when both cells lie in the subset.
///
/// For a locally closed S this is exactly the relative complex
/// C(cl S)/C(mo S): deleting the mouth rows and columns from the closure's
/// boundary matrices leaves precisely the S × S entries.
pub(crate) fn chain_complex_on(x: &LefschetzComplex, s: &CellSet) -> ChainComplex {
    let top = s.iter().map(|c| x.cell_dim(c)).max().map_or(0, |d| d + 1);
    let mut bases: Vec<Vec<usize>> = vec![Vec::new(); top.max(1)];
    for c in s.iter() {
        bases[x.cell_dim(c)].push(c);
    }
    // Ascending ids within each dimension (CellSet iterates ascending).
    let index_of: std::collections::HashMap<usize, usize> = bases
        .iter()
        .flat_map(|b| b.iter().enumerate().map(|(i, &c)| (c, i)))
        .collect();
    let mut boundaries = Vec::with_capacity(bases.len());
    for k in 0..bases.len() {
        let n_rows = if k == 0 { 0 } else { bases[k - 1].len() };
        let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
        for (j, &cell) in bases[k].iter().enumerate() {
            for (y, v) in x.facet_entries(cell) {
                if s.contains(*y) {
                    triplets.push((index_of[y], j, v.clone()));
                }
            }
        }
        boundaries.push(
            SparseMatrix::from_triplets(x.field(), n_rows, bases[k].len(), &triplets)
                .expect("in-range triplets"),
        );
    }
    ChainComplex { field: x.field(), bases, boundaries }
}

/// Betti numbers of the whole complex.
pub fn betti(x: &LefschetzComplex) -> BettiVector {
    chain_complex_of(x).betti()
}

/// Relative Betti numbers H_*(cl S, mo S) for a locally closed S, computed
/// by deleting the mouth rows/columns from the closure's boundary matrices.
pub fn relative_betti(x: &LefschetzComplex, s: &CellSet) -> Result<BettiVector> {
    if !x.is_locally_closed(s) {
        return Err(Error::NotLocallyClosed {
            context: format!("relative homology of {} cells", s.len()),
        });
    }
    Ok(chain_complex_on(x, s).betti())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lefschetz::{build_cubical, build_simplicial, interval_complex};

    fn q() -> FieldId {
        FieldId::Q
    }

    fn gf2() -> FieldId {
        FieldId::gf(2).unwrap()
    }

    /// Independent oracle: relative homology via the honest quotient
    /// construction. Works on the full closure basis and computes ranks of
    /// induced maps with augmented matrices — never forms the S × S minor.
    fn quotient_relative_betti(x: &LefschetzComplex, s: &CellSet) -> BettiVector {
        let cl = x.closure(s);
        let mo = cl.minus(s);
        let chain = chain_complex_on(x, &cl);
        let top = chain.bases.len();
        // rank of the induced map ∂̄_k = rank([∂_k | mouth basis columns]) − |mouth_{k−1}|
        let mut induced_ranks = vec![0usize; top + 1];
        for k in 1..top {
            let d = chain.boundary(k).unwrap();
            let mouth_rows: Vec<usize> = chain.bases[k - 1]
                .iter()
                .enumerate()
                .filter(|(_, &c)| mo.contains(c))
                .map(|(i, _)| i)
                .collect();
            let mut triplets: Vec<(usize, usize, Scalar)> =
                d.entries().map(|(r, c, v)| (r, c, v.clone())).collect();
            for (j, &r) in mouth_rows.iter().enumerate() {
                triplets.push((r, d.n_cols() + j, x.field().one()));
            }
            let aug = SparseMatrix::from_triplets(
                x.field(),
                d.n_rows(),
                d.n_cols() + mouth_rows.len(),
                &triplets,
            )
            .unwrap();
            induced_ranks[k] = aug.rank() - mouth_rows.len();
        }
        let betti = (0..top)
            .map(|k| {
                let s_k = chain.bases[k].iter().filter(|&&c| s.contains(c)).count();
                s_k - induced_ranks[k] - induced_ranks[k + 1]
            })
            .collect();
        BettiVector(betti)
    }

    #[test]
    fn betti_vector_equality_pads_with_zeros() {
        assert_eq!(BettiVector(vec![1]), BettiVector(vec![1, 0, 0]));
        assert_ne!(BettiVector(vec![1]), BettiVector(vec![1, 1]));
        assert!(BettiVector(vec![0, 0]).is_zero());
    }

    #[test]
    fn interval_boundary_matrix_reads_kappa() {
        let x = interval_complex(q());
        let chain = chain_complex_of(&x);
        let d1 = chain.boundary(1).unwrap();
        assert_eq!((d1.n_rows(), d1.n_cols()), (2, 1));
        assert_eq!(d1.get(0, 0), q().from_i64(-1)); // κ(AB, A)
        assert_eq!(d1.get(1, 0), q().from_i64(1)); // κ(AB, B)
    }

    #[test]
    fn vertex_only_complex_has_zero_boundaries() {
        let x = build_simplicial(3, &[], q()).unwrap();
        let chain = chain_complex_of(&x);
        assert!(chain.boundary(0).unwrap().is_zero());
        assert_eq!(betti(&x), BettiVector(vec![3]));
    }

    #[test]
    fn boundary_squares_to_zero_on_triangle() {
        let x = build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap();
        let chain = chain_complex_of(&x);
        let product = chain.boundary(1).unwrap().mul(chain.boundary(2).unwrap()).unwrap();
        assert!(product.is_zero());
    }

    #[test]
    fn classic_betti_vectors() {
        // Full triangle: contractible.
        let full = build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap();
        assert_eq!(betti(&full), BettiVector(vec![1, 0, 0]));
        // Hollow triangle: a circle.
        let hollow = build_simplicial(3, &[vec![0, 1], vec![1, 2], vec![0, 2]], q()).unwrap();
        assert_eq!(betti(&hollow), BettiVector(vec![1, 1]));
        // Boundary of the 3-simplex: a 2-sphere.
        let sphere = build_simplicial(
            4,
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
            q(),
        )
        .unwrap();
        assert_eq!(betti(&sphere), BettiVector(vec![1, 0, 1]));
        // Solid cube: contractible in dimension 3.
        let cube = build_cubical(&[1, 1, 1], &[vec![0, 0, 0]], q()).unwrap();
        assert_eq!(betti(&cube), BettiVector(vec![1, 0, 0, 0]));
        // 3×3 square ring with the center removed: a circle.
        let ring_cubes: Vec<Vec<usize>> = (0..3usize)
            .flat_map(|i| (0..3usize).map(move |j| vec![i, j]))
            .filter(|c| c != &vec![1, 1])
            .collect();
        let ring = build_cubical(&[3, 3], &ring_cubes, q()).unwrap();
        assert_eq!(betti(&ring), BettiVector(vec![1, 1]));
    }

    #[test]
    fn betti_agrees_between_fields_on_bundled_complexes() {
        let builders: Vec<Box<dyn Fn(FieldId) -> LefschetzComplex>> = vec![
            Box::new(|f| build_simplicial(3, &[vec![0, 1, 2]], f).unwrap()),
            Box::new(|f| build_simplicial(3, &[vec![0, 1], vec![1, 2], vec![0, 2]], f).unwrap()),
            Box::new(|f| {
                build_simplicial(4, &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], f)
                    .unwrap()
            }),
            Box::new(|f| build_cubical(&[1, 1, 1], &[vec![0, 0, 0]], f).unwrap()),
            Box::new(interval_complex),
        ];
        for b in builders {
            assert_eq!(betti(&b(q())), betti(&b(gf2())));
        }
    }

    #[test]
    fn euler_poincare_identity() {
        let complexes = [
            build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap(),
            build_simplicial(3, &[vec![0, 1], vec![1, 2], vec![0, 2]], q()).unwrap(),
            build_simplicial(4, &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]], q())
                .unwrap(),
            build_cubical(&[1, 1, 1], &[vec![0, 0, 0]], q()).unwrap(),
            interval_complex(q()),
        ];
        for x in &complexes {
            let cell_euler: i64 = (0..=x.dim())
                .map(|k| {
                    let n = x.cells_of_dim(k).len() as i64;
                    if k % 2 == 0 {
                        n
                    } else {
                        -n
                    }
                })
                .sum();
            assert_eq!(cell_euler, betti(x).euler(), "Euler–Poincaré fails");
        }
    }

    #[test]
    fn relative_betti_of_edge_rel_endpoints() {
        let x = interval_complex(q());
        let s = CellSet::from_labels(&x, &["AB"]);
        assert_eq!(relative_betti(&x, &s).unwrap(), BettiVector(vec![0, 1]));
    }

    #[test]
    fn relative_betti_of_half_open_interval_vanishes() {
        let x = interval_complex(q());
        let s = CellSet::from_labels(&x, &["A", "AB"]);
        assert!(relative_betti(&x, &s).unwrap().is_zero());
    }

    #[test]
    fn relative_betti_of_whole_complex_is_betti() {
        let x = interval_complex(q());
        assert_eq!(relative_betti(&x, &x.all_cells()).unwrap(), betti(&x));
    }

    #[test]
    fn relative_betti_rejects_non_locally_closed() {
        let t = build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap();
        let bad = CellSet::from_labels(&t, &["0-1-2", "0"]);
        assert!(matches!(relative_betti(&t, &bad), Err(Error::NotLocallyClosed { .. })));
    }

    /// Exhaustive three-route agreement on small complexes: deletion-based
    /// relative homology, homology of the restricted subcomplex, and the
    /// quotient-construction oracle.
    #[test]
    fn relative_routes_agree_exhaustively() {
        for x in [
            interval_complex(q()),
            build_simplicial(3, &[vec![0, 1, 2]], q()).unwrap(),
            build_simplicial(3, &[vec![0, 1], vec![1, 2], vec![0, 2]], q()).unwrap(),
            interval_complex(gf2()),
        ] {
            let n = x.n_cells();
            for mask in 1u32..(1 << n) {
                let s = CellSet::from_ids((0..n).filter(|i| mask >> i & 1 == 1));
                if !x.is_locally_closed(&s) {
                    continue;
                }
                let deletion = relative_betti(&x, &s).unwrap();
                let sub = betti(&x.subcomplex(&s).unwrap());
                let quotient = quotient_relative_betti(&x, &s);
                assert_eq!(deletion, sub, "deletion vs subcomplex on {s}");
                assert_eq!(deletion, quotient, "deletion vs quotient on {s}");
            }
        }
    }
}
