//! Delaunay triangulation of planar point sets (Bowyer–Watson).

use super::{build_simplicial, LefschetzComplex};
use crate::algebra::FieldId;
use crate::error::Error;
use crate::Result;

/// Counterclockwise orientation test: > 0 when c lies left of a→b.
fn orient2d(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Strict in-circumcircle test for a counterclockwise triangle (a, b, c):
/// > 0 when d lies strictly inside.
fn in_circle(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> f64 {
    let (adx, ady) = (a[0] - d[0], a[1] - d[1]);
    let (bdx, bdy) = (b[0] - d[0], b[1] - d[1]);
    let (cdx, cdy) = (c[0] - d[0], c[1] - d[1]);
    let alift = adx * adx + ady * ady;
    let blift = bdx * bdx + bdy * bdy;
    let clift = cdx * cdx + cdy * cdy;
    adx * (bdy * clift - cdy * blift) - ady * (bdx * clift - cdx * blift)
        + alift * (bdx * cdy - cdx * bdy)
}

/// Computes the Delaunay triangles of a planar point set.
///
/// Incremental Bowyer–Watson over a far-away super-triangle, followed by a
/// legalization sweep that flips any remaining locally non-Delaunay edge,
/// so the strict empty-circumcircle property holds for every output
/// triangle. Cocircular quads are legal as built: with points inserted in
/// index order, the diagonal chosen is the one created by the
/// lowest-indexed points, which makes the result deterministic.
pub fn delaunay_triangles(points: &[[f64; 2]]) -> Result<Vec<[usize; 3]>> {
    let n = points.len();
    if n < 3 {
        return Err(Error::DegenerateInput(format!("{n} points, need at least 3")));
    }
    {
        let mut sorted: Vec<(u64, u64, usize)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p[0].to_bits(), p[1].to_bits(), i))
            .collect();
        sorted.sort_unstable();
        for w in sorted.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DegenerateInput(format!(
                    "duplicate points at indices {} and {}",
                    w[0].2.min(w[1].2),
                    w[0].2.max(w[1].2)
                )));
            }
        }
    }

    // Super-triangle far enough away that its influence on cavity
    // classification is confined to a negligibly thin band along the hull.
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in points {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let d = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1.0);
    let far = d * (1 << 20) as f64;
    let mut coords: Vec<[f64; 2]> = points.to_vec();
    coords.push([c[0] - 3.0 * far, c[1] - far]);
    coords.push([c[0] + 3.0 * far, c[1] - far]);
    coords.push([c[0], c[1] + 3.0 * far]);
    let super_base = n;

    // Triangles stored CCW.
    let ccw = |t: [usize; 3]| -> [usize; 3] {
        if orient2d(coords[t[0]], coords[t[1]], coords[t[2]]) < 0.0 {
            [t[0], t[2], t[1]]
        } else {
            t
        }
    };
    let mut triangles: Vec<[usize; 3]> = vec![ccw([super_base, super_base + 1, super_base + 2])];

    for p in 0..n {
        let pt = coords[p];
        let bad: Vec<usize> = (0..triangles.len())
            .filter(|&ti| {
                let [a, b, cc] = triangles[ti];
                in_circle(coords[a], coords[b], coords[cc], pt) > 0.0
            })
            .collect();
        // Cavity boundary: directed edges of bad triangles whose reverse is
        // not an edge of another bad triangle.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &ti in &bad {
            let [a, b, cc] = triangles[ti];
            for e in [(a, b), (b, cc), (cc, a)] {
                if let Some(pos) = edges.iter().position(|&(u, v)| (v, u) == e) {
                    edges.swap_remove(pos);
                } else {
                    edges.push(e);
                }
            }
        }
        let mut bad_sorted = bad;
        bad_sorted.sort_unstable_by(|a, b| b.cmp(a));
        for ti in bad_sorted {
            triangles.swap_remove(ti);
        }
        for (u, v) in edges {
            triangles.push(ccw([u, v, p]));
        }
    }

    triangles.retain(|t| t.iter().all(|&v| v < super_base));
    if triangles.is_empty() {
        return Err(Error::DegenerateInput("all points are collinear".into()));
    }

    legalize(&coords, &mut triangles);

    let mut out: Vec<[usize; 3]> = triangles
        .into_iter()
        .map(|mut t| {
            t.sort_unstable();
            t
        })
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Lawson flips until every interior edge passes the strict circle test.
/// Deterministic: edges are scanned in sorted order each sweep.
fn legalize(coords: &[[f64; 2]], triangles: &mut Vec<[usize; 3]>) {
    loop {
        // edge (u < v) → indices of adjacent triangles.
        let mut edge_map: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
            std::collections::BTreeMap::new();
        for (ti, t) in triangles.iter().enumerate() {
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (e.0.min(e.1), e.0.max(e.1));
                edge_map.entry(key).or_default().push(ti);
            }
        }
        let mut flipped = false;
        for ((u, v), tis) in &edge_map {
            if tis.len() != 2 {
                continue;
            }
            let (t1, t2) = (triangles[tis[0]], triangles[tis[1]]);
            let c1 = *t1.iter().find(|&&x| x != *u && x != *v).unwrap();
            let c2 = *t2.iter().find(|&&x| x != *u && x != *v).unwrap();
            let ccw1 = order_ccw(coords, [*u, *v, c1]);
            if in_circle(coords[ccw1[0]], coords[ccw1[1]], coords[ccw1[2]], coords[c2]) > 0.0 {
                triangles[tis[0]] = order_ccw(coords, [c1, c2, *u]);
                triangles[tis[1]] = order_ccw(coords, [c1, c2, *v]);
                flipped = true;
                break; // adjacency is stale after a flip; rebuild and rescan
            }
        }
        if !flipped {
            return;
        }
    }
}

fn order_ccw(coords: &[[f64; 2]], t: [usize; 3]) -> [usize; 3] {
    if orient2d(coords[t[0]], coords[t[1]], coords[t[2]]) < 0.0 {
        [t[0], t[2], t[1]]
    } else {
        t
    }
}

/// Delaunay triangulation as a simplicial Lefschetz complex.
pub fn build_delaunay(points: &[[f64; 2]], field: FieldId) -> Result<LefschetzComplex> {
    let triangles: Vec<Vec<usize>> =
        delaunay_triangles(points)?.into_iter().map(|t| t.to_vec()).collect();
    build_simplicial(points.len(), &triangles, field)
}

/// Test support: verifies the strict empty-circumcircle property
/// (no point strictly inside any triangle's circumcircle).
pub fn empty_circumcircle_holds(points: &[[f64; 2]], triangles: &[[usize; 3]]) -> bool {
    for t in triangles {
        let ccw = {
            if orient2d(points[t[0]], points[t[1]], points[t[2]]) < 0.0 {
                [t[0], t[2], t[1]]
            } else {
                *t
            }
        };
        for (p, pt) in points.iter().enumerate() {
            if t.contains(&p) {
                continue;
            }
            if in_circle(points[ccw[0]], points[ccw[1]], points[ccw[2]], *pt) > 0.0 {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_generic_points_give_one_triangle() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.3, 0.8]];
        let tris = delaunay_triangles(&pts).unwrap();
        assert_eq!(tris, vec![[0, 1, 2]]);
        let x = build_delaunay(&pts, FieldId::Q).unwrap();
        assert_eq!(x.n_cells(), 7);
    }

    #[test]
    fn square_gives_two_triangles_sharing_a_diagonal() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]];
        let tris = delaunay_triangles(&pts).unwrap();
        assert_eq!(tris.len(), 2);
        // The two triangles share exactly one edge (the diagonal).
        let shared: Vec<usize> =
            tris[0].iter().filter(|v| tris[1].contains(v)).copied().collect();
        assert_eq!(shared.len(), 2);
        // Cocircular: run twice, expect the identical (deterministic) answer.
        assert_eq!(tris, delaunay_triangles(&pts).unwrap());
    }

    #[test]
    fn collinear_points_rejected() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [3.0, 0.0]];
        assert!(matches!(delaunay_triangles(&pts), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn duplicate_points_rejected() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(matches!(delaunay_triangles(&pts), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn too_few_points_rejected() {
        assert!(matches!(delaunay_triangles(&[[0.0, 0.0], [1.0, 1.0]]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn random_meshes_satisfy_empty_circumcircle() {
        use rand::{Rng, SeedableRng};
        for seed in 0..5u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut pts: Vec<[f64; 2]> =
                (0..120).map(|_| [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)]).collect();
            pts.extend([[-1.5, -1.5], [1.5, -1.5], [-1.5, 1.5], [1.5, 1.5]]);
            let tris = delaunay_triangles(&pts).unwrap();
            assert!(empty_circumcircle_holds(&pts, &tris), "seed {seed} breaks Delaunay property");
            // Euler sanity for a triangulated disk-like region: V - E + F = 1.
            let x = build_delaunay(&pts, FieldId::Q).unwrap();
            let (v, e, f) = (
                x.cells_of_dim(0).len() as i64,
                x.cells_of_dim(1).len() as i64,
                x.cells_of_dim(2).len() as i64,
            );
            assert_eq!(v - e + f, 1, "seed {seed} mesh has holes or overlaps");
        }
    }

    #[test]
    fn triangulation_is_deterministic_across_runs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let pts: Vec<[f64; 2]> =
            (0..60).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
        assert_eq!(delaunay_triangles(&pts).unwrap(), delaunay_triangles(&pts).unwrap());
    }
}
