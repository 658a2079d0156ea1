//! Exact scalar arithmetic over ℚ and GF(p), and sparse column matrices.
//!
//! Everything downstream (homology ranks, connection matrices) is discrete,
//! so all arithmetic here is exact: rationals with arbitrary-precision
//! integers, or residues modulo a prime. No floating point.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::Result;

/// Identifies the coefficient field: the rationals or a prime field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FieldId {
    /// The rational numbers.
    Q,
    /// The prime field GF(p).
    Gf(u64),
}

impl FieldId {
    /// GF(p) for a prime modulus; rejects composite or unit moduli.
    pub fn gf(p: u64) -> Result<FieldId> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(FieldId::Gf(p))
    }

    /// The additive identity of this field.
    pub fn zero(self) -> Scalar {
        self.from_i64(0)
    }

    /// The multiplicative identity of this field.
    pub fn one(self) -> Scalar {
        self.from_i64(1)
    }

    /// Embeds an integer into the field.
    pub fn from_i64(self, n: i64) -> Scalar {
        match self {
            FieldId::Q => Scalar::Rational(BigRational::from_integer(BigInt::from(n))),
            FieldId::Gf(p) => {
                let r = n.rem_euclid(p as i64 as i64);
                // rem_euclid on i64 needs p to fit; moduli above i64::MAX are
                // rejected by is_prime's range in practice, but stay safe:
                let v = if p <= i64::MAX as u64 {
                    (n.rem_euclid(p as i64)) as u64
                } else {
                    let _ = r;
                    (n as i128).rem_euclid(p as i128) as u64
                };
                Scalar::Mod { value: v, p }
            }
        }
    }

    /// Builds num/den in ℚ, or the corresponding residue quotient in GF(p).
    pub fn from_ratio(self, num: i64, den: i64) -> Result<Scalar> {
        if den == 0 {
            return Err(Error::EvalDomain { context: "zero denominator".into() });
        }
        match self {
            FieldId::Q => Ok(Scalar::Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))),
            FieldId::Gf(_) => {
                let d = self.from_i64(den);
                Ok(self.from_i64(num) * d.inverse()?)
            }
        }
    }

    /// Canonical wire name: `"Q"` or `"GF(p)"`.
    pub fn name(self) -> String {
        match self {
            FieldId::Q => "Q".to_string(),
            FieldId::Gf(p) => format!("GF({p})"),
        }
    }

    /// Parses `"Q"`, `"GF(p)"`, or the CLI spelling `"GF:p"`.
    pub fn parse(s: &str) -> Result<FieldId> {
        let t = s.trim();
        if t == "Q" {
            return Ok(FieldId::Q);
        }
        let inner = t
            .strip_prefix("GF(")
            .and_then(|r| r.strip_suffix(')'))
            .or_else(|| t.strip_prefix("GF:"));
        if let Some(ps) = inner {
            let p: u64 = ps
                .trim()
                .parse()
                .map_err(|_| Error::InvalidData(format!("bad field modulus '{ps}'")))?;
            return FieldId::gf(p);
        }
        Err(Error::InvalidData(format!("unknown field '{s}' (expected Q, GF(p), or GF:p)")))
    }
}

impl fmt::Display for FieldId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact field element, tagged with the field it lives in.
#[derive(Clone, Debug)]
pub enum Scalar {
    /// Arbitrary-precision rational.
    Rational(BigRational),
    /// Residue `value` in GF(`p`).
    Mod { value: u64, p: u64 },
}

impl Scalar {
    /// The field this scalar belongs to.
    pub fn field(&self) -> FieldId {
        match self {
            Scalar::Rational(_) => FieldId::Q,
            Scalar::Mod { p, .. } => FieldId::Gf(*p),
        }
    }

    /// True for the additive identity.
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_zero(),
            Scalar::Mod { value, .. } => *value == 0,
        }
    }

    /// True for the multiplicative identity.
    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Rational(r) => r.is_one(),
            Scalar::Mod { value, .. } => *value == 1,
        }
    }

    /// Multiplicative inverse; the one arithmetic op that can fail.
    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::ZeroInverse { field: self.field().name() });
        }
        Ok(match self {
            Scalar::Rational(r) => Scalar::Rational(r.recip()),
            Scalar::Mod { value, p } => Scalar::Mod { value: mod_inverse(*value, *p), p: *p },
        })
    }

    fn assert_same_field(&self, other: &Scalar, op: &str) {
        if self.field() != other.field() {
            panic!(
                "mixed-field arithmetic rejected: {} between {} and {}",
                op,
                self.field(),
                other.field()
            );
        }
    }

    /// Serialized form: `"num/den"` in ℚ, the residue as an integer in GF(p).
    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Scalar::Rational(r) => serde_json::Value::String(format!("{}/{}", r.numer(), r.denom())),
            Scalar::Mod { value, .. } => serde_json::Value::from(*value),
        }
    }

    /// Parses the serialized form back, in the given field.
    pub fn from_json(field: FieldId, v: &serde_json::Value) -> Result<Scalar> {
        match (field, v) {
            (FieldId::Q, serde_json::Value::String(s)) => {
                let (ns, ds) = s.split_once('/').unwrap_or((s.as_str(), "1"));
                let n: BigInt = ns
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidData(format!("bad rational '{s}'")))?;
                let d: BigInt = ds
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidData(format!("bad rational '{s}'")))?;
                if d.is_zero() {
                    return Err(Error::InvalidData(format!("zero denominator in '{s}'")));
                }
                Ok(Scalar::Rational(BigRational::new(n, d)))
            }
            (FieldId::Q, serde_json::Value::Number(n)) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| Error::InvalidData(format!("non-integer rational '{n}'")))?;
                Ok(FieldId::Q.from_i64(i))
            }
            (FieldId::Gf(_), serde_json::Value::Number(n)) => {
                let i = n
                    .as_i64()
                    .ok_or_else(|| Error::InvalidData(format!("bad residue '{n}'")))?;
                Ok(field.from_i64(i))
            }
            (FieldId::Gf(_), serde_json::Value::String(s)) => {
                let i: i64 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidData(format!("bad residue '{s}'")))?;
                Ok(field.from_i64(i))
            }
            _ => Err(Error::InvalidData(format!("scalar {v} does not fit field {field}"))),
        }
    }
}

/// Extended-Euclid inverse of `a` mod prime `p`.
fn mod_inverse(a: u64, p: u64) -> u64 {
    // Iterative extended Euclid on i128 to dodge overflow.
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "inverse of a nonzero residue mod a prime");
    old_s.rem_euclid(p as i128) as u64
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rational(a), Scalar::Rational(b)) => a == b,
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, p: q }) => p == q && a == b,
            _ => false,
        }
    }
}
impl Eq for Scalar {}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        self.assert_same_field(&rhs, "+");
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a + b),
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, .. }) => {
                Scalar::Mod { value: ((a as u128 + b as u128) % p as u128) as u64, p }
            }
            _ => unreachable!(),
        }
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        self + (-rhs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rational(a) => Scalar::Rational(-a),
            Scalar::Mod { value, p } => Scalar::Mod { value: if value == 0 { 0 } else { p - value }, p },
        }
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        self.assert_same_field(&rhs, "*");
        match (self, rhs) {
            (Scalar::Rational(a), Scalar::Rational(b)) => Scalar::Rational(a * b),
            (Scalar::Mod { value: a, p }, Scalar::Mod { value: b, .. }) => {
                Scalar::Mod { value: ((a as u128 * b as u128) % p as u128) as u64, p }
            }
            _ => unreachable!(),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rational(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Scalar::Mod { value, .. } => write!(f, "{value}"),
        }
    }
}

/// Sign of a rational scalar (for rendering); GF(p) residues count as nonnegative.
pub fn scalar_is_negative(s: &Scalar) -> bool {
    match s {
        Scalar::Rational(r) => r.is_negative(),
        Scalar::Mod { .. } => false,
    }
}

/// A sparse matrix stored as sorted nonzero columns over a fixed field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    field: FieldId,
    n_rows: usize,
    n_cols: usize,
    /// `cols[c]` lists `(row, coefficient)` with strictly increasing rows, no zeros.
    cols: Vec<Vec<(usize, Scalar)>>,
}

impl SparseMatrix {
    /// The zero matrix of the given shape.
    pub fn zero(field: FieldId, n_rows: usize, n_cols: usize) -> SparseMatrix {
        SparseMatrix { field, n_rows, n_cols, cols: vec![Vec::new(); n_cols] }
    }

    /// Builds from (row, col, value) triplets; duplicate positions are summed.
    pub fn from_triplets(
        field: FieldId,
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, Scalar)],
    ) -> Result<SparseMatrix> {
        let mut m = SparseMatrix::zero(field, n_rows, n_cols);
        let mut maps: Vec<std::collections::BTreeMap<usize, Scalar>> = vec![Default::default(); n_cols];
        for (r, c, v) in triplets {
            if *r >= n_rows || *c >= n_cols {
                return Err(Error::InvalidData(format!(
                    "triplet ({r}, {c}) outside {n_rows}x{n_cols} matrix"
                )));
            }
            if v.field() != field {
                return Err(Error::InvalidData(format!(
                    "scalar in field {} placed in a {} matrix",
                    v.field(),
                    field
                )));
            }
            match maps[*c].entry(*r) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(v.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let sum = e.get().clone() + v.clone();
                    if sum.is_zero() {
                        e.remove();
                    } else {
                        *e.get_mut() = sum;
                    }
                }
            }
        }
        for (c, map) in maps.into_iter().enumerate() {
            m.cols[c] = map.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        }
        Ok(m)
    }

    /// Convenience: triplets of plain integers embedded into the field.
    pub fn from_int_triplets(
        field: FieldId,
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, i64)],
    ) -> Result<SparseMatrix> {
        let ts: Vec<(usize, usize, Scalar)> =
            triplets.iter().map(|&(r, c, v)| (r, c, field.from_i64(v))).collect();
        SparseMatrix::from_triplets(field, n_rows, n_cols, &ts)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn field(&self) -> FieldId {
        self.field
    }

    /// The stored column, sorted by row.
    pub fn col(&self, c: usize) -> &[(usize, Scalar)] {
        &self.cols[c]
    }

    /// Entry at (r, c); zero when absent.
    pub fn get(&self, r: usize, c: usize) -> Scalar {
        match self.cols[c].binary_search_by_key(&r, |e| e.0) {
            Ok(i) => self.cols[c][i].1.clone(),
            Err(_) => self.field.zero(),
        }
    }

    /// All nonzero entries as (row, col, value).
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, v)| (*r, c, v)))
    }

    /// Number of stored nonzero entries.
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    /// The transpose.
    pub fn transpose(&self) -> SparseMatrix {
        let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.n_rows];
        for c in 0..self.n_cols {
            for (r, v) in &self.cols[c] {
                cols[*r].push((c, v.clone()));
            }
        }
        // Built in increasing column order per row, hence already sorted.
        SparseMatrix { field: self.field, n_rows: self.n_cols, n_cols: self.n_rows, cols }
    }

    /// Matrix product self · rhs.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.field != rhs.field {
            return Err(Error::InvalidData(format!(
                "cannot multiply a {} matrix by a {} matrix",
                self.field, rhs.field
            )));
        }
        if self.n_cols != rhs.n_rows {
            return Err(Error::InvalidData(format!(
                "shape mismatch: {}x{} times {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        let mut out = SparseMatrix::zero(self.field, self.n_rows, rhs.n_cols);
        for j in 0..rhs.n_cols {
            let mut acc: std::collections::BTreeMap<usize, Scalar> = Default::default();
            for (k, w) in &rhs.cols[j] {
                for (i, v) in &self.cols[*k] {
                    let term = v.clone() * w.clone();
                    match acc.entry(*i) {
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(term);
                        }
                        std::collections::btree_map::Entry::Occupied(mut e) => {
                            let sum = e.get().clone() + term;
                            if sum.is_zero() {
                                e.remove();
                            } else {
                                *e.get_mut() = sum;
                            }
                        }
                    }
                }
            }
            out.cols[j] = acc.into_iter().collect();
        }
        Ok(out)
    }

    /// Rank over the matrix's field, by exact column elimination.
    ///
    /// Pivots are chosen at the lowest available row index, so the
    /// elimination path (not just the result) is deterministic.
    pub fn rank(&self) -> usize {
        // pivots: (pivot_row, reduced column), in recording order.
        let mut pivots: Vec<(usize, Vec<(usize, Scalar)>)> = Vec::new();
        for c in 0..self.n_cols {
            let mut v = self.cols[c].clone();
            for (pr, pv) in &pivots {
                if let Ok(i) = v.binary_search_by_key(pr, |e| e.0) {
                    let factor = v[i].1.clone() * pv_pivot_inverse(pv, *pr);
                    v = axpy_neg(&v, &factor, pv);
                }
            }
            if !v.is_empty() {
                pivots.push((v[0].0, v));
            }
        }
        pivots.len()
    }

    /// One algebraic elimination step: removes row `r` and column `c`,
    /// updating every remaining entry by `M[i,j] − M[i,c]·M[r,c]⁻¹·M[r,j]`.
    pub fn reduce_pair(&self, r: usize, c: usize) -> Result<SparseMatrix> {
        if r >= self.n_rows || c >= self.n_cols {
            return Err(Error::InvalidData(format!(
                "pivot ({r}, {c}) outside {}x{} matrix",
                self.n_rows, self.n_cols
            )));
        }
        let pivot = self.get(r, c);
        if pivot.is_zero() {
            return Err(Error::PivotZero { row: r, col: c });
        }
        let pivot_inv = pivot.inverse()?;
        let remap_row = |i: usize| if i < r { i } else { i - 1 };
        let mut out = SparseMatrix::zero(self.field, self.n_rows - 1, self.n_cols - 1);
        let mut out_c = 0;
        for j in 0..self.n_cols {
            if j == c {
                continue;
            }
            let m_rj = self.get(r, j);
            let new_col: Vec<(usize, Scalar)> = if m_rj.is_zero() {
                self.cols[j]
                    .iter()
                    .filter(|(i, _)| *i != r)
                    .map(|(i, v)| (remap_row(*i), v.clone()))
                    .collect()
            } else {
                let factor = pivot_inv.clone() * m_rj;
                axpy_neg(&self.cols[j], &factor, &self.cols[c])
                    .into_iter()
                    .filter(|(i, _)| *i != r)
                    .map(|(i, v)| (remap_row(i), v))
                    .collect()
            };
            out.cols[out_c] = new_col;
            out_c += 1;
        }
        Ok(out)
    }
}

fn pv_pivot_inverse(pv: &[(usize, Scalar)], pr: usize) -> Scalar {
    let i = pv.binary_search_by_key(&pr, |e| e.0).expect("pivot row present in pivot column");
    pv[i].1.inverse().expect("pivot entries are nonzero")
}

/// Sparse merge computing `a − factor · b` over sorted columns.
fn axpy_neg(
    a: &[(usize, Scalar)],
    factor: &Scalar,
    b: &[(usize, Scalar)],
) -> Vec<(usize, Scalar)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some((ra, va)), Some((rb, vb))) if ra == rb => {
                let v = va.clone() - factor.clone() * vb.clone();
                if !v.is_zero() {
                    out.push((*ra, v));
                }
                i += 1;
                j += 1;
            }
            (Some((ra, va)), Some((rb, _))) if ra < rb => {
                out.push((*ra, va.clone()));
                i += 1;
            }
            (Some(_), Some((rb, vb))) => {
                let v = -(factor.clone() * vb.clone());
                if !v.is_zero() {
                    out.push((*rb, v));
                }
                j += 1;
            }
            (Some((ra, va)), None) => {
                out.push((*ra, va.clone()));
                i += 1;
            }
            (None, Some((rb, vb))) => {
                let v = -(factor.clone() * vb.clone());
                if !v.is_zero() {
                    out.push((*rb, v));
                }
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Scalar {
        FieldId::Q.from_ratio(n, d).unwrap()
    }

    #[test]
    fn rational_inverse() {
        assert_eq!(q(2, 3).inverse().unwrap(), q(3, 2));
    }

    #[test]
    fn gf7_inverse_of_three_is_five() {
        let f = FieldId::gf(7).unwrap();
        assert_eq!(f.from_i64(3).inverse().unwrap(), f.from_i64(5));
    }

    #[test]
    fn gf2_one_is_its_own_inverse() {
        let f = FieldId::gf(2).unwrap();
        assert_eq!(f.from_i64(1).inverse().unwrap(), f.from_i64(1));
    }

    #[test]
    fn zero_has_no_inverse_in_either_field() {
        assert!(matches!(FieldId::Q.zero().inverse(), Err(Error::ZeroInverse { .. })));
        let f = FieldId::gf(2).unwrap();
        assert!(matches!(f.zero().inverse(), Err(Error::ZeroInverse { .. })));
    }

    #[test]
    fn composite_modulus_rejected() {
        assert!(matches!(FieldId::gf(6), Err(Error::NotPrime(6))));
        assert!(matches!(FieldId::gf(1), Err(Error::NotPrime(1))));
        assert!(FieldId::gf(2).is_ok());
        assert!(FieldId::gf(97).is_ok());
    }

    #[test]
    fn gf2_characteristic_two() {
        let f = FieldId::gf(2).unwrap();
        assert!((f.one() + f.one()).is_zero());
    }

    #[test]
    #[should_panic(expected = "mixed-field")]
    fn mixed_field_addition_panics() {
        let _ = FieldId::Q.one() + FieldId::gf(2).unwrap().one();
    }

    #[test]
    fn scalars_in_different_fields_compare_unequal() {
        assert_ne!(FieldId::Q.one(), FieldId::gf(2).unwrap().one());
        assert_ne!(FieldId::gf(2).unwrap().one(), FieldId::gf(3).unwrap().one());
    }

    #[test]
    fn scalar_json_round_trip() {
        let a = q(-7, 12);
        assert_eq!(Scalar::from_json(FieldId::Q, &a.to_json()).unwrap(), a);
        let f = FieldId::gf(5).unwrap();
        let b = f.from_i64(-3); // residue 2
        assert_eq!(b, f.from_i64(2));
        assert_eq!(Scalar::from_json(f, &b.to_json()).unwrap(), b);
    }

    #[test]
    fn identity_matrix_has_full_rank() {
        let m = SparseMatrix::from_int_triplets(FieldId::Q, 2, 2, &[(0, 0, 1), (1, 1, 1)]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(SparseMatrix::zero(FieldId::Q, 3, 4).rank(), 0);
    }

    #[test]
    fn all_ones_over_gf2_has_rank_one() {
        let f = FieldId::gf(2).unwrap();
        let m = SparseMatrix::from_int_triplets(f, 2, 2, &[(0, 0, 1), (0, 1, 1), (1, 0, 1), (1, 1, 1)])
            .unwrap();
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn reduce_pair_on_one_by_one_gives_empty() {
        let m = SparseMatrix::from_int_triplets(FieldId::Q, 1, 1, &[(0, 0, 1)]).unwrap();
        let r = m.reduce_pair(0, 0).unwrap();
        assert_eq!((r.n_rows(), r.n_cols()), (0, 0));
    }

    #[test]
    fn reduce_pair_leaves_untouched_entry() {
        // [[1,1],[0,1]]: eliminating (0,0) leaves the (1,1) entry unchanged.
        let m = SparseMatrix::from_int_triplets(FieldId::Q, 2, 2, &[(0, 0, 1), (0, 1, 1), (1, 1, 1)])
            .unwrap();
        let r = m.reduce_pair(0, 0).unwrap();
        assert_eq!((r.n_rows(), r.n_cols()), (1, 1));
        assert_eq!(r.get(0, 0), FieldId::Q.from_i64(1));
    }

    #[test]
    fn reduce_pair_applies_update_formula() {
        // [[2,4],[1,3]] over Q, pivot (0,0): survivor is 3 - 1*(1/2)*4 = 1.
        let m = SparseMatrix::from_int_triplets(
            FieldId::Q,
            2,
            2,
            &[(0, 0, 2), (0, 1, 4), (1, 0, 1), (1, 1, 3)],
        )
        .unwrap();
        let r = m.reduce_pair(0, 0).unwrap();
        assert_eq!(r.get(0, 0), FieldId::Q.from_i64(1));
    }

    #[test]
    fn reduce_pair_rejects_zero_pivot() {
        let m = SparseMatrix::from_int_triplets(FieldId::Q, 2, 2, &[(0, 0, 1), (1, 1, 1)]).unwrap();
        assert!(matches!(m.reduce_pair(0, 1), Err(Error::PivotZero { row: 0, col: 1 })));
    }

    #[test]
    fn transpose_swaps_shape_and_entries() {
        let m = SparseMatrix::from_int_triplets(FieldId::Q, 2, 3, &[(0, 2, 5), (1, 0, -1)]).unwrap();
        let t = m.transpose();
        assert_eq!((t.n_rows(), t.n_cols()), (3, 2));
        assert_eq!(t.get(2, 0), FieldId::Q.from_i64(5));
        assert_eq!(t.get(0, 1), FieldId::Q.from_i64(-1));
    }

    #[test]
    fn matrix_product_matches_hand_computation() {
        // [[1,2],[0,1]] * [[1,0],[3,1]] = [[7,2],[3,1]]
        let a = SparseMatrix::from_int_triplets(FieldId::Q, 2, 2, &[(0, 0, 1), (0, 1, 2), (1, 1, 1)])
            .unwrap();
        let b = SparseMatrix::from_int_triplets(FieldId::Q, 2, 2, &[(0, 0, 1), (1, 0, 3), (1, 1, 1)])
            .unwrap();
        let c = a.mul(&b).unwrap();
        assert_eq!(c.get(0, 0), FieldId::Q.from_i64(7));
        assert_eq!(c.get(0, 1), FieldId::Q.from_i64(2));
        assert_eq!(c.get(1, 0), FieldId::Q.from_i64(3));
        assert_eq!(c.get(1, 1), FieldId::Q.from_i64(1));
    }

    // --- property tests ---

    /// Random scalar in a field, drawn from small integers and ratios.
    fn arb_scalar(field: FieldId) -> impl Strategy<Value = Scalar> {
        (-12i64..=12, 1i64..=9).prop_map(move |(n, d)| match field {
            FieldId::Q => FieldId::Q.from_ratio(n, d).unwrap(),
            f => f.from_i64(n),
        })
    }

    fn arb_matrix(field: FieldId) -> impl Strategy<Value = SparseMatrix> {
        (1usize..=5, 1usize..=5).prop_flat_map(move |(nr, nc)| {
            proptest::collection::vec(
                ((0..nr), (0..nc), arb_scalar(field)),
                0..=(nr * nc),
            )
            .prop_map(move |ts| SparseMatrix::from_triplets(field, nr, nc, &ts).unwrap())
        })
    }

    proptest! {
        #[test]
        fn field_axioms_rational(a in arb_scalar(FieldId::Q), b in arb_scalar(FieldId::Q), c in arb_scalar(FieldId::Q)) {
            prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            if !a.is_zero() {
                prop_assert!((a.clone() * a.inverse().unwrap()).is_one());
            }
            prop_assert!((a.clone() - a).is_zero());
        }

        #[test]
        fn field_axioms_gf5(a in arb_scalar(FieldId::Gf(5)), b in arb_scalar(FieldId::Gf(5)), c in arb_scalar(FieldId::Gf(5))) {
            prop_assert_eq!((a.clone() + b.clone()) + c.clone(), a.clone() + (b.clone() + c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            if !a.is_zero() {
                prop_assert!((a.clone() * a.inverse().unwrap()).is_one());
            }
        }

        #[test]
        fn rank_equals_rank_of_transpose_q(m in arb_matrix(FieldId::Q)) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn rank_equals_rank_of_transpose_gf2(m in arb_matrix(FieldId::Gf(2))) {
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }

        #[test]
        fn reduce_pair_drops_rank_by_exactly_one(m in arb_matrix(FieldId::Q)) {
            // Any valid pivot: rank(M) = rank(M') + 1.
            let pivots: Vec<(usize, usize)> =
                m.entries().map(|(r, c, _)| (r, c)).collect();
            for (r, c) in pivots {
                let reduced = m.reduce_pair(r, c).unwrap();
                prop_assert_eq!(m.rank(), reduced.rank() + 1);
            }
        }
    }
}
