//! Deterministic exact linear algebra over the coefficient field.
//!
//! Vectors are dense coefficient arrays over [`CoeffField`]; subspaces are
//! kept in reduced row echelon form with the lowest-index pivot convention,
//! so a subspace has exactly one representation and bases can be compared
//! with `==`.

use thiserror::Error;

use crate::fields::{CoeffField, KScalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("vectors of mixed lengths: expected {expected}, got {got}")]
    MixedLengths { expected: usize, got: usize },
}

/// A dense vector over the coefficient field.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct KVector {
    coeffs: Vec<KScalar>,
}

impl KVector {
    pub fn new(coeffs: Vec<KScalar>) -> KVector {
        KVector { coeffs }
    }

    pub fn zero(cf: &CoeffField, len: usize) -> KVector {
        KVector { coeffs: vec![cf.zero(); len] }
    }

    /// The standard basis vector `e_i`.
    pub fn basis(cf: &CoeffField, len: usize, i: usize) -> KVector {
        let mut v = KVector::zero(cf, len);
        v.coeffs[i] = cf.one();
        v
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[KScalar] {
        &self.coeffs
    }

    pub fn get(&self, i: usize) -> KScalar {
        self.coeffs[i]
    }

    pub fn set(&mut self, i: usize, value: KScalar) {
        self.coeffs[i] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.value() == 0)
    }

    pub fn leading_index(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| c.value() != 0)
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|c| c.value() != 0).count()
    }

    pub fn scale_assign(&mut self, cf: &CoeffField, s: KScalar) {
        for c in self.coeffs.iter_mut() {
            *c = cf.mul(*c, s);
        }
    }

    /// `self += s * other`.
    pub fn add_scaled_assign(&mut self, cf: &CoeffField, other: &KVector, s: KScalar) {
        debug_assert_eq!(self.len(), other.len());
        if s.value() == 0 {
            return;
        }
        for (c, o) in self.coeffs.iter_mut().zip(other.coeffs.iter()) {
            *c = cf.add(*c, cf.mul(*o, s));
        }
    }

    pub fn add(&self, cf: &CoeffField, other: &KVector) -> KVector {
        let mut out = self.clone();
        out.add_scaled_assign(cf, other, cf.one());
        out
    }

    /// The standard dot product; this is the invariant bilinear form when the
    /// coordinates are coset coefficients.
    pub fn dot(&self, cf: &CoeffField, other: &KVector) -> KScalar {
        assert_eq!(self.len(), other.len(), "dot product needs equal lengths");
        let mut acc = cf.zero();
        for (a, b) in self.coeffs.iter().zip(other.coeffs.iter()) {
            acc = cf.add(acc, cf.mul(*a, *b));
        }
        acc
    }
}

/// The canonical reduced row echelon basis of a subspace.
///
/// Invariants: pivot columns strictly increase, every pivot entry is 1, and
/// pivot columns are zero elsewhere.  Two `SubspaceBasis` values are equal
/// exactly when they span the same subspace.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SubspaceBasis {
    ambient: usize,
    rows: Vec<KVector>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn empty(ambient: usize) -> SubspaceBasis {
        SubspaceBasis { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(cf: &CoeffField, ambient: usize) -> SubspaceBasis {
        let rows = (0..ambient).map(|i| KVector::basis(cf, ambient, i)).collect();
        SubspaceBasis { ambient, rows, pivots: (0..ambient).collect() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rows(&self) -> &[KVector] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduce `v` against the basis; the result is zero iff `v` lies in the
    /// spanned subspace.
    pub fn reduce(&self, cf: &CoeffField, v: &KVector) -> KVector {
        assert_eq!(v.len(), self.ambient, "reduce needs a vector of ambient length");
        let mut w = v.clone();
        for (row, &p) in self.rows.iter().zip(self.pivots.iter()) {
            let c = w.get(p);
            if c.value() != 0 {
                w.add_scaled_assign(cf, row, cf.neg(c));
            }
        }
        w
    }

    pub fn contains(&self, cf: &CoeffField, v: &KVector) -> bool {
        self.reduce(cf, v).is_zero()
    }

    pub fn is_subspace_of(&self, cf: &CoeffField, other: &SubspaceBasis) -> bool {
        self.rows.iter().all(|r| other.contains(cf, r))
    }

    /// Insert a vector, keeping full reduced echelon form.  Returns true if
    /// the vector enlarged the subspace; in that case the inserted canonical
    /// row is appended to `added`, when provided.
    fn insert(&mut self, cf: &CoeffField, v: &KVector, added: Option<&mut Vec<KVector>>) -> bool {
        let mut w = self.reduce(cf, v);
        let Some(pivot) = w.leading_index() else {
            return false;
        };
        let lead = w.get(pivot);
        if lead != cf.one() {
            w.scale_assign(cf, cf.inv(lead));
        }
        // Clear the new pivot column in the existing rows.
        for row in self.rows.iter_mut() {
            let c = row.get(pivot);
            if c.value() != 0 {
                row.add_scaled_assign(cf, &w, cf.neg(c));
            }
        }
        let pos = self.pivots.partition_point(|&p| p < pivot);
        if let Some(list) = added {
            list.push(w.clone());
        }
        self.rows.insert(pos, w);
        self.pivots.insert(pos, pivot);
        true
    }
}

/// Canonical reduced echelon basis of the span of `vectors`.
pub fn echelonize(cf: &CoeffField, vectors: &[KVector]) -> Result<SubspaceBasis, LinalgError> {
    let ambient = vectors.first().map_or(0, |v| v.len());
    let mut basis = SubspaceBasis::empty(ambient);
    for v in vectors {
        if v.len() != ambient {
            return Err(LinalgError::MixedLengths { expected: ambient, got: v.len() });
        }
        basis.insert(cf, v, None);
    }
    Ok(basis)
}

/// Membership of `v` in the span of `basis`.
pub fn member(cf: &CoeffField, v: &KVector, basis: &SubspaceBasis) -> bool {
    basis.contains(cf, v)
}

/// Smallest subspace containing `seeds` and closed under every action.
///
/// Actions are linear endomorphisms of the ambient space given as
/// vector-to-vector functions.  The worklist runs in seed order, then action
/// order, then discovery order, so the result is deterministic; closure is
/// verified by one final pass over the basis.
pub fn spin(
    cf: &CoeffField,
    seeds: &[KVector],
    actions: &[&dyn Fn(&KVector) -> KVector],
) -> SubspaceBasis {
    let ambient = seeds.first().map_or(0, |v| v.len());
    let mut basis = SubspaceBasis::empty(ambient);
    let mut queue: std::collections::VecDeque<KVector> = std::collections::VecDeque::new();
    let mut added = Vec::new();
    for s in seeds {
        assert_eq!(s.len(), ambient, "spin seeds must share a length");
        basis.insert(cf, s, Some(&mut added));
        queue.extend(added.drain(..));
    }
    while let Some(v) = queue.pop_front() {
        for action in actions {
            let image = action(&v);
            assert_eq!(image.len(), ambient, "actions must preserve the ambient dimension");
            basis.insert(cf, &image, Some(&mut added));
            queue.extend(added.drain(..));
        }
    }
    for row in basis.rows() {
        for action in actions {
            assert!(basis.contains(cf, &action(row)), "spin result must be action-closed");
        }
    }
    basis
}

/// Rank of the matrix `[form(a_i, b_j)]` over the coefficient field.
///
/// This equals `dim(a) - dim(a intersect perp(b))`, the dimension of the
/// image of `a` in the pairing with `b`.
pub fn pairing_rank<F>(cf: &CoeffField, a: &SubspaceBasis, b: &SubspaceBasis, form: F) -> usize
where
    F: Fn(&KVector, &KVector) -> KScalar,
{
    assert_eq!(a.ambient_dim(), b.ambient_dim(), "pairing needs a common ambient space");
    let rows: Vec<Vec<KScalar>> = a
        .rows()
        .iter()
        .map(|ai| b.rows().iter().map(|bj| form(ai, bj)).collect())
        .collect();
    matrix_rank(cf, rows)
}

/// Rank of a dense matrix over the coefficient field, by Gaussian elimination
/// with the lowest-index pivot rule.
#[allow(clippy::needless_range_loop)] // in-place elimination reads and writes by index
pub fn matrix_rank(cf: &CoeffField, mut rows: Vec<Vec<KScalar>>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    for r in &rows {
        assert_eq!(r.len(), ncols, "rank needs a rectangular matrix");
    }
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| rows[r][col].value() != 0) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = cf.inv(rows[rank][col]);
        for c in col..ncols {
            rows[rank][c] = cf.mul(rows[rank][c], inv);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col].value() != 0 {
                let factor = rows[r][col];
                for c in col..ncols {
                    let sub = cf.mul(factor, rows[rank][c]);
                    rows[r][c] = cf.sub(rows[r][c], sub);
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// Orthogonal complement with respect to the standard form on the coset
/// basis.  `dim(b) + dim(perp(b))` is the ambient dimension, and
/// `perp(perp(b)) = b`.
pub fn perp(cf: &CoeffField, basis: &SubspaceBasis) -> SubspaceBasis {
    let n = basis.ambient_dim();
    let pivots = basis.pivots();
    let mut kernel = Vec::with_capacity(n - basis.dim());
    let mut is_pivot = vec![false; n];
    for &p in pivots {
        is_pivot[p] = true;
    }
    for (j, _) in is_pivot.iter().enumerate().filter(|(_, &p)| !p) {
        let mut w = KVector::zero(cf, n);
        w.set(j, cf.one());
        for (row, &p) in basis.rows().iter().zip(pivots.iter()) {
            w.set(p, cf.neg(row.get(j)));
        }
        kernel.push(w);
    }
    echelonize(cf, &kernel).expect("kernel vectors share the ambient length")
}

/// Intersection of two subspaces (Zassenhaus), independent of any bilinear
/// form.
pub fn intersect(cf: &CoeffField, a: &SubspaceBasis, b: &SubspaceBasis) -> SubspaceBasis {
    assert_eq!(a.ambient_dim(), b.ambient_dim(), "intersection needs a common ambient space");
    let n = a.ambient_dim();
    // Rows [a_i | a_i] and [b_j | 0]; after elimination, rows whose left half
    // vanished carry intersection vectors in the right half.
    let mut block = SubspaceBasis::empty(2 * n);
    for ai in a.rows() {
        let mut row = Vec::with_capacity(2 * n);
        row.extend_from_slice(ai.coeffs());
        row.extend_from_slice(ai.coeffs());
        block.insert(cf, &KVector::new(row), None);
    }
    let mut out = Vec::new();
    for bj in b.rows() {
        let mut row = Vec::with_capacity(2 * n);
        row.extend_from_slice(bj.coeffs());
        row.extend(std::iter::repeat_n(cf.zero(), n));
        let reduced = block.reduce(cf, &KVector::new(row));
        let left_zero = reduced.coeffs()[..n].iter().all(|c| c.value() == 0);
        if left_zero {
            out.push(KVector::new(reduced.coeffs()[n..].to_vec()));
        } else {
            block.insert(cf, &reduced, None);
        }
    }
    echelonize(cf, &out).expect("intersection vectors share the ambient length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::CoeffField;

    fn f3() -> CoeffField {
        CoeffField::new(2, 3).unwrap()
    }

    fn vec_of(cf: &CoeffField, vals: &[u64]) -> KVector {
        KVector::new(vals.iter().map(|&v| cf.scalar(v).unwrap()).collect())
    }

    #[test]
    fn echelonize_zero_vector() {
        let cf = f3();
        let basis = echelonize(&cf, &[KVector::zero(&cf, 4)]).unwrap();
        assert_eq!(basis.dim(), 0);
        assert_eq!(basis.ambient_dim(), 4);
    }

    #[test]
    fn echelonize_standard_basis() {
        let cf = f3();
        let vecs: Vec<KVector> = (0..5).map(|i| KVector::basis(&cf, 5, i)).collect();
        let basis = echelonize(&cf, &vecs).unwrap();
        assert_eq!(basis.dim(), 5);
        assert_eq!(basis, SubspaceBasis::full(&cf, 5));
    }

    #[test]
    fn echelonize_scalar_dependence() {
        let cf = f3();
        let v = vec_of(&cf, &[1, 2, 0]);
        let two_v = vec_of(&cf, &[2, 1, 0]);
        let basis = echelonize(&cf, &[v.clone(), two_v]).unwrap();
        assert_eq!(basis.dim(), 1);
        assert!(basis.contains(&cf, &v));
    }

    #[test]
    fn echelonize_rejects_mixed_lengths() {
        let cf = f3();
        let err = echelonize(&cf, &[KVector::zero(&cf, 2), KVector::zero(&cf, 3)]).unwrap_err();
        assert_eq!(err, LinalgError::MixedLengths { expected: 2, got: 3 });
    }

    #[test]
    fn membership_basics() {
        let cf = f3();
        let e1 = KVector::basis(&cf, 3, 0);
        let e2 = KVector::basis(&cf, 3, 1);
        let span_e2 = echelonize(&cf, std::slice::from_ref(&e2)).unwrap();
        assert!(member(&cf, &KVector::zero(&cf, 3), &span_e2));
        assert!(!member(&cf, &e1, &span_e2));
        let v = vec_of(&cf, &[1, 2, 1]);
        let w = vec_of(&cf, &[0, 1, 1]);
        let basis = echelonize(&cf, &[v.clone(), w]).unwrap();
        assert!(member(&cf, &v, &basis));
    }

    #[test]
    fn spin_identity_and_cycle() {
        let cf = f3();
        let v = vec_of(&cf, &[1, 1, 0, 0]);
        let id = |x: &KVector| x.clone();
        let basis = spin(&cf, std::slice::from_ref(&v), &[&id]);
        assert_eq!(basis.dim(), 1);
        assert!(basis.contains(&cf, &v));

        let shift = |x: &KVector| {
            let mut out = x.coeffs().to_vec();
            out.rotate_right(1);
            KVector::new(out)
        };
        let basis = spin(&cf, &[KVector::basis(&cf, 4, 0)], &[&shift]);
        assert_eq!(basis.dim(), 4, "a transitive action spins e_1 to the whole space");
    }

    #[test]
    fn pairing_rank_full_and_orthogonal() {
        let cf = f3();
        let full = SubspaceBasis::full(&cf, 4);
        let dot = |a: &KVector, b: &KVector| a.dot(&cf, b);
        assert_eq!(pairing_rank(&cf, &full, &full, dot), 4);

        let a = echelonize(&cf, &[KVector::basis(&cf, 4, 0)]).unwrap();
        let b = echelonize(&cf, &[KVector::basis(&cf, 4, 2), KVector::basis(&cf, 4, 3)]).unwrap();
        assert_eq!(pairing_rank(&cf, &a, &b, dot), 0);
    }

    #[test]
    fn pairing_rank_steinberg_gram_example() {
        // I + J over F_2, size 3: rank 2.
        let cf = CoeffField::new(3, 2).unwrap();
        let rows: Vec<Vec<KScalar>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| cf.from_int(if i == j { 2 } else { 1 }))
                    .collect()
            })
            .collect();
        assert_eq!(matrix_rank(&cf, rows), 2);
    }

    #[test]
    fn perp_involution_and_dims() {
        let cf = f3();
        let full = SubspaceBasis::full(&cf, 4);
        assert_eq!(perp(&cf, &full).dim(), 0);
        assert_eq!(perp(&cf, &SubspaceBasis::empty(4)).dim(), 4);

        let e1 = echelonize(&cf, &[KVector::basis(&cf, 4, 0)]).unwrap();
        let p = perp(&cf, &e1);
        assert_eq!(p.dim(), 3);
        let expected =
            echelonize(&cf, &(1..4).map(|i| KVector::basis(&cf, 4, i)).collect::<Vec<_>>())
                .unwrap();
        assert_eq!(p, expected);

        let mixed = echelonize(&cf, &[vec_of(&cf, &[1, 2, 0, 1]), vec_of(&cf, &[0, 1, 1, 1])]).unwrap();
        let pp = perp(&cf, &perp(&cf, &mixed));
        assert_eq!(pp, mixed, "perp is an involution");
        assert_eq!(mixed.dim() + perp(&cf, &mixed).dim(), 4);
    }

    #[test]
    fn intersect_agrees_with_pairing_rank() {
        let cf = f3();
        let a = echelonize(&cf, &[vec_of(&cf, &[1, 0, 1, 0]), vec_of(&cf, &[0, 1, 0, 2])]).unwrap();
        let b = echelonize(&cf, &[vec_of(&cf, &[1, 1, 1, 2]), vec_of(&cf, &[0, 0, 1, 1])]).unwrap();
        let meet = intersect(&cf, &a, &b);
        for row in meet.rows() {
            assert!(a.contains(&cf, row));
            assert!(b.contains(&cf, row));
        }
        // dim(a cap perp(b)) two ways: directly, and via dim(a) - pairing_rank(a, b).
        let pb = perp(&cf, &b);
        let direct = intersect(&cf, &a, &pb).dim();
        let dot = |x: &KVector, y: &KVector| x.dot(&cf, y);
        let via_rank = a.dim() - pairing_rank(&cf, &a, &b, dot);
        assert_eq!(direct, via_rank);
    }

    #[test]
    fn rref_is_canonical() {
        let cf = f3();
        let v1 = vec_of(&cf, &[1, 2, 1, 0]);
        let v2 = vec_of(&cf, &[2, 1, 0, 1]);
        let v3 = v1.add(&cf, &v2);
        let b1 = echelonize(&cf, &[v1.clone(), v2.clone(), v3.clone()]).unwrap();
        let b2 = echelonize(&cf, &[v3, v2, v1]).unwrap();
        assert_eq!(b1, b2, "bases of the same span are identical row lists");
        for (row, &p) in b1.rows().iter().zip(b1.pivots()) {
            assert_eq!(row.get(p), cf.one());
        }
        let pivots = b1.pivots();
        assert!(pivots.windows(2).all(|w| w[0] < w[1]));
    }
}
