//! Concrete split BN-pair data for `GL_n(q)` and `SL_2(q)`.
//!
//! The provider fixes, once and for all per instance:
//!
//! * the Weyl group as permutations of `{0..n-1}` with 0/1 monomial
//!   representatives `n_w` (so `V = n_0^{-1} U n_0` is the lower
//!   unitriangular group),
//! * the sharp Bruhat decomposition `g = b n_w u` with `b` upper triangular
//!   and `u` supported on the inversion positions of `w`,
//! * canonical labels for the `B`-cosets of `G` (the flags), enumerated cell
//!   by cell in Weyl order, and
//! * a small verified generating set used for spinning submodules.
//!
//! Canonical coset representatives come from column reduction by
//! right-multiplication with upper-triangular matrices: pivots are the
//! bottom-most nonzero entry per column, normalized to 1.  The Bruhat triple
//! comes from the mirror row reduction.  For the `SL_2` provider the coset
//! representative is additionally rescaled in its last column to determinant
//! one, so representatives stay inside the group's matrix model.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::fields::{FieldDesc, FqElem};
use crate::rng::SplitMix64;

/// Cosets per instance are capped to keep everything at desk scale.
pub const MAX_COSETS: usize = 10_000;

/// Cap on the enumerated subgroup tables (`U`, `H`).
pub const MAX_SUBGROUP: u64 = 1 << 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BnError {
    #[error("matrix is singular")]
    Singular,
    #[error("rank must be at least 2, got n = {0}")]
    DimensionTooSmall(usize),
    #[error("instance has {count} cosets, beyond the supported {limit}")]
    TooManyCosets { count: u64, limit: usize },
    #[error("subgroup enumeration of size {count} is beyond the supported {limit}")]
    SubgroupTooLarge { count: u64, limit: u64 },
    #[error("group enumeration exceeded the limit {0}")]
    GroupTooLarge(usize),
    #[error("matrix size {got} does not match the provider rank {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

/// An invertible `n x n` matrix over the structure field, row-major.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GroupElement {
    n: usize,
    entries: Vec<FqElem>,
}

impl GroupElement {
    pub fn identity(fd: &FieldDesc, n: usize) -> GroupElement {
        let mut entries = vec![fd.zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = fd.one();
        }
        GroupElement { n, entries }
    }

    /// Build a matrix from row-major integer encodings.
    pub fn from_rows(fd: &FieldDesc, rows: &[Vec<u64>]) -> Result<GroupElement, crate::fields::FieldError> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            assert_eq!(row.len(), n, "matrix must be square");
            for &v in row {
                entries.push(fd.elem(v)?);
            }
        }
        Ok(GroupElement { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> FqElem {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set_entry(&mut self, i: usize, j: usize, v: FqElem) {
        self.entries[i * self.n + j] = v;
    }

    pub fn mul(&self, fd: &FieldDesc, other: &GroupElement) -> GroupElement {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = GroupElement { n, entries: vec![fd.zero(); n * n] };
        for i in 0..n {
            for k in 0..n {
                let a = self.entry(i, k);
                if a.value() == 0 {
                    continue;
                }
                for j in 0..n {
                    let cur = out.entry(i, j);
                    out.set_entry(i, j, fd.add(cur, fd.mul(a, other.entry(k, j))));
                }
            }
        }
        out
    }

    pub fn transpose(&self, _fd: &FieldDesc) -> GroupElement {
        let n = self.n;
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j];
            }
        }
        out
    }

    pub fn det(&self, fd: &FieldDesc) -> FqElem {
        let n = self.n;
        let mut m = self.clone();
        let mut det = fd.one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| m.entry(r, col).value() != 0) else {
                return fd.zero();
            };
            if pivot != col {
                for j in 0..n {
                    let a = m.entry(col, j);
                    let b = m.entry(pivot, j);
                    m.set_entry(col, j, b);
                    m.set_entry(pivot, j, a);
                }
                det = fd.neg(det);
            }
            let p = m.entry(col, col);
            det = fd.mul(det, p);
            let inv = fd.inv(p);
            for r in col + 1..n {
                let factor = fd.mul(m.entry(r, col), inv);
                if factor.value() == 0 {
                    continue;
                }
                for j in col..n {
                    let sub = fd.mul(factor, m.entry(col, j));
                    let cur = m.entry(r, j);
                    m.set_entry(r, j, fd.sub(cur, sub));
                }
            }
        }
        det
    }

    pub fn inverse(&self, fd: &FieldDesc) -> Option<GroupElement> {
        let n = self.n;
        let mut m = self.clone();
        let mut inv = GroupElement::identity(fd, n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| m.entry(r, col).value() != 0)?;
            if pivot != col {
                for j in 0..n {
                    let (a, b) = (m.entry(col, j), m.entry(pivot, j));
                    m.set_entry(col, j, b);
                    m.set_entry(pivot, j, a);
                    let (a, b) = (inv.entry(col, j), inv.entry(pivot, j));
                    inv.set_entry(col, j, b);
                    inv.set_entry(pivot, j, a);
                }
            }
            let scale = fd.inv(m.entry(col, col));
            for j in 0..n {
                m.set_entry(col, j, fd.mul(m.entry(col, j), scale));
                inv.set_entry(col, j, fd.mul(inv.entry(col, j), scale));
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = m.entry(r, col);
                if factor.value() == 0 {
                    continue;
                }
                for j in 0..n {
                    let sub = fd.mul(factor, m.entry(col, j));
                    let cur = m.entry(r, j);
                    m.set_entry(r, j, fd.sub(cur, sub));
                    let sub = fd.mul(factor, inv.entry(col, j));
                    let cur = inv.entry(r, j);
                    inv.set_entry(r, j, fd.sub(cur, sub));
                }
            }
        }
        Some(inv)
    }

    pub fn is_upper_triangular_invertible(&self, _fd: &FieldDesc) -> bool {
        let n = self.n;
        (0..n).all(|i| self.entry(i, i).value() != 0)
            && (0..n).all(|i| (0..i).all(|j| self.entry(i, j).value() == 0))
    }

    pub fn is_upper_unitriangular(&self, fd: &FieldDesc) -> bool {
        let n = self.n;
        (0..n).all(|i| self.entry(i, i) == fd.one())
            && (0..n).all(|i| (0..i).all(|j| self.entry(i, j).value() == 0))
    }

    pub fn is_lower_unitriangular(&self, fd: &FieldDesc) -> bool {
        let n = self.n;
        (0..n).all(|i| self.entry(i, i) == fd.one())
            && (0..n).all(|i| (i + 1..n).all(|j| self.entry(i, j).value() == 0))
    }

    pub fn is_diagonal_invertible(&self, _fd: &FieldDesc) -> bool {
        let n = self.n;
        (0..n).all(|i| self.entry(i, i).value() != 0)
            && (0..n).all(|i| (0..n).all(|j| i == j || self.entry(i, j).value() == 0))
    }

    fn scale_row(&mut self, fd: &FieldDesc, i: usize, s: FqElem) {
        for j in 0..self.n {
            let v = self.entry(i, j);
            self.set_entry(i, j, fd.mul(v, s));
        }
    }

    fn scale_col(&mut self, fd: &FieldDesc, j: usize, s: FqElem) {
        for i in 0..self.n {
            let v = self.entry(i, j);
            self.set_entry(i, j, fd.mul(v, s));
        }
    }

    /// `row_i -= f * row_k`
    fn row_sub_scaled(&mut self, fd: &FieldDesc, i: usize, k: usize, f: FqElem) {
        for j in 0..self.n {
            let sub = fd.mul(f, self.entry(k, j));
            let cur = self.entry(i, j);
            self.set_entry(i, j, fd.sub(cur, sub));
        }
    }

    /// `col_j -= f * col_k`
    fn col_sub_scaled(&mut self, fd: &FieldDesc, j: usize, k: usize, f: FqElem) {
        for i in 0..self.n {
            let sub = fd.mul(f, self.entry(i, k));
            let cur = self.entry(i, j);
            self.set_entry(i, j, fd.sub(cur, sub));
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// A Weyl group element: a permutation of `{0..n-1}` with its inversion
/// length and the 0/1 monomial representative `n_w`.
#[derive(Clone, Debug)]
pub struct WeylElem {
    perm: Vec<usize>,
    inv_perm: Vec<usize>,
    length: usize,
    rep: GroupElement,
}

impl WeylElem {
    fn new(fd: &FieldDesc, perm: Vec<usize>) -> WeylElem {
        let n = perm.len();
        let mut inv_perm = vec![0; n];
        for (j, &i) in perm.iter().enumerate() {
            inv_perm[i] = j;
        }
        let length = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| perm[i] > perm[j])
            .count();
        let mut rep = GroupElement { n, entries: vec![fd.zero(); n * n] };
        for (j, &pj) in perm.iter().enumerate() {
            rep.set_entry(pj, j, fd.one());
        }
        WeylElem { perm, inv_perm, length, rep }
    }

    /// `w(i)`.
    pub fn apply(&self, i: usize) -> usize {
        self.perm[i]
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn inverse_perm(&self) -> &[usize] {
        &self.inv_perm
    }

    /// Number of inversions of the permutation.
    pub fn length(&self) -> usize {
        self.length
    }

    /// The monomial representative `n_w` (a 0/1 permutation matrix).
    pub fn rep(&self) -> &GroupElement {
        &self.rep
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// A canonical `B`-coset label: the index in the documented enumeration order
/// together with the unique column-reduced representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetIndex {
    pub id: usize,
    pub canonical_rep: GroupElement,
}

/// The result of the sharp Bruhat decomposition `g = b n_w u`.
#[derive(Clone, Debug)]
pub struct BruhatDecomposition {
    pub b: GroupElement,
    pub weyl_index: usize,
    pub u: GroupElement,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GroupKind {
    GeneralLinear,
    SpecialLinear2,
}

struct BnInner {
    kind: GroupKind,
    n: usize,
    fd: FieldDesc,
    weyl: Vec<WeylElem>,
    longest: usize,
    unipotent: Vec<GroupElement>,
    torus: Vec<GroupElement>,
    generators: Vec<GroupElement>,
    cosets: Vec<GroupElement>,
    coset_lookup: HashMap<GroupElement, usize>,
    /// Start offset of each Weyl cell in the coset enumeration.
    cell_starts: Vec<usize>,
}

/// Split BN-pair data for one group instance.  Cheap to clone and share.
#[derive(Clone)]
pub struct BnProvider {
    inner: std::sync::Arc<BnInner>,
}

impl fmt::Debug for BnProvider {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BnProvider")
            .field("kind", &self.inner.kind)
            .field("n", &self.inner.n)
            .field("q", &self.inner.fd.q())
            .field("cosets", &self.inner.cosets.len())
            .finish()
    }
}

impl BnProvider {
    /// The general linear group `GL_n(q)`.
    pub fn gl(fd: &FieldDesc, n: usize) -> Result<BnProvider, BnError> {
        BnProvider::build(fd, n, GroupKind::GeneralLinear)
    }

    /// The special linear group `SL_2(q)`.
    pub fn sl2(fd: &FieldDesc) -> Result<BnProvider, BnError> {
        BnProvider::build(fd, 2, GroupKind::SpecialLinear2)
    }

    fn build(fd: &FieldDesc, n: usize, kind: GroupKind) -> Result<BnProvider, BnError> {
        if n < 2 {
            return Err(BnError::DimensionTooSmall(n));
        }
        let q = fd.q();

        let coset_count = flag_count(q, n);
        if coset_count > MAX_COSETS as u64 {
            return Err(BnError::TooManyCosets { count: coset_count, limit: MAX_COSETS });
        }
        let u_order = checked_q_pow(q, (n * (n - 1) / 2) as u32)
            .filter(|&c| c <= MAX_SUBGROUP)
            .ok_or(BnError::SubgroupTooLarge { count: u64::MAX, limit: MAX_SUBGROUP })?;
        let h_order = match kind {
            GroupKind::GeneralLinear => checked_q_pow(q - 1, n as u32)
                .filter(|&c| c <= MAX_SUBGROUP)
                .ok_or(BnError::SubgroupTooLarge { count: u64::MAX, limit: MAX_SUBGROUP })?,
            GroupKind::SpecialLinear2 => q - 1,
        };

        let weyl: Vec<WeylElem> =
            lex_permutations(n).into_iter().map(|p| WeylElem::new(fd, p)).collect();
        let max_len = n * (n - 1) / 2;
        let longest = weyl
            .iter()
            .position(|w| w.length() == max_len)
            .expect("the order-reversing permutation is enumerated");
        debug_assert_eq!(
            weyl.iter().filter(|w| w.length() == max_len).count(),
            1,
            "exactly one element of maximal length"
        );

        let unipotent = enumerate_unipotent(fd, n, u_order);
        let torus = enumerate_torus(fd, n, kind, h_order);

        // Coset representatives cell by cell: for each w, the matrices v n_w
        // with v unitriangular supported on {(a,b) : a < b, w^-1(a) > w^-1(b)}.
        let mut cosets = Vec::with_capacity(coset_count as usize);
        let mut coset_lookup = HashMap::with_capacity(coset_count as usize);
        let mut cell_starts = Vec::with_capacity(weyl.len());
        for w in &weyl {
            cell_starts.push(cosets.len());
            let positions: Vec<(usize, usize)> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|&(a, b)| w.inv_perm[a] > w.inv_perm[b])
                .collect();
            for idx in 0..checked_q_pow(q, positions.len() as u32).unwrap() {
                let mut v = GroupElement::identity(fd, n);
                let mut rem = idx;
                for &(a, b) in positions.iter().rev() {
                    v.set_entry(a, b, fd.elem(rem % q).unwrap());
                    rem /= q;
                }
                let mut rep = v.mul(fd, w.rep());
                if kind == GroupKind::SpecialLinear2 {
                    normalize_det(fd, &mut rep);
                }
                let id = cosets.len();
                let prev = coset_lookup.insert(rep.clone(), id);
                assert!(prev.is_none(), "coset representatives are pairwise distinct");
                cosets.push(rep);
            }
        }
        assert_eq!(cosets.len() as u64, coset_count, "cell sizes sum to the flag count");

        let generators = make_generators(fd, n, kind);

        let inner = BnInner {
            kind,
            n,
            fd: fd.clone(),
            weyl,
            longest,
            unipotent,
            torus,
            generators,
            cosets,
            coset_lookup,
            cell_starts,
        };
        let provider = BnProvider { inner: std::sync::Arc::new(inner) };
        provider.verify_generators()?;
        Ok(provider)
    }

    pub fn kind(&self) -> GroupKind {
        self.inner.kind
    }

    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn field(&self) -> &FieldDesc {
        &self.inner.fd
    }

    pub fn q(&self) -> u64 {
        self.inner.fd.q()
    }

    /// All `n!` Weyl elements in lexicographic order of their permutations.
    pub fn weyl_elements(&self) -> &[WeylElem] {
        &self.inner.weyl
    }

    pub fn weyl(&self, index: usize) -> &WeylElem {
        &self.inner.weyl[index]
    }

    pub fn longest_index(&self) -> usize {
        self.inner.longest
    }

    /// The longest element `w_0` (the order-reversing permutation).
    pub fn longest_element(&self) -> &WeylElem {
        &self.inner.weyl[self.inner.longest]
    }

    /// Number of `B`-cosets, `[G:B]`.
    pub fn coset_count(&self) -> usize {
        self.inner.cosets.len()
    }

    pub fn coset_rep(&self, id: usize) -> &GroupElement {
        &self.inner.cosets[id]
    }

    pub fn coset_reps(&self) -> &[GroupElement] {
        &self.inner.cosets
    }

    /// Start offset of the Weyl cell `w` in the coset enumeration.
    pub fn cell_start(&self, weyl_index: usize) -> usize {
        self.inner.cell_starts[weyl_index]
    }

    /// Enumeration of the unipotent radical `U` (upper unitriangular
    /// matrices), row-major mixed-radix order on the strict upper entries.
    pub fn unipotent_elements(&self) -> &[GroupElement] {
        &self.inner.unipotent
    }

    /// Enumeration of the torus `H`: all invertible diagonals for `GL_n`,
    /// determinant-one diagonals for `SL_2`.
    pub fn torus_elements(&self) -> &[GroupElement] {
        &self.inner.torus
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.inner.generators
    }

    pub fn unipotent_order(&self) -> u64 {
        self.inner.unipotent.len() as u64
    }

    pub fn torus_order(&self) -> u64 {
        self.inner.torus.len() as u64
    }

    pub fn borel_order(&self) -> u64 {
        self.unipotent_order() * self.torus_order()
    }

    pub fn group_order(&self) -> u64 {
        let q = self.q();
        match self.inner.kind {
            GroupKind::GeneralLinear => {
                let mut acc = checked_q_pow(q, (self.inner.n * (self.inner.n - 1) / 2) as u32)
                    .expect("validated at construction");
                for i in 1..=self.inner.n {
                    acc *= checked_q_pow(q, i as u32).unwrap() - 1;
                }
                acc
            }
            GroupKind::SpecialLinear2 => q * (q * q - 1),
        }
    }

    pub fn center_order(&self) -> u64 {
        let q = self.q();
        match self.inner.kind {
            GroupKind::GeneralLinear => q - 1,
            GroupKind::SpecialLinear2 => {
                if q % 2 == 1 {
                    2
                } else {
                    1
                }
            }
        }
    }

    /// Membership of `u` in `U_w`: every nonzero strict-upper entry `(i, j)`
    /// sits on an inversion of `w`, i.e. `w(i) > w(j)`.
    pub fn u_w_contains(&self, u: &GroupElement, w: &WeylElem) -> bool {
        let n = self.inner.n;
        if !u.is_upper_unitriangular(&self.inner.fd) {
            return false;
        }
        (0..n).all(|i| {
            (i + 1..n).all(|j| u.entry(i, j).value() == 0 || w.apply(i) > w.apply(j))
        })
    }

    /// Sharp Bruhat decomposition `g = b n_w u` with `b` upper triangular
    /// invertible and `u` in `U_w`; the triple is unique.
    pub fn bruhat_decompose(&self, g: &GroupElement) -> Result<BruhatDecomposition, BnError> {
        let fd = &self.inner.fd;
        let n = self.inner.n;
        if g.n() != n {
            return Err(BnError::SizeMismatch { expected: n, got: g.n() });
        }
        // Row-reduce Bg to its canonical representative n_w u: working bottom
        // row up, clear the leading columns of the rows already processed,
        // then normalize the new leading entry.  Clearing in processing order
        // is sound because each processed row is already zero on the leading
        // columns of the rows processed before it.
        let mut r = g.clone();
        let mut processed: Vec<(usize, usize)> = Vec::new();
        for i in (0..n).rev() {
            for &(i2, c2) in &processed {
                let f = r.entry(i, c2);
                if f.value() != 0 {
                    r.row_sub_scaled(fd, i, i2, f);
                }
            }
            let Some(c) = (0..n).find(|&j| r.entry(i, j).value() != 0) else {
                return Err(BnError::Singular);
            };
            let inv = fd.inv(r.entry(i, c));
            r.scale_row(fd, i, inv);
            processed.push((i, c));
        }
        let mut perm = vec![0usize; n];
        for &(i, c) in &processed {
            perm[c] = i;
        }
        let weyl_index = self
            .weyl_index_of(&perm)
            .expect("every permutation of {0..n-1} is enumerated");
        let w = &self.inner.weyl[weyl_index];
        // u = n_w^-1 r, i.e. row a of u is row w(a) of r.
        let mut u = GroupElement::identity(fd, n);
        for (a, &pa) in perm.iter().enumerate() {
            for j in 0..n {
                u.set_entry(a, j, r.entry(pa, j));
            }
        }
        let u_inv = u.inverse(fd).expect("unitriangular matrices are invertible");
        let nw_inv = w.rep().transpose(fd);
        let b = g.mul(fd, &u_inv).mul(fd, &nw_inv);

        assert!(b.is_upper_triangular_invertible(fd), "Bruhat b-factor is upper triangular");
        assert!(self.u_w_contains(&u, w), "Bruhat u-factor lies in U_w");
        debug_assert_eq!(b.mul(fd, w.rep()).mul(fd, &u), *g, "decomposition recomposes");
        Ok(BruhatDecomposition { b, weyl_index, u })
    }

    fn weyl_index_of(&self, perm: &[usize]) -> Option<usize> {
        self.inner.weyl.iter().position(|w| w.perm() == perm)
    }

    /// Canonical label of the coset `gB`.
    pub fn coset_canonical(&self, g: &GroupElement) -> Result<CosetIndex, BnError> {
        let rep = self.reduce_coset(g)?;
        let id = *self
            .inner
            .coset_lookup
            .get(&rep)
            .expect("every reduced representative is enumerated");
        Ok(CosetIndex { id, canonical_rep: rep })
    }

    /// Canonical coset id without materializing the representative.
    pub fn coset_id(&self, g: &GroupElement) -> Result<usize, BnError> {
        let rep = self.reduce_coset(g)?;
        Ok(*self
            .inner
            .coset_lookup
            .get(&rep)
            .expect("every reduced representative is enumerated"))
    }

    fn reduce_coset(&self, g: &GroupElement) -> Result<GroupElement, BnError> {
        let fd = &self.inner.fd;
        let n = self.inner.n;
        if g.n() != n {
            return Err(BnError::SizeMismatch { expected: n, got: g.n() });
        }
        // Column-reduce gB left to right: clear the pivot rows of the earlier
        // columns, then normalize the bottom-most nonzero entry to 1.
        let mut m = g.clone();
        let mut processed: Vec<(usize, usize)> = Vec::new();
        for j in 0..n {
            for &(j2, r2) in &processed {
                let f = m.entry(r2, j);
                if f.value() != 0 {
                    m.col_sub_scaled(fd, j, j2, f);
                }
            }
            let Some(r) = (0..n).rev().find(|&i| m.entry(i, j).value() != 0) else {
                return Err(BnError::Singular);
            };
            let inv = fd.inv(m.entry(r, j));
            m.scale_col(fd, j, inv);
            processed.push((j, r));
        }
        if self.inner.kind == GroupKind::SpecialLinear2 {
            normalize_det(fd, &mut m);
        }
        Ok(m)
    }

    /// Exhaustive enumeration of the whole group by closure under the
    /// generators.  Intended for small instances; errors beyond `limit`.
    pub fn enumerate_group(&self, limit: usize) -> Result<Vec<GroupElement>, BnError> {
        let fd = &self.inner.fd;
        let mut seen: HashMap<GroupElement, ()> = HashMap::new();
        let mut order = Vec::new();
        let identity = GroupElement::identity(fd, self.inner.n);
        seen.insert(identity.clone(), ());
        order.push(identity);
        let mut frontier = 0;
        while frontier < order.len() {
            let g = order[frontier].clone();
            frontier += 1;
            for gen in &self.inner.generators {
                let next = g.mul(fd, gen);
                if !seen.contains_key(&next) {
                    if order.len() >= limit {
                        return Err(BnError::GroupTooLarge(limit));
                    }
                    seen.insert(next.clone(), ());
                    order.push(next);
                }
            }
        }
        Ok(order)
    }

    /// A uniform-ish random element, by rejection on the determinant; the
    /// `SL_2` provider rescales to determinant one.
    pub fn random_element(&self, rng: &mut SplitMix64) -> GroupElement {
        let fd = &self.inner.fd;
        let n = self.inner.n;
        loop {
            let mut g = GroupElement::identity(fd, n);
            for i in 0..n {
                for j in 0..n {
                    g.set_entry(i, j, fd.elem(rng.below(fd.q())).unwrap());
                }
            }
            let d = g.det(fd);
            if d.value() == 0 {
                continue;
            }
            if self.inner.kind == GroupKind::SpecialLinear2 {
                g.scale_col(fd, n - 1, fd.inv(d));
            }
            return g;
        }
    }

    /// Transitivity of the generator action on cosets plus, for `GL_n`,
    /// surjectivity of the determinant image.
    fn verify_generators(&self) -> Result<(), BnError> {
        let fd = &self.inner.fd;
        let count = self.coset_count();
        let mut seen = vec![false; count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut reached = 1usize;
        while let Some(id) = stack.pop() {
            for gen in &self.inner.generators {
                let image = gen.mul(fd, &self.inner.cosets[id]);
                let next = self.coset_id(&image)?;
                if !seen[next] {
                    seen[next] = true;
                    reached += 1;
                    stack.push(next);
                }
            }
        }
        assert_eq!(reached, count, "generators act transitively on the {} cosets", count);

        if self.inner.kind == GroupKind::GeneralLinear {
            let mut dets: Vec<FqElem> = vec![fd.one()];
            let mut grew = true;
            while grew {
                grew = false;
                let snapshot = dets.clone();
                for gen in &self.inner.generators {
                    let d = gen.det(fd);
                    for &x in &snapshot {
                        let y = fd.mul(x, d);
                        if !dets.contains(&y) {
                            dets.push(y);
                            grew = true;
                        }
                    }
                }
            }
            assert_eq!(
                dets.len() as u64,
                fd.q() - 1,
                "determinants of the generators span the full multiplicative group"
            );
        }
        Ok(())
    }
}

fn normalize_det(fd: &FieldDesc, m: &mut GroupElement) {
    let d = m.det(fd);
    assert!(d.value() != 0);
    if d != fd.one() {
        let n = m.n();
        m.scale_col(fd, n - 1, fd.inv(d));
    }
}

/// `[G:B] = prod_{i=1..n} (q^i - 1)/(q - 1)`, the number of complete flags.
fn flag_count(q: u64, n: usize) -> u64 {
    let mut acc = 1u64;
    for i in 1..=n {
        let mut geom = 0u64;
        for e in 0..i {
            geom += checked_q_pow(q, e as u32).unwrap_or(u64::MAX / 2);
        }
        acc = acc.saturating_mul(geom);
    }
    acc
}

fn checked_q_pow(q: u64, e: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..e {
        acc = acc.checked_mul(q)?;
    }
    Some(acc)
}

fn lex_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut used = vec![false; n];
    fn rec(n: usize, current: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                current.push(i);
                rec(n, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(n, &mut current, &mut used, &mut out);
    out
}

fn enumerate_unipotent(fd: &FieldDesc, n: usize, count: u64) -> Vec<GroupElement> {
    let q = fd.q();
    let positions: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let mut u = GroupElement::identity(fd, n);
        let mut rem = idx;
        for &(i, j) in positions.iter().rev() {
            u.set_entry(i, j, fd.elem(rem % q).unwrap());
            rem /= q;
        }
        out.push(u);
    }
    out
}

fn enumerate_torus(fd: &FieldDesc, n: usize, kind: GroupKind, count: u64) -> Vec<GroupElement> {
    let q = fd.q();
    match kind {
        GroupKind::GeneralLinear => {
            let mut out = Vec::with_capacity(count as usize);
            for idx in 0..count {
                let mut h = GroupElement::identity(fd, n);
                let mut rem = idx;
                for i in (0..n).rev() {
                    h.set_entry(i, i, fd.elem(rem % (q - 1) + 1).unwrap());
                    rem /= q - 1;
                }
                out.push(h);
            }
            out
        }
        GroupKind::SpecialLinear2 => (1..q)
            .map(|t| {
                let mut h = GroupElement::identity(fd, 2);
                let te = fd.elem(t).unwrap();
                h.set_entry(0, 0, te);
                h.set_entry(1, 1, fd.inv(te));
                h
            })
            .collect(),
    }
}

fn make_generators(fd: &FieldDesc, n: usize, kind: GroupKind) -> Vec<GroupElement> {
    let mut gens = Vec::new();
    match kind {
        GroupKind::GeneralLinear => {
            // n-cycle, one transvection, and a primitive diagonal when q > 2.
            let mut cycle = GroupElement { n, entries: vec![fd.zero(); n * n] };
            for j in 0..n {
                cycle.set_entry((j + 1) % n, j, fd.one());
            }
            gens.push(cycle);
            let mut t = GroupElement::identity(fd, n);
            t.set_entry(0, 1, fd.one());
            gens.push(t);
            if fd.q() > 2 {
                let mut d = GroupElement::identity(fd, n);
                d.set_entry(0, 0, fd.primitive_element());
                gens.push(d);
            }
        }
        GroupKind::SpecialLinear2 => {
            // Transvections with a basis of parameters, plus the rotation.
            // For prime q this is the classical pair {[[1,1],[0,1]], [[0,-1],[1,0]]}.
            for k in 0..fd.f() {
                let mut t = GroupElement::identity(fd, 2);
                t.set_entry(0, 1, fd.pow(fd.primitive_element(), k as u64));
                gens.push(t);
            }
            let mut s = GroupElement { n: 2, entries: vec![fd.zero(); 4] };
            s.set_entry(0, 1, fd.neg(fd.one()));
            s.set_entry(1, 0, fd.one());
            gens.push(s);
        }
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldDesc;

    fn gl(p: u64, f: u32, n: usize) -> BnProvider {
        BnProvider::gl(&FieldDesc::new(p, f).unwrap(), n).unwrap()
    }

    fn sl2(p: u64, f: u32) -> BnProvider {
        BnProvider::sl2(&FieldDesc::new(p, f).unwrap()).unwrap()
    }

    #[test]
    fn weyl_enumeration_s2_s3() {
        let g2 = gl(2, 1, 2);
        let lens: Vec<usize> = g2.weyl_elements().iter().map(|w| w.length()).collect();
        assert_eq!(lens, vec![0, 1]);
        assert!(g2.weyl(0).is_identity());
        assert_eq!(g2.longest_element().length(), 1);

        let g3 = gl(3, 1, 3);
        let lens: Vec<usize> = g3.weyl_elements().iter().map(|w| w.length()).collect();
        assert_eq!(lens, vec![0, 1, 1, 2, 2, 3]);
        assert_eq!(g3.longest_element().length(), 3);
        // w0 is the order-reversing permutation and squares to the identity.
        let w0 = g3.longest_element();
        assert_eq!(w0.perm(), &[2, 1, 0]);
        let fd = g3.field();
        let sq = w0.rep().mul(fd, w0.rep());
        assert_eq!(sq, GroupElement::identity(fd, 3));
    }

    #[test]
    fn weyl_rep_is_permutation_matrix() {
        let g = gl(3, 1, 3);
        let fd = g.field();
        for w in g.weyl_elements() {
            for i in 0..3 {
                assert_eq!((0..3).filter(|&j| w.rep().entry(i, j).value() != 0).count(), 1);
                assert_eq!((0..3).filter(|&j| w.rep().entry(j, i).value() != 0).count(), 1);
            }
            if w.is_identity() {
                assert_eq!(*w.rep(), GroupElement::identity(fd, 3));
            }
        }
    }

    #[test]
    fn coset_counts() {
        assert_eq!(gl(2, 1, 2).coset_count(), 3);
        assert_eq!(gl(3, 1, 2).coset_count(), 4);
        assert_eq!(gl(2, 1, 3).coset_count(), 21);
        assert_eq!(gl(3, 1, 3).coset_count(), 52);
        assert_eq!(sl2(3, 1).coset_count(), 4);
        assert_eq!(sl2(5, 1).coset_count(), 6);
    }

    #[test]
    fn base_coset_is_identity() {
        let g = gl(3, 1, 2);
        let fd = g.field();
        let idx = g.coset_canonical(&GroupElement::identity(fd, 2)).unwrap();
        assert_eq!(idx.id, 0);
        assert_eq!(idx.canonical_rep, GroupElement::identity(fd, 2));
        // Anything in B lands on the base coset.
        let b = GroupElement::from_rows(fd, &[vec![2, 1], vec![0, 1]]).unwrap();
        assert_eq!(g.coset_id(&b).unwrap(), 0);
    }

    #[test]
    fn coset_respects_right_b_translation() {
        let g = gl(3, 1, 2);
        let fd = g.field();
        let x = GroupElement::from_rows(fd, &[vec![1, 0], vec![1, 1]]).unwrap();
        let b = GroupElement::from_rows(fd, &[vec![2, 2], vec![0, 1]]).unwrap();
        let xb = x.mul(fd, &b);
        assert_eq!(g.coset_id(&x).unwrap(), g.coset_id(&xb).unwrap());
        let y = GroupElement::from_rows(fd, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_ne!(g.coset_id(&x).unwrap(), g.coset_id(&y).unwrap());
    }

    #[test]
    fn bruhat_identity_and_longest() {
        let g = gl(3, 1, 2);
        let fd = g.field();
        let d = g.bruhat_decompose(&GroupElement::identity(fd, 2)).unwrap();
        assert!(g.weyl(d.weyl_index).is_identity());
        assert_eq!(d.b, GroupElement::identity(fd, 2));
        assert_eq!(d.u, GroupElement::identity(fd, 2));

        let n0 = g.longest_element().rep().clone();
        let d = g.bruhat_decompose(&n0).unwrap();
        assert_eq!(d.weyl_index, g.longest_index());
        assert_eq!(d.b, GroupElement::identity(fd, 2));
        assert_eq!(d.u, GroupElement::identity(fd, 2));
    }

    #[test]
    fn bruhat_worked_example() {
        // [[1,0],[1,1]] = [[-1,1],[0,1]] n_w0 [[1,1],[0,1]] over any F_q.
        for (p, f) in [(2u64, 1u32), (3, 1), (5, 1), (2, 2)] {
            let g = gl(p, f, 2);
            let fd = g.field();
            let x = GroupElement::from_rows(fd, &[vec![1, 0], vec![1, 1]]).unwrap();
            let d = g.bruhat_decompose(&x).unwrap();
            assert_eq!(d.weyl_index, g.longest_index());
            let minus_one = fd.neg(fd.one()).value();
            let expected_b =
                GroupElement::from_rows(fd, &[vec![minus_one, 1], vec![0, 1]]).unwrap();
            let expected_u = GroupElement::from_rows(fd, &[vec![1, 1], vec![0, 1]]).unwrap();
            assert_eq!(d.b, expected_b);
            assert_eq!(d.u, expected_u);
        }
    }

    #[test]
    fn bruhat_roundtrip_random() {
        for provider in [gl(3, 1, 3), gl(2, 2, 2), sl2(5, 1)] {
            let fd = provider.field();
            let mut rng = SplitMix64::new(2024);
            for _ in 0..500 {
                let g = provider.random_element(&mut rng);
                let d = provider.bruhat_decompose(&g).unwrap();
                let w = provider.weyl(d.weyl_index);
                assert_eq!(d.b.mul(fd, w.rep()).mul(fd, &d.u), g);
                assert!(provider.u_w_contains(&d.u, w));
                // Re-decomposing the recomposition gives the identical triple.
                let d2 = provider.bruhat_decompose(&g).unwrap();
                assert_eq!(d2.b, d.b);
                assert_eq!(d2.weyl_index, d.weyl_index);
                assert_eq!(d2.u, d.u);
            }
        }
    }

    #[test]
    fn singular_matrices_rejected() {
        let g = gl(3, 1, 2);
        let fd = g.field();
        let z = GroupElement::from_rows(fd, &[vec![1, 2], vec![2, 1]]).unwrap();
        assert_eq!(z.det(fd).value(), 0);
        assert_eq!(g.bruhat_decompose(&z).unwrap_err(), BnError::Singular);
        assert_eq!(g.coset_canonical(&z).unwrap_err(), BnError::Singular);
    }

    #[test]
    fn subgroup_enumerations() {
        let g = gl(3, 1, 3);
        assert_eq!(g.unipotent_order(), 27);
        assert_eq!(g.torus_order(), 8);
        assert!(g.unipotent_elements().iter().all(|u| u.is_upper_unitriangular(g.field())));
        assert!(g.torus_elements().iter().all(|h| h.is_diagonal_invertible(g.field())));

        let s = sl2(5, 1);
        assert_eq!(s.unipotent_order(), 5);
        assert_eq!(s.torus_order(), 4);
        assert!(s.torus_elements().iter().all(|h| h.det(s.field()) == s.field().one()));
    }

    #[test]
    fn u_w_membership() {
        let g = gl(3, 1, 3);
        let fd = g.field();
        let id_w = g.weyl(0);
        let w0 = g.longest_element();
        let identity = GroupElement::identity(fd, 3);
        for u in g.unipotent_elements() {
            // U_id = {1}; U_{w0} = U.
            assert_eq!(g.u_w_contains(u, id_w), *u == identity);
            assert!(g.u_w_contains(u, w0));
        }
        for w in g.weyl_elements() {
            let count = g.unipotent_elements().iter().filter(|u| g.u_w_contains(u, w)).count();
            assert_eq!(count as u64, 3u64.pow(w.length() as u32), "|U_w| = q^l(w)");
        }
    }

    #[test]
    fn conjugation_by_longest_flips_triangularity() {
        let g = gl(3, 1, 2);
        let fd = g.field();
        let n0 = g.longest_element().rep();
        let n0_inv = n0.transpose(fd);
        for u in g.unipotent_elements() {
            let v = n0_inv.mul(fd, u).mul(fd, n0);
            assert!(v.is_lower_unitriangular(fd));
        }
        // In the matrix model the unipotent parts of U and V meet trivially.
        let v_set: Vec<GroupElement> = g
            .unipotent_elements()
            .iter()
            .map(|u| n0_inv.mul(fd, u).mul(fd, n0))
            .collect();
        let meet: Vec<&GroupElement> =
            g.unipotent_elements().iter().filter(|u| v_set.contains(u)).collect();
        assert_eq!(meet.len(), 1);
        assert_eq!(*meet[0], GroupElement::identity(fd, 2));
    }

    #[test]
    fn generator_closures_match_group_order() {
        let g22 = gl(2, 1, 2);
        assert_eq!(g22.enumerate_group(100).unwrap().len() as u64, g22.group_order());
        assert_eq!(g22.group_order(), 6);

        let s3 = sl2(3, 1);
        assert_eq!(s3.enumerate_group(100).unwrap().len() as u64, s3.group_order());
        assert_eq!(s3.group_order(), 24);

        let g23 = gl(3, 1, 2);
        assert_eq!(g23.enumerate_group(100).unwrap().len() as u64, g23.group_order());
        assert_eq!(g23.group_order(), 48);
    }

    #[test]
    fn sl2_nonprime_field_generators() {
        let s4 = sl2(2, 2);
        // |SL_2(4)| = 60; the extra transvection parameters are needed here.
        assert_eq!(s4.enumerate_group(100).unwrap().len() as u64, s4.group_order());
        assert_eq!(s4.group_order(), 60);
    }

    #[test]
    fn bruhat_cells_partition_small_groups() {
        for provider in [gl(2, 1, 2), gl(3, 1, 2), sl2(3, 1)] {
            let all = provider.enumerate_group(20_000).unwrap();
            let mut cell_sizes = vec![0u64; provider.weyl_elements().len()];
            for g in &all {
                let d = provider.bruhat_decompose(g).unwrap();
                cell_sizes[d.weyl_index] += 1;
            }
            let q = provider.q();
            for (w, &size) in provider.weyl_elements().iter().zip(&cell_sizes) {
                assert_eq!(
                    size,
                    provider.borel_order() * checked_q_pow(q, w.length() as u32).unwrap(),
                    "|B n_w U_w| = |B| q^l(w)"
                );
            }
            assert_eq!(cell_sizes.iter().sum::<u64>(), provider.group_order());
        }
    }

    #[test]
    fn sl2_canonical_reps_have_det_one() {
        let s = sl2(5, 1);
        let fd = s.field();
        for rep in s.coset_reps() {
            assert_eq!(rep.det(fd), fd.one());
        }
        let mut rng = SplitMix64::new(11);
        for _ in 0..100 {
            let g = s.random_element(&mut rng);
            let idx = s.coset_canonical(&g).unwrap();
            assert_eq!(idx.canonical_rep.det(fd), fd.one());
        }
    }

    #[test]
    fn dimension_guard() {
        let fd = FieldDesc::new(2, 1).unwrap();
        assert_eq!(BnProvider::gl(&fd, 1).unwrap_err(), BnError::DimensionTooSmall(1));
    }
}
