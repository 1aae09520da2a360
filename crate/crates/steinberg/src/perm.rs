//! The permutation module `k[G/B]`.
//!
//! Basis vectors are the canonical `B`-coset labels from the provider; the
//! group acts by relabeling cosets, `[g'B] -> [gg'B]`.  The module carries
//! the invariant symmetric bilinear form that makes the coset basis
//! orthonormal, the Steinberg vector `e` (alternating sum of the Weyl
//! translates of the base coset), and the Gelfand-Graev weighted sums
//! `sum_u sigma(u) [u n_w B]`.

use std::sync::Arc;

use thiserror::Error;

use crate::bn::{BnProvider, GroupElement, WeylElem};
use crate::fields::{CoeffField, KScalar};
use crate::gg::RegularCharacter;
use crate::linalg::{echelonize, KVector, SubspaceBasis};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("coefficient field serves characteristic {coeff}, but the group lives over characteristic {group}")]
    CharacteristicClash { group: u64, coeff: u64 },
}

/// The Steinberg vector `e = sum_w (-1)^l(w) [n_w B]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinbergVector {
    pub e: KVector,
}

struct PmInner {
    provider: BnProvider,
    cf: CoeffField,
    dim: usize,
    /// Coset permutation of each provider generator.
    gen_tables: Vec<Vec<usize>>,
    /// Coset permutation of each element of `U`, in enumeration order.
    unipotent_tables: Vec<Vec<usize>>,
}

/// The module `k[G/B]` for one `(provider, coefficient field)` pair.
/// Immutable after construction and cheap to clone.
#[derive(Clone)]
pub struct PermModule {
    inner: Arc<PmInner>,
}

impl std::fmt::Debug for PermModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PermModule")
            .field("provider", &self.inner.provider)
            .field("ell", &self.inner.cf.ell())
            .field("m", &self.inner.cf.m())
            .field("dim", &self.inner.dim)
            .finish()
    }
}

impl PermModule {
    pub fn new(provider: &BnProvider, cf: &CoeffField) -> Result<PermModule, PermError> {
        if provider.field().p() != cf.structure_prime() {
            return Err(PermError::CharacteristicClash {
                group: provider.field().p(),
                coeff: cf.structure_prime(),
            });
        }
        // |U| 1_k != 0 is automatic for l != p; asserted anyway.
        assert!(
            cf.from_int(provider.unipotent_order() as i64).value() != 0,
            "|U| must be invertible in the coefficient field"
        );
        let dim = provider.coset_count();
        let gen_tables: Vec<Vec<usize>> =
            provider.generators().iter().map(|g| coset_table(provider, g)).collect();
        for table in &gen_tables {
            assert!(is_permutation(table), "generator action tables are permutations");
        }
        let unipotent_tables: Vec<Vec<usize>> =
            provider.unipotent_elements().iter().map(|u| coset_table(provider, u)).collect();
        Ok(PermModule {
            inner: Arc::new(PmInner {
                provider: provider.clone(),
                cf: cf.clone(),
                dim,
                gen_tables,
                unipotent_tables,
            }),
        })
    }

    pub fn provider(&self) -> &BnProvider {
        &self.inner.provider
    }

    pub fn coefficients(&self) -> &CoeffField {
        &self.inner.cf
    }

    /// `[G:B]`, the dimension of `k[G/B]`.
    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn zero_vector(&self) -> KVector {
        KVector::zero(&self.inner.cf, self.inner.dim)
    }

    /// The basis vector of the `i`-th coset.
    pub fn basis_vector(&self, i: usize) -> KVector {
        KVector::basis(&self.inner.cf, self.inner.dim, i)
    }

    /// The coset permutation induced by left translation with `g`.
    pub fn coset_permutation(&self, g: &GroupElement) -> Vec<usize> {
        coset_table(&self.inner.provider, g)
    }

    /// Left action of `g`: the linear extension of `[g'B] -> [gg'B]`.
    pub fn act(&self, g: &GroupElement, v: &KVector) -> KVector {
        assert_eq!(v.len(), self.inner.dim, "vector must live in this module");
        let table = self.coset_permutation(g);
        permute(&self.inner.cf, &table, v)
    }

    /// The invariant bilinear form; the coset basis is orthonormal for it.
    pub fn form(&self, a: &KVector, b: &KVector) -> KScalar {
        a.dot(&self.inner.cf, b)
    }

    /// `e = sum_w (-1)^l(w) [n_w B]`; nonzero with exactly `|W|` entries.
    pub fn steinberg_vector(&self) -> SteinbergVector {
        let cf = &self.inner.cf;
        let mut e = self.zero_vector();
        for w in self.inner.provider.weyl_elements() {
            let id = self.inner.provider.coset_id(w.rep()).expect("n_w is invertible");
            let sign = if w.length() % 2 == 0 { cf.one() } else { cf.neg_one() };
            e.set(id, cf.add(e.get(id), sign));
        }
        SteinbergVector { e }
    }

    /// Canonical basis of the Steinberg submodule, the span of `{u e : u in U}`.
    /// Its dimension is `|U|`.
    pub fn steinberg_basis(&self) -> SubspaceBasis {
        let cf = &self.inner.cf;
        let e = self.steinberg_vector().e;
        let translates: Vec<KVector> = self
            .inner
            .unipotent_tables
            .iter()
            .map(|table| permute(cf, table, &e))
            .collect();
        echelonize(cf, &translates).expect("translates share the module dimension")
    }

    /// The Gelfand-Graev weighted coset sum `sum_u sigma(u) [u n_w B]`.
    ///
    /// For regular `sigma` this vanishes for every `w` other than the longest
    /// element and is nonzero there.
    pub fn gg_vector(&self, sigma: &RegularCharacter, w: &WeylElem) -> KVector {
        let cf = &self.inner.cf;
        let base = self.inner.provider.coset_id(w.rep()).expect("n_w is invertible");
        let mut out = self.zero_vector();
        for (u, table) in
            self.inner.provider.unipotent_elements().iter().zip(&self.inner.unipotent_tables)
        {
            let weight = sigma.eval(u);
            let id = table[base];
            out.set(id, cf.add(out.get(id), weight));
        }
        out
    }

    /// Apply the Gelfand-Graev group-algebra element: `sum_u sigma(u) (u . v)`.
    pub fn apply_gg(&self, sigma: &RegularCharacter, v: &KVector) -> KVector {
        assert_eq!(v.len(), self.inner.dim, "vector must live in this module");
        let cf = &self.inner.cf;
        let mut out = self.zero_vector();
        for (u, table) in
            self.inner.provider.unipotent_elements().iter().zip(&self.inner.unipotent_tables)
        {
            let weight = sigma.eval(u);
            if weight.value() == 0 {
                continue;
            }
            for (&c, &j) in v.coeffs().iter().zip(table.iter()) {
                if c.value() != 0 {
                    out.set(j, cf.add(out.get(j), cf.mul(weight, c)));
                }
            }
        }
        out
    }

    /// Canonical basis of the image of the Gelfand-Graev element on the whole
    /// module; one-dimensional for regular `sigma`, spanned by the longest
    /// Weyl translate.
    pub fn gg_image(&self, sigma: &RegularCharacter) -> SubspaceBasis {
        let cf = &self.inner.cf;
        let weights: Vec<KScalar> =
            self.inner.provider.unipotent_elements().iter().map(|u| sigma.eval(u)).collect();
        let columns: Vec<KVector> = (0..self.inner.dim)
            .map(|i| {
                let mut col = self.zero_vector();
                for (table, &weight) in self.inner.unipotent_tables.iter().zip(&weights) {
                    let j = table[i];
                    col.set(j, cf.add(col.get(j), weight));
                }
                col
            })
            .collect();
        echelonize(cf, &columns).expect("columns share the module dimension")
    }

    /// Smallest submodule containing the seeds: closure under the verified
    /// generator actions.
    pub fn spin_submodule(&self, seeds: &[KVector]) -> SubspaceBasis {
        let cf = &self.inner.cf;
        let actions: Vec<BoxedAction> = self
            .inner
            .gen_tables
            .iter()
            .map(|table| {
                let cf = cf.clone();
                Box::new(move |v: &KVector| permute(&cf, table, v)) as BoxedAction
            })
            .collect();
        let refs: Vec<&dyn Fn(&KVector) -> KVector> =
            actions.iter().map(|b| b.as_ref()).collect();
        crate::linalg::spin(cf, seeds, &refs)
    }
}

type BoxedAction<'a> = Box<dyn Fn(&KVector) -> KVector + 'a>;

fn coset_table(provider: &BnProvider, g: &GroupElement) -> Vec<usize> {
    let fd = provider.field();
    provider
        .coset_reps()
        .iter()
        .map(|rep| provider.coset_id(&g.mul(fd, rep)).expect("g and rep are invertible"))
        .collect()
}

fn is_permutation(table: &[usize]) -> bool {
    let mut seen = vec![false; table.len()];
    for &t in table {
        if t >= table.len() || seen[t] {
            return false;
        }
        seen[t] = true;
    }
    true
}

fn permute(cf: &CoeffField, table: &[usize], v: &KVector) -> KVector {
    let mut out = KVector::zero(cf, v.len());
    for (i, &j) in table.iter().enumerate() {
        let c = v.get(i);
        if c.value() != 0 {
            out.set(j, cf.add(out.get(j), c));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldDesc;
    use crate::gg::regular_characters;
    use crate::rng::SplitMix64;

    fn module(p: u64, f: u32, n: usize, ell: u64) -> PermModule {
        let fd = FieldDesc::new(p, f).unwrap();
        let provider = BnProvider::gl(&fd, n).unwrap();
        let cf = CoeffField::new(p, ell).unwrap();
        PermModule::new(&provider, &cf).unwrap()
    }

    #[test]
    fn characteristic_clash_rejected() {
        let fd = FieldDesc::new(3, 1).unwrap();
        let provider = BnProvider::gl(&fd, 2).unwrap();
        let cf = CoeffField::new(2, 3).unwrap();
        assert_eq!(
            PermModule::new(&provider, &cf).unwrap_err(),
            PermError::CharacteristicClash { group: 3, coeff: 2 }
        );
    }

    #[test]
    fn identity_acts_trivially_and_b_fixes_base() {
        let m = module(3, 1, 2, 2);
        let fd = m.provider().field();
        let mut rng = SplitMix64::new(5);
        let id = GroupElement::identity(fd, 2);
        for _ in 0..20 {
            let v = random_vector(&m, &mut rng);
            assert_eq!(m.act(&id, &v), v);
        }
        let b = GroupElement::from_rows(fd, &[vec![2, 1], vec![0, 2]]).unwrap();
        let base = m.basis_vector(0);
        assert_eq!(m.act(&b, &base), base, "B stabilizes its own coset");
    }

    fn random_vector(m: &PermModule, rng: &mut SplitMix64) -> KVector {
        let cf = m.coefficients();
        KVector::new(
            (0..m.dim()).map(|_| cf.scalar(rng.below(cf.order())).unwrap()).collect(),
        )
    }

    #[test]
    fn action_inverse_roundtrip() {
        let m = module(3, 1, 2, 2);
        let fd = m.provider().field();
        let mut rng = SplitMix64::new(77);
        for _ in 0..100 {
            let g = m.provider().random_element(&mut rng);
            let g_inv = g.inverse(fd).unwrap();
            let v = random_vector(&m, &mut rng);
            assert_eq!(m.act(&g, &m.act(&g_inv, &v)), v);
        }
    }

    #[test]
    fn form_is_orthonormal_symmetric_invariant() {
        let m = module(2, 1, 3, 3);
        let cf = m.coefficients();
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                let val = m.form(&m.basis_vector(i), &m.basis_vector(j));
                assert_eq!(val, if i == j { cf.one() } else { cf.zero() });
            }
        }
        let mut rng = SplitMix64::new(99);
        for _ in 0..100 {
            let g = m.provider().random_element(&mut rng);
            let v1 = random_vector(&m, &mut rng);
            let v2 = random_vector(&m, &mut rng);
            assert_eq!(m.form(&v1, &v2), m.form(&v2, &v1));
            assert_eq!(m.form(&m.act(&g, &v1), &m.act(&g, &v2)), m.form(&v1, &v2));
        }
    }

    #[test]
    fn steinberg_vector_shape() {
        let m = module(3, 1, 2, 2);
        let e = m.steinberg_vector().e;
        assert!(!e.is_zero());
        assert_eq!(e.support_size(), 2, "one coset per Weyl element");
        assert_eq!(m.form(&e, &e), m.coefficients().from_int(2), "<e,e> = |W| 1_k");
    }

    #[test]
    fn steinberg_dims() {
        // dim St = |U| across instances and coefficient fields.
        for (p, f, n, ell, expected) in
            [(3u64, 1u32, 2usize, 2u64, 3usize), (2, 1, 3, 3, 8), (3, 1, 3, 2, 27), (2, 2, 2, 3, 4)]
        {
            let m = module(p, f, n, ell);
            assert_eq!(m.steinberg_basis().dim(), expected);
        }
    }

    #[test]
    fn gg_vector_vanishing_pattern() {
        let m = module(3, 1, 2, 2);
        let sigma = &regular_characters(m.provider(), m.coefficients())[0];
        let w0 = m.provider().longest_element();
        for w in m.provider().weyl_elements() {
            let v = m.gg_vector(sigma, w);
            if w.length() == w0.length() {
                assert!(!v.is_zero());
                assert_eq!(v.support_size(), 3, "|U| distinct cosets u n_0 B");
            } else {
                assert!(v.is_zero(), "regular character sums vanish off the longest cell");
            }
        }
    }

    #[test]
    fn trivial_weights_need_regularity() {
        // With trivial weights the w = id sum is |U| [B], which is nonzero
        // whenever l does not divide |U|; the vanishing really uses sigma.
        let m = module(3, 1, 2, 2);
        let cf = m.coefficients();
        let mut sum = m.zero_vector();
        for u in m.provider().unipotent_elements() {
            let id = m.provider().coset_id(u).unwrap();
            sum.set(id, cf.add(sum.get(id), cf.one()));
        }
        let mut expected = m.zero_vector();
        expected.set(0, cf.from_int(m.provider().unipotent_order() as i64));
        assert_eq!(sum, expected);
        assert!(!sum.is_zero());
    }

    #[test]
    fn gg_image_is_a_line() {
        for (p, f, n, ell) in [(2u64, 1u32, 2usize, 3u64), (2, 1, 3, 3), (2, 2, 2, 3)] {
            let m = module(p, f, n, ell);
            for sigma in &regular_characters(m.provider(), m.coefficients()) {
                let image = m.gg_image(sigma);
                assert_eq!(image.dim(), 1);
                let seed = m.gg_vector(sigma, m.provider().longest_element());
                assert!(image.contains(m.coefficients(), &seed));
            }
        }
    }

    #[test]
    fn gg_idempotent_up_to_scale() {
        let m = module(3, 1, 2, 2);
        let cf = m.coefficients();
        let sigma = &regular_characters(m.provider(), cf)[0];
        let scale = cf.from_int(m.provider().unipotent_order() as i64);
        for i in 0..m.dim() {
            let v = m.basis_vector(i);
            let once = m.apply_gg(sigma, &v);
            let twice = m.apply_gg(sigma, &once);
            let mut scaled = once.clone();
            scaled.scale_assign(cf, scale);
            assert_eq!(twice, scaled, "u_sigma^2 = |U| u_sigma");
        }
    }

    #[test]
    fn spin_of_basis_vector_is_whole_module() {
        let m = module(3, 1, 2, 2);
        let spun = m.spin_submodule(&[m.basis_vector(0)]);
        assert_eq!(spun.dim(), m.dim(), "G is transitive on cosets");
    }
}
