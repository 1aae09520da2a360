//! Property tests for the structural invariants.

use proptest::prelude::*;

use steinberg::bn::{BnProvider, GroupElement};
use steinberg::fields::{CoeffField, FieldDesc};
use steinberg::linalg::{echelonize, intersect, member, pairing_rank, perp, KVector};

fn cf4() -> CoeffField {
    // F_4 with a cube root of unity for p = 3.
    CoeffField::new(3, 2).unwrap()
}

fn kvec(cf: &CoeffField, raw: &[u64]) -> KVector {
    KVector::new(raw.iter().map(|&v| cf.scalar(v % cf.order()).unwrap()).collect())
}

prop_compose! {
    fn vectors(len: usize, count: usize)
        (raw in prop::collection::vec(prop::collection::vec(0u64..4, len), 1..count))
        -> Vec<Vec<u64>> {
        raw
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn echelonize_is_canonical_and_idempotent(raw in vectors(6, 8), seed in 0u64..1000) {
        let cf = cf4();
        let vecs: Vec<KVector> = raw.iter().map(|r| kvec(&cf, r)).collect();
        let basis = echelonize(&cf, &vecs).unwrap();
        // Order-insensitive: a deterministic shuffle spans the same basis.
        let mut shuffled = vecs.clone();
        let mut state = seed;
        for i in (1..shuffled.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            shuffled.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let basis2 = echelonize(&cf, &shuffled).unwrap();
        prop_assert_eq!(&basis, &basis2);
        // Idempotent: echelonizing the rows returns the same rows.
        let again = echelonize(&cf, basis.rows()).unwrap();
        prop_assert_eq!(&basis, &again);
        // Input vectors are members of their own span.
        for v in &vecs {
            prop_assert!(member(&cf, v, &basis));
        }
    }

    #[test]
    fn perp_dimensions_and_involution(raw in vectors(6, 5)) {
        let cf = cf4();
        let vecs: Vec<KVector> = raw.iter().map(|r| kvec(&cf, r)).collect();
        let basis = echelonize(&cf, &vecs).unwrap();
        let complement = perp(&cf, &basis);
        prop_assert_eq!(basis.dim() + complement.dim(), 6);
        prop_assert_eq!(&perp(&cf, &complement), &basis);
        for r in basis.rows() {
            for c in complement.rows() {
                prop_assert_eq!(r.dot(&cf, c), cf.zero());
            }
        }
    }

    #[test]
    fn pairing_rank_is_symmetric(raw_a in vectors(5, 4), raw_b in vectors(5, 4)) {
        let cf = cf4();
        let a = echelonize(&cf, &raw_a.iter().map(|r| kvec(&cf, r)).collect::<Vec<_>>()).unwrap();
        let b = echelonize(&cf, &raw_b.iter().map(|r| kvec(&cf, r)).collect::<Vec<_>>()).unwrap();
        let dot = |x: &KVector, y: &KVector| x.dot(&cf, y);
        prop_assert_eq!(pairing_rank(&cf, &a, &b, dot), pairing_rank(&cf, &b, &a, dot));
        // Rank-radical identity against the form-free intersection route.
        let via_rank = a.dim() - pairing_rank(&cf, &a, &b, dot);
        let direct = intersect(&cf, &a, &perp(&cf, &b)).dim();
        prop_assert_eq!(via_rank, direct);
    }

    #[test]
    fn bruhat_roundtrip_gl3(entries in prop::collection::vec(0u64..3, 9)) {
        let fd = FieldDesc::new(3, 1).unwrap();
        let provider = BnProvider::gl(&fd, 3).unwrap();
        let rows: Vec<Vec<u64>> = entries.chunks(3).map(|c| c.to_vec()).collect();
        let g = GroupElement::from_rows(&fd, &rows).unwrap();
        prop_assume!(g.det(&fd).value() != 0);
        let d = provider.bruhat_decompose(&g).unwrap();
        let w = provider.weyl(d.weyl_index);
        prop_assert_eq!(d.b.mul(&fd, w.rep()).mul(&fd, &d.u), g.clone());
        prop_assert!(provider.u_w_contains(&d.u, w));
        prop_assert!(d.b.is_upper_triangular_invertible(&fd));
        // The coset label only depends on gB.
        let b2 = GroupElement::from_rows(&fd, &[vec![2, 1, 0], vec![0, 1, 2], vec![0, 0, 1]]).unwrap();
        let gb = g.mul(&fd, &b2);
        prop_assert_eq!(provider.coset_id(&g).unwrap(), provider.coset_id(&gb).unwrap());
    }
}
