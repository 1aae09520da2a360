//! Acceptance suite: one test per criterion, each printing a pass line.
//!
//! Every expected value here is either verified directly against an
//! independent oracle computed inside this file (integer matrix ranks,
//! exhaustive group enumeration) or is an exact identity checked on the
//! nose.  Tolerances do not exist: all comparisons are equalities in finite
//! fields or between integers.

use steinberg::bn::BnProvider;
use steinberg::fields::{CoeffField, FieldDesc};
use steinberg::gg::{
    distinguished_factor_dim, expected_regular_count, gg_submodule, gram_rank_mod,
    h_orbit_partition, regular_characters, sigma_dimension_table, steinberg_gram_matrix,
};
use steinberg::linalg::echelonize;
use steinberg::perm::PermModule;
use steinberg::rng::SplitMix64;

/// Structure field for a prime power `q`.
fn structure(q: u64) -> FieldDesc {
    let mut p = 2;
    while !q.is_multiple_of(p) {
        p += 1;
    }
    let mut f = 0;
    let mut rest = q;
    while rest > 1 {
        assert_eq!(rest % p, 0, "{} is not a prime power", q);
        rest /= p;
        f += 1;
    }
    FieldDesc::new(p, f).unwrap()
}

fn gl(q: u64, n: usize) -> BnProvider {
    BnProvider::gl(&structure(q), n).unwrap()
}

fn sl2(q: u64) -> BnProvider {
    BnProvider::sl2(&structure(q)).unwrap()
}

fn ells(p: u64, pool: &[u64]) -> Vec<u64> {
    pool.iter().copied().filter(|&l| l != p).collect()
}

/// The GL instances of criterion 1: `GL_2(q)` for `q` in 2..5 and `GL_3(q)`
/// for `q` in {2, 3}.
fn base_instances() -> Vec<(u64, usize)> {
    vec![(2, 2), (3, 2), (4, 2), (5, 2), (2, 3), (3, 3)]
}

/// Independent oracle: rank of an integer matrix over Z/ell by plain row
/// reduction, sharing no code with the library's echelon forms.
#[allow(clippy::needless_range_loop)]
fn int_rank_mod(matrix: &[Vec<i64>], ell: i64) -> usize {
    let mut rows: Vec<Vec<i64>> = matrix
        .iter()
        .map(|r| r.iter().map(|&v| v.rem_euclid(ell)).collect())
        .collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col] % ell != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        // Inverse of the pivot mod ell by brute force (ell is prime and small).
        let pv = rows[rank][col];
        let inv = (1..ell).find(|&x| (x * pv) % ell == 1).unwrap();
        for c in 0..ncols {
            rows[rank][c] = (rows[rank][c] * inv).rem_euclid(ell);
        }
        for r in 0..rows.len() {
            if r != rank && rows[r][col] % ell != 0 {
                let f = rows[r][col];
                for c in 0..ncols {
                    rows[r][c] = (rows[r][c] - f * rows[rank][c]).rem_euclid(ell);
                }
            }
        }
        rank += 1;
    }
    rank
}

#[test]
fn criterion_01_gelfand_graev_vanishing() {
    for (q, n) in base_instances() {
        let provider = gl(q, n);
        let p = provider.field().p();
        for ell in ells(p, &[2, 3, 5, 7]) {
            let cf = CoeffField::new(p, ell).unwrap();
            let module = PermModule::new(&provider, &cf).unwrap();
            let w0 = provider.longest_element();
            for sigma in &regular_characters(&provider, &cf) {
                for w in provider.weyl_elements() {
                    let v = module.gg_vector(sigma, w);
                    if w.length() == w0.length() {
                        assert!(!v.is_zero(), "GL_{}({}) l={}: longest cell vanished", n, q, ell);
                    } else {
                        assert!(v.is_zero(), "GL_{}({}) l={}: non-longest cell nonzero", n, q, ell);
                    }
                }
                let image = module.gg_image(sigma);
                assert_eq!(image.dim(), 1, "GL_{}({}) l={}: image not a line", n, q, ell);
            }
        }
    }
    println!("acceptance criterion 1 (Gelfand-Graev vanishing and 1-dimensional image): PASS");
}

#[test]
fn criterion_02_gram_formula() {
    for (q, n) in [(3u64, 2usize), (4, 2), (2, 3), (3, 3)] {
        let provider = gl(q, n);
        let p = provider.field().p();
        let gram = steinberg_gram_matrix(&provider);
        for ell in ells(p, &[2, 3, 5, 7]) {
            let cf = CoeffField::new(p, ell).unwrap();
            let module = PermModule::new(&provider, &cf).unwrap();
            let e = module.steinberg_vector().e;
            let translates: Vec<_> =
                provider.unipotent_elements().iter().map(|u| module.act(u, &e)).collect();
            for (i, ti) in translates.iter().enumerate() {
                for (j, tj) in translates.iter().enumerate() {
                    assert_eq!(
                        module.form(ti, tj),
                        cf.from_int(gram[i][j] as i64),
                        "GL_{}({}) l={}: Gram mismatch at ({}, {})",
                        n,
                        q,
                        ell,
                        i,
                        j
                    );
                }
            }
        }
    }
    println!("acceptance criterion 2 (Gram formula over all unipotent pairs): PASS");
}

#[test]
fn criterion_03_submodule_equals_steinberg() {
    for (q, n) in base_instances() {
        let provider = gl(q, n);
        let p = provider.field().p();
        let u_order = provider.unipotent_order() as usize;
        for ell in ells(p, &[2, 3, 5, 7, 13]) {
            let cf = CoeffField::new(p, ell).unwrap();
            let module = PermModule::new(&provider, &cf).unwrap();
            let st = module.steinberg_basis();
            for sigma in &regular_characters(&provider, &cf) {
                let s = gg_submodule(&module, sigma);
                assert_eq!(s.dim(), u_order, "GL_{}({}) l={}: dim S != |U|", n, q, ell);
                assert!(
                    s.is_subspace_of(&cf, &st),
                    "GL_{}({}) l={}: S not inside St",
                    n,
                    q,
                    ell
                );
            }
        }
    }
    println!("acceptance criterion 3 (S_sigma = St_k for GL_n, every coefficient field): PASS");
}

#[test]
fn criterion_04_gl2_factor_dimension() {
    for q in [2u64, 3, 4, 5, 7] {
        let provider = gl(q, 2);
        let p = provider.field().p();
        for ell in ells(p, &[2, 3, 5, 7, 13]) {
            let cf = CoeffField::new(p, ell).unwrap();
            let expected = if (q + 1) % ell == 0 { q - 1 } else { q } as usize;
            // Independent oracle: rank of the q x q integer matrix I + J mod l.
            let iplusj: Vec<Vec<i64>> = (0..q as usize)
                .map(|i| (0..q as usize).map(|j| if i == j { 2 } else { 1 }).collect())
                .collect();
            let oracle = int_rank_mod(&iplusj, ell as i64);
            assert_eq!(oracle, expected, "oracle disagrees with the closed form");
            for dims in sigma_dimension_table(&provider, &cf).unwrap() {
                assert_eq!(
                    dims.dim_d, expected,
                    "GL_2({}) l={}: dim D = {} but oracle gives {}",
                    q, ell, dims.dim_d, expected
                );
            }
        }
    }
    println!("acceptance criterion 4 (GL_2 factor dimension vs integer-rank oracle): PASS");
}

#[test]
fn criterion_05_irreducibility_implication() {
    let mut checked = 0usize;
    let mut instances: Vec<(u64, usize)> = base_instances();
    instances.push((7, 2));
    for (q, n) in instances {
        let provider = gl(q, n);
        let p = provider.field().p();
        let index_gb = provider.coset_count() as u64;
        let u_order = provider.unipotent_order() as usize;
        for ell in ells(p, &[2, 3, 5, 7, 13]) {
            if index_gb.is_multiple_of(ell) {
                continue;
            }
            let cf = CoeffField::new(p, ell).unwrap();
            for dims in sigma_dimension_table(&provider, &cf).unwrap() {
                assert_eq!(
                    dims.dim_d, u_order,
                    "GL_{}({}) l={}: l does not divide [G:B] = {} but dim D != |U|",
                    n, q, ell, index_gb
                );
            }
            checked += 1;
        }
    }
    assert!(checked > 0);
    println!(
        "acceptance criterion 5 (l coprime to [G:B] forces dim D = |U|; {} instances): PASS",
        checked
    );
}

#[test]
fn criterion_06_cross_route_agreement() {
    let mut instances: Vec<(u64, usize)> = base_instances();
    instances.push((7, 2));
    for (q, n) in instances {
        let provider = gl(q, n);
        let p = provider.field().p();
        let gram = steinberg_gram_matrix(&provider);
        for ell in ells(p, &[2, 3, 5, 7, 13]) {
            let cf = CoeffField::new(p, ell).unwrap();
            let rank = gram_rank_mod(&cf, &gram);
            // Same rank from the independent integer reduction.
            let as_int: Vec<Vec<i64>> =
                gram.iter().map(|r| r.iter().map(|&v| v as i64).collect()).collect();
            assert_eq!(rank, int_rank_mod(&as_int, ell as i64));
            for dims in sigma_dimension_table(&provider, &cf).unwrap() {
                assert_eq!(
                    dims.dim_d, rank,
                    "GL_{}({}) l={}: pairing rank {} != Gram rank {}",
                    n, q, ell, dims.dim_d, rank
                );
            }
        }
    }
    println!("acceptance criterion 6 (pairing-rank route = Gram-rank route): PASS");
}

#[test]
fn criterion_07_seed_pairing() {
    for (q, n) in base_instances() {
        let provider = gl(q, n);
        let p = provider.field().p();
        for ell in ells(p, &[2, 3, 5, 7]) {
            let cf = CoeffField::new(p, ell).unwrap();
            let module = PermModule::new(&provider, &cf).unwrap();
            let w0 = provider.longest_element();
            let expected = cf.from_int(provider.unipotent_order() as i64);
            assert_ne!(expected, cf.zero());
            for sigma in &regular_characters(&provider, &cf) {
                let val = module.form(
                    &module.gg_vector(sigma, w0),
                    &module.gg_vector(&sigma.star(), w0),
                );
                assert_eq!(val, expected, "GL_{}({}) l={}: seed pairing != |U| 1_k", n, q, ell);
            }
        }
    }
    println!("acceptance criterion 7 (seed pairing equals |U| 1_k, nonzero): PASS");
}

#[test]
fn criterion_08_torus_orbit_suite() {
    for (q, n) in base_instances() {
        let provider = gl(q, n);
        let p = provider.field().p();
        let expected_count = (q - 1).pow(n as u32 - 1);
        assert_eq!(expected_regular_count(&provider), expected_count);
        assert_eq!(
            provider.torus_order() / provider.center_order(),
            expected_count,
            "|H/Z| = (q-1)^(n-1)"
        );
        for ell in ells(p, &[2, 3, 5]) {
            let cf = CoeffField::new(p, ell).unwrap();
            let module = PermModule::new(&provider, &cf).unwrap();
            let chars = regular_characters(&provider, &cf);
            assert_eq!(chars.len() as u64, expected_count);

            let w0 = provider.longest_element();
            let seeds: Vec<_> = chars.iter().map(|s| module.gg_vector(s, w0)).collect();
            let rank = echelonize(&cf, &seeds).unwrap().dim();
            assert_eq!(rank as u64, expected_count, "seed vectors are linearly independent");

            let submodules: std::collections::HashMap<Vec<u64>, _> = chars
                .iter()
                .map(|s| (s.params(), gg_submodule(&module, s)))
                .collect();
            for sigma in &chars {
                let s = &submodules[&sigma.params()];
                assert!(s.dim() as u64 >= expected_count, "dim S >= |H/Z|");
                for h in provider.torus_elements() {
                    let conj = sigma.conjugate_by(h).unwrap();
                    assert_eq!(
                        submodules[&conj.params()], *s,
                        "GL_{}({}) l={}: S_(sigma^h) != S_sigma",
                        n, q, ell
                    );
                }
            }
        }
    }
    println!("acceptance criterion 8 (regular character count, orbit stability, seed rank): PASS");
}

#[test]
fn criterion_09_bruhat_sharpness() {
    let mut providers: Vec<BnProvider> =
        base_instances().into_iter().map(|(q, n)| gl(q, n)).collect();
    providers.push(sl2(3));
    for provider in &providers {
        let fd = provider.field();
        let q = provider.q();
        let n = provider.n();
        // Coset count formula.
        let formula: u64 = (1..=n)
            .map(|i| (0..i).map(|e| q.pow(e as u32)).sum::<u64>())
            .product();
        assert_eq!(provider.coset_count() as u64, formula);

        let mut rng = SplitMix64::new(0xacce_97ed);
        for _ in 0..10_000 {
            let g = provider.random_element(&mut rng);
            let d = provider.bruhat_decompose(&g).unwrap();
            let w = provider.weyl(d.weyl_index);
            assert_eq!(d.b.mul(fd, w.rep()).mul(fd, &d.u), g, "recomposition is exact");
            assert!(provider.u_w_contains(&d.u, w), "u lies in U_w");
        }
    }
    // Exhaustive cell sizes for the fully enumerable instances.
    for provider in [gl(2, 2), gl(3, 2), sl2(3)] {
        let all = provider.enumerate_group(100).unwrap();
        assert_eq!(all.len() as u64, provider.group_order());
        let mut cells = vec![0u64; provider.weyl_elements().len()];
        for g in &all {
            cells[provider.bruhat_decompose(g).unwrap().weyl_index] += 1;
        }
        for (w, &size) in provider.weyl_elements().iter().zip(&cells) {
            assert_eq!(size, provider.borel_order() * provider.q().pow(w.length() as u32));
        }
        assert_eq!(cells.iter().sum::<u64>(), provider.group_order());
    }
    println!("acceptance criterion 9 (Bruhat sharpness, 10^4 samples per instance): PASS");
}

#[test]
fn criterion_10_sl2_duality() {
    for q in [3u64, 5, 7] {
        let provider = sl2(q);
        let p = provider.field().p();
        for ell in ells(p, &[2, 3]) {
            let cf = CoeffField::new(p, ell).unwrap();
            let module = PermModule::new(&provider, &cf).unwrap();
            let chars = regular_characters(&provider, &cf);
            let orbits = h_orbit_partition(&provider, &chars);
            assert_eq!(orbits.len(), if q % 2 == 1 { 2 } else { 1 });
            let mut orbit_dims: Vec<Vec<usize>> = vec![Vec::new(); orbits.len()];
            for (idx, sigma) in chars.iter().enumerate() {
                let d = distinguished_factor_dim(&module, sigma);
                let d_star = distinguished_factor_dim(&module, &sigma.star());
                assert_eq!(d, d_star, "SL_2({}) l={}: dim D_sigma != dim D_sigma*", q, ell);
                let orbit = orbits.iter().position(|o| o.contains(&idx)).unwrap();
                orbit_dims[orbit].push(d);
            }
            println!(
                "  sl2 q={} l={}: per-orbit distinguished factor dims {:?}",
                q, ell, orbit_dims
            );
        }
    }
    println!("acceptance criterion 10 (SL_2 duality dim D_sigma = dim D_sigma*): PASS");
}

#[test]
fn criterion_11_field_independence() {
    let mut instances: Vec<(u64, usize)> = base_instances();
    instances.push((7, 2));
    for (q, n) in instances {
        let provider = gl(q, n);
        let p = provider.field().p();
        let mut dim_s_across_ell: Option<Vec<(Vec<u64>, usize)>> = None;
        for ell in ells(p, &[2, 3, 5, 7, 13]) {
            let m = CoeffField::minimal_extension_degree(p, ell).unwrap();
            let cf = CoeffField::with_extension(p, ell, m).unwrap();
            let table = sigma_dimension_table(&provider, &cf).unwrap();
            // Same submodule dimensions over the doubled extension degree.
            let cf2 = CoeffField::with_extension(p, ell, 2 * m).unwrap();
            let table2 = sigma_dimension_table(&provider, &cf2).unwrap();
            assert_eq!(
                table, table2,
                "GL_{}({}) l={}: dimensions changed between m={} and m={}",
                n, q, ell, m, 2 * m
            );
            // dim S is independent of l as well.
            let dim_s: Vec<(Vec<u64>, usize)> =
                table.iter().map(|t| (t.params.clone(), t.dim_s)).collect();
            match &dim_s_across_ell {
                None => dim_s_across_ell = Some(dim_s),
                Some(prev) => assert_eq!(
                    *prev, dim_s,
                    "GL_{}({}): dim S depends on l = {}",
                    n, q, ell
                ),
            }
        }
    }
    println!("acceptance criterion 11 (dim S independent of l and of the extension degree): PASS");
}
