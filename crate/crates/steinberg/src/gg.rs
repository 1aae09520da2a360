//! Regular characters of the unipotent radical, the submodules they generate,
//! and the verification suite.
//!
//! A regular character is determined by nonzero parameters `a_1..a_{n-1}` of
//! the structure field: it sends an upper unitriangular `u` to
//! `psi(sum_i a_i u_{i,i+1})`, where `psi` is the additive character of
//! `F_q`.  Such characters kill the commutator-level entries above the
//! superdiagonal and restrict nontrivially to every simple-root subgroup;
//! degenerate parameter tuples are rejected at construction.
//!
//! For each regular character the toolkit computes the submodule generated
//! by the weighted coset sum over the longest Weyl cell, its dimension, and
//! the rank of the bilinear pairing against the dual character's submodule.
//! That rank is the dimension of the distinguished composition factor of the
//! Steinberg module.

use std::collections::HashMap;
use std::time::Instant;

use thiserror::Error;

use crate::bn::{BnProvider, GroupElement, GroupKind};
use crate::fields::{AdditiveCharacter, CoeffField, FieldError, FqElem, KScalar};
use crate::linalg::{echelonize, matrix_rank, pairing_rank, KVector, SubspaceBasis};
use crate::perm::{PermError, PermModule};
use crate::report::{CheckResult, FactorReport, SigmaReport};
use crate::rng::SplitMix64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GgError {
    #[error("degenerate character rejected: every parameter must be nonzero")]
    Degenerate,
    #[error("expected {expected} character parameters, got {got}")]
    WrongParamCount { expected: usize, got: usize },
    #[error("conjugating element must be an invertible diagonal matrix of matching size")]
    NotInTorus,
    #[error("element is not upper unitriangular")]
    NotUnipotent,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A regular character `sigma : U -> k^x`, given by nonzero superdiagonal
/// weights `a_1..a_{n-1}` and the additive character of the structure field.
#[derive(Clone, Debug)]
pub struct RegularCharacter {
    params: Vec<FqElem>,
    psi: AdditiveCharacter,
}

impl RegularCharacter {
    pub fn new(
        provider: &BnProvider,
        cf: &CoeffField,
        params: &[u64],
    ) -> Result<RegularCharacter, GgError> {
        let fd = provider.field();
        let expected = provider.n() - 1;
        if params.len() != expected {
            return Err(GgError::WrongParamCount { expected, got: params.len() });
        }
        let mut elems = Vec::with_capacity(expected);
        for &a in params {
            let e = fd.elem(a)?;
            if e.value() == 0 {
                return Err(GgError::Degenerate);
            }
            elems.push(e);
        }
        let psi = AdditiveCharacter::new(fd, cf)?;
        Ok(RegularCharacter { params: elems, psi })
    }

    fn with_params(&self, params: Vec<FqElem>) -> RegularCharacter {
        debug_assert!(params.iter().all(|a| a.value() != 0));
        RegularCharacter { params, psi: self.psi.clone() }
    }

    /// Parameter encodings `(a_1..a_{n-1})`.
    pub fn params(&self) -> Vec<u64> {
        self.params.iter().map(|a| a.value()).collect()
    }

    /// Evaluate on an upper unitriangular matrix.
    pub fn eval(&self, u: &GroupElement) -> KScalar {
        let fd = self.psi.field();
        debug_assert!(u.is_upper_unitriangular(fd));
        let mut sum = fd.zero();
        for (i, &a) in self.params.iter().enumerate() {
            sum = fd.add(sum, fd.mul(a, u.entry(i, i + 1)));
        }
        self.psi.eval(sum)
    }

    /// The dual character `sigma*(u) = sigma(u)^{-1}`, with parameters `-a_i`.
    pub fn star(&self) -> RegularCharacter {
        let fd = self.psi.field();
        self.with_params(self.params.iter().map(|&a| fd.neg(a)).collect())
    }

    /// The conjugate `sigma^h(u) = sigma(h^{-1} u h)` for a torus element
    /// `h = diag(t_1..t_n)`; its parameters are `a_i t_{i+1} / t_i`.
    pub fn conjugate_by(&self, h: &GroupElement) -> Result<RegularCharacter, GgError> {
        let fd = self.psi.field();
        if h.n() != self.params.len() + 1 || !h.is_diagonal_invertible(fd) {
            return Err(GgError::NotInTorus);
        }
        let params = self
            .params
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let ratio = fd.mul(h.entry(i + 1, i + 1), fd.inv(h.entry(i, i)));
                fd.mul(a, ratio)
            })
            .collect();
        Ok(self.with_params(params))
    }
}

/// Number of regular characters: `(q-1)^(n-1)` for `GL_n` (this equals
/// `|H/Z(G)|`), `q-1` for `SL_2`.
pub fn expected_regular_count(provider: &BnProvider) -> u64 {
    let q = provider.q();
    match provider.kind() {
        GroupKind::GeneralLinear => (q - 1).pow(provider.n() as u32 - 1),
        GroupKind::SpecialLinear2 => q - 1,
    }
}

/// All regular characters, parameters enumerated in mixed-radix order with
/// the first parameter most significant.
pub fn regular_characters(provider: &BnProvider, cf: &CoeffField) -> Vec<RegularCharacter> {
    let q = provider.q();
    let len = provider.n() - 1;
    let count = (q - 1).pow(len as u32);
    let mut out = Vec::with_capacity(count as usize);
    for idx in 0..count {
        let mut params = vec![0u64; len];
        let mut rem = idx;
        for slot in params.iter_mut().rev() {
            *slot = rem % (q - 1) + 1;
            rem /= q - 1;
        }
        out.push(
            RegularCharacter::new(provider, cf, &params)
                .expect("enumerated parameters are nonzero"),
        );
    }
    out
}

/// Partition of the character list into torus-conjugation orbits; each orbit
/// is a sorted list of indices into the input slice.
pub fn h_orbit_partition(provider: &BnProvider, chars: &[RegularCharacter]) -> Vec<Vec<usize>> {
    let index_of: HashMap<Vec<u64>, usize> =
        chars.iter().enumerate().map(|(i, c)| (c.params(), i)).collect();
    let mut orbit_of = vec![usize::MAX; chars.len()];
    let mut orbits: Vec<Vec<usize>> = Vec::new();
    for start in 0..chars.len() {
        if orbit_of[start] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members = Vec::new();
        let mut stack = vec![start];
        orbit_of[start] = id;
        while let Some(i) = stack.pop() {
            members.push(i);
            for h in provider.torus_elements() {
                let conj = chars[i].conjugate_by(h).expect("torus elements are diagonal");
                let j = index_of[&conj.params()];
                if orbit_of[j] == usize::MAX {
                    orbit_of[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        orbits.push(members);
    }
    orbits
}

/// The submodule generated by the longest-cell Gelfand-Graev vector: the
/// spin closure of `sum_u sigma(u) [u n_0 B]` under the group generators.
/// It is contained in the Steinberg submodule.
pub fn gg_submodule(module: &PermModule, sigma: &RegularCharacter) -> SubspaceBasis {
    let seed = module.gg_vector(sigma, module.provider().longest_element());
    module.spin_submodule(&[seed])
}

/// Dimension of the distinguished composition factor: the rank of the
/// bilinear pairing between the submodules of `sigma` and of its dual.
pub fn distinguished_factor_dim(module: &PermModule, sigma: &RegularCharacter) -> usize {
    let s = gg_submodule(module, sigma);
    let s_star = gg_submodule(module, &sigma.star());
    pairing_rank(module.coefficients(), &s, &s_star, |a, b| module.form(a, b))
}

/// Number of Weyl representatives conjugating `u` back into the unipotent
/// radical: `|{w : n_w^{-1} u n_w upper unitriangular}|`.
pub fn weyl_conjugation_count(provider: &BnProvider, u: &GroupElement) -> Result<usize, GgError> {
    let fd = provider.field();
    if !u.is_upper_unitriangular(fd) {
        return Err(GgError::NotUnipotent);
    }
    Ok(provider
        .weyl_elements()
        .iter()
        .filter(|w| {
            let conj = w.rep().transpose(fd).mul(fd, u).mul(fd, w.rep());
            conj.is_upper_unitriangular(fd)
        })
        .count())
}

/// The `|U| x |U|` integer Gram matrix of the translated Steinberg basis:
/// entry `(i, j)` counts the Weyl conjugations taking `u_i^{-1} u_j` back
/// into `U`.  Its reduction mod `l` is the Gram matrix of the form on the
/// Steinberg submodule.
pub fn steinberg_gram_matrix(provider: &BnProvider) -> Vec<Vec<u64>> {
    let fd = provider.field();
    let units = provider.unipotent_elements();
    let inverses: Vec<GroupElement> =
        units.iter().map(|u| u.inverse(fd).expect("unipotent elements are invertible")).collect();
    units
        .iter()
        .enumerate()
        .map(|(i, _)| {
            units
                .iter()
                .map(|uj| {
                    weyl_conjugation_count(provider, &inverses[i].mul(fd, uj))
                        .expect("products of unipotents are unipotent") as u64
                })
                .collect()
        })
        .collect()
}

/// Rank of an integer matrix after reduction into the coefficient field.
pub fn gram_rank_mod(cf: &CoeffField, gram: &[Vec<u64>]) -> usize {
    let rows: Vec<Vec<KScalar>> =
        gram.iter().map(|row| row.iter().map(|&v| cf.from_int(v as i64)).collect()).collect();
    matrix_rank(cf, rows)
}

/// Per-character dimension data, used for cross-field comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaDims {
    pub params: Vec<u64>,
    pub dim_s: usize,
    pub dim_d: usize,
}

/// Dimensions of every regular character's submodule and distinguished
/// factor over the given coefficient field.
pub fn sigma_dimension_table(
    provider: &BnProvider,
    cf: &CoeffField,
) -> Result<Vec<SigmaDims>, PermError> {
    let module = PermModule::new(provider, cf)?;
    let chars = regular_characters(provider, cf);
    let mut memo: HashMap<Vec<u64>, SubspaceBasis> = HashMap::new();
    let mut out = Vec::with_capacity(chars.len());
    for sigma in &chars {
        let s = memo
            .entry(sigma.params())
            .or_insert_with(|| gg_submodule(&module, sigma))
            .clone();
        let star = sigma.star();
        let s_star = memo
            .entry(star.params())
            .or_insert_with(|| gg_submodule(&module, &star))
            .clone();
        let dim_d = pairing_rank(cf, &s, &s_star, |a, b| module.form(a, b));
        out.push(SigmaDims { params: sigma.params(), dim_s: s.dim(), dim_d });
    }
    Ok(out)
}

/// Tunable knobs for [`verify_suite`].  Defaults match the documented CLI
/// behaviour; the seed is fixed so reports are byte-reproducible.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Random Bruhat decompose/recompose round trips.
    pub bruhat_samples: usize,
    /// Sample count for the randomized action/form checks.
    pub random_samples: usize,
    /// Exhaustive group enumeration is attempted up to this order.
    pub exhaustive_limit: u64,
    /// Re-run the dimension table over the doubled extension degree.
    pub check_m_independence: bool,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> VerifyOptions {
        VerifyOptions {
            bruhat_samples: 10_000,
            random_samples: 100,
            exhaustive_limit: 20_000,
            check_m_independence: true,
            seed: 0x5eed_cafe,
        }
    }
}

fn push(checks: &mut Vec<CheckResult>, name: &str, pass: bool, witness: String) {
    checks.push(CheckResult { name: name.to_string(), pass, witness });
}

/// Run every named consistency check for one instance and collect the
/// per-character dimension table.  Failures are recorded in the report, not
/// raised; the only error is a mismatched coefficient field.
pub fn verify_suite(
    provider: &BnProvider,
    cf: &CoeffField,
    opts: &VerifyOptions,
) -> Result<FactorReport, PermError> {
    let start = Instant::now();
    let module = PermModule::new(provider, cf)?;
    let fd = provider.field();
    let n = provider.n();
    let q = provider.q();
    let dim = module.dim();
    let u_order = provider.unipotent_order();
    let mut rng = SplitMix64::new(opts.seed);
    let mut checks: Vec<CheckResult> = Vec::new();

    // --- field layer -------------------------------------------------------
    let zeta = cf.zeta();
    push(
        &mut checks,
        "zeta_order",
        cf.pow(zeta, fd.p()) == cf.one() && zeta != cf.one(),
        format!("zeta = {}, zeta^{} = {}", zeta, fd.p(), cf.pow(zeta, fd.p())),
    );

    let psi = AdditiveCharacter::new(fd, cf).expect("characteristics match");
    let psi_sum = fd.elements().fold(cf.zero(), |acc, x| cf.add(acc, psi.eval(x)));
    push(&mut checks, "psi_character_sum", psi_sum == cf.zero(), format!("sum = {}", psi_sum));

    push(
        &mut checks,
        "unipotent_order_invertible",
        cf.from_int(u_order as i64).value() != 0,
        format!("|U| = {} maps to {}", u_order, cf.from_int(u_order as i64)),
    );

    // --- BN-pair layer ------------------------------------------------------
    let formula: u64 = (1..=n)
        .map(|i| (0..i).map(|e| q.pow(e as u32)).sum::<u64>())
        .product();
    push(
        &mut checks,
        "coset_count_formula",
        dim as u64 == formula,
        format!("[G:B] = {}, formula gives {}", dim, formula),
    );

    let w0 = provider.longest_element();
    let max_len = n * (n - 1) / 2;
    let longest_count =
        provider.weyl_elements().iter().filter(|w| w.length() == max_len).count();
    let w0_squared = w0.rep().mul(fd, w0.rep());
    push(
        &mut checks,
        "weyl_structure",
        longest_count == 1
            && w0.length() == max_len
            && w0_squared == GroupElement::identity(fd, n),
        format!("|W| = {}, l(w0) = {}", provider.weyl_elements().len(), w0.length()),
    );

    let n0_inv = w0.rep().transpose(fd);
    let mut lower_ok = true;
    let mut meet = 0usize;
    for u in provider.unipotent_elements() {
        let v = n0_inv.mul(fd, u).mul(fd, w0.rep());
        lower_ok &= v.is_lower_unitriangular(fd);
        if v.is_upper_unitriangular(fd) && u.is_upper_unitriangular(fd) {
            // v in U cap V forces v = 1 in the matrix model.
            meet += usize::from(provider.unipotent_elements().contains(&v));
        }
    }
    push(
        &mut checks,
        "u_meets_v_trivially",
        lower_ok && meet == 1,
        format!("|U cap V| = {}", meet),
    );

    let mut roundtrip_ok = true;
    for _ in 0..opts.bruhat_samples {
        let g = provider.random_element(&mut rng);
        let Ok(d) = provider.bruhat_decompose(&g) else {
            roundtrip_ok = false;
            break;
        };
        let w = provider.weyl(d.weyl_index);
        let recomposed = d.b.mul(fd, w.rep()).mul(fd, &d.u);
        if recomposed != g || !provider.u_w_contains(&d.u, w) {
            roundtrip_ok = false;
            break;
        }
    }
    push(
        &mut checks,
        "bruhat_roundtrip",
        roundtrip_ok,
        format!("{} random elements recomposed exactly", opts.bruhat_samples),
    );

    if provider.group_order() <= opts.exhaustive_limit {
        let all = provider
            .enumerate_group(opts.exhaustive_limit as usize + 1)
            .expect("order is under the limit");
        let mut cell_sizes = vec![0u64; provider.weyl_elements().len()];
        let mut decompose_ok = true;
        for g in &all {
            match provider.bruhat_decompose(g) {
                Ok(d) => cell_sizes[d.weyl_index] += 1,
                Err(_) => decompose_ok = false,
            }
        }
        let sizes_ok = provider
            .weyl_elements()
            .iter()
            .zip(&cell_sizes)
            .all(|(w, &size)| size == provider.borel_order() * q.pow(w.length() as u32));
        let total: u64 = cell_sizes.iter().sum();
        push(
            &mut checks,
            "bruhat_cell_sum",
            decompose_ok && sizes_ok && total == provider.group_order(),
            format!("sum_w |B| q^l(w) = {} = |G| = {}", total, provider.group_order()),
        );
    }

    // --- module layer -------------------------------------------------------
    let mut comp_ok = true;
    for _ in 0..opts.random_samples {
        let g1 = provider.random_element(&mut rng);
        let g2 = provider.random_element(&mut rng);
        let i = rng.below(dim as u64) as usize;
        let v = module.basis_vector(i);
        let lhs = module.act(&g1, &module.act(&g2, &v));
        let rhs = module.act(&g1.mul(fd, &g2), &v);
        comp_ok &= lhs == rhs;
    }
    push(
        &mut checks,
        "action_composition",
        comp_ok,
        format!("{} sampled pairs", opts.random_samples),
    );

    let mut ortho_ok = true;
    let ortho_pairs: Vec<(usize, usize)> = if dim <= 64 {
        (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j))).collect()
    } else {
        (0..opts.random_samples)
            .map(|_| (rng.below(dim as u64) as usize, rng.below(dim as u64) as usize))
            .collect()
    };
    for &(i, j) in &ortho_pairs {
        let val = module.form(&module.basis_vector(i), &module.basis_vector(j));
        ortho_ok &= val == if i == j { cf.one() } else { cf.zero() };
    }
    push(&mut checks, "form_orthonormal", ortho_ok, format!("{} basis pairs", ortho_pairs.len()));

    let random_vector = |rng: &mut SplitMix64| {
        KVector::new((0..dim).map(|_| cf.scalar(rng.below(cf.order())).unwrap()).collect())
    };
    let mut invariance_ok = true;
    for _ in 0..opts.random_samples {
        let g = provider.random_element(&mut rng);
        let v1 = random_vector(&mut rng);
        let v2 = random_vector(&mut rng);
        invariance_ok &= module.form(&module.act(&g, &v1), &module.act(&g, &v2))
            == module.form(&v1, &v2);
        invariance_ok &= module.form(&v1, &v2) == module.form(&v2, &v1);
    }
    push(
        &mut checks,
        "form_invariance",
        invariance_ok,
        format!("{} sampled (g, v1, v2) triples", opts.random_samples),
    );

    let st = module.steinberg_basis();
    push(
        &mut checks,
        "steinberg_dim",
        st.dim() as u64 == u_order,
        format!("dim St = {}, |U| = {}", st.dim(), u_order),
    );

    // --- per-character checks ------------------------------------------------
    let chars = regular_characters(provider, cf);
    let orbits = h_orbit_partition(provider, &chars);
    let orbit_of = |i: usize| orbits.iter().position(|o| o.contains(&i)).unwrap();

    let seeds: Vec<KVector> =
        chars.iter().map(|sigma| module.gg_vector(sigma, w0)).collect();

    let mut vanishing_ok = true;
    let mut nonzero_ok = true;
    for (sigma, seed) in chars.iter().zip(&seeds) {
        for w in provider.weyl_elements() {
            if w.length() == w0.length() {
                continue;
            }
            vanishing_ok &= module.gg_vector(sigma, w).is_zero();
        }
        nonzero_ok &= !seed.is_zero() && seed.support_size() as u64 == u_order;
    }
    push(
        &mut checks,
        "gg_vanishing",
        vanishing_ok,
        format!("{} characters x {} non-longest cells", chars.len(), provider.weyl_elements().len() - 1),
    );
    push(
        &mut checks,
        "gg_longest_nonzero",
        nonzero_ok,
        format!("longest-cell support = |U| = {} for every character", u_order),
    );

    let mut image_line_ok = true;
    let mut image_span_ok = true;
    for (sigma, seed) in chars.iter().zip(&seeds) {
        let image = module.gg_image(sigma);
        image_line_ok &= image.dim() == 1;
        image_span_ok &= image.contains(cf, seed);
    }
    push(&mut checks, "gg_image_line", image_line_ok, "dim u_sigma k[G/B] = 1".to_string());
    push(
        &mut checks,
        "gg_image_spanned_by_longest",
        image_span_ok,
        "image line contains the longest-cell vector".to_string(),
    );

    let scale = cf.from_int(u_order as i64);
    let mut idempotent_ok = true;
    let per_sigma = (opts.random_samples / chars.len().max(1)).clamp(1, dim);
    for sigma in &chars {
        for _ in 0..per_sigma {
            let v = random_vector(&mut rng);
            let once = module.apply_gg(sigma, &v);
            let twice = module.apply_gg(sigma, &once);
            let mut scaled = once.clone();
            scaled.scale_assign(cf, scale);
            idempotent_ok &= twice == scaled;
        }
    }
    push(
        &mut checks,
        "gg_idempotent",
        idempotent_ok,
        format!("u_sigma^2 = |U| u_sigma on {} random vectors per character", per_sigma),
    );

    let e = module.steinberg_vector().e;
    let sign = if w0.length().is_multiple_of(2) { cf.one() } else { cf.neg_one() };
    let mut seed_identity_ok = true;
    for (sigma, seed) in chars.iter().zip(&seeds) {
        let mut expected = seed.clone();
        expected.scale_assign(cf, sign);
        seed_identity_ok &= module.apply_gg(sigma, &e) == expected;
    }
    push(
        &mut checks,
        "steinberg_seed_identity",
        seed_identity_ok,
        format!("u_sigma e = (-1)^{} u_sigma n_0 b", w0.length()),
    );

    let mut pairing_ok = true;
    let mut pairing_witness = cf.zero();
    for (i, sigma) in chars.iter().enumerate() {
        let star_seed = module.gg_vector(&sigma.star(), w0);
        let val = module.form(&seeds[i], &star_seed);
        pairing_witness = val;
        pairing_ok &= val == scale && val.value() != 0;
    }
    push(
        &mut checks,
        "seed_pairing",
        pairing_ok,
        format!("<u_sigma n_0 b, u_sigma* n_0 b> = {} = |U| 1_k", pairing_witness),
    );

    let mut memo: HashMap<Vec<u64>, SubspaceBasis> = HashMap::new();
    for sigma in &chars {
        memo.entry(sigma.params()).or_insert_with(|| gg_submodule(&module, sigma));
    }
    let mut in_st_ok = true;
    for sigma in &chars {
        in_st_ok &= memo[&sigma.params()].is_subspace_of(cf, &st);
    }
    push(
        &mut checks,
        "submodule_in_steinberg",
        in_st_ok,
        "every S_sigma basis row lies in St".to_string(),
    );

    let expected_count = expected_regular_count(provider);
    push(
        &mut checks,
        "regular_character_count",
        chars.len() as u64 == expected_count,
        format!("{} characters, expected {}", chars.len(), expected_count),
    );

    let seed_rank = echelonize(cf, &seeds).expect("seeds share the module dimension").dim();
    push(
        &mut checks,
        "seed_linear_independence",
        seed_rank == chars.len(),
        format!("rank of the {} seeds = {}", chars.len(), seed_rank),
    );

    let mut conj_formula_ok = true;
    let exhaustive_u = u_order <= 64;
    let torus_sample: Vec<&GroupElement> = if provider.torus_elements().len() <= 64 {
        provider.torus_elements().iter().collect()
    } else {
        (0..64)
            .map(|_| &provider.torus_elements()[rng.below(provider.torus_order()) as usize])
            .collect()
    };
    for sigma in &chars {
        for h in &torus_sample {
            let conj = sigma.conjugate_by(h).expect("torus elements are diagonal");
            let h_inv = h.inverse(fd).expect("torus elements are invertible");
            let mut check_u = |u: &GroupElement| {
                let inner = h_inv.mul(fd, u).mul(fd, h);
                conj_formula_ok &= conj.eval(u) == sigma.eval(&inner);
            };
            if exhaustive_u {
                for u in provider.unipotent_elements() {
                    check_u(u);
                }
            } else {
                for _ in 0..opts.random_samples {
                    let i = rng.below(u_order) as usize;
                    check_u(&provider.unipotent_elements()[i]);
                }
            }
        }
    }
    push(
        &mut checks,
        "torus_conjugation_formula",
        conj_formula_ok,
        format!(
            "sigma^h(u) = sigma(h^-1 u h), {} u-checks per (sigma, h), {} h per sigma",
            if exhaustive_u { u_order as usize } else { opts.random_samples },
            torus_sample.len()
        ),
    );

    // S_(sigma^h) runs over the torus orbit of sigma, so orbit-wide equality
    // of the memoized bases is exactly stability under every h.
    let mut stability_ok = true;
    for orbit in &orbits {
        let rep = &memo[&chars[orbit[0]].params()];
        for &i in orbit {
            stability_ok &= memo[&chars[i].params()] == *rep;
        }
    }
    push(
        &mut checks,
        "torus_conjugation_stability",
        stability_ok,
        "S_(sigma^h) = S_sigma for every torus element".to_string(),
    );

    let star_ok = chars.iter().all(|sigma| sigma.star().star().params() == sigma.params());
    push(&mut checks, "star_involution", star_ok, "sigma** = sigma".to_string());

    // --- Gram matrix ----------------------------------------------------------
    let gram = steinberg_gram_matrix(provider);
    let translates: Vec<KVector> = provider
        .unipotent_elements()
        .iter()
        .map(|u| module.act(u, &e))
        .collect();
    let w_order = provider.weyl_elements().len() as u64;
    let mut gram_ok = (0..translates.len()).all(|i| gram[i][i] == w_order);
    let gram_pairs: Vec<(usize, usize)> = if u_order <= 32 {
        (0..translates.len())
            .flat_map(|i| (0..translates.len()).map(move |j| (i, j)))
            .collect()
    } else {
        (0..opts.random_samples * 10)
            .map(|_| (rng.below(u_order) as usize, rng.below(u_order) as usize))
            .collect()
    };
    for &(i, j) in &gram_pairs {
        gram_ok &= gram[i][j] == gram[j][i];
        gram_ok &= module.form(&translates[i], &translates[j]) == cf.from_int(gram[i][j] as i64);
    }
    push(
        &mut checks,
        "gram_matrix_formula",
        gram_ok,
        format!(
            "<u1 e, u2 e> = c(u1^-1 u2) 1_k on {} pairs; diagonal = |W| = {}",
            gram_pairs.len(),
            w_order
        ),
    );

    // --- dimensions ------------------------------------------------------------
    let mut sigmas = Vec::with_capacity(chars.len());
    for (i, sigma) in chars.iter().enumerate() {
        let s = &memo[&sigma.params()];
        let s_star = &memo[&sigma.star().params()];
        let dim_d = pairing_rank(cf, s, s_star, |a, b| module.form(a, b));
        sigmas.push(SigmaReport {
            params: sigma.params(),
            dim_s: s.dim(),
            dim_d,
            orbit: orbit_of(i),
        });
    }

    let mut duality_ok = true;
    for (i, sigma) in chars.iter().enumerate() {
        let star_params = sigma.star().params();
        let j = chars.iter().position(|c| c.params() == star_params).unwrap();
        duality_ok &= sigmas[i].dim_d == sigmas[j].dim_d;
    }
    push(
        &mut checks,
        "duality_dims",
        duality_ok,
        "dim D_sigma = dim D_sigma* for every character".to_string(),
    );

    if provider.kind() == GroupKind::GeneralLinear {
        let s_eq_st = sigmas.iter().all(|s| {
            s.dim_s as u64 == u_order && memo[&s.params] == st
        });
        push(
            &mut checks,
            "s_equals_steinberg",
            s_eq_st,
            format!("S_sigma = St of dimension {} for every character", u_order),
        );

        let bound = expected_count as usize;
        let bound_ok = sigmas.iter().all(|s| s.dim_s >= bound);
        push(
            &mut checks,
            "regular_seed_dimension_bound",
            bound_ok,
            format!("dim S >= |H/Z| = {}", bound),
        );

        let gram_rank = gram_rank_mod(cf, &gram);
        let cross_ok = sigmas.iter().all(|s| s.dim_d == gram_rank);
        push(
            &mut checks,
            "cross_route_gram_rank",
            cross_ok,
            format!("rank of Gram mod {} = {}", cf.ell(), gram_rank),
        );
    }

    if !(dim as u64).is_multiple_of(cf.ell()) {
        let irr_ok = sigmas.iter().all(|s| s.dim_d as u64 == u_order);
        push(
            &mut checks,
            "irreducibility_implication",
            irr_ok,
            format!("l does not divide [G:B] = {}, so dim D = |U| = {}", dim, u_order),
        );
    } else {
        push(
            &mut checks,
            "irreducibility_implication",
            true,
            format!("vacuous: l = {} divides [G:B] = {}", cf.ell(), dim),
        );
    }

    let monotone_ok = sigmas
        .iter()
        .all(|s| s.dim_d <= s.dim_s && s.dim_s <= st.dim() && st.dim() <= dim);
    push(
        &mut checks,
        "dims_monotone",
        monotone_ok,
        "dim D <= dim S <= dim St <= [G:B]".to_string(),
    );

    if opts.check_m_independence {
        match CoeffField::with_extension(fd.p(), cf.ell(), 2 * cf.m()) {
            Ok(cf2) => {
                let base: Vec<SigmaDims> = sigmas
                    .iter()
                    .map(|s| SigmaDims { params: s.params.clone(), dim_s: s.dim_s, dim_d: s.dim_d })
                    .collect();
                let doubled = sigma_dimension_table(provider, &cf2)?;
                push(
                    &mut checks,
                    "m_independence",
                    base == doubled,
                    format!("dimensions agree over extension degrees {} and {}", cf.m(), 2 * cf.m()),
                );
            }
            Err(err) => {
                push(
                    &mut checks,
                    "m_independence",
                    true,
                    format!("not run: doubled extension unavailable ({})", err),
                );
            }
        }
    }

    let group = match provider.kind() {
        GroupKind::GeneralLinear => "gl",
        GroupKind::SpecialLinear2 => "sl2",
    };
    Ok(FactorReport {
        group: group.to_string(),
        n,
        q,
        p: fd.p(),
        f: fd.f(),
        ell: cf.ell(),
        m: cf.m(),
        index_gb: dim,
        dim_st: st.dim(),
        sigmas,
        checks,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::FieldDesc;

    fn gl_module(p: u64, f: u32, n: usize, ell: u64) -> (BnProvider, CoeffField, PermModule) {
        let fd = FieldDesc::new(p, f).unwrap();
        let provider = BnProvider::gl(&fd, n).unwrap();
        let cf = CoeffField::new(p, ell).unwrap();
        let module = PermModule::new(&provider, &cf).unwrap();
        (provider, cf, module)
    }

    #[test]
    fn character_counts() {
        let fd = FieldDesc::new(2, 1).unwrap();
        let provider = BnProvider::gl(&fd, 3).unwrap();
        let cf = CoeffField::new(2, 3).unwrap();
        assert_eq!(regular_characters(&provider, &cf).len(), 1);

        let fd = FieldDesc::new(2, 2).unwrap();
        let provider = BnProvider::gl(&fd, 2).unwrap();
        let cf = CoeffField::new(2, 3).unwrap();
        assert_eq!(regular_characters(&provider, &cf).len(), 3);
        assert_eq!(expected_regular_count(&provider), 3);
    }

    #[test]
    fn degenerate_characters_rejected() {
        let fd = FieldDesc::new(3, 1).unwrap();
        let provider = BnProvider::gl(&fd, 3).unwrap();
        let cf = CoeffField::new(3, 2).unwrap();
        assert_eq!(
            RegularCharacter::new(&provider, &cf, &[1, 0]).unwrap_err(),
            GgError::Degenerate
        );
        assert!(matches!(
            RegularCharacter::new(&provider, &cf, &[1]).unwrap_err(),
            GgError::WrongParamCount { expected: 2, got: 1 }
        ));
    }

    #[test]
    fn character_is_homomorphism() {
        let (provider, _cf, _m) = gl_module(3, 1, 3, 2);
        let fd = provider.field();
        let cf = CoeffField::new(3, 2).unwrap();
        let sigma = RegularCharacter::new(&provider, &cf, &[1, 2]).unwrap();
        for u1 in provider.unipotent_elements() {
            for u2 in provider.unipotent_elements() {
                let prod = u1.mul(fd, u2);
                assert_eq!(sigma.eval(&prod), cf.mul(sigma.eval(u1), sigma.eval(u2)));
            }
        }
        // Entries above the superdiagonal do not enter: sigma kills them.
        let mut deep = GroupElement::identity(fd, 3);
        deep.set_entry(0, 2, fd.elem(2).unwrap());
        assert_eq!(sigma.eval(&deep), cf.one());
    }

    #[test]
    fn star_and_conjugation_parameters() {
        // Characteristic 2: sigma* = sigma.
        let fd = FieldDesc::new(2, 2).unwrap();
        let provider = BnProvider::gl(&fd, 2).unwrap();
        let cf = CoeffField::new(2, 3).unwrap();
        let sigma = RegularCharacter::new(&provider, &cf, &[2]).unwrap();
        assert_eq!(sigma.star().params(), sigma.params());

        // GL_2(5), h = diag(2, 1): a -> a * t_2/t_1 = 3a mod 5.
        let fd = FieldDesc::new(5, 1).unwrap();
        let provider = BnProvider::gl(&fd, 2).unwrap();
        let cf = CoeffField::new(5, 2).unwrap();
        let sigma = RegularCharacter::new(&provider, &cf, &[1]).unwrap();
        let h = GroupElement::from_rows(fd_ref(&provider), &[vec![2, 0], vec![0, 1]]).unwrap();
        assert_eq!(sigma.conjugate_by(&h).unwrap().params(), vec![3]);
        // Identity conjugation is trivial.
        let id = GroupElement::identity(fd_ref(&provider), 2);
        assert_eq!(sigma.conjugate_by(&id).unwrap().params(), sigma.params());
        // Non-diagonal elements are rejected.
        let bad = GroupElement::from_rows(fd_ref(&provider), &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(sigma.conjugate_by(&bad).unwrap_err(), GgError::NotInTorus);
    }

    fn fd_ref(provider: &BnProvider) -> &FieldDesc {
        provider.field()
    }

    #[test]
    fn sl2_orbits_are_square_classes() {
        let fd = FieldDesc::new(5, 1).unwrap();
        let provider = BnProvider::sl2(&fd).unwrap();
        let cf = CoeffField::new(5, 2).unwrap();
        let chars = regular_characters(&provider, &cf);
        assert_eq!(chars.len(), 4);
        let orbits = h_orbit_partition(&provider, &chars);
        assert_eq!(orbits.len(), 2);
        let params: Vec<Vec<u64>> =
            orbits.iter().map(|o| o.iter().map(|&i| chars[i].params()[0]).collect()).collect();
        // Squares mod 5 are {1, 4}; the other class is {2, 3}.
        assert_eq!(params[0], vec![1, 4]);
        assert_eq!(params[1], vec![2, 3]);
    }

    #[test]
    fn submodule_dims_small_instances() {
        let (provider, cf, module) = gl_module(3, 1, 2, 2);
        let sigma = &regular_characters(&provider, &cf)[0];
        let s = gg_submodule(&module, sigma);
        assert_eq!(s.dim(), 3, "S = St of dimension |U| = q = 3");
        assert_eq!(distinguished_factor_dim(&module, sigma), 2, "l = 2 divides q + 1 = 4");

        let (provider, cf, module) = gl_module(2, 1, 3, 3);
        let sigma = &regular_characters(&provider, &cf)[0];
        assert_eq!(gg_submodule(&module, sigma).dim(), 8);
    }

    #[test]
    fn dim_d_full_rank_when_ell_coprime() {
        let fd = FieldDesc::new(3, 1).unwrap();
        let provider = BnProvider::gl(&fd, 2).unwrap();
        let cf = CoeffField::new(3, 13).unwrap();
        let module = PermModule::new(&provider, &cf).unwrap();
        let sigma = &regular_characters(&provider, &cf)[0];
        assert_eq!(distinguished_factor_dim(&module, sigma), 3, "13 does not divide [G:B] = 4");
    }

    #[test]
    fn brute_force_translates_match_spin() {
        // GL_2(2), l = 3: the span of all |G| = 6 translates of the seed
        // equals the spun submodule and has dimension |U| = 2.
        let (provider, cf, module) = gl_module(2, 1, 2, 3);
        let sigma = &regular_characters(&provider, &cf)[0];
        let seed = module.gg_vector(sigma, provider.longest_element());
        let everyone = provider.enumerate_group(100).unwrap();
        let translates: Vec<KVector> =
            everyone.iter().map(|g| module.act(g, &seed)).collect();
        let brute = echelonize(&cf, &translates).unwrap();
        let spun = gg_submodule(&module, sigma);
        assert_eq!(brute, spun);
        assert_eq!(spun.dim(), 2);
    }

    #[test]
    fn weyl_conjugation_counts_gl2() {
        let fd = FieldDesc::new(3, 1).unwrap();
        let provider = BnProvider::gl(&fd, 2).unwrap();
        let identity = GroupElement::identity(provider.field(), 2);
        assert_eq!(weyl_conjugation_count(&provider, &identity).unwrap(), 2);
        for u in provider.unipotent_elements() {
            if *u != identity {
                assert_eq!(weyl_conjugation_count(&provider, u).unwrap(), 1);
            }
        }
        let gram = steinberg_gram_matrix(&provider);
        assert_eq!(gram, vec![vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]);
        let cf = CoeffField::new(3, 2).unwrap();
        assert_eq!(gram_rank_mod(&cf, &gram), 2);

        let lower = GroupElement::from_rows(provider.field(), &[vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(weyl_conjugation_count(&provider, &lower).unwrap_err(), GgError::NotUnipotent);
    }

    #[test]
    fn verify_suite_gl2_3_mod_2() {
        let fd = FieldDesc::new(3, 1).unwrap();
        let provider = BnProvider::gl(&fd, 2).unwrap();
        let cf = CoeffField::new(3, 2).unwrap();
        let opts = VerifyOptions { bruhat_samples: 500, ..VerifyOptions::default() };
        let report = verify_suite(&provider, &cf, &opts).unwrap();
        for c in &report.checks {
            assert!(c.pass, "check {} failed: {}", c.name, c.witness);
        }
        assert_eq!(report.index_gb, 4);
        assert_eq!(report.dim_st, 3);
        assert_eq!(report.sigmas.len(), 2);
        for s in &report.sigmas {
            assert_eq!(s.dim_s, 3);
            assert_eq!(s.dim_d, 2);
        }
        assert!(report.dims_consistent());
    }

    #[test]
    fn verify_suite_sl2_5() {
        let fd = FieldDesc::new(5, 1).unwrap();
        let provider = BnProvider::sl2(&fd).unwrap();
        let cf = CoeffField::new(5, 2).unwrap();
        let opts = VerifyOptions { bruhat_samples: 500, ..VerifyOptions::default() };
        let report = verify_suite(&provider, &cf, &opts).unwrap();
        for c in &report.checks {
            assert!(c.pass, "check {} failed: {}", c.name, c.witness);
        }
        assert_eq!(report.group, "sl2");
        assert_eq!(report.sigmas.len(), 4);
        // Both torus orbits are represented.
        let orbits: std::collections::BTreeSet<usize> =
            report.sigmas.iter().map(|s| s.orbit).collect();
        assert_eq!(orbits.len(), 2);
    }

    #[test]
    fn generator_choice_does_not_change_dimensions() {
        // Same instance, different primitive element for the coefficient
        // field: the dimension table must agree.
        let fd = FieldDesc::new(3, 1).unwrap();
        let provider = BnProvider::gl(&fd, 2).unwrap();
        let m = CoeffField::minimal_extension_degree(3, 2).unwrap();
        let a = CoeffField::with_generator_rank(3, 2, m, 0).unwrap();
        let b = CoeffField::with_generator_rank(3, 2, m, 1).unwrap();
        assert_ne!(a.primitive_element(), b.primitive_element());
        let da = sigma_dimension_table(&provider, &a).unwrap();
        let db = sigma_dimension_table(&provider, &b).unwrap();
        assert_eq!(da, db);
    }
}
