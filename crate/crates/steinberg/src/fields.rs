//! Exact arithmetic in the two finite fields the toolkit works with.
//!
//! Two distinct roles, two distinct types:
//!
//! * [`FieldDesc`] is the *structure field* `F_q` (`q = p^f`) over which the
//!   matrix groups are defined.  Elements are [`FqElem`] handles.
//! * [`CoeffField`] is the *coefficient field* `F_{l^m}` with `l != p`, over
//!   which all module computations run.  It carries a distinguished element
//!   `zeta` of multiplicative order exactly `p`, so that additive characters
//!   of `F_q` can be evaluated in it.  Elements are [`KScalar`] handles.
//!
//! Elements of either field are encoded as integers `0..order-1` in the
//! polynomial basis: the element `sum c_i x^i` has encoding `sum c_i p^i`.
//! The modulus is the monic irreducible polynomial of the right degree with
//! the least such encoding, so encodings are reproducible across runs.
//! Multiplication uses exp/log tables (built from the least primitive
//! element) for fields of order up to 2^16 and direct polynomial arithmetic
//! above that.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported order for the structure field `F_q`.
pub const STRUCTURE_FIELD_LIMIT: u64 = 1 << 16;

/// Largest supported order for a coefficient field `F_{l^m}`.
pub const COEFF_FIELD_LIMIT: u64 = 1 << 31;

/// Fields of order at most this get exp/log multiplication tables.
const TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {p}^{f} exceeds the supported limit {limit}")]
    FieldTooLarge { p: u64, f: u32, limit: u64 },
    #[error("coefficient characteristic {ell} must differ from the structure characteristic {p}")]
    CharacteristicClash { ell: u64, p: u64 },
    #[error("{ell}^{m} is not 1 mod {p}, so F_{ell}^{m} has no primitive {p}-th root of unity")]
    NoRootOfUnity { ell: u64, m: u32, p: u64 },
    #[error("element encoding {value} is out of range for a field of order {size}")]
    ElementOutOfRange { value: u64, size: u64 },
    #[error("fields describe different structure characteristics ({left} vs {right})")]
    CharacteristicMismatch { left: u64, right: u64 },
}

/// An element of the structure field `F_q`, as its integer encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FqElem(u64);

impl FqElem {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An element of the coefficient field `F_{l^m}`, as its integer encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct KScalar(u64);

impl KScalar {
    pub fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Display for KScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d.checked_mul(d).is_some_and(|dd| dd <= n) {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Prime factors of `n`, ascending, without multiplicity.
fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.checked_mul(d).is_some_and(|dd| dd <= n) {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    base %= modulus;
    let mut acc = 1u64 % modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, modulus);
        }
        base = mulmod(base, base, modulus);
        exp >>= 1;
    }
    acc
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

// ---------------------------------------------------------------------------
// Dense polynomials over F_p, little-endian coefficient vectors.
// Used for modulus selection and as the multiplication fallback for fields
// too large for exp/log tables.
// ---------------------------------------------------------------------------

fn pm_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pm_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mulmod(ai, bj, p)) % p;
        }
    }
    pm_trim(&mut out);
    out
}

/// Remainder of `a` modulo the monic polynomial `m`.
fn pm_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    pm_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (k, &mk) in m.iter().enumerate() {
                let idx = shift + k;
                let sub = mulmod(lead, mk, p);
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        pm_trim(&mut r);
    }
    r
}

fn pm_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    pm_rem(&pm_mul(a, b, p), m, p)
}

fn pm_powmod(base: &[u64], mut exp: u64, m: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = pm_rem(base, m, p);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = pm_mulmod(&acc, &b, m, p);
        }
        b = pm_mulmod(&b, &b, m, p);
        exp >>= 1;
    }
    acc
}

fn pm_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    pm_trim(&mut a);
    pm_trim(&mut b);
    while !b.is_empty() {
        // Make b monic, then reduce a mod b.
        let lead = *b.last().unwrap();
        if lead != 1 {
            let inv = mod_pow(lead, p - 2, p);
            for c in b.iter_mut() {
                *c = mulmod(*c, inv, p);
            }
        }
        let r = pm_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin test: a monic degree-d polynomial over F_p is irreducible iff
/// x^(p^d) = x mod f and gcd(x^(p^(d/r)) - x, f) = 1 for each prime r | d.
fn pm_is_irreducible(f: &[u64], p: u64) -> bool {
    let d = (f.len() - 1) as u32;
    let x = vec![0u64, 1];
    for r in prime_factors(d as u64) {
        let e = p.pow(d / r as u32);
        let mut h = pm_powmod(&x, e, f, p);
        // h - x
        if h.len() < 2 {
            h.resize(2, 0);
        }
        h[1] = (h[1] + p - 1) % p;
        pm_trim(&mut h);
        let g = pm_gcd(f, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    let e = p.pow(d);
    let mut h = pm_powmod(&x, e, f, p);
    if h.len() < 2 {
        h.resize(2, 0);
    }
    h[1] = (h[1] + p - 1) % p;
    pm_trim(&mut h);
    h.is_empty()
}

// ---------------------------------------------------------------------------
// Shared finite-field core.
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct GfCore {
    p: u64,
    deg: u32,
    size: u64,
    /// Monic modulus, little-endian, length deg+1.  For deg 1 this is `x`.
    modulus: Vec<u64>,
    /// Least primitive element (by encoding), or the rank-th one.
    gamma: u64,
    tables: Option<Tables>,
}

#[derive(Debug)]
struct Tables {
    /// exp[i] = gamma^i for 0 <= i < size-1.
    exp: Vec<u32>,
    /// log[e] = discrete log of encoding e; log[0] is unused.
    log: Vec<u32>,
}

impl GfCore {
    fn new(p: u64, deg: u32, gamma_rank: usize, limit: u64) -> Result<GfCore, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if deg == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let size = checked_pow(p, deg)
            .filter(|&s| s <= limit)
            .ok_or(FieldError::FieldTooLarge { p, f: deg, limit })?;

        let modulus = if deg == 1 {
            vec![0, 1]
        } else {
            find_least_irreducible(p, deg)
        };

        let mut core = GfCore { p, deg, size, modulus, gamma: 0, tables: None };
        core.gamma = core.find_primitive(gamma_rank);
        if size <= TABLE_LIMIT {
            core.build_tables();
        }
        Ok(core)
    }

    fn decode(&self, mut v: u64) -> Vec<u64> {
        let mut digits = vec![0u64; self.deg as usize];
        for d in digits.iter_mut() {
            *d = v % self.p;
            v /= self.p;
        }
        digits
    }

    fn encode(&self, poly: &[u64]) -> u64 {
        let mut v = 0u64;
        for &c in poly.iter().rev() {
            v = v * self.p + c;
        }
        v
    }

    fn add(&self, a: u64, b: u64) -> u64 {
        if self.deg == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b, mut out, mut scale) = (a, b, 0u64, 1u64);
        for _ in 0..self.deg {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    fn neg(&self, a: u64) -> u64 {
        if self.deg == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let (mut a, mut out, mut scale) = (a, 0u64, 1u64);
        for _ in 0..self.deg {
            out += ((self.p - a % self.p) % self.p) * scale;
            a /= self.p;
            scale *= self.p;
        }
        out
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    fn raw_mul(&self, a: u64, b: u64) -> u64 {
        if self.deg == 1 {
            return mulmod(a, b, self.p);
        }
        let pa = self.decode(a);
        let pb = self.decode(b);
        let prod = pm_mulmod(&pa, &pb, &self.modulus, self.p);
        self.encode(&prod)
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            let ord = self.size - 1;
            let i = (t.log[a as usize] as u64 + t.log[b as usize] as u64) % ord;
            return t.exp[i as usize] as u64;
        }
        self.raw_mul(a, b)
    }

    fn inv(&self, a: u64) -> u64 {
        assert!(a != 0, "inverse of zero");
        if let Some(t) = &self.tables {
            let ord = self.size - 1;
            let i = (ord - t.log[a as usize] as u64) % ord;
            return t.exp[i as usize] as u64;
        }
        self.pow(a, self.size - 2)
    }

    fn pow(&self, a: u64, exp: u64) -> u64 {
        if exp == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if let Some(t) = &self.tables {
            let ord = self.size - 1;
            let i = ((t.log[a as usize] as u128 * exp as u128) % ord as u128) as u64;
            return t.exp[i as usize] as u64;
        }
        let mut acc = 1u64;
        let mut base = a;
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// The `rank`-th primitive element in encoding order (rank 0 = least).
    fn find_primitive(&self, rank: usize) -> u64 {
        if self.size == 2 {
            return 1;
        }
        let factors = prime_factors(self.size - 1);
        let mut seen = 0usize;
        for a in 2..self.size {
            let primitive = factors.iter().all(|&r| self.pow(a, (self.size - 1) / r) != 1);
            if primitive {
                if seen == rank {
                    return a;
                }
                seen += 1;
            }
        }
        unreachable!("finite field of order {} has a primitive element", self.size)
    }

    fn build_tables(&mut self) {
        let ord = (self.size - 1) as usize;
        let mut exp = vec![0u32; ord];
        let mut log = vec![0u32; self.size as usize];
        let mut acc = 1u64;
        for (i, e) in exp.iter_mut().enumerate() {
            *e = acc as u32;
            log[acc as usize] = i as u32;
            acc = self.raw_mul(acc, self.gamma);
        }
        assert_eq!(acc, 1, "primitive element must have order {}", ord);
        self.tables = Some(Tables { exp, log });
    }

    fn frobenius(&self, a: u64) -> u64 {
        self.pow(a, self.p)
    }
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Monic irreducible degree-`deg` polynomial over F_p with the least integer
/// encoding of its lower coefficients.
fn find_least_irreducible(p: u64, deg: u32) -> Vec<u64> {
    let span = checked_pow(p, deg).expect("size already validated");
    for c in 0..span {
        let mut f = vec![0u64; deg as usize + 1];
        let mut v = c;
        for d in f.iter_mut().take(deg as usize) {
            *d = v % p;
            v /= p;
        }
        f[deg as usize] = 1;
        if pm_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of degree {} over F_{} exist", deg, p)
}

// ---------------------------------------------------------------------------
// Structure field F_q.
// ---------------------------------------------------------------------------

/// The structure field `F_q`, `q = p^f`.  Cheap to clone and share.
#[derive(Clone, Debug)]
pub struct FieldDesc {
    core: Arc<GfCore>,
}

impl FieldDesc {
    pub fn new(p: u64, f: u32) -> Result<FieldDesc, FieldError> {
        let core = GfCore::new(p, f, 0, STRUCTURE_FIELD_LIMIT)?;
        Ok(FieldDesc { core: Arc::new(core) })
    }

    pub fn p(&self) -> u64 {
        self.core.p
    }

    pub fn f(&self) -> u32 {
        self.core.deg
    }

    pub fn q(&self) -> u64 {
        self.core.size
    }

    /// Monic modulus polynomial, little-endian coefficients, length `f + 1`.
    pub fn modulus(&self) -> &[u64] {
        &self.core.modulus
    }

    /// Least primitive element of `F_q^x` in encoding order.
    pub fn primitive_element(&self) -> FqElem {
        FqElem(self.core.gamma)
    }

    pub fn elem(&self, value: u64) -> Result<FqElem, FieldError> {
        if value < self.core.size {
            Ok(FqElem(value))
        } else {
            Err(FieldError::ElementOutOfRange { value, size: self.core.size })
        }
    }

    pub fn zero(&self) -> FqElem {
        FqElem(0)
    }

    pub fn one(&self) -> FqElem {
        FqElem(1)
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.core.size).map(FqElem)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FqElem> {
        (1..self.core.size).map(FqElem)
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.core.add(a.0, b.0))
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.core.sub(a.0, b.0))
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        FqElem(self.core.neg(a.0))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        FqElem(self.core.mul(a.0, b.0))
    }

    /// Panics on zero.
    pub fn inv(&self, a: FqElem) -> FqElem {
        FqElem(self.core.inv(a.0))
    }

    pub fn pow(&self, a: FqElem, exp: u64) -> FqElem {
        FqElem(self.core.pow(a.0, exp))
    }

    /// Field trace into the prime field: `Tr(x) = x + x^p + ... + x^(p^(f-1))`,
    /// returned as an integer in `0..p`.
    pub fn trace(&self, x: FqElem) -> u64 {
        let mut term = x.0;
        let mut acc = 0u64;
        for _ in 0..self.core.deg {
            acc = self.core.add(acc, term);
            term = self.core.frobenius(term);
        }
        debug_assert!(acc < self.core.p, "trace lands in the prime field");
        acc
    }
}

// ---------------------------------------------------------------------------
// Coefficient field F_{l^m} with a primitive p-th root of unity.
// ---------------------------------------------------------------------------

/// The coefficient field `k = F_{l^m}`, `l != p`, containing a distinguished
/// primitive `p`-th root of unity `zeta`.  Cheap to clone and share.
#[derive(Clone, Debug)]
pub struct CoeffField {
    core: Arc<GfCore>,
    structure_prime: u64,
    zeta: u64,
}

impl CoeffField {
    /// Coefficient field with the minimal extension degree `m` such that
    /// `l^m = 1 mod p`.
    pub fn new(p: u64, ell: u64) -> Result<CoeffField, FieldError> {
        let m = Self::minimal_extension_degree(p, ell)?;
        Self::with_extension(p, ell, m)
    }

    /// Coefficient field with an explicit extension degree, which must still
    /// satisfy `l^m = 1 mod p`.
    pub fn with_extension(p: u64, ell: u64, m: u32) -> Result<CoeffField, FieldError> {
        Self::with_generator_rank(p, ell, m, 0)
    }

    /// Like [`CoeffField::with_extension`] but using the `rank`-th primitive
    /// element instead of the least one.  Computed dimensions must not depend
    /// on this choice; tests use it to assert exactly that.
    pub fn with_generator_rank(
        p: u64,
        ell: u64,
        m: u32,
        rank: usize,
    ) -> Result<CoeffField, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if ell == p {
            return Err(FieldError::CharacteristicClash { ell, p });
        }
        let core = GfCore::new(ell, m, rank, COEFF_FIELD_LIMIT)?;
        if (core.size - 1) % p != 0 {
            return Err(FieldError::NoRootOfUnity { ell, m, p });
        }
        let zeta = core.pow(core.gamma, (core.size - 1) / p);
        debug_assert!(zeta != 1 && core.pow(zeta, p) == 1);
        Ok(CoeffField { core: Arc::new(core), structure_prime: p, zeta })
    }

    /// Multiplicative order of `ell` mod `p`: the least `m >= 1` with
    /// `l^m = 1 mod p`.
    pub fn minimal_extension_degree(p: u64, ell: u64) -> Result<u32, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if !is_prime(ell) {
            return Err(FieldError::NotPrime(ell));
        }
        if ell == p {
            return Err(FieldError::CharacteristicClash { ell, p });
        }
        let mut acc = ell % p;
        let mut m = 1u32;
        while acc != 1 {
            acc = mulmod(acc, ell % p, p);
            m += 1;
        }
        Ok(m)
    }

    pub fn ell(&self) -> u64 {
        self.core.p
    }

    pub fn m(&self) -> u32 {
        self.core.deg
    }

    pub fn order(&self) -> u64 {
        self.core.size
    }

    /// The structure-field characteristic this coefficient field serves.
    pub fn structure_prime(&self) -> u64 {
        self.structure_prime
    }

    /// The distinguished primitive `p`-th root of unity.
    pub fn zeta(&self) -> KScalar {
        KScalar(self.zeta)
    }

    pub fn primitive_element(&self) -> KScalar {
        KScalar(self.core.gamma)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.core.modulus
    }

    pub fn scalar(&self, value: u64) -> Result<KScalar, FieldError> {
        if value < self.core.size {
            Ok(KScalar(value))
        } else {
            Err(FieldError::ElementOutOfRange { value, size: self.core.size })
        }
    }

    /// The image of an integer under `Z -> k`, `n -> n * 1_k`.
    pub fn from_int(&self, n: i64) -> KScalar {
        let ell = self.core.p as i64;
        KScalar(n.rem_euclid(ell) as u64)
    }

    pub fn zero(&self) -> KScalar {
        KScalar(0)
    }

    pub fn one(&self) -> KScalar {
        KScalar(1)
    }

    pub fn neg_one(&self) -> KScalar {
        KScalar(self.core.neg(1))
    }

    pub fn add(&self, a: KScalar, b: KScalar) -> KScalar {
        KScalar(self.core.add(a.0, b.0))
    }

    pub fn sub(&self, a: KScalar, b: KScalar) -> KScalar {
        KScalar(self.core.sub(a.0, b.0))
    }

    pub fn neg(&self, a: KScalar) -> KScalar {
        KScalar(self.core.neg(a.0))
    }

    pub fn mul(&self, a: KScalar, b: KScalar) -> KScalar {
        KScalar(self.core.mul(a.0, b.0))
    }

    /// Panics on zero.
    pub fn inv(&self, a: KScalar) -> KScalar {
        KScalar(self.core.inv(a.0))
    }

    pub fn pow(&self, a: KScalar, exp: u64) -> KScalar {
        KScalar(self.core.pow(a.0, exp))
    }

    pub fn elements(&self) -> impl Iterator<Item = KScalar> {
        (0..self.core.size).map(KScalar)
    }
}

/// The additive character `psi(x) = zeta^Tr(x)` of `F_q` with values in `k`.
///
/// `psi` is a nontrivial homomorphism from the additive group of `F_q` into
/// `k^x`; it is the building block for regular characters of the unipotent
/// radical.
#[derive(Clone, Debug)]
pub struct AdditiveCharacter {
    fd: FieldDesc,
    cf: CoeffField,
}

impl AdditiveCharacter {
    pub fn new(fd: &FieldDesc, cf: &CoeffField) -> Result<AdditiveCharacter, FieldError> {
        if fd.p() != cf.structure_prime() {
            return Err(FieldError::CharacteristicMismatch {
                left: fd.p(),
                right: cf.structure_prime(),
            });
        }
        Ok(AdditiveCharacter { fd: fd.clone(), cf: cf.clone() })
    }

    pub fn eval(&self, x: FqElem) -> KScalar {
        self.cf.pow(self.cf.zeta(), self.fd.trace(x))
    }

    pub fn field(&self) -> &FieldDesc {
        &self.fd
    }

    pub fn coefficients(&self) -> &CoeffField {
        &self.cf
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn check_axioms_exhaustive(size: u64, add: impl Fn(u64, u64) -> u64, mul: impl Fn(u64, u64) -> u64, inv: impl Fn(u64) -> u64) {
        for a in 0..size {
            for b in 0..size {
                assert_eq!(add(a, b), add(b, a));
                assert_eq!(mul(a, b), mul(b, a));
                for c in 0..size {
                    assert_eq!(add(add(a, b), c), add(a, add(b, c)));
                    assert_eq!(mul(mul(a, b), c), mul(a, mul(b, c)));
                    assert_eq!(mul(a, add(b, c)), add(mul(a, b), mul(a, c)));
                }
            }
            assert_eq!(add(a, 0), a);
            assert_eq!(mul(a, 1), a);
            if a != 0 {
                assert_eq!(mul(a, inv(a)), 1);
            }
        }
    }

    #[test]
    fn prime_field_f2() {
        let fd = FieldDesc::new(2, 1).unwrap();
        assert_eq!(fd.q(), 2);
        let one = fd.one();
        assert_eq!(fd.add(one, one), fd.zero());
        assert_eq!(fd.mul(one, one), one);
    }

    #[test]
    fn f3_inverse() {
        let fd = FieldDesc::new(3, 1).unwrap();
        let two = fd.elem(2).unwrap();
        assert_eq!(fd.mul(two, two), fd.one());
    }

    #[test]
    fn f4_squares() {
        let fd = FieldDesc::new(2, 2).unwrap();
        // Modulus is x^2 + x + 1, the least irreducible of degree 2 over F_2.
        assert_eq!(fd.modulus(), &[1, 1, 1]);
        let one = fd.one();
        for v in 2..4 {
            let x = fd.elem(v).unwrap();
            assert_eq!(fd.mul(x, x), fd.add(x, one), "x^2 = x + 1 in F_4 for x outside F_2");
        }
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for (p, f) in [(2u64, 1u32), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let fd = FieldDesc::new(p, f).unwrap();
            check_axioms_exhaustive(
                fd.q(),
                |a, b| fd.add(fd.elem(a).unwrap(), fd.elem(b).unwrap()).value(),
                |a, b| fd.mul(fd.elem(a).unwrap(), fd.elem(b).unwrap()).value(),
                |a| fd.inv(fd.elem(a).unwrap()).value(),
            );
        }
    }

    #[test]
    fn coeff_axioms_exhaustive_small() {
        // Orders 4, 9, 16, 25, 27, 49, 81 with appropriate structure primes.
        for (p, ell, m) in [(3u64, 2u64, 2u32), (2, 3, 2), (3, 2, 4), (2, 5, 2), (13, 3, 3), (2, 7, 2), (5, 3, 4)] {
            let cf = CoeffField::with_extension(p, ell, m).unwrap();
            check_axioms_exhaustive(
                cf.order(),
                |a, b| cf.add(cf.scalar(a).unwrap(), cf.scalar(b).unwrap()).value(),
                |a, b| cf.mul(cf.scalar(a).unwrap(), cf.scalar(b).unwrap()).value(),
                |a| cf.inv(cf.scalar(a).unwrap()).value(),
            );
        }
    }

    #[test]
    fn field_axioms_randomized_large() {
        // Beyond the exhaustive range: 10^4 random triples.
        let fd = FieldDesc::new(2, 10).unwrap();
        let cf = CoeffField::with_extension(5, 2, 8).unwrap(); // order 256, tables
        let big = CoeffField::with_extension(3, 5, 8).unwrap(); // order 390625, no tables
        let mut rng = SplitMix64::new(0x5eed);
        for _ in 0..10_000 {
            let a = fd.elem(rng.below(fd.q())).unwrap();
            let b = fd.elem(rng.below(fd.q())).unwrap();
            let c = fd.elem(rng.below(fd.q())).unwrap();
            assert_eq!(fd.mul(a, fd.add(b, c)), fd.add(fd.mul(a, b), fd.mul(a, c)));
            assert_eq!(fd.mul(fd.mul(a, b), c), fd.mul(a, fd.mul(b, c)));
            if a.value() != 0 {
                assert_eq!(fd.mul(a, fd.inv(a)), fd.one());
                assert_eq!(fd.pow(a, fd.q() - 1), fd.one());
            }
            for field in [&cf, &big] {
                let a = field.scalar(rng.below(field.order())).unwrap();
                let b = field.scalar(rng.below(field.order())).unwrap();
                let c = field.scalar(rng.below(field.order())).unwrap();
                assert_eq!(
                    field.mul(a, field.add(b, c)),
                    field.add(field.mul(a, b), field.mul(a, c))
                );
                if a.value() != 0 {
                    assert_eq!(field.mul(a, field.inv(a)), field.one());
                }
            }
        }
    }

    #[test]
    fn trace_examples() {
        let f2 = FieldDesc::new(2, 1).unwrap();
        assert_eq!(f2.trace(f2.one()), 1);

        let f4 = FieldDesc::new(2, 2).unwrap();
        assert_eq!(f4.trace(f4.one()), 0, "Tr(1) = 1 + 1 = 0 in F_4");

        let f9 = FieldDesc::new(3, 2).unwrap();
        assert_eq!(f9.trace(f9.zero()), 0);
    }

    #[test]
    fn trace_is_additive_and_onto() {
        for (p, f) in [(2u64, 2u32), (2, 3), (3, 2), (5, 2)] {
            let fd = FieldDesc::new(p, f).unwrap();
            for a in fd.elements() {
                for b in fd.elements() {
                    let lhs = fd.trace(fd.add(a, b));
                    let rhs = (fd.trace(a) + fd.trace(b)) % p;
                    assert_eq!(lhs, rhs);
                }
            }
            assert!(fd.elements().any(|x| fd.trace(x) != 0), "trace is onto the prime field");
        }
    }

    #[test]
    fn coeff_field_minimal_degrees() {
        let k = CoeffField::new(2, 3).unwrap();
        assert_eq!((k.m(), k.order()), (1, 3));
        assert_eq!(k.zeta(), k.neg_one(), "the order-2 root of unity is -1");

        let k = CoeffField::new(3, 2).unwrap();
        assert_eq!((k.m(), k.order()), (2, 4));

        let k = CoeffField::new(5, 2).unwrap();
        assert_eq!((k.m(), k.order()), (4, 16));
    }

    #[test]
    fn coeff_field_rejects_bad_input() {
        assert_eq!(
            CoeffField::new(3, 3).unwrap_err(),
            FieldError::CharacteristicClash { ell: 3, p: 3 }
        );
        assert_eq!(
            CoeffField::with_extension(5, 2, 5).unwrap_err(),
            FieldError::NoRootOfUnity { ell: 2, m: 5, p: 5 }
        );
        assert!(FieldDesc::new(4, 1).is_err());
        assert!(FieldDesc::new(2, 17).is_err());
    }

    #[test]
    fn zeta_has_exact_order_p() {
        for (p, ell) in [(2u64, 3u64), (3, 2), (5, 2), (7, 2), (5, 3), (7, 13)] {
            let cf = CoeffField::new(p, ell).unwrap();
            let zeta = cf.zeta();
            assert_ne!(zeta, cf.one());
            assert_eq!(cf.pow(zeta, p), cf.one());
        }
    }

    #[test]
    fn additive_character_homomorphism_and_sum() {
        for (p, f, ell) in [(2u64, 1u32, 3u64), (2, 2, 3), (3, 1, 2), (5, 1, 2), (2, 2, 7)] {
            let fd = FieldDesc::new(p, f).unwrap();
            let cf = CoeffField::new(p, ell).unwrap();
            let psi = AdditiveCharacter::new(&fd, &cf).unwrap();
            assert_eq!(psi.eval(fd.zero()), cf.one());
            for a in fd.elements() {
                for b in fd.elements() {
                    assert_eq!(psi.eval(fd.add(a, b)), cf.mul(psi.eval(a), psi.eval(b)));
                }
            }
            let sum = fd
                .elements()
                .fold(cf.zero(), |acc, x| cf.add(acc, psi.eval(x)));
            assert_eq!(sum, cf.zero(), "character sum over F_q vanishes");
        }
    }

    #[test]
    fn additive_character_examples() {
        // p = 2, l = 3, q = 2: psi(1) = -1 = 2 mod 3.
        let fd = FieldDesc::new(2, 1).unwrap();
        let cf = CoeffField::new(2, 3).unwrap();
        let psi = AdditiveCharacter::new(&fd, &cf).unwrap();
        assert_eq!(psi.eval(fd.one()).value(), 2);
    }

    #[test]
    fn mismatched_characteristics_rejected() {
        let fd = FieldDesc::new(2, 1).unwrap();
        let cf = CoeffField::new(3, 2).unwrap();
        assert!(AdditiveCharacter::new(&fd, &cf).is_err());
    }

    #[test]
    fn large_tableless_field_roundtrip() {
        // 13^8 = 815730721 exceeds the table limit; direct arithmetic path.
        let cf = CoeffField::with_extension(5, 13, 8).unwrap();
        assert!(cf.order() > TABLE_LIMIT);
        let zeta = cf.zeta();
        assert_eq!(cf.pow(zeta, 5), cf.one());
        assert_ne!(zeta, cf.one());
        let g = cf.primitive_element();
        let gi = cf.inv(g);
        assert_eq!(cf.mul(g, gi), cf.one());
    }

    #[test]
    fn modulus_is_reproducible() {
        let a = FieldDesc::new(3, 2).unwrap();
        let b = FieldDesc::new(3, 2).unwrap();
        assert_eq!(a.modulus(), b.modulus());
        assert_eq!(a.primitive_element(), b.primitive_element());
    }
}
