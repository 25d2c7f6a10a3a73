//! Arithmetic in GF(q^2) together with its involution `x -> x^q`.
//!
//! Elements are stored as the integer encoding of their coefficient vector
//! over GF(p): the element `c_0 + c_1 x + ... + c_{2e-1} x^{2e-1}` has index
//! `c_0 + c_1 p + ... + c_{2e-1} p^{2e-1}`. This encoding is the same in both
//! internal representations, so outputs never depend on which one is active.
//!
//! The defining polynomial is the least monic irreducible polynomial of degree
//! `2e` over GF(p) (ordered by the index of its lower coefficients), and the
//! generator is the least index of multiplicative order `q^2 - 1`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest field order for which discrete-log tables are built.
pub const TABLE_LIMIT: u64 = 1 << 16;

/// An element of GF(q^2), meaningful only together with its [`Field`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Fe(u32);

impl Fe {
    pub const ZERO: Fe = Fe(0);
    pub const ONE: Fe = Fe(1);

    #[inline]
    pub fn index(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// Unchecked conversion; callers guarantee `i < q^2`.
    #[inline]
    pub(crate) fn from_index(i: u32) -> Fe {
        Fe(i)
    }
}

impl fmt::Display for Fe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Which multiplication backend a [`Field`] uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Representation {
    /// Discrete-log / antilog tables.
    Tables,
    /// Polynomial arithmetic modulo the defining polynomial.
    Polynomial,
}

/// Static description of GF(q^2) as an extension of GF(p).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub e: u32,
    pub q: u32,
    /// Coefficients of the monic defining polynomial, constant term first.
    pub modulus: Vec<u32>,
    pub generator: Fe,
}

impl FieldSpec {
    pub fn order(&self) -> u32 {
        self.q * self.q
    }

    pub fn degree(&self) -> usize {
        2 * self.e as usize
    }

    /// Human-readable defining polynomial, e.g. `x^4+x+1`.
    pub fn modulus_string(&self) -> String {
        poly_to_string(&self.modulus)
    }
}

struct Tables {
    log: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(Q-1)`, doubled to avoid a reduction.
    exp: Vec<u32>,
    conj: Vec<u32>,
}

struct Inner {
    spec: FieldSpec,
    repr: Representation,
    tables: Option<Tables>,
    /// Full addition table for small odd-characteristic fields.
    add: Option<Vec<u32>>,
    neg: Vec<u32>,
    fixed: Vec<Fe>,
    trace_one: Fe,
}

/// Shared handle to GF(q^2). Cloning is cheap; all operations are pure.
#[derive(Clone)]
pub struct Field {
    inner: Arc<Inner>,
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Field")
            .field("q", &self.inner.spec.q)
            .field("modulus", &self.inner.spec.modulus_string())
            .field("repr", &self.inner.repr)
            .finish()
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.spec == other.inner.spec
    }
}

impl Eq for Field {}

/// Returns `(p, e)` with `q = p^e`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p as u32, e))
}

impl Field {
    /// GF(q^2) with tables when `q^2 <= 2^16`, polynomial arithmetic above.
    pub fn new(q: u32) -> Result<Field> {
        let repr = if (q as u64) * (q as u64) <= TABLE_LIMIT {
            Representation::Tables
        } else {
            Representation::Polynomial
        };
        Field::with_representation(q, repr)
    }

    pub fn with_representation(q: u32, repr: Representation) -> Result<Field> {
        let (p, e) = prime_power(q as u64).ok_or(Error::NotPrimePower(q as u64))?;
        // q^2 must fit comfortably in u32 and the generator search must stay cheap.
        if q > (1 << 15) {
            return Err(Error::FieldTooLarge(q as u64));
        }
        if repr == Representation::Tables && (q as u64) * (q as u64) > TABLE_LIMIT {
            return Err(Error::FieldTooLarge(q as u64));
        }
        let degree = 2 * e as usize;
        let modulus = least_irreducible(p, degree);
        let order = q * q;
        let mut inner = Inner {
            spec: FieldSpec { p, e, q, modulus, generator: Fe::ONE },
            repr: Representation::Polynomial,
            tables: None,
            add: None,
            neg: Vec::new(),
            fixed: Vec::new(),
            trace_one: Fe::ZERO,
        };
        inner.neg = (0..order)
            .map(|x| {
                let mut d = digits(x, p, degree);
                for c in d.iter_mut() {
                    *c = (p - *c) % p;
                }
                undigits(&d, p)
            })
            .collect();
        if p != 2 && order <= 1024 {
            let mut add = vec![0u32; (order * order) as usize];
            for a in 0..order {
                for b in 0..order {
                    add[(a * order + b) as usize] = add_digits(a, b, p, degree);
                }
            }
            inner.add = Some(add);
        }
        let mut field = Field { inner: Arc::new(inner) };
        let generator = field.find_generator();
        {
            let inner = Arc::get_mut(&mut field.inner).expect("unique during construction");
            inner.spec.generator = generator;
        }
        if repr == Representation::Tables {
            let n = (order - 1) as usize;
            let mut exp = vec![0u32; 2 * n];
            let mut log = vec![0u32; order as usize];
            let mut x = Fe::ONE;
            for (i, slot) in exp.iter_mut().take(n).enumerate() {
                *slot = x.0;
                log[x.0 as usize] = i as u32;
                x = field.poly_mul(x, generator);
            }
            for i in n..2 * n {
                exp[i] = exp[i - n];
            }
            let mut tables = Tables { log, exp, conj: Vec::new() };
            tables.conj = (0..order)
                .map(|x| {
                    if x == 0 {
                        0
                    } else {
                        let l = (tables.log[x as usize] as u64 * q as u64) % n as u64;
                        tables.exp[l as usize]
                    }
                })
                .collect();
            let inner = Arc::get_mut(&mut field.inner).expect("unique during construction");
            inner.tables = Some(tables);
            inner.repr = Representation::Tables;
        }
        let gamma = field.pow(generator, q as u64 + 1);
        let mut fixed = vec![Fe::ZERO];
        let mut t = Fe::ONE;
        for _ in 0..q - 1 {
            fixed.push(t);
            t = field.mul(t, gamma);
        }
        let trace_one =
            field.elements().find(|&x| field.trace(x) == Fe::ONE).expect("trace is onto the fixed field");
        let inner = Arc::get_mut(&mut field.inner).expect("unique during construction");
        inner.fixed = fixed;
        inner.trace_one = trace_one;
        Ok(field)
    }

    fn find_generator(&self) -> Fe {
        let n = self.order() as u64 - 1;
        let primes = prime_factors(n);
        (1..self.order())
            .map(Fe)
            .find(|&g| primes.iter().all(|&r| self.poly_pow(g, n / r) != Fe::ONE))
            .expect("multiplicative group is cyclic")
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.inner.spec
    }

    pub fn representation(&self) -> Representation {
        self.inner.repr
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.spec.q
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.spec.p
    }

    /// Number of elements, `q^2`.
    #[inline]
    pub fn order(&self) -> u32 {
        self.inner.spec.q * self.inner.spec.q
    }

    pub fn generator(&self) -> Fe {
        self.inner.spec.generator
    }

    /// Checked conversion from an index.
    pub fn element(&self, index: u32) -> Result<Fe> {
        if index < self.order() {
            Ok(Fe(index))
        } else {
            Err(Error::Invalid(format!("element index {index} out of range for GF({})", self.order())))
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fe> {
        (0..self.order()).map(Fe)
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fe> {
        (1..self.order()).map(Fe)
    }

    /// The fixed field GF(q): zero first, then powers of `g^(q+1)` in order.
    pub fn fixed_field(&self) -> &[Fe] {
        &self.inner.fixed
    }

    /// Nonzero elements of the fixed field in generator order.
    pub fn fixed_nonzero(&self) -> &[Fe] {
        &self.inner.fixed[1..]
    }

    /// A fixed element with trace one, the least such index.
    pub fn trace_one(&self) -> Fe {
        self.inner.trace_one
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(0..self.order()))
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        Fe(rng.gen_range(1..self.order()))
    }

    pub fn random_fixed<R: Rng + ?Sized>(&self, rng: &mut R) -> Fe {
        self.inner.fixed[rng.gen_range(0..self.inner.fixed.len())]
    }

    pub fn from_int(&self, k: i64) -> Fe {
        let p = self.p() as i64;
        Fe(k.rem_euclid(p) as u32)
    }

    // ----- arithmetic -----

    #[inline]
    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        let inner = &*self.inner;
        if inner.spec.p == 2 {
            return Fe(a.0 ^ b.0);
        }
        if let Some(t) = &inner.add {
            return Fe(t[(a.0 * self.order() + b.0) as usize]);
        }
        Fe(add_digits(a.0, b.0, inner.spec.p, inner.spec.degree()))
    }

    #[inline]
    pub fn neg(&self, a: Fe) -> Fe {
        Fe(self.inner.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a.0 == 0 || b.0 == 0 {
            return Fe::ZERO;
        }
        match &self.inner.tables {
            Some(t) => Fe(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]),
            None => self.poly_mul(a, b),
        }
    }

    pub fn inv(&self, a: Fe) -> Option<Fe> {
        if a.0 == 0 {
            return None;
        }
        Some(match &self.inner.tables {
            Some(t) => {
                let n = self.order() - 1;
                Fe(t.exp[((n - t.log[a.0 as usize]) % n) as usize])
            }
            None => self.poly_pow(a, self.order() as u64 - 2),
        })
    }

    /// `a / b`; panics on division by zero, which is always a logic error here.
    #[inline]
    pub fn div(&self, a: Fe, b: Fe) -> Fe {
        self.mul(a, self.inv(b).expect("division by zero in GF(q^2)"))
    }

    pub fn pow(&self, a: Fe, k: u64) -> Fe {
        if k == 0 {
            return Fe::ONE;
        }
        if a.0 == 0 {
            return Fe::ZERO;
        }
        match &self.inner.tables {
            Some(t) => {
                let n = (self.order() - 1) as u64;
                let l = (t.log[a.0 as usize] as u64 * (k % n)) % n;
                Fe(t.exp[l as usize])
            }
            None => self.poly_pow(a, k),
        }
    }

    /// The involution `x -> x^q`.
    #[inline]
    pub fn conj(&self, a: Fe) -> Fe {
        match &self.inner.tables {
            Some(t) => Fe(t.conj[a.0 as usize]),
            None => self.poly_pow(a, self.q() as u64),
        }
    }

    /// `x + x^q`, always in the fixed field.
    #[inline]
    pub fn trace(&self, a: Fe) -> Fe {
        self.add(a, self.conj(a))
    }

    /// `x * x^q`, always in the fixed field.
    #[inline]
    pub fn norm(&self, a: Fe) -> Fe {
        self.mul(a, self.conj(a))
    }

    #[inline]
    pub fn is_fixed(&self, a: Fe) -> bool {
        self.conj(a) == a
    }

    /// Checked down-cast into the fixed field.
    pub fn fixed(&self, a: Fe) -> Result<Fe> {
        if self.is_fixed(a) {
            Ok(a)
        } else {
            Err(Error::NotFixed(a.0))
        }
    }

    /// Position of a fixed element in [`Field::fixed_field`].
    pub fn fixed_position(&self, a: Fe) -> Option<usize> {
        self.inner.fixed.iter().position(|&t| t == a)
    }

    /// Some `c` with `N(c) = lambda`; `None` if `lambda` is not fixed.
    ///
    /// The result is `g^k` for the least `k` with `N(g^k) = lambda`.
    pub fn norm_root(&self, lambda: Fe) -> Option<Fe> {
        if !self.is_fixed(lambda) {
            return None;
        }
        if lambda.is_zero() {
            return Some(Fe::ZERO);
        }
        let q = self.q() as u64;
        let g = self.generator();
        if let Some(t) = &self.inner.tables {
            let l = t.log[lambda.0 as usize] as u64;
            debug_assert_eq!(l % (q + 1), 0);
            return Some(self.pow(g, l / (q + 1)));
        }
        let gamma = self.pow(g, q + 1);
        let mut t = Fe::ONE;
        for k in 0..q - 1 {
            if t == lambda {
                return Some(self.pow(g, k));
            }
            t = self.mul(t, gamma);
        }
        None
    }

    /// All `c` with `N(c) = lambda`, in index order.
    pub fn norm_fiber(&self, lambda: Fe) -> Vec<Fe> {
        self.elements().filter(|&x| self.norm(x) == lambda).collect()
    }

    /// Returns `y` with `conj(y) - y = x` when `Tr(x) = 0`.
    pub fn zero_trace_witness(&self, x: Fe) -> Option<Fe> {
        if !self.trace(x).is_zero() {
            return None;
        }
        // With Tr(c) = 1 and x^q = -x, y = -x c gives y^q - y = x c^q + x c = x.
        Some(self.neg(self.mul(x, self.trace_one())))
    }

    /// The unique `y != x` with `N(y) = N(x)` and `N(a + b y) = N(a + b x)`,
    /// if one exists. Candidate: `y = (a conj(b)) / (conj(a) b) * conj(x)`.
    pub fn unique_norm_partner(&self, a: Fe, b: Fe, x: Fe) -> Result<Option<Fe>> {
        if a.is_zero() {
            return Err(Error::ZeroScalar("a"));
        }
        if b.is_zero() {
            return Err(Error::ZeroScalar("b"));
        }
        let ratio = self.div(self.mul(a, self.conj(b)), self.mul(self.conj(a), b));
        let y = self.mul(ratio, self.conj(x));
        let target = self.norm(self.add(a, self.mul(b, x)));
        let ok = y != x && self.norm(y) == self.norm(x) && self.norm(self.add(a, self.mul(b, y))) == target;
        Ok(ok.then_some(y))
    }

    // ----- representation helpers -----

    /// Coefficients over GF(p), constant term first.
    pub fn coefficients(&self, a: Fe) -> Vec<u32> {
        digits(a.0, self.p(), self.inner.spec.degree())
    }

    /// Polynomial form of an element, e.g. `x^3+2x+1`; zero prints as `0`.
    pub fn poly_string(&self, a: Fe) -> String {
        poly_to_string(&self.coefficients(a))
    }

    fn poly_mul(&self, a: Fe, b: Fe) -> Fe {
        let spec = &self.inner.spec;
        let d = spec.degree();
        let p = spec.p as u64;
        let da = digits(a.0, spec.p, d);
        let db = digits(b.0, spec.p, d);
        let mut prod = vec![0u64; 2 * d - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        // Reduce with x^d = -(m_0 + ... + m_{d-1} x^{d-1}).
        for k in (d..prod.len()).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &m) in spec.modulus.iter().take(d).enumerate() {
                let t = k - d + i;
                prod[t] = (prod[t] + (p - c) * m as u64) % p;
            }
        }
        let out: Vec<u32> = prod.iter().take(d).map(|&c| c as u32).collect();
        Fe(undigits(&out, spec.p))
    }

    fn poly_pow(&self, a: Fe, mut k: u64) -> Fe {
        let mut base = a;
        let mut acc = Fe::ONE;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.poly_mul(acc, base);
            }
            base = self.poly_mul(base, base);
            k >>= 1;
        }
        acc
    }
}

/// The four nonzero roots of `Tr(x)^2 + Tr(x) + N(x) = 0` in GF(16).
pub fn solve_special_quartic(field: &Field) -> Result<Vec<Fe>> {
    if field.q() != 4 {
        return Err(Error::WrongQ { required: 4, actual: field.q() });
    }
    Ok(field.nonzero_elements().filter(|&x| special_quartic_value(field, x).is_zero()).collect())
}

/// `Tr(x)^2 + Tr(x) + N(x)`.
pub fn special_quartic_value(field: &Field, x: Fe) -> Fe {
    let t = field.trace(x);
    field.add(field.add(field.mul(t, t), t), field.norm(x))
}

/// `{ x_j + (Tr(x_j) + 1) x_k }` over all ordered pairs of roots.
pub fn special_quartic_combinations(field: &Field, roots: &[Fe]) -> BTreeSet<Fe> {
    let mut out = BTreeSet::new();
    for &xj in roots {
        let c = field.add(field.trace(xj), Fe::ONE);
        for &xk in roots {
            out.insert(field.add(xj, field.mul(c, xk)));
        }
    }
    out
}

// ----- integer/polynomial plumbing -----

fn digits(mut x: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for slot in out.iter_mut() {
        *slot = x % p;
        x /= p;
    }
    out
}

fn undigits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

fn add_digits(mut a: u32, mut b: u32, p: u32, len: usize) -> u32 {
    let mut out = 0u32;
    let mut place = 1u32;
    for _ in 0..len {
        let c = (a % p + b % p) % p;
        out += c * place;
        place = place.wrapping_mul(p);
        a /= p;
        b /= p;
    }
    out
}

fn poly_to_string(coeffs: &[u32]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coef = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        terms.push(match i {
            0 => coef,
            1 => format!("{coef}x"),
            _ => format!("{coef}x^{i}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join("+")
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
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

/// Remainder of `a` modulo the monic polynomial `m` over GF(p); coefficient
/// vectors are constant-term first.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&c| c as u64).collect();
    let dm = m.len() - 1;
    let p = p as u64;
    while r.len() > dm {
        let lead = *r.last().unwrap() % p;
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                r[shift + i] = (r[shift + i] + (p - lead) * c as u64) % p;
            }
        }
        r.pop();
    }
    r.iter().map(|&c| (c % p) as u32).collect()
}

/// Exhaustive trial division by every monic polynomial of degree `1..=deg/2`.
pub(crate) fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut divisor = digits(low as u32, p, d);
            divisor.push(1);
            if poly_rem(poly, &divisor, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn least_irreducible(p: u32, degree: usize) -> Vec<u32> {
    let count = (p as u64).pow(degree as u32);
    for low in 0..count {
        let mut poly = digits(low as u32, p, degree);
        poly.push(1);
        if poly[0] != 0 && is_irreducible(&poly, p) {
            return poly;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}
