//! Exact field arithmetic: prime fields GF(p), extensions GF(p^k) given by an
//! explicit irreducible modulus over GF(p), and arbitrary-precision rationals.
//!
//! Every element carries its field handle, has a unique canonical
//! representation, and is totally ordered (lexicographically on that
//! representation) so that downstream reductions can break ties
//! deterministically. The order has no algebraic meaning.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value as Json;

use crate::error::{Error, Result};

/// Largest prime accepted for GF(p) construction.
const MAX_PRIME: u64 = 1 << 20;
/// Largest field order for which exhaustive scans (quadratic solving, lift
/// root search) are attempted.
const MAX_SCAN_ORDER: u64 = 1024;
/// Largest order allowed when constructing an extension field.
const MAX_FIELD_ORDER: u64 = 1 << 20;

/// Serializable description of a field.
///
/// Extension moduli are monic irreducible polynomials over GF(p), stored as
/// coefficient lists of length `k + 1`, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldDescriptor {
    Prime { p: u64 },
    Ext { p: u64, k: u32, modulus: Vec<u64> },
    Rational,
}

#[derive(Debug)]
struct FieldInner {
    desc: FieldDescriptor,
}

/// Runtime handle for a validated field. Cheap to clone.
#[derive(Clone)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}
impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Field({})", self.name())
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Validates the descriptor: primality of p, and irreducibility of the
    /// modulus (exhaustive factor search, adequate for the small degrees the
    /// library uses).
    pub fn new(desc: FieldDescriptor) -> Result<Field> {
        match &desc {
            FieldDescriptor::Prime { p } => {
                if *p > MAX_PRIME {
                    return Err(Error::InvalidField(format!("p={p} exceeds {MAX_PRIME}")));
                }
                if !is_prime(*p) {
                    return Err(Error::InvalidField(format!("{p} is not prime")));
                }
            }
            FieldDescriptor::Ext { p, k, modulus } => {
                if *p > MAX_PRIME || !is_prime(*p) {
                    return Err(Error::InvalidField(format!("{p} is not a valid prime")));
                }
                if *k < 1 {
                    return Err(Error::InvalidField("extension degree must be >= 1".into()));
                }
                let order = checked_pow(*p, *k)
                    .filter(|o| *o <= MAX_FIELD_ORDER)
                    .ok_or_else(|| Error::FieldTooLarge(format!("p^k with p={p}, k={k}")))?;
                let _ = order;
                if modulus.len() != *k as usize + 1 {
                    return Err(Error::InvalidField(format!(
                        "modulus must have {} coefficients",
                        k + 1
                    )));
                }
                if modulus.iter().any(|c| *c >= *p) {
                    return Err(Error::InvalidField("modulus coefficient out of range".into()));
                }
                if *modulus.last().unwrap() != 1 {
                    return Err(Error::InvalidField("modulus must be monic".into()));
                }
                if !poly_is_irreducible(modulus, *p) {
                    return Err(Error::InvalidField(format!(
                        "modulus {modulus:?} is reducible over GF({p})"
                    )));
                }
            }
            FieldDescriptor::Rational => {}
        }
        Ok(Field(Arc::new(FieldInner { desc })))
    }

    pub fn prime(p: u64) -> Result<Field> {
        Field::new(FieldDescriptor::Prime { p })
    }

    pub fn rational() -> Field {
        Field(Arc::new(FieldInner {
            desc: FieldDescriptor::Rational,
        }))
    }

    /// GF(p^k) with the deterministically chosen (order-minimal) modulus.
    pub fn extension(p: u64, k: u32) -> Result<Field> {
        if k == 1 {
            return Field::prime(p);
        }
        if !is_prime(p) || p > MAX_PRIME {
            return Err(Error::InvalidField(format!("{p} is not a valid prime")));
        }
        checked_pow(p, k)
            .filter(|o| *o <= MAX_FIELD_ORDER)
            .ok_or_else(|| Error::FieldTooLarge(format!("p^k with p={p}, k={k}")))?;
        let modulus = smallest_irreducible(p, k);
        Field::new(FieldDescriptor::Ext { p, k, modulus })
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0.desc
    }

    pub fn name(&self) -> String {
        match &self.0.desc {
            FieldDescriptor::Prime { p } => format!("GF({p})"),
            FieldDescriptor::Ext { p, k, .. } => format!("GF({p}^{k})"),
            FieldDescriptor::Rational => "Q".into(),
        }
    }

    /// Characteristic: p for finite fields, 0 for the rationals.
    pub fn characteristic(&self) -> u64 {
        match &self.0.desc {
            FieldDescriptor::Prime { p } | FieldDescriptor::Ext { p, .. } => *p,
            FieldDescriptor::Rational => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self.0.desc, FieldDescriptor::Rational)
    }

    /// Number of elements, if finite.
    pub fn order(&self) -> Option<u64> {
        match &self.0.desc {
            FieldDescriptor::Prime { p } => Some(*p),
            FieldDescriptor::Ext { p, k, .. } => checked_pow(*p, *k),
            FieldDescriptor::Rational => None,
        }
    }

    /// Extension degree over the prime field (1 for GF(p) and Q).
    pub fn degree(&self) -> u32 {
        match &self.0.desc {
            FieldDescriptor::Ext { k, .. } => *k,
            _ => 1,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.from_u64(0)
    }

    pub fn one(&self) -> FieldElement {
        self.from_u64(1)
    }

    /// Image of the non-negative integer n under Z -> F.
    pub fn from_u64(&self, n: u64) -> FieldElement {
        let value = match &self.0.desc {
            FieldDescriptor::Prime { p } => Value::Prime(n % p),
            FieldDescriptor::Ext { p, k, .. } => {
                let mut v = vec![0u64; *k as usize];
                v[0] = n % p;
                Value::Poly(v)
            }
            FieldDescriptor::Rational => Value::Rational(BigRational::from_integer(n.into())),
        };
        FieldElement {
            field: self.clone(),
            value,
        }
    }

    pub fn from_i64(&self, n: i64) -> FieldElement {
        if n >= 0 {
            self.from_u64(n as u64)
        } else {
            self.from_u64(n.unsigned_abs()).neg()
        }
    }

    /// Element of GF(p^k) from its coefficient vector, constant term first.
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FieldElement> {
        match &self.0.desc {
            FieldDescriptor::Ext { p, k, .. } => {
                if coeffs.len() != *k as usize {
                    return Err(Error::parse(format!(
                        "expected {k} coefficients, got {}",
                        coeffs.len()
                    )));
                }
                Ok(FieldElement {
                    field: self.clone(),
                    value: Value::Poly(coeffs.iter().map(|c| c % p).collect()),
                })
            }
            _ => Err(Error::parse("coefficient vectors only index extension fields")),
        }
    }

    pub fn from_rational(&self, numer: i64, denom: i64) -> Result<FieldElement> {
        match &self.0.desc {
            FieldDescriptor::Rational => {
                if denom == 0 {
                    return Err(Error::parse("zero denominator"));
                }
                Ok(FieldElement {
                    field: self.clone(),
                    value: Value::Rational(BigRational::new(numer.into(), denom.into())),
                })
            }
            _ => Err(Error::parse("rational literals only index the rational field")),
        }
    }

    /// All field elements in ascending order, starting with 0.
    pub fn enumerate(&self) -> Result<impl Iterator<Item = FieldElement> + '_> {
        let order = self.order().ok_or(Error::InfiniteField)?;
        Ok((0..order).map(move |i| self.element_from_index(i).unwrap()))
    }

    /// Rank of 0..order in the total order; inverse of `FieldElement::index`.
    pub fn element_from_index(&self, index: u64) -> Result<FieldElement> {
        match &self.0.desc {
            FieldDescriptor::Prime { p } => {
                if index >= *p {
                    return Err(Error::parse(format!("index {index} out of range")));
                }
                Ok(FieldElement {
                    field: self.clone(),
                    value: Value::Prime(index),
                })
            }
            FieldDescriptor::Ext { p, k, .. } => {
                let k = *k as usize;
                let order = self.order().unwrap();
                if index >= order {
                    return Err(Error::parse(format!("index {index} out of range")));
                }
                let mut v = vec![0u64; k];
                let mut rest = index;
                for slot in (0..k).rev() {
                    v[slot] = rest % p;
                    rest /= p;
                }
                Ok(FieldElement {
                    field: self.clone(),
                    value: Value::Poly(v),
                })
            }
            FieldDescriptor::Rational => Err(Error::InfiniteField),
        }
    }

    /// Roots in this field of x^2 + b x + c, sorted ascending.
    ///
    /// Finite fields of order <= 1024 are scanned exhaustively; rationals go
    /// through the discriminant. `NoRootInField` signals that the polynomial
    /// is irreducible here, so the caller must extend (never possible for the
    /// rationals).
    pub fn solve_monic_quadratic(
        &self,
        b: &FieldElement,
        c: &FieldElement,
    ) -> Result<QuadraticRoots> {
        assert_eq!(&b.field, self, "coefficient b from a different field");
        assert_eq!(&c.field, self, "coefficient c from a different field");
        if let FieldDescriptor::Rational = self.0.desc {
            return self.solve_rational_quadratic(b, c);
        }
        let order = self.order().unwrap();
        if order > MAX_SCAN_ORDER {
            return Err(Error::Unsupported(format!(
                "quadratic solving over {} (order > {MAX_SCAN_ORDER})",
                self.name()
            )));
        }
        let mut roots = Vec::new();
        for r in self.enumerate()? {
            if (&(&r * &r) + &(&(b * &r) + c)).is_zero() {
                roots.push(r);
                if roots.len() == 2 {
                    break;
                }
            }
        }
        match roots.len() {
            0 => Err(Error::NoRootInField(format!(
                "x^2 + {b}x + {c} is irreducible over {}",
                self.name()
            ))),
            // A monic quadratic with exactly one root in a field splits there
            // with that root doubled.
            1 => Ok(QuadraticRoots::Double(roots.pop().unwrap())),
            _ => {
                let r2 = roots.pop().unwrap();
                let r1 = roots.pop().unwrap();
                Ok(QuadraticRoots::Distinct(r1, r2))
            }
        }
    }

    fn solve_rational_quadratic(
        &self,
        b: &FieldElement,
        c: &FieldElement,
    ) -> Result<QuadraticRoots> {
        let (bq, cq) = match (&b.value, &c.value) {
            (Value::Rational(bq), Value::Rational(cq)) => (bq.clone(), cq.clone()),
            _ => unreachable!(),
        };
        let four = BigRational::from_integer(4.into());
        let two = BigRational::from_integer(2.into());
        let disc = &bq * &bq - four * &cq;
        if disc.is_zero() {
            return Ok(QuadraticRoots::Double(self.rational_elt(-&bq / &two)));
        }
        if disc.is_negative() {
            return Err(Error::NoRootInField(format!(
                "x^2 + {b}x + {c} has negative discriminant"
            )));
        }
        let sqrt = rational_sqrt(&disc).ok_or_else(|| {
            Error::NoRootInField(format!("discriminant of x^2 + {b}x + {c} is not a square"))
        })?;
        let r1 = (-&bq - &sqrt) / &two;
        let r2 = (-&bq + &sqrt) / &two;
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        Ok(QuadraticRoots::Distinct(
            self.rational_elt(lo),
            self.rational_elt(hi),
        ))
    }

    fn rational_elt(&self, q: BigRational) -> FieldElement {
        FieldElement {
            field: self.clone(),
            value: Value::Rational(q),
        }
    }

    /// Degree-doubling extension with a deterministically chosen modulus
    /// (the order-minimal monic irreducible over GF(p)).
    pub fn extend(&self) -> Result<Field> {
        match &self.0.desc {
            FieldDescriptor::Rational => Err(Error::CannotExtendRationals),
            FieldDescriptor::Prime { p } => Field::extension(*p, 2),
            FieldDescriptor::Ext { p, k, .. } => Field::extension(*p, k * 2),
        }
    }

    /// Uniformly random element (small bounded fractions for the rationals).
    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        match &self.0.desc {
            FieldDescriptor::Prime { .. } | FieldDescriptor::Ext { .. } => {
                let order = self.order().unwrap();
                self.element_from_index(rng.gen_range(0..order)).unwrap()
            }
            FieldDescriptor::Rational => {
                let n = rng.gen_range(-12i64..=12);
                let d = rng.gen_range(1i64..=12);
                self.from_rational(n, d).unwrap()
            }
        }
    }
}

fn checked_pow(p: u64, k: u32) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..k {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    let n = q.numer();
    let d = q.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// Roots of a monic quadratic that splits, multiplicity-aware.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuadraticRoots {
    Double(FieldElement),
    /// Sorted ascending in the field's total order.
    Distinct(FieldElement, FieldElement),
}

impl QuadraticRoots {
    /// Order-minimal root; the deterministic pick for reductions.
    pub fn min_root(&self) -> &FieldElement {
        match self {
            QuadraticRoots::Double(r) => r,
            QuadraticRoots::Distinct(r, _) => r,
        }
    }

    /// Both roots, a double root listed twice.
    pub fn roots_with_multiplicity(&self) -> Vec<FieldElement> {
        match self {
            QuadraticRoots::Double(r) => vec![r.clone(), r.clone()],
            QuadraticRoots::Distinct(r, s) => vec![r.clone(), s.clone()],
        }
    }

    pub fn distinct_roots(&self) -> Vec<FieldElement> {
        match self {
            QuadraticRoots::Double(r) => vec![r.clone()],
            QuadraticRoots::Distinct(r, s) => vec![r.clone(), s.clone()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Prime(u64),
    /// Coefficients over GF(p), constant term first, fixed length k.
    Poly(Vec<u64>),
    Rational(BigRational),
}

/// An element of a concrete field; carries its field handle.
///
/// Arithmetic operators panic when operands belong to different fields; the
/// fallible library entry points validate fields before computing.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    value: Value,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Prime(v) => *v == 0,
            Value::Poly(v) => v.iter().all(|c| *c == 0),
            Value::Rational(q) => q.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self == &self.field.one()
    }

    fn prime_of(&self) -> u64 {
        self.field.characteristic()
    }

    pub fn add(&self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        let value = match (&self.value, &rhs.value) {
            (Value::Prime(a), Value::Prime(b)) => Value::Prime(add_mod(*a, *b, self.prime_of())),
            (Value::Poly(a), Value::Poly(b)) => {
                let p = self.prime_of();
                Value::Poly(a.iter().zip(b).map(|(x, y)| add_mod(*x, *y, p)).collect())
            }
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a + b),
            _ => unreachable!(),
        };
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    pub fn sub(&self, rhs: &FieldElement) -> FieldElement {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> FieldElement {
        let value = match &self.value {
            Value::Prime(a) => Value::Prime(neg_mod(*a, self.prime_of())),
            Value::Poly(a) => {
                let p = self.prime_of();
                Value::Poly(a.iter().map(|x| neg_mod(*x, p)).collect())
            }
            Value::Rational(q) => Value::Rational(-q),
        };
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    pub fn mul(&self, rhs: &FieldElement) -> FieldElement {
        self.check(rhs);
        let value = match (&self.value, &rhs.value) {
            (Value::Prime(a), Value::Prime(b)) => Value::Prime(mul_mod(*a, *b, self.prime_of())),
            (Value::Poly(a), Value::Poly(b)) => {
                let p = self.prime_of();
                let modulus = match self.field.descriptor() {
                    FieldDescriptor::Ext { modulus, .. } => modulus,
                    _ => unreachable!(),
                };
                Value::Poly(poly_mulmod(a, b, modulus, p))
            }
            (Value::Rational(a), Value::Rational(b)) => Value::Rational(a * b),
            _ => unreachable!(),
        };
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> FieldElement {
        assert!(!self.is_zero(), "inverse of zero in {}", self.field.name());
        let value = match &self.value {
            Value::Prime(a) => Value::Prime(inv_mod(*a, self.prime_of())),
            Value::Poly(a) => {
                let p = self.prime_of();
                let modulus = match self.field.descriptor() {
                    FieldDescriptor::Ext { modulus, .. } => modulus,
                    _ => unreachable!(),
                };
                Value::Poly(poly_invmod(a, modulus, p))
            }
            Value::Rational(q) => Value::Rational(q.recip()),
        };
        FieldElement {
            field: self.field.clone(),
            value,
        }
    }

    pub fn div(&self, rhs: &FieldElement) -> FieldElement {
        self.mul(&rhs.inv())
    }

    fn check(&self, rhs: &FieldElement) {
        assert_eq!(
            self.field,
            rhs.field,
            "field mismatch: {} vs {}",
            self.field.name(),
            rhs.field.name()
        );
    }

    /// Rank in the field's total order (finite fields only).
    pub fn index(&self) -> Result<u64> {
        match &self.value {
            Value::Prime(v) => Ok(*v),
            Value::Poly(v) => {
                let p = self.prime_of();
                let mut acc = 0u64;
                for c in v {
                    acc = acc * p + c;
                }
                Ok(acc)
            }
            Value::Rational(_) => Err(Error::InfiniteField),
        }
    }

    /// Injective field homomorphism into `target`, which must lie over the
    /// same prime field with compatible degree. The embedding maps the source
    /// generator to the order-minimal root of the source modulus in `target`,
    /// so it is deterministic.
    pub fn lift_to(&self, target: &Field) -> Result<FieldElement> {
        if &self.field == target {
            return Ok(self.clone());
        }
        match (self.field.descriptor(), target.descriptor()) {
            (FieldDescriptor::Rational, _) | (_, FieldDescriptor::Rational) => Err(
                Error::FieldMismatch("rationals embed only in themselves".into()),
            ),
            (src, tgt) => {
                let (sp, sk) = match src {
                    FieldDescriptor::Prime { p } => (*p, 1u32),
                    FieldDescriptor::Ext { p, k, .. } => (*p, *k),
                    _ => unreachable!(),
                };
                let (tp, tk) = match tgt {
                    FieldDescriptor::Prime { p } => (*p, 1u32),
                    FieldDescriptor::Ext { p, k, .. } => (*p, *k),
                    _ => unreachable!(),
                };
                if sp != tp {
                    return Err(Error::FieldMismatch(format!(
                        "different characteristic: {sp} vs {tp}"
                    )));
                }
                if tk % sk != 0 {
                    return Err(Error::FieldMismatch(format!(
                        "degree {sk} does not divide {tk}"
                    )));
                }
                match &self.value {
                    Value::Prime(v) => Ok(target.from_u64(*v)),
                    Value::Poly(coeffs) => {
                        let modulus = match src {
                            FieldDescriptor::Ext { modulus, .. } => modulus.clone(),
                            _ => unreachable!(),
                        };
                        let root = embedding_root(&modulus, target)?;
                        // Horner evaluation of the coefficient polynomial at
                        // the image of the source generator.
                        let mut acc = target.zero();
                        for c in coeffs.iter().rev() {
                            acc = &(&acc * &root) + &target.from_u64(*c);
                        }
                        Ok(acc)
                    }
                    Value::Rational(_) => unreachable!(),
                }
            }
        }
    }

    /// JSON encoding: integer for prime fields, coefficient array for
    /// extensions, "a/b" string for rationals.
    pub fn to_json(&self) -> Json {
        match &self.value {
            Value::Prime(v) => Json::from(*v),
            Value::Poly(v) => Json::from(v.clone()),
            Value::Rational(q) => Json::from(q.to_string()),
        }
    }

    pub fn from_json(field: &Field, json: &Json) -> Result<FieldElement> {
        match field.descriptor() {
            FieldDescriptor::Prime { p } => {
                let n = json
                    .as_u64()
                    .or_else(|| json.as_i64().map(|v| v.rem_euclid(*p as i64) as u64))
                    .ok_or_else(|| Error::parse(format!("expected integer, got {json}")))?;
                Ok(field.from_u64(n))
            }
            FieldDescriptor::Ext { k, .. } => {
                let arr = json
                    .as_array()
                    .ok_or_else(|| Error::parse(format!("expected array of {k} integers")))?;
                let coeffs: Vec<u64> = arr
                    .iter()
                    .map(|v| {
                        v.as_u64()
                            .ok_or_else(|| Error::parse(format!("bad coefficient {v}")))
                    })
                    .collect::<Result<_>>()?;
                field.from_coeffs(&coeffs)
            }
            FieldDescriptor::Rational => {
                let s = json
                    .as_str()
                    .map(str::to_owned)
                    .or_else(|| json.as_i64().map(|v| v.to_string()))
                    .ok_or_else(|| Error::parse(format!("expected \"a/b\" string, got {json}")))?;
                let q = parse_rational(&s)?;
                Ok(FieldElement {
                    field: field.clone(),
                    value: Value::Rational(q),
                })
            }
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let mut parts = s.splitn(2, '/');
    let numer: BigInt = parts
        .next()
        .unwrap()
        .trim()
        .parse()
        .map_err(|_| Error::parse(format!("bad rational {s:?}")))?;
    let denom: BigInt = match parts.next() {
        Some(d) => d
            .trim()
            .parse()
            .map_err(|_| Error::parse(format!("bad rational {s:?}")))?,
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(Error::parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(numer, denom))
}

/// Order-minimal root of `modulus` (a polynomial over GF(p)) in `target`.
fn embedding_root(modulus: &[u64], target: &Field) -> Result<FieldElement> {
    let order = target.order().ok_or(Error::InfiniteField)?;
    if order > MAX_FIELD_ORDER {
        return Err(Error::FieldTooLarge(format!(
            "embedding root search in {}",
            target.name()
        )));
    }
    let _ = order;
    for cand in target.enumerate()? {
        let mut acc = target.zero();
        for c in modulus.iter().rev() {
            acc = &(&acc * &cand) + &target.from_u64(*c);
        }
        if acc.is_zero() {
            return Ok(cand);
        }
    }
    Err(Error::FieldMismatch(format!(
        "source modulus has no root in {}",
        target.name()
    )))
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.value == other.value
    }
}
impl Eq for FieldElement {}

impl std::hash::Hash for FieldElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.value.hash(state);
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the canonical representation (numeric for rationals).
/// Deterministic tie-breaking only; no algebraic meaning.
impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        assert_eq!(self.field, other.field, "ordering across fields");
        match (&self.value, &other.value) {
            (Value::Prime(a), Value::Prime(b)) => a.cmp(b),
            (Value::Poly(a), Value::Poly(b)) => a.cmp(b),
            (Value::Rational(a), Value::Rational(b)) => a.cmp(b),
            _ => unreachable!(),
        }
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Prime(v) => write!(f, "{v}"),
            Value::Poly(v) => {
                let parts: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                write!(f, "[{}]", parts.join(","))
            }
            Value::Rational(q) => write!(f, "{q}"),
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $inherent:ident) => {
        impl std::ops::$trait<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$inherent(rhs)
            }
        }
        impl std::ops::$trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                FieldElement::$inherent(&self, &rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(self)
    }
}
impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::neg(&self)
    }
}

// ---- modular arithmetic on u64 residues ----

fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    (a + b) % p
}

fn neg_mod(a: u64, p: u64) -> u64 {
    if a == 0 {
        0
    } else {
        p - a
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid on (a, p)
    let (mut r0, mut r1) = (a as i128, p as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    assert_eq!(r0, 1, "{a} is not invertible mod {p}");
    s0.rem_euclid(p as i128) as u64
}

// ---- polynomials over GF(p): Vec<u64>, constant term first ----

fn poly_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if *x == 0 {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = add_mod(out[i + j], mul_mod(*x, *y, p), p);
        }
    }
    out
}

/// Remainder of a modulo the monic polynomial m.
fn poly_rem_monic(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let deg_m = m.len() - 1;
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    while rem.len() > deg_m {
        let lead = *rem.last().unwrap();
        let shift = rem.len() - 1 - deg_m;
        if lead != 0 {
            for (i, c) in m.iter().enumerate() {
                let idx = shift + i;
                let sub = mul_mod(lead, *c, p);
                rem[idx] = add_mod(rem[idx], neg_mod(sub, p), p);
            }
        }
        rem.pop();
        poly_trim(&mut rem);
    }
    rem
}

/// Product in GF(p)[x]/(modulus); inputs/outputs are fixed-width k vectors.
fn poly_mulmod(a: &[u64], b: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = modulus.len() - 1;
    let prod = poly_mul(a, b, p);
    let mut rem = poly_rem_monic(&prod, modulus, p);
    rem.resize(k, 0);
    rem
}

/// Inverse in GF(p)[x]/(modulus) by extended Euclid.
fn poly_invmod(a: &[u64], modulus: &[u64], p: u64) -> Vec<u64> {
    let k = modulus.len() - 1;
    let mut r0 = modulus.to_vec();
    let mut r1 = a.to_vec();
    poly_trim(&mut r1);
    let mut s0: Vec<u64> = Vec::new();
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, rem) = poly_divmod(&r0, &r1, p);
        let qs1 = poly_mul(&q, &s1, p);
        let s_new = poly_sub(&s0, &qs1, p);
        r0 = r1;
        r1 = rem;
        s0 = s1;
        s1 = s_new;
    }
    assert_eq!(r0.len(), 1, "element not invertible modulo the field modulus");
    let scale = inv_mod(r0[0], p);
    let mut out: Vec<u64> = s0.iter().map(|c| mul_mod(*c, scale, p)).collect();
    out.resize(k, 0);
    out
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, slot) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *slot = add_mod(x, neg_mod(y, p), p);
    }
    poly_trim(&mut out);
    out
}

fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut rem = a.to_vec();
    poly_trim(&mut rem);
    let deg_b = b.len() - 1;
    if rem.len() <= deg_b {
        return (Vec::new(), rem);
    }
    let lead_inv = inv_mod(*b.last().unwrap(), p);
    let mut quot = vec![0u64; rem.len() - deg_b];
    while rem.len() > deg_b {
        let shift = rem.len() - 1 - deg_b;
        let coef = mul_mod(*rem.last().unwrap(), lead_inv, p);
        quot[shift] = coef;
        for (i, c) in b.iter().enumerate() {
            let sub = mul_mod(coef, *c, p);
            rem[shift + i] = add_mod(rem[shift + i], neg_mod(sub, p), p);
        }
        poly_trim(&mut rem);
        if rem.is_empty() {
            break;
        }
    }
    poly_trim(&mut quot);
    (quot, rem)
}

/// Exhaustive factor search: a monic polynomial of degree d is irreducible
/// iff no monic polynomial of degree 1..=d/2 divides it.
fn poly_is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 0 {
        return false;
    }
    if d == 1 {
        return true;
    }
    if f[0] == 0 {
        return false; // divisible by x
    }
    for e in 1..=d / 2 {
        let count = checked_pow(p, e as u32).expect("guarded by field order limits");
        for idx in 0..count {
            let mut g = vec![0u64; e + 1];
            let mut rest = idx;
            for slot in g.iter_mut().take(e) {
                *slot = rest % p;
                rest /= p;
            }
            g[e] = 1;
            if poly_rem_monic(f, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Order-minimal monic irreducible of degree k over GF(p), scanning lower
/// coefficient vectors lexicographically (constant term most significant,
/// matching the element order).
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    let count = checked_pow(p, k as u32).expect("guarded by caller");
    for idx in 0..count {
        let mut f = vec![0u64; k + 1];
        let mut rest = idx;
        for slot in (0..k).rev() {
            f[slot] = rest % p;
            rest /= p;
        }
        f[k] = 1;
        if poly_is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn descriptor_validation() {
        assert!(Field::prime(4).is_err());
        assert!(Field::prime(2).is_ok());
        // x^2 + 1 = (x+1)^2 over GF(2)
        assert!(Field::new(FieldDescriptor::Ext {
            p: 2,
            k: 2,
            modulus: vec![1, 0, 1],
        })
        .is_err());
        assert!(Field::new(FieldDescriptor::Ext {
            p: 2,
            k: 2,
            modulus: vec![1, 1, 1],
        })
        .is_ok());
    }

    #[test]
    fn gf4_modulus_is_x2_x_1() {
        let f4 = Field::extension(2, 2).unwrap();
        match f4.descriptor() {
            FieldDescriptor::Ext { modulus, .. } => assert_eq!(modulus, &vec![1, 1, 1]),
            _ => panic!(),
        }
    }

    #[test]
    fn enumerate_small_fields() {
        let f2 = gf(2);
        let elems: Vec<_> = f2.enumerate().unwrap().collect();
        assert_eq!(elems, vec![f2.zero(), f2.one()]);

        let f4 = Field::extension(2, 2).unwrap();
        let elems: Vec<_> = f4.enumerate().unwrap().collect();
        assert_eq!(elems.len(), 4);
        for (i, a) in elems.iter().enumerate() {
            for b in &elems[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert_eq!(elems[0], f4.zero());
        // ascending in the total order
        for w in elems.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn gf9_frobenius_fixes_every_element() {
        let f9 = Field::extension(3, 2).unwrap();
        let elems: Vec<_> = f9.enumerate().unwrap().collect();
        assert_eq!(elems.len(), 9);
        for a in &elems {
            let mut pow = a.clone();
            for _ in 0..8 {
                pow = &pow * a;
            }
            assert_eq!(&pow, a, "x^9 != x for {a}");
        }
    }

    fn axioms_exhaustive(field: &Field) {
        let elems: Vec<_> = field.enumerate().unwrap().collect();
        for a in &elems {
            assert_eq!(&(a + &field.zero()), a);
            assert_eq!(&(a * &field.one()), a);
            assert!((a + &a.neg()).is_zero());
            if !a.is_zero() {
                assert!((a * &a.inv()).is_one());
            }
            for b in &elems {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                for c in &elems {
                    assert_eq!(&(a + b) + c, a + &(b + c));
                    assert_eq!(&(a * b) * c, a * &(b * c));
                    assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                }
            }
        }
    }

    #[test]
    fn field_axioms_gf2_gf3_gf4() {
        axioms_exhaustive(&gf(2));
        axioms_exhaustive(&gf(3));
        axioms_exhaustive(&Field::extension(2, 2).unwrap());
    }

    #[test]
    fn field_axioms_random_rationals() {
        let q = Field::rational();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let a = q.random(&mut rng);
            let b = q.random(&mut rng);
            let c = q.random(&mut rng);
            assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            assert_eq!(&a + &b, &b + &a);
            if !a.is_zero() {
                assert!((&a * &a.inv()).is_one());
            }
        }
    }

    #[test]
    fn quadratic_gf3_x2_minus_1() {
        let f3 = gf(3);
        let roots = f3
            .solve_monic_quadratic(&f3.zero(), &f3.from_i64(-1))
            .unwrap();
        assert_eq!(
            roots,
            QuadraticRoots::Distinct(f3.from_u64(1), f3.from_u64(2))
        );
    }

    #[test]
    fn quadratic_gf2_irreducible() {
        let f2 = gf(2);
        let err = f2
            .solve_monic_quadratic(&f2.one(), &f2.one())
            .unwrap_err();
        assert!(matches!(err, Error::NoRootInField(_)));
    }

    #[test]
    fn quadratic_gf4_splits() {
        let f4 = Field::extension(2, 2).unwrap();
        // independent scan of the four elements
        let one = f4.one();
        let brute: Vec<_> = f4
            .enumerate()
            .unwrap()
            .filter(|r| (&(r * r) + &(&(&one * r) + &one)).is_zero())
            .collect();
        assert_eq!(brute.len(), 2);
        let omega = f4.from_coeffs(&[0, 1]).unwrap();
        let omega1 = f4.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(brute, vec![omega.clone(), omega1.clone()]);

        let roots = f4.solve_monic_quadratic(&one, &one).unwrap();
        assert_eq!(roots, QuadraticRoots::Distinct(omega, omega1));
    }

    #[test]
    fn quadratic_vieta_gf5_gf7() {
        for p in [5u64, 7] {
            let f = gf(p);
            let elems: Vec<_> = f.enumerate().unwrap().collect();
            for b in &elems {
                for c in &elems {
                    match f.solve_monic_quadratic(b, c) {
                        Ok(roots) => {
                            for r in roots.roots_with_multiplicity() {
                                assert!((&(&r * &r) + &(&(b * &r) + c)).is_zero());
                            }
                            let rs = roots.roots_with_multiplicity();
                            assert_eq!(&(&rs[0] + &rs[1]), &b.neg());
                            assert_eq!(&(&rs[0] * &rs[1]), c);
                        }
                        Err(Error::NoRootInField(_)) => {
                            for r in &elems {
                                assert!(!(&(r * r) + &(&(b * r) + c)).is_zero());
                            }
                        }
                        Err(e) => panic!("unexpected error {e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn quadratic_rationals() {
        let q = Field::rational();
        // x^2 - 5x + 6 = (x-2)(x-3)
        let roots = q
            .solve_monic_quadratic(&q.from_i64(-5), &q.from_i64(6))
            .unwrap();
        assert_eq!(
            roots,
            QuadraticRoots::Distinct(q.from_u64(2), q.from_u64(3))
        );
        // x^2 - 2 has no rational root
        assert!(matches!(
            q.solve_monic_quadratic(&q.zero(), &q.from_i64(-2)),
            Err(Error::NoRootInField(_))
        ));
        // x^2 - x + 1/4 = (x - 1/2)^2
        let roots = q
            .solve_monic_quadratic(&q.from_i64(-1), &q.from_rational(1, 4).unwrap())
            .unwrap();
        assert_eq!(roots, QuadraticRoots::Double(q.from_rational(1, 2).unwrap()));
    }

    #[test]
    fn extend_and_lift() {
        let f2 = gf(2);
        let f4 = f2.extend().unwrap();
        assert_eq!(f4.order(), Some(4));
        // x^2 + x + 1 splits after extension
        let roots = f4.solve_monic_quadratic(&f4.one(), &f4.one()).unwrap();
        assert!(matches!(roots, QuadraticRoots::Distinct(_, _)));

        assert_eq!(f2.one().lift_to(&f4).unwrap(), f4.one());

        // homomorphism, exhaustively GF(3) -> GF(9)
        let f3 = gf(3);
        let f9 = f3.extend().unwrap();
        let elems: Vec<_> = f3.enumerate().unwrap().collect();
        for a in &elems {
            for b in &elems {
                assert_eq!(
                    (a + b).lift_to(&f9).unwrap(),
                    &a.lift_to(&f9).unwrap() + &b.lift_to(&f9).unwrap()
                );
                assert_eq!(
                    (a * b).lift_to(&f9).unwrap(),
                    &a.lift_to(&f9).unwrap() * &b.lift_to(&f9).unwrap()
                );
            }
        }
        // injectivity, exhaustively GF(2) -> GF(4)
        let l0 = f2.zero().lift_to(&f4).unwrap();
        let l1 = f2.one().lift_to(&f4).unwrap();
        assert_ne!(l0, l1);
    }

    #[test]
    fn lift_tower_consistency() {
        // GF(3) -> GF(81) directly agrees with GF(3) -> GF(9) -> GF(81)
        let f3 = gf(3);
        let f9 = f3.extend().unwrap();
        let f81 = f9.extend().unwrap();
        assert_eq!(f81.order(), Some(81));
        for a in f3.enumerate().unwrap() {
            let direct = a.lift_to(&f81).unwrap();
            let via = a.lift_to(&f9).unwrap().lift_to(&f81).unwrap();
            assert_eq!(direct, via);
        }
        // GF(9) embeds in GF(81) as a field homomorphism
        let e: Vec<_> = f9.enumerate().unwrap().collect();
        for a in &e {
            for b in &e {
                assert_eq!(
                    (a * b).lift_to(&f81).unwrap(),
                    &a.lift_to(&f81).unwrap() * &b.lift_to(&f81).unwrap()
                );
            }
        }
    }

    #[test]
    fn rationals_do_not_extend() {
        assert!(matches!(
            Field::rational().extend(),
            Err(Error::CannotExtendRationals)
        ));
        assert!(Field::rational().enumerate().is_err());
    }

    #[test]
    fn element_json_round_trip() {
        let f5 = gf(5);
        let x = f5.from_u64(3);
        assert_eq!(FieldElement::from_json(&f5, &x.to_json()).unwrap(), x);

        let f4 = Field::extension(2, 2).unwrap();
        let w = f4.from_coeffs(&[1, 1]).unwrap();
        assert_eq!(w.to_json(), serde_json::json!([1, 1]));
        assert_eq!(FieldElement::from_json(&f4, &w.to_json()).unwrap(), w);

        let q = Field::rational();
        let half = q.from_rational(-1, 2).unwrap();
        assert_eq!(half.to_json(), serde_json::json!("-1/2"));
        assert_eq!(FieldElement::from_json(&q, &half.to_json()).unwrap(), half);
        let three = q.from_u64(3);
        assert_eq!(three.to_json(), serde_json::json!("3"));
    }

    #[test]
    fn descriptor_json_matches_wire_format() {
        let d: FieldDescriptor = serde_json::from_str(r#"{"kind":"prime","p":2}"#).unwrap();
        assert_eq!(d, FieldDescriptor::Prime { p: 2 });
        let d: FieldDescriptor =
            serde_json::from_str(r#"{"kind":"ext","p":2,"k":2,"modulus":[1,1,1]}"#).unwrap();
        assert!(Field::new(d).is_ok());
        let d: FieldDescriptor = serde_json::from_str(r#"{"kind":"rational"}"#).unwrap();
        assert_eq!(d, FieldDescriptor::Rational);
    }

    #[test]
    fn index_round_trip_and_order() {
        let f9 = Field::extension(3, 2).unwrap();
        for (i, a) in f9.enumerate().unwrap().enumerate() {
            assert_eq!(a.index().unwrap(), i as u64);
            assert_eq!(f9.element_from_index(i as u64).unwrap(), a);
        }
    }

    proptest! {
        #[test]
        fn rational_field_laws(n1 in -50i64..50, d1 in 1i64..20, n2 in -50i64..50, d2 in 1i64..20) {
            let q = Field::rational();
            let a = q.from_rational(n1, d1).unwrap();
            let b = q.from_rational(n2, d2).unwrap();
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!(&(&a * &b) / &b, a);
            }
        }
    }
}
