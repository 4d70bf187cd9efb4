//! The split octonion algebra O(F) in Zorn vector-matrix form: elements are
//! (alpha, u; v, beta) with scalar diagonal and 3-vector off-diagonal parts.
//!
//! Coordinates are fixed everywhere in the order
//! (alpha; u1,u2,u3; v1,v2,v3; beta), including the 8x8 matrices acting on
//! them. Equality is exact and componentwise.

use std::fmt;

use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

/// A row 3-vector over the field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Vector3(pub [FieldElement; 3]);

impl Vector3 {
    pub fn new(a: FieldElement, b: FieldElement, c: FieldElement) -> Self {
        Vector3([a, b, c])
    }

    pub fn zero(field: &Field) -> Self {
        Vector3([field.zero(), field.zero(), field.zero()])
    }

    /// Standard basis vector c_i, i in 1..=3.
    pub fn basis(field: &Field, i: usize) -> Self {
        assert!((1..=3).contains(&i), "basis index {i}");
        let mut v = Self::zero(field);
        v.0[i - 1] = field.one();
        v
    }

    pub fn field(&self) -> &Field {
        self.0[0].field()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(FieldElement::is_zero)
    }

    pub fn dot(&self, rhs: &Vector3) -> FieldElement {
        let mut acc = self.0[0].field().zero();
        for (a, b) in self.0.iter().zip(&rhs.0) {
            acc = &acc + &(a * b);
        }
        acc
    }

    pub fn cross(&self, rhs: &Vector3) -> Vector3 {
        let [u1, u2, u3] = &self.0;
        let [v1, v2, v3] = &rhs.0;
        Vector3([
            &(u2 * v3) - &(u3 * v2),
            &(u3 * v1) - &(u1 * v3),
            &(u1 * v2) - &(u2 * v1),
        ])
    }

    pub fn add(&self, rhs: &Vector3) -> Vector3 {
        Vector3([
            &self.0[0] + &rhs.0[0],
            &self.0[1] + &rhs.0[1],
            &self.0[2] + &rhs.0[2],
        ])
    }

    pub fn sub(&self, rhs: &Vector3) -> Vector3 {
        Vector3([
            &self.0[0] - &rhs.0[0],
            &self.0[1] - &rhs.0[1],
            &self.0[2] - &rhs.0[2],
        ])
    }

    pub fn neg(&self) -> Vector3 {
        Vector3([self.0[0].neg(), self.0[1].neg(), self.0[2].neg()])
    }

    pub fn scale(&self, t: &FieldElement) -> Vector3 {
        Vector3([t * &self.0[0], t * &self.0[1], t * &self.0[2]])
    }

    /// Signed permutation action u -> u <> sigma: plain coordinate
    /// permutation for the identity and the 3-cycles, a sign-fixed swap for
    /// each transposition.
    pub fn diamond(&self, sigma: Permutation) -> Vector3 {
        let [u1, u2, u3] = &self.0;
        match sigma {
            Permutation::Identity => self.clone(),
            Permutation::Cycle123 => Vector3([u2.clone(), u3.clone(), u1.clone()]),
            Permutation::Cycle132 => Vector3([u3.clone(), u1.clone(), u2.clone()]),
            Permutation::Swap12 => Vector3([u2.clone(), u1.clone(), u3.neg()]),
            Permutation::Swap13 => Vector3([u3.clone(), u2.neg(), u1.clone()]),
            Permutation::Swap23 => Vector3([u1.neg(), u3.clone(), u2.clone()]),
        }
    }

    pub fn lift_to(&self, target: &Field) -> Result<Vector3> {
        Ok(Vector3([
            self.0[0].lift_to(target)?,
            self.0[1].lift_to(target)?,
            self.0[2].lift_to(target)?,
        ]))
    }

    pub fn to_json(&self) -> Json {
        Json::Array(self.0.iter().map(FieldElement::to_json).collect())
    }

    pub fn from_json(field: &Field, json: &Json) -> Result<Vector3> {
        let arr = json
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| Error::parse("vector must be an array of 3 elements"))?;
        Ok(Vector3([
            FieldElement::from_json(field, &arr[0])?,
            FieldElement::from_json(field, &arr[1])?,
            FieldElement::from_json(field, &arr[2])?,
        ]))
    }
}

impl fmt::Debug for Vector3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

/// A permutation of {1,2,3}, written in cycle notation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Permutation {
    Identity,
    /// (1,2,3): 1 -> 2 -> 3 -> 1
    Cycle123,
    /// (1,3,2): 1 -> 3 -> 2 -> 1
    Cycle132,
    Swap12,
    Swap13,
    Swap23,
}

impl Permutation {
    pub const ALL: [Permutation; 6] = [
        Permutation::Identity,
        Permutation::Cycle123,
        Permutation::Cycle132,
        Permutation::Swap12,
        Permutation::Swap13,
        Permutation::Swap23,
    ];
}

/// A split octonion (alpha, u; v, beta).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Octonion {
    pub alpha: FieldElement,
    pub u: Vector3,
    pub v: Vector3,
    pub beta: FieldElement,
}

impl Octonion {
    pub fn new(alpha: FieldElement, u: Vector3, v: Vector3, beta: FieldElement) -> Self {
        Octonion { alpha, u, v, beta }
    }

    pub fn zero(field: &Field) -> Self {
        Octonion::new(
            field.zero(),
            Vector3::zero(field),
            Vector3::zero(field),
            field.zero(),
        )
    }

    /// e1 = (1, 0; 0, 0)
    pub fn e1(field: &Field) -> Self {
        let mut a = Self::zero(field);
        a.alpha = field.one();
        a
    }

    /// e2 = (0, 0; 0, 1)
    pub fn e2(field: &Field) -> Self {
        let mut a = Self::zero(field);
        a.beta = field.one();
        a
    }

    /// Basis octonion u_i, i in 1..=3.
    pub fn u_basis(field: &Field, i: usize) -> Self {
        let mut a = Self::zero(field);
        a.u = Vector3::basis(field, i);
        a
    }

    /// Basis octonion v_i, i in 1..=3.
    pub fn v_basis(field: &Field, i: usize) -> Self {
        let mut a = Self::zero(field);
        a.v = Vector3::basis(field, i);
        a
    }

    /// 1_O = e1 + e2.
    pub fn one(field: &Field) -> Self {
        let mut a = Self::zero(field);
        a.alpha = field.one();
        a.beta = field.one();
        a
    }

    /// J = e1 - e2.
    pub fn j(field: &Field) -> Self {
        let mut a = Self::zero(field);
        a.alpha = field.one();
        a.beta = field.one().neg();
        a
    }

    /// a = alpha * 1_O.
    pub fn scalar(t: &FieldElement) -> Self {
        let field = t.field();
        Octonion::new(t.clone(), Vector3::zero(field), Vector3::zero(field), t.clone())
    }

    /// The 8 basis octonions in coordinate order (e1, u1, u2, u3, v1, v2, v3, e2).
    pub fn basis(field: &Field) -> Vec<Octonion> {
        let mut out = vec![Self::e1(field)];
        for i in 1..=3 {
            out.push(Self::u_basis(field, i));
        }
        for i in 1..=3 {
            out.push(Self::v_basis(field, i));
        }
        out.push(Self::e2(field));
        out
    }

    pub fn field(&self) -> &Field {
        self.alpha.field()
    }

    pub fn is_zero(&self) -> bool {
        self.alpha.is_zero() && self.u.is_zero() && self.v.is_zero() && self.beta.is_zero()
    }

    /// True when a = alpha * 1_O for some scalar.
    pub fn is_scalar(&self) -> bool {
        self.u.is_zero() && self.v.is_zero() && self.alpha == self.beta
    }

    pub fn is_diagonal(&self) -> bool {
        self.u.is_zero() && self.v.is_zero()
    }

    /// Coordinates in the fixed order (alpha; u; v; beta).
    pub fn coords(&self) -> [FieldElement; 8] {
        [
            self.alpha.clone(),
            self.u.0[0].clone(),
            self.u.0[1].clone(),
            self.u.0[2].clone(),
            self.v.0[0].clone(),
            self.v.0[1].clone(),
            self.v.0[2].clone(),
            self.beta.clone(),
        ]
    }

    pub fn from_coords(coords: [FieldElement; 8]) -> Self {
        let [a, u1, u2, u3, v1, v2, v3, b] = coords;
        Octonion::new(a, Vector3([u1, u2, u3]), Vector3([v1, v2, v3]), b)
    }

    pub fn add(&self, rhs: &Octonion) -> Octonion {
        Octonion::new(
            &self.alpha + &rhs.alpha,
            self.u.add(&rhs.u),
            self.v.add(&rhs.v),
            &self.beta + &rhs.beta,
        )
    }

    pub fn sub(&self, rhs: &Octonion) -> Octonion {
        Octonion::new(
            &self.alpha - &rhs.alpha,
            self.u.sub(&rhs.u),
            self.v.sub(&rhs.v),
            &self.beta - &rhs.beta,
        )
    }

    pub fn neg(&self) -> Octonion {
        Octonion::new(self.alpha.neg(), self.u.neg(), self.v.neg(), self.beta.neg())
    }

    pub fn scale(&self, t: &FieldElement) -> Octonion {
        Octonion::new(t * &self.alpha, self.u.scale(t), self.v.scale(t), t * &self.beta)
    }

    /// The Zorn product:
    /// (alpha alpha' + u.v',  alpha u' + beta' u - v x v';
    ///  alpha' v + beta v' + u x u',  beta beta' + v.u').
    pub fn mul(&self, rhs: &Octonion) -> Octonion {
        assert_eq!(
            self.field(),
            rhs.field(),
            "field mismatch in octonion product"
        );
        let alpha = &(&self.alpha * &rhs.alpha) + &self.u.dot(&rhs.v);
        let u = rhs
            .u
            .scale(&self.alpha)
            .add(&self.u.scale(&rhs.beta))
            .sub(&self.v.cross(&rhs.v));
        let v = self
            .v
            .scale(&rhs.alpha)
            .add(&rhs.v.scale(&self.beta))
            .add(&self.u.cross(&rhs.u));
        let beta = &(&self.beta * &rhs.beta) + &self.v.dot(&rhs.u);
        Octonion::new(alpha, u, v, beta)
    }

    /// Involution a -> (beta, -u; -v, alpha).
    pub fn conjugate(&self) -> Octonion {
        Octonion::new(self.beta.clone(), self.u.neg(), self.v.neg(), self.alpha.clone())
    }

    /// tr(a) = alpha + beta.
    pub fn trace(&self) -> FieldElement {
        &self.alpha + &self.beta
    }

    /// n(a) = alpha beta - u.v.
    pub fn norm(&self) -> FieldElement {
        &(&self.alpha * &self.beta) - &self.u.dot(&self.v)
    }

    /// q(a, a') = n(a + a') - n(a) - n(a'), expanded.
    pub fn bilinear_form(&self, rhs: &Octonion) -> FieldElement {
        assert_eq!(self.field(), rhs.field(), "field mismatch in bilinear form");
        let s = &(&self.alpha * &rhs.beta) + &(&rhs.alpha * &self.beta);
        &s - &(&self.u.dot(&rhs.v) + &rhs.u.dot(&self.v))
    }

    /// a -> a^T, swapping the two vector parts.
    pub fn transpose(&self) -> Octonion {
        Octonion::new(
            self.alpha.clone(),
            self.v.clone(),
            self.u.clone(),
            self.beta.clone(),
        )
    }

    pub fn is_traceless(&self) -> bool {
        self.trace().is_zero()
    }

    pub fn lift_to(&self, target: &Field) -> Result<Octonion> {
        Ok(Octonion::new(
            self.alpha.lift_to(target)?,
            self.u.lift_to(target)?,
            self.v.lift_to(target)?,
            self.beta.lift_to(target)?,
        ))
    }

    /// Mixed-radix rank over a finite field, alpha least significant.
    pub fn index(&self) -> Result<u64> {
        let q = self.field().order().ok_or(Error::InfiniteField)?;
        let coords = self.coords();
        let mut acc = 0u64;
        for c in coords.iter().rev() {
            acc = acc * q + c.index()?;
        }
        Ok(acc)
    }

    pub fn from_index(field: &Field, index: u64) -> Result<Octonion> {
        let q = field.order().ok_or(Error::InfiniteField)?;
        let mut rest = index;
        let mut coords = Vec::with_capacity(8);
        for _ in 0..8 {
            coords.push(field.element_from_index(rest % q)?);
            rest /= q;
        }
        if rest != 0 {
            return Err(Error::parse(format!("octonion index {index} out of range")));
        }
        Ok(Octonion::from_coords(coords.try_into().unwrap()))
    }

    /// Uniformly random octonion.
    pub fn random<R: rand::Rng + ?Sized>(field: &Field, rng: &mut R) -> Octonion {
        Octonion::new(
            field.random(rng),
            Vector3([field.random(rng), field.random(rng), field.random(rng)]),
            Vector3([field.random(rng), field.random(rng), field.random(rng)]),
            field.random(rng),
        )
    }

    /// Random traceless octonion (beta = -alpha).
    pub fn random_traceless<R: rand::Rng + ?Sized>(field: &Field, rng: &mut R) -> Octonion {
        let alpha = field.random(rng);
        let beta = alpha.neg();
        Octonion::new(
            alpha,
            Vector3([field.random(rng), field.random(rng), field.random(rng)]),
            Vector3([field.random(rng), field.random(rng), field.random(rng)]),
            beta,
        )
    }

    pub fn to_json(&self) -> Json {
        json!({
            "alpha": self.alpha.to_json(),
            "u": self.u.to_json(),
            "v": self.v.to_json(),
            "beta": self.beta.to_json(),
        })
    }

    pub fn from_json(field: &Field, json: &Json) -> Result<Octonion> {
        let obj = json
            .as_object()
            .ok_or_else(|| Error::parse("octonion must be an object"))?;
        let get = |key: &str| {
            obj.get(key)
                .ok_or_else(|| Error::parse(format!("octonion missing key {key:?}")))
        };
        Ok(Octonion::new(
            FieldElement::from_json(field, get("alpha")?)?,
            Vector3::from_json(field, get("u")?)?,
            Vector3::from_json(field, get("v")?)?,
            FieldElement::from_json(field, get("beta")?)?,
        ))
    }
}

impl fmt::Debug for Octonion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {:?}; {:?}, {})",
            self.alpha, self.u, self.v, self.beta
        )
    }
}

impl std::ops::Add<&Octonion> for &Octonion {
    type Output = Octonion;
    fn add(self, rhs: &Octonion) -> Octonion {
        Octonion::add(self, rhs)
    }
}

impl std::ops::Sub<&Octonion> for &Octonion {
    type Output = Octonion;
    fn sub(self, rhs: &Octonion) -> Octonion {
        Octonion::sub(self, rhs)
    }
}

impl std::ops::Mul<&Octonion> for &Octonion {
    type Output = Octonion;
    fn mul(self, rhs: &Octonion) -> Octonion {
        Octonion::mul(self, rhs)
    }
}

/// All octonions over a small finite field, in index order.
pub fn enumerate_octonions(field: &Field) -> Result<impl Iterator<Item = Octonion> + '_> {
    let q = field.order().ok_or(Error::InfiniteField)?;
    let total = q.checked_pow(8).ok_or_else(|| {
        Error::FieldTooLarge(format!("cannot enumerate O({})", field.name()))
    })?;
    Ok((0..total).map(move |i| Octonion::from_index(field, i).unwrap()))
}

/// All traceless octonions over a small finite field, in index order.
pub fn enumerate_traceless(field: &Field) -> Result<Vec<Octonion>> {
    let mut out: Vec<Octonion> = Vec::new();
    for a in enumerate_octonions(field)? {
        if a.is_traceless() {
            out.push(a);
        }
    }
    Ok(out)
}
