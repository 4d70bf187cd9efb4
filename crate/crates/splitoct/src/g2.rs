//! G2 = Aut(O), represented concretely through its generators: the SL3
//! embedding a -> (alpha, u g; v g^{-T}, beta), the unipotent maps
//! delta_1(u), delta_2(v), and the diagonal swap hbar.
//!
//! A group element stores both its 8x8 matrix (action on the fixed
//! coordinate order) and the generator word that produced it, so reductions
//! can be replayed and audited.

use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::linalg::Matrix;
use crate::octonion::{enumerate_octonions, Octonion, Permutation, Vector3};

/// One generator of G2.
#[derive(Clone, PartialEq, Eq)]
pub enum Generator {
    /// Embedded SL3 element; the matrix must have determinant 1.
    Sl3(Matrix),
    Delta1(Vector3),
    Delta2(Vector3),
    Hbar,
}

impl Generator {
    /// Direct evaluation of the generator's defining formula.
    pub fn act(&self, a: &Octonion) -> Octonion {
        match self {
            Generator::Sl3(g) => {
                let ginv_t = g
                    .inverse()
                    .expect("SL3 matrices are invertible")
                    .transpose();
                Octonion::new(
                    a.alpha.clone(),
                    row_times_matrix(&a.u, g),
                    row_times_matrix(&a.v, &ginv_t),
                    a.beta.clone(),
                )
            }
            Generator::Delta1(u) => {
                let udv = u.dot(&a.v);
                let coeff = &(&a.alpha - &a.beta) - &udv;
                Octonion::new(
                    &a.alpha - &udv,
                    u.scale(&coeff).add(&a.u),
                    a.v.sub(&a.u.cross(u)),
                    &a.beta + &udv,
                )
            }
            Generator::Delta2(v) => {
                let udv = a.u.dot(v);
                let coeff = &(&a.beta - &a.alpha) - &udv;
                Octonion::new(
                    &a.alpha + &udv,
                    a.u.add(&a.v.cross(v)),
                    v.scale(&coeff).add(&a.v),
                    &a.beta - &udv,
                )
            }
            Generator::Hbar => Octonion::new(
                a.beta.clone(),
                a.v.neg(),
                a.u.neg(),
                a.alpha.clone(),
            ),
        }
    }

    pub fn inverse(&self) -> Generator {
        match self {
            Generator::Sl3(g) => Generator::Sl3(g.inverse().expect("SL3 invertible")),
            Generator::Delta1(u) => Generator::Delta1(u.neg()),
            Generator::Delta2(v) => Generator::Delta2(v.neg()),
            Generator::Hbar => Generator::Hbar,
        }
    }

    /// True when the generator acts as the identity.
    pub fn is_noop(&self) -> bool {
        match self {
            Generator::Sl3(g) => g.is_identity(),
            Generator::Delta1(u) => u.is_zero(),
            Generator::Delta2(v) => v.is_zero(),
            Generator::Hbar => false,
        }
    }

    /// The signed permutation of coordinates realizing u -> u <> sigma on
    /// both vector parts; its matrix has determinant 1.
    pub fn sl3_permutation(field: &Field, sigma: Permutation) -> Generator {
        let rows = (1..=3)
            .map(|i| Vector3::basis(field, i).diamond(sigma).0.to_vec())
            .collect();
        Generator::Sl3(Matrix::from_rows(field, rows))
    }

    pub fn to_json(&self) -> Json {
        match self {
            Generator::Sl3(g) => json!({
                "kind": "sl3",
                "g": g.rows().iter().map(|r| r.iter().map(|e| e.to_json()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
            Generator::Delta1(u) => json!({"kind": "d1", "u": u.to_json()}),
            Generator::Delta2(v) => json!({"kind": "d2", "v": v.to_json()}),
            Generator::Hbar => json!({"kind": "hbar"}),
        }
    }

    pub fn from_json(field: &Field, json: &Json) -> Result<Generator> {
        let kind = json
            .get("kind")
            .and_then(Json::as_str)
            .ok_or_else(|| Error::parse("generator missing kind"))?;
        match kind {
            "sl3" => {
                let rows = json
                    .get("g")
                    .and_then(Json::as_array)
                    .filter(|r| r.len() == 3)
                    .ok_or_else(|| Error::parse("sl3 generator needs a 3x3 matrix"))?;
                let mut out = Vec::with_capacity(3);
                for row in rows {
                    let row = row
                        .as_array()
                        .filter(|r| r.len() == 3)
                        .ok_or_else(|| Error::parse("sl3 generator needs a 3x3 matrix"))?;
                    out.push(
                        row.iter()
                            .map(|e| FieldElement::from_json(field, e))
                            .collect::<Result<Vec<_>>>()?,
                    );
                }
                Ok(Generator::Sl3(Matrix::from_rows(field, out)))
            }
            "d1" => Ok(Generator::Delta1(Vector3::from_json(
                field,
                json.get("u").ok_or_else(|| Error::parse("d1 needs u"))?,
            )?)),
            "d2" => Ok(Generator::Delta2(Vector3::from_json(
                field,
                json.get("v").ok_or_else(|| Error::parse("d2 needs v"))?,
            )?)),
            "hbar" => Ok(Generator::Hbar),
            other => Err(Error::parse(format!("unknown generator kind {other:?}"))),
        }
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Sl3(g) => write!(f, "sl3{:?}", g.rows()),
            Generator::Delta1(u) => write!(f, "d1{u:?}"),
            Generator::Delta2(v) => write!(f, "d2{v:?}"),
            Generator::Hbar => write!(f, "hbar"),
        }
    }
}

fn row_times_matrix(v: &Vector3, m: &Matrix) -> Vector3 {
    let field = v.field();
    let mut out = [field.zero(), field.zero(), field.zero()];
    for (j, slot) in out.iter_mut().enumerate() {
        let mut acc = field.zero();
        for i in 0..3 {
            acc = &acc + &(&v.0[i] * m.at(i, j));
        }
        *slot = acc;
    }
    Vector3(out)
}

/// An element of G2: an invertible 8x8 matrix on octonion coordinates
/// together with the generator word whose composition equals it. Transcript
/// order is composition order: the last entry acts first.
#[derive(Clone, PartialEq, Eq)]
pub struct G2Element {
    field: Field,
    matrix: Matrix,
    transcript: Vec<Generator>,
}

impl G2Element {
    pub fn identity(field: &Field) -> G2Element {
        G2Element {
            field: field.clone(),
            matrix: Matrix::identity(field, 8),
            transcript: Vec::new(),
        }
    }

    /// Realizes a generator as its 8x8 coordinate matrix.
    pub fn from_generator(gen: Generator) -> Result<G2Element> {
        let field = match &gen {
            Generator::Sl3(g) => {
                if !g.det3().is_one() {
                    return Err(Error::NotUnimodular);
                }
                g.field().clone()
            }
            Generator::Delta1(u) | Generator::Delta2(u) => u.field().clone(),
            Generator::Hbar => {
                return Err(Error::parse(
                    "hbar needs a field; use G2Element::hbar",
                ))
            }
        };
        Ok(Self::from_generator_in(&field, gen))
    }

    pub fn hbar(field: &Field) -> G2Element {
        Self::from_generator_in(field, Generator::Hbar)
    }

    pub(crate) fn from_generator_in(field: &Field, gen: Generator) -> G2Element {
        let matrix = matrix_of(field, &gen);
        G2Element {
            field: field.clone(),
            matrix,
            transcript: vec![gen],
        }
    }

    /// The SL3 element E + t E_ij (1-based indices, i != j): the column
    /// operation u_j += t u_i on the u part, contragredient on the v part.
    pub fn elementary(field: &Field, i: usize, j: usize, t: &FieldElement) -> Result<G2Element> {
        if !(1..=3).contains(&i) || !(1..=3).contains(&j) || i == j {
            return Err(Error::BadIndices(i, j));
        }
        let mut m = Matrix::identity(field, 3);
        *m.at_mut(i - 1, j - 1) = t.clone();
        Ok(Self::from_generator_in(field, Generator::Sl3(m)))
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn transcript(&self) -> &[Generator] {
        &self.transcript
    }

    /// self after other: apply(compose(g, h), a) = apply(g, apply(h, a)).
    pub fn compose(&self, other: &G2Element) -> G2Element {
        assert_eq!(self.field, other.field, "field mismatch in composition");
        let mut transcript = self.transcript.clone();
        transcript.extend(other.transcript.iter().cloned());
        G2Element {
            field: self.field.clone(),
            matrix: self.matrix.mul(&other.matrix),
            transcript,
        }
    }

    pub fn apply(&self, a: &Octonion) -> Octonion {
        assert_eq!(
            &self.field,
            a.field(),
            "field mismatch applying automorphism"
        );
        let coords = self.matrix.apply(&a.coords());
        Octonion::from_coords(coords.try_into().expect("8 coordinates"))
    }

    /// Diagonal action on a pair.
    pub fn apply_pair(&self, pair: (&Octonion, &Octonion)) -> (Octonion, Octonion) {
        (self.apply(pair.0), self.apply(pair.1))
    }

    pub fn inverse(&self) -> G2Element {
        let matrix = self
            .matrix
            .inverse()
            .expect("automorphism matrices are invertible");
        let transcript = self
            .transcript
            .iter()
            .rev()
            .map(Generator::inverse)
            .collect();
        G2Element {
            field: self.field.clone(),
            matrix,
            transcript,
        }
    }

    /// Product of the transcript's generator matrices, in transcript order.
    pub fn replay_matrix(&self) -> Matrix {
        let mut acc = Matrix::identity(&self.field, 8);
        for gen in &self.transcript {
            acc = acc.mul(&matrix_of(&self.field, gen));
        }
        acc
    }

    /// Checks that the stored matrix, the transcript, and the generator
    /// determinant constraints are mutually coherent.
    pub fn verify_transcript(&self) -> Result<()> {
        for gen in &self.transcript {
            if let Generator::Sl3(g) = gen {
                if !g.det3().is_one() {
                    return Err(Error::verification(
                        "transcript contains a non-unimodular sl3 generator",
                    ));
                }
            }
        }
        if self.replay_matrix() != self.matrix {
            return Err(Error::verification(
                "transcript does not replay to the stored matrix",
            ));
        }
        Ok(())
    }

    pub fn verify_automorphism(&self, sample: &VerifySample) -> AutomorphismReport {
        verify_automorphism(self, sample)
    }

    pub fn to_json(&self) -> Json {
        json!({
            "matrix": self
                .matrix
                .rows()
                .iter()
                .map(|r| r.iter().map(|e| e.to_json()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "transcript": self.transcript.iter().map(Generator::to_json).collect::<Vec<_>>(),
        })
    }

    /// Parses shape only; semantic checks live in `verify_transcript` and
    /// `verify_automorphism` so that corrupted data is reported as a
    /// verification failure, not a parse error.
    pub fn from_json(field: &Field, json: &Json) -> Result<G2Element> {
        let rows = json
            .get("matrix")
            .and_then(Json::as_array)
            .filter(|r| r.len() == 8)
            .ok_or_else(|| Error::parse("g2 element needs an 8x8 matrix"))?;
        let mut out = Vec::with_capacity(8);
        for row in rows {
            let row = row
                .as_array()
                .filter(|r| r.len() == 8)
                .ok_or_else(|| Error::parse("g2 element needs an 8x8 matrix"))?;
            out.push(
                row.iter()
                    .map(|e| FieldElement::from_json(field, e))
                    .collect::<Result<Vec<_>>>()?,
            );
        }
        let transcript = json
            .get("transcript")
            .and_then(Json::as_array)
            .ok_or_else(|| Error::parse("g2 element needs a transcript"))?
            .iter()
            .map(|g| Generator::from_json(field, g))
            .collect::<Result<Vec<_>>>()?;
        Ok(G2Element {
            field: field.clone(),
            matrix: Matrix::from_rows(field, out),
            transcript,
        })
    }
}

impl fmt::Debug for G2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "G2Element over {} with transcript {:?}",
            self.field, self.transcript
        )
    }
}

/// 8x8 coordinate matrix of a generator: columns are the images of the
/// basis octonions.
fn matrix_of(field: &Field, gen: &Generator) -> Matrix {
    let mut m = Matrix::zero(field, 8);
    for (j, b) in Octonion::basis(field).iter().enumerate() {
        let image = gen.act(b);
        for (i, c) in image.coords().into_iter().enumerate() {
            *m.at_mut(i, j) = c;
        }
    }
    m
}

/// Sampling strategy for automorphism verification.
pub enum VerifySample {
    /// Unit/trace/norm/conjugation on every octonion and multiplicativity on
    /// every pair for GF(2), on basis x all octonions otherwise. Requires
    /// q^8 <= 2^16.
    Exhaustive,
    Random { pairs: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomorphismReport {
    pub unit_fixed: bool,
    pub singles_checked: u64,
    pub pairs_checked: u64,
    pub trace_failures: u64,
    pub norm_failures: u64,
    pub conjugation_failures: u64,
    pub multiplicativity_failures: u64,
    pub form_failures: u64,
}

impl AutomorphismReport {
    pub fn passed(&self) -> bool {
        self.unit_fixed
            && self.trace_failures == 0
            && self.norm_failures == 0
            && self.conjugation_failures == 0
            && self.multiplicativity_failures == 0
            && self.form_failures == 0
    }
}

fn verify_automorphism(g: &G2Element, sample: &VerifySample) -> AutomorphismReport {
    let field = &g.field;
    let mut report = AutomorphismReport {
        unit_fixed: g.apply(&Octonion::one(field)) == Octonion::one(field),
        singles_checked: 0,
        pairs_checked: 0,
        trace_failures: 0,
        norm_failures: 0,
        conjugation_failures: 0,
        multiplicativity_failures: 0,
        form_failures: 0,
    };

    let single = |report: &mut AutomorphismReport, a: &Octonion| {
        let ga = g.apply(a);
        report.singles_checked += 1;
        if ga.trace() != a.trace() {
            report.trace_failures += 1;
        }
        if ga.norm() != a.norm() {
            report.norm_failures += 1;
        }
        if g.apply(&a.conjugate()) != ga.conjugate() {
            report.conjugation_failures += 1;
        }
    };
    let pair = |report: &mut AutomorphismReport, a: &Octonion, b: &Octonion| {
        report.pairs_checked += 1;
        let ga = g.apply(a);
        let gb = g.apply(b);
        if g.apply(&(a * b)) != &ga * &gb {
            report.multiplicativity_failures += 1;
        }
        if ga.bilinear_form(&gb) != a.bilinear_form(b) {
            report.form_failures += 1;
        }
    };

    match sample {
        VerifySample::Exhaustive => {
            let q = field.order().unwrap_or(u64::MAX);
            let space = q.checked_pow(8).unwrap_or(u64::MAX);
            assert!(
                space <= 1 << 16,
                "exhaustive verification needs q^8 <= 2^16"
            );
            let all: Vec<Octonion> = enumerate_octonions(field).unwrap().collect();
            for a in &all {
                single(&mut report, a);
            }
            if q == 2 {
                for a in &all {
                    for b in &all {
                        pair(&mut report, a, b);
                    }
                }
            } else {
                for a in Octonion::basis(field) {
                    for b in &all {
                        pair(&mut report, &a, b);
                        pair(&mut report, b, &a);
                    }
                }
            }
        }
        VerifySample::Random { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..*pairs {
                let a = Octonion::random(field, &mut rng);
                let b = Octonion::random(field, &mut rng);
                single(&mut report, &a);
                pair(&mut report, &a, &b);
            }
        }
    }
    report
}

/// Random word in the generators of the given length, for sampled property
/// checks.
pub fn random_element<R: rand::Rng + ?Sized>(
    field: &Field,
    rng: &mut R,
    len: usize,
) -> G2Element {
    let mut g = G2Element::identity(field);
    for _ in 0..len {
        let step = match rng.gen_range(0..4) {
            0 => {
                let i = rng.gen_range(1..=3);
                let mut j = rng.gen_range(1..=3);
                while j == i {
                    j = rng.gen_range(1..=3);
                }
                G2Element::elementary(field, i, j, &field.random(rng)).unwrap()
            }
            1 => G2Element::from_generator(Generator::Delta1(Vector3([
                field.random(rng),
                field.random(rng),
                field.random(rng),
            ])))
            .unwrap(),
            2 => G2Element::from_generator(Generator::Delta2(Vector3([
                field.random(rng),
                field.random(rng),
                field.random(rng),
            ])))
            .unwrap(),
            _ => G2Element::hbar(field),
        };
        g = step.compose(&g);
    }
    g
}
