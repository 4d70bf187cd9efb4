//! Canonical forms under the G2 action: reduction of a single octonion to a
//! diagonal or K1 representative, of a pair through the four-case analysis on
//! a K1 first component, and of a traceless pair by characteristic dispatch.
//! Every reduction returns the group element that realizes it, as an explicit
//! generator word, so results can be replayed and verified exactly.
//!
//! When a required quadratic does not split, finite base fields are extended
//! (degree-doubling, deterministic modulus) and the whole reduction reruns in
//! the extension; at most two extensions are ever needed. Rationals are never
//! extended: the caller gets `NoRootInField`.

use std::collections::BTreeMap;

use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::g2::{G2Element, Generator};
use crate::linalg::Matrix;
use crate::octonion::{Octonion, Vector3};

/// Named octonion shapes: the diagonal and non-diagonal single-octonion
/// types, their traceless/equal-diagonal/transposed variants, and the
/// constant shapes used for traceless pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TypeTag {
    D,
    E,
    F,
    K,
    K1,
    L,
    L1,
    LT,
    L1T,
    M,
    M1,
    MT,
    M1T,
    N,
    P,
    KT,
    NT,
    PT,
    D0,
    F0,
    K0,
    N0,
    P0,
    L0T,
    M0,
    Zero,
    U1,
    V2,
    U1F,
}

impl TypeTag {
    pub const ALL: [TypeTag; 29] = [
        TypeTag::D,
        TypeTag::E,
        TypeTag::F,
        TypeTag::K,
        TypeTag::K1,
        TypeTag::L,
        TypeTag::L1,
        TypeTag::LT,
        TypeTag::L1T,
        TypeTag::M,
        TypeTag::M1,
        TypeTag::MT,
        TypeTag::M1T,
        TypeTag::N,
        TypeTag::P,
        TypeTag::KT,
        TypeTag::NT,
        TypeTag::PT,
        TypeTag::D0,
        TypeTag::F0,
        TypeTag::K0,
        TypeTag::N0,
        TypeTag::P0,
        TypeTag::L0T,
        TypeTag::M0,
        TypeTag::Zero,
        TypeTag::U1,
        TypeTag::V2,
        TypeTag::U1F,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            TypeTag::D => "D",
            TypeTag::E => "E",
            TypeTag::F => "F",
            TypeTag::K => "K",
            TypeTag::K1 => "K1",
            TypeTag::L => "L",
            TypeTag::L1 => "L1",
            TypeTag::LT => "LT",
            TypeTag::L1T => "L1T",
            TypeTag::M => "M",
            TypeTag::M1 => "M1",
            TypeTag::MT => "MT",
            TypeTag::M1T => "M1T",
            TypeTag::N => "N",
            TypeTag::P => "P",
            TypeTag::KT => "KT",
            TypeTag::NT => "NT",
            TypeTag::PT => "PT",
            TypeTag::D0 => "D0",
            TypeTag::F0 => "F0",
            TypeTag::K0 => "K0",
            TypeTag::N0 => "N0",
            TypeTag::P0 => "P0",
            TypeTag::L0T => "L0T",
            TypeTag::M0 => "M0",
            TypeTag::Zero => "0",
            TypeTag::U1 => "u1",
            TypeTag::V2 => "v2",
            TypeTag::U1F => "u1F",
        }
    }

    pub fn from_name(name: &str) -> Option<TypeTag> {
        TypeTag::ALL.into_iter().find(|t| t.name() == name)
    }

    /// Executable shape predicate, side conditions included.
    pub fn matches(&self, a: &Octonion) -> bool {
        let f = a.field();
        let one = f.one();
        let u = &a.u;
        let v = &a.v;
        let u_zero = u.is_zero();
        let v_zero = v.is_zero();
        let u_c1 = u.0[0] == one && u.0[1].is_zero() && u.0[2].is_zero();
        let u_c2 = u.0[0].is_zero() && u.0[1] == one && u.0[2].is_zero();
        let v_c1 = v.0[0] == one && v.0[1].is_zero() && v.0[2].is_zero();
        let v_c2 = v.0[0].is_zero() && v.0[1] == one && v.0[2].is_zero();
        let u_line = u.0[1].is_zero() && u.0[2].is_zero();
        let v_line = v.0[1].is_zero() && v.0[2].is_zero();
        let diag_eq = a.alpha == a.beta;
        let traceless = a.is_traceless();
        match self {
            TypeTag::D => u_zero && v_zero,
            TypeTag::E => u_zero && v_zero && diag_eq,
            TypeTag::F => u_zero && v_zero && !diag_eq,
            TypeTag::K => u_c1 && v_zero,
            TypeTag::K1 => u_c1 && v_zero && diag_eq,
            TypeTag::L => u_line && !u.0[0].is_zero() && v_zero,
            TypeTag::L1 => u_line && !u.0[0].is_zero() && v_zero && diag_eq,
            TypeTag::LT => u_zero && v_line && !v.0[0].is_zero(),
            TypeTag::L1T => u_zero && v_line && !v.0[0].is_zero() && diag_eq,
            TypeTag::M => u_c2 && v_zero,
            TypeTag::M1 => u_c2 && v_zero && diag_eq,
            TypeTag::MT => u_zero && v_c2,
            TypeTag::M1T => u_zero && v_c2 && diag_eq,
            TypeTag::N => u_c1 && v_line && !v.0[0].is_zero(),
            TypeTag::P => u_c1 && v_c2,
            TypeTag::KT => u_zero && v_c1,
            TypeTag::NT => v_c1 && u_line && !u.0[0].is_zero(),
            TypeTag::PT => v_c1 && u_c2,
            TypeTag::D0 => u_zero && v_zero && traceless,
            TypeTag::F0 => u_zero && v_zero && !diag_eq && traceless,
            TypeTag::K0 => u_c1 && v_zero && traceless,
            TypeTag::N0 => u_c1 && v_line && !v.0[0].is_zero() && traceless,
            TypeTag::P0 => u_c1 && v_c2 && traceless,
            TypeTag::L0T => u_zero && v_line && !v.0[0].is_zero() && traceless,
            TypeTag::M0 => u_c2 && v_zero && traceless,
            TypeTag::Zero => a.is_zero(),
            TypeTag::U1 => a.alpha.is_zero() && a.beta.is_zero() && u_c1 && v_zero,
            TypeTag::V2 => a.alpha.is_zero() && a.beta.is_zero() && u_zero && v_c2,
            TypeTag::U1F => a.alpha.is_zero() && a.beta.is_zero() && u_line && v_zero,
        }
    }

    /// Free parameters of the shape, read off a matching octonion.
    fn params(&self, a: &Octonion, prefix: Prefix) -> BTreeMap<String, FieldElement> {
        let mut out = BTreeMap::new();
        let mut put = |slot: u8, value: &FieldElement| {
            out.insert(prefix.name(slot), value.clone());
        };
        match self {
            TypeTag::D | TypeTag::F => {
                put(1, &a.alpha);
                put(8, &a.beta);
            }
            TypeTag::E | TypeTag::D0 | TypeTag::F0 => put(1, &a.alpha),
            TypeTag::K | TypeTag::M | TypeTag::MT => {
                put(1, &a.alpha);
                put(8, &a.beta);
            }
            TypeTag::K1 | TypeTag::M1 | TypeTag::M1T | TypeTag::K0 | TypeTag::M0 => {
                put(1, &a.alpha)
            }
            TypeTag::L => {
                put(1, &a.alpha);
                put(2, &a.u.0[0]);
                put(8, &a.beta);
            }
            TypeTag::L1 => {
                put(1, &a.alpha);
                put(2, &a.u.0[0]);
            }
            TypeTag::LT => {
                put(1, &a.alpha);
                put(5, &a.v.0[0]);
                put(8, &a.beta);
            }
            TypeTag::L1T | TypeTag::L0T => {
                put(1, &a.alpha);
                put(5, &a.v.0[0]);
            }
            TypeTag::N => {
                put(1, &a.alpha);
                put(5, &a.v.0[0]);
                put(8, &a.beta);
            }
            TypeTag::N0 => {
                put(1, &a.alpha);
                put(5, &a.v.0[0]);
            }
            TypeTag::P | TypeTag::KT | TypeTag::PT => {
                put(1, &a.alpha);
                put(8, &a.beta);
            }
            TypeTag::NT => {
                put(1, &a.alpha);
                put(2, &a.u.0[0]);
                put(8, &a.beta);
            }
            TypeTag::P0 => put(1, &a.alpha),
            TypeTag::Zero | TypeTag::U1 | TypeTag::V2 => {}
            TypeTag::U1F => put(2, &a.u.0[0]),
        }
        out
    }
}

#[derive(Clone, Copy)]
enum Prefix {
    Alpha,
    Beta,
}

impl Prefix {
    fn name(&self, slot: u8) -> String {
        match self {
            Prefix::Alpha => format!("alpha{slot}"),
            Prefix::Beta => format!("beta{slot}"),
        }
    }
}

/// The published pair shapes: the eleven types for a general pair and the
/// extra shapes appearing in the traceless classifications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PairTag {
    DD,
    FK,
    FN,
    FP,
    EK1,
    K1E,
    K1F,
    K1L1,
    K1LT,
    K1M,
    K1M1T,
    D0D0,
    F0K0,
    F0N0,
    F0P0,
    U1L0T,
    U1M0,
    U1F0,
    U1U1F,
    U1V2,
    ZeroU1,
    EE,
    K1L1T,
    K1M1,
}

impl PairTag {
    pub const ALL: [PairTag; 24] = [
        PairTag::DD,
        PairTag::FK,
        PairTag::FN,
        PairTag::FP,
        PairTag::EK1,
        PairTag::K1E,
        PairTag::K1F,
        PairTag::K1L1,
        PairTag::K1LT,
        PairTag::K1M,
        PairTag::K1M1T,
        PairTag::D0D0,
        PairTag::F0K0,
        PairTag::F0N0,
        PairTag::F0P0,
        PairTag::U1L0T,
        PairTag::U1M0,
        PairTag::U1F0,
        PairTag::U1U1F,
        PairTag::U1V2,
        PairTag::ZeroU1,
        PairTag::EE,
        PairTag::K1L1T,
        PairTag::K1M1,
    ];

    /// The eleven types of the pair classification, in published order.
    pub const PAIR_THEOREM: [PairTag; 11] = [
        PairTag::DD,
        PairTag::FK,
        PairTag::FN,
        PairTag::FP,
        PairTag::EK1,
        PairTag::K1E,
        PairTag::K1F,
        PairTag::K1L1,
        PairTag::K1LT,
        PairTag::K1M,
        PairTag::K1M1T,
    ];

    /// The ten traceless-pair types away from characteristic 2.
    pub const TRACELESS_ODD: [PairTag; 10] = [
        PairTag::D0D0,
        PairTag::F0K0,
        PairTag::F0N0,
        PairTag::F0P0,
        PairTag::U1L0T,
        PairTag::U1M0,
        PairTag::U1F0,
        PairTag::U1U1F,
        PairTag::U1V2,
        PairTag::ZeroU1,
    ];

    /// The seven traceless-pair types in characteristic 2.
    pub const TRACELESS_CHAR2: [PairTag; 7] = [
        PairTag::EE,
        PairTag::EK1,
        PairTag::K1E,
        PairTag::K1L1,
        PairTag::K1L1T,
        PairTag::K1M1,
        PairTag::K1M1T,
    ];

    pub fn components(&self) -> (TypeTag, TypeTag) {
        match self {
            PairTag::DD => (TypeTag::D, TypeTag::D),
            PairTag::FK => (TypeTag::F, TypeTag::K),
            PairTag::FN => (TypeTag::F, TypeTag::N),
            PairTag::FP => (TypeTag::F, TypeTag::P),
            PairTag::EK1 => (TypeTag::E, TypeTag::K1),
            PairTag::K1E => (TypeTag::K1, TypeTag::E),
            PairTag::K1F => (TypeTag::K1, TypeTag::F),
            PairTag::K1L1 => (TypeTag::K1, TypeTag::L1),
            PairTag::K1LT => (TypeTag::K1, TypeTag::LT),
            PairTag::K1M => (TypeTag::K1, TypeTag::M),
            PairTag::K1M1T => (TypeTag::K1, TypeTag::M1T),
            PairTag::D0D0 => (TypeTag::D0, TypeTag::D0),
            PairTag::F0K0 => (TypeTag::F0, TypeTag::K0),
            PairTag::F0N0 => (TypeTag::F0, TypeTag::N0),
            PairTag::F0P0 => (TypeTag::F0, TypeTag::P0),
            PairTag::U1L0T => (TypeTag::U1, TypeTag::L0T),
            PairTag::U1M0 => (TypeTag::U1, TypeTag::M0),
            PairTag::U1F0 => (TypeTag::U1, TypeTag::F0),
            PairTag::U1U1F => (TypeTag::U1, TypeTag::U1F),
            PairTag::U1V2 => (TypeTag::U1, TypeTag::V2),
            PairTag::ZeroU1 => (TypeTag::Zero, TypeTag::U1),
            PairTag::EE => (TypeTag::E, TypeTag::E),
            PairTag::K1L1T => (TypeTag::K1, TypeTag::L1T),
            PairTag::K1M1 => (TypeTag::K1, TypeTag::M1),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            PairTag::DD => "DD",
            PairTag::FK => "FK",
            PairTag::FN => "FN",
            PairTag::FP => "FP",
            PairTag::EK1 => "EK1",
            PairTag::K1E => "K1E",
            PairTag::K1F => "K1F",
            PairTag::K1L1 => "K1L1",
            PairTag::K1LT => "K1LT",
            PairTag::K1M => "K1M",
            PairTag::K1M1T => "K1M1T",
            PairTag::D0D0 => "D0D0",
            PairTag::F0K0 => "F0K0",
            PairTag::F0N0 => "F0N0",
            PairTag::F0P0 => "F0P0",
            PairTag::U1L0T => "u1L0T",
            PairTag::U1M0 => "u1M0",
            PairTag::U1F0 => "u1F0",
            PairTag::U1U1F => "u1u1F",
            PairTag::U1V2 => "u1v2",
            PairTag::ZeroU1 => "0u1",
            PairTag::EE => "EE",
            PairTag::K1L1T => "K1L1T",
            PairTag::K1M1 => "K1M1",
        }
    }

    pub fn from_name(name: &str) -> Option<PairTag> {
        PairTag::ALL.into_iter().find(|t| t.name() == name)
    }

    pub fn matches(&self, a: &Octonion, b: &Octonion) -> bool {
        let (ta, tb) = self.components();
        ta.matches(a) && tb.matches(b)
    }

    fn params(&self, a: &Octonion, b: &Octonion) -> BTreeMap<String, FieldElement> {
        let (ta, tb) = self.components();
        let mut out = ta.params(a, Prefix::Alpha);
        out.extend(tb.params(b, Prefix::Beta));
        out
    }
}

/// Every single-octonion tag whose predicate holds. Overlaps are real:
/// type D is the union of types E and F.
pub fn classify_octonion(a: &Octonion) -> Vec<TypeTag> {
    TypeTag::ALL.into_iter().filter(|t| t.matches(a)).collect()
}

/// Every published pair tag whose predicate holds.
pub fn classify_pair(a: &Octonion, b: &Octonion) -> Vec<PairTag> {
    PairTag::ALL.into_iter().filter(|t| t.matches(a, b)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionValue {
    Single(Octonion),
    Pair(Octonion, Octonion),
}

impl ReductionValue {
    pub fn field(&self) -> &Field {
        match self {
            ReductionValue::Single(a) => a.field(),
            ReductionValue::Pair(a, _) => a.field(),
        }
    }

    pub fn lift_to(&self, target: &Field) -> Result<ReductionValue> {
        Ok(match self {
            ReductionValue::Single(a) => ReductionValue::Single(a.lift_to(target)?),
            ReductionValue::Pair(a, b) => {
                ReductionValue::Pair(a.lift_to(target)?, b.lift_to(target)?)
            }
        })
    }

    pub fn to_json(&self) -> Json {
        match self {
            ReductionValue::Single(a) => a.to_json(),
            ReductionValue::Pair(a, b) => json!([a.to_json(), b.to_json()]),
        }
    }

    pub fn from_json(field: &Field, json: &Json) -> Result<ReductionValue> {
        if let Some(arr) = json.as_array() {
            if arr.len() != 2 {
                return Err(Error::parse("pair must be an array of two octonions"));
            }
            Ok(ReductionValue::Pair(
                Octonion::from_json(field, &arr[0])?,
                Octonion::from_json(field, &arr[1])?,
            ))
        } else {
            Ok(ReductionValue::Single(Octonion::from_json(field, json)?))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReductionType {
    Single {
        tag: TypeTag,
        params: BTreeMap<String, FieldElement>,
    },
    Pair {
        tag: PairTag,
        params: BTreeMap<String, FieldElement>,
    },
    /// Intermediate shape from the second-component lemma, by case number.
    Lemma44Case { case: u8 },
}

impl ReductionType {
    pub fn name(&self) -> String {
        match self {
            ReductionType::Single { tag, .. } => tag.name().to_string(),
            ReductionType::Pair { tag, .. } => tag.name().to_string(),
            ReductionType::Lemma44Case { case } => format!("case{case}"),
        }
    }
}

/// A reduction certificate: the group element, the canonical value it
/// produces, the type tag with its free parameters, and the field in which
/// the reduction landed (possibly an extension of the input's field).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub g: G2Element,
    pub value: ReductionValue,
    pub rtype: ReductionType,
    pub field_used: Field,
}

impl Reduction {
    pub fn tag_name(&self) -> String {
        self.rtype.name()
    }

    pub fn to_json(&self) -> Json {
        let params = match &self.rtype {
            ReductionType::Single { params, .. } | ReductionType::Pair { params, .. } => params
                .iter()
                .map(|(k, v)| (k.clone(), v.to_json()))
                .collect(),
            ReductionType::Lemma44Case { .. } => serde_json::Map::new(),
        };
        json!({
            "g": self.g.to_json(),
            "result": self.value.to_json(),
            "type": self.rtype.name(),
            "params": Json::Object(params),
            "field_used": self.field_used.descriptor(),
        })
    }

    pub fn from_json(json: &Json) -> Result<Reduction> {
        let desc: crate::field::FieldDescriptor = serde_json::from_value(
            json.get("field_used")
                .ok_or_else(|| Error::parse("reduction missing field_used"))?
                .clone(),
        )
        .map_err(|e| Error::parse(format!("bad field_used: {e}")))?;
        let field = Field::new(desc)?;
        let g = G2Element::from_json(
            &field,
            json.get("g").ok_or_else(|| Error::parse("reduction missing g"))?,
        )?;
        let value = ReductionValue::from_json(
            &field,
            json.get("result")
                .ok_or_else(|| Error::parse("reduction missing result"))?,
        )?;
        let type_name = json
            .get("type")
            .and_then(Json::as_str)
            .ok_or_else(|| Error::parse("reduction missing type"))?;
        let mut params = BTreeMap::new();
        if let Some(obj) = json.get("params").and_then(Json::as_object) {
            for (k, v) in obj {
                params.insert(k.clone(), FieldElement::from_json(&field, v)?);
            }
        }
        let rtype = if let Some(case) = type_name.strip_prefix("case") {
            let case: u8 = case
                .parse()
                .map_err(|_| Error::parse(format!("bad case tag {type_name:?}")))?;
            ReductionType::Lemma44Case { case }
        } else if let Some(tag) = PairTag::from_name(type_name) {
            match value {
                ReductionValue::Pair(..) => ReductionType::Pair { tag, params },
                _ => return Err(Error::parse("pair tag on a single result")),
            }
        } else if let Some(tag) = TypeTag::from_name(type_name) {
            ReductionType::Single { tag, params }
        } else {
            return Err(Error::parse(format!("unknown type tag {type_name:?}")));
        };
        Ok(Reduction {
            g,
            value,
            rtype,
            field_used: field,
        })
    }
}

/// Checks a reduction certificate against the input it claims to reduce:
/// the transcript must replay to the stored matrix, the input (lifted to the
/// recorded field) must map exactly onto the result, and the claimed type
/// predicate must hold.
pub fn verify_reduction(input: &ReductionValue, r: &Reduction) -> Result<()> {
    r.g.verify_transcript()?;
    if r.g.apply(&Octonion::one(&r.field_used)) != Octonion::one(&r.field_used) {
        return Err(Error::verification("group element does not fix the unit"));
    }
    let lifted = input
        .lift_to(&r.field_used)
        .map_err(|e| Error::verification(format!("input does not lift: {e}")))?;
    let moved = match &lifted {
        ReductionValue::Single(a) => ReductionValue::Single(r.g.apply(a)),
        ReductionValue::Pair(a, b) => {
            let (x, y) = r.g.apply_pair((a, b));
            ReductionValue::Pair(x, y)
        }
    };
    if moved != r.value {
        return Err(Error::verification(
            "applying g to the input does not reproduce the result",
        ));
    }
    let tag_ok = match (&r.rtype, &r.value) {
        (ReductionType::Single { tag, .. }, ReductionValue::Single(a)) => tag.matches(a),
        (ReductionType::Pair { tag, .. }, ReductionValue::Pair(a, b)) => tag.matches(a, b),
        (ReductionType::Lemma44Case { case }, ReductionValue::Pair(_, b)) => {
            lemma44_case_shape(*case, b)
        }
        _ => false,
    };
    if !tag_ok {
        return Err(Error::verification("type predicate fails on the result"));
    }
    Ok(())
}

fn lemma44_case_shape(case: u8, b: &Octonion) -> bool {
    let u = &b.u;
    let v = &b.v;
    let one = b.field().one();
    match case {
        1 => u.0[1].is_zero() && u.0[2].is_zero() && v.0[1].is_zero() && v.0[2].is_zero(),
        2 => {
            u.0[1].is_zero()
                && u.0[2].is_zero()
                && v.0[0].is_zero()
                && v.0[1] == one
                && v.0[2].is_zero()
        }
        3 => u.0[0].is_zero() && u.0[1] == one && u.0[2].is_zero() && v.0[0].is_zero(),
        4 => {
            u.0[0].is_zero()
                && u.0[1] == one
                && u.0[2].is_zero()
                && !v.0[0].is_zero()
                && v.0[2].is_zero()
        }
        _ => false,
    }
}

/// Which vector part of the octonion a reduction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    U,
    V,
}

/// Accumulates generator moves applied simultaneously to a tuple of points.
struct Mover {
    field: Field,
    g: G2Element,
    pts: Vec<Octonion>,
}

impl Mover {
    fn new(field: &Field, pts: Vec<Octonion>) -> Mover {
        Mover {
            field: field.clone(),
            g: G2Element::identity(field),
            pts,
        }
    }

    fn step(&mut self, gen: Generator) {
        if gen.is_noop() {
            return;
        }
        let e = G2Element::from_generator_in(&self.field, gen);
        for p in &mut self.pts {
            *p = e.apply(p);
        }
        self.g = e.compose(&self.g);
    }

    fn elementary(&mut self, i: usize, j: usize, t: FieldElement) {
        if t.is_zero() {
            return;
        }
        let mut m = Matrix::identity(&self.field, 3);
        *m.at_mut(i - 1, j - 1) = t;
        self.step(Generator::Sl3(m));
    }
}

/// Determinant-one matrix whose first row is the nonzero vector u.
fn basis_completion(u: &Vector3) -> Matrix {
    let field = u.field();
    let pivot = (0..3)
        .find(|&i| !u.0[i].is_zero())
        .expect("nonzero vector required");
    let (a, b) = match pivot {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    // sign of the row arrangement (pivot, a, b)
    let eps_negative = pivot == 1;
    let mut det0 = u.0[pivot].clone();
    if eps_negative {
        det0 = det0.neg();
    }
    let scale = det0.inv();
    let mut rows = vec![u.0.to_vec()];
    let mut row_a = vec![field.zero(), field.zero(), field.zero()];
    row_a[a] = scale;
    rows.push(row_a);
    let mut row_b = vec![field.zero(), field.zero(), field.zero()];
    row_b[b] = field.one();
    rows.push(row_b);
    Matrix::from_rows(field, rows)
}

/// Determinant-one matrix M with u M = (1,0,0).
fn sl3_sending_to_c1(u: &Vector3) -> Matrix {
    basis_completion(u)
        .inverse()
        .expect("basis completion is invertible")
}

/// Clears v2 and v3 using v1 != 0, through elementaries with i in {2,3}.
/// Fixes any octonion whose u part vanishes outside the first slot.
fn clear_v_tail(m: &mut Mover, idx: usize) {
    let v1 = m.pts[idx].v.0[0].clone();
    let t2 = m.pts[idx].v.0[1].div(&v1);
    m.elementary(2, 1, t2);
    let t3 = m.pts[idx].v.0[2].div(&v1);
    m.elementary(3, 1, t3);
}

/// Brings v = (v1, v2, v3) with (v2, v3) != 0 to (v1, 1, 0), through
/// elementaries with i, j in {2,3}.
fn v_tail_to_010(m: &mut Mover, idx: usize) {
    let one = m.field.one();
    if m.pts[idx].v.0[2].is_zero() {
        let v2 = m.pts[idx].v.0[1].clone();
        if v2 == one {
            return;
        }
        // route through the third slot to rescale
        m.elementary(3, 2, one.neg());
    }
    let v3 = m.pts[idx].v.0[2].clone();
    let v2 = m.pts[idx].v.0[1].clone();
    m.elementary(2, 3, (&v2 - &one).div(&v3));
    let v3 = m.pts[idx].v.0[2].clone();
    m.elementary(3, 2, v3);
}

/// Mirrored helpers acting on the u part while fixing a (1,0,0) v part.

fn clear_u_tail(m: &mut Mover, idx: usize) {
    let u1 = m.pts[idx].u.0[0].clone();
    let t2 = m.pts[idx].u.0[1].div(&u1).neg();
    m.elementary(1, 2, t2);
    let t3 = m.pts[idx].u.0[2].div(&u1).neg();
    m.elementary(1, 3, t3);
}

fn u_tail_to_010(m: &mut Mover, idx: usize) {
    let one = m.field.one();
    if m.pts[idx].u.0[2].is_zero() {
        let u2 = m.pts[idx].u.0[1].clone();
        if u2 == one {
            return;
        }
        m.elementary(2, 3, one.clone());
    }
    let u3 = m.pts[idx].u.0[2].clone();
    let u2 = m.pts[idx].u.0[1].clone();
    m.elementary(3, 2, (&one - &u2).div(&u3));
    let u3 = m.pts[idx].u.0[2].clone();
    m.elementary(2, 3, u3.neg());
}

/// SL3-only reduction of the designated vector part to (1,0,0), leaving the
/// other part of shape (*,0,0) or (0,1,0).
fn reduce_vector_steps(m: &mut Mover, idx: usize, side: Side) -> Result<()> {
    match side {
        Side::U => {
            if m.pts[idx].u.is_zero() {
                return Err(Error::ZeroVector);
            }
            m.step(Generator::Sl3(sl3_sending_to_c1(&m.pts[idx].u)));
            let v = &m.pts[idx].v;
            if v.0[1].is_zero() && v.0[2].is_zero() {
                return Ok(());
            }
            if !v.0[0].is_zero() {
                clear_v_tail(m, idx);
            } else {
                v_tail_to_010(m, idx);
            }
        }
        Side::V => {
            if m.pts[idx].v.is_zero() {
                return Err(Error::ZeroVector);
            }
            // v transforms contragradiently, so the completion matrix itself
            // (transposed) is the right group element here.
            m.step(Generator::Sl3(basis_completion(&m.pts[idx].v).transpose()));
            let u = &m.pts[idx].u;
            if u.0[1].is_zero() && u.0[2].is_zero() {
                return Ok(());
            }
            if !u.0[0].is_zero() {
                clear_u_tail(m, idx);
            } else {
                u_tail_to_010(m, idx);
            }
        }
    }
    Ok(())
}

/// Tag of a reduced-vector result, read off its shape.
fn shape_tag(a: &Octonion) -> TypeTag {
    for tag in [
        TypeTag::N,
        TypeTag::P,
        TypeTag::K,
        TypeTag::NT,
        TypeTag::PT,
        TypeTag::KT,
        TypeTag::D,
    ] {
        if tag.matches(a) {
            return tag;
        }
    }
    unreachable!("reduced octonion has an unexpected shape: {a:?}")
}

/// Remark-level entry point: reduce one vector part by SL3 alone.
pub fn reduce_vector(a: &Octonion, side: Side) -> Result<Reduction> {
    let field = a.field().clone();
    let mut m = Mover::new(&field, vec![a.clone()]);
    reduce_vector_steps(&mut m, 0, side)?;
    let result = m.pts.pop().unwrap();
    let tag = shape_tag(&result);
    let params = tag.params(&result, Prefix::Alpha);
    Ok(Reduction {
        g: m.g,
        value: ReductionValue::Single(result),
        rtype: ReductionType::Single { tag, params },
        field_used: field,
    })
}

/// Outcome of the single-octonion reduction.
enum SingleOut {
    Diagonal,
    K1,
}

/// Full single-octonion reduction on pts[idx], including the deterministic
/// ordering of a diagonal result. May request a field extension through
/// `NoRootInField`.
fn canonical_one_steps(m: &mut Mover, idx: usize) -> Result<SingleOut> {
    let field = m.field.clone();
    if !m.pts[idx].is_diagonal() {
        if m.pts[idx].u.is_zero() {
            m.step(Generator::Hbar);
        }
        reduce_vector_steps(m, idx, Side::U)?;
        // (0,1,0) branch: fold the second v slot into the u part, then
        // straighten u again.
        if !m.pts[idx].v.0[1].is_zero() {
            m.step(Generator::Delta1(Vector3::new(
                field.zero(),
                field.zero(),
                field.one().neg(),
            )));
            m.step(Generator::Sl3(sl3_sending_to_c1(&m.pts[idx].u)));
        }
        // now u = (1,0,0), v = (a5,0,0): kill v with the root of
        // x^2 + (a1 - a8) x - a5
        let a = &m.pts[idx];
        let b = &a.alpha - &a.beta;
        let c = a.v.0[0].neg();
        let roots = field.solve_monic_quadratic(&b, &c)?;
        let v1 = roots.min_root().clone();
        m.step(Generator::Delta2(Vector3::new(
            v1,
            field.zero(),
            field.zero(),
        )));
        // diagonal difference nonzero: absorb the u part
        let a = &m.pts[idx];
        if a.alpha != a.beta {
            let t = (&a.beta - &a.alpha).inv();
            m.step(Generator::Delta1(Vector3::new(
                t,
                field.zero(),
                field.zero(),
            )));
        } else {
            return Ok(SingleOut::K1);
        }
    }
    // diagonal: order the entries
    let a = &m.pts[idx];
    if a.alpha > a.beta {
        m.step(Generator::Hbar);
    }
    Ok(SingleOut::Diagonal)
}

const MAX_EXTENSIONS: usize = 2;

/// Prop-level canonical form of a single octonion: type D (entries ordered)
/// or K1, with the realizing group element and the field finally used.
pub fn canonical_one(a: &Octonion) -> Result<Reduction> {
    let mut field = a.field().clone();
    let mut current = a.clone();
    for attempt in 0.. {
        let mut m = Mover::new(&field, vec![current.clone()]);
        match canonical_one_steps(&mut m, 0) {
            Ok(out) => {
                let result = m.pts.pop().unwrap();
                let tag = match out {
                    SingleOut::Diagonal => TypeTag::D,
                    SingleOut::K1 => TypeTag::K1,
                };
                let params = tag.params(&result, Prefix::Alpha);
                return Ok(Reduction {
                    g: m.g,
                    value: ReductionValue::Single(result),
                    rtype: ReductionType::Single { tag, params },
                    field_used: field,
                });
            }
            Err(Error::NoRootInField(msg)) => {
                if !field.is_finite() || attempt >= MAX_EXTENSIONS {
                    return Err(Error::NoRootInField(msg));
                }
                field = field.extend()?;
                current = a.lift_to(&field)?;
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

/// Lemma-level prereduction of a second component by SL3 and hbar alone:
/// ends in type D, K, N or P.
fn prereduce_steps(m: &mut Mover, idx: usize) {
    if m.pts[idx].is_diagonal() {
        return;
    }
    if m.pts[idx].u.is_zero() {
        m.step(Generator::Hbar);
    }
    reduce_vector_steps(m, idx, Side::U).expect("nonzero u part");
}

pub fn prereduce_b(b: &Octonion) -> Reduction {
    let field = b.field().clone();
    let mut m = Mover::new(&field, vec![b.clone()]);
    prereduce_steps(&mut m, 0);
    let result = m.pts.pop().unwrap();
    let tag = shape_tag(&result);
    let params = tag.params(&result, Prefix::Alpha);
    Reduction {
        g: m.g,
        value: ReductionValue::Single(result),
        rtype: ReductionType::Single { tag, params },
        field_used: field,
    }
}

/// Stabilizer moves for a K1 first component: elementaries with i != 1 fix
/// (a1, (1,0,0); 0, a1) exactly. Returns the lemma case reached.
fn lemma44_steps(m: &mut Mover) -> u8 {
    let b = m.pts[1].clone();
    let (b3, b4) = (b.u.0[1].clone(), b.u.0[2].clone());
    if b3.is_zero() && b4.is_zero() {
        let v = &b.v;
        if v.0[1].is_zero() && v.0[2].is_zero() {
            return 1;
        }
        if !v.0[0].is_zero() {
            clear_v_tail(m, 1);
            return 1;
        }
        v_tail_to_010(m, 1);
        return 2;
    }
    // u part to (0,1,0), only i in {2,3} moves
    if m.pts[1].u.0[1].is_zero() {
        m.elementary(3, 2, m.field.one());
    }
    if m.pts[1].u.0[1] != m.field.one() {
        if m.pts[1].u.0[2].is_zero() {
            m.elementary(2, 3, m.field.one());
        }
        let u2 = m.pts[1].u.0[1].clone();
        let u3 = m.pts[1].u.0[2].clone();
        m.elementary(3, 2, (&m.field.one() - &u2).div(&u3));
    }
    let u3 = m.pts[1].u.0[2].clone();
    m.elementary(2, 3, u3.neg());
    let u1 = m.pts[1].u.0[0].clone();
    m.elementary(2, 1, u1.neg());

    if m.pts[1].v.0[0].is_zero() {
        3
    } else {
        // clear the third v slot with the only stabilizer move that also
        // fixes the (0,1,0) u part: i = 3, j = 1
        let v1 = m.pts[1].v.0[0].clone();
        let v3 = m.pts[1].v.0[2].clone();
        m.elementary(3, 1, v3.div(&v1));
        4
    }
}

/// Second-component reduction below a K1 first component, reported by case.
pub fn reduce_second_given_k1(a: &Octonion, b: &Octonion) -> Result<Reduction> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(format!(
            "{} vs {}",
            a.field().name(),
            b.field().name()
        )));
    }
    if !TypeTag::K1.matches(a) {
        return Err(Error::NotK1);
    }
    let field = a.field().clone();
    let mut m = Mover::new(&field, vec![a.clone(), b.clone()]);
    let case = lemma44_steps(&mut m);
    debug_assert_eq!(&m.pts[0], a, "stabilizer moves must fix a");
    let b_out = m.pts.pop().unwrap();
    let a_out = m.pts.pop().unwrap();
    Ok(Reduction {
        g: m.g,
        value: ReductionValue::Pair(a_out, b_out),
        rtype: ReductionType::Lemma44Case { case },
        field_used: field,
    })
}

/// Case 1 of the pair proof: b = (b1, (b2,0,0); (b5,0,0), b8).
fn pair_case1(m: &mut Mover) -> Result<PairTag> {
    let field = m.field.clone();
    let b = m.pts[1].clone();
    let (b1, b2, b5, b8) = (
        b.alpha.clone(),
        b.u.0[0].clone(),
        b.v.0[0].clone(),
        b.beta.clone(),
    );
    if !b5.is_zero() {
        // root of b5 x^2 + (b8 - b1) x - b2, made monic
        let lin = (&b8 - &b1).div(&b5);
        let con = b2.div(&b5).neg();
        let roots = field.solve_monic_quadratic(&lin, &con)?;
        let u1 = roots.min_root().clone();
        m.step(Generator::Delta1(Vector3::new(
            u1,
            field.zero(),
            field.zero(),
        )));
        return Ok(PairTag::K1LT);
    }
    if b1 == b8 {
        if b2.is_zero() {
            return Ok(PairTag::K1E);
        }
        return Ok(PairTag::K1L1);
    }
    // absorb the u part into the diagonal
    let t = b2.div(&(&b8 - &b1));
    m.step(Generator::Delta1(Vector3::new(
        t,
        field.zero(),
        field.zero(),
    )));
    Ok(PairTag::K1F)
}

/// Case 2: b = (b1, (b2,0,0); (0,1,0), b8).
fn pair_case2(m: &mut Mover) -> PairTag {
    let field = m.field.clone();
    let b = m.pts[1].clone();
    let (b1, b2, b8) = (b.alpha.clone(), b.u.0[0].clone(), b.beta.clone());
    if b1 != b8 {
        let s = (&b1 - &b8).inv();
        m.step(Generator::Delta2(Vector3::new(
            field.zero(),
            s.clone(),
            b2.neg(),
        )));
        let b7 = m.pts[1].v.0[2].clone();
        if !b7.is_zero() {
            m.step(Generator::Delta2(Vector3::new(
                field.zero(),
                field.zero(),
                &b7 * &s,
            )));
        }
        PairTag::K1F
    } else {
        m.step(Generator::Delta2(Vector3::new(
            field.zero(),
            field.zero(),
            b2.neg(),
        )));
        PairTag::K1M1T
    }
}

/// Case 3: b = (b1, (0,1,0); (0,b6,b7), b8).
fn pair_case3(m: &mut Mover) -> Result<PairTag> {
    let field = m.field.clone();
    let b = m.pts[1].clone();
    let (b1, b6, b7, b8) = (
        b.alpha.clone(),
        b.v.0[1].clone(),
        b.v.0[2].clone(),
        b.beta.clone(),
    );
    if !b6.is_zero() {
        // root of x^2 + (b1 - b8) x - b6
        let lin = &b1 - &b8;
        let con = b6.neg();
        let roots = field.solve_monic_quadratic(&lin, &con)?;
        let v2 = roots.min_root().clone();
        let w = (&v2 * &b7).div(&b6);
        m.step(Generator::Delta2(Vector3::new(field.zero(), v2, w)));
    } else {
        m.step(Generator::Delta1(Vector3::new(
            b7.neg(),
            field.zero(),
            field.zero(),
        )));
        // straighten (c,1,0) back to (0,1,0)
        let c = m.pts[1].u.0[0].clone();
        m.elementary(2, 1, c.neg());
    }
    Ok(PairTag::K1M)
}

/// Case 4: b = (b1, (0,1,0); (b5,b6,0), b8) with b5 != 0; feeds case 1.
fn pair_case4(m: &mut Mover) -> Result<PairTag> {
    let field = m.field.clone();
    let b5 = m.pts[1].v.0[0].clone();
    m.step(Generator::Delta2(Vector3::new(
        field.zero(),
        field.zero(),
        b5.inv(),
    )));
    // clear the v tail against v1 = b5 != 0
    clear_v_tail(m, 1);
    pair_case1(m)
}

enum PairBranch {
    Tag(PairTag),
}

fn canonical_pair_steps(m: &mut Mover) -> Result<PairBranch> {
    match canonical_one_steps(m, 0)? {
        SingleOut::Diagonal => {
            let a = &m.pts[0];
            if a.alpha == a.beta {
                // scalar first component is fixed by all of G2
                match canonical_one_steps(m, 1)? {
                    SingleOut::Diagonal => Ok(PairBranch::Tag(PairTag::DD)),
                    SingleOut::K1 => Ok(PairBranch::Tag(PairTag::EK1)),
                }
            } else {
                prereduce_steps(m, 1);
                let tag = match shape_tag(&m.pts[1]) {
                    TypeTag::D => PairTag::DD,
                    TypeTag::K => PairTag::FK,
                    TypeTag::N => PairTag::FN,
                    TypeTag::P => PairTag::FP,
                    other => unreachable!("prereduction returned {other:?}"),
                };
                Ok(PairBranch::Tag(tag))
            }
        }
        SingleOut::K1 => {
            let case = lemma44_steps(m);
            let tag = match case {
                1 => pair_case1(m)?,
                2 => pair_case2(m),
                3 => pair_case3(m)?,
                4 => pair_case4(m)?,
                _ => unreachable!(),
            };
            Ok(PairBranch::Tag(tag))
        }
    }
}

/// Theorem-level canonical form of a pair: one of the eleven published
/// types, with the realizing group element.
pub fn canonical_pair(a: &Octonion, b: &Octonion) -> Result<Reduction> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(format!(
            "{} vs {}",
            a.field().name(),
            b.field().name()
        )));
    }
    let mut field = a.field().clone();
    let mut cur_a = a.clone();
    let mut cur_b = b.clone();
    for attempt in 0.. {
        let mut m = Mover::new(&field, vec![cur_a.clone(), cur_b.clone()]);
        match canonical_pair_steps(&mut m) {
            Ok(PairBranch::Tag(tag)) => {
                let b_out = m.pts.pop().unwrap();
                let a_out = m.pts.pop().unwrap();
                let params = tag.params(&a_out, &b_out);
                return Ok(Reduction {
                    g: m.g,
                    value: ReductionValue::Pair(a_out, b_out),
                    rtype: ReductionType::Pair { tag, params },
                    field_used: field,
                });
            }
            Err(Error::NoRootInField(msg)) => {
                if !field.is_finite() || attempt >= MAX_EXTENSIONS {
                    return Err(Error::NoRootInField(msg));
                }
                field = field.extend()?;
                cur_a = a.lift_to(&field)?;
                cur_b = b.lift_to(&field)?;
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

/// Corollary-level canonical form of a traceless pair, dispatching on the
/// characteristic: the general pair reduction preserves tracelessness, so the
/// result is re-tagged against the shorter list.
pub fn canonical_traceless_pair(a: &Octonion, b: &Octonion) -> Result<Reduction> {
    if !a.is_traceless() || !b.is_traceless() {
        return Err(Error::NotTraceless);
    }
    let mut r = canonical_pair(a, b)?;
    let char2 = r.field_used.characteristic() == 2;
    let pair_tag = match &r.rtype {
        ReductionType::Pair { tag, .. } => *tag,
        _ => unreachable!(),
    };
    let tag = if char2 {
        match pair_tag {
            PairTag::DD => PairTag::EE,
            PairTag::EK1 => PairTag::EK1,
            PairTag::K1E => PairTag::K1E,
            PairTag::K1L1 => PairTag::K1L1,
            PairTag::K1LT => PairTag::K1L1T,
            PairTag::K1M => PairTag::K1M1,
            PairTag::K1M1T => PairTag::K1M1T,
            other => unreachable!(
                "pair type {other:?} cannot arise from a traceless pair in characteristic 2"
            ),
        }
    } else {
        match pair_tag {
            PairTag::DD => PairTag::D0D0,
            PairTag::FK => PairTag::F0K0,
            PairTag::FN => PairTag::F0N0,
            PairTag::FP => PairTag::F0P0,
            PairTag::EK1 => PairTag::ZeroU1,
            PairTag::K1E => PairTag::U1U1F,
            PairTag::K1F => PairTag::U1F0,
            PairTag::K1L1 => PairTag::U1U1F,
            PairTag::K1LT => PairTag::U1L0T,
            PairTag::K1M => PairTag::U1M0,
            PairTag::K1M1T => PairTag::U1V2,
            other => unreachable!("pair type {other:?} cannot arise from a traceless pair"),
        }
    };
    let (a_out, b_out) = match &r.value {
        ReductionValue::Pair(x, y) => (x, y),
        _ => unreachable!(),
    };
    debug_assert!(tag.matches(a_out, b_out), "{tag:?} on {a_out:?}, {b_out:?}");
    let params = tag.params(a_out, b_out);
    r.rtype = ReductionType::Pair { tag, params };
    Ok(r)
}

/// Stable comparison key for single-octonion canonical forms, lifted into
/// `top` and quotiented by the documented D-swap freedom.
pub fn canonical_single_key(r: &Reduction, top: &Field) -> Result<(u8, Vec<FieldElement>)> {
    let a = match &r.value {
        ReductionValue::Single(a) => a,
        _ => return Err(Error::verification("not a single-octonion reduction")),
    };
    match &r.rtype {
        ReductionType::Single { tag: TypeTag::D, .. } => {
            let mut pair = vec![a.alpha.lift_to(top)?, a.beta.lift_to(top)?];
            pair.sort();
            Ok((0, pair))
        }
        ReductionType::Single { tag: TypeTag::K1, .. } => Ok((1, vec![a.alpha.lift_to(top)?])),
        _ => Err(Error::verification("not a canonical single reduction")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::QuadraticRoots;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    fn oct(
        f: &Field,
        alpha: i64,
        u: [i64; 3],
        v: [i64; 3],
        beta: i64,
    ) -> Octonion {
        Octonion::new(
            f.from_i64(alpha),
            Vector3::new(f.from_i64(u[0]), f.from_i64(u[1]), f.from_i64(u[2])),
            Vector3::new(f.from_i64(v[0]), f.from_i64(v[1]), f.from_i64(v[2])),
            f.from_i64(beta),
        )
    }

    #[test]
    fn classify_examples() {
        let f = gf(3);
        let diag_eq = oct(&f, 1, [0, 0, 0], [0, 0, 0], 1);
        assert_eq!(classify_octonion(&diag_eq), vec![TypeTag::D, TypeTag::E]);
        let diag01 = oct(&f, 0, [0, 0, 0], [0, 0, 0], 1);
        assert_eq!(classify_octonion(&diag01), vec![TypeTag::D, TypeTag::F]);
        let k_like = oct(&f, 1, [1, 0, 0], [0, 0, 0], 1);
        assert_eq!(
            classify_octonion(&k_like),
            vec![TypeTag::K, TypeTag::K1, TypeTag::L, TypeTag::L1]
        );
    }

    #[test]
    fn reduce_vector_examples() {
        let f = gf(5);
        // u = c2: one SL3 move to (1,0,0)
        let a = oct(&f, 0, [0, 1, 0], [0, 0, 0], 0);
        let r = reduce_vector(&a, Side::U).unwrap();
        match &r.value {
            ReductionValue::Single(out) => {
                assert_eq!(out.u, Vector3::basis(&f, 1));
                assert!(out.v.is_zero());
            }
            _ => panic!(),
        }
        assert!(r
            .g
            .transcript()
            .iter()
            .all(|g| matches!(g, Generator::Sl3(_))));
        verify_reduction(&ReductionValue::Single(a), &r).unwrap();

        // already reduced: identity
        let a = oct(&f, 0, [1, 0, 0], [1, 0, 0], 0);
        let r = reduce_vector(&a, Side::U).unwrap();
        assert!(r.g.matrix().is_identity());
        assert_eq!(r.value, ReductionValue::Single(a));

        // v tail (0,1,1) -> (0,1,0)
        let a = oct(&f, 0, [1, 0, 0], [0, 1, 1], 0);
        let r = reduce_vector(&a, Side::U).unwrap();
        match &r.value {
            ReductionValue::Single(out) => {
                assert_eq!(out.u, Vector3::basis(&f, 1));
                assert_eq!(out.v, Vector3::basis(&f, 2));
            }
            _ => panic!(),
        }
        verify_reduction(&ReductionValue::Single(a), &r).unwrap();
    }

    #[test]
    fn reduce_vector_v_side() {
        let f = gf(7);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..200 {
            let a = Octonion::random(&f, &mut rng);
            if a.v.is_zero() {
                assert!(matches!(
                    reduce_vector(&a, Side::V),
                    Err(Error::ZeroVector)
                ));
                continue;
            }
            let r = reduce_vector(&a, Side::V).unwrap();
            let out = match &r.value {
                ReductionValue::Single(out) => out,
                _ => panic!(),
            };
            assert_eq!(out.v, Vector3::basis(&f, 1));
            let u_ok = (out.u.0[1].is_zero() && out.u.0[2].is_zero())
                || out.u == Vector3::basis(&f, 2);
            assert!(u_ok, "unexpected u shape {:?}", out.u);
            verify_reduction(&ReductionValue::Single(a), &r).unwrap();
        }
    }

    #[test]
    fn canonical_one_diagonal_example() {
        let f = gf(3);
        let e1 = Octonion::e1(&f);
        let r = canonical_one(&e1).unwrap();
        match (&r.rtype, &r.value) {
            (ReductionType::Single { tag: TypeTag::D, .. }, ReductionValue::Single(out)) => {
                assert_eq!(out.alpha, f.zero());
                assert_eq!(out.beta, f.one());
            }
            other => panic!("{other:?}"),
        }
        // realized by the diagonal swap
        assert_eq!(r.g.transcript().len(), 1);
        verify_reduction(&ReductionValue::Single(e1), &r).unwrap();
    }

    #[test]
    fn canonical_one_delta1_example() {
        // a = (0, c1; 0, 1) reduces by delta_1(c1) to diag(0, 1)
        let f = gf(5);
        let a = oct(&f, 0, [1, 0, 0], [0, 0, 0], 1);
        let r = canonical_one(&a).unwrap();
        let out = match &r.value {
            ReductionValue::Single(out) => out.clone(),
            _ => panic!(),
        };
        assert!(out.is_diagonal());
        assert_eq!(out.alpha, f.zero());
        assert_eq!(out.beta, f.one());
        assert_eq!(r.g.transcript().len(), 1);
        match &r.g.transcript()[0] {
            Generator::Delta1(u) => assert_eq!(*u, Vector3::basis(&f, 1)),
            other => panic!("{other:?}"),
        }
        verify_reduction(&ReductionValue::Single(a), &r).unwrap();
    }

    #[test]
    fn canonical_one_k1_example() {
        let f = gf(5);
        let a = oct(&f, 2, [1, 0, 0], [0, 0, 0], 2);
        let r = canonical_one(&a).unwrap();
        match &r.rtype {
            ReductionType::Single { tag: TypeTag::K1, params } => {
                assert_eq!(params["alpha1"], f.from_u64(2));
            }
            other => panic!("{other:?}"),
        }
        assert!(r.g.matrix().is_identity());
        assert!(r.g.transcript().is_empty());
    }

    #[test]
    fn canonical_one_needs_extension_over_gf2() {
        // trace 1, norm 1: the diagonal entries live in GF(4)
        let f = gf(2);
        let a = oct(&f, 1, [1, 0, 0], [1, 0, 0], 0);
        let r = canonical_one(&a).unwrap();
        assert_eq!(r.field_used.order(), Some(4));
        verify_reduction(&ReductionValue::Single(a.clone()), &r).unwrap();
        let out = match &r.value {
            ReductionValue::Single(out) => out.clone(),
            _ => panic!(),
        };
        // entries are the two roots of x^2 + x + 1
        let prod = &out.alpha * &out.beta;
        let sum = &out.alpha + &out.beta;
        assert_eq!(prod, r.field_used.one());
        assert_eq!(sum, r.field_used.one());
        assert_ne!(out.alpha, out.beta);
    }

    #[test]
    fn canonical_one_rational_no_root() {
        let q = Field::rational();
        let a = oct(&q, 0, [1, 0, 0], [2, 0, 0], 0);
        assert!(matches!(
            canonical_one(&a),
            Err(Error::NoRootInField(_))
        ));
        // and a solvable rational case goes through
        let b = oct(&q, 0, [1, 0, 0], [6, 0, 0], 5);
        let r = canonical_one(&b).unwrap();
        verify_reduction(&ReductionValue::Single(b), &r).unwrap();
    }

    #[test]
    fn prereduce_examples() {
        let f = gf(5);
        let d = oct(&f, 1, [0, 0, 0], [0, 0, 0], 2);
        let r = prereduce_b(&d);
        assert!(r.g.matrix().is_identity());
        assert!(matches!(
            r.rtype,
            ReductionType::Single { tag: TypeTag::D, .. }
        ));

        let b = oct(&f, 0, [0, 0, 0], [0, 0, 1], 0);
        let r = prereduce_b(&b);
        assert!(matches!(
            r.rtype,
            ReductionType::Single { tag: TypeTag::K, .. }
        ));
        verify_reduction(&ReductionValue::Single(b), &r).unwrap();

        let b = oct(&f, 0, [1, 0, 0], [0, 1, 0], 0);
        let r = prereduce_b(&b);
        assert!(matches!(
            r.rtype,
            ReductionType::Single { tag: TypeTag::P, .. }
        ));
    }

    #[test]
    fn prereduce_hits_all_four_shapes() {
        let f = gf(3);
        let mut seen = std::collections::BTreeSet::new();
        for a in crate::octonion::enumerate_octonions(&f).unwrap() {
            let r = prereduce_b(&a);
            let tag = match r.rtype {
                ReductionType::Single { tag, .. } => tag,
                _ => unreachable!(),
            };
            assert!(matches!(
                tag,
                TypeTag::D | TypeTag::K | TypeTag::N | TypeTag::P
            ));
            seen.insert(tag);
            verify_reduction(&ReductionValue::Single(a), &r).unwrap();
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn reduce_second_examples() {
        let f = gf(5);
        let a = oct(&f, 2, [1, 0, 0], [0, 0, 0], 2);

        let b = Octonion::one(&f);
        let r = reduce_second_given_k1(&a, &b).unwrap();
        assert!(matches!(r.rtype, ReductionType::Lemma44Case { case: 1 }));
        assert!(r.g.matrix().is_identity());

        let b = oct(&f, 0, [0, 0, 0], [0, 1, 0], 0);
        let r = reduce_second_given_k1(&a, &b).unwrap();
        assert!(matches!(r.rtype, ReductionType::Lemma44Case { case: 2 }));

        let b = oct(&f, 0, [0, 1, 0], [0, 0, 0], 0);
        let r = reduce_second_given_k1(&a, &b).unwrap();
        assert!(matches!(r.rtype, ReductionType::Lemma44Case { case: 3 }));
        match &r.value {
            ReductionValue::Pair(_, out) => assert_eq!(out.u, Vector3::basis(&f, 2)),
            _ => panic!(),
        }

        let not_k1 = Octonion::e1(&f);
        assert!(matches!(
            reduce_second_given_k1(&not_k1, &b),
            Err(Error::NotK1)
        ));
    }

    #[test]
    fn reduce_second_stabilizes_first_exhaustively() {
        let f = gf(3);
        let a = oct(&f, 1, [1, 0, 0], [0, 0, 0], 1);
        for b in crate::octonion::enumerate_octonions(&f).unwrap() {
            let r = reduce_second_given_k1(&a, &b).unwrap();
            match &r.value {
                ReductionValue::Pair(a_out, _) => assert_eq!(a_out, &a),
                _ => panic!(),
            }
            assert_eq!(r.g.apply(&a), a);
            verify_reduction(&ReductionValue::Pair(a.clone(), b), &r).unwrap();
        }
    }

    #[test]
    fn canonical_pair_fk_example() {
        let f = gf(2);
        let e1 = Octonion::e1(&f);
        let u1 = Octonion::u_basis(&f, 1);
        let r = canonical_pair(&e1, &u1).unwrap();
        match &r.rtype {
            ReductionType::Pair { tag: PairTag::FK, params } => {
                assert_eq!(params["alpha1"], f.one());
                assert_eq!(params["alpha8"], f.zero());
                assert_eq!(params["beta1"], f.zero());
                assert_eq!(params["beta8"], f.zero());
            }
            other => panic!("{other:?}"),
        }
        assert!(r.g.matrix().is_identity());
        verify_reduction(&ReductionValue::Pair(e1, u1), &r).unwrap();
    }

    #[test]
    fn canonical_pair_ek1_example() {
        let f = gf(5);
        let zero = Octonion::zero(&f);
        let u2 = Octonion::u_basis(&f, 2);
        let r = canonical_pair(&zero, &u2).unwrap();
        match &r.rtype {
            ReductionType::Pair { tag: PairTag::EK1, params } => {
                assert_eq!(params["beta1"], f.zero());
            }
            other => panic!("{other:?}"),
        }
        match &r.value {
            ReductionValue::Pair(a, b) => {
                assert!(a.is_zero());
                assert_eq!(b, &Octonion::u_basis(&f, 1));
            }
            _ => panic!(),
        }
        verify_reduction(&ReductionValue::Pair(zero, u2), &r).unwrap();
    }

    #[test]
    fn canonical_pair_k1f_example() {
        let f = gf(3);
        let a = oct(&f, 2, [1, 0, 0], [0, 0, 0], 2);
        let b = oct(&f, 0, [0, 0, 0], [0, 0, 0], 1);
        let r = canonical_pair(&a, &b).unwrap();
        match &r.rtype {
            ReductionType::Pair { tag: PairTag::K1F, .. } => {}
            other => panic!("{other:?}"),
        }
        assert!(r.g.matrix().is_identity());
    }

    #[test]
    fn canonical_pair_output_tag_is_published_and_sound() {
        let f = gf(3);
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..500 {
            let a = Octonion::random(&f, &mut rng);
            let b = Octonion::random(&f, &mut rng);
            let r = canonical_pair(&a, &b).unwrap();
            let tag = match &r.rtype {
                ReductionType::Pair { tag, .. } => *tag,
                _ => panic!(),
            };
            assert!(PairTag::PAIR_THEOREM.contains(&tag));
            let (x, y) = match &r.value {
                ReductionValue::Pair(x, y) => (x, y),
                _ => panic!(),
            };
            assert!(tag.matches(x, y), "{tag:?} fails on {x:?}, {y:?}");
            assert!(classify_pair(x, y).contains(&tag));
            verify_reduction(&ReductionValue::Pair(a.clone(), b.clone()), &r).unwrap();
            // trace and norm carried over, component by component
            assert_eq!(x.trace(), a.trace().lift_to(&r.field_used).unwrap());
            assert_eq!(x.norm(), a.norm().lift_to(&r.field_used).unwrap());
            assert_eq!(y.trace(), b.trace().lift_to(&r.field_used).unwrap());
            assert_eq!(y.norm(), b.norm().lift_to(&r.field_used).unwrap());
        }
    }

    #[test]
    fn canonical_traceless_examples() {
        // (0, u1) away from characteristic 2
        let f = gf(3);
        let zero = Octonion::zero(&f);
        let u1 = Octonion::u_basis(&f, 1);
        let r = canonical_traceless_pair(&zero, &u1).unwrap();
        assert!(matches!(
            r.rtype,
            ReductionType::Pair { tag: PairTag::ZeroU1, .. }
        ));

        // (u1, v2) over GF(5)
        let f5 = gf(5);
        let r = canonical_traceless_pair(
            &Octonion::u_basis(&f5, 1),
            &Octonion::v_basis(&f5, 2),
        )
        .unwrap();
        assert!(matches!(
            r.rtype,
            ReductionType::Pair { tag: PairTag::U1V2, .. }
        ));

        // (1_O + u1, 1_O) over GF(2): traceless since char 2
        let f2 = gf(2);
        let a = oct(&f2, 1, [1, 0, 0], [0, 0, 0], 1);
        let one = Octonion::one(&f2);
        let r = canonical_traceless_pair(&a, &one).unwrap();
        match &r.rtype {
            ReductionType::Pair { tag: PairTag::K1E, params } => {
                assert_eq!(params["alpha1"], f2.one());
                assert_eq!(params["beta1"], f2.one());
            }
            other => panic!("{other:?}"),
        }

        // non-traceless input is rejected
        assert!(matches!(
            canonical_traceless_pair(&Octonion::e1(&f5), &Octonion::zero(&f5)),
            Err(Error::NotTraceless)
        ));
    }

    #[test]
    fn uniqueness_matches_invariants_over_gf2() {
        use std::collections::HashMap;
        let f = gf(2);
        let top = f.extend().unwrap();
        let mut by_inv: HashMap<(u64, u64, bool), (u8, Vec<FieldElement>)> = HashMap::new();
        for a in crate::octonion::enumerate_octonions(&f).unwrap() {
            let r = canonical_one(&a).unwrap();
            let key = canonical_single_key(&r, &top).unwrap();
            let inv = (
                a.trace().index().unwrap(),
                a.norm().index().unwrap(),
                a.is_scalar(),
            );
            match by_inv.get(&inv) {
                None => {
                    by_inv.insert(inv, key);
                }
                Some(prev) => assert_eq!(prev, &key, "same invariants, different canonical"),
            }
        }
        // distinct invariant triples yield distinct keys
        let keys: Vec<_> = by_inv.values().collect();
        for (i, k) in keys.iter().enumerate() {
            for k2 in &keys[i + 1..] {
                assert_ne!(k, k2);
            }
        }
    }

    #[test]
    fn reduction_json_round_trip() {
        let f = gf(3);
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..50 {
            let a = Octonion::random(&f, &mut rng);
            let b = Octonion::random(&f, &mut rng);
            let r = canonical_pair(&a, &b).unwrap();
            let back = Reduction::from_json(&r.to_json()).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn corrupted_reduction_fails_verification() {
        let f = gf(3);
        let a = oct(&f, 0, [1, 2, 0], [0, 1, 1], 2);
        let r = canonical_one(&a).unwrap();
        let mut json = r.to_json();
        json["g"]["matrix"][2][3] = serde_json::json!(1);
        let bad = Reduction::from_json(&json).unwrap();
        assert!(verify_reduction(&ReductionValue::Single(a), &bad).is_err());
    }

    #[test]
    fn quadratic_root_choice_is_order_minimal() {
        // the canonical_one quadratic for (0,(1,0,0);(a5,0,0),0) over GF(7)
        let f = gf(7);
        let a = oct(&f, 0, [1, 0, 0], [4, 0, 0], 0);
        let roots = f
            .solve_monic_quadratic(&f.zero(), &f.from_i64(-4))
            .unwrap();
        let min = roots.min_root().clone();
        if let QuadraticRoots::Distinct(lo, hi) = &roots {
            assert!(lo < hi);
        }
        // the innermost (first applied) move is the delta_2 kill step
        let r = canonical_one(&a).unwrap();
        match r.g.transcript().last().unwrap() {
            Generator::Delta2(v) => assert_eq!(v.0[0], min),
            other => panic!("{other:?}"),
        }
    }
}
