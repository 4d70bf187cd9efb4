//! Evaluable G2-invariants: octonion-valued words in generic octonions
//! (explicitly parenthesized, since products do not associate), the scalar
//! invariants tr and n of a word, and the indicator invariants zeta and
//! scal_i. Includes the separation test for single octonions: tr, n and
//! scal_1 together decide orbit equivalence.

use std::fmt;

use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};
use crate::octonion::Octonion;

/// Octonion-valued expression in the generic octonions Z_1..Z_n. Scalar
/// invariant coefficients enter as `Coeff` leaves, standing for f * 1_O.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WordExpr {
    /// The empty word, 1_O.
    Unit,
    /// Z_i, 1-based.
    Gen(usize),
    Product(Box<WordExpr>, Box<WordExpr>),
    Coeff(Box<AbstractInvariant>),
}

impl WordExpr {
    pub fn gen(i: usize) -> WordExpr {
        WordExpr::Gen(i)
    }

    pub fn product(a: WordExpr, b: WordExpr) -> WordExpr {
        WordExpr::Product(Box::new(a), Box::new(b))
    }

    /// Largest generic-octonion index used.
    pub fn arity(&self) -> usize {
        match self {
            WordExpr::Unit => 0,
            WordExpr::Gen(i) => *i,
            WordExpr::Product(a, b) => a.arity().max(b.arity()),
            WordExpr::Coeff(f) => f.arity(),
        }
    }
}

impl fmt::Display for WordExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordExpr::Unit => write!(f, "1"),
            WordExpr::Gen(i) => write!(f, "Z{i}"),
            WordExpr::Product(a, b) => write!(f, "({a}*{b})"),
            WordExpr::Coeff(inv) => write!(f, "{inv}"),
        }
    }
}

/// A G2-invariant function of a tuple of octonions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AbstractInvariant {
    TraceOf(WordExpr),
    NormOf(WordExpr),
    /// 1 when the word evaluates to a nonzero octonion.
    Zeta(WordExpr),
    /// 1 when the i-th slot of the point is a scalar multiple of 1_O.
    Scal(usize),
}

impl AbstractInvariant {
    pub fn arity(&self) -> usize {
        match self {
            AbstractInvariant::TraceOf(w)
            | AbstractInvariant::NormOf(w)
            | AbstractInvariant::Zeta(w) => w.arity(),
            AbstractInvariant::Scal(i) => *i,
        }
    }
}

impl fmt::Display for AbstractInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbstractInvariant::TraceOf(w) => write!(f, "tr({w})"),
            AbstractInvariant::NormOf(w) => write!(f, "n({w})"),
            AbstractInvariant::Zeta(w) => write!(f, "zeta({w})"),
            AbstractInvariant::Scal(i) => write!(f, "scal({i})"),
        }
    }
}

/// Scalar or indicator value of an invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantValue {
    Scalar(FieldElement),
    Indicator(bool),
}

impl InvariantValue {
    pub fn to_json(&self) -> Json {
        match self {
            InvariantValue::Scalar(x) => json!({"kind": "scalar", "value": x.to_json()}),
            InvariantValue::Indicator(b) => {
                json!({"kind": "indicator", "value": if *b { 1 } else { 0 }})
            }
        }
    }
}

fn check_point(field: &Field, point: &[Octonion]) -> Result<()> {
    for a in point {
        if a.field() != field {
            return Err(Error::FieldMismatch(format!(
                "point entry over {} in a {} evaluation",
                a.field().name(),
                field.name()
            )));
        }
    }
    Ok(())
}

/// Recursive evaluation of a word at a point, respecting the written
/// parenthesization.
pub fn eval_word(field: &Field, w: &WordExpr, point: &[Octonion]) -> Result<Octonion> {
    check_point(field, point)?;
    eval_word_inner(field, w, point)
}

fn eval_word_inner(field: &Field, w: &WordExpr, point: &[Octonion]) -> Result<Octonion> {
    match w {
        WordExpr::Unit => Ok(Octonion::one(field)),
        WordExpr::Gen(i) => {
            if *i == 0 || *i > point.len() {
                return Err(Error::IndexOutOfRange(*i, point.len()));
            }
            Ok(point[*i - 1].clone())
        }
        WordExpr::Product(a, b) => {
            let x = eval_word_inner(field, a, point)?;
            let y = eval_word_inner(field, b, point)?;
            Ok(&x * &y)
        }
        WordExpr::Coeff(f) => {
            let scalar = match eval_invariant_inner(field, f, point)? {
                InvariantValue::Scalar(x) => x,
                InvariantValue::Indicator(b) => {
                    if b {
                        field.one()
                    } else {
                        field.zero()
                    }
                }
            };
            Ok(Octonion::one(field).scale(&scalar))
        }
    }
}

pub fn eval_invariant(
    field: &Field,
    f: &AbstractInvariant,
    point: &[Octonion],
) -> Result<InvariantValue> {
    check_point(field, point)?;
    eval_invariant_inner(field, f, point)
}

fn eval_invariant_inner(
    field: &Field,
    f: &AbstractInvariant,
    point: &[Octonion],
) -> Result<InvariantValue> {
    match f {
        AbstractInvariant::TraceOf(w) => Ok(InvariantValue::Scalar(
            eval_word_inner(field, w, point)?.trace(),
        )),
        AbstractInvariant::NormOf(w) => Ok(InvariantValue::Scalar(
            eval_word_inner(field, w, point)?.norm(),
        )),
        AbstractInvariant::Zeta(w) => Ok(InvariantValue::Indicator(
            !eval_word_inner(field, w, point)?.is_zero(),
        )),
        AbstractInvariant::Scal(i) => {
            if *i == 0 || *i > point.len() {
                return Err(Error::IndexOutOfRange(*i, point.len()));
            }
            Ok(InvariantValue::Indicator(point[*i - 1].is_scalar()))
        }
    }
}

/// True iff tr, n and scal_1 all agree on a and b; by the separation
/// corollary this decides orbit equivalence over the closure.
pub fn separates_single(a: &Octonion, b: &Octonion) -> Result<bool> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(format!(
            "{} vs {}",
            a.field().name(),
            b.field().name()
        )));
    }
    Ok(a.trace() == b.trace() && a.norm() == b.norm() && a.is_scalar() == b.is_scalar())
}

/// Parsed CLI expression: either a word (octonion-valued) or an invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedExpr {
    Word(WordExpr),
    Invariant(AbstractInvariant),
}

impl ParsedExpr {
    pub fn eval(&self, field: &Field, point: &[Octonion]) -> Result<Json> {
        match self {
            ParsedExpr::Word(w) => Ok(json!({
                "kind": "octonion",
                "value": eval_word(field, w, point)?.to_json(),
            })),
            ParsedExpr::Invariant(f) => Ok(eval_invariant(field, f, point)?.to_json()),
        }
    }
}

/// Grammar:
///   expr      := invariant | word
///   invariant := "tr(" word ")" | "n(" word ")" | "zeta(" word ")" | "scal(" int ")"
///   word      := "1" | "Z" int | "(" word "*" word ")" | invariant
/// Products must be fully parenthesized.
pub fn parse_expr(input: &str) -> Result<ParsedExpr> {
    let mut p = Parser {
        bytes: input.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let expr = p.parse_expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(Error::parse(format!(
            "trailing input at byte {} of {input:?}",
            p.pos
        )));
    }
    Ok(expr)
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::parse(format!(
                "expected {:?} at byte {}",
                c as char, self.pos
            )))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.bytes[self.pos..].starts_with(kw.as_bytes()) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn parse_usize(&mut self) -> Result<usize> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::parse(format!("expected a number at byte {start}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::parse("number out of range".into()))
    }

    fn parse_expr(&mut self) -> Result<ParsedExpr> {
        self.skip_ws();
        if let Some(inv) = self.try_parse_invariant()? {
            return Ok(ParsedExpr::Invariant(inv));
        }
        Ok(ParsedExpr::Word(self.parse_word()?))
    }

    fn try_parse_invariant(&mut self) -> Result<Option<AbstractInvariant>> {
        let snapshot = self.pos;
        for (kw, kind) in [
            ("tr", 0u8),
            ("zeta", 2),
            ("scal", 3),
            ("n", 1),
        ] {
            if self.eat_keyword(kw) {
                if self.peek() != Some(b'(') {
                    self.pos = snapshot;
                    return Ok(None);
                }
                self.eat(b'(')?;
                self.skip_ws();
                let inv = if kind == 3 {
                    AbstractInvariant::Scal(self.parse_usize()?)
                } else {
                    let w = self.parse_word()?;
                    match kind {
                        0 => AbstractInvariant::TraceOf(w),
                        1 => AbstractInvariant::NormOf(w),
                        _ => AbstractInvariant::Zeta(w),
                    }
                };
                self.skip_ws();
                self.eat(b')')?;
                return Ok(Some(inv));
            }
        }
        Ok(None)
    }

    fn parse_word(&mut self) -> Result<WordExpr> {
        self.skip_ws();
        if let Some(inv) = self.try_parse_invariant()? {
            return Ok(WordExpr::Coeff(Box::new(inv)));
        }
        match self.peek() {
            Some(b'1') => {
                self.pos += 1;
                Ok(WordExpr::Unit)
            }
            Some(b'Z') => {
                self.pos += 1;
                Ok(WordExpr::Gen(self.parse_usize()?))
            }
            Some(b'(') => {
                self.eat(b'(')?;
                let a = self.parse_word()?;
                self.skip_ws();
                self.eat(b'*')?;
                let b = self.parse_word()?;
                self.skip_ws();
                self.eat(b')')?;
                Ok(WordExpr::product(a, b))
            }
            other => Err(Error::parse(format!(
                "unexpected {:?} at byte {}",
                other.map(|c| c as char),
                self.pos
            ))),
        }
    }
}

/// All fully parenthesized words of length <= 3 in the letters Z_1..Z_n.
pub fn words_up_to_len3(n: usize) -> Vec<WordExpr> {
    let letters: Vec<WordExpr> = (1..=n).map(WordExpr::gen).collect();
    let mut out = letters.clone();
    for a in &letters {
        for b in &letters {
            out.push(WordExpr::product(a.clone(), b.clone()));
        }
    }
    for a in &letters {
        for b in &letters {
            for c in &letters {
                out.push(WordExpr::product(
                    WordExpr::product(a.clone(), b.clone()),
                    c.clone(),
                ));
                out.push(WordExpr::product(
                    a.clone(),
                    WordExpr::product(b.clone(), c.clone()),
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::G2Element;
    use crate::octonion::Vector3;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> Field {
        Field::prime(p).unwrap()
    }

    #[test]
    fn eval_word_examples() {
        let f = gf(5);
        let u1 = Octonion::u_basis(&f, 1);
        let v1 = Octonion::v_basis(&f, 1);
        assert_eq!(
            eval_word(&f, &WordExpr::gen(1), &[u1.clone()]).unwrap(),
            u1
        );
        let z1z2 = WordExpr::product(WordExpr::gen(1), WordExpr::gen(2));
        assert_eq!(
            eval_word(&f, &z1z2, &[u1.clone(), v1]).unwrap(),
            Octonion::e1(&f)
        );
        assert!(matches!(
            eval_word(&f, &WordExpr::gen(3), &[u1]),
            Err(Error::IndexOutOfRange(3, 1))
        ));
    }

    #[test]
    fn cube_parenthesizations_agree_over_gf2() {
        // (Z1 Z1) Z1 = Z1 (Z1 Z1), a consequence of alternativity
        let f = gf(2);
        let left = WordExpr::product(
            WordExpr::product(WordExpr::gen(1), WordExpr::gen(1)),
            WordExpr::gen(1),
        );
        let right = WordExpr::product(
            WordExpr::gen(1),
            WordExpr::product(WordExpr::gen(1), WordExpr::gen(1)),
        );
        for a in crate::octonion::enumerate_octonions(&f).unwrap() {
            let pt = [a];
            assert_eq!(
                eval_word(&f, &left, &pt).unwrap(),
                eval_word(&f, &right, &pt).unwrap()
            );
        }
    }

    #[test]
    fn eval_invariant_examples() {
        let q = Field::rational();
        let point = [
            Octonion::one(&q).scale(&q.from_u64(3)),
            Octonion::u_basis(&q, 1),
        ];
        assert_eq!(
            eval_invariant(&q, &AbstractInvariant::Scal(1), &point).unwrap(),
            InvariantValue::Indicator(true)
        );
        assert_eq!(
            eval_invariant(&q, &AbstractInvariant::Scal(2), &point).unwrap(),
            InvariantValue::Indicator(false)
        );
        let f = gf(3);
        assert_eq!(
            eval_invariant(
                &f,
                &AbstractInvariant::Zeta(WordExpr::gen(1)),
                &[Octonion::zero(&f)]
            )
            .unwrap(),
            InvariantValue::Indicator(false)
        );
    }

    #[test]
    fn norm_of_product_is_product_of_norms() {
        let f = gf(5);
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let z1z2 = AbstractInvariant::NormOf(WordExpr::product(
            WordExpr::gen(1),
            WordExpr::gen(2),
        ));
        for _ in 0..100 {
            let a = Octonion::random(&f, &mut rng);
            let b = Octonion::random(&f, &mut rng);
            let point = [a.clone(), b.clone()];
            let lhs = match eval_invariant(&f, &z1z2, &point).unwrap() {
                InvariantValue::Scalar(x) => x,
                _ => panic!(),
            };
            assert_eq!(lhs, &a.norm() * &b.norm());
        }
    }

    #[test]
    fn separates_single_examples() {
        let f = gf(2);
        let e1 = Octonion::e1(&f);
        let e2 = Octonion::e2(&f);
        assert!(separates_single(&e1, &e2).unwrap());
        let one = Octonion::one(&f);
        let one_u1 = &one + &Octonion::u_basis(&f, 1);
        assert!(!separates_single(&one, &one_u1).unwrap());
        assert!(separates_single(&e1, &e1).unwrap());
    }

    #[test]
    fn invariance_under_random_group_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        for field in [gf(2), gf(3)] {
            let words = words_up_to_len3(2);
            let mut invs: Vec<AbstractInvariant> = Vec::new();
            for w in &words {
                invs.push(AbstractInvariant::TraceOf(w.clone()));
                invs.push(AbstractInvariant::NormOf(w.clone()));
                invs.push(AbstractInvariant::Zeta(w.clone()));
            }
            invs.push(AbstractInvariant::Scal(1));
            invs.push(AbstractInvariant::Scal(2));
            for _ in 0..30 {
                let g = crate::g2::random_element(&field, &mut rng, 4);
                let a = Octonion::random(&field, &mut rng);
                let b = Octonion::random(&field, &mut rng);
                let moved = [g.apply(&a), g.apply(&b)];
                let point = [a, b];
                for f in &invs {
                    assert_eq!(
                        eval_invariant(&field, f, &point).unwrap(),
                        eval_invariant(&field, f, &moved).unwrap(),
                        "{f} not invariant"
                    );
                }
            }
        }
    }

    #[test]
    fn words_respect_group_translation() {
        let f = gf(3);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let words = words_up_to_len3(2);
        for _ in 0..20 {
            let g = crate::g2::random_element(&f, &mut rng, 3);
            let a = Octonion::random(&f, &mut rng);
            let b = Octonion::random(&f, &mut rng);
            let moved = [g.apply(&a), g.apply(&b)];
            let point = [a, b];
            for w in &words {
                assert_eq!(
                    g.apply(&eval_word(&f, w, &point).unwrap()),
                    eval_word(&f, w, &moved).unwrap()
                );
            }
        }
    }

    #[test]
    fn parser_round_trips() {
        for text in [
            "Z1",
            "1",
            "(Z1*Z2)",
            "((Z1*Z2)*Z1)",
            "tr(Z1)",
            "n((Z1*Z2))",
            "zeta((Z1*(Z2*Z3)))",
            "scal(2)",
            "(tr(Z1)*Z2)",
        ] {
            let parsed = parse_expr(text).unwrap();
            let printed = match &parsed {
                ParsedExpr::Word(w) => w.to_string(),
                ParsedExpr::Invariant(f) => f.to_string(),
            };
            assert_eq!(parse_expr(&printed).unwrap(), parsed);
        }
        for bad in ["Z", "Z1*Z2", "(Z1*Z2", "tr(", "foo", "scal(x)", "(Z1 Z2)"] {
            assert!(parse_expr(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn coefficient_leaves_evaluate() {
        let f = gf(5);
        let expr = parse_expr("(tr(Z1)*Z2)").unwrap();
        let a = Octonion::e1(&f); // trace 1
        let b = Octonion::u_basis(&f, 2);
        let out = expr.eval(&f, &[a, b.clone()]).unwrap();
        assert_eq!(out["kind"], "octonion");
        let val = Octonion::from_json(&f, &out["value"]).unwrap();
        assert_eq!(val, b);
    }

    #[test]
    fn delta1_fixes_no_nonscalar_invariants_sanity() {
        // zeta of Z1 distinguishes zero from nonzero but is constant on orbits
        let f = gf(3);
        let g = G2Element::from_generator(crate::g2::Generator::Delta1(Vector3::basis(&f, 1)))
            .unwrap();
        let a = Octonion::v_basis(&f, 1);
        let ga = g.apply(&a);
        assert!(!ga.is_zero());
    }
}
