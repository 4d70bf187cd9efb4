//! The structural identities of the split octonions, as an executable suite:
//! trace/norm multiplicativity, the quadratic equation and its linearization,
//! alternativity and its linearization, trace associativity, and the relation
//! between the norm and the trace of the square. The suite also exhibits a
//! non-associative triple, since O is alternative but not associative.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value as Json};

use crate::error::{Error, Result};
use crate::field::Field;
use crate::octonion::{enumerate_octonions, Octonion};

/// tr(ab) = tr(ba) and n(ab) = n(a) n(b).
pub fn eq1_holds(a: &Octonion, b: &Octonion) -> bool {
    let ab = a * b;
    let ba = b * a;
    ab.trace() == ba.trace() && ab.norm() == &a.norm() * &b.norm()
}

/// a^2 - tr(a) a + n(a) 1_O = 0.
pub fn eq2_holds(a: &Octonion) -> bool {
    let lhs = &(a * a) - &a.scale(&a.trace());
    let lhs = &lhs + &Octonion::one(a.field()).scale(&a.norm());
    lhs.is_zero()
}

/// ab + ba - tr(a) b - tr(b) a - (tr(ab) - tr(a)tr(b)) 1_O = 0.
pub fn eq3_holds(a: &Octonion, b: &Octonion) -> bool {
    let ab = a * b;
    let scalar = &ab.trace() - &(&a.trace() * &b.trace());
    let lhs = &(&ab + &(b * a)) - &b.scale(&a.trace());
    let lhs = &lhs - &a.scale(&b.trace());
    let lhs = &lhs - &Octonion::one(a.field()).scale(&scalar);
    lhs.is_zero()
}

/// Alternativity: a(ab) = (aa)b and (ba)a = b(aa).
pub fn eq4_holds(a: &Octonion, b: &Octonion) -> bool {
    let left = a * &(a * b) == &(a * a) * b;
    let right = &(b * a) * a == b * &(a * a);
    left && right
}

/// Linearized alternativity in (a, a'; b).
pub fn eq5_holds(a: &Octonion, a2: &Octonion, b: &Octonion) -> bool {
    let sym = &(a * a2) + &(a2 * a);
    let left = &(a * &(a2 * b)) + &(a2 * &(a * b)) == &sym * b;
    let right = &(&(b * a) * a2) + &(&(b * a2) * a) == b * &sym;
    left && right
}

/// Trace associativity: tr((ab)c) = tr(a(bc)).
pub fn eq6_holds(a: &Octonion, b: &Octonion, c: &Octonion) -> bool {
    (&(a * b) * c).trace() == (a * &(b * c)).trace()
}

/// 2 n(a) = -tr(a^2) + tr(a)^2 (both sides vanish in characteristic 2).
pub fn eqn_holds(a: &Octonion) -> bool {
    let n = a.norm();
    let lhs = &n + &n;
    let tr = a.trace();
    lhs == &(&tr * &tr) - &(a * a).trace()
}

/// First basis triple with (ab)c != a(bc), if any.
pub fn find_nonassociative_triple(field: &Field) -> Option<(Octonion, Octonion, Octonion)> {
    let basis = Octonion::basis(field);
    for a in &basis {
        for b in &basis {
            for c in &basis {
                if &(a * b) * c != a * &(b * c) {
                    return Some((a.clone(), b.clone(), c.clone()));
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
}

#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub field: Field,
    pub checks: Vec<IdentityCheck>,
    /// A witness that O is not associative, when one exists over the field.
    pub nonassociative_witness: Option<(Octonion, Octonion, Octonion)>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0) && self.nonassociative_witness.is_some()
    }

    pub fn to_json(&self) -> Json {
        json!({
            "field": self.field.descriptor(),
            "checks": self
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "cases": c.cases, "failures": c.failures}))
                .collect::<Vec<_>>(),
            "nonassociative_witness": self
                .nonassociative_witness
                .as_ref()
                .map(|(a, b, c)| json!([a.to_json(), b.to_json(), c.to_json()])),
            "passed": self.passed(),
        })
    }
}

pub enum SuiteMode {
    /// All pairs of octonions for the one- and two-variable identities plus
    /// `triples` random triples for the three-variable ones. Only feasible
    /// for GF(2).
    Exhaustive { triples: u64, seed: u64 },
    /// Random triples for everything.
    Sampled { triples: u64, seed: u64 },
}

/// Runs the identity suite over a field.
pub fn run_suite(field: &Field, mode: &SuiteMode) -> Result<IdentityReport> {
    let mut checks = vec![
        IdentityCheck { name: "eq1_trace_norm_mult", cases: 0, failures: 0 },
        IdentityCheck { name: "eq2_quadratic", cases: 0, failures: 0 },
        IdentityCheck { name: "eq3_linearized_quadratic", cases: 0, failures: 0 },
        IdentityCheck { name: "eq4_alternativity", cases: 0, failures: 0 },
        IdentityCheck { name: "eq5_linearized_alternativity", cases: 0, failures: 0 },
        IdentityCheck { name: "eq6_trace_associative", cases: 0, failures: 0 },
        IdentityCheck { name: "eqn_norm_vs_trace_square", cases: 0, failures: 0 },
    ];

    let record = |checks: &mut Vec<IdentityCheck>, slot: usize, ok: bool| {
        checks[slot].cases += 1;
        if !ok {
            checks[slot].failures += 1;
        }
    };

    let pair_case = |checks: &mut Vec<IdentityCheck>, a: &Octonion, b: &Octonion| {
        record(checks, 0, eq1_holds(a, b));
        record(checks, 1, eq2_holds(a));
        record(checks, 2, eq3_holds(a, b));
        record(checks, 3, eq4_holds(a, b));
        record(checks, 6, eqn_holds(a));
    };

    match mode {
        SuiteMode::Exhaustive { triples, seed } => {
            let q = field.order().ok_or(Error::InfiniteField)?;
            let points = q.checked_pow(8).filter(|n| *n <= 1 << 10).ok_or_else(|| {
                Error::FieldTooLarge(format!(
                    "exhaustive identity suite over {}",
                    field.name()
                ))
            })?;
            let _ = points;
            let all: Vec<Octonion> = enumerate_octonions(field)?.collect();
            for a in &all {
                for b in &all {
                    pair_case(&mut checks, a, b);
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..*triples {
                let a = Octonion::random(field, &mut rng);
                let b = Octonion::random(field, &mut rng);
                let c = Octonion::random(field, &mut rng);
                record(&mut checks, 4, eq5_holds(&a, &b, &c));
                record(&mut checks, 5, eq6_holds(&a, &b, &c));
            }
        }
        SuiteMode::Sampled { triples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for _ in 0..*triples {
                let a = Octonion::random(field, &mut rng);
                let b = Octonion::random(field, &mut rng);
                let c = Octonion::random(field, &mut rng);
                pair_case(&mut checks, &a, &b);
                record(&mut checks, 4, eq5_holds(&a, &b, &c));
                record(&mut checks, 5, eq6_holds(&a, &b, &c));
            }
        }
    }

    Ok(IdentityReport {
        field: field.clone(),
        checks,
        nonassociative_witness: find_nonassociative_triple(field),
    })
}
