//! Reconstruction of the worked examples with embedded expected values.
//!
//! Examples with a stated modulus are rebuilt in that field with g its root.
//! The others are only determined up to the choice of primitive element, so
//! every primitive element of the canonical field is tried as g.

use std::time::Instant;

use crate::constructions::{beta_tilde, build_family, ConstructionParams, FamilyId};
use crate::field::{FieldCtx, FieldElement, FieldError, QuadExtension};
use crate::poly::{reduce_exponent, SparsePolynomial};
use crate::verification::{is_permutation_exhaustive, verify_both, DEFAULT_CAP};

/// An element written in terms of the example's g.
#[derive(Debug, Clone, Copy)]
pub enum Ex {
    Int(i64),
    /// Σ g^k over the listed k.
    Pows(&'static [u64]),
    /// Σ c_i g^i, least-degree-first.
    GenPoly(&'static [i64]),
}

impl Ex {
    pub fn eval(self, ctx: &FieldCtx, g: FieldElement) -> FieldElement {
        match self {
            Ex::Int(v) => ctx.from_int(v),
            Ex::Pows(ks) => ks.iter().fold(ctx.zero(), |acc, &k| ctx.add(acc, ctx.pow(g, k))),
            Ex::GenPoly(cs) => cs.iter().rev().fold(ctx.zero(), |acc, &c| ctx.add(ctx.mul(acc, g), ctx.from_int(c))),
        }
    }
}

/// Exponent c2 q^2 + c1 q + c0.
pub type QExp = [i64; 3];

#[derive(Clone, Copy)]
pub struct WorkedExample {
    pub name: &'static str,
    pub family: FamilyId,
    pub p: u32,
    pub m: u32,
    /// Degree-2m modulus, least-degree-first.
    pub modulus: Option<&'static [u32]>,
    pub beta: Ex,
    /// None when the example leaves β̃ to the family relation.
    pub beta_t: Option<Ex>,
    pub delta: Ex,
    pub delta_t: Ex,
    pub aux: Option<Ex>,
    pub expected: &'static [(QExp, Ex)],
    /// A corrected reading checked separately; it never changes the verdict.
    pub erratum: Option<Erratum>,
}

#[derive(Debug, Clone, Copy)]
pub struct Erratum {
    pub modulus: &'static [u32],
    pub delta_t: Ex,
    pub note: &'static str,
}

macro_rules! g {
    ($k:expr) => {
        Ex::Pows(&[$k])
    };
}

const Q125: &[u32] = &[2, 0, 1, 1, 1, 0, 1];
const Q8: &[u32] = &[1, 1, 0, 1, 1, 0, 1];
const Q81: &[u32] = &[2, 2, 2, 0, 1, 2, 0, 0, 1];
const Q9: &[u32] = &[2, 0, 0, 2, 1];
const Q256: &[u32] = &[1, 0, 1, 1, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1];
const Q64: &[u32] = &[1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1];

pub const EXAMPLES: &[WorkedExample] = &[
    WorkedExample {
        name: "Q1 quadrinomial, q = 5",
        family: FamilyId::Q1,
        p: 5,
        m: 1,
        modulus: None,
        beta: Ex::Int(-1),
        beta_t: Some(Ex::Int(1)),
        delta: g!(1),
        delta_t: g!(1),
        aux: None,
        expected: &[
            ([0, 0, 15], Ex::GenPoly(&[3, 3])),
            ([0, 0, 11], Ex::GenPoly(&[0, 3])),
            ([0, 0, 7], Ex::GenPoly(&[1, 1])),
            ([0, 0, 3], Ex::Int(2)),
        ],
        erratum: None,
    },
    WorkedExample {
        name: "Q1 quadrinomial, q = 5^3",
        family: FamilyId::Q1,
        p: 5,
        m: 3,
        modulus: Some(Q125),
        beta: Ex::Int(-1),
        beta_t: Some(Ex::Int(1)),
        delta: g!(14078),
        delta_t: g!(6470),
        aux: None,
        expected: &[([0, 3, 0], g!(12017)), ([0, 2, 1], g!(9477)), ([0, 1, 2], g!(10055)), ([0, 0, 3], g!(7976))],
        erratum: Some(Erratum {
            modulus: &[2, 0, 1, 4, 1, 0, 1],
            delta_t: g!(6220),
            note: "g^6 + g^4 - g^3 + g^2 + 2 = 0 and delta~ = g^6220",
        }),
    },
    WorkedExample {
        name: "Q2a quadrinomial, q = 2^3",
        family: FamilyId::Q2a,
        p: 2,
        m: 3,
        modulus: Some(Q8),
        beta: Ex::Int(1),
        beta_t: Some(Ex::Int(1)),
        delta: g!(1),
        delta_t: g!(1),
        aux: None,
        expected: &[
            ([0, 0, 57], Ex::GenPoly(&[1, 0, 0, 1, 0, 1])),
            ([0, 0, 15], Ex::GenPoly(&[0, 1, 0, 1])),
            ([0, 0, 8], Ex::GenPoly(&[1, 1, 0, 0, 1, 1])),
            ([0, 0, 1], Ex::GenPoly(&[0, 0, 1, 0, 0, 1])),
        ],
        erratum: None,
    },
    WorkedExample {
        name: "Q3 quadrinomial, q = 3",
        family: FamilyId::Q3,
        p: 3,
        m: 1,
        modulus: None,
        beta: Ex::Int(2),
        beta_t: Some(Ex::Int(1)),
        delta: g!(1),
        delta_t: g!(1),
        aux: Some(Ex::Int(2)),
        expected: &[
            ([0, 0, 7], Ex::GenPoly(&[1, 1])),
            ([0, 0, 5], Ex::GenPoly(&[2, 2])),
            ([0, 0, 3], Ex::GenPoly(&[1, 2])),
            ([0, 0, 1], Ex::GenPoly(&[1, 2])),
        ],
        erratum: None,
    },
    WorkedExample {
        name: "Q3 quadrinomial, q = 3^4",
        family: FamilyId::Q3,
        p: 3,
        m: 4,
        modulus: Some(Q81),
        beta: Ex::Int(-1),
        beta_t: Some(Ex::Int(1)),
        delta: g!(4898),
        delta_t: g!(332),
        aux: Some(g!(82)),
        expected: &[([0, 3, 0], g!(1523)), ([0, 2, 1], g!(1681)), ([0, 1, 2], g!(4961)), ([0, 0, 3], g!(3736))],
        erratum: None,
    },
    WorkedExample {
        name: "Q4c quadrinomial, q = 3^2",
        family: FamilyId::Q4c,
        p: 3,
        m: 2,
        modulus: Some(Q9),
        beta: Ex::Int(1),
        beta_t: Some(Ex::Int(-1)),
        delta: g!(1),
        delta_t: g!(1),
        aux: Some(g!(10)),
        expected: &[
            ([0, 0, 27], Ex::GenPoly(&[1, 1])),
            ([0, 0, 19], Ex::GenPoly(&[1, 1, 0, 1])),
            ([0, 0, 11], Ex::GenPoly(&[1, 1, 0, 1])),
            ([0, 0, 3], Ex::GenPoly(&[2, 0, 1, 1])),
        ],
        erratum: None,
    },
    WorkedExample {
        name: "P1 pentanomial, q = 4",
        family: FamilyId::P1,
        p: 2,
        m: 2,
        modulus: None,
        beta: Ex::Int(1),
        beta_t: None,
        delta: g!(3),
        delta_t: g!(3),
        aux: Some(Ex::Int(1)),
        expected: &[
            ([0, 0, 13], Ex::GenPoly(&[1, 1, 1])),
            ([0, 0, 10], Ex::Int(1)),
            ([0, 0, 7], Ex::GenPoly(&[1, 1, 1])),
            ([0, 0, 4], Ex::GenPoly(&[1, 0, 1])),
            ([0, 0, 1], Ex::GenPoly(&[1, 1])),
        ],
        erratum: None,
    },
    WorkedExample {
        name: "P1 pentanomial, q = 2^8",
        family: FamilyId::P1,
        p: 2,
        m: 8,
        modulus: Some(Q256),
        beta: Ex::Int(1),
        beta_t: None,
        delta: g!(321),
        delta_t: g!(47351),
        aux: Some(Ex::Pows(&[257, 257 * 254])),
        expected: &[
            ([0, 4, 0], g!(8722)),
            ([0, 3, 1], g!(48830)),
            ([0, 2, 2], g!(53713)),
            ([0, 1, 3], g!(48830)),
            ([0, 0, 4], g!(47311)),
        ],
        erratum: None,
    },
    WorkedExample {
        name: "P4 pentanomial, q = 4",
        family: FamilyId::P4,
        p: 2,
        m: 2,
        modulus: None,
        beta: g!(3),
        beta_t: Some(g!(3)),
        delta: g!(1),
        delta_t: g!(1),
        aux: Some(Ex::Pows(&[2, 1])),
        expected: &[
            ([0, 0, 13], Ex::GenPoly(&[1, 0, 1])),
            ([0, 0, 10], Ex::GenPoly(&[0, 1, 1, 1])),
            ([0, 0, 7], Ex::GenPoly(&[1, 0, 0, 1])),
            ([0, 0, 4], Ex::GenPoly(&[0, 0, 1, 1])),
            ([0, 0, 1], Ex::GenPoly(&[1, 0, 1, 1])),
        ],
        erratum: None,
    },
    WorkedExample {
        name: "P4 pentanomial, q = 2^6",
        family: FamilyId::P4,
        p: 2,
        m: 6,
        modulus: Some(Q64),
        beta: g!(3087),
        beta_t: None,
        delta: g!(3894),
        delta_t: g!(3990),
        aux: Some(g!(65)),
        expected: &[
            ([0, 4, 0], g!(28)),
            ([0, 3, 1], g!(3477)),
            ([0, 2, 2], g!(2469)),
            ([0, 1, 3], g!(1461)),
            ([0, 0, 4], g!(3107)),
        ],
        erratum: None,
    },
    WorkedExample {
        name: "B1 binomial, q = 4",
        family: FamilyId::B1,
        p: 2,
        m: 2,
        modulus: None,
        beta: g!(3),
        beta_t: Some(g!(3)),
        delta: g!(1),
        delta_t: g!(3),
        aux: None,
        expected: &[([0, 0, 14], Ex::GenPoly(&[0, 0, 1, 1])), ([0, 0, 11], Ex::GenPoly(&[0, 0, 0, 1, 1]))],
        erratum: None,
    },
    WorkedExample {
        name: "B1 binomial, q = 2^8",
        family: FamilyId::B1,
        p: 2,
        m: 8,
        modulus: Some(Q256),
        beta: g!(31110),
        beta_t: None,
        delta: g!(53660),
        delta_t: g!(33334),
        aux: None,
        expected: &[([1, -1, 2], g!(34047)), ([0, 3, -1], g!(53717))],
        erratum: None,
    },
];

/// Whether the root of a stated modulus generates the multiplicative group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimitivityNote {
    pub p: u32,
    pub modulus: Vec<u32>,
    pub root_order: u64,
    pub group_order: u64,
}

impl PrimitivityNote {
    pub fn primitive(&self) -> bool {
        self.root_order == self.group_order
    }
}

#[derive(Debug, Clone)]
pub struct ReproOutcome {
    pub name: &'static str,
    pub family: FamilyId,
    pub q: u64,
    pub modulus_stated: bool,
    /// The element used as g, as a power of the field's generator.
    pub g_used: Option<String>,
    pub build_error: Option<String>,
    pub coeffs_match: bool,
    pub mismatches: Vec<String>,
    pub is_permutation: bool,
    /// Whether the erratum reading reproduces the stated polynomial exactly.
    pub erratum_reproduces: Option<bool>,
    pub ms: f64,
}

impl ReproOutcome {
    pub fn pass(&self) -> bool {
        self.build_error.is_none() && self.coeffs_match && self.is_permutation
    }
}

fn exponent(e: QExp, q: u64, n: u64) -> u64 {
    let q = q as i64;
    let v = e[0] * q * q + e[1] * q + e[2];
    reduce_exponent(u64::try_from(v).expect("stated exponents are positive"), n)
}

fn params_at(ex: &WorkedExample, ext: &QuadExtension, g: FieldElement) -> ConstructionParams {
    let ctx = ext.big();
    let beta = ex.beta.eval(ctx, g);
    ConstructionParams {
        family: ex.family,
        beta,
        beta_t: ex.beta_t.map(|b| b.eval(ctx, g)).unwrap_or_else(|| beta_tilde(ext, ex.family, beta)),
        delta: ex.delta.eval(ctx, g),
        delta_t: ex.delta_t.eval(ctx, g),
        aux: ex.aux.map(|a| a.eval(ctx, g)),
    }
}

pub fn expected_poly(ex: &WorkedExample, ext: &QuadExtension, g: FieldElement) -> SparsePolynomial {
    let ctx = ext.big();
    let n = ctx.group_order();
    SparsePolynomial::from_terms(ctx, ex.expected.iter().map(|&(e, c)| (exponent(e, ext.q(), n), c.eval(ctx, g))))
}

/// Builds at one choice of g; Err carries the build failure.
/// Built and stated polynomials, or why building failed.
type Attempt = Result<(SparsePolynomial, SparsePolynomial), String>;

fn attempt(ex: &WorkedExample, ext: &QuadExtension, g: FieldElement) -> Attempt {
    let c = build_family(ext, &params_at(ex, ext, g)).map_err(|e| e.to_string())?;
    verify_both(&c.poly, c.r, &c.h, ext, DEFAULT_CAP).map_err(|e| e.to_string())?;
    Ok((c.poly, expected_poly(ex, ext, g)))
}

fn diff(ctx: &FieldCtx, got: &SparsePolynomial, want: &SparsePolynomial) -> Vec<String> {
    let mut exps: Vec<u64> = got.support().into_iter().chain(want.support()).collect();
    exps.sort_unstable();
    exps.dedup();
    exps.into_iter()
        .rev()
        .filter(|&e| got.coeff(e) != want.coeff(e))
        .map(|e| {
            let show = |c: Option<FieldElement>| c.map(|c| ctx.display(c)).unwrap_or_else(|| "0".into());
            format!("X^{e}: got {}, expected {}", show(got.coeff(e)), show(want.coeff(e)))
        })
        .collect()
}

pub fn field_for(ex: &WorkedExample) -> Result<QuadExtension, FieldError> {
    match ex.modulus {
        Some(m) => QuadExtension::new(ex.p, ex.m, m, None),
        None => QuadExtension::canonical(ex.p, ex.m),
    }
}

pub fn run_example(ex: &WorkedExample) -> ReproOutcome {
    let t = Instant::now();
    let mut out = ReproOutcome {
        name: ex.name,
        family: ex.family,
        q: (ex.p as u64).pow(ex.m),
        modulus_stated: ex.modulus.is_some(),
        g_used: None,
        build_error: None,
        coeffs_match: false,
        mismatches: Vec::new(),
        is_permutation: false,
        erratum_reproduces: None,
        ms: 0.0,
    };
    let ext = match field_for(ex) {
        Ok(e) => e,
        Err(e) => {
            out.build_error = Some(e.to_string());
            return out;
        }
    };
    let ctx = ext.big();
    let candidates: Vec<FieldElement> = match ex.modulus {
        Some(_) => vec![ctx.from_coords(&[0, 1]).expect("degree >= 2")],
        None => ctx.elements().filter(|&x| ctx.is_primitive(x)).collect(),
    };
    let mut first: Option<(FieldElement, Attempt)> = None;
    for &g in &candidates {
        let res = attempt(ex, &ext, g);
        if matches!(&res, Ok((got, want)) if got == want) {
            first = Some((g, res));
            break;
        }
        if first.is_none() {
            first = Some((g, res));
        }
    }
    let (g, res) = first.expect("at least one candidate");
    out.g_used = Some(ctx.display(g));
    match res {
        Err(e) => out.build_error = Some(e),
        Ok((got, want)) => {
            out.mismatches = diff(ctx, &got, &want);
            out.coeffs_match = out.mismatches.is_empty();
            out.is_permutation =
                is_permutation_exhaustive(&want, ctx, DEFAULT_CAP).map(|r| r.is_permutation).unwrap_or(false);
        }
    }
    out.erratum_reproduces = ex.erratum.map(|e| erratum_reproduces(ex, &e));
    out.ms = t.elapsed().as_secs_f64() * 1e3;
    out
}

fn erratum_reproduces(ex: &WorkedExample, e: &Erratum) -> bool {
    let Ok(ext) = QuadExtension::new(ex.p, ex.m, e.modulus, None) else {
        return false;
    };
    let g = ext.big().from_coords(&[0, 1]).expect("degree >= 2");
    let corrected = WorkedExample { delta_t: e.delta_t, erratum: None, ..*ex };
    matches!(attempt(&corrected, &ext, g), Ok((got, want)) if got == want)
        && is_permutation_exhaustive(&expected_poly(ex, &ext, g), ext.big(), DEFAULT_CAP)
            .is_ok_and(|r| r.is_permutation)
}

pub fn run_all() -> Vec<ReproOutcome> {
    EXAMPLES.iter().map(run_example).collect()
}

/// One note per distinct stated modulus.
pub fn primitivity_report() -> Result<Vec<PrimitivityNote>, FieldError> {
    let mut out: Vec<PrimitivityNote> = Vec::new();
    for ex in EXAMPLES {
        let Some(m) = ex.modulus else { continue };
        if out.iter().any(|n| n.p == ex.p && n.modulus == m) {
            continue;
        }
        let ctx = FieldCtx::new(ex.p, m, None)?;
        let root = ctx.from_coords(&[0, 1])?;
        out.push(PrimitivityNote {
            p: ex.p,
            modulus: m.to_vec(),
            root_order: ctx.element_order(root)?,
            group_order: ctx.group_order(),
        });
    }
    Ok(out)
}

/// The modulus as text, highest degree first, in the variable `var`.
pub fn modulus_text(modulus: &[u32], var: &str) -> String {
    let mut parts = Vec::new();
    for (i, &c) in modulus.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let mono = match i {
            0 => String::new(),
            1 => var.to_string(),
            _ => format!("{var}^{i}"),
        };
        parts.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => mono,
            _ => format!("{c}{mono}"),
        });
    }
    parts.join(" + ")
}
