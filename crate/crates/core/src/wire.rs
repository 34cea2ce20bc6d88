//! JSON forms of fields, elements, polynomials, parameters and reports.
//!
//! Elements need their field to be read or written, so every type here is a
//! plain serde mirror plus `encode`/`decode` against a context.

use serde::{Deserialize, Serialize};

use crate::constructions::{CoefficientSystem, ConstructionParams, FamilyId, SystemKind};
use crate::field::{FieldCtx, FieldElement, FieldError, QuadExtension};
use crate::poly::{PolyError, SparsePolynomial};
use crate::qm::{QmResult, QmWitness};
use crate::rational::RationalFunction;
use crate::verification::{Method, PermutationReport, Witness};

#[derive(Debug, thiserror::Error)]
pub enum WireError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("{0}")]
    Invalid(String),
}

/// `{"p": 5, "modulus": [c0, ..., cn], "generator": [coords]}`, least-degree-first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u32,
    pub modulus: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<Vec<u32>>,
}

impl FieldSpec {
    /// Describes `ctx`, always naming its generator.
    pub fn of(ctx: &FieldCtx) -> Self {
        FieldSpec {
            p: ctx.characteristic(),
            modulus: ctx.modulus().to_vec(),
            generator: Some(ctx.coords(ctx.generator())),
        }
    }

    pub fn canonical(p: u32, n: u32) -> Result<Self, FieldError> {
        Ok(FieldSpec::of(&FieldCtx::canonical(p, n)?))
    }

    pub fn build(&self) -> Result<FieldCtx, FieldError> {
        FieldCtx::new(self.p, &self.modulus, self.generator.as_deref())
    }

    /// The field as GF(q^2) over GF(q); the degree must be even.
    pub fn build_ext(&self) -> Result<QuadExtension, FieldError> {
        let ctx = self.build()?;
        let n = ctx.degree();
        if n % 2 != 0 {
            return Err(FieldError::DegreeMismatch { want: n + 1, got: n });
        }
        QuadExtension::from_ctx(ctx, n / 2)
    }
}

/// `{"pow": k}` or `{"coords": [...]}`; zero only has the second form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Pow { pow: i64 },
    Coords { coords: Vec<u32> },
}

impl ElementJson {
    pub fn encode(ctx: &FieldCtx, x: FieldElement) -> Self {
        match ctx.log(x) {
            Some(k) => ElementJson::Pow { pow: k as i64 },
            None => ElementJson::Coords { coords: vec![0; ctx.degree() as usize] },
        }
    }

    pub fn decode(&self, ctx: &FieldCtx) -> Result<FieldElement, FieldError> {
        match self {
            ElementJson::Pow { pow } => Ok(ctx.gen_pow(*pow)),
            ElementJson::Coords { coords } => ctx.from_coords(coords),
        }
    }
}

/// `{"terms": [[e, elem], ...]}`, descending exponents.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub terms: Vec<(u64, ElementJson)>,
}

impl PolyJson {
    pub fn encode(ctx: &FieldCtx, f: &SparsePolynomial) -> Self {
        PolyJson { terms: f.terms().map(|(e, c)| (e, ElementJson::encode(ctx, c))).collect() }
    }

    pub fn decode(&self, ctx: &FieldCtx) -> Result<SparsePolynomial, FieldError> {
        let terms = self.terms.iter().map(|(e, c)| Ok((*e, c.decode(ctx)?))).collect::<Result<Vec<_>, FieldError>>()?;
        Ok(SparsePolynomial::from_terms(ctx, terms))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalJson {
    pub num: PolyJson,
    pub den: PolyJson,
}

impl RationalJson {
    pub fn encode(ctx: &FieldCtx, f: &RationalFunction) -> Self {
        RationalJson { num: PolyJson::encode(ctx, f.num()), den: PolyJson::encode(ctx, f.den()) }
    }

    pub fn decode(&self, ctx: &FieldCtx) -> Result<RationalFunction, WireError> {
        Ok(RationalFunction::new(self.num.decode(ctx)?, self.den.decode(ctx)?)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsJson {
    pub family: FamilyId,
    pub beta: ElementJson,
    pub beta_t: ElementJson,
    pub delta: ElementJson,
    pub delta_t: ElementJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aux: Option<ElementJson>,
}

impl ParamsJson {
    pub fn encode(ctx: &FieldCtx, p: &ConstructionParams) -> Self {
        let e = |x| ElementJson::encode(ctx, x);
        ParamsJson {
            family: p.family,
            beta: e(p.beta),
            beta_t: e(p.beta_t),
            delta: e(p.delta),
            delta_t: e(p.delta_t),
            aux: p.aux.map(e),
        }
    }

    pub fn decode(&self, ctx: &FieldCtx) -> Result<ConstructionParams, FieldError> {
        Ok(ConstructionParams {
            family: self.family,
            beta: self.beta.decode(ctx)?,
            beta_t: self.beta_t.decode(ctx)?,
            delta: self.delta.decode(ctx)?,
            delta_t: self.delta_t.decode(ctx)?,
            aux: self.aux.as_ref().map(|a| a.decode(ctx)).transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemJson {
    pub kind: SystemKind,
    pub n: Vec<ElementJson>,
    pub d: Vec<ElementJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<(ElementJson, ElementJson)>,
}

impl SystemJson {
    pub fn encode(ctx: &FieldCtx, s: &CoefficientSystem) -> Self {
        let e = |x| ElementJson::encode(ctx, x);
        SystemJson {
            kind: s.kind,
            n: s.n.iter().map(|&x| e(x)).collect(),
            d: s.d.iter().map(|&x| e(x)).collect(),
            shift: s.shift.map(|(a, b)| (e(a), e(b))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    Collision,
    CircleRoot,
    CircleCollision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub is_permutation: bool,
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gcd_ok: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle_ok: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<ElementJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness_kind: Option<WitnessKind>,
    pub ms: f64,
}

impl ReportJson {
    pub fn encode(ctx: &FieldCtx, r: &PermutationReport) -> Self {
        let kind = r.witness.map(|w| match w {
            Witness::Collision(..) => WitnessKind::Collision,
            Witness::CircleRoot(_) => WitnessKind::CircleRoot,
            Witness::CircleCollision(..) => WitnessKind::CircleCollision,
        });
        ReportJson {
            is_permutation: r.is_permutation,
            method: r.method,
            gcd_ok: r.gcd_ok,
            circle_ok: r.circle_ok,
            witness: r.witness.map(|w| w.elements().into_iter().map(|x| ElementJson::encode(ctx, x)).collect()),
            witness_kind: kind,
            ms: r.ms,
        }
    }

    pub fn decode(&self, ctx: &FieldCtx) -> Result<PermutationReport, WireError> {
        let witness = match (&self.witness, self.witness_kind) {
            (None, _) => None,
            (Some(els), kind) => {
                let els = els.iter().map(|e| e.decode(ctx)).collect::<Result<Vec<_>, _>>()?;
                let kind =
                    kind.unwrap_or(if els.len() == 1 { WitnessKind::CircleRoot } else { WitnessKind::Collision });
                Some(match (kind, els.as_slice()) {
                    (WitnessKind::Collision, &[a, b]) => Witness::Collision(a, b),
                    (WitnessKind::CircleCollision, &[a, b]) => Witness::CircleCollision(a, b),
                    (WitnessKind::CircleRoot, &[z]) => Witness::CircleRoot(z),
                    _ => return Err(WireError::Invalid("witness has the wrong number of elements".into())),
                })
            }
        };
        Ok(PermutationReport {
            is_permutation: self.is_permutation,
            method: self.method,
            gcd_ok: self.gcd_ok,
            circle_ok: self.circle_ok,
            witness,
            ms: self.ms,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmWitnessJson {
    pub u: ElementJson,
    pub v: ElementJson,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QmResultJson {
    pub equivalent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<QmWitnessJson>,
    pub d_candidates_examined: u64,
    pub prefilter_rejected: u64,
}

impl QmResultJson {
    pub fn encode(ctx: &FieldCtx, r: &QmResult) -> Self {
        QmResultJson {
            equivalent: r.equivalent,
            witness: r.witness.as_ref().map(|w| QmWitnessJson {
                u: ElementJson::encode(ctx, w.u),
                v: ElementJson::encode(ctx, w.v),
                d: w.d,
            }),
            d_candidates_examined: r.d_candidates_examined,
            prefilter_rejected: r.prefilter_rejected,
        }
    }

    pub fn decode(&self, ctx: &FieldCtx) -> Result<QmResult, FieldError> {
        let witness = match &self.witness {
            None => None,
            Some(w) => Some(QmWitness { u: w.u.decode(ctx)?, v: w.v.decode(ctx)?, d: w.d }),
        };
        Ok(QmResult {
            equivalent: self.equivalent,
            witness,
            d_candidates_examined: self.d_candidates_examined,
            prefilter_rejected: self.prefilter_rejected,
        })
    }
}

/// Parses an element literal: "g^k", an integer, "[c0,...]", or a JSON element object.
pub fn parse_element(ctx: &FieldCtx, s: &str) -> Result<FieldElement, WireError> {
    let t = s.trim();
    if t.starts_with('{') {
        return Ok(serde_json::from_str::<ElementJson>(t)?.decode(ctx)?);
    }
    Ok(ctx.parse(t)?)
}

/// Parses a polynomial given as JSON (`{"terms": ...}`) or as text ("g^5*X^3 + 2*X").
pub fn parse_polynomial(ctx: &FieldCtx, s: &str) -> Result<SparsePolynomial, WireError> {
    let t = s.trim();
    if t.starts_with('{') {
        return Ok(serde_json::from_str::<PolyJson>(t)?.decode(ctx)?);
    }
    Ok(SparsePolynomial::parse(ctx, t)?)
}
