//! Closed-form coefficient systems and the sixteen polynomial families built
//! from them.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::field::{FieldCtx, FieldElement, FieldError, QuadExtension};
use crate::poly::{reduce_exponent, PolyError, SparsePolynomial};
use crate::rational::RationalFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyId {
    Q1,
    Q2a,
    Q2b,
    Q2c,
    Q3,
    Q4a,
    Q4b,
    Q4c,
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    B1,
    B2,
}

/// Which base rational function a family is conjugated from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SystemKind {
    /// X^3, q ≡ 2 mod 3.
    Case1,
    /// X^3 - αX, q ≡ 0 mod 3.
    Case3,
    /// X^4 + X^2 + αX, q even.
    Deg4Lin,
    /// X^4 + aX, q even (a = 0 for the binomials).
    Deg4NonCube,
}

/// Which conjugate of the denominator polynomial the family uses as h.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    H0,
    H1,
    H2,
    H3,
    H5,
}

impl FamilyId {
    pub const ALL: [FamilyId; 16] = [
        FamilyId::Q1,
        FamilyId::Q2a,
        FamilyId::Q2b,
        FamilyId::Q2c,
        FamilyId::Q3,
        FamilyId::Q4a,
        FamilyId::Q4b,
        FamilyId::Q4c,
        FamilyId::P1,
        FamilyId::P2,
        FamilyId::P3,
        FamilyId::P4,
        FamilyId::P5,
        FamilyId::P6,
        FamilyId::B1,
        FamilyId::B2,
    ];

    pub fn kind(self) -> SystemKind {
        use FamilyId::*;
        match self {
            Q1 | Q2a | Q2b | Q2c => SystemKind::Case1,
            Q3 | Q4a | Q4b | Q4c => SystemKind::Case3,
            P1 | P2 | P3 => SystemKind::Deg4Lin,
            P4 | P5 | P6 | B1 | B2 => SystemKind::Deg4NonCube,
        }
    }

    fn shape(self) -> Shape {
        use FamilyId::*;
        match self {
            Q1 | Q3 => Shape::H0,
            Q2a | Q4a | P1 | P4 => Shape::H1,
            Q2b | Q4b | P2 | P5 | B1 => Shape::H2,
            Q2c | Q4c => Shape::H3,
            P3 | P6 | B2 => Shape::H5,
        }
    }

    /// The exponent r in f = X^r h(X^(q-1)). Zero when undefined (q - 3 at q = 2).
    pub fn r(self, q: u64) -> u64 {
        use FamilyId::*;
        match self {
            Q1 | Q3 => 3,
            Q2a | Q4a => 1,
            Q2b | Q4b => q,
            Q2c => q - 2,
            Q4c => 3 * q,
            P1 | P4 => 4,
            P2 | P5 | B1 => 2,
            P3 | P6 | B2 => q.saturating_sub(3),
        }
    }

    pub fn is_binomial(self) -> bool {
        matches!(self, FamilyId::B1 | FamilyId::B2)
    }

    /// Whether the family takes an auxiliary α or a.
    pub fn has_aux(self) -> bool {
        matches!(self.kind(), SystemKind::Case3 | SystemKind::Deg4Lin)
            || (self.kind() == SystemKind::Deg4NonCube && !self.is_binomial())
    }

    /// Number of terms for generic valid parameters.
    pub fn term_count(self) -> usize {
        match self.kind() {
            SystemKind::Case1 | SystemKind::Case3 => 4,
            SystemKind::Deg4Lin => 5,
            SystemKind::Deg4NonCube if self.is_binomial() => 2,
            SystemKind::Deg4NonCube => 5,
        }
    }

    /// Whether the congruence on q is met.
    pub fn admits(self, q: u64) -> bool {
        let cong = match self.kind() {
            SystemKind::Case1 => q % 3 == 2,
            SystemKind::Case3 => q % 3 == 0,
            _ => q % 2 == 0,
        };
        cong && (self.shape() != Shape::H5 || q > 3)
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for FamilyId {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.to_string().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| ConstructionError::UnknownFamily(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConstructionParams {
    pub family: FamilyId,
    pub beta: FieldElement,
    pub beta_t: FieldElement,
    pub delta: FieldElement,
    pub delta_t: FieldElement,
    /// α for Q3, Q4*, P1-P3; a for P4-P6.
    pub aux: Option<FieldElement>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    Congruence { q: u64, requirement: String },
    ForeignElement { name: String },
    BetaNotOnCircle,
    BetaTildeNotOnCircle,
    DeltaInSubfield,
    DeltaTildeInSubfield,
    BetaRelation { relation: String },
    DeltaTildeExcluded { equals: String },
    AuxMissing,
    AuxUnexpected,
    AuxNotInSubfield,
    AlphaIsSquare,
    CubicReducible,
    TraceSumZero,
    AuxZero,
    AuxIsCube,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Congruence { q, requirement } => write!(f, "q = {q} violates {requirement}"),
            Violation::ForeignElement { name } => write!(f, "{name} is not an element of this field"),
            Violation::BetaNotOnCircle => write!(f, "beta is not in the unit circle"),
            Violation::BetaTildeNotOnCircle => write!(f, "beta~ is not in the unit circle"),
            Violation::DeltaInSubfield => write!(f, "delta lies in GF(q)"),
            Violation::DeltaTildeInSubfield => write!(f, "delta~ lies in GF(q)"),
            Violation::BetaRelation { relation } => write!(f, "beta relation {relation} fails"),
            Violation::DeltaTildeExcluded { equals } => write!(f, "delta~ equals {equals}"),
            Violation::AuxMissing => write!(f, "family needs an auxiliary element"),
            Violation::AuxUnexpected => write!(f, "family takes no auxiliary element"),
            Violation::AuxNotInSubfield => write!(f, "auxiliary element is not in GF(q)"),
            Violation::AlphaIsSquare => write!(f, "alpha must be zero or a non-square"),
            Violation::CubicReducible => write!(f, "X^3 + X + alpha is reducible over GF(q)"),
            Violation::TraceSumZero => write!(f, "delta + delta^q + alpha = 0"),
            Violation::AuxZero => write!(f, "a must be nonzero"),
            Violation::AuxIsCube => write!(f, "a must be a non-cube"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstructionError {
    #[error("invalid parameters: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidParams(Vec<Violation>),
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("grid would exceed its limits ({0})")]
    LimitExceeded(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// β̃ forced by the family relation: -β^(-3) for the Q families, β^(-4) otherwise.
pub fn beta_tilde(ext: &QuadExtension, family: FamilyId, beta: FieldElement) -> FieldElement {
    let ctx = ext.big();
    match family.kind() {
        SystemKind::Case1 | SystemKind::Case3 => ctx.neg(ctx.gen_pow(-3 * ctx.log(beta).unwrap_or(0) as i64)),
        _ => ctx.gen_pow(-4 * ctx.log(beta).unwrap_or(0) as i64),
    }
}

/// The values δ̃ must avoid, labelled for error reporting.
pub fn delta_tilde_exclusions(
    ext: &QuadExtension,
    family: FamilyId,
    delta: FieldElement,
    aux: Option<FieldElement>,
) -> Vec<(&'static str, FieldElement)> {
    let ctx = ext.big();
    let q = ext.q();
    let p = |e: u64| ctx.pow(delta, e);
    let x = aux.unwrap_or(ctx.zero());
    match family.kind() {
        SystemKind::Case1 => {
            vec![("delta^3", p(3)), ("delta^(q+2)", p(q + 2)), ("delta^(2q+1)", p(2 * q + 1)), ("delta^(3q)", p(3 * q))]
        }
        SystemKind::Case3 => vec![
            ("delta^(3q) - alpha delta^q", ctx.sub(p(3 * q), ctx.mul(x, p(q)))),
            ("delta^3 - alpha delta", ctx.sub(p(3), ctx.mul(x, delta))),
        ],
        SystemKind::Deg4Lin => vec![
            ("delta^4 + delta^2 + alpha delta", ctx.add(ctx.add(p(4), p(2)), ctx.mul(x, delta))),
            ("delta^(4q) + delta^(2q) + alpha delta^q", ctx.add(ctx.add(p(4 * q), p(2 * q)), ctx.mul(x, p(q)))),
        ],
        SystemKind::Deg4NonCube if family.is_binomial() => {
            vec![("delta^4", p(4)), ("delta^(4q)", p(4 * q))]
        }
        SystemKind::Deg4NonCube => vec![
            ("delta^4 + a delta", ctx.add(p(4), ctx.mul(x, delta))),
            ("delta^(4q) + a delta^q", ctx.add(p(4 * q), ctx.mul(x, p(q)))),
        ],
    }
}

fn congruence_text(family: FamilyId) -> &'static str {
    match family.kind() {
        SystemKind::Case1 => "q = 2 mod 3",
        SystemKind::Case3 => "q = 0 mod 3",
        _ if family.shape() == Shape::H5 => "q even and q >= 4",
        _ => "q even",
    }
}

/// Checks the family hypotheses; an empty list means the parameters are valid.
pub fn validate_params(ext: &QuadExtension, params: &ConstructionParams) -> Vec<Violation> {
    let ctx = ext.big();
    let q = ext.q();
    let family = params.family;
    let mut out = Vec::new();
    if !family.admits(q) {
        out.push(Violation::Congruence { q, requirement: congruence_text(family).to_string() });
    }
    let named = [
        ("beta", Some(params.beta)),
        ("beta_t", Some(params.beta_t)),
        ("delta", Some(params.delta)),
        ("delta_t", Some(params.delta_t)),
        ("aux", params.aux),
    ];
    let mut foreign = false;
    for (name, x) in named {
        if let Some(x) = x {
            if !ctx.contains(x) {
                out.push(Violation::ForeignElement { name: name.to_string() });
                foreign = true;
            }
        }
    }
    if foreign {
        return out;
    }
    let (beta, beta_t) = (params.beta, params.beta_t);
    if !ext.on_circle(beta) {
        out.push(Violation::BetaNotOnCircle);
    }
    if !ext.on_circle(beta_t) {
        out.push(Violation::BetaTildeNotOnCircle);
    }
    let sub = ext.subfield();
    if sub.contains(params.delta) {
        out.push(Violation::DeltaInSubfield);
    }
    if sub.contains(params.delta_t) {
        out.push(Violation::DeltaTildeInSubfield);
    }
    match family.kind() {
        SystemKind::Case1 | SystemKind::Case3 => {
            if ctx.add(ctx.one(), ctx.mul(beta_t, ctx.pow(beta, 3))) != ctx.zero() {
                out.push(Violation::BetaRelation { relation: "1 + beta~ beta^3 = 0".into() });
            }
        }
        _ => {
            if ctx.mul(beta_t, ctx.pow(beta, 4)) != ctx.one() {
                out.push(Violation::BetaRelation { relation: "beta~ beta^4 = 1".into() });
            }
        }
    }
    for (label, v) in delta_tilde_exclusions(ext, family, params.delta, params.aux) {
        if v == params.delta_t {
            out.push(Violation::DeltaTildeExcluded { equals: label.to_string() });
        }
    }
    match (family.has_aux(), params.aux) {
        (true, None) => out.push(Violation::AuxMissing),
        (false, Some(_)) => out.push(Violation::AuxUnexpected),
        (false, None) => {}
        (true, Some(x)) => {
            if !sub.contains(x) {
                out.push(Violation::AuxNotInSubfield);
            } else {
                match family.kind() {
                    SystemKind::Case3 => {
                        if !x.is_zero() && sub.is_square(x).unwrap_or(false) {
                            out.push(Violation::AlphaIsSquare);
                        }
                    }
                    SystemKind::Deg4Lin => {
                        if !sub.cubic_irreducible(x).unwrap_or(false) {
                            out.push(Violation::CubicReducible);
                        }
                        if ctx.add(ctx.add(params.delta, ext.conj(params.delta)), x).is_zero() {
                            out.push(Violation::TraceSumZero);
                        }
                    }
                    _ => {
                        if x.is_zero() {
                            out.push(Violation::AuxZero);
                        } else if sub.is_cube(x).unwrap_or(true) {
                            out.push(Violation::AuxIsCube);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Coefficients of ν ∘ f ∘ ρ for one of the four base functions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientSystem {
    pub kind: SystemKind,
    /// N_0..N_3, or N_0..N_4 for the degree-four kinds.
    pub n: Vec<FieldElement>,
    /// D_0..D_3; empty for the degree-four kinds.
    pub d: Vec<FieldElement>,
    /// (N_0 + β^4 δ̃, N_4 + δ̃) for the degree-four kinds.
    pub shift: Option<(FieldElement, FieldElement)>,
}

impl CoefficientSystem {
    /// Coefficients of h (cubic kinds) or h_1 (quartic kinds), least-degree-first.
    pub fn h_coeffs(&self) -> Vec<FieldElement> {
        match self.shift {
            None => self.d.clone(),
            Some((c0, c4)) => vec![c0, self.n[1], self.n[2], self.n[3], c4],
        }
    }
}

/// Computes the coefficient system of the family's kind.
pub fn coeffs(ext: &QuadExtension, params: &ConstructionParams) -> Result<CoefficientSystem, ConstructionError> {
    let v = validate_params(ext, params);
    if !v.is_empty() {
        return Err(ConstructionError::InvalidParams(v));
    }
    Ok(coeffs_unchecked(ext, params))
}

pub(crate) fn coeffs_unchecked(ext: &QuadExtension, params: &ConstructionParams) -> CoefficientSystem {
    let ctx = ext.big();
    let q = ext.q();
    let (b, bt, d, dt) = (params.beta, params.beta_t, params.delta, params.delta_t);
    let x = params.aux.unwrap_or(ctx.zero());
    let dp = |e: u64| ctx.pow(d, e);
    let bp = |e: u64| ctx.pow(b, e);
    let m = |xs: &[FieldElement]| xs.iter().fold(ctx.one(), |acc, &y| ctx.mul(acc, y));
    let three = ctx.from_int(3);
    let dtq = ext.conj(dt);
    let dq = dp(q);
    let kind = params.family.kind();
    match kind {
        SystemKind::Case1 => {
            let pair = |e: u64| (ctx.sub(dp(e), dtq), ctx.sub(dp(e), dt));
            let (n3, d3) = pair(3);
            let (n2, d2) = pair(q + 2);
            let (n1, d1) = pair(2 * q + 1);
            let (n0, d0) = pair(3 * q);
            CoefficientSystem {
                kind,
                n: vec![
                    ctx.neg(m(&[bt, bp(3), n0])),
                    m(&[three, bt, bp(2), n1]),
                    ctx.neg(m(&[three, bt, b, n2])),
                    m(&[bt, n3]),
                ],
                d: vec![ctx.neg(m(&[bp(3), d0])), m(&[three, bp(2), d1]), ctx.neg(m(&[three, b, d2])), d3],
                shift: None,
            }
        }
        SystemKind::Case3 => {
            let low = ctx.sub(ctx.mul(x, dq), dp(3 * q));
            let high = ctx.sub(dp(3), ctx.mul(x, d));
            let diff = ctx.sub(dq, d);
            CoefficientSystem {
                kind,
                n: vec![
                    m(&[bt, bp(3), ctx.add(low, dtq)]),
                    m(&[x, bt, bp(2), diff]),
                    m(&[x, bt, b, diff]),
                    m(&[bt, ctx.sub(high, dtq)]),
                ],
                d: vec![m(&[bp(3), ctx.add(low, dt)]), m(&[x, bp(2), diff]), m(&[x, b, diff]), ctx.sub(high, dt)],
                shift: None,
            }
        }
        SystemKind::Deg4Lin | SystemKind::Deg4NonCube => {
            let tr = ctx.add(d, dq);
            let n = if kind == SystemKind::Deg4Lin {
                vec![
                    m(&[bp(4), ctx.add(ctx.add(dp(4 * q), dp(2 * q)), ctx.mul(x, dq))]),
                    m(&[x, bp(3), tr]),
                    m(&[bp(2), tr, ctx.add(tr, x)]),
                    m(&[x, b, tr]),
                    ctx.add(ctx.add(dp(4), dp(2)), ctx.mul(x, d)),
                ]
            } else {
                vec![
                    m(&[bp(4), ctx.add(ctx.mul(x, dq), dp(4 * q))]),
                    m(&[x, bp(3), tr]),
                    m(&[x, bp(2), tr]),
                    m(&[x, b, tr]),
                    ctx.add(dp(4), ctx.mul(x, d)),
                ]
            };
            let c0 = ctx.add(n[0], ctx.mul(bp(4), dt));
            let c4 = ctx.add(n[4], dt);
            CoefficientSystem { kind, n, d: Vec::new(), shift: Some((c0, c4)) }
        }
    }
}

/// The rational function assembled directly from the closed-form system.
pub fn assembled_rational(
    ext: &QuadExtension,
    params: &ConstructionParams,
    sys: &CoefficientSystem,
) -> Result<RationalFunction, ConstructionError> {
    let ctx = ext.big();
    let (num, den) = match sys.shift {
        None => (SparsePolynomial::from_dense(ctx, &sys.n), SparsePolynomial::from_dense(ctx, &sys.d)),
        Some(_) => {
            let dtq = ext.conj(params.delta_t);
            let b4 = ctx.pow(params.beta, 4);
            let top = [ctx.add(sys.n[0], ctx.mul(b4, dtq)), sys.n[1], sys.n[2], sys.n[3], ctx.add(sys.n[4], dtq)];
            (
                SparsePolynomial::from_dense(ctx, &top).scale(ctx, params.beta_t),
                SparsePolynomial::from_dense(ctx, &sys.h_coeffs()),
            )
        }
    };
    Ok(RationalFunction::new(num, den)?.reduced(ctx)?)
}

/// The base rational function ν ∘ f ∘ ρ conjugates, as a polynomial.
pub fn base_function(ctx: &FieldCtx, params: &ConstructionParams) -> SparsePolynomial {
    let x = params.aux.unwrap_or(ctx.zero());
    let one = ctx.one();
    match params.family.kind() {
        SystemKind::Case1 => SparsePolynomial::from_terms(ctx, [(3, one)]),
        SystemKind::Case3 => SparsePolynomial::from_terms(ctx, [(3, one), (1, ctx.neg(x))]),
        SystemKind::Deg4Lin => SparsePolynomial::from_terms(ctx, [(4, one), (2, one), (1, x)]),
        SystemKind::Deg4NonCube => SparsePolynomial::from_terms(ctx, [(4, one), (1, x)]),
    }
}

/// Every conjugate of h that the root-absence equivalence lists, by name.
///
/// Cubic kinds give h, h_1, h_2, h_3; quartic kinds give h_1..h_5 with the
/// X^(kq) exponents.
pub fn h_variants(ext: &QuadExtension, sys: &CoefficientSystem) -> Vec<(String, SparsePolynomial)> {
    let ctx = ext.big();
    let q = ext.q();
    let c = sys.h_coeffs();
    let top = c.len() - 1;
    // Rotating the coefficient list by k moves the k lowest into X^(jq) slots.
    (0..=top)
        .map(|k| {
            let mut terms = Vec::new();
            for (i, &ci) in c.iter().enumerate() {
                if i >= k {
                    terms.push(((i - k) as u64, ci));
                } else {
                    terms.push(((k - i) as u64 * q, ci));
                }
            }
            let name = match sys.shift {
                None if k == 0 => "h".to_string(),
                None => format!("h{k}"),
                Some(_) => format!("h{}", k + 1),
            };
            (name, SparsePolynomial::from_terms(ctx, terms))
        })
        .collect()
}

fn family_h(ext: &QuadExtension, family: FamilyId, sys: &CoefficientSystem) -> SparsePolynomial {
    let ctx = ext.big();
    let q = ext.q();
    let c = sys.h_coeffs();
    let shape = family.shape();
    if shape == Shape::H5 {
        // (N_0 + β^4 δ̃)X^(q-3) + N_1 X^(q-2) + N_2 X^(q-1) + N_3 X^q + (N_4 + δ̃)
        return SparsePolynomial::from_terms(ctx, [(q - 3, c[0]), (q - 2, c[1]), (q - 1, c[2]), (q, c[3]), (0, c[4])]);
    }
    let idx = match (shape, sys.shift.is_some()) {
        (Shape::H0, _) | (Shape::H1, true) => 0,
        (Shape::H1, false) | (Shape::H2, true) => 1,
        (Shape::H2, false) => 2,
        _ => 3,
    };
    h_variants(ext, sys).swap_remove(idx).1
}

/// Σ c X^(r + e(q-1)) over the terms c X^e of h, exponents reduced.
pub fn expand(ext: &QuadExtension, r: u64, h: &SparsePolynomial) -> SparsePolynomial {
    let ctx = ext.big();
    let n = ctx.group_order();
    let s = ext.q() - 1;
    SparsePolynomial::from_terms(ctx, h.terms().map(|(e, c)| (reduce_exponent(r + e * s, n), c)))
}

/// A built family member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Construction {
    pub params: ConstructionParams,
    /// f with exponents reduced into [1, q^2 - 1].
    pub poly: SparsePolynomial,
    pub r: u64,
    pub h: SparsePolynomial,
    pub system: CoefficientSystem,
}

impl Construction {
    /// Actual number of nonzero terms (fewer than advertised only when α = 0 in Case 3).
    pub fn term_count(&self) -> usize {
        self.poly.len()
    }
}

pub fn build_family(ext: &QuadExtension, params: &ConstructionParams) -> Result<Construction, ConstructionError> {
    let system = coeffs(ext, params)?;
    Ok(build_from_system(ext, params, system))
}

/// Builds a family member from an already computed system for the same parameters.
pub fn build_from_system(ext: &QuadExtension, params: &ConstructionParams, system: CoefficientSystem) -> Construction {
    let r = params.family.r(ext.q());
    let h = family_h(ext, params.family, &system);
    let poly = expand(ext, r, &h);
    Construction { params: *params, poly, r, h, system }
}

/// Bounds on a parameter grid.
#[derive(Debug, Clone, Copy)]
pub struct GridLimits {
    /// Largest allowed q^2.
    pub max_order: u64,
    /// Largest allowed number of candidate tuples before filtering.
    pub max_candidates: Option<u64>,
    /// Half-open range of circle indices to use for β, for splitting work.
    pub beta_range: Option<(usize, usize)>,
}

impl Default for GridLimits {
    fn default() -> Self {
        GridLimits { max_order: 1 << 16, max_candidates: None, beta_range: None }
    }
}

/// The admissible auxiliary values of a family at this q, or `[None]`.
pub fn aux_set(ext: &QuadExtension, family: FamilyId) -> Vec<Option<FieldElement>> {
    if !family.has_aux() {
        return vec![None];
    }
    let sub = ext.subfield();
    let vals: Vec<FieldElement> = match family.kind() {
        SystemKind::Case3 => std::iter::once(ext.big().zero()).chain(sub.non_squares()).collect(),
        SystemKind::Deg4Lin => {
            sub.elements().into_iter().filter(|&a| sub.cubic_irreducible(a).unwrap_or(false)).collect()
        }
        _ => sub.non_cubes(),
    };
    vals.into_iter().map(Some).collect()
}

/// Iterator over every valid tuple of a family, in (β, aux, δ, δ̃) order.
pub struct ParamGrid<'a> {
    ext: &'a QuadExtension,
    family: FamilyId,
    betas: Vec<FieldElement>,
    auxes: Vec<Option<FieldElement>>,
    deltas: Vec<FieldElement>,
    pos: [usize; 4],
    excl: Vec<FieldElement>,
    skip_delta: bool,
}

pub fn param_grid(
    ext: &QuadExtension,
    family: FamilyId,
    limits: GridLimits,
) -> Result<ParamGrid<'_>, ConstructionError> {
    let order = ext.big().order();
    if order > limits.max_order {
        return Err(ConstructionError::LimitExceeded(format!("q^2 = {order} > {}", limits.max_order)));
    }
    let (mut betas, mut auxes, mut deltas) = (Vec::new(), Vec::new(), Vec::new());
    if family.admits(ext.q()) {
        betas = ext.circle_members();
        if let Some((lo, hi)) = limits.beta_range {
            betas = betas[lo.min(betas.len())..hi.min(betas.len())].to_vec();
        }
        auxes = aux_set(ext, family);
        deltas = ext.outside_subfield();
    }
    let candidates = (betas.len() * auxes.len()) as u64 * (deltas.len() as u64).pow(2);
    if let Some(max) = limits.max_candidates {
        if candidates > max {
            return Err(ConstructionError::LimitExceeded(format!("{candidates} candidates > {max}")));
        }
    }
    let mut grid = ParamGrid { ext, family, betas, auxes, deltas, pos: [0; 4], excl: Vec::new(), skip_delta: false };
    grid.refresh();
    Ok(grid)
}

impl ParamGrid<'_> {
    pub fn is_empty_space(&self) -> bool {
        self.betas.is_empty() || self.auxes.is_empty() || self.deltas.is_empty()
    }

    fn refresh(&mut self) {
        if self.is_empty_space() || self.pos[0] >= self.betas.len() {
            return;
        }
        let aux = self.auxes[self.pos[1]];
        let delta = self.deltas[self.pos[2]];
        self.excl = delta_tilde_exclusions(self.ext, self.family, delta, aux).into_iter().map(|(_, v)| v).collect();
        let ctx = self.ext.big();
        self.skip_delta = self.family.kind() == SystemKind::Deg4Lin
            && ctx.add(ctx.add(delta, self.ext.conj(delta)), aux.unwrap_or(ctx.zero())).is_zero();
    }

    fn advance(&mut self) {
        self.pos[3] += 1;
        if self.pos[3] < self.deltas.len() {
            return;
        }
        self.pos[3] = 0;
        self.pos[2] += 1;
        if self.pos[2] >= self.deltas.len() {
            self.pos[2] = 0;
            self.pos[1] += 1;
            if self.pos[1] >= self.auxes.len() {
                self.pos[1] = 0;
                self.pos[0] += 1;
            }
        }
        self.refresh();
    }
}

impl Iterator for ParamGrid<'_> {
    type Item = ConstructionParams;

    fn next(&mut self) -> Option<ConstructionParams> {
        if self.is_empty_space() {
            return None;
        }
        while self.pos[0] < self.betas.len() {
            if self.skip_delta {
                self.pos[3] = self.deltas.len() - 1;
                self.advance();
                continue;
            }
            let [bi, ai, di, ti] = self.pos;
            let delta_t = self.deltas[ti];
            let excluded = self.excl.contains(&delta_t);
            self.advance();
            if excluded {
                continue;
            }
            let beta = self.betas[bi];
            return Some(ConstructionParams {
                family: self.family,
                beta,
                beta_t: beta_tilde(self.ext, self.family, beta),
                delta: self.deltas[di],
                delta_t,
                aux: self.auxes[ai],
            });
        }
        None
    }
}
