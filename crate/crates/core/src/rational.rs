//! Rational functions and degree-one maps acting on the projective line.

use std::collections::HashMap;

use crate::field::{FieldCtx, FieldElement, QuadExtension, Subfield};
use crate::poly::{PolyError, SparsePolynomial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjPoint {
    Finite(FieldElement),
    Infinity,
}

impl ProjPoint {
    pub fn finite(self) -> Option<FieldElement> {
        match self {
            ProjPoint::Finite(x) => Some(x),
            ProjPoint::Infinity => None,
        }
    }

    pub fn display(self, ctx: &FieldCtx) -> String {
        match self {
            ProjPoint::Finite(x) => ctx.display(x),
            ProjPoint::Infinity => "inf".to_string(),
        }
    }
}

/// GF(q) ∪ {∞}, field elements first.
pub fn projective_line(sub: &Subfield<'_>) -> Vec<ProjPoint> {
    sub.elements().into_iter().map(ProjPoint::Finite).chain(std::iter::once(ProjPoint::Infinity)).collect()
}

/// Anything that maps the projective line to itself.
pub trait ProjMap {
    fn eval_proj(&self, ctx: &FieldCtx, x: ProjPoint) -> Result<ProjPoint, PolyError>;
}

/// (aX + b) / (cX + d) with ad - bc ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MobiusMap {
    pub a: FieldElement,
    pub b: FieldElement,
    pub c: FieldElement,
    pub d: FieldElement,
}

impl MobiusMap {
    pub fn new(
        ctx: &FieldCtx,
        a: FieldElement,
        b: FieldElement,
        c: FieldElement,
        d: FieldElement,
    ) -> Result<Self, PolyError> {
        for x in [a, b, c, d] {
            ctx.check(x)?;
        }
        if ctx.mul(a, d) == ctx.mul(b, c) {
            return Err(PolyError::DegenerateMobius);
        }
        Ok(MobiusMap { a, b, c, d })
    }

    pub fn identity(ctx: &FieldCtx) -> Self {
        MobiusMap { a: ctx.one(), b: ctx.zero(), c: ctx.zero(), d: ctx.one() }
    }

    pub fn to_rational(&self, ctx: &FieldCtx) -> RationalFunction {
        RationalFunction {
            num: SparsePolynomial::from_dense(ctx, &[self.b, self.a]),
            den: SparsePolynomial::from_dense(ctx, &[self.d, self.c]),
        }
    }
}

impl ProjMap for MobiusMap {
    fn eval_proj(&self, ctx: &FieldCtx, x: ProjPoint) -> Result<ProjPoint, PolyError> {
        Ok(match x {
            ProjPoint::Infinity => {
                if self.c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(ctx.div(self.a, self.c)?)
                }
            }
            ProjPoint::Finite(x) => {
                ctx.check(x)?;
                let den = ctx.add(ctx.mul(self.c, x), self.d);
                if den.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(ctx.div(ctx.add(ctx.mul(self.a, x), self.b), den)?)
                }
            }
        })
    }
}

/// num / den with den ≠ 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: SparsePolynomial,
    den: SparsePolynomial,
}

impl RationalFunction {
    pub fn new(num: SparsePolynomial, den: SparsePolynomial) -> Result<Self, PolyError> {
        if den.is_zero() {
            return Err(PolyError::ZeroDenominator);
        }
        if num.ctx_id() != den.ctx_id() {
            return Err(PolyError::CtxMismatch);
        }
        Ok(RationalFunction { num, den })
    }

    pub fn polynomial(ctx: &FieldCtx, f: SparsePolynomial) -> Self {
        RationalFunction { num: f, den: SparsePolynomial::constant(ctx, ctx.one()) }
    }

    pub fn num(&self) -> &SparsePolynomial {
        &self.num
    }

    pub fn den(&self) -> &SparsePolynomial {
        &self.den
    }

    /// Cancels the gcd and makes the denominator monic.
    pub fn reduced(&self, ctx: &FieldCtx) -> Result<Self, PolyError> {
        let g = self.num.gcd(&self.den, ctx)?;
        let (mut num, mut den) = (self.num.clone(), self.den.clone());
        if g.degree().unwrap_or(0) > 0 {
            num = num.div_rem(&g, ctx)?.0;
            den = den.div_rem(&g, ctx)?.0;
        }
        let lead = den.leading_coeff().expect("nonzero denominator");
        let s = ctx.inv(lead)?;
        Ok(RationalFunction { num: num.scale(ctx, s), den: den.scale(ctx, s) })
    }

    /// max(deg num, deg den).
    pub fn degree(&self) -> u64 {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }
}

impl ProjMap for RationalFunction {
    fn eval_proj(&self, ctx: &FieldCtx, x: ProjPoint) -> Result<ProjPoint, PolyError> {
        match x {
            ProjPoint::Infinity => {
                let dn = self.num.degree();
                let dd = self.den.degree().expect("nonzero denominator");
                Ok(match dn {
                    None => ProjPoint::Finite(ctx.zero()),
                    Some(dn) if dn > dd => ProjPoint::Infinity,
                    Some(dn) if dn < dd => ProjPoint::Finite(ctx.zero()),
                    Some(_) => {
                        ProjPoint::Finite(ctx.div(
                            self.num.leading_coeff().expect("nonzero"),
                            self.den.leading_coeff().expect("nonzero"),
                        )?)
                    }
                })
            }
            ProjPoint::Finite(x) => {
                let n = self.num.eval(ctx, x)?;
                let d = self.den.eval(ctx, x)?;
                match (n.is_zero(), d.is_zero()) {
                    (true, true) => Err(PolyError::IndeterminateForm(ctx.display(x))),
                    (_, true) => Ok(ProjPoint::Infinity),
                    _ => Ok(ProjPoint::Finite(ctx.div(n, d)?)),
                }
            }
        }
    }
}

/// ρ(X) = (δX - βδ^q) / (X - β), a bijection μ_{q+1} → P¹(GF(q)).
pub fn rho_map(ext: &QuadExtension, beta: FieldElement, delta: FieldElement) -> Result<MobiusMap, PolyError> {
    let ctx = ext.big();
    ctx.check(beta)?;
    ctx.check(delta)?;
    if !ext.on_circle(beta) {
        return Err(PolyError::BetaNotOnCircle);
    }
    if ext.in_subfield(delta)? {
        return Err(PolyError::DeltaInSubfield);
    }
    let m = MobiusMap::new(ctx, delta, ctx.neg(ctx.mul(beta, ext.conj(delta))), ctx.one(), ctx.neg(beta))?;
    let circle: Vec<_> = ext.circle_members().into_iter().map(ProjPoint::Finite).collect();
    let line = projective_line(&ext.subfield());
    if is_bijection_on(&m, ctx, &circle, &line)?.is_err() {
        return Err(PolyError::NotABijection);
    }
    Ok(m)
}

/// ν(X) = β̃(X - δ̃^q) / (X - δ̃), a bijection P¹(GF(q)) → μ_{q+1}.
pub fn nu_map(ext: &QuadExtension, beta_t: FieldElement, delta_t: FieldElement) -> Result<MobiusMap, PolyError> {
    let ctx = ext.big();
    ctx.check(beta_t)?;
    ctx.check(delta_t)?;
    if !ext.on_circle(beta_t) {
        return Err(PolyError::BetaNotOnCircle);
    }
    if ext.in_subfield(delta_t)? {
        return Err(PolyError::DeltaInSubfield);
    }
    let m = MobiusMap::new(ctx, beta_t, ctx.neg(ctx.mul(beta_t, ext.conj(delta_t))), ctx.one(), ctx.neg(delta_t))?;
    let circle: Vec<_> = ext.circle_members().into_iter().map(ProjPoint::Finite).collect();
    let line = projective_line(&ext.subfield());
    if is_bijection_on(&m, ctx, &line, &circle)?.is_err() {
        return Err(PolyError::NotABijection);
    }
    Ok(m)
}

/// Homogenized substitution: F(L/M)·M^k with k = deg F.
fn substitute(
    f: &RationalFunction,
    m: &MobiusMap,
    ctx: &FieldCtx,
) -> Result<(SparsePolynomial, SparsePolynomial), PolyError> {
    let k = f.degree() as u32;
    let l = SparsePolynomial::from_dense(ctx, &[m.b, m.a]);
    let d = SparsePolynomial::from_dense(ctx, &[m.d, m.c]);
    let mut lp = vec![SparsePolynomial::constant(ctx, ctx.one())];
    let mut dp = vec![SparsePolynomial::constant(ctx, ctx.one())];
    for i in 0..k as usize {
        lp.push(lp[i].mul(&l, ctx)?);
        dp.push(dp[i].mul(&d, ctx)?);
    }
    let hom = |p: &SparsePolynomial| -> Result<SparsePolynomial, PolyError> {
        let mut out = SparsePolynomial::zero(ctx);
        for (e, c) in p.terms() {
            let t = lp[e as usize].mul(&dp[(k as u64 - e) as usize], ctx)?;
            out = out.add(&t.scale(ctx, c), ctx)?;
        }
        Ok(out)
    };
    Ok((hom(f.num())?, hom(f.den())?))
}

/// ν ∘ f ∘ ρ as a gcd-reduced rational function with monic denominator.
pub fn compose_nfr(
    nu: &MobiusMap,
    f: &RationalFunction,
    rho: &MobiusMap,
    ctx: &FieldCtx,
) -> Result<RationalFunction, PolyError> {
    let (a, b) = substitute(f, rho, ctx)?;
    // ν(A/B) = (ν.a A + ν.b B) / (ν.c A + ν.d B)
    let num = a.scale(ctx, nu.a).add(&b.scale(ctx, nu.b), ctx)?;
    let den = a.scale(ctx, nu.c).add(&b.scale(ctx, nu.d), ctx)?;
    RationalFunction::new(num, den)?.reduced(ctx)
}

/// Why a map failed to be a bijection between two finite sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BijectionWitness {
    /// Two domain points with the same image.
    Collision(ProjPoint, ProjPoint),
    /// A domain point whose image lies outside the codomain.
    OffCodomain(ProjPoint, ProjPoint),
}

/// `Ok(Ok(()))` when `map` is a bijection domain → codomain, otherwise the
/// first witness in domain order.
pub fn is_bijection_on(
    map: &dyn ProjMap,
    ctx: &FieldCtx,
    domain: &[ProjPoint],
    codomain: &[ProjPoint],
) -> Result<Result<(), BijectionWitness>, PolyError> {
    if domain.len() != codomain.len() {
        return Err(PolyError::SizeMismatch { domain: domain.len(), codomain: codomain.len() });
    }
    let mut hit: HashMap<ProjPoint, Option<ProjPoint>> = codomain.iter().map(|&y| (y, None)).collect();
    for &x in domain {
        let y = map.eval_proj(ctx, x)?;
        match hit.get_mut(&y) {
            None => return Ok(Err(BijectionWitness::OffCodomain(x, y))),
            Some(Some(prev)) => return Ok(Err(BijectionWitness::Collision(*prev, x))),
            Some(slot) => *slot = Some(x),
        }
    }
    Ok(Ok(()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(ctx: &FieldCtx, s: &str) -> SparsePolynomial {
        SparsePolynomial::parse(ctx, s).unwrap()
    }

    #[test]
    fn rho_and_nu_at_q5() {
        let ext = QuadExtension::canonical(5, 1).unwrap();
        let ctx = ext.big();
        let g = ctx.generator();
        let minus_one = ctx.from_int(-1);
        let rho = rho_map(&ext, minus_one, g).unwrap();
        assert_eq!(rho.eval_proj(ctx, ProjPoint::Finite(minus_one)).unwrap(), ProjPoint::Infinity);

        // independent image scan
        let mut image: Vec<_> =
            ext.circle_members().into_iter().map(|z| rho.eval_proj(ctx, ProjPoint::Finite(z)).unwrap()).collect();
        image.sort();
        let mut line = projective_line(&ext.subfield());
        line.sort();
        assert_eq!(image, line);

        let nu = nu_map(&ext, ctx.one(), g).unwrap();
        assert_eq!(nu.eval_proj(ctx, ProjPoint::Infinity).unwrap(), ProjPoint::Finite(ctx.one()));
        assert_eq!(rho_map(&ext, ctx.from_int(2), g), Err(PolyError::BetaNotOnCircle));
        assert_eq!(nu_map(&ext, ctx.from_int(2), g), Err(PolyError::BetaNotOnCircle));
        assert_eq!(rho_map(&ext, ctx.one(), ctx.from_int(2)), Err(PolyError::DeltaInSubfield));
    }

    #[test]
    fn infinity_cases() {
        let ctx = FieldCtx::canonical(5, 1).unwrap();
        let one = SparsePolynomial::constant(&ctx, ctx.one());
        let cube = RationalFunction::new(poly(&ctx, "X^3"), one).unwrap();
        assert_eq!(cube.eval_proj(&ctx, ProjPoint::Infinity).unwrap(), ProjPoint::Infinity);
        let quartic = RationalFunction::new(poly(&ctx, "X^4 + 3*X^2 + 2*X + 1"), poly(&ctx, "X^3 + 2*X + 4")).unwrap();
        assert_eq!(quartic.eval_proj(&ctx, ProjPoint::Infinity).unwrap(), ProjPoint::Infinity);
        let unreduced = RationalFunction::new(poly(&ctx, "X^2 + 4"), poly(&ctx, "X + 4")).unwrap();
        assert!(matches!(
            unreduced.eval_proj(&ctx, ProjPoint::Finite(ctx.one())),
            Err(PolyError::IndeterminateForm(_))
        ));
        let r = unreduced.reduced(&ctx).unwrap();
        assert_eq!(r.eval_proj(&ctx, ProjPoint::Finite(ctx.one())).unwrap(), ProjPoint::Finite(ctx.from_int(2)));
    }

    #[test]
    fn small_bijections() {
        let gf4 = FieldCtx::canonical(2, 2).unwrap();
        let sq = RationalFunction::polynomial(&gf4, poly(&gf4, "X^2"));
        let line = projective_line(&gf4.as_subfield());
        assert_eq!(is_bijection_on(&sq, &gf4, &line, &line).unwrap(), Ok(()));

        let gf3 = FieldCtx::canonical(3, 1).unwrap();
        let sq = RationalFunction::polynomial(&gf3, poly(&gf3, "X^2"));
        let line = projective_line(&gf3.as_subfield());
        assert_eq!(
            is_bijection_on(&sq, &gf3, &line, &line).unwrap(),
            Err(BijectionWitness::Collision(ProjPoint::Finite(gf3.one()), ProjPoint::Finite(gf3.from_int(2))))
        );

        let gf5 = FieldCtx::canonical(5, 1).unwrap();
        let cube = RationalFunction::polynomial(&gf5, poly(&gf5, "X^3"));
        let line = projective_line(&gf5.as_subfield());
        assert_eq!(is_bijection_on(&cube, &gf5, &line, &line).unwrap(), Ok(()));
        assert!(matches!(is_bijection_on(&cube, &gf5, &line, &line[1..]), Err(PolyError::SizeMismatch { .. })));
    }

    #[test]
    fn x3_minus_alpha_x_over_gf9() {
        let ctx = FieldCtx::canonical(3, 2).unwrap();
        let alpha = ctx.generator();
        assert!(!ctx.is_square(alpha).unwrap());
        let f = SparsePolynomial::from_terms(&ctx, [(3, ctx.one()), (1, ctx.neg(alpha))]);
        let f = RationalFunction::polynomial(&ctx, f);
        let line = projective_line(&ctx.as_subfield());
        assert_eq!(line.len(), 10);
        assert_eq!(is_bijection_on(&f, &ctx, &line, &line).unwrap(), Ok(()));
    }

    #[test]
    fn composition_matches_pointwise() {
        let ext = QuadExtension::canonical(5, 1).unwrap();
        let ctx = ext.big();
        let g = ctx.generator();
        let rho = rho_map(&ext, ctx.from_int(-1), g).unwrap();
        let nu = nu_map(&ext, ctx.one(), g).unwrap();
        let f = RationalFunction::polynomial(ctx, poly(ctx, "X^3"));
        let c = compose_nfr(&nu, &f, &rho, ctx).unwrap();
        let circle: Vec<_> = ext.circle_members().into_iter().map(ProjPoint::Finite).collect();
        for &z in &circle {
            let nested = nu.eval_proj(ctx, f.eval_proj(ctx, rho.eval_proj(ctx, z).unwrap()).unwrap()).unwrap();
            assert_eq!(c.eval_proj(ctx, z).unwrap(), nested);
        }
        assert_eq!(is_bijection_on(&c, ctx, &circle, &circle).unwrap(), Ok(()));

        let id = RationalFunction::polynomial(ctx, SparsePolynomial::x(ctx));
        let lin = compose_nfr(&nu, &id, &rho, ctx).unwrap();
        assert_eq!(lin.degree(), 1);
    }
}
