//! Sparse univariate polynomials over a [`FieldCtx`].

use std::collections::BTreeMap;
use std::fmt;

use crate::field::{CtxId, FieldCtx, FieldElement, FieldError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomials or elements belong to different fields")]
    CtxMismatch,
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("0/0 at {0}: the rational function is not reduced")]
    IndeterminateForm(String),
    #[error("domain has {domain} points but codomain has {codomain}")]
    SizeMismatch { domain: usize, codomain: usize },
    #[error("beta is not on the unit circle")]
    BetaNotOnCircle,
    #[error("delta lies in the subfield GF(q)")]
    DeltaInSubfield,
    #[error("denominator is the zero polynomial")]
    ZeroDenominator,
    #[error("degree-one map has ad - bc = 0")]
    DegenerateMobius,
    #[error("degree-one map failed its bijection check")]
    NotABijection,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Finitely many (exponent, nonzero coefficient) pairs.
///
/// Exponents are kept exactly as given; folding them modulo q^2 - 1 only
/// happens through [`SparsePolynomial::reduce_exponents`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SparsePolynomial {
    ctx: CtxId,
    terms: BTreeMap<u64, FieldElement>,
}

impl SparsePolynomial {
    pub fn zero(ctx: &FieldCtx) -> Self {
        SparsePolynomial { ctx: ctx.id(), terms: BTreeMap::new() }
    }

    pub fn constant(ctx: &FieldCtx, c: FieldElement) -> Self {
        Self::monomial(ctx, c, 0)
    }

    /// X.
    pub fn x(ctx: &FieldCtx) -> Self {
        Self::monomial(ctx, ctx.one(), 1)
    }

    pub fn monomial(ctx: &FieldCtx, c: FieldElement, e: u64) -> Self {
        Self::from_terms(ctx, [(e, c)])
    }

    /// Sums like terms and drops zero coefficients.
    pub fn from_terms(ctx: &FieldCtx, terms: impl IntoIterator<Item = (u64, FieldElement)>) -> Self {
        let mut out = Self::zero(ctx);
        for (e, c) in terms {
            debug_assert!(ctx.contains(c));
            out.add_term(ctx, e, c);
        }
        out
    }

    /// Dense coefficients, least-degree-first.
    pub fn from_dense(ctx: &FieldCtx, coeffs: &[FieldElement]) -> Self {
        Self::from_terms(ctx, coeffs.iter().enumerate().map(|(e, &c)| (e as u64, c)))
    }

    fn add_term(&mut self, ctx: &FieldCtx, e: u64, c: FieldElement) {
        if c.is_zero() {
            return;
        }
        let sum = match self.terms.get(&e) {
            Some(&old) => ctx.add(old, c),
            None => c,
        };
        if sum.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, sum);
        }
    }

    pub fn ctx_id(&self) -> CtxId {
        self.ctx
    }

    fn same(&self, ctx: &FieldCtx) -> Result<(), PolyError> {
        if self.ctx == ctx.id() {
            Ok(())
        } else {
            Err(PolyError::CtxMismatch)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading_coeff(&self) -> Option<FieldElement> {
        self.terms.values().next_back().copied()
    }

    pub fn coeff(&self, e: u64) -> Option<FieldElement> {
        self.terms.get(&e).copied()
    }

    /// Terms by descending exponent.
    pub fn terms(&self) -> impl Iterator<Item = (u64, FieldElement)> + '_ {
        self.terms.iter().rev().map(|(&e, &c)| (e, c))
    }

    /// Exponents, ascending.
    pub fn support(&self) -> Vec<u64> {
        self.terms.keys().copied().collect()
    }

    pub fn add(&self, other: &Self, ctx: &FieldCtx) -> Result<Self, PolyError> {
        self.same(ctx)?;
        other.same(ctx)?;
        let mut out = self.clone();
        for (&e, &c) in &other.terms {
            out.add_term(ctx, e, c);
        }
        Ok(out)
    }

    pub fn neg(&self, ctx: &FieldCtx) -> Self {
        SparsePolynomial { ctx: self.ctx, terms: self.terms.iter().map(|(&e, &c)| (e, ctx.neg(c))).collect() }
    }

    pub fn sub(&self, other: &Self, ctx: &FieldCtx) -> Result<Self, PolyError> {
        self.add(&other.neg(ctx), ctx)
    }

    pub fn scale(&self, ctx: &FieldCtx, c: FieldElement) -> Self {
        Self::from_terms(ctx, self.terms.iter().map(|(&e, &a)| (e, ctx.mul(a, c))))
    }

    pub fn mul(&self, other: &Self, ctx: &FieldCtx) -> Result<Self, PolyError> {
        self.same(ctx)?;
        other.same(ctx)?;
        let mut out = Self::zero(ctx);
        for (&e1, &c1) in &self.terms {
            for (&e2, &c2) in &other.terms {
                out.add_term(ctx, e1 + e2, ctx.mul(c1, c2));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, ctx: &FieldCtx, mut k: u32) -> Result<Self, PolyError> {
        let mut result = Self::constant(ctx, ctx.one());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base, ctx)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, ctx)?;
            }
        }
        Ok(result)
    }

    /// Applies `f` to every coefficient (e.g. a Frobenius twist).
    pub fn map_coeffs(&self, ctx: &FieldCtx, f: impl Fn(FieldElement) -> FieldElement) -> Self {
        Self::from_terms(ctx, self.terms.iter().map(|(&e, &c)| (e, f(c))))
    }

    pub fn eval(&self, ctx: &FieldCtx, x: FieldElement) -> Result<FieldElement, PolyError> {
        self.same(ctx)?;
        ctx.check(x)?;
        Ok(self.terms.iter().fold(ctx.zero(), |acc, (&e, &c)| ctx.add(acc, ctx.mul(c, ctx.pow(x, e)))))
    }

    /// Maps every exponent e >= 1 to ((e - 1) mod (p^n - 1)) + 1 and keeps
    /// e = 0; the induced function on the field is unchanged.
    pub fn reduce_exponents(&self, ctx: &FieldCtx) -> Self {
        let m = ctx.group_order();
        Self::from_terms(ctx, self.terms.iter().map(|(&e, &c)| (reduce_exponent(e, m), c)))
    }

    /// self(inner(X)).
    pub fn compose(&self, inner: &Self, ctx: &FieldCtx) -> Result<Self, PolyError> {
        self.same(ctx)?;
        inner.same(ctx)?;
        let mut out = Self::zero(ctx);
        let mut prev = 0u64;
        let mut power = Self::constant(ctx, ctx.one());
        for (&e, &c) in &self.terms {
            power = power.mul(&inner.pow(ctx, (e - prev) as u32)?, ctx)?;
            prev = e;
            out = out.add(&power.scale(ctx, c), ctx)?;
        }
        Ok(out)
    }

    fn to_dense(&self, ctx: &FieldCtx) -> Vec<FieldElement> {
        let n = self.degree().map_or(0, |d| d as usize + 1);
        let mut v = vec![ctx.zero(); n];
        for (&e, &c) in &self.terms {
            v[e as usize] = c;
        }
        v
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, divisor: &Self, ctx: &FieldCtx) -> Result<(Self, Self), PolyError> {
        self.same(ctx)?;
        divisor.same(ctx)?;
        let dd = divisor.degree().ok_or(PolyError::DivisionByZero)? as usize;
        let lead_inv = ctx.inv(divisor.leading_coeff().expect("nonzero"))?;
        let dv = divisor.to_dense(ctx);
        let mut r = self.to_dense(ctx);
        let mut qt = vec![ctx.zero(); r.len().saturating_sub(dd)];
        for i in (dd..r.len()).rev() {
            let c = ctx.mul(r[i], lead_inv);
            if c.is_zero() {
                continue;
            }
            qt[i - dd] = c;
            for (j, &d) in dv.iter().enumerate() {
                r[i - dd + j] = ctx.sub(r[i - dd + j], ctx.mul(c, d));
            }
        }
        Ok((Self::from_dense(ctx, &qt), Self::from_dense(ctx, &r)))
    }

    /// Scales to a monic polynomial; zero stays zero.
    pub fn monic(&self, ctx: &FieldCtx) -> Self {
        match self.leading_coeff() {
            None => self.clone(),
            Some(c) => self.scale(ctx, ctx.inv(c).expect("nonzero")),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self, ctx: &FieldCtx) -> Result<Self, PolyError> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b, ctx)?;
            a = b;
            b = r;
        }
        Ok(a.monic(ctx))
    }

    /// Human-readable form with coefficients as powers of g.
    pub fn display(&self, ctx: &FieldCtx) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.terms()
            .map(|(e, c)| {
                let c = ctx.display(c);
                match e {
                    0 => c,
                    1 => format!("{c}*X"),
                    _ => format!("{c}*X^{e}"),
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    /// Parses `term (+ term)*` with `term := [coef '*'] 'X' ['^' e] | coef`,
    /// coefficients in any form accepted by [`FieldCtx::parse`].
    pub fn parse(ctx: &FieldCtx, s: &str) -> Result<Self, PolyError> {
        let mut terms = Vec::new();
        for raw in s.split('+') {
            let t = raw.trim();
            if t.is_empty() {
                return Err(FieldError::Parse(s.to_string()).into());
            }
            let (coef, mono) = match t.rfind('X') {
                None => (Some(t), None),
                Some(i) => {
                    let head = t[..i].trim().trim_end_matches('*').trim();
                    (if head.is_empty() { None } else { Some(head) }, Some(&t[i + 1..]))
                }
            };
            let c = match coef {
                Some(c) => ctx.parse(c)?,
                None => ctx.one(),
            };
            let e = match mono {
                None => 0,
                Some(rest) => {
                    let rest = rest.trim();
                    if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|x| x.trim().trim_matches(|c| c == '{' || c == '}').parse().ok())
                            .ok_or_else(|| FieldError::Parse(s.to_string()))?
                    }
                }
            };
            terms.push((e, c));
        }
        Ok(Self::from_terms(ctx, terms))
    }
}

/// ((e - 1) mod m) + 1 for e >= 1, and 0 for e = 0.
pub fn reduce_exponent(e: u64, m: u64) -> u64 {
    if e == 0 {
        0
    } else {
        (e - 1) % m + 1
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms().map(|(e, c)| format!("[{}]X^{e}", c.repr())).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gcd_is_monic() {
        let ctx = FieldCtx::canonical(5, 1).unwrap();
        let a = SparsePolynomial::from_terms(&ctx, [(2, ctx.one()), (0, ctx.from_int(-1))]);
        let b = SparsePolynomial::from_terms(&ctx, [(1, ctx.from_int(2)), (0, ctx.from_int(-2))]);
        let g = a.gcd(&b, &ctx).unwrap();
        assert_eq!(g, SparsePolynomial::from_terms(&ctx, [(1, ctx.one()), (0, ctx.from_int(-1))]));
    }

    #[test]
    fn no_constant_term_vanishes_at_zero() {
        let ctx = FieldCtx::canonical(5, 2).unwrap();
        let f = SparsePolynomial::parse(&ctx, "g^3*X^15 + g*X^11 + X^7 + 2*X^3").unwrap();
        assert_eq!(f.eval(&ctx, ctx.zero()).unwrap(), ctx.zero());
    }

    #[test]
    fn reduce_x49_over_gf16() {
        let ctx = FieldCtx::canonical(2, 4).unwrap();
        let f = SparsePolynomial::monomial(&ctx, ctx.one(), 49);
        assert_eq!(f.reduce_exponents(&ctx), SparsePolynomial::monomial(&ctx, ctx.one(), 4));
        // X^15 stays X^15, not X^0
        let g = SparsePolynomial::monomial(&ctx, ctx.one(), 30);
        assert_eq!(g.reduce_exponents(&ctx).support(), vec![15]);
    }

    #[test]
    fn compose_and_div_rem() {
        let ctx = FieldCtx::canonical(3, 2).unwrap();
        let g = ctx.generator();
        let f = SparsePolynomial::parse(&ctx, "X^3 + g*X + 1").unwrap();
        let inner = SparsePolynomial::parse(&ctx, "X^2 + g^5").unwrap();
        let comp = f.compose(&inner, &ctx).unwrap();
        for x in ctx.elements() {
            let expect = f.eval(&ctx, inner.eval(&ctx, x).unwrap()).unwrap();
            assert_eq!(comp.eval(&ctx, x).unwrap(), expect);
        }
        let (q, r) = comp.div_rem(&inner, &ctx).unwrap();
        let back = q.mul(&inner, &ctx).unwrap().add(&r, &ctx).unwrap();
        assert_eq!(back, comp);
        assert!(r.degree().unwrap_or(0) < 2);
        let _ = g;
    }

    #[test]
    fn mismatched_contexts() {
        let a = FieldCtx::canonical(3, 2).unwrap();
        let b = FieldCtx::canonical(5, 1).unwrap();
        let pa = SparsePolynomial::x(&a);
        let pb = SparsePolynomial::x(&b);
        assert_eq!(pa.add(&pb, &a), Err(PolyError::CtxMismatch));
    }

    #[test]
    fn parse_forms() {
        let ctx = FieldCtx::canonical(2, 4).unwrap();
        let f = SparsePolynomial::parse(&ctx, "X^3").unwrap();
        assert_eq!(f.support(), vec![3]);
        let f = SparsePolynomial::parse(&ctx, "g^2*X^4 + [1,1]*X + 1").unwrap();
        assert_eq!(f.support(), vec![0, 1, 4]);
        assert_eq!(f.coeff(4), Some(ctx.gen_pow(2)));
        assert!(SparsePolynomial::parse(&ctx, "X^ + 1").is_err());
    }
}
