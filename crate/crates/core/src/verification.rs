//! Permutation tests: exhaustive evaluation and the multiplicative criterion.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::constructions::{coeffs, expand, h_variants, ConstructionError, ConstructionParams};
use crate::field::{FieldCtx, FieldElement, QuadExtension};
use crate::poly::SparsePolynomial;

/// Largest field order scanned exhaustively unless overridden.
pub const DEFAULT_CAP: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exhaustive,
    Criterion,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    /// x1 ≠ x2 with f(x1) = f(x2), x1 first in enumeration order.
    Collision(FieldElement, FieldElement),
    /// A zero of h on the unit circle.
    CircleRoot(FieldElement),
    /// z1 ≠ z2 on the circle with equal z^r h(z)^(q-1).
    CircleCollision(FieldElement, FieldElement),
}

impl Witness {
    pub fn elements(&self) -> Vec<FieldElement> {
        match *self {
            Witness::Collision(a, b) | Witness::CircleCollision(a, b) => vec![a, b],
            Witness::CircleRoot(z) => vec![z],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PermutationReport {
    pub is_permutation: bool,
    pub method: Method,
    pub gcd_ok: Option<bool>,
    pub circle_ok: Option<bool>,
    pub witness: Option<Witness>,
    pub ms: f64,
}

impl PermutationReport {
    /// Equality ignoring the timing.
    pub fn same_outcome(&self, other: &PermutationReport) -> bool {
        PermutationReport { ms: 0.0, ..self.clone() } == PermutationReport { ms: 0.0, ..other.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("field order {order} exceeds the cap {cap}")]
    CapExceeded { order: u64, cap: u64 },
    #[error("polynomial belongs to a different field")]
    CtxMismatch,
    #[error("criterion says {criterion} but exhaustive evaluation says {exhaustive}")]
    Disagreement { exhaustive: bool, criterion: bool },
    #[error("f is not X^r h(X^(q-1)) for the given r and h")]
    ShapeMismatch,
    #[error("exponents of f lie in several classes mod q - 1")]
    NotDecomposable,
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

fn elapsed_ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn check_input(f: &SparsePolynomial, ctx: &FieldCtx, cap: u64) -> Result<(), VerifyError> {
    if f.ctx_id() != ctx.id() {
        return Err(VerifyError::CtxMismatch);
    }
    if ctx.order() > cap {
        return Err(VerifyError::CapExceeded { order: ctx.order(), cap });
    }
    Ok(())
}

/// The element at position i of the enumeration 0, g^0, g^1, ...
fn nth_element(ctx: &FieldCtx, i: usize) -> FieldElement {
    if i == 0 {
        ctx.zero()
    } else {
        ctx.gen_pow(i as i64 - 1)
    }
}

/// First collision of the value sequence, as enumeration positions.
fn first_collision(order: usize, values: impl Iterator<Item = u32>) -> Option<(usize, usize)> {
    let mut seen = vec![u32::MAX; order];
    for (i, v) in values.enumerate() {
        let slot = &mut seen[v as usize];
        if *slot != u32::MAX {
            return Some((*slot as usize, i));
        }
        *slot = i as u32;
    }
    None
}

/// Values of f at 0, g^0, g^1, ... using the log tables.
pub(crate) fn values_fast<'a>(ctx: &'a FieldCtx, f: &SparsePolynomial) -> impl Iterator<Item = u32> + 'a {
    let n = ctx.group_order();
    let exp = ctx.exp_table();
    let constant = f.coeff(0).map_or(0, |c| c.repr());
    let mut idx: Vec<u64> = Vec::new();
    let mut step: Vec<u64> = Vec::new();
    for (e, c) in f.terms().filter(|&(e, _)| e > 0) {
        idx.push(ctx.log(c).expect("nonzero coefficient"));
        step.push(e % n);
    }
    std::iter::once(constant).chain((0..n).map(move |_| {
        let mut acc = constant;
        for (i, s) in idx.iter_mut().zip(&step) {
            acc = ctx.add_repr(acc, exp[*i as usize]);
            *i += s;
            if *i >= n {
                *i -= n;
            }
        }
        acc
    }))
}

/// Evaluates every element and reports the first collision in the order
/// 0, g^0, g^1, ...
pub fn is_permutation_exhaustive(
    f: &SparsePolynomial,
    ctx: &FieldCtx,
    cap: u64,
) -> Result<PermutationReport, VerifyError> {
    let t = Instant::now();
    check_input(f, ctx, cap)?;
    let hit = first_collision(ctx.order() as usize, values_fast(ctx, f));
    Ok(exhaustive_report(ctx, hit, t))
}

fn exhaustive_report(ctx: &FieldCtx, hit: Option<(usize, usize)>, t: Instant) -> PermutationReport {
    PermutationReport {
        is_permutation: hit.is_none(),
        method: Method::Exhaustive,
        gcd_ok: None,
        circle_ok: None,
        witness: hit.map(|(a, b)| Witness::Collision(nth_element(ctx, a), nth_element(ctx, b))),
        ms: elapsed_ms(t),
    }
}

fn pow_by_coords(ctx: &FieldCtx, x: FieldElement, mut e: u64) -> FieldElement {
    let mut acc = ctx.one();
    let mut base = x;
    while e > 0 {
        if e & 1 == 1 {
            acc = ctx.mul_by_coords(acc, base);
        }
        base = ctx.mul_by_coords(base, base);
        e >>= 1;
    }
    acc
}

/// Horner evaluation on the sparse support with coordinate arithmetic only.
pub fn eval_horner(f: &SparsePolynomial, ctx: &FieldCtx, x: FieldElement) -> FieldElement {
    let mut terms = f.terms().peekable();
    let Some((mut prev, lead)) = terms.next() else {
        return ctx.zero();
    };
    let mut acc = lead;
    for (e, c) in terms {
        acc = ctx.add(ctx.mul_by_coords(acc, pow_by_coords(ctx, x, prev - e)), c);
        prev = e;
    }
    ctx.mul_by_coords(acc, pow_by_coords(ctx, x, prev))
}

/// Same contract as [`is_permutation_exhaustive`] without the log tables.
pub fn is_permutation_exhaustive_reference(
    f: &SparsePolynomial,
    ctx: &FieldCtx,
    cap: u64,
) -> Result<PermutationReport, VerifyError> {
    let t = Instant::now();
    check_input(f, ctx, cap)?;
    let values = ctx.elements().map(|x| eval_horner(f, ctx, x).repr());
    let hit = first_collision(ctx.order() as usize, values);
    Ok(exhaustive_report(ctx, hit, t))
}

/// h at every member of μ_{q+1}, in [`QuadExtension::circle_members`] order.
pub fn circle_values(h: &SparsePolynomial, ext: &QuadExtension) -> Vec<FieldElement> {
    let ctx = ext.big();
    let q = ext.q();
    let n = ctx.group_order();
    let exp = ctx.exp_table();
    let constant = h.coeff(0).map_or(0, |c| c.repr());
    let terms: Vec<(u64, u64)> =
        h.terms().filter(|&(e, _)| e > 0).map(|(e, c)| (e % n, ctx.log(c).expect("nonzero"))).collect();
    (0..=q)
        .map(|k| {
            let zl = k * (q - 1);
            let v =
                terms.iter().fold(constant, |acc, &(e, lc)| ctx.add_repr(acc, exp[((lc + zl * e % n) % n) as usize]));
            ctx.from_repr(v).expect("in range")
        })
        .collect()
}

/// The first zero of h among the circle members, if any.
pub fn h_no_circle_root(h: &SparsePolynomial, ext: &QuadExtension) -> (bool, Option<FieldElement>) {
    let root = ext.circle_members().into_iter().zip(circle_values(h, ext)).find(|(_, v)| v.is_zero()).map(|(z, _)| z);
    (root.is_none(), root)
}

/// gcd(r, q-1) = 1 and z ↦ z^r h(z)^(q-1) injective on μ_{q+1}.
pub fn criterion_check(r: u64, h: &SparsePolynomial, ext: &QuadExtension) -> PermutationReport {
    let t = Instant::now();
    let ctx = ext.big();
    let q = ext.q();
    let n = ctx.group_order();
    let gcd_ok = gcd(r, q - 1) == 1;
    let terms: Vec<(u64, u64)> = h.terms().map(|(e, c)| (e % n, ctx.log(c).expect("nonzero"))).collect();
    let exp = ctx.exp_table();
    // circle member k is g^(k(q-1)); its image has log (q-1)(kr + log h(z))
    let mut seen = vec![u32::MAX; q as usize + 1];
    let mut witness = None;
    for k in 0..=q {
        let zl = k * (q - 1) % n;
        let mut acc = 0u32;
        for &(e, lc) in &terms {
            acc = ctx.add_repr(acc, exp[((lc + zl * e % n) % n) as usize]);
        }
        if acc == 0 {
            witness = Some(Witness::CircleRoot(ctx.gen_pow(zl as i64)));
            break;
        }
        let hl = ctx.log(ctx.from_repr(acc).expect("in range")).expect("nonzero");
        let img = ((k * (r % (q + 1)) + hl) % (q + 1)) as usize;
        if seen[img] != u32::MAX {
            let first = seen[img] as u64 * (q - 1);
            witness = Some(Witness::CircleCollision(ctx.gen_pow(first as i64), ctx.gen_pow(zl as i64)));
            break;
        }
        seen[img] = k as u32;
    }
    let circle_ok = witness.is_none();
    PermutationReport {
        is_permutation: gcd_ok && circle_ok,
        method: Method::Criterion,
        gcd_ok: Some(gcd_ok),
        circle_ok: Some(circle_ok),
        witness,
        ms: elapsed_ms(t),
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Runs both methods on f = X^r h(X^(q-1)); a disagreement is an error.
pub fn verify_both(
    f: &SparsePolynomial,
    r: u64,
    h: &SparsePolynomial,
    ext: &QuadExtension,
    cap: u64,
) -> Result<PermutationReport, VerifyError> {
    let t = Instant::now();
    let ctx = ext.big();
    if expand(ext, r, h) != f.reduce_exponents(ctx) {
        return Err(VerifyError::ShapeMismatch);
    }
    let ex = is_permutation_exhaustive(f, ctx, cap)?;
    let cr = criterion_check(r, h, ext);
    if ex.is_permutation != cr.is_permutation {
        return Err(VerifyError::Disagreement { exhaustive: ex.is_permutation, criterion: cr.is_permutation });
    }
    Ok(PermutationReport {
        is_permutation: ex.is_permutation,
        method: Method::Both,
        gcd_ok: cr.gcd_ok,
        circle_ok: cr.circle_ok,
        witness: ex.witness,
        ms: elapsed_ms(t),
    })
}

/// Decomposes an arbitrary polynomial, then runs both methods.
pub fn verify_polynomial(
    f: &SparsePolynomial,
    ext: &QuadExtension,
    cap: u64,
) -> Result<PermutationReport, VerifyError> {
    match decompose(f, ext) {
        Decomposition::Decomposed { r, h } => verify_both(f, r, &h, ext, cap),
        Decomposition::NotDecomposable => Err(VerifyError::NotDecomposable),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decomposition {
    Decomposed { r: u64, h: SparsePolynomial },
    NotDecomposable,
}

/// Writes f = X^r h(X^(q-1)) with r the smallest exponent of f.
pub fn decompose(f: &SparsePolynomial, ext: &QuadExtension) -> Decomposition {
    let s = ext.q() - 1;
    let Some(&r) = f.support().first() else {
        return Decomposition::NotDecomposable;
    };
    if f.support().iter().any(|&e| (e - r) % s != 0) {
        return Decomposition::NotDecomposable;
    }
    let h = SparsePolynomial::from_terms(ext.big(), f.terms().map(|(e, c)| ((e - r) / s, c)));
    Decomposition::Decomposed { r, h }
}

/// Root-absence verdict on μ_{q+1} for h and each of its conjugates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HEquivalence {
    /// (name, first circle root) per variant.
    pub verdicts: Vec<(String, Option<FieldElement>)>,
}

impl HEquivalence {
    /// All variants agree on whether a circle root exists.
    pub fn consistent(&self) -> bool {
        self.verdicts.windows(2).all(|w| w[0].1.is_some() == w[1].1.is_some())
    }

    pub fn all_rootless(&self) -> bool {
        self.verdicts.iter().all(|(_, r)| r.is_none())
    }
}

pub fn h_family_equivalence(ext: &QuadExtension, params: &ConstructionParams) -> Result<HEquivalence, VerifyError> {
    let sys = coeffs(ext, params)?;
    let verdicts = h_variants(ext, &sys).into_iter().map(|(name, h)| (name, h_no_circle_root(&h, ext).1)).collect();
    Ok(HEquivalence { verdicts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_family, FamilyId};

    fn poly(ctx: &FieldCtx, s: &str) -> SparsePolynomial {
        SparsePolynomial::parse(ctx, s).unwrap()
    }

    #[test]
    fn x_squared_over_gf5() {
        let ctx = FieldCtx::canonical(5, 1).unwrap();
        let rep = is_permutation_exhaustive(&poly(&ctx, "X^2"), &ctx, DEFAULT_CAP).unwrap();
        assert!(!rep.is_permutation);
        assert_eq!(rep.witness, Some(Witness::Collision(ctx.one(), ctx.from_int(4))));
        let slow = is_permutation_exhaustive_reference(&poly(&ctx, "X^2"), &ctx, DEFAULT_CAP).unwrap();
        assert!(rep.same_outcome(&slow));
    }

    #[test]
    fn monomials_over_gf7() {
        let ctx = FieldCtx::canonical(7, 1).unwrap();
        let perms: Vec<u64> = (1..=6)
            .filter(|&n| {
                let f = SparsePolynomial::monomial(&ctx, ctx.one(), n);
                is_permutation_exhaustive(&f, &ctx, DEFAULT_CAP).unwrap().is_permutation
            })
            .collect();
        assert_eq!(perms, vec![1, 5]);
    }

    #[test]
    fn cap_is_enforced() {
        let ctx = FieldCtx::canonical(2, 8).unwrap();
        let f = SparsePolynomial::x(&ctx);
        assert_eq!(is_permutation_exhaustive(&f, &ctx, 100), Err(VerifyError::CapExceeded { order: 256, cap: 100 }));
    }

    #[test]
    fn circle_values_match_direct_evaluation() {
        let ext = QuadExtension::canonical(3, 2).unwrap();
        let ctx = ext.big();
        let h = poly(ctx, "g^7*X^30 + X^4 + g^3*X + 2");
        let direct: Vec<_> = ext.circle_members().into_iter().map(|z| h.eval(ctx, z).unwrap()).collect();
        assert_eq!(circle_values(&h, &ext), direct);
    }

    #[test]
    fn criterion_basics() {
        let ext = QuadExtension::canonical(5, 1).unwrap();
        let ctx = ext.big();
        let one = SparsePolynomial::constant(ctx, ctx.one());
        assert_eq!(h_no_circle_root(&one, &ext), (true, None));
        let lin = poly(ctx, "X + 4");
        assert_eq!(h_no_circle_root(&lin, &ext), (false, Some(ctx.one())));
        let rep = criterion_check(2, &one, &ext);
        assert_eq!(rep.gcd_ok, Some(false));
        assert!(!rep.is_permutation);
        let rep = criterion_check(5, &one, &ext);
        assert!(rep.is_permutation);
        let rep = criterion_check(3, &one, &ext);
        assert_eq!(rep.gcd_ok, Some(true));
        assert!(matches!(rep.witness, Some(Witness::CircleCollision(..))));
    }

    #[test]
    fn q1_at_q5_both_ways() {
        let ext = QuadExtension::canonical(5, 1).unwrap();
        let ctx = ext.big();
        let g = ctx.generator();
        let params = ConstructionParams {
            family: FamilyId::Q1,
            beta: ctx.from_int(-1),
            beta_t: ctx.one(),
            delta: g,
            delta_t: g,
            aux: None,
        };
        let c = build_family(&ext, &params).unwrap();
        let rep = verify_both(&c.poly, c.r, &c.h, &ext, DEFAULT_CAP).unwrap();
        assert!(rep.is_permutation);
        assert_eq!(rep.method, Method::Both);
        let eq = h_family_equivalence(&ext, &params).unwrap();
        assert_eq!(eq.verdicts.len(), 4);
        assert!(eq.all_rootless());
        assert_eq!(decompose(&c.poly, &ext), Decomposition::Decomposed { r: 3, h: c.h.clone() });
    }

    #[test]
    fn not_decomposable() {
        let ext = QuadExtension::canonical(5, 1).unwrap();
        let f = poly(ext.big(), "X^2 + X");
        assert_eq!(decompose(&f, &ext), Decomposition::NotDecomposable);
    }

    #[test]
    fn reference_and_fast_agree_on_small_field() {
        let ctx = FieldCtx::canonical(3, 2).unwrap();
        for s in ["X^3 + g*X", "X^5", "g^2*X^7 + X^3 + 1", "X^8 + X^4 + X^2"] {
            let f = poly(&ctx, s);
            let a = is_permutation_exhaustive(&f, &ctx, DEFAULT_CAP).unwrap();
            let b = is_permutation_exhaustive_reference(&f, &ctx, DEFAULT_CAP).unwrap();
            assert!(a.same_outcome(&b), "{s}");
        }
    }
}
