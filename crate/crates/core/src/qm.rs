//! Quasi-multiplicative equivalence: f(X) = u·g(v X^d) with u, v ≠ 0 and
//! gcd(d, q^2 - 1) = 1.

use std::cmp::Ordering;

use crate::field::{FieldCtx, FieldElement, QuadExtension};
use crate::poly::{reduce_exponent, SparsePolynomial};
use crate::verification::values_fast;

/// Largest q^2 searched unless overridden.
pub const DEFAULT_QM_CAP: u64 = 1 << 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QmError {
    #[error("q^2 = {order} exceeds the search cap {cap}")]
    CapExceeded { order: u64, cap: u64 },
    #[error("polynomial belongs to a different field")]
    CtxMismatch,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("family {0} has no closed-form conditions to instantiate")]
    NotInstantiable(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QmWitness {
    pub u: FieldElement,
    pub v: FieldElement,
    pub d: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QmResult {
    pub equivalent: bool,
    pub witness: Option<QmWitness>,
    pub d_candidates_examined: u64,
    pub prefilter_rejected: u64,
}

/// How candidate v values are produced for a surviving d.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VSearch {
    /// Solve v^(e1-e2) = ratio through discrete logs.
    Roots,
    /// Try all q^2 - 1 nonzero v.
    BruteForce,
}

#[derive(Debug, Clone, Copy)]
pub struct QmOptions {
    pub cap: u64,
    pub prefilter: bool,
    pub v_search: VSearch,
}

impl Default for QmOptions {
    fn default() -> Self {
        QmOptions { cap: DEFAULT_QM_CAP, prefilter: true, v_search: VSearch::Roots }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// u·g(v X^d) with exponents reduced.
pub fn twist(g: &SparsePolynomial, ctx: &FieldCtx, u: FieldElement, v: FieldElement, d: u64) -> SparsePolynomial {
    let n = ctx.group_order();
    SparsePolynomial::from_terms(
        ctx,
        g.terms().map(|(e, c)| {
            let e2 = if e == 0 { 0 } else { reduce_exponent(d * e, n) };
            (e2, ctx.mul(ctx.mul(u, c), ctx.pow(v, e)))
        }),
    )
}

fn prepare(
    f: &SparsePolynomial,
    g: &SparsePolynomial,
    ext: &QuadExtension,
    cap: u64,
) -> Result<(SparsePolynomial, SparsePolynomial), QmError> {
    let ctx = ext.big();
    if f.ctx_id() != ctx.id() || g.ctx_id() != ctx.id() {
        return Err(QmError::CtxMismatch);
    }
    if f.is_zero() || g.is_zero() {
        return Err(QmError::ZeroPolynomial);
    }
    if ctx.order() > cap {
        return Err(QmError::CapExceeded { order: ctx.order(), cap });
    }
    Ok((f.reduce_exponents(ctx), g.reduce_exponents(ctx)))
}

/// The d values coprime to q^2 - 1, ascending.
pub fn coprime_exponents(n: u64) -> impl Iterator<Item = u64> {
    (1..n.max(2)).filter(move |&d| gcd(d, n) == 1)
}

/// Solutions t of a·t ≡ b (mod n), ascending from the smallest.
fn solve_linear(a: u64, b: u64, n: u64) -> Vec<u64> {
    let gd = gcd(a % n, n);
    let gd = if gd == 0 { n } else { gd };
    if b % gd != 0 {
        return Vec::new();
    }
    let (a1, b1, n1) = ((a % n) / gd, b / gd, n / gd);
    let t0 = if n1 == 1 { 0 } else { b1 * mod_inverse(a1, n1) % n1 };
    (0..gd).map(|j| t0 + j * n1).collect()
}

fn mod_inverse(a: u64, n: u64) -> u64 {
    let (mut old_r, mut r) = (a as i128, n as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(n as i128) as u64
}

fn candidate_vs(
    f: &SparsePolynomial,
    g: &SparsePolynomial,
    ctx: &FieldCtx,
    d: u64,
    mode: VSearch,
) -> Vec<FieldElement> {
    let n = ctx.group_order();
    let gt: Vec<(u64, FieldElement)> = g.terms().collect();
    if mode == VSearch::BruteForce || gt.len() < 2 {
        return if gt.len() < 2 && mode == VSearch::Roots {
            vec![ctx.one()]
        } else {
            (0..n).map(|k| ctx.gen_pow(k as i64)).collect()
        };
    }
    let red = |e: u64| if e == 0 { 0 } else { reduce_exponent(d * e, n) };
    let (e1, c1) = gt[0];
    let (e2, c2) = gt[1];
    let (Some(f1), Some(f2)) = (f.coeff(red(e1)), f.coeff(red(e2))) else {
        return Vec::new();
    };
    // v^(e1 - e2) = (f1/c1) / (f2/c2)
    let ratio = ctx.div(ctx.div(f1, c1).expect("nonzero"), ctx.div(f2, c2).expect("nonzero")).expect("nonzero");
    let delta = (e1 - e2) % n;
    solve_linear(delta, ctx.log(ratio).expect("nonzero"), n).into_iter().map(|t| ctx.gen_pow(t as i64)).collect()
}

fn exponent_image(g: &SparsePolynomial, d: u64, n: u64) -> Vec<u64> {
    let mut s: Vec<u64> = g.support().into_iter().map(|e| if e == 0 { 0 } else { reduce_exponent(d * e, n) }).collect();
    s.sort_unstable();
    s
}

fn try_d(f: &SparsePolynomial, g: &SparsePolynomial, ctx: &FieldCtx, d: u64, mode: VSearch) -> Option<QmWitness> {
    let n = ctx.group_order();
    let (e1, c1) = g.terms().next()?;
    let target = f.coeff(if e1 == 0 { 0 } else { reduce_exponent(d * e1, n) })?;
    for v in candidate_vs(f, g, ctx, d, mode) {
        let u = ctx.div(target, ctx.mul(c1, ctx.pow(v, e1))).expect("nonzero");
        if &twist(g, ctx, u, v, d) == f {
            return Some(QmWitness { u, v, d });
        }
    }
    None
}

/// Decides whether f = u·g(v X^d) for some (u, v, d).
pub fn qm_equivalent(
    f: &SparsePolynomial,
    g: &SparsePolynomial,
    ext: &QuadExtension,
    opts: QmOptions,
) -> Result<QmResult, QmError> {
    let (f, g) = prepare(f, g, ext, opts.cap)?;
    let ctx = ext.big();
    let n = ctx.group_order();
    let supp_f = f.support();
    let mut res = QmResult { equivalent: false, witness: None, d_candidates_examined: 0, prefilter_rejected: 0 };
    for d in coprime_exponents(n) {
        res.d_candidates_examined += 1;
        if opts.prefilter && exponent_image(&g, d, n) != supp_f {
            res.prefilter_rejected += 1;
            continue;
        }
        if let Some(w) = try_d(&f, &g, ctx, d, opts.v_search) {
            res.equivalent = true;
            res.witness = Some(w);
            break;
        }
    }
    Ok(res)
}

/// The same decision with no prefilter and every nonzero v.
pub fn qm_equivalent_unfiltered(
    f: &SparsePolynomial,
    g: &SparsePolynomial,
    ext: &QuadExtension,
    cap: u64,
) -> Result<QmResult, QmError> {
    qm_equivalent(f, g, ext, QmOptions { cap, prefilter: false, v_search: VSearch::BruteForce })
}

/// Literal search over every (u, v, d) comparing induced functions pointwise.
pub fn qm_functional_search(
    f: &SparsePolynomial,
    g: &SparsePolynomial,
    ext: &QuadExtension,
    cap: u64,
) -> Result<QmResult, QmError> {
    let (f, g) = prepare(f, g, ext, cap)?;
    let ctx = ext.big();
    let n = ctx.group_order();
    // values indexed by enumeration position: 0, g^0, g^1, ...
    let fv: Vec<u32> = values_fast(ctx, &f).collect();
    let gv: Vec<u32> = values_fast(ctx, &g).collect();
    let units: Vec<FieldElement> = (0..n).map(|k| ctx.gen_pow(k as i64)).collect();
    let mut res = QmResult { equivalent: false, witness: None, d_candidates_examined: 0, prefilter_rejected: 0 };
    for d in coprime_exponents(n) {
        res.d_candidates_examined += 1;
        for (lv, &v) in units.iter().enumerate() {
            // g(v x^d) at x = g^i is gv at position 1 + (lv + d i) mod n; at x = 0 it is g(0)
            let w = |i: usize| -> u32 {
                if i == 0 {
                    gv[0]
                } else {
                    gv[1 + ((lv as u64 + d * (i as u64 - 1)) % n) as usize]
                }
            };
            for &u in &units {
                let ok = (0..fv.len()).all(|i| {
                    let wi = ctx.from_repr(w(i)).expect("in range");
                    ctx.mul(u, wi).repr() == fv[i]
                });
                if ok {
                    res.equivalent = true;
                    res.witness = Some(QmWitness { u, v, d });
                    return Ok(res);
                }
            }
        }
    }
    Ok(res)
}

/// Checks a witness by re-expansion and by pointwise comparison.
pub fn verify_witness(f: &SparsePolynomial, g: &SparsePolynomial, ext: &QuadExtension, w: &QmWitness) -> bool {
    let ctx = ext.big();
    let n = ctx.group_order();
    if w.u.is_zero() || w.v.is_zero() || w.d == 0 || w.d >= n.max(2) || gcd(w.d, n) != 1 {
        return false;
    }
    let f = f.reduce_exponents(ctx);
    if twist(g, ctx, w.u, w.v, w.d) != f {
        return false;
    }
    ctx.elements().all(|x| {
        let lhs = f.eval(ctx, x).expect("same field");
        let rhs = g.eval(ctx, ctx.mul(w.v, ctx.pow(x, w.d))).expect("same field");
        lhs == ctx.mul(w.u, rhs)
    })
}

/// Degree first, then terms compared from the top.
pub fn degree_lex_cmp(a: &SparsePolynomial, b: &SparsePolynomial) -> Ordering {
    a.degree().cmp(&b.degree()).then_with(|| {
        let ka: Vec<(u64, u32)> = a.terms().map(|(e, c)| (e, c.repr())).collect();
        let kb: Vec<(u64, u32)> = b.terms().map(|(e, c)| (e, c.repr())).collect();
        ka.cmp(&kb)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    /// Class index per input polynomial.
    pub class_of: Vec<usize>,
    /// Members per class, ascending; classes ordered by representative.
    pub classes: Vec<Vec<usize>>,
    /// Index of the degree-then-lex smallest member per class.
    pub representatives: Vec<usize>,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Partitions `polys` into QM classes with union-find.
pub fn classify_catalog(
    polys: &[SparsePolynomial],
    ext: &QuadExtension,
    opts: QmOptions,
) -> Result<Classification, QmError> {
    let ctx = ext.big();
    let reduced: Vec<SparsePolynomial> = polys.iter().map(|p| p.reduce_exponents(ctx)).collect();
    let mut parent: Vec<usize> = (0..polys.len()).collect();
    for i in 0..polys.len() {
        for j in i + 1..polys.len() {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            if ri == rj {
                continue;
            }
            if qm_equivalent(&reduced[j], &reduced[i], ext, opts)?.equivalent {
                parent[rj.max(ri)] = rj.min(ri);
            }
        }
    }
    classes_from_parent(&reduced, &mut parent)
}

/// The first of `reduced[..j]` equivalent to `reduced[j]`; inputs must already
/// have reduced exponents. Independent per `j`, so callers may run it in parallel.
pub fn earlier_equivalent(
    reduced: &[SparsePolynomial],
    j: usize,
    ext: &QuadExtension,
    opts: QmOptions,
) -> Result<Option<usize>, QmError> {
    for i in 0..j {
        if qm_equivalent(&reduced[j], &reduced[i], ext, opts)?.equivalent {
            return Ok(Some(i));
        }
    }
    Ok(None)
}

/// Builds the partition from one [`earlier_equivalent`] link per polynomial.
pub fn classify_from_links(
    polys: &[SparsePolynomial],
    ext: &QuadExtension,
    links: &[Option<usize>],
) -> Result<Classification, QmError> {
    let ctx = ext.big();
    let reduced: Vec<SparsePolynomial> = polys.iter().map(|p| p.reduce_exponents(ctx)).collect();
    let mut parent: Vec<usize> = (0..polys.len()).collect();
    for (j, link) in links.iter().enumerate() {
        if let Some(i) = *link {
            let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
            parent[ri.max(rj)] = ri.min(rj);
        }
    }
    classes_from_parent(&reduced, &mut parent)
}

fn classes_from_parent(reduced: &[SparsePolynomial], parent: &mut [usize]) -> Result<Classification, QmError> {
    let n = reduced.len();
    let roots: Vec<usize> = (0..n).map(|i| find(parent, i)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = std::collections::HashMap::new();
    for (i, &r) in roots.iter().enumerate() {
        let slot = *root_slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[slot].push(i);
    }
    let rep = |g: &Vec<usize>| -> usize {
        *g.iter().min_by(|&&a, &&b| degree_lex_cmp(&reduced[a], &reduced[b]).then(a.cmp(&b))).expect("nonempty")
    };
    groups.sort_by(|a, b| degree_lex_cmp(&reduced[rep(a)], &reduced[rep(b)]).then(rep(a).cmp(&rep(b))));
    let representatives: Vec<usize> = groups.iter().map(rep).collect();
    let mut class_of = vec![0; n];
    for (k, g) in groups.iter().enumerate() {
        for &i in g {
            class_of[i] = k;
        }
    }
    Ok(Classification { class_of, classes: groups, representatives })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(ctx: &FieldCtx, s: &str) -> SparsePolynomial {
        SparsePolynomial::parse(ctx, s).unwrap()
    }

    #[test]
    fn reflexive_witness_is_identity() {
        let ext = QuadExtension::canonical(5, 1).unwrap();
        let ctx = ext.big();
        let f = poly(ctx, "g^3*X^15 + g*X^11 + X^7 + 2*X^3");
        let r = qm_equivalent(&f, &f, &ext, QmOptions::default()).unwrap();
        assert!(r.equivalent);
        assert_eq!(r.witness, Some(QmWitness { u: ctx.one(), v: ctx.one(), d: 1 }));
    }

    #[test]
    fn twisted_copy_is_found() {
        let ext = QuadExtension::canonical(5, 1).unwrap();
        let ctx = ext.big();
        let f = poly(ctx, "g^3*X^15 + g*X^11 + X^7 + 2*X^3");
        let g2 = twist(&f, ctx, ctx.from_int(2), ctx.from_int(3), 1);
        let r = qm_equivalent(&g2, &f, &ext, QmOptions::default()).unwrap();
        assert!(r.equivalent);
        assert!(verify_witness(&g2, &f, &ext, &r.witness.unwrap()));
        let cls = classify_catalog(&[f, g2], &ext, QmOptions::default()).unwrap();
        assert_eq!(cls.classes.len(), 1);
    }

    #[test]
    fn x_and_x_to_the_d_over_gf9() {
        let ext = QuadExtension::canonical(3, 1).unwrap();
        let ctx = ext.big();
        let d = (2..8).find(|&d| gcd(d, 8) == 1).unwrap();
        let x = SparsePolynomial::x(ctx);
        let xd = SparsePolynomial::monomial(ctx, ctx.one(), d);
        let cls = classify_catalog(&[x, xd], &ext, QmOptions::default()).unwrap();
        assert_eq!(cls.classes, vec![vec![0, 1]]);
        assert_eq!(cls.representatives, vec![0]);
    }

    #[test]
    fn search_modes_agree_on_gf16() {
        let ext = QuadExtension::canonical(2, 2).unwrap();
        let ctx = ext.big();
        let f = poly(ctx, "g^2*X^14 + g^7*X^11");
        let h = poly(ctx, "X^6 + g*X");
        for g in [&f, &h] {
            let a = qm_equivalent(&f, g, &ext, QmOptions::default()).unwrap().equivalent;
            let b = qm_equivalent_unfiltered(&f, g, &ext, DEFAULT_QM_CAP).unwrap().equivalent;
            let c = qm_functional_search(&f, g, &ext, DEFAULT_QM_CAP).unwrap().equivalent;
            let e = qm_equivalent(&f, g, &ext, QmOptions { v_search: VSearch::BruteForce, ..Default::default() })
                .unwrap()
                .equivalent;
            assert_eq!((a, b, c, e), (a, a, a, a));
        }
    }

    #[test]
    fn cap_and_mismatch() {
        let ext = QuadExtension::canonical(2, 7).unwrap();
        let f = SparsePolynomial::x(ext.big());
        assert!(matches!(qm_equivalent(&f, &f, &ext, QmOptions::default()), Err(QmError::CapExceeded { .. })));
        let other = QuadExtension::canonical(3, 1).unwrap();
        let g = SparsePolynomial::x(other.big());
        assert_eq!(
            qm_equivalent(&f, &g, &ext, QmOptions { cap: u64::MAX, ..Default::default() }),
            Err(QmError::CtxMismatch)
        );
    }

    #[test]
    fn links_give_the_same_partition() {
        let ext = QuadExtension::canonical(3, 1).unwrap();
        let ctx = ext.big();
        let polys: Vec<SparsePolynomial> =
            ["X^3", "g*X^3", "X^5 + X", "X", "g^2*X^7 + X^3", "g^3*X"].iter().map(|s| poly(ctx, s)).collect();
        let reduced: Vec<SparsePolynomial> = polys.iter().map(|p| p.reduce_exponents(ctx)).collect();
        let links: Vec<Option<usize>> =
            (0..polys.len()).map(|j| earlier_equivalent(&reduced, j, &ext, QmOptions::default()).unwrap()).collect();
        let a = classify_from_links(&polys, &ext, &links).unwrap();
        let b = classify_catalog(&polys, &ext, QmOptions::default()).unwrap();
        assert_eq!(a, b);
        assert!(a.classes.len() < polys.len());
    }

    #[test]
    fn linear_congruences() {
        assert_eq!(solve_linear(4, 6, 10), vec![4, 9]);
        assert_eq!(solve_linear(4, 3, 10), Vec::<u64>::new());
        assert_eq!(solve_linear(0, 0, 7), (0..7).collect::<Vec<_>>());
    }
}
