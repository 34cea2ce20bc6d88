//! A small registry of previously known few-term permutation polynomials.

use crate::field::{FieldElement, QuadExtension};
use crate::poly::SparsePolynomial;
use crate::qm::QmError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnownFamily {
    pub id: &'static str,
    /// Term template with exponents in q (or 2^n, 2^t, 2^k).
    pub template: &'static str,
    pub conditions: &'static str,
    /// False for rows whose conditions are only stated in prose elsewhere.
    pub instantiable: bool,
}

pub const REGISTRY: &[KnownFamily] = &[
    KnownFamily {
        id: "H1",
        template: "X^(q+2) + bX",
        conditions: "n = 2m, b in GF(q^2) \\ GF(q), b^(3(q-1)) = 1, m > 1 odd",
        instantiable: true,
    },
    KnownFamily {
        id: "H2",
        template: "X^((2^n-1)/(2^t-1)+1) + aX",
        conditions: "n = 2^s t, s in {1,2}, t odd, a in w GF(2^t)* or w^2 GF(2^t)*, w a primitive cube root of unity",
        instantiable: true,
    },
    KnownFamily { id: "H3", template: "X^(3q-2) + aX", conditions: "prose only", instantiable: false },
    KnownFamily {
        id: "H4",
        template: "X^(r(q-1)+1) + aX",
        conditions: "n = 2m, r in {5,7}, prose only",
        instantiable: false,
    },
    KnownFamily { id: "H5", template: "X^(2q+3) + aX", conditions: "prose only", instantiable: false },
    KnownFamily { id: "H6", template: "X^(2q+4) + aX^2", conditions: "prose only", instantiable: false },
    KnownFamily {
        id: "H7",
        template: "X^d' + aX",
        conditions: "n = rk, d' = (2^(rk)-1)/(2^k-1), gcd(d'-1, 2^k-1) = gcd(r, 2^k-1) = 1, a not in GF(2^k)*",
        // the literal template yields no permutations for q <= 32
        instantiable: false,
    },
    KnownFamily { id: "H8", template: "X^(6q-5) + aX", conditions: "prose only", instantiable: false },
    KnownFamily {
        id: "F1",
        template: "X^3 + aX^(q+2) + bX^(2q+1) + cX^(3q)",
        conditions: "p = 3, b = -a, c = a != -1, a^((q-1)/2) = 1, a in GF(q)",
        instantiable: true,
    },
    KnownFamily {
        id: "F9",
        template: "X^3 + aX^(q+2) + bX^(2q+1) + cX^(3q)",
        conditions: "p = 5, c = 4, b = a + 2, a != -1, m odd, a in GF(q)",
        instantiable: true,
    },
    KnownFamily {
        id: "F19",
        template: "X^3 + aX^(q+2) + bX^(2q+1) + cX^(3q)",
        conditions: "prose only",
        instantiable: false,
    },
    KnownFamily {
        id: "G1",
        template: "X^5 + X^(q+4) + X^(3q+2) + X^(4q+1) + X^(5q)",
        conditions: "p = 2, m != 0 mod 4",
        instantiable: true,
    },
    KnownFamily {
        id: "G34",
        template: "X^(4q) + aX^(3q+1) + bX^(2q+2) + cX^(q+3) + dX^4",
        conditions: "prose only",
        instantiable: false,
    },
];

pub fn lookup(id: &str) -> Option<&'static KnownFamily> {
    REGISTRY.iter().find(|f| f.id.eq_ignore_ascii_case(id))
}

/// One member of a known family at a concrete q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownInstance {
    pub family: &'static str,
    pub poly: SparsePolynomial,
    /// The parameter values that satisfied the conditions.
    pub note: String,
}

/// Every member of `family` valid at this q, in generator-power order of the
/// free parameter. Instances whose coefficients vanish are skipped.
pub fn instantiate_known(family: &KnownFamily, ext: &QuadExtension) -> Result<Vec<KnownInstance>, QmError> {
    if !family.instantiable {
        return Err(QmError::NotInstantiable(family.id.to_string()));
    }
    let ctx = ext.big();
    let (p, m, q) = (ext.p(), ext.m(), ext.q());
    let n = 2 * m;
    let sub = ext.subfield();
    let mk = |terms: Vec<(u64, FieldElement)>, note: String| KnownInstance {
        family: family.id,
        poly: SparsePolynomial::from_terms(ctx, terms).reduce_exponents(ctx),
        note,
    };
    let one = ctx.one();
    let mut out = Vec::new();
    match family.id {
        "H1" => {
            if p == 2 && m > 1 && m % 2 == 1 {
                for b in ext.outside_subfield() {
                    if ctx.pow(b, 3 * (q - 1)) == one {
                        out.push(mk(vec![(q + 2, one), (1, b)], format!("b = {}", ctx.display(b))));
                    }
                }
            }
        }
        "H2" => {
            if p == 2 {
                for s in [1u32, 2] {
                    let two_s = 1u32 << s;
                    if n % two_s != 0 || (n / two_s) % 2 == 0 {
                        continue;
                    }
                    let t = n / two_s;
                    let e = (ctx.order() - 1) / ((1u64 << t) - 1) + 1;
                    // w = g^((2^n-1)/3) has order 3; GF(2^t)* is generated by g^((2^n-1)/(2^t-1))
                    let w = ctx.gen_pow(((ctx.order() - 1) / 3) as i64);
                    let stride = (ctx.order() - 1) / ((1u64 << t) - 1);
                    for k in 0..(1u64 << t) - 1 {
                        let base = ctx.gen_pow((k * stride) as i64);
                        for (lbl, wk) in [("w", w), ("w^2", ctx.mul(w, w))] {
                            let a = ctx.mul(wk, base);
                            out.push(mk(
                                vec![(e, one), (1, a)],
                                format!("s = {s}, t = {t}, a = {lbl}*{}", ctx.display(base)),
                            ));
                        }
                    }
                }
            }
        }
        "F1" => {
            if p == 3 {
                for a in sub.elements().into_iter().skip(1) {
                    if a == ctx.from_int(-1) || ctx.pow(a, (q - 1) / 2) != one {
                        continue;
                    }
                    out.push(mk(
                        vec![(3, one), (q + 2, a), (2 * q + 1, ctx.neg(a)), (3 * q, a)],
                        format!("a = {}", ctx.display(a)),
                    ));
                }
            }
        }
        "F9" => {
            if p == 5 && m % 2 == 1 {
                for a in sub.elements() {
                    let b = ctx.add(a, ctx.from_int(2));
                    if a == ctx.from_int(-1) || a.is_zero() || b.is_zero() {
                        continue;
                    }
                    out.push(mk(
                        vec![(3, one), (q + 2, a), (2 * q + 1, b), (3 * q, ctx.from_int(4))],
                        format!("a = {}", ctx.display(a)),
                    ));
                }
            }
        }
        "G1" => {
            if p == 2 && m % 4 != 0 {
                let terms = [5, q + 4, 3 * q + 2, 4 * q + 1, 5 * q].into_iter().map(|e| (e, one)).collect();
                out.push(mk(terms, String::new()));
            }
        }
        _ => return Err(QmError::NotInstantiable(family.id.to_string())),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn h1_at_q32_matches_scan() {
        let ext = QuadExtension::canonical(2, 5).unwrap();
        let ctx = ext.big();
        let got = instantiate_known(lookup("H1").unwrap(), &ext).unwrap();
        let scan = ctx.elements().filter(|&b| ctx.pow(b, 32) != b && ctx.pow(b, 93) == ctx.one()).count();
        assert_eq!(got.len(), scan);
        assert!(scan > 0);
    }

    #[test]
    fn h1_at_q16_is_empty() {
        let ext = QuadExtension::canonical(2, 4).unwrap();
        assert!(instantiate_known(lookup("H1").unwrap(), &ext).unwrap().is_empty());
    }

    #[test]
    fn prose_rows_are_not_instantiable() {
        let ext = QuadExtension::canonical(2, 2).unwrap();
        assert_eq!(instantiate_known(lookup("H3").unwrap(), &ext), Err(QmError::NotInstantiable("H3".into())));
    }

    #[test]
    fn instances_over_small_fields_permute() {
        use crate::verification::{is_permutation_exhaustive, DEFAULT_CAP};
        for (p, m, ids) in [(5, 1, ["F9", "G1"]), (3, 1, ["F1", "H1"]), (2, 2, ["H2", "G1"]), (2, 3, ["G1", "H2"])] {
            let ext = QuadExtension::canonical(p, m).unwrap();
            for id in ids {
                for inst in instantiate_known(lookup(id).unwrap(), &ext).unwrap() {
                    let rep = is_permutation_exhaustive(&inst.poly, ext.big(), DEFAULT_CAP).unwrap();
                    assert!(rep.is_permutation, "{id} {} at q = {}", inst.note, ext.q());
                }
            }
        }
    }
}
