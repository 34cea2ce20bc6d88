//! Dense polynomials over the prime field Z/pZ.
//!
//! Only used while setting up a [`FieldCtx`](super::FieldCtx): irreducibility
//! testing of the modulus and the slow coordinate arithmetic needed before the
//! log tables exist. Coefficient vectors are least-degree-first and trimmed.

pub(crate) type ZpPoly = Vec<u32>;

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors, ascending.
pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub(crate) fn trim(mut a: ZpPoly) -> ZpPoly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is prime, so a^(p-2)
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

pub(crate) fn sub(a: &[u32], b: &[u32], p: u32) -> ZpPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out.push((x + p - y) % p);
    }
    trim(out)
}

pub(crate) fn mul(a: &[u32], b: &[u32], p: u32) -> ZpPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

/// Remainder of `a` modulo `m` (m nonzero).
pub(crate) fn rem(a: &[u32], m: &[u32], p: u32) -> ZpPoly {
    let mut r = trim(a.to_vec());
    let dm = m.len() - 1;
    let lead_inv = inv_mod(m[dm], p) as u64;
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = r[dr] as u64 * lead_inv % p as u64;
        let shift = dr - dm;
        for (i, &mc) in m.iter().enumerate() {
            let t = c * mc as u64 % p as u64;
            r[shift + i] = ((r[shift + i] as u64 + p as u64 - t) % p as u64) as u32;
        }
        r = trim(r);
    }
    r
}

pub(crate) fn monic(a: ZpPoly, p: u32) -> ZpPoly {
    match a.last() {
        None => a,
        Some(&lead) => {
            let inv = inv_mod(lead, p) as u64;
            a.into_iter().map(|c| (c as u64 * inv % p as u64) as u32).collect()
        }
    }
}

pub(crate) fn gcd(a: &[u32], b: &[u32], p: u32) -> ZpPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    monic(x, p)
}

pub(crate) fn mul_mod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> ZpPoly {
    rem(&mul(a, b, p), m, p)
}

pub(crate) fn pow_mod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> ZpPoly {
    let mut result = rem(&[1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(&result, &b, m, p);
        }
        b = mul_mod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

fn eval(a: &[u32], x: u32, p: u32) -> u32 {
    a.iter().rev().fold(0u64, |acc, &c| (acc * x as u64 + c as u64) % p as u64) as u32
}

/// Why a polynomial failed the irreducibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reducibility {
    /// A root in the prime field.
    Root(u32),
    /// A nontrivial monic factor (least-degree-first coefficients).
    Factor(Vec<u32>),
}

/// Irreducibility over Z/pZ of a monic polynomial of degree >= 1.
///
/// Degree <= 3 is decided by the absence of roots. Higher degrees use
/// gcd(f, X^(p^d) - X) for every d <= deg/2.
pub(crate) fn irreducibility(f: &[u32], p: u32) -> Result<(), Reducibility> {
    let n = f.len() - 1;
    if n == 1 {
        return Ok(());
    }
    if let Some(r) = (0..p).find(|&x| eval(f, x, p) == 0) {
        return Err(Reducibility::Root(r));
    }
    if n <= 3 {
        return Ok(());
    }
    let x = vec![0, 1];
    let mut frob = rem(&x, f, p);
    for _ in 1..=n / 2 {
        frob = pow_mod(&frob, p as u64, f, p);
        let g = gcd(f, &sub(&frob, &x, p), p);
        if g.len() > 1 {
            return Err(Reducibility::Factor(g));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_factors() {
        assert!(is_prime(2) && is_prime(3) && is_prime(65537));
        assert!(!is_prime(1) && !is_prime(9));
        assert_eq!(prime_factors(65535), vec![3, 5, 17, 257]);
        assert_eq!(prime_factors(80), vec![2, 5]);
    }

    #[test]
    fn gcd_over_gf5() {
        // X^2 - 1 and X - 1
        let a = vec![4, 0, 1];
        let b = vec![4, 1];
        assert_eq!(gcd(&a, &b, 5), vec![4, 1]);
    }

    #[test]
    fn irreducibility_small() {
        assert!(irreducibility(&[1, 1, 1], 2).is_ok());
        assert_eq!(irreducibility(&[0, 0, 1], 2), Err(Reducibility::Root(0)));
        // (X^2+X+1)^2 = X^4+X^2+1 has no root over GF(2) but is reducible
        assert_eq!(irreducibility(&[1, 0, 1, 0, 1], 2), Err(Reducibility::Factor(vec![1, 1, 1])));
        // X^16+X^5+X^3+X^2+1
        let mut f = vec![0u32; 17];
        for e in [0, 2, 3, 5, 16] {
            f[e] = 1;
        }
        assert!(irreducibility(&f, 2).is_ok());
    }
}
