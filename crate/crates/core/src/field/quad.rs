use super::{FieldCtx, FieldElement, FieldError};

/// GF(q^2) over GF(q), q = p^m, with the unit circle μ_{q+1}.
#[derive(Debug, Clone)]
pub struct QuadExtension {
    big: FieldCtx,
    m: u32,
    q: u64,
}

impl QuadExtension {
    /// `modulus2m` is the defining polynomial of GF(p^(2m)), least-degree-first.
    pub fn new(p: u32, m: u32, modulus2m: &[u32], generator: Option<&[u32]>) -> Result<Self, FieldError> {
        let big = FieldCtx::new(p, modulus2m, generator)?;
        Self::from_ctx(big, m)
    }

    pub fn canonical(p: u32, m: u32) -> Result<Self, FieldError> {
        Self::from_ctx(FieldCtx::canonical(p, 2 * m)?, m)
    }

    pub fn from_ctx(big: FieldCtx, m: u32) -> Result<Self, FieldError> {
        if big.degree() != 2 * m || m == 0 {
            return Err(FieldError::DegreeMismatch { want: 2 * m, got: big.degree() });
        }
        let q = (big.characteristic() as u64).pow(m);
        Ok(QuadExtension { big, m, q })
    }

    pub fn big(&self) -> &FieldCtx {
        &self.big
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn p(&self) -> u32 {
        self.big.characteristic()
    }

    pub fn subfield(&self) -> Subfield<'_> {
        Subfield::new(&self.big, self.q)
    }

    pub fn in_subfield(&self, x: FieldElement) -> Result<bool, FieldError> {
        self.big.check(x)?;
        Ok(self.conj(x) == x)
    }

    /// x^q.
    pub fn conj(&self, x: FieldElement) -> FieldElement {
        self.big.pow(x, self.q)
    }

    /// x^(q+1), which always lies in GF(q).
    pub fn norm(&self, x: FieldElement) -> FieldElement {
        self.big.pow(x, self.q + 1)
    }

    pub fn on_circle(&self, x: FieldElement) -> bool {
        self.norm(x) == self.big.one()
    }

    /// μ_{q+1} listed as g^(k(q-1)) for k = 0..=q.
    pub fn circle_members(&self) -> Vec<FieldElement> {
        (0..=self.q).map(|k| self.big.gen_pow((k * (self.q - 1)) as i64)).collect()
    }

    /// Elements of GF(q^2) outside GF(q), in generator-power order.
    pub fn outside_subfield(&self) -> Vec<FieldElement> {
        self.big.elements().filter(|&x| self.conj(x) != x).collect()
    }
}

/// A subfield GF(q) of some context, possibly the context itself.
#[derive(Debug, Clone, Copy)]
pub struct Subfield<'a> {
    ctx: &'a FieldCtx,
    q: u64,
}

impl<'a> Subfield<'a> {
    pub(crate) fn new(ctx: &'a FieldCtx, q: u64) -> Self {
        debug_assert_eq!(ctx.group_order() % (q - 1), 0);
        Subfield { ctx, q }
    }

    pub(crate) fn whole(ctx: &'a FieldCtx) -> Self {
        Subfield { ctx, q: ctx.order() }
    }

    pub fn ctx(&self) -> &'a FieldCtx {
        self.ctx
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Degree of GF(q) over the prime field.
    pub fn degree(&self) -> u32 {
        let p = self.ctx.characteristic() as u64;
        let mut m = 0;
        let mut acc = 1;
        while acc < self.q {
            acc *= p;
            m += 1;
        }
        m
    }

    pub fn contains(&self, x: FieldElement) -> bool {
        self.ctx.contains(x) && self.ctx.pow(x, self.q) == x
    }

    /// Zero, then the powers of the subfield generator g^((N-1)/(q-1)).
    pub fn elements(&self) -> Vec<FieldElement> {
        let stride = (self.ctx.group_order() / (self.q - 1)) as i64;
        std::iter::once(self.ctx.zero()).chain((0..self.q as i64 - 1).map(|k| self.ctx.gen_pow(k * stride))).collect()
    }

    fn member_nonzero(&self, x: FieldElement) -> Result<(), FieldError> {
        self.ctx.check(x)?;
        if x.is_zero() {
            return Err(FieldError::ZeroInput);
        }
        if !self.contains(x) {
            return Err(FieldError::NotInSubfield);
        }
        Ok(())
    }

    /// Quadratic character in GF(q); every nonzero element is a square for even q.
    pub fn is_square(&self, x: FieldElement) -> Result<bool, FieldError> {
        self.member_nonzero(x)?;
        if self.q % 2 == 0 {
            return Ok(true);
        }
        Ok(self.ctx.pow(x, (self.q - 1) / 2) == self.ctx.one())
    }

    /// Cubic character in GF(q); always true when 3 does not divide q - 1.
    pub fn is_cube(&self, x: FieldElement) -> Result<bool, FieldError> {
        self.member_nonzero(x)?;
        if (self.q - 1) % 3 != 0 {
            return Ok(true);
        }
        Ok(self.ctx.pow(x, (self.q - 1) / 3) == self.ctx.one())
    }

    /// Absolute trace GF(2^m) -> GF(2), Σ_{i<m} x^(2^i).
    pub fn abs_trace(&self, x: FieldElement) -> Result<FieldElement, FieldError> {
        if self.ctx.characteristic() != 2 {
            return Err(FieldError::NotCharacteristicTwo);
        }
        self.ctx.check(x)?;
        if !self.contains(x) {
            return Err(FieldError::NotInSubfield);
        }
        let mut acc = self.ctx.zero();
        let mut term = x;
        for _ in 0..self.degree() {
            acc = self.ctx.add(acc, term);
            term = self.ctx.mul(term, term);
        }
        Ok(acc)
    }

    /// True iff X^3 + X + α has no root in GF(q), i.e. the cubic is irreducible.
    pub fn cubic_irreducible(&self, alpha: FieldElement) -> Result<bool, FieldError> {
        self.ctx.check(alpha)?;
        if !self.contains(alpha) {
            return Err(FieldError::NotInSubfield);
        }
        let ctx = self.ctx;
        Ok(self.elements().into_iter().all(|x| {
            let v = ctx.add(ctx.add(ctx.pow(x, 3), x), alpha);
            !v.is_zero()
        }))
    }

    /// {a + 1/a : a a nonzero non-cube of GF(q)}, sorted by packed coordinates.
    /// Needs characteristic 2 and an even extension degree.
    pub fn non_cube_alpha_range(&self) -> Result<Vec<FieldElement>, FieldError> {
        if self.ctx.characteristic() != 2 {
            return Err(FieldError::NotCharacteristicTwo);
        }
        if self.degree() % 2 != 0 {
            return Err(FieldError::DegreeMismatch { want: self.degree() + 1, got: self.degree() });
        }
        let mut out: Vec<FieldElement> = self
            .elements()
            .into_iter()
            .filter(|&a| !a.is_zero() && !self.is_cube(a).unwrap_or(true))
            .map(|a| self.ctx.add(a, self.ctx.inv(a).expect("nonzero")))
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Nonzero non-squares of GF(q).
    pub fn non_squares(&self) -> Vec<FieldElement> {
        self.elements().into_iter().filter(|&x| !x.is_zero() && !self.is_square(x).unwrap_or(true)).collect()
    }

    /// Nonzero non-cubes of GF(q).
    pub fn non_cubes(&self) -> Vec<FieldElement> {
        self.elements().into_iter().filter(|&x| !x.is_zero() && !self.is_cube(x).unwrap_or(true)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf25_over_gf5() {
        // X^2 - 3 = X^2 + 2; 3 is a non-residue mod 5 (squares are 1, 4)
        let squares: Vec<u32> = (1..5).map(|x| x * x % 5).collect();
        assert!(!squares.contains(&3));
        let ext = QuadExtension::new(5, 1, &[2, 0, 1], None).unwrap();
        assert_eq!(ext.q(), 5);
        let big = ext.big();
        let count = big.elements().filter(|&x| ext.in_subfield(x).unwrap()).count();
        assert_eq!(count, 5);
        assert!(ext.in_subfield(big.zero()).unwrap());
        assert!(!ext.in_subfield(big.generator()).unwrap());
        assert_eq!(ext.circle_members().len(), 6);
        assert!(ext.on_circle(big.from_int(-1)));
    }

    #[test]
    fn stated_quad_moduli() {
        let e1 = QuadExtension::new(5, 3, &[2, 0, 1, 1, 1, 0, 1], None).unwrap();
        assert_eq!(e1.q(), 125);
        let e2 = QuadExtension::new(3, 2, &[2, 0, 0, 2, 1], None).unwrap();
        assert_eq!(e2.q(), 9);
    }

    #[test]
    fn circle_of_gf16_over_gf4_matches_scan() {
        let ext = QuadExtension::canonical(2, 2).unwrap();
        let big = ext.big();
        let mut scan: Vec<_> = big.elements().filter(|&x| big.pow(x, 5) == big.one()).collect();
        let mut listed = ext.circle_members();
        scan.sort();
        listed.sort();
        assert_eq!(scan, listed);
        assert_eq!(listed.len(), 5);
    }

    #[test]
    fn residues_and_trace() {
        let gf3 = FieldCtx::canonical(3, 1).unwrap();
        assert!(!gf3.is_square(gf3.from_int(2)).unwrap());
        assert_eq!(gf3.is_square(gf3.zero()), Err(FieldError::ZeroInput));

        let gf4 = FieldCtx::new(2, &[1, 1, 1], None).unwrap();
        let w = gf4.generator();
        assert!(!gf4.is_cube(w).unwrap());

        let gf8 = FieldCtx::canonical(2, 3).unwrap();
        let zeros = gf8.elements().filter(|&x| gf8.abs_trace(x).unwrap().is_zero()).count();
        assert_eq!(zeros, 4);
        assert_eq!(gf8.abs_trace(gf8.one()).unwrap(), gf8.one());
        assert!(gf8.abs_trace(gf8.zero()).unwrap().is_zero());
        assert_eq!(gf3.abs_trace(gf3.one()), Err(FieldError::NotCharacteristicTwo));
    }

    #[test]
    fn norm_of_gf9_generator_is_non_square() {
        let ext = QuadExtension::new(3, 2, &[2, 0, 0, 2, 1], None).unwrap();
        let alpha = ext.norm(ext.big().generator());
        // g^(q+1) = g^10; subfield generator is g^10 itself, odd exponent 1
        assert!(ext.in_subfield(alpha).unwrap());
        assert!(!ext.subfield().is_square(alpha).unwrap());
    }

    #[test]
    fn cubic_over_gf4() {
        let ext = QuadExtension::canonical(2, 2).unwrap();
        let sub = ext.subfield();
        let one = ext.big().one();
        assert!(sub.cubic_irreducible(one).unwrap());
        assert!(!sub.cubic_irreducible(ext.big().zero()).unwrap());
    }
}
