//! Truncated Grassmann algebras on generators `e1..eN`, with and without a
//! unit, and their ℤ₂ grading into even and odd parts.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::scalars::{CoeffPoly, Field, Scalar, ScalarError};

/// Generator indices run over `1..=MAX_GENERATORS`.
pub const MAX_GENERATORS: u32 = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrassmannError {
    #[error("Grassmann elements from different contexts: {0} and {1}")]
    ContextMismatch(GrassmannContext, GrassmannContext),
    #[error("the empty word is not admissible in the non-unital algebra")]
    EmptyWordNotAdmissible,
    #[error("generator e{index} outside the budget of {budget} generators")]
    GeneratorOutOfRange { index: u32, budget: u32 },
    #[error("generator budget exhausted: requested {requested}, {remaining} left of {budget}")]
    BudgetExhausted {
        requested: usize,
        remaining: u32,
        budget: u32,
    },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A product of distinct generators in increasing index order, stored as a
/// bit set (bit `i - 1` is generator `e_i`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct GrassmannWord(u64);

impl GrassmannWord {
    pub const EMPTY: GrassmannWord = GrassmannWord(0);

    pub fn from_bits(bits: u64) -> GrassmannWord {
        GrassmannWord(bits)
    }

    /// Panics if an index is outside `1..=64`; duplicates collapse.
    pub fn from_generators(gens: &[u32]) -> GrassmannWord {
        let mut bits = 0u64;
        for &g in gens {
            assert!((1..=MAX_GENERATORS).contains(&g), "generator e{g} out of range");
            bits |= 1 << (g - 1);
        }
        GrassmannWord(bits)
    }

    pub fn generator(index: u32) -> GrassmannWord {
        GrassmannWord::from_generators(&[index])
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn parity(self) -> u8 {
        (self.len() & 1) as u8
    }

    /// Largest generator index used, 0 for the empty word.
    pub fn max_generator(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    pub fn generators(self) -> impl Iterator<Item = u32> {
        let mut bits = self.0;
        core::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros();
                bits &= bits - 1;
                Some(i + 1)
            }
        })
    }

    pub fn is_disjoint(self, other: GrassmannWord) -> bool {
        self.0 & other.0 == 0
    }

    /// `self · other`: `None` when a generator repeats, otherwise the sign
    /// (`true` = negative) and the union word. The sign is the parity of the
    /// number of pairs `(i in self, j in other)` with `i > j`.
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, other: GrassmannWord) -> Option<(bool, GrassmannWord)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut inversions = 0u32;
        let mut rest = other.0;
        while rest != 0 {
            let j = rest.trailing_zeros();
            rest &= rest - 1;
            // generators of `self` with index > j + 1 sit at bits > j
            inversions += (self.0 >> j >> 1).count_ones();
        }
        Some((inversions & 1 == 1, GrassmannWord(self.0 | other.0)))
    }
}

/// Graded-lex: shorter words first, then the word holding the smallest
/// differing generator first.
impl Ord for GrassmannWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for GrassmannWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GrassmannWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("1");
        }
        for g in self.generators() {
            write!(f, "e{g}")?;
        }
        Ok(())
    }
}

/// Field, unit flag and generator budget shared by all elements that are
/// combined with each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GrassmannContext {
    pub field: Field,
    pub unital: bool,
    pub generators: u32,
}

impl GrassmannContext {
    pub fn new(field: Field, unital: bool, generators: u32) -> GrassmannContext {
        assert!(generators <= MAX_GENERATORS, "at most {MAX_GENERATORS} generators");
        GrassmannContext {
            field,
            unital,
            generators,
        }
    }

    pub fn check_same(&self, other: &GrassmannContext) -> Result<(), GrassmannError> {
        if self == other {
            Ok(())
        } else {
            Err(GrassmannError::ContextMismatch(*self, *other))
        }
    }

    pub fn admits(&self, w: GrassmannWord) -> Result<(), GrassmannError> {
        if w.is_empty() && !self.unital {
            return Err(GrassmannError::EmptyWordNotAdmissible);
        }
        if w.max_generator() > self.generators {
            return Err(GrassmannError::GeneratorOutOfRange {
                index: w.max_generator(),
                budget: self.generators,
            });
        }
        Ok(())
    }
}

impl fmt::Display for GrassmannContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = if self.unital { "E1" } else { "E" };
        write!(f, "{e}_{} over {}", self.generators, self.field)
    }
}

/// Element of E_N or E¹_N: a sparse sum of words with polynomial coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GrassmannElement {
    ctx: GrassmannContext,
    terms: BTreeMap<GrassmannWord, CoeffPoly>,
}

impl GrassmannElement {
    pub fn zero(ctx: GrassmannContext) -> GrassmannElement {
        GrassmannElement {
            ctx,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(
        ctx: GrassmannContext,
        word: GrassmannWord,
        coeff: CoeffPoly,
    ) -> Result<GrassmannElement, GrassmannError> {
        ctx.admits(word)?;
        ctx.field.check_same(coeff.field())?;
        let mut out = GrassmannElement::zero(ctx);
        out.add_raw(word, coeff);
        Ok(out)
    }

    pub fn scalar_word(
        ctx: GrassmannContext,
        word: GrassmannWord,
        c: Scalar,
    ) -> Result<GrassmannElement, GrassmannError> {
        GrassmannElement::monomial(ctx, word, CoeffPoly::constant(c))
    }

    /// The single generator `e_i` with coefficient 1.
    pub fn generator(ctx: GrassmannContext, index: u32) -> Result<GrassmannElement, GrassmannError> {
        GrassmannElement::scalar_word(ctx, GrassmannWord::generator(index), Scalar::one(ctx.field))
    }

    /// The unit; only in a unital context.
    pub fn one(ctx: GrassmannContext) -> Result<GrassmannElement, GrassmannError> {
        GrassmannElement::scalar_word(ctx, GrassmannWord::EMPTY, Scalar::one(ctx.field))
    }

    pub fn context(&self) -> GrassmannContext {
        self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GrassmannWord, &CoeffPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: GrassmannWord) -> Option<&CoeffPoly> {
        self.terms.get(&w)
    }

    /// Union of all generators used.
    pub fn support(&self) -> GrassmannWord {
        GrassmannWord(self.terms.keys().fold(0, |acc, w| acc | w.0))
    }

    /// `Some(parity)` when every word has the same parity (zero counts as even).
    pub fn parity(&self) -> Option<u8> {
        let mut it = self.terms.keys().map(|w| w.parity());
        match it.next() {
            None => Some(0),
            Some(p) => it.all(|q| q == p).then_some(p),
        }
    }

    pub fn has_only_parity(&self, parity: u8) -> bool {
        self.terms.keys().all(|w| w.parity() == parity)
    }

    fn add_raw(&mut self, w: GrassmannWord, c: CoeffPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().try_add(&c).expect("field checked by context");
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
        self.ctx.check_same(&other.ctx)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_raw(*w, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GrassmannElement {
        GrassmannElement {
            ctx: self.ctx,
            terms: self.terms.iter().map(|(w, c)| (*w, c.neg())).collect(),
        }
    }

    pub fn mul(&self, other: &GrassmannElement) -> Result<GrassmannElement, GrassmannError> {
        self.ctx.check_same(&other.ctx)?;
        let mut out = GrassmannElement::zero(self.ctx);
        self.mul_into(other, false, &mut out);
        Ok(out)
    }

    /// `acc += ± self · other`, contexts already checked.
    pub(crate) fn mul_into(&self, other: &GrassmannElement, negate: bool, acc: &mut GrassmannElement) {
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                if let Some((neg, w)) = u.mul(*v) {
                    let c = a.try_mul(b).expect("field checked by context");
                    acc.add_raw(w, if neg != negate { c.neg() } else { c });
                }
            }
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<GrassmannElement, GrassmannError> {
        self.ctx.field.check_same(s.field())?;
        let mut out = GrassmannElement::zero(self.ctx);
        for (w, c) in &self.terms {
            out.add_raw(*w, c.scale(s)?);
        }
        Ok(out)
    }

    pub fn scale_poly(&self, p: &CoeffPoly) -> Result<GrassmannElement, GrassmannError> {
        self.ctx.field.check_same(p.field())?;
        let mut out = GrassmannElement::zero(self.ctx);
        for (w, c) in &self.terms {
            out.add_raw(*w, c.try_mul(p)?);
        }
        Ok(out)
    }

    /// Keeps exactly the words of the given parity; the empty word is even.
    pub fn parity_projection(&self, parity: u8) -> GrassmannElement {
        GrassmannElement {
            ctx: self.ctx,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| w.parity() == parity & 1)
                .map(|(w, c)| (*w, c.clone()))
                .collect(),
        }
    }

    pub fn frobenius_reduce(&self) -> Result<GrassmannElement, GrassmannError> {
        let mut out = GrassmannElement::zero(self.ctx);
        for (w, c) in &self.terms {
            out.add_raw(*w, c.frobenius_reduce()?);
        }
        Ok(out)
    }

    /// Substitutes field values for coefficient indeterminates (missing ones
    /// are zero), leaving constant coefficients.
    pub fn specialize(&self, point: &BTreeMap<u32, Scalar>) -> GrassmannElement {
        let mut out = GrassmannElement::zero(self.ctx);
        for (w, c) in &self.terms {
            out.add_raw(*w, CoeffPoly::constant(c.evaluate(point)));
        }
        out
    }

    /// Re-homes the element into a context with the same field and unit flag
    /// but a different budget; fails if a word does not fit.
    pub fn with_budget(&self, generators: u32) -> Result<GrassmannElement, GrassmannError> {
        let ctx = GrassmannContext { generators, ..self.ctx };
        for w in self.terms.keys() {
            ctx.admits(*w)?;
        }
        Ok(GrassmannElement { ctx, terms: self.terms.clone() })
    }
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let (neg, body) = match c.as_constant() {
                Some(s) => {
                    let neg = s.is_negative_looking() && !s.field().is_finite();
                    let mag = if neg { -&s } else { s };
                    (neg, if mag.is_one() { None } else { Some(alloc::format!("{mag}")) })
                }
                None if c.len() == 1 => {
                    let (m, s) = c.terms().next().expect("one term");
                    let neg = s.is_negative_looking() && !s.field().is_finite();
                    let mag = if neg { -s } else { s.clone() };
                    (neg, Some(alloc::format!("{}", CoeffPoly::term(mag, m.clone()))))
                }
                None => (false, Some(alloc::format!("({c})"))),
            };
            if k == 0 {
                if neg {
                    f.write_str("−")?;
                }
            } else {
                f.write_str(if neg { " − " } else { " + " })?;
            }
            match (body, w.is_empty()) {
                (Some(b), true) => f.write_str(&b)?,
                (Some(b), false) => write!(f, "{b}·{w}")?,
                (None, _) => write!(f, "{w}")?,
            }
        }
        Ok(())
    }
}

/// Hands out previously unused generator indices from a fixed budget.
#[derive(Debug, Clone)]
pub struct GeneratorAllocator {
    budget: u32,
    next: u32,
}

impl GeneratorAllocator {
    pub fn new(budget: u32) -> GeneratorAllocator {
        GeneratorAllocator { budget, next: 1 }
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn used(&self) -> u32 {
        self.next - 1
    }

    pub fn remaining(&self) -> u32 {
        self.budget + 1 - self.next
    }

    pub fn fresh_block(&mut self, count: usize) -> Result<Vec<u32>, GrassmannError> {
        if count as u64 > self.remaining() as u64 {
            return Err(GrassmannError::BudgetExhausted {
                requested: count,
                remaining: self.remaining(),
                budget: self.budget,
            });
        }
        let start = self.next;
        self.next += count as u32;
        Ok((start..self.next).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;
    use proptest::prelude::*;

    fn ctx(unital: bool, n: u32) -> GrassmannContext {
        GrassmannContext::new(Field::Rational, unital, n)
    }

    fn word(gs: &[u32]) -> GrassmannWord {
        GrassmannWord::from_generators(gs)
    }

    fn elem(c: GrassmannContext, terms: &[(i64, &[u32])]) -> GrassmannElement {
        let mut out = GrassmannElement::zero(c);
        for &(k, gs) in terms {
            let t = GrassmannElement::scalar_word(c, word(gs), Scalar::from_i64(c.field, k)).unwrap();
            out = out.add(&t).unwrap();
        }
        out
    }

    #[test]
    fn word_products() {
        assert_eq!(word(&[2]).mul(word(&[1])), Some((true, word(&[1, 2]))));
        assert_eq!(word(&[1]).mul(word(&[1])), None);
        assert_eq!(word(&[1, 2]).mul(word(&[3])), Some((false, word(&[1, 2, 3]))));
        assert_eq!(word(&[3]).mul(word(&[1, 2])), Some((false, word(&[1, 2, 3]))));
        assert_eq!(word(&[2, 3]).mul(word(&[1])), Some((false, word(&[1, 2, 3]))));
        assert!(word(&[3]).mul(word(&[1])).unwrap().0);
    }

    #[test]
    fn word_order_and_printing() {
        let mut ws = vec![word(&[2, 3]), word(&[1]), word(&[1, 3]), GrassmannWord::EMPTY, word(&[1, 2])];
        ws.sort();
        assert_eq!(ws, vec![GrassmannWord::EMPTY, word(&[1]), word(&[1, 2]), word(&[1, 3]), word(&[2, 3])]);
        assert_eq!(word(&[1, 2, 5]).to_string(), "e1e2e5");
    }

    #[test]
    fn anticommuting_generators_cancel() {
        let c = ctx(false, 4);
        let e1 = elem(c, &[(1, &[1])]);
        let e2 = elem(c, &[(1, &[2])]);
        let s = e1.mul(&e2).unwrap().add(&e2.mul(&e1).unwrap()).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn square_of_two_even_words() {
        let c = ctx(false, 4);
        let x = elem(c, &[(1, &[1, 2]), (1, &[3, 4])]);
        assert_eq!(x.mul(&x).unwrap(), elem(c, &[(2, &[1, 2, 3, 4])]));
    }

    #[test]
    fn parity_projections() {
        let c = ctx(false, 4);
        let x = elem(c, &[(1, &[1]), (1, &[1, 2])]);
        assert_eq!(x.parity_projection(1), elem(c, &[(1, &[1])]));
        assert_eq!(x.parity_projection(0), elem(c, &[(1, &[1, 2])]));
        assert_eq!(x.parity_projection(0).add(&x.parity_projection(1)).unwrap(), x);
    }

    #[test]
    fn non_unital_rejects_the_unit() {
        let c = ctx(false, 2);
        assert_eq!(GrassmannElement::one(c), Err(GrassmannError::EmptyWordNotAdmissible));
        assert!(GrassmannElement::one(ctx(true, 2)).is_ok());
        assert!(matches!(
            GrassmannElement::generator(c, 3),
            Err(GrassmannError::GeneratorOutOfRange { index: 3, budget: 2 })
        ));
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = GrassmannElement::generator(ctx(false, 2), 1).unwrap();
        let b = GrassmannElement::generator(ctx(true, 2), 1).unwrap();
        assert!(matches!(a.mul(&b), Err(GrassmannError::ContextMismatch(..))));
    }

    #[test]
    fn allocator_hands_out_disjoint_blocks() {
        let mut a = GeneratorAllocator::new(4);
        assert_eq!(a.fresh_block(2).unwrap(), vec![1, 2]);
        assert_eq!(a.fresh_block(2).unwrap(), vec![3, 4]);
        assert!(matches!(a.fresh_block(1), Err(GrassmannError::BudgetExhausted { .. })));
    }

    #[test]
    fn display_form() {
        let c = ctx(false, 4);
        let x = elem(c, &[(2, &[1, 2]), (-1, &[3, 4])]);
        assert_eq!(x.to_string(), "2·e1e2 − e3e4");
        let t = GrassmannElement::monomial(c, word(&[3, 4]), CoeffPoly::var(Field::Rational, 1)).unwrap();
        assert_eq!(elem(c, &[(2, &[1, 2])]).sub(&t).unwrap().to_string(), "2·e1e2 − t1·e3e4");
    }

    fn all_words(n: u32) -> Vec<GrassmannWord> {
        (0u64..(1 << n)).map(GrassmannWord::from_bits).collect()
    }

    #[test]
    fn supercommutativity_exhaustive_small() {
        for n in 1..=4 {
            let c = ctx(true, n);
            for u in all_words(n) {
                for v in all_words(n) {
                    let x = GrassmannElement::scalar_word(c, u, Scalar::one(c.field)).unwrap();
                    let y = GrassmannElement::scalar_word(c, v, Scalar::one(c.field)).unwrap();
                    let xy = x.mul(&y).unwrap();
                    let yx = y.mul(&x).unwrap();
                    let expected = if u.parity() * v.parity() == 1 { yx.neg() } else { yx };
                    assert_eq!(xy, expected);
                }
            }
        }
    }

    fn arb_elem(n: u32, unital: bool) -> impl Strategy<Value = GrassmannElement> {
        proptest::collection::vec((-3i64..=3, 0u64..(1 << n)), 0..6).prop_map(move |ts| {
            let c = ctx(unital, n);
            let mut out = GrassmannElement::zero(c);
            for (k, bits) in ts {
                let w = GrassmannWord::from_bits(bits);
                if w.is_empty() && !unital {
                    continue;
                }
                let t = GrassmannElement::scalar_word(c, w, Scalar::from_i64(c.field, k)).unwrap();
                out = out.add(&t).unwrap();
            }
            out
        })
    }

    proptest! {
        #[test]
        fn associativity(x in arb_elem(6, true), y in arb_elem(6, true), z in arb_elem(6, true)) {
            let l = x.mul(&y).unwrap().mul(&z).unwrap();
            let r = x.mul(&y.mul(&z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn odd_elements_square_to_zero(x in arb_elem(6, false)) {
            let odd = x.parity_projection(1);
            prop_assert!(odd.mul(&odd).unwrap().is_zero());
        }

        #[test]
        fn even_part_is_central(x in arb_elem(6, true), y in arb_elem(6, true)) {
            let e = x.parity_projection(0);
            let comm = e.mul(&y).unwrap().sub(&y.mul(&e).unwrap()).unwrap();
            prop_assert!(comm.is_zero());
        }

        #[test]
        fn supercommutativity_random(x in arb_elem(8, true), y in arb_elem(8, true)) {
            for px in 0..2u8 {
                for py in 0..2u8 {
                    let u = x.parity_projection(px);
                    let v = y.parity_projection(py);
                    let uv = u.mul(&v).unwrap();
                    let vu = v.mul(&u).unwrap();
                    let expected = if px * py == 1 { vu.neg() } else { vu };
                    prop_assert_eq!(uv, expected);
                }
            }
        }
    }
}
