//! 2×2 matrices `((a, b), (d, c))` over a Grassmann algebra with even
//! diagonal and odd off-diagonal entries, under the commutator bracket.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::freelie::{LiePoly, LieTerm, Var};
use crate::grassmann::{
    GeneratorAllocator, GrassmannContext, GrassmannElement, GrassmannError, GrassmannWord,
};
use crate::scalars::{CoeffPoly, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MatrixError {
    #[error("entry {entry} has words of the wrong parity")]
    Parity { entry: Entry },
    #[error("variable {0} has no assigned matrix")]
    UnboundVariable(Var),
    #[error("generator pool of {have} is smaller than the required {need}")]
    PoolTooSmall { have: usize, need: usize },
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
}

/// Position in the `((a, b), (d, c))` layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    A,
    B,
    D,
    C,
}

impl Entry {
    pub const ALL: [Entry; 4] = [Entry::A, Entry::B, Entry::D, Entry::C];

    /// Parity required of the entry: diagonal even, off-diagonal odd.
    pub fn parity(self) -> u8 {
        match self {
            Entry::A | Entry::C => 0,
            Entry::B | Entry::D => 1,
        }
    }

    /// `(row, column)`, one-based.
    pub fn position(self) -> (u8, u8) {
        match self {
            Entry::A => (1, 1),
            Entry::B => (1, 2),
            Entry::D => (2, 1),
            Entry::C => (2, 2),
        }
    }

    pub fn from_position(row: u8, col: u8) -> Option<Entry> {
        match (row, col) {
            (1, 1) => Some(Entry::A),
            (1, 2) => Some(Entry::B),
            (2, 1) => Some(Entry::D),
            (2, 2) => Some(Entry::C),
            _ => None,
        }
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (r, c) = self.position();
        write!(f, "({r},{c})")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SuperMatrix {
    a: GrassmannElement,
    b: GrassmannElement,
    d: GrassmannElement,
    c: GrassmannElement,
}

impl SuperMatrix {
    /// Builds `((a, b), (d, c))`, checking contexts and parities.
    pub fn new(
        a: GrassmannElement,
        b: GrassmannElement,
        d: GrassmannElement,
        c: GrassmannElement,
    ) -> Result<SuperMatrix, MatrixError> {
        let ctx = a.context();
        for e in [&b, &d, &c] {
            ctx.check_same(&e.context())?;
        }
        let m = SuperMatrix { a, b, d, c };
        m.check_parity()?;
        Ok(m)
    }

    pub fn zero(ctx: GrassmannContext) -> SuperMatrix {
        let z = GrassmannElement::zero(ctx);
        SuperMatrix {
            a: z.clone(),
            b: z.clone(),
            d: z.clone(),
            c: z,
        }
    }

    /// The matrix with `value` at `entry` and zeros elsewhere.
    pub fn unit(entry: Entry, value: GrassmannElement) -> Result<SuperMatrix, MatrixError> {
        let mut m = SuperMatrix::zero(value.context());
        *m.entry_mut(entry) = value;
        m.check_parity()?;
        Ok(m)
    }

    /// `E11 + E22`; only in a unital context.
    pub fn identity(ctx: GrassmannContext) -> Result<SuperMatrix, MatrixError> {
        let one = GrassmannElement::one(ctx)?;
        SuperMatrix::new(
            one.clone(),
            GrassmannElement::zero(ctx),
            GrassmannElement::zero(ctx),
            one,
        )
    }

    pub fn context(&self) -> GrassmannContext {
        self.a.context()
    }

    pub fn entry(&self, e: Entry) -> &GrassmannElement {
        match e {
            Entry::A => &self.a,
            Entry::B => &self.b,
            Entry::D => &self.d,
            Entry::C => &self.c,
        }
    }

    fn entry_mut(&mut self, e: Entry) -> &mut GrassmannElement {
        match e {
            Entry::A => &mut self.a,
            Entry::B => &mut self.b,
            Entry::D => &mut self.d,
            Entry::C => &mut self.c,
        }
    }

    pub fn is_zero(&self) -> bool {
        Entry::ALL.iter().all(|&e| self.entry(e).is_zero())
    }

    fn check_parity(&self) -> Result<(), MatrixError> {
        for e in Entry::ALL {
            if !self.entry(e).has_only_parity(e.parity()) {
                return Err(MatrixError::Parity { entry: e });
            }
        }
        Ok(())
    }

    fn map_entries(
        &self,
        mut f: impl FnMut(&GrassmannElement) -> Result<GrassmannElement, GrassmannError>,
    ) -> Result<SuperMatrix, MatrixError> {
        Ok(SuperMatrix {
            a: f(&self.a)?,
            b: f(&self.b)?,
            d: f(&self.d)?,
            c: f(&self.c)?,
        })
    }

    pub fn add(&self, other: &SuperMatrix) -> Result<SuperMatrix, MatrixError> {
        self.context().check_same(&other.context())?;
        Ok(SuperMatrix {
            a: self.a.add(&other.a)?,
            b: self.b.add(&other.b)?,
            d: self.d.add(&other.d)?,
            c: self.c.add(&other.c)?,
        })
    }

    pub fn sub(&self, other: &SuperMatrix) -> Result<SuperMatrix, MatrixError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> SuperMatrix {
        SuperMatrix {
            a: self.a.neg(),
            b: self.b.neg(),
            d: self.d.neg(),
            c: self.c.neg(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<SuperMatrix, MatrixError> {
        self.map_entries(|e| e.scale(s))
    }

    pub fn scale_poly(&self, p: &CoeffPoly) -> Result<SuperMatrix, MatrixError> {
        self.map_entries(|e| e.scale_poly(p))
    }

    /// `acc += ± self · other` without re-checking contexts.
    fn mul_into(&self, other: &SuperMatrix, negate: bool, acc: &mut SuperMatrix) {
        self.a.mul_into(&other.a, negate, &mut acc.a);
        self.b.mul_into(&other.d, negate, &mut acc.a);
        self.a.mul_into(&other.b, negate, &mut acc.b);
        self.b.mul_into(&other.c, negate, &mut acc.b);
        self.d.mul_into(&other.a, negate, &mut acc.d);
        self.c.mul_into(&other.d, negate, &mut acc.d);
        self.d.mul_into(&other.b, negate, &mut acc.c);
        self.c.mul_into(&other.c, negate, &mut acc.c);
    }

    pub fn mul(&self, other: &SuperMatrix) -> Result<SuperMatrix, MatrixError> {
        self.context().check_same(&other.context())?;
        let mut out = SuperMatrix::zero(self.context());
        self.mul_into(other, false, &mut out);
        debug_assert!(out.check_parity().is_ok());
        Ok(out)
    }

    /// `self · other − other · self`.
    pub fn bracket(&self, other: &SuperMatrix) -> Result<SuperMatrix, MatrixError> {
        self.context().check_same(&other.context())?;
        let mut out = SuperMatrix::zero(self.context());
        self.mul_into(other, false, &mut out);
        other.mul_into(self, true, &mut out);
        debug_assert!(out.check_parity().is_ok());
        Ok(out)
    }

    pub fn frobenius_reduce(&self) -> Result<SuperMatrix, MatrixError> {
        self.map_entries(|e| e.frobenius_reduce())
    }

    /// Substitutes field values for coefficient indeterminates (missing ones
    /// are zero).
    pub fn specialize(&self, point: &BTreeMap<u32, Scalar>) -> SuperMatrix {
        self.map_entries(|e| Ok(e.specialize(point)))
            .expect("specialization cannot fail")
    }

    pub fn with_budget(&self, generators: u32) -> Result<SuperMatrix, MatrixError> {
        self.map_entries(|e| e.with_budget(generators))
    }

    /// Multi-line `( a  b )` / `( d  c )` rendering with aligned columns.
    pub fn pretty(&self) -> String {
        use alloc::format;
        let cells: Vec<String> = Entry::ALL.iter().map(|&e| format!("{}", self.entry(e))).collect();
        let w0 = cells[0].chars().count().max(cells[2].chars().count());
        let w1 = cells[1].chars().count().max(cells[3].chars().count());
        let pad = |s: &str, w: usize| {
            let mut out = String::from(s);
            for _ in s.chars().count()..w {
                out.push(' ');
            }
            out
        };
        format!(
            "( {}  {} )\n( {}  {} )",
            pad(&cells[0], w0),
            pad(&cells[1], w1),
            pad(&cells[2], w0),
            pad(&cells[3], w1)
        )
    }
}

impl fmt::Display for SuperMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(({}, {}), ({}, {}))", self.a, self.b, self.d, self.c)
    }
}

/// Evaluates a bracket term under an assignment of matrices to variables.
pub fn eval_term(t: &LieTerm, assignment: &BTreeMap<Var, SuperMatrix>) -> Result<SuperMatrix, MatrixError> {
    match t {
        LieTerm::Var(v) => assignment.get(v).cloned().ok_or(MatrixError::UnboundVariable(*v)),
        LieTerm::Bracket(l, r) => eval_term(l, assignment)?.bracket(&eval_term(r, assignment)?),
    }
}

/// Evaluates a Lie polynomial; the zero polynomial needs a context, taken
/// from any assigned matrix.
pub fn eval_poly(f: &LiePoly, assignment: &BTreeMap<Var, SuperMatrix>) -> Result<SuperMatrix, MatrixError> {
    let ctx = match assignment.values().next() {
        Some(m) => m.context(),
        None => {
            let v = f.variables().into_iter().next();
            return match v {
                Some(v) => Err(MatrixError::UnboundVariable(v)),
                None => Err(MatrixError::PoolTooSmall { have: 0, need: 1 }),
            };
        }
    };
    let mut acc = SuperMatrix::zero(ctx);
    for (c, t) in f.terms() {
        acc = acc.add(&eval_term(t, assignment)?.scale(c)?)?;
    }
    Ok(acc)
}

/// Supplies fresh coefficient indeterminates `t1, t2, ...`.
#[derive(Debug, Clone, Default)]
pub struct CoeffNamer {
    next: u32,
}

impl CoeffNamer {
    pub fn new() -> CoeffNamer {
        CoeffNamer { next: 0 }
    }

    pub fn fresh(&mut self) -> u32 {
        self.next += 1;
        self.next
    }

    pub fn issued(&self) -> u32 {
        self.next
    }
}

fn indeterminate_word(
    ctx: GrassmannContext,
    w: GrassmannWord,
    namer: &mut CoeffNamer,
) -> Result<GrassmannElement, GrassmannError> {
    GrassmannElement::monomial(ctx, w, CoeffPoly::var(ctx.field, namer.fresh()))
}

/// Generic element over a shared pool: diagonal entries are sums of all even
/// words of length at most two on the pool (plus the unit when unital),
/// off-diagonal entries sums of the single generators, each with its own
/// indeterminate.
pub fn generic_matrix(
    ctx: GrassmannContext,
    pool: &[u32],
    min_pool: usize,
    namer: &mut CoeffNamer,
) -> Result<SuperMatrix, MatrixError> {
    if pool.len() < min_pool {
        return Err(MatrixError::PoolTooSmall {
            have: pool.len(),
            need: min_pool,
        });
    }
    let mut even = Vec::new();
    if ctx.unital {
        even.push(GrassmannWord::EMPTY);
    }
    for (i, &g) in pool.iter().enumerate() {
        for &h in &pool[i + 1..] {
            even.push(GrassmannWord::from_generators(&[g, h]));
        }
    }
    let odd: Vec<GrassmannWord> = pool.iter().map(|&g| GrassmannWord::generator(g)).collect();
    let mut m = SuperMatrix::zero(ctx);
    for e in Entry::ALL {
        let words = if e.parity() == 0 { &even } else { &odd };
        let mut acc = GrassmannElement::zero(ctx);
        for &w in words {
            acc = acc.add(&indeterminate_word(ctx, w, namer)?)?;
        }
        *m.entry_mut(e) = acc;
    }
    Ok(m)
}

/// Generic element for a variable of degree `degree` in a multihomogeneous
/// polynomial, built on fresh generators:
///
/// * each diagonal entry is a sum of `degree` fresh two-generator words;
/// * each off-diagonal entry is a single fresh generator;
/// * when unital, each diagonal entry also carries `t·1` with a fresh
///   indeterminate `t`.
///
/// Every evaluation of the polynomial at concrete matrices is the image of
/// the evaluation at these elements under an algebra map sending generators
/// to odd elements (and scaling by the constant terms), because an odd entry
/// can occur at most once in a nonzero product (`b m b = ±b² m = 0`) and a
/// product of at most `degree` even words of a nilpotent entry only sees
/// `degree` of its words at a time. Nonzero words need no coefficient: the
/// algebra map absorbs scalars.
pub fn slot_generic_matrix(
    ctx: GrassmannContext,
    alloc: &mut GeneratorAllocator,
    degree: u32,
    namer: &mut CoeffNamer,
) -> Result<SuperMatrix, MatrixError> {
    let one = Scalar::one(ctx.field);
    let mut m = SuperMatrix::zero(ctx);
    for e in [Entry::A, Entry::C] {
        let mut acc = GrassmannElement::zero(ctx);
        if ctx.unital {
            acc = acc.add(&indeterminate_word(ctx, GrassmannWord::EMPTY, namer)?)?;
        }
        for _ in 0..degree {
            let g = alloc.fresh_block(2)?;
            acc = acc.add(&GrassmannElement::scalar_word(
                ctx,
                GrassmannWord::from_generators(&g),
                one.clone(),
            )?)?;
        }
        *m.entry_mut(e) = acc;
    }
    for e in [Entry::B, Entry::D] {
        let g = alloc.fresh_block(1)?;
        *m.entry_mut(e) = GrassmannElement::generator(ctx, g[0])?;
    }
    Ok(m)
}

/// Number of generators [`slot_generic_matrix`] consumes for a variable of
/// the given degree.
pub fn slot_generators(degree: u32) -> u32 {
    4 * degree + 2
}

/// The most general element of `M(E_N)`: every admissible word of the right
/// parity on all `N` generators of the context, each with its own
/// indeterminate.
pub fn full_generic_matrix(ctx: GrassmannContext, namer: &mut CoeffNamer) -> Result<SuperMatrix, MatrixError> {
    let n = ctx.generators;
    let mut m = SuperMatrix::zero(ctx);
    let mut words: Vec<GrassmannWord> = (0..(1u64 << n)).map(GrassmannWord::from_bits).collect();
    words.sort();
    for e in Entry::ALL {
        let mut acc = GrassmannElement::zero(ctx);
        for &w in &words {
            if w.parity() != e.parity() || (w.is_empty() && !ctx.unital) {
                continue;
            }
            acc = acc.add(&indeterminate_word(ctx, w, namer)?)?;
        }
        *m.entry_mut(e) = acc;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Field;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn ctx(unital: bool) -> GrassmannContext {
        GrassmannContext::new(Field::Rational, unital, 8)
    }

    fn gen(c: GrassmannContext, i: u32) -> GrassmannElement {
        GrassmannElement::generator(c, i).unwrap()
    }

    fn word(c: GrassmannContext, gs: &[u32]) -> GrassmannElement {
        GrassmannElement::scalar_word(c, GrassmannWord::from_generators(gs), Scalar::one(c.field)).unwrap()
    }

    fn e11(c: GrassmannContext) -> SuperMatrix {
        SuperMatrix::unit(Entry::A, GrassmannElement::one(c).unwrap()).unwrap()
    }

    #[test]
    fn unit_products() {
        let c = ctx(true);
        let e12 = SuperMatrix::unit(Entry::B, gen(c, 1)).unwrap();
        assert_eq!(e11(c).mul(&e12).unwrap(), e12);
        let x = SuperMatrix::unit(Entry::B, gen(c, 1)).unwrap();
        let y = SuperMatrix::unit(Entry::D, gen(c, 2)).unwrap();
        assert_eq!(x.mul(&y).unwrap(), SuperMatrix::unit(Entry::A, word(c, &[1, 2])).unwrap());
        assert_eq!(e11(c).bracket(&e12).unwrap(), e12);
    }

    #[test]
    fn parity_is_enforced() {
        let c = ctx(false);
        assert_eq!(
            SuperMatrix::unit(Entry::A, gen(c, 1)),
            Err(MatrixError::Parity { entry: Entry::A })
        );
        assert!(SuperMatrix::unit(Entry::B, word(c, &[1, 2])).is_err());
    }

    #[test]
    fn identity_matrix_only_when_unital() {
        let c = ctx(true);
        let id = SuperMatrix::identity(c).unwrap();
        let x = SuperMatrix::new(word(c, &[1, 2]), gen(c, 3), gen(c, 4), word(c, &[5, 6])).unwrap();
        assert_eq!(id.mul(&x).unwrap(), x);
        assert_eq!(x.mul(&id).unwrap(), x);
        assert!(SuperMatrix::identity(ctx(false)).is_err());
    }

    #[test]
    fn non_unital_units_are_not_identities() {
        // Any product in the non-unital algebra raises word length, so no
        // basis element fixes another nonzero element.
        let c = ctx(false);
        let basis = [
            SuperMatrix::unit(Entry::A, word(c, &[1, 2])).unwrap(),
            SuperMatrix::unit(Entry::C, word(c, &[1, 2])).unwrap(),
            SuperMatrix::unit(Entry::B, gen(c, 1)).unwrap(),
            SuperMatrix::unit(Entry::D, gen(c, 1)).unwrap(),
        ];
        let probe = SuperMatrix::new(word(c, &[3, 4]), gen(c, 5), gen(c, 6), word(c, &[7, 8])).unwrap();
        for u in &basis {
            assert_ne!(u.mul(&probe).unwrap(), probe);
            assert_ne!(probe.mul(u).unwrap(), probe);
        }
    }

    #[test]
    fn generic_matrix_enumerates_short_words() {
        let c = GrassmannContext::new(Field::Rational, false, 2);
        let mut namer = CoeffNamer::new();
        let m = generic_matrix(c, &[1, 2], 2, &mut namer).unwrap();
        assert_eq!(m.entry(Entry::A).len(), 1);
        assert_eq!(m.entry(Entry::B).len(), 2);
        assert_eq!(namer.issued(), 6);
        let cu = GrassmannContext::new(Field::Rational, true, 2);
        let m = generic_matrix(cu, &[1, 2], 2, &mut CoeffNamer::new()).unwrap();
        assert_eq!(m.entry(Entry::A).len(), 2);
        assert!(generic_matrix(c, &[1], 2, &mut CoeffNamer::new()).is_err());
    }

    #[test]
    fn specializing_a_generic_matrix() {
        let c = GrassmannContext::new(Field::Rational, true, 2);
        let mut namer = CoeffNamer::new();
        let m = generic_matrix(c, &[1, 2], 2, &mut namer).unwrap();
        // t1: unit in a, t2: e1e2 in a, t3/t4: e1/e2 in b, ...
        let q = |n| Scalar::from_i64(Field::Rational, n);
        let point = BTreeMap::from([(2, q(3)), (4, q(1))]);
        let want = SuperMatrix::new(
            word(c, &[1, 2]).scale(&q(3)).unwrap(),
            gen(c, 2),
            GrassmannElement::zero(c),
            GrassmannElement::zero(c),
        )
        .unwrap();
        assert_eq!(m.specialize(&point), want);
    }

    #[test]
    fn slot_generic_layout() {
        let c = GrassmannContext::new(Field::Rational, true, 64);
        let mut alloc = GeneratorAllocator::new(64);
        let mut namer = CoeffNamer::new();
        let m = slot_generic_matrix(c, &mut alloc, 3, &mut namer).unwrap();
        assert_eq!(alloc.used(), slot_generators(3));
        assert_eq!(m.entry(Entry::A).len(), 4);
        assert_eq!(m.entry(Entry::B).len(), 1);
        assert_eq!(namer.issued(), 2);
    }

    #[test]
    fn evaluation_of_a_bracket() {
        let c = ctx(true);
        let (x, y) = (Var::named('x'), Var::named('y'));
        let e12 = SuperMatrix::unit(Entry::B, gen(c, 1)).unwrap();
        let asg = BTreeMap::from([(x, e11(c)), (y, e12.clone())]);
        let t = LieTerm::left_normed_vars(&[x, y]);
        assert_eq!(eval_term(&t, &asg).unwrap(), e12);
        let z = Var::named('z');
        assert_eq!(
            eval_term(&LieTerm::left_normed_vars(&[x, z]), &asg),
            Err(MatrixError::UnboundVariable(z))
        );
    }

    #[test]
    fn display_layout() {
        let c = ctx(true);
        let m = SuperMatrix::unit(Entry::B, gen(c, 1)).unwrap();
        assert_eq!(m.to_string(), "((0, e1), (0, 0))");
        assert_eq!(m.pretty(), "( 0  e1 )\n( 0  0  )");
    }

    fn arb_matrix(c: GrassmannContext) -> impl Strategy<Value = SuperMatrix> {
        let entry = move |parity: u8| {
            proptest::collection::vec((0u64..16, -2i64..=2), 0..4).prop_map(move |ts| {
                let mut acc = GrassmannElement::zero(c);
                for (bits, k) in ts {
                    let w = GrassmannWord::from_bits(bits);
                    if w.parity() != parity || (w.is_empty() && !c.unital) {
                        continue;
                    }
                    let s = Scalar::from_i64(c.field, k);
                    acc = acc.add(&GrassmannElement::scalar_word(c, w, s).unwrap()).unwrap();
                }
                acc
            })
        };
        (entry(0), entry(1), entry(1), entry(0))
            .prop_map(|(a, b, d, cc)| SuperMatrix::new(a, b, d, cc).unwrap())
    }

    proptest! {
        #[test]
        fn associativity(x in arb_matrix(GrassmannContext::new(Field::Rational, true, 4)),
                         y in arb_matrix(GrassmannContext::new(Field::Rational, true, 4)),
                         z in arb_matrix(GrassmannContext::new(Field::Rational, true, 4))) {
            let l = x.mul(&y).unwrap().mul(&z).unwrap();
            let r = x.mul(&y.mul(&z).unwrap()).unwrap();
            prop_assert_eq!(l, r);
        }

        #[test]
        fn bracket_is_a_lie_bracket(x in arb_matrix(GrassmannContext::new(Field::Rational, false, 4)),
                                    y in arb_matrix(GrassmannContext::new(Field::Rational, false, 4)),
                                    z in arb_matrix(GrassmannContext::new(Field::Rational, false, 4))) {
            prop_assert!(x.bracket(&x).unwrap().is_zero());
            prop_assert_eq!(x.bracket(&y).unwrap(), y.bracket(&x).unwrap().neg());
            let j = x.bracket(&y).unwrap().bracket(&z).unwrap()
                .add(&y.bracket(&z).unwrap().bracket(&x).unwrap()).unwrap()
                .add(&z.bracket(&x).unwrap().bracket(&y).unwrap()).unwrap();
            prop_assert!(j.is_zero());
            let s = x.add(&y).unwrap();
            prop_assert_eq!(s.bracket(&z).unwrap(),
                x.bracket(&z).unwrap().add(&y.bracket(&z).unwrap()).unwrap());
        }
    }

    #[test]
    fn contexts_must_match() {
        let m1 = SuperMatrix::zero(ctx(true));
        let m2 = SuperMatrix::zero(ctx(false));
        assert!(m1.add(&m2).is_err());
    }
}
