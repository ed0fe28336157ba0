//! Exact base-field arithmetic over ℚ and GF(p), p an odd prime, plus sparse
//! commutative coefficient polynomials in indeterminates `t1, t2, ...`.
//!
//! Rationals are stored in lowest terms with a positive denominator. Values
//! that fit in `i64` stay on a fast machine-word path; anything larger is
//! promoted to `BigRational` and demoted again as soon as it fits.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::{Hash, Hasher};
use core::ops;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Largest prime accepted for GF(p); products of residues must fit in `u64`.
pub const MAX_PRIME: u64 = (1 << 31) - 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("mixed-field arithmetic: {0} and {1}")]
    MixedFields(Field, Field),
    #[error("division by zero")]
    DivisionByZero,
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported maximum {MAX_PRIME}")]
    PrimeTooLarge(u64),
    #[error("Frobenius reduction needs a prime field, got {0}")]
    NotFinite(Field),
    #[error("cannot parse scalar literal `{0}`")]
    Parse(String),
}

/// The base field: ℚ or GF(p) with p an odd prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn prime(p: u64) -> Result<Field, ScalarError> {
        if p == 2 {
            return Err(ScalarError::CharacteristicTwo);
        }
        if p > MAX_PRIME {
            return Err(ScalarError::PrimeTooLarge(p));
        }
        if !is_prime(p) {
            return Err(ScalarError::NotPrime(p));
        }
        Ok(Field::Prime(p))
    }

    /// 0 for ℚ.
    pub fn characteristic(self) -> u64 {
        match self {
            Field::Rational => 0,
            Field::Prime(p) => p,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Field::Prime(_))
    }

    pub fn check_same(self, other: Field) -> Result<(), ScalarError> {
        if self == other {
            Ok(())
        } else {
            Err(ScalarError::MixedFields(self, other))
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::Prime(p) => write!(f, "GF({p})"),
        }
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

// ---------------------------------------------------------------------------
// Rationals

#[derive(Clone, Debug)]
enum Rat {
    /// Lowest terms, positive denominator, numerator never `i64::MIN`.
    Small(i64, i64),
    /// Only used when the value does not fit `Small`.
    Big(BigRational),
}

fn fits(v: i128) -> bool {
    v >= -(i64::MAX as i128) && v <= i64::MAX as i128
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    fn from_i128(num: i128, den: i128) -> Rat {
        debug_assert!(den != 0);
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd_u128(num.unsigned_abs(), den as u128) as i128;
        if g > 1 {
            num /= g;
            den /= g;
        }
        if fits(num) && fits(den) {
            Rat::Small(num as i64, den as i64)
        } else {
            Rat::from_big(BigRational::new(BigInt::from(num), BigInt::from(den)))
        }
    }

    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) if n != i64::MIN => Rat::Small(n, d),
            _ => Rat::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Rat::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Rat::Big(r) => r.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        matches!(self, Rat::Small(0, _))
    }

    fn add(&self, other: &Rat) -> Rat {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    Rat::from_i128(a + c, b)
                } else {
                    Rat::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Rat::from_big(self.to_big() + other.to_big()),
        }
    }

    fn mul(&self, other: &Rat) -> Rat {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                Rat::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rat::from_big(self.to_big() * other.to_big()),
        }
    }

    fn neg(&self) -> Rat {
        match self {
            Rat::Small(a, b) => Rat::Small(-a, *b),
            Rat::Big(r) => Rat::Big(-r),
        }
    }

    fn inv(&self) -> Option<Rat> {
        match self {
            Rat::Small(0, _) => None,
            Rat::Small(a, b) => Some(Rat::from_i128(*b as i128, *a as i128)),
            Rat::Big(r) => Some(Rat::from_big(r.recip())),
        }
    }

    fn cmp(&self, other: &Rat) -> Ordering {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (self, other) {
            (Rat::Small(a, b), Rat::Small(c, d)) => a == c && b == d,
            (Rat::Big(x), Rat::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Rat::Small(a, b) => {
                0u8.hash(state);
                a.hash(state);
                b.hash(state);
            }
            Rat::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Scalars

/// An element of ℚ or GF(p).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Rational(Rat),
    Prime { p: u64, r: u64 },
}

impl Scalar {
    pub fn zero(field: Field) -> Scalar {
        Scalar::from_i64(field, 0)
    }

    pub fn one(field: Field) -> Scalar {
        Scalar::from_i64(field, 1)
    }

    pub fn from_i64(field: Field, v: i64) -> Scalar {
        match field {
            Field::Rational => Scalar(Repr::Rational(Rat::from_i128(v as i128, 1))),
            Field::Prime(p) => Scalar(Repr::Prime {
                p,
                r: v.rem_euclid(p as i64) as u64,
            }),
        }
    }

    /// A rational `num/den` in lowest terms.
    pub fn rational(num: BigInt, den: BigInt) -> Result<Scalar, ScalarError> {
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Ok(Scalar(Repr::Rational(Rat::from_big(BigRational::new(num, den)))))
    }

    /// Residue `r mod p`; `p` must be a supported odd prime.
    pub fn residue(p: u64, r: i64) -> Result<Scalar, ScalarError> {
        let field = Field::prime(p)?;
        Ok(Scalar::from_i64(field, r))
    }

    /// Maps an integer-valued rational into `field`; for GF(p) the
    /// denominator must be invertible.
    pub fn from_rational_parts(field: Field, num: &BigInt, den: &BigInt) -> Result<Scalar, ScalarError> {
        match field {
            Field::Rational => Scalar::rational(num.clone(), den.clone()),
            Field::Prime(p) => {
                let pb = BigInt::from(p);
                let n = num.mod_floor(&pb).to_u64().unwrap_or(0);
                let d = den.mod_floor(&pb).to_u64().unwrap_or(0);
                let n = Scalar(Repr::Prime { p, r: n });
                let d = Scalar(Repr::Prime { p, r: d });
                n.try_div(&d)
            }
        }
    }

    pub fn field(&self) -> Field {
        match &self.0 {
            Repr::Rational(_) => Field::Rational,
            Repr::Prime { p, .. } => Field::Prime(*p),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.0 {
            Repr::Rational(r) => r.is_zero(),
            Repr::Prime { r, .. } => *r == 0,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.0 {
            Repr::Rational(r) => matches!(r, Rat::Small(1, 1)),
            Repr::Prime { r, .. } => *r == 1,
        }
    }

    /// Numerator of a rational, or the residue of a GF(p) element.
    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Rational(Rat::Small(n, _)) => BigInt::from(*n),
            Repr::Rational(Rat::Big(r)) => r.numer().clone(),
            Repr::Prime { r, .. } => BigInt::from(*r),
        }
    }

    /// Denominator of a rational; 1 for GF(p) elements.
    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Rational(Rat::Small(_, d)) => BigInt::from(*d),
            Repr::Rational(Rat::Big(r)) => r.denom().clone(),
            Repr::Prime { .. } => BigInt::one(),
        }
    }

    /// The value as a small integer, when it is one (GF(p): the residue).
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Rational(Rat::Small(n, 1)) => Some(*n),
            Repr::Rational(_) => None,
            Repr::Prime { r, .. } => Some(*r as i64),
        }
    }

    /// True for negative rationals and for residues above `p/2`.
    pub fn is_negative_looking(&self) -> bool {
        match &self.0 {
            Repr::Rational(Rat::Small(n, _)) => *n < 0,
            Repr::Rational(Rat::Big(r)) => r.is_negative(),
            Repr::Prime { p, r } => *r > p / 2,
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match (&self.0, &other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Ok(Scalar(Repr::Rational(a.add(b)))),
            (Repr::Prime { p, r }, Repr::Prime { p: q, r: s }) if p == q => {
                Ok(Scalar(Repr::Prime { p: *p, r: (r + s) % p }))
            }
            _ => Err(ScalarError::MixedFields(self.field(), other.field())),
        }
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.try_add(&other.neg_ref())
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        match (&self.0, &other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => Ok(Scalar(Repr::Rational(a.mul(b)))),
            (Repr::Prime { p, r }, Repr::Prime { p: q, r: s }) if p == q => {
                Ok(Scalar(Repr::Prime { p: *p, r: (r * s) % p }))
            }
            _ => Err(ScalarError::MixedFields(self.field(), other.field())),
        }
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        self.field().check_same(other.field())?;
        self.try_mul(&other.inv()?)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        match &self.0 {
            Repr::Rational(a) => a
                .inv()
                .map(|r| Scalar(Repr::Rational(r)))
                .ok_or(ScalarError::DivisionByZero),
            Repr::Prime { p, r } => {
                if *r == 0 {
                    return Err(ScalarError::DivisionByZero);
                }
                Ok(Scalar(Repr::Prime {
                    p: *p,
                    r: pow_mod(*r, p - 2, *p),
                }))
            }
        }
    }

    fn neg_ref(&self) -> Scalar {
        match &self.0 {
            Repr::Rational(a) => Scalar(Repr::Rational(a.neg())),
            Repr::Prime { p, r } => Scalar(Repr::Prime {
                p: *p,
                r: if *r == 0 { 0 } else { p - r },
            }),
        }
    }

    pub fn pow(&self, mut e: u32) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one(self.field());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `"num/den"` for rationals, `"r mod p"` for GF(p).
    pub fn to_wire(&self) -> String {
        match &self.0 {
            Repr::Rational(_) => alloc::format!("{}/{}", self.numer(), self.denom()),
            Repr::Prime { p, r } => alloc::format!("{r} mod {p}"),
        }
    }

    /// Parses an integer or `a/b` literal into `field`.
    pub fn parse(field: Field, text: &str) -> Result<Scalar, ScalarError> {
        let bad = || ScalarError::Parse(text.to_string());
        let t = text.trim();
        let (num, den) = match t.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (t, "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        Scalar::from_rational_parts(field, &num, &den)
    }

    /// Parses the wire form produced by [`Scalar::to_wire`].
    pub fn from_wire(text: &str) -> Result<Scalar, ScalarError> {
        if let Some((r, p)) = text.split_once(" mod ") {
            let p: u64 = p.trim().parse().map_err(|_| ScalarError::Parse(text.to_string()))?;
            let field = Field::prime(p)?;
            Scalar::parse(field, r)
        } else {
            Scalar::parse(Field::Rational, text)
        }
    }
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total order used only for deterministic containers: rationals by value,
/// residues by representative, ℚ before GF(p).
impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Rational(a), Repr::Rational(b)) => a.cmp(b),
            (Repr::Prime { p, r }, Repr::Prime { p: q, r: s }) => (p, r).cmp(&(q, s)),
            (Repr::Rational(_), _) => Ordering::Less,
            _ => Ordering::Greater,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Rational(Rat::Small(n, 1)) => write!(f, "{n}"),
            Repr::Rational(Rat::Small(n, d)) => write!(f, "{n}/{d}"),
            Repr::Rational(Rat::Big(r)) => write!(f, "{r}"),
            Repr::Prime { r, .. } => write!(f, "{r}"),
        }
    }
}

// Operator forms panic on mixed fields; the fallible `try_*` methods are the
// checked interface. Internally every container pins its field at
// construction, so the operators only ever see matching operands.
macro_rules! binop {
    ($tr:ident, $m:ident, $checked:ident) => {
        impl ops::$tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                self.$checked(rhs).expect("scalar arithmetic across fields")
            }
        }
        impl ops::$tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$checked(&rhs).expect("scalar arithmetic across fields")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl ops::Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl ops::Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

// ---------------------------------------------------------------------------
// Coefficient polynomials

/// A monomial `t_{i1}^{e1} ... t_{ik}^{ek}` stored as sorted `(index, exponent)`
/// pairs with positive exponents. Ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(index: u32) -> Monomial {
        Monomial(alloc::vec![(index, 1)])
    }

    pub fn from_exponents(mut exps: Vec<(u32, u32)>) -> Monomial {
        exps.retain(|&(_, e)| e > 0);
        exps.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::with_capacity(exps.len());
        for (v, e) in exps {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn exponents(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent_of(&self, var: u32) -> u32 {
        self.0
            .iter()
            .find(|&&(v, _)| v == var)
            .map_or(0, |&(_, e)| e)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Exponents `e >= 1` become `((e - 1) mod (p - 1)) + 1`.
    pub fn frobenius_reduce(&self, p: u64) -> Monomial {
        let q = (p - 1) as u32;
        Monomial(self.0.iter().map(|&(v, e)| (v, (e - 1) % q + 1)).collect())
    }

    pub fn evaluate(&self, point: &BTreeMap<u32, Scalar>, field: Field) -> Scalar {
        let mut acc = Scalar::one(field);
        for &(v, e) in &self.0 {
            match point.get(&v) {
                Some(x) => acc = &acc * &x.pow(e),
                None => return Scalar::zero(field),
            }
        }
        acc
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            // Lex with t1 > t2 > ...: the first differing index decides.
            for (x, y) in self.0.iter().zip(other.0.iter()) {
                if x.0 != y.0 {
                    return y.0.cmp(&x.0);
                }
                if x.1 != y.1 {
                    return x.1.cmp(&y.1);
                }
            }
            self.0.len().cmp(&other.0.len())
        })
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, &(v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            write!(f, "t{v}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// Sparse polynomial in commuting indeterminates with coefficients in one field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoeffPoly {
    field: Field,
    terms: BTreeMap<Monomial, Scalar>,
}

impl CoeffPoly {
    pub fn zero(field: Field) -> CoeffPoly {
        CoeffPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Scalar) -> CoeffPoly {
        CoeffPoly::term(c, Monomial::one())
    }

    pub fn var(field: Field, index: u32) -> CoeffPoly {
        CoeffPoly::term(Scalar::one(field), Monomial::var(index))
    }

    pub fn term(c: Scalar, m: Monomial) -> CoeffPoly {
        let field = c.field();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        CoeffPoly { field, terms }
    }

    pub fn field(&self) -> Field {
        self.field
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero(self.field)),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn variables(&self) -> Vec<u32> {
        let mut vs: Vec<u32> = self
            .terms
            .keys()
            .flat_map(|m| m.0.iter().map(|&(v, _)| v))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + &c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn try_add(&self, other: &CoeffPoly) -> Result<CoeffPoly, ScalarError> {
        self.field.check_same(other.field)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &CoeffPoly) -> Result<CoeffPoly, ScalarError> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &CoeffPoly) -> Result<CoeffPoly, ScalarError> {
        self.field.check_same(other.field)?;
        let mut out = CoeffPoly::zero(self.field);
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.add_term(m.mul(n), c * d);
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> CoeffPoly {
        CoeffPoly {
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<CoeffPoly, ScalarError> {
        self.field.check_same(s.field())?;
        if s.is_zero() {
            return Ok(CoeffPoly::zero(self.field));
        }
        Ok(CoeffPoly {
            field: self.field,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        })
    }

    /// Reduces every exponent `e >= 1` to `((e - 1) mod (p - 1)) + 1`. The
    /// result is the unique representative of the same function on GF(p)
    /// points with all exponents below `p`, so it is zero exactly when `self`
    /// vanishes at every point.
    pub fn frobenius_reduce(&self) -> Result<CoeffPoly, ScalarError> {
        let p = match self.field {
            Field::Prime(p) => p,
            f => return Err(ScalarError::NotFinite(f)),
        };
        let mut out = CoeffPoly::zero(self.field);
        for (m, c) in &self.terms {
            out.add_term(m.frobenius_reduce(p), c.clone());
        }
        Ok(out)
    }

    /// Evaluates at `point`; missing indeterminates are zero.
    pub fn evaluate(&self, point: &BTreeMap<u32, Scalar>) -> Scalar {
        let mut acc = Scalar::zero(self.field);
        for (m, c) in &self.terms {
            acc = &acc + &(c * &m.evaluate(point, self.field));
        }
        acc
    }

    /// Splits into powers of `var`: `self = Σ_e coeff_e · var^e`.
    pub fn coefficients_in(&self, var: u32) -> BTreeMap<u32, CoeffPoly> {
        let mut out: BTreeMap<u32, CoeffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent_of(var);
            let rest = Monomial(m.0.iter().copied().filter(|&(v, _)| v != var).collect());
            out.entry(e)
                .or_insert_with(|| CoeffPoly::zero(self.field))
                .add_term(rest, c.clone());
        }
        out
    }

    pub fn max_degree_in(&self, var: u32) -> u32 {
        self.terms.keys().map(|m| m.exponent_of(var)).max().unwrap_or(0)
    }

    /// Sets one indeterminate to a value, keeping the others.
    pub fn substitute_var(&self, var: u32, value: &Scalar) -> CoeffPoly {
        let mut out = CoeffPoly::zero(self.field);
        for (e, rest) in self.coefficients_in(var) {
            let k = value.pow(e);
            for (m, c) in rest.terms {
                out.add_term(m, &c * &k);
            }
        }
        out
    }
}

impl fmt::Display for CoeffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Highest graded-lex term first.
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative_looking() && !self.field.is_finite();
            let mag = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.0.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{mag}*{m}")?;
            }
        }
        Ok(())
    }
}
