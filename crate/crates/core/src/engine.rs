//! Deciding identities of `M11(E)` and `M11(E1)`, computing identity and
//! consequence spaces, membership with certificates, witness search and the
//! substitution-relation checker.
//!
//! Two evaluation strategies decide whether `f = 0` holds:
//!
//! * multilinear `f`: each variable is a single matrix unit times a word
//!   (an even two-generator word on the diagonal, a generator off it, or the
//!   unit when unital). Every evaluation is `W ⊗ M` for a fixed Grassmann
//!   word `W` and an integer matrix `M` computed from the associative
//!   expansion, so the check is pure integer arithmetic.
//! * otherwise: one slot-generic matrix per variable (see
//!   [`slot_generic_matrix`]), evaluated symbolically. Its value vanishes
//!   exactly when `f` is an identity.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::freelie::{spanning_monomials, AssocPoly, FreeLieError, LiePoly, LieTerm, MultiDegree, Var};
use crate::grassmann::{
    GeneratorAllocator, GrassmannContext, GrassmannElement, GrassmannError, GrassmannWord, MAX_GENERATORS,
};
use crate::linalg::{Echelon, Insert, SparseVec};
use crate::scalars::{CoeffPoly, Field, Monomial, Scalar, ScalarError};
use crate::supermatrix::{
    eval_poly, eval_term, full_generic_matrix, slot_generators, slot_generic_matrix, CoeffNamer, Entry,
    MatrixError, SuperMatrix,
};

/// Largest total degree the space computations accept by default.
pub const DEFAULT_DEGREE_CAP: u32 = 7;

/// Largest generator budget for which a too-small budget is handled by
/// evaluating fully generic matrices on all words.
pub const TRUNCATED_LIMIT: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("polynomial is not multilinear")]
    NotMultilinear,
    #[error("polynomial is not multihomogeneous and cannot be split over {0}")]
    NotMultihomogeneous(Field),
    #[error("degree {degree} exceeds the cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },
    #[error("expected multidegree {expected}, found {found}")]
    MultidegreeMismatch { expected: MultiDegree, found: MultiDegree },
    #[error("field mismatch: {0} and {1}")]
    FieldMismatch(Field, Field),
    #[error("generator budget {have} is below the {need} needed and above the exhaustive limit")]
    Budget { have: u32, need: u32 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    FreeLie(#[from] FreeLieError),
    #[error("internal check failed: {0}")]
    Internal(String),
}

/// Which algebra: the field, whether the Grassmann algebra has a unit, and
/// an optional bound on the number of generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AlgebraSpec {
    pub field: Field,
    pub unital: bool,
    pub generators: Option<u32>,
}

impl AlgebraSpec {
    pub fn new(field: Field, unital: bool) -> AlgebraSpec {
        AlgebraSpec {
            field,
            unital,
            generators: None,
        }
    }

    pub fn with_generators(self, n: u32) -> AlgebraSpec {
        AlgebraSpec {
            generators: Some(n),
            ..self
        }
    }

    fn check_field(&self, f: &LiePoly) -> Result<(), EngineError> {
        if f.field() != self.field {
            return Err(EngineError::FieldMismatch(self.field, f.field()));
        }
        Ok(())
    }
}

impl fmt::Display for AlgebraSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = if self.unital { "E1" } else { "E" };
        write!(f, "M11({e}) over {}", self.field)?;
        if let Some(n) = self.generators {
            write!(f, " with {n} generators")?;
        }
        Ok(())
    }
}

/// A concrete assignment at which a polynomial does not vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub assignment: BTreeMap<Var, SuperMatrix>,
    pub value: SuperMatrix,
}

impl Witness {
    pub fn replay(&self, f: &LiePoly) -> Result<SuperMatrix, EngineError> {
        Ok(eval_poly(f, &self.assignment)?)
    }

    /// Re-evaluates `f` and checks that the stored value is reproduced and
    /// nonzero.
    pub fn confirms(&self, f: &LiePoly) -> Result<bool, EngineError> {
        let v = self.replay(f)?;
        Ok(!v.is_zero() && v == self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Identity,
    NonIdentity(Witness),
    /// No counterexample inside the stated bound.
    IdentityUpToBound(String),
}

impl Verdict {
    /// True for `Identity` and `IdentityUpToBound`.
    pub fn holds(&self) -> bool {
        !matches!(self, Verdict::NonIdentity(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::NonIdentity(w) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Identity => f.write_str("identity"),
            Verdict::NonIdentity(_) => f.write_str("non-identity"),
            Verdict::IdentityUpToBound(b) => write!(f, "identity up to bound ({b})"),
        }
    }
}

// ---------------------------------------------------------------------------
// Multilinear evaluation by matrix-unit tuples

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    EvenA,
    EvenC,
    OddB,
    OddD,
    UnitA,
    UnitC,
}

const PLAIN_SLOTS: [Slot; 4] = [Slot::EvenA, Slot::EvenC, Slot::OddB, Slot::OddD];
const UNITAL_SLOTS: [Slot; 6] = [
    Slot::EvenA,
    Slot::EvenC,
    Slot::OddB,
    Slot::OddD,
    Slot::UnitA,
    Slot::UnitC,
];

impl Slot {
    fn all(unital: bool) -> &'static [Slot] {
        if unital {
            &UNITAL_SLOTS
        } else {
            &PLAIN_SLOTS
        }
    }

    fn rc(self) -> (usize, usize) {
        match self {
            Slot::EvenA | Slot::UnitA => (0, 0),
            Slot::EvenC | Slot::UnitC => (1, 1),
            Slot::OddB => (0, 1),
            Slot::OddD => (1, 0),
        }
    }

    fn odd(self) -> bool {
        matches!(self, Slot::OddB | Slot::OddD)
    }

    fn generators(self) -> u32 {
        match self {
            Slot::EvenA | Slot::EvenC => 2,
            Slot::OddB | Slot::OddD => 1,
            Slot::UnitA | Slot::UnitC => 0,
        }
    }

    fn entry(self) -> Entry {
        let (r, c) = self.rc();
        Entry::from_position(r as u8 + 1, c as u8 + 1).expect("2x2 position")
    }
}

/// Associative words over variable indices with integer coefficients.
type IntWords = Vec<(Vec<u8>, i64)>;

fn index_words(words: impl IntoIterator<Item = (Vec<Var>, i64)>, vars: &[Var]) -> IntWords {
    words
        .into_iter()
        .map(|(w, c)| {
            let idx = w
                .iter()
                .map(|v| vars.iter().position(|u| u == v).expect("variable listed") as u8)
                .collect();
            (idx, c)
        })
        .collect()
}

/// Integer expansion of `f` with denominators cleared (a nonzero rescaling,
/// which does not change where `f` vanishes).
fn integer_expansion(f: &LiePoly, vars: &[Var]) -> Result<IntWords, EngineError> {
    let e = f.expand();
    let field = f.field();
    let mut lcm = num_bigint::BigInt::from(1);
    if !field.is_finite() {
        for (_, c) in e.terms() {
            lcm = num_integer::Integer::lcm(&lcm, &c.denom());
        }
    }
    let overflow = || EngineError::Internal("coefficient does not fit in 64 bits".to_string());
    let mut words = Vec::new();
    for (w, c) in e.terms() {
        let k = if field.is_finite() {
            c.to_i64().ok_or_else(overflow)?
        } else {
            let n = c.numer() * (&lcm / c.denom());
            i64::try_from(n).map_err(|_| overflow())?
        };
        words.push((w.clone(), k));
    }
    Ok(index_words(words, vars))
}

/// The integer matrix `M` with `f(tuple) = W ⊗ M`, entries in
/// `A, B, D, C` order.
fn tuple_value(words: &[(Vec<u8>, i64)], slots: &[Slot]) -> [i64; 4] {
    let mut out = [0i64; 4];
    'word: for (w, c) in words {
        let (r0, mut col) = slots[w[0] as usize].rc();
        for &v in &w[1..] {
            let (r, cc) = slots[v as usize].rc();
            if r != col {
                continue 'word;
            }
            col = cc;
        }
        let mut inversions = 0u32;
        for i in 0..w.len() {
            if !slots[w[i] as usize].odd() {
                continue;
            }
            for &b in &w[i + 1..] {
                if slots[b as usize].odd() && b < w[i] {
                    inversions += 1;
                }
            }
        }
        let s = if inversions.is_multiple_of(2) { *c } else { -*c };
        out[r0 * 2 + col] += s;
    }
    out
}

fn is_zero_in(v: i64, field: Field) -> bool {
    match field {
        Field::Rational => v == 0,
        Field::Prime(p) => v.rem_euclid(p as i64) == 0,
    }
}

/// Odometer over all slot tuples using at most `budget` generators.
struct Tuples {
    choices: &'static [Slot],
    idx: Vec<usize>,
    budget: Option<u32>,
    done: bool,
}

impl Tuples {
    fn new(n: usize, unital: bool, budget: Option<u32>) -> Tuples {
        Tuples {
            choices: Slot::all(unital),
            idx: vec![0; n],
            budget,
            done: false,
        }
    }

    fn fits(&self) -> bool {
        match self.budget {
            None => true,
            Some(b) => self.idx.iter().map(|&i| self.choices[i].generators()).sum::<u32>() <= b,
        }
    }

    fn advance(&mut self) {
        for k in (0..self.idx.len()).rev() {
            self.idx[k] += 1;
            if self.idx[k] < self.choices.len() {
                return;
            }
            self.idx[k] = 0;
        }
        self.done = true;
    }
}

impl Iterator for Tuples {
    type Item = Vec<Slot>;

    fn next(&mut self) -> Option<Vec<Slot>> {
        while !self.done {
            let fits = self.fits();
            let cur: Vec<Slot> = self.idx.iter().map(|&i| self.choices[i]).collect();
            self.advance();
            if self.idx.is_empty() {
                self.done = true;
            }
            if fits {
                return Some(cur);
            }
        }
        None
    }
}

fn tuple_assignment(vars: &[Var], slots: &[Slot], field: Field, unital: bool) -> Result<BTreeMap<Var, SuperMatrix>, EngineError> {
    let total: u32 = slots.iter().map(|s| s.generators()).sum();
    let ctx = GrassmannContext::new(field, unital, total.max(1));
    let mut alloc = GeneratorAllocator::new(total);
    let one = Scalar::one(field);
    let mut out = BTreeMap::new();
    for (v, s) in vars.iter().zip(slots) {
        let gens = alloc.fresh_block(s.generators() as usize)?;
        let w = GrassmannWord::from_generators(&gens);
        let value = GrassmannElement::scalar_word(ctx, w, one.clone())?;
        out.insert(*v, SuperMatrix::unit(s.entry(), value)?);
    }
    Ok(out)
}

fn witness_at(f: &LiePoly, assignment: BTreeMap<Var, SuperMatrix>) -> Result<Witness, EngineError> {
    let value = eval_poly(f, &assignment)?;
    if value.is_zero() {
        return Err(EngineError::Internal("predicted witness evaluates to zero".to_string()));
    }
    Ok(Witness { assignment, value })
}

fn sorted_vars(f: &LiePoly) -> Vec<Var> {
    f.variables().into_iter().collect()
}

/// Decides a multilinear `f` by running over all matrix-unit tuples.
pub fn is_identity_multilinear(f: &LiePoly, spec: &AlgebraSpec) -> Result<Verdict, EngineError> {
    spec.check_field(f)?;
    if f.expand().is_zero() {
        return Ok(Verdict::Identity);
    }
    if !f.is_multilinear() {
        return Err(EngineError::NotMultilinear);
    }
    let vars = sorted_vars(f);
    let words = integer_expansion(f, &vars)?;
    let n = vars.len() as u32;
    let budget = spec.generators.filter(|&b| b < 2 * n);
    for slots in Tuples::new(vars.len(), spec.unital, budget) {
        let v = tuple_value(&words, &slots);
        if v.iter().any(|&x| !is_zero_in(x, spec.field)) {
            let asg = tuple_assignment(&vars, &slots, spec.field, spec.unital)?;
            return Ok(Verdict::NonIdentity(witness_at(f, asg)?));
        }
    }
    Ok(match budget {
        Some(b) => Verdict::IdentityUpToBound(format!("substitutions using at most {b} generators")),
        None => Verdict::Identity,
    })
}

// ---------------------------------------------------------------------------
// General evaluation at generic matrices

struct GenericPoint {
    matrices: BTreeMap<Var, SuperMatrix>,
    truncated: Option<u32>,
}

fn generic_point(degrees: &MultiDegree, spec: &AlgebraSpec) -> Result<GenericPoint, EngineError> {
    let need: u32 = degrees.iter().map(|(_, d)| slot_generators(d)).sum();
    let mut namer = CoeffNamer::new();
    let mut matrices = BTreeMap::new();
    match spec.generators {
        Some(n) if n < need => {
            if n > TRUNCATED_LIMIT {
                return Err(EngineError::Budget { have: n, need });
            }
            let ctx = GrassmannContext::new(spec.field, spec.unital, n);
            for v in degrees.vars() {
                matrices.insert(v, full_generic_matrix(ctx, &mut namer)?);
            }
            Ok(GenericPoint {
                matrices,
                truncated: Some(n),
            })
        }
        _ => {
            if need > MAX_GENERATORS {
                return Err(EngineError::Budget { have: MAX_GENERATORS, need });
            }
            let ctx = GrassmannContext::new(spec.field, spec.unital, need.max(1));
            let mut alloc = GeneratorAllocator::new(need);
            for (v, d) in degrees.iter() {
                matrices.insert(v, slot_generic_matrix(ctx, &mut alloc, d, &mut namer)?);
            }
            Ok(GenericPoint {
                matrices,
                truncated: None,
            })
        }
    }
}

fn reduce_if_finite(m: SuperMatrix) -> Result<SuperMatrix, EngineError> {
    if m.context().field.is_finite() {
        Ok(m.frobenius_reduce()?)
    } else {
        Ok(m)
    }
}

/// A point where the nonzero coefficient polynomial `p` does not vanish.
/// Over a finite field `p` must be Frobenius-reduced.
fn nonzero_point(p: &CoeffPoly) -> Result<BTreeMap<u32, Scalar>, EngineError> {
    let field = p.field();
    let mut cur = p.clone();
    let mut point = BTreeMap::new();
    for v in p.variables() {
        let candidates: Vec<Scalar> = match field {
            Field::Prime(q) => (0..q as i64).map(|k| Scalar::from_i64(field, k)).collect(),
            Field::Rational => (0..=cur.max_degree_in(v) as i64)
                .map(|k| Scalar::from_i64(field, k))
                .collect(),
        };
        let mut found = false;
        for c in candidates {
            let mut s = cur.substitute_var(v, &c);
            if field.is_finite() {
                s = s.frobenius_reduce()?;
            }
            if !s.is_zero() {
                cur = s;
                point.insert(v, c);
                found = true;
                break;
            }
        }
        if !found {
            return Err(EngineError::Internal("no nonvanishing point".to_string()));
        }
    }
    Ok(point)
}

/// Drops words from the assignment while `f` stays nonzero.
fn prune(f: &LiePoly, mut asg: BTreeMap<Var, SuperMatrix>) -> Result<BTreeMap<Var, SuperMatrix>, EngineError> {
    let total: usize = asg
        .values()
        .map(|m| Entry::ALL.iter().map(|&e| m.entry(e).len()).sum::<usize>())
        .sum();
    if total > 48 || f.total_degree() > 6 {
        return Ok(asg);
    }
    let vars: Vec<Var> = asg.keys().copied().collect();
    for v in vars {
        for e in Entry::ALL {
            let words: Vec<GrassmannWord> = asg[&v].entry(e).terms().map(|(w, _)| *w).collect();
            for w in words {
                let m = &asg[&v];
                let ctx = m.context();
                let mut entries: Vec<GrassmannElement> = Entry::ALL.iter().map(|&x| m.entry(x).clone()).collect();
                let k = Entry::ALL.iter().position(|&x| x == e).expect("entry");
                let coeff = entries[k].coefficient(w).cloned().expect("word present");
                entries[k] = entries[k].sub(&GrassmannElement::monomial(ctx, w, coeff)?)?;
                let candidate = SuperMatrix::new(
                    entries[0].clone(),
                    entries[1].clone(),
                    entries[2].clone(),
                    entries[3].clone(),
                )?;
                let mut trial = asg.clone();
                trial.insert(v, candidate);
                if !eval_poly(f, &trial)?.is_zero() {
                    asg = trial;
                }
            }
        }
    }
    Ok(asg)
}

fn witness_from_generic(f: &LiePoly, point: &GenericPoint, value: &SuperMatrix) -> Result<Witness, EngineError> {
    let coeff = Entry::ALL
        .iter()
        .flat_map(|&e| value.entry(e).terms().map(|(_, c)| c.clone()))
        .find(|c| !c.is_zero())
        .ok_or_else(|| EngineError::Internal("value has no nonzero coefficient".to_string()))?;
    let at = nonzero_point(&coeff)?;
    let asg: BTreeMap<Var, SuperMatrix> = point
        .matrices
        .iter()
        .map(|(v, m)| (*v, m.specialize(&at)))
        .collect();
    let asg = prune(f, asg)?;
    witness_at(f, asg)
}

/// Decides any `f` by one symbolic evaluation at slot-generic matrices.
/// With a generator budget below the slot requirement (and at most
/// [`TRUNCATED_LIMIT`]) it evaluates fully generic matrices on that many
/// generators instead; a zero result then only holds up to the budget.
pub fn is_identity_general(f: &LiePoly, spec: &AlgebraSpec) -> Result<Verdict, EngineError> {
    spec.check_field(f)?;
    if f.expand().is_zero() {
        return Ok(Verdict::Identity);
    }
    let point = generic_point(&f.max_degrees(), spec)?;
    let value = reduce_if_finite(eval_poly(f, &point.matrices)?)?;
    if value.is_zero() {
        return Ok(match point.truncated {
            Some(n) => Verdict::IdentityUpToBound(format!("all substitutions in M11 over {n} generators")),
            None => Verdict::Identity,
        });
    }
    Ok(Verdict::NonIdentity(witness_from_generic(f, &point, &value)?))
}

/// Multilinear inputs take the tuple path, everything else the generic one.
pub fn is_identity(f: &LiePoly, spec: &AlgebraSpec) -> Result<Verdict, EngineError> {
    if f.is_multilinear() && spec.generators.is_none() {
        is_identity_multilinear(f, spec)
    } else {
        is_identity_general(f, spec)
    }
}

// ---------------------------------------------------------------------------
// Subspaces of a multidegree component

/// An element of a spanning set, kept for certificates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Spanning {
    pub label: String,
    pub poly: LiePoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Membership {
    pub member: bool,
    /// `f = Σ c · poly` when `member` holds.
    pub certificate: Vec<(Scalar, Spanning)>,
}

/// A subspace of one multidegree component of the free Lie algebra, stored
/// as the reduced row echelon form of associative expansions.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    field: Field,
    degree: MultiDegree,
    index: BTreeMap<Vec<Var>, usize>,
    words: Vec<Vec<Var>>,
    echelon: Echelon,
    sources: BTreeMap<usize, Spanning>,
    bound: Option<String>,
}

impl SubspaceBasis {
    pub fn new(field: Field, degree: MultiDegree) -> SubspaceBasis {
        let words = degree.words();
        let index = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        SubspaceBasis {
            field,
            degree,
            index,
            words,
            echelon: Echelon::new(field, true),
            sources: BTreeMap::new(),
            bound: None,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn degree(&self) -> &MultiDegree {
        &self.degree
    }

    pub fn dim(&self) -> usize {
        self.echelon.rank()
    }

    /// Description of the search bound when the space may be smaller than
    /// the true one.
    pub fn bound(&self) -> Option<&str> {
        self.bound.as_deref()
    }

    pub fn set_bound(&mut self, bound: Option<String>) {
        self.bound = bound;
    }

    /// Independent spanning elements in insertion order.
    pub fn basis(&self) -> Vec<&Spanning> {
        self.sources.values().collect()
    }

    /// Reduced echelon rows as associative polynomials.
    pub fn rows(&self) -> Vec<AssocPoly> {
        self.echelon.rows().into_iter().map(|r| self.to_assoc(r)).collect()
    }

    fn to_assoc(&self, v: &SparseVec) -> AssocPoly {
        let mut out = AssocPoly::zero(self.field);
        for (i, c) in v.entries() {
            out.add_word(self.words[*i].clone(), c.clone());
        }
        out
    }

    fn coordinates(&self, e: &AssocPoly) -> Result<SparseVec, EngineError> {
        let mut pairs = Vec::with_capacity(e.len());
        for (w, c) in e.terms() {
            let i = self.index.get(w).ok_or_else(|| {
                let mut found = MultiDegree::new();
                for v in w {
                    found.add_var(*v, 1);
                }
                EngineError::MultidegreeMismatch {
                    expected: self.degree.clone(),
                    found,
                }
            })?;
            pairs.push((*i, c.clone()));
        }
        Ok(SparseVec::from_pairs(pairs))
    }

    fn check_poly(&self, f: &LiePoly) -> Result<(), EngineError> {
        if f.field() != self.field {
            return Err(EngineError::FieldMismatch(self.field, f.field()));
        }
        match f.multidegree() {
            Some(d) if d == self.degree || f.is_zero() => Ok(()),
            Some(d) => Err(EngineError::MultidegreeMismatch {
                expected: self.degree.clone(),
                found: d,
            }),
            None => Err(EngineError::MultidegreeMismatch {
                expected: self.degree.clone(),
                found: f.max_degrees(),
            }),
        }
    }

    /// Adds `poly`; returns whether it enlarged the space.
    pub fn insert(&mut self, poly: LiePoly, label: impl Into<String>) -> Result<bool, EngineError> {
        self.check_poly(&poly)?;
        let e = poly.expand();
        self.insert_expanded(&e, || Spanning {
            label: label.into(),
            poly,
        })
    }

    fn insert_expanded(&mut self, e: &AssocPoly, source: impl FnOnce() -> Spanning) -> Result<bool, EngineError> {
        let v = self.coordinates(e)?;
        match self.echelon.insert(v) {
            Insert::Independent { source: s, .. } => {
                self.sources.insert(s, source());
                Ok(true)
            }
            Insert::Dependent { .. } => Ok(false),
        }
    }

    /// Membership test with a certificate checked by re-expansion.
    pub fn contains(&self, f: &LiePoly) -> Result<Membership, EngineError> {
        self.check_poly(f)?;
        let target = f.expand();
        let v = self.coordinates(&target)?;
        let (residual, combo) = self.echelon.reduce(&v);
        if !residual.is_zero() {
            return Ok(Membership {
                member: false,
                certificate: Vec::new(),
            });
        }
        let combo = combo.expect("tracking is on");
        let mut certificate = Vec::new();
        let mut check = AssocPoly::zero(self.field);
        for (s, c) in combo.entries() {
            let src = self
                .sources
                .get(s)
                .ok_or_else(|| EngineError::Internal(format!("missing source {s}")))?;
            check = check.try_add(&src.poly.expand().scale(c)?)?;
            certificate.push((c.clone(), src.clone()));
        }
        if check != target {
            return Err(EngineError::Internal("certificate does not reproduce the input".to_string()));
        }
        Ok(Membership {
            member: true,
            certificate,
        })
    }

    fn check_compatible(&self, other: &SubspaceBasis) -> Result<(), EngineError> {
        if self.field != other.field {
            return Err(EngineError::FieldMismatch(self.field, other.field));
        }
        if self.degree != other.degree {
            return Err(EngineError::MultidegreeMismatch {
                expected: self.degree.clone(),
                found: other.degree.clone(),
            });
        }
        Ok(())
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> Result<bool, EngineError> {
        self.check_compatible(other)?;
        Ok(self.echelon.rows().into_iter().all(|r| other.echelon.contains(r)))
    }
}

/// Equal as subspaces: same dimension and one inside the other.
pub fn spaces_equal(a: &SubspaceBasis, b: &SubspaceBasis) -> Result<bool, EngineError> {
    a.check_compatible(b)?;
    Ok(a.dim() == b.dim() && a.is_subspace_of(b)?)
}

/// A linearly independent subset of the left-normalized spanning monomials
/// of `d`; it is a basis of the component.
pub fn independent_monomials(d: &MultiDegree, field: Field) -> Vec<LieTerm> {
    let words = d.words();
    let index: BTreeMap<&Vec<Var>, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut ech = Echelon::new(field, false);
    let mut out = Vec::new();
    for t in spanning_monomials(d) {
        let v = SparseVec::from_pairs(
            t.expand_integer()
                .into_iter()
                .map(|(w, k)| (index[&w], Scalar::from_i64(field, k))),
        );
        if matches!(ech.insert(v), Insert::Independent { .. }) {
            out.push(t);
        }
    }
    out
}

/// The identities of the given algebra inside the multidegree-`d`
/// component, as the kernel of evaluation restricted to a monomial basis.
pub fn identity_space(d: &MultiDegree, spec: &AlgebraSpec, cap: u32) -> Result<SubspaceBasis, EngineError> {
    if d.total() > cap {
        return Err(EngineError::DegreeCap { degree: d.total(), cap });
    }
    let field = spec.field;
    let mut space = SubspaceBasis::new(field, d.clone());
    if d.total() == 0 {
        return Ok(space);
    }
    let monos = independent_monomials(d, field);
    let k = monos.len();
    let mut columns = Echelon::new(field, false);
    let mut bound = None;
    if d.is_multilinear() {
        let vars: Vec<Var> = d.vars().collect();
        let n = vars.len() as u32;
        let expansions: Vec<IntWords> = monos
            .iter()
            .map(|t| index_words(t.expand_integer(), &vars))
            .collect();
        let budget = spec.generators.filter(|&b| b < 2 * n);
        if let Some(b) = budget {
            bound = Some(format!("substitutions using at most {b} generators"));
        }
        let mut seen: BTreeSet<Vec<i64>> = BTreeSet::new();
        for slots in Tuples::new(vars.len(), spec.unital, budget) {
            let values: Vec<[i64; 4]> = expansions.iter().map(|w| tuple_value(w, &slots)).collect();
            for e in 0..4 {
                let mut col: Vec<i64> = values.iter().map(|v| v[e]).collect();
                if let Field::Prime(p) = field {
                    for x in &mut col {
                        *x = x.rem_euclid(p as i64);
                    }
                }
                if col.iter().all(|&x| x == 0) || !seen.insert(col.clone()) {
                    continue;
                }
                columns.insert(SparseVec::from_pairs(
                    col.iter().enumerate().map(|(j, &x)| (j, Scalar::from_i64(field, x))),
                ));
            }
            if columns.rank() == k {
                break;
            }
        }
    } else {
        let point = generic_point(d, spec)?;
        if let Some(n) = point.truncated {
            bound = Some(format!("all substitutions in M11 over {n} generators"));
        }
        let mut coords: BTreeMap<(Entry, GrassmannWord, Monomial), Vec<(usize, Scalar)>> = BTreeMap::new();
        for (j, t) in monos.iter().enumerate() {
            let m = reduce_if_finite(eval_term(t, &point.matrices)?)?;
            for e in Entry::ALL {
                for (w, p) in m.entry(e).terms() {
                    for (mono, c) in p.terms() {
                        coords.entry((e, *w, mono.clone())).or_default().push((j, c.clone()));
                    }
                }
            }
        }
        for (_, col) in coords {
            columns.insert(SparseVec::from_pairs(col));
            if columns.rank() == k {
                break;
            }
        }
    }
    for (i, c) in columns.null_space(k).into_iter().enumerate() {
        let poly = LiePoly::from_terms(field, c.entries().iter().map(|(j, x)| (x.clone(), monos[*j].clone())))?;
        space.insert(poly, format!("kernel vector {}", i + 1))?;
    }
    space.bound = bound;
    Ok(space)
}

// ---------------------------------------------------------------------------
// Consequence spaces

/// Limits on the substitution instances used to span a consequence space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConsequenceBounds {
    /// Monomials per substituted variable: 1, or 2 for sums `m + m'`.
    pub summands: u32,
    /// How many variables of one instance may receive a sum.
    pub max_pairs: u32,
    pub cap: u32,
}

impl Default for ConsequenceBounds {
    fn default() -> Self {
        ConsequenceBounds {
            summands: 2,
            max_pairs: 1,
            cap: DEFAULT_DEGREE_CAP,
        }
    }
}

impl fmt::Display for ConsequenceBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "substitutions by at most {} monomials in at most {} variable(s), degree cap {}",
            self.summands, self.max_pairs, self.cap
        )
    }
}

struct Mono {
    degree: MultiDegree,
    poly: LiePoly,
    text: String,
}

#[derive(Clone, Copy)]
enum Choice {
    Single(usize),
    Pair(usize, usize, u32),
}

struct Enumerator<'a> {
    vars: &'a [(Var, u32)],
    monos: &'a [Mono],
    pairable: &'a BTreeSet<Var>,
    summands: u32,
}

impl Enumerator<'_> {
    fn run(&self, pos: usize, remaining: &MultiDegree, pairs_left: u32, cur: &mut Vec<Choice>, out: &mut Vec<Vec<Choice>>) {
        if pos == self.vars.len() {
            out.push(cur.clone());
            return;
        }
        let (v, dv) = self.vars[pos];
        let fitting: Vec<usize> = (0..self.monos.len())
            .filter(|&i| self.monos[i].degree.fits_in(remaining))
            .collect();
        for &i in &fitting {
            if let Some(rest) = remaining.minus(&self.monos[i].degree.times(dv)) {
                cur.push(Choice::Single(i));
                self.run(pos + 1, &rest, pairs_left, cur, out);
                cur.pop();
            }
        }
        if self.summands >= 2 && pairs_left > 0 && dv >= 2 && self.pairable.contains(&v) {
            for (a, &i) in fitting.iter().enumerate() {
                for &k in &fitting[a + 1..] {
                    for j in 1..dv {
                        let need = self.monos[i].degree.times(j).plus(&self.monos[k].degree.times(dv - j));
                        if let Some(rest) = remaining.minus(&need) {
                            cur.push(Choice::Pair(i, k, j));
                            self.run(pos + 1, &rest, pairs_left - 1, cur, out);
                            cur.pop();
                        }
                    }
                }
            }
        }
    }
}

/// Exponent class of `λ^e` as a function on the field: over `GF(p)` the
/// powers `e ≥ 1` repeat with period `p − 1`.
fn power_class(e: u32, field: Field) -> u32 {
    match field {
        Field::Prime(p) if e > 0 => ((e - 1) % (p as u32 - 1)) + 1,
        _ => e,
    }
}

/// `[e, a1, ..., ar]` on the level of associative expansions.
fn wrap_expansion(e: &AssocPoly, letters: &[Var]) -> Result<AssocPoly, EngineError> {
    let mut out = e.clone();
    for &v in letters {
        let a = AssocPoly::word(e.field(), vec![v]);
        out = out.try_mul(&a)?.try_sub(&a.try_mul(&out)?)?;
    }
    Ok(out)
}

fn max_fresh(f: &LiePoly) -> u32 {
    f.variables()
        .iter()
        .filter_map(|v| match v {
            Var::Fresh(k) => Some(*k),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

fn letters_text(letters: &[Var]) -> String {
    letters.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// The consequences of `gens` in the multidegree-`d` component, spanned by
/// `[g(m1, ..., mr), a1, ..., as]` with monomial (or, within `bounds`,
/// two-monomial) substitutions and single-letter wraps. The result is exact
/// when every generator is multilinear; otherwise it is a lower bound and
/// carries a bound note.
pub fn consequence_space(
    gens: &[(String, LiePoly)],
    d: &MultiDegree,
    field: Field,
    bounds: ConsequenceBounds,
) -> Result<SubspaceBasis, EngineError> {
    if d.total() > bounds.cap {
        return Err(EngineError::DegreeCap {
            degree: d.total(),
            cap: bounds.cap,
        });
    }
    let mut space = SubspaceBasis::new(field, d.clone());
    let full_dim = independent_monomials(d, field).len();
    let mut monos = Vec::new();
    for delta in d.sub_degrees() {
        if delta.total() == 0 {
            continue;
        }
        for t in independent_monomials(&delta, field) {
            monos.push(Mono {
                degree: delta.clone(),
                text: t.to_string(),
                poly: LiePoly::monomial(field, t),
            });
        }
    }
    let mut exact = true;
    for (name, g) in gens {
        if g.field() != field {
            return Err(EngineError::FieldMismatch(field, g.field()));
        }
        let comps = g.multidegree_components();
        if comps.len() > 1 {
            if let Field::Prime(p) = field {
                if g.max_degrees().iter().any(|(_, k)| k as u64 >= p) {
                    return Err(EngineError::NotMultihomogeneous(field));
                }
            }
        }
        for (hd, h) in comps {
            if h.expand().is_zero() {
                continue;
            }
            if !hd.is_multilinear() {
                exact = false;
            }
            add_instances(&mut space, name, &h, &hd, &monos, bounds, full_dim)?;
            if space.dim() == full_dim {
                break;
            }
        }
    }
    if !exact {
        space.bound = Some(bounds.to_string());
    }
    Ok(space)
}

fn add_instances(
    space: &mut SubspaceBasis,
    name: &str,
    h: &LiePoly,
    hd: &MultiDegree,
    monos: &[Mono],
    bounds: ConsequenceBounds,
    full_dim: usize,
) -> Result<(), EngineError> {
    let field = space.field;
    let d = space.degree.clone();
    let vars: Vec<(Var, u32)> = hd.iter().collect();
    let base = max_fresh(h) + 1;
    let (fa, fb) = (Var::Fresh(base), Var::Fresh(base + 1));
    let mono_var = |v: Var| LiePoly::monomial(field, LieTerm::Var(v));
    let mut splits: BTreeMap<Var, BTreeMap<u32, LiePoly>> = BTreeMap::new();
    if bounds.summands >= 2 && bounds.max_pairs > 0 {
        for &(v, dv) in &vars {
            if dv < 2 {
                continue;
            }
            let sum = mono_var(fa).try_add(&mono_var(fb))?;
            let img = h.substitute(&BTreeMap::from([(v, sum)]));
            let parts = img
                .multidegree_components()
                .into_iter()
                .map(|(md, p)| (md.get(fa), p))
                .collect();
            splits.insert(v, parts);
        }
    }
    let pairable: BTreeSet<Var> = splits.keys().copied().collect();
    let en = Enumerator {
        vars: &vars,
        monos,
        pairable: &pairable,
        summands: bounds.summands,
    };
    let mut assignments = Vec::new();
    en.run(0, &d, bounds.max_pairs, &mut Vec::new(), &mut assignments);
    for choice in assignments {
        let mut map = BTreeMap::new();
        let mut pair = None;
        let mut label_parts = Vec::new();
        for (&(v, _), c) in vars.iter().zip(&choice) {
            match *c {
                Choice::Single(i) => {
                    map.insert(v, monos[i].poly.clone());
                    label_parts.push(format!("{v}->{}", monos[i].text));
                }
                Choice::Pair(i, k, j) => {
                    pair = Some((v, i, k, j));
                    label_parts.push(format!("{v}->{}+{} (part {j})", monos[i].text, monos[k].text));
                }
            }
        }
        let p = match pair {
            None => h.substitute(&map),
            Some((v, i, k, j)) => {
                map.insert(fa, monos[i].poly.clone());
                map.insert(fb, monos[k].poly.clone());
                let dv = hd.get(v);
                let class = (power_class(j, field), power_class(dv - j, field));
                let mut acc = LiePoly::zero(field);
                for (jj, part) in &splits[&v] {
                    if *jj == 0 || *jj == dv {
                        continue;
                    }
                    if (power_class(*jj, field), power_class(dv - jj, field)) == class {
                        acc = acc.try_add(&part.substitute(&map))?;
                    }
                }
                acc
            }
        };
        let pe = p.expand();
        if pe.is_zero() {
            continue;
        }
        let Some(pd) = p.multidegree() else { continue };
        let Some(rest) = d.minus(&pd) else { continue };
        let orderings = if rest.total() == 0 { vec![Vec::new()] } else { rest.words() };
        let instance = format!("{name}({})", label_parts.join(", "));
        for letters in orderings {
            let e = wrap_expansion(&pe, &letters)?;
            if e.is_zero() {
                continue;
            }
            space.insert_expanded(&e, || Spanning {
                label: if letters.is_empty() {
                    instance.clone()
                } else {
                    format!("[{instance}, {}]", letters_text(&letters))
                },
                poly: p.wrap(&letters),
            })?;
            if space.dim() == full_dim {
                return Ok(());
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Witness search

/// Where a witness search looks, in order.
#[derive(Debug, Clone)]
pub struct SearchStrategy {
    pub curated: Vec<(String, BTreeMap<Var, SuperMatrix>)>,
    pub exhaustive: bool,
    pub random_trials: u32,
    pub seed: u64,
}

impl Default for SearchStrategy {
    fn default() -> Self {
        SearchStrategy {
            curated: Vec::new(),
            exhaustive: true,
            random_trials: 200,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchStage {
    Curated(String),
    Exhaustive,
    Random { trial: u32 },
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub witness: Option<Witness>,
    pub stage: Option<SearchStage>,
    /// True when the exhaustive stage ran to completion without a witness.
    pub exhausted: bool,
}

fn random_element(rng: &mut ChaCha8Rng, ctx: GrassmannContext, parity: u8) -> Result<GrassmannElement, EngineError> {
    let mut acc = GrassmannElement::zero(ctx);
    let n = ctx.generators.max(1);
    for _ in 0..rng.gen_range(0..=2) {
        let mut bits: u64 = rng.gen::<u64>() & ((1u64 << n) - 1);
        if (bits.count_ones() % 2) as u8 != parity {
            bits ^= 1 << rng.gen_range(0..n);
        }
        let w = GrassmannWord::from_bits(bits);
        if w.is_empty() && !ctx.unital {
            continue;
        }
        let c = match ctx.field {
            Field::Prime(p) => Scalar::from_i64(ctx.field, rng.gen_range(1..p as i64)),
            Field::Rational => {
                let k: i64 = rng.gen_range(1..=3);
                Scalar::from_i64(ctx.field, if rng.gen() { k } else { -k })
            }
        };
        acc = acc.add(&GrassmannElement::scalar_word(ctx, w, c)?)?;
    }
    Ok(acc)
}

fn random_matrix(rng: &mut ChaCha8Rng, ctx: GrassmannContext) -> Result<SuperMatrix, EngineError> {
    Ok(SuperMatrix::new(
        random_element(rng, ctx, 0)?,
        random_element(rng, ctx, 1)?,
        random_element(rng, ctx, 1)?,
        random_element(rng, ctx, 0)?,
    )?)
}

/// Looks for a witness: curated assignments first, then the exhaustive
/// decision procedure, then seeded random sparse matrices.
pub fn witness_search(f: &LiePoly, spec: &AlgebraSpec, strategy: &SearchStrategy) -> Result<SearchOutcome, EngineError> {
    spec.check_field(f)?;
    for (name, asg) in &strategy.curated {
        let v = eval_poly(f, asg)?;
        if !v.is_zero() {
            return Ok(SearchOutcome {
                witness: Some(Witness {
                    assignment: asg.clone(),
                    value: v,
                }),
                stage: Some(SearchStage::Curated(name.clone())),
                exhausted: false,
            });
        }
    }
    let mut exhausted = false;
    if strategy.exhaustive {
        match is_identity(f, spec)? {
            Verdict::NonIdentity(w) => {
                return Ok(SearchOutcome {
                    witness: Some(w),
                    stage: Some(SearchStage::Exhaustive),
                    exhausted: false,
                })
            }
            Verdict::Identity => exhausted = true,
            Verdict::IdentityUpToBound(_) => {}
        }
    }
    let n = spec.generators.unwrap_or(8).clamp(1, MAX_GENERATORS);
    let ctx = GrassmannContext::new(spec.field, spec.unital, n);
    let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);
    let vars = sorted_vars(f);
    for trial in 0..strategy.random_trials {
        let mut asg = BTreeMap::new();
        for &v in &vars {
            asg.insert(v, random_matrix(&mut rng, ctx)?);
        }
        let value = eval_poly(f, &asg)?;
        if !value.is_zero() {
            return Ok(SearchOutcome {
                witness: Some(Witness { assignment: asg, value }),
                stage: Some(SearchStage::Random { trial }),
                exhausted,
            });
        }
    }
    Ok(SearchOutcome {
        witness: None,
        stage: None,
        exhausted,
    })
}

// ---------------------------------------------------------------------------
// Substitution relations

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Coef {
    Alpha(Var, Var),
    Beta(Var),
}

/// Outcome for one choice of the distinguished variable `x_k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsCase {
    pub k: Var,
    /// Whether `f` can be written in the normal form modulo `cm`.
    pub expressible: bool,
    /// Solutions checked: a particular one plus a nullspace basis.
    pub solutions: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsReport {
    pub degree: u32,
    pub x1: Var,
    /// Whether `f` is an identity of `M11(E1)`.
    pub identity: bool,
    pub cases: Vec<SubsCase>,
}

impl SubsReport {
    pub fn holds(&self) -> bool {
        self.identity && !self.cases.is_empty() && self.cases.iter().all(|c| c.expressible && c.failures.is_empty())
    }
}

fn left_normed(field: Field, first: &[Var], middle: &MultiDegree, last: Var) -> LiePoly {
    let mut seq = first.to_vec();
    seq.extend(middle.letters());
    seq.push(last);
    LiePoly::monomial(field, LieTerm::left_normed_vars(&seq))
}

/// Candidate monomials `[x1, xi, ..., xj]` and `[xk, xi, ..., x1]` of
/// multidegree `d`, middle letters in sorted order (they commute modulo
/// `cm`).
fn normal_form_terms(d: &MultiDegree, x1: Var, k: Var, field: Field) -> Vec<(Coef, LiePoly)> {
    let vars: Vec<Var> = d.vars().collect();
    let mut out = Vec::new();
    let one = |v: Var| MultiDegree::from_pairs([(v, 1)]);
    for &i in &vars {
        for &j in &vars {
            if i == x1 || j == x1 {
                continue;
            }
            let used = one(x1).plus(&one(i)).plus(&one(j));
            if let Some(mid) = d.minus(&used) {
                out.push((Coef::Alpha(i, j), left_normed(field, &[x1, i], &mid, j)));
            }
        }
    }
    for &i in &vars {
        if i == k {
            continue;
        }
        let used = one(k).plus(&one(i)).plus(&one(x1));
        if let Some(mid) = d.minus(&used) {
            out.push((Coef::Beta(i), left_normed(field, &[k, i], &mid, x1)));
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn check_relations(
    sol: &BTreeMap<Coef, Scalar>,
    vars: &[Var],
    x1: Var,
    k: Var,
    m: u32,
    field: Field,
    tag: &str,
    failures: &mut Vec<String>,
) {
    let zero = Scalar::zero(field);
    let get = |c: Coef| sol.get(&c).cloned().unwrap_or_else(|| zero.clone());
    let sign_m = if m.is_multiple_of(2) {
        Scalar::one(field)
    } else {
        -Scalar::one(field)
    };
    let others: Vec<Var> = vars.iter().copied().filter(|&v| v != x1).collect();
    for &i in &others {
        for &j in &others {
            if i <= j && get(Coef::Alpha(i, j)) != &sign_m * &get(Coef::Alpha(j, i)) {
                failures.push(format!("{tag}: alpha({i},{j}) != (-1)^{m} alpha({j},{i})"));
            }
        }
    }
    let col_sum = |j: Var| others.iter().fold(zero.clone(), |acc, &i| &acc + &get(Coef::Alpha(i, j)));
    for &j in &others {
        if j == k {
            continue;
        }
        if get(Coef::Beta(j)) != &(-&sign_m) * &col_sum(j) {
            failures.push(format!("{tag}: beta({j}) != (-1)^{} sum_i alpha(i,{j})", m + 1));
        }
    }
    if k != x1 {
        let beta_sum = vars
            .iter()
            .filter(|&&i| i != k)
            .fold(zero.clone(), |acc, &i| &acc + &get(Coef::Beta(i)));
        if beta_sum != &sign_m * &col_sum(k) {
            failures.push(format!("{tag}: sum_i beta(i) != (-1)^{m} sum_i alpha(i,{k})"));
        }
    }
}

/// Writes a multihomogeneous identity of `M11(E1)` in the normal form
/// `Σ α_ij [x1, xi, ..., xj] + Σ β_i [xk, xi, ..., x1]` modulo `cm` for every
/// choice of `xk`, and checks the linear relations among the coefficients
/// on a particular solution and on every solution of the homogeneous
/// system.
pub fn subs_relations_check(f: &LiePoly, x1: Option<Var>) -> Result<SubsReport, EngineError> {
    let field = f.field();
    let d = f
        .multidegree()
        .ok_or(EngineError::NotMultihomogeneous(field))?;
    let m = d.total();
    let vars: Vec<Var> = d.vars().collect();
    let x1 = x1.or_else(|| vars.first().copied()).ok_or(EngineError::NotMultilinear)?;
    let spec = AlgebraSpec::new(field, true);
    let identity = is_identity(f, &spec)?.holds();
    let mut report = SubsReport {
        degree: m,
        x1,
        identity,
        cases: Vec::new(),
    };
    if !identity || m < 3 {
        return Ok(report);
    }
    let cm = crate::library::cm(field);
    let cons = consequence_space(&[("cm".to_string(), cm)], &d, field, ConsequenceBounds::default())?;
    let cons_rows = cons.echelon.rows().into_iter().cloned().collect::<Vec<_>>();
    let target = cons.coordinates(&f.expand())?;
    for &k in &vars {
        let terms = normal_form_terms(&d, x1, k, field);
        let mut ech = Echelon::new(field, true);
        for r in &cons_rows {
            ech.insert(r.clone());
        }
        let r = cons_rows.len();
        let mut nullspace = Vec::new();
        for (idx, (_, t)) in terms.iter().enumerate() {
            let v = cons.coordinates(&t.expand())?;
            if let Insert::Dependent { combo } = ech.insert(v) {
                let combo = combo.expect("tracking is on");
                let mut sol = BTreeMap::new();
                sol.insert(terms[idx].0, Scalar::one(field));
                for (s, c) in combo.entries() {
                    if *s >= r {
                        let key = terms[s - r].0;
                        let cur = sol.get(&key).cloned().unwrap_or_else(|| Scalar::zero(field));
                        sol.insert(key, &cur - c);
                    }
                }
                nullspace.push(sol);
            }
        }
        let (residual, combo) = ech.reduce(&target);
        let mut case = SubsCase {
            k,
            expressible: residual.is_zero(),
            solutions: 0,
            failures: Vec::new(),
        };
        if case.expressible {
            let mut particular = BTreeMap::new();
            for (s, c) in combo.expect("tracking is on").entries() {
                if *s >= r {
                    let key = terms[s - r].0;
                    let cur = particular.get(&key).cloned().unwrap_or_else(|| Scalar::zero(field));
                    particular.insert(key, &cur + c);
                }
            }
            check_relations(&particular, &vars, x1, k, m, field, "particular solution", &mut case.failures);
            for (i, sol) in nullspace.iter().enumerate() {
                check_relations(sol, &vars, x1, k, m, field, &format!("homogeneous solution {}", i + 1), &mut case.failures);
            }
            case.solutions = 1 + nullspace.len();
        }
        report.cases.push(case);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::library;

    const Q: Field = Field::Rational;

    fn v(c: char) -> Var {
        Var::named(c)
    }

    #[test]
    fn cm_is_an_identity_both_paths() {
        for unital in [false, true] {
            let spec = AlgebraSpec::new(Q, unital);
            let cm = library::cm(Q);
            assert_eq!(is_identity_multilinear(&cm, &spec).unwrap(), Verdict::Identity);
            assert_eq!(is_identity_general(&cm, &spec).unwrap(), Verdict::Identity);
        }
    }

    #[test]
    fn commutator_is_not_an_identity() {
        let f = LiePoly::monomial(Q, LieTerm::left_normed_vars(&[v('x'), v('y')]));
        for unital in [false, true] {
            let spec = AlgebraSpec::new(Q, unital);
            for verdict in [is_identity_multilinear(&f, &spec).unwrap(), is_identity_general(&f, &spec).unwrap()] {
                let w = verdict.witness().expect("non-identity").clone();
                assert!(w.confirms(&f).unwrap());
            }
        }
    }

    #[test]
    fn nonlinear_witness_replays() {
        // [x, y, y] is not an identity.
        let f = LiePoly::monomial(Q, LieTerm::left_normed_vars(&[v('x'), v('y'), v('y')]));
        let spec = AlgebraSpec::new(Field::prime(3).unwrap(), true);
        let f3 = LiePoly::monomial(spec.field, LieTerm::left_normed_vars(&[v('x'), v('y'), v('y')]));
        let w = is_identity_general(&f3, &spec).unwrap();
        assert!(w.witness().unwrap().confirms(&f3).unwrap());
        let w = is_identity_general(&f, &AlgebraSpec::new(Q, false)).unwrap();
        assert!(w.witness().unwrap().confirms(&f).unwrap());
    }

    #[test]
    fn degree_three_kernel_is_zero() {
        let d = MultiDegree::multilinear([v('x'), v('y'), v('z')]);
        let s = identity_space(&d, &AlgebraSpec::new(Q, true), DEFAULT_DEGREE_CAP).unwrap();
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn cm_consequences_lie_in_kernel() {
        let d = MultiDegree::multilinear([v('a'), v('b'), v('c'), v('d'), v('e')]);
        let cons = consequence_space(&[("cm".into(), library::cm(Q))], &d, Q, ConsequenceBounds::default()).unwrap();
        let ker = identity_space(&d, &AlgebraSpec::new(Q, false), DEFAULT_DEGREE_CAP).unwrap();
        assert!(cons.dim() > 0);
        assert!(cons.is_subspace_of(&ker).unwrap());
        assert!(cons.bound().is_none());
    }

    #[test]
    fn membership_certificate() {
        let d = MultiDegree::multilinear([v('x'), v('y'), v('u'), v('v'), v('z'), v('w')]);
        let cons = consequence_space(&[("cm".into(), library::cm(Q))], &d, Q, ConsequenceBounds::default()).unwrap();
        let f = library::cm(Q).wrap(&[v('w')]);
        let m = cons.contains(&f).unwrap();
        assert!(m.member);
        assert!(!m.certificate.is_empty());
        let g = LiePoly::monomial(Q, LieTerm::left_normed_vars(&[v('x'), v('y'), v('u'), v('v'), v('z'), v('w')]));
        assert!(!cons.contains(&g).unwrap().member);
        let wrong = LiePoly::monomial(Q, LieTerm::left_normed_vars(&[v('x'), v('y')]));
        assert!(cons.contains(&wrong).is_err());
    }

    #[test]
    fn power_classes() {
        let f = Field::prime(3).unwrap();
        assert_eq!(power_class(0, f), 0);
        assert_eq!(power_class(1, f), 1);
        assert_eq!(power_class(3, f), 1);
        assert_eq!(power_class(2, f), 2);
        assert_eq!(power_class(4, Q), 4);
    }
}
