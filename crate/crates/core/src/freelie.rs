//! Lie polynomials as bracket trees, their canonical expansion into the free
//! associative algebra, multidegree bookkeeping, substitution and
//! linearization.
//!
//! Equality of Lie polynomials is always decided on expansions: two Lie
//! polynomials are equal in the free Lie algebra exactly when their
//! associative expansions coincide.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::scalars::{Field, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FreeLieError {
    #[error("variable {0} already occurs in the polynomial")]
    VariableInUse(Var),
    #[error("polynomial is not multihomogeneous")]
    NotMultihomogeneous,
    #[error("polynomial is not multilinear")]
    NotMultilinear,
    #[error("term {0} is not a left-normalized product of variables")]
    NotLeftNormalized(LieTerm),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// A variable. User variables are a letter with an optional numeric suffix
/// (`x`, `z1`); engine variables live in a separate namespace so they can
/// never capture a user variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Named { letter: u8, sub: Option<u32> },
    Fresh(u32),
}

impl Var {
    pub fn named(letter: char) -> Var {
        assert!(letter.is_ascii_alphabetic(), "variable letter must be ASCII");
        Var::Named {
            letter: letter as u8,
            sub: None,
        }
    }

    pub fn indexed(letter: char, sub: u32) -> Var {
        assert!(letter.is_ascii_alphabetic(), "variable letter must be ASCII");
        Var::Named {
            letter: letter as u8,
            sub: Some(sub),
        }
    }

    pub fn is_fresh(self) -> bool {
        matches!(self, Var::Fresh(_))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Named { letter, sub: None } => write!(f, "{}", *letter as char),
            Var::Named { letter, sub: Some(s) } => write!(f, "{}{s}", *letter as char),
            Var::Fresh(k) => write!(f, "_{k}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Multidegrees

/// Degree in each variable; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiDegree(BTreeMap<Var, u32>);

impl MultiDegree {
    pub fn new() -> MultiDegree {
        MultiDegree(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, u32)>) -> MultiDegree {
        let mut d = MultiDegree::new();
        for (v, k) in pairs {
            d.add_var(v, k);
        }
        d
    }

    /// `x1, ..., xn` each with degree one.
    pub fn multilinear(vars: impl IntoIterator<Item = Var>) -> MultiDegree {
        MultiDegree::from_pairs(vars.into_iter().map(|v| (v, 1)))
    }

    pub fn add_var(&mut self, v: Var, k: u32) {
        if k > 0 {
            *self.0.entry(v).or_insert(0) += k;
        }
    }

    pub fn get(&self, v: Var) -> u32 {
        self.0.get(&v).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u32 {
        self.0.values().sum()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.0.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, u32)> + '_ {
        self.0.iter().map(|(v, k)| (*v, *k))
    }

    pub fn is_multilinear(&self) -> bool {
        self.0.values().all(|&k| k == 1)
    }

    pub fn plus(&self, other: &MultiDegree) -> MultiDegree {
        let mut out = self.clone();
        for (v, k) in other.iter() {
            out.add_var(v, k);
        }
        out
    }

    pub fn times(&self, k: u32) -> MultiDegree {
        MultiDegree::from_pairs(self.iter().map(|(v, d)| (v, d * k)))
    }

    /// Componentwise `self <= other`.
    pub fn fits_in(&self, other: &MultiDegree) -> bool {
        self.iter().all(|(v, k)| k <= other.get(v))
    }

    /// `self - other` when `other` fits in `self`.
    pub fn minus(&self, other: &MultiDegree) -> Option<MultiDegree> {
        if !other.fits_in(self) {
            return None;
        }
        Some(MultiDegree::from_pairs(
            self.iter().map(|(v, k)| (v, k - other.get(v))),
        ))
    }

    /// Letters of the multiset in variable order, with repetition.
    pub fn letters(&self) -> Vec<Var> {
        self.iter()
            .flat_map(|(v, k)| core::iter::repeat_n(v, k as usize))
            .collect()
    }

    /// Every distinct arrangement of the letters, lexicographically ordered.
    /// These are the coordinates of the multidegree component of the free
    /// associative algebra.
    pub fn words(&self) -> Vec<Vec<Var>> {
        let mut counts: Vec<(Var, u32)> = self.iter().collect();
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(self.total() as usize);
        permutations(&mut counts, &mut cur, self.total() as usize, &mut out);
        out
    }

    /// All sub-multidegrees (including zero and `self`).
    pub fn sub_degrees(&self) -> Vec<MultiDegree> {
        let mut out = vec![MultiDegree::new()];
        for (v, k) in self.iter() {
            let mut next = Vec::with_capacity(out.len() * (k as usize + 1));
            for d in &out {
                for j in 0..=k {
                    let mut e = d.clone();
                    e.add_var(v, j);
                    next.push(e);
                }
            }
            out = next;
        }
        out
    }
}

fn permutations(counts: &mut [(Var, u32)], cur: &mut Vec<Var>, len: usize, out: &mut Vec<Vec<Var>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for i in 0..counts.len() {
        if counts[i].1 == 0 {
            continue;
        }
        counts[i].1 -= 1;
        cur.push(counts[i].0);
        permutations(counts, cur, len, out);
        cur.pop();
        counts[i].1 += 1;
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, (v, k)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}:{k}")?;
        }
        f.write_str(")")
    }
}

// ---------------------------------------------------------------------------
// Terms

/// A bracket monomial: a binary tree of brackets over variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LieTerm {
    Var(Var),
    Bracket(Box<LieTerm>, Box<LieTerm>),
}

impl LieTerm {
    pub fn var(v: Var) -> LieTerm {
        LieTerm::Var(v)
    }

    pub fn bracket(a: LieTerm, b: LieTerm) -> LieTerm {
        LieTerm::Bracket(Box::new(a), Box::new(b))
    }

    /// `[a1, ..., an] = [[...[a1, a2], ...], an]`. Panics on an empty list.
    pub fn left_normed(items: impl IntoIterator<Item = LieTerm>) -> LieTerm {
        let mut it = items.into_iter();
        let first = it.next().expect("left-normalized product of no items");
        it.fold(first, LieTerm::bracket)
    }

    /// Left-normalized product of variables.
    pub fn left_normed_vars(vars: &[Var]) -> LieTerm {
        LieTerm::left_normed(vars.iter().map(|&v| LieTerm::Var(v)))
    }

    pub fn degree(&self) -> u32 {
        match self {
            LieTerm::Var(_) => 1,
            LieTerm::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    pub fn multidegree(&self) -> MultiDegree {
        let mut d = MultiDegree::new();
        self.collect_degree(&mut d);
        d
    }

    fn collect_degree(&self, d: &mut MultiDegree) {
        match self {
            LieTerm::Var(v) => d.add_var(*v, 1),
            LieTerm::Bracket(a, b) => {
                a.collect_degree(d);
                b.collect_degree(d);
            }
        }
    }

    /// True when some subterm is `[s, s]`, making the whole term zero.
    pub fn has_square_bracket(&self) -> bool {
        match self {
            LieTerm::Var(_) => false,
            LieTerm::Bracket(a, b) => a == b || a.has_square_bracket() || b.has_square_bracket(),
        }
    }

    /// The items of the left spine: `[a1, ..., an]` gives `a1..an`. The first
    /// item is always a variable.
    pub fn spine(&self) -> Vec<&LieTerm> {
        let mut items = Vec::new();
        let mut node = self;
        while let LieTerm::Bracket(l, r) = node {
            items.push(&**r);
            node = l;
        }
        items.push(node);
        items.reverse();
        items
    }

    /// `Some(vars)` when the term is a left-normalized product of variables.
    pub fn as_left_normed_vars(&self) -> Option<Vec<Var>> {
        self.spine()
            .into_iter()
            .map(|t| match t {
                LieTerm::Var(v) => Some(*v),
                _ => None,
            })
            .collect()
    }

    /// Simultaneous substitution; unmapped variables stay put.
    pub fn substitute(&self, field: Field, map: &BTreeMap<Var, LiePoly>) -> LiePoly {
        match self {
            LieTerm::Var(v) => map
                .get(v)
                .cloned()
                .unwrap_or_else(|| LiePoly::monomial(field, self.clone())),
            LieTerm::Bracket(a, b) => a.substitute(field, map).bracket(&b.substitute(field, map)),
        }
    }

    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> LieTerm {
        match self {
            LieTerm::Var(v) => LieTerm::Var(f(*v)),
            LieTerm::Bracket(a, b) => LieTerm::bracket(a.rename(f), b.rename(f)),
        }
    }

    /// Integer expansion `[s, t] -> st - ts` into words.
    pub fn expand_integer(&self) -> BTreeMap<Vec<Var>, i64> {
        match self {
            LieTerm::Var(v) => BTreeMap::from([(vec![*v], 1)]),
            LieTerm::Bracket(a, b) => {
                let ea = a.expand_integer();
                let eb = b.expand_integer();
                let mut out: BTreeMap<Vec<Var>, i64> = BTreeMap::new();
                for (u, x) in &ea {
                    for (w, y) in &eb {
                        let mut uw = u.clone();
                        uw.extend_from_slice(w);
                        *out.entry(uw).or_insert(0) += x * y;
                        let mut wu = w.clone();
                        wu.extend_from_slice(u);
                        *out.entry(wu).or_insert(0) -= x * y;
                    }
                }
                out.retain(|_, c| *c != 0);
                out
            }
        }
    }
}

impl fmt::Display for LieTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let LieTerm::Var(v) = self {
            return write!(f, "{v}");
        }
        let items = self.spine();
        f.write_str("[")?;
        let mut i = 0;
        let mut first = true;
        while i < items.len() {
            let mut run = 1;
            while i + run < items.len() && items[i + run] == items[i] {
                run += 1;
            }
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{}", items[i])?;
            if run > 1 {
                write!(f, "^({run})")?;
            }
            i += run;
        }
        f.write_str("]")
    }
}

// ---------------------------------------------------------------------------
// Polynomials

/// A linear combination of bracket terms over one field. Terms are merged
/// structurally and kept in a deterministic order; terms containing a
/// `[s, s]` subterm are dropped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LiePoly {
    field: Field,
    terms: BTreeMap<LieTerm, Scalar>,
}

impl LiePoly {
    pub fn zero(field: Field) -> LiePoly {
        LiePoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(field: Field, t: LieTerm) -> LiePoly {
        LiePoly::from_term(Scalar::one(field), t)
    }

    pub fn from_term(c: Scalar, t: LieTerm) -> LiePoly {
        let mut out = LiePoly::zero(c.field());
        out.add_term(c, t);
        out
    }

    pub fn from_terms(field: Field, terms: impl IntoIterator<Item = (Scalar, LieTerm)>) -> Result<LiePoly, ScalarError> {
        let mut out = LiePoly::zero(field);
        for (c, t) in terms {
            field.check_same(c.field())?;
            out.add_term(c, t);
        }
        Ok(out)
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

    pub fn terms(&self) -> impl Iterator<Item = (&Scalar, &LieTerm)> {
        self.terms.iter().map(|(t, c)| (c, t))
    }

    fn add_term(&mut self, c: Scalar, t: LieTerm) {
        if c.is_zero() || t.has_square_bracket() {
            return;
        }
        match self.terms.entry(t) {
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

    pub fn try_add(&self, other: &LiePoly) -> Result<LiePoly, ScalarError> {
        self.field.check_same(other.field)?;
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(c.clone(), t.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &LiePoly) -> Result<LiePoly, ScalarError> {
        self.try_add(&other.neg())
    }

    pub fn neg(&self) -> LiePoly {
        LiePoly {
            field: self.field,
            terms: self.terms.iter().map(|(t, c)| (t.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> Result<LiePoly, ScalarError> {
        self.field.check_same(s.field())?;
        let mut out = LiePoly::zero(self.field);
        for (t, c) in &self.terms {
            out.add_term(c * s, t.clone());
        }
        Ok(out)
    }

    /// Bilinear bracket `[self, other]`. Panics on mixed fields.
    pub fn bracket(&self, other: &LiePoly) -> LiePoly {
        assert_eq!(self.field, other.field, "bracket across fields");
        let mut out = LiePoly::zero(self.field);
        for (s, a) in &self.terms {
            for (t, b) in &other.terms {
                out.add_term(a * b, LieTerm::bracket(s.clone(), t.clone()));
            }
        }
        out
    }

    /// `[self, a1, ..., ar]` for variables `a1..ar`.
    pub fn wrap(&self, letters: &[Var]) -> LiePoly {
        let mut out = self.clone();
        for &v in letters {
            out = out.bracket(&LiePoly::monomial(self.field, LieTerm::Var(v)));
        }
        out
    }

    pub fn variables(&self) -> BTreeSet<Var> {
        let mut vs = BTreeSet::new();
        for t in self.terms.keys() {
            vs.extend(t.multidegree().vars());
        }
        vs
    }

    /// Largest degree of `v` over all terms.
    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|t| t.multidegree().get(v)).max().unwrap_or(0)
    }

    /// Largest degree of every variable over all terms.
    pub fn max_degrees(&self) -> MultiDegree {
        let mut out = MultiDegree::new();
        for t in self.terms.keys() {
            for (v, k) in t.multidegree().iter() {
                let cur = out.get(v);
                if k > cur {
                    out.add_var(v, k - cur);
                }
            }
        }
        out
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|t| t.degree()).max().unwrap_or(0)
    }

    /// The common multidegree of all terms, if there is one. The zero
    /// polynomial has the empty multidegree.
    pub fn multidegree(&self) -> Option<MultiDegree> {
        let mut it = self.terms.keys().map(|t| t.multidegree());
        let first = it.next().unwrap_or_default();
        it.all(|d| d == first).then_some(first)
    }

    pub fn is_multilinear(&self) -> bool {
        self.multidegree().is_some_and(|d| d.is_multilinear())
    }

    /// Partition of the terms by multidegree; the components sum to `self`.
    pub fn multidegree_components(&self) -> Vec<(MultiDegree, LiePoly)> {
        let mut parts: BTreeMap<MultiDegree, LiePoly> = BTreeMap::new();
        for (t, c) in &self.terms {
            parts
                .entry(t.multidegree())
                .or_insert_with(|| LiePoly::zero(self.field))
                .add_term(c.clone(), t.clone());
        }
        parts.into_iter().collect()
    }

    /// Simultaneous substitution of variables by polynomials.
    pub fn substitute(&self, map: &BTreeMap<Var, LiePoly>) -> LiePoly {
        let mut out = LiePoly::zero(self.field);
        for (t, c) in &self.terms {
            let img = t.substitute(self.field, map);
            for (s, d) in img.terms {
                out.add_term(c * &d, s);
            }
        }
        out
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var) -> LiePoly {
        let mut out = LiePoly::zero(self.field);
        for (t, c) in &self.terms {
            out.add_term(c.clone(), t.rename(&f));
        }
        out
    }

    /// Canonical associative expansion.
    pub fn expand(&self) -> AssocPoly {
        let mut out = AssocPoly::zero(self.field);
        for (t, c) in &self.terms {
            for (w, k) in t.expand_integer() {
                out.add_word(w, c * &Scalar::from_i64(self.field, k));
            }
        }
        out
    }

    /// `f(x + y, ...) - f(x, ...) - f(y, ...)` for a variable `y` not in `f`.
    pub fn partial_linearize(&self, x: Var, y: Var) -> Result<Linearization, FreeLieError> {
        if self.variables().contains(&y) {
            return Err(FreeLieError::VariableInUse(y));
        }
        let f = self.field;
        let xv = LiePoly::monomial(f, LieTerm::Var(x));
        let yv = LiePoly::monomial(f, LieTerm::Var(y));
        let sum = xv.try_add(&yv)?;
        let at_sum = self.substitute(&BTreeMap::from([(x, sum)]));
        let at_y = self.substitute(&BTreeMap::from([(x, yv)]));
        let poly = at_sum.try_sub(self)?.try_sub(&at_y)?;
        Ok(Linearization {
            poly,
            degenerate: self.degree_in(x) < 2,
        })
    }

    /// The part of `f` bilinear in `A = [u1, u2]` and `B = [u3, u4]` after
    /// `i -> i + A`, `j -> j + B` (or `i -> i + A + B` when `i == j`),
    /// computed by inclusion-exclusion so that it is a combination of
    /// substitution instances of `f`. The `u`'s are fresh engine variables.
    pub fn commutator_probe(&self, i: Var, j: Var) -> CommutatorProbe {
        let f = self.field;
        let base = self
            .variables()
            .iter()
            .filter_map(|v| match v {
                Var::Fresh(k) => Some(*k),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let u: [Var; 4] = core::array::from_fn(|k| Var::Fresh(base + 1 + k as u32));
        let m = |v: Var| LiePoly::monomial(f, LieTerm::Var(v));
        let a = m(u[0]).bracket(&m(u[1]));
        let b = m(u[2]).bracket(&m(u[3]));
        let plus = |p: &LiePoly, q: &LiePoly| p.try_add(q).expect("same field");
        let poly = if i != j {
            let ia = plus(&m(i), &a);
            let jb = plus(&m(j), &b);
            let both = self.substitute(&BTreeMap::from([(i, ia.clone()), (j, jb.clone())]));
            let only_a = self.substitute(&BTreeMap::from([(i, ia)]));
            let only_b = self.substitute(&BTreeMap::from([(j, jb)]));
            plus(&both.try_sub(&only_a).unwrap().try_sub(&only_b).unwrap(), self)
        } else {
            let iab = plus(&plus(&m(i), &a), &b);
            let both = self.substitute(&BTreeMap::from([(i, iab)]));
            let only_a = self.substitute(&BTreeMap::from([(i, plus(&m(i), &a))]));
            let only_b = self.substitute(&BTreeMap::from([(i, plus(&m(i), &b))]));
            plus(&both.try_sub(&only_a).unwrap().try_sub(&only_b).unwrap(), self)
        };
        CommutatorProbe { poly, fresh: u }
    }

    /// For `f = Σ α [x_i, x_j, ..., x_k]` given as left-normalized products of
    /// variables, inserts `y, z` after the second letter of every term.
    pub fn insert_after_second(&self, y: Var, z: Var) -> Result<LiePoly, FreeLieError> {
        let mut out = LiePoly::zero(self.field);
        for (t, c) in &self.terms {
            let vars = t
                .as_left_normed_vars()
                .filter(|vs| vs.len() >= 2)
                .ok_or_else(|| FreeLieError::NotLeftNormalized(t.clone()))?;
            let mut seq = vars[..2].to_vec();
            seq.push(y);
            seq.push(z);
            seq.extend_from_slice(&vars[2..]);
            out.add_term(c.clone(), LieTerm::left_normed_vars(&seq));
        }
        Ok(out)
    }
}

impl fmt::Display for LiePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (t, c)) in self.terms.iter().enumerate() {
            let neg = !self.field.is_finite() && c.is_negative_looking();
            let mag = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Result of [`LiePoly::partial_linearize`]. `degenerate` flags inputs of
/// degree below two in the linearized variable, whose linearization is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linearization {
    pub poly: LiePoly,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutatorProbe {
    pub poly: LiePoly,
    /// `u1..u4` with `A = [u1, u2]`, `B = [u3, u4]`.
    pub fresh: [Var; 4],
}

// ---------------------------------------------------------------------------
// Associative envelope

/// Sparse element of the free associative algebra: words in variables with
/// nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AssocPoly {
    field: Field,
    terms: BTreeMap<Vec<Var>, Scalar>,
}

impl AssocPoly {
    pub fn zero(field: Field) -> AssocPoly {
        AssocPoly {
            field,
            terms: BTreeMap::new(),
        }
    }

    pub fn word(field: Field, w: Vec<Var>) -> AssocPoly {
        let mut out = AssocPoly::zero(field);
        out.add_word(w, Scalar::one(field));
        out
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

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<Var>, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &[Var]) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| Scalar::zero(self.field))
    }

    pub fn add_word(&mut self, w: Vec<Var>, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
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

    pub fn try_add(&self, other: &AssocPoly) -> Result<AssocPoly, ScalarError> {
        self.field.check_same(other.field)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_word(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &AssocPoly) -> Result<AssocPoly, ScalarError> {
        self.field.check_same(other.field)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_word(w.clone(), -c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: &Scalar) -> Result<AssocPoly, ScalarError> {
        self.field.check_same(s.field())?;
        let mut out = AssocPoly::zero(self.field);
        for (w, c) in &self.terms {
            out.add_word(w.clone(), c * s);
        }
        Ok(out)
    }

    /// Concatenation product.
    pub fn try_mul(&self, other: &AssocPoly) -> Result<AssocPoly, ScalarError> {
        self.field.check_same(other.field)?;
        let mut out = AssocPoly::zero(self.field);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut uv = u.clone();
                uv.extend_from_slice(v);
                out.add_word(uv, a * b);
            }
        }
        Ok(out)
    }

    /// The algebra homomorphism sending each letter to an associative
    /// polynomial (identity on unmapped letters).
    pub fn substitute(&self, map: &BTreeMap<Var, AssocPoly>) -> AssocPoly {
        let mut out = AssocPoly::zero(self.field);
        for (w, c) in &self.terms {
            let mut acc = AssocPoly::word(self.field, Vec::new());
            for v in w {
                let img = map
                    .get(v)
                    .cloned()
                    .unwrap_or_else(|| AssocPoly::word(self.field, vec![*v]));
                acc = acc.try_mul(&img).expect("same field");
            }
            for (u, d) in acc.terms {
                out.add_word(u, c * &d);
            }
        }
        out
    }
}

impl fmt::Display for AssocPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            let neg = !self.field.is_finite() && c.is_negative_looking();
            let mag = if neg { -c } else { c.clone() };
            match (k, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            for v in w {
                write!(f, "{v}")?;
            }
        }
        Ok(())
    }
}

/// Left-normalized monomials `[a1, ..., an]` whose letters are the multiset
/// `d`, with `a1 != a2`, in lexicographic order. They span the multidegree
/// component of the free Lie algebra; no independence is claimed. Degree one
/// gives the single variable, degree zero nothing.
pub fn spanning_monomials(d: &MultiDegree) -> Vec<LieTerm> {
    match d.total() {
        0 => Vec::new(),
        1 => d.vars().map(LieTerm::Var).collect(),
        _ => d
            .words()
            .into_iter()
            .filter(|w| w[0] != w[1])
            .map(|w| LieTerm::left_normed_vars(&w))
            .collect(),
    }
}
