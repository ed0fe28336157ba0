//! Named Lie polynomials and curated substitutions.
//!
//! Variables follow the usual letters: `x, y, z, t, u, v` and indexed
//! families `t1, t2, ...`, `z1, z2, ...`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::freelie::{FreeLieError, LiePoly, LieTerm, Var};
use crate::grassmann::{GrassmannContext, GrassmannElement, GrassmannError, GrassmannWord};
use crate::scalars::{Field, Scalar};
use crate::supermatrix::{Entry, MatrixError, SuperMatrix};

fn v(c: char) -> LieTerm {
    LieTerm::Var(Var::named(c))
}

fn vi(c: char, i: u32) -> LieTerm {
    LieTerm::Var(Var::indexed(c, i))
}

fn rep(t: LieTerm, m: u32) -> impl Iterator<Item = LieTerm> {
    core::iter::repeat_n(t, m as usize)
}

fn family(c: char, n: u32) -> impl Iterator<Item = LieTerm> {
    (1..=n).map(move |i| vi(c, i))
}

fn mono(field: Field, items: impl IntoIterator<Item = LieTerm>) -> LiePoly {
    LiePoly::monomial(field, LieTerm::left_normed(items))
}

fn br(a: char, b: char) -> LieTerm {
    LieTerm::bracket(v(a), v(b))
}

fn sum(field: Field, parts: impl IntoIterator<Item = (i64, LiePoly)>) -> LiePoly {
    parts.into_iter().fold(LiePoly::zero(field), |acc, (c, p)| {
        acc.try_add(&p.scale(&Scalar::from_i64(field, c)).expect("same field"))
            .expect("same field")
    })
}

/// `[x, y, [u, v], z]`, the centre-by-metabelian identity.
pub fn cm(field: Field) -> LiePoly {
    mono(field, [v('x'), v('y'), br('u', 'v'), v('z')])
}

/// `[x, z, u^(p), v]`.
pub fn cp(field: Field, p: u32) -> LiePoly {
    mono(field, [v('x'), v('z')].into_iter().chain(rep(v('u'), p)).chain([v('v')]))
}

/// `[x, y, x^(p-1), y^(p-1), v]`.
pub fn pp(field: Field, p: u32) -> LiePoly {
    mono(
        field,
        [v('x'), v('y')]
            .into_iter()
            .chain(rep(v('x'), p - 1))
            .chain(rep(v('y'), p - 1))
            .chain([v('v')]),
    )
}

/// `[x, y, t1..t2k, z] + [y, z, t1..t2k, x] + [z, x, t1..t2k, y]`.
pub fn ja(field: Field, k: u32) -> LiePoly {
    let cyc = |a: char, b: char, c: char| {
        mono(field, [v(a), v(b)].into_iter().chain(family('t', 2 * k)).chain([v(c)]))
    };
    sum(field, [(1, cyc('x', 'y', 'z')), (1, cyc('y', 'z', 'x')), (1, cyc('z', 'x', 'y'))])
}

/// `[x, y, t1..tk, [u, v]] + sign · [u, v, t1..tk, [x, y]]` with `sign = ±1`.
pub fn c(field: Field, k: u32, sign: i64) -> LiePoly {
    let a = mono(field, [v('x'), v('y')].into_iter().chain(family('t', k)).chain([br('u', 'v')]));
    let b = mono(field, [v('u'), v('v')].into_iter().chain(family('t', k)).chain([br('x', 'y')]));
    sum(field, [(1, a), (sign, b)])
}

/// `[y, z1..z2k, y^(p)]`.
pub fn con1(field: Field, p: u32, k: u32) -> LiePoly {
    mono(field, [v('y')].into_iter().chain(family('z', 2 * k)).chain(rep(v('y'), p)))
}

/// `[x, y^(p), z1..z(2k-1), t] + [x, t, z1..z(2k-1), y^(p)]
///  − [x, y, t, z1..z(2k-1), y^(p-1)]`.
///
/// All three terms use `z1..z(2k-1)`, which makes the polynomial
/// multihomogeneous of degree `p + 2k + 1`.
pub fn con2(field: Field, p: u32, k: u32) -> LiePoly {
    let zs = || family('z', 2 * k - 1);
    let a = mono(field, [v('x')].into_iter().chain(rep(v('y'), p)).chain(zs()).chain([v('t')]));
    let b = mono(field, [v('x'), v('t')].into_iter().chain(zs()).chain(rep(v('y'), p)));
    let c = mono(field, [v('x'), v('y'), v('t')].into_iter().chain(zs()).chain(rep(v('y'), p - 1)));
    sum(field, [(1, a), (1, b), (-1, c)])
}

/// `[x, y^(p), z1..z(2k-1), x^(p-1)] − [y, x^(p), z1..z(2k-1), y^(p-1)]`.
pub fn con3(field: Field, p: u32, k: u32) -> LiePoly {
    let zs = || family('z', 2 * k - 1);
    let a = mono(field, [v('x')].into_iter().chain(rep(v('y'), p)).chain(zs()).chain(rep(v('x'), p - 1)));
    let b = mono(field, [v('y')].into_iter().chain(rep(v('x'), p)).chain(zs()).chain(rep(v('y'), p - 1)));
    sum(field, [(1, a), (-1, b)])
}

/// `[x, y^(p), z, v] − [z, y^(p), x, v]`.
pub fn tr(field: Field, p: u32) -> LiePoly {
    let a = mono(field, [v('x')].into_iter().chain(rep(v('y'), p)).chain([v('z'), v('v')]));
    let b = mono(field, [v('z')].into_iter().chain(rep(v('y'), p)).chain([v('x'), v('v')]));
    sum(field, [(1, a), (-1, b)])
}

/// `[x, y, t^(m), [u, v]]`.
pub fn cnz(field: Field, m: u32) -> LiePoly {
    mono(field, [v('x'), v('y')].into_iter().chain(rep(v('t'), m)).chain([br('u', 'v')]))
}

/// `[y, x, z1..z2k, y^(p)]`.
pub fn nonc1(field: Field, p: u32, k: u32) -> LiePoly {
    mono(field, [v('y'), v('x')].into_iter().chain(family('z', 2 * k)).chain(rep(v('y'), p)))
}

/// `[x, y^(p-1), x^(p-1), z1..z2k, y]`.
pub fn nonc2(field: Field, p: u32, k: u32) -> LiePoly {
    mono(
        field,
        [v('x')]
            .into_iter()
            .chain(rep(v('y'), p - 1))
            .chain(rep(v('x'), p - 1))
            .chain(family('z', 2 * k))
            .chain([v('y')]),
    )
}

/// `[x1, ..., xn]`.
pub fn left_normed_x(field: Field, n: u32) -> LiePoly {
    mono(field, family('x', n))
}

/// Renames the variables of a multilinear left-normalized combination to
/// `x1..xn` (in variable order) and inserts `y, z` after the second letter
/// of every term.
pub fn insertion(f: &LiePoly) -> Result<LiePoly, FreeLieError> {
    let vars: Vec<Var> = f.variables().into_iter().collect();
    let map: BTreeMap<Var, Var> = vars
        .iter()
        .enumerate()
        .map(|(i, &old)| (old, Var::indexed('x', i as u32 + 1)))
        .collect();
    let renamed = f.rename(|w| map[&w]);
    renamed.insert_after_second(Var::named('y'), Var::named('z'))
}

/// Same renaming as [`insertion`], without the insertion.
pub fn insertion_source(f: &LiePoly) -> LiePoly {
    let vars: Vec<Var> = f.variables().into_iter().collect();
    let map: BTreeMap<Var, Var> = vars
        .iter()
        .enumerate()
        .map(|(i, &old)| (old, Var::indexed('x', i as u32 + 1)))
        .collect();
    f.rename(|w| map[&w])
}

fn elem(ctx: GrassmannContext, gens: &[u32]) -> Result<GrassmannElement, GrassmannError> {
    GrassmannElement::scalar_word(ctx, GrassmannWord::from_generators(gens), Scalar::one(ctx.field))
}

/// `x = u = t = E11`, `y = e1·E12`, `v = e2·E21` in a unital context with at
/// least two generators.
pub fn cnz_substitution(ctx: GrassmannContext) -> Result<BTreeMap<Var, SuperMatrix>, MatrixError> {
    let one = GrassmannElement::one(ctx)?;
    let e11 = SuperMatrix::unit(Entry::A, one)?;
    let y = SuperMatrix::unit(Entry::B, elem(ctx, &[1])?)?;
    let vv = SuperMatrix::unit(Entry::D, elem(ctx, &[2])?)?;
    Ok(BTreeMap::from([
        (Var::named('x'), e11.clone()),
        (Var::named('u'), e11.clone()),
        (Var::named('t'), e11),
        (Var::named('y'), y),
        (Var::named('v'), vv),
    ]))
}

/// The Grassmann entries used by [`nonc_substitution`].
#[derive(Debug, Clone)]
pub struct NoncEntries {
    pub a: Vec<GrassmannElement>,
    pub b0: GrassmannElement,
    pub b1: GrassmannElement,
    pub c0: GrassmannElement,
    pub c1: GrassmannElement,
    pub c2: GrassmannElement,
}

/// Generators needed by [`nonc_substitution`] for a given `k`.
pub fn nonc_generators(k: u32) -> u32 {
    11 + 4 * k
}

/// `z_i = a_i·E11`, `x = b0·E11 + b1·E12`, `y = c0·E11 + c1·E12 + c2·E21`
/// with `c1 = e1`, `c2 = e2`, `c0 = e3e4 + e5e6`, `b0 = e7e8 + e9e10`,
/// `b1 = e11` and `a_i` fresh two-generator words. `b0` and `c0` are sums of
/// two disjoint words so that their squares survive.
pub fn nonc_substitution(
    ctx: GrassmannContext,
    k: u32,
) -> Result<(BTreeMap<Var, SuperMatrix>, NoncEntries), MatrixError> {
    let c1 = elem(ctx, &[1])?;
    let c2 = elem(ctx, &[2])?;
    let c0 = elem(ctx, &[3, 4])?.add(&elem(ctx, &[5, 6])?)?;
    let b0 = elem(ctx, &[7, 8])?.add(&elem(ctx, &[9, 10])?)?;
    let b1 = elem(ctx, &[11])?;
    let zero = GrassmannElement::zero(ctx);
    let mut asg = BTreeMap::new();
    let mut a = Vec::new();
    for i in 1..=2 * k {
        let g = 10 + 2 * i;
        let ai = elem(ctx, &[g, g + 1])?;
        asg.insert(Var::indexed('z', i), SuperMatrix::unit(Entry::A, ai.clone())?);
        a.push(ai);
    }
    asg.insert(
        Var::named('x'),
        SuperMatrix::new(b0.clone(), b1.clone(), zero.clone(), zero.clone())?,
    );
    asg.insert(
        Var::named('y'),
        SuperMatrix::new(c0.clone(), c1.clone(), c2.clone(), zero)?,
    );
    Ok((asg, NoncEntries { a, b0, b1, c0, c1, c2 }))
}
