//! Independent arithmetic for `M11(E_N)` over GF(3), used as a
//! brute-force oracle. Shares nothing with the library beyond the
//! polynomial data types.

#![allow(dead_code)]

use std::collections::BTreeMap;

use superlie_core::{Field, LiePoly, LieTerm, MultiDegree, Var};

pub const P: u8 = 3;

/// Grassmann element: GF(3) coefficients keyed by generator subsets
/// (bit `i` is generator `e_{i+1}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct G(pub BTreeMap<u64, u8>);

fn reorder_sign(a: u64, b: u64) -> bool {
    // Moving every generator of `b` left past the larger generators of `a`.
    let mut swaps = 0;
    for j in 0..64 {
        if b >> j & 1 == 1 {
            swaps += (a >> j >> 1).count_ones();
        }
    }
    swaps % 2 == 1
}

impl G {
    pub fn zero() -> G {
        G(BTreeMap::new())
    }

    pub fn word(bits: u64, c: u8) -> G {
        let mut g = G::zero();
        g.put(bits, c);
        g
    }

    fn put(&mut self, bits: u64, c: u8) {
        let v = (self.0.get(&bits).copied().unwrap_or(0) + c) % P;
        if v == 0 {
            self.0.remove(&bits);
        } else {
            self.0.insert(bits, v);
        }
    }

    pub fn add(&self, o: &G) -> G {
        let mut out = self.clone();
        for (&w, &c) in &o.0 {
            out.put(w, c);
        }
        out
    }

    pub fn scale(&self, k: u8) -> G {
        let mut out = G::zero();
        for (&w, &c) in &self.0 {
            out.put(w, c * k % P);
        }
        out
    }

    pub fn neg(&self) -> G {
        self.scale(P - 1)
    }

    pub fn mul(&self, o: &G) -> G {
        let mut out = G::zero();
        for (&a, &x) in &self.0 {
            for (&b, &y) in &o.0 {
                if a & b != 0 {
                    continue;
                }
                let v = x * y % P;
                out.put(a | b, if reorder_sign(a, b) { (P - v) % P } else { v });
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// `((a, b), (d, c))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct M(pub [G; 4]);

impl M {
    pub fn mul(&self, o: &M) -> M {
        let [a, b, d, c] = &self.0;
        let [a2, b2, d2, c2] = &o.0;
        M([
            a.mul(a2).add(&b.mul(d2)),
            a.mul(b2).add(&b.mul(c2)),
            d.mul(a2).add(&c.mul(d2)),
            d.mul(b2).add(&c.mul(c2)),
        ])
    }

    pub fn sub(&self, o: &M) -> M {
        M(std::array::from_fn(|i| self.0[i].add(&o.0[i].neg())))
    }

    pub fn add(&self, o: &M) -> M {
        M(std::array::from_fn(|i| self.0[i].add(&o.0[i])))
    }

    pub fn scale(&self, k: u8) -> M {
        M(std::array::from_fn(|i| self.0[i].scale(k)))
    }

    pub fn bracket(&self, o: &M) -> M {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(G::is_zero)
    }
}

fn coeff(s: &superlie_core::Scalar) -> u8 {
    s.to_i64().expect("GF(3) residue").rem_euclid(P as i64) as u8
}

pub fn eval_term(t: &LieTerm, asg: &BTreeMap<Var, M>) -> M {
    match t {
        LieTerm::Var(v) => asg[v].clone(),
        LieTerm::Bracket(a, b) => eval_term(a, asg).bracket(&eval_term(b, asg)),
    }
}

pub fn eval(f: &LiePoly, asg: &BTreeMap<Var, M>) -> M {
    let mut acc = M(std::array::from_fn(|_| G::zero()));
    for (c, t) in f.terms() {
        acc = acc.add(&eval_term(t, asg).scale(coeff(c)));
    }
    acc
}

fn entry_words(n: usize, entry: usize, unital: bool) -> Vec<u64> {
    let parity = if entry == 0 || entry == 3 { 0 } else { 1 };
    let first = if unital { 0 } else { 1 };
    (first..1u64 << n).filter(|w| w.count_ones() % 2 == parity).collect()
}

/// Basis of `M11(E_N)` (or `M11(E1_N)`): one word in one entry.
pub fn basis(n: usize, unital: bool) -> Vec<M> {
    let mut out = Vec::new();
    for e in 0..4 {
        for w in entry_words(n, e, unital) {
            let mut m = M(std::array::from_fn(|_| G::zero()));
            m.0[e] = G::word(w, 1);
            out.push(m);
        }
    }
    out
}

/// Every element of the non-unital `M11(E_N)`.
pub fn all_elements(n: usize) -> Vec<M> {
    let mut slots = Vec::new();
    for e in 0..4 {
        for w in entry_words(n, e, false) {
            slots.push((e, w));
        }
    }
    let total = 3usize.pow(slots.len() as u32);
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut m = M(std::array::from_fn(|_| G::zero()));
        for &(e, w) in &slots {
            m.0[e] = m.0[e].add(&G::word(w, (code % 3) as u8));
            code /= 3;
        }
        out.push(m);
    }
    out
}

fn all_tuples(choices: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..choices.pow(k as u32)).map(move |mut code| {
        (0..k)
            .map(|_| {
                let i = code % choices;
                code /= choices;
                i
            })
            .collect()
    })
}

/// Exhaustive check on the basis; exact for multilinear `f`.
pub fn vanishes_on_basis(f: &LiePoly, n: usize, unital: bool) -> bool {
    let vars: Vec<Var> = f.variables().into_iter().collect();
    let b = basis(n, unital);
    all_tuples(b.len(), vars.len()).all(|t| {
        let asg = vars.iter().zip(&t).map(|(v, &i)| (*v, b[i].clone())).collect();
        eval(f, &asg).is_zero()
    })
}

/// Full multilinearization: every variable of degree `d` is replaced by a
/// sum of `d` fresh letters and the multilinear part is kept.
pub fn multilinearize(f: &LiePoly) -> LiePoly {
    let field = f.field();
    let degrees = f.max_degrees();
    let mut map = BTreeMap::new();
    let mut fresh = 1000;
    let mut target = MultiDegree::new();
    for (v, d) in degrees.iter() {
        let mut sum = LiePoly::zero(field);
        for _ in 0..d {
            let u = Var::Fresh(fresh);
            fresh += 1;
            target.add_var(u, 1);
            sum = sum.try_add(&LiePoly::monomial(field, LieTerm::Var(u))).unwrap();
        }
        map.insert(v, sum);
    }
    f.substitute(&map)
        .multidegree_components()
        .into_iter()
        .find(|(d, _)| *d == target)
        .map(|(_, p)| p)
        .unwrap_or_else(|| LiePoly::zero(field))
}

/// Exhaustive over all elements; feasible for N = 2 and at most two
/// variables.
pub fn vanishes_everywhere(f: &LiePoly, n: usize) -> bool {
    let vars: Vec<Var> = f.variables().into_iter().collect();
    let all = all_elements(n);
    all_tuples(all.len(), vars.len()).all(|t| {
        let asg = vars.iter().zip(&t).map(|(v, &i)| (*v, all[i].clone())).collect();
        eval(f, &asg).is_zero()
    })
}

/// Whether `f` vanishes on `M11(E_3)` (or `M11(E1_3)`) over GF(3), for `f`
/// of degree at most 2 in every variable.
pub fn vanishes_on_e3(f: &LiePoly, unital: bool) -> Option<bool> {
    assert_eq!(f.field(), Field::prime(3).unwrap());
    if f.is_multilinear() {
        return Some(vanishes_on_basis(f, 3, unital));
    }
    if f.max_degrees().iter().all(|(_, d)| d <= 2) {
        // Degrees below the characteristic: f is recovered from its
        // multilinearization up to the unit 2^k.
        return Some(vanishes_on_basis(&multilinearize(f), 3, unital));
    }
    None
}
