//! Sparse exact linear algebra: an incrementally maintained reduced row
//! echelon form with optional tracking of how every row was built from the
//! inserted vectors.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::scalars::{Field, Scalar};

/// Sparse vector: strictly increasing column indices with nonzero values.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseVec {
    entries: Vec<(usize, Scalar)>,
}

impl SparseVec {
    pub fn zero() -> SparseVec {
        SparseVec { entries: Vec::new() }
    }

    pub fn unit(col: usize, field: Field) -> SparseVec {
        SparseVec {
            entries: alloc::vec![(col, Scalar::one(field))],
        }
    }

    /// Builds from arbitrary `(col, value)` pairs, merging duplicates.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Scalar)>) -> SparseVec {
        let mut map: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (c, v) in pairs {
            match map.get_mut(&c) {
                Some(x) => *x = &*x + &v,
                None => {
                    map.insert(c, v);
                }
            }
        }
        SparseVec {
            entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(usize, Scalar)] {
        &self.entries
    }

    pub fn leading(&self) -> Option<(usize, &Scalar)> {
        self.entries.first().map(|(c, v)| (*c, v))
    }

    pub fn get(&self, col: usize) -> Option<&Scalar> {
        self.entries
            .binary_search_by_key(&col, |(c, _)| *c)
            .ok()
            .map(|i| &self.entries[i].1)
    }

    pub fn scale(&self, s: &Scalar) -> SparseVec {
        if s.is_zero() {
            return SparseVec::zero();
        }
        SparseVec {
            entries: self.entries.iter().map(|(c, v)| (*c, v * s)).collect(),
        }
    }

    /// `self + s · other` by a sorted merge.
    pub fn axpy(&self, s: &Scalar, other: &SparseVec) -> SparseVec {
        if s.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, s * &b[j].1));
                j += 1;
            } else {
                let v = &a[i].1 + &(s * &b[j].1);
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec { entries: out }
    }
}

/// Outcome of inserting a vector into an [`Echelon`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Insert {
    /// The vector was independent and received this source index.
    Independent { source: usize, pivot: usize },
    /// The vector lies in the span; with tracking, `combo` expresses it as a
    /// combination of earlier source indices.
    Dependent { combo: Option<SparseVec> },
}

/// Reduced row echelon form over a field: every row has leading
/// coefficient one and zeros in all other rows' pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: Field,
    rows: Vec<SparseVec>,
    combos: Option<Vec<SparseVec>>,
    pivot_row: BTreeMap<usize, usize>,
    inserted: usize,
}

impl Echelon {
    pub fn new(field: Field, track: bool) -> Echelon {
        Echelon {
            field,
            rows: Vec::new(),
            combos: track.then(Vec::new),
            pivot_row: BTreeMap::new(),
            inserted: 0,
        }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors offered so far (dependent ones included); also the
    /// next source index.
    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Rows ordered by pivot column.
    pub fn rows(&self) -> Vec<&SparseVec> {
        self.pivot_row.values().map(|&r| &self.rows[r]).collect()
    }

    /// Row combinations in pivot order (tracking only).
    pub fn row_combos(&self) -> Option<Vec<&SparseVec>> {
        let combos = self.combos.as_ref()?;
        Some(self.pivot_row.values().map(|&r| &combos[r]).collect())
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Residual of `v` modulo the row space and, with tracking, the source
    /// combination equal to `v − residual`.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, Option<SparseVec>) {
        let mut res = v.clone();
        let mut combo = self.combos.as_ref().map(|_| SparseVec::zero());
        for (c, x) in v.entries() {
            if let Some(&r) = self.pivot_row.get(c) {
                // Rows vanish on every other pivot column, so the value of `v`
                // at a pivot column is untouched by earlier subtractions.
                let neg = -x;
                res = res.axpy(&neg, &self.rows[r]);
                if let (Some(cb), Some(cs)) = (combo.as_mut(), self.combos.as_ref()) {
                    *cb = cb.axpy(x, &cs[r]);
                }
            }
        }
        (res, combo)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_zero()
    }

    pub fn insert(&mut self, v: SparseVec) -> Insert {
        let source = self.inserted;
        self.inserted += 1;
        let (res, combo) = self.reduce(&v);
        let Some((pivot, lead)) = res.leading() else {
            return Insert::Dependent { combo };
        };
        let inv = lead.inv().expect("leading entry is nonzero");
        let row = res.scale(&inv);
        let row_combo = combo.map(|cb| {
            SparseVec::unit(source, self.field)
                .axpy(&-Scalar::one(self.field), &cb)
                .scale(&inv)
        });
        for r in 0..self.rows.len() {
            if let Some(x) = self.rows[r].get(pivot).cloned() {
                let neg = -&x;
                self.rows[r] = self.rows[r].axpy(&neg, &row);
                if let (Some(cs), Some(rc)) = (self.combos.as_mut(), row_combo.as_ref()) {
                    cs[r] = cs[r].axpy(&neg, rc);
                }
            }
        }
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push(row);
        if let (Some(cs), Some(rc)) = (self.combos.as_mut(), row_combo) {
            cs.push(rc);
        }
        Insert::Independent { source, pivot }
    }

    /// Basis of `{ c ∈ F^width : row · c = 0 for every row }`, one vector per
    /// non-pivot column, in column order.
    pub fn null_space(&self, width: usize) -> Vec<SparseVec> {
        let one = Scalar::one(self.field);
        let mut out = Vec::new();
        for free in 0..width {
            if self.pivot_row.contains_key(&free) {
                continue;
            }
            let mut pairs = alloc::vec![(free, one.clone())];
            for (&p, &r) in &self.pivot_row {
                if let Some(x) = self.rows[r].get(free) {
                    pairs.push((p, -x));
                }
            }
            out.push(SparseVec::from_pairs(pairs));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(n: i64) -> Scalar {
        Scalar::from_i64(Field::Rational, n)
    }

    fn v(xs: &[i64]) -> SparseVec {
        SparseVec::from_pairs(xs.iter().enumerate().map(|(i, &x)| (i, q(x))))
    }

    fn dense(s: &SparseVec, n: usize) -> Vec<Scalar> {
        (0..n).map(|i| s.get(i).cloned().unwrap_or_else(|| q(0))).collect()
    }

    #[test]
    fn rank_and_dependency_certificate() {
        let mut e = Echelon::new(Field::Rational, true);
        assert!(matches!(e.insert(v(&[1, 2, 3])), Insert::Independent { .. }));
        assert!(matches!(e.insert(v(&[0, 1, 1])), Insert::Independent { .. }));
        match e.insert(v(&[2, 5, 7])) {
            Insert::Dependent { combo: Some(c) } => {
                assert_eq!(dense(&c, 2), vec![q(2), q(1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(e.rank(), 2);
        let rows = e.rows();
        assert_eq!(dense(rows[0], 3), vec![q(1), q(0), q(1)]);
        assert_eq!(dense(rows[1], 3), vec![q(0), q(1), q(1)]);
    }

    #[test]
    fn row_combos_reconstruct_rows() {
        let inputs = [v(&[0, 2, 4, 1]), v(&[3, 1, 0, 0]), v(&[3, 3, 4, 1]), v(&[1, 0, 0, 5])];
        let mut e = Echelon::new(Field::Rational, true);
        for x in &inputs {
            e.insert(x.clone());
        }
        let combos = e.row_combos().unwrap();
        for (row, combo) in e.rows().into_iter().zip(combos) {
            let mut acc = SparseVec::zero();
            for (i, c) in combo.entries() {
                acc = acc.axpy(c, &inputs[*i]);
            }
            assert_eq!(&acc, row);
        }
    }

    #[test]
    fn null_space_is_orthogonal() {
        let mut e = Echelon::new(Field::Rational, false);
        e.insert(v(&[1, 1, 0, 2]));
        e.insert(v(&[0, 0, 1, 1]));
        let ns = e.null_space(4);
        assert_eq!(ns.len(), 2);
        for n in &ns {
            for r in [v(&[1, 1, 0, 2]), v(&[0, 0, 1, 1])] {
                let dot = r
                    .entries()
                    .iter()
                    .fold(q(0), |acc, (c, x)| &acc + &(x * n.get(*c).unwrap_or(&q(0))));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn finite_field_rank() {
        let f = Field::prime(3).unwrap();
        let s = |xs: &[i64]| SparseVec::from_pairs(xs.iter().enumerate().map(|(i, &x)| (i, Scalar::from_i64(f, x))));
        let mut e = Echelon::new(f, false);
        e.insert(s(&[1, 1]));
        // (1, 4) = (1, 1) over GF(3).
        assert!(matches!(e.insert(s(&[1, 4])), Insert::Dependent { combo: None }));
    }
}
