// SPDX-License-Identifier: Apache-2.0

//! Exact integer linear algebra.
//!
//! Everything here works over arbitrary-precision integers; there is no
//! floating point and no modular reconstruction. Normal forms are row-style:
//! `hnf` finds `u` with `u·m = h`, `snf` finds `u, v` with `u·m·v = d`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{ext_gcd, round_div};
use crate::error::{Error, Result};

/// Dense integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    #[serde(with = "crate::serde_int::vec")]
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<BigInt>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn mul_vec(&self, x: &[BigInt]) -> Result<Vec<BigInt>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn checked_mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn det(&self) -> Result<BigInt> {
        bareiss_det(self)
    }

    /// Square with determinant ±1.
    pub fn is_unimodular(&self) -> bool {
        self.is_square() && bareiss_det(self).map(|d| d.abs().is_one()).unwrap_or(false)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += k * row[src]`
    fn add_row_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    fn add_col_multiple(&mut self, dst: usize, src: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self[(i, j)]);
            self[(i, j)] = v;
        }
    }

    /// Replaces rows (a, b) by (s·a + t·b, x·a + y·b).
    fn combine_rows(&mut self, a: usize, b: usize, s: &BigInt, t: &BigInt, x: &BigInt, y: &BigInt) {
        for j in 0..self.cols {
            let ra = self[(a, j)].clone();
            let rb = self[(b, j)].clone();
            self[(a, j)] = s * &ra + t * &rb;
            self[(b, j)] = x * &ra + y * &rb;
        }
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        self.checked_mul(rhs).expect("matrix dimension mismatch")
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_rows()).finish()
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_det(m: &IntMatrix) -> Result<BigInt> {
    if !m.is_square() {
        return Err(Error::Dimension(format!("determinant of a {}x{} matrix", m.rows, m.cols)));
    }
    let n = m.rows;
    if n == 0 {
        return Ok(BigInt::one());
    }
    let mut a = m.clone();
    let mut sign = false;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(i) => {
                    a.swap_rows(i, k);
                    sign = !sign;
                }
                None => return Ok(BigInt::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                // exact: Sylvester's identity
                a[(i, j)] = v / &prev;
            }
        }
        prev = a[(k, k)].clone();
    }
    let d = a[(n - 1, n - 1)].clone();
    Ok(if sign { -d } else { d })
}

/// Row Hermite normal form. Returns `(h, u)` with `u` unimodular and `u·m = h`.
///
/// Nonzero rows of `h` come first, pivots are positive and strictly increase
/// in column index, and entries above each pivot lie in `[0, pivot)`.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut r = 0;
    for col in 0..h.cols {
        if r == h.rows {
            break;
        }
        for i in r + 1..h.rows {
            if h[(i, col)].is_zero() {
                continue;
            }
            let a = h[(r, col)].clone();
            let b = h[(i, col)].clone();
            let (g, s, t) = ext_gcd(&a, &b);
            let x = -(&b / &g);
            let y = &a / &g;
            h.combine_rows(r, i, &s, &t, &x, &y);
            u.combine_rows(r, i, &s, &t, &x, &y);
        }
        if h[(r, col)].is_zero() {
            continue;
        }
        if h[(r, col)].is_negative() {
            h.negate_row(r);
            u.negate_row(r);
        }
        let p = h[(r, col)].clone();
        for k in 0..r {
            let q = h[(k, col)].div_floor(&p);
            if !q.is_zero() {
                let nq = -q;
                h.add_row_multiple(k, r, &nq);
                u.add_row_multiple(k, r, &nq);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Pivot columns of a matrix in row Hermite normal form, one per nonzero row.
pub fn hnf_pivots(h: &IntMatrix) -> Vec<usize> {
    (0..h.rows).filter_map(|i| h.row(i).iter().position(|x| !x.is_zero())).collect()
}

/// Smith normal form: `(d, u, v)` with `u·m·v = d`, `u`, `v` unimodular and
/// the diagonal of `d` a nonnegative divisor chain.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows);
    let mut v = IntMatrix::identity(m.cols);
    let n = d.rows.min(d.cols);
    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..d.rows {
                for j in t..d.cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    if best.map_or(true, |(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return (d, u, v);
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..d.rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..d.cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot must divide the rest of the block
            let mut offender = None;
            'outer: for i in t + 1..d.rows {
                for j in t + 1..d.cols {
                    if !d[(i, j)].is_multiple_of(&d[(t, t)]) {
                        offender = Some(i);
                        break 'outer;
                    }
                }
            }
            match offender {
                Some(i) => {
                    let one = BigInt::one();
                    d.add_row_multiple(t, i, &one);
                    u.add_row_multiple(t, i, &one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    (d, u, v)
}

/// Invariant factors (diagonal of the Smith form), including zeros.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let (d, _, _) = snf(m);
    (0..d.rows.min(d.cols)).map(|i| d[(i, i)].clone()).collect()
}

/// Solves `m·x = b` over the integers.
///
/// When the solution set is a positive-dimensional coset `x₀ + K`, the
/// returned representative is reduced against the Hermite basis of the kernel
/// lattice `K` so that every pivot coordinate lies in `[0, pivot)`; it does
/// not depend on how the kernel was found.
pub fn solve_linear(m: &IntMatrix, b: &[BigInt]) -> Result<Option<Vec<BigInt>>> {
    if b.len() != m.rows {
        return Err(Error::Dimension(format!("right-hand side of length {} for {} rows", b.len(), m.rows)));
    }
    let n = m.cols;
    // column operations on m, via row HNF of the transpose: u·mᵀ = h, so m·uᵀ = hᵀ
    let (h, u) = hnf(&m.transpose());
    let pivots = hnf_pivots(&h);
    let rank = pivots.len();
    let mut y = vec![BigInt::zero(); n];
    for (k, &pc) in pivots.iter().enumerate() {
        // equation row `pc` of hᵀ·y = b
        let mut rhs = b[pc].clone();
        for (j, yj) in y.iter().enumerate().take(k) {
            rhs -= &h[(j, pc)] * yj;
        }
        let p = &h[(k, pc)];
        if !rhs.is_multiple_of(p) {
            return Ok(None);
        }
        y[k] = rhs / p;
    }
    // remaining equations must hold
    let ht = h.transpose();
    if ht.mul_vec(&y)? != b {
        return Ok(None);
    }
    let mut x = u.transpose().mul_vec(&y)?;

    if rank < n {
        let kernel_rows: Vec<Vec<BigInt>> = (rank..n).map(|i| u.row(i).to_vec()).collect();
        let kmat = IntMatrix::from_rows(&kernel_rows);
        let (kh, _) = hnf(&kmat);
        for i in 0..kh.rows {
            let Some(pc) = kh.row(i).iter().position(|e| !e.is_zero()) else {
                continue;
            };
            let q = x[pc].div_floor(&kh[(i, pc)]);
            if !q.is_zero() {
                for j in 0..n {
                    x[j] -= &q * &kh[(i, j)];
                }
            }
        }
    }
    Ok(Some(x))
}

/// Positive-definite integral binary form `a·x² + b·xy + c·y²` used as the
/// norm on ℤ² for [`lagrange_gauss`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gram2 {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl Gram2 {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Self {
        Gram2 { a: a.into(), b: b.into(), c: c.into() }
    }

    pub fn eval(&self, v: &[BigInt; 2]) -> BigInt {
        &self.a * &v[0] * &v[0] + &self.b * &v[0] * &v[1] + &self.c * &v[1] * &v[1]
    }

    /// Twice the associated bilinear form.
    pub fn bilinear2(&self, u: &[BigInt; 2], v: &[BigInt; 2]) -> BigInt {
        2 * &self.a * &u[0] * &v[0] + &self.b * (&u[0] * &v[1] + &u[1] * &v[0]) + 2 * &self.c * &u[1] * &v[1]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a.is_positive() && (&self.b * &self.b - &self.a * &self.c * 4u32).is_negative()
    }
}

/// Lagrange–Gauss reduction of a basis of a rank-2 sublattice of ℤ².
///
/// On return `form(v₁)` is the minimum of `form` over nonzero lattice vectors
/// and `form(v₂)` the minimum over vectors independent of `v₁`.
pub fn lagrange_gauss(basis: [[BigInt; 2]; 2], form: &Gram2) -> Result<[[BigInt; 2]; 2]> {
    if !form.is_positive_definite() {
        return Err(Error::InvalidArgument("lagrange_gauss requires a positive-definite form".into()));
    }
    let [mut b1, mut b2] = basis;
    if (&b1[0] * &b2[1] - &b1[1] * &b2[0]).is_zero() {
        return Err(Error::Rank);
    }
    loop {
        if form.eval(&b1) > form.eval(&b2) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let n1 = form.eval(&b1);
        let mu = round_div(&form.bilinear2(&b1, &b2), &(2 * &n1));
        if mu.is_zero() {
            break;
        }
        b2 = [&b2[0] - &mu * &b1[0], &b2[1] - &mu * &b1[1]];
    }
    Ok([b1, b2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::big;
    use proptest::prelude::*;

    fn cofactor_det(m: &[Vec<i64>]) -> BigInt {
        let n = m.len();
        if n == 0 {
            return BigInt::one();
        }
        if n == 1 {
            return big(m[0][0]);
        }
        let mut acc = BigInt::zero();
        for j in 0..n {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                .collect();
            let term = big(m[0][j]) * cofactor_det(&minor);
            if j % 2 == 0 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        acc
    }

    #[test]
    fn det_examples() {
        assert_eq!(bareiss_det(&IntMatrix::identity(5)).unwrap(), big(1));
        assert_eq!(bareiss_det(&IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]])).unwrap(), big(3));
        // Sylvester matrix of (x² + xy + 6y², −y³)
        let syl = IntMatrix::from_rows(&[
            vec![1, 1, 6, 0, 0],
            vec![0, 1, 1, 6, 0],
            vec![0, 0, 1, 1, 6],
            vec![0, 0, 0, -1, 0],
            vec![0, 0, 0, 0, -1],
        ]);
        assert_eq!(bareiss_det(&syl).unwrap(), big(1));
        assert!(matches!(bareiss_det(&IntMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn det_needs_pivoting() {
        let m = IntMatrix::from_rows(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]);
        assert_eq!(bareiss_det(&m).unwrap(), cofactor_det(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]));
        let singular = IntMatrix::from_rows(&[vec![0, 0], vec![0, 5]]);
        assert_eq!(bareiss_det(&singular).unwrap(), big(0));
    }

    #[test]
    fn hnf_examples() {
        let (h, u) = hnf(&IntMatrix::identity(3));
        assert_eq!(h, IntMatrix::identity(3));
        assert_eq!(u, IntMatrix::identity(3));

        let m = IntMatrix::from_rows(&[vec![2, 4], vec![1, 3]]);
        let (h, u) = hnf(&m);
        assert_eq!(&u * &m, h);
        assert!(u.is_unimodular());
        // the entry above the pivot 2 is reduced into [0, 2)
        assert_eq!(h, IntMatrix::from_rows(&[vec![1, 1], vec![0, 2]]));

        let (h, _) = hnf(&IntMatrix::zeros(2, 2));
        assert!(h.is_zero());
    }

    #[test]
    fn snf_examples() {
        let (d, u, v) = snf(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(d, IntMatrix::from_rows(&[vec![1, 0], vec![0, 6]]));
        assert!(u.is_unimodular() && v.is_unimodular());
        let (d, _, _) = snf(&IntMatrix::identity(3));
        assert_eq!(d, IntMatrix::identity(3));
        let (d, _, _) = snf(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 4]]));
        assert_eq!(d, IntMatrix::from_rows(&[vec![2, 0], vec![0, 4]]));
    }

    #[test]
    fn solve_examples() {
        let id = IntMatrix::identity(2);
        assert_eq!(solve_linear(&id, &[big(7), big(-2)]).unwrap(), Some(vec![big(7), big(-2)]));
        let two = IntMatrix::from_rows(&[vec![2]]);
        assert_eq!(solve_linear(&two, &[big(3)]).unwrap(), None);
        assert!(solve_linear(&two, &[big(3), big(1)]).is_err());
    }

    #[test]
    fn solve_underdetermined_is_canonical() {
        // x + 2y + 3z = 10: any two routes to a solution reduce to the same representative
        let m = IntMatrix::from_rows(&[vec![1, 2, 3]]);
        let x = solve_linear(&m, &[big(10)]).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), vec![big(10)]);
        let m2 = IntMatrix::from_rows(&[vec![1, 2, 3]]);
        assert_eq!(solve_linear(&m2, &[big(10)]).unwrap().unwrap(), x);
    }

    #[test]
    fn lagrange_examples() {
        let form = Gram2::new(1, 0, 1);
        let std = [[big(1), big(0)], [big(0), big(1)]];
        assert_eq!(lagrange_gauss(std.clone(), &form).unwrap(), std);
        let skew = [[big(1), big(0)], [big(5), big(1)]];
        assert_eq!(lagrange_gauss(skew, &form).unwrap(), [[big(1), big(0)], [big(0), big(1)]]);
        let flat = [[big(1), big(2)], [big(2), big(4)]];
        assert_eq!(lagrange_gauss(flat, &form), Err(Error::Rank));
    }

    fn small_matrix(max_dim: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1..=max_dim).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-6i64..=6, n), n))
    }

    fn rect_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        (1usize..=4, 1usize..=4)
            .prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
    }

    fn is_hnf(h: &IntMatrix) -> bool {
        let mut last: Option<usize> = None;
        let mut seen_zero = false;
        for i in 0..h.rows() {
            match h.row(i).iter().position(|x| !x.is_zero()) {
                None => seen_zero = true,
                Some(p) => {
                    if seen_zero || last.map_or(false, |l| p <= l) || !h[(i, p)].is_positive() {
                        return false;
                    }
                    for k in 0..i {
                        if h[(k, p)].is_negative() || h[(k, p)] >= h[(i, p)] {
                            return false;
                        }
                    }
                    last = Some(p);
                }
            }
        }
        true
    }

    proptest! {
        #[test]
        fn bareiss_matches_cofactor(m in small_matrix(5)) {
            prop_assert_eq!(bareiss_det(&IntMatrix::from_rows(&m)).unwrap(), cofactor_det(&m));
        }

        #[test]
        fn hnf_is_certified(m in rect_matrix()) {
            let m = IntMatrix::from_rows(&m);
            let (h, u) = hnf(&m);
            prop_assert_eq!(&u * &m, h.clone());
            prop_assert!(u.is_unimodular());
            prop_assert!(is_hnf(&h));
            let (h2, _) = hnf(&h);
            prop_assert_eq!(h2, h);
        }

        #[test]
        fn snf_is_certified(m in rect_matrix()) {
            let m = IntMatrix::from_rows(&m);
            let (d, u, v) = snf(&m);
            prop_assert_eq!(&(&u * &m) * &v, d.clone());
            prop_assert!(u.is_unimodular() && v.is_unimodular());
            let k = d.rows().min(d.cols());
            for i in 0..d.rows() {
                for j in 0..d.cols() {
                    if i != j { prop_assert!(d[(i, j)].is_zero()); }
                }
            }
            for i in 0..k {
                prop_assert!(!d[(i, i)].is_negative());
                if i + 1 < k && !d[(i, i)].is_zero() {
                    prop_assert!(d[(i + 1, i + 1)].is_multiple_of(&d[(i, i)]));
                }
                if d[(i, i)].is_zero() && i + 1 < k {
                    prop_assert!(d[(i + 1, i + 1)].is_zero());
                }
            }
            if m.is_square() {
                let det = bareiss_det(&m).unwrap().abs();
                let prod: BigInt = (0..k).map(|i| d[(i, i)].clone()).product();
                prop_assert_eq!(prod, det);
            }
        }

        #[test]
        fn solve_is_exact(m in rect_matrix(), seed in prop::collection::vec(-5i64..=5, 4)) {
            let m = IntMatrix::from_rows(&m);
            let x0: Vec<BigInt> = seed.iter().take(m.cols()).map(|&s| big(s)).collect();
            prop_assume!(x0.len() == m.cols());
            let b = m.mul_vec(&x0).unwrap();
            let x = solve_linear(&m, &b).unwrap();
            prop_assert!(x.is_some());
            prop_assert_eq!(m.mul_vec(&x.unwrap()).unwrap(), b);
        }

        #[test]
        fn solve_absent_is_certified(m in rect_matrix(), b in prop::collection::vec(-7i64..=7, 4)) {
            let m = IntMatrix::from_rows(&m);
            let b: Vec<BigInt> = b.iter().take(m.rows()).map(|&s| big(s)).collect();
            prop_assume!(b.len() == m.rows());
            match solve_linear(&m, &b).unwrap() {
                Some(x) => prop_assert_eq!(m.mul_vec(&x).unwrap(), b),
                None => {
                    // SNF diagnostic: u·b must fail divisibility or hit a zero row
                    let (d, u, _) = snf(&m);
                    let ub = u.mul_vec(&b).unwrap();
                    let k = d.rows().min(d.cols());
                    let obstructed = (0..d.rows()).any(|i| {
                        let di = if i < k { d[(i, i)].clone() } else { BigInt::zero() };
                        if di.is_zero() { !ub[i].is_zero() } else { !ub[i].is_multiple_of(&di) }
                    });
                    prop_assert!(obstructed);
                }
            }
        }

        #[test]
        fn lagrange_finds_minimum(
            a in 1i64..6, bb in -4i64..=4, c in 1i64..6,
            v in prop::collection::vec(-4i64..=4, 4),
        ) {
            let form = Gram2::new(a, bb, c);
            prop_assume!(form.is_positive_definite());
            let b1 = [big(v[0]), big(v[1])];
            let b2 = [big(v[2]), big(v[3])];
            let det0 = &b1[0] * &b2[1] - &b1[1] * &b2[0];
            prop_assume!(!det0.is_zero());
            let [r1, r2] = lagrange_gauss([b1, b2], &form).unwrap();
            let det1 = &r1[0] * &r2[1] - &r1[1] * &r2[0];
            prop_assert_eq!(det1.abs(), det0.abs());
            // exhaustive search over lattice vectors x·r1 + y·r2 in a box
            let m1 = form.eval(&r1);
            let m2 = form.eval(&r2);
            for x in -12i64..=12 {
                for y in -12i64..=12 {
                    if x == 0 && y == 0 { continue; }
                    let w = [big(x) * &r1[0] + big(y) * &r2[0], big(x) * &r1[1] + big(y) * &r2[1]];
                    let val = form.eval(&w);
                    prop_assert!(val >= m1);
                    if y != 0 { prop_assert!(val >= m2); }
                }
            }
        }
    }
}
