//! Dense exact linear algebra over Z/p and Z/p^2.
//!
//! Every higher layer reduces its questions to [`solve_linear`] and
//! [`kernel_image`]. Elimination is a Smith-style diagonalization with a fixed
//! pivot rule (leftmost column, then smallest row, units before p-multiples),
//! so results are reproducible bit for bit.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::Error;

/// Largest admissible prime.
pub const MAX_PRIME: u32 = 97;

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 1;
    }
    true
}

/// Splits a modulus into `(p, exponent)`, accepting only `p` or `p^2` with
/// `p` prime and at most [`MAX_PRIME`].
pub fn split_modulus(m: u32) -> Result<(u32, u32), Error> {
    if m >= 2 && m <= MAX_PRIME && is_prime(m) {
        return Ok((m, 1));
    }
    let r = isqrt(m);
    if r * r == m && r <= MAX_PRIME && is_prime(r) {
        return Ok((r, 2));
    }
    Err(Error::BadModulus(m))
}

fn isqrt(m: u32) -> u32 {
    let mut r = 0u32;
    while (r + 1) * (r + 1) <= m {
        r += 1;
    }
    r
}

/// A residue with its modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    value: u32,
    modulus: u32,
}

impl Scalar {
    pub fn new(value: i64, modulus: u32) -> Result<Self, Error> {
        split_modulus(modulus)?;
        Ok(Scalar { value: value.rem_euclid(modulus as i64) as u32, modulus })
    }
    pub fn value(self) -> u32 {
        self.value
    }
    pub fn modulus(self) -> u32 {
        self.modulus
    }
    fn check(self, o: Scalar) {
        assert_eq!(self.modulus, o.modulus, "scalar modulus mismatch");
    }
    pub fn add(self, o: Scalar) -> Scalar {
        self.check(o);
        Scalar { value: (self.value + o.value) % self.modulus, modulus: self.modulus }
    }
    pub fn sub(self, o: Scalar) -> Scalar {
        self.check(o);
        Scalar { value: (self.value + self.modulus - o.value) % self.modulus, modulus: self.modulus }
    }
    pub fn mul(self, o: Scalar) -> Scalar {
        self.check(o);
        Scalar { value: mulm(self.value, o.value, self.modulus), modulus: self.modulus }
    }
    pub fn inverse(self) -> Option<Scalar> {
        inv(self.value, self.modulus).map(|v| Scalar { value: v, modulus: self.modulus })
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[inline]
pub(crate) fn mulm(a: u32, b: u32, m: u32) -> u32 {
    ((a as u64 * b as u64) % m as u64) as u32
}

#[inline]
pub(crate) fn addm(a: u32, b: u32, m: u32) -> u32 {
    let s = a + b;
    if s >= m {
        s - m
    } else {
        s
    }
}

#[inline]
pub(crate) fn negm(a: u32, m: u32) -> u32 {
    if a == 0 {
        0
    } else {
        m - a
    }
}

/// Inverse of `a` modulo `m`, if `a` is a unit.
pub fn inv(a: u32, m: u32) -> Option<u32> {
    let (mut r0, mut r1) = (m as i64, (a % m) as i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i64) as u32)
}

/// Dense row-major matrix with entries in Z/modulus.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    rows: usize,
    cols: usize,
    modulus: u32,
    data: Vec<u32>,
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mat[{}x{} mod {}]", self.rows, self.cols, self.modulus)?;
        for r in 0..self.rows {
            write!(f, "\n  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl Mat {
    pub fn zero(rows: usize, cols: usize, modulus: u32) -> Mat {
        Mat { rows, cols, modulus, data: vec![0; rows * cols] }
    }

    pub fn identity(n: usize, modulus: u32) -> Mat {
        let mut m = Mat::zero(n, n, modulus);
        for i in 0..n {
            m.data[i * n + i] = 1 % modulus;
        }
        m
    }

    /// Builds from signed rows; entries are reduced into `[0, modulus)`.
    pub fn from_rows(rows: &[&[i64]], modulus: u32) -> Mat {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut m = Mat::zero(r, c, modulus);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, &v) in row.iter().enumerate() {
                m.data[i * c + j] = v.rem_euclid(modulus as i64) as u32;
            }
        }
        m
    }

    pub fn from_columns(cols: &[Vec<u32>], rows: usize, modulus: u32) -> Mat {
        let mut m = Mat::zero(rows, cols.len(), modulus);
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in 0..rows {
                m.data[i * m.cols + j] = c[i] % modulus;
            }
        }
        m
    }

    pub fn column_vector(v: &[u32], modulus: u32) -> Mat {
        Mat::from_columns(&[v.to_vec()], v.len(), modulus)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v % self.modulus;
    }

    pub fn scalar(&self, r: usize, c: usize) -> Scalar {
        Scalar { value: self.get(r, c), modulus: self.modulus }
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<u32> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> &[u32] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    /// Reinterprets the entries modulo a divisor of the current modulus.
    pub fn reduce(&self, m: u32) -> Mat {
        assert!(self.modulus % m == 0, "cannot reduce mod {} to {}", self.modulus, m);
        Mat { rows: self.rows, cols: self.cols, modulus: m, data: self.data.iter().map(|x| x % m).collect() }
    }

    /// Reinterprets the entries in a multiple modulus (canonical lift).
    pub fn lift(&self, m: u32) -> Mat {
        assert!(m % self.modulus == 0);
        Mat { rows: self.rows, cols: self.cols, modulus: m, data: self.data.clone() }
    }

    fn common(&self, o: &Mat) -> u32 {
        if self.modulus == o.modulus {
            self.modulus
        } else if self.modulus % o.modulus == 0 {
            o.modulus
        } else if o.modulus % self.modulus == 0 {
            self.modulus
        } else {
            panic!("incompatible moduli {} and {}", self.modulus, o.modulus)
        }
    }

    /// Product; when the moduli are `p` and `p^2` the result is taken mod `p`.
    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows, "dimension mismatch in product");
        let m = self.common(o);
        let mut out = Mat::zero(self.rows, o.cols, m);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k) % m;
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j) % m;
                    if b != 0 {
                        let idx = i * o.cols + j;
                        out.data[idx] = addm(out.data[idx], mulm(a, b, m), m);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(self.cols, v.len(), "dimension mismatch in apply");
        let m = self.modulus;
        (0..self.rows)
            .map(|i| {
                let mut s = 0u64;
                for (k, &x) in v.iter().enumerate() {
                    s += self.get(i, k) as u64 * (x % m) as u64;
                }
                (s % m as u64) as u32
            })
            .collect()
    }

    fn zip(&self, o: &Mat, f: impl Fn(u32, u32, u32) -> u32) -> Mat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "shape mismatch");
        let m = self.common(o);
        Mat {
            rows: self.rows,
            cols: self.cols,
            modulus: m,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| f(a % m, b % m, m)).collect(),
        }
    }

    pub fn add(&self, o: &Mat) -> Mat {
        self.zip(o, addm)
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        self.zip(o, |a, b, m| addm(a, negm(b, m), m))
    }

    pub fn neg(&self) -> Mat {
        let m = self.modulus;
        Mat { data: self.data.iter().map(|&a| negm(a, m)).collect(), ..self.clone() }
    }

    pub fn scale(&self, c: u32) -> Mat {
        let m = self.modulus;
        Mat { data: self.data.iter().map(|&a| mulm(a, c % m, m)).collect(), ..self.clone() }
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zero(self.cols, self.rows, self.modulus);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn hstack(&self, o: &Mat) -> Mat {
        assert_eq!(self.rows, o.rows);
        let m = self.common(o);
        let mut out = Mat::zero(self.rows, self.cols + o.cols, m);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
            for j in 0..o.cols {
                out.set(i, self.cols + j, o.get(i, j));
            }
        }
        out
    }

    pub fn vstack(&self, o: &Mat) -> Mat {
        self.transpose().hstack(&o.transpose()).transpose()
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block(a: &Mat, b: &Mat, c: &Mat, d: &Mat) -> Mat {
        a.hstack(b).vstack(&c.hstack(d))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        let mut out = Mat::zero(idx.len(), self.cols, self.modulus);
        for (k, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                out.data[k * self.cols + j] = self.get(i, j);
            }
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        self.transpose().select_rows(idx).transpose()
    }
}

/// Result of [`solve_linear`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub particular: Vec<u32>,
    /// Generators of `{x : Ax = 0}`; a basis over a field, a minimal
    /// generating set over Z/p^2.
    pub homogeneous: Vec<Vec<u32>>,
}

/// Result of [`kernel_image`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelImage {
    pub kernel: Vec<Vec<u32>>,
    pub image: Vec<Vec<u32>>,
    /// Preimages of the image generators: `A * image_sources[i] = image[i]`.
    pub image_sources: Vec<Vec<u32>>,
    /// Nonzero Smith diagonal, each entry a power of p (1 for units).
    pub smith: Vec<u32>,
    /// Number of unit diagonal entries.
    pub rank: usize,
}

struct Smith {
    diag: Vec<u32>,
    q: Mat,
}

/// Diagonalizes `a` in place, applying the row operations to `rhs` and
/// recording the column operations in `q`, so that `P A Q = diag`.
fn smith(a: &Mat, rhs: &mut [Vec<u32>]) -> Smith {
    let m = a.modulus;
    let (p, _) = split_modulus(m).expect("validated modulus");
    let mut w = a.clone();
    let mut q = Mat::identity(a.cols, m);
    let mut diag = Vec::new();
    let mut r = 0;
    while r < w.rows && r < w.cols {
        // leftmost column holding a unit, smallest row; else the same for any nonzero entry
        let mut pivot = None;
        'unit: for c in r..w.cols {
            for i in r..w.rows {
                if w.get(i, c) % p != 0 {
                    pivot = Some((i, c));
                    break 'unit;
                }
            }
        }
        if pivot.is_none() {
            'any: for c in r..w.cols {
                for i in r..w.rows {
                    if w.get(i, c) != 0 {
                        pivot = Some((i, c));
                        break 'any;
                    }
                }
            }
        }
        let Some((pi, pc)) = pivot else { break };
        swap_rows(&mut w, rhs, r, pi);
        swap_cols(&mut w, &mut q, r, pc);
        let v = w.get(r, r);
        let (unit, val) = if v % p != 0 { (v, 1) } else { (v / p, p) };
        let u = inv(unit, m).expect("unit pivot");
        scale_row(&mut w, rhs, r, u);
        debug_assert_eq!(w.get(r, r), val);
        for i in 0..w.rows {
            if i == r {
                continue;
            }
            let e = w.get(i, r);
            if e != 0 {
                let f = negm(e / val, m);
                add_row(&mut w, rhs, i, r, f);
            }
        }
        for j in r + 1..w.cols {
            let e = w.get(r, j);
            if e != 0 {
                let f = negm(e / val, m);
                add_col(&mut w, &mut q, j, r, f);
            }
        }
        diag.push(val);
        r += 1;
    }
    Smith { diag, q }
}

fn swap_rows(w: &mut Mat, rhs: &mut [Vec<u32>], a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..w.cols {
        w.data.swap(a * w.cols + j, b * w.cols + j);
    }
    for v in rhs.iter_mut() {
        v.swap(a, b);
    }
}

fn swap_cols(w: &mut Mat, q: &mut Mat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..w.rows {
        w.data.swap(i * w.cols + a, i * w.cols + b);
    }
    for i in 0..q.rows {
        q.data.swap(i * q.cols + a, i * q.cols + b);
    }
}

fn scale_row(w: &mut Mat, rhs: &mut [Vec<u32>], r: usize, u: u32) {
    let m = w.modulus;
    for j in 0..w.cols {
        let idx = r * w.cols + j;
        w.data[idx] = mulm(w.data[idx], u, m);
    }
    for v in rhs.iter_mut() {
        v[r] = mulm(v[r], u, m);
    }
}

// row_i += f * row_r
fn add_row(w: &mut Mat, rhs: &mut [Vec<u32>], i: usize, r: usize, f: u32) {
    let m = w.modulus;
    for j in 0..w.cols {
        let x = w.data[r * w.cols + j];
        if x != 0 {
            let idx = i * w.cols + j;
            w.data[idx] = addm(w.data[idx], mulm(f, x, m), m);
        }
    }
    for v in rhs.iter_mut() {
        v[i] = addm(v[i], mulm(f, v[r], m), m);
    }
}

// col_j += f * col_r
fn add_col(w: &mut Mat, q: &mut Mat, j: usize, r: usize, f: u32) {
    let m = w.modulus;
    for mat in [w, q] {
        for i in 0..mat.rows {
            let x = mat.data[i * mat.cols + r];
            if x != 0 {
                let idx = i * mat.cols + j;
                mat.data[idx] = addm(mat.data[idx], mulm(f, x, m), m);
            }
        }
    }
}

fn homogeneous_from(s: &Smith, cols: usize, m: u32) -> Vec<Vec<u32>> {
    let mut gens = Vec::new();
    for (i, &d) in s.diag.iter().enumerate() {
        if d != 1 {
            // d = p: the coordinate is free modulo m/p
            let mut y = vec![0; cols];
            y[i] = m / d;
            gens.push(s.q.apply(&y));
        }
    }
    for j in s.diag.len()..cols {
        let mut y = vec![0; cols];
        y[j] = 1;
        gens.push(s.q.apply(&y));
    }
    gens
}

/// Solves `A x = b`. Returns `Ok(None)` when no solution exists.
pub fn solve_linear(a: &Mat, b: &[u32]) -> Result<Option<Solution>, Error> {
    if b.len() != a.rows {
        return Err(Error::Dimension { expected: a.rows, found: b.len() });
    }
    split_modulus(a.modulus)?;
    let m = a.modulus;
    let mut rhs = vec![b.iter().map(|x| x % m).collect::<Vec<_>>()];
    let s = smith(a, &mut rhs);
    let c = &rhs[0];
    let mut y = vec![0; a.cols];
    for (i, &d) in s.diag.iter().enumerate() {
        if c[i] % d != 0 {
            return Ok(None);
        }
        y[i] = c[i] / d;
    }
    if c[s.diag.len()..].iter().any(|&x| x != 0) {
        return Ok(None);
    }
    Ok(Some(Solution { particular: s.q.apply(&y), homogeneous: homogeneous_from(&s, a.cols, m) }))
}

/// Same as [`solve_linear`] with a matrix right-hand side, one column at a time.
pub fn solve_columns(a: &Mat, b: &Mat) -> Result<Option<Mat>, Error> {
    if b.rows != a.rows {
        return Err(Error::Dimension { expected: a.rows, found: b.rows });
    }
    let mut cols = Vec::with_capacity(b.cols);
    for j in 0..b.cols {
        match solve_linear(a, &b.column(j))? {
            Some(s) => cols.push(s.particular),
            None => return Ok(None),
        }
    }
    Ok(Some(Mat::from_columns(&cols, a.cols, a.modulus)))
}

pub fn kernel_image(a: &Mat) -> KernelImage {
    let m = a.modulus;
    let s = smith(a, &mut []);
    let kernel = homogeneous_from(&s, a.cols, m);
    let mut image = Vec::new();
    let mut image_sources = Vec::new();
    for i in 0..s.diag.len() {
        let src = s.q.column(i);
        image.push(a.apply(&src));
        image_sources.push(src);
    }
    let rank = s.diag.iter().filter(|&&d| d == 1).count();
    KernelImage { kernel, image, image_sources, smith: s.diag, rank }
}

/// Relation columns `o_i e_i` for the coordinates whose order is below `m`.
fn relations(orders: &[u32], m: u32) -> Mat {
    let cols: Vec<Vec<u32>> = orders
        .iter()
        .enumerate()
        .filter(|(_, &o)| o != m)
        .map(|(i, &o)| {
            let mut v = vec![0; orders.len()];
            v[i] = o;
            v
        })
        .collect();
    Mat::from_columns(&cols, orders.len(), m)
}

fn normalize(v: &mut [u32], orders: &[u32]) {
    for (x, &o) in v.iter_mut().zip(orders) {
        *x %= o;
    }
}

/// Kernel of `a` between modules whose coordinates have the given orders
/// (each dividing the largest one, the working modulus).
pub fn kernel_in(a: &Mat, src: &[u32], tgt: &[u32]) -> Vec<Vec<u32>> {
    let m = src.iter().chain(tgt).copied().max().unwrap_or(a.modulus()).max(a.modulus());
    let a = if a.modulus() == m { a.clone() } else { a.lift(m) };
    let full = a.hstack(&relations(tgt, m));
    let mut out = Vec::new();
    for mut v in kernel_image(&full).kernel {
        v.truncate(a.cols());
        normalize(&mut v, src);
        if v.iter().any(|&x| x != 0) && !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Solves `a x = b` modulo the target orders; the solution is normalized by
/// the source orders.
pub fn solve_in(a: &Mat, b: &[u32], src: &[u32], tgt: &[u32]) -> Option<Vec<u32>> {
    let m = src.iter().chain(tgt).copied().max().unwrap_or(a.modulus()).max(a.modulus());
    let a = if a.modulus() == m { a.clone() } else { a.lift(m) };
    let full = a.hstack(&relations(tgt, m));
    let sol = solve_linear(&full, b).expect("shapes checked by caller")?;
    let mut x = sol.particular;
    x.truncate(a.cols());
    normalize(&mut x, src);
    Some(x)
}

/// Incremental row echelon basis of a subspace of `F_p^n`.
#[derive(Clone, Debug)]
pub struct Span {
    p: u32,
    n: usize,
    rows: Vec<(usize, Vec<u32>)>,
}

impl Span {
    pub fn new(n: usize, p: u32) -> Span {
        Span { p, n, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the span.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p;
        let mut w: Vec<u32> = v.iter().map(|x| x % p).collect();
        for (piv, row) in &self.rows {
            let c = w[*piv];
            if c != 0 {
                let f = negm(c, p);
                for (x, &y) in w.iter_mut().zip(row) {
                    *x = addm(*x, mulm(f, y, p), p);
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(v.len(), self.n);
        let p = self.p;
        let mut w = self.reduce(v);
        let Some(piv) = w.iter().position(|&x| x != 0) else { return false };
        let u = inv(w[piv], p).expect("field");
        for x in w.iter_mut() {
            *x = mulm(*x, u, p);
        }
        for (_, row) in self.rows.iter_mut() {
            let c = row[piv];
            if c != 0 {
                let f = negm(c, p);
                for (x, &y) in row.iter_mut().zip(&w) {
                    *x = addm(*x, mulm(f, y, p), p);
                }
            }
        }
        self.rows.push((piv, w));
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let a = Mat::identity(3, 5);
        let s = solve_linear(&a, &[1, 2, 3]).unwrap().unwrap();
        assert_eq!(s.particular, vec![1, 2, 3]);
        assert!(s.homogeneous.is_empty());
    }

    #[test]
    fn two_over_z4() {
        let a = Mat::from_rows(&[&[2]], 4);
        let s = solve_linear(&a, &[2]).unwrap().unwrap();
        assert_eq!(s.particular, vec![1]);
        assert_eq!(s.homogeneous, vec![vec![2]]);
        assert_eq!(solve_linear(&a, &[1]).unwrap(), None);
        let ki = kernel_image(&a);
        assert_eq!(ki.kernel, vec![vec![2]]);
        assert_eq!(ki.image, vec![vec![2]]);
        assert_eq!(ki.smith, vec![2]);
    }

    #[test]
    fn zero_map_kernel() {
        let ki = kernel_image(&Mat::zero(2, 3, 3));
        assert_eq!(ki.kernel, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert!(ki.image.is_empty());
    }

    #[test]
    fn x_multiplication() {
        let a = Mat::from_rows(&[&[0, 0], &[1, 0]], 2);
        let ki = kernel_image(&a);
        assert_eq!(ki.kernel, vec![vec![0, 1]]);
        assert_eq!(ki.image, vec![vec![0, 1]]);
    }

    #[test]
    fn rejects_bad_input() {
        let a = Mat::identity(2, 5);
        assert!(matches!(solve_linear(&a, &[1]), Err(Error::Dimension { .. })));
        assert!(split_modulus(6).is_err());
        assert!(split_modulus(101).is_err());
        assert_eq!(split_modulus(9409).unwrap(), (97, 2));
        assert!(Scalar::new(3, 12).is_err());
    }

    #[test]
    fn span_tracks_membership() {
        let mut s = Span::new(3, 3);
        assert!(s.insert(&[1, 2, 0]));
        assert!(s.insert(&[0, 1, 1]));
        assert!(!s.insert(&[1, 0, 1]));
        assert!(s.contains(&[2, 1, 0]));
        assert_eq!(s.dim(), 2);
    }
}
