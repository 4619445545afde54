//! Exact integer linear algebra: Smith and Hermite normal forms, kernels,
//! cokernels and integral solving.
//!
//! All routines use a fixed pivoting order so their outputs are
//! deterministic functions of the input matrix.

use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// `P · A · Q = D` with `D` diagonal, `P` and `Q` unimodular and the
/// nonzero diagonal entries forming a divisibility chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition<T> {
    pub d: Matrix<T>,
    pub p: Matrix<T>,
    pub q: Matrix<T>,
}

impl<T: Scalar> SmithDecomposition<T> {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .take_while(|v| !v.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

fn smallest_nonzero<T: Scalar>(
    d: &Matrix<T>,
    cells: impl Iterator<Item = (usize, usize)>,
) -> Option<(usize, usize)> {
    let mut best: Option<((usize, usize), T)> = None;
    for (i, j) in cells {
        let v = d[(i, j)].abs();
        if v.is_zero() {
            continue;
        }
        if best.as_ref().map_or(true, |(_, b)| v < *b) {
            best = Some(((i, j), v));
        }
    }
    best.map(|(c, _)| c)
}

pub fn smith_normal_form<T: Scalar>(a: &Matrix<T>) -> SmithDecomposition<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut p = Matrix::identity(m);
    let mut q = Matrix::identity(n);

    for t in 0..m.min(n) {
        let block = (t..m).flat_map(|i| (t..n).map(move |j| (i, j)));
        let Some((pi, pj)) = smallest_nonzero(&d, block) else {
            break;
        };
        d.swap_rows(t, pi);
        p.swap_rows(t, pi);
        d.swap_cols(t, pj);
        q.swap_cols(t, pj);

        loop {
            // Bring the smallest entry of row t / column t to the pivot.
            let cross = (t..m).map(|i| (i, t)).chain((t + 1..n).map(|j| (t, j)));
            let (ci, cj) = smallest_nonzero(&d, cross).expect("pivot is nonzero");
            if ci != t {
                d.swap_rows(t, ci);
                p.swap_rows(t, ci);
            }
            if cj != t {
                d.swap_cols(t, cj);
                q.swap_cols(t, cj);
            }

            let pivot = d[(t, t)].clone();
            let mut clean = true;
            for i in t + 1..m {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let f = -d[(i, t)].div_floor(&pivot);
                d.add_row_multiple(i, t, &f);
                p.add_row_multiple(i, t, &f);
                clean &= d[(i, t)].is_zero();
            }
            for j in t + 1..n {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let f = -d[(t, j)].div_floor(&pivot);
                d.add_col_multiple(j, t, &f);
                q.add_col_multiple(j, t, &f);
                clean &= d[(t, j)].is_zero();
            }
            if !clean {
                continue;
            }

            // Enforce divisibility of the trailing block by the pivot.
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&pivot)));
            match offender {
                Some(i) => {
                    d.add_row_multiple(t, i, &T::one());
                    p.add_row_multiple(t, i, &T::one());
                }
                None => break,
            }
        }

        if d[(t, t)].is_negative() {
            d.negate_row(t);
            p.negate_row(t);
        }
    }

    SmithDecomposition { d, p, q }
}

/// Row-style Hermite normal form of the lattice spanned by the rows of `a`.
///
/// Zero rows are dropped; pivots are positive and entries above each pivot
/// are reduced into `[0, pivot)`.
pub fn hermite_rows<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let mut h = a.clone();
    let (m, n) = (h.rows(), h.cols());
    let mut r = 0;
    for col in 0..n {
        if r == m {
            break;
        }
        loop {
            let Some((pi, _)) = smallest_nonzero(&h, (r..m).map(|i| (i, col))) else {
                break;
            };
            h.swap_rows(r, pi);
            let pivot = h[(r, col)].clone();
            let mut clean = true;
            for i in r + 1..m {
                if h[(i, col)].is_zero() {
                    continue;
                }
                let f = -h[(i, col)].div_floor(&pivot);
                h.add_row_multiple(i, r, &f);
                clean &= h[(i, col)].is_zero();
            }
            if clean {
                break;
            }
        }
        if h[(r, col)].is_zero() {
            continue;
        }
        if h[(r, col)].is_negative() {
            h.negate_row(r);
        }
        let pivot = h[(r, col)].clone();
        for i in 0..r {
            let f = -h[(i, col)].div_floor(&pivot);
            if !f.is_zero() {
                h.add_row_multiple(i, r, &f);
            }
        }
        r += 1;
    }
    h.select_rows(&(0..r).collect::<Vec<_>>())
}

/// Columns form a basis of the saturated integer kernel `{v : A v = 0}`,
/// presented in column Hermite form.
pub fn kernel_basis<T: Scalar>(a: &Matrix<T>) -> Matrix<T> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let n = a.cols();
    let raw = snf.q.select_columns(&(r..n).collect::<Vec<_>>());
    hermite_rows(&raw.transpose()).transpose()
}

/// Presentation of `coker(A) = Z^rows / im(A)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cokernel<T> {
    /// Rank of the free part.
    pub rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<T>,
    /// Surjection `Z^rows -> Z^rank` whose kernel is the saturation of `im(A)`.
    pub proj: Matrix<T>,
}

pub fn cokernel_projection<T: Scalar>(a: &Matrix<T>) -> Cokernel<T> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let m = a.rows();
    let torsion = snf.invariant_factors().into_iter().filter(|f| !f.is_one()).collect();
    let raw = snf.p.select_rows(&(r..m).collect::<Vec<_>>());
    let proj = if raw.rows() == 0 { Matrix::zeros(0, m) } else { hermite_rows(&raw) };
    Cokernel { rank: m - r, torsion, proj }
}

/// Some integral `x` with `A x = b`, or `None` if there is none.
pub fn solve_integer<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Option<Vec<T>> {
    assert_eq!(b.len(), a.rows(), "right-hand side length mismatch");
    let snf = smith_normal_form(a);
    let factors = snf.invariant_factors();
    let pb = snf.p.mul_vec(b);
    let mut y = vec![T::zero(); a.cols()];
    for (i, v) in pb.iter().enumerate() {
        match factors.get(i) {
            Some(f) => {
                if !v.is_multiple_of(f) {
                    return None;
                }
                y[i] = v.clone() / f.clone();
            }
            None if !v.is_zero() => return None,
            None => {}
        }
    }
    Some(snf.q.mul_vec(&y))
}

/// Rank over the rationals, by fraction-free (Bareiss) elimination.
pub fn rank<T: Scalar>(a: &Matrix<T>) -> usize {
    bareiss(a.clone()).0
}

/// Determinant of a square matrix.
pub fn determinant<T: Scalar>(a: &Matrix<T>) -> T {
    assert_eq!(a.rows(), a.cols(), "determinant of a non-square matrix");
    if a.rows() == 0 {
        return T::one();
    }
    let (r, m, sign) = bareiss(a.clone());
    if r < a.rows() {
        return T::zero();
    }
    let n = a.rows();
    if sign {
        -m[(n - 1, n - 1)].clone()
    } else {
        m[(n - 1, n - 1)].clone()
    }
}

/// Returns (rank, eliminated matrix, odd number of row swaps).
fn bareiss<T: Scalar>(mut m: Matrix<T>) -> (usize, Matrix<T>, bool) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = T::one();
    let mut r = 0;
    let mut odd = false;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pi) = (r..rows).find(|&i| !m[(i, c)].is_zero()) else {
            continue;
        };
        if pi != r {
            m.swap_rows(r, pi);
            odd = !odd;
        }
        let pivot = m[(r, c)].clone();
        for i in r + 1..rows {
            let lead = m[(i, c)].clone();
            for j in c..cols {
                let v = pivot.clone() * m[(i, j)].clone() - lead.clone() * m[(r, j)].clone();
                m[(i, j)] = v / prev.clone();
            }
        }
        prev = pivot;
        r += 1;
    }
    (r, m, odd)
}
