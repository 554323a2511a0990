//! Dense complex matrix kernels shared by the rest of the crate.
//!
//! Matrix products go through `matrixmultiply::zgemm`, which is several times
//! faster than nalgebra's generic complex product at the sizes used here.

use matrixmultiply::CGemmOption;
use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Matrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// How an operand enters a product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    /// The matrix as stored.
    N,
    /// Conjugate transpose.
    H,
}

/// `c <- alpha * op(a) * op(b) + beta * c`.
pub fn gemm(alpha: C64, a: &Matrix, op_a: Op, b: &Matrix, op_b: Op, beta: C64, c: &mut Matrix) {
    let (m, k) = match op_a {
        Op::N => (a.nrows(), a.ncols()),
        Op::H => (a.ncols(), a.nrows()),
    };
    let (kb, n) = match op_b {
        Op::N => (b.nrows(), b.ncols()),
        Op::H => (b.ncols(), b.nrows()),
    };
    assert_eq!(k, kb, "inner dimensions differ");
    assert_eq!((c.nrows(), c.ncols()), (m, n), "output shape mismatch");
    if m == 0 || n == 0 {
        return;
    }

    // zgemm has no conjugation flag: conjugate a copy and transpose through strides.
    let conj_a;
    let conj_b;
    let (pa, rsa, csa) = match op_a {
        Op::N => (a.as_ptr(), 1isize, a.nrows() as isize),
        Op::H => {
            conj_a = a.conjugate();
            (conj_a.as_ptr(), a.nrows() as isize, 1isize)
        }
    };
    let (pb, rsb, csb) = match op_b {
        Op::N => (b.as_ptr(), 1isize, b.nrows() as isize),
        Op::H => {
            conj_b = b.conjugate();
            (conj_b.as_ptr(), b.nrows() as isize, 1isize)
        }
    };
    let rsc = 1isize;
    let csc = m as isize;

    // SAFETY: Complex64 is `repr(C)` with layout `[re, im]`; all pointers come
    // from live column-major nalgebra buffers whose extents match the strides.
    unsafe {
        matrixmultiply::zgemm(
            CGemmOption::Standard,
            CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            pa as *const [f64; 2],
            rsa,
            csa,
            pb as *const [f64; 2],
            rsb,
            csb,
            [beta.re, beta.im],
            c.as_mut_ptr() as *mut [f64; 2],
            rsc,
            csc,
        );
    }
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    matmul_op(a, Op::N, b, Op::N)
}

pub fn matmul_op(a: &Matrix, op_a: Op, b: &Matrix, op_b: Op) -> Matrix {
    let m = if op_a == Op::N { a.nrows() } else { a.ncols() };
    let n = if op_b == Op::N { b.ncols() } else { b.nrows() };
    let mut c = Matrix::zeros(m, n);
    gemm(ONE, a, op_a, b, op_b, ZERO, &mut c);
    c
}

/// `u * x * u^dagger`.
pub fn conjugate(u: &Matrix, x: &Matrix) -> Matrix {
    let ux = matmul(u, x);
    matmul_op(&ux, Op::N, u, Op::H)
}

/// `u^dagger * x * u`.
pub fn conjugate_adj(u: &Matrix, x: &Matrix) -> Matrix {
    let ux = matmul_op(u, Op::H, x, Op::N);
    matmul(&ux, u)
}

/// `a * b - b * a`.
pub fn commutator(a: &Matrix, b: &Matrix) -> Matrix {
    let mut c = matmul(a, b);
    gemm(-ONE, b, Op::N, a, Op::N, ONE, &mut c);
    c
}

/// `(m + m^dagger) / 2`.
pub fn hermitize(m: &Matrix) -> Matrix {
    let mut out = m.clone();
    let d = m.nrows();
    for j in 0..d {
        for i in 0..d {
            out[(i, j)] = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
        }
    }
    out
}

/// Largest entry of `|m - m^dagger|`.
pub fn hermiticity_residual(m: &Matrix) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for j in 0..d {
        for i in 0..=j {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &Matrix) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

pub fn frobenius_norm(m: &Matrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `tr(a^dagger b)`.
pub fn hs_inner(a: &Matrix, b: &Matrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `tr(a b)` without forming the product.
pub fn trace_of_product(a: &Matrix, b: &Matrix) -> C64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for j in 0..d {
        for k in 0..a.ncols() {
            acc += a[(j, k)] * b[(k, j)];
        }
    }
    acc
}

pub fn trace(m: &Matrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Kronecker product with `a` as the outer (left) factor.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    a.kronecker(b)
}

/// Pairwise (tree) sum; the summation order depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}
