//! Scalar abstraction over f32/f64 and a bounds-checked strided GEMM.

use std::fmt::Debug;
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

pub trait Float:
    num_traits::Float + Default + Debug + Send + Sync + Sum + AddAssign + SubAssign + MulAssign + DivAssign + 'static
{
    const BYTES: usize;
    const TAG: u8;

    fn of(x: f64) -> Self;
    fn f64(self) -> f64;
    fn write_le(self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;

    /// # Safety
    /// Every index reachable through the given shapes and strides must be in
    /// bounds of the corresponding buffer, and `c` must not alias `a` or `b`.
    #[allow(clippy::too_many_arguments)]
    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    );
}

impl Float for f32 {
    const BYTES: usize = 4;
    const TAG: u8 = 4;

    fn of(x: f64) -> Self {
        x as f32
    }

    fn f64(self) -> f64 {
        self as f64
    }

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("4 bytes"))
    }

    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::sgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc)
    }
}

impl Float for f64 {
    const BYTES: usize = 8;
    const TAG: u8 = 8;

    fn of(x: f64) -> Self {
        x
    }

    fn f64(self) -> f64 {
        self
    }

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("8 bytes"))
    }

    unsafe fn gemm_raw(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: *const Self,
        rsa: isize,
        csa: isize,
        b: *const Self,
        rsb: isize,
        csb: isize,
        beta: Self,
        c: *mut Self,
        rsc: isize,
        csc: isize,
    ) {
        matrixmultiply::dgemm(m, k, n, alpha, a, rsa, csa, b, rsb, csb, beta, c, rsc, csc)
    }
}

/// A matrix laid over a flat buffer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct View {
    pub off: usize,
    pub rows: usize,
    pub cols: usize,
    pub rs: usize,
    pub cs: usize,
}

impl View {
    /// Contiguous row-major matrix.
    pub fn mat(off: usize, rows: usize, cols: usize) -> Self {
        Self {
            off,
            rows,
            cols,
            rs: cols,
            cs: 1,
        }
    }

    /// Row-major block with row stride `rs`, e.g. one head's columns.
    pub fn block(off: usize, rows: usize, cols: usize, rs: usize) -> Self {
        Self { off, rows, cols, rs, cs: 1 }
    }

    pub fn t(self) -> Self {
        Self {
            off: self.off,
            rows: self.cols,
            cols: self.rows,
            rs: self.cs,
            cs: self.rs,
        }
    }

    fn fits(&self, len: usize) -> bool {
        self.rows == 0 || self.cols == 0 || self.off + (self.rows - 1) * self.rs + (self.cols - 1) * self.cs < len
    }
}

/// c ← alpha·a·b + beta·c
pub fn gemm<T: Float>(alpha: T, a: &[T], av: View, b: &[T], bv: View, beta: T, c: &mut [T], cv: View) {
    assert_eq!(av.cols, bv.rows, "inner dimensions");
    assert_eq!((av.rows, bv.cols), (cv.rows, cv.cols), "output shape");
    assert!(av.fits(a.len()) && bv.fits(b.len()) && cv.fits(c.len()), "view out of bounds");
    let (m, k, n) = (av.rows, av.cols, bv.cols);
    if m == 0 || n == 0 {
        return;
    }
    // SAFETY: shapes and strides were checked against the buffer lengths
    // above, and `c` is a unique borrow distinct from `a` and `b`.
    unsafe {
        T::gemm_raw(
            m,
            k,
            n,
            alpha,
            a.as_ptr().add(av.off),
            av.rs as isize,
            av.cs as isize,
            b.as_ptr().add(bv.off),
            bv.rs as isize,
            bv.cs as isize,
            beta,
            c.as_mut_ptr().add(cv.off),
            cv.rs as isize,
            cv.cs as isize,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gemm_with_transposes() {
        // a = [[1,2,3],[4,5,6]], b = [[1,0],[0,1],[1,1]]
        let a = [1.0f64, 2., 3., 4., 5., 6.];
        let b = [1.0f64, 0., 0., 1., 1., 1.];
        let mut c = [0.0f64; 4];
        gemm(1.0, &a, View::mat(0, 2, 3), &b, View::mat(0, 3, 2), 0.0, &mut c, View::mat(0, 2, 2));
        assert_eq!(c, [4., 5., 10., 11.]);
        // aᵀ·a is 3×3
        let mut d = [0.0f64; 9];
        gemm(1.0, &a, View::mat(0, 2, 3).t(), &a, View::mat(0, 2, 3), 0.0, &mut d, View::mat(0, 3, 3));
        assert_eq!(d, [17., 22., 27., 22., 29., 36., 27., 36., 45.]);
        // one column block of a, accumulated
        let mut e = [1.0f32; 2];
        let af: Vec<f32> = a.iter().map(|&x| x as f32).collect();
        let ones = [1.0f32];
        gemm(1.0, &af, View::block(1, 2, 1, 3), &ones, View::mat(0, 1, 1), 1.0, &mut e, View::mat(0, 2, 1));
        assert_eq!(e, [3., 6.]);
    }

    #[test]
    #[should_panic(expected = "out of bounds")]
    fn rejects_bad_view() {
        let a = [0.0f64; 4];
        let mut c = [0.0f64; 4];
        gemm(1.0, &a, View::mat(1, 2, 2), &a, View::mat(0, 2, 2), 0.0, &mut c, View::mat(0, 2, 2));
    }
}
