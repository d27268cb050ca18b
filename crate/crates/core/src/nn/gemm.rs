//! Row-major GEMM over `matrixmultiply`.

fn strides(rows: usize, cols: usize, trans: bool) -> (isize, isize) {
    // Operand is logically rows x cols; stored either that way or transposed.
    if trans {
        (1, rows as isize)
    } else {
        (cols as isize, 1)
    }
}

macro_rules! gemm_impl {
    ($name:ident, $t:ty, $kernel:path) => {
        #[allow(clippy::too_many_arguments)]
        pub(crate) fn $name(
            m: usize,
            k: usize,
            n: usize,
            a: &[$t],
            trans_a: bool,
            b: &[$t],
            trans_b: bool,
            beta: $t,
            c: &mut [$t],
        ) {
            assert!(a.len() >= m * k && b.len() >= k * n && c.len() >= m * n, "gemm operand too small");
            if m == 0 || n == 0 {
                return;
            }
            if k == 0 {
                for v in c[..m * n].iter_mut() {
                    *v *= beta;
                }
                return;
            }
            let (rsa, csa) = strides(m, k, trans_a);
            let (rsb, csb) = strides(k, n, trans_b);
            // SAFETY: the asserts above guarantee every index reachable from the
            // strides lies inside the slices; `c` is exclusively borrowed.
            unsafe {
                $kernel(
                    m,
                    k,
                    n,
                    1.0,
                    a.as_ptr(),
                    rsa,
                    csa,
                    b.as_ptr(),
                    rsb,
                    csb,
                    beta,
                    c.as_mut_ptr(),
                    n as isize,
                    1,
                );
            }
        }
    };
}

gemm_impl!(sgemm, f32, matrixmultiply::sgemm);
gemm_impl!(dgemm, f64, matrixmultiply::dgemm);
