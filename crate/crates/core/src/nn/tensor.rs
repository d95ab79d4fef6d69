use num_traits::Float;

/// Element type usable by the tensor engine: f32 for training, f64 for
/// gradient verification.
pub trait Scalar: Float + Send + Sync + std::fmt::Debug + std::fmt::Display + 'static {
    /// General strided matrix multiply:
    /// `C = alpha * A[m x k] * B[k x n] + beta * C[m x n]`.
    ///
    /// `rs*`/`cs*` are row/column strides in elements. Slices must cover the
    /// full extent addressed by the strides.
    #[allow(clippy::too_many_arguments)]
    fn gemm(
        m: usize,
        k: usize,
        n: usize,
        alpha: Self,
        a: &[Self],
        rsa: isize,
        csa: isize,
        b: &[Self],
        rsb: isize,
        csb: isize,
        beta: Self,
        c: &mut [Self],
        rsc: isize,
        csc: isize,
    );

    fn from_f64(v: f64) -> Self;
    fn to_f64(self) -> f64;
}

macro_rules! impl_scalar {
    ($t:ty, $gemm:path) => {
        impl Scalar for $t {
            #[allow(clippy::too_many_arguments)]
            fn gemm(
                m: usize,
                k: usize,
                n: usize,
                alpha: $t,
                a: &[$t],
                rsa: isize,
                csa: isize,
                b: &[$t],
                rsb: isize,
                csb: isize,
                beta: $t,
                c: &mut [$t],
                rsc: isize,
                csc: isize,
            ) {
                unsafe {
                    $gemm(
                        m,
                        k,
                        n,
                        alpha,
                        a.as_ptr(),
                        rsa,
                        csa,
                        b.as_ptr(),
                        rsb,
                        csb,
                        beta,
                        c.as_mut_ptr(),
                        rsc,
                        csc,
                    );
                }
            }

            fn from_f64(v: f64) -> $t {
                v as $t
            }

            fn to_f64(self) -> f64 {
                self as f64
            }
        }
    };
}

impl_scalar!(f32, matrixmultiply::sgemm);
impl_scalar!(f64, matrixmultiply::dgemm);

/// Dense 4-D tensor in (batch, channels, height, width) layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4<T: Scalar> {
    data: Vec<T>,
    n: usize,
    c: usize,
    h: usize,
    w: usize,
}

impl<T: Scalar> Tensor4<T> {
    pub fn zeros(n: usize, c: usize, h: usize, w: usize) -> Self {
        Tensor4 {
            data: vec![T::zero(); n * c * h * w],
            n,
            c,
            h,
            w,
        }
    }

    pub fn from_vec(data: Vec<T>, n: usize, c: usize, h: usize, w: usize) -> Self {
        assert_eq!(data.len(), n * c * h * w, "storage/shape mismatch");
        Tensor4 { data, n, c, h, w }
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.n, self.c, self.h, self.w)
    }

    pub fn batch(&self) -> usize {
        self.n
    }

    pub fn channels(&self) -> usize {
        self.c
    }

    pub fn height(&self) -> usize {
        self.h
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn at(&self, n: usize, c: usize, h: usize, w: usize) -> T {
        self.data[((n * self.c + c) * self.h + h) * self.w + w]
    }

    #[inline]
    pub fn at_mut(&mut self, n: usize, c: usize, h: usize, w: usize) -> &mut T {
        &mut self.data[((n * self.c + c) * self.h + h) * self.w + w]
    }

    /// Contiguous slice of one batch item (all channels).
    pub fn item(&self, n: usize) -> &[T] {
        let stride = self.c * self.h * self.w;
        &self.data[n * stride..(n + 1) * stride]
    }

    pub fn item_mut(&mut self, n: usize) -> &mut [T] {
        let stride = self.c * self.h * self.w;
        &mut self.data[n * stride..(n + 1) * stride]
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Tensor4<U> {
        Tensor4 {
            data: self.data.iter().map(|&v| f(v)).collect(),
            n: self.n,
            c: self.c,
            h: self.h,
            w: self.w,
        }
    }
}
