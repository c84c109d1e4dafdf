use crate::geometry::FrameVector;

/// A 2×2 tensor in the orthonormal frame; `m_ab` is row `a`, column `b`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameTensor2 {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
}

/// Eigen-decomposition of a symmetric tensor, eigenvalues ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigen {
    pub values: [f64; 2],
    pub vectors: [FrameVector; 2],
}

impl FrameTensor2 {
    pub const ZERO: Self = Self::new(0.0, 0.0, 0.0, 0.0);

    pub const fn new(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub const fn diag(a: f64, b: f64) -> Self {
        Self::new(a, 0.0, 0.0, b)
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m11, self.m21, self.m12, self.m22)
    }

    pub fn symmetric(&self) -> Self {
        let o = 0.5 * (self.m12 + self.m21);
        Self::new(self.m11, o, o, self.m22)
    }

    pub fn antisymmetric(&self) -> Self {
        let o = 0.5 * (self.m12 - self.m21);
        Self::new(0.0, o, -o, 0.0)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.m11 + o.m11, self.m12 + o.m12, self.m21 + o.m21, self.m22 + o.m22)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    pub fn matmul(&self, o: &Self) -> Self {
        Self::new(
            self.m11 * o.m11 + self.m12 * o.m21,
            self.m11 * o.m12 + self.m12 * o.m22,
            self.m21 * o.m11 + self.m22 * o.m21,
            self.m21 * o.m12 + self.m22 * o.m22,
        )
    }

    pub fn apply(&self, v: FrameVector) -> FrameVector {
        FrameVector::new(self.m11 * v.c1 + self.m12 * v.c2, self.m21 * v.c1 + self.m22 * v.c2)
    }

    /// `⟨T v, v⟩`.
    pub fn quad(&self, v: FrameVector) -> f64 {
        self.apply(v).dot(v)
    }

    pub fn trace(&self) -> f64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> f64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.m11 * self.m11 + self.m12 * self.m12 + self.m21 * self.m21 + self.m22 * self.m22
    }

    pub fn frobenius(&self) -> f64 {
        self.frobenius_sq().sqrt()
    }

    /// Eigen-decomposition of the symmetric part.
    pub fn sym_eigen(&self) -> SymEigen {
        let s = self.symmetric();
        let mean = 0.5 * (s.m11 + s.m22);
        let half = 0.5 * (s.m11 - s.m22);
        let r = half.hypot(s.m12);
        // Principal axis angle of the larger eigenvalue.
        let theta = 0.5 * s.m12.atan2(half);
        let (sn, cs) = theta.sin_cos();
        SymEigen {
            values: [mean - r, mean + r],
            vectors: [FrameVector::new(-sn, cs), FrameVector::new(cs, sn)],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn eigen_pairs_are_consistent(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64) {
            let t = FrameTensor2::new(a, b, c, d);
            let e = t.sym_eigen();
            let s = t.symmetric();
            for k in 0..2 {
                let v = e.vectors[k];
                let sv = s.apply(v);
                prop_assert!((sv.c1 - e.values[k] * v.c1).abs() < 1e-12 * (1.0 + s.frobenius()));
                prop_assert!((sv.c2 - e.values[k] * v.c2).abs() < 1e-12 * (1.0 + s.frobenius()));
                prop_assert!((v.norm() - 1.0).abs() < 1e-14);
            }
            prop_assert!(e.vectors[0].dot(e.vectors[1]).abs() < 1e-14);
            prop_assert!(e.values[0] <= e.values[1]);
            prop_assert!((e.values[0] + e.values[1] - s.trace()).abs() < 1e-12 * (1.0 + s.frobenius()));
        }

        #[test]
        fn parts_recombine(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64) {
            let t = FrameTensor2::new(a, b, c, d);
            let r = t.symmetric().add(&t.antisymmetric());
            prop_assert!(r.sub(&t).frobenius() < 1e-14);
            prop_assert_eq!(t.transpose().transpose(), t);
        }
    }

    #[test]
    fn matmul_and_quad() {
        let a = FrameTensor2::new(1.0, 2.0, 3.0, 4.0);
        let b = FrameTensor2::new(0.0, 1.0, -1.0, 0.0);
        assert_eq!(a.matmul(&b), FrameTensor2::new(-2.0, 1.0, -4.0, 3.0));
        assert_eq!(a.quad(FrameVector::new(1.0, 1.0)), 10.0);
        assert_eq!(a.det(), -2.0);
    }
}
