use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating point scalar the numerical core is generic over: `f32` or `f64`.
pub trait Scalar: RealField + Copy + FromPrimitive + ToPrimitive {
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 constant representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar converts to f64")
    }

    /// `tol` clamped from below to a few hundred ulps of this type, so an f64
    /// tolerance stays meaningful when the core runs in f32.
    fn tol(tol: f64) -> Self {
        Self::of(tol).max(Self::default_epsilon() * Self::of(512.0))
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_floor_depends_on_precision() {
        assert_eq!(<f64 as Scalar>::tol(1e-10), 1e-10);
        assert!(<f32 as Scalar>::tol(1e-10) > 1e-5);
    }
}
