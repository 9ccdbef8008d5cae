use alloc::vec;
use alloc::vec::Vec;

use super::scalar::Scalar;
use crate::error::{invalid_arg, shape_mismatch, Result};

/// Dense row-major multi-dimensional array.
///
/// The last dimension varies fastest: for a `[H, W, C]` tensor the element
/// `(x, y, c)` lives at offset `(x * W + y) * C + c`, where `x` indexes rows
/// and `y` indexes columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T: Scalar> {
    dims: Vec<usize>,
    elems: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    /// Builds a tensor from explicit contents. The element count must equal
    /// the product of the extents and every extent must be positive.
    pub fn new(dims: &[usize], elems: Vec<T>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(invalid_arg!("zero extent in dims {dims:?}"));
        }
        let expect: usize = dims.iter().product();
        if elems.len() != expect {
            return Err(shape_mismatch!(
                "dims {dims:?} imply {expect} elements, got {}",
                elems.len()
            ));
        }
        Ok(Tensor { dims: dims.to_vec(), elems })
    }

    pub fn zeros(dims: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        debug_assert!(dims.iter().all(|&d| d > 0));
        Tensor { dims: dims.to_vec(), elems: vec![T::ZERO; n] }
    }

    pub fn full(dims: &[usize], value: T) -> Self {
        let n: usize = dims.iter().product();
        Tensor { dims: dims.to_vec(), elems: vec![value; n] }
    }

    #[inline]
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.elems
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.elems
    }

    pub fn into_vec(self) -> Vec<T> {
        self.elems
    }

    /// Extent of dimension `axis`.
    #[inline]
    pub fn dim(&self, axis: usize) -> usize {
        self.dims[axis]
    }

    /// Linear offset of `(x, y, c)` in a rank-3 tensor.
    #[inline]
    pub fn offset3(&self, x: usize, y: usize, c: usize) -> usize {
        debug_assert_eq!(self.dims.len(), 3);
        (x * self.dims[1] + y) * self.dims[2] + c
    }

    #[inline]
    pub fn at3(&self, x: usize, y: usize, c: usize) -> T {
        self.elems[self.offset3(x, y, c)]
    }

    #[inline]
    pub fn at3_mut(&mut self, x: usize, y: usize, c: usize) -> &mut T {
        let i = self.offset3(x, y, c);
        &mut self.elems[i]
    }

    /// Row `r` of a rank-2 tensor.
    #[inline]
    pub fn row(&self, r: usize) -> &[T] {
        debug_assert_eq!(self.dims.len(), 2);
        let w = self.dims[1];
        &self.elems[r * w..(r + 1) * w]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [T] {
        debug_assert_eq!(self.dims.len(), 2);
        let w = self.dims[1];
        &mut self.elems[r * w..(r + 1) * w]
    }

    /// Reinterprets the contents under new extents of the same total size.
    pub fn reshape(mut self, dims: &[usize]) -> Result<Self> {
        let expect: usize = dims.iter().product();
        if expect != self.elems.len() {
            return Err(shape_mismatch!(
                "cannot reshape {} elements to {dims:?}",
                self.elems.len()
            ));
        }
        self.dims = dims.to_vec();
        Ok(self)
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Tensor {
            dims: self.dims.clone(),
            elems: self.elems.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        self.map(|v| v * s)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(shape_mismatch!("add {:?} vs {:?}", self.dims, other.dims));
        }
        Ok(Tensor {
            dims: self.dims.clone(),
            elems: self
                .elems
                .iter()
                .zip(&other.elems)
                .map(|(&a, &b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.dims != other.dims {
            return Err(shape_mismatch!("sub {:?} vs {:?}", self.dims, other.dims));
        }
        Ok(Tensor {
            dims: self.dims.clone(),
            elems: self
                .elems
                .iter()
                .zip(&other.elems)
                .map(|(&a, &b)| a - b)
                .collect(),
        })
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        if self.dims != other.dims {
            return Err(shape_mismatch!(
                "add_assign {:?} vs {:?}",
                self.dims,
                other.dims
            ));
        }
        for (a, &b) in self.elems.iter_mut().zip(&other.elems) {
            *a += b;
        }
        Ok(())
    }

    pub fn all_finite(&self) -> bool {
        self.elems.iter().all(|v| v.is_finite())
    }

    /// Lossy conversion to another scalar type (through f64).
    pub fn cast<U: Scalar>(&self) -> Tensor<U> {
        Tensor {
            dims: self.dims.clone(),
            elems: self.elems.iter().map(|v| U::from_f64(v.to_f64())).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn new_checks_element_count() {
        assert!(Tensor::<f32>::new(&[2, 3], vec![0.0; 6]).is_ok());
        assert!(Tensor::<f32>::new(&[2, 3], vec![0.0; 5]).is_err());
        assert!(Tensor::<f32>::new(&[2, 0], vec![]).is_err());
    }

    #[test]
    fn offset3_is_row_major() {
        let t = Tensor::<f32>::new(&[2, 3, 4], (0..24).map(|i| i as f32).collect()).unwrap();
        assert_eq!(t.at3(0, 0, 0), 0.0);
        assert_eq!(t.at3(0, 0, 3), 3.0);
        assert_eq!(t.at3(0, 1, 0), 4.0);
        assert_eq!(t.at3(1, 0, 0), 12.0);
        assert_eq!(t.at3(1, 2, 3), 23.0);
    }

    #[test]
    fn reshape_preserves_count() {
        let t = Tensor::<f64>::zeros(&[4, 3]);
        assert!(t.clone().reshape(&[2, 6]).is_ok());
        assert!(t.reshape(&[5, 3]).is_err());
    }
}
