//! Dense row-major n-dimensional arrays.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TensorError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

/// Affinities, probabilities.
pub type DenseTensor = Tensor<f32>;
/// Class and instance maps.
pub type LabelTensor = Tensor<i32>;

impl<T> Tensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self, TensorError> {
        if shape.contains(&0) && !data.is_empty() {
            return Err(TensorError::ShapeMismatch(format!("shape {shape:?} has a zero extent")));
        }
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(TensorError::ShapeMismatch(format!(
                "shape {shape:?} needs {expected} values, got {}",
                data.len()
            )));
        }
        Ok(Tensor { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Shape without the leading channel axis.
    pub fn spatial_shape(&self) -> &[usize] {
        self.shape.get(1..).unwrap_or(&[])
    }

    /// The `c`-th slab along the leading axis.
    pub fn channel(&self, c: usize) -> &[T] {
        let stride: usize = self.spatial_shape().iter().product();
        &self.data[c * stride..(c + 1) * stride]
    }
}

impl<T: Clone> Tensor<T> {
    pub fn filled(shape: Vec<usize>, value: T) -> Self {
        let n = shape.iter().product();
        Tensor { shape, data: vec![value; n] }
    }
}

/// Row-major index arithmetic for a spatial grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridShape {
    dims: Vec<usize>,
    strides: Vec<usize>,
}

impl GridShape {
    pub fn new(dims: &[usize]) -> Self {
        let mut strides = vec![1; dims.len()];
        for d in (0..dims.len().saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * dims[d + 1];
        }
        GridShape { dims: dims.to_vec(), strides }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coords(&self, mut index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .map(|&s| {
                let c = index / s;
                index %= s;
                c
            })
            .collect()
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        coords.iter().zip(&self.strides).map(|(c, s)| c * s).sum()
    }

    /// Index of `index + offset`, or `None` when it leaves the grid.
    pub fn shifted(&self, index: usize, offset: &[isize]) -> Option<usize> {
        let mut rest = index;
        let mut out = 0usize;
        for ((&s, &dim), &o) in self.strides.iter().zip(&self.dims).zip(offset) {
            let c = (rest / s) as isize + o;
            rest %= s;
            if c < 0 || c >= dim as isize {
                return None;
            }
            out += c as usize * s;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_wrong_length() {
        assert!(Tensor::new(vec![2, 3], vec![0.0f32; 5]).is_err());
        assert!(Tensor::new(vec![2, 3], vec![0.0f32; 6]).is_ok());
    }

    #[test]
    fn coordinates_round_trip() {
        let g = GridShape::new(&[3, 4, 5]);
        for i in 0..g.len() {
            assert_eq!(g.index(&g.coords(i)), i);
        }
        assert_eq!(g.coords(23), vec![1, 0, 3]);
    }

    #[test]
    fn shifted_respects_bounds() {
        let g = GridShape::new(&[2, 3]);
        assert_eq!(g.shifted(0, &[0, 1]), Some(1));
        assert_eq!(g.shifted(2, &[0, 1]), None);
        assert_eq!(g.shifted(2, &[1, -1]), Some(4));
        assert_eq!(g.shifted(0, &[-1, 0]), None);
    }

    #[test]
    fn channel_slices() {
        let t = Tensor::new(vec![2, 2], vec![1, 2, 3, 4]).unwrap();
        assert_eq!(t.channel(1), &[3, 4]);
        assert_eq!(t.spatial_shape(), &[2]);
    }
}
