use super::error::DiffError;

/// Shape of one parameter array in a layered model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArrayShape {
    /// `rows x cols` weight matrix, flattened row-major.
    Matrix { rows: usize, cols: usize },
    /// Bias vector.
    Vector { len: usize },
}

impl ArrayShape {
    pub fn element_count(&self) -> usize {
        match *self {
            ArrayShape::Matrix { rows, cols } => rows * cols,
            ArrayShape::Vector { len } => len,
        }
    }
}

/// Structured (per-array) view of a model's parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub arrays: Vec<Vec<f64>>,
}

/// Fixed flattening order for layered parameters: arrays in declaration
/// order (layer by layer, weights before biases), row-major within each
/// matrix. The order never changes, so probe vectors and explicit-Hessian
/// entries are comparable across runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamLayout {
    shapes: Vec<ArrayShape>,
    total: usize,
}

impl ParamLayout {
    pub fn new(shapes: Vec<ArrayShape>) -> Self {
        let total = shapes.iter().map(ArrayShape::element_count).sum();
        ParamLayout { shapes, total }
    }

    pub fn shapes(&self) -> &[ArrayShape] {
        &self.shapes
    }

    pub fn param_count(&self) -> usize {
        self.total
    }

    /// Concatenates the structured arrays into one flat vector.
    pub fn flatten(&self, params: &ModelParams) -> Result<Vec<f64>, DiffError> {
        if params.arrays.len() != self.shapes.len() {
            return Err(DiffError::ShapeMismatch {
                expected: self.shapes.len(),
                got: params.arrays.len(),
            });
        }
        let mut flat = Vec::with_capacity(self.total);
        for (arr, shape) in params.arrays.iter().zip(&self.shapes) {
            if arr.len() != shape.element_count() {
                return Err(DiffError::ShapeMismatch {
                    expected: shape.element_count(),
                    got: arr.len(),
                });
            }
            flat.extend_from_slice(arr);
        }
        Ok(flat)
    }

    /// Splits a flat vector back into structured arrays; exact inverse of
    /// [`ParamLayout::flatten`], bit for bit.
    pub fn unflatten(&self, flat: &[f64]) -> Result<ModelParams, DiffError> {
        if flat.len() != self.total {
            return Err(DiffError::ShapeMismatch {
                expected: self.total,
                got: flat.len(),
            });
        }
        let mut arrays = Vec::with_capacity(self.shapes.len());
        let mut offset = 0;
        for shape in &self.shapes {
            let n = shape.element_count();
            arrays.push(flat[offset..offset + n].to_vec());
            offset += n;
        }
        Ok(ModelParams { arrays })
    }
}
