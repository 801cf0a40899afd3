/// Borrowed view of a mini-batch: `len()` rows of `width` features each,
/// plus one integer label per row. Features are row-major and contiguous.
#[derive(Clone, Copy, Debug)]
pub struct Batch<'a> {
    features: &'a [f64],
    labels: &'a [usize],
    width: usize,
}

impl<'a> Batch<'a> {
    /// Panics if `features.len() != labels.len() * width`.
    pub fn new(features: &'a [f64], labels: &'a [usize], width: usize) -> Self {
        assert_eq!(
            features.len(),
            labels.len() * width,
            "batch features must be labels.len() x width"
        );
        Batch {
            features,
            labels,
            width,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn feature_row(&self, i: usize) -> &'a [f64] {
        &self.features[i * self.width..(i + 1) * self.width]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    /// Single-row sub-batch, used to attribute non-finite losses.
    pub fn row_view(&self, i: usize) -> Batch<'a> {
        Batch {
            features: self.feature_row(i),
            labels: &self.labels[i..i + 1],
            width: self.width,
        }
    }
}

/// Owning batch storage; gathered dataset rows or merged batches.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OwnedBatch {
    pub features: Vec<f64>,
    pub labels: Vec<usize>,
    pub width: usize,
}

impl OwnedBatch {
    pub fn as_batch(&self) -> Batch<'_> {
        Batch::new(&self.features, &self.labels, self.width)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Concatenates several batch views into one owned batch.
    /// Panics if widths disagree.
    pub fn concat(parts: &[Batch<'_>]) -> OwnedBatch {
        let width = parts.first().map_or(0, |b| b.width());
        let mut out = OwnedBatch {
            features: Vec::new(),
            labels: Vec::new(),
            width,
        };
        for part in parts {
            assert_eq!(part.width(), width, "mismatched batch widths");
            for i in 0..part.len() {
                out.features.extend_from_slice(part.feature_row(i));
                out.labels.push(part.label(i));
            }
        }
        out
    }
}
