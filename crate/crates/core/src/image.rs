//! Grey-level images, 1D signals and their classification.
//!
//! Pixel `(i, j)` has horizontal index `i ∈ 1..=N_x` and vertical index
//! `j ∈ 1..=N_y` (1-based in the maths, 0-based in the API) and sits at
//! `x_i = (2i − N_x − 1)/(N_x − 1)`, `y_j = (2j − N_y − 1)/(N_y − 1)`. Storage is
//! row-major with `j` as the raster row.

use crate::error::{Error, Result};

/// Intensities, kept as integers when the source had them.
#[derive(Debug, Clone, PartialEq)]
pub enum PixelData {
    Integer(Vec<u32>),
    Real(Vec<f64>),
}

impl PixelData {
    pub fn len(&self) -> usize {
        match self {
            PixelData::Integer(v) => v.len(),
            PixelData::Real(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, idx: usize) -> f64 {
        match self {
            PixelData::Integer(v) => v[idx] as f64,
            PixelData::Real(v) => v[idx],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    max_value: f64,
    pixels: PixelData,
}

impl Image {
    pub fn new(width: usize, height: usize, max_value: f64, pixels: PixelData) -> Result<Self> {
        if width < 2 || height < 2 {
            return Err(Error::InvalidImage(format!(
                "dimensions {width}x{height}: both sides must be at least 2"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} samples for a {width}x{height} image",
                pixels.len()
            )));
        }
        if !(max_value.is_finite() && max_value >= 0.0) {
            return Err(Error::InvalidImage(format!("bad maximum value {max_value}")));
        }
        for idx in 0..pixels.len() {
            let v = pixels.get(idx);
            if !(v.is_finite() && (0.0..=max_value).contains(&v)) {
                return Err(Error::InvalidImage(format!(
                    "sample {v} at index {idx} outside [0, {max_value}]"
                )));
            }
        }
        Ok(Image {
            width,
            height,
            max_value,
            pixels,
        })
    }

    /// Real-valued image whose maximum is the largest sample.
    pub fn from_real(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        let max = pixels.iter().cloned().fold(0.0f64, f64::max);
        Self::new(width, height, max, PixelData::Real(pixels))
    }

    pub fn from_integer(width: usize, height: usize, max_value: u32, pixels: Vec<u32>) -> Result<Self> {
        Self::new(width, height, max_value as f64, PixelData::Integer(pixels))
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    pub fn pixels(&self) -> &PixelData {
        &self.pixels
    }

    pub fn is_integral(&self) -> bool {
        matches!(self.pixels, PixelData::Integer(_))
    }

    /// Intensity at horizontal index `i`, vertical index `j` (0-based).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.pixels.get(j * self.width + i)
    }

    /// Samples with fixed horizontal index `i`, ordered by `j`.
    pub fn line_at_x(&self, i: usize) -> Vec<f64> {
        (0..self.height).map(|j| self.get(i, j)).collect()
    }

    /// Integer samples with fixed horizontal index, if the image is integral.
    pub fn integer_line_at_x(&self, i: usize) -> Option<Vec<i64>> {
        match &self.pixels {
            PixelData::Integer(v) => Some((0..self.height).map(|j| v[j * self.width + i] as i64).collect()),
            PixelData::Real(_) => None,
        }
    }

    pub fn to_real_vec(&self) -> Vec<f64> {
        (0..self.pixels.len()).map(|k| self.pixels.get(k)).collect()
    }

    pub fn transposed(&self) -> Image {
        let (w, h) = (self.width, self.height);
        let pixels = match &self.pixels {
            PixelData::Integer(v) => {
                PixelData::Integer((0..w * h).map(|k| v[(k % h) * w + k / h]).collect())
            }
            PixelData::Real(v) => PixelData::Real((0..w * h).map(|k| v[(k % h) * w + k / h]).collect()),
        };
        Image {
            width: h,
            height: w,
            max_value: self.max_value,
            pixels,
        }
    }

    /// Mirror image along x (`i → N_x − 1 − i`).
    pub fn flipped_x(&self) -> Image {
        let (w, h) = (self.width, self.height);
        let map = |k: usize| (k / w) * w + (w - 1 - k % w);
        let pixels = match &self.pixels {
            PixelData::Integer(v) => PixelData::Integer((0..w * h).map(|k| v[map(k)]).collect()),
            PixelData::Real(v) => PixelData::Real((0..w * h).map(|k| v[map(k)]).collect()),
        };
        Image {
            pixels,
            ..self.clone()
        }
    }
}

/// Sampling abscissa of 1-based index `i` on an `n`-point grid.
#[inline]
pub fn grid_point(i: usize, n: usize) -> f64 {
    (2.0 * i as f64 - n as f64 - 1.0) / (n as f64 - 1.0)
}

/// All abscissas of an `n`-point grid.
pub fn grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| grid_point(i, n)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    values: Vec<f64>,
}

impl Signal1D {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "signal of length {} (need at least 2)",
                values.len()
            )));
        }
        Ok(Signal1D { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Inclusive 1-based index run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub start: usize,
    pub end: usize,
}

impl Run {
    pub fn new(start: usize, end: usize) -> Self {
        Run { start, end }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SignalClass {
    Constant(f64),
    /// Values in `{0, level}`; runs list the positions holding `level`.
    BinaryRuns { level: f64, runs: Vec<Run> },
    General,
}

/// Constant if all values are equal, binary if they take exactly the values 0
/// and one positive level, general otherwise.
pub fn classify_signal(values: &[f64]) -> SignalClass {
    let Some(&first) = values.first() else {
        return SignalClass::General;
    };
    if values.iter().all(|&v| v == first) {
        return SignalClass::Constant(first);
    }
    let mut level = None;
    for &v in values {
        if v == 0.0 {
            continue;
        }
        if v < 0.0 || !v.is_finite() {
            return SignalClass::General;
        }
        match level {
            None => level = Some(v),
            Some(l) if l == v => {}
            Some(_) => return SignalClass::General,
        }
    }
    let Some(level) = level else {
        return SignalClass::General;
    };
    let mut runs = Vec::new();
    let mut start = None;
    for (idx, &v) in values.iter().enumerate() {
        match (v == level, start) {
            (true, None) => start = Some(idx + 1),
            (false, Some(s)) => {
                runs.push(Run::new(s, idx));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push(Run::new(s, values.len()));
    }
    SignalClass::BinaryRuns { level, runs }
}

/// Checks runs are sorted, disjoint and inside `1..=n`.
pub fn validate_runs(runs: &[Run], n: usize) -> Result<()> {
    let mut prev_end = 0;
    for r in runs {
        if r.start < 1 || r.end > n || r.start > r.end {
            return Err(Error::InvalidArgument(format!(
                "run [{}, {}] outside [1, {n}]",
                r.start, r.end
            )));
        }
        if r.start <= prev_end {
            return Err(Error::InvalidArgument(format!(
                "run [{}, {}] overlaps or precedes the previous run",
                r.start, r.end
            )));
        }
        prev_end = r.end;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn classification_examples() {
        assert_eq!(classify_signal(&[1.0, 1.0, 1.0, 1.0]), SignalClass::Constant(1.0));
        assert_eq!(
            classify_signal(&[0.0, 1.0, 1.0, 0.0, 1.0]),
            SignalClass::BinaryRuns {
                level: 1.0,
                runs: vec![Run::new(2, 3), Run::new(5, 5)]
            }
        );
        assert_eq!(classify_signal(&[1.0, 2.0, 3.0]), SignalClass::General);
        assert_eq!(classify_signal(&[0.0, 0.0]), SignalClass::Constant(0.0));
        assert_eq!(
            classify_signal(&[255.0, 0.0]),
            SignalClass::BinaryRuns {
                level: 255.0,
                runs: vec![Run::new(1, 1)]
            }
        );
    }

    #[test]
    fn image_rejects_small_or_inconsistent_input() {
        assert!(Image::from_real(1, 1, vec![7.0]).is_err());
        assert!(Image::from_real(2, 2, vec![1.0; 3]).is_err());
        assert!(Image::from_integer(2, 2, 10, vec![0, 11, 0, 0]).is_err());
        assert!(Image::from_real(2, 2, vec![-1.0, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn lines_and_transforms() {
        // raster rows: [1 2 3] / [4 5 6]
        let img = Image::from_integer(3, 2, 9, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(img.line_at_x(1), vec![2.0, 5.0]);
        let t = img.transposed();
        assert_eq!((t.width(), t.height()), (2, 3));
        for i in 0..3 {
            for j in 0..2 {
                assert_eq!(t.get(j, i), img.get(i, j));
            }
        }
        let f = img.flipped_x();
        assert_eq!(f.line_at_x(0), vec![3.0, 6.0]);
    }

    #[test]
    fn grid_endpoints() {
        assert_eq!(grid(3), vec![-1.0, 0.0, 1.0]);
        assert_eq!(grid_point(1, 4), -1.0);
        assert_eq!(grid_point(4, 4), 1.0);
    }

    #[test]
    fn run_validation() {
        assert!(validate_runs(&[Run::new(1, 2), Run::new(4, 5)], 5).is_ok());
        assert!(validate_runs(&[Run::new(1, 3), Run::new(3, 5)], 5).is_err());
        assert!(validate_runs(&[Run::new(4, 6)], 5).is_err());
        assert!(validate_runs(&[Run::new(0, 1)], 5).is_err());
    }

    proptest! {
        #[test]
        fn appending_distinct_value_breaks_constant(level in 0.0f64..300.0, n in 2usize..20, delta in 0.5f64..10.0) {
            let mut v = vec![level; n];
            v.push(level + delta);
            prop_assert!(!matches!(classify_signal(&v), SignalClass::Constant(_)));
        }

        #[test]
        fn binary_runs_reconstruct_signal(bits in prop::collection::vec(any::<bool>(), 2..40)) {
            let v: Vec<f64> = bits.iter().map(|&b| if b { 7.0 } else { 0.0 }).collect();
            match classify_signal(&v) {
                SignalClass::BinaryRuns { level, runs } => {
                    validate_runs(&runs, v.len()).unwrap();
                    let mut back = vec![0.0; v.len()];
                    for r in runs {
                        for k in r.start..=r.end {
                            back[k - 1] = level;
                        }
                    }
                    prop_assert_eq!(back, v);
                }
                SignalClass::Constant(_) => prop_assert!(bits.iter().all(|&b| b == bits[0])),
                SignalClass::General => prop_assert!(false, "binary signal classified as general"),
            }
        }
    }
}
