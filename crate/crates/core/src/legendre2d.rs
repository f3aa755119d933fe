//! Two-dimensional Legendre moments, their reconstruction and verification.
//!
//! The fast method is separable. Stage 1 takes each line of fixed `x_i` through
//! the 1D method in `y`, giving `λ_q(i)`; stage 2 takes each column `λ_q(·)`
//! through the 1D method in `x` up to order `M − q`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{grid, Image};
use crate::legendre1d::{
    moments_1d_fast_in, moments_1d_general_in, poly_eval_counted, poly_eval_recurrence, FastOptions, MAX_ORDER,
    PRECISION_WARNING_ORDER,
};
use crate::metering::{OpCounter, Stage};
use crate::power_sums::Accumulator;
use crate::scalar::{DoubleDouble, Precision, Real};
use crate::table::MomentTable;

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!("order {order} exceeds the supported maximum {MAX_ORDER}")));
    }
    Ok(())
}

fn pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {workers} workers: {e}")))
}

/// Runs `f` over `0..n` on the pool, merging per-item counters in index order.
fn par_counted<R: Send>(
    pool: &rayon::ThreadPool,
    n: usize,
    counter: &mut OpCounter,
    f: impl Fn(usize, &mut OpCounter) -> R + Sync,
) -> Vec<R> {
    let proto = counter.fork();
    let out: Vec<(R, OpCounter)> = pool.install(|| {
        (0..n)
            .into_par_iter()
            .map(|k| {
                let mut c = proto.fork();
                let r = f(k, &mut c);
                (r, c)
            })
            .collect()
    });
    out.into_iter()
        .map(|(r, c)| {
            counter.merge(&c);
            r
        })
        .collect()
}

/// `λ_q(i)` for every line `i` (outer) and `q = 0..=M` (inner).
#[derive(Debug, Clone, PartialEq)]
pub struct RowMomentMatrix {
    pub order: usize,
    pub rows: Vec<Vec<f64>>,
}

fn row_moments_in<T: Real + Accumulator>(
    img: &Image,
    order: usize,
    opts: &FastOptions,
    pool: &rayon::ThreadPool,
    counter: &mut OpCounter,
) -> Vec<Vec<T>> {
    par_counted(pool, img.width(), counter, |i, c| {
        let line = img.line_at_x(i);
        let ints = if opts.exact_integer_input { img.integer_line_at_x(i) } else { None };
        moments_1d_fast_in::<T>(&line, ints.as_deref(), order, opts, c)
    })
}

/// Stage 1 alone.
pub fn row_moments(img: &Image, order: usize, opts: &FastOptions, counter: &mut OpCounter) -> Result<RowMomentMatrix> {
    check_order(order)?;
    let pool = pool(opts.workers)?;
    let rows = match opts.precision {
        Precision::Double => row_moments_in::<f64>(img, order, opts, &pool, counter),
        Precision::Extended => row_moments_in::<DoubleDouble>(img, order, opts, &pool, counter)
            .into_iter()
            .map(|r| r.into_iter().map(Real::to_f64).collect())
            .collect(),
    };
    Ok(RowMomentMatrix { order, rows })
}

fn moments_2d_fast_in<T: Real + Accumulator>(
    img: &Image,
    order: usize,
    opts: &FastOptions,
    pool: &rayon::ThreadPool,
    counter: &mut OpCounter,
) -> MomentTable {
    let rows = row_moments_in::<T>(img, order, opts, pool, counter);
    let cols = par_counted(pool, order + 1, counter, |q, c| {
        let column: Vec<T> = rows.iter().map(|r| r[q]).collect();
        moments_1d_general_in::<T>(&column, order - q, opts.layout, c)
    });
    MomentTable::from_fn(order, img.width(), img.height(), |p, q| cols[q][p].to_f64())
}

/// All `L_pq` with `p + q ≤ M` by the recurrence method.
pub fn moments_2d_fast(img: &Image, order: usize, opts: &FastOptions, counter: &mut OpCounter) -> Result<MomentTable> {
    check_order(order)?;
    if order > PRECISION_WARNING_ORDER && opts.precision == Precision::Double {
        log::warn!("order {order} in double precision loses accuracy; consider extended precision");
    }
    let pool = pool(opts.workers)?;
    Ok(match opts.precision {
        Precision::Double => moments_2d_fast_in::<f64>(img, order, opts, &pool, counter),
        Precision::Extended => moments_2d_fast_in::<DoubleDouble>(img, order, opts, &pool, counter),
    })
}

/// All `L_pq` with `p + q ≤ M` by summing `P_p(x_i) P_q(y_j) f(x_i, y_j)`.
pub fn moments_2d_direct(img: &Image, order: usize, workers: usize, counter: &mut OpCounter) -> Result<MomentTable> {
    check_order(order)?;
    let (nx, ny) = (img.width(), img.height());
    let px = poly_eval_counted(order, &grid(nx), counter);
    let py = if nx == ny { px.clone() } else { poly_eval_counted(order, &grid(ny), counter) };
    let f = img.to_real_vec();
    let pool = pool(workers)?;
    let pairs: Vec<(usize, usize)> = (0..=order).flat_map(|p| (0..=order - p).map(move |q| (p, q))).collect();
    let vals = par_counted(&pool, pairs.len(), counter, |k, c| {
        let (p, q) = pairs[k];
        let (rx, ry) = (px.row(p), py.row(q));
        let mut sum = 0.0;
        for j in 0..ny {
            let row = &f[j * nx..(j + 1) * nx];
            let wy = ry[j];
            for i in 0..nx {
                sum += rx[i] * wy * row[i];
            }
        }
        // one product per pixel is the weight P_p P_q, the other applies it
        c.mul(Stage::DirectPair, (nx * ny) as u64);
        c.mul(Stage::DirectOther, (nx * ny) as u64 + 1);
        c.add(Stage::DirectOther, (nx * ny) as u64);
        sum * ((2 * p + 1) * (2 * q + 1)) as f64 / ((nx - 1) * (ny - 1)) as f64
    });
    let mut t = MomentTable::zeros(order, nx, ny);
    for (&(p, q), v) in pairs.iter().zip(vals) {
        t.set(p, q, v);
    }
    Ok(t)
}

/// Image rebuilt from a truncated moment set.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub width: usize,
    pub height: usize,
    /// Row-major, `values[j * width + i]`.
    pub values: Vec<f64>,
}

impl Reconstruction {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.width + i]
    }

    /// Rounded and clamped to `0..=255`.
    pub fn to_u8(&self) -> Vec<u8> {
        self.values.iter().map(|v| v.round().clamp(0.0, 255.0) as u8).collect()
    }

    /// Root mean square difference against an image of the same size.
    pub fn rmse(&self, img: &Image) -> Result<f64> {
        if img.width() != self.width || img.height() != self.height {
            return Err(Error::InvalidArgument(format!(
                "reference is {}x{}, reconstruction is {}x{}",
                img.width(),
                img.height(),
                self.width,
                self.height
            )));
        }
        let f = img.to_real_vec();
        let sse: f64 = self.values.iter().zip(&f).map(|(a, b)| (a - b) * (a - b)).sum();
        Ok((sse / f.len() as f64).sqrt())
    }
}

/// `f̂(x_i, y_j) = Σ_{p+q≤M} L_pq P_p(x_i) P_q(y_j)` on a `width × height` grid.
pub fn reconstruct(table: &MomentTable, width: usize, height: usize) -> Result<Reconstruction> {
    if width < 2 || height < 2 {
        return Err(Error::InvalidArgument(format!("reconstruction grid {width}x{height} is smaller than 2x2")));
    }
    let m = table.order();
    let px = poly_eval_recurrence(m, &grid(width));
    let py = poly_eval_recurrence(m, &grid(height));
    // inner sum over p first: c_q(i) = Σ_p L_pq P_p(x_i)
    let mut cq = vec![0.0; (m + 1) * width];
    for q in 0..=m {
        for p in 0..=m - q {
            let l = table.get(p, q);
            let row = px.row(p);
            for i in 0..width {
                cq[q * width + i] += l * row[i];
            }
        }
    }
    let mut values = vec![0.0; width * height];
    for j in 0..height {
        for q in 0..=m {
            let w = py.get(q, j);
            for i in 0..width {
                values[j * width + i] += w * cq[q * width + i];
            }
        }
    }
    Ok(Reconstruction { width, height, values })
}

/// Where fast and direct moments disagree most.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy {
    pub p: usize,
    pub q: usize,
    pub fast: f64,
    pub direct: f64,
    pub rel: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub max_abs: f64,
    /// `|fast − direct| / max(|direct|, 1)`, maximised over entries.
    pub max_rel: f64,
    /// Largest relative errors, worst first.
    pub worst: Vec<Discrepancy>,
}

impl VerifyReport {
    pub fn passes(&self, threshold: f64) -> bool {
        self.max_rel <= threshold
    }
}

pub fn compare_tables(fast: &MomentTable, direct: &MomentTable, keep: usize) -> VerifyReport {
    let mut all: Vec<Discrepancy> = fast
        .iter()
        .map(|(p, q, f)| {
            let d = direct.get(p, q);
            Discrepancy {
                p,
                q,
                fast: f,
                direct: d,
                rel: (f - d).abs() / d.abs().max(1.0),
            }
        })
        .collect();
    let max_abs = all.iter().map(|d| (d.fast - d.direct).abs()).fold(0.0, f64::max);
    all.sort_by(|a, b| b.rel.total_cmp(&a.rel));
    VerifyReport {
        max_abs,
        max_rel: all.first().map_or(0.0, |d| d.rel),
        worst: all.into_iter().take(keep).collect(),
    }
}

/// Computes both ways and compares.
pub fn verify(img: &Image, order: usize, opts: &FastOptions) -> Result<VerifyReport> {
    let mut c = OpCounter::disabled();
    let fast = moments_2d_fast(img, order, opts, &mut c)?;
    let direct = moments_2d_direct(img, order, opts.workers, &mut c)?;
    Ok(compare_tables(&fast, &direct, 5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::legendre1d::Dispatch;
    use crate::metering::predict_direct_mults_rect;

    fn img(w: usize, h: usize, f: impl Fn(usize, usize) -> f64) -> Image {
        let px = (0..w * h).map(|k| f(k % w, k / w)).collect();
        Image::from_real(w, h, px).unwrap()
    }

    #[test]
    fn two_by_two_example() {
        let im = img(2, 2, |i, j| [[1.0, 2.0], [3.0, 4.0]][j][i]);
        let mut c = OpCounter::new();
        let d = moments_2d_direct(&im, 1, 1, &mut c).unwrap();
        let f = moments_2d_fast(&im, 1, &FastOptions::default(), &mut c).unwrap();
        // x varies along i: L_10 = 3 Σ x f = 3((-1)(1+3) + (2+4)) = 6
        assert_eq!(d.get(0, 0), 10.0);
        assert_eq!(d.get(1, 0), 6.0);
        assert_eq!(d.get(0, 1), 12.0);
        assert!(compare_tables(&f, &d, 1).max_rel < 1e-15);
    }

    #[test]
    fn fast_matches_direct_on_mixed_rows() {
        let im = img(17, 12, |i, j| match j % 3 {
            0 => 5.0,
            1 => if (i + j) % 4 < 2 { 9.0 } else { 0.0 },
            _ => ((i * 7 + j * 13) % 23) as f64,
        });
        for dispatch in [Dispatch::Auto, Dispatch::GeneralOnly] {
            let opts = FastOptions { dispatch, ..FastOptions::default() };
            let r = verify(&im, 10, &opts).unwrap();
            assert!(r.passes(1e-10), "{dispatch:?}: {r:?}");
        }
    }

    #[test]
    fn direct_pair_count_is_exact() {
        let im = img(9, 6, |i, j| (i + j) as f64);
        let mut c = OpCounter::new();
        moments_2d_direct(&im, 4, 3, &mut c).unwrap();
        assert_eq!(c.stage(Stage::DirectPair).multiplications, predict_direct_mults_rect(9, 6, 4));
    }

    #[test]
    fn reconstruct_order_zero_is_mean_scaled() {
        let t = MomentTable::from_fn(0, 4, 4, |_, _| 2.0);
        let r = reconstruct(&t, 4, 4).unwrap();
        assert!(r.values.iter().all(|&v| v == 2.0));
        assert_eq!(r.to_u8(), vec![2; 16]);
        assert!(reconstruct(&t, 1, 4).is_err());
    }

    #[test]
    fn order_limit() {
        let im = img(3, 3, |_, _| 1.0);
        assert!(moments_2d_fast(&im, MAX_ORDER + 1, &FastOptions::default(), &mut OpCounter::new()).is_err());
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let im = img(33, 32, |i, j| ((i * 31 + j * 17) % 255) as f64);
        let mut c1 = OpCounter::new();
        let mut c4 = OpCounter::new();
        let a = moments_2d_fast(&im, 12, &FastOptions { workers: 1, ..FastOptions::default() }, &mut c1).unwrap();
        let b = moments_2d_fast(&im, 12, &FastOptions { workers: 4, ..FastOptions::default() }, &mut c4).unwrap();
        assert!(a.bit_identical(&b));
        assert_eq!(c1.total(), c4.total());
    }
}
