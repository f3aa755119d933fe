//! Legendre polynomials and one-dimensional Legendre moments.
//!
//! The fast path never evaluates a polynomial. It seeds
//! `L_0(a) = G(a)/(N−1)` and `L_1(a) = 3 G(a+1)/(N−1)` from the power-weighted
//! sums `G`, then fills the triangle `{(p, a) : a ≤ M − p}` row by row with
//!
//! ```text
//! L_p(a) = (2p+1)/p · [ L_{p−1}(a+1) − (p−1)/(2p−3) · L_{p−2}(a) ]
//! ```
//!
//! and reads the moments off the `a = 0` column.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::folding::{g_vector_binary_runs, g_vector_constant, g_vector_general, g_vector_general_exact, GVector};
use crate::image::{classify_signal, grid, Signal1D, SignalClass};
use crate::metering::{OpCounter, Stage};
use crate::power_sums::{Accumulator, CascadeLayout};
use crate::scalar::{DoubleDouble, Precision, Real};


/// Orders above this lose accuracy in double precision.
pub const PRECISION_WARNING_ORDER: usize = 40;
/// Largest supported order.
pub const MAX_ORDER: usize = 60;

/// `P_p(x_i)` for `p = 0..=order` on a set of abscissas.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyTable {
    order: usize,
    xs: Vec<f64>,
    /// `values[p * n + i]`
    values: Vec<f64>,
}

impl PolyTable {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn row(&self, p: usize) -> &[f64] {
        let n = self.xs.len();
        &self.values[p * n..(p + 1) * n]
    }

    pub fn get(&self, p: usize, i: usize) -> f64 {
        self.values[p * self.xs.len() + i]
    }
}

/// Three-term recurrence, `P_0 = 1`, `P_1 = x`.
pub fn poly_eval_recurrence(order: usize, xs: &[f64]) -> PolyTable {
    poly_eval_counted(order, xs, &mut OpCounter::disabled())
}

pub fn poly_eval_counted(order: usize, xs: &[f64], counter: &mut OpCounter) -> PolyTable {
    let n = xs.len();
    let mut values = vec![0.0; (order + 1) * n];
    values[..n].fill(1.0);
    if order >= 1 {
        values[n..2 * n].copy_from_slice(xs);
    }
    for p in 1..order {
        let a = (2 * p + 1) as f64 / (p + 1) as f64;
        let b = p as f64 / (p + 1) as f64;
        for i in 0..n {
            values[(p + 1) * n + i] = a * xs[i] * values[p * n + i] - b * values[(p - 1) * n + i];
        }
        counter.mul(Stage::Polynomial, 3 * n as u64 + 2);
        counter.add(Stage::Polynomial, n as u64);
    }
    PolyTable {
        order,
        xs: xs.to_vec(),
        values,
    }
}

/// Exact monomial coefficients of `P_p`, index = power of x.
pub fn poly_coefficients(p: usize) -> Vec<BigRational> {
    let fact = |k: usize| (1..=k).fold(BigInt::one(), |f, j| f * j);
    let mut coeffs = vec![BigRational::zero(); p + 1];
    let scale = BigInt::one() << p;
    for k in 0..=p / 2 {
        let num = fact(2 * p - 2 * k);
        let den = fact(k) * fact(p - k) * fact(p - 2 * k) * &scale;
        let mut c = BigRational::new(num, den);
        if k % 2 == 1 {
            c = -c;
        }
        coeffs[p - 2 * k] = c;
    }
    coeffs
}

/// Triangle `L_p(a)`, `0 ≤ p ≤ M`, `0 ≤ a ≤ M − p`.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxMomentRows<T> {
    order: usize,
    rows: Vec<Vec<T>>,
}

impl<T: Real> AuxMomentRows<T> {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, p: usize, a: usize) -> T {
        self.rows[p][a]
    }

    pub fn row(&self, p: usize) -> &[T] {
        &self.rows[p]
    }

    /// `L_p(0)` for every p.
    pub fn moments(&self) -> Vec<T> {
        self.rows.iter().map(|r| r[0]).collect()
    }
}

/// One step of the recurrence for row `p ≥ 2`.
#[inline]
pub fn recurrence_step<T: Real>(p: usize, prev: T, prev2: T) -> T {
    let c1 = T::from_i64(2 * p as i64 + 1) / T::from_i64(p as i64);
    let c2 = T::from_i64(p as i64 - 1) / T::from_i64(2 * p as i64 - 3);
    c1 * (prev - c2 * prev2)
}

pub fn aux_moments<T: Real>(g: &GVector<T>, order: usize, counter: &mut OpCounter) -> Result<AuxMomentRows<T>> {
    if g.values.len() < order + 1 {
        return Err(Error::InvalidArgument(format!(
            "G_N(a) known up to a = {}, order {order} needs a = {order}",
            g.values.len() as i64 - 1
        )));
    }
    let n = g.n;
    let inv = T::from_f64(1.0) / T::from_i64(n as i64 - 1);
    let three_inv = T::from_f64(3.0) / T::from_i64(n as i64 - 1);
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(order + 1);
    rows.push((0..=order).map(|a| g.values[a] * inv).collect());
    counter.mul(Stage::Seed, order as u64 + 1 + 1);
    if order >= 1 {
        rows.push((0..order).map(|a| g.values[a + 1] * three_inv).collect());
        counter.mul(Stage::Seed, order as u64 + 1);
    }
    for p in 2..=order {
        let c1 = T::from_i64(2 * p as i64 + 1) / T::from_i64(p as i64);
        let c2 = T::from_i64(p as i64 - 1) / T::from_i64(2 * p as i64 - 3);
        let width = order - p + 1;
        let row: Vec<T> = {
            let prev = &rows[p - 1];
            let prev2 = &rows[p - 2];
            (0..width).map(|a| c1 * (prev[a + 1] - c2 * prev2[a])).collect()
        };
        counter.mul(Stage::Recurrence, 2 + 2 * width as u64);
        counter.add(Stage::Recurrence, width as u64);
        rows.push(row);
    }
    Ok(AuxMomentRows { order, rows })
}

/// How rows are routed to the G-vector paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Dispatch {
    /// Constant and binary rows take their dedicated paths.
    #[default]
    Auto,
    /// Every row goes through the cascade.
    GeneralOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FastOptions {
    pub layout: CascadeLayout,
    pub dispatch: Dispatch,
    pub precision: Precision,
    /// Use exact integer power sums for integral image rows.
    pub exact_integer_input: bool,
    /// Worker threads for the 2D stages.
    pub workers: usize,
}

impl Default for FastOptions {
    fn default() -> Self {
        FastOptions {
            layout: CascadeLayout::Prefix,
            dispatch: Dispatch::Auto,
            precision: Precision::Double,
            exact_integer_input: false,
            workers: 1,
        }
    }
}

/// G-vector of a measured signal, routed by its class.
pub(crate) fn g_vector_dispatch<T: Real + Accumulator>(
    values: &[f64],
    integers: Option<&[i64]>,
    a_max: usize,
    opts: &FastOptions,
    counter: &mut OpCounter,
) -> Option<GVector<T>> {
    let n = values.len();
    let class = if opts.dispatch == Dispatch::Auto {
        classify_signal(values)
    } else {
        SignalClass::General
    };
    match class {
        SignalClass::Constant(0.0) => None,
        SignalClass::Constant(level) => Some(g_vector_constant(n, T::from_f64(level), a_max, counter)),
        SignalClass::BinaryRuns { level, runs } => Some(
            g_vector_binary_runs(n, &runs, T::from_f64(level), a_max, counter).expect("runs from classifier are valid"),
        ),
        SignalClass::General => {
            if values.iter().all(|&v| v == 0.0) {
                return None;
            }
            match integers {
                Some(ints) if opts.exact_integer_input => Some(g_vector_general_exact(ints, a_max, opts.layout, counter)),
                _ => {
                    let vals: Vec<T> = values.iter().map(|&v| T::from_f64(v)).collect();
                    Some(g_vector_general(&vals, a_max, opts.layout, counter))
                }
            }
        }
    }
}

/// Moments `L_0..=L_M` of a measured signal in working precision `T`.
pub(crate) fn moments_1d_fast_in<T: Real + Accumulator>(
    values: &[f64],
    integers: Option<&[i64]>,
    order: usize,
    opts: &FastOptions,
    counter: &mut OpCounter,
) -> Vec<T> {
    match g_vector_dispatch::<T>(values, integers, order, opts, counter) {
        None => vec![T::zero(); order + 1],
        Some(g) => aux_moments(&g, order, counter).expect("G covers the order").moments(),
    }
}

/// Moments of an intermediate real-valued signal; always the cascade path.
pub(crate) fn moments_1d_general_in<T: Real + Accumulator>(
    values: &[T],
    order: usize,
    layout: CascadeLayout,
    counter: &mut OpCounter,
) -> Vec<T> {
    if values.iter().all(|&v| v == T::zero()) {
        return vec![T::zero(); order + 1];
    }
    let g = g_vector_general(values, order, layout, counter);
    aux_moments(&g, order, counter).expect("G covers the order").moments()
}

/// 1D Legendre moments by the recurrence.
pub fn moments_1d_fast(s: &Signal1D, order: usize, opts: &FastOptions, counter: &mut OpCounter) -> Vec<f64> {
    match opts.precision {
        Precision::Double => moments_1d_fast_in::<f64>(s.values(), None, order, opts, counter),
        Precision::Extended => moments_1d_fast_in::<DoubleDouble>(s.values(), None, order, opts, counter)
            .into_iter()
            .map(Real::to_f64)
            .collect(),
    }
}

/// 1D Legendre moments by direct summation over the polynomial table.
pub fn moments_1d_direct(s: &Signal1D, order: usize, counter: &mut OpCounter) -> Vec<f64> {
    let n = s.len();
    let table = poly_eval_counted(order, &grid(n), counter);
    let f = s.values();
    (0..=order)
        .map(|p| {
            let sum: f64 = table.row(p).iter().zip(f).map(|(pp, fi)| pp * fi).sum();
            counter.mul(Stage::DirectPair, n as u64);
            counter.add(Stage::DirectOther, n as u64);
            counter.mul(Stage::DirectOther, 1);
            sum * (2 * p + 1) as f64 / (n - 1) as f64
        })
        .collect()
}
