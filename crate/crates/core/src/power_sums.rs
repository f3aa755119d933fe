//! Integer power sums and addition-only weighted power sums.
//!
//! * `H_M(a) = Σ_{i=1}^{M} i^a` in closed form (a ≤ 4) or by the binomial
//!   recurrence `Σ_{k=1}^{a} C(a+1,k) H_M(k) = (M+1)^{a+1} − (M+1)`.
//! * `S(a) = Σ_{i=1}^{n} i^a g_i` for an arbitrary signal, computed by a cascade
//!   of accumulators that only ever adds.
//!
//! Two cascade layouts are provided. [`CascadeLayout::Prefix`] runs one pass with
//! `a_max + 1` chained prefix-sum accumulators and then applies a fixed
//! non-negative integer change of basis (`O(a_max²)` multiplications, independent
//! of `n`). [`CascadeLayout::AllAdder`] carries the power sums themselves and
//! re-centres them after every sample with a Pascal-triangle network of adders, so
//! it never multiplies but costs `O(a_max²)` additions per sample.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cache;
use crate::error::{Error, Result};
use crate::metering::{OpCounter, Stage};
use crate::scalar::Real;

/// `H_M(a)` from the closed forms for `a ∈ 1..=4`, in exact integer arithmetic.
pub fn power_sum_closed(m: u64, a: u32) -> Result<BigInt> {
    let m = BigInt::from(m);
    let m1 = &m + 1u32;
    let v = match a {
        1 => &m * &m1 / 2u32,
        2 => &m * &m1 * (&m * 2u32 + 1u32) / 6u32,
        3 => &m * &m * &m1 * &m1 / 4u32,
        4 => &m * &m1 * (&m * 2u32 + 1u32) * (&m * &m * 3u32 + &m * 3u32 - 1u32) / 30u32,
        _ => {
            return Err(Error::InvalidArgument(format!(
                "closed-form power sum needs exponent in 1..=4, got {a}"
            )))
        }
    };
    Ok(v)
}

/// Power sums `H_M(0..=a_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSumTable {
    pub m: u64,
    pub a_max: usize,
    pub values: PowerSumValues,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PowerSumValues {
    Exact(Vec<BigInt>),
    Approx(Vec<f64>),
}

impl PowerSumTable {
    pub fn get_f64(&self, a: usize) -> f64 {
        match &self.values {
            PowerSumValues::Exact(v) => f64::from_bigint(&v[a]),
            PowerSumValues::Approx(v) => v[a],
        }
    }

    pub fn exact(&self) -> Option<&[BigInt]> {
        match &self.values {
            PowerSumValues::Exact(v) => Some(v),
            PowerSumValues::Approx(_) => None,
        }
    }
}

/// `H_M(a)` for `a = 0..=a_max` by the binomial recurrence solved for its
/// leading term.
pub fn power_sum_recurrence(m: u64, a_max: usize, exact: bool) -> PowerSumTable {
    let values = if exact {
        PowerSumValues::Exact(recurrence_exact(m, a_max))
    } else {
        PowerSumValues::Approx(recurrence_approx(m, a_max))
    };
    PowerSumTable { m, a_max, values }
}

fn recurrence_exact(m: u64, a_max: usize) -> Vec<BigInt> {
    let m1 = BigInt::from(m) + 1u32;
    let mut h = Vec::with_capacity(a_max + 1);
    h.push(BigInt::from(m));
    // (M+1)^(a+1), updated incrementally
    let mut m1_pow = &m1 * &m1;
    let mut binom: Vec<BigInt> = vec![BigInt::one(), BigInt::from(2u32), BigInt::one()];
    for a in 1..=a_max {
        // binom holds row a+1 of Pascal's triangle
        let mut rhs = &m1_pow - &m1;
        for (k, hk) in h.iter().enumerate().take(a).skip(1) {
            rhs -= &binom[k] * hk;
        }
        let (q, r) = rhs.div_rem(&BigInt::from(a + 1));
        debug_assert!(r.is_zero(), "power sum recurrence left a remainder");
        h.push(q);
        m1_pow *= &m1;
        binom = next_pascal_row(&binom);
    }
    h
}

fn recurrence_approx(m: u64, a_max: usize) -> Vec<f64> {
    let m1 = m as f64 + 1.0;
    let mut h = Vec::with_capacity(a_max + 1);
    h.push(m as f64);
    let mut m1_pow = m1 * m1;
    let mut binom = vec![1.0, 2.0, 1.0];
    for a in 1..=a_max {
        let mut rhs = m1_pow - m1;
        for (k, hk) in h.iter().enumerate().take(a).skip(1) {
            rhs -= binom[k] * hk;
        }
        h.push(rhs / (a + 1) as f64);
        m1_pow *= m1;
        let mut next = vec![1.0; binom.len() + 1];
        for k in 1..binom.len() {
            next[k] = binom[k - 1] + binom[k];
        }
        binom = next;
    }
    h
}

fn next_pascal_row(row: &[BigInt]) -> Vec<BigInt> {
    let mut next = vec![BigInt::one(); row.len() + 1];
    for k in 1..row.len() {
        next[k] = &row[k - 1] + &row[k];
    }
    next
}

/// `Σ_{j=c}^{d} j^a` with `0^0 = 1`; an empty range (`c > d`) sums to zero.
pub fn signed_range_power_sum(c: i64, d: i64, a: u32) -> BigInt {
    if c > d {
        return BigInt::zero();
    }
    let h = |m: i64| -> BigInt {
        if m <= 0 {
            return BigInt::zero();
        }
        let t = power_sum_recurrence(m as u64, a as usize, true);
        t.exact().expect("exact table")[a as usize].clone()
    };
    let sign = if a.is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
    let mut total = BigInt::zero();
    // positive part j in [max(c,1), d]
    if d >= 1 {
        total += h(d) - h(c.max(1) - 1);
    }
    // negative part j in [c, min(d,-1)], mirrored onto positive integers
    if c <= -1 {
        let hi = -c;
        let lo = -(d.min(-1));
        total += &sign * (h(hi) - h(lo - 1));
    }
    if c <= 0 && d >= 0 && a == 0 {
        total += 1;
    }
    total
}

/// Exact Stirling-type matrix mapping prefix-cascade outputs to power sums.
///
/// Accumulator `k` of a prefix cascade holds `Σ_i C(i−1, k) g_i`; row `a` of
/// this matrix gives `i^a = Σ_k T[a][k] C(i−1, k)`. It is obtained by expanding
/// each `C(i−1, k)` in monomials and inverting the triangular coefficient matrix
/// in exact rationals. All entries are non-negative integers.
#[derive(Debug, Clone, PartialEq)]
pub struct ConversionMatrix<V> {
    /// Row `a` has `a + 1` entries.
    rows: Vec<Vec<V>>,
}

impl<V> ConversionMatrix<V> {
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, a: usize) -> &[V] {
        &self.rows[a]
    }
}

impl ConversionMatrix<BigInt> {
    pub fn build_exact(a_max: usize) -> Self {
        let n = a_max + 1;
        // basis[k] = coefficients of C(i-1, k) in powers of i
        let mut basis: Vec<Vec<BigRational>> = Vec::with_capacity(n);
        let mut poly = vec![BigRational::one()];
        let mut fact = BigInt::one();
        for k in 0..n {
            if k > 0 {
                // multiply by (i - k)
                let mut next = vec![BigRational::zero(); poly.len() + 1];
                for (e, c) in poly.iter().enumerate() {
                    next[e + 1] += c;
                    next[e] -= c * BigRational::from_integer(BigInt::from(k));
                }
                poly = next;
                fact *= k;
            }
            let denom = BigRational::from_integer(fact.clone());
            basis.push(poly.iter().map(|c| c / &denom).collect());
        }
        // Solve basis · T^T = I column by column: i^a = Σ_k T[a][k] C(i-1,k).
        // basis is lower triangular (row k has degree k).
        let mut t = vec![vec![BigRational::zero(); n]; n];
        #[allow(clippy::needless_range_loop)]
        for a in 0..n {
            // find x with Σ_k x_k basis[k][e] = δ(e, a) for e = 0..n
            // back-substitute from the highest degree down
            let mut x = vec![BigRational::zero(); n];
            for k in (0..n).rev() {
                let mut residual = if k == a {
                    BigRational::one()
                } else {
                    BigRational::zero()
                };
                for j in (k + 1)..n {
                    residual -= &x[j] * &basis[j][k];
                }
                x[k] = residual / &basis[k][k];
            }
            t[a] = x;
        }
        let rows = t
            .into_iter()
            .enumerate()
            .map(|(a, row)| {
                row.into_iter()
                    .take(a + 1)
                    .map(|v| {
                        assert!(v.is_integer(), "conversion entry is not an integer");
                        assert!(!v.is_negative(), "conversion entry is negative");
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();
        ConversionMatrix { rows }
    }
}

/// Cached exact conversion matrix covering exponents `0..=a_max`.
pub fn conversion_matrix_exact(a_max: usize) -> Arc<ConversionMatrix<BigInt>> {
    cache::get_or_build("conversion", a_max as u64, 0, || {
        ConversionMatrix::build_exact(a_max)
    })
}

fn conversion_matrix<T: Real>(a_max: usize) -> Arc<ConversionMatrix<T>> {
    cache::get_or_build("conversion-real", a_max as u64, 0, || {
        let exact = conversion_matrix_exact(a_max);
        ConversionMatrix {
            rows: exact
                .rows
                .iter()
                .map(|r| r.iter().map(T::from_bigint).collect())
                .collect(),
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CascadeLayout {
    /// Single pass of chained prefix sums, then a fixed change of basis.
    #[default]
    Prefix,
    /// Per-sample Pascal re-centring network; no multiplications at all.
    AllAdder,
}

/// Values the cascade can accumulate.
pub trait Accumulator: Clone + Default + for<'a> std::ops::AddAssign<&'a Self> {}

impl<T> Accumulator for T where T: Clone + Default + for<'a> std::ops::AddAssign<&'a T> {}

/// Running state of the addition-only accumulation stage for one signal.
///
/// Samples are pushed from the last index down to the first.
#[derive(Debug, Clone)]
pub struct CascadeState<A> {
    layout: CascadeLayout,
    len: usize,
    acc: Vec<A>,
}

impl<A: Accumulator> CascadeState<A> {
    pub fn new(a_max: usize, layout: CascadeLayout) -> Self {
        CascadeState {
            layout,
            len: 0,
            acc: vec![A::default(); a_max + 1],
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Feeds the sample at the next lower index.
    #[inline]
    pub fn push(&mut self, sample: &A, counter: &mut OpCounter) {
        let k = self.acc.len();
        match self.layout {
            CascadeLayout::Prefix => {
                // stage k takes stage k-1's value from before this sample
                for j in (1..k).rev() {
                    let (lo, hi) = self.acc.split_at_mut(j);
                    hi[0] += &lo[j - 1];
                }
                self.acc[0] += sample;
                counter.add(Stage::Cascade, k as u64);
            }
            CascadeLayout::AllAdder => {
                if self.len > 0 {
                    self.shift(counter);
                }
                self.acc[0] += sample;
                counter.add(Stage::Cascade, 1);
            }
        }
        self.len += 1;
    }

    /// Re-centres the carried power sums one step: `t_a ← Σ_b C(a,b) t_b`.
    fn shift(&mut self, counter: &mut OpCounter) {
        let k = self.acc.len();
        for start in 1..k {
            for j in (start..k).rev() {
                let (lo, hi) = self.acc.split_at_mut(j);
                hi[0] += &lo[j - 1];
            }
        }
        counter.add(Stage::Cascade, (k * (k - 1) / 2) as u64);
    }

    /// Ends the accumulation stage.
    ///
    /// Prefix layout: entry `k` is `Σ_i C(i−1, k) g_i`. All-adder layout: entry
    /// `a` is already the power sum `Σ_i i^a g_i`.
    pub fn finish(mut self, counter: &mut OpCounter) -> Vec<A> {
        if self.layout == CascadeLayout::AllAdder && self.len > 0 {
            self.shift(counter);
        }
        self.acc
    }
}

/// `S[a] = Σ_{i=1}^{n} i^a g_i` for `a = 0..=a_max`.
pub fn cascade_power_sums<T: Real + Accumulator>(
    g: &[T],
    a_max: usize,
    layout: CascadeLayout,
    counter: &mut OpCounter,
) -> Result<Vec<T>> {
    if g.is_empty() {
        return Err(Error::InvalidArgument("cascade over an empty signal".into()));
    }
    let mut state = CascadeState::new(a_max, layout);
    for v in g.iter().rev() {
        state.push(v, counter);
    }
    let acc = state.finish(counter);
    Ok(match layout {
        CascadeLayout::AllAdder => acc,
        CascadeLayout::Prefix => {
            let m = conversion_matrix::<T>(a_max);
            convert(&m, &acc, counter)
        }
    })
}

fn convert<T: Real>(m: &ConversionMatrix<T>, acc: &[T], counter: &mut OpCounter) -> Vec<T> {
    let mut out = Vec::with_capacity(acc.len());
    for a in 0..acc.len() {
        let row = m.row(a);
        let mut s = row[0] * acc[0];
        for k in 1..=a {
            s += row[k] * acc[k];
        }
        out.push(s);
        counter.mul(Stage::Conversion, (a + 1) as u64);
        counter.add(Stage::Conversion, a as u64);
    }
    out
}

/// Exact integer variant of [`cascade_power_sums`].
pub fn cascade_power_sums_exact(
    g: &[i64],
    a_max: usize,
    layout: CascadeLayout,
    counter: &mut OpCounter,
) -> Result<Vec<BigInt>> {
    if g.is_empty() {
        return Err(Error::InvalidArgument("cascade over an empty signal".into()));
    }
    let mut state = CascadeState::new(a_max, layout);
    for &v in g.iter().rev() {
        state.push(&BigInt::from(v), counter);
    }
    let acc = state.finish(counter);
    Ok(match layout {
        CascadeLayout::AllAdder => acc,
        CascadeLayout::Prefix => {
            let m = conversion_matrix_exact(a_max);
            let mut out = Vec::with_capacity(acc.len());
            for a in 0..acc.len() {
                let s: BigInt = m.row(a).iter().zip(&acc).map(|(t, c)| t * c).sum();
                out.push(s);
                counter.mul(Stage::Conversion, (a + 1) as u64);
                counter.add(Stage::Conversion, a as u64);
            }
            out
        }
    })
}

/// Integer lattice a prefix table runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    /// 1, 2, 3, ...
    Integers,
    /// 1, 3, 5, ...
    OddIntegers,
}

/// Prefix power sums `P_m(a) = Σ_{k=1}^{m} v_k^a` over a lattice `v_k`, built
/// exactly and rounded once to `T`.
#[derive(Debug, Clone)]
pub struct PrefixPowerTable<T> {
    lattice: Lattice,
    m_max: usize,
    a_max: usize,
    /// `values[m * (a_max + 1) + a]`
    values: Vec<T>,
}

impl<T: Real> PrefixPowerTable<T> {
    pub fn build(lattice: Lattice, m_max: usize, a_max: usize) -> Self {
        let width = a_max + 1;
        let mut values = Vec::with_capacity((m_max + 1) * width);
        let mut running = vec![BigInt::zero(); width];
        values.extend(running.iter().map(T::from_bigint));
        for k in 1..=m_max {
            let v = BigInt::from(match lattice {
                Lattice::Integers => k,
                Lattice::OddIntegers => 2 * k - 1,
            });
            let mut p = BigInt::one();
            for r in running.iter_mut() {
                *r += &p;
                p *= &v;
            }
            values.extend(running.iter().map(T::from_bigint));
        }
        PrefixPowerTable {
            lattice,
            m_max,
            a_max,
            values,
        }
    }

    /// Shared cached table.
    pub fn cached(lattice: Lattice, m_max: usize, a_max: usize) -> Arc<Self> {
        let tag = match lattice {
            Lattice::Integers => "prefix-int",
            Lattice::OddIntegers => "prefix-odd",
        };
        cache::get_or_build(tag, m_max as u64, a_max as u64, || {
            Self::build(lattice, m_max, a_max)
        })
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn a_max(&self) -> usize {
        self.a_max
    }

    #[inline]
    pub fn get(&self, m: usize, a: usize) -> T {
        self.values[m * (self.a_max + 1) + a]
    }

    /// `Σ_{k=lo}^{hi} v_k^a`; zero when `lo > hi`.
    #[inline]
    pub fn range(&self, lo: usize, hi: usize, a: usize) -> T {
        if lo > hi {
            T::zero()
        } else {
            self.get(hi, a) - self.get(lo - 1, a)
        }
    }
}
