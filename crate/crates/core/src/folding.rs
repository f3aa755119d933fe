//! Power-weighted signal sums `G_N(a) = Σ_i x_i^a f(x_i)`.
//!
//! With `x_i = (2i − N − 1)/(N − 1)`, the numerators `2i − N − 1` are integers
//! symmetric about the centre, so folding the signal into its symmetric and
//! antisymmetric halves leaves integer power sums over half the samples:
//!
//! * `N = 2L + 1`: `G(a) = L^{−a} Σ_{i=1}^{L} i^a g(i)` with `g = g₁` (odd a) or
//!   `g₂` (even a), plus the centre sample at `a = 0`.
//! * `N = 2L`: `G(a) = (2L−1)^{−a} Σ_{i=1}^{2L} i^a h(i)` where `h₁`/`h₂` are the
//!   halves spread onto odd positions with zeros in between.

use crate::error::Result;
use crate::image::{validate_runs, Run};
use crate::metering::{OpCounter, Stage};
use crate::power_sums::{cascade_power_sums, cascade_power_sums_exact, power_sum_recurrence, Accumulator, CascadeLayout, Lattice, PrefixPowerTable};
use crate::scalar::Real;
use crate::cache;

use num_bigint::BigInt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldParity {
    /// Length `2L + 1`.
    Odd(usize),
    /// Length `2L`.
    Even(usize),
}

impl FoldParity {
    pub fn of(n: usize) -> FoldParity {
        if n % 2 == 1 {
            FoldParity::Odd(n / 2)
        } else {
            FoldParity::Even(n / 2)
        }
    }

    pub fn half(self) -> usize {
        match self {
            FoldParity::Odd(l) | FoldParity::Even(l) => l,
        }
    }

    /// Denominator of the grid, `L` or `2L − 1`.
    pub fn scale_base(self) -> usize {
        match self {
            FoldParity::Odd(l) => l,
            FoldParity::Even(l) => 2 * l - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FoldedSignal<T> {
    pub parity: FoldParity,
    /// g₂ (odd length) or g₄ (even length).
    pub sym: Vec<T>,
    /// g₁ (odd length) or g₃ (even length).
    pub antisym: Vec<T>,
    /// Middle sample, odd length only.
    pub center: Option<T>,
}

/// Splits a signal of length ≥ 2 about its centre.
pub fn fold<T>(values: &[T], counter: &mut OpCounter) -> FoldedSignal<T>
where
    T: Copy + std::ops::Add<Output = T> + std::ops::Sub<Output = T>,
{
    let n = values.len();
    assert!(n >= 2, "fold needs at least two samples");
    let parity = FoldParity::of(n);
    let l = parity.half();
    // 1-based: right partner of i is L+i+1 (odd) or L+i (even); left partner L-i+1
    let right_offset = match parity {
        FoldParity::Odd(_) => l,
        FoldParity::Even(_) => l - 1,
    };
    let mut sym = Vec::with_capacity(l);
    let mut antisym = Vec::with_capacity(l);
    for i in 1..=l {
        let right = values[right_offset + i];
        let left = values[l - i];
        sym.push(right + left);
        antisym.push(right - left);
    }
    counter.add(Stage::Fold, 2 * l as u64);
    let center = match parity {
        FoldParity::Odd(_) => Some(values[l]),
        FoldParity::Even(_) => None,
    };
    FoldedSignal {
        parity,
        sym,
        antisym,
        center,
    }
}

fn interleave<T: Real>(half: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); 2 * half.len()];
    for (k, &v) in half.iter().enumerate() {
        out[2 * k] = v;
    }
    out
}

impl<T: Real> FoldedSignal<T> {
    /// h₂: the symmetric half on odd 1-based positions, zeros elsewhere.
    pub fn interleaved_sym(&self) -> Vec<T> {
        interleave(&self.sym)
    }

    /// h₁: the antisymmetric half on odd 1-based positions, zeros elsewhere.
    pub fn interleaved_antisym(&self) -> Vec<T> {
        interleave(&self.antisym)
    }

    /// Recovers the original samples.
    pub fn unfold(&self) -> Vec<T> {
        let l = self.parity.half();
        let half = T::from_f64(0.5);
        let mut out = Vec::with_capacity(2 * l + 1);
        for i in (1..=l).rev() {
            out.push((self.sym[i - 1] - self.antisym[i - 1]) * half);
        }
        if let Some(c) = self.center {
            out.push(c);
        }
        for i in 1..=l {
            out.push((self.sym[i - 1] + self.antisym[i - 1]) * half);
        }
        out
    }
}

/// `G_N(a)` for `a = 0..=a_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct GVector<T = f64> {
    pub n: usize,
    pub values: Vec<T>,
}

impl<T: Real> GVector<T> {
    pub fn a_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn to_f64(&self) -> GVector<f64> {
        GVector {
            n: self.n,
            values: self.values.iter().map(|v| v.to_f64()).collect(),
        }
    }
}

/// `1 / base^a` for `a = 0..=a_max`, each rounded once from the exact power.
fn reciprocal_powers<T: Real>(base: usize, a_max: usize) -> std::sync::Arc<Vec<T>> {
    cache::get_or_build("recip-pow", base as u64, a_max as u64, || {
        let b = BigInt::from(base);
        let mut p = BigInt::from(1u32);
        let one = T::from_f64(1.0);
        let mut out = Vec::with_capacity(a_max + 1);
        for _ in 0..=a_max {
            out.push(one / T::from_bigint(&p));
            p *= &b;
        }
        out
    })
}

fn scale_in_place<T: Real>(values: &mut [T], base: usize, counter: &mut OpCounter) {
    let a_max = values.len() - 1;
    let recip = reciprocal_powers::<T>(base, a_max);
    for a in 1..=a_max {
        values[a] = values[a] * recip[a];
    }
    counter.pow(Stage::Scaling, a_max as u64);
    counter.mul(Stage::Scaling, a_max as u64);
}

/// General signals: fold, run the addition-only cascade on both halves, scale.
pub fn g_vector_general<T: Real + Accumulator>(
    values: &[T],
    a_max: usize,
    layout: CascadeLayout,
    counter: &mut OpCounter,
) -> GVector<T> {
    let n = values.len();
    let folded = fold(values, counter);
    let (odd_src, even_src) = match folded.parity {
        FoldParity::Odd(_) => (folded.antisym.clone(), folded.sym.clone()),
        FoldParity::Even(_) => (folded.interleaved_antisym(), folded.interleaved_sym()),
    };
    let s_odd = cascade_power_sums(&odd_src, a_max, layout, counter).expect("non-empty half");
    let s_even = cascade_power_sums(&even_src, a_max, layout, counter).expect("non-empty half");
    let mut g: Vec<T> = (0..=a_max)
        .map(|a| if a % 2 == 1 { s_odd[a] } else { s_even[a] })
        .collect();
    if let Some(c) = folded.center {
        g[0] += c;
        counter.add(Stage::Fold, 1);
    }
    scale_in_place(&mut g, folded.parity.scale_base(), counter);
    GVector { n, values: g }
}

/// [`g_vector_general`] for integer samples with exact power sums, rounded once
/// into `T` before scaling.
pub fn g_vector_general_exact<T: Real>(
    values: &[i64],
    a_max: usize,
    layout: CascadeLayout,
    counter: &mut OpCounter,
) -> GVector<T> {
    let n = values.len();
    let folded = fold(values, counter);
    let (odd_src, even_src) = match folded.parity {
        FoldParity::Odd(_) => (folded.antisym.clone(), folded.sym.clone()),
        FoldParity::Even(_) => (interleave_int(&folded.antisym), interleave_int(&folded.sym)),
    };
    let s_odd = cascade_power_sums_exact(&odd_src, a_max, layout, counter).expect("non-empty half");
    let mut s_even = cascade_power_sums_exact(&even_src, a_max, layout, counter).expect("non-empty half");
    if let Some(c) = folded.center {
        s_even[0] += c;
        counter.add(Stage::Fold, 1);
    }
    let mut g: Vec<T> = (0..=a_max)
        .map(|a| T::from_bigint(if a % 2 == 1 { &s_odd[a] } else { &s_even[a] }))
        .collect();
    scale_in_place(&mut g, folded.parity.scale_base(), counter);
    GVector { n, values: g }
}

fn interleave_int(half: &[i64]) -> Vec<i64> {
    let mut out = vec![0; 2 * half.len()];
    for (k, &v) in half.iter().enumerate() {
        out[2 * k] = v;
    }
    out
}

/// Unit-level profile of a constant signal: `G_N(a) / level`.
fn constant_profile<T: Real>(n: usize, a_max: usize) -> std::sync::Arc<Vec<T>> {
    cache::get_or_build("const-profile", n as u64, a_max as u64, || {
        let parity = FoldParity::of(n);
        let l = parity.half() as u64;
        let recip = reciprocal_powers::<T>(parity.scale_base(), a_max);
        let h_l = power_sum_recurrence(l, a_max, true);
        let h_l = h_l.exact().expect("exact");
        let h_2l = match parity {
            FoldParity::Even(_) => Some(power_sum_recurrence(2 * l, a_max, true)),
            FoldParity::Odd(_) => None,
        };
        let two = T::from_f64(2.0);
        (0..=a_max)
            .map(|a| {
                if a == 0 {
                    T::from_i64(n as i64)
                } else if a % 2 == 1 {
                    T::zero()
                } else {
                    let num = match &h_2l {
                        None => h_l[a].clone(),
                        Some(h2) => {
                            &h2.exact().expect("exact")[a] - (BigInt::from(1u32) << a) * &h_l[a]
                        }
                    };
                    two * T::from_bigint(&num) * recip[a]
                }
            })
            .collect()
    })
}

/// Constant signals: closed-form power sums, no per-sample work.
pub fn g_vector_constant<T: Real>(n: usize, level: T, a_max: usize, counter: &mut OpCounter) -> GVector<T> {
    assert!(n >= 2, "signal length must be at least 2");
    let profile = constant_profile::<T>(n, a_max);
    let values = profile.iter().map(|&p| level * p).collect();
    counter.mul(Stage::PowerSumLookup, (a_max / 2 + 1) as u64);
    GVector { n, values }
}

/// `{0, level}` signals given as runs of `level`, from prefix power-sum lookups.
pub fn g_vector_binary_runs<T: Real>(
    n: usize,
    runs: &[Run],
    level: T,
    a_max: usize,
    counter: &mut OpCounter,
) -> Result<GVector<T>> {
    validate_runs(runs, n)?;
    let parity = FoldParity::of(n);
    let l = parity.half();
    let lattice = match parity {
        FoldParity::Odd(_) => Lattice::Integers,
        FoldParity::Even(_) => Lattice::OddIntegers,
    };
    let table = PrefixPowerTable::<T>::cached(lattice, l, a_max);
    let mut pos = vec![T::zero(); a_max + 1];
    let mut neg = vec![T::zero(); a_max + 1];
    let mut has_zero = false;
    let mut lookups = 0u64;
    for r in runs {
        // lattice index ranges of the right and left halves covered by the run
        let (right, left) = match parity {
            FoldParity::Odd(_) => {
                if r.start <= l + 1 && r.end > l {
                    has_zero = true;
                }
                let right = (r.end > l + 1).then(|| (r.start.max(l + 2) - l - 1, r.end - l - 1));
                let left = (r.start < l + 1).then(|| (l + 1 - r.end.min(l), l + 1 - r.start));
                (right, left)
            }
            FoldParity::Even(_) => {
                let right = (r.end > l).then(|| (r.start.max(l + 1) - l, r.end - l));
                let left = (r.start <= l).then(|| (l + 1 - r.end.min(l), l + 1 - r.start));
                (right, left)
            }
        };
        if let Some((lo, hi)) = right {
            for (a, acc) in pos.iter_mut().enumerate() {
                *acc += table.range(lo, hi, a);
            }
            lookups += 1;
        }
        if let Some((lo, hi)) = left {
            for (a, acc) in neg.iter_mut().enumerate() {
                *acc += table.range(lo, hi, a);
            }
            lookups += 1;
        }
    }
    counter.add(Stage::PowerSumLookup, 2 * lookups * (a_max as u64 + 1));
    let mut values: Vec<T> = (0..=a_max)
        .map(|a| if a % 2 == 0 { pos[a] + neg[a] } else { pos[a] - neg[a] })
        .collect();
    counter.add(Stage::PowerSumLookup, a_max as u64 + 1);
    if has_zero {
        values[0] += T::from_f64(1.0);
        counter.add(Stage::PowerSumLookup, 1);
    }
    for v in values.iter_mut() {
        *v = *v * level;
    }
    counter.mul(Stage::PowerSumLookup, a_max as u64 + 1);
    scale_in_place(&mut values, parity.scale_base(), counter);
    Ok(GVector { n, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{classify_signal, grid, SignalClass};
    use crate::power_sums::signed_range_power_sum;
    use proptest::prelude::*;

    /// Σ x_i^a f_i straight from the definition.
    fn brute(f: &[f64], a_max: usize) -> Vec<f64> {
        let x = grid(f.len());
        (0..=a_max)
            .map(|a| x.iter().zip(f).map(|(xi, fi)| xi.powi(a as i32) * fi).sum())
            .collect()
    }

    /// Σ |x_i|^a |f_i|: the scale rounding errors are measured against.
    fn magnitude(f: &[f64], a_max: usize) -> Vec<f64> {
        let x = grid(f.len());
        (0..=a_max)
            .map(|a| x.iter().zip(f).map(|(xi, fi)| xi.abs().powi(a as i32) * fi.abs()).sum())
            .collect()
    }

    fn assert_close(got: &[f64], want: &[f64], scale: &[f64], tol: f64) {
        for a in 0..want.len() {
            let err = (got[a] - want[a]).abs();
            assert!(
                err <= tol * scale[a].max(f64::MIN_POSITIVE),
                "a={a}: got {} want {} (err {err:e}, scale {:e})",
                got[a],
                want[a],
                scale[a]
            );
        }
    }

    fn general(f: &[f64], a_max: usize, layout: CascadeLayout) -> Vec<f64> {
        g_vector_general(f, a_max, layout, &mut OpCounter::new()).values
    }

    #[test]
    fn fold_examples() {
        let mut c = OpCounter::new();
        let f = fold(&[1.0, 2.0, 3.0], &mut c);
        assert_eq!((f.antisym.clone(), f.sym.clone(), f.center), (vec![2.0], vec![4.0], Some(2.0)));
        let f = fold(&[1.0, 2.0, 3.0, 4.0], &mut c);
        assert_eq!((f.antisym.clone(), f.sym.clone()), (vec![1.0, 3.0], vec![5.0, 5.0]));
        assert_eq!(f.interleaved_sym(), vec![5.0, 0.0, 5.0, 0.0]);
        assert_eq!(f.interleaved_antisym(), vec![1.0, 0.0, 3.0, 0.0]);
        let f = fold(&[4.0; 5], &mut c);
        assert_eq!((f.antisym.clone(), f.sym.clone()), (vec![0.0; 2], vec![8.0; 2]));
    }

    #[test]
    fn general_examples() {
        for layout in [CascadeLayout::Prefix, CascadeLayout::AllAdder] {
            assert_eq!(general(&[1.0, 2.0, 3.0], 2, layout), vec![6.0, 2.0, 4.0]);
            let g = general(&[1.0, 2.0, 3.0, 4.0], 1, layout);
            assert!((g[1] - 10.0 / 3.0).abs() < 1e-15);
            let g = general(&[3.0, -1.0, 0.0, 1.0, -3.0], 6, layout);
            for a in (0..=6).step_by(2) {
                assert!(g[a].abs() < 1e-14, "a={a} {}", g[a]);
            }
        }
    }

    #[test]
    fn constant_examples() {
        let mut c = OpCounter::new();
        let g = g_vector_constant(5, 1.0, 2, &mut c).values;
        assert_eq!(g[1], 0.0);
        assert_eq!(g[2], 2.5);
        assert_eq!(g[0], 5.0);
        let g = g_vector_constant(4, 1.0, 2, &mut c).values;
        assert!((g[2] - 20.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn binary_examples() {
        let mut c = OpCounter::new();
        let full = g_vector_binary_runs(5, &[Run::new(1, 5)], 1.0, 6, &mut c).unwrap();
        let cst = g_vector_constant(5, 1.0, 6, &mut c);
        assert_close(&full.values, &cst.values, &magnitude(&[1.0; 5], 6), 1e-15);
        let g = g_vector_binary_runs(5, &[Run::new(4, 5)], 1.0, 1, &mut c).unwrap();
        assert_eq!(g.values[1], 1.5);
        let g = g_vector_binary_runs(4, &[Run::new(1, 1)], 1.0, 3, &mut c).unwrap();
        assert_eq!(g.values[3], -1.0);
        assert!(g_vector_binary_runs::<f64>(4, &[Run::new(1, 3), Run::new(2, 4)], 1.0, 3, &mut c).is_err());
        assert!(g_vector_binary_runs::<f64>(4, &[Run::new(1, 5)], 1.0, 3, &mut c).is_err());
    }

    #[test]
    fn binary_path_agrees_with_exact_signed_ranges() {
        // odd N: integer numerators j = i - L - 1 cover contiguous signed ranges
        let n = 11;
        let l = 5i64;
        let runs = [Run::new(2, 4), Run::new(6, 6), Run::new(9, 11)];
        let g = g_vector_binary_runs(n, &runs, 1.0, 8, &mut OpCounter::new()).unwrap();
        for a in 0..=8u32 {
            let num: BigInt = runs
                .iter()
                .map(|r| signed_range_power_sum(r.start as i64 - l - 1, r.end as i64 - l - 1, a))
                .sum();
            let want = f64::from_bigint(&num) / (l as f64).powi(a as i32);
            assert!((g.values[a as usize] - want).abs() <= 1e-15 * want.abs().max(1.0));
        }
    }

    #[test]
    fn unfold_recovers_signal() {
        let mut c = OpCounter::new();
        for f in [vec![1.0, 5.0, 2.0, 7.0], vec![3.0, 1.0, 4.0, 1.0, 5.0]] {
            assert_eq!(fold(&f, &mut c).unfold(), f);
        }
    }

    #[test]
    fn exact_integer_path_matches_real_path() {
        let ints = [3i64, 0, 255, 17, 9, 128, 64];
        let reals: Vec<f64> = ints.iter().map(|&v| v as f64).collect();
        for n in [6, 7] {
            let exact: GVector<f64> =
                g_vector_general_exact(&ints[..n], 10, CascadeLayout::Prefix, &mut OpCounter::new());
            let want = brute(&reals[..n], 10);
            assert_close(&exact.values, &want, &magnitude(&reals[..n], 10), 1e-15);
        }
    }

    #[test]
    fn extended_precision_path() {
        use crate::scalar::DoubleDouble;
        let f: Vec<DoubleDouble> = [1.0, 2.0, 3.0].iter().map(|&v| DoubleDouble::from_f64(v)).collect();
        let g = g_vector_general(&f, 2, CascadeLayout::Prefix, &mut OpCounter::new());
        assert_eq!(g.to_f64().values, vec![6.0, 2.0, 4.0]);
    }

    #[test]
    fn oracle_equivalence_random_signals() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let n = rng.gen_range(2..=65);
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..255.0)).collect();
            let want = brute(&f, 12);
            let scale = magnitude(&f, 12);
            for layout in [CascadeLayout::Prefix, CascadeLayout::AllAdder] {
                assert_close(&general(&f, 12, layout), &want, &scale, 1e-12);
            }
        }
    }

    #[test]
    fn constant_path_consistency() {
        for n in 2..=65 {
            let f = vec![3.5; n];
            let mut c = OpCounter::new();
            let fast = g_vector_constant(n, 3.5, 12, &mut c).values;
            assert_close(&fast, &general(&f, 12, CascadeLayout::Prefix), &magnitude(&f, 12), 1e-12);
        }
    }

    #[test]
    fn stage_one_of_cascade_never_multiplies() {
        let mut c = OpCounter::new();
        general(&[1.0, 7.0, 2.0, 9.0, 4.0, 4.0], 10, CascadeLayout::Prefix);
        g_vector_general(&[1.0, 7.0, 2.0, 9.0, 4.0, 4.0], 10, CascadeLayout::Prefix, &mut c);
        assert_eq!(c.stage(Stage::Cascade).multiplications, 0);
        assert!(c.stage(Stage::Cascade).additions > 0);
        assert_eq!(c.total(), c.stage_sum());
    }

    proptest! {
        #[test]
        fn binary_path_consistency(bits in prop::collection::vec(any::<bool>(), 2..66), level in 1.0f64..255.0) {
            let f: Vec<f64> = bits.iter().map(|&b| if b { level } else { 0.0 }).collect();
            if let SignalClass::BinaryRuns { runs, level } = classify_signal(&f) {
                let fast = g_vector_binary_runs(f.len(), &runs, level, 12, &mut OpCounter::new()).unwrap();
                let scale = magnitude(&f, 12);
                let gen = general(&f, 12, CascadeLayout::Prefix);
                for a in 0..=12 {
                    prop_assert!((fast.values[a] - gen[a]).abs() <= 1e-12 * scale[a].max(f64::MIN_POSITIVE));
                }
            }
        }

        #[test]
        fn parity_law_and_boundedness(half in prop::collection::vec(-50.0f64..50.0, 1..20), mid in -50.0f64..50.0, odd in any::<bool>()) {
            let mut sym: Vec<f64> = half.iter().rev().cloned().collect();
            let mut anti: Vec<f64> = half.iter().rev().map(|v| -v).collect();
            if odd {
                sym.push(mid);
                anti.push(0.0);
            }
            sym.extend(half.iter());
            anti.extend(half.iter());
            let gs = general(&sym, 9, CascadeLayout::Prefix);
            let ga = general(&anti, 9, CascadeLayout::Prefix);
            let total_s: f64 = sym.iter().map(|v| v.abs()).sum();
            let total_a: f64 = anti.iter().map(|v| v.abs()).sum();
            for a in 0..=9 {
                if a % 2 == 1 {
                    prop_assert!(gs[a].abs() <= 1e-12 * total_s.max(1.0));
                } else {
                    prop_assert!(ga[a].abs() <= 1e-12 * total_a.max(1.0));
                }
                prop_assert!(gs[a].abs() <= total_s * (1.0 + 1e-12));
                prop_assert!(ga[a].abs() <= total_a * (1.0 + 1e-12));
            }
        }
    }
}
