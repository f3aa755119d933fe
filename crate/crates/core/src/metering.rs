//! Operation counting and the closed-form complexity model.
//!
//! Every arithmetic loop in the fast and direct paths reports how many scalar
//! additions (subtractions included), multiplications (divisions included) and
//! power evaluations it executed, attributed to a [`Stage`]. Counts are added per
//! loop with the loop's exact trip count, so a disabled counter costs one branch.

use std::fmt;

/// Pipeline stage an operation is attributed to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    /// Splitting a signal into symmetric/antisymmetric halves.
    Fold,
    /// Addition-only accumulation of power sums.
    Cascade,
    /// Change of basis from cascade outputs to power sums.
    Conversion,
    /// Reciprocal powers and per-exponent scaling of power sums.
    Scaling,
    /// Constant and run-length paths built from integer power sums.
    PowerSumLookup,
    /// Seeding L_0(a), L_1(a) from G_N(a).
    Seed,
    /// Three-term recurrence for L_p(a).
    Recurrence,
    /// Evaluating Legendre polynomials on the sampling grid.
    Polynomial,
    /// Direct method: the product with the intensity, one per (pixel, moment) pair.
    DirectPair,
    /// Direct method: everything else (polynomial products, accumulation, normalization).
    DirectOther,
    /// Evaluating the reconstruction sum.
    Reconstruct,
}

impl Stage {
    pub const ALL: [Stage; 11] = [
        Stage::Fold,
        Stage::Cascade,
        Stage::Conversion,
        Stage::Scaling,
        Stage::PowerSumLookup,
        Stage::Seed,
        Stage::Recurrence,
        Stage::Polynomial,
        Stage::DirectPair,
        Stage::DirectOther,
        Stage::Reconstruct,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Fold => "fold",
            Stage::Cascade => "cascade",
            Stage::Conversion => "conversion",
            Stage::Scaling => "scaling",
            Stage::PowerSumLookup => "power-sum-lookup",
            Stage::Seed => "seed",
            Stage::Recurrence => "recurrence",
            Stage::Polynomial => "polynomial",
            Stage::DirectPair => "direct-pair",
            Stage::DirectOther => "direct-other",
            Stage::Reconstruct => "reconstruct",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub additions: u64,
    pub multiplications: u64,
    pub power_evals: u64,
}

impl std::ops::AddAssign for OpCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.additions += rhs.additions;
        self.multiplications += rhs.multiplications;
        self.power_evals += rhs.power_evals;
    }
}

impl std::ops::Add for OpCounts {
    type Output = OpCounts;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl fmt::Display for OpCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "adds={} mults={} pows={}",
            self.additions, self.multiplications, self.power_evals
        )
    }
}

/// Tallies of arithmetic operations, split by stage.
///
/// The global total is kept separately from the stage tallies so that their
/// agreement can be checked rather than assumed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpCounter {
    enabled: bool,
    total: OpCounts,
    stages: [OpCounts; Stage::ALL.len()],
}

impl Default for OpCounter {
    fn default() -> Self {
        Self::new()
    }
}

impl OpCounter {
    pub fn new() -> Self {
        OpCounter {
            enabled: true,
            total: OpCounts::default(),
            stages: [OpCounts::default(); Stage::ALL.len()],
        }
    }

    /// A counter that ignores everything recorded into it.
    pub fn disabled() -> Self {
        OpCounter {
            enabled: false,
            ..Self::new()
        }
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    /// A fresh counter with the same enabled state, for a worker.
    pub fn fork(&self) -> Self {
        if self.enabled {
            Self::new()
        } else {
            Self::disabled()
        }
    }

    #[inline]
    pub fn add(&mut self, stage: Stage, n: u64) {
        if self.enabled {
            self.total.additions += n;
            self.stages[stage.index()].additions += n;
        }
    }

    #[inline]
    pub fn mul(&mut self, stage: Stage, n: u64) {
        if self.enabled {
            self.total.multiplications += n;
            self.stages[stage.index()].multiplications += n;
        }
    }

    #[inline]
    pub fn pow(&mut self, stage: Stage, n: u64) {
        if self.enabled {
            self.total.power_evals += n;
            self.stages[stage.index()].power_evals += n;
        }
    }

    /// Folds a worker's counts into this one.
    pub fn merge(&mut self, other: &OpCounter) {
        if !self.enabled {
            return;
        }
        self.total += other.total;
        for (mine, theirs) in self.stages.iter_mut().zip(other.stages.iter()) {
            *mine += *theirs;
        }
    }

    pub fn total(&self) -> OpCounts {
        self.total
    }

    pub fn stage(&self, stage: Stage) -> OpCounts {
        self.stages[stage.index()]
    }

    pub fn stages(&self) -> impl Iterator<Item = (Stage, OpCounts)> + '_ {
        Stage::ALL.iter().map(move |&s| (s, self.stages[s.index()]))
    }

    /// Sum over stages; equals [`OpCounter::total`] when bookkeeping is consistent.
    pub fn stage_sum(&self) -> OpCounts {
        self.stages
            .iter()
            .fold(OpCounts::default(), |acc, &c| acc + c)
    }
}

/// Which algorithm a complexity estimate describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Direct,
    FastOdd,
    FastEven,
}

impl Method {
    pub fn fast_for(n: u64) -> Method {
        if n % 2 == 1 {
            Method::FastOdd
        } else {
            Method::FastEven
        }
    }
}

/// Closed-form operation-count estimates for an N×N image and maximum order M.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexityModel {
    pub method: Method,
}

/// Predicted additions and multiplications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub additions: f64,
    pub multiplications: f64,
    /// Multiplication estimate 2M(M−1)N, which is the form the published table's
    /// figures follow; differs from `multiplications` for the fast method.
    pub multiplications_tabulated: f64,
}

impl ComplexityModel {
    pub fn new(method: Method) -> Self {
        ComplexityModel { method }
    }

    pub fn predict(&self, n: u64, order: u64) -> Prediction {
        match self.method {
            Method::Direct => {
                let d = predict_direct_mults(n, order) as f64;
                Prediction {
                    additions: d,
                    multiplications: d,
                    multiplications_tabulated: d,
                }
            }
            Method::FastOdd | Method::FastEven => {
                let parity = if self.method == Method::FastOdd {
                    Parity::Odd
                } else {
                    Parity::Even
                };
                let p = predict_fast(n, order, parity);
                Prediction {
                    additions: p.additions,
                    multiplications: p.multiplications,
                    multiplications_tabulated: p.multiplications_tabulated,
                }
            }
        }
    }
}

/// One multiplication per (pixel, moment) pair: N²(M+1)(M+2)/2.
pub fn predict_direct_mults(n: u64, order: u64) -> u64 {
    predict_direct_mults_rect(n, n, order)
}

pub fn predict_direct_mults_rect(nx: u64, ny: u64, order: u64) -> u64 {
    nx * ny * (order + 1) * (order + 2) / 2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(n: u64) -> Parity {
        if n % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastPrediction {
    /// M²N²/2 + M³N/12 (odd N) or M²N² + M³N/6 (even N).
    pub additions: f64,
    /// 2M²N + 2M³/3.
    pub multiplications: f64,
    /// 2M(M−1)N.
    pub multiplications_tabulated: f64,
}

pub fn predict_fast(n: u64, order: u64, parity: Parity) -> FastPrediction {
    let nf = n as f64;
    let m = order as f64;
    let additions = match parity {
        Parity::Odd => m * m * nf * nf / 2.0 + m * m * m * nf / 12.0,
        Parity::Even => m * m * nf * nf + m * m * m * nf / 6.0,
    };
    FastPrediction {
        additions,
        multiplications: 2.0 * m * m * nf + 2.0 * m * m * m / 3.0,
        multiplications_tabulated: (2 * order * order.saturating_sub(1) * n) as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_counts_match_published_table() {
        assert_eq!(predict_direct_mults(256, 40), 56_426_496);
        assert_eq!(predict_direct_mults(255, 40), 55_986_525);
        assert_eq!(predict_direct_mults(2, 0), 4);
    }

    #[test]
    fn fast_estimates() {
        let even = predict_fast(256, 40, Parity::Even);
        assert_eq!(even.multiplications_tabulated, 798_720.0);
        assert!((even.multiplications - 861_866.666_666_666_6).abs() < 1e-6);
        assert!((even.additions - 107_588_266.666_666_67).abs() < 1e-4);

        let odd = predict_fast(255, 40, Parity::Odd);
        assert_eq!(odd.additions, 53_380_000.0);
        assert_eq!(odd.multiplications_tabulated, 795_600.0);
    }

    #[test]
    fn stage_totals_are_conserved() {
        let mut c = OpCounter::new();
        c.add(Stage::Cascade, 10);
        c.mul(Stage::Conversion, 3);
        c.pow(Stage::Scaling, 2);
        let mut other = OpCounter::new();
        other.add(Stage::Fold, 4);
        c.merge(&other);
        assert_eq!(c.total(), c.stage_sum());
        assert_eq!(c.total().additions, 14);
        assert_eq!(c.stage(Stage::Cascade).multiplications, 0);
    }

    #[test]
    fn disabled_counter_records_nothing() {
        let mut c = OpCounter::disabled();
        c.add(Stage::Cascade, 10);
        c.mul(Stage::DirectPair, 10);
        assert_eq!(c.total(), OpCounts::default());
        assert!(!c.fork().is_enabled());
    }

    #[test]
    fn model_dispatches_on_method() {
        let d = ComplexityModel::new(Method::Direct).predict(256, 40);
        assert_eq!(d.multiplications, 56_426_496.0);
        let f = ComplexityModel::new(Method::fast_for(255)).predict(255, 40);
        assert_eq!(f.additions, 53_380_000.0);
    }
}
