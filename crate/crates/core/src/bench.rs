//! Operation counts and timings for the fast and direct methods.

use std::fmt::Write as _;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::image::Image;
use crate::legendre1d::FastOptions;
use crate::legendre2d::{moments_2d_direct, moments_2d_fast};
use crate::metering::{predict_direct_mults_rect, predict_fast, OpCounter, Parity, Stage};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchMethod {
    Fast,
    Direct,
}

impl BenchMethod {
    pub fn name(self) -> &'static str {
        match self {
            BenchMethod::Fast => "fast",
            BenchMethod::Direct => "direct",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub method: BenchMethod,
    pub n: usize,
    pub order: usize,
    pub adds: u64,
    pub mults: u64,
    pub predicted_adds: f64,
    pub predicted_mults: f64,
    /// 2M(M−1)N for the fast method; equals `predicted_mults` for direct.
    pub predicted_mults_tabulated: f64,
    /// Table-1 convention: one per (pixel, moment) pair for direct, the
    /// seed, recurrence and scaling terms for fast.
    pub mults_normalized: u64,
    /// Median over repetitions, timed with counting switched off.
    pub wall_ns: u128,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
}

fn median(mut v: Vec<u128>) -> u128 {
    v.sort_unstable();
    v[v.len() / 2]
}

/// Runs both methods on every image. Images must be square.
pub fn bench(images: &[Image], order: usize, reps: usize, opts: &FastOptions) -> Result<BenchReport> {
    if reps == 0 {
        return Err(Error::InvalidArgument("repetitions must be at least 1".into()));
    }
    let mut records = Vec::new();
    for img in images {
        if img.width() != img.height() {
            return Err(Error::InvalidArgument(format!("bench needs square images, got {}x{}", img.width(), img.height())));
        }
        let n = img.width();
        for method in [BenchMethod::Fast, BenchMethod::Direct] {
            let run = |c: &mut OpCounter| -> Result<()> {
                match method {
                    BenchMethod::Fast => moments_2d_fast(img, order, opts, c).map(drop),
                    BenchMethod::Direct => moments_2d_direct(img, order, opts.workers, c).map(drop),
                }
            };
            let mut counter = OpCounter::new();
            run(&mut counter)?;
            let times = (0..reps)
                .map(|_| {
                    let t = Instant::now();
                    run(&mut OpCounter::disabled()).map(|_| t.elapsed().as_nanos())
                })
                .collect::<Result<Vec<_>>>()?;
            let total = counter.total();
            let (pa, pm, pt, norm) = match method {
                BenchMethod::Direct => {
                    let d = predict_direct_mults_rect(n as u64, n as u64, order as u64) as f64;
                    (d, d, d, counter.stage(Stage::DirectPair).multiplications)
                }
                BenchMethod::Fast => {
                    let p = predict_fast(n as u64, order as u64, Parity::of(n as u64));
                    let norm = [Stage::Scaling, Stage::Seed, Stage::Recurrence]
                        .iter()
                        .map(|&s| counter.stage(s).multiplications)
                        .sum();
                    (p.additions, p.multiplications, p.multiplications_tabulated, norm)
                }
            };
            records.push(BenchRecord {
                method,
                n,
                order,
                adds: total.additions,
                mults: total.multiplications,
                predicted_adds: pa,
                predicted_mults: pm,
                predicted_mults_tabulated: pt,
                mults_normalized: norm,
                wall_ns: median(times),
            });
        }
    }
    Ok(BenchReport { records })
}

impl BenchReport {
    /// Machine-readable lines, one per record.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# legmoment-bench v1\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "method={} N={} M={} adds={} mults={} predicted_adds={:.0} predicted_mults={:.0} wall_ns={}",
                r.method.name(),
                r.n,
                r.order,
                r.adds,
                r.mults,
                r.predicted_adds,
                r.predicted_mults,
                r.wall_ns
            );
            if r.method == BenchMethod::Fast && r.predicted_mults_tabulated != r.predicted_mults {
                let _ = writeln!(
                    out,
                    "# note N={} M={}: fast mults formula 2NM^2+2M^3/3 = {:.0}, tabulated form 2M(M-1)N = {:.0}",
                    r.n, r.order, r.predicted_mults, r.predicted_mults_tabulated
                );
            }
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<7} {:>5} {:>4} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12} {:>10}\n",
            "method", "N", "M", "adds", "pred adds", "mults", "pred mults", "table1 mult", "pred table1", "ms"
        );
        for r in &self.records {
            let _ = writeln!(
                out,
                "{:<7} {:>5} {:>4} {:>12} {:>12.0} {:>12} {:>12.0} {:>12} {:>12.0} {:>10.3}",
                r.method.name(),
                r.n,
                r.order,
                r.adds,
                r.predicted_adds,
                r.mults,
                r.predicted_mults,
                r.mults_normalized,
                r.predicted_mults_tabulated,
                r.wall_ns as f64 / 1e6
            );
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn report_format() {
        let r = bench(&[synth::random_grey(9, 9, 1)], 4, 3, &FastOptions::default()).unwrap();
        assert_eq!(r.records.len(), 2);
        let text = r.to_text();
        assert!(text.starts_with("# legmoment-bench v1\n"));
        assert!(text.lines().any(|l| l.starts_with("method=direct N=9 M=4 adds=")));
        assert!(text.contains("tabulated form 2M(M-1)N = 216"));
        assert!(r.records[1].mults > r.records[0].mults);
        assert!(bench(&[], 4, 0, &FastOptions::default()).is_err());
        assert!(bench(&[synth::random_grey(9, 8, 1)], 4, 1, &FastOptions::default()).is_err());
    }
}
