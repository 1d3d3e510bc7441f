//! Shubert's sawtooth method for Lipschitz functions of one variable.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{checked_eval, MinimizeOptions, OptResult, Termination};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
struct Interval {
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    bound: f64,
    seq: usize,
}

impl Interval {
    fn new(a: f64, fa: f64, b: f64, fb: f64, lipschitz: f64, seq: usize) -> Self {
        // The two cones through the endpoints meet at this value; clamp to the
        // endpoint values so an underestimated constant cannot make the gap negative.
        let bound = (0.5 * (fa + fb) - 0.5 * lipschitz * (b - a)).min(fa).min(fb);
        Interval {
            a,
            fa,
            b,
            fb,
            bound,
            seq,
        }
    }

    fn probe(&self, lipschitz: f64) -> f64 {
        let mid = 0.5 * (self.a + self.b);
        if lipschitz == 0.0 {
            return mid;
        }
        (mid + (self.fa - self.fb) / (2.0 * lipschitz)).clamp(self.a, self.b)
    }
}

impl PartialEq for Interval {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Interval {}

impl PartialOrd for Interval {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Interval {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Minimises a scalar function with Lipschitz constant `lipschitz` on
/// `[lo, hi]`. Both endpoints are evaluated first; each further sample goes to
/// the lowest point of the sawtooth lower envelope.
pub fn shubert_minimize_1d<F>(
    mut objective: F,
    lo: f64,
    hi: f64,
    lipschitz: f64,
    opts: MinimizeOptions,
) -> Result<OptResult>
where
    F: FnMut(f64) -> f64,
{
    super::check_box(&[lo], &[hi])?;
    if !(lipschitz.is_finite() && lipschitz >= 0.0) {
        return Err(Error::invalid(format!(
            "Lipschitz constant must be finite and nonnegative, got {lipschitz}"
        )));
    }
    opts.validate()?;
    let mut eval = |x: f64| checked_eval(&mut |p: &[f64]| objective(p[0]), &[x]);

    let f_lo = eval(lo)?;
    if lo == hi || opts.budget == 1 {
        let lower = (f_lo - lipschitz * (hi - lo)).min(f_lo);
        return Ok(OptResult {
            argmin: vec![lo],
            min_value: f_lo,
            lower_bound: lower,
            evals: 1,
            gap: f_lo - lower,
            termination: if lo == hi {
                Termination::Gap
            } else {
                Termination::Budget
            },
        });
    }
    let f_hi = eval(hi)?;
    let mut evals = 2;
    let (mut argmin, mut incumbent) = if f_hi < f_lo { (hi, f_hi) } else { (lo, f_lo) };

    let mut heap = BinaryHeap::new();
    heap.push(Interval::new(lo, f_lo, hi, f_hi, lipschitz, 0));
    let mut seq = 1;
    let mut lower = f64::NEG_INFINITY;

    let termination = loop {
        lower = lower.max(heap.peek().expect("nonempty").bound);
        if incumbent - lower <= opts.tol {
            break Termination::Gap;
        }
        if evals >= opts.budget {
            break Termination::Budget;
        }
        let iv = heap.pop().expect("nonempty");
        let x = iv.probe(lipschitz);
        let fx = eval(x)?;
        evals += 1;
        if fx < incumbent {
            incumbent = fx;
            argmin = x;
        }
        heap.push(Interval::new(iv.a, iv.fa, x, fx, lipschitz, seq));
        heap.push(Interval::new(x, fx, iv.b, iv.fb, lipschitz, seq + 1));
        seq += 2;
    };

    Ok(OptResult {
        argmin: vec![argmin],
        min_value: incumbent,
        lower_bound: lower,
        evals,
        gap: incumbent - lower,
        termination,
    })
}
