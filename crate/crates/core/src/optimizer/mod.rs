//! Certified global minimisation of Hölder-continuous functions on a box.
//!
//! The domain is kept as an exact partition into hyperrectangles, each holding
//! one evaluated anchor point. With Hölder constant `L` and exponent `p`, a
//! rectangle whose anchor has value `f_j` and sits at max-norm distance at most
//! `D_j` from every point of the rectangle cannot contain values below
//! `f_j − L D_j^p`. The minimum of these scores is a lower bound on the global
//! minimum; the rectangle attaining it is refined next.

pub mod holder;
mod shubert;

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use shubert::shubert_minimize_1d;

#[derive(Debug, Clone, PartialEq)]
pub struct HyperRect {
    lo: Vec<f64>,
    hi: Vec<f64>,
    anchor: Vec<f64>,
    anchor_value: f64,
}

impl HyperRect {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>, anchor: Vec<f64>, anchor_value: f64) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() || lo.len() != anchor.len() {
            return Err(Error::invalid(format!(
                "rectangle bounds and anchor must share a positive dimension (got {}, {}, {})",
                lo.len(),
                hi.len(),
                anchor.len()
            )));
        }
        let ordered = lo.iter().zip(&hi).zip(&anchor).all(|((l, h), a)| l <= a && a <= h);
        if !ordered {
            return Err(Error::invalid("rectangle needs lo <= anchor <= hi componentwise"));
        }
        Ok(HyperRect {
            lo,
            hi,
            anchor,
            anchor_value,
        })
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn anchor_value(&self) -> f64 {
        self.anchor_value
    }

    /// Largest max-norm distance from the anchor to the rectangle's boundary.
    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .zip(&self.anchor)
            .fold(0.0, |acc, ((l, h), a)| acc.max(a - l).max(h - a))
    }

    fn score(&self, spec: &HolderSpec) -> f64 {
        self.anchor_value - spec.radius(self.diameter())
    }

    /// Splits across the longest side at its midpoint. Returns the piece
    /// keeping the anchor and the empty piece, whose centroid is the next
    /// sample location. An anchor lying on the cut stays with the lower piece.
    fn split(self) -> (HyperRect, Vec<f64>, Vec<f64>) {
        let axis = (0..self.lo.len())
            .fold((0, f64::NEG_INFINITY), |(best, w), k| {
                let wk = self.hi[k] - self.lo[k];
                if wk > w {
                    (k, wk)
                } else {
                    (best, w)
                }
            })
            .0;
        let mid = 0.5 * (self.lo[axis] + self.hi[axis]);
        let mut kept = self;
        let mut empty_lo = kept.lo.clone();
        let mut empty_hi = kept.hi.clone();
        if kept.anchor[axis] <= mid {
            kept.hi[axis] = mid;
            empty_lo[axis] = mid;
        } else {
            kept.lo[axis] = mid;
            empty_hi[axis] = mid;
        }
        (kept, empty_lo, empty_hi)
    }
}

/// Free-function form of [`HyperRect::diameter`].
pub fn rect_diameter(r: &HyperRect) -> f64 {
    r.diameter()
}

/// Hölder constant `L` and exponent `p ∈ (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderSpec {
    pub constant: f64,
    pub exponent: f64,
}

impl HolderSpec {
    pub fn new(constant: f64, exponent: f64) -> Result<Self> {
        let spec = HolderSpec { constant, exponent };
        spec.validate()?;
        Ok(spec)
    }

    pub fn lipschitz(constant: f64) -> Result<Self> {
        HolderSpec::new(constant, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.constant.is_finite() && self.constant >= 0.0) {
            return Err(Error::invalid(format!(
                "Hölder constant must be finite and nonnegative, got {}",
                self.constant
            )));
        }
        if !(self.exponent > 0.0 && self.exponent <= 1.0) {
            return Err(Error::invalid(format!(
                "Hölder exponent must lie in (0, 1], got {}",
                self.exponent
            )));
        }
        Ok(())
    }

    /// `L r^p`.
    #[inline]
    pub fn radius(&self, r: f64) -> f64 {
        if self.exponent == 1.0 {
            self.constant * r
        } else {
            self.constant * r.powf(self.exponent)
        }
    }
}

/// Certified bounds `(min_j f_j − L D_j^p, max_j f_j + L D_j^p)` on the
/// minimum and maximum of a function over the union of `rects`.
pub fn batch_bounds(rects: &[HyperRect], spec: &HolderSpec) -> Result<(f64, f64)> {
    spec.validate()?;
    if rects.is_empty() {
        return Err(Error::invalid("batch bounds need at least one rectangle"));
    }
    Ok(rects
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lower, upper), r| {
            let slack = spec.radius(r.diameter());
            (lower.min(r.anchor_value - slack), upper.max(r.anchor_value + slack))
        }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The certified gap fell to the tolerance.
    Gap,
    /// The evaluation budget ran out first.
    Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub argmin: Vec<f64>,
    pub min_value: f64,
    /// Certified lower bound on the global minimum.
    pub lower_bound: f64,
    pub evals: usize,
    pub gap: f64,
    pub termination: Termination,
}

/// One line of an optimiser trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub evals: usize,
    pub incumbent: f64,
    pub lower_bound: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeOptions {
    /// Maximum number of objective evaluations.
    pub budget: usize,
    /// Target value for `min_value − lower_bound`.
    pub tol: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        MinimizeOptions {
            budget: 2000,
            tol: 1e-3,
        }
    }
}

impl MinimizeOptions {
    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::invalid("evaluation budget must be at least 1"));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(Error::invalid(format!(
                "tolerance must be finite and nonnegative, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

pub(crate) fn check_box(lo: &[f64], hi: &[f64]) -> Result<()> {
    if lo.is_empty() || lo.len() != hi.len() {
        return Err(Error::invalid(format!(
            "box bounds must share a positive dimension (got {} and {})",
            lo.len(),
            hi.len()
        )));
    }
    if lo.iter().chain(hi).any(|v| !v.is_finite()) {
        return Err(Error::invalid("box bounds must be finite"));
    }
    if lo.iter().zip(hi).any(|(l, h)| l > h) {
        return Err(Error::invalid("box needs lo <= hi componentwise"));
    }
    Ok(())
}

pub(crate) fn checked_eval<F: FnMut(&[f64]) -> f64>(objective: &mut F, x: &[f64]) -> Result<f64> {
    let value = objective(x);
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFiniteObjective {
            point: x.to_vec(),
            value,
        })
    }
}

/// Heap entry ordered so that the lowest score, then the oldest rectangle,
/// is popped first.
#[derive(Debug, Clone, Copy)]
struct Candidate {
    score: f64,
    seq: usize,
    slot: usize,
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .score
            .total_cmp(&self.score)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Minimises `objective` over the box `[lo, hi]`.
///
/// Terminates when the certified gap is at most `opts.tol` or after
/// `opts.budget` evaluations, whichever comes first.
pub fn minimize<F>(objective: F, lo: &[f64], hi: &[f64], spec: HolderSpec, opts: MinimizeOptions) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> f64,
{
    minimize_traced(objective, lo, hi, spec, opts, |_| {})
}

/// [`minimize`] reporting a [`TraceRecord`] after every evaluation.
pub fn minimize_traced<F, T>(
    mut objective: F,
    lo: &[f64],
    hi: &[f64],
    spec: HolderSpec,
    opts: MinimizeOptions,
    mut trace: T,
) -> Result<OptResult>
where
    F: FnMut(&[f64]) -> f64,
    T: FnMut(&TraceRecord),
{
    check_box(lo, hi)?;
    spec.validate()?;
    opts.validate()?;

    let centroid: Vec<f64> = lo.iter().zip(hi).map(|(l, h)| 0.5 * (l + h)).collect();
    let first = checked_eval(&mut objective, &centroid)?;
    let root = HyperRect {
        lo: lo.to_vec(),
        hi: hi.to_vec(),
        anchor: centroid.clone(),
        anchor_value: first,
    };

    let mut heap = BinaryHeap::new();
    heap.push(Candidate {
        score: root.score(&spec),
        seq: 0,
        slot: 0,
    });
    let mut rects = vec![Some(root)];
    let mut next_seq = 1;

    let mut argmin = centroid;
    let mut incumbent = first;
    let mut lower = heap.peek().map_or(first, |c| c.score);
    let mut evals = 1;
    let mut iteration = 0;
    trace(&TraceRecord {
        iteration,
        evals,
        incumbent,
        lower_bound: lower,
        gap: incumbent - lower,
    });

    let termination = loop {
        if incumbent - lower <= opts.tol {
            break Termination::Gap;
        }
        if evals >= opts.budget {
            break Termination::Budget;
        }
        let Candidate { slot, .. } = heap.pop().expect("partition is never empty");
        let chosen = rects[slot].take().expect("each slot is queued once");
        let (kept, empty_lo, empty_hi) = chosen.split();

        let point: Vec<f64> = empty_lo.iter().zip(&empty_hi).map(|(l, h)| 0.5 * (l + h)).collect();
        let value = checked_eval(&mut objective, &point)?;
        evals += 1;
        iteration += 1;
        if value < incumbent {
            incumbent = value;
            argmin.clone_from(&point);
        }

        let fresh = HyperRect {
            lo: empty_lo,
            hi: empty_hi,
            anchor: point,
            anchor_value: value,
        };
        heap.push(Candidate {
            score: kept.score(&spec),
            seq: next_seq,
            slot,
        });
        heap.push(Candidate {
            score: fresh.score(&spec),
            seq: next_seq + 1,
            slot: rects.len(),
        });
        next_seq += 2;
        rects[slot] = Some(kept);
        rects.push(Some(fresh));

        // Every partition yields a valid bound, so keep the best one seen.
        let partition_bound = heap.peek().map_or(lower, |c| c.score);
        lower = lower.max(partition_bound);
        trace(&TraceRecord {
            iteration,
            evals,
            incumbent,
            lower_bound: lower,
            gap: incumbent - lower,
        });
    };

    Ok(OptResult {
        argmin,
        min_value: incumbent,
        lower_bound: lower,
        evals,
        gap: incumbent - lower,
        termination,
    })
}
