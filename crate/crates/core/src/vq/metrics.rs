//! Distance evaluation and codebook distortion.
//!
//! Every squared Euclidean distance computed by this crate goes through
//! [`squared_distance`], which bumps a per-thread counter. Codebook
//! generation never calls it; tests read the counter to check that.

use std::cell::Cell;

use crate::scalar::Scalar;

use super::{Codebook, TrainingSet, VqError};

thread_local! {
    static DISTANCE_EVALUATIONS: Cell<u64> = const { Cell::new(0) };
}

/// Distance evaluations performed on the current thread since the last reset.
pub fn distance_evaluations() -> u64 {
    DISTANCE_EVALUATIONS.with(Cell::get)
}

pub fn reset_distance_counter() {
    DISTANCE_EVALUATIONS.with(|c| c.set(0));
}

pub fn squared_distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    DISTANCE_EVALUATIONS.with(|c| c.set(c.get() + 1));
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

/// Mean squared Euclidean distance between each training vector and the
/// codevector it is assigned to.
pub fn distortion<T: Scalar>(training: &TrainingSet<T>, cb: &Codebook<T>) -> Result<T, VqError> {
    if training.dim() != cb.dim() {
        return Err(VqError::DimensionMismatch {
            expected: cb.dim(),
            actual: training.dim(),
        });
    }
    if training.len() != cb.assignment().len() {
        return Err(VqError::GeometryMismatch(format!(
            "{} training vectors but {} assignments",
            training.len(),
            cb.assignment().len()
        )));
    }
    if training.is_empty() {
        return Ok(T::zero());
    }
    let total = training
        .vectors()
        .iter()
        .zip(cb.assignment())
        .fold(T::zero(), |acc, (v, &c)| {
            acc + squared_distance(&v.values, &cb.codevectors()[c])
        });
    Ok(total / T::from_count(training.len()))
}
