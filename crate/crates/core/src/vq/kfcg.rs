//! KFCG fast codebook generation.
//!
//! Generation starts from a single cluster holding every training vector,
//! represented by its centroid. Iteration `t` (1-based) splits each cluster on
//! component `d = (t - 1) mod k`: a member goes to the lower child when its
//! `d`-th component is strictly below the centroid's, otherwise to the upper
//! child. Centroids of the children are recomputed once the iteration is done.
//!
//! Only component comparisons and centroid sums are performed. In particular
//! no distance between vectors is ever evaluated, which the distance counter
//! in [`super::metrics`] lets callers confirm.
//!
//! A split that would leave one child empty is abandoned and counted; the
//! cluster carries over unchanged. When splitting every cluster in an
//! iteration would overshoot the target, clusters are split in index order
//! until the target is met and the rest are left as they are. Generation also
//! stops once `k` consecutive iterations fail to split anything, since the
//! same comparisons would then repeat forever.

use crate::scalar::Scalar;

use super::{TrainingSet, VqError};

/// One successful binary split.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRecord<T> {
    /// 1-based iteration in which the split happened.
    pub iteration: usize,
    /// 0-based component compared.
    pub dimension: usize,
    /// Cluster index before the iteration.
    pub parent: usize,
    /// The parent centroid's component used as the threshold.
    pub threshold: T,
    /// Index of the lower child after the iteration; the upper child is `lower + 1`.
    pub lower: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<T> {
    dim: usize,
    codevectors: Vec<Vec<T>>,
    assignment: Vec<usize>,
    requested: usize,
    iterations: usize,
    empty_children: usize,
    splits: Vec<SplitRecord<T>>,
}

impl<T: Scalar> Codebook<T> {
    /// Codebook from explicit parts, e.g. one loaded from disk.
    pub fn from_parts(
        dim: usize,
        codevectors: Vec<Vec<T>>,
        assignment: Vec<usize>,
    ) -> Result<Self, VqError> {
        if dim == 0 {
            return Err(VqError::ZeroDimension);
        }
        if let Some(bad) = codevectors.iter().find(|c| c.len() != dim) {
            return Err(VqError::DimensionMismatch {
                expected: dim,
                actual: bad.len(),
            });
        }
        if let Some(&bad) = assignment.iter().find(|&&a| a >= codevectors.len()) {
            return Err(VqError::AssignmentOutOfRange {
                index: bad,
                size: codevectors.len(),
            });
        }
        Ok(Self {
            dim,
            requested: codevectors.len(),
            codevectors,
            assignment,
            iterations: 0,
            empty_children: 0,
            splits: Vec::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.codevectors.len()
    }

    pub fn codevectors(&self) -> &[Vec<T>] {
        &self.codevectors
    }

    /// Cluster index of every training vector, in training order.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// Target size the codebook was generated for.
    pub fn requested(&self) -> usize {
        self.requested
    }

    /// How many codevectors short of the request generation ended.
    pub fn shortfall(&self) -> usize {
        self.requested.saturating_sub(self.size())
    }

    /// Number of split iterations executed.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// Split attempts abandoned because one child came out empty.
    pub fn empty_children(&self) -> usize {
        self.empty_children
    }

    pub fn splits(&self) -> &[SplitRecord<T>] {
        &self.splits
    }

    /// Members of each cluster, by ascending training index.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.size()];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }

    /// Re-derives the assignment of `training` from the recorded split history.
    pub fn replay(&self, training: &TrainingSet<T>) -> Vec<usize> {
        let mut assignment = vec![0usize; training.len()];
        let mut clusters = 1usize;
        for iteration in 1..=self.iterations {
            let splits: Vec<&SplitRecord<T>> =
                self.splits.iter().filter(|s| s.iteration == iteration).collect();
            if splits.is_empty() {
                continue;
            }
            // old index -> (new index, optional split)
            let mut remap = Vec::with_capacity(clusters);
            let mut next = 0usize;
            for c in 0..clusters {
                match splits.iter().find(|s| s.parent == c) {
                    Some(s) => {
                        remap.push((next, Some(*s)));
                        next += 2;
                    }
                    None => {
                        remap.push((next, None));
                        next += 1;
                    }
                }
            }
            for (i, a) in assignment.iter_mut().enumerate() {
                let (base, split) = remap[*a];
                *a = match split {
                    Some(s) if training.component(i, s.dimension) >= s.threshold => base + 1,
                    _ => base,
                };
            }
            clusters = next;
        }
        assignment
    }
}

/// Arithmetic mean of the given training vectors, summed in index order.
pub(crate) fn centroid<T: Scalar>(training: &TrainingSet<T>, members: &[usize]) -> Vec<T> {
    let mut sum = vec![T::zero(); training.dim()];
    for &i in members {
        for (s, &v) in sum.iter_mut().zip(&training.vectors()[i].values) {
            *s = *s + v;
        }
    }
    let n = T::from_count(members.len());
    sum.into_iter().map(|s| s / n).collect()
}

struct Cluster<T> {
    members: Vec<usize>,
    centroid: Vec<T>,
}

pub fn kfcg_codebook<T: Scalar>(
    training: &TrainingSet<T>,
    target_size: usize,
) -> Result<Codebook<T>, VqError> {
    if training.is_empty() {
        return Err(VqError::EmptyTrainingSet);
    }
    if target_size == 0 {
        return Err(VqError::ZeroTarget);
    }
    let k = training.dim();
    let all: Vec<usize> = (0..training.len()).collect();
    let mut clusters = vec![Cluster {
        centroid: centroid(training, &all),
        members: all,
    }];
    let mut splits = Vec::new();
    let mut empty_children = 0usize;
    let mut iterations = 0usize;
    let mut idle = 0usize;

    while clusters.len() < target_size && idle < k {
        iterations += 1;
        let dimension = (iterations - 1) % k;
        let mut count = clusters.len();
        let mut next: Vec<Cluster<T>> = Vec::with_capacity(clusters.len() * 2);
        let mut split_any = false;

        for (parent, cluster) in clusters.into_iter().enumerate() {
            if count >= target_size {
                next.push(cluster);
                continue;
            }
            let threshold = cluster.centroid[dimension];
            let (lower, upper): (Vec<usize>, Vec<usize>) = cluster
                .members
                .iter()
                .partition(|&&i| training.component(i, dimension) < threshold);
            if lower.is_empty() || upper.is_empty() {
                empty_children += 1;
                next.push(cluster);
                continue;
            }
            splits.push(SplitRecord {
                iteration: iterations,
                dimension,
                parent,
                threshold,
                lower: next.len(),
            });
            next.push(Cluster {
                centroid: centroid(training, &lower),
                members: lower,
            });
            next.push(Cluster {
                centroid: centroid(training, &upper),
                members: upper,
            });
            count += 1;
            split_any = true;
        }

        clusters = next;
        idle = if split_any { 0 } else { idle + 1 };
    }

    if clusters.len() < target_size {
        log::debug!(
            "kfcg produced {} of {} requested codevectors",
            clusters.len(),
            target_size
        );
    }

    let mut assignment = vec![0usize; training.len()];
    for (c, cluster) in clusters.iter().enumerate() {
        for &i in &cluster.members {
            assignment[i] = c;
        }
    }
    Ok(Codebook {
        dim: k,
        codevectors: clusters.into_iter().map(|c| c.centroid).collect(),
        assignment,
        requested: target_size,
        iterations,
        empty_children,
        splits,
    })
}

/// Result of clustering a codebook's own codevectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Requantization<T> {
    /// Super-cluster index for every codevector of the source codebook.
    pub mapping: Vec<usize>,
    /// The codebook of super-cluster centroids over the source codevectors.
    pub codebook: Codebook<T>,
}

impl<T: Scalar> Requantization<T> {
    pub fn num_super_clusters(&self) -> usize {
        self.codebook.size()
    }

    /// Super-cluster of every training vector behind `source`.
    pub fn compose(&self, source: &Codebook<T>) -> Vec<usize> {
        source.assignment().iter().map(|&c| self.mapping[c]).collect()
    }
}

/// Groups a codebook's codevectors into `target` super-clusters with the same
/// generator.
pub fn requantize_codebook<T: Scalar>(
    cb: &Codebook<T>,
    target: usize,
) -> Result<Requantization<T>, VqError> {
    if target == 0 {
        return Err(VqError::ZeroTarget);
    }
    if target > cb.size() {
        return Err(VqError::TargetExceedsCodebook {
            target,
            size: cb.size(),
        });
    }
    let training = TrainingSet::from_vectors(cb.dim(), cb.codevectors().to_vec())?;
    let codebook = kfcg_codebook(&training, target)?;
    Ok(Requantization {
        mapping: codebook.assignment().to_vec(),
        codebook,
    })
}
