use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Partition of a target dataset's rows into a labeled set and an unlabeled
/// pool. `labeled` keeps acquisition order; `pool` stays ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoolState {
    labeled: Vec<usize>,
    pool: Vec<usize>,
}

impl PoolState {
    /// Draws `n_initial` of `n_rows` indices uniformly without replacement
    /// (see [`SeededRng::sample_indices`]); the initial labeled set is sorted.
    pub fn init(n_rows: usize, n_initial: usize, seed: u64) -> Result<Self> {
        if n_initial > n_rows {
            return Err(Error::InvalidArgument(format!(
                "initial labeled size {n_initial} exceeds dataset size {n_rows}"
            )));
        }
        let mut rng = SeededRng::new(seed);
        let mut labeled = rng.sample_indices(n_rows, n_initial);
        labeled.sort_unstable();
        let mut taken = vec![false; n_rows];
        for &i in &labeled {
            taken[i] = true;
        }
        let pool = (0..n_rows).filter(|&i| !taken[i]).collect();
        Ok(Self { labeled, pool })
    }

    pub fn labeled(&self) -> &[usize] {
        &self.labeled
    }

    pub fn pool(&self) -> &[usize] {
        &self.pool
    }

    pub fn total(&self) -> usize {
        self.labeled.len() + self.pool.len()
    }

    /// Moves the sample at `position` of the pool into the labeled set and
    /// returns its row index.
    pub fn query(&mut self, position: usize) -> Result<usize> {
        if position >= self.pool.len() {
            return Err(Error::InvalidArgument(format!(
                "pool position {position} out of range for pool of {}",
                self.pool.len()
            )));
        }
        let idx = self.pool.remove(position);
        self.labeled.push(idx);
        Ok(idx)
    }
}
