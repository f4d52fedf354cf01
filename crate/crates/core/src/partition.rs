//! Partitions with zeroes and the discrete invariants of a nilpotent operator.
//!
//! For a nilpotent `N` with Jordan block sizes `d_1 >= ... >= d_r >= 0`
//! (padded with zeroes to the lattice rank `r`) and `N^m = 0`, the dual
//! partition `c` of length `m` has `c_i = #{j : d_j >= i}` and
//! `dim Ker N^i = c_1 + ... + c_i`. The invariants are `k_i = c_{i-1} - c_i`
//! for `i = 1..=m+1`, with `c_0 = r` and `c_{m+1} = 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("parts {0:?} are not weakly decreasing")]
    NotDecreasing(Vec<usize>),
    #[error("target length {target} is smaller than the largest part {largest}")]
    LengthTooSmall { target: usize, largest: usize },
    #[error("nilpotency degree {m} is smaller than the largest Jordan block {largest}")]
    NilpotencyTooSmall { m: usize, largest: usize },
    #[error("nilpotency degree must be at least 1")]
    ZeroDegree,
}

/// `d_1 >= d_2 >= ... >= d_len >= 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PartitionWithZeroes {
    parts: Vec<usize>,
}

impl TryFrom<Vec<usize>> for PartitionWithZeroes {
    type Error = PartitionError;

    fn try_from(parts: Vec<usize>) -> Result<Self, Self::Error> {
        Self::new(parts)
    }
}

impl From<PartitionWithZeroes> for Vec<usize> {
    fn from(p: PartitionWithZeroes) -> Self {
        p.parts
    }
}

impl PartitionWithZeroes {
    pub fn new(parts: Vec<usize>) -> Result<Self, PartitionError> {
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(PartitionError::NotDecreasing(parts));
        }
        Ok(PartitionWithZeroes { parts })
    }

    pub fn zeroes(len: usize) -> Self {
        PartitionWithZeroes {
            parts: vec![0; len],
        }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `d_i`, 1-indexed; 0 past the declared length.
    pub fn part(&self, i: usize) -> usize {
        assert!(i >= 1, "parts are 1-indexed");
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn largest(&self) -> usize {
        self.parts.first().copied().unwrap_or(0)
    }

    pub fn sum(&self) -> usize {
        self.parts.iter().sum()
    }

    /// Number of nonzero parts.
    pub fn nonzero_parts(&self) -> usize {
        self.parts.iter().filter(|&&d| d > 0).count()
    }
}

/// The dual partition with zeroes of length `target_length`:
/// `result_i = #{j : p_j >= i}`.
pub fn dual_partition(
    p: &PartitionWithZeroes,
    target_length: usize,
) -> Result<PartitionWithZeroes, PartitionError> {
    if target_length < p.largest() {
        return Err(PartitionError::LengthTooSmall {
            target: target_length,
            largest: p.largest(),
        });
    }
    let parts = (1..=target_length)
        .map(|i| p.parts.iter().filter(|&&d| d >= i).count())
        .collect();
    Ok(PartitionWithZeroes { parts })
}

/// Discrete invariants of `(V, N)` relative to a lattice of rank `r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JordanData {
    m: usize,
    r: usize,
    n: usize,
    d: PartitionWithZeroes,
    c: PartitionWithZeroes,
    /// `k_1, ..., k_{m+1}` (stored 0-based).
    k: Vec<usize>,
}

impl JordanData {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> &PartitionWithZeroes {
        &self.d
    }

    pub fn c(&self) -> &PartitionWithZeroes {
        &self.c
    }

    /// `k_i` for `1 <= i <= m+1`.
    pub fn k(&self, i: usize) -> usize {
        assert!((1..=self.m + 1).contains(&i), "k_{i} out of range");
        self.k[i - 1]
    }

    /// `(k_1, ..., k_{m+1})`.
    pub fn shape(&self) -> &[usize] {
        &self.k
    }

    /// The Jordan data whose invariants are `shape = (k_1, ..., k_{m+1})`.
    pub fn from_shape(shape: &[usize]) -> Result<Self, PartitionError> {
        if shape.len() < 2 {
            return Err(PartitionError::ZeroDegree);
        }
        let m = shape.len() - 1;
        let r: usize = shape.iter().sum();
        let mut c = Vec::with_capacity(m);
        let mut prev = r;
        for &ki in &shape[..m] {
            prev -= ki;
            c.push(prev);
        }
        let c = PartitionWithZeroes::new(c)?;
        let d = dual_partition(&c, r)?;
        jordan_data(&d, m)
    }
}

/// Computes `c`, `k` and `n` from the Jordan partition `d` (of length `r`).
pub fn jordan_data(d: &PartitionWithZeroes, m: usize) -> Result<JordanData, PartitionError> {
    if m == 0 {
        return Err(PartitionError::ZeroDegree);
    }
    if d.largest() > m {
        return Err(PartitionError::NilpotencyTooSmall {
            m,
            largest: d.largest(),
        });
    }
    let r = d.len();
    let c = dual_partition(d, m)?;
    let c_at = |i: usize| -> usize {
        match i {
            0 => r,
            i if i > m => 0,
            i => c.part(i),
        }
    };
    let k = (1..=m + 1).map(|i| c_at(i - 1) - c_at(i)).collect();
    Ok(JordanData {
        m,
        r,
        n: d.sum(),
        d: d.clone(),
        c,
        k,
    })
}

/// Jordan data of the `m`-dual: `d'_i = m - d_{r+1-i}`.
pub fn dual_jordan_data(jd: &JordanData) -> JordanData {
    let r = jd.r;
    let parts = (1..=r).map(|i| jd.m - jd.d.part(r + 1 - i)).collect();
    let d = PartitionWithZeroes::new(parts).expect("reversed complement is decreasing");
    jordan_data(&d, jd.m).expect("dual parts are bounded by m")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn part(v: &[usize]) -> PartitionWithZeroes {
        PartitionWithZeroes::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dual_examples() {
        assert_eq!(dual_partition(&part(&[2, 1, 0]), 2).unwrap(), part(&[2, 1]));
        assert_eq!(dual_partition(&part(&[0, 0, 0]), 4).unwrap(), part(&[0, 0, 0, 0]));
        assert_eq!(
            dual_partition(&part(&[3, 1]), 2),
            Err(PartitionError::LengthTooSmall {
                target: 2,
                largest: 3
            })
        );
        assert!(PartitionWithZeroes::new(vec![1, 2]).is_err());
    }

    #[test]
    fn jordan_examples() {
        let jd = jordan_data(&part(&[2, 1, 0]), 2).unwrap();
        assert_eq!(jd.c(), &part(&[2, 1]));
        assert_eq!(jd.shape(), &[1, 1, 1]);
        assert_eq!(jd.n(), 3);

        let jd = jordan_data(&part(&[3, 3]), 3).unwrap();
        assert_eq!(jd.c(), &part(&[2, 2, 2]));
        assert_eq!(jd.shape(), &[0, 0, 0, 2]);
        assert_eq!(jd.n(), 6);

        assert_eq!(
            jordan_data(&part(&[3]), 2),
            Err(PartitionError::NilpotencyTooSmall { m: 2, largest: 3 })
        );
    }

    #[test]
    fn m_one_gives_signature() {
        // N = 0 on an n-dimensional space, lattice rank r: (k_1, k_2) = (r - n, n)
        for r in 1..6 {
            for n in 0..=r {
                let mut d = vec![1; n];
                d.resize(r, 0);
                let jd = jordan_data(&part(&d), 1).unwrap();
                assert_eq!(jd.shape(), &[r - n, n]);
            }
        }
    }

    #[test]
    fn dual_jordan_examples() {
        let jd = jordan_data(&part(&[2, 1, 0]), 2).unwrap();
        let dual = dual_jordan_data(&jd);
        assert_eq!(dual.d(), &part(&[2, 1, 0]));
        assert_eq!(dual.shape(), &[1, 1, 1]);

        let jd = jordan_data(&part(&[1, 0]), 1).unwrap();
        let dual = dual_jordan_data(&jd);
        assert_eq!(dual.d(), &part(&[1, 0]));
        assert_eq!(dual.n(), 1);
    }

    #[test]
    fn shape_round_trip() {
        let jd = jordan_data(&part(&[3, 1, 1, 0]), 3).unwrap();
        assert_eq!(JordanData::from_shape(jd.shape()).unwrap(), jd);
    }

    fn arb_jordan() -> impl Strategy<Value = (PartitionWithZeroes, usize)> {
        (1usize..=8, 1usize..=10).prop_flat_map(|(m, r)| {
            prop::collection::vec(0..=m, r).prop_map(move |mut v| {
                v.sort_unstable_by(|a, b| b.cmp(a));
                (PartitionWithZeroes::new(v).unwrap(), m)
            })
        })
    }

    proptest! {
        #[test]
        fn invariants_hold((d, m) in arb_jordan()) {
            let jd = jordan_data(&d, m).unwrap();
            let r = d.len();
            prop_assert_eq!(jd.shape().iter().sum::<usize>(), r);
            let n: usize = (1..=m).map(|i| i * jd.k(i + 1)).sum();
            prop_assert_eq!(n, jd.n());
            prop_assert_eq!(JordanData::from_shape(jd.shape()).unwrap(), jd);
        }

        #[test]
        fn dual_reverses_k((d, m) in arb_jordan()) {
            let jd = jordan_data(&d, m).unwrap();
            let dual = dual_jordan_data(&jd);
            for i in 1..=m + 1 {
                prop_assert_eq!(dual.k(i), jd.k(m + 2 - i));
            }
            for i in 1..=m {
                prop_assert_eq!(dual.c().part(i), jd.r() - jd.c().part(m + 1 - i));
            }
            prop_assert_eq!(jd.n() + dual.n(), m * jd.r());
            prop_assert_eq!(dual_jordan_data(&dual), jd);
        }

        #[test]
        fn dual_partition_is_involutive((d, m) in arb_jordan()) {
            let c = dual_partition(&d, m).unwrap();
            prop_assert_eq!(dual_partition(&c, d.len()).unwrap(), d);
        }
    }
}
