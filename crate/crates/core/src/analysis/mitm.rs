//! Meet-in-the-middle subset-sum solver.

use crate::exec::Execution;

/// All `2^len` subset sums of `c`, indexed by mask.
fn subset_sums(c: &[u64]) -> Vec<u128> {
    let mut sums = vec![0u128; 1 << c.len()];
    for mask in 1..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + c[low] as u128;
    }
    sums
}

fn assignment(len: usize, split: usize, low: usize, high: usize) -> Vec<bool> {
    (0..len)
        .map(|i| if i < split { (low >> i) & 1 == 1 } else { (high >> (i - split)) & 1 == 1 })
        .collect()
}

/// Finds `b` with `Σ c_i b_i = s`, or `None` if no subset sums to `s`.
///
/// The first half's subset sums are sorted as `(sum, mask)`; second-half masks
/// are scanned in ascending order and the first hit pairs with the smallest
/// first-half mask of the needed sum. The answer is the same in both
/// execution modes.
pub fn mitm_ssp(c: &[u64], s: u64) -> Option<Vec<bool>> {
    mitm_ssp_with(c, s, Execution::default())
}

pub fn mitm_ssp_with(c: &[u64], s: u64, exec: Execution) -> Option<Vec<bool>> {
    assert!(c.len() <= 48, "table would need 2^{} entries", c.len() / 2);
    let split = c.len() / 2;
    let low_sums = subset_sums(&c[..split]);
    let mut table: Vec<(u128, usize)> = low_sums.into_iter().enumerate().map(|(m, s)| (s, m)).collect();
    exec.sort_unstable(&mut table);
    let high_sums = subset_sums(&c[split..]);
    let target = s as u128;
    exec.find_first_range(high_sums.len(), |high| {
        let need = target.checked_sub(high_sums[high])?;
        let at = table.partition_point(|&(sum, _)| sum < need);
        table.get(at).filter(|&&(sum, _)| sum == need).map(|&(_, low)| assignment(c.len(), split, low, high))
    })
}

/// Exhaustive search in Gray-code order; returns the first hit.
pub fn brute_force_ssp(c: &[u64], s: u64) -> Option<Vec<bool>> {
    assert!(c.len() < 64);
    let mut sum: u128 = 0;
    let mut mask: u64 = 0;
    let target = s as u128;
    for step in 0u64..(1 << c.len()) {
        if step > 0 {
            let bit = step.trailing_zeros() as usize;
            mask ^= 1 << bit;
            if (mask >> bit) & 1 == 1 {
                sum += c[bit] as u128;
            } else {
                sum -= c[bit] as u128;
            }
        }
        if sum == target {
            return Some((0..c.len()).map(|i| (mask >> i) & 1 == 1).collect());
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn total(c: &[u64], b: &[bool]) -> u128 {
        c.iter().zip(b).filter(|(_, &x)| x).map(|(&v, _)| v as u128).sum()
    }

    #[test]
    fn examples() {
        assert_eq!(mitm_ssp(&[1, 2, 4, 8], 5), Some(vec![true, false, true, false]));
        assert_eq!(mitm_ssp(&[3, 5, 7], 15), Some(vec![true, true, true]));
        assert_eq!(mitm_ssp(&[3, 5, 7], 14), None);
        assert_eq!(mitm_ssp(&[3, 5, 7], 0), Some(vec![false, false, false]));
        assert_eq!(mitm_ssp(&[], 0), Some(vec![]));
        assert_eq!(mitm_ssp(&[], 1), None);
    }

    #[test]
    fn modes_agree_on_ties() {
        let c = [1u64, 1, 1, 1, 2, 2, 2, 2, 3, 3];
        for s in 0..=20 {
            assert_eq!(
                mitm_ssp_with(&c, s, Execution::Sequential),
                mitm_ssp_with(&c, s, Execution::Parallel)
            );
        }
    }

    #[test]
    fn gray_code_visits_every_subset() {
        let c = [1u64, 2, 4, 8, 16];
        for s in 0..32 {
            let b = brute_force_ssp(&c, s).unwrap();
            assert_eq!(total(&c, &b), s as u128);
        }
        assert_eq!(brute_force_ssp(&c, 32), None);
    }

    proptest! {
        #[test]
        fn agrees_with_exhaustive_search(
            c in proptest::collection::vec(1u64..1000, 0..14),
            s in 0u64..4000,
        ) {
            let fast = mitm_ssp(&c, s);
            let slow = brute_force_ssp(&c, s);
            prop_assert_eq!(fast.is_some(), slow.is_some());
            if let Some(b) = fast {
                prop_assert_eq!(total(&c, &b), s as u128);
            }
        }
    }
}
