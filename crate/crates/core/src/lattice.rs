//! Row-major multi-index helpers shared by the dense grid types.
//!
//! All dense objects in this crate use lexicographic order with the first
//! axis varying slowest.

use crate::error::{Error, Result};

/// Upper bound on the number of densely stored entries of any grid or array.
pub const MAX_DENSE_POINTS: usize = 100_000_000;

/// `side^dim`, or a size error when it exceeds [`MAX_DENSE_POINTS`].
pub(crate) fn dense_len(side: usize, dim: usize) -> Result<usize> {
    let mut points: u128 = 1;
    for _ in 0..dim {
        points = points.saturating_mul(side as u128);
        if points > MAX_DENSE_POINTS as u128 {
            return Err(Error::TooLarge {
                points: (side as u128).saturating_pow(dim as u32),
                limit: MAX_DENSE_POINTS,
            });
        }
    }
    Ok(points as usize)
}

pub(crate) fn product_len(extents: &[usize]) -> Result<usize> {
    let mut points: u128 = 1;
    for &e in extents {
        points = points.saturating_mul(e as u128);
    }
    if points > MAX_DENSE_POINTS as u128 {
        return Err(Error::TooLarge {
            points,
            limit: MAX_DENSE_POINTS,
        });
    }
    Ok(points as usize)
}

pub(crate) fn strides(extents: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; extents.len()];
    for axis in (0..extents.len().saturating_sub(1)).rev() {
        strides[axis] = strides[axis + 1] * extents[axis + 1];
    }
    strides
}

pub(crate) fn offset(strides: &[usize], index: &[usize]) -> usize {
    strides.iter().zip(index).map(|(s, i)| s * i).sum()
}

/// Visits every multi-index of the box `[0, extents)` in row-major order.
pub(crate) fn for_each_index(extents: &[usize], mut visit: impl FnMut(&[usize])) {
    if extents.contains(&0) {
        return;
    }
    let mut index = vec![0; extents.len()];
    loop {
        visit(&index);
        let mut axis = extents.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            index[axis] += 1;
            if index[axis] < extents[axis] {
                break;
            }
            index[axis] = 0;
        }
    }
}

/// Inclusion-exclusion sum over the `2^L` corners of the box `[lower, upper]`.
///
/// The corner taking `upper` on every axis enters with sign `+1`; each swap of
/// one coordinate to `lower` flips the sign.
pub(crate) fn alternating_sum(
    lower: &[usize],
    upper: &[usize],
    value: impl Fn(&[usize]) -> f64,
) -> f64 {
    let dim = lower.len();
    let mut corner = vec![0; dim];
    let mut total = 0.0;
    for mask in 0u64..(1u64 << dim) {
        let mut lowered = 0;
        for axis in 0..dim {
            if mask & (1 << axis) != 0 {
                corner[axis] = lower[axis];
                lowered += 1;
            } else {
                corner[axis] = upper[axis];
            }
        }
        let v = value(&corner);
        if lowered % 2 == 0 {
            total += v;
        } else {
            total -= v;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odometer_is_row_major() {
        let mut seen = Vec::new();
        for_each_index(&[2, 3], |i| seen.push(i.to_vec()));
        assert_eq!(
            seen,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2]
            ]
        );
        let st = strides(&[2, 3]);
        for (k, idx) in seen.iter().enumerate() {
            assert_eq!(offset(&st, idx), k);
        }
    }

    #[test]
    fn size_guard() {
        assert_eq!(dense_len(3, 2).unwrap(), 9);
        assert!(dense_len(10_001, 2).is_err());
        assert!(dense_len(2, 200).is_err());
        assert_eq!(dense_len(10_000, 2).unwrap(), 100_000_000);
    }
}
