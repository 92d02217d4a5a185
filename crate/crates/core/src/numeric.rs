//! Small numerical helpers shared across modules.

/// Neumaier-compensated sum of `terms` after sorting them by value.
///
/// Sorting first makes the result a function of the multiset of terms only,
/// so any permutation of the input (edge reordering, node relabelling,
/// parallel partitioning) yields a bit-identical total.
pub fn stable_sum(terms: &mut [f64]) -> f64 {
    terms.sort_unstable_by(f64::total_cmp);
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &x in terms.iter() {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Median of a slice using the mid-point convention for even counts.
/// Returns `None` on empty input. NaNs are ordered by `total_cmp`.
pub fn median(values: &mut [f64]) -> Option<f64> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mid = n / 2;
    let (_, hi, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
    let hi = *hi;
    if n % 2 == 1 {
        return Some(hi);
    }
    // lower middle is the max of the left partition
    let lo = values[..mid]
        .iter()
        .copied()
        .max_by(f64::total_cmp)
        .expect("non-empty left half");
    Some(lo + (hi - lo) / 2.0)
}

/// Population standard deviation.
pub fn population_std(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mut buf = values.to_vec();
    let mean = stable_sum(&mut buf) / n;
    let mut sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    Some((stable_sum(&mut sq) / n).sqrt())
}
