//! Eigenvalues of real symmetric arrow matrices
//!
//! ```text
//! | a   z1  z2  ... zn |
//! | z1  d1             |
//! | z2      d2         |
//! | ...         ...    |
//! | zn              dn |
//! ```
//!
//! Decoupled entries (`z_i = 0`) and repeated diagonal values deflate
//! exactly; the remaining eigenvalues are the roots of the secular equation
//! `f(x) = x - a - sum_i z_i^2 / (x - d_i) = 0`, which has exactly one root
//! in every gap between consecutive poles and one beyond each end. `f` is
//! strictly increasing on each gap, so every root is bracketed and found by
//! bisection to the last representable bit.

use std::cmp::Ordering;

/// All `n + 1` eigenvalues, sorted ascending.
///
/// The result depends only on the multiset of `(d_i, |z_i|)` pairs, so any
/// permutation of the arms gives a bit-identical spectrum.
pub fn arrow_eigenvalues(apex: f64, diag: &[f64], arms: &[f64]) -> Vec<f64> {
    assert_eq!(diag.len(), arms.len(), "diagonal and arm lengths differ");
    let mut pairs: Vec<(f64, f64)> = diag.iter().zip(arms).map(|(&d, &z)| (d, z.abs())).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut eig = Vec::with_capacity(diag.len() + 1);
    // (pole, squared weight) after deflation
    let mut poles: Vec<(f64, f64)> = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let d = pairs[i].0;
        let mut j = i;
        let mut w = 0.0;
        while j < pairs.len() && pairs[j].0 == d {
            w += pairs[j].1 * pairs[j].1;
            j += 1;
        }
        // A group of m equal poles can be rotated so that only one arm is
        // non-zero; the other m - 1 directions are exact eigenvectors.
        let dark = if w > 0.0 { j - i - 1 } else { j - i };
        eig.extend(std::iter::repeat_n(d, dark));
        if w > 0.0 {
            poles.push((d, w));
        }
        i = j;
    }

    if poles.is_empty() {
        eig.push(apex);
    } else {
        let radius = poles.iter().map(|p| p.1).sum::<f64>().sqrt();
        let secular = |x: f64| x - apex - poles.iter().map(|&(d, w)| w / (x - d)).sum::<f64>();
        let first = poles[0].0;
        let last = poles[poles.len() - 1].0;
        eig.push(bisect(&secular, apex.min(first) - radius, first));
        for gap in poles.windows(2) {
            eig.push(bisect(&secular, gap[0].0, gap[1].0));
        }
        eig.push(bisect(&secular, last, apex.max(last) + radius));
    }
    eig.sort_by(f64::total_cmp);
    eig
}

/// Root of an increasing function on `(lo, hi)` with `f(lo+) <= 0 <= f(hi-)`.
/// Endpoints may be poles and are never evaluated directly.
fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            // Interval is down to adjacent floats.
            return mid;
        }
        match f(mid).partial_cmp(&0.0) {
            Some(Ordering::Less) => lo = mid,
            Some(Ordering::Greater) => hi = mid,
            Some(Ordering::Equal) => return mid,
            // NaN only arises from overflow far outside the bracket.
            None => hi = mid,
        }
    }
}
