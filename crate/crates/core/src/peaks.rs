//! Local-maximum search with topographic prominence and 3-point parabolic
//! refinement.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    /// Grid index of the sampled maximum.
    pub index: usize,
    /// Refined abscissa.
    pub x: f64,
    /// Refined height.
    pub y: f64,
    /// Height above the higher of the two bounding minima.
    pub prominence: f64,
}

/// Vertex of the parabola through three points. Falls back to the middle
/// point when the three are collinear.
pub fn parabolic_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let (x0, x1, x2) = (x[0], x[1], x[2]);
    let (y0, y1, y2) = (y[0], y[1], y[2]);
    // Work relative to the middle point to keep the arithmetic well scaled.
    let (a0, a2) = (x0 - x1, x2 - x1);
    let (b0, b2) = (y0 - y1, y2 - y1);
    let denom = a0 * a2 * (a0 - a2);
    if denom == 0.0 {
        return (x1, y1);
    }
    let c2 = (a2 * b0 - a0 * b2) / denom;
    let c1 = (a0 * a0 * b2 - a2 * a2 * b0) / denom;
    if c2 >= 0.0 {
        return (x1, y1);
    }
    let dx = -c1 / (2.0 * c2);
    if dx < a0 || dx > a2 {
        return (x1, y1);
    }
    (x1 + dx, y1 + c1 * dx + c2 * dx * dx)
}

/// Indices of interior local maxima. Plateaus report their left-most sample.
pub fn local_maxima(y: &[f64]) -> Vec<usize> {
    let n = y.len();
    let mut out = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if y[i] > y[i - 1] {
            let mut j = i;
            while j + 1 < n && y[j + 1] == y[i] {
                j += 1;
            }
            if j + 1 < n && y[j + 1] < y[i] {
                out.push(i);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Prominence of the maximum at `i`: its height minus the higher of the
/// lowest points between it and the nearest higher sample on either side
/// (or the grid edge).
pub fn prominence(y: &[f64], i: usize) -> f64 {
    let h = y[i];
    let mut left_min = h;
    for k in (0..i).rev() {
        if y[k] > h {
            break;
        }
        left_min = left_min.min(y[k]);
    }
    let mut right_min = h;
    for &v in &y[i + 1..] {
        if v > h {
            break;
        }
        right_min = right_min.min(v);
    }
    h - left_min.max(right_min)
}

/// Peaks whose prominence is at least `min_prominence`, ordered by x.
pub fn find_peaks(x: &[f64], y: &[f64], min_prominence: f64) -> Vec<Peak> {
    local_maxima(y)
        .into_iter()
        .filter_map(|i| {
            let p = prominence(y, i);
            if p < min_prominence {
                return None;
            }
            let (xv, yv) = parabolic_vertex([x[i - 1], x[i], x[i + 1]], [y[i - 1], y[i], y[i + 1]]);
            Some(Peak {
                index: i,
                x: xv,
                y: yv,
                prominence: p,
            })
        })
        .collect()
}
