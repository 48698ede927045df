use crate::sensing::{iou, BoundingBox};

/// Minimum-cost assignment on a rectangular cost matrix (Kuhn–Munkres with
/// potentials, O(n²m)). Returns `(row, col)` pairs; every row is assigned when
/// rows ≤ cols, every column otherwise.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = cost.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = cost[0].len();
    if cols == 0 {
        return Vec::new();
    }
    if rows > cols {
        let transposed: Vec<Vec<f64>> = (0..cols).map(|c| (0..rows).map(|r| cost[r][c]).collect()).collect();
        let mut pairs: Vec<_> = hungarian(&transposed).into_iter().map(|(c, r)| (r, c)).collect();
        pairs.sort_unstable();
        return pairs;
    }

    // 1-based arrays; index 0 is the virtual column.
    let (n, m) = (rows, cols);
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut p = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut pairs: Vec<_> = (1..=m).filter(|&j| p[j] != 0).map(|j| (p[j] - 1, j - 1)).collect();
    pairs.sort_unstable();
    pairs
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Association {
    /// `(track index, detection index)` pairs.
    pub matches: Vec<(usize, usize)>,
    pub unmatched_tracks: Vec<usize>,
    pub unmatched_detections: Vec<usize>,
}

/// IoU matrix, tracks as rows.
pub fn iou_matrix(tracks: &[BoundingBox], detections: &[BoundingBox]) -> Vec<Vec<f64>> {
    tracks.iter().map(|t| detections.iter().map(|d| iou(t, d)).collect()).collect()
}

/// Matches predicted track boxes to detections by maximum total IoU. Pairs
/// with IoU below `iou_min` are split back into the unmatched lists.
pub fn associate(tracks: &[BoundingBox], detections: &[BoundingBox], iou_min: f64) -> Association {
    let ious = iou_matrix(tracks, detections);
    let cost: Vec<Vec<f64>> = ious.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
    let mut out = Association::default();
    let mut track_done = vec![false; tracks.len()];
    let mut det_done = vec![false; detections.len()];
    for (t, d) in hungarian(&cost) {
        if ious[t][d] >= iou_min {
            out.matches.push((t, d));
            track_done[t] = true;
            det_done[d] = true;
        }
    }
    out.unmatched_tracks = (0..tracks.len()).filter(|&t| !track_done[t]).collect();
    out.unmatched_detections = (0..detections.len()).filter(|&d| !det_done[d]).collect();
    out
}
