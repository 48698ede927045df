//! Reference implementations used as test oracles. None of them calls into
//! the code they check.

#![allow(dead_code)]

use follow_core::geometry::Vec2;
use follow_core::reid::{FeatureBank, Parts};
use follow_core::sensing::{BoundingBox, Detection, Embedding};
use follow_core::world::ControlCommand;

/// IoU of two corner rectangles with integer coordinates, as an exact
/// fraction `(intersection, union)`.
pub fn iou_fraction(a: [i64; 4], b: [i64; 4]) -> (i64, i64) {
    let area = |r: [i64; 4]| (r[2] - r[0]).max(0) * (r[3] - r[1]).max(0);
    let (aa, ab) = (area(a), area(b));
    if aa == 0 || ab == 0 {
        return (0, 1);
    }
    let iw = (a[2].min(b[2]) - a[0].max(b[0])).max(0);
    let ih = (a[3].min(b[3]) - a[1].max(b[1])).max(0);
    let inter = iw * ih;
    (inter, aa + ab - inter)
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut ab = 0.0;
    let mut aa = 0.0;
    let mut bb = 0.0;
    for i in 0..a.len() {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    ab / (aa * bb).sqrt()
}

pub fn normalized_sum(vs: &[Vec<f64>]) -> Vec<f64> {
    let mut s = vec![0.0; vs[0].len()];
    for v in vs {
        for (x, y) in s.iter_mut().zip(v) {
            *x += y;
        }
    }
    let n = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    s.into_iter().map(|x| x / n).collect()
}

pub type Mat = Vec<Vec<f64>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![0.0; c]; r]
}

pub fn eye(n: usize) -> Mat {
    let mut m = zeros(n, n);
    (0..n).for_each(|i| m[i][i] = 1.0);
    m
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let mut m = zeros(a.len(), b[0].len());
    for i in 0..a.len() {
        for k in 0..b.len() {
            for j in 0..b[0].len() {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect()).collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p - q).collect()).collect()
}

pub fn scale(a: &Mat, s: f64) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn transpose(a: &Mat) -> Mat {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

/// Gauss–Jordan elimination with partial pivoting.
pub fn inverse(a: &Mat) -> Mat {
    let n = a.len();
    let mut m: Mat = a.iter().zip(eye(n)).map(|(r, e)| r.iter().copied().chain(e).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, p);
        let d = m[c][c];
        assert!(d.abs() > 1e-300, "singular");
        m[c].iter_mut().for_each(|x| *x /= d);
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                let row = m[c].clone();
                m[r].iter_mut().zip(&row).for_each(|(x, y)| *x -= f * y);
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub fn col(v: &[f64]) -> Mat {
    v.iter().map(|x| vec![*x]).collect()
}

/// Constant-velocity transition for `[u, v, s, r, u̇, v̇, ṡ]`.
pub fn dense_transition(dt: f64) -> Mat {
    let mut f = eye(7);
    f[0][4] = dt;
    f[1][5] = dt;
    f[2][6] = dt;
    f
}

pub fn dense_observation() -> Mat {
    let mut h = zeros(4, 7);
    (0..4).for_each(|i| h[i][i] = 1.0);
    h
}

/// Textbook predict: `x' = F x`, `P' = F P Fᵀ + Q dt`.
pub fn dense_predict(x: &[f64], p: &Mat, q: &Mat, dt: f64) -> (Vec<f64>, Mat) {
    let f = dense_transition(dt);
    let x2 = mul(&f, &col(x)).into_iter().map(|r| r[0]).collect();
    let p2 = add(&mul(&mul(&f, p), &transpose(&f)), &scale(q, dt));
    (x2, p2)
}

/// Textbook update with the explicit inverse: `K = P Hᵀ S⁻¹`, `P' = (I − KH) P`.
pub fn dense_update(x: &[f64], p: &Mat, z: &[f64], r: &Mat) -> (Vec<f64>, Mat) {
    let h = dense_observation();
    let s = add(&mul(&mul(&h, p), &transpose(&h)), r);
    let k = mul(&mul(p, &transpose(&h)), &inverse(&s));
    let y = sub(&col(z), &mul(&h, &col(x)));
    let x2: Vec<f64> = add(&col(x), &mul(&k, &y)).into_iter().map(|r| r[0]).collect();
    let p2 = mul(&sub(&eye(7), &mul(&k, &h)), p);
    (x2, p2)
}

fn permutations(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Smallest total cost over all assignments of min(rows, cols) pairs.
pub fn brute_force_min_cost(cost: &[Vec<f64>]) -> f64 {
    let rows = cost.len();
    let cols = cost.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let mut perms = Vec::new();
    if rows <= cols {
        permutations(&mut (0..cols).collect(), 0, &mut perms);
        perms.iter().map(|p| (0..rows).map(|r| cost[r][p[r]]).sum::<f64>()).fold(f64::INFINITY, f64::min)
    } else {
        permutations(&mut (0..rows).collect(), 0, &mut perms);
        perms.iter().map(|p| (0..cols).map(|c| cost[p[c]][c]).sum::<f64>()).fold(f64::INFINITY, f64::min)
    }
}

/// Exhaustive re-id: every candidate's max-over-parts cosine to the bank
/// means, the arg-max, then the strict threshold.
pub fn reid_oracle(dets: &[Detection], bank: &FeatureBank, parts: Parts, threshold: f64) -> Option<(usize, f64)> {
    let mut scores = Vec::new();
    for (i, d) in dets.iter().enumerate() {
        let mut s: Option<f64> = None;
        if parts.face {
            if let (Some(f), Some(m)) = (&d.face_embedding, bank.face_mean()) {
                s = Some(cosine(f.values(), m.values()));
            }
        }
        if parts.torso {
            let t = cosine(d.torso_embedding.values(), bank.torso_mean().values());
            s = Some(s.map_or(t, |x| x.max(t)));
        }
        if let Some(s) = s {
            scores.push((i, s));
        }
    }
    let best = scores.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
    let (i, s) = scores.into_iter().find(|(_, s)| *s == best)?;
    (s > threshold).then_some((i, s))
}

/// Smallest distance from `points` to the unicycle path of `cmd` over `t`
/// seconds, integrated with `steps` Euler steps from the origin.
pub fn simulated_clearance(cmd: &ControlCommand, t: f64, points: &[Vec2], steps: usize) -> f64 {
    let dt = t / steps as f64;
    let (mut x, mut y, mut th) = (0.0f64, 0.0f64, 0.0f64);
    let mut best = f64::INFINITY;
    for k in 0..=steps {
        for p in points {
            best = best.min((p.x - x).hypot(p.y - y));
        }
        if k < steps {
            // Midpoint heading keeps the integration second-order.
            let mid = th + 0.5 * cmd.angular * dt;
            x += cmd.linear * dt * mid.cos();
            y += cmd.linear * dt * mid.sin();
            th += cmd.angular * dt;
        }
    }
    best
}

/// A detection carrying only what re-id reads.
pub fn detection(body: BoundingBox, torso: Embedding, face: Option<Embedding>, truth_id: u32) -> Detection {
    Detection {
        body_box: body,
        torso_box: body,
        face_box: face.as_ref().map(|_| body),
        torso_embedding: torso,
        face_embedding: face,
        depth: None,
        truth_id,
    }
}
