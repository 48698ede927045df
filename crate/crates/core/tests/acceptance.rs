//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use common::*;
use follow_core::control::{
    safer_filter, select_camera, CameraSwitchConfig, ControlConfig, FollowController, Mode, Perception, Pipeline,
    PlannerConfig, PlannerInput, TargetObservation,
};
use follow_core::geometry::{Aabb, Pose, Vec2};
use follow_core::harness::{
    check_trends, compute_metrics, render_table, run_suite, run_trial, SimConfig, TickLog, VariantConfig,
};
use follow_core::reid::{
    bank_mean, cosine_similarity, register_target, reidentify, score_person, Candidate, FeatureBank, Parts, ReidConfig,
    RegistrationConfig, RegistrationMode,
};
use follow_core::rng::{stream, Stream};
use follow_core::sensing::{
    iou, iou_rect, match_faces_to_bodies, synth_embedding, BodyPart, BoundingBox, CameraKind, Embedding, Rect,
    SensingConfig, FACE_MATCH_IOU,
};
use follow_core::harness::ParticipantConfig;
use follow_core::tracking::{associate, hungarian, kf_predict, kf_update, KalmanNoise, KalmanState, StateMatrix, StateVector};
use follow_core::world::{scan_from, AgentLimits, ControlCommand, LidarScan, Obstacle, ObstacleKind, WorldConfig};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_time(started: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let t = started.elapsed();
    ensure(t < limit, || format!("{what} took {:.1} s, limit {:.0} s", t.as_secs_f64(), limit.as_secs_f64()))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_unit(dim: usize, r: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| r.random_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

fn random_int_rect(r: &mut ChaCha8Rng) -> [i64; 4] {
    let x0 = r.random_range(-20..20);
    let y0 = r.random_range(-20..20);
    [x0, y0, x0 + r.random_range(0..15), y0 + r.random_range(0..15)]
}

fn to_box(q: [i64; 4]) -> BoundingBox {
    BoundingBox::from_rect(&Rect::new(q[0] as f64, q[1] as f64, q[2] as f64, q[3] as f64))
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn unit_oracles() -> Outcome {
    let started = Instant::now();
    let mut r = rng(1);
    const N: usize = 1000;

    for _ in 0..N {
        let (a, b) = (random_int_rect(&mut r), random_int_rect(&mut r));
        let (inter, union) = iou_fraction(a, b);
        let want = inter as f64 / union as f64;
        let got_rect = iou_rect(
            &Rect::new(a[0] as f64, a[1] as f64, a[2] as f64, a[3] as f64),
            &Rect::new(b[0] as f64, b[1] as f64, b[2] as f64, b[3] as f64),
        );
        let got_box = iou(&to_box(a), &to_box(b));
        ensure(got_rect == want && got_box == want, || format!("iou {a:?} {b:?}: {got_box} vs {inter}/{union}"))?;
    }

    for _ in 0..N {
        let dim = r.random_range(2..32);
        let (a, b) = (random_unit(dim, &mut r), random_unit(dim, &mut r));
        let got = cosine_similarity(&Embedding::from_unit(a.clone()).unwrap(), &Embedding::from_unit(b.clone()).unwrap())
            .map_err(|e| e.to_string())?;
        let want = cosine(&a, &b);
        ensure(close(got, want, 1e-12), || format!("cosine {got} vs {want}"))?;
    }

    for _ in 0..N {
        let dim = r.random_range(2..16);
        let n = r.random_range(1..12);
        let vs: Vec<Vec<f64>> = (0..n).map(|_| random_unit(dim, &mut r)).collect();
        let Ok(got) = bank_mean(&vs.iter().map(|v| Embedding::from_unit(v.clone()).unwrap()).collect::<Vec<_>>()) else {
            // Random unit vectors cancelling exactly is not an oracle failure.
            continue;
        };
        let want = normalized_sum(&vs);
        for (g, w) in got.values().iter().zip(&want) {
            ensure(close(*g, *w, 1e-12), || format!("bank_mean {g} vs {w}"))?;
        }
    }

    let noise = KalmanNoise::default();
    let q: Mat = (0..7).map(|i| (0..7).map(|j| noise.process()[(i, j)]).collect()).collect();
    let rm: Mat = (0..4).map(|i| (0..4).map(|j| noise.measurement()[(i, j)]).collect()).collect();
    let mut worst = 0.0f64;
    for _ in 0..N {
        let mean: Vec<f64> = vec![
            r.random_range(-1.0..1.0),
            r.random_range(-0.5..0.5),
            r.random_range(0.01..0.5),
            r.random_range(0.05..1.0),
            r.random_range(-0.05..0.05),
            r.random_range(-0.05..0.05),
            r.random_range(-0.002..0.002),
        ];
        let a: Mat = (0..7).map(|_| (0..7).map(|_| r.random_range(-0.05..0.05)).collect()).collect();
        let p = add(&mul(&a, &transpose(&a)), &scale(&eye(7), 1e-4));
        let state = KalmanState {
            mean: StateVector::from_iterator(mean.iter().copied()),
            covariance: StateMatrix::from_fn(|i, j| p[i][j]),
        };
        let dt = r.random_range(0.5..3.0);
        let predicted = kf_predict(&state, dt, &noise);
        let (xo, po) = dense_predict(&mean, &p, &q, dt);
        let z = BoundingBox::new(
            r.random_range(-1.0..1.0),
            r.random_range(-0.5..0.5),
            r.random_range(0.02..0.5),
            r.random_range(0.05..1.0),
        );
        let updated = kf_update(&predicted, &z, &noise).map_err(|e| e.to_string())?;
        let zv = [z.center_u, z.center_v, z.width * z.height, z.width / z.height];
        let (xu, pu) = dense_update(&xo, &po, &zv, &rm);
        for i in 0..7 {
            worst = worst.max((predicted.mean[i] - xo[i]).abs()).max((updated.mean[i] - xu[i]).abs());
            for j in 0..7 {
                worst = worst.max((predicted.covariance[(i, j)] - po[i][j]).abs());
                worst = worst.max((updated.covariance[(i, j)] - pu[i][j]).abs());
            }
        }
    }
    ensure(worst <= 1e-9, || format!("kalman deviates from the dense oracle by {worst:e}"))?;

    for _ in 0..N {
        let (nt, nd) = (r.random_range(0..6), r.random_range(0..6));
        let mk = |r: &mut ChaCha8Rng| {
            BoundingBox::new(r.random_range(-0.6..0.6), r.random_range(-0.1..0.1), r.random_range(0.05..0.3), r.random_range(0.2..0.9))
        };
        let tracks: Vec<BoundingBox> = (0..nt).map(|_| mk(&mut r)).collect();
        let dets: Vec<BoundingBox> = (0..nd).map(|_| mk(&mut r)).collect();
        let ious: Vec<Vec<f64>> = tracks.iter().map(|t| dets.iter().map(|d| iou(t, d)).collect()).collect();
        let cost: Vec<Vec<f64>> = ious.iter().map(|row| row.iter().map(|x| -x).collect()).collect();
        let pairs = hungarian(&cost);
        let total: f64 = pairs.iter().map(|&(t, d)| cost[t][d]).sum();
        let best = brute_force_min_cost(&cost);
        ensure((total - best).abs() <= 1e-12, || format!("assignment total {total} vs brute force {best}"))?;
        ensure(pairs.len() == nt.min(nd), || "assignment is not complete".into())?;
        let a = associate(&tracks, &dets, 0.3);
        let kept: Vec<(usize, usize)> = pairs.iter().copied().filter(|&(t, d)| ious[t][d] >= 0.3).collect();
        ensure(a.matches == kept, || format!("associate {:?} vs {:?}", a.matches, kept))?;
        let tracks_left: Vec<usize> = (0..nt).filter(|t| !kept.iter().any(|p| p.0 == *t)).collect();
        let dets_left: Vec<usize> = (0..nd).filter(|d| !kept.iter().any(|p| p.1 == *d)).collect();
        ensure(a.unmatched_tracks == tracks_left && a.unmatched_detections == dets_left, || "unmatched lists".into())?;
    }

    within_time(started, Duration::from_secs(10), "unit oracles")?;
    Ok(format!("5 × {N} instances, kalman max deviation {worst:.1e}, {:.2} s", started.elapsed().as_secs_f64()))
}

fn reid_contract() -> Outcome {
    let started = Instant::now();
    let mut r = rng(2);
    let config = ReidConfig::default();
    let dim = 6;
    let mut accepted = 0;
    for round in 0..2000 {
        let nb = r.random_range(1..5);
        let torso: Vec<Embedding> = (0..nb).map(|_| Embedding::from_unit(random_unit(dim, &mut r)).unwrap()).collect();
        let face: Vec<Embedding> = if r.random_bool(0.7) {
            (0..nb).map(|_| Embedding::from_unit(random_unit(dim, &mut r)).unwrap()).collect()
        } else {
            Vec::new()
        };
        let bank = FeatureBank::new(RegistrationMode::Full360, face, torso).map_err(|e| e.to_string())?;
        let near = |base: &Embedding, r: &mut ChaCha8Rng| {
            let s = r.random_range(0.0..0.6);
            let v: Vec<f64> = base.values().iter().map(|x| x + s * r.random_range(-1.0..1.0)).collect();
            Embedding::normalized(v).unwrap()
        };
        let n = r.random_range(0..=10);
        let dets: Vec<_> = (0..n)
            .map(|_| {
                let t = if r.random_bool(0.5) { near(bank.torso_mean(), &mut r) } else { Embedding::from_unit(random_unit(dim, &mut r)).unwrap() };
                let f = match bank.face_mean() {
                    Some(m) if r.random_bool(0.6) => Some(near(m, &mut r)),
                    _ if r.random_bool(0.3) => Some(Embedding::from_unit(random_unit(dim, &mut r)).unwrap()),
                    _ => None,
                };
                detection(BoundingBox::new(r.random_range(-0.9..0.9), 0.0, 0.1, 0.5), t, f, 0)
            })
            .collect();
        let parts = [Parts::BOTH, Parts { face: true, torso: false }, Parts { face: false, torso: true }][round % 3];
        let candidates: Vec<Candidate> = dets.iter().enumerate().map(|(i, d)| Candidate { id: i as u64, detection: d }).collect();
        let got = reidentify(&candidates, &bank, parts, &config, None).map_err(|e| e.to_string())?.map(|m| (m.index, m.score));
        let want = reid_oracle(&dets, &bank, parts, config.sim_threshold);
        let same = match (got, want) {
            (None, None) => true,
            (Some((gi, gs)), Some((wi, ws))) => gi == wi && close(gs, ws, 1e-12),
            _ => false,
        };
        ensure(same, || format!("instance {round}: reidentify {got:?}, oracle {want:?}"))?;
        accepted += usize::from(got.is_some());
    }

    let bank = FeatureBank::new(RegistrationMode::Full360, vec![], vec![Embedding::from_unit(vec![1.0, 0.0]).unwrap()])
        .map_err(|e| e.to_string())?;
    let at = |c: f64| detection(BoundingBox::new(0.0, 0.0, 0.1, 0.5), Embedding::from_unit(vec![c, (1.0 - c * c).sqrt()]).unwrap(), None, 0);
    let boundary = at(0.8);
    let above = at(0.8f64.next_up());
    let pick = |d| reidentify(&[Candidate { id: 7, detection: d }], &bank, Parts::BOTH, &config, None);
    let boundary_score = score_person(&boundary, &bank).map_err(|e| e.to_string())?.score;
    ensure(boundary_score == 0.8, || format!("boundary score {boundary_score}"))?;
    ensure(pick(&boundary).map_err(|e| e.to_string())?.is_none(), || "0.80 accepted".into())?;
    ensure(pick(&above).map_err(|e| e.to_string())?.is_some_and(|m| m.id == 7), || "0.8 + ε rejected".into())?;

    within_time(started, Duration::from_secs(5), "re-id contract")?;
    Ok(format!("2000 instances ({accepted} accepted), 0.80 rejected, 0.8+ε accepted, {:.2} s", started.elapsed().as_secs_f64()))
}

fn face_body_matching() -> Outcome {
    let mut r = rng(3);
    let mut matched = 0;
    let check = |face: BoundingBox, pose: BoundingBox| -> Result<bool, String> {
        let m = match_faces_to_bodies(&[face], &[Some(pose)]);
        let v = iou(&face, &pose);
        ensure(m[0].is_some() == (v > FACE_MATCH_IOU), || format!("IoU {v}: assignment {:?}", m[0]))?;
        Ok(m[0].is_some())
    };
    for _ in 0..5000 {
        let pose = BoundingBox::new(r.random_range(-0.8..0.8), r.random_range(-0.4..0.4), r.random_range(0.01..0.1), r.random_range(0.02..0.2));
        // Perturbations on the scale of the box so both outcomes occur.
        let k = r.random_range(0.0..0.4);
        let face = BoundingBox::new(
            pose.center_u + k * pose.width * r.random_range(-1.0..1.0),
            pose.center_v + k * pose.height * r.random_range(-1.0..1.0),
            pose.width * (1.0 + k * r.random_range(-1.0..1.0)),
            pose.height * (1.0 + k * r.random_range(-1.0..1.0)),
        );
        matched += usize::from(check(face, pose)?);
    }
    // IoU exactly 3/4 and exactly 4/5 on a dyadic grid.
    let pose = BoundingBox::new(2.0, 0.0, 2.0, 1.0);
    ensure(iou(&BoundingBox::new(2.5, 0.0, 1.5, 1.0), &pose) == 0.75, || "exact 0.75 construction".into())?;
    ensure(!check(BoundingBox::new(2.5, 0.0, 1.5, 1.0), pose)?, || "IoU 0.75 assigned".into())?;
    ensure(check(BoundingBox::new(2.4, 0.0, 1.6, 1.0), pose)?, || "IoU 0.8 not assigned".into())?;

    // Several faces and bodies: every assignment is above the threshold and one-to-one.
    for _ in 0..500 {
        let bodies: Vec<Option<BoundingBox>> = (0..r.random_range(0..5))
            .map(|_| r.random_bool(0.8).then(|| BoundingBox::new(r.random_range(-0.9..0.9), -0.3, 0.04, 0.08)))
            .collect();
        let faces: Vec<BoundingBox> = (0..r.random_range(0..5))
            .map(|_| BoundingBox::new(r.random_range(-0.9..0.9), -0.3 + r.random_range(-0.01..0.01), 0.04, 0.08))
            .collect();
        let m = match_faces_to_bodies(&faces, &bodies);
        let mut used = vec![false; faces.len()];
        for (b, f) in m.iter().enumerate() {
            if let Some(f) = *f {
                let v = iou(&faces[f], &bodies[b].unwrap());
                ensure(v > FACE_MATCH_IOU && !used[f], || format!("body {b} got face {f} at IoU {v}"))?;
                used[f] = true;
            }
        }
    }
    Ok(format!("5000 random pairs ({matched} assigned), exact 0.75 rejected, 500 multi-person frames"))
}

fn registration_comparison() -> Outcome {
    let started = Instant::now();
    let sensing = SensingConfig::default();
    let participants = ParticipantConfig::default();
    let full_cfg = RegistrationConfig { mode: RegistrationMode::Full360, ..Default::default() };
    let std_cfg = RegistrationConfig { mode: RegistrationMode::Standard, ..Default::default() };
    let (mut full_sum, mut std_sum, mut n) = (0.0, 0.0, 0usize);
    for p in 0..10u64 {
        let profile = participants.profile(p as usize, sensing.embedding.dim);
        let full = register_target(&profile, &sensing, &full_cfg, 30.0, p).map_err(|e| e.to_string())?.bank;
        let standard = register_target(&profile, &sensing, &std_cfg, 30.0, p).map_err(|e| e.to_string())?.bank;
        let mut r = stream(1000 + p, Stream::Identity);
        for _ in 0..50 {
            // Side-facing and back-facing views: 45° to 135° off the camera axis.
            let magnitude = r.random_range(PI / 4.0..=3.0 * PI / 4.0);
            let view = if r.random_bool(0.5) { magnitude } else { -magnitude };
            let torso = synth_embedding(&profile, BodyPart::Torso, view, &sensing.embedding, &mut r);
            let face = (view.abs() < sensing.face_visibility_angle)
                .then(|| synth_embedding(&profile, BodyPart::Face, view, &sensing.embedding, &mut r));
            let d = detection(BoundingBox::new(0.0, 0.0, 0.1, 0.5), torso, face, 0);
            full_sum += score_person(&d, &full).map_err(|e| e.to_string())?.score;
            std_sum += score_person(&d, &standard).map_err(|e| e.to_string())?.score;
            n += 1;
        }
    }
    let (full_mean, std_mean) = (full_sum / n as f64, std_sum / n as f64);
    ensure(full_mean >= std_mean, || format!("full_360 {full_mean:.4} < standard {std_mean:.4}"))?;
    within_time(started, Duration::from_secs(30), "registration comparison")?;
    Ok(format!("{n} views: full_360 {full_mean:.4} ≥ standard {std_mean:.4}, {:.2} s", started.elapsed().as_secs_f64()))
}

fn latency_model() -> Outcome {
    let config = SimConfig::default();
    let mut rates = Vec::new();
    for seed in 0..3 {
        let t = run_trial(&config, &VariantConfig::preset("ours_wo_motion").unwrap(), seed).map_err(|e| e.to_string())?;
        let rate = t.result.metrics.perception_updates as f64 / t.result.metrics.duration;
        ensure(rate <= 8.0, || format!("seed {seed}: {rate:.2} Hz without the motion tracker"))?;
        rates.push(rate);
    }
    let mut longest = 0;
    let mut full_rate = Vec::new();
    for seed in 0..3 {
        let t = run_trial(&config, &VariantConfig::preset("ours").unwrap(), seed).map_err(|e| e.to_string())?;
        let ticks = &t.log.ticks;
        let mut run = 0;
        for (k, tick) in ticks.iter().enumerate() {
            if tick.fresh {
                run = 0;
                continue;
            }
            if run == 0 {
                ensure(k > 0 && ticks[k - 1].reid_called, || format!("seed {seed}: stall at tick {k} without re-id"))?;
            }
            run += 1;
            longest = longest.max(run);
            ensure(run <= 4, || format!("seed {seed}: stall of {run} ticks at tick {k}"))?;
        }
        let stalls_free = ticks.iter().filter(|t| t.fresh && !t.reid_called).count();
        full_rate.push(ticks.iter().filter(|t| t.fresh).count() as f64 / t.result.metrics.duration);
        ensure(stalls_free > 0, || "no tracker-only frames".into())?;
    }
    Ok(format!(
        "without tracker {:.2}–{:.2} Hz; with tracker every tick processed except stalls of ≤ {longest} ticks after re-id ({:.1} Hz mean)",
        rates.iter().copied().fold(f64::INFINITY, f64::min),
        rates.iter().copied().fold(0.0, f64::max),
        full_rate.iter().sum::<f64>() / full_rate.len() as f64
    ))
}

fn random_scene(r: &mut ChaCha8Rng) -> WorldConfig {
    let mut w = WorldConfig::empty(Aabb::new(-6.0, -6.0, 6.0, 6.0));
    for _ in 0..r.random_range(2..10) {
        let (x, y) = (r.random_range(-3.0..3.0), r.random_range(-3.0..3.0));
        if r.random_bool(0.5) {
            w.obstacles.push(Obstacle::circle(ObstacleKind::Chair, x, y, r.random_range(0.1..0.5)));
        } else {
            let (dx, dy) = (r.random_range(0.05..1.5), r.random_range(0.05..1.5));
            w.obstacles.push(Obstacle::rect(ObstacleKind::Desk, x, y, x + dx, y + dy));
        }
    }
    w
}

fn planner_clearance(r: &mut ChaCha8Rng) -> Result<usize, String> {
    let config = PlannerConfig::default();
    let limits = AgentLimits::default();
    let horizon = config.horizon(&limits);
    let mut scenes = 0;
    while scenes < 1000 {
        let world = random_scene(r);
        let pose = Pose::new(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0), r.random_range(-PI..PI));
        let scan = scan_from(&pose, &world, std::iter::empty());
        let points: Vec<Vec2> = scan.points().collect();
        if scan.min_range() < config.safety_radius {
            continue;
        }
        scenes += 1;
        let input = if r.random_bool(0.5) {
            PlannerInput::Goal(Vec2::new(r.random_range(-4.0..4.0), r.random_range(-4.0..4.0)))
        } else {
            PlannerInput::Command(ControlCommand::new(r.random_range(-0.5..1.5), r.random_range(-1.5..1.5)))
        };
        let c = safer_filter(&input, &scan, &config, &limits);
        ensure(c.within(&limits), || format!("command {c:?} outside limits"))?;
        let clearance = simulated_clearance(&c, horizon, &points, 4000);
        ensure(clearance >= config.safety_radius - 1e-6, || {
            format!("scene {scenes}: {input:?} → {c:?} passes {clearance:.4} m from a return")
        })?;
    }
    Ok(scenes)
}

fn search_spin_sign(r: &mut ChaCha8Rng) -> Result<usize, String> {
    let sensing = SensingConfig::default();
    let config = ControlConfig::default();
    let scan = LidarScan::empty(360, 12.0);
    let pipeline = Pipeline { parts: Parts { face: false, torso: false }, ..Pipeline::FULL };
    let torso = Embedding::from_unit(vec![1.0, 0.0]).unwrap();
    for episode in 0..100 {
        let mut c = FollowController::new(config, sensing, Default::default(), AgentLimits::default(), pipeline, None);
        let side = if episode % 2 == 0 { 1.0 } else { -1.0 };
        let u = side * r.random_range(0.05..0.9);
        let drift = side * r.random_range(0.0..0.01);
        let mut t = 0.0;
        let mut visible_frames = 0;
        // The target walks across the fish-eye image and disappears.
        for k in 0..r.random_range(5..20) {
            let body = BoundingBox::new(u + drift * k as f64, 0.0, 0.06, 0.6);
            let dets = [detection(body, torso.clone(), None, 1)];
            let d = c.step(&Perception { time: t, fisheye: &dets, rgbd: &[], lidar: &scan, pose: Pose::new(0.0, 0.0, 0.0) });
            ensure(d.mode.is_following(), || format!("episode {episode}: not following a visible person"))?;
            t += 1.0 / 30.0;
            visible_frames += 1;
        }
        let last_u = u + drift * (visible_frames - 1) as f64;
        let mut spun = false;
        for _ in 0..60 {
            let d = c.step(&Perception { time: t, fisheye: &[], rgbd: &[], lidar: &scan, pose: Pose::new(0.0, 0.0, 0.0) });
            t += 1.0 / 30.0;
            if d.mode == Mode::Search {
                // Negative u is the left half of the image; left is a positive (CCW) turn.
                let want = -last_u.signum();
                ensure(d.command.angular.signum() == want && c.state().spin_sign == want, || {
                    format!("episode {episode}: last seen at u={last_u:.3}, spinning {:?}", d.command)
                })?;
                spun = true;
                break;
            }
        }
        ensure(spun, || format!("episode {episode}: never entered search"))?;
    }
    Ok(100)
}

fn camera_switch(r: &mut ChaCha8Rng) -> Result<usize, String> {
    let cfg = CameraSwitchConfig::default();
    let obs = |h: f64, d: Option<f64>| TargetObservation { bbox: BoundingBox::new(0.0, 0.0, 0.1, h), depth: d };
    let fe = |h| select_camera(CameraKind::Fisheye, Some(&obs(h, None)), &cfg);
    let rg = |d| select_camera(CameraKind::Rgbd, Some(&obs(0.5, Some(d))), &cfg);
    ensure(fe(0.45) == CameraKind::Fisheye && fe(0.45f64.next_down()) == CameraKind::Rgbd, || "0.45 height trigger".into())?;
    ensure(rg(1.5) == CameraKind::Rgbd && rg(1.5f64.next_down()) == CameraKind::Fisheye, || "1.5 m trigger".into())?;
    for _ in 0..1000 {
        let h = r.random_range(0.0..1.0);
        let d = r.random_range(0.0..8.0);
        ensure((fe(h) == CameraKind::Rgbd) == (h < 0.45), || format!("height {h}"))?;
        ensure((rg(d) == CameraKind::Fisheye) == (d < 1.5), || format!("depth {d}"))?;
    }
    Ok(2002)
}

fn controller_invariants() -> Outcome {
    let mut r = rng(6);
    let scenes = planner_clearance(&mut r)?;
    let episodes = search_spin_sign(&mut r)?;
    let switches = camera_switch(&mut r)?;
    Ok(format!("{scenes} planner scenes clear, {episodes} search episodes spin toward the last-seen side, {switches} switch checks"))
}

fn trend_suite() -> Outcome {
    let started = Instant::now();
    let seeds: Vec<u64> = (0..25).collect();
    let outcome = run_suite(&[SimConfig::default()], &VariantConfig::presets(), &seeds);
    ensure(outcome.failures.is_empty(), || format!("{} trials failed", outcome.failures.len()))?;
    println!("{}", render_table(&outcome.summary));
    let checks = check_trends(&outcome.summary);
    for c in &checks {
        println!("  {} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    ensure(checks.iter().all(|c| c.passed), || "trend check failed".into())?;
    within_time(started, Duration::from_secs(300), "trend suite")?;
    Ok(format!("7 variants × 25 seeds, (a)–(d) hold, {:.0} s", started.elapsed().as_secs_f64()))
}

fn determinism() -> Outcome {
    let config = SimConfig::default();
    let mut n = 0;
    for (variant, seed) in [("ours", 3), ("ours_wo_motion", 11), ("ours_wo_reid", 5), ("ours_wo_pathplanning", 8)] {
        let v = VariantConfig::preset(variant).unwrap();
        let a = run_trial(&config, &v, seed).map_err(|e| e.to_string())?;
        let b = run_trial(&config, &v, seed).map_err(|e| e.to_string())?;
        let bytes = a.log.to_jsonl();
        ensure(bytes == b.log.to_jsonl(), || format!("{variant} seed {seed}: logs differ"))?;
        let replayed = TickLog::read_jsonl(bytes.as_slice()).map_err(|e| e.to_string())?;
        let m = compute_metrics(&replayed).map_err(|e| e.to_string())?;
        ensure(m == a.result.metrics, || format!("{variant} seed {seed}: replay {m:?} vs {:?}", a.result.metrics))?;
        n += 1;
    }
    Ok(format!("{n} trials rerun byte-identical, replayed metrics exact"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("unit oracles", unit_oracles),
        ("re-id contract", reid_contract),
        ("face-body matching", face_body_matching),
        ("registration comparison", registration_comparison),
        ("latency model", latency_model),
        ("controller invariants", controller_invariants),
        ("trend suite", trend_suite),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
