//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use statrs::distribution::{ChiSquared, ContinuousCDF};
use viewdir_core::coverage::{coverage_measure, coverage_variance, sample_surface_auto, CoverageOptions};
use viewdir_core::evaluator::{oracle_scores, Hotspot, OracleParams, SyntheticOracle};
use viewdir_core::fvs::{fvs_trace, maximin_radius, FvsConfig};
use viewdir_core::igs::vmf::{mean_resultant_length, vmf_sample};
use viewdir_core::igs::zipf::{zipf_draw, zipf_pmf};
use viewdir_core::igs::{igs_run, ErrorRanking, IgsConfig, Sampler};
use viewdir_core::io::{read_colmap_text, read_transforms, write_colmap_text, write_transforms};
use viewdir_core::mesh::{Ray, TriangleMesh};
use viewdir_core::metrics::{d_euc, d_gc, d_photo, view_distance, DistanceSpec, Spatial};
use viewdir_core::random::{random_select, rng_from_seed};
use viewdir_core::relax::{lloyd_relax_traced, Domain, LloydConfig};
use viewdir_core::split::{lemniscate_band_poses, uniform_sphere_poses};
use viewdir_core::{CameraView, CovisibilityMatrix, Error, Intrinsics, Mat3, Vec3, ViewSet};

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn check(cond: bool, what: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn unit(rng: &mut impl Rng) -> Vec3 {
    Vec3::from(UnitSphere.sample(rng))
}

fn view(id: &str, c: Vec3) -> CameraView {
    CameraView::new(id, c, Mat3::identity(), None).unwrap()
}

fn metrics() -> Outcome {
    let x = Vec3::x();
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    check(close(d_gc(&x, &Vec3::y()).unwrap(), PI / 2.0), "d_gc orthogonal")?;
    check(close(d_gc(&x, &x).unwrap(), 0.0), "d_gc identity")?;
    check(close(d_gc(&x, &-x).unwrap(), PI), "d_gc antipodal")?;
    check(
        close(d_euc(&Vec3::zeros(), &Vec3::new(1.0, 2.0, 2.0)), 9.0),
        "d_euc 1+4+4",
    )?;
    check(
        close(d_euc(&Vec3::new(0.3, -2.0, 5.0), &Vec3::new(0.3, -2.0, 5.0)), 0.0),
        "d_euc a=b",
    )?;
    check(close(d_euc(&x, &Vec3::zeros()), 1.0), "d_euc unit")?;

    let ids: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
    let a = CovisibilityMatrix::new(ids, vec![9, 8, 4, 8, 9, 0, 4, 0, 9]).unwrap();
    check(close(d_photo("a", "b", &a).unwrap(), 0.0), "d_photo max pair")?;
    check(close(d_photo("b", "c", &a).unwrap(), 1.0), "d_photo no shared points")?;
    check(close(d_photo("a", "c", &a).unwrap(), 0.5), "d_photo half")?;

    let euc = DistanceSpec::spatial_only(Spatial::Euclidean);
    let o = view("a", Vec3::zeros());
    check(
        close(view_distance(&o, &view("b", x), &euc).unwrap(), 1.0),
        "combined, alpha 0",
    )?;
    let photo = DistanceSpec::spatial_only(Spatial::GreatCircle).with_photo(1.0, Arc::new(a.clone()));
    let half = Vec3::new(0.5f64.cos(), 0.5f64.sin(), 0.0);
    check(
        close(view_distance(&view("b", x), &view("c", half), &photo).unwrap(), 1.5),
        "combined additivity",
    )?;
    check(view_distance(&o, &o, &euc).unwrap() == 0.0, "reflexivity")?;

    let mut rng = rng_from_seed(1);
    let names = ["a", "b", "c"];
    for i in 0..10_000 {
        let (u, v) = (unit(&mut rng), unit(&mut rng));
        let (p, q) = (names[i % 3], names[(i / 3) % 3]);
        let spec = match i % 3 {
            0 => DistanceSpec::spatial_only(Spatial::GreatCircle),
            1 => DistanceSpec::spatial_only(Spatial::Euclidean),
            _ => DistanceSpec::spatial_only(Spatial::GreatCircle).with_photo(rng.random::<f64>(), Arc::new(a.clone())),
        };
        let (vu, vv) = (view(p, u), view(q, v));
        let duv = view_distance(&vu, &vv, &spec).unwrap();
        let dvu = view_distance(&vv, &vu, &spec).unwrap();
        check(duv == dvu, format!("asymmetric pair {i}: {duv} vs {dvu}"))?;
        check(duv >= 0.0, format!("negative distance on pair {i}"))?;
    }
    Ok("9 examples within 1e-12, 10^4 pairs symmetric and non-negative".into())
}

fn fvs_maximin() -> Outcome {
    let spec = DistanceSpec::spatial_only(Spatial::Euclidean);
    let (mut fvs_sum, mut rs_sum) = (0.0, 0.0);
    for seed in 0..100u64 {
        let mut rng = rng_from_seed(1000 + seed);
        let views: Vec<CameraView> = (0..50)
            .map(|i| view(&format!("p{i:02}"), Vec3::new(rng.random(), rng.random(), rng.random())))
            .collect();
        let pool = ViewSet::new(views).unwrap();
        let (sel, steps) =
            fvs_trace(&pool, &FvsConfig::new(10, spec.clone()).with_seed(seed)).map_err(|e| e.to_string())?;
        let mut chosen = vec![steps[0].view];
        for step in &steps[1..] {
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for c in (0..50).filter(|c| !chosen.contains(c)) {
                let m = chosen
                    .iter()
                    .map(|&s| d_euc(pool.view(c).center(), pool.view(s).center()))
                    .fold(f64::INFINITY, f64::min);
                if m > best.0 {
                    best = (m, c);
                }
            }
            check(
                step.view == best.1,
                format!("pool {seed}: picked {} but scan prefers {}", step.view, best.1),
            )?;
            check(
                step.min_distance == Some(best.0),
                format!("pool {seed}: recorded radius differs"),
            )?;
            chosen.push(step.view);
        }
        fvs_sum += maximin_radius(&sel, &spec).unwrap();
        rs_sum += maximin_radius(&random_select(&pool, 10, seed).unwrap(), &spec).unwrap();
    }
    let (f, r) = (fvs_sum / 100.0, rs_sum / 100.0);
    check(f > r, format!("mean maximin radius fvs {f:.4} <= random {r:.4}"))?;
    Ok(format!(
        "every pick maximin on 100 pools; mean radius fvs {f:.4} vs random {r:.4}"
    ))
}

fn zipf() -> Outcome {
    for q in [2usize, 10, 10_000] {
        for gamma in [1e-9, 10.0, 1e3] {
            let pmf = zipf_pmf(q, gamma).unwrap();
            let s: f64 = pmf.iter().sum();
            check((s - 1.0).abs() <= 1e-12, format!("pmf sum {s} for q={q} gamma={gamma}"))?;
        }
    }

    let ranking = |q: usize| {
        let items: Vec<usize> = (0..q).collect();
        let scores: Vec<f64> = (0..q).map(|i| ((i * 7) % q) as f64).collect();
        ErrorRanking::new(&items, &scores, |i| i)
    };
    let r10 = ranking(10);
    let mut rng = rng_from_seed(3);
    let n = 100_000;
    let mut counts = [0u64; 10];
    for _ in 0..n {
        counts[zipf_draw(&r10, 1e-9, 1, &mut rng).unwrap()[0]] += 1;
    }
    let expected = n as f64 / 10.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p_uniform = 1.0 - ChiSquared::new(9.0).unwrap().cdf(chi2);
    check(p_uniform > 0.001, format!("chi-square p = {p_uniform:.2e}"))?;

    let worst = r10.order()[0];
    let hits = (0..10_000)
        .filter(|_| zipf_draw(&r10, 50.0, 1, &mut rng).unwrap()[0] == worst)
        .count();
    let frac = hits as f64 / 10_000.0;
    check(frac > 0.99, format!("gamma=50 picks the worst in {frac}"))?;

    // Ordered pairs (i, j): P = p_i · p_j / (1 − p_i).
    let gamma = 2.0;
    let w: Vec<f64> = (0..3).map(|r| (-gamma * r as f64 / 2.0).exp()).collect();
    let p: Vec<f64> = w.iter().map(|x| x / w.iter().sum::<f64>()).collect();
    let mut inclusion = [0.0; 3];
    for i in 0..3 {
        for j in (0..3).filter(|&j| j != i) {
            let pr = p[i] * p[j] / (1.0 - p[i]);
            inclusion[i] += pr;
            inclusion[j] += pr;
        }
    }
    let r3 = ranking(3);
    let mut seen = [0u64; 3];
    for _ in 0..n {
        for item in zipf_draw(&r3, gamma, 2, &mut rng).unwrap() {
            seen[r3.rank_of(item).unwrap()] += 1;
        }
    }
    let mut worst_z: f64 = 0.0;
    for r in 0..3 {
        let pi = inclusion[r];
        let sd = (pi * (1.0 - pi) / n as f64).sqrt();
        let z = (seen[r] as f64 / n as f64 - pi).abs() / sd;
        worst_z = worst_z.max(z);
        check(z <= 3.0, format!("rank {r} inclusion off by {z:.2} sigma"))?;
    }
    Ok(format!(
        "chi-square p {p_uniform:.3}, worst-pick rate {frac:.4}, inclusion within {worst_z:.2} sigma"
    ))
}

/// Asymptotic Kolmogorov p-value of a one-sample KS statistic.
fn ks_p_value(d: f64, n: usize) -> f64 {
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let term = 2.0 * (-1f64).powi(k - 1) * (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        p += term;
        if term.abs() < 1e-12 {
            break;
        }
    }
    p.clamp(0.0, 1.0)
}

fn vmf() -> Outcome {
    let mean = Vec3::new(1.0, 2.0, 3.0).normalize();
    let e1 = mean.cross(&Vec3::x()).normalize();
    let e2 = mean.cross(&e1);
    let n = 100_000;
    let mut notes = Vec::new();
    for (s, kappa) in [0.5, 5.0, 50.0].into_iter().enumerate() {
        let mut rng = rng_from_seed(40 + s as u64);
        let mut resultant = 0.0;
        let mut phis = Vec::with_capacity(n);
        for _ in 0..n {
            let x = vmf_sample(&mean, kappa, &mut rng);
            resultant += x.dot(&mean);
            phis.push(x.dot(&e2).atan2(x.dot(&e1)).rem_euclid(2.0 * PI) / (2.0 * PI));
        }
        let rbar = resultant / n as f64;
        let target = 1.0 / kappa.tanh() - 1.0 / kappa;
        check(
            (rbar - target).abs() <= 0.005,
            format!("kappa {kappa}: mean resultant {rbar:.4} vs {target:.4}"),
        )?;
        check(
            (mean_resultant_length(kappa) - target).abs() < 1e-12,
            "closed form disagrees",
        )?;
        phis.sort_by(f64::total_cmp);
        let d = phis
            .iter()
            .enumerate()
            .map(|(i, &u)| (u - i as f64 / n as f64).max((i + 1) as f64 / n as f64 - u))
            .fold(0.0, f64::max);
        let p = ks_p_value(d, n);
        check(p > 0.01, format!("kappa {kappa}: azimuth KS p = {p:.4}"))?;
        notes.push(format!("k={kappa}: R {rbar:.4}/{target:.4}, KS p {p:.2}"));
    }
    Ok(notes.join("; "))
}

fn lloyd() -> Outcome {
    let mut worst_rise = f64::NEG_INFINITY;
    let mut spread = Vec::new();
    for seed in 0..20u64 {
        let mut rng = rng_from_seed(500 + seed);
        let domain = if seed % 2 == 0 {
            Domain::Sphere
        } else {
            Domain::ConvexHull
        };
        let cfg = LloydConfig {
            seed,
            ..LloydConfig::new(domain)
        };
        let support: Vec<Vec3> = (0..5_000).map(|_| unit(&mut rng)).collect();
        let fixed: Vec<Vec3> = (0..8).map(|_| unit(&mut rng)).collect();
        let before = fixed.clone();

        let proposals: Vec<Vec3> = (0..12).map(|_| unit(&mut rng)).collect();
        let (_, energy) = lloyd_relax_traced(&fixed, &proposals, &support, &cfg).map_err(|e| e.to_string())?;
        check(energy.len() == 9, "expected 8 iterations")?;
        for w in energy.windows(2) {
            worst_rise = worst_rise.max(w[1] - w[0]);
            check(
                w[1] <= w[0] + 1e-9,
                format!("config {seed}: energy rose {} -> {}", w[0], w[1]),
            )?;
        }
        let same = fixed
            .iter()
            .zip(&before)
            .all(|(a, b)| a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        check(same, format!("config {seed}: fixed centers moved"))?;

        // Proposals within 0.1 rad of the north pole.
        let clustered: Vec<Vec3> = (0..12)
            .map(|_| {
                let (t, phi) = (0.1 * rng.random::<f64>(), 2.0 * PI * rng.random::<f64>());
                Vec3::new(t.sin() * phi.cos(), t.sin() * phi.sin(), t.cos())
            })
            .collect();
        let sphere = LloydConfig {
            seed,
            ..LloydConfig::new(Domain::Sphere)
        };
        let (relaxed, _) = lloyd_relax_traced(&fixed, &clustered, &support, &sphere).map_err(|e| e.to_string())?;
        let min_gc = |pts: &[Vec3]| {
            let mut m = f64::INFINITY;
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    m = m.min(d_gc(&pts[i], &pts[j]).unwrap());
                }
            }
            m
        };
        let (a, b) = (min_gc(&clustered), min_gc(&relaxed));
        check(b > a, format!("config {seed}: min separation {a:.4} -> {b:.4}"))?;
        spread.push(b / a);
    }
    let least = spread.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(format!("largest per-step energy change {worst_rise:.2e}; dispersion in 20/20, min separation grew at least {least:.1}x"))
}

fn coverage() -> Outcome {
    // Triangle soup in the unit cube.
    let mut rng = rng_from_seed(61);
    let vertices: Vec<Vec3> = (0..1500)
        .map(|_| Vec3::new(rng.random(), rng.random(), rng.random()))
        .collect();
    let triangles: Vec<[u32; 3]> = (0..500u32).map(|t| [3 * t, 3 * t + 1, 3 * t + 2]).collect();
    let soup = TriangleMesh::new(vertices, triangles).map_err(|e| e.to_string())?;
    let mut hits = 0;
    for i in 0..1000 {
        let origin = Vec3::new(rng.random(), rng.random(), rng.random()) * 3.0 - Vec3::repeat(1.0);
        let target = Vec3::new(rng.random(), rng.random(), rng.random());
        let ray = if i % 2 == 0 {
            Ray::new(origin, (target - origin).normalize())
        } else {
            Ray::new(origin, unit(&mut rng))
        };
        let (fast, slow) = (soup.first_hit(&ray), soup.first_hit_brute_force(&ray));
        check(fast == slow, format!("ray {i}: {fast:?} vs {slow:?}"))?;
        hits += fast.is_some() as usize;
    }

    let k = Intrinsics::from_fov_x(128, 128, 0.6911112070083618);
    let sphere = TriangleMesh::icosphere(3, 1.0, Vec3::zeros());
    let samples = sample_surface_auto(&sphere, 2_000, 7).map_err(|e| e.to_string())?;
    let cams = uniform_sphere_poses(24, 3.0, &Vec3::zeros(), Some(k), "c").unwrap();
    let opts = CoverageOptions {
        stride: 1,
        ..Default::default()
    };
    let base = coverage_measure(&sphere, &samples, &cams, &opts).map_err(|e| e.to_string())?;

    let rot =
        *nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(Vec3::new(0.3, -0.5, 0.8)), 1.1).matrix();
    let shift = Vec3::new(2.0, -1.0, 0.5);
    let moved_cams: Vec<CameraView> = cams.iter().map(|c| c.transformed(&rot, &shift).unwrap()).collect();
    let moved = coverage_measure(
        &sphere.transformed(&rot, &shift).unwrap(),
        &samples.transformed(&rot, &shift),
        &moved_cams,
        &opts,
    )
    .map_err(|e| e.to_string())?;
    let mut worst_rel: f64 = 0.0;
    for (a, b) in base.raw.iter().zip(&moved.raw) {
        let rel = if a.max(*b) > 0.0 {
            (a - b).abs() / a.max(*b)
        } else {
            0.0
        };
        worst_rel = worst_rel.max(rel);
    }
    check(
        worst_rel <= 1e-9,
        format!("rigid motion changed raw coverage by {worst_rel:.3e} relative"),
    )?;

    let (v1, v2) = cams.split_at(10);
    let f1 = coverage_measure(&sphere, &samples, v1, &opts).unwrap();
    let f2 = coverage_measure(&sphere, &samples, v2, &opts).unwrap();
    let additive = base
        .raw
        .iter()
        .zip(f1.raw.iter().zip(&f2.raw))
        .all(|(u, (a, b))| *u == a + b);
    check(additive, "union differs from the sum of parts")?;

    let k800 = Intrinsics::from_fov_x(800, 800, 0.6911112070083618);
    let mesh = TriangleMesh::icosphere(4, 1.0, Vec3::zeros());
    let uniform = uniform_sphere_poses(200, 3.0, &Vec3::zeros(), Some(k800), "u").unwrap();
    let opts = CoverageOptions::default();
    let mut rows = Vec::new();
    for seed in 0..5u64 {
        let samples = sample_surface_auto(&mesh, 20_000, seed).map_err(|e| e.to_string())?;
        let band = lemniscate_band_poses(200, 3.0, &Vec3::zeros(), Some(k800), seed).unwrap();
        let vu = coverage_variance(&coverage_measure(&mesh, &samples, &uniform, &opts).unwrap());
        let vb = coverage_variance(&coverage_measure(&mesh, &samples, &band, &opts).unwrap());
        check(
            vu < vb,
            format!("seed {seed}: variance uniform {vu:.4} >= band {vb:.4}"),
        )?;
        rows.push(format!("{vu:.4}<{vb:.4}"));
    }
    Ok(format!(
        "1000 rays agree ({hits} hits), rigid error {worst_rel:.1e}, additivity exact, variance 5/5 [{}]",
        rows.join(" ")
    ))
}

fn oversampling() -> Outcome {
    let pool = ViewSet::new(uniform_sphere_poses(200, 1.0, &Vec3::zeros(), None, "v").unwrap()).unwrap();
    let h = Vec3::new(0.3, 0.2, 0.93).normalize();
    let radius = 0.7;
    let k = 5;
    let (mut greedy_in, mut relax_in, mut wins) = (0.0, 0.0, 0);
    for seed in 0..20u64 {
        let params = OracleParams {
            hotspots: vec![Hotspot {
                center: h,
                difficulty: 5.0,
                radius,
            }],
            base_quality: 0.0,
            gain_per_view: 1.0,
            noise_sd: 0.05,
            seed,
        };
        let mut res = Vec::new();
        for relax in [false, true] {
            let cfg = IgsConfig {
                initial_k: k,
                schedule: vec![20],
                sampler: Sampler::Greedy,
                relaxation: relax.then(|| LloydConfig {
                    seed,
                    ..LloydConfig::new(Domain::Sphere)
                }),
                seed,
            };
            let mut oracle = SyntheticOracle::new(params.clone()).unwrap();
            let out = igs_run(&pool, &cfg, &mut oracle).map_err(|e| e.to_string())?;
            let picks = &out.set.selected()[k..k + 20];
            let inside = picks
                .iter()
                .filter(|&&i| d_gc(pool.view(i).center(), &h).unwrap() <= radius)
                .count();
            let report = oracle_scores(&out.set, &params).unwrap();
            let mean = report.scores.values().sum::<f64>() / report.scores.len() as f64;
            res.push((inside as f64 / 20.0, mean));
        }
        greedy_in += res[0].0 / 20.0;
        relax_in += res[1].0 / 20.0;
        wins += (res[1].1 > res[0].1) as usize;
    }
    let summary = format!("inside hotspot: greedy {greedy_in:.2}, relaxed {relax_in:.2}; relaxed wins {wins}/20");
    check(greedy_in >= 0.6 && relax_in < 0.4 && wins >= 18, summary.clone())?;
    Ok(summary)
}

fn determinism() -> Outcome {
    let pool = fixture("synthetic_pool.json");
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let run = |name: &str, jobs: &str| -> Result<BTreeMap<String, Vec<u8>>, String> {
        let out = root.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_viewdir"))
            .args([
                "select",
                "--method",
                "fvs",
                "--budget",
                "30",
                "--seeds",
                "0,1,2,3,4,5,6,7",
                "--jobs",
                jobs,
            ])
            .arg("--dataset")
            .arg(&pool)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        let mut files = BTreeMap::new();
        for entry in std::fs::read_dir(&out).map_err(|e| e.to_string())? {
            let path = entry.map_err(|e| e.to_string())?.path();
            files.insert(
                path.file_name().unwrap().to_string_lossy().into_owned(),
                std::fs::read(&path).unwrap(),
            );
        }
        Ok(files)
    };
    let a = run("a", "1")?;
    let b = run("b", "1")?;
    let c = run("c", "4")?;
    check(a.len() == 8, format!("expected 8 manifests, found {}", a.len()))?;
    check(a == b, "two runs differ")?;
    check(a == c, "--jobs 1 and --jobs 4 differ")?;
    Ok(format!(
        "{} manifests byte-identical across reruns and job counts",
        a.len()
    ))
}

fn write_colmap(dir: &Path, points: &str) {
    let cams = "1 PINHOLE 640 480 500 500 320 240\n";
    let images = "1 1 0 0 0 0 0 4 1 a.png\n\n2 1 0 0 0 1 0 4 1 b.png\n\n3 1 0 0 0 2 0 4 1 c.png\n\n";
    std::fs::write(dir.join("cameras.txt"), cams).unwrap();
    std::fs::write(dir.join("images.txt"), images).unwrap();
    std::fs::write(dir.join("points3D.txt"), points).unwrap();
}

fn io_fidelity() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;

    let original = read_transforms(fixture("transforms_small.json")).map_err(|e| e.to_string())?;
    let (first, second) = (tmp.path().join("t1.json"), tmp.path().join("t2.json"));
    write_transforms(&first, &original).map_err(|e| e.to_string())?;
    let back = read_transforms(&first).map_err(|e| e.to_string())?;
    write_transforms(&second, &back).map_err(|e| e.to_string())?;
    check(
        std::fs::read(&first).unwrap() == std::fs::read(&second).unwrap(),
        "transforms rewrite not stable",
    )?;
    for (a, b) in original.views().iter().zip(back.views()) {
        check(
            a.id() == b.id() && a.intrinsics() == b.intrinsics(),
            format!("view {} changed", a.id()),
        )?;
        check(
            (a.center() - b.center()).norm() <= 1e-12,
            format!("center of {} moved", a.id()),
        )?;
        check(
            (a.rotation() - b.rotation()).norm() <= 1e-12,
            format!("rotation of {} changed", a.id()),
        )?;
    }

    let (set, covis) = read_colmap_text(fixture("colmap_tiny")).map_err(|e| e.to_string())?;
    let out = tmp.path().join("colmap");
    std::fs::create_dir(&out).unwrap();
    write_colmap_text(&out, &set, &covis).map_err(|e| e.to_string())?;
    let (set2, covis2) = read_colmap_text(&out).map_err(|e| e.to_string())?;
    check(covis == covis2, "co-visibility changed on round trip")?;
    for (a, b) in set.views().iter().zip(set2.views()) {
        check(
            a.id() == b.id() && a.intrinsics() == b.intrinsics(),
            format!("view {} changed", a.id()),
        )?;
        check(
            (a.center() - b.center()).norm() <= 1e-9,
            format!("center of {} moved", a.id()),
        )?;
        check(
            (a.rotation() - b.rotation()).norm() <= 1e-9,
            format!("rotation of {} changed", a.id()),
        )?;
    }
    let c = |x: &str, y: &str| covis.count(x, y).unwrap();
    check(
        (
            c("img_a.png", "img_b.png"),
            c("img_a.png", "img_c.png"),
            c("img_b.png", "img_c.png"),
        ) == (2, 1, 1),
        "fixture co-visibility",
    )?;

    let cases: [(&str, [u64; 3]); 3] = [
        ("1 0 0 0 1 1 1 0.1 1 0 2 0 3 0\n", [1, 1, 1]),
        ("1 0 0 0 1 1 1 0.1 1 0\n2 0 0 0 1 1 1 0.1 2 0\n", [0, 0, 0]),
        ("1 0 0 0 1 1 1 0.1 1 0 2 0\n2 1 0 0 1 1 1 0.1 1 1 2 1\n", [2, 0, 0]),
    ];
    for (n, (points, want)) in cases.iter().enumerate() {
        let dir = tmp.path().join(format!("case{n}"));
        std::fs::create_dir(&dir).unwrap();
        write_colmap(&dir, points);
        let (_, a) = read_colmap_text(&dir).map_err(|e| e.to_string())?;
        let got = [
            a.count("a.png", "b.png").unwrap(),
            a.count("a.png", "c.png").unwrap(),
            a.count("b.png", "c.png").unwrap(),
        ];
        check(
            got == *want && a.is_symmetric(),
            format!("case {n}: {got:?} vs {want:?}"),
        )?;
        if *want == [0, 0, 0] {
            check(
                matches!(d_photo("a.png", "b.png", &a), Err(Error::EmptyCovisibility)),
                "empty matrix accepted",
            )?;
        }
    }
    Ok("transforms and COLMAP round trips stable; co-visibility fixture A12=2 A13=1 A23=1; 3 track cases exact".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("metric correctness", Duration::from_secs(1), metrics),
        ("fvs maximin", Duration::from_secs(10), fvs_maximin),
        ("zipf sampler", Duration::from_secs(30), zipf),
        ("vmf sampler", Duration::from_secs(30), vmf),
        ("lloyd relaxation", Duration::from_secs(60), lloyd),
        ("coverage measure", Duration::from_secs(300), coverage),
        ("oversampling pathology", Duration::from_secs(120), oversampling),
        ("end-to-end determinism", Duration::from_secs(10), determinism),
        ("io fidelity", Duration::from_secs(1), io_fidelity),
    ];
    let mut failed = 0;
    for (n, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let (verdict, detail) = match result {
            Ok(d) if elapsed <= limit => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; took longer than {limit:?}")),
            Err(e) => ("FAIL", e),
        };
        failed += (verdict == "FAIL") as usize;
        println!(
            "criterion {}: {verdict} {name} ({:.2}s) {detail}",
            n + 1,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} of 9 criteria failed");
        std::process::exit(1);
    }
}
