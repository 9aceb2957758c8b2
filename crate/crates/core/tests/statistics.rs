use statrs::distribution::{ChiSquared, ContinuousCDF};
use viewdir_core::coverage::{coverage_measure, sample_surface_auto, CoverageOptions};
use viewdir_core::evaluator::{OracleParams, SyntheticOracle};
use viewdir_core::fvs::{fvs_select, FvsConfig};
use viewdir_core::igs::{igs_run, IgsConfig, Sampler};
use viewdir_core::mesh::TriangleMesh;
use viewdir_core::metrics::{DistanceSpec, Spatial};
use viewdir_core::par::Exec;
use viewdir_core::random::rng_from_seed;
use viewdir_core::relax::{lloyd_relax_traced, sample_support, LloydConfig};
use viewdir_core::split::{lemniscate_band_poses, uniform_sphere_poses};
use viewdir_core::{Intrinsics, Vec3, ViewSet};

fn sphere_pool(n: usize) -> ViewSet {
    ViewSet::new(uniform_sphere_poses(n, 1.0, &Vec3::zeros(), None, "v").unwrap()).unwrap()
}

#[test]
fn flat_zipf_selection_is_uniform() {
    let set = sphere_pool(100);
    let params = OracleParams {
        noise_sd: 0.2,
        ..Default::default()
    };
    let mut counts = vec![0u64; set.len()];
    let runs = 500;
    for seed in 0..runs {
        let cfg = IgsConfig {
            initial_k: 5,
            schedule: vec![5, 5],
            sampler: Sampler::Zipf { gamma: 1e-9 },
            relaxation: None,
            seed,
        };
        let mut ev = SyntheticOracle::new(OracleParams { seed, ..params.clone() }).unwrap();
        for &i in igs_run(&set, &cfg, &mut ev).unwrap().set.selected() {
            counts[i] += 1;
        }
    }
    let expected = (runs * 15) as f64 / set.len() as f64;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let p = 1.0 - ChiSquared::new((set.len() - 1) as f64).unwrap().cdf(chi2);
    assert!(p > 0.001, "chi-square p = {p}");
}

#[test]
fn uniform_cameras_cover_more_evenly_than_a_band() {
    let mesh = TriangleMesh::icosphere(3, 1.0, Vec3::zeros());
    let k = Intrinsics::from_fov_x(200, 200, 0.6911112070083618);
    let uniform = uniform_sphere_poses(200, 3.0, &Vec3::zeros(), Some(k), "u").unwrap();
    for seed in 0..3 {
        let samples = sample_surface_auto(&mesh, 5_000, seed).unwrap();
        let band = lemniscate_band_poses(200, 3.0, &Vec3::zeros(), Some(k), seed).unwrap();
        let opts = CoverageOptions::default();
        let vu =
            viewdir_core::coverage::coverage_variance(&coverage_measure(&mesh, &samples, &uniform, &opts).unwrap());
        let vb = viewdir_core::coverage::coverage_variance(&coverage_measure(&mesh, &samples, &band, &opts).unwrap());
        assert!(vu < vb, "seed {seed}: {vu} vs {vb}");
    }
}

#[test]
fn sequential_and_parallel_paths_agree() {
    let mesh = TriangleMesh::icosphere(3, 1.0, Vec3::zeros());
    let k = Intrinsics::from_fov_x(96, 96, 0.7);
    let cams = uniform_sphere_poses(12, 3.0, &Vec3::zeros(), Some(k), "c").unwrap();
    let samples = sample_surface_auto(&mesh, 3_000, 1).unwrap();
    let field = |exec| {
        coverage_measure(
            &mesh,
            &samples,
            &cams,
            &CoverageOptions {
                exec,
                ..Default::default()
            },
        )
        .unwrap()
    };
    assert_eq!(field(Exec::Sequential), field(Exec::Parallel));

    let set = sphere_pool(300);
    let support = sample_support(&set, &LloydConfig::default(), &mut rng_from_seed(2)).unwrap();
    let fixed: Vec<Vec3> = set.centers()[..20].to_vec();
    let proposals: Vec<Vec3> = set.centers()[150..160].to_vec();
    let relax = |exec| {
        lloyd_relax_traced(
            &fixed,
            &proposals,
            &support,
            &LloydConfig {
                exec,
                ..Default::default()
            },
        )
        .unwrap()
    };
    assert_eq!(relax(Exec::Sequential), relax(Exec::Parallel));

    let spec = DistanceSpec::spatial_only(Spatial::GreatCircle);
    let fvs = |exec| fvs_select(&set, &FvsConfig::new(40, spec.clone()).with_seed(3).with_exec(exec)).unwrap();
    assert_eq!(fvs(Exec::Sequential).selected(), fvs(Exec::Parallel).selected());
}
