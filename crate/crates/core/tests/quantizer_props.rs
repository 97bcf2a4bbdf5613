use modmi::quantizer::{assign, fit, fit_with_labels, FitParams, MONOTONE_SLACK};
use modmi::synthetic::gen_gaussian_mixture;
use modmi::{rng, FeatureMatrix};
use rand::Rng as _;

fn random_matrix(seed: u64, rows: usize, dims: usize, grid: Option<i32>) -> FeatureMatrix {
    let mut r = rng::seeded(seed);
    let values = (0..rows * dims)
        .map(|_| match grid {
            // Coarse grids produce duplicate rows.
            Some(g) => r.random_range(0..g) as f32,
            None => r.random_range(-5.0f32..5.0),
        })
        .collect();
    FeatureMatrix::new(rows, dims, values, 25.0, "x").unwrap()
}

fn distinct_rows(x: &FeatureMatrix) -> usize {
    let mut rows: Vec<Vec<u32>> = x.iter_rows().map(|r| r.iter().map(|v| v.to_bits()).collect()).collect();
    rows.sort();
    rows.dedup();
    rows.len()
}

#[test]
fn distortion_never_increases() {
    for seed in 0..100u64 {
        let rows = 20 + (seed as usize * 7) % 180;
        let dims = 1 + (seed as usize) % 6;
        let grid = (seed % 3 == 0).then_some(4);
        let x = random_matrix(seed, rows, dims, grid);
        let k = (1 + (seed as usize * 3) % 12).min(distinct_rows(&x));
        let params = FitParams { k, seed, tol: 0.0, max_iter: 50, normalize: seed % 2 == 1 };
        let (cb, labels) = fit_with_labels(&x, &params).unwrap();
        let t = cb.training().unwrap();
        for w in t.distortion_history.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + MONOTONE_SLACK), "seed {seed}: {:?}", t.distortion_history);
        }
        assert!(t.final_distortion >= 0.0);
        assert!(t.cluster_sizes.iter().all(|&s| s > 0), "seed {seed}: empty cluster");
        let assigned = assign(&cb, &x).unwrap();
        assert_eq!(assigned.symbols(), labels.as_slice());
        assert_eq!(assigned.alphabet_size() as usize, k);
        assert_eq!(assigned.distinct_symbols(), k, "seed {seed}");
    }
}

#[test]
fn k_equal_to_distinct_rows_is_lossless() {
    for seed in 0..20u64 {
        let x = random_matrix(seed, 60, 2, Some(3));
        let k = distinct_rows(&x);
        let cb = fit(&x, &FitParams { k, seed, ..Default::default() }).unwrap();
        assert_eq!(cb.final_distortion(), Some(0.0), "seed {seed}");
    }
}

#[test]
fn fits_are_deterministic_across_thread_counts() {
    let x = random_matrix(5, 3000, 8, None);
    let params = FitParams { k: 40, seed: 17, ..Default::default() };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| fit_with_labels(&x, &params).unwrap())
    };
    let (a, la) = run(1);
    let (b, lb) = run(4);
    assert_eq!(a, b);
    assert_eq!(la, lb);
    assert_eq!(a.digest(), b.digest());
}

#[test]
fn assign_is_idempotent() {
    let x = random_matrix(9, 500, 3, None);
    let cb = fit(&x, &FitParams { k: 7, seed: 2, ..Default::default() }).unwrap();
    assert_eq!(assign(&cb, &x).unwrap(), assign(&cb, &x).unwrap());
}

#[test]
fn recovers_well_separated_blobs() {
    let centers = vec![vec![0.0, 0.0], vec![100.0, 0.0], vec![0.0, 100.0]];
    let (x, truth) = gen_gaussian_mixture(&centers, 0.1, 100, 7).unwrap();
    let cb = fit(&x, &FitParams { k: 3, seed: 7, ..Default::default() }).unwrap();

    // Blob means computed directly from the generated rows.
    for (c, center) in centers.iter().enumerate() {
        let rows: Vec<&[f32]> = x.iter_rows().zip(truth.symbols()).filter(|(_, &t)| t as usize == c).map(|(r, _)| r).collect();
        let mean: Vec<f64> = (0..2).map(|j| rows.iter().map(|r| r[j] as f64).sum::<f64>() / rows.len() as f64).collect();
        let nearest = (0..3)
            .map(|k| {
                let cen = cb.centroid(k);
                ((cen[0] as f64 - mean[0]).powi(2) + (cen[1] as f64 - mean[1]).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-4, "blob {c}");
        let to_center = (0..3)
            .map(|k| {
                let cen = cb.centroid(k);
                ((cen[0] as f64 - center[0]).powi(2) + (cen[1] as f64 - center[1]).powi(2)).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(to_center < 0.1, "blob {c} centroid {to_center} from its center");
    }

    let labels = assign(&cb, &x).unwrap();
    for c in 0..3u32 {
        let ids: Vec<u32> = labels.symbols().iter().zip(truth.symbols()).filter(|(_, &t)| t == c).map(|(&l, _)| l).collect();
        assert!(ids.iter().all(|&l| l == ids[0]), "blob {c} split across clusters");
    }
    assert_eq!(labels.distinct_symbols(), 3);
}
