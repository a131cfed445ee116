use congest_mst::cover::{compute_cover, message_bound, sparsity_bound, verify_cover};
use congest_mst::graph::{generate_grid, generate_path, generate_random_connected};

#[test]
fn random_sweep_passes_every_property() {
    for seed in 0..50u64 {
        let n = 20 + (seed as usize * 7) % 80;
        let m = n + (seed as usize * 13) % (2 * n);
        let g = generate_random_connected::<u64>(n, m, seed).unwrap();
        let radius = 1 + seed % 4;
        let (cover, metrics) = compute_cover(&g, radius, seed).unwrap();
        let r = verify_cover(&cover, &g);
        assert!(r.passed(), "seed {seed}: {r:?}");
        assert!((metrics.messages_total as f64) <= message_bound(n, g.m()), "seed {seed}");
    }
}

#[test]
fn random_64_128_radius_4() {
    let g = generate_random_connected::<u64>(64, 128, 5).unwrap();
    let (cover, _) = compute_cover(&g, 4, 5).unwrap();
    let r = verify_cover(&cover, &g);
    assert!(r.passed());
    assert!(r.max_membership as f64 <= sparsity_bound(64));
}

#[test]
fn structured_families() {
    let path = generate_path::<u64>(120).unwrap();
    let grid = generate_grid::<u64>(9, 11, 3).unwrap();
    for (g, radius) in [(&path, 3), (&path, 10), (&grid, 2), (&grid, 5)] {
        let (cover, _) = compute_cover(g, radius, 11).unwrap();
        let r = verify_cover(&cover, g);
        assert!(r.passed(), "{r:?}");
    }
}
