use spa_core::geometry::{euclidean_dist, MetricMode};
use spa_core::percolation::{connected_components, find_crossings};
use spa_core::rgg::{generate_rgg, radius_for_density};

/// Dense enough that r/5 subsquares are mostly occupied and slabs cross.
#[test]
fn reported_crossings_are_sound_when_they_exist() {
    let mut found = 0;
    let mut full = 0;
    for seed in 0..20u64 {
        let n = 2000 + 150 * seed as usize;
        let snap = generate_rgg(n, radius_for_density(150.0, n), MetricMode::Torus, seed).unwrap();
        let report = find_crossings(&snap).unwrap();
        let labels = connected_components(&snap.graph()).labels;
        let r = snap.r;
        let sw = report.slab_width;
        for (horizontal, slabs) in [(true, &report.horizontal), (false, &report.vertical)] {
            for (k, c) in slabs.iter().enumerate() {
                if !c.crossed {
                    assert!(c.path.is_empty());
                    continue;
                }
                found += 1;
                let along = |v: u32| snap.positions.get(v as usize)[if horizontal { 0 } else { 1 }];
                let across = |v: u32| snap.positions.get(v as usize)[if horizontal { 1 } else { 0 }];
                assert!(along(c.path[0]) <= r / 5.0);
                assert!(along(*c.path.last().unwrap()) >= 1.0 - r / 5.0);
                for &v in &c.path {
                    assert!(across(v) >= k as f64 * sw && across(v) < (k + 1) as f64 * sw);
                    assert_eq!(labels[v as usize], labels[c.path[0] as usize]);
                }
                for w in c.path.windows(2) {
                    let d = euclidean_dist(snap.positions.get(w[0] as usize), snap.positions.get(w[1] as usize));
                    assert!(d <= r / 2.0, "hop {d} > r/2 = {}", r / 2.0);
                }
            }
        }
        if report.all_crossed() {
            full += 1;
            let l = report.spanning_label.expect("full crossing set shares a component");
            assert!(report.horizontal.iter().chain(&report.vertical).flat_map(|c| &c.path).all(|&v| labels[v as usize] == l));
        }
    }
    assert!(found > 0 && full > 0, "found {found} crossings, {full} full reports");
}
