mod common;

use cfnet_core::rng;
use cfnet_core::topology::{
    build_large_scale, central_subnetwork, kmeans_pp_seeds, lloyd, path_loss, sample_network, Point,
};
use cfnet_core::NetworkConfig;
use rand::Rng;

fn naive_lloyd(points: &[Point], mut centres: Vec<Point>, tol: f64, max_sweeps: usize) -> (Vec<usize>, Vec<Point>) {
    let nearest = |p: &Point, cs: &[Point]| {
        let mut best = 0;
        for (i, c) in cs.iter().enumerate() {
            let d = (p.x - c.x).powi(2) + (p.y - c.y).powi(2);
            let db = (p.x - cs[best].x).powi(2) + (p.y - cs[best].y).powi(2);
            if d < db {
                best = i;
            }
        }
        best
    };
    for _ in 0..max_sweeps {
        let labels: Vec<usize> = points.iter().map(|p| nearest(p, &centres)).collect();
        let mut shift: f64 = 0.0;
        for (c, centre) in centres.iter_mut().enumerate() {
            let members: Vec<&Point> = points
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == c)
                .map(|(p, _)| p)
                .collect();
            if members.is_empty() {
                continue;
            }
            let x = members.iter().map(|p| p.x).sum::<f64>() / members.len() as f64;
            let y = members.iter().map(|p| p.y).sum::<f64>() / members.len() as f64;
            shift = shift.max(((x - centre.x).powi(2) + (y - centre.y).powi(2)).sqrt());
            *centre = Point::new(x, y);
        }
        if shift < tol {
            break;
        }
    }
    (points.iter().map(|p| nearest(p, &centres)).collect(), centres)
}

#[test]
fn lloyd_matches_independent_implementation() {
    for seed in 0..10 {
        let mut r = common::rng(seed);
        let pts: Vec<Point> = (0..300)
            .map(|_| Point::new(r.random::<f64>() * 2000.0, r.random::<f64>() * 2000.0))
            .collect();
        let init = kmeans_pp_seeds(&pts, 4, &mut r);
        let ours = lloyd(&pts, init.clone(), 1e-3, 100);
        let (labels, centres) = naive_lloyd(&pts, init, 1e-3, 100);
        assert_eq!(ours.assignment, labels, "seed {seed}");
        for (a, b) in ours.centroids.iter().zip(&centres) {
            assert!(a.dist(b) < 1e-9);
        }
    }
}

#[test]
fn kmeans_result_is_a_local_optimum() {
    let cfg = NetworkConfig {
        total_users: 200,
        ..NetworkConfig::default()
    };
    let net = sample_network(&cfg, 3).unwrap();
    let t = &net.topology;
    let centroids: Vec<Point> = (0..4).map(|m| t.node_centroid(m)).collect();
    let all = t
        .bs_positions
        .iter()
        .zip(&t.bs_assignment)
        .chain(t.user_positions.iter().zip(&t.user_assignment));
    for (p, &label) in all {
        let own = p.dist(&centroids[label]);
        for c in &centroids {
            assert!(own <= p.dist(c) + 1e-6 * cfg.area_side);
        }
    }
}

#[test]
fn central_subnetwork_brute_force() {
    for index in 0..8 {
        let cfg = NetworkConfig {
            total_users: 96,
            num_subnetworks: 5,
            ..NetworkConfig::default()
        };
        let t = sample_network(&cfg, index).unwrap().topology;
        let centre = Point::new(1000.0, 1000.0);
        let mut dists = Vec::new();
        for m in 0..5 {
            let nodes: Vec<Point> = t
                .bs_positions
                .iter()
                .zip(&t.bs_assignment)
                .chain(t.user_positions.iter().zip(&t.user_assignment))
                .filter(|(_, &l)| l == m)
                .map(|(p, _)| *p)
                .collect();
            let cx = nodes.iter().map(|p| p.x).sum::<f64>() / nodes.len() as f64;
            let cy = nodes.iter().map(|p| p.y).sum::<f64>() / nodes.len() as f64;
            dists.push(Point::new(cx, cy).dist(&centre));
        }
        let best = (0..5).min_by(|&a, &b| dists[a].total_cmp(&dists[b])).unwrap();
        assert_eq!(t.central_index, best);
        assert_eq!(central_subnetwork(&t), best);
    }
}

#[test]
fn network_counts_and_partition() {
    let cfg = NetworkConfig {
        total_users: 100,
        antenna_ratio: 2.5,
        antennas_per_bs: 2,
        ..NetworkConfig::default()
    };
    let net = sample_network(&cfg, 0).unwrap();
    let t = &net.topology;
    assert_eq!(t.user_positions.len(), 100);
    assert_eq!(t.bs_positions.len(), 125);
    assert_eq!(t.total_antennas(), 250);
    let users: usize = t.subnetworks.iter().map(|s| s.users.len()).sum();
    assert_eq!(users, 100);
    for p in t.bs_positions.iter().chain(&t.user_positions) {
        assert!((0.0..=2000.0).contains(&p.x) && (0.0..=2000.0).contains(&p.y));
    }
}

#[test]
fn profile_matches_path_loss_of_distances() {
    let cfg = NetworkConfig {
        total_users: 40,
        num_subnetworks: 3,
        antennas_per_bs: 2,
        ..NetworkConfig::default()
    };
    let net = sample_network(&cfg, 1).unwrap();
    let t = &net.topology;
    let profile = build_large_scale(t, 10.0, 50.0).unwrap();
    assert_eq!(&profile, &net.profile);
    for (m, sm) in t.subnetworks.iter().enumerate() {
        for (n, sn) in t.subnetworks.iter().enumerate() {
            let l = profile.l(m, n);
            let th = profile.theta(m, n);
            for (k, &u) in sm.users.iter().enumerate() {
                for j in 0..sn.antennas {
                    let bs = sn.bs[j / 2];
                    let d = t.user_positions[u].dist(&t.bs_positions[bs]);
                    let expected = if d > 50.0 {
                        d.powf(-1.75)
                    } else if d > 10.0 {
                        50f64.powf(-0.75) / d
                    } else {
                        50f64.powf(-0.75) / 10.0
                    };
                    assert!((l.get(k, j) - expected).abs() <= 1e-14 * expected);
                    assert_eq!(th.get(k, j), l.get(k, j) * l.get(k, j));
                    assert_eq!(path_loss(d, 10.0, 50.0).unwrap(), l.get(k, j));
                }
            }
        }
    }
}

#[test]
fn networks_are_reproducible_and_distinct() {
    let cfg = NetworkConfig {
        total_users: 64,
        ..NetworkConfig::default()
    };
    let a = sample_network(&cfg, 2).unwrap();
    let b = sample_network(&cfg, 2).unwrap();
    let c = sample_network(&cfg, 3).unwrap();
    assert_eq!(a.topology, b.topology);
    assert_ne!(a.topology.user_positions, c.topology.user_positions);
    let other_seed = NetworkConfig { seed: 99, ..cfg };
    assert_ne!(
        sample_network(&other_seed, 2).unwrap().topology.user_positions,
        a.topology.user_positions
    );
    assert_ne!(
        rng::derive_key(1, &[rng::NETWORK, 2]),
        rng::derive_key(1, &[rng::FADING, 2])
    );
}
