use occusense::geometry::*;
use occusense::io::{fov_preset, DEFAULT_FOV};
use occusense::Error;
use proptest::prelude::*;

fn office() -> Grid {
    discretize_area_with(3.3, 2.4, 0.3, GridLayout::Cells, &WeightSpec::Uniform).unwrap()
}

fn pattern() -> FovPattern {
    fov_preset(DEFAULT_FOV).unwrap()
}

/// Corner-polygon containment: the beam square is built from its four corners
/// and a point is inside when it is on the inner side of every edge.
fn oracle_covered(p: &FovPattern, m: Mount, x: f64, y: f64) -> bool {
    let s = (p.mount_height_m - p.plane_height_m) / p.mount_height_m;
    if (x - m.x).hypot(y - m.y) > p.max_range_m * s + 1e-9 {
        return false;
    }
    for ring in &p.rings {
        for j in 0..ring.beam_count {
            let th = m.yaw_deg.to_radians() + 2.0 * std::f64::consts::PI * j as f64 / ring.beam_count as f64;
            let (cx, cy) = (m.x + ring.radius_m * s * th.cos(), m.y + ring.radius_m * s * th.sin());
            let h = ring.side_m * s / 2.0;
            let (ux, uy) = (th.cos(), th.sin());
            let (vx, vy) = (-uy, ux);
            let corners = [(h, h), (-h, h), (-h, -h), (h, -h)]
                .map(|(a, b)| (cx + a * ux + b * vx, cy + a * uy + b * vy));
            let inside = (0..4).all(|k| {
                let (ax, ay) = corners[k];
                let (bx, by) = corners[(k + 1) % 4];
                let cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
                cross >= -1e-9 * (2.0 * h).max(1.0)
            });
            if inside {
                return true;
            }
        }
    }
    false
}

#[test]
fn office_grid_has_eleven_by_eight_cells() {
    let g = office();
    assert_eq!((g.nx, g.ny, g.len()), (11, 8, 88));
    assert!((g.points[0].0 - 0.15).abs() < 1e-12 && (g.points[0].1 - 0.15).abs() < 1e-12);
}

#[test]
fn unit_square_at_unit_step_has_four_corners() {
    let g = discretize_area(1.0, 1.0, 1.0, &WeightSpec::Uniform).unwrap();
    assert_eq!(g.points, vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
}

#[test]
fn desk_weights_match_point_in_rectangle() {
    let desk = Rect::new(0.0, 0.0, 1.0, 1.0);
    let spec = WeightSpec::Regions { base: 1.0, regions: vec![WeightRegion { rect: desk, weight: 3.0 }] };
    let g = discretize_area(2.0, 1.5, 0.5, &spec).unwrap();
    assert_eq!((g.nx, g.ny), (5, 4));
    for (i, &(x, y)) in g.points.iter().enumerate() {
        let inside = (0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y);
        assert_eq!(g.weights[i], if inside { 3.0 } else { 1.0 }, "point ({x}, {y})");
    }
    assert_eq!(g.weights.iter().filter(|&&w| w == 3.0).count(), 9);
}

#[test]
fn bad_areas_are_rejected() {
    for (w, d, s) in [(0.0, 1.0, 0.1), (1.0, -1.0, 0.1), (1.0, 1.0, 0.0), (1.0, 1.0, 2.0)] {
        assert!(matches!(discretize_area(w, d, s, &WeightSpec::Uniform), Err(Error::InvalidArgument(_))));
    }
    let outside = WeightSpec::Regions {
        base: 1.0,
        regions: vec![WeightRegion { rect: Rect::new(0.5, 0.5, 3.0, 0.9), weight: 2.0 }],
    };
    assert!(discretize_area(2.0, 1.0, 0.5, &outside).is_err());
    let all_zero = WeightSpec::Regions { base: 0.0, regions: vec![] };
    assert!(discretize_area(2.0, 1.0, 0.5, &all_zero).is_err());
}

#[test]
fn projection_matches_polygon_oracle() {
    let g = office();
    let p = pattern();
    for (i, &(x, y)) in g.points.iter().enumerate().step_by(7) {
        for yaw in [0.0, 15.0, 37.0, 90.0, 200.0] {
            let m = Mount::new(x, y, yaw);
            let mask = project_fov(&p, m, &g).unwrap();
            for (j, &(px, py)) in g.points.iter().enumerate() {
                assert_eq!(mask.covered[j], oracle_covered(&p, m, px, py), "mount {i} yaw {yaw} point {j}");
            }
        }
    }
}

#[test]
fn calibrated_pattern_leaves_most_of_the_office_in_holes() {
    let g = office();
    let mask = project_fov(&pattern(), Mount::new(1.65, 1.2, 0.0), &g).unwrap();
    let h = hole_fraction(&mask, &g, None).unwrap();
    assert!((h - 0.87).abs() <= 0.02, "hole fraction {h}");
    assert_eq!(mask.in_range_count(), 88);
}

#[test]
fn empty_pattern_covers_nothing() {
    let g = office();
    let p = FovPattern { rings: vec![], ..pattern() };
    let mask = project_fov(&p, Mount::new(1.65, 1.2, 0.0), &g).unwrap();
    assert_eq!(mask.covered_count(), 0);
    assert_eq!(hole_fraction(&mask, &g, None).unwrap(), 1.0);
}

#[test]
fn one_huge_beam_covers_every_in_range_point() {
    let g = office();
    let p = FovPattern {
        mount_height_m: 2.7,
        plane_height_m: 0.75,
        max_range_m: 2.0,
        rings: vec![Ring { radius_m: 0.0, beam_count: 1, side_m: 20.0 }],
    };
    let mask = project_fov(&p, Mount::new(0.45, 0.45, 0.0), &g).unwrap();
    assert!(mask.in_range_count() < g.len());
    assert_eq!(mask.covered, mask.in_range);
    assert_eq!(hole_fraction(&mask, &g, None).unwrap(), 0.0);
}

#[test]
fn mount_outside_area_is_rejected() {
    let g = office();
    assert!(matches!(project_fov(&pattern(), Mount::new(4.0, 1.0, 0.0), &g), Err(Error::InvalidArgument(_))));
}

#[test]
fn region_restriction_and_empty_region() {
    let g = office();
    let mask = project_fov(&pattern(), Mount::new(1.65, 1.2, 0.0), &g).unwrap();
    let desk = Rect::new(1.2, 1.2, 3.0, 2.1);
    let f = covered_fraction(&mask, &g, Some(&desk)).unwrap();
    let manual = {
        let idx: Vec<usize> = (0..g.len()).filter(|&i| desk.contains(g.points[i].0, g.points[i].1)).collect();
        idx.iter().filter(|&&i| mask.covered[i]).count() as f64 / idx.len() as f64
    };
    assert_eq!(f, manual);
    let nowhere = Rect::new(3.2, 2.35, 3.3, 2.4);
    assert!(matches!(hole_fraction(&mask, &g, Some(&nowhere)), Err(Error::InvalidArgument(_))));
}

#[test]
fn quarter_turn_rotates_the_mask() {
    let spec = WeightSpec::Uniform;
    let g = discretize_area(2.4, 2.4, 0.3, &spec).unwrap();
    let p = FovPattern {
        mount_height_m: 2.7,
        plane_height_m: 0.75,
        max_range_m: 2.0,
        rings: vec![
            Ring { radius_m: 0.0, beam_count: 1, side_m: 0.47 },
            Ring { radius_m: 0.83, beam_count: 5, side_m: 0.43 },
            Ring { radius_m: 1.71, beam_count: 7, side_m: 0.41 },
        ],
    };
    let c = 1.2;
    for yaw in [0.0, 10.0, 33.0, 71.0] {
        let a = project_fov(&p, Mount::new(c, c, yaw), &g).unwrap();
        let b = project_fov(&p, Mount::new(c, c, yaw + 90.0), &g).unwrap();
        for (i, &(x, y)) in g.points.iter().enumerate() {
            // (x, y) -> (c - (y - c), c + (x - c))
            let j = g.nearest(2.0 * c - y, x);
            assert_eq!(a.covered[i], b.covered[j], "yaw {yaw} point ({x}, {y})");
        }
    }
}

#[test]
fn scaling_both_heights_keeps_the_footprint() {
    let g = office();
    let p = pattern();
    let q = FovPattern { mount_height_m: p.mount_height_m * 1.7, plane_height_m: p.plane_height_m * 1.7, ..p.clone() };
    assert!((p.scale() - q.scale()).abs() < 1e-15);
    let ratio = |f: &FovPattern| f.rings[1].radius_m * f.scale() / f.projected_range();
    assert!((ratio(&p) - ratio(&q)).abs() < 1e-12);
    let m = Mount::new(1.35, 1.05, 15.0);
    assert_eq!(project_fov(&p, m, &g).unwrap().covered, project_fov(&q, m, &g).unwrap().covered);
}

#[test]
fn detectability_rule() {
    assert!(is_detectable(0.6, 0.5).unwrap());
    assert!(!is_detectable(0.6, 1.1).unwrap());
    assert!(is_detectable(0.2, 0.6).unwrap());
    assert!(!is_detectable(0.2, 0.61).unwrap());
    assert!(is_detectable(1.2, 1.1).unwrap());
    for e in [0.0, 0.3, 5.0] {
        assert!(is_detectable(e, 0.0).unwrap());
    }
    assert!(is_detectable(-0.1, 0.2).is_err());
    assert!(is_detectable(0.1, -0.2).is_err());
}

/// Grows a centered square one ring at a time until it would swallow a
/// covered point.
fn oracle_hole(covered: &[bool], g: &Grid, i: usize) -> f64 {
    if covered[i] {
        return 0.0;
    }
    let (ix, iy) = g.coords(i);
    let mut r = 0i64;
    loop {
        let next = r + 1;
        if next as usize > g.nx.max(g.ny) {
            return f64::INFINITY;
        }
        let mut hit = false;
        for dy in -next..=next {
            for dx in -next..=next {
                let (x, y) = (ix as i64 + dx, iy as i64 + dy);
                if x >= 0 && y >= 0 && (x as usize) < g.nx && (y as usize) < g.ny && covered[g.index(x as usize, y as usize)] {
                    hit = true;
                }
            }
        }
        if hit {
            return (2 * r + 1) as f64 * g.step_m;
        }
        r = next;
    }
}

#[test]
fn hole_sizes_match_square_growing_oracle() {
    let g = office();
    let mask = project_fov(&pattern(), Mount::new(1.65, 1.2, 0.0), &g).unwrap();
    let holes = local_hole_sizes(&mask.covered, &g);
    for i in 0..g.len() {
        assert_eq!(holes[i], oracle_hole(&mask.covered, &g, i), "point {i}");
    }
    assert!(holes.iter().any(|&h| h > 1.0), "the calibrated pattern leaves holes above 1 m");
    assert!(local_hole_sizes(&vec![false; g.len()], &g).iter().all(|h| h.is_infinite()));
}

#[test]
fn office_candidates_respect_symmetry() {
    let g = office();
    let p = pattern();
    let spec = CandidateSpec::default();
    let cands = candidate_mounts(&g, &p, &spec).unwrap();
    let period = p.symmetry_period_deg();
    assert_eq!(period, 30);
    assert_eq!(cands.len(), 9 * 6 * 2);
    for c in cands.iter().step_by(5) {
        let m = c.source_mount;
        let turned = project_fov(&p, Mount::new(m.x, m.y, m.yaw_deg + period as f64), &g).unwrap();
        assert_eq!(turned.covered, c.covered);
    }
    let full = candidate_mounts(&g, &p, &CandidateSpec { reduce_symmetry: false, ..spec }).unwrap();
    assert_eq!(full.len(), 9 * 6 * 24);
    assert!(CandidateSpec { yaw_step_deg: 7, ..spec }.yaws(&p).is_err());
}

fn random_pattern() -> impl Strategy<Value = FovPattern> {
    let ring = (0.0..2.5f64, 1u32..16, 0.1..0.9f64).prop_map(|(radius_m, beam_count, side_m)| Ring {
        radius_m,
        beam_count,
        side_m,
    });
    (proptest::collection::vec(ring, 0..4), 2.0..3.5f64, 0.0..1.0f64).prop_map(|(rings, h, pl)| FovPattern {
        mount_height_m: h,
        plane_height_m: pl,
        max_range_m: 2.5,
        rings,
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn masks_are_pure_and_partition(p in random_pattern(), ix in 0usize..11, iy in 0usize..8, yaw in 0.0..360.0f64) {
        let g = office();
        let (x, y) = g.points[g.index(ix, iy)];
        let m = Mount::new(x, y, yaw);
        let a = project_fov(&p, m, &g).unwrap();
        let b = project_fov(&p, m, &g).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.covered.iter().zip(&a.in_range).all(|(&c, &r)| !c || r));
        for (i, &(px, py)) in g.points.iter().enumerate() {
            if a.covered[i] {
                prop_assert!((px - x).hypot(py - y) <= p.projected_range() + 1e-9);
            }
        }
        if a.in_range_count() > 0 {
            let h = hole_fraction(&a, &g, None).unwrap();
            let c = covered_fraction(&a, &g, None).unwrap();
            prop_assert_eq!(h + c, 1.0);
        }
    }

    #[test]
    fn unions_only_shrink_holes(bits in proptest::collection::vec(any::<bool>(), 88), extra in proptest::collection::vec(any::<bool>(), 88)) {
        let g = office();
        let both = union(&[&bits, &extra], 88);
        let a = local_hole_sizes(&bits, &g);
        let b = local_hole_sizes(&both, &g);
        prop_assert!(a.iter().zip(&b).all(|(x, y)| y <= x));
    }
}
