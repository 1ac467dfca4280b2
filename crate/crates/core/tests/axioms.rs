//! Sampled verification of the convexity-mapping axioms and the geodesic
//! parameter identities on all four concrete spaces, plus proptest coverage
//! of the affine cases.

use asymreg::spaces::{ConvexSet, Point, Space};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn band(scale: f64) -> f64 {
    1e-9 * scale.max(1.0)
}

fn all_spaces() -> Vec<Space> {
    vec![
        Space::euclidean(2).unwrap(),
        Space::lp(3.0, 3).unwrap(),
        Space::hyperbolic2(),
        Space::rtree(5).unwrap(),
    ]
}

/// (W1)-(W4) plus the parameter identities, `trials` random tuples per space.
fn check_axioms(space: &Space, trials: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 2.5;
    for _ in 0..trials {
        let x = space.sample_point(&mut rng, scale);
        let y = space.sample_point(&mut rng, scale);
        let z = space.sample_point(&mut rng, scale);
        let w = space.sample_point(&mut rng, scale);
        let lam: f64 = rng.gen_range(0.0..=1.0);
        let lam2: f64 = rng.gen_range(0.0..=1.0);

        let cxy = space.combine_unchecked(&x, &y, lam);
        let dxy = space.dist_unchecked(&x, &y);

        // (W1)
        let lhs = space.dist_unchecked(&z, &cxy);
        let rhs = (1.0 - lam) * space.dist_unchecked(&z, &x) + lam * space.dist_unchecked(&z, &y);
        assert!(lhs <= rhs + band(rhs), "(W1) failed on {}: {lhs} > {rhs}", space.kind_name());

        // (W2)
        let c2 = space.combine_unchecked(&x, &y, lam2);
        let lhs = space.dist_unchecked(&cxy, &c2);
        let rhs = (lam - lam2).abs() * dxy;
        assert!(
            (lhs - rhs).abs() <= band(dxy),
            "(W2) failed on {}: {lhs} vs {rhs}",
            space.kind_name()
        );

        // (W3)
        let mirror = space.combine_unchecked(&y, &x, 1.0 - lam);
        assert!(
            space.dist_unchecked(&cxy, &mirror) <= band(dxy),
            "(W3) failed on {}",
            space.kind_name()
        );

        // (W4)
        let lhs = space.dist_unchecked(
            &space.combine_unchecked(&x, &z, lam),
            &space.combine_unchecked(&y, &w, lam),
        );
        let rhs = (1.0 - lam) * space.dist_unchecked(&x, &y) + lam * space.dist_unchecked(&z, &w);
        assert!(lhs <= rhs + band(rhs), "(W4) failed on {}: {lhs} > {rhs}", space.kind_name());

        // Parameter identities along the geodesic.
        let from_x = space.dist_unchecked(&x, &cxy);
        let from_y = space.dist_unchecked(&y, &cxy);
        assert!(
            (from_x - lam * dxy).abs() <= band(dxy),
            "geodesic identity (from x) failed on {}",
            space.kind_name()
        );
        assert!(
            (from_y - (1.0 - lam) * dxy).abs() <= band(dxy),
            "geodesic identity (from y) failed on {}",
            space.kind_name()
        );
    }
}

#[test]
fn axioms_hold_on_sampled_tuples() {
    for (i, space) in all_spaces().iter().enumerate() {
        check_axioms(space, 2_500, 1000 + i as u64);
    }
}

#[test]
fn closed_balls_are_convex() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for space in all_spaces() {
        for _ in 0..400 {
            let c = space.sample_point(&mut rng, 1.5);
            let r = rng.gen_range(0.1..2.0);
            let ball = ConvexSet::ball(c.clone(), r).unwrap();
            let x = space.sample_in_ball(&c, r, &mut rng).unwrap();
            let y = space.sample_in_ball(&c, r, &mut rng).unwrap();
            let lam = rng.gen_range(0.0..=1.0);
            let m = space.combine_unchecked(&x, &y, lam);
            assert!(
                ball.contains(&space, &m, 1e-9).unwrap(),
                "combination left the ball on {}",
                space.kind_name()
            );
        }
    }
}

#[test]
fn geodesic_endpoints_are_exact_everywhere() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for space in all_spaces() {
        for _ in 0..100 {
            let x = space.sample_point(&mut rng, 2.0);
            let y = space.sample_point(&mut rng, 2.0);
            assert_eq!(space.combine_unchecked(&x, &y, 0.0), x);
            assert_eq!(space.combine_unchecked(&x, &y, 1.0), y);
            assert_eq!(space.combine_unchecked(&x, &x, 0.37), x);
        }
    }
}

proptest! {
    #[test]
    fn euclidean_combine_identities(
        xs in prop::collection::vec(-1e3f64..1e3, 3),
        ys in prop::collection::vec(-1e3f64..1e3, 3),
        lam in 0.0f64..=1.0,
    ) {
        let s = Space::euclidean(3).unwrap();
        let x = Point::vector(xs);
        let y = Point::vector(ys);
        let c = s.combine(&x, &y, lam).unwrap();
        let d = s.dist(&x, &y).unwrap();
        let tol = 1e-9 * d.max(1.0);
        prop_assert!((s.dist(&x, &c).unwrap() - lam * d).abs() <= tol);
        prop_assert!((s.dist(&y, &c).unwrap() - (1.0 - lam) * d).abs() <= tol);
    }

    #[test]
    fn rtree_metric_properties(
        r1 in 0.0f64..1e3,
        r2 in 0.0f64..1e3,
        r3 in 0.0f64..1e3,
        rays in (0u32..4, 0u32..4, 0u32..4),
    ) {
        let s = Space::rtree(4).unwrap();
        let a = Point::tree(rays.0, r1);
        let b = Point::tree(rays.1, r2);
        let c = Point::tree(rays.2, r3);
        let dab = s.dist(&a, &b).unwrap();
        let dba = s.dist(&b, &a).unwrap();
        prop_assert_eq!(dab, dba);
        prop_assert!(dab <= s.dist(&a, &c).unwrap() + s.dist(&c, &b).unwrap() + 1e-12);
        // Zero iff equal (all origin representations identified).
        if dab == 0.0 {
            prop_assert!(s.points_eq(&a, &b, 0.0).unwrap());
        }
    }
}
