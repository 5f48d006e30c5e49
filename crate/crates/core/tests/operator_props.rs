use fejerlab::analysis::{check_fejer, WitnessSpec};
use fejerlab::dynamics::{difference_orbit, estimate_displacement, iterate, normalized_orbit, two_ball_displacement};
use fejerlab::operators::{fixed_set_description, Certificate, Matrix, PiecewiseLinear};
use fejerlab::{ConvexSet, OperatorExpr, Vector};
use proptest::prelude::*;

fn vec_in(dim: usize, half: f64) -> impl Strategy<Value = Vector> {
    prop::collection::vec(-half..half, dim).prop_map(|c| Vector::new(&c).unwrap())
}

fn nonzero2() -> impl Strategy<Value = Vector> {
    vec_in(2, 1.0).prop_filter("nonzero", |v| v.norm() > 1e-2)
}

fn set2() -> impl Strategy<Value = ConvexSet> {
    prop_oneof![
        (vec_in(2, 3.0), 0.2..2.0).prop_map(|(c, r)| ConvexSet::ball(c, r).unwrap()),
        (nonzero2(), -2.0..2.0).prop_map(|(n, b)| ConvexSet::halfspace(n, b).unwrap()),
        (nonzero2(), -2.0..2.0).prop_map(|(n, b)| ConvexSet::hyperplane(n, b).unwrap()),
    ]
}

fn leaf() -> impl Strategy<Value = OperatorExpr> {
    prop_oneof![
        Just(OperatorExpr::Identity),
        Just(OperatorExpr::Negation),
        vec_in(2, 2.0).prop_map(OperatorExpr::Translation),
        set2().prop_map(OperatorExpr::Projector),
        set2().prop_map(OperatorExpr::Reflector),
        (set2(), set2()).prop_map(|(a, b)| OperatorExpr::douglas_rachford(a, b).unwrap()),
        (0.0..std::f64::consts::TAU, 0.0..1.0f64).prop_map(|(th, s): (f64, f64)| {
            let (sn, cs) = th.sin_cos();
            OperatorExpr::Linear(Matrix::from_rows(&[vec![s * cs, -s * sn], vec![s * sn, s * cs]]).unwrap())
        }),
    ]
}

fn tree() -> impl Strategy<Value = OperatorExpr> {
    leaf().prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (0.05..0.95, inner.clone()).prop_map(|(a, r)| OperatorExpr::relaxed(a, r).unwrap()),
            (0.05..0.95, inner.clone(), inner.clone())
                .prop_map(|(a, l, r)| OperatorExpr::convex_combination(a, l, r).unwrap()),
            (inner.clone(), inner).prop_map(|(o, i)| OperatorExpr::compose(o, i)),
        ]
    })
}

/// Largest violation of the averaged inequality
/// `‖Tx - Ty‖² + (1 - a)/a ‖(x - Tx) - (y - Ty)‖² <= ‖x - y‖²`.
fn averaged_excess(op: &OperatorExpr, a: f64, x: &Vector, y: &Vector) -> f64 {
    let tx = op.apply(x).unwrap();
    let ty = op.apply(y).unwrap();
    let lhs = tx.dist(&ty).powi(2) + (1.0 - a) / a * (&(x - &tx) - &(y - &ty)).norm_sq();
    lhs - x.dist(y).powi(2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn certificates_are_sound(op in tree(), x in vec_in(2, 10.0), y in vec_in(2, 10.0)) {
        let scale = 1e-9 * (1.0 + x.norm() + y.norm()).powi(2);
        match op.certify() {
            Certificate::Unknown => {}
            Certificate::Nonexpansive => {
                let d = op.apply(&x).unwrap().dist(&op.apply(&y).unwrap());
                prop_assert!(d.powi(2) <= x.dist(&y).powi(2) + scale, "{}", op.describe());
            }
            Certificate::FirmlyNonexpansive => prop_assert!(averaged_excess(&op, 0.5, &x, &y) <= scale),
            Certificate::Averaged(a) => {
                prop_assert!(a >= 0.0 && a < 1.0);
                if a > 0.0 {
                    prop_assert!(averaged_excess(&op, a, &x, &y) <= scale, "{} a={a}", op.describe());
                } else {
                    prop_assert!(op.apply(&x).unwrap().dist(&x) <= 1e-12 * (1.0 + x.norm()));
                }
            }
        }
    }

    #[test]
    fn difference_orbits_of_certified_maps_shrink(op in tree(), x in vec_in(2, 10.0), y in vec_in(2, 10.0)) {
        prop_assume!(op.certify().is_nonexpansive());
        let t = difference_orbit(&op, &x, &y, 50);
        // Either the orbit is built (monotone up to the scaled tolerance) or
        // the builder reports the violation; a certified map must not do that.
        prop_assert!(t.is_ok(), "{}: {:?}", op.describe(), t.err());
    }

    #[test]
    fn scalar_maps_with_bounded_slopes_are_nonexpansive(
        knots in prop::collection::btree_set(-50i32..50, 0..5),
        slopes in prop::collection::vec(-1.0..=1.0f64, 6),
        v0 in -3.0..3.0f64,
        x in -20.0..20.0f64,
        y in -20.0..20.0f64,
    ) {
        let knots: Vec<f64> = knots.into_iter().map(|k| f64::from(k) / 10.0).collect();
        let slopes = slopes[..knots.len() + 1].to_vec();
        let r = PiecewiseLinear::new(knots, slopes, v0).unwrap();
        let op = OperatorExpr::ScalarPiecewiseLinear(r);
        prop_assert!(op.certify().is_nonexpansive());
        let d = op.apply(&Vector::scalar(x)).unwrap().dist(&op.apply(&Vector::scalar(y)).unwrap());
        prop_assert!(d <= (x - y).abs() * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn two_ball_displacement_matches_the_gap_vector(
        ca in vec_in(3, 5.0), dir in vec_in(3, 1.0), ra in 0.3..2.0f64, rb in 0.3..2.0f64, extra in 0.2..5.0f64,
    ) {
        let u = dir.normalized();
        prop_assume!(u.is_some());
        let u = u.unwrap();
        let d = ra + rb + extra;
        let cb = ca.axpy(d, &u);
        let a = ConvexSet::ball(ca.clone(), ra).unwrap();
        let b = ConvexSet::ball(cb.clone(), rb).unwrap();
        let v = two_ball_displacement(&a, &b).unwrap();
        // Independent oracle: the nearest points of the two balls.
        let pa = ca.axpy(ra, &u);
        let pb = cb.axpy(-rb, &u);
        prop_assert!(v.dist(&(&pa - &pb)) <= 1e-12 * (1.0 + d));
    }
}

#[test]
fn normalized_orbit_is_fejer_for_an_affine_map_with_a_fixed_line() {
    // T(x, y) = (x + 1, y / 2): displacement (-1, 0), and x = v + T x holds
    // on the line y = 0.
    let op = OperatorExpr::Affine {
        linear: Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.5]]).unwrap(),
        shift: Vector::new(&[1.0, 0.0]).unwrap(),
    };
    let x0 = Vector::new(&[2.0, 5.0]).unwrap();
    let est = estimate_displacement(&op, &x0, 200, 50, false).unwrap();
    assert!(est.v.dist(&Vector::new(&[-1.0, 0.0]).unwrap()) < 1e-12);
    let fix = fixed_set_description(&op, &est.v).expect("closed form");
    assert!(fix.contains(&Vector::new(&[7.0, 0.0]).unwrap(), 1e-12).unwrap());
    assert!(!fix.contains(&Vector::new(&[7.0, 1.0]).unwrap(), 1e-9).unwrap());
    let t = normalized_orbit(&op, &x0, &est.v, 200).unwrap();
    let r = check_fejer(&t, &fix, &WitnessSpec::default(), 1e-12).unwrap();
    assert!(r.verdict.is_pass(), "{r:?}");
}

#[test]
fn douglas_rachford_normalized_orbit_is_fejer_for_its_ray() {
    let a = ConvexSet::ball(Vector::zeros(3), 1.0).unwrap();
    let b = ConvexSet::ball(Vector::new(&[5.0, 0.0, 0.0]).unwrap(), 1.0).unwrap();
    let v = two_ball_displacement(&a, &b).unwrap();
    assert_eq!(v, Vector::new(&[-3.0, 0.0, 0.0]).unwrap());
    let op = OperatorExpr::douglas_rachford(a, b).unwrap();
    let ray = fixed_set_description(&op, &v).expect("ray");
    assert!(matches!(ray, ConvexSet::Ray { .. }));
    let t = normalized_orbit(&op, &Vector::new(&[0.0, 3.0, 3.0]).unwrap(), &v, 2000).unwrap();
    let r = check_fejer(&t, &ray, &WitnessSpec::default(), 1e-9).unwrap();
    assert!(r.verdict.is_pass(), "{r:?}");
}

#[test]
fn iteration_is_reproducible() {
    let op = OperatorExpr::douglas_rachford(
        ConvexSet::ball(Vector::zeros(2), 1.0).unwrap(),
        ConvexSet::halfspace(Vector::new(&[1.0, 1.0]).unwrap(), -3.0).unwrap(),
    )
    .unwrap();
    let x0 = Vector::new(&[4.0, -1.0]).unwrap();
    assert_eq!(iterate(&op, &x0, 500).unwrap().points, iterate(&op, &x0, 500).unwrap().points);
}
