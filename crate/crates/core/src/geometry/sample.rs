use super::ConvexSet;
use crate::error::{Error, Result};
use crate::random;
use crate::vector::Vector;

/// Seeded finite witness set for universally quantified checks over `set`.
///
/// The anchor comes first; the remaining points are projections of uniform
/// samples from the ball of `radius` around the anchor. Projection is
/// nonexpansive and fixes the anchor, so every witness stays within `radius`
/// of it.
pub fn sample_witnesses(set: &ConvexSet, count: usize, seed: u64, radius: f64) -> Result<Vec<Vector>> {
    if count == 0 {
        return Err(Error::InvalidArgument("witness count must be at least 1".into()));
    }
    if !(radius.is_finite() && radius >= 0.0) {
        return Err(Error::InvalidArgument(format!("invalid witness radius {radius}")));
    }
    let anchor = set.anchor()?;
    let mut rng = random::rng(seed);
    let mut out = Vec::with_capacity(count);
    out.push(anchor.clone());
    while out.len() < count {
        let z = random::in_ball(&mut rng, &anchor, radius);
        out.push(set.project(&z)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c).unwrap()
    }

    #[test]
    fn point_witnesses_repeat() {
        let p = ConvexSet::point(v(&[1.0, -2.0]));
        let w = sample_witnesses(&p, 4, 7, 10.0).unwrap();
        assert_eq!(w.len(), 4);
        assert!(w.iter().all(|x| *x == v(&[1.0, -2.0])));
    }

    #[test]
    fn hyperplane_witnesses_lie_on_it() {
        let h = ConvexSet::hyperplane(v(&[1.0, 0.0]), 0.0).unwrap();
        let w = sample_witnesses(&h, 3, 1, 10.0).unwrap();
        assert_eq!(w.len(), 3);
        assert!(w.iter().all(|x| x[0] == 0.0));
    }

    #[test]
    fn ray_witnesses_are_forward() {
        let base = v(&[1.0, 1.0]);
        let r = ConvexSet::ray(base.clone(), v(&[0.0, 2.0])).unwrap();
        let w = sample_witnesses(&r, 4, 3, 5.0).unwrap();
        for x in &w {
            assert_eq!(x[0], 1.0);
            assert!(x[1] >= 1.0);
        }
        assert_eq!(w[0], base);
    }

    #[test]
    fn deterministic_and_bounded() {
        let b = ConvexSet::ball(v(&[0.0, 0.0, 0.0]), 2.0).unwrap();
        let a = sample_witnesses(&b, 20, 42, 1.5).unwrap();
        let c = sample_witnesses(&b, 20, 42, 1.5).unwrap();
        assert_eq!(a, c);
        assert!(a.iter().all(|x| x.norm() <= 1.5 + 1e-12));
        assert!(sample_witnesses(&b, 0, 42, 1.0).is_err());
    }
}
