use crate::ddg::{DgField, Discretization};
use crate::linalg::Vec2;
use crate::quadrature::{collapsed_rule, QuadratureRule};
use crate::real::Real;
use rayon::prelude::*;

/// Points per direction of the `L∞` sample set (19² = 361 per element).
pub const LINF_POINTS_PER_DIRECTION: usize = 19;

/// Per-element `L∞` sample points on the reference triangle.
pub fn linf_sample_points<T: Real>() -> Vec<Vec2<T>> {
    collapsed_rule(LINF_POINTS_PER_DIRECTION).points
}

fn per_element<T: Real, F>(disc: &Discretization<T>, f: F) -> Vec<T>
where
    F: Fn(usize) -> T + Sync + Send,
{
    (0..disc.mesh().n_elements())
        .into_par_iter()
        .map(f)
        .collect()
}

/// `(Σ_K ∫_K (u − U)²)^{1/2}` with `rule` on every element. Element sums
/// are reduced in element order.
pub fn l2_error<T: Real, F>(
    disc: &Discretization<T>,
    u: &DgField<T>,
    exact: F,
    rule: &QuadratureRule<T>,
) -> T
where
    F: Fn(Vec2<T>) -> T + Sync,
{
    let values = disc.basis().eval_basis(&rule.points);
    let parts = per_element(disc, |k| {
        let map = &disc.mesh().maps[k];
        let c = u.element(k);
        let s: T = rule
            .points
            .iter()
            .zip(&rule.weights)
            .zip(&values)
            .map(|((&r, &w), phi)| {
                let uh: T = c.iter().zip(phi).map(|(&a, &b)| a * b).sum();
                let e = uh - exact(map.to_physical(r));
                w * e * e
            })
            .sum();
        s * map.det
    });
    parts.into_iter().sum::<T>().sqrt()
}

/// `max |u − U|` over the 361-point per-element sample set.
pub fn linf_error<T: Real, F>(disc: &Discretization<T>, u: &DgField<T>, exact: F) -> T
where
    F: Fn(Vec2<T>) -> T + Sync,
{
    let points = linf_sample_points::<T>();
    let values = disc.basis().eval_basis(&points);
    per_element(disc, |k| {
        let map = &disc.mesh().maps[k];
        let c = u.element(k);
        points
            .iter()
            .zip(&values)
            .map(|(&r, phi)| {
                let uh: T = c.iter().zip(phi).map(|(&a, &b)| a * b).sum();
                (uh - exact(map.to_physical(r))).abs()
            })
            .fold(T::zero(), T::max)
    })
    .into_iter()
    .fold(T::zero(), T::max)
}

/// `log₂(coarse / fine)`.
pub fn order<T: Real>(coarse: T, fine: T) -> T {
    (coarse / fine).log2()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddg::{project_initial, QuadraturePolicy};
    use crate::mesh::{build_uniform_mesh, BoundaryKind};
    use crate::quadrature::volume_rule;

    fn disc(n: usize, k: usize) -> Discretization<f64> {
        let mesh = build_uniform_mesh(Vec2::new(0.0, 0.0), 1.0, n, BoundaryKind::Periodic).unwrap();
        Discretization::new(mesh, k, QuadraturePolicy::standard(k)).unwrap()
    }

    #[test]
    fn sample_set_size() {
        assert_eq!(linf_sample_points::<f64>().len(), 361);
    }

    #[test]
    fn polynomial_field_has_zero_error() {
        let d = disc(3, 2);
        let p = |x: Vec2<f64>| 1.0 + x.x * x.y - 0.5 * x.y * x.y;
        let u = project_initial(&d, p);
        assert!(l2_error(&d, &u, p, &volume_rule(6).unwrap()) < 1e-13);
        assert!(linf_error(&d, &u, p) < 1e-13);
        let zero = d.zero_field(0.0);
        assert_eq!(linf_error(&d, &zero, |_| 0.0), 0.0);
    }

    #[test]
    fn constant_offset() {
        // domain area 1, so ‖c‖ = c
        let d = disc(4, 1);
        let u = project_initial(&d, |_| 0.25);
        let e = l2_error(&d, &u, |_| 0.0, &volume_rule(3).unwrap());
        assert!((e - 0.25).abs() < 1e-14);
    }

    #[test]
    fn order_of_synthetic_pair() {
        assert_eq!(order(1.0, 1.0 / 8.0), 3.0);
    }

    #[test]
    fn projection_converges_at_order_k_plus_one() {
        let f = |x: Vec2<f64>| (2.0 * std::f64::consts::PI * (x.x + x.y)).cos();
        let err = |n| {
            let d = disc(n, 2);
            let u = project_initial(&d, f);
            l2_error(&d, &u, f, &volume_rule(10).unwrap())
        };
        let o = order(err(10), err(20));
        assert!((o - 3.0).abs() < 0.1, "{o}");
    }
}
