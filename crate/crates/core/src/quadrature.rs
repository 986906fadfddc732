//! Gauss quadrature on the reference edge `[0, 1]` and the reference triangle
//! `{(x, y) : x, y ≥ 0, x + y ≤ 1}`.
//!
//! Triangle rules are collapsed tensor products: Gauss–Legendre in the
//! horizontal direction and Gauss–Jacobi (weight `1 − η`) in the collapsed
//! direction, mapped through `x = ξ(1 − η), y = η`. Every weight is positive.

use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::real::Real;

/// Highest polynomial exactness offered by [`volume_rule`] and [`edge_rule`].
pub const MAX_EXACTNESS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    Volume,
    Edge,
}

/// Points and positive weights with a guaranteed polynomial exactness degree.
///
/// Edge rules store their abscissa `s ∈ [0, 1]` in `points[i].x` with `y = 0`.
#[derive(Clone, Debug)]
pub struct QuadratureRule<T> {
    pub points: Vec<Vec2<T>>,
    pub weights: Vec<T>,
    pub exactness: usize,
    pub kind: RuleKind,
}

impl<T: Real> QuadratureRule<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Measure of the reference domain (½ for the triangle, 1 for the edge).
    pub fn reference_measure(&self) -> T {
        match self.kind {
            RuleKind::Volume => T::of(0.5),
            RuleKind::Edge => T::one(),
        }
    }

    /// Applies the rule to `f` on the reference domain.
    pub fn integrate<F: Fn(Vec2<T>) -> T>(&self, f: F) -> T {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&p, &w)| w * f(p))
            .sum()
    }

    /// Smallest weight after normalising the weights to sum to one.
    pub fn min_normalized_weight(&self) -> T {
        let total: T = self.weights.iter().copied().sum();
        self.weights
            .iter()
            .fold(T::infinity(), |acc, &w| acc.min(w / total))
    }
}

/// Minimum volume quadrature weight `ω` (weights normalised to sum 1).
pub fn min_volume_weight<T: Real>(rule: &QuadratureRule<T>) -> T {
    rule.min_normalized_weight()
}

fn points_for(exactness: usize) -> Result<usize> {
    if exactness > MAX_EXACTNESS {
        return Err(Error::InvalidQuadrature(format!(
            "exactness {exactness} exceeds the supported maximum {MAX_EXACTNESS}"
        )));
    }
    Ok(exactness / 2 + 1)
}

/// Gauss rule on the reference triangle exact for total degree `exactness`.
pub fn volume_rule<T: Real>(exactness: usize) -> Result<QuadratureRule<T>> {
    let n = points_for(exactness)?;
    let mut rule = collapsed_rule(n);
    rule.exactness = exactness;
    Ok(rule)
}

/// Gauss–Legendre rule on `[0, 1]` exact for degree `exactness`.
pub fn edge_rule<T: Real>(exactness: usize) -> Result<QuadratureRule<T>> {
    let n = points_for(exactness)?;
    let (x, w) = gauss_jacobi(n, 0.0);
    Ok(QuadratureRule {
        points: x
            .iter()
            .map(|&xi| Vec2::new(T::of(0.5 * (xi + 1.0)), T::zero()))
            .collect(),
        weights: w.iter().map(|&wi| T::of(0.5 * wi)).collect(),
        exactness,
        kind: RuleKind::Edge,
    })
}

/// Collapsed tensor Gauss rule with `n` points per direction (`n²` points,
/// exact to degree `2n − 1`).
pub fn collapsed_rule<T: Real>(n: usize) -> QuadratureRule<T> {
    let (xs, ws) = gauss_jacobi(n, 0.0);
    let (es, vs) = gauss_jacobi(n, 1.0);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (&e, &v) in es.iter().zip(&vs) {
        let eta = 0.5 * (e + 1.0);
        // ∫₀¹ f (1−η) dη = ¼ Σ v f
        let wy = 0.25 * v;
        for (&x, &w) in xs.iter().zip(&ws) {
            let xi = 0.5 * (x + 1.0);
            points.push(Vec2::new(T::of(xi * (1.0 - eta)), T::of(eta)));
            weights.push(T::of(0.5 * w * wy));
        }
    }
    QuadratureRule {
        points,
        weights,
        exactness: 2 * n - 1,
        kind: RuleKind::Volume,
    }
}

/// Value and derivative of the Jacobi polynomial `P_n^{(α,0)}` at `x`.
fn jacobi(n: usize, alpha: f64, x: f64) -> (f64, f64) {
    fn value(n: usize, a: f64, b: f64, x: f64) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let mut p0 = 1.0;
        let mut p1 = 0.5 * ((a - b) + (a + b + 2.0) * x);
        for k in 1..n {
            let k = k as f64;
            let s = 2.0 * k + a + b;
            let c1 = 2.0 * (k + 1.0) * (k + a + b + 1.0) * s;
            let c2 = (s + 1.0) * (a * a - b * b);
            let c3 = s * (s + 1.0) * (s + 2.0);
            let c4 = 2.0 * (k + a) * (k + b) * (s + 2.0);
            let p2 = ((c2 + c3 * x) * p1 - c4 * p0) / c1;
            p0 = p1;
            p1 = p2;
        }
        p1
    }
    let p = value(n, alpha, 0.0, x);
    let dp = if n == 0 {
        0.0
    } else {
        0.5 * (n as f64 + alpha + 1.0) * value(n - 1, alpha + 1.0, 1.0, x)
    };
    (p, dp)
}

/// Gauss–Jacobi nodes and weights on `[−1, 1]` for the weight `(1 − x)^α`.
pub(crate) fn gauss_jacobi(n: usize, alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let mut nodes: Vec<f64> = Vec::with_capacity(n);
    for k in 0..n {
        let mut x = -((2 * k + 1) as f64 * std::f64::consts::PI / (2 * n) as f64).cos();
        if k > 0 {
            x = 0.5 * (x + nodes[k - 1]);
        }
        for _ in 0..100 {
            let (p, dp) = jacobi(n, alpha, x);
            let deflation: f64 = nodes.iter().map(|&r| 1.0 / (x - r)).sum();
            let delta = -p / (dp - deflation * p);
            x += delta;
            if delta.abs() < 1e-16 {
                break;
            }
        }
        nodes.push(x);
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let scale = 2f64.powf(alpha + 1.0);
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, dp) = jacobi(n, alpha, x);
            scale / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: usize) -> f64 {
        (1..=n).map(|k| k as f64).product()
    }

    /// ∫ x^a y^b over the reference triangle.
    fn triangle_monomial(a: usize, b: usize) -> f64 {
        factorial(a) * factorial(b) / factorial(a + b + 2)
    }

    #[test]
    fn volume_exactness_all_monomials() {
        for p in 0..=MAX_EXACTNESS {
            let rule = volume_rule::<f64>(p).unwrap();
            for a in 0..=p {
                for b in 0..=p - a {
                    let exact = triangle_monomial(a, b);
                    let approx = rule.integrate(|q| q.x.powi(a as i32) * q.y.powi(b as i32));
                    assert!(
                        ((approx - exact) / exact).abs() < 1e-12,
                        "degree {p}, x^{a} y^{b}: {approx} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn edge_exactness_all_monomials() {
        for p in 0..=MAX_EXACTNESS {
            let rule = edge_rule::<f64>(p).unwrap();
            for a in 0..=p {
                let approx = rule.integrate(|q| q.x.powi(a as i32));
                let exact = 1.0 / (a + 1) as f64;
                assert!(((approx - exact) / exact).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn weight_sums_and_positivity() {
        for p in 0..=MAX_EXACTNESS {
            let v = volume_rule::<f64>(p).unwrap();
            let e = edge_rule::<f64>(p).unwrap();
            assert!(v.weights.iter().all(|&w| w > 0.0));
            assert!(e.weights.iter().all(|&w| w > 0.0));
            assert!((v.weights.iter().sum::<f64>() - 0.5).abs() < 1e-14);
            assert!((e.weights.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            let omega = min_volume_weight(&v);
            assert!(omega > 0.0 && omega <= 1.0);
        }
    }

    #[test]
    fn small_cases() {
        let one = volume_rule::<f64>(0).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one.integrate(|_| 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(min_volume_weight(&one), 1.0);

        let r5 = volume_rule::<f64>(5).unwrap();
        assert!((r5.integrate(|q| q.x * q.x * q.y) - 1.0 / 60.0).abs() < 1e-15);
        let total: f64 = r5.weights.iter().sum();
        let direct = r5
            .weights
            .iter()
            .map(|w| w / total)
            .fold(f64::MAX, f64::min);
        assert_eq!(min_volume_weight(&r5), direct);

        let e1 = edge_rule::<f64>(1).unwrap();
        assert!((e1.integrate(|q| q.x) - 0.5).abs() < 1e-15);
        let e9 = edge_rule::<f64>(9).unwrap();
        assert!((e9.integrate(|q| q.x.powi(9)) - 0.1).abs() < 1e-14);
    }

    #[test]
    fn points_inside_reference_triangle() {
        let rule = collapsed_rule::<f64>(19);
        assert_eq!(rule.len(), 361);
        for p in &rule.points {
            assert!(p.x > 0.0 && p.y > 0.0 && p.x + p.y < 1.0);
        }
    }

    #[test]
    fn rejects_excess_exactness() {
        assert!(volume_rule::<f64>(21).is_err());
        assert!(edge_rule::<f64>(21).is_err());
    }

    #[test]
    fn single_precision_rule() {
        let rule = volume_rule::<f32>(7).unwrap();
        let approx = rule.integrate(|q| q.x * q.y * q.y);
        assert!((approx - 1.0 / 60.0).abs() < 1e-6);
    }
}
