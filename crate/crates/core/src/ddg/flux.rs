use super::{SchemeConfig, Variant};
use crate::basis::Jet;
use crate::linalg::Vec2;
use crate::models::DiffusionModel;
use crate::real::Real;

/// Interior (`minus`) and exterior (`plus`) physical traces at one edge
/// quadrature point, with the unit normal pointing from minus to plus.
#[derive(Clone, Copy, Debug)]
pub struct TracePoint<T> {
    pub minus: Jet<T>,
    pub plus: Jet<T>,
    pub normal: Vec2<T>,
}

impl<T: Real> TracePoint<T> {
    /// `⟦u⟧ = u⁺ − u⁻`
    #[inline]
    pub fn jump(&self) -> T {
        self.plus.v - self.minus.v
    }

    /// `{u} = (u⁺ + u⁻)/2`
    #[inline]
    pub fn average(&self) -> T {
        (self.plus.v + self.minus.v) * T::of(0.5)
    }

    #[inline]
    pub fn average_gradient(&self) -> Vec2<T> {
        (self.plus.grad() + self.minus.grad()).scale(T::of(0.5))
    }

    /// `⟦H n⟧`: jump of the Hessian contracted with the normal,
    /// `(⟦u_xx n₁ + u_yx n₂⟧, ⟦u_xy n₁ + u_yy n₂⟧)`.
    #[inline]
    pub fn hessian_jump_normal(&self) -> Vec2<T> {
        let n = self.normal;
        let (dxx, dxy, dyy) = (
            self.plus.dxx - self.minus.dxx,
            self.plus.dxy - self.minus.dxy,
            self.plus.dyy - self.minus.dyy,
        );
        Vec2::new(dxx * n.x + dxy * n.y, dxy * n.x + dyy * n.y)
    }
}

/// Direction vector `ξ = A({u})ᵀ n`.
#[inline]
pub fn direction_vector<T: Real>(
    model: &DiffusionModel<T>,
    average: T,
    normal: Vec2<T>,
) -> Vec2<T> {
    model.a(average).transpose().mul_vec(normal)
}

/// Numerical gradient
/// `∇̂u = β₀ ⟦u⟧/h_e n + {∇u} + β₁ h_e ⟦H n⟧`.
#[inline]
pub fn gradient_flux<T: Real>(trace: &TracePoint<T>, h_e: T, beta0: T, beta1: T) -> Vec2<T> {
    trace.normal.scale(beta0 * trace.jump() / h_e)
        + trace.average_gradient()
        + trace.hessian_jump_normal().scale(beta1 * h_e)
}

/// Test-function flux `∇̃v` of the given variant. A test function supported
/// on one element has a zero trace on the other side, so `trace` carries
/// that element's jet on its own side and zeros on the other.
pub fn test_flux<T: Real>(scheme: &SchemeConfig<T>, trace: &TracePoint<T>, h_e: T) -> Vec2<T> {
    match scheme.variant {
        Variant::Baseline => Vec2::zero(),
        Variant::Ddgic => trace.average_gradient(),
        Variant::Symmetric => gradient_flux(trace, h_e, scheme.beta0, scheme.beta1),
        Variant::Nonsymmetric => gradient_flux(trace, h_e, scheme.beta0v, scheme.beta1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{anisotropic_model, heat_model};

    fn jet(v: f64, dx: f64, dy: f64, dxx: f64, dxy: f64, dyy: f64) -> Jet<f64> {
        Jet {
            v,
            dx,
            dy,
            dxx,
            dxy,
            dyy,
        }
    }

    #[test]
    fn direction_vectors() {
        let n = Vec2::new(0.6_f64, 0.8);
        assert_eq!(direction_vector(&heat_model(0.5), 1.0, n), n.scale(0.5));
        let a = anisotropic_model(0.1_f64);
        let xi = direction_vector(&a, 0.0, Vec2::new(1.0, 0.0));
        assert!((xi.x - 0.2).abs() < 1e-16 && (xi.y - 0.1).abs() < 1e-16);
    }

    #[test]
    fn continuous_linear_field() {
        let u = jet(0.7, 1.0, 1.0, 0.0, 0.0, 0.0);
        let t = TracePoint {
            minus: u,
            plus: u,
            normal: Vec2::new(0.0, 1.0),
        };
        assert_eq!(gradient_flux(&t, 0.1, 9.0, 1.0 / 12.0), Vec2::new(1.0, 1.0));
    }

    #[test]
    fn pure_jump() {
        let t = TracePoint {
            minus: jet(0.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            plus: jet(1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            normal: Vec2::new(1.0, 0.0),
        };
        let f = gradient_flux(&t, 0.1, 9.0, 0.5);
        assert!((f.x - 90.0).abs() < 1e-12 && f.y == 0.0);
    }

    #[test]
    fn one_sided_quadratic() {
        // u⁻ = x² at x = 0 (value 0, gradient 0, u_xx = 2), u⁺ = 0, n = (1, 0):
        // ⟦u⟧ = 0, {∇u} = 0, ⟦H n⟧ = (0 − 2, 0) so ∇̂u = (−2 β₁ h, 0).
        let t = TracePoint {
            minus: jet(0.0, 0.0, 0.0, 2.0, 0.0, 0.0),
            plus: Jet::zero(),
            normal: Vec2::new(1.0, 0.0),
        };
        let (h, b0, b1) = (0.25, 9.0, 1.0 / 12.0);
        let f = gradient_flux(&t, h, b0, b1);
        assert!((f.x - (-2.0 * b1 * h)).abs() < 1e-13);
        assert!(f.y.abs() < 1e-13);
    }

    #[test]
    fn test_function_fluxes() {
        let base = SchemeConfig {
            variant: Variant::Baseline,
            beta0: 4.0,
            beta0v: 2.0,
            beta1: 0.1,
            degree: 2,
        };
        let any = TracePoint {
            minus: jet(1.0, 2.0, 4.0, 1.0, 1.0, 1.0),
            plus: Jet::zero(),
            normal: Vec2::new(0.0, 1.0),
        };
        assert_eq!(test_flux(&base, &any, 0.5), Vec2::zero());

        let ic = SchemeConfig {
            variant: Variant::Ddgic,
            ..base
        };
        let gradient_only = TracePoint {
            minus: jet(0.0, 2.0, 4.0, 0.0, 0.0, 0.0),
            ..any
        };
        assert_eq!(test_flux(&ic, &gradient_only, 0.5), Vec2::new(1.0, 2.0));

        let sym = SchemeConfig {
            variant: Variant::Symmetric,
            ..base
        };
        let value_only = TracePoint {
            minus: jet(1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
            ..any
        };
        let f = test_flux(&sym, &value_only, 0.5);
        assert!(f.x.abs() < 1e-15 && (f.y + 8.0).abs() < 1e-14);

        let non = SchemeConfig {
            variant: Variant::Nonsymmetric,
            beta0v: 4.0,
            ..base
        };
        assert_eq!(test_flux(&non, &any, 0.5), test_flux(&sym, &any, 0.5));
    }
}
