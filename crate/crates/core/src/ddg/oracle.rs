//! Slow reference evaluation of the residual, element by element, built
//! from physical-coordinate basis evaluations and the pointwise flux
//! formulas. Shares no tables with the production assembly.

use super::flux::{direction_vector, gradient_flux, test_flux, TracePoint};
use super::{DgField, Discretization, SchemeConfig};
use crate::basis::Jet;
use crate::linalg::Vec2;
use crate::mesh::Neighbor;
use crate::models::DiffusionModel;
use crate::real::Real;

pub(crate) fn physical_jets<T: Real>(
    disc: &Discretization<T>,
    k: usize,
    x: Vec2<T>,
) -> Vec<Jet<T>> {
    let map = &disc.mesh().maps[k];
    disc.basis()
        .eval(map.to_reference(x))
        .iter()
        .map(|j| map.physical_derivatives(j))
        .collect()
}

/// `du/dt` computed independently of [`super::assemble_residual`].
pub fn reference_residual<T: Real>(
    disc: &Discretization<T>,
    model: &DiffusionModel<T>,
    scheme: &SchemeConfig<T>,
    u: &DgField<T>,
    t: T,
) -> DgField<T> {
    let mesh = disc.mesh();
    let n = disc.n_dof();
    let mut out = disc.zero_field(t);
    let vol = disc.volume_rule();
    let edge_rule = disc.edge_rule();
    let sigma = scheme.sigma();

    for k in 0..mesh.n_elements() {
        let map = &mesh.maps[k];
        let mut r = vec![T::zero(); n];
        for (p, &w) in vol.points.iter().zip(&vol.weights) {
            let x = map.to_physical(*p);
            let phis = physical_jets(disc, k, x);
            let uj = Jet::combine(u.element(k), &phis);
            let a = model.a(uj.v);
            let s = model.source(uj.v, x, t);
            for (j, phi) in phis.iter().enumerate() {
                let diffusive = a.mul_vec(uj.grad()).dot(phi.grad());
                r[j] += w * map.det * (s * phi.v - diffusive);
            }
        }

        let verts = mesh.element_vertices(k);
        for l in 0..3 {
            let (a, b) = (verts[l], verts[(l + 1) % 3]);
            let d = b - a;
            let len = d.norm();
            let normal = Vec2::new(d.y, -d.x).scale(T::one() / len);
            let edge = &mesh.edges[mesh.element_edges[k][l]];
            let across = if edge.owner == k && edge.owner_local == l {
                edge.neighbor
            } else {
                match edge.neighbor {
                    Neighbor::Periodic { shift, .. } => Neighbor::Periodic {
                        element: edge.owner,
                        shift: -shift,
                    },
                    _ => Neighbor::Element(edge.owner),
                }
            };
            for (p, &w) in edge_rule.points.iter().zip(&edge_rule.weights) {
                let x = a + d.scale(p.x);
                let phis = physical_jets(disc, k, x);
                let minus = Jet::combine(u.element(k), &phis);
                let plus = match across.element() {
                    Some(nb) => {
                        Jet::combine(u.element(nb), &physical_jets(disc, nb, x + across.shift()))
                    }
                    None => {
                        let g = model.boundary_value(x, t);
                        Jet {
                            v: T::of(2.0) * g - minus.v,
                            ..minus
                        }
                    }
                };
                let trace = TracePoint {
                    minus,
                    plus,
                    normal,
                };
                let xi = direction_vector(model, trace.average(), normal);
                let flux = gradient_flux(&trace, edge.h_e, scheme.beta0, scheme.beta1).dot(xi);
                for (j, phi) in phis.iter().enumerate() {
                    let test = TracePoint {
                        minus: *phi,
                        plus: Jet::zero(),
                        normal,
                    };
                    let tf = test_flux(scheme, &test, edge.h_e).dot(xi);
                    r[j] += w * len * (flux * phi.v - sigma * trace.jump() * tf);
                }
            }
        }
        for (o, v) in out.element_mut(k).iter_mut().zip(r) {
            *o = v / map.det;
        }
    }
    out
}
