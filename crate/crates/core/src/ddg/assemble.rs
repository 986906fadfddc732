use super::field::DgField;
use super::flux::{direction_vector, gradient_flux, TracePoint};
use super::SchemeConfig;
use crate::basis::{Basis, Jet};
use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::mesh::{edge_traces_setup, Mesh, TraceSide, TraceTable};
use crate::models::DiffusionModel;
use crate::quadrature::{edge_rule, min_volume_weight, volume_rule, QuadratureRule};
use crate::real::Real;
use rayon::prelude::*;

/// Polynomial exactness of the volume and edge rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraturePolicy {
    pub volume: usize,
    pub edge: usize,
}

impl QuadraturePolicy {
    /// Exact to degree `2k+1`.
    pub fn standard(degree: usize) -> Self {
        Self {
            volume: 2 * degree + 1,
            edge: 2 * degree + 1,
        }
    }

    /// Exact to degree `4k+1`, for strongly nonlinear coefficients.
    pub fn rich(degree: usize) -> Self {
        Self {
            volume: 4 * degree + 1,
            edge: 4 * degree + 1,
        }
    }

    pub fn for_model<T>(model: &DiffusionModel<T>, degree: usize) -> Self {
        if model.strongly_nonlinear {
            Self::rich(degree)
        } else {
            Self::standard(degree)
        }
    }
}

/// Mesh, basis and precomputed quadrature tables for one polynomial degree.
#[derive(Clone, Debug)]
pub struct Discretization<T> {
    mesh: Mesh<T>,
    basis: Basis<T>,
    volume: QuadratureRule<T>,
    /// Reference jets at volume points, `points × n_dof`.
    volume_jets: Vec<Jet<T>>,
    traces: TraceTable<T>,
    policy: QuadraturePolicy,
    omega: T,
}

impl<T: Real> Discretization<T> {
    pub fn new(mesh: Mesh<T>, degree: usize, policy: QuadraturePolicy) -> Result<Self> {
        let basis = Basis::new(degree)?;
        if policy.volume < 2 * degree {
            return Err(Error::InvalidQuadrature(format!(
                "volume exactness {} is below 2k = {}",
                policy.volume,
                2 * degree
            )));
        }
        let volume = volume_rule(policy.volume)?;
        let edge = edge_rule(policy.edge)?;
        let volume_jets = basis.tabulate(&volume.points);
        let traces = edge_traces_setup(&mesh, &basis, &edge);
        let standard = QuadraturePolicy::standard(degree).volume;
        let omega = if policy.volume <= standard {
            min_volume_weight(&volume)
        } else {
            min_volume_weight(&volume_rule::<T>(standard)?)
        };
        Ok(Self {
            mesh,
            basis,
            volume,
            volume_jets,
            traces,
            policy,
            omega,
        })
    }

    pub fn mesh(&self) -> &Mesh<T> {
        &self.mesh
    }

    pub fn basis(&self) -> &Basis<T> {
        &self.basis
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn n_dof(&self) -> usize {
        self.basis.n_dof()
    }

    pub fn policy(&self) -> QuadraturePolicy {
        self.policy
    }

    pub fn volume_rule(&self) -> &QuadratureRule<T> {
        &self.volume
    }

    pub fn edge_rule(&self) -> &QuadratureRule<T> {
        &self.traces.rule
    }

    pub fn traces(&self) -> &TraceTable<T> {
        &self.traces
    }

    /// `ω` of the step-size rule: the minimum normalised weight of the
    /// volume rule, capped at the standard `2k+1` rule. Richer rules only
    /// change how nonlinear terms are integrated, not the admissible step.
    pub fn omega(&self) -> T {
        self.omega
    }

    #[inline]
    pub fn volume_jets(&self, q: usize) -> &[Jet<T>] {
        let n = self.n_dof();
        &self.volume_jets[q * n..(q + 1) * n]
    }

    pub fn zero_field(&self, time: T) -> DgField<T> {
        DgField::zeros(self.mesh.n_elements(), self.degree(), time)
    }

    /// `∫_Ω u v`.
    pub fn inner(&self, u: &DgField<T>, v: &DgField<T>) -> T {
        (0..self.mesh.n_elements())
            .map(|k| {
                let dot: T = u
                    .element(k)
                    .iter()
                    .zip(v.element(k))
                    .map(|(&a, &b)| a * b)
                    .sum();
                self.mesh.maps[k].det * dot
            })
            .sum()
    }

    /// `∫_Ω u²`.
    pub fn energy(&self, u: &DgField<T>) -> T {
        self.inner(u, u)
    }

    /// `∫_Ω u`.
    pub fn total_mass(&self, u: &DgField<T>) -> T {
        (0..self.mesh.n_elements())
            .map(|k| self.mesh.area(k) * u.cell_average(k))
            .sum()
    }

    /// Smallest and largest value of `u` at the volume quadrature points.
    pub fn value_range(&self, u: &DgField<T>) -> (T, T) {
        let n = self.n_dof();
        (0..self.mesh.n_elements())
            .into_par_iter()
            .map(|k| {
                let c = u.element(k);
                self.volume_jets.chunks(n).fold(
                    (T::infinity(), T::neg_infinity()),
                    |(lo, hi), jets| {
                        let v: T = c.iter().zip(jets).map(|(&a, j)| a * j.v).sum();
                        (lo.min(v), hi.max(v))
                    },
                )
            })
            .reduce(
                || (T::infinity(), T::neg_infinity()),
                |a, b| (a.0.min(b.0), a.1.max(b.1)),
            )
    }

    /// Value of `u` at reference point `r` of element `k`.
    pub fn value_at(&self, u: &DgField<T>, k: usize, r: Vec2<T>) -> T {
        u.reference_jet(&self.basis, k, r).v
    }
}

/// Semi-discrete operator `u ↦ du/dt` for one model and scheme.
#[derive(Clone, Copy, Debug)]
pub struct Operator<'a, T> {
    pub disc: &'a Discretization<T>,
    pub model: &'a DiffusionModel<T>,
    pub scheme: SchemeConfig<T>,
}

impl<'a, T: Real> Operator<'a, T> {
    pub fn new(
        disc: &'a Discretization<T>,
        model: &'a DiffusionModel<T>,
        scheme: SchemeConfig<T>,
    ) -> Self {
        Self {
            disc,
            model,
            scheme,
        }
    }

    /// `du/dt` at time `u.time`.
    pub fn apply(&self, u: &DgField<T>) -> Result<DgField<T>> {
        assemble_residual(self.disc, self.model, &self.scheme, u, u.time)
    }

    /// `∫ u · L(u)`.
    pub fn energy_rate(&self, u: &DgField<T>) -> Result<T> {
        let rate = self.apply(u)?;
        Ok(self.disc.inner(u, &rate))
    }
}

/// Coefficients of `du/dt` such that, for every basis function `v` on `K`,
/// `∫_K u_t v = −∫_K A(u)∇u·∇v + ∫_∂K (∇̂u·ξ) v − σ∫_∂K ⟦u⟧ (∇̃v·ξ) + ∫_K S v`.
pub fn assemble_residual<T: Real>(
    disc: &Discretization<T>,
    model: &DiffusionModel<T>,
    scheme: &SchemeConfig<T>,
    u: &DgField<T>,
    t: T,
) -> Result<DgField<T>> {
    if u.degree != disc.degree() || scheme.degree != disc.degree() {
        return Err(Error::Config(format!(
            "degree mismatch: field {}, scheme {}, discretisation {}",
            u.degree,
            scheme.degree,
            disc.degree()
        )));
    }
    let mesh = disc.mesh();
    let n = disc.n_dof();
    if u.n_elements() != mesh.n_elements() {
        return Err(Error::Config(format!(
            "field has {} elements, mesh has {}",
            u.n_elements(),
            mesh.n_elements()
        )));
    }

    let mut edge_buf = vec![T::zero(); mesh.edges.len() * 2 * n];
    edge_buf
        .par_chunks_mut(2 * n)
        .enumerate()
        .for_each(|(e, buf)| {
            let (owner, neighbor) = buf.split_at_mut(n);
            edge_terms(disc, model, scheme, u, t, e, owner, neighbor);
        });

    let mut rate = disc.zero_field(t);
    rate.coeffs
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(k, out)| {
            volume_terms(disc, model, u, t, k, out);
            for (l, &e) in mesh.element_edges[k].iter().enumerate() {
                let edge = &mesh.edges[e];
                let offset = if edge.owner == k && edge.owner_local == l {
                    0
                } else {
                    n
                };
                let part = &edge_buf[e * 2 * n + offset..e * 2 * n + offset + n];
                for (o, &p) in out.iter_mut().zip(part) {
                    *o += p;
                }
            }
            let inv_det = T::one() / mesh.maps[k].det;
            for o in out.iter_mut() {
                *o *= inv_det;
            }
        });

    if let Some(pos) = rate.coeffs.iter().position(|c| !c.is_finite()) {
        return Err(Error::NonFinite {
            stage: "residual",
            element: pos / n,
        });
    }
    Ok(rate)
}

fn volume_terms<T: Real>(
    disc: &Discretization<T>,
    model: &DiffusionModel<T>,
    u: &DgField<T>,
    t: T,
    k: usize,
    out: &mut [T],
) {
    let map = &disc.mesh().maps[k];
    let rule = disc.volume_rule();
    let coeffs = u.element(k);
    for (q, (&r, &w)) in rule.points.iter().zip(&rule.weights).enumerate() {
        let jets = disc.volume_jets(q);
        let mut value = T::zero();
        let mut grad_ref = Vec2::zero();
        for (&c, j) in coeffs.iter().zip(jets) {
            value += c * j.v;
            grad_ref.x += c * j.dx;
            grad_ref.y += c * j.dy;
        }
        let grad = map.inverse.transpose().mul_vec(grad_ref);
        // (A∇u)·∇φ = (J⁻¹ A∇u)·∇ᵣφ
        let flux_ref = map.inverse.mul_vec(model.a(value).mul_vec(grad));
        let source = if model.has_source() {
            model.source(value, map.to_physical(r), t)
        } else {
            T::zero()
        };
        let wd = w * map.det;
        for (o, j) in out.iter_mut().zip(jets) {
            *o += wd * (source * j.v - (flux_ref.x * j.dx + flux_ref.y * j.dy));
        }
    }
}

/// `ξᵀ H n` for reference Hessian entries and reference-mapped vectors.
#[inline]
fn hessian_form<T: Real>(j: &Jet<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    j.dxx * a.x * b.x + j.dxy * (a.x * b.y + a.y * b.x) + j.dyy * a.y * b.y
}

#[allow(clippy::too_many_arguments)]
fn edge_terms<T: Real>(
    disc: &Discretization<T>,
    model: &DiffusionModel<T>,
    scheme: &SchemeConfig<T>,
    u: &DgField<T>,
    t: T,
    e: usize,
    owner_out: &mut [T],
    neighbor_out: &mut [T],
) {
    let mesh = disc.mesh();
    let traces = disc.traces();
    let edge = &mesh.edges[e];
    let normal = edge.normal;
    let h = edge.h_e;
    let sigma = scheme.sigma();
    let test = scheme
        .test_flux_coefficients()
        .filter(|_| sigma != T::zero());
    let half = T::of(0.5);

    let owner_side: TraceSide = traces.owner[e];
    let neighbor_side: Option<TraceSide> = traces.neighbor[e];
    let owner_map = &mesh.maps[owner_side.element];
    let neighbor_map = neighbor_side.map(|s| &mesh.maps[s.element]);

    for (q, &wq) in traces.rule.weights.iter().enumerate() {
        let w = wq * edge.length;
        let owner_jets = traces.jets(&owner_side, q);
        let minus = owner_map
            .physical_derivatives(&Jet::combine(u.element(owner_side.element), owner_jets));
        let plus = match (neighbor_side, neighbor_map) {
            (Some(side), Some(map)) => map.physical_derivatives(&Jet::combine(
                u.element(side.element),
                traces.jets(&side, q),
            )),
            _ => {
                let x = owner_map.to_physical(traces.reference_point(&owner_side, q));
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
        let flux = gradient_flux(&trace, h, scheme.beta0, scheme.beta1).dot(xi);
        let jump = trace.jump();
        let n_xi = normal.dot(xi);

        let correction = |map: &crate::basis::AffineMap<T>, sign: T| {
            let xi_ref = map.inverse.mul_vec(xi);
            let n_ref = map.inverse.mul_vec(normal);
            move |j: &Jet<T>, pen: T, hb: T| {
                sign * (pen / h * j.v * n_xi + hb * h * hessian_form(j, xi_ref, n_ref))
                    + half * (j.dx * xi_ref.x + j.dy * xi_ref.y)
            }
        };

        let owner_tf = correction(owner_map, -T::one());
        for (o, j) in owner_out.iter_mut().zip(owner_jets) {
            let mut r = flux * j.v;
            if let Some((pen, hb)) = test {
                r -= sigma * jump * owner_tf(j, pen, hb);
            }
            *o += w * r;
        }
        if let (Some(side), Some(map)) = (neighbor_side, neighbor_map) {
            let neighbor_tf = correction(map, T::one());
            for (o, j) in neighbor_out.iter_mut().zip(traces.jets(&side, q)) {
                let mut r = -flux * j.v;
                if let Some((pen, hb)) = test {
                    r -= sigma * jump * neighbor_tf(j, pen, hb);
                }
                *o += w * r;
            }
        }
    }
}
