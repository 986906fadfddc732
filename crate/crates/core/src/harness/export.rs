//! Point-sampled field output as CSV and legacy VTK.

use crate::ddg::{DgField, Discretization};
use crate::error::{Error, Result};
use crate::linalg::Vec2;
use crate::real::Real;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// One sampled value of the discrete solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample<T> {
    pub element: usize,
    pub position: Vec2<T>,
    pub value: T,
}

/// Reference-triangle lattice `(i/r, j/r)` with `i + j ≤ r`, in row order.
pub fn lattice_points<T: Real>(resolution: usize) -> Vec<Vec2<T>> {
    let r = T::of(resolution as f64);
    let mut pts = Vec::with_capacity((resolution + 1) * (resolution + 2) / 2);
    for j in 0..=resolution {
        for i in 0..=resolution - j {
            pts.push(Vec2::new(T::of(i as f64) / r, T::of(j as f64) / r));
        }
    }
    pts
}

/// Samples per element for a given lattice resolution.
pub fn samples_per_element(resolution: usize) -> usize {
    (resolution + 1) * (resolution + 2) / 2
}

/// Evaluates `u` on the lattice of every element.
pub fn sample_field<T: Real>(
    disc: &Discretization<T>,
    u: &DgField<T>,
    resolution: usize,
) -> Vec<Sample<T>> {
    let points = lattice_points::<T>(resolution.max(1));
    let values = disc.basis().eval_basis(&points);
    let mut out = Vec::with_capacity(points.len() * disc.mesh().n_elements());
    for k in 0..disc.mesh().n_elements() {
        let map = &disc.mesh().maps[k];
        let c = u.element(k);
        for (&r, phi) in points.iter().zip(&values) {
            let value = c.iter().zip(phi).map(|(&a, &b)| a * b).sum();
            out.push(Sample {
                element: k,
                position: map.to_physical(r),
                value,
            });
        }
    }
    out
}

/// Value of `u` at physical point `x`, taken from the first element that
/// contains it, or `None` outside the mesh.
pub fn evaluate_at<T: Real>(disc: &Discretization<T>, u: &DgField<T>, x: Vec2<T>) -> Option<T> {
    let tol = T::of(1e-12);
    (0..disc.mesh().n_elements()).find_map(|k| {
        let r = disc.mesh().maps[k].to_reference(x);
        (r.x >= -tol && r.y >= -tol && r.x + r.y <= T::one() + tol).then(|| disc.value_at(u, k, r))
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Writes `element,x,y,u` rows.
pub fn write_csv<T: Real>(
    path: &Path,
    disc: &Discretization<T>,
    u: &DgField<T>,
    resolution: usize,
) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = create(path)?;
    writeln!(w, "element,x,y,u").map_err(io)?;
    for s in sample_field(disc, u, resolution) {
        writeln!(
            w,
            "{},{:e},{:e},{:e}",
            s.element, s.position.x, s.position.y, s.value
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

/// Sub-triangles of the reference lattice as indices into [`lattice_points`].
fn lattice_triangles(resolution: usize) -> Vec<[usize; 3]> {
    let row_start = |j: usize| (0..j).map(|jj| resolution + 1 - jj).sum::<usize>();
    let mut tris = Vec::with_capacity(resolution * resolution);
    for j in 0..resolution {
        let (a, b) = (row_start(j), row_start(j + 1));
        for i in 0..resolution - j {
            tris.push([a + i, a + i + 1, b + i]);
            if i + 1 < resolution - j {
                tris.push([a + i + 1, b + i + 1, b + i]);
            }
        }
    }
    tris
}

/// Writes a legacy ASCII VTK unstructured grid. Every element carries its
/// own copy of the lattice, so jumps between elements are preserved.
pub fn write_vtk<T: Real>(
    path: &Path,
    disc: &Discretization<T>,
    u: &DgField<T>,
    resolution: usize,
) -> Result<()> {
    let resolution = resolution.max(1);
    let io = |e| Error::io(path, e);
    let samples = sample_field(disc, u, resolution);
    let tris = lattice_triangles(resolution);
    let per = samples_per_element(resolution);
    let n_el = disc.mesh().n_elements();
    let n_cells = tris.len() * n_el;
    let mut w = create(path)?;
    writeln!(
        w,
        "# vtk DataFile Version 3.0\nDG solution t={:e}\nASCII\nDATASET UNSTRUCTURED_GRID",
        u.time
    )
    .map_err(io)?;
    writeln!(w, "POINTS {} double", samples.len()).map_err(io)?;
    for s in &samples {
        writeln!(w, "{:e} {:e} 0", s.position.x, s.position.y).map_err(io)?;
    }
    writeln!(w, "CELLS {} {}", n_cells, 4 * n_cells).map_err(io)?;
    for k in 0..n_el {
        for t in &tris {
            writeln!(
                w,
                "3 {} {} {}",
                k * per + t[0],
                k * per + t[1],
                k * per + t[2]
            )
            .map_err(io)?;
        }
    }
    writeln!(w, "CELL_TYPES {n_cells}").map_err(io)?;
    for _ in 0..n_cells {
        writeln!(w, "5").map_err(io)?;
    }
    writeln!(
        w,
        "CELL_DATA {n_cells}\nSCALARS element int 1\nLOOKUP_TABLE default"
    )
    .map_err(io)?;
    for k in 0..n_el {
        for _ in &tris {
            writeln!(w, "{k}").map_err(io)?;
        }
    }
    writeln!(
        w,
        "POINT_DATA {}\nSCALARS u double 1\nLOOKUP_TABLE default",
        samples.len()
    )
    .map_err(io)?;
    for s in &samples {
        writeln!(w, "{:e}", s.value).map_err(io)?;
    }
    w.flush().map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ddg::{project_initial, QuadraturePolicy};
    use crate::mesh::{build_uniform_mesh, BoundaryKind};

    fn setup() -> (Discretization<f64>, DgField<f64>) {
        let mesh = build_uniform_mesh(Vec2::new(0.0, 0.0), 1.0, 3, BoundaryKind::Periodic).unwrap();
        let d = Discretization::new(mesh, 2, QuadraturePolicy::standard(2)).unwrap();
        let u = project_initial(&d, |x| 1.0 + x.x * x.y);
        (d, u)
    }

    #[test]
    fn lattice_triangles_tile_the_reference_triangle() {
        for r in 1..6 {
            let pts = lattice_points::<f64>(r);
            assert_eq!(pts.len(), samples_per_element(r));
            let tris = lattice_triangles(r);
            assert_eq!(tris.len(), r * r);
            let area: f64 = tris
                .iter()
                .map(|t| {
                    let (a, b, c) = (pts[t[0]], pts[t[1]], pts[t[2]]);
                    0.5 * ((b - a).x * (c - a).y - (b - a).y * (c - a).x)
                })
                .inspect(|&a| assert!(a > 0.0))
                .sum();
            assert!((area - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn point_evaluation() {
        let (d, u) = setup();
        for x in [
            Vec2::new(0.1, 0.7),
            Vec2::new(0.5, 0.5),
            Vec2::new(1.0, 1.0),
        ] {
            assert!((evaluate_at(&d, &u, x).unwrap() - (1.0 + x.x * x.y)).abs() < 1e-12);
        }
        assert_eq!(evaluate_at(&d, &u, Vec2::new(1.5, 0.0)), None);
    }

    #[test]
    fn csv_has_one_row_per_sample() {
        let (d, u) = setup();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/field.csv");
        write_csv(&path, &d, &u, 4).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text.lines().count(),
            1 + d.mesh().n_elements() * samples_per_element(4)
        );
        for line in text.lines().skip(1) {
            let f: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
            assert!((f[3] - (1.0 + f[1] * f[2])).abs() < 1e-12);
        }
    }

    #[test]
    fn vtk_counts_are_consistent() {
        let (d, u) = setup();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("field.vtk");
        write_vtk(&path, &d, &u, 2).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let n = d.mesh().n_elements();
        assert!(text.contains(&format!("POINTS {} double", n * 6)));
        assert!(text.contains(&format!("CELLS {} {}", n * 4, n * 16)));
        assert!(text.contains(&format!("POINT_DATA {}", n * 6)));
    }

    #[test]
    fn io_errors_name_the_path() {
        let (d, u) = setup();
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = write_csv(&blocker.join("out.csv"), &d, &u, 1).unwrap_err();
        assert!(err.to_string().contains("file"), "{err}");
    }
}
