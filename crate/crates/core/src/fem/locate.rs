use super::Mesh;

/// Uniform bucket grid over the mesh bounding box; each triangle is listed
/// in every bucket its bounding box touches.
#[derive(Debug, Clone)]
pub struct PointLocator<'a> {
    mesh: &'a Mesh,
    origin: [f64; 2],
    cell: [f64; 2],
    dims: [usize; 2],
    buckets: Vec<Vec<u32>>,
}

pub(crate) fn barycentric(v: &[[f64; 2]; 3], p: [f64; 2]) -> [f64; 3] {
    let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
    let l1 = ((p[0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (p[1] - v[0][1])) / det;
    let l2 = ((v[1][0] - v[0][0]) * (p[1] - v[0][1]) - (p[0] - v[0][0]) * (v[1][1] - v[0][1])) / det;
    [1.0 - l1 - l2, l1, l2]
}

fn tri_bbox(v: &[[f64; 2]; 3]) -> [f64; 4] {
    [
        v[0][0].min(v[1][0]).min(v[2][0]),
        v[0][0].max(v[1][0]).max(v[2][0]),
        v[0][1].min(v[1][1]).min(v[2][1]),
        v[0][1].max(v[1][1]).max(v[2][1]),
    ]
}

impl<'a> PointLocator<'a> {
    pub fn new(mesh: &'a Mesh) -> Self {
        let bb = mesh.bounding_box();
        let side = (mesh.triangle_count() as f64).sqrt().ceil().max(1.0) as usize;
        let w = (bb[1] - bb[0]).max(f64::MIN_POSITIVE);
        let h = (bb[3] - bb[2]).max(f64::MIN_POSITIVE);
        let dims = [side, side];
        let cell = [w / side as f64, h / side as f64];
        let mut loc = Self { mesh, origin: [bb[0], bb[2]], cell, dims, buckets: vec![Vec::new(); side * side] };
        for t in 0..mesh.triangle_count() {
            let b = tri_bbox(&mesh.vertices(t));
            let (i0, i1, j0, j1) = loc.cell_range(b);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    loc.buckets[j * dims[0] + i].push(t as u32);
                }
            }
        }
        loc
    }

    pub fn mesh(&self) -> &'a Mesh {
        self.mesh
    }

    fn cell_index(&self, x: f64, axis: usize) -> usize {
        let k = ((x - self.origin[axis]) / self.cell[axis]).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.dims[axis] - 1)
        }
    }

    fn cell_range(&self, b: [f64; 4]) -> (usize, usize, usize, usize) {
        (self.cell_index(b[0], 0), self.cell_index(b[1], 0), self.cell_index(b[2], 1), self.cell_index(b[3], 1))
    }

    /// Triangles whose bounding boxes may meet the box `[x_lo, x_hi, y_lo, y_hi]`,
    /// ascending and without duplicates.
    pub fn candidates(&self, b: [f64; 4]) -> Vec<usize> {
        let bb = self.mesh.bounding_box();
        if b[1] < bb[0] || b[0] > bb[1] || b[3] < bb[2] || b[2] > bb[3] {
            return Vec::new();
        }
        let (i0, i1, j0, j1) = self.cell_range(b);
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.extend(self.buckets[j * self.dims[0] + i].iter().map(|&t| t as usize));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Containing triangle and barycentric coordinates. Among triangles that
    /// contain `p` up to `tol` the one with the largest minimal coordinate wins.
    pub fn locate(&self, p: [f64; 2], tol: f64) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for t in self.candidates([p[0], p[0], p[1], p[1]]) {
            let l = barycentric(&self.mesh.vertices(t), p);
            let m = l[0].min(l[1]).min(l[2]);
            if m >= -tol && best.is_none_or(|b| m > b.2) {
                best = Some((t, l, m));
            }
        }
        best.map(|(t, l, _)| (t, l))
    }

    /// P1 interpolant of nodal `values` at `p`.
    pub fn evaluate(&self, values: &[f64], p: [f64; 2], tol: f64) -> Option<f64> {
        let (t, l) = self.locate(p, tol)?;
        let tri = self.mesh.triangles()[t];
        Some(l[0] * values[tri[0]] + l[1] * values[tri[1]] + l[2] * values[tri[2]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{build_disk_mesh, build_rect_mesh};

    #[test]
    fn linear_functions_are_reproduced() {
        let mesh = build_rect_mesh((0.0, 2.0, -1.0, 1.0), 7, 5, None).unwrap();
        let loc = PointLocator::new(&mesh);
        let vals: Vec<f64> = mesh.nodes().iter().map(|p| 3.0 * p[0] - p[1] + 0.5).collect();
        for k in 0..200 {
            let p = [2.0 * ((k * 37) % 200) as f64 / 199.0, -1.0 + 2.0 * ((k * 91) % 200) as f64 / 199.0];
            let v = loc.evaluate(&vals, p, 1e-12).unwrap();
            assert!((v - (3.0 * p[0] - p[1] + 0.5)).abs() < 1e-12);
        }
        assert!(loc.locate([2.5, 0.0], 1e-12).is_none());
    }

    #[test]
    fn every_centroid_is_found_in_its_triangle() {
        let mesh = build_disk_mesh(1.0, 3, Some(([0.2, -0.1], 0.3))).unwrap();
        let loc = PointLocator::new(&mesh);
        for (t, c) in mesh.centroids().into_iter().enumerate() {
            assert_eq!(loc.locate(c, 0.0).unwrap().0, t);
        }
    }
}
