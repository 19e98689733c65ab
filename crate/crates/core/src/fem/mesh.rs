use crate::pde::Transform;
use crate::{Error, Result};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    Interior,
    OuterBoundary,
    Interface,
}

impl NodeClass {
    pub fn as_str(self) -> &'static str {
        match self {
            NodeClass::Interior => "INTERIOR",
            NodeClass::OuterBoundary => "OUTER_BOUNDARY",
            NodeClass::Interface => "INTERFACE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "INTERIOR" => Some(NodeClass::Interior),
            "OUTER_BOUNDARY" => Some(NodeClass::OuterBoundary),
            "INTERFACE" => Some(NodeClass::Interface),
            _ => None,
        }
    }
}

/// Shape of the outer boundary, used to check boundary-node placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outline {
    Rect { x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64 },
    Disk { radius: f64 },
    Unknown,
}

impl Outline {
    pub fn distance_to_boundary(&self, p: [f64; 2]) -> Option<f64> {
        match *self {
            Outline::Rect { x_lo, x_hi, y_lo, y_hi } => Some(
                (p[0] - x_lo)
                    .abs()
                    .min((p[0] - x_hi).abs())
                    .min((p[1] - y_lo).abs())
                    .min((p[1] - y_hi).abs()),
            ),
            Outline::Disk { radius } => Some(((p[0] * p[0] + p[1] * p[1]).sqrt() - radius).abs()),
            Outline::Unknown => None,
        }
    }
}

/// Triangulation with per-node classification.
#[derive(Debug, Clone)]
pub struct Mesh {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    classes: Vec<NodeClass>,
    outline: Outline,
}

/// Interior interface of a structured rectangle mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RectInterface {
    /// Edges of an axis-aligned rectangle.
    Rectangle { x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64 },
    /// Horizontal line `x₂ = y`, spanning the full width.
    HorizontalLine { y: f64 },
}

fn signed_area(p: [f64; 2], q: [f64; 2], r: [f64; 2]) -> f64 {
    0.5 * ((q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]))
}

impl Mesh {
    /// Validates index range and orientation.
    pub fn new(nodes: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>, classes: Vec<NodeClass>, outline: Outline) -> Result<Self> {
        if classes.len() != nodes.len() {
            return Err(Error::DimensionMismatch { expected: nodes.len(), got: classes.len() });
        }
        let mesh = Self { nodes, triangles, classes, outline };
        mesh.check_triangles()?;
        Ok(mesh)
    }

    fn check_triangles(&self) -> Result<()> {
        let n = self.nodes.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&i| i >= n) {
                return Err(Error::InvalidInput(format!("triangle {t} references a node out of range")));
            }
            let area = self.area(t);
            if !(area > 0.0) {
                return Err(Error::InvertedElement { triangle: t, area });
            }
        }
        Ok(())
    }

    pub fn nodes(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn classes(&self) -> &[NodeClass] {
        &self.classes
    }

    pub fn outline(&self) -> Outline {
        self.outline
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn vertices(&self, t: usize) -> [[f64; 2]; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [p, q, r] = self.vertices(t);
        signed_area(p, q, r)
    }

    pub fn count_class(&self, class: NodeClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }

    /// Longest edge over all triangles.
    pub fn h_max(&self) -> f64 {
        let mut h = 0.0f64;
        for t in 0..self.triangles.len() {
            let v = self.vertices(t);
            for k in 0..3 {
                let (p, q) = (v[k], v[(k + 1) % 3]);
                h = h.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
            }
        }
        h
    }

    pub fn bounding_box(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for p in &self.nodes {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].max(p[0]);
            b[2] = b[2].min(p[1]);
            b[3] = b[3].max(p[1]);
        }
        b
    }

    /// Element centroids, used as extra sample points.
    pub fn centroids(&self) -> Vec<[f64; 2]> {
        (0..self.triangles.len())
            .map(|t| {
                let v = self.vertices(t);
                [(v[0][0] + v[1][0] + v[2][0]) / 3.0, (v[0][1] + v[1][1] + v[2][1]) / 3.0]
            })
            .collect()
    }

    /// Bitwise fingerprint of geometry and connectivity.
    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for p in &self.nodes {
            p[0].to_bits().hash(&mut h);
            p[1].to_bits().hash(&mut h);
        }
        self.triangles.hash(&mut h);
        self.classes.hash(&mut h);
        h.finish()
    }

    /// Largest distance of an OUTER_BOUNDARY node from the outline.
    pub fn boundary_deviation(&self) -> Option<f64> {
        let mut worst = 0.0f64;
        for (p, c) in self.nodes.iter().zip(&self.classes) {
            if *c == NodeClass::OuterBoundary {
                worst = worst.max(self.outline.distance_to_boundary(*p)?);
            }
        }
        Some(worst)
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (t[k].min(t[(k + 1) % 3]), t[k].max(t[(k + 1) % 3]))))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }
}

fn snap(coord: f64, lo: f64, h: f64, n: usize) -> Result<usize> {
    let k = (coord - lo) / h;
    let kr = k.round();
    if (k - kr).abs() > 1e-9 || kr < 0.0 || kr > n as f64 {
        return Err(Error::InterfaceMisaligned { coord });
    }
    Ok(kr as usize)
}

/// Structured union-jack triangulation of a rectangle: every cell is split by
/// one diagonal whose direction alternates with the cell parity.
pub fn build_rect_mesh(rect: (f64, f64, f64, f64), nx: usize, ny: usize, interface: Option<RectInterface>) -> Result<Mesh> {
    let (x_lo, x_hi, y_lo, y_hi) = rect;
    if nx < 2 || ny < 2 {
        return Err(Error::InvalidInput(format!("need nx, ny >= 2, got {nx} x {ny}")));
    }
    if !(x_hi > x_lo && y_hi > y_lo) {
        return Err(Error::InvalidInput("empty rectangle".into()));
    }
    let hx = (x_hi - x_lo) / nx as f64;
    let hy = (y_hi - y_lo) / ny as f64;
    let id = |i: usize, j: usize| j * (nx + 1) + i;

    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut classes = Vec::with_capacity(nodes.capacity());
    for j in 0..=ny {
        for i in 0..=nx {
            let x = if i == nx { x_hi } else { x_lo + i as f64 * hx };
            let y = if j == ny { y_hi } else { y_lo + j as f64 * hy };
            nodes.push([x, y]);
            let outer = i == 0 || i == nx || j == 0 || j == ny;
            classes.push(if outer { NodeClass::OuterBoundary } else { NodeClass::Interior });
        }
    }

    match interface {
        None => {}
        Some(RectInterface::Rectangle { x_lo: a, x_hi: b, y_lo: c, y_hi: d }) => {
            let (i0, i1) = (snap(a, x_lo, hx, nx)?, snap(b, x_lo, hx, nx)?);
            let (j0, j1) = (snap(c, y_lo, hy, ny)?, snap(d, y_lo, hy, ny)?);
            if !(0 < i0 && i0 < i1 && i1 < nx && 0 < j0 && j0 < j1 && j1 < ny) {
                return Err(Error::InvalidInput("interface rectangle must lie strictly inside".into()));
            }
            for j in j0..=j1 {
                for i in i0..=i1 {
                    if i == i0 || i == i1 || j == j0 || j == j1 {
                        classes[id(i, j)] = NodeClass::Interface;
                        nodes[id(i, j)] = [
                            if i == i0 { a } else if i == i1 { b } else { nodes[id(i, j)][0] },
                            if j == j0 { c } else if j == j1 { d } else { nodes[id(i, j)][1] },
                        ];
                    }
                }
            }
        }
        Some(RectInterface::HorizontalLine { y }) => {
            let jy = snap(y, y_lo, hy, ny)?;
            if jy == 0 || jy == ny {
                return Err(Error::InvalidInput("interface line must lie strictly inside".into()));
            }
            for i in 0..=nx {
                classes[id(i, jy)] = NodeClass::Interface;
                nodes[id(i, jy)][1] = y;
            }
        }
    }

    let mut triangles = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (p00, p10, p01, p11) = (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
            if (i + j) % 2 == 0 {
                triangles.push([p00, p10, p11]);
                triangles.push([p00, p11, p01]);
            } else {
                triangles.push([p00, p10, p01]);
                triangles.push([p10, p11, p01]);
            }
        }
    }
    Mesh::new(nodes, triangles, classes, Outline::Rect { x_lo, x_hi, y_lo, y_hi })
}

#[derive(Clone, Copy, PartialEq)]
enum Ring {
    None,
    Inner,
    Outer,
}

/// Disk triangulation: a fan around an inner ring plus an annulus to the
/// boundary, red-refined `refinement` times with ring chords projected back
/// onto their circles. A non-concentric interface circle is reached by a
/// Möbius automorphism of the disk, which maps circles to circles.
pub fn build_disk_mesh(radius: f64, refinement: usize, interface_circle: Option<([f64; 2], f64)>) -> Result<Mesh> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("disk radius must be positive".into()));
    }
    // Möbius parameter a, inner ring radius rho (unit disk), rotation angle
    let (a, rho, phi) = match interface_circle {
        None => (0.0, 0.5, 0.0),
        Some((c, ri)) => {
            let d = (c[0] * c[0] + c[1] * c[1]).sqrt() / radius;
            let r = ri / radius;
            if !(r > 0.0) || d + r >= 1.0 - 1e-9 {
                return Err(Error::InvalidInput(format!(
                    "interface circle (center ({}, {}), radius {ri}) must lie strictly inside the disk",
                    c[0], c[1]
                )));
            }
            let phi = c[1].atan2(c[0]);
            let (p, q) = (d + r, d - r);
            let a = if (p + q).abs() < 1e-15 {
                0.0
            } else {
                let s = 1.0 + p * q;
                (s - (s * s - (p + q) * (p + q)).sqrt()) / (p + q)
            };
            let rho = (p - a) / (1.0 - a * p);
            (a, rho, phi)
        }
    };

    let mut pts: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let mut ring = vec![Ring::None];
    let n_in = 8;
    let n_out = 16;
    for i in 0..n_in {
        let t = 2.0 * PI * i as f64 / n_in as f64;
        pts.push([rho * t.cos(), rho * t.sin()]);
        ring.push(Ring::Inner);
    }
    for k in 0..n_out {
        let t = 2.0 * PI * k as f64 / n_out as f64;
        pts.push([t.cos(), t.sin()]);
        ring.push(Ring::Outer);
    }
    let inner = |i: usize| 1 + (i % n_in);
    let outer = |k: usize| 1 + n_in + (k % n_out);
    let mut tris: Vec<[usize; 3]> = Vec::new();
    for i in 0..n_in {
        tris.push([0, inner(i), inner(i + 1)]);
        tris.push([inner(i), outer(2 * i), outer(2 * i + 1)]);
        tris.push([inner(i), outer(2 * i + 1), inner(i + 1)]);
        tris.push([inner(i + 1), outer(2 * i + 1), outer(2 * i + 2)]);
    }

    for _ in 0..refinement {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(4 * tris.len());
        for t in &tris {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (u, v) = (t[k], t[(k + 1) % 3]);
                let key = (u.min(v), u.max(v));
                m[k] = *mid.entry(key).or_insert_with(|| {
                    let mut p = [(pts[u][0] + pts[v][0]) / 2.0, (pts[u][1] + pts[v][1]) / 2.0];
                    let tag = if ring[u] == ring[v] { ring[u] } else { Ring::None };
                    let target = match tag {
                        Ring::Inner => Some(rho),
                        Ring::Outer => Some(1.0),
                        Ring::None => None,
                    };
                    if let Some(rt) = target {
                        let len = (p[0] * p[0] + p[1] * p[1]).sqrt();
                        p = [p[0] * rt / len, p[1] * rt / len];
                    }
                    pts.push(p);
                    ring.push(tag);
                    pts.len() - 1
                });
            }
            // m[0] on (t0,t1), m[1] on (t1,t2), m[2] on (t2,t0)
            next.push([t[0], m[0], m[2]]);
            next.push([m[0], t[1], m[1]]);
            next.push([m[2], m[1], t[2]]);
            next.push([m[0], m[1], m[2]]);
        }
        tris = next;
    }

    let (cp, sp) = (phi.cos(), phi.sin());
    let nodes: Vec<[f64; 2]> = pts
        .iter()
        .zip(&ring)
        .map(|(z, tag)| {
            // z -> (z + a) / (1 + a z) for real a
            let (x, y) = (z[0], z[1]);
            let (nr, ni) = (x + a, y);
            let (dr, di) = (1.0 + a * x, a * y);
            let den = dr * dr + di * di;
            let (mut wr, mut wi) = ((nr * dr + ni * di) / den, (ni * dr - nr * di) / den);
            if *tag == Ring::Outer {
                let len = (wr * wr + wi * wi).sqrt();
                wr /= len;
                wi /= len;
            }
            [radius * (cp * wr - sp * wi), radius * (sp * wr + cp * wi)]
        })
        .collect();
    let classes = ring
        .iter()
        .map(|t| match t {
            Ring::Outer => NodeClass::OuterBoundary,
            Ring::Inner if interface_circle.is_some() => NodeClass::Interface,
            _ => NodeClass::Interior,
        })
        .collect();
    Mesh::new(nodes, tris, classes, Outline::Disk { radius })
}

/// Transport node coordinates through `transform`; connectivity and classes
/// are unchanged.
pub fn map_mesh(mesh: &Mesh, transform: &Transform) -> Result<Mesh> {
    let nodes = mesh.nodes.iter().map(|&p| transform.forward(p)).collect();
    let out = Mesh { nodes, triangles: mesh.triangles.clone(), classes: mesh.classes.clone(), outline: mesh.outline };
    out.check_triangles()?;
    Ok(out)
}
