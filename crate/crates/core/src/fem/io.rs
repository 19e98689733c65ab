use super::{Mesh, NodeClass, Outline};
use crate::{Error, Result};
use std::io::{BufRead, Write};

/// Plain-text export. Coordinates use the shortest round-trip float format,
/// so `read_mesh(write_mesh(m))` is bitwise identical.
pub fn write_mesh(mesh: &Mesh, mut out: impl Write) -> Result<()> {
    writeln!(out, "nodes {}", mesh.node_count())?;
    for (p, c) in mesh.nodes().iter().zip(mesh.classes()) {
        writeln!(out, "{:?} {:?} {}", p[0], p[1], c.as_str())?;
    }
    writeln!(out, "triangles {}", mesh.triangle_count())?;
    for t in mesh.triangles() {
        writeln!(out, "{} {} {}", t[0], t[1], t[2])?;
    }
    Ok(())
}

fn header(line: Option<(usize, String)>, key: &str) -> Result<(usize, usize)> {
    let (no, text) = line.ok_or_else(|| Error::Parse { line: 0, msg: format!("missing `{key}` header") })?;
    let mut parts = text.split_whitespace();
    match (parts.next(), parts.next().map(str::parse::<usize>), parts.next()) {
        (Some(k), Some(Ok(n)), None) if k == key => Ok((no, n)),
        _ => Err(Error::Parse { line: no, msg: format!("expected `{key} <count>`") }),
    }
}

fn infer_outline(nodes: &[[f64; 2]], classes: &[NodeClass]) -> Outline {
    let outer: Vec<[f64; 2]> =
        nodes.iter().zip(classes).filter(|(_, c)| **c == NodeClass::OuterBoundary).map(|(p, _)| *p).collect();
    if outer.is_empty() {
        return Outline::Unknown;
    }
    let (mut x_lo, mut x_hi, mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in nodes {
        x_lo = x_lo.min(p[0]);
        x_hi = x_hi.max(p[0]);
        y_lo = y_lo.min(p[1]);
        y_hi = y_hi.max(p[1]);
    }
    let rect = Outline::Rect { x_lo, x_hi, y_lo, y_hi };
    let radius = outer.iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
    let disk = Outline::Disk { radius };
    for cand in [rect, disk] {
        if outer.iter().all(|&p| cand.distance_to_boundary(p).unwrap() <= 1e-12 * (1.0 + radius)) {
            return cand;
        }
    }
    Outline::Unknown
}

pub fn read_mesh(input: impl BufRead) -> Result<Mesh> {
    let mut lines = input
        .lines()
        .enumerate()
        .map(|(i, l)| l.map(|s| (i + 1, s)))
        .filter(|l| !matches!(l, Ok((_, s)) if s.trim().is_empty()));
    let mut next = || lines.next().transpose().map_err(Error::from);

    let (_, n) = header(next()?, "nodes")?;
    let mut nodes = Vec::with_capacity(n);
    let mut classes = Vec::with_capacity(n);
    for _ in 0..n {
        let (no, text) = next()?.ok_or_else(|| Error::Parse { line: 0, msg: "unexpected end of node list".into() })?;
        let parts: Vec<&str> = text.split_whitespace().collect();
        let bad = || Error::Parse { line: no, msg: "expected `x y CLASS`".into() };
        if parts.len() != 3 {
            return Err(bad());
        }
        let x: f64 = parts[0].parse().map_err(|_| bad())?;
        let y: f64 = parts[1].parse().map_err(|_| bad())?;
        let c = NodeClass::parse(parts[2])
            .ok_or_else(|| Error::Parse { line: no, msg: format!("unknown node class {:?}", parts[2]) })?;
        nodes.push([x, y]);
        classes.push(c);
    }
    let (_, m) = header(next()?, "triangles")?;
    let mut tris = Vec::with_capacity(m);
    for _ in 0..m {
        let (no, text) =
            next()?.ok_or_else(|| Error::Parse { line: 0, msg: "unexpected end of triangle list".into() })?;
        let idx: std::result::Result<Vec<usize>, _> = text.split_whitespace().map(str::parse).collect();
        match idx {
            Ok(v) if v.len() == 3 => tris.push([v[0], v[1], v[2]]),
            _ => return Err(Error::Parse { line: no, msg: "expected `i j k`".into() }),
        }
    }
    if let Some((no, _)) = next()? {
        return Err(Error::Parse { line: no, msg: "trailing content".into() });
    }
    let outline = infer_outline(&nodes, &classes);
    Mesh::new(nodes, tris, classes, outline)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{build_disk_mesh, build_rect_mesh};

    fn roundtrip(m: &Mesh) -> Mesh {
        let mut buf = Vec::new();
        write_mesh(m, &mut buf).unwrap();
        read_mesh(buf.as_slice()).unwrap()
    }

    #[test]
    fn roundtrip_is_bitwise() {
        let rect = build_rect_mesh((-1.0, 2.0, 0.0, 1.0), 6, 4, None).unwrap();
        let disk = build_disk_mesh(1.0, 2, Some(([1.0 / 3.0, 0.0], 1.0 / 3.0))).unwrap();
        for m in [rect, disk] {
            let back = roundtrip(&m);
            assert_eq!(back.fingerprint(), m.fingerprint());
            assert!(matches!(
                (back.outline(), m.outline()),
                (Outline::Rect { .. }, Outline::Rect { .. }) | (Outline::Disk { .. }, Outline::Disk { .. })
            ));
        }
    }

    #[test]
    fn rejects_garbage() {
        let bad = "nodes 1\n0 0 SOMEWHERE\ntriangles 0\n";
        assert!(matches!(read_mesh(bad.as_bytes()), Err(Error::Parse { line: 2, .. })));
        let short = "nodes 3\n0 0 INTERIOR\n";
        assert!(read_mesh(short.as_bytes()).is_err());
        let inverted = "nodes 3\n0 0 INTERIOR\n0 1 INTERIOR\n1 0 INTERIOR\ntriangles 1\n0 1 2\n";
        assert!(matches!(read_mesh(inverted.as_bytes()), Err(Error::InvertedElement { .. })));
    }
}
