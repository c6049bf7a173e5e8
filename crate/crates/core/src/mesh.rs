//! Structured triangulations of the annulus `r1 <= |x| <= r2`.
//!
//! Nodes sit on `n_r + 1` concentric circles with `n_theta` equally spaced
//! angles each. Ring 0 is the inner circle (the inaccessible boundary
//! `gamma_u`), ring `n_r` the outer circle (the accessible boundary
//! `gamma_m`). Every quadrilateral cell is split along the same diagonal.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTag {
    /// Outer circle, where Cauchy data are measured.
    GammaM,
    /// Inner circle, where data are to be recovered.
    GammaU,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Point>,
    /// Counterclockwise node triples.
    pub triangles: Vec<[usize; 3]>,
    pub gamma_m_nodes: Vec<usize>,
    pub gamma_u_nodes: Vec<usize>,
    pub gamma_m_edges: Vec<[usize; 2]>,
    pub gamma_u_edges: Vec<[usize; 2]>,
    /// Maximum edge length.
    pub h: f64,
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Builds the structured polar mesh of the annulus.
pub fn generate_annulus(r1: f64, r2: f64, n_theta: usize, n_r: usize) -> Result<Mesh> {
    if !(r1.is_finite() && r2.is_finite() && r1 > 0.0 && r1 < r2) {
        return Err(Error::Parameter(format!(
            "annulus radii must satisfy 0 < r1 < r2, got r1={r1}, r2={r2}"
        )));
    }
    if n_theta < 4 {
        return Err(Error::Parameter(format!(
            "n_theta must be at least 4, got {n_theta}"
        )));
    }
    if n_r < 1 {
        return Err(Error::Parameter("n_r must be at least 1".into()));
    }

    let idx = |ring: usize, k: usize| ring * n_theta + (k % n_theta);

    let mut nodes = Vec::with_capacity(n_theta * (n_r + 1));
    for ring in 0..=n_r {
        // exact endpoints so boundary nodes lie on the circles to rounding
        let r = if ring == n_r {
            r2
        } else {
            r1 + (r2 - r1) * ring as f64 / n_r as f64
        };
        for k in 0..n_theta {
            let theta = 2.0 * PI * k as f64 / n_theta as f64;
            nodes.push([r * theta.cos(), r * theta.sin()]);
        }
    }

    let mut triangles = Vec::with_capacity(2 * n_theta * n_r);
    for ring in 0..n_r {
        for k in 0..n_theta {
            let a = idx(ring, k);
            let b = idx(ring, k + 1);
            let c = idx(ring + 1, k + 1);
            let d = idx(ring + 1, k);
            triangles.push([a, c, b]);
            triangles.push([a, d, c]);
        }
    }

    let gamma_u_nodes: Vec<usize> = (0..n_theta).map(|k| idx(0, k)).collect();
    let gamma_m_nodes: Vec<usize> = (0..n_theta).map(|k| idx(n_r, k)).collect();
    let gamma_u_edges = (0..n_theta).map(|k| [idx(0, k), idx(0, k + 1)]).collect();
    let gamma_m_edges = (0..n_theta)
        .map(|k| [idx(n_r, k), idx(n_r, k + 1)])
        .collect();

    let mut mesh = Mesh {
        nodes,
        triangles,
        gamma_m_nodes,
        gamma_u_nodes,
        gamma_m_edges,
        gamma_u_edges,
        h: 0.0,
    };
    mesh.h = mesh.max_edge_length();
    Ok(mesh)
}

/// Sorted, duplicate-free node indices of one boundary part.
pub fn boundary_nodes(mesh: &Mesh, tag: BoundaryTag) -> Vec<usize> {
    let raw = match tag {
        BoundaryTag::GammaM => &mesh.gamma_m_nodes,
        BoundaryTag::GammaU => &mesh.gamma_u_nodes,
    };
    let set: BTreeSet<usize> = raw.iter().copied().collect();
    set.into_iter().collect()
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.nodes[a], self.nodes[b], self.nodes[c]]
    }

    /// Each undirected edge with the number of triangles sharing it.
    pub fn edge_multiplicity(&self) -> BTreeMap<(usize, usize), usize> {
        let mut edges = BTreeMap::new();
        for tri in &self.triangles {
            for e in 0..3 {
                let (i, j) = (tri[e], tri[(e + 1) % 3]);
                *edges.entry((i.min(j), i.max(j))).or_insert(0) += 1;
            }
        }
        edges
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edge_multiplicity()
            .keys()
            .map(|&(i, j)| dist(self.nodes[i], self.nodes[j]))
            .fold(0.0, f64::max)
    }

    /// Area of the polygonal domain covered by the triangles.
    pub fn area(&self) -> f64 {
        (0..self.n_triangles())
            .map(|t| {
                let [a, b, c] = self.triangle_points(t);
                signed_area(a, b, c)
            })
            .sum()
    }

    pub fn boundary_length(&self, tag: BoundaryTag) -> f64 {
        let edges = match tag {
            BoundaryTag::GammaM => &self.gamma_m_edges,
            BoundaryTag::GammaU => &self.gamma_u_edges,
        };
        edges
            .iter()
            .map(|&[i, j]| dist(self.nodes[i], self.nodes[j]))
            .sum()
    }

    /// Checks the structural invariants: positive orientation, boundary
    /// tagging consistent with the edge topology, and edge multiplicities.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_nodes();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(Error::MeshFormat(format!(
                    "triangle {t} references a node outside 0..{n}"
                )));
            }
            let [a, b, c] = self.triangle_points(t);
            let area = signed_area(a, b, c);
            if !(area > 0.0) {
                return Err(Error::DegenerateTriangle { index: t, area });
            }
        }

        let m: BTreeSet<usize> = self.gamma_m_nodes.iter().copied().collect();
        let u: BTreeSet<usize> = self.gamma_u_nodes.iter().copied().collect();
        if m.len() != self.gamma_m_nodes.len() || u.len() != self.gamma_u_nodes.len() {
            return Err(Error::MeshFormat("duplicate boundary node index".into()));
        }
        if !m.is_disjoint(&u) {
            return Err(Error::MeshFormat("gamma_m and gamma_u overlap".into()));
        }

        let multiplicity = self.edge_multiplicity();
        let mut on_boundary = BTreeSet::new();
        for (&(i, j), &count) in &multiplicity {
            match count {
                1 => {
                    on_boundary.insert(i);
                    on_boundary.insert(j);
                }
                2 => {}
                _ => {
                    return Err(Error::MeshFormat(format!(
                        "edge ({i}, {j}) is shared by {count} triangles"
                    )))
                }
            }
        }
        let tagged: BTreeSet<usize> = m.union(&u).copied().collect();
        if tagged != on_boundary {
            return Err(Error::MeshFormat(
                "tagged boundary nodes do not match the boundary edges".into(),
            ));
        }
        for (edges, set, name) in [
            (&self.gamma_m_edges, &m, "gamma_m"),
            (&self.gamma_u_edges, &u, "gamma_u"),
        ] {
            for &[i, j] in edges {
                if !set.contains(&i) || !set.contains(&j) {
                    return Err(Error::MeshFormat(format!(
                        "{name} edge ({i}, {j}) leaves its boundary"
                    )));
                }
                if multiplicity.get(&(i.min(j), i.max(j))) != Some(&1) {
                    return Err(Error::MeshFormat(format!(
                        "{name} edge ({i}, {j}) is not a boundary edge"
                    )));
                }
            }
        }
        let mut used = vec![false; n];
        for tri in &self.triangles {
            for &v in tri {
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|&b| !b) {
            return Err(Error::MeshFormat(format!("node {v} is in no triangle")));
        }
        Ok(())
    }

    /// Serializes to the native text format.
    pub fn to_native_string(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.n_nodes(), self.n_triangles()).unwrap();
        for p in &self.nodes {
            writeln!(out, "{:?} {:?}", p[0], p[1]).unwrap();
        }
        for t in &self.triangles {
            writeln!(out, "{} {} {}", t[0], t[1], t[2]).unwrap();
        }
        for (name, list) in [
            ("gamma_m", &self.gamma_m_nodes),
            ("gamma_u", &self.gamma_u_nodes),
        ] {
            out.push_str(name);
            out.push(':');
            for i in list {
                write!(out, " {i}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Parses the native text format. Boundary edges are recovered as the
    /// edges of multiplicity one whose endpoints share a tag.
    pub fn from_native_str(text: &str) -> Result<Mesh> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let bad = |msg: &str| Error::MeshFormat(msg.to_string());

        let header = lines.next().ok_or_else(|| bad("empty file"))?;
        let counts: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad("header must be `n_nodes n_triangles`"))?;
        let [n_nodes, n_tris] = counts[..] else {
            return Err(bad("header must be `n_nodes n_triangles`"));
        };

        let mut nodes = Vec::with_capacity(n_nodes);
        for k in 0..n_nodes {
            let line = lines
                .next()
                .ok_or_else(|| bad(&format!("missing node line {k}")))?;
            let xy: Vec<f64> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(&format!("node line {k}: expected `x y`")))?;
            match xy[..] {
                [x, y] if x.is_finite() && y.is_finite() => nodes.push([x, y]),
                _ => return Err(bad(&format!("node line {k}: expected `x y`"))),
            }
        }
        let mut triangles = Vec::with_capacity(n_tris);
        for k in 0..n_tris {
            let line = lines
                .next()
                .ok_or_else(|| bad(&format!("missing triangle line {k}")))?;
            let ijk: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(&format!("triangle line {k}: expected `i j k`")))?;
            match ijk[..] {
                [i, j, l] => triangles.push([i, j, l]),
                _ => return Err(bad(&format!("triangle line {k}: expected `i j k`"))),
            }
        }

        let mut tags: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for line in lines {
            let (name, rest) = line
                .split_once(':')
                .ok_or_else(|| bad(&format!("unexpected line `{line}`")))?;
            let name = name.trim();
            if name != "gamma_m" && name != "gamma_u" {
                return Err(bad(&format!("unknown boundary tag `{name}`")));
            }
            let ids: Vec<usize> = rest
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(&format!("bad index list for {name}")))?;
            if tags.insert(name, ids).is_some() {
                return Err(bad(&format!("duplicate `{name}` line")));
            }
        }
        let mut gamma_m_nodes = tags.remove("gamma_m").ok_or_else(|| bad("missing gamma_m"))?;
        let mut gamma_u_nodes = tags.remove("gamma_u").ok_or_else(|| bad("missing gamma_u"))?;
        gamma_m_nodes.sort_unstable();
        gamma_u_nodes.sort_unstable();
        if gamma_m_nodes.iter().chain(&gamma_u_nodes).any(|&i| i >= n_nodes) {
            return Err(bad("boundary index out of range"));
        }

        let mut mesh = Mesh {
            nodes,
            triangles,
            gamma_m_nodes,
            gamma_u_nodes,
            gamma_m_edges: Vec::new(),
            gamma_u_edges: Vec::new(),
            h: 0.0,
        };
        if mesh.triangles.iter().flatten().any(|&v| v >= n_nodes) {
            return Err(bad("triangle index out of range"));
        }
        let m: BTreeSet<usize> = mesh.gamma_m_nodes.iter().copied().collect();
        let u: BTreeSet<usize> = mesh.gamma_u_nodes.iter().copied().collect();
        let multiplicity = mesh.edge_multiplicity();
        // keep the orientation the owning triangle gives the edge
        for tri in &mesh.triangles {
            for e in 0..3 {
                let (i, j) = (tri[e], tri[(e + 1) % 3]);
                let key = (i.min(j), i.max(j));
                if multiplicity[&key] != 1 {
                    continue;
                }
                if m.contains(&i) && m.contains(&j) {
                    mesh.gamma_m_edges.push([i, j]);
                } else if u.contains(&i) && u.contains(&j) {
                    mesh.gamma_u_edges.push([i, j]);
                }
            }
        }
        mesh.h = mesh.max_edge_length();
        mesh.validate()?;
        Ok(mesh)
    }

    pub fn write_native(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_native_string())?;
        Ok(())
    }

    pub fn read_native(path: &Path) -> Result<Mesh> {
        Mesh::from_native_str(&std::fs::read_to_string(path)?)
    }
}
