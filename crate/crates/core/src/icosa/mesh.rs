use std::collections::HashMap;
use std::f64::consts::PI;

use crate::geom::{spherical_distance, UnitVec3, Vec3};

/// A triangulated sphere. Faces are wound counter-clockwise seen from
/// outside, so `normals[f]` points away from the origin.
#[derive(Clone, Debug)]
pub struct TriangleMesh {
    pub vertices: Vec<UnitVec3>,
    pub faces: Vec<[u32; 3]>,
    /// Un-normalized plane normal `(v2 - v1) × (v3 - v1)` per face.
    pub normals: Vec<Vec3>,
}

impl TriangleMesh {
    fn new(vertices: Vec<UnitVec3>, faces: Vec<[u32; 3]>) -> TriangleMesh {
        let normals = faces.iter().map(|f| face_normal(&vertices, *f)).collect();
        TriangleMesh {
            vertices,
            faces,
            normals,
        }
    }

    pub fn face_vertices(&self, f: usize) -> [UnitVec3; 3] {
        let [a, b, c] = self.faces[f];
        [
            self.vertices[a as usize],
            self.vertices[b as usize],
            self.vertices[c as usize],
        ]
    }

    /// Longest great-circle edge over all faces.
    pub fn max_edge_angle(&self) -> f64 {
        self.faces
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(a, b)| spherical_distance(self.vertices[a as usize], self.vertices[b as usize]))
            .fold(0.0, f64::max)
    }

    /// Whether `p` lies inside the spherical triangle of face `f`, with
    /// boundary points counted as inside.
    pub fn contains(&self, f: usize, p: UnitVec3) -> bool {
        spherical_inside_margin(self.face_vertices(f), p) >= 0.0
    }

    /// Solid angle of face `f` (spherical excess).
    pub fn spherical_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.face_vertices(f).map(UnitVec3::vec);
        // Van Oosterom-Strackee
        let num = a.dot(b.cross(c)).abs();
        let den = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
        2.0 * num.atan2(den)
    }
}

/// Smallest signed distance of `p` to the three great-circle edge planes;
/// non-negative iff `p` is inside the triangle.
pub(crate) fn spherical_inside_margin(tri: [UnitVec3; 3], p: UnitVec3) -> f64 {
    let [a, b, c] = tri.map(UnitVec3::vec);
    let p = p.vec();
    let e = [a.cross(b), b.cross(c), c.cross(a)];
    e.iter()
        .map(|n| p.dot(*n) / n.norm())
        .fold(f64::INFINITY, f64::min)
}

fn face_normal(vertices: &[UnitVec3], [a, b, c]: [u32; 3]) -> Vec3 {
    let (a, b, c) = (
        vertices[a as usize].vec(),
        vertices[b as usize].vec(),
        vertices[c as usize].vec(),
    );
    (b - a).cross(c - a)
}

/// Regular icosahedron with poles at (0,0,±1) and two staggered pentagons
/// `cos(atan ½)·(cos(iπ/5), sin(iπ/5), (−1)^i/2)`, i = 0..9.
///
/// Vertex 0 is the north pole, 1..=10 the pentagon vertices in order of
/// `i`, 11 the south pole. Faces: 5 northern caps, 10 band triangles
/// `(i, i+1, i+2)`, then 5 southern caps.
pub fn build_icosahedron() -> TriangleMesh {
    let r = (0.5f64).atan().cos();
    let mut vertices = vec![UnitVec3::NORTH];
    for i in 0..10 {
        let a = i as f64 * PI / 5.0;
        let z = if i % 2 == 0 { 0.5 } else { -0.5 };
        vertices.push(UnitVec3::new(r * a.cos(), r * a.sin(), r * z));
    }
    vertices.push(UnitVec3::SOUTH);

    let ring = |i: usize| (1 + i % 10) as u32;
    let mut faces = Vec::with_capacity(20);
    for k in 0..5 {
        faces.push([0, ring(2 * k), ring(2 * k + 2)]);
    }
    for i in 0..10 {
        faces.push([ring(i), ring(i + 1), ring(i + 2)]);
    }
    for k in 0..5 {
        faces.push([11, ring(2 * k + 1), ring(2 * k + 3)]);
    }
    for f in faces.iter_mut() {
        let n = face_normal(&vertices, *f);
        let centroid = vertices[f[0] as usize].vec()
            + vertices[f[1] as usize].vec()
            + vertices[f[2] as usize].vec();
        if n.dot(centroid) < 0.0 {
            f.swap(1, 2);
        }
    }
    TriangleMesh::new(vertices, faces)
}

/// Refines `mesh` `levels` times, returning `levels + 1` meshes starting
/// with a copy of the input. Each face splits into four at its re-projected
/// edge midpoints; children of face `f` are faces `4f..4f+4` of the next
/// level in the order (corner 1, corner 2, corner 3, center).
pub fn subdivide(mesh: &TriangleMesh, levels: usize) -> Vec<TriangleMesh> {
    let mut out = vec![mesh.clone()];
    for _ in 0..levels {
        let parent = out.last().unwrap();
        let mut vertices = parent.vertices.clone();
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, vertices: &mut Vec<UnitVec3>| -> u32 {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                let m = (vertices[a as usize].vec() + vertices[b as usize].vec())
                    .normalize()
                    .expect("edge endpoints are never antipodal");
                vertices.push(m);
                (vertices.len() - 1) as u32
            })
        };
        let mut faces = Vec::with_capacity(parent.faces.len() * 4);
        for &[v1, v2, v3] in &parent.faces {
            let m12 = midpoint(v1, v2, &mut vertices);
            let m23 = midpoint(v2, v3, &mut vertices);
            let m31 = midpoint(v3, v1, &mut vertices);
            faces.push([v1, m12, m31]);
            faces.push([m12, v2, m23]);
            faces.push([m31, m23, v3]);
            faces.push([m23, m31, m12]);
        }
        out.push(TriangleMesh::new(vertices, faces));
    }
    out
}
