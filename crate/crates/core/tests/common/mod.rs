#![allow(dead_code)]

use sphere_tikhonov::{build_problem, Edge, Node, Problem, Vec3, Weight};

pub fn fixed(id: &str, y: [f64; 3]) -> Node {
    Node::new(id, Some(Vec3(y)), Weight::Infinite)
}

pub fn free(id: &str) -> Node {
    Node::new(id, None, Weight::Finite(0.0))
}

/// One free node between fixed neighbours at (1,0,0) and (−1,0,0).
pub fn antipodal(lambda: f64) -> Problem {
    build_problem(
        vec![fixed("a", [1.0, 0.0, 0.0]), free("m"), fixed("b", [-1.0, 0.0, 0.0])],
        vec![Edge::new("a", "m", lambda), Edge::new("m", "b", lambda)],
    )
    .unwrap()
}

pub const ANTIPODAL_JSON: &str = r#"{
  "nodes": [
    { "id": "a", "y": [1.0, 0.0, 0.0], "w": "inf" },
    { "id": "m", "w": 0 },
    { "id": "b", "y": [-1.0, 0.0, 0.0], "w": "inf" }
  ],
  "edges": [
    { "u": "a", "v": "m", "lambda": 1.0 },
    { "u": "m", "v": "b", "lambda": 1.0 }
  ]
}
"#;

/// Unit vectors on a latitude/longitude grid with the given spacing in degrees.
pub fn sphere_grid(step_deg: f64) -> Vec<Vec3> {
    let step = step_deg.to_radians();
    let n_lat = (std::f64::consts::PI / step).round() as usize;
    let n_lon = (2.0 * std::f64::consts::PI / step).round() as usize;
    let mut out = vec![Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -1.0)];
    for i in 1..n_lat {
        let theta = i as f64 * step;
        for j in 0..n_lon {
            let phi = j as f64 * step;
            out.push(Vec3::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()));
        }
    }
    out
}
