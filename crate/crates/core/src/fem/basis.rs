//! Lagrange shape functions on triangles, in barycentric coordinates.
//!
//! Local node order: vertices v0, v1, v2, then midpoints of (v0v1),
//! (v1v2), (v2v0).

/// Number of local nodes for order p.
pub fn nodes_per_element(order: usize) -> usize {
    match order {
        1 => 3,
        2 => 6,
        _ => panic!("unsupported element order {order}"),
    }
}

/// Shape function values at barycentric point `l`.
pub fn shape_values(order: usize, l: [f64; 3]) -> [f64; 6] {
    match order {
        1 => [l[0], l[1], l[2], 0.0, 0.0, 0.0],
        2 => [
            l[0] * (2.0 * l[0] - 1.0),
            l[1] * (2.0 * l[1] - 1.0),
            l[2] * (2.0 * l[2] - 1.0),
            4.0 * l[0] * l[1],
            4.0 * l[1] * l[2],
            4.0 * l[2] * l[0],
        ],
        _ => panic!("unsupported element order {order}"),
    }
}

/// Physical gradients given the (constant) gradients of the barycentrics.
pub fn shape_gradients(order: usize, l: [f64; 3], gl: [[f64; 2]; 3]) -> [[f64; 2]; 6] {
    let mut g = [[0.0; 2]; 6];
    match order {
        1 => {
            g[..3].copy_from_slice(&gl);
        }
        2 => {
            for i in 0..3 {
                for d in 0..2 {
                    g[i][d] = (4.0 * l[i] - 1.0) * gl[i][d];
                }
            }
            let pairs = [(0, 1), (1, 2), (2, 0)];
            for (e, &(a, b)) in pairs.iter().enumerate() {
                for d in 0..2 {
                    g[3 + e][d] = 4.0 * (l[a] * gl[b][d] + l[b] * gl[a][d]);
                }
            }
        }
        _ => panic!("unsupported element order {order}"),
    }
    g
}

/// 1D Lagrange functions on an edge parameterised by t ∈ [0, 1]
/// (nodes at t = 0, [1/2,] 1 in that order).
pub fn edge_values(order: usize, t: f64) -> [f64; 3] {
    match order {
        1 => [1.0 - t, t, 0.0],
        2 => [(1.0 - t) * (1.0 - 2.0 * t), 4.0 * t * (1.0 - t), t * (2.0 * t - 1.0)],
        _ => panic!("unsupported element order {order}"),
    }
}
