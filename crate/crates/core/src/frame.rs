//! Orthonormal 4-frames and the small amount of 4D linear algebra they need.

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

pub type Vec4 = Vector4<f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Frenet,
    ParallelTransport,
}

/// Tangent plus three unit normals at arclength `s`.
///
/// For the Frenet flavor the rows are T, N, B₁, B₂; for parallel transport
/// they are T, M₁, M₂, M₃.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSample {
    pub s: f64,
    pub vectors: [Vec4; 4],
    pub flavor: Flavor,
}

impl FrameSample {
    pub fn new(s: f64, vectors: [Vec4; 4], flavor: Flavor) -> Self {
        FrameSample { s, vectors, flavor }
    }

    pub fn identity(s: f64, flavor: Flavor) -> Self {
        FrameSample::new(
            s,
            [Vec4::x(), Vec4::y(), Vec4::z(), Vec4::w()],
            flavor,
        )
    }

    pub fn tangent(&self) -> Vec4 {
        self.vectors[0]
    }

    pub fn normals(&self) -> [Vec4; 3] {
        [self.vectors[1], self.vectors[2], self.vectors[3]]
    }

    /// Row matrix with T and the normals as rows.
    pub fn matrix(&self) -> Matrix4<f64> {
        Matrix4::from_rows(&self.vectors.map(|v| v.transpose()))
    }

    pub fn determinant(&self) -> f64 {
        self.matrix().determinant()
    }

    /// Largest entry of |G − I| for the Gram matrix G of the rows.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((self.vectors[i].dot(&self.vectors[j]) - target).abs());
            }
        }
        worst
    }

    /// Flat row-major layout T, M₁, M₂, M₃ (16 numbers).
    pub fn flat(&self) -> [f64; 16] {
        std::array::from_fn(|k| self.vectors[k / 4][k % 4])
    }
}

/// Generalized cross product: the vector `x` with `⟨x, y⟩ = det[a; b; c; y]`.
///
/// `det[a; b; c; cross4(a, b, c)] = ‖cross4‖² ≥ 0`, so appending the result
/// to an orthonormal triple yields a positively oriented basis.
pub fn cross4(a: &Vec4, b: &Vec4, c: &Vec4) -> Vec4 {
    Vec4::from_fn(|i, _| {
        let mut m = Matrix4::zeros();
        m.set_row(0, &a.transpose());
        m.set_row(1, &b.transpose());
        m.set_row(2, &c.transpose());
        let mut e = Vec4::zeros();
        e[i] = 1.0;
        m.set_row(3, &e.transpose());
        m.determinant()
    })
}

/// Residual norm below which a standard axis is not used to extend a basis.
const AXIS_ACCEPT: f64 = 1e-3;

fn project_out(v: &Vec4, basis: &[Vec4]) -> Vec4 {
    let mut r = *v;
    // two passes keep the residual orthogonal to working precision
    for _ in 0..2 {
        for b in basis {
            r -= b * b.dot(&r);
        }
    }
    r
}

/// Extend an orthonormal prefix (length 1..=3) to a positively oriented
/// orthonormal basis of E⁴.
///
/// The first new vector comes from the coordinate axis with the smallest
/// projection onto the prefix; the rest are taken from the remaining axes in
/// index order. The last vector's sign is fixed so that the determinant is +1.
pub fn complete_basis(prefix: &[Vec4]) -> [Vec4; 4] {
    assert!((1..=3).contains(&prefix.len()), "prefix must hold 1 to 3 vectors");
    let axes: [Vec4; 4] = [Vec4::x(), Vec4::y(), Vec4::z(), Vec4::w()];
    let mut basis: Vec<Vec4> = prefix.to_vec();

    let projection = |v: &Vec4, basis: &[Vec4]| (v - project_out(v, basis)).norm();
    let pivot = (0..4)
        .min_by(|&i, &j| {
            projection(&axes[i], &basis)
                .partial_cmp(&projection(&axes[j], &basis))
                .unwrap()
        })
        .unwrap();

    let order = std::iter::once(pivot).chain((0..4).filter(|&i| i != pivot));
    for i in order {
        if basis.len() == 4 {
            break;
        }
        let r = project_out(&axes[i], &basis);
        let n = r.norm();
        if n >= AXIS_ACCEPT {
            basis.push(r / n);
        }
    }
    // Axis residual norms squared sum to at least 1 over the unused axes, so
    // the loop above always fills the basis; this is a guard for bad input.
    while basis.len() < 4 {
        let c = cross4(&basis[0], &basis[1], &basis[2]);
        basis.push(c.normalize());
    }
    let mut out = [basis[0], basis[1], basis[2], basis[3]];
    let m = Matrix4::from_rows(&out.map(|v| v.transpose()));
    if m.determinant() < 0.0 {
        out[3] = -out[3];
    }
    out
}

/// Gram–Schmidt the three normals against a fixed unit tangent, in order.
pub fn reorthonormalize_normals(tangent: &Vec4, normals: &mut [Vec4; 3]) {
    let mut basis = vec![*tangent];
    for m in normals.iter_mut() {
        let r = project_out(m, &basis);
        *m = r / r.norm();
        basis.push(*m);
    }
}

/// Full Gram–Schmidt of all four rows, tangent first.
pub fn reorthonormalize_all(vectors: &mut [Vec4; 4]) {
    vectors[0] = vectors[0].normalize();
    let t = vectors[0];
    let mut normals = [vectors[1], vectors[2], vectors[3]];
    reorthonormalize_normals(&t, &mut normals);
    vectors[1..].copy_from_slice(&normals);
}

/// Angle between two frames: the largest angle between corresponding rows.
pub fn frame_angle(a: &FrameSample, b: &FrameSample) -> f64 {
    a.vectors
        .iter()
        .zip(&b.vectors)
        .map(|(u, v)| 2.0 * ((u - v).norm() / 2.0).min(1.0).asin())
        .fold(0.0, f64::max)
}
