//! Reference frames.
//!
//! World frame is Z-up. The target frame is anchored at the workpiece target
//! point with its Z axis along the outward surface normal; the vehicle
//! position expressed in it is the tracked coordinate `λ`.

use nalgebra::{Matrix3, Point3, Rotation3, Vector3};
use thiserror::Error;

/// Cross-product magnitude (of unit vectors) below which the tangent hint is
/// treated as parallel to the normal.
const PARALLEL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrameError {
    #[error("surface normal has zero length")]
    ZeroNormal,
    #[error("tangent hint has zero length")]
    ZeroHint,
    #[error("tangent hint is parallel to the surface normal")]
    ParallelHint,
    #[error("non-finite input")]
    NonFinite,
}

/// Rigid transform mapping coordinates in a child frame into its parent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTransform {
    pub rotation: Rotation3<f64>,
    pub translation: Vector3<f64>,
}

impl FrameTransform {
    pub fn identity() -> Self {
        Self {
            rotation: Rotation3::identity(),
            translation: Vector3::zeros(),
        }
    }

    pub fn apply(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * p + self.translation
    }

    pub fn apply_inverse(&self, p: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.inverse() * (p - self.translation)
    }

    pub fn inverse(&self) -> Self {
        let rotation = self.rotation.inverse();
        Self {
            rotation,
            translation: -(rotation * self.translation),
        }
    }
}

/// Workpiece-anchored frame. `rotation` maps target coordinates to world.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TargetFrame {
    pub origin_w: Point3<f64>,
    pub rotation: Rotation3<f64>,
}

impl TargetFrame {
    pub fn identity() -> Self {
        Self {
            origin_w: Point3::origin(),
            rotation: Rotation3::identity(),
        }
    }

    pub fn z_axis_w(&self) -> Vector3<f64> {
        self.rotation.matrix().column(2).into_owned()
    }

    /// Target → world transform.
    pub fn to_world(&self) -> FrameTransform {
        FrameTransform {
            rotation: self.rotation,
            translation: self.origin_w.coords,
        }
    }

    /// Rotates a world-frame vector into target axes (no translation).
    pub fn vector_to_target(&self, v_w: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.inverse() * v_w
    }

    pub fn vector_to_world(&self, v_t: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v_t
    }
}

/// Builds a right-handed target frame whose Z axis is the surface normal and
/// whose X axis is the tangent hint projected onto the surface.
pub fn make_target_frame(
    origin: Vector3<f64>,
    surface_normal: Vector3<f64>,
    tangent_hint: Vector3<f64>,
) -> Result<TargetFrame, FrameError> {
    if !(origin.iter().chain(surface_normal.iter()).chain(tangent_hint.iter())).all(|v| v.is_finite()) {
        return Err(FrameError::NonFinite);
    }
    let n_norm = surface_normal.norm();
    if n_norm == 0.0 {
        return Err(FrameError::ZeroNormal);
    }
    let h_norm = tangent_hint.norm();
    if h_norm == 0.0 {
        return Err(FrameError::ZeroHint);
    }
    let z = surface_normal / n_norm;
    let h = tangent_hint / h_norm;
    if z.cross(&h).norm() < PARALLEL_TOL {
        return Err(FrameError::ParallelHint);
    }
    // Gram-Schmidt, then one re-orthogonalisation pass.
    let mut x = h - z * z.dot(&h);
    x.normalize_mut();
    x -= z * z.dot(&x);
    x.normalize_mut();
    let y = z.cross(&x);
    let m = Matrix3::from_columns(&[x, y, z]);
    Ok(TargetFrame {
        origin_w: Point3::from(origin),
        rotation: Rotation3::from_matrix_unchecked(m),
    })
}

/// `λ = R_tw (p_w - origin_w)`.
pub fn world_to_target(p_w: &Vector3<f64>, frame: &TargetFrame) -> Vector3<f64> {
    frame.rotation.inverse() * (p_w - frame.origin_w.coords)
}

pub fn target_to_world(lambda: &Vector3<f64>, frame: &TargetFrame) -> Vector3<f64> {
    frame.rotation * lambda + frame.origin_w.coords
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthonormal_residual(r: &Rotation3<f64>) -> f64 {
        let m = r.matrix();
        (m.transpose() * m - Matrix3::identity()).abs().max()
    }

    #[test]
    fn axis_aligned_frame_is_identity() {
        let f = make_target_frame(Vector3::zeros(), Vector3::z(), Vector3::x()).unwrap();
        assert_eq!(*f.rotation.matrix(), Matrix3::identity());
    }

    #[test]
    fn parallel_hint_is_rejected() {
        let err = make_target_frame(Vector3::zeros(), Vector3::z(), Vector3::z()).unwrap_err();
        assert_eq!(err, FrameError::ParallelHint);
        let err = make_target_frame(Vector3::zeros(), Vector3::z(), -Vector3::z() * 3.0).unwrap_err();
        assert_eq!(err, FrameError::ParallelHint);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(
            make_target_frame(Vector3::zeros(), Vector3::zeros(), Vector3::x()),
            Err(FrameError::ZeroNormal)
        );
        assert_eq!(
            make_target_frame(Vector3::zeros(), Vector3::z(), Vector3::zeros()),
            Err(FrameError::ZeroHint)
        );
        assert_eq!(
            make_target_frame(Vector3::zeros(), Vector3::new(f64::NAN, 0.0, 1.0), Vector3::x()),
            Err(FrameError::NonFinite)
        );
    }

    #[test]
    fn x_normal_frame_by_hand() {
        // Gram-Schmidt by hand: X = (0,1,0), Y = Z × X = (1,0,0) × (0,1,0) = (0,0,1).
        let f = make_target_frame(Vector3::zeros(), Vector3::x(), Vector3::y()).unwrap();
        let expected = Matrix3::from_columns(&[Vector3::y(), Vector3::z(), Vector3::x()]);
        assert_eq!(*f.rotation.matrix(), expected);
        assert!(orthonormal_residual(&f.rotation) < 1e-12);
        assert!((f.rotation.matrix().determinant() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn world_to_target_examples() {
        let id = make_target_frame(Vector3::zeros(), Vector3::z(), Vector3::x()).unwrap();
        assert_eq!(world_to_target(&Vector3::new(1.0, 2.0, 3.0), &id), Vector3::new(1.0, 2.0, 3.0));

        let f = make_target_frame(Vector3::new(1.0, 0.0, 0.0), Vector3::x(), Vector3::y()).unwrap();
        assert_eq!(world_to_target(&Vector3::new(1.0, 0.0, 0.0), &f), Vector3::zeros());
        let l = world_to_target(&Vector3::new(2.0, 0.0, 0.0), &f);
        assert!((l.z - 1.0).abs() < 1e-15);
        assert!(l.x.abs() < 1e-15 && l.y.abs() < 1e-15);
    }

    #[test]
    fn non_unit_normal_is_normalised() {
        let f = make_target_frame(Vector3::zeros(), Vector3::new(0.0, -4.0, 0.0), Vector3::new(0.3, 0.1, 2.0)).unwrap();
        assert!((f.z_axis_w() - Vector3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
        assert!(orthonormal_residual(&f.rotation) < 1e-12);
    }

    #[test]
    fn transform_inverse() {
        let f = make_target_frame(Vector3::new(1.0, -2.0, 0.5), Vector3::new(1.0, 1.0, 1.0), Vector3::x()).unwrap();
        let t = f.to_world();
        let p = Vector3::new(0.3, 0.7, -1.1);
        let back = t.inverse().apply(&t.apply(&p));
        assert!((back - p).norm() < 1e-12);
        assert!((t.apply_inverse(&t.apply(&p)) - p).norm() < 1e-12);
    }
}
