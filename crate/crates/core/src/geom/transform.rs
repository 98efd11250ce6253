use nalgebra::{Matrix4, Quaternion, Unit, UnitQuaternion};

use crate::geom::{canonicalize_line, AxisLine, Vec3};

/// Rigid motion stored as a unit quaternion plus translation.
///
/// Applies as `x ↦ R·x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform {
    rotation: UnitQuaternion<f64>,
    translation: Vec3,
}

/// Screw form of a rigid motion: rotation by `angle` about `axis`, followed by
/// a slide of `pitch_translation` along it. When the rotation is below the
/// angular tolerance `axis` is `None` and `pitch_translation` is the whole
/// translation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrewDecomposition {
    pub angle: f64,
    pub axis: Option<AxisLine>,
    pub pitch_translation: Vec3,
}

impl Default for RigidTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl RigidTransform {
    pub fn identity() -> Self {
        Self { rotation: UnitQuaternion::identity(), translation: Vec3::zeros() }
    }

    pub fn new(rotation: UnitQuaternion<f64>, translation: Vec3) -> Self {
        Self { rotation, translation }
    }

    /// Builds from raw `(w, x, y, z)` quaternion components, normalizing them.
    pub fn from_wxyz(q: [f64; 4], translation: Vec3) -> Self {
        let raw = Quaternion::new(q[0], q[1], q[2], q[3]);
        Self { rotation: UnitQuaternion::from_quaternion(raw), translation }
    }

    /// Like [`from_wxyz`](Self::from_wxyz) but keeps the components as given.
    /// The caller guarantees the quaternion is already unit length.
    pub fn from_unit_wxyz_unchecked(q: [f64; 4], translation: Vec3) -> Self {
        let raw = Quaternion::new(q[0], q[1], q[2], q[3]);
        Self { rotation: UnitQuaternion::new_unchecked(raw), translation }
    }

    pub fn translation_only(t: Vec3) -> Self {
        Self { rotation: UnitQuaternion::identity(), translation: t }
    }

    /// Rotation by `angle` radians about an arbitrary line.
    pub fn rotation_about(axis: &AxisLine, angle: f64) -> Self {
        let rotation = UnitQuaternion::from_axis_angle(&Unit::new_unchecked(axis.direction()), angle);
        let c = axis.point();
        Self { rotation, translation: c - rotation * c }
    }

    pub fn rotation(&self) -> &UnitQuaternion<f64> {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    pub fn wxyz(&self) -> [f64; 4] {
        let q = self.rotation.quaternion();
        [q.w, q.i, q.j, q.k]
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &RigidTransform) -> RigidTransform {
        let mut rotation = self.rotation * other.rotation;
        rotation.renormalize();
        RigidTransform { rotation, translation: self.translation + self.rotation * other.translation }
    }

    pub fn inverse(&self) -> RigidTransform {
        let inv = self.rotation.inverse();
        RigidTransform { rotation: inv, translation: -(inv * self.translation) }
    }

    pub fn apply_point(&self, p: &Vec3) -> Vec3 {
        self.rotation * p + self.translation
    }

    pub fn apply_vector(&self, v: &Vec3) -> Vec3 {
        self.rotation * v
    }

    pub fn to_matrix(&self) -> Matrix4<f64> {
        let mut m = self.rotation.to_homogeneous();
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.translation);
        m
    }

    /// Rotation angle in `[0, π]`.
    pub fn angle(&self) -> f64 {
        let q = self.rotation.quaternion();
        2.0 * q.imag().norm().atan2(q.w.abs())
    }

    pub fn approx_eq(&self, other: &RigidTransform, eps: f64) -> bool {
        let (a, b) = (self.to_matrix(), other.to_matrix());
        (a - b).abs().max() <= eps
    }

    pub fn screw_decompose(&self, angle_tol: f64) -> ScrewDecomposition {
        let q = self.rotation.quaternion();
        let (w, mut v) = (q.w, q.imag());
        if w < 0.0 {
            v = -v;
        }
        let angle = 2.0 * v.norm().atan2(w.abs());
        if angle <= angle_tol {
            return ScrewDecomposition { angle, axis: None, pitch_translation: self.translation };
        }
        let u = v / v.norm();
        let t = self.translation;
        let t_par = u * t.dot(&u);
        let t_perp = t - t_par;
        // Closed-form solution of (I − R)·p = t⊥ with p ⟂ u.
        let cot_half = 1.0 / (angle / 2.0).tan();
        let p = (t_perp + u.cross(&t_perp) * cot_half) * 0.5;
        let axis = canonicalize_line(p, u).expect("unit rotation axis");
        ScrewDecomposition { angle, axis: Some(axis), pitch_translation: t_par }
    }
}

pub fn compose_transforms(a: &RigidTransform, b: &RigidTransform) -> RigidTransform {
    a.compose(b)
}

pub fn screw_decompose(t: &RigidTransform, angle_tol: f64) -> ScrewDecomposition {
    t.screw_decompose(angle_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{Matrix3, Vector4};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    fn rot_z(angle: f64) -> RigidTransform {
        RigidTransform::new(UnitQuaternion::from_axis_angle(&Vec3::z_axis(), angle), Vec3::zeros())
    }

    fn random_transform(rng: &mut ChaCha8Rng) -> RigidTransform {
        let axis = Unit::new_normalize(Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0) + 1e-3,
        ));
        let angle = rng.random_range(-3.0..3.0);
        let t = Vec3::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        RigidTransform::new(UnitQuaternion::from_axis_angle(&axis, angle), t)
    }

    #[test]
    fn identity_is_neutral_and_inverse_cancels() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let t = random_transform(&mut rng);
            assert!(RigidTransform::identity().compose(&t).approx_eq(&t, 1e-12));
            assert!(t.compose(&t.inverse()).approx_eq(&RigidTransform::identity(), 1e-9));
            assert!((t.rotation().norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn composition_matches_matrix_product_and_is_associative() {
        let a = rot_z(FRAC_PI_2);
        let b = RigidTransform::translation_only(Vec3::new(1.0, 0.0, 0.0));
        // 4×4 oracle
        let m = a.to_matrix() * b.to_matrix();
        let origin = m * Vector4::new(0.0, 0.0, 0.0, 1.0);
        let p = a.compose(&b).apply_point(&Vec3::zeros());
        assert!((p - Vec3::new(0.0, 1.0, 0.0)).norm() < 1e-12);
        assert!((origin.xyz() - p).norm() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (x, y, z) = (random_transform(&mut rng), random_transform(&mut rng), random_transform(&mut rng));
            let lhs = x.compose(&y).compose(&z);
            let rhs = x.compose(&y.compose(&z));
            assert!(lhs.approx_eq(&rhs, 1e-9));
            assert!((x.compose(&y).to_matrix() - x.to_matrix() * y.to_matrix()).abs().max() < 1e-9);
        }
    }

    #[test]
    fn identity_decomposes_to_nothing() {
        let s = RigidTransform::identity().screw_decompose(1e-3);
        assert_eq!(s.angle, 0.0);
        assert!(s.axis.is_none());
        assert_eq!(s.pitch_translation, Vec3::zeros());
    }

    #[test]
    fn pure_rotation_about_z() {
        let s = rot_z(FRAC_PI_6).screw_decompose(1e-3);
        assert!((s.angle - FRAC_PI_6).abs() < 1e-12);
        let axis = s.axis.unwrap();
        assert!(axis.point().norm() < 1e-12);
        assert!((axis.direction() - Vec3::z()).norm() < 1e-12);
        assert!(s.pitch_translation.norm() < 1e-12);
    }

    /// Solves (I − R)p = t⊥ by least squares on the 4×3 system augmented with
    /// p·u = 0, independent of the closed form in `screw_decompose`.
    fn fixed_point_oracle(r: &Matrix3<f64>, u: &Vec3, t_perp: &Vec3) -> Vec3 {
        let a = Matrix3::identity() - r;
        let mut ata = a.transpose() * a + u * u.transpose();
        let mut rhs = a.transpose() * t_perp;
        // Gaussian elimination with partial pivoting.
        for col in 0..3 {
            let pivot = (col..3).max_by(|&i, &j| ata[(i, col)].abs().total_cmp(&ata[(j, col)].abs())).unwrap();
            ata.swap_rows(col, pivot);
            rhs.swap_rows(col, pivot);
            for row in col + 1..3 {
                let f = ata[(row, col)] / ata[(col, col)];
                for k in col..3 {
                    ata[(row, k)] -= f * ata[(col, k)];
                }
                rhs[row] -= f * rhs[col];
            }
        }
        let mut x = Vec3::zeros();
        for row in (0..3).rev() {
            let s: f64 = (row + 1..3).map(|k| ata[(row, k)] * x[k]).sum();
            x[row] = (rhs[row] - s) / ata[(row, row)];
        }
        x
    }

    #[test]
    fn screw_of_rotation_then_translation() {
        let t = rot_z(FRAC_PI_2).compose(&RigidTransform::translation_only(Vec3::new(1.0, 1.0, 2.0)));
        let s = t.screw_decompose(1e-3);
        assert!((s.angle - FRAC_PI_2).abs() < 1e-12);
        assert!((s.pitch_translation - Vec3::new(0.0, 0.0, 2.0)).norm() < 1e-12);
        let axis = s.axis.unwrap();
        assert!((axis.direction() - Vec3::z()).norm() < 1e-12);

        let r = t.rotation().to_rotation_matrix().into_inner();
        let tr = t.translation();
        let t_perp = tr - Vec3::z() * tr.z;
        let p = fixed_point_oracle(&r, &Vec3::z(), &t_perp);
        assert!((p - axis.point()).norm() < 1e-9, "oracle {p:?} vs {:?}", axis.point());
        assert!((p - Vec3::new(-1.0, 0.0, 0.0)).norm() < 1e-9);

        let rebuilt = RigidTransform::translation_only(s.pitch_translation)
            .compose(&RigidTransform::rotation_about(&axis, s.angle));
        assert!(rebuilt.approx_eq(&t, 1e-9));
    }

    #[test]
    fn screw_recomposition_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let t = random_transform(&mut rng);
            let s = t.screw_decompose(1e-3);
            let Some(axis) = s.axis else { continue };
            assert!((0.0..=std::f64::consts::PI).contains(&s.angle));
            // either orientation of the canonical axis may carry the rotation
            let fwd = RigidTransform::translation_only(s.pitch_translation)
                .compose(&RigidTransform::rotation_about(&axis, s.angle));
            let back = RigidTransform::translation_only(s.pitch_translation)
                .compose(&RigidTransform::rotation_about(&axis, -s.angle));
            assert!(fwd.approx_eq(&t, 1e-6) || back.approx_eq(&t, 1e-6));
        }
    }
}
