//! Ready-made example frames used by the documentation, the shipped fixture
//! files and the test suite.

use nalgebra::Vector3;

use crate::geometry::{Frame, JointKind, MaterialParams};
use crate::kinematics::rodrigues;
use crate::scalar::{lit, Real};

/// Planar three-beam star: beams run from clamped outer ends (vertices 1..3)
/// to a free rigid joint at the origin (vertex 0). All beams lie in the
/// `E1-E2` plane with `k = E3`.
///
/// `theta1` is the in-plane angle from beam 2 to beam 1 and `theta2` the angle
/// from beam 1 to beam 3, both counterclockwise.
pub fn planar_star<T: Real>(
    lengths: [T; 3],
    theta1: T,
    theta2: T,
    materials: [MaterialParams<T>; 3],
) -> Frame<T> {
    let phi1 = T::pi();
    let phis = [phi1, phi1 - theta1, phi1 + theta2];
    let mut b = Frame::builder().vertex(0, Vector3::zeros(), JointKind::FreeRigid);
    for s in 0..3 {
        let axis = Vector3::new(phis[s].cos(), phis[s].sin(), T::zero());
        b = b
            .vertex(s as u32 + 1, -axis * lengths[s], JointKind::Clamped)
            .edge(s as u32 + 1, s as u32 + 1, 0, materials[s]);
    }
    b.build().expect("planar star construction")
}

/// The planar star with unit lengths and unit materials, `theta1 = pi`,
/// `theta2 = pi/2` (a T-shaped frame).
pub fn planar_star_default<T: Real>() -> Frame<T> {
    planar_star(
        [T::one(); 3],
        T::pi(),
        T::frac_pi_2(),
        [MaterialParams::unit(); 3],
    )
}

/// Three-dimensional "tower" star: three identical legs rising at elevation
/// `alpha` from clamped feet (vertices 1..3) to a free rigid joint at the
/// origin (vertex 4), plus a vertical beam (edge 0) from a free top end
/// (vertex 0) down to the joint. The structure is invariant under rotation by
/// `2*pi/3` about `E3` and under the reflection fixing leg 1.
///
/// `lengths = [antenna, legs]`. For exact symmetry the legs share
/// `leg_materials`; the vertical beam needs `a = b` in `top_materials`.
pub fn antenna_tower_with<T: Real>(
    alpha: T,
    lengths: [T; 2],
    leg_materials: MaterialParams<T>,
    top_materials: MaterialParams<T>,
) -> Frame<T> {
    let [l0, l] = lengths;
    let rot = rodrigues(
        &Vector3::new(T::zero(), T::zero(), T::one()),
        lit::<T>(2.0 * std::f64::consts::PI / 3.0),
    )
    .expect("rotation about E3");
    let i1 = Vector3::new(alpha.cos(), T::zero(), alpha.sin());
    let feet = [i1, rot * i1, rot * (rot * i1)];

    let mut b = Frame::<T>::builder()
        .vertex(
            0,
            Vector3::new(T::zero(), T::zero(), l0),
            JointKind::FreeRigid,
        )
        .vertex(4, Vector3::zeros(), JointKind::FreeRigid)
        .edge(0, 0, 4, top_materials);
    for (s, axis) in feet.iter().enumerate() {
        b = b.vertex(s as u32 + 1, -axis * l, JointKind::Clamped).edge(
            s as u32 + 1,
            s as u32 + 1,
            4,
            leg_materials,
        );
    }
    b.build().expect("antenna tower construction")
}

/// Antenna tower with a single material parameter set for all four beams.
pub fn antenna_tower<T: Real>(alpha: T, lengths: [T; 4], materials: MaterialParams<T>) -> Frame<T> {
    debug_assert!(lengths[1] == lengths[2] && lengths[2] == lengths[3]);
    antenna_tower_with(alpha, [lengths[0], lengths[1]], materials, materials)
}

/// Generators of the tower's symmetry group: the rotation `R` by `2*pi/3`
/// about `E3` (cycling the legs) and the reflection `F` through the plane of
/// leg 1 (swapping legs 2 and 3). Edge indices follow id order: 0 = vertical
/// beam, 1..3 = legs.
pub fn tower_symmetry_generators<T: Real>() -> Vec<(String, nalgebra::Matrix3<T>, Vec<usize>)> {
    let r = rodrigues(
        &Vector3::new(T::zero(), T::zero(), T::one()),
        lit::<T>(2.0 * std::f64::consts::PI / 3.0),
    )
    .expect("rotation about E3");
    let f = nalgebra::Matrix3::from_diagonal(&Vector3::new(T::one(), -T::one(), T::one()));
    vec![
        ("R".to_string(), r, vec![0, 2, 3, 1]),
        ("F".to_string(), f, vec![0, 1, 3, 2]),
    ]
}
