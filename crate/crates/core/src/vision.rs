//! Camera geometry: frame conventions, pinhole projection, image error and
//! the interaction matrix.
//!
//! Frames: the tanker frame has x forward, y right and z down. The camera
//! (and the reference frame, which shares its axes) looks along the tanker
//! x axis, so camera x is right, camera y is down and camera z is the
//! optical axis. Image coordinates are normalized (unit focal length).

use nalgebra::{Matrix3, SMatrix, Vector3, Vector6};

use crate::error::VisionError;
use crate::num::Real;

/// Tanker-to-camera rotation. Also the tanker-to-reference rotation.
pub fn frame_rotation<T: Real>() -> Matrix3<T> {
    let (o, l) = (T::zero(), T::one());
    Matrix3::new(o, l, o, o, o, l, l, o, o)
}

/// Where the camera sits on the receiver.
///
/// `mount_offset` is what the controllers believe; the physical camera is at
/// `mount_offset + mount_offset_error`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraInstallation<T: Real> {
    pub mount_offset: Vector3<T>,
    pub mount_offset_error: Vector3<T>,
}

impl<T: Real> CameraInstallation<T> {
    pub fn new(mount_offset: Vector3<T>) -> Self {
        Self {
            mount_offset,
            mount_offset_error: Vector3::zeros(),
        }
    }

    pub fn with_offset_error(mut self, error: Vector3<T>) -> Self {
        self.mount_offset_error = error;
        self
    }

    pub fn frame_rotation(&self) -> Matrix3<T> {
        frame_rotation()
    }

    pub fn true_offset(&self) -> Vector3<T> {
        self.mount_offset + self.mount_offset_error
    }

    /// The same installation as the controllers see it (no offset error).
    pub fn believed(&self) -> Self {
        Self::new(self.mount_offset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImagePoint<T: Real> {
    pub x: T,
    pub y: T,
}

impl<T: Real> ImagePoint<T> {
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageError<T: Real> {
    pub e_x: T,
    pub e_y: T,
}

impl<T: Real> ImageError<T> {
    pub fn new(e_x: T, e_y: T) -> Self {
        Self { e_x, e_y }
    }

    pub fn norm(&self) -> T {
        (self.e_x * self.e_x + self.e_y * self.e_y).sqrt()
    }
}

/// Drogue center expressed in the camera frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeGeometry<T: Real> {
    pub position: Vector3<T>,
}

impl<T: Real> RelativeGeometry<T> {
    pub fn new(position: Vector3<T>) -> Self {
        Self { position }
    }

    /// Docking depth: distance to the drogue plane along the optical axis.
    pub fn depth(&self) -> T {
        self.position.z
    }

    /// Distance from the optical axis, i.e. the miss distance if the depth
    /// were zero now.
    pub fn lateral_distance(&self) -> T {
        (self.position.x * self.position.x + self.position.y * self.position.y).sqrt()
    }
}

/// The 2x6 image Jacobian mapping camera spatial velocity to image-point velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionMatrix<T: Real> {
    pub entries: SMatrix<T, 2, 6>,
}

/// Camera-frame position of the drogue seen from a receiver at
/// `receiver_pos` (both positions in the tanker frame).
///
/// The receiver axes are taken parallel to the tanker axes, so the camera
/// sits at `receiver_pos + true_offset`.
pub fn relative_geometry<T: Real>(
    receiver_pos: &Vector3<T>,
    drogue_pos: &Vector3<T>,
    install: &CameraInstallation<T>,
) -> RelativeGeometry<T> {
    let camera_pos = receiver_pos + install.true_offset();
    RelativeGeometry::new(install.frame_rotation() * (drogue_pos - camera_pos))
}

pub fn project<T: Real>(geometry: &RelativeGeometry<T>) -> Result<ImagePoint<T>, VisionError> {
    let z = geometry.depth();
    if !(z > T::zero()) {
        return Err(VisionError::BehindCamera {
            depth: z.to_f64_lossy(),
        });
    }
    Ok(ImagePoint::new(
        geometry.position.x / z,
        geometry.position.y / z,
    ))
}

pub fn image_error<T: Real>(point: &ImagePoint<T>, convergence: &ImagePoint<T>) -> ImageError<T> {
    ImageError::new(point.x - convergence.x, point.y - convergence.y)
}

pub fn interaction_matrix<T: Real>(
    point: &ImagePoint<T>,
    depth: T,
) -> Result<InteractionMatrix<T>, VisionError> {
    if !(depth > T::zero()) {
        return Err(VisionError::NonPositiveDepth {
            depth: depth.to_f64_lossy(),
        });
    }
    let (x, y, z) = (point.x, point.y, depth);
    let (o, l) = (T::zero(), T::one());
    let inv_z = l / z;
    #[rustfmt::skip]
    let entries = SMatrix::<T, 2, 6>::from_row_slice(&[
        -inv_z, o, x * inv_z, x * y, -(l + x * x), y,
        o, -inv_z, y * inv_z, l + y * y, -x * y, -x,
    ]);
    Ok(InteractionMatrix { entries })
}

/// Image-error rate `L * [v; w]` for a camera velocity screw.
pub fn image_error_rate<T: Real>(
    l: &InteractionMatrix<T>,
    relative_velocity: &Vector6<T>,
) -> (T, T) {
    let rate = l.entries * relative_velocity;
    (rate[0], rate[1])
}
