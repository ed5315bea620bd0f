//! Camera geometry, point clouds and LiDAR scan handling.

pub mod calib;
pub mod camera;
pub mod cloud;
pub mod ply;
pub mod range_view;
pub mod velodyne;

pub use calib::{parse_calibration, read_calibration, Calibration};
pub use camera::{CameraIntrinsics, RigidTransform};
pub use cloud::{backproject, project_points, PointCloud, Rasterization};
pub use ply::{export_ply, import_ply, read_ply, write_ply};
pub use range_view::{subsample_scan, RangeViewConfig};
pub use velodyne::{encode_velodyne, parse_velodyne, read_velodyne, write_velodyne};
