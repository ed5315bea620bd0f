// Back-project a depth map to a point cloud, save it as PLY, and project it
// into a second camera.
//
// `cargo run --example point_cloud [out.ply]`

use std::env;
use std::error::Error;

use nalgebra::{Rotation3, Vector3};
use pseudo_depth::geometry::{
    backproject, export_ply, import_ply, parse_calibration, project_points, CameraIntrinsics, Rasterization,
    RigidTransform,
};
use pseudo_depth::DepthImage;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let calib = parse_calibration("721.5377 0 609.5593 0 721.5377 172.854 0 0 1")?;
    let k = calib.intrinsics;
    let (w, h) = (1242, 375);
    let depth = DepthImage::from_fn(w, h, |x, y| (y > 180 && x % 8 == 0 && y % 8 == 0).then(|| 1.65 * 721.5377 / (y as f64 - 172.854)))?;

    let cloud = backproject(&depth, &k);
    println!("{} points from {} valid pixels", cloud.len(), depth.valid_count());

    let path = env::args()
        .nth(1)
        .map(Into::into)
        .unwrap_or_else(|| env::temp_dir().join("pseudo-depth-example").join("road.ply"));
    export_ply(&cloud, &path)?;
    let back = import_ply(&path)?;
    println!("wrote {} and read back {} points", path.display(), back.len());

    let same = project_points(&back, &k, &RigidTransform::identity(), (w, h), Rasterization::ZBuffer)?;
    println!("re-projection matches: {}", same == depth);

    // A camera 0.5 m to the left, yawed by 2 degrees.
    let moved = RigidTransform::new(*Rotation3::from_euler_angles(0.0, 2f64.to_radians(), 0.0).matrix(), Vector3::new(0.5, 0.0, 0.0))?;
    let other = project_points(&cloud, &k, &moved, (w, h), Rasterization::ZBuffer)?;
    println!("second view sees {} pixels", other.valid_count());

    // Two points on one ray: the z-buffer keeps the near one.
    let ray = |z| k.backproject(600.0, 200.0, z);
    let pair = pseudo_depth::geometry::PointCloud::new(vec![ray(5.0), ray(50.0)])?;
    let small = CameraIntrinsics::new(k.fx, k.fy, k.cx, k.cy)?;
    for mode in [Rasterization::ZBuffer, Rasterization::LastWrite] {
        let img = project_points(&pair, &small, &RigidTransform::identity(), (w, h), mode)?;
        println!("{mode:?}: {:?} m", img.get(600, 200));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
