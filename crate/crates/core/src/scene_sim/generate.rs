use super::{coarse_box, ObjectClass, ScenarioConfig, SceneObject, Size3};
use crate::error::{Error, Result};
use crate::geometry::Vec3;
use crate::rng::Xorshift64Star;

const MAX_ATTEMPTS: usize = 10_000;
/// Clearance between object footprints, meters.
const FOOTPRINT_CLEARANCE_M: f64 = 0.5;
const GROUND_THICKNESS_M: f64 = 0.02;

fn sample(rng: &mut Xorshift64Star, (lo, hi): (f64, f64)) -> f64 {
    rng.uniform(lo, hi)
}

/// Procedurally place vehicles and distractors on a ground slab for one frame.
///
/// The scene depends only on `(config, frame_idx)`. Objects are ordered
/// ground first, then vehicles, then distractors; ids count up from 1 with
/// the ground taking the last id.
pub fn generate_scene(config: &ScenarioConfig, frame_idx: u32) -> Result<Vec<SceneObject>> {
    config.validate()?;
    if frame_idx >= config.frames {
        return Err(Error::Config(format!(
            "frame index {frame_idx} out of range for {} frames",
            config.frames
        )));
    }
    let camera = &config.camera;
    let mut rng = Xorshift64Star::for_frame(config.seed, frame_idx as u64);
    let n_vehicles = rng.range_inclusive(config.vehicle_count.0, config.vehicle_count.1);
    let n_distractors = rng.range_inclusive(config.distractor_count.0, config.distractor_count.1);

    let mut placed: Vec<SceneObject> = Vec::new();
    let mut vehicle_boxes = Vec::new();
    let mut next_id = 1u32;

    for class in std::iter::repeat_n(ObjectClass::Vehicle, n_vehicles as usize)
        .chain(std::iter::repeat_n(ObjectClass::Distractor, n_distractors as usize))
    {
        let mut accepted = None;
        for _ in 0..MAX_ATTEMPTS {
            let size = match class {
                ObjectClass::Vehicle => Size3 {
                    length: sample(&mut rng, config.vehicle_length_m),
                    width: sample(&mut rng, config.vehicle_width_m),
                    height: sample(&mut rng, config.vehicle_height_m),
                },
                _ => {
                    let side = sample(&mut rng, config.distractor_footprint_m);
                    Size3 {
                        length: side,
                        width: side,
                        height: sample(&mut rng, config.distractor_height_m),
                    }
                }
            };
            let x = sample(&mut rng, config.lateral_m);
            let z = sample(&mut rng, config.longitudinal_m);
            let yaw = sample(&mut rng, config.yaw_rad);
            let center = Vec3::new(x, config.camera_height_m - size.height / 2.0, z);
            let obj = SceneObject::new(next_id, class, center, size, yaw)?;

            let r = obj.footprint_radius();
            let collides = placed.iter().any(|o| {
                (o.center.x - x).hypot(o.center.z - z) < o.footprint_radius() + r + FOOTPRINT_CLEARANCE_M
            });
            if collides {
                continue;
            }
            let Ok(hull) = coarse_box(camera, &obj) else {
                continue;
            };
            if class == ObjectClass::Vehicle && config.min_depth_gap_m > 0.0 {
                let inflated = hull.inflate(config.box_inflation);
                let too_close = vehicle_boxes.iter().any(|(b, oz): &(crate::geometry::Box2<f64>, f64)| {
                    b.intersect(&inflated).is_some() && (oz - z).abs() < config.min_depth_gap_m
                });
                if too_close {
                    continue;
                }
                vehicle_boxes.push((inflated, z));
            }
            accepted = Some(obj);
            break;
        }
        let obj = accepted.ok_or_else(|| {
            Error::Config(format!(
                "frame {frame_idx}: could not place {} {} after {MAX_ATTEMPTS} attempts; enlarge the placement region",
                class.name(),
                next_id
            ))
        })?;
        placed.push(obj);
        next_id += 1;
    }

    let ground = ground_slab(next_id, camera.depth.near_m(), config.camera_height_m, config.ground_extent_m)?;
    let mut scene = Vec::with_capacity(placed.len() + 1);
    scene.push(ground);
    scene.extend(placed);
    Ok(scene)
}

/// Thin ground cuboid whose top face is the plane `y = camera_height_m`,
/// spanning from just past the near plane to `extent_m` ahead.
pub fn ground_slab(object_id: u32, near_m: f64, camera_height_m: f64, extent_m: f64) -> Result<SceneObject> {
    let start = (2.0 * near_m).max(1.0).min(extent_m / 2.0);
    SceneObject::new(
        object_id,
        ObjectClass::Ground,
        Vec3::new(0.0, camera_height_m + GROUND_THICKNESS_M / 2.0, (start + extent_m) / 2.0),
        Size3 {
            length: 2.0 * extent_m,
            width: extent_m - start,
            height: GROUND_THICKNESS_M,
        },
        0.0,
    )
}
