mod oracles;

use matrixgt::annotator::{annotate_frame, annotate_frame_detailed, connected_components, vehicle_mask, RefinementParams};
use matrixgt::geometry::Box2;
use matrixgt::raster_codec::Samples;
use matrixgt::scene_sim::{ground_slab, render_frame, FrameBundle, RenderOptions, ScenarioConfig};
use matrixgt::dataset::simulate_frame;
use oracles::{box_iou, occlusion_scene, oracle_hull, vehicle, vga_camera, CAMERA_HEIGHT_M};

fn hull_of(frame: &FrameBundle, id: u32) -> Box2<f64> {
    oracle_hull(frame.instance_oracle.as_u16().unwrap(), frame.depth.width(), id as u16).unwrap()
}

#[test]
fn occluding_pair_is_split() {
    let (cam, scene) = occlusion_scene();
    let frame = render_frame(&cam, &scene, 0, &RenderOptions::default()).unwrap();
    let mask = vehicle_mask(&frame.stencil).unwrap();
    assert_eq!(connected_components(&mask).len(), 1);

    let anns = annotate_frame(frame.view(), &cam.depth, &RefinementParams::default()).unwrap();
    assert_eq!(anns.len(), 2);
    for a in &anns {
        let iou = box_iou(&a.tight_box.to_box(), &hull_of(&frame, a.source_id));
        assert!(iou >= 0.9, "object {}: IoU {iou}", a.source_id);
    }
    let near = anns.iter().find(|a| a.source_id == 1).unwrap();
    let far = anns.iter().find(|a| a.source_id == 2).unwrap();
    assert!(near.range_m < far.range_m);
    assert!(far.visible_px < far.tight_box.width() as usize * far.tight_box.height() as usize);
}

#[test]
fn isolated_vehicle_box_is_the_pixel_hull() {
    let cam = vga_camera();
    let scene = vec![
        ground_slab(2, cam.depth.near_m(), CAMERA_HEIGHT_M, 150.0).unwrap(),
        vehicle(1, 0.5, 14.0, (4.5, 1.8, 1.5), 0.6),
    ];
    let frame = render_frame(&cam, &scene, 0, &RenderOptions::default()).unwrap();
    let anns = annotate_frame(frame.view(), &cam.depth, &RefinementParams::default()).unwrap();
    assert_eq!(anns.len(), 1);
    assert_eq!(anns[0].tight_box.to_box(), hull_of(&frame, 1));
}

#[test]
fn long_vehicle_up_close_is_not_clipped() {
    let cam = vga_camera();
    let scene = vec![
        ground_slab(2, cam.depth.near_m(), CAMERA_HEIGHT_M, 150.0).unwrap(),
        vehicle(1, 2.0, 9.0, (5.0, 1.9, 1.6), 0.9),
    ];
    let frame = render_frame(&cam, &scene, 0, &RenderOptions::default()).unwrap();
    let anns = annotate_frame(frame.view(), &cam.depth, &RefinementParams::default()).unwrap();
    assert_eq!(anns.len(), 1);
    assert_eq!(anns[0].tight_box.to_box(), hull_of(&frame, 1));

    let band_only = RefinementParams {
        keep_extent: false,
        ..RefinementParams::default()
    };
    let clipped = annotate_frame(frame.view(), &cam.depth, &band_only).unwrap();
    assert!(clipped[0].visible_px < anns[0].visible_px);
}

#[test]
fn hidden_vehicle_gets_no_box() {
    let cam = vga_camera();
    let scene = vec![
        ground_slab(3, cam.depth.near_m(), CAMERA_HEIGHT_M, 150.0).unwrap(),
        vehicle(1, 0.0, 10.0, (4.5, 2.0, 1.9), 0.0),
        vehicle(2, 0.0, 30.0, (3.8, 1.6, 1.4), 0.0),
    ];
    let frame = render_frame(&cam, &scene, 0, &RenderOptions::default()).unwrap();
    assert!(!frame.instance_oracle.as_u16().unwrap().contains(&2));
    let f = annotate_frame_detailed(frame.view(), &cam.depth, &RefinementParams::default()).unwrap();
    assert_eq!(f.annotations.len(), 1);
    assert_eq!(f.annotations[0].source_id, 1);
    assert_eq!(f.rejected.len(), 1);
}

#[test]
fn five_separate_vehicles() {
    let cam = vga_camera();
    let mut scene = vec![ground_slab(6, cam.depth.near_m(), CAMERA_HEIGHT_M, 150.0).unwrap()];
    for (i, (x, z, yaw)) in [(-10.0, 25.0, 1.3), (-5.0, 30.0, 1.7), (0.0, 20.0, -1.5), (5.0, 28.0, 1.9), (10.0, 24.0, -1.4)]
        .into_iter()
        .enumerate()
    {
        scene.push(vehicle(i as u32 + 1, x, z, (4.3, 1.8, 1.5), yaw));
    }
    let frame = render_frame(&cam, &scene, 0, &RenderOptions::default()).unwrap();
    let mask = vehicle_mask(&frame.stencil).unwrap();
    assert_eq!(connected_components(&mask).len(), 5);
    let anns = annotate_frame(frame.view(), &cam.depth, &RefinementParams::default()).unwrap();
    assert_eq!(anns.len(), 5);
    for a in &anns {
        assert!(box_iou(&a.tight_box.to_box(), &hull_of(&frame, a.source_id)) >= 0.98);
    }
}

#[test]
fn unrecorded_distant_vehicle_becomes_an_orphan() {
    let cam = vga_camera();
    let scene = vec![
        ground_slab(3, cam.depth.near_m(), CAMERA_HEIGHT_M, 150.0).unwrap(),
        vehicle(1, -3.0, 12.0, (4.5, 1.8, 1.5), 0.2),
        vehicle(2, 6.0, 70.0, (4.5, 1.8, 1.5), 1.4),
    ];
    let opts = RenderOptions {
        record_range_m: 50.0,
        ..RenderOptions::default()
    };
    let frame = render_frame(&cam, &scene, 0, &opts).unwrap();
    assert_eq!(frame.records.len(), 1);
    let anns = annotate_frame(frame.view(), &cam.depth, &RefinementParams::default()).unwrap();
    assert_eq!(anns.len(), 2);
    let orphan = &anns[1];
    assert_eq!(orphan.source_id, 0);
    assert_eq!(orphan.occlusion_level, 2);
    assert!(orphan.geometry.is_none());
    assert_eq!(orphan.tight_box.to_box(), hull_of(&frame, 2));
    assert!((orphan.range_m - 70.0).abs() < 3.0);
}

#[test]
fn output_ignores_the_instance_oracle() {
    let cfg = ScenarioConfig::with_seed(31);
    let params = RefinementParams::default();
    for i in 0..3 {
        let mut frame = simulate_frame(&cfg, i).unwrap();
        let before = annotate_frame(frame.view(), &cfg.camera.depth, &params).unwrap();
        for v in frame.instance_oracle.u16_mut().unwrap() {
            *v = v.wrapping_mul(7919).wrapping_add(13);
        }
        assert_eq!(annotate_frame(frame.view(), &cfg.camera.depth, &params).unwrap(), before);
    }
}

#[test]
fn coverage_and_tightness_on_generated_frames() {
    let mut cfg = ScenarioConfig::with_seed(8);
    cfg.frames = 12;
    let params = RefinementParams::default();
    for i in 0..cfg.frames {
        let frame = simulate_frame(&cfg, i).unwrap();
        let f = annotate_frame_detailed(frame.view(), &cfg.camera.depth, &params).unwrap();
        let mask = vehicle_mask(&frame.stencil).unwrap();

        let mut seen = vec![false; mask.bits.len()];
        for set in &f.kept {
            for &p in set {
                assert!(mask.bits[p] && !seen[p], "frame {i}: pixel {p} claimed twice or not a vehicle");
                seen[p] = true;
            }
        }
        let kept: usize = f.kept.iter().map(Vec::len).sum();
        let orphans: usize = f.annotations.iter().filter(|a| a.source_id == 0).map(|a| a.visible_px).sum();
        assert_eq!(kept + orphans + f.dropped_px, mask.count(), "frame {i}");

        for a in f.annotations.iter().filter(|a| a.source_id != 0) {
            let r = frame.records.iter().find(|r| r.object_id == a.source_id).unwrap();
            let region = r.coarse_box.dilate(params.coarse_box_margin_px);
            let b: Box2<f64> = a.tight_box.to_box();
            assert!(b.left >= region.left.floor() && b.right <= region.right.ceil(), "frame {i}");
            assert!(b.top >= region.top.floor() && b.bottom <= region.bottom.ceil(), "frame {i}");
            assert!(b.right <= cfg.camera.width as f64 && b.bottom <= cfg.camera.height as f64);
        }
    }
}

#[test]
fn wrong_buffer_kinds_are_rejected() {
    let (cam, scene) = occlusion_scene();
    let mut frame = render_frame(&cam, &scene, 0, &RenderOptions::default()).unwrap();
    frame.depth = matrixgt::raster_codec::Raster::new(640, 480, Samples::U8(vec![0; 640 * 480])).unwrap();
    assert!(annotate_frame(frame.view(), &cam.depth, &RefinementParams::default()).is_err());
}
