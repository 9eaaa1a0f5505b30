//! Built-in offline renderer: orthographic, flat-shaded, per-pixel z-buffer.
//! Deterministic pixels for fixed inputs; a subprocess hook lets an external
//! renderer stand in for the builtin.

use image::{Rgb, RgbImage};
use kinematics_core::{forward_kinematics, JointLimit, TriMesh, UrdfModel, Vec3};
use std::collections::BTreeMap;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("zero-area viewport {width}x{height}")]
    ZeroViewport { width: u32, height: u32 },
    #[error("link `{0}` has no mesh loaded")]
    MissingMesh(String),
    #[error(transparent)]
    Fk(#[from] kinematics_core::FkError),
    #[error("external renderer exited with status {0}")]
    ExternalFailed(i32),
    #[error("external renderer did not write `{0}`")]
    ExternalNoOutput(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CameraPreset {
    Front,
    Side,
    Top,
    Iso,
}

impl CameraPreset {
    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "front" => Some(Self::Front),
            "side" => Some(Self::Side),
            "top" => Some(Self::Top),
            "iso" => Some(Self::Iso),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Front => "front",
            Self::Side => "side",
            Self::Top => "top",
            Self::Iso => "iso",
        }
    }

    /// Orthonormal camera basis: (right, up, forward), forward pointing away
    /// from the viewer into the scene.
    fn basis(self) -> (Vec3, Vec3, Vec3) {
        match self {
            // Viewer at -y looking toward +y, z up.
            Self::Front => (Vec3::X, Vec3::Z, Vec3::Y),
            // Viewer at +x looking toward -x, z up.
            Self::Side => (Vec3::Y, Vec3::Z, -Vec3::X),
            // Viewer above looking down.
            Self::Top => (Vec3::X, Vec3::Y, -Vec3::Z),
            Self::Iso => {
                let forward = Vec3::new(1.0, 1.0, -0.8).normalized().unwrap();
                let world_up = Vec3::Z;
                let right = world_up.cross(forward).normalized().unwrap();
                let up = forward.cross(right).normalized().unwrap();
                (right, up, forward)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    Shaded,
    Segmented,
}

#[derive(Debug, Clone)]
pub struct RenderConfig {
    pub width: u32,
    pub height: u32,
    pub camera: CameraPreset,
    pub mode: RenderMode,
}

impl Default for RenderConfig {
    fn default() -> Self {
        Self { width: 256, height: 256, camera: CameraPreset::Iso, mode: RenderMode::Shaded }
    }
}

pub const BACKGROUND: [u8; 3] = [245, 245, 245];

/// Saturated, well-separated link colors via golden-angle hue stepping.
pub fn palette_color(index: usize) -> [u8; 3] {
    let hue = (index as f64 * 0.618033988749895).fract();
    hsv_to_rgb(hue, 0.85, 0.9)
}

fn hsv_to_rgb(h: f64, s: f64, v: f64) -> [u8; 3] {
    let i = (h * 6.0).floor();
    let f = h * 6.0 - i;
    let p = v * (1.0 - s);
    let q = v * (1.0 - f * s);
    let t = v * (1.0 - (1.0 - f) * s);
    let (r, g, b) = match (i as i64).rem_euclid(6) {
        0 => (v, t, p),
        1 => (q, v, p),
        2 => (p, v, t),
        3 => (p, q, v),
        4 => (t, p, v),
        _ => (v, p, q),
    };
    [(r * 255.0).round() as u8, (g * 255.0).round() as u8, (b * 255.0).round() as u8]
}

/// Renders the model at the given joint configuration.
///
/// Shaded mode lights each triangle by its facing toward the camera over the
/// link's palette color; segmented mode paints each link in one exact
/// palette color (or the mesh's pinned color tag) with no shading.
pub fn render_model(
    model: &UrdfModel,
    meshes: &BTreeMap<String, TriMesh>,
    joint_values: &BTreeMap<String, f64>,
    cfg: &RenderConfig,
) -> Result<RgbImage, RenderError> {
    if cfg.width == 0 || cfg.height == 0 {
        return Err(RenderError::ZeroViewport { width: cfg.width, height: cfg.height });
    }
    let poses = forward_kinematics(model, joint_values)?;

    // World-space triangles with their link color.
    struct WorldTri {
        v: [Vec3; 3],
        color: [u8; 3],
    }
    let mut tris: Vec<WorldTri> = Vec::new();
    for (index, link) in model.links().iter().enumerate() {
        let Some(mesh) = meshes.get(&link.name) else {
            if link.mesh.is_some() {
                return Err(RenderError::MissingMesh(link.name.clone()));
            }
            continue;
        };
        let color = mesh.color_tag.unwrap_or_else(|| palette_color(index));
        let world = poses[&link.name].compose(link.visual_origin);
        let scaled = mesh.scaled(link.mesh_scale);
        for t in 0..scaled.triangles.len() {
            let [a, b, c] = scaled.triangle(t);
            tris.push(WorldTri {
                v: [world.transform_point(a), world.transform_point(b), world.transform_point(c)],
                color,
            });
        }
    }

    let mut img = RgbImage::from_pixel(cfg.width, cfg.height, Rgb(BACKGROUND));
    if tris.is_empty() {
        return Ok(img);
    }

    let (right, up, forward) = cfg.camera.basis();
    let project = |p: Vec3| -> (f64, f64, f64) { (right.dot(p), up.dot(p), forward.dot(p)) };

    let mut min_x = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    for tri in &tris {
        for &v in &tri.v {
            let (x, y, _) = project(v);
            min_x = min_x.min(x);
            max_x = max_x.max(x);
            min_y = min_y.min(y);
            max_y = max_y.max(y);
        }
    }
    let span_x = (max_x - min_x).max(1e-9);
    let span_y = (max_y - min_y).max(1e-9);
    let scale = (cfg.width as f64 / span_x).min(cfg.height as f64 / span_y) * 0.9;
    let center_x = (min_x + max_x) / 2.0;
    let center_y = (min_y + max_y) / 2.0;
    let to_screen = |x: f64, y: f64| -> (f64, f64) {
        (
            cfg.width as f64 / 2.0 + (x - center_x) * scale,
            // Screen y grows downward.
            cfg.height as f64 / 2.0 - (y - center_y) * scale,
        )
    };

    let mut depth = vec![f64::INFINITY; (cfg.width * cfg.height) as usize];
    for tri in &tris {
        let p: Vec<(f64, f64, f64)> = tri.v.iter().map(|&v| project(v)).collect();
        let s: Vec<(f64, f64)> = p.iter().map(|&(x, y, _)| to_screen(x, y)).collect();

        let shade = match cfg.mode {
            RenderMode::Segmented => 1.0,
            RenderMode::Shaded => {
                let n = (tri.v[1] - tri.v[0]).cross(tri.v[2] - tri.v[0]);
                match n.normalized() {
                    Some(n) => 0.35 + 0.65 * n.dot(forward).abs(),
                    None => continue,
                }
            }
        };
        let color = [
            (tri.color[0] as f64 * shade).round() as u8,
            (tri.color[1] as f64 * shade).round() as u8,
            (tri.color[2] as f64 * shade).round() as u8,
        ];

        let area = edge(s[0], s[1], s[2]);
        if area.abs() < 1e-12 {
            continue;
        }
        let min_px = s.iter().map(|q| q.0).fold(f64::INFINITY, f64::min).floor().max(0.0) as u32;
        let max_px = (s.iter().map(|q| q.0).fold(f64::NEG_INFINITY, f64::max).ceil() as i64)
            .clamp(0, cfg.width as i64 - 1) as u32;
        let min_py = s.iter().map(|q| q.1).fold(f64::INFINITY, f64::min).floor().max(0.0) as u32;
        let max_py = (s.iter().map(|q| q.1).fold(f64::NEG_INFINITY, f64::max).ceil() as i64)
            .clamp(0, cfg.height as i64 - 1) as u32;

        for py in min_py..=max_py {
            for px in min_px..=max_px {
                let point = (px as f64 + 0.5, py as f64 + 0.5);
                let w0 = edge(s[1], s[2], point) / area;
                let w1 = edge(s[2], s[0], point) / area;
                let w2 = edge(s[0], s[1], point) / area;
                if w0 < 0.0 || w1 < 0.0 || w2 < 0.0 {
                    continue;
                }
                let z = w0 * p[0].2 + w1 * p[1].2 + w2 * p[2].2;
                let idx = (py * cfg.width + px) as usize;
                if z < depth[idx] {
                    depth[idx] = z;
                    img.put_pixel(px, py, Rgb(color));
                }
            }
        }
    }
    Ok(img)
}

fn edge(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)
}

/// Joint values for an inclusive sweep of `frames` positions from the lower
/// to the upper limit.
pub fn sweep_values(limit: JointLimit, frames: usize) -> Vec<f64> {
    assert!(frames >= 2, "a sweep needs at least two frames");
    (0..frames)
        .map(|i| limit.lower + (limit.upper - limit.lower) * i as f64 / (frames - 1) as f64)
        .collect()
}

/// Renders an inclusive lower-to-upper sweep of one joint; all other joints
/// stay at zero.
pub fn render_sweep(
    model: &UrdfModel,
    meshes: &BTreeMap<String, TriMesh>,
    joint_name: &str,
    frames: usize,
    cfg: &RenderConfig,
) -> Result<Vec<RgbImage>, RenderError> {
    let joint = model
        .joint(joint_name)
        .unwrap_or_else(|| panic!("unknown joint `{joint_name}`"));
    let limit = joint.limit.unwrap_or(JointLimit { lower: 0.0, upper: 0.0 });
    sweep_values(limit, frames)
        .into_iter()
        .map(|value| {
            let values = BTreeMap::from([(joint_name.to_string(), value)]);
            render_model(model, meshes, &values, cfg)
        })
        .collect()
}

/// Legend text mapping link names to their segmentation colors, matching the
/// palette assignment used by `render_model`.
pub fn segmentation_legend(model: &UrdfModel, meshes: &BTreeMap<String, TriMesh>) -> String {
    let mut out = String::new();
    for (index, link) in model.links().iter().enumerate() {
        let color = meshes
            .get(&link.name)
            .and_then(|m| m.color_tag)
            .unwrap_or_else(|| palette_color(index));
        out.push_str(&format!(
            "- {}: rgb({}, {}, {})\n",
            link.name, color[0], color[1], color[2]
        ));
    }
    out
}

/// Invokes an external renderer: the configured command gets
/// `(urdf path, joint-value file, camera preset, output path)` appended, must
/// exit 0, and must write the output image.
pub fn render_external(
    command: &[String],
    urdf_path: &Path,
    joints_path: &Path,
    camera: CameraPreset,
    out_path: &Path,
) -> Result<(), RenderError> {
    let (program, args) = command.split_first().expect("external command is non-empty");
    let status = std::process::Command::new(program)
        .args(args)
        .arg(urdf_path)
        .arg(joints_path)
        .arg(camera.name())
        .arg(out_path)
        .status()?;
    if !status.success() {
        return Err(RenderError::ExternalFailed(status.code().unwrap_or(-1)));
    }
    if !out_path.exists() {
        return Err(RenderError::ExternalNoOutput(out_path.display().to_string()));
    }
    Ok(())
}

/// Encodes an image as PNG bytes (deterministic for fixed pixels).
pub fn png_bytes(img: &RgbImage) -> Vec<u8> {
    let mut bytes = Vec::new();
    let mut cursor = std::io::Cursor::new(&mut bytes);
    img.write_to(&mut cursor, image::ImageFormat::Png).expect("in-memory PNG encode");
    bytes
}

#[cfg(test)]
mod tests {
    use super::*;
    use kinematics_core::{Link, MeshRef};

    #[test]
    fn empty_scene_is_background_only() {
        let model = UrdfModel::new("empty", vec![Link::new("bare")], vec![]).unwrap();
        let img =
            render_model(&model, &BTreeMap::new(), &BTreeMap::new(), &RenderConfig::default())
                .unwrap();
        assert!(img.pixels().all(|p| p.0 == BACKGROUND));
    }

    #[test]
    fn cube_renders_foreground_and_one_segment_color() {
        let mesh = TriMesh::cuboid(Vec3::new(0.5, 0.5, 0.5));
        let model = UrdfModel::new(
            "cube",
            vec![Link::new("cube").with_mesh(MeshRef::Inline(mesh.clone()))],
            vec![],
        )
        .unwrap();
        let meshes = BTreeMap::from([("cube".to_string(), mesh)]);

        let cfg = RenderConfig { mode: RenderMode::Segmented, ..RenderConfig::default() };
        let img = render_model(&model, &meshes, &BTreeMap::new(), &cfg).unwrap();
        let mut colors = std::collections::BTreeSet::new();
        for p in img.pixels() {
            if p.0 != BACKGROUND {
                colors.insert(p.0);
            }
        }
        assert_eq!(colors.len(), 1);
        assert_eq!(colors.into_iter().next().unwrap(), palette_color(0));

        let shaded =
            render_model(&model, &meshes, &BTreeMap::new(), &RenderConfig::default()).unwrap();
        assert!(shaded.pixels().any(|p| p.0 != BACKGROUND));
    }

    #[test]
    fn sweep_values_are_inclusive_and_even() {
        let values = sweep_values(JointLimit { lower: 0.0, upper: 0.3 }, 6);
        assert_eq!(values.len(), 6);
        assert!((values[0] - 0.0).abs() < 1e-12);
        assert!((values[5] - 0.3).abs() < 1e-12);
        for (i, v) in values.iter().enumerate() {
            assert!((v - 0.06 * i as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_viewport_rejected() {
        let model = UrdfModel::new("m", vec![Link::new("a")], vec![]).unwrap();
        let cfg = RenderConfig { width: 0, ..RenderConfig::default() };
        assert!(matches!(
            render_model(&model, &BTreeMap::new(), &BTreeMap::new(), &cfg),
            Err(RenderError::ZeroViewport { .. })
        ));
    }

    #[test]
    fn palette_colors_are_distinct_for_small_models() {
        let mut seen = std::collections::BTreeSet::new();
        for i in 0..16 {
            assert!(seen.insert(palette_color(i)), "palette collision at {i}");
        }
    }
}
