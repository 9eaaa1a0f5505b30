use crate::rpy::rpy_to_quat;
use crate::UrdfError;
use kinematics_core::{Joint, JointKind, JointLimit, Link, MeshRef, Pose, UrdfModel, Vec3};
use roxmltree::{Document, Node};
use std::f64::consts::PI;

/// Parses a URDF document into a validated model.
///
/// Unspecified origins default to identity and unspecified axes to `(1,0,0)`.
/// Each invalid-document class maps to a distinct [`UrdfError`] variant.
pub fn parse_urdf(text: &str) -> Result<UrdfModel, UrdfError> {
    let doc = Document::parse(text).map_err(|e| UrdfError::MalformedXml(e.to_string()))?;
    let robot = doc.root_element();
    if robot.tag_name().name() != "robot" {
        return Err(UrdfError::NotARobot(robot.tag_name().name().to_string()));
    }
    let name = robot.attribute("name").unwrap_or("model").to_string();

    let mut links = Vec::new();
    let mut joints = Vec::new();
    for node in robot.children().filter(Node::is_element) {
        match node.tag_name().name() {
            "link" => links.push(parse_link(node)?),
            "joint" => joints.push(parse_joint(node)?),
            // material, gazebo, transmission, ... are outside the subset.
            _ => {}
        }
    }

    Ok(UrdfModel::new(name, links, joints)?)
}

fn require_attr<'a>(node: Node<'a, '_>, attr: &str) -> Result<&'a str, UrdfError> {
    node.attribute(attr).ok_or_else(|| UrdfError::MissingAttribute {
        element: node.tag_name().name().to_string(),
        attribute: attr.to_string(),
    })
}

fn parse_f64(text: &str, context: &str) -> Result<f64, UrdfError> {
    text.trim().parse().map_err(|_| UrdfError::BadNumber {
        text: text.to_string(),
        context: context.to_string(),
    })
}

fn parse_triple(text: &str, context: &str) -> Result<Vec3, UrdfError> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(UrdfError::BadTuple {
            text: text.to_string(),
            expected: 3,
            context: context.to_string(),
        });
    }
    Ok(Vec3::new(
        parse_f64(parts[0], context)?,
        parse_f64(parts[1], context)?,
        parse_f64(parts[2], context)?,
    ))
}

fn parse_origin(node: Node) -> Result<Pose, UrdfError> {
    let xyz = match node.attribute("xyz") {
        Some(t) => parse_triple(t, "origin xyz")?,
        None => Vec3::ZERO,
    };
    let rpy = match node.attribute("rpy") {
        Some(t) => parse_triple(t, "origin rpy")?,
        None => Vec3::ZERO,
    };
    Ok(Pose::new(xyz, rpy_to_quat(rpy.x, rpy.y, rpy.z)))
}

fn child_element<'a, 'b>(node: Node<'a, 'b>, name: &str) -> Option<Node<'a, 'b>> {
    node.children().filter(Node::is_element).find(|n| n.tag_name().name() == name)
}

fn parse_link(node: Node) -> Result<Link, UrdfError> {
    let name = require_attr(node, "name")?;
    let mut link = Link::new(name);

    if let Some(visual) = child_element(node, "visual") {
        if let Some(origin) = child_element(visual, "origin") {
            link.visual_origin = parse_origin(origin)?;
        }
        if let Some(mesh) = child_element(visual, "geometry").and_then(|g| child_element(g, "mesh"))
        {
            let filename = require_attr(mesh, "filename")?;
            link.mesh = Some(MeshRef::Path(filename.to_string()));
            if let Some(scale) = mesh.attribute("scale") {
                link.mesh_scale = parse_triple(scale, "mesh scale")?;
            }
        }
    }
    Ok(link)
}

fn parse_joint(node: Node) -> Result<Joint, UrdfError> {
    let name = require_attr(node, "name")?.to_string();
    let type_text = require_attr(node, "type")?;
    let (kind, implied_limit) = match type_text {
        "fixed" => (JointKind::Fixed, None),
        "prismatic" => (JointKind::Prismatic, None),
        "revolute" => (JointKind::Revolute, None),
        // Finite bounds are required downstream; a full turn stands in.
        "continuous" => (JointKind::Revolute, Some(JointLimit::new(-PI, PI).unwrap())),
        other => return Err(UrdfError::UnknownJointType(other.to_string())),
    };

    let origin = match child_element(node, "origin") {
        Some(o) => parse_origin(o)?,
        None => Pose::IDENTITY,
    };
    let parent = child_element(node, "parent")
        .and_then(|n| n.attribute("link"))
        .ok_or_else(|| UrdfError::MissingEndpoint(name.clone()))?
        .to_string();
    let child = child_element(node, "child")
        .and_then(|n| n.attribute("link"))
        .ok_or_else(|| UrdfError::MissingEndpoint(name.clone()))?
        .to_string();

    let mut axis = Vec3::X;
    if let Some(axis_node) = child_element(node, "axis") {
        let raw = parse_triple(require_attr(axis_node, "xyz")?, "axis xyz")?;
        axis = raw.normalized().ok_or_else(|| UrdfError::ZeroAxis(name.clone()))?;
    }

    let mut limit = implied_limit;
    if let Some(limit_node) = child_element(node, "limit") {
        let lower = match limit_node.attribute("lower") {
            Some(t) => parse_f64(t, "limit lower")?,
            None => 0.0,
        };
        let upper = match limit_node.attribute("upper") {
            Some(t) => parse_f64(t, "limit upper")?,
            None => 0.0,
        };
        limit = Some(JointLimit { lower, upper });
    }
    if kind.is_movable() && limit.is_none() {
        return Err(UrdfError::MissingLimit(name));
    }

    Ok(Joint { name, kind, parent, child, origin, axis, limit })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_LINK: &str = r#"<?xml version="1.0"?>
<robot name="door_unit">
  <link name="frame">
    <visual>
      <geometry><mesh filename="frame.obj"/></geometry>
    </visual>
  </link>
  <link name="door"/>
  <joint name="hinge" type="revolute">
    <origin xyz="0.4 0 0" rpy="0 0 0"/>
    <parent link="frame"/>
    <child link="door"/>
    <axis xyz="0 0 1"/>
    <limit lower="-1.57" upper="0"/>
  </joint>
</robot>"#;

    #[test]
    fn two_link_document_maps_directly() {
        let m = parse_urdf(TWO_LINK).unwrap();
        assert_eq!(m.name, "door_unit");
        assert_eq!(m.links().len(), 2);
        assert_eq!(m.root_link().name, "frame");
        let j = m.joint("hinge").unwrap();
        assert_eq!(j.kind, JointKind::Revolute);
        let limit = j.limit.unwrap();
        assert_eq!((limit.lower, limit.upper), (-1.57, 0.0));
        assert!((j.axis - Vec3::Z).norm() < 1e-12);
    }

    #[test]
    fn self_parented_joint_is_a_cycle_error() {
        let doc = TWO_LINK.replace("<parent link=\"frame\"/>", "<parent link=\"door\"/>");
        match parse_urdf(&doc).unwrap_err() {
            UrdfError::Model(kinematics_core::ModelError::Cycle(l)) => assert_eq!(l, "door"),
            other => panic!("expected cycle error, got {other:?}"),
        }
    }

    #[test]
    fn continuous_normalizes_to_revolute_full_turn() {
        let doc = TWO_LINK
            .replace("type=\"revolute\"", "type=\"continuous\"")
            .replace("    <limit lower=\"-1.57\" upper=\"0\"/>\n", "");
        let m = parse_urdf(&doc).unwrap();
        let j = m.joint("hinge").unwrap();
        assert_eq!(j.kind, JointKind::Revolute);
        let limit = j.limit.unwrap();
        assert_eq!((limit.lower, limit.upper), (-PI, PI));
    }

    #[test]
    fn unknown_joint_type_rejected() {
        let doc = TWO_LINK.replace("type=\"revolute\"", "type=\"floating\"");
        assert!(matches!(parse_urdf(&doc).unwrap_err(), UrdfError::UnknownJointType(t) if t == "floating"));
    }

    #[test]
    fn malformed_xml_rejected() {
        assert!(matches!(parse_urdf("<robot><link").unwrap_err(), UrdfError::MalformedXml(_)));
    }

    #[test]
    fn missing_limit_rejected() {
        let doc = TWO_LINK.replace("    <limit lower=\"-1.57\" upper=\"0\"/>\n", "");
        assert!(matches!(parse_urdf(&doc).unwrap_err(), UrdfError::MissingLimit(j) if j == "hinge"));
    }
}
