//! VRML97 world output and a small structural checker for it.
//!
//! The layout plane becomes the horizontal `XZ` plane: layout `x` maps to
//! world `X` and layout `y` to world `-Z`, so the root is nearest the viewer
//! and the tree recedes. Labels float above their spheres on `+Y`, with a
//! checkered ground grid underneath.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::gcell::ArcKind;
use crate::layout::{GridPos, PlacedNetwork};

pub const VRML_HEADER: &str = "#VRML V2.0 utf8";

#[derive(Debug, Clone, PartialEq)]
pub struct SceneOptions {
    pub sphere_radius: f64,
    pub arc_radius: f64,
    /// Squares along world `Z`.
    pub grid_rows: u32,
    /// Squares along world `X`.
    pub grid_cols: u32,
    pub label_scale: f64,
    pub include_elevation_grid: bool,
    /// Draw the root cell's ghost nodes as translucent boxes.
    pub draw_phantoms: bool,
    /// Put the root at the far edge (world `Z = +y`) instead of the near one.
    pub root_far: bool,
}

impl Default for SceneOptions {
    fn default() -> Self {
        SceneOptions {
            sphere_radius: 0.25,
            arc_radius: 0.04,
            grid_rows: 11,
            grid_cols: 11,
            label_scale: 0.3,
            include_elevation_grid: true,
            draw_phantoms: true,
            root_far: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SceneOptionsError {
    #[error("{0} must be a positive finite length")]
    NonPositiveLength(&'static str),
    #[error("grid dimensions must be at least 1")]
    EmptyGrid,
}

impl SceneOptions {
    pub fn validate(&self) -> Result<(), SceneOptionsError> {
        for (name, v) in [
            ("sphere_radius", self.sphere_radius),
            ("arc_radius", self.arc_radius),
            ("label_scale", self.label_scale),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SceneOptionsError::NonPositiveLength(name));
            }
        }
        if self.grid_rows == 0 || self.grid_cols == 0 {
            return Err(SceneOptionsError::EmptyGrid);
        }
        Ok(())
    }
}

/// Fixed six-decimal rendering; negative zero prints as zero.
fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

#[derive(Clone, Copy)]
struct Point {
    x: f64,
    z: f64,
}

struct Emitter<'a> {
    out: String,
    opts: &'a SceneOptions,
    defined: [bool; 4],
}

const NODE_LOOK: usize = 0;
const ARC_LOOK: usize = 1;
const PHANTOM_LOOK: usize = 2;
const LABEL_LOOK: usize = 3;

impl Emitter<'_> {
    fn appearance(&mut self, which: usize) -> String {
        const NAMES: [&str; 4] = ["NODE_LOOK", "ARC_LOOK", "PHANTOM_LOOK", "LABEL_LOOK"];
        const MATERIALS: [&str; 4] = [
            "diffuseColor 0.850000 0.300000 0.150000",
            "diffuseColor 0.200000 0.350000 0.750000",
            "diffuseColor 0.700000 0.700000 0.700000 transparency 0.600000",
            "diffuseColor 0.050000 0.050000 0.050000",
        ];
        if self.defined[which] {
            format!("USE {}", NAMES[which])
        } else {
            self.defined[which] = true;
            format!(
                "DEF {} Appearance {{ material Material {{ {} }} }}",
                NAMES[which], MATERIALS[which]
            )
        }
    }

    fn sphere(&mut self, p: Point) {
        let look = self.appearance(NODE_LOOK);
        let _ = writeln!(
            self.out,
            "    Transform {{\n      translation {} 0.000000 {}\n      children [\n        Shape {{\n          appearance {look}\n          geometry Sphere {{ radius {} }}\n        }}\n      ]\n    }}",
            num(p.x),
            num(p.z),
            num(self.opts.sphere_radius)
        );
    }

    fn phantom(&mut self, p: Point) {
        let look = self.appearance(PHANTOM_LOOK);
        let side = num(self.opts.sphere_radius * 1.4);
        let _ = writeln!(
            self.out,
            "    Transform {{\n      translation {} 0.000000 {}\n      children [\n        Shape {{\n          appearance {look}\n          geometry Box {{ size {side} {side} {side} }}\n        }}\n      ]\n    }}",
            num(p.x),
            num(p.z)
        );
    }

    fn label(&mut self, p: Point, text: &str) {
        let look = self.appearance(LABEL_LOOK);
        let lift = self.opts.sphere_radius + self.opts.label_scale;
        let _ = writeln!(
            self.out,
            "    Transform {{\n      translation {} {} {}\n      children [\n        Billboard {{\n          axisOfRotation 0 0 0\n          children [\n            Shape {{\n              appearance {look}\n              geometry Text {{\n                string [ \"{text}\" ]\n                fontStyle FontStyle {{ size {} justify \"MIDDLE\" }}\n              }}\n            }}\n          ]\n        }}\n      ]\n    }}",
            num(p.x),
            num(lift),
            num(p.z),
            num(self.opts.label_scale)
        );
    }

    /// Cylinders run along local `Y`; tip them onto the segment direction.
    fn cylinder(&mut self, a: Point, b: Point) {
        let (dx, dz) = (b.x - a.x, b.z - a.z);
        let length = dx.hypot(dz);
        let mid = Point {
            x: (a.x + b.x) / 2.0,
            z: (a.z + b.z) / 2.0,
        };
        // axis = Y x d, angle = 90 degrees since d lies in the XZ plane
        let (ax, az) = if length > 0.0 {
            (dz / length, -dx / length)
        } else {
            (1.0, 0.0)
        };
        let look = self.appearance(ARC_LOOK);
        let _ = writeln!(
            self.out,
            "    Transform {{\n      translation {} 0.000000 {}\n      rotation {} 0.000000 {} {}\n      children [\n        Shape {{\n          appearance {look}\n          geometry Cylinder {{ radius {} height {} }}\n        }}\n      ]\n    }}",
            num(mid.x),
            num(mid.z),
            num(ax),
            num(az),
            num(std::f64::consts::FRAC_PI_2),
            num(self.opts.arc_radius),
            num(length)
        );
    }

    fn ground(&mut self, lo: Point, hi: Point) {
        let (rows, cols) = (self.opts.grid_rows, self.opts.grid_cols);
        let margin = 1.0;
        let x_span = (hi.x - lo.x) + 2.0 * margin;
        let z_span = (hi.z - lo.z) + 2.0 * margin;
        let x_spacing = x_span / f64::from(cols);
        let z_spacing = z_span / f64::from(rows);
        let vertices = (rows as usize + 1) * (cols as usize + 1);
        let heights = vec!["0"; vertices].join(" ");
        let mut colors = Vec::with_capacity((rows * cols) as usize);
        for r in 0..rows {
            for c in 0..cols {
                colors.push(if (r + c) % 2 == 0 {
                    "0.900000 0.900000 0.850000"
                } else {
                    "0.350000 0.350000 0.350000"
                });
            }
        }
        let _ = writeln!(
            self.out,
            "    Transform {{\n      translation {} {} {}\n      children [\n        Shape {{\n          geometry ElevationGrid {{\n            xDimension {}\n            zDimension {}\n            xSpacing {}\n            zSpacing {}\n            colorPerVertex FALSE\n            solid FALSE\n            color Color {{ color [ {} ] }}\n            height [ {heights} ]\n          }}\n        }}\n      ]\n    }}",
            num(lo.x - margin),
            num(-2.0 * self.opts.sphere_radius),
            num(lo.z - margin),
            cols + 1,
            rows + 1,
            num(x_spacing),
            num(z_spacing),
            colors.join(", ")
        );
    }
}

/// Renders a placed network as a VRML97 world. Output depends only on the
/// inputs; elements appear in ascending node value order.
pub fn emit_vrml(placed: &PlacedNetwork, opts: &SceneOptions) -> String {
    let to_world = |p: &GridPos| {
        let depth = p.y as f64;
        Point {
            x: p.x.to_f64(),
            z: if opts.root_far { depth } else { -depth },
        }
    };
    let net = placed.network();
    let bounds = net.bounds();
    let mut e = Emitter {
        out: String::new(),
        opts,
        defined: [false; 4],
    };
    let _ = writeln!(e.out, "{VRML_HEADER}");
    let title = match bounds.max_generation {
        Some(g) => format!(
            "3x+1 tree from {} up to {}, {} generations",
            net.root_seed(),
            bounds.max_value,
            g
        ),
        None => format!(
            "3x+1 tree from {} up to {}",
            net.root_seed(),
            bounds.max_value
        ),
    };
    let _ = writeln!(e.out, "WorldInfo {{ title \"{title}\" }}");
    let _ = writeln!(e.out, "Group {{\n  children [");

    let points: BTreeMap<u64, Point> = placed
        .positions()
        .iter()
        .map(|(v, p)| (*v, to_world(p)))
        .collect();
    if opts.include_elevation_grid {
        let mut lo = Point { x: 0.0, z: 0.0 };
        let mut hi = lo;
        for p in points.values() {
            lo.x = lo.x.min(p.x);
            lo.z = lo.z.min(p.z);
            hi.x = hi.x.max(p.x);
            hi.z = hi.z.max(p.z);
        }
        e.ground(lo, hi);
    }
    for p in points.values() {
        e.sphere(*p);
    }
    if opts.draw_phantoms {
        for p in placed.phantom_positions().values() {
            e.phantom(to_world(p));
        }
    }
    for arc in net.arcs() {
        let (Some(a), Some(b)) = (points.get(&arc.from), points.get(&arc.to)) else {
            continue;
        };
        let (mut a, b) = (*a, *b);
        // The 1 -> 2 arc retraces 2 -> 1; bow it out so both stay visible.
        if arc.kind == ArcKind::Odd && a.x == b.x {
            a.x += opts.arc_radius * 3.0;
        }
        e.cylinder(a, b);
    }
    for (v, p) in &points {
        e.label(*p, &v.to_string());
    }
    let _ = writeln!(e.out, "  ]\n}}");
    e.out
}

const KNOWN_NODES: &[&str] = &[
    "Anchor",
    "Appearance",
    "Background",
    "Billboard",
    "Box",
    "Color",
    "Cone",
    "Coordinate",
    "Cylinder",
    "DirectionalLight",
    "ElevationGrid",
    "FontStyle",
    "Group",
    "IndexedFaceSet",
    "IndexedLineSet",
    "Material",
    "NavigationInfo",
    "PointLight",
    "Shape",
    "Sphere",
    "Text",
    "Transform",
    "Viewpoint",
    "WorldInfo",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VrmlLintError {
    #[error("first line is not the VRML97 header")]
    MissingHeader,
    #[error("unbalanced {0:?} at token {1}")]
    Unbalanced(char, usize),
    #[error("unterminated string")]
    UnterminatedString,
    #[error("unknown node type {0:?}")]
    UnknownNode(String),
    #[error("USE of undefined name {0:?}")]
    UndefinedName(String),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VrmlSummary {
    /// Instances of each node type, counting only literal definitions.
    pub node_counts: BTreeMap<String, usize>,
    pub sphere_radii: Vec<f64>,
}

impl VrmlSummary {
    pub fn count(&self, node: &str) -> usize {
        self.node_counts.get(node).copied().unwrap_or(0)
    }
}

#[derive(Debug, PartialEq)]
enum Token<'a> {
    Word(&'a str),
    Str,
    Open(char),
    Close(char),
}

fn tokenize(body: &str) -> Result<Vec<Token<'_>>, VrmlLintError> {
    let mut tokens = Vec::new();
    let bytes = body.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'"' => {
                i += 1;
                loop {
                    match bytes.get(i) {
                        None => return Err(VrmlLintError::UnterminatedString),
                        Some(b'\\') => i += 2,
                        Some(b'"') => break,
                        Some(_) => i += 1,
                    }
                }
                i += 1;
                tokens.push(Token::Str);
            }
            b'{' | b'[' => {
                tokens.push(Token::Open(c as char));
                i += 1;
            }
            b'}' | b']' => {
                tokens.push(Token::Close(c as char));
                i += 1;
            }
            c if c.is_ascii_whitespace() || c == b',' => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !b" \t\r\n,{}[]\"#".contains(&bytes[i]) {
                    i += 1;
                }
                tokens.push(Token::Word(&body[start..i]));
            }
        }
    }
    Ok(tokens)
}

/// Structural check: header line, balanced braces and brackets, every node
/// type known, every `USE` preceded by its `DEF`.
pub fn lint_vrml(doc: &str) -> Result<VrmlSummary, VrmlLintError> {
    let (first, body) = doc.split_once('\n').unwrap_or((doc, ""));
    if first.trim_end_matches('\r') != VRML_HEADER {
        return Err(VrmlLintError::MissingHeader);
    }
    let tokens = tokenize(body)?;
    let mut summary = VrmlSummary::default();
    let mut stack = Vec::new();
    let mut defs = std::collections::HashSet::new();
    for (i, tok) in tokens.iter().enumerate() {
        match tok {
            Token::Open(c) => {
                if *c == '{' {
                    let Some(Token::Word(name)) = i.checked_sub(1).map(|j| &tokens[j]) else {
                        return Err(VrmlLintError::Unbalanced('{', i));
                    };
                    if !KNOWN_NODES.contains(name) {
                        return Err(VrmlLintError::UnknownNode(name.to_string()));
                    }
                    *summary.node_counts.entry(name.to_string()).or_default() += 1;
                    if *name == "Sphere" {
                        let radius = match (tokens.get(i + 1), tokens.get(i + 2)) {
                            (Some(Token::Word("radius")), Some(Token::Word(r))) => r.parse().ok(),
                            // VRML default radius
                            _ => Some(1.0),
                        };
                        summary.sphere_radii.extend(radius);
                    }
                }
                stack.push(*c);
            }
            Token::Close(c) => {
                let want = if *c == '}' { '{' } else { '[' };
                if stack.pop() != Some(want) {
                    return Err(VrmlLintError::Unbalanced(*c, i));
                }
            }
            Token::Word("DEF") => {
                if let Some(Token::Word(name)) = tokens.get(i + 1) {
                    defs.insert(*name);
                }
            }
            Token::Word("USE") => {
                if let Some(Token::Word(name)) = tokens.get(i + 1) {
                    if !defs.contains(name) {
                        return Err(VrmlLintError::UndefinedName(name.to_string()));
                    }
                }
            }
            _ => {}
        }
    }
    if let Some(open) = stack.pop() {
        return Err(VrmlLintError::Unbalanced(open, tokens.len()));
    }
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::layout::layout_network;
    use crate::network::generate_network;

    fn world(max_value: u64, opts: &SceneOptions) -> (PlacedNetwork, String) {
        let net = generate_network(1, max_value, None).unwrap();
        let placed = layout_network(net, Dyadic::from_integer(4)).unwrap();
        let doc = emit_vrml(&placed, opts);
        (placed, doc)
    }

    #[test]
    fn empty_network() {
        let (_, doc) = world(
            0,
            &SceneOptions {
                include_elevation_grid: false,
                ..Default::default()
            },
        );
        assert!(doc.starts_with("#VRML V2.0 utf8\n"));
        let s = lint_vrml(&doc).unwrap();
        assert_eq!(s.count("Group"), 1);
        assert_eq!(s.count("Sphere"), 0);
    }

    #[test]
    fn single_node() {
        let (_, doc) = world(1, &SceneOptions::default());
        let s = lint_vrml(&doc).unwrap();
        assert_eq!(s.sphere_radii, vec![0.25]);
        assert_eq!(s.count("Cylinder"), 0);
        assert_eq!(s.count("Text"), 1);
        assert_eq!(s.count("ElevationGrid"), 1);
    }

    #[test]
    fn counts_match_network() {
        let (placed, doc) = world(1024, &SceneOptions::default());
        let s = lint_vrml(&doc).unwrap();
        let net = placed.network();
        assert_eq!(s.count("Sphere"), net.nodes().len());
        assert_eq!(s.count("Text"), net.nodes().len());
        assert_eq!(s.count("Cylinder"), net.arcs().len());
        assert_eq!(s.count("Box"), 2);
        assert!(s.sphere_radii.iter().all(|r| *r == 0.25));
    }

    #[test]
    fn root_cycle_gets_two_cylinders() {
        let (_, doc) = world(2, &SceneOptions::default());
        assert_eq!(lint_vrml(&doc).unwrap().count("Cylinder"), 2);
    }

    #[test]
    fn deterministic_and_no_negative_zero() {
        let opts = SceneOptions::default();
        let (_, a) = world(500, &opts);
        let (_, b) = world(500, &opts);
        assert_eq!(a, b);
        assert!(!a.contains("-0.000000"));
        let far = SceneOptions {
            root_far: true,
            ..opts
        };
        let (_, c) = world(500, &far);
        assert_ne!(a, c);
        lint_vrml(&c).unwrap();
    }

    #[test]
    fn elevation_grid_dimensions() {
        let opts = SceneOptions {
            grid_rows: 3,
            grid_cols: 5,
            ..Default::default()
        };
        let (_, doc) = world(32, &opts);
        assert!(doc.contains("xDimension 6\n"));
        assert!(doc.contains("zDimension 4\n"));
        let colors = doc
            .split("color Color { color [")
            .nth(1)
            .unwrap()
            .split(']')
            .next()
            .unwrap();
        assert_eq!(colors.split(',').count(), 15);
        assert_eq!(colors.matches("0.350000 0.350000 0.350000").count(), 7);
    }

    #[test]
    fn option_validation() {
        assert!(SceneOptions::default().validate().is_ok());
        let bad = SceneOptions {
            sphere_radius: 0.0,
            ..Default::default()
        };
        assert_eq!(
            bad.validate(),
            Err(SceneOptionsError::NonPositiveLength("sphere_radius"))
        );
        let bad = SceneOptions {
            grid_rows: 0,
            ..Default::default()
        };
        assert_eq!(bad.validate(), Err(SceneOptionsError::EmptyGrid));
    }

    #[test]
    fn lint_accepts_the_classic_sample() {
        let sample = "#VRML V2.0 utf8\nGroup {\n  children [\n    Shape {\n      geometry\n      Sphere {\n        radius 0.25\n      }\n    }\n  ]\n}\n";
        let s = lint_vrml(sample).unwrap();
        assert_eq!(s.sphere_radii, vec![0.25]);
    }

    #[test]
    fn lint_rejects_broken_documents() {
        assert_eq!(
            lint_vrml("#VRML V1.0 ascii\nGroup { }"),
            Err(VrmlLintError::MissingHeader)
        );
        assert!(matches!(
            lint_vrml("#VRML V2.0 utf8\nGroup { children [ }"),
            Err(VrmlLintError::Unbalanced(..))
        ));
        assert!(matches!(
            lint_vrml("#VRML V2.0 utf8\nGroup {"),
            Err(VrmlLintError::Unbalanced('{', _))
        ));
        assert_eq!(
            lint_vrml("#VRML V2.0 utf8\nTeapot { }"),
            Err(VrmlLintError::UnknownNode("Teapot".into()))
        );
        assert_eq!(
            lint_vrml("#VRML V2.0 utf8\nShape { appearance USE X }"),
            Err(VrmlLintError::UndefinedName("X".into()))
        );
        assert_eq!(
            lint_vrml("#VRML V2.0 utf8\nText { string \"a }"),
            Err(VrmlLintError::UnterminatedString)
        );
    }
}
