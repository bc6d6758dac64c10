//! Scene input: classified bounding boxes in either of two equivalent
//! encodings, plus the expansion into per-interpretation basic scenes.
//!
//! Fact listing, one image per line:
//!
//! ```text
//! image(0, bb(161, 12, 165, 167), [class('Reticulum_Class', 1.0)]).
//! ```
//!
//! Structured document (JSON):
//!
//! ```json
//! {"images": [{"id": 0,
//!              "bb": {"x": 161, "y": 12, "w": 165, "h": 167},
//!              "classifications": [{"class": "Reticulum_Class", "confidence": 1.0}]}]}
//! ```

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::domain::DomainModel;
use crate::facts::{strip_comment, Cursor};
use crate::geometry::BoundingBox;

pub type ImageId = u64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SceneError {
    #[error("scene file, {0}")]
    Syntax(crate::facts::FactError),
    #[error("scene document: {0}")]
    Json(String),
    #[error("duplicate image id {0}")]
    DuplicateId(ImageId),
    #[error("scene has no images")]
    Empty,
    #[error("image {0} has no classifications")]
    NoClassifications(ImageId),
    #[error(
        "image {id} has a degenerate bounding box ({w} x {h}); width and height must be positive"
    )]
    BadBox { id: ImageId, w: f64, h: f64 },
    #[error("image {id}, class '{class}': confidence {value} outside [0, 1]")]
    BadConfidence {
        id: ImageId,
        class: String,
        value: f64,
    },
    #[error("no interpretation declared for classification(s): {}", .0.join(", "))]
    MissingInterpretation(Vec<String>),
}

/// One classifier detection on an image region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Classification {
    #[serde(rename = "class")]
    pub class_name: String,
    pub confidence: f64,
}

/// A detected region with every classification proposed for it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputImage {
    pub id: ImageId,
    pub bb: Bb,
    pub classifications: Vec<Classification>,
}

/// Serialized box shape shared by the structured formats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bb {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

impl From<Bb> for BoundingBox {
    fn from(b: Bb) -> Self {
        BoundingBox::new(b.x, b.y, b.w, b.h)
    }
}

impl From<BoundingBox> for Bb {
    fn from(b: BoundingBox) -> Self {
        Bb {
            x: b.x,
            y: b.y,
            w: b.w,
            h: b.h,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputScene {
    pub images: Vec<InputImage>,
}

/// One (image, classification, interpretation) reading. The classifier
/// confidence is split evenly across the interpretations its class maps
/// to.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicScene {
    pub image_id: ImageId,
    pub bb: BoundingBox,
    pub class_name: String,
    pub interpretation: String,
    pub confidence: f64,
}

impl InputImage {
    pub fn bounding_box(&self) -> BoundingBox {
        self.bb.into()
    }
}

impl InputScene {
    /// Parse the fact listing format.
    pub fn parse_facts(text: &str) -> Result<InputScene, SceneError> {
        let mut images = Vec::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = strip_comment(raw_line);
            let mut cur = Cursor::new(line, idx + 1);
            if cur.at_end() {
                continue;
            }
            images.push(parse_image_fact(&mut cur).map_err(SceneError::Syntax)?);
        }
        let scene = InputScene { images };
        scene.validate()?;
        Ok(scene)
    }

    /// Parse the structured JSON document.
    pub fn parse_json(text: &str) -> Result<InputScene, SceneError> {
        let scene: InputScene =
            serde_json::from_str(text).map_err(|e| SceneError::Json(e.to_string()))?;
        scene.validate()?;
        Ok(scene)
    }

    fn validate(&self) -> Result<(), SceneError> {
        if self.images.is_empty() {
            return Err(SceneError::Empty);
        }
        let mut seen: HashSet<ImageId> = HashSet::new();
        for img in &self.images {
            if !seen.insert(img.id) {
                return Err(SceneError::DuplicateId(img.id));
            }
            if !(img.bb.w > 0.0 && img.bb.h > 0.0)
                || !img.bb.w.is_finite()
                || !img.bb.h.is_finite()
                || !img.bb.x.is_finite()
                || !img.bb.y.is_finite()
            {
                return Err(SceneError::BadBox {
                    id: img.id,
                    w: img.bb.w,
                    h: img.bb.h,
                });
            }
            if img.classifications.is_empty() {
                return Err(SceneError::NoClassifications(img.id));
            }
            for c in &img.classifications {
                if !(0.0..=1.0).contains(&c.confidence) || !c.confidence.is_finite() {
                    return Err(SceneError::BadConfidence {
                        id: img.id,
                        class: c.class_name.clone(),
                        value: c.confidence,
                    });
                }
            }
        }
        Ok(())
    }

    /// Emit the fact listing; parses back to an equal scene.
    pub fn to_fact_string(&self) -> String {
        let mut out = String::new();
        for img in &self.images {
            let classes: Vec<String> = img
                .classifications
                .iter()
                .map(|c| format!("class('{}', {})", c.class_name, c.confidence))
                .collect();
            out.push_str(&format!(
                "image({}, bb({}, {}, {}, {}), [{}]).\n",
                img.id,
                img.bb.x,
                img.bb.y,
                img.bb.w,
                img.bb.h,
                classes.join(", ")
            ));
        }
        out
    }

    /// Emit the structured JSON document.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scene serialization cannot fail")
    }
}

fn parse_image_fact(cur: &mut Cursor) -> Result<InputImage, crate::facts::FactError> {
    cur.expect_ident("image")?;
    cur.expect('(')?;
    let id = cur.unsigned()?;
    cur.expect(',')?;
    cur.expect_ident("bb")?;
    cur.expect('(')?;
    let x = cur.number()?;
    cur.expect(',')?;
    let y = cur.number()?;
    cur.expect(',')?;
    let w = cur.number()?;
    cur.expect(',')?;
    let h = cur.number()?;
    cur.expect(')')?;
    cur.expect(',')?;
    cur.expect('[')?;
    let mut classifications = Vec::new();
    if !cur.eat(']') {
        loop {
            cur.expect_ident("class")?;
            cur.expect('(')?;
            let class_name = cur.quoted()?;
            cur.expect(',')?;
            let confidence = cur.number()?;
            cur.expect(')')?;
            classifications.push(Classification {
                class_name,
                confidence,
            });
            if cur.eat(']') {
                break;
            }
            cur.expect(',')?;
        }
    }
    cur.expect(')')?;
    cur.finish_fact()?;
    Ok(InputImage {
        id,
        bb: Bb { x, y, w, h },
        classifications,
    })
}

/// Expand a scene into basic scenes: one per (image, classification,
/// interpretation), with confidence `C * (1 / count)` where `count` is
/// the number of interpretations the classification maps to.
///
/// Fails if any classification has no interpretation fact; the error
/// names every offending class.
pub fn serialize_basic_scenes(
    scene: &InputScene,
    domain: &DomainModel,
) -> Result<Vec<BasicScene>, SceneError> {
    let mut missing: Vec<String> = Vec::new();
    let mut basics = Vec::new();
    for img in &scene.images {
        for c in &img.classifications {
            let interps = domain.interpretations_of(&c.class_name);
            if interps.is_empty() {
                if !missing.iter().any(|m| m == &c.class_name) {
                    missing.push(c.class_name.clone());
                }
                continue;
            }
            let share = 1.0 / interps.len() as f64;
            for interp in interps {
                basics.push(BasicScene {
                    image_id: img.id,
                    bb: img.bounding_box(),
                    class_name: c.class_name.clone(),
                    interpretation: interp.clone(),
                    confidence: c.confidence * share,
                });
            }
        }
    }
    if !missing.is_empty() {
        return Err(SceneError::MissingInterpretation(missing));
    }
    Ok(basics)
}
