//! A stable JSON document format for every design family this crate
//! produces.  Export is deterministic — object keys are sorted and numbers
//! are plain integers — so exporting, importing, and exporting again yields
//! byte-identical text.  The two distinguished points of holed families are
//! recorded under the aliases `inf1` and `inf2` in a label table.

use crate::core::{
    Block, BlockMultiset, CoreError, Digraph, FanDesign, Frame, GoodLargeSet, GroupedDesign,
    HoledLargeSet, HoleProfile, LargeSet, LrDesign, LrMember, Point,
};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use thiserror::Error;

/// Version tag written into every document.
pub const FORMAT: u64 = 1;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("could not parse document: {0}")]
    Parse(String),
    #[error("unsupported document format {0}")]
    UnsupportedFormat(u64),
    #[error("unknown document kind {0:?}")]
    UnknownKind(String),
    #[error("invalid document: {0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// The design carried by a document.
#[derive(Debug, Clone, PartialEq)]
pub enum DocumentBody {
    Gdd {
        design: GroupedDesign,
        lambda: usize,
        simple: bool,
    },
    LargeSet(LargeSet),
    Holed(HoledLargeSet),
    Gls(GoodLargeSet),
    Lr(LrDesign),
    Frame(Frame),
    Fan(FanDesign),
}

/// A versioned, deterministic JSON wrapper around one design.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignDocument {
    pub body: DocumentBody,
}

#[derive(Serialize, Deserialize)]
struct GddDoc {
    blocks: Vec<(Vec<Point>, u32)>,
    g: usize,
    lambda: usize,
    simple: bool,
    u: usize,
}

#[derive(Serialize, Deserialize)]
struct LargeSetDoc {
    g: usize,
    lambda: usize,
    members: Vec<Vec<(Vec<Point>, u32)>>,
    u: usize,
}

#[derive(Serialize, Deserialize)]
struct HoledDoc {
    k0: Vec<usize>,
    k2: Vec<usize>,
    labels: BTreeMap<String, Point>,
    lambda: usize,
    members: Vec<Vec<(Vec<Point>, u32)>>,
    s_size: usize,
}

#[derive(Serialize, Deserialize)]
struct GlsDoc {
    digraphs: Vec<Vec<(Point, Point)>>,
    k0: Vec<usize>,
    k2: Vec<usize>,
    labels: BTreeMap<String, Point>,
    lambda: usize,
    members: Vec<Vec<(Vec<Point>, u32)>>,
    s_size: usize,
}

#[derive(Serialize, Deserialize)]
struct LrDoc {
    members: Vec<Vec<Vec<Vec<Point>>>>,
    v: usize,
}

#[derive(Serialize, Deserialize)]
struct FrameDoc {
    classes: Vec<Vec<Vec<Point>>>,
    g: usize,
    u: usize,
}

#[derive(Serialize, Deserialize)]
struct FanDoc {
    quads: Vec<Vec<Point>>,
    triples: Vec<Vec<Point>>,
    v: usize,
}

fn multiset_out(ms: &BlockMultiset) -> Vec<(Vec<Point>, u32)> {
    ms.iter()
        .map(|(b, &m)| (b.points().to_vec(), m))
        .collect()
}

fn multiset_in(rows: Vec<(Vec<Point>, u32)>) -> Result<BlockMultiset, DocumentError> {
    let mut ms = BlockMultiset::new();
    for (pts, mult) in rows {
        if mult == 0 {
            return Err(DocumentError::Invalid(
                "block with multiplicity zero".into(),
            ));
        }
        ms.add(Block::new(pts)?, mult);
    }
    Ok(ms)
}

fn blocks_out(blocks: &[Block]) -> Vec<Vec<Point>> {
    blocks.iter().map(|b| b.points().to_vec()).collect()
}

fn blocks_in(rows: Vec<Vec<Point>>) -> Result<Vec<Block>, DocumentError> {
    rows.into_iter()
        .map(|pts| Block::new(pts).map_err(DocumentError::from))
        .collect()
}

fn labels_out(inf1: Point, inf2: Point) -> BTreeMap<String, Point> {
    [("inf1".to_string(), inf1), ("inf2".to_string(), inf2)]
        .into_iter()
        .collect()
}

fn labels_check(labels: &BTreeMap<String, Point>, s_size: usize) -> Result<(), DocumentError> {
    let want = labels_out(s_size as Point, (s_size + 1) as Point);
    if *labels != want {
        return Err(DocumentError::Invalid(format!(
            "label table {labels:?} does not name the two points after the {s_size} ordinary ones"
        )));
    }
    Ok(())
}

fn holed_parts(h: &HoledLargeSet) -> HoledDoc {
    HoledDoc {
        k0: h.profile.k0.iter().copied().collect(),
        k2: h.profile.k2.iter().copied().collect(),
        labels: labels_out(h.inf1(), h.inf2()),
        lambda: h.profile.lambda,
        members: h.members.iter().map(multiset_out).collect(),
        s_size: h.s_size,
    }
}

fn holed_build(doc: HoledDoc) -> Result<HoledLargeSet, DocumentError> {
    labels_check(&doc.labels, doc.s_size)?;
    if doc.lambda == 0 {
        return Err(DocumentError::Invalid("lambda must be positive".into()));
    }
    Ok(HoledLargeSet {
        s_size: doc.s_size,
        profile: HoleProfile {
            lambda: doc.lambda,
            k0: doc.k0.into_iter().collect(),
            k2: doc.k2.into_iter().collect(),
        },
        members: doc
            .members
            .into_iter()
            .map(multiset_in)
            .collect::<Result<_, _>>()?,
    })
}

impl DesignDocument {
    pub fn kind(&self) -> &'static str {
        match &self.body {
            DocumentBody::Gdd { .. } => "gdd",
            DocumentBody::LargeSet(_) => "large_set",
            DocumentBody::Holed(_) => "holed_ls",
            DocumentBody::Gls(_) => "gls",
            DocumentBody::Lr(_) => "lr",
            DocumentBody::Frame(_) => "frame",
            DocumentBody::Fan(_) => "fan",
        }
    }

    fn payload(&self) -> Value {
        let value = match &self.body {
            DocumentBody::Gdd {
                design,
                lambda,
                simple,
            } => serde_json::to_value(GddDoc {
                blocks: multiset_out(&design.blocks),
                g: design.g,
                lambda: *lambda,
                simple: *simple,
                u: design.u,
            }),
            DocumentBody::LargeSet(ls) => serde_json::to_value(LargeSetDoc {
                g: ls.g,
                lambda: ls.lambda,
                members: ls.members.iter().map(multiset_out).collect(),
                u: ls.u,
            }),
            DocumentBody::Holed(h) => serde_json::to_value(holed_parts(h)),
            DocumentBody::Gls(gls) => {
                let parts = holed_parts(&gls.ls);
                serde_json::to_value(GlsDoc {
                    digraphs: gls
                        .digraphs
                        .iter()
                        .map(|d| d.iter().copied().collect())
                        .collect(),
                    k0: parts.k0,
                    k2: parts.k2,
                    labels: parts.labels,
                    lambda: parts.lambda,
                    members: parts.members,
                    s_size: parts.s_size,
                })
            }
            DocumentBody::Lr(lr) => serde_json::to_value(LrDoc {
                members: lr
                    .members
                    .iter()
                    .map(|m| m.classes.iter().map(|c| blocks_out(c)).collect())
                    .collect(),
                v: lr.v,
            }),
            DocumentBody::Frame(f) => serde_json::to_value(FrameDoc {
                classes: f.classes.iter().map(|c| blocks_out(c)).collect(),
                g: f.g,
                u: f.u,
            }),
            DocumentBody::Fan(fan) => serde_json::to_value(FanDoc {
                quads: blocks_out(&fan.quads),
                triples: blocks_out(&fan.triples),
                v: fan.v,
            }),
        };
        value.expect("document payloads always serialise")
    }

    /// Deterministic pretty JSON with sorted keys and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut root = serde_json::Map::new();
        root.insert("format".into(), Value::from(FORMAT));
        root.insert("kind".into(), Value::from(self.kind()));
        root.insert("payload".into(), self.payload());
        let mut text = serde_json::to_string_pretty(&Value::Object(root))
            .expect("document roots always serialise");
        text.push('\n');
        text
    }

    /// Hex SHA-256 of the canonical JSON text.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.to_json().as_bytes());
        format!("{:x}", h.finalize())
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        let root: Value =
            serde_json::from_str(text).map_err(|e| DocumentError::Parse(e.to_string()))?;
        let format = root
            .get("format")
            .and_then(Value::as_u64)
            .ok_or_else(|| DocumentError::Parse("missing format".into()))?;
        if format != FORMAT {
            return Err(DocumentError::UnsupportedFormat(format));
        }
        let kind = root
            .get("kind")
            .and_then(Value::as_str)
            .ok_or_else(|| DocumentError::Parse("missing kind".into()))?;
        let payload = root
            .get("payload")
            .cloned()
            .ok_or_else(|| DocumentError::Parse("missing payload".into()))?;
        let parse = |e: serde_json::Error| DocumentError::Parse(e.to_string());
        let body = match kind {
            "gdd" => {
                let doc: GddDoc = serde_json::from_value(payload).map_err(parse)?;
                DocumentBody::Gdd {
                    design: GroupedDesign {
                        g: doc.g,
                        u: doc.u,
                        blocks: multiset_in(doc.blocks)?,
                    },
                    lambda: doc.lambda,
                    simple: doc.simple,
                }
            }
            "large_set" => {
                let doc: LargeSetDoc = serde_json::from_value(payload).map_err(parse)?;
                DocumentBody::LargeSet(LargeSet {
                    lambda: doc.lambda,
                    g: doc.g,
                    u: doc.u,
                    members: doc
                        .members
                        .into_iter()
                        .map(multiset_in)
                        .collect::<Result<_, _>>()?,
                })
            }
            "holed_ls" => {
                let doc: HoledDoc = serde_json::from_value(payload).map_err(parse)?;
                DocumentBody::Holed(holed_build(doc)?)
            }
            "gls" => {
                let doc: GlsDoc = serde_json::from_value(payload).map_err(parse)?;
                let digraphs: Vec<Digraph> = doc
                    .digraphs
                    .iter()
                    .map(|d| d.iter().copied().collect())
                    .collect();
                for (raw, set) in doc.digraphs.iter().zip(&digraphs) {
                    if raw.len() != set.len() {
                        return Err(DocumentError::Invalid("repeated arc".into()));
                    }
                }
                let holed = holed_build(HoledDoc {
                    k0: doc.k0,
                    k2: doc.k2,
                    labels: doc.labels,
                    lambda: doc.lambda,
                    members: doc.members,
                    s_size: doc.s_size,
                })?;
                if digraphs.len() != holed.members.len() {
                    return Err(DocumentError::Invalid(format!(
                        "{} arc sets for {} members",
                        digraphs.len(),
                        holed.members.len()
                    )));
                }
                DocumentBody::Gls(GoodLargeSet {
                    ls: holed,
                    digraphs,
                })
            }
            "lr" => {
                let doc: LrDoc = serde_json::from_value(payload).map_err(parse)?;
                DocumentBody::Lr(LrDesign {
                    v: doc.v,
                    members: doc
                        .members
                        .into_iter()
                        .map(|classes| {
                            Ok(LrMember {
                                classes: classes
                                    .into_iter()
                                    .map(blocks_in)
                                    .collect::<Result<_, DocumentError>>()?,
                            })
                        })
                        .collect::<Result<_, DocumentError>>()?,
                })
            }
            "frame" => {
                let doc: FrameDoc = serde_json::from_value(payload).map_err(parse)?;
                DocumentBody::Frame(Frame {
                    g: doc.g,
                    u: doc.u,
                    classes: doc
                        .classes
                        .into_iter()
                        .map(blocks_in)
                        .collect::<Result<_, _>>()?,
                })
            }
            "fan" => {
                let doc: FanDoc = serde_json::from_value(payload).map_err(parse)?;
                DocumentBody::Fan(FanDesign {
                    v: doc.v,
                    triples: blocks_in(doc.triples)?,
                    quads: blocks_in(doc.quads)?,
                })
            }
            other => return Err(DocumentError::UnknownKind(other.to_string())),
        };
        Ok(DesignDocument { body })
    }
}

pub fn gdd_document(design: &GroupedDesign, lambda: usize, simple: bool) -> DesignDocument {
    DesignDocument {
        body: DocumentBody::Gdd {
            design: design.clone(),
            lambda,
            simple,
        },
    }
}

pub fn large_set_document(ls: &LargeSet) -> DesignDocument {
    DesignDocument {
        body: DocumentBody::LargeSet(ls.clone()),
    }
}

pub fn holed_document(h: &HoledLargeSet) -> DesignDocument {
    DesignDocument {
        body: DocumentBody::Holed(h.clone()),
    }
}

pub fn gls_document(gls: &GoodLargeSet) -> DesignDocument {
    DesignDocument {
        body: DocumentBody::Gls(gls.clone()),
    }
}

pub fn lr_document(lr: &LrDesign) -> DesignDocument {
    DesignDocument {
        body: DocumentBody::Lr(lr.clone()),
    }
}

pub fn frame_document(f: &Frame) -> DesignDocument {
    DesignDocument {
        body: DocumentBody::Frame(f.clone()),
    }
}

pub fn fan_document(fan: &FanDesign) -> DesignDocument {
    DesignDocument {
        body: DocumentBody::Fan(fan.clone()),
    }
}
