//! Versioned JSON assembly documents.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::assembly::{Assembly, Feature, Mate, MateKind, Part, Provenance};
use crate::error::{Error, Result};
use crate::geom::{AxisLine, RigidTransform, TriangleMesh, Vec3};
use crate::io::json::write_canonical;

pub const SCHEMA_VERSION: u64 = 1;

/// Unit vectors and quaternions must be within this of length one.
const UNIT_EPS: f64 = 1e-6;
/// Quaternions closer than this to unit length are kept bit-for-bit.
const KEEP_EPS: f64 = 1e-12;
const NON_FINITE: &str = "\u{1}non-finite";

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("malformed JSON: {0}")]
    Json(String),

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("non-finite number at `{path}`")]
    NonFinite { path: String },
}

fn schema(path: &str, message: impl Into<String>) -> DocumentError {
    DocumentError::Schema { path: path.to_string(), message: message.into() }
}

type DocResult<T> = std::result::Result<T, DocumentError>;

/// Parses and validates a document.
pub fn assembly_from_json(text: &str) -> DocResult<Assembly> {
    let value: Value =
        serde_json::from_str(&mark_non_finite(text)).map_err(|e| DocumentError::Json(e.to_string()))?;
    read_assembly(&value)
}

pub fn assembly_to_value(a: &Assembly) -> Value {
    let parts: Vec<Value> = a
        .parts
        .iter()
        .map(|p| {
            json!({
                "id": p.id,
                "placement": {
                    "quaternion": p.placement.wxyz(),
                    "translation": arr(&p.placement.translation()),
                },
                "mesh": {
                    "vertices": p.mesh.vertices.iter().map(arr).collect::<Vec<_>>(),
                    "triangles": p.mesh.triangles,
                },
                "features": p.features.iter().map(feature_value).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mates: Vec<Value> = a
        .mates
        .iter()
        .map(|m| {
            json!({
                "id": m.id,
                "part_a": m.part_a,
                "part_b": m.part_b,
                "type": m.kind.tag(),
                "axis": line_value(&m.axis),
                "provenance": m.provenance.as_str(),
            })
        })
        .collect();
    json!({
        "schema_version": SCHEMA_VERSION,
        "id": a.id,
        "parts": parts,
        "mates": mates,
        "metadata": a.metadata,
    })
}

pub fn assembly_to_json(a: &Assembly) -> String {
    write_canonical(&assembly_to_value(a))
}

pub fn load_assembly(path: &Path) -> Result<Assembly> {
    let text = fs::read_to_string(path)?;
    Ok(assembly_from_json(&text)?)
}

/// Writes atomically: a temporary file in the target directory is renamed over `path`.
pub fn save_assembly(a: &Assembly, path: &Path) -> Result<()> {
    write_atomic(path, assembly_to_json(a).as_bytes())
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// A corpus file that could not be loaded.
#[derive(Debug)]
pub struct LoadFailure {
    pub file: PathBuf,
    pub error: Error,
}

/// `*.json` files of a directory, sorted by file name.
pub fn corpus_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Loaded documents with their paths, and the files that failed.
pub type Corpus = (Vec<(PathBuf, Assembly)>, Vec<LoadFailure>);

pub fn load_corpus(dir: &Path) -> Result<Corpus> {
    let mut ok = Vec::new();
    let mut failed = Vec::new();
    for file in corpus_files(dir)? {
        match load_assembly(&file) {
            Ok(a) => ok.push((file, a)),
            Err(error) => failed.push(LoadFailure { file, error }),
        }
    }
    Ok((ok, failed))
}

fn arr(v: &Vec3) -> [f64; 3] {
    [v.x, v.y, v.z]
}

fn line_value(l: &AxisLine) -> Value {
    json!({ "point": arr(&l.point()), "direction": arr(&l.direction()) })
}

fn feature_value(f: &Feature) -> Value {
    match f {
        Feature::PlanarFace { centroid, normal } => {
            json!({ "kind": "planar_face", "centroid": arr(centroid), "normal": arr(normal) })
        }
        Feature::CylindricalFace { axis, radius, extent } => json!({
            "kind": "cylindrical_face",
            "axis": line_value(axis),
            "radius": radius,
            "extent": [extent.0, extent.1],
        }),
    }
}

/// Replaces bare `NaN`/`Infinity` tokens and overflowing literals outside
/// strings with a sentinel string so validation can name the offending field.
fn mark_non_finite(text: &str) -> String {
    let sentinel = Value::String(NON_FINITE.into()).to_string();
    let bytes = text.as_bytes();
    let mut out = String::with_capacity(text.len());
    let mut i = 0;
    let mut copied = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'"' => {
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' {
                    i += if bytes[i] == b'\\' { 2 } else { 1 };
                }
                i += 1;
            }
            b'-' | b'+' | b'0'..=b'9' | b'N' | b'I' => {
                let start = i;
                while i < bytes.len() && matches!(bytes[i], b'0'..=b'9' | b'.' | b'e' | b'E' | b'+' | b'-') {
                    i += 1;
                }
                let word = ["NaN", "Infinity"].iter().find(|w| text[i..].starts_with(**w));
                let non_finite = match word {
                    Some(w) if text[start..i].chars().all(|c| c == '-' || c == '+') && i - start <= 1 => {
                        i += w.len();
                        true
                    }
                    _ => i > start && text[start..i].parse::<f64>().is_ok_and(|v| v.is_infinite()),
                };
                if i == start {
                    i += 1;
                    continue;
                }
                if non_finite {
                    out.push_str(&text[copied..start]);
                    out.push_str(&sentinel);
                    copied = i;
                }
            }
            _ => i += 1,
        }
    }
    out.push_str(&text[copied.min(text.len())..]);
    out
}

fn object<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> DocResult<&'a Map<String, Value>> {
    let map = v.as_object().ok_or_else(|| schema(path, "expected an object"))?;
    if let Some(k) = map.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(schema(&format!("{path}.{k}"), "unknown field"));
    }
    Ok(map)
}

fn field<'a>(m: &'a Map<String, Value>, key: &str, path: &str) -> DocResult<(&'a Value, String)> {
    let sub = format!("{path}.{key}");
    m.get(key).map(|v| (v, sub.clone())).ok_or_else(|| schema(&sub, "missing field"))
}

fn array<'a>(v: &'a Value, path: &str) -> DocResult<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn string(v: &Value, path: &str) -> DocResult<String> {
    match v {
        Value::String(s) if s == NON_FINITE => Err(schema(path, "expected a string")),
        Value::String(s) => Ok(s.clone()),
        _ => Err(schema(path, "expected a string")),
    }
}

fn number(v: &Value, path: &str) -> DocResult<f64> {
    match v {
        Value::String(s) if s == NON_FINITE => Err(DocumentError::NonFinite { path: path.to_string() }),
        Value::Number(n) => n.as_f64().ok_or_else(|| schema(path, "expected a number")),
        _ => Err(schema(path, "expected a number")),
    }
}

fn numbers<const N: usize>(v: &Value, path: &str) -> DocResult<[f64; N]> {
    let items = array(v, path)?;
    if items.len() != N {
        return Err(schema(path, format!("expected {N} numbers, got {}", items.len())));
    }
    let mut out = [0.0; N];
    for (k, item) in items.iter().enumerate() {
        out[k] = number(item, &format!("{path}[{k}]"))?;
    }
    Ok(out)
}

fn vec3(v: &Value, path: &str) -> DocResult<Vec3> {
    Ok(Vec3::from(numbers::<3>(v, path)?))
}

fn unit_vec3(v: &Value, path: &str) -> DocResult<Vec3> {
    let u = vec3(v, path)?;
    if (u.norm() - 1.0).abs() > UNIT_EPS {
        return Err(schema(path, format!("expected a unit vector, length is {}", u.norm())));
    }
    Ok(u)
}

fn read_line(v: &Value, path: &str) -> DocResult<AxisLine> {
    let m = object(v, path, &["point", "direction"])?;
    let (p, pp) = field(m, "point", path)?;
    let (d, dp) = field(m, "direction", path)?;
    let (point, direction) = (vec3(p, &pp)?, unit_vec3(d, &dp)?);
    AxisLine::new(point, direction).map_err(|e| schema(&dp, e.to_string()))
}

fn read_assembly(v: &Value) -> DocResult<Assembly> {
    let root = "$";
    let m = object(v, root, &["schema_version", "id", "parts", "mates", "metadata"])?;
    let (ver, vp) = field(m, "schema_version", root)?;
    if ver.as_u64() != Some(SCHEMA_VERSION) {
        return Err(schema(&vp, format!("unsupported schema version {ver}, expected {SCHEMA_VERSION}")));
    }
    let (id, ip) = field(m, "id", root)?;
    let id = string(id, &ip)?;

    let (parts_v, pp) = field(m, "parts", root)?;
    let parts = array(parts_v, &pp)?
        .iter()
        .enumerate()
        .map(|(i, p)| read_part(p, &format!("{pp}[{i}]")))
        .collect::<DocResult<Vec<_>>>()?;

    let (mates_v, mp) = field(m, "mates", root)?;
    let mates = array(mates_v, &mp)?
        .iter()
        .enumerate()
        .map(|(i, x)| read_mate(x, &format!("{mp}[{i}]")))
        .collect::<DocResult<Vec<_>>>()?;

    let mut metadata = std::collections::BTreeMap::new();
    if let Some(md) = m.get("metadata") {
        let mdp = format!("{root}.metadata");
        let md = md.as_object().ok_or_else(|| schema(&mdp, "expected an object"))?;
        for (k, val) in md {
            metadata.insert(k.clone(), string(val, &format!("{mdp}.{k}"))?);
        }
    }

    let a = Assembly { id, parts, mates, metadata };
    a.validate().map_err(|e| schema(root, e.to_string()))?;
    Ok(a)
}

fn read_part(v: &Value, path: &str) -> DocResult<Part> {
    let m = object(v, path, &["id", "placement", "mesh", "features"])?;
    let (id, ip) = field(m, "id", path)?;
    let id = string(id, &ip)?;

    let (pl, plp) = field(m, "placement", path)?;
    let plm = object(pl, &plp, &["quaternion", "translation"])?;
    let (q, qp) = field(plm, "quaternion", &plp)?;
    let q = numbers::<4>(q, &qp)?;
    let norm = q.iter().map(|c| c * c).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_EPS {
        return Err(schema(&qp, format!("expected a unit quaternion, norm is {norm}")));
    }
    let (t, tp) = field(plm, "translation", &plp)?;
    let t = vec3(t, &tp)?;
    let placement = if (norm - 1.0).abs() <= KEEP_EPS {
        RigidTransform::from_unit_wxyz_unchecked(q, t)
    } else {
        RigidTransform::from_wxyz(q, t)
    };

    let (mesh_v, mp) = field(m, "mesh", path)?;
    let mm = object(mesh_v, &mp, &["vertices", "triangles"])?;
    let (verts, vp) = field(mm, "vertices", &mp)?;
    let vertices = array(verts, &vp)?
        .iter()
        .enumerate()
        .map(|(k, x)| vec3(x, &format!("{vp}[{k}]")))
        .collect::<DocResult<Vec<_>>>()?;
    let (tris, tp) = field(mm, "triangles", &mp)?;
    let triangles = array(tris, &tp)?
        .iter()
        .enumerate()
        .map(|(k, x)| read_triangle(x, &format!("{tp}[{k}]")))
        .collect::<DocResult<Vec<_>>>()?;
    let mesh = TriangleMesh::new(vertices, triangles).map_err(|e| schema(&mp, e.to_string()))?;

    let (feats, fp) = field(m, "features", path)?;
    let features = array(feats, &fp)?
        .iter()
        .enumerate()
        .map(|(k, x)| read_feature(x, &format!("{fp}[{k}]")))
        .collect::<DocResult<Vec<_>>>()?;

    Ok(Part { id, mesh, features, placement })
}

fn read_triangle(v: &Value, path: &str) -> DocResult<[u32; 3]> {
    let items = array(v, path)?;
    if items.len() != 3 {
        return Err(schema(path, "expected 3 vertex indices"));
    }
    let mut out = [0u32; 3];
    for (k, item) in items.iter().enumerate() {
        out[k] = item
            .as_u64()
            .and_then(|x| u32::try_from(x).ok())
            .ok_or_else(|| schema(&format!("{path}[{k}]"), "expected a vertex index"))?;
    }
    Ok(out)
}

fn read_feature(v: &Value, path: &str) -> DocResult<Feature> {
    let kind = v
        .get("kind")
        .ok_or_else(|| schema(&format!("{path}.kind"), "missing field"))
        .and_then(|k| string(k, &format!("{path}.kind")))?;
    match kind.as_str() {
        "planar_face" => {
            let m = object(v, path, &["kind", "centroid", "normal"])?;
            let (c, cp) = field(m, "centroid", path)?;
            let (n, np) = field(m, "normal", path)?;
            Feature::planar(vec3(c, &cp)?, unit_vec3(n, &np)?).map_err(|e| schema(path, e.to_string()))
        }
        "cylindrical_face" => {
            let m = object(v, path, &["kind", "axis", "radius", "extent"])?;
            let (ax, ap) = field(m, "axis", path)?;
            let am = object(ax, &ap, &["point", "direction"])?;
            let (p, pp) = field(am, "point", &ap)?;
            let (d, dp) = field(am, "direction", &ap)?;
            let (r, rp) = field(m, "radius", path)?;
            let (e, ep) = field(m, "extent", path)?;
            let [lo, hi] = numbers::<2>(e, &ep)?;
            Feature::cylinder_on_axis(vec3(p, &pp)?, unit_vec3(d, &dp)?, number(r, &rp)?, (lo, hi))
                .map_err(|e| schema(path, e.to_string()))
        }
        other => Err(schema(&format!("{path}.kind"), format!("unknown feature kind `{other}`"))),
    }
}

fn read_mate(v: &Value, path: &str) -> DocResult<Mate> {
    let m = object(v, path, &["id", "part_a", "part_b", "type", "axis", "provenance"])?;
    let get_str = |key: &str| -> DocResult<String> {
        let (x, p) = field(m, key, path)?;
        string(x, &p)
    };
    let (id, part_a, part_b, tag) = (get_str("id")?, get_str("part_a")?, get_str("part_b")?, get_str("type")?);
    if tag.is_empty() {
        return Err(schema(&format!("{path}.type"), "empty mate type"));
    }
    let (ax, ap) = field(m, "axis", path)?;
    let axis = read_line(ax, &ap)?;
    let provenance = match m.get("provenance") {
        None => Provenance::Original,
        Some(p) => {
            let pp = format!("{path}.provenance");
            string(p, &pp)?.parse().map_err(|s| schema(&pp, format!("unknown provenance `{s}`")))?
        }
    };
    Ok(Mate { id, part_a, part_b, kind: MateKind::from_tag(&tag), axis, provenance })
}
