//! File exports: CSV, sorted pretty JSON, GraphML, JSON adjacency and
//! GeoJSON, plus atomic writes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use crate::categorize::Gazetteer;
use crate::error::{Error, Result};
use crate::wordgraph::{PlaceGraph, Split, WordGraph};

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// RFC 4180 CSV with a header row.
pub fn csv_string<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Stage {
        stage: "export".into(),
        message: e.to_string(),
    })?;
    String::from_utf8(bytes).map_err(|e| Error::Stage {
        stage: "export".into(),
        message: e.to_string(),
    })
}

/// Pretty JSON with object keys sorted, newline-terminated.
pub fn pretty_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let value = serde_json::to_value(value).map_err(json_err)?;
    let mut s = serde_json::to_string_pretty(&value).map_err(json_err)?;
    s.push('\n');
    Ok(s)
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Stage {
        stage: "export".into(),
        message: e.to_string(),
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Attribute value attached to a GraphML node.
#[derive(Debug, Clone, PartialEq)]
pub enum AttrValue {
    Int(i64),
    Float(f64),
    Text(String),
}

impl AttrValue {
    fn graphml_type(&self) -> &'static str {
        match self {
            AttrValue::Int(_) => "long",
            AttrValue::Float(_) => "double",
            AttrValue::Text(_) => "string",
        }
    }

    fn render(&self) -> String {
        match self {
            AttrValue::Int(v) => v.to_string(),
            AttrValue::Float(v) => format!("{v}"),
            AttrValue::Text(v) => xml_escape(v),
        }
    }
}

/// Generic undirected GraphML document. Every node carries the same
/// attribute names; declared key types come from the first node.
pub fn graphml(
    nodes: &[(String, BTreeMap<String, AttrValue>)],
    edges: impl IntoIterator<Item = (String, String, u32)>,
) -> String {
    let mut out = String::from(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n\
         <graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
    );
    let keys: Vec<(&String, &AttrValue)> = nodes.first().map(|(_, a)| a.iter().collect()).unwrap_or_default();
    for (name, value) in &keys {
        let _ = writeln!(
            out,
            "  <key id=\"{n}\" for=\"node\" attr.name=\"{n}\" attr.type=\"{}\"/>",
            value.graphml_type(),
            n = xml_escape(name)
        );
    }
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    out.push_str("  <graph edgedefault=\"undirected\">\n");
    for (id, attrs) in nodes {
        let _ = writeln!(out, "    <node id=\"{}\">", xml_escape(id));
        for (name, value) in attrs {
            let _ = writeln!(out, "      <data key=\"{}\">{}</data>", xml_escape(name), value.render());
        }
        out.push_str("    </node>\n");
    }
    for (u, v, w) in edges {
        let _ = writeln!(
            out,
            "    <edge source=\"{}\" target=\"{}\"><data key=\"weight\">{w}</data></edge>",
            xml_escape(&u),
            xml_escape(&v)
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// GraphML for a word graph; `metrics` adds per-node score attributes.
pub fn word_graph_graphml(wg: &WordGraph, metrics: &BTreeMap<String, BTreeMap<String, f64>>) -> String {
    let nodes: Vec<(String, BTreeMap<String, AttrValue>)> = wg
        .nodes
        .iter()
        .map(|(word, &freq)| {
            let mut attrs = BTreeMap::from([("frequency".to_owned(), AttrValue::Int(freq.into()))]);
            if let Some(scores) = metrics.get(word) {
                attrs.extend(scores.iter().map(|(k, &v)| (k.clone(), AttrValue::Float(v))));
            }
            (word.clone(), attrs)
        })
        .collect();
    graphml(&nodes, wg.edges.iter().map(|((u, v), &w)| (u.clone(), v.clone(), w)))
}

/// `{"nodes": {word: frequency}, "adjacency": {word: {neighbour: weight}}}`.
pub fn word_graph_json(wg: &WordGraph) -> Value {
    let mut adjacency: BTreeMap<&str, BTreeMap<&str, u32>> = wg.nodes.keys().map(|k| (k.as_str(), BTreeMap::new())).collect();
    for ((u, v), &w) in &wg.edges {
        adjacency.entry(u).or_default().insert(v, w);
        adjacency.entry(v).or_default().insert(u, w);
    }
    json!({
        "split": wg.split.map(|s| s.to_string()),
        "nodes": wg.nodes,
        "adjacency": adjacency,
    })
}

/// Inverse of [`word_graph_json`].
pub fn word_graph_from_json(value: &Value) -> std::result::Result<WordGraph, String> {
    let split = match &value["split"] {
        Value::Null => None,
        Value::String(s) => Some(
            Split::all()
                .into_iter()
                .find(|sp| sp.to_string() == *s)
                .ok_or_else(|| format!("unknown split {s:?}"))?,
        ),
        other => return Err(format!("bad split {other}")),
    };
    let nodes: BTreeMap<String, u32> =
        serde_json::from_value(value["nodes"].clone()).map_err(|e| format!("nodes: {e}"))?;
    let adjacency: BTreeMap<String, BTreeMap<String, u32>> =
        serde_json::from_value(value["adjacency"].clone()).map_err(|e| format!("adjacency: {e}"))?;
    let mut edges = BTreeMap::new();
    for (u, row) in &adjacency {
        if !nodes.contains_key(u) {
            return Err(format!("adjacency names unknown node {u:?}"));
        }
        for (v, &w) in row {
            if u < v {
                edges.insert((u.clone(), v.clone()), w);
            } else if adjacency.get(v).and_then(|r| r.get(u)) != Some(&w) {
                return Err(format!("asymmetric edge {u:?}-{v:?}"));
            }
        }
    }
    Ok(WordGraph {
        nodes,
        edges,
        split,
        truncated_tweets: 0,
    })
}

pub fn place_graph_graphml(pg: &PlaceGraph) -> String {
    let nodes: Vec<(String, BTreeMap<String, AttrValue>)> = pg
        .nodes
        .iter()
        .map(|n| {
            let attrs = BTreeMap::from([
                ("kind".to_owned(), AttrValue::Text(n.kind.as_str().to_owned())),
                ("mentions".to_owned(), AttrValue::Int(n.mentions.into())),
                ("degree".to_owned(), AttrValue::Int(n.degree as i64)),
                ("degree_centrality".to_owned(), AttrValue::Float(n.degree_centrality)),
                ("closeness".to_owned(), AttrValue::Float(n.closeness)),
            ]);
            (n.name.clone(), attrs)
        })
        .collect();
    graphml(&nodes, pg.edges.iter().map(|((u, v), &w)| (u.clone(), v.clone(), w)))
}

pub fn place_graph_json(pg: &PlaceGraph) -> Value {
    let edges: Vec<Value> = pg
        .edges
        .iter()
        .map(|((city, attraction), w)| json!({"city": city, "attraction": attraction, "weight": w}))
        .collect();
    json!({"nodes": pg.nodes, "edges": edges})
}

/// FeatureCollection of place Points and connection LineStrings. Places
/// without coordinates are skipped and returned by name.
pub fn export_geojson(pg: &PlaceGraph, gazetteer: &Gazetteer, sentiment: &BTreeMap<String, f64>) -> (Value, Vec<String>) {
    let coords = |name: &str| {
        gazetteer
            .get(name)
            .and_then(|p| Some((p.lon?, p.lat?)))
    };
    let mut features = Vec::new();
    let mut skipped = Vec::new();
    for node in &pg.nodes {
        let Some((lon, lat)) = coords(&node.name) else {
            log::warn!("place {} has no coordinates; skipped in GeoJSON", node.name);
            skipped.push(node.name.clone());
            continue;
        };
        features.push(json!({
            "type": "Feature",
            "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": {
                "name": node.name,
                "kind": node.kind.as_str(),
                "mentions": node.mentions,
                "degree": node.degree,
                "closeness": node.closeness,
                "mean_sentiment": sentiment.get(&node.name),
            },
        }));
    }
    for ((city, attraction), &weight) in &pg.edges {
        if let (Some(a), Some(b)) = (coords(city), coords(attraction)) {
            features.push(json!({
                "type": "Feature",
                "geometry": {"type": "LineString", "coordinates": [[a.0, a.1], [b.0, b.1]]},
                "properties": {"source": city, "target": attraction, "weight": weight},
            }));
        }
    }
    (json!({"type": "FeatureCollection", "features": features}), skipped)
}
