//! Workspace files, reports and the command layer behind the `sheafkit`
//! binary.
//!
//! A workspace is one JSON document: a topology block, any number of named
//! presheaf and cover blocks, and an optional entanglement scenario.
//! Presheaf restrictions are supplied on Hasse edges of the inclusion poset
//! only; the loader composes the rest and then audits the functor laws.
//! All output is canonical: keys sorted, opens in canonical order, so files
//! and reports are byte-stable across runs.
//!
//! Exit codes: 0 success, 1 parse or I/O error, 2 domain failure.

use crate::algebra::{bigint_from_json, bigint_to_json, IntMatrix};
use crate::cech::{cohomology, CohomologyResult};
use crate::epr::{
    run_demo, DemoScenario, Entity, GeneralizedTimeCategory, TimePresheaf,
};
use crate::presheaf::Presheaf;
use crate::topology::{check_cover, Cover, FiniteTopology, OpenId, DEFAULT_MAX_POINTS};
use num_bigint::BigInt;
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_DOMAIN: i32 = 2;

const FORMAT_VERSION: u32 = 1;

/// Flat row-major integer list; entries that exceed i64 round-trip as
/// decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MatrixEntries(pub Vec<BigInt>);

impl Serialize for MatrixEntries {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(bigint_to_json))
    }
}

impl<'de> Deserialize<'de> for MatrixEntries {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw: Vec<Value> = Vec::deserialize(deserializer)?;
        let mut out = Vec::with_capacity(raw.len());
        for v in &raw {
            let x = bigint_from_json(v).ok_or_else(|| {
                serde::de::Error::custom(format!("matrix entry {v} is not an integer"))
            })?;
            out.push(x);
        }
        Ok(MatrixEntries(out))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TopologyBlock {
    pub points: Vec<String>,
    pub opens: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RestrictionEntry {
    /// File index of the larger open U.
    pub from: usize,
    /// File index of the smaller open V ⊆ U.
    pub to: usize,
    pub matrix: MatrixEntries,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixAt {
    pub open: usize,
    pub matrix: MatrixEntries,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresheafBlock {
    pub name: String,
    /// Rank per open, aligned with the topology block's open list.
    pub ranks: Vec<usize>,
    /// Restriction matrices on Hasse edges of the inclusion poset.
    pub restrictions: Vec<RestrictionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sheafification_of: Option<String>,
    /// Unit matrices η_U per open, present on sheafified output.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub units: Option<Vec<MatrixAt>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverBlock {
    pub name: String,
    pub covered: usize,
    pub parts: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioEntityBlock {
    pub name: String,
    pub micro: String,
    #[serde(rename = "macro")]
    pub macro_world: String,
    /// Rational time stamps aligned with the chain, e.g. "0", "1/2".
    pub tau: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioBlock {
    /// Nested chain of time periods, by file open index.
    pub chain: Vec<usize>,
    pub positions: Vec<String>,
    pub observed: ScenarioEntityBlock,
    pub partner: ScenarioEntityBlock,
    pub observer: ScenarioEntityBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlation: Option<Vec<MatrixAt>>,
    pub candidate: Vec<MatrixAt>,
    pub observation_open: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorkspaceFile {
    pub format: u32,
    pub topology: TopologyBlock,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub presheaves: Vec<PresheafBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub covers: Vec<CoverBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioBlock>,
}

impl WorkspaceFile {
    pub fn parse(contents: &str) -> Result<Self, String> {
        let file: WorkspaceFile = serde_json::from_str(contents)
            .map_err(|e| format!("line {}, column {}: {}", e.line(), e.column(), e))?;
        if file.format != FORMAT_VERSION {
            return Err(format!(
                "unsupported format version {} (expected {})",
                file.format, FORMAT_VERSION
            ));
        }
        Ok(file)
    }

    /// Canonical serialization: object keys sorted (serde_json maps are
    /// ordered), trailing newline, stable across runs.
    pub fn to_canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("workspace files serialize");
        let mut text = serde_json::to_string_pretty(&value).expect("valid JSON value");
        text.push('\n');
        text
    }
}

/// A compiled workspace: validated topology, presheaves composed from
/// Hasse-edge input and audited against the functor laws, checked covers.
pub struct Workspace {
    pub topology: Arc<FiniteTopology>,
    /// File open index → canonical open id.
    pub open_map: Vec<OpenId>,
    pub presheaves: BTreeMap<String, Presheaf>,
    pub covers: BTreeMap<String, Cover>,
    pub scenario: Option<ScenarioBlock>,
}

/// A domain-level compilation failure with witness lines.
#[derive(Debug, Clone)]
pub struct DomainFailure {
    pub witnesses: Vec<String>,
}

impl DomainFailure {
    fn new(witness: impl Into<String>) -> Self {
        DomainFailure {
            witnesses: vec![witness.into()],
        }
    }
}

pub fn compile(file: &WorkspaceFile, max_points: usize) -> Result<Workspace, DomainFailure> {
    // Duplicate opens would make rank lists ambiguous.
    for (i, a) in file.topology.opens.iter().enumerate() {
        let mut sa = a.clone();
        sa.sort();
        sa.dedup();
        for b in file.topology.opens.iter().skip(i + 1) {
            let mut sb = b.clone();
            sb.sort();
            sb.dedup();
            if sa == sb {
                return Err(DomainFailure::new(format!(
                    "duplicate open set {{{}}} in topology block",
                    sa.join(", ")
                )));
            }
        }
    }
    let topology = FiniteTopology::with_max_points(
        file.topology.points.clone(),
        file.topology.opens.clone(),
        max_points,
    )
    .map_err(|e| DomainFailure::new(e.to_string()))?;
    let topology = Arc::new(topology);

    let mut open_map = Vec::with_capacity(file.topology.opens.len());
    for open in &file.topology.opens {
        let members: Vec<&str> = open.iter().map(String::as_str).collect();
        let id = topology
            .find_open(&members)
            .expect("validated opens are indexed");
        open_map.push(id);
    }

    let mut presheaves = BTreeMap::new();
    for block in &file.presheaves {
        if presheaves.contains_key(&block.name) {
            return Err(DomainFailure::new(format!(
                "duplicate presheaf name `{}`",
                block.name
            )));
        }
        let presheaf = compile_presheaf(&topology, &open_map, block)?;
        let audit = presheaf.validate();
        if !audit.is_valid() {
            let mut witnesses = Vec::new();
            for u in &audit.identity_violations {
                witnesses.push(format!(
                    "presheaf `{}`: restriction at {} is not the identity",
                    block.name,
                    topology.format_open(*u)
                ));
            }
            for (w, v, u) in &audit.composition_violations {
                witnesses.push(format!(
                    "presheaf `{}`: composition law fails on {} ⊆ {} ⊆ {}",
                    block.name,
                    topology.format_open(*w),
                    topology.format_open(*v),
                    topology.format_open(*u)
                ));
            }
            return Err(DomainFailure { witnesses });
        }
        presheaves.insert(block.name.clone(), presheaf);
    }

    let mut covers = BTreeMap::new();
    for block in &file.covers {
        if covers.contains_key(&block.name) {
            return Err(DomainFailure::new(format!(
                "duplicate cover name `{}`",
                block.name
            )));
        }
        let covered = *open_map.get(block.covered).ok_or_else(|| {
            DomainFailure::new(format!(
                "cover `{}`: open index {} out of range",
                block.name, block.covered
            ))
        })?;
        let mut parts = Vec::with_capacity(block.parts.len());
        for &p in &block.parts {
            parts.push(*open_map.get(p).ok_or_else(|| {
                DomainFailure::new(format!(
                    "cover `{}`: open index {p} out of range",
                    block.name
                ))
            })?);
        }
        let cover = Cover { covered, parts };
        let report = check_cover(&topology, &cover);
        if !report.is_valid() {
            let mut witnesses = Vec::new();
            if !report.uncovered.is_empty() {
                witnesses.push(format!(
                    "cover `{}` misses points {{{}}}",
                    block.name,
                    report.uncovered.join(", ")
                ));
            }
            for part in report.overflowing_parts {
                witnesses.push(format!(
                    "cover `{}`: part {} is not contained in {}",
                    block.name,
                    topology.format_open(part),
                    topology.format_open(covered)
                ));
            }
            return Err(DomainFailure { witnesses });
        }
        covers.insert(block.name.clone(), cover);
    }

    Ok(Workspace {
        topology,
        open_map,
        presheaves,
        covers,
        scenario: file.scenario.clone(),
    })
}

fn compile_presheaf(
    topology: &Arc<FiniteTopology>,
    open_map: &[OpenId],
    block: &PresheafBlock,
) -> Result<Presheaf, DomainFailure> {
    if block.ranks.len() != open_map.len() {
        return Err(DomainFailure::new(format!(
            "presheaf `{}`: {} ranks for {} opens",
            block.name,
            block.ranks.len(),
            open_map.len()
        )));
    }
    let mut ranks = vec![0usize; topology.open_count()];
    for (file_idx, &rank) in block.ranks.iter().enumerate() {
        ranks[open_map[file_idx].0] = rank;
    }
    let mut edges = BTreeMap::new();
    for entry in &block.restrictions {
        let larger = *open_map.get(entry.from).ok_or_else(|| {
            DomainFailure::new(format!(
                "presheaf `{}`: open index {} out of range",
                block.name, entry.from
            ))
        })?;
        let smaller = *open_map.get(entry.to).ok_or_else(|| {
            DomainFailure::new(format!(
                "presheaf `{}`: open index {} out of range",
                block.name, entry.to
            ))
        })?;
        let rows = ranks[smaller.0];
        let cols = ranks[larger.0];
        let matrix = IntMatrix::new(rows, cols, entry.matrix.0.clone()).map_err(|_| {
            DomainFailure::new(format!(
                "presheaf `{}`: restriction {} → {} needs {}x{} = {} entries, got {}",
                block.name,
                topology.format_open(larger),
                topology.format_open(smaller),
                rows,
                cols,
                rows * cols,
                entry.matrix.0.len()
            ))
        })?;
        if edges.insert((smaller, larger), matrix).is_some() {
            return Err(DomainFailure::new(format!(
                "presheaf `{}`: duplicate restriction for {} ⊆ {}",
                block.name,
                topology.format_open(smaller),
                topology.format_open(larger)
            )));
        }
    }
    Presheaf::from_hasse_edges(topology.clone(), ranks, edges)
        .map_err(|e| DomainFailure::new(format!("presheaf `{}`: {e}", block.name)))
}

/// Command report: one structure behind both the human and the machine
/// rendering, so the two always carry the same facts.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub status: &'static str,
    pub failures: Vec<String>,
    pub payload: Value,
}

impl Report {
    fn ok(command: String, digest: String, payload: Value) -> Self {
        Report {
            command,
            input_digest: digest,
            status: "ok",
            failures: Vec::new(),
            payload,
        }
    }

    fn failed(command: String, digest: String, failures: Vec<String>, payload: Value) -> Self {
        Report {
            command,
            input_digest: digest,
            status: "failed",
            failures,
            payload,
        }
    }

    pub fn machine_json(&self) -> String {
        let value = json!({
            "tool": "sheafkit",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "input": self.input_digest,
            "status": self.status,
            "failures": self.failures,
            "payload": self.payload,
        });
        let mut text = serde_json::to_string_pretty(&value).expect("reports serialize");
        text.push('\n');
        text
    }

    pub fn human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("sheafkit {} — {}\n", self.command, self.status));
        out.push_str(&format!("version: {}\n", env!("CARGO_PKG_VERSION")));
        out.push_str(&format!("input: {}\n", self.input_digest));
        let mut payload = self.payload.clone();
        let mut transcript_shown = false;
        if let Value::Object(map) = &mut payload {
            if let Some(Value::String(transcript)) = map.remove("transcript") {
                out.push('\n');
                out.push_str(&transcript);
                // the transcript is the human rendering of the remaining
                // payload; don't repeat it
                transcript_shown = true;
            }
        }
        if !transcript_shown && payload != Value::Object(Map::new()) && payload != Value::Null {
            render_value(&payload, 0, &mut out);
        }
        if !self.failures.is_empty() {
            out.push_str("failures:\n");
            for f in &self.failures {
                out.push_str(&format!("  - {f}\n"));
            }
        }
        out
    }
}

fn scalar_text(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("null".to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.is_empty() => Some("[]".to_string()),
        Value::Array(a) if a.iter().all(|x| x.is_number()) => {
            let cells: Vec<String> = a.iter().map(|x| x.to_string()).collect();
            Some(format!("[{}]", cells.join(", ")))
        }
        Value::Object(o) if o.is_empty() => Some("{}".to_string()),
        _ => None,
    }
}

fn render_value(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (key, val) in map {
                if let Some(s) = scalar_text(val) {
                    out.push_str(&format!("{pad}{key}: {s}\n"));
                } else {
                    out.push_str(&format!("{pad}{key}:\n"));
                    render_value(val, indent + 2, out);
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                if let Some(s) = scalar_text(item) {
                    out.push_str(&format!("{pad}- {s}\n"));
                } else {
                    let mut inner = String::new();
                    render_value(item, indent + 2, &mut inner);
                    // pull the first line onto the dash
                    if let Some(first_newline) = inner.find('\n') {
                        let first = &inner[..first_newline];
                        out.push_str(&format!("{pad}- {}\n", first.trim_start()));
                        out.push_str(&inner[first_newline + 1..]);
                    }
                }
            }
        }
        other => {
            let s = scalar_text(other).unwrap_or_else(|| other.to_string());
            out.push_str(&format!("{pad}{s}\n"));
        }
    }
}

pub struct CmdOutcome {
    pub report: Report,
    pub exit_code: i32,
}

fn digest_of(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("sha256:{:x}", hasher.finalize())
}

enum Loaded {
    Ok(WorkspaceFile, String),
    Failed(CmdOutcome),
}

fn load_file(command: &str, path: &Path) -> Loaded {
    let bytes = match std::fs::read(path) {
        Ok(b) => b,
        Err(e) => {
            let report = Report::failed(
                command.to_string(),
                "sha256:unavailable".to_string(),
                vec![format!("cannot read {}: {e}", path.display())],
                Value::Null,
            );
            return Loaded::Failed(CmdOutcome {
                report,
                exit_code: EXIT_PARSE,
            });
        }
    };
    let digest = digest_of(&bytes);
    let contents = match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => {
            let report = Report::failed(
                command.to_string(),
                digest,
                vec![format!("{} is not UTF-8: {e}", path.display())],
                Value::Null,
            );
            return Loaded::Failed(CmdOutcome {
                report,
                exit_code: EXIT_PARSE,
            });
        }
    };
    match WorkspaceFile::parse(&contents) {
        Ok(file) => Loaded::Ok(file, digest),
        Err(message) => {
            let report = Report::failed(
                command.to_string(),
                digest,
                vec![format!("parse error: {message}")],
                Value::Null,
            );
            Loaded::Failed(CmdOutcome {
                report,
                exit_code: EXIT_PARSE,
            })
        }
    }
}

fn domain_failure(command: String, digest: String, failure: DomainFailure) -> CmdOutcome {
    CmdOutcome {
        report: Report::failed(command, digest, failure.witnesses, Value::Null),
        exit_code: EXIT_DOMAIN,
    }
}

/// `sheafkit validate <file>`: topology axioms, presheaf functor laws and
/// cover axioms for every block in the file.
pub fn cmd_validate(path: &Path, max_points: usize) -> CmdOutcome {
    let command = format!("validate {}", path.display());
    let (file, digest) = match load_file(&command, path) {
        Loaded::Ok(f, d) => (f, d),
        Loaded::Failed(out) => return out,
    };
    match compile(&file, max_points) {
        Err(failure) => domain_failure(command, digest, failure),
        Ok(ws) => {
            let payload = json!({
                "topology": {
                    "points": ws.topology.points().len(),
                    "opens": ws.topology.open_count(),
                },
                "presheaves": ws
                    .presheaves
                    .keys()
                    .map(|name| json!({"name": name, "valid": true}))
                    .collect::<Vec<_>>(),
                "covers": ws
                    .covers
                    .keys()
                    .map(|name| json!({"name": name, "valid": true}))
                    .collect::<Vec<_>>(),
            });
            CmdOutcome {
                report: Report::ok(command, digest, payload),
                exit_code: EXIT_OK,
            }
        }
    }
}

/// `sheafkit check-sheaf <file> --presheaf NAME`
pub fn cmd_check_sheaf(path: &Path, presheaf: &str, max_points: usize) -> CmdOutcome {
    let command = format!("check-sheaf {} --presheaf {presheaf}", path.display());
    let (file, digest) = match load_file(&command, path) {
        Loaded::Ok(f, d) => (f, d),
        Loaded::Failed(out) => return out,
    };
    let ws = match compile(&file, max_points) {
        Ok(ws) => ws,
        Err(failure) => return domain_failure(command, digest, failure),
    };
    let Some(p) = ws.presheaves.get(presheaf) else {
        return domain_failure(
            command,
            digest,
            DomainFailure::new(format!("unknown presheaf `{presheaf}`")),
        );
    };
    let report = p.is_sheaf();
    let failures_json: Vec<Value> = report
        .failures
        .iter()
        .map(|f| {
            json!({
                "open": ws.topology.format_open(f.open),
                "kind": f.kind.as_str(),
            })
        })
        .collect();
    let payload = json!({
        "presheaf": presheaf,
        "sheaf": report.is_sheaf(),
        "violations": failures_json,
    });
    if report.is_sheaf() {
        CmdOutcome {
            report: Report::ok(command, digest, payload),
            exit_code: EXIT_OK,
        }
    } else {
        let witnesses: Vec<String> = report
            .failures
            .iter()
            .map(|f| {
                format!(
                    "not a sheaf: {} failure at {}",
                    f.kind.as_str(),
                    ws.topology.format_open(f.open)
                )
            })
            .collect();
        CmdOutcome {
            report: Report::failed(command, digest, witnesses, payload),
            exit_code: EXIT_DOMAIN,
        }
    }
}

/// `sheafkit sheafify <file> --presheaf NAME -o OUT`: writes a canonical
/// workspace containing the sheafified presheaf and its unit matrices.
pub fn cmd_sheafify(path: &Path, presheaf: &str, out_path: &Path, max_points: usize) -> CmdOutcome {
    let command = format!(
        "sheafify {} --presheaf {presheaf} -o {}",
        path.display(),
        out_path.display()
    );
    let (file, digest) = match load_file(&command, path) {
        Loaded::Ok(f, d) => (f, d),
        Loaded::Failed(out) => return out,
    };
    let ws = match compile(&file, max_points) {
        Ok(ws) => ws,
        Err(failure) => return domain_failure(command, digest, failure),
    };
    let Some(p) = ws.presheaves.get(presheaf) else {
        return domain_failure(
            command,
            digest,
            DomainFailure::new(format!("unknown presheaf `{presheaf}`")),
        );
    };
    let sheafified = p.sheafify();
    let out_file = sheafified_workspace(&ws, presheaf, &sheafified);
    let text = out_file.to_canonical_json();
    if let Err(e) = std::fs::write(out_path, &text) {
        let report = Report::failed(
            command,
            digest,
            vec![format!("cannot write {}: {e}", out_path.display())],
            Value::Null,
        );
        return CmdOutcome {
            report,
            exit_code: EXIT_PARSE,
        };
    }
    let ranks: Vec<Value> = ws
        .topology
        .open_ids()
        .map(|u| {
            json!({
                "open": ws.topology.format_open(u),
                "rank": sheafified.sheaf.rank(u),
                "unit_isomorphism": sheafified.units[u.0].is_unimodular(),
            })
        })
        .collect();
    let payload = json!({
        "presheaf": presheaf,
        "output": out_path.display().to_string(),
        "sheafified_name": format!("{presheaf}+"),
        "values": ranks,
    });
    CmdOutcome {
        report: Report::ok(command, digest, payload),
        exit_code: EXIT_OK,
    }
}

fn sheafified_workspace(
    ws: &Workspace,
    name: &str,
    sheafified: &crate::presheaf::Sheafification,
) -> WorkspaceFile {
    let topology = &ws.topology;
    let points = topology.points().to_vec();
    let opens: Vec<Vec<String>> = topology
        .open_ids()
        .map(|u| {
            topology
                .open_members(u)
                .into_iter()
                .map(str::to_string)
                .collect()
        })
        .collect();
    let sheaf = &sheafified.sheaf;
    let ranks: Vec<usize> = topology.open_ids().map(|u| sheaf.rank(u)).collect();
    let mut restrictions = Vec::new();
    for (v, u) in topology.hasse_edges() {
        let m = sheaf.restriction(v, u).expect("sheafified presheaf is total");
        restrictions.push(RestrictionEntry {
            from: u.0,
            to: v.0,
            matrix: MatrixEntries(m.entries().to_vec()),
        });
    }
    restrictions.sort_by_key(|r| (r.from, r.to));
    let units: Vec<MatrixAt> = topology
        .open_ids()
        .map(|u| MatrixAt {
            open: u.0,
            matrix: MatrixEntries(sheafified.units[u.0].entries().to_vec()),
        })
        .collect();
    let covers: Vec<CoverBlock> = ws
        .covers
        .iter()
        .map(|(cover_name, cover)| CoverBlock {
            name: cover_name.clone(),
            covered: cover.covered.0,
            parts: cover.parts.iter().map(|p| p.0).collect(),
        })
        .collect();
    WorkspaceFile {
        format: FORMAT_VERSION,
        topology: TopologyBlock { points, opens },
        presheaves: vec![PresheafBlock {
            name: format!("{name}+"),
            ranks,
            restrictions,
            sheafification_of: Some(name.to_string()),
            units: Some(units),
        }],
        covers,
        scenario: None,
    }
}

pub enum CoverChoice<'a> {
    Named(&'a str),
    Minimal,
}

/// `sheafkit cohomology <file> --presheaf NAME [--cover NAME | --minimal]`
pub fn cmd_cohomology(
    path: &Path,
    presheaf: &str,
    choice: CoverChoice<'_>,
    max_points: usize,
) -> CmdOutcome {
    let cover_label = match &choice {
        CoverChoice::Named(n) => format!("--cover {n}"),
        CoverChoice::Minimal => "--minimal".to_string(),
    };
    let command = format!(
        "cohomology {} --presheaf {presheaf} {cover_label}",
        path.display()
    );
    let (file, digest) = match load_file(&command, path) {
        Loaded::Ok(f, d) => (f, d),
        Loaded::Failed(out) => return out,
    };
    let ws = match compile(&file, max_points) {
        Ok(ws) => ws,
        Err(failure) => return domain_failure(command, digest, failure),
    };
    let Some(p) = ws.presheaves.get(presheaf) else {
        return domain_failure(
            command,
            digest,
            DomainFailure::new(format!("unknown presheaf `{presheaf}`")),
        );
    };
    let cover = match choice {
        CoverChoice::Named(name) => match ws.covers.get(name) {
            Some(c) => c.clone(),
            None => {
                return domain_failure(
                    command,
                    digest,
                    DomainFailure::new(format!("unknown cover `{name}`")),
                );
            }
        },
        CoverChoice::Minimal => ws.topology.minimal_open_cover(ws.topology.full_open()),
    };
    let result = match cohomology(p, &cover) {
        Ok(r) => r,
        Err(e) => {
            return domain_failure(command, digest, DomainFailure::new(e.to_string()));
        }
    };
    let payload = cohomology_payload(&ws.topology, presheaf, &result);
    CmdOutcome {
        report: Report::ok(command, digest, payload),
        exit_code: EXIT_OK,
    }
}

fn cohomology_payload(
    topology: &FiniteTopology,
    presheaf: &str,
    result: &CohomologyResult,
) -> Value {
    let groups: Vec<Value> = result
        .groups
        .iter()
        .enumerate()
        .map(|(degree, g)| {
            json!({
                "degree": degree,
                "betti": g.betti(),
                "torsion": g.torsion().iter().map(bigint_to_json).collect::<Vec<_>>(),
                "group": g.to_string(),
            })
        })
        .collect();
    json!({
        "presheaf": presheaf,
        "cover": {
            "covered": topology.format_open(result.cover.covered),
            "parts": result
                .cover
                .parts
                .iter()
                .map(|&p| topology.format_open(p))
                .collect::<Vec<_>>(),
        },
        "groups": groups,
    })
}

pub enum DemoSource<'a> {
    Builtin,
    File(&'a Path),
}

/// `sheafkit epr-demo [--builtin | <scenario file>]`
pub fn cmd_epr_demo(source: DemoSource<'_>, max_points: usize) -> CmdOutcome {
    match source {
        DemoSource::Builtin => {
            let command = "epr-demo --builtin".to_string();
            let digest = digest_of(b"--builtin");
            let report = crate::epr::epr_demo();
            demo_outcome(command, digest, report)
        }
        DemoSource::File(path) => {
            let command = format!("epr-demo {}", path.display());
            let (file, digest) = match load_file(&command, path) {
                Loaded::Ok(f, d) => (f, d),
                Loaded::Failed(out) => return out,
            };
            let ws = match compile(&file, max_points) {
                Ok(ws) => ws,
                Err(failure) => return domain_failure(command, digest, failure),
            };
            let Some(block) = ws.scenario.clone() else {
                return domain_failure(
                    command,
                    digest,
                    DomainFailure::new("workspace has no scenario block"),
                );
            };
            let scenario = match compile_scenario(&ws, &block) {
                Ok(s) => s,
                Err(failure) => return domain_failure(command, digest, failure),
            };
            let report = run_demo(&scenario);
            demo_outcome(command, digest, report)
        }
    }
}

fn demo_outcome(command: String, digest: String, demo: crate::epr::DemoReport) -> CmdOutcome {
    let payload = json!({
        "transcript": demo.transcript,
        "checks": demo.machine,
    });
    if demo.all_passed() {
        CmdOutcome {
            report: Report::ok(command, digest, payload),
            exit_code: EXIT_OK,
        }
    } else {
        let mut witnesses = Vec::new();
        if !demo.position_independent {
            witnesses.push("position independence violated".to_string());
        }
        if !demo.measurable {
            witnesses.push("measurability check failed".to_string());
        }
        if demo.induced_ok == Some(false) {
            witnesses.push("induced measurement check failed".to_string());
        }
        CmdOutcome {
            report: Report::failed(command, digest, witnesses, payload),
            exit_code: EXIT_DOMAIN,
        }
    }
}

fn compile_scenario(ws: &Workspace, block: &ScenarioBlock) -> Result<DemoScenario, DomainFailure> {
    let map_open = |idx: usize, what: &str| -> Result<OpenId, DomainFailure> {
        ws.open_map
            .get(idx)
            .copied()
            .ok_or_else(|| DomainFailure::new(format!("scenario {what}: open index {idx} out of range")))
    };
    let mut chain = Vec::with_capacity(block.chain.len());
    for &idx in &block.chain {
        chain.push(map_open(idx, "chain")?);
    }
    let time = Arc::new(
        GeneralizedTimeCategory::new(ws.topology.clone(), chain.clone())
            .map_err(|e| DomainFailure::new(format!("scenario chain: {e}")))?,
    );

    let build_entity = |eb: &ScenarioEntityBlock| -> Result<Entity, DomainFailure> {
        let micro = ws
            .presheaves
            .get(&eb.micro)
            .ok_or_else(|| DomainFailure::new(format!("unknown presheaf `{}`", eb.micro)))?
            .clone();
        let macro_world = ws
            .presheaves
            .get(&eb.macro_world)
            .ok_or_else(|| DomainFailure::new(format!("unknown presheaf `{}`", eb.macro_world)))?
            .clone();
        if eb.tau.len() != chain.len() {
            return Err(DomainFailure::new(format!(
                "entity `{}`: {} tau labels for a chain of {}",
                eb.name,
                eb.tau.len(),
                chain.len()
            )));
        }
        let mut values = BTreeMap::new();
        for (i, raw) in eb.tau.iter().enumerate() {
            let t: Rational64 = raw.parse().map_err(|_| {
                DomainFailure::new(format!(
                    "entity `{}`: tau label `{raw}` is not a rational",
                    eb.name
                ))
            })?;
            values.insert(chain[i], t);
        }
        let tau = TimePresheaf::new(&time, values)
            .map_err(|e| DomainFailure::new(format!("entity `{}`: {e}", eb.name)))?;
        Entity::new(eb.name.clone(), time.clone(), micro, macro_world, tau)
            .map_err(|e| DomainFailure::new(format!("entity `{}`: {e}", eb.name)))
    };
    let observed = build_entity(&block.observed)?;
    let partner = build_entity(&block.partner)?;
    let observer = build_entity(&block.observer)?;

    let matrices = |entries: &[MatrixAt],
                    rows_of: &dyn Fn(OpenId) -> usize,
                    cols_of: &dyn Fn(OpenId) -> usize,
                    what: &str|
     -> Result<BTreeMap<OpenId, IntMatrix>, DomainFailure> {
        let mut out = BTreeMap::new();
        for at in entries {
            let open = map_open(at.open, what)?;
            let (rows, cols) = (rows_of(open), cols_of(open));
            let m = IntMatrix::new(rows, cols, at.matrix.0.clone()).map_err(|_| {
                DomainFailure::new(format!(
                    "scenario {what} at {}: expected {}x{} = {} entries, got {}",
                    ws.topology.format_open(open),
                    rows,
                    cols,
                    rows * cols,
                    at.matrix.0.len()
                ))
            })?;
            out.insert(open, m);
        }
        Ok(out)
    };

    let correlation = match &block.correlation {
        Some(entries) => Some(matrices(
            entries,
            &|u| observed.micro().rank(u),
            &|u| partner.micro().rank(u),
            "correlation",
        )?),
        None => None,
    };
    let candidate = matrices(
        &block.candidate,
        &|u| observer.micro().rank(u),
        &|u| observed.micro().rank(u),
        "candidate",
    )?;
    let observation_period = map_open(block.observation_open, "observation_open")?;

    Ok(DemoScenario {
        time,
        observed,
        partner,
        observer,
        correlation,
        candidate,
        observation_period,
        positions: block.positions.clone(),
    })
}

/// Point cap for the current invocation: `SHEAFKIT_MAX_POINTS` overrides the
/// default of 16.
pub fn max_points_from_env() -> usize {
    std::env::var("SHEAFKIT_MAX_POINTS")
        .ok()
        .and_then(|raw| raw.parse().ok())
        .unwrap_or(DEFAULT_MAX_POINTS)
}
