//! Run logs and their JSON-lines form.
//!
//! A log file holds one `"type": "generation"` object per generation followed
//! by a single `"type": "summary"` object. Every line carries `"schema": 1`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::evolution::{EvolutionConfig, MutationOutcome, OutcomeLabel};
use crate::gradient::GradientConfig;
use crate::quantum::Circuit;

pub const SCHEMA_VERSION: u64 = 1;

/// Score of one proposed offspring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffspringRecord {
    pub label: OutcomeLabel,
    pub gate_kind: String,
    pub energy: f64,
}

/// One generation of the evolutionary search, or one step of the gradient
/// baseline.
///
/// For gradient logs `parent_energy` is the best energy seen before the step,
/// `best_offspring_energy` the energy at the updated parameters, `outcome`
/// is null and `offspring` empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub parent_energy: f64,
    pub best_offspring_energy: f64,
    pub accepted: bool,
    pub outcome: Option<MutationOutcome>,
    /// Gate count of the parent carried into the next generation.
    pub parent_gate_count: usize,
    pub cumulative_calls: u64,
    #[serde(default)]
    pub offspring: Vec<OffspringRecord>,
}

impl GenerationRecord {
    /// Parent energy after selection.
    pub fn energy_after(&self) -> f64 {
        if self.accepted {
            self.best_offspring_energy
        } else {
            self.parent_energy
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RunConfig {
    Evolution(EvolutionConfig),
    Gradient(GradientConfig),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxGenerations,
    Stagnation,
    Steps,
}

/// Count for one (outcome label, gate kind) cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub label: OutcomeLabel,
    pub gate_kind: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunLog {
    pub config: RunConfig,
    pub initial_energy: f64,
    pub initial_calls: u64,
    pub records: Vec<GenerationRecord>,
    pub final_circuit: Circuit,
    pub final_energy: f64,
    pub stopped_by: StopReason,
    /// Accepted generations per label and gate kind.
    pub success_tallies: Vec<Tally>,
    /// Proposed offspring per label and gate kind.
    pub proposal_tallies: Vec<Tally>,
}

/// Order of gate kinds in tables: by arity, then axis.
pub(crate) fn kind_rank(kind: &str) -> (usize, String) {
    (kind.len(), kind.to_string())
}

fn to_tallies(map: BTreeMap<(OutcomeLabel, (usize, String)), (String, u64)>) -> Vec<Tally> {
    map.into_iter()
        .map(|((label, _), (gate_kind, count))| Tally {
            label,
            gate_kind,
            count,
        })
        .collect()
}

impl RunLog {
    pub fn new(
        config: RunConfig,
        initial_energy: f64,
        initial_calls: u64,
        records: Vec<GenerationRecord>,
        final_circuit: Circuit,
        final_energy: f64,
        stopped_by: StopReason,
    ) -> Self {
        let mut success = BTreeMap::new();
        let mut proposals = BTreeMap::new();
        for r in &records {
            if let (true, Some(o)) = (r.accepted, &r.outcome) {
                let kind = o.gate_kind().to_string();
                success
                    .entry((o.label(), kind_rank(&kind)))
                    .or_insert((kind, 0))
                    .1 += 1;
            }
            for o in &r.offspring {
                proposals
                    .entry((o.label, kind_rank(&o.gate_kind)))
                    .or_insert((o.gate_kind.clone(), 0))
                    .1 += 1;
            }
        }
        RunLog {
            config,
            initial_energy,
            initial_calls,
            records,
            final_circuit,
            final_energy,
            stopped_by,
            success_tallies: to_tallies(success),
            proposal_tallies: to_tallies(proposals),
        }
    }

    pub fn accepted_generations(&self) -> usize {
        self.records.iter().filter(|r| r.accepted).count()
    }

    /// Parent energy before the first generation and after each one.
    pub fn parent_energies(&self) -> Vec<f64> {
        std::iter::once(self.initial_energy)
            .chain(self.records.iter().map(GenerationRecord::energy_after))
            .collect()
    }

    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for r in &self.records {
            writeln!(out, "{}", serde_json::to_string(&tagged(r, "generation")?)?)?;
        }
        let summary = Summary {
            config: &self.config,
            initial_energy: self.initial_energy,
            initial_calls: self.initial_calls,
            final_circuit: &self.final_circuit,
            final_energy: self.final_energy,
            stopped_by: self.stopped_by,
            success_tallies: &self.success_tallies,
            proposal_tallies: &self.proposal_tallies,
        };
        writeln!(
            out,
            "{}",
            serde_json::to_string(&tagged(&summary, "summary")?)?
        )?;
        Ok(())
    }

    pub fn to_jsonl_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf)?;
        Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
    }

    pub fn read_jsonl<R: BufRead>(input: R) -> Result<Self> {
        let mut records = Vec::new();
        let mut summary: Option<OwnedSummary> = None;
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let bad = |msg: String| Error::Log(format!("line {}: {msg}", lineno + 1));
            if summary.is_some() {
                return Err(bad("content after the summary line".into()));
            }
            let mut value: Value = serde_json::from_str(&line)?;
            let obj = value
                .as_object_mut()
                .ok_or_else(|| bad("expected a JSON object".into()))?;
            match obj.remove("schema").and_then(|v| v.as_u64()) {
                Some(SCHEMA_VERSION) => {}
                other => return Err(bad(format!("unsupported schema {other:?}"))),
            }
            match obj.remove("type").as_ref().and_then(Value::as_str) {
                Some("generation") => records.push(serde_json::from_value(value)?),
                Some("summary") => summary = Some(serde_json::from_value(value)?),
                other => return Err(bad(format!("unknown line type {other:?}"))),
            }
        }
        let s = summary.ok_or_else(|| Error::Log("missing summary line".into()))?;
        let log = RunLog::new(
            s.config,
            s.initial_energy,
            s.initial_calls,
            records,
            s.final_circuit,
            s.final_energy,
            s.stopped_by,
        );
        if log.success_tallies != s.success_tallies || log.proposal_tallies != s.proposal_tallies {
            return Err(Error::Log(
                "summary tallies disagree with the records".into(),
            ));
        }
        Ok(log)
    }
}

fn tagged<T: Serialize>(value: &T, kind: &str) -> Result<Value> {
    let mut obj = match serde_json::to_value(value)? {
        Value::Object(m) => m,
        _ => Map::new(),
    };
    obj.insert("schema".into(), Value::from(SCHEMA_VERSION));
    obj.insert("type".into(), Value::from(kind));
    Ok(Value::Object(obj))
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a RunConfig,
    initial_energy: f64,
    initial_calls: u64,
    final_circuit: &'a Circuit,
    final_energy: f64,
    stopped_by: StopReason,
    success_tallies: &'a [Tally],
    proposal_tallies: &'a [Tally],
}

#[derive(Deserialize)]
struct OwnedSummary {
    config: RunConfig,
    initial_energy: f64,
    initial_calls: u64,
    final_circuit: Circuit,
    final_energy: f64,
    stopped_by: StopReason,
    success_tallies: Vec<Tally>,
    proposal_tallies: Vec<Tally>,
}
