//! Corpus runs: a JSON spec lists criteria (with case counts) and explicit
//! instances. Cases run in parallel on derived seeds and merge in order,
//! so the reports are byte-identical for a fixed seed.

use std::path::Path;

use qspace_core::numerics::random::derive_seed;
use serde::{Deserialize, Serialize};

use crate::commands::{self, CmdError, InvertArgs, MinEigArgs};
use crate::criteria::{self, CaseRecord, Outcome};
use crate::io::InstanceFile;

pub const DEFAULT_CORPUS: &str = include_str!("../corpus/default.json");

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusSpec {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Criterion {
        criterion: String,
        #[serde(default)]
        count: Option<usize>,
    },
    Instance {
        instance: Box<InstanceEntry>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Matinv,
    Mineig,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InstanceEntry {
    pub problem: Problem,
    #[serde(flatten)]
    pub file: InstanceFile,
    #[serde(default)]
    pub eps: Option<f64>,
    /// Expected decision, if the entry pins one.
    #[serde(default)]
    pub expect: Option<bool>,
}

impl CorpusSpec {
    pub fn parse(text: &str) -> Result<Self, CmdError> {
        let spec: CorpusSpec = serde_json::from_str(text).map_err(|e| CmdError::Malformed(format!("corpus spec: {e}")))?;
        for e in &spec.entries {
            if let Entry::Criterion { criterion, .. } = e {
                if criteria::criterion_id(criterion).is_none() {
                    return Err(CmdError::Malformed(format!("unknown criterion {criterion:?}")));
                }
            }
        }
        Ok(spec)
    }

    pub fn default_spec() -> Self {
        Self::parse(DEFAULT_CORPUS).expect("shipped corpus parses")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub name: String,
    pub seed: u64,
    pub pass: bool,
    pub criteria: Vec<Outcome>,
    pub instances: Vec<CaseRecord>,
}

impl CorpusReport {
    pub fn all_cases(&self) -> impl Iterator<Item = &CaseRecord> {
        self.criteria.iter().flat_map(|o| o.cases.iter()).chain(&self.instances)
    }

    pub fn csv(&self) -> Result<String, CmdError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in self.all_cases() {
            w.serialize(c).map_err(|e| CmdError::Malformed(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CmdError::Malformed(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// One line per check, for stderr.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for o in &self.criteria {
            for c in &o.checks {
                let tag = if c.pass { "PASS" } else { "FAIL" };
                let extra = if c.supplementary { " [supplementary]" } else { "" };
                s.push_str(&format!("{tag} {:>2} {}: {} ({}){extra}\n", o.id, o.name, c.label, c.detail));
            }
        }
        for c in &self.instances {
            let tag = if c.pass { "PASS" } else { "FAIL" };
            s.push_str(&format!("{tag} instance {}: {}\n", c.case, c.detail));
        }
        s
    }
}

fn run_instance(i: usize, seed: u64, e: &InstanceEntry) -> CaseRecord {
    let res = match e.problem {
        Problem::Matinv => {
            let args = InvertArgs { eps: e.eps.unwrap_or(criteria::MATINV_EPS), seed, verify_oracle: true, ..Default::default() };
            commands::invert(&e.file, &args)
        }
        Problem::Mineig => {
            let args = MinEigArgs { inject_eps: e.eps, seed, verify_oracle: true, ..Default::default() };
            commands::mineig(&e.file, &args)
        }
    };
    let name = match e.problem {
        Problem::Matinv => "instance-matinv",
        Problem::Mineig => "instance-mineig",
    };
    let (pass, measured, detail) = match res {
        Ok((r, _)) => {
            let expected = e.expect.is_none_or(|x| r.decision == Some(x));
            let d = format!("decision {:?}, oracle {}", r.decision, r.classical_oracle.map_or("-".into(), |v| v.to_string()));
            (r.pass && expected, r.estimate.unwrap_or(f64::NAN), d)
        }
        Err(err @ CmdError::Promise(_)) => (false, f64::NAN, err.to_string()),
        Err(err) => (false, f64::NAN, format!("error: {err}")),
    };
    CaseRecord { criterion: name.into(), case: i, seed, pass, measured, bound: f64::NAN, detail }
}

pub fn run(spec: &CorpusSpec, seed: u64) -> CorpusReport {
    let mut outcomes = Vec::new();
    let mut instances = Vec::new();
    for (i, e) in spec.entries.iter().enumerate() {
        let s = derive_seed(seed, i as u64);
        match e {
            Entry::Criterion { criterion, count } => {
                let id = criteria::criterion_id(criterion).expect("validated at parse");
                outcomes.push(criteria::run(id, *count, s).expect("known criterion"));
            }
            Entry::Instance { instance } => instances.push(run_instance(i, s, instance)),
        }
    }
    let pass = outcomes.iter().all(|o| o.pass) && instances.iter().all(|c| c.pass);
    CorpusReport { name: spec.name.clone().unwrap_or_else(|| "corpus".into()), seed, pass, criteria: outcomes, instances }
}

/// Writes corpus.json and corpus.csv into `dir`.
pub fn write(report: &CorpusReport, dir: &Path) -> Result<(), CmdError> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("corpus.json"), crate::io::to_json(report))?;
    std::fs::write(dir.join("corpus.csv"), report.csv()?)?;
    Ok(())
}
