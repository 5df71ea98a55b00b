//! Text and JSON renderings of command results.
//!
//! JSON documents are self-contained and carry no timestamps or absolute
//! paths, so the same input, flags and seed give byte-identical output.

use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use krieger_core::classifier::{Certificate, TypeVerdict, Warning};
use krieger_core::cocycle::{Block, CocycleSampleSet, EmpiricalReport, LatticeVerdict, OracleHit, SearchReport, SearchScope};
use krieger_core::Scalar;
use serde::Serialize;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

pub trait Emit: Serialize {
    fn text(&self) -> String;

    fn emit(&self, format: Format) {
        match format {
            Format::Text => print!("{}", self.text()),
            Format::Json => {
                println!("{}", serde_json::to_string_pretty(self).expect("documents serialize"));
            }
        }
    }
}

fn input(path: &Path) -> String {
    path.display().to_string()
}

#[derive(Serialize)]
pub struct WarningDoc {
    pub kind: Warning,
    pub message: &'static str,
}

fn warnings(certificate: &Certificate) -> Vec<WarningDoc> {
    certificate.warnings.iter().map(|&kind| WarningDoc { kind, message: kind.message() }).collect()
}

#[derive(Serialize)]
pub struct ClassifyDoc {
    pub command: &'static str,
    pub input: String,
    pub label: String,
    pub lambda: Option<String>,
    pub warnings: Vec<WarningDoc>,
    pub certificate: Certificate,
}

impl ClassifyDoc {
    pub fn new(path: &Path, verdict: &TypeVerdict) -> Self {
        ClassifyDoc {
            command: "classify",
            input: input(path),
            label: verdict.label.to_string(),
            lambda: verdict.label.lambda().map(Scalar::render),
            warnings: warnings(&verdict.certificate),
            certificate: verdict.certificate.clone(),
        }
    }
}

fn certificate_text(out: &mut String, certificate: &Certificate) {
    out.push_str("fired:\n");
    for f in &certificate.fired {
        let _ = writeln!(out, "  {}", f.id);
        for input in &f.inputs {
            let _ = writeln!(out, "    {input}");
        }
    }
    if !certificate.warnings.is_empty() {
        out.push_str("warnings:\n");
        for w in &certificate.warnings {
            let _ = writeln!(out, "  {}", w.message());
        }
    }
    if !certificate.notes.is_empty() {
        out.push_str("notes:\n");
        for n in &certificate.notes {
            let _ = writeln!(out, "  {n}");
        }
    }
}

impl Emit for ClassifyDoc {
    fn text(&self) -> String {
        let mut out = format!("{}\n", self.label);
        certificate_text(&mut out, &self.certificate);
        out
    }
}

#[derive(Serialize)]
pub struct WitnessView {
    pub coordinates: Vec<usize>,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub d: String,
    pub log_d: f64,
    pub target: String,
    pub eps: String,
    pub distance: String,
}

#[derive(Serialize)]
pub struct WitnessDoc {
    pub command: &'static str,
    pub input: String,
    pub found: bool,
    pub witness: Option<WitnessView>,
    pub scope: SearchScope,
}

impl WitnessDoc {
    pub fn new<S: Scalar>(path: &Path, report: &SearchReport<S>) -> Self {
        let witness = report.witness.as_ref().map(|w| WitnessView {
            coordinates: w.block.coordinates.clone(),
            x: w.x.clone(),
            y: w.y.clone(),
            d: w.d.render(),
            log_d: w.log_d,
            target: w.target.render(),
            eps: w.eps.render(),
            distance: w.distance().render(),
        });
        WitnessDoc { command: "witness", input: input(path), found: witness.is_some(), witness, scope: report.scope.clone() }
    }
}

impl Emit for WitnessDoc {
    fn text(&self) -> String {
        let s = &self.scope;
        match &self.witness {
            Some(w) => format!(
                "witness K={} on coordinates {:?}\n  x = {:?}\n  y = {:?}\n  D = {} (log D = {:.16e})\n  |D - {}| = {} < {}\n",
                w.coordinates.len(),
                w.coordinates,
                w.x,
                w.y,
                w.d,
                w.log_d,
                w.target,
                w.distance,
                w.eps
            ),
            None => format!(
                "none in scope: start={} K<={} delta={} states={} (cap {}){}\n",
                s.start,
                s.k_max,
                s.delta,
                s.states_enumerated,
                s.state_cap,
                if s.truncated { ", alphabets truncated" } else { "" }
            ),
        }
    }
}

#[derive(Serialize)]
pub struct BudgetDoc {
    pub command: &'static str,
    pub input: String,
    pub found: bool,
    pub budget_exceeded: u64,
}

impl BudgetDoc {
    pub fn new(path: &Path, cap: u64) -> Self {
        BudgetDoc { command: "witness", input: input(path), found: false, budget_exceeded: cap }
    }
}

impl Emit for BudgetDoc {
    fn text(&self) -> String {
        format!("search stopped: more than {} states enumerated\n", self.budget_exceeded)
    }
}

#[derive(Serialize)]
pub struct SampleDoc {
    pub command: &'static str,
    pub input: String,
    pub seed: u64,
    pub start: usize,
    pub window: usize,
    pub samples: usize,
    pub nonzero_samples: usize,
    pub tol: f64,
    /// `None` when fewer than two samples were nonzero.
    pub lattice: Option<LatticeVerdict>,
    pub export: Option<String>,
}

impl SampleDoc {
    pub fn new<S: Scalar>(
        path: &Path,
        set: &CocycleSampleSet<S>,
        lattice: Option<LatticeVerdict>,
        tol: f64,
        export: Option<&Path>,
    ) -> Self {
        SampleDoc {
            command: "sample",
            input: input(path),
            seed: set.seed,
            start: set.start,
            window: set.window,
            samples: set.samples.len(),
            nonzero_samples: set.samples.iter().filter(|s| s.log_d.abs() > tol).count(),
            tol,
            lattice,
            export: export.map(input),
        }
    }
}

fn lattice_text(lattice: Option<LatticeVerdict>) -> String {
    match lattice {
        Some(LatticeVerdict::AllZero) => "all samples zero".into(),
        Some(LatticeVerdict::Lattice { period }) => {
            format!("lattice with period {period:.16e} (lambda = {:.12})", (-period).exp())
        }
        Some(LatticeVerdict::NoLattice) => "no lattice".into(),
        None => "fewer than two nonzero samples".into(),
    }
}

impl Emit for SampleDoc {
    fn text(&self) -> String {
        let mut out = format!(
            "{} samples (seed {}, coordinates {}..={}), {} nonzero\n",
            self.samples,
            self.seed,
            self.start + 1,
            self.start + self.window,
            self.nonzero_samples
        );
        let _ = writeln!(out, "{}", lattice_text(self.lattice));
        if let Some(path) = &self.export {
            let _ = writeln!(out, "samples written to {path}");
        }
        out
    }
}

#[derive(Serialize)]
#[serde(bound(serialize = ""))]
pub struct OracleDoc<S: Scalar> {
    pub command: &'static str,
    pub input: String,
    pub coordinates: Vec<usize>,
    pub truncated: Vec<usize>,
    pub hits: Vec<OracleHit<S>>,
}

impl<S: Scalar> OracleDoc<S> {
    pub fn new(path: &Path, block: &Block<S>, hits: &[OracleHit<S>]) -> Self {
        OracleDoc {
            command: "oracle",
            input: input(path),
            coordinates: block.coordinates.clone(),
            truncated: block.truncated.clone(),
            hits: hits.to_vec(),
        }
    }
}

impl<S: Scalar> Emit for OracleDoc<S> {
    fn text(&self) -> String {
        let mut out = format!(
            "block {}..={}\n",
            self.coordinates.first().copied().unwrap_or(0),
            self.coordinates.last().copied().unwrap_or(0)
        );
        for h in &self.hits {
            let _ = writeln!(
                out,
                "  target {}: min distance {} at D = {} (x = {:?}, y = {:?})",
                h.target.render(),
                h.distance.render(),
                h.d.render(),
                h.x,
                h.y
            );
        }
        out
    }
}

#[derive(Serialize)]
pub struct Analytic {
    pub label: String,
    pub lambda: Option<String>,
    pub certificate: Certificate,
}

#[derive(Serialize)]
pub struct ReportDoc {
    pub command: &'static str,
    pub input: String,
    pub label: String,
    pub lambda: Option<String>,
    pub warnings: Vec<WarningDoc>,
    pub analytic: Analytic,
    pub empirical: EmpiricalReport,
    /// `None` when the analytic label is inconclusive.
    pub agreement: Option<bool>,
}

impl ReportDoc {
    pub fn new(path: &Path, verdict: &TypeVerdict, empirical: &EmpiricalReport, agreement: Option<bool>) -> Self {
        let label = verdict.label.to_string();
        let lambda = verdict.label.lambda().map(Scalar::render);
        ReportDoc {
            command: "report",
            input: input(path),
            label: label.clone(),
            lambda: lambda.clone(),
            warnings: warnings(&verdict.certificate),
            analytic: Analytic { label, lambda, certificate: verdict.certificate.clone() },
            empirical: empirical.clone(),
            agreement,
        }
    }
}

impl Emit for ReportDoc {
    fn text(&self) -> String {
        let e = &self.empirical;
        let mut out = format!("analytic:  {}\nempirical: {}\n", self.label, e.label);
        let _ = writeln!(
            out,
            "  {} samples on coordinates {}..={}, {} nonzero, {}",
            e.samples,
            e.start + 1,
            e.start + e.window,
            e.nonzero_samples,
            lattice_text(e.lattice)
        );
        for p in &e.probes {
            match p.block_len {
                Some(k) => {
                    let _ = writeln!(out, "  probe {:.6}: reached with K = {k}", p.target);
                }
                None => {
                    let _ = writeln!(out, "  probe {:.6}: not reached", p.target);
                }
            }
        }
        let agreement = match self.agreement {
            Some(true) => "yes",
            Some(false) => "NO",
            None => "n/a (analytic verdict inconclusive)",
        };
        let _ = writeln!(out, "agreement: {agreement}");
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {}", w.message);
        }
        out
    }
}
