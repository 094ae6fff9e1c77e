//! The two-phase embedding algorithm.
//!
//! Phase 1 places non-buffer pattern vertices one at a time. Each vertex takes
//! an image whose degrees into the candidate sets of its unplaced neighbours
//! stay close to the pair density, so that candidate sets shrink evenly. Host
//! vertices that break this pattern (low degree, or missed by many buffer
//! candidate sets) are used up early by dedicated pattern vertices. Phase 2
//! places the buffers of each cluster through a perfect matching between
//! buffers and free host vertices.

mod cascade;
mod config;
mod engine;
mod phase2;
mod report;
mod select;
mod state;
mod verify;

use std::time::Instant;

pub use cascade::{compute_cascade, CascadeMode, Derived, Overrides, ParameterCascade};
pub use config::{Balance, DensityMode, EmbedConfig, ParamMode, Verbosity};
pub use engine::Embedder;
pub use report::{
    AuditSummary, Case2Event, CascadeSummary, Diagnostics, EmbeddingReport, HallViolation, Halt, Outcome,
    Phase2Cluster, ReorderEvent, StuckInfo, Timings,
};
pub use select::Selection;
pub use state::EmbeddingState;
pub use verify::{verify_embedding, verify_total, VerificationReport};

use crate::error::{Error, Result};
use crate::graph::{PartitionedHost, Pattern};

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Runs preprocessing, both phases and the verifier.
///
/// Algorithmic failures are reported through [`EmbeddingReport::outcome`].
/// Errors are reserved for invalid inputs and for internal inconsistencies,
/// including a successful run that the verifier rejects.
pub fn embed(pattern: &Pattern, host: &PartitionedHost, config: &EmbedConfig) -> Result<EmbeddingReport> {
    let mut timings = Timings::default();
    let start = Instant::now();
    let mut e = Embedder::new(pattern, host, config)?;
    let mut result = e.preprocess();
    timings.preprocessing_ms = elapsed_ms(start);
    if result.is_ok() {
        let start = Instant::now();
        result = e.run_phase1();
        timings.phase1_ms = elapsed_ms(start);
    }
    if result.is_ok() {
        let start = Instant::now();
        result = e.run_phase2();
        timings.phase2_ms = elapsed_ms(start);
    }
    e.diag.bad_pairs = e.state.bad.len();
    let outcome = match result {
        Ok(()) => Outcome::Success,
        Err(Halt::Preprocessing(message)) => {
            e.diag.notes.push(message);
            Outcome::PreprocessingFailure
        }
        Err(Halt::Stuck(info)) => {
            e.diag.stuck = Some(info);
            Outcome::Phase1Stuck
        }
        Err(Halt::Hall(violation)) => {
            e.diag.violator = Some(violation);
            Outcome::Phase2HallFailure
        }
        Err(Halt::Error(err)) => return Err(err),
    };
    if !e.diag.audit.violations.is_empty() {
        return Err(Error::internal(format!(
            "invariant audit failed: {}",
            e.diag.audit.violations.join("; ")
        )));
    }

    let (phi, verification) = if outcome == Outcome::Success {
        let start = Instant::now();
        let n = e.original_vertices();
        let partial = &e.state.phi[..n];
        let report = verify_embedding(pattern, host, partial);
        timings.verify_ms = elapsed_ms(start);
        if !report.passed() {
            return Err(Error::internal(format!(
                "verifier rejected a completed embedding: {}",
                report.describe().join("; ")
            )));
        }
        let phi = partial.iter().map(|v| v.expect("complete map")).collect();
        (Some(phi), Some(report))
    } else {
        (None, None)
    };

    Ok(EmbeddingReport {
        outcome,
        seed: config.seed,
        cascade: summarize(&e.cascade),
        phi,
        verification,
        diagnostics: e.diag,
        timings,
    })
}

fn summarize(c: &ParameterCascade) -> CascadeSummary {
    CascadeSummary {
        mode: c.mode,
        d: c.d.to_string(),
        delta: c.delta.to_string(),
        max_degree: c.max_degree,
        r: c.r,
        log10_base: c.log10_base,
        exact_log10: c.log10.clone(),
        effective_log10: c.effective_log10.clone(),
        effective: c.effective.map(|v| v.to_string()),
        ordering_holds: c.ordering_holds(),
    }
}
