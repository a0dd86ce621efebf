//! Layer verification: a relation evaluated as its defining formula, with
//! every lower relation answered by its oracle, over a witness- and
//! refuter-closed universe, compared against its own oracle.

use serde::Serialize;

use crate::closure::close_layer;
use crate::error::{Error, Result};
use crate::formula::{build, BMode, Evaluator, Formula, ImplMap, TruncationParams, Valuation};
use crate::io::{records, PointRecord};
use crate::oracles::oracle;
use crate::point::Point;
use crate::relation::RelationId;
use crate::sample::{sample_rng, Sampler, SamplerKind};
use crate::space::Space;

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub samples: usize,
    pub seed: u64,
    pub trunc: TruncationParams,
    pub mode: BMode,
    pub sampler: SamplerKind,
}

impl VerifyConfig {
    pub fn new(samples: usize, seed: u64) -> VerifyConfig {
        VerifyConfig {
            samples,
            seed,
            trunc: TruncationParams::default(),
            mode: BMode::default(),
            sampler: SamplerKind::Default,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    pub index: usize,
    pub inputs: Vec<PointRecord>,
    pub universe: Vec<PointRecord>,
    pub formula: bool,
    pub oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerReport {
    pub relation: RelationId,
    pub norm: String,
    pub backend: String,
    pub trunc: TruncationParams,
    pub b_mode: &'static str,
    pub sampler: &'static str,
    pub seed: u64,
    pub samples: usize,
    pub agreements: usize,
    /// Samples with the oracle true.
    pub positives: usize,
    /// Samples evaluated on the float companion because an exact
    /// construction would need an irrational coordinate.
    pub float_fallbacks: usize,
    /// Candidates discarded by the sampler before drawing a sample.
    pub filtered: u64,
    pub max_universe: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl LayerReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Relations that `verify_layer` accepts.
pub fn verifiable(id: RelationId) -> Result<()> {
    match id {
        RelationId::Phi(n) if n >= 1 => Err(Error::Precondition(format!(
            "{id} is excluded from layer verification: it has no finite-index oracle"
        ))),
        RelationId::Collinear | RelationId::Parallelogram => {
            Err(Error::NoDefinition(id.to_string()))
        }
        _ => Ok(()),
    }
}

/// The formula `(rel id t0 t1 ...)` with its term names.
pub fn layer_formula(id: RelationId) -> (Formula, Vec<String>) {
    let names: Vec<String> = (0..id.term_arity()).map(|i| format!("t{i}")).collect();
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let idx = id.indices().into_iter().map(build::lit).collect();
    (build::rel(id.kind(), idx, &refs), names)
}

/// Outcome of one instance: formula verdict, oracle verdict, universe.
pub struct Instance {
    pub formula: bool,
    pub oracle: bool,
    pub universe: Vec<Point>,
    pub float_fallback: bool,
}

/// Closes the universe for `inputs` and evaluates both sides. Exact L2
/// instances whose witnesses are irrational move to the float companion.
pub fn check_instance(
    id: RelationId,
    space: &Space,
    inputs: &[Point],
    trunc: &TruncationParams,
    mode: BMode,
) -> Result<Instance> {
    match check_on(id, space, inputs, trunc, mode) {
        Err(Error::ExactL2Refused(_)) => {
            let f = space.float_companion();
            let pts: Vec<Point> = inputs.iter().map(|p| p.to_backend(f.backend)).collect();
            let mut inst = check_on(id, &f, &pts, trunc, mode)?;
            inst.float_fallback = true;
            Ok(inst)
        }
        other => other,
    }
}

fn check_on(
    id: RelationId,
    space: &Space,
    inputs: &[Point],
    trunc: &TruncationParams,
    mode: BMode,
) -> Result<Instance> {
    let universe = close_layer(space, id, inputs, trunc)?;
    let (f, names) = layer_formula(id);
    let valuation: Valuation = names.into_iter().zip(inputs.iter().cloned()).collect();
    let formula = Evaluator::new(space, &universe, *trunc, ImplMap::layer(id.kind()))
        .with_mode(mode)
        .eval(&f, &valuation)?;
    let refs: Vec<&Point> = inputs.iter().collect();
    let oracle = oracle(space, id, &refs)?;
    Ok(Instance {
        formula,
        oracle,
        universe: universe.points().to_vec(),
        float_fallback: false,
    })
}

/// Runs `cfg.samples` seeded instances of `id` and collects disagreements.
pub fn verify_layer(id: RelationId, space: &Space, cfg: &VerifyConfig) -> Result<LayerReport> {
    verifiable(id)?;
    cfg.trunc.validate()?;
    let sampler = Sampler::new(space, cfg.sampler.clone(), cfg.trunc);
    let mut report = LayerReport {
        relation: id,
        norm: space.norm.name(),
        backend: space.backend.name().to_string(),
        trunc: cfg.trunc,
        b_mode: cfg.mode.name(),
        sampler: cfg.sampler.name(),
        seed: cfg.seed,
        samples: cfg.samples,
        agreements: 0,
        positives: 0,
        float_fallbacks: 0,
        filtered: 0,
        max_universe: 0,
        counterexamples: Vec::new(),
    };
    for i in 0..cfg.samples {
        let draw = sampler.draw(id, i, &mut sample_rng(cfg.seed, i as u64));
        report.filtered += draw.filtered as u64;
        let inst = check_instance(id, space, &draw.inputs, &cfg.trunc, cfg.mode)?;
        report.max_universe = report.max_universe.max(inst.universe.len());
        report.float_fallbacks += inst.float_fallback as usize;
        report.positives += inst.oracle as usize;
        if inst.formula == inst.oracle {
            report.agreements += 1;
        } else {
            report.counterexamples.push(Counterexample {
                index: i,
                inputs: records(&draw.inputs),
                universe: records(&inst.universe),
                formula: inst.formula,
                oracle: inst.oracle,
            });
        }
    }
    Ok(report)
}
