//! Synthetic comparison experiment: participants are assigned to one of 8
//! between-subject cells (chart condition × scaling), answer all 8
//! within-subject stimuli (sigma pair × position), and pick their answer by
//! drawing a reader strategy from a per-condition mixture and following it
//! deterministically. The resulting trial table feeds a logistic regression
//! that recovers the direction of the designed effects.

mod logistic;

pub use logistic::{
    fit_logistic, sample_from_model, Coefficient, LogisticFit, ModelSpec, Observation, Referents,
    Term,
};

use std::collections::{BTreeMap, HashMap};

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::Answer;
use crate::error::{Error, Result};
use crate::oracle::{evaluate, OracleConfig, OracleVerdict, Strategy};
use crate::scene::{build_scene, LayoutConfig, Position, Scaling};
use crate::stimuli::{FactorialCell, SdPair, VisCondition};

/// Per-condition strategy weights: who reads which chart how often.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(transparent)]
pub struct StrategyMixture {
    /// Outer key: chart condition; inner: strategy → probability weight.
    pub weights: BTreeMap<VisCondition, BTreeMap<Strategy, f64>>,
}

impl StrategyMixture {
    /// The compiled-in mixture: counting dominates dot plots (and falls off
    /// for croissants, more so with only 10 slices), while plain density
    /// charts are read via heights, areas, spread, and slope. Three of the
    /// counting shares are measured anchors; the remaining spread of weights
    /// is a documented modeling choice, overridable from a config file.
    pub fn default_observed() -> StrategyMixture {
        let mut weights = BTreeMap::new();
        weights.insert(
            VisCondition::Pdf,
            BTreeMap::from([
                (Strategy::HeightAtMean, 0.35),
                (Strategy::AreaLeftOfThreshold, 0.25),
                (Strategy::HeightAtThreshold, 0.15),
                (Strategy::SpreadComparison, 0.15),
                (Strategy::SlopeComparison, 0.10),
            ]),
        );
        weights.insert(
            VisCondition::Qdp20,
            BTreeMap::from([
                (Strategy::DotCounting, 0.68),
                (Strategy::DirectlyOverTick, 0.12),
                (Strategy::HeightAtMean, 0.10),
                (Strategy::SpreadComparison, 0.10),
            ]),
        );
        weights.insert(
            VisCondition::Croissant20,
            BTreeMap::from([
                (Strategy::DotCounting, 0.33),
                (Strategy::InterEdgeInterpolation, 0.27),
                (Strategy::HeightAtMean, 0.20),
                (Strategy::AreaLeftOfThreshold, 0.20),
            ]),
        );
        weights.insert(
            VisCondition::Croissant10,
            BTreeMap::from([
                (Strategy::DotCounting, 0.23),
                (Strategy::InterEdgeInterpolation, 0.32),
                (Strategy::HeightAtMean, 0.20),
                (Strategy::AreaLeftOfThreshold, 0.25),
            ]),
        );
        StrategyMixture { weights }
    }

    /// Checks coverage (all four conditions), affordance, non-negativity,
    /// and unit sums.
    pub fn validate(&self) -> Result<()> {
        for condition in VisCondition::ALL {
            let Some(strategies) = self.weights.get(&condition) else {
                return Err(Error::InvalidConfig(format!(
                    "mixture is missing the {} condition",
                    condition.label()
                )));
            };
            let mut sum = 0.0;
            for (&strategy, &weight) in strategies {
                if !(weight.is_finite() && weight >= 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "mixture weight for {}/{} must be non-negative, got {weight}",
                        condition.label(),
                        strategy.label()
                    )));
                }
                if weight > 0.0 && !strategy.affords(condition.vis_kind()) {
                    return Err(Error::InvalidConfig(format!(
                        "strategy {} cannot be used on {} charts",
                        strategy.label(),
                        condition.label()
                    )));
                }
                sum += weight;
            }
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidConfig(format!(
                    "mixture weights for {} sum to {sum}, expected 1",
                    condition.label()
                )));
            }
        }
        Ok(())
    }
}

/// Everything a simulation run depends on.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Participants per between-subject cell.
    pub n_per_cell: u32,
    pub seed: u64,
    pub mixture: StrategyMixture,
    pub oracle: OracleConfig,
    pub layout: LayoutConfig,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n_per_cell: 101,
            seed: 7,
            mixture: StrategyMixture::default_observed(),
            oracle: OracleConfig::default(),
            layout: LayoutConfig::default(),
        }
    }
}

/// One answered stimulus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Global participant id; cell-contiguous (ids 0..n are the first cell).
    pub participant: u32,
    pub vis: VisCondition,
    pub scaling: Scaling,
    pub sd_pair: SdPair,
    pub position: Position,
    /// The strategy this trial was answered with.
    pub strategy: Strategy,
    pub choice: Answer,
    /// Neither counts as incorrect whenever the ground truth names a panel.
    pub correct: bool,
}

/// The 8 between-subject cells in assignment order.
pub fn between_cells() -> [(VisCondition, Scaling); 8] {
    let mut cells = [(VisCondition::Pdf, Scaling::EqualArea); 8];
    let mut i = 0;
    for vis in VisCondition::ALL {
        for scaling in Scaling::ALL {
            cells[i] = (vis, scaling);
            i += 1;
        }
    }
    cells
}

/// Index into `FactorialCell::all()` for a design point.
fn factorial_index(vis: VisCondition, scaling: Scaling, sd_idx: usize, pos_idx: usize) -> usize {
    let vis_idx = VisCondition::ALL.iter().position(|&v| v == vis).unwrap();
    let scaling_idx = Scaling::ALL.iter().position(|&s| s == scaling).unwrap();
    ((vis_idx * 2 + scaling_idx) * 4 + sd_idx) * 2 + pos_idx
}

/// Runs the full experiment. Deterministic in (mixture, n_per_cell, seed):
/// every participant owns a counter-mode RNG stream derived from the seed
/// and their id, so parallel execution cannot reorder their draws.
pub fn simulate(config: &SimConfig) -> Result<Vec<TrialRecord>> {
    config.mixture.validate()?;
    config.oracle.validate()?;
    config.layout.validate()?;
    if config.n_per_cell == 0 {
        return Err(Error::InvalidConfig(
            "n_per_cell must be at least 1".to_string(),
        ));
    }

    // Every verdict any trial can need, computed once.
    let cells = FactorialCell::all();
    let verdicts: HashMap<(usize, Strategy), OracleVerdict> = cells
        .par_iter()
        .enumerate()
        .map(|(idx, cell)| -> Result<Vec<((usize, Strategy), OracleVerdict)>> {
            let spec = cell.spec();
            let scene = build_scene(&spec, &config.layout)?;
            let task = spec.task()?;
            config.mixture.weights[&cell.vis]
                .iter()
                .filter(|(_, &w)| w > 0.0)
                .map(|(&strategy, _)| {
                    Ok(((idx, strategy), evaluate(strategy, &scene, &task, &config.oracle)?))
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    // Per-condition strategy lists and samplers (BTreeMap order is stable).
    let samplers: BTreeMap<VisCondition, (Vec<Strategy>, WeightedIndex<f64>)> = config
        .mixture
        .weights
        .iter()
        .map(|(&condition, strategies)| {
            let active: Vec<(Strategy, f64)> = strategies
                .iter()
                .filter(|(_, &w)| w > 0.0)
                .map(|(&s, &w)| (s, w))
                .collect();
            let index = WeightedIndex::new(active.iter().map(|(_, w)| *w))
                .map_err(|e| Error::InvalidConfig(format!("unusable mixture: {e}")))?;
            Ok((condition, (active.into_iter().map(|(s, _)| s).collect(), index)))
        })
        .collect::<Result<_>>()?;

    let between = between_cells();
    let n = config.n_per_cell;
    let total = between.len() as u32 * n;
    let records: Vec<TrialRecord> = (0..total)
        .into_par_iter()
        .map(|participant| {
            let (vis, scaling) = between[(participant / n) as usize];
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(u64::from(participant) + 1);
            let (strategies, sampler) = &samplers[&vis];
            let mut trials = Vec::with_capacity(8);
            for (sd_idx, &sd_pair) in SdPair::ALL.iter().enumerate() {
                for (pos_idx, &position) in Position::ALL.iter().enumerate() {
                    let strategy = strategies[sampler.sample(&mut rng)];
                    let verdict =
                        verdicts[&(factorial_index(vis, scaling, sd_idx, pos_idx), strategy)];
                    trials.push(TrialRecord {
                        participant,
                        vis,
                        scaling,
                        sd_pair,
                        position,
                        strategy,
                        choice: verdict.choice,
                        correct: verdict.correct,
                    });
                }
            }
            trials
        })
        .flatten()
        .collect();
    Ok(records)
}

/// Serializes trials as CSV (closed vocabularies — no quoting needed).
pub fn trials_to_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from("participant,vis,scaling,sd_pair,position,strategy,choice,correct\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.participant,
            r.vis.label(),
            r.scaling.label(),
            r.sd_pair.label(),
            r.position.label(),
            r.strategy.label(),
            r.choice.label(),
            r.correct,
        ));
    }
    out
}

/// Parses a trial CSV produced by [`trials_to_csv`].
pub fn trials_from_csv(text: &str) -> Result<Vec<TrialRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::InvalidTrials("empty trial file".to_string()))?;
    if header != "participant,vis,scaling,sd_pair,position,strategy,choice,correct" {
        return Err(Error::InvalidTrials(format!(
            "unexpected header: {header}"
        )));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::InvalidTrials(format!(
                "row {}: expected 8 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let row_err = |what: &str| {
            Error::InvalidTrials(format!("row {}: unreadable {what}", lineno + 2))
        };
        let sd_pair = {
            let (narrow, wide) = fields[3]
                .split_once('v')
                .ok_or_else(|| row_err("sd_pair"))?;
            SdPair {
                narrow: narrow.parse().map_err(|_| row_err("sd_pair"))?,
                wide: wide.parse().map_err(|_| row_err("sd_pair"))?,
            }
        };
        records.push(TrialRecord {
            participant: fields[0].parse().map_err(|_| row_err("participant"))?,
            vis: VisCondition::parse(fields[1])?,
            scaling: Scaling::parse(fields[2])?,
            sd_pair,
            position: Position::parse(fields[4])?,
            strategy: Strategy::parse(fields[5])?,
            choice: Answer::parse(fields[6])?,
            correct: match fields[7] {
                "true" => true,
                "false" => false,
                _ => return Err(row_err("correct")),
            },
        });
    }
    Ok(records)
}

/// Mean accuracy over the records a predicate selects; NaN when none match.
pub fn accuracy_where(records: &[TrialRecord], pred: impl Fn(&TrialRecord) -> bool) -> f64 {
    let mut hits = 0usize;
    let mut total = 0usize;
    for r in records.iter().filter(|r| pred(r)) {
        total += 1;
        hits += usize::from(r.correct);
    }
    hits as f64 / total as f64
}
