//! Binomial logistic regression over the experimental factors, with dummy
//! coding against configurable referent levels. The model is fixed:
//! `correct ~ vis + scaling + sd + position + vis:scaling + vis:sd`.
//! Identical predictor rows are pooled into binomial groups before
//! Newton–Raphson, so the solver touches at most one row per design cell
//! regardless of trial count.

use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scene::{Position, Scaling};
use crate::stimuli::{FactorialCell, SdPair, VisCondition};

use super::TrialRecord;

/// One analyzable trial: the factor levels and whether it was answered
/// correctly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Observation {
    pub vis: VisCondition,
    pub scaling: Scaling,
    pub sd_pair: SdPair,
    pub position: Position,
    pub correct: bool,
}

impl From<&TrialRecord> for Observation {
    fn from(r: &TrialRecord) -> Observation {
        Observation {
            vis: r.vis,
            scaling: r.scaling,
            sd_pair: r.sd_pair,
            position: r.position,
            correct: r.correct,
        }
    }
}

/// Which factor (or interaction) a fitted coefficient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Term {
    Intercept,
    Vis,
    Scaling,
    Sd,
    Position,
    VisScaling,
    VisSd,
}

/// The factor levels absorbed into the intercept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Referents {
    pub vis: VisCondition,
    pub scaling: Scaling,
    pub sd_pair: SdPair,
    pub position: Position,
}

impl Default for Referents {
    fn default() -> Referents {
        Referents {
            vis: VisCondition::Pdf,
            scaling: Scaling::EqualHeight,
            sd_pair: SdPair::ALL[0],
            position: Position::NarrowOnTop,
        }
    }
}

/// Model structure: fixed terms, configurable referents.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModelSpec {
    pub referents: Referents,
}

fn ind(level_matches: bool) -> f64 {
    f64::from(u8::from(level_matches))
}

impl ModelSpec {
    fn vis_levels(&self) -> Vec<VisCondition> {
        VisCondition::ALL
            .into_iter()
            .filter(|&v| v != self.referents.vis)
            .collect()
    }

    fn scaling_levels(&self) -> Vec<Scaling> {
        Scaling::ALL
            .into_iter()
            .filter(|&s| s != self.referents.scaling)
            .collect()
    }

    fn sd_levels(&self) -> Vec<SdPair> {
        SdPair::ALL
            .into_iter()
            .filter(|sd| *sd != self.referents.sd_pair)
            .collect()
    }

    fn position_levels(&self) -> Vec<Position> {
        Position::ALL
            .into_iter()
            .filter(|&p| p != self.referents.position)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if !SdPair::ALL.contains(&self.referents.sd_pair) {
            return Err(Error::InvalidConfig(format!(
                "referent sigma pair {} is not one of the studied pairs",
                self.referents.sd_pair.label()
            )));
        }
        Ok(())
    }

    /// Coefficient tags and names, in design-matrix column order.
    pub fn coefficients(&self) -> Vec<(Term, String)> {
        let mut names = vec![(Term::Intercept, "intercept".to_string())];
        for v in self.vis_levels() {
            names.push((Term::Vis, format!("vis[{}]", v.label())));
        }
        for s in self.scaling_levels() {
            names.push((Term::Scaling, format!("scaling[{}]", s.label())));
        }
        for sd in self.sd_levels() {
            names.push((Term::Sd, format!("sd[{}]", sd.label())));
        }
        for p in self.position_levels() {
            names.push((Term::Position, format!("position[{}]", p.label())));
        }
        for v in self.vis_levels() {
            for s in self.scaling_levels() {
                names.push((
                    Term::VisScaling,
                    format!("vis[{}]:scaling[{}]", v.label(), s.label()),
                ));
            }
        }
        for v in self.vis_levels() {
            for sd in self.sd_levels() {
                names.push((
                    Term::VisSd,
                    format!("vis[{}]:sd[{}]", v.label(), sd.label()),
                ));
            }
        }
        names
    }

    pub fn coefficient_count(&self) -> usize {
        let v = self.vis_levels().len();
        let s = self.scaling_levels().len();
        let d = self.sd_levels().len();
        let p = self.position_levels().len();
        1 + v + s + d + p + v * s + v * d
    }

    /// One design-matrix row; the column order matches [`coefficients`].
    ///
    /// [`coefficients`]: ModelSpec::coefficients
    pub fn row(
        &self,
        vis: VisCondition,
        scaling: Scaling,
        sd_pair: SdPair,
        position: Position,
    ) -> Vec<f64> {
        let mut row = vec![1.0];
        let vis_dummies: Vec<f64> = self.vis_levels().iter().map(|&v| ind(v == vis)).collect();
        let scaling_dummies: Vec<f64> = self
            .scaling_levels()
            .iter()
            .map(|&s| ind(s == scaling))
            .collect();
        let sd_dummies: Vec<f64> = self
            .sd_levels()
            .iter()
            .map(|sd| ind(*sd == sd_pair))
            .collect();
        row.extend(&vis_dummies);
        row.extend(&scaling_dummies);
        row.extend(&sd_dummies);
        row.extend(self.position_levels().iter().map(|&p| ind(p == position)));
        for &v in &vis_dummies {
            for &s in &scaling_dummies {
                row.push(v * s);
            }
        }
        for &v in &vis_dummies {
            for &sd in &sd_dummies {
                row.push(v * sd);
            }
        }
        row
    }
}

/// One fitted coefficient.
#[derive(Debug, Clone, Serialize)]
pub struct Coefficient {
    pub term: Term,
    pub name: String,
    pub estimate: f64,
    /// Wald standard error; NaN when the information matrix could not be
    /// inverted (serialized as null).
    pub stderr: f64,
}

/// Result of a logistic fit, including enough diagnostics to tell a clean
/// convergence from a degenerate one.
#[derive(Debug, Clone, Serialize)]
pub struct LogisticFit {
    pub coefficients: Vec<Coefficient>,
    pub converged: bool,
    pub iterations: usize,
    /// Binomial log-likelihood up to the fixed combinatorial constant.
    pub log_likelihood: f64,
    /// Human-readable reason whenever the fit is not a clean convergence.
    pub diagnostic: Option<String>,
    pub n_observations: usize,
    pub n_groups: usize,
}

impl LogisticFit {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^x) without overflow for large |x|.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn log_likelihood(x: &DMatrix<f64>, y: &DVector<f64>, n: &DVector<f64>, beta: &DVector<f64>) -> f64 {
    let eta = x * beta;
    (0..eta.len())
        .map(|i| y[i] * eta[i] - n[i] * softplus(eta[i]))
        .sum()
}

fn gradient(x: &DMatrix<f64>, y: &DVector<f64>, n: &DVector<f64>, beta: &DVector<f64>) -> DVector<f64> {
    let probs = (x * beta).map(sigmoid);
    x.transpose() * (y - n.component_mul(&probs))
}

fn information(x: &DMatrix<f64>, n: &DVector<f64>, beta: &DVector<f64>) -> DMatrix<f64> {
    let probs = (x * beta).map(sigmoid);
    let weights = n.component_mul(&probs).component_mul(&probs.map(|p| 1.0 - p));
    x.transpose() * DMatrix::from_diagonal(&weights) * x
}

const MAX_ITERATIONS: usize = 100;
/// |Δ log-likelihood| below this counts as converged.
const LL_TOLERANCE: f64 = 1e-10;
/// A converged fit must also have a gradient this small (max-norm).
const GRADIENT_TOLERANCE: f64 = 1e-8;
/// Coefficients drifting past this magnitude while the likelihood still
/// improves are treated as complete separation, not convergence.
const SEPARATION_BOUND: f64 = 15.0;

/// Fits the factorial accuracy model by Newton–Raphson. Never panics on
/// degenerate data: complete separation comes back as a flagged,
/// non-converged fit, while a rank-deficient design is a hard error.
pub fn fit_logistic(observations: &[Observation], spec: &ModelSpec) -> Result<LogisticFit> {
    spec.validate()?;
    if observations.is_empty() {
        return Err(Error::FitFailed("no observations to fit".to_string()));
    }

    // Pool into binomial groups keyed by the (0/1) design row.
    let mut groups: BTreeMap<Vec<u8>, (f64, f64)> = BTreeMap::new();
    for obs in observations {
        let row = spec.row(obs.vis, obs.scaling, obs.sd_pair, obs.position);
        let key: Vec<u8> = row.iter().map(|&v| v as u8).collect();
        let entry = groups.entry(key).or_insert((0.0, 0.0));
        entry.0 += f64::from(u8::from(obs.correct));
        entry.1 += 1.0;
    }
    let p = spec.coefficient_count();
    let g = groups.len();
    let x = DMatrix::from_fn(g, p, {
        let keys: Vec<&Vec<u8>> = groups.keys().collect();
        move |i, j| f64::from(keys[i][j])
    });
    let y = DVector::from_iterator(g, groups.values().map(|&(successes, _)| successes));
    let n = DVector::from_iterator(g, groups.values().map(|&(_, trials)| trials));

    let mut beta = DVector::zeros(p);
    let mut ll = log_likelihood(&x, &y, &n, &beta);
    let mut iterations = 0;
    let mut converged = false;
    let mut diagnostic: Option<String> = None;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let grad = gradient(&x, &y, &n, &beta);
        let info = information(&x, &n, &beta);
        let Some(chol) = Cholesky::new(info) else {
            if beta.amax() > SEPARATION_BOUND / 1.5 {
                // The curvature flattened out because fitted probabilities
                // saturated at 0/1 — separation, not a modeling error.
                diagnostic = Some(format!(
                    "probable complete separation: information matrix lost rank \
                     with |coefficient| at {:.1}",
                    beta.amax()
                ));
                break;
            }
            return Err(Error::FitFailed(
                "design matrix is rank-deficient; a factor level is missing or \
                 perfectly confounded with another"
                    .to_string(),
            ));
        };
        beta += chol.solve(&grad);
        let new_ll = log_likelihood(&x, &y, &n, &beta);
        let improved = new_ll >= ll - LL_TOLERANCE;
        let delta_ll = (new_ll - ll).abs();
        ll = new_ll;
        if beta.amax() > SEPARATION_BOUND && improved {
            diagnostic = Some(format!(
                "probable complete separation: |coefficient| reached {:.1} while \
                 the likelihood kept improving",
                beta.amax()
            ));
            break;
        }
        if delta_ll < LL_TOLERANCE {
            let grad_norm = gradient(&x, &y, &n, &beta).amax();
            converged = grad_norm < GRADIENT_TOLERANCE;
            if !converged {
                diagnostic = Some(format!(
                    "likelihood plateaued with gradient max-norm {grad_norm:.2e}"
                ));
            }
            break;
        }
    }
    if !converged && diagnostic.is_none() {
        diagnostic = Some(format!(
            "no convergence within {MAX_ITERATIONS} iterations"
        ));
    }

    // Wald standard errors from the inverse information at the final fit.
    let stderrs: Vec<f64> = match Cholesky::new(information(&x, &n, &beta)) {
        Some(chol) => {
            let covariance = chol.inverse();
            (0..p).map(|j| covariance[(j, j)].sqrt()).collect()
        }
        None => {
            if diagnostic.is_none() {
                diagnostic = Some(
                    "information matrix is singular at the optimum; standard \
                     errors are unavailable"
                        .to_string(),
                );
            }
            vec![f64::NAN; p]
        }
    };

    let coefficients = spec
        .coefficients()
        .into_iter()
        .zip(beta.iter().zip(&stderrs))
        .map(|((term, name), (&estimate, &stderr))| Coefficient {
            term,
            name,
            estimate,
            stderr,
        })
        .collect();
    Ok(LogisticFit {
        coefficients,
        converged,
        iterations,
        log_likelihood: ll,
        diagnostic,
        n_observations: observations.len(),
        n_groups: g,
    })
}

/// Draws Bernoulli outcomes from a fully specified model — the fixture for
/// checking that [`fit_logistic`] recovers planted coefficients.
pub fn sample_from_model(
    spec: &ModelSpec,
    beta: &[f64],
    cells: &[FactorialCell],
    reps: u32,
    seed: u64,
) -> Result<Vec<Observation>> {
    spec.validate()?;
    if beta.len() != spec.coefficient_count() {
        return Err(Error::InvalidConfig(format!(
            "expected {} coefficients, got {}",
            spec.coefficient_count(),
            beta.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cells.len() * reps as usize);
    for cell in cells {
        let row = spec.row(cell.vis, cell.scaling, cell.sd_pair, cell.position);
        let eta: f64 = row.iter().zip(beta).map(|(r, b)| r * b).sum();
        let probability = sigmoid(eta);
        for _ in 0..reps {
            out.push(Observation {
                vis: cell.vis,
                scaling: cell.scaling,
                sd_pair: cell.sd_pair,
                position: cell.position,
                correct: rng.gen::<f64>() < probability,
            });
        }
    }
    Ok(out)
}
