//! Batch normalization and exhaustive termination sweeps.
//!
//! With the `parallel` feature the batch entry points fan out over rayon;
//! the sequential variants are always available and produce identical output.

use serde::Serialize;

use crate::enumerate::Enumerator;
use crate::rewrite::{NormalizeOptions, RuleSystem, Strategy};
use crate::term::Term;
use crate::types::Type;

/// Normal form and step count, or `None` when fuel ran out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub normal_form: Option<Term>,
    pub steps: usize,
}

fn run(rs: &RuleSystem, t: &Term, fuel: usize, strategy: Strategy) -> Outcome {
    let opts = NormalizeOptions {
        fuel,
        strategy,
        record_trace: false,
    };
    match rs.normalize(t, &opts) {
        Ok(n) => Outcome {
            normal_form: Some(n.normal_form),
            steps: n.steps,
        },
        Err(_) => Outcome {
            normal_form: None,
            steps: fuel,
        },
    }
}

pub fn normalize_batch_sequential(rs: &RuleSystem, terms: &[Term], fuel: usize, strategy: Strategy) -> Vec<Outcome> {
    terms.iter().map(|t| run(rs, t, fuel, strategy)).collect()
}

#[cfg(feature = "parallel")]
pub fn normalize_batch_parallel(rs: &RuleSystem, terms: &[Term], fuel: usize, strategy: Strategy) -> Vec<Outcome> {
    use rayon::prelude::*;
    terms.par_iter().map(|t| run(rs, t, fuel, strategy)).collect()
}

/// Parallel when the feature is enabled, sequential otherwise. Order is preserved.
pub fn normalize_batch(rs: &RuleSystem, terms: &[Term], fuel: usize, strategy: Strategy) -> Vec<Outcome> {
    #[cfg(feature = "parallel")]
    return normalize_batch_parallel(rs, terms, fuel, strategy);
    #[cfg(not(feature = "parallel"))]
    return normalize_batch_sequential(rs, terms, fuel, strategy);
}

#[derive(Debug, Clone, Copy)]
pub struct SweepOptions {
    pub max_weight: usize,
    pub fuel: usize,
    /// Also normalize innermost and compare normal forms.
    pub compare_strategies: bool,
    /// Stop after this many fuel exhaustions.
    pub max_failures: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            max_weight: 8,
            fuel: 100_000,
            compare_strategies: true,
            max_failures: 3,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SweepReport {
    pub terms: usize,
    pub max_steps: usize,
    /// Terms whose normalization ran out of fuel.
    pub exhausted: Vec<String>,
    /// `(term, outermost normal form, innermost normal form)`.
    pub disagreements: Vec<(String, String, String)>,
    /// The sweep stopped early at `max_failures`.
    pub aborted: bool,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.exhausted.is_empty() && self.disagreements.is_empty() && !self.aborted
    }
}

/// Normalizes every closed term of every inductive type up to `max_weight`.
pub fn sn_sweep(rs: &RuleSystem, opts: &SweepOptions) -> SweepReport {
    let sig = rs.signature();
    let mut e = Enumerator::new(sig);
    let mut report = SweepReport::default();
    let types: Vec<Type> = sig.inductive_names().map(|n| Type::ind(n.clone())).collect();
    'sizes: for w in 1..=opts.max_weight {
        for ty in &types {
            let terms = e.exact(ty, w);
            if terms.is_empty() {
                continue;
            }
            report.terms += terms.len();
            let outer = normalize_batch(rs, &terms, opts.fuel, Strategy::Outermost);
            let inner = if opts.compare_strategies {
                Some(normalize_batch(rs, &terms, opts.fuel, Strategy::Innermost))
            } else {
                None
            };
            for (i, t) in terms.iter().enumerate() {
                let o = &outer[i];
                report.max_steps = report.max_steps.max(o.steps);
                let mut failed = o.normal_form.is_none();
                if let Some(inner) = &inner {
                    let n = &inner[i];
                    report.max_steps = report.max_steps.max(n.steps);
                    failed |= n.normal_form.is_none();
                    if let (Some(a), Some(b)) = (&o.normal_form, &n.normal_form) {
                        if a != b {
                            report.disagreements.push((t.to_string(), a.to_string(), b.to_string()));
                        }
                    }
                }
                if failed {
                    report.exhausted.push(t.to_string());
                    if report.exhausted.len() >= opts.max_failures {
                        report.aborted = true;
                        break 'sizes;
                    }
                }
            }
        }
    }
    report
}
