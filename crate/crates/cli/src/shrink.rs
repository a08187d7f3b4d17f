//! Witness minimization for failing relations.
//!
//! Three passes, each change kept only if the relation still fails: redraw
//! the instance at every smaller dimension from the same seed (the smallest
//! failing one wins), zero whole operators, then halve operators. Every evaluation counts against the budget.

use arad::catalog::{evaluate, CheckOutcome, EvalOptions, Verdict};
use arad::generate::gen_instance_sized;
use arad::{CMat, Instance, Profile};

/// Halvings tried per operator.
const MAX_HALVINGS: usize = 8;

#[derive(Debug, Clone)]
pub struct Shrunk {
    pub instance: Instance,
    pub outcome: CheckOutcome,
    pub steps: usize,
}

struct Shrinker<'a> {
    id: &'a str,
    opts: &'a EvalOptions,
    budget: usize,
    steps: usize,
}

impl Shrinker<'_> {
    fn fails(&mut self, inst: &Instance) -> Option<CheckOutcome> {
        if self.steps >= self.budget {
            return None;
        }
        self.steps += 1;
        evaluate(self.id, inst, self.opts)
            .ok()
            .filter(|o| o.verdict == Verdict::Fail)
    }
}

/// Shrinks `inst`, which fails relation `id` with `outcome`. The profile and
/// seed let smaller dimensions be redrawn.
pub fn shrink(
    id: &str,
    profile: &Profile,
    seed: u64,
    inst: Instance,
    outcome: CheckOutcome,
    opts: &EvalOptions,
    budget: usize,
) -> Shrunk {
    let mut s = Shrinker {
        id,
        opts,
        budget,
        steps: 0,
    };
    let mut best = Shrunk {
        instance: inst,
        outcome,
        steps: 0,
    };

    let lo = profile.dims.0.max(1);
    let n = best.instance.dim();
    for d in (lo..n).rev() {
        let Ok(candidate) = gen_instance_sized(profile, seed, Some(d)) else {
            continue;
        };
        if let Some(o) = s.fails(&candidate) {
            best.instance = candidate;
            best.outcome = o;
        }
    }

    let names: Vec<String> = best.instance.operators.keys().cloned().collect();
    for name in &names {
        let n = best.instance.dim();
        let mut candidate = best.instance.clone();
        candidate.operators.insert(name.clone(), CMat::zeros(n, n));
        if best.instance.operators[name] == candidate.operators[name] {
            continue;
        }
        if let Some(o) = s.fails(&candidate) {
            best.instance = candidate;
            best.outcome = o;
        }
    }

    for name in &names {
        for _ in 0..MAX_HALVINGS {
            let mut candidate = best.instance.clone();
            let t = candidate
                .operators
                .get_mut(name)
                .expect("names come from the instance");
            if t.iter().all(|z| z.norm() == 0.0) {
                break;
            }
            *t = t.scale(0.5);
            match s.fails(&candidate) {
                Some(o) => {
                    best.instance = candidate;
                    best.outcome = o;
                }
                None => break,
            }
        }
    }
    best.steps = s.steps;
    best
}
