//! Valuation harness: instance generation, identity checks and reproducible suites.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

pub mod checks;
pub mod generators;
pub mod suite;

pub use checks::{
    check_equivariance, check_projection_property, check_valuation_identity, sublinearity_counterexample, CaseResult,
    Operator, SublinearityCounterexample, Variance, Witness,
};
pub use generators::{
    generate_simplex_splits, generate_union_chain, transform_battery, unimodular_maps, Quadruple, SimplexSplit,
    UnionChain,
};
pub use suite::{operator_registry, run_suite, Bundle, NamedOperator, SuiteConfig, Verdict, FAMILY_GROUPS, SUITES};

/// Order-preserving parallel map over scoped threads.
pub fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(items.len().max(1));
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("no poisoned slot")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("no poisoned slot").into_iter().map(|r| r.expect("filled")).collect()
}
