//! Seeded ground-truth sampling.

use rand::seq::index::sample;
use rand::Rng;

use super::config::FailureMode;
use super::HarnessError;
use crate::nodeset::NodeSet;
use crate::strategies::GroundTruth;

/// Draws the broken nodes of one repetition. `Fixed` picks a uniform
/// `k`-subset of `monitored`; `Iid` breaks each of the `universe` nodes
/// independently.
pub fn generate_failures<R: Rng>(
    universe: usize,
    monitored: &NodeSet,
    mode: FailureMode,
    rng: &mut R,
) -> Result<GroundTruth, HarnessError> {
    let mut failed = NodeSet::empty(universe);
    match mode {
        FailureMode::Fixed { k } => {
            let pool: Vec<usize> = monitored.iter().collect();
            if k > pool.len() {
                return Err(HarnessError::Invalid {
                    field: "failures.k".into(),
                    message: format!("{k} failures requested but only {} monitored nodes", pool.len()),
                });
            }
            let mut picks = sample(rng, pool.len(), k).into_vec();
            picks.sort_unstable();
            for i in picks {
                failed.insert(pool[i]);
            }
        }
        FailureMode::Iid { p } => {
            for v in 0..universe {
                if rng.gen::<f64>() < p {
                    failed.insert(v);
                }
            }
        }
    }
    Ok(GroundTruth::new(failed))
}
