//! Progressive Boolean network tomography.
//!
//! Monitoring paths report only whether every node on them works. The crate
//! picks which path to probe next so that node states are settled with few
//! probes, using either exact Bayesian posteriors ([`strategies::PopGreedy`])
//! or a cheap centrality approximation ([`strategies::FaceGreedy`]).
//!
//! Modules follow the pipeline: [`topology`] builds graphs, paths and the
//! logical view of observations; [`bayes`] and [`centrality`] score it;
//! [`utility`] turns scores into expected gains; [`strategies`] drives
//! probing; [`metrics`] and [`harness`] evaluate runs.

pub mod bayes;
pub mod centrality;
pub mod harness;
pub mod metrics;
pub mod nodeset;
pub mod oracle;
pub mod strategies;
pub mod topology;
pub mod utility;

pub use nodeset::NodeSet;
