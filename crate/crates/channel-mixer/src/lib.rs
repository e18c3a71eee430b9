//! Convex mixtures of single-qubit Pauli channels: what do you get when you
//! mix two Markovian channels, or two non-Markovian ones?
//!
//! This crate builds the full desk-scale toolchain for that question:
//! time-parameterised Pauli channel families and their decay rates, exact
//! density-matrix simulation of the ancilla circuits that realise them,
//! shot-sampled process tomography with maximum-likelihood chi-matrix
//! reconstruction, and a divisibility analysis that classifies each channel
//! as Markovian or non-Markovian from the spectrum of intermediate-map Choi
//! matrices.
//!
//! The examples are the front door; each one exercises one capability:
//!
//! ```text
//! cargo run -p channel-mixer --example channel_families      # probability vectors, decay rates
//! cargo run -p channel-mixer --example circuit_channels      # ancilla circuits vs analytic channels
//! cargo run -p channel-mixer --example process_tomography    # counts -> chi_p -> MLE chi_c
//! cargo run -p channel-mixer --example divisibility_scan     # intermediate maps, CP verdicts
//! cargo run -p channel-mixer --example design_tradeoff       # the engineered depolarizing pair
//! cargo run -p channel-mixer --example full_experiment       # end-to-end run, CSV output
//! ```
//!
//! The same pipelines are reachable from the `channel-mixer` binary
//! (`run`, `scan`, `tomo`, `verify` subcommands).

#![forbid(unsafe_code)]

pub mod channels;
pub mod circuits;
pub mod divisibility;
pub mod experiment;
pub mod optim;
pub mod reconstruction;
pub mod qmath;
pub mod verify;
