//! Event-driven simulation of the accelerated generator by thinning: one
//! global rate, uniform particle selection, rejection for the (small) rate
//! inhomogeneity and for exclusion.

use super::rates::{drift_component, sample_glauber_angle, two_type_up_probability};
use crate::error::{Error, Result};
use crate::lattice::{Configuration, Direction, ALL_DIRECTIONS};
use crate::rng::substream;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Angle state space: the full circle, or the two-type restriction
/// `theta in {0, pi}` with the alignment density renormalized over the atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleKind {
    Continuum,
    TwoType,
}

/// Parameters of one run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub lambda: f64,
    pub beta: f64,
    pub kind: AngleKind,
    /// Macroscopic time horizon (bookkeeping; `advance` takes explicit spans).
    pub t_end: f64,
    pub seed: u64,
    pub max_event_budget: u64,
}

impl ModelParams {
    pub fn new(n: usize, lambda: f64, beta: f64, kind: AngleKind) -> Result<Self> {
        if lambda < 0.0 || beta < 0.0 {
            return Err(Error::InvalidParameter(
                "lambda and beta must be nonnegative".into(),
            ));
        }
        if lambda > n as f64 {
            return Err(Error::DriftTooStrong { lambda, n });
        }
        Ok(ModelParams {
            n,
            lambda,
            beta,
            kind,
            t_end: 1.0,
            seed: 0,
            max_event_budget: u64::MAX,
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_horizon(mut self, t_end: f64) -> Self {
        self.t_end = t_end;
        self
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.max_event_budget = budget;
        self
    }
}

/// One realized transition of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Event {
    /// Particle `particle` moved from `from` to `to`.
    Exchange {
        particle: usize,
        from: usize,
        to: usize,
        dir: Direction,
    },
    /// The angle at `site` was resampled.
    AngleFlip { site: usize, old: f64, new: f64 },
}

#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct EventCounters {
    pub exchange_attempts: u64,
    pub accepted_exchanges: u64,
    pub rejected_by_exclusion: u64,
    pub rejected_by_thinning: u64,
    pub angle_flips: u64,
}

/// Outcome of an `advance` call.
#[derive(Debug, Clone, Copy)]
pub struct AdvanceReport {
    /// False when the event budget ran out before the requested span.
    pub completed: bool,
    pub events: u64,
}

/// A running simulation: configuration, macroscopic clock, per-particle
/// unwrapped displacements, counters and the RNG stream.
#[derive(Debug, Clone)]
pub struct SimulationState {
    params: ModelParams,
    config: Configuration,
    t: f64,
    displacement: Vec<(i64, i64)>,
    counters: EventCounters,
    events_used: u64,
    rng: ChaCha12Rng,
}

impl SimulationState {
    pub fn new(params: ModelParams, config: Configuration) -> Result<Self> {
        if config.geometry().side() != params.n {
            return Err(Error::GridMismatch(format!(
                "configuration side {} vs params N {}",
                config.geometry().side(),
                params.n
            )));
        }
        let k = config.particle_count();
        let rng = substream(params.seed, "dynamics");
        Ok(SimulationState {
            params,
            config,
            t: 0.0,
            displacement: vec![(0, 0); k],
            counters: EventCounters::default(),
            events_used: 0,
            rng,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn configuration(&self) -> &Configuration {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn counters(&self) -> &EventCounters {
        &self.counters
    }

    /// Unwrapped displacement of particle `p` since the start of the run.
    pub fn displacement(&self, p: usize) -> (i64, i64) {
        self.displacement[p]
    }

    pub fn displacements(&self) -> &[(i64, i64)] {
        &self.displacement
    }

    /// Global event rate `K [4 N^2 (1 + lambda/N) + 1]`.
    fn total_rate(&self) -> f64 {
        let k = self.config.particle_count() as f64;
        let n = self.params.n as f64;
        k * (4.0 * n * n * (1.0 + self.params.lambda / n) + 1.0)
    }

    /// Advances to the next realized transition, unless it falls beyond
    /// `t_target` — in that case the clock moves to `t_target` and no event
    /// happens. Thinning rejections are internal (they consume holding time
    /// but produce no transition) yet still count against the event budget.
    pub fn step_until(&mut self, t_target: f64) -> Option<Event> {
        let n = self.params.n as f64;
        let envelope = 1.0 + self.params.lambda / n;
        let rate = self.total_rate();
        if rate == 0.0 {
            self.t = t_target;
            return None;
        }
        let p_exchange = 4.0 * n * n * envelope / (4.0 * n * n * envelope + 1.0);
        loop {
            let hold = -self.rng.gen::<f64>().max(f64::MIN_POSITIVE).ln() / rate;
            if self.t + hold > t_target {
                self.t = t_target;
                return None;
            }
            self.t += hold;
            self.events_used += 1;
            let k = self.config.particle_count();
            let p = self.rng.gen_range(0..k);
            let site = self.config.particle_sites()[p] as usize;
            if self.rng.gen::<f64>() < p_exchange {
                self.counters.exchange_attempts += 1;
                let dir = ALL_DIRECTIONS[self.rng.gen_range(0..4)];
                let li = drift_component(self.params.lambda, self.config.angle_at(site), dir.axis());
                let accept = (1.0 + dir.sign() * li / n) / envelope;
                if self.rng.gen::<f64>() >= accept {
                    self.counters.rejected_by_thinning += 1;
                    continue;
                }
                let target = self.config.geometry().neighbor(site, dir);
                if self.config.is_occupied(target) {
                    self.counters.rejected_by_exclusion += 1;
                    continue;
                }
                self.config.swap(site, target);
                let (dx, dy) = dir.delta();
                self.displacement[p].0 += dx;
                self.displacement[p].1 += dy;
                self.counters.accepted_exchanges += 1;
                return Some(Event::Exchange {
                    particle: p,
                    from: site,
                    to: target,
                    dir,
                });
            }
            let old = self.config.angle_at(site);
            let new = match self.params.kind {
                AngleKind::Continuum => {
                    sample_glauber_angle(&self.config, site, self.params.beta, &mut self.rng)
                }
                AngleKind::TwoType => {
                    let up = two_type_up_probability(&self.config, site, self.params.beta);
                    if self.rng.gen::<f64>() < up {
                        0.0
                    } else {
                        PI
                    }
                }
            };
            self.config.set_angle(site, new).expect("occupied by selection");
            self.counters.angle_flips += 1;
            return Some(Event::AngleFlip { site, old, new });
        }
    }

    /// Runs the chain for a macroscopic span `dt`. Returns early (with
    /// `completed: false`) if the event budget is exhausted.
    pub fn advance(&mut self, dt: f64) -> AdvanceReport {
        let target = self.t + dt;
        let start_events = self.events_used;
        loop {
            if self.events_used >= self.params.max_event_budget {
                return AdvanceReport {
                    completed: self.t >= target,
                    events: self.events_used - start_events,
                };
            }
            if self.step_until(target).is_none() {
                return AdvanceReport {
                    completed: true,
                    events: self.events_used - start_events,
                };
            }
        }
    }
}
