//! Chaotic iterations of the negation map.
//!
//! A [`Point`] pairs a (finite) strategy with a configuration. One step
//! negates the component named by the head of the strategy and drops that
//! head.

use crate::bits::{check_same_n, Configuration};
use crate::error::{Error, Result};
use crate::keystream::Strategy;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    strategy: Strategy,
    config: Configuration,
}

impl Point {
    pub fn new(strategy: Strategy, config: Configuration) -> Result<Self> {
        if strategy.n() != config.n() {
            return Err(Error::Dimension(format!(
                "strategy over {} components, configuration of {} bits",
                strategy.n(),
                config.n()
            )));
        }
        Ok(Self { strategy, config })
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn n(&self) -> usize {
        self.config.n()
    }

    pub fn into_parts(self) -> (Strategy, Configuration) {
        (self.strategy, self.config)
    }
}

/// Negates bit `s` of `x`.
pub fn f_neg(s: usize, x: &Configuration) -> Result<Configuration> {
    if s >= x.n() {
        return Err(Error::Dimension(format!("index {s} out of range for {} bits", x.n())));
    }
    let mut out = x.clone();
    out.flip_unchecked(s);
    Ok(out)
}

/// One application of the lifted map: shift the strategy, negate its head.
pub fn g_neg_step(mut p: Point) -> Result<Point> {
    let head = p.strategy.shift().ok_or(Error::ExhaustedStrategy)?;
    // terms are range-checked on construction
    p.config.flip_unchecked(head);
    Ok(p)
}

/// Runs the whole strategy and returns the final configuration.
pub fn iterate(p: &Point) -> Configuration {
    let mut config = p.config.clone();
    for s in p.strategy.iter() {
        config.flip_unchecked(s);
    }
    config
}

/// Ascending indices where `x` and `y` differ; replaying them from `x`
/// reaches `y` in at most `n` steps.
pub fn reach_strategy(x: &Configuration, y: &Configuration) -> Result<Strategy> {
    check_same_n(x, y)?;
    let diff = x
        .bits()
        .iter()
        .zip(y.bits().iter())
        .enumerate()
        .filter(|(_, (a, b))| a != b)
        .map(|(i, _)| i);
    Strategy::new(diff, x.n())
}
