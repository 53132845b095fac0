//! Seeded synthetic two-group datasets.
//!
//! Each sample draws a label, then a latent value centred at
//! `±separation/2` (plus `offset_b` in group `b`) with Gaussian noise. The
//! score is the logistic sigmoid of the latent value. A non-zero `shift`
//! warps group-`b` scores through `s ↦ s^exp(shift)`, a strictly increasing
//! map of (0, 1) onto itself, so rankings within `b` are untouched while the
//! score distribution moves.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::dataset::{AnchorChoice, Dataset};
use crate::error::{Error, Result};
use crate::metrics::ScoredSample;

pub const GROUP_A: &str = "a";
pub const GROUP_B: &str = "b";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SyntheticSpec {
    pub n_a: usize,
    pub n_b: usize,
    pub pos_rate_a: f64,
    pub pos_rate_b: f64,
    pub separation_a: f64,
    pub separation_b: f64,
    pub offset_b: f64,
    pub noise: f64,
    pub shift: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            n_a: 500,
            n_b: 500,
            pos_rate_a: 0.5,
            pos_rate_b: 0.5,
            separation_a: 2.0,
            separation_b: 2.0,
            offset_b: 0.0,
            noise: 1.0,
            shift: 0.0,
        }
    }
}

impl SyntheticSpec {
    pub fn with_sizes(mut self, n_a: usize, n_b: usize) -> Self {
        self.n_a = n_a;
        self.n_b = n_b;
        self
    }

    pub fn with_shift(mut self, shift: f64) -> Self {
        self.shift = shift;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_a == 0 || self.n_b == 0 {
            return Err(Error::Spec("group sizes must be at least 1".into()));
        }
        for (name, r) in [("pos_rate_a", self.pos_rate_a), ("pos_rate_b", self.pos_rate_b)] {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::Spec(format!("{name} must lie strictly between 0 and 1, got {r}")));
            }
        }
        for (name, v) in [
            ("separation_a", self.separation_a),
            ("separation_b", self.separation_b),
            ("offset_b", self.offset_b),
            ("shift", self.shift),
        ] {
            if !v.is_finite() {
                return Err(Error::Spec(format!("{name} must be finite, got {v}")));
            }
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::Spec(format!("noise must be a finite non-negative number, got {}", self.noise)));
        }
        Ok(())
    }
}

/// Parses `key=value` pairs separated by commas, starting from the defaults.
impl FromStr for SyntheticSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut spec = SyntheticSpec::default();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::Spec(format!("`{pair}` is not key=value")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = || Error::Spec(format!("cannot parse `{value}` for {key}"));
            match key {
                "n_a" => spec.n_a = value.parse().map_err(|_| bad())?,
                "n_b" => spec.n_b = value.parse().map_err(|_| bad())?,
                _ => {
                    let v: f64 = value.parse().map_err(|_| bad())?;
                    match key {
                        "pos_rate_a" => spec.pos_rate_a = v,
                        "pos_rate_b" => spec.pos_rate_b = v,
                        "separation_a" => spec.separation_a = v,
                        "separation_b" => spec.separation_b = v,
                        "offset_b" => spec.offset_b = v,
                        "noise" => spec.noise = v,
                        "shift" => spec.shift = v,
                        other => return Err(Error::Spec(format!("unknown key `{other}`"))),
                    }
                }
            }
        }
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for SyntheticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n_a={},n_b={},pos_rate_a={},pos_rate_b={},separation_a={},separation_b={},offset_b={},noise={},shift={}",
            self.n_a,
            self.n_b,
            self.pos_rate_a,
            self.pos_rate_b,
            self.separation_a,
            self.separation_b,
            self.offset_b,
            self.noise,
            self.shift
        )
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Draws a dataset; group `a` is the anchor.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<Dataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let warp = spec.shift.exp();
    let mut samples = Vec::with_capacity(spec.n_a + spec.n_b);
    let groups = [
        (GROUP_A, spec.n_a, spec.pos_rate_a, spec.separation_a, 0.0),
        (GROUP_B, spec.n_b, spec.pos_rate_b, spec.separation_b, spec.offset_b),
    ];
    for (tag, n, rate, sep, offset) in groups {
        for t in 0..n {
            let label = rng.random_bool(rate);
            let z: f64 = rng.sample(StandardNormal);
            let centre = if label { sep / 2.0 } else { -sep / 2.0 };
            let mut score = sigmoid(centre + offset + spec.noise * z);
            if tag == GROUP_B && spec.shift != 0.0 {
                score = score.powf(warp);
            }
            samples.push(ScoredSample::new(format!("{tag}{t}"), tag, label, score)?);
        }
    }
    Dataset::from_samples(samples, &AnchorChoice::Tag(GROUP_A.into()), format!("synthetic:{spec};seed={seed}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_data() {
        let spec: SyntheticSpec = "n_a=10,n_b=10,pos_rate_a=0.5,pos_rate_b=0.5".parse().unwrap();
        assert_eq!(generate_synthetic(&spec, 7).unwrap(), generate_synthetic(&spec, 7).unwrap());
        assert_ne!(
            generate_synthetic(&spec, 7).unwrap().samples,
            generate_synthetic(&spec, 8).unwrap().samples
        );
    }

    #[test]
    fn invalid_specs_rejected() {
        for bad in ["pos_rate_a=1.0", "pos_rate_b=0", "n_a=0", "noise=-1", "colour=3", "n_a", "n_b=1.5"] {
            assert!(matches!(bad.parse::<SyntheticSpec>(), Err(Error::Spec(_))), "{bad}");
        }
    }

    #[test]
    fn display_parses_back() {
        let spec = SyntheticSpec {
            offset_b: -0.75,
            shift: 0.4,
            ..SyntheticSpec::default()
        };
        assert_eq!(spec.to_string().parse::<SyntheticSpec>().unwrap(), spec);
    }

    #[test]
    fn shift_keeps_ranking_within_b() {
        let spec = SyntheticSpec::default().with_sizes(5, 200);
        let plain = generate_synthetic(&spec, 3).unwrap();
        let warped = generate_synthetic(&spec.with_shift(0.8), 3).unwrap();
        let b = |d: &Dataset| d.samples.iter().filter(|s| s.group == GROUP_B).map(|s| s.score).collect::<Vec<_>>();
        let (p, w) = (b(&plain), b(&warped));
        for i in 0..p.len() {
            for j in 0..p.len() {
                assert_eq!(p[i] < p[j], w[i] < w[j]);
            }
            assert!(w[i] < p[i]);
        }
    }
}
