//! Seeded synthetic series with known statistical structure.
//!
//! The random stream is fixed at the bit level so that fixtures regenerate
//! identically in any implementation:
//!
//! * state advance: `state += 0x9E3779B97F4A7C15` (wrapping), then the
//!   SplitMix64 finalizer `z ^= z >> 30; z *= 0xBF58476D1CE4E5B9;
//!   z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31`;
//! * uniform: `((z >> 11) + 0.5) * 2^-53`, strictly inside `(0, 1)`;
//! * normal: Box-Muller on two consecutive uniforms `u1, u2`, returning
//!   `sqrt(-2 ln u1) cos(2 pi u2)` first and `sqrt(-2 ln u1) sin(2 pi u2)`
//!   on the following call.
//!
//! Stationary kinds (AR(1) and the planted-causality pair) run a burn-in of
//! [`BURN_IN`] steps from a zero state before the first emitted value.

use std::f64::consts::PI;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::series::{AlignedPair, MonthIndex, MonthlySeries};

pub const BURN_IN: usize = 100;
pub const MIN_LENGTH: usize = 20;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
    spare_normal: Option<f64>,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self {
            state: seed,
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on the open interval (0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }
}

/// Which role a single generated series plays when written to disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Rd,
    Lgd,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthKind {
    WhiteNoise,
    RandomWalk,
    Ar1 {
        coefficient: f64,
    },
    /// `cause` is white noise; `effect(t) = own_lag * effect(t-1)
    /// + cross_coefficient * cause(t - cross_lag) + noise`.
    PlantedCausality {
        own_lag: f64,
        cross_coefficient: f64,
        cross_lag: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub length: usize,
    pub noise_std: f64,
    pub seed: u64,
    pub level_offset: f64,
    pub clamp_to_rate: bool,
    pub start: MonthIndex,
    pub name: String,
    pub role: Role,
}

impl SynthSpec {
    pub fn new(kind: SynthKind, length: usize, noise_std: f64, seed: u64) -> Self {
        Self {
            kind,
            length,
            noise_std,
            seed,
            level_offset: 0.0,
            clamp_to_rate: false,
            start: MonthIndex::new(2008, 1).expect("valid month"),
            name: "synthetic".into(),
            role: Role::Rd,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, reason: String| {
            Err(Error::InvalidSpec {
                field: field.into(),
                reason,
            })
        };
        if self.length < MIN_LENGTH {
            return bad("length", format!("must be at least {MIN_LENGTH}, got {}", self.length));
        }
        if !(self.noise_std.is_finite() && self.noise_std > 0.0) {
            return bad("noise_std", format!("must be positive, got {}", self.noise_std));
        }
        if !self.level_offset.is_finite() {
            return bad("level_offset", "must be finite".into());
        }
        match self.kind {
            SynthKind::Ar1 { coefficient } if !(coefficient.abs() < 1.0) => {
                bad("coefficient", format!("|coefficient| must be < 1, got {coefficient}"))
            }
            SynthKind::PlantedCausality { own_lag, .. } if !(own_lag.abs() < 1.0) => {
                bad("own_lag", format!("|own_lag| must be < 1, got {own_lag}"))
            }
            SynthKind::PlantedCausality {
                cross_coefficient, ..
            } if !cross_coefficient.is_finite() => {
                bad("cross_coefficient", "must be finite".into())
            }
            SynthKind::PlantedCausality { cross_lag, .. } if cross_lag == 0 => {
                bad("cross_lag", "must be at least 1".into())
            }
            _ => Ok(()),
        }
    }

    /// Parses a TOML spec file; unknown or malformed fields are reported by name.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawSpec = toml::from_str(text).map_err(|e| Error::InvalidSpec {
            field: e
                .span()
                .map(|s| field_at(text, s.start))
                .unwrap_or_else(|| "<file>".into()),
            reason: e.message().to_string(),
        })?;
        raw.into_spec()
    }

    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display(), e))?;
        Self::from_toml_str(&text)
    }
}

/// The key on the TOML line containing byte offset `pos`.
fn field_at(text: &str, pos: usize) -> String {
    let line_start = text[..pos.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
    let line = text[line_start..].lines().next().unwrap_or("");
    line.split('=').next().unwrap_or("").trim().to_string()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    kind: String,
    length: usize,
    noise_std: f64,
    seed: u64,
    #[serde(default)]
    level_offset: f64,
    #[serde(default)]
    clamp_to_rate: bool,
    start: Option<MonthIndex>,
    name: Option<String>,
    role: Option<Role>,
    coefficient: Option<f64>,
    own_lag: Option<f64>,
    cross_coefficient: Option<f64>,
    cross_lag: Option<usize>,
}

impl RawSpec {
    fn into_spec(self) -> Result<SynthSpec> {
        fn need<T>(v: Option<T>, field: &str, kind: &str) -> Result<T> {
            v.ok_or_else(|| Error::InvalidSpec {
                field: field.into(),
                reason: format!("required for kind `{kind}`"),
            })
        }
        let kind = match self.kind.as_str() {
            "white-noise" => SynthKind::WhiteNoise,
            "random-walk" => SynthKind::RandomWalk,
            "ar1" => SynthKind::Ar1 {
                coefficient: need(self.coefficient, "coefficient", "ar1")?,
            },
            "planted-causality" => SynthKind::PlantedCausality {
                own_lag: need(self.own_lag, "own_lag", "planted-causality")?,
                cross_coefficient: need(
                    self.cross_coefficient,
                    "cross_coefficient",
                    "planted-causality",
                )?,
                cross_lag: need(self.cross_lag, "cross_lag", "planted-causality")?,
            },
            other => {
                return Err(Error::InvalidSpec {
                    field: "kind".into(),
                    reason: format!(
                        "unknown kind `{other}` (white-noise, random-walk, ar1, planted-causality)"
                    ),
                })
            }
        };
        let mut spec = SynthSpec::new(kind, self.length, self.noise_std, self.seed);
        spec.level_offset = self.level_offset;
        spec.clamp_to_rate = self.clamp_to_rate;
        if let Some(start) = self.start {
            spec.start = start;
        }
        if let Some(name) = self.name {
            spec.name = name;
        }
        if let Some(role) = self.role {
            spec.role = role;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SynthData {
    Series(MonthlySeries),
    /// Planted-causality output: `rd` is the effect, `lgd` the cause.
    Pair(AlignedPair),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOutput {
    pub data: SynthData,
    /// Number of values moved into `[0, 1]` by clamping.
    pub truncated: usize,
}

/// Raw value vectors, before offset and clamping.
pub fn generate_values(spec: &SynthSpec) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    spec.validate()?;
    let mut rng = SplitMix64::new(spec.seed);
    let sd = spec.noise_std;
    let n = spec.length;
    Ok(match spec.kind {
        SynthKind::WhiteNoise => ((0..n).map(|_| sd * rng.next_normal()).collect(), None),
        SynthKind::RandomWalk => {
            let mut acc = 0.0;
            let v = (0..n)
                .map(|_| {
                    acc += sd * rng.next_normal();
                    acc
                })
                .collect();
            (v, None)
        }
        SynthKind::Ar1 { coefficient } => {
            let mut z = 0.0;
            let mut out = Vec::with_capacity(n);
            for t in 0..BURN_IN + n {
                z = coefficient * z + sd * rng.next_normal();
                if t >= BURN_IN {
                    out.push(z);
                }
            }
            (out, None)
        }
        SynthKind::PlantedCausality {
            own_lag,
            cross_coefficient,
            cross_lag,
        } => {
            let total = BURN_IN + n;
            let mut cause = vec![0.0; total];
            let mut effect = vec![0.0; total];
            for t in 0..total {
                cause[t] = sd * rng.next_normal();
                let own = if t > 0 { own_lag * effect[t - 1] } else { 0.0 };
                let cross = if t >= cross_lag {
                    cross_coefficient * cause[t - cross_lag]
                } else {
                    0.0
                };
                effect[t] = own + cross + sd * rng.next_normal();
            }
            (effect[BURN_IN..].to_vec(), Some(cause[BURN_IN..].to_vec()))
        }
    })
}

pub fn generate(spec: &SynthSpec) -> Result<SynthOutput> {
    let (primary, secondary) = generate_values(spec)?;
    let mut truncated = 0;
    let mut finish = |v: Vec<f64>| -> Vec<f64> {
        v.into_iter()
            .map(|x| {
                let x = x + spec.level_offset;
                if spec.clamp_to_rate && !(0.0..=1.0).contains(&x) {
                    truncated += 1;
                    x.clamp(0.0, 1.0)
                } else {
                    x
                }
            })
            .collect()
    };
    let primary = finish(primary);
    let secondary = secondary.map(&mut finish);
    let rate = spec.clamp_to_rate;
    let data = match secondary {
        None => SynthData::Series(MonthlySeries::new(
            spec.name.clone(),
            spec.start,
            primary,
            None,
            rate,
        )?),
        Some(cause) => {
            let rd = MonthlySeries::new(format!("{}_rd", spec.name), spec.start, primary, None, rate)?;
            let lgd = MonthlySeries::new(format!("{}_lgd", spec.name), spec.start, cause, None, rate)?;
            SynthData::Pair(AlignedPair::new(rd, lgd)?)
        }
    };
    Ok(SynthOutput { data, truncated })
}

/// Months in the crisis-shaped fixture (January 2008 through November 2011).
pub const FIXTURE_MONTHS: usize = 47;
/// Leading months of elevated default in the crisis-shaped fixture.
pub const FIXTURE_DOWNTURN_MONTHS: usize = 8;

/// A 47-month RD/LGD pair starting 2008-01 whose first eight months carry
/// elevated default rates, with exposure weights on LGD. Values are rounded
/// to four decimals and weights to cents so the fixture reads like a
/// spreadsheet export.
pub fn crisis_shaped_pair(seed: u64) -> AlignedPair {
    let mut rng = SplitMix64::new(seed);
    let round4 = |v: f64| (v * 1e4).round() / 1e4;
    let mut rd = Vec::with_capacity(FIXTURE_MONTHS);
    let mut lgd = Vec::with_capacity(FIXTURE_MONTHS);
    let mut weights = Vec::with_capacity(FIXTURE_MONTHS);
    for t in 0..FIXTURE_MONTHS {
        let level = if t < FIXTURE_DOWNTURN_MONTHS { 0.035 } else { 0.015 };
        let r = round4(level + 0.002 * rng.next_normal());
        let l = round4(0.24 + 0.9 * r + 0.005 * rng.next_normal());
        let w = ((1.0e6 + 1.5e5 * rng.next_normal()) * 100.0).round() / 100.0;
        rd.push(r);
        lgd.push(l);
        weights.push(w);
    }
    let start = MonthIndex::new(2008, 1).expect("valid month");
    let rd = MonthlySeries::rate("rd", start, rd).expect("fixture rd in range");
    let lgd = MonthlySeries::new("lgd", start, lgd, Some(weights), true).expect("fixture lgd in range");
    AlignedPair::new(rd, lgd).expect("fixture grid")
}
