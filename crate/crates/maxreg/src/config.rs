//! Experiment configuration: one JSON document driving the CLI commands.
//!
//! Complex numbers are `[re, im]` pairs; matrices are row-major flat arrays
//! of such pairs. Emission uses canonical JSON (stable field order, shortest
//! round-trip floats), so emit -> parse -> emit is byte-identical.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bank;
use crate::dyadic::SmoothnessParams;
use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::linalg::CMat;
use crate::solver::EnrichedSpace;
use crate::spaces::{SpaceDescriptor, Weight};
use crate::symbols::{ConvolutionSymbol, FrequencySymbol, OperatorPencil, SymbolDomain};

/// Summability index that serializes infinity as the string `"inf"`.
mod q_value {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &f64, s: S) -> Result<S::Ok, S::Error> {
        if q.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*q)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(x) => Ok(x),
            Raw::Word(w) if w == "inf" => Ok(f64::INFINITY),
            Raw::Word(w) => Err(D::Error::custom(format!(
                "expected a number or \"inf\" for q, got {w:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pencil: Option<PencilConfig>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spaces: Vec<SpaceConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bank: Option<BankConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub forcing: Option<SignalConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PencilConfig {
    pub dim: usize,
    /// Zero-order matrix `A`, row-major `[re, im]` pairs.
    pub a: Vec<[f64; 2]>,
    /// First-order matrix `B`.
    pub b: Vec<[f64; 2]>,
    /// Second-order matrix `P`.
    pub p: Vec<[f64; 2]>,
    pub chat: ChatConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChatConfig {
    Zero,
    Memory { lambda: f64, matrix: Vec<[f64; 2]> },
    Decomposed { c0: PartConfig, c1: PartConfig },
}

/// Component of a decomposed convolution symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PartConfig {
    Constant { matrix: Vec<[f64; 2]> },
    Memory { lambda: f64, matrix: Vec<[f64; 2]> },
    SignJump { matrix: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceConfig {
    Lp {
        p: f64,
    },
    WeightedLp {
        p: f64,
        weight: WeightFnConfig,
    },
    Lorentz {
        p: f64,
    },
    Besov {
        s: f64,
        #[serde(with = "q_value")]
        q: f64,
        p: f64,
    },
    Triebel {
        s: f64,
        #[serde(with = "q_value")]
        q: f64,
        p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightFnConfig {
    /// `w(t) = max(|t|, h)^exponent`.
    Power { exponent: f64 },
    /// `w(t) = (1 + |t|)^exponent`.
    ShiftedPower { exponent: f64 },
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BankConfig {
    /// Modes per dyadic band, Gaussian bumps, and band-limited noise.
    Standard { seed: u64, size: usize },
    /// Pure band-limited noise.
    BandNoise { seed: u64, size: usize, fraction: f64 },
    /// All-zero elements (degenerate-path checks).
    Zero { size: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SignalConfig {
    Zero,
    Ones,
    /// `exp(i omega t) v` with `omega = pi * index / T`.
    Mode {
        index: i64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Vec<[f64; 2]>>,
    },
    Gaussian {
        sigma: f64,
        center: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direction: Option<Vec<[f64; 2]>>,
    },
    Indicator {
        from: f64,
        to: f64,
    },
    /// `(1 + |t|)^exponent`.
    PowerLaw {
        exponent: f64,
    },
    BandNoise {
        seed: u64,
        fraction: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub p: f64,
    pub phi: SpaceConfig,
    pub g: SignalConfig,
    pub h: SignalConfig,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_override: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa_dual_override: Option<f64>,
}

fn default_depth() -> usize {
    crate::spaces::DEFAULT_RUBIO_DEPTH
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub formats: Vec<String>,
}

impl ExperimentConfig {
    pub fn parse_str(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Canonical emission: stable field order and a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn build_grid(&self, n_override: Option<usize>, t_override: Option<f64>) -> Result<Grid> {
        Grid::new(t_override.unwrap_or(self.grid.t), n_override.unwrap_or(self.grid.n))
    }
}

fn parse_matrix(entries: &[[f64; 2]], dim: usize, name: &str) -> Result<CMat> {
    if entries.len() != dim * dim {
        return Err(Error::InvalidArgument(format!(
            "matrix {name} needs {} row-major entries for dim {dim}, got {}",
            dim * dim,
            entries.len()
        )));
    }
    let mut m = Array2::zeros((dim, dim));
    for (i, [re, im]) in entries.iter().enumerate() {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "matrix {name} entry {i} is not finite"
            )));
        }
        m[(i / dim, i % dim)] = Complex64::new(*re, *im);
    }
    Ok(m)
}

fn parse_direction(dir: &Option<Vec<[f64; 2]>>, dim: usize) -> Result<Vec<Complex64>> {
    match dir {
        None => {
            let mut v = vec![Complex64::default(); dim];
            v[0] = Complex64::new(1.0, 0.0);
            Ok(v)
        }
        Some(entries) => {
            if entries.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "direction needs {dim} entries, got {}",
                    entries.len()
                )));
            }
            Ok(entries.iter().map(|[re, im]| Complex64::new(*re, *im)).collect())
        }
    }
}

impl PartConfig {
    fn build(&self, dim: usize) -> Result<FrequencySymbol> {
        Ok(match self {
            PartConfig::Constant { matrix } => FrequencySymbol::constant(
                parse_matrix(matrix, dim, "chat part")?,
                SymbolDomain::WholeLine,
            ),
            PartConfig::Memory { lambda, matrix } => {
                ConvolutionSymbol::memory(*lambda, parse_matrix(matrix, dim, "chat part")?)?
                    .symbol()
            }
            PartConfig::SignJump { matrix } => {
                FrequencySymbol::sign_jump(parse_matrix(matrix, dim, "chat part")?)
            }
        })
    }
}

impl ChatConfig {
    pub fn build(&self, dim: usize) -> Result<ConvolutionSymbol> {
        Ok(match self {
            ChatConfig::Zero => ConvolutionSymbol::zero(dim),
            ChatConfig::Memory { lambda, matrix } => {
                ConvolutionSymbol::memory(*lambda, parse_matrix(matrix, dim, "chat")?)?
            }
            ChatConfig::Decomposed { c0, c1 } => {
                ConvolutionSymbol::decomposed(c0.build(dim)?, c1.build(dim)?)?
            }
        })
    }
}

impl PencilConfig {
    pub fn build(&self) -> Result<OperatorPencil> {
        if self.dim == 0 {
            return Err(Error::InvalidArgument("pencil dim must be >= 1".into()));
        }
        OperatorPencil::new(
            parse_matrix(&self.a, self.dim, "a")?,
            parse_matrix(&self.b, self.dim, "b")?,
            parse_matrix(&self.p, self.dim, "p")?,
            self.chat.build(self.dim)?,
        )
    }
}

impl WeightFnConfig {
    pub fn build(&self, grid: Grid) -> Result<Weight> {
        match self {
            WeightFnConfig::Power { exponent } => {
                let h = grid.spacing();
                let e = *exponent;
                Weight::from_fn(grid, format!("max(|t|,h)^{e}"), move |t| t.abs().max(h).powf(e))
            }
            WeightFnConfig::ShiftedPower { exponent } => {
                let e = *exponent;
                Weight::from_fn(grid, format!("(1+|t|)^{e}"), move |t| (1.0 + t.abs()).powf(e))
            }
            WeightFnConfig::Constant { value } => {
                if !(value.is_finite() && *value > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "constant weight must be positive, got {value}"
                    )));
                }
                Ok(Weight::constant(grid, *value))
            }
        }
    }
}

impl SpaceConfig {
    /// Base descriptor (no smoothness scales); used by the weights command.
    pub fn to_base(&self, grid: Grid) -> Result<SpaceDescriptor> {
        match self {
            SpaceConfig::Lp { p } => SpaceDescriptor::lp(*p),
            SpaceConfig::WeightedLp { p, weight } => {
                SpaceDescriptor::weighted_lp(*p, weight.build(grid)?)
            }
            SpaceConfig::Lorentz { p } => SpaceDescriptor::lorentz_weak(*p),
            SpaceConfig::Besov { .. } | SpaceConfig::Triebel { .. } => Err(Error::InvalidArgument(
                "expected a base space descriptor, got a smoothness scale".into(),
            )),
        }
    }

    pub fn to_enriched(&self, grid: Grid) -> Result<EnrichedSpace> {
        Ok(match self {
            SpaceConfig::Besov { s, q, p } => EnrichedSpace::Besov(SmoothnessParams::new(
                *s,
                *q,
                SpaceDescriptor::lp(*p)?,
            )?),
            SpaceConfig::Triebel { s, q, p } => EnrichedSpace::TriebelLizorkin(
                SmoothnessParams::new(*s, *q, SpaceDescriptor::lp(*p)?)?,
            ),
            base => EnrichedSpace::Base(base.to_base(grid)?),
        })
    }
}

impl SignalConfig {
    pub fn build(&self, grid: Grid, dim: usize) -> Result<GridFunction> {
        Ok(match self {
            SignalConfig::Zero => GridFunction::zeros(grid, dim),
            SignalConfig::Ones => {
                let dir = parse_direction(&None, dim)?;
                GridFunction::from_fn(grid, dim, |_, c| dir[c])
            }
            SignalConfig::Mode { index, direction } => {
                let dir = parse_direction(direction, dim)?;
                if index.unsigned_abs() as usize >= grid.len() / 2 {
                    return Err(Error::InvalidArgument(format!(
                        "mode index {index} exceeds the grid range +-{}",
                        grid.len() / 2 - 1
                    )));
                }
                GridFunction::mode(grid, *index, &dir)
            }
            SignalConfig::Gaussian { sigma, center, direction } => {
                if !(sigma.is_finite() && *sigma > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "gaussian needs sigma > 0, got {sigma}"
                    )));
                }
                let dir = parse_direction(direction, dim)?;
                bank::gaussian_bump(grid, *sigma, *center, &dir)
            }
            SignalConfig::Indicator { from, to } => {
                if from >= to {
                    return Err(Error::InvalidArgument(format!(
                        "indicator needs from < to, got [{from}, {to}]"
                    )));
                }
                let (from, to) = (*from, *to);
                let dir = parse_direction(&None, dim)?;
                GridFunction::from_fn(grid, dim, move |t, c| {
                    if t >= from && t <= to {
                        dir[c]
                    } else {
                        Complex64::default()
                    }
                })
            }
            SignalConfig::PowerLaw { exponent } => {
                let e = *exponent;
                let dir = parse_direction(&None, dim)?;
                GridFunction::from_fn(grid, dim, move |t, c| {
                    dir[c] * (1.0 + t.abs()).powf(e)
                })
            }
            SignalConfig::BandNoise { seed, fraction } => {
                if !(0.0..=1.0).contains(fraction) {
                    return Err(Error::InvalidArgument(format!(
                        "band fraction must lie in [0, 1], got {fraction}"
                    )));
                }
                bank::band_limited_noise(grid, dim, *seed, fraction * grid.nyquist())
            }
        })
    }
}

impl BankConfig {
    pub fn seed(&self) -> Option<u64> {
        match self {
            BankConfig::Standard { seed, .. } | BankConfig::BandNoise { seed, .. } => Some(*seed),
            BankConfig::Zero { .. } => None,
        }
    }

    pub fn build(&self, grid: Grid, dim: usize, seed_override: Option<u64>) -> Vec<GridFunction> {
        match self {
            BankConfig::Standard { seed, size } => {
                bank::standard_bank(grid, dim, seed_override.unwrap_or(*seed), *size)
            }
            BankConfig::BandNoise { seed, size, fraction } => {
                let seed = seed_override.unwrap_or(*seed);
                (0..*size)
                    .map(|i| {
                        bank::band_limited_noise(
                            grid,
                            dim,
                            seed.wrapping_add(i as u64),
                            fraction * grid.nyquist(),
                        )
                    })
                    .collect()
            }
            BankConfig::Zero { size } => {
                (0..*size).map(|_| GridFunction::zeros(grid, dim)).collect()
            }
        }
    }
}
