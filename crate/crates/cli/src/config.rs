//! Command-line grammar and the serializable experiment configuration.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ffkr::kakeya::Slope;
use ffkr::varieties::SurfaceKind;
use ffkr::{Exponent, FieldSpec};
use serde::{Deserialize, Serialize};

use crate::HarnessError;

/// A finite field given by its order (`7`, `9`) or as `p^k` (`3^2`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct FieldArg {
    pub p: u32,
    pub k: u32,
}

impl FieldArg {
    pub fn spec(&self) -> Result<FieldSpec, HarnessError> {
        Ok(FieldSpec::new(self.p, self.k)?)
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }
}

impl fmt::Display for FieldArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.k == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}^{}", self.p, self.k)
        }
    }
}

impl FromStr for FieldArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("`{s}` is not a prime power");
        let s = s.trim();
        if let Some((p, k)) = s.split_once('^') {
            let p: u32 = p.trim().parse().map_err(|_| bad())?;
            let k: u32 = k.trim().parse().map_err(|_| bad())?;
            if !ffkr::field::is_prime(p as u64) || k == 0 {
                return Err(bad());
            }
            return Ok(FieldArg { p, k });
        }
        let q: u64 = s.parse().map_err(|_| bad())?;
        let p = (2..=q).find(|d| q.is_multiple_of(*d)).ok_or_else(bad)?;
        let mut rest = q;
        let mut k = 0;
        while rest.is_multiple_of(p) {
            rest /= p;
            k += 1;
        }
        if rest != 1 {
            return Err(bad());
        }
        Ok(FieldArg { p: p as u32, k })
    }
}

impl From<FieldArg> for String {
    fn from(f: FieldArg) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for FieldArg {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// A comma-separated list of fields, or an inclusive prime range `a..b`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct FieldList(pub Vec<FieldArg>);

impl FieldList {
    pub fn suite_default() -> Self {
        FieldList(
            [3, 5, 7, 11, 13]
                .iter()
                .map(|&p| FieldArg { p, k: 1 })
                .chain([FieldArg { p: 3, k: 2 }])
                .collect(),
        )
    }
}

impl fmt::Display for FieldList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for FieldList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if let Some((a, b)) = s.split_once("..") {
            let a: u32 = a.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
            let b: u32 = b.trim().parse().map_err(|_| format!("bad range `{s}`"))?;
            let list: Vec<FieldArg> = (a.max(3)..=b)
                .filter(|&p| ffkr::field::is_prime(p as u64))
                .map(|p| FieldArg { p, k: 1 })
                .collect();
            if list.is_empty() {
                return Err(format!("no odd primes in `{s}`"));
            }
            return Ok(FieldList(list));
        }
        s.split(',')
            .map(str::parse)
            .collect::<Result<Vec<_>, _>>()
            .map(FieldList)
    }
}

impl From<FieldList> for String {
    fn from(f: FieldList) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for FieldList {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

/// A comma-separated slope list such as `0,1,inf`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SlopeList(pub Vec<Slope>);

impl fmt::Display for SlopeList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for SlopeList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| t.parse::<Slope>().map_err(|e| e.to_string()))
            .collect::<Result<Vec<_>, _>>()
            .map(SlopeList)
    }
}

impl From<SlopeList> for String {
    fn from(f: SlopeList) -> String {
        f.to_string()
    }
}

impl TryFrom<String> for SlopeList {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SurfaceArg {
    /// The paraboloid in dimension 2.
    Parabola,
    Paraboloid,
    Cone,
    MomentCurve,
    DoubleParaboloid,
}

impl SurfaceArg {
    pub fn kind(self) -> SurfaceKind {
        match self {
            SurfaceArg::Parabola | SurfaceArg::Paraboloid => SurfaceKind::Paraboloid,
            SurfaceArg::Cone => SurfaceKind::Cone,
            SurfaceArg::MomentCurve => SurfaceKind::MomentCurve,
            SurfaceArg::DoubleParaboloid => SurfaceKind::DoubleParaboloid,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Closed,
    Even,
    Power,
    Witness,
    /// Every method that applies, followed by the consistency gate.
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Gauss,
    Parseval,
    ParaboloidKernel,
    Bridge,
    Pseudoconformal,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetArg {
    Besicovitch,
    Full,
    Point,
    Line,
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    /// `{(x, t) : x + t^2 is a square}` in the plane.
    #[value(name = "2d")]
    #[serde(rename = "2d")]
    TwoD,
    /// The coordinatewise version in any dimension.
    Squares,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Heisenberg,
    Besicovitch,
    Parallel,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Pairs,
    Exhaustive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSetArg {
    /// `{(x, x^2)}`, on which `pi_-1` is not one-to-one.
    Graph,
    /// `F x {0}`.
    Axis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct SurfaceOpts {
    #[arg(long)]
    pub field: FieldArg,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, value_enum)]
    pub surface: SurfaceArg,
    /// Keep the origin on the cone.
    #[arg(long)]
    #[serde(default)]
    pub include_origin: bool,
}

#[derive(Clone, Debug, PartialEq, Args, Serialize, Deserialize)]
pub struct PowerOpts {
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 500)]
    pub iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    #[serde(with = "ffkr::decimal")]
    pub tol: f64,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RestrictionCmd {
    /// Certify R*(p -> q) for a surface.
    Estimate {
        #[command(flatten)]
        surface: SurfaceOpts,
        #[arg(long)]
        p: Exponent,
        #[arg(long)]
        q: Exponent,
        #[arg(long, value_enum, default_value_t = MethodArg::All)]
        method: MethodArg,
        /// Named witness for `--method witness`.
        #[arg(long)]
        witness: Option<String>,
        #[command(flatten)]
        power: PowerOpts,
    },
    /// Test (p, q) against the necessary conditions for a d-dimensional surface in F^n.
    Region {
        #[arg(long)]
        dim: i64,
        #[arg(long)]
        d: i64,
        /// Dimension of an affine subspace contained in the surface.
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        p: Exponent,
        #[arg(long)]
        q: Exponent,
    },
    /// Evaluate a named test function: dirac, constant, subspace or dual-cone-x.
    Witness {
        #[command(flatten)]
        surface: SurfaceOpts,
        #[arg(long)]
        p: Exponent,
        #[arg(long)]
        q: Exponent,
        #[arg(long)]
        witness: String,
    },
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerifyCmd {
    /// Exact identities checked numerically over a list of fields.
    Identities {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Comma list or prime range, e.g. `3..97`.
        #[arg(long)]
        fields: Option<FieldList>,
        /// Random inputs per field for the randomized identities.
        #[arg(long, default_value_t = 20)]
        trials: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KakeyaCmd {
    /// The Kakeya maximal function of an indicator.
    Maximal {
        #[arg(long)]
        field: FieldArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = SetArg::Besicovitch)]
        set: SetArg,
        /// Point-index file replacing `--set`.
        #[arg(long)]
        points: Option<PathBuf>,
        /// Also report horizontal directions.
        #[arg(long)]
        #[serde(default)]
        horizontal: bool,
    },
    /// Build and verify a Besicovitch set.
    Besicovitch {
        #[arg(long, value_enum, default_value_t = Construction::TwoD)]
        construct: Construction,
        #[arg(long)]
        field: FieldArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Write the set as point indices to this file.
        #[arg(long)]
        export: Option<PathBuf>,
    },
    /// Random trials of the sqrt 2 bound for K(2 -> 2n-2).
    Cordoba {
        #[arg(long)]
        field: FieldArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Most lines of a family inside one plane of F^3.
    WolffCheck {
        #[arg(long)]
        field: FieldArg,
        #[arg(long, value_enum, default_value_t = FamilyArg::Heisenberg)]
        family: FamilyArg,
        #[arg(long, value_enum, default_value_t = ModeArg::Pairs)]
        mode: ModeArg,
    },
    /// The Heisenberg configuration over a quadratic extension.
    Heisenberg {
        #[arg(long)]
        field: FieldArg,
    },
    /// Slope projections of a pair set.
    Sd {
        #[arg(long)]
        field: FieldArg,
        #[arg(long, value_enum, default_value_t = PairSetArg::Axis)]
        set: PairSetArg,
        #[arg(long, default_value = "0,1,inf")]
        slopes: SlopeList,
    },
    /// Slope projections of slices of the square Besicovitch set.
    Slices {
        #[arg(long)]
        field: FieldArg,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long)]
        t0: u32,
        #[arg(long)]
        tinf: u32,
        #[arg(long, default_value = "0,1,inf")]
        slopes: SlopeList,
    },
    /// Kakeya exponents implied by an incidence estimate with exponents (a, b, c).
    Implic {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        c: String,
        #[arg(long)]
        dim: i64,
    },
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableCmd {
    /// Best theorems, measured certificates and counterexample ratios per surface.
    Figure1 {
        #[arg(long, default_value = "5,7,11,13")]
        fields: FieldList,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 200)]
        iters: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CacheCmd {
    /// Remove unreadable reports and reports from another major version.
    Gc,
}

#[derive(Clone, Debug, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    #[command(subcommand)]
    Restriction(RestrictionCmd),
    #[command(subcommand)]
    Verify(VerifyCmd),
    #[command(subcommand)]
    Kakeya(KakeyaCmd),
    #[command(subcommand)]
    Table(TableCmd),
    #[command(subcommand)]
    Cache(CacheCmd),
}

impl Command {
    /// Space-separated command path, e.g. `kakeya besicovitch`.
    pub fn name(&self) -> String {
        let value = serde_json::to_value(self).expect("commands serialize");
        let mut parts = Vec::new();
        let mut cur = &value;
        while parts.len() < 2 {
            match cur {
                serde_json::Value::Object(map) if map.len() == 1 => {
                    let (k, v) = map.iter().next().unwrap();
                    parts.push(k.clone());
                    cur = v;
                }
                serde_json::Value::String(s) => {
                    parts.push(s.clone());
                    break;
                }
                _ => break,
            }
        }
        parts.join(" ")
    }
}

#[derive(Clone, Debug, Parser)]
#[command(
    name = "ffkr",
    version,
    about = "Finite-field restriction and Kakeya experiments"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on enumerated tuples for counting steps.
    #[arg(long, global = true)]
    pub budget: Option<u128>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Reuse a stored report for an identical configuration, storing new ones.
    #[arg(long, global = true)]
    pub cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Everything that determines the outcome of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(with = "seed_string")]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<String>,
}

impl ExperimentConfig {
    pub fn from_cli(cli: &Cli) -> Self {
        ExperimentConfig {
            command: cli.command.clone(),
            seed: cli.seed,
            budget: cli.budget.map(|b| b.to_string()),
        }
    }

    pub fn budget(&self) -> Result<Option<u128>, HarnessError> {
        self.budget
            .as_deref()
            .map(|b| {
                b.parse::<u128>()
                    .map_err(|_| HarnessError::Config(format!("bad budget `{b}`")))
            })
            .transpose()
    }
}

mod seed_string {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_args() {
        assert_eq!("9".parse::<FieldArg>().unwrap(), FieldArg { p: 3, k: 2 });
        assert_eq!("3^2".parse::<FieldArg>().unwrap(), FieldArg { p: 3, k: 2 });
        assert!("12".parse::<FieldArg>().is_err());
        let list: FieldList = "3..13".parse().unwrap();
        assert_eq!(list.0.len(), 5);
        assert_eq!("5,7,9".parse::<FieldList>().unwrap().to_string(), "5,7,3^2");
    }

    #[test]
    fn command_names() {
        let cli = Cli::parse_from(["ffkr", "kakeya", "wolff-check", "--field", "9"]);
        assert_eq!(cli.command.name(), "kakeya wolff-check");
        let cli = Cli::parse_from(["ffkr", "cache", "gc"]);
        assert_eq!(cli.command.name(), "cache gc");
    }

    #[test]
    fn decimal_exponents_rejected() {
        let r = Cli::try_parse_from([
            "ffkr",
            "restriction",
            "region",
            "--dim",
            "3",
            "--d",
            "2",
            "--p",
            "1.6",
            "--q",
            "4",
        ]);
        assert!(r.is_err());
    }
}
