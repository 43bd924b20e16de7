use clap::{Args, Parser, Subcommand, ValueEnum};
use loewner_core::levy::LevyDescriptor;
use loewner_core::recurrence::{EtaProfile, TheoremCase};
use loewner_core::Version;
use num_complex::Complex64;
use std::path::PathBuf;
use std::str::FromStr;

/// Seed used when none is given, so that runs are reproducible by default.
pub const DEFAULT_SEED: u64 = 20_050_101;

#[derive(Debug, Parser)]
#[command(
    name = "loewner",
    about = "Integral-means spectra and derivative moments of whole-plane Lévy-Loewner evolutions",
    disable_version_flag = true,
    args_override_self = true
)]
pub struct Cli {
    /// TOML file of flag values; flags on the command line take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Artifact path. A `<out>.manifest.json` is written next to it.
    /// Without it the artifact goes to stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate characteristic exponents η_m.
    Eta(EtaArgs),
    /// Monte-Carlo estimate of ⟨|F′(w)|^q⟩.
    Simulate(SimulateArgs),
    /// Coefficient grid ρ_ij from the nine-term recurrence.
    Grid(GridArgs),
    /// Diagonal-growth β estimate (and optional series value) of a grid.
    BetaEst(BetaEstArgs),
    /// Closed-form β(q) spectrum.
    Spectrum(SpectrumArgs),
    /// Points on a truncation curve with both blow-up-rate extractors.
    Truncation(TruncationArgs),
    /// Tridiagonal eigenvalue route at one truncation point.
    Frobenius(FrobeniusArgs),
    /// ODE route at one truncation point.
    OdeLambda(OdeLambdaArgs),
    /// Legendre transforms of sampled spectra.
    Legendre(LegendreArgs),
    /// Slit-tip polyline of a sampled chain.
    Trace(TraceArgs),
    /// Check the exactly solved q = 2 cases.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct EtaArgs {
    /// Process: `brownian:k`, `uniform:r`, `jump:r:j1;j2`, `mix(a,b)` or `table:η1,η2;tail`.
    #[arg(long)]
    pub eta: EtaProfile,
    #[arg(long, default_value_t = 8)]
    pub m_max: u32,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub eta: LevyDescriptor,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub q: f64,
    /// `re` or `re,im`.
    #[arg(long, default_value = "0.5")]
    pub w: ComplexArg,
    #[arg(long, default_value = "interior")]
    pub version: Version,
    #[arg(long, default_value_t = 8.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub max_step: f64,
    #[arg(long, default_value_t = 1000)]
    pub n_samples: usize,
    /// Also run at twice the horizon and report the drift.
    #[arg(long)]
    pub doubling_check: bool,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[arg(long, default_value = "interior")]
    pub version: Version,
    /// Rational (`3/2`, `0.25`) with `--exact`, any real otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    #[arg(long)]
    pub eta: EtaProfile,
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    /// Solve over big rationals.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct BetaEstArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Also sum the series at this point.
    #[arg(long)]
    pub w: Option<ComplexArg>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long, default_value = "interior")]
    pub version: Version,
    #[arg(long, value_delimiter = ',', required = true)]
    pub kappa: Vec<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub q: Vec<f64>,
    /// Evenly spaced q values `lo:hi:n`.
    #[arg(long, allow_hyphen_values = true)]
    pub q_grid: Option<GridSpec>,
}

#[derive(Debug, Args)]
pub struct TruncationArgs {
    #[arg(long, default_value = "interior")]
    pub version: Version,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub gamma: Vec<f64>,
    /// Evenly spaced γ values `lo:hi:n`.
    #[arg(long, allow_hyphen_values = true)]
    pub gamma_grid: Option<GridSpec>,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
    /// Leave the ODE column empty.
    #[arg(long)]
    pub skip_ode: bool,
}

#[derive(Debug, Args)]
pub struct FrobeniusArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub gamma: f64,
    /// Defaults to the interior truncation curve value.
    #[arg(long)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Args)]
pub struct OdeLambdaArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub delta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Transform {
    /// β over q → f over α.
    FFromBeta,
    /// f over α → β over q.
    BetaFromF,
    /// f over α → β over q through ω(α) = αf(1/α).
    BetaFromFOmega,
    /// f over α → τ over q.
    Tau,
    /// f over α → D over q.
    Dimension,
    /// f over α with negative values removed.
    Truncate,
}

#[derive(Debug, Args)]
pub struct LegendreArgs {
    #[arg(long, value_enum)]
    pub transform: Transform,
    /// `x,y[,flag]` CSV of the input spectrum.
    #[arg(long)]
    pub input: PathBuf,
    /// Output abscissae `lo:hi:n`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<GridSpec>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub eta: LevyDescriptor,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub max_step: f64,
    #[arg(long, default_value_t = 1)]
    pub samples_per_event: usize,
    /// Also write the sampled driver as `duration,level` CSV.
    #[arg(long)]
    pub driver_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `1` or `2`; both when omitted.
    #[arg(long)]
    pub case: Option<TheoremCase>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexArg(pub Complex64);

impl FromStr for ComplexArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        let z = match s.split_once(',') {
            Some((re, im)) => Complex64::new(num(re)?, num(im)?),
            None => Complex64::new(num(s)?, 0.0),
        };
        Ok(ComplexArg(z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err("expected `lo:hi:n`".into());
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        let n = n.trim().parse().map_err(|_| format!("`{n}` is not a count"))?;
        Ok(GridSpec {
            lo: num(lo)?,
            hi: num(hi)?,
            n,
        })
    }
}
