use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "feynpar", version, about = "Parametric Feynman integrals: polynomials, renormalization, slicing, regularization")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Worker threads for quadrature and algebra (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for slices, Monte Carlo and random test points.
    #[arg(long, global = true, env = "FEYNPAR_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Tolerance; the default depends on the command.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Evaluation budget for adaptive cubature.
    #[arg(long, global = true, default_value_t = 4_000_000)]
    pub max_evals: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the command's table (J(s), I_eps, series) as CSV.
    #[arg(long, global = true, value_name = "PATH")]
    pub emit_plot_data: Option<PathBuf>,
    /// Compare the JSON report with this file; mismatch exits with 2.
    #[arg(long, global = true, value_name = "PATH")]
    pub golden: Option<PathBuf>,
    /// Write the JSON report to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub write_golden: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Kirchhoff and Symanzik polynomials of a graph.
    Poly(PolyArgs),
    /// Exact polynomial invariants for a graph file or every graph in a directory.
    Check(CheckArgs),
    /// Hopf algebra operations.
    Hopf {
        #[command(subcommand)]
        op: HopfOp,
    },
    /// Renormalized values and counterterms from a character spec.
    Renorm(RenormArgs),
    /// Connection data (a, b) and the flatness residual of a character.
    Connection(ConnectionArgs),
    /// Generate a reproducible rational slice for a graph.
    Slice(SliceCmdArgs),
    /// Singular points and Milnor numbers of a restricted polynomial.
    Milnor(MilnorArgs),
    /// Dimensions of the Feynman subspaces in the Jacobian algebra.
    FeynmanSubspace(SubspaceArgs),
    /// Finite-field point counts.
    CountPoints(CountArgs),
    /// Write the bundled graph corpus to a directory.
    Corpus(CorpusArgs),
    /// Dimensionally regularized series coefficients.
    Dimreg(DimregArgs),
    /// The parametric integral at the given dimension.
    Integrate(IntegrateArgs),
    /// Both sides of the projective integral identity.
    IdentityCheck(IdentityArgs),
    /// Gelfand-Leray function, asymptotic fit and Mellin transform.
    GlMellin(GlArgs),
    /// Leray-regularized integrals I_eps and their blow-up order.
    Leray(LerayArgs),
    /// Log-moment coefficients and the iterated-log check.
    ZetaLog(ZetaArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Poly(_) => "poly",
            Command::Check(_) => "check",
            Command::Hopf { op: HopfOp::Coproduct(_) } => "hopf coproduct",
            Command::Hopf { op: HopfOp::Antipode(_) } => "hopf antipode",
            Command::Hopf { op: HopfOp::Birkhoff(_) } => "hopf birkhoff",
            Command::Renorm(_) => "renorm",
            Command::Connection(_) => "connection",
            Command::Slice(_) => "slice",
            Command::Milnor(_) => "milnor",
            Command::FeynmanSubspace(_) => "feynman-subspace",
            Command::CountPoints(_) => "count-points",
            Command::Corpus(_) => "corpus",
            Command::Dimreg(_) => "dimreg",
            Command::Integrate(_) => "integrate",
            Command::IdentityCheck(_) => "identity-check",
            Command::GlMellin(_) => "gl-mellin",
            Command::Leray(_) => "leray",
            Command::ZetaLog(_) => "zeta-log",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum HopfOp {
    Coproduct(HopfGraphArgs),
    Antipode(HopfGraphArgs),
    /// Birkhoff factorization of a character spec.
    Birkhoff(SpecArgs),
}

#[derive(Args, Debug, Clone)]
pub struct MomentumArgs {
    /// Gram JSON `{labels, gram, mass2?}`.
    #[arg(long, value_name = "PATH")]
    pub gram: Option<PathBuf>,
    /// Two-leg shorthand: the rational p^2.
    #[arg(long, allow_hyphen_values = true)]
    pub p2: Option<String>,
    /// Uniform internal mass squared.
    #[arg(long)]
    pub m2: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SliceArgs {
    /// Slice JSON as written by `slice --out`.
    #[arg(long, value_name = "PATH", conflicts_with = "k")]
    pub slice: Option<PathBuf>,
    /// Generate a slice of this dimension from `--seed`.
    #[arg(long)]
    pub k: Option<usize>,
}

#[derive(Args, Debug)]
pub struct PolyArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub mom: MomentumArgs,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Graph JSON file, or a directory whose top-level `*.json` files are graphs.
    pub path: PathBuf,
    /// Random rational points per identity.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleArg {
    PowerCounting,
    All1pi,
}

#[derive(Args, Debug)]
pub struct HopfGraphArgs {
    pub graph: PathBuf,
    #[arg(long, value_enum, default_value_t = RuleArg::PowerCounting)]
    pub rule: RuleArg,
    /// Dimension for power counting (default: the graph's theory dimension, else 4).
    #[arg(long)]
    pub dimension: Option<i64>,
}

#[derive(Args, Debug)]
pub struct SpecArgs {
    /// Character spec JSON.
    pub spec: PathBuf,
}

#[derive(Args, Debug)]
pub struct RenormArgs {
    pub spec: PathBuf,
    /// Rational log(mu): multiply each value by mu^(-z loops) first.
    #[arg(long, allow_hyphen_values = true)]
    pub log_mu: Option<String>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradingArg {
    Loops,
    Edges,
}

#[derive(Args, Debug)]
pub struct ConnectionArgs {
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value_t = GradingArg::Loops)]
    pub grading: GradingArg,
}

#[derive(Args, Debug)]
pub struct SliceCmdArgs {
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Also write the bare slice JSON here.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MilnorArgs {
    /// Graph JSON; its Kirchhoff polynomial is restricted to the slice.
    #[arg(required_unless_present = "poly", conflicts_with = "poly")]
    pub graph: Option<PathBuf>,
    /// Polynomial in the line format, used as is.
    #[arg(long, value_name = "PATH")]
    pub poly: Option<PathBuf>,
    /// Comma-separated rational point for a single Milnor number (with `--poly`).
    #[arg(long, requires = "poly", allow_hyphen_values = true)]
    pub point: Option<String>,
    #[command(flatten)]
    pub slice: SliceArgs,
}

#[derive(Args, Debug)]
pub struct SubspaceArgs {
    pub graph: PathBuf,
    #[command(flatten)]
    pub slice: SliceArgs,
    /// Comma-separated even dimensions.
    #[arg(long, default_value = "2,4")]
    pub dims: String,
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(required_unless_present = "poly", conflicts_with = "poly")]
    pub graph: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    pub poly: Option<PathBuf>,
    /// Comma-separated prime field sizes.
    #[arg(long, default_value = "2,3,5")]
    pub q: String,
}

#[derive(Args, Debug)]
pub struct CorpusArgs {
    pub dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct DimregArgs {
    pub graph: PathBuf,
    #[arg(long = "D", default_value_t = 4)]
    pub dimension: i64,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long, default_value_t = 1.0)]
    pub mu: f64,
    #[command(flatten)]
    pub mom: MomentumArgs,
    #[arg(long)]
    pub allow_divergent: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Adaptive,
    Mc,
}

#[derive(Args, Debug)]
pub struct IntegrateArgs {
    pub graph: PathBuf,
    #[arg(long = "D", default_value_t = 4)]
    pub dimension: i64,
    #[command(flatten)]
    pub mom: MomentumArgs,
    #[arg(long, value_enum, default_value_t = MethodArg::Adaptive)]
    pub method: MethodArg,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: usize,
    #[arg(long)]
    pub allow_divergent: bool,
}

#[derive(Args, Debug)]
pub struct IdentityArgs {
    pub graph: PathBuf,
    #[arg(long = "D", default_value_t = 4)]
    pub dimension: i64,
    #[command(flatten)]
    pub mom: MomentumArgs,
    #[command(flatten)]
    pub slice: SliceArgs,
    /// Largest accepted |lhs - rhs|.
    #[arg(long, default_value_t = 1e-4)]
    pub threshold: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainArg {
    Disk,
    Box,
    Simplex,
}

/// Where `f` comes from in the level-set commands.
#[derive(Args, Debug)]
pub struct LevelSource {
    /// Graph JSON (f and the numerator come from the case table on the simplex).
    #[arg(conflicts_with_all = ["poly", "toy"])]
    pub graph: Option<PathBuf>,
    /// Polynomial `f` in the line format.
    #[arg(long, value_name = "PATH", conflicts_with = "toy")]
    pub poly: Option<PathBuf>,
    /// Built-in example: `disk` is f = u1^2 + u2^2.
    #[arg(long, value_enum)]
    pub toy: Option<ToyArg>,
    /// Density polynomial (default 1).
    #[arg(long, value_name = "PATH")]
    pub alpha: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub domain: Option<DomainArg>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// `lo,hi` used on every axis of a box domain.
    #[arg(long = "box", default_value = "-1,1", allow_hyphen_values = true)]
    pub box_range: String,
    #[command(flatten)]
    pub mom: MomentumArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ToyArg {
    Disk,
}

#[derive(Args, Debug)]
pub struct GlArgs {
    #[command(flatten)]
    pub source: LevelSource,
    #[arg(long, default_value_t = 0.02)]
    pub s_min: f64,
    #[arg(long, default_value_t = 0.8)]
    pub s_max: f64,
    /// Number of geometrically spaced levels.
    #[arg(long, default_value_t = 16)]
    pub points: usize,
    /// Comma-separated Mellin arguments.
    #[arg(long, default_value = "0,0.5,1,2", allow_hyphen_values = true)]
    pub z: String,
}

#[derive(Args, Debug)]
pub struct LerayArgs {
    #[command(flatten)]
    pub source: LevelSource,
    /// Pole order (polynomial and toy modes).
    #[arg(long)]
    pub m: Option<u32>,
    /// Dimension for the case table (graph mode).
    #[arg(long = "D", default_value_t = 4)]
    pub dimension: i64,
    #[arg(long, default_value_t = 0.01)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps_max: f64,
    #[arg(long, default_value_t = 10)]
    pub points: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum KindArg {
    Psi,
    V,
}

#[derive(Args, Debug)]
pub struct ZetaArgs {
    pub graph: PathBuf,
    #[arg(long = "D", default_value_t = 4)]
    pub dimension: i64,
    #[command(flatten)]
    pub mom: MomentumArgs,
    #[arg(long, value_enum, default_value_t = KindArg::V)]
    pub kind: KindArg,
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Endpoints of the iterated log-integral check.
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = std::f64::consts::E)]
    pub b: f64,
    #[arg(long)]
    pub allow_divergent: bool,
}
