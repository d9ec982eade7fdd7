use clap::{Args, Parser, Subcommand, ValueEnum};
use dubrovin_core::engine::{ComplexArg, REFERENCE_CYCLE};
use dubrovin_core::gw::DEFAULT_MAX_DEGREE;
use dubrovin_core::schubert::YoungDiagram22;

/// Exact and numeric spectra of the Dubrovin operator of Gr(2,4).
#[derive(Debug, Clone, Parser)]
#[command(name = "dubrovin", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Highest curve degree solved from WDVV.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DEGREE)]
    pub max_degree: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
    Csv,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Genus-zero invariants N(n2,n3,n4,n5) by degree.
    GwTable,
    /// Matrix of K ⋆ − truncated at energy alpha.
    Matrix(MatrixArgs),
    /// Characteristic polynomial and discriminant of a one-parameter family.
    Discriminant(FamilyArgs),
    /// Simplicity verdict for a one-parameter family.
    Classify(FamilyArgs),
    /// Numeric eigenvalues at one point.
    Spectrum(SpectrumArgs),
    /// Numeric eigenvalues along a path of parameter values.
    Sweep(SweepArgs),
    /// Read-only HTTP service on 127.0.0.1.
    Serve(ServeArgs),
}

#[derive(Debug, Clone, Args)]
pub struct MatrixArgs {
    /// Keep only this cycle's coordinate; all of t2..t5 when omitted.
    #[arg(long)]
    pub cycle: Option<YoungDiagram22>,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    pub alpha: u32,
}

#[derive(Debug, Clone, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub cycle: YoungDiagram22,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    pub alpha: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    /// 0,0 moves t0; any other bulk cycle moves its own coordinate.
    #[arg(long, default_value_t = REFERENCE_CYCLE)]
    pub cycle: YoungDiagram22,
    /// Complex value, `a+bi` or `re:im`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t: ComplexArg,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<ComplexArg>,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub q: ComplexArg,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    pub alpha: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub cycle: YoungDiagram22,
    /// Comma-separated complex values, e.g. `0.5+1i,1+2i` or `0.5:1,1:2`.
    #[arg(long, allow_hyphen_values = true)]
    pub path: String,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub q: ComplexArg,
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    pub alpha: u32,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    /// Overridden by DUBROVIN_PORT. 0 picks a free port.
    #[arg(long, default_value_t = 8000)]
    pub port: u16,
}
