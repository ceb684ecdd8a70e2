use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "shellfield",
    version,
    about = "Shell-function decompositions and limited-resolution images"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a radial function at a point or on a grid.
    Eval(EvalArgs),
    /// Fit a shell-function sum to a target profile.
    Decompose(DecomposeArgs),
    /// Image an atomic model at finite resolution, as a radial profile or a 3-D map.
    Image(ImageArgs),
    /// Compare closed forms against independent numerical routes.
    Oracle(OracleArgs),
    /// Write the bundled coefficient tables.
    Tables(TablesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalFunction {
    Omega,
    Pi,
    Gauss,
    #[value(name = "shell_sum")]
    ShellSum,
    #[value(name = "coulomb_image")]
    CoulombImage,
    #[value(name = "si_over_x")]
    SiOverX,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Single abscissa; the value is printed.
    #[arg(long, conflicts_with_all = ["xmax", "step"])]
    pub x: Option<f64>,
    /// Upper end of the grid [0, xmax].
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Grid spacing (default xmax/1000).
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct EvalArgs {
    pub function: EvalFunction,
    #[arg(long, default_value_t = 3)]
    pub dim: u8,
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub nu: Option<f64>,
    /// Coefficient table for shell_sum: a bundled name or a JSON file.
    #[arg(long)]
    pub table: Option<String>,
    /// Use only the first N terms of the table.
    #[arg(long)]
    pub trunc: Option<usize>,
    #[arg(long = "K")]
    pub k: Option<f64>,
    #[arg(long)]
    pub d0: Option<f64>,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    PerRipple,
    UntilAccuracy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Weights {
    Uniform,
    Radial,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct DecomposeArgs {
    /// pi1, pi2, pi3, si_over_x, coulomb_erf:<nu> or file:<profile>.
    #[arg(long)]
    pub target: String,
    /// Dimension of a file target.
    #[arg(long, default_value_t = 3)]
    pub dim: u8,
    #[arg(long)]
    pub xmax: Option<f64>,
    /// Fit grid spacing (default xmax/4000).
    #[arg(long)]
    pub step: Option<f64>,
    /// Defaults to until-accuracy when --accuracy is given.
    #[arg(long, value_enum)]
    pub strategy: Option<Strategy>,
    #[arg(long)]
    pub accuracy: Option<f64>,
    #[arg(long, default_value_t = 80)]
    pub max_terms: usize,
    #[arg(long, default_value_t = 4000)]
    pub max_iterations: usize,
    #[arg(long, value_enum, default_value_t = Weights::Uniform)]
    pub weights: Weights,
    /// Table file to write (default <target>_fit.json).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VolumeFormat {
    Mrc,
    #[value(name = "raw+meta")]
    RawMeta,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true, group(ArgGroup::new("mode").required(true).args(["radial", "map"])))]
pub struct ImageArgs {
    /// Atom model document.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub d0: f64,
    #[arg(long, default_value_t = 0.0)]
    pub nu0: f64,
    /// Point-image table replacing the bundled 40-term one.
    #[arg(long)]
    pub pi3: Option<PathBuf>,
    /// Radial profile of one atom's image.
    #[arg(long)]
    pub radial: bool,
    /// 3-D map of all atoms.
    #[arg(long)]
    pub map: bool,
    /// Atom index for --radial.
    #[arg(long, default_value_t = 0)]
    pub atom: usize,
    /// Radial extent (default 10·d0).
    #[arg(long)]
    pub xmax: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Map voxel size (default d0/4).
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Margin around the atoms' bounding box (default 4·d0).
    #[arg(long)]
    pub padding: Option<f64>,
    #[arg(long, value_enum, default_value_t = VolumeFormat::Mrc)]
    pub format: VolumeFormat,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(subcommand)]
    pub check: OracleCheck,
}

#[derive(Debug, Subcommand)]
pub enum OracleCheck {
    /// Radial transform of a shell function against its closed form.
    #[command(allow_negative_numbers = true)]
    Ft {
        #[arg(long, default_value_t = 3)]
        dim: u8,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        s: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Gaussian blur of a shell function against the widened shell.
    #[command(allow_negative_numbers = true)]
    Conv {
        #[arg(long, default_value_t = 3)]
        dim: u8,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        nu: f64,
        #[arg(long)]
        nu0: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Shell-series atom image against the truncated inverse transform.
    #[command(allow_negative_numbers = true)]
    Image {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        d0: f64,
        #[arg(long, default_value_t = 0.0)]
        nu0: f64,
        #[arg(long, default_value_t = 0)]
        atom: usize,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long)]
        step: Option<f64>,
        /// Tolerance relative to the image's central value.
        #[arg(long, default_value_t = 1.5e-3)]
        tol: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Bundled table against its analytic target; writes the discrepancy profile.
    #[command(allow_negative_numbers = true)]
    Table {
        #[arg(long)]
        name: String,
        #[arg(long)]
        trunc: Option<usize>,
        #[arg(long)]
        xmax: Option<f64>,
        #[arg(long, default_value_t = 0.005)]
        step: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct TablesArgs {
    /// Table name (pi1, pi2, pi3, si_over_x).
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    pub name: Option<String>,
    #[arg(long)]
    pub all: bool,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub output: PathBuf,
}
