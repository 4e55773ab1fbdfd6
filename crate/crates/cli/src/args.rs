use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use laa_core::powerflow::{DEFAULT_MAX_ITER, DEFAULT_TOL};
use laa_core::{AttackCoefficients, AttackModel, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "laa", version, about = "Load-altering attack analysis on radial feeders")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Case file (native or MATPOWER-style); bundled 33-bus feeder if omitted.
    #[arg(long, global = true)]
    pub case: Option<PathBuf>,
    /// Device catalog (JSON); bundled catalog if omitted.
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Bus load model.
    #[arg(long, value_enum, default_value_t = ModelArg::Zip, global = true)]
    pub model: ModelArg,
    /// Named ZIP coefficient set from the catalog, used with `--model zip`.
    #[arg(long, default_value = laa_core::fixtures::RESIDENTIAL_ZIP, global = true)]
    pub zip_set: String,
    #[arg(long, default_value_t = 0.5, global = true)]
    pub scale: f64,
    #[arg(long, default_value_t = 0.95, global = true)]
    pub vth: f64,
    #[arg(long, default_value_t = 1.0, global = true)]
    pub source_v: f64,
    #[arg(long, default_value_t = DEFAULT_TOL, global = true)]
    pub tol: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER, global = true)]
    pub max_iter: usize,
    /// Coefficients for the attack devices: their own, or the bus set.
    #[arg(long, value_enum, default_value_t = AttackZipArg::Device, global = true)]
    pub attack_zip: AttackZipArg,
    /// Directory for `<command>.csv` and `<command>.summary.json`.
    /// Without it the CSV goes to stdout and the summary to stderr.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Gnuplot data file: bus index and voltage columns.
    #[arg(long, global = true)]
    pub plot_data: Option<PathBuf>,
}

impl Common {
    pub fn scenario(&self) -> ScenarioConfig {
        ScenarioConfig {
            case: self.case.clone(),
            catalog: self.catalog.clone(),
            scale: self.scale,
            zip_set: match self.model {
                ModelArg::Cp => None,
                ModelArg::Zip => Some(self.zip_set.clone()),
            },
            v_th: self.vth,
            source_v: self.source_v,
            tol: self.tol,
            max_iter: self.max_iter,
            attack_coefficients: match self.attack_zip {
                AttackZipArg::Device => AttackCoefficients::Device,
                AttackZipArg::Bus => AttackCoefficients::Bus,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Cp,
    Zip,
}

impl From<ModelArg> for AttackModel {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Cp => AttackModel::ConstantPower,
            ModelArg::Zip => AttackModel::Zip,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackZipArg {
    Device,
    Bus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    /// AC backward/forward sweep (ZIP loads refreshed every sweep).
    Ac,
    /// LinDistFlow, constant-power loads only.
    Ldf,
    /// ZIP fixed point around LinDistFlow.
    Iter,
    /// ZP closed form.
    Zp,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Baseline voltage profile.
    Solve {
        #[arg(long, value_enum, default_value_t = SolverArg::Ac)]
        solver: SolverArg,
    },
    /// Voltage profile under a given attack, CP and ZIP side by side.
    Attack {
        #[arg(long)]
        attack_bus: usize,
        #[arg(long)]
        device: String,
        #[arg(long)]
        count: u64,
        /// `ac` solves both models with the AC sweep; `ldf`/`zp` use the
        /// linear closed forms.
        #[arg(long, value_enum, default_value_t = SolverArg::Ac)]
        solver: SolverArg,
    },
    /// Critical device count for one bus and device under `--model`.
    Critical {
        #[arg(long)]
        attack_bus: usize,
        #[arg(long)]
        device: String,
        /// Bisection on the system minimum instead of the closed form.
        #[arg(long)]
        search: bool,
    },
    /// Critical counts over buses x devices x models.
    Sweep {
        /// Defaults to the leaf buses.
        #[arg(long, value_delimiter = ',')]
        buses: Vec<usize>,
        /// Defaults to every catalog device.
        #[arg(long, value_delimiter = ',')]
        devices: Vec<String>,
        #[arg(long, value_delimiter = ',', value_enum, default_values_t = [ModelArg::Cp, ModelArg::Zip])]
        models: Vec<ModelArg>,
    },
    /// Extra demand drawn by an attack at solved voltages.
    Demand {
        #[arg(long, value_delimiter = ',', default_values_t = [3, 18])]
        buses: Vec<usize>,
        #[arg(long, default_value = "air-conditioner")]
        device: String,
        #[arg(long, default_value_t = 800)]
        count: u64,
    },
    /// Cross-checks the approximate solvers against the AC sweep.
    Validate,
}
