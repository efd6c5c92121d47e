use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use tensorword::config::{
    Limits, DEFAULT_ENUM_CAP, DEFAULT_MAX_DIM, DEFAULT_ORDER_CAP, ORACLE_TOL, PSD_TOL, ZERO_TOL,
};

#[derive(Debug, Parser)]
#[command(name = "tensorword", version, about = "Randomized checks of tensor-word and matrix-function inequalities")]
pub struct Cli {
    /// Worker threads for trial fan-out; defaults to one per core.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Seeded verification campaigns.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Word counting and listing.
    #[command(subcommand)]
    Words(WordsCommand),
    /// Evaluate a matrix functional.
    #[command(subcommand)]
    Gmf(GmfCommand),
    /// Induced operators on symmetry classes.
    #[command(subcommand)]
    Induced(InducedCommand),
}

#[derive(Debug, Subcommand)]
pub enum VerifyCommand {
    /// Positivity of the alternating subset sum and its word-sum oracle.
    Thm2(Thm2Args),
    /// Spectral bracket of the three-matrix difference.
    #[command(name = "thm1-bounds")]
    Thm1Bounds(Thm1Args),
    /// Seven-term superadditivity gap of det, per or a generalized matrix function.
    Thm3(Thm3Args),
    /// Identity-input gap values and two-matrix superadditivity.
    Corollaries(CorollaryArgs),
    /// Generalized matrix function against the induced-operator inner product.
    Bridging(BridgingArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CampaignArgs {
    /// Random trials per cell.
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Largest allowed Kronecker power dimension n^m.
    #[arg(long = "max-dim", env = "TENSORWORD_MAXDIM", default_value_t = DEFAULT_MAX_DIM)]
    pub max_dim: usize,
    /// Largest word enumeration k^m for the oracle.
    #[arg(long = "enum-cap", default_value_t = DEFAULT_ENUM_CAP)]
    pub enum_cap: u64,
    /// Write the JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl CampaignArgs {
    pub fn limits(&self) -> Limits {
        Limits {
            max_dim: self.max_dim,
            enum_cap: self.enum_cap,
            order_cap: DEFAULT_ORDER_CAP,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct Thm2Args {
    #[arg(long, default_value = "1..3")]
    pub n: Span,
    #[arg(long, default_value = "2..4")]
    pub k: Span,
    #[arg(long, default_value = "1..5")]
    pub m: Span,
    #[arg(long = "psd-tol", default_value_t = PSD_TOL)]
    pub psd_tol: f64,
    #[arg(long = "oracle-tol", default_value_t = ORACLE_TOL)]
    pub oracle_tol: f64,
    #[arg(long = "zero-tol", default_value_t = ZERO_TOL)]
    pub zero_tol: f64,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Thm1Args {
    #[arg(long, default_value = "1..3")]
    pub n: Span,
    #[arg(long, default_value = "3..5")]
    pub m: Span,
    /// Number of matrices; anything but 3 needs --experimental.
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Report the k-matrix bracket without counting it toward the verdict.
    #[arg(long)]
    pub experimental: bool,
    #[arg(long = "psd-tol", default_value_t = PSD_TOL)]
    pub psd_tol: f64,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Thm3Args {
    /// det, per or gmf:GROUP:CHAR; repeatable.
    #[arg(long = "func", default_values = ["det", "per"])]
    pub funcs: Vec<String>,
    /// Matrix sizes for det and per; gmf functionals use their group degree.
    #[arg(long, default_value = "2..4")]
    pub m: Span,
    #[arg(long = "psd-tol", default_value_t = PSD_TOL)]
    pub psd_tol: f64,
    #[arg(long = "gap-tol", default_value_t = 1e-8)]
    pub gap_tol: f64,
    #[arg(long = "imag-tol", default_value_t = 1e-9)]
    pub imag_tol: f64,
    /// Accept characters that fail the irreducibility check.
    #[arg(long = "allow-reducible")]
    pub allow_reducible: bool,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CorollaryArgs {
    /// Matrix sizes for the two-matrix gap.
    #[arg(long, default_value = "1..5")]
    pub m: Span,
    #[arg(long = "psd-tol", default_value_t = PSD_TOL)]
    pub psd_tol: f64,
    #[arg(long = "gap-tol", default_value_t = 1e-8)]
    pub gap_tol: f64,
    #[arg(long = "identity-tol", default_value_t = 1e-9)]
    pub identity_tol: f64,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BridgingArgs {
    /// Group spec; without it a standard list of (group, character) pairs runs.
    #[arg(long, requires = "character")]
    pub group: Option<String>,
    /// Character spec: trivial, sign, omega:j or table:FILE.
    #[arg(long = "char", requires = "group")]
    pub character: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub campaign: CampaignArgs,
}

#[derive(Debug, Subcommand)]
pub enum WordsCommand {
    /// Number of surjective words of length m over k letters.
    Count(WordsCountArgs),
    /// Print words in lexicographic order.
    List(WordsListArgs),
}

#[derive(Debug, Args)]
pub struct WordsCountArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=63))]
    pub k: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,
}

#[derive(Debug, Args)]
pub struct WordsListArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=63))]
    pub k: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub m: u64,
    /// Only words using every letter.
    #[arg(long)]
    pub surjective: bool,
    #[arg(long = "enum-cap", default_value_t = DEFAULT_ENUM_CAP)]
    pub enum_cap: u64,
}

#[derive(Debug, Subcommand)]
pub enum GmfCommand {
    Eval(GmfEvalArgs),
}

#[derive(Debug, Args)]
pub struct GmfEvalArgs {
    /// Matrix JSON file.
    #[arg(long)]
    pub matrix: PathBuf,
    /// det, per or gmf:GROUP:CHAR.
    #[arg(long)]
    pub func: String,
    #[arg(long = "allow-reducible")]
    pub allow_reducible: bool,
}

#[derive(Debug, Subcommand)]
pub enum InducedCommand {
    /// Print the dimension of the symmetry class and K(A) in its basis.
    Eval(InducedEvalArgs),
}

#[derive(Debug, Args)]
pub struct InducedEvalArgs {
    #[arg(long)]
    pub group: String,
    #[arg(long = "char")]
    pub character: String,
    /// Square matrix JSON file; its size is n.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long = "max-dim", env = "TENSORWORD_MAXDIM", default_value_t = DEFAULT_MAX_DIM)]
    pub max_dim: usize,
}

/// Inclusive integer range `a..b`, or a single value `a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub lo: usize,
    pub hi: usize,
}

impl Span {
    pub fn values(self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad range bound {t:?} in {s:?}"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b)?),
            None => {
                let v = num(s)?;
                (v, v)
            }
        };
        if lo == 0 {
            return Err(format!("range {s:?} must start at 1 or above"));
        }
        if lo > hi {
            return Err(format!("range {s:?} is empty"));
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_grammar() {
        assert_eq!("3..5".parse::<Span>().unwrap(), Span { lo: 3, hi: 5 });
        assert_eq!("4".parse::<Span>().unwrap(), Span { lo: 4, hi: 4 });
        assert_eq!("2..2".parse::<Span>().unwrap().values().collect::<Vec<_>>(), vec![2]);
        for bad in ["5..3", "0..2", "a..b", "", "1..", "..4", "-1"] {
            assert!(bad.parse::<Span>().is_err(), "{bad}");
        }
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["tensorword", "verify", "thm2"]).unwrap();
        let Command::Verify(VerifyCommand::Thm2(a)) = cli.command else {
            panic!("wrong subcommand");
        };
        assert_eq!(a.campaign.trials, 25);
        assert_eq!(a.k, Span { lo: 2, hi: 4 });
        assert!(Cli::try_parse_from(["tensorword", "verify", "thm2", "--trials", "0"]).is_err());
        assert!(Cli::try_parse_from(["tensorword", "verify", "bridging", "--group", "sym:2"]).is_err());
    }
}
