use clap::{Args, Parser, Subcommand, ValueEnum};
use enriq_core::finite_form::GeneratrixFilter;

/// Counts such as `1e6` or `250000`.
fn parse_count(s: &str) -> Result<u128, String> {
    if let Some((mant, exp)) = s.split_once(['e', 'E']) {
        let mant: u128 = mant.parse().map_err(|_| format!("bad count '{s}'"))?;
        let exp: u32 = exp.parse().map_err(|_| format!("bad count '{s}'"))?;
        return 10u128
            .checked_pow(exp)
            .and_then(|x| x.checked_mul(mant))
            .ok_or_else(|| format!("count '{s}' is too large"));
    }
    s.parse().map_err(|_| format!("bad count '{s}'"))
}

#[derive(Parser, Debug)]
#[command(name = "enriq", version, about = "Lattices, forms over finite fields and period points of marked supersingular lattices")]
pub struct Cli {
    #[command(flatten)]
    pub exec: ExecFlags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ExecFlags {
    /// Run library routines on one thread. Reports are identical either way.
    #[arg(long, global = true)]
    pub serial: bool,
    /// Largest isometry group that is listed element by element.
    #[arg(long, global = true, default_value = "1e6", value_parser = parse_count)]
    pub cap_group: u128,
    /// Largest Grassmannian scanned by generatrix enumeration.
    #[arg(long, global = true, default_value = "1e8", value_parser = parse_count)]
    pub cap_grassmannian: u128,
    /// Largest stabilizer used for orbit computations.
    #[arg(long, global = true, default_value = "1e5", value_parser = parse_count)]
    pub cap_orbit: u128,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Integer lattices.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Quadratic forms over a prime field.
    #[command(subcommand)]
    Form(FormCmd),
    /// Generatrices over extension fields.
    #[command(subcommand)]
    Gen(GenCmd),
    /// Marking contexts.
    #[command(subcommand)]
    Ctx(CtxCmd),
    /// Orbits and period points.
    #[command(subcommand)]
    Period(PeriodCmd),
    /// Component census of an embedding catalog.
    Census(CensusArgs),
    /// Brute-force certifiers.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Workspace files.
    #[command(subcommand)]
    Workspace(WorkspaceCmd),
}

#[derive(Args, Debug)]
pub struct LatticeIn {
    /// Lattice argument: std:EXPR, json:TEXT, -, PATH or PATH#NAME.
    #[arg(long = "in")]
    pub input: String,
}

#[derive(Args, Debug)]
pub struct EmbeddingIn {
    /// Embedding argument.
    #[arg(long, visible_alias = "gamma", conflicts_with_all = ["ambient", "vectors"])]
    pub embedding: Option<String>,
    /// Ambient lattice, used together with --vectors.
    #[arg(long = "in", requires = "vectors")]
    pub ambient: Option<String>,
    /// Image vectors in the ambient basis, as "1,0,0;0,1,0".
    #[arg(long)]
    pub vectors: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum LatticeCmd {
    /// Rank, determinant, signature, discriminant group and Artin invariant.
    Invariants {
        #[command(flatten)]
        lattice: LatticeIn,
        #[arg(long)]
        p: Option<u32>,
    },
    /// Vectors of a given norm in a definite lattice.
    Roots {
        #[command(flatten)]
        lattice: LatticeIn,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        norm: i64,
    },
    /// The full isometry group of a definite lattice.
    Autgroup {
        #[command(flatten)]
        lattice: LatticeIn,
    },
    /// Orthogonal complement of an embedding.
    Complement {
        #[command(flatten)]
        embedding: EmbeddingIn,
    },
    /// Saturation of an embedding.
    Saturate {
        #[command(flatten)]
        embedding: EmbeddingIn,
    },
    /// Overlattice from an isotropic glue subspace of pL^∨/pL.
    Glue {
        #[command(flatten)]
        lattice: LatticeIn,
        #[arg(long)]
        p: u32,
        /// Glue basis in quotient coordinates, as "1,0;0,1"; empty for none.
        #[arg(long, default_value = "")]
        glue: String,
    },
}

#[derive(Args, Debug)]
pub struct SpaceIn {
    #[arg(long, requires = "gram")]
    pub p: Option<u32>,
    /// Gram matrix over F_p, as "1,0;0,1".
    #[arg(long, allow_hyphen_values = true)]
    pub gram: Option<String>,
    /// The quotient pL^∨/pL of this lattice (needs --prime).
    #[arg(long, conflicts_with_all = ["gram", "space"], requires = "prime")]
    pub from_lattice: Option<String>,
    #[arg(long)]
    pub prime: Option<u32>,
    /// A quadratic space object {"p", "gram"}.
    #[arg(long, conflicts_with = "gram")]
    pub space: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum FormCmd {
    /// Whether the form has an isotropic subspace of half the dimension.
    Neutral {
        #[command(flatten)]
        space: SpaceIn,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum FilterArg {
    Isotropic,
    Characteristic,
    Strict,
}

impl From<FilterArg> for GeneratrixFilter {
    fn from(f: FilterArg) -> Self {
        match f {
            FilterArg::Isotropic => GeneratrixFilter::Isotropic,
            FilterArg::Characteristic => GeneratrixFilter::Characteristic,
            FilterArg::Strict => GeneratrixFilter::Strict,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum GenCmd {
    /// All half-dimensional subspaces over F_{p^m} passing a filter.
    Enumerate {
        #[command(flatten)]
        space: SpaceIn,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, value_enum, default_value = "characteristic")]
        filter: FilterArg,
    },
    /// Predicates of one generatrix.
    Check {
        #[arg(long = "in")]
        input: String,
    },
    /// Frobenius chain of a strictly characteristic generatrix.
    Chain {
        #[arg(long = "in")]
        input: String,
    },
}

#[derive(Args, Debug)]
pub struct MarkingIn {
    #[command(flatten)]
    pub embedding: EmbeddingIn,
    #[arg(long)]
    pub p: u32,
}

#[derive(Subcommand, Debug)]
pub enum CtxCmd {
    /// Complement and stabilizer of a marking.
    Build {
        #[command(flatten)]
        marking: MarkingIn,
    },
    /// Primitivity, root-freeness of the complement and the σ bound.
    Admissible {
        #[command(flatten)]
        marking: MarkingIn,
    },
    /// The involution +1 on the marking and -1 on its complement.
    Involution {
        #[command(flatten)]
        marking: MarkingIn,
    },
}

#[derive(Subcommand, Debug)]
pub enum PeriodCmd {
    /// Orbits of the stabilizer on generatrices, with their period points.
    Orbit {
        #[command(flatten)]
        marking: MarkingIn,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, value_enum, default_value = "characteristic")]
        filter: FilterArg,
        /// A JSON list of generatrices to use instead of the enumeration.
        #[arg(long)]
        gens: Option<String>,
    },
    /// Whether two period points agree.
    Compare {
        /// Period point arguments.
        #[arg(long, requires = "b", conflicts_with_all = ["g1", "g2"])]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        /// Generatrix arguments, compared in the context given by the marking.
        #[arg(long, requires = "g2")]
        g1: Option<String>,
        #[arg(long)]
        g2: Option<String>,
        #[arg(long = "in")]
        ambient: Option<String>,
        #[arg(long)]
        embedding: Option<String>,
        #[arg(long)]
        vectors: Option<String>,
        #[arg(long)]
        p: Option<u32>,
    },
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    /// Catalog argument.
    #[arg(long = "in")]
    pub input: String,
}

#[derive(Subcommand, Debug)]
pub enum OracleCmd {
    /// Vectors of a given norm by scanning the full box.
    BoxRoots {
        #[command(flatten)]
        lattice: LatticeIn,
        #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
        norm: i64,
        #[command(flatten)]
        oracle: OracleFlags,
    },
    /// Exhaustive search for a half-dimensional isotropic subspace.
    IsoSubspaces {
        #[command(flatten)]
        space: SpaceIn,
        #[command(flatten)]
        oracle: OracleFlags,
    },
    /// Unfiltered scan of the Grassmannian over F_{p^m}.
    GenCensus {
        #[command(flatten)]
        space: SpaceIn,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[command(flatten)]
        oracle: OracleFlags,
    },
    /// Full isometry group by independent backtracking.
    GroupExpand {
        #[command(flatten)]
        lattice: LatticeIn,
        #[command(flatten)]
        oracle: OracleFlags,
    },
    /// Orbits by expanding the stabilizer and moving every generatrix.
    OrbitBrute {
        #[command(flatten)]
        marking: MarkingIn,
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, value_enum, default_value = "characteristic")]
        filter: FilterArg,
        #[command(flatten)]
        oracle: OracleFlags,
    },
}

#[derive(Args, Debug)]
pub struct OracleFlags {
    /// Also run the main implementation and report agreement.
    #[arg(long)]
    pub compare: bool,
    /// Largest box, Grassmannian or group the oracle will scan.
    #[arg(long, default_value = "1e9", value_parser = parse_count)]
    pub budget: u128,
}

#[derive(Subcommand, Debug)]
pub enum WorkspaceCmd {
    /// Load, validate and re-save a workspace in canonical form.
    Roundtrip {
        #[arg(long = "in")]
        input: String,
        /// Where to write the canonical workspace.
        #[arg(long)]
        save: Option<String>,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("250"), Ok(250));
        assert!(parse_count("1e99").is_err());
        assert!(parse_count("x").is_err());
    }

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
