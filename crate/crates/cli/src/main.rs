//! `juna`: key generation, encryption, decryption, and analysis reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use juna::analysis::census::CensusReport;
use juna::analysis::costs::CostEstimates;
use juna::analysis::{attack_cost_estimates, density_bit, density_bitpair, k_bounds, mitm_ssp, uniqueness_census};
use juna::format::{
    ciphertext_to_hex, parse_ciphertext, parse_plaintext, parse_private_key, parse_public_key, plaintext_to_hex,
    private_key_to_string, public_key_to_string,
};
use juna::{decrypt, encrypt, keygen, Error, Execution, SchemeProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Parser)]
#[command(name = "juna", version, about = "Bit-pair knapsack public-key scheme")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a key pair and write both key files.
    Keygen {
        #[arg(long, value_parser = ["toy", "n80", "n96", "n112"])]
        profile: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_pub: PathBuf,
        #[arg(long)]
        out_prv: PathBuf,
    },
    /// Encrypt an n-bit plaintext given as hex or binary.
    Encrypt {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long = "in")]
        input: String,
        /// Seed for the filler bits and r-string; fresh entropy when absent.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Decrypt a hex ciphertext.
    Decrypt {
        #[arg(long)]
        prv: PathBuf,
        #[arg(long = "in")]
        input: String,
    },
    /// Analysis reports.
    Analyze {
        #[command(subcommand)]
        report: Report,
    },
}

#[derive(Subcommand)]
enum Report {
    /// Knapsack density: bit-pair form with --nt, bit form with --n.
    Density {
        #[arg(long, conflicts_with = "n", required_unless_present = "n")]
        nt: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        lgm: u64,
        #[arg(long)]
        csv: bool,
    },
    /// Bounds on the lever exponent k.
    Kbounds {
        #[arg(long)]
        nt: u64,
        #[arg(long)]
        csv: bool,
    },
    /// log2 attack-cost estimates for n in {80, 96, 112}.
    Costs {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        csv: bool,
    },
    /// Meet-in-the-middle subset sum.
    Mitm {
        /// Comma-separated positive weights.
        #[arg(long, value_delimiter = ',', required = true)]
        weights: Vec<u64>,
        #[arg(long)]
        target: u64,
    },
    /// Exhaustive uniqueness census over a desk-scale key pair.
    Census {
        #[arg(long = "pub")]
        public: PathBuf,
        #[arg(long)]
        prv: PathBuf,
        #[arg(long)]
        csv: bool,
        #[arg(long)]
        sequential: bool,
    },
}

/// Failure classes and their exit codes.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Crypto(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Crypto(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Crypto(m) | Failure::Io(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotACiphertext { .. }
            | Error::ModulusSearch(_)
            | Error::PoolExhausted { .. }
            | Error::NotInvertible(_)
            | Error::MissingFactorization
            | Error::Dlog(_) => Failure::Crypto(e.to_string()),
            Error::Parse { .. } => Failure::Io(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn key_error(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Keygen { profile, seed, out_pub, out_prv } => {
            let profile = SchemeProfile::by_name(&profile).expect("validated by clap");
            let start = Instant::now();
            let kp = keygen(&profile, &mut ChaCha20Rng::seed_from_u64(seed))?;
            let elapsed = start.elapsed();
            write(&out_pub, &public_key_to_string(&kp.public))?;
            write(&out_prv, &private_key_to_string(&kp.private))?;
            Ok(format!("lgM={}\nelapsed={:.3}s\n", kp.public.modulus().bits(), elapsed.as_secs_f64()))
        }
        Command::Encrypt { public, input, seed } => {
            let key = parse_public_key(&read(&public)?).map_err(key_error(&public))?;
            let plaintext = parse_plaintext(&input, key.profile().n)?;
            let mut rng = match seed {
                Some(s) => ChaCha20Rng::seed_from_u64(s),
                None => ChaCha20Rng::from_entropy(),
            };
            let c = encrypt(&key, &plaintext, &mut rng)?;
            Ok(format!("{}\n", ciphertext_to_hex(&c)))
        }
        Command::Decrypt { prv, input } => {
            let key = parse_private_key(&read(&prv)?).map_err(key_error(&prv))?;
            let c = parse_ciphertext(&input)?;
            let plaintext = decrypt(&key, &c)?;
            Ok(format!("{}\n", plaintext_to_hex(&plaintext)))
        }
        Command::Analyze { report } => analyze(report),
    }
}

fn analyze(report: Report) -> Result<String, Failure> {
    let positive = |name: &str, v: u64| {
        if v == 0 {
            Err(Failure::Usage(format!("--{name} must be positive")))
        } else {
            Ok(v)
        }
    };
    match report {
        Report::Density { nt, n, lgm, csv } => {
            let lgm = positive("lgm", lgm)?;
            let (kind, size, d) = match (nt, n) {
                (Some(nt), _) => ("bitpair", nt, density_bitpair(positive("nt", nt)?, lgm)),
                (None, Some(n)) => ("bit", n, density_bit(positive("n", n)?, lgm)),
                (None, None) => unreachable!("clap requires one of --nt and --n"),
            };
            if csv {
                Ok(format!(
                    "kind,size,lgM,numerator,denominator,density\n{kind},{size},{lgm},{},{},{d}\n",
                    d.numerator, d.denominator
                ))
            } else {
                Ok(format!("D={}/{}={d}\n", d.numerator, d.denominator))
            }
        }
        Report::Kbounds { nt, csv } => {
            if nt == 0 || nt % 2 != 0 {
                return Err(Failure::Usage("--nt must be a positive even number".into()));
            }
            let b = k_bounds(nt);
            if csv {
                Ok(format!("ntilde,kmax,kexpected,kabs\n{nt},{},{},{}\n", b.k_max, b.k_expected, b.k_abs_bound))
            } else {
                Ok(format!("kmax={}\nkexpected={}\nkabs={}\n", b.k_max, b.k_expected, b.k_abs_bound))
            }
        }
        Report::Costs { n, csv } => {
            let c = attack_cost_estimates(n)?;
            if csv {
                Ok(format!("{}\n{}\n", CostEstimates::CSV_HEADER, c.to_csv_row()))
            } else {
                Ok(format!("{c}\n"))
            }
        }
        Report::Mitm { weights, target } => {
            if weights.len() > 48 {
                return Err(Failure::Usage("at most 48 weights".into()));
            }
            if weights.contains(&0) {
                return Err(Failure::Usage("weights must be positive".into()));
            }
            Ok(match mitm_ssp(&weights, target) {
                Some(b) => format!("b={}\n", b.iter().map(|&x| if x { '1' } else { '0' }).collect::<String>()),
                None => "no solution\n".to_string(),
            })
        }
        Report::Census { public, prv, csv, sequential } => {
            let pk = parse_public_key(&read(&public)?).map_err(key_error(&public))?;
            let sk = parse_private_key(&read(&prv)?).map_err(key_error(&prv))?;
            let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
            let report = uniqueness_census(&pk, &sk, exec)?;
            let mut out = String::new();
            if csv {
                writeln!(out, "{}\n{}", CensusReport::CSV_HEADER, report.to_csv_row()).expect("string write");
            } else {
                writeln!(out, "{report}").expect("string write");
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
