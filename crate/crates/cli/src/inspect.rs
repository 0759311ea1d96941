//! Gauss sums, identity checks and oracle tables.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use charshift::algorithms::{
    repeated_sampling_comparison, verify_jacobi_qft_lemma, verify_trace_fourier_transform,
};
use charshift::field::parse_coeffs;
use charshift::number::{gauss_sum_bruteforce, gauss_sum_closed_form};
use charshift::qsim::TOLERANCE;
use charshift::{Error, FactoredOddSquarefree, FieldSpec, GaussSumSpec, OracleParams, Shift, ShiftOracle};
use clap::{Args, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{open_output, CliError, CliResult};

/// Closed form and brute force must agree to this.
const GAUSS_TOLERANCE: f64 = 1e-6;

/// Largest table `oracle-dump` writes.
const DUMP_LIMIT: u64 = 100_000;

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct GaussArgs {
    /// Prime modulus p.
    #[arg(long, value_name = "P")]
    zp: Option<u64>,
    /// Odd square-free modulus n.
    #[arg(long, value_name = "N")]
    zn: Option<u64>,
    /// Field GF(p^r), given as "P R".
    #[arg(long, num_args = 2, value_names = ["P", "R"])]
    fq: Option<Vec<u64>>,
}

pub fn gauss(args: &GaussArgs) -> CliResult<()> {
    let (label, spec) = if let Some(p) = args.zp {
        (format!("G(Z_{p})"), GaussSumSpec::RingZp(p))
    } else if let Some(n) = args.zn {
        let moduli = FactoredOddSquarefree::new(n).map_err(CliError::config)?;
        (format!("G(Z_{n})"), GaussSumSpec::RingZn(moduli))
    } else {
        let fq = args.fq.as_deref().unwrap_or_default();
        let (p, r) = (fq[0], fq[1] as usize);
        let field = FieldSpec::new(p, r, None).map_err(CliError::config)?;
        (format!("G(F_{p}^{r})"), GaussSumSpec::Field(Arc::new(field)))
    };
    let exact = gauss_sum_closed_form(&spec).map_err(CliError::config)?;
    let brute = gauss_sum_bruteforce(&spec).map_err(CliError::config)?;
    let closed = exact.to_complex();
    let delta = (closed - brute).norm();
    println!("{label} = {exact}");
    println!("closed form: {:.12} {:+.12}i", closed.re, closed.im);
    println!("brute force: {:.12} {:+.12}i", brute.re, brute.im);
    println!("delta: {delta:.3e}");
    if delta < GAUSS_TOLERANCE {
        Ok(())
    } else {
        Err(CliError::Violation(format!("delta {delta:.3e} >= {GAUSS_TOLERANCE:e}")))
    }
}

#[derive(Subcommand, Debug)]
pub enum VerifySuite {
    /// Fourier transform of the shifted Jacobi state against its closed form.
    Lemma3 {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 0)]
        shift: u64,
    },
    /// Composed trace-Fourier transform against the literal kernel.
    Tft {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        r: usize,
    },
    /// Reduced-fraction versus continued-fraction sampling distributions.
    Rfcf {
        #[arg(long)]
        n: u64,
        #[arg(long = "M")]
        m: u64,
        #[arg(long, default_value_t = 0)]
        shift: u64,
    },
}

fn check(ok: bool, what: String) -> CliResult<()> {
    println!("{what} {}", if ok { "PASS" } else { "FAIL" });
    if ok {
        Ok(())
    } else {
        Err(CliError::Violation(what))
    }
}

pub fn verify(suite: &VerifySuite) -> CliResult<()> {
    match *suite {
        VerifySuite::Lemma3 { n, shift } => {
            let moduli = FactoredOddSquarefree::new(n).map_err(CliError::config)?;
            let dev = verify_jacobi_qft_lemma(&moduli, shift).map_err(CliError::sim)?;
            check(
                dev < TOLERANCE,
                format!("lemma3 n={n} s={shift} max_deviation={dev:.3e} tolerance={TOLERANCE:e}"),
            )
        }
        VerifySuite::Tft { p, r } => {
            let field = FieldSpec::new(p, r, None).map_err(CliError::config)?;
            let c = verify_trace_fourier_transform(&field).map_err(CliError::sim)?;
            check(
                c.matrix_deviation < TOLERANCE
                    && c.unitarity_deviation < TOLERANCE
                    && c.coordinates_bijective,
                format!(
                    "tft q={} matrix_deviation={:.3e} unitarity_deviation={:.3e} bijective={} tolerance={TOLERANCE:e}",
                    field.q(),
                    c.matrix_deviation,
                    c.unitarity_deviation,
                    c.coordinates_bijective
                ),
            )
        }
        VerifySuite::Rfcf { n, m, shift } => {
            let moduli = FactoredOddSquarefree::new(n).map_err(CliError::config)?;
            let c = repeated_sampling_comparison(&moduli, shift, m).map_err(CliError::config)?;
            check(
                c.l1_distance <= c.bound,
                format!("rfcf n={n} M={m} s={shift} l1={:.6} bound={:.6}", c.l1_distance, c.bound),
            )
        }
    }
}

#[derive(Args, Debug)]
pub struct DumpArgs {
    /// Legendre oracle over Z_p, or with --r a field oracle over GF(p^r).
    #[arg(long, conflicts_with = "n")]
    p: Option<u64>,
    #[arg(long, requires = "p")]
    r: Option<usize>,
    #[arg(long, requires = "r")]
    modulus: Option<String>,
    /// Jacobi oracle over Z_n, or with --M the unknown-modulus oracle.
    #[arg(long)]
    n: Option<u64>,
    #[arg(long = "M", requires = "n")]
    m: Option<u64>,
    #[arg(long, default_value = "random")]
    shift: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn oracle_dump(args: &DumpArgs) -> CliResult<()> {
    let params = match (args.p, args.r, args.n, args.m) {
        (Some(p), Some(r), _, _) => {
            let coeffs = args
                .modulus
                .as_deref()
                .map(parse_coeffs)
                .transpose()
                .map_err(CliError::config)?;
            OracleParams::Field(Arc::new(FieldSpec::new(p, r, coeffs.as_deref()).map_err(CliError::config)?))
        }
        (Some(p), None, _, _) => OracleParams::Legendre { p },
        (None, _, Some(n), Some(m)) => OracleParams::JacobiUnknown { n, m },
        (None, _, Some(n), None) => OracleParams::Jacobi { n },
        _ => return Err(CliError::Config("give --p [--r] or --n [--M]".into())),
    };
    let domain = match &params {
        OracleParams::Legendre { p } => *p,
        OracleParams::Jacobi { n } => *n,
        OracleParams::JacobiUnknown { m, .. } => *m,
        OracleParams::Field(f) => f.q() as u64,
    };
    if domain > DUMP_LIMIT {
        return Err(CliError::config(Error::DomainTooLarge {
            size: domain,
            limit: DUMP_LIMIT,
        }));
    }
    let oracle = if args.shift == "random" {
        ShiftOracle::with_random_shift(params.clone(), &mut ChaCha8Rng::seed_from_u64(args.seed))
    } else {
        let shift = match &params {
            OracleParams::Field(f) => Shift::Field(f.parse_element(&args.shift).map_err(CliError::config)?),
            _ => Shift::Int(
                args.shift
                    .parse()
                    .map_err(|_| CliError::Config(format!("bad shift {:?}", args.shift)))?,
            ),
        };
        ShiftOracle::new(params.clone(), shift)
    }
    .map_err(CliError::config)?;

    let mut out = open_output(args.out.as_ref())?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["x", "f(x)"]).map_err(CliError::sim)?;
        match &params {
            OracleParams::Field(f) => {
                for x in f.elements() {
                    let v = oracle.query_field(&x).map_err(CliError::sim)?;
                    w.write_record([x.to_string(), v.to_string()]).map_err(CliError::sim)?;
                }
            }
            _ => {
                for x in 0..domain {
                    let v = oracle.query(x).map_err(CliError::sim)?;
                    w.write_record([x.to_string(), v.to_string()]).map_err(CliError::sim)?;
                }
            }
        }
        w.flush().map_err(CliError::sim)?;
    }
    out.flush().map_err(CliError::sim)
}
