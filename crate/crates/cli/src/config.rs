use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::Args;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use siegel_core::arith::random::EntryBound;
use siegel_core::arith::FieldSpec;
use siegel_core::io::{to_pretty, IoError};
use siegel_core::lattice::{random_jordan, LatticeError};
use siegel_core::partition::{jordan_data, JordanData, PartitionError, PartitionWithZeroes};
use siegel_core::siegel::SiegelError;

/// Usage and parse errors exit with 2, mathematical failures with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Math(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Math(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Math(m) => f.write_str(m),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PartitionError> for CliError {
    fn from(e: PartitionError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<SiegelError> for CliError {
    fn from(e: SiegelError) -> Self {
        match e {
            SiegelError::ShapeMismatch(_) => CliError::Usage(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl From<LatticeError> for CliError {
    fn from(e: LatticeError) -> Self {
        match e {
            LatticeError::Invalid(_) | LatticeError::Partition(_) => CliError::Usage(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

/// Options shared by every command that draws random instances.
#[derive(Debug, Clone, Args)]
pub struct RandomArgs {
    /// Seed for all random choices.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coefficient field: `rationals`/`q`, `qt`, `q<N>`, `q<N>t`, or a JSON field spec.
    #[arg(long, default_value = "qt")]
    pub field: String,
    /// Nilpotency bound `m`.
    #[arg(long)]
    pub m: Option<usize>,
    /// Segment sizes `k_1,...,k_{m+1}`.
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Jordan partition `d_1 >= ... >= d_r`, padded with zeros to length `r`.
    #[arg(long, value_delimiter = ',')]
    pub d: Option<Vec<usize>>,
    /// Lattice rank.
    #[arg(long)]
    pub r: Option<usize>,
    /// Bound on random integer coefficients.
    #[arg(long, default_value_t = 3)]
    pub coeff: i64,
    /// Bound on numerator and denominator degrees of random rational functions.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    /// Redraws allowed when a random lattice fails to span.
    #[arg(long, default_value_t = 20)]
    pub attempts: usize,
}

impl RandomArgs {
    pub fn spec(&self) -> Result<Arc<FieldSpec>, CliError> {
        parse_field(&self.field)
    }

    pub fn bound(&self) -> Result<EntryBound, CliError> {
        if self.coeff < 1 {
            return Err(CliError::Usage("--coeff must be at least 1".into()));
        }
        Ok(EntryBound {
            coeff: self.coeff,
            degree: self.degree,
        })
    }

    fn m_or(&self, default: usize) -> Result<usize, CliError> {
        let m = self.m.unwrap_or(default);
        if m == 0 {
            return Err(CliError::Usage("--m must be positive".into()));
        }
        Ok(m)
    }

    /// Rejects inconsistent combinations before any trial runs.
    pub fn validate(&self) -> Result<(), CliError> {
        self.spec()?;
        self.bound()?;
        if self.r == Some(0) {
            return Err(CliError::Usage("--r must be positive".into()));
        }
        if let Some(k) = &self.k {
            if k.len() < 2 {
                return Err(CliError::Usage("--k needs at least two entries".into()));
            }
            if k.iter().sum::<usize>() == 0 {
                return Err(CliError::Usage("--k must not be all zero".into()));
            }
            if let Some(m) = self.m {
                if k.len() != m + 1 {
                    return Err(CliError::Usage(format!("--k has {} entries, --m {m} needs {}", k.len(), m + 1)));
                }
            }
            if let Some(r) = self.r {
                if k.iter().sum::<usize>() != r {
                    return Err(CliError::Usage("--k does not sum to --r".into()));
                }
            }
        }
        if self.d.is_some() {
            self.fixed_jordan()?;
        }
        self.m_or(2)?;
        Ok(())
    }

    /// A shape from `--k`, or a random one with `m+1` segments (and total
    /// `--r` when given), zero segments allowed.
    pub fn shape<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<usize>, CliError> {
        if let Some(k) = &self.k {
            return Ok(k.clone());
        }
        let m = self.m_or(2)?;
        let mut shape = vec![0; m + 1];
        match self.r {
            Some(r) => {
                for _ in 0..r {
                    shape[rng.random_range(0..=m)] += 1;
                }
            }
            None => {
                for k in shape.iter_mut() {
                    *k = rng.random_range(0..=2);
                }
                if shape.iter().all(|&k| k == 0) {
                    shape[rng.random_range(0..=m)] = 1;
                }
            }
        }
        Ok(shape)
    }

    fn fixed_jordan(&self) -> Result<Option<JordanData>, CliError> {
        if let Some(d) = &self.d {
            let mut parts = d.clone();
            let m = match self.m {
                Some(m) => m,
                None => parts.iter().copied().max().unwrap_or(0),
            };
            if m == 0 {
                return Err(CliError::Usage("--d needs a positive part or an explicit --m".into()));
            }
            if let Some(r) = self.r {
                if parts.len() > r {
                    return Err(CliError::Usage(format!("--d has {} parts, more than --r {r}", parts.len())));
                }
                parts.resize(r, 0);
            }
            return Ok(Some(jordan_data(&PartitionWithZeroes::new(parts)?, m)?));
        }
        if let Some(k) = &self.k {
            return Ok(Some(JordanData::from_shape(k)?));
        }
        Ok(None)
    }

    /// Jordan data from `--d` or `--k`, or a random partition whose largest
    /// part is `m`.
    pub fn jordan<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<JordanData, CliError> {
        if let Some(j) = self.fixed_jordan()? {
            return Ok(j);
        }
        let m = self.m_or(2)?;
        let r = self.r.unwrap_or(3);
        Ok(random_jordan(rng, m, r, m * r)?)
    }

    pub fn to_json(&self) -> Result<Value, CliError> {
        Ok(json!({
            "seed": self.seed,
            "field": self.spec()?.as_ref(),
            "m": self.m,
            "k": self.k,
            "d": self.d,
            "r": self.r,
            "coeff": self.coeff,
            "degree": self.degree,
        }))
    }
}

pub fn parse_field(s: &str) -> Result<Arc<FieldSpec>, CliError> {
    let spec = if s.trim_start().starts_with('{') {
        serde_json::from_str(s).map_err(|e| CliError::Usage(format!("bad field spec: {e}")))?
    } else {
        s.parse().map_err(|e| CliError::Usage(format!("{e}")))?
    };
    Ok(Arc::new(spec))
}

/// Independent stream of the seed for each trial.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Reads a JSON document from a file, or stdin for `None` and `-`.
pub fn read_input(path: Option<&Path>) -> Result<Value, CliError> {
    let text = match path {
        Some(p) if p != Path::new("-") => {
            fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Usage(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("malformed JSON: {e}")))
}

pub fn emit(out: Option<&PathBuf>, v: &Value) -> Result<(), CliError> {
    let text = to_pretty(v);
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write stdout: {e}"))),
    }
}
