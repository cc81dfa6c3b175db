//! Inline specifications for states and channels, alongside file paths.
//!
//! Channels: `zoo:<name>[:key=value,...]` with names `identity`, `unitary`,
//! `depolarizing`, `decohering`, `isotropic` and `random`. States: `bell`,
//! `werner:p=<p>`, `mixed:<da>x<db>`, `random:<da>x<db>[:rank=<r>]` and
//! `product:<da>x<db>`. Anything else is read as a JSON file.
//!
//! Random choices draw from `seed=<n>` when given, else from the run seed.

use std::collections::BTreeMap;
use std::path::Path;

use qcorr_core::channel::zoo::{self, SpectrumPreserving};
use qcorr_core::linalg::{self, seeded_rng};
use qcorr_core::state::{random_density_with, tensor};
use qcorr_core::{BipartiteState, CMatrix, DensityMatrix, KrausChannel};

use crate::error::{CliError, CliResult};
use crate::formats;

type Params = BTreeMap<String, String>;

fn parse_params(s: &str) -> CliResult<Params> {
    s.split(',')
        .filter(|kv| !kv.is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Usage(format!("expected key=value, found '{kv}'")))
        })
        .collect()
}

fn get<T: std::str::FromStr>(p: &Params, key: &str) -> CliResult<Option<T>> {
    p.get(key)
        .map(|v| v.parse::<T>().map_err(|_| CliError::Usage(format!("invalid value '{v}' for '{key}'"))))
        .transpose()
}

fn get_or<T: std::str::FromStr>(p: &Params, key: &str, default: T) -> CliResult<T> {
    Ok(get(p, key)?.unwrap_or(default))
}

fn required<T: std::str::FromStr>(p: &Params, key: &str, what: &str) -> CliResult<T> {
    get(p, key)?.ok_or_else(|| CliError::Usage(format!("{what} needs '{key}='")))
}

fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(Path::new(path)).map_err(|source| CliError::Read { path: path.into(), source })
}

/// Named single-qubit gates plus `random` (Haar, any `d`).
fn gate(name: &str, d: usize, rng: &mut linalg::SeededRng) -> CliResult<CMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rows: &[&[(f64, f64)]] = match name {
        "random" => return Ok(linalg::random_unitary(d, rng)),
        "identity" | "i" => return Ok(CMatrix::identity(d, d)),
        "h" => &[&[(h, 0.0), (h, 0.0)], &[(h, 0.0), (-h, 0.0)]],
        "x" => &[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]],
        "y" => &[&[(0.0, 0.0), (0.0, -1.0)], &[(0.0, 1.0), (0.0, 0.0)]],
        "z" => &[&[(1.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (-1.0, 0.0)]],
        "s" => &[&[(1.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.0, 1.0)]],
        "t" => &[&[(1.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (h, h)]],
        other => return Err(CliError::Usage(format!("unknown gate '{other}'"))),
    };
    if d != 2 {
        return Err(CliError::Usage(format!("gate '{name}' acts on d=2, not d={d}")));
    }
    Ok(linalg::from_rows(rows))
}

pub fn zoo_channel(spec: &str, run_seed: u64) -> CliResult<KrausChannel> {
    let body = spec.strip_prefix("zoo:").unwrap_or(spec);
    let (name, rest) = body.split_once(':').unwrap_or((body, ""));
    let p = parse_params(rest)?;
    let mut rng = seeded_rng(get_or(&p, "seed", run_seed)?);
    let d: usize = get_or(&p, "d", 2)?;
    if d == 0 {
        return Err(CliError::Usage("d must be positive".into()));
    }
    Ok(match name {
        "identity" | "id" => zoo::identity(d),
        "unitary" => zoo::unitary(gate(p.get("gate").map_or("random", String::as_str), d, &mut rng)?)?,
        "depolarizing" => zoo::depolarizing(required(&p, "p", "depolarizing")?, d)?,
        "decohering" => {
            let basis = gate(p.get("basis").map_or("identity", |b| if b == "computational" { "identity" } else { b.as_str() }), d, &mut rng)?;
            zoo::completely_decohering(&basis)?
        }
        "isotropic" => {
            let gamma = match p.get("gamma").map_or("identity", String::as_str) {
                "transpose" => SpectrumPreserving::Transpose,
                g => SpectrumPreserving::Unitary(gate(g, d, &mut rng)?),
            };
            zoo::isotropic(required(&p, "p", "isotropic")?, &gamma, d)?
        }
        "random" => {
            let din = get_or(&p, "din", d)?;
            let dout = get_or(&p, "dout", din)?;
            zoo::random(din, dout, get_or(&p, "kraus", 2)?, &mut rng)?
        }
        other => return Err(CliError::Usage(format!("unknown zoo channel '{other}'"))),
    })
}

/// A channel from an inline zoo spec or a JSON file.
pub fn load_channel(spec: &str, run_seed: u64) -> CliResult<KrausChannel> {
    if spec.starts_with("zoo:") {
        zoo_channel(spec, run_seed)
    } else {
        formats::parse_channel(&read_file(spec)?, spec)
    }
}

fn parse_dims(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::Usage(format!("expected dimensions like 2x3, found '{s}'"));
    let (a, b) = s.split_once('x').ok_or_else(bad)?;
    let (a, b): (usize, usize) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    if a == 0 || b == 0 {
        return Err(bad());
    }
    Ok((a, b))
}

/// A bipartite state from an inline spec or a JSON file.
pub fn load_state(spec: &str, run_seed: u64) -> CliResult<BipartiteState> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "bell" => Ok(BipartiteState::bell()),
        "werner" => Ok(BipartiteState::werner(required(&parse_params(rest)?, "p", "werner")?)?),
        "mixed" => {
            let (da, db) = parse_dims(rest)?;
            Ok(BipartiteState::new(DensityMatrix::maximally_mixed(da * db), da, db)?)
        }
        "random" | "product" => {
            let (dims, params) = rest.split_once(':').unwrap_or((rest, ""));
            let (da, db) = parse_dims(dims)?;
            let p = parse_params(params)?;
            let mut rng = seeded_rng(get_or(&p, "seed", run_seed)?);
            if kind == "product" {
                let a = random_density_with(da, da, &mut rng)?;
                let b = random_density_with(db, db, &mut rng)?;
                return Ok(tensor(&a, &b));
            }
            let rank = get_or(&p, "rank", da * db)?;
            Ok(BipartiteState::new(random_density_with(da * db, rank, &mut rng)?, da, db)?)
        }
        _ => formats::parse_state(&read_file(spec)?, spec),
    }
}
