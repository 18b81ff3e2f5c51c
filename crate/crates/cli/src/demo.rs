//! Application demos: table loading, generators and JSON results.

use std::f64::consts::PI;
use std::path::Path;

use phasekit::apps::{ck_single_query, deutsch_jozsa, grover, Ancilla, CkParams};
use phasekit::gadget::GadgetVariant;
use phasekit::oracle::{indicator_table, parse_table, FunctionTable};
use phasekit::random::{derive_seed, random_density, rng};
use phasekit::state::{RegisterLayout, StateVector};
use phasekit::ANCILLA;
use rand::seq::{index::sample, SliceRandom};
use serde_json::{json, Value};

use crate::error::CliError;
use crate::json::value_of;
use crate::suites::reference::{grover_closed_form, single_query_exact};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum AncillaKind {
    /// Seeded random pure state.
    Random,
    /// The basis state |0>.
    Zero,
    /// Seeded random full-rank density operator.
    Mixed,
}

impl AncillaKind {
    fn name(self) -> &'static str {
        match self {
            AncillaKind::Random => "random",
            AncillaKind::Zero => "zero",
            AncillaKind::Mixed => "mixed",
        }
    }

    pub fn build(self, dim: usize, seed: u64) -> Result<Ancilla, CliError> {
        Ok(match self {
            AncillaKind::Random => Ancilla::Random {
                seed: derive_seed(seed, 1),
            },
            AncillaKind::Zero => Ancilla::Pure(StateVector::basis(
                RegisterLayout::single(ANCILLA, dim)?,
                &[0],
            )?),
            AncillaKind::Mixed => Ancilla::Mixed(random_density(dim, dim, derive_seed(seed, 2))?),
        })
    }
}

/// Parses `pi`, `-pi/2`, `2pi/3`, `0.75*pi` or a plain number of radians.
pub fn parse_angle(text: &str) -> Result<f64, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "cannot parse angle '{text}' (try 'pi', '2pi/3' or radians)"
        ))
    };
    let t = text.trim().to_ascii_lowercase();
    let Some((coef, rest)) = t.split_once("pi") else {
        return t
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(bad);
    };
    let coef = coef.trim().trim_end_matches('*').trim();
    let c = match coef {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    let d = match rest.trim() {
        "" => 1.0,
        r => r
            .strip_prefix('/')
            .and_then(|x| x.trim().parse::<f64>().ok())
            .filter(|x| *x != 0.0)
            .ok_or_else(bad)?,
    };
    Ok(c * PI / d)
}

pub fn load_table(path: &Path) -> Result<FunctionTable, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read table {}: {e}", path.display())))?;
    parse_table(&text).map_err(|source| CliError::Table {
        path: path.display().to_string(),
        source,
    })
}

fn domain_from_bits(n: Option<u32>) -> Result<usize, CliError> {
    let n = n.ok_or_else(|| CliError::Usage("give --table FILE or --n BITS".into()))?;
    if !(1..=20).contains(&n) {
        return Err(CliError::Usage(format!("--n {n} outside 1..=20")));
    }
    Ok(1usize << n)
}

/// Balanced table with a seeded choice of the half that maps to 1.
pub fn random_balanced(domain: usize, seed: u64) -> Result<FunctionTable, CliError> {
    let mut values: Vec<usize> = (0..domain).map(|x| (x < domain / 2) as usize).collect();
    values.shuffle(&mut rng(seed));
    Ok(FunctionTable::new(2, values)?)
}

pub struct TableSource<'a> {
    pub table: Option<&'a Path>,
    pub n: Option<u32>,
    pub seed: u64,
}

impl TableSource<'_> {
    fn input(&self, f: &FunctionTable, generated: &str) -> Value {
        json!({
            "N": f.domain_size(),
            "M": f.modulus(),
            "source": match self.table {
                Some(p) => format!("file:{}", p.display()),
                None => generated.to_string(),
            },
            "table": f.values(),
        })
    }
}

/// Marked set from `--target` or `--solutions`.
fn search_table(
    src: &TableSource,
    target: Option<usize>,
    solutions: Option<usize>,
) -> Result<(FunctionTable, String), CliError> {
    if let Some(p) = src.table {
        return Ok((load_table(p)?, String::new()));
    }
    let n = domain_from_bits(src.n)?;
    match (target, solutions) {
        (Some(_), Some(_)) => Err(CliError::Usage(
            "give either --target or --solutions, not both".into(),
        )),
        (Some(t), None) => {
            if t >= n {
                return Err(CliError::Usage(format!("--target {t} outside 0..{n}")));
            }
            Ok((indicator_table(n, &[t])?, format!("target {t}")))
        }
        (None, Some(s)) => {
            if s > n {
                return Err(CliError::Usage(format!("--solutions {s} exceeds N = {n}")));
            }
            let mut marked = sample(&mut rng(derive_seed(src.seed, 3)), n, s).into_vec();
            marked.sort_unstable();
            Ok((
                indicator_table(n, &marked)?,
                format!("{s} seeded solutions"),
            ))
        }
        (None, None) => Err(CliError::Usage(
            "give --target T or --solutions COUNT".into(),
        )),
    }
}

fn with_meta(
    result: Value,
    app: &str,
    input: Value,
    ancilla: AncillaKind,
    variant: GadgetVariant,
    seed: u64,
) -> Value {
    let mut out = result;
    let obj = out.as_object_mut().expect("results serialize to objects");
    obj.insert("app".into(), app.into());
    obj.insert("input".into(), input);
    obj.insert("ancilla".into(), ancilla.name().into());
    obj.insert("variant".into(), variant.name().into());
    obj.insert("seed".into(), seed.into());
    out
}

pub fn dj(
    src: &TableSource,
    constant: Option<usize>,
    ancilla: AncillaKind,
    variant: GadgetVariant,
) -> Result<Value, CliError> {
    let (f, generated) = match (src.table, constant) {
        (Some(p), _) => (load_table(p)?, String::new()),
        (None, Some(c)) => {
            if c > 1 {
                return Err(CliError::Usage("--constant takes 0 or 1".into()));
            }
            (
                FunctionTable::constant(domain_from_bits(src.n)?, 2, c)?,
                format!("constant {c}"),
            )
        }
        (None, None) => (
            random_balanced(domain_from_bits(src.n)?, derive_seed(src.seed, 4))?,
            "seeded balanced".to_string(),
        ),
    };
    if f.modulus() != 2 {
        return Err(CliError::Usage(format!(
            "Deutsch-Jozsa needs a table with M = 2, got M = {}",
            f.modulus()
        )));
    }
    let verdict = deutsch_jozsa(&f, &ancilla.build(2, src.seed)?, variant)?;
    Ok(with_meta(
        value_of(&verdict),
        "dj",
        src.input(&f, &generated),
        ancilla,
        variant,
        src.seed,
    ))
}

pub fn grover_demo(
    src: &TableSource,
    target: Option<usize>,
    solutions: Option<usize>,
    iters: Option<usize>,
    ancilla: AncillaKind,
    variant: GadgetVariant,
) -> Result<Value, CliError> {
    let (f, generated) = search_table(src, target, solutions)?;
    let (n, t) = (f.domain_size(), f.support_size());
    let iterations = iters.unwrap_or_else(|| {
        if t == 0 {
            return 0;
        }
        let theta = (t as f64 / n as f64).sqrt().asin();
        (PI / (4.0 * theta) - 0.5).round().max(0.0) as usize
    });
    let res = grover(&f, iterations, &ancilla.build(2, src.seed)?, variant)?;
    let mut out = with_meta(
        value_of(&res),
        "grover",
        src.input(&f, &generated),
        ancilla,
        variant,
        src.seed,
    );
    out["closed_form_success_probability"] = grover_closed_form(n, t, iterations).into();
    Ok(out)
}

pub fn ck_demo(
    src: &TableSource,
    target: Option<usize>,
    solutions: Option<usize>,
    params: CkParams,
    mbits: u32,
    ancilla: AncillaKind,
    variant: GadgetVariant,
) -> Result<Value, CliError> {
    if !(1..=12).contains(&mbits) {
        return Err(CliError::Usage(format!("--mbits {mbits} outside 1..=12")));
    }
    let (f, generated) = search_table(src, target, solutions)?;
    if params.pivot >= f.domain_size() {
        return Err(CliError::Usage(format!(
            "--pivot {} outside 0..{}",
            params.pivot,
            f.domain_size()
        )));
    }
    let res = ck_single_query(
        &f,
        &params,
        mbits,
        &ancilla.build(1 << mbits, src.seed)?,
        variant,
    )?;
    let marked: Vec<bool> = f.values().iter().map(|&v| v != 0).collect();
    let mut out = with_meta(
        value_of(&res),
        "ck",
        src.input(&f, &generated),
        ancilla,
        variant,
        src.seed,
    );
    out["parameters"] =
        json!({"gamma": params.gamma, "beta": params.beta, "pivot": params.pivot, "mbits": mbits});
    out["exact_phase_success_probability"] =
        single_query_exact(&marked, params.gamma, params.beta).into();
    Ok(out)
}
