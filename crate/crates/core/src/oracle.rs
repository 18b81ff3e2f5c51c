//! Tabulated functions `f: Z_N -> Z_M`, the oracle `U_f` acting as a
//! controlled translation on the ancilla, and m-bit quantization of
//! real-valued functions.
//!
//! Table text format: the first non-comment line is `N M`, followed by
//! exactly `N` lines `x y` in any order. `#` starts a comment. Real-valued
//! tables use the header `N real` and rows `x v` with `0 <= v < 1`.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random::rng;
use crate::spectral::reduce;
use crate::state::{CMatrix, StateVector, C64};

/// Exact table of `f: Z_N -> Z_M`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct FunctionTable {
    modulus: usize,
    values: Vec<usize>,
}

impl FunctionTable {
    pub fn new(modulus: usize, values: Vec<usize>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::domain("codomain modulus must be positive"));
        }
        if values.is_empty() {
            return Err(Error::domain("table must have at least one entry"));
        }
        if let Some((x, v)) = values.iter().enumerate().find(|(_, &v)| v >= modulus) {
            return Err(Error::domain(format!(
                "f({x}) = {v} is not below modulus {modulus}"
            )));
        }
        Ok(FunctionTable { modulus, values })
    }

    pub fn constant(domain: usize, modulus: usize, value: usize) -> Result<Self> {
        Self::new(modulus, vec![value; domain])
    }

    /// N
    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    /// M
    pub fn modulus(&self) -> usize {
        self.modulus
    }

    pub fn value(&self, x: usize) -> usize {
        self.values[x]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    /// Number of `x` with `f(x) != 0`.
    pub fn support_size(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    /// Serializes to the table text format, rows in ascending `x`.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.domain_size(), self.modulus);
        for (x, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{x} {v}");
        }
        out
    }
}

/// Table of `f: Z_N -> [0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealFunctionTable {
    values: Vec<f64>,
}

impl RealFunctionTable {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain("table must have at least one entry"));
        }
        if let Some((x, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0 && **v < 1.0))
        {
            return Err(Error::domain(format!("f({x}) = {v} is not in [0, 1)")));
        }
        Ok(RealFunctionTable { values })
    }

    pub fn domain_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} real\n", self.values.len());
        for (x, v) in self.values.iter().enumerate() {
            let _ = writeln!(out, "{x} {v}");
        }
        out
    }
}

/// Boolean table with a single 1 at `l`.
pub fn delta_table(domain: usize, l: usize) -> Result<FunctionTable> {
    if l >= domain {
        return Err(Error::domain(format!(
            "index {l} outside domain of size {domain}"
        )));
    }
    let mut values = vec![0; domain];
    values[l] = 1;
    FunctionTable::new(2, values)
}

/// Boolean table that is 1 exactly on `marked`.
pub fn indicator_table(domain: usize, marked: &[usize]) -> Result<FunctionTable> {
    let mut values = vec![0; domain];
    for &x in marked {
        if x >= domain {
            return Err(Error::domain(format!(
                "index {x} outside domain of size {domain}"
            )));
        }
        values[x] = 1;
    }
    FunctionTable::new(2, values)
}

/// m-bit truncation `f~(x) = floor(f(x) 2^m)` into `Z_{2^m}`.
pub fn quantize(rf: &RealFunctionTable, bits: u32) -> Result<FunctionTable> {
    if bits == 0 || bits > 40 {
        return Err(Error::domain(format!(
            "bit count must be in 1..=40, got {bits}"
        )));
    }
    let modulus = 1usize << bits;
    let scale = modulus as f64;
    let values = rf
        .values
        .iter()
        .map(|&v| ((v * scale).floor() as usize).min(modulus - 1))
        .collect();
    FunctionTable::new(modulus, values)
}

/// Uniformly random table, deterministic per seed.
pub fn random_table(domain: usize, modulus: usize, seed: u64) -> Result<FunctionTable> {
    if modulus == 0 {
        return Err(Error::domain("codomain modulus must be positive"));
    }
    let mut rng = rng(seed);
    FunctionTable::new(
        modulus,
        (0..domain).map(|_| rng.random_range(0..modulus)).collect(),
    )
}

pub fn random_real_table(domain: usize, seed: u64) -> Result<RealFunctionTable> {
    let mut rng = rng(seed);
    RealFunctionTable::new((0..domain).map(|_| rng.random::<f64>()).collect())
}

/// Direction of the oracle's translation: `U_f` or `U_f^† = U_{-f}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `|x, y, ...> -> |x, y + sign f(x) mod M, ...>`, applied as a permutation
/// of the amplitude array.
pub fn apply_oracle(
    state: &StateVector,
    control: &str,
    ancilla: &str,
    f: &FunctionTable,
    sign: Sign,
) -> Result<StateVector> {
    let layout = state.layout();
    if control == ancilla {
        return Err(Error::domain(
            "control and ancilla must be different segments",
        ));
    }
    let cpos = layout.position(control)?;
    let apos = layout.position(ancilla)?;
    let n = layout.segments()[cpos].dim;
    let m = layout.segments()[apos].dim;
    if n != f.domain_size() {
        return Err(Error::domain(format!(
            "control segment has dimension {n}, table domain is {}",
            f.domain_size()
        )));
    }
    if m != f.modulus() {
        return Err(Error::domain(format!(
            "ancilla segment has dimension {m}, table modulus is {}",
            f.modulus()
        )));
    }
    let cstride = layout.stride(cpos);
    let astride = layout.stride(apos);
    let shifts: Vec<usize> = f
        .values
        .iter()
        .map(|&v| reduce(sign.value() * v as i64, m))
        .collect();
    Ok(state.permuted(|i| {
        let x = (i / cstride) % n;
        let y = (i / astride) % m;
        let y2 = (y + shifts[x]) % m;
        i - y * astride + y2 * astride
    }))
}

/// Dense `(N M) x (N M)` realization of the oracle over `[control, ancilla]`,
/// for cross-checks only (`N M <= 4096`).
pub fn oracle_matrix(f: &FunctionTable, sign: Sign) -> Result<CMatrix> {
    let n = f.domain_size();
    let m = f.modulus();
    let dim = n
        .checked_mul(m)
        .filter(|&d| d <= 4096)
        .ok_or_else(|| Error::domain("dense oracle limited to N*M <= 4096"))?;
    let mut mat = CMatrix::zeros(dim, dim);
    for x in 0..n {
        let shift = reduce(sign.value() * f.values[x] as i64, m);
        for y in 0..m {
            mat[(x * m + (y + shift) % m, x * m + y)] = C64::new(1.0, 0.0);
        }
    }
    Ok(mat)
}

/// Parsed table file of either kind.
#[derive(Debug, Clone, PartialEq)]
pub enum TableFile {
    Exact(FunctionTable),
    Real(RealFunctionTable),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let body = line.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = body.split_whitespace().collect();
        (!tokens.is_empty()).then_some((i + 1, tokens))
    })
}

fn parse_usize(token: &str, line: usize, what: &str) -> Result<usize> {
    token.parse::<usize>().map_err(|_| {
        Error::parse(
            line,
            format!("{what} '{token}' is not a non-negative integer"),
        )
    })
}

/// Parses either an exact (`N M`) or a real (`N real`) table.
pub fn parse_table_file(text: &str) -> Result<TableFile> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| Error::parse(0, "empty table: missing 'N M' header"))?;
    if header.len() != 2 {
        return Err(Error::parse(hline, "header must be 'N M' or 'N real'"));
    }
    let n = parse_usize(header[0], hline, "domain size")?;
    if n == 0 {
        return Err(Error::parse(hline, "domain size must be positive"));
    }
    let real = header[1] == "real";
    let modulus = if real {
        0
    } else {
        let m = parse_usize(header[1], hline, "modulus")?;
        if m == 0 {
            return Err(Error::parse(hline, "modulus must be positive"));
        }
        m
    };

    let mut exact: Vec<Option<usize>> = vec![None; n];
    let mut reals: Vec<Option<f64>> = vec![None; n];
    let mut last_line = hline;
    for (line, tokens) in lines {
        last_line = line;
        if tokens.len() != 2 {
            return Err(Error::parse(line, "expected two fields 'x value'"));
        }
        let x = parse_usize(tokens[0], line, "argument")?;
        if x >= n {
            return Err(Error::parse(line, format!("x={x} outside domain 0..{n}")));
        }
        if exact[x].is_some() || reals[x].is_some() {
            return Err(Error::parse(line, format!("duplicate row for x={x}")));
        }
        if real {
            let v: f64 = tokens[1].parse().map_err(|_| {
                Error::parse(line, format!("value '{}' is not a decimal", tokens[1]))
            })?;
            if !(v.is_finite() && (0.0..1.0).contains(&v)) {
                return Err(Error::parse(
                    line,
                    format!("value {v} for x={x} is not in [0, 1)"),
                ));
            }
            reals[x] = Some(v);
        } else {
            let v = parse_usize(tokens[1], line, "value")?;
            if v >= modulus {
                return Err(Error::parse(
                    line,
                    format!("value {v} for x={x} is out of range (must be < {modulus})"),
                ));
            }
            exact[x] = Some(v);
        }
    }
    let missing = |x: usize| Error::parse(last_line, format!("missing row for x={x}"));
    if real {
        let values = reals
            .into_iter()
            .enumerate()
            .map(|(x, v)| v.ok_or_else(|| missing(x)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TableFile::Real(RealFunctionTable::new(values)?))
    } else {
        let values = exact
            .into_iter()
            .enumerate()
            .map(|(x, v)| v.ok_or_else(|| missing(x)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TableFile::Exact(FunctionTable::new(modulus, values)?))
    }
}

/// Parses an exact table; a real-valued file is an error.
pub fn parse_table(text: &str) -> Result<FunctionTable> {
    match parse_table_file(text)? {
        TableFile::Exact(t) => Ok(t),
        TableFile::Real(_) => Err(Error::parse(1, "expected an integer table, found 'N real'")),
    }
}

pub fn parse_real_table(text: &str) -> Result<RealFunctionTable> {
    match parse_table_file(text)? {
        TableFile::Real(t) => Ok(t),
        TableFile::Exact(_) => Err(Error::parse(1, "expected a real table header 'N real'")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::random_state_on;
    use crate::state::{basis_state, RegisterLayout};
    use proptest::prelude::*;

    #[test]
    fn zero_table_is_identity() {
        let layout = RegisterLayout::new([("c", 4), ("a", 3)]).unwrap();
        let s = random_state_on(&layout, 1);
        let f = FunctionTable::constant(4, 3, 0).unwrap();
        assert_eq!(apply_oracle(&s, "c", "a", &f, Sign::Plus).unwrap(), s);
    }

    #[test]
    fn oracle_translates_basis_state() {
        let layout = RegisterLayout::new([("c", 4), ("a", 4)]).unwrap();
        let f = FunctionTable::new(4, vec![0, 0, 0, 2]).unwrap();
        let s = basis_state(&layout, &[3, 1]).unwrap();
        let out = apply_oracle(&s, "c", "a", &f, Sign::Plus).unwrap();
        assert_eq!(out, basis_state(&layout, &[3, 3]).unwrap());
        let back = apply_oracle(&out, "c", "a", &f, Sign::Minus).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn oracle_respects_segment_order() {
        // ancilla before control, with an untouched segment in between
        let layout = RegisterLayout::new([("a", 3), ("r", 2), ("c", 2)]).unwrap();
        let f = FunctionTable::new(3, vec![0, 2]).unwrap();
        let s = basis_state(&layout, &[1, 1, 1]).unwrap();
        let out = apply_oracle(&s, "c", "a", &f, Sign::Plus).unwrap();
        assert_eq!(out, basis_state(&layout, &[0, 1, 1]).unwrap());
    }

    #[test]
    fn oracle_dimension_errors() {
        let layout = RegisterLayout::new([("c", 4), ("a", 2)]).unwrap();
        let s = basis_state(&layout, &[0, 0]).unwrap();
        let f = FunctionTable::new(2, vec![0, 1, 1]).unwrap();
        assert!(matches!(
            apply_oracle(&s, "c", "a", &f, Sign::Plus),
            Err(Error::Domain(_))
        ));
        let f = FunctionTable::new(3, vec![0, 1, 1, 0]).unwrap();
        assert!(matches!(
            apply_oracle(&s, "c", "a", &f, Sign::Plus),
            Err(Error::Domain(_))
        ));
        assert!(apply_oracle(&s, "c", "c", &f, Sign::Plus).is_err());
    }

    #[test]
    fn dense_oracle_is_a_permutation_and_matches() {
        let f = random_table(8, 4, 3).unwrap();
        let u = oracle_matrix(&f, Sign::Plus).unwrap();
        for col in 0..32 {
            let nonzero: Vec<C64> = (0..32)
                .map(|r| u[(r, col)])
                .filter(|v| v.norm() > 0.0)
                .collect();
            assert_eq!(nonzero.len(), 1);
            assert!((nonzero[0].norm() - 1.0).abs() < 1e-15);
        }
        let layout = RegisterLayout::new([("c", 8), ("a", 4)]).unwrap();
        let s = random_state_on(&layout, 9);
        let fast = apply_oracle(&s, "c", "a", &f, Sign::Minus).unwrap();
        let v = CMatrix::from_column_slice(32, 1, s.amplitudes());
        let dense = oracle_matrix(&f, Sign::Minus).unwrap() * v;
        for (a, b) in fast.amplitudes().iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn quantize_examples() {
        let rf = RealFunctionTable::new(vec![0.5, 0.3, 0.0, 0.999_999]).unwrap();
        assert_eq!(quantize(&rf, 1).unwrap().values(), &[1, 0, 0, 1]);
        let q3 = quantize(&rf, 3).unwrap();
        assert_eq!(q3.modulus(), 8);
        assert_eq!(q3.values(), &[4, 2, 0, 7]);
        assert!(quantize(&rf, 0).is_err());
    }

    #[test]
    fn quantize_clamps_near_one() {
        let rf = RealFunctionTable::new(vec![1.0 - f64::EPSILON / 2.0]).unwrap();
        for bits in 1..=40 {
            let q = quantize(&rf, bits).unwrap();
            assert_eq!(q.value(0), q.modulus() - 1);
        }
    }

    #[test]
    fn delta_examples() {
        assert_eq!(delta_table(4, 0).unwrap().values(), &[1, 0, 0, 0]);
        assert_eq!(delta_table(4, 2).unwrap().values(), &[0, 0, 1, 0]);
        for n in 1..10 {
            for l in 0..n {
                assert_eq!(delta_table(n, l).unwrap().values().iter().sum::<usize>(), 1);
            }
        }
        assert!(matches!(delta_table(4, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn parse_examples() {
        let t = parse_table("4 2\n0 0\n1 1\n2 1\n3 0\n").unwrap();
        assert_eq!(t.domain_size(), 4);
        assert_eq!(t.modulus(), 2);
        assert_eq!(t.values(), &[0, 1, 1, 0]);

        let err = parse_table("4 2\n0 0\n1 1\n3 0\n").unwrap_err();
        assert!(err.to_string().contains("x=2"), "{err}");

        let err = parse_table("4 2\n0 5\n1 1\n2 1\n3 0\n").unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                message: "value 5 for x=0 is out of range (must be < 2)".into()
            }
        );
    }

    #[test]
    fn parse_comments_order_and_errors() {
        let text = "# balanced\n\n4 2  # header\n3 0\n1 1\n  0 0\n2 1 # last\n";
        assert_eq!(parse_table(text).unwrap().values(), &[0, 1, 1, 0]);
        assert!(matches!(
            parse_table("2 2\n0 0\n0 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(
            parse_table("2 2\n0 0 0\n1 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_table("2 2\n0 a\n1 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_table("2 2\n0 0\n5 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(parse_table(""), Err(Error::Parse { line: 0, .. })));
        assert!(parse_table("2 0\n").is_err());
    }

    #[test]
    fn parse_real_tables() {
        let t = parse_real_table("3 real\n0 0.25\n2 0.5\n1 0\n").unwrap();
        assert_eq!(t.values(), &[0.25, 0.0, 0.5]);
        assert!(parse_real_table("1 real\n0 1.0\n").is_err());
        assert!(parse_table("1 real\n0 0.5\n").is_err());
    }

    proptest! {
        #[test]
        fn exact_table_text_roundtrip(m in 1usize..20, values in proptest::collection::vec(0usize..1000, 1..40)) {
            let t = FunctionTable::new(m, values.into_iter().map(|v| v % m).collect()).unwrap();
            prop_assert_eq!(parse_table(&t.to_text()).unwrap(), t);
        }

        #[test]
        fn real_table_text_roundtrip(values in proptest::collection::vec(0.0f64..1.0, 1..40)) {
            let t = RealFunctionTable::new(values).unwrap();
            prop_assert_eq!(parse_real_table(&t.to_text()).unwrap(), t);
        }

        #[test]
        fn oracle_inverse_roundtrip(n in 1usize..=16, m in 1usize..=16, seed in any::<u64>()) {
            let layout = RegisterLayout::new([("c", n), ("a", m)]).unwrap();
            let s = random_state_on(&layout, seed);
            let f = random_table(n, m, seed ^ 0xabc).unwrap();
            let there = apply_oracle(&s, "c", "a", &f, Sign::Plus).unwrap();
            let back = apply_oracle(&there, "c", "a", &f, Sign::Minus).unwrap();
            prop_assert!(back.max_abs_diff(&s) < 1e-12);
        }
    }
}
