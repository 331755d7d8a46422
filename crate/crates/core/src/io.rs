//! Text formats for every object in the crate.
//!
//! Mathematical objects use a one-line header followed by whitespace-separated
//! values in row-major order:
//!
//! ```text
//! GRIDFN M=<int> L=<int>      then (M+1)^L reals
//! STOCHARR M=<int> L=<int>    then M^L reals
//! RANKMAT M=<int> L=<int>     then M lines of L integers
//! SUBCOP M=<int> L=<int>      then L lines of domain integers, then the values
//! ```
//!
//! Reals are written in shortest round-trip decimal form, so reading back a
//! written file reproduces every value bit for bit. Tabular data (samples,
//! joint distributions, margins, ensembles) is CSV; ECC margin configuration
//! and reports are JSON.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::ecc::{EccReport, EnsembleDataset, MarginId, PredictiveMargin};
use crate::empirical::SampleSet;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::sklar::{DiscreteJointDistribution, StepCdf};
use crate::stochastic::{RankMatrix, StochasticArray};
use crate::subcopula::DiscreteSubcopula;

pub const GRID_MAGIC: &str = "GRIDFN";
pub const ARRAY_MAGIC: &str = "STOCHARR";
pub const RANKS_MAGIC: &str = "RANKMAT";
pub const SUBCOPULA_MAGIC: &str = "SUBCOP";

struct Token<'a> {
    line: usize,
    column: usize,
    text: &'a str,
}

impl Token<'_> {
    fn parse<T: std::str::FromStr>(&self, what: &str) -> Result<T> {
        self.text
            .parse()
            .map_err(|_| Error::parse(self.line, Some(self.column), format!("expected {what}, found {:?}", self.text)))
    }

    fn real(&self) -> Result<f64> {
        let v: f64 = self.parse("a real number")?;
        if !v.is_finite() {
            return Err(Error::parse(self.line, Some(self.column), format!("non-finite value {:?}", self.text)));
        }
        Ok(v)
    }
}

fn line_tokens(line_no: usize, line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push(Token {
                    line: line_no,
                    column: line[..s].chars().count() + 1,
                    text: &line[s..i],
                });
                start = None;
            }
            _ => {}
        }
    }
    out
}

/// Header `MAGIC M=<int> L=<int>`; returns `(M, L)` and the token lines after it.
fn parse_header<'a>(text: &'a str, magic: &str) -> Result<(usize, usize, Vec<Vec<Token<'a>>>)> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| line_tokens(i + 1, l))
        .filter(|t| !t.is_empty());
    let header = lines.next().ok_or_else(|| Error::parse(1, None, format!("missing {magic} header")))?;
    let line = header[0].line;
    if header.len() != 3 || header[0].text != magic {
        return Err(Error::parse(line, Some(1), format!("expected header `{magic} M=<int> L=<int>`")));
    }
    let field = |tok: &Token, key: &str| -> Result<usize> {
        let rest = tok
            .text
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| Error::parse(tok.line, Some(tok.column), format!("expected {key}=<int>")))?;
        let v: usize = rest
            .parse()
            .map_err(|_| Error::parse(tok.line, Some(tok.column), format!("expected {key}=<int>")))?;
        if v == 0 {
            return Err(Error::parse(tok.line, Some(tok.column), format!("{key} must be positive")));
        }
        Ok(v)
    };
    let m = field(&header[1], "M")?;
    let l = field(&header[2], "L")?;
    Ok((m, l, lines.collect()))
}

fn expect_count(tokens: &[Token], expected: usize, after_line: usize) -> Result<()> {
    if tokens.len() < expected {
        let line = tokens.last().map_or(after_line, |t| t.line);
        return Err(Error::parse(line, None, format!("expected {expected} values, found {}", tokens.len())));
    }
    if tokens.len() > expected {
        let t = &tokens[expected];
        return Err(Error::parse(t.line, Some(t.column), format!("expected {expected} values, found {}", tokens.len())));
    }
    Ok(())
}

fn write_rows(out: &mut String, values: &[f64], row_len: usize) {
    for row in values.chunks(row_len.max(1)) {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

pub fn write_grid(grid: &GridFunction) -> String {
    let mut out = format!("{GRID_MAGIC} M={} L={}\n", grid.resolution(), grid.dim());
    write_rows(&mut out, grid.values(), grid.resolution() + 1);
    out
}

pub fn parse_grid(text: &str) -> Result<GridFunction> {
    let (m, l, lines) = parse_header(text, GRID_MAGIC)?;
    let tokens: Vec<Token> = lines.into_iter().flatten().collect();
    let expected = crate::lattice::dense_len(m + 1, l)?;
    expect_count(&tokens, expected, 1)?;
    let values = tokens.iter().map(Token::real).collect::<Result<Vec<_>>>()?;
    GridFunction::new(m, l, values)
}

pub fn write_array(array: &StochasticArray) -> String {
    let mut out = format!("{ARRAY_MAGIC} M={} L={}\n", array.resolution(), array.dim());
    write_rows(&mut out, array.entries(), array.resolution());
    out
}

pub fn parse_array(text: &str) -> Result<StochasticArray> {
    let (m, l, lines) = parse_header(text, ARRAY_MAGIC)?;
    let tokens: Vec<Token> = lines.into_iter().flatten().collect();
    let expected = crate::lattice::dense_len(m, l)?;
    expect_count(&tokens, expected, 1)?;
    let values = tokens.iter().map(Token::real).collect::<Result<Vec<_>>>()?;
    StochasticArray::new(m, l, values)
}

pub fn write_rank_matrix(ranks: &RankMatrix) -> String {
    let mut out = format!("{RANKS_MAGIC} M={} L={}\n", ranks.members(), ranks.dim());
    for row in ranks.rows() {
        let line: Vec<String> = row.iter().map(|r| r.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_rank_matrix(text: &str) -> Result<RankMatrix> {
    let (m, l, lines) = parse_header(text, RANKS_MAGIC)?;
    if lines.len() != m {
        let line = lines.last().map_or(1, |t| t[0].line);
        return Err(Error::parse(line, None, format!("expected {m} rows, found {}", lines.len())));
    }
    let mut ranks = Vec::with_capacity(m * l);
    for row in &lines {
        expect_count(row, l, row[0].line)?;
        for t in row {
            ranks.push(t.parse::<usize>("a rank")?);
        }
    }
    RankMatrix::new(m, l, ranks)
}

pub fn write_subcopula(sub: &DiscreteSubcopula) -> String {
    let mut out = format!("{SUBCOPULA_MAGIC} M={} L={}\n", sub.resolution(), sub.dim());
    for d in sub.domains() {
        let line: Vec<String> = d.iter().map(|k| k.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    write_rows(&mut out, sub.values(), sub.domains().last().map_or(1, Vec::len));
    out
}

pub fn parse_subcopula(text: &str) -> Result<DiscreteSubcopula> {
    let (m, l, lines) = parse_header(text, SUBCOPULA_MAGIC)?;
    if lines.len() < l {
        return Err(Error::parse(1, None, format!("expected {l} domain lines")));
    }
    let mut domains = Vec::with_capacity(l);
    for row in &lines[..l] {
        domains.push(row.iter().map(|t| t.parse::<usize>("a domain point")).collect::<Result<Vec<_>>>()?);
    }
    let tokens: Vec<&Token> = lines[l..].iter().flatten().collect();
    let expected: usize = domains.iter().map(Vec::len).product();
    if tokens.len() != expected {
        let line = tokens.last().map_or(lines[l - 1][0].line, |t| t.line);
        return Err(Error::parse(line, None, format!("expected {expected} values, found {}", tokens.len())));
    }
    let values = tokens.iter().map(|t| t.real()).collect::<Result<Vec<_>>>()?;
    DiscreteSubcopula::new(m, domains, values)
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(1, |p| p.line() as usize);
    Error::parse(line, None, e.to_string())
}

fn csv_headers(reader: &mut csv::Reader<&[u8]>) -> Result<Vec<String>> {
    Ok(reader.headers().map_err(csv_error)?.iter().map(str::to_string).collect())
}

fn record_line(record: &csv::StringRecord) -> usize {
    record.position().map_or(0, |p| p.line() as usize)
}

fn field_real(record: &csv::StringRecord, column: usize) -> Result<f64> {
    let line = record_line(record);
    let raw = record.get(column).unwrap_or("");
    let v: f64 = raw
        .parse()
        .map_err(|_| Error::parse(line, Some(column + 1), format!("expected a real number, found {raw:?}")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, Some(column + 1), format!("non-finite value {raw:?}")));
    }
    Ok(v)
}

fn field_index(record: &csv::StringRecord, column: usize, what: &str) -> Result<usize> {
    let raw = record.get(column).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::parse(record_line(record), Some(column + 1), format!("expected {what}, found {raw:?}")))
}

fn check_header(found: &[String], expected: &[String]) -> Result<()> {
    if found != expected {
        return Err(Error::parse(1, None, format!("expected header `{}`, found `{}`", expected.join(","), found.join(","))));
    }
    Ok(())
}

/// Sample CSV: header `m,dim1,...,dimL`, one row per sample point, with `m`
/// running over `1..=M` in any order.
pub fn parse_samples_csv(text: &str) -> Result<SampleSet> {
    let mut reader = csv_reader(text);
    let headers = csv_headers(&mut reader)?;
    let dim = headers.len().saturating_sub(1);
    let expected: Vec<String> = std::iter::once("m".to_string()).chain((1..=dim).map(|d| format!("dim{d}"))).collect();
    if dim == 0 {
        return Err(Error::parse(1, None, "expected header `m,dim1,...,dimL`"));
    }
    check_header(&headers, &expected)?;
    let mut rows: Vec<(usize, usize, Vec<f64>)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let m = field_index(&record, 0, "a member index")?;
        let point = (1..=dim).map(|c| field_real(&record, c)).collect::<Result<Vec<_>>>()?;
        rows.push((m, record_line(&record), point));
    }
    rows.sort_by_key(|r| r.0);
    for (k, (m, line, _)) in rows.iter().enumerate() {
        if *m != k + 1 {
            return Err(Error::parse(*line, Some(1), format!("member indices must be 1..={} without gaps or repeats", rows.len())));
        }
    }
    let points: Vec<Vec<f64>> = rows.into_iter().map(|r| r.2).collect();
    SampleSet::from_rows(&points)
}

pub fn write_samples_csv(sample: &SampleSet) -> String {
    let mut out = String::from("m");
    for d in 1..=sample.dim() {
        write!(out, ",dim{d}").unwrap();
    }
    out.push('\n');
    for (m, row) in sample.rows().enumerate() {
        write!(out, "{}", m + 1).unwrap();
        for v in row {
            write!(out, ",{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Joint distribution CSV: header `x1,...,xL,mass`.
pub fn parse_joint_csv(text: &str, resolution: usize) -> Result<DiscreteJointDistribution> {
    let mut reader = csv_reader(text);
    let headers = csv_headers(&mut reader)?;
    let dim = headers.len().saturating_sub(1);
    if dim == 0 {
        return Err(Error::parse(1, None, "expected header `x1,...,xL,mass`"));
    }
    let expected: Vec<String> = (1..=dim).map(|d| format!("x{d}")).chain(std::iter::once("mass".into())).collect();
    check_header(&headers, &expected)?;
    let mut points = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let x = (0..dim).map(|c| field_real(&record, c)).collect::<Result<Vec<_>>>()?;
        let mass = field_real(&record, dim)?;
        points.push((x, mass));
    }
    DiscreteJointDistribution::from_points(resolution, &points)
}

/// Positive-mass atoms in row-major order.
pub fn write_joint_csv(joint: &DiscreteJointDistribution) -> String {
    let mut out: String = (1..=joint.dim()).map(|d| format!("x{d},")).collect();
    out.push_str("mass\n");
    let m = joint.resolution() as f64;
    for (point, count) in joint.atoms() {
        for x in point {
            write!(out, "{x},").unwrap();
        }
        writeln!(out, "{}", count as f64 / m).unwrap();
    }
    out
}

/// Margin CSV: header `value,level`, with levels as probabilities that are
/// multiples of `1/M`.
pub fn parse_margin_csv(text: &str, resolution: usize) -> Result<StepCdf> {
    let mut reader = csv_reader(text);
    let headers = csv_headers(&mut reader)?;
    check_header(&headers, &["value".to_string(), "level".to_string()])?;
    let mut support = Vec::new();
    let mut levels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        support.push(field_real(&record, 0)?);
        levels.push(field_real(&record, 1)?);
    }
    StepCdf::from_probabilities(resolution, support, &levels)
}

pub fn write_margin_csv(margin: &StepCdf) -> String {
    let mut out = String::from("value,level\n");
    let m = margin.resolution() as f64;
    for (x, &k) in margin.support().iter().zip(margin.levels()) {
        writeln!(out, "{x},{}", k as f64 / m).unwrap();
    }
    out
}

pub const ENSEMBLE_COLUMNS: [&str; 4] = ["variable", "location", "lead_time", "member"];

/// Ensemble CSV with columns `variable,location,lead_time,member` and a value
/// column named `value_column` (extra columns are ignored). Margins are
/// ordered by first appearance; every margin must have members `1..=M`
/// exactly once.
pub fn parse_ensemble_csv(text: &str, value_column: &str) -> Result<EnsembleDataset> {
    let mut reader = csv_reader(text);
    let headers = csv_headers(&mut reader)?;
    let mut missing = Vec::new();
    let mut positions = Vec::with_capacity(5);
    for name in ENSEMBLE_COLUMNS.iter().copied().chain(std::iter::once(value_column)) {
        match headers.iter().position(|h| h == name) {
            Some(c) => positions.push(c),
            None => missing.push(name),
        }
    }
    if !missing.is_empty() {
        return Err(Error::parse(1, None, format!("missing column(s) {}", missing.join(", "))));
    }
    let [var_c, loc_c, lead_c, mem_c, val_c] = positions[..] else {
        unreachable!("five columns located")
    };

    let mut order: Vec<MarginId> = Vec::new();
    let mut index: HashMap<MarginId, usize> = HashMap::new();
    let mut cells: Vec<HashMap<usize, f64>> = Vec::new();
    let mut first_line: Vec<usize> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record_line(&record);
        let get = |c: usize| record.get(c).unwrap_or("").to_string();
        let id = MarginId::new(get(var_c), get(loc_c), get(lead_c));
        let member = field_index(&record, mem_c, "a member number")?;
        if member == 0 {
            return Err(Error::parse(line, Some(mem_c + 1), "members are numbered from 1"));
        }
        let value = field_real(&record, val_c)?;
        let slot = *index.entry(id.clone()).or_insert_with(|| {
            order.push(id.clone());
            cells.push(HashMap::new());
            first_line.push(line);
            order.len() - 1
        });
        if cells[slot].insert(member, value).is_some() {
            return Err(Error::parse(line, None, format!("duplicate cell for margin {id}, member {member}")));
        }
    }
    if order.is_empty() {
        return Err(Error::parse(1, None, "no data rows"));
    }
    let members = cells.iter().flat_map(|c| c.keys()).copied().max().unwrap_or(0);
    let mut columns = Vec::with_capacity(order.len());
    for (slot, id) in order.iter().enumerate() {
        let col = (1..=members)
            .map(|m| {
                cells[slot].get(&m).copied().ok_or_else(|| {
                    Error::parse(first_line[slot], None, format!("margin {id} is missing member {m} of {members}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        columns.push(col);
    }
    EnsembleDataset::new(order, columns)
}

/// One row per (margin, member), margin-major, with the raw value and the
/// ECC value side by side.
pub fn write_ecc_csv(raw: &EnsembleDataset, ecc: &EnsembleDataset) -> Result<String> {
    if raw.dim() != ecc.dim() || raw.members() != ecc.members() {
        return Err(Error::Shape {
            expected: raw.dim() * raw.members(),
            found: ecc.dim() * ecc.members(),
        });
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut write = || -> std::result::Result<(), csv::Error> {
        w.write_record(["variable", "location", "lead_time", "member", "value", "ecc_value"])?;
        for (l, id) in raw.margins().iter().enumerate() {
            for m in 0..raw.members() {
                w.write_record([
                    id.variable.as_str(),
                    id.location.as_str(),
                    id.lead_time.as_str(),
                    &(m + 1).to_string(),
                    &raw.value(m, l).to_string(),
                    &ecc.value(m, l).to_string(),
                ])?;
            }
        }
        Ok(())
    };
    write().map_err(|e| Error::Io(std::io::Error::other(e)))?;
    let bytes = w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("utf-8"))
}

/// Raw ensemble CSV without an ECC column.
pub fn write_ensemble_csv(data: &EnsembleDataset) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["variable", "location", "lead_time", "member", "value"]).unwrap();
    for (l, id) in data.margins().iter().enumerate() {
        for m in 0..data.members() {
            w.write_record([
                id.variable.as_str(),
                id.location.as_str(),
                id.lead_time.as_str(),
                &(m + 1).to_string(),
                &data.value(m, l).to_string(),
            ])
            .unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).expect("utf-8")
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum DistSpec {
    Gaussian { mean: f64, sd: f64 },
    Empirical { samples: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarginSpec {
    variable: String,
    location: String,
    lead_time: String,
    dist: DistSpec,
}

/// Margins JSON: an array of
/// `{variable, location, lead_time, dist: {"type": "gaussian", mean, sd} | {"type": "empirical", samples}}`.
pub fn parse_margins_json(text: &str) -> Result<Vec<(MarginId, PredictiveMargin)>> {
    let specs: Vec<MarginSpec> =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), Some(e.column()), e.to_string()))?;
    specs
        .into_iter()
        .map(|s| {
            let id = MarginId::new(s.variable, s.location, s.lead_time);
            let margin = match s.dist {
                DistSpec::Gaussian { mean, sd } => PredictiveMargin::gaussian(mean, sd),
                DistSpec::Empirical { samples } => PredictiveMargin::empirical(samples),
            }?;
            Ok((id, margin))
        })
        .collect()
}

/// Orders configured margins to match the dataset; every dataset margin must
/// be configured exactly once and nothing else may be.
pub fn align_margins(data: &EnsembleDataset, configured: Vec<(MarginId, PredictiveMargin)>) -> Result<Vec<PredictiveMargin>> {
    let mut by_id: HashMap<MarginId, PredictiveMargin> = HashMap::new();
    for (id, m) in configured {
        if data.margin_index(&id).is_none() {
            return Err(Error::MarginMismatch(format!("{id} is configured but not in the ensemble")));
        }
        if by_id.insert(id.clone(), m).is_some() {
            return Err(Error::MarginMismatch(format!("{id} is configured twice")));
        }
    }
    data.margins()
        .iter()
        .map(|id| by_id.remove(id).ok_or_else(|| Error::MarginMismatch(format!("{id} has no configured margin"))))
        .collect()
}

pub fn write_report_json(report: &EccReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable");
    s.push('\n');
    s
}

/// Scatter CSV `member,x,y,rank_x,rank_y` for two margins.
pub fn write_scatter_csv(x: &[f64], y: &[f64], ranks: &RankMatrix) -> String {
    let mut out = String::from("member,x,y,rank_x,rank_y\n");
    for m in 0..x.len() {
        writeln!(out, "{},{},{},{},{}", m + 1, x[m], y[m], ranks.rank(m, 0), ranks.rank(m, 1)).unwrap();
    }
    out
}

/// Copula grid CSV `i,j,u,v,copula` over all `(M+1)^2` points of a bivariate
/// copula.
pub fn write_copula_grid_csv(copula: &GridFunction) -> String {
    let m = copula.resolution();
    let mut out = String::from("i,j,u,v,copula\n");
    for i in 0..=m {
        for j in 0..=m {
            writeln!(out, "{i},{j},{},{},{}", i as f64 / m as f64, j as f64 / m as f64, copula.at(&[i, j])).unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{min_copula, product_copula};

    #[test]
    fn grid_text_layout() {
        let text = write_grid(&product_copula(2, 2).unwrap());
        assert_eq!(text, "GRIDFN M=2 L=2\n0 0 0\n0 0.25 0.5\n0 0.5 1\n");
        assert_eq!(parse_grid(&text).unwrap(), product_copula(2, 2).unwrap());
    }

    #[test]
    fn grid_parse_errors_have_locations() {
        let err = parse_grid("GRIDFN M=1 L=2\n0 0\n0 x\n").unwrap_err();
        match err {
            Error::Parse { location, .. } => {
                assert_eq!(location.line, 3);
                assert_eq!(location.column, Some(3));
            }
            e => panic!("unexpected {e}"),
        }
        assert!(matches!(parse_grid("GRIDFN M=1 L=2\n0 0 0\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_grid("GRID M=1 L=2\n0 0 0 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_grid("GRIDFN M=1 L=2\n0 0 0 inf\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_grid("GRIDFN M=1 L=2\n0 0 0 1 1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn subcopula_text() {
        let s = crate::subcopula::restrict(&min_copula(4, 2).unwrap(), &[vec![0, 2, 4], vec![0, 4]]).unwrap();
        let text = write_subcopula(&s);
        assert_eq!(text, "SUBCOP M=4 L=2\n0 2 4\n0 4\n0 0\n0 0.5\n0 1\n");
        assert_eq!(parse_subcopula(&text).unwrap(), s);
    }

    #[test]
    fn rank_matrix_text() {
        let r = RankMatrix::from_rows(&[vec![1, 2], vec![2, 1]]).unwrap();
        let text = write_rank_matrix(&r);
        assert_eq!(text, "RANKMAT M=2 L=2\n1 2\n2 1\n");
        assert_eq!(parse_rank_matrix(&text).unwrap(), r);
        assert!(matches!(parse_rank_matrix("RANKMAT M=2 L=2\n1 2\n1 1\n"), Err(Error::NotPermutation { .. })));
    }

    #[test]
    fn ensemble_csv_rejects_bad_tables() {
        let header = "variable,location,lead_time,member,value\n";
        let ok = format!("{header}t,a,24,1,1.5\nt,a,24,2,0.5\n");
        assert_eq!(parse_ensemble_csv(&ok, "value").unwrap().members(), 2);

        let missing = format!("{header}t,a,24,1,1.5\nt,a,24,2,0.5\nt,b,24,1,3\n");
        assert!(matches!(parse_ensemble_csv(&missing, "value"), Err(Error::Parse { .. })));

        let dup = format!("{header}t,a,24,1,1.5\nt,a,24,1,0.5\n");
        match parse_ensemble_csv(&dup, "value").unwrap_err() {
            Error::Parse { location, .. } => assert_eq!(location.line, 3),
            e => panic!("unexpected {e}"),
        }

        let nan = format!("{header}t,a,24,1,NaN\n");
        match parse_ensemble_csv(&nan, "value").unwrap_err() {
            Error::Parse { location, .. } => assert_eq!((location.line, location.column), (2, Some(5))),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn margins_json() {
        let text = r#"[
            {"variable": "t", "location": "a", "lead_time": "24", "dist": {"type": "gaussian", "mean": 1.0, "sd": 2.0}},
            {"variable": "t", "location": "b", "lead_time": "24", "dist": {"type": "empirical", "samples": [3, 1, 2]}}
        ]"#;
        let parsed = parse_margins_json(text).unwrap();
        assert_eq!(parsed[0].1, PredictiveMargin::Gaussian { mean: 1.0, sd: 2.0 });
        assert_eq!(parsed[1].1, PredictiveMargin::Empirical { samples: vec![1.0, 2.0, 3.0] });

        let bad = r#"[{"variable": "t", "location": "a", "lead_time": "24", "dist": {"type": "gaussian", "mean": 1.0, "sd": 0}}]"#;
        assert!(matches!(parse_margins_json(bad), Err(Error::DegenerateMargin(_))));
        assert!(matches!(parse_margins_json("[{"), Err(Error::Parse { .. })));
    }

    #[test]
    fn align_requires_exact_cover() {
        let data = EnsembleDataset::new(
            vec![MarginId::new("t", "a", "24"), MarginId::new("t", "b", "24")],
            vec![vec![1.0], vec![2.0]],
        )
        .unwrap();
        let g = PredictiveMargin::gaussian(0.0, 1.0).unwrap();
        let only_a = vec![(MarginId::new("t", "a", "24"), g.clone())];
        assert!(matches!(align_margins(&data, only_a), Err(Error::MarginMismatch(_))));
        let both = vec![(MarginId::new("t", "b", "24"), g.clone()), (MarginId::new("t", "a", "24"), g)];
        assert_eq!(align_margins(&data, both).unwrap().len(), 2);
    }

    #[test]
    fn joint_and_margin_csv() {
        let j = parse_joint_csv("x1,x2,mass\n0,0,0.5\n1,1,0.5\n", 4).unwrap();
        assert_eq!(write_joint_csv(&j), "x1,x2,mass\n0,0,0.5\n1,1,0.5\n");
        let f = parse_margin_csv("value,level\n0,0.5\n1,1\n", 4).unwrap();
        assert_eq!(write_margin_csv(&f), "value,level\n0,0.5\n1,1\n");
        assert!(parse_margin_csv("value,lvl\n0,1\n", 4).is_err());
    }

    #[test]
    fn samples_csv() {
        let s = parse_samples_csv("m,dim1,dim2\n2,2.0,1.5\n1,1.0,2.5\n").unwrap();
        assert_eq!(s.row(0), &[1.0, 2.5]);
        assert_eq!(write_samples_csv(&s), "m,dim1,dim2\n1,1,2.5\n2,2,1.5\n");
        assert!(parse_samples_csv("m,dim1\n1,1\n3,2\n").is_err());
    }
}
