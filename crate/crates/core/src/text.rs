//! Matrix and block-operator text files.
//!
//! Matrix file: a header line `rows cols`, then `rows` lines of `cols`
//! whitespace-separated reals, optionally followed by a line `imag` and
//! another `rows` lines holding imaginary parts. Lines whose first
//! non-blank character is `#` are comments; blank lines are ignored.
//!
//! Block file: matrix sections separated by lines consisting of `---`. A
//! comment of the form `# name: <label>` inside a section labels the block.

use std::fmt::Write as _;

use thiserror::Error;

use crate::blocks::BlockOperator;
use crate::error::Error;
use crate::linalg::{HermitianMatrix, RectMatrix};

/// Syntax error in a text input, located by byte offset and 1-based line.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, byte offset {offset}: {message}")]
pub struct TextError {
    pub offset: usize,
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Syntax(#[from] TextError),
    #[error("invalid matrix: {0}")]
    Matrix(#[from] Error),
}

/// Parsed matrix file, before any structural interpretation.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixText {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Option<Vec<f64>>,
}

impl MatrixText {
    pub fn into_hermitian(self) -> Result<HermitianMatrix, Error> {
        if self.rows != self.cols {
            return Err(Error::InvalidArgument(format!(
                "expected a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        HermitianMatrix::new(self.rows, self.re, self.im)
    }

    pub fn into_rect(self) -> Result<RectMatrix, Error> {
        if self.im.is_some() {
            return Err(Error::InvalidArgument("rectangular matrices must be real".into()));
        }
        RectMatrix::new(self.rows, self.cols, self.re)
    }
}

struct Line<'a> {
    text: &'a str,
    offset: usize,
    number: usize,
}

impl Line<'_> {
    fn error(&self, message: impl Into<String>) -> TextError {
        TextError {
            offset: self.offset,
            line: self.number,
            message: message.into(),
        }
    }
}

/// Non-blank lines with offsets, starting at `base` bytes / line `first_line`.
fn lines_with_offsets(src: &str, base: usize, first_line: usize) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    let mut offset = base;
    for (k, raw) in src.split_inclusive('\n').enumerate() {
        let text = raw.trim_end_matches(['\n', '\r']);
        let lead = text.len() - text.trim_start().len();
        if !text.trim().is_empty() {
            out.push(Line {
                text,
                offset: offset + lead,
                number: first_line + k,
            });
        }
        offset += raw.len();
    }
    out
}

fn is_comment(line: &Line<'_>) -> bool {
    line.text.trim_start().starts_with('#')
}

fn parse_reals(line: &Line<'_>, expected: usize) -> Result<Vec<f64>, TextError> {
    let mut out = Vec::with_capacity(expected);
    let base = line.offset - (line.text.len() - line.text.trim_start().len());
    let mut pos = 0;
    for tok in line.text.split_whitespace() {
        let at = line.text[pos..].find(tok).map_or(pos, |p| pos + p);
        pos = at + tok.len();
        let v: f64 = tok.parse().map_err(|_| TextError {
            offset: base + at,
            line: line.number,
            message: format!("invalid number {tok:?}"),
        })?;
        if !v.is_finite() {
            return Err(TextError {
                offset: base + at,
                line: line.number,
                message: format!("non-finite number {tok:?}"),
            });
        }
        out.push(v);
    }
    if out.len() != expected {
        return Err(line.error(format!("expected {expected} values, found {}", out.len())));
    }
    Ok(out)
}

fn parse_section(lines: &[Line<'_>], end: (usize, usize)) -> Result<MatrixText, TextError> {
    let mut it = lines.iter().filter(|l| !is_comment(l));
    let eof = |what: &str| TextError {
        offset: end.0,
        line: end.1,
        message: format!("unexpected end of input, expected {what}"),
    };
    let header = it.next().ok_or_else(|| eof("header `rows cols`"))?;
    let mut dims = header.text.split_whitespace().map(str::parse::<usize>);
    let (rows, cols) = match (dims.next(), dims.next(), dims.next()) {
        (Some(Ok(r)), Some(Ok(c)), None) if r > 0 && c > 0 => (r, c),
        _ => return Err(header.error("header must be two positive integers `rows cols`")),
    };
    let read_block = |it: &mut dyn Iterator<Item = &Line<'_>>| -> Result<Vec<f64>, TextError> {
        let mut vals = Vec::with_capacity(rows * cols);
        for _ in 0..rows {
            let line = it.next().ok_or_else(|| eof("matrix row"))?;
            vals.extend(parse_reals(line, cols)?);
        }
        Ok(vals)
    };
    let re = read_block(&mut it)?;
    let im = match it.next() {
        None => None,
        Some(l) if l.text.trim() == "imag" => Some(read_block(&mut it)?),
        Some(l) => return Err(l.error("unexpected content after matrix rows")),
    };
    if let Some(l) = it.next() {
        return Err(l.error("unexpected content after imaginary rows"));
    }
    Ok(MatrixText { rows, cols, re, im })
}

pub fn parse_matrix_text(src: &str) -> Result<MatrixText, TextError> {
    let lines = lines_with_offsets(src, 0, 1);
    parse_section(&lines, (src.len(), src.lines().count().max(1)))
}

pub fn parse_hermitian(src: &str) -> Result<HermitianMatrix, LoadError> {
    Ok(parse_matrix_text(src)?.into_hermitian()?)
}

pub fn parse_rect(src: &str) -> Result<RectMatrix, LoadError> {
    Ok(parse_matrix_text(src)?.into_rect()?)
}

fn push_rows(out: &mut String, rows: usize, cols: usize, v: &[f64]) {
    for i in 0..rows {
        let row: Vec<String> = v[i * cols..(i + 1) * cols].iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
}

/// Serializes with shortest round-trip decimal formatting.
pub fn write_matrix_text(m: &MatrixText) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", m.rows, m.cols);
    push_rows(&mut out, m.rows, m.cols, &m.re);
    if let Some(im) = &m.im {
        out.push_str("imag\n");
        push_rows(&mut out, m.rows, m.cols, im);
    }
    out
}

pub fn hermitian_to_text(h: &HermitianMatrix) -> String {
    write_matrix_text(&MatrixText {
        rows: h.dim(),
        cols: h.dim(),
        re: h.re().to_vec(),
        im: h.im().map(<[f64]>::to_vec),
    })
}

pub fn rect_to_text(m: &RectMatrix) -> String {
    write_matrix_text(&MatrixText {
        rows: m.rows(),
        cols: m.cols(),
        re: m.data().to_vec(),
        im: None,
    })
}

pub fn parse_blocks(src: &str) -> Result<BlockOperator, LoadError> {
    let all = lines_with_offsets(src, 0, 1);
    let mut sections: Vec<Vec<Line<'_>>> = vec![Vec::new()];
    for line in all {
        if line.text.trim() == "---" {
            sections.push(Vec::new());
        } else {
            sections.last_mut().expect("nonempty").push(line);
        }
    }
    let mut blocks = Vec::new();
    let mut labels = Vec::new();
    let total_lines = src.lines().count().max(1);
    for (k, section) in sections.iter().enumerate() {
        // end-of-section position: start of the next separator, or EOF
        let end = sections
            .get(k + 1)
            .and_then(|s| s.first())
            .map_or((src.len(), total_lines), |l| (l.offset, l.number));
        let label = section.iter().filter(|l| is_comment(l)).find_map(|l| {
            l.text
                .trim_start()
                .trim_start_matches('#')
                .trim()
                .strip_prefix("name:")
                .map(|s| s.trim().to_string())
        });
        let m = parse_section(section, end)?;
        blocks.push(m.into_hermitian()?);
        labels.push(label);
    }
    Ok(BlockOperator::with_labels(blocks, labels)?)
}

pub fn blocks_to_text(b: &BlockOperator) -> String {
    let mut out = String::new();
    for (k, (m, label)) in b.blocks().iter().zip(b.labels()).enumerate() {
        if k > 0 {
            out.push_str("---\n");
        }
        if let Some(l) = label {
            let _ = writeln!(out, "# name: {l}");
        }
        out.push_str(&hermitian_to_text(m));
    }
    out
}
