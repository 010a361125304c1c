//! Line-oriented circuit text format.
//!
//! ```text
//! # comment
//! lines 3
//! gate Ul 1 2 file cnot.json
//! gate Ua 2 3 inline 0.7,0 0,0 ...      (16 re,im pairs, row-major)
//! gate V  3   inline 1,0 0,0 0,0 1,0    (4 pairs)
//! ```
//!
//! Line indices are 1-based; matrix files are resolved relative to the
//! directory of the circuit file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{Circuit, GateInstance, GateOp};
use crate::error::Error;
use crate::io::{parse_matrix_file, read_to_string, AnyMatrix, FormatError};
use crate::matrix::{c64, Mat, Tolerance};

struct LineCtx<'a> {
    path: &'a Path,
    line: usize,
}

impl LineCtx<'_> {
    fn parse(&self, message: impl Into<String>) -> FormatError {
        FormatError::Parse {
            path: self.path.to_path_buf(),
            line: self.line,
            message: message.into(),
        }
    }

    fn line_index(&self, message: impl Into<String>) -> FormatError {
        FormatError::LineIndex {
            path: self.path.to_path_buf(),
            line: self.line,
            message: message.into(),
        }
    }
}

fn parse_entry(token: &str, ctx: &LineCtx) -> Result<num_complex::Complex64, FormatError> {
    let (re, im) = token
        .split_once(',')
        .ok_or_else(|| ctx.parse(format!("expected `re,im`, found `{token}`")))?;
    let num = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| ctx.parse(format!("invalid number `{s}` in `{token}`")))
    };
    Ok(c64(num(re)?, num(im)?))
}

fn parse_line_index(token: &str, num_lines: usize, ctx: &LineCtx) -> Result<usize, FormatError> {
    let one_based: usize = token
        .parse()
        .map_err(|_| ctx.parse(format!("invalid line index `{token}`")))?;
    if one_based == 0 || one_based > num_lines {
        return Err(ctx.line_index(format!("line {one_based} is outside 1..={num_lines}")));
    }
    Ok(one_based - 1)
}

/// Parses circuit text; `path` locates referenced matrix files and labels
/// error messages.
pub fn parse_circuit_str(text: &str, path: &Path, tol: &Tolerance) -> Result<Circuit, FormatError> {
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut circuit: Option<Circuit> = None;

    for (idx, raw) in text.lines().enumerate() {
        let ctx = LineCtx {
            path,
            line: idx + 1,
        };
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        match tokens[0] {
            "lines" => {
                if circuit.is_some() {
                    return Err(ctx.parse("duplicate `lines` directive"));
                }
                let [_, n] = tokens[..] else {
                    return Err(ctx.parse("expected `lines <n>`"));
                };
                let n: usize = n
                    .parse()
                    .map_err(|_| ctx.parse(format!("invalid line count `{n}`")))?;
                circuit = Some(Circuit::new(n).map_err(|e| ctx.parse(e.to_string()))?);
            }
            "gate" => {
                let c = circuit
                    .as_mut()
                    .ok_or_else(|| ctx.parse("`gate` before `lines`"))?;
                let gate = parse_gate(&tokens, c.num_lines(), &base, &ctx)?;
                c.push(gate, tol).map_err(|e| match e {
                    Error::DuplicateLine(_) | Error::LineOutOfRange { .. } => {
                        ctx.line_index(e.to_string())
                    }
                    other => ctx.parse(other.to_string()),
                })?;
            }
            other => return Err(ctx.parse(format!("unknown directive `{other}`"))),
        }
    }
    circuit.ok_or_else(|| FormatError::Parse {
        path: path.to_path_buf(),
        line: text.lines().count(),
        message: "missing `lines <n>` directive".into(),
    })
}

fn parse_gate(
    tokens: &[&str],
    num_lines: usize,
    base: &Path,
    ctx: &LineCtx,
) -> Result<GateInstance, FormatError> {
    if tokens.len() < 4 {
        return Err(ctx.parse("expected `gate <label> <line> [<line2>] inline|file ...`"));
    }
    let label = tokens[1];
    let mut lines = vec![parse_line_index(tokens[2], num_lines, ctx)?];
    let mut pos = 3;
    if !matches!(tokens[3], "inline" | "file") {
        lines.push(parse_line_index(tokens[3], num_lines, ctx)?);
        pos = 4;
    }
    if lines.len() == 2 && lines[0] == lines[1] {
        return Err(ctx.line_index(format!("gate `{label}` uses line {} twice", lines[0] + 1)));
    }
    let source = *tokens
        .get(pos)
        .ok_or_else(|| ctx.parse("expected `inline` or `file`"))?;
    let dim = 1usize << lines.len();

    let matrix = match source {
        "inline" => {
            let entries = tokens[pos + 1..]
                .iter()
                .map(|t| parse_entry(t, ctx))
                .collect::<Result<Vec<_>, _>>()?;
            if entries.len() != dim * dim {
                return Err(FormatError::Dimension {
                    path: ctx.path.to_path_buf(),
                    message: format!(
                        "line {}: gate `{label}` on {} line(s) needs {} entries, found {}",
                        ctx.line,
                        lines.len(),
                        dim * dim,
                        entries.len()
                    ),
                });
            }
            if dim == 2 {
                AnyMatrix::Two(Mat::from_row_major(&entries).expect("length checked"))
            } else {
                AnyMatrix::Four(Mat::from_row_major(&entries).expect("length checked"))
            }
        }
        "file" => {
            let rel = tokens[pos + 1..].join(" ");
            if rel.is_empty() {
                return Err(ctx.parse("expected a path after `file`"));
            }
            let m = parse_matrix_file(base.join(&rel))?;
            if m.dim() != dim {
                return Err(FormatError::Dimension {
                    path: ctx.path.to_path_buf(),
                    message: format!(
                        "line {}: gate `{label}` on {} line(s) needs a {dim}x{dim} matrix, `{rel}` is {}x{}",
                        ctx.line,
                        lines.len(),
                        m.dim(),
                        m.dim()
                    ),
                });
            }
            m
        }
        other => return Err(ctx.parse(format!("expected `inline` or `file`, found `{other}`"))),
    };

    Ok(match matrix {
        AnyMatrix::Two(m) => GateInstance::single(label, lines[0], m),
        AnyMatrix::Four(m) => GateInstance::pair(label, [lines[0], lines[1]], m),
    })
}

pub fn parse_circuit_file(path: impl AsRef<Path>, tol: &Tolerance) -> Result<Circuit, FormatError> {
    let path = path.as_ref();
    parse_circuit_str(&read_to_string(path)?, path, tol)
}

/// Shortest decimal that parses back to the same `f64`, switching to
/// exponent notation for very small or large magnitudes.
fn real(x: f64) -> String {
    serde_json::to_string(&x).expect("gate entries are finite")
}

/// Renders a circuit with every matrix inline. The global phase accumulator
/// has no directive in the format and is written as a comment.
pub fn circuit_to_text(c: &Circuit) -> String {
    let mut out = String::new();
    writeln!(out, "lines {}", c.num_lines()).unwrap();
    if c.global_phase != 0.0 {
        writeln!(out, "# global phase {}", real(c.global_phase)).unwrap();
    }
    for g in c.gates() {
        let (lines, entries) = match &g.op {
            GateOp::Single { line, matrix } => (format!("{}", line + 1), matrix.to_row_major()),
            GateOp::Pair { lines, matrix } => (
                format!("{} {}", lines[0] + 1, lines[1] + 1),
                matrix.to_row_major(),
            ),
        };
        let entries: Vec<String> = entries
            .iter()
            .map(|z| format!("{},{}", real(z.re), real(z.im)))
            .collect();
        writeln!(
            out,
            "gate {} {} inline {}",
            g.label,
            lines,
            entries.join(" ")
        )
        .unwrap();
    }
    out
}

pub fn write_circuit_file(path: impl AsRef<Path>, c: &Circuit) -> Result<(), FormatError> {
    let path = path.as_ref();
    std::fs::write(path, circuit_to_text(c)).map_err(|source| FormatError::Io {
        path: PathBuf::from(path),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_matrix_file;
    use crate::single_qubit::NamedGate;
    use crate::two_qubit::cnot;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn parse(text: &str) -> Result<Circuit, FormatError> {
        parse_circuit_str(text, Path::new("mem.txt"), &tol())
    }

    const X_INLINE: &str = "0,0 1,0 1,0 0,0";

    #[test]
    fn empty_one_line_circuit() {
        let c = parse("# nothing here\nlines 1\n\n").unwrap();
        assert_eq!(c.num_lines(), 1);
        assert!(c.gates().is_empty());
    }

    #[test]
    fn inline_gates_and_comments() {
        let c = parse(&format!("lines 2\ngate x 2 inline {X_INLINE} # trailing\n")).unwrap();
        assert_eq!(
            c.gates()[0].op,
            GateOp::Single {
                line: 1,
                matrix: NamedGate::X.matrix()
            }
        );
    }

    #[test]
    fn duplicate_and_out_of_range_lines() {
        let sixteen = vec!["1,0"; 16].join(" ");
        let err = parse(&format!("lines 2\ngate g 2 2 inline {sixteen}")).unwrap_err();
        assert!(
            matches!(err, FormatError::LineIndex { line: 2, .. }),
            "{err}"
        );
        let err = parse(&format!("lines 2\ngate x 3 inline {X_INLINE}")).unwrap_err();
        assert!(matches!(err, FormatError::LineIndex { .. }), "{err}");
        let err = parse(&format!("lines 2\ngate x 0 inline {X_INLINE}")).unwrap_err();
        assert!(matches!(err, FormatError::LineIndex { .. }), "{err}");
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            parse("gate x 1 inline 1,0"),
            Err(FormatError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse("lines 1\nfoo"),
            Err(FormatError::Parse { line: 2, .. })
        ));
        assert!(matches!(parse(""), Err(FormatError::Parse { .. })));
        assert!(matches!(
            parse("lines 1\ngate x 1 inline 1;0 0,0 0,0 1,0"),
            Err(FormatError::Parse { .. })
        ));
        assert!(matches!(
            parse("lines 1\ngate x 1 inline 1,0 0,0"),
            Err(FormatError::Dimension { .. })
        ));
        assert!(matches!(
            parse("lines 1\ngate x 1 inline 1,0 0,0 0,0 2,0"),
            Err(FormatError::Parse { .. })
        ));
    }

    #[test]
    fn file_references_resolve_against_circuit_directory() {
        let dir = tempfile::tempdir().unwrap();
        write_matrix_file(dir.path().join("cx.json"), &cnot()).unwrap();
        let path = dir.path().join("c.txt");
        std::fs::write(&path, "lines 2\ngate cx 1 2 file cx.json\n").unwrap();
        let c = parse_circuit_file(&path, &tol()).unwrap();
        assert_eq!(
            c.gates()[0].op,
            GateOp::Pair {
                lines: [0, 1],
                matrix: cnot()
            }
        );

        std::fs::write(&path, "lines 2\ngate cx 1 file cx.json\n").unwrap();
        assert!(matches!(
            parse_circuit_file(&path, &tol()),
            Err(FormatError::Dimension { .. })
        ));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let h = NamedGate::H.matrix();
        let c = Circuit::with_gates(
            3,
            [
                GateInstance::pair("cx'", [2, 0], cnot()),
                GateInstance::single("h_1", 1, h),
            ],
            &tol(),
        )
        .unwrap();
        assert_eq!(parse(&circuit_to_text(&c)).unwrap(), c);
    }
}
