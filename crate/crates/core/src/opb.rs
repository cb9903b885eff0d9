//! Reader and writer for the OPB text format used by the pseudo-Boolean
//! competitions.
//!
//! Accepted grammar (one statement per line):
//!
//! ```text
//! comment    := '*' any-chars EOL
//! objective  := 'min:' { term } ';'
//! constraint := { term } op integer ';'
//! term       := sign integer variable
//! variable   := 'x' digits | '~x' digits
//! op         := '>=' | '<=' | '>' | '<' | '='
//! ```
//!
//! Every constraint is normalized while reading. Tautologies are dropped and
//! counted in the [`ParseReport`].

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::model::{Literal, ModelError, PboInstance, RawConstraint, RelOp, Var};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Model {
        line: usize,
        #[source]
        source: ModelError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl ParseError {
    /// Line number of the offending statement, if the error came from the text.
    pub fn line(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { line, .. } | ParseError::Model { line, .. } => Some(*line),
            ParseError::Io { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseReport {
    pub num_vars_declared: Option<u32>,
    pub num_constraints_declared: Option<usize>,
    /// Constraint lines read, before normalization.
    pub num_constraints_read: usize,
    pub tautologies_dropped: usize,
    pub warnings: Vec<String>,
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_op(tok: &str) -> Option<RelOp> {
    Some(match tok {
        ">=" => RelOp::Ge,
        "<=" => RelOp::Le,
        ">" => RelOp::Gt,
        "<" => RelOp::Lt,
        "=" => RelOp::Eq,
        _ => return None,
    })
}

fn parse_int(tok: &str, line: usize, what: &str) -> Result<i64, ParseError> {
    let digits = tok.strip_prefix(['+', '-']).unwrap_or(tok);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("expected integer {what}, found '{tok}'")));
    }
    tok.parse::<i64>()
        .map_err(|_| syntax(line, format!("{what} '{tok}' out of 64-bit range")))
}

fn parse_literal(tok: &str, line: usize) -> Result<Literal, ParseError> {
    let (negated, rest) = match tok.strip_prefix('~') {
        Some(r) => (true, r),
        None => (false, tok),
    };
    let digits = rest
        .strip_prefix('x')
        .ok_or_else(|| syntax(line, format!("expected variable, found '{tok}'")))?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(syntax(line, format!("malformed variable '{tok}'")));
    }
    let n: u32 = digits
        .parse()
        .map_err(|_| syntax(line, format!("variable index '{digits}' out of range")))?;
    let var = Var::new(n).map_err(|e| ParseError::Model { line, source: e })?;
    Ok(Literal { var, negated })
}

fn parse_terms(tokens: &[&str], line: usize) -> Result<Vec<(i64, Literal)>, ParseError> {
    if !tokens.len().is_multiple_of(2) {
        return Err(syntax(
            line,
            format!("malformed term near '{}'", tokens[tokens.len() - 1]),
        ));
    }
    tokens
        .chunks(2)
        .map(|pair| {
            let coef = parse_int(pair[0], line, "coefficient")?;
            let lit = parse_literal(pair[1], line)?;
            Ok((coef, lit))
        })
        .collect()
}

/// Reads the `#variable=` and `#constraint=` counts from a header comment.
fn parse_header(comment: &str, report: &mut ParseReport) {
    let mut toks = comment.split_whitespace();
    while let Some(t) = toks.next() {
        let value = toks.clone().next();
        match t {
            "#variable=" => report.num_vars_declared = value.and_then(|v| v.parse().ok()),
            "#constraint=" => report.num_constraints_declared = value.and_then(|v| v.parse().ok()),
            _ => {}
        }
    }
}

/// Parses an OPB document into a normalized instance.
pub fn parse_instance(text: &str, name: &str) -> Result<(PboInstance, ParseReport), ParseError> {
    let mut report = ParseReport::default();
    let mut raw = Vec::new();
    let mut objective: Option<Vec<(i64, Literal)>> = None;
    let mut max_var = 0u32;
    let mut wide_ops: Vec<&'static str> = Vec::new();
    let mut last_line = 0;

    for (i, line_text) in text.lines().enumerate() {
        let line = i + 1;
        last_line = line;
        let trimmed = line_text.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('*') {
            if line == 1 || report.num_vars_declared.is_none() {
                parse_header(comment, &mut report);
            }
            continue;
        }
        let Some(semi) = trimmed.find(';') else {
            return Err(syntax(line, "missing ';' terminator"));
        };
        if !trimmed[semi + 1..].trim().is_empty() {
            return Err(syntax(line, "unexpected content after ';'"));
        }
        let body = &trimmed[..semi];

        if body.starts_with("max:") {
            return Err(syntax(line, "maximization objectives are not supported"));
        }
        if let Some(rest) = body.strip_prefix("min:") {
            if objective.is_some() {
                return Err(syntax(line, "more than one objective line"));
            }
            if report.num_constraints_read > 0 {
                return Err(syntax(line, "objective must precede constraints"));
            }
            let tokens: Vec<&str> = rest.split_whitespace().collect();
            let terms = parse_terms(&tokens, line)?;
            for (_, l) in &terms {
                max_var = max_var.max(l.var.number());
            }
            objective = Some(terms);
            continue;
        }

        let tokens: Vec<&str> = body.split_whitespace().collect();
        if tokens.len() < 2 {
            return Err(syntax(line, "constraint needs an operator and a right-hand side"));
        }
        let op_tok = tokens[tokens.len() - 2];
        let op = parse_op(op_tok).ok_or_else(|| {
            if op_tok.starts_with(['+', '-']) || op_tok.starts_with('x') || op_tok.starts_with('~') {
                syntax(line, "missing relational operator")
            } else {
                syntax(line, format!("unknown operator '{op_tok}'"))
            }
        })?;
        if matches!(op, RelOp::Le | RelOp::Gt | RelOp::Lt) && !wide_ops.contains(&op.symbol()) {
            wide_ops.push(op.symbol());
        }
        let rhs = parse_int(tokens[tokens.len() - 1], line, "right-hand side")?;
        let terms = parse_terms(&tokens[..tokens.len() - 2], line)?;
        for (_, l) in &terms {
            max_var = max_var.max(l.var.number());
        }
        let rc = RawConstraint::new(terms, op, rhs);
        for c in crate::model::normalize_constraint(&rc)
            .map_err(|source| ParseError::Model { line, source })?
        {
            if c.is_tautology() {
                report.tautologies_dropped += 1;
            } else {
                raw.push(c);
            }
        }
        report.num_constraints_read += 1;
    }

    for op in wide_ops {
        report
            .warnings
            .push(format!("non-competition operator '{op}' accepted and normalized"));
    }
    if let Some(declared) = report.num_vars_declared {
        if declared < max_var {
            report.warnings.push(format!(
                "header declares {declared} variables but x{max_var} occurs"
            ));
        }
    }
    if let Some(declared) = report.num_constraints_declared {
        if declared != report.num_constraints_read {
            report.warnings.push(format!(
                "header declares {declared} constraints but {} were read",
                report.num_constraints_read
            ));
        }
    }

    let num_vars = max_var.max(report.num_vars_declared.unwrap_or(0));
    let model_err = |source| ParseError::Model {
        line: last_line,
        source,
    };
    let objective = crate::model::Objective::from_raw(objective.as_deref().unwrap_or(&[]), 0)
        .map_err(model_err)?;
    let instance = PboInstance::new(name, num_vars, raw, objective).map_err(model_err)?;
    Ok((instance, report))
}

/// Reads and parses an OPB file; the instance is named after the file stem.
pub fn parse_file(path: &Path) -> Result<(PboInstance, ParseReport), ParseError> {
    let text = std::fs::read_to_string(path).map_err(|source| ParseError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_instance(&text, &name)
}

/// Writes an instance in OPB format.
///
/// A non-zero objective constant `d` is written as the pair `+d x1 +d ~x1`,
/// which every OPB reader evaluates to the constant `d`.
pub fn serialize_instance(instance: &PboInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "* #variable= {} #constraint= {}",
        instance.num_vars(),
        instance.constraints().len()
    );
    out.push_str("min:");
    let obj = instance.objective();
    for t in obj.terms() {
        let _ = write!(out, " +{} {}", t.coef, t.lit);
    }
    if obj.constant() != 0 {
        let d = obj.constant();
        let sign = if d > 0 { '+' } else { '-' };
        let mag = d.unsigned_abs();
        let _ = write!(out, " {sign}{mag} x1 {sign}{mag} ~x1");
    }
    out.push_str(" ;\n");
    for c in instance.constraints() {
        for t in c.terms() {
            let _ = write!(out, "+{} {} ", t.coef, t.lit);
        }
        let _ = writeln!(out, ">= {} ;", c.threshold());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Objective, PbConstraint, Term};

    fn x(n: u32) -> Literal {
        Literal::pos(Var::new(n).unwrap())
    }

    #[test]
    fn parses_basic_document() {
        let text = "* comment\nmin: +1 x1 +1 x2 ;\n+1 x1 +1 x2 >= 1 ;\n";
        let (f, report) = parse_instance(text, "basic").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(f.constraints().len(), 1);
        assert_eq!(
            f.objective().terms(),
            &[Term::new(1, x(1)), Term::new(1, x(2))]
        );
        assert_eq!(f.objective().constant(), 0);
        assert_eq!(f.name(), "basic");
        assert_eq!(report.num_constraints_read, 1);
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn empty_objective_line() {
        let (f, _) = parse_instance("min: ;\n+1 x1 >= 1 ;\n", "e").unwrap();
        assert!(f.objective().is_empty());
        assert_eq!(f.objective().constant(), 0);
        assert_eq!(f.constraints().len(), 1);
    }

    #[test]
    fn no_objective_line() {
        let (f, _) = parse_instance("+2 x1 -3 x2 >= -1 ;", "feas").unwrap();
        assert!(f.objective().is_empty());
        let c = &f.constraints()[0];
        assert_eq!(
            c.terms(),
            &[Term::new(2, x(1)), Term::new(3, Literal::neg(Var::new(2).unwrap()))]
        );
        assert_eq!(c.threshold(), 2);
    }

    #[test]
    fn crlf_and_header() {
        let text = "* #variable= 3 #constraint= 1\r\nmin: +1 x1 ;\r\n+1 x1 +1 x2 >= 1 ;\r\n";
        let (f, report) = parse_instance(text, "h").unwrap();
        assert_eq!(report.num_vars_declared, Some(3));
        assert_eq!(f.num_vars(), 3);
        assert!(report.warnings.is_empty());
    }

    #[test]
    fn header_mismatch_is_warning() {
        let text = "* #variable= 1 #constraint= 4\n+1 x1 +1 x2 >= 1 ;\n";
        let (f, report) = parse_instance(text, "h").unwrap();
        assert_eq!(f.num_vars(), 2);
        assert_eq!(report.warnings.len(), 2);
    }

    #[test]
    fn wide_operators_warn() {
        let text = "+1 x1 +1 x2 <= 1 ;\n+1 x1 > 0 ;\n+1 x2 < 1 ;\n";
        let (f, report) = parse_instance(text, "w").unwrap();
        assert_eq!(f.constraints().len(), 3);
        assert_eq!(report.warnings.len(), 3);
    }

    #[test]
    fn tautologies_are_counted() {
        let (f, report) = parse_instance("+1 x1 >= 0 ;\n+1 x1 >= 1 ;\n", "t").unwrap();
        assert_eq!(f.constraints().len(), 1);
        assert_eq!(report.tautologies_dropped, 1);
        assert_eq!(report.num_constraints_read, 2);
    }

    #[test]
    fn rejections_carry_line_numbers() {
        let cases = [
            ("+1 x1 >= 1\n", 1, "missing ';'"),
            ("* c\n+1 x1 => 1 ;\n", 2, "unknown operator"),
            ("+1 y1 >= 1 ;\n", 1, "expected variable"),
            ("+1 x0 >= 1 ;\n", 1, "at least 1"),
            ("+1 x-2 >= 1 ;\n", 1, "malformed variable"),
            ("+1.5 x1 >= 1 ;\n", 1, "expected integer"),
            ("+1 x1 +1 >= 1 ;\n", 1, "malformed term"),
            ("max: +1 x1 ;\n", 1, "maximization"),
            ("+1 x1 >= 1 ;\nmin: +1 x1 ;\n", 2, "precede"),
            ("min: +1 x1 ;\nmin: +1 x1 ;\n", 2, "more than one"),
        ];
        for (text, line, needle) in cases {
            let err = parse_instance(text, "bad").unwrap_err();
            assert_eq!(err.line(), Some(line), "{text:?}: {err}");
            assert!(err.to_string().contains(needle), "{text:?}: {err}");
        }
    }

    #[test]
    fn serializes_single_term_forms() {
        let c = PbConstraint::new(vec![Term::new(1, x(1))], 1).unwrap();
        let o = Objective::new(vec![Term::new(1, x(1))], 0).unwrap();
        let f = PboInstance::new("s", 1, vec![c], o).unwrap();
        let text = serialize_instance(&f);
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('*')).collect();
        assert_eq!(body, vec!["min: +1 x1 ;", "+1 x1 >= 1 ;"]);
    }

    #[test]
    fn serializes_empty_objective_header() {
        let c = PbConstraint::new(vec![Term::new(2, x(1)), Term::new(1, x(2))], 2).unwrap();
        let f = PboInstance::new("s", 2, vec![c], Objective::default()).unwrap();
        let text = serialize_instance(&f);
        assert!(text.contains("min: ;\n"));
        assert!(text.contains("+2 x1 +1 x2 >= 2 ;\n"));
    }

    #[test]
    fn objective_constant_survives_round_trip() {
        let (f, _) = parse_instance("min: -3 x1 +2 x2 ;\n+1 x1 >= 1 ;\n", "k").unwrap();
        assert_eq!(f.objective().constant(), -3);
        let (g, _) = parse_instance(&serialize_instance(&f), "k").unwrap();
        assert_eq!(f, g);
    }
}
