//! System-under-test model: parameters, value counts, interaction strength and
//! forbidden tuples, plus the line-oriented model-file format.
//!
//! ```text
//! # comment
//! 2            # t
//! 3            # k
//! 2 2 2        # value count per parameter
//! 2            # number of constraints
//! 2 0:0 2:0    # assignment count, then parameter:value pairs
//! 2 1:0 2:1
//! names:       # optional, one line of value labels per parameter
//! off,on
//! ...
//! ```
//!
//! Parameters and values are 0-indexed. When a `names:` section is present,
//! constraint literals may use a label instead of a numeric value
//! (`3:SCC`); labels are resolved after the whole file has been read.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// A parameter value, `0..v_i`.
pub type Value = u32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    AtLine {
        line: usize,
        #[source]
        source: Box<ModelError>,
    },
    #[error("interaction strength must be at least 2, got {0}")]
    StrengthTooSmall(usize),
    #[error("t exceeds k (t = {t}, k = {k})")]
    StrengthExceedsParameters { t: usize, k: usize },
    #[error("parameter {param} has {count} values, at least 2 are required")]
    TooFewValues { param: usize, count: usize },
    #[error("constraint references parameter {param}, but the model has {k} parameters")]
    ParameterOutOfRange { param: usize, k: usize },
    #[error("value {value} is out of range for parameter {param} ({count} values)")]
    ValueOutOfRange {
        param: usize,
        value: Value,
        count: usize,
    },
    #[error("parameter {0} appears more than once in a constraint")]
    DuplicateParameter(usize),
    #[error("a forbidden tuple needs at least two assignments, got {0}")]
    ConstraintTooSmall(usize),
    #[error("parameter {param} has {found} labels but {expected} values")]
    LabelCount {
        param: usize,
        expected: usize,
        found: usize,
    },
    #[error("unknown label {label:?} for parameter {param}")]
    UnknownLabel { param: usize, label: String },
    #[error("test case has {found} values, the model has {expected} parameters")]
    RowLength { expected: usize, found: usize },
}

impl ModelError {
    fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        ModelError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn at_line(self, line: usize) -> Self {
        match self {
            e @ (ModelError::Syntax { .. } | ModelError::AtLine { .. }) => e,
            e => ModelError::AtLine {
                line,
                source: Box::new(e),
            },
        }
    }
}

/// One `(parameter, value)` literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Assignment {
    pub param: usize,
    pub value: Value,
}

impl Assignment {
    pub const fn new(param: usize, value: Value) -> Self {
        Self { param, value }
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.param, self.value)
    }
}

/// A conjunction of assignments that must never hold together in one row.
///
/// Assignments are kept sorted by parameter index and no parameter repeats.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ForbiddenTuple {
    assignments: Vec<Assignment>,
}

impl ForbiddenTuple {
    pub fn new(mut assignments: Vec<Assignment>) -> Result<Self, ModelError> {
        if assignments.len() < 2 {
            return Err(ModelError::ConstraintTooSmall(assignments.len()));
        }
        assignments.sort_unstable();
        for pair in assignments.windows(2) {
            if pair[0].param == pair[1].param {
                return Err(ModelError::DuplicateParameter(pair[0].param));
            }
        }
        Ok(Self { assignments })
    }

    /// Builds a tuple from `(parameter, value)` pairs.
    pub fn from_pairs(pairs: &[(usize, Value)]) -> Result<Self, ModelError> {
        Self::new(pairs.iter().map(|&(p, v)| Assignment::new(p, v)).collect())
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    /// True when every assignment holds in `row`.
    #[inline]
    pub fn matches(&self, row: &[Value]) -> bool {
        self.assignments.iter().all(|a| row[a.param] == a.value)
    }

    fn check_against(&self, values: &[usize]) -> Result<(), ModelError> {
        let k = values.len();
        for a in &self.assignments {
            if a.param >= k {
                return Err(ModelError::ParameterOutOfRange { param: a.param, k });
            }
            if a.value as usize >= values[a.param] {
                return Err(ModelError::ValueOutOfRange {
                    param: a.param,
                    value: a.value,
                    count: values[a.param],
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for ForbiddenTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.assignments.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

/// Deduplicated list of forbidden tuples, in first-insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct ConstraintSet {
    tuples: Vec<ForbiddenTuple>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `tuple` unless an equal one is already present. Returns whether it
    /// was added.
    pub fn insert(&mut self, tuple: ForbiddenTuple) -> bool {
        if self.tuples.contains(&tuple) {
            return false;
        }
        self.tuples.push(tuple);
        true
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ForbiddenTuple> {
        self.tuples.iter()
    }

    pub fn as_slice(&self) -> &[ForbiddenTuple] {
        &self.tuples
    }

    /// Number of forbidden tuples fully matched by `row`.
    #[inline]
    pub fn violations(&self, row: &[Value]) -> usize {
        self.tuples.iter().filter(|f| f.matches(row)).count()
    }
}

impl FromIterator<ForbiddenTuple> for ConstraintSet {
    fn from_iter<I: IntoIterator<Item = ForbiddenTuple>>(iter: I) -> Self {
        let mut set = ConstraintSet::new();
        for tuple in iter {
            set.insert(tuple);
        }
        set
    }
}

impl<'a> IntoIterator for &'a ConstraintSet {
    type Item = &'a ForbiddenTuple;
    type IntoIter = std::slice::Iter<'a, ForbiddenTuple>;

    fn into_iter(self) -> Self::IntoIter {
        self.tuples.iter()
    }
}

/// Count of forbidden tuples in `cs` that `tc` matches completely.
pub fn violates(tc: &TestCase, cs: &ConstraintSet) -> usize {
    cs.violations(tc.values())
}

/// The system under test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemModel {
    strength: usize,
    values: Vec<usize>,
    constraints: ConstraintSet,
    labels: Option<Vec<Vec<String>>>,
}

impl SystemModel {
    pub fn new(
        strength: usize,
        values: Vec<usize>,
        constraints: ConstraintSet,
    ) -> Result<Self, ModelError> {
        if strength < 2 {
            return Err(ModelError::StrengthTooSmall(strength));
        }
        if strength > values.len() {
            return Err(ModelError::StrengthExceedsParameters {
                t: strength,
                k: values.len(),
            });
        }
        if let Some((param, &count)) = values.iter().enumerate().find(|(_, &v)| v < 2) {
            return Err(ModelError::TooFewValues { param, count });
        }
        for tuple in &constraints {
            tuple.check_against(&values)?;
        }
        Ok(Self {
            strength,
            values,
            constraints,
            labels: None,
        })
    }

    /// Unconstrained model.
    pub fn unconstrained(strength: usize, values: Vec<usize>) -> Result<Self, ModelError> {
        Self::new(strength, values, ConstraintSet::new())
    }

    /// Attaches value labels, one list per parameter.
    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self, ModelError> {
        if labels.len() != self.values.len() {
            return Err(ModelError::LabelCount {
                param: labels.len().min(self.values.len()),
                expected: self.values.len(),
                found: labels.len(),
            });
        }
        for (param, (names, &count)) in labels.iter().zip(&self.values).enumerate() {
            if names.len() != count {
                return Err(ModelError::LabelCount {
                    param,
                    expected: count,
                    found: names.len(),
                });
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Interaction strength `t`.
    pub fn strength(&self) -> usize {
        self.strength
    }

    /// Parameter count `k`.
    pub fn parameters(&self) -> usize {
        self.values.len()
    }

    /// Value count of each parameter.
    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn constraints(&self) -> &ConstraintSet {
        &self.constraints
    }

    pub fn labels(&self) -> Option<&[Vec<String>]> {
        self.labels.as_deref()
    }

    /// Same parameters and strength, no constraints and no labels.
    pub fn without_constraints(&self) -> SystemModel {
        SystemModel {
            strength: self.strength,
            values: self.values.clone(),
            constraints: ConstraintSet::new(),
            labels: None,
        }
    }

    /// Label of `value` for `param`, falling back to the number.
    pub fn value_label(&self, param: usize, value: Value) -> String {
        match &self.labels {
            Some(labels) => labels[param][value as usize].clone(),
            None => value.to_string(),
        }
    }

    /// Checks that `row` has one in-range value per parameter.
    pub fn check_row(&self, row: &[Value]) -> Result<(), ModelError> {
        if row.len() != self.values.len() {
            return Err(ModelError::RowLength {
                expected: self.values.len(),
                found: row.len(),
            });
        }
        for (param, (&value, &count)) in row.iter().zip(&self.values).enumerate() {
            if value as usize >= count {
                return Err(ModelError::ValueOutOfRange {
                    param,
                    value,
                    count,
                });
            }
        }
        Ok(())
    }

    /// Exponential array notation, e.g. `MCA(N; 2, 2^13 4^5)`; uniform value
    /// counts use the `CA` form.
    pub fn notation(&self) -> String {
        let groups = exponent_groups(self.values.iter().copied());
        let prefix = if groups.len() == 1 { "CA" } else { "MCA" };
        format!("{prefix}(N; {}, {})", self.strength, render_groups(&groups))
    }

    /// Constraint shape in the same notation: `2^4 3^1` means four forbidden
    /// tuples over two parameters and one over three. Empty when unconstrained.
    pub fn constraint_notation(&self) -> String {
        render_groups(&exponent_groups(self.constraints.iter().map(|f| f.len())))
    }

    /// Parses a model file.
    pub fn parse(text: &str) -> Result<Self, ModelError> {
        parse_model(text)
    }

    /// Renders the model in the model-file format.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}\n{}\n", self.strength, self.values.len()));
        out.push_str(&join_spaced(self.values.iter()));
        out.push('\n');
        out.push_str(&format!("{}\n", self.constraints.len()));
        for tuple in &self.constraints {
            out.push_str(&format!("{} {}\n", tuple.len(), tuple));
        }
        if let Some(labels) = &self.labels {
            out.push_str("names:\n");
            for names in labels {
                out.push_str(&names.join(","));
                out.push('\n');
            }
        }
        out
    }
}

impl fmt::Display for SystemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.notation())?;
        if !self.constraints.is_empty() {
            write!(f, " constraints {}", self.constraint_notation())?;
        }
        Ok(())
    }
}

fn exponent_groups(items: impl Iterator<Item = usize>) -> BTreeMap<usize, usize> {
    let mut groups = BTreeMap::new();
    for item in items {
        *groups.entry(item).or_insert(0) += 1;
    }
    groups
}

fn render_groups(groups: &BTreeMap<usize, usize>) -> String {
    groups
        .iter()
        .map(|(base, exp)| format!("{base}^{exp}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn join_spaced<T: fmt::Display>(items: impl Iterator<Item = T>) -> String {
    items.map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Parses model-file text into a validated [`SystemModel`].
pub fn parse_model(text: &str) -> Result<SystemModel, ModelError> {
    let mut lines = LogicalLines::new(text);

    let strength = lines.next_single_integer("interaction strength t")?;
    let k = lines.next_single_integer("parameter count k")?;

    let (line_no, tokens) = lines.expect("value counts")?;
    if tokens.len() != k {
        let column = tokens.get(k).map_or(1, |t| t.column);
        return Err(ModelError::syntax(
            line_no,
            column,
            format!("expected {k} value counts, found {}", tokens.len()),
        ));
    }
    let mut values = Vec::with_capacity(k);
    for tok in &tokens {
        values.push(tok.integer(line_no)?);
    }

    let count = lines.next_single_integer("constraint count")?;
    let mut raw_constraints = Vec::with_capacity(count);
    for _ in 0..count {
        let (line_no, tokens) = lines.expect("constraint")?;
        let m: usize = tokens[0].integer(line_no)?;
        if tokens.len() != m + 1 {
            let column = tokens.get(m + 1).map_or(tokens[0].column, |t| t.column);
            return Err(ModelError::syntax(
                line_no,
                column,
                format!(
                    "constraint declares {m} assignments, found {}",
                    tokens.len() - 1
                ),
            ));
        }
        let mut literals = Vec::with_capacity(m);
        for tok in &tokens[1..] {
            let Some((p, v)) = tok.text.split_once(':') else {
                return Err(ModelError::syntax(
                    line_no,
                    tok.column,
                    format!("expected parameter:value, found {:?}", tok.text),
                ));
            };
            let param: usize = p.parse().map_err(|_| {
                ModelError::syntax(
                    line_no,
                    tok.column,
                    format!("invalid parameter index {p:?}"),
                )
            })?;
            literals.push((param, v.to_string(), tok.column + p.len() + 1));
        }
        raw_constraints.push((line_no, literals));
    }

    let mut labels = None;
    if let Some((line_no, tokens)) = lines.next() {
        if tokens.len() != 1 || tokens[0].text != "names:" {
            return Err(ModelError::syntax(
                line_no,
                tokens[0].column,
                format!("unexpected content {:?}", tokens[0].text),
            ));
        }
        let mut per_param = Vec::with_capacity(k);
        for _ in 0..k {
            let (_, raw) = lines.expect_raw("value labels")?;
            per_param.push(
                raw.split(',')
                    .map(|s| s.trim().to_string())
                    .collect::<Vec<_>>(),
            );
        }
        if let Some((line_no, tokens)) = lines.next() {
            return Err(ModelError::syntax(
                line_no,
                tokens[0].column,
                "unexpected content after names section",
            ));
        }
        labels = Some(per_param);
    }

    let mut constraints = ConstraintSet::new();
    for (line_no, literals) in raw_constraints {
        let mut assignments = Vec::with_capacity(literals.len());
        for (param, text, column) in literals {
            if param >= k {
                return Err(ModelError::ParameterOutOfRange { param, k }.at_line(line_no));
            }
            let value = match text.parse::<Value>() {
                Ok(v) => v,
                Err(_) => match &labels {
                    Some(labels) => {
                        let names: &Vec<String> = &labels[param];
                        match names.iter().position(|n| *n == text) {
                            Some(i) => i as Value,
                            None => {
                                return Err(ModelError::UnknownLabel { param, label: text }
                                    .at_line(line_no))
                            }
                        }
                    }
                    None => {
                        return Err(ModelError::syntax(
                            line_no,
                            column,
                            format!("invalid value {text:?}"),
                        ))
                    }
                },
            };
            assignments.push(Assignment::new(param, value));
        }
        let tuple = ForbiddenTuple::new(assignments).map_err(|e| e.at_line(line_no))?;
        tuple
            .check_against(&values)
            .map_err(|e| e.at_line(line_no))?;
        constraints.insert(tuple);
    }

    let model = SystemModel::new(strength, values, constraints)?;
    match labels {
        Some(labels) => model.with_labels(labels),
        None => Ok(model),
    }
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

impl Token<'_> {
    fn integer<T: std::str::FromStr>(&self, line: usize) -> Result<T, ModelError> {
        self.text.parse().map_err(|_| {
            ModelError::syntax(
                line,
                self.column,
                format!("expected integer, found {:?}", self.text),
            )
        })
    }
}

/// Non-blank lines with comments stripped, tracking 1-based line numbers.
struct LogicalLines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last_line: usize,
}

impl<'a> LogicalLines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last_line: 0,
        }
    }

    fn next_raw(&mut self) -> Option<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            self.last_line = i + 1;
            let content = match line.find('#') {
                Some(pos) => &line[..pos],
                None => line,
            };
            let content = content.trim_end_matches('\r');
            if !content.trim().is_empty() {
                return Some((i + 1, content));
            }
        }
        None
    }

    fn next(&mut self) -> Option<(usize, Vec<Token<'a>>)> {
        let (line_no, content) = self.next_raw()?;
        let mut tokens = Vec::new();
        let mut offset = 0;
        for piece in content.split_whitespace() {
            let start = content[offset..].find(piece).unwrap() + offset;
            offset = start + piece.len();
            tokens.push(Token {
                text: piece,
                column: content[..start].chars().count() + 1,
            });
        }
        Some((line_no, tokens))
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<Token<'a>>), ModelError> {
        self.next()
            .ok_or_else(|| ModelError::syntax(self.last_line + 1, 1, format!("missing {what}")))
    }

    fn expect_raw(&mut self, what: &str) -> Result<(usize, &'a str), ModelError> {
        self.next_raw()
            .ok_or_else(|| ModelError::syntax(self.last_line + 1, 1, format!("missing {what}")))
    }

    fn next_single_integer(&mut self, what: &str) -> Result<usize, ModelError> {
        let (line_no, tokens) = self.expect(what)?;
        if tokens.len() != 1 {
            return Err(ModelError::syntax(
                line_no,
                tokens[1].column,
                format!("expected a single integer ({what})"),
            ));
        }
        tokens[0].integer(line_no)
    }
}

/// One complete test case: a value for every parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct TestCase(Vec<Value>);

impl TestCase {
    pub fn new(model: &SystemModel, values: Vec<Value>) -> Result<Self, ModelError> {
        model.check_row(&values)?;
        Ok(Self(values))
    }

    pub fn values(&self) -> &[Value] {
        &self.0
    }

    pub fn into_values(self) -> Vec<Value> {
        self.0
    }
}

impl std::ops::Deref for TestCase {
    type Target = [Value];

    fn deref(&self) -> &[Value] {
        &self.0
    }
}

/// Ordered rows, each valid for the model the suite was built against.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TestSuite {
    parameters: usize,
    strength: usize,
    rows: Vec<TestCase>,
}

impl TestSuite {
    pub fn new(model: &SystemModel) -> Self {
        Self {
            parameters: model.parameters(),
            strength: model.strength(),
            rows: Vec::new(),
        }
    }

    pub fn from_rows(model: &SystemModel, rows: Vec<Vec<Value>>) -> Result<Self, ModelError> {
        let mut suite = Self::new(model);
        for row in rows {
            suite.push(TestCase::new(model, row)?);
        }
        Ok(suite)
    }

    /// Appends a row. Rows are validated when constructed.
    pub fn push(&mut self, row: TestCase) {
        debug_assert_eq!(row.len(), self.parameters);
        self.rows.push(row);
    }

    pub fn rows(&self) -> &[TestCase] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn parameters(&self) -> usize {
        self.parameters
    }

    pub fn strength(&self) -> usize {
        self.strength
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUNNING_EXAMPLE: &str = "\
# three binary parameters, two forbidden pairs
2
3
2 2 2
2
2 0:0 2:0
2 1:0 2:1
";

    fn example_constraints() -> ConstraintSet {
        [
            ForbiddenTuple::from_pairs(&[(0, 0), (2, 0)]).unwrap(),
            ForbiddenTuple::from_pairs(&[(1, 0), (2, 1)]).unwrap(),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn parses_running_example() {
        let model = parse_model(RUNNING_EXAMPLE).unwrap();
        assert_eq!(model.strength(), 2);
        assert_eq!(model.parameters(), 3);
        assert_eq!(model.values(), &[2, 2, 2]);
        assert_eq!(model.constraints(), &example_constraints());
    }

    #[test]
    fn parses_unconstrained_orthogonal_shape() {
        let model = parse_model("2\n4\n3 3 3 3\n0\n").unwrap();
        assert_eq!(model.parameters(), 4);
        assert!(model.constraints().is_empty());
    }

    #[test]
    fn rejects_strength_above_parameter_count() {
        let err = parse_model("3\n2\n2 2\n0\n").unwrap_err();
        assert_eq!(err, ModelError::StrengthExceedsParameters { t: 3, k: 2 });
        assert!(err.to_string().contains("t exceeds k"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_model("2\n3\n2 x 2\n0\n").unwrap_err();
        assert_eq!(
            err,
            ModelError::Syntax {
                line: 3,
                column: 3,
                message: "expected integer, found \"x\"".into()
            }
        );
        let err = parse_model("2\n3\n2 2 2\n1\n2 0-0 1:1\n").unwrap_err();
        assert!(
            matches!(
                err,
                ModelError::Syntax {
                    line: 5,
                    column: 3,
                    ..
                }
            ),
            "{err}"
        );
        let err = parse_model("2\n3\n2 2\n0\n").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 3, .. }), "{err}");
        let err = parse_model("2\n3\n").unwrap_err();
        assert!(matches!(err, ModelError::Syntax { line: 3, .. }), "{err}");
    }

    #[test]
    fn rejects_bad_constraints() {
        let out_of_range = parse_model("2\n3\n2 2 2\n1\n2 0:0 3:0\n").unwrap_err();
        assert!(matches!(
            out_of_range,
            ModelError::AtLine { line: 5, ref source } if **source == ModelError::ParameterOutOfRange { param: 3, k: 3 }
        ));
        let bad_value = parse_model("2\n3\n2 2 2\n1\n2 0:0 1:2\n").unwrap_err();
        assert!(
            bad_value.to_string().contains("out of range"),
            "{bad_value}"
        );
        let dup = parse_model("2\n3\n2 2 2\n1\n2 1:0 1:1\n").unwrap_err();
        assert!(dup.to_string().contains("more than once"), "{dup}");
        let single = parse_model("2\n3\n2 2 2\n1\n1 1:0\n").unwrap_err();
        assert!(single.to_string().contains("at least two"), "{single}");
        let too_few = parse_model("2\n3\n2 1 2\n0\n").unwrap_err();
        assert_eq!(too_few, ModelError::TooFewValues { param: 1, count: 1 });
    }

    #[test]
    fn duplicate_constraints_are_merged() {
        let model = parse_model("2\n3\n2 2 2\n3\n2 0:0 2:0\n2 2:0 0:0\n2 1:0 2:1\n").unwrap();
        assert_eq!(model.constraints().len(), 2);
    }

    #[test]
    fn labels_resolve_constraint_literals() {
        let text = "2\n2\n2 3\n1\n2 0:on 1:blue\nnames:\noff,on\nred, green, blue\n";
        let model = parse_model(text).unwrap();
        assert_eq!(
            model.constraints().as_slice(),
            &[ForbiddenTuple::from_pairs(&[(0, 1), (1, 2)]).unwrap()]
        );
        assert_eq!(model.value_label(1, 1), "green");
        let unknown = parse_model("2\n2\n2 2\n1\n2 0:up 1:0\nnames:\na,b\nc,d\n").unwrap_err();
        assert!(unknown.to_string().contains("unknown label"), "{unknown}");
        let miscount = parse_model("2\n2\n2 2\n0\nnames:\na,b,c\nc,d\n").unwrap_err();
        assert!(matches!(miscount, ModelError::LabelCount { param: 0, .. }));
    }

    #[test]
    fn render_is_the_canonical_form() {
        let model = parse_model(RUNNING_EXAMPLE).unwrap();
        assert_eq!(model.render(), "2\n3\n2 2 2\n2\n2 0:0 2:0\n2 1:0 2:1\n");
        assert_eq!(parse_model(&model.render()).unwrap(), model);
    }

    #[test]
    fn violation_counts() {
        let cs = example_constraints();
        let model = SystemModel::new(2, vec![2, 2, 2], cs.clone()).unwrap();
        let tc = |v: Vec<Value>| TestCase::new(&model, v).unwrap();
        assert_eq!(violates(&tc(vec![0, 1, 0]), &cs), 1);
        assert_eq!(violates(&tc(vec![1, 1, 0]), &cs), 0);

        let nested: ConstraintSet = [
            ForbiddenTuple::from_pairs(&[(0, 0), (1, 0), (2, 0)]).unwrap(),
            ForbiddenTuple::from_pairs(&[(0, 0), (2, 0)]).unwrap(),
        ]
        .into_iter()
        .collect();
        assert_eq!(violates(&tc(vec![0, 0, 0]), &nested), 2);
        assert_eq!(violates(&tc(vec![0, 0, 0]), &ConstraintSet::new()), 0);
    }

    #[test]
    fn notation_strings() {
        let uniform = SystemModel::unconstrained(2, vec![3; 4]).unwrap();
        assert_eq!(uniform.notation(), "CA(N; 2, 3^4)");
        assert_eq!(uniform.constraint_notation(), "");
        assert_eq!(uniform.to_string(), "CA(N; 2, 3^4)");

        let model = parse_model(RUNNING_EXAMPLE).unwrap();
        assert_eq!(model.to_string(), "CA(N; 2, 2^3) constraints 2^2");
        let mixed = SystemModel::unconstrained(2, vec![4, 2, 2, 7]).unwrap();
        assert_eq!(mixed.notation(), "MCA(N; 2, 2^2 4^1 7^1)");
    }

    #[test]
    fn test_case_validation() {
        let model = parse_model(RUNNING_EXAMPLE).unwrap();
        assert!(TestCase::new(&model, vec![0, 1]).is_err());
        assert!(TestCase::new(&model, vec![0, 1, 2]).is_err());
        assert!(TestSuite::from_rows(&model, vec![vec![0, 1, 1], vec![1, 1, 0]]).is_ok());
    }
}
