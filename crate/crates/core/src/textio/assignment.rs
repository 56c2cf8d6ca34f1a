use super::ParseError;
use crate::cgs::Cgs;
use crate::strategy::{Assignment, Strategy};

/// A parsed assignment file. Positions not listed for a name play the
/// model's first action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentFile {
    pub assignment: Assignment,
    /// Name of the action used for unlisted positions.
    pub default_action: String,
}

/// Parses lines of the form `strategy <name>: <pos>-><action> ...`.
pub fn parse_assignment(text: &str, g: &Cgs) -> Result<AssignmentFile, ParseError> {
    let mut assignment = Assignment::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let trimmed = line.trim_start();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - trimmed.len();
        let err = |col: usize, msg: String| ParseError::new(lineno, col, msg);
        let Some(rest) = trimmed.strip_prefix("strategy") else {
            return Err(err(indent + 1, "expected `strategy <name>: ...`".into()));
        };
        let Some((name, moves)) = rest.split_once(':') else {
            return Err(err(indent + 1, "missing `:` after strategy name".into()));
        };
        let name = name.trim();
        if name.is_empty() || name.contains(char::is_whitespace) {
            return Err(err(indent + 10, "expected a single strategy name".into()));
        }
        if assignment.contains_key(name) {
            return Err(err(
                indent + 10,
                format!("strategy for `{name}` given twice"),
            ));
        }
        let moves_col = indent + "strategy".len() + rest.find(':').unwrap_or(0) + 2;
        let mut choice = vec![0; g.num_positions()];
        let mut seen = vec![false; g.num_positions()];
        let mut offset = 0;
        for item in moves.split_whitespace() {
            let at = moves[offset..].find(item).unwrap_or(0) + offset;
            offset = at + item.len();
            let col = moves_col + at;
            let Some((pos, act)) = item.split_once("->") else {
                return Err(err(
                    col,
                    format!("expected `<position>-><action>`, found `{item}`"),
                ));
            };
            let p = g
                .position_id(pos)
                .ok_or_else(|| err(col, format!("unknown position `{pos}`")))?;
            let a = g
                .action_id(act)
                .ok_or_else(|| err(col, format!("unknown action `{act}`")))?;
            if seen[p] {
                return Err(err(col, format!("position `{pos}` listed twice")));
            }
            seen[p] = true;
            choice[p] = a;
        }
        let s = Strategy::new(g, choice).expect("indices checked above");
        assignment.insert(name.to_string(), s);
    }
    Ok(AssignmentFile {
        assignment,
        default_action: g.actions()[0].clone(),
    })
}

/// One `strategy` line per name, listing every position.
pub fn render_assignment(chi: &Assignment, g: &Cgs) -> String {
    chi.iter()
        .map(|(name, s)| format!("strategy {name}: {}\n", s.describe(g)))
        .collect()
}
