use super::{AccessError, AccessStructure, ShareKind, ShareLabel, ShareSet};

/// Parses the access-structure text format:
///
/// ```text
/// # comment
/// N1=1 N2=2
/// minimal: Y1 Q1
/// minimal: Q1 Q2
/// ```
pub fn parse_structure(text: &str) -> Result<AccessStructure, AccessError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut minimal = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| AccessError::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match header {
            None => header = Some(parse_header(line).map_err(err).map(|(a, b)| (a, b, line_no))?),
            Some((n1, n2, _)) => {
                let rest = line
                    .strip_prefix("minimal:")
                    .ok_or_else(|| err(format!("expected `minimal: <shares>`, found `{line}`")))?;
                let mut set = ShareSet::EMPTY;
                for tok in rest.split_whitespace() {
                    let label: ShareLabel = tok.parse().map_err(|_| err(format!("invalid share token `{tok}`")))?;
                    let limit = match label.kind {
                        ShareKind::Classical => n1,
                        ShareKind::Quantum => n2,
                    };
                    if label.index > limit {
                        return Err(err(format!("share `{tok}` exceeds declared count")));
                    }
                    if set.contains(label) {
                        return Err(err(format!("share `{tok}` repeated")));
                    }
                    set = set.with(label);
                }
                if set.is_empty() {
                    return Err(err("empty minimal set".into()));
                }
                minimal.push(set);
            }
        }
    }

    let (n1, n2, header_line) = header.ok_or(AccessError::Parse { line: 1, message: "missing `N1=<int> N2=<int>` header".into() })?;
    AccessStructure::new(n1, n2, minimal).map_err(|e| match e {
        AccessError::Invalid(message) => AccessError::Parse { line: header_line, message },
        other => other,
    })
}

fn parse_header(line: &str) -> Result<(usize, usize), String> {
    let toks: Vec<&str> = line.split_whitespace().collect();
    let value = |tok: Option<&&str>, key: &str| -> Result<usize, String> {
        tok.and_then(|t| t.strip_prefix(key))
            .and_then(|v| v.strip_prefix('='))
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| format!("expected `N1=<int> N2=<int>`, found `{line}`"))
    };
    if toks.len() != 2 {
        return Err(format!("expected `N1=<int> N2=<int>`, found `{line}`"));
    }
    Ok((value(toks.first(), "N1")?, value(toks.get(1), "N2")?))
}
