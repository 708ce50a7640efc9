//! Graph and set-function inputs.

use std::collections::BTreeMap;
use std::path::Path;

use lovx_core::graphcat::{bundled_graph, BUNDLED_GRAPHS};
use lovx_core::{read_graph, Graph, GraphFormat, SetFunction, SetPair, SubsetId};
use serde::Deserialize;

use crate::error::CliError;

/// Prefix selecting a built-in graph instead of a file.
pub const BUNDLED_PREFIX: &str = "bundled:";

/// Load `bundled:NAME` or a graph file; the format defaults from the extension.
pub fn load_graph(spec: &str, format: Option<GraphFormat>, base: usize) -> Result<Graph, CliError> {
    if let Some(name) = spec.strip_prefix(BUNDLED_PREFIX) {
        return bundled_graph(name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown bundled graph `{name}`; known: {}",
                BUNDLED_GRAPHS.join(", ")
            ))
        });
    }
    let path = Path::new(spec);
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: spec.into(),
        source,
    })?;
    let format = format.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("dimacs" | "col") => GraphFormat::Dimacs,
        _ => GraphFormat::EdgeList,
    });
    Ok(read_graph(&text, format, base)?)
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum TableKind {
    Powerset,
    Pair,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    n: usize,
    kind: TableKind,
    values: BTreeMap<String, f64>,
}

/// Load a set-function table.
///
/// Keys have one character per element: `0`/`1` for subsets, `0`/`+`/`-` for disjoint pairs.
/// Every nonempty argument must be present; the empty argument may be omitted and must be 0.
pub fn load_table(path: &str) -> Result<SetFunction, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    parse_table(&text).map_err(|e| match e {
        CliError::Json { source, .. } => CliError::Json {
            path: path.into(),
            source,
        },
        other => other,
    })
}

pub fn parse_table(text: &str) -> Result<SetFunction, CliError> {
    let file: TableFile = serde_json::from_str(text).map_err(|source| CliError::Json {
        path: "<table>".into(),
        source,
    })?;
    let n = file.n;
    let bad = |k: &str| CliError::Config(format!("table key `{k}` must have {n} characters of the right alphabet"));
    let (size, digits): (usize, &[char]) = match file.kind {
        TableKind::Powerset => (1usize << n, &['0', '1']),
        TableKind::Pair => (3usize.pow(n as u32), &['0', '+', '-']),
    };
    let mut values = vec![None; size];
    for (key, v) in &file.values {
        let chars: Vec<char> = key.chars().collect();
        if chars.len() != n || chars.iter().any(|c| !digits.contains(c)) {
            return Err(bad(key));
        }
        let code = match file.kind {
            TableKind::Powerset => SubsetId::from_elems(
                &(0..n).filter(|&i| chars[i] == '1').collect::<Vec<_>>(),
            )
            .0 as usize,
            TableKind::Pair => SetPair::new(
                SubsetId::from_elems(&(0..n).filter(|&i| chars[i] == '+').collect::<Vec<_>>()),
                SubsetId::from_elems(&(0..n).filter(|&i| chars[i] == '-').collect::<Vec<_>>()),
            )?
            .code(n),
        };
        values[code] = Some(*v);
    }
    if values[0].is_some_and(|v| v != 0.0) {
        return Err(CliError::Config("the value at the empty argument must be 0".into()));
    }
    values[0] = Some(0.0);
    let key_of = |code: usize| -> String {
        match file.kind {
            TableKind::Powerset => (0..n).map(|i| if code >> i & 1 == 1 { '1' } else { '0' }).collect(),
            TableKind::Pair => {
                let p = SetPair::from_code(code, n);
                (0..n)
                    .map(|i| if p.pos.contains(i) { '+' } else if p.neg.contains(i) { '-' } else { '0' })
                    .collect()
            }
        }
    };
    let dense: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(c, v)| v.ok_or_else(|| lovx_core::Error::UnknownEntry(key_of(c))))
        .collect::<Result<_, _>>()?;
    Ok(match file.kind {
        TableKind::Powerset => SetFunction::from_table(n, dense)?,
        TableKind::Pair => SetFunction::pair_from_table(n, dense)?,
    })
}
