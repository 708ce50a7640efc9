//! Problem names and parameters accepted on the command line.

use std::collections::BTreeMap;

use lovx_core::graphcat::{
    cheeger_cut, cheeger_variant, chromatic_number, dirichlet_cheeger, frustration_index,
    independence_number, k_independence, matching_number, max_kcut, maxcut, mincut, modularity,
    modularity_normalized, multiway_partition, neumann_cheeger, vertex_cover, CheegerVariant,
    IndependenceForm,
};
use lovx_core::oracle::BoundaryKind;
use lovx_core::{Graph, ProblemInstance, SubsetId};

use crate::error::CliError;

/// Problem name, accepted parameters, one-line description.
pub const PROBLEMS: &[(&str, &[&str], &str)] = &[
    ("maxcut", &["p"], "maximum cut, exponent p >= 1 (default 1)"),
    ("mincut", &[], "minimum cut over pairs of nonempty sets"),
    ("max-kcut", &["k"], "maximum k-cut (default k = 2)"),
    ("cheeger", &[], "Cheeger cut"),
    ("dirichlet-cheeger", &["region"], "Dirichlet Cheeger constant of a vertex region"),
    ("neumann-cheeger", &["region"], "Neumann Cheeger constant of a vertex region"),
    ("independence", &["objective"], "independence number, objective product|difference"),
    ("k-independence", &["k"], "largest set with pairwise distance above k (default 2)"),
    ("matching", &[], "maximum matching number"),
    ("vertex-cover", &[], "minimum vertex cover"),
    ("multiway", &["terminals"], "multiway partition with terminals (default first,last)"),
    ("chromatic", &[], "chromatic number"),
    ("frustration", &[], "frustration index of a signed graph"),
    ("modularity", &[], "maximum modularity"),
    ("modularity-normalized", &["mu"], "modularity over mu(A) mu(A^c)"),
    ("normalized-cut", &[], "cut(A) / (#A #A^c)"),
    ("sparsest-cut", &[], "cut over separated demand pairs, all pairs demand 1"),
    ("isoperimetric", &["k"], "isoperimetric profile at k (default 1)"),
    ("vertex-cheeger", &["boundary"], "vertex-boundary Cheeger constant, boundary inner|outer|vertex"),
    ("cheeger-like", &[], "largest mean of 1/deg u + 1/deg v over edge sets"),
    ("dual-cheeger", &["p"], "dual Cheeger constant with exponent p (default 1)"),
];

pub type Params = BTreeMap<String, String>;

/// Parse `key=value` strings.
pub fn parse_params(raw: &[String]) -> Result<Params, CliError> {
    let mut out = Params::new();
    for item in raw {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("parameter `{item}` is not key=value")))?;
        if out.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(CliError::Config(format!("parameter `{k}` given twice")));
        }
    }
    Ok(out)
}

fn number(params: &Params, key: &str, default: f64) -> Result<f64, CliError> {
    params.get(key).map_or(Ok(default), |v| {
        v.parse()
            .map_err(|_| CliError::Config(format!("parameter {key} must be a number, got `{v}`")))
    })
}

fn count(params: &Params, key: &str, default: usize) -> Result<usize, CliError> {
    params.get(key).map_or(Ok(default), |v| {
        v.parse()
            .map_err(|_| CliError::Config(format!("parameter {key} must be a count, got `{v}`")))
    })
}

/// Comma-separated list of vertex indices.
pub fn parse_list(text: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| CliError::Config(format!("`{s}` is not a vertex index")))
        })
        .collect()
}

fn vertex_set(g: &Graph, params: &Params, key: &str, default: &[usize]) -> Result<Vec<usize>, CliError> {
    let list = match params.get(key) {
        Some(v) => parse_list(v)?,
        None => default.to_vec(),
    };
    if let Some(&v) = list.iter().find(|&&v| v >= g.n()) {
        return Err(CliError::Config(format!("vertex {v} out of range for n = {}", g.n())));
    }
    Ok(list)
}

/// Build a catalog instance from its command-line name.
pub fn build_problem(name: &str, g: &Graph, params: &Params) -> Result<ProblemInstance, CliError> {
    let (_, allowed, _) = PROBLEMS
        .iter()
        .find(|(n, _, _)| *n == name)
        .ok_or_else(|| {
            let names: Vec<&str> = PROBLEMS.iter().map(|p| p.0).collect();
            CliError::Config(format!("unknown problem `{name}`; known: {}", names.join(", ")))
        })?;
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(CliError::Config(format!("problem {name} takes no parameter `{k}`")));
    }
    let n = g.n();
    let half: Vec<usize> = (0..n.div_ceil(2)).collect();
    let inst = match name {
        "maxcut" => maxcut(g, number(params, "p", 1.0)?)?,
        "mincut" => mincut(g)?,
        "max-kcut" => max_kcut(g, count(params, "k", 2)?)?,
        "cheeger" => cheeger_cut(g)?,
        "dirichlet-cheeger" => {
            dirichlet_cheeger(g, SubsetId::from_elems(&vertex_set(g, params, "region", &half)?))?
        }
        "neumann-cheeger" => {
            neumann_cheeger(g, SubsetId::from_elems(&vertex_set(g, params, "region", &half)?))?
        }
        "independence" => {
            let form = match params.get("objective").map(String::as_str) {
                None | Some("difference") => IndependenceForm::Difference,
                Some("product") => IndependenceForm::Product,
                Some(o) => return Err(CliError::Config(format!("unknown objective `{o}`"))),
            };
            independence_number(g, form)?
        }
        "k-independence" => k_independence(g, count(params, "k", 2)?)?,
        "matching" => matching_number(g)?,
        "vertex-cover" => vertex_cover(g, None)?,
        "multiway" => {
            let default = if n >= 2 { vec![0, n - 1] } else { vec![0] };
            multiway_partition(g, None, &vertex_set(g, params, "terminals", &default)?)?
        }
        "chromatic" => chromatic_number(g)?,
        "frustration" => frustration_index(g)?,
        "modularity" => modularity(g)?,
        "modularity-normalized" => {
            let mu = match params.get("mu") {
                None => None,
                Some(v) => Some(
                    v.split(',')
                        .map(|s| {
                            s.trim()
                                .parse::<f64>()
                                .map_err(|_| CliError::Config(format!("bad mu entry `{s}`")))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
            };
            modularity_normalized(g, mu)?
        }
        "normalized-cut" => cheeger_variant(g, CheegerVariant::NormalizedCut)?,
        "sparsest-cut" => cheeger_variant(g, CheegerVariant::SparsestCut(None))?,
        "isoperimetric" => {
            cheeger_variant(g, CheegerVariant::IsoperimetricProfile(count(params, "k", 1)?))?
        }
        "vertex-cheeger" => {
            let kind = match params.get("boundary").map(String::as_str) {
                None | Some("vertex") => BoundaryKind::Vertex,
                Some("inner") => BoundaryKind::Inner,
                Some("outer") => BoundaryKind::Outer,
                Some(o) => return Err(CliError::Config(format!("unknown boundary `{o}`"))),
            };
            cheeger_variant(g, CheegerVariant::VertexBoundary(kind))?
        }
        "cheeger-like" => cheeger_variant(g, CheegerVariant::CheegerLike)?,
        "dual-cheeger" => cheeger_variant(g, CheegerVariant::DualCheeger(number(params, "p", 1.0)?))?,
        _ => unreachable!("checked against the problem table"),
    };
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_listed_problem_builds() {
        let g = Graph::cycle(5);
        for (name, _, _) in PROBLEMS {
            build_problem(name, &g, &Params::new()).unwrap();
        }
    }

    #[test]
    fn rejects_unknown_names_and_parameters() {
        let g = Graph::path(3);
        assert!(build_problem("maxflow", &g, &Params::new()).is_err());
        let p = parse_params(&["q=1".into()]).unwrap();
        assert!(build_problem("maxcut", &g, &p).is_err());
        assert!(parse_params(&["k".into()]).is_err());
    }
}
