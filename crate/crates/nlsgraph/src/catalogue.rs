//! Graphs addressable by name from the command line and scenario files.
//!
//! Fixed names are the shared corpus plus the four meshed examples.
//! Parametric names take the form `family:a,b,...`, for instance
//! `g_ell:2.5`, `fork:0.5,1,2` or `n_fork:5,0.2`.

use nlsgraph_core::{shapes, MetricGraph};

use crate::error::{CliError, Result};

pub const FAMILIES: [&str; 10] = [
    "star",
    "bridge",
    "pendant_line",
    "signpost",
    "tadpole",
    "fork",
    "n_fork",
    "g_ell",
    "bubble_tower",
    "tower_with_pairs",
];

/// Every fixed name with its graph, in a stable order.
pub fn named_graphs() -> Vec<(String, MetricGraph)> {
    let mut out = shapes::corpus();
    out.push(("terminal_example".into(), shapes::terminal_example()));
    out.push(("one_halfline_example".into(), shapes::one_halfline_example()));
    out.push(("covered_example".into(), shapes::covered_example()));
    out.push(("uncovered_example".into(), shapes::uncovered_example()));
    out
}

fn numbers(name: &str, args: &str) -> Result<Vec<f64>> {
    args.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad parameter `{s}` in graph name `{name}`")))
        })
        .collect()
}

fn count(name: &str, x: f64) -> Result<usize> {
    if x >= 0.0 && x.fract() == 0.0 {
        Ok(x as usize)
    } else {
        Err(CliError::Usage(format!("`{name}` needs an integer count")))
    }
}

/// Builds a graph from a family name and its numeric parameters.
pub fn family(name: &str, args: &[f64]) -> Result<MetricGraph> {
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(CliError::Usage(format!("`{name}` takes {n} parameter(s), got {}", args.len())))
        }
    };
    let g = match name {
        "star" => {
            arity(1)?;
            shapes::star(count(name, args[0])?)
        }
        "bridge" => shapes::bridge(args),
        "pendant_line" => {
            arity(1)?;
            shapes::pendant_line(args[0])
        }
        "signpost" => {
            arity(2)?;
            shapes::signpost(args[0], args[1])
        }
        "tadpole" => {
            arity(1)?;
            shapes::tadpole(args[0])
        }
        "fork" => shapes::fork(args),
        "n_fork" => {
            arity(2)?;
            shapes::n_fork(count(name, args[0])?, args[1])
        }
        "g_ell" => {
            arity(1)?;
            shapes::g_ell(args[0])
        }
        "bubble_tower" => shapes::bubble_tower(args),
        "tower_with_pairs" => {
            if args.is_empty() || args.len() % 2 == 0 {
                return Err(CliError::Usage(String::from(
                    "`tower_with_pairs` takes the top length followed by pairs",
                )));
            }
            let pairs: Vec<(f64, f64)> = args[1..].chunks(2).map(|c| (c[0], c[1])).collect();
            shapes::tower_with_pairs(args[0], &pairs)
        }
        _ => return Err(CliError::Usage(format!("unknown graph family `{name}`"))),
    };
    g.map_err(CliError::InvalidGraph)
}

pub fn resolve(name: &str) -> Result<MetricGraph> {
    if let Some((fam, args)) = name.split_once(':') {
        return family(fam, &numbers(name, args)?);
    }
    match name {
        "line" => return Ok(shapes::line()),
        "halfline" => return Ok(shapes::halfline()),
        _ => {}
    }
    named_graphs()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, g)| g)
        .ok_or_else(|| CliError::Usage(format!("unknown graph `{name}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_resolve() {
        for (name, g) in named_graphs() {
            assert_eq!(resolve(&name).unwrap(), g, "{name}");
        }
        assert_eq!(resolve("n_fork:4,0.5").unwrap().num_halflines(), 1);
        assert_eq!(resolve("tower_with_pairs:2,1,1").unwrap().edges().len(), 5);
    }

    #[test]
    fn bad_names() {
        assert!(matches!(resolve("nope"), Err(CliError::Usage(_))));
        assert!(matches!(resolve("g_ell:x"), Err(CliError::Usage(_))));
        assert!(matches!(resolve("star:2.5"), Err(CliError::Usage(_))));
        assert!(matches!(resolve("g_ell:-1"), Err(CliError::InvalidGraph(_))));
    }
}
