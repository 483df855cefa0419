//! Built-in graph families.

use super::group::{cyclic_generators, symmetric_generators};
use super::spec::{EdgeDoc, FiGraphSpec, OrbitDoc, SpecDoc};
use crate::error::{Error, Result};

/// Selectors accepted by [`builtin_family`]; parameterized ones take `:r`.
pub const FAMILY_NAMES: &[&str] = &[
    "complete",
    "complete_bipartite",
    "star",
    "kneser:r",
    "johnson:r",
    "crown",
    "different_orbits",
    "bottleneck:r",
    "nocutoff",
    "variety",
];

fn orbit(name: &str, arity: usize, generators: Vec<Vec<usize>>) -> OrbitDoc {
    OrbitDoc {
        name: name.into(),
        arity,
        generators,
    }
}

fn edge(left: &str, right: &str, matches: &[[usize; 2]]) -> EdgeDoc {
    EdgeDoc {
        left: left.into(),
        right: right.into(),
        matches: matches.to_vec(),
        class: None,
    }
}

fn classed(mut e: EdgeDoc, class: &str) -> EdgeDoc {
    e.class = Some(class.into());
    e
}

fn diag_prefix(j: usize) -> Vec<[usize; 2]> {
    (0..j).map(|i| [i, i]).collect()
}

fn doc(name: &str, vertex_orbits: Vec<OrbitDoc>, edge_orbits: Vec<EdgeDoc>) -> SpecDoc {
    SpecDoc {
        name: name.into(),
        vertex_orbits,
        edge_orbits,
        loops_allowed: false,
        shift: 0,
        min_n: None,
        walk: None,
    }
}

/// Splits `name:r` or `name(r)` into the name and its parameter.
pub fn parse_selector(sel: &str) -> (String, Option<usize>) {
    let sel = sel.trim();
    if let Some((a, b)) = sel.split_once(':') {
        return (a.to_string(), b.trim().parse().ok());
    }
    if let Some((a, b)) = sel.split_once('(') {
        return (a.to_string(), b.trim_end_matches(')').trim().parse().ok());
    }
    (sel.to_string(), None)
}

/// Looks up a built-in family such as `kneser:2` or `johnson(3)`.
pub fn builtin_family(selector: &str) -> Result<FiGraphSpec> {
    let (name, param) = parse_selector(selector);
    let unknown = || Error::UnknownFamily(selector.to_string());
    let r = |default: usize| -> Result<usize> {
        let r = param.unwrap_or(default);
        if r == 0 {
            return Err(Error::UnknownFamily(format!("{selector}: parameter must be positive")));
        }
        Ok(r)
    };
    let d = match name.as_str() {
        "complete" => doc("complete", vec![orbit("vertex", 1, vec![])], vec![edge("vertex", "vertex", &[])]),
        "complete_bipartite" => doc(
            "complete_bipartite",
            vec![orbit("left", 1, vec![]), orbit("right", 1, vec![])],
            vec![edge("left", "right", &[]), edge("left", "right", &[[0, 0]])],
        ),
        "crown" => doc(
            "crown",
            vec![orbit("left", 1, vec![]), orbit("right", 1, vec![])],
            vec![edge("left", "right", &[])],
        ),
        "star" => {
            let mut d = doc(
                "star",
                vec![orbit("center", 0, vec![]), orbit("leaf", 1, vec![])],
                vec![edge("center", "leaf", &[])],
            );
            // n - 1 leaves at index n
            d.shift = 1;
            d
        }
        "kneser" => {
            let r = r(2)?;
            doc(&format!("kneser:{r}"), vec![orbit("set", r, symmetric_generators(r))], vec![edge("set", "set", &[])])
        }
        "johnson" => {
            let r = r(2)?;
            doc(
                &format!("johnson:{r}"),
                vec![orbit("set", r, symmetric_generators(r))],
                vec![edge("set", "set", &diag_prefix(r - 1))],
            )
        }
        "different_orbits" => doc(
            "different_orbits",
            vec![orbit("vertex", 4, vec![])],
            vec![
                edge("vertex", "vertex", &[[0, 0]]),
                edge("vertex", "vertex", &[[1, 1], [2, 2], [3, 3]]),
            ],
        ),
        "bottleneck" => {
            let r = r(1)?;
            let mut edges = Vec::new();
            for j in 0..r {
                edges.push(classed(edge("red", "red", &diag_prefix(j)), "red clique"));
                edges.push(classed(edge("blue", "blue", &diag_prefix(j)), "blue clique"));
            }
            edges.push(edge("green", "red", &[]));
            edges.push(edge("green", "blue", &[]));
            doc(
                &format!("bottleneck:{r}"),
                vec![
                    orbit("red", r, symmetric_generators(r)),
                    orbit("blue", r, symmetric_generators(r)),
                    orbit("green", 0, vec![]),
                ],
                edges,
            )
        }
        "nocutoff" => doc(
            "nocutoff",
            vec![orbit("red", 1, vec![]), orbit("blue", 1, vec![])],
            vec![
                edge("red", "red", &[]),
                edge("blue", "blue", &[]),
                edge("red", "blue", &[[0, 0]]),
            ],
        ),
        "variety" => doc(
            "variety",
            vec![
                orbit("red", 3, vec![]),
                orbit("blue", 2, symmetric_generators(2)),
                orbit("green", 4, cyclic_generators(4)),
            ],
            vec![
                edge("red", "blue", &[[0, 0], [1, 1]]),
                edge("red", "blue", &[[0, 0]]),
                edge("red", "green", &[[0, 0], [1, 1], [2, 2]]),
                edge("green", "green", &[[0, 0], [1, 1], [2, 3], [3, 2]]),
            ],
        ),
        _ => return Err(unknown()),
    };
    FiGraphSpec::from_doc(&d)
}

/// The default parameterization of every built-in family.
pub fn default_families() -> Vec<String> {
    [
        "complete",
        "complete_bipartite",
        "star",
        "kneser:2",
        "johnson:2",
        "johnson:3",
        "crown",
        "different_orbits",
        "bottleneck:1",
        "bottleneck:2",
        "nocutoff",
        "variety",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}
