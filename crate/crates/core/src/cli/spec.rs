//! Graph instance specs of the form `kind:arg,arg,...`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{
    alternating_labels, complete_graph, cycle_shift, mix_with_permutation, random_permutation, random_regular,
    sticky_chain, sticky_expanded, GraphFile, LabeledChain,
};

pub const SPEC_HELP: &str = "\
sticky:LAMBDA,P0,P1          two-state sticky chain
expanded:LAMBDA,P0,P1,N      sticky chain blown up to N states
complete:N                   complete graph with self loops
permmix:MU,N,SEED            (1-MU) J + MU P, P a random permutation (SEED=shift for the cycle)
regular:N,D,SEED             random D-regular configuration-model graph
file:PATH                    JSON graph file";

fn bad(spec: &str, why: impl std::fmt::Display) -> Error {
    Error::Parse(format!("graph spec `{spec}`: {why}"))
}

fn args<'a, const K: usize>(spec: &str, rest: &'a str) -> Result<[&'a str; K]> {
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    parts
        .try_into()
        .map_err(|p: Vec<&'a str>| bad(spec, format!("expected {K} arguments, got {}", p.len())))
}

fn num<T: std::str::FromStr>(spec: &str, s: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| bad(spec, format!("`{s}`: {e}")))
}

/// Labels for the generated graph families: `alt` (vertex parity),
/// `ones:K` (first K vertices labeled 1) or an explicit bit string.
pub fn parse_labels(spec: &str, n: usize) -> Result<Vec<u8>> {
    let labels = if spec == "alt" {
        alternating_labels(n)
    } else if let Some(k) = spec.strip_prefix("ones:") {
        let k: usize = k.parse().map_err(|e| Error::Parse(format!("labels `{spec}`: {e}")))?;
        if k > n {
            return Err(Error::InvalidArgument(format!("labels `{spec}`: {k} ones on {n} vertices")));
        }
        (0..n).map(|v| u8::from(v < k)).collect()
    } else if spec.bytes().all(|b| b == b'0' || b == b'1') {
        spec.bytes().map(|b| b - b'0').collect()
    } else {
        return Err(Error::Parse(format!("labels `{spec}`: expected alt, ones:K or a 0/1 string")));
    };
    if labels.len() != n {
        return Err(Error::InvalidArgument(format!(
            "labels `{spec}` have length {}, graph has {n} vertices",
            labels.len()
        )));
    }
    Ok(labels)
}

pub fn parse_graph(spec: &str, labels: Option<&str>) -> Result<LabeledChain> {
    let (kind, rest) = spec.split_once(':').ok_or_else(|| bad(spec, "missing `kind:`"))?;
    let fixed = |chain: LabeledChain| match labels {
        Some(l) => chain.with_labels(parse_labels(l, chain.n())?),
        None => Ok(chain),
    };
    let generated = |m, n| LabeledChain::regular(m, parse_labels(labels.unwrap_or("alt"), n)?);
    match kind {
        "sticky" => {
            let [l, p0, p1] = args(spec, rest)?;
            fixed(sticky_chain(num(spec, l)?, (num(spec, p0)?, num(spec, p1)?))?)
        }
        "expanded" => {
            let [l, p0, p1, n] = args(spec, rest)?;
            fixed(sticky_expanded(num(spec, l)?, (num(spec, p0)?, num(spec, p1)?), num(spec, n)?)?)
        }
        "complete" => {
            let [n] = args(spec, rest)?;
            let n: usize = num(spec, n)?;
            generated(complete_graph(n)?, n)
        }
        "permmix" => {
            let [mu, n, seed] = args(spec, rest)?;
            let n: usize = num(spec, n)?;
            let perm = match seed {
                "shift" => cycle_shift(n),
                s => random_permutation(n, num(spec, s)?),
            };
            generated(mix_with_permutation(num(spec, mu)?, &perm)?, n)
        }
        "regular" => {
            let [n, d, seed] = args(spec, rest)?;
            let n: usize = num(spec, n)?;
            let g = random_regular(n, num(spec, d)?, num(spec, seed)?)?;
            generated(g.matrix, n)
        }
        "file" => fixed(load_graph_file(Path::new(rest))?),
        _ => Err(bad(spec, format!("unknown kind `{kind}`"))),
    }
}

pub fn load_graph_file(path: &Path) -> Result<LabeledChain> {
    let text = std::fs::read_to_string(path)?;
    let file: GraphFile =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    LabeledChain::from_graph_file(&file)
}

/// Comma-separated list of positive integers.
pub fn parse_t_list(s: &str) -> Result<Vec<usize>> {
    let out: Vec<usize> = s
        .split(',')
        .map(|x| x.trim().parse().map_err(|e| Error::Parse(format!("t list `{s}`: {e}"))))
        .collect::<Result<_>>()?;
    if out.contains(&0) {
        return Err(Error::InvalidArgument(format!("t list `{s}` contains 0")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::spectral_expansion;

    #[test]
    fn parses_each_kind() {
        let s = parse_graph("sticky:0.3,0.25,0.75", None).unwrap();
        assert_eq!(s.n(), 2);
        assert!((spectral_expansion(&s).unwrap() - 0.3).abs() < 1e-12);

        let e = parse_graph("expanded:0.3,0.25,0.75,8", None).unwrap();
        assert_eq!(e.labels().iter().filter(|&&l| l == 1).count(), 6);

        let k = parse_graph("complete:6", Some("ones:2")).unwrap();
        assert_eq!(k.labels(), &[1, 1, 0, 0, 0, 0]);

        let p = parse_graph("permmix:0.01,16,shift", None).unwrap();
        assert!((spectral_expansion(&p).unwrap() - 0.01).abs() < 1e-10);
        assert_eq!(p.labels(), alternating_labels(16).as_slice());

        let r = parse_graph("regular:20,3,5", Some("01010101010101010101")).unwrap();
        assert_eq!(r.n(), 20);
    }

    #[test]
    fn file_round_trip() {
        let chain = parse_graph("permmix:0.2,6,3", Some("ones:3")).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        std::fs::write(&path, serde_json::to_string(&chain.to_graph_file()).unwrap()).unwrap();
        let back = parse_graph(&format!("file:{}", path.display()), None).unwrap();
        assert_eq!(back, chain);
    }

    #[test]
    fn rejects_malformed_specs() {
        for s in ["sticky:0.3,0.5", "torus:4", "complete", "complete:x", "permmix:0.1,4,abc"] {
            assert!(matches!(parse_graph(s, None), Err(Error::Parse(_))), "{s}");
        }
        assert!(parse_graph("sticky:-2,0.5,0.5", None).is_err());
        assert!(parse_graph("complete:4", Some("101")).is_err());
        assert!(parse_graph("complete:4", Some("ones:5")).is_err());
        assert!(parse_t_list("4,0").is_err());
        assert_eq!(parse_t_list("4, 16,64").unwrap(), vec![4, 16, 64]);
    }
}
