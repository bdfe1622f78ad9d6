//! Network, demand-set and event documents.

use super::{expect_header, parse_int, parse_scalar, tokenize, ParseError};
use crate::dynamic::DemandEvent;
use crate::network::{LinkId, LinkSpec, NetworkSpec, NodeSpec};
use crate::scalar::Scalar;

/// Format:
/// ```text
/// sprinkler-network v1
/// rate 1
/// node <id> [<x> <y>]
/// depot <node-id>
/// link <from> <to> arc|edge <length>
/// ```
pub fn parse_network<F: Scalar>(text: &str) -> Result<NetworkSpec<F>, ParseError> {
    let lines = tokenize(text);
    expect_header(&lines, "sprinkler-network")?;
    let mut spec = NetworkSpec {
        nodes: Vec::new(),
        depots: Vec::new(),
        links: Vec::new(),
        sprinkling_rate: F::one(),
    };
    for (n, toks) in lines.iter().skip(1) {
        let n = *n;
        match toks[0] {
            "rate" if toks.len() == 2 => spec.sprinkling_rate = parse_scalar(toks[1], n)?,
            "node" if toks.len() == 2 => {
                spec.nodes.push(NodeSpec { id: parse_int(toks[1], n)?, coords: None })
            }
            "node" if toks.len() == 4 => spec.nodes.push(NodeSpec {
                id: parse_int(toks[1], n)?,
                coords: Some((parse_scalar(toks[2], n)?, parse_scalar(toks[3], n)?)),
            }),
            "depot" if toks.len() == 2 => spec.depots.push(parse_int(toks[1], n)?),
            "link" if toks.len() == 5 => {
                let directional = match toks[3] {
                    "arc" => true,
                    "edge" => false,
                    other => {
                        return Err(ParseError::at(n, format!("link kind must be arc or edge, found `{other}`")))
                    }
                };
                spec.links.push(LinkSpec {
                    from: parse_int(toks[1], n)?,
                    to: parse_int(toks[2], n)?,
                    directional,
                    length: parse_scalar(toks[4], n)?,
                });
            }
            other => return Err(ParseError::at(n, format!("unexpected `{other}` in network document"))),
        }
    }
    Ok(spec)
}

pub fn emit_network<F: Scalar>(spec: &NetworkSpec<F>) -> String {
    let mut out = String::from("sprinkler-network v1\n");
    out.push_str(&format!("rate {}\n", spec.sprinkling_rate));
    for node in &spec.nodes {
        match node.coords {
            Some((x, y)) => out.push_str(&format!("node {} {} {}\n", node.id, x, y)),
            None => out.push_str(&format!("node {}\n", node.id)),
        }
    }
    for depot in &spec.depots {
        out.push_str(&format!("depot {depot}\n"));
    }
    for link in &spec.links {
        let kind = if link.directional { "arc" } else { "edge" };
        out.push_str(&format!("link {} {} {} {}\n", link.from, link.to, kind, link.length));
    }
    out
}

/// Format: `sprinkler-demands v1` then one `demand <link-index>` per line.
pub fn parse_demands(text: &str) -> Result<Vec<usize>, ParseError> {
    let lines = tokenize(text);
    expect_header(&lines, "sprinkler-demands")?;
    let mut out = Vec::new();
    for (n, toks) in lines.iter().skip(1) {
        match toks[0] {
            "demand" if toks.len() == 2 => out.push(parse_int(toks[1], *n)?),
            other => {
                return Err(ParseError::at(*n, format!("unexpected `{other}` in demands document")))
            }
        }
    }
    Ok(out)
}

pub fn emit_demands(demands: &[usize]) -> String {
    let mut out = String::from("sprinkler-demands v1\n");
    for d in demands {
        out.push_str(&format!("demand {d}\n"));
    }
    out
}

/// Format: `sprinkler-events v1` then
/// `event <receipt-min> <window-min> <link-index>...` per line.
pub fn parse_events<F: Scalar>(text: &str) -> Result<Vec<DemandEvent<F>>, ParseError> {
    let lines = tokenize(text);
    expect_header(&lines, "sprinkler-events")?;
    let mut out = Vec::new();
    for (n, toks) in lines.iter().skip(1) {
        let n = *n;
        match toks[0] {
            "event" if toks.len() >= 3 => {
                let receipt_time = parse_scalar(toks[1], n)?;
                let window_length = parse_scalar(toks[2], n)?;
                let mut links = Vec::new();
                for t in &toks[3..] {
                    links.push(LinkId(parse_int::<u32>(t, n)?));
                }
                out.push(DemandEvent { receipt_time, window_length, links });
            }
            other => {
                return Err(ParseError::at(n, format!("unexpected `{other}` in events document")))
            }
        }
    }
    Ok(out)
}

pub fn emit_events<F: Scalar>(events: &[DemandEvent<F>]) -> String {
    let mut out = String::from("sprinkler-events v1\n");
    for ev in events {
        out.push_str(&format!("event {} {}", ev.receipt_time, ev.window_length));
        for l in &ev.links {
            out.push_str(&format!(" {}", l.0));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_network_round_trip() {
        let text = "sprinkler-network v1\nrate 1\nnode 1\nnode 2\ndepot 1\nlink 1 2 arc 100\nlink 1 2 edge 100\n";
        let spec: NetworkSpec<f64> = parse_network(text).unwrap();
        assert_eq!(spec.nodes.len(), 2);
        assert_eq!(spec.depots, vec![1]);
        assert_eq!(spec.links.len(), 2);
        assert!(spec.links[0].directional);
        assert!(!spec.links[1].directional);
        assert_eq!(emit_network(&spec), text);
        // and the parsed form builds the minimal network
        let net = crate::network::build_network(&spec, &[0]).unwrap();
        assert_eq!(net.links().len(), 3);
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let text = "sprinkler-network v1\n# a comment\n\nrate 2.5\nnode 0 10 20\nnode 1\ndepot 0\nlink 0 1 edge 50 # trailing\n";
        let spec: NetworkSpec<f64> = parse_network(text).unwrap();
        assert_eq!(spec.sprinkling_rate, 2.5);
        assert_eq!(spec.nodes[0].coords, Some((10.0, 20.0)));
    }

    #[test]
    fn bad_documents_fail_with_line_numbers() {
        let err = parse_network::<f64>("wrong v1\n").unwrap_err();
        assert!(matches!(err, ParseError::Schema { line: 1, .. }));
        let err = parse_network::<f64>("sprinkler-network v1\nlink 0 1 road 50\n").unwrap_err();
        assert!(matches!(err, ParseError::Schema { line: 2, .. }));
        let err = parse_demands("sprinkler-demands v1\ndemand x\n").unwrap_err();
        assert!(matches!(err, ParseError::Schema { line: 2, .. }));
    }

    #[test]
    fn events_round_trip_and_window_arithmetic() {
        let text = "sprinkler-events v1\nevent 60 30 5 7 12\n";
        let events: Vec<DemandEvent<f64>> = parse_events(text).unwrap();
        assert_eq!(events.len(), 1);
        let ev = &events[0];
        assert_eq!(ev.receipt_time, 60.0);
        assert_eq!(ev.window_length, 30.0);
        assert_eq!(ev.links, vec![LinkId(5), LinkId(7), LinkId(12)]);
        // the window each link receives is [receipt, receipt + length]
        assert_eq!(ev.receipt_time + ev.window_length, 90.0);
        assert_eq!(emit_events(&events), text);
    }

    #[test]
    fn demands_round_trip() {
        let text = "sprinkler-demands v1\ndemand 0\ndemand 7\n";
        let d = parse_demands(text).unwrap();
        assert_eq!(d, vec![0, 7]);
        assert_eq!(emit_demands(&d), text);
    }
}
