//! One op per line:
//!
//! ```text
//! # trace v1 qubits=<n> t2_us=<t2> makespan_us=<makespan>
//! # kind location qubits start duration infidelity raw_pairs gate
//! split m0.q1.t0 3 0 380 0 0 7
//! ```
//!
//! `qubits` is a comma list or `-`, `gate` an index or `-`. Floats use the
//! shortest representation that parses back to the same value.

use std::fmt::Write as _;

use super::{Location, OpKind, PhysicalOp, SimError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceHeader {
    pub qubits: usize,
    pub t2_us: f64,
    pub makespan_us: f64,
}

pub fn write_trace(header: &TraceHeader, ops: &[PhysicalOp]) -> String {
    let mut out = format!(
        "# trace v1 qubits={} t2_us={:?} makespan_us={:?}\n# kind location qubits start duration infidelity raw_pairs gate\n",
        header.qubits, header.t2_us, header.makespan_us
    );
    for op in ops {
        let qubits = if op.qubits.is_empty() {
            "-".to_string()
        } else {
            op.qubits.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
        };
        let gate = op.gate.map_or("-".to_string(), |g| g.to_string());
        writeln!(
            out,
            "{} {} {} {:?} {:?} {:?} {} {}",
            op.kind, op.location, qubits, op.start_us, op.duration_us, op.infidelity, op.raw_pairs, gate
        )
        .unwrap();
    }
    out
}

pub fn parse_trace(text: &str) -> Result<(TraceHeader, Vec<PhysicalOp>), SimError> {
    let err = |line: usize, message: String| SimError::Trace { line, message };
    let mut header = None;
    let mut ops = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("# trace v1 ") {
            let mut qubits = None;
            let mut t2 = None;
            let mut makespan = None;
            for field in rest.split_whitespace() {
                let (k, v) = field
                    .split_once('=')
                    .ok_or_else(|| err(line_no, format!("bad header field `{field}`")))?;
                let bad = |_| err(line_no, format!("bad value for {k}"));
                match k {
                    "qubits" => qubits = Some(v.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                    "t2_us" => t2 = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                    "makespan_us" => makespan = Some(v.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                    _ => return Err(err(line_no, format!("unknown header field `{k}`"))),
                }
            }
            match (qubits, t2, makespan) {
                (Some(qubits), Some(t2_us), Some(makespan_us)) => {
                    header = Some(TraceHeader {
                        qubits,
                        t2_us,
                        makespan_us,
                    })
                }
                _ => return Err(err(line_no, "incomplete header".into())),
            }
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split_whitespace().collect();
        let [kind, location, qubits, start, duration, infidelity, raw_pairs, gate] = cols[..] else {
            return Err(err(line_no, format!("expected 8 columns, found {}", cols.len())));
        };
        let num = |s: &str, what: &str| -> Result<f64, SimError> {
            s.parse::<f64>().map_err(|_| err(line_no, format!("bad {what} `{s}`")))
        };
        let qubits = if qubits == "-" {
            Vec::new()
        } else {
            qubits
                .split(',')
                .map(|q| q.parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|_| err(line_no, format!("bad qubit list `{qubits}`")))?
        };
        ops.push(PhysicalOp {
            kind: kind.parse::<OpKind>().map_err(|m| err(line_no, m))?,
            location: location.parse::<Location>().map_err(|m| err(line_no, m))?,
            qubits,
            start_us: num(start, "start")?,
            duration_us: num(duration, "duration")?,
            infidelity: num(infidelity, "infidelity")?,
            raw_pairs: raw_pairs
                .parse()
                .map_err(|_| err(line_no, format!("bad raw pair count `{raw_pairs}`")))?,
            gate: if gate == "-" {
                None
            } else {
                Some(gate.parse().map_err(|_| err(line_no, format!("bad gate `{gate}`")))?)
            },
        });
    }
    let header = header.ok_or_else(|| err(1, "missing `# trace v1` header".into()))?;
    Ok((header, ops))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let ops = vec![
            PhysicalOp {
                kind: OpKind::Entangle,
                location: Location::Switch {
                    switch: 2,
                    from: 0,
                    to: 1,
                },
                qubits: vec![],
                start_us: 0.1 + 0.2,
                duration_us: 2_476.666_666_666_667,
                infidelity: 0.007000000000000006,
                raw_pairs: 8,
                gate: Some(3),
            },
            PhysicalOp {
                kind: OpKind::Gate2,
                location: Location::Trap {
                    module: 1,
                    qccd: 0,
                    trap: 1,
                },
                qubits: vec![4, 9],
                start_us: 1e-7,
                duration_us: 100.0,
                infidelity: 8e-4,
                raw_pairs: 0,
                gate: None,
            },
        ];
        let header = TraceHeader {
            qubits: 10,
            t2_us: 1e8,
            makespan_us: 2477.0,
        };
        let text = write_trace(&header, &ops);
        let (h, back) = parse_trace(&text).unwrap();
        assert_eq!(h, header);
        assert_eq!(back, ops);
    }

    #[test]
    fn malformed_lines() {
        assert!(parse_trace("gate2 m0.q0.t0 1 0 1 0 0 -\n").is_err());
        let head = "# trace v1 qubits=1 t2_us=1.0 makespan_us=0.0\n";
        assert!(parse_trace(&format!("{head}gate2 m0.q0.t0 1 0 1\n")).is_err());
        assert!(parse_trace(&format!("{head}warp m0.q0.t0 1 0 1 0 0 -\n")).is_err());
        assert!(parse_trace(head).unwrap().1.is_empty());
    }
}
