use std::io::{self, Write};

use super::resistance::ResistanceGraph;
use super::stability::StationaryDistribution;
use crate::game::JointAction;

fn label(a: &JointAction) -> String {
    a.indices()
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(" ")
}

/// One row per ordered pair of distinct diagonal states.
pub fn write_resistance_graph<W: Write>(graph: &ResistanceGraph, mut out: W) -> io::Result<()> {
    writeln!(out, "source,target,resistance,single")?;
    for (l, from) in graph.nodes().iter().enumerate() {
        for (k, to) in graph.nodes().iter().enumerate() {
            if l != k {
                writeln!(
                    out,
                    "{},{},{},{}",
                    label(from),
                    label(to),
                    graph.weight(l, k),
                    graph.is_single(l, k)
                )?;
            }
        }
    }
    Ok(())
}

pub fn write_stationary<W: Write>(dist: &StationaryDistribution, mut out: W) -> io::Result<()> {
    writeln!(out, "prev,curr,mass")?;
    for (z, m) in dist.space().states().iter().zip(dist.mass()) {
        writeln!(out, "{},{},{}", label(&z.prev), label(&z.curr), m)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{min_resistance_paths, stationary_distribution};
    use crate::toys;

    #[test]
    fn csv_shapes() {
        let game = toys::path_single_agent();
        let mut buf = Vec::new();
        write_resistance_graph(&min_resistance_paths(&game).unwrap(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 6);
        assert!(text.contains("0,1,1,true"));
        assert!(text.contains("0,2,"));

        let mut buf = Vec::new();
        write_stationary(&stationary_distribution(&game, 0.1, 0.5).unwrap(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 7);
    }
}
