//! Text renderings of mining results: pattern list, counters, GraphML trie
//! and the mode comparison table.

use std::fmt::Write;

use num_rational::Ratio;

use crate::miner::{atom_to_string, format_ratio, MiningResult, Mode, RunStats, Trie};

/// One line per pattern: `support<TAB>Q(key) :- atoms`.
pub fn patterns_txt(result: &MiningResult) -> String {
    let mut out = String::new();
    for (p, s) in result.patterns() {
        writeln!(out, "{}\t{}", format_ratio(&s), p).expect("write to String");
    }
    out
}

/// Per-depth counters and a total row; the runtime column is optional
/// because it is the only non-deterministic value.
pub fn stats_csv(stats: &RunStats, record_runtime: bool) -> String {
    let mut out = String::from("depth,gen,sat,sfree,cand,freq");
    if record_runtime {
        out.push_str(",runtime_seconds");
    }
    out.push('\n');
    let mut total = [0usize; 5];
    for (i, d) in stats.per_depth.iter().enumerate() {
        let row = [d.gen, d.sat, d.sfree, d.cand, d.freq];
        for (t, v) in total.iter_mut().zip(row) {
            *t += v;
        }
        write!(out, "{},{},{},{},{},{}", i + 1, d.gen, d.sat, d.sfree, d.cand, d.freq).expect("write to String");
        if record_runtime {
            out.push(',');
        }
        out.push('\n');
    }
    write!(out, "total,{},{},{},{},{}", total[0], total[1], total[2], total[3], total[4]).expect("write to String");
    if record_runtime {
        write!(out, ",{:.6}", stats.runtime.as_secs_f64()).expect("write to String");
    }
    out.push('\n');
    out
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// The trie as a directed GraphML graph. Node atoms use the variable names
/// of the canonical form of their pattern.
pub fn trie_graphml(trie: &Trie) -> String {
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str(
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\" \
         xmlns:xsi=\"http://www.w3.org/2001/XMLSchema-instance\" \
         xsi:schemaLocation=\"http://graphml.graphdrawing.org/xmlns \
         http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd\">\n",
    );
    out.push_str("  <key id=\"atom\" for=\"node\" attr.name=\"atom\" attr.type=\"string\"/>\n");
    out.push_str("  <key id=\"support\" for=\"node\" attr.name=\"support\" attr.type=\"double\"/>\n");
    out.push_str("  <key id=\"depth\" for=\"node\" attr.name=\"depth\" attr.type=\"int\"/>\n");
    out.push_str("  <graph id=\"trie\" edgedefault=\"directed\">\n");
    for n in trie.preorder() {
        let node = trie.node(n);
        let pattern = trie.pattern(n).canonical();
        let atom = atom_to_string(pattern.atoms.last().expect("non-empty pattern"));
        writeln!(
            out,
            "    <node id=\"n{n}\">\n      <data key=\"atom\">{}</data>\n      <data key=\"support\">{}</data>\n      <data key=\"depth\">{}</data>\n    </node>",
            xml_escape(&atom),
            format_ratio(&node.support),
            node.depth
        )
        .expect("write to String");
    }
    for (i, (p, c)) in trie.edges().into_iter().enumerate() {
        writeln!(out, "    <edge id=\"e{i}\" source=\"n{p}\" target=\"n{c}\"/>").expect("write to String");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

fn reduction(nosem: usize, sem: usize) -> String {
    match (nosem, sem) {
        (0, 0) => format_ratio(&Ratio::from_integer(1)),
        (_, 0) => "inf".to_string(),
        (n, s) => format_ratio(&Ratio::new(n, s)),
    }
}

/// Candidate and frequent counts per depth for each mode, with the
/// NOSEM/SEM reduction ratios.
pub fn compare_csv(runs: &[(Mode, &RunStats)]) -> String {
    let get = |m: Mode| runs.iter().find(|(mode, _)| *mode == m).map(|(_, s)| *s);
    let depth = runs.iter().map(|(_, s)| s.per_depth.len()).max().unwrap_or(0);
    let mut out = String::from("depth");
    for (m, _) in runs {
        write!(out, ",cand_{m},freq_{m}").expect("write to String");
    }
    let ratios = get(Mode::Sem).is_some() && get(Mode::NoSem).is_some();
    if ratios {
        out.push_str(",reduction_cand,reduction_freq");
    }
    out.push('\n');
    for d in 0..depth {
        write!(out, "{}", d + 1).expect("write to String");
        for (_, s) in runs {
            let c = s.per_depth.get(d).copied().unwrap_or_default();
            write!(out, ",{},{}", c.cand, c.freq).expect("write to String");
        }
        if let (Some(sem), Some(nosem)) = (get(Mode::Sem), get(Mode::NoSem)) {
            let a = sem.per_depth.get(d).copied().unwrap_or_default();
            let b = nosem.per_depth.get(d).copied().unwrap_or_default();
            write!(out, ",{},{}", reduction(b.cand, a.cand), reduction(b.freq, a.freq)).expect("write to String");
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::miner::DepthStats;

    fn stats(rows: &[[usize; 5]]) -> RunStats {
        RunStats {
            per_depth: rows
                .iter()
                .map(|r| DepthStats {
                    gen: r[0],
                    sat: r[1],
                    sfree: r[2],
                    cand: r[3],
                    freq: r[4],
                })
                .collect(),
            ..Default::default()
        }
    }

    #[test]
    fn stats_without_runtime() {
        let s = stats(&[[1, 1, 1, 1, 1], [10, 8, 6, 5, 3]]);
        assert_eq!(
            stats_csv(&s, false),
            "depth,gen,sat,sfree,cand,freq\n1,1,1,1,1,1\n2,10,8,6,5,3\ntotal,11,9,7,6,4\n"
        );
        assert!(stats_csv(&s, true).starts_with("depth,gen,sat,sfree,cand,freq,runtime_seconds\n1,1,1,1,1,1,\n"));
    }

    #[test]
    fn comparison_ratios() {
        let sem = stats(&[[1, 1, 1, 1, 1], [10, 8, 6, 4, 2]]);
        let nosem = stats(&[[1, 1, 1, 1, 1], [10, 10, 10, 10, 3]]);
        let csv = compare_csv(&[(Mode::Sem, &sem), (Mode::NoSem, &nosem)]);
        assert_eq!(
            csv,
            "depth,cand_sem,freq_sem,cand_nosem,freq_nosem,reduction_cand,reduction_freq\n\
             1,1,1,1,1,1.000000,1.000000\n\
             2,4,2,10,3,2.500000,1.500000\n"
        );
    }

    #[test]
    fn escaping() {
        assert_eq!(xml_escape("a<b>&\"'"), "a&lt;b&gt;&amp;&quot;&apos;");
    }
}
