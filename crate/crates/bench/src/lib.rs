//! Inputs for the mining benchmarks.

pub const BANK: &str = include_str!("../../core/fixtures/bank.kb");

/// The bank KB with `copies` extra renamed copies of its assertions.
/// Clients in the copies get a gender fact so the model count stays at four.
pub fn scaled_bank(copies: usize) -> String {
    let mut out = BANK.to_string();
    for i in 1..=copies {
        out.push('\n');
        out += &format!(
            "(fact p_woman Anna_{i})\n\
             (related isOwnerOf Anna_{i} a1_{i})\n\
             (related hasMortgage a1_{i} m1_{i})\n\
             (related relative Anna_{i} Marek_{i})\n\
             (related isOwnerOf Jan_{i} cc1_{i})\n\
             (instance CreditCard cc1_{i})\n\
             (related isOwnerOf Marek_{i} a1_{i})\n\
             (instance Account account2_{i})\n\
             (fact p_man Jan_{i})\n\
             (fact p_man Marek_{i})\n"
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use ontominer_core::{chase, clausify, parse_kb, ChaseConfig};

    #[test]
    fn scaled_kb_keeps_four_models() {
        let kb = parse_kb(&scaled_bank(3)).unwrap();
        let ms = chase(&clausify(&kb).unwrap(), &kb.abox, &ChaseConfig::default()).unwrap();
        assert_eq!(ms.models.len(), 4);
        assert_eq!(kb.individuals.len(), 4 * 7);
    }
}
