use alloc::vec;
use alloc::vec::Vec;

use crate::SUPPORT_EPS;

/// Huffman codeword lengths. The two lightest subtrees merge first; equal
/// weights go to the subtree holding the smaller symbol index. Symbols with
/// no mass get length 0, and so does a lone symbol.
pub fn huffman_lengths(probs: &[f64]) -> Vec<u32> {
    let mut lengths = vec![0u32; probs.len()];
    // (weight, smallest symbol, members)
    let mut nodes: Vec<(f64, usize, Vec<usize>)> = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > SUPPORT_EPS)
        .map(|(i, &p)| (p, i, vec![i]))
        .collect();
    while nodes.len() > 1 {
        let a = take_lightest(&mut nodes);
        let b = take_lightest(&mut nodes);
        let mut members = a.2;
        members.extend(b.2);
        for &m in &members {
            lengths[m] += 1;
        }
        nodes.push((a.0 + b.0, a.1.min(b.1), members));
    }
    lengths
}

fn take_lightest(nodes: &mut Vec<(f64, usize, Vec<usize>)>) -> (f64, usize, Vec<usize>) {
    let mut best = 0;
    for (i, n) in nodes.iter().enumerate().skip(1) {
        let b = &nodes[best];
        if n.0 < b.0 || (n.0 == b.0 && n.1 < b.1) {
            best = i;
        }
    }
    nodes.swap_remove(best)
}

/// `sum p_i * len_i` for the code of [`huffman_lengths`].
pub fn huffman_expected_length(probs: &[f64]) -> f64 {
    huffman_lengths(probs).iter().zip(probs).map(|(&l, &p)| l as f64 * p).sum()
}
