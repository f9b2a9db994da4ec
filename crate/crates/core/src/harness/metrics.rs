//! Cross-run statistics: confidence bands, complexity and activation usage.

use std::collections::BTreeMap;

use crate::activation::{Activation, Dictionary};
use crate::error::{Error, Result};
use crate::genome::{CppnGenome, NodeKind};

/// Pointwise mean and 95% half-width `1.96 s / sqrt(n)` of equal-length
/// curves, `s` being the sample standard deviation.
pub fn ci95(curves: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<f64>)> {
    if curves.len() < 2 {
        return Err(Error::CiUndefined);
    }
    let len = curves[0].len();
    if curves.iter().any(|c| c.len() != len) {
        return Err(Error::Config("curves differ in length".into()));
    }
    let n = curves.len() as f64;
    let mut mean = Vec::with_capacity(len);
    let mut half = Vec::with_capacity(len);
    for g in 0..len {
        let m = curves.iter().map(|c| c[g]).sum::<f64>() / n;
        let var = curves.iter().map(|c| (c[g] - m).powi(2)).sum::<f64>() / (n - 1.0);
        mean.push(m);
        half.push(1.96 * var.sqrt() / n.sqrt());
    }
    Ok((mean, half))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Share of hidden and output nodes using each activation, in percent.
/// Only activations that occur are listed, in dictionary order.
pub fn activation_histogram(champions: &[CppnGenome], dictionary: Dictionary) -> Result<Vec<(Activation, f64)>> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    let mut total = 0usize;
    for g in champions {
        for n in g.nodes.iter().filter(|n| n.kind != NodeKind::Input) {
            let pos = dictionary
                .members()
                .iter()
                .position(|&a| a == n.activation)
                .ok_or_else(|| Error::Config(format!("{} is not in the {dictionary} dictionary", n.activation)))?;
            *counts.entry(pos).or_default() += 1;
            total += 1;
        }
    }
    if total == 0 {
        return Err(Error::Config("no activation nodes to count".into()));
    }
    Ok(counts
        .into_iter()
        .map(|(pos, c)| (dictionary.members()[pos], 100.0 * c as f64 / total as f64))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_ci() {
        let (m, h) = ci95(&[vec![0.0, 1.0], vec![2.0, 1.0]]).unwrap();
        assert_eq!(m, vec![1.0, 1.0]);
        assert!((h[0] - 1.96).abs() < 1e-12);
        assert_eq!(h[1], 0.0);
        assert!(matches!(ci95(&[vec![1.0]]), Err(Error::CiUndefined)));
    }

    #[test]
    fn histogram_counts() {
        let mut g = CppnGenome::minimal_with(4, 1, Activation::Sine, 1.0);
        let h = activation_histogram(&[g.clone()], Dictionary::Full).unwrap();
        assert_eq!(h, vec![(Activation::Sine, 100.0)]);
        g.nodes[4].activation = Activation::Gaussian;
        let h2 = activation_histogram(&[g, CppnGenome::minimal_with(4, 1, Activation::Sine, 1.0)], Dictionary::Full)
            .unwrap();
        assert_eq!(h2.len(), 2);
        assert!(h2.iter().all(|&(_, p)| p == 50.0));
    }

    #[test]
    fn median_even_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
