use super::SetFunction;
use crate::bits::BitSet;
use crate::scalar::Scalar;

/// Coordinates sorted by decreasing value, ties broken by increasing index.
pub fn sorted_order<S: Scalar>(x: &[S]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| {
        x[b].partial_cmp(&x[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Marginals `g([i]) − g([i−1])` along the sorted prefixes of `x`, indexed by the
/// original coordinate.
pub fn lovasz_subgradient<S: Scalar, G: SetFunction<S> + ?Sized>(g: &G, x: &[S]) -> Vec<S> {
    let order = sorted_order(x);
    let mut prefix = BitSet::new(x.len());
    let mut prev = g.value(&prefix);
    let mut a = vec![S::zero(); x.len()];
    for &i in &order {
        prefix.insert(i);
        let cur = g.value(&prefix);
        a[i] = cur - prev;
        prev = cur;
    }
    a
}

/// `L_g(x) = g(∅) + Σ_i (g([i]) − g([i−1]))·x_{σ(i)}` for the decreasing order `σ`.
///
/// This equals `E_{t∼U[0,1]} g({i : x_i ≥ t})`, so `L_g(1_S) = g(S)`.
pub fn lovasz_value<S: Scalar, G: SetFunction<S> + ?Sized>(g: &G, x: &[S]) -> S {
    let empty = g.value(&BitSet::new(x.len()));
    lovasz_subgradient(g, x)
        .iter()
        .zip(x)
        .fold(empty, |acc, (&a, &xi)| acc + a * xi)
}

/// The level sets `{i : x_i ≥ t}` that occur as `t` sweeps `[0, 1]`, including `∅`
/// and the sorted prefixes.
pub fn lovasz_level_sets<S: Scalar>(x: &[S]) -> Vec<BitSet> {
    let order = sorted_order(x);
    let mut prefix = BitSet::new(x.len());
    let mut sets = vec![prefix.clone()];
    for &i in &order {
        prefix.insert(i);
        sets.push(prefix.clone());
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sfm::FnSetFunction;

    #[test]
    fn modular_function_telescopes() {
        let g = FnSetFunction::new(4, |s: &BitSet| s.count() as f64);
        let x = [0.3, 0.9, 0.0, 0.5];
        assert!((lovasz_value(&g, &x) - 1.7).abs() < 1e-12);
    }

    #[test]
    fn vertices_agree() {
        let g = FnSetFunction::new(3, |s: &BitSet| 1.0 + (s.count() as f64).sqrt());
        for mask in 0..8u64 {
            let set = BitSet::from_mask(3, mask);
            let x: Vec<f64> = (0..3)
                .map(|i| if set.contains(i) { 1.0 } else { 0.0 })
                .collect();
            assert!((lovasz_value(&g, &x) - g.value(&set)).abs() < 1e-12);
        }
    }

    #[test]
    fn ties_break_by_index() {
        assert_eq!(sorted_order(&[0.5f64, 0.5, 0.9, 0.1]), vec![2, 0, 1, 3]);
    }
}
