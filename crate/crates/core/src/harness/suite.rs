use crate::boolfn::{
    dictator, embed_junta, majority, parity, random_function, BooleanFunction, JuntaSpec,
};
use crate::partition::{random_partition, Partition};
use crate::tradeoff::DEFAULT_RHO;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Correlation parameters exercised by the verification suite.
pub const SUITE_RHOS: [f64; 4] = [0.1, 0.3, DEFAULT_RHO, 0.7];

fn tribes(n: usize, width: usize) -> BooleanFunction {
    BooleanFunction::from_fn(n, |x| {
        (0..n / width).any(|t| {
            let mask = ((1u32 << width) - 1) << (t * width);
            x & mask == mask
        })
    })
    .expect("valid size")
}

/// Twenty named functions on at most ten variables: structured families, juntas
/// hidden among irrelevant coordinates, and seeded random tables.
pub fn reference_functions() -> Vec<(String, BooleanFunction)> {
    let mut out: Vec<(String, BooleanFunction)> = Vec::new();
    let mut push = |name: &str, f: BooleanFunction| out.push((name.to_string(), f));
    let unwrap = |r: crate::Result<BooleanFunction>| r.expect("reference function");

    push(
        "constant-plus-6",
        unwrap(BooleanFunction::constant(6, true)),
    );
    push(
        "constant-minus-3",
        unwrap(BooleanFunction::constant(3, false)),
    );
    push("dictator-5-2", unwrap(dictator(5, 2)));
    push("dictator-8-7", unwrap(dictator(8, 7)));
    push("parity-4", unwrap(parity(4, &[0, 1, 2, 3])));
    push("parity-8-of-3", unwrap(parity(8, &[1, 4, 6])));
    push(
        "parity-10",
        unwrap(parity(10, &(0..10).collect::<Vec<_>>())),
    );
    push("majority-5", unwrap(majority(5, &[0, 1, 2, 3, 4])));
    push("majority-9-of-3", unwrap(majority(9, &[0, 4, 8])));
    push(
        "majority-7",
        unwrap(majority(7, &(0..7).collect::<Vec<_>>())),
    );
    push("and-6", unwrap(BooleanFunction::from_fn(6, |x| x == 63)));
    push("or-7", unwrap(BooleanFunction::from_fn(7, |x| x != 0)));
    push("tribes-8", tribes(8, 2));
    push("tribes-9", tribes(9, 3));
    push(
        "threshold-8",
        unwrap(BooleanFunction::from_fn(8, |x| {
            let w = [5, 3, 3, 2, 1, 1, 1, 1];
            let s: i32 = (0..8)
                .map(|i| if x >> i & 1 == 1 { w[i] } else { -w[i] })
                .sum();
            s > 0
        })),
    );
    push(
        "addressing-6",
        unwrap(BooleanFunction::from_fn(6, |x| x >> (2 + (x & 3)) & 1 == 1)),
    );
    let core = unwrap(random_function(3, 17));
    push(
        "random-junta-10-of-3",
        unwrap(embed_junta(
            &JuntaSpec::new(vec![2, 5, 9], core).expect("spec"),
            10,
        )),
    );
    push("random-4", unwrap(random_function(4, 1)));
    push("random-7", unwrap(random_function(7, 2)));
    push("random-10", unwrap(random_function(10, 3)));
    out
}

/// Random partitions of `[n]` into 1, 2, 3, 5 and 7 parts, empty parts allowed,
/// followed by the partition into singletons.
pub fn reference_partitions(n: usize, seed: u64) -> Vec<Partition> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Partition> = [1, 2, 3, 5, 7]
        .iter()
        .map(|&ell| random_partition(n, ell, &mut rng).expect("valid partition"))
        .collect();
    out.push(Partition::from_assignment(n, n, (0..n).collect()).expect("singletons"));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_shape() {
        let fs = reference_functions();
        assert_eq!(fs.len(), 20);
        assert!(fs.iter().all(|(_, f)| f.n() <= 10));
        let names: std::collections::HashSet<_> = fs.iter().map(|(n, _)| n.clone()).collect();
        assert_eq!(names.len(), 20);
        assert_eq!(reference_partitions(6, 1).len(), 6);
    }
}
