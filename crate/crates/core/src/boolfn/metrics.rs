use super::{BooleanFunction, JuntaSpec};
use crate::bits::{for_each_combination, pext32};
use crate::error::{JuntaError, Result};
use crate::Fraction;

/// Largest number of variable placements `isomorphism_distance` will enumerate.
pub const ISO_ENUMERATION_CAP: u64 = 40_320;

/// Normalized Hamming distance, exact.
pub fn distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<Fraction> {
    if f.n() != g.n() {
        return Err(JuntaError::DimensionMismatch {
            left: f.n(),
            right: g.n(),
        });
    }
    let diff: u64 = f
        .words()
        .iter()
        .zip(g.words())
        .map(|(a, b)| (a ^ b).count_ones() as u64)
        .sum();
    Ok(Fraction::new(diff, f.size() as u64))
}

/// Result of the brute-force distance-to-junta computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JuntaDistance {
    pub distance: Fraction,
    pub witness: Vec<usize>,
    pub closest: JuntaSpec,
}

/// Exact distance from `f` to the class of `k`-juntas, with the closest junta.
///
/// Within a cofactor the plurality value is used, a tie going to `+1`. Among
/// equally close juntas the one whose truth table is lexicographically first is
/// returned, where tables are read in point order and `+1` sorts before `−1`.
pub fn distance_to_junta(f: &BooleanFunction, k: usize) -> Result<JuntaDistance> {
    let n = f.n();
    if k > n {
        return Err(JuntaError::InvalidParameter(format!(
            "k = {k} exceeds n = {n}"
        )));
    }
    let mut best: Option<(u64, Vec<usize>, BooleanFunction)> = None;
    let mut plus = vec![0u32; 1 << k];
    for_each_combination(n, k, |set| {
        let mask = set.iter().fold(0u32, |m, &i| m | 1 << i);
        plus.iter_mut().for_each(|c| *c = 0);
        for x in 0..f.size() as u32 {
            if f.bit(x) {
                plus[pext32(x, mask) as usize] += 1;
            }
        }
        let cofactor = 1u32 << (n - k);
        let mut err = 0u64;
        for &p in &plus {
            err += if 2 * p >= cofactor {
                (cofactor - p) as u64
            } else {
                p as u64
            };
        }
        let better = match &best {
            None => true,
            Some((e, _, _)) if err < *e => true,
            Some((e, _, table)) if err == *e => {
                let candidate = junta_table(n, mask, &plus, cofactor);
                lex_before(&candidate, table)
            }
            _ => false,
        };
        if better {
            best = Some((err, set.to_vec(), junta_table(n, mask, &plus, cofactor)));
        }
        true
    });
    let (err, witness, _) = best.expect("at least one coordinate set exists");
    let cofactor = 1u32 << (n - k);
    let mask = witness.iter().fold(0u32, |m, &i| m | 1 << i);
    plus.iter_mut().for_each(|c| *c = 0);
    for x in 0..f.size() as u32 {
        if f.bit(x) {
            plus[pext32(x, mask) as usize] += 1;
        }
    }
    let core = BooleanFunction::from_fn(k, |c| 2 * plus[c as usize] >= cofactor)?;
    Ok(JuntaDistance {
        distance: Fraction::new(err, f.size() as u64),
        closest: JuntaSpec::new(witness.clone(), core)?,
        witness,
    })
}

fn junta_table(n: usize, mask: u32, plus: &[u32], cofactor: u32) -> BooleanFunction {
    BooleanFunction::from_fn(n, |x| 2 * plus[pext32(x, mask) as usize] >= cofactor)
        .expect("n already validated")
}

/// `a` precedes `b` when, at the first point where they differ, `a` is `+1`.
fn lex_before(a: &BooleanFunction, b: &BooleanFunction) -> bool {
    for (wa, wb) in a.words().iter().zip(b.words()) {
        let d = wa ^ wb;
        if d != 0 {
            return wa >> d.trailing_zeros() & 1 == 1;
        }
    }
    false
}

/// `min_π dist(f, g∘π)` over all coordinate permutations.
///
/// Only the placement of `g`'s relevant coordinates matters, so the search runs over
/// injective placements of those coordinates. This covers every `n <= 8` and also
/// larger `n` when `g` depends on few coordinates; beyond
/// [`ISO_ENUMERATION_CAP`] placements the call fails.
pub fn isomorphism_distance(f: &BooleanFunction, g: &BooleanFunction) -> Result<Fraction> {
    let n = f.n();
    if n != g.n() {
        return Err(JuntaError::DimensionMismatch {
            left: n,
            right: g.n(),
        });
    }
    let relevant = g.relevant_variables();
    let r = relevant.len();
    let placements = (0..r).try_fold(1u64, |acc, i| acc.checked_mul((n - i) as u64));
    if placements.map_or(true, |p| p > ISO_ENUMERATION_CAP) {
        return Err(JuntaError::DimensionTooLarge { n, limit: 8 });
    }
    let rmask = relevant.iter().fold(0u32, |m, &i| m | 1 << i);
    let core = BooleanFunction::from_fn(r, |c| g.bit(crate::bits::pdep32(c, rmask)))?;

    let mut best = u64::MAX;
    let mut image = vec![0usize; r];
    let mut used = vec![false; n];
    place(0, r, n, &mut image, &mut used, &mut |image| {
        let mut diff = 0u64;
        for x in 0..f.size() as u32 {
            let mut c = 0u32;
            for (j, &p) in image.iter().enumerate() {
                c |= (x >> p & 1) << j;
            }
            diff += (f.bit(x) != core.bit(c)) as u64;
            if diff >= best {
                return;
            }
        }
        best = diff;
    });
    Ok(Fraction::new(best, f.size() as u64))
}

fn place(
    depth: usize,
    r: usize,
    n: usize,
    image: &mut Vec<usize>,
    used: &mut Vec<bool>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if depth == r {
        visit(image);
        return;
    }
    for p in 0..n {
        if !used[p] {
            used[p] = true;
            image[depth] = p;
            place(depth + 1, r, n, image, used, visit);
            used[p] = false;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{dictator, majority, parity, random_function};

    #[test]
    fn distance_examples() {
        let f = random_function(6, 9).unwrap();
        assert_eq!(distance(&f, &f).unwrap(), Fraction::from_integer(0));
        assert_eq!(
            distance(&f, &f.negate()).unwrap(),
            Fraction::from_integer(1)
        );
        let maj = majority(3, &[0, 1, 2]).unwrap();
        let d = dictator(3, 0).unwrap();
        assert_eq!(distance(&maj, &d).unwrap(), Fraction::new(1, 4));
        assert!(distance(&maj, &dictator(4, 0).unwrap()).is_err());
    }

    #[test]
    fn junta_distance_examples() {
        let p = parity(6, &[0, 1, 2, 3, 4, 5]).unwrap();
        for k in 0..6 {
            assert_eq!(
                distance_to_junta(&p, k).unwrap().distance,
                Fraction::new(1, 2)
            );
        }
        assert_eq!(
            distance_to_junta(&p, 6).unwrap().distance,
            Fraction::from_integer(0)
        );
        let maj = majority(3, &[0, 1, 2]).unwrap();
        let jd = distance_to_junta(&maj, 1).unwrap();
        assert_eq!(jd.distance, Fraction::new(1, 4));
        assert_eq!(jd.witness, vec![0]);
    }

    #[test]
    fn lexicographic_tie_break_prefers_plus() {
        // every 0-junta is 1/2-far from a balanced dictator; +1 comes first
        let d = dictator(2, 1).unwrap();
        let jd = distance_to_junta(&d, 0).unwrap();
        assert_eq!(jd.distance, Fraction::new(1, 2));
        assert_eq!(jd.closest.core().value(0), 1);
    }

    #[test]
    fn iso_distance_by_brute_force_over_s3() {
        let p = parity(3, &[0, 1, 2]).unwrap();
        let m = majority(3, &[0, 1, 2]).unwrap();
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let brute = perms
            .iter()
            .map(|pi| distance(&p, &m.permute(pi).unwrap()).unwrap())
            .min()
            .unwrap();
        assert_eq!(isomorphism_distance(&p, &m).unwrap(), brute);
        let d1 = dictator(2, 0).unwrap();
        let d2 = dictator(2, 1).unwrap();
        assert_eq!(
            isomorphism_distance(&d1, &d2).unwrap(),
            Fraction::from_integer(0)
        );
    }

    #[test]
    fn iso_distance_rejects_large_dense_inputs() {
        let f = random_function(9, 1).unwrap();
        assert!(matches!(
            isomorphism_distance(&f, &f),
            Err(JuntaError::DimensionTooLarge { .. })
        ));
    }
}
