use super::space::{ScenarioTree, TreeVectorRV};
use crate::error::{Error, Result};
use crate::geom::Vector;

/// Upper limit on `|K|^{#atoms}` for exhaustive enumeration.
pub const DECOMPOSABLE_GUARD: f64 = 1e6;

/// `𝒢_k`-decomposable hull of a finite family: every random vector that
/// equals some member of `family` on each level-`k` atom. On a finite space
/// the partition gluing reduces to choosing one member per atom, so the hull
/// has at most `|K|^{#atoms}` elements; duplicates are removed.
pub fn decomposable_hull(tree: &ScenarioTree, level: usize, family: &[TreeVectorRV]) -> Result<Vec<TreeVectorRV>> {
    tree.check_level(level)?;
    let k = family.len();
    if k == 0 {
        return Err(Error::MalformedInput("empty family".into()));
    }
    let atoms = tree.node_count(level);
    let count = (k as f64).powi(atoms as i32);
    if count > DECOMPOSABLE_GUARD {
        return Err(Error::GuardExceeded { count, limit: DECOMPOSABLE_GUARD });
    }
    let ranges: Vec<_> = tree.nodes(level).map(|n| tree.leaf_range(n)).collect();

    let mut out: Vec<TreeVectorRV> = Vec::new();
    let mut choice = vec![0usize; atoms];
    loop {
        let mut values: Vec<Vector> = Vec::with_capacity(tree.leaf_count());
        for (a, range) in ranges.iter().enumerate() {
            values.extend_from_slice(&family[choice[a]].values()[range.clone()]);
        }
        let rv = TreeVectorRV::new(tree, values)?;
        let dup = out.iter().any(|o| {
            o.values().iter().zip(rv.values()).all(|(x, y)| x.approx_eq(y, 1e-12))
        });
        if !dup {
            out.push(rv);
        }
        // odometer over atoms, last atom fastest
        let mut pos = atoms;
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < k {
                break;
            }
            choice[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(tree: &ScenarioTree, pts: &[(f64, f64)]) -> TreeVectorRV {
        TreeVectorRV::new(tree, pts.iter().map(|&(x, y)| Vector::xy(x, y)).collect()).unwrap()
    }

    #[test]
    fn singleton_family() {
        let t = ScenarioTree::binary(1);
        let x = rv(&t, &[(0.0, 0.0), (1.0, 1.0)]);
        assert_eq!(decomposable_hull(&t, 1, std::slice::from_ref(&x)).unwrap(), vec![x]);
    }

    #[test]
    fn two_members_two_atoms() {
        let t = ScenarioTree::binary(1);
        let x = rv(&t, &[(0.0, 0.0), (1.0, 1.0)]);
        let z = rv(&t, &[(5.0, 0.0), (2.0, 2.0)]);
        assert_eq!(decomposable_hull(&t, 1, &[x.clone(), z.clone()]).unwrap().len(), 4);
        // at the root there is one atom, so no gluing happens
        assert_eq!(decomposable_hull(&t, 0, &[x, z]).unwrap().len(), 2);
    }

    #[test]
    fn guard() {
        let t = ScenarioTree::binary(5);
        let fam: Vec<_> = (0..2).map(|i| rv(&t, &vec![(i as f64, 0.0); 32])).collect();
        assert!(matches!(decomposable_hull(&t, 5, &fam), Err(Error::GuardExceeded { .. })));
    }
}
