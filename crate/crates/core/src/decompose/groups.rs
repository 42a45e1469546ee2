use std::collections::BTreeMap;

use super::DecomposeError;

/// Splits the exponent set `f` into exactly `parts_needed` nonempty groups,
/// each inside one nonzero cell.
///
/// Starts from singletons and, while there are too many groups, merges the
/// two groups with the smallest exponents inside the lowest-indexed cell that
/// holds at least two. Groups come back ordered by cell, then by smallest
/// exponent, each listed from its highest exponent down.
pub fn split_groups(
    f: &[u64],
    cell: impl Fn(u64) -> u32,
    parts_needed: usize,
) -> Result<Vec<Vec<u64>>, DecomposeError> {
    if f.len() < parts_needed {
        return Err(DecomposeError::Infeasible(format!(
            "{} exponents cannot fill {parts_needed} groups",
            f.len()
        )));
    }
    let mut by_cell: BTreeMap<u32, Vec<Vec<u64>>> = BTreeMap::new();
    let mut sorted = f.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != f.len() {
        return Err(DecomposeError::Infeasible("repeated exponent".into()));
    }
    for &e in &sorted {
        let c = cell(e);
        if c == 0 {
            return Err(DecomposeError::Infeasible(format!("exponent {e} lies in cell 0")));
        }
        by_cell.entry(c).or_default().push(vec![e]);
    }
    let mut count = sorted.len();
    while count > parts_needed {
        let Some(groups) = by_cell.values_mut().find(|g| g.len() >= 2) else {
            return Err(DecomposeError::Infeasible(format!(
                "{count} single-cell groups cannot be merged down to {parts_needed}"
            )));
        };
        let second = groups.remove(1);
        groups[0].extend(second);
        groups[0].sort_unstable();
        // keep groups ordered by their smallest exponent
        groups.sort_by_key(|g| g[0]);
        count -= 1;
    }
    Ok(by_cell
        .into_values()
        .flatten()
        .map(|mut g| {
            g.reverse();
            g
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn forced_merge() {
        // cells 1,2,3 with cell 1 holding two exponents
        let cell = |e: u64| (e / 10) as u32;
        let g = split_groups(&[10, 11, 20, 30], cell, 3).unwrap();
        assert_eq!(g, vec![vec![11, 10], vec![20], vec![30]]);
    }

    #[test]
    fn exact_count_is_all_singletons() {
        let cell = |e: u64| (e / 10) as u32;
        let g = split_groups(&[10, 11, 20, 30], cell, 4).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(|x| x.len() == 1));
    }

    #[test]
    fn infeasible_inputs() {
        let cell = |e: u64| (e / 10) as u32;
        assert!(split_groups(&[10, 20, 30], cell, 2).is_err());
        assert!(split_groups(&[10], cell, 2).is_err());
        assert!(split_groups(&[5, 10], cell, 1).is_err());
    }

    #[test]
    fn seven_into_four() {
        let cell = |e: u64| (e / 10) as u32;
        let f = [10, 11, 12, 20, 21, 30, 31];
        let g = split_groups(&f, cell, 4).unwrap();
        assert_eq!(g.len(), 4);
    }

    proptest! {
        #[test]
        fn output_contract(f in proptest::collection::btree_set(10u64..60, 1..20), want in 1usize..8) {
            let cell = |e: u64| (e / 10) as u32;
            let f: Vec<u64> = f.into_iter().collect();
            let cells: std::collections::BTreeSet<u32> = f.iter().map(|&e| cell(e)).collect();
            match split_groups(&f, cell, want) {
                Ok(groups) => {
                    prop_assert_eq!(groups.len(), want);
                    let mut all: Vec<u64> = groups.iter().flatten().copied().collect();
                    all.sort_unstable();
                    prop_assert_eq!(&all, &f);
                    for g in &groups {
                        prop_assert!(!g.is_empty());
                        prop_assert!(g.iter().all(|&e| cell(e) == cell(g[0])));
                    }
                }
                Err(_) => prop_assert!(f.len() < want || cells.len() > want),
            }
        }
    }
}
