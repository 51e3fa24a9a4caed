mod common;

use std::collections::BTreeSet;

use common::{brute_classify, closure_classes, random_mesh};
use hexstruct_core::mesh::{EdgeId, HexDominantMesh};
use hexstruct_core::sheets::{classified, decompose_sheet, extract_sheets};
use hexstruct_core::synth::fixtures;
use proptest::prelude::*;

fn mesh_strategy() -> impl Strategy<Value = HexDominantMesh> {
    (
        1usize..=3,
        1usize..=3,
        1usize..=3,
        prop::collection::vec((any::<u8>(), any::<usize>()), 0..4),
    )
        .prop_map(|(x, y, z, r)| random_mesh([x, y, z], &r))
}

fn edge_sets(m: &HexDominantMesh) -> BTreeSet<BTreeSet<EdgeId>> {
    extract_sheets(m)
        .into_iter()
        .map(|s| s.parallel_edges.into_iter().collect())
        .collect()
}

fn check_sheets(m: &HexDominantMesh) -> Result<(), TestCaseError> {
    prop_assert_eq!(edge_sets(m), closure_classes(m));
    let sheets = extract_sheets(m);
    let mut cover = vec![0usize; m.num_cells()];
    for (i, raw) in sheets.iter().enumerate() {
        let s = classified(m, raw);
        for &c in &s.cells {
            cover[c.index()] += 1;
        }
        let o = brute_classify(m, &s.parallel_edges);
        prop_assert!(o.matches(&s.flags), "sheet {}: {:?} vs {:?}", i, o, s.flags);
        for sub in decompose_sheet(m, i, &s) {
            prop_assert_eq!(sub.parent, i);
            prop_assert!(!sub.parallel_edges.is_empty());
            prop_assert!(!brute_classify(m, &sub.parallel_edges).t3);
            let parent: BTreeSet<_> = s.parallel_edges.iter().collect();
            prop_assert!(sub.parallel_edges.iter().all(|e| parent.contains(e)));
        }
    }
    for c in m.cell_ids() {
        if m.is_hex(c) {
            prop_assert!(
                (1..=3).contains(&cover[c.index()]),
                "hex covered {} times",
                cover[c.index()]
            );
        }
    }
    Ok(())
}

#[test]
fn fixtures_agree_with_oracles() {
    for (_, m) in fixtures::all() {
        if m.num_cells() <= 200 {
            check_sheets(&m).unwrap();
        }
    }
}

#[test]
fn self_intersecting_splits_into_two_perfect_subsheets() {
    let m = fixtures::self_intersecting();
    let sheets: Vec<_> = extract_sheets(&m)
        .iter()
        .map(|s| classified(&m, s))
        .collect();
    let (i, t3) = sheets.iter().enumerate().find(|(_, s)| s.flags.t3).unwrap();
    let subs = decompose_sheet(&m, i, t3);
    assert_eq!(subs.len(), 2);
    assert!(subs.iter().all(|s| s.flags.perfect));
}

#[test]
fn grid_sheets_are_perfect_slabs() {
    let m = hexstruct_core::synth_grid(4, 3, 2).unwrap();
    let sheets = extract_sheets(&m);
    assert_eq!(sheets.len(), 4 + 3 + 2);
    for s in &sheets {
        let s = classified(&m, s);
        assert!(s.flags.perfect);
        assert!(s.unmatched_vertices.is_empty());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_meshes_agree_with_oracles(m in mesh_strategy()) {
        check_sheets(&m)?;
    }
}
