mod common;

use common::random_mesh;
use hexstruct_core::mesh::{build_mesh, CellId, HexDominantMesh, RawCell};
use hexstruct_core::sheets::extract_sheets;
use hexstruct_core::synth_grid;
use proptest::prelude::*;

fn rebuild_permuted(m: &HexDominantMesh, order: &[usize]) -> HexDominantMesh {
    let cells: Vec<RawCell> = order
        .iter()
        .map(|&c| RawCell::new(m.cell_face_loops(CellId::from(c))))
        .collect();
    build_mesh(m.positions().to_vec(), &cells).unwrap()
}

fn mesh_strategy() -> impl Strategy<Value = HexDominantMesh> {
    (
        1usize..=3,
        1usize..=3,
        1usize..=2,
        prop::collection::vec((any::<u8>(), any::<usize>()), 0..3),
    )
        .prop_map(|(x, y, z, r)| random_mesh([x, y, z], &r))
}

#[test]
fn grid_2x2x2_counts() {
    let m = synth_grid(2, 2, 2).unwrap();
    assert_eq!(
        (
            m.num_vertices(),
            m.num_edges(),
            m.num_faces(),
            m.num_cells()
        ),
        (27, 54, 36, 8)
    );
    let interior: Vec<_> = m.edge_ids().filter(|&e| !m.is_boundary_edge(e)).collect();
    assert_eq!(interior.len(), 6);
    assert!(interior
        .iter()
        .all(|&e| m.edge_valence(e) == 4 && !m.is_irregular(e)));
    assert_eq!(m.num_hex_cells(), 8);
    assert!(!m.is_non_conforming());
}

#[test]
fn open_shell_is_rejected() {
    let mut cell = RawCell::hexahedron([0, 1, 2, 3, 4, 5, 6, 7]);
    cell.faces.pop();
    let pos = vec![[0.0; 3]; 8];
    assert!(build_mesh(pos, &[cell]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn adjacency_is_symmetric(m in mesh_strategy()) {
        for c in m.cell_ids() {
            for &e in &m.cell(c).edges {
                prop_assert!(m.edge_cells(e).contains(&c));
            }
            for &f in &m.cell(c).faces {
                prop_assert!(m.face_cells(f).contains(&c));
            }
        }
        for e in m.edge_ids() {
            for &c in m.edge_cells(e) {
                prop_assert!(m.cell(c).edges.contains(&e));
            }
            for &f in m.edge_faces(e) {
                prop_assert!(m.face(f).edges.contains(&e));
            }
            for v in m.edge_vertices(e) {
                prop_assert!(m.vertex_edges(v).contains(&e));
            }
        }
        for f in m.face_ids() {
            prop_assert!(matches!(m.face_cells(f).len(), 1 | 2));
            for &e in &m.face(f).edges {
                prop_assert!(m.edge_faces(e).contains(&f));
            }
        }
    }

    #[test]
    fn boundary_edges_lie_on_two_boundary_faces(m in mesh_strategy()) {
        for e in m.edge_ids().filter(|&e| m.is_boundary_edge(e)) {
            let n = m.edge_faces(e).iter().filter(|&&f| m.is_boundary_face(f)).count();
            prop_assert_eq!(n, 2);
        }
    }

    #[test]
    fn sheet_count_ignores_cell_order(m in mesh_strategy(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut order: Vec<usize> = (0..m.num_cells()).collect();
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let p = rebuild_permuted(&m, &order);
        prop_assert_eq!(p.num_hex_cells(), m.num_hex_cells());
        prop_assert_eq!(extract_sheets(&p).len(), extract_sheets(&m).len());
    }
}
