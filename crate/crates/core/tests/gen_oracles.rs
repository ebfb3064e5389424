mod common;

use common::edge_key;
use common::oracles::*;

#[test]
fn prescribed_tree_uniform() {
    check_prescribed_uniform(&[1, 1, 2, 2], 20_000, 1).unwrap();
}

#[test]
fn prescribed_surplus_one_uniform() {
    check_prescribed_uniform(&[1, 2, 2, 2, 3], 20_000, 256).unwrap();
}

#[test]
fn tilted_trees_on_three_vertices() {
    use blanket_lab::tree::{depth_first_walk_and_area, PlaneTree};
    // the star has area 1, the two paths area 0, so at p = 1/2 the star has mass 1/2
    let area = |e: &[(usize, usize)]| depth_first_walk_and_area(&PlaneTree::from_edge_list(3, e, 0).unwrap()).area;
    assert_eq!(area(&[(0, 1), (0, 2)]), 1);
    assert_eq!(area(&[(0, 1), (1, 2)]), 0);
    assert_eq!(edge_key([(1, 0)]), vec![(0, 1)]);
    check_tilted_three(0.5, 20_000, 1000).unwrap();
}

#[test]
fn configuration_model_simple_probability() {
    // half-edges a, b at vertex 0: simple unless a–b pair up, probability 1/3
    check_config_simple(100_000).unwrap();
}
