mod common;

macro_rules! suite {
    ($($name:ident),* $(,)?) => {
        $(
            #[test]
            fn $name() {
                if let Err(e) = common::$name(common::CASES) {
                    panic!("{e}");
                }
            }
        )*
    };
}

suite!(
    cyclic_product_invariance,
    cyclic_product_identities,
    dual_via_s_matches_solver,
    dual_index_matches_det,
    root_sublattice_generators_vs_all_lines,
    star_formula_vs_direct,
    unit_edge_equalities,
    cocycle_law,
    cocycle_power,
    h1_order_is_dual_index,
    coboundaries_are_well_defined,
    affine_group_law,
    mirror_point_fixed,
    modular_reduction,
);
