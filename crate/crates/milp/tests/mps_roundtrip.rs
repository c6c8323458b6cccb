use std::ffi::CString;

use pgplan_milp::mps::{parse_mps, to_mps_string};
use pgplan_milp::{HighsSolver, LinExpr, MilpModel, Sense, SolveStatus, SolverAdapter, VarKind};
use proptest::prelude::*;

#[derive(Debug, Clone)]
struct Spec {
    vars: Vec<(u8, f64, f64, f64)>,
    rows: Vec<(Vec<(usize, f64)>, u8, f64)>,
    offset: f64,
}

fn coef() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-1000i32..1000).prop_map(f64::from),
        -1e6f64..1e6,
        Just(1.0 / 3.0),
        Just(-2.5e-7),
    ]
}

fn model_spec() -> impl Strategy<Value = Spec> {
    let var = (0u8..3, -50i32..50, 0i32..100, coef())
        .prop_map(|(k, lo, w, c)| (k, f64::from(lo), f64::from(lo + w), c));
    (prop::collection::vec(var, 1..12), coef()).prop_flat_map(|(vars, offset)| {
        let n = vars.len();
        let row = (
            prop::collection::vec((0..n, coef()), 1..6),
            0u8..3,
            coef(),
        );
        prop::collection::vec(row, 0..10).prop_map(move |rows| Spec {
            vars: vars.clone(),
            rows,
            offset,
        })
    })
}

fn build(s: &Spec) -> MilpModel {
    let mut m = MilpModel::new("prop");
    let ids: Vec<_> = s
        .vars
        .iter()
        .enumerate()
        .map(|(i, &(k, lo, hi, c))| {
            let kind = [VarKind::Continuous, VarKind::Integer, VarKind::Binary][k as usize];
            let (lo, hi) = if kind == VarKind::Binary { (0.0, 1.0) } else { (lo, hi) };
            let id = m.add_var(format!("v[{i}]"), kind, lo, hi).unwrap();
            m.add_objective_term(id, c).unwrap();
            id
        })
        .collect();
    for (r, (terms, sense, rhs)) in s.rows.iter().enumerate() {
        let mut e = LinExpr::new();
        for &(j, a) in terms {
            e.add(ids[j], a);
        }
        let sense = [Sense::Le, Sense::Eq, Sense::Ge][*sense as usize];
        m.add_constraint(format!("r{r:03}"), e, sense, *rhs).unwrap();
    }
    m.add_objective_offset(s.offset).unwrap();
    m
}

proptest! {
    #[test]
    fn emit_parse_emit_is_identical(s in model_spec()) {
        let m = build(&s);
        let text = to_mps_string(&m);
        let back = parse_mps(&text).unwrap();
        prop_assert_eq!(to_mps_string(&back), text);
        prop_assert_eq!(back.num_vars(), m.num_vars());
        prop_assert_eq!(back.num_constraints(), m.num_constraints());
        prop_assert_eq!(back.num_integer_vars(), m.num_integer_vars());
        prop_assert_eq!(back.objective_offset(), m.objective_offset());
    }
}

struct RawHighs(*mut std::ffi::c_void);

impl Drop for RawHighs {
    fn drop(&mut self) {
        unsafe { highs_sys::Highs_destroy(self.0) }
    }
}

/// Loads an MPS file with the HiGHS reader and returns (cols, rows, nnz, objective).
fn solve_with_highs_reader(path: &std::path::Path) -> (i64, i64, i64, i32, f64) {
    let h = RawHighs(unsafe { highs_sys::Highs_create() });
    let file = CString::new(path.to_str().unwrap()).unwrap();
    let quiet = CString::new("output_flag").unwrap();
    let gap = CString::new("mip_rel_gap").unwrap();
    unsafe {
        highs_sys::Highs_setBoolOptionValue(h.0, quiet.as_ptr(), 0);
        highs_sys::Highs_setDoubleOptionValue(h.0, gap.as_ptr(), 1e-9);
        assert_eq!(highs_sys::Highs_readModel(h.0, file.as_ptr()), 0);
        let cols = highs_sys::Highs_getNumCol(h.0) as i64;
        let rows = highs_sys::Highs_getNumRow(h.0) as i64;
        let nnz = highs_sys::Highs_getNumNz(h.0) as i64;
        highs_sys::Highs_run(h.0);
        let status = highs_sys::Highs_getModelStatus(h.0) as i32;
        (cols, rows, nnz, status, highs_sys::Highs_getObjectiveValue(h.0))
    }
}

#[test]
fn third_party_reader_agrees() {
    let mut m = MilpModel::new("interop");
    let x = m.add_var("x", VarKind::Continuous, 0.0, 10.0).unwrap();
    let y = m.add_var("y[n1][t0001]", VarKind::Integer, 0.0, 8.0).unwrap();
    let z = m.add_var("z", VarKind::Binary, 0.0, 1.0).unwrap();
    let f = m.add_var("f", VarKind::Continuous, f64::NEG_INFINITY, f64::INFINITY).unwrap();
    let mut e = LinExpr::new();
    e.add(x, 1.0).add(y, 2.0).add(z, 3.0);
    m.add_constraint("cap", e, Sense::Le, 14.5).unwrap();
    let mut e = LinExpr::new();
    e.add(f, 1.0).add(x, -1.0);
    m.add_constraint("link", e, Sense::Eq, -2.0).unwrap();
    let mut e = LinExpr::new();
    e.add(f, 1.0);
    m.add_constraint("floor", e, Sense::Ge, -1.5).unwrap();
    m.add_objective_term(x, -1.0).unwrap();
    m.add_objective_term(y, -1.5).unwrap();
    m.add_objective_term(z, -2.0).unwrap();
    m.add_objective_term(f, 0.25).unwrap();
    m.add_objective_offset(7.0).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("interop.mps");
    std::fs::write(&path, to_mps_string(&m)).unwrap();
    let (cols, rows, nnz, status, obj) = solve_with_highs_reader(&path);
    assert_eq!((cols, rows, nnz), (4, 3, 6));
    assert_eq!(status, highs_sys::MODEL_STATUS_OPTIMAL as i32);

    let ours = HighsSolver::with_gap(1e-9).solve(&m).unwrap();
    assert_eq!(ours.status, SolveStatus::Optimal);
    assert!((ours.objective.unwrap() - obj).abs() < 1e-7, "{} vs {obj}", ours.objective.unwrap());
}
