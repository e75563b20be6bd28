use gnp_core::asymptotics::highprec::{cancellation_bits, EdgeSource, FloatModel, FloatOptions};
use gnp_core::make_params;
use gnp_core::probability::{ComponentTable, ConnectivityTable};
use gnp_core::rug::{Float, Rational};

fn rel_err(f: &Float, exact: &Rational) -> f64 {
    let e = Float::with_val(f.prec(), exact);
    let diff = Float::with_val(f.prec(), f - &e).abs();
    (diff / e.abs()).to_f64()
}

fn model(n: u32, a: i64, b: i64, bits: u32) -> FloatModel {
    let params = make_params(n, a, b).unwrap();
    let opts = FloatOptions { output_bits: bits, s_max: 2, j_max: 3 };
    FloatModel::build(n, &EdgeSource::Exact(params.p().clone()), opts).unwrap()
}

// p = 1/n makes p_n astronomically small while the recursion cancels ~0.64 n bits
#[test]
fn sparse_connectivity_keeps_requested_precision() {
    let n = 300;
    let exact = ConnectivityTable::build(&make_params(n, 1, n as i64).unwrap());
    let float = model(n, 1, n as i64, 64);
    for m in (10..=n).step_by(10) {
        let err = rel_err(float.connected(m), exact.probability(m).value());
        assert!(err < 1e-17, "m={m} err={err:e}");
    }
}

#[test]
fn sparse_moments_and_pmf_keep_requested_precision() {
    let n = 90;
    let exact = ComponentTable::build(&make_params(n, 1, n as i64).unwrap());
    let float = model(n, 1, n as i64, 64);
    for m in [30, 60, 90] {
        for s in 1..=2 {
            let err = rel_err(float.shifted_moment(m, s), &exact.shifted_moment(m, s));
            assert!(err < 1e-17, "m={m} s={s} err={err:e}");
        }
        for j in 1..=3 {
            let err = rel_err(float.component_prob(m, j), exact.probability(m, j).value());
            assert!(err < 1e-17, "m={m} j={j} err={err:e}");
        }
    }
}

#[test]
fn dense_graphs_need_few_guard_bits() {
    assert!(cancellation_bits(800, (-0.5f64).ln_1p()) < 16);
}
