use ramp_storage::elasticity::{
    average_response, isotonic_residual, ped_curve, state_conditional_ped, write_elasticity_csv,
};
use ramp_storage::finite::ProblemConfig;
use ramp_storage::infinite::{phase_map, relative_value_iteration_with, RviOptions};
use ramp_storage::price::{pmf_lognormal, pmf_two_point};

#[test]
fn response_falls_with_price_and_ped_is_non_positive() {
    let pmf = pmf_lognormal(52.0, 22.0, 60, (0.0, 160.0)).unwrap();
    let cfg = ProblemConfig::iid(pmf, 48, 10.0, 5).with_salvage(52.0);
    let curve = average_response(&cfg, 2000, 20, 4).unwrap();
    assert!(isotonic_residual(&curve) <= 0.05 * 10.0 * 20.0);
    for r in curve.avg_response.iter().flatten() {
        assert!(r.abs() <= 10.0 + 1e-12);
    }
    let ped = ped_curve(&curve, 30.0).unwrap();
    let filled: Vec<f64> = curve.avg_response.iter().flatten().copied().collect();
    for (j, p) in ped.points.iter().enumerate() {
        let (a, b) = (j.saturating_sub(1), (j + 1).min(filled.len() - 1));
        if filled[b] <= filled[a] {
            assert!(p.ped <= 0.0);
        }
    }
    let mut buf = Vec::new();
    write_elasticity_csv(&curve, &ped, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("price,avg_response,count,ped\n"));
    assert_eq!(text.lines().count(), 21);
}

#[test]
fn two_point_response_signs() {
    let cfg = ProblemConfig::iid(pmf_two_point(0.0, 1.0, 0.5).unwrap(), 400, 1.0, 4);
    let curve = average_response(&cfg, 300, 40, 2).unwrap();
    let low = curve.avg_response.first().unwrap().unwrap();
    let high = curve.avg_response.last().unwrap().unwrap();
    assert!(low > 0.0 && high < 0.0);
}

#[test]
fn state_conditional_zero_off_boundary() {
    let pmf = pmf_lognormal(50.0, 25.0, 30, (0.0, 150.0)).unwrap();
    let sol = relative_value_iteration_with(&pmf, 6, 1.0, RviOptions::default()).unwrap();
    let map = phase_map(&sol);
    for b in &map {
        for (j, &price) in pmf.support().iter().enumerate() {
            let e = state_conditional_ped(&sol, 5.0, b.state, price).unwrap();
            let row = &sol.policy[b.state];
            let changes = (j + 1 < row.len() && row[j + 1] != row[j]) || (j > 0 && row[j - 1] != row[j]);
            assert_eq!(e.ped != 0.0, changes, "state {} price {price}", b.state);
            assert!(e.ped <= 0.0);
        }
    }
}
