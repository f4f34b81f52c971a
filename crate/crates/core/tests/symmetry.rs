use spinpump::charge::{total_charge, KGrid, TauSampling};
use spinpump::dynamics::{propagate, uniform_tau_grid, PropagationConfig};
use spinpump::model::{ModelParams, RampProtocol};
use std::f64::consts::PI;

#[test]
fn velocity_expectation_is_even_in_k() {
    let grid = uniform_tau_grid::<f64>(50);
    let cfg = PropagationConfig::default();
    for (ratio, proto) in [
        (0.3, RampProtocol::linear()),
        (1.2, RampProtocol::linear()),
        (0.8, RampProtocol::quadratic()),
    ] {
        let p = ModelParams::experiment(ratio).unwrap();
        for j in 1..=19 {
            let k = j as f64 * PI / 20.0;
            let a = propagate(&p, &proto, k, 1.0, &grid, &cfg).unwrap();
            let b = propagate(&p, &proto, -k, 1.0, &grid, &cfg).unwrap();
            for (x, y) in a.samples.iter().zip(&b.samples) {
                assert!(
                    (x.v_expect - y.v_expect).abs() < 1e-8,
                    "k = {k}: {} vs {}",
                    x.v_expect,
                    y.v_expect
                );
            }
        }
    }
}

#[test]
fn half_zone_equals_full_zone() {
    let sampling = TauSampling::intervals(200, PropagationConfig::midpoint(4000));
    for (ratio, proto) in [
        (0.5f64, RampProtocol::linear()),
        (1.3, RampProtocol::quadratic()),
    ] {
        let p = ModelParams::experiment(ratio).unwrap();
        let half = total_charge(&p, &proto, 1.0, &KGrid::uniform(100).unwrap(), &sampling).unwrap();
        let full =
            total_charge(&p, &proto, 1.0, &KGrid::full_zone(200).unwrap(), &sampling).unwrap();
        assert!(
            (half - full).abs() < 1e-10 * half.abs().max(1.0),
            "{half} vs {full}"
        );
    }
}
