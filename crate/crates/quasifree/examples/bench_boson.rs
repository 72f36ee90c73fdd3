use std::time::Instant;
use quasifree::boson;
use quasifree::model::ModelSpec;

fn main() {
    let model = ModelSpec::boson_critical(2).unwrap();
    for n in [64usize, 128, 256, 512] {
        let t0 = Instant::now();
        let (agg, _) = boson::halfspace_entropy_aggregate(&model, n, 1.0 / n as f64, false, 2).unwrap();
        println!(
            "N={n}: EE={:.9} err={:?} punct={} in {:.2?}",
            agg.value, agg.error, agg.punctured, t0.elapsed()
        );
    }
    let t0 = Instant::now();
    let report = boson::area_law_check(&model, &[64, 128], &[1.0, 0.5, 0.25], 2).unwrap();
    println!("area_law_check 64/128 ladder in {:.2?}: trend {:?} mu_var {:.2e} bound {:.6}",
        t0.elapsed(), report.trend, report.mu_variation, report.bound);
}
