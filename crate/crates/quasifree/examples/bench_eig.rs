use std::time::Instant;
use quasifree::decouple::ChainModel;
use quasifree::fermion;
use quasifree::model::ModelSpec;

fn main() {
    let model = ModelSpec::fermion_half_filled(1, 1.0).unwrap();
    let chain = ChainModel::from_model(&model, &[]).unwrap();
    for m in [512usize, 1024, 2048] {
        let t0 = Instant::now();
        let es = fermion::exact_entropy_ladder(&chain, &[m]).unwrap();
        println!("M={m}: E_S={:.8} in {:.2?}", es[0], t0.elapsed());
    }
    let t0 = Instant::now();
    let es = fermion::exact_entropy_ladder(&chain, &[64, 128, 256, 512, 1024, 2048]).unwrap();
    println!("full ladder: {:?} in {:.2?}", es.iter().map(|e| format!("{e:.6}")).collect::<Vec<_>>(), t0.elapsed());
}
