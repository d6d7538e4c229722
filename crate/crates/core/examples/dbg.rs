use cascade_core::dyadic::{DyadicRational, IntervalD};
use cascade_core::weight::PhiConfig;
use cascade_core::logpos::log_sum;
use cascade_core::cascade::pull_back_tile;

fn main() {
    let cfg = PhiConfig::new(1e-12).unwrap();
    // sum of level-2 tiles (4 gen-1 children of one parent) vs 1
    let tiles: Vec<_> = (0..4).map(|m| cfg.log_phi_integral(&pull_back_tile(2, m)).unwrap()).collect();
    let s = log_sum(&tiles);
    println!("level-2 conservation |ln sum| = {:e}", s.ln_f64().abs());
    // deeper level: 5 (32 tiles)
    let t5: Vec<_> = (0..32).map(|m| cfg.log_phi_integral(&pull_back_tile(5, m)).unwrap()).collect();
    println!("level-5 conservation |ln sum| = {:e}", log_sum(&t5).ln_f64().abs());
    // level-15 tiles, k=4 grid full: spec log_sum example: all gen-4 masses -> ln 1 within 1e-15
    // gen-4 leaves = product over levels 1..=5... use oracle total instead:
    let oracle = cascade_core::oracle::GridOracle::build(4, &cfg).unwrap();
    println!("gen-4 grid total - 1 = {:e}", oracle.total().to_f64() - 1.0);
    // single integral accuracy vs E2: phi([0,1/2))
    let iv = IntervalD::new(DyadicRational::zero(), "2^-1".parse().unwrap()).unwrap();
    let got = cfg.log_phi_integral(&iv).unwrap().ln_f64();
    println!("phi([0,1/2)) ln err vs mpmath = {:e}", (got - 0.436_809_095_043_648_009_076_228_4f64.ln()).abs());
}
