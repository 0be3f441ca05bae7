use screenfail_core::*;
use std::time::Instant;
fn main() {
    let mut s = RngStream::new(1, 1).normals();
    let t = Instant::now();
    let mut acc = 0.0;
    for _ in 0..50_000_000 { acc += s.next_normal(); }
    println!("normals: {:.2} ns each ({acc})", t.elapsed().as_nanos() as f64 / 5e7);
    let model = solve_ar1_beta(0.25, 3.0).unwrap().model(2000, 1.0).unwrap();
    let t = Instant::now();
    let mut d = None;
    for r in 0..10 { d = Some(sample_dataset(&model, 1000, RngStream::new(1, r)).unwrap()); }
    println!("sample: {:.2} ns/entry", t.elapsed().as_nanos() as f64 / 2e7);
    let d = d.unwrap();
    let t = Instant::now();
    for _ in 0..10 { std::hint::black_box(marginal_correlations(&d).unwrap()); }
    println!("corr: {:.2} ns/entry", t.elapsed().as_nanos() as f64 / 2e7);
    let t = Instant::now();
    for r in 0..10 { std::hint::black_box(streaming_correlations(&model, 1000, RngStream::new(1, r)).unwrap()); }
    println!("streaming: {:.2} ns/entry", t.elapsed().as_nanos() as f64 / 2e7);
}
