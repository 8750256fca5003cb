//! Prints `count · radius^n` for the packings used by the lower-bound
//! experiments; the frozen packing constant is the rounded-down minimum.

use nodal_core::experiments::pack_balls;

fn main() {
    let rescaled = 3.0;
    let mut worst = f64::INFINITY;
    for m in 4..=64 {
        let radius = rescaled / m as f64;
        let p = pack_balls(2, radius).expect("radius below π/4");
        let c = p.count() as f64 * radius * radius;
        worst = worst.min(c);
        println!("m={m:>2} radius={radius:.5} count={:>5} count*radius^2={c:.4}", p.count());
    }
    println!("minimum {worst:.4}");
}
