//! Print the theory detection probabilities for the four benchmark
//! source models across D = 1..9, for eyeballing against references.

use privgame::gaussian::pdd_full_grid_search;
use privgame::prob::GaussMixture;

fn main() {
    let grid_n: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(51);
    let models = [
        ("p=0.50 N(-3,1)/N(3,1)", GaussMixture::new(0.5, 3.0, 1.0, 1.0).unwrap()),
        ("p=0.75 N(-3,1)/N(3,1)", GaussMixture::new(0.75, 3.0, 1.0, 1.0).unwrap()),
        ("p=0.50 N(-3,4)/N(3,1)", GaussMixture::new(0.5, 3.0, 4.0, 1.0).unwrap()),
        ("p=0.75 N(-3,4)/N(3,1)", GaussMixture::new(0.75, 3.0, 4.0, 1.0).unwrap()),
    ];
    for (name, model) in models {
        let start = std::time::Instant::now();
        print!("{name}:");
        for d in 1..=9 {
            let (_, acc) = pdd_full_grid_search(&model, d as f64, grid_n).unwrap();
            print!(" {acc:.4}");
        }
        println!("   ({:?})", start.elapsed());
    }
}
